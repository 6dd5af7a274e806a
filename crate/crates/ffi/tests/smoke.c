#include <stdio.h>
#include <stdlib.h>
#include "bless.h"

int main(void) {
    enum { W = 48, H = 40 };
    unsigned char px[W * H * 3];
    for (int i = 0; i < W * H * 3; i++) px[i] = (unsigned char)(i * 7 % 251);
    BlessImage *img = NULL;
    if (bless_image_from_rgb8(W, H, px, sizeof px, &img) != BLESS_STATUS_OK) return 1;
    double s = 0.0;
    if (bless_score(NULL, img, img, BLESS_ESTIMATOR_BLESS_FSIM, &s) != BLESS_STATUS_OK) {
        fprintf(stderr, "%s\n", bless_last_error_message());
        return 2;
    }
    bless_image_free(img);
    printf("%.6f\n", s);
    return 0;
}
