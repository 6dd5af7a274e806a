/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef BLESS_H
#define BLESS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BlessEstimator {
  BLESS_ESTIMATOR_FSIM = 0,
  BLESS_ESTIMATOR_FSIMC = 1,
  BLESS_ESTIMATOR_SRSIM = 2,
  BLESS_ESTIMATOR_BLESS_FSIM = 3,
  BLESS_ESTIMATOR_BLESS_FSIMC = 4,
  BLESS_ESTIMATOR_BLESS_SRSIM = 5,
  BLESS_ESTIMATOR_BLESS = 6,
} BlessEstimator;

typedef enum BlessStatus {
  BLESS_STATUS_OK = 0,
  BLESS_STATUS_NULL_POINTER = 1,
  BLESS_STATUS_INVALID_ARGUMENT = 2,
  BLESS_STATUS_IO = 3,
  BLESS_STATUS_DECODE = 4,
  BLESS_STATUS_UNSUPPORTED_FORMAT = 5,
  BLESS_STATUS_DIMENSION_MISMATCH = 6,
  BLESS_STATUS_IMAGE_TOO_SMALL = 7,
  BLESS_STATUS_CONFIG = 8,
  BLESS_STATUS_STATISTICS = 9,
  BLESS_STATUS_INTERNAL = 10,
} BlessStatus;

/*
 Opaque pipeline configuration.
 */
typedef struct BlessConfig BlessConfig;

/*
 Opaque decoded image.
 */
typedef struct BlessImage BlessImage;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failing call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *bless_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *bless_version(void);

/*
 Wrap interleaved 8-bit sRGB samples (`width * height * 3` bytes).
 */
enum BlessStatus bless_image_from_rgb8(size_t width,
                                       size_t height,
                                       const uint8_t *data,
                                       size_t len,
                                       struct BlessImage **out);

/*
 Decode an encoded PNG, BMP or PNM image from memory.
 */
enum BlessStatus bless_image_decode(const uint8_t *bytes, size_t len, struct BlessImage **out);

/*
 Load an image file.
 */
enum BlessStatus bless_image_load(const char *path, struct BlessImage **out);

/*
 Width in pixels; 0 for NULL.
 */
size_t bless_image_width(const struct BlessImage *image);

/*
 Height in pixels; 0 for NULL.
 */
size_t bless_image_height(const struct BlessImage *image);

/*
 Free an image. NULL is ignored.
 */
void bless_image_free(struct BlessImage *image);

/*
 Default configuration.
 */
enum BlessStatus bless_config_default(struct BlessConfig **out);

/*
 Configuration from TOML text (NUL-terminated, UTF-8).
 */
enum BlessStatus bless_config_from_toml(const char *text, struct BlessConfig **out);

/*
 Configuration from a TOML file.
 */
enum BlessStatus bless_config_load(const char *path, struct BlessConfig **out);

/*
 Enable or disable the reference-code metric downsampling.
 */
enum BlessStatus bless_config_set_downsample(struct BlessConfig *config, bool enabled);

/*
 Free a configuration. NULL is ignored.
 */
void bless_config_free(struct BlessConfig *config);

/*
 Score `distorted` against `reference` with `count` estimators, writing
 one score per estimator to `scores`. A NULL `config` means defaults.
 */
enum BlessStatus bless_score_many(const struct BlessConfig *config,
                                  const struct BlessImage *reference,
                                  const struct BlessImage *distorted,
                                  const enum BlessEstimator *estimators,
                                  size_t count,
                                  double *scores);

/*
 Score with a single estimator.
 */
enum BlessStatus bless_score(const struct BlessConfig *config,
                             const struct BlessImage *reference,
                             const struct BlessImage *distorted,
                             enum BlessEstimator estimator,
                             double *score);

/*
 Spearman rank correlation of two arrays of length `n`.
 */
enum BlessStatus bless_spearman(const double *x, const double *y, size_t n, double *out);

/*
 Fisher-z significance of the difference between two correlations over
 the same `n` samples; writes 1 when significant at `critical_z`.
 */
enum BlessStatus bless_significance(double srcc_a,
                                    double srcc_b,
                                    size_t n,
                                    double critical_z,
                                    int32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLESS_H */
