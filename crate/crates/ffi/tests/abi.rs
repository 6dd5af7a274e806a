use std::ffi::{CStr, CString};
use std::ptr;

use bless_ffi::*;

fn gradient_rgb(w: usize, h: usize, shift: u8) -> Vec<u8> {
    let mut v = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            v.push((x * 255 / w) as u8);
            v.push((y * 255 / h) as u8);
            v.push(((x + y) as u8).wrapping_add(shift));
        }
    }
    v
}

unsafe fn image(w: usize, h: usize, shift: u8) -> *mut BlessImage {
    let data = gradient_rgb(w, h, shift);
    let mut img = ptr::null_mut();
    assert_eq!(
        bless_image_from_rgb8(w, h, data.as_ptr(), data.len(), &mut img),
        BlessStatus::Ok
    );
    img
}

#[test]
fn identity_scores_are_one() {
    unsafe {
        let a = image(64, 48, 0);
        assert_eq!(bless_image_width(a), 64);
        assert_eq!(bless_image_height(a), 48);
        let all = [
            BlessEstimator::Fsim,
            BlessEstimator::Fsimc,
            BlessEstimator::Srsim,
            BlessEstimator::BlessFsim,
            BlessEstimator::BlessFsimc,
            BlessEstimator::BlessSrsim,
            BlessEstimator::Bless,
        ];
        let mut scores = [0.0; 7];
        let st = bless_score_many(
            ptr::null(),
            a,
            a,
            all.as_ptr(),
            all.len(),
            scores.as_mut_ptr(),
        );
        assert_eq!(st, BlessStatus::Ok);
        for s in scores {
            assert!((s - 1.0).abs() < 1e-9, "{s}");
        }
        bless_image_free(a);
    }
}

#[test]
fn distorted_scores_below_one_with_config() {
    unsafe {
        let (a, b) = (image(64, 64, 0), image(64, 64, 40));
        let text = CString::new("[tau]\nscales = 3\n").unwrap();
        let mut cfg = ptr::null_mut();
        assert_eq!(
            bless_config_from_toml(text.as_ptr(), &mut cfg),
            BlessStatus::Ok
        );
        assert_eq!(bless_config_set_downsample(cfg, false), BlessStatus::Ok);
        let mut s = 0.0;
        assert_eq!(
            bless_score(cfg, a, b, BlessEstimator::BlessFsimc, &mut s),
            BlessStatus::Ok
        );
        assert!(s > 0.0 && s < 1.0, "{s}");
        bless_config_free(cfg);
        bless_image_free(a);
        bless_image_free(b);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let (a, b) = (image(64, 64, 0), image(64, 48, 0));
        let mut s = 0.0;
        assert_eq!(
            bless_score(ptr::null(), a, b, BlessEstimator::Fsim, &mut s),
            BlessStatus::DimensionMismatch
        );
        let msg = CStr::from_ptr(bless_last_error_message()).to_str().unwrap();
        assert!(msg.contains("dimension"), "{msg}");

        assert_eq!(
            bless_score(ptr::null(), ptr::null(), b, BlessEstimator::Fsim, &mut s),
            BlessStatus::NullPointer
        );

        let junk = [1u8, 2, 3, 4];
        let mut img = ptr::null_mut();
        assert_eq!(
            bless_image_decode(junk.as_ptr(), junk.len(), &mut img),
            BlessStatus::UnsupportedFormat
        );
        assert!(img.is_null());

        let missing = CString::new("/nonexistent/x.png").unwrap();
        assert_eq!(
            bless_image_load(missing.as_ptr(), &mut img),
            BlessStatus::Io
        );

        let bad = CString::new("bogus = 1").unwrap();
        let mut cfg = ptr::null_mut();
        assert_eq!(
            bless_config_from_toml(bad.as_ptr(), &mut cfg),
            BlessStatus::Config
        );

        let data = [0u8; 10];
        assert_eq!(
            bless_image_from_rgb8(2, 2, data.as_ptr(), data.len(), &mut img),
            BlessStatus::InvalidArgument
        );
        bless_image_free(a);
        bless_image_free(b);
        bless_image_free(ptr::null_mut());
        bless_config_free(ptr::null_mut());
    }
}

#[test]
fn statistics() {
    unsafe {
        let x = [1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 2.0];
        let mut r = 0.0;
        assert_eq!(
            bless_spearman(x.as_ptr(), y.as_ptr(), 3, &mut r),
            BlessStatus::Ok
        );
        assert_eq!(r, 0.5);
        let mut bit = -1;
        assert_eq!(
            bless_significance(0.9, 0.5, 1375, 1.96, &mut bit),
            BlessStatus::Ok
        );
        assert_eq!(bit, 1);
        assert_eq!(
            bless_significance(0.9, 0.5, 3, 1.96, &mut bit),
            BlessStatus::Statistics
        );
        let v = CStr::from_ptr(bless_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
