//! Exercises the C entry points from Rust: status codes, out-pointer
//! discipline, the thread-local error message, and handle lifecycles.

use std::ffi::{CStr, CString};
use std::ptr;

use freemask_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(fm_last_error_message()) }
        .to_str()
        .expect("utf8 error message")
        .to_string()
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(fm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn catalan_values_and_budget() {
    let mut out = 0u64;
    assert_eq!(fm_catalan(4, &mut out), FmStatus::Ok);
    assert_eq!(out, 14);
    assert_eq!(fm_catalan(0, &mut out), FmStatus::Ok);
    assert_eq!(out, 1);

    let status = fm_catalan(99, &mut out);
    assert_eq!(status, FmStatus::Domain);
    assert!(last_error().contains("99"));
}

#[test]
fn null_out_pointer_is_reported() {
    assert_eq!(fm_catalan(2, ptr::null_mut()), FmStatus::NullPointer);
    assert!(last_error().contains("null"));
}

#[test]
fn star_moments_match_catalan() {
    // alternating pattern of length 2k has moment catalan(k) for any rho
    let stars: Vec<u8> = (0..6).map(|i| (i % 2) as u8).collect();
    for rho in [-1.0, 0.0, 0.7] {
        let mut out = 0.0;
        let status = unsafe { fm_elliptic_star_moment(stars.as_ptr(), stars.len(), rho, &mut out) };
        assert_eq!(status, FmStatus::Ok);
        assert_eq!(out, 5.0);
    }
    // odd length vanishes
    let mut out = 1.0;
    let status = unsafe { fm_elliptic_star_moment(stars.as_ptr(), 3, 0.5, &mut out) };
    assert_eq!(status, FmStatus::Ok);
    assert_eq!(out, 0.0);
}

#[test]
fn mp_moment_forms_agree() {
    for k in 1..=6 {
        for y in [0.5, 1.0, 2.0] {
            let (mut a, mut b) = (0.0, 0.0);
            assert_eq!(fm_mp_moment_nc(k, y, &mut a), FmStatus::Ok);
            assert_eq!(fm_mp_moment_closed(k, y, &mut b), FmStatus::Ok);
            assert!((a - b).abs() < 1e-10, "k={k} y={y}: {a} vs {b}");
        }
    }
    let mut out = 0.0;
    assert_eq!(fm_mp_moment_nc(1, -0.5, &mut out), FmStatus::Domain);
}

#[test]
fn mp_density_and_cdf_are_consistent() {
    let mut density = 0.0;
    assert_eq!(fm_mp_density(1.0, 1.0, &mut density), FmStatus::Ok);
    assert!((density - 1.0 / std::f64::consts::PI * (3.0f64).sqrt() / 2.0).abs() < 1e-12);

    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(fm_mp_cdf(-1.0, 2.0, &mut lo), FmStatus::Ok);
    assert_eq!(fm_mp_cdf(100.0, 2.0, &mut hi), FmStatus::Ok);
    assert_eq!(lo, 0.0);
    assert!((hi - 1.0).abs() < 1e-9);
    // atom at zero for y > 1
    let mut at_zero = 0.0;
    assert_eq!(fm_mp_cdf(0.0, 2.0, &mut at_zero), FmStatus::Ok);
    assert!((at_zero - 0.5).abs() < 1e-12);
}

#[test]
fn mask_lifecycle_density_and_weight() {
    let mut mask: *mut FmMask = ptr::null_mut();
    assert_eq!(fm_mask_band_removed(16, 1, &mut mask), FmStatus::Ok);
    assert!(!mask.is_null());

    let mut density = 0.0;
    assert_eq!(unsafe { fm_mask_density(mask, &mut density) }, FmStatus::Ok);
    // 16 diagonal plus 2*15 off-diagonal zeros out of 256
    assert_eq!(density, (256.0 - 46.0) / 256.0);

    let (mut d, mut rows, mut cols) = (0.0, 0usize, 0usize);
    assert_eq!(
        unsafe { fm_mask_epsilon_sets(mask, 0.25, &mut d, &mut rows, &mut cols) },
        FmStatus::Ok
    );
    assert_eq!(d, density);
    assert_eq!((rows, cols), (16, 16));

    let pairs = [1usize, 2, 3, 4];
    let mut weight = 0.0;
    assert_eq!(
        unsafe { fm_mask_partition_weight(mask, pairs.as_ptr(), 2, &mut weight) },
        FmStatus::Ok
    );
    assert!(weight > 0.0 && weight <= 1.0);

    // invalid partition: indices must cover 1..=2k
    let bad = [1usize, 1, 2, 3];
    assert_eq!(
        unsafe { fm_mask_partition_weight(mask, bad.as_ptr(), 2, &mut weight) },
        FmStatus::Domain
    );

    unsafe { fm_mask_free(mask) };
    unsafe { fm_mask_free(ptr::null_mut()) };
}

#[test]
fn checkerboard_weight_is_half_through_the_c_api() {
    let mut mask: *mut FmMask = ptr::null_mut();
    assert_eq!(fm_mask_checkerboard(64, &mut mask), FmStatus::Ok);
    let pairs = [1usize, 2];
    let mut weight = 0.0;
    assert_eq!(
        unsafe { fm_mask_partition_weight(mask, pairs.as_ptr(), 1, &mut weight) },
        FmStatus::Ok
    );
    assert_eq!(weight, 0.5);
    unsafe { fm_mask_free(mask) };
}

#[test]
fn invalid_mask_parameters_are_domain_errors() {
    let mut mask: *mut FmMask = ptr::null_mut();
    assert_eq!(fm_mask_bernoulli(4, 4, 1.5, 0, &mut mask), FmStatus::Domain);
    assert_eq!(fm_mask_kill_columns(0, 0.5, &mut mask), FmStatus::Domain);
    assert!(mask.is_null());
}

#[test]
fn run_config_json_round_trips() {
    let config = CString::new(
        r#"{
  "scenario": "moment-sweep",
  "seed": 9,
  "trials": 6,
  "sizes": [16],
  "labels": [{"label": 1, "ensemble": {"kind": "iid", "dist": "gaussian"}}],
  "words": ["1,1*"]
}"#,
    )
    .unwrap();
    let mut report: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { fm_run_config_json(config.as_ptr(), &mut report) };
    assert_eq!(status, FmStatus::Ok);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_string();
    unsafe { fm_string_free(report) };

    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["scenario"], "moment-sweep");
    assert_eq!(v["rows"]["moments"][0]["limit"], 1.0);
}

#[test]
fn run_config_json_maps_error_kinds() {
    let mut report: *mut std::ffi::c_char = ptr::null_mut();

    let bad_json = CString::new("{not json").unwrap();
    assert_eq!(
        unsafe { fm_run_config_json(bad_json.as_ptr(), &mut report) },
        FmStatus::Config
    );
    assert!(last_error().contains("line"));

    let bad_word = CString::new(
        r#"{
  "scenario": "moment-sweep",
  "seed": 1,
  "trials": 5,
  "sizes": [8],
  "labels": [{"label": 1, "ensemble": {"kind": "iid", "dist": "gaussian"}}],
  "words": ["1,,1*"]
}"#,
    )
    .unwrap();
    assert_eq!(
        unsafe { fm_run_config_json(bad_word.as_ptr(), &mut report) },
        FmStatus::Parse
    );

    assert_eq!(
        unsafe { fm_run_config_json(ptr::null(), &mut report) },
        FmStatus::NullPointer
    );
    assert!(report.is_null());
}
