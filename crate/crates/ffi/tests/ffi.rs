use std::ffi::{CStr, CString};
use std::ptr;

use bargmann_ffi::*;

fn single_photon(re: &[f64], im: &[f64]) -> *mut BgState {
    let mut s = ptr::null_mut();
    let st = unsafe { bg_state_single_photon(re.as_ptr(), im.as_ptr(), re.len(), &mut s) };
    assert_eq!(st, BgStatus::Ok);
    s
}

fn last_error() -> String {
    let p = bg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn exact_trace_matches_oracle() {
    let a = single_photon(&[1.0, 0.0], &[0.0, 0.0]);
    let b = single_photon(&[0.6, 0.0], &[0.0, 0.8]);
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { bg_state_dual_rail(0.7, 0.4, &mut c) }, BgStatus::Ok);
    let states = [a as *const BgState, b, c];

    let mut est = ptr::null_mut();
    assert_eq!(unsafe { bg_estimate_trace(states.as_ptr(), 3, bg_mode_exact(), &mut est) }, BgStatus::Ok);
    assert_eq!(unsafe { bg_estimate_num_systems(est) }, 3);

    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { bg_estimate_delta(est, &mut re, &mut im) }, BgStatus::Ok);
    let (mut ore, mut oim) = (0.0, 0.0);
    assert_eq!(unsafe { bg_oracle_trace(states.as_ptr(), 3, &mut ore, &mut oim) }, BgStatus::Ok);
    assert!((re - ore).abs() < 1e-8 && (im - oim).abs() < 1e-8);
    assert!(oim.abs() > 1e-3, "chain should be complex");

    let (mut xr, mut xi) = (0.0, 0.0);
    assert_eq!(unsafe { bg_estimate_x(est, 1, &mut xr, &mut xi) }, BgStatus::Ok);
    assert_eq!((xr, xi), (re, im));
    assert_eq!(unsafe { bg_estimate_x(est, 3, &mut xr, &mut xi) }, BgStatus::InvalidArgument);

    let mut p = [0.0; 3];
    assert_eq!(unsafe { bg_estimate_binned(est, p.as_mut_ptr(), 3) }, BgStatus::Ok);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    assert_eq!(unsafe { bg_estimate_binned(est, p.as_mut_ptr(), 2) }, BgStatus::InvalidArgument);

    let mut eps = -1.0;
    assert_eq!(unsafe { bg_estimate_epsilon(est, &mut eps) }, BgStatus::Ok);
    assert_eq!(eps, 0.0);

    unsafe {
        bg_estimate_free(est);
        for s in states {
            bg_state_free(s as *mut BgState);
        }
    }
}

#[test]
fn sampled_runs_are_reproducible() {
    let a = single_photon(&[1.0, 0.0], &[0.0, 0.0]);
    let b = single_photon(&[0.0, 1.0], &[0.0, 0.0]);
    let states = [a as *const BgState, b];
    let mut jsons = Vec::new();
    for _ in 0..2 {
        let mut est = ptr::null_mut();
        let mode = bg_mode_sampled(738, 42);
        assert_eq!(unsafe { bg_estimate_trace(states.as_ptr(), 2, mode, &mut est) }, BgStatus::Ok);
        let mut eps = 0.0;
        unsafe { bg_estimate_epsilon(est, &mut eps) };
        assert!((eps - 0.05).abs() < 1e-3);
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { bg_estimate_to_json(est, &mut s) }, BgStatus::Ok);
        jsons.push(unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned());
        unsafe {
            bg_string_free(s);
            bg_estimate_free(est);
        }
    }
    assert_eq!(jsons[0], jsons[1]);
    assert!(jsons[0].contains("\"N\":738"));

    let mut overlap = 0.0;
    assert_eq!(unsafe { bg_hom_overlap(a, b, bg_mode_exact(), &mut overlap) }, BgStatus::Ok);
    assert!(overlap.abs() < 1e-12);
    unsafe {
        bg_state_free(a);
        bg_state_free(b);
    }
}

#[test]
fn json_round_trip_and_mixtures() {
    let a = single_photon(&[1.0, 0.0], &[0.0, 0.0]);
    let b = single_photon(&[0.0, 1.0], &[0.0, 0.0]);
    let parts = [a as *const BgState, b];
    let mut mix = ptr::null_mut();
    assert_eq!(unsafe { bg_state_mixture(parts.as_ptr(), [0.5, 0.5].as_ptr(), 2, &mut mix) }, BgStatus::Ok);
    assert_eq!(unsafe { bg_state_num_internal(mix) }, 2);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { bg_state_to_json(mix, &mut text) }, BgStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { bg_state_from_json(text, &mut back) }, BgStatus::Ok);

    let mut purity = 0.0;
    assert_eq!(unsafe { bg_hom_overlap(back, back, bg_mode_exact(), &mut purity) }, BgStatus::Ok);
    assert!((purity - 0.5).abs() < 1e-10);

    let bad = CString::new("{not json").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bg_state_from_json(bad.as_ptr(), &mut s) }, BgStatus::Json);
    assert!(s.is_null());
    assert!(!last_error().is_empty());

    unsafe {
        bg_string_free(text);
        for h in [a, b, mix, back] {
            bg_state_free(h);
        }
    }
}

#[test]
fn errors_are_reported() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bg_state_single_photon(ptr::null(), ptr::null(), 2, &mut s) }, BgStatus::NullPointer);
    assert!(last_error().contains("re"));

    let zero = [0.0, 0.0];
    assert_eq!(
        unsafe { bg_state_single_photon(zero.as_ptr(), zero.as_ptr(), 2, &mut s) },
        BgStatus::InvalidArgument
    );

    let mut c = ptr::null_mut();
    let beta = [3.0];
    let st = unsafe { bg_state_coherent(beta.as_ptr(), [0.0].as_ptr(), 1, 4, 1e-8, &mut c) };
    assert_eq!(st, BgStatus::Truncation);

    let a = single_photon(&[1.0, 0.0], &[0.0, 0.0]);
    let w = single_photon(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]);
    let mut est = ptr::null_mut();
    let pair = [a as *const BgState, w];
    assert_eq!(
        unsafe { bg_estimate_trace(pair.as_ptr(), 2, bg_mode_exact(), &mut est) },
        BgStatus::LayoutMismatch
    );
    let one = [a as *const BgState];
    assert_eq!(
        unsafe { bg_estimate_trace(one.as_ptr(), 1, bg_mode_exact(), &mut est) },
        BgStatus::InvalidArgument
    );

    let mut n = 0;
    assert_eq!(unsafe { bg_sample_count(0.05, 0.05, &mut n) }, BgStatus::Ok);
    assert_eq!(n, 738);
    assert_eq!(unsafe { bg_sample_count(0.0, 0.05, &mut n) }, BgStatus::InvalidArgument);

    unsafe {
        bg_state_free(a);
        bg_state_free(w);
        bg_state_free(ptr::null_mut());
        bg_estimate_free(ptr::null_mut());
        bg_string_free(ptr::null_mut());
    }
}

#[test]
fn fock_and_coherent_constructors() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { bg_state_fock([1u32, 1].as_ptr(), 2, &mut f) }, BgStatus::Ok);
    let mut c = ptr::null_mut();
    let st = unsafe { bg_state_coherent([0.5].as_ptr(), [0.2].as_ptr(), 1, 20, 1e-10, &mut c) };
    assert_eq!(st, BgStatus::Ok);
    let mut purity = 0.0;
    assert_eq!(unsafe { bg_hom_overlap(c, c, bg_mode_exact(), &mut purity) }, BgStatus::Ok);
    assert!((purity - 1.0).abs() < 1e-8);
    unsafe {
        bg_state_free(f);
        bg_state_free(c);
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bargmann.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let names: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(names.len() > 20);
    for n in names {
        assert!(header.contains(&format!("{n}(")), "{n} missing from header");
    }
    assert!(header.contains("typedef struct BgState BgState;"));
}
