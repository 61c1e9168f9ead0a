use std::ffi::{CStr, CString};
use std::ptr;

use pmc_ffi::*;

const LN2: f64 = std::f64::consts::LN_2;

fn last_error() -> String {
    unsafe { CStr::from_ptr(pmc_last_error()) }.to_string_lossy().into_owned()
}

fn rr_log3() -> *mut PmcJoint {
    let prior = [0.5, 0.5];
    let channel = [0.75, 0.25, 0.25, 0.75];
    let mut j = ptr::null_mut();
    let s = unsafe { pmc_joint_new(prior.as_ptr(), 2, channel.as_ptr(), 2, &mut j) };
    assert_eq!(s, PmcStatus::Ok);
    j
}

#[test]
fn joint_roundtrip_and_levels() {
    let j = rr_log3();
    let (mut v, mut n) = (0.0, 0usize);
    unsafe {
        assert_eq!(pmc_joint_outputs(j, &mut n), PmcStatus::Ok);
        assert_eq!(n, 2);
        assert_eq!(pmc_joint_pmc(j, 0, &mut v), PmcStatus::Ok);
        assert!((v - LN2).abs() < 1e-12);
        assert_eq!(pmc_joint_pml(j, 1, &mut v), PmcStatus::Ok);
        assert!((v - 1.5f64.ln()).abs() < 1e-12);
        let mut levels = std::mem::zeroed::<PmcLevels>();
        assert_eq!(pmc_joint_levels(j, &mut levels), PmcStatus::Ok);
        assert!((levels.ldp - 3f64.ln()).abs() < 1e-12);
        assert_eq!(levels.alip_lower, levels.pmc);
        pmc_joint_free(j);
    }
}

#[test]
fn zero_entry_gives_infinity() {
    let prior = [0.5, 0.5];
    let channel = [1.0, 0.0, 0.5, 0.5];
    let mut j = ptr::null_mut();
    let mut v = 0.0;
    unsafe {
        assert_eq!(pmc_joint_new(prior.as_ptr(), 2, channel.as_ptr(), 2, &mut j), PmcStatus::Ok);
        assert_eq!(pmc_joint_pmc(j, 0, &mut v), PmcStatus::Ok);
        assert!(v.is_finite());
        assert_eq!(pmc_joint_pmc(j, 1, &mut v), PmcStatus::Ok);
        assert_eq!(v, f64::INFINITY);
        pmc_joint_free(j);
    }
}

#[test]
fn invalid_input_sets_status_and_message() {
    let prior = [0.5, 0.5];
    let channel = [0.9, 0.2, 0.5, 0.5];
    let mut j = ptr::null_mut();
    let s = unsafe { pmc_joint_new(prior.as_ptr(), 2, channel.as_ptr(), 2, &mut j) };
    assert_eq!(s, PmcStatus::InvalidInput);
    assert!(j.is_null());
    assert!(last_error().contains("row 0"), "{}", last_error());
}

#[test]
fn null_pointers_are_rejected() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(pmc_joint_pmc(ptr::null(), 0, &mut v), PmcStatus::NullPointer);
        assert_eq!(pmc_pml_to_pmc(0.1, 0.5, ptr::null_mut()), PmcStatus::NullPointer);
        pmc_joint_free(ptr::null_mut());
        pmc_string_free(ptr::null_mut());
    }
}

#[test]
fn outcome_out_of_range() {
    let j = rr_log3();
    let mut v = 0.0;
    unsafe {
        assert_eq!(pmc_joint_pmc(j, 5, &mut v), PmcStatus::UndefinedOutcome);
        pmc_joint_free(j);
    }
}

#[test]
fn translations() {
    let mut v = 0.0;
    assert_eq!(unsafe { pmc_pml_to_pmc(0.0, 0.3, &mut v) }, PmcStatus::Ok);
    assert_eq!(v, 0.0);
    assert_eq!(unsafe { pmc_pml_to_pmc(1.0, 0.3, &mut v) }, PmcStatus::Ok);
    assert_eq!(v, f64::INFINITY);
    assert_eq!(unsafe { pmc_ldp_to_pmc(3f64.ln(), 0.5, &mut v) }, PmcStatus::Ok);
    assert!((v - LN2).abs() < 1e-12);
    let mut back = 0.0;
    assert_eq!(unsafe { pmc_pml_to_pmc(0.2, 0.5, &mut v) }, PmcStatus::Ok);
    assert_eq!(unsafe { pmc_pmc_to_pml(v, 0.5, &mut back) }, PmcStatus::Ok);
    assert!((back - 0.2).abs() < 1e-12);
    assert_eq!(unsafe { pmc_pml_to_pmc(-1.0, 0.5, &mut v) }, PmcStatus::InvalidInput);
    assert_eq!(unsafe { pmc_pml_to_pmc(0.1, 1.5, &mut v) }, PmcStatus::InvalidInput);
}

#[test]
fn mechanism_constructors() {
    let prior = [0.25, 0.25, 0.5];
    let mut j = ptr::null_mut();
    let mut levels = unsafe { std::mem::zeroed::<PmcLevels>() };
    unsafe {
        assert_eq!(pmc_randomized_response(prior.as_ptr(), 3, 2f64.ln(), &mut j), PmcStatus::Ok);
        assert_eq!(pmc_joint_levels(j, &mut levels), PmcStatus::Ok);
        assert!((levels.ldp - LN2).abs() < 1e-12);
        pmc_joint_free(j);

        assert_eq!(pmc_extremal_mechanism(prior.as_ptr(), 3, 0.1, &mut j), PmcStatus::Ok);
        assert_eq!(pmc_joint_levels(j, &mut levels), PmcStatus::Ok);
        assert!((levels.pml - 0.1).abs() < 1e-12);
        pmc_joint_free(j);

        assert_eq!(pmc_extremal_mechanism(prior.as_ptr(), 3, 1.0, &mut j), PmcStatus::OutsideRegime);
    }
}

#[test]
fn continuous_mechanisms() {
    let mut v = 0.0;
    assert_eq!(unsafe { pmc_laplace_sup_pmc(0.0, 1.0, 1, 1.0, &mut v) }, PmcStatus::Ok);
    assert!((v - (std::f64::consts::E - 1.0).ln()).abs() < 1e-12);
    assert_eq!(unsafe { pmc_laplace_sup_pmc(0.0, 1.0, 0, 1.0, &mut v) }, PmcStatus::InvalidInput);

    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { pmc_gaussian_pmc(1.0, 1.0, 0.5, &mut v) }, PmcStatus::Ok);
    assert_eq!(unsafe { pmc_gaussian_pmc_bounds(1.0, 1.0, 0.5, &mut lo, &mut hi) }, PmcStatus::Ok);
    assert!(lo <= v + 1e-12 && v <= hi + 1e-12, "{lo} {v} {hi}");
}

#[test]
fn analyze_json_roundtrip() {
    let doc = CString::new(r#"{"prior": [0.5, 0.5], "channel": [[0.75, 0.25], [0.25, 0.75]]}"#).unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(pmc_analyze_json(doc.as_ptr(), &mut out), PmcStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        pmc_string_free(out);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["pmc"].as_f64().unwrap() - LN2).abs() < 1e-12);
    }
    let bad = CString::new("{not json").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pmc_analyze_json(bad.as_ptr(), &mut out) }, PmcStatus::Parse);
    assert!(out.is_null());
    assert!(last_error().contains("line 1"), "{}", last_error());
}
