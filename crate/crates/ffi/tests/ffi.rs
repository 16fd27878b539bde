use std::ffi::{c_char, CStr, CString};
use std::ptr;

use quadcover_ffi::*;

fn new_model(n: u32) -> *mut QcModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { qc_model_new(n, 0, 0, &mut m) }, QcStatus::Ok);
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let mut need = 0usize;
    unsafe {
        assert_eq!(qc_last_error(ptr::null_mut(), 0, &mut need), QcStatus::BufferTooSmall);
        let mut buf = vec![0 as c_char; need];
        assert_eq!(qc_last_error(buf.as_mut_ptr(), buf.len(), &mut need), QcStatus::Ok);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn model_counts_and_coords() {
    let m = new_model(2);
    let mut c = QcModelCounts::default();
    unsafe {
        assert_eq!(qc_model_counts(m, &mut c), QcStatus::Ok);
        assert_eq!(c, QcModelCounts { q: 4, points_q: 325, points_q0: 85, lines_q: 1105, lines_q0: 85 });
        let mut xs = [0u16; 6];
        assert_eq!(qc_point_coords(m, 0, xs.as_mut_ptr()), QcStatus::Ok);
        assert!(xs.iter().any(|&x| x != 0));
        assert_eq!(qc_point_coords(m, 325, xs.as_mut_ptr()), QcStatus::OutOfRange);
        let mut k = 0u32;
        assert_eq!(qc_ovoid_count(m, &mut k), QcStatus::Ok);
        assert_eq!(k, 120);
        let mut t = false;
        assert_eq!(qc_ovoids_tangent(m, 0, 0, &mut t), QcStatus::Ok);
        assert!(!t);
        assert_eq!(qc_ovoids_tangent(m, 0, 120, &mut t), QcStatus::OutOfRange);
        qc_model_free(m);
    }
}

#[test]
fn census_through_handle() {
    let m = new_model(2);
    let mut got = QcCliqueCounts::default();
    let mut want = QcCliqueCounts::default();
    unsafe {
        assert_eq!(qc_census(m, &mut got), QcStatus::Ok);
        assert_eq!(qc_formula_counts(2, &mut want), QcStatus::Ok);
        qc_model_free(m);
    }
    assert_eq!(got, want);
    assert_eq!((got.n3, got.n4, got.n5, got.n6), (16320, 20400, 0, 0));
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(qc_model_new(4, 0, 0, &mut m), QcStatus::TooLarge);
        assert!(last_error().contains("n <= 3"));
        assert_eq!(qc_model_new(2, 0b10101, 0, &mut m), QcStatus::InvalidArgument);
        assert_eq!(qc_model_new(2, 0, 1, &mut m), QcStatus::InvalidArgument);
        assert_eq!(qc_model_new(2, 0, 0, ptr::null_mut()), QcStatus::NullPointer);
        assert_eq!(qc_model_counts(ptr::null(), &mut QcModelCounts::default()), QcStatus::NullPointer);
        assert_eq!(qc_formula_counts(0, &mut QcCliqueCounts::default()), QcStatus::OutOfRange);
        qc_model_free(ptr::null_mut());
        let s = CStr::from_ptr(qc_status_str(QcStatus::CheckFailed));
        assert_eq!(s.to_str().unwrap(), "check failed");
    }
}

#[test]
fn run_json() {
    let args = CString::new("counts --n-max 5").unwrap();
    let mut need = 0usize;
    unsafe {
        assert_eq!(qc_run_json(args.as_ptr(), ptr::null_mut(), 0, &mut need), QcStatus::BufferTooSmall);
        let mut buf = vec![0 as c_char; need];
        assert_eq!(qc_run_json(args.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut need), QcStatus::Ok);
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "counts");
        let bad = CString::new("census --mode nope").unwrap();
        assert_eq!(qc_run_json(bad.as_ptr(), ptr::null_mut(), 0, ptr::null_mut()), QcStatus::InvalidArgument);
    }
}

#[test]
fn header_lists_every_function() {
    let header = include_str!("../include/quadcover.h");
    let src = include_str!("../src/lib.rs");
    let names: Vec<&str> = src.lines().filter_map(|l| l.trim().strip_prefix("pub unsafe extern \"C\" fn ").or_else(|| l.trim().strip_prefix("pub extern \"C\" fn "))).map(|l| &l[..l.find('(').unwrap()]).collect();
    assert!(names.len() >= 10);
    for n in names {
        assert!(header.contains(&format!("{n}(")), "{n} missing from header");
    }
    assert!(header.contains("typedef struct QcModel QcModel;"));
}
