use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use fuplab_ffi::*;

fn last_error() -> String {
    let p = fup_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn cantor_handle_round_trip() {
    let digits = [0u32, 2];
    let mut set = ptr::null_mut();
    let st = unsafe { fup_set_cantor(3, digits.as_ptr(), 2, 3, &mut set) };
    assert_eq!(st, FupStatus::Ok);
    assert_eq!(unsafe { fup_set_len(set) }, 8);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { fup_set_to_text(set, &mut text) }, FupStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { fup_set_from_text(text, &mut back) }, FupStatus::Ok);
    assert_eq!(unsafe { fup_set_len(back) }, 8);
    unsafe {
        fup_string_free(text);
        fup_set_free(back);
        fup_set_free(set);
    }
}

#[test]
fn porosity_verdicts() {
    let text = CString::new("intervalset v1\n0 1\n").unwrap();
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { fup_set_from_text(text.as_ptr(), &mut set) }, FupStatus::Ok);
    let nu = CString::new("1/10").unwrap();
    let a0 = CString::new("1/4").unwrap();
    let a1 = CString::new("1").unwrap();
    let mut verdict = FupPorosity::Unknown;
    let st = unsafe { fup_check_porosity(set, nu.as_ptr(), a0.as_ptr(), a1.as_ptr(), &mut verdict) };
    assert_eq!(st, FupStatus::Ok);
    assert_eq!(verdict, FupPorosity::NotPorous);
    unsafe { fup_set_free(set) };

    let mut rnd = ptr::null_mut();
    assert_eq!(
        unsafe { fup_set_random_porous(nu.as_ptr(), 4, 9, &mut rnd) },
        FupStatus::Ok
    );
    let a0 = CString::new("1/16").unwrap();
    let st = unsafe { fup_check_porosity(rnd, nu.as_ptr(), a0.as_ptr(), a1.as_ptr(), &mut verdict) };
    assert_eq!(st, FupStatus::Ok);
    assert_eq!(verdict, FupPorosity::Porous);
    unsafe { fup_set_free(rnd) };
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("intervalset v1\n1 0\n").unwrap();
    let mut set = ptr::null_mut();
    let st = unsafe { fup_set_from_text(bad.as_ptr(), &mut set) };
    assert_eq!(st, FupStatus::ParseError);
    assert!(set.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());

    let st = unsafe { fup_set_from_text(ptr::null(), &mut set) };
    assert_eq!(st, FupStatus::NullPointer);
    assert!(last_error().contains("text"));

    let mut sigma = 0.0;
    let x = [5usize];
    let st = unsafe { fup_norm_indices(4, x.as_ptr(), 1, x.as_ptr(), 1, 1e-10, &mut sigma) };
    assert_eq!(st, FupStatus::InvalidArgument);

    let (mut d, mut m, mut e) = (0.0, 0, 0.0);
    assert_eq!(
        unsafe { fup_choose_delta(1, 0, &mut d, &mut m, &mut e) },
        FupStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { fup_choose_delta(3, 2, &mut d, &mut m, &mut e) },
        FupStatus::InvalidArgument
    );
    unsafe { fup_set_free(ptr::null_mut()) };
    assert_eq!(unsafe { fup_set_len(ptr::null()) }, 0);
}

#[test]
fn norms_and_delta() {
    let full: Vec<usize> = (0..64).collect();
    let mut sigma = 0.0;
    let st = unsafe { fup_norm_indices(64, full.as_ptr(), 64, full.as_ptr(), 64, 1e-12, &mut sigma) };
    assert_eq!(st, FupStatus::Ok);
    assert!((sigma - 1.0).abs() < 1e-10);

    let one = [3usize];
    let st = unsafe { fup_norm_indices(16, one.as_ptr(), 1, one.as_ptr(), 1, 1e-12, &mut sigma) };
    assert_eq!(st, FupStatus::Ok);
    assert!((sigma - 0.25).abs() < 1e-12);

    let digits = [0u32, 2];
    let mut c = ptr::null_mut();
    assert_eq!(
        unsafe { fup_set_cantor(3, digits.as_ptr(), 2, 4, &mut c) },
        FupStatus::Ok
    );
    assert_eq!(unsafe { fup_norm_sets(c, c, 81, 1e-10, &mut sigma) }, FupStatus::Ok);
    assert!(sigma > 0.0 && sigma < 1.0);
    unsafe { fup_set_free(c) };

    let (mut d, mut m, mut e) = (0.0, 0, 0.0);
    assert_eq!(unsafe { fup_choose_delta(1, 2, &mut d, &mut m, &mut e) }, FupStatus::Ok);
    assert_eq!(m, 4);
    assert!((e - (1.0 - 3f64.ln() / 4f64.ln())).abs() < 1e-15);
    assert!(d < 1.0 && d * (1.0 + e) > 1.0);
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fuplab.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "fup_set_cantor",
        "fup_check_porosity",
        "fup_norm_indices",
        "fup_last_error",
        "FUP_STATUS_OK",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler found; skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
