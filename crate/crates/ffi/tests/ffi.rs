use std::ffi::{c_char, CStr, CString};
use std::ptr;

use robsat_ffi::*;

const PATH: &str = r#"{"version":1,"n":1,"norm":"linf","alpha":"1/2",
  "vertices":[{"id":1,"f":["-1"]},{"id":2,"f":["0"]},{"id":3,"f":["1"]}],
  "simplices":[[1,2],[2,3]]}"#;

fn load(json: &str) -> *mut RobsatInstance {
    let text = CString::new(json).unwrap();
    let mut inst = ptr::null_mut();
    let status = unsafe { robsat_instance_from_json(text.as_ptr(), &mut inst) };
    assert_eq!(status, RobsatStatus::Ok);
    assert!(!inst.is_null());
    inst
}

fn take_string(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { robsat_string_free(p) };
    s
}

fn last_error() -> String {
    let p = robsat_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn decide_and_robustness() {
    let inst = load(PATH);
    let mut n = 0usize;
    assert_eq!(unsafe { robsat_instance_num_vertices(inst, &mut n) }, RobsatStatus::Ok);
    assert_eq!(n, 3);

    let mut verdict = RobsatVerdict::Unknown;
    assert_eq!(unsafe { robsat_decide(inst, ptr::null(), true, &mut verdict) }, RobsatStatus::Ok);
    assert_eq!(verdict, RobsatVerdict::RobustYes);

    let alpha = CString::new("3/2").unwrap();
    assert_eq!(unsafe { robsat_decide(inst, alpha.as_ptr(), true, &mut verdict) }, RobsatStatus::Ok);
    assert_eq!(verdict, RobsatVerdict::RobustNo);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { robsat_robustness_json(inst, true, &mut out) }, RobsatStatus::Ok);
    let doc: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(doc["kind"], "value");
    assert_eq!(doc["value"], "1");

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { robsat_critical_values_json(inst, &mut out) }, RobsatStatus::Ok);
    let values: Vec<String> = serde_json::from_str(&take_string(out)).unwrap();
    assert!(values.contains(&"1".to_owned()));

    unsafe { robsat_instance_free(inst) };
}

#[test]
fn norm_override() {
    let inst = load(PATH);
    let l2 = CString::new("l2").unwrap();
    assert_eq!(unsafe { robsat_instance_set_norm(inst, l2.as_ptr()) }, RobsatStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { robsat_robustness_json(inst, true, &mut out) }, RobsatStatus::Ok);
    assert!(take_string(out).contains("value"));

    let bogus = CString::new("l7").unwrap();
    assert_ne!(unsafe { robsat_instance_set_norm(inst, bogus.as_ptr()) }, RobsatStatus::Ok);
    assert!(!last_error().is_empty());
    unsafe { robsat_instance_free(inst) };
}

#[test]
fn errors_are_reported() {
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { robsat_instance_from_json(ptr::null(), &mut inst) }, RobsatStatus::NullPointer);
    let bad = CString::new("{\"version\": 1").unwrap();
    assert_eq!(unsafe { robsat_instance_from_json(bad.as_ptr(), &mut inst) }, RobsatStatus::ParseError);
    assert!(inst.is_null());
    assert!(!last_error().is_empty());

    let mut verdict = RobsatVerdict::Unknown;
    assert_eq!(unsafe { robsat_decide(ptr::null(), ptr::null(), true, &mut verdict) }, RobsatStatus::NullPointer);

    let inst = load(PATH);
    let zero = CString::new("0").unwrap();
    assert_eq!(unsafe { robsat_decide(inst, zero.as_ptr(), true, &mut verdict) }, RobsatStatus::InvalidArgument);
    assert!(last_error().contains("positive"));
    assert_eq!(unsafe { robsat_decide(inst, ptr::null(), true, ptr::null_mut()) }, RobsatStatus::NullPointer);
    unsafe {
        robsat_instance_free(inst);
        robsat_instance_free(ptr::null_mut());
        robsat_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(robsat_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/robsat.h")).unwrap();
    for name in [
        "robsat_instance_from_json",
        "robsat_instance_free",
        "robsat_decide",
        "robsat_robustness_json",
        "robsat_critical_values_json",
        "robsat_string_free",
        "robsat_last_error",
        "ROBSAT_STATUS_OK",
        "ROBSAT_VERDICT_ROBUST_YES",
        "typedef struct RobsatInstance RobsatInstance",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/robsat.h");
    // skipped where no C compiler is installed
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c", header]).output() else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
