use std::ffi::{CStr, CString};
use std::ptr;

use rnd_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    rnd_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(rnd_last_error()).to_str().unwrap().to_owned()
}

const ONE_CLAUSE: &str = "p cnf 3 1\n1 2 3 0\n";

#[test]
fn gamma_one_clause_congestion() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(rnd_gen_gamma(c(ONE_CLAUSE).as_ptr(), c("1/2").as_ptr(), 1, &mut inst), RndStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(rnd_solve(inst, c("cong-dyn").as_ptr(), ptr::null(), &mut out), RndStatus::Ok);
        assert_eq!(take(out), r#"{"beta":"3/2"}"#);
        let opts = c(r#"{"alpha":"1"}"#);
        assert_eq!(rnd_solve(inst, c("cong-lagrange").as_ptr(), opts.as_ptr(), &mut out), RndStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["beta_tilde"], "3/2");
        assert_eq!(last_error(), "");
        rnd_instance_free(inst);
    }
}

#[test]
fn json_round_trip() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(rnd_gen_two_path(c(ONE_CLAUSE).as_ptr(), c("1/2").as_ptr(), &mut inst), RndStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(rnd_instance_to_json(inst, &mut json), RndStatus::Ok);
        let text = take(json);
        let mut back = ptr::null_mut();
        assert_eq!(rnd_instance_from_json(c(&text).as_ptr(), &mut back), RndStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(rnd_instance_to_json(back, &mut again), RndStatus::Ok);
        assert_eq!(take(again), text);
        let mut out = ptr::null_mut();
        assert_eq!(rnd_solve(back, c("cong-dyn").as_ptr(), ptr::null(), &mut out), RndStatus::Ok);
        assert_eq!(take(out), r#"{"beta":"4/3"}"#);
        rnd_instance_free(inst);
        rnd_instance_free(back);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(rnd_gen_gamma(c(ONE_CLAUSE).as_ptr(), c("0.5").as_ptr(), 1, &mut inst), RndStatus::Parse);
        assert!(inst.is_null());
        assert!(last_error().contains("0.5"));

        assert_eq!(rnd_gen_gamma(ptr::null(), c("1/2").as_ptr(), 1, &mut inst), RndStatus::NullPointer);
        assert_eq!(rnd_instance_from_json(c("{").as_ptr(), &mut inst), RndStatus::Json);
        assert_eq!(rnd_gen_gamma(c(ONE_CLAUSE).as_ptr(), c("1/2").as_ptr(), 1, ptr::null_mut()), RndStatus::NullPointer);

        assert_eq!(rnd_gen_gamma(c(ONE_CLAUSE).as_ptr(), c("1/2").as_ptr(), 1, &mut inst), RndStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(rnd_solve(inst, c("cong-fast").as_ptr(), ptr::null(), &mut out), RndStatus::Malformed);
        assert!(out.is_null());
        let opts = c(r#"{"alpha":"1","speed":3}"#);
        assert_eq!(rnd_solve(inst, c("cong-dyn").as_ptr(), opts.as_ptr(), &mut out), RndStatus::Json);
        let opts = c(r#"{"max_iters":0}"#);
        assert_eq!(rnd_solve(inst, c("cong-lagrange").as_ptr(), opts.as_ptr(), &mut out), RndStatus::Budget);
        rnd_instance_free(inst);
        rnd_instance_free(ptr::null_mut());
        rnd_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_instance_is_rejected() {
    let json = r#"{"graph":{"node_count":2,"edges":[{"s":0,"t":5,"capacity":"1"}]},
        "commodities":[{"source":0,"sink":1}],
        "polytope":{"demand_dim":1,"aux_dim":0,"rows":[]}}"#;
    unsafe {
        let mut inst = ptr::null_mut();
        let status = rnd_instance_from_json(c(json).as_ptr(), &mut inst);
        assert!(matches!(status, RndStatus::Malformed | RndStatus::Json), "{status:?}");
        assert!(inst.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rnd.h")).unwrap();
    for name in [
        "rnd_last_error",
        "rnd_instance_from_json",
        "rnd_instance_to_json",
        "rnd_gen_gamma",
        "rnd_gen_two_path",
        "rnd_solve",
        "rnd_instance_free",
        "rnd_string_free",
        "typedef struct RndInstance RndInstance",
        "RND_STATUS_BUDGET = 9",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
