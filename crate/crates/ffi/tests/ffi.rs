use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use wapgraph_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn graph(g6: &str) -> *mut WgGraph {
    let mut g = ptr::null_mut();
    assert_eq!(wg_graph_from_graph6(cstr(g6).as_ptr(), &mut g), WgStatus::Ok);
    g
}

unsafe fn class(spec: &str) -> *mut WgClass {
    let mut k = ptr::null_mut();
    assert_eq!(wg_class_parse(cstr(spec).as_ptr(), &mut k), WgStatus::Ok);
    k
}

unsafe fn edges(n: usize, es: &[(usize, usize)]) -> *mut WgGraph {
    let mut g = ptr::null_mut();
    assert_eq!(wg_graph_new(n, &mut g), WgStatus::Ok);
    for &(u, v) in es {
        assert_eq!(wg_graph_add_edge(g, u, v), WgStatus::Ok);
    }
    g
}

#[test]
fn graph_round_trip_and_membership() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(wg_graph_new(5, &mut g), WgStatus::Ok);
        for i in 0..5 {
            assert_eq!(wg_graph_add_edge(g, i, (i + 1) % 5), WgStatus::Ok);
        }
        let mut s = ptr::null_mut();
        assert_eq!(wg_graph_to_graph6(g, &mut s), WgStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_string();
        wg_string_free(s);
        let h = graph(&text);
        let (mut n, mut e) = (0usize, false);
        assert_eq!(wg_graph_order(h, &mut n), WgStatus::Ok);
        assert_eq!(wg_graph_has_edge(h, 4, 0, &mut e), WgStatus::Ok);
        assert_eq!((n, e), (5, true));

        let k = class("c4free");
        let mut m = false;
        assert_eq!(wg_class_member(k, h, &mut m), WgStatus::Ok);
        assert!(m);
        wg_class_free(k);
        wg_graph_free(g);
        wg_graph_free(h);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(wg_class_parse(cstr("nope").as_ptr(), &mut k), WgStatus::UnknownClass);
        assert!(k.is_null());
        assert!(CStr::from_ptr(wg_last_error()).to_str().unwrap().contains("nope"));
        let mut g = ptr::null_mut();
        assert_eq!(wg_graph_from_graph6(cstr("~~~~").as_ptr(), &mut g), WgStatus::Graph6);
        assert_eq!(wg_graph_new(65, &mut g), WgStatus::OrderBound);
        assert_eq!(wg_graph_from_graph6(ptr::null(), &mut g), WgStatus::NullPointer);
        assert_eq!(wg_graph_order(ptr::null(), &mut 0), WgStatus::NullPointer);
        let h = graph("A_");
        assert_eq!(wg_graph_add_edge(h, 0, 2), WgStatus::InvalidArgument);
        assert_eq!(wg_graph_add_edge(h, 1, 1), WgStatus::InvalidArgument);
        let mut m = false;
        assert_eq!(wg_graph_has_edge(h, 0, 1, &mut m), WgStatus::Ok);
        assert!(m);
        assert_eq!(CStr::from_ptr(wg_last_error()).to_bytes(), b"");
        wg_graph_free(h);
        assert!(!CStr::from_ptr(wg_version()).to_bytes().is_empty());
    }
}

#[test]
fn amalgams_witnesses_and_gadgets() {
    unsafe {
        let k = class("linear-forests");
        let base = edges(2, &[]);
        let left = edges(3, &[(0, 2), (1, 2)]);
        let right = edges(4, &[(0, 2), (2, 3), (3, 1)]);
        let mut am = ptr::null_mut();
        assert_eq!(wg_find_amalgam(k, base, left, right, true, &mut am), WgStatus::Ok);
        assert!(am.is_null());
        assert_eq!(wg_find_amalgam(k, base, left, left, true, &mut am), WgStatus::Ok);
        assert!(!am.is_null());
        wg_graph_free(am);
        for g in [base, left, right] {
            wg_graph_free(g);
        }
        wg_class_free(k);

        let one = graph("@");
        let mut w = ptr::null_mut();
        assert_eq!(wg_windmill_witness(one, &mut w), WgStatus::Ok);
        let mut n = 0;
        wg_graph_order(w, &mut n);
        assert_eq!(n, 7);
        wg_graph_free(w);
        wg_graph_free(one);

        let c5 = graph("Dhc");
        let mut json = ptr::null_mut();
        assert_eq!(wg_c4_gadget_json(c5, &mut json), WgStatus::Ok);
        let mut ok = false;
        assert_eq!(wg_replay_json(json, &mut ok), WgStatus::Ok);
        assert!(ok);
        wg_string_free(json);
        let mut json = ptr::null_mut();
        let k4 = graph("C~");
        assert_eq!(wg_c4_gadget_json(k4, &mut json), WgStatus::Precondition);
        wg_graph_free(k4);
        wg_graph_free(c5);
        assert_eq!(wg_replay_json(cstr("{\"schema_version\": 9}").as_ptr(), &mut ok), WgStatus::SchemaVersion);
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/wapgraph.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["typedef struct WgGraph WgGraph", "WG_STATUS_OK", "wg_find_amalgam", "wg_replay_json", "wg_last_error"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).status() else {
        eprintln!("no C compiler; skipping the syntax check");
        return;
    };
    assert!(status.success());
}
