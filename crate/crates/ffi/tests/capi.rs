use std::ffi::{CStr, CString};
use std::ptr;

use ssd_lab_ffi::*;

fn proposed(m: u32) -> *mut SsdConstellation {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ssd_constellation_proposed(m, &mut h) }, SsdStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ssd_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn map_then_demap_round_trips() {
    let c = proposed(64);
    assert_eq!(unsafe { ssd_constellation_bits(c) }, 6);
    for label in [0u32, 17, 63] {
        let mut p = SsdPoint::default();
        assert_eq!(unsafe { ssd_map_label(c, label, &mut p) }, SsdStatus::Ok);
        let obs = SsdObservation {
            y_i: 0.9 * p.z_i,
            y_q: 0.6 * p.z_q,
            h_i: 0.9,
            h_q: 0.6,
            sigma2: 1e-3,
        };
        for kind in [SsdDemapper::Exact, SsdDemapper::MaxLog, SsdDemapper::Sphere, SsdDemapper::Mmse] {
            let mut llr = [0.0; 6];
            let st = unsafe { ssd_demap(c, kind, &obs, llr.as_mut_ptr(), llr.len(), ptr::null_mut()) };
            assert_eq!(st, SsdStatus::Ok);
            let got = llr
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, v)| acc | (u32::from(*v < 0.0) << i));
            assert_eq!(got, label, "{kind:?}");
        }
    }
    unsafe { ssd_constellation_free(c) };
}

#[test]
fn counters_accumulate_table_values() {
    let c = proposed(256);
    let mut p = SsdPoint::default();
    unsafe { ssd_map_label(c, 99, &mut p) };
    let obs = SsdObservation {
        y_i: 0.7 * p.z_i + 0.01,
        y_q: 1.1 * p.z_q - 0.02,
        h_i: 0.7,
        h_q: 1.1,
        sigma2: 0.01,
    };
    let mut counts = SsdOpCounts::default();
    let mut llr = [0.0; 8];
    for _ in 0..2 {
        let st = unsafe { ssd_demap(c, SsdDemapper::Sphere, &obs, llr.as_mut_ptr(), 8, &mut counts) };
        assert_eq!(st, SsdStatus::Ok);
    }
    assert_eq!(counts, SsdOpCounts { cp: 64, rm: 276, rs: 276, rc: 550, ri: 4 });

    let mut table = SsdOpCounts::default();
    assert_eq!(unsafe { ssd_analytic_cost(256, SsdAlgorithm::MaxLog, &mut table) }, SsdStatus::Ok);
    assert_eq!(table, SsdOpCounts { cp: 256, rm: 1032, rs: 776, rc: 2048, ri: 0 });
    assert_eq!(unsafe { ssd_analytic_cost(16, SsdAlgorithm::PdDem, &mut table) }, SsdStatus::InvalidArgument);
    unsafe { ssd_constellation_free(c) };
}

#[test]
fn errors_are_reported_not_panicked() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ssd_constellation_proposed(32, &mut h) }, SsdStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { ssd_constellation_proposed(16, ptr::null_mut()) }, SsdStatus::NullPointer);

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { ssd_constellation_dvbt2(16, &mut c) }, SsdStatus::Ok);
    let obs = SsdObservation { y_i: 0.1, y_q: 0.1, h_i: 1.0, h_q: 1.0, sigma2: 0.1 };
    let mut llr = [0.0; 4];
    let st = unsafe { ssd_demap(c, SsdDemapper::Sphere, &obs, llr.as_mut_ptr(), 4, ptr::null_mut()) };
    assert_eq!(st, SsdStatus::UnsupportedAngle);
    let st = unsafe { ssd_demap(c, SsdDemapper::MaxLog, &obs, llr.as_mut_ptr(), 3, ptr::null_mut()) };
    assert_eq!(st, SsdStatus::InvalidArgument);
    assert!(last_error().contains("llr"));
    unsafe { ssd_constellation_free(c) };
    unsafe { ssd_constellation_free(ptr::null_mut()) };

    let name = unsafe { CStr::from_ptr(ssd_status_name(SsdStatus::ParseError)) };
    assert_eq!(name.to_str().unwrap(), "parse error");
}

const STAIRCASE: &str = "6 3\n2 4\n2 2 2 2 2 1\n3 4 4\n1 2\n2 3\n1 3\n1 2\n2 3\n3\n1 3 4\n1 2 4 5\n2 3 5 6\n";

#[test]
fn ldpc_encode_decode() {
    let text = CString::new(STAIRCASE).unwrap();
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { ssd_ldpc_parse_alist(text.as_ptr(), &mut l) }, SsdStatus::Ok, "{}", last_error());
    let (mut n, mut m) = (0usize, 0usize);
    assert_eq!(unsafe { ssd_ldpc_shape(l, &mut n, &mut m) }, SsdStatus::Ok);
    assert_eq!((n, m), (6, 3));

    let info = [1u8, 0, 1];
    let mut cw = [0u8; 6];
    assert_eq!(unsafe { ssd_ldpc_encode(l, info.as_ptr(), 3, cw.as_mut_ptr(), 6) }, SsdStatus::Ok);
    assert_eq!(&cw[..3], &info);

    let llr: Vec<f64> = cw.iter().map(|&b| if b == 0 { 5.0 } else { -5.0 }).collect();
    let mut bits = [9u8; 6];
    let (mut conv, mut iters) = (false, 99u32);
    let st = unsafe { ssd_ldpc_decode(l, llr.as_ptr(), 6, 25, bits.as_mut_ptr(), 6, &mut conv, &mut iters) };
    assert_eq!(st, SsdStatus::Ok);
    assert!(conv);
    assert_eq!(iters, 0);
    assert_eq!(bits, cw);

    let st = unsafe { ssd_ldpc_decode(l, llr.as_ptr(), 5, 25, bits.as_mut_ptr(), 6, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, SsdStatus::InvalidArgument);
    unsafe { ssd_ldpc_free(l) };
}

#[test]
fn ldpc_parse_errors() {
    let bad = CString::new("3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 0\n").unwrap();
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { ssd_ldpc_parse_alist(bad.as_ptr(), &mut l) }, SsdStatus::ParseError);
    assert!(last_error().contains("line 9"), "{}", last_error());
    assert!(l.is_null());
    assert_eq!(unsafe { ssd_ldpc_parse_alist(ptr::null(), &mut l) }, SsdStatus::NullPointer);

    // check 1 uses parity column 4 before its own row: encoding is refused,
    // decoding still works
    let tangled = CString::new("4 2\n2 3\n1 1 1 2\n3 2\n1\n2\n1\n1 2\n1 3 4\n2 4\n").unwrap();
    assert_eq!(unsafe { ssd_ldpc_parse_alist(tangled.as_ptr(), &mut l) }, SsdStatus::Ok, "{}", last_error());
    let mut cw = [0u8; 4];
    let info = [1u8, 1];
    let st = unsafe { ssd_ldpc_encode(l, info.as_ptr(), 2, cw.as_mut_ptr(), 4) };
    assert_eq!(st, SsdStatus::UnsupportedMatrix);
    let llr = [3.0, 2.0, 4.0, 1.0];
    let mut bits = [1u8; 4];
    let st = unsafe { ssd_ldpc_decode(l, llr.as_ptr(), 4, 10, bits.as_mut_ptr(), 4, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, SsdStatus::Ok);
    assert_eq!(bits, [0; 4]);
    unsafe { ssd_ldpc_free(l) };
}
