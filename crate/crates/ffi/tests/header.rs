use std::path::PathBuf;
use std::process::Command;

fn header() -> (PathBuf, String) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/ssd_lab.h");
    let text = std::fs::read_to_string(&path).expect("header is generated by build.rs");
    (path, text)
}

#[test]
fn header_declares_the_api() {
    let (_, text) = header();
    for sym in [
        "typedef struct SsdConstellation SsdConstellation;",
        "typedef struct SsdLdpc SsdLdpc;",
        "SSD_STATUS_OK = 0",
        "SSD_STATUS_INTERNAL = 9",
        "ssd_last_error(void)",
        "ssd_status_name(",
        "ssd_constellation_new(",
        "ssd_constellation_proposed(",
        "ssd_constellation_dvbt2(",
        "ssd_constellation_free(",
        "ssd_constellation_bits(",
        "ssd_map_label(",
        "ssd_demap(",
        "ssd_analytic_cost(",
        "ssd_ldpc_parse_alist(",
        "ssd_ldpc_shape(",
        "ssd_ldpc_encode(",
        "ssd_ldpc_decode(",
        "ssd_ldpc_free(",
    ] {
        assert!(text.contains(sym), "missing {sym}");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let (path, _) = header();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&path)
            .output()
        else {
            eprintln!("{compiler} not available, skipping");
            continue;
        };
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
