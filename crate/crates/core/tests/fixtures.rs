//! The shipped LDPC fixtures are reproducible from `staircase` and parse
//! back to consistent matrices. Set `SSD_LAB_BLESS=1` to rewrite them.

use std::path::PathBuf;

use ssd_lab::fec::{Encoder, ParityCheckMatrix};

const FIXTURES: [(&str, usize, usize, usize, u64); 2] = [
    ("staircase_1008_504.alist", 1008, 504, 3, 2024),
    ("staircase_960_192.alist", 960, 192, 3, 2025),
];

fn path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

#[test]
fn fixtures_match_their_construction() {
    for (name, n, m, w, seed) in FIXTURES {
        let built = ParityCheckMatrix::staircase(n, m, w, seed).unwrap();
        if std::env::var_os("SSD_LAB_BLESS").is_some() {
            std::fs::write(path(name), built.to_alist()).unwrap();
        }
        let text = std::fs::read_to_string(path(name)).unwrap();
        assert_eq!(text, built.to_alist(), "{name}");
    }
}

#[test]
fn fixture_headers_are_self_consistent() {
    for (name, n, m, _, _) in FIXTURES {
        let text = std::fs::read_to_string(path(name)).unwrap();
        let h = ParityCheckMatrix::parse_alist(&text).unwrap();
        assert_eq!((h.n(), h.m()), (n, m));

        let rows: Vec<Vec<usize>> = text
            .lines()
            .take(4)
            .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
            .collect();
        let var_deg: Vec<usize> = (0..n).map(|v| h.var(v).len()).collect();
        let chk_deg: Vec<usize> = (0..m).map(|c| h.check(c).len()).collect();
        assert_eq!(rows[2], var_deg);
        assert_eq!(rows[3], chk_deg);
        assert_eq!(rows[1], vec![*var_deg.iter().max().unwrap(), *chk_deg.iter().max().unwrap()]);
        assert_eq!(var_deg.iter().sum::<usize>(), chk_deg.iter().sum::<usize>());

        // degree histogram: information columns share one degree, the
        // staircase columns have degree 2 apart from the last one
        let k = n - m;
        assert!(var_deg[..k].iter().all(|&d| d == var_deg[0]));
        assert!(var_deg[k..n - 1].iter().all(|&d| d == 2));
        assert_eq!(var_deg[n - 1], 1);

        assert!(Encoder::new(&h).is_ok());
    }
}
