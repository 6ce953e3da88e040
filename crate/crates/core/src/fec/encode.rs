use super::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Systematic encoder for matrices whose last `m` columns are lower
/// triangular with a unit diagonal (check `j` has its last variable at
/// column `n - m + j`). Staircase codes have this shape.
#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    k: usize,
    // per check: info columns and earlier parity columns
    rows: Vec<Vec<usize>>,
}

impl Encoder {
    pub fn new(h: &ParityCheckMatrix) -> Result<Self> {
        let (n, m) = (h.n(), h.m());
        let k = n - m;
        let mut rows = Vec::with_capacity(m);
        for j in 0..m {
            let diag = k + j;
            let row = h.check(j);
            if !row.contains(&diag) {
                return Err(Error::UnsupportedMatrix(format!(
                    "check {j} lacks diagonal parity column {diag}"
                )));
            }
            if let Some(&bad) = row.iter().find(|&&v| v > diag) {
                return Err(Error::UnsupportedMatrix(format!(
                    "check {j} uses later parity column {bad}"
                )));
            }
            rows.push(row.iter().copied().filter(|&v| v != diag).collect());
        }
        Ok(Encoder { n, k, rows })
    }

    /// Number of information bits.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Codeword `[info | parity]` with `H c = 0`.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k {
            return Err(Error::invalid(format!(
                "expected {} information bits, got {}",
                self.k,
                info.len()
            )));
        }
        let mut cw = Vec::with_capacity(self.n);
        cw.extend_from_slice(info);
        for row in &self.rows {
            let p = row.iter().fold(0u8, |acc, &v| acc ^ cw[v]);
            cw.push(p);
        }
        Ok(cw)
    }
}
