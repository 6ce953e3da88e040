use super::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Min-sum decoder settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub max_iters: u32,
    /// Stop as soon as the hard decisions satisfy every check.
    pub early_stop: bool,
    /// Scale applied to check-to-variable magnitudes. `1.0` is plain min-sum.
    pub normalization: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_iters: 25,
            early_stop: true,
            normalization: 1.0,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.normalization > 0.0 && self.normalization <= 1.0) {
            return Err(Error::invalid("normalization must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    /// Hard decisions (bit 1 iff posterior < 0).
    pub bits: Vec<u8>,
    /// True when every check is satisfied and no posterior is exactly zero.
    pub converged: bool,
    pub iterations: u32,
}

/// Flooding min-sum decoder. Input LLRs use the `> 0 means bit 0`
/// convention.
#[derive(Debug, Clone)]
pub struct MinSumDecoder<'a> {
    h: &'a ParityCheckMatrix,
    // edge -> variable, grouped by check
    edge_var: Vec<usize>,
    check_start: Vec<usize>,
    // variable -> its edges
    var_edges: Vec<Vec<usize>>,
}

impl<'a> MinSumDecoder<'a> {
    pub fn new(h: &'a ParityCheckMatrix) -> Self {
        let mut edge_var = Vec::with_capacity(h.edges());
        let mut check_start = Vec::with_capacity(h.m() + 1);
        let mut var_edges = vec![Vec::new(); h.n()];
        for c in 0..h.m() {
            check_start.push(edge_var.len());
            for &v in h.check(c) {
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
        }
        check_start.push(edge_var.len());
        MinSumDecoder {
            h,
            edge_var,
            check_start,
            var_edges,
        }
    }

    pub fn decode(&self, llr: &[f64], config: &DecoderConfig) -> Result<DecodeOutput> {
        config.validate()?;
        let n = self.h.n();
        if llr.len() != n {
            return Err(Error::invalid(format!(
                "expected {n} LLRs, got {}",
                llr.len()
            )));
        }
        if llr.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid("LLR input contains NaN"));
        }

        let mut v2c: Vec<f64> = self.edge_var.iter().map(|&v| llr[v]).collect();
        let mut c2v = vec![0.0; v2c.len()];
        let mut post = llr.to_vec();
        let mut bits = vec![0u8; n];

        let mut iterations = 0;
        loop {
            let decided = harden(&post, &mut bits);
            let ok = decided && self.h.syndrome_weight(&bits) == 0;
            if ok && (config.early_stop || iterations == config.max_iters) {
                return Ok(DecodeOutput { bits, converged: true, iterations });
            }
            if iterations == config.max_iters {
                return Ok(DecodeOutput { bits, converged: false, iterations });
            }
            iterations += 1;

            for c in 0..self.h.m() {
                let edges = self.check_start[c]..self.check_start[c + 1];
                let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, usize::MAX);
                let mut negative = false;
                for e in edges.clone() {
                    let mag = v2c[e].abs();
                    negative ^= v2c[e] < 0.0;
                    if mag < min1 {
                        min2 = min1;
                        min1 = mag;
                        arg = e;
                    } else if mag < min2 {
                        min2 = mag;
                    }
                }
                for e in edges {
                    let mag = if e == arg { min2 } else { min1 } * config.normalization;
                    let neg = negative ^ (v2c[e] < 0.0);
                    c2v[e] = if neg { -mag } else { mag };
                }
            }

            for (v, edges) in self.var_edges.iter().enumerate() {
                let total = llr[v] + edges.iter().map(|&e| c2v[e]).sum::<f64>();
                post[v] = total;
                for &e in edges {
                    v2c[e] = total - c2v[e];
                }
            }
        }
    }
}

fn harden(post: &[f64], bits: &mut [u8]) -> bool {
    let mut decided = true;
    for (b, &p) in bits.iter_mut().zip(post) {
        *b = u8::from(p < 0.0);
        decided &= p != 0.0;
    }
    decided
}

/// One-shot convenience wrapper around [`MinSumDecoder`].
pub fn minsum_decode(
    h: &ParityCheckMatrix,
    llr: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeOutput> {
    MinSumDecoder::new(h).decode(llr, config)
}
