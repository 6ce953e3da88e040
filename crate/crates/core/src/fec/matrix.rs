//! Sparse parity-check matrices and the alist text format.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Binary parity-check matrix stored as adjacency lists (0-indexed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    checks: Vec<Vec<usize>>,
    vars: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Builds a matrix with `n` variables from the variable list of each
    /// check.
    pub fn from_checks(n: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        let mut vars = vec![Vec::new(); n];
        for (c, row) in checks.iter().enumerate() {
            for &v in row {
                if v >= n {
                    return Err(Error::invalid(format!("check {c} references variable {v} >= n = {n}")));
                }
                if vars[v].last() == Some(&c) {
                    return Err(Error::invalid(format!("duplicate edge ({c}, {v})")));
                }
                vars[v].push(c);
            }
        }
        if let Some(v) = vars.iter().position(Vec::is_empty) {
            return Err(Error::invalid(format!("variable {v} is not in any check")));
        }
        Ok(ParityCheckMatrix { n, checks, vars })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.checks.len()
    }

    /// Design rate `(n - m) / n`.
    pub fn rate(&self) -> f64 {
        (self.n - self.m()) as f64 / self.n as f64
    }

    pub fn check(&self, c: usize) -> &[usize] {
        &self.checks[c]
    }

    pub fn var(&self, v: usize) -> &[usize] {
        &self.vars[v]
    }

    pub fn edges(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    /// Number of unsatisfied checks for hard decisions `bits`.
    pub fn syndrome_weight(&self, bits: &[u8]) -> usize {
        self.checks
            .iter()
            .filter(|row| row.iter().fold(0u8, |acc, &v| acc ^ bits[v]) != 0)
            .count()
    }

    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        bits.len() == self.n && self.syndrome_weight(bits) == 0
    }

    /// Parses the alist format: `n m`, `dv_max dc_max`, the `n` variable
    /// degrees, the `m` check degrees, then `n` variable and `m` check
    /// adjacency lines with 1-based indices.
    pub fn parse_alist(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, line) = lines.next().ok_or_else(|| Error::Parse {
                line: text.lines().count() + 1,
                msg: format!("unexpected end of file, expected {what}"),
            })?;
            let nums = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Error::Parse {
                        line: no,
                        msg: format!("'{tok}' is not a non-negative integer"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((no, nums))
        };
        let expect_len = |no: usize, nums: &[usize], len: usize, what: &str| {
            if nums.len() == len {
                Ok(())
            } else {
                Err(Error::Parse {
                    line: no,
                    msg: format!("expected {len} values for {what}, found {}", nums.len()),
                })
            }
        };

        let (no, header) = next("'n m'")?;
        expect_len(no, &header, 2, "the header")?;
        let (n, m) = (header[0], header[1]);
        if n == 0 || m == 0 {
            return Err(Error::Parse { line: no, msg: "n and m must be positive".into() });
        }
        let (no_max, maxes) = next("'dv_max dc_max'")?;
        expect_len(no_max, &maxes, 2, "the maximum degrees")?;
        let (no, var_deg) = next("variable degrees")?;
        expect_len(no, &var_deg, n, "variable degrees")?;
        let (no, chk_deg) = next("check degrees")?;
        expect_len(no, &chk_deg, m, "check degrees")?;
        for (degs, max, what) in [(&var_deg, maxes[0], "dv_max"), (&chk_deg, maxes[1], "dc_max")] {
            if degs.iter().copied().max() != Some(max) {
                return Err(Error::Parse {
                    line: no_max,
                    msg: format!("{what} = {max} does not match the listed degrees"),
                });
            }
        }

        let mut read_lists = |count: usize, degs: &[usize], bound: usize, what: &str| {
            (0..count)
                .map(|k| {
                    let (no, row) = next(what)?;
                    expect_len(no, &row, degs[k], what)?;
                    row.into_iter()
                        .map(|idx| {
                            if idx == 0 || idx > bound {
                                Err(Error::Parse {
                                    line: no,
                                    msg: format!("index {idx} outside 1..={bound} (alist is 1-indexed)"),
                                })
                            } else {
                                Ok(idx - 1)
                            }
                        })
                        .collect::<Result<Vec<_>>>()
                        .map(|r| (no, r))
                })
                .collect::<Result<Vec<_>>>()
        };
        let var_lists = read_lists(n, &var_deg, m, "variable adjacency")?;
        let chk_lists = read_lists(m, &chk_deg, n, "check adjacency")?;

        let checks: Vec<Vec<usize>> = chk_lists.iter().map(|(_, r)| r.clone()).collect();
        for (no, row) in &chk_lists {
            let mut sorted = row.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parse { line: *no, msg: "duplicate variable in check".into() });
            }
        }
        let matrix = ParityCheckMatrix::from_checks(n, checks).map_err(|e| Error::Parse {
            line: chk_lists.last().map_or(0, |(no, _)| *no),
            msg: e.to_string(),
        })?;
        for (v, (no, row)) in var_lists.iter().enumerate() {
            let mut listed = row.clone();
            listed.sort_unstable();
            let mut actual = matrix.vars[v].clone();
            actual.sort_unstable();
            if listed != actual {
                return Err(Error::Parse {
                    line: *no,
                    msg: format!("variable {} adjacency disagrees with the check lists", v + 1),
                });
            }
        }
        Ok(matrix)
    }

    /// Serialises to the alist format read by [`ParityCheckMatrix::parse_alist`].
    pub fn to_alist(&self) -> String {
        let join = |xs: &mut dyn Iterator<Item = usize>| {
            xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let mut out = String::new();
        let dv = self.vars.iter().map(Vec::len).max().unwrap_or(0);
        let dc = self.checks.iter().map(Vec::len).max().unwrap_or(0);
        let _ = writeln!(out, "{} {}", self.n, self.m());
        let _ = writeln!(out, "{dv} {dc}");
        let _ = writeln!(out, "{}", join(&mut self.vars.iter().map(Vec::len)));
        let _ = writeln!(out, "{}", join(&mut self.checks.iter().map(Vec::len)));
        for row in self.vars.iter().chain(&self.checks) {
            let _ = writeln!(out, "{}", join(&mut row.iter().map(|x| x + 1)));
        }
        out
    }

    /// Random staircase (IRA-like) code.
    ///
    /// Info column `j < n - m` joins `info_weight` checks picked to keep
    /// check degrees balanced and avoid length-4 cycles where possible.
    /// Parity column `n - m + j` joins checks `j` and `j + 1` (the last only
    /// check `m - 1`), so the code is encodable by back-substitution.
    pub fn staircase(n: usize, m: usize, info_weight: usize, seed: u64) -> Result<Self> {
        if m == 0 || m >= n || info_weight == 0 || info_weight > m {
            return Err(Error::invalid(format!(
                "cannot build a staircase code with n={n}, m={m}, weight={info_weight}"
            )));
        }
        let k = n - m;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut checks: Vec<Vec<usize>> = vec![Vec::new(); m];
        // pairs of checks already sharing a variable
        let mut shared = std::collections::HashSet::new();
        for j in 0..m - 1 {
            shared.insert((j, j + 1));
        }
        let mut order: Vec<usize> = (0..m).collect();
        for v in 0..k {
            order.shuffle(&mut rng);
            order.sort_by_key(|&c| checks[c].len());
            let mut picked: Vec<usize> = Vec::with_capacity(info_weight);
            for &c in &order {
                if picked.len() == info_weight {
                    break;
                }
                if picked.iter().all(|&p| !shared.contains(&(p.min(c), p.max(c)))) {
                    picked.push(c);
                }
            }
            // fall back to the least loaded checks if cycle avoidance stalls
            for &c in &order {
                if picked.len() == info_weight {
                    break;
                }
                if !picked.contains(&c) {
                    picked.push(c);
                }
            }
            for (a, &p) in picked.iter().enumerate() {
                for &q in &picked[a + 1..] {
                    shared.insert((p.min(q), p.max(q)));
                }
                checks[p].push(v);
            }
        }
        for (j, row) in checks.iter_mut().enumerate() {
            if j > 0 {
                row.push(k + j - 1);
            }
            row.push(k + j);
        }
        for row in &mut checks {
            row.sort_unstable();
        }
        ParityCheckMatrix::from_checks(n, checks)
    }
}
