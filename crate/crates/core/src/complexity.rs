//! Operation-count model for the demappers.
//!
//! Costs are expressed in candidate points (CP), real multiplications (RM),
//! real sums (RS, additions or subtractions), real comparisons (RC) and
//! real inversions (RI). The demappers run their inner loops through the
//! [`Arith`] shim: with [`Uncounted`] it compiles to plain arithmetic, with
//! [`OpCounters`] every executed operation is tallied.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCounters {
    pub cp: u64,
    pub rm: u64,
    pub rs: u64,
    pub rc: u64,
    pub ri: u64,
}

impl OpCounters {
    pub const fn new(cp: u64, rm: u64, rs: u64, rc: u64, ri: u64) -> Self {
        OpCounters { cp, rm, rs, rc, ri }
    }

    pub fn fields(&self) -> [(&'static str, u64); 5] {
        [
            ("cp", self.cp),
            ("rm", self.rm),
            ("rs", self.rs),
            ("rc", self.rc),
            ("ri", self.ri),
        ]
    }
}

impl Add for OpCounters {
    type Output = OpCounters;

    fn add(self, o: OpCounters) -> OpCounters {
        OpCounters {
            cp: self.cp + o.cp,
            rm: self.rm + o.rm,
            rs: self.rs + o.rs,
            rc: self.rc + o.rc,
            ri: self.ri + o.ri,
        }
    }
}

impl AddAssign for OpCounters {
    fn add_assign(&mut self, o: OpCounters) {
        *self = *self + o;
    }
}

impl Mul<u64> for OpCounters {
    type Output = OpCounters;

    fn mul(self, k: u64) -> OpCounters {
        OpCounters {
            cp: self.cp * k,
            rm: self.rm * k,
            rs: self.rs * k,
            rc: self.rc * k,
            ri: self.ri * k,
        }
    }
}

impl Sum for OpCounters {
    fn sum<I: Iterator<Item = OpCounters>>(iter: I) -> OpCounters {
        iter.fold(OpCounters::default(), Add::add)
    }
}

impl fmt::Display for OpCounters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CP={} RM={} RS={} RC={} RI={}",
            self.cp, self.rm, self.rs, self.rc, self.ri
        )
    }
}

/// Real arithmetic as seen by the cost model.
pub trait Arith {
    fn mul(&mut self, a: f64, b: f64) -> f64;
    fn add(&mut self, a: f64, b: f64) -> f64;
    fn sub(&mut self, a: f64, b: f64) -> f64;
    fn recip(&mut self, a: f64) -> f64;
    fn lt(&mut self, a: f64, b: f64) -> bool;
    fn ge(&mut self, a: f64, b: f64) -> bool;
    /// Marks one constellation point entering the candidate list.
    fn candidate(&mut self);
}

/// Arithmetic without bookkeeping.
#[derive(Debug, Clone, Copy, Default)]
pub struct Uncounted;

impl Arith for Uncounted {
    #[inline(always)]
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        a * b
    }
    #[inline(always)]
    fn add(&mut self, a: f64, b: f64) -> f64 {
        a + b
    }
    #[inline(always)]
    fn sub(&mut self, a: f64, b: f64) -> f64 {
        a - b
    }
    #[inline(always)]
    fn recip(&mut self, a: f64) -> f64 {
        a.recip()
    }
    #[inline(always)]
    fn lt(&mut self, a: f64, b: f64) -> bool {
        a < b
    }
    #[inline(always)]
    fn ge(&mut self, a: f64, b: f64) -> bool {
        a >= b
    }
    #[inline(always)]
    fn candidate(&mut self) {}
}

impl Arith for OpCounters {
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        self.rm += 1;
        a * b
    }
    fn add(&mut self, a: f64, b: f64) -> f64 {
        self.rs += 1;
        a + b
    }
    fn sub(&mut self, a: f64, b: f64) -> f64 {
        self.rs += 1;
        a - b
    }
    fn recip(&mut self, a: f64) -> f64 {
        self.ri += 1;
        a.recip()
    }
    fn lt(&mut self, a: f64, b: f64) -> bool {
        self.rc += 1;
        a < b
    }
    fn ge(&mut self, a: f64, b: f64) -> bool {
        self.rc += 1;
        a >= b
    }
    fn candidate(&mut self) {
        self.cp += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Sphere,
    MaxLogFull,
    SubRegion,
    Mmse,
    PdDem,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::MaxLogFull,
        Algorithm::SubRegion,
        Algorithm::Mmse,
        Algorithm::PdDem,
        Algorithm::Sphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sphere => "sphere",
            Algorithm::MaxLogFull => "maxlog",
            Algorithm::SubRegion => "subregion",
            Algorithm::Mmse => "mmse",
            Algorithm::PdDem => "pd-dem",
        }
    }

    /// Published 256-QAM cost of the algorithm.
    pub fn published_256(self) -> OpCounters {
        match self {
            Algorithm::MaxLogFull => OpCounters::new(256, 1032, 776, 2048, 0),
            Algorithm::SubRegion => OpCounters::new(81, 332, 251, 648, 0),
            Algorithm::Mmse => OpCounters::new(16, 64, 48, 128, 6),
            Algorithm::PdDem => OpCounters::new(80, 390, 279, 231, 0),
            Algorithm::Sphere => OpCounters::new(32, 138, 138, 275, 2),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-symbol cost of `algorithm` at order `m`.
///
/// The sphere demapper and the exhaustive max-log search have closed forms
/// for every square order. The other algorithms are only known through
/// their published 256-QAM figures.
pub fn analytic_cost(m: u32, algorithm: Algorithm) -> Result<OpCounters> {
    if !crate::constellation::SUPPORTED_ORDERS.contains(&m) {
        return Err(Error::invalid(format!("unsupported modulation order {m}")));
    }
    let m64 = u64::from(m);
    let bits = u64::from(m.trailing_zeros());
    let side = 1u64 << (bits / 2);
    match algorithm {
        Algorithm::Sphere => Ok(OpCounters {
            cp: 2 * side,
            rm: 8 * side + 2 + bits,
            rs: 8 * side + 2 + bits,
            rc: 5 + (2 * side - 2) * (1 + bits),
            ri: 2,
        }),
        // 4 RM + 3 RS per distance, one running-minimum comparison per
        // point and bit, one RS + RM per output LLR.
        Algorithm::MaxLogFull => Ok(OpCounters {
            cp: m64,
            rm: 4 * m64 + bits,
            rs: 3 * m64 + bits,
            rc: m64 * bits,
            ri: 0,
        }),
        other if m == 256 => Ok(other.published_256()),
        other => Err(Error::invalid(format!(
            "{other} cost is only known for M=256, not M={m}"
        ))),
    }
}

/// Percentage saving of one counter field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldReduction {
    pub field: &'static str,
    /// `100 (1 - a/b)`.
    pub percent: f64,
}

impl FieldReduction {
    pub fn nearest(&self) -> i64 {
        self.percent.round() as i64
    }

    pub fn truncated(&self) -> i64 {
        self.percent.trunc() as i64
    }
}

/// Savings of `a` relative to `b`, field by field. Fields where `b` is
/// zero are omitted.
pub fn reduction_report(a: &OpCounters, b: &OpCounters) -> Vec<FieldReduction> {
    a.fields()
        .into_iter()
        .zip(b.fields())
        .filter(|(_, (_, base))| *base > 0)
        .map(|((field, x), (_, base))| FieldReduction {
            field,
            percent: 100.0 * (1.0 - x as f64 / base as f64),
        })
        .collect()
}
