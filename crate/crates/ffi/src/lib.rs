//! C ABI over `ssd-lab`.
//!
//! Objects are opaque handles created by `*_new`/`*_parse` functions and
//! released with the matching `*_free`. Every fallible call returns an
//! [`SsdStatus`]; a human-readable message for the last failure on the
//! calling thread is available from [`ssd_last_error`]. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use ssd_lab::channel::Observation;
use ssd_lab::complexity::{analytic_cost, Algorithm, OpCounters};
use ssd_lab::constellation::ConstellationSpec;
use ssd_lab::demap::{Demapper, DemapperKind};
use ssd_lab::fec::{minsum_decode, DecoderConfig, Encoder, ParityCheckMatrix};
use ssd_lab::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedAngle = 3,
    DegenerateChannel = 4,
    ParseError = 5,
    UnsupportedMatrix = 6,
    ConfigError = 7,
    IoError = 8,
    /// A Rust panic was caught; the handle involved should be freed.
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsdDemapper {
    Exact = 0,
    MaxLog = 1,
    Sphere = 2,
    Mmse = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsdAlgorithm {
    Sphere = 0,
    MaxLog = 1,
    SubRegion = 2,
    Mmse = 3,
    PdDem = 4,
}

/// Received components of one rotated symbol with perfect CSI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsdObservation {
    pub y_i: f64,
    pub y_q: f64,
    pub h_i: f64,
    pub h_q: f64,
    pub sigma2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SsdPoint {
    pub z_i: f64,
    pub z_q: f64,
}

/// Candidate points, real multiplications, sums, comparisons, inversions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SsdOpCounts {
    pub cp: u64,
    pub rm: u64,
    pub rs: u64,
    pub rc: u64,
    pub ri: u64,
}

impl From<OpCounters> for SsdOpCounts {
    fn from(c: OpCounters) -> Self {
        SsdOpCounts {
            cp: c.cp,
            rm: c.rm,
            rs: c.rs,
            rc: c.rc,
            ri: c.ri,
        }
    }
}

/// Opaque rotated constellation.
pub struct SsdConstellation {
    spec: ConstellationSpec,
}

/// Opaque LDPC code: parity-check matrix plus encoder when the matrix has
/// a staircase parity part.
pub struct SsdLdpc {
    h: ParityCheckMatrix,
    encoder: Option<Encoder>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn remember(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(e: &Error) -> SsdStatus {
    match e {
        Error::InvalidArgument(_) => SsdStatus::InvalidArgument,
        Error::UnsupportedAngle { .. } => SsdStatus::UnsupportedAngle,
        Error::DegenerateChannel => SsdStatus::DegenerateChannel,
        Error::Parse { .. } => SsdStatus::ParseError,
        Error::UnsupportedMatrix(_) => SsdStatus::UnsupportedMatrix,
        Error::Config(_) => SsdStatus::ConfigError,
        Error::Io { .. } => SsdStatus::IoError,
    }
}

struct Fail(SsdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SsdStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SsdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsdStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            remember(&msg);
            status
        }
        Err(_) => {
            remember("internal panic");
            SsdStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn short(what: &str, got: usize, need: usize) -> Fail {
    Fail(
        SsdStatus::InvalidArgument,
        format!("{what} holds {got} entries, {need} required"),
    )
}

/// Message describing the last failed call on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ssd_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ssd_status_name(status: SsdStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SsdStatus::Ok => c"ok",
        SsdStatus::NullPointer => c"null pointer",
        SsdStatus::InvalidArgument => c"invalid argument",
        SsdStatus::UnsupportedAngle => c"unsupported angle",
        SsdStatus::DegenerateChannel => c"degenerate channel",
        SsdStatus::ParseError => c"parse error",
        SsdStatus::UnsupportedMatrix => c"unsupported matrix",
        SsdStatus::ConfigError => c"configuration error",
        SsdStatus::IoError => c"I/O error",
        SsdStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

fn boxed(spec: ConstellationSpec) -> *mut SsdConstellation {
    Box::into_raw(Box::new(SsdConstellation { spec }))
}

/// Creates an `m`-QAM constellation rotated by `theta` radians.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ssd_constellation_new(m: u32, theta: f64, out_handle: *mut *mut SsdConstellation) -> SsdStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = boxed(ConstellationSpec::new(m, theta)?);
        Ok(())
    })
}

/// Creates an `m`-QAM constellation at `atan(1/sqrt(m))`.
///
/// # Safety
/// As [`ssd_constellation_new`].
#[no_mangle]
pub unsafe extern "C" fn ssd_constellation_proposed(m: u32, out_handle: *mut *mut SsdConstellation) -> SsdStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = boxed(ConstellationSpec::proposed(m)?);
        Ok(())
    })
}

/// Creates an `m`-QAM constellation at the DVB-T2 angle.
///
/// # Safety
/// As [`ssd_constellation_new`].
#[no_mangle]
pub unsafe extern "C" fn ssd_constellation_dvbt2(m: u32, out_handle: *mut *mut SsdConstellation) -> SsdStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        *slot = boxed(ConstellationSpec::dvbt2(m)?);
        Ok(())
    })
}

/// Releases a constellation. NULL is ignored.
///
/// # Safety
/// `handle` must come from one of the constructors and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ssd_constellation_free(handle: *mut SsdConstellation) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Bits per symbol, or 0 for a NULL handle.
///
/// # Safety
/// `handle` must be NULL or a live constellation.
#[no_mangle]
pub unsafe extern "C" fn ssd_constellation_bits(handle: *const SsdConstellation) -> u32 {
    handle.as_ref().map_or(0, |c| c.spec.bits_per_symbol())
}

/// Rotated point of a packed label (bit `i` of `label` is `b_i`).
///
/// # Safety
/// `handle` must be a live constellation and `point` writable.
#[no_mangle]
pub unsafe extern "C" fn ssd_map_label(handle: *const SsdConstellation, label: u32, point: *mut SsdPoint) -> SsdStatus {
    guard(|| {
        let c = deref(handle, "handle")?;
        let slot = out(point, "point")?;
        if label >= c.spec.order() {
            return Err(Fail(
                SsdStatus::InvalidArgument,
                format!("label {label} out of range for M={}", c.spec.order()),
            ));
        }
        let z = c.spec.map_label(label);
        *slot = SsdPoint { z_i: z.z_i, z_q: z.z_q };
        Ok(())
    })
}

/// Writes `log2(M)` LLRs (positive means bit 0) for one observation.
/// When `counts` is not NULL the executed operations are added to it
/// (max-log and sphere only).
///
/// # Safety
/// `handle` and `obs` must be valid, `llr` must hold `llr_len` doubles and
/// `counts` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ssd_demap(
    handle: *const SsdConstellation,
    kind: SsdDemapper,
    obs: *const SsdObservation,
    llr: *mut f64,
    llr_len: usize,
    counts: *mut SsdOpCounts,
) -> SsdStatus {
    guard(|| {
        let c = deref(handle, "handle")?;
        let o = deref(obs, "obs")?;
        let bits = c.spec.bits_per_symbol() as usize;
        if llr_len < bits {
            return Err(short("llr", llr_len, bits));
        }
        let dst = output(llr, llr_len, "llr")?;
        let kind = match kind {
            SsdDemapper::Exact => DemapperKind::Exact,
            SsdDemapper::MaxLog => DemapperKind::MaxLog,
            SsdDemapper::Sphere => DemapperKind::Sphere,
            SsdDemapper::Mmse => DemapperKind::Mmse,
        };
        let demapper = Demapper::new(kind);
        demapper.supports(&c.spec)?;
        let observation = Observation {
            y_i: o.y_i,
            y_q: o.y_q,
            h_i: o.h_i,
            h_q: o.h_q,
            sigma2: o.sigma2,
        };
        let values = match counts.as_mut() {
            Some(acc) => {
                let mut counters = OpCounters::default();
                let v = demapper.demap_counted(&observation, &c.spec, &mut counters)?;
                let add = SsdOpCounts::from(counters);
                acc.cp += add.cp;
                acc.rm += add.rm;
                acc.rs += add.rs;
                acc.rc += add.rc;
                acc.ri += add.ri;
                v
            }
            None => demapper.demap(&observation, &c.spec)?,
        };
        dst[..bits].copy_from_slice(&values);
        Ok(())
    })
}

/// Per-symbol cost of `algorithm` for `m`-QAM.
///
/// # Safety
/// `counts` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssd_analytic_cost(m: u32, algorithm: SsdAlgorithm, counts: *mut SsdOpCounts) -> SsdStatus {
    guard(|| {
        let slot = out(counts, "counts")?;
        let alg = match algorithm {
            SsdAlgorithm::Sphere => Algorithm::Sphere,
            SsdAlgorithm::MaxLog => Algorithm::MaxLogFull,
            SsdAlgorithm::SubRegion => Algorithm::SubRegion,
            SsdAlgorithm::Mmse => Algorithm::Mmse,
            SsdAlgorithm::PdDem => Algorithm::PdDem,
        };
        *slot = analytic_cost(m, alg)?.into();
        Ok(())
    })
}

/// Parses a NUL-terminated alist text into an LDPC handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out_handle` writable.
#[no_mangle]
pub unsafe extern "C" fn ssd_ldpc_parse_alist(text: *const c_char, out_handle: *mut *mut SsdLdpc) -> SsdStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Fail(SsdStatus::ParseError, "alist text is not UTF-8".into()))?;
        let h = ParityCheckMatrix::parse_alist(text)?;
        let encoder = Encoder::new(&h).ok();
        *slot = Box::into_raw(Box::new(SsdLdpc { h, encoder }));
        Ok(())
    })
}

/// Releases an LDPC handle. NULL is ignored.
///
/// # Safety
/// `handle` must come from [`ssd_ldpc_parse_alist`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ssd_ldpc_free(handle: *mut SsdLdpc) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Code length and check count; either output may be NULL.
///
/// # Safety
/// `handle` must be a live LDPC handle.
#[no_mangle]
pub unsafe extern "C" fn ssd_ldpc_shape(handle: *const SsdLdpc, n: *mut usize, m: *mut usize) -> SsdStatus {
    guard(|| {
        let l = deref(handle, "handle")?;
        if let Some(n) = n.as_mut() {
            *n = l.h.n();
        }
        if let Some(m) = m.as_mut() {
            *m = l.h.m();
        }
        Ok(())
    })
}

/// Systematic encoding: `codeword = [info | parity]`.
///
/// # Safety
/// `info` must hold `info_len` bytes and `codeword` `codeword_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ssd_ldpc_encode(
    handle: *const SsdLdpc,
    info: *const u8,
    info_len: usize,
    codeword: *mut u8,
    codeword_len: usize,
) -> SsdStatus {
    guard(|| {
        let l = deref(handle, "handle")?;
        let enc = l.encoder.as_ref().ok_or_else(|| {
            Fail(
                SsdStatus::UnsupportedMatrix,
                "parity part is not lower triangular".into(),
            )
        })?;
        let bits = input(info, info_len, "info")?;
        if codeword_len < l.h.n() {
            return Err(short("codeword", codeword_len, l.h.n()));
        }
        let dst = output(codeword, codeword_len, "codeword")?;
        let cw = enc.encode(bits)?;
        dst[..cw.len()].copy_from_slice(&cw);
        Ok(())
    })
}

/// Min-sum decoding of `n` LLRs (positive means bit 0) into `bits`.
/// `converged` and `iterations` may be NULL.
///
/// # Safety
/// `llr` must hold `llr_len` doubles, `bits` `bits_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ssd_ldpc_decode(
    handle: *const SsdLdpc,
    llr: *const f64,
    llr_len: usize,
    max_iters: u32,
    bits: *mut u8,
    bits_len: usize,
    converged: *mut bool,
    iterations: *mut u32,
) -> SsdStatus {
    guard(|| {
        let l = deref(handle, "handle")?;
        let values = input(llr, llr_len, "llr")?;
        if bits_len < l.h.n() {
            return Err(short("bits", bits_len, l.h.n()));
        }
        let dst = output(bits, bits_len, "bits")?;
        let cfg = DecoderConfig {
            max_iters,
            ..DecoderConfig::default()
        };
        let res = minsum_decode(&l.h, values, &cfg)?;
        dst[..res.bits.len()].copy_from_slice(&res.bits);
        if let Some(c) = converged.as_mut() {
            *c = res.converged;
        }
        if let Some(i) = iterations.as_mut() {
            *i = res.iterations;
        }
        Ok(())
    })
}
