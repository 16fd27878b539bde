//! C interface to the quadcover library.
//!
//! Every function returns a [`QcStatus`]. Objects are handed out as opaque
//! pointers and must be released with the matching `_free` function. After a
//! failure, `qc_last_error` copies a message describing it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use quadcover::cli::Cli;
use quadcover::cliquecensus::{census, formula_counts, CensusMode, Gamma};
use quadcover::gf2n::FieldCtx;
use quadcover::ovoid::GeometryX;
use quadcover::{Error, QuadricModel};

use clap::Parser;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    TooLarge = 3,
    OutOfRange = 4,
    BufferTooSmall = 5,
    CheckFailed = 6,
    Internal = 7,
    Panic = 8,
}

/// A quadric model with its ovoid geometry and tangency graph, built on
/// first use.
pub struct QcModel {
    model: QuadricModel,
    gx: OnceLock<Result<GeometryX, Error>>,
    gamma: OnceLock<Gamma>,
}

impl QcModel {
    fn gx(&self) -> Result<&GeometryX, Error> {
        self.gx.get_or_init(|| GeometryX::build(&self.model)).as_ref().map_err(Clone::clone)
    }

    fn gamma(&self) -> Result<&Gamma, Error> {
        let gx = self.gx()?;
        Ok(self.gamma.get_or_init(|| Gamma::build(&self.model, gx)))
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QcModelCounts {
    pub q: u32,
    pub points_q: u32,
    pub points_q0: u32,
    pub lines_q: u32,
    pub lines_q0: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QcCliqueCounts {
    pub n3: u64,
    pub n4: u64,
    pub n5: u64,
    pub n6: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> QcStatus {
    match e {
        Error::ModelTooLarge { .. } | Error::CensusTooLarge { .. } | Error::ExhaustiveTooLarge(_) => QcStatus::TooLarge,
        Error::Invariant(_) => QcStatus::Internal,
        _ => QcStatus::InvalidArgument,
    }
}

fn fail(e: Error) -> QcStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn guard(f: impl FnOnce() -> QcStatus) -> QcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_default();
            set_error(format!("panic: {msg}"));
            QcStatus::Panic
        }
    }
}

/// Copies `text` and a terminating NUL into `buf`, storing the needed size
/// (including the NUL) in `needed`.
unsafe fn copy_out(text: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> QcStatus {
    if !needed.is_null() {
        *needed = text.len() + 1;
    }
    if buf.is_null() || cap < text.len() + 1 {
        set_error(format!("buffer of {cap} bytes, {} needed", text.len() + 1));
        return QcStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
    *buf.add(text.len()) = 0;
    QcStatus::Ok
}

/// Builds the model for GF(2^n). `modulus` 0 and `lambda` 0 select the
/// defaults.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_model_new(n: u32, modulus: u32, lambda: u32, out: *mut *mut QcModel) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return QcStatus::NullPointer;
        }
        let built = (|| {
            let ctx = if modulus == 0 { FieldCtx::new(n)? } else { FieldCtx::with_modulus(n, modulus)? };
            let lam = if lambda == 0 { ctx.default_lambda() } else { ctx.element(lambda)? };
            QuadricModel::build(ctx, lam)
        })();
        match built {
            Ok(model) => {
                *out = Box::into_raw(Box::new(QcModel {
                    model,
                    gx: OnceLock::new(),
                    gamma: OnceLock::new(),
                }));
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `model` must come from `qc_model_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_model_free(model: *mut QcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_model_counts(model: *const QcModel, out: *mut QcModelCounts) -> QcStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return QcStatus::NullPointer;
        };
        let s = m.model.summary();
        *out = QcModelCounts {
            q: s.q,
            points_q: s.points_q as u32,
            points_q0: s.points_q0 as u32,
            lines_q: s.lines_q as u32,
            lines_q0: s.lines_q0 as u32,
        };
        QcStatus::Ok
    })
}

/// Writes the six coordinate bit patterns of point `index` of Q.
///
/// # Safety
/// `model` must be a live handle and `out` valid for 6 writes.
#[no_mangle]
pub unsafe extern "C" fn qc_point_coords(model: *const QcModel, index: u32, out: *mut u16) -> QcStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return QcStatus::NullPointer;
        };
        if index as usize >= m.model.points().len() {
            set_error(format!("point {index} out of range"));
            return QcStatus::OutOfRange;
        }
        for (i, c) in m.model.coords(index).iter().enumerate() {
            *out.add(i) = c.bits();
        }
        QcStatus::Ok
    })
}

/// Number of elliptic ovoids of Q0.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_ovoid_count(model: *const QcModel, out: *mut u32) -> QcStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return QcStatus::NullPointer;
        };
        match m.gx() {
            Ok(gx) => {
                *out = gx.ovoids.len() as u32;
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Whether ovoids `a` and `b` are tangent.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_ovoids_tangent(model: *const QcModel, a: u32, b: u32, out: *mut bool) -> QcStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return QcStatus::NullPointer;
        };
        let g = match m.gamma() {
            Ok(g) => g,
            Err(e) => return fail(e),
        };
        let v = g.n_vertices() as u32;
        if a >= v || b >= v {
            set_error(format!("ovoid id out of range (0..{v})"));
            return QcStatus::OutOfRange;
        }
        *out = g.adjacent(a, b);
        QcStatus::Ok
    })
}

/// Full census of non-linear cliques; fails with `CheckFailed` when the
/// census report does not pass.
///
/// # Safety
/// `model` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_census(model: *const QcModel, out: *mut QcCliqueCounts) -> QcStatus {
    guard(|| {
        let (Some(m), false) = (model.as_ref(), out.is_null()) else {
            return QcStatus::NullPointer;
        };
        let r = m.gamma().and_then(|g| census(g, m.gx()?, CensusMode::Full, 6));
        match r {
            Ok(r) => {
                let c = r.counts.clone().unwrap_or_default();
                *out = QcCliqueCounts { n3: c.n3, n4: c.n4, n5: c.n5, n6: c.n6 };
                if r.pass() {
                    QcStatus::Ok
                } else {
                    set_error(r.counterexample.unwrap_or_else(|| "census checks failed".into()));
                    QcStatus::CheckFailed
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Closed-form clique counts for GF(2^n), 1 <= n <= 9.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qc_formula_counts(n: u32, out: *mut QcCliqueCounts) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return QcStatus::NullPointer;
        }
        if !(1..=9).contains(&n) {
            set_error(format!("n = {n} outside 1..=9"));
            return QcStatus::OutOfRange;
        }
        let f = formula_counts(n);
        *out = QcCliqueCounts { n3: f.n3, n4: f.n4, n5: f.n5, n6: f.n6 };
        QcStatus::Ok
    })
}

/// Runs a command line such as `"census --n 2"` and writes its JSON report.
/// Returns `CheckFailed` (with the report still written) when a check fails.
///
/// # Safety
/// `args` must be a NUL-terminated string; `buf` must be valid for `cap`
/// bytes or null; `needed` must be valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn qc_run_json(args: *const c_char, buf: *mut c_char, cap: usize, needed: *mut usize) -> QcStatus {
    guard(|| {
        if args.is_null() {
            return QcStatus::NullPointer;
        }
        let Ok(line) = CStr::from_ptr(args).to_str() else {
            set_error("arguments are not UTF-8");
            return QcStatus::InvalidArgument;
        };
        let cli = match Cli::try_parse_from(std::iter::once("quadcover").chain(line.split_whitespace())) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return QcStatus::InvalidArgument;
            }
        };
        match quadcover::cli::run(&cli) {
            Ok(rep) => {
                let s = copy_out(&serde_json::to_string(&rep.payload()).expect("report serializes"), buf, cap, needed);
                if s == QcStatus::Ok && !rep.pass() {
                    set_error("some checks failed");
                    return QcStatus::CheckFailed;
                }
                s
            }
            Err(e) => fail(e),
        }
    })
}

/// Copies the message of the last failure on this thread.
///
/// # Safety
/// As for `qc_run_json`.
#[no_mangle]
pub unsafe extern "C" fn qc_last_error(buf: *mut c_char, cap: usize, needed: *mut usize) -> QcStatus {
    guard(|| {
        let msg = LAST_ERROR.with(|e| e.borrow().clone());
        let s = copy_out(&msg, buf, cap, needed);
        // keep the original message for a retry with a larger buffer
        LAST_ERROR.with(|e| *e.borrow_mut() = msg);
        s
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qc_status_str(status: QcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        QcStatus::Ok => c"ok",
        QcStatus::NullPointer => c"null pointer",
        QcStatus::InvalidArgument => c"invalid argument",
        QcStatus::TooLarge => c"problem too large",
        QcStatus::OutOfRange => c"index out of range",
        QcStatus::BufferTooSmall => c"buffer too small",
        QcStatus::CheckFailed => c"check failed",
        QcStatus::Internal => c"internal invariant violated",
        QcStatus::Panic => c"panic",
    };
    s.as_ptr()
}
