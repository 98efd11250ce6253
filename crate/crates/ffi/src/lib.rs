//! C ABI over `mateforge`.
//!
//! Assemblies are passed as opaque `MfAssembly` handles. Every function
//! returns an `MfStatus`; on failure `mf_last_error_message` describes the
//! most recent error on the calling thread. Strings returned through `char**`
//! out-parameters are owned by the caller and released with `mf_string_free`.
//! Configuration arguments are optional JSON tolerance documents; null selects
//! the defaults.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use mateforge::analysis::{min_distance, CandidateAxisSet};
use mateforge::io::{assembly_from_json, assembly_to_json, load_assembly, to_canonical_string};
use mateforge::motion::GroupKind;
use mateforge::pipeline::{densify, process_assembly, resolved_contact_tol};
use mateforge::predict::predict_assembly;
use mateforge::{relative_motion, Assembly, Error, MotionGroup, ToleranceConfig};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Document = 3,
    InvalidConfig = 4,
    UnknownPart = 5,
    Analysis = 6,
    Io = 7,
    Panic = 8,
}

/// Kind of a relative motion group.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfGroupKind {
    Fixed = 0,
    Rotation = 1,
    Translation = 2,
    Cylindrical = 3,
    Complex = 4,
}

/// Relative motion between two parts. `point` is meaningful for rotation and
/// cylindrical groups, `direction` for every kind except fixed and complex.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfMotion {
    pub kind: MfGroupKind,
    pub point: [f64; 3],
    pub direction: [f64; 3],
}

/// Opaque assembly handle.
pub struct MfAssembly {
    inner: Assembly,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Document(_) => MfStatus::Document,
            Error::InvalidConfig(_) => MfStatus::InvalidConfig,
            Error::UnknownPart(_) => MfStatus::UnknownPart,
            Error::Io(_) => MfStatus::Io,
            _ => MfStatus::Analysis,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MfStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            MfStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(MfStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(MfStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn handle<'a>(a: *const MfAssembly) -> Result<&'a Assembly, Failure> {
    a.as_ref().map(|h| &h.inner).ok_or_else(|| null("assembly"))
}

unsafe fn config(p: *const c_char) -> Result<ToleranceConfig, Failure> {
    if p.is_null() {
        return Ok(ToleranceConfig::default());
    }
    Ok(ToleranceConfig::from_json(text(p, "config")?)?)
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn new_handle(a: Assembly) -> *mut MfAssembly {
    Box::into_raw(Box::new(MfAssembly { inner: a }))
}

fn c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|_| Failure(MfStatus::Analysis, "string contains NUL".into()))
}

fn canonical<E: std::fmt::Display>(r: Result<String, E>) -> Result<*mut c_char, Failure> {
    c_string(r.map_err(|e| Failure(MfStatus::Analysis, e.to_string()))?)
}

/// Message of the last failed call on this thread, or null after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates an assembly document.
#[no_mangle]
pub unsafe extern "C" fn mf_assembly_load_json(json: *const c_char, out_assembly: *mut *mut MfAssembly) -> MfStatus {
    guard(|| {
        let slot = out(out_assembly, "out_assembly")?;
        let a = assembly_from_json(text(json, "json")?).map_err(|e| Failure::from(Error::from(e)))?;
        *slot = new_handle(a);
        Ok(())
    })
}

/// Reads and validates an assembly document from a file.
#[no_mangle]
pub unsafe extern "C" fn mf_assembly_load_file(path: *const c_char, out_assembly: *mut *mut MfAssembly) -> MfStatus {
    guard(|| {
        let slot = out(out_assembly, "out_assembly")?;
        *slot = new_handle(load_assembly(Path::new(text(path, "path")?))?);
        Ok(())
    })
}

/// Releases an assembly handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mf_assembly_free(assembly: *mut MfAssembly) {
    if !assembly.is_null() {
        drop(Box::from_raw(assembly));
    }
}

/// Serializes an assembly to its canonical document text.
#[no_mangle]
pub unsafe extern "C" fn mf_assembly_to_json(assembly: *const MfAssembly, out_json: *mut *mut c_char) -> MfStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = c_string(assembly_to_json(handle(assembly)?))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mf_assembly_part_count(assembly: *const MfAssembly, out_count: *mut usize) -> MfStatus {
    guard(|| {
        *out(out_count, "out_count")? = handle(assembly)?.parts.len();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mf_assembly_mate_count(assembly: *const MfAssembly, out_count: *mut usize) -> MfStatus {
    guard(|| {
        *out(out_count, "out_count")? = handle(assembly)?.mates.len();
        Ok(())
    })
}

/// Runs every filter stage and densification on one assembly.
///
/// `out_kept` receives 1 when the assembly survives. `out_outcome_json`
/// receives the filter outcome. `out_densified` is optional; when given it
/// receives the densified assembly for kept assemblies and null otherwise.
#[no_mangle]
pub unsafe extern "C" fn mf_filter(
    assembly: *const MfAssembly,
    config_json: *const c_char,
    out_kept: *mut c_int,
    out_outcome_json: *mut *mut c_char,
    out_densified: *mut *mut MfAssembly,
) -> MfStatus {
    guard(|| {
        let a = handle(assembly)?;
        let tol = config(config_json)?;
        let kept = out(out_kept, "out_kept")?;
        let outcome = out(out_outcome_json, "out_outcome_json")?;
        let run = process_assembly(a, &tol)?;
        let text = canonical(to_canonical_string(&run.outcome))?;
        *kept = c_int::from(run.outcome.is_kept());
        *outcome = text;
        if let Some(slot) = out_densified.as_mut() {
            *slot = run.kept.map_or(ptr::null_mut(), new_handle);
        }
        Ok(())
    })
}

/// Adds the mates implied by contact and shared axes. `out_added` is optional.
#[no_mangle]
pub unsafe extern "C" fn mf_densify(
    assembly: *const MfAssembly,
    config_json: *const c_char,
    out_assembly: *mut *mut MfAssembly,
    out_added: *mut usize,
) -> MfStatus {
    guard(|| {
        let a = handle(assembly)?;
        let tol = config(config_json)?;
        let slot = out(out_assembly, "out_assembly")?;
        let d = densify(a, &CandidateAxisSet::compute(a, &tol), &tol)?;
        if !d.outcome.is_kept() {
            return Err(Failure(MfStatus::Analysis, d.outcome.detail.clone()));
        }
        if let Some(n) = out_added.as_mut() {
            *n = d.added;
        }
        *slot = new_handle(d.assembly);
        Ok(())
    })
}

/// Motion of `part_b` relative to `part_a` implied by the mate graph.
#[no_mangle]
pub unsafe extern "C" fn mf_relative_motion(
    assembly: *const MfAssembly,
    part_a: *const c_char,
    part_b: *const c_char,
    config_json: *const c_char,
    out_motion: *mut MfMotion,
) -> MfStatus {
    guard(|| {
        let a = handle(assembly)?;
        let tol = config(config_json)?;
        let slot = out(out_motion, "out_motion")?;
        let g = relative_motion(a, text(part_a, "part_a")?, text(part_b, "part_b")?, &tol)?;
        *slot = motion(&g);
        Ok(())
    })
}

fn motion(g: &MotionGroup) -> MfMotion {
    let kind = match g.kind() {
        GroupKind::Fixed => MfGroupKind::Fixed,
        GroupKind::Rotation => MfGroupKind::Rotation,
        GroupKind::Translation => MfGroupKind::Translation,
        GroupKind::Cylindrical => MfGroupKind::Cylindrical,
        GroupKind::Complex => MfGroupKind::Complex,
    };
    let point = g.axis().map_or([0.0; 3], |l| l.point().into());
    let direction = g.direction().map_or([0.0; 3], Into::into);
    MfMotion { kind, point, direction }
}

/// Minimum distance between two placed parts and whether they are in contact
/// under the configured tolerance. `out_in_contact` is optional.
#[no_mangle]
pub unsafe extern "C" fn mf_min_distance(
    assembly: *const MfAssembly,
    part_a: *const c_char,
    part_b: *const c_char,
    config_json: *const c_char,
    out_distance: *mut f64,
    out_in_contact: *mut c_int,
) -> MfStatus {
    guard(|| {
        let a = handle(assembly)?;
        let tol = config(config_json)?;
        let slot = out(out_distance, "out_distance")?;
        let (pa, pb) = (a.part(text(part_a, "part_a")?)?, a.part(text(part_b, "part_b")?)?);
        let r = min_distance(pa, pb, resolved_contact_tol(a, &tol))?;
        *slot = r.min_distance;
        if let Some(c) = out_in_contact.as_mut() {
            *c = c_int::from(r.in_contact);
        }
        Ok(())
    })
}

/// Predicts a type and axis for every mated pair. `out_predicted` receives an
/// assembly whose mates are the predictions; `out_predictions_json` is optional
/// and receives the per-mate scores.
#[no_mangle]
pub unsafe extern "C" fn mf_predict(
    assembly: *const MfAssembly,
    config_json: *const c_char,
    out_predicted: *mut *mut MfAssembly,
    out_predictions_json: *mut *mut c_char,
) -> MfStatus {
    guard(|| {
        let a = handle(assembly)?;
        let tol = config(config_json)?;
        let slot = out(out_predicted, "out_predicted")?;
        let (p, preds) = predict_assembly(a, &tol)?;
        if let Some(s) = out_predictions_json.as_mut() {
            *s = canonical(to_canonical_string(&preds))?;
        }
        *slot = new_handle(p);
        Ok(())
    })
}
