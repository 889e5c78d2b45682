//! C ABI over the egn toolkit.
//!
//! Conventions:
//! - Curves and rational matrices live behind opaque handles with explicit
//!   `_free` destructors; reports and individual entries cross the boundary
//!   as UTF-8 JSON or `"p/q"` strings released with [`egn_string_free`].
//! - Every fallible call returns an [`EgnStatus`]; on failure a
//!   human-readable message is kept per thread and exposed through
//!   [`egn_last_error`].
//! - All arithmetic stays exact; identical inputs produce identical bytes.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use egn::curve::{
    alpha_matrix, expansion_constants, hyperelliptic_alpha, massey_report, wheel_alpha,
    CurveError, HyperellipticData, NodalCurve, WheelCurve,
};
use egn::hochschild::{hh_dim_bar, hh_dim_resolution};
use egn::linalg::QMatrix;
use egn::poly::Poly;
use egn::rat::Rat;
use egn::reconstruct::{homogeneous_system_dims, reconstruct_constants, ReconstructError};
use egn::series::ExpansionPoint;
use egn::tangent::tangent_rank;

/// Result of every fallible call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgnStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input failed to parse or violated a validity constraint.
    BadInput = 3,
    /// The input was well formed but degenerate for the computation
    /// (singular normalization, inconsistent or underdetermined systems).
    Degenerate = 4,
    /// The parameter combination is outside the supported range.
    Unsupported = 5,
    /// An internal invariant failed; the library state is still sound.
    Internal = 6,
}

/// Cohomology backend selector for [`egn_hh_dimension`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EgnHhMethod {
    /// Comparison complex from the minimal resolution; self-dual case only.
    Resolution = 0,
    /// Reduced bar complex; any valid parameter pair.
    Bar = 1,
}

/// A pointed nodal curve datum: g node preimage pairs and g marked points.
pub struct EgnCurve(NodalCurve);

/// A dense matrix of exact rationals.
pub struct EgnMatrix(QMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn fail(status: EgnStatus, msg: &str) -> EgnStatus {
    set_error(msg);
    status
}

fn curve_status(e: &CurveError) -> EgnStatus {
    match e {
        CurveError::Degenerate | CurveError::DegenerateWheel | CurveError::DegenerateDivisor => {
            EgnStatus::Degenerate
        }
        _ => EgnStatus::BadInput,
    }
}

fn reconstruct_status(e: &ReconstructError) -> EgnStatus {
    match e {
        ReconstructError::ExcessKernel { .. } | ReconstructError::Inconsistent => {
            EgnStatus::Degenerate
        }
        _ => EgnStatus::BadInput,
    }
}

/// Runs a body that may panic; panics report as [`EgnStatus::Internal`].
fn guarded(body: impl FnOnce() -> EgnStatus) -> EgnStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            fail(EgnStatus::Internal, &format!("internal error: {msg}"))
        }
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, EgnStatus> {
    if ptr.is_null() {
        return Err(fail(EgnStatus::NullPointer, &format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(EgnStatus::InvalidUtf8, &format!("{what} is not UTF-8")))
}

unsafe fn rat_list(
    ptr: *const *const c_char,
    len: usize,
    what: &str,
) -> Result<Vec<Rat>, EgnStatus> {
    if len > 0 && ptr.is_null() {
        return Err(fail(EgnStatus::NullPointer, &format!("{what} is null")));
    }
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let s = str_arg(*ptr.add(k), &format!("{what}[{k}]"))?;
        let value = Rat::from_str(s).map_err(|e| {
            fail(EgnStatus::BadInput, &format!("{what}[{k}] {e:?}: {s:?}"))
        })?;
        out.push(value);
    }
    Ok(out)
}

unsafe fn emit_handle<T>(out: *mut *mut T, value: T) -> EgnStatus {
    if out.is_null() {
        return fail(EgnStatus::NullPointer, "output pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    EgnStatus::Ok
}

unsafe fn emit_string(out: *mut *mut c_char, value: String) -> EgnStatus {
    if out.is_null() {
        return fail(EgnStatus::NullPointer, "output pointer is null");
    }
    *out = CString::new(value).expect("JSON output has no interior NUL").into_raw();
    EgnStatus::Ok
}

unsafe fn emit_usize(out: *mut usize, value: usize) -> EgnStatus {
    if out.is_null() {
        return fail(EgnStatus::NullPointer, "output pointer is null");
    }
    *out = value;
    EgnStatus::Ok
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread; never free it.
#[no_mangle]
pub extern "C" fn egn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code, e.g. `"ok"` or `"bad_input"`.
#[no_mangle]
pub extern "C" fn egn_status_name(status: EgnStatus) -> *const c_char {
    let name: &'static CStr = match status {
        EgnStatus::Ok => c"ok",
        EgnStatus::NullPointer => c"null_pointer",
        EgnStatus::InvalidUtf8 => c"invalid_utf8",
        EgnStatus::BadInput => c"bad_input",
        EgnStatus::Degenerate => c"degenerate",
        EgnStatus::Unsupported => c"unsupported",
        EgnStatus::Internal => c"internal",
    };
    name.as_ptr()
}

/// Frees a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn egn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a curve from three length-`g` arrays of rational strings
/// (`"p"` or `"p/q"`): first node preimages, second node preimages, marked
/// points. All 3g values must be pairwise distinct.
#[no_mangle]
pub unsafe extern "C" fn egn_curve_new(
    g: usize,
    nodes_first: *const *const c_char,
    nodes_second: *const *const c_char,
    marked: *const *const c_char,
    out: *mut *mut EgnCurve,
) -> EgnStatus {
    guarded(|| {
        let a = match rat_list(nodes_first, g, "nodes_first") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let b = match rat_list(nodes_second, g, "nodes_second") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let c = match rat_list(marked, g, "marked") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match NodalCurve::new(a.into_iter().zip(b).collect(), c) {
            Ok(curve) => emit_handle(out, EgnCurve(curve)),
            Err(e) => fail(curve_status(&e), &e.to_string()),
        }
    })
}

/// Parses a curve from JSON of the shape
/// `{"nodes": [["p/q", "p/q"], ...], "marked": ["p/q", ...]}`.
#[no_mangle]
pub unsafe extern "C" fn egn_curve_parse(
    json: *const c_char,
    out: *mut *mut EgnCurve,
) -> EgnStatus {
    guarded(|| {
        let text = match str_arg(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match serde_json::from_str::<NodalCurve>(text) {
            Ok(curve) => emit_handle(out, EgnCurve(curve)),
            Err(e) => fail(EgnStatus::BadInput, &e.to_string()),
        }
    })
}

/// Serializes the curve back to the JSON shape accepted by
/// [`egn_curve_parse`].
#[no_mangle]
pub unsafe extern "C" fn egn_curve_to_json(
    curve: *const EgnCurve,
    out: *mut *mut c_char,
) -> EgnStatus {
    guarded(|| {
        let Some(c) = curve.as_ref() else {
            return fail(EgnStatus::NullPointer, "curve is null");
        };
        emit_string(out, serde_json::to_string(&c.0).unwrap())
    })
}

/// Frees a curve handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn egn_curve_free(curve: *mut EgnCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of nodes of the curve; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn egn_curve_genus(curve: *const EgnCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.genus())
}

/// The g-by-g invariant matrix of the curve: off-diagonal entries are the
/// double-pole coupling constants, the diagonal is a solver byproduct.
#[no_mangle]
pub unsafe extern "C" fn egn_curve_alpha(
    curve: *const EgnCurve,
    out: *mut *mut EgnMatrix,
) -> EgnStatus {
    guarded(|| {
        let Some(c) = curve.as_ref() else {
            return fail(EgnStatus::NullPointer, "curve is null");
        };
        match alpha_matrix(&c.0) {
            Ok(m) => emit_handle(out, EgnMatrix(m)),
            Err(e) => fail(curve_status(&e), &e.to_string()),
        }
    })
}

/// Full expansion-constant table of the curve as JSON with fields
/// `alpha`, `beta`, `gamma`, `delta`, `epsilon`, `theta`, `gamma_diag`,
/// `a`, `b`.
#[no_mangle]
pub unsafe extern "C" fn egn_curve_constants_json(
    curve: *const EgnCurve,
    out: *mut *mut c_char,
) -> EgnStatus {
    guarded(|| {
        let Some(c) = curve.as_ref() else {
            return fail(EgnStatus::NullPointer, "curve is null");
        };
        match expansion_constants(&c.0) {
            Ok(table) => emit_string(out, serde_json::to_string(&table).unwrap()),
            Err(e) => fail(curve_status(&e), &e.to_string()),
        }
    })
}

/// Rank of the deformation-direction functional matrix of the curve.
#[no_mangle]
pub unsafe extern "C" fn egn_curve_tangent_rank(
    curve: *const EgnCurve,
    out: *mut usize,
) -> EgnStatus {
    guarded(|| {
        let Some(c) = curve.as_ref() else {
            return fail(EgnStatus::NullPointer, "curve is null");
        };
        match tangent_rank(&c.0) {
            Ok(rank) => emit_usize(out, rank),
            Err(e) => fail(curve_status(&e), &e.to_string()),
        }
    })
}

/// Triple/quadruple Massey product report at the base point `point`
/// (`"inf"` or a rational string), as JSON with fields `h0_chain`,
/// `triple_vanishes`, `quadruple_defined`, `quadruple_vanishes`.
#[no_mangle]
pub unsafe extern "C" fn egn_curve_massey_json(
    curve: *const EgnCurve,
    point: *const c_char,
    out: *mut *mut c_char,
) -> EgnStatus {
    guarded(|| {
        let Some(c) = curve.as_ref() else {
            return fail(EgnStatus::NullPointer, "curve is null");
        };
        let text = match str_arg(point, "point") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let p = if text == "inf" {
            ExpansionPoint::Infinity
        } else {
            match Rat::from_str(text) {
                Ok(x) => ExpansionPoint::Finite(x),
                Err(e) => return fail(EgnStatus::BadInput, &format!("point {e:?}: {text:?}")),
            }
        };
        match massey_report(&c.0, &p) {
            Ok(report) => emit_string(out, serde_json::to_string(&report).unwrap()),
            Err(e) => fail(curve_status(&e), &e.to_string()),
        }
    })
}

/// Closed-form invariant matrix of a wheel of lines with the given scale
/// parameters (rational strings; none may be 0 or 1).
#[no_mangle]
pub unsafe extern "C" fn egn_wheel_alpha(
    lambda: *const *const c_char,
    len: usize,
    out: *mut *mut EgnMatrix,
) -> EgnStatus {
    guarded(|| {
        let l = match rat_list(lambda, len, "lambda") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let wheel = match WheelCurve::new(l) {
            Ok(w) => w,
            Err(e) => return fail(curve_status(&e), &e.to_string()),
        };
        match wheel_alpha(&wheel) {
            Ok(m) => emit_handle(out, EgnMatrix(m)),
            Err(e) => fail(curve_status(&e), &e.to_string()),
        }
    })
}

/// Closed-form invariant matrix of a hyperelliptic curve: `branch` holds g
/// marked Weierstrass points, `poly` the defining polynomial coefficients
/// in increasing degree. Branch points must be distinct simple roots.
#[no_mangle]
pub unsafe extern "C" fn egn_hyperelliptic_alpha(
    branch: *const *const c_char,
    branch_len: usize,
    poly: *const *const c_char,
    poly_len: usize,
    out: *mut *mut EgnMatrix,
) -> EgnStatus {
    guarded(|| {
        let b = match rat_list(branch, branch_len, "branch") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let coeffs = match rat_list(poly, poly_len, "poly") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match HyperellipticData::new(b, Poly::from_coeffs(coeffs)) {
            Ok(data) => emit_handle(out, EgnMatrix(hyperelliptic_alpha(&data))),
            Err(e) => fail(curve_status(&e), &e.to_string()),
        }
    })
}

/// Dimension of the graded Hochschild cohomology of the arrow algebra with
/// parameters (g, n) in cohomological degree `level` and internal degree
/// `degree`. The resolution method covers the self-dual case n = g only.
#[no_mangle]
pub unsafe extern "C" fn egn_hh_dimension(
    g: usize,
    n: usize,
    level: usize,
    degree: i64,
    method: EgnHhMethod,
    out: *mut usize,
) -> EgnStatus {
    guarded(|| {
        if level == 0 {
            return fail(EgnStatus::BadInput, "level must be at least 1");
        }
        match method {
            EgnHhMethod::Resolution => {
                if n != g {
                    return fail(
                        EgnStatus::Unsupported,
                        "the resolution method covers the self-dual case n = g only",
                    );
                }
                if egn::quiver::Algebra::new(g, n).is_err() {
                    return fail(EgnStatus::BadInput, "parameters need 1 <= n <= g");
                }
                emit_usize(out, hh_dim_resolution(g, level, degree).hh_dimension)
            }
            EgnHhMethod::Bar => match hh_dim_bar(g, n, level, degree) {
                Ok(r) => emit_usize(out, r.hh_dimension),
                Err(e) => fail(EgnStatus::Unsupported, &e.to_string()),
            },
        }
    })
}

/// Parses a matrix from a JSON array of rows of rational strings.
#[no_mangle]
pub unsafe extern "C" fn egn_matrix_parse(
    json: *const c_char,
    out: *mut *mut EgnMatrix,
) -> EgnStatus {
    guarded(|| {
        let text = match str_arg(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match serde_json::from_str::<QMatrix>(text) {
            Ok(m) => emit_handle(out, EgnMatrix(m)),
            Err(e) => fail(EgnStatus::BadInput, &e.to_string()),
        }
    })
}

/// Serializes the matrix as a JSON array of rows of rational strings.
#[no_mangle]
pub unsafe extern "C" fn egn_matrix_to_json(
    matrix: *const EgnMatrix,
    out: *mut *mut c_char,
) -> EgnStatus {
    guarded(|| {
        let Some(m) = matrix.as_ref() else {
            return fail(EgnStatus::NullPointer, "matrix is null");
        };
        emit_string(out, serde_json::to_string(&m.0).unwrap())
    })
}

/// Number of rows; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn egn_matrix_rows(matrix: *const EgnMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.nrows())
}

/// Number of columns; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn egn_matrix_cols(matrix: *const EgnMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.ncols())
}

/// Entry (i, j) as a `"p/q"` string.
#[no_mangle]
pub unsafe extern "C" fn egn_matrix_entry(
    matrix: *const EgnMatrix,
    i: usize,
    j: usize,
    out: *mut *mut c_char,
) -> EgnStatus {
    guarded(|| {
        let Some(m) = matrix.as_ref() else {
            return fail(EgnStatus::NullPointer, "matrix is null");
        };
        if i >= m.0.nrows() || j >= m.0.ncols() {
            return fail(
                EgnStatus::BadInput,
                &format!(
                    "index ({i}, {j}) outside a {}x{} matrix",
                    m.0.nrows(),
                    m.0.ncols()
                ),
            );
        }
        emit_string(out, m.0.at(i, j).to_string())
    })
}

/// Frees a matrix handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn egn_matrix_free(matrix: *mut EgnMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Recovers the full expansion-constant table from an invariant matrix, as
/// the same JSON shape as [`egn_curve_constants_json`]. Fails with
/// `degenerate` when the linear systems are underdetermined or inconsistent.
#[no_mangle]
pub unsafe extern "C" fn egn_reconstruct_json(
    alpha: *const EgnMatrix,
    out: *mut *mut c_char,
) -> EgnStatus {
    guarded(|| {
        let Some(m) = alpha.as_ref() else {
            return fail(EgnStatus::NullPointer, "alpha is null");
        };
        match reconstruct_constants(&m.0) {
            Ok(table) => emit_string(out, serde_json::to_string(&table).unwrap()),
            Err(e) => fail(reconstruct_status(&e), &e.to_string()),
        }
    })
}

/// Shapes of the two homogeneous reconstruction systems for an invariant
/// matrix, as JSON `{"ct_hom": {...}, "acd_hom": {...}}` with fields
/// `system_id`, `num_equations`, `num_unknowns`, `solution_dim`,
/// `trivial_dim`.
#[no_mangle]
pub unsafe extern "C" fn egn_systems_json(
    alpha: *const EgnMatrix,
    out: *mut *mut c_char,
) -> EgnStatus {
    guarded(|| {
        let Some(m) = alpha.as_ref() else {
            return fail(EgnStatus::NullPointer, "alpha is null");
        };
        match homogeneous_system_dims(&m.0) {
            Ok((ct, acd)) => emit_string(
                out,
                format!(
                    "{{\"ct_hom\":{},\"acd_hom\":{}}}",
                    serde_json::to_string(&ct).unwrap(),
                    serde_json::to_string(&acd).unwrap()
                ),
            ),
            Err(e) => fail(reconstruct_status(&e), &e.to_string()),
        }
    })
}
