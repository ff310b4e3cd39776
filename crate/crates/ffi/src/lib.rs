//! C ABI over `branescope`. Objects cross the boundary as opaque handles;
//! every fallible call returns a `BsStatus` and writes results through out
//! pointers. The message for the most recent failure on the calling thread
//! is available from `bs_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use branescope::branes::{Brane, HypersurfaceModel};
use branescope::{Error, LatticePolytope, PolytopeDocument, TorusDivisor};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NonReflexive = 3,
    Domain = 4,
    GenericityFailure = 5,
    Numeric = 6,
    Panic = 7,
}

/// A lattice polytope.
pub struct BsPolytope {
    inner: LatticePolytope,
}

/// A generic anticanonical hypersurface in the toric variety of a reflexive
/// polytope.
pub struct BsHypersurface {
    inner: HypersurfaceModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BsStatus {
    match e {
        Error::NonReflexive => BsStatus::NonReflexive,
        Error::DegeneratePolytope { .. }
        | Error::UnsupportedDimension(_)
        | Error::NonSimplicialFan { .. }
        | Error::NotCartier { .. }
        | Error::NotInTorus(_)
        | Error::NotASubcomplex
        | Error::Overflow(_) => BsStatus::Domain,
        Error::GenericityFailure { .. } => BsStatus::GenericityFailure,
        Error::NumericalInstability(_) | Error::ScanExhausted { .. } | Error::RegionNotCertified(_) => {
            BsStatus::Numeric
        }
        Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) => BsStatus::InvalidInput,
    }
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (BsStatus, String)>) -> BsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BsStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (BsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BsStatus, String) {
    (BsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (BsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (BsStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn read_i64s<'a>(p: *const i64, len: usize, what: &str) -> Result<&'a [i64], (BsStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn bs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse a polytope document `{"name", "dim", "vertices"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_polytope_from_json(json: *const c_char, out: *mut *mut BsPolytope) -> BsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let doc = PolytopeDocument::from_json(text).map_err(lib_err)?;
        let inner = doc.to_polytope().map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BsPolytope { inner }));
        Ok(())
    })
}

/// Convex hull of `count` points of dimension `dim`, stored row-major.
///
/// # Safety
/// `coords` must point to `count * dim` integers and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_polytope_from_vertices(
    coords: *const i64,
    count: usize,
    dim: usize,
    out: *mut *mut BsPolytope,
) -> BsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if dim == 0 {
            return Err((BsStatus::InvalidInput, "dimension must be positive".into()));
        }
        let total = count
            .checked_mul(dim)
            .ok_or((BsStatus::InvalidInput, "coordinate count overflows".into()))?;
        let flat = read_i64s(coords, total, "coords")?;
        let points: Vec<Vec<i64>> = flat.chunks(dim).map(<[i64]>::to_vec).collect();
        let inner = LatticePolytope::from_vertices(&points).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BsPolytope { inner }));
        Ok(())
    })
}

/// # Safety
/// `p` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn bs_polytope_free(p: *mut BsPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_polytope_dim(p: *const BsPolytope) -> usize {
    p.as_ref().map_or(0, |p| p.inner.dim())
}

/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_polytope_is_reflexive(p: *const BsPolytope, out: *mut bool) -> BsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytope"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = p.inner.is_reflexive();
        Ok(())
    })
}

/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_polytope_lattice_point_count(p: *const BsPolytope, out: *mut usize) -> BsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytope"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = p.inner.lattice_points().len();
        Ok(())
    })
}

/// Generic anticanonical hypersurface with coefficients drawn from `seed`.
/// The polytope handle may be freed afterwards.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_hypersurface_new(
    p: *const BsPolytope,
    seed: u64,
    out: *mut *mut BsHypersurface,
) -> BsStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytope"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = HypersurfaceModel::new(&p.inner, seed).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BsHypersurface { inner }));
        Ok(())
    })
}

/// # Safety
/// `h` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn bs_hypersurface_free(h: *mut BsHypersurface) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of torus-invariant prime divisors, i.e. the divisor length.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_hypersurface_ray_count(h: *const BsHypersurface) -> usize {
    h.as_ref().map_or(0, |h| h.inner.ray_count())
}

/// Dimension of the hypersurface, which is one less than the ambient one.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_hypersurface_dim(h: *const BsHypersurface) -> usize {
    h.as_ref().map_or(0, |h| h.inner.dim() - 1)
}

/// Writes `h^q(Y, O_Y(E))` for `q = 0 .. out_len - 1`. `out_len` must equal
/// `bs_hypersurface_dim(h) + 1`.
///
/// # Safety
/// `divisor` must point to `len` integers and `out` to `out_len` slots.
#[no_mangle]
pub unsafe extern "C" fn bs_hypersurface_cohomology(
    h: *const BsHypersurface,
    divisor: *const i64,
    len: usize,
    out: *mut usize,
    out_len: usize,
) -> BsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("hypersurface"))?;
        let d = read_i64s(divisor, len, "divisor")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let dims = h
            .inner
            .hypersurface_cohomology(&TorusDivisor(d.to_vec()))
            .map_err(lib_err)?;
        if dims.len() != out_len {
            return Err((
                BsStatus::InvalidInput,
                format!("output buffer holds {out_len} values, need {}", dims.len()),
            ));
        }
        std::slice::from_raw_parts_mut(out, out_len).copy_from_slice(&dims);
        Ok(())
    })
}

/// Ext table between two branes as JSON. Branes use the textual form
/// `a1,...,ar@shift;...`. The returned string must be released with
/// `bs_string_free`.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_hypersurface_ext_json(
    h: *const BsHypersurface,
    a: *const c_char,
    b: *const c_char,
    out: *mut *mut c_char,
) -> BsStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("hypersurface"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let parse = |s: &str| -> Result<Brane, (BsStatus, String)> {
            let brane = Brane::parse(s).map_err(lib_err)?;
            h.inner.check_brane(&brane).map_err(lib_err)?;
            Ok(brane)
        };
        let a = parse(read_str(a, "a")?)?;
        let b = parse(read_str(b, "b")?)?;
        let table = h.inner.ext_table(&a, &b).map_err(lib_err)?;
        let json = serde_json::to_string(&table).map_err(|e| lib_err(e.into()))?;
        *out = CString::new(json).expect("JSON has no interior nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
