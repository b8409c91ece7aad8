//! C interface to `k3stab`.
//!
//! Every function returns a [`K3Status`]. Results come back through out
//! pointers; strings are NUL-terminated JSON owned by the caller and released
//! with [`k3_string_free`]. On failure [`k3_last_error_message`] describes
//! the error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use k3stab::charge::StabilityPoint;
use k3stab::enumeration::effective_candidates;
use k3stab::hall::ITable;
use k3stab::invariants::j_alpha;
use k3stab::io;
use k3stab::lattice::{MukaiVector, NsLattice, RationalDivisor};
use k3stab::walls::{compute_walls, SliceRegion, WallOptions};

/// Opaque handle to a Neron-Severi lattice.
pub struct K3Lattice {
    inner: NsLattice,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum K3Status {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(K3Status, String);

impl Failure {
    fn parse(e: impl std::fmt::Display) -> Self {
        Failure(K3Status::Parse, e.to_string())
    }
    fn domain(e: impl std::fmt::Display) -> Self {
        Failure(K3Status::Domain, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> K3Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            K3Status::Ok
        }
        Ok(Err(Failure(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            K3Status::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(K3Status::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(K3Status::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn lattice_arg<'a>(p: *const K3Lattice) -> Result<&'a NsLattice, Failure> {
    p.as_ref().map(|l| &l.inner).ok_or_else(|| Failure(K3Status::NullPointer, "lattice is null".into()))
}

unsafe fn class_arg(p: *const c_char, l: &NsLattice) -> Result<MukaiVector, Failure> {
    let v = io::class_from_json(str_arg(p, "class")?).map_err(Failure::parse)?;
    if v.l.len() != l.rank() {
        return Err(Failure::parse(format!("class {v} does not match the lattice rank {}", l.rank())));
    }
    Ok(v)
}

unsafe fn point_arg(p: *const c_char, l: &NsLattice) -> Result<StabilityPoint, Failure> {
    let (beta, omega) = io::point_from_json(str_arg(p, "point")?).map_err(Failure::parse)?;
    StabilityPoint::new(l, beta, omega).map_err(Failure::domain)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(K3Status::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(Failure::domain)?;
    *out = c.into_raw();
    Ok(())
}

/// Builds a lattice from a row-major `rank x rank` Gram matrix and
/// `epsilon` (1 for K3, 0 for abelian).
///
/// # Safety
/// `gram` must point to `rank * rank` integers and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3_lattice_new(gram: *const i64, rank: usize, epsilon: i64, out: *mut *mut K3Lattice) -> K3Status {
    guard(|| {
        if gram.is_null() || out.is_null() {
            return Err(Failure(K3Status::NullPointer, "gram or out is null".into()));
        }
        let flat = std::slice::from_raw_parts(gram, rank * rank);
        let rows = flat.chunks(rank.max(1)).map(<[i64]>::to_vec).collect();
        let inner = NsLattice::new(rows, epsilon).map_err(Failure::domain)?;
        *out = Box::into_raw(Box::new(K3Lattice { inner }));
        Ok(())
    })
}

/// Builds a lattice from `{"gram": [[..]], "epsilon": e}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k3_lattice_from_json(json: *const c_char, out: *mut *mut K3Lattice) -> K3Status {
    guard(|| {
        let s = str_arg(json, "json")?;
        if out.is_null() {
            return Err(Failure(K3Status::NullPointer, "out is null".into()));
        }
        let inner = io::lattice_from_json(s).map_err(|e| match e {
            io::IoError::Lattice(_) => Failure::domain(e),
            _ => Failure::parse(e),
        })?;
        *out = Box::into_raw(Box::new(K3Lattice { inner }));
        Ok(())
    })
}

/// # Safety
/// `lattice` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn k3_lattice_free(lattice: *mut K3Lattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Mukai pairing of two classes given as JSON.
///
/// # Safety
/// Strings must be NUL-terminated; `lattice` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn k3_mukai_pair(lattice: *const K3Lattice, v1: *const c_char, v2: *const c_char, out: *mut i64) -> K3Status {
    guard(|| {
        let l = lattice_arg(lattice)?;
        let a = class_arg(v1, l)?;
        let b = class_arg(v2, l)?;
        if out.is_null() {
            return Err(Failure(K3Status::NullPointer, "out is null".into()));
        }
        *out = l.chi_int(&a, &b).checked_neg().ok_or_else(|| Failure::domain("pairing overflows i64"))?;
        Ok(())
    })
}

/// `{"re", "im", "heart_phase"}` for a class at a point.
///
/// # Safety
/// Strings must be NUL-terminated; `lattice` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn k3_central_charge_json(
    lattice: *const K3Lattice,
    point: *const c_char,
    class: *const c_char,
    out: *mut *mut c_char,
) -> K3Status {
    guard(|| {
        let l = lattice_arg(lattice)?;
        let p = point_arg(point, l)?;
        let v = class_arg(class, l)?;
        let j = io::charge_to_json(&p, &v).map_err(Failure::domain)?;
        put_string(out, j.to_string())
    })
}

/// Walls for `class` in the rectangle `"b0,b1,t0,t1"` of the slice along
/// the first basis divisor.
///
/// # Safety
/// Strings must be NUL-terminated; `lattice` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn k3_walls_json(
    lattice: *const K3Lattice,
    class: *const c_char,
    region: *const c_char,
    out: *mut *mut c_char,
) -> K3Status {
    guard(|| {
        let l = lattice_arg(lattice)?;
        let alpha = class_arg(class, l)?;
        let r = str_arg(region, "region")?
            .split(',')
            .map(io::parse_rat)
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::parse)?;
        if r.len() != 4 {
            return Err(Failure::parse("region needs four rationals"));
        }
        let mut e = vec![0; l.rank()];
        e[0] = 1;
        let d = RationalDivisor::from_ints(&e);
        let region = SliceRegion::new(l, d.clone(), d, (r[0].clone(), r[1].clone()), (r[2].clone(), r[3].clone()))
            .map_err(Failure::domain)?;
        let ws = compute_walls(l, &region, &alpha, &WallOptions::default()).map_err(Failure::domain)?;
        put_string(out, io::walls_to_json(&ws.walls).to_string())
    })
}

/// `J^alpha` report. A null `itable` gives every class a formal symbol.
///
/// # Safety
/// Strings must be NUL-terminated (`itable` may be null); `lattice` and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn k3_jalpha_json(
    lattice: *const K3Lattice,
    point: *const c_char,
    class: *const c_char,
    itable: *const c_char,
    out: *mut *mut c_char,
) -> K3Status {
    guard(|| {
        let l = lattice_arg(lattice)?;
        let p = point_arg(point, l)?;
        let v = class_arg(class, l)?;
        let table = if itable.is_null() {
            ITable::formal(&effective_candidates(&p, &v).map_err(Failure::domain)?)
        } else {
            io::itable_from_json(str_arg(itable, "itable")?).map_err(Failure::parse)?
        };
        let r = j_alpha(&p, &v, &table).map_err(Failure::domain)?;
        put_string(out, io::report_to_json(&r, false).to_string())
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn k3_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn k3_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
