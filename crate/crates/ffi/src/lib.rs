//! C ABI over the betweenness core.
//!
//! Objects are opaque heap handles created by `*_from_json` or by an
//! operation and released by the matching `*_free`. Every entry point
//! returns a [`BwStatus`]; on anything but `BW_OK`/`BW_FALSE` a message is
//! kept for the calling thread until its next failing call and is read with
//! [`bw_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use betweenness::exactgeom::{self, Point};
use betweenness::folang::{eval_sentence, parse_with_constants, FiniteStructure};
use betweenness::frames::{
    extract_torus, relevant_closure, synthesize_frame, validate_frame, FiniteCartesianFrame,
};
use betweenness::tiling::{Labelling, TileSet};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BwStatus {
    /// Success, or the queried property holds.
    BwOk = 0,
    /// The queried property does not hold.
    BwFalse = 1,
    BwNullPointer = 2,
    BwInvalidUtf8 = 3,
    /// Malformed input text or JSON.
    BwParse = 4,
    /// Well-formed input the operation rejects.
    BwInvalid = 5,
    BwPanic = 6,
}

pub struct BwTileSet(TileSet);
pub struct BwLabelling(Labelling);
pub struct BwFrame(FiniteCartesianFrame);
pub struct BwStructure(FiniteStructure);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(BwStatus, String);

type Outcome = Result<BwStatus, Failure>;

fn fail<E: std::fmt::Display>(status: BwStatus) -> impl FnOnce(E) -> Failure {
    move |e| Failure(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Outcome) -> BwStatus {
    let (status, message) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => return status,
        Ok(Err(Failure(status, message))) => (status, message),
        Err(_) => (BwStatus::BwPanic, "internal panic".to_string()),
    };
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
    status
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(BwStatus::BwNullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(fail(BwStatus::BwInvalidUtf8))
}

/// # Safety
/// `p` is null or points to a live `T`.
unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(BwStatus::BwNullPointer, "null handle".into()))
}

/// # Safety
/// `out` is null or writable.
unsafe fn put<T>(out: *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(Failure(BwStatus::BwNullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(BwStatus::BwOk)
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(fail(BwStatus::BwInvalid))
}

/// The calling thread's last error message; empty if none. Valid until the
/// thread's next failing call.
#[no_mangle]
pub extern "C" fn bw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// β(s, t, u) for points written `(x,y,…)` with rational coordinates.
///
/// # Safety
/// String arguments are valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn bw_between(
    s: *const c_char,
    t: *const c_char,
    u: *const c_char,
) -> BwStatus {
    guard(|| {
        let p = |x| -> Result<Point, Failure> { text(x)?.parse().map_err(fail(BwStatus::BwParse)) };
        let holds = exactgeom::between(&p(s)?, &p(t)?, &p(u)?).map_err(fail(BwStatus::BwInvalid))?;
        Ok(if holds { BwStatus::BwOk } else { BwStatus::BwFalse })
    })
}

/// # Safety
/// `json` is a valid NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bw_tileset_from_json(json: *const c_char, out: *mut *mut BwTileSet) -> BwStatus {
    guard(|| {
        let s = TileSet::from_json(text(json)?).map_err(fail(BwStatus::BwParse))?;
        put(out, boxed(BwTileSet(s)))
    })
}

/// # Safety
/// `p` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn bw_tileset_free(p: *mut BwTileSet) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Labelling JSON refers to tiles by position in `tiles`.
///
/// # Safety
/// `tiles` is a live handle, `json` a valid string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_labelling_from_json(
    tiles: *const BwTileSet,
    json: *const c_char,
    out: *mut *mut BwLabelling,
) -> BwStatus {
    guard(|| {
        let s = &handle(tiles)?.0;
        let l = Labelling::from_json(text(json)?, s).map_err(fail(BwStatus::BwParse))?;
        put(out, boxed(BwLabelling(l)))
    })
}

/// # Safety
/// `l` and `tiles` are live handles; `out` is writable. The string written
/// to `out` is released with [`bw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bw_labelling_to_json(
    l: *const BwLabelling,
    tiles: *const BwTileSet,
    out: *mut *mut c_char,
) -> BwStatus {
    guard(|| {
        let json = handle(l)?.0.to_json(&handle(tiles)?.0).map_err(fail(BwStatus::BwInvalid))?;
        put(out, owned_string(json)?)
    })
}

/// # Safety
/// `p` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn bw_labelling_free(p: *mut BwLabelling) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `json` is a valid NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bw_frame_from_json(json: *const c_char, out: *mut *mut BwFrame) -> BwStatus {
    guard(|| {
        let f = FiniteCartesianFrame::from_json(text(json)?).map_err(fail(BwStatus::BwParse))?;
        put(out, boxed(BwFrame(f)))
    })
}

/// # Safety
/// `f` is a live handle; `out` is writable. Release the string with
/// [`bw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bw_frame_to_json(f: *const BwFrame, out: *mut *mut c_char) -> BwStatus {
    guard(|| put(out, owned_string(handle(f)?.0.to_json())?))
}

/// The S-labelled frame of a labelled torus.
///
/// # Safety
/// `tiles` and `l` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bw_frame_synthesize(
    tiles: *const BwTileSet,
    l: *const BwLabelling,
    out: *mut *mut BwFrame,
) -> BwStatus {
    guard(|| {
        let (s, l) = (&handle(tiles)?.0, &handle(l)?.0);
        let f = synthesize_frame(l.m(), l.n(), l, s).map_err(fail(BwStatus::BwInvalid))?;
        put(out, boxed(BwFrame(f)))
    })
}

/// Writes the number of violations; `BW_OK` iff there are none.
///
/// # Safety
/// `f` and `tiles` are live handles; `count` is writable.
#[no_mangle]
pub unsafe extern "C" fn bw_frame_validate(
    f: *const BwFrame,
    tiles: *const BwTileSet,
    count: *mut usize,
) -> BwStatus {
    guard(|| {
        let v = validate_frame(&handle(f)?.0, &handle(tiles)?.0);
        put(count, v.len())?;
        Ok(if v.is_empty() { BwStatus::BwOk } else { BwStatus::BwFalse })
    })
}

/// # Safety
/// `f` and `tiles` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bw_frame_extract(
    f: *const BwFrame,
    tiles: *const BwTileSet,
    out: *mut *mut BwLabelling,
) -> BwStatus {
    guard(|| {
        let (_, l) = extract_torus(&handle(f)?.0, &handle(tiles)?.0).map_err(fail(BwStatus::BwInvalid))?;
        put(out, boxed(BwLabelling(l)))
    })
}

/// The relevant closure as a structure.
///
/// # Safety
/// `f` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bw_frame_closure(f: *const BwFrame, out: *mut *mut BwStructure) -> BwStatus {
    guard(|| {
        let c = relevant_closure(&handle(f)?.0).map_err(fail(BwStatus::BwInvalid))?;
        put(out, boxed(BwStructure(c.structure)))
    })
}

/// # Safety
/// `p` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn bw_frame_free(p: *mut BwFrame) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `json` is a valid NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bw_structure_from_json(json: *const c_char, out: *mut *mut BwStructure) -> BwStatus {
    guard(|| {
        let s = FiniteStructure::from_json(text(json)?).map_err(fail(BwStatus::BwParse))?;
        put(out, boxed(BwStructure(s)))
    })
}

/// # Safety
/// `p` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn bw_structure_free(p: *mut BwStructure) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Evaluates a sentence on `s`; names of `s`'s constants parse as
/// constants. `BW_OK` if it holds, `BW_FALSE` if not.
///
/// # Safety
/// `s` is a live handle; `formula` is a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bw_model_check(s: *const BwStructure, formula: *const c_char) -> BwStatus {
    guard(|| {
        let s = &handle(s)?.0;
        let constants = s.constants().keys().cloned().collect();
        let f = parse_with_constants(text(formula)?, &constants).map_err(fail(BwStatus::BwParse))?;
        let holds = eval_sentence(s, &f).map_err(fail(BwStatus::BwInvalid))?;
        Ok(if holds { BwStatus::BwOk } else { BwStatus::BwFalse })
    })
}

/// γ_S for `tiles`, as formula text. Release with [`bw_string_free`].
///
/// # Safety
/// `tiles` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bw_reduction_sentence_torus(tiles: *const BwTileSet, out: *mut *mut c_char) -> BwStatus {
    guard(|| {
        let f = betweenness::defgen::reduction_sentence_torus(&handle(tiles)?.0)
            .map_err(fail(BwStatus::BwInvalid))?;
        put(out, owned_string(f.to_string())?)
    })
}
