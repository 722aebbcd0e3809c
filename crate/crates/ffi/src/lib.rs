//! C ABI over `bifol-core`. Scenes go in and reports come out as JSON
//! strings; every string returned to the caller is released with
//! [`bifol_string_free`] and every handle with [`bifol_scene_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use bifol_core::cli::{render_scene, run_checks, validate_scene, CliError};
use bifol_core::scene::{load_str, Loaded};

/// Result codes of every fallible call.
#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BifolStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    SchemaError = 4,
    UnknownCheck = 5,
    UnknownTarget = 6,
    Failed = 7,
}

/// A loaded scene. Opaque to C.
pub struct BifolComplex {
    text: String,
    loaded: Loaded,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &CliError) -> BifolStatus {
    match e.kind() {
        "ParseError" => BifolStatus::ParseError,
        "SchemaError" => BifolStatus::SchemaError,
        "UnknownCheck" => BifolStatus::UnknownCheck,
        "UnknownTarget" => BifolStatus::UnknownTarget,
        _ => BifolStatus::Failed,
    }
}

fn fail(e: CliError) -> BifolStatus {
    set_error(&e.to_string());
    status_of(&e)
}

/// # Safety
/// `s` is null or a valid nul-terminated string.
unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, BifolStatus> {
    if s.is_null() {
        set_error("null argument");
        return Err(BifolStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not UTF-8");
        BifolStatus::InvalidUtf8
    })
}

/// # Safety
/// `out` is null or valid for one pointer write.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> BifolStatus {
    if out.is_null() {
        set_error("null output pointer");
        return BifolStatus::NullArgument;
    }
    *out = CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw();
    BifolStatus::Ok
}

/// Parses and resolves a scene. On success `*out` owns a new handle.
///
/// # Safety
/// `json` is a nul-terminated string; `out` is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn bifol_scene_load(json: *const c_char, out: *mut *mut BifolComplex) -> BifolStatus {
    let text = match str_arg(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    if out.is_null() {
        set_error("null output pointer");
        return BifolStatus::NullArgument;
    }
    match load_str(text) {
        Ok(loaded) => {
            *out = Box::into_raw(Box::new(BifolComplex { text: text.to_string(), loaded }));
            BifolStatus::Ok
        }
        Err(e) => fail(e.into()),
    }
}

/// # Safety
/// `h` is null or a handle from [`bifol_scene_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bifol_scene_free(h: *mut BifolComplex) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of leaves in the scene's complex; 0 for a null handle.
///
/// # Safety
/// `h` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bifol_leaf_count(h: *const BifolComplex) -> usize {
    h.as_ref().map_or(0, |h| h.loaded.complex.leaves.len())
}

/// Validation report as JSON.
///
/// # Safety
/// `h` is a live handle; `out` is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn bifol_validate(h: *const BifolComplex, out: *mut *mut c_char) -> BifolStatus {
    let Some(h) = h.as_ref() else {
        set_error("null handle");
        return BifolStatus::NullArgument;
    };
    match validate_scene(&h.text) {
        Ok(r) => put_string(out, r.to_json()),
        Err(e) => fail(e),
    }
}

/// Runs comma-separated checks, or the scene's expectations if `checks` is
/// null, and writes the report JSON.
///
/// # Safety
/// `h` is a live handle; `checks` is null or a nul-terminated string; `out`
/// is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn bifol_run(h: *const BifolComplex, checks: *const c_char, out: *mut *mut c_char) -> BifolStatus {
    let Some(h) = h.as_ref() else {
        set_error("null handle");
        return BifolStatus::NullArgument;
    };
    let names: Vec<String> = if checks.is_null() {
        Vec::new()
    } else {
        match str_arg(checks) {
            Ok(s) => s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect(),
            Err(s) => return s,
        }
    };
    match run_checks(&h.text, &names, None) {
        Ok(r) => put_string(out, r.to_json()),
        Err(e) => fail(e),
    }
}

/// SVG for `target` (`orbit` or `cylinder`).
///
/// # Safety
/// `h` is a live handle; `target` is a nul-terminated string; `out` is
/// valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn bifol_render(h: *const BifolComplex, target: *const c_char, out: *mut *mut c_char) -> BifolStatus {
    let Some(h) = h.as_ref() else {
        set_error("null handle");
        return BifolStatus::NullArgument;
    };
    let target = match str_arg(target) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match render_scene(&h.text, target, None, &[]) {
        Ok(svg) => put_string(out, svg),
        Err(e) => fail(e),
    }
}

/// # Safety
/// `s` is null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bifol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread. Valid until the next call
/// on the same thread; never null.
#[no_mangle]
pub extern "C" fn bifol_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[cfg(test)]
mod tests {
    use std::ptr;

    use super::*;

    fn scene_text(name: &str) -> CString {
        let s = bifol_core::scene::corpus_scenes().into_iter().find(|(n, _)| n == name).unwrap().1;
        CString::new(bifol_core::scene::to_json(&s)).unwrap()
    }

    unsafe fn take(s: *mut c_char) -> String {
        let out = CStr::from_ptr(s).to_str().unwrap().to_string();
        bifol_string_free(s);
        out
    }

    #[test]
    fn load_run_render_free() {
        unsafe {
            let text = scene_text("fig20");
            let mut h = ptr::null_mut();
            assert_eq!(bifol_scene_load(text.as_ptr(), &mut h), BifolStatus::Ok);
            assert!(bifol_leaf_count(h) > 20);
            let mut out = ptr::null_mut();
            let checks = CString::new("cross,flow-circles-differ").unwrap();
            assert_eq!(bifol_run(h, checks.as_ptr(), &mut out), BifolStatus::Ok);
            let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
            assert_eq!(report["expectationsMet"], true);
            let orbit = CString::new("orbit").unwrap();
            assert_eq!(bifol_render(h, orbit.as_ptr(), &mut out), BifolStatus::Ok);
            assert!(take(out).starts_with("<svg"));
            bifol_scene_free(h);
        }
    }

    #[test]
    fn errors_map_to_codes() {
        unsafe {
            let mut h = ptr::null_mut();
            let bad = CString::new("{").unwrap();
            assert_eq!(bifol_scene_load(bad.as_ptr(), &mut h), BifolStatus::ParseError);
            assert!(!CStr::from_ptr(bifol_last_error()).to_bytes().is_empty());
            assert_eq!(bifol_scene_load(ptr::null(), &mut h), BifolStatus::NullArgument);
            let text = scene_text("triv3");
            assert_eq!(bifol_scene_load(text.as_ptr(), &mut h), BifolStatus::Ok);
            let mut out = ptr::null_mut();
            let check = CString::new("bogus").unwrap();
            assert_eq!(bifol_run(h, check.as_ptr(), &mut out), BifolStatus::UnknownCheck);
            let torus = CString::new("torus").unwrap();
            assert_eq!(bifol_render(h, torus.as_ptr(), &mut out), BifolStatus::UnknownTarget);
            assert_eq!(bifol_validate(ptr::null(), &mut out), BifolStatus::NullArgument);
            bifol_scene_free(h);
        }
    }
}
