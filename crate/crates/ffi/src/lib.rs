// SPDX-License-Identifier: Apache-2.0

//! C ABI over the basespace engine.
//!
//! Every call returns a [`BsStatus`]. On anything other than `Ok` or
//! `Fails`, `bs_last_error` describes the problem until the next call on
//! the same thread. Strings returned through out-parameters belong to the
//! caller and are released with `bs_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use basespace::approach::{approaches, classify_base, limits};
use basespace::doc::Workspace;
use basespace::Error;

/// Result codes; the first five match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsStatus {
    /// Success; for a decision, the property holds.
    Ok = 0,
    Fails = 1,
    PreconditionUnmet = 2,
    Undecided = 3,
    InputError = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Named objects loaded from one JSON document.
pub struct BsWorkspace {
    inner: Workspace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> BsStatus {
    match e {
        Error::PreconditionUnmet(_) | Error::NotCsb | Error::HalvingUnmet { .. } | Error::ConvergenceNotEstablished(_) => {
            BsStatus::PreconditionUnmet
        }
        Error::PrecisionExhausted(_) => BsStatus::Undecided,
        _ => BsStatus::InputError,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<BsStatus, (BsStatus, String)>) -> BsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            BsStatus::Panic
        }
    }
}

fn engine(e: Error) -> (BsStatus, String) {
    (status_of(&e), e.to_string())
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (BsStatus, String)> {
    if p.is_null() {
        return Err((BsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (BsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NULs removed").into_raw()
}

/// The last error on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn bs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` is null or came from this library and was not freed before.
#[no_mangle]
pub unsafe extern "C" fn bs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a JSON document into a new workspace.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_workspace_load_json(json: *const c_char, out: *mut *mut BsWorkspace) -> BsStatus {
    guard(|| {
        if out.is_null() {
            return Err((BsStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        let inner = Workspace::from_json(text).map_err(engine)?;
        *out = Box::into_raw(Box::new(BsWorkspace { inner }));
        Ok(BsStatus::Ok)
    })
}

/// # Safety
/// `ws` is null or a live workspace from `bs_workspace_load_json`.
#[no_mangle]
pub unsafe extern "C" fn bs_workspace_free(ws: *mut BsWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// # Safety
/// `ws` is null or a live workspace.
unsafe fn workspace<'a>(ws: *const BsWorkspace) -> Result<&'a Workspace, (BsStatus, String)> {
    ws.as_ref()
        .map(|w| &w.inner)
        .ok_or((BsStatus::NullPointer, "workspace is null".into()))
}

/// Classifies a base: `Holds` when it is lsb (equivalently csb and sb on
/// finite spaces), `Fails` otherwise. The witness, if any, is written to
/// `witness_json` when that pointer is non-null.
///
/// # Safety
/// Pointers are null or valid; `base` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn bs_classify(ws: *const BsWorkspace, base: *const c_char, witness_json: *mut *mut c_char) -> BsStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let name = read_str(base, "base")?;
        let b = ws.base(name).map_err(engine)?;
        let verdict = classify_base(b).lsb;
        if !witness_json.is_null() {
            *witness_json = into_c(serde_json::to_string(&verdict).map_err(|e| (BsStatus::InputError, e.to_string()))?);
        }
        Ok(if verdict.holds { BsStatus::Ok } else { BsStatus::Fails })
    })
}

/// Decides whether net `from` approaches net `to` in the base declared on
/// their space.
///
/// # Safety
/// Pointers are valid; names are NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn bs_approaches(ws: *const BsWorkspace, from: *const c_char, to: *const c_char) -> BsStatus {
    guard(|| {
        let ws = workspace(ws)?;
        let (u, space) = ws.net(read_str(from, "from")?).map_err(engine)?;
        let (v, other) = ws.net(read_str(to, "to")?).map_err(engine)?;
        if space != other {
            return Err((BsStatus::InputError, "nets live on different spaces".into()));
        }
        let (_, base) = ws.base_for_space(space).map_err(engine)?;
        let verdict = approaches(u, v, base).map_err(engine)?;
        Ok(if verdict.holds { BsStatus::Ok } else { BsStatus::Fails })
    })
}

/// Writes the number of limits of `net` to `count`; `Fails` when there
/// are none.
///
/// # Safety
/// Pointers are valid; `net` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn bs_limit_count(ws: *const BsWorkspace, net: *const c_char, count: *mut usize) -> BsStatus {
    guard(|| {
        if count.is_null() {
            return Err((BsStatus::NullPointer, "count is null".into()));
        }
        let ws = workspace(ws)?;
        let (u, space) = ws.net(read_str(net, "net")?).map_err(engine)?;
        let (_, base) = ws.base_for_space(space).map_err(engine)?;
        let lim = limits(u, base).map_err(engine)?;
        *count = lim.len();
        Ok(if lim.is_empty() { BsStatus::Fails } else { BsStatus::Ok })
    })
}

/// Runs a command-line invocation given as a JSON array of arguments
/// (without the program name). The rendered report goes to `report`; the
/// status is the command's exit code.
///
/// # Safety
/// `args_json` is NUL-terminated; `report` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_run_json(args_json: *const c_char, report: *mut *mut c_char) -> BsStatus {
    guard(|| {
        if report.is_null() {
            return Err((BsStatus::NullPointer, "report is null".into()));
        }
        *report = ptr::null_mut();
        let args: Vec<String> = serde_json::from_str(read_str(args_json, "args_json")?).map_err(|e| {
            (
                BsStatus::InputError,
                format!("arguments must be a JSON array of strings: {e}"),
            )
        })?;
        let outcome = basespace::cli::run(std::iter::once("basespace".to_string()).chain(args));
        let code = outcome.code();
        *report = into_c(outcome.text);
        Ok(match code {
            0 => BsStatus::Ok,
            1 => BsStatus::Fails,
            2 => BsStatus::PreconditionUnmet,
            3 => BsStatus::Undecided,
            _ => BsStatus::InputError,
        })
    })
}

/// The library version, statically allocated.
#[no_mangle]
pub extern "C" fn bs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
