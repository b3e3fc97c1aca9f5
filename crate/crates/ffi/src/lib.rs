//! C ABI for the `wompolar` codec.
//!
//! Every function returns a [`WomStatus`]. On a status other than `WOM_STATUS_OK` the
//! thread's last error message is set and can be read with
//! [`wom_last_error_message`]. Bit buffers hold one bit per byte, each
//! byte 0 or 1. Sets are opaque [`WomSet`] handles released with
//! [`wom_set_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wompolar::codec::{decode, encode, EncodeOptions, FrozenRule};
use wompolar::construct::{construct, HighEntropySet, Method, SelectionMode};
use wompolar::{entropy, polar_transform, BitSequence, SourceModel, WomError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    Io = 4,
    Parse = 5,
    EncodeFailed = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WomMethod {
    Exact = 0,
    MonteCarlo = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WomMode {
    /// `value` is the largest admitted deviation from uniform.
    Threshold = 0,
    /// `value` is the targeted fraction of capacity.
    TargetRate = 1,
}

/// Opaque handle to a high-entropy index set.
pub struct WomSet {
    inner: HighEntropySet,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(WomStatus, String);

impl From<WomError> for Failure {
    fn from(e: WomError) -> Self {
        let status = match &e {
            WomError::LengthMismatch { .. } => WomStatus::LengthMismatch,
            WomError::Io { .. } => WomStatus::Io,
            WomError::BitParse(_)
            | WomError::SetFile(_)
            | WomError::VersionMismatch { .. }
            | WomError::Json(_) => WomStatus::Parse,
            _ => WomStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: WomStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> WomStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            WomStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            WomStatus::Panic
        }
    }
}

unsafe fn bits_from<'a>(ptr: *const u8, len: usize, what: &str) -> Result<&'a [u8], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return fail(WomStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn bits_from_mut<'a>(ptr: *mut u8, len: usize, what: &str) -> Result<&'a mut [u8], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return fail(WomStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn set_ref<'a>(set: *const WomSet) -> Result<&'a HighEntropySet, Failure> {
    match set.as_ref() {
        Some(s) => Ok(&s.inner),
        None => fail(WomStatus::NullPointer, "set handle is null"),
    }
}

unsafe fn path_from(path: *const c_char) -> Result<String, Failure> {
    if path.is_null() {
        return fail(WomStatus::NullPointer, "path is null");
    }
    match CStr::from_ptr(path).to_str() {
        Ok(s) => Ok(s.to_owned()),
        Err(_) => fail(WomStatus::InvalidArgument, "path is not valid UTF-8"),
    }
}

fn write_out(out: &mut [u8], bits: &BitSequence, what: &str) -> Result<(), Failure> {
    if out.len() != bits.len() {
        return fail(
            WomStatus::BufferTooSmall,
            format!(
                "{what} buffer holds {} bits, need {}",
                out.len(),
                bits.len()
            ),
        );
    }
    out.copy_from_slice(bits.as_slice());
    Ok(())
}

/// Builds a set for block length `2^log_n`. `method` is a [`WomMethod`] and
/// `mode` a [`WomMode`] value; `samples` is ignored for the exact method.
/// On success `*out` owns a new handle.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn wom_set_construct(
    log_n: u32,
    s: f64,
    t: f64,
    method: u32,
    samples: u64,
    seed: u64,
    mode: u32,
    value: f64,
    out: *mut *mut WomSet,
) -> WomStatus {
    guard(|| {
        if out.is_null() {
            return fail(WomStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        if log_n > 24 {
            return fail(
                WomStatus::InvalidArgument,
                format!("log_n must be at most 24, got {log_n}"),
            );
        }
        let model = SourceModel::new(s, t)?;
        let method = match method {
            m if m == WomMethod::Exact as u32 => Method::Exact,
            m if m == WomMethod::MonteCarlo as u32 => Method::MonteCarlo,
            m => return fail(WomStatus::InvalidArgument, format!("unknown method {m}")),
        };
        let mode = match mode {
            m if m == WomMode::Threshold as u32 => SelectionMode::Threshold(value),
            m if m == WomMode::TargetRate as u32 => SelectionMode::TargetRate(value),
            m => return fail(WomStatus::InvalidArgument, format!("unknown mode {m}")),
        };
        let inner = construct(&model, 1usize << log_n, method, samples, seed, mode)?;
        *out = Box::into_raw(Box::new(WomSet { inner }));
        Ok(())
    })
}

/// Loads a JSON set file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wom_set_load(path: *const c_char, out: *mut *mut WomSet) -> WomStatus {
    guard(|| {
        if out.is_null() {
            return fail(WomStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let inner = HighEntropySet::load(path_from(path)?)?;
        *out = Box::into_raw(Box::new(WomSet { inner }));
        Ok(())
    })
}

/// Writes the set as JSON.
///
/// # Safety
/// `set` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wom_set_save(set: *const WomSet, path: *const c_char) -> WomStatus {
    guard(|| {
        let set = set_ref(set)?;
        set.save(path_from(path)?)?;
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `set` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wom_set_free(set: *mut WomSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Block length `N`, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wom_set_block_len(set: *const WomSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len)
}

/// Message length `|F|`, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wom_set_message_len(set: *const WomSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.message_len())
}

/// Copies the sorted message indices into `out`, which must hold exactly
/// `wom_set_message_len(set)` entries.
///
/// # Safety
/// `set` must be a live handle and `out` valid for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn wom_set_indices(
    set: *const WomSet,
    out: *mut usize,
    out_len: usize,
) -> WomStatus {
    guard(|| {
        let set = set_ref(set)?;
        if out_len != set.indices.len() {
            return fail(
                WomStatus::BufferTooSmall,
                format!("index buffer holds {out_len}, need {}", set.indices.len()),
            );
        }
        if out_len > 0 {
            if out.is_null() {
                return fail(WomStatus::NullPointer, "out is null");
            }
            std::slice::from_raw_parts_mut(out, out_len).copy_from_slice(&set.indices);
        }
        Ok(())
    })
}

/// Encodes `message` over `state` into `codeword` (all of length `N` except
/// the message, of length `|F|`). `greedy` nonzero fills the remaining
/// indices with the likelier bit. Returns `WOM_STATUS_ENCODE_FAILED` when
/// every attempt fails; `*attempts` (if non-null) receives the attempt count.
///
/// # Safety
/// Buffers must be valid for their stated lengths; `set` must be live.
#[no_mangle]
pub unsafe extern "C" fn wom_encode(
    set: *const WomSet,
    state: *const u8,
    state_len: usize,
    message: *const u8,
    message_len: usize,
    seed: u64,
    max_attempts: u32,
    greedy: i32,
    codeword: *mut u8,
    codeword_len: usize,
    attempts: *mut u32,
) -> WomStatus {
    guard(|| {
        let set = set_ref(set)?;
        let y = BitSequence::new(bits_from(state, state_len, "state")?.to_vec())?;
        let v = BitSequence::new(bits_from(message, message_len, "message")?.to_vec())?;
        let out = bits_from_mut(codeword, codeword_len, "codeword")?;
        if max_attempts == 0 {
            return fail(
                WomStatus::InvalidArgument,
                "max_attempts must be at least 1",
            );
        }
        let options = EncodeOptions {
            max_attempts,
            rule: if greedy != 0 {
                FrozenRule::Greedy
            } else {
                FrozenRule::Sample
            },
        };
        let outcome = encode(&set.model()?, set, &y, &v, seed, options)?;
        if !attempts.is_null() {
            *attempts = outcome.attempts;
        }
        match outcome.result {
            Ok(x) => write_out(out, &x, "codeword"),
            Err(f) => fail(WomStatus::EncodeFailed, f.to_string()),
        }
    })
}

/// Reads the message (length `|F|`) from a codeword (length `N`).
///
/// # Safety
/// Buffers must be valid for their stated lengths; `set` must be live.
#[no_mangle]
pub unsafe extern "C" fn wom_decode(
    set: *const WomSet,
    codeword: *const u8,
    codeword_len: usize,
    message: *mut u8,
    message_len: usize,
) -> WomStatus {
    guard(|| {
        let set = set_ref(set)?;
        let x = BitSequence::new(bits_from(codeword, codeword_len, "codeword")?.to_vec())?;
        let v = decode(&x, set)?;
        write_out(
            bits_from_mut(message, message_len, "message")?,
            &v,
            "message",
        )
    })
}

/// Applies `G_N` in place; `len` must be a power of two.
///
/// # Safety
/// `bits` must be valid for `len` reads and writes.
#[no_mangle]
pub unsafe extern "C" fn wom_polar_transform(bits: *mut u8, len: usize) -> WomStatus {
    guard(|| {
        let buf = bits_from_mut(bits, len, "bits")?;
        let u = polar_transform(&BitSequence::new(buf.to_vec())?)?;
        buf.copy_from_slice(u.as_slice());
        Ok(())
    })
}

/// Binary entropy of `p` in bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wom_entropy(p: f64, out: *mut f64) -> WomStatus {
    guard(|| {
        if out.is_null() {
            return fail(WomStatus::NullPointer, "out is null");
        }
        *out = entropy(p)?;
        Ok(())
    })
}

/// Message for the last call on this thread; empty after a success. The
/// pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn wom_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
