//! C ABI over the coarse-ext library.
//!
//! Conventions: handles are opaque pointers created and freed here; every
//! fallible call returns a [`CoarseStatus`] and writes results through out
//! pointers; the last error message is kept per thread and read back with
//! [`coarse_last_error_message`]. Panics are caught at the boundary and
//! reported as `COARSE_STATUS_PANIC`. The companion header lives in
//! `include/coarse_ext.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use coarse_ext::asdim::verify_ostrand;
use coarse_ext::cover::{brick_cover_grid, brick_cover_line, ColoredCover, Cover, LebValue};
use coarse_ext::io;
use coarse_ext::metric::FiniteMetricSpace;

/// Status codes shared with the C header.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoarseStatus {
    Ok = 0,
    VerificationFailed = 1,
    InvalidInput = 2,
    NullPointer = 3,
    Utf8 = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).unwrap_or_default();
    });
}

fn guard<F: FnOnce() -> CoarseStatus>(f: F) -> CoarseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let detail = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic at the FFI boundary".into());
            set_error(detail);
            CoarseStatus::Panic
        }
    }
}

/// Opaque space handle.
pub struct CoarseSpace {
    inner: Arc<FiniteMetricSpace>,
}

/// Opaque cover handle; keeps the optional family structure from the file.
pub struct CoarseCover {
    cover: Cover,
    families: Option<Vec<Vec<usize>>>,
    r: Option<f64>,
}

impl CoarseCover {
    fn colored(&self) -> Result<ColoredCover, String> {
        let families = self
            .families
            .clone()
            .ok_or_else(|| "cover carries no families".to_string())?;
        let r = self.r.ok_or_else(|| "cover carries no scale r".to_string())?;
        ColoredCover::new(self.cover.clone(), families, r).map_err(|e| e.to_string())
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, CoarseStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(CoarseStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        CoarseStatus::Utf8
    })
}

/// Copies the last error message of this thread into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns the full length in
/// bytes, excluding the terminator.
///
/// # Safety
/// `buf` must hold `len` bytes when non-null.
#[no_mangle]
pub unsafe extern "C" fn coarse_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn coarse_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

// ---------- spaces ----------

/// Space from a JSON space file (see the library README for the schema).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coarse_space_from_json(
    json: *const c_char,
    out: *mut *mut CoarseSpace,
) -> CoarseStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return CoarseStatus::NullPointer;
        }
        let text = match unsafe { cstr(json) } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let value: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                set_error(format!("invalid JSON: {e}"));
                return CoarseStatus::InvalidInput;
            }
        };
        match io::space_from_value(&value) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(CoarseSpace { inner })) };
                CoarseStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                CoarseStatus::InvalidInput
            }
        }
    })
}

/// Space from a row-major n x n distance matrix; the metric axioms are
/// verified exhaustively and violations are rejected.
///
/// # Safety
/// `values` must point to `n * n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_space_from_matrix(
    values: *const f64,
    n: usize,
    out: *mut *mut CoarseSpace,
) -> CoarseStatus {
    guard(|| {
        if values.is_null() || out.is_null() {
            set_error("null pointer");
            return CoarseStatus::NullPointer;
        }
        let flat = unsafe { std::slice::from_raw_parts(values, n * n) };
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| flat[i * n..(i + 1) * n].to_vec())
            .collect();
        match FiniteMetricSpace::from_distance_matrix(None, &matrix) {
            Ok(space) => {
                unsafe {
                    *out = Box::into_raw(Box::new(CoarseSpace { inner: space.into_arc() }))
                };
                CoarseStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                CoarseStatus::InvalidInput
            }
        }
    })
}

/// The integer interval [start, end] with the line metric.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_space_interval(
    start: i64,
    end: i64,
    out: *mut *mut CoarseSpace,
) -> CoarseStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return CoarseStatus::NullPointer;
        }
        match FiniteMetricSpace::interval(start, end) {
            Ok(space) => {
                unsafe {
                    *out = Box::into_raw(Box::new(CoarseSpace { inner: space.into_arc() }))
                };
                CoarseStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                CoarseStatus::InvalidInput
            }
        }
    })
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn coarse_space_point_count(space: *const CoarseSpace) -> usize {
    if space.is_null() {
        return 0;
    }
    unsafe { &*space }.inner.len()
}

/// Distance between two point indices.
///
/// # Safety
/// `space` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_space_distance(
    space: *const CoarseSpace,
    i: usize,
    j: usize,
    out: *mut f64,
) -> CoarseStatus {
    guard(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer");
            return CoarseStatus::NullPointer;
        }
        let inner = &unsafe { &*space }.inner;
        if i >= inner.len() || j >= inner.len() {
            set_error(format!("point index out of range: ({i}, {j}) in a {}-point space", inner.len()));
            return CoarseStatus::InvalidInput;
        }
        unsafe { *out = inner.dist(i, j) };
        CoarseStatus::Ok
    })
}

/// Truncates distances above `m` (micro transform); writes a new handle.
///
/// # Safety
/// `space` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_space_micro(
    space: *const CoarseSpace,
    m: f64,
    out: *mut *mut CoarseSpace,
) -> CoarseStatus {
    unsafe { transform(space, m, out, true) }
}

/// Raises nonzero distances below `m` (macro transform); writes a new handle.
///
/// # Safety
/// `space` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_space_macro(
    space: *const CoarseSpace,
    m: f64,
    out: *mut *mut CoarseSpace,
) -> CoarseStatus {
    unsafe { transform(space, m, out, false) }
}

unsafe fn transform(
    space: *const CoarseSpace,
    m: f64,
    out: *mut *mut CoarseSpace,
    micro: bool,
) -> CoarseStatus {
    guard(|| {
        if space.is_null() || out.is_null() {
            set_error("null pointer");
            return CoarseStatus::NullPointer;
        }
        let inner = &unsafe { &*space }.inner;
        let result = if micro { inner.micro_version(m) } else { inner.macro_version(m) };
        match result {
            Ok(space) => {
                unsafe {
                    *out = Box::into_raw(Box::new(CoarseSpace { inner: space.into_arc() }))
                };
                CoarseStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                CoarseStatus::InvalidInput
            }
        }
    })
}

/// Frees a space handle; null is allowed.
///
/// # Safety
/// `space` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn coarse_space_free(space: *mut CoarseSpace) {
    if !space.is_null() {
        drop(unsafe { Box::from_raw(space) });
    }
}

// ---------- covers ----------

/// Cover from a JSON cover file with an inline space.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_cover_from_json(
    json: *const c_char,
    out: *mut *mut CoarseCover,
) -> CoarseStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return CoarseStatus::NullPointer;
        }
        let text = match unsafe { cstr(json) } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let dir = std::env::temp_dir().join("coarse_ext_ffi_cover.json");
        if let Err(e) = std::fs::write(&dir, text) {
            set_error(format!("cannot stage cover JSON: {e}"));
            return CoarseStatus::InvalidInput;
        }
        match io::load_cover(&dir, None) {
            Ok(loaded) => {
                let handle = CoarseCover {
                    cover: loaded.cover,
                    families: loaded.families,
                    r: loaded.r,
                };
                unsafe { *out = Box::into_raw(Box::new(handle)) };
                CoarseStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                CoarseStatus::InvalidInput
            }
        }
    })
}

/// Verified brick witness on the integer interval [start, end] at scale `l`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_brick_cover_line(
    start: i64,
    end: i64,
    l: i64,
    out: *mut *mut CoarseCover,
) -> CoarseStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return CoarseStatus::NullPointer;
        }
        match brick_cover_line((start, end), l) {
            Ok(colored) => {
                let handle = CoarseCover {
                    cover: colored.cover().clone(),
                    families: Some(colored.families().to_vec()),
                    r: Some(colored.r()),
                };
                unsafe { *out = Box::into_raw(Box::new(handle)) };
                CoarseStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                CoarseStatus::VerificationFailed
            }
        }
    })
}

/// Verified brick witness on the square grid window [start, end]^2 at scale
/// `l`, under the sup metric.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_brick_cover_grid(
    start: i64,
    end: i64,
    l: i64,
    out: *mut *mut CoarseCover,
) -> CoarseStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return CoarseStatus::NullPointer;
        }
        match brick_cover_grid((start, end), l) {
            Ok(colored) => {
                let handle = CoarseCover {
                    cover: colored.cover().clone(),
                    families: Some(colored.families().to_vec()),
                    r: Some(colored.r()),
                };
                unsafe { *out = Box::into_raw(Box::new(handle)) };
                CoarseStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                CoarseStatus::VerificationFailed
            }
        }
    })
}

/// Number of members; 0 for a null handle.
///
/// # Safety
/// `cover` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn coarse_cover_member_count(cover: *const CoarseCover) -> usize {
    if cover.is_null() {
        return 0;
    }
    unsafe { &*cover }.cover.member_count()
}

/// Multiplicity; 0 for a null handle.
///
/// # Safety
/// `cover` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn coarse_cover_multiplicity(cover: *const CoarseCover) -> usize {
    if cover.is_null() {
        return 0;
    }
    unsafe { &*cover }.cover.multiplicity()
}

/// Mesh (largest member diameter).
///
/// # Safety
/// `cover` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_cover_mesh(
    cover: *const CoarseCover,
    out: *mut f64,
) -> CoarseStatus {
    guard(|| {
        if cover.is_null() || out.is_null() {
            set_error("null pointer");
            return CoarseStatus::NullPointer;
        }
        unsafe { *out = (*cover).cover.mesh() };
        CoarseStatus::Ok
    })
}

/// Lebesgue number. `is_infinite` is set to 1 when a member is the whole
/// space, in which case `value` is meaningless.
///
/// # Safety
/// `cover` must be live; `value` and `is_infinite` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_cover_lebesgue(
    cover: *const CoarseCover,
    value: *mut f64,
    is_infinite: *mut i32,
) -> CoarseStatus {
    guard(|| {
        if cover.is_null() || value.is_null() || is_infinite.is_null() {
            set_error("null pointer");
            return CoarseStatus::NullPointer;
        }
        let report = unsafe { &*cover }.cover.lebesgue_number();
        match report.value {
            LebValue::Finite(v) => unsafe {
                *value = v;
                *is_infinite = 0;
            },
            LebValue::Infinite => unsafe {
                *value = f64::INFINITY;
                *is_infinite = 1;
            },
        }
        CoarseStatus::Ok
    })
}

/// Runs the disjoint-family witness check at scale `r` with `n + 1` families;
/// writes 1 into `verdict` when every check passes.
///
/// # Safety
/// `cover` must be live and carry families; `verdict` must be valid.
#[no_mangle]
pub unsafe extern "C" fn coarse_ostrand_verify(
    cover: *const CoarseCover,
    r: f64,
    n: usize,
    verdict: *mut i32,
) -> CoarseStatus {
    guard(|| {
        if cover.is_null() || verdict.is_null() {
            set_error("null pointer");
            return CoarseStatus::NullPointer;
        }
        let colored = match unsafe { &*cover }.colored() {
            Ok(c) => c,
            Err(e) => {
                set_error(e);
                return CoarseStatus::InvalidInput;
            }
        };
        match verify_ostrand(&colored, r, n) {
            Ok(report) => {
                unsafe { *verdict = i32::from(report.verdict) };
                CoarseStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                CoarseStatus::InvalidInput
            }
        }
    })
}

/// Points of the open ball around a point index, written into `buf` (up to
/// `cap` entries); returns the total ball size through `count`.
///
/// # Safety
/// `space` must be live; `count` must be valid; `buf` must hold `cap`
/// entries when non-null.
#[no_mangle]
pub unsafe extern "C" fn coarse_space_ball(
    space: *const CoarseSpace,
    center: usize,
    radius: f64,
    buf: *mut usize,
    cap: usize,
    count: *mut usize,
) -> CoarseStatus {
    guard(|| {
        if space.is_null() || count.is_null() {
            set_error("null pointer");
            return CoarseStatus::NullPointer;
        }
        let inner = &unsafe { &*space }.inner;
        if center >= inner.len() {
            set_error(format!("center {center} out of range"));
            return CoarseStatus::InvalidInput;
        }
        let ball = inner.ball(center, radius);
        unsafe { *count = ball.len() };
        if !buf.is_null() {
            let n = ball.len().min(cap);
            unsafe { std::ptr::copy_nonoverlapping(ball.as_ptr(), buf, n) };
        }
        CoarseStatus::Ok
    })
}

/// Frees a cover handle; null is allowed.
///
/// # Safety
/// `cover` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn coarse_cover_free(cover: *mut CoarseCover) {
    if !cover.is_null() {
        drop(unsafe { Box::from_raw(cover) });
    }
}
