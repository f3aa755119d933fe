//! C ABI for `legmoment`.
//!
//! Images and moment tables are opaque handles created and freed through this
//! API. Every call returns an [`LmStatus`]; on failure a message is kept per
//! thread and read with [`lm_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use legmoment::io::load_image;
use legmoment::metering::predict_direct_mults_rect;
use legmoment::moment_file::{read_moments, write_moments};
use legmoment::{
    moments_2d_direct, moments_2d_fast, reconstruct, verify, CascadeLayout, Error, FastOptions, Image, MomentTable,
    OpCounter, Precision,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmMethod {
    Fast = 0,
    Direct = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmPrecision {
    Double = 0,
    Extended = 1,
}

/// Opaque image.
pub struct LmImage(Image);

/// Opaque moment table.
pub struct LmMoments(MomentTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LmStatus {
    match e {
        Error::Io { .. } => LmStatus::Io,
        Error::Parse { .. } | Error::InvalidImage(_) => LmStatus::Parse,
        Error::InvalidArgument(_) => LmStatus::InvalidArgument,
    }
}

struct Fail(LmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LmStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LmStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            LmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Image from `width * height` row-major intensities.
///
/// # Safety
/// `pixels` must point to `width * height` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_image_from_pixels(
    width: usize,
    height: usize,
    pixels: *const f64,
    out: *mut *mut LmImage,
) -> LmStatus {
    guard(|| {
        if pixels.is_null() {
            return Err(null("pixels"));
        }
        let len = width
            .checked_mul(height)
            .ok_or_else(|| Fail(LmStatus::InvalidArgument, "image size overflows".into()))?;
        let px = std::slice::from_raw_parts(pixels, len).to_vec();
        let img = Image::from_real(width, height, px)?;
        put(out, Box::into_raw(Box::new(LmImage(img))), "out")
    })
}

/// Image from a PGM or CSV file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_image_load(path: *const c_char, out: *mut *mut LmImage) -> LmStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let img = load_image(path, None)?;
        put(out, Box::into_raw(Box::new(LmImage(img))), "out")
    })
}

/// # Safety
/// `img` must come from this API and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn lm_image_free(img: *mut LmImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// Width, or 0 for NULL.
///
/// # Safety
/// `img` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lm_image_width(img: *const LmImage) -> usize {
    img.as_ref().map_or(0, |i| i.0.width())
}

/// Height, or 0 for NULL.
///
/// # Safety
/// `img` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lm_image_height(img: *const LmImage) -> usize {
    img.as_ref().map_or(0, |i| i.0.height())
}

/// All moments with `p + q <= order`.
///
/// # Safety
/// `img` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_moments_compute(
    img: *const LmImage,
    order: u32,
    method: LmMethod,
    precision: LmPrecision,
    workers: u32,
    out: *mut *mut LmMoments,
) -> LmStatus {
    guard(|| {
        let img = &ref_arg(img, "img")?.0;
        let mut c = OpCounter::disabled();
        let opts = FastOptions {
            layout: CascadeLayout::Prefix,
            precision: match precision {
                LmPrecision::Double => Precision::Double,
                LmPrecision::Extended => Precision::Extended,
            },
            workers: workers.max(1) as usize,
            ..FastOptions::default()
        };
        let t = match method {
            LmMethod::Fast => moments_2d_fast(img, order as usize, &opts, &mut c)?,
            LmMethod::Direct => moments_2d_direct(img, order as usize, opts.workers, &mut c)?,
        };
        put(out, Box::into_raw(Box::new(LmMoments(t))), "out")
    })
}

/// # Safety
/// `m` must come from this API and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn lm_moments_free(m: *mut LmMoments) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Maximum order, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lm_moments_order(m: *const LmMoments) -> u32 {
    m.as_ref().map_or(0, |t| t.0.order() as u32)
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_moments_get(m: *const LmMoments, p: u32, q: u32, out: *mut f64) -> LmStatus {
    guard(|| {
        let t = &ref_arg(m, "moments")?.0;
        let (p, q) = (p as usize, q as usize);
        if p + q > t.order() {
            return Err(Fail(
                LmStatus::InvalidArgument,
                format!("({p},{q}) exceeds order {}", t.order()),
            ));
        }
        put(out, t.get(p, q), "out")
    })
}

/// Writes a moment file.
///
/// # Safety
/// `m` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lm_moments_write(m: *const LmMoments, path: *const c_char) -> LmStatus {
    guard(|| {
        let t = &ref_arg(m, "moments")?.0;
        let path = str_arg(path, "path")?;
        let text = write_moments(t, "ffi")?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
        Ok(())
    })
}

/// Reads a moment file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_moments_read(path: *const c_char, out: *mut *mut LmMoments) -> LmStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let (t, _) = read_moments(&text)?;
        put(out, Box::into_raw(Box::new(LmMoments(t))), "out")
    })
}

/// Reconstructs a `width × height` image into `values`, row-major.
///
/// # Safety
/// `m` must be a live handle; `values` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lm_reconstruct(
    m: *const LmMoments,
    width: usize,
    height: usize,
    values: *mut f64,
    len: usize,
) -> LmStatus {
    guard(|| {
        let t = &ref_arg(m, "moments")?.0;
        if values.is_null() {
            return Err(null("values"));
        }
        if width.checked_mul(height) != Some(len) {
            return Err(Fail(
                LmStatus::InvalidArgument,
                format!("buffer holds {len} values, grid needs {width}x{height}"),
            ));
        }
        let r = reconstruct(t, width, height)?;
        std::slice::from_raw_parts_mut(values, len).copy_from_slice(&r.values);
        Ok(())
    })
}

/// Largest relative difference between fast and direct moments.
///
/// # Safety
/// `img` must be a live handle; `max_rel` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_verify(img: *const LmImage, order: u32, max_rel: *mut f64) -> LmStatus {
    guard(|| {
        let img = &ref_arg(img, "img")?.0;
        let r = verify(img, order as usize, &FastOptions::default())?;
        put(max_rel, r.max_rel, "max_rel")
    })
}

/// `N²(M+1)(M+2)/2`, the direct method's multiplication count.
#[no_mangle]
pub extern "C" fn lm_predict_direct_mults(n: u64, order: u64) -> u64 {
    predict_direct_mults_rect(n, n, order)
}
