//! C ABI over the framelet library.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every call returns an [`FmStatus`]; on failure the message is available
//! from [`fm_last_error_message`] on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and released with
//! [`fm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use framelet::dual::{build_dual_bank, DualOptions, FirstPair};
use framelet::io::{filter_from_json, filter_to_json, read_filter, render_pretty, Bank, BankFile, BankMetadata};
use framelet::moments::{sum_rule_order, vanishing_moment_order};
use framelet::quasitight::build_quasitight;
use framelet::smoothness::{sm2_estimate, Sm2Method, Sm2Options};
use framelet::verify::{verify_dual, verify_quasitight, BankReport};
use framelet::{DilationContext, Error, Filter};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Io = 4,
    InvalidArgument = 5,
    DimensionMismatch = 6,
    NotExpansive = 7,
    NotInterpolatory = 8,
    NotNormalized = 9,
    OrderBudgetExceeded = 10,
    Infeasible = 11,
    VerificationFailed = 12,
    OutOfRange = 13,
    Internal = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmFirstPair {
    Standard = 0,
    Flipped = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmSm2Method {
    Eig = 0,
    Norm = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmSide {
    Primal = 0,
    Dual = 1,
}

/// Integer dilation matrix with its coset data.
pub struct FmDilation {
    ctx: DilationContext,
}

/// Finitely supported filter with exact coefficients.
pub struct FmFilter {
    filter: Filter,
}

/// Dual or quasi-tight filter bank together with its dilation.
pub struct FmBank {
    ctx: DilationContext,
    bank: Bank,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FmStatus {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::UnsupportedFormat(_) => FmStatus::Parse,
        Error::Io(_) => FmStatus::Io,
        Error::DimensionMismatch(..) | Error::RadicandMismatch(..) => FmStatus::DimensionMismatch,
        Error::NotExpansive(_) | Error::NotSquare => FmStatus::NotExpansive,
        Error::NotInterpolatory => FmStatus::NotInterpolatory,
        Error::NotNormalized => FmStatus::NotNormalized,
        Error::OrderBudgetExceeded { .. } | Error::OddSumRuleOrder { .. } | Error::SumRuleZero => {
            FmStatus::OrderBudgetExceeded
        }
        Error::Infeasible | Error::NoSolutionInBox => FmStatus::Infeasible,
        Error::VerificationFailed(..) => FmStatus::VerificationFailed,
        Error::CosetIndexOutOfRange(..) => FmStatus::OutOfRange,
        _ => FmStatus::InvalidArgument,
    }
}

struct Fail(FmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type R<T> = Result<T, Fail>;

/// Runs `f`, records any error message and contains panics.
fn guard(f: impl FnOnce() -> R<()>) -> FmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FmStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal panic".into());
            set_error(msg);
            FmStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> R<&'a str> {
    if p.is_null() {
        return Err(Fail(FmStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FmStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn obj<'a, T>(p: *const T, name: &str) -> R<&'a T> {
    p.as_ref()
        .ok_or_else(|| Fail(FmStatus::NullPointer, format!("{name} is null")))
}

unsafe fn put<T>(out: *mut T, v: T, name: &str) -> R<()> {
    if out.is_null() {
        return Err(Fail(FmStatus::NullPointer, format!("{name} is null")));
    }
    out.write(v);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a dilation matrix such as `"1 1; 1 -1"`.
///
/// # Safety
/// `matrix` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fm_dilation_new(matrix: *const c_char, out: *mut *mut FmDilation) -> FmStatus {
    guard(|| {
        let ctx = DilationContext::parse(str_arg(matrix, "matrix")?)?;
        put(out, boxed(FmDilation { ctx }), "out")
    })
}

/// # Safety
/// `d` must be NULL or a handle from [`fm_dilation_new`].
#[no_mangle]
pub unsafe extern "C" fn fm_dilation_free(d: *mut FmDilation) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// `|det M|`, the number of cosets.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_dilation_det(d: *const FmDilation, out: *mut usize) -> FmStatus {
    guard(|| put(out, obj(d, "dilation")?.ctx.det_abs(), "out"))
}

/// Parses a filter from its JSON file format.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fm_filter_from_json(json: *const c_char, out: *mut *mut FmFilter) -> FmStatus {
    guard(|| {
        let filter = filter_from_json(str_arg(json, "json")?)?;
        put(out, boxed(FmFilter { filter }), "out")
    })
}

/// Reads a filter JSON file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fm_filter_load(path: *const c_char, out: *mut *mut FmFilter) -> FmStatus {
    guard(|| {
        let filter = read_filter(str_arg(path, "path")?)?;
        put(out, boxed(FmFilter { filter }), "out")
    })
}

/// Serializes a filter to JSON; free the result with [`fm_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_filter_to_json(f: *const FmFilter, out: *mut *mut c_char) -> FmStatus {
    guard(|| {
        let s = filter_to_json(&obj(f, "filter")?.filter);
        put(out, c_string(s), "out")
    })
}

/// # Safety
/// `f` must be NULL or a filter handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fm_filter_free(f: *mut FmFilter) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Exact equality of two filters.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_filter_equal(a: *const FmFilter, b: *const FmFilter, out: *mut bool) -> FmStatus {
    guard(|| put(out, obj(a, "a")?.filter == obj(b, "b")?.filter, "out"))
}

/// Coefficient at `point` (length = filter dimension) as a double.
///
/// # Safety
/// `point` must hold `len` integers; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_filter_coeff(
    f: *const FmFilter,
    point: *const i64,
    len: usize,
    out: *mut f64,
) -> FmStatus {
    guard(|| {
        let f = &obj(f, "filter")?.filter;
        if point.is_null() {
            return Err(Fail(FmStatus::NullPointer, "point is null".into()));
        }
        if len != f.dim() {
            return Err(Error::DimensionMismatch(len, f.dim()).into());
        }
        let p = std::slice::from_raw_parts(point, len);
        let v = f.to_f64_map().get(p).copied().unwrap_or(0.0);
        put(out, v, "out")
    })
}

/// Sum rule order, capped at `cap`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_filter_sum_rules(
    f: *const FmFilter,
    d: *const FmDilation,
    cap: u32,
    out: *mut u32,
) -> FmStatus {
    guard(|| {
        let (f, d) = (&obj(f, "filter")?.filter, &obj(d, "dilation")?.ctx);
        if f.dim() != d.dim() {
            return Err(Error::DimensionMismatch(f.dim(), d.dim()).into());
        }
        put(out, sum_rule_order(f, d, cap).value(), "out")
    })
}

/// Vanishing moment order, capped at `cap`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_filter_vanishing_moments(f: *const FmFilter, cap: u32, out: *mut u32) -> FmStatus {
    guard(|| put(out, vanishing_moment_order(&obj(f, "filter")?.filter, cap).value(), "out"))
}

/// Whether `a(Mk) = |det M|^{-1} δ(k)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_filter_is_interpolatory(
    f: *const FmFilter,
    d: *const FmDilation,
    out: *mut bool,
) -> FmStatus {
    guard(|| {
        let (f, d) = (&obj(f, "filter")?.filter, &obj(d, "dilation")?.ctx);
        put(out, f.dim() == d.dim() && d.is_interpolatory(f), "out")
    })
}

/// Sobolev smoothness estimate `sm₂`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_sm2(
    f: *const FmFilter,
    d: *const FmDilation,
    method: FmSm2Method,
    out: *mut f64,
) -> FmStatus {
    guard(|| {
        let opts = Sm2Options {
            method: match method {
                FmSm2Method::Eig => Sm2Method::Eig,
                FmSm2Method::Norm => Sm2Method::Norm,
            },
            ..Sm2Options::default()
        };
        let e = sm2_estimate(&obj(f, "filter")?.filter, &obj(d, "dilation")?.ctx, &opts)?;
        put(out, e.sm2, "out")
    })
}

/// Builds a dual framelet bank from interpolatory `a`, `ta` with `n1`, `n2`
/// vanishing moments on the two sides.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_dual_bank_build(
    a: *const FmFilter,
    ta: *const FmFilter,
    d: *const FmDilation,
    n1: u32,
    n2: u32,
    first_pair: FmFirstPair,
    merge_proportional: bool,
    out: *mut *mut FmBank,
) -> FmStatus {
    guard(|| {
        let ctx = obj(d, "dilation")?.ctx.clone();
        let opts = DualOptions {
            first_pair: match first_pair {
                FmFirstPair::Standard => FirstPair::Standard,
                FmFirstPair::Flipped => FirstPair::Flipped,
            },
            merge_proportional,
            ..DualOptions::default()
        };
        let b = build_dual_bank(&obj(a, "a")?.filter, &obj(ta, "ta")?.filter, &ctx, n1, n2, &opts)?;
        let bank = Bank::Dual {
            a: b.a,
            ta: b.ta,
            bs: b.bs,
            tbs: b.tbs,
        };
        put(out, boxed(FmBank { ctx, bank }), "out")
    })
}

/// Builds a quasi-tight framelet bank with `m` vanishing moments.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_quasitight_bank_build(
    a: *const FmFilter,
    d: *const FmDilation,
    m: u32,
    out: *mut *mut FmBank,
) -> FmStatus {
    guard(|| {
        let ctx = obj(d, "dilation")?.ctx.clone();
        let b = build_quasitight(&obj(a, "a")?.filter, &ctx, m)?;
        let bank = Bank::QuasiTight {
            a: b.a,
            bs: b.bs,
            eps: b.eps,
        };
        put(out, boxed(FmBank { ctx, bank }), "out")
    })
}

/// Reads a bank JSON file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fm_bank_load(path: *const c_char, out: *mut *mut FmBank) -> FmStatus {
    guard(|| {
        let file = BankFile::load(str_arg(path, "path")?)?;
        let ctx = DilationContext::new(file.dilation()?)?;
        let bank = file.bank()?;
        put(out, boxed(FmBank { ctx, bank }), "out")
    })
}

/// Writes a bank JSON file.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_bank_save(b: *const FmBank, path: *const c_char) -> FmStatus {
    guard(|| {
        let b = obj(b, "bank")?;
        BankFile::new(&b.bank, b.ctx.matrix(), BankMetadata::default()).save(str_arg(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `b` must be NULL or a bank handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fm_bank_free(b: *mut FmBank) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Number of high-pass filters (pairs, for dual banks).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_bank_len(b: *const FmBank, out: *mut usize) -> FmStatus {
    guard(|| put(out, obj(b, "bank")?.bank.bs().len(), "out"))
}

/// Whether the bank is quasi-tight (otherwise dual).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_bank_is_quasitight(b: *const FmBank, out: *mut bool) -> FmStatus {
    guard(|| put(out, matches!(obj(b, "bank")?.bank, Bank::QuasiTight { .. }), "out"))
}

/// Copy of high-pass filter `index` (0-based). `FM_SIDE_DUAL` selects the
/// dual filter and is only valid for dual banks.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_bank_high_pass(
    b: *const FmBank,
    index: usize,
    side: FmSide,
    out: *mut *mut FmFilter,
) -> FmStatus {
    guard(|| {
        let bank = &obj(b, "bank")?.bank;
        let list = match (side, bank) {
            (FmSide::Primal, _) => bank.bs(),
            (FmSide::Dual, Bank::Dual { tbs, .. }) => tbs.as_slice(),
            (FmSide::Dual, Bank::QuasiTight { .. }) => {
                return Err(Fail(FmStatus::InvalidArgument, "quasi-tight banks have no dual side".into()))
            }
        };
        let f = list
            .get(index)
            .ok_or_else(|| Fail(FmStatus::OutOfRange, format!("index {index} out of range 0..{}", list.len())))?;
        put(out, boxed(FmFilter { filter: f.clone() }), "out")
    })
}

/// Sign `ε_index` of a quasi-tight bank.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_bank_sign(b: *const FmBank, index: usize, out: *mut i8) -> FmStatus {
    guard(|| match &obj(b, "bank")?.bank {
        Bank::QuasiTight { eps, .. } => {
            let e = eps
                .get(index)
                .ok_or_else(|| Fail(FmStatus::OutOfRange, format!("index {index} out of range")))?;
            put(out, *e, "out")
        }
        Bank::Dual { .. } => Err(Fail(FmStatus::InvalidArgument, "dual banks carry no signs".into())),
    })
}

fn report(b: &FmBank) -> R<BankReport> {
    Ok(match &b.bank {
        Bank::Dual { a, ta, bs, tbs } => verify_dual(&b.ctx, a, ta, bs, tbs, None)?,
        Bank::QuasiTight { a, bs, eps } => verify_quasitight(&b.ctx, a, bs, eps, None)?,
    })
}

/// Exact verification. `out` receives whether the perfect reconstruction
/// identity and all structural checks hold.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_bank_verify(b: *const FmBank, out: *mut bool) -> FmStatus {
    guard(|| put(out, report(obj(b, "bank")?)?.all_ok(), "out"))
}

/// Verification report as JSON; free with [`fm_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_bank_report_json(b: *const FmBank, out: *mut *mut c_char) -> FmStatus {
    guard(|| {
        let r = report(obj(b, "bank")?)?;
        let v = serde_json::to_value(&r).map_err(Error::from)?;
        put(out, c_string(render_pretty(&v)), "out")
    })
}
