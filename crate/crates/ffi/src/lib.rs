//! C ABI over the disc-potential engines. Handles are opaque pointers
//! created and destroyed here; every other exchange is a UTF-8 JSON or
//! text string. Functions return a DiscpotStatus, never unwind across the
//! boundary, and leave details for discpot_last_error_message. Strings
//! handed out through out-pointers are heap allocations owned by the
//! caller; release them with discpot_string_free, handles with their
//! matching _free.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num::complex::Complex64;
use serde_json::json;

use discpot::borel_morse::{flow_verify, BorelComplex, FiberComplex};
use discpot::immersed::{coordinate_names, glue, parse_direction, sphere_potential, Spin};
use discpot::mirror::mirror_map;
use discpot::potential::{
    build_potential, critical_points, parse_subtorus_spec, EquivariantPotential,
};
use discpot::rational::parse_rational;
use discpot::toric::validate;
use discpot::{Error, ToricInput, TruncatedSeries};

/// Result of every ABI call. Zero is success; nonzero identifies the
/// failure class, with the message available from
/// discpot_last_error_message.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscpotStatus {
    Ok = 0,
    Domain = 1,
    Validation = 2,
    Schema = 3,
    Numeric = 4,
    Io = 5,
    ContextMismatch = 6,
    NullArgument = 7,
    Utf8 = 8,
    Panic = 9,
}

/// Opaque fan handle.
pub struct DiscpotFan {
    inner: ToricInput,
}

/// Opaque potential handle.
pub struct DiscpotPotential {
    inner: EquivariantPotential,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String, status: DiscpotStatus) -> DiscpotStatus {
    let c = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
    status
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn from_error(e: &Error) -> DiscpotStatus {
    let status = match e {
        Error::ContextMismatch(_) => DiscpotStatus::ContextMismatch,
        Error::Domain(_) => DiscpotStatus::Domain,
        Error::Validation(_) => DiscpotStatus::Validation,
        Error::Schema { .. } => DiscpotStatus::Schema,
        Error::Numeric(_) => DiscpotStatus::Numeric,
        Error::Io(_) => DiscpotStatus::Io,
    };
    set_error(e.to_string(), status)
}

/// Shields the boundary: runs the body, catching panics.
fn guarded(f: impl FnOnce() -> DiscpotStatus) -> DiscpotStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => set_error("internal panic".into(), DiscpotStatus::Panic),
    }
}

/// # Safety
/// `p` must be null or a NUL-terminated string valid for the call.
unsafe fn str_in<'a>(p: *const c_char, what: &str) -> Result<&'a str, DiscpotStatus> {
    if p.is_null() {
        return Err(set_error(
            format!("{what} must not be NULL"),
            DiscpotStatus::NullArgument,
        ));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"), DiscpotStatus::Utf8)
    })
}

fn write_string(s: String, out: *mut *mut c_char) -> DiscpotStatus {
    if out.is_null() {
        return set_error("output pointer is NULL".into(), DiscpotStatus::NullArgument);
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            clear_error();
            DiscpotStatus::Ok
        }
        Err(_) => set_error("output contains NUL".into(), DiscpotStatus::Numeric),
    }
}

fn write_json(v: serde_json::Value, out: *mut *mut c_char) -> DiscpotStatus {
    write_string(v.to_string(), out)
}

fn series_json(s: &TruncatedSeries) -> serde_json::Value {
    serde_json::to_value(s).expect("series serialization")
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({"re": z.re, "im": z.im})
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn discpot_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy of the message from the most recent failing call on this thread,
/// or NULL when the last call succeeded. Free with discpot_string_free.
#[no_mangle]
pub extern "C" fn discpot_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(c) => c.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned by this library and
/// not freed since.
#[no_mangle]
pub unsafe extern "C" fn discpot_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a fan description from JSON into a handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_fan_parse(
    json: *const c_char,
    out: *mut *mut DiscpotFan,
) -> DiscpotStatus {
    guarded(|| {
        if out.is_null() {
            return set_error("output pointer is NULL".into(), DiscpotStatus::NullArgument);
        }
        let text = match str_in(json, "fan JSON") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ToricInput::from_json_str(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(DiscpotFan { inner }));
                clear_error();
                DiscpotStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Releases a fan handle. NULL is a no-op.
///
/// # Safety
/// `fan` must be NULL or a handle from discpot_fan_parse, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn discpot_fan_free(fan: *mut DiscpotFan) {
    if !fan.is_null() {
        drop(Box::from_raw(fan));
    }
}

/// Validation report for the fan, as JSON.
///
/// # Safety
/// `fan` must be a live handle; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_fan_validate(
    fan: *const DiscpotFan,
    out_json: *mut *mut c_char,
) -> DiscpotStatus {
    guarded(|| {
        let Some(fan) = fan.as_ref() else {
            return set_error("fan handle is NULL".into(), DiscpotStatus::NullArgument);
        };
        match validate(&fan.inner) {
            Ok(report) => write_json(
                serde_json::to_value(&report).expect("report serialization"),
                out_json,
            ),
            Err(e) => from_error(&e),
        }
    })
}

/// Mirror-map report: Mori generators plus per-ray g and corrected series.
///
/// # Safety
/// `fan` must be a live handle; `cutoff` a NUL-terminated rational such as
/// "3" or "7/2"; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_mirror_map_json(
    fan: *const DiscpotFan,
    cutoff: *const c_char,
    out_json: *mut *mut c_char,
) -> DiscpotStatus {
    guarded(|| {
        let Some(fan) = fan.as_ref() else {
            return set_error("fan handle is NULL".into(), DiscpotStatus::NullArgument);
        };
        let cutoff = match str_in(cutoff, "cutoff") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cutoff = match parse_rational(cutoff) {
            Ok(c) => c,
            Err(e) => return from_error(&e),
        };
        match mirror_map(&fan.inner, &cutoff) {
            Ok(mm) => {
                let rays: Vec<serde_json::Value> = (0..mm.g.len())
                    .map(|i| {
                        json!({
                            "ray": i,
                            "g": series_json(&mm.g[i]),
                            "corrected": series_json(&mm.corrected[i]),
                        })
                    })
                    .collect();
                write_json(
                    json!({
                        "generators": serde_json::to_value(&mm.generators).expect("classes"),
                        "rays": rays,
                    }),
                    out_json,
                )
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Builds the equivariant potential of a fiber into a handle.
///
/// # Safety
/// `fan` must be a live handle; `subtorus` a NUL-terminated row list such
/// as "1,0;0,1"; `cutoff` a NUL-terminated rational; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn discpot_potential_build(
    fan: *const DiscpotFan,
    subtorus: *const c_char,
    cutoff: *const c_char,
    out: *mut *mut DiscpotPotential,
) -> DiscpotStatus {
    guarded(|| {
        if out.is_null() {
            return set_error("output pointer is NULL".into(), DiscpotStatus::NullArgument);
        }
        let Some(fan) = fan.as_ref() else {
            return set_error("fan handle is NULL".into(), DiscpotStatus::NullArgument);
        };
        let spec = match str_in(subtorus, "subtorus") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cutoff = match str_in(cutoff, "cutoff") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let built = parse_subtorus_spec(spec)
            .and_then(|rows| Ok((rows, parse_rational(cutoff)?)))
            .and_then(|(rows, cut)| build_potential(&fan.inner, &rows, &cut));
        match built {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(DiscpotPotential { inner }));
                clear_error();
                DiscpotStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Releases a potential handle. NULL is a no-op.
///
/// # Safety
/// `pot` must be NULL or a handle from discpot_potential_build, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn discpot_potential_free(pot: *mut DiscpotPotential) {
    if !pot.is_null() {
        drop(Box::from_raw(pot));
    }
}

/// Full JSON description of the potential.
///
/// # Safety
/// `pot` must be a live handle; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_potential_describe(
    pot: *const DiscpotPotential,
    out_json: *mut *mut c_char,
) -> DiscpotStatus {
    guarded(|| {
        let Some(pot) = pot.as_ref() else {
            return set_error("potential handle is NULL".into(), DiscpotStatus::NullArgument);
        };
        write_json(pot.inner.to_json_value(), out_json)
    })
}

/// Human-readable sum of terms.
///
/// # Safety
/// `pot` must be a live handle; `out_text` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_potential_pretty(
    pot: *const DiscpotPotential,
    out_text: *mut *mut c_char,
) -> DiscpotStatus {
    guarded(|| {
        let Some(pot) = pot.as_ref() else {
            return set_error("potential handle is NULL".into(), DiscpotStatus::NullArgument);
        };
        write_string(pot.inner.pretty(), out_text)
    })
}

/// Newton search for critical points of the specialized potential.
/// `lambda_re`/`lambda_im` are parallel arrays of length `n_lambda`;
/// `lambda_im` may be NULL for real parameters. Results arrive as JSON.
///
/// # Safety
/// `pot` must be a live handle; the lambda arrays must match `n_lambda`;
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_critical_points(
    pot: *const DiscpotPotential,
    t: f64,
    lambda_re: *const f64,
    lambda_im: *const f64,
    n_lambda: usize,
    seeds: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> DiscpotStatus {
    guarded(|| {
        let Some(pot) = pot.as_ref() else {
            return set_error("potential handle is NULL".into(), DiscpotStatus::NullArgument);
        };
        if n_lambda > 0 && lambda_re.is_null() {
            return set_error(
                "lambda_re is NULL with n_lambda > 0".into(),
                DiscpotStatus::NullArgument,
            );
        }
        let lambda: Vec<Complex64> = (0..n_lambda)
            .map(|k| {
                let re = *lambda_re.add(k);
                let im = if lambda_im.is_null() {
                    0.0
                } else {
                    *lambda_im.add(k)
                };
                Complex64::new(re, im)
            })
            .collect();
        match critical_points(&pot.inner, t, &lambda, seeds, seed) {
            Ok(out) => {
                let points: Vec<serde_json::Value> = out
                    .points
                    .iter()
                    .map(|p| {
                        json!({
                            "x": p.x.iter().copied().map(complex_json).collect::<Vec<_>>(),
                            "value": complex_json(p.value),
                            "grad_norm": p.grad_norm,
                        })
                    })
                    .collect();
                write_json(json!({"points": points, "warning": out.warning}), out_json)
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Circle-equivariant sphere potential at the given truncation order, as
/// JSON {"lambda_factor", "series"}.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_sphere_potential(
    cutoff: u32,
    out_json: *mut *mut c_char,
) -> DiscpotStatus {
    guarded(|| {
        if cutoff == 0 {
            return set_error("cutoff must be positive".into(), DiscpotStatus::Validation);
        }
        let w = sphere_potential(cutoff);
        write_json(
            json!({"lambda_factor": w.lambda_factor, "series": series_json(&w.series)}),
            out_json,
        )
    })
}

/// Chart transition for the pinched torus. `direction` is a packed pair
/// such as "L0L1"; `coords_json` holds the source coordinates keyed by
/// their chart names (u/v, x1/y1, x2/y2). Output uses the target names.
///
/// # Safety
/// `direction` and `coords_json` must be NUL-terminated strings;
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_glue(
    direction: *const c_char,
    coords_json: *const c_char,
    trivial_spin: bool,
    out_json: *mut *mut c_char,
) -> DiscpotStatus {
    guarded(|| {
        let dir = match str_in(direction, "direction") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let coords = match str_in(coords_json, "coords JSON") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let (source, target) = match parse_direction(dir) {
            Ok(p) => p,
            Err(e) => return from_error(&e),
        };
        let value: serde_json::Value = match serde_json::from_str(coords) {
            Ok(v) => v,
            Err(e) => {
                return from_error(&Error::schema("/", format!("coords are not JSON: {e}")))
            }
        };
        let (ka, kb) = coordinate_names(source);
        let fetch = |key: &str| -> Result<TruncatedSeries, Error> {
            let v = value
                .get(key)
                .ok_or_else(|| Error::schema(format!("/{key}"), "missing chart coordinate"))?;
            serde_json::from_value(v.clone())
                .map_err(|e| Error::schema(format!("/{key}"), e.to_string()))
        };
        let spin = if trivial_spin {
            Spin::Trivial
        } else {
            Spin::Nontrivial
        };
        let glued = fetch(ka)
            .and_then(|a| Ok((a, fetch(kb)?)))
            .and_then(|(a, b)| glue(source, target, &a, &b, spin));
        match glued {
            Ok((fa, fb)) => {
                let (ta, tb) = coordinate_names(target);
                write_json(json!({ta: series_json(&fa), tb: series_json(&fb)}), out_json)
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Borel Morse complex summary: generator count, d^2 status, cohomology
/// ranks by degree. `fiber` is "point" or "s2".
///
/// # Safety
/// `fiber` must be a NUL-terminated string; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_morse_ranks(
    ell: usize,
    order: usize,
    fiber: *const c_char,
    out_json: *mut *mut c_char,
) -> DiscpotStatus {
    guarded(|| {
        let fiber = match str_in(fiber, "fiber") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let fc = match fiber {
            "point" => FiberComplex::point(),
            "s2" => FiberComplex::two_sphere(),
            other => {
                return from_error(&Error::Validation(format!(
                    "unknown fiber {other:?}, expected point or s2"
                )))
            }
        };
        let built = BorelComplex::build(ell, order, fc).and_then(|c| {
            c.check_d_squared()?;
            Ok(c)
        });
        match built {
            Ok(c) => {
                let ranks: serde_json::Map<String, serde_json::Value> = c
                    .cohomology_ranks()
                    .into_iter()
                    .map(|(d, b)| (d.to_string(), json!(b)))
                    .collect();
                write_json(
                    json!({
                        "l": ell,
                        "n": order,
                        "fiber": fiber,
                        "generators": c.generators.len(),
                        "d_squared_zero": true,
                        "ranks": ranks,
                    }),
                    out_json,
                )
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Integrates the handover flow between two generators at the given
/// angular offset and reports the asymptotics as JSON.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn discpot_flow_verify(
    source: usize,
    target: usize,
    phase: f64,
    tolerance: f64,
    out_json: *mut *mut c_char,
) -> DiscpotStatus {
    guarded(|| match flow_verify(source, target, phase, tolerance, None) {
        Ok(r) => write_json(
            json!({
                "source": r.source,
                "target": r.target,
                "phase": r.angle,
                "theta0": r.theta0,
                "theta_minus": r.theta_minus,
                "theta_plus": r.theta_plus,
                "connects": r.connects,
            }),
            out_json,
        ),
        Err(e) => from_error(&e),
    })
}
