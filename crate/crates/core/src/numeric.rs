//! Small scalar solvers shared by the design routines and the legacy fixed point.

use crate::error::{Error, Result};

/// Bisection on a bracket `[lo, hi]` whose endpoints have opposite signs.
///
/// Stops when the bracket is narrower than `tol`. Returns the midpoint of the
/// final bracket.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Analysis(format!(
            "bisection bracket [{lo}, {hi}] has no sign change"
        )));
    }
    // 200 halvings exhaust f64 resolution on any finite bracket.
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Walks from `start` towards `end` in steps of `step` and returns the first
/// sub-interval on which `f` changes sign, ordered as `(nearer start, farther)`.
pub fn scan_for_sign_change<F>(mut f: F, start: f64, end: f64, step: f64) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let dir = if end >= start { 1.0 } else { -1.0 };
    let n = ((end - start).abs() / step).ceil() as usize;
    let mut prev_x = start;
    let mut prev_f = f(start);
    for i in 1..=n {
        let x = if i == n {
            end
        } else {
            start + dir * step * i as f64
        };
        let fx = f(x);
        if fx == 0.0 || fx.signum() != prev_f.signum() {
            return Some((prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    None
}

/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
///
/// Returns `(argmin, min)`.
pub fn golden_section_min<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}
