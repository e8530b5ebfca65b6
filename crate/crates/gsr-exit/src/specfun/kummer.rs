//! Confluent hypergeometric function of the first kind, `M(a, b, z) = ₁F₁(a; b; z)`.
//!
//! Route selection:
//! * exact nonpositive-integer `a`: the series terminates, evaluate the
//!   polynomial regardless of `z`,
//! * `z < 0`: Kummer transformation `M(a,b,z) = e^z M(b-a, b, -z)`, folded into
//!   the asymptotic exponent when the reflected argument is itself large so the
//!   huge/tiny factors cancel analytically,
//! * `z ≥ 300`: dominant large-argument expansion
//!   `M ~ Γ(b)/Γ(a) e^z z^{a-b} Σ_k (b-a)_k (1-a)_k / (k! z^k)`
//!   (the reflected `z^{-a}` branch is `e^{-z}` smaller and irrelevant here),
//! * otherwise: the defining power series with compensated summation.

use super::gamma::{gamma, rgamma};
use super::{ComplexScalar, EvalAccuracy};
use crate::error::{Error, Result};
use crate::util::CompensatedSum;

/// Above this argument the direct series needs enough terms that the
/// asymptotic expansion is both cheaper and at least as accurate.
const ASYMPTOTIC_Z: f64 = 300.0;

/// `b` this close to a nonpositive integer makes `M` effectively undefined.
const POLE_TOL: f64 = 1e-9;

pub fn kummer_m(
    a: ComplexScalar,
    b: ComplexScalar,
    z: f64,
    acc: &EvalAccuracy,
) -> Result<ComplexScalar> {
    acc.validate()?;
    if !a.is_finite() || !b.is_finite() || !z.is_finite() {
        return Err(Error::Domain(format!(
            "kummer_m requires finite arguments, got a={a}, b={b}, z={z}"
        )));
    }
    if near_nonpositive_integer(b, POLE_TOL) {
        return Err(Error::DegenerateParameters(format!(
            "kummer_m pole: b = {b} is within {POLE_TOL:e} of a nonpositive integer"
        )));
    }
    if is_exact_nonpositive_integer(a) {
        // Terminating polynomial; valid for every z including the asymptotic
        // range, where the general expansion would wrongly return 0 via 1/Γ(a).
        return series(a, b, z, acc);
    }
    if z < 0.0 {
        let w = -z;
        if w >= ASYMPTOTIC_Z {
            return asymptotic(b - a, b, w, z, acc);
        }
        let m = series(b - a, b, w, acc)?;
        return Ok(m * z.exp());
    }
    if z >= ASYMPTOTIC_Z {
        return asymptotic(a, b, z, 0.0, acc);
    }
    series(a, b, z, acc)
}

fn near_nonpositive_integer(b: ComplexScalar, tol: f64) -> bool {
    let n = b.re.round();
    n <= 0.0 && (b - n).norm() <= tol
}

fn is_exact_nonpositive_integer(a: ComplexScalar) -> bool {
    a.im == 0.0 && a.re <= 0.0 && a.re.fract() == 0.0
}

fn series(
    a: ComplexScalar,
    b: ComplexScalar,
    z: f64,
    acc: &EvalAccuracy,
) -> Result<ComplexScalar> {
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    re.add(1.0);
    let mut term = ComplexScalar::new(1.0, 0.0);
    let mut max_mag = 1.0f64;
    let mut small_streak = 0u32;
    let mut done = false;
    for k in 0..acc.max_terms {
        let kf = k as f64;
        term = term * (a + kf) * (z / (kf + 1.0)) / (b + kf);
        if term == ComplexScalar::new(0.0, 0.0) {
            // Terminating numerator reached (a a nonpositive integer).
            done = true;
            break;
        }
        re.add(term.re);
        im.add(term.im);
        let mag = term.norm();
        max_mag = max_mag.max(mag);
        let sum_mag = ComplexScalar::new(re.value(), im.value()).norm();
        // Run the tail down to roundoff: the requested accuracy is a floor
        // on the result, not a license to truncate a convergent series early.
        if mag <= 0.25 * f64::EPSILON * sum_mag + 1e-300 {
            small_streak += 1;
            if small_streak >= 2 && k >= 3 {
                done = true;
                break;
            }
        } else {
            small_streak = 0;
        }
    }
    if !done {
        return Err(Error::NonConvergence(format!(
            "kummer_m series did not converge in {} terms at a={a}, b={b}, z={z}",
            acc.max_terms
        )));
    }
    let result = ComplexScalar::new(re.value(), im.value());
    if max_mag > 1e8 * result.norm() {
        return Err(Error::NonConvergence(format!(
            "kummer_m series lost {:.1} digits to cancellation at a={a}, b={b}, z={z}",
            (max_mag / result.norm()).log10()
        )));
    }
    Ok(result)
}

/// Dominant expansion for large positive argument. `extra_exp` is added to the
/// exponent before exponentiation so the Kummer-transform prefactor `e^{z}`
/// with `z` very negative cancels `e^{w}` analytically instead of producing
/// `0 · ∞`.
fn asymptotic(
    a: ComplexScalar,
    b: ComplexScalar,
    z: f64,
    extra_exp: f64,
    acc: &EvalAccuracy,
) -> Result<ComplexScalar> {
    let mut sum = ComplexScalar::new(1.0, 0.0);
    let mut term = ComplexScalar::new(1.0, 0.0);
    let mut converged = false;
    for k in 0..120usize {
        let kf = k as f64;
        let next = term * (b - a + kf) * (ComplexScalar::new(1.0, 0.0) - a + kf)
            / ((kf + 1.0) * z);
        if next.norm() >= term.norm() {
            // Smallest term reached; usable only if already below target.
            converged = next.norm() <= 0.5 * acc.rel_tol * sum.norm();
            break;
        }
        term = next;
        sum += term;
        if term.norm() <= 0.1 * acc.rel_tol * sum.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "kummer_m asymptotic expansion stalled above target at a={a}, b={b}, z={z}"
        )));
    }
    let exponent = ComplexScalar::new(z + extra_exp, 0.0) + (a - b) * z.ln();
    Ok(gamma(b) * rgamma(a) * exponent.exp() * sum)
}
