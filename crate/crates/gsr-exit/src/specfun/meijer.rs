//! The Meijer-G special case `G^{3,1}_{2,3}` that shows up in the second and
//! third derivatives of the exit-time transform, plus the combination `L`
//! built from it.
//!
//! With the scaled exponential integral as kernel,
//!
//! `G(x) = ∫_x^∞ e^y E1(y) / y dy`
//! `L(x) = e^x E1(x) - 1 + x G(x)`
//!
//! `G` is integrated directly to a split point and closed with an alternating
//! factorial tail whose truncation error is far below the absolute target.

use super::expint::scaled_e1_core;
use super::quad::adaptive_gk15;
use super::EvalAccuracy;
use crate::error::{Error, Result};

/// Quadrature/tail split. At 50 the smallest tail term is ~1e-22.
const TAIL_SPLIT: f64 = 50.0;

pub fn meijer_g3123(x: f64, acc: &EvalAccuracy) -> Result<f64> {
    acc.validate()?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "meijer_g3123 requires x > 0, got {x}"
        )));
    }
    let split = x.max(TAIL_SPLIT);
    let head = if split > x {
        adaptive_gk15(
            |y: f64| match scaled_e1_core(y, acc) {
                Ok(v) => v / y,
                // Poison the panel; the outer driver then reports honestly.
                Err(_) => f64::NAN,
            },
            x,
            split,
            1e-300,
            (acc.rel_tol * 0.01).max(5e-15),
            acc.quad_max_depth,
        )?
    } else {
        0.0
    };
    Ok(head + asymptotic_tail(split))
}

/// `L(x) = e^x E1(x) - 1 + x G(x)`; positive, decreasing, with `x L(x) -> 0`
/// at both ends of the scale.
pub fn l_func(x: f64, acc: &EvalAccuracy) -> Result<f64> {
    acc.validate()?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("l_func requires x > 0, got {x}")));
    }
    Ok(scaled_e1_core(x, acc)? - 1.0 + x * meijer_g3123(x, acc)?)
}

/// `∫_X^∞ e^y E1(y)/y dy = Σ_k (-1)^k k! / ((k+1) X^{k+1})`, truncated at the
/// smallest term (≤ 2e-22 for X ≥ 50).
fn asymptotic_tail(xx: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0 / xx;
    let mut k = 0.0f64;
    loop {
        sum += term;
        let next = term * (-(k + 1.0) * (k + 1.0) / ((k + 2.0) * xx));
        if next.abs() >= term.abs() || next.abs() <= 1e-18 * sum.abs() {
            break;
        }
        term = next;
        k += 1.0;
    }
    sum
}
