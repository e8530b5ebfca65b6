//! Exponential integral `E1` and its exponentially scaled companion.
//!
//! `exp_integral_e1` integrates the defining integrand directly and closes the
//! range with an alternating asymptotic tail, so no special-function library is
//! involved anywhere in the evaluation chain. `scaled_e1` computes
//! `e^x E1(x)` in a single pass through a representation that never forms the
//! huge/tiny factors separately, which keeps it usable far past the point
//! where `E1` itself underflows.

use super::quad::adaptive_gk15;
use super::EvalAccuracy;
use crate::error::{Error, Result};

/// Quadrature/tail split for the unscaled integral. Beyond this point the
/// alternating factorial tail converges to full double precision in ~25 terms.
const TAIL_SPLIT: f64 = 50.0;

/// Upper cut for the scaled integrand; `exp(-u)` is below 9e-27 past here,
/// while the scaled result is never smaller than `1/(x + 1)` by the classic
/// two-sided bound, so the truncation is far below the relative target.
const SCALED_CUT: f64 = 60.0;

fn quad_rel(acc: &EvalAccuracy) -> f64 {
    (acc.rel_tol * 0.01).max(5e-15)
}

/// `E1(x) = ∫_x^∞ e^{-y}/y dy` for `x > 0`.
///
/// Underflows honestly to zero once `e^{-x}` itself is not representable
/// (around `x ≈ 745`).
pub fn exp_integral_e1(x: f64, acc: &EvalAccuracy) -> Result<f64> {
    acc.validate()?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "exponential integral requires x > 0, got {x}"
        )));
    }
    let split = x.max(TAIL_SPLIT);
    let head = if split > x {
        adaptive_gk15(
            |y: f64| (-y).exp() / y,
            x,
            split,
            1e-300,
            quad_rel(acc),
            acc.quad_max_depth,
        )?
    } else {
        0.0
    };
    Ok(head + asymptotic_tail(split))
}

/// `e^x E1(x) = ∫_0^∞ e^{-u}/(x + u) du` for `x > 0`.
pub fn scaled_e1(x: f64, acc: &EvalAccuracy) -> Result<f64> {
    acc.validate()?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "scaled exponential integral requires x > 0, got {x}"
        )));
    }
    scaled_e1_core(x, acc)
}

/// Evaluation core without argument validation; callers guarantee `x > 0`.
pub(crate) fn scaled_e1_core(x: f64, acc: &EvalAccuracy) -> Result<f64> {
    adaptive_gk15(
        |u: f64| (-u).exp() / (x + u),
        0.0,
        SCALED_CUT,
        1e-300,
        quad_rel(acc),
        acc.quad_max_depth,
    )
}

/// `∫_X^∞ e^{-y}/y dy` via the alternating series `e^{-X}/X · Σ (-1)^k k!/X^k`,
/// truncated at the first negligible or non-decreasing term. Requires
/// `X ≥ TAIL_SPLIT`, where the smallest term is far below double precision.
fn asymptotic_tail(xx: f64) -> f64 {
    let pref = (-xx).exp() / xx;
    if pref == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut term = 1.0f64;
    let mut k = 0.0f64;
    loop {
        sum += term;
        let next = term * (-(k + 1.0) / xx);
        if next.abs() >= term.abs() || next.abs() <= 1e-18 * sum.abs() {
            break;
        }
        term = next;
        k += 1.0;
    }
    pref * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn acc() -> EvalAccuracy {
        EvalAccuracy::default()
    }

    #[test]
    fn e1_matches_high_precision_anchors() {
        // Baselines frozen from mpmath at 40 digits.
        let cases = [
            (1e-3, 6.331539364136149332003),
            (0.25, 1.044282634443738194536),
            (0.5, 0.5597735947761608117468),
            (1.0, 0.2193839343955202736772),
            (5.0, 0.001148295591275325797331),
            (10.0, 0.000004156968929685324277403),
            (50.0, 3.783264029550459018699e-24),
        ];
        for (x, want) in cases {
            let got = exp_integral_e1(x, &acc()).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn scaled_e1_matches_high_precision_anchors() {
        let cases = [
            (0.01, 4.078511443456425826643),
            (1.0, 0.5963473623231940743411),
            (600.0, 0.001663898102157947234737),
            (1e6, 9.99999000001999994e-7),
        ];
        for (x, want) in cases {
            let got = scaled_e1(x, &acc()).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn scaled_and_unscaled_agree_where_both_representable() {
        for x in [0.01, 0.5, 1.0, 5.0, 20.0, 100.0] {
            let direct = exp_integral_e1(x, &acc()).unwrap();
            let via_scaled = (-x).exp() * scaled_e1(x, &acc()).unwrap();
            assert_relative_eq!(direct, via_scaled, max_relative = 1e-12);
        }
    }

    #[test]
    fn e1_strictly_decreasing_on_log_grid() {
        let mut prev = f64::INFINITY;
        for k in 0..30 {
            let x = 10f64.powf(-3.0 + 0.2 * k as f64);
            let v = exp_integral_e1(x, &acc()).unwrap();
            assert!(v > 0.0, "E1({x}) = {v} should be positive");
            assert!(v < prev, "E1 must decrease: E1({x}) = {v} vs previous {prev}");
            prev = v;
        }
    }

    #[test]
    fn e1_underflows_to_zero_for_huge_argument() {
        let v = exp_integral_e1(800.0, &acc()).unwrap();
        assert_eq!(v, 0.0);
        // The scaled form stays informative there.
        let s = scaled_e1(800.0, &acc()).unwrap();
        assert_relative_eq!(s, 1.0 / 800.0, max_relative = 2e-3);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            exp_integral_e1(0.0, &acc()),
            Err(crate::error::Error::Domain(_))
        ));
        assert!(matches!(
            exp_integral_e1(-1.0, &acc()),
            Err(crate::error::Error::Domain(_))
        ));
        assert!(matches!(
            scaled_e1(f64::NAN, &acc()),
            Err(crate::error::Error::Domain(_))
        ));
    }

    proptest! {
        // Classic two-sided bound: (1/2)ln(1 + 2/x) < e^x E1(x) < ln(1 + 1/x).
        #[test]
        fn scaled_e1_sandwich(exp10 in -3.0f64..3.0) {
            let x = 10f64.powf(exp10);
            let s = scaled_e1(x, &acc()).unwrap();
            let lower = 0.5 * (2.0 / x).ln_1p();
            let upper = (1.0 / x).ln_1p();
            prop_assert!(s > lower && s < upper, "x={x} s={s} bounds=({lower},{upper})");
        }
    }
}
