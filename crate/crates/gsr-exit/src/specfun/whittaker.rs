//! Whittaker functions `W_{a,b}(z)` and `M_{a,b}(z)` for real `z > 0`.
//!
//! Both are thin prefactor wrappers over the confluent hypergeometric kernels:
//!
//! `W_{a,b}(z) = e^{-z/2} z^{b+1/2} U(b - a + 1/2, 1 + 2b, z)`
//! `M_{a,b}(z) = e^{-z/2} z^{b+1/2} M(b - a + 1/2, 1 + 2b, z)`
//!
//! `whittaker_w` accepts a real or purely imaginary second index (the two
//! cases the spectral parameterization produces) and returns the provably
//! real value, checking that the imaginary part coming out of the complex
//! arithmetic is numerical dust.

use super::kummer::kummer_m;
use super::tricomi::tricomi_u;
use super::{ComplexScalar, EvalAccuracy};
use crate::error::{Error, Result};

/// Tolerated imaginary residue relative to the real part.
const IMAG_REL: f64 = 1e-8;
const IMAG_ABS: f64 = 1e-12;

pub fn whittaker_w(a: f64, b: ComplexScalar, z: f64, acc: &EvalAccuracy) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain(format!(
            "whittaker_w requires z > 0, got {z}"
        )));
    }
    if !(b.re == 0.0 || b.im == 0.0) || !b.is_finite() || !a.is_finite() {
        return Err(Error::Domain(format!(
            "whittaker_w index must be real or purely imaginary, got {b}"
        )));
    }
    let a_u = b - a + 0.5;
    let b_u = b * 2.0 + 1.0;
    let u = tricomi_u(a_u, b_u, z, acc)?;
    let prefactor = (ComplexScalar::new(-0.5 * z, 0.0) + (b + 0.5) * z.ln()).exp();
    let w = prefactor * u;
    if w.im.abs() > IMAG_REL * w.re.abs() + IMAG_ABS {
        return Err(Error::SymmetryViolation(format!(
            "whittaker_w({a}, {b}, {z}) produced a non-real value {w}; \
             the conjugate-symmetric evaluation should cancel to the real axis"
        )));
    }
    Ok(w.re)
}

pub fn whittaker_m(a: f64, b: f64, z: f64, acc: &EvalAccuracy) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain(format!(
            "whittaker_m requires z > 0, got {z}"
        )));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "whittaker_m requires finite indices, got a={a}, b={b}"
        )));
    }
    let m = kummer_m(
        ComplexScalar::new(b - a + 0.5, 0.0),
        ComplexScalar::new(1.0 + 2.0 * b, 0.0),
        z,
        acc,
    )?;
    Ok((-0.5 * z).exp() * z.powf(b + 0.5) * m.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn acc() -> EvalAccuracy {
        EvalAccuracy::default()
    }

    fn real_b(b: f64) -> ComplexScalar {
        ComplexScalar::new(b, 0.0)
    }

    fn imag_b(b: f64) -> ComplexScalar {
        ComplexScalar::new(0.0, b)
    }

    #[test]
    fn closed_form_w_1_half() {
        // W_{1,1/2}(z) = z e^{-z/2}.
        for z in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let got = whittaker_w(1.0, real_b(0.5), z, &acc()).unwrap();
            assert_relative_eq!(got, z * (-0.5 * z).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn matches_high_precision_anchors() {
        // Baselines frozen from mpmath at 40 digits.
        let cases = [
            (0.3, 1.0, 0.5146374899323975289077),
            (-0.3, 1.0, 0.5146374899323975289077),
            (0.8, 0.35, 0.7230198937037774883598),
            (0.3, 1e-3, -0.06153650228618351808773),
            // Mid-range argument gap:
            (0.3, 15.0, 0.008208223379039425897166),
            (0.3, 20.0, 0.0009007626885401553137333),
            (0.3, 25.0, 0.00009257192098277711761745),
            // Large-argument expansion:
            (0.3, 35.0, 8.748411078186339000434e-7),
        ];
        for (b, z, want) in cases {
            let got = whittaker_w(1.0, real_b(b), z, &acc()).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn imaginary_index_stays_real() {
        let got = whittaker_w(1.0, imag_b(0.4), 1.0, &acc()).unwrap();
        assert_relative_eq!(got, 0.390199367680105515329, max_relative = 1e-12);
        let got = whittaker_w(1.0, imag_b(0.45), 20.0, &acc()).unwrap();
        assert_relative_eq!(got, 0.0008876787099605698907901, max_relative = 1e-12);
    }

    #[test]
    fn near_degenerate_index_anchor() {
        // b = sqrt(1.008)/2, the second index produced by a spectral
        // parameter of -1e-3: the underlying U sits 4e-3 from an integer
        // second parameter, squarely in the integral band. The absolute
        // agreement here is what keeps fourth-order remainder measurements
        // (at the 1e-14 scale) above the evaluation noise.
        let b = 0.5 * 1.008f64.sqrt();
        let got = whittaker_w(1.0, real_b(b), 2.0, &acc()).unwrap();
        assert!((got - 0.7364949327183082506471).abs() <= 1e-13);
    }

    #[test]
    fn small_argument_law() {
        // W_{1,b}(z) ~ Γ(2b)/Γ(b-1/2) z^{1/2-b} e^{-z/2} as z -> 0; frozen
        // ladder of relative deviations at b = 0.8.
        let b = 0.8f64;
        let lead = |z: f64| {
            let g_num = crate::specfun::gamma::gamma(ComplexScalar::new(2.0 * b, 0.0)).re;
            let g_den = crate::specfun::gamma::gamma(ComplexScalar::new(b - 0.5, 0.0)).re;
            (g_num / g_den) * z.powf(0.5 - b) * (-0.5 * z).exp()
        };
        let devs = [
            (1e-2, 0.02305350284569974264231),
            (1e-4, 0.0002175838679558884792253),
            (1e-6, 0.000002167249689028562086188),
        ];
        for (z, want) in devs {
            let got = whittaker_w(1.0, real_b(b), z, &acc()).unwrap() / lead(z) - 1.0;
            assert_relative_eq!(got, want, max_relative = 1e-6);
        }
    }

    #[test]
    fn whittaker_m_anchors_and_reduction() {
        let cases = [
            (1.0, 1.0, 1.0, 0.730259679946041182051),
            (1.0, 0.8, 2.5, 1.416150373896785473377),
            (1.0, 0.6, 1e-4, 0.0000398089075211267661265),
        ];
        for (a, b, z, want) in cases {
            let got = whittaker_m(a, b, z, &acc()).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
        // b - a + 1/2 = 0 collapses M to an elementary function:
        // M_{a, a-1/2}(z) = e^{-z/2} z^a.
        for z in [0.3, 1.0, 4.0] {
            let got = whittaker_m(1.25, 0.75, z, &acc()).unwrap();
            assert_relative_eq!(got, (-0.5 * z).exp() * z.powf(1.25), max_relative = 1e-14);
        }
    }

    #[test]
    fn whittaker_m_small_argument_normalization() {
        // M_{1,b}(z) / z^{b+1/2} -> 1 as z -> 0.
        for k in 2..=6 {
            let z = 10f64.powi(-k);
            let b = 0.6;
            let got = whittaker_m(1.0, b, z, &acc()).unwrap() / z.powf(b + 0.5);
            assert!((got - 1.0).abs() < 10.0 * z, "z={z}: normalized M = {got}");
        }
    }

    #[test]
    fn rejects_general_complex_index_and_bad_argument() {
        assert!(matches!(
            whittaker_w(1.0, ComplexScalar::new(0.3, 0.2), 1.0, &acc()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            whittaker_w(1.0, real_b(0.5), 0.0, &acc()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            whittaker_m(1.0, 0.5, -1.0, &acc()),
            Err(Error::Domain(_))
        ));
    }
}
