//! Adaptive Gauss-Kronrod quadrature (15-point rule, interval halving).

use crate::error::{Error, Result};
use crate::specfun::ComplexScalar;

/// Value types the quadrature kernel can accumulate.
pub trait QuadValue:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for ComplexScalar {
    fn zero() -> Self {
        ComplexScalar::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

// 15-point Kronrod abscissae on [-1, 1] (positive half), embedded 7-point
// Gauss weights, and Kronrod weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

struct Panel<T> {
    a: f64,
    b: f64,
    depth: usize,
    estimate: T,
    err: f64,
    resabs: f64,
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let min_err = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && min_err > err {
        err = min_err;
    }
    err
}

fn gk15_panel<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64, f64) {
    let center = 0.5 * (a + b);
    let half_len = 0.5 * (b - a);
    let abs_half = half_len.abs();

    let f_center = f(center);
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = f_center.modulus() * WGK[7];
    let mut samples = [T::zero(); 15];
    samples[7] = f_center;

    for j in 0..7 {
        let dx = half_len * XGK[j];
        let v1 = f(center - dx);
        let v2 = f(center + dx);
        samples[j] = v1;
        samples[14 - j] = v2;
        let sum = v1 + v2;
        res_kronrod = res_kronrod + sum * WGK[j];
        res_abs += WGK[j] * (v1.modulus() + v2.modulus());
        if j % 2 == 1 {
            // odd Kronrod indices are the embedded Gauss nodes
            res_gauss = res_gauss + sum * WG[j / 2];
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (samples[7] - mean).modulus();
    for j in 0..7 {
        res_asc += WGK[j] * ((samples[j] - mean).modulus() + (samples[14 - j] - mean).modulus());
    }

    let err = (res_kronrod - res_gauss).modulus() * abs_half;
    (
        res_kronrod * half_len,
        rescale_error(err, res_abs * abs_half, res_asc * abs_half),
        res_abs * abs_half,
    )
}

/// Integrate `f` over `[a, b]`, bisecting panels until the accumulated error
/// estimate drops under `max(abs_tol, rel_tol * |integral|)` or under the
/// roundoff floor `100 eps * integral(|f|)`, below which further refinement
/// cannot gain accuracy in f64.
pub fn adaptive_gk15<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: usize,
) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quadrature endpoints must be finite".into()));
    }
    if a == b {
        return Ok(T::zero());
    }

    let (est, err, resabs) = gk15_panel(&f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        depth: 0,
        estimate: est,
        err,
        resabs,
    }];
    let mut total = est;
    let mut total_err = err;
    let mut total_resabs = resabs;

    const MAX_PANELS: usize = 100_000;
    loop {
        let tol = abs_tol
            .max(rel_tol * total.modulus())
            .max(100.0 * f64::EPSILON * total_resabs);
        if total_err <= tol {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::NonConvergence(format!(
                "quadrature exceeded {MAX_PANELS} panels (err {total_err:.3e}, tol {tol:.3e})"
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let Panel {
            a: pa,
            b: pb,
            depth,
            estimate: p_est,
            err: p_err,
            resabs: p_resabs,
        } = panels.swap_remove(worst);
        if depth >= max_depth {
            return Err(Error::NonConvergence(format!(
                "quadrature panel [{pa:.6e}, {pb:.6e}] hit max depth {max_depth} \
                 (panel err {p_err:.3e})"
            )));
        }
        let mid = 0.5 * (pa + pb);
        let (e1, r1, s1) = gk15_panel(&f, pa, mid);
        let (e2, r2, s2) = gk15_panel(&f, mid, pb);
        total = total - p_est + e1 + e2;
        total_err = total_err - p_err + r1 + r2;
        total_resabs = total_resabs - p_resabs + s1 + s2;
        panels.push(Panel {
            a: pa,
            b: mid,
            depth: depth + 1,
            estimate: e1,
            err: r1,
            resabs: s1,
        });
        panels.push(Panel {
            a: mid,
            b: pb,
            depth: depth + 1,
            estimate: e2,
            err: r2,
            resabs: s2,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        // degree-7 polynomial is exact for the embedded Gauss rule already
        let v = adaptive_gk15(|x: f64| x.powi(7) - 3.0 * x.powi(2), 0.0, 2.0, 1e-14, 1e-14, 10)
            .unwrap();
        assert_relative_eq!(v, 256.0 / 8.0 - 8.0, max_relative = 1e-14);
    }

    #[test]
    fn smooth_exponential() {
        let v = adaptive_gk15(|x: f64| (-x).exp(), 0.0, 30.0, 1e-14, 1e-14, 40).unwrap();
        assert_relative_eq!(v, 1.0 - (-30.0f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn integrable_endpoint_spike() {
        // 1/sqrt(x) on (0, 1]: steep but resolvable by halving toward 0
        let v = adaptive_gk15(|x: f64| 1.0 / x.max(1e-300).sqrt(), 1e-12, 1.0, 1e-9, 1e-9, 40)
            .unwrap();
        assert_relative_eq!(v, 2.0 - 2e-6, max_relative = 1e-7);
    }

    #[test]
    fn complex_oscillatory() {
        // integral of exp(i x) over [0, pi] = 2i
        let v = adaptive_gk15(
            |x: f64| ComplexScalar::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            1e-13,
            1e-13,
            40,
        )
        .unwrap();
        assert_relative_eq!(v.re, 0.0, epsilon = 1e-13);
        assert_relative_eq!(v.im, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn degenerate_interval_is_zero() {
        let v = adaptive_gk15(|x: f64| x.exp(), 1.5, 1.5, 1e-12, 1e-12, 10).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn depth_exhaustion_reported() {
        // non-integrable singularity cannot converge
        let r = adaptive_gk15(|x: f64| 1.0 / x, 0.0, 1.0, 1e-12, 1e-12, 8);
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }
}
