//! Distributional characteristics of the exit time from `[0, A]`: the
//! Laplace transform (moment generating function in `-alpha`), its scaled
//! variant, closed-form first three moments, the cubic small-`lambda`
//! expansion of the Whittaker eigenfunction, and a finite-difference
//! consistency route for the moments.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::specfun::{l_func, meijer_g3123, tricomi_u, EvalAccuracy};
use crate::spectral::{solve_lambda_a, xi_of_lambda, ModelParams};

/// Exit geometry: threshold `a` and starting point `r`, `0 <= r <= a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExitProblem {
    a: f64,
    r: f64,
}

impl ExitProblem {
    pub fn new(a: f64, r: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Domain(format!(
                "threshold must be positive and finite, got {a}"
            )));
        }
        if !r.is_finite() || r < 0.0 || r > a {
            return Err(Error::Domain(format!(
                "starting point must satisfy 0 <= r <= {a}, got {r}"
            )));
        }
        Ok(Self { a, r })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// One transform evaluation request.
#[derive(Clone, Copy, Debug)]
pub struct MgfQuery {
    pub alpha: f64,
    pub problem: ExitProblem,
    pub params: ModelParams,
}

/// First three raw moments of the exit time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSet {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

const IMAG_REL: f64 = 1e-8;
const IMAG_ABS: f64 = 1e-12;

/// The increasing eigenfunction `Phi(x, alpha)` of the generator, in the
/// exponent-cancelled form
/// `Phi = z^(b - 1/2) U(b - 1/2, 1 + 2b, z)` with `z = 2/(mu^2 x)` and
/// `b = xi(alpha)/2`. Normalized so `Phi(x, 0) = 1` exactly for every `x`.
pub fn eigenfunction_numerator(x: f64, alpha: f64, params: &ModelParams) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "evaluation point must be positive, got {x}"
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "transform argument must be finite, got {alpha}"
        )));
    }
    let acc = EvalAccuracy::default();
    let z = 2.0 / (params.mu() * params.mu() * x);
    let b = xi_of_lambda(alpha, params) * 0.5;
    let a_u = b - 0.5;
    let b_u = b * 2.0 + 1.0;
    let val = (a_u * z.ln()).exp() * tricomi_u(a_u, b_u, z, &acc)?;
    if val.im.abs() > IMAG_REL * val.re.abs() + IMAG_ABS {
        return Err(Error::SymmetryViolation(format!(
            "eigenfunction at x={x}, alpha={alpha} has spurious imaginary part \
             {:e} against real part {:e}",
            val.im, val.re
        )));
    }
    Ok(val.re)
}

/// Principal-eigenvalue cache keyed by the exact bit patterns of `(A, mu)`.
fn cached_lambda_a(a_threshold: f64, params: &ModelParams) -> Result<f64> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u64), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = (a_threshold.to_bits(), params.mu().to_bits());
    if let Some(v) = cache.read().expect("eigenvalue cache poisoned").get(&key) {
        return Ok(*v);
    }
    let root = solve_lambda_a(a_threshold, params, 1e-12)?.lambda_a;
    cache
        .write()
        .expect("eigenvalue cache poisoned")
        .insert(key, root);
    Ok(root)
}

/// `E[exp(-alpha S)]` for the exit time `S` started from `r`:
/// `Phi(r, alpha) / Phi(A, alpha)`. Defined for `alpha > lambda_A`; negative
/// arguments are admitted down to (but excluding) the principal eigenvalue.
pub fn mgf(query: &MgfQuery) -> Result<f64> {
    let MgfQuery {
        alpha,
        problem,
        params,
    } = query;
    if !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "transform argument must be finite, got {alpha}"
        )));
    }
    // Started on the boundary the exit time is 0 and the transform is 1 for
    // every argument, including those below the eigenvalue.
    if problem.r == problem.a {
        return Ok(1.0);
    }
    if *alpha < 0.0 {
        let lambda_a = cached_lambda_a(problem.a, params)?;
        if *alpha <= lambda_a {
            return Err(Error::Domain(format!(
                "transform argument {alpha} does not exceed the principal \
                 eigenvalue {lambda_a:e}; the expectation is infinite there"
            )));
        }
    }
    let num = if problem.r == 0.0 {
        1.0
    } else {
        eigenfunction_numerator(problem.r, *alpha, params)?
    };
    let den = eigenfunction_numerator(problem.a, *alpha, params)?;
    if !(den > 0.0) {
        return Err(Error::NonConvergence(format!(
            "denominator eigenfunction evaluated to {den:e} at the threshold; \
             the transform argument is too close to the eigenvalue for the \
             working precision"
        )));
    }
    Ok(num / den)
}

/// Transform of the scaled exit time `|lambda_A| S`:
/// `E[exp(-alpha |lambda_A| S)]`, defined for `alpha > -1`. As the threshold
/// grows this converges to `1/(1 + alpha)`, the transform of a unit
/// exponential.
pub fn scaled_mgf(alpha: f64, problem: &ExitProblem, params: &ModelParams) -> Result<f64> {
    if !alpha.is_finite() || alpha <= -1.0 {
        return Err(Error::Domain(format!(
            "scaled transform argument must exceed -1, got {alpha}"
        )));
    }
    let lambda_a = cached_lambda_a(problem.a(), params)?;
    mgf(&MgfQuery {
        alpha: -alpha * lambda_a,
        problem: *problem,
        params: *params,
    })
}

/// Cubic expansion of `W_{1, xi(lambda)/2}(2/(mu^2 x))` around `lambda = 0`:
/// with `c = 2/mu^2` and `z = 2/(mu^2 x)`,
/// `c e^{-z/2} { 1/x + lambda + c L(z) lambda^2 + c^2 (G(z) - 2 L(z)) lambda^3 }`,
/// where `L` and `G` are the logarithmic-integral kernels from `specfun`.
/// The remainder is `O(lambda^4)` uniformly on compact `x` ranges.
pub fn taylor_w_expansion(lambda: f64, x: f64, params: &ModelParams) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "evaluation point must be positive, got {x}"
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "expansion argument must be finite, got {lambda}"
        )));
    }
    let acc = EvalAccuracy::default();
    let c = 2.0 / (params.mu() * params.mu());
    let z = c / x;
    let l = l_func(z, &acc)?;
    let g = meijer_g3123(z, &acc)?;
    let poly = 1.0 / x + lambda + c * l * lambda * lambda + c * c * (g - 2.0 * l) * lambda.powi(3);
    Ok(c * (-0.5 * z).exp() * poly)
}

/// Closed-form first three moments of the exit time started from `r`.
///
/// With `c = 2/mu^2`, `z_x = 2/(mu^2 x)`, `L` and `G` as in `specfun`:
/// `m1 = A - r`,
/// `m2 = (4/mu^2)(r L(z_r) - A L(z_A)) - 2A(r - A)`,
/// `m3 = -6c^2 { (r G(z_r) - 2 r L(z_r)) - (A G(z_A) - 2 A L(z_A)) }`
/// `      + 6Ac { r L(z_r) - 2A L(z_A) + r L(z_A) } - 6A^2 (r - A)`.
/// Terms in `r` vanish in the limit `r -> 0` (both `r L(z_r)` and
/// `r G(z_r)` go to 0), which is taken exactly.
///
/// The sign of the final `m3` term is fixed by an independent
/// finite-difference check of the transform and by simulation; the `+`
/// variant produces a negative third moment and is a transcription error.
pub fn moments(problem: &ExitProblem, params: &ModelParams) -> Result<MomentSet> {
    let acc = EvalAccuracy::default();
    let a = problem.a();
    let r = problem.r();
    if r == a {
        return Ok(MomentSet {
            m1: 0.0,
            m2: 0.0,
            m3: 0.0,
        });
    }
    let mu2 = params.mu() * params.mu();
    let c = 2.0 / mu2;
    let z_a = c / a;
    let l_a = l_func(z_a, &acc)?;
    let g_a = meijer_g3123(z_a, &acc)?;
    let (rl_r, rg_r) = if r == 0.0 {
        (0.0, 0.0)
    } else {
        let z_r = c / r;
        (r * l_func(z_r, &acc)?, r * meijer_g3123(z_r, &acc)?)
    };

    let m1 = a - r;
    let m2 = (4.0 / mu2) * (rl_r - a * l_a) - 2.0 * a * (r - a);
    let m3 = -6.0 * c * c * ((rg_r - 2.0 * rl_r) - (a * g_a - 2.0 * a * l_a))
        + 6.0 * a * c * (rl_r - 2.0 * a * l_a + r * l_a)
        - 6.0 * a * a * (r - a);
    Ok(MomentSet { m1, m2, m3 })
}

/// Step used by `mgf_derivative_moments` when the caller has no better one:
/// small enough that the cubic truncation error is negligible, large enough
/// that the transform differences stay well above roundoff.
pub fn default_derivative_step(problem: &ExitProblem) -> f64 {
    1e-2 / (problem.a() - problem.r() + 1.0)
}

/// Moments recovered from central finite differences of the transform at 0,
/// with one Richardson extrapolation (`(4 D(h/2) - D(h)) / 3`). Serves as an
/// independent consistency route for `moments`; it is strictly less
/// accurate. Requires `2h < -lambda_A` so every stencil point stays inside
/// the domain of the transform.
pub fn mgf_derivative_moments(
    problem: &ExitProblem,
    params: &ModelParams,
    h: f64,
) -> Result<MomentSet> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Domain(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    if problem.r() == problem.a() {
        return Ok(MomentSet {
            m1: 0.0,
            m2: 0.0,
            m3: 0.0,
        });
    }
    let lambda_a = cached_lambda_a(problem.a(), params)?;
    if 2.0 * h >= -lambda_a {
        return Err(Error::StepSize(format!(
            "step {h} too large: the widest stencil point -2h = {:e} leaves \
             the transform domain (principal eigenvalue {lambda_a:e})",
            -2.0 * h
        )));
    }
    let m_at = |alpha: f64| -> Result<f64> {
        mgf(&MgfQuery {
            alpha,
            problem: *problem,
            params: *params,
        })
    };
    // Six evaluations shared by both stencil scales; M(0) = 1 exactly.
    let mh2p = m_at(0.5 * h)?;
    let mh2m = m_at(-0.5 * h)?;
    let mhp = m_at(h)?;
    let mhm = m_at(-h)?;
    let m2hp = m_at(2.0 * h)?;
    let m2hm = m_at(-2.0 * h)?;

    let stencils = |mp: f64, mm: f64, m2p: f64, m2m: f64, s: f64| {
        let d1 = (mp - mm) / (2.0 * s);
        let d2 = (mp - 2.0 + mm) / (s * s);
        let d3 = (m2p - 2.0 * mp + 2.0 * mm - m2m) / (2.0 * s * s * s);
        (d1, d2, d3)
    };
    let (d1a, d2a, d3a) = stencils(mh2p, mh2m, mhp, mhm, 0.5 * h);
    let (d1b, d2b, d3b) = stencils(mhp, mhm, m2hp, m2hm, h);
    let richardson = |fine: f64, coarse: f64| (4.0 * fine - coarse) / 3.0;

    Ok(MomentSet {
        m1: -richardson(d1a, d1b),
        m2: richardson(d2a, d2b),
        m3: -richardson(d3a, d3b),
    })
}
