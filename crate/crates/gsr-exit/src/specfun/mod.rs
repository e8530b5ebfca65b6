//! Special functions underlying the exit-time law: exponential integral,
//! confluent hypergeometric (Kummer M, Tricomi U), Whittaker M and W, the
//! Meijer G(3,1;2,3) special case, and the L(x) combination built from them.

pub mod expint;
pub mod gamma;
pub mod kummer;
pub mod meijer;
pub mod quad;
pub mod tricomi;
pub mod whittaker;

pub use expint::{exp_integral_e1, scaled_e1};
pub use kummer::kummer_m;
pub use meijer::{l_func, meijer_g3123};
pub use tricomi::tricomi_u;
pub use whittaker::{whittaker_m, whittaker_w};

use crate::error::{Error, Result};

/// Complex value carrier. Second Whittaker indices are purely imaginary for
/// eigenvalue arguments below `-mu^2/8`, so the whole evaluation chain has
/// to pass through complex arithmetic even though inputs and outputs of the
/// public exit-law operations are real.
pub type ComplexScalar = num_complex::Complex<f64>;

/// Knobs for series truncation and adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalAccuracy {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
    pub quad_max_depth: usize,
}

impl Default for EvalAccuracy {
    fn default() -> Self {
        EvalAccuracy {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_terms: 500,
            quad_max_depth: 40,
        }
    }
}

impl EvalAccuracy {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Domain(format!(
                "tolerances must be strictly positive (abs_tol={}, rel_tol={})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_terms < 1 {
            return Err(Error::Domain("max_terms must be at least 1".into()));
        }
        Ok(())
    }
}
