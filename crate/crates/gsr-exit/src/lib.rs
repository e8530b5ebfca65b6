//! Exact distributional characteristics of the first exit time of the
//! Generalized Shiryaev-Roberts (GSR) diffusion `dR = dt + mu * R dB`
//! from the interval `[0, A]`, together with a Monte Carlo oracle.
//!
//! The closed-form side runs through Whittaker W functions: the Laplace
//! transform of the exit time is a quotient of two W evaluations, the
//! principal eigenvalue `lambda_A` is the largest nonpositive zero of
//! `W_{1, xi(lambda)/2}(2/(mu^2 A))`, and the first three moments come out
//! of the transform's derivatives in terms of the exponential integral and
//! a Meijer-G special case. The simulation side integrates the SDE with an
//! exact multiplicative propagator and estimates survival curves, empirical
//! transforms, and exponentiality diagnostics.

pub mod error;
pub mod exitlaw;
pub mod montecarlo;
pub mod specfun;
pub mod spectral;
mod util;

pub use error::{Error, Result};
pub use exitlaw::{ExitProblem, MgfQuery, MomentSet};
pub use montecarlo::{ExitTimeSample, SimConfig, SurvivalCurve};
pub use specfun::{ComplexScalar, EvalAccuracy};
pub use spectral::{EigenResult, ModelParams, SpectralPoint};
