//! Fluctuation theory of Kendall random walks.
//!
//! A Kendall random walk is a Markov chain whose transition mechanism is the
//! Kendall generalized convolution: the next state is the larger of the
//! current modulus and a fresh step modulus, multiplied by an independent
//! symmetric factor that is heavy-tailed with a probability given by the
//! ratio of the two moduli. This crate implements
//!
//! * the step-law catalog and its Williamson transforms ([`steps`]),
//! * the convolution algebra: powers, transition laws, truncated moments and
//!   the iterated fluctuation integrals ([`algebra`]),
//! * first ladder epochs and heights over arbitrary levels, and the laws of
//!   running maxima and minima ([`fluctuations`]),
//! * an exact path simulator with reproducible parallel Monte Carlo
//!   estimators ([`simulator`]).
//!
//! Analytic quantities are available both as closed forms and as kernel
//! recurrences so that each route can be validated against the other.

pub mod algebra;
pub mod error;
pub mod fluctuations;
mod quad;
pub mod simulator;
pub mod steps;

pub use error::{KendallError, Result};
pub use steps::{invert_williamson, Alpha, MomentAlpha, StepLaw};

pub use algebra::{
    conv_cdf, conv_point, conv_point_cdf, conv_power_cdf, conv_williamson_g, integral_i,
    integral_ii, iter_integral_coeffs, psi, psi_integral, transition_cdf, truncated_moment,
    ConvMixture, Evaluated, IterIntegralCoeffs, Mode, PsiKernel,
};

pub use fluctuations::{
    joint_ladder_cdf, ladder_epoch_coeffs, ladder_epoch_pmf, ladder_epoch_tail, ladder_height_cdf,
    max_cdf, min_cdf, min_cdf_mode, weak_desc_epoch_pmf, FluctuationQuery, LadderCoefficients,
    MinRecursionState,
};

pub use simulator::{
    default_horizon, estimate, estimate_grid, first_passage_above, simulate_path, walk_step,
    EstimateWithCI, RngState, SimStatistic, WalkConfig, WalkPath,
};
