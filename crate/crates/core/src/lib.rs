//! Entropy-contraction analysis of probabilistic cellular automata (PCA) and
//! interacting particle systems (IPS) with stationary Bernoulli measures.
//!
//! The crate works on finite windows of `Z^d`: exact pushforwards of window
//! marginals, stationarity checks against product measures, noise
//! decompositions of local rules, finite-torus generators evolved by
//! uniformization, and Monte Carlo simulation with Poisson clocks.
//!
//! Tables and kernels are generic over [`Scalar`]; use [`Exact`] for
//! zero-tolerance verdicts and [`Real`] for entropy curves.

pub mod decompose;
pub mod error;
pub mod influence;
pub mod ips;
pub mod lattice;
pub mod matrix;
pub mod measures;
pub mod pca;
pub mod rules;
pub mod scalar;

pub use error::{Error, Result};
pub use lattice::{Neighbourhood, Site, SiteSet, TorusSpec};
pub use matrix::Matrix;
pub use measures::{PatternDistribution, Window};
pub use rules::{LocalRule, Marginal, NumericMode, Symbol};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;
/// Binary64 scalar.
pub type Real = f64;

pub type ExactRule = LocalRule<Exact>;
pub type RealRule = LocalRule<Real>;
pub type ExactMarginal = Marginal<Exact>;
pub type RealMarginal = Marginal<Real>;
pub type ExactDistribution = PatternDistribution<Exact>;
pub type RealDistribution = PatternDistribution<Real>;
pub type ExactMatrix = Matrix<Exact>;
pub type RealMatrix = Matrix<Real>;

/// Default cap on dense weight vectors for exact window evolution.
pub const DEFAULT_WINDOW_CAP: usize = 1 << 24;
/// Default cap on torus state spaces.
pub const DEFAULT_TORUS_CAP: usize = 1 << 20;

/// State-space caps, overridable through `ERGO_STATE_CAP`.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub window: usize,
    pub torus: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { window: DEFAULT_WINDOW_CAP, torus: DEFAULT_TORUS_CAP }
    }
}

impl Caps {
    /// Reads `ERGO_STATE_CAP` (a weight count applied to both caps).
    pub fn from_env() -> Self {
        match std::env::var("ERGO_STATE_CAP").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            Some(cap) => Caps { window: cap, torus: cap },
            None => Caps::default(),
        }
    }
}
