//! Contract, model and engine configuration types.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Contract and market data for a down-and-out barrier call.
///
/// The barrier `L` is a constant lower barrier monitored continuously;
/// the option is alive at inception (`L < S`). Rates are continuously
/// compounded; for currency options `rate_dom` is the domestic rate and
/// `rate_for` the foreign rate, so the carry is `alpha = rate_dom - rate_for`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Spot price S > 0.
    pub spot: f64,
    /// Strike K > 0.
    pub strike: f64,
    /// Lower knock-out barrier L, 0 < L < S.
    pub barrier: f64,
    /// Maturity T in years, > 0.
    pub maturity: f64,
    /// Domestic (discounting) rate c.
    pub rate_dom: f64,
    /// Foreign rate / continuous yield q.
    pub rate_for: f64,
}

impl MarketParams {
    /// Carry rate `alpha = c - q` entering the risk-neutral drift.
    #[inline]
    pub fn carry(&self) -> f64 {
        self.rate_dom - self.rate_for
    }

    /// Log-spot `x = ln S`.
    #[inline]
    pub fn log_spot(&self) -> f64 {
        self.spot.ln()
    }

    /// Log-barrier `l = ln L`.
    #[inline]
    pub fn log_barrier(&self) -> f64 {
        self.barrier.ln()
    }

    /// Checks positivity and ordering constraints, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if !(self.spot > 0.0) || !self.spot.is_finite() {
            return Err(Error::invalid("spot", format!("must be > 0, got {}", self.spot)));
        }
        if !(self.strike > 0.0) || !self.strike.is_finite() {
            return Err(Error::invalid("strike", format!("must be > 0, got {}", self.strike)));
        }
        if !(self.barrier > 0.0) || !self.barrier.is_finite() {
            return Err(Error::invalid("barrier", format!("must be > 0, got {}", self.barrier)));
        }
        if self.barrier >= self.spot {
            return Err(Error::invalid(
                "barrier",
                format!("must lie below spot (option alive at inception), got L={} >= S={}", self.barrier, self.spot),
            ));
        }
        if !(self.maturity > 0.0) || !self.maturity.is_finite() {
            return Err(Error::invalid("maturity", format!("must be > 0, got {}", self.maturity)));
        }
        if !self.rate_dom.is_finite() || !self.rate_for.is_finite() {
            return Err(Error::invalid("rate_dom", "rates must be finite".to_string()));
        }
        Ok(())
    }
}

/// Volatility dynamics of the perturbed model
/// `d sigma = eps*lambda (theta - sigma) dt + eps*nu sigma (rho dB1 + sqrt(1-rho^2) dB2)`.
///
/// The correction term of the price expansion is linear in `(nu, lambda)` and
/// multiplied by `epsilon`, so benchmark parameter sets quoted as composite
/// products `eps*nu`, `eps*lambda` can be represented with `epsilon = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvParams {
    /// Initial volatility sigma_0 > 0.
    pub sigma0: f64,
    /// Perturbation size, in [0, 1].
    pub epsilon: f64,
    /// Vol-of-vol nu >= 0.
    pub vol_of_vol: f64,
    /// Correlation rho between price and volatility shocks, in [-1, 1].
    pub rho: f64,
    /// Mean-reversion speed lambda >= 0.
    pub mean_reversion: f64,
    /// Mean-reversion level theta >= 0.
    pub mean_level: f64,
}

impl SvParams {
    /// Constant-volatility (Black-Scholes) parameters: `epsilon = 0`.
    pub fn constant_vol(sigma0: f64) -> Self {
        SvParams {
            sigma0,
            epsilon: 0.0,
            vol_of_vol: 0.0,
            rho: 0.0,
            mean_reversion: 0.0,
            mean_level: 0.0,
        }
    }

    /// Effective vol-of-vol `eps * nu` entering the simulated dynamics.
    #[inline]
    pub fn eps_nu(&self) -> f64 {
        self.epsilon * self.vol_of_vol
    }

    /// Effective mean-reversion speed `eps * lambda` entering the simulated dynamics.
    #[inline]
    pub fn eps_lambda(&self) -> f64 {
        self.epsilon * self.mean_reversion
    }

    /// True when the model degenerates to driftless log-normal SABR
    /// (no mean reversion); the 1-D correction formula applies if
    /// additionally both rates vanish.
    #[inline]
    pub fn is_sabr(&self) -> bool {
        self.mean_reversion == 0.0
    }

    /// Checks ranges, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0 > 0.0) || !self.sigma0.is_finite() {
            return Err(Error::invalid("sigma0", format!("must be > 0, got {}", self.sigma0)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::invalid("epsilon", format!("must lie in [0, 1], got {}", self.epsilon)));
        }
        if !(self.vol_of_vol >= 0.0) || !self.vol_of_vol.is_finite() {
            return Err(Error::invalid("eps-nu", format!("vol-of-vol must be >= 0, got {}", self.vol_of_vol)));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid("rho", format!("must lie in [-1, 1], got {}", self.rho)));
        }
        if !(self.mean_reversion >= 0.0) || !self.mean_reversion.is_finite() {
            return Err(Error::invalid("eps-lambda", format!("mean reversion must be >= 0, got {}", self.mean_reversion)));
        }
        if !(self.mean_level >= 0.0) || !self.mean_level.is_finite() {
            return Err(Error::invalid("theta", format!("mean level must be >= 0, got {}", self.mean_level)));
        }
        Ok(())
    }
}

/// Quadrature scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadScheme {
    /// Fixed tensor-product Gauss-Legendre nodes (deterministic cost).
    GaussLegendreTensor,
    /// Adaptive panel bisection driven by the configured tolerances.
    Adaptive,
}

/// Grid sizes, truncation and tolerances for the quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Nodes for the time integral (>= 8).
    pub time_nodes: usize,
    /// Nodes per spatial panel (>= 16).
    pub space_nodes: usize,
    /// Upper truncation multiplier k: the spatial integral is cut at
    /// `x + k sigma sqrt(t)`; the discarded Gaussian tail is O(exp(-k^2/2)).
    pub space_cutoff_mult: f64,
    /// Scheme used by the integrators.
    pub scheme: QuadScheme,
    /// Absolute tolerance for adaptive refinement.
    pub abs_tol: f64,
    /// Relative tolerance for adaptive refinement.
    pub rel_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            time_nodes: 64,
            space_nodes: 48,
            space_cutoff_mult: 10.0,
            scheme: QuadScheme::GaussLegendreTensor,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
        }
    }
}

impl QuadConfig {
    /// Checks node counts and tolerances.
    pub fn validate(&self) -> Result<()> {
        if self.time_nodes < 8 {
            return Err(Error::invalid("quad-time-nodes", format!("must be >= 8, got {}", self.time_nodes)));
        }
        if self.space_nodes < 16 {
            return Err(Error::invalid("quad-space-nodes", format!("must be >= 16, got {}", self.space_nodes)));
        }
        if !(self.space_cutoff_mult > 0.0) {
            return Err(Error::invalid("space-cutoff-mult", format!("must be > 0, got {}", self.space_cutoff_mult)));
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::invalid("abs-tol", "tolerances must be > 0".to_string()));
        }
        Ok(())
    }
}

/// Barrier-kill handling in the Monte Carlo engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KillMode {
    /// Kill the path once a grid point lands at or below the barrier.
    Discrete,
    /// Weight each step by the Brownian-bridge survival probability,
    /// removing the leading O(sqrt(T/n)) crossing bias.
    Bridge,
}

/// Discretisation of the volatility SDE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolScheme {
    /// Euler with the negative part of sigma zeroed in drift and diffusion.
    FullTruncationEuler,
    /// Exact log-normal step; valid only without mean reversion.
    LogEuler,
}

/// Monte Carlo engine configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Time steps per path (>= 1).
    pub n_steps: usize,
    /// Simulated paths (>= 1).
    pub n_paths: usize,
    /// Seed for the per-path counter-based RNG streams. Identical
    /// `(seed, config)` gives bit-identical estimates at any thread count.
    pub seed: u64,
    /// Barrier-kill handling.
    pub kill_mode: KillMode,
    /// Volatility discretisation.
    pub vol_scheme: VolScheme,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_steps: 512,
            n_paths: 200_000,
            seed: 42,
            kill_mode: KillMode::Bridge,
            vol_scheme: VolScheme::FullTruncationEuler,
        }
    }
}

impl McConfig {
    /// Checks step/path counts.
    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::invalid("steps", "must be >= 1".to_string()));
        }
        if self.n_paths == 0 {
            return Err(Error::invalid("paths", "must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Which route produced the correction term of a [`PriceReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriceMethod {
    /// 2-D quadrature of the killed kernel against the correction integrand.
    General2d,
    /// Driftless log-normal SABR reduction (closed form + 1-D integral).
    Sabr1d,
    /// Path-integral Monte Carlo representation of the correction.
    FkOracle,
}

/// Solver metadata attached to a [`PriceReport`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Time nodes used by the quadrature, when applicable.
    pub time_nodes: Option<usize>,
    /// Space nodes used by the quadrature, when applicable.
    pub space_nodes: Option<usize>,
    /// Paths used by the Monte Carlo route, when applicable.
    pub n_paths: Option<usize>,
    /// Steps used by the Monte Carlo route, when applicable.
    pub n_steps: Option<usize>,
    /// Standard error of the correction estimate, when stochastic.
    pub stderr: Option<f64>,
}

/// First-order price decomposition `u0 + epsilon * v1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceReport {
    /// Zeroth-order (Black-Scholes barrier) price.
    pub u0: f64,
    /// First-order correction per unit epsilon.
    pub v1: f64,
    /// Perturbation size the correction is scaled by.
    pub epsilon: f64,
    /// `u0 + epsilon * v1`, stored exactly as assembled.
    pub first_order_price: f64,
    /// Route that produced `v1`.
    pub method: PriceMethod,
    /// Solver metadata.
    pub diagnostics: Diagnostics,
}

impl PriceReport {
    /// Assembles a report; `first_order_price` is fixed to `u0 + epsilon * v1`.
    pub fn new(u0: f64, v1: f64, epsilon: f64, method: PriceMethod, diagnostics: Diagnostics) -> Self {
        PriceReport {
            u0,
            v1,
            epsilon,
            first_order_price: u0 + epsilon * v1,
            method,
            diagnostics,
        }
    }
}

/// Monte Carlo benchmark estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Discounted price estimate.
    pub price: f64,
    /// Standard error (sample standard deviation / sqrt(paths)).
    pub stderr: f64,
    /// Paths with zero surviving weight (knocked out).
    pub n_killed: usize,
    /// Wall-clock seconds spent simulating.
    pub elapsed: f64,
}
