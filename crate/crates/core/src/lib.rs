//! Pricing engine for continuously monitored down-and-out barrier calls
//! under a perturbed stochastic volatility model.
//!
//! The volatility follows
//! `d sigma = eps lambda (theta - sigma) dt + eps nu sigma (rho dB1 + sqrt(1-rho^2) dB2)`
//! around a constant level, which covers the log-normal SABR model as the
//! driftless special case. Prices are computed as the Black-Scholes barrier
//! price `u0` plus an explicitly integrable first-order correction
//! `eps * v1`, with every closed-form component cross-validated by an
//! independent numerical oracle:
//!
//! * [`analytic`] — vanilla and down-and-out barrier prices and the
//!   correction integrand (a mixed vanna/vega of the barrier price),
//!   gated by finite differences.
//! * [`kernel`] — the killed log-price diffusion: transition density,
//!   survival and first-hitting-time laws, and semigroup quadrature.
//! * [`expansion`] — the correction `v1` by 2-D quadrature, by the 1-D
//!   SABR reduction, and by a Feynman-Kac Monte Carlo oracle.
//! * [`montecarlo`] — a deterministic parallel benchmark engine with
//!   discrete or Brownian-bridge barrier killing.
//! * [`cases`] — the reference parameter grid used by the benchmark
//!   tables and validation suite.

pub mod analytic;
pub mod cases;
pub mod error;
pub mod expansion;
pub mod kernel;
pub mod montecarlo;
pub mod quad;
pub mod types;

pub use error::{Error, Result};
pub use expansion::{price_first_order, v1_fk_oracle, v1_general, v1_sabr, FkEstimate};
pub use kernel::KilledDiffusion;
pub use montecarlo::{convergence_study, simulate_price, ConvergenceStudy};
pub use types::{
    Diagnostics, KillMode, MarketParams, McConfig, McEstimate, PriceMethod, PriceReport,
    QuadConfig, QuadScheme, SvParams, VolScheme,
};
