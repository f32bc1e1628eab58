//! Reference parameter grid for the benchmark tables.
//!
//! Seven stochastic-volatility configurations sharing the same contract
//! (spot 100, barrier 95, half-year maturity, initial vol 15%), each priced
//! at strikes 100, 102 and 105. Cases 1-6 carry rates and/or mean
//! reversion; case 7 is the driftless log-normal SABR configuration.

use crate::types::{MarketParams, SvParams};

/// Strikes every case is priced at.
pub const BENCHMARK_STRIKES: [f64; 3] = [100.0, 102.0, 105.0];

/// Shared contract constants.
pub const BENCHMARK_SPOT: f64 = 100.0;
/// Lower knock-out barrier.
pub const BENCHMARK_BARRIER: f64 = 95.0;
/// Maturity in years.
pub const BENCHMARK_MATURITY: f64 = 0.5;
/// Initial volatility.
pub const BENCHMARK_SIGMA0: f64 = 0.15;

/// One row of the benchmark grid: rates and volatility dynamics. The
/// composite products `eps * nu` and `eps * lambda` are represented with
/// `epsilon = 1`, which leaves the first-order price unchanged.
#[derive(Debug, Clone, Copy)]
pub struct BenchmarkCase {
    /// 1-based case number.
    pub id: usize,
    /// Domestic rate c.
    pub rate_dom: f64,
    /// Foreign rate q.
    pub rate_for: f64,
    /// Composite vol-of-vol `eps * nu`.
    pub eps_nu: f64,
    /// Price/vol correlation.
    pub rho: f64,
    /// Composite mean-reversion speed `eps * lambda`.
    pub eps_lambda: f64,
    /// Mean-reversion level theta.
    pub mean_level: f64,
}

impl BenchmarkCase {
    /// Market parameters at the given strike.
    pub fn market(&self, strike: f64) -> MarketParams {
        MarketParams {
            spot: BENCHMARK_SPOT,
            strike,
            barrier: BENCHMARK_BARRIER,
            maturity: BENCHMARK_MATURITY,
            rate_dom: self.rate_dom,
            rate_for: self.rate_for,
        }
    }

    /// Volatility dynamics with the composite parametrisation.
    pub fn sv(&self) -> SvParams {
        SvParams {
            sigma0: BENCHMARK_SIGMA0,
            epsilon: 1.0,
            vol_of_vol: self.eps_nu,
            rho: self.rho,
            mean_reversion: self.eps_lambda,
            mean_level: self.mean_level,
        }
    }
}

/// The seven benchmark configurations.
pub fn benchmark_cases() -> [BenchmarkCase; 7] {
    [
        BenchmarkCase { id: 1, rate_dom: 0.01, rate_for: 0.0, eps_nu: 0.20, rho: -0.5, eps_lambda: 0.0, mean_level: 0.00 },
        BenchmarkCase { id: 2, rate_dom: 0.01, rate_for: 0.0, eps_nu: 0.35, rho: -0.7, eps_lambda: 0.0, mean_level: 0.00 },
        BenchmarkCase { id: 3, rate_dom: 0.05, rate_for: 0.0, eps_nu: 0.35, rho: -0.7, eps_lambda: 0.0, mean_level: 0.00 },
        BenchmarkCase { id: 4, rate_dom: 0.05, rate_for: 0.1, eps_nu: 0.20, rho: -0.5, eps_lambda: 0.0, mean_level: 0.00 },
        BenchmarkCase { id: 5, rate_dom: 0.01, rate_for: 0.0, eps_nu: 0.20, rho: -0.5, eps_lambda: 0.2, mean_level: 0.25 },
        BenchmarkCase { id: 6, rate_dom: 0.01, rate_for: 0.0, eps_nu: 0.20, rho: -0.5, eps_lambda: 0.5, mean_level: 0.25 },
        BenchmarkCase { id: 7, rate_dom: 0.00, rate_for: 0.0, eps_nu: 0.20, rho: -0.5, eps_lambda: 0.0, mean_level: 0.00 },
    ]
}
