//! Closed-form Black-Scholes layer.
//!
//! Vanilla and down-and-out barrier call prices under constant volatility,
//! the auxiliary arguments `d1`, `d2`, `c1`, `c2`, and the first-order
//! correction integrand `vartheta` — the mixed vanna/vega operator
//! `e^{c(T-t)} [rho nu sigma^2 d^2/(dx dsigma) + lambda(theta - sigma) d/dsigma]`
//! applied to the barrier price — in fully expanded form. Everything here is
//! pure and thread-safe.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::types::{MarketParams, SvParams};

/// `1 / sqrt(2 pi)`.
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_677_9;

/// Standard normal density `n(y) = exp(-y^2/2) / sqrt(2 pi)`.
#[inline]
pub fn norm_pdf(y: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * y * y).exp()
}

/// Standard normal CDF, evaluated through the complementary error function
/// (absolute error below 1e-15 over the whole line).
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

#[inline]
fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::domain(what.to_string()))
    }
}

#[inline]
pub(crate) fn d1_raw(t: f64, x: f64, alpha: f64, sigma: f64, strike: f64) -> f64 {
    let st = sigma * t.sqrt();
    (x - strike.ln() + alpha * t) / st + 0.5 * st
}

#[inline]
pub(crate) fn c1_raw(t: f64, x: f64, alpha: f64, sigma: f64, strike: f64, log_barrier: f64) -> f64 {
    d1_raw(t, 2.0 * log_barrier - x, alpha, sigma, strike)
}

/// Moneyness argument `d1(t, x, alpha) = (x - ln K + alpha t)/(sigma sqrt(t)) + sigma sqrt(t)/2`.
pub fn d1(t: f64, x: f64, alpha: f64, sigma: f64, strike: f64) -> Result<f64> {
    require(t > 0.0, "d1 requires t > 0")?;
    require(sigma > 0.0, "d1 requires sigma > 0")?;
    require(strike > 0.0, "d1 requires strike > 0")?;
    Ok(d1_raw(t, x, alpha, sigma, strike))
}

/// `d2 = d1 - sigma sqrt(t)`.
pub fn d2(t: f64, x: f64, alpha: f64, sigma: f64, strike: f64) -> Result<f64> {
    Ok(d1(t, x, alpha, sigma, strike)? - sigma * t.sqrt())
}

/// Reflected moneyness argument
/// `c1(t, x, alpha) = (2l - x - ln K + alpha t)/(sigma sqrt(t)) + sigma sqrt(t)/2`,
/// i.e. `d1` evaluated at the barrier-mirrored point `2l - x`.
pub fn c1(t: f64, x: f64, alpha: f64, sigma: f64, strike: f64, log_barrier: f64) -> Result<f64> {
    require(t > 0.0, "c1 requires t > 0")?;
    require(sigma > 0.0, "c1 requires sigma > 0")?;
    require(strike > 0.0, "c1 requires strike > 0")?;
    Ok(c1_raw(t, x, alpha, sigma, strike, log_barrier))
}

/// Squared normalised log-ratio `c2(t, y) = ((ln y + sigma^2 t / 2) / (sigma sqrt(t)))^2`.
pub fn c2(t: f64, y: f64, sigma: f64) -> Result<f64> {
    require(t > 0.0, "c2 requires t > 0")?;
    require(y > 0.0, "c2 requires y > 0")?;
    require(sigma > 0.0, "c2 requires sigma > 0")?;
    let z = (y.ln() + 0.5 * sigma * sigma * t) / (sigma * t.sqrt());
    Ok(z * z)
}

#[inline]
pub(crate) fn bs_vanilla_raw(
    t: f64,
    spot: f64,
    strike: f64,
    alpha: f64,
    sigma: f64,
    rate_dom: f64,
    rate_for: f64,
) -> f64 {
    let x = spot.ln();
    let st = sigma * t.sqrt();
    let d1v = d1_raw(t, x, alpha, sigma, strike);
    let d2v = d1v - st;
    (-rate_for * t).exp() * spot * norm_cdf(d1v) - (-rate_dom * t).exp() * strike * norm_cdf(d2v)
}

/// Plain vanilla call `e^{-q t} S N(d1) - e^{-c t} K N(d2)` with carry
/// `alpha = c - q` entering the moneyness arguments.
pub fn bs_vanilla_call(
    t: f64,
    spot: f64,
    strike: f64,
    alpha: f64,
    sigma: f64,
    rate_dom: f64,
    rate_for: f64,
) -> Result<f64> {
    require(t > 0.0, "bs_vanilla_call requires t > 0")?;
    require(spot > 0.0, "bs_vanilla_call requires spot > 0")?;
    require(strike > 0.0, "bs_vanilla_call requires strike > 0")?;
    require(sigma > 0.0, "bs_vanilla_call requires sigma > 0")?;
    Ok(bs_vanilla_raw(t, spot, strike, alpha, sigma, rate_dom, rate_for))
}

pub(crate) fn bs_barrier_raw(
    t: f64,
    spot: f64,
    strike: f64,
    barrier: f64,
    alpha: f64,
    sigma: f64,
    rate_dom: f64,
    rate_for: f64,
) -> f64 {
    if spot <= barrier {
        return 0.0;
    }
    let direct = bs_vanilla_raw(t, spot, strike, alpha, sigma, rate_dom, rate_for);
    let reflected_spot = barrier * barrier / spot;
    let mirror = bs_vanilla_raw(t, reflected_spot, strike, alpha, sigma, rate_dom, rate_for);
    let exponent = (1.0 - 2.0 * alpha / (sigma * sigma)) * (spot / barrier).ln();
    // Large |exponent| cannot overflow the product when combined with ln of
    // the mirror leg, so switch to log space there.
    let reflected = if exponent.abs() > 50.0 {
        if mirror <= 0.0 {
            0.0
        } else {
            (exponent + mirror.ln()).exp()
        }
    } else {
        exponent.exp() * mirror
    };
    direct - reflected
}

/// Down-and-out barrier call under Black-Scholes:
/// `C(t, S) - (S/L)^{1 - 2 alpha / sigma^2} C(t, L^2/S)`.
///
/// Returns 0 at `S = L` (the boundary condition) and rejects `S < L`.
pub fn bs_barrier_down_out(
    t: f64,
    spot: f64,
    strike: f64,
    barrier: f64,
    alpha: f64,
    sigma: f64,
    rate_dom: f64,
    rate_for: f64,
) -> Result<f64> {
    require(t > 0.0, "bs_barrier_down_out requires t > 0")?;
    require(strike > 0.0, "bs_barrier_down_out requires strike > 0")?;
    require(barrier > 0.0, "bs_barrier_down_out requires barrier > 0")?;
    require(sigma > 0.0, "bs_barrier_down_out requires sigma > 0")?;
    require(
        spot >= barrier,
        "bs_barrier_down_out requires spot >= barrier (knocked out below)",
    )?;
    Ok(bs_barrier_raw(t, spot, strike, barrier, alpha, sigma, rate_dom, rate_for))
}

/// Precomputed contract/model constants for repeated `vartheta` evaluation
/// inside quadrature and path loops. Evaluation is unchecked: callers
/// guarantee `0 <= t < T` and `x > l`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ThetaCtx {
    pub maturity: f64,
    pub strike: f64,
    pub barrier: f64,
    pub log_barrier: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub rate_dom: f64,
    pub rate_for: f64,
    pub rho: f64,
    pub nu: f64,
    pub lambda: f64,
    pub theta_level: f64,
}

impl ThetaCtx {
    pub fn new(market: &MarketParams, sv: &SvParams) -> Self {
        ThetaCtx {
            maturity: market.maturity,
            strike: market.strike,
            barrier: market.barrier,
            log_barrier: market.log_barrier(),
            alpha: market.carry(),
            sigma: sv.sigma0,
            rate_dom: market.rate_dom,
            rate_for: market.rate_for,
            rho: sv.rho,
            nu: sv.vol_of_vol,
            lambda: sv.mean_reversion,
            theta_level: sv.mean_level,
        }
    }

    /// The correction integrand at calendar time `t` and log-price `x`.
    ///
    /// Expanded form of
    /// `e^{c tau} [rho nu sigma^2 vanna + lambda (theta - sigma) vega]` of the
    /// barrier price with `tau = T - t`: the direct leg contributes the
    /// vanna/vega of a vanilla call, the mirror leg contributes the same
    /// Greeks at the reflected spot `L^2/e^x` plus the sigma-dependence of
    /// the reflection exponent `(e^x/L)^{1 - 2 alpha / sigma^2}`.
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let tau = self.maturity - t;
        let sigma = self.sigma;
        let alpha = self.alpha;
        let l = self.log_barrier;
        let ex = x.exp();
        let st = sigma * tau.sqrt();
        let d1v = d1_raw(tau, x, alpha, sigma, self.strike);
        let d2v = d1v - st;
        let c1v = c1_raw(tau, x, alpha, sigma, self.strike, l);
        let xl = x - l;
        // (e^x/L)^{-2 alpha/sigma^2} and (e^x/L)^{1 - 2 alpha/sigma^2}
        let pow0 = (-2.0 * alpha / (sigma * sigma) * xl).exp();
        let pow1 = ((1.0 - 2.0 * alpha / (sigma * sigma)) * xl).exp();
        let e_alpha = (alpha * tau).exp();
        let e_dom = (self.rate_dom * tau).exp();
        let mirror_spot = self.barrier * self.barrier / ex;
        let mirror_call =
            bs_vanilla_raw(tau, mirror_spot, self.strike, alpha, sigma, self.rate_dom, self.rate_for);
        let rn = self.rho * self.nu;
        let lam_pull = self.lambda * (self.theta_level - sigma);
        let barrier_n_c1 = self.barrier * norm_pdf(c1v);

        let mut theta = e_alpha * rn * sigma * ex * norm_pdf(d1v) * (-d2v);
        theta += 2.0 * e_alpha * rn * alpha * pow0 * barrier_n_c1 * tau.sqrt();
        theta -= e_alpha * rn * sigma * pow0 * barrier_n_c1 * c1v;
        theta -= e_dom
            * rn
            * (4.0 * alpha / sigma)
            * pow1
            * (mirror_call * (1.0 + xl * (1.0 - 2.0 * alpha / (sigma * sigma)))
                - xl * (-self.rate_for * tau).exp() * mirror_spot * norm_cdf(c1v));
        theta += lam_pull * e_alpha * ex * norm_pdf(d1v) * tau.sqrt();
        theta -= lam_pull * pow0 * e_alpha * barrier_n_c1 * tau.sqrt();
        theta -= e_dom * lam_pull * (4.0 * alpha / (sigma * sigma * sigma)) * xl * pow1 * mirror_call;
        theta
    }
}

/// First-order correction integrand `vartheta(t, x)` for the perturbed
/// stochastic volatility model, valid for `0 <= t < T` and `x > ln L`.
pub fn theta_integrand(t: f64, x: f64, market: &MarketParams, sv: &SvParams) -> Result<f64> {
    market.validate()?;
    sv.validate()?;
    require(
        (0.0..market.maturity).contains(&t),
        "theta_integrand requires 0 <= t < maturity",
    )?;
    require(x > market.log_barrier(), "theta_integrand requires x above the log-barrier")?;
    Ok(ThetaCtx::new(market, sv).eval(t, x))
}

/// Driftless specialisation of the correction integrand:
/// `nu rho sigma { e^x n(d1)(-d2) - L n(c1) c1 }` with the moneyness
/// arguments at zero carry. Valid only when both rates and the
/// mean-reversion speed vanish.
pub fn theta_driftless_interior(t: f64, x: f64, market: &MarketParams, sv: &SvParams) -> Result<f64> {
    market.validate()?;
    sv.validate()?;
    if market.rate_dom != 0.0 || market.rate_for != 0.0 || sv.mean_reversion != 0.0 {
        return Err(Error::Precondition(
            "theta_driftless_interior requires rate_dom = rate_for = 0 and zero mean reversion".to_string(),
        ));
    }
    require(
        (0.0..market.maturity).contains(&t),
        "theta_driftless_interior requires 0 <= t < maturity",
    )?;
    require(
        x > market.log_barrier(),
        "theta_driftless_interior requires x above the log-barrier",
    )?;
    let tau = market.maturity - t;
    let sigma = sv.sigma0;
    let st = sigma * tau.sqrt();
    let d1v = d1_raw(tau, x, 0.0, sigma, market.strike);
    let d2v = d1v - st;
    let c1v = c1_raw(tau, x, 0.0, sigma, market.strike, market.log_barrier());
    Ok(sv.vol_of_vol
        * sv.rho
        * sigma
        * (x.exp() * norm_pdf(d1v) * (-d2v) - market.barrier * norm_pdf(c1v) * c1v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use statrs::distribution::{ContinuousCDF, Normal};

    fn case1_market(strike: f64) -> MarketParams {
        MarketParams {
            spot: 100.0,
            strike,
            barrier: 95.0,
            maturity: 0.5,
            rate_dom: 0.01,
            rate_for: 0.0,
        }
    }

    fn case1_sv() -> SvParams {
        SvParams {
            sigma0: 0.15,
            epsilon: 1.0,
            vol_of_vol: 0.2,
            rho: -0.5,
            mean_reversion: 0.0,
            mean_level: 0.0,
        }
    }

    #[test]
    fn norm_pdf_reference_points() {
        assert_abs_diff_eq!(norm_pdf(0.0), 0.3989422804014327, epsilon = 1e-16);
        assert_abs_diff_eq!(norm_pdf(1.0), 0.24197072451914337, epsilon = 1e-15);
        for y in [-3.2, -0.7, 0.0, 1.4, 9.0] {
            assert_eq!(norm_pdf(y), norm_pdf(-y));
        }
    }

    #[test]
    fn norm_cdf_reference_points() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert_abs_diff_eq!(norm_cdf(40.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_cdf(-40.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_cdf(1.959963984540054), 0.975, epsilon = 1e-15);
    }

    #[test]
    fn norm_cdf_matches_independent_quantile_oracle() {
        // Round-trip through statrs' rational-approximation inverse CDF,
        // an implementation independent of the erfc route used here.
        let std_normal = Normal::new(0.0, 1.0).unwrap();
        for p in [0.001, 0.025, 0.2, 0.5, 0.77, 0.975, 0.9999] {
            let z = std_normal.inverse_cdf(p);
            assert_abs_diff_eq!(norm_cdf(z), p, epsilon = 1e-9);
        }
    }

    #[test]
    fn d1_d2_identities() {
        let (t, sigma, k) = (0.5, 0.15, 100.0);
        // At-the-money with zero carry.
        let atm = d1(t, k.ln(), 0.0, sigma, k).unwrap();
        assert_relative_eq!(atm, 0.5 * sigma * t.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(d2(t, k.ln(), 0.0, sigma, k).unwrap(), -0.5 * sigma * t.sqrt(), epsilon = 1e-14);
        // Direct evaluation of the defining formula.
        assert_relative_eq!(
            d1(0.5, 100.0f64.ln(), 0.01, 0.15, 100.0).unwrap(),
            0.005 / (0.15 * 0.5f64.sqrt()) + 0.5 * 0.15 * 0.5f64.sqrt(),
            epsilon = 1e-14
        );
        // d1 - d2 = sigma sqrt(t) for arbitrary inputs.
        for x in [4.4, 4.6, 4.8] {
            let a = d1(t, x, 0.03, sigma, k).unwrap();
            let b = d2(t, x, 0.03, sigma, k).unwrap();
            assert_relative_eq!(a - b, sigma * t.sqrt(), epsilon = 1e-13);
        }
        assert!(d1(0.0, 4.6, 0.0, sigma, k).is_err());
        assert!(d1(0.5, 4.6, 0.0, -0.1, k).is_err());
    }

    #[test]
    fn c1_is_reflected_d1() {
        let (t, sigma, k, l) = (0.5, 0.15, 100.0, 95.0f64.ln());
        for x in [l, 4.58, 4.61, 4.7] {
            let lhs = c1(t, x, 0.02, sigma, k, l).unwrap();
            let rhs = d1(t, 2.0 * l - x, 0.02, sigma, k).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn c2_vanishes_at_unit_forward_moneyness() {
        let (t, sigma) = (0.5, 0.15);
        let y = (-0.5 * sigma * sigma * t).exp();
        assert_abs_diff_eq!(c2(t, y, sigma).unwrap(), 0.0, epsilon = 1e-28);
        assert!(c2(t, 0.95, sigma).unwrap() >= 0.0);
        let z = ((0.95f64).ln() + 0.5 * sigma * sigma * t) / (sigma * t.sqrt());
        assert_relative_eq!(c2(t, 0.95, sigma).unwrap(), z * z, epsilon = 1e-14);
        assert!(c2(t, -1.0, sigma).is_err());
    }

    #[test]
    fn vanilla_call_limits_and_parity() {
        // Worthless when far out of the money.
        let far = bs_vanilla_call(0.5, 100.0, 1e8, 0.01, 0.15, 0.01, 0.0).unwrap();
        assert_abs_diff_eq!(far, 0.0, epsilon = 1e-12);
        // Deterministic out-of-the-money limit as sigma -> 0.
        let tiny = bs_vanilla_call(0.5, 100.0, 110.0, 0.01, 1e-8, 0.01, 0.0).unwrap();
        assert_abs_diff_eq!(tiny, 0.0, epsilon = 1e-12);
        // Put-call parity against an independently coded put.
        let bs_put = |t: f64, s: f64, k: f64, alpha: f64, sigma: f64, c: f64, q: f64| {
            let d1v = d1_raw(t, s.ln(), alpha, sigma, k);
            let d2v = d1v - sigma * t.sqrt();
            (-c * t).exp() * k * norm_cdf(-d2v) - (-q * t).exp() * s * norm_cdf(-d1v)
        };
        for (c, q) in [(0.01, 0.0), (0.05, 0.1), (0.0, 0.0)] {
            let alpha = c - q;
            let call = bs_vanilla_call(0.5, 100.0, 100.0, alpha, 0.15, c, q).unwrap();
            let put = bs_put(0.5, 100.0, 100.0, alpha, 0.15, c, q);
            let forward = 100.0 * (-q * 0.5f64).exp() - 100.0 * (-c * 0.5f64).exp();
            assert_relative_eq!(call - put, forward, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn barrier_matches_paper_zeroth_order() {
        // Tables: strike 100 -> 3.495, strike 105 (no drift) -> 1.911.
        let with_drift =
            bs_barrier_down_out(0.5, 100.0, 100.0, 95.0, 0.01, 0.15, 0.01, 0.0).unwrap();
        assert_abs_diff_eq!(with_drift, 3.495, epsilon = 1e-3);
        let driftless = bs_barrier_down_out(0.5, 100.0, 105.0, 95.0, 0.0, 0.15, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(driftless, 1.911, epsilon = 1e-3);
    }

    #[test]
    fn barrier_boundary_and_ordering() {
        // Exactly zero at the barrier by convention, rejected below it.
        assert_eq!(bs_barrier_down_out(0.5, 95.0, 100.0, 95.0, 0.01, 0.15, 0.01, 0.0).unwrap(), 0.0);
        assert!(bs_barrier_down_out(0.5, 94.0, 100.0, 95.0, 0.01, 0.15, 0.01, 0.0).is_err());
        // Continuous approach to zero from above.
        let near = bs_barrier_down_out(0.5, 95.0 + 1e-7, 100.0, 95.0, 0.01, 0.15, 0.01, 0.0).unwrap();
        assert!(near.abs() < 1e-5);
        // Monotone in spot and dominated by the vanilla price.
        let mut prev = 0.0;
        for i in 1..=60 {
            let s = 95.0 + 0.5 * i as f64;
            let b = bs_barrier_down_out(0.5, s, 100.0, 95.0, 0.01, 0.15, 0.01, 0.0).unwrap();
            let v = bs_vanilla_call(0.5, s, 100.0, 0.01, 0.15, 0.01, 0.0).unwrap();
            assert!(b >= prev - 1e-10, "not monotone at S={s}");
            assert!(b <= v + 1e-12, "exceeds vanilla at S={s}");
            prev = b;
        }
    }

    /// Central-difference evaluation of the operator definition of the
    /// correction integrand; the oracle that gates the expanded formula.
    fn theta_operator_fd(t: f64, x: f64, market: &MarketParams, sv: &SvParams, h: f64) -> f64 {
        let tau = market.maturity - t;
        let b = |xx: f64, ss: f64| {
            bs_barrier_raw(
                tau,
                xx.exp(),
                market.strike,
                market.barrier,
                market.carry(),
                ss,
                market.rate_dom,
                market.rate_for,
            )
        };
        let s = sv.sigma0;
        let mixed = (b(x + h, s + h) - b(x + h, s - h) - b(x - h, s + h) + b(x - h, s - h))
            / (4.0 * h * h);
        let dsigma = (b(x, s + h) - b(x, s - h)) / (2.0 * h);
        (market.rate_dom * tau).exp()
            * (sv.rho * sv.vol_of_vol * s * s * mixed
                + sv.mean_reversion * (sv.mean_level - s) * dsigma)
    }

    #[test]
    fn theta_matches_finite_difference_operator() {
        // Includes a non-zero foreign rate and a mean-reverting case, the
        // two configurations that distinguish the discounting prefactors.
        let cases = [
            (case1_market(100.0), case1_sv()),
            (
                MarketParams { rate_dom: 0.05, rate_for: 0.1, ..case1_market(102.0) },
                SvParams { vol_of_vol: 0.2, rho: -0.5, ..case1_sv() },
            ),
            (
                case1_market(105.0),
                SvParams { mean_reversion: 0.5, mean_level: 0.25, ..case1_sv() },
            ),
        ];
        for (market, sv) in &cases {
            for t in [0.05, 0.2, 0.4] {
                for x in [96.0f64.ln(), 100.0f64.ln(), 104.0f64.ln()] {
                    let formula = theta_integrand(t, x, market, sv).unwrap();
                    let fd = theta_operator_fd(t, x, market, sv, 1e-4);
                    assert_relative_eq!(formula, fd, max_relative = 1e-5, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn theta_vanishes_without_correlation_and_reversion() {
        let market = case1_market(100.0);
        for sv in [
            SvParams { rho: 0.0, mean_reversion: 0.0, ..case1_sv() },
            SvParams { vol_of_vol: 0.0, mean_reversion: 0.0, ..case1_sv() },
        ] {
            for t in [0.0, 0.25, 0.49] {
                for x in [95.5f64.ln(), 101.0f64.ln()] {
                    assert_eq!(theta_integrand(t, x, &market, &sv).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn theta_rejects_out_of_domain_points() {
        let market = case1_market(100.0);
        let sv = case1_sv();
        assert!(theta_integrand(0.5, 100.0f64.ln(), &market, &sv).is_err());
        assert!(theta_integrand(0.1, 94.0f64.ln(), &market, &sv).is_err());
    }

    #[test]
    fn driftless_interior_agrees_with_general_form() {
        let market = MarketParams { rate_dom: 0.0, rate_for: 0.0, ..case1_market(100.0) };
        let sv = case1_sv();
        for t in [0.0, 0.2, 0.45] {
            for x in [96.0f64.ln(), 100.0f64.ln(), 103.0f64.ln()] {
                let special = theta_driftless_interior(t, x, &market, &sv).unwrap();
                let general = theta_integrand(t, x, &market, &sv).unwrap();
                assert_relative_eq!(special, general, max_relative = 1e-13, epsilon = 1e-15);
            }
        }
        // rho = 0 kills the whole expression.
        let sv0 = SvParams { rho: 0.0, ..sv };
        assert_eq!(theta_driftless_interior(0.1, 100.0f64.ln(), &market, &sv0).unwrap(), 0.0);
        // Non-zero rates are a precondition violation.
        assert!(matches!(
            theta_driftless_interior(0.1, 100.0f64.ln(), &case1_market(100.0), &sv),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn driftless_interior_matches_finite_difference_vanna() {
        let market = MarketParams { rate_dom: 0.0, rate_for: 0.0, ..case1_market(100.0) };
        let sv = case1_sv();
        for t in [0.1, 0.3] {
            for x in [97.0f64.ln(), 101.5f64.ln()] {
                let formula = theta_driftless_interior(t, x, &market, &sv).unwrap();
                let fd = theta_operator_fd(t, x, &market, &sv, 1e-4);
                assert_relative_eq!(formula, fd, max_relative = 1e-5, epsilon = 1e-9);
            }
        }
    }
}
