//! First-order volatility correction and assembled price.
//!
//! The price expands as `u0 + epsilon * v1 + O(epsilon^2)` around the
//! constant-volatility barrier price `u0`. The correction
//!
//! `v1 = e^{-cT} int_0^T int_l^inf p(s, x, y) vartheta(s, y) dy ds`
//!
//! integrates the correction integrand against the killed transition
//! kernel. Three routes are provided: 2-D quadrature (general rates and
//! mean reversion), a closed-form-plus-1-D-integral reduction for the
//! driftless log-normal SABR regime, and a Feynman-Kac path-integral
//! Monte Carlo estimate used as an independent oracle.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::analytic::{bs_barrier_down_out, c1_raw, d1_raw, norm_pdf, ThetaCtx};
use crate::error::{Error, Result};
use crate::montecarlo::{mean_stderr, path_rng};
use crate::quad::{integrate_adaptive, GaussLegendre};
use crate::types::{
    Diagnostics, KillMode, MarketParams, McConfig, PriceMethod, PriceReport, QuadConfig, QuadScheme,
    SvParams,
};

/// Nodes and weights for `int_0^t_max f(s) ds` under the substitution
/// `s = t_max sin^2(theta)`, which clusters nodes quadratically at both
/// endpoints where the integrands have square-root structure.
fn sin_sq_time_nodes(t_max: f64, n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(n);
    rule.mapped(0.0, std::f64::consts::FRAC_PI_2)
        .map(|(theta, w)| {
            let s = t_max * theta.sin().powi(2);
            (s, w * t_max * (2.0 * theta).sin())
        })
        .collect()
}

/// Time integral over `[0, t_max]` under the configured scheme. The
/// integrand must vanish smoothly enough at both endpoints, which all
/// integrands in this module do.
fn time_integral<F>(t_max: f64, quad: &QuadConfig, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    match quad.scheme {
        QuadScheme::GaussLegendreTensor => Ok(sin_sq_time_nodes(t_max, quad.time_nodes)
            .iter()
            .map(|&(s, w)| w * f(s))
            .sum()),
        QuadScheme::Adaptive => integrate_adaptive(&f, 0.0, t_max, quad.abs_tol, quad.rel_tol, 40),
    }
}

/// `c2` evaluated from the log-ratio directly.
#[inline]
fn c2_from_log(t: f64, log_y: f64, sigma: f64) -> f64 {
    let z = (log_y + 0.5 * sigma * sigma * t) / (sigma * t.sqrt());
    z * z
}

fn validate_inputs(market: &MarketParams, sv: &SvParams, quad: &QuadConfig) -> Result<()> {
    market.validate()?;
    sv.validate()?;
    quad.validate()
}

/// First-order correction by 2-D quadrature, valid for arbitrary rates and
/// mean reversion.
///
/// The spatial integral runs in the standardised variable
/// `z = (y - x - mu s)/(sigma sqrt s)` so the Gaussian kernel keeps its
/// shape at every time node, with a panel split at the strike where the
/// integrand's vanna factor concentrates as `s -> T`. The time integral
/// uses the `sin^2` substitution; in the `adaptive` scheme the spatial
/// integral is refined to the configured tolerances instead. Deterministic
/// for a given configuration; spatial nodes at distinct time nodes are
/// evaluated concurrently.
pub fn v1_general(market: &MarketParams, sv: &SvParams, quad: &QuadConfig) -> Result<f64> {
    validate_inputs(market, sv, quad)?;
    let ctx = ThetaCtx::new(market, sv);
    let x = market.log_spot();
    let l = market.log_barrier();
    let t_max = market.maturity;
    let sigma = sv.sigma0;
    let mu = market.carry() - 0.5 * sigma * sigma;
    let k_cut = quad.space_cutoff_mult;
    let log_strike = market.strike.ln();

    let inner = |s: f64| -> Result<f64> {
        if s <= 0.0 || s >= t_max {
            return Ok(0.0);
        }
        let m = x + mu * s;
        let ss = sigma * s.sqrt();
        match quad.scheme {
            QuadScheme::GaussLegendreTensor => {
                let z_lo = ((l - m) / ss).max(-k_cut);
                let z_hi = k_cut.max(z_lo + k_cut);
                let z_strike = (log_strike - m) / ss;
                let mut breaks = vec![z_lo];
                if z_lo < z_strike && z_strike < z_hi {
                    breaks.push(z_strike);
                }
                breaks.push(z_hi);
                let rule = GaussLegendre::new(quad.space_nodes);
                Ok(rule.integrate_panels(&breaks, |z| {
                    let y = m + ss * z;
                    if y <= l {
                        return 0.0;
                    }
                    let surv = (1.0 - (-2.0 * (x - l) * (y - l) / (sigma * sigma * s)).exp()).max(0.0);
                    norm_pdf(z) * surv * ctx.eval(s, y)
                }))
            }
            QuadScheme::Adaptive => {
                let y_hi = m.max(x).max(log_strike) + k_cut * ss;
                if y_hi <= l {
                    return Ok(0.0);
                }
                let var = sigma * sigma * s;
                let gauss_norm = (2.0 * std::f64::consts::PI * var).sqrt().recip();
                let f = |y: f64| {
                    if y <= l {
                        return 0.0;
                    }
                    let gauss = gauss_norm * (-(y - m) * (y - m) / (2.0 * var)).exp();
                    let surv = (1.0 - (-2.0 * (x - l) * (y - l) / var).exp()).max(0.0);
                    gauss * surv * ctx.eval(s, y)
                };
                integrate_adaptive(&f, l, y_hi, quad.abs_tol / t_max, quad.rel_tol, 40)
            }
        }
    };

    let total = match quad.scheme {
        QuadScheme::GaussLegendreTensor => {
            let nodes = sin_sq_time_nodes(t_max, quad.time_nodes);
            let contributions: Result<Vec<f64>> = nodes
                .par_iter()
                .map(|&(s, w)| Ok(w * inner(s)?))
                .collect();
            // Fixed-order reduction keeps the result independent of scheduling.
            contributions?.iter().sum()
        }
        QuadScheme::Adaptive => {
            let f = |s: f64| inner(s).unwrap_or(f64::NAN);
            let v = integrate_adaptive(&f, 0.0, t_max, quad.abs_tol, quad.rel_tol, 40)?;
            if v.is_nan() {
                return Err(Error::ToleranceNotMet {
                    estimated_error: f64::INFINITY,
                    tolerance: quad.abs_tol,
                });
            }
            v
        }
    };
    Ok((-market.rate_dom * t_max).exp() * total)
}

fn require_driftless(market: &MarketParams, sv: &SvParams, what: &str) -> Result<()> {
    if market.rate_dom != 0.0 || market.rate_for != 0.0 || sv.mean_reversion != 0.0 {
        return Err(Error::Precondition(format!(
            "{what} requires the driftless log-normal SABR regime (rate_dom = rate_for = 0, zero mean reversion)"
        )));
    }
    Ok(())
}

/// First-order correction in the driftless log-normal SABR regime:
/// a closed-form vanna/vega term at maturity plus a single time integral
/// over the barrier hitting density,
///
/// `v1 = -(T/2) nu rho sigma { e^x n(d1) d2 + L n(c1) c1 }
///  + nu rho L (x-l) ln(L/K) / (2 pi sigma)
///    int_0^T sqrt(T-s)/s^{3/2} exp(-[c2(T-s, L/K) + c2(s, L/e^x)]/2) ds`.
///
/// The integrand vanishes at both endpoints and is defined as 0 there.
pub fn v1_sabr(market: &MarketParams, sv: &SvParams, quad: &QuadConfig) -> Result<f64> {
    validate_inputs(market, sv, quad)?;
    require_driftless(market, sv, "v1_sabr")?;
    let x = market.log_spot();
    let l = market.log_barrier();
    let t_max = market.maturity;
    let sigma = sv.sigma0;
    let strike = market.strike;
    let barrier = market.barrier;
    let nu_rho = sv.vol_of_vol * sv.rho;

    let st = sigma * t_max.sqrt();
    let d1v = d1_raw(t_max, x, 0.0, sigma, strike);
    let d2v = d1v - st;
    let c1v = c1_raw(t_max, x, 0.0, sigma, strike, l);
    let first = -0.5
        * t_max
        * nu_rho
        * sigma
        * (x.exp() * norm_pdf(d1v) * d2v + barrier * norm_pdf(c1v) * c1v);

    let prefactor = nu_rho * barrier * (x - l) * (barrier / strike).ln()
        / (2.0 * std::f64::consts::PI * sigma);
    let log_barrier_strike = (barrier / strike).ln();
    let log_barrier_spot = l - x;
    let tail = time_integral(t_max, quad, |s| {
        if s <= 0.0 || s >= t_max {
            return 0.0;
        }
        let e = c2_from_log(t_max - s, log_barrier_strike, sigma)
            + c2_from_log(s, log_barrier_spot, sigma);
        (t_max - s).sqrt() / (s * s.sqrt()) * (-0.5 * e).exp()
    })?;

    Ok(first + prefactor * tail)
}

/// The hitting-time integral of [`v1_sabr`] in its pre-simplified form:
/// quadrature of `-((T-s)/2) * [nu rho sigma^2 vanna of the killed
/// semigroup at the barrier](T-s) * h(s, x-l)`, with the boundary vanna
/// evaluated analytically. Algebraically identical to the second term of
/// [`v1_sabr`]; kept as a regression guard on that simplification.
pub fn v1_boundary_term(market: &MarketParams, sv: &SvParams, quad: &QuadConfig) -> Result<f64> {
    validate_inputs(market, sv, quad)?;
    require_driftless(market, sv, "v1_boundary_term")?;
    let x = market.log_spot();
    let l = market.log_barrier();
    let t_max = market.maturity;
    let sigma = sv.sigma0;
    let log_strike = market.strike.ln();
    let nu_rho = sv.vol_of_vol * sv.rho;
    let barrier = market.barrier;

    // nu rho sigma^2 d^2/(dx dsigma) of the killed semigroup applied to the
    // payoff, at the barrier: the direct and mirrored vanna terms coincide
    // there and collapse to a single Gaussian factor.
    let boundary_vanna = move |tau: f64| -> f64 {
        let d1b = d1_raw(tau, l, 0.0, sigma, market.strike);
        nu_rho * sigma * barrier * norm_pdf(d1b) * (-2.0 * (l - log_strike) / (sigma * tau.sqrt()))
    };

    time_integral(t_max, quad, move |s| {
        if s <= 0.0 || s >= t_max {
            return 0.0;
        }
        let var = sigma * sigma * s;
        let z = (l - x) + 0.5 * sigma * sigma * s;
        let hitting = (x - l) / (2.0 * std::f64::consts::PI * var * s * s).sqrt()
            * (-z * z / (2.0 * var)).exp();
        -0.5 * (t_max - s) * boundary_vanna(t_max - s) * hitting
    })
}

/// Monte Carlo estimate of the correction together with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct FkEstimate {
    /// Path-integral estimate of `v1`.
    pub estimate: f64,
    /// Standard error of the estimate.
    pub stderr: f64,
}

/// Feynman-Kac representation of the correction:
/// `v1 = e^{-cT} E[ int_0^{T and tau} vartheta(r, X_r) dr ]` with `X` the
/// constant-volatility log-price killed at the barrier.
///
/// The path integral is a trapezoid on the simulation grid; the `t = T`
/// node carries the integrand's zero limit. Under bridge killing the
/// per-step survival weights are exact for this constant-volatility
/// process, so the only systematic error is the trapezoid's O(dt^2).
/// Deterministic per `(seed, config)` as in the benchmark engine.
pub fn v1_fk_oracle(market: &MarketParams, sv: &SvParams, mc: &McConfig) -> Result<FkEstimate> {
    market.validate()?;
    sv.validate()?;
    mc.validate()?;
    let ctx = ThetaCtx::new(market, sv);
    let x0 = market.log_spot();
    let l = market.log_barrier();
    let t_max = market.maturity;
    let sigma = sv.sigma0;
    let mu = market.carry() - 0.5 * sigma * sigma;
    let n = mc.n_steps;
    let dt = t_max / n as f64;
    let sqrt_dt = dt.sqrt();
    let theta_at_start = ctx.eval(0.0, x0);

    let integrals: Vec<f64> = (0..mc.n_paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut rng = path_rng(mc.seed, path);
            let mut x = x0;
            let mut weight = 1.0f64;
            let mut acc = 0.5 * dt * theta_at_start;
            for i in 1..=n {
                let z: f64 = StandardNormal.sample(&mut rng);
                let x_next = x + mu * dt + sigma * sqrt_dt * z;
                match mc.kill_mode {
                    KillMode::Discrete => {
                        if x_next <= l {
                            break;
                        }
                    }
                    KillMode::Bridge => {
                        if x <= l || x_next <= l {
                            break;
                        }
                        weight *=
                            1.0 - (-2.0 * (x - l) * (x_next - l) / (sigma * sigma * dt)).exp();
                    }
                }
                x = x_next;
                if i < n {
                    acc += dt * weight * ctx.eval(i as f64 * dt, x);
                }
            }
            acc
        })
        .collect();

    let (mean, stderr) = mean_stderr(&integrals);
    let discount = (-market.rate_dom * t_max).exp();
    Ok(FkEstimate {
        estimate: discount * mean,
        stderr: discount * stderr,
    })
}

/// Zeroth-order price plus the epsilon-scaled correction.
///
/// Dispatches to the 1-D SABR reduction exactly when both rates and the
/// mean reversion vanish, and to the 2-D quadrature otherwise; small
/// non-zero drifts are never silently approximated.
pub fn price_first_order(
    market: &MarketParams,
    sv: &SvParams,
    quad: &QuadConfig,
) -> Result<PriceReport> {
    validate_inputs(market, sv, quad)?;
    let u0 = bs_barrier_down_out(
        market.maturity,
        market.spot,
        market.strike,
        market.barrier,
        market.carry(),
        sv.sigma0,
        market.rate_dom,
        market.rate_for,
    )?;
    let driftless =
        market.rate_dom == 0.0 && market.rate_for == 0.0 && sv.mean_reversion == 0.0;
    let (v1, method, space_nodes) = if driftless {
        (v1_sabr(market, sv, quad)?, PriceMethod::Sabr1d, None)
    } else {
        (v1_general(market, sv, quad)?, PriceMethod::General2d, Some(quad.space_nodes))
    };
    Ok(PriceReport::new(
        u0,
        v1,
        sv.epsilon,
        method,
        Diagnostics {
            time_nodes: Some(quad.time_nodes),
            space_nodes,
            ..Diagnostics::default()
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::VolScheme;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn market(strike: f64, rate_dom: f64, rate_for: f64) -> MarketParams {
        MarketParams {
            spot: 100.0,
            strike,
            barrier: 95.0,
            maturity: 0.5,
            rate_dom,
            rate_for,
        }
    }

    fn sv(eps_nu: f64, rho: f64, eps_lambda: f64, mean_level: f64) -> SvParams {
        SvParams {
            sigma0: 0.15,
            epsilon: 1.0,
            vol_of_vol: eps_nu,
            rho,
            mean_reversion: eps_lambda,
            mean_level,
        }
    }

    #[test]
    fn correction_vanishes_without_perturbation_terms() {
        let m = market(100.0, 0.01, 0.0);
        let quad = QuadConfig::default();
        assert_eq!(v1_general(&m, &sv(0.2, 0.0, 0.0, 0.0), &quad).unwrap(), 0.0);
        assert_eq!(v1_general(&m, &sv(0.0, -0.5, 0.0, 0.0), &quad).unwrap(), 0.0);
        let m0 = market(100.0, 0.0, 0.0);
        assert_eq!(v1_sabr(&m0, &sv(0.2, 0.0, 0.0, 0.0), &quad).unwrap(), 0.0);
        assert_eq!(v1_boundary_term(&m0, &sv(0.2, 0.0, 0.0, 0.0), &quad).unwrap(), 0.0);
    }

    #[test]
    fn general_correction_reproduces_benchmark_differences() {
        let quad = QuadConfig::default();
        // Correlated vol-of-vol alone: correction -0.029 at strike 100.
        let v = v1_general(&market(100.0, 0.01, 0.0), &sv(0.2, -0.5, 0.0, 0.0), &quad).unwrap();
        assert_abs_diff_eq!(v, -0.029, epsilon = 2e-3);
        // Mean reversion pulling towards a higher level: +0.022.
        let v = v1_general(&market(100.0, 0.01, 0.0), &sv(0.2, -0.5, 0.2, 0.25), &quad).unwrap();
        assert_abs_diff_eq!(v, 0.022, epsilon = 2e-3);
    }

    #[test]
    fn sabr_correction_reproduces_benchmark_difference() {
        let v = v1_sabr(&market(100.0, 0.0, 0.0), &sv(0.2, -0.5, 0.0, 0.0), &QuadConfig::default())
            .unwrap();
        assert_abs_diff_eq!(v, -0.032, epsilon = 2e-3);
    }

    #[test]
    fn sabr_and_general_routes_agree() {
        let quad = QuadConfig::default();
        for strike in [100.0, 102.0, 105.0] {
            let m = market(strike, 0.0, 0.0);
            let s = sv(0.2, -0.5, 0.0, 0.0);
            let a = v1_general(&m, &s, &quad).unwrap();
            let b = v1_sabr(&m, &s, &quad).unwrap();
            assert!(
                (a - b).abs() / b.abs().max(1.0) < 1e-4,
                "strike {strike}: general {a} vs sabr {b}"
            );
        }
    }

    #[test]
    fn sabr_rejects_drift() {
        let quad = QuadConfig::default();
        let s = sv(0.2, -0.5, 0.0, 0.0);
        assert!(matches!(
            v1_sabr(&market(100.0, 0.01, 0.0), &s, &quad),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            v1_sabr(&market(100.0, 0.0, 0.0), &sv(0.2, -0.5, 0.3, 0.2), &quad),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn boundary_term_equals_simplified_tail() {
        let quad = QuadConfig::default();
        let m = market(100.0, 0.0, 0.0);
        let s = sv(0.2, -0.5, 0.0, 0.0);
        let boundary = v1_boundary_term(&m, &s, &quad).unwrap();
        // Reconstruct the second term of v1_sabr as the full value minus the
        // closed-form first term.
        let x = m.log_spot();
        let sigma = s.sigma0;
        let st = sigma * m.maturity.sqrt();
        let d1v = d1_raw(m.maturity, x, 0.0, sigma, m.strike);
        let c1v = c1_raw(m.maturity, x, 0.0, sigma, m.strike, m.log_barrier());
        let first = -0.5
            * m.maturity
            * s.vol_of_vol
            * s.rho
            * sigma
            * (x.exp() * norm_pdf(d1v) * (d1v - st) + m.barrier * norm_pdf(c1v) * c1v);
        let tail = v1_sabr(&m, &s, &quad).unwrap() - first;
        assert_relative_eq!(boundary, tail, max_relative = 1e-10);
        // Sign audit: rho < 0 and K > L make the prefactor a product of two
        // negatives, so the term is positive.
        assert!(boundary > 0.0);
    }

    #[test]
    fn correction_is_linear_in_vol_of_vol() {
        let quad = QuadConfig::default();
        let m = market(102.0, 0.01, 0.0);
        let v1 = v1_general(&m, &sv(0.1, -0.5, 0.0, 0.0), &quad).unwrap();
        let v2 = v1_general(&m, &sv(0.2, -0.5, 0.0, 0.0), &quad).unwrap();
        assert_relative_eq!(v2, 2.0 * v1, max_relative = 1e-10);
    }

    #[test]
    fn refinement_is_stable() {
        let coarse = QuadConfig::default();
        let fine = QuadConfig {
            time_nodes: coarse.time_nodes * 2,
            space_nodes: coarse.space_nodes * 2,
            ..coarse
        };
        let m = market(100.0, 0.01, 0.0);
        let s = sv(0.2, -0.5, 0.0, 0.0);
        let a = v1_general(&m, &s, &coarse).unwrap();
        let b = v1_general(&m, &s, &fine).unwrap();
        assert!((a - b).abs() <= coarse.rel_tol * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn adaptive_scheme_matches_tensor() {
        let tensor = QuadConfig::default();
        let adaptive = QuadConfig {
            scheme: QuadScheme::Adaptive,
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            ..tensor
        };
        let m = market(100.0, 0.01, 0.0);
        let s = sv(0.2, -0.5, 0.2, 0.25);
        let a = v1_general(&m, &s, &tensor).unwrap();
        let b = v1_general(&m, &s, &adaptive).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-6);
    }

    #[test]
    fn fk_oracle_is_exactly_zero_without_perturbation() {
        let m = market(100.0, 0.01, 0.0);
        let mc = McConfig { n_paths: 500, n_steps: 16, ..McConfig::default() };
        let est = v1_fk_oracle(&m, &sv(0.2, 0.0, 0.0, 0.0), &mc).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn fk_oracle_brackets_quadrature() {
        let m = market(100.0, 0.0, 0.0);
        let s = sv(0.2, -0.5, 0.0, 0.0);
        let mc = McConfig {
            n_paths: 40_000,
            n_steps: 64,
            seed: 11,
            kill_mode: KillMode::Bridge,
            vol_scheme: VolScheme::FullTruncationEuler,
        };
        let fk = v1_fk_oracle(&m, &s, &mc).unwrap();
        let quad_v1 = v1_sabr(&m, &s, &QuadConfig::default()).unwrap();
        assert!(
            (fk.estimate - quad_v1).abs() <= 3.0 * fk.stderr,
            "fk {} +- {} vs quadrature {}",
            fk.estimate,
            fk.stderr,
            quad_v1
        );
    }

    #[test]
    fn report_dispatch_and_zeroth_order_degeneracy() {
        let quad = QuadConfig::default();
        // Driftless parameters take the 1-D route.
        let r = price_first_order(&market(100.0, 0.0, 0.0), &sv(0.2, -0.5, 0.0, 0.0), &quad).unwrap();
        assert_eq!(r.method, PriceMethod::Sabr1d);
        // Any drift forces the 2-D route.
        let r2 = price_first_order(&market(100.0, 0.01, 0.0), &sv(0.2, -0.5, 0.0, 0.0), &quad).unwrap();
        assert_eq!(r2.method, PriceMethod::General2d);
        assert_eq!(r2.first_order_price, r2.u0 + r2.epsilon * r2.v1);
        // epsilon = 0 collapses to the zeroth order exactly.
        let r0 = price_first_order(
            &market(100.0, 0.01, 0.0),
            &SvParams { epsilon: 0.0, ..sv(0.2, -0.5, 0.0, 0.0) },
            &quad,
        )
        .unwrap();
        assert_eq!(r0.first_order_price, r0.u0);
    }
}
