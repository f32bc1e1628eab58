//! Zeroth-order killed diffusion on `(l, infinity)`.
//!
//! Drifted Brownian motion for the log-price, killed at the log-barrier:
//! transition density with the image-charge survival factor, closed-form
//! survival probability, first-hitting-time density, and quadrature
//! application of the killed semigroup.

use crate::analytic::{norm_cdf, norm_pdf};
use crate::error::{Error, Result};
use crate::quad::{integrate_adaptive, GaussLegendre};
use crate::types::{QuadConfig, QuadScheme};

/// Constant-coefficient diffusion `dX = mu dt + sigma dB` killed at the
/// first hit of `log_barrier`. For the log-price of the zeroth-order model
/// the drift is `mu = alpha - sigma^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KilledDiffusion {
    /// Drift per year.
    pub drift: f64,
    /// Diffusion coefficient, > 0.
    pub sigma: f64,
    /// Absorbing boundary (log scale).
    pub log_barrier: f64,
}

impl KilledDiffusion {
    /// Validates `sigma > 0`.
    pub fn new(drift: f64, sigma: f64, log_barrier: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
        }
        if !drift.is_finite() || !log_barrier.is_finite() {
            return Err(Error::invalid("drift", "drift and log_barrier must be finite".to_string()));
        }
        Ok(KilledDiffusion { drift, sigma, log_barrier })
    }

    #[inline]
    fn check_start(&self, t: f64, x: f64) -> Result<()> {
        if !(t > 0.0) {
            return Err(Error::domain(format!("killed diffusion requires t > 0, got {t}")));
        }
        if !(x > self.log_barrier) {
            return Err(Error::domain(format!(
                "killed diffusion requires start above the barrier, got x={x}, l={}",
                self.log_barrier
            )));
        }
        Ok(())
    }

    /// Probability of not having hit the barrier by `t`, conditional on the
    /// endpoint value `y`: `1 - exp(-2 (x-l)(y-l) / (sigma^2 t))` on `y > l`,
    /// zero otherwise.
    pub fn survival_prob_conditional(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.check_start(t, x)?;
        let l = self.log_barrier;
        if y <= l {
            return Ok(0.0);
        }
        let p = 1.0 - (-2.0 * (x - l) * (y - l) / (self.sigma * self.sigma * t)).exp();
        Ok(p.max(0.0))
    }

    /// Sub-probability transition density of the killed process:
    /// the free Gaussian kernel times the conditional survival factor,
    /// zero at and below the barrier.
    pub fn transition_density(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.check_start(t, x)?;
        let l = self.log_barrier;
        if y <= l {
            return Ok(0.0);
        }
        let var = self.sigma * self.sigma * t;
        let gauss = (2.0 * std::f64::consts::PI * var).sqrt().recip()
            * (-(y - x - self.drift * t).powi(2) / (2.0 * var)).exp();
        let surv = 1.0 - (-2.0 * (x - l) * (y - l) / var).exp();
        Ok(gauss * surv.max(0.0))
    }

    /// Marginal survival probability
    /// `N((x-l+mu t)/(sigma sqrt t)) - e^{-2 mu (x-l)/sigma^2} N((l-x+mu t)/(sigma sqrt t))`,
    /// the integral of [`Self::transition_density`] over the domain.
    pub fn survival_prob(&self, t: f64, x: f64) -> Result<f64> {
        self.check_start(t, x)?;
        let l = self.log_barrier;
        let st = self.sigma * t.sqrt();
        let first = norm_cdf((x - l + self.drift * t) / st);
        let exponent = -2.0 * self.drift * (x - l) / (self.sigma * self.sigma);
        let tail = norm_cdf((l - x + self.drift * t) / st);
        let second = if tail == 0.0 {
            0.0
        } else if exponent > 300.0 {
            (exponent + tail.ln()).exp()
        } else {
            exponent.exp() * tail
        };
        Ok((first - second).clamp(0.0, 1.0))
    }

    /// Density of the first hitting time of the barrier:
    /// `(x-l)/sqrt(2 pi sigma^2 s^3) * exp(-((l-x) - mu s)^2 / (2 sigma^2 s))`.
    ///
    /// Defined as 0 at `s = 0` (the limit from the right). Integrates to
    /// `min(1, exp(-2 mu (x-l)/sigma^2))` over `(0, infinity)`.
    pub fn hitting_time_density(&self, s: f64, x: f64) -> Result<f64> {
        if !(x > self.log_barrier) {
            return Err(Error::domain(format!(
                "hitting_time_density requires x above the barrier, got x={x}, l={}",
                self.log_barrier
            )));
        }
        if s < 0.0 {
            return Err(Error::domain(format!("hitting_time_density requires s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let l = self.log_barrier;
        let var = self.sigma * self.sigma * s;
        let z = (l - x) - self.drift * s;
        Ok((x - l) / (2.0 * std::f64::consts::PI * var * s * s).sqrt()
            * (-z * z / (2.0 * var)).exp())
    }

    /// Applies the (undiscounted) killed semigroup to `g`:
    /// quadrature of `int_l^{x + k sigma sqrt(t)} g(y) p(t, x, y) dy`.
    ///
    /// The truncated Gaussian tail beyond the cutoff is O(exp(-k^2/2)), i.e.
    /// ~2e-22 at the default k = 10. The integrand must be safe to evaluate
    /// concurrently; panel evaluation order is fixed, so results are
    /// deterministic for a given configuration.
    pub fn semigroup_apply<F>(&self, t: f64, x: f64, g: F, quad: &QuadConfig) -> Result<f64>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.check_start(t, x)?;
        quad.validate()?;
        let l = self.log_barrier;
        let st = self.sigma * t.sqrt();
        let y_hi = x + quad.space_cutoff_mult * st;
        if y_hi <= l {
            return Ok(0.0);
        }
        match quad.scheme {
            QuadScheme::Adaptive => {
                let f = |y: f64| g(y) * self.transition_density_raw(t, x, y);
                integrate_adaptive(&f, l, y_hi, quad.abs_tol, quad.rel_tol, 40)
            }
            QuadScheme::GaussLegendreTensor => {
                // Standardised variable z = (y - x - mu t)/(sigma sqrt t): the
                // Gaussian factor becomes n(z) at every t, so fixed nodes keep
                // resolving the kernel as t -> 0. Panels split at the kernel
                // centre and at the barrier edge.
                let m = x + self.drift * t;
                let z_lo = ((l - m) / st).max(-quad.space_cutoff_mult);
                let z_hi = (y_hi - m) / st;
                if z_lo >= z_hi {
                    return Ok(0.0);
                }
                let mut breaks = vec![z_lo];
                if z_lo < 0.0 && 0.0 < z_hi {
                    breaks.push(0.0);
                }
                breaks.push(z_hi);
                let rule = GaussLegendre::new(quad.space_nodes);
                let var = self.sigma * self.sigma * t;
                let f = |z: f64| {
                    let y = m + st * z;
                    if y <= l {
                        return 0.0;
                    }
                    let surv = (1.0 - (-2.0 * (x - l) * (y - l) / var).exp()).max(0.0);
                    g(y) * norm_pdf(z) * surv
                };
                Ok(rule.integrate_panels(&breaks, f))
            }
        }
    }

    /// Density without the domain checks, for internal quadrature loops.
    #[inline]
    pub(crate) fn transition_density_raw(&self, t: f64, x: f64, y: f64) -> f64 {
        let l = self.log_barrier;
        if y <= l {
            return 0.0;
        }
        let var = self.sigma * self.sigma * t;
        let gauss = (2.0 * std::f64::consts::PI * var).sqrt().recip()
            * (-(y - x - self.drift * t).powi(2) / (2.0 * var)).exp();
        let surv = (1.0 - (-2.0 * (x - l) * (y - l) / var).exp()).max(0.0);
        gauss * surv
    }
}
