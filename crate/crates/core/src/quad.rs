//! Gauss-Legendre rules and adaptive panel integration.
//!
//! Nodes and weights are generated by Newton iteration on the Legendre
//! recurrence, so arbitrary orders are available without tabulated
//! constants. The adaptive integrator compares a panel estimate against
//! its bisection and refines until the configured tolerance is met.

use crate::error::{Error, Result};

/// A Gauss-Legendre rule of fixed order on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the order-`n` rule (exact for polynomials of degree 2n-1).
    ///
    /// # Panics
    /// Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th positive root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (_, d2) = legendre_and_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            // The middle node is exactly zero by symmetry.
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the rule has no nodes (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes mapped to `[a, b]` together with their weights.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Integrates `f` over consecutive panels delimited by `breaks`.
    pub fn integrate_panels<F: Fn(f64) -> f64>(&self, breaks: &[f64], f: F) -> f64 {
        let mut acc = 0.0;
        for pair in breaks.windows(2) {
            acc += self.integrate(pair[0], pair[1], &f);
        }
        acc
    }
}

/// Legendre polynomial P_n and derivative P_n' at `x` via the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// Each panel is estimated with an order-15 rule and compared against the
/// sum of the two order-15 half-panel estimates; a panel is accepted when
/// the difference is below `max(abs_tol, rel_tol * |scale|)` prorated by
/// panel width. Fails with [`Error::ToleranceNotMet`] if `max_depth`
/// bisections do not suffice.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Result<f64> {
    let rule = GaussLegendre::new(15);
    // First sweep to fix the relative-tolerance scale.
    let scale = rule.integrate(a, b, f).abs();
    let tol = abs_tol.max(rel_tol * scale);
    adaptive_panel(f, a, b, tol, max_depth, &rule)
}

fn adaptive_panel<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    rule: &GaussLegendre,
) -> Result<f64> {
    let whole = rule.integrate(a, b, f);
    let mid = 0.5 * (a + b);
    let halves = rule.integrate(a, mid, f) + rule.integrate(mid, b, f);
    let err = (halves - whole).abs();
    if err <= tol || (b - a).abs() < 1e-14 * (a.abs() + b.abs() + 1.0) {
        return Ok(halves);
    }
    if depth == 0 {
        return Err(Error::ToleranceNotMet {
            estimated_error: err,
            tolerance: tol,
        });
    }
    let left = adaptive_panel(f, a, mid, 0.5 * tol, depth - 1, rule)?;
    let right = adaptive_panel(f, mid, b, 0.5 * tol, depth - 1, rule)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_interval_measure() {
        for n in [1, 2, 5, 16, 33, 64, 128] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.weights.iter().sum();
            assert_relative_eq!(total, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        // Order n integrates x^(2n-1) exactly; check n = 8 against x^15 on [0, 1].
        let rule = GaussLegendre::new(8);
        let got = rule.integrate(0.0, 1.0, |x| x.powi(15));
        assert_relative_eq!(got, 1.0 / 16.0, epsilon = 1e-14);
    }

    #[test]
    fn nodes_are_symmetric() {
        let rule = GaussLegendre::new(24);
        for i in 0..rule.len() {
            assert_relative_eq!(rule.nodes[i], -rule.nodes[rule.len() - 1 - i], epsilon = 1e-15);
            assert_relative_eq!(rule.weights[i], rule.weights[rule.len() - 1 - i], epsilon = 1e-15);
        }
    }

    #[test]
    fn integrates_sine() {
        let rule = GaussLegendre::new(32);
        let got = rule.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert_relative_eq!(got, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn panels_split_kinks() {
        let rule = GaussLegendre::new(16);
        let f = |x: f64| (x - 0.3).abs();
        let got = rule.integrate_panels(&[0.0, 0.3, 1.0], f);
        let exact = 0.5 * (0.3f64.powi(2) + 0.7f64.powi(2));
        assert_relative_eq!(got, exact, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_resolves_narrow_spike() {
        // Gaussian of width 1e-3 centred off-grid; mass almost exactly sqrt(2 pi) w.
        let w = 1e-3;
        let f = |x: f64| (-0.5 * ((x - 0.2371) / w).powi(2)).exp();
        let got = integrate_adaptive(&f, 0.0, 1.0, 1e-12, 1e-10, 48).unwrap();
        let exact = (2.0 * std::f64::consts::PI).sqrt() * w;
        assert_relative_eq!(got, exact, epsilon = 1e-9);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let f = |x: f64| if x == 0.0 { 0.0 } else { (1.0 / x).sin() / x };
        let err = integrate_adaptive(&f, 1e-9, 1.0, 1e-14, 1e-14, 4).unwrap_err();
        assert!(matches!(err, Error::ToleranceNotMet { .. }));
    }
}
