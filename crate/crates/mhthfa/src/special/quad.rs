//! Gauss–Legendre quadrature and log-space summation helpers.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Controls one-dimensional integrals over a positive variable.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Nodes per pass; doubled on refinement.
    pub node_count: usize,
    /// Lower integration bound (>= 0).
    pub lower: f64,
    /// Upper bound; `f64::INFINITY` selects the adaptive tail transform.
    pub upper: f64,
    /// Relative tolerance for the doubling refinement.
    pub relative_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            node_count: 96,
            lower: 0.0,
            upper: f64::INFINITY,
            relative_tolerance: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> crate::Result<()> {
        if self.node_count < 2 {
            return Err(crate::Error::Domain {
                op: "QuadratureSpec",
                detail: format!("node_count {} < 2", self.node_count),
            });
        }
        if !(self.lower >= 0.0) {
            return Err(crate::Error::Domain {
                op: "QuadratureSpec",
                detail: format!("lower {} < 0", self.lower),
            });
        }
        if self.upper.is_finite() && self.lower >= self.upper {
            return Err(crate::Error::Domain {
                op: "QuadratureSpec",
                detail: format!("lower {} >= upper {}", self.lower, self.upper),
            });
        }
        if !(self.relative_tolerance > 0.0) {
            return Err(crate::Error::Domain {
                op: "QuadratureSpec",
                detail: "relative_tolerance must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre recurrence and cached per n.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(rule) = guard.get(&n) {
        return rule;
    }
    let rule: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new(compute_gauss_legendre(n)));
    guard.insert(n, rule);
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss-Legendre rule needs at least 2 nodes");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and its derivative via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// log(sum(exp(v))) with the usual max shift; -inf for an empty or all -inf input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Pairwise variant for two running terms.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// A positive-axis quadrature rule stored as (abscissa, log of weight x Jacobian).
///
/// Nodes come from a Gauss–Legendre rule mapped through w = exp(y) on a window
/// of the log axis, which keeps both the w -> 0 and w -> inf tails resolvable.
#[derive(Debug, Clone)]
pub struct LogAxisRule {
    pub w: Vec<f64>,
    pub log_jw: Vec<f64>,
}

impl LogAxisRule {
    /// Rule with `n` nodes on the log-axis window [y_lo, y_hi].
    pub fn on_window(y_lo: f64, y_hi: f64, n: usize) -> LogAxisRule {
        let (nodes, weights) = gauss_legendre(n);
        let half = 0.5 * (y_hi - y_lo);
        let mid = 0.5 * (y_hi + y_lo);
        let mut w = Vec::with_capacity(n);
        let mut log_jw = Vec::with_capacity(n);
        for (t, gw) in nodes.iter().zip(weights.iter()) {
            let y = mid + half * t;
            // dy weight times the Jacobian dw/dy = e^y = w.
            w.push(y.exp());
            log_jw.push((gw * half).ln() + y);
        }
        LogAxisRule { w, log_jw }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // 8-node rule is exact through degree 15.
        let (x, w) = gauss_legendre(8);
        let int_x14: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi.powi(14)).sum();
        assert_relative_eq!(int_x14, 2.0 / 15.0, max_relative = 1e-13);
        let int_x15: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi.powi(15)).sum();
        assert!(int_x15.abs() < 1e-15);
    }

    #[test]
    fn gl_weights_sum_to_two() {
        for n in [2usize, 5, 16, 48, 96, 200] {
            let (_, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert_relative_eq!(s, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let v = [-3.0, -1.0, 0.5, -700.0];
        let direct: f64 = v.iter().map(|x| x.exp()).sum();
        assert_relative_eq!(log_sum_exp(&v), direct.ln(), max_relative = 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn log_axis_rule_integrates_gaussian_in_log() {
        // integral over w of exp(-(ln w)^2/2)/w dw = sqrt(2 pi)
        let rule = LogAxisRule::on_window(-12.0, 12.0, 96);
        let mut terms = Vec::new();
        for (wi, lj) in rule.w.iter().zip(rule.log_jw.iter()) {
            let y = wi.ln();
            terms.push(-0.5 * y * y - wi.ln() + lj);
        }
        let got = log_sum_exp(&terms);
        assert_relative_eq!(got, (2.0 * std::f64::consts::PI).sqrt().ln(), max_relative = 1e-10);
    }
}
