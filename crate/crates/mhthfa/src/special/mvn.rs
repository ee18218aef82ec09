//! Multivariate normal orthant probabilities for dimensions 1..=3.
//!
//! The plain values use Genz's quadrature for the bivariate case and the
//! Plackett correlation-path integral for the trivariate case. Both lose
//! relative accuracy once the probability underflows toward the bottom of
//! the double range, so a log-space sequential-conditioning path takes
//! over in the deep tail; the switch is invisible to callers, who get a
//! finite log probability everywhere.

use crate::error::{Error, Result};
use crate::special::normal::{log_std_normal_cdf, log_std_normal_pdf, std_normal_cdf};
use crate::special::quad::{gauss_legendre, log_sum_exp};
use nalgebra::DMatrix;

pub const MAX_ORTHANT_DIM: usize = 3;

/// P(X > h, Y > k) for standard bivariate normals with correlation r.
///
/// Genz's adaptation of the Drezner–Wesolowsky method; node count scales
/// with |r|.
pub fn bvnu(h: f64, k: f64, r: f64) -> f64 {
    let n_full = if r.abs() < 0.3 {
        12
    } else if r.abs() < 0.75 {
        24
    } else {
        40
    };
    let (xs, ws) = gauss_legendre(n_full);

    let two_pi = 2.0 * std::f64::consts::PI;
    let mut h = h;
    let mut k = k;
    let mut hk = h * k;
    let mut bvn = 0.0;

    if r.abs() < 0.925 {
        if hk.abs() < 1e308 {
            let hs = 0.5 * (h * h + k * k);
            let asr = r.asin();
            for (x, w) in xs.iter().zip(ws.iter()) {
                let sn = (asr * 0.5 * (x + 1.0)).sin();
                bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
            bvn = bvn * asr / (2.0 * two_pi);
        }
        bvn += std_normal_cdf(-h) * std_normal_cdf(-k);
    } else {
        if r < 0.0 {
            k = -k;
            hk = -hk;
        }
        if r.abs() < 1.0 {
            let ass = (1.0 - r) * (1.0 + r);
            let mut a = ass.sqrt();
            let bs = (h - k) * (h - k);
            let c = (4.0 - hk) / 8.0;
            let d = (12.0 - hk) / 16.0;
            let asr = -0.5 * (bs / ass + hk);
            if asr > -100.0 {
                bvn = a * asr.exp() * (1.0 - c * (bs - ass) * (1.0 - d * bs / 5.0) / 3.0
                    + c * d * ass * ass / 5.0);
            }
            if -hk < 100.0 {
                let b = bs.sqrt();
                bvn -= (-0.5 * hk).exp()
                    * two_pi.sqrt()
                    * std_normal_cdf(-b / a)
                    * b
                    * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a *= 0.5;
            for (x, w) in xs.iter().zip(ws.iter()) {
                let xs2 = (a * (x + 1.0)) * (a * (x + 1.0));
                if xs2 < ass {
                    let rs = (1.0 - xs2).sqrt();
                    let asr1 = -0.5 * (bs / xs2 + hk);
                    if asr1 > -100.0 {
                        bvn += a
                            * w
                            * asr1.exp()
                            * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs
                                - (1.0 + c * xs2 * (1.0 + d * xs2)));
                    }
                }
            }
            bvn = -bvn / two_pi;
        }
        if r > 0.0 {
            bvn += std_normal_cdf(-h.max(k));
        } else {
            bvn = -bvn;
            if k > h {
                bvn += std_normal_cdf(k) - std_normal_cdf(h);
            }
        }
    }
    bvn.clamp(0.0, 1.0)
}

/// P(Z1 <= u1, Z2 <= u2) for standard normals with correlation rho.
pub fn phi2(u1: f64, u2: f64, rho: f64) -> f64 {
    bvnu(-u1, -u2, rho)
}

/// Log of `phi2`, accurate arbitrarily deep in the tail.
pub fn log_phi2(u1: f64, u2: f64, rho: f64) -> f64 {
    let p = phi2(u1, u2, rho);
    if p > 1e-200 {
        return p.ln();
    }
    log_phi2_sequential(u1, u2, rho)
}

/// log P(T <= u1, rho T + sqrt(1-rho^2) S <= u2) via conditioning on T.
///
/// The log-integrand g(t) = ln phi(t) + ln Phi((u2 - rho t)/s) has
/// g'' <= -1 (Gaussian log-concavity), so once its maximizer t* over
/// (-inf, u1] is bracketed, a 24-unit window around it captures all but
/// e^(-70) of the mass.
fn log_phi2_sequential(u1: f64, u2: f64, rho: f64) -> f64 {
    let s = (1.0 - rho * rho).max(1e-300).sqrt();
    let g = |t: f64| log_std_normal_pdf(t) + log_std_normal_cdf((u2 - rho * t) / s);
    let t_star = concave_argmax(&g, u1);
    let hi = u1.min(t_star + 12.0);
    let lo = t_star - 12.0;
    log_integral_composite(&g, lo, hi, 4, 24)
}

/// Maximizer of a concave function on (-inf, hi] via derivative bisection.
fn concave_argmax(g: &dyn Fn(f64) -> f64, hi: f64) -> f64 {
    let h = 1e-5;
    let dg = |t: f64| (g(t + h) - g(t - h)) / (2.0 * h);
    if dg(hi) >= 0.0 {
        return hi;
    }
    // Expand left until the derivative turns nonnegative.
    let mut step = 1.0;
    let mut lo = hi - step;
    while dg(lo) < 0.0 {
        step *= 2.0;
        lo = hi - step;
        if step > 1e8 {
            return lo;
        }
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if dg(mid) >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-9 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// log of the integral of exp(g) over [lo, hi] by composite Gauss–Legendre.
fn log_integral_composite(
    g: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    segments: usize,
    nodes_per_segment: usize,
) -> f64 {
    if !(hi > lo) {
        return f64::NEG_INFINITY;
    }
    let (xs, ws) = gauss_legendre(nodes_per_segment);
    let seg = (hi - lo) / segments as f64;
    let mut terms = Vec::with_capacity(segments * nodes_per_segment);
    for si in 0..segments {
        let a = lo + si as f64 * seg;
        let mid = a + 0.5 * seg;
        let half = 0.5 * seg;
        for (x, w) in xs.iter().zip(ws.iter()) {
            let t = mid + half * x;
            terms.push(g(t) + (w * half).ln());
        }
    }
    log_sum_exp(&terms)
}

/// P(Z <= u componentwise) for a standard trivariate normal with
/// correlations (rho12, rho13, rho23), by Plackett's path integral from
/// the independent case.
pub fn phi3(u: [f64; 3], rho: [f64; 3]) -> f64 {
    let independent = std_normal_cdf(u[0]) * std_normal_cdf(u[1]) * std_normal_cdf(u[2]);
    let (xs, ws) = gauss_legendre(36);
    // pairs (i, j, k, rho_ij) with k the remaining index
    let pairs = [
        (0usize, 1usize, 2usize, rho[0]),
        (0usize, 2usize, 1usize, rho[1]),
        (1usize, 2usize, 0usize, rho[2]),
    ];
    let rho_of = |a: usize, b: usize| -> f64 {
        match (a.min(b), a.max(b)) {
            (0, 1) => rho[0],
            (0, 2) => rho[1],
            (1, 2) => rho[2],
            _ => unreachable!(),
        }
    };
    let mut correction = 0.0;
    for (x, w) in xs.iter().zip(ws.iter()) {
        let sp = 0.5 * (x + 1.0); // path parameter in (0, 1)
        for &(i, j, k, r_ij) in &pairs {
            if r_ij == 0.0 {
                continue;
            }
            let r = sp * r_ij;
            let det = 1.0 - r * r;
            let bi = u[i];
            let bj = u[j];
            // phi2 density of (bi, bj) at correlation r
            let q = (bi * bi - 2.0 * r * bi * bj + bj * bj) / det;
            let dens = (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * det.sqrt());
            // conditional law of Z_k given Z_i = bi, Z_j = bj on the path
            let rik = sp * rho_of(i, k);
            let rjk = sp * rho_of(j, k);
            let ci = (rik - r * rjk) / det;
            let cj = (rjk - r * rik) / det;
            let mean = ci * bi + cj * bj;
            let var = 1.0 - (ci * rik + cj * rjk);
            let phi_term = if var > 1e-14 {
                std_normal_cdf((u[k] - mean) / var.sqrt())
            } else if u[k] >= mean {
                1.0
            } else {
                0.0
            };
            correction += 0.5 * w * r_ij * dens * phi_term;
        }
    }
    (independent + correction).clamp(0.0, 1.0)
}

/// Log of `phi3`, falling back to sequential conditioning in the deep tail.
pub fn log_phi3(u: [f64; 3], rho: [f64; 3], chol: &[[f64; 3]; 3]) -> f64 {
    let p = phi3(u, rho);
    if p > 1e-180 {
        return p.ln();
    }
    log_phi3_sequential(u, chol)
}

/// log P(L eta <= u) for the correlation-matrix Cholesky factor L,
/// conditioning on eta_1 and reducing to a bivariate tail per node.
fn log_phi3_sequential(u: [f64; 3], l: &[[f64; 3]; 3]) -> f64 {
    let c1 = u[0] / l[0][0];
    let s3 = (l[2][1] * l[2][1] + l[2][2] * l[2][2]).sqrt();
    let rho_cond = l[2][1] / s3;
    let g = |t: f64| {
        let a = (u[1] - l[1][0] * t) / l[1][1];
        let b = (u[2] - l[2][0] * t) / s3;
        log_std_normal_pdf(t) + log_phi2(a, b, rho_cond)
    };
    // Coarse scan for the (concave) maximizer, then a fixed window.
    let scan_lo = (c1 - 80.0).min(-40.0);
    let mut best_t = c1.min(40.0);
    let mut best_g = f64::NEG_INFINITY;
    let n_scan = 240;
    let hi_scan = c1.min(40.0);
    for i in 0..=n_scan {
        let t = scan_lo + (hi_scan - scan_lo) * i as f64 / n_scan as f64;
        let gt = g(t);
        if gt > best_g {
            best_g = gt;
            best_t = t;
        }
    }
    let hi = c1.min(best_t + 13.0);
    let lo = best_t - 13.0;
    log_integral_composite(&g, lo, hi, 5, 20)
}

/// Orthant CDF of a centered r-dimensional normal with given covariance,
/// prefactored so repeated bound evaluations stay cheap.
#[derive(Debug, Clone)]
pub struct OrthantCdf {
    dim: usize,
    sd: [f64; 3],
    rho: [f64; 3],
    chol: [[f64; 3]; 3],
}

impl OrthantCdf {
    /// Standardizes `cov` to a correlation matrix and factors it.
    pub fn new(cov: &DMatrix<f64>) -> Result<Self> {
        let r = cov.nrows();
        if r == 0 || r > MAX_ORTHANT_DIM {
            return Err(Error::UnsupportedDimension {
                op: "mvn_orthant_cdf",
                dim: r,
                max: MAX_ORTHANT_DIM,
            });
        }
        if cov.ncols() != r {
            return Err(Error::DimensionMismatch {
                op: "mvn_orthant_cdf",
                detail: format!("covariance is {}x{}", cov.nrows(), cov.ncols()),
            });
        }
        let mut sd = [1.0; 3];
        for i in 0..r {
            let v = cov[(i, i)];
            if !(v > 0.0) {
                return Err(Error::NotPositiveDefinite { op: "mvn_orthant_cdf" });
            }
            sd[i] = v.sqrt();
        }
        let mut corr = DMatrix::<f64>::identity(r, r);
        for i in 0..r {
            for j in 0..r {
                corr[(i, j)] = cov[(i, j)] / (sd[i] * sd[j]);
            }
        }
        let mut rho = [0.0; 3];
        if r >= 2 {
            rho[0] = corr[(0, 1)];
        }
        if r == 3 {
            rho[1] = corr[(0, 2)];
            rho[2] = corr[(1, 2)];
        }
        let chol_fact = corr
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { op: "mvn_orthant_cdf" })?;
        let lmat = chol_fact.l();
        let mut chol = [[0.0; 3]; 3];
        for i in 0..r {
            for j in 0..=i {
                chol[i][j] = lmat[(i, j)];
            }
        }
        Ok(OrthantCdf { dim: r, sd, rho, chol })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// P(Z <= upper componentwise); `upper` in the original scale.
    pub fn cdf(&self, upper: &[f64]) -> f64 {
        debug_assert_eq!(upper.len(), self.dim);
        match self.dim {
            1 => std_normal_cdf(upper[0] / self.sd[0]),
            2 => phi2(upper[0] / self.sd[0], upper[1] / self.sd[1], self.rho[0]),
            _ => phi3(
                [
                    upper[0] / self.sd[0],
                    upper[1] / self.sd[1],
                    upper[2] / self.sd[2],
                ],
                self.rho,
            ),
        }
    }

    /// log P(Z <= upper componentwise), finite arbitrarily deep in the tail.
    pub fn log_cdf(&self, upper: &[f64]) -> f64 {
        debug_assert_eq!(upper.len(), self.dim);
        match self.dim {
            1 => log_std_normal_cdf(upper[0] / self.sd[0]),
            2 => log_phi2(upper[0] / self.sd[0], upper[1] / self.sd[1], self.rho[0]),
            _ => log_phi3(
                [
                    upper[0] / self.sd[0],
                    upper[1] / self.sd[1],
                    upper[2] / self.sd[2],
                ],
                self.rho,
                &self.chol,
            ),
        }
    }
}

/// One-shot orthant probability P(Z <= upper) for Z ~ N_r(0, cov), r <= 3.
pub fn mvn_orthant_cdf(upper: &[f64], cov: &DMatrix<f64>) -> Result<f64> {
    if upper.len() != cov.nrows() {
        return Err(Error::DimensionMismatch {
            op: "mvn_orthant_cdf",
            detail: format!("{} bounds for a {}x{} covariance", upper.len(), cov.nrows(), cov.ncols()),
        });
    }
    Ok(OrthantCdf::new(cov)?.cdf(upper))
}

/// One-shot log orthant probability.
pub fn log_mvn_orthant_cdf(upper: &[f64], cov: &DMatrix<f64>) -> Result<f64> {
    if upper.len() != cov.nrows() {
        return Err(Error::DimensionMismatch {
            op: "log_mvn_orthant_cdf",
            detail: format!("{} bounds for a {}x{} covariance", upper.len(), cov.nrows(), cov.ncols()),
        });
    }
    Ok(OrthantCdf::new(cov)?.log_cdf(upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_bounds_identity_covariance() {
        for r in 1..=3usize {
            let cov = DMatrix::<f64>::identity(r, r);
            let p = mvn_orthant_cdf(&vec![0.0; r], &cov).unwrap();
            assert_relative_eq!(p, 0.5f64.powi(r as i32), max_relative = 1e-10);
        }
    }

    #[test]
    fn one_dimensional_reduction() {
        let cov = DMatrix::from_element(1, 1, 4.0);
        assert_relative_eq!(
            mvn_orthant_cdf(&[1.0], &cov).unwrap(),
            std_normal_cdf(0.5),
            max_relative = 1e-14
        );
    }

    #[test]
    fn independent_bivariate_factorizes() {
        let cov = DMatrix::<f64>::identity(2, 2);
        let p = mvn_orthant_cdf(&[0.7, -1.1], &cov).unwrap();
        assert_relative_eq!(
            p,
            std_normal_cdf(0.7) * std_normal_cdf(-1.1),
            max_relative = 1e-12
        );
    }

    #[test]
    fn bivariate_extreme_correlations() {
        // rho -> 1: P(Z <= u1, Z <= u2) = Phi(min(u1, u2))
        let p = phi2(0.5, -0.3, 0.999_999);
        assert_relative_eq!(p, std_normal_cdf(-0.3), max_relative = 1e-4);
        // rho -> -1: P = max(0, Phi(u1) + Phi(u2) - 1)
        let p = phi2(0.5, -0.3, -0.999_999);
        assert_relative_eq!(
            p,
            std_normal_cdf(0.5) + std_normal_cdf(-0.3) - 1.0,
            max_relative = 1e-3
        );
    }

    #[test]
    fn trivariate_independent_factorizes() {
        let p = phi3([0.4, -0.2, 1.3], [0.0, 0.0, 0.0]);
        let expected = std_normal_cdf(0.4) * std_normal_cdf(-0.2) * std_normal_cdf(1.3);
        assert_relative_eq!(p, expected, max_relative = 1e-12);
    }

    #[test]
    fn trivariate_reduces_to_bivariate_when_third_bound_large() {
        let rho = [0.5, 0.2, -0.3];
        let p3 = phi3([0.3, -0.6, 30.0], rho);
        let p2 = phi2(0.3, -0.6, 0.5);
        assert_relative_eq!(p3, p2, max_relative = 1e-10);
    }

    #[test]
    fn log_paths_agree_with_plain_in_moderate_range() {
        for rho in [-0.8, -0.3, 0.0, 0.4, 0.9] {
            for u in [-6.0, -2.0, 0.0, 1.5] {
                let lp = log_phi2(u, u + 0.7, rho);
                let p = phi2(u, u + 0.7, rho);
                assert_relative_eq!(lp, p.ln(), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn log_phi2_sequential_cross_check() {
        // Force the sequential path and compare against plain values
        // where both are reliable.
        for rho in [-0.7, 0.0, 0.6, 0.95] {
            for (u1, u2) in [(-3.0, -4.0), (-1.0, -8.0), (2.0, -5.0)] {
                let seq = log_phi2_sequential(u1, u2, rho);
                let plain = phi2(u1, u2, rho).ln();
                assert_relative_eq!(seq, plain, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn log_phi2_deep_tail_is_finite_and_ordered() {
        let a = log_phi2(-40.0, -41.0, 0.3);
        let b = log_phi2(-41.0, -41.0, 0.3);
        assert!(a.is_finite() && b.is_finite());
        assert!(b < a, "deeper bound must have smaller log prob");
    }

    #[test]
    fn log_phi3_sequential_cross_check() {
        let cov = DMatrix::from_row_slice(3, 3, &[1.0, 0.4, 0.2, 0.4, 1.0, -0.3, 0.2, -0.3, 1.0]);
        let oc = OrthantCdf::new(&cov).unwrap();
        for u in [[-2.0, -1.0, -3.0], [-4.0, -4.0, -4.0], [0.5, -2.0, -6.0]] {
            let plain = oc.cdf(&u).ln();
            let seq = log_phi3_sequential(u, &oc.chol);
            assert_relative_eq!(plain, seq, max_relative = 1e-6);
        }
    }

    #[test]
    fn monotone_in_each_coordinate() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 1.0]);
        let oc = OrthantCdf::new(&cov).unwrap();
        let mut prev = 0.0;
        let mut u = -6.0;
        while u <= 6.0 {
            let p = oc.cdf(&[u, 0.3]);
            assert!(p >= prev - 1e-12);
            prev = p;
            u += 0.25;
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]); // not SPD
        assert!(OrthantCdf::new(&cov).is_err());
        let cov4 = DMatrix::<f64>::identity(4, 4);
        assert!(matches!(
            mvn_orthant_cdf(&[0.0; 4], &cov4),
            Err(Error::UnsupportedDimension { .. })
        ));
    }
}
