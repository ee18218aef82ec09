//! Univariate standard normal density and distribution function.

use statrs::function::erf::erfc;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

#[inline]
pub fn log_std_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal CDF via the complementary error function.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// log of the standard normal CDF, finite for every finite input.
///
/// Below x = -26 the erfc route loses precision to underflow, so the
/// classic tail expansion Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - ...)
/// takes over; its truncation error there is below 1e-16 relative.
pub fn log_std_normal_cdf(x: f64) -> f64 {
    if x >= -26.0 {
        let p = std_normal_cdf(x);
        if p > 0.0 {
            return p.ln();
        }
    }
    log_normal_tail_lower(x)
}

fn log_normal_tail_lower(x: f64) -> f64 {
    debug_assert!(x < 0.0);
    let inv_x2 = 1.0 / (x * x);
    let mut term = 1.0;
    let mut series = 0.0;
    for k in 1..=12 {
        term *= -(2.0 * k as f64 - 1.0) * inv_x2;
        let prev = series;
        series += term;
        if term.abs() < 1e-18 || series == prev {
            break;
        }
    }
    log_std_normal_pdf(x) - (-x).ln() + series.ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cdf_center_and_limits() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_eq!(std_normal_cdf(f64::INFINITY), 1.0);
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn cdf_at_one_matches_erf_series_oracle() {
        // erf(z) = 2/sqrt(pi) * sum_k (-1)^k z^(2k+1) / (k! (2k+1))
        let z = 1.0 * FRAC_1_SQRT_2;
        let mut term: f64 = z;
        let mut erf = 0.0;
        for k in 0..60 {
            let kf = k as f64;
            if k > 0 {
                term *= -z * z / kf;
            }
            erf += term / (2.0 * kf + 1.0);
        }
        erf *= 2.0 / std::f64::consts::PI.sqrt();
        let expected = 0.5 * (1.0 + erf);
        assert_relative_eq!(std_normal_cdf(1.0), expected, max_relative = 1e-14);
        assert_relative_eq!(std_normal_cdf(1.0), 0.841_344_746_068_543, max_relative = 1e-9);
    }

    #[test]
    fn log_cdf_continuous_across_branch() {
        // erfc branch against tail-series branch near the switch point
        for x in [-24.0, -25.5, -26.0, -26.5, -30.0] {
            let series = log_normal_tail_lower(x);
            let log_cdf = log_std_normal_cdf(x);
            assert_relative_eq!(series, log_cdf, max_relative = 1e-13);
        }
    }

    #[test]
    fn log_cdf_deep_tail_reference() {
        // Phi(-40): leading term phi(40)/40, series corrections
        let got = log_std_normal_cdf(-40.0);
        let lead = log_std_normal_pdf(40.0) - 40f64.ln();
        assert!(got < lead && got > lead - 1e-3);
        assert!(log_std_normal_cdf(-1e4).is_finite());
    }

    #[test]
    fn log_cdf_monotone() {
        let mut prev = f64::NEG_INFINITY;
        let mut x = -300.0;
        while x <= 8.0 {
            let v = log_std_normal_cdf(x);
            assert!(v >= prev, "log cdf dropped at {x}");
            prev = v;
            x += 0.37;
        }
    }
}
