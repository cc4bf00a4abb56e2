//! Binomial confidence intervals.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_successes() {
        let (lo, hi) = wilson(0, 100_000, Z95);
        assert_eq!(lo, 0.0);
        assert_abs_diff_eq!(hi, Z95 * Z95 / (100_000.0 + Z95 * Z95), epsilon = 1e-12);
    }

    #[test]
    fn brackets_the_estimate() {
        let (lo, hi) = wilson(40, 1000, Z95);
        assert!(lo < 0.04 && 0.04 < hi);
        // textbook value for 40/1000
        assert_abs_diff_eq!(lo, 0.02951, epsilon = 1e-4);
        assert_abs_diff_eq!(hi, 0.05405, epsilon = 1e-4);
    }

    #[test]
    fn empty_sample_is_uninformative() {
        assert_eq!(wilson(0, 0, Z95), (0.0, 1.0));
    }
}
