//! Small numeric helpers shared across modules.

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error of the mean. The standard error is NaN
/// for fewer than two values.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let r = values.len();
    if r == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = neumaier_sum(values.iter().copied()) / r as f64;
    if r < 2 {
        return (mean, f64::NAN);
    }
    (mean, (sample_variance_with_mean(values, mean) / r as f64).sqrt())
}

/// Unbiased sample variance; NaN for fewer than two values.
pub fn sample_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let mean = neumaier_sum(values.iter().copied()) / values.len() as f64;
    sample_variance_with_mean(values, mean)
}

fn sample_variance_with_mean(values: &[f64], mean: f64) -> f64 {
    let ss = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    ss / (values.len() - 1) as f64
}

/// Ordinary least squares fit `y = a + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    /// Standard error of the slope; NaN with fewer than three points.
    pub slope_stderr: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let m = xs.len();
    if m < 2 || ys.len() != m {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if m > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - intercept - slope * x;
                r * r
            })
            .sum();
        (rss / (m - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    Some(LinearFit { intercept, slope, slope_stderr })
}

/// `(2m - 1)!!`, the number of pair partitions of `2m` points.
pub fn double_factorial_odd(m: usize) -> u128 {
    (1..=m as u128).map(|i| 2 * i - 1).product()
}
