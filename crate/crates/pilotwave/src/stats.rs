//! Statistical test battery: Kolmogorov-Smirnov, cell chi-square, total
//! variation, and sign-rule classification accuracy.

use alloc::vec::Vec;

use crate::grid::Grid1;
use crate::{Error, Result};

/// Outcome of one statistical check. `pass` holds exactly when the statistic
/// stands in the declared relation to `threshold` (below it for KS, and
/// `p value >= threshold` for chi-square).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestReport {
    pub statistic: f64,
    pub threshold: f64,
    pub p_value_or_bound: f64,
    pub n_samples: usize,
    pub pass: bool,
}

/// Asymptotic one-sample KS critical value at significance `alpha`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    libm::sqrt(-libm::log(alpha / 2.0) / 2.0) / libm::sqrt(n as f64)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 sum_k (-1)^(k-1) exp(-2 k^2 lambda^2)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = libm::exp(-2.0 * (k * k) as f64 * lambda * lambda);
        sum += sign * term;
        if term < 1e-18 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Piecewise-linear CDF of a density sampled on grid cells: cell `j` covers
/// `[x_j, x_j + dx)` with constant density.
struct ReferenceCdf {
    x_min: f64,
    dx: f64,
    /// Cumulative mass at the left edge of each cell, plus trailing 1.
    cum: Vec<f64>,
    masses: Vec<f64>,
}

impl ReferenceCdf {
    fn new(density: &[f64], grid: &Grid1) -> Result<Self> {
        if density.is_empty() || density.len() != grid.len() {
            return Err(Error::EmptyInput);
        }
        let total: f64 = density.iter().sum();
        if !(total > 0.0) {
            return Err(Error::EmptyInput);
        }
        let masses: Vec<f64> = density.iter().map(|d| d / total).collect();
        let mut cum = Vec::with_capacity(masses.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for m in &masses {
            acc += m;
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = 1.0;
        Ok(Self { x_min: grid.x_min(), dx: grid.spacing(), cum, masses })
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (x - self.x_min) / self.dx;
        if t <= 0.0 {
            return 0.0;
        }
        let j = libm::floor(t) as usize;
        if j >= self.masses.len() {
            return 1.0;
        }
        self.cum[j] + self.masses[j] * (t - j as f64)
    }
}

/// One-sample KS sup-distance between `samples` and a reference density on
/// `grid`, with pass/fail at significance `alpha`.
pub fn ks_distance(
    samples: &[f64],
    reference_density: &[f64],
    grid: &Grid1,
    alpha: f64,
) -> Result<TestReport> {
    if samples.len() < 50 {
        return Err(Error::InsufficientData { needed: 50, got: samples.len() });
    }
    let cdf = ReferenceCdf::new(reference_density, grid)?;
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf.eval(x);
        sup = sup.max(libm::fabs((i + 1) as f64 / n - f));
        sup = sup.max(libm::fabs(i as f64 / n - f));
    }
    let threshold = ks_critical(sorted.len(), alpha);
    Ok(TestReport {
        statistic: sup,
        threshold,
        p_value_or_bound: kolmogorov_survival(libm::sqrt(n) * sup),
        n_samples: sorted.len(),
        pass: sup < threshold,
    })
}

// Regularized lower incomplete gamma P(a, x) via the series expansion,
// valid and fast for x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if libm::fabs(del) < libm::fabs(sum) * 1e-16 {
            break;
        }
    }
    sum * libm::exp(-x + a * libm::log(x) - libm::lgamma(a))
}

// Regularized upper incomplete gamma Q(a, x) via the continued fraction,
// valid for x >= a + 1.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if libm::fabs(d) < tiny {
            d = tiny;
        }
        c = b + an / c;
        if libm::fabs(c) < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < 1e-16 {
            break;
        }
    }
    h * libm::exp(-x + a * libm::log(x) - libm::lgamma(a))
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

/// Pearson chi-square test of observed counts against expected counts.
///
/// Cells with expectation below `min_expected` are pooled into one cell so
/// the asymptotic distribution stays valid. Pass means `p >= alpha`.
pub fn chi_square_cells(
    observed: &[u64],
    expected: &[f64],
    min_expected: f64,
    alpha: f64,
) -> Result<TestReport> {
    if observed.is_empty() || observed.len() != expected.len() {
        return Err(Error::LengthMismatch { left: observed.len(), right: expected.len() });
    }
    let mut stat = 0.0;
    let mut cells = 0usize;
    let mut pooled_obs = 0.0;
    let mut pooled_exp = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        if e >= min_expected {
            let diff = o as f64 - e;
            stat += diff * diff / e;
            cells += 1;
        } else {
            pooled_obs += o as f64;
            pooled_exp += e;
        }
    }
    if pooled_exp > 0.0 {
        let diff = pooled_obs - pooled_exp;
        stat += diff * diff / pooled_exp;
        cells += 1;
    }
    if cells < 2 {
        return Err(Error::InsufficientData { needed: 2, got: cells });
    }
    let dof = (cells - 1) as f64;
    let p = gamma_q(dof / 2.0, stat / 2.0);
    let n: u64 = observed.iter().sum();
    Ok(TestReport {
        statistic: stat,
        threshold: alpha,
        p_value_or_bound: p,
        n_samples: n as usize,
        pass: p >= alpha,
    })
}

/// Fraction of samples where `sign(score)` equals the label. A zero score
/// never matches either label, so ties count as misclassifications.
pub fn classify_accuracy(labels: &[i8], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch { left: labels.len(), right: scores.len() });
    }
    if labels.len() < 100 {
        return Err(Error::InsufficientData { needed: 100, got: labels.len() });
    }
    let hits = labels
        .iter()
        .zip(scores)
        .filter(|(&l, &s)| (s > 0.0 && l == 1) || (s < 0.0 && l == -1))
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Total variation distance `(1/2) sum |p - q| dx` between two normalized
/// densities on a common grid.
pub fn total_variation(p: &[f64], q: &[f64], spacing: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: q.len() });
    }
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    for density in [p, q] {
        let total: f64 = density.iter().sum::<f64>() * spacing;
        if libm::fabs(total - 1.0) > 1e-6 {
            return Err(Error::NotNormalized { norm: total });
        }
    }
    let sum: f64 = p.iter().zip(q).map(|(a, b)| libm::fabs(a - b)).sum();
    Ok(0.5 * sum * spacing)
}

/// Histogram of scalar values as a normalized density on `bins` equal cells
/// over `[lo, hi)`; values outside the range land in the edge cells.
pub fn histogram_density(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Vec<f64>> {
    if values.is_empty() || bins == 0 || !(hi > lo) {
        return Err(Error::EmptyInput);
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = alloc::vec![0u64; bins];
    for &v in values {
        let j = libm::floor((v - lo) / width) as i64;
        let j = j.clamp(0, bins as i64 - 1) as usize;
        counts[j] += 1;
    }
    let norm = 1.0 / (values.len() as f64 * width);
    Ok(counts.iter().map(|&c| c as f64 * norm).collect())
}
