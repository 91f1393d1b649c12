use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest number of non-zero differences handled by the exact null distribution.
pub const EXACT_MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alternative {
    /// The first sample tends to be larger than the second.
    Greater,
    /// The first sample tends to be smaller than the second.
    Less,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WilcoxonOutcome {
    /// Sum of ranks of the positive differences.
    pub statistic: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub p_value: f64,
    pub exact: bool,
    /// Set when every difference was zero; `p_value` is then 1.
    pub degenerate: bool,
}

/// Average ranks (1-based) of `values`, ties sharing their mean rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Paired one-sided Wilcoxon signed-rank test on `a - b`.
///
/// Zero differences are dropped. Up to [`EXACT_MAX_N`] remaining pairs the
/// p-value comes from the exact permutation distribution of the statistic
/// (conditional on tied ranks); above that from the normal approximation with
/// tie-corrected variance.
pub fn wilcoxon_signed_rank<T: Real>(a: &[T], b: &[T], alternative: Alternative) -> Result<WilcoxonOutcome> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { what: "paired samples", expected: a.len(), found: b.len() });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| (x - y).as_f64()).filter(|d| *d != 0.0).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidArgument("non-finite paired difference".into()));
    }
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonOutcome { statistic: 0.0, n: 0, p_value: 1.0, exact: true, degenerate: true });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let w_plus: f64 = ranks.iter().zip(&diffs).filter(|(_, &d)| d > 0.0).map(|(r, _)| r).sum();

    if n <= EXACT_MAX_N {
        // ranks are multiples of 1/2, so doubled ranks are integers
        let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
        let max_sum: usize = doubled.iter().sum();
        let mut counts = vec![0u64; max_sum + 1];
        counts[0] = 1;
        for &r in &doubled {
            for s in (r..=max_sum).rev() {
                counts[s] += counts[s - r];
            }
        }
        let observed = (w_plus * 2.0).round() as usize;
        let tail: u64 = match alternative {
            Alternative::Greater => counts[observed..].iter().sum(),
            Alternative::Less => counts[..=observed].iter().sum(),
        };
        let p = tail as f64 / (1u64 << n) as f64;
        return Ok(WilcoxonOutcome { statistic: w_plus, n, p_value: p, exact: true, degenerate: false });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = magnitudes.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = (w_plus - mean) / var.sqrt();
    let p = match alternative {
        Alternative::Greater => 0.5 * erfc(z / std::f64::consts::SQRT_2),
        Alternative::Less => 0.5 * erfc(-z / std::f64::consts::SQRT_2),
    };
    Ok(WilcoxonOutcome { statistic: w_plus, n, p_value: p.clamp(0.0, 1.0), exact: false, degenerate: false })
}

/// Holm step-down adjustment, returned in input order.
pub fn holm_adjust(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].partial_cmp(&p_values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        running = running.max(((m - rank) as f64 * p_values[i]).min(1.0));
        adjusted[i] = running;
    }
    adjusted
}
