//! Error bars for correlated Monte Carlo time series: binning analysis with
//! bin-size doubling, and a binned jackknife for nonlinear functions of means.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bin-size doubling stops once fewer than this many bins would remain.
pub const MIN_BINS: usize = 32;

/// A value with its one-sigma standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    pub mean: f64,
    pub error: f64,
    /// Largest bin size that still leaves `MIN_BINS` bins (1 for short series).
    pub bin_size: usize,
    pub n_bins: usize,
}

impl Binning {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.mean, self.error)
    }
}

fn bin_means(samples: &[f64], bin_size: usize) -> Vec<f64> {
    samples
        .chunks_exact(bin_size)
        .map(|c| c.iter().sum::<f64>() / bin_size as f64)
        .collect()
}

fn standard_error(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Standard error of the mean of a correlated series.
///
/// The bin size is doubled while at least `MIN_BINS` bins remain, and the
/// largest error seen over all levels is reported.
pub fn binning_analysis(samples: &[f64]) -> Result<Binning> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientStatistics(format!(
            "{n} samples, binning needs at least 2"
        )));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut bin_size = 1;
    let mut error = standard_error(samples);
    while n / (2 * bin_size) >= MIN_BINS {
        bin_size *= 2;
        error = error.max(standard_error(&bin_means(samples, bin_size)));
    }
    Ok(Binning {
        mean,
        error,
        bin_size,
        n_bins: n / bin_size,
    })
}

/// Jackknife estimate of `func` applied to the means of several equally long
/// series, resampled in bins of `bin_size`.
pub fn jackknife<F>(series: &[&[f64]], bin_size: usize, func: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64,
{
    let n = series.first().map_or(0, |s| s.len());
    if series.iter().any(|s| s.len() != n) {
        return Err(Error::Argument("jackknife series differ in length".into()));
    }
    let bin_size = bin_size.max(1);
    let n_bins = n / bin_size;
    if n_bins < 2 {
        return Err(Error::InsufficientStatistics(format!(
            "{n_bins} jackknife bins, need at least 2"
        )));
    }
    let full: Vec<f64> = series
        .iter()
        .map(|s| s.iter().sum::<f64>() / n as f64)
        .collect();
    let binned: Vec<Vec<f64>> = series
        .iter()
        .map(|s| bin_means(&s[..n_bins * bin_size], bin_size))
        .collect();
    let sums: Vec<f64> = binned.iter().map(|b| b.iter().sum()).collect();
    let mut args = vec![0.0; series.len()];
    let leave_one_out: Vec<f64> = (0..n_bins)
        .map(|k| {
            for (a, (sum, b)) in args.iter_mut().zip(sums.iter().zip(&binned)) {
                *a = (sum - b[k]) / (n_bins - 1) as f64;
            }
            func(&args)
        })
        .collect();
    let mean_loo = leave_one_out.iter().sum::<f64>() / n_bins as f64;
    let var = leave_one_out
        .iter()
        .map(|v| (v - mean_loo) * (v - mean_loo))
        .sum::<f64>()
        * (n_bins - 1) as f64
        / n_bins as f64;
    Ok(Estimate::new(func(&full), var.sqrt()))
}
