//! Ordinary least squares on (x, y) pairs.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 for an exact two-point fit).
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl LinearFit {
    /// Normal-approximation 95% interval for the slope.
    pub fn slope_interval(&self) -> (f64, f64) {
        let half = 1.96 * self.slope_stderr;
        (self.slope - half, self.slope + half)
    }
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return Err(Error::DegenerateFit { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { needed: 3, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let slope_stderr = (rss / (nf - 2.0) / sxx).sqrt();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - rss / syy };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
        points: n,
    })
}

/// Fits log y = c + e·log x and returns the exponent fit.
pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}
