//! Least-squares scaling fits.

use crate::error::{LabError, Result};

/// A fitted scaling exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to `[0, 1]`.
    pub r_squared: f64,
    /// Smallest and largest abscissa in original (not log) units.
    pub window: (f64, f64),
    pub points: usize,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
}

impl FitResult {
    pub fn with_target(mut self, target: f64, tolerance: f64) -> Self {
        self.target = Some(target);
        self.tolerance = Some(tolerance);
        self
    }

    /// `None` when no target was attached.
    pub fn passed(&self) -> Option<bool> {
        match (self.target, self.tolerance) {
            (Some(t), Some(tol)) => Some((self.slope - t).abs() <= tol),
            _ => None,
        }
    }
}

/// Ordinary least squares of `y` on `x`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() {
        return Err(LabError::param("fit abscissa and ordinate lengths differ"));
    }
    let n = x.len() as f64;
    if x.len() < 2 {
        return Err(LabError::ShortWindow { points: x.len() });
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return Err(LabError::param("fit abscissa is constant"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok((slope, intercept, r2))
}

/// Fit `log y = slope * log x + intercept`. Needs at least four points.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() < 4 {
        return Err(LabError::ShortWindow { points: x.len() });
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(LabError::param("log-log fit needs strictly positive finite data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (slope, intercept, r_squared) = ols(&lx, &ly)?;
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        window: (x.iter().cloned().fold(f64::INFINITY, f64::min), x.iter().cloned().fold(0.0, f64::max)),
        points: x.len(),
        target: None,
        tolerance: None,
    })
}

/// Powers of two in `[lo, hi]`.
pub fn dyadic(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 1u64;
    while p <= hi {
        if p >= lo {
            out.push(p);
        }
        match p.checked_mul(2) {
            Some(q) => p = q,
            None => break,
        }
    }
    out
}
