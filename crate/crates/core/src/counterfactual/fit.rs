//! Least-squares fit of `y(N) = A cos(w log N) + B`, where
//! `y = value * log^2 N / N^(2 sigma0 - 1)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::ModelSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    /// `2 gamma0`, or the refined frequency when it was fitted.
    pub frequency: f64,
    pub frequency_fitted: bool,
    pub rms_relative_residual: f64,
    /// Coefficient `C` of an added `C sin(w log N)` term at the same
    /// frequency; a phase the two-parameter form cannot represent.
    pub sine_coefficient: f64,
    pub rms_relative_residual_with_sine: f64,
    pub n_grid: Vec<usize>,
}

struct Linear {
    coefficients: Vec<f64>,
    rss: f64,
    rms_relative: f64,
}

fn normalized(values: &[(usize, f64)], model: &ModelSpec) -> (Vec<f64>, Vec<f64>) {
    values
        .iter()
        .map(|&(n, v)| {
            let ln_n = (n as f64).ln();
            (ln_n, v * ln_n * ln_n / (n as f64).powf(2.0 * model.sigma0 - 1.0))
        })
        .unzip()
}

fn solve_linear(x: &[f64], y: &[f64], frequency: f64, with_sine: bool) -> Result<Linear> {
    let cols = if with_sine { 3 } else { 2 };
    let design = DMatrix::from_fn(x.len(), cols, |i, j| match j {
        0 => (frequency * x[i]).cos(),
        1 => 1.0,
        _ => (frequency * x[i]).sin(),
    });
    let rhs = DVector::from_column_slice(y);
    let svd = design.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-10 * max_sv {
        return Err(Error::RankDeficient);
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|e| Error::Solver(e.to_string()))?;
    let fitted = &design * &coef;
    let resid = &rhs - &fitted;
    let rms_relative = (resid
        .iter()
        .zip(y)
        .map(|(r, v)| (r / v).powi(2))
        .sum::<f64>()
        / y.len() as f64)
        .sqrt();
    Ok(Linear {
        coefficients: coef.iter().cloned().collect(),
        rss: resid.norm_squared(),
        rms_relative,
    })
}

/// Frequency minimizing the residual sum of squares: a scan over
/// `[w0/2, 3 w0/2]` fine enough to resolve one period over the grid span,
/// then golden-section refinement around the best scan point.
fn refine_frequency(x: &[f64], y: &[f64], w0: f64) -> Result<f64> {
    let span = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
    let step = PI / span / 8.0;
    let rss = |w: f64| solve_linear(x, y, w, false).map(|l| l.rss).unwrap_or(f64::INFINITY);
    let (lo, hi) = (0.5 * w0, 1.5 * w0);
    let count = ((hi - lo) / step).ceil() as usize;
    let mut best = (w0, rss(w0));
    for k in 0..=count {
        let w = lo + k as f64 * step;
        let r = rss(w);
        if r < best.1 {
            best = (w, r);
        }
    }
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (rss(c), rss(d));
    while b - a > 1e-12 * w0 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = rss(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = rss(d);
        }
    }
    Ok(0.5 * (a + b))
}

/// Fits `A` and `B` at the frequency `2 gamma0`, optionally refining the
/// frequency first.
pub fn fit_theorem_constants(values: &[(usize, f64)], model: &ModelSpec, fit_frequency: bool) -> Result<FitResult> {
    if values.len() < 8 {
        return Err(Error::DegenerateGrid(format!(
            "{} points, need at least 8",
            values.len()
        )));
    }
    let (x, y) = normalized(values, model);
    let span = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
    if span <= PI / model.gamma0 {
        return Err(Error::DegenerateGrid(format!(
            "log N span {span:.3} does not cover a period {:.3}",
            PI / model.gamma0
        )));
    }
    if y.iter().any(|v| !v.is_finite() || *v == 0.0) {
        return Err(Error::DegenerateGrid("non-finite or zero data".into()));
    }
    let w0 = 2.0 * model.gamma0;
    let frequency = if fit_frequency { refine_frequency(&x, &y, w0)? } else { w0 };
    let two = solve_linear(&x, &y, frequency, false)?;
    let three = solve_linear(&x, &y, frequency, true)?;
    Ok(FitResult {
        a: two.coefficients[0],
        b: two.coefficients[1],
        frequency,
        frequency_fitted: fit_frequency,
        rms_relative_residual: two.rms_relative,
        sine_coefficient: three.coefficients[2],
        rms_relative_residual_with_sine: three.rms_relative,
        n_grid: values.iter().map(|v| v.0).collect(),
    })
}

/// `count` integers spaced geometrically over `[lo, hi]`, deduplicated.
pub fn geometric_grid(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count.max(2) - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}
