//! Adaptive Gauss-Kronrod quadrature against the weight `dt / (1/4 + t^2)`.
//!
//! The finite part `[-t_max, t_max]` is split into fixed-width starting
//! panels that are refined independently by bisection (in parallel, summed
//! in panel order). The rest of the line is handled by sampling the
//! integrand on a sparse grid in `[t_max, 2 t_max]` and multiplying by the
//! exact weight mass beyond `t_max`: the sample mean gives the tail
//! estimate that is added to the value, the sample sup gives the reported
//! tail bound.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest default cutoff; keeps the tail sampling region inside the zeta
/// evaluation domain `|t| <= 1e4`.
pub const DEFAULT_T_CAP: f64 = 5000.0;

const TAIL_SAMPLES: usize = 64;

// Gauss-Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Integration cutoff; `[-t_max, t_max]` is integrated adaptively.
    pub t_max: f64,
    /// Absolute tolerance for the finite part.
    pub panel_tolerance: f64,
    pub max_panels: usize,
    /// Width of the starting panels before refinement.
    pub initial_panel_width: f64,
}

impl QuadratureSpec {
    pub fn new(t_max: f64, panel_tolerance: f64, max_panels: usize) -> Result<Self> {
        let spec = Self {
            t_max,
            panel_tolerance,
            max_panels,
            initial_panel_width: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `t_max = max(200, 2N)`, capped at [`DEFAULT_T_CAP`].
    pub fn for_length(n: usize) -> Self {
        Self {
            t_max: (2.0 * n as f64).max(200.0).min(DEFAULT_T_CAP),
            ..Self::default()
        }
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.panel_tolerance = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max >= 1.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t_max = {} must be >= 1",
                self.t_max
            )));
        }
        if !(self.panel_tolerance >= 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "panel_tolerance = {:e} must be >= 1e-12",
                self.panel_tolerance
            )));
        }
        if self.max_panels == 0 || !(self.initial_panel_width > 0.0) {
            return Err(Error::InvalidParameter(
                "max_panels and initial_panel_width must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            t_max: 200.0,
            panel_tolerance: 1e-10,
            max_panels: 2_000_000,
            initial_panel_width: 1.0,
        }
    }
}

/// Whether the integrand is even in t (then only `[0, t_max]` is evaluated).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Even,
    General,
}

/// `(1/2pi) int f(t) dt / (1/4 + t^2)` over the real line.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WeightedIntegral {
    /// `truncated + tail_estimate`.
    pub value: f64,
    /// Contribution of `[-t_max, t_max]`.
    pub truncated: f64,
    pub tail_estimate: f64,
    /// `sup |f|` on the tail samples times the weight mass beyond `t_max`.
    pub tail_bound: f64,
    /// Gauss-Kronrod error estimate of the finite part.
    pub quadrature_error: f64,
    pub panels: usize,
}

/// Weight `1 / (1/4 + t^2)`.
pub fn weight(t: f64) -> f64 {
    1.0 / (0.25 + t * t)
}

/// `int_{t_max}^inf dt / (1/4 + t^2)` (one side).
pub fn weight_tail_mass(t_max: f64) -> f64 {
    2.0 * (0.5 * PI - (2.0 * t_max).atan())
}

/// Scalar weighted integral.
pub fn weighted_integral<F>(f: F, symmetry: Symmetry, spec: &QuadratureSpec) -> Result<WeightedIntegral>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let out = weighted_integral_vec(
        |t, out: &mut [f64]| {
            out[0] = f(t)?;
            Ok(())
        },
        1,
        symmetry,
        spec,
    )?;
    Ok(out[0])
}

/// Component-wise weighted integrals of a vector-valued integrand sharing
/// one set of nodes. Refinement is driven by the worst component.
pub fn weighted_integral_vec<F>(
    f: F,
    dim: usize,
    symmetry: Symmetry,
    spec: &QuadratureSpec,
) -> Result<Vec<WeightedIntegral>>
where
    F: Fn(f64, &mut [f64]) -> Result<()> + Sync,
{
    spec.validate()?;
    let g = |t: f64, out: &mut [f64]| -> Result<()> {
        f(t, out)?;
        let w = weight(t) / (2.0 * PI);
        for v in out.iter_mut() {
            *v *= w;
        }
        Ok(())
    };

    let (lo, factor) = match symmetry {
        Symmetry::Even => (0.0, 2.0),
        Symmetry::General => (-spec.t_max, 1.0),
    };
    let tol = spec.panel_tolerance / factor;
    let finite = integrate_adaptive(&g, dim, lo, spec.t_max, tol, spec)?;

    // tail samples in [t_max, 2 t_max]
    let mass = weight_tail_mass(spec.t_max) / (2.0 * PI);
    let mut mean = vec![0.0; dim];
    let mut sup = vec![0.0f64; dim];
    let mut buf = vec![0.0; dim];
    let signs: &[f64] = match symmetry {
        Symmetry::Even => &[1.0],
        Symmetry::General => &[1.0, -1.0],
    };
    for &sign in signs {
        for k in 0..TAIL_SAMPLES {
            let t = spec.t_max * (1.0 + (k as f64 + 0.5) / TAIL_SAMPLES as f64);
            f(sign * t, &mut buf)?;
            for i in 0..dim {
                mean[i] += buf[i] / TAIL_SAMPLES as f64;
                sup[i] = sup[i].max(buf[i].abs());
            }
        }
    }
    let sides = 2.0 / signs.len() as f64;

    Ok((0..dim)
        .map(|i| {
            let truncated = factor * finite.values[i];
            let tail_estimate = sides * mass * mean[i];
            WeightedIntegral {
                value: truncated + tail_estimate,
                truncated,
                tail_estimate,
                tail_bound: 2.0 * mass * sup[i],
                quadrature_error: factor * finite.errors[i],
                panels: finite.panels,
            }
        })
        .collect())
}

struct Adaptive {
    values: Vec<f64>,
    errors: Vec<f64>,
    panels: usize,
}

/// Gauss-Kronrod 7/15 on `[a, b]`: returns (kronrod, error) per component.
fn gk15<G>(g: &G, dim: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)>
where
    G: Fn(f64, &mut [f64]) -> Result<()>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fc = vec![0.0; dim];
    g(center, &mut fc)?;
    let mut kron: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut gauss: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    let mut abs_sum: Vec<f64> = fc.iter().map(|v| v.abs() * WGK[7]).collect();
    let mut samples = Vec::with_capacity(15);
    samples.push(fc.clone());
    let mut f1 = vec![0.0; dim];
    let mut f2 = vec![0.0; dim];
    for j in 0..7 {
        let x = half * XGK[j];
        g(center - x, &mut f1)?;
        g(center + x, &mut f2)?;
        for i in 0..dim {
            let s = f1[i] + f2[i];
            kron[i] += WGK[j] * s;
            abs_sum[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * s;
            }
        }
        samples.push(f1.clone());
        samples.push(f2.clone());
    }
    let hl = half.abs();
    let mut errors = vec![0.0; dim];
    for i in 0..dim {
        let mean = kron[i] * 0.5;
        let mut asc = WGK[7] * (samples[0][i] - mean).abs();
        for j in 0..7 {
            asc += WGK[j] * ((samples[1 + 2 * j][i] - mean).abs() + (samples[2 + 2 * j][i] - mean).abs());
        }
        let res_asc = asc * hl;
        let res_abs = abs_sum[i] * hl;
        let mut err = ((kron[i] - gauss[i]) * half).abs();
        if res_asc != 0.0 && err != 0.0 {
            err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
        }
        if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * res_abs);
        }
        errors[i] = err;
        kron[i] *= half;
    }
    Ok((kron, errors))
}

fn refine<G>(
    g: &G,
    dim: usize,
    a: f64,
    b: f64,
    tol_density: f64,
    counter: &AtomicUsize,
    spec: &QuadratureSpec,
) -> Result<Adaptive>
where
    G: Fn(f64, &mut [f64]) -> Result<()>,
{
    let (val, err) = gk15(g, dim, a, b)?;
    let width = b - a;
    let local_tol = tol_density * width;
    // an error estimate at the roundoff floor cannot be reduced by bisection
    let converged = err
        .iter()
        .zip(&val)
        .all(|(e, v)| *e <= local_tol.max(100.0 * f64::EPSILON * v.abs()));
    let min_width = 1e-9 * spec.t_max.max(1.0);
    if converged || width < min_width {
        return Ok(Adaptive {
            values: val,
            errors: err,
            panels: 1,
        });
    }
    if counter.fetch_add(1, Ordering::Relaxed) >= spec.max_panels {
        return Err(Error::QuadratureNonConvergence {
            max_panels: spec.max_panels,
        });
    }
    let mid = 0.5 * (a + b);
    let left = refine(g, dim, a, mid, tol_density, counter, spec)?;
    let right = refine(g, dim, mid, b, tol_density, counter, spec)?;
    Ok(Adaptive {
        values: left.values.iter().zip(&right.values).map(|(x, y)| x + y).collect(),
        errors: left.errors.iter().zip(&right.errors).map(|(x, y)| x + y).collect(),
        panels: left.panels + right.panels,
    })
}

fn integrate_adaptive<G>(g: &G, dim: usize, a: f64, b: f64, tol: f64, spec: &QuadratureSpec) -> Result<Adaptive>
where
    G: Fn(f64, &mut [f64]) -> Result<()> + Sync,
{
    let length = b - a;
    let count = ((length / spec.initial_panel_width).ceil() as usize).max(1);
    if count > spec.max_panels {
        return Err(Error::QuadratureNonConvergence {
            max_panels: spec.max_panels,
        });
    }
    let h = length / count as f64;
    let tol_density = tol / length;
    let counter = AtomicUsize::new(count);
    let parts: Vec<Result<Adaptive>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let lo = a + h * k as f64;
            let hi = if k + 1 == count { b } else { a + h * (k + 1) as f64 };
            refine(g, dim, lo, hi, tol_density, &counter, spec)
        })
        .collect();
    let mut total = Adaptive {
        values: vec![0.0; dim],
        errors: vec![0.0; dim],
        panels: 0,
    };
    for part in parts {
        let part = part?;
        for i in 0..dim {
            total.values[i] += part.values[i];
            total.errors[i] += part.errors[i];
        }
        total.panels += part.panels;
    }
    Ok(total)
}

/// Plain adaptive integral of `g` over `[a, b]` (no weight), used by
/// callers that need an unweighted Gauss-Kronrod integral.
pub fn integrate<G>(g: G, a: f64, b: f64, tol: f64, spec: &QuadratureSpec) -> Result<(f64, f64)>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    let vg = |t: f64, out: &mut [f64]| -> Result<()> {
        out[0] = g(t)?;
        Ok(())
    };
    let r = integrate_adaptive(&vg, 1, a, b, tol, spec)?;
    Ok((r.values[0], r.errors[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_low_degree() {
        for deg in 0..=22 {
            let g = |x: f64, out: &mut [f64]| -> Result<()> {
                out[0] = x.powi(deg);
                Ok(())
            };
            let (k, _) = gk15(&g, 1, -1.0, 1.0).unwrap();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((k[0] - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        let s: f64 = 2.0 * (WG[0] + WG[1] + WG[2]) + WG[3];
        assert!((s - 2.0).abs() < 1e-15);
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_weight_integrals() {
        let spec = QuadratureSpec::default().with_t_max(1.0e4).with_tolerance(1e-12);
        let one = weighted_integral(|_| Ok(1.0), Symmetry::Even, &spec).unwrap();
        assert!((one.value - 1.0).abs() < 1e-10, "{one:?}");
        let w = weighted_integral(|t| Ok(weight(t)), Symmetry::Even, &spec).unwrap();
        assert!((w.value - 2.0).abs() < 1e-10, "{w:?}");
        let general = weighted_integral(|t| Ok(weight(t)), Symmetry::General, &spec).unwrap();
        assert!((general.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_against_dense_trapezoid() {
        let spec = QuadratureSpec::default();
        let got = weighted_integral(|t| Ok((-t * t).exp()), Symmetry::Even, &spec).unwrap();
        // trapezoid on [0, 12] with h = 1e-4: integrand is smooth and even,
        // so the error is far below 1e-8
        let h = 1e-4;
        let n = (12.0 / h) as usize;
        let mut acc = 0.0;
        for k in 0..=n {
            let t = k as f64 * h;
            let v = (-t * t).exp() * weight(t);
            acc += if k == 0 || k == n { 0.5 * v } else { v };
        }
        let oracle = 2.0 * acc * h / (2.0 * PI);
        assert!((got.value - oracle).abs() < 1e-8, "{} vs {oracle}", got.value);
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = QuadratureSpec {
            max_panels: 300,
            ..QuadratureSpec::default()
        };
        let r = weighted_integral(|t| Ok((1000.0 * t).sin().abs()), Symmetry::Even, &spec);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.5, 1e-10, 10).is_err());
        assert!(QuadratureSpec::new(10.0, 1e-13, 10).is_err());
        assert!(QuadratureSpec::new(10.0, 1e-10, 10).is_ok());
        assert_eq!(QuadratureSpec::for_length(10).t_max, 200.0);
        assert_eq!(QuadratureSpec::for_length(1000).t_max, 2000.0);
        assert_eq!(QuadratureSpec::for_length(100_000).t_max, DEFAULT_T_CAP);
    }

    #[test]
    fn deterministic_repeat() {
        let spec = QuadratureSpec::default();
        let f = |t: f64| Ok((3.0 * t).cos().powi(2) + (t * 0.1).sin());
        let a = weighted_integral(f, Symmetry::General, &spec).unwrap();
        let b = weighted_integral(f, Symmetry::General, &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
