//! The explicit decomposition of the smoothed mollifier
//!
//!   V_N(s) = (1/zeta(s)) (1 - zeta'/zeta(s) / log N)
//!          + (1/log N) sum_rho R_N(rho, s) + (1/log N) sum_n R_N(-2n, s),
//!
//! where `R_N(rho, s) = Res_{z=rho} N^(z-s) / (zeta(z) (z-s)^2)`.
//!
//! The trivial-zero residues have the closed form
//! `R_N(-2n, s) = 2 (-1)^n (2pi)^(2n) z^(s+2n) / ((2n)! zeta(2n+1) (2n+s)^2)`
//! with `z = 1/N`. [`f_series`] is the series with prefactor `pi` and powers
//! `(2pi)^(2n+1)`, which is `pi^2` times that sum; [`trivial_zero_term`]
//! is the residue sum itself.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::counterfactual::{CounterfactualZeta, Sigma2Mode};
use crate::error::{Error, Result};
use crate::mollifier::build_vn;
use crate::special::{odd_zeta_table, zeta_jet, ComplexValue, PrecisionSpec, ZetaLike};
use crate::zeros::ZeroTable;

/// `|rho - s|` below which residue sums refuse to evaluate.
pub const COLLISION_DISTANCE: f64 = 1e-3;

const SERIES_MAX_TERMS: usize = 200;
const CONTOUR_POINTS: usize = 64;

fn odd_zetas() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| odd_zeta_table(SERIES_MAX_TERMS).expect("odd zeta table"))
}

/// One residue together with the point it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueTerm {
    pub rho: ComplexValue,
    pub value: ComplexValue,
    pub n: usize,
    pub s: ComplexValue,
}

fn check_collision(rho: ComplexValue, s: ComplexValue) -> Result<()> {
    let distance = (rho - s).norm();
    if distance < COLLISION_DISTANCE {
        return Err(Error::NearCollision { s, rho, distance });
    }
    Ok(())
}

/// Closed form `N^(rho-s) / (F'(rho) (rho-s)^2)` for a simple zero.
pub fn residue_closed_form(rho: ComplexValue, derivative: ComplexValue, s: ComplexValue, n: usize) -> ComplexValue {
    let d = rho - s;
    ((rho - s) * (n as f64).ln()).exp() / (derivative * d * d)
}

/// `R_N(rho, s)` for `F = zeta_like`. Simple zeros use the closed form,
/// higher multiplicities a trapezoid rule on a circle around `rho`.
pub fn residue_rn(
    rho: ComplexValue,
    multiplicity: u32,
    s: ComplexValue,
    n: usize,
    zeta_like: &dyn ZetaLike,
) -> Result<ComplexValue> {
    check_collision(rho, s)?;
    if n < 1 || multiplicity == 0 {
        return Err(Error::InvalidParameter("need N >= 1 and multiplicity >= 1".into()));
    }
    if multiplicity == 1 {
        Ok(residue_closed_form(rho, zeta_like.derivative(rho)?, s, n))
    } else {
        residue_contour(rho, s, n, zeta_like, default_radius(rho, s))
    }
}

fn default_radius(rho: ComplexValue, s: ComplexValue) -> f64 {
    ((rho - s).norm() / 8.0).min(0.02)
}

/// `(1/2 pi i) int_{|z-rho|=r} N^(z-s) / (F(z) (z-s)^2) dz` with the
/// periodic trapezoid rule.
pub fn residue_contour(
    rho: ComplexValue,
    s: ComplexValue,
    n: usize,
    zeta_like: &dyn ZetaLike,
    radius: f64,
) -> Result<ComplexValue> {
    if !(radius > 0.0) || radius >= (rho - s).norm() / 4.0 {
        return Err(Error::Contour { rho, radius });
    }
    let ln_n = (n as f64).ln();
    let mut acc = ComplexValue::new(0.0, 0.0);
    for k in 0..CONTOUR_POINTS {
        let theta = 2.0 * PI * k as f64 / CONTOUR_POINTS as f64;
        let e = ComplexValue::from_polar(1.0, theta);
        let z = rho + radius * e;
        let f = zeta_like.value(z)?;
        if f.norm() < 1e-14 {
            return Err(Error::Contour { rho, radius });
        }
        let d = z - s;
        acc += ((z - s) * ln_n).exp() / (f * d * d) * e;
    }
    Ok(acc * radius / CONTOUR_POINTS as f64)
}

/// `F_s(z) = pi z^s sum_{n>=1} (-1)^n (2pi)^(2n+1) z^(2n) / ((2n)! zeta(2n+1) (2n+s)^2)`.
pub fn f_series(s: ComplexValue, z: f64) -> Result<ComplexValue> {
    Ok(trivial_series(s, z)? * (PI * PI))
}

/// `sum_{n>=1} R_N(-2n, s)` at `z = 1/N`, which equals `f_series / pi^2`.
pub fn trivial_zero_term(s: ComplexValue, z: f64) -> Result<ComplexValue> {
    trivial_series(s, z)
}

/// Terms `R(-2n, s)` of [`trivial_zero_term`] for `n = 1, 2, ...` until
/// convergence.
pub fn trivial_zero_terms(s: ComplexValue, z: f64) -> Result<Vec<ComplexValue>> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::InvalidParameter(format!("z = {z} outside (0, 1)")));
    }
    for k in 1..=SERIES_MAX_TERMS {
        if s == ComplexValue::new(-2.0 * k as f64, 0.0) {
            return Err(Error::Pole { function: "f_series", at: s });
        }
    }
    let zs = (s * z.ln()).exp();
    let zetas = odd_zetas();
    let mut terms = Vec::new();
    let mut partial = ComplexValue::new(0.0, 0.0);
    // c_n = 2 (2 pi z)^(2n) / (2n)!
    let x = 2.0 * PI * z;
    let mut c = 2.0;
    for n in 1..=SERIES_MAX_TERMS {
        c *= x * x / ((2 * n - 1) as f64 * (2 * n) as f64);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let d = s + 2.0 * n as f64;
        let term = zs * (sign * c / zetas[n - 1]) / (d * d);
        partial += term;
        terms.push(term);
        if term.norm() < 1e-16 * partial.norm() {
            return Ok(terms);
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: SERIES_MAX_TERMS,
    })
}

fn trivial_series(s: ComplexValue, z: f64) -> Result<ComplexValue> {
    Ok(trivial_zero_terms(s, z)?.into_iter().sum())
}

/// A truncated zero sum with its heuristic tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSumValue {
    pub value: ComplexValue,
    pub height: f64,
    /// Density-based magnitude of the omitted zeros.
    pub tail_estimate: f64,
}

/// `(1/log N) sum R_N(rho, s)` over the table's zeros and their conjugates,
/// using the cached derivatives.
pub fn sigma1(n: usize, s: ComplexValue, table: &ZeroTable) -> Result<ZeroSumValue> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N = {n} must be >= 2")));
    }
    let mut acc = ComplexValue::new(0.0, 0.0);
    for e in table.entries() {
        if e.multiplicity != 1 {
            return Err(Error::InvalidParameter(format!(
                "zero at {} has multiplicity {}; use residue_rn",
                e.ordinate, e.multiplicity
            )));
        }
        let rho = e.rho();
        check_collision(rho, s)?;
        check_collision(rho.conj(), s)?;
        acc += residue_closed_form(rho, e.zeta_prime, s, n);
        acc += residue_closed_form(rho.conj(), e.zeta_prime.conj(), s, n);
    }
    let ln_n = (n as f64).ln();
    Ok(ZeroSumValue {
        value: acc / ln_n,
        height: table.height(),
        tail_estimate: residue_tail(n, s, table) / ln_n,
    })
}

/// `2 N^(1/2 - Re s) <1/|zeta'|> int_T^inf (1/2pi) log(t/2pi) / t^2 dt`
/// with the mean taken over the top of the table.
pub fn residue_tail(n: usize, s: ComplexValue, table: &ZeroTable) -> f64 {
    let height = table.height();
    if table.is_empty() || height <= 2.0 * PI {
        return 0.0;
    }
    let top = &table.entries()[table.len().saturating_sub(100)..];
    let mean_inv: f64 = top.iter().map(|e| 1.0 / e.zeta_prime.norm()).sum::<f64>() / top.len() as f64;
    let density = ((height / (2.0 * PI)).ln() + 1.0) / (2.0 * PI * height);
    2.0 * (n as f64).powf(0.5 - s.re) * mean_inv * density
}

/// `(1/log N) sum R_N(rho, s)` over the model's engineered zeros, with
/// `F = M`: the pair `sigma0 +- i gamma0`, or all four in quadruplet mode.
pub fn sigma2(n: usize, s: ComplexValue, model: &CounterfactualZeta, mode: Sigma2Mode) -> Result<ComplexValue> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N = {n} must be >= 2")));
    }
    let mut acc = ComplexValue::new(0.0, 0.0);
    for (rho, derivative) in model.off_line_zeros(mode)? {
        check_collision(rho, s)?;
        acc += residue_closed_form(rho, derivative, s, n);
    }
    Ok(acc / (n as f64).ln())
}

/// Direct and reconstructed values of `V_N(s)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub s: (f64, f64),
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    pub height: f64,
    pub error: f64,
    pub relative_error: f64,
}

/// Reconstructs `V_N(s)` from the decomposition with the zero sum
/// truncated at the table height.
pub fn lemma23_reconstruct(n: usize, s: ComplexValue, table: &ZeroTable) -> Result<DecompositionReport> {
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < Re s < 1, got {s}")));
    }
    let lhs = build_vn(n)?.eval(s);
    let ln_n = (n as f64).ln();
    let [z, dz, _] = zeta_jet(s, 1, &PrecisionSpec::default())?;
    let head = (1.0 - dz / (z * ln_n)) / z;
    let zeros = sigma1(n, s, table)?.value;
    let trivial = trivial_zero_term(s, 1.0 / n as f64)? / ln_n;
    let rhs = head + zeros + trivial;
    let error = (lhs - rhs).norm();
    Ok(DecompositionReport {
        n,
        s: (s.re, s.im),
        lhs: (lhs.re, lhs.im),
        rhs: (rhs.re, rhs.im),
        height: table.height(),
        error,
        relative_error: error / lhs.norm(),
    })
}

/// Residue terms at the first `count` table zeros, for reporting.
pub fn residue_terms(n: usize, s: ComplexValue, table: &ZeroTable, count: usize) -> Result<Vec<ResidueTerm>> {
    table.entries()[..count.min(table.len())]
        .iter()
        .map(|e| {
            check_collision(e.rho(), s)?;
            Ok(ResidueTerm {
                rho: e.rho(),
                value: residue_closed_form(e.rho(), e.zeta_prime, s, n),
                n,
                s,
            })
        })
        .collect()
}
