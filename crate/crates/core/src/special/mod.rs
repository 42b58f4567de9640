//! Zeta, its derivatives, the archimedean factor and friends.
//!
//! Everything here runs in hardware double precision. The zeta routines use
//! Euler-Maclaurin summation throughout the strip `-1 <= Re s <= 4`,
//! `|Im s| <= 1e4`; the gamma-type functions use Stirling series after a
//! recurrence shift to `Re z >= 10`.

mod gamma;
mod zeta;

pub use gamma::{chi, chi_log_derivative, digamma, ln_gamma};
pub use zeta::{hardy_theta, hardy_z, odd_zeta_table, zeta, zeta_derivative, zeta_jet};

use crate::error::{Error, Result};

/// Complex arguments and values. Operations return an error instead of
/// letting a NaN or infinity escape.
pub type ComplexValue = num_complex::Complex64;

/// Largest `|Im s|` accepted by the zeta routines.
pub const MAX_HEIGHT: f64 = 1.0e4;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Requested accuracy of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionSpec {
    pub target_abs_error: f64,
    pub max_series_terms: usize,
}

impl PrecisionSpec {
    pub const FLOOR: f64 = 1.0e-14;
    pub const MAX_TERMS_LIMIT: usize = 1_000_000;

    pub fn new(target_abs_error: f64, max_series_terms: usize) -> Result<Self> {
        if !(target_abs_error >= Self::FLOOR) || !target_abs_error.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "target_abs_error {target_abs_error:e} below the double-precision floor {:e}",
                Self::FLOOR
            )));
        }
        if max_series_terms == 0 || max_series_terms > Self::MAX_TERMS_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "max_series_terms {max_series_terms} outside 1..={}",
                Self::MAX_TERMS_LIMIT
            )));
        }
        Ok(Self {
            target_abs_error,
            max_series_terms,
        })
    }
}

impl Default for PrecisionSpec {
    fn default() -> Self {
        Self {
            target_abs_error: 1.0e-12,
            max_series_terms: 200_000,
        }
    }
}

/// The constants entering the zero-sum identity `sum m/|rho|^2 = 2 + gamma - log 4pi`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConstantsBundle {
    pub euler_gamma: f64,
    pub log_4pi: f64,
    pub nbbd_constant: f64,
}

impl ConstantsBundle {
    pub fn new() -> Self {
        let log_4pi = (4.0 * std::f64::consts::PI).ln();
        Self {
            euler_gamma: EULER_GAMMA,
            log_4pi,
            nbbd_constant: 2.0 + EULER_GAMMA - log_4pi,
        }
    }
}

impl Default for ConstantsBundle {
    fn default() -> Self {
        Self::new()
    }
}

/// A function that plays the role of zeta in the criterion: the true zeta
/// function or a counterfactual model with a modified zero set.
pub trait ZetaLike: Sync {
    fn value(&self, s: ComplexValue) -> Result<ComplexValue>;
    fn derivative(&self, s: ComplexValue) -> Result<ComplexValue>;
    /// `f(conj s) = conj f(s)`; lets callers integrate even integrands on
    /// half the line.
    fn is_real_symmetric(&self) -> bool {
        true
    }
}

/// The Riemann zeta function at a fixed precision.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrueZeta {
    pub prec: PrecisionSpec,
}

impl ZetaLike for TrueZeta {
    fn value(&self, s: ComplexValue) -> Result<ComplexValue> {
        zeta(s, &self.prec)
    }

    fn derivative(&self, s: ComplexValue) -> Result<ComplexValue> {
        zeta_derivative(s, 1, &self.prec)
    }
}

pub(crate) fn ensure_finite(z: ComplexValue, what: &'static str) -> Result<ComplexValue> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}
