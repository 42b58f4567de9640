//! A zeta-like function with one engineered zero quadruplet off the line.
//!
//! `M(s) = zeta(s) S(s)` with `S = Q_off / Q_on`, where `Q_on` vanishes at
//! two genuine zero pairs `1/2 +- i gamma_a`, `1/2 +- i gamma_b` and `Q_off`
//! at `sigma0 +- i gamma0`, `1 - sigma0 +- i gamma0`. Both quartics are
//! invariant under `s -> 1 - s` and conjugation, so `M` keeps the functional
//! equation and real symmetry of zeta.

mod fit;
mod integrals;

pub use fit::{fit_theorem_constants, geometric_grid, FitResult};
pub use integrals::{
    counterfactual_mollifier, full_counterfactual_batch, full_counterfactual_integral, main_term_batch,
    main_term_integral, CriterionValue, MainTermValue,
};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{zeta, zeta_jet, ComplexValue, PrecisionSpec, ZetaLike};
use crate::zeros::{refine_ordinate, ZeroTable};

/// Radius of the circle used to evaluate `M` near a removed zero.
pub const CAUCHY_RADIUS: f64 = 0.01;
const CAUCHY_POINTS: usize = 64;

/// Which engineered zeros enter the off-line residue sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sigma2Mode {
    /// `sigma0 +- i gamma0` only.
    Pair,
    /// All four zeros `sigma0 +- i gamma0`, `1 - sigma0 +- i gamma0`.
    #[default]
    Quadruplet,
}

impl std::str::FromStr for Sigma2Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair" => Ok(Self::Pair),
            "quadruplet" => Ok(Self::Quadruplet),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ModelSpec {
    pub sigma0: f64,
    pub gamma0: f64,
    /// Ordinates of the two genuine zeros removed from zeta.
    pub removed: [f64; 2],
}

impl ModelSpec {
    pub fn new(sigma0: f64, gamma0: f64, removed: [f64; 2]) -> Result<Self> {
        if !(sigma0 > 0.5 && sigma0 < 1.0) {
            return Err(Error::InvalidModel(format!("sigma0 = {sigma0} not in (1/2, 1)")));
        }
        if !(gamma0 > 0.0) || !gamma0.is_finite() {
            return Err(Error::InvalidModel(format!("gamma0 = {gamma0} must be positive")));
        }
        if !(removed[0] > 0.0 && removed[1] > 0.0) || removed[0] == removed[1] {
            return Err(Error::InvalidModel(format!(
                "removed ordinates {removed:?} must be distinct and positive"
            )));
        }
        Ok(Self {
            sigma0,
            gamma0,
            removed,
        })
    }

    /// `rho0 = sigma0 + i gamma0`.
    pub fn rho0(&self) -> ComplexValue {
        ComplexValue::new(self.sigma0, self.gamma0)
    }

    /// The four engineered zeros: `rho0, conj rho0, 1 - conj rho0, 1 - rho0`.
    pub fn quadruplet(&self) -> [ComplexValue; 4] {
        let r = self.rho0();
        [r, r.conj(), 1.0 - r.conj(), 1.0 - r]
    }
}

impl Default for ModelSpec {
    /// `sigma0 = 3/4`, `gamma0 = 10`, first two zeros removed.
    fn default() -> Self {
        Self {
            sigma0: 0.75,
            gamma0: 10.0,
            removed: [14.134_725_141_734_693, 21.022_039_638_771_555],
        }
    }
}

/// The rational factor `S = Q_off / Q_on`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapFactor {
    off: Vec<ComplexValue>,
    on: Vec<ComplexValue>,
}

fn poly_and_derivative(roots: &[ComplexValue], s: ComplexValue) -> (ComplexValue, ComplexValue) {
    let mut value = ComplexValue::new(1.0, 0.0);
    let mut derivative = ComplexValue::new(0.0, 0.0);
    for &r in roots {
        derivative = derivative * (s - r) + value;
        value *= s - r;
    }
    (value, derivative)
}

impl SwapFactor {
    pub fn new(model: &ModelSpec) -> Self {
        let on = model
            .removed
            .iter()
            .flat_map(|&g| [ComplexValue::new(0.5, g), ComplexValue::new(0.5, -g)])
            .collect();
        Self {
            off: model.quadruplet().to_vec(),
            on,
        }
    }

    /// `S = 1`.
    pub fn identity() -> Self {
        Self {
            off: Vec::new(),
            on: Vec::new(),
        }
    }

    pub fn poles(&self) -> &[ComplexValue] {
        &self.on
    }

    fn check_pole(&self, s: ComplexValue) -> Result<()> {
        if let Some(&p) = self.on.iter().find(|&&p| (s - p).norm() < 1e-8) {
            return Err(Error::Pole {
                function: "swap_factor",
                at: p,
            });
        }
        Ok(())
    }

    pub fn value(&self, s: ComplexValue) -> Result<ComplexValue> {
        self.check_pole(s)?;
        let (qo, _) = poly_and_derivative(&self.off, s);
        let (qn, _) = poly_and_derivative(&self.on, s);
        Ok(qo / qn)
    }

    /// `(S, S')` at `s`.
    pub fn jet(&self, s: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        self.check_pole(s)?;
        let (qo, dqo) = poly_and_derivative(&self.off, s);
        let (qn, dqn) = poly_and_derivative(&self.on, s);
        Ok((qo / qn, (dqo * qn - qo * dqn) / (qn * qn)))
    }
}

/// `S(s)` for the given model.
pub fn swap_factor(s: ComplexValue, model: &ModelSpec) -> Result<ComplexValue> {
    SwapFactor::new(model).value(s)
}

/// An on-line zero of `M` with the derivative `M'(rho) = zeta'(rho) S(rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelZero {
    pub ordinate: f64,
    pub derivative: ComplexValue,
}

/// `M = zeta S` together with its zero data.
#[derive(Debug, Clone)]
pub struct CounterfactualZeta {
    model: Option<ModelSpec>,
    swap: SwapFactor,
    on_line: Vec<ModelZero>,
    prec: PrecisionSpec,
}

impl CounterfactualZeta {
    /// Builds `M` from a model and a zero table that contains the removed
    /// ordinates. The removed ordinates are re-refined so that the
    /// cancellation in `zeta S` is exact to working precision.
    pub fn new(model: ModelSpec, table: &ZeroTable) -> Result<Self> {
        let prec = PrecisionSpec::default();
        let mut removed = [0.0; 2];
        for (k, &g) in model.removed.iter().enumerate() {
            let idx = table
                .entries()
                .iter()
                .position(|e| (e.ordinate - g).abs() < 1e-6)
                .ok_or_else(|| Error::InvalidModel(format!("removed ordinate {g} not in the zero table")))?;
            removed[k] = refine_ordinate(table.entries()[idx].ordinate, &prec)?;
        }
        if let Some(e) = table
            .entries()
            .iter()
            .find(|e| (e.ordinate - model.gamma0).abs() < 1e-6)
        {
            return Err(Error::InvalidModel(format!(
                "gamma0 = {} collides with the zero at {}",
                model.gamma0, e.ordinate
            )));
        }
        let model = ModelSpec { removed, ..model };
        let swap = SwapFactor::new(&model);
        let on_line = table
            .entries()
            .iter()
            .filter(|e| removed.iter().all(|&g| (e.ordinate - g).abs() >= 1e-6))
            .map(|e| {
                Ok(ModelZero {
                    ordinate: e.ordinate,
                    derivative: e.zeta_prime * swap.value(e.rho())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model: Some(model),
            swap,
            on_line,
            prec,
        })
    }

    /// `M = zeta` with the table's zeros.
    pub fn unmodified(table: &ZeroTable) -> Self {
        Self {
            model: None,
            swap: SwapFactor::identity(),
            on_line: table
                .entries()
                .iter()
                .map(|e| ModelZero {
                    ordinate: e.ordinate,
                    derivative: e.zeta_prime,
                })
                .collect(),
            prec: PrecisionSpec::default(),
        }
    }

    pub fn model(&self) -> Option<&ModelSpec> {
        self.model.as_ref()
    }

    pub fn swap(&self) -> &SwapFactor {
        &self.swap
    }

    /// On-line zeros with positive ordinate, ascending.
    pub fn on_line_zeros(&self) -> &[ModelZero] {
        &self.on_line
    }

    /// Largest on-line ordinate.
    pub fn height(&self) -> f64 {
        self.on_line.last().map_or(0.0, |z| z.ordinate)
    }

    /// The same function with the on-line zero list cut at height `t`.
    pub fn truncated(&self, t: f64) -> Self {
        let mut out = self.clone();
        out.on_line.retain(|z| z.ordinate <= t);
        out
    }

    /// Engineered zeros and `M'` there (`M' = zeta S'` since `S` vanishes).
    pub fn off_line_zeros(&self, mode: Sigma2Mode) -> Result<Vec<(ComplexValue, ComplexValue)>> {
        let model = self
            .model
            .as_ref()
            .ok_or_else(|| Error::InvalidModel("unmodified zeta has no engineered zeros".into()))?;
        let count = match mode {
            Sigma2Mode::Pair => 2,
            Sigma2Mode::Quadruplet => 4,
        };
        model.quadruplet()[..count]
            .iter()
            .map(|&rho| {
                let (_, ds) = self.swap.jet(rho)?;
                Ok((rho, zeta(rho, &self.prec)? * ds))
            })
            .collect()
    }

    fn nearby_pole(&self, s: ComplexValue) -> Option<ComplexValue> {
        self.swap
            .poles()
            .iter()
            .copied()
            .find(|&p| (s - p).norm() < 0.5 * CAUCHY_RADIUS)
    }

    /// `(M, M')` by Cauchy's formula on a circle around a removed zero,
    /// where `M` is holomorphic but `zeta S` is a 0/0 quotient.
    fn cauchy(&self, center: ComplexValue, s: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        let mut value = ComplexValue::new(0.0, 0.0);
        let mut derivative = ComplexValue::new(0.0, 0.0);
        for k in 0..CAUCHY_POINTS {
            let e = ComplexValue::from_polar(CAUCHY_RADIUS, 2.0 * PI * k as f64 / CAUCHY_POINTS as f64);
            let z = center + e;
            let m = zeta(z, &self.prec)? * self.swap.value(z)?;
            let w = m * e / (z - s);
            value += w;
            derivative += w / (z - s);
        }
        let k = CAUCHY_POINTS as f64;
        Ok((value / k, derivative / k))
    }

    /// `(M(s), M'(s))`.
    pub fn jet(&self, s: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        if let Some(center) = self.nearby_pole(s) {
            return self.cauchy(center, s);
        }
        let [z, dz, _] = zeta_jet(s, 1, &self.prec)?;
        let (sv, ds) = self.swap.jet(s)?;
        Ok((z * sv, dz * sv + z * ds))
    }
}

impl ZetaLike for CounterfactualZeta {
    fn value(&self, s: ComplexValue) -> Result<ComplexValue> {
        if let Some(center) = self.nearby_pole(s) {
            return Ok(self.cauchy(center, s)?.0);
        }
        Ok(zeta(s, &self.prec)? * self.swap.value(s)?)
    }

    fn derivative(&self, s: ComplexValue) -> Result<ComplexValue> {
        Ok(self.jet(s)?.1)
    }
}
