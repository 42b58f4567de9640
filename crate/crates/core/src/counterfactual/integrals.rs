use num_complex::Complex64;

use super::{CounterfactualZeta, Sigma2Mode};
use crate::criterion::{weighted_integral_vec, QuadratureSpec, Symmetry};
use crate::error::{Error, Result};
use crate::residues::{residue_closed_form, trivial_zero_terms, COLLISION_DISTANCE};
use crate::special::{ComplexValue, ZetaLike};

/// Largest cutoff used for the full integral.
pub const FULL_T_CAP: f64 = 2000.0;

/// Distance to an on-line zero below which the full integrand is
/// interpolated from neighbouring points.
const INTERPOLATION_RADIUS: f64 = 1e-3;
const INTERPOLATION_STEP: f64 = 2e-3;

/// `(1/log N) sum_n R_N(-2n, s) / S(-2n)`: the trivial-zero residues of `M`.
fn trivial_term(m: &CounterfactualZeta, n: usize, s: ComplexValue) -> Result<ComplexValue> {
    let terms = trivial_zero_terms(s, 1.0 / n as f64)?;
    let mut acc = ComplexValue::new(0.0, 0.0);
    for (k, term) in terms.into_iter().enumerate() {
        let at = ComplexValue::new(-2.0 * (k + 1) as f64, 0.0);
        acc += term / m.swap().value(at)?;
    }
    Ok(acc / (n as f64).ln())
}

/// The mollifier built from the zero decomposition of `M`:
///
///   A_N(s) = (1/M)(1 - M'/M / log N) + (1/log N) sum_rho R_N(rho, s) + trivial terms,
///
/// with the sum over the on-line zeros up to the table height and all four
/// engineered zeros. For the unmodified function this is the right-hand
/// side of the decomposition of `V_N`.
pub fn counterfactual_mollifier(n: usize, s: ComplexValue, m: &CounterfactualZeta) -> Result<ComplexValue> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N = {n} must be >= 2")));
    }
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < Re s < 1, got {s}")));
    }
    let ln_n = (n as f64).ln();
    let (mv, dm) = m.jet(s)?;
    let mut sum = ComplexValue::new(0.0, 0.0);
    for z in m.on_line_zeros() {
        let rho = ComplexValue::new(0.5, z.ordinate);
        for (r, d) in [(rho, z.derivative), (rho.conj(), z.derivative.conj())] {
            let distance = (r - s).norm();
            if distance < COLLISION_DISTANCE {
                return Err(Error::NearCollision { s, rho: r, distance });
            }
            sum += residue_closed_form(r, d, s, n);
        }
    }
    if m.model().is_some() {
        for (r, d) in m.off_line_zeros(Sigma2Mode::Quadruplet)? {
            sum += residue_closed_form(r, d, s, n);
        }
    }
    Ok((1.0 - dm / (mv * ln_n)) / mv + sum / ln_n + trivial_term(m, n, s)?)
}

/// Value of the two-factor off-line term for one `N`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MainTermValue {
    pub n: usize,
    pub value: f64,
    /// Imaginary part of the computed integral.
    pub imaginary: f64,
    pub tail_bound: f64,
    pub quadrature_error: f64,
}

/// `(1/2 pi i) int_(1/2) Sigma2(N, s) Sigma2(N, 1-s) M(s) M(1-s) ds / (s(1-s))`,
/// where `Sigma2` already carries its `1/log N`.
pub fn main_term_integral(
    n: usize,
    m: &CounterfactualZeta,
    spec: &QuadratureSpec,
    mode: Sigma2Mode,
) -> Result<MainTermValue> {
    Ok(main_term_batch(&[n], m, spec, mode)?[0])
}

/// [`main_term_integral`] for several `N` sharing the evaluations of `M`.
pub fn main_term_batch(
    ns: &[usize],
    m: &CounterfactualZeta,
    spec: &QuadratureSpec,
    mode: Sigma2Mode,
) -> Result<Vec<MainTermValue>> {
    if let Some(&bad) = ns.iter().find(|&&n| n < 10) {
        return Err(Error::InvalidParameter(format!("N = {bad} must be >= 10")));
    }
    let zeros = m.off_line_zeros(mode)?;
    let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let sigma2 = |s: ComplexValue, ln_n: f64| {
        let mut acc = ComplexValue::new(0.0, 0.0);
        for &(rho, d) in &zeros {
            let diff = rho - s;
            acc += (diff * ln_n).exp() / (d * diff * diff);
        }
        acc / ln_n
    };
    let values = weighted_integral_vec(
        |t, out: &mut [f64]| {
            let s = ComplexValue::new(0.5, t);
            let r = 1.0 - s;
            let mm = m.value(s)? * m.value(r)?;
            for (k, &ln_n) in logs.iter().enumerate() {
                let v = sigma2(s, ln_n) * sigma2(r, ln_n) * mm;
                out[2 * k] = v.re;
                out[2 * k + 1] = v.im;
            }
            Ok(())
        },
        2 * ns.len(),
        Symmetry::Even,
        spec,
    )?;
    Ok(ns
        .iter()
        .enumerate()
        .map(|(k, &n)| MainTermValue {
            n,
            value: values[2 * k].value,
            imaginary: values[2 * k + 1].value,
            tail_bound: values[2 * k].tail_bound,
            quadrature_error: values[2 * k].quadrature_error,
        })
        .collect())
}

/// A criterion integral for one `N`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CriterionValue {
    pub n: usize,
    pub value: f64,
    pub tail_bound: f64,
    pub quadrature_error: f64,
}

/// `(1/2pi) int |1 - M A_N(1/2+it)|^2 dt / (1/4 + t^2)` with `A_N` the
/// [`counterfactual_mollifier`].
pub fn full_counterfactual_integral(n: usize, m: &CounterfactualZeta, spec: &QuadratureSpec) -> Result<CriterionValue> {
    Ok(full_counterfactual_batch(&[n], m, spec)?[0])
}

/// Evaluates `1 - M A_N` on the line for a batch of `N`, using
///
///   1 - M A_N = (1/log N) (M'/M - M sum_rho R_N(rho, s)) - M (trivial terms).
///
/// For `s = 1/2 + it` and `rho = 1/2 + i gamma` the on-line residues are
/// `-N^(-it) a / (gamma - t)^2` and `-N^(-it) conj(a) / (gamma + t)^2` with
/// `a = N^(i gamma) / M'(rho)`, so the `a` are precomputed per `N`.
struct Defect<'a> {
    m: &'a CounterfactualZeta,
    ns: Vec<usize>,
    logs: Vec<f64>,
    ordinates: Vec<f64>,
    // per N: Re a, Im a
    coeff: Vec<(Vec<f64>, Vec<f64>)>,
    off: Vec<(ComplexValue, ComplexValue)>,
}

impl<'a> Defect<'a> {
    fn new(ns: &[usize], m: &'a CounterfactualZeta) -> Result<Self> {
        let ordinates: Vec<f64> = m.on_line_zeros().iter().map(|z| z.ordinate).collect();
        let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        let coeff = logs
            .iter()
            .map(|&ln_n| {
                m.on_line_zeros()
                    .iter()
                    .map(|z| Complex64::from_polar(1.0, z.ordinate * ln_n) / z.derivative)
                    .map(|a| (a.re, a.im))
                    .unzip()
            })
            .collect();
        let off = if m.model().is_some() {
            m.off_line_zeros(Sigma2Mode::Quadruplet)?
        } else {
            Vec::new()
        };
        Ok(Self {
            m,
            ns: ns.to_vec(),
            logs,
            ordinates,
            coeff,
            off,
        })
    }

    fn near_zero(&self, t: f64) -> bool {
        let t = t.abs();
        let idx = self.ordinates.partition_point(|&g| g < t);
        [idx.checked_sub(1), Some(idx)]
            .into_iter()
            .flatten()
            .filter_map(|i| self.ordinates.get(i))
            .any(|&g| (g - t).abs() < INTERPOLATION_RADIUS)
    }

    fn direct(&self, t: f64, out: &mut [ComplexValue]) -> Result<()> {
        let s = ComplexValue::new(0.5, t);
        let (mv, dm) = self.m.jet(s)?;
        let log_derivative = dm / mv;
        let inv_minus: Vec<f64> = self.ordinates.iter().map(|&g| 1.0 / ((g - t) * (g - t))).collect();
        let inv_plus: Vec<f64> = self.ordinates.iter().map(|&g| 1.0 / ((g + t) * (g + t))).collect();
        for (k, &ln_n) in self.logs.iter().enumerate() {
            let (re, im) = &self.coeff[k];
            let mut acc_re = 0.0;
            let mut acc_im = 0.0;
            for j in 0..re.len() {
                acc_re -= re[j] * (inv_minus[j] + inv_plus[j]);
                acc_im -= im[j] * (inv_minus[j] - inv_plus[j]);
            }
            let mut sum = ComplexValue::from_polar(1.0, -t * ln_n) * ComplexValue::new(acc_re, acc_im);
            for &(rho, d) in &self.off {
                sum += residue_closed_form(rho, d, s, self.ns[k]);
            }
            out[k] = (log_derivative - mv * sum) / ln_n - mv * trivial_term(self.m, self.ns[k], s)?;
        }
        Ok(())
    }

    fn eval(&self, t: f64, out: &mut [ComplexValue]) -> Result<()> {
        if !self.near_zero(t) {
            return self.direct(t, out);
        }
        // cubic Lagrange interpolation from t +- h, t +- 2h
        let h = INTERPOLATION_STEP;
        let mut buf = vec![ComplexValue::new(0.0, 0.0); out.len()];
        out.iter_mut().for_each(|v| *v = ComplexValue::new(0.0, 0.0));
        for (offset, weight) in [(-2.0, -1.0 / 6.0), (-1.0, 2.0 / 3.0), (1.0, 2.0 / 3.0), (2.0, -1.0 / 6.0)] {
            self.direct(t + offset * h, &mut buf)?;
            for (o, b) in out.iter_mut().zip(&buf) {
                *o += weight * b;
            }
        }
        Ok(())
    }
}

/// [`full_counterfactual_integral`] for several `N`. The cutoff is capped at
/// [`FULL_T_CAP`] and at half the zero-table height so that the tail
/// samples stay inside the table.
pub fn full_counterfactual_batch(
    ns: &[usize],
    m: &CounterfactualZeta,
    spec: &QuadratureSpec,
) -> Result<Vec<CriterionValue>> {
    if let Some(&bad) = ns.iter().find(|&&n| n < 10) {
        return Err(Error::InvalidParameter(format!("N = {bad} must be >= 10")));
    }
    let cap = FULL_T_CAP.min(0.5 * m.height());
    if cap < 1.0 {
        return Err(Error::InvalidParameter("zero table too short for the full integral".into()));
    }
    let spec = QuadratureSpec {
        t_max: spec.t_max.min(cap),
        ..*spec
    };
    let defect = Defect::new(ns, m)?;
    let values = weighted_integral_vec(
        |t, out: &mut [f64]| {
            let mut d = vec![ComplexValue::new(0.0, 0.0); out.len()];
            defect.eval(t, &mut d)?;
            for (o, v) in out.iter_mut().zip(&d) {
                *o = v.norm_sqr();
            }
            Ok(())
        },
        ns.len(),
        Symmetry::Even,
        &spec,
    )?;
    Ok(ns
        .iter()
        .zip(values)
        .map(|(&n, v)| CriterionValue {
            n,
            value: v.value,
            tail_bound: v.tail_bound,
            quadrature_error: v.quadrature_error,
        })
        .collect())
}

/// The full integral through the generic criterion path, for one `N`
/// (slow: evaluates the mollifier directly at every node).
#[cfg(test)]
pub(crate) fn full_integral_reference(n: usize, m: &CounterfactualZeta, spec: &QuadratureSpec) -> Result<f64> {
    use crate::criterion::weighted_integral;
    let defect = |t: f64| -> Result<ComplexValue> {
        let s = ComplexValue::new(0.5, t);
        Ok(1.0 - m.value(s)? * counterfactual_mollifier(n, s, m)?)
    };
    weighted_integral(
        |t| match defect(t) {
            Err(Error::NearCollision { .. }) => {
                let h = INTERPOLATION_STEP;
                let v = (defect(t - h)? + defect(t + h)?) * (2.0 / 3.0) - (defect(t - 2.0 * h)? + defect(t + 2.0 * h)?) / 6.0;
                Ok(v.norm_sqr())
            }
            other => Ok(other?.norm_sqr()),
        },
        Symmetry::Even,
        spec,
    )
    .map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterfactual::ModelSpec;
    use crate::mollifier::build_vn;
    use crate::residues::lemma23_reconstruct;
    use crate::zeros::{bundled_zero_table, ZeroTable};

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    fn table(count: usize) -> ZeroTable {
        bundled_zero_table(false).unwrap().first(count)
    }

    #[test]
    fn unmodified_mollifier_is_the_decomposition() {
        let t = table(2000);
        let m = CounterfactualZeta::unmodified(&t);
        for (n, s) in [(50, c(0.45, 3.0)), (100, c(0.6, 17.0)), (30, c(0.5, 40.0))] {
            let a = counterfactual_mollifier(n, s, &m).unwrap();
            let report = lemma23_reconstruct(n, s, &t).unwrap();
            let rhs = c(report.rhs.0, report.rhs.1);
            assert!((a - rhs).norm() < 1e-12 * rhs.norm(), "{a} vs {rhs}");
            assert!((a - build_vn(n).unwrap().eval(s)).norm() < 1e-4 * a.norm());
        }
    }

    #[test]
    fn mollifier_conjugate_symmetry() {
        let m = CounterfactualZeta::new(ModelSpec::default(), &table(200)).unwrap();
        for s in [c(0.5, 5.0), c(0.3, 12.0), c(0.8, 33.3)] {
            let a = counterfactual_mollifier(100, s, &m).unwrap();
            let b = counterfactual_mollifier(100, s.conj(), &m).unwrap();
            assert!((a.conj() - b).norm() < 1e-12 * a.norm());
        }
        assert!(counterfactual_mollifier(1, c(0.5, 5.0), &m).is_err());
        assert!(counterfactual_mollifier(100, c(1.5, 5.0), &m).is_err());
        let g = m.on_line_zeros()[3].ordinate;
        assert!(matches!(
            counterfactual_mollifier(100, c(0.5, g + 1e-4), &m),
            Err(Error::NearCollision { .. })
        ));
    }

    #[test]
    fn defect_matches_direct_evaluation() {
        let m = CounterfactualZeta::new(ModelSpec::default(), &table(300)).unwrap();
        let ns = [20usize, 1000];
        let defect = Defect::new(&ns, &m).unwrap();
        let mut out = vec![c(0.0, 0.0); ns.len()];
        for t in [0.3, 5.0, 10.0, 14.0, 26.5, 77.7, 150.0] {
            defect.eval(t, &mut out).unwrap();
            let s = c(0.5, t);
            for (k, &n) in ns.iter().enumerate() {
                let want = 1.0 - m.value(s).unwrap() * counterfactual_mollifier(n, s, &m).unwrap();
                assert!((out[k] - want).norm() < 1e-9 * (1.0 + want.norm()), "t={t} N={n}");
            }
        }
    }

    #[test]
    fn defect_is_smooth_across_a_zero() {
        let m = CounterfactualZeta::new(ModelSpec::default(), &table(300)).unwrap();
        let defect = Defect::new(&[1000], &m).unwrap();
        let g = m.on_line_zeros()[10].ordinate;
        let mut at = [c(0.0, 0.0)];
        let mut near = [c(0.0, 0.0)];
        defect.eval(g, &mut at).unwrap();
        defect.eval(g + 0.01, &mut near).unwrap();
        assert!(at[0].is_finite());
        assert!((at[0] - near[0]).norm() < 0.05 * (1.0 + near[0].norm()));
    }

    #[test]
    fn main_term_is_real_and_positive() {
        let m = CounterfactualZeta::new(ModelSpec::default(), &table(50)).unwrap();
        let spec = QuadratureSpec::default().with_t_max(200.0).with_tolerance(1e-9);
        for mode in [Sigma2Mode::Pair, Sigma2Mode::Quadruplet] {
            let v = main_term_integral(1000, &m, &spec, mode).unwrap();
            assert!(v.value > 0.0);
            assert!(v.imaginary.abs() < 1e-6 * v.value);
        }
        assert!(main_term_integral(5, &m, &spec, Sigma2Mode::Pair).is_err());
        let unmodified = CounterfactualZeta::unmodified(&table(50));
        assert!(main_term_integral(100, &unmodified, &spec, Sigma2Mode::Pair).is_err());
    }

    #[test]
    fn main_term_batch_matches_single() {
        let m = CounterfactualZeta::new(ModelSpec::default(), &table(50)).unwrap();
        let spec = QuadratureSpec::default().with_t_max(100.0).with_tolerance(1e-9);
        let batch = main_term_batch(&[100, 1000], &m, &spec, Sigma2Mode::Pair).unwrap();
        let single = main_term_integral(1000, &m, &spec, Sigma2Mode::Pair).unwrap();
        assert!((batch[1].value - single.value).abs() < 1e-8 * single.value);
    }

    #[test]
    fn full_integral_matches_reference_path() {
        let m = CounterfactualZeta::new(ModelSpec::default(), &table(100)).unwrap();
        let spec = QuadratureSpec::default().with_t_max(60.0).with_tolerance(1e-8);
        let fast = full_counterfactual_integral(1000, &m, &spec).unwrap();
        let slow = full_integral_reference(1000, &m, &spec).unwrap();
        assert!(fast.value >= 0.0);
        assert!((fast.value - slow).abs() < 1e-4 * slow, "{} vs {slow}", fast.value);
    }

    #[test]
    fn full_integral_cutoff_stability() {
        let m = CounterfactualZeta::new(ModelSpec::default(), &table(1500)).unwrap();
        let at = |t_max: f64| {
            let spec = QuadratureSpec::default().with_t_max(t_max).with_tolerance(1e-7);
            full_counterfactual_integral(1000, &m, &spec).unwrap()
        };
        let (short, long) = (at(250.0), at(500.0));
        assert!((short.value - long.value).abs() < 3.0 * short.tail_bound);
    }
}
