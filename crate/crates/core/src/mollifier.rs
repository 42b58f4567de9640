//! Moebius values and Dirichlet polynomials `A_N(s) = sum a_n n^(-s)`,
//! including the smoothed mollifier
//! `V_N(s) = sum_{n <= N} (1 - log n / log N) mu(n) n^(-s)`.

use crate::error::{Error, Result};
use crate::special::ComplexValue;

/// Largest sieve length accepted by [`moebius_sieve`].
pub const MOEBIUS_LIMIT: u64 = 100_000_000;

/// `mu(1), ..., mu(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoebiusTable {
    // index 0 is unused and holds 0
    values: Vec<i8>,
}

impl MoebiusTable {
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `mu(n)` for `1 <= n <= N`.
    pub fn get(&self, n: usize) -> i8 {
        assert!(n >= 1 && n <= self.len(), "n = {n} outside 1..={}", self.len());
        self.values[n]
    }

    /// Values `mu(1), ..., mu(N)` in order.
    pub fn values(&self) -> &[i8] {
        &self.values[1..]
    }

    /// Mertens function `M(x) = sum_{n <= x} mu(n)`.
    pub fn mertens(&self, x: usize) -> i64 {
        self.values[1..=x.min(self.len())]
            .iter()
            .map(|&v| v as i64)
            .sum()
    }
}

/// Linear sieve for `mu(n)`, `n <= N`.
pub fn moebius_sieve(n: u64) -> Result<MoebiusTable> {
    if n == 0 || n > MOEBIUS_LIMIT {
        return Err(Error::Capacity {
            requested: n,
            limit: MOEBIUS_LIMIT,
        });
    }
    let n = n as usize;
    let mut mu = vec![0i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    mu[1] = 1;
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let m = i * p;
            if m > n {
                break;
            }
            composite[m] = true;
            if i % p == 0 {
                mu[m] = 0;
                break;
            }
            mu[m] = -mu[i];
        }
    }
    Ok(MoebiusTable { values: mu })
}

/// Coefficients `a_1, ..., a_N` of `A_N(s) = sum a_n n^(-s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPolynomial {
    coefficients: Vec<ComplexValue>,
}

impl DirichletPolynomial {
    pub fn new(coefficients: Vec<ComplexValue>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter(
                "a Dirichlet polynomial needs at least one coefficient".into(),
            ));
        }
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite("Dirichlet polynomial coefficients"));
        }
        Ok(Self { coefficients })
    }

    pub fn from_real(coefficients: &[f64]) -> Result<Self> {
        Self::new(
            coefficients
                .iter()
                .map(|&a| ComplexValue::new(a, 0.0))
                .collect(),
        )
    }

    pub fn zero(len: usize) -> Result<Self> {
        Self::new(vec![ComplexValue::new(0.0, 0.0); len])
    }

    /// Length N.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `a_1, ..., a_N` (index 0 holds `a_1`).
    pub fn coefficients(&self) -> &[ComplexValue] {
        &self.coefficients
    }

    /// `a_n` for `1 <= n <= N`.
    pub fn coefficient(&self, n: usize) -> ComplexValue {
        self.coefficients[n - 1]
    }

    pub fn is_real(&self) -> bool {
        self.coefficients.iter().all(|c| c.im == 0.0)
    }

    /// `alpha * self + beta * other`, padded to the longer length.
    pub fn linear_combination(
        &self,
        alpha: ComplexValue,
        other: &DirichletPolynomial,
        beta: ComplexValue,
    ) -> DirichletPolynomial {
        let len = self.len().max(other.len());
        let zero = ComplexValue::new(0.0, 0.0);
        let coefficients = (0..len)
            .map(|i| {
                alpha * self.coefficients.get(i).copied().unwrap_or(zero)
                    + beta * other.coefficients.get(i).copied().unwrap_or(zero)
            })
            .collect();
        DirichletPolynomial { coefficients }
    }

    /// Evaluate `sum a_n n^(-s)`.
    pub fn eval(&self, s: ComplexValue) -> ComplexValue {
        eval_terms(self.coefficients.iter().enumerate(), s)
    }

    /// Same sum accumulated from `n = N` down to `n = 1`.
    pub fn eval_reversed(&self, s: ComplexValue) -> ComplexValue {
        eval_terms(self.coefficients.iter().enumerate().rev(), s)
    }

    /// Pre-scale the nonzero coefficients for repeated evaluation on the
    /// vertical line `Re s = sigma`.
    pub fn on_line(&self, sigma: f64) -> LineEvaluator {
        let terms = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
            .map(|(i, &a)| {
                let ln_n = ((i + 1) as f64).ln();
                LineTerm {
                    scaled: a * (-sigma * ln_n).exp(),
                    ln_n,
                }
            })
            .collect();
        LineEvaluator { sigma, terms }
    }
}

fn eval_terms<'a>(
    terms: impl Iterator<Item = (usize, &'a ComplexValue)>,
    s: ComplexValue,
) -> ComplexValue {
    let mut acc = ComplexValue::new(0.0, 0.0);
    for (i, &a) in terms {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let ln_n = ((i + 1) as f64).ln();
        acc += a * (-s * ln_n).exp();
    }
    acc
}

/// `eval_dirichlet` in function form.
pub fn eval_dirichlet(poly: &DirichletPolynomial, s: ComplexValue) -> ComplexValue {
    poly.eval(s)
}

#[derive(Debug, Clone, Copy)]
struct LineTerm {
    scaled: ComplexValue,
    ln_n: f64,
}

/// A Dirichlet polynomial restricted to `Re s = sigma`, evaluated as a
/// function of `t = Im s`.
#[derive(Debug, Clone)]
pub struct LineEvaluator {
    sigma: f64,
    terms: Vec<LineTerm>,
}

impl LineEvaluator {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn eval(&self, t: f64) -> ComplexValue {
        let mut re = 0.0;
        let mut im = 0.0;
        for term in &self.terms {
            let (sn, cs) = (t * term.ln_n).sin_cos();
            // scaled * (cs - i sn)
            re += term.scaled.re * cs + term.scaled.im * sn;
            im += term.scaled.im * cs - term.scaled.re * sn;
        }
        ComplexValue::new(re, im)
    }
}

/// `V_N` with `a_n = (1 - log n / log N) mu(n)`.
pub fn build_vn(n: usize) -> Result<DirichletPolynomial> {
    if n < 2 {
        return Err(Error::InvalidLength(n));
    }
    let mu = moebius_sieve(n as u64)?;
    Ok(build_vn_with(&mu, n))
}

/// `V_N` from an existing table with at least N entries.
pub fn build_vn_with(mu: &MoebiusTable, n: usize) -> DirichletPolynomial {
    assert!(n >= 2 && n <= mu.len());
    let ln_big = (n as f64).ln();
    let coefficients = (1..=n)
        .map(|k| {
            let weight = (ln_big - (k as f64).ln()) / ln_big;
            ComplexValue::new(weight * mu.get(k) as f64, 0.0)
        })
        .collect();
    DirichletPolynomial { coefficients }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    /// mu(n) by trial division.
    fn mu_oracle(mut n: usize) -> i8 {
        let mut sign = 1i8;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                sign = -sign;
            }
            p += 1;
        }
        if n > 1 {
            sign = -sign;
        }
        sign
    }

    #[test]
    fn small_tables() {
        let mu = moebius_sieve(6).unwrap();
        assert_eq!(mu.values(), &[1, -1, -1, 0, -1, 1]);
        assert_eq!(moebius_sieve(12).unwrap().get(12), 0);
    }

    #[test]
    fn sieve_matches_trial_division() {
        let mu = moebius_sieve(100_000).unwrap();
        for n in 1..=100_000 {
            assert_eq!(mu.get(n), mu_oracle(n), "n = {n}");
        }
    }

    #[test]
    fn mertens_pin() {
        let brute: i64 = (1..=10_000).map(|n| mu_oracle(n) as i64).sum();
        assert_eq!(brute, -23);
        assert_eq!(moebius_sieve(10_000).unwrap().mertens(10_000), -23);
    }

    #[test]
    fn capacity() {
        assert!(matches!(moebius_sieve(0), Err(Error::Capacity { .. })));
        assert!(matches!(
            moebius_sieve(MOEBIUS_LIMIT + 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn vn_coefficients() {
        assert_eq!(build_vn(2).unwrap().coefficients(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let v3 = build_vn(3).unwrap();
        let a2 = -(1.0 - 2f64.ln() / 3f64.ln());
        assert!((v3.coefficient(2).re - a2).abs() < 1e-15);
        assert!((v3.coefficient(2).re + 0.369_07).abs() < 1e-5);
        assert_eq!(v3.coefficient(3), c(0.0, 0.0));
        let v4 = build_vn(4).unwrap();
        assert!((v4.coefficient(3).re + 0.207_52).abs() < 1e-5);
        assert_eq!(v4.coefficient(4), c(0.0, 0.0));
        assert!(matches!(build_vn(1), Err(Error::InvalidLength(1))));
        assert!(matches!(build_vn(0), Err(Error::InvalidLength(0))));
    }

    #[test]
    fn vn_endpoints() {
        let mu = moebius_sieve(500).unwrap();
        for n in 2..=500 {
            let v = build_vn_with(&mu, n);
            assert_eq!(v.coefficient(1), c(1.0, 0.0));
            assert_eq!(v.coefficient(n).re, 0.0);
        }
    }

    #[test]
    fn evaluation_examples() {
        let v2 = build_vn(2).unwrap();
        for s in [c(0.5, 0.0), c(0.3, 17.0), c(2.0, -4.0)] {
            assert!((v2.eval(s) - 1.0).norm() < 1e-15);
        }
        let v3 = build_vn(3).unwrap();
        let want = 1.0 - (1.0 - 2f64.ln() / 3f64.ln()) / 2f64.sqrt();
        let got = v3.eval(c(0.5, 0.0));
        assert!((got.re - want).abs() < 1e-14 && got.im.abs() < 1e-15);
        // the quoted five-digit reference value 0.73901 is off in the last place
        assert!((got.re - 0.739_01).abs() < 1e-4);
        let zero = DirichletPolynomial::zero(7).unwrap();
        assert_eq!(zero.eval(c(0.5, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn summation_order_stability() {
        let v = build_vn(10_000).unwrap();
        let line = v.on_line(0.5);
        for t in [1.0, 14.13, 123.4, 999.9] {
            let s = c(0.5, t);
            let fwd = v.eval(s);
            let rev = v.eval_reversed(s);
            assert!((fwd - rev).norm() <= 1e-9 * fwd.norm());
            assert!((line.eval(t) - fwd).norm() <= 1e-9 * fwd.norm());
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(DirichletPolynomial::from_real(&[1.0, f64::NAN]).is_err());
        assert!(DirichletPolynomial::new(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn evaluation_is_linear(
            a in proptest::collection::vec(-2.0f64..2.0, 1..40),
            b in proptest::collection::vec(-2.0f64..2.0, 1..40),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
            sigma in 0.0f64..2.0,
            t in -200.0f64..200.0,
        ) {
            let p = DirichletPolynomial::from_real(&a).unwrap();
            let q = DirichletPolynomial::from_real(&b).unwrap();
            let s = c(sigma, t);
            let combo = p.linear_combination(c(alpha, 0.0), &q, c(beta, 0.0));
            let lhs = combo.eval(s);
            let rhs = alpha * p.eval(s) + beta * q.eval(s);
            let scale = (alpha.abs() * p.eval(s).norm() + beta.abs() * q.eval(s).norm()).max(1.0);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }
    }
}
