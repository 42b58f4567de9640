//! The weighted Hardy-space geometry on the critical line.
//!
//! Inner products are `<f, g> = (1/2pi) int f(1/2+it) conj g(1/2+it) dt / (1/4 + t^2)`.
//! For the dilation family `e_n(s) = zeta(s) n^(-s)` all inner products are
//! real because the imaginary parts of the integrands are odd in t.

mod quadrature;

pub use quadrature::{
    integrate, weight, weight_tail_mass, weighted_integral, weighted_integral_vec, QuadratureSpec, Symmetry,
    WeightedIntegral, DEFAULT_T_CAP,
};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::mollifier::DirichletPolynomial;
use crate::special::{ComplexValue, TrueZeta, ZetaLike};

/// Largest dilation family handled by [`build_gram`].
pub const MAX_GRAM_SIZE: usize = 64;

/// Default ridge parameter (scaled by `trace(G) / N`).
pub const DEFAULT_RIDGE: f64 = 1e-10;

/// `(1/2pi) int |1 - f(1/2+it) A(1/2+it)|^2 dt / (1/4 + t^2)`.
pub fn criterion_integral(
    poly: &DirichletPolynomial,
    zeta_like: &dyn ZetaLike,
    spec: &QuadratureSpec,
) -> Result<WeightedIntegral> {
    let line = poly.on_line(0.5);
    let symmetry = if poly.is_real() && zeta_like.is_real_symmetric() {
        Symmetry::Even
    } else {
        Symmetry::General
    };
    weighted_integral(
        |t| {
            let z = zeta_like.value(ComplexValue::new(0.5, t))?;
            Ok((ComplexValue::new(1.0, 0.0) - z * line.eval(t)).norm_sqr())
        },
        symmetry,
        spec,
    )
}

/// Gram matrix and right-hand side of the dilation family `e_1, ..., e_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    pub size: usize,
    /// `G[m][n] = <e_m, e_n>`, row-major, symmetric.
    pub matrix: Vec<f64>,
    /// `b[n] = <1, e_n>`.
    pub rhs: Vec<f64>,
    /// `<1, 1>` from the same quadrature (exactly 1 in exact arithmetic).
    pub norm_one: f64,
    /// Largest reported tail bound over all entries.
    pub tail_bound: f64,
}

impl GramSystem {
    pub fn entry(&self, m: usize, n: usize) -> f64 {
        self.matrix[(m - 1) * self.size + (n - 1)]
    }

    fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.size, self.size, &self.matrix)
    }

    pub fn trace(&self) -> f64 {
        (1..=self.size).map(|k| self.entry(k, k)).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.as_matrix())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |G - G^T|`; zero by construction.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in 1..=self.size {
            for n in 1..=self.size {
                worst = worst.max((self.entry(m, n) - self.entry(n, m)).abs());
            }
        }
        worst
    }

    /// Checks symmetry and `lambda_min >= -1e-8 trace / N`.
    pub fn validate(&self) -> Result<()> {
        if self.asymmetry() > 1e-10 {
            return Err(Error::Solver("Gram matrix is not symmetric".into()));
        }
        let floor = -1e-8 * self.trace() / self.size as f64;
        let lambda = self.min_eigenvalue();
        if lambda < floor {
            return Err(Error::Solver(format!(
                "Gram matrix has eigenvalue {lambda:e} below {floor:e}"
            )));
        }
        Ok(())
    }

    /// The system of `e_1, ..., e_k` (leading principal block).
    pub fn leading(&self, k: usize) -> Result<GramSystem> {
        if k == 0 || k > self.size {
            return Err(Error::InvalidParameter(format!(
                "leading block {k} outside 1..={}",
                self.size
            )));
        }
        let matrix = (0..k)
            .flat_map(|m| self.matrix[m * self.size..m * self.size + k].iter().cloned())
            .collect();
        Ok(GramSystem {
            size: k,
            matrix,
            rhs: self.rhs[..k].to_vec(),
            norm_one: self.norm_one,
            tail_bound: self.tail_bound,
        })
    }

    /// `||1 - sum a_n e_n||^2` for real coefficients.
    pub fn distance_for(&self, coefficients: &[f64]) -> Result<f64> {
        if coefficients.len() != self.size {
            return Err(Error::InvalidLength(coefficients.len()));
        }
        let a = DVector::from_column_slice(coefficients);
        let b = DVector::from_column_slice(&self.rhs);
        let g = self.as_matrix();
        Ok(self.norm_one - 2.0 * a.dot(&b) + a.dot(&(&g * &a)))
    }
}

/// Builds the Gram system of `e_1, ..., e_N` on the critical line.
pub fn build_gram(n: usize, spec: &QuadratureSpec) -> Result<GramSystem> {
    build_gram_with(n, &TrueZeta::default(), spec)
}

/// Same as [`build_gram`] for an arbitrary real-symmetric zeta-like function.
pub fn build_gram_with(n: usize, zeta_like: &dyn ZetaLike, spec: &QuadratureSpec) -> Result<GramSystem> {
    if n == 0 || n > MAX_GRAM_SIZE {
        return Err(Error::InvalidParameter(format!(
            "Gram size {n} outside 1..={MAX_GRAM_SIZE}"
        )));
    }
    if !zeta_like.is_real_symmetric() {
        return Err(Error::InvalidParameter(
            "Gram assembly needs a real-symmetric function".into(),
        ));
    }
    let logs: Vec<f64> = (1..=n).map(|k| (k as f64).ln()).collect();
    let scale: Vec<f64> = (1..=n).map(|k| 1.0 / (k as f64).sqrt()).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|m| (m..n).map(move |k| (m, k))).collect();
    // components: upper triangle, then b, then <1,1>
    let dim = pairs.len() + n + 1;
    let values = weighted_integral_vec(
        |t, out: &mut [f64]| {
            let z = zeta_like.value(ComplexValue::new(0.5, t))?;
            let z2 = z.norm_sqr();
            for (slot, &(m, k)) in out.iter_mut().zip(&pairs) {
                *slot = z2 * scale[m] * scale[k] * ((logs[k] - logs[m]) * t).cos();
            }
            let base = pairs.len();
            for k in 0..n {
                // Re(zeta(s) k^{-s}) with s = 1/2 + it
                let (sn, cs) = (logs[k] * t).sin_cos();
                out[base + k] = scale[k] * (z.re * cs + z.im * sn);
            }
            out[dim - 1] = 1.0;
            Ok(())
        },
        dim,
        Symmetry::Even,
        spec,
    )?;
    let mut matrix = vec![0.0; n * n];
    for (r, &(m, k)) in values.iter().zip(&pairs) {
        matrix[m * n + k] = r.value;
        matrix[k * n + m] = r.value;
    }
    let base = pairs.len();
    Ok(GramSystem {
        size: n,
        matrix,
        rhs: values[base..base + n].iter().map(|r| r.value).collect(),
        norm_one: values[dim - 1].value,
        tail_bound: values.iter().map(|r| r.tail_bound).fold(0.0, f64::max),
    })
}

/// Optimal coefficients and the squared distance they attain.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DistanceResult {
    pub n: usize,
    /// `max(d2_raw, 0)`.
    pub d2: f64,
    pub d2_raw: f64,
    pub coefficients: Vec<f64>,
    /// `||G a - b||` for the unregularized matrix.
    pub residual: f64,
}

/// Solves `G a = b` with the default ridge.
pub fn solve_dn2(gram: &GramSystem) -> Result<DistanceResult> {
    solve_dn2_with_ridge(gram, DEFAULT_RIDGE)
}

/// Solves `(G + lambda trace(G)/N I) a = b` by Cholesky and evaluates
/// `d^2 = <1,1> - 2 a.b + a.G a` with the unregularized `G`.
pub fn solve_dn2_with_ridge(gram: &GramSystem, lambda: f64) -> Result<DistanceResult> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("ridge {lambda} must be >= 0")));
    }
    gram.validate()?;
    let n = gram.size;
    let g = gram.as_matrix();
    let b = DVector::from_column_slice(&gram.rhs);
    let shift = lambda * gram.trace() / n as f64;
    let regularized = &g + DMatrix::identity(n, n) * shift;
    let chol = regularized
        .cholesky()
        .ok_or_else(|| Error::Solver("Cholesky factorization failed".into()))?;
    let a = chol.solve(&b);
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite solution".into()));
    }
    let residual = (&g * &a - &b).norm();
    let d2_raw = gram.norm_one - 2.0 * a.dot(&b) + a.dot(&(&g * &a));
    Ok(DistanceResult {
        n,
        d2: d2_raw.max(0.0),
        d2_raw,
        coefficients: a.iter().cloned().collect(),
        residual,
    })
}
