use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{chi, ensure_finite, ln_gamma, ComplexValue, PrecisionSpec, MAX_HEIGHT};
use crate::error::{Error, Result};

/// Number of Bernoulli correction terms in the Euler-Maclaurin tail.
const BERNOULLI_TERMS: usize = 10;

// B_2 .. B_22; the last one only feeds the remainder bound.
const BERNOULLI: [f64; BERNOULLI_TERMS + 1] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
    854_513.0 / 138.0,
];

const LOG_TABLE_LEN: usize = 1 << 15;

struct LogTable {
    ln: Vec<f64>,
    inv_sqrt: Vec<f64>,
}

fn log_table() -> &'static LogTable {
    static TABLE: OnceLock<LogTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let ln = (0..LOG_TABLE_LEN)
            .map(|n| if n == 0 { 0.0 } else { (n as f64).ln() })
            .collect();
        let inv_sqrt = (0..LOG_TABLE_LEN)
            .map(|n| if n == 0 { 0.0 } else { 1.0 / (n as f64).sqrt() })
            .collect();
        LogTable { ln, inv_sqrt }
    })
}

/// Value together with its first two s-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Jet([ComplexValue; 3]);

impl Jet {
    fn variable(s: ComplexValue) -> Self {
        Jet([s, ComplexValue::new(1.0, 0.0), ComplexValue::new(0.0, 0.0)])
    }

    /// `n^(-s)`-type factor `exp(-L s)` with value `v` already computed.
    fn exp_linear(v: ComplexValue, log_base: f64) -> Self {
        Jet([v, -log_base * v, log_base * log_base * v])
    }

    fn mul(self, o: Jet) -> Jet {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Jet([a0 * b0, a1 * b0 + a0 * b1, a2 * b0 + 2.0 * a1 * b1 + a0 * b2])
    }

    fn inv(self) -> Jet {
        let [a0, a1, a2] = self.0;
        let r = a0.inv();
        Jet([r, -a1 * r * r, (2.0 * a1 * a1 * r - a2) * r * r])
    }

    fn add(self, o: Jet) -> Jet {
        Jet([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    fn scale(self, c: f64) -> Jet {
        Jet([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn default_terms(s: ComplexValue) -> usize {
    ((s.im.abs() / 2.0).ceil() as usize + 10).max(20)
}

/// Magnitude of the first omitted Euler-Maclaurin term times the usual
/// remainder factor `|s + 2p + 1| / (Re s + 2p + 1)`.
fn remainder_bound(s: ComplexValue, n: usize) -> f64 {
    let p = BERNOULLI_TERMS;
    let mut poch = 1.0;
    for j in 0..=(2 * p) {
        poch *= (s + j as f64).norm();
    }
    let nf = n as f64;
    let term = BERNOULLI[p].abs() / factorial(2 * p + 2) * poch * nf.powf(-s.re - (2 * p + 1) as f64);
    let sigma_shift = s.re + (2 * p + 1) as f64;
    term * (s + (2 * p + 1) as f64).norm() / sigma_shift
}

/// Euler-Maclaurin evaluation of `zeta(s)` and, when `order > 0`, its
/// derivatives. No domain check beyond `s != 1`.
fn euler_maclaurin(s: ComplexValue, order: usize, prec: &PrecisionSpec) -> Result<[ComplexValue; 3]> {
    if s == ComplexValue::new(1.0, 0.0) {
        return Err(Error::PoleAtOne);
    }
    let mut n = default_terms(s);
    loop {
        let log_factor = (1.0 + (n as f64).ln()).powi(order as i32);
        if remainder_bound(s, n) * log_factor <= prec.target_abs_error {
            break;
        }
        n *= 2;
        if n > prec.max_series_terms {
            return Err(Error::PrecisionUnreachable {
                target: prec.target_abs_error,
                max_terms: prec.max_series_terms,
            });
        }
    }

    let table = log_table();
    let (sigma, t) = (s.re, s.im);
    let half_line = sigma == 0.5;
    let mut sum = [ComplexValue::new(0.0, 0.0); 3];
    for k in 1..n {
        let (ln_k, amp) = if k < LOG_TABLE_LEN {
            let l = table.ln[k];
            let a = if half_line {
                table.inv_sqrt[k]
            } else {
                (-sigma * l).exp()
            };
            (l, a)
        } else {
            let l = (k as f64).ln();
            (l, (-sigma * l).exp())
        };
        let (sn, cs) = (t * ln_k).sin_cos();
        let term = ComplexValue::new(amp * cs, -amp * sn);
        sum[0] += term;
        if order >= 1 {
            sum[1] -= ln_k * term;
        }
        if order >= 2 {
            sum[2] += ln_k * ln_k * term;
        }
    }

    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp(); // N^{-s}
    let n_pow_jet = Jet::exp_linear(n_pow, ln_n);
    let one = ComplexValue::new(1.0, 0.0);

    // N^{1-s} / (s - 1)
    let head = Jet::exp_linear(n_pow * nf, ln_n).mul(Jet::variable(s - one).inv());
    let mut total = Jet(sum).add(head).add(n_pow_jet.scale(0.5));

    // sum_k B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    let mut poch = Jet::variable(s);
    let mut power = n_pow_jet.scale(1.0 / nf);
    for k in 1..=BERNOULLI_TERMS {
        if k > 1 {
            let j = (2 * k - 3) as f64;
            poch = poch
                .mul(Jet::variable(s + j))
                .mul(Jet::variable(s + j + 1.0));
            power = power.scale(1.0 / (nf * nf));
        }
        let coeff = BERNOULLI[k - 1] / factorial(2 * k);
        total = total.add(poch.mul(power).scale(coeff));
    }
    Ok(total.0)
}

fn check_domain(s: ComplexValue) -> Result<()> {
    if s == ComplexValue::new(1.0, 0.0) {
        return Err(Error::PoleAtOne);
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain {
            arg: s,
            reason: "non-finite argument",
        });
    }
    if s.re < -1.0 || s.re > 4.0 {
        return Err(Error::Domain {
            arg: s,
            reason: "need -1 <= Re s <= 4",
        });
    }
    if s.im.abs() > MAX_HEIGHT {
        return Err(Error::Domain {
            arg: s,
            reason: "need |Im s| <= 1e4",
        });
    }
    Ok(())
}

/// Riemann zeta function.
pub fn zeta(s: ComplexValue, prec: &PrecisionSpec) -> Result<ComplexValue> {
    check_domain(s)?;
    let [v, _, _] = euler_maclaurin(s, 0, prec)?;
    ensure_finite(v, "zeta")
}

/// `zeta^(order)(s)` for order 1 or 2, from the term-wise differentiated
/// Euler-Maclaurin formula.
pub fn zeta_derivative(s: ComplexValue, order: u8, prec: &PrecisionSpec) -> Result<ComplexValue> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "derivative order {order} not in {{1, 2}}"
        )));
    }
    check_domain(s)?;
    let jet = euler_maclaurin(s, order as usize, prec)?;
    ensure_finite(jet[order as usize], "zeta_derivative")
}

/// `(zeta, zeta', zeta'')` at `s` from a single summation pass. Entries
/// above `order` are zero.
pub fn zeta_jet(s: ComplexValue, order: u8, prec: &PrecisionSpec) -> Result<[ComplexValue; 3]> {
    check_domain(s)?;
    let order = order.min(2) as usize;
    let mut jet = euler_maclaurin(s, order, prec)?;
    for v in jet.iter_mut().skip(order + 1) {
        *v = ComplexValue::new(0.0, 0.0);
    }
    for v in jet {
        ensure_finite(v, "zeta_jet")?;
    }
    Ok(jet)
}

/// `zeta(3), zeta(5), ..., zeta(2 n_max + 1)`.
pub fn odd_zeta_table(n_max: usize) -> Result<Vec<f64>> {
    if !(1..=200).contains(&n_max) {
        return Err(Error::InvalidParameter(format!(
            "odd_zeta_table size {n_max} not in 1..=200"
        )));
    }
    let prec = PrecisionSpec {
        target_abs_error: 1e-16,
        max_series_terms: 10_000,
    };
    (1..=n_max)
        .map(|n| {
            let s = ComplexValue::new((2 * n + 1) as f64, 0.0);
            euler_maclaurin(s, 0, &prec).map(|v| v[0].re)
        })
        .collect()
}

/// Riemann-Siegel theta function `arg Gamma(1/4 + it/2) - (t/2) log pi`,
/// continuous in t.
pub fn hardy_theta(t: f64) -> Result<f64> {
    let lg = ln_gamma(ComplexValue::new(0.25, 0.5 * t))?;
    Ok(lg.im - 0.5 * t * PI.ln())
}

/// Hardy's real-valued function `Z(t) = exp(i theta(t)) zeta(1/2 + it)`.
pub fn hardy_z(t: f64, prec: &PrecisionSpec) -> Result<f64> {
    let z = zeta(ComplexValue::new(0.5, t), prec)?;
    let th = hardy_theta(t)?;
    Ok((ComplexValue::from_polar(1.0, th) * z).re)
}

#[allow(dead_code)]
pub(crate) fn completed_zeta(s: ComplexValue, prec: &PrecisionSpec) -> Result<ComplexValue> {
    Ok(chi(s)? * zeta(s, prec)?)
}
