//! Tables of nontrivial zero ordinates, cached `zeta'(rho)`, and the sums
//! over zeros that appear in the lower bounds.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::{hardy_z, zeta, zeta_derivative, ComplexValue, PrecisionSpec};

/// Ordinates of the first 10^4 zeros at 9 decimals.
pub const BUNDLED_TABLE: &str = include_str!("../data/zeros_first_10000.txt");

/// Half-width of the largest bracket tried during refinement.
pub const REFINE_WINDOW: f64 = 0.05;

const BRACKETS: [f64; 4] = [1e-7, 1e-5, 1e-3, REFINE_WINDOW];

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ZeroEntry {
    pub ordinate: f64,
    pub multiplicity: u32,
    #[serde(serialize_with = "serialize_complex")]
    pub zeta_prime: ComplexValue,
}

impl ZeroEntry {
    pub fn rho(&self) -> ComplexValue {
        ComplexValue::new(0.5, self.ordinate)
    }
}

fn serialize_complex<S: serde::Serializer>(z: &ComplexValue, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Zeros `1/2 + i gamma` with `gamma > 0`, in increasing order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZeroTable {
    entries: Vec<ZeroEntry>,
}

impl ZeroTable {
    pub fn new(entries: Vec<ZeroEntry>) -> Result<Self> {
        for (k, e) in entries.iter().enumerate() {
            if !(e.ordinate > 0.0) || !e.ordinate.is_finite() || e.multiplicity == 0 {
                return Err(Error::InvalidParameter(format!(
                    "zero #{}: ordinate {} multiplicity {}",
                    k + 1,
                    e.ordinate,
                    e.multiplicity
                )));
            }
            if k > 0 && e.ordinate <= entries[k - 1].ordinate {
                return Err(Error::InvalidParameter(format!(
                    "ordinates not strictly increasing at #{}",
                    k + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Builds a table from ordinates, optionally refining them, and caches
    /// `zeta'(rho)` for every entry.
    pub fn from_ordinates(ordinates: &[f64], refine: bool, prec: &PrecisionSpec) -> Result<Self> {
        let entries = ordinates
            .par_iter()
            .map(|&g| {
                let ordinate = if refine { refine_ordinate(g, prec)? } else { g };
                let zeta_prime = zeta_derivative(ComplexValue::new(0.5, ordinate), 1, prec)?;
                Ok(ZeroEntry {
                    ordinate,
                    multiplicity: 1,
                    zeta_prime,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[ZeroEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest ordinate, 0 for an empty table.
    pub fn height(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.ordinate)
    }

    pub fn ordinates(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.ordinate).collect()
    }

    /// Number of entries with ordinate `<= t`.
    pub fn count_below(&self, t: f64) -> usize {
        self.entries.partition_point(|e| e.ordinate <= t)
    }

    /// The entries with ordinate `<= t`.
    pub fn truncated(&self, t: f64) -> ZeroTable {
        ZeroTable {
            entries: self.entries[..self.count_below(t)].to_vec(),
        }
    }

    /// The first `k` entries.
    pub fn first(&self, k: usize) -> ZeroTable {
        ZeroTable {
            entries: self.entries[..k.min(self.len())].to_vec(),
        }
    }
}

/// Parses one decimal ordinate per line; blank lines and lines starting
/// with `#` are skipped.
pub fn parse_ordinates(text: &str, origin: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.to_string(),
            line: idx + 1,
            message,
        };
        let v: f64 = line
            .parse()
            .map_err(|e| parse_err(format!("{line:?}: {e}")))?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(parse_err(format!("ordinate {v} is not a positive number")));
        }
        if let Some(&last) = out.last() {
            if v <= last {
                return Err(parse_err(format!("ordinate {v} does not exceed {last}")));
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Reads a zero table from a text file.
pub fn load_zero_table(path: &Path, refine: bool) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let ordinates = parse_ordinates(&text, &path.display().to_string())?;
    ZeroTable::from_ordinates(&ordinates, refine, &PrecisionSpec::default())
}

/// The bundled table of the first 10^4 zeros.
pub fn bundled_zero_table(refine: bool) -> Result<ZeroTable> {
    let ordinates = parse_ordinates(BUNDLED_TABLE, "bundled table")?;
    ZeroTable::from_ordinates(&ordinates, refine, &PrecisionSpec::default())
}

/// Polishes an approximate ordinate by bracketing a sign change of Hardy's
/// Z function and refining it with the Illinois method.
pub fn refine_ordinate(gamma: f64, prec: &PrecisionSpec) -> Result<f64> {
    let f = |t: f64| hardy_z(t, prec);
    let f0 = f(gamma)?;
    if f0 == 0.0 {
        return Ok(gamma);
    }
    for h in BRACKETS {
        let (mut a, mut b) = (gamma - h, gamma + h);
        let (mut fa, mut fb) = (f(a)?, f(b)?);
        if fa * fb > 0.0 {
            continue;
        }
        let mut side = 0i8;
        for _ in 0..100 {
            if b - a < 1e-13 * gamma.max(1.0) {
                break;
            }
            let c = (a * fb - b * fa) / (fb - fa);
            let fc = f(c)?;
            if fc == 0.0 {
                return Ok(c);
            }
            if (fc > 0.0) == (fa > 0.0) {
                a = c;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        return Ok(if fa.abs() < fb.abs() { a } else { b });
    }
    Err(Error::RefinementFailure {
        ordinate: gamma,
        window: REFINE_WINDOW,
    })
}

/// Truncated sum over a table plus the zero-density tail beyond its height.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ZeroSum {
    pub height: f64,
    pub count: usize,
    pub truncated: f64,
    pub tail: f64,
    pub total: f64,
}

/// `sum_{gamma > T} 2 / gamma^2` from the density `(1/2pi) log(t/2pi)`.
pub fn density_tail(height: f64) -> f64 {
    ((height / (2.0 * PI)).ln() + 1.0) / (PI * height)
}

fn weighted_zero_sum(table: &ZeroTable, weight: impl Fn(&ZeroEntry) -> f64) -> Result<ZeroSum> {
    if table.is_empty() {
        return Err(Error::InvalidParameter("empty zero table".into()));
    }
    let truncated: f64 = table
        .entries()
        .iter()
        .map(|e| weight(e) * 2.0 / (0.25 + e.ordinate * e.ordinate))
        .sum();
    let height = table.height();
    let tail = density_tail(height);
    Ok(ZeroSum {
        height,
        count: table.len(),
        truncated,
        tail,
        total: truncated + tail,
    })
}

/// `sum m / |rho|^2` over the table (both signs of the ordinate), plus the
/// density tail. Converges to `2 + gamma - log 4pi`.
pub fn zero_sum_constant(table: &ZeroTable) -> Result<ZeroSum> {
    weighted_zero_sum(table, |e| e.multiplicity as f64)
}

/// `sum m^2 / |rho|^2`, the lower bound for `liminf d_N^2 log N`.
pub fn burnol_lower_bound(table: &ZeroTable) -> Result<ZeroSum> {
    weighted_zero_sum(table, |e| (e.multiplicity as f64).powi(2))
}

/// Ordinary least-squares slope of `y` on `x` with its standard error
/// (`None` when fewer than three points leave no residual degrees of freedom).
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, Option<f64>)> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = (n > 2).then(|| {
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .sum();
        (rss / (n - 2) as f64 / sxx).sqrt()
    });
    Some((slope, intercept, stderr))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GrowthDiagnostic {
    /// `(T, value)` pairs.
    pub points: Vec<(f64, f64)>,
    /// Log-log slope; `None` when the grid is degenerate.
    pub exponent: Option<f64>,
    pub exponent_stderr: Option<f64>,
}

impl GrowthDiagnostic {
    fn from_points(points: Vec<(f64, f64)>) -> Self {
        let usable: Vec<(f64, f64)> = points
            .iter()
            .filter(|(t, v)| *t > 0.0 && *v > 0.0)
            .map(|(t, v)| (t.ln(), v.ln()))
            .collect();
        let (x, y): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        let fit = linear_fit(&x, &y);
        Self {
            points,
            exponent: fit.map(|f| f.0),
            exponent_stderr: fit.and_then(|f| f.2),
        }
    }
}

/// Partial sums `S(T) = sum_{gamma <= T} 1/|zeta'(rho)|^2` on a grid and their
/// log-log growth exponent. The hypothesis `S(T) << T^(3/2 - delta)` is
/// probed through `delta = 3/2 - exponent`.
pub fn bcf_hypothesis_diagnostic(table: &ZeroTable, t_grid: &[f64]) -> Result<GrowthDiagnostic> {
    for &t in t_grid {
        if !(t > 0.0) || t > table.height() {
            return Err(Error::InvalidParameter(format!(
                "grid height {t} outside (0, {}]",
                table.height()
            )));
        }
    }
    let mut prefix = Vec::with_capacity(table.len() + 1);
    prefix.push(0.0);
    for e in table.entries() {
        prefix.push(prefix.last().unwrap() + 1.0 / e.zeta_prime.norm_sqr());
    }
    let points = t_grid
        .iter()
        .map(|&t| (t, prefix[table.count_below(t)]))
        .collect();
    Ok(GrowthDiagnostic::from_points(points))
}

/// Sampling step for the running maximum of `|zeta(1/2+it)|`.
pub const LINDELOF_STEP: f64 = 0.05;

/// Running maximum of `|zeta(1/2+it)|` over `[10, t]` at the grid points,
/// and its log-log growth exponent.
pub fn empirical_lindelof_diagnostic(t_grid: &[f64], prec: &PrecisionSpec) -> Result<GrowthDiagnostic> {
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.first().is_some_and(|&t| t < 10.0) || sorted.last().is_some_and(|&t| t > 1e4) {
        return Err(Error::InvalidParameter("grid must lie in [10, 1e4]".into()));
    }
    let end = sorted.last().copied().unwrap_or(10.0);
    let steps = ((end - 10.0) / LINDELOF_STEP).ceil() as usize;
    let samples: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let t = (10.0 + k as f64 * LINDELOF_STEP).min(end);
            Ok(zeta(ComplexValue::new(0.5, t), prec)?.norm())
        })
        .collect::<Result<_>>()?;
    let mut running = Vec::with_capacity(samples.len());
    let mut m = 0.0f64;
    for v in &samples {
        m = m.max(*v);
        running.push(m);
    }
    let points = t_grid
        .iter()
        .map(|&t| {
            let idx = (((t - 10.0) / LINDELOF_STEP).floor() as usize).min(running.len() - 1);
            (t, running[idx])
        })
        .collect();
    Ok(GrowthDiagnostic::from_points(points))
}

/// Zero count against `(T/2pi) log(T/2pi e) + 7/8`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CountCheck {
    pub height: f64,
    pub count: usize,
    pub expected: f64,
    pub relative_deviation: f64,
}

pub fn riemann_von_mangoldt_check(table: &ZeroTable, height: f64) -> CountCheck {
    let x = height / (2.0 * PI);
    let expected = x * (x / std::f64::consts::E).ln() + 0.875;
    let count = table.count_below(height);
    CountCheck {
        height,
        count,
        expected,
        relative_deviation: (count as f64 - expected).abs() / expected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ConstantsBundle;
    use std::io::Write;

    fn table_from(ordinates: &[f64]) -> ZeroTable {
        ZeroTable::from_ordinates(ordinates, false, &PrecisionSpec::default()).unwrap()
    }

    #[test]
    fn refines_the_first_zeros() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# comment\n14.134725142\n21.022039639\n\n25.010857580").unwrap();
        let table = load_zero_table(file.path(), true).unwrap();
        assert_eq!(table.len(), 3);
        let prec = PrecisionSpec::default();
        for (e, want) in table.entries().iter().zip([14.134725, 21.022040, 25.010858]) {
            assert!((e.ordinate - want).abs() < 1e-6);
            assert!(zeta(e.rho(), &prec).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn bisection_oracle_from_scratch() {
        // independent of the supplied ordinates: bisect Z on coarse brackets
        let prec = PrecisionSpec::default();
        let bisect = |mut a: f64, mut b: f64| {
            let mut fa = hardy_z(a, &prec).unwrap();
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let fm = hardy_z(m, &prec).unwrap();
                if fm * fa > 0.0 {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        };
        for (a, b, approx) in [(20.5, 21.5, 21.022_040), (24.5, 25.5, 25.010_858)] {
            let root = bisect(a, b);
            let refined = refine_ordinate(approx, &prec).unwrap();
            assert!((root - refined).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_file_and_parse_errors() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let table = load_zero_table(file.path(), true).unwrap();
        assert!(table.is_empty());
        assert_eq!(table.height(), 0.0);
        match parse_ordinates("14.13\nabc\n", "x") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_ordinates("21.0\n14.1\n", "x").is_err());
        assert!(matches!(
            load_zero_table(Path::new("/nonexistent/zeros.txt"), false),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn refinement_failure_far_from_a_zero() {
        // midway between the first two zeros Z has no sign change within 0.05
        let r = refine_ordinate(17.5, &PrecisionSpec::default());
        assert!(matches!(r, Err(Error::RefinementFailure { .. })));
    }

    #[test]
    fn single_zero_sum() {
        let table = table_from(&[14.134_725_141_734_693]);
        let s = zero_sum_constant(&table).unwrap();
        let want = 2.0 / (0.25 + 14.134_725_141_734_693f64.powi(2));
        assert_eq!(s.truncated, want);
        // the quoted 0.010009 is 2/(1/4 + gamma1^2) rounded loosely; the
        // exact value is 0.0099979
        assert!((s.truncated - 0.009_997_9).abs() < 1e-7);
        assert!((s.truncated / 0.010_009 - 1.0).abs() < 2e-3);
        assert!(zero_sum_constant(&ZeroTable::default()).is_err());
    }

    #[test]
    fn multiplicity_scaling() {
        let table = table_from(&[14.134_725_141_734_693, 21.022_039_638_771_556]);
        let base = burnol_lower_bound(&table).unwrap();
        assert_eq!(base, zero_sum_constant(&table).unwrap());
        let mut entries = table.entries().to_vec();
        entries[1].multiplicity = 2;
        let doubled = ZeroTable::new(entries).unwrap();
        let term = 2.0 / (0.25 + 21.022_039_638_771_556f64.powi(2));
        let b = burnol_lower_bound(&doubled).unwrap();
        assert!((b.truncated - base.truncated - 3.0 * term).abs() < 1e-15);
        let z = zero_sum_constant(&doubled).unwrap();
        assert!((z.truncated - base.truncated - term).abs() < 1e-15);
        // at realistic heights the density correction is positive and small
        let tall = burnol_lower_bound(&bundled_zero_table(false).unwrap().first(1000)).unwrap();
        assert!(tall.tail > 0.0 && tall.tail < tall.truncated);
    }

    #[test]
    fn bundled_table_sanity() {
        let ordinates = parse_ordinates(BUNDLED_TABLE, "bundled").unwrap();
        assert_eq!(ordinates.len(), 10_000);
        let table = table_from(&ordinates);
        let target = ConstantsBundle::new().nbbd_constant;
        let s = zero_sum_constant(&table).unwrap();
        assert!((s.total - target).abs() < 1e-3, "{s:?}");
        for t in [100.0, 1000.0] {
            let check = riemann_von_mangoldt_check(&table, t);
            assert!(check.relative_deviation < 0.05, "{check:?}");
        }
        let prec = PrecisionSpec::default();
        for e in table.first(100).entries() {
            assert!((e.ordinate - refine_ordinate(e.ordinate, &prec).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn bcf_diagnostic_shape() {
        let ordinates = parse_ordinates(BUNDLED_TABLE, "bundled").unwrap();
        let table = table_from(&ordinates[..700]);
        let grid = [100.0, 200.0, 400.0, 800.0];
        let d = bcf_hypothesis_diagnostic(&table, &grid).unwrap();
        for w in d.points.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
        assert!(d.exponent.is_some());
        let single = bcf_hypothesis_diagnostic(&table, &[100.0]).unwrap();
        assert!(single.exponent.is_none());
        assert!(bcf_hypothesis_diagnostic(&table, &[1e6]).is_err());
    }

    #[test]
    fn lindelof_running_max() {
        let prec = PrecisionSpec::default();
        let d = empirical_lindelof_diagnostic(&[20.0, 100.0, 300.0], &prec).unwrap();
        assert!(d.points[2].1 >= d.points[1].1 && d.points[1].1 >= d.points[0].1);
        assert!(d.exponent.unwrap() >= 0.0);
        assert!(empirical_lindelof_diagnostic(&[5.0], &prec).is_err());
    }
}
