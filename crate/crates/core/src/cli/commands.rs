use std::path::Path;

use clap::{Args, ValueEnum};
use serde::Serialize;

use super::config::{parse_list, Settings};
use super::output::{format_real, sha256_hex, Params, Report};
use crate::counterfactual::{
    fit_theorem_constants, full_counterfactual_batch, geometric_grid, main_term_batch, CounterfactualZeta, FitResult,
    MainTermValue,
};
use crate::criterion::{build_gram, criterion_integral, solve_dn2, DistanceResult, QuadratureSpec, DEFAULT_T_CAP};
use crate::error::{Error, Result};
use crate::mollifier::build_vn;
use crate::residues::{
    f_series, DecompositionReport, lemma23_reconstruct, residue_closed_form, residue_terms, sigma1, sigma2, trivial_zero_term,
    trivial_zero_terms,
};
use crate::special::{ComplexValue, ConstantsBundle, PrecisionSpec, TrueZeta};
use crate::zeros::{
    bcf_hypothesis_diagnostic, burnol_lower_bound, empirical_lindelof_diagnostic, parse_ordinates,
    riemann_von_mangoldt_check, zero_sum_constant, CountCheck, GrowthDiagnostic, ZeroEntry, ZeroSum, ZeroTable,
    BUNDLED_TABLE,
};

/// A planned run: the complete parameter echo and the deferred computation.
pub struct Job<'a> {
    pub params: Params,
    pub run: Box<dyn FnOnce() -> Result<Report> + 'a>,
}

impl<'a> Job<'a> {
    fn new(params: Params, run: impl FnOnce() -> Result<Report> + 'a) -> Self {
        Self {
            params,
            run: Box::new(run),
        }
    }
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn join_reals(values: &[f64]) -> String {
    values.iter().map(|&v| format_real(v)).collect::<Vec<_>>().join(",")
}

fn list_arg<T: std::str::FromStr>(raw: &Option<String>, default: Vec<T>) -> Result<Vec<T>> {
    match raw {
        Some(text) => parse_list(text),
        None => Ok(default),
    }
}

/// The zero table named by the settings, read eagerly (for hashing) and
/// built lazily (building computes `zeta'` at every ordinate).
pub struct Inputs {
    text: String,
    origin: String,
    refine: bool,
}

impl Inputs {
    pub fn new(settings: &Settings) -> Result<Self> {
        let (text, origin) = match &settings.zeros {
            Some(path) => (read(path)?, path.display().to_string()),
            None => (BUNDLED_TABLE.to_string(), "bundled".to_string()),
        };
        Ok(Self {
            text,
            origin,
            refine: settings.refine,
        })
    }

    pub fn describe(&self, params: &mut Params) {
        params.insert("zeros".into(), self.origin.clone());
        params.insert("zeros_sha256".into(), sha256_hex(self.text.as_bytes()));
        params.insert("refine".into(), self.refine.to_string());
    }

    /// Largest ordinate, without building the table.
    pub fn height(&self) -> Result<f64> {
        Ok(parse_ordinates(&self.text, &self.origin)?.last().copied().unwrap_or(0.0))
    }

    pub fn table(&self) -> Result<ZeroTable> {
        let ordinates = parse_ordinates(&self.text, &self.origin)?;
        ZeroTable::from_ordinates(&ordinates, self.refine, &PrecisionSpec::default())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn describe_model(settings: &Settings, params: &mut Params, with_mode: bool) {
    let m = &settings.model;
    params.insert("sigma0".into(), format_real(m.sigma0));
    params.insert("gamma0".into(), format_real(m.gamma0));
    params.insert("removed".into(), join_reals(&m.removed));
    if with_mode {
        let mode = serde_json::to_value(settings.mode).unwrap_or_default();
        params.insert("mode".into(), mode.as_str().unwrap_or_default().to_string());
    }
}

fn spec_from(t_max: f64, tol: f64, params: &mut Params) -> Result<QuadratureSpec> {
    let spec = QuadratureSpec::default().with_t_max(t_max).with_tolerance(tol);
    spec.validate()?;
    params.insert("tmax".into(), format_real(spec.t_max));
    params.insert("tol".into(), format_real(spec.panel_tolerance));
    Ok(spec)
}


// ---------------------------------------------------------------- constants

#[derive(Debug, Clone, Args)]
pub struct ConstantsArgs {
    /// Print the constants only and skip the zero sums
    #[arg(long)]
    pub empty_table: bool,
}

pub fn constants<'a>(inputs: &'a Inputs, args: &ConstantsArgs, mut params: Params) -> Result<Job<'a>> {
    params.insert("empty_table".into(), args.empty_table.to_string());
    let empty = args.empty_table;
    if !empty {
        inputs.describe(&mut params);
    }
    Ok(Job::new(params, move || {
        let bundle = ConstantsBundle::new();
        let table = if empty { ZeroTable::default() } else { inputs.table()? };
        let (sum, burnol) = if table.is_empty() {
            (None, None)
        } else {
            (Some(zero_sum_constant(&table)?), Some(burnol_lower_bound(&table)?))
        };
        #[derive(Serialize)]
        struct Out {
            constants: ConstantsBundle,
            zero_sum: Option<ZeroSum>,
            deviation: Option<f64>,
            burnol: Option<ZeroSum>,
        }
        let deviation = sum.map(|s| s.total - bundle.nbbd_constant);
        let mut report = Report::new(
            vec!["quantity", "value"],
            Out {
                constants: bundle,
                zero_sum: sum,
                deviation,
                burnol,
            },
        )?;
        report.push(vec!["euler_gamma".into(), bundle.euler_gamma.into()]);
        report.push(vec!["log_4pi".into(), bundle.log_4pi.into()]);
        report.push(vec!["nbbd_constant".into(), bundle.nbbd_constant.into()]);
        if let (Some(s), Some(b), Some(d)) = (sum, burnol, deviation) {
            report.push(vec!["table_height".into(), s.height.into()]);
            report.push(vec!["zero_count".into(), s.count.into()]);
            report.push(vec!["zero_sum_truncated".into(), s.truncated.into()]);
            report.push(vec!["zero_sum_tail".into(), s.tail.into()]);
            report.push(vec!["zero_sum_total".into(), s.total.into()]);
            report.push(vec!["zero_sum_deviation".into(), d.into()]);
            report.push(vec!["burnol_total".into(), b.total.into()]);
        }
        Ok(report)
    }))
}

// ---------------------------------------------------------------- criterion

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// The Riemann zeta function with the mollifier V_N
    RealZeta,
    /// The counterfactual model with its own decomposition mollifier
    Model,
}

#[derive(Debug, Clone, Args)]
pub struct CriterionArgs {
    /// Mollifier lengths, comma separated
    #[arg(long = "n", default_value = "2,100,1000")]
    pub n: String,
    #[arg(long, value_enum, default_value = "real-zeta")]
    pub target: Target,
}

#[derive(Serialize)]
struct CriterionRow {
    n: usize,
    value: f64,
    value_log_n: f64,
    tail_bound: f64,
    quadrature_error: f64,
}

pub fn criterion<'a>(
    settings: &'a Settings,
    inputs: &'a Inputs,
    args: &CriterionArgs,
    mut params: Params,
) -> Result<Job<'a>> {
    let ns: Vec<usize> = parse_list(&args.n)?;
    params.insert("n".into(), join(&ns));
    let target = args.target;
    let specs: Vec<QuadratureSpec> = match target {
        Target::RealZeta => {
            params.insert("target".into(), "real-zeta".into());
            let tol = settings.tol.unwrap_or(1e-8);
            params.insert("tol".into(), format_real(tol));
            params.insert(
                "tmax".into(),
                settings
                    .tmax
                    .map_or("max(200;2N) capped at 5000".to_string(), format_real),
            );
            ns.iter()
                .map(|&n| {
                    let t_max = settings
                        .tmax
                        .unwrap_or_else(|| (2.0 * n as f64).clamp(200.0, DEFAULT_T_CAP));
                    let spec = QuadratureSpec::default().with_t_max(t_max).with_tolerance(tol);
                    spec.validate().map(|_| spec)
                })
                .collect::<Result<_>>()?
        }
        Target::Model => {
            params.insert("target".into(), "model".into());
            inputs.describe(&mut params);
            describe_model(settings, &mut params, false);
            vec![spec_from(
                settings.tmax.unwrap_or(2000.0),
                settings.tol.unwrap_or(1e-7),
                &mut params,
            )?]
        }
    };
    Ok(Job::new(params, move || {
        let mut rows = Vec::new();
        match target {
            Target::RealZeta => {
                for (&n, spec) in ns.iter().zip(&specs) {
                    let r = criterion_integral(&build_vn(n)?, &TrueZeta::default(), spec)?;
                    rows.push((n, r.value, r.tail_bound, r.quadrature_error));
                }
            }
            Target::Model => {
                let m = CounterfactualZeta::new(settings.model, &inputs.table()?)?;
                for v in full_counterfactual_batch(&ns, &m, &specs[0])? {
                    rows.push((v.n, v.value, v.tail_bound, v.quadrature_error));
                }
            }
        }
        let out: Vec<CriterionRow> = rows
            .iter()
            .map(|&(n, value, tail_bound, quadrature_error)| CriterionRow {
                n,
                value,
                value_log_n: value * (n as f64).ln(),
                tail_bound,
                quadrature_error,
            })
            .collect();
        let mut report = Report::new(
            vec!["n", "value", "value_log_n", "tail_bound", "quadrature_error"],
            &out,
        )?;
        for r in &out {
            report.push(vec![
                r.n.into(),
                r.value.into(),
                r.value_log_n.into(),
                r.tail_bound.into(),
                r.quadrature_error.into(),
            ]);
        }
        Ok(report)
    }))
}

// ---------------------------------------------------------------- gram

#[derive(Debug, Clone, Args)]
pub struct GramArgs {
    /// Largest dilation family size; every N up to it is reported
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
}

pub fn gram<'a>(settings: &'a Settings, args: &GramArgs, mut params: Params) -> Result<Job<'a>> {
    params.insert("n_max".into(), args.n_max.to_string());
    let spec = spec_from(
        settings.tmax.unwrap_or(200.0),
        settings.tol.unwrap_or(1e-10),
        &mut params,
    )?;
    let n_max = args.n_max;
    Ok(Job::new(params, move || {
        let full = build_gram(n_max, &spec)?;
        let results: Vec<DistanceResult> = (1..=n_max)
            .map(|k| solve_dn2(&full.leading(k)?))
            .collect::<Result<_>>()?;
        #[derive(Serialize)]
        struct Out<'r> {
            min_eigenvalue: f64,
            trace: f64,
            norm_one: f64,
            tail_bound: f64,
            distances: &'r [DistanceResult],
        }
        let mut report = Report::new(
            vec!["n", "d2", "d2_raw", "residual"],
            Out {
                min_eigenvalue: full.min_eigenvalue(),
                trace: full.trace(),
                norm_one: full.norm_one,
                tail_bound: full.tail_bound,
                distances: &results,
            },
        )?;
        for r in &results {
            report.push(vec![r.n.into(), r.d2.into(), r.d2_raw.into(), r.residual.into()]);
        }
        Ok(report)
    }))
}

// ---------------------------------------------------------------- lemma23

#[derive(Debug, Clone, Args)]
pub struct Lemma23Args {
    /// Mollifier lengths
    #[arg(long = "n", default_value = "50,100")]
    pub n: String,
    /// Real part of every evaluation point
    #[arg(long = "re", default_value_t = 0.45)]
    pub re: f64,
    /// Imaginary parts (default: 10 points evenly spaced in [1, 30])
    #[arg(long = "t")]
    pub t: Option<String>,
    /// Truncation heights of the zero sum
    #[arg(long, default_value = "500,1000,2000")]
    pub heights: String,
}

#[derive(Serialize)]
struct Lemma23Row {
    truncation: f64,
    #[serde(flatten)]
    report: DecompositionReport,
}

pub fn lemma23<'a>(inputs: &'a Inputs, args: &Lemma23Args, mut params: Params) -> Result<Job<'a>> {
    let ns: Vec<usize> = parse_list(&args.n)?;
    let ts: Vec<f64> = list_arg(&args.t, (0..10).map(|k| 1.0 + 29.0 * k as f64 / 9.0).collect())?;
    let heights: Vec<f64> = parse_list(&args.heights)?;
    let re = args.re;
    params.insert("n".into(), join(&ns));
    params.insert("re".into(), format_real(re));
    params.insert("t".into(), join_reals(&ts));
    params.insert("heights".into(), join_reals(&heights));
    inputs.describe(&mut params);
    Ok(Job::new(params, move || {
        let table = inputs.table()?;
        let mut out = Vec::new();
        for &n in &ns {
            for &t in &ts {
                for &h in &heights {
                    let report = lemma23_reconstruct(n, ComplexValue::new(re, t), &table.truncated(h))?;
                    out.push(Lemma23Row { truncation: h, report });
                }
            }
        }
        let mut report = Report::new(
            vec![
                "n",
                "s_re",
                "s_im",
                "truncation",
                "table_height",
                "lhs_re",
                "lhs_im",
                "rhs_re",
                "rhs_im",
                "error",
                "relative_error",
            ],
            &out,
        )?;
        for row in &out {
            let r = &row.report;
            report.push(vec![
                r.n.into(),
                r.s.0.into(),
                r.s.1.into(),
                row.truncation.into(),
                r.height.into(),
                r.lhs.0.into(),
                r.lhs.1.into(),
                r.rhs.0.into(),
                r.rhs.1.into(),
                r.error.into(),
                r.relative_error.into(),
            ]);
        }
        Ok(report)
    }))
}

// ---------------------------------------------------------------- residues

#[derive(Debug, Clone, Args)]
pub struct ResiduesArgs {
    #[arg(long = "n", default_value_t = 100)]
    pub n: usize,
    #[arg(long = "re", default_value_t = 0.5)]
    pub re: f64,
    #[arg(long = "t", default_value_t = 10.0)]
    pub t: f64,
    /// Number of individual zeros and trivial zeros listed
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Serialize)]
struct ResidueRow {
    kind: &'static str,
    index: usize,
    rho: Option<(f64, f64)>,
    value: (f64, f64),
}

pub fn residues<'a>(
    settings: &'a Settings,
    inputs: &'a Inputs,
    args: &ResiduesArgs,
    mut params: Params,
) -> Result<Job<'a>> {
    let (n, count) = (args.n, args.count);
    params.insert("n".into(), n.to_string());
    params.insert("re".into(), format_real(args.re));
    params.insert("t".into(), format_real(args.t));
    params.insert("count".into(), count.to_string());
    inputs.describe(&mut params);
    describe_model(settings, &mut params, true);
    let s = ComplexValue::new(args.re, args.t);
    Ok(Job::new(params, move || {
        let table = inputs.table()?;
        let model = CounterfactualZeta::new(settings.model, &table)?;
        let ln_n = (n as f64).ln();
        let z = 1.0 / n as f64;
        let mut rows = Vec::new();
        for (k, term) in residue_terms(n, s, &table, count)?.iter().enumerate() {
            rows.push(ResidueRow {
                kind: "zero",
                index: k + 1,
                rho: Some((term.rho.re, term.rho.im)),
                value: (term.value.re, term.value.im),
            });
        }
        for (k, (rho, d)) in model.off_line_zeros(settings.mode)?.into_iter().enumerate() {
            let v = residue_closed_form(rho, d, s, n);
            rows.push(ResidueRow {
                kind: "engineered",
                index: k + 1,
                rho: Some((rho.re, rho.im)),
                value: (v.re, v.im),
            });
        }
        for (k, v) in trivial_zero_terms(s, z)?.into_iter().take(count).enumerate() {
            rows.push(ResidueRow {
                kind: "trivial",
                index: k + 1,
                rho: Some((-2.0 * (k + 1) as f64, 0.0)),
                value: (v.re, v.im),
            });
        }
        let totals = [
            ("sigma1", sigma1(n, s, &table)?.value),
            ("sigma2", sigma2(n, s, &model, settings.mode)?),
            ("trivial_sum", trivial_zero_term(s, z)? / ln_n),
            ("f_series", f_series(s, z)?),
        ];
        for (kind, v) in totals {
            rows.push(ResidueRow {
                kind,
                index: 0,
                rho: None,
                value: (v.re, v.im),
            });
        }
        let mut report = Report::new(vec!["kind", "index", "rho_re", "rho_im", "value_re", "value_im"], &rows)?;
        for r in &rows {
            let (rho_re, rho_im) = match r.rho {
                Some((a, b)) => (a.into(), b.into()),
                None => ("".into(), "".into()),
            };
            report.push(vec![
                r.kind.into(),
                r.index.into(),
                rho_re,
                rho_im,
                r.value.0.into(),
                r.value.1.into(),
            ]);
        }
        Ok(report)
    }))
}

// ---------------------------------------------------------------- fit

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long, default_value_t = 100)]
    pub n_min: usize,
    #[arg(long, default_value_t = 100_000)]
    pub n_max: usize,
    /// Number of geometrically spaced N
    #[arg(long, default_value_t = 240)]
    pub points: usize,
}

pub fn fit<'a>(settings: &'a Settings, inputs: &'a Inputs, args: &FitArgs, mut params: Params) -> Result<Job<'a>> {
    params.insert("n_min".into(), args.n_min.to_string());
    params.insert("n_max".into(), args.n_max.to_string());
    params.insert("points".into(), args.points.to_string());
    inputs.describe(&mut params);
    describe_model(settings, &mut params, true);
    let spec = spec_from(
        settings.tmax.unwrap_or(200.0),
        settings.tol.unwrap_or(1e-9),
        &mut params,
    )?;
    let grid = geometric_grid(args.n_min, args.n_max, args.points);
    Ok(Job::new(params, move || {
        let model = CounterfactualZeta::new(settings.model, &inputs.table()?)?;
        let values = main_term_batch(&grid, &model, &spec, settings.mode)?;
        let data: Vec<(usize, f64)> = values.iter().map(|v| (v.n, v.value)).collect();
        let fixed = fit_theorem_constants(&data, &settings.model, false)?;
        let free = fit_theorem_constants(&data, &settings.model, true)?;
        #[derive(Serialize)]
        struct Out<'r> {
            fixed: &'r FitResult,
            free: &'r FitResult,
            values: &'r [MainTermValue],
        }
        let mut report = Report::new(
            vec!["n", "main_term", "imaginary", "normalized", "fixed_fit", "free_fit"],
            Out {
                fixed: &fixed,
                free: &free,
                values: &values,
            },
        )?;
        let sigma0 = settings.model.sigma0;
        for v in &values {
            let ln_n = (v.n as f64).ln();
            let normalized = v.value * ln_n * ln_n / (v.n as f64).powf(2.0 * sigma0 - 1.0);
            let curve = |f: &FitResult| f.a * (f.frequency * ln_n).cos() + f.b;
            report.push(vec![
                v.n.into(),
                v.value.into(),
                v.imaginary.into(),
                normalized.into(),
                curve(&fixed).into(),
                curve(&free).into(),
            ]);
        }
        Ok(report)
    }))
}

// ---------------------------------------------------------------- zeros-ingest

pub fn zeros_ingest(inputs: &Inputs, mut params: Params) -> Result<Job<'_>> {
    inputs.describe(&mut params);
    Ok(Job::new(params, move || {
        let table = inputs.table()?;
        let check = (!table.is_empty()).then(|| riemann_von_mangoldt_check(&table, table.height()));
        #[derive(Serialize)]
        struct Out<'r> {
            count: usize,
            height: f64,
            count_check: Option<CountCheck>,
            entries: &'r [ZeroEntry],
        }
        let mut report = Report::new(
            vec!["index", "ordinate", "multiplicity", "zeta_prime_re", "zeta_prime_im", "zeta_prime_abs"],
            Out {
                count: table.len(),
                height: table.height(),
                count_check: check,
                entries: table.entries(),
            },
        )?;
        for (k, e) in table.entries().iter().enumerate() {
            report.push(vec![
                (k + 1).into(),
                e.ordinate.into(),
                e.multiplicity.into(),
                e.zeta_prime.re.into(),
                e.zeta_prime.im.into(),
                e.zeta_prime.norm().into(),
            ]);
        }
        Ok(report)
    }))
}

// ---------------------------------------------------------------- diagnostics

#[derive(Debug, Clone, Args)]
pub struct DiagnosticsArgs {
    /// Heights for the sum of 1/|zeta'(rho)|^2 (default: 8 geometric points up to the table height)
    #[arg(long)]
    pub bcf_heights: Option<String>,
    /// Heights for the running maximum of |zeta(1/2+it)|
    #[arg(long, default_value = "100,300,1000,3000")]
    pub lindelof_heights: String,
}

pub fn diagnostics<'a>(inputs: &'a Inputs, args: &DiagnosticsArgs, mut params: Params) -> Result<Job<'a>> {
    inputs.describe(&mut params);
    let top = inputs.height()?;
    if top <= 100.0 {
        return Err(Error::InvalidParameter(format!(
            "table height {top} too small for diagnostics"
        )));
    }
    let default_grid: Vec<f64> = (0..8)
        .map(|k| (100f64.ln() + (top.ln() - 100f64.ln()) * k as f64 / 7.0).exp())
        .map(|t| (t * 1e6).floor() / 1e6)
        .collect();
    let bcf_grid: Vec<f64> = list_arg(&args.bcf_heights, default_grid)?;
    let lindelof_grid: Vec<f64> = parse_list(&args.lindelof_heights)?;
    params.insert("bcf_heights".into(), join_reals(&bcf_grid));
    params.insert("lindelof_heights".into(), join_reals(&lindelof_grid));
    Ok(Job::new(params, move || {
        let table = inputs.table()?;
        let bcf = bcf_hypothesis_diagnostic(&table, &bcf_grid)?;
        let lindelof = empirical_lindelof_diagnostic(&lindelof_grid, &PrecisionSpec::default())?;
        let counts: Vec<CountCheck> = bcf_grid
            .iter()
            .map(|&t| riemann_von_mangoldt_check(&table, t))
            .collect();
        #[derive(Serialize)]
        struct Out<'r> {
            bcf: &'r GrowthDiagnostic,
            bcf_delta: Option<f64>,
            lindelof: &'r GrowthDiagnostic,
            counts: &'r [CountCheck],
        }
        let mut report = Report::new(
            vec!["kind", "height", "value"],
            Out {
                bcf: &bcf,
                bcf_delta: bcf.exponent.map(|e| 1.5 - e),
                lindelof: &lindelof,
                counts: &counts,
            },
        )?;
        for &(t, v) in &bcf.points {
            report.push(vec!["bcf_sum".into(), t.into(), v.into()]);
        }
        for &(t, v) in &lindelof.points {
            report.push(vec!["max_abs_zeta".into(), t.into(), v.into()]);
        }
        for c in &counts {
            report.push(vec!["zero_count".into(), c.height.into(), c.count.into()]);
        }
        for (kind, value) in [("bcf_exponent", bcf.exponent), ("lindelof_exponent", lindelof.exponent)] {
            if let Some(v) = value {
                report.push(vec![kind.into(), "".into(), v.into()]);
            }
        }
        Ok(report)
    }))
}
