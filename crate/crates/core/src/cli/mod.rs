//! Command-line front end.  [`run`] returns the process exit code:
//! 0 when every check passes, 2 when a check fails, 1 on usage or I/O errors.

pub mod config;
pub mod plot;
pub mod spec;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dist::{
    binomial, char_fn_csv, kolmogorov_distance, lp_distances, theta_grid, tv_distance, IntegerDistribution,
};
use crate::error::{Error, Result};
use crate::graph::{spectral_expansion, LabeledChain};
use crate::normal::{check_axioms, dn_distribution, AxiomPlan, StickyFamily, DEFAULT_THETA_POINTS};
use crate::variance::{asymptotic_variance_series, variance_convergence_report, VarianceReport, DEFAULT_TOL};
use crate::verify::{fit_decay_rate, verify_difftail, verify_difftail_j, verify_main_bound, verify_smooth, CheckReport};
use crate::walk::{
    brute_force_walk_sum, empirical_distribution, sample_walk_sum, walk_sum_distribution_seq_with_limits,
    walk_sum_distribution_with_limits, DpLimits, GraphSequence, BRUTE_FORCE_MAX_PATHS,
};

use config::ExperimentConfig;
use plot::{emit_plot, PlotSpec, Series};
use spec::{parse_graph, parse_t_list, SPEC_HELP};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

const ORACLE_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "walklab", version, about = "Exact laws of labeled random-walk sums and their discrete-normal comparison")]
struct Cli {
    /// TOML experiment file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Largest walk length the dynamic program accepts.
    #[arg(long, global = true)]
    max_t: Option<usize>,
    /// Largest state count the dynamic program accepts.
    #[arg(long, global = true)]
    max_n: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact law of the walk sum as CSV.
    Dist(DistArgs),
    /// Distances between the walk sum and a reference law.
    Tv(TvArgs),
    /// Asymptotic variance and its finite-t convergence.
    Sigma2(Sigma2Args),
    /// Check the discrete-normal axioms for a sticky family.
    Axioms(AxiomsArgs),
    /// Tail difference under one substituted step, or against independent sampling.
    Difftail(DifftailArgs),
    /// Characteristic-function decay bound.
    Smooth(SmoothArgs),
    /// Total-variation bound against the matched discrete normal.
    MainBound(MainBoundArgs),
    /// Log-log fit of the total-variation decay.
    Rate(RateArgs),
    /// Cross-check the dynamic program against enumeration and sampling.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
#[command(after_help = SPEC_HELP)]
struct Instance {
    /// Graph spec (see below).
    #[arg(long, value_name = "SPEC")]
    graph: Option<String>,
    /// Vertex labels: alt, ones:K or a 0/1 string.
    #[arg(long, value_name = "LABELS")]
    labels: Option<String>,
}

#[derive(Debug, Args)]
struct Output {
    /// Report destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DistArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long)]
    t: Option<usize>,
    /// Cut the walk into this many independent near-equal pieces.
    #[arg(long)]
    parts: Option<usize>,
    #[command(flatten)]
    output: Output,
    /// Also write the centered characteristic function as CSV.
    #[arg(long, value_name = "PATH")]
    char_out: Option<PathBuf>,
    #[arg(long)]
    theta_points: Option<usize>,
}

#[derive(Debug, Args)]
struct TvArgs {
    #[command(flatten)]
    instance: Instance,
    /// Comma-separated walk lengths.
    #[arg(long, value_name = "LIST")]
    t: Option<String>,
    /// `binomial`, `dn` (matched discrete normal) or another graph spec.
    #[arg(long, default_value = "dn")]
    against: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct Sigma2Args {
    #[command(flatten)]
    instance: Instance,
    #[arg(long, value_name = "LIST")]
    t: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct AxiomsArgs {
    /// Label weights as `P0,P1`.
    #[arg(long, value_name = "P0,P1")]
    p: Option<String>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long, value_name = "LIST")]
    t: Option<String>,
    #[arg(long)]
    theta_points: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct DifftailArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long, value_name = "LIST")]
    t: Option<String>,
    /// Tail cutoffs; defaults to 0, sqrt t, 2 sqrt t.
    #[arg(long, value_name = "LIST")]
    c: Option<String>,
    /// Compare against fully independent sampling instead of one substitution.
    #[arg(long)]
    independent: bool,
    /// 0-based step replaced by independent sampling; defaults to the middle step.
    #[arg(long)]
    step: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SmoothArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long, value_name = "LIST")]
    t: Option<String>,
    #[arg(long)]
    theta_points: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct MainBoundArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long, value_name = "LIST")]
    t: Option<String>,
    #[command(flatten)]
    output: Output,
    /// SVG of tv and lambda / sqrt t against t.
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RateArgs {
    #[command(flatten)]
    instance: Instance,
    #[arg(long, value_name = "LIST")]
    t: Option<String>,
    #[command(flatten)]
    output: Output,
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: Instance,
    /// Largest walk length compared against path enumeration.
    #[arg(long, default_value_t = 7)]
    t_max: usize,
    /// Walk length for the Monte Carlo comparison.
    #[arg(long, default_value_t = 32)]
    sample_t: usize,
    #[arg(long)]
    samples: Option<usize>,
    /// Sampling seed; required here or as `[instance] seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, PartialEq, Eq)]
enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(Outcome::Pass) => EXIT_PASS,
        Ok(Outcome::Fail) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// Writes through a temporary file in the destination directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            log::info!("wrote {}", path.display());
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    emit_text(out, &text)
}

struct Ctx {
    cfg: ExperimentConfig,
}

impl Ctx {
    fn chain(&self, inst: &Instance) -> Result<(String, LabeledChain)> {
        let spec = inst
            .graph
            .clone()
            .or_else(|| self.cfg.instance.graph.clone())
            .ok_or_else(|| Error::InvalidArgument("no graph given (--graph or [instance] graph)".to_string()))?;
        let labels = inst.labels.clone().or_else(|| self.cfg.instance.labels.clone());
        let chain = parse_graph(&spec, labels.as_deref())?;
        let name = match labels {
            Some(l) => format!("{spec} labels={l}"),
            None => spec,
        };
        Ok((name, chain))
    }

    fn t_list(&self, flag: Option<&str>, default: &[usize]) -> Result<Vec<usize>> {
        match flag {
            Some(s) => parse_t_list(s),
            None => Ok(self.cfg.grids.t.clone().unwrap_or_else(|| default.to_vec())),
        }
    }

    fn out(&self, o: &Output) -> Option<PathBuf> {
        o.out.clone().or_else(|| self.cfg.output.out.clone())
    }

    fn plot(&self, flag: &Option<PathBuf>) -> Option<PathBuf> {
        flag.clone().or_else(|| self.cfg.output.plot.clone())
    }

    fn thetas(&self, flag: Option<usize>) -> Result<Vec<f64>> {
        let points = flag.or(self.cfg.grids.theta_points).unwrap_or(DEFAULT_THETA_POINTS);
        if points < 2 {
            return Err(Error::InvalidArgument(format!("theta grid needs at least 2 points, got {points}")));
        }
        Ok(theta_grid(points))
    }

    /// Config-declared artifacts must be ones this subcommand writes.
    fn check_artifacts(&self, command: &str, plot: bool, char_out: bool) -> Result<()> {
        let o = &self.cfg.output;
        for (name, declared, supported) in [("plot", o.plot.is_some(), plot), ("char_out", o.char_out.is_some(), char_out)] {
            if declared && !supported {
                return Err(Error::InvalidArgument(format!("`{command}` does not write a {name} artifact")));
            }
        }
        Ok(())
    }

    fn limits(&self) -> DpLimits {
        let d = DpLimits::default();
        DpLimits {
            max_t: self.cfg.tolerances.max_t.unwrap_or(d.max_t),
            max_n: self.cfg.tolerances.max_n.unwrap_or(d.max_n),
        }
    }
}

fn execute(cli: Cli) -> Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.tolerances.max_t = cli.max_t.or(cfg.tolerances.max_t);
    cfg.tolerances.max_n = cli.max_n.or(cfg.tolerances.max_n);
    let ctx = Ctx { cfg };
    let (name, plot, char_out) = match &cli.command {
        Command::Dist(_) => ("dist", false, true),
        Command::MainBound(_) => ("main-bound", true, false),
        Command::Rate(_) => ("rate", true, false),
        _ => ("this subcommand", false, false),
    };
    ctx.check_artifacts(name, plot, char_out)?;
    match cli.command {
        Command::Dist(a) => cmd_dist(&ctx, a),
        Command::Tv(a) => cmd_tv(&ctx, a),
        Command::Sigma2(a) => cmd_sigma2(&ctx, a),
        Command::Axioms(a) => cmd_axioms(&ctx, a),
        Command::Difftail(a) => cmd_difftail(&ctx, a),
        Command::Smooth(a) => cmd_smooth(&ctx, a),
        Command::MainBound(a) => cmd_main_bound(&ctx, a),
        Command::Rate(a) => cmd_rate(&ctx, a),
        Command::OracleCheck(a) => cmd_oracle(&ctx, a),
    }
}

fn cmd_dist(ctx: &Ctx, a: DistArgs) -> Result<Outcome> {
    let (_, chain) = ctx.chain(&a.instance)?;
    let t = match (a.t, ctx.cfg.grids.t.as_deref()) {
        (Some(t), _) => t,
        (None, Some([t])) => *t,
        _ => return Err(Error::InvalidArgument("dist needs a single --t".to_string())),
    };
    let limits = ctx.limits();
    let law = match a.parts {
        Some(parts) => walk_sum_distribution_seq_with_limits(&GraphSequence::with_independent_cuts(&chain, t, parts)?, limits)?,
        None => walk_sum_distribution_with_limits(&chain, t, limits)?,
    };
    emit_text(ctx.out(&a.output).as_deref(), &law.to_csv())?;
    if let Some(path) = a.char_out.or_else(|| ctx.cfg.output.char_out.clone()) {
        let center = chain.label_weights().1 * t as f64;
        write_atomic(&path, char_fn_csv(&law, center, &ctx.thetas(a.theta_points)?)?.as_bytes())?;
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct DistanceRow {
    t: usize,
    tv: f64,
    l1: f64,
    l2: f64,
    kolmogorov: f64,
}

#[derive(Serialize)]
struct DistanceReport {
    instance: String,
    against: String,
    rows: Vec<DistanceRow>,
}

/// Discrete normal matched to `chain`, or the configured family when one is given.
fn matched_family(ctx: &Ctx, chain: &LabeledChain) -> Result<StickyFamily> {
    let p = ctx
        .cfg
        .family
        .p
        .map(|[p0, p1]| (p0, p1))
        .unwrap_or_else(|| chain.label_weights());
    let sigma2 = match ctx.cfg.family.sigma2 {
        Some(s) => s,
        None => asymptotic_variance_series(chain, ctx.cfg.tolerances.series_tol.unwrap_or(1e-15))?.sigma2,
    };
    StickyFamily::new(p, sigma2)
}

fn cmd_tv(ctx: &Ctx, a: TvArgs) -> Result<Outcome> {
    let (name, chain) = ctx.chain(&a.instance)?;
    let t_list = ctx.t_list(a.t.as_deref(), &[16, 64, 256])?;
    let reference: Box<dyn Fn(usize) -> Result<IntegerDistribution>> = match a.against.as_str() {
        "binomial" => {
            let p1 = chain.label_weights().1;
            Box::new(move |t| binomial(t, p1))
        }
        "dn" => {
            let family = matched_family(ctx, &chain)?;
            Box::new(move |t| dn_distribution(&family, t))
        }
        other => {
            let other = parse_graph(other, None)?;
            Box::new(move |t| walk_sum_distribution_with_limits(&other, t, DpLimits::default()))
        }
    };
    let mut rows = Vec::new();
    for &t in &t_list {
        let walk = walk_sum_distribution_with_limits(&chain, t, ctx.limits())?;
        let r = reference(t)?;
        let (l1, l2) = lp_distances(&walk, &r);
        rows.push(DistanceRow {
            t,
            tv: tv_distance(&walk, &r),
            l1,
            l2,
            kolmogorov: kolmogorov_distance(&walk, &r),
        });
    }
    emit_json(
        ctx.out(&a.output).as_deref(),
        &DistanceReport {
            instance: name,
            against: a.against,
            rows,
        },
    )?;
    Ok(Outcome::Pass)
}

fn cmd_sigma2(ctx: &Ctx, a: Sigma2Args) -> Result<Outcome> {
    let (_, chain) = ctx.chain(&a.instance)?;
    let tol = a.tol.or(ctx.cfg.tolerances.series_tol).unwrap_or(DEFAULT_TOL);
    let t_list = ctx.t_list(a.t.as_deref(), &[])?;
    let report = if t_list.is_empty() {
        let s = asymptotic_variance_series(&chain, tol)?;
        VarianceReport {
            sigma2: s.sigma2,
            error_bound: s.error_bound,
            truncation_index: s.truncation_index,
            lambda: s.lambda,
            rows: Vec::new(),
        }
    } else {
        variance_convergence_report(&chain, &t_list, tol)?
    };
    emit_json(ctx.out(&a.output).as_deref(), &report)?;
    Ok(Outcome::from_pass(report.passed()))
}

fn parse_p(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|e| Error::Parse(format!("p `{s}`: {e}"))))
        .collect::<Result<_>>()?;
    match parts[..] {
        [p0, p1] => Ok((p0, p1)),
        _ => Err(Error::Parse(format!("p `{s}`: expected P0,P1"))),
    }
}

fn cmd_axioms(ctx: &Ctx, a: AxiomsArgs) -> Result<Outcome> {
    let p = match (&a.p, ctx.cfg.family.p) {
        (Some(s), _) => parse_p(s)?,
        (None, Some([p0, p1])) => (p0, p1),
        (None, None) => (0.5, 0.5),
    };
    let sigma2 = a
        .sigma2
        .or(ctx.cfg.family.sigma2)
        .ok_or_else(|| Error::InvalidArgument("axioms needs --sigma2".to_string()))?;
    let family = StickyFamily::new(p, sigma2)?;
    let mut plan = AxiomPlan::new(ctx.t_list(a.t.as_deref(), &[8, 32, 128])?);
    if let Some(parts) = &ctx.cfg.grids.partitions {
        let mut by_t: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for part in parts {
            by_t.entry(part.iter().sum()).or_default().push(part.clone());
        }
        plan.partitions = by_t;
    }
    if let Some(grid) = &ctx.cfg.grids.a {
        plan.a_grid = plan.t_list.iter().map(|&t| (t, grid.clone())).collect();
    }
    plan.theta_grid = Some(ctx.thetas(a.theta_points)?);
    let report = check_axioms(&family, &plan)?;
    for f in report.failures() {
        log::warn!("condition {} fails at t={}: lhs={} rhs={}", f.condition, f.t, f.lhs, f.rhs);
    }
    emit_json(ctx.out(&a.output).as_deref(), &report)?;
    Ok(Outcome::from_pass(report.passed()))
}

fn default_cutoffs(t: usize) -> Vec<f64> {
    let r = (t as f64).sqrt();
    vec![0.0, r, 2.0 * r]
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|e| Error::Parse(format!("list `{s}`: {e}"))))
        .collect()
}

fn emit_reports(ctx: &Ctx, output: &Output, reports: &[CheckReport]) -> Result<Outcome> {
    emit_json(ctx.out(output).as_deref(), &reports)?;
    Ok(Outcome::from_pass(reports.iter().all(CheckReport::passed)))
}

fn cmd_difftail(ctx: &Ctx, a: DifftailArgs) -> Result<Outcome> {
    let (name, chain) = ctx.chain(&a.instance)?;
    let t_list = ctx.t_list(a.t.as_deref(), &[32, 128])?;
    let fixed_c = match &a.c {
        Some(s) => Some(parse_f64_list(s)?),
        None => ctx.cfg.grids.c.clone(),
    };
    let mut reports = Vec::new();
    for &t in &t_list {
        let c_list = fixed_c.clone().unwrap_or_else(|| default_cutoffs(t));
        let report = if a.independent {
            verify_difftail_j(&chain, t, &c_list)?
        } else {
            let seq = GraphSequence::constant(&chain, t)?;
            let step = a.step.unwrap_or(seq.steps().len() / 2);
            let swapped = seq.replace_step(step, chain.independent_step())?;
            verify_difftail(&seq, &swapped, step, &c_list)?
        };
        reports.push(report.with_instance(name.clone()));
    }
    emit_reports(ctx, &a.output, &reports)
}

fn cmd_smooth(ctx: &Ctx, a: SmoothArgs) -> Result<Outcome> {
    let (name, chain) = ctx.chain(&a.instance)?;
    let thetas = ctx.thetas(a.theta_points)?;
    let reports = ctx
        .t_list(a.t.as_deref(), &[16, 64, 256])?
        .into_iter()
        .map(|t| Ok(verify_smooth(&chain, t, &thetas)?.with_instance(name.clone())))
        .collect::<Result<Vec<_>>>()?;
    emit_reports(ctx, &a.output, &reports)
}

fn tv_series(report: &CheckReport) -> Vec<(f64, f64)> {
    report
        .rows
        .iter()
        .map(|r| (r.params["t"], r.lhs))
        .collect()
}

fn tv_plot_spec(title: &str) -> PlotSpec {
    PlotSpec {
        title: title.to_string(),
        x_label: "t".to_string(),
        y_label: "total variation".to_string(),
        log_x: true,
        log_y: true,
    }
}

fn cmd_main_bound(ctx: &Ctx, a: MainBoundArgs) -> Result<Outcome> {
    let (name, chain) = ctx.chain(&a.instance)?;
    let t_list = ctx.t_list(a.t.as_deref(), &[16, 64, 256, 512])?;
    let report = verify_main_bound(&chain, &t_list)?.with_instance(name);
    if let Some(path) = ctx.plot(&a.plot) {
        let lambda = spectral_expansion(&chain)?;
        let reference = t_list.iter().map(|&t| (t as f64, lambda / (t as f64).sqrt())).collect();
        let series = [Series::new("tv", tv_series(&report)), Series::new("lambda/sqrt(t)", reference)];
        emit_plot(&series, &tv_plot_spec("walk sum vs discrete normal"), &path)?;
    }
    emit_reports(ctx, &a.output, std::slice::from_ref(&report))
}

#[derive(Serialize)]
struct RateReport {
    instance: String,
    lambda: f64,
    fit: crate::verify::RateFit,
}

fn cmd_rate(ctx: &Ctx, a: RateArgs) -> Result<Outcome> {
    let (name, chain) = ctx.chain(&a.instance)?;
    let t_list = ctx.t_list(a.t.as_deref(), &[16, 32, 64, 128, 256, 512])?;
    let family = matched_family(ctx, &chain)?;
    let mut points = Vec::with_capacity(t_list.len());
    for &t in &t_list {
        let walk = walk_sum_distribution_with_limits(&chain, t, ctx.limits())?;
        points.push((t as f64, tv_distance(&walk, &dn_distribution(&family, t)?)));
    }
    let fit = fit_decay_rate(&points)?;
    if let Some(path) = ctx.plot(&a.plot) {
        let line = points
            .iter()
            .map(|&(t, _)| (t, (fit.intercept + fit.slope * t.ln()).exp()))
            .collect();
        let series = [Series::new("tv", points.clone()), Series::new(format!("fit slope {:.3}", fit.slope), line)];
        emit_plot(&series, &tv_plot_spec("total-variation decay"), &path)?;
    }
    let lambda = spectral_expansion(&chain)?;
    emit_json(
        ctx.out(&a.output).as_deref(),
        &RateReport {
            instance: name,
            lambda,
            fit,
        },
    )?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct OracleRow {
    t: usize,
    max_abs_diff: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SamplingRow {
    t: usize,
    samples: usize,
    seed: u64,
    tv: f64,
    /// Three times the bound `0.5 sqrt((t + 1) / samples)` on the expected empirical TV.
    threshold: f64,
    pass: bool,
}

#[derive(Serialize)]
struct OracleReport {
    instance: String,
    tolerance: f64,
    enumeration: Vec<OracleRow>,
    sampling: SamplingRow,
}

fn max_abs_diff(a: &IntegerDistribution, b: &IntegerDistribution) -> f64 {
    let lo = a.offset().min(b.offset());
    let hi = a.max_point().max(b.max_point());
    (lo..=hi).map(|j| (a.prob(j) - b.prob(j)).abs()).fold(0.0, f64::max)
}

fn cmd_oracle(ctx: &Ctx, a: OracleArgs) -> Result<Outcome> {
    let (name, chain) = ctx.chain(&a.instance)?;
    let limits = ctx.limits();
    let mut enumeration = Vec::new();
    for t in 1..=a.t_max {
        if (chain.n() as f64).powi(t as i32) > BRUTE_FORCE_MAX_PATHS {
            log::warn!("stopping enumeration at t={t}: {}^{t} paths", chain.n());
            break;
        }
        let d = max_abs_diff(
            &walk_sum_distribution_with_limits(&chain, t, limits)?,
            &brute_force_walk_sum(&chain, t)?,
        );
        enumeration.push(OracleRow {
            t,
            max_abs_diff: d,
            pass: d <= ORACLE_TOL,
        });
    }
    let samples = a.samples.or(ctx.cfg.instance.samples).unwrap_or(100_000);
    let seed = a
        .seed
        .or(ctx.cfg.instance.seed)
        .ok_or_else(|| Error::InvalidArgument("oracle-check needs --seed".to_string()))?;
    let t = a.sample_t;
    let empirical = empirical_distribution(&sample_walk_sum(&chain, t, seed, samples)?)?;
    let tv = tv_distance(&walk_sum_distribution_with_limits(&chain, t, limits)?, &empirical);
    let threshold = 1.5 * ((t + 1) as f64 / samples as f64).sqrt();
    let report = OracleReport {
        instance: name,
        tolerance: ORACLE_TOL,
        sampling: SamplingRow {
            t,
            samples,
            seed,
            tv,
            threshold,
            pass: tv <= threshold,
        },
        enumeration,
    };
    let pass = report.sampling.pass && report.enumeration.iter().all(|r| r.pass);
    emit_json(ctx.out(&a.output).as_deref(), &report)?;
    Ok(Outcome::from_pass(pass))
}
