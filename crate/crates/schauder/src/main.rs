use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use schauder::config::Config;
use schauder::error::{Error, Result};
use schauder::{io, report, runner};
use schauder_core::coeff_bounds::{construct_weights, probe_coefficients};
use schauder_core::harness::{ExperimentConfig, GermKind, ProbeKind};
use schauder_core::liouville::{continuum_kernel_dim, polynomial_kernel, symbol_zero_search};
use schauder_core::norms::{self, TestFunctionFamily};
use schauder_core::ops::{is_discretely_elliptic, DiffOperator, Verdict};
use schauder_core::{DistGerm, Scaling};

/// Germ semi-norms, symbols, Liouville kernels and Schauder probes on
/// anisotropic lattices.
#[derive(Debug, Parser)]
#[command(name = "schauder", version)]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for ensemble runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a germ semi-norm on a tabulated germ.
    Norm(NormArgs),
    /// Discrete and continuum symbol at one frequency.
    Symbol(SymbolArgs),
    /// Ellipticity verdict from the discrete and continuum symbols.
    Ellipticity(EllipticityArgs),
    /// Polynomial kernel and nonzero symbol zeros.
    Liouville(LiouvilleArgs),
    /// Weight system for polynomial coefficient bounds, optionally probing a germ.
    Weights(WeightsArgs),
    /// Ensemble probe of the Schauder estimate.
    Probe(ProbeArgs),
    /// McShane extension of a Hölder function given on part of a window.
    Extend(ExtendArgs),
}

#[derive(Debug, Args)]
struct OperatorArgs {
    /// laplacian, heat, cauchy-riemann or eps-degenerate.
    #[arg(long, conflicts_with = "operator_file")]
    preset: Option<String>,

    /// Operator in the text format (header `d=.. s=.. m=..`, one term per line).
    #[arg(long)]
    operator_file: Option<PathBuf>,

    /// Dimension for presets (time counts for heat).
    #[arg(long)]
    dim: Option<usize>,
}

impl OperatorArgs {
    fn resolve(&self, cfg: Option<&Config>) -> Result<DiffOperator> {
        let preset = match &self.preset {
            Some(p) => Some(p.clone()),
            None if self.operator_file.is_none() => cfg.map(|c| c.get::<String>("preset")).transpose()?.flatten(),
            None => None,
        };
        let file = self
            .operator_file
            .clone()
            .or(cfg.map(|c| c.get::<PathBuf>("operator-file")).transpose()?.flatten());
        let dim = match self.dim {
            Some(d) => d,
            None => cfg.map(|c| c.get::<usize>("dim")).transpose()?.flatten().unwrap_or(2),
        };
        match (preset, file) {
            (Some(p), _) => Ok(DiffOperator::preset(&p, dim)?),
            (None, Some(f)) => io::read_operator(&f),
            (None, None) => Err(Error::Validation("operator: give --preset or --operator-file".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormKind {
    #[value(name = "G-eta")]
    GEta,
    #[value(name = "G-eta-alpha")]
    GEtaAlpha,
    #[value(name = "G-gamma")]
    GGamma,
    #[value(name = "G-eta-local")]
    GEtaLocal,
    #[value(name = "G-eta-alpha-local")]
    GEtaAlphaLocal,
    #[value(name = "G-gamma-local")]
    GGammaLocal,
    #[value(name = "sup-below")]
    SupBelow,
}

#[derive(Debug, Args)]
struct NormArgs {
    #[arg(long, value_enum, ignore_case = true)]
    kind: NormKind,

    /// Germ table (distribution germ for the G-gamma kinds).
    #[arg(long)]
    germ: PathBuf,

    #[arg(long)]
    eta: Option<f64>,

    #[arg(long)]
    alpha: Option<f64>,

    /// Negative exponent for the G-gamma kinds.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,

    /// Radius of the locally uniform kinds.
    #[arg(long)]
    radius: Option<f64>,

    /// Scales λ for the G-gamma kinds (default: ε·2^{i/2} up to the window radius).
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,

    /// Also write the report here (CSV when the name ends in .csv, JSON otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SymbolArgs {
    #[command(flatten)]
    op: OperatorArgs,

    #[arg(long, default_value_t = 1.0)]
    eps: f64,

    /// Frequency, comma-separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    theta: Vec<f64>,
}

#[derive(Debug, Args)]
struct EllipticityArgs {
    #[command(flatten)]
    op: OperatorArgs,

    #[arg(long, default_value_t = 1.0)]
    eps: f64,

    /// Grid points per axis of the symbol scan.
    #[arg(long, default_value_t = 64)]
    resolution: usize,
}

#[derive(Debug, Args)]
struct LiouvilleArgs {
    #[command(flatten)]
    op: OperatorArgs,

    #[arg(long, default_value_t = 1.0)]
    eps: f64,

    #[arg(long)]
    eta: f64,

    /// Grid points per axis of the zero search.
    #[arg(long, default_value_t = 64)]
    resolution: usize,
}

#[derive(Debug, Args)]
struct WeightsArgs {
    /// Anisotropic scaling, e.g. 2,1.
    #[arg(long, value_delimiter = ',', required = true)]
    scaling: Vec<u32>,

    #[arg(long)]
    eta: f64,

    #[arg(long, default_value_t = 0.1)]
    delta: f64,

    /// Germ whose polynomial coefficients are probed at (x, y).
    #[arg(long, requires_all = ["x", "y"])]
    germ: Option<PathBuf>,

    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x: Option<Vec<i64>>,

    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    y: Option<Vec<i64>>,

    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProbeChoice {
    Schauder,
    Ivp,
    Local,
}

#[derive(Debug, Args)]
struct ProbeArgs {
    #[command(flatten)]
    op: OperatorArgs,

    /// key = value file; explicit flags win over its entries.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, value_enum)]
    kind: Option<ProbeChoice>,

    #[arg(long)]
    eta: Option<f64>,

    #[arg(long)]
    alpha: Option<f64>,

    /// Window half-width in lattice points.
    #[arg(long)]
    window: Option<i64>,

    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,

    #[arg(long)]
    ensemble: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// jet or frozen-coefficient.
    #[arg(long)]
    germ_kind: Option<String>,

    #[arg(long)]
    amplitude: Option<f64>,

    /// Fraction of the window carrying the source and the base points.
    #[arg(long)]
    support: Option<f64>,

    /// Time steps of the ivp probe.
    #[arg(long)]
    horizon: Option<i64>,

    /// Radius of the local probe.
    #[arg(long)]
    rho: Option<f64>,

    /// Grid resolution of the ellipticity precheck.
    #[arg(long)]
    resolution: Option<usize>,

    /// Accept integer eta or alpha.
    #[arg(long)]
    allow_integer: bool,

    /// CSV with one row per (member, eps).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExtendArgs {
    /// Field file listing the values on the domain D.
    #[arg(long)]
    field: PathBuf,

    #[arg(long)]
    alpha: f64,

    /// Hölder bound M (default: the constant of the data).
    #[arg(long)]
    bound: Option<f64>,

    /// Extended field (all window points).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn need(v: Option<f64>, flag: &str, kind: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Validation(format!("--{flag} is required for --kind {kind}")))
}

fn emit(json_mode: bool, value: &Value, text: &str) {
    if json_mode {
        println!("{value}");
    } else {
        print!("{text}");
    }
}

fn norm(a: &NormArgs, json_mode: bool) -> Result<()> {
    let kind = a.kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let u = io::read_germ(&a.germ)?;
    let family = |gamma: f64| -> Result<TestFunctionFamily> {
        let fam = TestFunctionFamily::for_gamma(u.scaling(), gamma)?;
        Ok(match &a.lambda {
            Some(grid) => fam.with_lambda_grid(grid.clone())?,
            None => fam,
        })
    };
    let rep = match a.kind {
        NormKind::GEta => norms::norm_g_eta(&u, need(a.eta, "eta", &kind)?)?,
        NormKind::GEtaLocal => norms::norm_g_eta_local(&u, need(a.eta, "eta", &kind)?, need(a.radius, "radius", &kind)?)?,
        NormKind::GEtaAlpha => {
            norms::seminorm_g_eta_alpha(&u, need(a.eta, "eta", &kind)?, need(a.alpha, "alpha", &kind)?)?
        }
        NormKind::GEtaAlphaLocal => norms::seminorm_g_eta_alpha_local(
            &u,
            need(a.eta, "eta", &kind)?,
            need(a.alpha, "alpha", &kind)?,
            need(a.radius, "radius", &kind)?,
        )?,
        NormKind::GGamma => {
            let g = need(a.gamma, "gamma", &kind)?;
            norms::seminorm_g_gamma(&DistGerm(u.clone()), g, &family(g)?)?
        }
        NormKind::GGammaLocal => {
            let g = need(a.gamma, "gamma", &kind)?;
            norms::seminorm_g_gamma_local(&DistGerm(u.clone()), g, &family(g)?, need(a.radius, "radius", &kind)?)?
        }
        NormKind::SupBelow => norms::sup_below(&u, need(a.radius, "radius", &kind)?)?,
    };
    let value = report::norm_json(&rep);
    if let Some(out) = &a.out {
        let text = if out.extension().is_some_and(|e| e == "csv") {
            format!("{}\n{}\n", report::NORM_CSV_HEADER, report::norm_csv_row(&rep))
        } else {
            format!("{value}\n")
        };
        io::write_text(out, &text)?;
    }
    let text = format!(
        "{} = {:e}\nwitness: {}\nwindow-restricted (eps = {}, lo = {:?}, hi = {:?})\n",
        rep.name,
        rep.value,
        report::witness_json(&rep.witness),
        rep.window.eps(),
        rep.window.lo(),
        rep.window.hi()
    );
    emit(json_mode, &value, &text);
    Ok(())
}

fn symbol(a: &SymbolArgs, json_mode: bool) -> Result<()> {
    let op = a.op.resolve(None)?;
    if a.theta.len() != op.dim() {
        return Err(Error::Validation(format!("--theta needs {} entries, got {}", op.dim(), a.theta.len())));
    }
    if !(a.eps > 0.0) {
        return Err(Error::Validation("--eps must be positive".into()));
    }
    let disc = op.discrete_symbol(a.eps, &a.theta);
    let cont = op.continuum_symbol(&a.theta);
    let value = json!({
        "theta": a.theta,
        "eps": a.eps,
        "discrete": [disc.re, disc.im],
        "continuum": [cont.re, cont.im],
        "discrete_magnitude": op.discrete_magnitude(a.eps, &a.theta),
        "continuum_magnitude": op.continuum_magnitude(&a.theta),
    });
    let text = format!("discrete symbol: {disc}\ncontinuum symbol: {cont}\n");
    emit(json_mode, &value, &text);
    Ok(())
}

fn ellipticity(a: &EllipticityArgs, json_mode: bool) -> Result<()> {
    let op = a.op.resolve(None)?;
    if !(a.eps > 0.0) {
        return Err(Error::Validation("--eps must be positive".into()));
    }
    let rep = is_discretely_elliptic(&op, a.eps, a.resolution);
    let mut text = format!("verdict: {}\n", rep.overall.as_str());
    for (name, c) in [("continuum", &rep.continuum), ("discrete", &rep.discrete)] {
        let line = match c.verdict {
            Verdict::NotElliptic => {
                format!("{name} symbol vanishes: |symbol| = {:e} at {:?}\n", c.symbol.norm(), c.witness)
            }
            v => format!("{name}: {} with margin {:e} (grid modulus {:e})\n", v.as_str(), c.min_ratio, c.modulus),
        };
        text.push_str(&line);
    }
    emit(json_mode, &report::ellipticity_json(&rep), &text);
    Ok(())
}

fn liouville(a: &LiouvilleArgs, json_mode: bool) -> Result<()> {
    let op = a.op.resolve(None)?;
    let kb = polynomial_kernel(&op, a.eps, a.eta)?;
    let cont = continuum_kernel_dim(&op, a.eta);
    let zeros = symbol_zero_search(&op, a.eps, a.resolution)?;
    let value = json!({
        "kernel": report::kernel_json(&kb),
        "continuum_dim": cont,
        "zeros": zeros.iter().map(report::zero_json).collect::<Vec<_>>(),
    });
    let mut text = format!("kernel dimension {} (continuum {cont}) at eta = {}\n", kb.dim(), a.eta);
    if zeros.is_empty() {
        text.push_str("no nonzero symbol zeros found\n");
    }
    for z in &zeros {
        text.push_str(&format!("zero at theta = {:?} (residual {:e}, verified {})\n", z.theta, z.residual, z.verified));
    }
    emit(json_mode, &value, &text);
    Ok(())
}

fn weights(a: &WeightsArgs, json_mode: bool) -> Result<()> {
    let s = Scaling::new(a.scaling.clone())?;
    let w = construct_weights(&s, a.eta, a.delta)?;
    let mut value = report::weights_json(&w);
    let mut text = format!("worst ratio {:e} (verified {})\n", w.worst_ratio(), w.verify());
    for (i, b) in w.indices.iter().enumerate() {
        text.push_str(&format!("beta {:?}: kappa {} rho {:?}\n", b.entries(), w.kappa[i], w.rho[i]));
    }
    if let (Some(g), Some(x), Some(y)) = (&a.germ, &a.x, &a.y) {
        let u = io::read_germ(g)?;
        if u.scaling() != &s {
            return Err(Error::Validation("--scaling differs from the germ's scaling".into()));
        }
        let p = probe_coefficients(&u, x, y, a.eta, a.alpha, &w)?;
        text.push_str(&format!("probe residual {:e}\n", p.residual));
        for ((b, c), r) in p.coefficients.iter().zip(&p.ratios) {
            text.push_str(&format!("nu {:?} = {c} (ratio {r:e})\n", b.entries()));
        }
        value["probe"] = report::probe_report_json(&p);
    }
    emit(json_mode, &value, &text);
    Ok(())
}

const PROBE_KEYS: &[&str] = &[
    "preset",
    "operator-file",
    "dim",
    "kind",
    "eta",
    "alpha",
    "window",
    "eps",
    "ensemble",
    "seed",
    "germ-kind",
    "amplitude",
    "support",
    "horizon",
    "rho",
    "resolution",
    "allow-integer",
    "threads",
];

fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: Option<&Config>, key: &str) -> Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => Ok(cfg.map(|c| c.get(key)).transpose()?.flatten()),
    }
}

fn probe(a: &ProbeArgs, json_mode: bool, threads: Option<usize>) -> Result<()> {
    let cfg_file = a.config.as_deref().map(Config::load).transpose()?;
    let cf = cfg_file.as_ref();
    if let Some(c) = cf {
        let bad = c.unknown_keys(PROBE_KEYS);
        if !bad.is_empty() {
            return Err(Error::Validation(format!("config: unknown keys {}", bad.join(", "))));
        }
    }
    let op = a.op.resolve(cf)?;
    let eta = pick(a.eta, cf, "eta")?.ok_or_else(|| Error::Validation("--eta is required".into()))?;
    let alpha = pick(a.alpha, cf, "alpha")?.ok_or_else(|| Error::Validation("--alpha is required".into()))?;
    let mut cfg = ExperimentConfig::new(op, eta, alpha);
    if let Some(v) = pick(a.window, cf, "window")? {
        cfg.radius = v;
    }
    let eps = match &a.eps {
        Some(v) => Some(v.clone()),
        None => cf.map(|c| c.list::<f64>("eps")).transpose()?.flatten(),
    };
    if let Some(v) = eps {
        cfg.eps_list = v;
    }
    if let Some(v) = pick(a.ensemble, cf, "ensemble")? {
        cfg.ensemble = v;
    }
    if let Some(v) = pick(a.seed, cf, "seed")? {
        cfg.seed = v;
    }
    if let Some(v) = pick(a.germ_kind.clone(), cf, "germ-kind")? {
        cfg.germ = GermKind::parse(&v)?;
    }
    if let Some(v) = pick(a.amplitude, cf, "amplitude")? {
        cfg.amplitude = v;
    }
    if let Some(v) = pick(a.support, cf, "support")? {
        cfg.support = v;
    }
    if let Some(v) = pick(a.horizon, cf, "horizon")? {
        cfg.horizon = v;
    }
    if let Some(v) = pick(a.resolution, cf, "resolution")? {
        cfg.resolution = v;
    }
    cfg.allow_integer = a.allow_integer || pick(None, cf, "allow-integer")?.unwrap_or(false);
    let threads = pick(threads, cf, "threads")?;
    let kind_name = match a.kind {
        Some(k) => k.to_possible_value().map(|v| v.get_name().to_string()),
        None => pick(None, cf, "kind")?,
    };
    let kind = match kind_name.as_deref().unwrap_or("schauder") {
        "schauder" => ProbeKind::Schauder,
        "ivp" => ProbeKind::InitialValue,
        "local" => ProbeKind::Local {
            rho: pick(a.rho, cf, "rho")?.ok_or_else(|| Error::Validation("--rho is required for --kind local".into()))?,
        },
        other => return Err(Error::Validation(format!("kind: unknown probe '{other}' (schauder, ivp, local)"))),
    };
    let out = runner::run_probe(&cfg, kind, threads)?;
    if let Some(path) = &a.out {
        io::write_text(path, &report::ratio_csv(&out.reports))?;
    }
    let value = json!({
        "label": out.label,
        "summary": out.summary.iter().map(report::summary_json).collect::<Vec<_>>(),
        "reports": if a.out.is_some() { Value::Null } else { out.reports.iter().map(report::ratio_json).collect() },
    });
    let mut text = format!("{} ratios (LHS / RHS)\n", out.label);
    for s in &out.summary {
        text.push_str(&format!(
            "eps {}: n = {}, flagged = {}, max = {:e}, median = {:e}, min = {:e}\n",
            s.eps, s.count, s.flagged, s.max, s.median, s.min
        ));
    }
    emit(json_mode, &value, &text);
    Ok(())
}

fn extend(a: &ExtendArgs, json_mode: bool) -> Result<()> {
    let (f, mask) = io::read_field(&a.field)?;
    if f.values().iter().any(|v| v.im != 0.0) {
        return Err(Error::Validation("field: extension needs real values (im = 0)".into()));
    }
    let m = match a.bound {
        Some(m) => m,
        None => norms::holder_constant(&f, &mask, a.alpha)?,
    };
    let g = norms::mcshane_extend(&f, &mask, a.alpha, m)?;
    let all = vec![true; g.window().len()];
    let after = norms::holder_constant(&g, &all, a.alpha)?;
    if let Some(out) = &a.out {
        io::write_text(out, &io::field_to_string(&g, None))?;
    }
    let value = json!({
        "alpha": a.alpha,
        "bound": m,
        "extended_constant": after,
        "domain_points": mask.iter().filter(|b| **b).count(),
        "window_points": mask.len(),
        "values": if a.out.is_some() { Value::Null } else { g.values().iter().map(|v| v.re).collect() },
    });
    let mut text = format!("bound {m:e}, extension constant {after:e}\n");
    if a.out.is_none() {
        text.push_str(&io::field_to_string(&g, None));
    }
    emit(json_mode, &value, &text);
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Norm(a) => norm(a, cli.json),
        Command::Symbol(a) => symbol(a, cli.json),
        Command::Ellipticity(a) => ellipticity(a, cli.json),
        Command::Liouville(a) => liouville(a, cli.json),
        Command::Weights(a) => weights(a, cli.json),
        Command::Probe(a) => probe(a, cli.json, cli.threads),
        Command::Extend(a) => extend(a, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
