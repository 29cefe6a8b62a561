//! Command-line front end. Exit codes: 0 success, 2 input error, 3 numerical
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use crate::data::io::{self, Diagnostic, FitTable};
use crate::data::{generate_panel, generate_quotes, panel_events, DgpConfig, QuoteOptions};
use crate::econometrics::{
    correlation_matrix, default_break_date, esg_by_industry, fit_specification, prepare_panel, quintile_characteristics,
    summary_statistics, PanelDataset, PrepareOptions, SpecName,
};
use crate::equilibrium::{
    asymmetry_condition, calibration_report, differential_report, parse_grid, sensitivity_sweep, ModelParams,
    PricingRule, THETA_HIGH, THETA_LOW,
};
use crate::error::{Error, Result};
use crate::report::{render_csv_rows, render_markdown, ReportStyle};
use crate::surprise::{
    extract_surprises, subperiod_stability, surprise_summary, Extraction, PcaBasis, PcaOptions, SubperiodRow,
    SurpriseSummary, INSTRUMENTS, LATE_MONTH_THRESHOLD,
};

/// Directory searched for `model.cfg` and `dgp.cfg` when no file is given.
pub const CONFIG_DIR_ENV: &str = "MPESG_CONFIG_DIR";

#[derive(Debug, Parser)]
#[command(name = "mpesg", version, about = "Policy surprises, ESG pricing model and event-study panels")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Futures and Treasury quotes to target/path surprises plus diagnostics.
    ExtractSurprises(ExtractArgs),
    /// Prices, sensitivities and high-vs-low ESG differentials.
    Calibrate(CalibrateArgs),
    /// Differentials over a grid of one model parameter.
    Sweep(SweepArgs),
    /// Synthetic firm-event panel and its surprises.
    SimulatePanel(SimulateArgs),
    /// Estimate named specifications with event-clustered errors.
    Fit(FitArgs),
    /// Side-by-side coefficient tables from fit files.
    Report(ReportArgs),
    /// Summary, industry, correlation and quintile tables of a panel.
    Describe(DescribeArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub quotes: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Diagnostics CSV; defaults to `<out stem>_diagnostics.csv`.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
    #[arg(long, default_value = "correlation")]
    pub pca_basis: PcaBasis,
    #[arg(long, default_value_t = LATE_MONTH_THRESHOLD)]
    pub late_month_threshold: u32,
    /// Split date for the pre/post surprise summary.
    #[arg(long, default_value_t = default_break_date())]
    pub break_date: NaiveDate,
    /// Window boundaries for the subperiod stability table.
    #[arg(long, value_delimiter = ',', default_value = "2008-01-01,2015-01-01,2020-01-01")]
    pub subperiod_breaks: Vec<NaiveDate>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Model parameters (TOML); defaults to `$MPESG_CONFIG_DIR/model.cfg`, then the baseline.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.25,0.5,0.75,0.9,1")]
    pub thetas: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "market_clearing")]
    pub pricing_rule: PricingRule,
    /// Surprise size for the impact columns, in basis points.
    #[arg(long, default_value_t = 25.0)]
    pub surprise_bp: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Parameter to vary (A, kappa, gamma, mu, alpha, lambda, sigma_D, r_f, psi).
    #[arg(long)]
    pub vary: String,
    /// `start:end:count` or a comma-separated list.
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "market_clearing")]
    pub pricing_rule: PricingRule,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Generator settings (TOML); defaults to `$MPESG_CONFIG_DIR/dgp.cfg`, then built-in defaults.
    #[arg(long)]
    pub dgp: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Surprise CSV; defaults to `<out stem>_surprises.csv`.
    #[arg(long)]
    pub surprises_out: Option<PathBuf>,
    /// Also write synthetic futures/Treasury quotes implied by the surprises.
    #[arg(long)]
    pub quotes_out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub panel: PathBuf,
    #[arg(long)]
    pub surprises: PathBuf,
    /// Specification name; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',', required = true)]
    pub spec: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = default_break_date())]
    pub break_date: NaiveDate,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub fits: Vec<PathBuf>,
    #[arg(long)]
    pub style: String,
    /// `.md` for Markdown, anything else for CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    #[arg(long)]
    pub panel: PathBuf,
    #[arg(long)]
    pub surprises: PathBuf,
    /// Long-format CSV of all descriptive tables.
    #[arg(long)]
    pub out: PathBuf,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}.csv"))
}

fn config_file(explicit: &Option<PathBuf>, name: &str) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.clone());
    }
    let p = Path::new(&std::env::var_os(CONFIG_DIR_ENV)?).join(name);
    p.exists().then_some(p)
}

fn load_params(explicit: &Option<PathBuf>) -> Result<ModelParams> {
    match config_file(explicit, "model.cfg") {
        Some(p) => {
            info!("model parameters from {}", p.display());
            ModelParams::load(&p)
        }
        None => Ok(ModelParams::baseline()),
    }
}

/// Long-format diagnostics of an extraction.
pub fn extraction_diagnostics(
    ex: &Extraction,
    subperiods: &[SubperiodRow],
    summary: &SurpriseSummary,
) -> Vec<Diagnostic> {
    let mut d = Vec::new();
    let dec = &ex.decomposition;
    let mut cumulative = 0.0;
    for (i, (&ev, &share)) in dec.eigenvalues.iter().zip(&dec.variance_shares).enumerate() {
        cumulative += share;
        let row = format!("{}", i + 1);
        d.push(Diagnostic::new("eigenvalues", row.clone(), "eigenvalue", ev));
        d.push(Diagnostic::new("eigenvalues", row.clone(), "share", share));
        d.push(Diagnostic::new("eigenvalues", row, "cumulative", cumulative));
    }
    for (i, name) in INSTRUMENTS.iter().enumerate() {
        for j in 0..dec.eigenvectors.ncols() {
            d.push(Diagnostic::new("eigenvectors", *name, &format!("pc{}", j + 1), dec.eigenvectors[(i, j)]));
        }
    }
    for l in &ex.surprises.loadings {
        d.push(Diagnostic::new("loadings", l.instrument, "target", l.target));
        d.push(Diagnostic::new("loadings", l.instrument, "path", l.path));
        d.push(Diagnostic::new("loadings", l.instrument, "r2", l.r2));
    }
    let rot = &ex.surprises.rotation;
    for (r, name) in ["f1", "f2"].iter().enumerate() {
        d.push(Diagnostic::new("rotation", *name, "target", rot[(r, 0)]));
        d.push(Diagnostic::new("rotation", *name, "path", rot[(r, 1)]));
    }
    for s in subperiods {
        d.push(Diagnostic::new("subperiods", s.label.clone(), "n_events", s.n_events as f64));
        d.push(Diagnostic::new("subperiods", s.label.clone(), "first_eigenvalue", s.first_eigenvalue));
        d.push(Diagnostic::new("subperiods", s.label.clone(), "second_eigenvalue", s.second_eigenvalue));
        d.push(Diagnostic::new("subperiods", s.label.clone(), "cumulative_share", s.cumulative_share));
    }
    for series in [&summary.target, &summary.path] {
        for (period, stats) in [("full", series.full), ("pre", series.pre), ("post", series.post)] {
            if let Some(s) = stats {
                for (col, v) in [("n", s.n as f64), ("mean", s.mean), ("sd", s.sd), ("min", s.min), ("max", s.max)] {
                    d.push(Diagnostic::new("summary", format!("{}_{period}", series.name), col, v));
                }
            }
        }
    }
    d.push(Diagnostic::new("events", "accepted", "count", ex.surprises.events.len() as f64));
    d.push(Diagnostic::new("events", "rejected", "count", ex.assembly.rejected.len() as f64));
    d
}

fn extract(a: &ExtractArgs) -> Result<()> {
    let quotes = io::load_quotes(&a.quotes)?;
    let options = PcaOptions {
        basis: a.pca_basis,
        ..PcaOptions::default()
    };
    let ex = extract_surprises(&quotes, a.late_month_threshold, options)?;
    for r in &ex.assembly.rejected {
        warn!("event {} rejected: {}", r.event_id, r.reason);
    }
    let subperiods = match subperiod_stability(&ex.assembly.panel, &a.subperiod_breaks, options) {
        Ok(rows) => rows,
        Err(e @ Error::InsufficientData(_)) => {
            warn!("subperiod table skipped: {e}");
            vec![]
        }
        Err(e) => return Err(e),
    };
    let summary = surprise_summary(&ex.surprises, a.break_date);
    let diagnostics = extraction_diagnostics(&ex, &subperiods, &summary);
    io::save_surprises(&a.out, &io::surprise_rows(&ex.surprises))?;
    io::save_diagnostics(&a.diagnostics.clone().unwrap_or_else(|| sibling(&a.out, "_diagnostics")), &diagnostics)
}

fn calibrate(a: &CalibrateArgs) -> Result<()> {
    let p = load_params(&a.params)?;
    p.validate()?;
    let rows = calibration_report(&p, &a.thetas, a.pricing_rule)?;
    let diff = differential_report(&p, THETA_LOW, THETA_HIGH, a.surprise_bp, a.pricing_rule)?;
    let asym = asymmetry_condition(&p);
    let mut d = Vec::new();
    for r in &rows {
        let key = format!("{}", r.theta);
        d.push(Diagnostic::new("calibration", key.clone(), "price", r.price));
        d.push(Diagnostic::new("calibration", key.clone(), "premium_pct", 100.0 * r.premium));
        d.push(Diagnostic::new("calibration", key.clone(), "target_sensitivity", r.target_sensitivity));
        d.push(Diagnostic::new("calibration", key, "path_sensitivity", r.path_sensitivity));
    }
    let metrics = [
        ("theta_low", diff.theta_low),
        ("theta_high", diff.theta_high),
        ("surprise_bp", diff.surprise_bp),
        ("target_low", diff.target_low),
        ("target_high", diff.target_high),
        ("path_low", diff.path_low),
        ("path_high", diff.path_high),
        ("target_differential", diff.target_differential),
        ("path_differential", diff.path_differential),
        ("asymmetry_ratio", diff.asymmetry_ratio.unwrap_or(f64::NAN)),
        ("target_impact_low_pct", diff.target_impact_low_pct),
        ("target_impact_high_pct", diff.target_impact_high_pct),
        ("path_impact_low_pct", diff.path_impact_low_pct),
        ("path_impact_high_pct", diff.path_impact_high_pct),
        ("target_impact_differential_bp", diff.target_impact_differential_bp),
        ("path_impact_differential_bp", diff.path_impact_differential_bp),
        ("cross_partial_target", diff.cross_partial_target),
        ("cross_partial_path", diff.cross_partial_path),
    ];
    for (k, v) in metrics {
        d.push(Diagnostic::new("differential", k, "value", v));
    }
    d.push(Diagnostic::new("asymmetry", "lhs", "value", asym.lhs));
    d.push(Diagnostic::new("asymmetry", "rhs", "value", asym.rhs));
    d.push(Diagnostic::new("asymmetry", "holds", "value", if asym.holds { 1.0 } else { 0.0 }));
    io::save_diagnostics(&a.out, &d)
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let p = load_params(&a.params)?;
    let grid = parse_grid(&a.grid)?;
    let s = sensitivity_sweep(&p, &a.vary, &grid, a.pricing_rule)?;
    for (v, why) in &s.skipped {
        warn!("{} = {v} skipped: {why}", s.parameter);
    }
    let rows = s
        .rows
        .iter()
        .map(|r| {
            vec![
                s.parameter.clone(),
                format!("{}", r.value),
                format!("{}", r.target_differential),
                format!("{}", r.path_differential),
            ]
        })
        .collect();
    io::save_table(&a.out, &["parameter", "value", "target_differential", "path_differential"], rows)
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let mut cfg = match config_file(&a.dgp, "dgp.cfg") {
        Some(p) => DgpConfig::load(&p)?,
        None => DgpConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let panel = generate_panel(&cfg)?;
    let events = panel_events(&panel);
    let quotes = a.quotes_out.as_ref().map(|_| {
        generate_quotes(
            &events,
            QuoteOptions {
                seed: cfg.seed,
                ..QuoteOptions::default()
            },
        )
    });
    io::save_panel(&a.out, &panel)?;
    io::save_surprises(&a.surprises_out.clone().unwrap_or_else(|| sibling(&a.out, "_surprises")), &events)?;
    if let (Some(path), Some(q)) = (&a.quotes_out, quotes) {
        io::save_quotes(path, &q)?;
    }
    info!("{} firm-event rows", panel.len());
    Ok(())
}

/// Loads and prepares a panel joined with its surprises.
pub fn load_prepared_panel(panel: &Path, surprises: &Path) -> Result<PanelDataset> {
    let events = io::load_surprises(surprises)?;
    let mut data = io::load_panel(panel, &events)?;
    let report = prepare_panel(&mut data, PrepareOptions::default())?;
    for (year, why) in report.skipped_years {
        warn!("ESG scores for {year} left unstandardized: {why}");
    }
    Ok(data)
}

fn fit(a: &FitArgs) -> Result<()> {
    let specs = a.spec.iter().map(|s| s.parse::<SpecName>()).collect::<Result<Vec<_>>>()?;
    let data = load_prepared_panel(&a.panel, &a.surprises)?;
    let industries = data.industries();
    let mut tables = Vec::new();
    for name in specs {
        let mut spec = name.spec(&industries);
        spec.break_date = a.break_date;
        let f = fit_specification(&spec, &data)?;
        let absorbed = f.absorbed();
        if !absorbed.is_empty() {
            info!("{name}: absorbed by fixed effects: {}", absorbed.join(", "));
        }
        tables.push(FitTable::from(&f));
    }
    io::save_fits(&a.out, &tables)
}

fn report(a: &ReportArgs) -> Result<()> {
    let style: ReportStyle = a.style.parse()?;
    let mut fits = Vec::new();
    for p in &a.fits {
        fits.extend(io::load_fits(p)?);
    }
    if a.out.extension().is_some_and(|e| e == "md") {
        io::write_atomic(&a.out, render_markdown(style, &fits)?.as_bytes())
    } else {
        let (header, rows) = render_csv_rows(style, &fits)?;
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        io::save_table(&a.out, &header, rows)
    }
}

fn describe(a: &DescribeArgs) -> Result<()> {
    let data = load_prepared_panel(&a.panel, &a.surprises)?;
    let mut d = Vec::new();
    for r in summary_statistics(&data) {
        for (c, v) in [("n", r.n as f64), ("mean", r.mean), ("sd", r.sd), ("p10", r.p10), ("p50", r.p50), ("p90", r.p90)] {
            d.push(Diagnostic::new("summary", r.variable.clone(), c, v));
        }
    }
    for r in esg_by_industry(&data) {
        for (c, v) in [
            ("firms", r.firms as f64),
            ("coverage_pct", r.coverage_pct),
            ("avg_esg", r.avg_esg),
            ("sd_esg", r.sd_esg),
            ("n_obs", r.n_obs as f64),
        ] {
            d.push(Diagnostic::new("industry", r.industry.clone(), c, v));
        }
    }
    let c = correlation_matrix(&data);
    for (i, row) in c.labels.iter().enumerate() {
        for (j, col) in c.labels.iter().enumerate().take(i + 1) {
            d.push(Diagnostic::new("correlation", row.clone(), col, c.values[i][j]));
        }
    }
    d.push(Diagnostic::new("correlation", "observations", "n", c.n as f64));
    for r in quintile_characteristics(&data) {
        let key = r.quintile.map_or("none".to_string(), |q| format!("Q{q}"));
        for (col, v) in [
            ("avg_return", r.avg_return),
            ("size", r.size),
            ("leverage", r.leverage),
            ("profitability", r.profitability),
            ("n", r.n as f64),
        ] {
            d.push(Diagnostic::new("quintiles", key.clone(), col, v));
        }
    }
    io::save_diagnostics(&a.out, &d)
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::ExtractSurprises(a) => extract(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Sweep(a) => sweep(a),
        Command::SimulatePanel(a) => simulate(a),
        Command::Fit(a) => fit(a),
        Command::Report(a) => report(a),
        Command::Describe(a) => describe(a),
    }
}

pub fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

/// Parses the process arguments, runs the command and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
