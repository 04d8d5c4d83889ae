//! Command-line front end: spectrum tables, verification reports,
//! convergence studies, and non-relativistic-limit sweeps, in CSV or JSON.
//!
//! Exit codes: 0 when every emitted check passes, 1 when any check fails,
//! 2 on invalid input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dirac2d::radial::{self, RadialGrid};
use dirac2d::spectra;
use dirac2d::verifier::{self, CheckContext, ThresholdTable};
use dirac2d::{Grid2D, PhysicalParams, Potential};

#[derive(Parser)]
#[command(name = "dirac2d", version, about = "Conserved operators and spectra of the 2D Dirac equation with equal scalar and vector potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sector table with analytic and numeric bound energies.
    Spectrum(SpectrumArgs),
    /// Run the identity-check suite against the calibrated thresholds.
    Verify(VerifyArgs),
    /// Residuals of the convergence check set across grid sizes.
    Converge(ConvergeArgs),
    /// Non-relativistic-limit sweeps: energy deviations and spinor ratios.
    Nrlimit(NrlimitArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PotentialArg {
    Coulomb,
    Oscillator,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, value_enum)]
    potential: PotentialArg,
    /// Particle mass M (energy units, hbar = c = 1).
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Coulomb strength (Coulomb potential only).
    #[arg(long)]
    k: Option<f64>,
    /// Oscillator angular frequency (oscillator only; exclusive with --stiffness).
    #[arg(long, conflicts_with = "stiffness")]
    omega: Option<f64>,
    /// Oscillator stiffness K = M omega^2 (oscillator only).
    #[arg(long)]
    stiffness: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl CommonArgs {
    fn params(&self) -> Result<PhysicalParams, String> {
        match self.potential {
            PotentialArg::Coulomb => {
                if self.omega.is_some() || self.stiffness.is_some() {
                    return Err("--omega/--stiffness are oscillator parameters".into());
                }
                PhysicalParams::coulomb(self.mass, self.k.unwrap_or(0.2)).map_err(|e| e.to_string())
            }
            PotentialArg::Oscillator => {
                if self.k.is_some() {
                    return Err("--k is a Coulomb parameter".into());
                }
                let omega = match (self.omega, self.stiffness) {
                    (Some(w), None) => w,
                    (None, Some(kk)) => {
                        if kk <= 0.0 {
                            return Err("stiffness must be > 0".into());
                        }
                        (kk / self.mass).sqrt()
                    }
                    (None, None) => 0.1,
                    (Some(_), Some(_)) => unreachable!("clap conflict"),
                };
                PhysicalParams::oscillator(self.mass, omega).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest |m| to include.
    #[arg(long = "m-max", default_value_t = 2)]
    m_max: u32,
    /// Largest radial node count to include.
    #[arg(long = "nr-max", default_value_t = 2)]
    nr_max: u32,
    /// Radial cells for the coarse solve (Richardson refines to 2x).
    #[arg(long = "radial-points", default_value_t = 2000)]
    radial_points: usize,
    /// Fixed outer radius; per-sector default when omitted.
    #[arg(long = "r-max")]
    r_max: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid points per axis.
    #[arg(long = "grid", default_value_t = 256)]
    grid: usize,
    /// Physical box side length.
    #[arg(long = "box", default_value_t = 40.0)]
    box_len: f64,
    #[arg(long = "radial-points", default_value_t = 2000)]
    radial_points: usize,
    /// Compare matrix-free against dense materializations (N <= 32).
    #[arg(long = "dense-crosscheck", default_value_t = false)]
    dense_crosscheck: bool,
    /// Multiply every calibrated threshold (deliberately failing
    /// thresholds exercise the exit-code contract).
    #[arg(long = "threshold-scale", default_value_t = 1.0)]
    threshold_scale: f64,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid sizes; repeat the flag for each size.
    #[arg(long = "grid", num_args = 1.., default_values_t = [64usize, 128, 256])]
    grid: Vec<usize>,
    #[arg(long = "box", default_value_t = 40.0)]
    box_len: f64,
    #[arg(long = "radial-points", default_value_t = 2000)]
    radial_points: usize,
}

#[derive(Args)]
struct NrlimitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Principal level label (Coulomb: odd; oscillator: any).
    #[arg(long)]
    n: Option<u32>,
    /// Sweep values: k (decreasing) for Coulomb, masses (increasing) for
    /// the oscillator.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
    #[arg(long = "radial-points", default_value_t = 1000)]
    radial_points: usize,
}

// --- output plumbing ---------------------------------------------------------

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

struct Table {
    command: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json_records: Vec<serde_json::Value>,
}

impl Table {
    fn new(command: &'static str, header: Vec<&'static str>) -> Self {
        Table { command, header, rows: Vec::new(), json_records: Vec::new() }
    }

    fn push<T: Serialize>(&mut self, csv_row: Vec<String>, record: &T) {
        self.rows.push(csv_row);
        self.json_records
            .push(serde_json::to_value(record).expect("record serialization"));
    }

    fn render(&self, format: FormatArg) -> String {
        match format {
            FormatArg::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            FormatArg::Json => {
                let doc = serde_json::json!({
                    "schema_version": 1,
                    "command": self.command,
                    "records": self.json_records,
                });
                let mut text = serde_json::to_string_pretty(&doc).expect("json output");
                text.push('\n');
                text
            }
        }
    }
}

fn emit(table: &Table, common: &CommonArgs) -> Result<(), String> {
    let text = table.render(common.format);
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

// --- subcommands -------------------------------------------------------------

#[derive(Serialize)]
struct SpectrumRecord {
    potential: String,
    m: i32,
    n_r: u32,
    n: u32,
    #[serde(rename = "E_analytic")]
    e_analytic: f64,
    #[serde(rename = "E_numeric")]
    e_numeric: f64,
    rel_err: f64,
}

fn run_spectrum(args: &SpectrumArgs) -> Result<bool, String> {
    let params = args.common.params()?;
    let mut sectors: Vec<(i32, u32)> = Vec::new();
    for m in -(args.m_max as i32)..=(args.m_max as i32) {
        for n_r in 0..=args.nr_max {
            sectors.push((m, n_r));
        }
    }
    use rayon::prelude::*;
    let mut entries: Vec<SpectrumRecord> = sectors
        .par_iter()
        .map(|&(m, n_r)| {
            let qn = spectra::QuantumNumbers::for_potential(&params.potential, m, n_r);
            let analytic = spectra::sector_energy(&params, &qn).map_err(|e| e.to_string())?;
            let r_max = args.r_max.unwrap_or_else(|| radial::default_r_max(&params, qn.n));
            let grid = RadialGrid::new(args.radial_points, r_max).map_err(|e| e.to_string())?;
            let refined = radial::solve_sector_refined(&params, m, n_r, &grid, 1e-10)
                .map_err(|e| format!("sector (m={m}, n_r={n_r}): {e}"))?;
            Ok(SpectrumRecord {
                potential: params.potential.name().into(),
                m,
                n_r,
                n: qn.n,
                e_analytic: analytic,
                e_numeric: refined.energy,
                rel_err: ((refined.energy - analytic) / analytic).abs(),
            })
        })
        .collect::<Result<_, String>>()?;
    entries.sort_by_key(|a| (a.n, a.m, a.n_r));

    let mut table = Table::new(
        "spectrum",
        vec!["potential", "m", "n_r", "n", "E_analytic", "E_numeric", "rel_err"],
    );
    for e in &entries {
        table.push(
            vec![
                e.potential.clone(),
                e.m.to_string(),
                e.n_r.to_string(),
                e.n.to_string(),
                fmt_float(e.e_analytic),
                fmt_float(e.e_numeric),
                fmt_float(e.rel_err),
            ],
            e,
        );
    }
    emit(&table, &args.common)?;
    Ok(true)
}

#[derive(Serialize)]
struct CheckRecord {
    name: String,
    state: String,
    residual: f64,
    threshold: f64,
    grid: usize,
    pass: bool,
}

fn run_verify(args: &VerifyArgs) -> Result<bool, String> {
    let results = if args.dense_crosscheck {
        let grid = Grid2D::new(args.grid, args.box_len).map_err(|e| e.to_string())?;
        verifier::dense::crosscheck(grid, args.common.seed, 20).map_err(|e| e.to_string())?
    } else {
        let params = args.common.params()?;
        let table = ThresholdTable::bundled()
            .map_err(|e| e.to_string())?
            .with_scale(args.threshold_scale);
        let ctx = CheckContext::build(
            &params,
            args.grid,
            args.box_len,
            args.common.seed,
            args.radial_points,
        )
        .map_err(|e| e.to_string())?;
        verifier::all_checks(&ctx, &table).map_err(|e| e.to_string())?
    };

    let mut table = Table::new(
        "verify",
        vec!["name", "state", "residual", "threshold", "grid", "pass"],
    );
    let mut all_pass = true;
    for r in &results {
        let rec = CheckRecord {
            name: r.name.clone(),
            state: r.state.clone(),
            residual: r.residual,
            threshold: r.threshold,
            grid: r.grid_n,
            pass: r.pass,
        };
        table.push(
            vec![
                rec.name.clone(),
                rec.state.clone(),
                fmt_float(rec.residual),
                fmt_float(rec.threshold),
                rec.grid.to_string(),
                rec.pass.to_string(),
            ],
            &rec,
        );
        if !r.pass {
            all_pass = false;
            eprintln!(
                "failed check {}: residual {:.3e} above threshold {:.3e}",
                r.key(),
                r.residual,
                r.threshold
            );
        }
    }
    emit(&table, &args.common)?;
    Ok(all_pass)
}

#[derive(Serialize)]
struct ConvergenceRecord {
    check: String,
    grid: usize,
    residual: f64,
    ratio: Option<f64>,
}

fn run_converge(args: &ConvergeArgs) -> Result<bool, String> {
    let params = args.common.params()?;
    let keys = verifier::default_convergence_keys(&params.potential);
    let rows = verifier::convergence_study(
        &keys,
        &params,
        &args.grid,
        args.box_len,
        args.common.seed,
        args.radial_points,
    )
    .map_err(|e| e.to_string())?;

    let mut table = Table::new("converge", vec!["check", "grid", "residual", "ratio"]);
    for (key, series) in &rows {
        for row in series {
            let rec = ConvergenceRecord {
                check: key.clone(),
                grid: row.grid_n,
                residual: row.residual,
                ratio: row.ratio,
            };
            table.push(
                vec![
                    rec.check.clone(),
                    rec.grid.to_string(),
                    fmt_float(rec.residual),
                    rec.ratio.map(fmt_float).unwrap_or_default(),
                ],
                &rec,
            );
        }
    }
    emit(&table, &args.common)?;
    Ok(true)
}

#[derive(Serialize)]
struct NrlimitRecord {
    potential: String,
    n: u32,
    parameter: f64,
    #[serde(rename = "E_exact")]
    e_exact: f64,
    #[serde(rename = "E_nr")]
    e_nr: f64,
    deviation: f64,
    spinor_ratio: f64,
}

fn run_nrlimit(args: &NrlimitArgs) -> Result<bool, String> {
    let params = args.common.params()?;
    let (n, sweep): (u32, Vec<f64>) = match params.potential {
        Potential::Coulomb { .. } => (
            args.n.unwrap_or(1),
            args.sweep.clone().unwrap_or_else(|| vec![0.4, 0.2, 0.1]),
        ),
        Potential::Oscillator { .. } => (
            args.n.unwrap_or(0),
            args.sweep.clone().unwrap_or_else(|| vec![10.0, 100.0, 1000.0]),
        ),
    };
    let deviations = spectra::nr_deviation_sweep(&params, n, &sweep).map_err(|e| e.to_string())?;
    let ratios = verifier::spinor_ratio_sweep(&params, n, &sweep, args.radial_points, 1e-10)
        .map_err(|e| e.to_string())?;

    let mut table = Table::new(
        "nrlimit",
        vec!["potential", "n", "parameter", "E_exact", "E_nr", "deviation", "spinor_ratio"],
    );
    for (dev, ratio) in deviations.iter().zip(&ratios) {
        let rec = NrlimitRecord {
            potential: params.potential.name().into(),
            n,
            parameter: dev.parameter,
            e_exact: dev.energy_exact,
            e_nr: dev.energy_nr,
            deviation: dev.deviation,
            spinor_ratio: ratio.ratio,
        };
        table.push(
            vec![
                rec.potential.clone(),
                rec.n.to_string(),
                fmt_float(rec.parameter),
                fmt_float(rec.e_exact),
                fmt_float(rec.e_nr),
                fmt_float(rec.deviation),
                fmt_float(rec.spinor_ratio),
            ],
            &rec,
        );
    }
    emit(&table, &args.common)?;

    // the sweeps themselves are checks: deviations and spinor ratios must
    // shrink toward the non-relativistic regime
    let mut all_pass = true;
    if !deviations.windows(2).all(|w| w[1].deviation.abs() < w[0].deviation.abs()) {
        all_pass = false;
        eprintln!(
            "failed check nrlimit:deviation-monotone: {:?}",
            deviations.iter().map(|d| d.deviation).collect::<Vec<_>>()
        );
    }
    if !ratios.windows(2).all(|w| w[1].ratio < w[0].ratio) {
        all_pass = false;
        eprintln!(
            "failed check nrlimit:ratio-monotone: {:?}",
            ratios.iter().map(|r| r.ratio).collect::<Vec<_>>()
        );
    }
    Ok(all_pass)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match &cli.command {
        Command::Spectrum(args) => run_spectrum(args),
        Command::Verify(args) => run_verify(args),
        Command::Converge(args) => run_converge(args),
        Command::Nrlimit(args) => run_nrlimit(args),
    };
    match outcome {
        Ok(true) => std::process::exit(0),
        Ok(false) => std::process::exit(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}
