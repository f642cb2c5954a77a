//! Command-line front end.
//!
//! ```text
//! nonstoq <adaptive|sweep|cross|exact|signcheck> --model m.toml [options]
//! ```
//!
//! `--workflow NAME` may be given instead of the subcommand. Exit codes:
//! 0 success, 2 configuration error, 3 numerical error, 4 I/O error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::adaptive::{adaptive_solve, AdaptiveParams};
use crate::crossing::{find_crossings, sweep_standard, Crossing, CrossingResult, Grid, SweepTable};
use crate::error::{Error, ErrorKind, Result};
use crate::model::{FluctuationSpec, NonStoqModel};
use crate::oracle::{exact_observables, is_stoquastic, naive_sign_report, SIGN_LIMIT};
use crate::output::{write_csv, write_sign_csv, CsvRow, SignRow};
use crate::parallel::{self, Execution};
use crate::pimc::{sub_seed, MCParams};

#[derive(Debug, Parser)]
#[command(name = "nonstoq", version, about = "Sign-free path-integral Monte Carlo for non-stoquastic Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    workflow: Workflow,
}

#[derive(Debug, Subcommand)]
enum Workflow {
    /// Self-consistent effective-field iteration at each (Gamma, gamma).
    Adaptive(RunArgs),
    /// Standard transverse-field runs over the --grid.
    Sweep(RunArgs),
    /// Grid sweep plus crossing analysis at each (Gamma, gamma).
    Cross(RunArgs),
    /// Exact thermal averages at each (Gamma, gamma).
    Exact(RunArgs),
    /// Stoquasticity and naive Trotter sign at each (Gamma, gamma).
    Signcheck(RunArgs),
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// Model description (TOML).
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    beta: f64,
    /// Trotter number (even).
    #[arg(long, default_value_t = 64)]
    tau: usize,
    #[arg(long = "sweeps-equil", default_value_t = 5000)]
    sweeps_equil: usize,
    #[arg(long = "sweeps-meas", default_value_t = 20000)]
    sweeps_meas: usize,
    /// Effective-field grid min:max:step.
    #[arg(long, default_value = "0:4:0.05")]
    grid: Grid,
    /// Transverse field values, comma separated (default: from the model).
    #[arg(long = "Gamma", value_delimiter = ',', allow_negative_numbers = true)]
    transverse: Vec<f64>,
    /// XX coupling values, comma separated (default: from the model).
    #[arg(long = "gamma", value_delimiter = ',', allow_negative_numbers = true)]
    xx: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, env = "NONSTOQ_WORKERS")]
    workers: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Damping of the adaptive field update.
    #[arg(long, default_value_t = 0.5)]
    damping: f64,
    /// Tolerance on successive m_x estimates.
    #[arg(long, default_value_t = 0.01)]
    tolerance: f64,
    #[arg(long = "max-iterations", default_value_t = 50)]
    max_iterations: usize,
}

impl RunArgs {
    fn mc(&self) -> MCParams {
        MCParams::new(self.beta, self.tau, self.sweeps_equil, self.sweeps_meas, self.seed)
    }
}

/// Parses `argv` (including the program name), runs the workflow and returns
/// the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = match rewrite_workflow_flag(argv.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.workflow) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::Io => 4,
            }
        }
    }
}

/// Moves `--workflow NAME` (or `--workflow=NAME`) into subcommand position.
fn rewrite_workflow_flag(mut argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut found = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy().into_owned();
        if arg == "--workflow" {
            if i + 1 >= argv.len() {
                return Err(Error::Argument("--workflow needs a value".into()));
            }
            found = Some(argv.remove(i + 1));
            argv.remove(i);
        } else if let Some(name) = arg.strip_prefix("--workflow=") {
            found = Some(OsString::from(name));
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    if let Some(name) = found {
        argv.insert(1.min(argv.len()), name);
    }
    Ok(argv)
}

fn dispatch(workflow: Workflow) -> Result<()> {
    let (name, args) = match &workflow {
        Workflow::Adaptive(a) => ("adaptive", a),
        Workflow::Sweep(a) => ("sweep", a),
        Workflow::Cross(a) => ("cross", a),
        Workflow::Exact(a) => ("exact", a),
        Workflow::Signcheck(a) => ("signcheck", a),
    };
    let model = NonStoqModel::load(&args.model)?;
    parallel::with_workers(args.workers, || match name {
        "adaptive" => adaptive(&model, args),
        "sweep" => sweep(&model, args),
        "cross" => cross(&model, args),
        "exact" => exact(&model, args),
        _ => signcheck(&model, args),
    })
}

/// (Γ, γ) points: the Cartesian product of --Gamma and --gamma, each
/// defaulting to the model's own value.
fn targets(model: &NonStoqModel, args: &RunArgs) -> Result<Vec<(f64, f64, FluctuationSpec)>> {
    let (own_t, own_x) = match model.fluctuation {
        FluctuationSpec::Linear { transverse } => (transverse, 0.0),
        FluctuationSpec::LinearQuadratic { transverse, xx } => (transverse, xx),
        FluctuationSpec::Polynomial { .. } => {
            if !args.transverse.is_empty() || !args.xx.is_empty() {
                return Err(Error::Argument("--Gamma/--gamma cannot override a polynomial fluctuation".into()));
            }
            return Ok(vec![(f64::NAN, f64::NAN, model.fluctuation.clone())]);
        }
    };
    let ts = if args.transverse.is_empty() { vec![own_t] } else { args.transverse.clone() };
    let xs = if args.xx.is_empty() { vec![own_x] } else { args.xx.clone() };
    Ok(ts
        .iter()
        .flat_map(|&t| {
            xs.iter().map(move |&x| {
                let f = if x == 0.0 {
                    FluctuationSpec::linear(t)
                } else {
                    FluctuationSpec::linear_quadratic(t, x)
                };
                (t, x, f)
            })
        })
        .collect())
}

fn finish(args: &RunArgs, rows: &[CsvRow]) -> Result<()> {
    for r in rows {
        println!("{}", summary(r));
    }
    if let Some(out) = &args.out {
        write_csv(out, rows)?;
    }
    Ok(())
}

fn summary(r: &CsvRow) -> String {
    let mut s = format!(
        "{} N={} Gamma={} gamma={} m_x={:.6}±{:.6} |m_z|={:.6}±{:.6} E/N={:.6}±{:.6}",
        r.workflow, r.n_spins, r.transverse, r.xx, r.m_x, r.m_x_err, r.m_z_abs, r.m_z_abs_err, r.energy_per_spin, r.energy_err
    );
    if let Some(g) = r.gamma_tilde {
        s += &format!(" gamma_tilde={g:.6}");
    }
    if let Some(c) = r.converged {
        s += &format!(" converged={c}");
    }
    s
}

fn adaptive(model: &NonStoqModel, args: &RunArgs) -> Result<()> {
    let points = targets(model, args)?;
    let results = parallel::map_indexed(points.len(), Execution::default(), |k| {
        let (t, x, f) = &points[k];
        let m = model.with_fluctuation(f.clone());
        let initial = if *t > 0.0 { *t } else { 1.0 };
        let mut params = AdaptiveParams::new(initial, args.mc().with_seed(sub_seed(args.seed, k as u64)));
        params.damping = args.damping;
        params.tolerance = args.tolerance;
        params.max_outer_iterations = args.max_iterations;
        adaptive_solve(&m, &params)
            .map(|r| CsvRow::from_record("adaptive", *t, *x, Some(r.fixed_point_field), &r.record, Some(r.converged)))
    });
    finish(args, &results.into_iter().collect::<Result<Vec<_>>>()?)
}

fn table_rows(table: &SweepTable) -> Vec<CsvRow> {
    table
        .rows
        .iter()
        .map(|row| CsvRow::from_record("sweep", row.gamma_tilde, 0.0, Some(row.gamma_tilde), &row.record, None))
        .collect()
}

fn sweep(model: &NonStoqModel, args: &RunArgs) -> Result<()> {
    let table = sweep_standard(&model.classical, &args.grid, &args.mc())?;
    finish(args, &table_rows(&table))
}

/// Crossing analysis of one (Γ, γ) target. For γ = 0 the crossing is the
/// table itself at Γ̃ = Γ.
fn crossings_for(table: &SweepTable, f: &FluctuationSpec) -> Result<CrossingResult> {
    if let FluctuationSpec::Linear { transverse } = *f {
        let record = table.interpolate(transverse)?;
        return Ok(CrossingResult {
            crossings: vec![Crossing {
                gamma_tilde: transverse,
                m_x: record.m_x.value,
                record,
                free_energy: None,
            }],
            selected_index: Some(0),
            selection_method: crate::crossing::SelectionMethod::OnlyCrossing,
        });
    }
    find_crossings(table, f)
}

fn crossings_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    out.with_file_name(format!("{stem}_crossings{ext}"))
}

fn cross(model: &NonStoqModel, args: &RunArgs) -> Result<()> {
    let table = sweep_standard(&model.classical, &args.grid, &args.mc())?;
    let mut rows = Vec::new();
    for (t, x, f) in targets(model, args)? {
        let result = crossings_for(&table, &f)?;
        for (i, c) in result.crossings.iter().enumerate() {
            let mut record = c.record.clone();
            record.energy_per_spin.value += c.gamma_tilde * c.m_x - f.eval(c.m_x);
            let selected = result.selected_index == Some(i);
            rows.push(CsvRow::from_record("cross", t, x, Some(c.gamma_tilde), &record, Some(selected)));
        }
    }
    for r in &rows {
        println!("{}", summary(r));
    }
    if let Some(out) = &args.out {
        write_csv(out, &table_rows(&table))?;
        write_csv(&crossings_path(out), &rows)?;
    }
    Ok(())
}

fn exact(model: &NonStoqModel, args: &RunArgs) -> Result<()> {
    let points = targets(model, args)?;
    let results = parallel::map_indexed(points.len(), Execution::default(), |k| {
        let (t, x, f) = &points[k];
        exact_observables(&model.with_fluctuation(f.clone()), args.beta)
            .map(|r| CsvRow::from_exact(model.n_spins(), args.beta, *t, *x, &r))
    });
    finish(args, &results.into_iter().collect::<Result<Vec<_>>>()?)
}

fn signcheck(model: &NonStoqModel, args: &RunArgs) -> Result<()> {
    let mut rows = Vec::new();
    for (t, x, f) in targets(model, args)? {
        let m = model.with_fluctuation(f);
        let stoquastic = is_stoquastic(&m, 1e-12)?;
        let sign = if m.n_spins() <= SIGN_LIMIT {
            Some(naive_sign_report(&m, args.tau, args.beta)?)
        } else {
            None
        };
        println!(
            "signcheck N={} Gamma={t} gamma={x} stoquastic={} max_offdiag={:.6} average_sign={}",
            m.n_spins(),
            stoquastic.stoquastic,
            stoquastic.max_offdiagonal,
            sign.as_ref().map_or("n/a".to_string(), |s| format!("{:.6}", s.average_sign))
        );
        rows.push(SignRow {
            n_spins: m.n_spins(),
            transverse: t,
            xx: x,
            stoquastic,
            tau: args.tau,
            beta: args.beta,
            sign,
        });
    }
    if let Some(out) = &args.out {
        write_sign_csv(out, &rows)?;
    }
    Ok(())
}
