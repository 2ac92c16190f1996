use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use lorentz_corrugate::bounds::{form_constant_c, m_constant, t_constant, BoundConstants};
use lorentz_corrugate::config::RunConfig;
use lorentz_corrugate::corrugation::{cp_step, select_step, Primitive, Quadrature, SelectOptions, DEFAULT_N_CAP};
use lorentz_corrugate::decomp::{build_dictionary, decompose};
use lorentz_corrugate::fields::io::{fmt_f64, read_metric_csv, read_scalar_csv, write_obj, write_scalar_csv};
use lorentz_corrugate::fields::{isometric_default, pullback_metric, EmbeddingJet, Grid, LinearForm};
use lorentz_corrugate::scenario::{strip_primitive, Scenario};
use lorentz_corrugate::scheduler::{run_nash_kuiper, RunLedger};
use lorentz_corrugate::verify::{verify, Level};
use lorentz_corrugate::{par, Error};

const THREADS_ENV: &str = "LORENTZ_CORRUGATE_THREADS";

#[derive(Parser)]
#[command(name = "lorentz-corrugate", version, about = "Corrugation-process embeddings in Minkowski 3-space")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the bound constants for an amplitude bound and dictionary size.
    Bounds {
        #[arg(long)]
        alpha_max: f64,
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Also measure `c` and `T` on this scenario.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 65)]
        grid: usize,
        /// Write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Split a metric field (x_idx,y_idx,E,F,G) into primitive coefficients.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Receives forms.csv and eta_<j>.csv.
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Apply one corrugation step to the flat square.
    Corrugate {
        /// Coefficient field (x_idx,y_idx,eta); a smooth built-in bump when absent.
        #[arg(long)]
        eta_file: Option<PathBuf>,
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        ell: String,
        /// Corrugation number.
        #[arg(long = "N", short = 'N', conflicts_with = "eps")]
        n: Option<u64>,
        /// Select the smallest adequate corrugation number for this tolerance.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Run the full staged iteration described by a JSON config.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        outdir: Option<PathBuf>,
    },
    /// Run the self-check suite.
    Verify {
        #[arg(long, default_value = "quick")]
        level: String,
    },
    /// Print build and scenario information.
    Info,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.chain().any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_config_error));
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Bounds { alpha_max, k, scenario, grid, csv } => {
            init_pool(None)?;
            bounds(alpha_max, k, scenario.as_deref(), grid, csv.as_deref())
        }
        Cmd::Decompose { input, k, outdir } => {
            init_pool(None)?;
            decompose_cmd(&input, k, &outdir)
        }
        Cmd::Corrugate { eta_file, ell, n, eps, grid, out, record } => {
            init_pool(None)?;
            corrugate(eta_file.as_deref(), &ell, n, eps, grid, out.as_deref(), record.as_deref())
        }
        Cmd::Run { config, outdir } => run(config.as_deref(), outdir),
        Cmd::Verify { level } => {
            init_pool(None)?;
            let level: Level = level.parse()?;
            let report = verify(level)?;
            println!("{report}");
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Info => {
            init_pool(None)?;
            info();
            Ok(ExitCode::SUCCESS)
        }
    }
}

// The environment variable wins over the config value.
fn init_pool(configured: Option<usize>) -> Result<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => return Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")).into()),
        },
        Err(_) => configured,
    };
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("building the worker pool")?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn config_err(msg: String) -> anyhow::Error {
    Error::Config(msg).into()
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| config_err(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn bounds(alpha_max: f64, k: usize, scenario: Option<&str>, grid: usize, csv: Option<&Path>) -> Result<ExitCode> {
    if !(alpha_max >= 0.0 && alpha_max.is_finite()) {
        return Err(Error::Domain(format!("alpha_max must be finite and nonnegative, got {alpha_max}")).into());
    }
    build_dictionary(k)?;
    let (c, t) = match scenario {
        None => (f64::NAN, f64::NAN),
        Some(id) => {
            let sc: Scenario = id.parse()?;
            let grid = Grid::square(grid)?;
            let f0 = sc.initial(grid);
            let g = sc.target(grid);
            let delta = isometric_default(&pullback_metric(&f0), &g)?;
            let d = decompose(&delta, &build_dictionary(k)?)?;
            let c = form_constant_c(&d, &g)?;
            (c, t_constant(m_constant(alpha_max), c, &f0, &g)?)
        }
    };
    let consts = BoundConstants::new(alpha_max, k, c, t);
    for (name, v) in consts.rows() {
        let shown = if v.is_nan() { "n/a (needs --scenario)".to_string() } else { format!("{v:.10}") };
        println!("{name:<10} {shown}");
    }
    if let Some(path) = csv {
        let mut w = create(path)?;
        writeln!(w, "name,value")?;
        for (name, v) in consts.rows().into_iter().filter(|(_, v)| !v.is_nan()) {
            writeln!(w, "{name},{}", fmt_f64(v))?;
        }
        w.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn decompose_cmd(input: &Path, k: usize, outdir: &Path) -> Result<ExitCode> {
    let field = read_metric_csv(open(input)?)?;
    let d = decompose(&field, &build_dictionary(k)?)?;
    fs::create_dir_all(outdir).with_context(|| format!("cannot create {}", outdir.display()))?;
    let mut forms = create(&outdir.join("forms.csv"))?;
    writeln!(forms, "j,angle,a,b,eta_max")?;
    for (j, (ell, eta)) in d.forms.iter().zip(&d.coefficients).enumerate() {
        let emax = eta.iter().fold(0.0f64, |a, &b| a.max(b));
        writeln!(forms, "{j},{},{},{},{}", fmt_f64(ell.angle()), fmt_f64(ell.a()), fmt_f64(ell.b()), fmt_f64(emax))?;
        let mut w = create(&outdir.join(format!("eta_{j}.csv")))?;
        write_scalar_csv(&d.grid, "eta", eta, &mut w)?;
        w.flush()?;
    }
    forms.flush()?;
    println!("grid       {}x{}", d.grid.nx(), d.grid.ny());
    println!("forms      {}", d.len());
    println!("residual   {:.3e}", d.residual);
    println!("eta_max    {:.6}", d.eta_max());
    println!("max_jump   {:.3e}", d.max_neighbour_jump());
    Ok(ExitCode::SUCCESS)
}

fn parse_ell(s: &str) -> Result<LinearForm> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(config_err(format!("--ell expects \"a,b\", got `{s}`")));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|_| config_err(format!("--ell: bad number `{t}`")));
    LinearForm::new(num(a)?, num(b)?).map_err(|e| config_err(format!("--ell: {e}")))
}

#[allow(clippy::too_many_arguments)]
fn corrugate(
    eta_file: Option<&Path>,
    ell: &str,
    n: Option<u64>,
    eps: Option<f64>,
    grid: Option<usize>,
    out: Option<&Path>,
    record: Option<&Path>,
) -> Result<ExitCode> {
    let ell = parse_ell(ell)?;
    let (g, mu) = match eta_file {
        Some(path) => {
            let (g, eta) = read_scalar_csv(open(path)?)?;
            if let Some(n) = grid {
                if (g.nx(), g.ny()) != (n, n) {
                    return Err(config_err(format!("--grid {n} does not match the {}x{} eta file", g.nx(), g.ny())));
                }
            }
            (g, Primitive::new(ell, eta))
        }
        None => {
            let g = Grid::square(grid.unwrap_or(65))?;
            (g, Primitive::new(ell, strip_primitive(g).eta))
        }
    };
    let f = EmbeddingJet::flat_inclusion(g);
    let (jet, rec) = match (n, eps) {
        (Some(n), _) => cp_step(&f, &mu, n, Quadrature::Series, None)?,
        (None, Some(eps)) => {
            let s = select_step(&f, &mu, &SelectOptions { n_cap: DEFAULT_N_CAP, ..SelectOptions::new(eps) })?;
            for (n, e) in &s.attempts {
                println!("tried N={n:<8} error {e:.3e}");
            }
            (s.jet, s.record)
        }
        (None, None) => return Err(config_err("one of --N or --eps is required".into())),
    };
    let a = &rec.bound_audit;
    println!("N                  {}", rec.n);
    println!("alpha_max          {:.6}", rec.alpha_max);
    println!("sup default        {:.3e}", rec.measured_sup_default);
    println!("identity residual  {:.3e}", rec.identity_residual);
    println!("average residual   {:.3e}", rec.average_residual);
    println!("c0 shift           {:.3e}", rec.c0_shift);
    println!("audits             {}", if a.passed() { "pass" } else { "FAIL" });
    if let Some(path) = out {
        let mut w = create(path)?;
        write_obj(&jet, &mut w)?;
        w.flush()?;
    }
    if let Some(path) = record {
        let ledger = RunLedger { rows: Vec::new(), steps: vec![(1, rec)] };
        let mut w = create(path)?;
        ledger.write_steps_csv(&mut w)?;
        w.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run(config: Option<&Path>, outdir: Option<PathBuf>) -> Result<ExitCode> {
    let mut cfg = match config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = outdir {
        cfg.outdir = Some(d.to_string_lossy().into_owned());
    }
    init_pool(cfg.threads)?;
    let outcome = run_nash_kuiper(&cfg)?;
    for row in &outcome.ledger.rows {
        println!(
            "stage {:>2}  delta {:.4}  default {:.3e}  c0 {:.3e}  N {:?}  {}",
            row.stage,
            row.delta,
            row.sup_default_g,
            row.c0_increment,
            row.n_list,
            if row.passed() { "pass" } else { "FAIL" }
        );
    }
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    let s = &outcome.summary;
    if s.stages_passed && s.monotone && s.c0_drift <= s.epsilon {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("run finished with failed stage checks (see ledger.csv)");
        Ok(ExitCode::from(1))
    }
}

fn info() {
    println!("lorentz-corrugate {}", env!("CARGO_PKG_VERSION"));
    println!("parallel   {}", par::parallel_enabled());
    println!("threads    {}", par::current_threads());
    println!("scenarios");
    for s in Scenario::ALL {
        println!("  {:<16} {}", s.id(), s.description());
    }
    println!("default run config");
    println!("{}", RunConfig::default().to_json());
}
