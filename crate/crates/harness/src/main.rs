use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sumprod_core::contfrac::{cf_expand_u64, cf_value, convergents, CfExpansion};
use sumprod_harness::config::{ConfigError, Settings};
use sumprod_harness::experiments::{
    run_covering_suite, run_flattening, run_fmq, run_girth, run_incidence, run_popprod, run_sumprod_sweep,
    run_zaremba_rows, run_zaremba_scaling,
};
use sumprod_harness::verify::{asserted_ok, verify_all};
use sumprod_harness::{ExperimentConfig, Format, Table, Value};

#[derive(Parser)]
#[command(
    name = "sumprod",
    version,
    about = "Sum-product and bounded continued fraction experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continued fraction utilities.
    Cf {
        #[command(subcommand)]
        op: CfOp,
    },
    /// |Z_M(p)| and |A_M(p)| over a prime grid; exponent fits with 3+ primes.
    Zaremba(Common),
    /// |F_M(Q)| over M and Q grids.
    Fmq(Common),
    /// Covering inclusion A_M(p) ⊆ 𝒜_β + ℬ_β under both half-convergent rules.
    Covering(Common),
    /// Sumset sizes and popular products over several families of A.
    Sumprod(Common),
    /// Collision depth of T(N) mod p against the lower bounds.
    Girth(Common),
    /// ℓ² flattening profile of the T(N) walk.
    Flatten(Common),
    /// Incidence counts, the exhaustive identity and weighted means.
    Incidence(Common),
    /// |A ∩ ρA⁻¹| against pair counts, plus subgroup cases.
    Popprod(Common),
    /// Runs every acceptance criterion; exit status reflects the asserted tier.
    VerifyAll(Common),
}

#[derive(Subcommand)]
enum CfOp {
    /// Partial quotients of a/q.
    Expand { a: u64, q: u64 },
    /// Value of [0; b₁, …, b_s].
    Value { quotients: Vec<u64> },
    /// Convergents u_k/v_k of a/q.
    Convergents { a: u64, q: u64 },
}

#[derive(Args, Default)]
struct Common {
    /// Primes: list `7,11` or inclusive range `5..50` (non-primes rejected).
    #[arg(long)]
    p: Option<String>,
    /// Prime range `a..b[:step]`, filtered by primality.
    #[arg(long = "p-range")]
    p_range: Option<String>,
    #[arg(long = "M")]
    m: Option<String>,
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long = "depth-cap")]
    depth_cap: Option<String>,
    #[arg(long = "k-max")]
    k_max: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long = "q-max")]
    q_max: Option<String>,
    /// Output file (directory for verify-all); stdout when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    /// `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn settings(&self, experiment: &str) -> Result<ExperimentConfig, ConfigError> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        flags.set("experiment", experiment)?;
        let pairs = [
            ("p", &self.p),
            ("p_range", &self.p_range),
            ("M", &self.m),
            ("N", &self.n),
            ("beta", &self.beta),
            ("rho", &self.rho),
            ("alpha", &self.alpha),
            ("q", &self.q),
            ("depth_cap", &self.depth_cap),
            ("k_max", &self.k_max),
            ("samples", &self.samples),
            ("q_max", &self.q_max),
            ("out", &self.out),
            ("format", &self.format),
            ("seed", &self.seed),
            ("threads", &self.threads),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        s.merge(&flags);
        s.build()
    }
}

fn emit(table: &Table, format: Format, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, table.render(format)),
        None => table.write(format, &mut std::io::stdout().lock()),
    }
}

/// `results.csv` → `results_fits.csv`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{suffix}.{ext}"),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

fn cf_table(op: &CfOp) -> Result<Table, String> {
    let show = |cf: &CfExpansion| cf.quotients().iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    match op {
        CfOp::Expand { a, q } => {
            let cf = cf_expand_u64(*a, *q).map_err(|e| e.to_string())?;
            let mut t = Table::new(&["a", "q", "s", "quotients", "max_quotient"]);
            t.push(vec![
                (*a).into(),
                (*q).into(),
                cf.len().into(),
                show(&cf).into(),
                cf.max_quotient().into(),
            ]);
            Ok(t)
        }
        CfOp::Value { quotients } => {
            let cf = CfExpansion::from_quotients(quotients.clone()).map_err(|e| e.to_string())?;
            let v = cf_value(&cf);
            let mut t = Table::new(&["quotients", "canonical", "numer", "denom"]);
            t.push(vec![
                show(&cf).into(),
                (*quotients == cf.quotients()).into(),
                (*v.numer()).into(),
                (*v.denom()).into(),
            ]);
            Ok(t)
        }
        CfOp::Convergents { a, q } => {
            let cf = cf_expand_u64(*a, *q).map_err(|e| e.to_string())?;
            let table = convergents(&cf);
            let mut t = Table::new(&["a", "q", "k", "u", "v"]);
            for k in 0..table.len() {
                t.push(vec![
                    (*a).into(),
                    (*q).into(),
                    k.into(),
                    table.u[k].into(),
                    table.v[k].into(),
                ]);
            }
            Ok(t)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let (name, common) = match &cli.command {
        Command::Cf { op } => {
            let t = cf_table(op)?;
            emit(&t, Format::Csv, None).map_err(|e| e.to_string())?;
            return Ok(ExitCode::SUCCESS);
        }
        Command::Zaremba(c) => ("zaremba", c),
        Command::Fmq(c) => ("fmq", c),
        Command::Covering(c) => ("covering", c),
        Command::Sumprod(c) => ("sumprod", c),
        Command::Girth(c) => ("girth", c),
        Command::Flatten(c) => ("flatten", c),
        Command::Incidence(c) => ("incidence", c),
        Command::Popprod(c) => ("popprod", c),
        Command::VerifyAll(c) => ("verify-all", c),
    };
    let cfg = common.settings(name).map_err(|e| e.to_string())?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let out = cfg.out.as_deref();
    let io = |r: std::io::Result<()>| r.map_err(|e| e.to_string());
    let table = match name {
        "zaremba" if cfg.primes.len() >= 3 => {
            let study = run_zaremba_scaling(&cfg).map_err(|e| e.to_string())?;
            io(emit(&study.rows, cfg.format, out))?;
            match out {
                Some(path) => io(emit(&study.fits, cfg.format, Some(&sibling(path, "fits"))))?,
                None => {
                    println!();
                    io(emit(&study.fits, cfg.format, None))?;
                }
            }
            return Ok(ExitCode::SUCCESS);
        }
        "zaremba" => run_zaremba_rows(&cfg),
        "fmq" => run_fmq(&cfg),
        "covering" => run_covering_suite(&cfg),
        "sumprod" => run_sumprod_sweep(&cfg),
        "girth" => run_girth(&cfg),
        "flatten" => run_flattening(&cfg),
        "incidence" => run_incidence(&cfg),
        "popprod" => run_popprod(&cfg),
        _ => {
            if let Some(dir) = out {
                io(std::fs::create_dir_all(dir))?;
            }
            let results = verify_all(cfg.seed, out);
            let mut stdout = std::io::stdout().lock();
            let mut summary = Table::new(&["id", "title", "tier", "pass", "seconds", "details"]);
            for r in &results {
                io(writeln!(stdout, "{}", r.line()))?;
                summary.push(vec![
                    r.id.into(),
                    r.title.into(),
                    Value::from(format!("{:?}", r.tier).to_lowercase()),
                    r.pass.into(),
                    r.seconds.into(),
                    r.details.clone().into(),
                ]);
            }
            if let Some(dir) = out {
                let file = match cfg.format {
                    Format::Csv => "verify_all.csv",
                    Format::Json => "verify_all.json",
                };
                io(emit(&summary, cfg.format, Some(&dir.join(file))))?;
            }
            return Ok(if asserted_ok(&results) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
    }
    .map_err(|e| e.to_string())?;
    io(emit(&table, cfg.format, out))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
