//! `hdx`: generate complexes, inspect functions on them, and run the check suites.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hdx_core::calculus::{globalness, influence_profile};
use hdx_core::check::ids;
use hdx_core::decomposition::es_all;
use hdx_core::generators::{FnSpec, GenSpec, Marginals, MeasureKind};
use hdx_core::harness::{self, ReportHeader, SuiteConfig};
use hdx_core::measure::FnFile;
use hdx_core::operators::certify_epsilon;
use hdx_core::walks::{check_kk, noise_direct, updown_direct};
use hdx_core::{CheckRecord, Fn, Subset, WeightedComplex};

#[derive(Parser)]
#[command(name = "hdx", version, about = "Efron-Stein calculus and inequality checks on weighted k-partite complexes")]
struct Cli {
    /// Seed used when a generator spec does not carry its own.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suite configuration JSON (ceilings, tolerances, grids).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for commands that write files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Product,
    EtaCorrelated,
    PerturbedProduct,
    SparseRandom,
}

#[derive(Clone, Copy, ValueEnum)]
enum MarginalKind {
    Uniform,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum WalkOp {
    Noise,
    Updown,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
    Markdown,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a complex (and optionally a function) into `<out>/complex.json` and `<out>/fn.json`.
    Gen {
        /// Generator spec as inline JSON or a path; overrides the flags below.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, value_enum, default_value = "product")]
        kind: Kind,
        #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value = "uniform")]
        marginals: MarginalKind,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Function spec as inline JSON or a path, e.g. `{"kind":"dictator","coord":0,"value":1}`.
        #[arg(long)]
        function: Option<String>,
    },
    /// Spectral ε-certificate of a complex.
    Certify {
        complex: PathBuf,
        /// Keep only the n largest witnesses.
        #[arg(long)]
        top: Option<usize>,
    },
    /// Efron-Stein components as a map from subset bitmask to values.
    Decompose { complex: PathBuf, function: PathBuf },
    /// Influence table as CSV: S, x, I, I<=d.
    Influence {
        complex: PathBuf,
        function: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Coordinates of S; all |S| <= degree when omitted.
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
    },
    /// Minimal δ for which the function is (d, δ)-global.
    Global {
        complex: PathBuf,
        function: PathBuf,
        #[arg(long)]
        degree: usize,
    },
    /// Apply the noise operator or the up-down walk.
    Walk {
        complex: PathBuf,
        function: PathBuf,
        #[arg(long, value_enum)]
        op: WalkOp,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
    },
    /// Shadow bound and walk identity for a Boolean set.
    Kk {
        complex: PathBuf,
        function: PathBuf,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long)]
        delta: f64,
    },
    /// Run a suite (or `default` for all of them); exits nonzero iff any check fails.
    Check { suite: String },
    /// Re-render a JSONL report.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
    },
}

fn read_complex(path: &Path) -> Result<WeightedComplex> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(WeightedComplex::from_json(&text)?)
}

fn read_fn(mu: &WeightedComplex, path: &Path) -> Result<Fn> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: FnFile = serde_json::from_str(&text)?;
    Ok(mu.fn_from_file(file)?)
}

/// Inline JSON when it looks like an object, otherwise a file path.
fn json_arg(arg: &str, seed: u64) -> Result<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    let mut v: Value = serde_json::from_str(&text)?;
    if let Some(obj) = v.as_object_mut() {
        obj.entry("seed").or_insert(json!(seed));
    }
    Ok(v)
}

fn load_config(path: Option<&Path>) -> Result<SuiteConfig> {
    let cfg = match path {
        Some(p) => SuiteConfig::from_file(p)?,
        None => SuiteConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn gen_spec(cli: &Cli) -> Result<GenSpec> {
    let Cmd::Gen { spec, kind, sizes, marginals, eta, gamma, density, .. } = &cli.cmd else { unreachable!() };
    if let Some(s) = spec {
        return Ok(serde_json::from_value(json_arg(s, cli.seed)?)?);
    }
    let sizes = sizes.clone();
    let kind = match kind {
        Kind::Product => MeasureKind::Product {
            sizes,
            marginals: match marginals {
                MarginalKind::Uniform => Marginals::Uniform,
                MarginalKind::Random => Marginals::Random,
            },
        },
        Kind::EtaCorrelated => MeasureKind::EtaCorrelated { eta: *eta },
        Kind::PerturbedProduct => MeasureKind::PerturbedProduct { sizes, gamma: *gamma },
        Kind::SparseRandom => MeasureKind::SparseRandom { sizes, density: *density },
    };
    Ok(GenSpec::new(kind, cli.seed))
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.cmd {
        Cmd::Gen { function, .. } => {
            let spec = gen_spec(&cli)?;
            let mu = spec.build()?;
            fs::create_dir_all(&cli.out)?;
            fs::write(cli.out.join("complex.json"), mu.to_json())?;
            eprintln!("{spec}: {} faces", mu.len());
            if let Some(f) = function {
                let fspec: FnSpec = serde_json::from_value(json_arg(f, cli.seed)?)?;
                let g = fspec.build(&mu)?;
                fs::write(cli.out.join("fn.json"), serde_json::to_string(&g.to_file())?)?;
                eprintln!("{fspec}");
            }
        }
        Cmd::Certify { complex, top } => {
            let cert = certify_epsilon(&read_complex(complex)?);
            let witnesses = match top {
                Some(n) => cert.top(*n).into_iter().cloned().collect(),
                None => cert.witnesses.clone(),
            };
            print_json(&json!({ "epsilon": cert.epsilon, "witnesses": witnesses }))?;
        }
        Cmd::Decompose { complex, function } => {
            let mu = read_complex(complex)?;
            let f = mu.lift(&read_fn(&mu, function)?)?;
            print_json(&json!(es_all(&mu, &f)?.to_json_map()))?;
        }
        Cmd::Influence { complex, function, degree, subset } => {
            let mu = read_complex(complex)?;
            let f = mu.lift(&read_fn(&mu, function)?)?;
            let subsets = match subset {
                Some(ix) => vec![Subset::from_indices(ix.iter().copied())],
                None => Subset::up_to_size(mu.k(), *degree),
            };
            let mut out = io::stdout().lock();
            writeln!(out, "S,x,I,I_trunc")?;
            for s in subsets {
                if !s.fits(mu.k()) {
                    bail!("subset {s} has coordinates beyond k = {}", mu.k());
                }
                let p = influence_profile(&mu, &f, s, *degree)?;
                for row in &p.rows {
                    let x: Vec<String> = s.iter().zip(&row.point).map(|(i, v)| format!("{i}={v}")).collect();
                    writeln!(out, "{},{},{:e},{:e}", s.bits(), x.join(";"), row.influence, row.influence_trunc)?;
                }
            }
        }
        Cmd::Global { complex, function, degree } => {
            let mu = read_complex(complex)?;
            let f = read_fn(&mu, function)?;
            print_json(&serde_json::to_value(globalness(&mu, &f, *degree)?)?)?;
        }
        Cmd::Walk { complex, function, op, rho } => {
            let mu = read_complex(complex)?;
            let f = mu.lift(&read_fn(&mu, function)?)?;
            let g = match op {
                WalkOp::Noise => noise_direct(&mu, &f, *rho)?,
                WalkOp::Updown => updown_direct(&mu, &f)?,
            };
            print_json(&serde_json::to_value(g.to_file())?)?;
        }
        Cmd::Kk { complex, function, degree, delta } => {
            let cfg = load_config(cli.config.as_deref())?;
            let mu = read_complex(complex)?;
            let a = read_fn(&mu, function)?;
            let eps = mu.certificate().epsilon;
            let recs = check_kk(&mu, &a, *degree, *delta, eps, cfg.ceiling(ids::KRUSKAL_KATONA, mu.k()))?;
            let failed = recs.iter().any(CheckRecord::failed);
            print_json(&serde_json::to_value(&recs)?)?;
            if failed {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Check { suite } => {
            let cfg = load_config(cli.config.as_deref())?;
            let run = harness::run_suite(suite, &cfg)?;
            fs::create_dir_all(&cli.out)?;
            let header = run.header();
            let base = cli.out.join(&run.suite);
            harness::write_jsonl(&mut fs::File::create(base.with_extension("jsonl"))?, &header, &run.records)?;
            harness::write_csv(&mut fs::File::create(base.with_extension("csv"))?, &header, &run.records)?;
            harness::write_markdown(&mut fs::File::create(base.with_extension("md"))?, &header, &run.records)?;
            let fails = run.failures().count();
            eprintln!("{}: {} records, {} failed, config {}", run.suite, run.records.len(), fails, run.config_hash);
            for r in run.failures() {
                eprintln!("FAIL {} {} {}", r.check_id, r.instance, r.detail);
            }
            if fails > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Report { input, format } => {
            let file = fs::File::open(input).with_context(|| format!("reading {}", input.display()))?;
            let mut lines = BufReader::new(file).lines();
            let header: ReportHeader = match lines.next() {
                Some(l) => serde_json::from_str(&l?)?,
                None => bail!("{} is empty", input.display()),
            };
            let records = lines
                .filter_map(|l| l.map(|s| (!s.trim().is_empty()).then_some(s)).transpose())
                .map(|l| Ok(serde_json::from_str::<CheckRecord>(&l?)?))
                .collect::<Result<Vec<_>>>()?;
            let mut out = io::stdout().lock();
            match format {
                Format::Jsonl => harness::write_jsonl(&mut out, &header, &records)?,
                Format::Csv => harness::write_csv(&mut out, &header, &records)?,
                Format::Markdown => harness::write_markdown(&mut out, &header, &records)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = c.downcast_ref::<io::Error>().or_else(|| match c.downcast_ref::<hdx_core::Error>() {
            Some(hdx_core::Error::Io(io)) => Some(io),
            _ => None,
        });
        io.is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
