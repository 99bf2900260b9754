use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use finitetc_core::complexity::{cat, cc_n, cc_nm, SearchOptions, Variant};
use finitetc_core::homotopy::{core, is_contractible};
use finitetc_core::io::{parse_complex, parse_poset, zoo_complex, zoo_poset, COMPLEX_ZOO, POSET_ZOO};
use finitetc_core::poset::{FinitePoset, DEFAULT_SIZE_CAP};
use finitetc_core::report::ComplexityReport;
use finitetc_core::simplicial::{sc_n_of_complex, sc_n_of_order_complex, SimplicialComplex};
use finitetc_core::subdivision::{cc_inf_n, cc_k_n};
use finitetc_core::verify::{corollaries, lemmas, transfer, SuiteReport, VerifyConfig};
use finitetc_core::Budget;

#[derive(Parser)]
#[command(name = "finitetc", version, about = "Topological complexity invariants of finite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads (0 uses all cores).
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// Node budget for each homotopy or section query.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_nodes: Option<u64>,
    /// Wall-clock budget for the whole run, in seconds.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_seconds: Option<u64>,
    /// Seed for randomized search and corpus generation.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Include elapsed time in JSON output (makes it differ between runs).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Wedge,
    Linear,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Wedge => Variant::Wedge,
            VariantArg::Linear => Variant::Linear,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Basic facts about a poset, or about a complex with --complex.
    Info {
        input: String,
        #[arg(long)]
        complex: bool,
    },
    /// Lusternik-Schnirelmann category.
    Cat { input: String },
    /// cc_n, or the bounded cc_{n,m} when --m is given.
    Cc {
        input: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = VariantArg::Wedge)]
        variant: VariantArg,
        #[command(flatten)]
        witness: WitnessFlag,
    },
    /// cc^k_n on the k-th subdivision of P^n.
    Cck {
        input: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        witness: WitnessFlag,
    },
    /// cc^inf_n, the minimum over subdivision levels up to --k-max.
    Ccinf {
        input: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
        #[command(flatten)]
        witness: WitnessFlag,
    },
    /// Simplicial complexity of a complex, or of the order complex of a
    /// poset given with --poset.
    Sc {
        input: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
        #[arg(long)]
        poset: bool,
    },
    /// Property suites over a corpus of small spaces.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Number of random connected posets added to the builtin corpus.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
    },
}

#[derive(Args)]
struct WitnessFlag {
    /// Attach section witnesses to the report.
    #[arg(long)]
    emit_witness: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lemmas,
    Corollaries,
    Transfer,
    All,
}

fn size_cap() -> Result<usize> {
    match std::env::var("FINITETC_SIZE_CAP") {
        Ok(v) => {
            let cap: usize = v.parse().with_context(|| format!("FINITETC_SIZE_CAP=`{}` is not a number", v))?;
            if cap == 0 {
                bail!("FINITETC_SIZE_CAP must be positive");
            }
            Ok(cap)
        }
        Err(_) => Ok(DEFAULT_SIZE_CAP),
    }
}

fn search_options(g: &Global, emit_witness: bool) -> Result<SearchOptions> {
    let mut opts = SearchOptions::default();
    if let Some(nodes) = g.budget_nodes {
        opts.budget = Budget::nodes(nodes as usize);
    }
    opts.budget = opts.budget.with_timeout(g.budget_seconds.map(Duration::from_secs));
    opts.size_cap = size_cap()?;
    opts.seed = g.seed;
    opts.emit_witness = emit_witness;
    Ok(opts)
}

fn read_file(input: &str) -> Result<String> {
    let path = Path::new(input);
    if !path.is_file() {
        bail!(
            "`{}` is neither a known space nor a readable file (posets: {}; complexes: {})",
            input,
            POSET_ZOO.join(", "),
            COMPLEX_ZOO.join(", ")
        );
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", input))
}

fn load_poset(input: &str) -> Result<Arc<FinitePoset>> {
    if let Some(p) = zoo_poset(input)? {
        return Ok(Arc::new(p));
    }
    let text = read_file(input)?;
    let p = parse_poset(&text).with_context(|| format!("parsing {}", input))?;
    Ok(Arc::new(p))
}

fn load_complex(input: &str) -> Result<SimplicialComplex> {
    if let Some(k) = zoo_complex(input)? {
        return Ok(k);
    }
    let text = read_file(input)?;
    parse_complex(&text).with_context(|| format!("parsing {}", input))
}

fn poset_info(p: &FinitePoset, format: Format) -> String {
    let c = core(p);
    let contractible = is_contractible(p);
    if format == Format::Json {
        let v = serde_json::json!({
            "elements": p.len(),
            "hasse_edges": p.hasse_edges().len(),
            "connected": p.is_connected(),
            "core_size": c.len(),
            "contractible": contractible,
        });
        return serde_json::to_string_pretty(&v).expect("json values serialize");
    }
    format!(
        "elements: {}\nhasse edges: {}\nconnected: {}\ncore size: {}\ncontractible: {}",
        p.len(),
        p.hasse_edges().len(),
        if p.is_connected() { "yes" } else { "no" },
        c.len(),
        if contractible { "yes" } else { "no" }
    )
}

fn complex_info(k: &SimplicialComplex, format: Format) -> String {
    if format == Format::Json {
        let v = serde_json::json!({
            "vertices": k.vertex_count(),
            "facets": k.facets().len(),
            "simplices": k.simplex_count(),
            "dimension": k.dimension(),
        });
        return serde_json::to_string_pretty(&v).expect("json values serialize");
    }
    format!(
        "vertices: {}\nfacets: {}\nsimplices: {}\ndimension: {}",
        k.vertex_count(),
        k.facets().len(),
        k.simplex_count(),
        k.dimension()
    )
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit_report(report: &ComplexityReport, g: &Global) -> ExitCode {
    match g.format {
        Format::Text => {
            emit(&report.to_text());
        }
        Format::Json => {
            let mut v = serde_json::to_value(report).expect("reports serialize");
            if !g.timing {
                if let Some(obj) = v.as_object_mut() {
                    obj.remove("elapsed_ms");
                }
            }
            emit(&format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize")));
        }
    }
    if report.is_exact() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn emit_suites(reports: &[SuiteReport], format: Format) -> ExitCode {
    match format {
        Format::Text => reports.iter().for_each(|r| emit(&r.to_text())),
        Format::Json => emit(&format!("{}\n", serde_json::to_string_pretty(reports).expect("suite reports serialize"))),
    }
    if reports.iter().all(SuiteReport::ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    rayon::ThreadPoolBuilder::new()
        .num_threads(g.jobs)
        .build_global()
        .context("starting the worker pool")?;
    let code = match &cli.command {
        Command::Info { input, complex } => {
            let text = if *complex {
                complex_info(&load_complex(input)?, g.format)
            } else {
                poset_info(&*load_poset(input)?, g.format)
            };
            emit(&format!("{}\n", text));
            ExitCode::SUCCESS
        }
        Command::Cat { input } => {
            let p = load_poset(input)?;
            emit_report(&cat(&p, &search_options(g, false)?)?, g)
        }
        Command::Cc {
            input,
            n,
            m,
            variant,
            witness,
        } => {
            let p = load_poset(input)?;
            let opts = search_options(g, witness.emit_witness)?;
            let report = match m {
                Some(m) => cc_nm(&p, *n as usize, *m, (*variant).into(), &opts)?,
                None => cc_n(&p, *n as usize, &opts)?,
            };
            emit_report(&report, g)
        }
        Command::Cck { input, n, k, witness } => {
            let p = load_poset(input)?;
            let opts = search_options(g, witness.emit_witness)?;
            emit_report(&cc_k_n(&p, *n as usize, *k, opts.size_cap, &opts)?, g)
        }
        Command::Ccinf { input, n, k_max, witness } => {
            let p = load_poset(input)?;
            let opts = search_options(g, witness.emit_witness)?;
            emit_report(&cc_inf_n(&p, *n as usize, *k_max, opts.size_cap, &opts)?, g)
        }
        Command::Sc { input, n, k_max, poset } => {
            let opts = search_options(g, false)?;
            let report = if *poset {
                sc_n_of_order_complex(&load_poset(input)?, *n as usize, *k_max, opts.size_cap, &opts)?
            } else {
                sc_n_of_complex(&load_complex(input)?, *n as usize, *k_max, opts.size_cap, &opts)?
            };
            emit_report(&report, g)
        }
        Command::Verify { suite, random, max_size } => {
            if *max_size == 0 || *max_size > 6 {
                bail!("--max-size must be between 1 and 6");
            }
            let config = VerifyConfig {
                include_builtin: true,
                random: *random,
                max_size: *max_size,
                seed: g.seed,
                opts: search_options(g, false)?,
            };
            let mut reports = Vec::new();
            if matches!(suite, Suite::Lemmas | Suite::All) {
                reports.push(lemmas(&config)?);
            }
            if matches!(suite, Suite::Corollaries | Suite::All) {
                reports.push(corollaries(&config)?);
            }
            if matches!(suite, Suite::Transfer | Suite::All) {
                reports.push(transfer(&config)?);
            }
            emit_suites(&reports, g.format)
        }
    };
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::FAILURE
        }
    }
}
