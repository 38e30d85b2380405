mod config;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sparse_polar::alist::{parse_alist, parse_alist_with_kinds, write_alist, write_kinds};
use sparse_polar::graph::build_encoding_graph;
use sparse_polar::polar::DEFAULT_DESIGN_SNR_DB;
use sparse_polar::sim::{self, SimConfig};
use sparse_polar::{prune, FactorGraph, PolarCode};

#[derive(Parser)]
#[command(name = "sparse-polar", version, about = "Polar codes as sparse LDPC-like codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a polar code and write its description as JSON.
    Construct {
        #[arg(short = 'N')]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_DESIGN_SNR_DB, allow_negative_numbers = true)]
        design_snr: f64,
        /// Output path; stdout if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Prune the encoding graph of a code, or a previously written ALIST.
    Prune(PruneArgs),
    /// Run a Monte-Carlo BER sweep.
    Simulate(SimulateArgs),
    /// Print dimensions, density and degree profiles of an ALIST matrix.
    Report {
        alist: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct PruneArgs {
    /// Code description written by `construct`.
    #[arg(long, conflicts_with = "alist", required_unless_present = "alist")]
    code: Option<PathBuf>,
    /// ALIST matrix to prune further.
    #[arg(long, requires = "kinds")]
    alist: Option<PathBuf>,
    /// Column-kind sidecar for `--alist`.
    #[arg(long)]
    kinds: Option<PathBuf>,
    /// Pruned matrix.
    #[arg(short, long)]
    out: PathBuf,
    /// Column kinds of the pruned matrix.
    #[arg(long)]
    out_kinds: PathBuf,
    /// JSON pruning report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write the unpruned matrix here, with its kinds next to it.
    #[arg(long)]
    before: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// arikan, spa-pruned or spa-dense.
    #[arg(long)]
    decoder: Option<String>,
    #[arg(short = 'N')]
    n: Option<String>,
    #[arg(short)]
    k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    design_snr: Option<String>,
    /// Eb/N0 sweep in dB, `start:step:stop` or a single value.
    #[arg(long, allow_hyphen_values = true)]
    ebn0: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long)]
    max_frames: Option<String>,
    #[arg(long)]
    min_frame_errors: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads, 0 for one per core. Results do not depend on it.
    #[arg(long)]
    workers: Option<String>,
    /// CSV output; stdout if omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Run manifest; defaults to `<out>.manifest.json` when `--out` is given.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<sparse_polar::Error> for Failure {
    fn from(e: sparse_polar::Error) -> Self {
        match e {
            sparse_polar::Error::Parameter(msg) => Failure::Usage(msg),
            other => Failure::Runtime(other.into()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct { n, k, design_snr, out } => construct(n, k, design_snr, out.as_deref()),
        Command::Prune(args) => prune_cmd(&args),
        Command::Simulate(args) => simulate(&args),
        Command::Report { alist, json } => report(&alist, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CodeFile {
    #[serde(rename = "N")]
    n: usize,
    k: usize,
    design_snr_db: f64,
    /// 1-based.
    info_set: Vec<usize>,
    z_profile: Vec<f64>,
    fingerprint: String,
}

fn construct(n: usize, k: usize, design_snr: f64, out: Option<&Path>) -> Result<(), Failure> {
    let code = PolarCode::construct(n, k, design_snr)?;
    let file = CodeFile {
        n,
        k,
        design_snr_db: design_snr,
        info_set: code.info_set_one_based(),
        z_profile: code.profile().map(|p| p.z.clone()).unwrap_or_default(),
        fingerprint: code.fingerprint(),
    };
    let text = serde_json::to_string_pretty(&file).context("serializing code")? + "\n";
    emit(out, &text)?;
    Ok(())
}

fn load_code(path: &Path) -> Result<PolarCode, Failure> {
    let text = read(path)?;
    let file: CodeFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let code = PolarCode::from_info_set_one_based(file.n, &file.info_set)
        .with_context(|| format!("invalid code in {}", path.display()))?;
    if code.info_len() != file.k {
        return Err(Failure::Runtime(anyhow::anyhow!(
            "{}: k = {} but the information set has {} entries",
            path.display(),
            file.k,
            code.info_len()
        )));
    }
    Ok(code)
}

fn prune_cmd(args: &PruneArgs) -> Result<(), Failure> {
    let graph = match (&args.code, &args.alist, &args.kinds) {
        (Some(code), _, _) => build_encoding_graph(&load_code(code)?),
        (None, Some(alist), Some(kinds)) => {
            let m = parse_alist_with_kinds(&read(alist)?, &read(kinds)?)
                .map_err(|e| anyhow::anyhow!("{}: {e}", alist.display()))?;
            FactorGraph::from_parity_matrix(&m)
        }
        _ => unreachable!("clap enforces the input combination"),
    };
    if let Some(before) = &args.before {
        let m = graph.to_parity_matrix();
        write(before, &write_alist(&m))?;
        write(&kinds_path(before), &write_kinds(m.col_kinds()))?;
    }
    let (pruned, report) = prune(graph);
    let m = pruned.to_parity_matrix();
    write(&args.out, &write_alist(&m))?;
    write(&args.out_kinds, &write_kinds(m.col_kinds()))?;
    if let Some(path) = &args.report {
        write(path, &(report.to_json() + "\n"))?;
    }
    eprintln!(
        "pruned {} -> {} in {} rounds",
        fmt_dims(report.initial.rows, report.initial.cols, report.initial.edges),
        fmt_dims(report.final_dims.rows, report.final_dims.cols, report.final_dims.edges),
        report.rounds
    );
    Ok(())
}

fn fmt_dims(rows: usize, cols: usize, edges: usize) -> String {
    format!("{rows}x{cols} ({edges} edges)")
}

fn kinds_path(alist: &Path) -> PathBuf {
    alist.with_extension("kinds")
}

#[derive(Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    tool_version: &'a str,
    config: &'a SimConfig,
    seed: u64,
    code_fingerprint: String,
    noise_model: &'a str,
    stopping_rule: BTreeMap<&'a str, &'a str>,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let mut kv = match &args.config {
        Some(path) => config::parse_kv(&read(path)?)
            .map_err(|p| Failure::Usage(format!("{}:\n  {}", path.display(), p.join("\n  "))))?,
        None => BTreeMap::new(),
    };
    let flags = [
        ("decoder", &args.decoder),
        ("N", &args.n),
        ("k", &args.k),
        ("design-snr", &args.design_snr),
        ("ebn0", &args.ebn0),
        ("max-iters", &args.max_iters),
        ("max-frames", &args.max_frames),
        ("min-frame-errors", &args.min_frame_errors),
        ("seed", &args.seed),
        ("workers", &args.workers),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            kv.insert(key.to_string(), v.clone());
        }
    }
    let config = config::build(&kv).map_err(|problems| {
        let usage = Cli::command()
            .find_subcommand_mut("simulate")
            .map(|c| c.render_usage().to_string())
            .unwrap_or_default();
        Failure::Usage(format!("invalid simulation config:\n  {}\n\n{usage}", problems.join("\n  ")))
    })?;

    let results = sim::run_ber(&config)?;
    let csv = sim::to_csv(&results);
    emit(args.out.as_deref(), &csv)?;

    let manifest_path = args
        .manifest
        .clone()
        .or_else(|| args.out.as_ref().map(|o| o.with_extension("manifest.json")));
    if let Some(path) = manifest_path {
        let code = PolarCode::construct(config.block_len, config.k, config.design_snr_db)?;
        let inputs = args.config.iter().map(|p| digest(p)).collect::<Result<_, _>>()?;
        let outputs = args.out.iter().map(|p| digest(p)).collect::<Result<_, _>>()?;
        let manifest = RunManifest {
            command: "simulate",
            tool_version: env!("CARGO_PKG_VERSION"),
            config: &config,
            seed: config.seed,
            code_fingerprint: code.fingerprint(),
            noise_model: "BPSK 1-2b, AWGN sigma^2 = 1/(2 R Eb/N0), LLR = 2y/sigma^2",
            stopping_rule: BTreeMap::from([
                ("arikan", "re-encoded u_hat equals x_hat"),
                ("spa-pruned", "all checks satisfied"),
                ("spa-dense", "all checks satisfied"),
            ]),
            inputs,
            outputs,
        };
        let text = serde_json::to_string_pretty(&manifest).context("serializing manifest")? + "\n";
        write(&path, &text)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportJson {
    rows: usize,
    cols: usize,
    edges: usize,
    density: f64,
    lambda: BTreeMap<usize, f64>,
    rho: BTreeMap<usize, f64>,
    lambda_polynomial: String,
    rho_polynomial: String,
}

fn report(path: &Path, json: bool) -> Result<(), Failure> {
    let m = parse_alist(&read(path)?).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let profile = m.degree_profile().map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let r = ReportJson {
        rows: m.rows(),
        cols: m.cols(),
        edges: m.num_edges(),
        density: m.density()?,
        lambda_polynomial: profile.lambda_polynomial(),
        rho_polynomial: profile.rho_polynomial(),
        lambda: profile.lambda,
        rho: profile.rho,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&r).context("serializing report")?);
        return Ok(());
    }
    let map = |m: &BTreeMap<usize, f64>| {
        let parts: Vec<String> = m.iter().map(|(d, f)| format!("{d}: {f}")).collect();
        format!("{{{}}}", parts.join(", "))
    };
    println!("dims: {} x {}", r.rows, r.cols);
    println!("edges: {}", r.edges);
    println!("density: {:.4}%", 100.0 * r.density);
    println!("lambda: {}", map(&r.lambda));
    println!("rho: {}", map(&r.rho));
    println!("λ(Z) = {}", r.lambda_polynomial);
    println!("ρ(Z) = {}", r.rho_polynomial);
    Ok(())
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn digest(path: &Path) -> anyhow::Result<FileDigest> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}
