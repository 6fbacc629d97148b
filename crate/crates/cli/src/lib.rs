//! Command-line surface for MAKE parameter generation, exchange simulation,
//! key recovery, self-test and benchmarking.

pub mod schema;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use make_core::selftest::{self, SelftestOptions};
use make_core::{gen_params, run_attack, run_exchange, AttackInput, GroupSpec, PrivateExponent, Transcript};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use schema::{
    ring_for, sha256_hex, LoadedParams, ParamsFile, ParamsRef, ReportFile, SchemaError, TimingsJson, TranscriptFile,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
    #[error("attack failed: {0}")]
    Attack(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Attack(_) => 3,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "make-attack",
    version,
    about = "MAKE key exchange and linear key-recovery attack"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate public parameters (M, H1, H2).
    Gen(GenArgs),
    /// Run an honest exchange on a params file and write the transcript.
    Exchange(ExchangeArgs),
    /// Recover the shared key from a transcript.
    Attack(AttackArgs),
    /// Run the property suites.
    Selftest(SelftestArgs),
    /// Time the attack stages over a list of configurations.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub prime: u64,
    /// Built-in name (trivial, c2, s3, d4, q8, a5) or generators such as
    /// "1,0,2;1,2,0". Omit (or "none") for matrices over Z_p.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExchangeArgs {
    /// Params file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Private exponents are drawn from [2, 2^bits).
    #[arg(long, default_value_t = make_core::protocol::DEFAULT_EXPONENT_BITS)]
    pub x_bits: u32,
    /// Record x, y and the shared key in the transcript.
    #[arg(long)]
    pub demo: bool,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    /// Transcript file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 7)]
    pub prime: u64,
    /// Comma-separated group names; "none" is matrices over Z_p.
    #[arg(long)]
    pub group: Option<String>,
    /// Comma-separated matrix sizes.
    #[arg(long)]
    pub dim: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = make_core::protocol::DEFAULT_EXPONENT_BITS)]
    pub x_bits: u32,
    /// Also write the rows as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Exchange(a) => cmd_exchange(&a),
        Command::Attack(a) => cmd_attack(&a),
        Command::Selftest(a) => cmd_selftest(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn parse_group(s: Option<&str>) -> CliResult<Option<GroupSpec>> {
    match s.map(str::trim) {
        None | Some("none") => Ok(None),
        Some(s) => GroupSpec::parse(s).map(Some).map_err(usage),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("schema types serialize");
    s.push('\n');
    s
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(usage),
    }
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, bytes: &[u8]) -> CliResult<T> {
    // serde_json's message already ends with "at line L column C"
    serde_json::from_slice(bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn schema_error(path: &Path, e: SchemaError) -> CliError {
    usage(format!("{}: {e}", path.display()))
}

pub fn load_params(path: &Path) -> CliResult<(LoadedParams, Vec<u8>)> {
    let bytes = read_input(path)?;
    let file: ParamsFile = parse_json(path, &bytes)?;
    let loaded = file.decode().map_err(|e| schema_error(path, e))?;
    Ok((loaded, bytes))
}

fn cmd_gen(a: &GenArgs) -> CliResult<()> {
    let group = parse_group(a.group.as_deref())?;
    let (codec, json) = ring_for(a.prime, group.as_ref()).map_err(usage)?;
    let (_, params) = gen_params(a.prime, group.as_ref(), a.dim, a.seed).map_err(usage)?;
    write_output(a.out.as_deref(), &to_json(&ParamsFile::encode(&params, &codec, json)))
}

/// `params` as seen from the directory holding `out`: relative when it lies
/// below that directory, absolute otherwise.
fn params_reference(params: &Path, out: Option<&Path>) -> CliResult<String> {
    let abs = fs::canonicalize(params).map_err(|e| usage(format!("{}: {e}", params.display())))?;
    let base = out
        .and_then(|o| o.parent())
        .map(|d| if d.as_os_str().is_empty() { Path::new(".") } else { d })
        .and_then(|d| fs::canonicalize(d).ok());
    let shown = match base.as_deref().and_then(|b| abs.strip_prefix(b).ok()) {
        Some(rel) => rel.to_path_buf(),
        None => abs,
    };
    Ok(shown.to_string_lossy().into_owned())
}

fn cmd_exchange(a: &ExchangeArgs) -> CliResult<()> {
    let (loaded, bytes) = load_params(&a.input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let x = PrivateExponent::sample(&mut rng, a.x_bits).map_err(usage)?.value();
    let y = PrivateExponent::sample(&mut rng, a.x_bits).map_err(usage)?.value();
    let t = run_exchange(&loaded.params, x, y).map_err(|e| CliError::Verification(e.to_string()))?;
    let codec = &loaded.codec;
    let secrets = t.secrets.as_ref().filter(|_| a.demo);
    let file = TranscriptFile {
        params_ref: ParamsRef {
            path: params_reference(&a.input, a.out.as_deref())?,
            sha256: sha256_hex(&bytes),
        },
        a: codec.encode_matrix(&t.a),
        b: codec.encode_matrix(&t.b),
        x: secrets.map(|s| s.x.to_string()),
        y: secrets.map(|s| s.y.to_string()),
        k: secrets.map(|s| codec.encode_matrix(&s.key)),
    };
    write_output(a.out.as_deref(), &to_json(&file))
}

/// A decoded transcript with the parameters it references.
pub struct LoadedTranscript {
    pub loaded: LoadedParams,
    pub input: AttackInput<make_core::GroupRing>,
    pub key: Option<make_core::GroupRingMatrix>,
}

pub fn load_transcript(path: &Path) -> CliResult<LoadedTranscript> {
    let bytes = read_input(path)?;
    let file: TranscriptFile = parse_json(path, &bytes)?;
    let referenced = Path::new(&file.params_ref.path);
    let params_path = if referenced.is_absolute() {
        referenced.to_path_buf()
    } else {
        path.parent().unwrap_or(Path::new(".")).join(referenced)
    };
    let (loaded, params_bytes) = load_params(&params_path)?;
    if sha256_hex(&params_bytes) != file.params_ref.sha256.to_ascii_lowercase() {
        return Err(CliError::Verification(format!(
            "{}: params_ref.sha256 does not match {}",
            path.display(),
            params_path.display()
        )));
    }
    let n = loaded.params.n();
    let decode = |m, name| {
        loaded
            .codec
            .decode_matrix(m, n, name)
            .map_err(|e| schema_error(path, e))
    };
    let a = decode(&file.a, "A")?;
    let b = decode(&file.b, "B")?;
    let key = file.k.as_ref().map(|k| decode(k, "K")).transpose()?;
    let input = AttackInput {
        params: loaded.params.clone(),
        a,
        b,
    };
    Ok(LoadedTranscript { loaded, input, key })
}

/// Runs the attack from both sides and compares with the demo key if present.
pub fn attack_report(t: &LoadedTranscript) -> ReportFile {
    let ctx = &t.loaded.ctx;
    let codec = &t.loaded.codec;
    let system_size = ctx.k() * ctx.k();
    match run_attack(&t.input, ctx) {
        Err(e) => ReportFile {
            success: false,
            t: None,
            recovered_k: None,
            matches: None,
            consistent: None,
            timings: TimingsJson::default(),
            system_size,
            error: Some(e.to_string()),
        },
        Ok(r) => {
            let consistent = matches!(run_attack(&t.input.swapped(), ctx), Ok(s) if s.recovered_key == r.recovered_key);
            let matches = t.key.as_ref().map(|k| *k == r.recovered_key);
            ReportFile {
                success: consistent && matches != Some(false),
                t: Some(codec.encode_vector(r.solution.data())),
                recovered_k: Some(codec.encode_matrix(&r.recovered_key)),
                matches,
                consistent: Some(consistent),
                timings: r.timings.into(),
                system_size: r.system_size,
                error: None,
            }
        }
    }
}

fn cmd_attack(a: &AttackArgs) -> CliResult<()> {
    let t = load_transcript(&a.input)?;
    let report = attack_report(&t);
    write_output(a.out.as_deref(), &to_json(&report))?;
    if report.success {
        return Ok(());
    }
    let why = match (&report.error, report.matches, report.consistent) {
        (Some(e), _, _) => e.clone(),
        (None, Some(false), _) => "recovered key does not match the transcript key".into(),
        _ => "recoveries from the two sides disagree".into(),
    };
    Err(CliError::Attack(why))
}

fn cmd_selftest(a: &SelftestArgs) -> CliResult<()> {
    let opts = SelftestOptions {
        quick: a.quick,
        inject_fault: a.inject_fault,
        seed: a.seed,
    };
    let reports = selftest::run_all(&opts);
    for r in &reports {
        println!(
            "{} {:<24} {:>6} trials {:>4} failures {:>9.3}s",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.trials,
            r.failures,
            r.elapsed.as_secs_f64()
        );
        if let Some(f) = &r.first_failure {
            println!("     first failure: {f}");
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{failed} of {} suites failed",
            reports.len()
        )))
    }
}

/// Default benchmark list, `k = 3, 6, 12, 18` at `p = 7`.
const DEFAULT_BENCH: [(&str, usize); 4] = [("none", 3), ("s3", 1), ("s3", 2), ("s3", 3)];

/// `L` and the augmented copy used by elimination are both `k^4` words.
const BENCH_MEMORY_BUDGET: u128 = 4 << 30;

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub group: String,
    pub n: usize,
    pub k: usize,
    pub system_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<TimingsJson>,
    pub recovered: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

fn split_list(s: &str, what: &str) -> CliResult<Vec<String>> {
    let items: Vec<String> = s
        .split(',')
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect();
    if items.is_empty() {
        return Err(usage(format!("empty {what} list")));
    }
    Ok(items)
}

pub fn bench_configs(group: Option<&str>, dim: Option<&str>) -> CliResult<Vec<(String, usize)>> {
    if group.is_none() && dim.is_none() {
        return Ok(DEFAULT_BENCH.iter().map(|&(g, n)| (g.to_string(), n)).collect());
    }
    let groups = split_list(group.unwrap_or("s3"), "group")?;
    let dims = split_list(dim.unwrap_or("1,2,3"), "dim")?
        .iter()
        .map(|d| d.parse::<usize>().map_err(|_| usage(format!("bad dimension {d:?}"))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(groups
        .iter()
        .flat_map(|g| dims.iter().map(move |&n| (g.clone(), n)))
        .collect())
}

fn bench_row(a: &BenchArgs, group: &str, n: usize, index: u64) -> CliResult<BenchRow> {
    let spec = parse_group(Some(group))?;
    let m = match &spec {
        Some(s) => s.build().map_err(usage)?.table.order(),
        None => 1,
    };
    let k = m * n;
    let mut row = BenchRow {
        group: group.to_string(),
        n,
        k,
        system_size: k * k,
        timings: None,
        recovered: false,
        skipped: None,
    };
    let words = 2 * (k as u128).pow(4) * 8;
    if words > BENCH_MEMORY_BUDGET {
        row.skipped = Some(format!("needs about {} GiB for the linear system", words >> 30));
        return Ok(row);
    }
    let seed = a.seed.wrapping_add(index);
    let (ctx, params) = gen_params(a.prime, spec.as_ref(), n, seed).map_err(usage)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = PrivateExponent::sample(&mut rng, a.x_bits).map_err(usage)?.value();
    let y = PrivateExponent::sample(&mut rng, a.x_bits).map_err(usage)?.value();
    let t: Transcript<_> = run_exchange(&params, x, y).map_err(|e| CliError::Verification(e.to_string()))?;
    let r = run_attack(&AttackInput::from_transcript(&t), &ctx).map_err(|e| CliError::Attack(e.to_string()))?;
    row.recovered = t.secrets.map(|s| s.key) == Some(r.recovered_key);
    row.timings = Some(r.timings.into());
    Ok(row)
}

fn cmd_bench(a: &BenchArgs) -> CliResult<()> {
    let configs = bench_configs(a.group.as_deref(), a.dim.as_deref())?;
    println!(
        "{:<8} {:>3} {:>4} {:>9} {:>10} {:>10} {:>10} {:>10} {:>10}  key",
        "group", "n", "k", "k^2", "telescope", "build_L", "solve", "recover", "total"
    );
    let start = Instant::now();
    let mut rows = Vec::new();
    for (i, (g, n)) in configs.iter().enumerate() {
        let row = bench_row(a, g, *n, i as u64)?;
        match (&row.timings, &row.skipped) {
            (Some(t), _) => println!(
                "{:<8} {:>3} {:>4} {:>9} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}  {}",
                row.group,
                row.n,
                row.k,
                row.system_size,
                t.telescope,
                t.build_l,
                t.solve,
                t.recover,
                t.total,
                if row.recovered { "ok" } else { "WRONG" }
            ),
            (None, reason) => println!(
                "{:<8} {:>3} {:>4} {:>9}  skipped: {}",
                row.group,
                row.n,
                row.k,
                row.system_size,
                reason.as_deref().unwrap_or("")
            ),
        }
        rows.push(row);
    }
    let mut timed: Vec<_> = rows.iter().filter_map(|r| r.timings.map(|t| (r.k, t.total))).collect();
    timed.sort_by_key(|&(k, _)| k);
    let monotone = timed.windows(2).all(|w| w[0].0 == w[1].0 || w[0].1 <= w[1].1);
    println!(
        "total time {} in k; wall clock {:.2}s",
        if monotone { "nondecreasing" } else { "not monotone" },
        start.elapsed().as_secs_f64()
    );
    if let Some(out) = &a.out {
        write_output(Some(out), &to_json(&rows))?;
    }
    if rows.iter().any(|r| r.timings.is_some() && !r.recovered) {
        return Err(CliError::Attack("a benchmark run recovered the wrong key".into()));
    }
    Ok(())
}
