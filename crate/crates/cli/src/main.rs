//! Command-line surface: key generation, verification, the size table,
//! the statistical harness, and micro-benchmarks.
//!
//! Exit codes: 0 success, 1 failed verification or failed statistical
//! verdict, 2 invalid parameters or usage, 3 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::RngCore;

use minrank_core::canonical::is_canonical;
use minrank_core::keygen::{
    generator, params_by_name, pk_size_bits, size_table, sk_size_bits, Params, PublicKey,
    SecretKey, Variant, REGISTRY,
};
use minrank_core::prg::Seed;
use minrank_core::stats::{
    biased_alpha_sampler, abort_stage_reports, distribution_projection_test, estimate_lemma,
    keygen3_sampler, reduce_r_sampler, LemmaKind, Projection, TrialReport,
};

#[derive(Parser)]
#[command(name = "minrank", version, about = "MinRank key generation with compressed public keys")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a keypair and write it to disk
    Keygen(KeygenArgs),
    /// Decompress a stored keypair and check the witness
    Verify(VerifyArgs),
    /// Print the public-key size table for all parameter sets
    Sizes(SizesArgs),
    /// Run the statistical harness
    Stats(StatsArgs),
    /// Time key generation and decompression
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Named parameter set (see `sizes` for the list)
    #[arg(long)]
    set: Option<String>,
    /// Field order (prime power), for explicit parameters
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Security parameter in bits (multiple of 8)
    #[arg(long, default_value_t = 128)]
    lambda: u32,
}

impl ParamArgs {
    fn resolve(&self) -> Result<Params, CliError> {
        if let Some(name) = &self.set {
            return params_by_name(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown parameter set {name:?}; known sets: {}",
                    REGISTRY.iter().map(|r| r.0).collect::<Vec<_>>().join(", ")
                ))
            });
        }
        match (self.q, self.m, self.n, self.k, self.r) {
            (Some(q), Some(m), Some(n), Some(k), Some(r)) => {
                Params::new(q, m, n, k, r, self.lambda)
                    .map_err(|e| CliError::Usage(e.to_string()))
            }
            _ => Err(CliError::Usage(
                "provide --set NAME or all of --q --m --n --k --r".into(),
            )),
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct KeygenArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Generator variant: 1, 2, or 3
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    /// Root seed as hex (lambda bits); defaults to MINRANK_SEED, then OS entropy
    #[arg(long)]
    seed: Option<String>,
    /// Output directory for pk.hex and sk.hex
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    /// Public-key file (hex)
    #[arg(long)]
    pk: PathBuf,
    /// Secret-key file (hex)
    #[arg(long)]
    sk: PathBuf,
}

#[derive(Args)]
struct SizesArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Which estimate to run: full_rank, invertible, e_in_cal_e, k_uniform,
    /// canonical_reducible, ix_invertible, product_uniform, r_success,
    /// abort_stages, projections, or all
    kind: String,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Master seed for the deterministic trial streams; defaults to
    /// MINRANK_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Rows for the full_rank / invertible / product_uniform kinds
    #[arg(long, default_value_t = 4)]
    s: usize,
    /// Columns for the full_rank / product_uniform kinds
    #[arg(long, default_value_t = 4)]
    t: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Timed iterations per operation
    #[arg(long, default_value_t = 20)]
    iters: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse::<u8>()
        .ok()
        .and_then(Variant::from_number)
        .ok_or_else(|| format!("invalid variant {s:?}; expected 1, 2, or 3"))
}

enum CliError {
    /// exit 1: a verification or statistical verdict failed
    Verdict(String),
    /// exit 2: bad parameters or usage
    Usage(String),
    /// exit 3: I/O failure
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verdict(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Verdict(m) | CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Keygen(args) => cmd_keygen(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sizes(args) => cmd_sizes(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn env_seed_bytes() -> Option<Vec<u8>> {
    std::env::var("MINRANK_SEED")
        .ok()
        .and_then(|s| hex::decode(s.trim()).ok())
}

fn root_seed(arg: &Option<String>, p: &Params) -> Result<Seed, CliError> {
    let bytes = if let Some(h) = arg {
        hex::decode(h.trim()).map_err(|e| CliError::Usage(format!("bad --seed hex: {e}")))?
    } else if let Some(env) = env_seed_bytes() {
        env
    } else {
        let mut buf = vec![0u8; p.seed_bytes()];
        rand::thread_rng().fill_bytes(&mut buf);
        buf
    };
    Seed::new(bytes, p.lambda).map_err(|e| CliError::Usage(e.to_string()))
}

fn master_seed(arg: Option<u64>) -> u64 {
    arg.or_else(|| {
        env_seed_bytes().map(|b| {
            let mut le = [0u8; 8];
            le[..b.len().min(8)].copy_from_slice(&b[..b.len().min(8)]);
            u64::from_le_bytes(le)
        })
    })
    .unwrap_or(0)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn read_hex_file(path: &Path) -> Result<Vec<u8>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    hex::decode(text.trim())
        .map_err(|e| CliError::Io(format!("decoding {}: {e}", path.display())))
}

fn cmd_keygen(args: KeygenArgs) -> Result<(), CliError> {
    let p = args.params.resolve()?;
    let root = root_seed(&args.seed, &p)?;
    let gen = generator(args.variant);
    let (pk, sk) = gen.generate(&root, &p).map_err(internal)?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", args.out.display())))?;
    let pk_path = args.out.join("pk.hex");
    let sk_path = args.out.join("sk.hex");
    write_text(&pk_path, &format!("{}\n", hex::encode(pk.to_bytes(&p))))?;
    write_text(&sk_path, &format!("{}\n", hex::encode(sk.to_bytes())))?;

    println!("variant: {}", args.variant.number());
    println!("pk: {} ({} bits)", pk_path.display(), pk_size_bits(&p, args.variant));
    println!("sk: {} ({} bits)", sk_path.display(), sk_size_bits(&p, args.variant));
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let p = args.params.resolve()?;
    let gen = generator(args.variant);
    let pk_bytes = read_hex_file(&args.pk)?;
    let sk_bytes = read_hex_file(&args.sk)?;
    let pk = PublicKey::from_bytes(&pk_bytes, &p, args.variant)
        .map_err(|e| CliError::Verdict(format!("malformed public key: {e}")))?;
    let sk = SecretKey::from_bytes(&sk_bytes, &p, args.variant)
        .map_err(|e| CliError::Verdict(format!("malformed secret key: {e}")))?;

    let inst_pk = gen.decompress_pk(&pk, &p).map_err(internal)?;
    let (inst_sk, wit) = gen
        .decompress_sk(&sk, &p)
        .map_err(|e| CliError::Verdict(format!("secret key decompression: {e}")))?;

    if inst_pk.matrices != inst_sk.matrices {
        return Err(CliError::Verdict("pk and sk decode to different instances".into()));
    }
    if !wit.is_valid_for(&inst_sk) {
        return Err(CliError::Verdict("witness does not satisfy the instance".into()));
    }
    let rank = wit.e.rank();
    if rank > p.r {
        return Err(CliError::Verdict(format!("rank(E) = {rank} exceeds r = {}", p.r)));
    }
    println!("witness: valid (rank(E) = {rank}, r = {})", p.r);
    println!(
        "canonical: {}",
        if is_canonical(&inst_sk) { "yes" } else { "no" }
    );
    Ok(())
}

fn cmd_sizes(args: SizesArgs) -> Result<(), CliError> {
    let rows = size_table();
    let text = match args.format {
        Format::Text => minrank_core::keygen::render_size_table(),
        Format::Csv => {
            let mut out =
                String::from("set,lambda,q,m,n,k,r,pk1_bits,pk2_bits,pk3_bits\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    row.name,
                    row.lambda,
                    row.q,
                    row.m,
                    row.n,
                    row.k,
                    row.r,
                    row.sizes[0],
                    row.sizes[1],
                    row.sizes[2]
                ));
            }
            out
        }
        Format::Json => {
            let value: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    serde_json::json!({
                        "set": row.name,
                        "lambda": row.lambda,
                        "q": row.q,
                        "m": row.m,
                        "n": row.n,
                        "k": row.k,
                        "r": row.r,
                        "pk_bits": row.sizes,
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&value).unwrap())
        }
    };
    match &args.out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn report_to_json(r: &TrialReport) -> serde_json::Value {
    serde_json::json!({
        "kind": r.kind,
        "trials": r.trials,
        "successes": r.successes,
        "estimate": r.estimate,
        "bound": r.bound,
        "sigma": r.sigma,
        "verdict": if r.verdict { "pass" } else { "fail" },
    })
}

fn emit_reports(reports: &[TrialReport], format: Format, out: &Option<PathBuf>) -> Result<(), CliError> {
    let text = match format {
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                s.push_str(&r.human_line());
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let mut s = format!("{}\n", TrialReport::CSV_HEADER);
            for r in reports {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let value: Vec<_> = reports.iter().map(report_to_json).collect();
            format!("{}\n", serde_json::to_string_pretty(&value).unwrap())
        }
    };
    match out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    if reports.iter().all(|r| r.verdict) {
        Ok(())
    } else {
        Err(CliError::Verdict("at least one statistical verdict failed".into()))
    }
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let p = args.params.resolve()?;
    let seed = master_seed(args.seed);
    let reports: Vec<TrialReport> = match args.kind.as_str() {
        "abort_stages" => abort_stage_reports(&p, args.trials, seed).map_err(internal)?,
        "projections" => {
            let mut a = reduce_r_sampler(&p, seed);
            let mut b = keygen3_sampler(&p, seed.wrapping_add(1));
            let res = distribution_projection_test(
                &mut a,
                &mut b,
                &Projection::all(),
                args.trials,
                p.q,
            )
            .map_err(internal)?;
            for (name, p_value) in &res.per_projection {
                println!("projection {name}: p = {p_value:.6}");
            }
            vec![res.report]
        }
        "projections_biased" => {
            // test-power control: the biased source must be rejected
            let mut a = keygen3_sampler(&p, seed);
            let mut b = biased_alpha_sampler(&p, seed.wrapping_add(1));
            let res = distribution_projection_test(
                &mut a,
                &mut b,
                &Projection::all(),
                args.trials,
                p.q,
            )
            .map_err(internal)?;
            let mut report = res.report;
            report.kind = "projections_biased_control".into();
            report.verdict = !report.verdict;
            vec![report]
        }
        "all" => {
            let mut reports = Vec::new();
            for kind in [
                LemmaKind::FullRank { s: args.s, t: args.t },
                LemmaKind::Invertible { s: args.s },
                LemmaKind::EInCalE,
                LemmaKind::CanonicalReducible,
                LemmaKind::IXInvertible,
                LemmaKind::RSuccess,
            ] {
                reports.push(estimate_lemma(kind, &p, args.trials, seed).map_err(internal)?);
            }
            reports
        }
        name => {
            let kind = LemmaKind::from_name(name, args.s, args.t).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown stats kind {name:?}; see `minrank stats --help`"
                ))
            })?;
            vec![estimate_lemma(kind, &p, args.trials, seed).map_err(internal)?]
        }
    };
    emit_reports(&reports, args.format, &args.out)
}

fn time_op(iters: u32, mut op: impl FnMut()) -> (f64, f64) {
    let mut samples: Vec<f64> = Vec::with_capacity(iters as usize);
    op(); // warm-up
    for _ in 0..iters {
        let start = Instant::now();
        op();
        samples.push(start.elapsed().as_secs_f64() * 1e3);
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = samples[samples.len() / 2];
    let p95 = samples[((samples.len() as f64 * 0.95) as usize).min(samples.len() - 1)];
    (median, p95)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let p = args.params.resolve()?;
    let mut rows: Vec<(String, f64, f64)> = Vec::new();
    for variant in Variant::all() {
        let gen = generator(variant);
        let mut seed_bytes = vec![0u8; p.seed_bytes()];
        rand::thread_rng().fill_bytes(&mut seed_bytes);
        let root = Seed::new(seed_bytes, p.lambda).map_err(internal)?;
        let (pk, sk) = gen.generate(&root, &p).map_err(internal)?;

        let (med, p95) = time_op(args.iters, || {
            gen.generate(&root, &p).unwrap();
        });
        rows.push((format!("keygen{}", variant.number()), med, p95));
        let (med, p95) = time_op(args.iters, || {
            gen.decompress_pk(&pk, &p).unwrap();
        });
        rows.push((format!("decompress_pk{}", variant.number()), med, p95));
        let (med, p95) = time_op(args.iters, || {
            gen.decompress_sk(&sk, &p).unwrap();
        });
        rows.push((format!("decompress_sk{}", variant.number()), med, p95));
    }
    match args.format {
        Format::Csv => {
            println!("operation,median_ms,p95_ms");
            for (name, med, p95) in &rows {
                println!("{name},{med:.3},{p95:.3}");
            }
        }
        Format::Json => {
            let value: Vec<_> = rows
                .iter()
                .map(|(name, med, p95)| {
                    serde_json::json!({"operation": name, "median_ms": med, "p95_ms": p95})
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
        Format::Text => {
            println!("{:<18} {:>10} {:>10}", "operation", "median ms", "p95 ms");
            for (name, med, p95) in &rows {
                println!("{name:<18} {med:>10.3} {p95:>10.3}");
            }
        }
    }
    Ok(())
}
