use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use runperm::generate::{
    format_partition, format_values, parse_partition, parse_permutation, parse_values, random_permutation,
    runs_permutation, strict_permutation, sus_permutation, Interleave, Rng,
};
use runperm::perm::{CoderConfig, PermutationCoder};
use runperm::runs::{ascending_runs, head_run_profile, monotone_runs, strict_ascending_runs, Direction};
use runperm::sort::{sort_by_runs, sort_by_sus, SortStats};
use runperm::strict::{choose_bitmap_variant, StrictPermutationCoder};
use runperm::sus::{partition_sus, StrictSusCoder, SusCoder};
use runperm::BitVectorVariant;

#[derive(Parser)]
#[command(name = "runperm", version, about = "Compressed permutations from run decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a permutation of a given structure.
    Gen(GenArgs),
    /// Encode a permutation file into a binary coder file.
    Encode(EncodeArgs),
    /// Decode a coder file back to a permutation file.
    Decode(DecodeArgs),
    /// Evaluate π(i) or π⁻¹(j) on a coder file.
    Query(QueryArgs),
    /// Print decomposition and size statistics as key=value lines.
    Stats(StatsArgs),
    /// Sort an array file and report comparison counts.
    Sort(SortArgs),
    /// Check a coder file against its source permutation.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Random,
    Runs,
    Strict,
    Sus,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterleaveArg {
    Uniform,
    RoundRobin,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    /// Permutation length (random, strict, sus).
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated run lengths (runs).
    #[arg(long, value_delimiter = ',')]
    lengths: Vec<usize>,
    /// Comma-separated run directions, `asc` or `desc` (runs; default all asc).
    #[arg(long, value_delimiter = ',')]
    directions: Vec<String>,
    /// Number of strict runs (strict).
    #[arg(long)]
    tau: Option<usize>,
    /// Number of upsequences (sus).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "uniform")]
    interleave: InterleaveArg,
    /// Upsequences of consecutive values (sus).
    #[arg(long)]
    strict_values: bool,
    /// Also write the planted partition (sus).
    #[arg(long)]
    partition_out: Option<PathBuf>,
    #[arg(long, env = "RUNPERM_SEED")]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoderKind {
    Runs,
    Strict,
    Sus,
    StrictSus,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    Compressed,
    Sparse,
}

impl From<VariantArg> for BitVectorVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => BitVectorVariant::Plain,
            VariantArg::Compressed => BitVectorVariant::Compressed,
            VariantArg::Sparse => BitVectorVariant::Sparse,
        }
    }
}

#[derive(Args, Clone)]
struct CoderOptions {
    /// Tree arity; defaults to max(2, ⌊√lg n⌋).
    #[arg(long)]
    arity: Option<usize>,
    /// Bitvector variant for node sequences and run bitmaps.
    #[arg(long, value_enum, default_value = "compressed")]
    bitvector: VariantArg,
    /// Bitmap variant for the strict coder; chosen from n and τ if absent.
    #[arg(long, value_enum)]
    strict_bitmaps: Option<VariantArg>,
    /// Use monotone (ascending and descending) runs.
    #[arg(long)]
    mixed: bool,
    /// Keep unbounded Huffman depths.
    #[arg(long)]
    no_depth_limit: bool,
}

impl CoderOptions {
    fn config(&self) -> CoderConfig {
        let mut config = CoderConfig::default()
            .with_variant(self.bitvector.into())
            .with_mixed(self.mixed)
            .with_depth_limit(!self.no_depth_limit);
        if let Some(t) = self.arity {
            config = config.with_arity(t);
        }
        config
    }
}

#[derive(Args)]
struct EncodeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "runs")]
    coder: CoderKind,
    /// Subsequence labels for the sus coder (`n k` then the labels).
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Per-label directions with --partition, making the labels monotone
    /// subsequences rather than upsequences.
    #[arg(long, value_delimiter = ',')]
    directions: Vec<String>,
    #[command(flatten)]
    options: CoderOptions,
}

#[derive(Args)]
struct DecodeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct QueryTarget {
    #[arg(long)]
    apply: Option<usize>,
    #[arg(long)]
    inverse: Option<usize>,
}

#[derive(Args)]
struct QueryArgs {
    input: PathBuf,
    #[command(flatten)]
    target: QueryTarget,
}

#[derive(Args)]
struct StatsArgs {
    input: PathBuf,
    #[command(flatten)]
    options: CoderOptions,
}

#[derive(Clone, Copy, ValueEnum)]
enum SortMethod {
    Runs,
    Sus,
}

#[derive(Args)]
struct SortArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "runs")]
    method: SortMethod,
    /// Detect descending runs too (runs method).
    #[arg(long)]
    mixed: bool,
    /// Where to write the sorted array; only statistics are printed if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    coder: PathBuf,
    source: PathBuf,
    /// Random point queries in each direction.
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    #[arg(long, env = "RUNPERM_SEED", default_value_t = 0)]
    seed: u64,
}

enum AnyCoder {
    Runs(PermutationCoder),
    Strict(StrictPermutationCoder),
    Sus(SusCoder),
    StrictSus(StrictSusCoder),
}

impl AnyCoder {
    fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let mut r = bytes.as_slice();
        let coder = match bytes.get(..4) {
            Some(b"RPRM") => Self::Runs(PermutationCoder::read_from(&mut r)?),
            Some(b"RPSR") => Self::Strict(StrictPermutationCoder::read_from(&mut r)?),
            Some(b"RPSU") => Self::Sus(SusCoder::read_from(&mut r)?),
            Some(b"RPIV") => Self::StrictSus(StrictSusCoder::read_from(&mut r)?),
            _ => bail!("{} is not a coder file", path.display()),
        };
        ensure!(r.is_empty(), "{} has {} trailing bytes", path.display(), r.len());
        Ok(coder)
    }

    fn write(&self, w: &mut impl Write) -> Result<()> {
        match self {
            Self::Runs(c) => c.write_to(w)?,
            Self::Strict(c) => c.write_to(w)?,
            Self::Sus(c) => c.write_to(w)?,
            Self::StrictSus(c) => c.write_to(w)?,
        }
        Ok(())
    }

    fn len(&self) -> usize {
        match self {
            Self::Runs(c) => c.len(),
            Self::Strict(c) => c.len(),
            Self::Sus(c) => c.len(),
            Self::StrictSus(c) => c.len(),
        }
    }

    fn apply(&self, i: usize) -> Result<usize> {
        Ok(match self {
            Self::Runs(c) => c.apply(i)?,
            Self::Strict(c) => c.apply(i)?,
            Self::Sus(c) => c.apply(i)?,
            Self::StrictSus(c) => c.apply(i)?,
        })
    }

    fn inverse(&self, j: usize) -> Result<usize> {
        Ok(match self {
            Self::Runs(c) => c.inverse(j)?,
            Self::Strict(c) => c.inverse(j)?,
            Self::Sus(c) => c.inverse(j)?,
            Self::StrictSus(c) => c.inverse(j)?,
        })
    }

    fn decode(&self) -> Vec<usize> {
        match self {
            Self::Runs(c) => c.decode(),
            Self::Strict(c) => c.decode(),
            Self::Sus(c) => c.decode(),
            Self::StrictSus(c) => c.decode(),
        }
    }
}

fn parse_directions(items: &[String], count: usize) -> Result<Vec<Direction>> {
    if items.is_empty() {
        return Ok(vec![Direction::Ascending; count]);
    }
    ensure!(items.len() == count, "expected {count} directions, got {}", items.len());
    items
        .iter()
        .map(|d| match d.as_str() {
            "asc" | "a" | "up" => Ok(Direction::Ascending),
            "desc" | "d" | "down" => Ok(Direction::Descending),
            other => bail!("unknown direction {other:?}"),
        })
        .collect()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_permutation(path: &Path) -> Result<Vec<usize>> {
    parse_permutation(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let mut rng = Rng::new(args.seed);
    let need = |v: Option<usize>, name: &str| v.with_context(|| format!("--{name} is required"));
    let mut partition = None;
    let perm = match args.kind {
        GenKind::Random => random_permutation(need(args.n, "n")?, &mut rng),
        GenKind::Runs => {
            ensure!(!args.lengths.is_empty(), "--lengths is required");
            let dirs = parse_directions(&args.directions, args.lengths.len())?;
            runs_permutation(&args.lengths, &dirs, &mut rng)?
        }
        GenKind::Strict => strict_permutation(need(args.n, "n")?, need(args.tau, "tau")?, &mut rng)?,
        GenKind::Sus => {
            let interleave = match args.interleave {
                InterleaveArg::Uniform => Interleave::Uniform,
                InterleaveArg::RoundRobin => Interleave::RoundRobin,
            };
            let (perm, p) = sus_permutation(
                need(args.n, "n")?,
                need(args.k, "k")?,
                interleave,
                args.strict_values,
                &mut rng,
            )?;
            partition = Some(p);
            perm
        }
    };
    if let Some(path) = &args.partition_out {
        let p = partition.context("--partition-out only applies to sus")?;
        fs::write(path, format_partition(&p)).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(args.output.as_deref(), &format_values(&perm))
}

fn encode(args: EncodeArgs) -> Result<()> {
    let perm = read_permutation(&args.input)?;
    let config = args.options.config();
    ensure!(
        args.partition.is_none() || args.coder == CoderKind::Sus,
        "--partition applies to the sus coder only"
    );
    let coder = match args.coder {
        CoderKind::Runs => AnyCoder::Runs(PermutationCoder::encode(&perm, config)?),
        CoderKind::Strict => {
            let variant = match args.options.strict_bitmaps {
                Some(v) => v.into(),
                None => choose_bitmap_variant(perm.len(), strict_ascending_runs(&perm)?.run_count()),
            };
            AnyCoder::Strict(StrictPermutationCoder::encode(&perm, config, variant)?)
        }
        CoderKind::Sus => {
            let partition = args
                .partition
                .as_deref()
                .map(|p| parse_partition(&read_text(p)?).with_context(|| format!("parsing {}", p.display())))
                .transpose()?;
            match (&partition, args.directions.is_empty()) {
                (Some(p), false) => {
                    let dirs = parse_directions(&args.directions, p.k())?;
                    AnyCoder::Sus(SusCoder::encode_sms(&perm, p, &dirs, config)?)
                }
                (None, false) => bail!("--directions needs --partition"),
                _ => AnyCoder::Sus(SusCoder::encode_sus(&perm, partition.as_ref(), config)?),
            }
        }
        CoderKind::StrictSus => AnyCoder::StrictSus(StrictSusCoder::encode(&perm, config)?),
    };
    let mut out = Vec::new();
    coder.write(&mut out)?;
    fs::write(&args.output, out).with_context(|| format!("writing {}", args.output.display()))
}

fn decode(args: DecodeArgs) -> Result<()> {
    let coder = AnyCoder::read(&args.input)?;
    emit(args.output.as_deref(), &format_values(&coder.decode()))
}

fn query(args: QueryArgs) -> Result<()> {
    let coder = AnyCoder::read(&args.input)?;
    let value = match (args.target.apply, args.target.inverse) {
        (Some(i), _) => coder.apply(i)?,
        (_, Some(j)) => coder.inverse(j)?,
        _ => unreachable!("clap requires one target"),
    };
    println!("{value}");
    Ok(())
}

fn stats(args: StatsArgs) -> Result<()> {
    let perm = read_permutation(&args.input)?;
    let n = perm.len();
    let config = args.options.config();
    let mut lines: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| lines.push((k.to_string(), v));

    put("n", n.to_string());
    let runs = ascending_runs(&perm)?;
    put("rho", runs.run_count().to_string());
    put("h_runs", format!("{:.6}", runs.entropy()));
    let mono = monotone_runs(&perm)?;
    put("rho_monotone", mono.run_count().to_string());
    put("h_monotone", format!("{:.6}", mono.entropy()));
    let strict = strict_ascending_runs(&perm)?;
    put("tau", strict.run_count().to_string());
    put("h_strict", format!("{:.6}", strict.entropy()));
    let heads = head_run_profile(&strict);
    put("hruns", heads.run_count().to_string());
    put("h_hruns", format!("{:.6}", heads.entropy()));
    put("hruns_max", heads.lengths().iter().max().copied().unwrap_or(0).to_string());
    let sus = partition_sus(&perm)?;
    put("nsus", sus.k().to_string());
    put("h_sus", format!("{:.6}", sus.entropy()));

    let coder = PermutationCoder::encode(&perm, config)?;
    let space = coder.measured_size_bits();
    put("runs.arity", coder.arity().to_string());
    put("runs.entropy_bits", format!("{:.1}", coder.payload_entropy_bits()));
    put("runs.payload_bits", space.sequences.payload.to_string());
    put("runs.index_bits", space.sequences.index.to_string());
    put("runs.run_starts_bits", space.run_starts.total().to_string());
    put("runs.directions_bits", space.directions.total().to_string());
    put("runs.tree_bits", space.tree.to_string());
    put("runs.total_bits", space.total().to_string());

    let variant = match args.options.strict_bitmaps {
        Some(v) => v.into(),
        None => choose_bitmap_variant(n, strict.run_count()),
    };
    let s = StrictPermutationCoder::encode(&perm, config, variant)?.measured_size_bits();
    put("strict.bitmaps", variant.name().to_string());
    put("strict.r_bits", s.r.total().to_string());
    put("strict.r_inv_bits", s.r_inv.total().to_string());
    put("strict.inner_bits", s.inner.total().to_string());
    put("strict.total_bits", s.total().to_string());

    let c = SusCoder::encode_sus(&perm, Some(&sus), config)?;
    let s = c.measured_size_bits();
    put("sus.entropy_bits", format!("{:.1}", c.payload_entropy_bits()));
    put("sus.labels_bits", (s.labels.total() + s.labels_overhead).to_string());
    put("sus.boundaries_bits", s.boundaries.total().to_string());
    put("sus.inner_bits", s.inner.total().to_string());
    put("sus.total_bits", s.total().to_string());

    let s = StrictSusCoder::encode(&perm, config)?.measured_size_bits();
    put("strict_sus.total_bits", s.total().to_string());

    let mut out = io::stdout().lock();
    for (k, v) in lines {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

fn sort(args: SortArgs) -> Result<()> {
    let text = read_text(&args.input)?;
    let values = parse_values(&text).with_context(|| format!("parsing {}", args.input.display()))?;
    let (sorted, stats): (Vec<u64>, SortStats) = match args.method {
        SortMethod::Runs => sort_by_runs(&values, args.mixed),
        SortMethod::Sus => sort_by_sus(&values),
    };
    if let Some(path) = &args.output {
        fs::write(path, format_values(&sorted)).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("n={}", values.len());
    println!("comparisons={}", stats.comparisons);
    println!("runs_detected={}", stats.runs_detected);
    println!("entropy={:.6}", stats.entropy);
    println!("element_moves={}", stats.element_moves);
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<()> {
    let coder = AnyCoder::read(&args.coder)?;
    let perm = read_permutation(&args.source)?;
    let n = perm.len();
    ensure!(coder.len() == n, "coder holds {} elements, source {n}", coder.len());
    let decoded = coder.decode();
    if let Some(i) = (0..n).find(|&i| decoded[i] != perm[i]) {
        bail!("decoded value at {} is {}, expected {}", i + 1, decoded[i], perm[i]);
    }
    let mut inv = vec![0; n];
    for (i, &v) in perm.iter().enumerate() {
        inv[v - 1] = i + 1;
    }
    let mut rng = Rng::new(args.seed);
    for _ in 0..args.queries {
        let i = rng.range(1, n);
        let got = coder.apply(i)?;
        ensure!(got == perm[i - 1], "apply({i}) = {got}, expected {}", perm[i - 1]);
        let j = rng.range(1, n);
        let got = coder.inverse(j)?;
        ensure!(got == inv[j - 1], "inverse({j}) = {got}, expected {}", inv[j - 1]);
    }
    let mut again = Vec::new();
    coder.write(&mut again)?;
    ensure!(again == fs::read(&args.coder)?, "re-encoding is not byte-identical");
    println!("ok n={n} queries={}", args.queries);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Query(a) => query(a),
        Command::Stats(a) => stats(a),
        Command::Sort(a) => sort(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("runperm: {e:#}");
            ExitCode::FAILURE
        }
    }
}
