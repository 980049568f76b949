//! Command-line front end: `keygen`, `encrypt`, `decrypt`, `keystream`,
//! `sac`, `nist` and `analyze-rule`.
//!
//! Data goes to `--out` (or stdout); seeds, summaries and errors go to
//! stderr. Every error is one line of the form
//! `error: kind=<kind> code=<exit code> <message>`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::analyze_rule;
use crate::cipher::{self, CipherKey};
use crate::keyfile::{self, bits_from_file_bytes};
use crate::nist::{run_battery, BatteryParams, TestKind};
use crate::rule::{RulePair, RuleTable};
use crate::sac::{self, RuleChoice, SacConfig};
use crate::{Bits, Error, NeighborhoodMode};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_SIZE: i32 = 4;
pub const EXIT_SPREAD: i32 = 5;
pub const EXIT_FORMAT: i32 = 6;
pub const EXIT_PARAM: i32 = 7;

#[derive(Debug, Parser)]
#[command(name = "rca-cipher", version, about = "Reversible cellular-automaton block cipher and its evaluation tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a new key file.
    Keygen(KeygenArgs),
    /// Encrypt a file under a key.
    Encrypt(EncryptArgs),
    /// Decrypt a file produced by `encrypt`.
    Decrypt(DecryptArgs),
    /// Emit the automaton's configurations as a bitstream.
    Keystream(KeystreamArgs),
    /// Measure the mean flip fraction per iteration (CSV).
    Sac(SacArgs),
    /// Run the randomness battery on files or generated keystream.
    Nist(NistArgs),
    /// Balance, nonlinearity, ANF and reversibility of rules.
    AnalyzeRule(AnalyzeArgs),
}

/// How a rule is chosen: a hex table, `random` (uniform) or `balanced`
/// (uniform among tables of half weight).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleSpec {
    Hex(String),
    Random,
    Balanced,
}

impl std::str::FromStr for RuleSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(RuleSpec::Random),
            "balanced" => Ok(RuleSpec::Balanced),
            _ if !s.is_empty() => Ok(RuleSpec::Hex(s.to_string())),
            _ => Err("empty rule".into()),
        }
    }
}

impl RuleSpec {
    fn resolve(&self, radius: usize, rng: &mut ChaCha8Rng) -> crate::Result<RuleTable> {
        match self {
            RuleSpec::Hex(h) => RuleTable::from_hex(radius, h),
            RuleSpec::Random => RuleTable::random(radius, rng),
            RuleSpec::Balanced => RuleTable::random_balanced(radius, rng),
        }
    }
}

#[derive(Debug, Args, Clone, Default)]
pub struct KeyParams {
    /// Block size N in bits [default: 32]
    #[arg(long)]
    pub size: Option<usize>,
    /// Neighborhood radius r [default: 2]
    #[arg(long)]
    pub radius: Option<usize>,
    /// Iterations per block, at least 3 [default: 16]
    #[arg(long)]
    pub iterations: Option<usize>,
    /// standard or spread [default: standard]
    #[arg(long)]
    pub mode: Option<NeighborhoodMode>,
    /// Hex rule table, `random` or `balanced` [default: balanced]
    #[arg(long)]
    pub rule: Option<RuleSpec>,
}

impl KeyParams {
    fn is_empty(&self) -> bool {
        self.size.is_none() && self.radius.is_none() && self.iterations.is_none() && self.mode.is_none() && self.rule.is_none()
    }

    fn build(&self, seed: u64) -> crate::Result<CipherKey> {
        let radius = self.radius.unwrap_or(2);
        let rule = self.rule.clone().unwrap_or(RuleSpec::Balanced).resolve(radius, &mut rule_rng(seed))?;
        CipherKey::new(
            RulePair::from_rule(rule),
            self.size.unwrap_or(32),
            self.iterations.unwrap_or(16),
            self.mode.unwrap_or_default(),
        )
    }
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    #[command(flatten)]
    pub key: KeyParams,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Key file to write [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncryptArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for the random first-block seed configuration
    #[arg(long)]
    pub seed: Option<u64>,
    /// Apply 10* padding to the plaintext
    #[arg(long)]
    pub pad: bool,
    /// Files are ASCII `0`/`1` text instead of raw bytes
    #[arg(long)]
    pub ascii: bool,
}

#[derive(Debug, Args)]
pub struct DecryptArgs {
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Strip 10* padding from the recovered plaintext
    #[arg(long)]
    pub pad: bool,
    #[arg(long)]
    pub ascii: bool,
}

#[derive(Debug, Args)]
pub struct KeystreamArgs {
    /// Key file; otherwise a key is built from the parameters below
    #[arg(long)]
    pub key: Option<PathBuf>,
    #[command(flatten)]
    pub params: KeyParams,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub bits: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub ascii: bool,
}

#[derive(Debug, Args)]
pub struct SacArgs {
    #[arg(long, default_value_t = 32)]
    pub size: usize,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long, default_value_t = NeighborhoodMode::Standard)]
    pub mode: NeighborhoodMode,
    /// Also run the spread neighborhood and report the iteration ratio
    #[arg(long)]
    pub compare_modes: bool,
    /// Hex rule, `random`, `balanced`, or `per-trial` for a fresh uniform
    /// rule in every trial
    #[arg(long, default_value = "balanced")]
    pub rule: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = sac::DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 64)]
    pub max_iter: usize,
    #[arg(long, default_value_t = sac::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = sac::DEFAULT_WINDOW)]
    pub window: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NistArgs {
    /// Bitstream file to test instead of generated keystream
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub ascii: bool,
    /// Key file for generated keystream
    #[arg(long)]
    pub key: Option<PathBuf>,
    #[command(flatten)]
    pub params: KeyParams,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sequences [default: 100, or all whole sequences in --in]
    #[arg(long)]
    pub sequences: Option<usize>,
    /// Bits per sequence
    #[arg(long, default_value_t = 1_000_000)]
    pub bits: usize,
    /// Block length of the block frequency test
    #[arg(long, default_value_t = 128)]
    pub block_len: usize,
    /// CSV report path
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    /// Rule to analyze; repeatable
    #[arg(long, required = true)]
    pub rule: Vec<RuleSpec>,
    /// Ring size used for the reversibility check
    #[arg(long, default_value_t = 32)]
    pub size: usize,
    #[arg(long, default_value_t = NeighborhoodMode::Standard)]
    pub mode: NeighborhoodMode,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            kind,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, "usage", message)
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Self::new(EXIT_IO, "io", format!("{}: {e}", path.display()))
    }

    pub fn line(&self) -> String {
        let msg = self.message.split_whitespace().collect::<Vec<_>>().join(" ");
        format!("error: kind={} code={} {}", self.kind, self.code, msg)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::LengthMismatch { .. } | Error::SizeTooSmall { .. } | Error::EmptyMessage | Error::StreamTooShort { .. } => {
                (EXIT_SIZE, "size")
            }
            Error::InvalidSpreadSize(_) => (EXIT_SPREAD, "spread"),
            Error::Parse(_) | Error::InvalidHex(_) => (EXIT_FORMAT, "format"),
            _ => (EXIT_PARAM, "parameter"),
        };
        Self::new(code, kind, e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name), runs one subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{}", CliError::usage(first.trim_start_matches("error: ")).line());
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.line());
            e.code
        }
    }
}

pub fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Keygen(a) => keygen(a, stdout, stderr),
        Command::Encrypt(a) => encrypt(a, stdout, stderr),
        Command::Decrypt(a) => decrypt(a, stdout),
        Command::Keystream(a) => keystream(a, stdout, stderr),
        Command::Sac(a) => sac_cmd(a, stdout, stderr),
        Command::Nist(a) => nist(a, stdout, stderr),
        Command::AnalyzeRule(a) => analyze(a, stdout, stderr),
    }
}

fn resolve_seed(seed: Option<u64>, stderr: &mut dyn Write) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    let _ = writeln!(stderr, "seed={seed}");
    seed
}

/// Rule draws use a stream of their own so they never overlap the
/// per-trial or per-sequence streams `0, 1, 2, ...` of the same seed.
fn rule_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    rng
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn read_key(path: &Path) -> CliResult<CipherKey> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|_| CliError::new(EXIT_FORMAT, "format", "key file is not UTF-8"))?;
    Ok(keyfile::parse_key(&text)?)
}

/// Writes to `path` through a temporary file in the same directory and a
/// rename, or to stdout when `path` is absent or `-`.
pub fn write_atomic(path: Option<&Path>, data: &[u8], stdout: &mut dyn Write) -> CliResult<()> {
    let Some(path) = path.filter(|p| p.as_os_str() != "-") else {
        return stdout
            .write_all(data)
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::new(EXIT_IO, "io", format!("stdout: {e}")));
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::usage(format!("{}: not a file path", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(data)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

fn encode_bits(bits: &Bits, ascii: bool) -> Vec<u8> {
    if ascii {
        format!("{bits}\n").into_bytes()
    } else {
        bits.to_bytes_msb()
    }
}

fn check_byte_blocks(key: &CipherKey, ascii: bool) -> CliResult<()> {
    if !ascii && !key.block_size().is_multiple_of(8) {
        return Err(CliError::new(
            EXIT_SIZE,
            "size",
            format!("block size {} is not a whole number of bytes; use --ascii", key.block_size()),
        ));
    }
    Ok(())
}

fn keygen(a: KeygenArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let seed = resolve_seed(a.seed, stderr);
    let key = a.key.build(seed)?;
    write_atomic(a.out.as_deref(), keyfile::format_key(&key).as_bytes(), stdout)
}

fn encrypt(a: EncryptArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let key = read_key(&a.key)?;
    check_byte_blocks(&key, a.ascii)?;
    let mut message = bits_from_file_bytes(&read_file(&a.input)?, a.ascii)?;
    if a.pad {
        message = keyfile::pad(&message, key.block_size());
    }
    let blocks = cipher::split_blocks(&message, key.block_size()).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("plaintext is not a whole number of {}-bit blocks (use --pad): {}", key.block_size(), err.message);
        err
    })?;
    let seed = resolve_seed(a.seed, stderr);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bundle = cipher::encrypt_message_random(&blocks, &key, &mut rng)?;
    write_atomic(a.out.as_deref(), &encode_bits(&keyfile::bundle_to_bits(&bundle), a.ascii), stdout)
}

fn decrypt(a: DecryptArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let key = read_key(&a.key)?;
    check_byte_blocks(&key, a.ascii)?;
    let data = bits_from_file_bytes(&read_file(&a.input)?, a.ascii)?;
    let bundle = keyfile::bundle_from_bits(&data, key.block_size())?;
    let mut plain = cipher::join_blocks(&cipher::decrypt_message(&bundle, &key)?);
    if a.pad {
        plain = keyfile::unpad(&plain)?;
    }
    write_atomic(a.out.as_deref(), &encode_bits(&plain, a.ascii), stdout)
}

fn key_from(path: Option<&Path>, params: &KeyParams, seed: u64) -> CliResult<CipherKey> {
    match path {
        Some(p) if params.is_empty() => read_key(p),
        Some(_) => Err(CliError::usage("--key cannot be combined with --size/--radius/--iterations/--mode/--rule")),
        None => Ok(params.build(seed)?),
    }
}

fn describe_key(key: &CipherKey) -> String {
    format!(
        "key: size={} radius={} iterations={} mode={} rule=0x{}",
        key.block_size(),
        key.radius(),
        key.iterations(),
        key.mode(),
        key.rules().r1().to_hex()
    )
}

fn keystream(a: KeystreamArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let seed = resolve_seed(a.seed, stderr);
    let key = key_from(a.key.as_deref(), &a.params, seed)?;
    let _ = writeln!(stderr, "{}", describe_key(&key));
    let stream = cipher::keystream_sequences(&key, 1, a.bits, seed)?.pop().expect("one sequence");
    write_atomic(a.out.as_deref(), &encode_bits(&stream, a.ascii), stdout)
}

fn sac_cmd(a: SacArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let seed = resolve_seed(a.seed, stderr);
    if !(a.epsilon > 0.0 && a.epsilon < 0.5) {
        return Err(CliError::new(EXIT_PARAM, "parameter", "--epsilon must lie in (0, 0.5)"));
    }
    if a.window == 0 {
        return Err(CliError::new(EXIT_PARAM, "parameter", "--window must be at least 1"));
    }
    let (rule, rule_label) = if a.rule == "per-trial" {
        (RuleChoice::RandomPerTrial, "per-trial".to_string())
    } else {
        let spec: RuleSpec = a.rule.parse().map_err(CliError::usage)?;
        let table = spec.resolve(a.radius, &mut rule_rng(seed))?;
        let label = format!("0x{}", table.to_hex());
        (RuleChoice::Fixed(RulePair::from_rule(table)), label)
    };
    let mut config = SacConfig::new(a.size, a.radius, a.mode, rule, seed);
    config.trials = a.trials;
    config.max_iterations = a.max_iter;
    let describe = |mode: NeighborhoodMode, t: Option<usize>| {
        format!(
            "summary: size={} radius={} mode={} rule={} trials={} seed={} iterations_to_sac={}",
            a.size,
            a.radius,
            mode,
            rule_label,
            a.trials,
            seed,
            t.map_or("none".to_string(), |t| t.to_string())
        )
    };
    if a.compare_modes {
        config.mode = NeighborhoodMode::Standard;
        let cmp = sac::compare_modes(&config, a.epsilon, a.window)?;
        let mut csv = String::from("mode,iteration,mean_flip_fraction\n");
        for (mode, curve) in [("standard", &cmp.baseline), ("spread", &cmp.candidate)] {
            for (t, f) in curve.mean_flip_fraction.iter().enumerate() {
                csv.push_str(&format!("{mode},{},{f:.6}\n", t + 1));
            }
        }
        write_atomic(a.out.as_deref(), csv.as_bytes(), stdout)?;
        let _ = writeln!(stderr, "{}", describe(NeighborhoodMode::Standard, cmp.baseline_iterations));
        let _ = writeln!(stderr, "{}", describe(NeighborhoodMode::Spread, cmp.candidate_iterations));
        let _ = writeln!(
            stderr,
            "ratio={}",
            cmp.ratio().map_or("none".to_string(), |r| format!("{r:.4}"))
        );
    } else {
        let curve = sac::sac_curve(&config)?;
        write_atomic(a.out.as_deref(), curve.to_csv().as_bytes(), stdout)?;
        let _ = writeln!(stderr, "{}", describe(a.mode, curve.iterations_to_sac(a.epsilon, a.window)));
    }
    Ok(())
}

fn nist(a: NistArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    if a.bits == 0 {
        return Err(CliError::new(EXIT_PARAM, "parameter", "--bits must be positive"));
    }
    let streams = if let Some(path) = &a.input {
        if a.key.is_some() || !a.params.is_empty() || a.seed.is_some() {
            return Err(CliError::usage("--in cannot be combined with key or generation options"));
        }
        let data = bits_from_file_bytes(&read_file(path)?, a.ascii)?;
        let available = data.len() / a.bits;
        let count = a.sequences.unwrap_or(available);
        if count == 0 || count > available {
            return Err(CliError::new(
                EXIT_SIZE,
                "size",
                format!("{} bits hold {available} sequences of {} bits, {} requested", data.len(), a.bits, count.max(1)),
            ));
        }
        (0..count).map(|k| data.slice(k * a.bits, a.bits)).collect::<Vec<_>>()
    } else {
        let seed = resolve_seed(a.seed, stderr);
        let key = key_from(a.key.as_deref(), &a.params, seed)?;
        let _ = writeln!(stderr, "{}", describe_key(&key));
        cipher::keystream_sequences(&key, a.sequences.unwrap_or(100), a.bits, seed)?
    };
    let params = BatteryParams {
        tests: TestKind::ALL.to_vec(),
        block_len: a.block_len,
        universal: None,
    };
    let report = run_battery(&streams, &params)?;
    let table = report.to_table();
    match &a.out {
        Some(path) => {
            write_atomic(Some(path), report.to_csv().as_bytes(), stdout)?;
            stdout.write_all(table.as_bytes()).map_err(|e| CliError::new(EXIT_IO, "io", e.to_string()))?;
        }
        None => {
            let _ = stderr.write_all(table.as_bytes());
            write_atomic(None, report.to_csv().as_bytes(), stdout)?;
        }
    }
    Ok(())
}

fn analyze(a: AnalyzeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let needs_seed = a.rule.iter().any(|r| !matches!(r, RuleSpec::Hex(_)));
    let mut rng = rule_rng(if needs_seed { resolve_seed(a.seed, stderr) } else { a.seed.unwrap_or(0) });
    let mut text = String::new();
    for (k, spec) in a.rule.iter().enumerate() {
        let table = spec.resolve(a.radius, &mut rng)?;
        if k > 0 {
            text.push('\n');
        }
        text.push_str(&analyze_rule(&table, a.size, a.mode)?.to_text());
    }
    write_atomic(None, text.as_bytes(), stdout)
}
