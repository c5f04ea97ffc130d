mod output;

use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kolakoski_core::harness::{
    Budget, Harness, NPolicy, SweepConjecture, TableProvider, VerificationReport,
};
use kolakoski_core::orbit::{orbit, MapId};
use kolakoski_core::rle::{Oracle, DEFAULT_TERM_CAP};
use kolakoski_core::selfcheck::{self, Scale};
use kolakoski_core::torsion::{TableBuilder, DEFAULT_MEMORY_CAP};
use kolakoski_core::{cache, Alphabet, Letter, PackedWord};

use output::{format_sequence, write_reports, OutputFormat};

const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser, Debug)]
#[command(
    name = "kolakoski",
    version,
    about = "Run-length expansion, torsion tables and orbit checks"
)]
struct Cli {
    /// Directory holding KTOR table caches.
    #[arg(long, global = true, env = "KOLAKOSKI_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Memory ceiling for table construction, in bytes.
    #[arg(long, global = true, default_value_t = DEFAULT_MEMORY_CAP)]
    memory_cap: u64,

    /// Largest expansion the direct oracle may materialize, in terms.
    #[arg(long, global = true, default_value_t = DEFAULT_TERM_CAP)]
    oracle_cap: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    parallelism: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print E(s, t).
    Expand {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Terms printed before eliding.
        #[arg(long, default_value_t = 200)]
        print_cap: usize,
    },
    /// Print the orbit length of a word under C(m, -) or C(n, -).
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        /// Comma list of letters, or `ones:<k>` for the word 1^k.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, value_enum, default_value_t = BaseLetter::M)]
        base: BaseLetter,
        /// Also print the visited codes (at most this many).
        #[arg(long)]
        show: Option<usize>,
    },
    /// Run conjecture checks and emit one report per case.
    Verify(VerifyArgs),
    /// Build, inspect and validate table caches.
    Tables {
        #[command(subcommand)]
        action: TablesAction,
    },
    /// Run the invariant suites.
    Selfcheck {
        #[arg(value_enum, default_value_t = ScaleArg::Quick)]
        scale: ScaleArg,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Also check the invariants of a cached table.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BaseLetter {
    M,
    N,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScaleArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConjectureArg {
    Orbit1,
    Orbit2,
    Parity,
    Residue,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    conjecture: ConjectureArg,
    #[arg(long, default_value_t = kolakoski_core::harness::DEFAULT_J_MAX)]
    jmax: u32,
    /// One representative per even residue class mod 2^(j-1) (default for orbit checks).
    #[arg(long, conflicts_with = "n")]
    residues: bool,
    /// Explicit comma list of even n.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    /// Permit j_max above the default limit.
    #[arg(long)]
    high_memory: bool,
    /// Stop starting new cases after this many seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Residue reduction: the letter m (1 or -1).
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    m: i64,
    /// Residue reduction: word length is 2j-1.
    #[arg(long)]
    j: Option<u32>,
    /// Residue reduction: class representative.
    #[arg(long, allow_hyphen_values = true)]
    n0: Option<i64>,
    /// Residue reduction: comma list of witnesses congruent to n0.
    #[arg(long, allow_hyphen_values = true)]
    witnesses: Option<String>,
}

#[derive(Subcommand, Debug)]
enum TablesAction {
    /// Build tables and write a KTOR file.
    Build {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        kmax: u32,
        /// Output path (defaults to the cache directory, else the working directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the header of a KTOR file.
    Info { path: PathBuf },
    /// Validate a KTOR file and spot-check entries against the oracle.
    VerifyCache {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Validated runtime settings shared by every command.
#[derive(Clone, Debug)]
struct Config {
    memory_cap_bytes: u64,
    oracle_term_cap: u64,
    cache_dir: Option<PathBuf>,
    output_format: OutputFormat,
    parallelism: usize,
}

impl Config {
    fn from_cli(cli: &Cli) -> Result<Self> {
        if cli.memory_cap == 0 || cli.oracle_cap == 0 {
            bail!("caps must be positive");
        }
        if cli.parallelism == 0 {
            bail!("parallelism must be at least 1");
        }
        Ok(Config {
            memory_cap_bytes: cli.memory_cap,
            oracle_term_cap: cli.oracle_cap,
            cache_dir: cli.cache_dir.clone(),
            output_format: cli.format,
            parallelism: cli.parallelism,
        })
    }

    fn harness(&self) -> Harness {
        Harness::new(
            TableProvider::new(
                TableBuilder::with_memory_cap(self.memory_cap_bytes),
                self.cache_dir.clone(),
            ),
            self.oracle_term_cap,
        )
    }
}

/// How a command finished when it did not hit an error.
enum Status {
    Ok,
    CheckFailed,
}

fn parse_list(s: &str) -> Result<Vec<i64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .with_context(|| format!("bad integer {x:?} in list {s:?}"))
        })
        .collect()
}

fn parse_word(spec: &str) -> Result<Vec<i64>> {
    match spec.strip_prefix("ones:") {
        Some(k) => {
            let k: usize = k
                .parse()
                .with_context(|| format!("bad length in {spec:?}"))?;
            Ok(vec![1; k])
        }
        None => parse_list(spec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    let config = Config::from_cli(&cli)?;
    match cli.command {
        Command::Expand {
            m,
            n,
            s,
            t,
            print_cap,
        } => {
            let oracle = Oracle::with_cap(Alphabet::new(m, n)?, config.oracle_term_cap)?;
            let e = oracle.expand(&parse_list(&s)?, &parse_list(&t)?)?;
            println!("{}", format_sequence(&e, print_cap));
            Ok(Status::Ok)
        }
        Command::Orbit {
            m,
            n,
            word,
            base,
            show,
        } => cmd_orbit(&config, m, n, &word, base, show),
        Command::Verify(args) => cmd_verify(&config, &args),
        Command::Tables { action } => cmd_tables(&config, action),
        Command::Selfcheck { scale, seed, table } => cmd_selfcheck(scale, seed, table.as_deref()),
    }
}

fn cmd_orbit(
    config: &Config,
    m: i64,
    n: i64,
    word: &str,
    base: BaseLetter,
    show: Option<usize>,
) -> Result<Status> {
    let alphabet = Alphabet::new(m, n)?;
    let word = PackedWord::encode(&alphabet, &parse_word(word)?)?;
    if word.is_empty() {
        bail!("orbit needs a non-empty word");
    }
    let letter = match base {
        BaseLetter::M => Letter::M,
        BaseLetter::N => Letter::N,
    };
    let provider = TableProvider::new(
        TableBuilder::with_memory_cap(config.memory_cap_bytes),
        config.cache_dir.clone(),
    );
    let (table, _) = provider.obtain(alphabet, word.len())?;
    let map = MapId {
        alphabet,
        base: vec![alphabet.symbol(letter)],
    };
    let result = orbit(table.level(letter, word.len())?, word, map, show)?;
    println!("{}", result.length);
    if let Some(els) = result.elements {
        let shown: Vec<String> = els.iter().map(|c| c.to_string()).collect();
        println!("codes: {}", shown.join(","));
    }
    Ok(Status::Ok)
}

fn emit(config: &Config, reports: &[VerificationReport]) -> Result<()> {
    write_reports(io::stdout().lock(), config.output_format, reports)
}

fn cmd_verify(config: &Config, args: &VerifyArgs) -> Result<Status> {
    let harness = config.harness();
    match args.conjecture {
        ConjectureArg::Orbit1 | ConjectureArg::Orbit2 => {
            let conjecture = if args.conjecture == ConjectureArg::Orbit1 {
                SweepConjecture::Orbit1
            } else {
                SweepConjecture::Orbit2
            };
            let policy = match &args.n {
                Some(list) => NPolicy::Explicit(parse_list(list)?),
                None => NPolicy::ResidueClasses,
            };
            let budget = Budget {
                memory_cap: config.memory_cap_bytes,
                time_limit: args.time_limit.map(Duration::from_secs_f64),
                parallelism: config.parallelism,
                high_memory: args.high_memory,
            };
            let outcome = harness.sweep(conjecture, args.jmax, &policy, &budget)?;
            emit(config, &outcome.reports)?;
            for e in &outcome.errors {
                eprintln!("case n={} failed to run: {}", e.n, e.message);
            }
            for v in &outcome.invariant_violations {
                eprintln!("invariant violated: {v}");
            }
            if outcome.truncated {
                eprintln!(
                    "TRUNCATED: time budget exhausted, {} case(s) not run: {:?}",
                    outcome.skipped.len(),
                    outcome.skipped
                );
            }
            eprintln!(
                "{} passed, {} failed, {} errors",
                outcome.passed(),
                outcome.failed(),
                outcome.errors.len()
            );
            if outcome.failed() > 0 || !outcome.invariant_violations.is_empty() {
                Ok(Status::CheckFailed)
            } else if !outcome.errors.is_empty() || outcome.truncated {
                Err(anyhow!("sweep incomplete"))
            } else {
                Ok(Status::Ok)
            }
        }
        ConjectureArg::Parity => {
            let ns = match &args.n {
                Some(list) => parse_list(list)?,
                None => vec![2],
            };
            let mut status = Status::Ok;
            for n in ns {
                let report = harness.check_parity_equivalence(n, args.jmax)?;
                emit(config, &report.to_reports())?;
                if report.equivalence_confirmed() && report.both_sides_hold() {
                    eprintln!(
                        "n={n}: equivalence confirmed, both sides hold for j <= {}",
                        args.jmax
                    );
                } else if report.equivalence_confirmed() {
                    eprintln!("n={n}: equivalence confirmed, but the conjecture fails");
                    status = Status::CheckFailed;
                } else {
                    eprintln!("n={n}: EQUIVALENCE BROKEN");
                    status = Status::CheckFailed;
                }
            }
            Ok(status)
        }
        ConjectureArg::Residue => {
            let j = args.j.ok_or_else(|| anyhow!("residue needs --j"))?;
            let n0 = args.n0.ok_or_else(|| anyhow!("residue needs --n0"))?;
            let witnesses = match &args.witnesses {
                Some(list) => parse_list(list)?,
                None => (0..3).map(|i| n0 + i * (1i64 << (j.max(1) - 1))).collect(),
            };
            let report = harness.verify_residue_reduction(args.m, j, n0, &witnesses)?;
            emit(config, &[report.to_report()])?;
            match &report.first_mismatch {
                None => {
                    eprintln!("masked maps identical across {witnesses:?}");
                    Ok(Status::Ok)
                }
                Some(mm) => {
                    eprintln!("first mismatch: {mm:?}");
                    Ok(Status::CheckFailed)
                }
            }
        }
    }
}

fn cmd_tables(config: &Config, action: TablesAction) -> Result<Status> {
    match action {
        TablesAction::Build { m, n, kmax, out } => {
            let alphabet = Alphabet::new(m, n)?;
            let table =
                TableBuilder::with_memory_cap(config.memory_cap_bytes).build(alphabet, kmax)?;
            let path = match out {
                Some(p) => p,
                None => cache::cache_path(
                    config.cache_dir.as_deref().unwrap_or(Path::new(".")),
                    &alphabet,
                ),
            };
            cache::save(&table, &path)?;
            println!(
                "wrote {} (m={m}, n={n}, k_max={kmax}, {} bytes)",
                path.display(),
                cache::file_len(kmax)
            );
            Ok(Status::Ok)
        }
        TablesAction::Info { path } => {
            let bytes =
                std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            let h = cache::read_header(&bytes)?;
            println!("m={}, n={}, k_max={}", h.m, h.n, h.k_max);
            println!(
                "size={} bytes (expected {})",
                bytes.len(),
                cache::file_len(h.k_max.min(31))
            );
            Ok(Status::Ok)
        }
        TablesAction::VerifyCache { path, seed } => {
            let table =
                cache::load(&path).with_context(|| format!("invalid cache {}", path.display()))?;
            let check = selfcheck::oracle_spot_check(&table, 10, 1000, seed)
                .map_err(|e| anyhow!("oracle spot check failed: {e}"))?;
            println!(
                "ok: m={}, n={}, k_max={}; every level is a permutation; {check}",
                table.alphabet().m(),
                table.alphabet().n(),
                table.k_max()
            );
            Ok(Status::Ok)
        }
    }
}

fn cmd_selfcheck(scale: ScaleArg, seed: u64, table: Option<&Path>) -> Result<Status> {
    let scale = match scale {
        ScaleArg::Quick => Scale::Quick,
        ScaleArg::Full => Scale::Full,
    };
    println!("seed={seed}");
    let mut results = selfcheck::run(scale, seed);
    if let Some(path) = table {
        let t = cache::load(path).with_context(|| format!("invalid cache {}", path.display()))?;
        results.extend(selfcheck::check_table(&t, seed));
    }
    let mut failed = 0;
    for r in &results {
        println!(
            "[{}] {} ({} ms): {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.elapsed_ms,
            r.detail
        );
        failed += usize::from(!r.passed);
    }
    println!("{} suites, {} failed", results.len(), failed);
    Ok(if failed == 0 {
        Status::Ok
    } else {
        Status::CheckFailed
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_specs() {
        assert_eq!(parse_word("ones:3").unwrap(), vec![1, 1, 1]);
        assert_eq!(parse_word("1,-2, 4").unwrap(), vec![1, -2, 4]);
        assert!(parse_word("ones:x").is_err());
        assert!(parse_list("1,,2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
