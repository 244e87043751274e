//! `apw`: command-line driver for the substitution / anti-power pipeline.
//!
//! Exit codes: 0 on success, 1 when a domain gate fails (the diagnostic names
//! the gate), 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use apw_core::antipower::{min_block_length, scan_with, AntiPowerQuery, AntiPowerResult};
use apw_core::recognizability::{derive_n_prime, DEFAULT_MAX_SYMBOLS};
use apw_core::theorem::{empirical_constant, proof_constant, verify_theorem};
use apw_core::{
    Aperiodicity, FixedPointStream, RecognizabilityConfig, RecognizabilityError,
    RecognizabilityReport, Substitution,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub const SCAN_CSV_VERSION_LINE: &str = "# apw scan v1";
pub const MAX_WINDOW_ENV: &str = "APW_MAX_WINDOW";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn io_err(e: io::Error) -> CliError {
    CliError::Usage(format!("i/o: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "apw", version, about = "Anti-powers in fixed points of uniform substitutions")]
pub struct Cli {
    /// Worker threads for grid scans (output does not depend on it).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Uniformity, primitivity, seeds and aperiodicity of a spec.
    Check(CheckArgs),
    /// Print a prefix of the fixed point.
    Expand {
        #[command(flatten)]
        stream: StreamArgs,
        #[arg(long)]
        len: usize,
    },
    /// Print the letter at a position (no prefix materialization).
    Letter {
        #[command(flatten)]
        stream: StreamArgs,
        #[arg(short = 'i', long)]
        index: u64,
    },
    /// Occurrences of a factor within a prefix window.
    Occurrences {
        #[command(flatten)]
        stream: StreamArgs,
        #[arg(long)]
        factor: String,
        #[arg(long, default_value_t = 4096)]
        window: usize,
    },
    /// Minimal anti-power block length at one (n, k).
    Antipower {
        #[command(flatten)]
        stream: StreamArgs,
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(short = 'k', long = "k")]
        k: usize,
        /// Defaults to C_proof·k.
        #[arg(long)]
        ell_max: Option<usize>,
        #[command(flatten)]
        recog: RecogArgs,
    },
    /// Minimal block lengths over an (n, k) grid.
    Scan {
        #[command(flatten)]
        stream: StreamArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Defaults to C_proof·k.
        #[arg(long)]
        ell_max: Option<usize>,
        #[command(flatten)]
        recog: RecogArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Estimate N, N1, r, p, M and N'.
    Recog {
        #[command(flatten)]
        stream: StreamArgs,
        #[command(flatten)]
        recog: RecogArgs,
    },
    /// The recognizability report plus C = (N'+1)·m.
    Constants {
        #[command(flatten)]
        stream: StreamArgs,
        #[command(flatten)]
        recog: RecogArgs,
    },
    /// Check the C·k bound and the explicit construction over a grid.
    Verify {
        #[command(flatten)]
        stream: StreamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        recog: RecogArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Smallest integer C compatible with a grid.
    Empirical {
        #[command(flatten)]
        stream: StreamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1024)]
        ell_cap: usize,
    },
}

#[derive(Debug, Args)]
pub struct StreamArgs {
    /// Substitution spec file.
    pub spec: PathBuf,
    /// Seed symbol; defaults to the first letter whose image starts with it.
    #[arg(long)]
    pub seed: Option<String>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Substitution spec file.
    pub spec: PathBuf,
    /// Seed symbol whose fixed point is tested for aperiodicity.
    #[arg(long)]
    pub seed: Option<String>,
    /// Exit 1 unless the substitution is primitive.
    #[arg(long)]
    pub require_primitive: bool,
    /// Exit 1 unless the fixed point looks aperiodic.
    #[arg(long)]
    pub require_aperiodic: bool,
    /// Prefix length used by the aperiodicity test.
    #[arg(long, default_value_t = 1 << 14)]
    pub window: usize,
    /// Largest factor length tested.
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Positions: `a..b`, `a..=b`, `a` or `a,b,c`.
    #[arg(short = 'n', long = "n", value_parser = parse_range)]
    pub n: Values,
    /// Block counts, same syntax.
    #[arg(short = 'k', long = "k", value_parser = parse_range)]
    pub k: Values,
}

/// An explicit list of grid values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Values(pub Vec<usize>);

#[derive(Debug, Args)]
pub struct RecogArgs {
    #[arg(long, default_value_t = 1 << 16)]
    pub window: usize,
    /// Largest factor length tried for N.
    #[arg(long, default_value_t = 16)]
    pub l_max: usize,
    /// Largest exponent tried for N1.
    #[arg(long, default_value_t = 8)]
    pub desub_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Parses `a..b`, `a..=b`, `a` or a comma list into explicit values.
pub fn parse_range(s: &str) -> Result<Values, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad number {t:?}: {e}"))
    };
    if let Some((a, b)) = s.split_once("..=") {
        let (a, b) = (num(a)?, num(b)?);
        Ok(Values((a..=b).collect()))
    } else if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        Ok(Values((a..b).collect()))
    } else {
        s.split(',').map(num).collect::<Result<_, _>>().map(Values)
    }
}

fn max_symbols() -> Result<usize, CliError> {
    match std::env::var(MAX_WINDOW_ENV) {
        Ok(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_WINDOW_ENV}={v:?} is not a number"))),
        Err(_) => Ok(DEFAULT_MAX_SYMBOLS),
    }
}

fn check_cap(what: &str, value: usize) -> Result<(), CliError> {
    let cap = max_symbols()?;
    if value > cap {
        return Err(CliError::Domain(format!(
            "constant too large: {what} = {value} exceeds cap {cap}"
        )));
    }
    Ok(())
}

fn load(path: &PathBuf) -> Result<Substitution, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Substitution::parse_spec(&text).map_err(domain)
}

fn open_stream(s: Substitution, seed: Option<&str>) -> Result<FixedPointStream, CliError> {
    match seed {
        Some(sym) => {
            let letter = s
                .alphabet()
                .lookup(sym)
                .ok_or_else(|| CliError::Usage(format!("unknown seed symbol {sym:?}")))?;
            FixedPointStream::new(s, letter).map_err(domain)
        }
        None => FixedPointStream::first(s).map_err(domain),
    }
}

fn stream_from(args: &StreamArgs) -> Result<FixedPointStream, CliError> {
    open_stream(load(&args.spec)?, args.seed.as_deref())
}

fn recog_config(args: &RecogArgs) -> Result<RecognizabilityConfig, CliError> {
    if args.window == 0 {
        return Err(CliError::Usage("window must be at least 1".into()));
    }
    Ok(RecognizabilityConfig {
        factor_len_max: args.l_max,
        desub_max: args.desub_max,
        max_symbols: max_symbols()?,
        ..Default::default()
    })
}

fn derive(
    stream: &mut FixedPointStream,
    args: &RecogArgs,
) -> Result<(RecognizabilityReport, usize), CliError> {
    let config = recog_config(args)?;
    let report = derive_n_prime(stream, args.window, &config).map_err(domain)?;
    let c = proof_constant(stream, &report).map_err(domain)?;
    Ok((report, c))
}

fn write_output(output: &OutputArgs, out: &mut dyn Write, body: &[u8]) -> Result<(), CliError> {
    match &output.output {
        Some(path) => fs::write(path, body).map_err(io_err),
        None => out.write_all(body).map_err(io_err),
    }
}

fn ratio_text(ratio: Option<f64>, decimals: usize) -> String {
    ratio
        .map(|r| format!("{r:.decimals$}"))
        .unwrap_or_default()
}

pub fn scan_csv(rows: &[AntiPowerResult]) -> Vec<u8> {
    let mut buf = Vec::new();
    writeln!(buf, "{SCAN_CSV_VERSION_LINE}").unwrap();
    writeln!(buf, "n,k,min_ell,ratio").unwrap();
    for row in rows {
        writeln!(
            buf,
            "{},{},{},{}",
            row.query.n,
            row.query.k,
            row.min_ell.map(|e| e.to_string()).unwrap_or_default(),
            ratio_text(row.ratio(), 6)
        )
        .unwrap();
    }
    buf
}

fn check(args: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let s = load(&args.spec)?;
    let primitivity = s.is_primitive();
    if args.require_primitive && !primitivity.is_primitive() {
        return Err(domain(RecognizabilityError::NotPrimitive));
    }
    let mut parts = vec![format!("uniform m={}", s.m())];
    parts.push(match primitivity.witness {
        Some(n) => format!("primitive (n={n})"),
        None => "not primitive".to_string(),
    });
    let seeds: Vec<&str> = s
        .fixed_point_seeds()
        .into_iter()
        .map(|a| s.alphabet().symbol(a))
        .collect();
    parts.push(format!("seeds: {}", seeds.join(",")));
    if s.m() < 2 {
        parts.push("no growing fixed point".into());
    } else if seeds.is_empty() {
        parts.push("no fixed point".into());
    } else {
        check_cap("window", args.window)?;
        let mut stream = open_stream(s, args.seed.as_deref())?;
        match stream.aperiodicity_check(args.n_max, args.window) {
            Aperiodicity::AperiodicUpTo(n) => parts.push(format!("aperiodic up to {n}")),
            Aperiodicity::PeriodicDetected(n) => {
                if args.require_aperiodic {
                    return Err(domain(RecognizabilityError::PeriodicInput(n)));
                }
                parts.push(format!("periodic (n={n})"));
            }
        }
    }
    writeln!(out, "{}", parts.join("; ")).map_err(io_err)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Check(args) => check(&args, out),
        Command::Expand { stream, len } => {
            check_cap("len", len)?;
            let mut x = stream_from(&stream)?;
            let word = x.prefix(len);
            writeln!(out, "{}", x.substitution().alphabet().render(&word)).map_err(io_err)
        }
        Command::Letter { stream, index } => {
            let x = stream_from(&stream)?;
            let letter = x.letter_at(index);
            writeln!(out, "{}", x.substitution().alphabet().symbol(letter)).map_err(io_err)
        }
        Command::Occurrences {
            stream,
            factor,
            window,
        } => {
            check_cap("window", window)?;
            let mut x = stream_from(&stream)?;
            let word = x
                .substitution()
                .alphabet()
                .parse_word(&factor)
                .map_err(domain)?;
            if word.is_empty() || word.len() > window {
                return Err(CliError::Usage(
                    "factor must be nonempty and fit in the window".into(),
                ));
            }
            let occ = x.occurrences(&word, window);
            let list: Vec<String> = occ.positions.iter().map(|p| p.to_string()).collect();
            writeln!(out, "{}", list.join(",")).map_err(io_err)
        }
        Command::Antipower {
            stream,
            n,
            k,
            ell_max,
            recog,
        } => {
            if k == 0 {
                return Err(CliError::Usage("k must be at least 1".into()));
            }
            let mut x = stream_from(&stream)?;
            let ell_max = match ell_max {
                Some(e) if e >= 1 => e,
                Some(_) => return Err(CliError::Usage("ell-max must be at least 1".into())),
                None => derive(&mut x, &recog)?.1 * k,
            };
            check_cap("n + k*ell_max", n + k * ell_max)?;
            let r = min_block_length(&mut x, AntiPowerQuery::new(n, k, ell_max));
            match r.min_ell {
                Some(ell) => writeln!(out, "min_ell={ell} ratio={}", ratio_text(r.ratio(), 3)),
                None => writeln!(out, "min_ell=none ell_max={ell_max}"),
            }
            .map_err(io_err)
        }
        Command::Scan {
            stream,
            grid,
            ell_max,
            recog,
            output,
        } => {
            let (ns, ks) = grid_values(&grid)?;
            let mut x = stream_from(&stream)?;
            let cap = match ell_max {
                Some(e) if e >= 1 => Cap::Fixed(e),
                Some(_) => return Err(CliError::Usage("ell-max must be at least 1".into())),
                None => Cap::PerK(derive(&mut x, &recog)?.1),
            };
            let span = ns.iter().max().copied().unwrap_or(0)
                + ks.iter().map(|&k| k * cap.at(k)).max().unwrap_or(0);
            check_cap("scan span", span)?;
            let rows = pooled(cli.jobs, || scan_with(&mut x, &ns, &ks, |k| cap.at(k)))?;
            let body = match output.format {
                Format::Csv => scan_csv(&rows),
                Format::Text => {
                    let mut buf = Vec::new();
                    for r in &rows {
                        writeln!(
                            buf,
                            "n={} k={} min_ell={} ratio={}",
                            r.query.n,
                            r.query.k,
                            r.min_ell.map(|e| e.to_string()).unwrap_or("none".into()),
                            ratio_text(r.ratio(), 3)
                        )
                        .unwrap();
                    }
                    buf
                }
            };
            write_output(&output, out, &body)
        }
        Command::Recog { stream, recog } => {
            let mut x = stream_from(&stream)?;
            let config = recog_config(&recog)?;
            let report = derive_n_prime(&mut x, recog.window, &config).map_err(domain)?;
            write!(out, "{report}").map_err(io_err)
        }
        Command::Constants { stream, recog } => {
            let mut x = stream_from(&stream)?;
            let (report, c) = derive(&mut x, &recog)?;
            write!(out, "{report}C={c}\n").map_err(io_err)
        }
        Command::Verify {
            stream,
            grid,
            recog,
            output,
        } => {
            let (ns, ks) = grid_values(&grid)?;
            let mut x = stream_from(&stream)?;
            let (report, c) = derive(&mut x, &recog)?;
            let theorem = pooled(cli.jobs, || {
                verify_theorem(&mut x, &ns, &ks, c, Some(report.n_prime))
            })?;
            let summary = format!(
                "C_proof={c} N_prime={} violations={} C_empirical={}",
                report.n_prime,
                theorem.violations.len(),
                theorem
                    .c_empirical
                    .map(|v| v.to_string())
                    .unwrap_or("none".into())
            );
            let body = match output.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    theorem.write_csv(&mut buf).map_err(io_err)?;
                    buf
                }
                Format::Text => format!("{summary}\n").into_bytes(),
            };
            write_output(&output, out, &body)?;
            if output.format == Format::Csv && output.output.is_some() {
                writeln!(out, "{summary}").map_err(io_err)?;
            }
            Ok(())
        }
        Command::Empirical {
            stream,
            grid,
            ell_cap,
        } => {
            let (ns, ks) = grid_values(&grid)?;
            let mut x = stream_from(&stream)?;
            let span =
                ns.iter().max().copied().unwrap_or(0) + ks.iter().max().copied().unwrap_or(0) * ell_cap;
            check_cap("scan span", span)?;
            let c = pooled(cli.jobs, || empirical_constant(&mut x, &ns, &ks, ell_cap))?
                .map_err(domain)?;
            writeln!(out, "C_empirical={c}").map_err(io_err)
        }
    }
}

#[derive(Clone, Copy)]
enum Cap {
    Fixed(usize),
    PerK(usize),
}

impl Cap {
    fn at(self, k: usize) -> usize {
        match self {
            Cap::Fixed(e) => e,
            Cap::PerK(c) => (c * k).max(1),
        }
    }
}

fn grid_values(grid: &GridArgs) -> Result<(Vec<usize>, Vec<usize>), CliError> {
    let ns = grid.n.0.clone();
    let ks = grid.k.0.clone();
    if ks.contains(&0) {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    Ok((ns, ks))
}

fn pooled<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{e}");
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
