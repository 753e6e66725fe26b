//! Command-line driver over the exact-arithmetic library: dyadic Weil
//! index verification, unit-group structure, Hilbert symbols, and the
//! Fermat / hyperelliptic twist screeners.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage
//! or precondition error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cycloweil::cyclotomic::CyclotomicElem;
use cycloweil::fermat::HeckeTuple;
use cycloweil::report::{self, WeilVerifyConfig};
use cycloweil::weil::CharKind;
use cycloweil::Error;

#[derive(Parser)]
#[command(
    name = "cycloweil",
    version,
    about = "exact dyadic Weil-index and Hecke twist calculator"
)]
struct Cli {
    /// Worker threads for the data-parallel kernels (default: all cores;
    /// 1 forces sequential order).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the result here instead of stdout. Relative paths resolve
    /// under $CYCLOWEIL_OUT_DIR when that is set.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dyadic Weil-index condition checks.
    Weil {
        #[command(subcommand)]
        cmd: WeilCmd,
    },
    /// Exhaustive norm-one unit-group structure mod 8.
    GroupStructure {
        #[arg(long)]
        p: u64,
    },
    /// Dyadic Hilbert symbol of two real elements.
    Hilbert {
        #[arg(long)]
        p: u64,
        /// Element: a rational like `3` or `-5/7`, or comma-separated
        /// power-basis coefficients like `1,0,2/3`.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Jacobi-sum Hecke character twist screening.
    Fermat {
        #[command(subcommand)]
        cmd: FermatCmd,
    },
    /// Hyperelliptic twist checker (the p = 11 family).
    Hyperelliptic {
        #[command(subcommand)]
        cmd: HyperCmd,
    },
}

#[derive(Subcommand)]
enum WeilCmd {
    /// Full verification run: Gauss-sum baseline, generator table,
    /// congruence condition, roots-of-unity sum, unit-group structure.
    Verify(WeilVerifyArgs),
}

#[derive(Args)]
struct WeilVerifyArgs {
    #[arg(long)]
    p: u64,
    /// `unramified-quadratic` or `hyperelliptic` (with --a-param).
    #[arg(long, default_value = "unramified-quadratic")]
    chi: String,
    /// The eigenfunction scaling unit: an odd integer or a
    /// comma-separated integral real element, e.g. `0,1,0,...` syntax as
    /// for `hilbert`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    alpha: String,
    /// Parameter A of the hyperelliptic character.
    #[arg(long, allow_hyphen_values = true)]
    a_param: Option<i64>,
    /// Deeper congruence-subgroup sample count.
    #[arg(long, default_value_t = 32)]
    gamma3_samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum FermatCmd {
    /// Screen prime twists d in a range against the nonvanishing
    /// hypotheses.
    Scan {
        #[arg(long)]
        p: u64,
        /// Exponents r,s,t with r+s+t = p, e.g. `1,5,25`.
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 2)]
        d_min: u64,
        #[arg(long)]
        d_max: u64,
    },
    /// Enumerate exponent tuples with a prescribed unit congruence.
    Tuples {
        #[arg(long)]
        p: u64,
        /// Target residue mod p^2.
        #[arg(long)]
        a: u64,
    },
}

#[derive(Subcommand)]
enum HyperCmd {
    /// Check one parameter A against the four hypotheses.
    Check {
        #[arg(long = "A", allow_hyphen_values = true)]
        a_value: i64,
    },
    /// List all passing A in (1, limit].
    Search {
        #[arg(long)]
        limit: i64,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_MATH_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    let result = cycloweil::exec::with_workers(workers, || run(&cli));
    match result {
        Ok((code, output)) => {
            if let Err(e) = emit(&cli.output, &output) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn emit(path: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    use std::io::Write;
    match path {
        None => {
            // Tolerate closed pipes (`cycloweil ... | head`).
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{content}").and_then(|_| out.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other,
            }
        }
        Some(p) => {
            let resolved = match std::env::var_os("CYCLOWEIL_OUT_DIR") {
                Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
                _ => p.clone(),
            };
            if let Some(parent) = resolved.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(resolved, content)
        }
    }
}

fn run(cli: &Cli) -> cycloweil::Result<(u8, String)> {
    match &cli.cmd {
        Cmd::Weil {
            cmd: WeilCmd::Verify(args),
        } => {
            let kind = match args.chi.as_str() {
                "unramified-quadratic" => CharKind::UnramifiedQuadratic,
                "hyperelliptic" => {
                    let a = args.a_param.ok_or_else(|| {
                        Error::InvalidInput("--chi hyperelliptic requires --a-param".into())
                    })?;
                    CharKind::HyperellipticA(a)
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unknown character kind `{other}`"
                    )))
                }
            };
            let alpha = parse_elem(args.p, &args.alpha)?;
            let report = report::weil_verify(&WeilVerifyConfig {
                p: args.p,
                kind,
                alpha,
                gamma3_samples: args.gamma3_samples,
                seed: args.seed,
            })?;
            render_report(cli.format, &report)
        }
        Cmd::GroupStructure { p } => {
            let report = report::group_structure(*p)?;
            render_report(cli.format, &report)
        }
        Cmd::Hilbert { p, a, b } => {
            let ea = parse_elem(*p, a)?;
            let eb = parse_elem(*p, b)?;
            let (sign, report) = report::hilbert_pair(*p, &ea, &eb)?;
            match cli.format {
                Format::Json => {
                    let blob = serde_json::json!({
                        "p": p,
                        "a": ea,
                        "b": eb,
                        "hilbert": sign,
                        "report": report,
                    });
                    Ok((EXIT_OK, serde_json::to_string_pretty(&blob).unwrap()))
                }
                _ => Ok((EXIT_OK, format!("({a}, {b})_F = {sign:+}"))),
            }
        }
        Cmd::Fermat { cmd } => match cmd {
            FermatCmd::Scan {
                p,
                tuple,
                d_min,
                d_max,
            } => {
                let t = parse_tuple(*p, tuple)?;
                let (reports, summary) = report::fermat_scan(&t, *d_min, *d_max)?;
                match cli.format {
                    Format::Csv => Ok((EXIT_OK, report::scan_csv(&t, &reports))),
                    Format::Json => {
                        let blob = serde_json::json!({
                            "summary": summary,
                            "twists": reports,
                        });
                        Ok((EXIT_OK, serde_json::to_string_pretty(&blob).unwrap()))
                    }
                    Format::Text => {
                        let mut lines = summary.text_lines();
                        lines.pop(); // a scan is an enumeration, not a verdict
                        for r in reports.iter().filter(|r| r.passed()) {
                            lines.push(format!("d = {}: PASS", r.subject));
                        }
                        Ok((EXIT_OK, lines.join("\n")))
                    }
                }
            }
            FermatCmd::Tuples { p, a } => {
                let (tuples, rep) = report::fermat_tuples(*p, *a)?;
                match cli.format {
                    Format::Json => {
                        let blob = serde_json::json!({
                            "summary": rep,
                            "tuples": tuples,
                        });
                        Ok((exit_of(&rep), serde_json::to_string_pretty(&blob).unwrap()))
                    }
                    _ => {
                        let mut lines = rep.text_lines();
                        for t in &tuples {
                            lines.push(format!("(r, s, t) = ({}, {}, {})", t.r, t.s, t.t));
                        }
                        Ok((exit_of(&rep), lines.join("\n")))
                    }
                }
            }
        },
        Cmd::Hyperelliptic { cmd } => match cmd {
            HyperCmd::Check { a_value } => {
                let (twist, rep) = report::hyperelliptic(*a_value)?;
                let code = if twist.passed() {
                    EXIT_OK
                } else {
                    EXIT_MATH_FAIL
                };
                match cli.format {
                    Format::Json => Ok((code, to_json(&twist)?)),
                    _ => {
                        let mut lines = rep.text_lines();
                        lines.push(format!(
                            "A = {}: {}",
                            a_value,
                            if twist.passed() { "PASS" } else { "FAIL" }
                        ));
                        Ok((code, lines.join("\n")))
                    }
                }
            }
            HyperCmd::Search { limit } => {
                let hits = cycloweil::fermat::hyperelliptic_search(*limit)?;
                match cli.format {
                    Format::Json => Ok((EXIT_OK, to_json(&hits)?)),
                    _ => Ok((
                        EXIT_OK,
                        if hits.is_empty() {
                            format!("no passing A in (1, {limit}]")
                        } else {
                            format!(
                                "passing A in (1, {limit}]: {}",
                                hits.iter()
                                    .map(|a| a.to_string())
                                    .collect::<Vec<_>>()
                                    .join(", ")
                            )
                        },
                    )),
                }
            }
        },
    }
}

fn exit_of(rep: &report::VerificationReport) -> u8 {
    if rep.passed() {
        EXIT_OK
    } else {
        EXIT_MATH_FAIL
    }
}

fn render_report(
    format: Format,
    rep: &report::VerificationReport,
) -> cycloweil::Result<(u8, String)> {
    match format {
        Format::Json => Ok((exit_of(rep), to_json(rep)?)),
        Format::Csv => Err(Error::InvalidInput(
            "csv output is only available for `fermat scan`".into(),
        )),
        Format::Text => Ok((exit_of(rep), rep.text_lines().join("\n"))),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> cycloweil::Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization: {e}")))
}

fn parse_rational(s: &str) -> cycloweil::Result<(i64, i64)> {
    let bad = || Error::InvalidInput(format!("cannot parse rational `{s}`"));
    match s.split_once('/') {
        None => Ok((s.trim().parse().map_err(|_| bad())?, 1)),
        Some((n, d)) => {
            let num = n.trim().parse().map_err(|_| bad())?;
            let den: i64 = d.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok((num, den))
        }
    }
}

/// `3`, `-5/7`, or comma-separated power-basis coefficients `c0,c1,...`.
fn parse_elem(p: u64, s: &str) -> cycloweil::Result<CyclotomicElem> {
    let parts: Vec<&str> = s.split(',').collect();
    let fractions: Vec<(i64, i64)> = parts
        .iter()
        .map(|part| parse_rational(part))
        .collect::<cycloweil::Result<_>>()?;
    CyclotomicElem::from_fractions(p, &fractions)
}

/// `r,s,t`.
fn parse_tuple(p: u64, s: &str) -> cycloweil::Result<HeckeTuple> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput("tuple must be r,s,t".into()));
    }
    let mut v = [0u64; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("cannot parse `{part}` as integer")))?;
    }
    HeckeTuple::new(p, v[0], v[1], v[2])
}
