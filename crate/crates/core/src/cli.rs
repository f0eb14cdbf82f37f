//! Command-line front end. Every command renders its whole output before
//! anything is written, and files are replaced atomically.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::enumerate::{
    classify, count_family_with_limit, rank, write_bfile, Composition, CountTable, DEFAULT_ORACLE_LIMIT,
    ORACLE_HARD_CAP,
};
use crate::genfun::{FamilyTag, GeneratedSeries};
use crate::rootsofunity::{
    finite_eval_semistrong, finite_eval_strong, mk_at_root_corollary, radial_limit, u_at_root, MultimodalKind,
    MultimodalSeries, RadialEstimate, RadialSeries, RankSeries, RootError, RootTarget,
};
use crate::verify::{reports_to_json, reports_to_table, run_all, run_theorem_suite, CheckId, SuiteParams};

/// Largest series order accepted on the command line.
pub const MAX_ORDER: usize = 200;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qmodal", version, about = "Generating functions, oracles and root-of-unity checks for multimodal sequences")]
pub struct RunConfig {
    /// Seed for random tables; also read from QMODAL_SEED. Accepts 0x-prefixed hex.
    #[arg(long, global = true, env = "QMODAL_SEED", value_parser = parse_seed, default_value = "0xC0FFEE")]
    pub seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand a generating function as an exact series.
    Expand {
        /// Family, e.g. `multimodal:k=3` or `rank_U`.
        family: String,
        #[arg(long)]
        order: usize,
    },
    /// Count a family by exhaustive enumeration.
    Count {
        family: String,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
    },
    /// Classify a composition given by its parts.
    Classify {
        #[arg(required = true, num_args = 1..)]
        parts: Vec<u32>,
    },
    /// Run one registered check, or `all`.
    Verify {
        suite: String,
        #[command(flatten)]
        params: VerifyArgs,
    },
    /// Evaluate a finite formula at a root of unity and probe the series radially.
    EvalRoot {
        #[arg(value_enum)]
        which: RootSeries,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        j: i64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Argument of z in units of pi.
        #[arg(long, allow_hyphen_values = true)]
        z_angle: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        z_modulus: f64,
    },
    /// Write z-summed totals as `n a(n)` lines.
    ExportBfile {
        family: String,
        #[arg(long)]
        nmax: usize,
        #[arg(long, value_enum, default_value_t = Source::Series)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    pub oracle_limit: usize,
    #[arg(long, default_value_t = 100)]
    pub tables: usize,
    /// Include per-check runtimes.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootSeries {
    /// U(-1; zeta) against the rank series at z = -1.
    U,
    /// M_k**(1; zeta) for even m.
    Strong,
    /// M_k*(1; zeta) for even m.
    Semistrong,
    /// The finite formula for M_k(z; zeta).
    Corollary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Series,
    Oracle,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("bad seed `{s}`: {e}"))
}

/// A failed command: exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

/// Rendered output and the exit code to finish with.
struct Rendered {
    text: String,
    code: i32,
    /// Printed to stderr after the output.
    warning: Option<String>,
}

impl From<String> for Rendered {
    fn from(text: String) -> Self {
        Rendered { text, code: EXIT_OK, warning: None }
    }
}

fn parse_family(s: &str) -> Result<FamilyTag, Failure> {
    s.parse().map_err(|e| usage(format!("bad family string: {e}")))
}

fn check_order(order: usize) -> Result<(), Failure> {
    if order > MAX_ORDER {
        return Err(usage(format!("order {order} exceeds the maximum {MAX_ORDER}")));
    }
    Ok(())
}

fn check_oracle(nmax: usize, limit: usize) -> Result<(), Failure> {
    if limit > ORACLE_HARD_CAP {
        return Err(usage(format!("oracle limit {limit} exceeds the hard cap {ORACLE_HARD_CAP}")));
    }
    if nmax > limit {
        return Err(usage(format!("size {nmax} exceeds the oracle limit {limit}")));
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&config) {
        Ok(out) => {
            if let Err(e) = emit(&config, &out.text, stdout) {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
            if let Some(w) = out.warning {
                let _ = writeln!(stderr, "{w}");
            }
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(config: &RunConfig, text: &str, stdout: &mut dyn Write) -> io::Result<()> {
    match &config.output {
        Some(path) => write_atomic(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

/// Writes through a sibling temporary file and a rename.
fn write_atomic(path: &Path, text: &str) -> io::Result<()> {
    let name = path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

fn execute(config: &RunConfig) -> Result<Rendered, Failure> {
    match &config.command {
        Command::Expand { family, order } => {
            let tag = parse_family(family)?;
            check_order(*order)?;
            Ok(render_series(&tag, &tag.series(*order), config.format).into())
        }
        Command::Count { family, nmax, oracle_limit } => {
            let tag = parse_family(family)?;
            check_oracle(*nmax, *oracle_limit)?;
            let table = count_family_with_limit(tag, *nmax, *oracle_limit).map_err(|e| usage(e.to_string()))?;
            render_counts(&table, config.format).map(Rendered::from)
        }
        Command::Classify { parts } => {
            let c = Composition::new(parts.clone()).map_err(|e| usage(e.to_string()))?;
            render_classify(&c, config.format).map(Rendered::from)
        }
        Command::Verify { suite, params } => {
            check_oracle(params.nmax.unwrap_or(0), params.oracle_limit)?;
            if let Some(order) = params.order {
                check_order(order)?;
            }
            let suite_params = SuiteParams {
                order: params.order,
                nmax: params.nmax,
                oracle_limit: params.oracle_limit,
                seed: config.seed,
                tables: params.tables,
            };
            let reports = if suite == "all" {
                run_all(&suite_params)
            } else {
                let id: CheckId = suite.parse().map_err(|e: crate::verify::VerifyError| usage(e.to_string()))?;
                vec![run_theorem_suite(id, &suite_params)]
            };
            let text = match config.format {
                Format::Json => reports_to_json(&reports, params.timing) + "\n",
                Format::Table => reports_to_table(&reports, params.timing),
                Format::Csv => return Err(usage("verify supports json and table output")),
            };
            let code = if reports.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_VERIFY_FAILED };
            Ok(Rendered { text, code, warning: None })
        }
        Command::EvalRoot { which, m, j, k, z_angle, z_modulus } => eval_root(*which, *m, *j, *k, *z_angle, *z_modulus, config.format),
        Command::ExportBfile { family, nmax, source, oracle_limit } => {
            let tag = parse_family(family)?;
            let totals: Vec<String> = match source {
                Source::Series => {
                    check_order(*nmax)?;
                    tag.series(*nmax).z_summed().iter().map(|c| c.to_string()).collect()
                }
                Source::Oracle => {
                    check_oracle(*nmax, *oracle_limit)?;
                    let table = count_family_with_limit(tag, *nmax, *oracle_limit).map_err(|e| usage(e.to_string()))?;
                    table.totals().iter().map(|c| c.to_string()).collect()
                }
            };
            let mut buf = Vec::new();
            write_bfile(&mut buf, &totals).expect("writing to memory");
            Ok(String::from_utf8(buf).expect("ascii").into())
        }
    }
}

fn render_series(tag: &FamilyTag, series: &GeneratedSeries, format: Format) -> String {
    match format {
        Format::Json => series.to_json() + "\n",
        Format::Csv => {
            let mut out = String::from("z,q,coeff\n");
            for (z, q, c) in series.terms() {
                let _ = writeln!(out, "{z},{q},{c}");
            }
            out
        }
        Format::Table => {
            let mut out = format!("{tag} to order {}\n", series.order());
            match series {
                GeneratedSeries::Bivariate(s) => {
                    for q in 0..=s.order() {
                        let row: Vec<String> = s.row(q).iter().map(|c| c.to_string()).collect();
                        let _ = writeln!(out, "q^{q}: {}", row.join(" "));
                    }
                }
                GeneratedSeries::Laurent(s) => {
                    let _ = writeln!(out, "columns run from z^-q to z^q");
                    for q in 0..=s.order() {
                        let qi = q as i64;
                        let row: Vec<String> = (-qi..=qi).map(|z| s.coeff(z, q).expect("in range").to_string()).collect();
                        let _ = writeln!(out, "q^{q}: {}", row.join(" "));
                    }
                }
            }
            let summed: Vec<String> = series.z_summed().iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "z=1: {}", summed.join(","));
            out
        }
    }
}

fn render_counts(table: &CountTable, format: Format) -> Result<String, Failure> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf).map_err(|e| usage(e.to_string()))?;
            Ok(String::from_utf8(buf).expect("csv is utf-8"))
        }
        Format::Json => {
            let counts: Vec<_> = table.counts.iter().map(|(&(key, size), &c)| json!([key, size, c])).collect();
            let doc = json!({
                "family": table.family.to_string(),
                "order": table.order,
                "counts": counts,
                "totals": table.totals(),
            });
            Ok(doc.to_string() + "\n")
        }
        Format::Table => {
            let key = if table.family == FamilyTag::RankU { "rank" } else { "length" };
            let mut out = format!("{} sizes 0..={}\nsize total  by {key}\n", table.family, table.order);
            for (size, total) in table.totals().iter().enumerate() {
                let cells: Vec<String> = table
                    .counts
                    .iter()
                    .filter(|(&(_, s), _)| s == size)
                    .map(|(&(k, _), c)| format!("{k}:{c}"))
                    .collect();
                let _ = writeln!(out, "{size:>4} {total:>5}  {}", cells.join(" "));
            }
            Ok(out)
        }
    }
}

/// Parts with every peak overlined by a combining overline after each digit.
pub fn overline_display(c: &Composition) -> String {
    let peak = c.largest();
    let shown: Vec<String> = c
        .parts()
        .iter()
        .map(|&p| {
            let digits = p.to_string();
            if p == peak {
                digits.chars().flat_map(|d| [d, '\u{0305}']).collect()
            } else {
                digits
            }
        })
        .collect();
    format!("({})", shown.join(", "))
}

fn render_classify(c: &Composition, format: Format) -> Result<String, Failure> {
    let decomposition = classify(c).map_err(|e| usage(e.to_string()))?;
    match format {
        Format::Json => {
            let doc = match &decomposition {
                None => json!({"parts": c.parts(), "multimodal": false}),
                Some(d) => json!({
                    "parts": c.parts(),
                    "multimodal": true,
                    "peak": d.peak,
                    "k": d.k,
                    "strength": d.strength.to_string(),
                    "left": d.left.parts().iter().rev().collect::<Vec<_>>(),
                    "middles": d.middles.iter().map(|m| m.parts().to_vec()).collect::<Vec<_>>(),
                    "right": d.right.parts(),
                    "unimodal": d.is_unimodal(),
                    "rank": rank(d).ok(),
                }),
            };
            Ok(doc.to_string() + "\n")
        }
        Format::Csv => Err(usage("classify supports json and table output")),
        Format::Table => {
            let Some(d) = decomposition else {
                return Ok(format!("{c}: not multimodal\n"));
            };
            let mut out = format!("{}\n{}, k={}, peak {}\n", overline_display(c), d.strength, d.k, d.peak);
            let left: Vec<u32> = d.left.parts().iter().rev().copied().collect();
            let _ = writeln!(out, "left:    {}", Composition::new(left).expect("positive parts"));
            let middles: Vec<String> = d.middles.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(out, "middles: {}", if middles.is_empty() { "none".to_string() } else { middles.join(" ") });
            let _ = writeln!(out, "right:   {}", d.right);
            if let Ok(r) = rank(&d) {
                let _ = writeln!(out, "rank:    {r}");
            }
            Ok(out)
        }
    }
}

fn cjson(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn ctext(z: Complex64) -> String {
    format!("{:.12} {:+.12}i", z.re, z.im)
}

fn root_failure(e: RootError) -> Failure {
    let code = match e {
        RootError::Nonconvergent { .. } | RootError::ExtrapolationUnstable { .. } | RootError::RootfinderFailure(_) => {
            EXIT_NONCONVERGENT
        }
        _ => EXIT_USAGE,
    };
    Failure { code, message: e.to_string() }
}

fn eval_root(
    which: RootSeries,
    m: u32,
    j: i64,
    k: u32,
    z_angle: Option<f64>,
    z_modulus: f64,
    format: Format,
) -> Result<Rendered, Failure> {
    if k == 0 {
        return Err(usage("k must be at least 1"));
    }
    let target = RootTarget::new(m, j).map_err(root_failure)?;
    let z = match (which, z_angle) {
        (RootSeries::Corollary, None) => return Err(usage("the corollary needs --z-angle")),
        (RootSeries::Corollary, Some(a)) => Complex64::from_polar(z_modulus, a * std::f64::consts::PI),
        (_, Some(_)) => return Err(usage("--z-angle only applies to the corollary")),
        (RootSeries::U, None) => Complex64::new(-1.0, 0.0),
        (_, None) => Complex64::new(1.0, 0.0),
    };
    let (finite, series): (Complex64, Box<dyn RadialSeries>) = match which {
        RootSeries::U => (u_at_root(m, j).map_err(root_failure)?, Box::new(RankSeries { z })),
        RootSeries::Strong => (
            finite_eval_strong(k, &target).map_err(root_failure)?,
            Box::new(MultimodalSeries { kind: MultimodalKind::Strong, k, z }),
        ),
        RootSeries::Semistrong => (
            finite_eval_semistrong(k, &target).map_err(root_failure)?,
            Box::new(MultimodalSeries { kind: MultimodalKind::Semistrong, k, z }),
        ),
        RootSeries::Corollary => (
            mk_at_root_corollary(k, z, &target).map_err(root_failure)?,
            Box::new(MultimodalSeries { kind: MultimodalKind::Plain, k, z }),
        ),
    };
    let probe: Result<RadialEstimate, RootError> = radial_limit(series.as_ref(), &target);
    let which_name = format!("{which:?}").to_lowercase();
    let text = match format {
        Format::Json => {
            let (probe_doc, error) = match &probe {
                Ok(est) => (serde_json::from_str::<serde_json::Value>(&est.to_json()).expect("valid json"), None),
                Err(e) => (serde_json::Value::Null, Some(e.to_string())),
            };
            let doc = json!({
                "which": which_name,
                "m": m,
                "j": j,
                "k": k,
                "z": cjson(z),
                "finite": cjson(finite),
                "probe": probe_doc,
                "probe_error": error,
                "difference": probe.as_ref().ok().map(|est| (est.value - finite).norm()),
            });
            doc.to_string() + "\n"
        }
        Format::Csv => {
            let mut out = String::from("t,re,im\n");
            if let Ok(est) = &probe {
                for (t, v) in &est.per_t {
                    let _ = writeln!(out, "{t},{},{}", v.re, v.im);
                }
                let _ = writeln!(out, "0,{},{}", est.value.re, est.value.im);
            }
            out
        }
        Format::Table => {
            let mut out = format!("{which_name} at m={m} j={j} k={k}, z = {}\nfinite:       {}\n", ctext(z), ctext(finite));
            match &probe {
                Ok(est) => {
                    let _ = writeln!(out, "radial probe: {}  (error estimate {:.1e})", ctext(est.value), est.error_estimate);
                    let _ = writeln!(out, "difference:   {:.3e}", (est.value - finite).norm());
                }
                Err(e) => {
                    let _ = writeln!(out, "radial probe: {e}");
                }
            }
            out
        }
    };
    let (code, warning) = match probe {
        Ok(_) => (EXIT_OK, None),
        Err(e) => (root_failure(e.clone()).code, Some(format!("warning: {e}"))),
    };
    Ok(Rendered { text, code, warning })
}
