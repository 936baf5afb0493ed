//! Command-line front end. `run` never panics on bad input: it returns exit
//! code 2 for usage and parameter errors and 1 when a verification fails.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result, ADMISSIBILITY_RULES};
use crate::kernel::{meixner_kernel, Block, HyperKernel};
use crate::measure::{mixed_measure, z_measure_n, GrandParams, ZParams};
use crate::partition::enumerate_partitions;
use crate::sample::sample_batch;
use crate::verify::{run_suite, scaling_limit_check, Suite, SuiteConfig, VerificationReport, SCHEMA_VERSION};

/// Relative `--out` paths resolve against this directory when it is set.
pub const OUT_DIR_ENV: &str = "HYPERKERNEL_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hyperkernel", version, about = "z-measures on partitions and their hypergeometric correlation kernel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// z as a real or "a+bi" [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// z'; defaults to conj(z) for complex z, or 1/3 when z is not given either
    #[arg(long, allow_hyphen_values = true)]
    zp: Option<String>,
}

#[derive(Debug, Args)]
struct GrandArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// xi in (0, 1)
    #[arg(long, default_value_t = 0.2)]
    xi: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// M^(n)(lambda) = (dim lambda)^2/n! * (zz')^d/(zz')_n * prod_i (z+1)_{p_i} (z'+1)_{p_i} (1-z)_{q_i} (1-z')_{q_i}
    /// for every lambda with n boxes; with --xi the mixture weight (1-xi)^t (t)_n/n! xi^n is included.
    Measure {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        params: ParamArgs,
        /// multiply by the negative-binomial weight at this xi
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One block of K = L(1+L)^-1: K++(k,l) = (P+(k)Q+(l) - Q+(k)P+(l))/(k-l),
    /// K+-(k,l) = (P+(k)P-(l) + Q+(k)Q-(l))/(k+l+1), and so on, for 0 <= k, l < trunc.
    Kernel {
        #[command(flatten)]
        grand: GrandArgs,
        #[arg(long, default_value = "++", allow_hyphen_values = true)]
        block: String,
        #[arg(long, default_value_t = 10)]
        trunc: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verification suites: normalization (sum over Y_n is one), oracle (rho(X) = det K_X against
    /// brute force), fredholm (det(1+L) = (1-xi)^-t), identities (Gauss-function decompositions),
    /// meixner (K++(k,l) = M_N(k+N,l+N) at z = N+alpha, z' = N), scaling (xi -> 1 Whittaker limit).
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        grand: GrandArgs,
        /// largest n for the normalization suite
        #[arg(long, default_value_t = 18)]
        max_n: u32,
        /// N for the meixner suite
        #[arg(long, default_value_t = 3)]
        meixner_n: u32,
        /// alpha for the meixner suite
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact draws from M_{z,z',xi}: n from (1-xi)^t (t)_n/n! xi^n, then lambda from M^(n).
    /// Emits one JSON line of metadata followed by one line per draw.
    Sample {
        #[command(flatten)]
        grand: GrandArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Meixner kernel M_N(k,l) = sum_{n<N} M_n(k) M_n(l) / h_n * sqrt(f(k) f(l)) with
    /// f(k) = (alpha+1)_k xi^k / k!, for 0 <= k, l < trunc.
    Meixner {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.4)]
        xi: f64,
        #[arg(long, default_value_t = 10)]
        trunc: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (1-xi)^-1 K(floor(u/(1-xi)), floor(v/(1-xi))) against the Whittaker kernel at (u, v)
    /// for every block and each xi.
    Scaling {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1.0)]
        u: f64,
        #[arg(long, default_value_t = 2.0)]
        v: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.99, 0.999])]
        xi: Vec<f64>,
        #[arg(long, default_value_t = 5e-2)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `"a"`, `"a+bi"`, `"a-bi"`, `"bi"`, `"i"`, `"-i"`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot read {s:?} as a real or a+bi"));
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(num(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (num(&body[..i])?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => num(t)?,
    };
    Ok(Complex64::new(re, im))
}

fn zparams(p: &ParamArgs) -> Result<ZParams> {
    let z = match &p.z {
        Some(s) => parse_complex(s)?,
        None => Complex64::new(0.5, 0.0),
    };
    let zp = match (&p.zp, &p.z) {
        (Some(s), _) => parse_complex(s)?,
        (None, None) => Complex64::new(1.0 / 3.0, 0.0),
        (None, Some(_)) if z.im != 0.0 => z.conj(),
        (None, Some(_)) => return Err(Error::Admissibility("--zp is required for real --z".into())),
    };
    ZParams::new(z, zp)
}

fn grand(g: &GrandArgs) -> Result<GrandParams> {
    GrandParams::new(zparams(&g.params)?, g.xi)
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let io_err = |e: io::Error| Error::Domain(format!("cannot write output: {e}"));
    match out {
        Some(p) => {
            let p = resolve(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(io_err)?;
            }
            fs::write(&p, text).map_err(io_err)
        }
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(io_err),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Domain(e.to_string()))
}

fn matrix_csv(m: &nalgebra::DMatrix<f64>) -> String {
    let mut s = String::from("k");
    for j in 0..m.ncols() {
        s.push_str(&format!(",{j}"));
    }
    s.push('\n');
    for i in 0..m.nrows() {
        s.push_str(&i.to_string());
        for j in 0..m.ncols() {
            s.push_str(&format!(",{}", m[(i, j)]));
        }
        s.push('\n');
    }
    s
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Reports go to `--out` when given, else to stdout; the exit code reflects `pass`.
fn finish_reports(reports: &[VerificationReport], out: Option<&Path>) -> Result<i32> {
    let body = if reports.len() == 1 { to_json(&reports[0])? } else { to_json(&reports)? };
    emit(out, &body)?;
    for r in reports {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        eprintln!("{tag} {} ({} cases, {:.2}s)", r.suite, r.cases.len(), r.runtime_seconds);
    }
    Ok(if reports.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_FAILED })
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Measure { n, params, xi, out } => {
            let zp = zparams(&params)?;
            let gp = xi.map(|x| GrandParams::new(zp, x)).transpose()?;
            let rows = enumerate_partitions(n)?
                .into_iter()
                .map(|l| {
                    let value = match &gp {
                        Some(g) => mixed_measure(&l, g)?,
                        None => z_measure_n(&l, &zp)?,
                    };
                    let (p, q) = l.frobenius();
                    Ok(json!({ "parts": l.parts(), "frobenius": [p, q], "value": value }))
                })
                .collect::<Result<Vec<_>>>()?;
            let doc = json!({ "schema_version": SCHEMA_VERSION, "n": n, "params": zp, "xi": xi, "rows": rows });
            emit(out.as_deref(), &to_json(&doc)?)?;
            Ok(EXIT_OK)
        }
        Command::Kernel { grand: g, block, trunc, format, out } => {
            let gp = grand(&g)?;
            let block: Block = block.parse()?;
            let kb = HyperKernel::new(gp).block_matrix(block, trunc)?;
            let text = match format {
                Format::Csv => matrix_csv(&kb.entries),
                Format::Json => to_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "block": kb.block,
                    "truncation": kb.truncation,
                    "params": kb.params,
                    "entries": matrix_rows(&kb.entries),
                }))?,
            };
            emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Verify { suite, grand: g, max_n, meixner_n, alpha, out } => {
            let suite: Suite = suite.parse()?;
            let mut cfg = SuiteConfig::new(grand(&g)?);
            cfg.max_n = max_n;
            cfg.meixner_n = meixner_n;
            cfg.meixner_alpha = alpha;
            let out = out.or_else(|| std::env::var_os(OUT_DIR_ENV).map(|_| PathBuf::from(format!("verify-{suite}.json"))));
            finish_reports(&run_suite(suite, &cfg)?, out.as_deref())
        }
        Command::Sample { grand: g, seed, count, out } => {
            let gp = grand(&g)?;
            let batch = sample_batch(&gp, seed, count)?;
            let mut text = serde_json::to_string(&json!({
                "schema_version": SCHEMA_VERSION,
                "seed": batch.seed,
                "rng": batch.rng,
                "streams": batch.streams,
                "params": batch.params,
                "count": batch.count,
            }))
            .map_err(|e| Error::Domain(e.to_string()))?;
            text.push('\n');
            for (i, d) in batch.draws.iter().enumerate() {
                text.push_str(&json!({ "index": i, "parts": d }).to_string());
                text.push('\n');
            }
            emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Meixner { n, alpha, xi, trunc, format, out } => {
            let mut m = nalgebra::DMatrix::zeros(trunc, trunc);
            for k in 0..trunc {
                for l in 0..trunc {
                    m[(k, l)] = meixner_kernel(n, alpha, xi, k as u64, l as u64)?;
                }
            }
            let text = match format {
                Format::Csv => matrix_csv(&m),
                Format::Json => to_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "n": n, "alpha": alpha, "xi": xi, "truncation": trunc,
                    "entries": matrix_rows(&m),
                }))?,
            };
            emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Scaling { params, u, v, xi, tol, out } => {
            let zp = zparams(&params)?;
            finish_reports(&[scaling_limit_check(&zp, u, v, &xi, tol)?], out.as_deref())
        }
    }
}

fn is_parameter_error(e: &Error) -> bool {
    matches!(e, Error::Admissibility(_) | Error::Parse(_) | Error::Domain(_) | Error::DegenerateBlock(_))
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Admissibility(_)) {
                eprintln!("{ADMISSIBILITY_RULES}");
            }
            if is_parameter_error(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAILED
            }
        }
    }
}
