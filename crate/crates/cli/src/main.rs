//! `qinv`: evaluate, reduce and verify polynomial invariants of quantum codes.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use qinv_core::algebra::{
    is_hermitian_idempotent, shadow_element, shadow_functional_with, AlgebraElement,
};
use qinv_core::codes::{purity_profile, CodeFile, StabilizerCode};
use qinv_core::invariant::DEFAULT_MAX_STATES;
use qinv_core::qspace::is_psd;
use qinv_core::reductions::{
    default_budget, reduce_fixpoint_with_stats, CodeFacts, InvariantExpression,
};
use qinv_core::verify::{verify_442, VerifyConfig};
use qinv_core::{Evaluator, Operator, PermTuple};

#[derive(Parser)]
#[command(
    name = "qinv",
    version,
    about = "Polynomial invariants of quantum codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate A'_t(P) = Tr(T(t) P^{⊗k}) for a code.
    Invariant {
        #[arg(long)]
        code: PathBuf,
        /// Per-letter cycles joined by ';', e.g. "(1,2);(1,2);e;e".
        #[arg(long)]
        tuple: String,
        /// Degree; inferred from the largest point when omitted.
        #[arg(long)]
        k: Option<usize>,
        /// Exit 1 unless the real part matches this value.
        #[arg(long)]
        expect: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Average over all reorderings of the letters.
        #[arg(long)]
        symmetrize: bool,
    },
    /// Evaluate a group-algebra functional Σ λ(t) A'_t(P).
    Shadow {
        #[arg(long)]
        code: PathBuf,
        /// Shadow element on these comma-separated letters (empty for none).
        #[arg(long = "T", value_name = "LETTERS", conflicts_with = "element")]
        subset: Option<String>,
        /// Element file with lines "re im <tuple>".
        #[arg(long)]
        element: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Write the normalized shadow element for a letter subset.
    ShadowElement {
        #[arg(long = "T", value_name = "LETTERS", default_value = "")]
        subset: String,
        #[arg(long)]
        n: usize,
    },
    /// Reduce an invariant expression with merge, splice and antisymmetrizer rules.
    Reduce {
        /// Expression file with lines "re im k <tuple>".
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        /// Subset sizes S with Tr_{S^c}(P) = c I (repeatable).
        #[arg(long = "purity-size")]
        purity_size: Vec<usize>,
        /// Code dimension K.
        #[arg(long = "K")]
        dimension: Option<f64>,
        /// Constant c for a single --purity-size (default K / alpha^|S|).
        #[arg(long)]
        c: Option<f64>,
        /// Derive the facts from a code file instead.
        #[arg(long, conflicts_with_all = ["purity_size", "dimension", "c"])]
        code: Option<PathBuf>,
        /// Also evaluate both sides on this code and exit 1 if they differ.
        #[arg(long)]
        check: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Test whether an element is a Hermitian idempotent.
    CheckIdempotent {
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
    /// Report which reduced states Tr_{S^c}(P) are proportional to I.
    Purity {
        #[arg(long)]
        code: PathBuf,
        #[arg(long = "max-size")]
        max_size: Option<usize>,
    },
    /// Check the quartic identities of a ((4,4,2)) code.
    #[command(name = "verify-442")]
    Verify442 {
        /// Comma-separated stabilizer generators.
        #[arg(long, default_value = "XXXX,ZZZZ")]
        stab: String,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, default_value_t = 442)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        unitaries: usize,
    },
}

enum Status {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qinv: error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Status> {
    let evaluator = Evaluator::new(max_states()?);
    match command {
        Command::Invariant {
            code,
            tuple,
            k,
            expect,
            tolerance,
            symmetrize,
        } => {
            let p = load_code(&code)?;
            let t = PermTuple::parse(&tuple, k).with_context(|| format!("--tuple `{tuple}`"))?;
            let v = if symmetrize {
                evaluator.symmetrize(&t, &p)
            } else {
                evaluator.invariant_code(&t, &p)
            }
            .with_context(|| format!("evaluating --tuple `{tuple}` on {}", code.display()))?;
            println!("{}", fmt_complex(v));
            Ok(match expect {
                Some(x) if !((v.re - x).abs() < tolerance && v.im.abs() < tolerance) => {
                    eprintln!("expected {x}, got {}", fmt_complex(v));
                    Status::CheckFailed
                }
                _ => Status::Ok,
            })
        }
        Command::Shadow {
            code,
            subset,
            element,
            k,
            tolerance,
        } => {
            let p = load_code(&code)?;
            let lam = match (subset, element) {
                (_, Some(path)) => load_element(&path, k)?,
                (subset, None) => {
                    let letters = parse_letters(subset.as_deref().unwrap_or(""))?;
                    shadow_element(&letters, p.shape().letters()).context("--T")?
                }
            };
            let ops = vec![p.clone(); lam.degree()];
            let v = shadow_functional_with(&evaluator, &lam, &ops)?;
            println!("{}", fmt_complex(v));
            let checked = is_hermitian_idempotent(&lam, 1e-10) && is_psd(&p, 1e-9);
            Ok(
                if checked && (v.re < -tolerance || v.im.abs() >= tolerance) {
                    eprintln!("negative functional for a Hermitian idempotent on a PSD operator");
                    Status::CheckFailed
                } else {
                    Status::Ok
                },
            )
        }
        Command::ShadowElement { subset, n } => {
            let letters = parse_letters(&subset)?;
            print!("{}", shadow_element(&letters, n).context("--T")?.to_text());
            Ok(Status::Ok)
        }
        Command::Reduce {
            input,
            alpha,
            purity_size,
            dimension,
            c,
            code,
            check,
            tolerance,
        } => {
            let text = read(&input)?;
            let e = InvariantExpression::parse(&text)
                .with_context(|| format!("{}", input.display()))?;
            let facts = match code {
                Some(path) => {
                    let p = load_code(&path)?;
                    purity_profile(&p, p.shape().letters())
                        .with_context(|| format!("{}", path.display()))?
                        .facts
                }
                None => build_facts(alpha, dimension, &purity_size, c)?,
            };
            let (out, stats) = reduce_fixpoint_with_stats(&e, &facts, default_budget(&e))?;
            for (t, coeff) in out.terms() {
                println!("{} {} {}", fmt_complex(*coeff), t.degree(), t);
            }
            eprintln!(
                "# {} merges, {} splices, {} antisymmetrizer rewrites",
                stats.merges, stats.splices, stats.rewrites
            );
            if let Some(path) = check {
                let p = load_code(&path)?;
                let before = e.evaluate_with(&evaluator, &p)?;
                let after = out.evaluate_with(&evaluator, &p)?;
                eprintln!(
                    "# input {}  reduced {}",
                    fmt_complex(before),
                    fmt_complex(after)
                );
                if (before - after).norm() >= tolerance {
                    return Ok(Status::CheckFailed);
                }
            }
            Ok(Status::Ok)
        }
        Command::CheckIdempotent {
            element,
            k,
            tolerance,
        } => {
            let lam = load_element(&element, k)?;
            let yes = is_hermitian_idempotent(&lam, tolerance);
            println!("idempotent: {}", if yes { "yes" } else { "no" });
            Ok(if yes { Status::Ok } else { Status::CheckFailed })
        }
        Command::Purity { code, max_size } => {
            let p = load_code(&code)?;
            let n = p.shape().letters();
            let profile = purity_profile(&p, max_size.unwrap_or(n))
                .with_context(|| format!("{}", code.display()))?;
            println!("K {:.12}", profile.facts.dimension());
            for s in &profile.subsets {
                let name: Vec<String> = s.letters.iter().map(|l| l.to_string()).collect();
                match s.constant {
                    Some(c) => println!("S={{{}}} c {:.12}", name.join(","), c),
                    None => println!("S={{{}}} not proportional", name.join(",")),
                }
            }
            println!("mds: {}", if profile.mds { "yes" } else { "no" });
            Ok(Status::Ok)
        }
        Command::Verify442 {
            stab,
            tolerance,
            seed,
            unitaries,
        } => {
            let code = StabilizerCode::from_generators(&stab)
                .with_context(|| format!("--stab `{stab}`"))?;
            let p = code
                .projector()
                .with_context(|| format!("--stab `{stab}`"))?;
            let config = VerifyConfig {
                tolerance,
                seed,
                unitaries,
            };
            println!("# verify-442 stab={stab} tolerance={tolerance:e} seed={seed}");
            let checks = verify_442(&p, &config)?;
            for c in &checks {
                println!(
                    "{} {} {}: expected {:.12} actual {:.12} (|diff| {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.id,
                    c.description,
                    c.expected,
                    c.actual,
                    (c.actual - c.expected).abs()
                );
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {} failed", checks.len(), failed);
            Ok(if failed == 0 {
                Status::Ok
            } else {
                Status::CheckFailed
            })
        }
    }
}

fn max_states() -> Result<usize> {
    match std::env::var("QINV_MAX_DIM") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow!("QINV_MAX_DIM=`{v}` is not a positive integer")),
        Err(_) => Ok(DEFAULT_MAX_STATES),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_code(path: &Path) -> Result<Operator> {
    let text = read(path)?;
    CodeFile::parse(&text)
        .and_then(|c| c.projector())
        .with_context(|| format!("{}", path.display()))
}

fn load_element(path: &Path, k: Option<usize>) -> Result<AlgebraElement> {
    let text = read(path)?;
    AlgebraElement::parse(&text, k).with_context(|| format!("{}", path.display()))
}

fn parse_letters(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| anyhow!("--T: `{s}` is not a letter number"))
        })
        .collect()
}

fn build_facts(
    alpha: usize,
    dimension: Option<f64>,
    sizes: &[usize],
    c: Option<f64>,
) -> Result<CodeFacts> {
    let k = dimension.ok_or_else(|| anyhow!("--K is required unless --code is given"))?;
    let mut facts = CodeFacts::new(alpha, k).context("--K/--alpha")?;
    match (c, sizes) {
        (Some(c), [size]) => facts.insert_size(*size, c).context("--c")?,
        (Some(_), _) => bail!("--c needs exactly one --purity-size"),
        (None, _) => {
            for &s in sizes {
                facts
                    .insert_size(s, k / (alpha as f64).powi(s as i32))
                    .context("--purity-size")?;
            }
        }
    }
    Ok(facts)
}

fn fmt_complex(z: Complex64) -> String {
    format!("{} {}", fmt_real(z.re), fmt_real(z.im))
}

/// Twelve decimals, without a sign on values that round to zero.
fn fmt_real(x: f64) -> String {
    let s = format!("{x:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}
