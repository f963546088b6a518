use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Subcommand};

use cobdetect::cob::{BasisFile, BASIS_TOLERANCE};
use cobdetect::correlations::correlation_tensor;
use cobdetect::criteria::evaluate_tensor;
use cobdetect::oracle::{verify_bound_suite, SampleFamily, SamplerConfig};
use cobdetect::scan::{reproduce, scan, ScanSetup};
use cobdetect::{validate_cob, BuiltinBasis, COBasis, ComplexMatrix, ValidationReport};

use crate::settings::{Format, Settings};

#[derive(Debug, Subcommand)]
pub enum BasisCommand {
    /// Check orthogonality, completeness, hermiticity and traces.
    Validate(BasisSource),
    /// Print the operators.
    Show(BasisSource),
}

#[derive(Debug, Args)]
pub struct BasisSource {
    /// construction1-d2, construction2-d2 or construction2-d3.
    #[arg(long, conflicts_with_all = ["file", "dim"])]
    pub name: Option<String>,
    /// JSON basis file.
    #[arg(long, conflicts_with = "dim")]
    pub file: Option<PathBuf>,
    /// Generate a basis of this dimension from `--seed`.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// haar_pure, mixed_convex, product_pure, biseparable_mixture or
    /// k_separable_mixture.
    #[arg(long, default_value = "product_pure")]
    pub family: String,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Local dimensions, e.g. "2,2,2".
    #[arg(long)]
    pub dims: Option<String>,
    /// Upper limit on the number of terms in sampled mixtures.
    #[arg(long)]
    pub max_terms: Option<usize>,
    /// Average every sample over all permutations of the parties.
    #[arg(long)]
    pub symmetrize: bool,
}

/// Raw operators and a label, read without requiring a valid basis.
fn basis_operators(src: &BasisSource, s: &Settings) -> Result<(String, Vec<ComplexMatrix>)> {
    match (&src.name, &src.file, src.dim) {
        (Some(name), None, None) => {
            let b: BuiltinBasis = name.parse()?;
            Ok((b.name().to_string(), b.operators()))
        }
        (None, Some(path), None) => {
            let file =
                BasisFile::load(path).with_context(|| format!("loading {}", path.display()))?;
            Ok((file.label.clone(), file.matrices()?))
        }
        (None, None, Some(d)) => {
            let b = COBasis::generate(d, s.seed.unwrap_or(0))?;
            Ok((b.label().to_string(), b.operators().to_vec()))
        }
        _ => bail!("pass one of --name, --file or --dim"),
    }
}

pub fn basis(cmd: &BasisCommand, s: &Settings) -> Result<bool> {
    match cmd {
        BasisCommand::Validate(src) => {
            let (label, ops) = basis_operators(src, s)?;
            let report = validate_cob(&ops, s.tol.unwrap_or(BASIS_TOLERANCE))?;
            match s.format(Format::Text)? {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                _ => print!("{}", validation_text(&label, &report)),
            }
            Ok(report.passed)
        }
        BasisCommand::Show(src) => {
            let (label, ops) = basis_operators(src, s)?;
            match s.format(Format::Text)? {
                Format::Json => {
                    let d = ops[0].nrows();
                    let file = BasisFile {
                        dim: d,
                        label,
                        operators: ops
                            .iter()
                            .map(|m| {
                                (0..d)
                                    .map(|i| (0..d).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                                    .collect()
                            })
                            .collect(),
                    };
                    println!("{}", serde_json::to_string_pretty(&file)?);
                }
                _ => print!("{}", operators_text(&label, &ops)),
            }
            Ok(true)
        }
    }
}

fn validation_text(label: &str, r: &ValidationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "basis {label}: d = {}, {} operators", r.dim, r.count);
    let _ = writeln!(
        out,
        "  orthogonality  {:.3e}  (worst pair {}, {})",
        r.orthogonality_residual, r.worst_pair.0, r.worst_pair.1
    );
    let _ = writeln!(out, "  completeness   {:.3e}", r.completeness_residual);
    let _ = writeln!(out, "  hermiticity    {:.3e}", r.hermiticity_residual);
    let _ = writeln!(out, "  trace          {:.3e}", r.trace_residual);
    let _ = writeln!(out, "  tolerance      {:.1e}", r.tolerance);
    let _ = writeln!(out, "{}", if r.passed { "PASS" } else { "FAIL" });
    out
}

fn operators_text(label: &str, ops: &[ComplexMatrix]) -> String {
    let mut out = format!("basis {label}\n");
    for (k, m) in ops.iter().enumerate() {
        let _ = writeln!(out, "A{} =", k + 1);
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    format!("{:>+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            let _ = writeln!(out, "  [{}]", row.join(", "));
        }
    }
    out
}

pub fn verdict(s: &Settings) -> Result<bool> {
    let pin = s.pin()?;
    let source = s.source(pin.as_ref())?;
    let rho = s.density(&source)?;
    let bases = s.bases(rho.dims(), pin.as_ref())?;
    let spec = s.criterion(pin.as_ref())?;
    let report = evaluate_tensor(&correlation_tensor(&rho, &bases)?, &spec)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(true)
}

pub fn scan_cmd(s: &Settings) -> Result<bool> {
    let pin = s.pin()?;
    let source = s.source(pin.as_ref())?;
    let setup = ScanSetup {
        family: s.family(&source)?,
        bases: s.bases(&source.dims(), pin.as_ref())?,
        criterion: s.criterion(pin.as_ref())?,
    };
    let result = scan(&setup, &s.grid()?, s.tol(), &s.competitors(pin.as_ref())?)?;
    match s.format(Format::Csv)? {
        Format::Json => println!("{}", serde_json::to_string_pretty(&result)?),
        _ => {
            print!("{}", result.to_csv());
            match (&result.threshold, &result.note) {
                (Some(t), _) => eprintln!(
                    "threshold x = {:.6} ± {:.1e} ({:?})",
                    t.x, t.tolerance, t.crossing
                ),
                (None, Some(note)) => eprintln!("{note}"),
                (None, None) => {}
            }
        }
    }
    Ok(true)
}

pub fn reproduce_cmd(example: u8, s: &Settings) -> Result<bool> {
    let rows = reproduce(example, &s.grid()?, s.tol())?;
    let passed = rows.iter().all(|r| r.passed);
    match s.format(Format::Text)? {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
        _ => {
            println!(
                "{:<8}{:<10}{:>10}{:>12}{:>12}  {:<6}  label",
                "example", "criterion", "published", "computed", "difference", "result"
            );
            for r in &rows {
                println!(
                    "{:<8}{:<10}{:>10}{:>12}{:>12}  {:<6}  {}",
                    r.example,
                    r.criterion,
                    r.published,
                    r.computed.map_or("none".into(), |x| format!("{x:.6}")),
                    r.difference.map_or("-".into(), |d| format!("{d:+.2e}")),
                    if r.passed { "PASS" } else { "FAIL" },
                    r.label
                );
            }
            for r in rows.iter().filter(|r| r.note.is_some()) {
                println!(
                    "note ({}): {}",
                    r.criterion,
                    r.note.as_deref().unwrap_or_default()
                );
            }
        }
    }
    Ok(passed)
}

pub fn tensor(s: &Settings) -> Result<bool> {
    let pin = s.pin()?;
    let source = s.source(pin.as_ref())?;
    let rho = s.density(&source)?;
    let bases = s.bases(rho.dims(), pin.as_ref())?;
    let t = correlation_tensor(&rho, &bases)?;
    match s.format(Format::Csv)? {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "dims": t.dims(),
                "basis_labels": t.basis_labels(),
                "values": t.values(),
            })
        ),
        _ => print!("{}", t.to_csv()),
    }
    Ok(true)
}

pub fn verify(args: &VerifyArgs, s: &Settings) -> Result<bool> {
    let pin = s.pin()?;
    let family = SampleFamily::ALL
        .into_iter()
        .find(|f| f.name() == args.family)
        .ok_or_else(|| anyhow!("unknown sample family `{}`", args.family))?;
    let dims = match (&args.dims, &pin) {
        (Some(d), _) => d
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| anyhow!("bad dimension `{v}`"))
            })
            .collect::<Result<Vec<_>>>()?,
        (None, Some(p)) => p.state.dims(),
        (None, None) => bail!("verify needs --dims or --example"),
    };
    let mut cfg = SamplerConfig::new(s.seed.unwrap_or(0), args.count, dims, family);
    cfg.partition = s.partition()?;
    cfg.symmetrize = args.symmetrize;
    if let Some(m) = args.max_terms {
        cfg.max_terms = m;
    }
    let bases = s.bases(&cfg.dims, pin.as_ref())?;
    let report = verify_bound_suite(&cfg, &bases, &s.criterion(pin.as_ref())?)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.passed)
}
