//! Command-line front end: compute Drazin inverses, check hypothesis sets,
//! evaluate named formulas, verify formula-versus-oracle agreement in batch
//! and generate instance files.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 numerical failure,
//! 3 hypothesis violation, 4 verification mismatch.

mod io;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use drazin_core::additive::{self, Orientation, PseudoBlockFamily, SumOfFourTrace};
use drazin_core::block2x2::{self, BlockFormulaTrace, BzZcVariant, BzZcadVariant};
use drazin_core::engine;
use drazin_core::generators::{self, Block2x2Family, GenConfig};
use drazin_core::hypotheses::{self, ConditionSet, HypothesisReport, InstanceRef};
use drazin_core::{CMatrix, Error, Tolerance};

use io::{InstanceFile, LoadedInstance, MatrixFile};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_HYPOTHESIS: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "drazin-kit",
    about = "Drazin inverses of complex matrices: engine, closed-form formulas, checking and verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Equality tolerance (relative residual threshold). Falls back to the
    /// DRAZIN_KIT_TOL environment variable, then 1e-9.
    #[arg(long)]
    tol: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> Result<Tolerance, CliFailure> {
        let eq = match self.tol {
            Some(t) => t,
            None => match std::env::var("DRAZIN_KIT_TOL") {
                Ok(s) => s.trim().parse::<f64>().map_err(|_| CliFailure {
                    code: EXIT_USAGE,
                    message: format!("DRAZIN_KIT_TOL is not a decimal number: {s:?}"),
                })?,
                Err(_) => Tolerance::DEFAULT_EQ_RTOL,
            },
        };
        Tolerance::with_eq_rtol(eq).map_err(|e| CliFailure {
            code: EXIT_USAGE,
            message: e.to_string(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Drazin inverse, index, spectral projector and axiom
    /// residuals of a square matrix file.
    Drazin {
        path: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
        /// Print machine-readable JSON instead of a table.
        #[arg(long, conflicts_with = "table")]
        json: bool,
        /// Print a human-readable table (default).
        #[arg(long)]
        table: bool,
    },
    /// Check an instance file against a named hypothesis set.
    Check {
        path: PathBuf,
        /// Condition-set name (for example SpSr, Miao, Cor42).
        #[arg(long)]
        set: String,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Evaluate a named closed-form formula on an instance file.
    Formula {
        path: PathBuf,
        /// Formula name: hartwig, triangular-upper, triangular-lower,
        /// lemma35, thm37, cor38, remark-dual, thm24-lift, miao, cor42,
        /// cor43i, cor43ii, cor44, cor45, cor46i, cor46ii, cor47.
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        tol: TolArgs,
        /// Also dump the intermediate matrices the formula produced.
        #[arg(long)]
        trace: bool,
    },
    /// Generate instances of a family and compare the matching formula
    /// against the Drazin engine.
    Verify {
        /// Family name: NilSquares, SpSr, RsQs, HartwigPQ, Miao, Cor42,
        /// Cor42BC, Cor44, Cor45, Cor47.
        #[arg(long)]
        family: String,
        /// Number of instances.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Base seed; instance i uses a derived seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sizes: N1xN2 for pseudo-block families, MxN or CORExNILxN for
        /// block families.
        #[arg(long)]
        size: Option<String>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Write a deterministic instance file for a family and seed.
    Generate {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        size: Option<String>,
        /// Output path.
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// A failure with a chosen process exit code.
struct CliFailure {
    code: u8,
    message: String,
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Shape(_)
            | Error::NonFinite
            | Error::InvalidTolerance(_)
            | Error::KindMismatch { .. }
            | Error::Generation(_) => EXIT_USAGE,
            Error::Numerical(_) | Error::IllConditioned { .. } => EXIT_NUMERICAL,
            Error::HypothesisViolation { .. } | Error::GroupIndex { .. } => EXIT_HYPOTHESIS,
        };
        CliFailure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code convention is 2; the contract here is 1
            // for usage errors, with help/version still exiting 0.
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliFailure> {
    match cli.command {
        Command::Drazin {
            path, tol, json, ..
        } => cmd_drazin(&path, &tol, json),
        Command::Check { path, set, tol } => cmd_check(&path, &set, &tol),
        Command::Formula {
            path,
            formula,
            tol,
            trace,
        } => cmd_formula(&path, &formula, &tol, trace),
        Command::Verify {
            family,
            count,
            seed,
            size,
            tol,
        } => cmd_verify(&family, count, seed, size.as_deref(), &tol),
        Command::Generate {
            family,
            seed,
            size,
            output,
        } => cmd_generate(&family, seed, size.as_deref(), &output),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliFailure> {
    let text = fs::read_to_string(path).map_err(|e| CliFailure {
        code: EXIT_USAGE,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| CliFailure {
        code: EXIT_USAGE,
        message: format!("cannot parse {}: {e}", path.display()),
    })
}

#[derive(Serialize)]
struct ResidualsOut {
    commute: f64,
    inner: f64,
    power: f64,
}

#[derive(Serialize)]
struct DrazinOut {
    d: MatrixFile,
    index: usize,
    projector: MatrixFile,
    residuals: ResidualsOut,
}

fn cmd_drazin(path: &PathBuf, tol_args: &TolArgs, json: bool) -> Result<(), CliFailure> {
    let tol = tol_args.resolve()?;
    let mf: MatrixFile = read_json(path)?;
    let a = mf.to_matrix()?;
    if !a.is_square() {
        return Err(CliFailure {
            code: EXIT_USAGE,
            message: format!("matrix must be square, got {}x{}", a.rows(), a.cols()),
        });
    }
    let result = engine::drazin(&a, tol)?;
    if json {
        let out = DrazinOut {
            d: MatrixFile::from_matrix(&result.d),
            index: result.index,
            projector: MatrixFile::from_matrix(&result.projector),
            residuals: ResidualsOut {
                commute: result.residuals.commute,
                inner: result.residuals.inner,
                power: result.residuals.power,
            },
        };
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!("index: {}", result.index);
        println!("drazin inverse:");
        print!("{}", result.d);
        println!("spectral projector:");
        print!("{}", result.projector);
        println!(
            "residuals: commute {:.3e}, inner {:.3e}, power {:.3e}",
            result.residuals.commute, result.residuals.inner, result.residuals.power
        );
    }
    if !result.residuals.within(tol.eq_rtol()) {
        return Err(CliFailure {
            code: EXIT_NUMERICAL,
            message: format!("axiom residuals exceed eq_rtol {:.1e}", tol.eq_rtol()),
        });
    }
    Ok(())
}

fn print_report(report: &HypothesisReport) {
    println!("set: {}", report.set.name());
    for (label, res) in &report.residuals {
        let mark = if *res <= report.eq_rtol {
            "pass"
        } else {
            "FAIL"
        };
        println!("  {label:<24} residual {res:.3e}  {mark}");
    }
    println!(
        "verdict: {} (eq_rtol {:.1e})",
        if report.passed() { "pass" } else { "fail" },
        report.eq_rtol
    );
}

fn cmd_check(path: &PathBuf, set_name: &str, tol_args: &TolArgs) -> Result<(), CliFailure> {
    let tol = tol_args.resolve()?;
    let set = ConditionSet::parse(set_name).ok_or_else(|| CliFailure {
        code: EXIT_USAGE,
        message: format!(
            "unknown condition set {set_name:?}; valid names: {}",
            ConditionSet::ALL
                .iter()
                .map(|s| s.name())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    })?;
    let file: InstanceFile = read_json(path)?;
    let loaded = file.load()?;
    let report = match &loaded {
        LoadedInstance::Pseudo(inst) => hypotheses::check(InstanceRef::Pseudo(inst), set, tol)?,
        LoadedInstance::Block(inst) => hypotheses::check(InstanceRef::Block(inst), set, tol)?,
    };
    print_report(&report);
    if report.passed() {
        Ok(())
    } else {
        Err(CliFailure {
            code: EXIT_HYPOTHESIS,
            message: "hypothesis check failed".into(),
        })
    }
}

fn print_matrix(label: &str, m: &CMatrix) {
    println!("{label}:");
    print!("{m}");
}

fn print_sum_of_four_trace(trace: &SumOfFourTrace) {
    print_matrix("trace T", &trace.t);
    print_matrix("trace X", &trace.x);
    print_matrix("trace P^d", &trace.pd);
    print_matrix("trace T^d", &trace.td);
    println!(
        "bounds: l={} m={} n={} g={}",
        trace.bounds.l, trace.bounds.m, trace.bounds.n, trace.bounds.g
    );
}

fn print_block_trace(trace: &BlockFormulaTrace) {
    print_matrix("trace Z", &trace.z);
    print_matrix("trace W", &trace.w);
    if let Some(core) = &trace.core {
        print_matrix("trace core", core);
    }
    if let Some(t) = &trace.t {
        print_matrix("trace T", t);
    }
    if let Some(td) = &trace.td {
        print_matrix("trace T^d", td);
    }
    if let Some(x) = &trace.x {
        print_matrix("trace X", x);
    }
    println!("bounds: n={} g={}", trace.bounds.n, trace.bounds.g);
}

fn cmd_formula(
    path: &PathBuf,
    formula: &str,
    tol_args: &TolArgs,
    trace: bool,
) -> Result<(), CliFailure> {
    let tol = tol_args.resolve()?;
    let file: InstanceFile = read_json(path)?;
    let loaded = file.load()?;

    let kind_err = |expected: &'static str| CliFailure {
        code: EXIT_USAGE,
        message: format!("formula {formula:?} requires a {expected} instance"),
    };

    match (&loaded, formula) {
        (LoadedInstance::Pseudo(inst), "hartwig") => {
            let result = additive::hartwig_sum(&inst.p, &inst.q, tol)?;
            print_matrix("result", &result);
        }
        (LoadedInstance::Pseudo(inst), "lemma35") => {
            let result = additive::t_core_drazin(inst, tol)?;
            print_matrix("result", &result);
        }
        (LoadedInstance::Pseudo(inst), "thm37") => {
            let (result, tr) = additive::sum_of_four(inst, tol)?;
            print_matrix("result", &result);
            if trace {
                print_sum_of_four_trace(&tr);
            }
        }
        (LoadedInstance::Pseudo(inst), "cor38") => {
            let result = additive::sum_of_four_nilpotent(inst, tol)?;
            print_matrix("result", &result);
        }
        (LoadedInstance::Pseudo(inst), "remark-dual") => {
            let result = additive::sum_of_four_dual(inst, tol)?;
            print_matrix("result", &result);
        }
        (LoadedInstance::Pseudo(inst), "thm24-lift") => {
            let (result, blocks) = additive::pseudo_block_lift(inst, tol)?;
            print_matrix("result", &result);
            if trace {
                print_matrix("lift block A1", &blocks.a1);
                print_matrix("lift block A2", &blocks.a2);
                print_matrix("lift block A3", &blocks.a3);
                print_matrix("lift block A4", &blocks.a4);
            }
        }
        (LoadedInstance::Block(inst), "triangular-upper") => {
            if inst.c.norm() != 0.0 {
                return Err(CliFailure {
                    code: EXIT_USAGE,
                    message: "triangular-upper requires the C block to be zero".into(),
                });
            }
            let result = additive::triangular_block_drazin(
                &inst.a,
                &inst.b,
                &inst.d,
                Orientation::Upper,
                tol,
            )?;
            print_matrix("result", &result);
        }
        (LoadedInstance::Block(inst), "triangular-lower") => {
            if inst.b.norm() != 0.0 {
                return Err(CliFailure {
                    code: EXIT_USAGE,
                    message: "triangular-lower requires the B block to be zero".into(),
                });
            }
            // [[A, 0], [C, D]] matches the lower layout [[d, 0], [c, a]]
            // with a = D, c = C, d = A.
            let result = additive::triangular_block_drazin(
                &inst.d,
                &inst.c,
                &inst.a,
                Orientation::Lower,
                tol,
            )?;
            print_matrix("result", &result);
        }
        (LoadedInstance::Block(inst), name) => {
            let (result, tr) = match name {
                "miao" => block2x2::miao_drazin(inst, tol)?,
                "cor42" => block2x2::drazin_bz_zc_apibc(inst, tol, BzZcVariant::General)?,
                "cor43i" => block2x2::drazin_bz_zc_apibc(inst, tol, BzZcVariant::Z0ApiBc0)?,
                "cor43ii" => block2x2::drazin_bz_zc_apibc(inst, tol, BzZcVariant::Z0ApiB0)?,
                "cor44" => block2x2::drazin_bz_zcad(inst, tol, BzZcadVariant::General)?,
                "cor45" => block2x2::drazin_capi(inst, tol)?,
                "cor46i" => block2x2::drazin_bz_zcad(inst, tol, BzZcadVariant::Z0CApi0)?,
                "cor46ii" => block2x2::drazin_bz_zcad(inst, tol, BzZcadVariant::Z0ApiB0BcApi0)?,
                "cor47" => block2x2::drazin_bc_bd(inst, tol)?,
                "hartwig" | "lemma35" | "thm37" | "cor38" | "remark-dual" | "thm24-lift" => {
                    return Err(kind_err("pseudo_block"))
                }
                _ => {
                    return Err(CliFailure {
                        code: EXIT_USAGE,
                        message: format!("unknown formula {name:?}"),
                    })
                }
            };
            print_matrix("result", &result);
            if trace {
                print_block_trace(&tr);
            }
        }
        (LoadedInstance::Pseudo(_), name) => {
            let block_names = [
                "miao",
                "cor42",
                "cor43i",
                "cor43ii",
                "cor44",
                "cor45",
                "cor46i",
                "cor46ii",
                "cor47",
                "triangular-upper",
                "triangular-lower",
            ];
            if block_names.contains(&name) {
                return Err(kind_err("block2x2"));
            }
            return Err(CliFailure {
                code: EXIT_USAGE,
                message: format!("unknown formula {name:?}"),
            });
        }
    }
    Ok(())
}

/// Parses `--size`: `N1xN2` for pseudo families (block sizes), `MxN` or
/// `CORExNILxN` for block families.
fn apply_size(cfg: &mut GenConfig, size: Option<&str>, pseudo: bool) -> Result<(), CliFailure> {
    let Some(size) = size else { return Ok(()) };
    let parts: Vec<usize> = size
        .split(['x', ','])
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliFailure {
            code: EXIT_USAGE,
            message: format!("cannot parse --size {size:?}"),
        })?;
    match (pseudo, parts.as_slice()) {
        (true, [n1, n2]) => {
            cfg.dims.n1 = *n1;
            cfg.dims.n2 = *n2;
        }
        (false, [m, n]) => {
            let nil = if *m > 1 { 1 } else { 0 };
            cfg.dims.core = m - nil;
            cfg.dims.nil = nil;
            cfg.dims.n2 = *n;
        }
        (false, [core, nil, n]) => {
            cfg.dims.core = *core;
            cfg.dims.nil = *nil;
            cfg.dims.n2 = *n;
        }
        _ => {
            return Err(CliFailure {
                code: EXIT_USAGE,
                message: format!("--size {size:?} does not match the family"),
            })
        }
    }
    Ok(())
}

enum Family {
    Pseudo(PseudoBlockFamily),
    Block(Block2x2Family),
}

fn parse_family(name: &str) -> Result<Family, CliFailure> {
    if let Some(f) = PseudoBlockFamily::parse(name) {
        return Ok(Family::Pseudo(f));
    }
    if let Some(f) = Block2x2Family::parse(name) {
        return Ok(Family::Block(f));
    }
    Err(CliFailure {
        code: EXIT_USAGE,
        message: format!(
            "unknown family {name:?}; valid names: Basic, NilSquares, SpSr, RsQs, HartwigPQ, \
             Miao, Cor42, Cor42BC, Cor44, Cor45, Cor47"
        ),
    })
}

fn cmd_verify(
    family_name: &str,
    count: usize,
    seed: u64,
    size: Option<&str>,
    tol_args: &TolArgs,
) -> Result<(), CliFailure> {
    let tol = tol_args.resolve()?;
    let family = parse_family(family_name)?;
    // A formula is accepted when it matches the engine to within ten times
    // the equality tolerance (1e-8 at the default 1e-9).
    let threshold = 10.0 * tol.eq_rtol();

    let mut max_dev: f64 = 0.0;
    let mut sum_dev: f64 = 0.0;
    let mut passes = 0usize;
    let mut failing_seed = None;

    for i in 0..count {
        let mut cfg = GenConfig::new(generators::derive_seed(seed, i as u64));
        match &family {
            Family::Pseudo(f) => {
                apply_size(&mut cfg, size, true)?;
                let inst = generators::gen_pseudo_block(&cfg, *f)?;
                let n_mat = inst.sum();
                let oracle = engine::drazin(&n_mat, tol)?.d;
                let formula = match f {
                    PseudoBlockFamily::NilSquares | PseudoBlockFamily::Basic => {
                        additive::pseudo_block_lift(&inst, tol)?.0
                    }
                    PseudoBlockFamily::SpSr => additive::sum_of_four(&inst, tol)?.0,
                    PseudoBlockFamily::RsQs => additive::sum_of_four_dual(&inst, tol)?,
                    PseudoBlockFamily::HartwigPQ => additive::hartwig_sum(&inst.p, &inst.q, tol)?,
                };
                let dev = formula.rel_residual(&oracle);
                tally(
                    dev,
                    threshold,
                    cfg.seed,
                    &mut max_dev,
                    &mut sum_dev,
                    &mut passes,
                    &mut failing_seed,
                );
            }
            Family::Block(f) => {
                apply_size(&mut cfg, size, false)?;
                let (inst, _gt) = generators::gen_block2x2(&cfg, *f)?;
                let m_mat = inst.assemble();
                let oracle = engine::drazin(&m_mat, tol)?.d;
                let formula = match f {
                    Block2x2Family::Miao => block2x2::miao_drazin(&inst, tol)?.0,
                    Block2x2Family::Cor42 | Block2x2Family::Cor42Bc => {
                        block2x2::drazin_bz_zc_apibc(&inst, tol, BzZcVariant::General)?.0
                    }
                    Block2x2Family::Cor44 => {
                        block2x2::drazin_bz_zcad(&inst, tol, BzZcadVariant::General)?.0
                    }
                    Block2x2Family::Cor45 => block2x2::drazin_capi(&inst, tol)?.0,
                    Block2x2Family::Cor47 => block2x2::drazin_bc_bd(&inst, tol)?.0,
                };
                let dev = formula.rel_residual(&oracle);
                tally(
                    dev,
                    threshold,
                    cfg.seed,
                    &mut max_dev,
                    &mut sum_dev,
                    &mut passes,
                    &mut failing_seed,
                );
            }
        }
    }

    let mean = if count > 0 {
        sum_dev / count as f64
    } else {
        0.0
    };
    println!("family: {family_name}");
    println!("instances: {count}");
    println!("pass: {passes}/{count}");
    println!("max deviation: {max_dev:.6e}");
    println!("mean deviation: {mean:.6e}");
    if passes == count {
        Ok(())
    } else {
        Err(CliFailure {
            code: EXIT_MISMATCH,
            message: format!(
                "formula/oracle deviation above {threshold:.1e}; reproduce with seed {}",
                failing_seed.unwrap_or(seed)
            ),
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn tally(
    dev: f64,
    threshold: f64,
    seed: u64,
    max_dev: &mut f64,
    sum_dev: &mut f64,
    passes: &mut usize,
    failing_seed: &mut Option<u64>,
) {
    *max_dev = max_dev.max(dev);
    *sum_dev += dev;
    if dev <= threshold {
        *passes += 1;
    } else if failing_seed.is_none() {
        *failing_seed = Some(seed);
    }
}

fn cmd_generate(
    family_name: &str,
    seed: u64,
    size: Option<&str>,
    output: &PathBuf,
) -> Result<(), CliFailure> {
    let family = parse_family(family_name)?;
    let mut cfg = GenConfig::new(seed);
    let file = match family {
        Family::Pseudo(f) => {
            apply_size(&mut cfg, size, true)?;
            let inst = generators::gen_pseudo_block(&cfg, f)?;
            InstanceFile::from_pseudo(&inst)
        }
        Family::Block(f) => {
            apply_size(&mut cfg, size, false)?;
            let (inst, _) = generators::gen_block2x2(&cfg, f)?;
            InstanceFile::from_block(&inst, f.name())
        }
    };
    let text = serde_json::to_string_pretty(&file).unwrap() + "\n";
    fs::write(output, text).map_err(|e| CliFailure {
        code: EXIT_USAGE,
        message: format!("cannot write {}: {e}", output.display()),
    })?;
    println!("wrote {}", output.display());
    Ok(())
}
