//! Command-line interface. `run` is what the binary calls; it never exits
//! the process, so tests can drive it directly.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::{CoeffSpace, Problem};
use crate::defcomplex::Convention;
use crate::deformation::{Deformer, TruncatedDeformation};
use crate::error::{Error, Limits, Result};
use crate::fixtures::{self, FIXTURES};
use crate::io::{self, DeformationFile, IsoFile};
use crate::linalg::RankStrategy;
use crate::report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "homdef", version, about = "Deformation cohomology of module homomorphisms")]
pub struct Cli {
    /// Print the machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest number of entries of any assembled matrix.
    #[arg(long, global = true, value_name = "N")]
    pub entry_cap: Option<usize>,
    /// Seed for the default deformation when none is given.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RankArg {
    Gaussian,
    FractionFree,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a problem file, and optionally a deformation file.
    Check { problem: String, deformation: Option<PathBuf> },
    /// Betti numbers of the three Hochschild complexes and of C*(phi).
    Cohomology {
        problem: String,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value = "augmented")]
        complex: Convention,
        /// Elimination used for ranks.
        #[arg(long, value_enum, default_value = "gaussian")]
        rank: RankArg,
    },
    /// The least nonzero coefficient triple of a deformation.
    Infinitesimal { problem: String, deformation: Option<PathBuf> },
    /// The obstruction to extending a deformation by one order.
    Obstruct { problem: String, deformation: Option<PathBuf> },
    /// Extend a deformation order by order.
    Extend {
        problem: String,
        deformation: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        to_order: usize,
    },
    /// Conjugate by or check a formal isomorphism, or try to trivialize.
    #[command(group(ArgGroup::new("mode").required(true).args(["iso", "probe"])))]
    Equiv {
        problem: String,
        deformation: Option<PathBuf>,
        /// Formal isomorphism file to conjugate by.
        #[arg(long)]
        iso: Option<PathBuf>,
        /// Check `iso` between the deformation and this one instead of conjugating.
        #[arg(long, requires = "iso")]
        target: Option<PathBuf>,
        /// Conjugate away leading coefficients that lie in the image of the augmentation.
        #[arg(long)]
        probe: bool,
        /// Highest order the probe works to (defaults to the deformation's order).
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// The H^1(phi) rigidity criterion.
    Rigidity { problem: String },
    /// Shipped fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixturesCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixturesCommand {
    List,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses arguments and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_command(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Cohomology { .. } => "cohomology",
        Command::Infinitesimal { .. } => "infinitesimal",
        Command::Obstruct { .. } => "obstruct",
        Command::Extend { .. } => "extend",
        Command::Equiv { .. } => "equiv",
        Command::Rigidity { .. } => "rigidity",
        Command::Fixtures { .. } => "fixtures",
    }
}

fn problem_arg(c: &Command) -> &str {
    match c {
        Command::Check { problem, .. }
        | Command::Cohomology { problem, .. }
        | Command::Infinitesimal { problem, .. }
        | Command::Obstruct { problem, .. }
        | Command::Extend { problem, .. }
        | Command::Equiv { problem, .. }
        | Command::Rigidity { problem } => problem,
        Command::Fixtures { .. } => "",
    }
}

fn error_kind(e: &Error) -> (&'static str, i32) {
    match e {
        e if e.is_resource_guard() => ("resource_guard", EXIT_GUARD),
        Error::Internal(_) => ("internal", EXIT_INTERNAL),
        _ => ("invalid_input", EXIT_INVALID),
    }
}

struct Ctx<'c> {
    cli: &'c Cli,
    limits: Limits,
    command: &'static str,
    label: String,
}

impl Ctx<'_> {
    fn emit<T: Serialize + Render>(&self, status: &'static str, code: i32, result: T) -> Outcome {
        let report = Report {
            command: self.command,
            problem: self.label.clone(),
            status,
            result,
        };
        let stdout = if self.cli.json { report.to_json() } else { report.to_text() };
        Outcome { code, stdout, stderr: String::new() }
    }

    fn fail(&self, e: Error) -> Outcome {
        let (kind, code) = error_kind(&e);
        let violations = match &e {
            Error::Invalid { violations, .. } => violations.clone(),
            _ => Vec::new(),
        };
        let mut out = self.emit(
            "error",
            code,
            ErrorBody {
                kind,
                message: e.to_string(),
                violations,
            },
        );
        out.stderr = format!("error: {e}\n");
        out
    }
}

/// Runs a parsed command. Exit codes: 0 success, 2 invalid input,
/// 3 resource guard, 1 internal failure.
pub fn run_command(cli: &Cli) -> Outcome {
    let mut limits = Limits::default();
    if let Some(cap) = cli.entry_cap {
        limits.entry_cap = cap;
    }
    let ctx = Ctx {
        cli,
        limits,
        command: command_name(&cli.command),
        label: problem_arg(&cli.command).to_string(),
    };
    match dispatch(&ctx) {
        Ok(out) => out,
        Err(e) => ctx.fail(e),
    }
}

/// A file path if one exists, otherwise a fixture name.
pub fn load_problem(arg: &str) -> Result<Problem> {
    let path = Path::new(arg);
    if path.is_file() {
        return io::parse_problem(path);
    }
    match fixtures::find(arg) {
        Some(f) => f.load(),
        None => Err(Error::Schema {
            context: arg.to_string(),
            message: "no such file or fixture".into(),
        }),
    }
}

fn load_deformation(df: &Deformer, path: Option<&Path>, seed: u64) -> Result<TruncatedDeformation> {
    match path {
        Some(p) => io::parse_deformation(p, df.problem()),
        None => Ok(df
            .random_order_one(seed)?
            .unwrap_or_else(|| TruncatedDeformation::trivial(df.problem(), 1))),
    }
}

fn dispatch(ctx: &Ctx) -> Result<Outcome> {
    let cli = ctx.cli;
    if let Command::Fixtures { action: FixturesCommand::List } = cli.command {
        return Ok(ctx.emit("ok", EXIT_OK, FixturesBody { fixtures: FIXTURES.to_vec() }));
    }
    let problem = load_problem(problem_arg(&cli.command))?;
    let df = Deformer::new(&problem, ctx.limits);

    match &cli.command {
        Command::Check { deformation, .. } => {
            let report = match deformation {
                Some(p) => Some(df.validate(&io::parse_deformation(p, &problem)?)),
                None => None,
            };
            let valid = report.as_ref().is_none_or(|r| r.is_valid());
            let body = CheckBody {
                field: problem.field().to_string(),
                algebra_dim: problem.algebra.dim(),
                m_dim: problem.m.dim(),
                n_dim: problem.n.dim(),
                deformation: report,
            };
            Ok(if valid {
                ctx.emit("ok", EXIT_OK, body)
            } else {
                ctx.emit("invalid", EXIT_INVALID, body)
            })
        }
        Command::Cohomology {
            max_degree,
            complex,
            rank,
            ..
        } => {
            ctx.limits.check_degree(*max_degree)?;
            let strategy = match rank {
                RankArg::Gaussian => RankStrategy::Gaussian,
                RankArg::FractionFree => RankStrategy::FractionFree,
            };
            let mut hochschild = Vec::new();
            for coeff in CoeffSpace::ALL {
                let h = df.complex().hochschild(coeff);
                let betti = (0..=*max_degree).map(|n| h.betti(n, strategy)).collect::<Result<_>>()?;
                hochschild.push(HochschildRow {
                    coefficients: coeff.label(),
                    betti,
                });
            }
            let deformation = (1..=*max_degree)
                .map(|n| df.complex().betti(n, *complex, strategy))
                .collect::<Result<_>>()?;
            Ok(ctx.emit(
                "ok",
                EXIT_OK,
                CohomologyBody {
                    max_degree: *max_degree,
                    complex: *complex,
                    hochschild,
                    deformation,
                },
            ))
        }
        Command::Infinitesimal { deformation, .. } => {
            let d = load_deformation(&df, deformation.as_deref(), cli.seed)?;
            df.require_valid(&d, "input")?;
            let body = match df.infinitesimal(&d) {
                None => InfinitesimalBody {
                    order: d.order(),
                    trivial_to_order: true,
                    n: None,
                    is_cocycle: None,
                    cochain: None,
                    class_coords: None,
                },
                Some(inf) => InfinitesimalBody {
                    order: d.order(),
                    trivial_to_order: false,
                    n: Some(inf.n),
                    is_cocycle: Some(inf.is_cocycle),
                    class_coords: df.h1()?.class_coords(&inf.cochain.flatten()).as_deref().map(scalars),
                    cochain: Some((&inf.cochain).into()),
                },
            };
            Ok(ctx.emit("ok", EXIT_OK, body))
        }
        Command::Obstruct { deformation, .. } => {
            let d = load_deformation(&df, deformation.as_deref(), cli.seed)?;
            let ob = df.obstruction(&d)?;
            Ok(ctx.emit("ok", EXIT_OK, ObstructionBody::new(&ob, df.h2()?.betti())))
        }
        Command::Extend {
            deformation, to_order, ..
        } => {
            let d = load_deformation(&df, deformation.as_deref(), cli.seed)?;
            let ext = df.extend_to_order(&d, *to_order)?;
            let witness = match &ext.witness {
                Some(w) => Some(ObstructionBody::new(w, df.h2()?.betti())),
                None => None,
            };
            Ok(ctx.emit(
                "ok",
                EXIT_OK,
                ExtendBody {
                    start_order: d.order(),
                    target: *to_order,
                    reached: ext.reached,
                    witness,
                    deformation: DeformationFile::from_deformation(&ext.deformation),
                },
            ))
        }
        Command::Equiv {
            deformation,
            iso,
            target,
            probe,
            max_order,
            ..
        } => {
            let d = load_deformation(&df, deformation.as_deref(), cli.seed)?;
            let body = if *probe {
                let max_order = max_order.unwrap_or(d.order());
                let out = df.trivialize_probe(&d, max_order)?;
                let witness_class = match &out.witness {
                    Some((_, w)) => df.h1()?.class_coords(&w.flatten()).as_deref().map(scalars),
                    None => None,
                };
                EquivBody::Probe(ProbeBody {
                    order: d.order(),
                    max_order,
                    trivial_to: out.trivial_to,
                    fully_trivialized: out.trivial_to == d.order(),
                    witness_degree: out.witness.as_ref().map(|w| w.0),
                    witness_class,
                    witness: out.witness.as_ref().map(|w| (&w.1).into()),
                    iso: IsoFile::from_iso(&out.iso),
                })
            } else {
                let iso = io::parse_iso(iso.as_deref().expect("clap requires --iso or --probe"), &problem)?;
                match target {
                    Some(t) => {
                        let d2 = io::parse_deformation(t, &problem)?;
                        let r = df.check_formal_isomorphism(&d, &d2, &iso)?;
                        EquivBody::Check(IsoCheckBody {
                            checked_order: r.checked_order,
                            is_isomorphism: r.is_isomorphism(),
                            violations: r.violations,
                        })
                    }
                    None => {
                        let c = df.conjugate_deformation(&d, &iso)?;
                        let r = df.check_formal_isomorphism(&d, &c, &iso)?;
                        let (before, after) = if d.order() >= 1 {
                            (Some(df.infinitesimal_class(&d)?), Some(df.infinitesimal_class(&c)?))
                        } else {
                            (None, None)
                        };
                        EquivBody::Conjugate(ConjugateBody {
                            valid: df.validate(&c).is_valid(),
                            iso_check: IsoCheckBody {
                                checked_order: r.checked_order,
                                is_isomorphism: r.is_isomorphism(),
                                violations: r.violations,
                            },
                            classes_equal: before == after,
                            class_before: before.as_deref().map(scalars),
                            class_after: after.as_deref().map(scalars),
                            conjugate: DeformationFile::from_deformation(&c),
                        })
                    }
                }
            };
            Ok(ctx.emit("ok", EXIT_OK, body))
        }
        Command::Rigidity { .. } => Ok(ctx.emit("ok", EXIT_OK, df.rigidity_report()?)),
        Command::Fixtures { .. } => unreachable!("handled above"),
    }
}
