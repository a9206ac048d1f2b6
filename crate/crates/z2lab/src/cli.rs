//! The `z2lab` command line.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use z2lab_core::fock::{self, FamilyReport};
use z2lab_core::fourier::{self, TrigMatrixPoly};
use z2lab_core::intsets::{self, FiniteSet, Generator, PatternKind, PatternWitness};
use z2lab_core::matrix;
use z2lab_core::moments::{self, McReport, MomentProfile, SystemSpec};
use z2lab_core::quad::QuadratureResult;
use z2lab_core::rcnorms::{self, AscentOptions, CertificateSource};
use z2lab_core::witness::{self, AbelianCase, AbelianCheck, AbelianRatio, AuditOutcome};

use crate::batch;
use crate::io::{self, FamilyJson, IoError, MatrixJson, TupleJson};
use crate::parallel::thread_count;
use crate::report::{render, BracketJson, Format, ViolationJson, Z2Json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SENTINEL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "z2lab",
    version,
    about = "Z2 sets, rc-Schatten norms and Khintchine ratios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Absolute quadrature / relative bracket tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    FivePairs,
    ThreeAps,
    Ap5,
}

impl From<KindArg> for PatternKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::FivePairs => PatternKind::FivePairs,
            KindArg::ThreeAps => PatternKind::ThreeAPs,
            KindArg::Ap5 => PatternKind::AP5,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GeneratorArg {
    Powers,
    Furstenberg,
    Circle,
    Primes,
    GreedySidon,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SystemArg {
    ComplexGaussian,
    RealGaussian,
    Characters,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CaseArg {
    Torus,
    Z2,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Z₂ constant and difference histogram of a set.
    Z2 {
        #[arg(long)]
        set: PathBuf,
    },
    /// Z_p constant (alternating sums of p elements).
    Zp {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        p: usize,
    },
    /// Smallest five-pairs / three-progressions / 5-progression pattern.
    Pattern {
        #[arg(long)]
        set: PathBuf,
        /// Restrict to one kind (default: all three).
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Print the counterexample polynomial of the first pattern found instead.
        #[arg(long)]
        emit_witness: bool,
    },
    /// Generate a named set. `--format text` gives the set file format.
    Generate {
        #[arg(long, value_enum)]
        kind: GeneratorArg,
        #[arg(long, default_value_t = 2)]
        base: i64,
        #[arg(long, default_value_t = 10)]
        count: u32,
        #[arg(long, default_value_t = 1000)]
        limit: i64,
        #[arg(long, default_value_t = 25)]
        k: i64,
    },
    /// Partial-isometry family of order n.
    Fock {
        #[arg(long)]
        n: usize,
        /// Run the property checks.
        #[arg(long)]
        verify: bool,
        /// Use the hand-written n = 2 matrices.
        #[arg(long)]
        fixture: bool,
        /// Print the family as JSON matrices.
        #[arg(long)]
        export: bool,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Certified bracket for the S₁(ℓ₂^rc) norm of a tuple.
    NormS1rc {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, default_value_t = 500)]
        iterations: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// S_∞(ℓ₂^rc) norm of a tuple.
    NormSinf {
        #[arg(long)]
        poly: PathBuf,
    },
    /// L₁(S₁) norm of a polynomial by adaptive quadrature.
    L1 {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Khintchine ratio interval against 1/√2.
    Ratio {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Exact trace moments, moment inequality and sup-norm check.
    Moments {
        #[arg(long)]
        poly: PathBuf,
        /// Constant in m2 ⪯ α m1 (default 1 + Z₂ of the frequencies).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Moment profile (N1, N2, Z21, Z22, Z23, α, β, η) of an orthonormal system.
    Profile {
        #[arg(long, value_enum)]
        system: SystemArg,
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Character set for `--system characters`.
        #[arg(long)]
        set: Option<PathBuf>,
        /// Also run a Monte Carlo check with this many samples (Gaussian systems).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Converse audit: find a pattern and certify the violation when Z₂ ≥ 7.
    Audit {
        #[arg(long)]
        set: PathBuf,
    },
    /// Abelian ratio sequences B_m / A_m.
    Abelian {
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum)]
        case: CaseArg,
        /// Recompute A_m and B_m numerically (m ≤ 3).
        #[arg(long)]
        check: bool,
    },
}

/// Exit status plus captured output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, message: String) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: message,
        }
    }
}

fn exit_code(e: &IoError) -> i32 {
    match e {
        IoError::Core(z2lab_core::Error::PatternNotFound { .. }) => EXIT_SENTINEL,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_INPUT,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::error(code, text)
            };
        }
    };
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        return Outcome::error(EXIT_INPUT, "error: --tol must be positive\n".into());
    }
    match dispatch(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => Outcome {
                    code: EXIT_OK,
                    stdout: String::new(),
                    stderr: String::new(),
                },
                Err(e) => Outcome::error(EXIT_INPUT, format!("error: {}: {e}\n", path.display())),
            },
            None => Outcome {
                code: EXIT_OK,
                stdout: text,
                stderr: String::new(),
            },
        },
        Err(e) => Outcome::error(exit_code(&e), format!("error: {e}\n")),
    }
}

fn emit<T: Serialize>(report: &T, format: Format) -> Result<String, IoError> {
    Ok(render(report, format)?)
}

#[derive(Serialize)]
struct ZpJson {
    size: usize,
    p: usize,
    zp: usize,
}

#[derive(Serialize)]
struct PatternJson {
    kind: PatternKind,
    witness: Option<PatternWitness>,
}

#[derive(Serialize)]
struct SetJson {
    generator: String,
    size: usize,
    elements: serde_json::Value,
}

#[derive(Serialize)]
struct SinfJson {
    d: usize,
    n: usize,
    sinfty_rc: f64,
}

#[derive(Serialize)]
struct RatioJson {
    l1: QuadratureResult,
    s1rc_lower: f64,
    s1rc_upper: f64,
    s1rc_converged: bool,
    certificate_source: CertificateSource,
    ratio_interval: [f64; 2],
    threshold: f64,
    violates: bool,
}

#[derive(Serialize)]
struct MomentsJson {
    sinfty_rc: f64,
    frequency_z2: usize,
    alpha: f64,
    m1: MatrixJson,
    m2: MatrixJson,
    m1_normalised: MatrixJson,
    m2_normalised: MatrixJson,
    moment_inequality: bool,
    sup_norm_lower: f64,
    sup_norm_upper: f64,
    column_square_norm: f64,
    sup_bound_holds: bool,
}

#[derive(Serialize)]
struct ProfileJson {
    system: String,
    d: usize,
    profile: MomentProfile,
    profile_star: MomentProfile,
    khintchine_constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<McReport>,
}

#[derive(Serialize)]
struct AuditJson {
    z2: usize,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<ViolationJson>,
}

#[derive(Serialize)]
struct AbelianJson {
    limit: f64,
    closed: AbelianRatio,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<AbelianCheck>,
}

fn dispatch(cli: &Cli) -> Result<String, IoError> {
    let (tol, fmt) = (cli.tol, cli.format);
    match &cli.command {
        Command::Z2 { set } => {
            let v = io::read_set(set)?;
            let size = match &v {
                FiniteSet::Integers(s) => s.len(),
                FiniteSet::Lattice(s) => s.len(),
            };
            emit(&Z2Json::new(size, intsets::z2_report(&v)), fmt)
        }
        Command::Zp { set, p } => {
            let v = io::read_integer_set(set)?;
            let zp = intsets::zp_constant(&v, *p)?;
            emit(
                &ZpJson {
                    size: v.len(),
                    p: *p,
                    zp,
                },
                fmt,
            )
        }
        Command::Pattern {
            set,
            kind,
            emit_witness,
        } => {
            let v = io::read_integer_set(set)?;
            let kinds: Vec<PatternKind> = match kind {
                Some(k) => vec![(*k).into()],
                None => PatternKind::ALL.to_vec(),
            };
            if *emit_witness {
                let w = kinds
                    .iter()
                    .find_map(|&k| intsets::find_pattern(&v, k))
                    .ok_or_else(|| IoError::Format("no pattern in this set".into()))?;
                let poly = witness::build_witness(&w)?;
                return emit(&TupleJson::from(&poly), fmt);
            }
            let found: Vec<PatternJson> = kinds
                .iter()
                .map(|&k| PatternJson {
                    kind: k,
                    witness: intsets::find_pattern(&v, k),
                })
                .collect();
            emit(&found, fmt)
        }
        Command::Generate {
            kind,
            base,
            count,
            limit,
            k,
        } => {
            let g = match kind {
                GeneratorArg::Powers => Generator::Powers {
                    base: *base,
                    count: *count,
                },
                GeneratorArg::Furstenberg => Generator::Furstenberg { limit: *limit },
                GeneratorArg::Circle => Generator::Circle { k: *k },
                GeneratorArg::Primes => Generator::Primes { limit: *limit },
                GeneratorArg::GreedySidon => Generator::GreedySidon {
                    count: *count as usize,
                },
            };
            let set = intsets::generate(g)?;
            if fmt == Format::Text {
                return Ok(io::format_set(&set));
            }
            let (size, elements) = match &set {
                FiniteSet::Integers(v) => (v.len(), serde_json::to_value(v.elements())?),
                FiniteSet::Lattice(v) => (v.len(), serde_json::to_value(v.points())?),
            };
            emit(
                &SetJson {
                    generator: format!("{g:?}"),
                    size,
                    elements,
                },
                fmt,
            )
        }
        Command::Fock {
            n,
            verify,
            fixture,
            export,
            trials,
        } => {
            let family = if *fixture {
                if *n != 2 {
                    return Err(IoError::Format("the fixture exists only for n = 2".into()));
                }
                fock::fixture_n2()
            } else {
                fock::build_family(*n)?
            };
            if *export {
                return emit(&FamilyJson::from(&family), fmt);
            }
            #[derive(Serialize)]
            struct Summary {
                n: usize,
                d: usize,
                members: usize,
            }
            if *verify {
                let r: FamilyReport = fock::verify_family(&family, 1e-12, *trials, cli.seed);
                emit(&r, fmt)
            } else {
                emit(
                    &Summary {
                        n: family.n,
                        d: family.d,
                        members: family.ops.len(),
                    },
                    fmt,
                )
            }
        }
        Command::NormS1rc {
            poly,
            iterations,
            restarts,
        } => {
            let t = io::read_tuple(poly)?;
            let opts = AscentOptions {
                iterations: *iterations,
                restarts: *restarts,
                seed: cli.seed,
                ..AscentOptions::default()
            };
            let b = rcnorms::s1_rc_norm(&t, tol, &opts)?;
            emit(&BracketJson::from(&b), fmt)
        }
        Command::NormSinf { poly } => {
            let t = io::read_tuple(poly)?;
            emit(
                &SinfJson {
                    d: t.len(),
                    n: t.n(),
                    sinfty_rc: rcnorms::sinfty_rc_norm(&t),
                },
                fmt,
            )
        }
        Command::L1 { poly } => {
            let p = io::read_poly(poly)?;
            emit(&fourier::l1_s1_norm(&p, tol)?, fmt)
        }
        Command::Ratio { poly } => {
            let p = io::read_poly(poly)?;
            let r = fourier::khintchine_ratio(&p, tol)?;
            emit(
                &RatioJson {
                    l1: r.l1,
                    s1rc_lower: r.s1rc.lower,
                    s1rc_upper: r.s1rc.upper,
                    s1rc_converged: r.s1rc.converged,
                    certificate_source: r.s1rc.certificate_source,
                    ratio_interval: [r.ratio_interval.0, r.ratio_interval.1],
                    threshold: z2lab_core::INV_SQRT2,
                    violates: r.violates,
                },
                fmt,
            )
        }
        Command::Moments { poly, alpha } => moments_report(&io::read_poly(poly)?, *alpha, tol, fmt),
        Command::Profile {
            system,
            d,
            set,
            samples,
        } => {
            let spec = match system {
                SystemArg::ComplexGaussian => SystemSpec::ComplexGaussian { d: *d },
                SystemArg::RealGaussian => SystemSpec::RealGaussian { d: *d },
                SystemArg::Characters => {
                    let path = set
                        .as_ref()
                        .ok_or_else(|| IoError::Format("--system characters needs --set".into()))?;
                    SystemSpec::GroupCharacters(io::read_set(path)?)
                }
            };
            let profile = moments::profile(&spec)?;
            let profile_star = moments::profile_star(&spec)?;
            let monte_carlo = match samples {
                Some(s) => Some(batch::monte_carlo_profile(
                    &spec,
                    *s,
                    cli.seed,
                    thread_count(),
                )?),
                None => None,
            };
            emit(
                &ProfileJson {
                    system: format!("{system:?}"),
                    d: spec.len(),
                    khintchine_constant: moments::khintchine_constant(&profile, &profile_star),
                    profile,
                    profile_star,
                    monte_carlo,
                },
                fmt,
            )
        }
        Command::Audit { set } => {
            let v = io::read_integer_set(set)?;
            let r = witness::converse_audit(&v, tol)?;
            let (outcome, violation) = match &r.outcome {
                AuditOutcome::Consistent => ("consistent", None),
                AuditOutcome::Violation(v) => ("violation", Some(ViolationJson::from(v))),
            };
            emit(
                &AuditJson {
                    z2: r.z2,
                    outcome,
                    violation,
                },
                fmt,
            )
        }
        Command::Abelian { m, case, check } => {
            let case = match case {
                CaseArg::Torus => AbelianCase::TorusProducts,
                CaseArg::Z2 => AbelianCase::Z2Products,
            };
            let closed = witness::abelian_ratio(*m, case)?;
            let check = if *check {
                Some(witness::abelian_ratio_numeric_check(*m, case, tol)?)
            } else {
                None
            };
            emit(
                &AbelianJson {
                    limit: case.limit(),
                    closed,
                    check,
                },
                fmt,
            )
        }
    }
}

fn moments_report(
    p: &TrigMatrixPoly,
    alpha: Option<f64>,
    tol: f64,
    fmt: Format,
) -> Result<String, IoError> {
    let freqs = intsets::IntegerSet::try_from_distinct(p.frequencies().to_vec())?;
    let frequency_z2 = intsets::z2_constant(&freqs);
    let alpha = alpha.unwrap_or(1.0 + frequency_z2 as f64);
    let s = rcnorms::sinfty_rc_norm(p.tuple());
    let raw = fourier::tau_moments(p);
    let scale = if s > 0.0 { 1.0 / s } else { 1.0 };
    let normalised = fourier::tau_moments(&TrigMatrixPoly::from_tuple(
        p.tuple().map(|m| m.scale_real(scale)),
    )?);
    let sup = fourier::linf_bracket(p, tol)?;
    let column_square_norm = if p.is_empty() {
        0.0
    } else {
        matrix::hermitian_op_norm(&rcnorms::column_square(p.mats()))?
    };
    emit(
        &MomentsJson {
            sinfty_rc: s,
            frequency_z2,
            alpha,
            m1: MatrixJson::from(&raw.m1),
            m2: MatrixJson::from(&raw.m2),
            m1_normalised: MatrixJson::from(&normalised.m1),
            m2_normalised: MatrixJson::from(&normalised.m2),
            moment_inequality: fourier::moment_inequality_check(p, alpha, 1e-9)?,
            sup_norm_lower: sup.lower,
            sup_norm_upper: sup.upper,
            column_square_norm,
            sup_bound_holds: fourier::lem_bdd_check(p, tol)?,
        },
        fmt,
    )
}
