mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use charp_core::arith::PPowRational;
use charp_core::bfmod::rt::verify_rt_identities;
use charp_core::bfmod::{verify_basis_actions, verify_level_transformation, verify_structure, BfContext};
use charp_core::bsato::{bs_poly, quasihomogeneous_check, verify_main_theorem};
use charp_core::ideals::{set_pair_cap, Ideal};
use charp_core::poly::{MvPoly, PolyRing, Ring};
use charp_core::singular::{f_jumping_exponents, gamma_set, gamma_set_relative, nu, test_ideal};
use charp_core::Error;

use render::{Body, Output};

const EXIT_DOMAIN: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Levels tried past `--level` when waiting for a test ideal to stabilize.
const TEST_IDEAL_EXTRA_LEVELS: u32 = 5;

#[derive(Parser)]
#[command(name = "charp", version, about = "Test ideals, F-jumping exponents and Bernstein-Sato roots in characteristic p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    prime: u64,
    /// Comma-separated variable names.
    #[arg(long, value_delimiter = ',', required = true)]
    vars: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also print approximate decimal values of rationals.
    #[arg(long)]
    decimal: bool,
}

#[derive(Args)]
struct PolyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    poly: String,
    #[arg(long, default_value_t = 1)]
    level: u32,
}

#[derive(Subcommand)]
enum Command {
    /// τ(f^λ), the first value repeated at two consecutive levels from --level on.
    TestIdeal {
        #[command(flatten)]
        args: PolyArgs,
        /// λ as NUM/DEN.
        #[arg(long)]
        lambda: String,
    },
    /// Intervals (m/p^e, (m+1)/p^e] containing F-jumping exponents in (0, 1].
    Jumps {
        #[command(flatten)]
        args: PolyArgs,
    },
    /// The digit set Γ_f^e, or Γ_(f,h)^e with --aux h.
    Gamma {
        #[command(flatten)]
        args: PolyArgs,
        #[arg(long)]
        aux: Option<String>,
    },
    /// Roots of b_f^(e) for every level 1..=e.
    Bsato {
        #[command(flatten)]
        args: PolyArgs,
    },
    /// ν^J(p^e) and ν/p^e.
    Nu {
        #[command(flatten)]
        args: PolyArgs,
        /// Comma-separated generators of J.
        #[arg(long)]
        ideal: String,
    },
    /// Compares the roots of b_f with the Jacobian staircase for weighted homogeneous f.
    QhCheck {
        #[command(flatten)]
        args: PolyArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        weights: Vec<i64>,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
    },
    /// Verification suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum Suite {
    /// Operator identities on F_p[t].
    Identities {
        #[arg(long)]
        prime: u64,
        /// Largest exponent n and operator order.
        #[arg(long, default_value_t = 200)]
        bound: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Actions of ∂_t, t, θ and D_R^e on the Q-basis, and component shifts.
    Basis {
        #[command(flatten)]
        args: PolyArgs,
        /// Largest m in Q^m.
        #[arg(long, default_value_t = 3)]
        bound: u64,
    },
    /// The change of level for Q^0.
    Transform {
        #[command(flatten)]
        args: PolyArgs,
    },
    /// Every B_f check at the given level.
    Structure {
        #[command(flatten)]
        args: PolyArgs,
        #[arg(long, default_value_t = 3)]
        bound: u64,
    },
    /// Γ at levels e and e + refinement, both digit projections and root truncation.
    Theorem {
        #[command(flatten)]
        args: PolyArgs,
        #[arg(long, default_value_t = 1)]
        refinement: u32,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceExceeded(_) => EXIT_RESOURCE,
        Error::Invariant(_) => EXIT_VERIFY,
        _ => EXIT_DOMAIN,
    }
}

fn ring_of(c: &Common) -> Result<Ring, Failure> {
    Ok(PolyRing::new(c.prime, &c.vars)?)
}

fn parse_poly(args: &PolyArgs) -> Result<MvPoly, Failure> {
    let ring = ring_of(&args.common)?;
    Ok(MvPoly::parse(&args.poly, &ring)?)
}

fn output(args: &PolyArgs, f: &MvPoly, body: Body) -> Output {
    Output {
        prime: args.common.prime,
        vars: args.common.vars.clone(),
        poly: Some(f.to_string()),
        level: Some(args.level),
        body,
    }
}

fn generators(i: &Ideal) -> Result<Vec<String>, Failure> {
    Ok(i.canonical()?.iter().map(|g| g.to_string()).collect())
}

fn run(cli: Cli) -> Result<(Output, Format, bool), Failure> {
    match cli.command {
        Command::TestIdeal { args, lambda } => {
            let f = parse_poly(&args)?;
            let lam: BigRational = lambda
                .parse()
                .map_err(|_| Failure::Usage(format!("--lambda expects NUM/DEN, got `{lambda}`")))?;
            let t = test_ideal(&f, &lam, args.level, args.level + TEST_IDEAL_EXTRA_LEVELS)?;
            let body = Body::TestIdeal {
                lambda: lam.to_string(),
                ideal: generators(&t.ideal)?,
                level: t.level,
                stabilized: t.stabilized,
            };
            Ok((output(&args, &f, body), args.common.format, args.common.decimal))
        }
        Command::Jumps { args } => {
            let f = parse_poly(&args)?;
            let rep = f_jumping_exponents(&f, args.level)?;
            Ok((output(&args, &f, Body::Jumps(rep.jumps)), args.common.format, args.common.decimal))
        }
        Command::Gamma { args, aux } => {
            let f = parse_poly(&args)?;
            let g = match &aux {
                Some(h) => gamma_set_relative(&f, &MvPoly::parse(h, f.ring())?, args.level)?,
                None => gamma_set(&f, args.level)?,
            };
            let tuples = g.tuples.iter().rev().map(|t| t.digits().to_vec()).collect();
            let body = Body::Gamma { tuples, aux };
            Ok((output(&args, &f, body), args.common.format, args.common.decimal))
        }
        Command::Bsato { args } => {
            let f = parse_poly(&args)?;
            let levels = (1..=args.level).map(|e| bs_poly(&f, e)).collect::<Result<Vec<_>, _>>()?;
            Ok((output(&args, &f, Body::Bsato(levels)), args.common.format, args.common.decimal))
        }
        Command::Nu { args, ideal } => {
            let f = parse_poly(&args)?;
            let j = Ideal::parse_list(&ideal, f.ring())?;
            let n = nu(&f, &j, args.level)?;
            let body = Body::Nu {
                ideal: generators(&j)?,
                nu: n,
                ratio: PPowRational::new(n, args.level, args.common.prime),
            };
            Ok((output(&args, &f, body), args.common.format, args.common.decimal))
        }
        Command::QhCheck { args, weights, degree } => {
            let f = parse_poly(&args)?;
            let rep = quasihomogeneous_check(&f, &weights, degree)?;
            Ok((output(&args, &f, Body::Report(rep)), args.common.format, args.common.decimal))
        }
        Command::Verify { suite } => run_suite(suite),
    }
}

fn run_suite(suite: Suite) -> Result<(Output, Format, bool), Failure> {
    let (args, rep) = match suite {
        Suite::Identities { prime, bound, format } => {
            let rep = verify_rt_identities(prime, bound)?;
            let out = Output {
                prime,
                vars: vec!["t".into()],
                poly: None,
                level: None,
                body: Body::Report(rep),
            };
            return Ok((out, format, false));
        }
        Suite::Basis { args, bound } => {
            let ctx = BfContext::new(&parse_poly(&args)?)?;
            let rep = verify_basis_actions(&ctx, args.level, bound)?;
            (args, rep)
        }
        Suite::Transform { args } => {
            let ctx = BfContext::new(&parse_poly(&args)?)?;
            let rep = verify_level_transformation(&ctx, args.level)?;
            (args, rep)
        }
        Suite::Structure { args, bound } => {
            let rep = verify_structure(&parse_poly(&args)?, args.level, bound)?;
            (args, rep)
        }
        Suite::Theorem { args, refinement } => {
            let rep = verify_main_theorem(&parse_poly(&args)?, args.level, refinement)?;
            (args, rep)
        }
    };
    let f = parse_poly(&args)?;
    Ok((output(&args, &f, Body::Report(rep)), args.common.format, args.common.decimal))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(v) = std::env::var("CHARP_GB_PAIR_CAP") {
        match v.trim().parse::<usize>() {
            Ok(cap) if cap > 0 => set_pair_cap(cap),
            _ => {
                eprintln!("error: CHARP_GB_PAIR_CAP must be a positive integer, got `{v}`");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    match run(cli) {
        Ok((out, format, decimal)) => {
            let text = match render::render(&out, format, decimal) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_DOMAIN);
                }
            };
            print!("{text}");
            match &out.body {
                Body::Report(r) if !r.pass => ExitCode::from(EXIT_VERIFY),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
