//! The `quadloop` command line: synthesize a loop for a quadratic equation,
//! verify a loop document against an equation, sample points on a quadric
//! and diagonalize a quadratic form.
//!
//! Exit codes: 0 success, 1 no loop or verification failure, 2 parse or
//! schema error, 3 search limit exceeded, 4 internal error.

use std::fmt::Write as _;
use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use quadloop::emit::{augmented_vars, c_like, pretty, LoopDocument};
use quadloop::isotropy::SearchConfig;
use quadloop::loops::{certify_foreign, first_repeat, verify_invariant, SynthesizedLoop};
use quadloop::parse::{format_equation, parse_equation, parse_polynomial, ParsedEquation};
use quadloop::qform::{definiteness, diagonalize, LinearForm};
use quadloop::{aff_loop, Matrix, QuadraticEquation, QuadraticForm, Rat, SynthesisError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_LOOP: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "quadloop", version, about = "Loops with a prescribed quadratic invariant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Pretty,
    Json,
    C,
}

#[derive(clap::Args, Debug)]
struct SearchArgs {
    /// Max-norm cap for isotropic vector search (overrides QUADLOOP_SEARCH_LIMIT)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    search_limit: Option<u64>,
    /// Comma-separated variable order, e.g. `x,y,z`
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a loop whose states all satisfy the equation
    Synth {
        /// Equation text, or `-` to read it from stdin
        #[arg(allow_hyphen_values = true)]
        equation: String,
        #[arg(long, value_enum, default_value = "pretty")]
        format: OutputFormat,
        /// Iterations re-verified before printing
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        verify: u64,
        /// Emit the (d+1)-variable linear loop instead of the affine one
        #[arg(long)]
        augment: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check a JSON loop document against an equation
    Verify {
        /// Loop document path, or `-` for stdin
        #[arg(long = "loop")]
        loop_file: String,
        #[arg(long, allow_hyphen_values = true)]
        equation: String,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        iters: u64,
    },
    /// Print distinct rational points of the equation taken from a loop orbit
    Sample {
        #[arg(long, allow_hyphen_values = true)]
        equation: String,
        #[arg(short = 'n', default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Diagonalize a quadratic form by congruence
    Diag {
        #[arg(allow_hyphen_values = true)]
        form: String,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
}

/// Result of one invocation.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: i32, message: impl std::fmt::Display) -> Outcome {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let result = match cli.command {
        Command::Synth {
            equation,
            format,
            verify,
            augment,
            search,
        } => synth(&equation, format, verify as usize, augment, &search, stdin),
        Command::Verify {
            loop_file,
            equation,
            iters,
        } => verify(&loop_file, &equation, iters as usize, stdin),
        Command::Sample {
            equation,
            count,
            search,
        } => sample(&equation, count as usize, &search, stdin),
        Command::Diag { form, vars } => diag(&form, vars.as_deref(), stdin),
    };
    result.unwrap_or_else(|o| o)
}

fn read_arg(text: &str, stdin: &mut dyn Read) -> Result<String, Outcome> {
    if text != "-" {
        return Ok(text.to_string());
    }
    let mut s = String::new();
    stdin
        .read_to_string(&mut s)
        .map_err(|e| Outcome::fail(EXIT_INPUT, format!("reading stdin: {e}")))?;
    Ok(s)
}

fn parse(text: &str, vars: Option<&[String]>, stdin: &mut dyn Read) -> Result<ParsedEquation, Outcome> {
    let text = read_arg(text, stdin)?;
    parse_equation(text.trim(), vars).map_err(|e| Outcome::fail(EXIT_INPUT, format!("parse error: {e}")))
}

fn config(search: &SearchArgs) -> SearchConfig {
    let cfg = SearchConfig::from_env();
    match search.search_limit {
        Some(limit) => SearchConfig { limit, ..cfg },
        None => cfg,
    }
}

fn synthesize(parsed: &ParsedEquation, cfg: &SearchConfig) -> Result<SynthesizedLoop, Outcome> {
    aff_loop(&parsed.equation, cfg).map_err(|e| match e {
        SynthesisError::NoLoop(_) => Outcome::fail(EXIT_NO_LOOP, e),
        SynthesisError::LimitExceeded { .. } => Outcome::fail(EXIT_LIMIT, e),
        SynthesisError::Internal(_) => Outcome::fail(EXIT_INTERNAL, e),
    })
}

/// `Q(x) + L(x) − c·one² = 0` in the variables `(one, x)`: the invariant of
/// the augmented linear loop.
fn homogenize(eq: &QuadraticEquation) -> QuadraticEquation {
    let d = eq.dim();
    let half = Rat::new(1.into(), 2.into());
    let mut m = Matrix::zeros(d + 1, d + 1);
    m[(0, 0)] = -eq.constant.clone();
    for i in 0..d {
        let b = &eq.linear.coeffs()[i] * &half;
        m[(0, i + 1)] = b.clone();
        m[(i + 1, 0)] = b;
        for j in 0..d {
            m[(i + 1, j + 1)] = eq.form.matrix()[(i, j)].clone();
        }
    }
    let form = QuadraticForm::new(m).expect("symmetric by construction");
    QuadraticEquation::new(form, LinearForm::zero(d + 1), Rat::from_integer(0.into())).expect("dimensions agree")
}

fn synth(
    equation: &str,
    format: OutputFormat,
    iters: usize,
    augment: bool,
    search: &SearchArgs,
    stdin: &mut dyn Read,
) -> Result<Outcome, Outcome> {
    let parsed = parse(equation, search.vars.as_deref(), stdin)?;
    let mut out = synthesize(&parsed, &config(search))?;
    let invariant = format!("{} = {}", format_lhs(&parsed), parsed.equation.constant);
    let mut vars = parsed.vars.clone();
    let mut target = parsed.equation.clone();
    if augment {
        out = out.augmented();
        vars = augmented_vars(&vars);
        target = homogenize(&parsed.equation);
    }
    let report = verify_invariant(&out.body, &target, iters).map_err(|e| Outcome::fail(EXIT_INTERNAL, e))?;
    if let Some(i) = report.first_violation {
        return Err(Outcome::fail(
            EXIT_INTERNAL,
            format!("synthesized loop violates the invariant at iteration {i}"),
        ));
    }
    let verified = format!("verified: x(0)..x({iters}) satisfy the invariant exactly\n");
    let mut o = Outcome::default();
    match format {
        OutputFormat::Pretty => {
            let _ = writeln!(o.stdout, "invariant: {invariant}");
            let _ = writeln!(o.stdout, "loop: {}", pretty(&out.body, &vars));
            let _ = writeln!(o.stdout, "orbit: {}", out.certificate);
            o.stdout.push_str(&verified);
        }
        OutputFormat::Json => {
            o.stdout = LoopDocument::from_synthesized(&out, Some(vars), true).to_json();
            o.stderr = verified;
        }
        OutputFormat::C => {
            o.stdout = c_like(&out.body, &vars, &invariant, Some(&out.certificate));
            o.stderr = verified;
        }
    }
    Ok(o)
}

/// Left-hand side `Q(x) + L(x)` as printed by the formatter.
fn format_lhs(parsed: &ParsedEquation) -> String {
    let e = &parsed.equation;
    let lhs =
        QuadraticEquation::new(e.form.clone(), e.linear.clone(), Rat::from_integer(0.into())).expect("same dimensions");
    let text = format_equation(&lhs, &parsed.vars);
    text.strip_suffix(" = 0").unwrap_or(&text).to_string()
}

fn verify(loop_file: &str, equation: &str, iters: usize, stdin: &mut dyn Read) -> Result<Outcome, Outcome> {
    let text = if loop_file == "-" {
        read_arg("-", stdin)?
    } else {
        std::fs::read_to_string(loop_file)
            .map_err(|e| Outcome::fail(EXIT_INPUT, format!("cannot read {loop_file}: {e}")))?
    };
    let doc = LoopDocument::from_json(&text).map_err(|e| Outcome::fail(EXIT_INPUT, e))?;
    let parsed = parse(equation, doc.vars.as_deref(), stdin)?;
    if parsed.equation.dim() != doc.dim {
        return Err(Outcome::fail(
            EXIT_INPUT,
            format!(
                "loop has {} variables but the equation has {}",
                doc.dim,
                parsed.equation.dim()
            ),
        ));
    }
    let lp = doc.to_loop();
    let report = verify_invariant(&lp, &parsed.equation, iters).map_err(|e| Outcome::fail(EXIT_INTERNAL, e))?;
    let mut o = Outcome::default();
    if let Some(i) = report.first_violation {
        o.code = EXIT_NO_LOOP;
        let _ = writeln!(o.stdout, "FAIL: invariant violated at iteration {i}");
        return Ok(o);
    }
    let _ = writeln!(o.stdout, "PASS: x(0)..x({iters}) satisfy the invariant exactly");
    match certified(&doc) {
        Some(summary) => {
            let _ = writeln!(o.stdout, "orbit: {summary}");
        }
        None => {
            let detail = match first_repeat(&lp, iters + 1) {
                Some(i) => format!("state {i} repeats an earlier state"),
                None => format!("first {} states distinct", iters + 1),
            };
            let _ = writeln!(o.stderr, "warning: orbit not certified infinite ({detail})");
            if let Some(c) = certify_foreign(&lp, iters + 1) {
                let _ = writeln!(o.stdout, "orbit: {c}");
            }
        }
    }
    Ok(o)
}

/// Certificate summary when the document carries a trace that replays to
/// the loop and a certificate that checks on its core.
fn certified(doc: &LoopDocument) -> Option<String> {
    let s = SynthesizedLoop {
        body: doc.to_loop(),
        certificate: doc.certificate.clone()?,
        trace: doc.trace.clone()?,
    };
    s.validate().ok().map(|_| s.certificate.to_string())
}

fn sample(equation: &str, count: usize, search: &SearchArgs, stdin: &mut dyn Read) -> Result<Outcome, Outcome> {
    let parsed = parse(equation, search.vars.as_deref(), stdin)?;
    let out = synthesize(&parsed, &config(search))?;
    let points = out.body.orbit(count);
    if first_repeat(&out.body, count).is_some() || points.iter().any(|p| !parsed.equation.is_satisfied_by(p)) {
        return Err(Outcome::fail(EXIT_INTERNAL, "sampled points failed re-verification"));
    }
    let mut o = Outcome::default();
    for p in points {
        let _ = writeln!(o.stdout, "{p}");
    }
    Ok(o)
}

fn diag(text: &str, vars: Option<&[String]>, stdin: &mut dyn Read) -> Result<Outcome, Outcome> {
    let text = read_arg(text, stdin)?;
    let text = text.trim();
    let parsed = if text.contains('=') {
        parse_equation(text, vars)
    } else {
        parse_polynomial(text, vars)
    }
    .map_err(|e| Outcome::fail(EXIT_INPUT, format!("parse error: {e}")))?;
    let e = &parsed.equation;
    if !e.linear.is_zero() || e.constant != Rat::from_integer(0.into()) {
        return Err(Outcome::fail(
            EXIT_INPUT,
            "not a quadratic form: linear or constant terms present",
        ));
    }
    let d = diagonalize(&e.form);
    let mut o = Outcome::default();
    let _ = writeln!(o.stdout, "variables: {}", parsed.vars.join(", "));
    let entries: Vec<String> = d.diag.iter().map(|q| q.to_string()).collect();
    let _ = writeln!(o.stdout, "D: diag({})", entries.join(", "));
    let _ = writeln!(o.stdout, "sigma: {}", d.sigma);
    let _ = writeln!(o.stdout, "rank: {}", d.rank());
    let _ = writeln!(o.stdout, "definiteness: {}", definiteness(&d.diag));
    Ok(o)
}
