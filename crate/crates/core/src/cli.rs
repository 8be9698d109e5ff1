//! The `cqa` command-line front end.
//!
//! Exit codes: 0 on success or a positive check, 1 when a check ran and
//! came out false, 2 for usage, parse, type and I/O errors.

use std::ffi::OsString;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::algebra::{check_frobenius, numbered_alphabet};
use crate::automaton::{CAutomaton, Label};
use crate::dsl::{parse, parse_expr, Evaluator, Program};
use crate::json::{automaton_to_string, trace_to_string, vector_from_json};
use crate::linalg::{format_real, format_scalar, mixed_radix_digits, Scalar, StateVector, DEFAULT_TOLERANCE};
use crate::teleport::{factor_names, initial_state, CorrectionSign, TeleportInput, Teleporter, TraceReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cqa", version, about = "Compose, classify and run complex interface automata")]
struct Cli {
    /// Absolute tolerance for numerical comparisons.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify an automaton and print its interfaces.
    Check {
        file: PathBuf,
        /// A declared name or an expression over declared names.
        #[arg(long)]
        expr: String,
    },
    /// Write an automaton as JSON.
    Eval {
        file: PathBuf,
        #[arg(long)]
        expr: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a behaviour from an initial state along a pair of words.
    Run {
        file: PathBuf,
        #[arg(long)]
        expr: String,
        /// JSON vector, a file holding one, `builtin:tp(ALPHA,BETA)` or `builtin:basis(K)`.
        #[arg(long)]
        init: String,
        /// Comma-separated left labels; tuples as `(a,b)`.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        left: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        right: String,
    },
    /// Iterate the single transition of a closed automaton.
    Steps {
        file: PathBuf,
        #[arg(long)]
        expr: String,
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Compare two automata transition by transition.
    Equal {
        file: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Run the built-in teleportation network on `alpha 0 + beta 1`.
    Teleport {
        /// `RE` or `RE,IM`; `isqrt2` stands for 1/sqrt(2).
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        /// Use [[0,1],[-1,0]] for the `11` correction, removing the -1
        /// phase on that branch.
        #[arg(long)]
        match_trace_sign: bool,
    },
    /// Check the Frobenius equations on an alphabet of the given size.
    Frobenius {
        #[arg(long)]
        size: usize,
    },
}

/// A failure with its exit code and diagnostic.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

type Outcome = Result<i32, Failure>;

struct Context<'a> {
    tolerance: f64,
    format: Format,
    out: &'a mut dyn Write,
}

impl Context<'_> {
    fn emit(&mut self, text: &str) -> Result<(), Failure> {
        writeln!(self.out, "{text}").map_err(|e| Failure::usage(format!("cannot write output: {e}")))
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    if cli.tolerance.is_nan() || cli.tolerance < 0.0 {
        let _ = writeln!(err, "error: --tolerance must be a non-negative number");
        return 2;
    }
    let mut ctx = Context { tolerance: cli.tolerance, format: cli.format, out };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, ctx: &mut Context<'_>) -> Outcome {
    match command {
        Command::Check { file, expr } => check(ctx, &file, &expr),
        Command::Eval { file, expr, out } => eval(ctx, &file, &expr, out.as_deref()),
        Command::Run { file, expr, init, left, right } => run_words(ctx, &file, &expr, &init, &left, &right),
        Command::Steps { file, expr, init, count } => steps(ctx, &file, &expr, &init, count),
        Command::Equal { file, lhs, rhs } => equal(ctx, &file, &lhs, &rhs),
        Command::Teleport { alpha, beta, steps, match_trace_sign } => {
            teleport(ctx, &alpha, &beta, steps, match_trace_sign)
        }
        Command::Frobenius { size } => frobenius(ctx, size),
    }
}

struct Loaded {
    path: PathBuf,
    program: Program,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let src = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let program = parse(&src).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))?;
    Ok(Loaded { path: path.to_path_buf(), program })
}

impl Loaded {
    /// Evaluates a declared name, or else parses `text` as an expression.
    fn automaton(&self, text: &str) -> Result<CAutomaton, Failure> {
        let mut ev = Evaluator::new(&self.program);
        let located = |e: &dyn std::fmt::Display| Failure::usage(format!("{}:{e}", self.path.display()));
        if self.program.get(text).is_some() {
            return ev.automaton(text).map(|a| (*a).clone()).map_err(|e| located(&e));
        }
        let expr = parse_expr(text, &self.program)
            .map_err(|e| Failure::usage(format!("in expression `{text}`: {e}")))?;
        ev.eval_expr(&expr).map_err(|e| Failure::usage(format!("in expression `{text}`: {e}")))
    }
}

fn check(ctx: &mut Context<'_>, file: &Path, expr: &str) -> Outcome {
    let a = load(file)?.automaton(expr)?;
    let tol = ctx.tolerance;
    let (quantum, classical, closed) = (a.is_quantum(tol), a.is_classical(tol), a.is_closed());
    let text = match ctx.format {
        Format::Json => {
            let labels = |xs: &[Label]| xs.iter().map(ToString::to_string).collect::<Vec<_>>();
            json!({
                "quantum": quantum,
                "classical": classical,
                "closed": closed,
                "dim": a.dim(),
                "interfaces": { "left": labels(a.left().labels()), "right": labels(a.right().labels()) },
            })
            .to_string()
        }
        Format::Text => format!(
            "dim: {}\nleft: {}\nright: {}\nquantum: {quantum}\nclassical: {classical}\nclosed: {closed}",
            a.dim(),
            a.left(),
            a.right()
        ),
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn eval(ctx: &mut Context<'_>, file: &Path, expr: &str, out: Option<&Path>) -> Outcome {
    let a = load(file)?.automaton(expr)?;
    let text = automaton_to_string(&a);
    match out {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?,
        None => ctx.emit(&text)?,
    }
    Ok(0)
}

fn parse_real(s: &str) -> Result<f64, Failure> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s.strip_prefix('+').unwrap_or(s).trim()),
    };
    let v = if body == "isqrt2" {
        FRAC_1_SQRT_2
    } else {
        body.parse::<f64>().map_err(|_| Failure::usage(format!("not a number: `{s}`")))?
    };
    if !v.is_finite() {
        return Err(Failure::usage(format!("not a finite number: `{s}`")));
    }
    Ok(if neg { -v } else { v })
}

/// `RE` or `RE,IM`.
fn parse_complex(s: &str) -> Result<Scalar, Failure> {
    match s.split_once(',') {
        Some((re, im)) => Ok(Scalar::new(parse_real(re)?, parse_real(im)?)),
        None => Ok(Scalar::new(parse_real(s)?, 0.0)),
    }
}

/// Splits at commas that are not inside parentheses.
fn split_top_level(s: &str) -> Result<Vec<&str>, Failure> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Failure::usage(format!("unbalanced `)` in `{s}`")));
                }
            }
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Failure::usage(format!("unbalanced `(` in `{s}`")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn parse_label(s: &str) -> Result<Label, Failure> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let mut parts = split_top_level(inner)?.into_iter().map(parse_label);
        let first = parts.next().expect("split yields at least one part")?;
        return parts.try_fold(first, |acc, p| Ok(acc.concat(&p?)));
    }
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Failure::usage(format!("not a label: `{s}`")));
    }
    Ok(Label::atom(s))
}

/// A comma-separated word of labels; the empty string is the empty word.
pub(crate) fn parse_word(s: &str) -> Result<Vec<Label>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top_level(s)
        .and_then(|parts| parts.into_iter().map(parse_label).collect())
        .map_err(|f| f.message)
}

fn builtin_init(builtin: &str) -> Result<StateVector, Failure> {
    let call = |name: &str| builtin.strip_prefix(name).and_then(|r| r.strip_prefix('(')).and_then(|r| r.strip_suffix(')'));
    if let Some(args) = call("tp") {
        let (a, b) = args
            .split_once(',')
            .ok_or_else(|| Failure::usage("builtin:tp takes two arguments: tp(ALPHA,BETA)"))?;
        let input = TeleportInput::new(Scalar::new(parse_real(a)?, 0.0), Scalar::new(parse_real(b)?, 0.0))
            .map_err(|e| Failure::usage(e.to_string()))?;
        return Ok(initial_state(&input));
    }
    Err(Failure::usage(format!("unknown builtin state `{builtin}`; expected tp(ALPHA,BETA) or basis(K)")))
}

fn initial(init: &str, dim: usize) -> Result<StateVector, Failure> {
    let init = init.trim();
    let state = if let Some(builtin) = init.strip_prefix("builtin:") {
        let basis = builtin.strip_prefix("basis(").and_then(|r| r.strip_suffix(')'));
        match basis {
            Some(k) => {
                let k: usize = k.trim().parse().map_err(|_| Failure::usage(format!("not an index: `{k}`")))?;
                if k >= dim {
                    return Err(Failure::usage(format!("basis index {k} out of range for dimension {dim}")));
                }
                StateVector::basis(dim, k)
            }
            None => builtin_init(builtin)?,
        }
    } else if init.starts_with('[') {
        vector_from_json(init).map_err(|e| Failure::usage(format!("initial state: {e}")))?
    } else {
        let text = fs::read_to_string(init).map_err(|e| Failure::usage(format!("cannot read {init}: {e}")))?;
        vector_from_json(&text).map_err(|e| Failure::usage(format!("{init}: {e}")))?
    };
    if state.dim() != dim {
        return Err(Failure::usage(format!("initial state has dimension {}, automaton has dimension {dim}", state.dim())));
    }
    Ok(state)
}

/// Nonzero amplitudes as `amp · basis`, one per line.
fn state_lines(state: &StateVector, tol: f64, name: &dyn Fn(usize) -> String) -> Vec<String> {
    let lines: Vec<String> = state
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > tol)
        .map(|(k, z)| format!("  {} · {}", format_scalar(*z), name(k)))
        .collect();
    if lines.is_empty() {
        vec!["  0".to_string()]
    } else {
        lines
    }
}

fn automaton_namer(a: &CAutomaton) -> impl Fn(usize) -> String + '_ {
    move |k| match a.basis_names() {
        Some(_) => a.basis_label(k),
        None => format!("e{k}"),
    }
}

fn steps_json(states: &[StateVector]) -> Vec<serde_json::Value> {
    states
        .iter()
        .enumerate()
        .map(|(step, s)| {
            json!({
                "step": step,
                "state": s.entries().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "norm2": s.norm_sqr(),
            })
        })
        .collect()
}

fn run_words(ctx: &mut Context<'_>, file: &Path, expr: &str, init: &str, left: &str, right: &str) -> Outcome {
    let a = load(file)?.automaton(expr)?;
    let x0 = initial(init, a.dim())?;
    let lw = parse_word(left).map_err(Failure::usage)?;
    let rw = parse_word(right).map_err(Failure::usage)?;
    let b = a.run_behaviour(&x0, &lw, &rw).map_err(|e| Failure::usage(e.to_string()))?;
    let text = match ctx.format {
        Format::Json => {
            let words = |w: &[Label]| w.iter().map(ToString::to_string).collect::<Vec<_>>();
            json!({
                "left_word": words(&b.left_word),
                "right_word": words(&b.right_word),
                "steps": steps_json(&b.states),
            })
            .to_string()
        }
        Format::Text => {
            let namer = automaton_namer(&a);
            let mut lines = Vec::new();
            for (k, s) in b.states.iter().enumerate() {
                if k == 0 {
                    lines.push("step 0".to_string());
                } else {
                    lines.push(format!("step {k} ({}, {})", b.left_word[k - 1], b.right_word[k - 1]));
                }
                lines.extend(state_lines(s, ctx.tolerance, &namer));
            }
            lines.join("\n")
        }
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn steps(ctx: &mut Context<'_>, file: &Path, expr: &str, init: &str, count: usize) -> Outcome {
    let a = load(file)?.automaton(expr)?;
    let theta = a.closed_transform().map_err(|e| Failure::usage(e.to_string()))?;
    let mut states = vec![initial(init, a.dim())?];
    for _ in 0..count {
        let next = theta.apply(states.last().expect("non-empty")).map_err(|e| Failure::usage(e.to_string()))?;
        states.push(next);
    }
    let text = match ctx.format {
        Format::Json => json!({ "factor_dims": [a.dim()], "steps": steps_json(&states) }).to_string(),
        Format::Text => {
            let namer = automaton_namer(&a);
            let mut lines = Vec::new();
            for (k, s) in states.iter().enumerate() {
                lines.push(format!("step {k}"));
                lines.extend(state_lines(s, ctx.tolerance, &namer));
            }
            lines.join("\n")
        }
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn equal(ctx: &mut Context<'_>, file: &Path, lhs: &str, rhs: &str) -> Outcome {
    let loaded = load(file)?;
    let (p, q) = (loaded.automaton(lhs)?, loaded.automaton(rhs)?);
    if !p.interfaces_match(&q) || p.dim() != q.dim() {
        return Err(Failure::usage(format!(
            "cannot compare: {lhs} is {} -> {} of dimension {}, {rhs} is {} -> {} of dimension {}",
            p.left(),
            p.right(),
            p.dim(),
            q.left(),
            q.right(),
            q.dim()
        )));
    }
    let diff = p.max_transition_diff(&q).expect("shapes checked");
    let same = diff <= ctx.tolerance;
    let text = match ctx.format {
        Format::Json => json!({ "equal": same, "max_difference": diff }).to_string(),
        Format::Text if same => "equal".to_string(),
        Format::Text => format!("not equal (max difference {})", format_real(diff)),
    };
    ctx.emit(&text)?;
    Ok(if same { 0 } else { 1 })
}

/// Basis label of a composite index, skipping one-dimensional factors.
fn factor_label(index: usize, dims: &[usize], names: &[Vec<String>]) -> String {
    let digits = mixed_radix_digits(index, dims);
    let parts: Vec<&str> = digits
        .iter()
        .zip(dims)
        .zip(names)
        .filter(|((_, &d), _)| d > 1)
        .map(|((&k, _), n)| n[k].as_str())
        .collect();
    parts.join(" ⊗ ")
}

fn trace_text(report: &TraceReport, tol: f64) -> String {
    let names = factor_names();
    let namer = |k: usize| factor_label(k, &report.factor_dims, &names);
    let mut lines = Vec::new();
    for (k, s) in report.steps.iter().enumerate() {
        lines.push(format!("step {k} (norm² {})", format_real(s.norm_sqr())));
        lines.extend(state_lines(s, tol, &namer));
    }
    lines.join("\n")
}

fn teleport(ctx: &mut Context<'_>, alpha: &str, beta: &str, steps: usize, match_trace_sign: bool) -> Outcome {
    let input = TeleportInput::new(parse_complex(alpha)?, parse_complex(beta)?)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let sign = if match_trace_sign { CorrectionSign::MatchTrace } else { CorrectionSign::AsPrinted };
    let report = Teleporter::new(sign).run(&input, steps);
    let text = match ctx.format {
        Format::Json => trace_to_string(&report),
        Format::Text => trace_text(&report, ctx.tolerance),
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn frobenius(ctx: &mut Context<'_>, size: usize) -> Outcome {
    if size == 0 {
        return Err(Failure::usage("--size must be at least 1"));
    }
    let holds = check_frobenius(&numbered_alphabet(size), ctx.tolerance);
    let text = match ctx.format {
        Format::Json => json!({ "size": size, "holds": holds }).to_string(),
        Format::Text if holds => format!("Frobenius holds for |A|={size}"),
        Format::Text => format!("Frobenius fails for |A|={size}"),
    };
    ctx.emit(&text)?;
    Ok(if holds { 0 } else { 1 })
}
