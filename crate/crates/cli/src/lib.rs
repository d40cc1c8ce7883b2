//! Command-line front end: argument parsing, input handling and rendering.
//!
//! [`run`] is the whole program; `main` only wires it to the process streams.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use balancelab::balance::{self, BalanceReport};
use balancelab::classify::{self, StructureRecord};
use balancelab::enumerate::{self, CensusFormat};
use balancelab::invariants;
use balancelab::spinflip::{self, FlipSpec};
use balancelab::statekit::{self, format_state, parse_state, State};
use balancelab::topo::{self, LoopReport, PhaseSet};
use balancelab::verify::{self, Group, OrbitCheckReport, TheoremReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

pub mod corpus;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for a bad state, a violated guard or a failed check.
pub const EXIT_DOMAIN: i32 = 1;
/// Exit status for malformed command lines.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    /// A check ran but did not pass; the report has already been written.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) | CliError::Failed(_) => EXIT_DOMAIN,
        }
    }
}

impl From<balancelab::Error> for CliError {
    fn from(e: balancelab::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "balancelab",
    version,
    about = "Balancedness analysis of pure multi-qubit states"
)]
pub struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, env = "BALANCELAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Shorthand for `--format json`.
    #[arg(long, global = true, conflicts_with = "format")]
    pub json: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct Input {
    /// State expression, e.g. `|000> + |111>`.
    #[arg(long, conflicts_with = "state_file")]
    pub state: Option<String>,
    /// File holding a state in JSON form.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Scale the input to unit norm.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct FlipChoice {
    /// Comma-separated term indices in basis order.
    #[arg(long, value_delimiter = ',')]
    pub flip_terms: Option<Vec<usize>>,
    /// The flipped part given as a state expression.
    #[arg(long)]
    pub flip_theta: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    ThreeQubit,
    Structure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Theorems,
    Orbits,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a state and print it in JSON (default) or expression form.
    Parse(Input),
    /// Balance report: class, irreducibility, z-vector, forced zeros.
    Analyze(Input),
    /// Partial spin flip; prints the flipped state.
    Flip {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        choice: FlipChoice,
    },
    /// τ3, τ31 (three qubits only) and the norm invariant.
    Invariants(Input),
    /// Predicted phase set and diagonal rotation loops.
    Phases {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 12)]
        max_denominator: u64,
    },
    /// Detection-tuple or structural classification.
    Classify {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Scheme::Structure)]
        scheme: Scheme,
    },
    /// Census of irreducible A-classes.
    Enumerate {
        #[arg(long)]
        qubits: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded invariance and theorem checks.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        q_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run every fixture in a corpus directory.
    Corpus { path: PathBuf },
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
}

/// Runs the program and returns its exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli, stdin) {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            EXIT_OK
        }
        Err((out, e)) => {
            if let Some(out) = out {
                let _ = stdout.write_all(out.as_bytes());
            }
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

type InvariantFn = fn(&State) -> balancelab::Result<Complex64>;

type Outcome = std::result::Result<String, (Option<String>, CliError)>;

fn execute(cli: Cli, stdin: &mut dyn Read) -> Outcome {
    let state_default = matches!(cli.command, Command::Parse(_) | Command::Flip { .. });
    let format = match (cli.json, cli.format) {
        (true, _) => Format::Json,
        (false, Some(f)) => f,
        (false, None) if state_default => Format::Json,
        (false, None) => Format::Table,
    };
    let cfg = RunConfig { seed: cli.seed, format };
    let bare = |r: CliResult<String>| r.map_err(|e| (None, e));
    match cli.command {
        Command::Parse(input) => bare(read_input(&input, stdin).map(|s| render_state(&s, format))),
        Command::Analyze(input) => bare(read_input(&input, stdin).and_then(|s| analyze(&s, format))),
        Command::Flip { input, choice } => bare(read_input(&input, stdin).and_then(|s| flip(&s, &choice, format))),
        Command::Invariants(input) => bare(read_input(&input, stdin).and_then(|s| invariants_cmd(&s, format))),
        Command::Phases { input, max_denominator } => {
            bare(read_input(&input, stdin).and_then(|s| phases(&s, max_denominator, format)))
        }
        Command::Classify { input, scheme } => {
            bare(read_input(&input, stdin).and_then(|s| classify_cmd(&s, scheme, format)))
        }
        Command::Enumerate { qubits, out } => bare(enumerate_cmd(qubits, out.as_deref(), format)),
        Command::Verify {
            suite,
            samples,
            q_max,
            tol,
        } => verify_cmd(&cfg, suite, samples, q_max, tol),
        Command::Corpus { path } => corpus_cmd(&path, format),
    }
}

/// Reads the state from `--state`, `--state-file`, or stdin (JSON or an
/// expression), normalizing on request.
pub fn read_input(input: &Input, stdin: &mut dyn Read) -> CliResult<State> {
    let s = if let Some(expr) = &input.state {
        parse_state(expr).map_err(|e| CliError::Domain(format!("--state: {e}")))?
    } else if let Some(path) = &input.state_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
        State::from_json_str(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?
    } else {
        let mut text = String::new();
        stdin
            .read_to_string(&mut text)
            .map_err(|e| CliError::Domain(format!("cannot read stdin: {e}")))?;
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(CliError::Usage(
                "no input: pass --state, --state-file, or a state on stdin".into(),
            ));
        }
        if trimmed.starts_with('{') {
            State::from_json_str(trimmed).map_err(|e| CliError::Domain(format!("stdin: {e}")))?
        } else {
            parse_state(trimmed).map_err(|e| CliError::Domain(format!("stdin: {e}")))?
        }
    };
    if input.normalize {
        Ok(statekit::normalize(&s)?)
    } else {
        Ok(s)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports are serializable");
    s.push('\n');
    s
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn render_state(s: &State, format: Format) -> String {
    match format {
        Format::Json => to_json(&s.to_json()),
        Format::Table => format!("{}\n", format_state(s)),
    }
}

fn analyze(s: &State, format: Format) -> CliResult<String> {
    let r = balance::balance_report(s)?;
    Ok(match format {
        Format::Json => to_json(&r),
        Format::Table => report_table(&r),
    })
}

fn list<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn report_table(r: &BalanceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "class        {}", r.class);
    let _ = writeln!(out, "irreducible  {}", r.irreducible);
    let _ = writeln!(out, "kernel_dim   {}", r.kernel_dim);
    let _ = writeln!(out, "length       {}", r.length);
    let _ = writeln!(out, "terms        {}", list(&r.terms));
    if let Some(z) = &r.z {
        let _ = writeln!(
            out,
            "z            ({})",
            z.weights().iter().map(i64::to_string).collect::<Vec<_>>().join(",")
        );
    }
    if let Some(sum) = r.z_sum {
        let _ = writeln!(out, "z_sum        {sum}");
    }
    if !r.forced_zeros.is_empty() {
        let _ = writeln!(out, "forced_zeros {}", list(&r.forced_zeros));
    }
    out
}

fn flip(s: &State, choice: &FlipChoice, format: Format) -> CliResult<String> {
    let spec = match (&choice.flip_terms, &choice.flip_theta) {
        (Some(terms), None) => FlipSpec::terms(terms.iter().copied()),
        (None, Some(expr)) => {
            FlipSpec::Theta(parse_state(expr).map_err(|e| CliError::Domain(format!("--flip-theta: {e}")))?)
        }
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --flip-terms and --flip-theta".into(),
            ))
        }
    };
    Ok(render_state(&spinflip::flip(s, &spec)?, format))
}

fn invariant_values(s: &State) -> CliResult<Value> {
    let three = s.qubits() == 3;
    let tau3 = if three {
        Some(complex_json(invariants::tau3(s)?.value))
    } else {
        None
    };
    let tau31 = if three {
        Some(complex_json(invariants::tau31(s)?.value))
    } else {
        None
    };
    Ok(json!({
        "tau3": tau3,
        "tau31": tau31,
        "norm": complex_json(invariants::norm_invariant(s).value),
    }))
}

fn invariants_cmd(s: &State, format: Format) -> CliResult<String> {
    let v = invariant_values(s)?;
    Ok(match format {
        Format::Json => to_json(&v),
        Format::Table => {
            let mut out = String::new();
            for key in ["tau3", "tau31", "norm"] {
                let cell = match &v[key] {
                    Value::Null => "n/a (needs 3 qubits)".to_string(),
                    c => format!(
                        "{:.12} {:+.12}i",
                        c["re"].as_f64().unwrap_or(0.0),
                        c["im"].as_f64().unwrap_or(0.0)
                    ),
                };
                let _ = writeln!(out, "{key:<6} {cell}");
            }
            out
        }
    })
}

#[derive(Serialize)]
struct PhasesJson {
    predicted: Option<PhaseSet>,
    loops: LoopReport,
}

fn phases(s: &State, max_denominator: u64, format: Format) -> CliResult<String> {
    let r = balance::balance_report(s)?;
    let predicted = match (&r.z, r.irreducible) {
        (Some(z), true) if z.sum() != 0 => Some(topo::predicted_phase_set(z)),
        _ => None,
    };
    let loops = topo::z_rotation_loops(s, max_denominator)?;
    let p = PhasesJson { predicted, loops };
    Ok(match format {
        Format::Json => to_json(&p),
        Format::Table => {
            let achieved: Vec<String> = p
                .loops
                .achieved
                .iter()
                .map(|r| match r.num {
                    0 => "0".to_string(),
                    _ => PhaseSet::MultiplesOf { generator_over_pi: *r }.to_string(),
                })
                .collect();
            let mut out = String::new();
            let _ = writeln!(
                out,
                "predicted   {}",
                p.predicted
                    .as_ref()
                    .map_or("n/a".to_string(), |x| format!("multiples of {x}"))
            );
            let _ = writeln!(out, "achieved    {}", achieved.join(" "));
            let _ = writeln!(out, "continuous  {}", p.loops.continuous);
            out
        }
    })
}

fn structure_table(r: &StructureRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "class          {}", r.class);
    let _ = writeln!(out, "irreducible    {}", r.irreducible);
    let _ = writeln!(out, "length         {}", r.length);
    match &r.z {
        Some(z) => {
            let _ = writeln!(
                out,
                "z              ({})",
                z.weights().iter().map(i64::to_string).collect::<Vec<_>>().join(",")
            );
        }
        None => {
            let _ = writeln!(out, "forced_zeros   {}", list(&r.forced_zeros));
        }
    }
    if let Some(sum) = r.z_sum {
        let _ = writeln!(out, "z_sum          {sum}");
    }
    if let Some(p) = &r.phase {
        let _ = writeln!(out, "phase          multiples of {p}");
    }
    if let Some(n) = r.minimal_parts {
        let kind = match r.parts_kind {
            balance::PartKind::C => "c",
            balance::PartKind::A => "a",
        };
        let _ = writeln!(out, "minimal_parts  {n} ({kind})");
    }
    out
}

fn classify_cmd(s: &State, scheme: Scheme, format: Format) -> CliResult<String> {
    match scheme {
        Scheme::ThreeQubit => {
            let t = classify::classify3(s)?;
            let bits: Vec<u8> = t.bits.iter().map(|&b| b as u8).collect();
            Ok(match format {
                Format::Json => to_json(&json!({
                    "scheme": "three-qubit",
                    "bits": bits,
                    "registry": t.registry,
                    "label": t.label,
                    "values": t.values.iter().map(|&v| complex_json(v)).collect::<Vec<_>>(),
                })),
                Format::Table => format!(
                    "({}) {}\n",
                    bits.iter().map(u8::to_string).collect::<Vec<_>>().join(","),
                    t.label.unwrap_or_default()
                ),
            })
        }
        Scheme::Structure => {
            let r = classify::classify_structure(s)?;
            Ok(match format {
                Format::Json => {
                    let mut v = serde_json::to_value(&r).expect("record is serializable");
                    v["scheme"] = json!("structure");
                    to_json(&v)
                }
                Format::Table => structure_table(&r),
            })
        }
    }
}

fn enumerate_cmd(qubits: usize, out: Option<&Path>, format: Format) -> CliResult<String> {
    let census = enumerate::enumerate_irreducible(qubits)?;
    let mut text = enumerate::census_report(
        &census,
        match format {
            Format::Json => CensusFormat::Json,
            Format::Table => CensusFormat::Table,
        },
    );
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Serialize)]
struct VerifyJson {
    seed: u64,
    samples: usize,
    tolerance: f64,
    theorems: Option<TheoremReport>,
    orbits: Vec<OrbitCheckReport>,
    pass: bool,
}

/// Named three-qubit fixtures used by the orbit suite.
fn orbit_fixtures() -> Vec<(&'static str, State)> {
    [
        ("GHZ", "|000> + |111>"),
        ("W", "|100> + |010> + |001>"),
        ("W'", "|000> + |100> + |010> + |001>"),
        ("X", "|111> + |100> + |010> + |001>"),
    ]
    .into_iter()
    .map(|(n, e)| {
        (
            n,
            statekit::normalize(&parse_state(e).expect("fixture parses")).expect("nonzero"),
        )
    })
    .collect()
}

fn verify_cmd(cfg: &RunConfig, suite: Suite, samples: usize, q_max: usize, tol: f64) -> Outcome {
    let run = || -> CliResult<VerifyJson> {
        let theorems = match suite {
            Suite::All | Suite::Theorems => Some(verify::theorem_suite(q_max, samples, cfg.seed)?),
            Suite::Orbits => None,
        };
        let mut orbits = Vec::new();
        if matches!(suite, Suite::All | Suite::Orbits) {
            for (name, s) in orbit_fixtures() {
                let cases: [(&str, Group, InvariantFn); 5] = [
                    ("tau3", Group::SpecialUnitary, |x| Ok(invariants::tau3(x)?.value)),
                    ("tau3", Group::SpecialLinear, |x| Ok(invariants::tau3(x)?.value)),
                    ("tau31", Group::SpecialUnitary, |x| Ok(invariants::tau31(x)?.value)),
                    ("norm", Group::SpecialUnitary, |x| {
                        Ok(invariants::norm_invariant(x).value)
                    }),
                    ("tau31", Group::SpecialLinear, |x| Ok(invariants::tau31(x)?.value)),
                ];
                for (inv, group, f) in cases {
                    // τ31 is not SL-invariant; only W′ is checked, for movement.
                    if inv == "tau31" && group == Group::SpecialLinear && name != "W'" {
                        continue;
                    }
                    let mut r =
                        verify::orbit_invariance(&s, &format!("{inv}({name})"), f, group, samples, cfg.seed, tol)?;
                    if inv == "tau31" && group == Group::SpecialLinear {
                        r.invariant = format!("{inv}({name}) moves");
                        r.tolerance = 1e-3;
                        r.pass = r.max_deviation >= 1e-3;
                    }
                    orbits.push(r);
                }
            }
        }
        let pass = theorems.as_ref().is_none_or(|t| t.pass(tol)) && orbits.iter().all(|o| o.pass);
        Ok(VerifyJson {
            seed: cfg.seed,
            samples,
            tolerance: tol,
            theorems,
            orbits,
            pass,
        })
    };
    let report = run().map_err(|e| (None, e))?;
    let text = match cfg.format {
        Format::Json => to_json(&report),
        Format::Table => verify_table(&report),
    };
    if report.pass {
        Ok(text)
    } else {
        Err((Some(text), CliError::Failed("verification failed".into())))
    }
}

fn verify_table(r: &VerifyJson) -> String {
    let mut out = String::new();
    let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
    if let Some(t) = &r.theorems {
        for c in &t.checks {
            let ok = c.violations == 0 && c.max_deviation.is_none_or(|d| d <= r.tolerance);
            let dev = c
                .max_deviation
                .map_or(String::new(), |d| format!(", max deviation {d:.2e}"));
            let _ = writeln!(
                out,
                "{} {:<32} {}/{} violations{dev}",
                mark(ok),
                c.name,
                c.violations,
                c.trials
            );
        }
    }
    for o in &r.orbits {
        let _ = writeln!(
            out,
            "{} {:<32} {:?}, max deviation {:.2e}",
            mark(o.pass),
            o.invariant,
            o.group,
            o.max_deviation
        );
    }
    let _ = writeln!(out, "seed {}, samples {}: {}", r.seed, r.samples, mark(r.pass));
    out
}

fn corpus_cmd(path: &Path, format: Format) -> Outcome {
    let summary = corpus::run_fixture_corpus(path).map_err(|e| (None, CliError::Domain(e.to_string())))?;
    let text = match format {
        Format::Json => to_json(&summary),
        Format::Table => summary.table(),
    };
    if summary.passed == summary.total {
        Ok(text)
    } else {
        let failed: Vec<&str> = summary
            .results
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.file.as_str())
            .collect();
        Err((
            Some(text),
            CliError::Failed(format!("failing fixtures: {}", failed.join(", "))),
        ))
    }
}
