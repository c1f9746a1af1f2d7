use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use diagforge::diagonal::{diagonal, iterate, witness_rows, DiagError, Machine, Witness};
use diagforge::enumeration::{enumerate_stream, EnumError, Tier};
use diagforge::kernel::{
    check_well_formed, infer_sort, parse, parse_value, EvalBudget, EvalError, Term, TypedProgram, Value,
    DEFAULT_MAX_STEPS,
};
use diagforge::refuter::{refute_with, Classifier, Policy, RefuteError, RefuteOptions, DEFAULT_HORIZON};
use diagforge::spaces::{AnalyticalSpace, SpaceError};
use diagforge::synthesis::{synthesize, GoalSpec, ReflectionBase, Schema, SynthError, SynthOutcome};

const BUDGET_VAR: &str = "DIAGFORGE_BUDGET";

/// Diagonalization and synthesis workbench for a small total language.
#[derive(Parser)]
#[command(name = "diagforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the first programs of a tier, one `index<TAB>size<TAB>program` line each.
    Enum {
        #[arg(long)]
        tier: Tier,
        #[arg(long)]
        count: u64,
    },
    /// Print the program at one enumeration index.
    Show {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        index: u64,
        #[arg(long)]
        tier: Tier,
    },
    /// Witness rows showing the diagonal differs from each enumerated function.
    Diag {
        #[arg(long)]
        tier: Tier,
        #[arg(long)]
        witness: u64,
        /// Evaluation step budget per program run.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Extend the base machine by its own diagonal, repeatedly.
    Iterate {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        witness: u64,
        #[arg(long, default_value = "natfn")]
        tier: Tier,
    },
    /// Diagonalize against the programs a classifier accepts.
    Refute {
        /// `maxsize:B`, `all`, `none` or `program:FILE`
        #[arg(long)]
        classifier: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: u64,
        #[arg(long, default_value = "natfn")]
        tier: Tier,
    },
    /// Build a program from input-output examples.
    Synth {
        #[arg(long)]
        schema: Schema,
        /// One `input -> output` pair per line.
        #[arg(long)]
        goal: PathBuf,
        /// Maximum term size (per hole, for pivotdc).
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value = "kernel", value_parser = ["kernel", "natfn"])]
        base: String,
        /// Print a JSON record instead of the bare program.
        #[arg(long)]
        json: bool,
    },
    /// Create and transform analytical-space snapshot files.
    #[command(subcommand)]
    Space(SpaceCommand),
}

#[derive(Subcommand)]
enum SpaceCommand {
    /// Start an empty space over the given probes.
    New {
        #[arg(long = "probe", required = true)]
        probes: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add programs to a space.
    Absorb {
        #[command(flatten)]
        io: SpaceIo,
        #[arg(long = "program", required = true)]
        programs: Vec<String>,
    },
    /// Merge two spaces over the union of their probes.
    Unify {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add probes to a space, splitting classes that now disagree.
    Expand {
        #[command(flatten)]
        io: SpaceIo,
        #[arg(long = "probe", required = true)]
        probes: Vec<String>,
    },
    /// Print a space snapshot as one JSON line.
    Export {
        #[arg(long)]
        space: PathBuf,
    },
}

#[derive(Args)]
struct SpaceIo {
    #[arg(long)]
    space: PathBuf,
    /// Defaults to overwriting `--space`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed run: the exit status and a message for stderr.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn domain(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn exhausted(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        match e {
            EvalError::ResourceExhausted { .. } => exhausted(e.to_string()),
            EvalError::InputMismatch { .. } => usage(e.to_string()),
        }
    }
}

impl From<DiagError> for Failure {
    fn from(e: DiagError) -> Failure {
        match e {
            DiagError::ResourceExhausted { .. } => exhausted(e.to_string()),
            DiagError::MissingIndex { .. } => domain(e.to_string()),
        }
    }
}

impl From<EnumError> for Failure {
    fn from(e: EnumError) -> Failure {
        match e {
            EnumError::IndexZero | EnumError::NotInTier(_) => usage(e.to_string()),
            EnumError::OutOfRange(_) => domain(e.to_string()),
        }
    }
}

impl From<RefuteError> for Failure {
    fn from(e: RefuteError) -> Failure {
        match e {
            RefuteError::EmptyClassifier { .. } => domain(e.to_string()),
            RefuteError::Decider { .. } => exhausted(e.to_string()),
            RefuteError::Diag(d) => d.into(),
        }
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Failure {
        match e {
            SynthError::ResourceExhausted(ev) => ev.into(),
            SynthError::InvalidBase(_) | SynthError::SchemaSort(..) => usage(e.to_string()),
        }
    }
}

impl From<SpaceError> for Failure {
    fn from(e: SpaceError) -> Failure {
        match e {
            SpaceError::Eval(ev) => ev.into(),
            other => usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        usage(e.to_string())
    }
}

fn eval_budget(flag: Option<u64>) -> Result<EvalBudget, Failure> {
    let steps = match (flag, std::env::var(BUDGET_VAR)) {
        (Some(s), _) => s,
        (None, Ok(v)) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{BUDGET_VAR} must be a positive integer, got `{v}`")))?,
        (None, Err(_)) => DEFAULT_MAX_STEPS,
    };
    if steps == 0 {
        return Err(usage("the evaluation budget must be at least 1"));
    }
    Ok(EvalBudget::new(steps))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_term(text: &str) -> Result<Term, Failure> {
    parse(text.trim()).map_err(|e| usage(format!("`{}`: {e}", text.trim())))
}

fn parse_values(texts: &[String]) -> Result<Vec<Value>, Failure> {
    texts
        .iter()
        .map(|t| parse_value(t.trim()).map_err(|e| usage(format!("`{t}`: {e}"))))
        .collect()
}

fn parse_classifier(text: &str) -> Result<Classifier, Failure> {
    match text {
        "all" => Ok(Classifier::Builtin(Policy::All)),
        "none" => Ok(Classifier::Builtin(Policy::None)),
        _ => {
            if let Some(b) = text.strip_prefix("maxsize:") {
                let b = b.parse().map_err(|_| usage(format!("bad size bound in `{text}`")))?;
                Ok(Classifier::Builtin(Policy::MaxSize(b)))
            } else if let Some(file) = text.strip_prefix("program:") {
                let term = parse_term(&read(Path::new(file))?)?;
                Ok(Classifier::program(&term)?)
            } else {
                Err(usage(format!(
                    "unknown classifier `{text}` (expected maxsize:B, all, none or program:FILE)"
                )))
            }
        }
    }
}

fn json<T: Serialize>(record: &T) -> String {
    serde_json::to_string(record).expect("records serialize")
}

fn load_space(path: &Path, budget: EvalBudget) -> Result<AnalyticalSpace, Failure> {
    let text = read(path)?;
    Ok(AnalyticalSpace::from_json(&text)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?
        .with_budget(budget))
}

fn save_space(space: &AnalyticalSpace, path: &Path) -> Result<(), Failure> {
    std::fs::write(path, space.to_json() + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct SpaceSummary {
    classes: usize,
    probes: usize,
    history_length: usize,
}

fn summary(space: &AnalyticalSpace) -> String {
    json(&SpaceSummary {
        classes: space.class_count(),
        probes: space.probes().len(),
        history_length: space.history().len(),
    })
}

fn space_program(space: &AnalyticalSpace, text: &str) -> Result<TypedProgram, Failure> {
    let term = parse_term(text)?;
    let sig = space.signature();
    let sort = infer_sort(&term, &sig).map_err(|e| usage(format!("`{term}`: {e}")))?;
    check_well_formed(&term, sort, &sig).map_err(|e| usage(format!("`{term}`: {e}")))
}

fn run_space(cmd: SpaceCommand, out: &mut Vec<String>) -> Result<(), Failure> {
    let budget = eval_budget(None)?;
    match cmd {
        SpaceCommand::New { probes, out: path } => {
            let space = AnalyticalSpace::new_space(parse_values(&probes)?)?;
            save_space(&space, &path)?;
            out.push(summary(&space));
        }
        SpaceCommand::Absorb { io, programs } => {
            let mut space = load_space(&io.space, budget)?;
            for text in &programs {
                let p = space_program(&space, text)?;
                space = space.absorb(p)?;
            }
            save_space(&space, io.out.as_ref().unwrap_or(&io.space))?;
            out.push(summary(&space));
        }
        SpaceCommand::Unify { left, right, out: path } => {
            let a = load_space(&left, budget)?;
            let b = load_space(&right, budget)?;
            let space = AnalyticalSpace::unify(&a, &b)?;
            save_space(&space, &path)?;
            out.push(summary(&space));
        }
        SpaceCommand::Expand { io, probes } => {
            let space = load_space(&io.space, budget)?.expand_domain(parse_values(&probes)?)?;
            save_space(&space, io.out.as_ref().unwrap_or(&io.space))?;
            out.push(summary(&space));
        }
        SpaceCommand::Export { space } => {
            out.push(json(&load_space(&space, budget)?.snapshot()));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ShowRecord<'a> {
    index: u64,
    tier: &'a str,
    size: usize,
    program: String,
}

#[derive(Serialize)]
struct IterateRow<'a> {
    depth: usize,
    machine: String,
    #[serde(flatten)]
    witness: &'a Witness,
}

#[derive(Serialize)]
struct SynthRecord<'a> {
    schema: &'a str,
    program: String,
    cost: usize,
    tried: usize,
}

fn run(cmd: Command, out: &mut Vec<String>) -> Result<(), Failure> {
    match cmd {
        Command::Enum { tier, count } => {
            for (i, p) in enumerate_stream(tier).take(count as usize) {
                out.push(format!("{i}\t{}\t{}", p.size(), p.term()));
            }
        }
        Command::Show { index, tier } => {
            let p = tier.enumeration().program_at(index)?;
            out.push(json(&ShowRecord {
                index,
                tier: tier.name(),
                size: p.size(),
                program: p.term().to_string(),
            }));
        }
        Command::Diag { tier, witness, budget } => {
            let m = Machine::base_with_budget(tier, eval_budget(budget)?);
            let g = diagonal(&m);
            for w in witness_rows(&m, &g, witness)? {
                out.push(json(&w));
            }
        }
        Command::Iterate { depth, witness, tier } => {
            let m0 = Machine::base_with_budget(tier, eval_budget(None)?);
            let (_, gs) = iterate(&m0, depth)?;
            let mut m = m0;
            for (i, g) in gs.iter().enumerate() {
                for w in witness_rows(&m, g, witness)? {
                    out.push(json(&IterateRow {
                        depth: i + 1,
                        machine: diagforge::diagonal::Family::describe(&m),
                        witness: &w,
                    }));
                }
                m = m.extend(g.clone());
            }
        }
        Command::Refute {
            classifier,
            count,
            horizon,
            tier,
        } => {
            let c = parse_classifier(&classifier)?;
            let opts = RefuteOptions {
                horizon,
                budget: eval_budget(None)?,
            };
            out.extend(refute_with(&c, tier, count, opts)?.json_lines());
        }
        Command::Synth {
            schema,
            goal,
            budget,
            base,
            json: as_json,
        } => {
            if budget == 0 {
                return Err(usage("--budget must be at least 1"));
            }
            let goal = GoalSpec::parse(&read(&goal)?).map_err(|e| usage(format!("{}: {e}", goal.display())))?;
            let base = match base.as_str() {
                "natfn" => ReflectionBase::arithmetic(),
                _ => ReflectionBase::kernel(),
            };
            match synthesize(&base, &goal, schema, budget, eval_budget(None)?)? {
                SynthOutcome::Found { program, cost, tried } => out.push(if as_json {
                    json(&SynthRecord {
                        schema: schema.name(),
                        program: program.term().to_string(),
                        cost,
                        tried,
                    })
                } else {
                    program.term().to_string()
                }),
                SynthOutcome::NotFound { tried } => {
                    return Err(domain(format!(
                        "no program within budget {budget} matches the examples ({tried} candidates checked)"
                    )))
                }
            }
        }
        Command::Space(cmd) => run_space(cmd, out)?,
    }
    Ok(())
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
    let mut lines = Vec::new();
    let result = run(cli.command, &mut lines);
    let stdout = io::stdout();
    let mut w = io::BufWriter::new(stdout.lock());
    for line in &lines {
        if writeln!(w, "{line}").is_err() {
            return ExitCode::from(2);
        }
    }
    if w.flush().is_err() {
        return ExitCode::from(2);
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("diagforge: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
