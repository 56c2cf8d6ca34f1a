use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};

use sld_core::apt::{apt_membership, build_apt};
use sld_core::concepts::{
    check_ne_direct, default_negotiation, find_ne, gen_negotiation, gen_secretary,
    ne_exists_formula, ne_formula, profile_var, secretary_strategy, GoalProfile,
};
use sld_core::eval::{eval, Comparison};
use sld_core::rational::{format_exact, in_unit_interval, parse_rational};
use sld_core::textio::{
    parse_assignment, parse_formula, parse_model, render_model, ModelError, ModelFile, ParseError,
    Report,
};
use sld_core::{Assignment, Error, Formula, Rational, Strategy};

/// Evaluate and check quantitative strategy logic formulas on game models.
#[derive(Debug, Parser)]
#[command(name = "sld", version)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Output::Text, global = true)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Kv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CmpArg {
    Ge,
    Gt,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the value of a formula at the initial position.
    Eval(EvalArgs),
    /// Compare the value at the initial position with a threshold.
    Check(CheckArgs),
    /// Decide whether an assignment of the model's agents is a Nash equilibrium.
    NeCheck(NeCheckArgs),
    /// Search the memoryless profiles for a Nash equilibrium.
    NeFind(ModelArgs),
    /// Build the threshold automaton and print its states and transitions.
    AptBuild(AptArgs),
    /// Decide whether the threshold automaton accepts an assignment.
    AptMember(AptMemberArgs),
    /// Write one of the built-in case-study models.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model file, or a built-in model name (secretary, negotiation).
    #[arg(long)]
    model: String,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Formula file, a derived name (psi<Agent>, phiNE, phiNE-hat), or formula text.
    #[arg(long)]
    formula: String,
    /// Assignment file or a built-in assignment name.
    #[arg(long)]
    assign: Option<String>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    query: EvalArgs,
    /// Threshold as an exact fraction p/q.
    #[arg(long)]
    threshold: String,
    #[arg(long, value_enum, default_value_t = CmpArg::Ge)]
    cmp: CmpArg,
}

#[derive(Debug, Args)]
struct NeCheckArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    assign: String,
}

#[derive(Debug, Args)]
struct AptArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    formula: String,
    #[arg(long)]
    threshold: String,
}

#[derive(Debug, Args)]
struct AptMemberArgs {
    #[command(flatten)]
    apt: AptArgs,
    #[arg(long)]
    assign: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Case {
    Secretary,
    Negotiation,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(value_enum)]
    case: Case,
    /// Negotiation split `alice:beth`, repeatable.
    #[arg(long = "offer")]
    offers: Vec<String>,
    /// Number of responding rounds of the negotiation.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Output file; the model goes to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Invalid(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Model(_) | Error::Discount(_) | Error::InvalidStrategy { .. } => {
                Failure::Invalid(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(Option<bool>, String), Failure>;

fn located(source: &str, e: &ParseError) -> Failure {
    Failure::Usage(format!("{source}:{e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Builtin {
    Secretary,
    Negotiation,
}

struct Loaded {
    model: ModelFile,
    builtin: Option<Builtin>,
}

fn load_model(name: &str) -> Result<Loaded, Failure> {
    let path = Path::new(name);
    if path.exists() {
        let text = read(path)?;
        let model = parse_model(&text).map_err(|e| match e {
            ModelError::Parse(p) => located(name, &p),
            ModelError::Invalid(v) => Failure::Invalid(format!("{name}: {v}")),
        })?;
        debug!(
            "loaded model {name} with {} positions",
            model.cgs.num_positions()
        );
        return Ok(Loaded {
            model,
            builtin: None,
        });
    }
    match name {
        "secretary" => Ok(Loaded {
            model: gen_secretary(),
            builtin: Some(Builtin::Secretary),
        }),
        "negotiation" => Ok(Loaded {
            model: default_negotiation(),
            builtin: Some(Builtin::Negotiation),
        }),
        _ => Err(Failure::Usage(format!(
            "{name}: no such model file or built-in model"
        ))),
    }
}

fn goals(m: &ModelFile) -> Result<GoalProfile, Failure> {
    if m.goals.is_empty() {
        return Err(Failure::Usage("the model declares no `goal` lines".into()));
    }
    Ok(GoalProfile::from_model(m)?)
}

fn load_formula(arg: &str, m: &ModelFile) -> Result<Formula, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        return parse_formula(&text, &m.env()).map_err(|e| located(arg, &e));
    }
    match arg {
        "phiNE" => {
            let g = goals(m)?;
            let vars: Vec<String> = m.cgs.agents().iter().map(|a| profile_var(a)).collect();
            return Ok(ne_formula(&g, &vars)?);
        }
        "phiNE-hat" => return Ok(ne_exists_formula(&goals(m)?)?),
        _ => {}
    }
    if let Some(agent) = arg.strip_prefix("psi") {
        if let Some(goal) = m.goal(agent) {
            return Ok(goal.clone());
        }
    }
    parse_formula(arg, &m.env()).map_err(|e| located("<formula>", &e))
}

fn builtin_assignment(name: &str, loaded: &Loaded) -> Option<Assignment> {
    let g = &loaded.model.cgs;
    match loaded.builtin? {
        Builtin::Secretary => {
            let rest = name.strip_prefix("sigma_")?;
            let (a, b) = rest.split_once('_')?;
            let first_yes = |s: &str| ["abc", "bc", "c"].iter().position(|x| *x == s);
            let (a, b) = (first_yes(a)?, first_yes(b)?);
            Some(
                [("Ann", a), ("Bob", b)]
                    .into_iter()
                    .map(|(agent, k)| (agent.to_string(), secretary_strategy(g, k)))
                    .collect(),
            )
        }
        Builtin::Negotiation if name == "ne" => {
            let alice = Strategy::from_named(g, 0, &[("q0", "keep_twothird")]).ok()?;
            let beth = Strategy::constant(g, g.action_id("acc")?);
            Some(
                [("Alice".to_string(), alice), ("Beth".to_string(), beth)]
                    .into_iter()
                    .collect(),
            )
        }
        Builtin::Negotiation => None,
    }
}

/// Reads an assignment; the report gets a note naming the default action.
fn load_assignment(arg: &str, loaded: &Loaded, report: &mut Report) -> Result<Assignment, Failure> {
    let g = &loaded.model.cgs;
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        let file = parse_assignment(&text, g).map_err(|e| located(arg, &e))?;
        report.push_field("unlisted_positions_play", file.default_action.clone());
        return Ok(file.assignment);
    }
    builtin_assignment(arg, loaded)
        .ok_or_else(|| Failure::Usage(format!("{arg}: no such assignment file")))
}

fn threshold(text: &str) -> Result<Rational, Failure> {
    let t = parse_rational(text).map_err(|e| Failure::Usage(format!("--threshold: {e}")))?;
    if !in_unit_interval(&t) {
        return Err(Failure::Usage(format!(
            "--threshold: {} is outside [0,1]",
            format_exact(&t)
        )));
    }
    Ok(t)
}

fn describe_assignment(chi: &Assignment, g: &sld_core::Cgs, report: &mut Report) {
    for (name, s) in chi {
        report.push_field(format!("{name}.strategy"), s.describe(g));
    }
}

fn run_eval(args: &EvalArgs, cmp: Option<(Rational, Comparison)>, out: Output) -> Outcome {
    let loaded = load_model(&args.model.model)?;
    let m = &loaded.model;
    let phi = load_formula(&args.formula, m)?;
    info!("formula: {phi}");
    let (value, mut report) = match &args.assign {
        Some(a) => {
            let mut report = Report::new(phi.to_string());
            let chi = load_assignment(a, &loaded, &mut report)?;
            describe_assignment(&chi, &m.cgs, &mut report);
            (eval(&m.cgs, &chi, m.cgs.initial(), &phi)?, report)
        }
        None => (
            eval(&m.cgs, &Assignment::new(), m.cgs.initial(), &phi)?,
            Report::new(phi.to_string()),
        ),
    };
    let verdict = match cmp {
        Some((t, c)) => {
            let v = c.holds(&value, &t);
            report.query = format!("{} {c} {}", report.query, format_exact(&t));
            report.verdict = Some(v);
            Some(v)
        }
        None => None,
    };
    report.value = Some(value);
    Ok((verdict, render(&report, out)))
}

fn render(report: &Report, out: Output) -> String {
    match out {
        Output::Text => report.render_text(),
        Output::Kv => report.render_kv(),
    }
}

fn run_ne_check(args: &NeCheckArgs, out: Output) -> Outcome {
    let loaded = load_model(&args.model.model)?;
    let m = &loaded.model;
    let g = goals(m)?;
    let mut report = Report::new("nash equilibrium");
    let chi = load_assignment(&args.assign, &loaded, &mut report)?;
    let (ok, witness) = check_ne_direct(&m.cgs, &chi, &g)?;
    report.verdict = Some(ok);
    for (k, v) in witness.describe(&m.cgs) {
        report.push_field(k, v);
    }
    let improving = witness.improving_agents();
    if !improving.is_empty() {
        report.push_field("improving_agents", improving.join(","));
    }
    Ok((Some(ok), render(&report, out)))
}

fn run_ne_find(args: &ModelArgs, out: Output) -> Outcome {
    let loaded = load_model(&args.model)?;
    let m = &loaded.model;
    let g = goals(m)?;
    let mut report = Report::new("find nash equilibrium");
    let found = find_ne(&m.cgs, &g)?;
    report.verdict = Some(found.is_some());
    if let Some((_, witness)) = &found {
        for (k, v) in witness.describe(&m.cgs) {
            report.push_field(k, v);
        }
    }
    Ok((Some(found.is_some()), render(&report, out)))
}

fn run_apt_build(args: &AptArgs, out: Output) -> Outcome {
    let loaded = load_model(&args.model.model)?;
    let m = &loaded.model;
    let phi = load_formula(&args.formula, m)?;
    let t = threshold(&args.threshold)?;
    let apt = build_apt(&phi, &t, &m.cgs)?;
    let dump = apt.dump(&m.cgs);
    let report = Report::new(format!("{phi} > {}", format_exact(&t)))
        .field("states", apt.states().len().to_string());
    let text = match out {
        Output::Text => format!("{dump}{}", report.render_text()),
        Output::Kv => report.field("automaton", dump).render_kv(),
    };
    Ok((None, text))
}

fn run_apt_member(args: &AptMemberArgs, out: Output) -> Outcome {
    let loaded = load_model(&args.apt.model.model)?;
    let m = &loaded.model;
    let phi = load_formula(&args.apt.formula, m)?;
    let t = threshold(&args.apt.threshold)?;
    let apt = build_apt(&phi, &t, &m.cgs)?;
    let mut report = Report::new(format!("{phi} > {}", format_exact(&t)));
    let chi = match &args.assign {
        Some(a) => load_assignment(a, &loaded, &mut report)?,
        None => Assignment::new(),
    };
    let accepted = apt_membership(&apt, &m.cgs, &chi, m.cgs.initial())?;
    report.verdict = Some(accepted);
    report.push_field("result", if accepted { "accept" } else { "reject" });
    report.push_field("states", apt.states().len().to_string());
    Ok((Some(accepted), render(&report, out)))
}

fn run_gen(args: &GenArgs) -> Outcome {
    let model = match args.case {
        Case::Secretary => gen_secretary(),
        Case::Negotiation if args.offers.is_empty() && args.depth == 2 => default_negotiation(),
        Case::Negotiation => {
            let mut offers = Vec::new();
            for o in &args.offers {
                let (a, b) = o
                    .split_once(':')
                    .ok_or_else(|| Failure::Usage(format!("--offer `{o}`: expected alice:beth")))?;
                let share = |s: &str| {
                    parse_rational(s).map_err(|e| Failure::Usage(format!("--offer: {e}")))
                };
                offers.push((share(a)?, share(b)?));
            }
            if offers.is_empty() {
                offers = vec![
                    (
                        Rational::new(1.into(), 2.into()),
                        Rational::new(1.into(), 2.into()),
                    ),
                    (
                        Rational::new(2.into(), 3.into()),
                        Rational::new(1.into(), 3.into()),
                    ),
                ];
            }
            gen_negotiation(&offers, args.depth)?
        }
    };
    let text = render_model(&model);
    match &args.out {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok((None, format!("wrote {}\n", path.display())))
        }
        None => Ok((None, text)),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SLD_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => run_eval(a, None, cli.output),
        Command::Check(a) => threshold(&a.threshold).and_then(|t| {
            let c = match a.cmp {
                CmpArg::Ge => Comparison::Ge,
                CmpArg::Gt => Comparison::Gt,
            };
            run_eval(&a.query, Some((t, c)), cli.output)
        }),
        Command::NeCheck(a) => run_ne_check(a, cli.output),
        Command::NeFind(a) => run_ne_find(a, cli.output),
        Command::AptBuild(a) => run_apt_build(a, cli.output),
        Command::AptMember(a) => run_apt_member(a, cli.output),
        Command::Gen(a) => run_gen(a),
    };
    match result {
        Ok((verdict, text)) => {
            print!("{text}");
            if verdict == Some(false) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
