use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use platonic_core::arbitrage::{canonical_text, check_naflp, verify_certificate, Verdict};
use platonic_core::delay::{
    apply_information_delay, delayed_market, dominance_lint, validate_execution_family, validate_information_family,
};
use platonic_core::document::{MarketDocument, ParsedDocument};
use platonic_core::market::Market;
use platonic_core::scenario::{run_inheritance_experiment, ExperimentKind, ScenarioConfig};
use platonic_core::Error;
use serde::Serialize;

const INPUT_ERROR: u8 = 1;
const FREE_LUNCH: u8 = 2;
const EXPERIMENT_FAILED: u8 = 3;

const REPORT_FORMAT_VERSION: u32 = 1;

/// Finite large platonic markets: free-lunch checks and delays.
///
/// Exit codes: 0 no free lunch or success, 1 input error, 2 free lunch
/// found, 3 experiment failure.
#[derive(Parser)]
#[command(name = "platonic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a market document and list every violated invariant.
    Validate { path: PathBuf },
    /// Decide whether the market admits a free lunch and print the certificate.
    Check {
        path: PathBuf,
        /// Last trading time considered; defaults to the maturity `n`.
        #[arg(long)]
        horizon: Option<usize>,
        /// Check the delayed market instead. Without a value, uses the only
        /// delay block present.
        #[arg(long, value_enum, num_args = 0..=1, require_equals = true, default_missing_value = "auto")]
        apply_delay: Option<DelayChoice>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Apply the document's delay family and write the delayed market.
    Delay {
        path: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded experiment and write its report.
    Experiment {
        #[arg(value_parser = parse_kind)]
        kind: ExperimentKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Report file (JSON); only a summary is printed if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        lookahead: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DelayChoice {
    Auto,
    Info,
    Exec,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Info,
    Exec,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_kind(s: &str) -> Result<ExperimentKind, String> {
    s.parse()
}

/// A failure that ends the command with exit code 1.
struct InputError(Vec<String>);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(v) => InputError(v.iter().map(|x| format!("violation: {x}")).collect()),
            Error::Precondition(v) => InputError(v.iter().map(|x| format!("precondition: {x}")).collect()),
            Error::Document(msg) => InputError(vec![format!("parse error: {msg}")]),
            other => InputError(vec![format!("error: {other}")]),
        }
    }
}

fn input_error(msg: impl Into<String>) -> InputError {
    InputError(vec![format!("error: {}", msg.into())])
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT_ERROR } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Validate { path } => validate(&path),
        Command::Check {
            path,
            horizon,
            apply_delay,
            format,
        } => check(&path, horizon, apply_delay, format),
        Command::Delay { path, mode, out } => delay(&path, mode, out.as_deref()),
        Command::Experiment {
            kind,
            seed,
            trials,
            out,
            max_states,
            max_steps,
            lookahead,
        } => {
            let defaults = ScenarioConfig::default();
            let cfg = ScenarioConfig {
                seed,
                trials,
                max_states: max_states.unwrap_or(defaults.max_states),
                max_steps: max_steps.unwrap_or(defaults.max_steps),
                lookahead: lookahead.unwrap_or(defaults.lookahead),
                ..defaults
            };
            experiment(&cfg, kind, out.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(InputError(lines)) => {
            for line in lines {
                eprintln!("{line}");
            }
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn read(path: &Path) -> Result<MarketDocument, InputError> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(MarketDocument::from_json(&text)?)
}

fn load(path: &Path) -> Result<ParsedDocument, InputError> {
    Ok(read(path)?.to_model()?)
}

fn validate(path: &Path) -> Result<u8, InputError> {
    let doc = load(path)?;
    let m = &doc.market;
    println!(
        "valid: {} states, n = {}, n_ext = {}, {} assets, {} index sets",
        m.num_states(),
        m.n(),
        m.n_ext(),
        m.assets.len(),
        m.index_system.len()
    );
    if doc.information.is_some() {
        println!("information delay family: valid");
    }
    if doc.execution.is_some() {
        println!("execution delay family: valid");
    }
    if let Some(d) = &doc.information {
        for warning in dominance_lint(m, d) {
            println!("warning: {warning}");
        }
    }
    Ok(0)
}

fn delayed(doc: ParsedDocument, choice: DelayChoice) -> Result<Market, InputError> {
    let choice = match choice {
        DelayChoice::Auto => match (&doc.information, &doc.execution) {
            (Some(_), None) => DelayChoice::Info,
            (None, Some(_)) => DelayChoice::Exec,
            (None, None) => return Err(input_error("the document has no delay block")),
            (Some(_), Some(_)) => {
                return Err(input_error(
                    "the document has both delay blocks; pass --apply-delay=info or --apply-delay=exec",
                ))
            }
        },
        other => other,
    };
    match choice {
        DelayChoice::Info => {
            let d = doc
                .information
                .ok_or_else(|| input_error("the document has no information delay block"))?;
            Ok(apply_information_delay(&doc.market, &d)?)
        }
        _ => {
            let p = doc
                .execution
                .ok_or_else(|| input_error("the document has no execution delay block"))?;
            Ok(delayed_market(&doc.market, &p)?)
        }
    }
}

#[derive(Serialize)]
struct StateValue {
    state: String,
    value: String,
}

#[derive(Serialize)]
struct Holding {
    date: usize,
    asset: String,
    state: String,
    units: String,
}

#[derive(Serialize)]
struct CheckReport {
    format_version: u32,
    horizon: usize,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure: Option<Vec<StateValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index_set: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dates: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    holdings: Option<Vec<Holding>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    terminal_wealth: Option<Vec<StateValue>>,
}

fn check_report(m: &Market, v: &Verdict, horizon: usize) -> CheckReport {
    let names = m.space.names();
    let values = |xs: &[platonic_core::Rational]| {
        names
            .iter()
            .zip(xs)
            .map(|(state, x)| StateValue {
                state: state.clone(),
                value: x.to_string(),
            })
            .collect()
    };
    let mut report = CheckReport {
        format_version: REPORT_FORMAT_VERSION,
        horizon,
        verdict: v.label(),
        measure: None,
        index_set: None,
        dates: None,
        holdings: None,
        terminal_wealth: None,
    };
    match v {
        Verdict::NoFreeLunch(c) => report.measure = Some(values(&c.q)),
        Verdict::FreeLunch(c) => {
            let s = &c.strategy;
            report.index_set = Some(m.index_system[s.index_set].iter().map(|&a| m.assets[a].id.clone()).collect());
            report.dates = Some(s.dates.clone());
            let mut holdings = Vec::new();
            for (i, interval) in s.holdings.iter().enumerate() {
                for (&a, h) in interval {
                    for (state, x) in names.iter().zip(h) {
                        if *x != platonic_core::rat(0, 1) {
                            holdings.push(Holding {
                                date: s.dates[i],
                                asset: m.assets[a].id.clone(),
                                state: state.clone(),
                                units: x.to_string(),
                            });
                        }
                    }
                }
            }
            report.holdings = Some(holdings);
            report.terminal_wealth = Some(values(&c.terminal_wealth));
        }
    }
    report
}

fn check(path: &Path, horizon: Option<usize>, apply: Option<DelayChoice>, format: Format) -> Result<u8, InputError> {
    let doc = load(path)?;
    let m = match apply {
        None => doc.market,
        Some(choice) => delayed(doc, choice)?,
    };
    let horizon = horizon.unwrap_or(m.n());
    let v = check_naflp(&m, horizon)?;
    if !verify_certificate(&m, &v, horizon) {
        return Err(input_error("internal: the certificate failed re-verification"));
    }
    match format {
        Format::Text => print!("{}", canonical_text(&m, &v)),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&check_report(&m, &v, horizon)).expect("reports serialize")
        ),
    }
    Ok(if v.is_free_lunch() { FREE_LUNCH } else { 0 })
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), InputError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The consumed delay block is dropped; the other one is kept when it is
/// still valid for the delayed market.
fn delay(path: &Path, mode: Mode, out: Option<&Path>) -> Result<u8, InputError> {
    let doc = load(path)?;
    let output = match mode {
        Mode::Info => {
            let d = doc
                .information
                .as_ref()
                .ok_or_else(|| input_error("the document has no information delay block"))?;
            let m = apply_information_delay(&doc.market, d)?;
            let exec = doc.execution.as_ref().filter(|p| validate_execution_family(&m, p).is_empty());
            if doc.execution.is_some() && exec.is_none() {
                eprintln!("warning: the execution delay block no longer fits the delayed market and was dropped");
            }
            MarketDocument::from_model(&m, None, exec)
        }
        Mode::Exec => {
            let p = doc
                .execution
                .as_ref()
                .ok_or_else(|| input_error("the document has no execution delay block"))?;
            let m = delayed_market(&doc.market, p)?;
            let info = doc.information.as_ref().filter(|d| validate_information_family(&m, d).is_empty());
            if doc.information.is_some() && info.is_none() {
                eprintln!("warning: the information delay block no longer fits the delayed market and was dropped");
            }
            MarketDocument::from_model(&m, info, None)
        }
    };
    output.to_model()?;
    write_output(out, &output.to_json())?;
    Ok(0)
}

fn experiment(cfg: &ScenarioConfig, kind: ExperimentKind, out: Option<&Path>) -> Result<u8, InputError> {
    let report = run_inheritance_experiment(cfg, kind)?;
    if let Some(path) = out {
        let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
        text.push('\n');
        write_output(Some(path), &text)?;
    }
    println!(
        "{kind}: {} trials, {} passed, {} failed, {} vacuous (seed {})",
        report.trials, report.passed, report.failed, report.vacuous, cfg.seed
    );
    for (label, count) in &report.verdicts_before {
        println!("  before delay: {label} × {count}");
    }
    if kind == ExperimentKind::InsiderDemo {
        for r in &report.records {
            println!("  trial {}: {}", r.trial, r.detail);
        }
    }
    if report.all_passed() {
        return Ok(0);
    }
    for c in &report.counterexamples {
        eprintln!("counterexample (seed {}, trial {}): {}", c.seed, c.trial, c.detail);
        if let Some(doc) = &c.document {
            eprint!("{}", doc.to_json());
        }
    }
    Ok(EXPERIMENT_FAILED)
}
