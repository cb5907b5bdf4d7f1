//! `scav`: load a system file, then validate it, compose its components,
//! model-check them against temporal formulas, test stream membership, and
//! diagnose which component thresholds admit an undesired behavior.
//!
//! Exit status: 0 when the query holds (valid / satisfied / accepted),
//! 1 when it fails (with a report), 2 on errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sca_core::buchi::{self, Limits};
use sca_core::cas::CasError;
use sca_core::diagnostics::{self, DiagnosticInput};
use sca_core::lasso::Lasso;
use sca_core::logic::{self, Formula};
use sca_core::modelcheck::{self, Verdict};
use sca_core::sca::Sca;
use sca_core::semiring::Value;
use sca_core::system::{LoadError, System};
use sca_core::ActionId;

#[derive(Parser)]
#[command(name = "scav", version, about = "Soft component automata verifier")]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// State-count ceiling for the automata constructions
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_states: usize,
    /// Write the automata built during checking to this directory in the
    /// HOA exchange format
    #[arg(long, global = true, value_name = "DIR")]
    dump_automata: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a system file and report action-system axiom violations
    Validate(FileArgs),
    /// Compose named components and print the resulting automaton
    Compose {
        #[command(flatten)]
        file: FileArgs,
        /// Comma-separated component names, composed left to right
        #[arg(long, value_name = "NAMES")]
        scas: String,
        /// Name for the composed automaton in the output
        #[arg(long, value_name = "NAME")]
        out: Option<String>,
    },
    /// Check that every behavior of a component satisfies a formula
    Check {
        #[command(flatten)]
        file: FileArgs,
        /// Component or composition name
        #[arg(long, value_name = "NAME")]
        sca: String,
        /// Formula name from the file, or a formula in concrete syntax
        #[arg(long, value_name = "NAME_OR_TEXT")]
        formula: String,
        /// Replacement threshold for this run
        #[arg(long, value_name = "VALUE")]
        threshold: Option<String>,
    },
    /// Test whether a named stream is a behavior of a component
    Member {
        #[command(flatten)]
        file: FileArgs,
        #[arg(long, value_name = "NAME")]
        sca: String,
        #[arg(long, value_name = "NAME")]
        lasso: String,
        #[arg(long, value_name = "VALUE")]
        threshold: Option<String>,
    },
    /// Print the diagnostic-preference trace and value of a stream
    Diagnose {
        #[command(flatten)]
        file: FileArgs,
        #[arg(long, value_name = "NAME")]
        sca: String,
        #[arg(long, value_name = "NAME")]
        lasso: String,
    },
    /// Localize responsibility for a stream to minimal suspect subsets
    Suspects {
        #[command(flatten)]
        file: FileArgs,
        /// Name of a composition declared in the file
        #[arg(long, value_name = "NAME")]
        composition: String,
        #[arg(long, value_name = "NAME")]
        lasso: String,
        /// Replacement component thresholds, comma separated
        #[arg(long, value_name = "VALUES")]
        thresholds: Option<String>,
    },
}

#[derive(Args)]
struct FileArgs {
    /// Path to the system file
    file: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let limits = Limits { max_states: cli.max_states };
    match &cli.command {
        Command::Validate(file) => validate(cli, &file.file),
        Command::Compose { file, scas, out } => compose(cli, &file.file, scas, out.as_deref()),
        Command::Check { file, sca, formula, threshold } => {
            check(cli, &file.file, sca, formula, threshold.as_deref(), limits)
        }
        Command::Member { file, sca, lasso, threshold } => {
            member(cli, &file.file, sca, lasso, threshold.as_deref())
        }
        Command::Diagnose { file, sca, lasso } => diagnose(cli, &file.file, sca, lasso),
        Command::Suspects { file, composition, lasso, thresholds } => {
            suspects(cli, &file.file, composition, lasso, thresholds.as_deref())
        }
    }
}

fn load(path: &Path) -> Result<System, String> {
    System::load(path).map_err(|e| e.to_string())
}

fn resolve_component(system: &System, name: &str, threshold: Option<&str>) -> Result<Sca, String> {
    let sca = system
        .component(name)
        .ok_or_else(|| format!("unknown component `{name}`"))?;
    match threshold {
        None => Ok(sca.clone()),
        Some(text) => {
            let value = parse_value(text)?;
            sca.with_threshold(value).map_err(|e| e.to_string())
        }
    }
}

fn resolve_lasso(system: &System, name: &str) -> Result<Lasso<ActionId>, String> {
    system
        .lassos
        .get(name)
        .cloned()
        .ok_or_else(|| format!("unknown lasso `{name}`"))
}

fn resolve_formula(system: &System, text: &str) -> Result<Formula, String> {
    if let Some((_, formula)) = system.formulas.get(text) {
        return Ok(formula.clone());
    }
    logic::parse(text, &system.cas).map_err(|e| format!("formula `{text}`: {e}"))
}

fn parse_value(text: &str) -> Result<Value, String> {
    let raw: serde_json::Value = serde_json::from_str(text)
        .unwrap_or_else(|_| serde_json::Value::String(text.to_string()));
    Value::from_json(&raw).map_err(|e| e.to_string())
}

/// Splits on commas that are not nested inside brackets.
fn split_values(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '[' => {
                depth += 1;
                current.push(c);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                current.push(c);
            }
            ',' if depth == 0 => {
                out.push(current.trim().to_string());
                current = String::new();
            }
            _ => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        out.push(current.trim().to_string());
    }
    out
}

fn emit<T: Serialize>(cli: &Cli, json: &T, text: impl FnOnce() -> String) {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(json).expect("reports serialize"));
    } else {
        println!("{}", text());
    }
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    violations: Vec<String>,
}

fn validate(cli: &Cli, path: &Path) -> Result<ExitCode, String> {
    match System::load(path) {
        Ok(system) => {
            let report = system.cas.validate();
            emit(
                cli,
                &ValidateReport { valid: true, violations: vec![] },
                || {
                    format!(
                        "ok: {} actions, {} components, {} compositions ({})",
                        system.cas.action_count(),
                        system.scas.len(),
                        system.composed.len(),
                        if report.is_ok() { "action system valid" } else { "see report" },
                    )
                },
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(LoadError::Actions { source: CasError::Invalid(report), .. }) => {
            let violations: Vec<String> =
                report.violations.iter().map(|v| v.to_string()).collect();
            emit(cli, &ValidateReport { valid: false, violations: violations.clone() }, || {
                format!("action system violates its axioms:\n{report}")
            });
            Ok(ExitCode::from(1))
        }
        Err(other) => Err(other.to_string()),
    }
}

#[derive(Serialize)]
struct ComposeReport {
    name: String,
    components: Vec<String>,
    states: Vec<String>,
    initial: String,
    threshold: Value,
    transitions: Vec<ComposedTransition>,
}

#[derive(Serialize)]
struct ComposedTransition {
    from: String,
    action: String,
    pref: Value,
    to: String,
}

fn compose(cli: &Cli, path: &Path, scas: &str, out: Option<&str>) -> Result<ExitCode, String> {
    let system = load(path)?;
    let names: Vec<&str> = scas.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err("--scas needs at least one component name".into());
    }
    let mut acc: Option<Sca> = None;
    for name in &names {
        let part = system
            .component(name)
            .ok_or_else(|| format!("unknown component `{name}`"))?;
        acc = Some(match acc {
            None => part.clone(),
            Some(left) => left.compose(part).map_err(|e| e.to_string())?,
        });
    }
    let composed = acc.expect("nonempty list");
    let name = out.map(str::to_string).unwrap_or_else(|| names.join("_"));
    let report = ComposeReport {
        name: name.clone(),
        components: composed.components().iter().map(|c| c.label.clone()).collect(),
        states: composed.state_names().to_vec(),
        initial: composed.state_name(composed.initial()).to_string(),
        threshold: composed.threshold().clone(),
        transitions: composed
            .transitions()
            .iter()
            .map(|t| ComposedTransition {
                from: composed.state_name(t.from).to_string(),
                action: system.cas.name(t.action).to_string(),
                pref: t.preference.clone(),
                to: composed.state_name(t.to).to_string(),
            })
            .collect(),
    };
    emit(cli, &report, || {
        format!(
            "{name}: {} states, {} transitions, initial {}, threshold {}",
            report.states.len(),
            report.transitions.len(),
            report.initial,
            report.threshold,
        )
    });
    Ok(ExitCode::SUCCESS)
}

fn dump_check_automata(
    dir: &Path,
    component: &Sca,
    formula: &Formula,
    limits: Limits,
) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let write = |name: &str, content: String| -> Result<(), String> {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
    };
    let system_ba = buchi::sca_to_ba(component);
    write("01_system.hoa", system_ba.to_hoa("system"))?;
    let negated = logic::compile(&Formula::not(formula.clone()), component.cas(), limits)
        .map_err(|e| e.to_string())?;
    write("02_negated_formula.hoa", negated.automaton.to_hoa("negated_formula"))?;
    let witnesses =
        buchi::intersect(&system_ba, &negated.automaton, limits).map_err(|e| e.to_string())?;
    write("03_witnesses.hoa", witnesses.to_hoa("witnesses"))?;
    Ok(())
}

fn check(
    cli: &Cli,
    path: &Path,
    sca: &str,
    formula_text: &str,
    threshold: Option<&str>,
    limits: Limits,
) -> Result<ExitCode, String> {
    let system = load(path)?;
    let component = resolve_component(&system, sca, threshold)?;
    let formula = resolve_formula(&system, formula_text)?;
    if let Some(dir) = &cli.dump_automata {
        dump_check_automata(dir, &component, &formula, limits)?;
    }
    let (verdict, report) =
        modelcheck::check(&component, &formula, limits).map_err(|e| e.to_string())?;
    emit(cli, &report, || match &verdict {
        Verdict::Holds => format!(
            "holds: every behavior of `{sca}` at threshold {} satisfies the formula",
            report.threshold
        ),
        Verdict::Fails { counterexample } => format!(
            "fails: `{sca}` at threshold {} admits {}",
            report.threshold,
            counterexample.display(component.cas()),
        ),
    });
    Ok(if verdict.holds() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct MemberReport {
    sca: String,
    lasso: Lasso<String>,
    threshold: Value,
    accepted: bool,
}

fn member(
    cli: &Cli,
    path: &Path,
    sca: &str,
    lasso: &str,
    threshold: Option<&str>,
) -> Result<ExitCode, String> {
    let system = load(path)?;
    let component = resolve_component(&system, sca, threshold)?;
    let word = resolve_lasso(&system, lasso)?;
    let accepted = component.accepts(&word).map_err(|e| e.to_string())?;
    let report = MemberReport {
        sca: sca.to_string(),
        lasso: word.to_names(&system.cas),
        threshold: component.threshold().clone(),
        accepted,
    };
    emit(cli, &report, || {
        format!(
            "{} is {} behavior of `{sca}` at threshold {}",
            word.display(&system.cas),
            if accepted { "a" } else { "not a" },
            report.threshold,
        )
    });
    Ok(if accepted { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct DiagnoseReport {
    sca: String,
    lasso: Lasso<String>,
    steps: Vec<DiagnoseStep>,
    cycle_start: Option<usize>,
    /// The word left the reachable states, so the empty preference sum (the
    /// semiring zero) enters the bound from that point on.
    escapes: bool,
    value: Value,
}

#[derive(Serialize)]
struct DiagnoseStep {
    states: Vec<String>,
    action: String,
    preference_sum: Value,
}

fn diagnose(cli: &Cli, path: &Path, sca: &str, lasso: &str) -> Result<ExitCode, String> {
    let system = load(path)?;
    let component = resolve_component(&system, sca, None)?;
    let word = resolve_lasso(&system, lasso)?;
    let trace =
        diagnostics::diagnostic_preference(&component, &DiagnosticInput::Stream(word.clone()))
            .map_err(|e| e.to_string())?;
    let report = DiagnoseReport {
        sca: sca.to_string(),
        lasso: word.to_names(&system.cas),
        steps: trace
            .steps
            .iter()
            .map(|s| DiagnoseStep {
                states: s.states.iter().map(|&q| component.state_name(q).to_string()).collect(),
                action: system.cas.name(s.action).to_string(),
                preference_sum: s.preference_sum.clone(),
            })
            .collect(),
        cycle_start: trace.cycle_start,
        escapes: trace.escapes,
        value: trace.value.clone(),
    };
    emit(cli, &report, || {
        let mut lines = vec![format!(
            "diagnostic preference of {} in `{sca}`",
            word.display(&system.cas)
        )];
        for (i, s) in report.steps.iter().enumerate() {
            let looped = report.cycle_start == Some(i);
            lines.push(format!(
                "  {}{i}: {{{}}} --{}--> sum {}",
                if looped { "*" } else { " " },
                s.states.join(", "),
                s.action,
                s.preference_sum,
            ));
        }
        if report.escapes {
            lines.push("  note: the word escapes the reachable states; the zero element enters the bound".into());
        }
        lines.push(format!("  value: {}", report.value));
        lines.join("\n")
    });
    Ok(ExitCode::SUCCESS)
}

fn suspects(
    cli: &Cli,
    path: &Path,
    composition: &str,
    lasso: &str,
    thresholds: Option<&str>,
) -> Result<ExitCode, String> {
    let system = load(path)?;
    let composed = system
        .composed
        .get(composition)
        .ok_or_else(|| format!("unknown composition `{composition}`"))?;
    let word = resolve_lasso(&system, lasso)?;
    let overrides = match thresholds {
        None => None,
        Some(text) => {
            let values: Result<Vec<Value>, String> =
                split_values(text).iter().map(|v| parse_value(v)).collect();
            let values = values?;
            if values.len() != composed.components().len() {
                return Err(format!(
                    "expected {} thresholds, got {}",
                    composed.components().len(),
                    values.len()
                ));
            }
            Some(values)
        }
    };
    let report =
        diagnostics::localize(composed, &DiagnosticInput::Stream(word.clone()), overrides)
            .map_err(|e| e.to_string())?;
    emit(cli, &report, || {
        let sets: Vec<String> = report
            .minimal_suspect_sets
            .iter()
            .map(|s| format!("{{{}}}", s.join(", ")))
            .collect();
        format!(
            "diagnostic value {} against thresholds {}\nminimal suspect sets: {}\ninnocent components: {}",
            report.diagnostic_value,
            report
                .thresholds
                .iter()
                .zip(&report.components)
                .map(|(t, c)| format!("{c}={t}"))
                .collect::<Vec<_>>()
                .join(", "),
            if sets.is_empty() { "none".to_string() } else { sets.join(", ") },
            if report.innocent_components.is_empty() {
                "none".to_string()
            } else {
                report.innocent_components.join(", ")
            },
        )
    });
    Ok(ExitCode::SUCCESS)
}
