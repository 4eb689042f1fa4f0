//! Command-line interface.
//!
//! Three subcommands cover the pipeline: `build-kb` compiles
//! questionnaires and writes their rule listing, `suggest` recommends a
//! course for every volunteer in a roster, and `evaluate` scores
//! labeled datasets by exact-match accuracy.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or syntax error,
//! 3 invalid (well-formed but inadmissible) input.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::compile::{compile_kb, CompileError, RuleSet};
use crate::engine::EngineError;
use crate::format::{export_rule_sets, parse_questionnaire, parse_roster, ParseError, Roster};
use crate::harness::{
    dataset_from_roster, evaluate, render_report_lines, summarize, EvalError, EvaluationReport,
};
use crate::model::{QuestionnaireSchema, ValidationMode};
use crate::vote::{suggest_ensemble, VoteError, VoteResult};

#[derive(Parser)]
#[command(
    name = "course-advisor",
    version,
    about = "Recommends courses for volunteer lecturers from expert questionnaires"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile questionnaires and export their rule sets as text
    BuildKb(BuildKb),
    /// Suggest a course for every volunteer in a roster
    Suggest(Suggest),
    /// Measure exact-match accuracy on labeled datasets
    Evaluate(Evaluate),
}

#[derive(Args)]
struct KbOptions {
    /// Expert questionnaire file; repeat for an ensemble
    #[arg(long = "kb", value_name = "FILE", required = true)]
    kb: Vec<PathBuf>,
}

#[derive(Args)]
struct BuildKb {
    #[command(flatten)]
    kb: KbOptions,
    /// Output file for the rule listing
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct Suggest {
    #[command(flatten)]
    kb: KbOptions,
    /// Volunteer roster file
    #[arg(long, value_name = "FILE")]
    roster: PathBuf,
    /// Drop unknown courses and questions with a warning instead of failing
    #[arg(long)]
    lenient: bool,
    /// Also print each expert's own scores and choice
    #[arg(long)]
    per_expert: bool,
}

#[derive(Args)]
struct Evaluate {
    #[command(flatten)]
    kb: KbOptions,
    /// Labeled dataset file; repeat to evaluate several
    #[arg(long = "dataset", value_name = "FILE", required = true)]
    dataset: Vec<PathBuf>,
    /// Drop unknown courses and questions with a warning instead of failing
    #[arg(long)]
    lenient: bool,
    /// Append the mean accuracy across datasets
    #[arg(long)]
    summary: bool,
}

pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::BuildKb(args) => cmd_build_kb(&args),
        Command::Suggest(args) => cmd_suggest(&args),
        Command::Evaluate(args) => cmd_evaluate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn cmd_build_kb(args: &BuildKb) -> Result<(), CliError> {
    let kb = load_kb(&args.kb.kb)?;
    fs::write(&args.out, export_rule_sets(&kb)).map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;
    Ok(())
}

fn cmd_suggest(args: &Suggest) -> Result<(), CliError> {
    let kb = load_kb(&args.kb.kb)?;
    let schema = kb[0].schema();
    let source = args.roster.display().to_string();
    let text = read(&args.roster)?;
    let roster = parse_roster(&text, &source, schema, mode(args.lenient))?;
    print_warnings(&source, &roster);
    let mut out = String::new();
    for profile in &roster.profiles {
        let vote = suggest_ensemble(&kb, profile)?;
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            profile.name,
            vote.winner,
            tally_text(schema, &vote)
        ));
        if args.per_expert {
            for suggestion in &vote.per_expert {
                let scores: Vec<String> = suggestion
                    .course_scores
                    .entries()
                    .iter()
                    .map(|(course, score)| format!("{course}:{score}"))
                    .collect();
                out.push_str(&format!(
                    "\texpert={}\tchosen={}\tscores={}\n",
                    suggestion.expert_id,
                    suggestion.chosen,
                    scores.join("+")
                ));
            }
        }
    }
    print!("{out}");
    Ok(())
}

fn cmd_evaluate(args: &Evaluate) -> Result<(), CliError> {
    let kb = load_kb(&args.kb.kb)?;
    let schema = kb[0].schema();
    let mut reports: Vec<(String, EvaluationReport)> = Vec::new();
    for path in &args.dataset {
        let source = path.display().to_string();
        let text = read(path)?;
        let roster = parse_roster(&text, &source, schema, mode(args.lenient))?;
        print_warnings(&source, &roster);
        let data = dataset_from_roster(&roster)?;
        let report = evaluate(&kb, &data)?;
        let label = path
            .file_stem()
            .map_or_else(|| source.clone(), |s| s.to_string_lossy().into_owned());
        reports.push((label, report));
    }
    let summary = if args.summary {
        Some(summarize(&reports)?)
    } else {
        None
    };
    print!("{}", render_report_lines(&reports, summary.as_ref()));
    Ok(())
}

fn load_kb(paths: &[PathBuf]) -> Result<Vec<RuleSet>, CliError> {
    let mut questionnaires = Vec::with_capacity(paths.len());
    for path in paths {
        let text = read(path)?;
        questionnaires.push(parse_questionnaire(&text, &path.display().to_string())?);
    }
    Ok(compile_kb(&questionnaires)?)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn mode(lenient: bool) -> ValidationMode {
    if lenient {
        ValidationMode::Lenient
    } else {
        ValidationMode::Strict
    }
}

fn print_warnings(source: &str, roster: &Roster) {
    for w in &roster.warnings {
        match w.record {
            Some(record) => eprintln!("warning: {source}: record {record}: {}", w.warning),
            None => eprintln!("warning: {source}: {}", w.warning),
        }
    }
}

/// Vote counts as `course:votes` joined with `+`, in schema course
/// order, listing only courses that received votes.
fn tally_text(schema: &QuestionnaireSchema, vote: &VoteResult) -> String {
    let parts: Vec<String> = schema
        .courses()
        .iter()
        .filter_map(|course| {
            vote.tally
                .get(course.as_str())
                .map(|votes| format!("{course}:{votes}"))
        })
        .collect();
    parts.join("+")
}

enum CliError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Parse(ParseError),
    Invalid(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Parse(e) if e.is_syntax() => 2,
            CliError::Parse(_) | CliError::Invalid(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Parse(e) => write!(f, "{e}"),
            CliError::Invalid(message) => f.write_str(message),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<VoteError> for CliError {
    fn from(e: VoteError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Invalid(e.to_string())
    }
}
