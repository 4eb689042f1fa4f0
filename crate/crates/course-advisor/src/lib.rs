//! Course-assignment advisor: turns per-expert course questionnaires
//! into decision trees and rule sets, scores volunteer lecturer
//! profiles against them, and recommends the best-matching course —
//! per expert and by ensemble vote.
//!
//! The pipeline has four stages:
//!
//! 1. **Model** ([`model`]): a department's [`QuestionnaireSchema`]
//!    (courses + questions) and each expert's [`Questionnaire`] (one row
//!    of preferred answers per course), plus [`VolunteerProfile`]s.
//! 2. **Compile** ([`compile`]): rows expand into a prefix tree
//!    ([`DecisionTree`]) — one branch per single-valued answer — whose
//!    root-to-leaf paths become flat [`Rule`]s ([`RuleSet`]).
//! 3. **Score** ([`engine`], [`vote`]): a profile's score for a rule is
//!    the number of satisfied antecedents; each course keeps its best
//!    rule score, each expert suggests an argmax course, and an ensemble
//!    picks the plurality winner.
//! 4. **Evaluate** ([`harness`]): exact-match accuracy over labeled
//!    datasets, with bit-stable two-decimal percentages.
//!
//! Questionnaires, rosters and rule listings have line-oriented text
//! forms ([`format`]); every parse failure carries a line/column span.
//!
//! ```
//! use course_advisor::{compile_kb, fixtures, suggest_ensemble};
//!
//! let kb = compile_kb(&[fixtures::computer_science_questionnaire()])?;
//! let vote = suggest_ensemble(&kb, &fixtures::volunteer_f1())?;
//! assert_eq!(vote.winner.as_str(), "AI");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod compile;
mod compiled;
pub mod engine;
pub mod fixtures;
pub mod format;
pub mod guide;
pub mod harness;
pub mod model;
pub mod vote;

pub mod cli;

pub use compile::{
    build_tree, compile_kb, extract_rules, CompileError, DecisionTree, RuleSet,
};
pub use engine::{
    course_scores, eval_antecedent, score_rule, suggest, CourseScoreTable, EngineError, Suggestion,
};
pub use format::{
    export_rule_sets, export_rules_text, parse_questionnaire, parse_roster,
    serialize_questionnaire, serialize_roster, ParseError, ParseErrorKind, Roster, RosterWarning,
    SourceSpan,
};
pub use harness::{
    dataset_from_roster, evaluate, render_report_lines, render_report_text, summarize,
    synthesize_exact_dataset, Decimal2, EvalError, EvaluationReport, InstanceOutcome,
    LabeledInstance, Summary, SyntheticInstance,
};
pub use model::{
    validate_profile, validate_schema, Antecedent, Cell, CourseId, ModelError, Question,
    QuestionKind, Questionnaire, QuestionnaireSchema, Row, Rule, RuleOrigin, ValidationMode,
    VolunteerProfile, Warning,
};
pub use vote::{suggest_ensemble, VoteError, VoteResult};
