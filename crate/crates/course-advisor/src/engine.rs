//! Partial-match inference: count satisfied antecedents per rule, keep
//! the best count per course, recommend the argmax.
//!
//! Counting is deliberately forgiving. A volunteer rarely satisfies a
//! whole rule; the rule with the most satisfied antecedents still ranks
//! its course above the rest, and unanswered questions or missing
//! scores simply fail their antecedents instead of erroring.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::compile::RuleSet;
use crate::model::{Antecedent, CourseId, Rule, VolunteerProfile};

/// Best satisfied-antecedent count per course, in schema course order.
/// Only courses backed by at least one rule appear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CourseScoreTable {
    entries: Vec<(CourseId, usize)>,
}

impl CourseScoreTable {
    pub fn get(&self, course: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|(c, _)| c.as_str() == course)
            .map(|(_, s)| *s)
    }

    /// Entries in schema course order.
    pub fn entries(&self) -> &[(CourseId, usize)] {
        &self.entries
    }
}

/// One expert's recommendation for one volunteer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suggestion {
    pub expert_id: String,
    pub course_scores: CourseScoreTable,
    /// Course with the maximal score; ties fall to the earliest course
    /// in schema order.
    pub chosen: CourseId,
    /// The other courses sharing the maximal score, if any.
    pub tied_with: BTreeSet<CourseId>,
}

/// Evaluates one antecedent against a profile. Total: never errors.
/// An unanswered question matches no label; a missing course score
/// fails any threshold; taught containment is superset comparison.
pub fn eval_antecedent(antecedent: &Antecedent, profile: &VolunteerProfile) -> bool {
    match antecedent {
        Antecedent::NominalEquals { question, label } => {
            profile.answer(question) == Some(label.as_str())
        }
        Antecedent::ScoreAtLeast { course, threshold } => profile
            .scores
            .get(course.as_str())
            .is_some_and(|score| score >= threshold),
        Antecedent::TaughtSuperset { courses } => courses
            .iter()
            .all(|course| profile.taught.contains(course.as_str())),
    }
}

/// Number of satisfied antecedents; between 0 and the rule's arity.
pub fn score_rule(rule: &Rule, profile: &VolunteerProfile) -> usize {
    rule.antecedents()
        .iter()
        .filter(|a| eval_antecedent(a, profile))
        .count()
}

/// Best rule score per course over the whole set.
pub fn course_scores(
    rules: &RuleSet,
    profile: &VolunteerProfile,
) -> Result<CourseScoreTable, EngineError> {
    if rules.is_empty() {
        return Err(EngineError::EmptyRuleSet);
    }
    let compiled = rules.compiled();
    let bound = compiled.universe.bind(profile);
    let best = bound.best_per_course(&compiled.rules, compiled.universe.course_count());
    Ok(table_from_best(rules, &best))
}

pub(crate) fn table_from_best(rules: &RuleSet, best: &[Option<usize>]) -> CourseScoreTable {
    let entries = rules
        .schema()
        .courses()
        .iter()
        .zip(best)
        .filter_map(|(course, score)| score.map(|s| (course.clone(), s)))
        .collect();
    CourseScoreTable { entries }
}

/// Single-expert recommendation: argmax over the course score table,
/// ties broken toward the earliest schema course and reported.
pub fn suggest(rules: &RuleSet, profile: &VolunteerProfile) -> Result<Suggestion, EngineError> {
    let table = course_scores(rules, profile)?;
    Ok(suggestion_from_table(rules.expert_id(), table))
}

pub(crate) fn suggestion_from_table(expert_id: &str, table: CourseScoreTable) -> Suggestion {
    // A nonempty rule set guarantees at least one entry.
    let max = table
        .entries
        .iter()
        .map(|(_, s)| *s)
        .max()
        .expect("course score table of a nonempty rule set has entries");
    let mut at_max = table.entries.iter().filter(|(_, s)| *s == max);
    let chosen = at_max
        .next()
        .expect("some entry attains the maximum")
        .0
        .clone();
    let tied_with = at_max.map(|(c, _)| c.clone()).collect();
    Suggestion {
        expert_id: expert_id.to_string(),
        course_scores: table,
        chosen,
        tied_with,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("rule set has no rules")]
    EmptyRuleSet,
}
