//! Integer-only rule representation used on the matching hot path.
//!
//! Matching thousands of profiles against hundreds of rules must not
//! touch strings per antecedent. A `CompiledUniverse` interns every
//! label and course of one schema; rules compile to index-based checks
//! against it, and a `BoundProfile` resolves one profile's answers once,
//! after which every antecedent check is a couple of integer compares.
//!
//! The universe is a deterministic function of the schema (labels are
//! numbered in domain order, courses in schema order), so rule sets
//! compiled from equal schemas may share one bound profile.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::model::{Antecedent, QuestionKind, QuestionnaireSchema, Rule, VolunteerProfile};

/// An antecedent with every string replaced by an index into the
/// owning universe's tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum CompiledAntecedent {
    /// Question slot must hold this interned label id.
    LabelEquals { question: usize, label: u32 },
    /// Score slot for this course index must be `Some(s)` with `s >= threshold`.
    ScoreAtLeast { course: usize, threshold: i64 },
    /// Profile's taught bitmask must contain all of `mask`.
    TaughtSuperset { mask: Box<[u64]> },
    /// References a label, question or course outside the universe; no
    /// profile validated against the same schema can satisfy it.
    Never,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct CompiledRule {
    pub(crate) antecedents: Vec<CompiledAntecedent>,
    /// Index into the schema's course list.
    pub(crate) posterior: usize,
}

/// Interning tables for one schema's answer universe.
#[derive(Debug, PartialEq, Eq)]
pub(crate) struct CompiledUniverse {
    /// question index -> label text -> dense label id.
    label_ids: Vec<BTreeMap<String, u32>>,
    /// question name -> question index.
    question_index: BTreeMap<String, usize>,
    /// course id text -> course index.
    course_index: BTreeMap<String, usize>,
    course_count: usize,
}

fn mask_words(course_count: usize) -> usize {
    course_count.div_ceil(64)
}

impl CompiledUniverse {
    pub(crate) fn new(schema: &QuestionnaireSchema) -> Self {
        let mut label_ids = Vec::with_capacity(schema.question_count());
        let mut question_index = BTreeMap::new();
        for (qi, question) in schema.questions().iter().enumerate() {
            question_index.insert(question.name().to_string(), qi);
            let mut ids = BTreeMap::new();
            if let QuestionKind::Nominal { domain } = question.kind() {
                for (li, label) in domain.iter().enumerate() {
                    ids.insert(label.clone(), li as u32);
                }
            }
            label_ids.push(ids);
        }
        let mut course_index = BTreeMap::new();
        for (ci, course) in schema.courses().iter().enumerate() {
            course_index.insert(course.as_str().to_string(), ci);
        }
        CompiledUniverse {
            label_ids,
            question_index,
            course_index,
            course_count: schema.courses().len(),
        }
    }

    pub(crate) fn course_count(&self) -> usize {
        self.course_count
    }

    pub(crate) fn compile_rules(&self, rules: &[Rule]) -> Vec<CompiledRule> {
        rules
            .iter()
            .map(|rule| CompiledRule {
                antecedents: rule
                    .antecedents()
                    .iter()
                    .map(|ante| self.compile_antecedent(ante))
                    .collect(),
                // Posterior membership is checked at rule-set construction.
                posterior: self.course_index[rule.posterior().as_str()],
            })
            .collect()
    }

    fn compile_antecedent(&self, ante: &Antecedent) -> CompiledAntecedent {
        match ante {
            Antecedent::NominalEquals { question, label } => {
                match self
                    .question_index
                    .get(question)
                    .and_then(|&qi| self.label_ids[qi].get(label).map(|&id| (qi, id)))
                {
                    Some((question, label)) => CompiledAntecedent::LabelEquals { question, label },
                    None => CompiledAntecedent::Never,
                }
            }
            Antecedent::ScoreAtLeast { course, threshold } => {
                match self.course_index.get(course.as_str()) {
                    Some(&ci) => CompiledAntecedent::ScoreAtLeast {
                        course: ci,
                        threshold: *threshold,
                    },
                    None => CompiledAntecedent::Never,
                }
            }
            Antecedent::TaughtSuperset { courses } => {
                let mut mask = vec![0u64; mask_words(self.course_count)];
                for course in courses {
                    match self.course_index.get(course.as_str()) {
                        Some(&ci) => mask[ci / 64] |= 1 << (ci % 64),
                        None => return CompiledAntecedent::Never,
                    }
                }
                CompiledAntecedent::TaughtSuperset {
                    mask: mask.into_boxed_slice(),
                }
            }
        }
    }

    /// Resolves a profile's answers into this universe's integers.
    /// Answers outside the universe become unmatchable slots, mirroring
    /// how unknown values can never satisfy an antecedent.
    pub(crate) fn bind(&self, profile: &VolunteerProfile) -> BoundProfile {
        let mut labels = vec![NO_ANSWER; self.label_ids.len()];
        for (question, label) in &profile.nominal {
            if let Some(&qi) = self.question_index.get(question) {
                labels[qi] = self.label_ids[qi].get(label).copied().unwrap_or(FOREIGN);
            }
        }
        let mut scores = vec![None; self.course_count];
        for (course, &score) in &profile.scores {
            if let Some(&ci) = self.course_index.get(course) {
                scores[ci] = Some(score);
            }
        }
        let mut taught = vec![0u64; mask_words(self.course_count)];
        for course in &profile.taught {
            if let Some(&ci) = self.course_index.get(course) {
                taught[ci / 64] |= 1 << (ci % 64);
            }
        }
        BoundProfile {
            labels,
            scores,
            taught,
        }
    }
}

/// Rules of one rule set compiled against a shared universe.
#[derive(Debug, Clone)]
pub(crate) struct CompiledRuleSet {
    pub(crate) universe: Arc<CompiledUniverse>,
    pub(crate) rules: Vec<CompiledRule>,
}

impl CompiledRuleSet {
    pub(crate) fn new(universe: Arc<CompiledUniverse>, rules: &[Rule]) -> Self {
        let compiled = universe.compile_rules(rules);
        CompiledRuleSet {
            universe,
            rules: compiled,
        }
    }
}

/// Label slot for "volunteer left this question unanswered".
const NO_ANSWER: u32 = u32::MAX;
/// Label slot for "answered, but with a label outside this universe".
const FOREIGN: u32 = u32::MAX - 1;

/// One profile resolved against one universe. Only meaningful against
/// rules compiled for that universe or for an equal schema (equal
/// schemas intern identically).
pub(crate) struct BoundProfile {
    labels: Vec<u32>,
    scores: Vec<Option<i64>>,
    taught: Vec<u64>,
}

impl BoundProfile {
    #[inline]
    fn satisfies(&self, ante: &CompiledAntecedent) -> bool {
        match ante {
            CompiledAntecedent::LabelEquals { question, label } => self.labels[*question] == *label,
            CompiledAntecedent::ScoreAtLeast { course, threshold } => {
                matches!(self.scores[*course], Some(s) if s >= *threshold)
            }
            CompiledAntecedent::TaughtSuperset { mask } => mask
                .iter()
                .zip(&self.taught)
                .all(|(need, have)| need & !have == 0),
            CompiledAntecedent::Never => false,
        }
    }

    /// Number of satisfied antecedents of one rule.
    #[inline]
    pub(crate) fn rule_score(&self, rule: &CompiledRule) -> usize {
        rule.antecedents.iter().filter(|a| self.satisfies(a)).count()
    }

    /// Best rule score per course index, for every course with at least
    /// one rule. Courses without rules stay `None`.
    pub(crate) fn best_per_course(
        &self,
        rules: &[CompiledRule],
        course_count: usize,
    ) -> Vec<Option<usize>> {
        let mut best: Vec<Option<usize>> = vec![None; course_count];
        for rule in rules {
            let score = self.rule_score(rule);
            let slot = &mut best[rule.posterior];
            if slot.map_or(true, |s| score > s) {
                *slot = Some(score);
            }
        }
        best
    }
}
