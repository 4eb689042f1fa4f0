//! Plurality voting across experts: every expert's rule set suggests
//! one course, and the course named most often wins.
//!
//! Vote ties are resolved by the greatest summed course score across
//! all experts, then by schema course order; `tie_broken` records that
//! either step fired so callers can surface contested results.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::compile::RuleSet;
use crate::engine::{suggestion_from_table, table_from_best, EngineError, Suggestion};
use crate::model::{CourseId, QuestionnaireSchema, VolunteerProfile};

/// Outcome of one ensemble run over a single volunteer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteResult {
    /// One suggestion per expert, in input order.
    pub per_expert: Vec<Suggestion>,
    /// Votes per course; sums to the number of experts.
    pub tally: BTreeMap<CourseId, usize>,
    pub winner: CourseId,
    /// True when the plurality was not unique and a tie-break decided.
    pub tie_broken: bool,
}

/// Runs every expert on the profile and integrates by plurality.
/// Each expert casts exactly one vote: its own tie-broken chosen course.
pub fn suggest_ensemble(
    kbs: &[RuleSet],
    profile: &VolunteerProfile,
) -> Result<VoteResult, VoteError> {
    let first = kbs.first().ok_or(VoteError::EmptyEnsemble)?;
    for (index, kb) in kbs.iter().enumerate() {
        if !schemas_equal(first.schema_arc(), kb.schema_arc()) {
            return Err(VoteError::SchemaMismatch { index });
        }
        if kb.is_empty() {
            return Err(VoteError::Engine(EngineError::EmptyRuleSet));
        }
    }

    // Equal schemas intern identically, so one binding serves all sets.
    let universe = &first.compiled().universe;
    let bound = universe.bind(profile);
    let per_expert: Vec<Suggestion> = kbs
        .iter()
        .map(|kb| {
            let best = bound.best_per_course(&kb.compiled().rules, universe.course_count());
            suggestion_from_table(kb.expert_id(), table_from_best(kb, &best))
        })
        .collect();

    let mut tally: BTreeMap<CourseId, usize> = BTreeMap::new();
    for suggestion in &per_expert {
        *tally.entry(suggestion.chosen.clone()).or_insert(0) += 1;
    }
    let top_votes = *tally.values().max().expect("at least one vote was cast");
    let schema = first.schema();
    let leaders: Vec<&CourseId> = schema
        .courses()
        .iter()
        .filter(|course| tally.get(*course) == Some(&top_votes))
        .collect();

    let (winner, tie_broken) = if leaders.len() == 1 {
        (leaders[0].clone(), false)
    } else {
        let summed = |course: &CourseId| -> usize {
            per_expert
                .iter()
                .filter_map(|s| s.course_scores.get(course.as_str()))
                .sum()
        };
        let best_sum = leaders.iter().map(|c| summed(c)).max().unwrap_or(0);
        // Leaders are already in schema order; take the first at best_sum.
        let winner = leaders
            .iter()
            .find(|c| summed(c) == best_sum)
            .expect("some leader attains the best sum")
            .to_owned()
            .clone();
        (winner, true)
    };

    Ok(VoteResult {
        per_expert,
        tally,
        winner,
        tie_broken,
    })
}

fn schemas_equal(a: &Arc<QuestionnaireSchema>, b: &Arc<QuestionnaireSchema>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VoteError {
    #[error("rule set list is empty")]
    EmptyEnsemble,
    #[error("rule set {index} does not share the first rule set's schema")]
    SchemaMismatch { index: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile_kb, extract_rules, build_tree, RuleSet};
    use crate::engine::suggest;
    use crate::fixtures;
    use crate::model::{Cell, Questionnaire, Row};

    /// A questionnaire that makes the expert suggest `course` for F1 by
    /// giving only that course a row matching F1's nominal answers.
    fn biased_questionnaire(expert_id: &str, course: &str) -> Questionnaire {
        let rows = vec![
            Row::new(
                course,
                vec![
                    Cell::nominal(["Hardware"]),
                    Cell::nominal(["AI"]),
                    Cell::nominal(["AI"]),
                    Cell::score(10),
                    Cell::courses(["NS", "CN"]),
                ],
            ),
            Row::new(
                if course == "AI" { "DB" } else { "AI" },
                vec![
                    Cell::nominal(["Software"]),
                    Cell::nominal(["Software"]),
                    Cell::nominal(["Software"]),
                    Cell::score(20),
                    Cell::courses(["DB"]),
                ],
            ),
        ];
        Questionnaire::new(fixtures::computer_science_schema(), expert_id, rows).unwrap()
    }

    fn kb_for(questionnaires: &[Questionnaire]) -> Vec<RuleSet> {
        compile_kb(questionnaires).unwrap()
    }

    #[test]
    fn plurality_wins_without_tie_break() {
        let kbs = kb_for(&[
            biased_questionnaire("e1", "AI"),
            biased_questionnaire("e2", "AI"),
            biased_questionnaire("e3", "DB"),
        ]);
        let result = suggest_ensemble(&kbs, &fixtures::volunteer_f1()).unwrap();
        assert_eq!(result.winner, CourseId::new("AI"));
        assert!(!result.tie_broken);
        assert_eq!(result.tally.get("AI"), Some(&2));
        assert_eq!(result.tally.get("DB"), Some(&1));
        assert_eq!(result.tally.values().sum::<usize>(), 3);
        let chosen: Vec<&str> = result
            .per_expert
            .iter()
            .map(|s| s.chosen.as_str())
            .collect();
        assert_eq!(chosen, ["AI", "AI", "DB"]);
    }

    #[test]
    fn single_expert_collapses_to_suggest() {
        let q = fixtures::ai_db_ns_questionnaire();
        let kbs = kb_for(&[q.clone()]);
        let f1 = fixtures::volunteer_f1();
        let result = suggest_ensemble(&kbs, &f1).unwrap();
        let direct = suggest(&extract_rules(&build_tree(&q).unwrap()), &f1).unwrap();
        assert_eq!(result.winner, direct.chosen);
        assert_eq!(result.per_expert, vec![direct]);
        assert_eq!(result.tally.len(), 1);
    }

    #[test]
    fn identical_experts_agree_with_single_expert() {
        let q = fixtures::computer_science_questionnaire();
        let kbs = kb_for(&vec![q.clone(); 5]);
        let single = kb_for(&[q]);
        for profile in [
            fixtures::volunteer_f1(),
            VolunteerProfile::new("blank"),
            VolunteerProfile::new("ad-ish")
                .with_answer("bsc", "Software")
                .with_answer("msc", "AD")
                .with_answer("phd", "AD")
                .with_score("AD", 19)
                .with_taught("AD"),
        ] {
            let many = suggest_ensemble(&kbs, &profile).unwrap();
            let one = suggest_ensemble(&single, &profile).unwrap();
            assert_eq!(many.winner, one.winner);
            assert_eq!(many.tally.values().sum::<usize>(), 5);
        }
    }

    #[test]
    fn vote_tie_falls_to_greater_summed_score() {
        // e1 backs AI, e2 backs DB: one vote each. F1 fully matches each
        // expert's favored rule (5 antecedents), but e1's DB rule still
        // scores 1 through F1's DB=20 while e2's AI rule scores 0 (its
        // threshold is 20, F1 has 19), so DB sums 6 against AI's 5 and
        // takes the tie.
        let kbs = kb_for(&[
            biased_questionnaire("e1", "AI"),
            biased_questionnaire("e2", "DB"),
        ]);
        let f1 = fixtures::volunteer_f1();
        let result = suggest_ensemble(&kbs, &f1).unwrap();
        assert!(result.tie_broken);
        assert_eq!(result.tally.get("AI"), Some(&1));
        assert_eq!(result.tally.get("DB"), Some(&1));

        let sum_for = |course: &str| -> usize {
            result
                .per_expert
                .iter()
                .filter_map(|s| s.course_scores.get(course))
                .sum()
        };
        assert_eq!((sum_for("AI"), sum_for("DB")), (5, 6));
        assert_eq!(result.winner, CourseId::new("DB"));
    }

    #[test]
    fn schema_order_breaks_exhausted_ties() {
        // Symmetric experts, symmetric profile: NS and CN end with equal
        // votes and equal sums; schema order puts NS first.
        let ns_expert = Questionnaire::new(
            fixtures::computer_science_schema(),
            "ns",
            vec![Row::new(
                "NS",
                vec![
                    Cell::nominal(["Hardware"]),
                    Cell::nominal(["Structure"]),
                    Cell::nominal(["Structure"]),
                    Cell::score(15),
                    Cell::courses(["NS"]),
                ],
            )],
        )
        .unwrap();
        let cn_expert = Questionnaire::new(
            fixtures::computer_science_schema(),
            "cn",
            vec![Row::new(
                "CN",
                vec![
                    Cell::nominal(["Hardware"]),
                    Cell::nominal(["Structure"]),
                    Cell::nominal(["Structure"]),
                    Cell::score(15),
                    Cell::courses(["CN"]),
                ],
            )],
        )
        .unwrap();
        let kbs = kb_for(&[ns_expert, cn_expert]);
        let symmetric = VolunteerProfile::new("sym")
            .with_answer("bsc", "Hardware")
            .with_answer("msc", "Structure")
            .with_answer("phd", "Structure");
        let result = suggest_ensemble(&kbs, &symmetric).unwrap();
        assert_eq!(result.tally.get("NS"), Some(&1));
        assert_eq!(result.tally.get("CN"), Some(&1));
        assert!(result.tie_broken);
        assert_eq!(result.winner, CourseId::new("NS"));
    }

    #[test]
    fn ensemble_rejects_bad_inputs() {
        assert_eq!(
            suggest_ensemble(&[], &fixtures::volunteer_f1()).unwrap_err(),
            VoteError::EmptyEnsemble
        );
        let a = kb_for(&[fixtures::computer_science_questionnaire()]);
        let other = Questionnaire::new(
            crate::model::QuestionnaireSchema::new(
                "Other",
                vec![CourseId::new("X")],
                vec![crate::model::Question::course_set("taught")],
            )
            .unwrap(),
            "odd",
            vec![Row::new("X", vec![Cell::courses(["X"])])],
        )
        .unwrap();
        let b = kb_for(&[other]);
        let mixed = vec![a[0].clone(), b[0].clone()];
        assert_eq!(
            suggest_ensemble(&mixed, &fixtures::volunteer_f1()).unwrap_err(),
            VoteError::SchemaMismatch { index: 1 }
        );
    }

    #[test]
    fn permuting_experts_changes_nothing_but_order() {
        let kbs = kb_for(&[
            biased_questionnaire("e1", "AI"),
            biased_questionnaire("e2", "DB"),
            biased_questionnaire("e3", "AI"),
        ]);
        let f1 = fixtures::volunteer_f1();
        let forward = suggest_ensemble(&kbs, &f1).unwrap();
        let mut reversed_kbs = kbs.clone();
        reversed_kbs.reverse();
        let reversed = suggest_ensemble(&reversed_kbs, &f1).unwrap();
        assert_eq!(forward.winner, reversed.winner);
        assert_eq!(forward.tally, reversed.tally);
        assert_eq!(
            forward.per_expert.iter().rev().collect::<Vec<_>>(),
            reversed.per_expert.iter().collect::<Vec<_>>()
        );
    }
}
