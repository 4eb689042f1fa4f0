//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code)] // each test binary uses a different subset
//!
//! Everything here is deterministic under a fixed seed, so failures
//! reproduce exactly. The oracles recompute expected results from the
//! definitions alone — no code under test on the oracle side.

use std::collections::{BTreeMap, BTreeSet};

use course_advisor::{
    Antecedent, Cell, CourseId, Question, QuestionKind, Questionnaire, QuestionnaireSchema, Row,
    RuleSet, VolunteerProfile,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 2–5 courses and 1–4 questions of mixed kinds. `require_score`
/// guarantees at least one score question, which makes every row's
/// exact synthetic profile separable.
pub fn random_schema(rng: &mut ChaCha8Rng, require_score: bool) -> QuestionnaireSchema {
    let course_count = rng.gen_range(2..=5);
    let courses: Vec<CourseId> = (0..course_count)
        .map(|i| CourseId::new(format!("C{i}")))
        .collect();

    let question_count = rng.gen_range(1..=4);
    let mut questions = Vec::new();
    for qi in 0..question_count {
        let kind = if require_score && qi == 0 {
            1
        } else {
            rng.gen_range(0..3)
        };
        let question = match kind {
            0 => {
                let domain: Vec<String> = (0..rng.gen_range(2..=4))
                    .map(|li| format!("L{qi}x{li}"))
                    .collect();
                Question::nominal(format!("q{qi}"), domain)
            }
            1 => {
                let min = rng.gen_range(-5..=10);
                let max = min + rng.gen_range(1..=20);
                Question::course_score(format!("q{qi}"), min, max)
            }
            _ => Question::course_set(format!("q{qi}")),
        };
        questions.push(question);
    }
    QuestionnaireSchema::new("Generated Department", courses, questions)
        .expect("generated schema is valid by construction")
}

/// A questionnaire over a fresh random schema: a nonempty random subset
/// of courses gets a row; nominal cells carry 1–3 distinct alternatives.
pub fn random_questionnaire(rng: &mut ChaCha8Rng, require_score: bool) -> Questionnaire {
    let schema = random_schema(rng, require_score);
    let expert = format!("expert{}", rng.gen_range(1..100));
    let mut rows = Vec::new();
    let picked_courses: Vec<CourseId> = pick_nonempty(rng, schema.courses());
    for course in picked_courses {
        let cells = schema
            .questions()
            .iter()
            .map(|question| random_cell(rng, &schema, question))
            .collect();
        rows.push(Row::new(course, cells));
    }
    Questionnaire::new(schema, expert, rows).expect("generated questionnaire is valid")
}

fn random_cell(rng: &mut ChaCha8Rng, schema: &QuestionnaireSchema, question: &Question) -> Cell {
    match question.kind() {
        QuestionKind::Nominal { domain } => {
            let mut indices: Vec<usize> = (0..domain.len()).collect();
            indices.shuffle(rng);
            let take = rng.gen_range(1..=domain.len().min(3));
            Cell::nominal(indices[..take].iter().map(|&i| domain[i].clone()))
        }
        QuestionKind::CourseScore { min, max } => Cell::score(rng.gen_range(*min..=*max)),
        QuestionKind::CourseSet => Cell::courses(pick_nonempty(rng, schema.courses())),
    }
}

/// A strictly valid profile: answers, scores and taught sets drawn from
/// the schema universe, each present with independent probability.
pub fn random_profile(rng: &mut ChaCha8Rng, schema: &QuestionnaireSchema) -> VolunteerProfile {
    let mut profile = VolunteerProfile::new(format!("p{}", rng.gen_range(0..1_000_000)));
    for question in schema.questions() {
        match question.kind() {
            QuestionKind::Nominal { domain } => {
                if rng.gen_bool(0.8) {
                    let label = domain.choose(rng).expect("domains are nonempty");
                    profile.nominal.insert(question.name().to_string(), label.clone());
                }
            }
            QuestionKind::CourseScore { min, max } => {
                for course in schema.courses() {
                    if rng.gen_bool(0.5) {
                        profile
                            .scores
                            .insert(course.to_string(), rng.gen_range(min - 3..=max + 3));
                    }
                }
            }
            QuestionKind::CourseSet => {
                for course in schema.courses() {
                    if rng.gen_bool(0.4) {
                        profile.taught.insert(course.to_string());
                    }
                }
            }
        }
    }
    profile
}

fn pick_nonempty(rng: &mut ChaCha8Rng, courses: &[CourseId]) -> Vec<CourseId> {
    let mut picked: Vec<CourseId> = courses
        .iter()
        .filter(|_| rng.gen_bool(0.7))
        .cloned()
        .collect();
    if picked.is_empty() {
        picked.push(courses.choose(rng).expect("schemas have courses").clone());
    }
    picked
}

/// Independent row-expansion oracle. Expands every row's nominal
/// alternative combinations directly — later cells varying fastest,
/// duplicate alternatives within a cell counted once — and returns the
/// expected leaf multiset as sorted rendered paths with posteriors,
/// without touching the tree builder.
pub fn expansion_oracle(q: &Questionnaire) -> Vec<(Vec<String>, String)> {
    let mut leaves = Vec::new();
    for row in q.rows() {
        let mut paths: Vec<Vec<String>> = vec![Vec::new()];
        for cell in row.cells() {
            let options: Vec<String> = match cell {
                Cell::Nominal(labels) => {
                    let mut seen = Vec::new();
                    for label in labels {
                        if !seen.contains(label) {
                            seen.push(label.clone());
                        }
                    }
                    seen
                }
                Cell::Score(value) => vec![format!("score:{value}")],
                Cell::Courses(set) => {
                    let members: Vec<String> = set.iter().map(|c| c.to_string()).collect();
                    vec![format!("courses:{}", members.join("+"))]
                }
            };
            paths = paths
                .iter()
                .flat_map(|path| {
                    options.iter().map(move |option| {
                        let mut next = path.clone();
                        next.push(option.clone());
                        next
                    })
                })
                .collect();
        }
        for path in paths {
            leaves.push((path, row.course().to_string()));
        }
    }
    leaves.sort();
    leaves
}

/// Expected leaf count: sum over rows of the product of per-cell
/// distinct-alternative counts.
pub fn expansion_count(q: &Questionnaire) -> usize {
    q.rows()
        .iter()
        .map(|row| {
            row.cells()
                .iter()
                .map(|cell| match cell {
                    Cell::Nominal(labels) => {
                        let mut seen: Vec<&String> = Vec::new();
                        for label in labels {
                            if !seen.contains(&label) {
                                seen.push(label);
                            }
                        }
                        seen.len()
                    }
                    _ => 1,
                })
                .product::<usize>()
        })
        .sum()
}

/// From-scratch antecedent check, written against the definitions
/// rather than the engine.
pub fn oracle_antecedent(antecedent: &Antecedent, profile: &VolunteerProfile) -> bool {
    match antecedent {
        Antecedent::NominalEquals { question, label } => {
            profile.nominal.get(question) == Some(label)
        }
        Antecedent::ScoreAtLeast { course, threshold } => profile
            .scores
            .get(course.as_str())
            .is_some_and(|value| value >= threshold),
        Antecedent::TaughtSuperset { courses } => courses
            .iter()
            .all(|course| profile.taught.contains(course.as_str())),
    }
}

/// From-scratch course table: every course with at least one rule maps
/// to its best satisfied-antecedent count.
pub fn oracle_course_scores(
    set: &RuleSet,
    profile: &VolunteerProfile,
) -> BTreeMap<CourseId, usize> {
    let mut best: BTreeMap<CourseId, usize> = BTreeMap::new();
    for rule in set.rules() {
        let score = rule
            .antecedents()
            .iter()
            .filter(|a| oracle_antecedent(a, profile))
            .count();
        let entry = best.entry(rule.posterior().clone()).or_insert(0);
        *entry = (*entry).max(score);
    }
    best
}

/// From-scratch argmax with first-in-schema-order tie-breaking.
pub fn oracle_choice(schema: &QuestionnaireSchema, table: &BTreeMap<CourseId, usize>) -> CourseId {
    let best = table.values().copied().max().expect("nonempty table");
    schema
        .courses()
        .iter()
        .find(|course| table.get(*course) == Some(&best))
        .expect("argmax exists in schema order")
        .clone()
}

/// Rendered leaf multiset of the tree under test, in the oracle's
/// format, for direct comparison with [`expansion_oracle`].
pub fn rendered_tree_leaves(tree: &course_advisor::DecisionTree) -> Vec<(Vec<String>, String)> {
    use course_advisor::compile::AnswerValue;
    let mut leaves: Vec<(Vec<String>, String)> = tree
        .leaves()
        .into_iter()
        .map(|(path, posterior)| {
            let rendered = path
                .into_iter()
                .map(|value| match value {
                    AnswerValue::Label(label) => label,
                    AnswerValue::Score(value) => format!("score:{value}"),
                    AnswerValue::Courses(set) => {
                        let members: Vec<String> =
                            set.iter().map(|c| c.to_string()).collect();
                        format!("courses:{}", members.join("+"))
                    }
                })
                .collect();
            (rendered, posterior.to_string())
        })
        .collect();
    leaves.sort();
    leaves
}

/// Distinct schema courses referenced by any taught set, used by tests
/// that need an in-universe course not taught by a profile.
pub fn untaught_course(
    schema: &QuestionnaireSchema,
    profile: &VolunteerProfile,
) -> Option<CourseId> {
    schema
        .courses()
        .iter()
        .find(|c| !profile.taught.contains(c.as_str()))
        .cloned()
}

/// BTreeSet of all labels of all nominal questions, handy for mutation.
pub fn all_labels(schema: &QuestionnaireSchema) -> BTreeSet<String> {
    schema
        .questions()
        .iter()
        .filter_map(|q| match q.kind() {
            QuestionKind::Nominal { domain } => Some(domain.iter().cloned()),
            _ => None,
        })
        .flatten()
        .collect()
}
