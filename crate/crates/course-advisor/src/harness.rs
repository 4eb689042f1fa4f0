//! Accuracy evaluation over labeled volunteer datasets, plus a
//! synthetic-dataset generator for exercising the whole pipeline when
//! no real data is at hand.
//!
//! Accuracy is the share of instances whose ensemble winner equals the
//! instance label, reported as a percentage with exactly two fractional
//! digits. All percentage arithmetic is exact integer arithmetic on
//! hundredths with round-half-even, so reports are bit-stable across
//! platforms.

use std::fmt;

use thiserror::Error;

use crate::compile::{compile_kb, RuleSet};
use crate::format::Roster;
use crate::model::{
    validate_profile, Cell, CourseId, ModelError, Questionnaire, ValidationMode, VolunteerProfile,
};
use crate::vote::{suggest_ensemble, VoteError};

/// A nonnegative decimal with exactly two fractional digits, stored in
/// hundredths. Division rounds half to even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Decimal2(i64);

impl Decimal2 {
    pub fn from_hundredths(hundredths: i64) -> Self {
        Decimal2(hundredths)
    }

    pub fn hundredths(self) -> i64 {
        self.0
    }

    /// `numerator / denominator` as a percentage: round(100 * n / d, 2).
    pub fn ratio_as_percent(numerator: usize, denominator: usize) -> Self {
        assert!(denominator > 0, "percentage of an empty population");
        Decimal2(div_round_half_even(
            numerator as i128 * 10_000,
            denominator as i128,
        ))
    }

    /// Unweighted mean, rounded half to even on the hundredth.
    pub fn mean(values: &[Decimal2]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let sum: i128 = values.iter().map(|v| i128::from(v.0)).sum();
        Some(Decimal2(div_round_half_even(sum, values.len() as i128)))
    }
}

fn div_round_half_even(numerator: i128, denominator: i128) -> i64 {
    debug_assert!(numerator >= 0 && denominator > 0);
    let quotient = numerator / denominator;
    let remainder = numerator % denominator;
    let rounded = match (remainder * 2).cmp(&denominator) {
        std::cmp::Ordering::Less => quotient,
        std::cmp::Ordering::Greater => quotient + 1,
        std::cmp::Ordering::Equal => {
            if quotient % 2 == 0 {
                quotient
            } else {
                quotient + 1
            }
        }
    };
    i64::try_from(rounded).expect("percentages fit in hundredths of i64")
}

impl fmt::Display for Decimal2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

/// One labeled evaluation instance: a volunteer and the course a human
/// assigned them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledInstance {
    pub profile: VolunteerProfile,
    pub label: CourseId,
}

/// Per-instance evaluation outcome, retained for auditability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceOutcome {
    pub name: String,
    pub label: CourseId,
    pub winner: CourseId,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationReport {
    pub total: usize,
    pub correct: usize,
    pub accuracy_percent: Decimal2,
    pub per_instance: Vec<InstanceOutcome>,
}

/// Per-dataset accuracies plus their unweighted mean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub per_label: Vec<(String, Decimal2)>,
    pub mean: Decimal2,
}

/// Runs the ensemble over every instance and scores exact matches.
/// Instances are validated strictly; the first invalid one aborts the
/// run with its 1-based index.
pub fn evaluate(
    kbs: &[RuleSet],
    data: &[LabeledInstance],
) -> Result<EvaluationReport, EvalError> {
    if data.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let schema = kbs.first().ok_or(VoteError::EmptyEnsemble)?.schema();
    let mut per_instance = Vec::with_capacity(data.len());
    let mut correct = 0;
    for (i, instance) in data.iter().enumerate() {
        let index = i + 1;
        let invalid = |source: ModelError| EvalError::InvalidInstance { index, source };
        if !schema.is_course(instance.label.as_str()) {
            return Err(invalid(ModelError::UnknownCourse {
                course: instance.label.to_string(),
            }));
        }
        let (profile, _) =
            validate_profile(instance.profile.clone(), schema, ValidationMode::Strict)
                .map_err(invalid)?;
        let vote = suggest_ensemble(kbs, &profile)?;
        let hit = vote.winner == instance.label;
        correct += usize::from(hit);
        per_instance.push(InstanceOutcome {
            name: profile.name,
            label: instance.label.clone(),
            winner: vote.winner,
            correct: hit,
        });
    }
    Ok(EvaluationReport {
        total: data.len(),
        correct,
        accuracy_percent: Decimal2::ratio_as_percent(correct, data.len()),
        per_instance,
    })
}

/// Folds labeled reports into per-label accuracies and their mean.
pub fn summarize(reports: &[(String, EvaluationReport)]) -> Result<Summary, EvalError> {
    if reports.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let per_label: Vec<(String, Decimal2)> = reports
        .iter()
        .map(|(label, report)| (label.clone(), report.accuracy_percent))
        .collect();
    let accuracies: Vec<Decimal2> = per_label.iter().map(|(_, a)| *a).collect();
    let mean = Decimal2::mean(&accuracies).expect("reports are nonempty");
    Ok(Summary { per_label, mean })
}

/// A synthetic instance plus whether its exact profile is classified as
/// its own course with no tie ("separable"). Non-separable rows exist:
/// two rows differing only in cells a single profile can satisfy for
/// both courses can reach the same score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticInstance {
    pub instance: LabeledInstance,
    pub separable: bool,
}

/// Builds one instance per single-valued row expansion of the
/// questionnaire: nominal answers copied from the cells, the row
/// course's score set to the cell value, taught set to the cell set.
/// Such a profile satisfies every antecedent of its own rule.
pub fn synthesize_exact_dataset(q: &Questionnaire) -> Vec<SyntheticInstance> {
    let Ok(kbs) = compile_kb(std::slice::from_ref(q)) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for row in q.rows() {
        let mut expansions: Vec<VolunteerProfile> = vec![VolunteerProfile::new("seed")];
        for (question, cell) in q.schema().questions().iter().zip(row.cells()) {
            expansions = match cell {
                Cell::Nominal(labels) => expansions
                    .iter()
                    .flat_map(|p| {
                        labels
                            .iter()
                            .map(|label| p.clone().with_answer(question.name(), label))
                    })
                    .collect(),
                Cell::Score(value) => expansions
                    .into_iter()
                    .map(|p| p.with_score(row.course().as_str(), *value))
                    .collect(),
                Cell::Courses(set) => expansions
                    .into_iter()
                    .map(|p| {
                        set.iter()
                            .fold(p, |p, course| p.with_taught(course.as_str()))
                    })
                    .collect(),
            };
        }
        for profile in expansions {
            let mut profile = profile;
            profile.name = format!("{}-{}", row.course(), out.len() + 1);
            let suggestion = crate::engine::suggest(&kbs[0], &profile)
                .expect("compiled questionnaire has at least one rule");
            let separable =
                suggestion.chosen == *row.course() && suggestion.tied_with.is_empty();
            out.push(SyntheticInstance {
                instance: LabeledInstance {
                    profile,
                    label: row.course().clone(),
                },
                separable,
            });
        }
    }
    out
}

/// Machine-readable report lines: a `format = 1` header, then one
/// `label<TAB>total<TAB>correct<TAB>accuracy` line per report, then a
/// `mean` line when a summary is given.
pub fn render_report_lines(
    reports: &[(String, EvaluationReport)],
    summary: Option<&Summary>,
) -> String {
    let mut out = String::from("format = 1\n");
    for (label, report) in reports {
        out.push_str(&format!(
            "{label}\t{}\t{}\t{}\n",
            report.total, report.correct, report.accuracy_percent
        ));
    }
    if let Some(summary) = summary {
        out.push_str(&format!("mean\t-\t-\t{}\n", summary.mean));
    }
    out
}

/// Aligned human-readable form of the same table.
pub fn render_report_text(
    reports: &[(String, EvaluationReport)],
    summary: Option<&Summary>,
) -> String {
    let mut rows: Vec<(String, String, String, String)> = vec![(
        "dataset".to_string(),
        "total".to_string(),
        "correct".to_string(),
        "accuracy".to_string(),
    )];
    for (label, report) in reports {
        rows.push((
            label.clone(),
            report.total.to_string(),
            report.correct.to_string(),
            report.accuracy_percent.to_string(),
        ));
    }
    if let Some(summary) = summary {
        rows.push((
            "mean".to_string(),
            "-".to_string(),
            "-".to_string(),
            summary.mean.to_string(),
        ));
    }
    let width = |pick: fn(&(String, String, String, String)) -> &String| {
        rows.iter().map(|r| pick(r).len()).max().unwrap_or(0)
    };
    let (w0, w1, w2) = (width(|r| &r.0), width(|r| &r.1), width(|r| &r.2));
    rows.iter()
        .map(|(a, b, c, d)| format!("{a:<w0$}  {b:>w1$}  {c:>w2$}  {d}\n"))
        .collect()
}

/// Pairs a labeled roster's profiles with their labels. The roster must
/// carry a label column.
pub fn dataset_from_roster(roster: &Roster) -> Result<Vec<LabeledInstance>, EvalError> {
    let labels = roster.labels.as_ref().ok_or(EvalError::MissingLabels)?;
    Ok(roster
        .profiles
        .iter()
        .zip(labels)
        .map(|(profile, label)| LabeledInstance {
            profile: profile.clone(),
            label: label.clone(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("dataset has no instances")]
    EmptyDataset,
    #[error("no reports to summarize")]
    EmptyInput,
    #[error("instance {index}: {source}")]
    InvalidInstance { index: usize, source: ModelError },
    #[error(transparent)]
    Vote(#[from] VoteError),
    #[error("roster has no label column")]
    MissingLabels,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn cs_kb() -> Vec<RuleSet> {
        compile_kb(&[fixtures::computer_science_questionnaire()]).unwrap()
    }

    #[test]
    fn accuracy_renders_thirty_instance_percentages() {
        assert_eq!(Decimal2::ratio_as_percent(25, 30).to_string(), "83.33");
        assert_eq!(Decimal2::ratio_as_percent(19, 30).to_string(), "63.33");
        assert_eq!(Decimal2::ratio_as_percent(27, 30).to_string(), "90.00");
        assert_eq!(Decimal2::ratio_as_percent(0, 7).to_string(), "0.00");
        assert_eq!(Decimal2::ratio_as_percent(7, 7).to_string(), "100.00");
    }

    #[test]
    fn rounding_is_half_even_on_the_hundredth() {
        // 1/32 percent-scaled = 3.125 -> ties to the even 3.12;
        // 3/32 = 9.375 -> ties to 9.38.
        assert_eq!(Decimal2::ratio_as_percent(1, 32).to_string(), "3.12");
        assert_eq!(Decimal2::ratio_as_percent(3, 32).to_string(), "9.38");
        // 2/3 = 66.666... rounds up normally.
        assert_eq!(Decimal2::ratio_as_percent(2, 3).to_string(), "66.67");
    }

    #[test]
    fn mean_of_report_percentages() {
        let values = [8333, 6333, 9000].map(Decimal2::from_hundredths);
        assert_eq!(Decimal2::mean(&values).unwrap().to_string(), "78.89");
        assert_eq!(
            Decimal2::mean(&[Decimal2::from_hundredths(9000)]).unwrap().to_string(),
            "90.00"
        );
        let halves = [0, 10_000].map(Decimal2::from_hundredths);
        assert_eq!(Decimal2::mean(&halves).unwrap().to_string(), "50.00");
        assert_eq!(Decimal2::mean(&[]), None);
    }

    #[test]
    fn evaluate_counts_exact_matches() {
        let kbs = cs_kb();
        let data = fixtures::demo_dataset(25);
        let report = evaluate(&kbs, &data).unwrap();
        assert_eq!(report.total, 30);
        assert_eq!(report.correct, 25);
        assert_eq!(report.accuracy_percent.to_string(), "83.33");
        assert_eq!(report.per_instance.len(), 30);
        assert_eq!(
            report.per_instance.iter().filter(|o| o.correct).count(),
            25
        );
    }

    #[test]
    fn evaluate_is_deterministic() {
        let kbs = cs_kb();
        let data = fixtures::demo_dataset(19);
        assert_eq!(evaluate(&kbs, &data).unwrap(), evaluate(&kbs, &data).unwrap());
    }

    #[test]
    fn evaluate_rejects_bad_input() {
        let kbs = cs_kb();
        assert_eq!(evaluate(&kbs, &[]).unwrap_err(), EvalError::EmptyDataset);

        let mut data = fixtures::demo_dataset(30);
        data[2].label = CourseId::new("Welding");
        assert_eq!(
            evaluate(&kbs, &data).unwrap_err(),
            EvalError::InvalidInstance {
                index: 3,
                source: ModelError::UnknownCourse {
                    course: "Welding".to_string()
                }
            }
        );

        let mut data = fixtures::demo_dataset(30);
        data[0].profile.scores.insert("DT".to_string(), 14);
        assert!(matches!(
            evaluate(&kbs, &data).unwrap_err(),
            EvalError::InvalidInstance { index: 1, .. }
        ));
    }

    #[test]
    fn summarize_means_the_percentages() {
        let kbs = cs_kb();
        let reports: Vec<(String, EvaluationReport)> = [25, 19, 27]
            .into_iter()
            .map(|correct| {
                let data = fixtures::demo_dataset(correct);
                (
                    format!("dept-{correct}"),
                    evaluate(&kbs, &data).unwrap(),
                )
            })
            .collect();
        let summary = summarize(&reports).unwrap();
        assert_eq!(summary.mean.to_string(), "78.89");
        assert_eq!(summarize(&[]).unwrap_err(), EvalError::EmptyInput);
    }

    #[test]
    fn synthetic_dataset_covers_every_expansion() {
        let q = fixtures::computer_science_questionnaire();
        let synthetic = synthesize_exact_dataset(&q);
        assert_eq!(synthetic.len(), 6);
        let labels: Vec<&str> = synthetic
            .iter()
            .map(|s| s.instance.label.as_str())
            .collect();
        assert_eq!(labels, ["AI", "DB", "NS", "CN", "AD", "AD"]);
        // Every Table-style row is separated from the others by at least
        // one cell, so the whole synthetic set is separable.
        assert!(synthetic.iter().all(|s| s.separable));
    }

    #[test]
    fn separable_synthetic_instances_evaluate_perfectly() {
        let q = fixtures::computer_science_questionnaire();
        let kbs = cs_kb();
        let data: Vec<LabeledInstance> = synthesize_exact_dataset(&q)
            .into_iter()
            .filter(|s| s.separable)
            .map(|s| s.instance)
            .collect();
        let report = evaluate(&kbs, &data).unwrap();
        assert_eq!(report.accuracy_percent.to_string(), "100.00");
        assert_eq!(report.correct, report.total);
    }

    #[test]
    fn synthetic_dataset_of_empty_questionnaire_is_empty() {
        let q = Questionnaire::new(fixtures::computer_science_schema(), "hollow", vec![]).unwrap();
        assert!(synthesize_exact_dataset(&q).is_empty());
    }

    #[test]
    fn report_lines_are_tab_separated() {
        let kbs = cs_kb();
        let report = evaluate(&kbs, &fixtures::demo_dataset(25)).unwrap();
        let reports = vec![("computer-science".to_string(), report)];
        let summary = summarize(&reports).unwrap();
        assert_eq!(
            render_report_lines(&reports, Some(&summary)),
            "format = 1\ncomputer-science\t30\t25\t83.33\nmean\t-\t-\t83.33\n"
        );
        let text = render_report_text(&reports, None);
        assert!(text.contains("computer-science"));
        assert!(text.contains("83.33"));
    }
}
