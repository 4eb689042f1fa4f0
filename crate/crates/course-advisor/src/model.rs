//! Domain types: schemas, questionnaires, volunteer profiles, rules and
//! their validation against a closed answer universe.
//!
//! Everything here is immutable once validated, so values can be shared
//! freely across threads.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Course identifier. Cheap to clone; ordered and compared by its text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CourseId(Arc<str>);

impl CourseId {
    pub fn new(id: impl AsRef<str>) -> Self {
        CourseId(Arc::from(id.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CourseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for CourseId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for CourseId {
    fn from(s: &str) -> Self {
        CourseId::new(s)
    }
}

impl From<String> for CourseId {
    fn from(s: String) -> Self {
        CourseId(Arc::from(s))
    }
}

impl PartialEq<str> for CourseId {
    fn eq(&self, other: &str) -> bool {
        &*self.0 == other
    }
}

impl PartialEq<&str> for CourseId {
    fn eq(&self, other: &&str) -> bool {
        &*self.0 == *other
    }
}

/// What a question asks for and which answers it admits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuestionKind {
    /// One label out of a fixed domain.
    Nominal { domain: Vec<String> },
    /// A minimum score for the row's own course, inside `min..=max`.
    CourseScore { min: i64, max: i64 },
    /// A set of previously taught courses.
    CourseSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    name: String,
    kind: QuestionKind,
}

impl Question {
    pub fn nominal(name: impl Into<String>, domain: Vec<String>) -> Self {
        Question {
            name: name.into(),
            kind: QuestionKind::Nominal { domain },
        }
    }

    pub fn course_score(name: impl Into<String>, min: i64, max: i64) -> Self {
        Question {
            name: name.into(),
            kind: QuestionKind::CourseScore { min, max },
        }
    }

    pub fn course_set(name: impl Into<String>) -> Self {
        Question {
            name: name.into(),
            kind: QuestionKind::CourseSet,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &QuestionKind {
        &self.kind
    }
}

/// An expert's questionnaire layout: which courses exist and which
/// questions every row answers. Course and question order is declaration
/// order and is significant (tie-breaking and antecedent order follow it).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionnaireSchema {
    department: String,
    courses: Vec<CourseId>,
    questions: Vec<Question>,
}

impl QuestionnaireSchema {
    pub fn new(
        department: impl Into<String>,
        courses: Vec<CourseId>,
        questions: Vec<Question>,
    ) -> Result<Self, ModelError> {
        let schema = QuestionnaireSchema {
            department: department.into(),
            courses,
            questions,
        };
        validate_schema(&schema)?;
        Ok(schema)
    }

    pub fn department(&self) -> &str {
        &self.department
    }

    pub fn courses(&self) -> &[CourseId] {
        &self.courses
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn question_count(&self) -> usize {
        self.questions.len()
    }

    pub fn course_index(&self, id: &str) -> Option<usize> {
        self.courses.iter().position(|c| c.as_str() == id)
    }

    pub fn is_course(&self, id: &str) -> bool {
        self.course_index(id).is_some()
    }

    pub fn question(&self, name: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.name() == name)
    }
}

/// One answered cell of a questionnaire row.
///
/// A nominal cell may carry several alternatives ("this course suits a
/// lecturer with an AD *or* an AI degree"); the compiler expands each
/// alternative into its own rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Nominal(Vec<String>),
    Score(i64),
    Courses(BTreeSet<CourseId>),
}

impl Cell {
    pub fn nominal(labels: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Cell::Nominal(labels.into_iter().map(Into::into).collect())
    }

    pub fn score(value: i64) -> Self {
        Cell::Score(value)
    }

    pub fn courses(ids: impl IntoIterator<Item = impl Into<CourseId>>) -> Self {
        Cell::Courses(ids.into_iter().map(Into::into).collect())
    }

    /// Number of single-valued alternatives this cell expands into.
    pub fn alternative_count(&self) -> usize {
        match self {
            Cell::Nominal(labels) => labels.len(),
            Cell::Score(_) | Cell::Courses(_) => 1,
        }
    }
}

/// One course's row: its cells in question order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    course: CourseId,
    cells: Vec<Cell>,
}

impl Row {
    pub fn new(course: impl Into<CourseId>, cells: Vec<Cell>) -> Self {
        Row {
            course: course.into(),
            cells,
        }
    }

    pub fn course(&self) -> &CourseId {
        &self.course
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
}

/// A fully validated expert questionnaire: schema plus at most one row
/// per course. Rows are normalized to schema course order and nominal
/// alternatives are de-duplicated, so equal knowledge compares equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Questionnaire {
    schema: QuestionnaireSchema,
    expert_id: String,
    rows: Vec<Row>,
}

impl Questionnaire {
    pub fn new(
        schema: QuestionnaireSchema,
        expert_id: impl Into<String>,
        rows: Vec<Row>,
    ) -> Result<Self, ModelError> {
        let expert_id = expert_id.into();
        check_identifier("expert id", &expert_id)?;

        let mut seen: BTreeSet<CourseId> = BTreeSet::new();
        let mut normalized = Vec::with_capacity(rows.len());
        for row in rows {
            if !schema.is_course(row.course.as_str()) {
                return Err(ModelError::UnknownCourse {
                    course: row.course.to_string(),
                });
            }
            if !seen.insert(row.course.clone()) {
                return Err(ModelError::DuplicateRow {
                    course: row.course.clone(),
                });
            }
            if row.cells.len() != schema.question_count() {
                return Err(ModelError::ArityMismatch {
                    course: row.course.clone(),
                    expected: schema.question_count(),
                    found: row.cells.len(),
                });
            }
            let mut cells = Vec::with_capacity(row.cells.len());
            for (question, cell) in schema.questions().iter().zip(row.cells) {
                cells.push(normalize_cell(&schema, question, &row.course, cell)?);
            }
            normalized.push(Row {
                course: row.course,
                cells,
            });
        }
        // Canonical row order is schema course order.
        normalized.sort_by_key(|row| schema.course_index(row.course.as_str()));
        Ok(Questionnaire {
            schema,
            expert_id,
            rows: normalized,
        })
    }

    pub fn schema(&self) -> &QuestionnaireSchema {
        &self.schema
    }

    pub fn expert_id(&self) -> &str {
        &self.expert_id
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, course: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.course.as_str() == course)
    }
}

pub(crate) fn normalize_cell(
    schema: &QuestionnaireSchema,
    question: &Question,
    course: &CourseId,
    cell: Cell,
) -> Result<Cell, ModelError> {
    match (question.kind(), cell) {
        (QuestionKind::Nominal { domain }, Cell::Nominal(labels)) => {
            if labels.is_empty() {
                return Err(ModelError::EmptyDomain {
                    element: format!("cell for question {:?} in row {}", question.name(), course),
                });
            }
            let mut unique: Vec<String> = Vec::with_capacity(labels.len());
            for label in labels {
                if !domain.contains(&label) {
                    return Err(ModelError::UnknownLabel {
                        question: question.name().to_string(),
                        label,
                    });
                }
                if !unique.contains(&label) {
                    unique.push(label);
                }
            }
            Ok(Cell::Nominal(unique))
        }
        (QuestionKind::CourseScore { min, max }, Cell::Score(value)) => {
            if value < *min || value > *max {
                return Err(ModelError::ScoreOutOfRange {
                    question: question.name().to_string(),
                    value,
                    min: *min,
                    max: *max,
                });
            }
            Ok(Cell::Score(value))
        }
        (QuestionKind::CourseSet, Cell::Courses(set)) => {
            if set.is_empty() {
                return Err(ModelError::EmptyDomain {
                    element: format!("cell for question {:?} in row {}", question.name(), course),
                });
            }
            for member in &set {
                if !schema.is_course(member.as_str()) {
                    return Err(ModelError::UnknownCourse {
                        course: member.to_string(),
                    });
                }
            }
            Ok(Cell::Courses(set))
        }
        (_, _) => Err(ModelError::CellKindMismatch {
            question: question.name().to_string(),
            course: course.clone(),
        }),
    }
}

/// A candidate lecturer's answers. This is raw input: run it through
/// [`validate_profile`] before scoring. A nominal question with no entry
/// counts as the distinguished "no answer" value, which never matches
/// any rule antecedent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VolunteerProfile {
    pub name: String,
    /// question name -> chosen label; absence means "no answer".
    pub nominal: BTreeMap<String, String>,
    /// course -> self-reported score. May be partial.
    pub scores: BTreeMap<String, i64>,
    /// Courses the volunteer has taught before.
    pub taught: BTreeSet<String>,
}

impl VolunteerProfile {
    pub fn new(name: impl Into<String>) -> Self {
        VolunteerProfile {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_answer(mut self, question: impl Into<String>, label: impl Into<String>) -> Self {
        self.nominal.insert(question.into(), label.into());
        self
    }

    pub fn with_score(mut self, course: impl Into<String>, score: i64) -> Self {
        self.scores.insert(course.into(), score);
        self
    }

    pub fn with_taught(mut self, course: impl Into<String>) -> Self {
        self.taught.insert(course.into());
        self
    }

    /// The volunteer's answer to a nominal question, or `None` for the
    /// distinguished "no answer" value.
    pub fn answer(&self, question: &str) -> Option<&str> {
        self.nominal.get(question).map(String::as_str)
    }
}

/// How unknown keys in a profile are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    /// Reject anything outside the schema universe.
    Strict,
    /// Drop unknown course and question keys, recording one warning per
    /// drop. Unknown labels for known questions are still rejected.
    Lenient,
}

/// A non-fatal note produced by lenient validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    DroppedScore { course: String },
    DroppedTaught { course: String },
    DroppedAnswer { question: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DroppedScore { course } => {
                write!(f, "dropped score for unknown course {course:?}")
            }
            Warning::DroppedTaught { course } => {
                write!(f, "dropped unknown taught course {course:?}")
            }
            Warning::DroppedAnswer { question } => {
                write!(f, "dropped answer for unknown question {question:?}")
            }
        }
    }
}

/// Checks a profile against the schema universe.
///
/// Strict mode rejects unknown labels, courses and question keys.
/// Lenient mode drops unknown course/question keys with a warning per
/// drop; unknown labels for known nominal questions are rejected in both
/// modes. The returned profile always passes strict validation.
pub fn validate_profile(
    profile: VolunteerProfile,
    schema: &QuestionnaireSchema,
    mode: ValidationMode,
) -> Result<(VolunteerProfile, Vec<Warning>), ModelError> {
    check_volunteer_name(&profile.name)?;
    let mut warnings = Vec::new();
    let mut out = VolunteerProfile::new(profile.name.clone());

    for (question, label) in profile.nominal {
        match schema.question(&question).map(Question::kind) {
            Some(QuestionKind::Nominal { domain }) => {
                if !domain.contains(&label) {
                    return Err(ModelError::UnknownLabel { question, label });
                }
                out.nominal.insert(question, label);
            }
            _ => match mode {
                ValidationMode::Strict => return Err(ModelError::UnknownQuestion { question }),
                ValidationMode::Lenient => warnings.push(Warning::DroppedAnswer { question }),
            },
        }
    }
    for (course, score) in profile.scores {
        if schema.is_course(&course) {
            out.scores.insert(course, score);
        } else {
            match mode {
                ValidationMode::Strict => return Err(ModelError::UnknownCourse { course }),
                ValidationMode::Lenient => warnings.push(Warning::DroppedScore { course }),
            }
        }
    }
    for course in profile.taught {
        if schema.is_course(&course) {
            out.taught.insert(course);
        } else {
            match mode {
                ValidationMode::Strict => return Err(ModelError::UnknownCourse { course }),
                ValidationMode::Lenient => warnings.push(Warning::DroppedTaught { course }),
            }
        }
    }
    Ok((out, warnings))
}

/// One testable condition of a rule. Evaluation is total: every
/// antecedent yields true or false for every profile, never an error.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Antecedent {
    /// The volunteer answered `question` with exactly `label`.
    NominalEquals { question: String, label: String },
    /// The volunteer's score for `course` is present and at least
    /// `threshold`. The course is always the owning rule's posterior.
    ScoreAtLeast { course: CourseId, threshold: i64 },
    /// The volunteer has taught every course in `courses`.
    TaughtSuperset { courses: BTreeSet<CourseId> },
}

/// Where a rule came from: which expert, and its 1-based position in
/// that expert's extracted set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleOrigin {
    pub expert_id: String,
    pub index: usize,
}

/// A flat compiled rule: one antecedent per question, in question order,
/// plus the course it recommends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    antecedents: Vec<Antecedent>,
    posterior: CourseId,
    origin: RuleOrigin,
}

impl Rule {
    pub fn new(antecedents: Vec<Antecedent>, posterior: impl Into<CourseId>, origin: RuleOrigin) -> Self {
        Rule {
            antecedents,
            posterior: posterior.into(),
            origin,
        }
    }

    pub fn antecedents(&self) -> &[Antecedent] {
        &self.antecedents
    }

    pub fn posterior(&self) -> &CourseId {
        &self.posterior
    }

    pub fn origin(&self) -> &RuleOrigin {
        &self.origin
    }

    pub fn arity(&self) -> usize {
        self.antecedents.len()
    }

    /// True when both rules test the same conditions for the same course,
    /// regardless of where they were extracted.
    pub fn same_shape(&self, other: &Rule) -> bool {
        self.posterior == other.posterior && self.antecedents == other.antecedents
    }
}

/// Validates schema invariants: nonempty unique courses and questions,
/// nonempty nominal domains, sane score ranges, identifier lexics.
pub fn validate_schema(schema: &QuestionnaireSchema) -> Result<(), ModelError> {
    check_department(&schema.department)?;
    if schema.courses.is_empty() {
        return Err(ModelError::EmptyDomain {
            element: "courses".to_string(),
        });
    }
    let mut seen_courses: BTreeSet<&str> = BTreeSet::new();
    for course in &schema.courses {
        check_identifier("course id", course.as_str())?;
        if !seen_courses.insert(course.as_str()) {
            return Err(ModelError::DuplicateCourse {
                course: course.clone(),
            });
        }
    }

    if schema.questions.is_empty() {
        return Err(ModelError::EmptyDomain {
            element: "questions".to_string(),
        });
    }
    let mut seen_questions: BTreeSet<&str> = BTreeSet::new();
    for question in &schema.questions {
        check_question_name(question.name())?;
        if !seen_questions.insert(question.name()) {
            return Err(ModelError::DuplicateQuestion {
                question: question.name().to_string(),
            });
        }
        match question.kind() {
            QuestionKind::Nominal { domain } => {
                if domain.is_empty() {
                    return Err(ModelError::EmptyDomain {
                        element: format!("domain of question {:?}", question.name()),
                    });
                }
                let mut seen_labels: BTreeSet<&str> = BTreeSet::new();
                for label in domain {
                    check_label(question.name(), label)?;
                    if !seen_labels.insert(label.as_str()) {
                        return Err(ModelError::DuplicateLabel {
                            question: question.name().to_string(),
                            label: label.clone(),
                        });
                    }
                }
            }
            QuestionKind::CourseScore { min, max } => {
                if min >= max {
                    return Err(ModelError::BadScoreRange {
                        question: question.name().to_string(),
                        min: *min,
                        max: *max,
                    });
                }
            }
            QuestionKind::CourseSet => {}
        }
    }
    Ok(())
}

/// Lexical rule for course ids, question names and expert ids: nonempty,
/// and built from letters, digits, `_`, `-`, `.` only. This keeps every
/// valid value representable in the text formats.
pub(crate) fn check_identifier(what: &str, value: &str) -> Result<(), ModelError> {
    let bad = |reason: &str| ModelError::BadIdentifier {
        what: what.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    };
    if value.is_empty() {
        return Err(bad("must not be empty"));
    }
    if !value
        .chars()
        .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
    {
        return Err(bad("only letters, digits, '_', '-' and '.' are allowed"));
    }
    Ok(())
}

/// Question names obey identifier lexics and avoid the roster column
/// names that are not questions.
pub(crate) fn check_question_name(name: &str) -> Result<(), ModelError> {
    check_identifier("question name", name)?;
    if matches!(name, "name" | "label") {
        return Err(ModelError::BadIdentifier {
            what: "question name".to_string(),
            value: name.to_string(),
            reason: "reserved roster column name".to_string(),
        });
    }
    Ok(())
}

/// Lexical rule for nominal labels: nonempty, trimmed, free of the text
/// formats' separator characters, and not the reserved "no answer" token.
pub(crate) fn check_label(question: &str, label: &str) -> Result<(), ModelError> {
    let bad = |reason: &str| ModelError::BadIdentifier {
        what: format!("label in question {question:?}"),
        value: label.to_string(),
        reason: reason.to_string(),
    };
    if label.is_empty() {
        return Err(bad("must not be empty"));
    }
    if label.trim() != label {
        return Err(bad("must not start or end with whitespace"));
    }
    if label.chars().any(|c| matches!(c, ',' | ';' | '|' | '/' | '+' | ':' | '#') || c.is_control()) {
        return Err(bad("separator characters are not allowed"));
    }
    if label == "Non" || label == "None" {
        return Err(bad("reserved for the \"no answer\" value"));
    }
    Ok(())
}

/// Department names are free text but must survive a text round trip:
/// nonempty, trimmed, single-line, and not mistakable for a comment.
pub(crate) fn check_department(name: &str) -> Result<(), ModelError> {
    let bad = |reason: &str| ModelError::BadIdentifier {
        what: "department".to_string(),
        value: name.to_string(),
        reason: reason.to_string(),
    };
    if name.is_empty() {
        return Err(bad("must not be empty"));
    }
    if name.trim() != name {
        return Err(bad("must not start or end with whitespace"));
    }
    if name.starts_with('#') {
        return Err(bad("must not start with '#'"));
    }
    if name.chars().any(char::is_control) {
        return Err(bad("control characters are not allowed"));
    }
    Ok(())
}

pub(crate) fn check_volunteer_name(name: &str) -> Result<(), ModelError> {
    let bad = |reason: &str| ModelError::BadIdentifier {
        what: "volunteer name".to_string(),
        value: name.to_string(),
        reason: reason.to_string(),
    };
    if name.is_empty() {
        return Err(bad("must not be empty"));
    }
    if name.trim() != name {
        return Err(bad("must not start or end with whitespace"));
    }
    if name.starts_with('#') {
        return Err(bad("must not start with '#'"));
    }
    if name.chars().any(|c| c == ',' || c.is_control()) {
        return Err(bad("commas and control characters are not allowed"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate course {course}")]
    DuplicateCourse { course: CourseId },
    #[error("duplicate question {question:?}")]
    DuplicateQuestion { question: String },
    #[error("duplicate label {label:?} in question {question:?}")]
    DuplicateLabel { question: String, label: String },
    #[error("{element} must not be empty")]
    EmptyDomain { element: String },
    #[error("question {question:?}: score range {min}..{max} is empty")]
    BadScoreRange { question: String, min: i64, max: i64 },
    #[error("invalid {what} {value:?}: {reason}")]
    BadIdentifier {
        what: String,
        value: String,
        reason: String,
    },
    #[error("unknown label {label:?} for question {question:?}")]
    UnknownLabel { question: String, label: String },
    #[error("unknown course {course:?}")]
    UnknownCourse { course: String },
    #[error("unknown question {question:?}")]
    UnknownQuestion { question: String },
    #[error("row {course}: expected {expected} cells, found {found}")]
    ArityMismatch {
        course: CourseId,
        expected: usize,
        found: usize,
    },
    #[error("question {question:?}: score {value} outside {min}..{max}")]
    ScoreOutOfRange {
        question: String,
        value: i64,
        min: i64,
        max: i64,
    },
    #[error("duplicate row for course {course}")]
    DuplicateRow { course: CourseId },
    #[error("row {course}: cell kind does not match question {question:?}")]
    CellKindMismatch { question: String, course: CourseId },
}
