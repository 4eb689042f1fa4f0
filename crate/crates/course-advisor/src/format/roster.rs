//! Roster files: one volunteer profile per record, comma-separated.
//!
//! ```text
//! format = 1
//! name,bsc,msc,phd,score,taught,label
//! F1,Hardware,AI,AI,AI:19+DB:20,NS+CN,AI
//! ```
//!
//! The header starts with `name`, continues with question names from the
//! governing schema (any order, each at most once, none required) and may
//! end with a `label` column carrying the known-correct course of each
//! record. `Non` marks an unanswered nominal question; an empty cell
//! marks an empty score or taught set. Score cells pack `course:value`
//! pairs and taught cells pack course ids, both joined with `+`.

use std::collections::BTreeSet;

use crate::format::span::{ParseError, SourceSpan};
use crate::format::{content_lines, format_directive, split_parts, Line};
use crate::model::{
    check_volunteer_name, CourseId, ModelError, QuestionKind, QuestionnaireSchema,
    ValidationMode, VolunteerProfile, Warning, validate_profile,
};

/// A parsed roster: profiles in record order, their labels when the file
/// has a `label` column, and any notes lenient validation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roster {
    pub profiles: Vec<VolunteerProfile>,
    /// One label per profile; `None` when the file has no label column.
    pub labels: Option<Vec<CourseId>>,
    pub warnings: Vec<RosterWarning>,
}

/// A [`Warning`] tied to the record (1-based) that produced it; `None`
/// marks a header-level warning such as a dropped unknown column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RosterWarning {
    pub record: Option<usize>,
    pub warning: Warning,
}

enum Column {
    Question(usize),
    Label,
    /// Unknown column dropped by lenient parsing.
    Skip,
}

pub fn parse_roster(
    text: &str,
    source: &str,
    schema: &QuestionnaireSchema,
    mode: ValidationMode,
) -> Result<Roster, ParseError> {
    let mut lines = content_lines(text);
    let mut header = lines.next();
    if let Some(line) = header {
        if let Some((off, version)) = format_directive(line.text) {
            if version != "1" {
                return Err(ParseError::syntax(
                    SourceSpan::of_token(source, line.number, line.text, off, version),
                    format!("unsupported format version {version:?}, expected 1"),
                ));
            }
            header = lines.next();
        }
    }
    let Some(header) = header else {
        return Err(ParseError::syntax(
            SourceSpan::at_end(source, text),
            "missing header line (name,<question>,...)",
        ));
    };

    let mut warnings = Vec::new();
    let columns = parse_header(source, schema, mode, header, &mut warnings)?;
    let has_label = columns
        .iter()
        .any(|c| matches!(c, Column::Label));

    let mut profiles = Vec::new();
    let mut labels = Vec::new();
    for line in lines {
        let record_no = profiles.len() + 1;
        let (profile, label) =
            parse_record(source, schema, mode, line, &columns, record_no, &mut warnings)?;
        profiles.push(profile);
        if let Some(label) = label {
            labels.push(label);
        }
    }
    Ok(Roster {
        profiles,
        labels: has_label.then_some(labels),
        warnings,
    })
}

fn parse_header(
    source: &str,
    schema: &QuestionnaireSchema,
    mode: ValidationMode,
    header: Line<'_>,
    warnings: &mut Vec<RosterWarning>,
) -> Result<Vec<Column>, ParseError> {
    let cells = split_parts(0, header.text, ',');
    let span = |off: usize, tok: &str| SourceSpan::of_token(source, header.number, header.text, off, tok);

    let (first_off, first) = cells[0];
    if first != "name" {
        return Err(ParseError::syntax(
            span(first_off, first),
            format!("the first column must be \"name\", found {first:?}"),
        ));
    }

    let mut columns = Vec::with_capacity(cells.len() - 1);
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for &(off, cell) in &cells[1..] {
        if cell.is_empty() {
            return Err(ParseError::syntax(span(off, cell), "empty column name"));
        }
        if !seen.insert(cell) {
            return Err(ParseError::syntax(
                span(off, cell),
                format!("duplicate column {cell:?}"),
            ));
        }
        if cell == "label" {
            columns.push(Column::Label);
        } else if let Some(index) = schema.questions().iter().position(|q| q.name() == cell) {
            columns.push(Column::Question(index));
        } else {
            match mode {
                ValidationMode::Strict => {
                    return Err(ParseError::invalid(
                        span(off, cell),
                        ModelError::UnknownQuestion {
                            question: cell.to_string(),
                        },
                    ));
                }
                ValidationMode::Lenient => {
                    warnings.push(RosterWarning {
                        record: None,
                        warning: Warning::DroppedAnswer {
                            question: cell.to_string(),
                        },
                    });
                    columns.push(Column::Skip);
                }
            }
        }
    }
    Ok(columns)
}

#[allow(clippy::too_many_arguments)]
fn parse_record(
    source: &str,
    schema: &QuestionnaireSchema,
    mode: ValidationMode,
    line: Line<'_>,
    columns: &[Column],
    record_no: usize,
    warnings: &mut Vec<RosterWarning>,
) -> Result<(VolunteerProfile, Option<CourseId>), ParseError> {
    let cells = split_parts(0, line.text, ',');
    let span = |off: usize, tok: &str| SourceSpan::of_token(source, line.number, line.text, off, tok);
    if cells.len() != columns.len() + 1 {
        return Err(ParseError::syntax(
            SourceSpan::of_line(source, line.number, line.text),
            format!(
                "expected {} comma-separated fields, found {}",
                columns.len() + 1,
                cells.len()
            ),
        ));
    }

    let (name_off, name) = cells[0];
    check_volunteer_name(name).map_err(|e| ParseError::invalid(span(name_off, name), e))?;
    let mut profile = VolunteerProfile::new(name);
    let mut label = None;

    for (column, &(off, cell)) in columns.iter().zip(&cells[1..]) {
        match column {
            Column::Skip => {}
            Column::Label => {
                if cell.is_empty() {
                    return Err(ParseError::syntax(span(off, cell), "label must not be empty"));
                }
                if !schema.is_course(cell) {
                    return Err(ParseError::invalid(
                        span(off, cell),
                        ModelError::UnknownCourse {
                            course: cell.to_string(),
                        },
                    ));
                }
                label = Some(CourseId::new(cell));
            }
            Column::Question(index) => {
                let question = &schema.questions()[*index];
                match question.kind() {
                    QuestionKind::Nominal { domain } => {
                        if cell.is_empty() {
                            return Err(ParseError::syntax(
                                span(off, cell),
                                "empty cell; write Non for an unanswered question",
                            ));
                        }
                        if cell == "Non" {
                            continue;
                        }
                        if !domain.iter().any(|l| l == cell) {
                            return Err(ParseError::invalid(
                                span(off, cell),
                                ModelError::UnknownLabel {
                                    question: question.name().to_string(),
                                    label: cell.to_string(),
                                },
                            ));
                        }
                        profile.nominal.insert(question.name().to_string(), cell.to_string());
                    }
                    QuestionKind::CourseScore { .. } => {
                        parse_score_cell(schema, mode, cell, off, line, source, &mut profile)?;
                    }
                    QuestionKind::CourseSet => {
                        parse_taught_cell(schema, mode, cell, off, line, source, &mut profile)?;
                    }
                }
            }
        }
    }

    // Inline checks make strict failures here unreachable, but the call
    // keeps every stored profile strict-clean and surfaces lenient drops.
    let (profile, profile_warnings) = validate_profile(profile, schema, mode).map_err(|e| {
        ParseError::invalid(SourceSpan::of_line(source, line.number, line.text), e)
    })?;
    warnings.extend(profile_warnings.into_iter().map(|warning| RosterWarning {
        record: Some(record_no),
        warning,
    }));
    Ok((profile, label))
}

fn parse_score_cell(
    schema: &QuestionnaireSchema,
    mode: ValidationMode,
    cell: &str,
    cell_off: usize,
    line: Line<'_>,
    source: &str,
    profile: &mut VolunteerProfile,
) -> Result<(), ParseError> {
    if cell.is_empty() {
        return Ok(());
    }
    for (part_off, part) in split_parts(cell_off, cell, '+') {
        let span = || SourceSpan::of_token(source, line.number, line.text, part_off, part);
        let Some((course, value)) = part.split_once(':') else {
            return Err(ParseError::syntax(
                span(),
                format!("expected <course>:<integer>, found {part:?}"),
            ));
        };
        let course = course.trim();
        let value: i64 = value.trim().parse().map_err(|_| {
            ParseError::syntax(span(), format!("expected <course>:<integer>, found {part:?}"))
        })?;
        if course.is_empty() {
            return Err(ParseError::syntax(span(), "missing course id before ':'"));
        }
        if mode == ValidationMode::Strict && !schema.is_course(course) {
            return Err(ParseError::invalid(
                span(),
                ModelError::UnknownCourse {
                    course: course.to_string(),
                },
            ));
        }
        // Repeating a pair (possibly from another score column) is
        // harmless; two different values for one course are not.
        if let Some(previous) = profile.scores.insert(course.to_string(), value) {
            if previous != value {
                return Err(ParseError::syntax(
                    span(),
                    format!("conflicting scores for course {course:?}: {previous} and {value}"),
                ));
            }
        }
    }
    Ok(())
}

fn parse_taught_cell(
    schema: &QuestionnaireSchema,
    mode: ValidationMode,
    cell: &str,
    cell_off: usize,
    line: Line<'_>,
    source: &str,
    profile: &mut VolunteerProfile,
) -> Result<(), ParseError> {
    if cell.is_empty() {
        return Ok(());
    }
    for (part_off, part) in split_parts(cell_off, cell, '+') {
        let span = || SourceSpan::of_token(source, line.number, line.text, part_off, part);
        if part.is_empty() {
            return Err(ParseError::syntax(span(), "expected a course id ('+' separates courses)"));
        }
        if mode == ValidationMode::Strict && !schema.is_course(part) {
            return Err(ParseError::invalid(
                span(),
                ModelError::UnknownCourse {
                    course: part.to_string(),
                },
            ));
        }
        profile.taught.insert(part.to_string());
    }
    Ok(())
}

/// Canonical text: versioned header, question columns in schema order, a
/// trailing `label` column when the roster carries labels, and score and
/// taught sets in schema course order.
///
/// A column can only carry what the schema asks about: scores are
/// written only if the schema has a score question, and the taught set
/// only if it has a course-set question. Profile data with no column is
/// omitted.
pub fn serialize_roster(roster: &Roster, schema: &QuestionnaireSchema) -> String {
    let mut out = String::from("format = 1\n");
    out.push_str("name");
    for question in schema.questions() {
        out.push(',');
        out.push_str(question.name());
    }
    if roster.labels.is_some() {
        out.push_str(",label");
    }
    out.push('\n');

    let labels = roster.labels.as_deref().unwrap_or(&[]);
    for (index, profile) in roster.profiles.iter().enumerate() {
        out.push_str(&profile.name);
        for question in schema.questions() {
            out.push(',');
            match question.kind() {
                QuestionKind::Nominal { .. } => {
                    out.push_str(profile.nominal.get(question.name()).map_or("Non", String::as_str));
                }
                QuestionKind::CourseScore { .. } => {
                    let pairs: Vec<String> = order_by_schema(schema, profile.scores.keys())
                        .into_iter()
                        .map(|course| format!("{course}:{}", profile.scores[course]))
                        .collect();
                    out.push_str(&pairs.join("+"));
                }
                QuestionKind::CourseSet => {
                    let courses: Vec<&str> = order_by_schema(schema, profile.taught.iter());
                    out.push_str(&courses.join("+"));
                }
            }
        }
        if let Some(label) = labels.get(index) {
            out.push(',');
            out.push_str(label.as_str());
        }
        out.push('\n');
    }
    out
}

/// Schema courses first in schema order, foreign ids after them in
/// lexicographic order; mirrors course-set cells in questionnaires.
fn order_by_schema<'a>(
    schema: &QuestionnaireSchema,
    keys: impl Iterator<Item = &'a String>,
) -> Vec<&'a str> {
    let mut ordered: Vec<&str> = keys.map(String::as_str).collect();
    ordered.sort_by_key(|k| (schema.course_index(k).unwrap_or(usize::MAX), *k));
    ordered
}
