//! Questionnaire files: one expert's schema and course rows.
//!
//! ```text
//! format = 1
//! department = Computer Science
//! expert = expert1
//! course AI
//! question bsc nominal Software|Hardware
//! question score score 10..20
//! question taught courseset
//! row AI : Software ; 18 ; AI+AD
//! ```
//!
//! Sections appear in that order: header lines, then courses, then
//! questions, then rows. Nominal cells separate alternatives with `/`,
//! course sets with `+`. Whitespace around separators is insignificant
//! on input; serialization emits the canonical spacing shown above.

use crate::format::span::{ParseError, SourceSpan};
use crate::format::{content_lines, format_directive, split_parts, trim_in_line, Line};
use crate::model::{
    check_identifier, check_label, check_question_name, normalize_cell, Cell, CourseId, ModelError,
    Question, QuestionKind, Questionnaire, QuestionnaireSchema, Row,
};

/// Ordered file sections; a directive may never step backwards.
const SECTION_NAMES: [&str; 4] = ["header", "course", "question", "row"];

struct Parser<'a> {
    source: &'a str,
    department: Option<String>,
    expert: Option<String>,
    courses: Vec<CourseId>,
    questions: Vec<Question>,
    schema: Option<QuestionnaireSchema>,
    rows: Vec<Row>,
    section: usize,
}

pub fn parse_questionnaire(text: &str, source: &str) -> Result<Questionnaire, ParseError> {
    let mut parser = Parser {
        source,
        department: None,
        expert: None,
        courses: Vec::new(),
        questions: Vec::new(),
        schema: None,
        rows: Vec::new(),
        section: 0,
    };
    let mut first_line = true;
    for line in content_lines(text) {
        parser.directive(line, first_line)?;
        first_line = false;
    }
    parser.finish(text)
}

impl<'a> Parser<'a> {
    fn directive(&mut self, line: Line<'_>, first_line: bool) -> Result<(), ParseError> {
        if let Some((off, version)) = format_directive(line.text) {
            if !first_line {
                return Err(self.syntax(line, "format directive must be the first line"));
            }
            if version != "1" {
                return Err(ParseError::syntax(
                    self.token_span(line, off, version),
                    format!("unsupported format version {version:?}, expected 1"),
                ));
            }
            return Ok(());
        }

        // The directive keyword ends at whitespace or '=' so spacing
        // around header '=' signs stays optional.
        let trimmed = line.text.trim_start();
        let kw_off = line.text.len() - trimmed.len();
        let kw_len = trimmed
            .find(|c: char| c.is_whitespace() || c == '=')
            .unwrap_or(trimmed.len());
        let keyword = &trimmed[..kw_len];
        let rest_off = kw_off + kw_len;
        let rest = &line.text[rest_off..];
        match keyword {
            "department" => self.header_assignment(line, rest_off, rest, HeaderField::Department),
            "expert" => self.header_assignment(line, rest_off, rest, HeaderField::Expert),
            "course" => self.course(line, rest_off, rest),
            "question" => self.question(line, rest_off, rest),
            "row" => self.row(line, rest_off, rest),
            other => Err(ParseError::syntax(
                self.token_span(line, kw_off, other),
                format!("unknown directive {other:?}"),
            )),
        }
    }

    fn enter_section(&mut self, line: Line<'_>, section: usize) -> Result<(), ParseError> {
        if section < self.section {
            return Err(self.syntax(
                line,
                format!(
                    "{} lines must come before {} lines",
                    SECTION_NAMES[section], SECTION_NAMES[self.section]
                ),
            ));
        }
        self.section = section;
        Ok(())
    }

    fn header_assignment(
        &mut self,
        line: Line<'_>,
        rest_off: usize,
        rest: &str,
        field: HeaderField,
    ) -> Result<(), ParseError> {
        self.enter_section(line, 0)?;
        let name = field.name();
        let (eq_off, eq_rest) = trim_in_line(rest_off, rest);
        let Some(value) = eq_rest.strip_prefix('=') else {
            return Err(self.syntax(line, format!("expected '=' after {name:?}")));
        };
        let (value_off, value) = trim_in_line(eq_off + 1, value);
        if value.is_empty() {
            return Err(self.syntax(line, format!("{name} must not be empty")));
        }
        let declared = match field {
            HeaderField::Department => self.department.is_some(),
            HeaderField::Expert => self.expert.is_some(),
        };
        if declared {
            return Err(self.syntax(line, format!("{name} declared twice")));
        }
        if let HeaderField::Expert = field {
            check_identifier("expert id", value)
                .map_err(|e| ParseError::invalid(self.token_span(line, value_off, value), e))?;
        }
        match field {
            HeaderField::Department => self.department = Some(value.to_string()),
            HeaderField::Expert => self.expert = Some(value.to_string()),
        }
        Ok(())
    }

    fn course(&mut self, line: Line<'_>, rest_off: usize, rest: &str) -> Result<(), ParseError> {
        self.enter_section(line, 1)?;
        let (id_off, id) = trim_in_line(rest_off, rest);
        let span = || self.token_span(line, id_off, id);
        check_identifier("course id", id).map_err(|e| ParseError::invalid(span(), e))?;
        if self.courses.iter().any(|c| c.as_str() == id) {
            return Err(ParseError::invalid(
                span(),
                ModelError::DuplicateCourse {
                    course: CourseId::new(id),
                },
            ));
        }
        self.courses.push(CourseId::new(id));
        Ok(())
    }

    fn question(&mut self, line: Line<'_>, rest_off: usize, rest: &str) -> Result<(), ParseError> {
        self.enter_section(line, 2)?;
        let _ = rest;
        let Some((name_off, name, kind_off, _)) = next_token(line.text, rest_off) else {
            return Err(self.syntax(line, "expected a question name"));
        };
        check_question_name(name)
            .map_err(|e| ParseError::invalid(self.token_span(line, name_off, name), e))?;
        if self.questions.iter().any(|q| q.name() == name) {
            return Err(ParseError::invalid(
                self.token_span(line, name_off, name),
                ModelError::DuplicateQuestion {
                    question: name.to_string(),
                },
            ));
        }
        let Some((kw_off, kind_kw, detail_off, detail)) = next_token(line.text, kind_off) else {
            return Err(self.syntax(line, "expected a question kind: nominal, score or courseset"));
        };
        let question = match kind_kw {
            "nominal" => self.nominal_question(line, name, detail_off, detail)?,
            "score" => self.score_question(line, name, detail_off, detail)?,
            "courseset" => {
                let (_, extra) = trim_in_line(detail_off, detail);
                if !extra.is_empty() {
                    return Err(self.syntax(line, "unexpected text after 'courseset'"));
                }
                Question::course_set(name)
            }
            other => {
                return Err(ParseError::syntax(
                    self.token_span(line, kw_off, other),
                    format!("unknown question kind {other:?}, expected nominal, score or courseset"),
                ));
            }
        };
        self.questions.push(question);
        Ok(())
    }

    fn nominal_question(
        &self,
        line: Line<'_>,
        name: &str,
        detail_off: usize,
        detail: &str,
    ) -> Result<Question, ParseError> {
        let mut domain: Vec<String> = Vec::new();
        for (label_off, label) in split_parts(detail_off, detail, '|') {
            let span = || self.token_span(line, label_off, label);
            if label.is_empty() {
                return Err(ParseError::syntax(
                    span(),
                    "nominal question needs '|'-separated labels",
                ));
            }
            check_label(name, label).map_err(|e| ParseError::invalid(span(), e))?;
            if domain.iter().any(|l| l == label) {
                return Err(ParseError::invalid(
                    span(),
                    ModelError::DuplicateLabel {
                        question: name.to_string(),
                        label: label.to_string(),
                    },
                ));
            }
            domain.push(label.to_string());
        }
        Ok(Question::nominal(name, domain))
    }

    fn score_question(
        &self,
        line: Line<'_>,
        name: &str,
        detail_off: usize,
        detail: &str,
    ) -> Result<Question, ParseError> {
        let (range_off, range) = trim_in_line(detail_off, detail);
        let span = || self.token_span(line, range_off, range);
        let Some(dots) = range.find("..") else {
            return Err(ParseError::syntax(span(), "expected a range like 10..20"));
        };
        let min: i64 = range[..dots]
            .trim()
            .parse()
            .map_err(|_| ParseError::syntax(span(), "expected a range like 10..20"))?;
        let max: i64 = range[dots + 2..]
            .trim()
            .parse()
            .map_err(|_| ParseError::syntax(span(), "expected a range like 10..20"))?;
        if min >= max {
            return Err(ParseError::invalid(
                span(),
                ModelError::BadScoreRange {
                    question: name.to_string(),
                    min,
                    max,
                },
            ));
        }
        Ok(Question::course_score(name, min, max))
    }

    fn row(&mut self, line: Line<'_>, rest_off: usize, rest: &str) -> Result<(), ParseError> {
        self.enter_section(line, 3)?;
        if self.schema.is_none() {
            self.schema = Some(self.build_schema(|msg| self.syntax(line, msg))?);
        }
        let schema = self.schema.as_ref().expect("schema was just built");

        let Some(colon) = rest.find(':') else {
            return Err(self.syntax(line, "expected ':' between the row course and its cells"));
        };
        let (course_off, course_id) = trim_in_line(rest_off, &rest[..colon]);
        let course_span = self.token_span(line, course_off, course_id);
        if course_id.is_empty() {
            return Err(ParseError::syntax(course_span, "expected a course id"));
        }
        let Some(course) = schema
            .courses()
            .iter()
            .find(|c| c.as_str() == course_id)
            .cloned()
        else {
            return Err(ParseError::invalid(
                course_span,
                ModelError::UnknownCourse {
                    course: course_id.to_string(),
                },
            ));
        };
        if self.rows.iter().any(|r| r.course() == &course) {
            return Err(ParseError::invalid(
                course_span,
                ModelError::DuplicateRow { course },
            ));
        }

        let cells_off = rest_off + colon + 1;
        let cell_texts = split_parts(cells_off, &rest[colon + 1..], ';');
        if cell_texts.len() != schema.question_count() {
            return Err(ParseError::invalid(
                SourceSpan::of_line(self.source, line.number, line.text),
                ModelError::ArityMismatch {
                    course,
                    expected: schema.question_count(),
                    found: cell_texts.len(),
                },
            ));
        }
        let mut cells = Vec::with_capacity(cell_texts.len());
        for (question, (cell_off, cell_text)) in schema.questions().iter().zip(cell_texts) {
            let raw = self.parse_cell(line, question, cell_off, cell_text)?;
            let cell = normalize_cell(schema, question, &course, raw).map_err(|e| {
                ParseError::invalid(self.cell_error_span(line, cell_off, cell_text, &e), e)
            })?;
            cells.push(cell);
        }
        self.rows.push(Row::new(course, cells));
        Ok(())
    }

    /// Structural cell parse; domain membership is checked afterwards.
    fn parse_cell(
        &self,
        line: Line<'_>,
        question: &Question,
        cell_off: usize,
        cell_text: &str,
    ) -> Result<Cell, ParseError> {
        match question.kind() {
            QuestionKind::Nominal { .. } => {
                let mut labels = Vec::new();
                for (alt_off, alt) in split_parts(cell_off, cell_text, '/') {
                    if alt.is_empty() {
                        return Err(ParseError::syntax(
                            self.token_span(line, alt_off, alt),
                            "expected a label ('/' separates alternatives)",
                        ));
                    }
                    labels.push(alt.to_string());
                }
                Ok(Cell::Nominal(labels))
            }
            QuestionKind::CourseScore { .. } => {
                let value: i64 = cell_text.parse().map_err(|_| {
                    ParseError::syntax(
                        self.token_span(line, cell_off, cell_text),
                        format!("expected an integer score, found {cell_text:?}"),
                    )
                })?;
                Ok(Cell::Score(value))
            }
            QuestionKind::CourseSet => {
                if cell_text.is_empty() {
                    // Leave membership and emptiness to the model check.
                    return Ok(Cell::Courses(Default::default()));
                }
                let mut set = std::collections::BTreeSet::new();
                for (part_off, part) in split_parts(cell_off, cell_text, '+') {
                    if part.is_empty() {
                        return Err(ParseError::syntax(
                            self.token_span(line, part_off, part),
                            "expected a course id ('+' separates courses)",
                        ));
                    }
                    set.insert(CourseId::new(part));
                }
                Ok(Cell::Courses(set))
            }
        }
    }

    /// Narrows a cell-level model error to the offending alternative or
    /// course when one of them names it; otherwise spans the whole cell.
    fn cell_error_span(
        &self,
        line: Line<'_>,
        cell_off: usize,
        cell_text: &str,
        error: &ModelError,
    ) -> SourceSpan {
        let culprit = match error {
            ModelError::UnknownLabel { label, .. } => Some(label.as_str()),
            ModelError::UnknownCourse { course } => Some(course.as_str()),
            _ => None,
        };
        if let Some(token) = culprit {
            for (part_off, part) in split_parts(cell_off, cell_text, '/')
                .into_iter()
                .chain(split_parts(cell_off, cell_text, '+'))
            {
                if part == token {
                    return self.token_span(line, part_off, part);
                }
            }
        }
        self.token_span(line, cell_off, cell_text)
    }

    fn build_schema(
        &self,
        missing: impl Fn(String) -> ParseError,
    ) -> Result<QuestionnaireSchema, ParseError> {
        let department = self
            .department
            .clone()
            .ok_or_else(|| missing("missing 'department = <text>' line".to_string()))?;
        if self.expert.is_none() {
            return Err(missing("missing 'expert = <id>' line".to_string()));
        }
        if self.courses.is_empty() {
            return Err(missing("at least one 'course <id>' line is required".to_string()));
        }
        if self.questions.is_empty() {
            return Err(missing(
                "at least one 'question <name> ...' line is required".to_string(),
            ));
        }
        QuestionnaireSchema::new(department, self.courses.clone(), self.questions.clone())
            .map_err(|e| missing(e.to_string()))
    }

    fn finish(mut self, text: &str) -> Result<Questionnaire, ParseError> {
        let at_end = || SourceSpan::at_end(self.source, text);
        if self.schema.is_none() {
            self.schema = Some(self.build_schema(|msg| ParseError::syntax(at_end(), msg))?);
        }
        let schema = self.schema.take().expect("schema was just built");
        let expert = self.expert.take().expect("checked in build_schema");
        Questionnaire::new(schema, expert, self.rows)
            .map_err(|e| ParseError::invalid(at_end(), e))
    }

    fn syntax(&self, line: Line<'_>, message: impl Into<String>) -> ParseError {
        ParseError::syntax(
            SourceSpan::of_line(self.source, line.number, line.text),
            message,
        )
    }

    fn token_span(&self, line: Line<'_>, byte_off: usize, token: &str) -> SourceSpan {
        SourceSpan::of_token(self.source, line.number, line.text, byte_off, token)
    }
}

enum HeaderField {
    Department,
    Expert,
}

impl HeaderField {
    fn name(&self) -> &'static str {
        match self {
            HeaderField::Department => "department",
            HeaderField::Expert => "expert",
        }
    }
}

/// Next whitespace-delimited token of `text` starting at byte `from`:
/// (token offset, token, offset after token, rest).
fn next_token(text: &str, from: usize) -> Option<(usize, &str, usize, &str)> {
    let piece = &text[from..];
    let start = from + (piece.len() - piece.trim_start().len());
    let token = &text[start..];
    if token.is_empty() {
        return None;
    }
    let end = token
        .find(char::is_whitespace)
        .map_or(text.len(), |i| start + i);
    Some((start, &text[start..end], end, &text[end..]))
}

/// Canonical text: versioned header, then courses, questions and rows
/// in schema order, with single spaces around `=`, `:` and `;` and
/// compact `|`, `/`, `+` and `..` separators.
pub fn serialize_questionnaire(q: &Questionnaire) -> String {
    let schema = q.schema();
    let mut out = String::from("format = 1\n");
    out.push_str(&format!("department = {}\n", schema.department()));
    out.push_str(&format!("expert = {}\n", q.expert_id()));
    for course in schema.courses() {
        out.push_str(&format!("course {course}\n"));
    }
    for question in schema.questions() {
        let line = match question.kind() {
            QuestionKind::Nominal { domain } => {
                format!("question {} nominal {}\n", question.name(), domain.join("|"))
            }
            QuestionKind::CourseScore { min, max } => {
                format!("question {} score {min}..{max}\n", question.name())
            }
            QuestionKind::CourseSet => format!("question {} courseset\n", question.name()),
        };
        out.push_str(&line);
    }
    for row in q.rows() {
        let cells: Vec<String> = row
            .cells()
            .iter()
            .map(|cell| cell_text(schema, cell))
            .collect();
        out.push_str(&format!("row {} : {}\n", row.course(), cells.join(" ; ")));
    }
    out
}

fn cell_text(schema: &QuestionnaireSchema, cell: &Cell) -> String {
    match cell {
        Cell::Nominal(labels) => labels.join("/"),
        Cell::Score(value) => value.to_string(),
        Cell::Courses(set) => join_courses_in_schema_order(schema, set.iter()),
    }
}

/// Joins courses with `+`, schema courses first in schema order, any
/// foreign ids after them in lexicographic order.
pub(crate) fn join_courses_in_schema_order<'a>(
    schema: &QuestionnaireSchema,
    courses: impl Iterator<Item = &'a CourseId> + Clone,
) -> String {
    let mut ordered: Vec<&CourseId> = courses.collect();
    ordered.sort_by_key(|c| {
        (
            schema.course_index(c.as_str()).unwrap_or(usize::MAX),
            c.as_str(),
        )
    });
    ordered
        .iter()
        .map(|c| c.as_str())
        .collect::<Vec<_>>()
        .join("+")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::format::ParseErrorKind;

    fn parse(text: &str) -> Result<Questionnaire, ParseError> {
        parse_questionnaire(text, "test.questionnaire")
    }

    #[test]
    fn fixture_file_parses_to_the_fixture_questionnaire() {
        let q = parse(fixtures::COMPUTER_SCIENCE_QUESTIONNAIRE_TEXT).unwrap();
        assert_eq!(q, fixtures::computer_science_questionnaire());
        let ad_row = q.row("AD").unwrap();
        assert_eq!(ad_row.cells()[1], Cell::nominal(["AD", "AI"]));
    }

    #[test]
    fn round_trip_is_identity_and_canonical_text_is_stable() {
        let q = fixtures::computer_science_questionnaire();
        let text = serialize_questionnaire(&q);
        assert_eq!(parse(&text).unwrap(), q);
        assert_eq!(text, fixtures::COMPUTER_SCIENCE_QUESTIONNAIRE_TEXT);
        assert_eq!(serialize_questionnaire(&parse(&text).unwrap()), text);
    }

    #[test]
    fn input_tolerates_comments_blanks_and_loose_spacing() {
        let text = "# an expert's table\n\nformat = 1\ndepartment=Tiny Dept\nexpert=e9\n\ncourse AI\ncourse DB\nquestion deg nominal  A | B \nquestion s score 1 .. 9\nquestion t courseset\nrow DB :  B ; 3 ;  AI + DB \n";
        let q = parse(text).unwrap();
        assert_eq!(q.schema().department(), "Tiny Dept");
        assert_eq!(q.rows().len(), 1);
        assert_eq!(q.rows()[0].cells()[0], Cell::nominal(["B"]));
        assert_eq!(
            q.rows()[0].cells()[2],
            Cell::courses(["AI", "DB"])
        );
    }

    #[test]
    fn arity_mismatch_reports_the_row_line() {
        let text = "department = D\nexpert = e\ncourse AI\nquestion a nominal X\nquestion b nominal Y\nrow AI : X\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.span.line, 6);
        assert!(matches!(
            err.kind,
            ParseErrorKind::Invalid(ModelError::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn unknown_label_is_spanned_to_the_alternative() {
        let text = "department = D\nexpert = e\ncourse AI\nquestion a nominal X|Y\nrow AI : X/Z\n";
        let err = parse(text).unwrap_err();
        assert!(!err.is_syntax());
        assert_eq!(err.span.line, 5);
        // "Z" sits at column 12 of "row AI : X/Z".
        assert_eq!((err.span.col_start, err.span.col_end), (12, 12));
    }

    #[test]
    fn malformed_score_cell_is_a_syntax_error() {
        let text = "department = D\nexpert = e\ncourse AI\nquestion s score 1..9\nrow AI : twelve\n";
        let err = parse(text).unwrap_err();
        assert!(err.is_syntax());
        assert_eq!(err.span.line, 5);
    }

    #[test]
    fn out_of_range_score_cell_is_semantic() {
        let text = "department = D\nexpert = e\ncourse AI\nquestion s score 1..9\nrow AI : 12\n";
        let err = parse(text).unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::Invalid(ModelError::ScoreOutOfRange { value: 12, .. })
        ));
    }

    #[test]
    fn sections_may_not_run_backwards() {
        let text = "department = D\nexpert = e\ncourse AI\nquestion s score 1..9\nrow AI : 5\ncourse DB\n";
        let err = parse(text).unwrap_err();
        assert!(err.is_syntax());
        assert_eq!(err.span.line, 6);
    }

    #[test]
    fn missing_header_lines_are_reported_at_end_of_input() {
        let err = parse("course AI\nquestion s score 1..9\n").unwrap_err();
        assert!(err.is_syntax());
        assert!(err.to_string().contains("department"));
    }

    #[test]
    fn format_version_must_be_one() {
        let err = parse("format = 2\ndepartment = D\n").unwrap_err();
        assert!(err.is_syntax());
        assert_eq!(err.span.line, 1);
    }

    #[test]
    fn zero_row_files_parse_to_empty_questionnaires() {
        let text = "department = D\nexpert = e\ncourse AI\nquestion s score 1..9\n";
        let q = parse(text).unwrap();
        assert!(q.rows().is_empty());
        assert_eq!(parse(&serialize_questionnaire(&q)).unwrap(), q);
    }

    #[test]
    fn every_error_carries_the_source_name() {
        let err = parse_questionnaire("nonsense", "weird.questionnaire").unwrap_err();
        assert_eq!(err.span.source, "weird.questionnaire");
        assert_eq!(err.span.line, 1);
    }
}
