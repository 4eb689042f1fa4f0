//! Text formats: questionnaire files, volunteer rosters and labeled
//! datasets, and the human-readable rule export.
//!
//! All formats are line-oriented UTF-8. Lines whose first non-blank
//! character is `#` are comments; blank lines are ignored; an optional
//! leading `format = 1` line versions each file. Parsing is total over
//! arbitrary input: every rejection is a [`ParseError`] with a
//! [`SourceSpan`], never a panic.

mod export;
mod questionnaire;
mod roster;
mod span;

pub use export::{export_rule_sets, export_rules_text};
pub use questionnaire::{parse_questionnaire, serialize_questionnaire};
pub use roster::{parse_roster, serialize_roster, Roster, RosterWarning};
pub use span::{ParseError, ParseErrorKind, SourceSpan};

/// One meaningful input line: 1-based number and text with any trailing
/// carriage return removed. Blank and comment lines are filtered out.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Line<'a> {
    pub(crate) number: usize,
    pub(crate) text: &'a str,
}

pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.split('\n').enumerate().filter_map(|(i, raw)| {
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = text.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some(Line {
                number: i + 1,
                text,
            })
        }
    })
}

/// Trims a line slice, returning the trimmed text and its byte offset
/// within the line. `start` is the untrimmed slice's byte offset.
pub(crate) fn trim_in_line(start: usize, piece: &str) -> (usize, &str) {
    let trimmed_front = piece.trim_start();
    let offset = start + (piece.len() - trimmed_front.len());
    (offset, trimmed_front.trim_end())
}

/// Splits a line slice at byte offset `start` on `separator`, yielding
/// each trimmed part with its byte offset. Empty input yields one empty
/// part, which callers treat per-format.
pub(crate) fn split_parts(start: usize, piece: &str, separator: char) -> Vec<(usize, &str)> {
    let mut parts = Vec::new();
    let mut at = 0;
    loop {
        match piece[at..].find(separator) {
            Some(rel) => {
                parts.push(trim_in_line(start + at, &piece[at..at + rel]));
                at += rel + separator.len_utf8();
            }
            None => {
                parts.push(trim_in_line(start + at, &piece[at..]));
                return parts;
            }
        }
    }
}

/// Recognizes a `format = <n>` line; returns the version text and its
/// offset when the line is a format directive.
pub(crate) fn format_directive(line: &str) -> Option<(usize, &str)> {
    let trimmed = line.trim_start();
    let rest = trimmed.strip_prefix("format")?;
    // "format" must be a whole word followed by '='.
    let after_kw = rest.trim_start();
    let value = after_kw.strip_prefix('=')?;
    if !rest.starts_with(|c: char| c.is_whitespace() || c == '=') {
        return None;
    }
    let offset = line.len() - value.len();
    Some(trim_in_line(offset, value))
}
