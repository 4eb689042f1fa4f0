//! Source locations for parse diagnostics. Every rejection produced by
//! the text parsers carries a span; no failure is reported without one.

use std::fmt;

use thiserror::Error;

use crate::model::ModelError;

/// Location of a token inside a parsed text: 1-based line, 1-based
/// inclusive character columns. A zero-width span (`col_end` =
/// `col_start - 1`) marks a position, such as the end of input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub source: String,
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl SourceSpan {
    /// Span of `token`, a slice of `line_text` starting at `byte_start`.
    pub(crate) fn of_token(
        source: &str,
        line: usize,
        line_text: &str,
        byte_start: usize,
        token: &str,
    ) -> Self {
        let col_start = line_text[..byte_start].chars().count() + 1;
        let width = token.chars().count();
        SourceSpan {
            source: source.to_string(),
            line,
            col_start,
            col_end: col_start + width.saturating_sub(1),
        }
    }

    /// Whole-line span.
    pub(crate) fn of_line(source: &str, line: usize, line_text: &str) -> Self {
        let width = line_text.chars().count();
        SourceSpan {
            source: source.to_string(),
            line,
            col_start: 1,
            col_end: width.max(1),
        }
    }

    /// Zero-width span just past the end of the text.
    pub(crate) fn at_end(source: &str, text: &str) -> Self {
        let line = text.lines().count().max(1);
        let col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
        SourceSpan {
            source: source.to_string(),
            line,
            col_start: col,
            col_end: col.saturating_sub(1),
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.source, self.line, self.col_start)
    }
}

/// A parse rejection: where, and whether the text was malformed
/// (syntax) or well-formed but semantically invalid.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(ModelError),
}

impl ParseError {
    pub(crate) fn syntax(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            kind: ParseErrorKind::Syntax(message.into()),
        }
    }

    pub(crate) fn invalid(span: SourceSpan, error: ModelError) -> Self {
        ParseError {
            span,
            kind: ParseErrorKind::Invalid(error),
        }
    }

    /// True for malformed text, false for well-formed but invalid
    /// content. Drives the CLI's exit code split.
    pub fn is_syntax(&self) -> bool {
        matches!(self.kind, ParseErrorKind::Syntax(_))
    }
}
