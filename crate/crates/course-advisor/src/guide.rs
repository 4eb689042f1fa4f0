//! The user guide, one module per book chapter.
//!
//! Each module's documentation is included verbatim from `book/src/`,
//! so every code sample in the book compiles and runs as a doc-test and
//! cannot drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/knowledge-model.md")]
pub mod knowledge_model {}

#[doc = include_str!("../../../book/src/decision-trees.md")]
pub mod decision_trees {}

#[doc = include_str!("../../../book/src/scoring.md")]
pub mod scoring {}

#[doc = include_str!("../../../book/src/voting.md")]
pub mod voting {}

#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}

#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod command_line {}
