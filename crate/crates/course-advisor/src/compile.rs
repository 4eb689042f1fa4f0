//! Knowledge compilation: questionnaire -> decision tree -> rule set.
//!
//! The tree is a prefix trie over row cells in question order. A row
//! whose nominal cells carry several alternatives expands by Cartesian
//! product, one path per combination, so a single two-valued cell yields
//! two paths that differ in exactly that cell. Paths sharing a prefix
//! share trie nodes; extraction walks the trie depth first and emits one
//! flat rule per leaf.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::compiled::CompiledRuleSet;
use crate::compiled::CompiledUniverse;
use crate::format::serialize_questionnaire;
use crate::model::{
    Antecedent, Cell, CourseId, Questionnaire, QuestionnaireSchema, Rule, RuleOrigin,
};

/// One edge label of the decision tree: a single answer value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnswerValue {
    Label(String),
    Score(i64),
    Courses(BTreeSet<CourseId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    /// Insertion-ordered; no two sibling edges share a label.
    children: Vec<(AnswerValue, usize)>,
    /// Courses recorded at full depth. Two rows with identical cells
    /// share the whole path, so a terminal node may carry several
    /// posteriors; each (path, posterior) pair is one leaf.
    posteriors: Vec<CourseId>,
}

impl Node {
    fn empty() -> Self {
        Node {
            children: Vec::new(),
            posteriors: Vec::new(),
        }
    }
}

/// Trie form of one expert's questionnaire. Level d branches on
/// question d of the schema; every leaf sits at full question depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    schema: Arc<QuestionnaireSchema>,
    expert_id: String,
    provenance: String,
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn schema(&self) -> &QuestionnaireSchema {
        &self.schema
    }

    pub fn expert_id(&self) -> &str {
        &self.expert_id
    }

    /// Digest of the source questionnaire's canonical text.
    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().map(|n| n.posteriors.len()).sum()
    }

    /// All (path, posterior) leaves in depth-first order: children in
    /// insertion order, a node's own posteriors before its subtrees.
    pub fn leaves(&self) -> Vec<(Vec<AnswerValue>, CourseId)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk(0, &mut path, &mut out);
        out
    }

    fn walk(&self, node: usize, path: &mut Vec<AnswerValue>, out: &mut Vec<(Vec<AnswerValue>, CourseId)>) {
        for posterior in &self.nodes[node].posteriors {
            out.push((path.clone(), posterior.clone()));
        }
        for (value, child) in &self.nodes[node].children {
            path.push(value.clone());
            self.walk(*child, path, out);
            path.pop();
        }
    }
}

/// Flat compiled form of one expert's knowledge: ordered rules over a
/// shared schema, plus a pre-interned representation for fast matching.
#[derive(Debug, Clone)]
pub struct RuleSet {
    schema: Arc<QuestionnaireSchema>,
    expert_id: String,
    rules: Vec<Rule>,
    provenance: Option<String>,
    compiled: CompiledRuleSet,
}

impl PartialEq for RuleSet {
    fn eq(&self, other: &Self) -> bool {
        // The compiled form is a pure function of the rest.
        self.schema == other.schema
            && self.expert_id == other.expert_id
            && self.rules == other.rules
            && self.provenance == other.provenance
    }
}

impl Eq for RuleSet {}

impl RuleSet {
    /// Builds a rule set from hand-assembled rules, checking that every
    /// rule has one antecedent per schema question and a schema course
    /// as posterior.
    pub fn from_rules(
        schema: QuestionnaireSchema,
        expert_id: impl Into<String>,
        rules: Vec<Rule>,
    ) -> Result<Self, CompileError> {
        let schema = Arc::new(schema);
        let universe = Arc::new(CompiledUniverse::new(&schema));
        RuleSet::assemble(schema, universe, expert_id.into(), rules, None)
    }

    fn assemble(
        schema: Arc<QuestionnaireSchema>,
        universe: Arc<CompiledUniverse>,
        expert_id: String,
        rules: Vec<Rule>,
        provenance: Option<String>,
    ) -> Result<Self, CompileError> {
        for (i, rule) in rules.iter().enumerate() {
            if rule.arity() != schema.question_count() {
                return Err(CompileError::RuleArity {
                    index: i + 1,
                    expected: schema.question_count(),
                    found: rule.arity(),
                });
            }
            if !schema.is_course(rule.posterior().as_str()) {
                return Err(CompileError::UnknownPosterior {
                    index: i + 1,
                    course: rule.posterior().to_string(),
                });
            }
        }
        let compiled = CompiledRuleSet::new(universe, &rules);
        Ok(RuleSet {
            schema,
            expert_id,
            rules,
            provenance,
            compiled,
        })
    }

    pub fn schema(&self) -> &QuestionnaireSchema {
        &self.schema
    }

    pub(crate) fn schema_arc(&self) -> &Arc<QuestionnaireSchema> {
        &self.schema
    }

    pub fn expert_id(&self) -> &str {
        &self.expert_id
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Digest of the source questionnaire's canonical text, when this
    /// set came out of the compiler rather than `from_rules`.
    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub(crate) fn compiled(&self) -> &CompiledRuleSet {
        &self.compiled
    }
}

/// Builds the prefix trie of a questionnaire's expanded rows. Paths
/// appear in row order, alternatives within a row in cell order with
/// later cells varying fastest.
pub fn build_tree(q: &Questionnaire) -> Result<DecisionTree, CompileError> {
    if q.rows().is_empty() {
        return Err(CompileError::EmptyQuestionnaire {
            expert_id: q.expert_id().to_string(),
        });
    }
    let mut nodes = vec![Node::empty()];
    for row in q.rows() {
        for path in expand_cells(row.cells()) {
            insert_path(&mut nodes, &path, row.course());
        }
    }
    Ok(DecisionTree {
        schema: Arc::new(q.schema().clone()),
        expert_id: q.expert_id().to_string(),
        provenance: questionnaire_digest(q),
        nodes,
    })
}

/// Cartesian expansion of one row's cells into single-valued paths.
fn expand_cells(cells: &[Cell]) -> Vec<Vec<AnswerValue>> {
    let mut paths: Vec<Vec<AnswerValue>> = vec![Vec::with_capacity(cells.len())];
    for cell in cells {
        let alternatives: Vec<AnswerValue> = match cell {
            Cell::Nominal(labels) => labels.iter().cloned().map(AnswerValue::Label).collect(),
            Cell::Score(value) => vec![AnswerValue::Score(*value)],
            Cell::Courses(set) => vec![AnswerValue::Courses(set.clone())],
        };
        let mut next = Vec::with_capacity(paths.len() * alternatives.len());
        for path in &paths {
            for alt in &alternatives {
                let mut extended = path.clone();
                extended.push(alt.clone());
                next.push(extended);
            }
        }
        paths = next;
    }
    paths
}

fn insert_path(nodes: &mut Vec<Node>, path: &[AnswerValue], course: &CourseId) {
    let mut at = 0;
    for value in path {
        at = match nodes[at].children.iter().find(|(v, _)| v == value) {
            Some((_, child)) => *child,
            None => {
                let child = nodes.len();
                nodes.push(Node::empty());
                nodes[at].children.push((value.clone(), child));
                child
            }
        };
    }
    // Skip exact duplicates: same full path, same course.
    if !nodes[at].posteriors.contains(course) {
        nodes[at].posteriors.push(course.clone());
    }
}

/// Lowers a tree into its flat rule set: one rule per leaf in
/// depth-first order, the antecedent at position d built from the edge
/// label at depth d. Score edges bind to the leaf's own posterior
/// course. Rules identical in antecedents and posterior collapse into
/// the first occurrence.
pub fn extract_rules(tree: &DecisionTree) -> RuleSet {
    let mut shapes: Vec<(Vec<Antecedent>, CourseId)> = Vec::new();
    for (path, posterior) in tree.leaves() {
        let antecedents: Vec<Antecedent> = path
            .into_iter()
            .zip(tree.schema.questions())
            .map(|(value, question)| match value {
                AnswerValue::Label(label) => Antecedent::NominalEquals {
                    question: question.name().to_string(),
                    label,
                },
                AnswerValue::Score(threshold) => Antecedent::ScoreAtLeast {
                    course: posterior.clone(),
                    threshold,
                },
                AnswerValue::Courses(courses) => Antecedent::TaughtSuperset { courses },
            })
            .collect();
        let shape = (antecedents, posterior);
        if !shapes.contains(&shape) {
            shapes.push(shape);
        }
    }
    let expert_id = tree.expert_id.clone();
    let rules = shapes
        .into_iter()
        .enumerate()
        .map(|(i, (antecedents, posterior))| {
            Rule::new(
                antecedents,
                posterior,
                RuleOrigin {
                    expert_id: expert_id.clone(),
                    index: i + 1,
                },
            )
        })
        .collect();
    let universe = Arc::new(CompiledUniverse::new(&tree.schema));
    RuleSet::assemble(
        Arc::clone(&tree.schema),
        universe,
        expert_id,
        rules,
        Some(tree.provenance.clone()),
    )
    .expect("rules extracted from a valid tree satisfy arity and posterior checks")
}

/// Compiles one rule set per questionnaire, in input order. All
/// questionnaires must share one schema; the resulting sets share one
/// interning universe so ensemble matching can bind each profile once.
pub fn compile_kb(questionnaires: &[Questionnaire]) -> Result<Vec<RuleSet>, CompileError> {
    let first = questionnaires.first().ok_or(CompileError::EmptyEnsemble)?;
    for (index, q) in questionnaires.iter().enumerate() {
        if q.schema() != first.schema() {
            return Err(CompileError::SchemaMismatch { index });
        }
    }
    let schema = Arc::new(first.schema().clone());
    let universe = Arc::new(CompiledUniverse::new(&schema));
    questionnaires
        .iter()
        .map(|q| {
            let tree = build_tree(q)?;
            let set = extract_rules(&tree);
            // Rebind onto the shared schema and universe.
            RuleSet::assemble(
                Arc::clone(&schema),
                Arc::clone(&universe),
                set.expert_id,
                set.rules,
                set.provenance,
            )
        })
        .collect()
}

/// FNV-1a over the canonical questionnaire text; stable across runs and
/// platforms, printed as 16 hex digits.
fn questionnaire_digest(q: &Questionnaire) -> String {
    let text = serialize_questionnaire(q);
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("questionnaire for expert {expert_id:?} has no rows")]
    EmptyQuestionnaire { expert_id: String },
    #[error("questionnaire list is empty")]
    EmptyEnsemble,
    #[error("questionnaire {index} does not share the first questionnaire's schema")]
    SchemaMismatch { index: usize },
    #[error("rule {index}: expected {expected} antecedents, found {found}")]
    RuleArity {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("rule {index}: posterior {course:?} is not a schema course")]
    UnknownPosterior { index: usize, course: String },
}
