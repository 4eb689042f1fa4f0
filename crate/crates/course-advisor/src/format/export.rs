//! Rule export: a readable, line-oriented rendering of rule sets.
//!
//! ```text
//! RULE 1: IF bsc=Software & msc=AI & phd=AI & score(AI)>=18 & taught>=AI+AD THEN course=AI
//! ```
//!
//! One line per rule; antecedents joined with ` & ` in question order.
//! Score antecedents render as `<question>(<course>)>=<threshold>` and
//! taught antecedents as `<question>>=<courses>`, both named after the
//! schema question at the antecedent's position.

use crate::compile::RuleSet;
use crate::format::questionnaire::join_courses_in_schema_order;
use crate::model::{Antecedent, QuestionnaireSchema, Rule};

/// The `RULE` lines of one set, one per line, in rule order.
pub fn export_rules_text(set: &RuleSet) -> String {
    let mut out = String::new();
    for rule in set.rules() {
        out.push_str(&rule_line(set.schema(), rule));
        out.push('\n');
    }
    out
}

/// A versioned multi-expert listing: each set's rules prefixed with an
/// `expert = <id>` line.
pub fn export_rule_sets(sets: &[RuleSet]) -> String {
    let mut out = String::from("format = 1\n");
    for set in sets {
        out.push_str(&format!("expert = {}\n", set.expert_id()));
        out.push_str(&export_rules_text(set));
    }
    out
}

fn rule_line(schema: &QuestionnaireSchema, rule: &Rule) -> String {
    let antecedents: Vec<String> = rule
        .antecedents()
        .iter()
        .enumerate()
        .map(|(position, antecedent)| antecedent_text(schema, position, antecedent))
        .collect();
    format!(
        "RULE {}: IF {} THEN course={}",
        rule.origin().index,
        antecedents.join(" & "),
        rule.posterior()
    )
}

fn antecedent_text(schema: &QuestionnaireSchema, position: usize, antecedent: &Antecedent) -> String {
    match antecedent {
        Antecedent::NominalEquals { question, label } => format!("{question}={label}"),
        Antecedent::ScoreAtLeast { course, threshold } => {
            let question = positional_name(schema, position);
            format!("{question}({course})>={threshold}")
        }
        Antecedent::TaughtSuperset { courses } => {
            let question = positional_name(schema, position);
            format!(
                "{question}>={}",
                join_courses_in_schema_order(schema, courses.iter())
            )
        }
    }
}

fn positional_name(schema: &QuestionnaireSchema, position: usize) -> &str {
    schema.questions()[position].name()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{build_tree, extract_rules};
    use crate::fixtures;

    fn computer_science_rules() -> RuleSet {
        extract_rules(&build_tree(&fixtures::computer_science_questionnaire()).unwrap())
    }

    #[test]
    fn first_rule_renders_the_worked_line() {
        let text = export_rules_text(&computer_science_rules());
        assert_eq!(
            text.lines().next().unwrap(),
            "RULE 1: IF bsc=Software & msc=AI & phd=AI & score(AI)>=18 & taught>=AI+AD THEN course=AI"
        );
    }

    #[test]
    fn all_six_rules_render_in_extraction_order() {
        let text = export_rules_text(&computer_science_rules());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        let posteriors: Vec<&str> = lines
            .iter()
            .map(|l| l.rsplit("course=").next().unwrap())
            .collect();
        assert_eq!(posteriors, ["AI", "AD", "DB", "AD", "NS", "CN"]);
        for (i, line) in lines.iter().enumerate() {
            assert!(line.starts_with(&format!("RULE {}: IF ", i + 1)));
            assert_eq!(line.matches(" & ").count(), 4, "five antecedents each");
        }
    }

    #[test]
    fn taught_sets_render_in_schema_course_order() {
        let text = export_rules_text(&computer_science_rules());
        assert!(text.contains("taught>=AI+AD "));
        assert!(text.contains("taught>=NS+CN "));
    }

    #[test]
    fn multi_set_export_prefixes_each_expert() {
        let set = computer_science_rules();
        let text = export_rule_sets(&[set.clone(), set]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "format = 1");
        assert_eq!(lines[1], "expert = expert1");
        assert_eq!(lines[8], "expert = expert1");
        assert_eq!(lines.len(), 1 + 2 * 7);
    }

    #[test]
    fn export_is_deterministic() {
        let a = export_rule_sets(&[computer_science_rules()]);
        let b = export_rule_sets(&[computer_science_rules()]);
        assert_eq!(a, b);
    }
}
