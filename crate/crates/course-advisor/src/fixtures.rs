//! Ready-made example data: a computer-science department with five
//! courses, an expert questionnaire over it, volunteer profiles and a
//! labeled dataset. Used by the guide, the examples and the test suite.

use crate::harness::LabeledInstance;
use crate::model::{
    Cell, CourseId, Question, Questionnaire, QuestionnaireSchema, Row, VolunteerProfile,
};

/// Canonical text of [`computer_science_questionnaire`].
pub const COMPUTER_SCIENCE_QUESTIONNAIRE_TEXT: &str =
    include_str!("../fixtures/computer-science.questionnaire");

/// Canonical text of [`ai_db_ns_questionnaire`].
pub const AI_DB_NS_QUESTIONNAIRE_TEXT: &str = include_str!("../fixtures/ai-db-ns.questionnaire");

/// A small unlabeled roster; its second record mentions a course (`DT`)
/// the schema does not offer, so it only passes lenient validation.
pub const VOLUNTEERS_ROSTER_TEXT: &str = include_str!("../fixtures/volunteers.roster");

/// Canonical text of the labeled dataset [`demo_dataset`]`(25)`.
pub const DEMO_DATASET_TEXT: &str = include_str!("../fixtures/computer-science.dataset");

/// Five courses, three nominal degree questions, one score question and
/// one taught-courses question.
pub fn computer_science_schema() -> QuestionnaireSchema {
    let courses = ["AI", "DB", "NS", "CN", "AD"]
        .into_iter()
        .map(CourseId::new)
        .collect();
    let degree_domain: Vec<String> = ["AI", "Structure", "Software", "AD"]
        .into_iter()
        .map(String::from)
        .collect();
    QuestionnaireSchema::new(
        "Computer Science",
        courses,
        vec![
            Question::nominal(
                "bsc",
                vec!["Software".to_string(), "Hardware".to_string()],
            ),
            Question::nominal("msc", degree_domain.clone()),
            Question::nominal("phd", degree_domain),
            Question::course_score("score", 10, 20),
            Question::course_set("taught"),
        ],
    )
    .expect("fixture schema is valid")
}

/// `expert1`'s full table: one row per course, with a two-alternative
/// `msc` cell in the `AD` row.
pub fn computer_science_questionnaire() -> Questionnaire {
    let schema = computer_science_schema();
    let rows = vec![
        Row::new(
            "AI",
            vec![
                Cell::nominal(["Software"]),
                Cell::nominal(["AI"]),
                Cell::nominal(["AI"]),
                Cell::score(18),
                Cell::courses(["AI", "AD"]),
            ],
        ),
        Row::new(
            "DB",
            vec![
                Cell::nominal(["Software"]),
                Cell::nominal(["Software"]),
                Cell::nominal(["Software"]),
                Cell::score(15),
                Cell::courses(["DB"]),
            ],
        ),
        Row::new(
            "NS",
            vec![
                Cell::nominal(["Hardware"]),
                Cell::nominal(["Structure"]),
                Cell::nominal(["Structure"]),
                Cell::score(15),
                Cell::courses(["NS", "CN"]),
            ],
        ),
        Row::new(
            "CN",
            vec![
                Cell::nominal(["Hardware"]),
                Cell::nominal(["Structure"]),
                Cell::nominal(["Structure"]),
                Cell::score(15),
                Cell::courses(["CN"]),
            ],
        ),
        Row::new(
            "AD",
            vec![
                Cell::nominal(["Software"]),
                Cell::nominal(["AD", "AI"]),
                Cell::nominal(["AD"]),
                Cell::score(18),
                Cell::courses(["AD"]),
            ],
        ),
    ];
    Questionnaire::new(schema, "expert1", rows).expect("fixture questionnaire is valid")
}

/// The first three rows of [`computer_science_questionnaire`] (courses
/// AI, DB and NS) under the same schema.
pub fn ai_db_ns_questionnaire() -> Questionnaire {
    let full = computer_science_questionnaire();
    let rows = full
        .rows()
        .iter()
        .filter(|r| ["AI", "DB", "NS"].contains(&r.course().as_str()))
        .cloned()
        .collect();
    Questionnaire::new(computer_science_schema(), "expert1", rows)
        .expect("subset of a valid questionnaire is valid")
}

/// A volunteer with hardware and AI degrees, high self-reported AI and
/// DB scores, and NS and CN teaching experience.
pub fn volunteer_f1() -> VolunteerProfile {
    VolunteerProfile::new("F1")
        .with_answer("bsc", "Hardware")
        .with_answer("msc", "AI")
        .with_answer("phd", "AI")
        .with_score("AI", 19)
        .with_score("DB", 20)
        .with_taught("NS")
        .with_taught("CN")
}

/// Thirty labeled instances tiled from the six exact synthetic profiles
/// of [`computer_science_questionnaire`], named `v01`..`v30`. The first
/// `correct` keep their true course; the rest are deliberately
/// mislabeled, so a single-expert evaluation scores exactly
/// `correct`/30.
pub fn demo_dataset(correct: usize) -> Vec<LabeledInstance> {
    assert!(correct <= 30, "the dataset has 30 instances");
    let synthetic = crate::harness::synthesize_exact_dataset(&computer_science_questionnaire());
    assert_eq!(synthetic.len(), 6);
    let schema = computer_science_schema();
    let mut out = Vec::with_capacity(30);
    for i in 0..30 {
        let mut instance = synthetic[i % 6].instance.clone();
        instance.profile.name = format!("v{:02}", i + 1);
        if i >= correct {
            let wrong = schema
                .courses()
                .iter()
                .find(|c| *c != &instance.label)
                .expect("schema has more than one course")
                .clone();
            instance.label = wrong;
        }
        out.push(instance);
    }
    out
}
