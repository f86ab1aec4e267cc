//! Machine-readable output: one JSON object per invocation, printed on a
//! single line. Field order follows struct declaration order, so output for
//! a fixed input (and seed) is byte-identical across runs. The layout is
//! versioned through the `schema` field; see `docs/report-schema.md`.

use serde::Serialize;

/// Schema identifier embedded in every machine-readable report.
pub const SCHEMA: &str = "holog-report/1";

#[derive(Serialize)]
pub struct CheckReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub kind: &'static str,
    pub context: Vec<String>,
    pub canonical: String,
    pub connective_depth: Option<usize>,
    pub quantifier_depth: Option<usize>,
}

#[derive(Serialize)]
pub struct EvalPoint {
    pub point: Vec<usize>,
    pub inhabited: bool,
    /// Set backend: number of proof tokens in the fiber.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proofs: Option<usize>,
    /// Groupoid backend: objects in the fiber.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objects: Option<usize>,
    /// Groupoid backend: morphisms in the fiber.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morphisms: Option<usize>,
}

#[derive(Serialize)]
pub struct EvalReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub backend: String,
    pub max_fiber: usize,
    pub context: Vec<String>,
    pub formula: String,
    pub points: Vec<EvalPoint>,
    pub all_inhabited: bool,
}

#[derive(Serialize)]
pub struct SequentReport {
    pub context: String,
    pub premise: String,
    pub conclusion: String,
}

#[derive(Serialize)]
pub struct ProveCheckReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub nodes: usize,
    pub sequent: SequentReport,
    /// Present when a structure was supplied and the proof was evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    pub evaluated: bool,
}

#[derive(Serialize)]
pub struct FamilyCount {
    pub family: String,
    pub checked: usize,
    pub skipped: usize,
}

#[derive(Serialize)]
pub struct RelationsReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub backend: String,
    pub seed: u64,
    pub rounds: usize,
    pub max_fiber: usize,
    pub families: Vec<FamilyCount>,
    pub total_checked: usize,
    pub total_skipped: usize,
    pub failures: Vec<String>,
}

#[derive(Serialize)]
pub struct VerdictReport {
    pub point: Vec<usize>,
    pub image: Vec<usize>,
    pub equivalent: bool,
}

#[derive(Serialize)]
pub struct InvarianceReportOut {
    pub schema: &'static str,
    pub command: &'static str,
    pub max_fiber: usize,
    pub context: Vec<String>,
    pub formula: String,
    /// `"file"` when the map file carried quasi-inverse data, `"search"`
    /// when the quasi-inverse was found by enumeration.
    pub equivalence_source: &'static str,
    pub verdicts: Vec<VerdictReport>,
    pub all_equivalent: bool,
}

#[derive(Serialize)]
pub struct ExampleEntry {
    pub backend: &'static str,
    pub structure: &'static str,
    pub sentence: &'static str,
    pub inhabited: bool,
    pub expected: bool,
}

#[derive(Serialize)]
pub struct ExamplesReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub entries: Vec<ExampleEntry>,
    pub all_ok: bool,
}

/// Prints any report as its single-line JSON encoding.
pub fn emit<T: Serialize>(report: &T) {
    println!(
        "{}",
        serde_json::to_string(report).expect("report serialization cannot fail")
    );
}
