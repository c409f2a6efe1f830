//! Report envelope, exit codes and output modes.

use std::fs;
use std::path::{Path, PathBuf};

use feynpar_core::Error;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

/// A failure with its exit code. Core errors map through [`exit_code`].
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, kind: "Validation".into(), message: msg.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: EXIT_VALIDATION, kind: "Io".into(), message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { code: exit_code(&e), kind: kind(&e).into(), message: e.to_string() }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

pub fn exit_code(e: &Error) -> i32 {
    use Error::*;
    match e {
        MalformedGraph(_) | UnknownEdge(_) | NotASubgraph(_) | ArityMismatch { .. } | MomentumNotConserved(_)
        | BadLegConfiguration(_) | OddDimension(_) | Parse(_) => EXIT_VALIDATION,
        ToleranceNotReached { .. } | FitUnstable(_) | Timeout { .. } => EXIT_TOLERANCE,
        TooLarge { .. } | ZeroPolynomial | SingularAtPoint | DecorationDimension { .. } | TruncationUnderflow(_)
        | CannotGenerate(_) | PositiveDimensional | NotSingular | RegimeViolation(_) | DivergentConfiguration(_)
        | ConvergenceDomain { .. } | Precondition(_) => EXIT_PRECONDITION,
    }
}

pub fn kind(e: &Error) -> &'static str {
    use Error::*;
    match e {
        MalformedGraph(_) => "MalformedGraph",
        UnknownEdge(_) => "UnknownEdge",
        NotASubgraph(_) => "NotASubgraph",
        TooLarge { .. } => "TooLarge",
        ArityMismatch { .. } => "ArityMismatch",
        ZeroPolynomial => "ZeroPolynomial",
        Timeout { .. } => "Timeout",
        MomentumNotConserved(_) => "MomentumNotConserved",
        BadLegConfiguration(_) => "BadLegConfiguration",
        SingularAtPoint => "SingularAtPoint",
        OddDimension(_) => "OddDimension",
        DecorationDimension { .. } => "DecorationDimension",
        TruncationUnderflow(_) => "TruncationUnderflow",
        CannotGenerate(_) => "CannotGenerate",
        PositiveDimensional => "PositiveDimensional",
        NotSingular => "NotSingular",
        RegimeViolation(_) => "RegimeViolation",
        ToleranceNotReached { .. } => "ToleranceNotReached",
        DivergentConfiguration(_) => "DivergentConfiguration",
        ConvergenceDomain { .. } => "ConvergenceDomain",
        FitUnstable(_) => "FitUnstable",
        Precondition(_) => "Precondition",
        Parse(_) => "Parse",
    }
}

/// Tabular view of a result, used for CSV output and plot data.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// What a command hands back: the result document, an optional table, and
/// an optional failure that still carries a best-effort result.
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
    pub failure: Option<Failure>,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Self { result, table: None, failure: None }
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.table = Some(t);
        self
    }

    pub fn fail_if(mut self, cond: bool, f: impl FnOnce() -> Failure) -> Self {
        if cond && self.failure.is_none() {
            self.failure = Some(f());
        }
        self
    }
}

/// Inputs read by a command; their bytes feed the report hash.
#[derive(Default)]
pub struct Inputs {
    names: Vec<String>,
    hasher: Sha256,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> CmdResult<String> {
        let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        self.names.push(path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    pub fn read_opt(&mut self, path: Option<&PathBuf>) -> CmdResult<Option<String>> {
        path.map(|p| self.read(p)).transpose()
    }

    fn finish(self) -> (Vec<String>, String) {
        let digest = self.hasher.finalize();
        (self.names, digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// Run parameters recorded in every report header.
#[derive(Clone, Debug)]
pub struct RunInfo {
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub max_evals: Option<usize>,
    pub threads: Option<usize>,
    pub order: Option<usize>,
}

pub fn envelope(command: &str, inputs: Inputs, run: &RunInfo, outcome: &Outcome) -> Value {
    let (names, hash) = inputs.finish();
    let mut doc = json!({
        "command": command,
        "inputs": names,
        "input_hash": hash,
        "run": {
            "seed": run.seed,
            "tolerance": run.tolerance,
            "max_evals": run.max_evals,
            "threads": run.threads,
            "order": run.order,
        },
        "result": outcome.result,
    });
    if let Some(f) = &outcome.failure {
        doc["error"] = json!({"kind": f.kind, "message": f.message, "exit_code": f.code});
    }
    doc
}

pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Fallback CSV for results without a table: one row per top-level field.
pub fn field_table(result: &Value) -> Table {
    let mut t = Table::new(&["field", "value"]);
    if let Value::Object(map) = result {
        for (k, v) in map {
            let cell = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            t.push(vec![k.clone(), cell]);
        }
    }
    t
}

pub fn fmt_f(x: f64) -> String {
    format!("{x}")
}
