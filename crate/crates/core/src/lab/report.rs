//! Structured experiment reports.
//!
//! Reports are plain data: parameters, provenance, named tables, and verdicts
//! that cite the table rows they were computed from. Serialization is fully
//! deterministic (sorted keys, shortest float round-trip), and no timestamps
//! or machine details are recorded, so re-running an experiment with the same
//! configuration produces byte-identical output regardless of worker count.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One table cell. Non-finite gap sentinels are stored as text so the JSON
/// form stays lossless.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    /// Numeric cell; `±∞` and NaN become their textual sentinels.
    pub fn num(v: f64) -> Cell {
        if v.is_finite() {
            Cell::Num(v)
        } else if v.is_nan() {
            Cell::Text("nan".into())
        } else if v > 0.0 {
            Cell::Text("+inf".into())
        } else {
            Cell::Text("-inf".into())
        }
    }

    pub fn int(v: i64) -> Cell {
        Cell::Int(v)
    }

    pub fn text(v: impl Into<String>) -> Cell {
        Cell::Text(v.into())
    }

    pub fn flag(v: bool) -> Cell {
        Cell::Bool(v)
    }

    fn csv_field(&self) -> String {
        let raw = match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
        };
        if raw.contains(',') || raw.contains('"') {
            format!("\"{}\"", raw.replace('"', "\"\""))
        } else {
            raw
        }
    }
}

/// A rectangular table with named columns.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row and returns its index.
    pub fn push(&mut self, row: Vec<Cell>) -> usize {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self.rows.len() - 1
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::csv_field).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// A machine-checked claim, tied to the evidence rows it was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub passed: bool,
    /// Name of the table holding the evidence.
    pub table: String,
    /// Row indices within that table.
    pub rows: Vec<usize>,
}

/// A reproducible experiment outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub provenance: BTreeMap<String, serde_json::Value>,
    pub tables: BTreeMap<String, Table>,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(experiment: &str) -> Report {
        Report {
            experiment: experiment.to_string(),
            parameters: BTreeMap::new(),
            provenance: BTreeMap::new(),
            tables: BTreeMap::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn provenance(&mut self, key: &str, value: impl Serialize) {
        self.provenance
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn insert_table(&mut self, name: &str, table: Table) {
        self.tables.insert(name.to_string(), table);
    }

    pub fn verdict(&mut self, claim: &str, passed: bool, table: &str, rows: Vec<usize>) {
        self.verdicts.push(Verdict {
            claim: claim.to_string(),
            passed,
            table: table.to_string(),
            rows,
        });
    }

    /// True when every verdict passed.
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failed_claims(&self) -> Vec<&str> {
        self.verdicts
            .iter()
            .filter(|v| !v.passed)
            .map(|v| v.claim.as_str())
            .collect()
    }

    /// Deterministic pretty JSON body.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_sentinels_serialize_as_text() {
        let mut t = Table::new(&["gap"]);
        t.push(vec![Cell::num(f64::INFINITY)]);
        t.push(vec![Cell::num(2.5)]);
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("+inf"));
        assert!(json.contains("2.5"));
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new(&["probes", "n"]);
        t.push(vec![Cell::text("0, 1, 1.41"), Cell::int(3)]);
        let csv = t.to_csv();
        assert_eq!(csv, "probes,n\n\"0, 1, 1.41\",3\n");
    }

    #[test]
    fn report_round_trips_and_is_deterministic() {
        let mut r = Report::new("demo");
        r.param("eps", 0.1);
        let mut t = Table::new(&["x"]);
        let row = t.push(vec![Cell::num(1.0)]);
        r.insert_table("t", t);
        r.verdict("x is one", true, "t", vec![row]);
        let a = r.to_json();
        let b = r.to_json();
        assert_eq!(a, b);
        let back: Report = serde_json::from_str(&a).unwrap();
        assert_eq!(back.to_json(), a);
        assert!(r.passed());
    }
}
