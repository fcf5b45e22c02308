//! Tabular output for experiment runs.
//!
//! Records serialize to CSV and JSON lines with one hard guarantee: the
//! bytes are a pure function of the record list. Column order is the sorted
//! union of keys, map iteration is ordered, and floats print through Rust's
//! shortest-roundtrip formatter. Wall-clock time is carried on the record
//! for summaries but deliberately kept out of both formats, since a
//! timestamp would break rerun-to-rerun byte identity.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

/// One measured value with everything needed to rerun it: the experiment
/// name, the input parameters as strings, and any derived quantities
/// (fitted slopes, ratios) attached to the row.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub params: BTreeMap<String, String>,
    pub value: f64,
    pub derived: BTreeMap<String, f64>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl ExperimentRecord {
    pub fn new(experiment: &str, value: f64) -> Self {
        ExperimentRecord {
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            value,
            derived: BTreeMap::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn derived(mut self, key: &str, value: f64) -> Self {
        self.derived.insert(key.to_string(), value);
        self
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Writes the records as CSV: a header row, then one row per record. The
/// columns are `experiment`, the sorted union of parameter keys, `value`,
/// and the sorted union of derived keys; absent cells stay empty.
pub fn write_csv(records: &[ExperimentRecord], out: &mut impl Write) -> io::Result<()> {
    let param_keys: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.params.keys().map(String::as_str))
        .collect();
    let derived_keys: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.derived.keys().map(String::as_str))
        .collect();

    let mut header = vec!["experiment".to_string()];
    header.extend(param_keys.iter().map(|k| csv_escape(k)));
    header.push("value".to_string());
    header.extend(derived_keys.iter().map(|k| csv_escape(k)));
    writeln!(out, "{}", header.join(","))?;

    for r in records {
        let mut row = vec![csv_escape(&r.experiment)];
        for k in &param_keys {
            row.push(csv_escape(r.params.get(*k).map(String::as_str).unwrap_or("")));
        }
        row.push(format!("{}", r.value));
        for k in &derived_keys {
            row.push(match r.derived.get(*k) {
                Some(v) => format!("{v}"),
                None => String::new(),
            });
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes the records as JSON lines, one object per record, keys sorted.
pub fn write_jsonl(records: &[ExperimentRecord], out: &mut impl Write) -> io::Result<()> {
    for r in records {
        let line = serde_json::to_string(r).expect("records always serialize");
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn to_csv_string(records: &[ExperimentRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn to_jsonl_string(records: &[ExperimentRecord]) -> String {
    let mut buf = Vec::new();
    write_jsonl(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("JSONL output is UTF-8")
}

// ===== tests

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_records() -> Vec<ExperimentRecord> {
        vec![
            ExperimentRecord::new("survey", 1.25)
                .param("alpha", "0.5")
                .param("n", "17")
                .derived("plateau", 1.5),
            ExperimentRecord::new("survey", 0.5).param("n", "18").derived("slope", -0.25),
        ]
    }

    #[test]
    fn csv_has_sorted_union_columns_and_empty_cells() {
        let csv = to_csv_string(&sample_records());
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "experiment,alpha,n,value,plateau,slope");
        assert_eq!(lines.next().unwrap(), "survey,0.5,17,1.25,1.5,");
        assert_eq!(lines.next().unwrap(), "survey,,18,0.5,,-0.25");
        assert!(lines.next().is_none());
    }

    #[test]
    fn output_is_reproducible() {
        let records = sample_records();
        assert_eq!(to_csv_string(&records), to_csv_string(&records));
        assert_eq!(to_jsonl_string(&records), to_jsonl_string(&records));
    }

    #[test]
    fn wall_time_never_reaches_the_output() {
        let mut record = ExperimentRecord::new("survey", 1.0);
        record.wall_time_s = 123.456;
        let mut other = record.clone();
        other.wall_time_s = 0.001;
        assert_eq!(to_csv_string(&[record.clone()]), to_csv_string(&[other.clone()]));
        assert_eq!(to_jsonl_string(&[record]), to_jsonl_string(&[other]));
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        let record = ExperimentRecord::new("survey", 1.0).param("alpha", "0.5,1.0");
        let csv = to_csv_string(&[record]);
        assert!(csv.contains("\"0.5,1.0\""));
    }

    #[test]
    fn jsonl_round_trips_values_exactly() {
        let record = ExperimentRecord::new("survey", 0.1 + 0.2).param("n", "3");
        let line = to_jsonl_string(&[record.clone()]);
        let parsed: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(parsed["value"].as_f64().unwrap(), record.value);
        assert_eq!(parsed["params"]["n"], "3");
    }
}
