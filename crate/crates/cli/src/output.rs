use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use smoothgda::Trace;

use crate::error::CliError;

pub const TRACE_HEADER: &str = "t,rx,ry,ry_kind,rz,f,psi,phi,wall_ns";

/// 17 significant digits, enough to round-trip any `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn trace_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(160 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in trace.records() {
        let wall = r.wall_ns.map(|w| w.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.t,
            num(r.rx),
            num(r.ry),
            r.ry_kind,
            num(r.rz),
            num(r.f),
            opt(r.psi),
            opt(r.phi),
            wall
        );
    }
    out
}

#[derive(Serialize)]
struct Column {
    name: &'static str,
    deterministic: bool,
}

/// Column metadata written next to `trace.csv`; `wall_ns` is flagged so
/// byte-identity checks can skip it.
pub fn trace_columns() -> String {
    let cols: Vec<Column> = TRACE_HEADER
        .split(',')
        .map(|name| Column { name, deterministic: name != "wall_ns" })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({ "columns": cols })).expect("static columns serialize")
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("cannot serialize {}: {e}", path.display())))?;
    write_text(path, &(text + "\n"))
}

/// Writes `trace.csv`, its column sidecar and `summary.json` into `dir`.
pub fn write_run(dir: &Path, session: &crate::session::Session) -> Result<(), CliError> {
    ensure_dir(dir)?;
    write_text(&dir.join("trace.csv"), &trace_csv(&session.outcome.trace))?;
    write_text(&dir.join("trace.columns.json"), &(trace_columns() + "\n"))?;
    write_json(&dir.join("summary.json"), &session.summary())
}

#[cfg(test)]
mod tests {
    use super::*;
    use smoothgda::state::TraceMeta;

    #[test]
    fn csv_round_trips_doubles() {
        let v = [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300];
        let trace = Trace::from_measures(TraceMeta::default(), &v);
        let csv = trace_csv(&trace);
        let parsed: Vec<f64> =
            csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert_eq!(parsed, v);
        assert!(csv.lines().nth(1).unwrap().ends_with(",,,"));
    }

    #[test]
    fn wall_clock_is_flagged() {
        let cols = trace_columns();
        let v: serde_json::Value = serde_json::from_str(&cols).unwrap();
        let flagged: Vec<_> = v["columns"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["deterministic"] == false)
            .map(|c| c["name"].as_str().unwrap())
            .collect();
        assert_eq!(flagged, ["wall_ns"]);
    }
}
