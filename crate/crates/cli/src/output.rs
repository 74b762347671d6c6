//! Atomic file writes and the CSV/JSON output formats.
//!
//! All numeric formatting goes through Rust's locale-independent
//! float `Display`; every CSV starts with a header row.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use standsim::{CycleExpectation, Ledger, ScenarioKind, ScenarioResult, TraceRow};

use crate::{CliError, CliResult};

/// Write a whole file via a temp file + rename in the target directory,
/// so failed runs never leave partial output.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.flush())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    tmp.persist(&path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn curve_csv(curve: &[CycleExpectation]) -> String {
    let mut out = String::from(
        "tau,expected_return_rate,expected_profit_rate,expected_capitalization,expected_volume\n",
    );
    for p in curve {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.tau,
            p.expected_return_rate,
            p.expected_profit_rate,
            p.expected_capitalization,
            p.expected_volume
        ));
    }
    out
}

pub fn ledger_csv(ledger: &Ledger) -> String {
    let mut out = String::from(
        "time,capitalization_left,capitalization_right,profit_rate_left,profit_rate_right,\
         volume_left,volume_right,events\n",
    );
    for (i, &t) in ledger.grid.iter().enumerate() {
        let events: Vec<String> = ledger
            .events
            .iter()
            .filter(|e| (e.time - t).abs() < 1e-9)
            .map(|e| format!("{}:{}", e.kind.name(), e.amount))
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            t,
            ledger.capitalization[i].0,
            ledger.capitalization[i].1,
            ledger.profit_rate[i].0,
            ledger.profit_rate[i].1,
            ledger.volume[i].0,
            ledger.volume[i].1,
            events.join(";")
        ));
    }
    out
}

pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("iteration,candidate,max_return_rate,accepted\n");
    for row in trace {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.iteration, row.candidate, row.max_return_rate, row.accepted
        ));
    }
    out
}

/// Paired baseline/fertilized curves of one scenario, long format.
pub fn scenario_curves_csv(result: &ScenarioResult) -> String {
    let mut out = String::from(
        "series,tau,expected_return_rate,expected_profit_rate,expected_capitalization,\
         expected_volume\n",
    );
    for (series, curve) in
        [("baseline", &result.baseline_curve), ("fertilized", &result.fertilized_curve)]
    {
        for p in curve {
            out.push_str(&format!(
                "{series},{},{},{},{},{}\n",
                p.tau,
                p.expected_return_rate,
                p.expected_profit_rate,
                p.expected_capitalization,
                p.expected_volume
            ));
        }
    }
    out
}

/// Rotation-extension expense table across all stands (extension
/// scenarios only): one row per arm.
pub fn extension_expenses_csv(results: &[(String, ScenarioKind, ScenarioResult)]) -> String {
    let mut out = String::from(
        "stand,kind,arm,expense,delta_volume,delta_volume_pct,stock_expense_rate,\
         extension_only_rate\n",
    );
    for (id, kind, result) in results {
        let Some(ext) = &result.extension else { continue };
        for (arm_name, arm) in [("fertilized", &ext.fertilized), ("unfertilized", &ext.unfertilized)] {
            out.push_str(&format!(
                "{id},{kind},{arm_name},{},{},{},{},{}\n",
                arm.expense,
                arm.delta_volume,
                arm.delta_volume_pct,
                arm.stock_expense_rate.map_or(String::new(), |v| v.to_string()),
                arm.extension_only_rate.map_or(String::new(), |v| v.to_string()),
            ));
        }
    }
    out
}

#[derive(Serialize)]
struct SummaryEntry<'a> {
    stand: &'a str,
    kind: ScenarioKind,
    #[serde(flatten)]
    result: &'a ScenarioResult,
}

#[derive(Serialize)]
struct SkippedEntry<'a> {
    stand: &'a str,
    kind: ScenarioKind,
    reason: &'a str,
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    results: Vec<SummaryEntry<'a>>,
    skipped: Vec<SkippedEntry<'a>>,
}

pub fn summary_json(
    results: &[(String, ScenarioKind, ScenarioResult)],
    skipped: &[(String, ScenarioKind, String)],
) -> String {
    let summary = Summary {
        schema_version: 1,
        results: results
            .iter()
            .map(|(id, kind, result)| SummaryEntry { stand: id, kind: *kind, result })
            .collect(),
        skipped: skipped
            .iter()
            .map(|(id, kind, reason)| SkippedEntry { stand: id, kind: *kind, reason })
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serialize");
    json.push('\n');
    json
}
