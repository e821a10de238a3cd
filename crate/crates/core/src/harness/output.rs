use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Cell, ComparisonReport, HarnessError, ReportKind};
use crate::sim::{write_trace, TraceHeader};

/// Plot data files written by [`emit_plot_data`].
pub const PLOT_FILES: [&str; 4] = ["perf.csv", "fidelity.csv", "ablation.csv", "ports.csv"];

/// Flat row of `cells.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvCell {
    pub benchmark: String,
    pub qubits: usize,
    pub column: String,
    pub hardware: String,
    pub latency_us: Option<f64>,
    pub fidelity: Option<f64>,
    pub normalized_latency: Option<f64>,
    pub normalized_fidelity: Option<f64>,
    pub matter_link_crossings: Option<usize>,
    pub remote_gates: Option<usize>,
    pub entanglements: Option<usize>,
    pub raw_pairs: Option<u64>,
    pub photonic_share: Option<f64>,
    pub critical_path_us: Option<f64>,
    pub error: Option<String>,
}

impl From<&Cell> for CsvCell {
    fn from(c: &Cell) -> Self {
        let r = c.report.as_ref();
        CsvCell {
            benchmark: c.benchmark.clone(),
            qubits: c.qubits,
            column: c.column.clone(),
            hardware: c.hardware.clone(),
            latency_us: r.map(|r| r.latency_us),
            fidelity: r.map(|r| r.fidelity),
            normalized_latency: c.normalized_latency,
            normalized_fidelity: c.normalized_fidelity,
            matter_link_crossings: r.map(|r| r.matter_link_crossings),
            remote_gates: r.map(|r| r.remote_gates),
            entanglements: r.map(|r| r.entanglements),
            raw_pairs: r.map(|r| r.raw_pairs),
            photonic_share: r.map(|r| r.photonic_share),
            critical_path_us: r.map(|r| r.critical_path_us),
            error: c.error.clone(),
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

fn csv_bytes<I, R>(header: &[String], rows: I) -> Result<Vec<u8>, HarnessError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| HarnessError::Config(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(fail)?;
    }
    w.into_inner().map_err(|e| HarnessError::Config(format!("csv: {e}")))
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:?}"))
}

/// Trace file name for a cell; `+` becomes `-`.
pub(crate) fn trace_name(cell: &Cell) -> String {
    format!(
        "trace_{}-{}_{}.txt",
        cell.benchmark,
        cell.qubits,
        cell.column.replace('+', "-")
    )
}

/// `report.json`, `cells.csv`, plot data, and one trace per cell when
/// `trace` is set.
pub fn write_outputs(report: &ComparisonReport, dir: &Path, trace: bool) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let json = serde_json::to_string_pretty(report).map_err(|e| HarnessError::Config(e.to_string()))?;
    write_file(&dir.join("report.json"), json.as_bytes())?;

    let mut w = csv::Writer::from_writer(Vec::new());
    for cell in &report.cells {
        w.serialize(CsvCell::from(cell))
            .map_err(|e| HarnessError::Config(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Config(format!("csv: {e}")))?;
    write_file(&dir.join("cells.csv"), &bytes)?;

    emit_plot_data(report, dir)?;

    if trace {
        for cell in &report.cells {
            let Some(r) = &cell.report else { continue };
            let header = TraceHeader {
                qubits: cell.qubits,
                t2_us: cell.t2_us,
                makespan_us: r.latency_us,
            };
            write_file(&dir.join(trace_name(cell)), write_trace(&header, &cell.ops).as_bytes())?;
        }
    }
    Ok(())
}

pub fn read_cells_csv(path: &Path) -> Result<Vec<CsvCell>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::io(path, e))?;
    r.deserialize()
        .collect::<Result<Vec<CsvCell>, _>>()
        .map_err(|e| HarnessError::io(path, e))
}

/// Writes every file in [`PLOT_FILES`]. Files that do not apply to the
/// report kind get a header only.
pub fn emit_plot_data(report: &ComparisonReport, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let benches = report.benchmarks();
    let mut wide_header = vec!["benchmark".to_string(), "qubits".to_string()];
    wide_header.extend(report.columns.iter().cloned());
    let wide = |f: &dyn Fn(&Cell) -> Option<f64>| {
        benches
            .iter()
            .map(|(b, n)| {
                let mut row = vec![b.clone(), n.to_string()];
                for col in &report.columns {
                    let v = report
                        .cells
                        .iter()
                        .find(|c| &c.benchmark == b && c.qubits == *n && &c.column == col)
                        .and_then(f);
                    row.push(opt(v));
                }
                row
            })
            .collect::<Vec<_>>()
    };
    let ablation_header: Vec<String> = [
        "benchmark",
        "qubits",
        "column",
        "matter_link_crossings",
        "remote_gates",
        "entanglements",
        "photonic_share",
        "latency_us",
    ]
    .map(String::from)
    .to_vec();

    let variants = report.kind == ReportKind::Variants;
    let empty: Vec<Vec<String>> = Vec::new();
    let perf = if variants {
        wide(&|c| c.normalized_latency)
    } else {
        empty.clone()
    };
    let fidelity = if variants {
        wide(&|c| c.normalized_fidelity)
    } else {
        empty.clone()
    };
    let ports = if variants {
        empty.clone()
    } else {
        wide(&|c| c.report.as_ref().map(|r| r.latency_us))
    };
    let ablation: Vec<Vec<String>> = if variants {
        report
            .cells
            .iter()
            .map(|c| {
                let r = c.report.as_ref();
                vec![
                    c.benchmark.clone(),
                    c.qubits.to_string(),
                    c.column.clone(),
                    r.map_or(String::new(), |r| r.matter_link_crossings.to_string()),
                    r.map_or(String::new(), |r| r.remote_gates.to_string()),
                    r.map_or(String::new(), |r| r.entanglements.to_string()),
                    opt(r.map(|r| r.photonic_share)),
                    opt(r.map(|r| r.latency_us)),
                ]
            })
            .collect()
    } else {
        empty
    };
    write_file(&dir.join(PLOT_FILES[0]), &csv_bytes(&wide_header, perf)?)?;
    write_file(&dir.join(PLOT_FILES[1]), &csv_bytes(&wide_header, fidelity)?)?;
    write_file(&dir.join(PLOT_FILES[2]), &csv_bytes(&ablation_header, ablation)?)?;
    write_file(&dir.join(PLOT_FILES[3]), &csv_bytes(&wide_header, ports)?)?;
    Ok(())
}
