//! Flat-file output: the sweep summary (CSV or an aligned text table) and
//! one CSV per scenario trace. Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dynamics::Trace;
use crate::error::{Error, Result};
use crate::scenario::{SweepResult, SweepRun};

pub const TRACE_HEADER: [&str; 6] = [
    "time_s",
    "f_pcc_hz",
    "p_e_pu",
    "p_bess_pu",
    "p_m_star_pu",
    "p_d_pu",
];

pub const SUMMARY_HEADER: [&str; 17] = [
    "name",
    "t_a_s",
    "k_d",
    "k_omega",
    "f_min_hz",
    "f_max_hz",
    "rocof_max_hz_per_s",
    "charge_peak_pu",
    "discharge_peak_pu",
    "power_range_pu",
    "e_batt_pu_s",
    "e_first_swing_pu_s",
    "settling_time_s",
    "power_rating_mw",
    "energy_rating_mwh",
    "rocof_compliant",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SummaryFormat {
    #[default]
    Csv,
    Table,
}

impl FromStr for SummaryFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(SummaryFormat::Csv),
            "table" => Ok(SummaryFormat::Table),
            other => Err(Error::domain(format!(
                "unknown format '{other}', expected csv or table"
            ))),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn summary_records(result: &SweepResult) -> Vec<Vec<String>> {
    result
        .rows
        .iter()
        .map(|r| {
            let mut rec = vec![r.name.clone(), num(r.t_a), num(r.k_d), num(r.k_omega)];
            match &r.outcome {
                Ok(v) => {
                    rec.extend(
                        [
                            v.f_min,
                            v.f_max,
                            v.rocof_max,
                            v.charge_peak,
                            v.discharge_peak,
                            v.power_range,
                            v.e_batt,
                            v.e_first_swing,
                        ]
                        .map(num),
                    );
                    rec.push(v.settling_time.map(num).unwrap_or_default());
                    rec.push(num(v.power_rating_mw));
                    rec.push(num(v.energy_rating_mwh));
                    rec.push(v.compliant.to_string());
                    rec.push(String::new());
                }
                Err(e) => {
                    rec.extend(std::iter::repeat_n(String::new(), 12));
                    rec.push(e.clone());
                }
            }
            rec
        })
        .collect()
}

pub fn write_summary_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err(path))?;
    for rec in summary_records(result) {
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Human-readable table with the columns of the published result tables.
pub fn summary_table(result: &SweepResult) -> String {
    let header = [
        "scenario",
        "T_a",
        "k_d",
        "K_w",
        "F_min",
        "F_max",
        "df/dt",
        "Charge",
        "Discharge",
        "Range",
        "E_batt",
        "ROCOF ok",
    ];
    let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in &result.rows {
        let mut row = vec![
            r.name.clone(),
            format!("{}", r.t_a),
            format!("{}", r.k_d),
            format!("{}", r.k_omega),
        ];
        match &r.outcome {
            Ok(v) => {
                row.push(format!("{:.3}", v.f_min));
                row.push(format!("{:.3}", v.f_max));
                row.push(format!("{:.3}", v.rocof_max));
                row.push(format!("{:.3}", v.charge_peak));
                row.push(format!("{:.3}", v.discharge_peak));
                row.push(format!("{:.3}", v.power_range));
                row.push(format!("{:.3}", v.e_batt));
                row.push(if v.compliant { "yes" } else { "no" }.to_string());
            }
            Err(e) => row.push(format!("error: {e}")),
        }
        rows.push(row);
    }
    let ncol = header.len();
    let widths: Vec<usize> = (0..ncol)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.len())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                let _ = write!(line, "{cell:<w$}", w = widths[c]);
            } else if c < ncol && row.len() == ncol {
                let _ = write!(line, "  {cell:>w$}", w = widths[c]);
            } else {
                let _ = write!(line, "  {cell}");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn write_trace_csv(trace: &Trace, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(TRACE_HEADER).map_err(csv_err(path))?;
    for k in 0..trace.len() {
        let rec = [
            trace.time()[k],
            trace.f_pcc()[k],
            trace.p_e()[k],
            trace.p_bess()[k],
            trace.p_m_star()[k],
            trace.p_d()[k],
        ]
        .map(num);
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a trace CSV written by [`write_trace_csv`]. The step is taken from
/// the time column, which must be uniform.
pub fn read_trace_csv(path: &Path, f_nominal: f64) -> Result<Trace> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.iter().collect::<Vec<_>>() != TRACE_HEADER {
        return Err(Error::Config {
            path: path.display().to_string(),
            message: format!("expected header {}", TRACE_HEADER.join(",")),
        });
    }
    let mut cols: [Vec<f64>; 6] = Default::default();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Config {
                path: path.display().to_string(),
                message: format!(
                    "line {}: column {} is not a number: '{field}'",
                    line + 2,
                    TRACE_HEADER[c]
                ),
            })?;
            cols[c].push(v);
        }
    }
    let [time, f_pcc, p_e, p_bess, p_m_star, p_d] = cols;
    if time.len() < 2 {
        return Err(Error::domain(format!(
            "{}: trace needs at least 2 samples",
            path.display()
        )));
    }
    let dt = time[1] - time[0];
    let uniform = time
        .iter()
        .enumerate()
        .all(|(k, t)| (t - k as f64 * dt).abs() <= 1e-9 * (1.0 + t.abs()));
    if !(dt > 0.0) || !uniform {
        return Err(Error::domain(format!(
            "{}: time column is not uniform",
            path.display()
        )));
    }
    Trace::from_columns(dt, f_nominal, f_pcc, p_e, p_bess, p_m_star, p_d)
}

/// File-system safe stem for a scenario name.
fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes the summary plus one trace CSV per successful scenario into
/// `out_dir`, returning the paths written.
pub fn export(run: &SweepRun, format: SummaryFormat, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let summary = match format {
        SummaryFormat::Csv => {
            let p = out_dir.join("summary.csv");
            write_summary_csv(&run.result, &p)?;
            p
        }
        SummaryFormat::Table => {
            let p = out_dir.join("summary.txt");
            fs::write(&p, summary_table(&run.result)).map_err(|e| Error::io(&p, e))?;
            p
        }
    };
    written.push(summary);
    for (name, trace) in run.names.iter().zip(&run.traces) {
        if let Some(trace) = trace {
            let p = out_dir.join(format!("trace_{}.csv", file_stem(name)));
            write_trace_csv(trace, &p)?;
            written.push(p);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems_are_sanitized() {
        assert_eq!(file_stem("ta4_kd400_kw20"), "ta4_kd400_kw20");
        assert_eq!(file_stem("a b/c"), "a_b_c");
    }

    #[test]
    fn format_names() {
        assert_eq!("csv".parse::<SummaryFormat>().unwrap(), SummaryFormat::Csv);
        assert_eq!(
            "table".parse::<SummaryFormat>().unwrap(),
            SummaryFormat::Table
        );
        assert!("xlsx".parse::<SummaryFormat>().is_err());
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 60.000_000_001, -2.749 / 16.0, 1e-300] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
