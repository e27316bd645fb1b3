//! Trajectory, deviation and sweep tables.
//!
//! Trajectory files have the header `t`, the requested output columns in a
//! fixed order, then `state` and `method`. Numbers are written with 17
//! significant digits so that parsing restores every `f64` bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use stroblim_core::experiments::{Comparison, ConvergenceTable, Output};
use stroblim_core::linalg::bloch_vector;
use stroblim_core::trajectory::{Method, Trajectory};

use crate::error::CliError;

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_number(s: &str, line: u64, column: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| {
        CliError::Schema(format!(
            "line {line}, column {column}: '{s}' is not a number"
        ))
    })
}

/// Output columns in file order for a system of dimension `dim`.
pub fn output_columns(outputs: &[Output], dim: usize) -> Vec<String> {
    let mut sorted = outputs.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut cols = Vec::new();
    for o in sorted {
        match o {
            Output::Probabilities => {
                cols.extend(["p_up", "purity", "trace_unnormalized", "p_err"].map(String::from));
            }
            Output::Bloch => cols.extend(["r1", "r2", "r3"].map(String::from)),
            Output::Matrix => {
                for i in 0..dim {
                    for j in 0..dim {
                        cols.push(format!("rho_{i}_{j}_re"));
                        cols.push(format!("rho_{i}_{j}_im"));
                    }
                }
            }
        }
    }
    cols
}

fn known_column(name: &str) -> bool {
    const FIXED: [&str; 7] = [
        "p_up",
        "purity",
        "trace_unnormalized",
        "p_err",
        "r1",
        "r2",
        "r3",
    ];
    if FIXED.contains(&name) {
        return true;
    }
    let Some(rest) = name.strip_prefix("rho_") else {
        return false;
    };
    let parts: Vec<&str> = rest.split('_').collect();
    parts.len() == 3
        && parts[0].parse::<usize>().is_ok()
        && parts[1].parse::<usize>().is_ok()
        && (parts[2] == "re" || parts[2] == "im")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub t: f64,
    pub values: Vec<f64>,
    pub state: String,
    pub method: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryTable {
    /// Value columns between `t` and `state`.
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl TrajectoryTable {
    pub fn new(columns: Vec<String>) -> Self {
        TrajectoryTable {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Appends one row per sample of `traj`.
    pub fn push_trajectory(&mut self, label: &str, traj: &Trajectory) {
        for s in &traj.samples {
            let bloch = if s.system.dim() == 2 {
                bloch_vector(&s.system)
            } else {
                [f64::NAN; 3]
            };
            let values = self
                .columns
                .iter()
                .map(|c| match c.as_str() {
                    "p_up" => s.p_up(),
                    "purity" => s.purity(),
                    "trace_unnormalized" => s.trace,
                    "p_err" => s.p_err(),
                    "r1" => bloch[0],
                    "r2" => bloch[1],
                    "r3" => bloch[2],
                    other => matrix_entry(&s.system, other),
                })
                .collect();
            self.rows.push(Row {
                t: s.t,
                values,
                state: label.to_string(),
                method: traj.method.tag().to_string(),
            });
        }
    }

    /// Series keyed by (state, method) in first-appearance order.
    pub fn series(&self) -> Vec<((String, String), Vec<&Row>)> {
        let mut out: Vec<((String, String), Vec<&Row>)> = Vec::new();
        for r in &self.rows {
            let key = (r.state.clone(), r.method.clone());
            match out.iter_mut().find(|(k, _)| *k == key) {
                Some((_, rows)) => rows.push(r),
                None => out.push((key, vec![r])),
            }
        }
        out
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend(self.columns.iter().cloned());
        header.push("state".into());
        header.push("method".into());
        wr.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![format_number(r.t)];
            rec.extend(r.values.iter().map(|&x| format_number(x)));
            rec.push(r.state.clone());
            rec.push(r.method.clone());
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        self.write_to(file).map_err(|e| CliError::io(path, e))
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self, CliError> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let header = rd
            .headers()
            .map_err(|e| CliError::Schema(format!("cannot read header: {e}")))?
            .clone();
        let names: Vec<&str> = header.iter().collect();
        if names.len() < 3
            || names[0] != "t"
            || names[names.len() - 2] != "state"
            || names[names.len() - 1] != "method"
        {
            return Err(CliError::Schema(format!(
                "header must be 't', value columns, 'state', 'method'; got '{}'",
                names.join(",")
            )));
        }
        let columns: Vec<String> = names[1..names.len() - 2]
            .iter()
            .map(|s| s.to_string())
            .collect();
        if let Some(bad) = columns.iter().find(|c| !known_column(c)) {
            return Err(CliError::Schema(format!("unknown column '{bad}'")));
        }
        let mut table = TrajectoryTable::new(columns);
        for rec in rd.records() {
            let rec = rec.map_err(|e| CliError::Schema(format!("malformed row: {e}")))?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let t = parse_number(&rec[0], line, "t")?;
            let values = table
                .columns
                .iter()
                .enumerate()
                .map(|(k, c)| parse_number(&rec[k + 1], line, c))
                .collect::<Result<Vec<_>, _>>()?;
            let n = rec.len();
            let method = rec[n - 1].to_string();
            if Method::from_tag(&method).is_none() {
                return Err(CliError::Schema(format!(
                    "line {line}: unknown method '{method}'"
                )));
            }
            table.rows.push(Row {
                t,
                values,
                state: rec[n - 2].to_string(),
                method,
            });
        }
        Ok(table)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path)
            .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
        Self::read_from(file).map_err(|e| match e {
            CliError::Schema(msg) => CliError::Schema(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

fn matrix_entry(m: &stroblim_core::linalg::ComplexMatrix, column: &str) -> f64 {
    let parts: Vec<&str> = column.trim_start_matches("rho_").split('_').collect();
    let (i, j): (usize, usize) = (parts[0].parse().unwrap(), parts[1].parse().unwrap());
    let z = m[(i, j)];
    if parts[2] == "re" {
        z.re
    } else {
        z.im
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_deviations(path: &Path, comparisons: &[Comparison]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut wr = writer(file);
    let run = |wr: &mut csv::Writer<File>| -> Result<(), csv::Error> {
        wr.write_record([
            "t",
            "state",
            "reference",
            "candidate",
            "p_up",
            "trace_distance",
            "bloch",
        ])?;
        for c in comparisons {
            for p in &c.points {
                wr.write_record([
                    format_number(p.t),
                    c.label.clone(),
                    c.reference.tag().to_string(),
                    c.candidate.tag().to_string(),
                    format_number(p.p_up),
                    format_number(p.trace_distance),
                    format_number(p.bloch),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    };
    run(&mut wr).map_err(|e| CliError::io(path, e))
}

pub fn write_sweep(path: &Path, table: &ConvergenceTable) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut wr = writer(file);
    let run = |wr: &mut csv::Writer<File>| -> Result<(), csv::Error> {
        wr.write_record(["tau", "gamma", "max_deviation", "ratio"])?;
        for r in &table.rows {
            wr.write_record([
                format_number(r.tau),
                format_number(r.gamma),
                format_number(r.max_deviation),
                r.ratio.map(format_number).unwrap_or_default(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    };
    run(&mut wr).map_err(|e| CliError::io(path, e))
}
