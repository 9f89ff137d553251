// SPDX-License-Identifier: MIT OR Apache-2.0

//! Text formats for sequences and distance matrices.
//!
//! * vector / functional CSV: one observation per row, comma separated reals,
//!   an optional header row is skipped when its first cell is not numeric;
//! * graph stack: blocks of `m` rows of `m` space separated 0/1 entries,
//!   blocks separated by blank lines;
//! * distance matrix: square CSV of reals.

use crate::data::{DistanceMatrix, Graph, Observation, Sequence};
use crate::error::{CpdError, Result};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// On-disk layout of a sequence file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceFormat {
    VectorCsv,
    FunctionalCsv,
    GraphStack,
}

pub fn read_sequence(path: impl AsRef<Path>, format: SequenceFormat) -> Result<Sequence> {
    let text = fs::read_to_string(path)?;
    parse_sequence(&text, format)
}

pub fn parse_sequence(text: &str, format: SequenceFormat) -> Result<Sequence> {
    let items = match format {
        SequenceFormat::VectorCsv => parse_csv_rows(text)?
            .into_iter()
            .map(Observation::Vector)
            .collect(),
        SequenceFormat::FunctionalCsv => parse_csv_rows(text)?
            .into_iter()
            .map(Observation::Function)
            .collect(),
        SequenceFormat::GraphStack => parse_graph_stack(text)?
            .into_iter()
            .map(Observation::Graph)
            .collect(),
    };
    Sequence::new(items)
}

pub fn write_sequence(path: impl AsRef<Path>, seq: &Sequence) -> Result<()> {
    fs::write(path, format_sequence(seq))?;
    Ok(())
}

/// Serializes a sequence in the format matching its observation kind.
pub fn format_sequence(seq: &Sequence) -> String {
    let mut out = String::new();
    for (idx, item) in seq.items().iter().enumerate() {
        match item {
            Observation::Vector(v) | Observation::Function(v) => {
                out.push_str(&join_reals(v));
                out.push('\n');
            }
            Observation::Graph(g) => {
                if idx > 0 {
                    out.push('\n');
                }
                let m = g.nodes();
                for i in 0..m {
                    let row: Vec<&str> = (0..m)
                        .map(|j| if g.has_edge(i, j) { "1" } else { "0" })
                        .collect();
                    out.push_str(&row.join(" "));
                    out.push('\n');
                }
            }
        }
    }
    out
}

pub fn read_distance_matrix(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
    let text = fs::read_to_string(path)?;
    parse_distance_matrix(&text)
}

pub fn parse_distance_matrix(text: &str) -> Result<DistanceMatrix> {
    let rows = parse_reals(text, false)?;
    DistanceMatrix::from_rows(rows)
}

pub fn write_distance_matrix(path: impl AsRef<Path>, d: &DistanceMatrix) -> Result<()> {
    fs::write(path, format_distance_matrix(d))?;
    Ok(())
}

pub fn format_distance_matrix(d: &DistanceMatrix) -> String {
    let mut out = String::with_capacity(d.n() * d.n() * 8);
    for i in 0..d.n() {
        let _ = writeln!(out, "{}", join_reals(d.row(i)));
    }
    out
}

fn join_reals(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
    cells.join(",")
}

fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let rows = parse_reals(text, true)?;
    if let Some(first) = rows.first() {
        let width = first.len();
        // parse_reals already reports ragged rows; an empty row is still possible
        // only for an empty file.
        if width == 0 {
            return Err(CpdError::Parse {
                line: 1,
                message: "empty row".into(),
            });
        }
    }
    Ok(rows)
}

/// Parses comma separated reals, one record per non-empty line, requiring a
/// constant row width. When `allow_header` is set, a first line whose first
/// cell does not parse as a number is skipped.
fn parse_reals(text: &str, allow_header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut seen_first = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if !seen_first {
            seen_first = true;
            if allow_header && cells[0].parse::<f64>().is_err() {
                continue;
            }
        }
        let mut row = Vec::with_capacity(cells.len());
        for cell in &cells {
            let v = cell.parse::<f64>().map_err(|_| CpdError::Parse {
                line: line_no,
                message: format!("not a number: {cell:?}"),
            })?;
            if !v.is_finite() {
                return Err(CpdError::Parse {
                    line: line_no,
                    message: format!("non-finite value: {cell:?}"),
                });
            }
            row.push(v);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(CpdError::Parse {
                    line: line_no,
                    message: format!("expected {w} columns, found {}", row.len()),
                })
            }
            Some(_) => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

fn parse_graph_stack(text: &str) -> Result<Vec<Graph>> {
    let mut graphs = Vec::new();
    let mut block: Vec<(usize, Vec<u8>)> = Vec::new();

    let flush = |block: &mut Vec<(usize, Vec<u8>)>, graphs: &mut Vec<Graph>| -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        let m = block.len();
        let start_line = block[0].0;
        let mut adjacency = Vec::with_capacity(m * m);
        for (line_no, row) in block.iter() {
            if row.len() != m {
                return Err(CpdError::Parse {
                    line: *line_no,
                    message: format!("block starting at line {start_line} has {m} rows but this row has {} entries", row.len()),
                });
            }
            adjacency.extend_from_slice(row);
        }
        let g = Graph::new(m, adjacency).map_err(|e| CpdError::Parse {
            line: start_line,
            message: e.to_string(),
        })?;
        graphs.push(g);
        block.clear();
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            flush(&mut block, &mut graphs)?;
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split_whitespace() {
            match cell {
                "0" => row.push(0),
                "1" => row.push(1),
                other => {
                    return Err(CpdError::Parse {
                        line: line_no,
                        message: format!("adjacency entry must be 0 or 1, got {other:?}"),
                    })
                }
            }
        }
        block.push((line_no, row));
    }
    flush(&mut block, &mut graphs)?;

    if let Some(first) = graphs.first() {
        let m = first.nodes();
        if let Some(pos) = graphs.iter().position(|g| g.nodes() != m) {
            return Err(CpdError::DimensionMismatch {
                index: pos,
                expected: m,
                found: graphs[pos].nodes(),
            });
        }
    }
    Ok(graphs)
}
