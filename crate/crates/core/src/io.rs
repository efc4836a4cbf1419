//! CSV ingestion and persistence. Numeric output uses 17 significant
//! digits so a write-then-read round trip reproduces every double exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::depth::DepthVector;
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::points::{LabeledSample, PointSet};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(line);
        }
    }
    Ok(out)
}

/// Raw numeric table with the header row (if any) split off. A first row
/// with any non-numeric field is treated as a header.
struct RawTable {
    header: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

fn read_table(path: &Path) -> Result<RawTable> {
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(csv_err(path, 0, "empty file"));
    }
    let first = split_fields(&lines[0]);
    let header_detected = first.iter().any(|f| f.parse::<f64>().is_err());
    let (header, data_start) = if header_detected {
        (Some(first.iter().map(|s| s.to_string()).collect()), 1)
    } else {
        (None, 0)
    };
    let width = first.len();
    let mut rows = Vec::with_capacity(lines.len() - data_start);
    for (offset, line) in lines[data_start..].iter().enumerate() {
        let line_no = data_start + offset + 1;
        let fields = split_fields(line);
        if fields.len() != width {
            return Err(csv_err(
                path,
                line_no,
                format!("expected {width} fields, got {}", fields.len()),
            ));
        }
        let row = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| csv_err(path, line_no, format!("non-numeric cell {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(csv_err(path, 1, "no data rows"));
    }
    Ok(RawTable { header, rows })
}

/// One observation per row, numeric columns, optional header.
pub fn read_points_csv(path: impl AsRef<Path>) -> Result<PointSet> {
    let table = read_table(path.as_ref())?;
    PointSet::from_rows(&table.rows)
}

/// Labeled points; the label column is selected by name (requires a
/// header) or by zero-based index given as a numeric string.
pub fn read_labeled_csv(path: impl AsRef<Path>, label_col: &str) -> Result<LabeledSample> {
    let path = path.as_ref();
    let table = read_table(path)?;
    let width = table.rows[0].len();
    let col = if let Ok(idx) = label_col.parse::<usize>() {
        idx
    } else if let Some(header) = &table.header {
        header
            .iter()
            .position(|h| h == label_col)
            .ok_or_else(|| Error::UnknownLabelColumn(label_col.to_string()))?
    } else {
        return Err(Error::UnknownLabelColumn(label_col.to_string()));
    };
    if col >= width {
        return Err(Error::UnknownLabelColumn(label_col.to_string()));
    }
    let mut labels = Vec::with_capacity(table.rows.len());
    let mut rows = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let raw = row[col];
        if raw < 0.0 || raw.fract() != 0.0 {
            return Err(csv_err(
                path,
                i + 1,
                format!("label {raw} is not a nonnegative integer"),
            ));
        }
        labels.push(raw as usize);
        rows.push(
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, &v)| v)
                .collect::<Vec<f64>>(),
        );
    }
    // labels may be sparse in the file; compact them to 0..G-1
    let mut seen: Vec<usize> = labels.clone();
    seen.sort_unstable();
    seen.dedup();
    let labels = labels
        .iter()
        .map(|l| seen.binary_search(l).expect("present"))
        .collect();
    LabeledSample::new(PointSet::from_rows(&rows)?, labels)
}

/// Distance-matrix cache: a header line holding n, then n rows of n fields.
pub fn write_distance_matrix_csv(path: impl AsRef<Path>, d: &DistanceMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", d.n())?;
    for i in 0..d.n() {
        let row: Vec<String> = d.row(i).iter().map(|&x| fmt_f64(x)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_distance_matrix_csv(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
    let path = path.as_ref();
    let lines = read_lines(path)?;
    if lines.is_empty() {
        return Err(csv_err(path, 0, "empty file"));
    }
    let n: usize = lines[0]
        .trim()
        .parse()
        .map_err(|_| csv_err(path, 1, "header must hold the matrix size n"))?;
    if lines.len() != n + 1 {
        return Err(csv_err(
            path,
            lines.len(),
            format!("expected {n} matrix rows, got {}", lines.len() - 1),
        ));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, line) in lines[1..].iter().enumerate() {
        let fields = split_fields(line);
        if fields.len() != n {
            return Err(csv_err(
                path,
                i + 2,
                format!("expected {n} fields, got {}", fields.len()),
            ));
        }
        for f in fields {
            data.push(
                f.parse::<f64>()
                    .map_err(|_| csv_err(path, i + 2, format!("non-numeric cell {f:?}")))?,
            );
        }
    }
    DistanceMatrix::new(data, n)
}

pub fn write_points_csv(path: impl AsRef<Path>, points: &PointSet) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in points.rows() {
        let fields: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Depth output: columns (index, depth, method).
pub fn write_depth_csv(path: impl AsRef<Path>, depths: &DepthVector) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "index,depth,method")?;
    for (i, &v) in depths.values.iter().enumerate() {
        writeln!(w, "{i},{},{}", fmt_f64(v), depths.method)?;
    }
    Ok(())
}

/// Generic table writer: a header line, then string rows.
pub fn write_table(
    path: impl AsRef<Path>,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
