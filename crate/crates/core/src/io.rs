//! Grid CSV files and SVG heatmaps.
//!
//! CSV layout: a header record `dims=<d1>x<d2>...`, then one record per slice along the
//! last axis, values in row-major order with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gridfn::{GridFunction, StepFunction1D};
use crate::rationalize::CellBox;

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidGrid(format!("csv: {e}"))
}

pub fn grid_to_csv(f: &GridFunction) -> Result<String> {
    let dims = f.dims();
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let header = dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x");
    w.write_record([format!("dims={header}")]).map_err(csv_err)?;
    let last = *dims.last().unwrap();
    for row in f.values().chunks(last) {
        w.write_record(row.iter().map(|&v| fmt17(v))).map_err(csv_err)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
}

pub fn grid_from_csv(text: &str) -> Result<GridFunction> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut records = r.records();
    let head = records.next().ok_or_else(|| csv_err("empty file"))?.map_err(csv_err)?;
    let dims: Vec<usize> = head
        .get(0)
        .and_then(|h| h.trim().strip_prefix("dims="))
        .ok_or_else(|| csv_err("missing dims= header"))?
        .split('x')
        .map(|d| d.trim().parse::<usize>().map_err(csv_err))
        .collect::<Result<_>>()?;
    let mut values = Vec::new();
    for rec in records {
        for field in rec.map_err(csv_err)?.iter() {
            values.push(field.trim().parse::<f64>().map_err(csv_err)?);
        }
    }
    GridFunction::new(&dims, values)
}

/// One value per cell, single column.
pub fn step_to_csv(q: &StepFunction1D) -> String {
    q.values().iter().map(|&v| fmt17(v) + "\n").collect()
}

pub fn write_grid_csv(path: &Path, f: &GridFunction) -> Result<()> {
    std::fs::write(path, grid_to_csv(f)?).map_err(|e| Error::InvalidGrid(format!("{}: {e}", path.display())))
}

pub fn read_grid_csv(path: &Path) -> Result<GridFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidGrid(format!("{}: {e}", path.display())))?;
    grid_from_csv(&text)
}

const CELL_PX: usize = 12;
const LEVEL_TOL: f64 = 1e-7;

fn colour(v: f64) -> &'static str {
    if v <= LEVEL_TOL {
        "#ffffff"
    } else if v >= 1.0 - LEVEL_TOL {
        "#d62728"
    } else {
        "#1f77b4"
    }
}

/// Heatmap of a 1D or 2D grid: white for 0, blue for fractional values, red for 1.
/// Axis 0 runs left to right and axis 1 bottom to top. `rect` is outlined in black.
pub fn heatmap_svg(f: &GridFunction, rect: Option<CellBox>) -> Result<String> {
    let (m1, m2) = match f.dims() {
        [m] => (*m, 1),
        [a, b] => (*a, *b),
        d => return Err(Error::InvalidGrid(format!("heatmap needs 1 or 2 axes, got {}", d.len()))),
    };
    let (w, h) = (m1 * CELL_PX, m2 * CELL_PX);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    for i in 0..m1 {
        for j in 0..m2 {
            let v = f.values()[i * m2 + j];
            let (x, y) = (i * CELL_PX, (m2 - 1 - j) * CELL_PX);
            let _ = writeln!(
                s,
                r##"<rect x="{x}" y="{y}" width="{CELL_PX}" height="{CELL_PX}" fill="{}" stroke="#dddddd" stroke-width="0.5"/>"##,
                colour(v)
            );
        }
    }
    if let Some([(a0, a1), (b0, b1)]) = rect {
        let (x, y) = (a0 * CELL_PX, (m2 - 1 - b1) * CELL_PX);
        let (rw, rh) = ((a1 - a0 + 1) * CELL_PX, (b1 - b0 + 1) * CELL_PX);
        let _ = writeln!(s, r##"<rect x="{x}" y="{y}" width="{rw}" height="{rh}" fill="none" stroke="#000000" stroke-width="2"/>"##);
    }
    s.push_str("</svg>\n");
    Ok(s)
}
