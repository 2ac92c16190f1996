//! Wavefront OBJ meshes and CSV node fields.
//!
//! Floats are written with 17 significant digits so files round-trip
//! exactly and identical runs produce identical bytes.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::fields::{EmbeddingJet, Grid, MetricField, Sym2};

/// Format with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Vertices in row-major grid order, each grid cell split into two
/// counter-clockwise triangles.
pub fn write_obj<W: Write>(jet: &EmbeddingJet, mut w: W) -> Result<()> {
    let g = jet.grid();
    writeln!(w, "# {} x {} grid", g.nx(), g.ny())?;
    for p in &jet.pos {
        writeln!(w, "v {} {} {}", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z))?;
    }
    for j in 0..g.ny() - 1 {
        for i in 0..g.nx() - 1 {
            let a = g.index(i, j) + 1;
            let b = a + 1;
            let c = g.index(i + 1, j + 1) + 1;
            let d = g.index(i, j + 1) + 1;
            writeln!(w, "f {a} {b} {c}")?;
            writeln!(w, "f {a} {c} {d}")?;
        }
    }
    Ok(())
}

pub fn write_metric_csv<W: Write>(field: &MetricField, mut w: W) -> Result<()> {
    let g = field.grid();
    writeln!(w, "x_idx,y_idx,E,F,G")?;
    for (idx, m) in field.data.iter().enumerate() {
        let (i, j) = g.ij(idx);
        writeln!(w, "{i},{j},{},{},{}", fmt_f64(m.e), fmt_f64(m.f), fmt_f64(m.g))?;
    }
    Ok(())
}

pub fn read_metric_csv<R: BufRead>(r: R) -> Result<MetricField> {
    let (grid, rows) = read_indexed_rows(r, 3)?;
    let data = rows.into_iter().map(|v| Sym2::new(v[0], v[1], v[2])).collect();
    MetricField::new(grid, data)
}

pub fn write_scalar_csv<W: Write>(grid: &Grid, name: &str, values: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "x_idx,y_idx,{name}")?;
    for (idx, v) in values.iter().enumerate() {
        let (i, j) = grid.ij(idx);
        writeln!(w, "{i},{j},{}", fmt_f64(*v))?;
    }
    Ok(())
}

pub fn read_scalar_csv<R: BufRead>(r: R) -> Result<(Grid, Vec<f64>)> {
    let (grid, rows) = read_indexed_rows(r, 1)?;
    Ok((grid, rows.into_iter().map(|v| v[0]).collect()))
}

// Rows `x_idx,y_idx,v1..vk` with a header line; the grid is inferred from
// the largest indices and every node must appear exactly once.
fn read_indexed_rows<R: BufRead>(r: R, width: usize) -> Result<(Grid, Vec<Vec<f64>>)> {
    let mut entries = Vec::new();
    let mut nx = 0;
    let mut ny = 0;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || lineno == 0 && line.starts_with("x_idx") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 + width {
            return Err(Error::Parse(format!(
                "line {}: expected {} columns, found {}",
                lineno + 1,
                2 + width,
                cols.len()
            )));
        }
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", lineno + 1));
        let i: usize = cols[0].parse().map_err(|_| bad("x_idx"))?;
        let j: usize = cols[1].parse().map_err(|_| bad("y_idx"))?;
        let vals = cols[2..]
            .iter()
            .map(|c| c.parse::<f64>().map_err(|_| bad("value")))
            .collect::<Result<Vec<_>>>()?;
        nx = nx.max(i + 1);
        ny = ny.max(j + 1);
        entries.push((i, j, vals));
    }
    let grid = Grid::new(nx, ny).map_err(|_| Error::Parse(format!("grid {nx}x{ny} is too small")))?;
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; grid.len()];
    for (i, j, vals) in entries {
        let slot = &mut rows[grid.index(i, j)];
        if slot.is_some() {
            return Err(Error::Parse(format!("node ({i}, {j}) listed twice")));
        }
        *slot = Some(vals);
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(idx, r)| {
            r.ok_or_else(|| {
                let (i, j) = grid.ij(idx);
                Error::Parse(format!("node ({i}, {j}) missing"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((grid, rows))
}
