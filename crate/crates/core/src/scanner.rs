//! Raster maps of the certified image count as one extra mass sweeps a window.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certify::{certified_solve, check_theorem_bounds};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lens::{FieldKind, LensField, Mass, MassConfig};
use crate::solver::{SolveOptions, Window};

/// Default exclusion radius as a fraction of the window diagonal.
pub const EXCLUSION_FRACTION: f64 = 0.02;

const CSV_HEADER: &str = "x,y,count";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub fixed: MassConfig,
    pub new_sigma: f64,
    pub window: Window,
    /// Cells along x and y.
    pub resolution: (usize, usize),
    pub exclusion_radius: f64,
}

impl ScanSpec {
    /// A validated spec; `exclusion_radius` defaults to a fixed fraction of the
    /// window diagonal.
    pub fn new(
        fixed: MassConfig,
        new_sigma: f64,
        window: Window,
        resolution: (usize, usize),
        exclusion_radius: Option<f64>,
    ) -> Result<Self> {
        let spec = ScanSpec {
            fixed,
            new_sigma,
            window,
            resolution,
            exclusion_radius: exclusion_radius.unwrap_or(EXCLUSION_FRACTION * window.diagonal()),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.window;
        if !(w.width() > 0.0 && w.height() > 0.0 && w.width().is_finite() && w.height().is_finite()) {
            return Err(Error::InvalidInput(format!("degenerate scan window {w:?}")));
        }
        if self.resolution.0 == 0 || self.resolution.1 == 0 {
            return Err(Error::InvalidInput("scan resolution must be positive".into()));
        }
        if !(self.exclusion_radius > 0.0 && self.exclusion_radius.is_finite()) {
            return Err(Error::InvalidInput("exclusion radius must be positive".into()));
        }
        if !(self.new_sigma > 0.0 && self.new_sigma.is_finite()) {
            return Err(Error::InvalidInput("swept mass must be positive".into()));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.resolution.0 * self.resolution.1
    }

    /// Center of column `i` and row `j`; row 0 is the top (largest y).
    pub fn cell_center(&self, i: usize, j: usize) -> Complex64 {
        let (nx, ny) = self.resolution;
        let w = &self.window;
        Complex64::new(
            w.xmin + (i as f64 + 0.5) * w.width() / nx as f64,
            w.ymax - (j as f64 + 0.5) * w.height() / ny as f64,
        )
    }

    /// `(column, row)` of the cell containing `z`.
    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let w = &self.window;
        if !w.contains(z) {
            return None;
        }
        let (nx, ny) = self.resolution;
        let i = (((z.re - w.xmin) / w.width()) * nx as f64).floor() as usize;
        let j = (((w.ymax - z.im) / w.height()) * ny as f64).floor() as usize;
        Some((i.min(nx - 1), j.min(ny - 1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Count(usize),
    NonSimple,
    Excluded,
}

impl Cell {
    /// CSV code: the count, `-1` for non-simple, `-2` for excluded.
    pub fn code(self) -> i64 {
        match self {
            Cell::Count(k) => k as i64,
            Cell::NonSimple => -1,
            Cell::Excluded => -2,
        }
    }

    pub fn from_code(code: i64) -> Result<Self> {
        match code {
            -1 => Ok(Cell::NonSimple),
            -2 => Ok(Cell::Excluded),
            k if k >= 0 => Ok(Cell::Count(k as usize)),
            k => Err(Error::InvalidInput(format!("invalid cell code {k}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountMap {
    pub spec: ScanSpec,
    /// Row-major from the top row.
    pub cells: Vec<Cell>,
    /// Certified count -> number of cells.
    pub histogram: BTreeMap<usize, usize>,
    pub non_simple: usize,
    pub excluded: usize,
}

impl CountMap {
    pub fn cell(&self, i: usize, j: usize) -> Cell {
        self.cells[j * self.spec.resolution.0 + i]
    }

    pub fn cell_at(&self, z: Complex64) -> Option<Cell> {
        self.spec.cell_of(z).map(|(i, j)| self.cell(i, j))
    }

    /// `(x, y, cell)` for every cell in storage order.
    pub fn rows(&self) -> Vec<(f64, f64, Cell)> {
        let nx = self.spec.resolution.0;
        self.cells
            .iter()
            .enumerate()
            .map(|(idx, &cell)| {
                let z = self.spec.cell_center(idx % nx, idx / nx);
                (z.re, z.im, cell)
            })
            .collect()
    }

    fn from_cells(spec: ScanSpec, cells: Vec<Cell>) -> Self {
        let mut histogram = BTreeMap::new();
        let (mut non_simple, mut excluded) = (0, 0);
        for cell in &cells {
            match cell {
                Cell::Count(k) => *histogram.entry(*k).or_insert(0) += 1,
                Cell::NonSimple => non_simple += 1,
                Cell::Excluded => excluded += 1,
            }
        }
        CountMap {
            spec,
            cells,
            histogram,
            non_simple,
            excluded,
        }
    }
}

/// Certified image count with an extra mass at `p`.
fn evaluate_cell(spec: &ScanSpec, p: Complex64) -> Cell {
    if spec.fixed.positions().any(|z| (z - p).norm() < spec.exclusion_radius) {
        return Cell::Excluded;
    }
    let n = spec.fixed.len() + 1;
    let certified = spec
        .fixed
        .with_mass(Mass::new(p, spec.new_sigma))
        .and_then(|cfg| LensField::from_masses(&cfg))
        .and_then(|f| certified_solve(&f, &SolveOptions::default()));
    match certified {
        Ok((report, _)) if check_theorem_bounds(FieldKind::Physical, n, report.k()) => Cell::Count(report.k()),
        _ => Cell::NonSimple,
    }
}

pub fn scan(spec: &ScanSpec) -> Result<CountMap> {
    scan_with(spec, Execution::default())
}

pub fn scan_with(spec: &ScanSpec, exec: Execution) -> Result<CountMap> {
    spec.validate()?;
    let nx = spec.resolution.0;
    let cells = exec.map_indexed(spec.cell_count(), |idx| {
        evaluate_cell(spec, spec.cell_center(idx % nx, idx / nx))
    });
    Ok(CountMap::from_cells(spec.clone(), cells))
}

pub type Rgb = [u8; 3];

/// Background for excluded cells, then non-simple cells, then one color per
/// count in ascending order.
pub fn default_palette() -> Vec<Rgb> {
    vec![
        [255, 255, 255],
        [128, 128, 128],
        [46, 160, 67],
        [214, 39, 40],
        [31, 119, 180],
        [255, 200, 14],
        [227, 119, 194],
        [23, 190, 207],
        [20, 20, 20],
        [148, 103, 189],
        [140, 86, 75],
        [188, 189, 34],
        [255, 127, 14],
        [174, 199, 232],
        [152, 223, 138],
        [255, 152, 150],
        [197, 176, 213],
        [196, 156, 148],
    ]
}

/// Binary P6 pixmap, one pixel per cell, top row first.
pub fn render(map: &CountMap, palette: &[Rgb]) -> Result<Vec<u8>> {
    let need = 2 + map.histogram.len();
    if palette.len() < need {
        return Err(Error::PaletteExhausted {
            have: palette.len(),
            need,
        });
    }
    let slot: BTreeMap<usize, usize> = map.histogram.keys().enumerate().map(|(i, &k)| (k, i + 2)).collect();
    let (nx, ny) = map.spec.resolution;
    let mut out = format!("P6\n{nx} {ny}\n255\n").into_bytes();
    out.reserve(3 * map.cells.len());
    for cell in &map.cells {
        let color = match cell {
            Cell::Excluded => palette[0],
            Cell::NonSimple => palette[1],
            Cell::Count(k) => palette[slot[k]],
        };
        out.extend_from_slice(&color);
    }
    Ok(out)
}

/// `x,y,count` with 17 significant digits.
pub fn export_csv(map: &CountMap) -> String {
    let mut out = String::with_capacity(48 * (map.cells.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (x, y, cell) in map.rows() {
        writeln!(out, "{x:.16e},{y:.16e},{}", cell.code()).expect("writing to a String");
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<(f64, f64, Cell)>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::InvalidInput(format!("CSV header must be `{CSV_HEADER}`")));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::InvalidInput(format!("malformed CSV row {}: {line}", i + 2));
            let mut parts = line.split(',');
            let x: f64 = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            let y: f64 = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            let code: i64 = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            Ok((x, y, Cell::from_code(code)?))
        })
        .collect()
}

/// Histogram of certified counts in parsed CSV rows.
pub fn histogram_of(rows: &[(f64, f64, Cell)]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for (_, _, cell) in rows {
        if let Cell::Count(k) = cell {
            *h.entry(*k).or_insert(0) += 1;
        }
    }
    h
}
