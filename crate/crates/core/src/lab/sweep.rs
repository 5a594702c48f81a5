use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cube::{construction, Configuration, ConstructionKind};
use crate::error::{Error, Result};
use crate::rng::RngSpec;
use crate::scalar::Arithmetic;

use super::estimate::{
    estimate_evasion, estimate_glue_sum, estimate_linf_tail, random_unit_configuration, EstimateReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Random,
    Axis,
    MiddleLayers,
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellKind::Random => "random",
            CellKind::Axis => "axis",
            CellKind::MiddleLayers => "middle_layers",
        })
    }
}

impl FromStr for CellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(CellKind::Random),
            "axis" => Ok(CellKind::Axis),
            "middle_layers" | "middle-layers" => Ok(CellKind::MiddleLayers),
            other => Err(Error::UnknownConstruction(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepCell {
    pub n: usize,
    pub m: usize,
    pub kind: CellKind,
    pub seed: u64,
}

/// `round(n^(2/3))`, the plane count on the diagonal `m ~ n^(2/3)`.
pub fn diagonal_m(n: usize) -> usize {
    (n as f64).powf(2.0 / 3.0).round() as usize
}

/// Cartesian product of the inputs. With `ms` empty, each `n` is paired
/// with `diagonal_m(n)`.
pub fn grid(ns: &[usize], ms: &[usize], kinds: &[CellKind], seeds: &[u64]) -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for &n in ns {
        let row_ms = if ms.is_empty() { vec![diagonal_m(n)] } else { ms.to_vec() };
        for &m in &row_ms {
            for &kind in kinds {
                for &seed in seeds {
                    cells.push(SweepCell { n, m, kind, seed });
                }
            }
        }
    }
    cells
}

/// The configuration evaluated for a cell. Random cells draw from stream 1
/// of the cell seed; construction cells keep `m` of their planes (the axes
/// with the lowest indices, or the layers closest to the center).
pub fn cell_configuration(cell: &SweepCell) -> Result<Configuration> {
    match cell.kind {
        CellKind::Random => random_unit_configuration(cell.n, cell.m, &RngSpec::with_stream(cell.seed, 1)),
        CellKind::Axis | CellKind::MiddleLayers => {
            let kind =
                if cell.kind == CellKind::Axis { ConstructionKind::Axis } else { ConstructionKind::MiddleLayers };
            let full = construction(kind, cell.n, Arithmetic::Float)?;
            if cell.m > full.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} has only {} planes in dimension {}",
                    cell.kind,
                    full.len(),
                    cell.n
                )));
            }
            let mut keep: Vec<usize> = (0..full.len()).collect();
            if cell.kind == CellKind::MiddleLayers {
                let center = (full.len() as f64 - 1.0) / 2.0;
                keep.sort_by(|a, b| (*a as f64 - center).abs().total_cmp(&(*b as f64 - center).abs()).then(a.cmp(b)));
            }
            keep.truncate(cell.m);
            keep.sort_unstable();
            let planes = keep.iter().map(|&i| full.planes()[i].clone()).collect();
            Configuration::new(cell.n, planes, full.mode())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub kind: CellKind,
    pub seed: u64,
    pub samples: u64,
    pub union_estimate: Option<f64>,
    pub union_std_error: Option<f64>,
    pub max_plane_estimate: Option<f64>,
    pub evasion_shape: Option<f64>,
    pub fitted_constant: Option<f64>,
    pub linf_tail: Option<f64>,
    pub linf_tail_std_error: Option<f64>,
    pub glue_estimate: Option<f64>,
    pub glue_std_error: Option<f64>,
    pub glue_target: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn empty(cell: &SweepCell, samples: u64) -> Self {
        SweepRow {
            n: cell.n,
            m: cell.m,
            kind: cell.kind,
            seed: cell.seed,
            samples,
            union_estimate: None,
            union_std_error: None,
            max_plane_estimate: None,
            evasion_shape: None,
            fitted_constant: None,
            linf_tail: None,
            linf_tail_std_error: None,
            glue_estimate: None,
            glue_std_error: None,
            glue_target: None,
            error: None,
        }
    }
}

/// All three estimators for one cell, each run from `RngSpec::new(cell.seed)`.
/// The glue sum is taken for plane 0 at its own threshold.
pub fn run_cell(cell: &SweepCell, samples: u64) -> Result<SweepRow> {
    let c = cell_configuration(cell)?;
    let rng = RngSpec::new(cell.seed);
    let evasion = estimate_evasion(&c, samples, &rng)?;
    let tail = estimate_linf_tail(&c, samples, &rng)?;
    let t = c.planes()[0].unit_float()?.threshold().to_owned();
    let glue: EstimateReport = estimate_glue_sum(&c, 0, t, samples, &rng)?;
    let mut row = SweepRow::empty(cell, samples);
    row.union_estimate = Some(evasion.union.point_estimate);
    row.union_std_error = Some(evasion.union.std_error);
    row.max_plane_estimate = Some(evasion.max_plane_estimate());
    row.evasion_shape = Some(evasion.target_shape);
    row.fitted_constant = Some(evasion.fitted_constant);
    row.linf_tail = Some(tail.point_estimate);
    row.linf_tail_std_error = Some(tail.std_error);
    row.glue_estimate = Some(glue.point_estimate);
    row.glue_std_error = Some(glue.std_error);
    row.glue_target = glue.target_bound;
    Ok(row)
}

/// Evaluates every cell in order. A failing cell yields a row carrying the
/// error message and does not stop the sweep.
pub fn sweep(cells: &[SweepCell], samples: u64) -> Vec<SweepRow> {
    cells
        .iter()
        .map(|cell| {
            run_cell(cell, samples).unwrap_or_else(|e| {
                let mut row = SweepRow::empty(cell, samples);
                row.error = Some(format!("{}: {e}", e.kind()));
                row
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_values() {
        assert_eq!(diagonal_m(8), 4);
        assert_eq!(diagonal_m(64), 16);
        assert_eq!(grid(&[8, 64], &[], &[CellKind::Random], &[1]).len(), 2);
        assert_eq!(grid(&[8], &[1, 2], &[CellKind::Random, CellKind::Axis], &[1, 2]).len(), 8);
    }

    #[test]
    fn middle_cells_keep_central_layers() {
        let cell = SweepCell { n: 6, m: 2, kind: CellKind::MiddleLayers, seed: 0 };
        let c = cell_configuration(&cell).unwrap();
        let ts: Vec<f64> = c.planes().iter().map(|p| p.threshold_f64()).collect();
        let s = 6f64.sqrt();
        assert!((ts[0] - 1.0 / s).abs() < 1e-12 && (ts[1] + 1.0 / s).abs() < 1e-12);
    }

    #[test]
    fn failing_cell_is_isolated() {
        let cells = [
            SweepCell { n: 8, m: 0, kind: CellKind::Random, seed: 1 },
            SweepCell { n: 8, m: 2, kind: CellKind::Random, seed: 1 },
        ];
        let rows = sweep(&cells, 500);
        assert!(rows[0].error.as_deref().unwrap().starts_with("EmptyConfiguration"));
        assert!(rows[1].error.is_none() && rows[1].union_estimate.is_some());
    }

    #[test]
    fn single_cell_matches_direct_estimates() {
        let cell = SweepCell { n: 16, m: 3, kind: CellKind::Random, seed: 4 };
        let row = &sweep(&[cell], 2_000)[0];
        let c = cell_configuration(&cell).unwrap();
        let direct = estimate_evasion(&c, 2_000, &RngSpec::new(4)).unwrap();
        assert_eq!(row.union_estimate, Some(direct.union.point_estimate));
        let tail = estimate_linf_tail(&c, 2_000, &RngSpec::new(4)).unwrap();
        assert_eq!(row.linf_tail, Some(tail.point_estimate));
    }
}
