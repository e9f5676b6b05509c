//! Per-cell essential extrema and the three worst-case error bounds for
//! uniform point sets.
//!
//! For a partition `M_1, ..., M_k` the span `L_M` of `1` and the indicators
//! `chi_{M_j}` is exactly the set of functions constant on each cell (the
//! indicators sum to `1`). The best constant on a cell in the sup norm is the
//! midpoint of the essential range, and choices on different cells are
//! independent, so
//!
//! ```text
//! D(f, L_M) = max_j (G_j - g_j) / 2
//! ```
//!
//! attained by the midpoint approximant. The three bounds are then
//! `2 D`, `max_j (G_j - g_j)` and `sum_j mu(M_j) (G_j - g_j)`.

use crate::error::Result;
use crate::measure::{Cell, FunctionModel, Partition};
use crate::sum::compensated_sum;

/// Upper and lower essential values of `f` on one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellExtrema {
    pub cell_index: usize,
    /// `G_j(f)`
    pub upper: f64,
    /// `g_j(f)`
    pub lower: f64,
    pub exact: bool,
}

impl CellExtrema {
    pub fn oscillation(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.upper + self.lower)
    }
}

/// Upper/lower values from the positive and negative parts of `f`:
///
/// * `G = -essinf f^-` when `f^+ = 0` a.e. on the cell, else `esssup f^+`;
/// * `g = essinf f^+` when `f^- = 0` a.e. on the cell, else `-esssup f^-`.
///
/// Both reduce to the essential supremum and infimum of `f` itself.
pub fn cell_extrema(f: &FunctionModel, cell: &Cell, cell_index: usize) -> Result<CellExtrema> {
    let range = f.essential_range(cell)?;
    let (lo, hi) = (range.lo, range.hi);
    // Essential ranges of f+ = max(f, 0) and f- = -min(f, 0).
    let (pos_lo, pos_hi) = (lo.max(0.0), hi.max(0.0));
    let (neg_lo, neg_hi) = ((-hi).max(0.0), (-lo).max(0.0));

    let positive_part_null = hi <= 0.0;
    let upper = if positive_part_null { -neg_lo } else { pos_hi };
    let negative_part_null = lo >= 0.0;
    let lower = if negative_part_null { pos_lo } else { -neg_hi };

    Ok(CellExtrema {
        cell_index,
        upper: upper + 0.0,
        lower: lower + 0.0,
        exact: range.exact,
    })
}

pub fn partition_extrema(f: &FunctionModel, partition: &Partition) -> Result<Vec<CellExtrema>> {
    partition
        .cells()
        .iter()
        .enumerate()
        .map(|(j, c)| cell_extrema(f, c, j))
        .collect()
}

/// Maximum essential oscillation `S_M(f) = max_j (G_j - g_j)`.
pub fn s_value(f: &FunctionModel, partition: &Partition) -> Result<f64> {
    Ok(max_oscillation(&partition_extrema(f, partition)?))
}

fn max_oscillation(extrema: &[CellExtrema]) -> f64 {
    extrema.iter().map(CellExtrema::oscillation).fold(0.0, f64::max)
}

/// Per-cell constants of an element of `L_M` for a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanCoefficients {
    pub constants: Vec<f64>,
}

impl SpanCoefficients {
    pub fn new(constants: Vec<f64>) -> Self {
        SpanCoefficients { constants }
    }

    /// The approximant as a function model.
    pub fn to_function(&self, partition: &Partition) -> Result<FunctionModel> {
        FunctionModel::piecewise_constant(partition.clone(), self.constants.clone())
    }
}

/// Midpoint approximant `C_j = (G_j + g_j) / 2`.
pub fn optimal_approximant(f: &FunctionModel, partition: &Partition) -> Result<SpanCoefficients> {
    Ok(SpanCoefficients::new(
        partition_extrema(f, partition)?
            .iter()
            .map(CellExtrema::midpoint)
            .collect(),
    ))
}

/// `||f - l||_inf` for `l` constant on each cell of `partition`.
pub fn sup_norm_distance(f: &FunctionModel, l: &SpanCoefficients, partition: &Partition) -> Result<f64> {
    assert_eq!(l.constants.len(), partition.len(), "one constant per partition cell");
    let mut worst: f64 = 0.0;
    for (cell, &c) in partition.cells().iter().zip(&l.constants) {
        let r = f.essential_range(cell)?;
        worst = worst.max((r.hi - c).abs()).max((r.lo - c).abs());
    }
    Ok(worst)
}

/// `D(f, L_M)` for a partition (see the module docs).
pub fn distance_to_span(f: &FunctionModel, partition: &Partition) -> Result<f64> {
    Ok(0.5 * s_value(f, partition)?)
}

/// The three worst-case error bounds for uniform point sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSet {
    /// `2 D(f, L_M)`
    pub span_distance_bound: f64,
    /// `S_M(f)`
    pub max_oscillation: f64,
    /// `sum_j mu(M_j) (G_j - g_j)`
    pub weighted_oscillation: f64,
    /// `D(f, L_M)`
    pub distance: f64,
    /// False when any cell range came from a grid estimate.
    pub exact: bool,
}

impl BoundSet {
    pub const ZERO: BoundSet = BoundSet {
        span_distance_bound: 0.0,
        max_oscillation: 0.0,
        weighted_oscillation: 0.0,
        distance: 0.0,
        exact: true,
    };

    /// The sharpest of the three bounds.
    pub fn sharpest(&self) -> f64 {
        self.weighted_oscillation
            .min(self.max_oscillation)
            .min(self.span_distance_bound)
    }

    /// Field-wise equality of the bit patterns.
    pub fn bit_identical(&self, other: &BoundSet) -> bool {
        self.span_distance_bound.to_bits() == other.span_distance_bound.to_bits()
            && self.max_oscillation.to_bits() == other.max_oscillation.to_bits()
            && self.weighted_oscillation.to_bits() == other.weighted_oscillation.to_bits()
            && self.distance.to_bits() == other.distance.to_bits()
            && self.exact == other.exact
    }
}

pub fn bound_set(f: &FunctionModel, partition: &Partition) -> Result<BoundSet> {
    let extrema = partition_extrema(f, partition)?;
    Ok(bounds_from_extrema(&extrema, partition.measures()))
}

/// Assembles the bounds from per-cell extrema; the weighted sum runs in cell
/// index order.
pub fn bounds_from_extrema(extrema: &[CellExtrema], measures: &[f64]) -> BoundSet {
    let s = max_oscillation(extrema);
    let distance = 0.5 * s;
    let weighted = compensated_sum(extrema.iter().zip(measures).map(|(e, m)| m * e.oscillation()));
    BoundSet {
        span_distance_bound: 2.0 * distance,
        max_oscillation: s,
        weighted_oscillation: weighted,
        distance,
        exact: extrema.iter().all(|e| e.exact),
    }
}
