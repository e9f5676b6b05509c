//! `convergence`: bounds and errors along dyadic refinements of `[0,1)`.
//!
//! Row `m` uses `k = 2^m` equal cells and `N = k` nodes.

use clap::{Args, ValueEnum};
use linfqmc::bounds::{bounds_from_extrema, partition_extrema};
use linfqmc::estimator::integration_error;
use linfqmc::oracle::tightness;
use linfqmc::points::construct_uniform;
use linfqmc::sum::compensated_sum;
use linfqmc::{FunctionModel, Partition, Placement, Point, RangeMode, Space};

use crate::{read_config, row_bounds, Common, Outcome, RunError, Table};

pub const MAX_DEPTH: u32 = 20;

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    /// Integrand; ignored when --config supplies one.
    #[arg(long, value_enum, default_value_t = Family::Linear)]
    pub family: Family,
    /// Deepest refinement level m.
    #[arg(long, default_value_t = 10)]
    pub depth: u32,
    /// Placement used for the realized-error column.
    #[arg(long, default_value_t = Placement::CellMidpoint)]
    pub strategy: Placement,
}

impl Default for ConvergenceArgs {
    fn default() -> Self {
        ConvergenceArgs {
            family: Family::Linear,
            depth: 10,
            strategy: Placement::CellMidpoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// f(x) = x
    Linear,
    /// f(x) = x^2
    Quadratic,
    /// f(x) = sin(2 pi x)
    Sine,
    /// f(x) = 1
    Constant,
}

impl Family {
    pub fn function(self) -> FunctionModel {
        match self {
            Family::Linear => FunctionModel::identity(),
            Family::Quadratic => FunctionModel::quadratic(0.0, 0.0, 1.0),
            Family::Sine => FunctionModel::sinusoid(0.0, 1.0, 1.0, 0.0),
            Family::Constant => FunctionModel::constant(Space::unit_interval(), 1.0).expect("unit interval"),
        }
    }
}

pub const COLUMNS: &[&str] = &[
    "m",
    "k",
    "N",
    "span_bound",
    "max_oscillation",
    "weighted_oscillation",
    "realized_error",
    "adversarial_error",
    "edge_placement_error",
    "tightness",
];

/// Largest error over point sets with one node at an endpoint of each cell,
/// evaluated on the closure. The error is `|sum_j v_j / N - I|` with each
/// `v_j` chosen independently, so the maximum takes every cell's larger
/// endpoint value or every cell's smaller one.
pub fn edge_placement_error(f: &FunctionModel, partition: &Partition) -> Result<f64, RunError> {
    let n = partition.len() as f64;
    let integral = f.integral();
    let mut high = Vec::with_capacity(partition.len());
    let mut low = Vec::with_capacity(partition.len());
    for cell in partition.cells() {
        let b = cell
            .as_box()
            .ok_or_else(|| RunError::Config("edge placement needs interval cells".into()))?;
        let left = f.evaluate_base(&Point::scalar(b.lo[0]))?;
        let right = f.evaluate_base(&Point::scalar(b.hi[0]))?;
        high.push(left.max(right) / n);
        low.push(left.min(right) / n);
    }
    let up = compensated_sum(high) - integral;
    let down = integral - compensated_sum(low);
    Ok(up.max(down).max(0.0))
}

/// Essential supremum of the error over every uniform point set:
/// `max(sum mu_j G_j - I, I - sum mu_j g_j)`.
pub fn adversarial_error(f: &FunctionModel, partition: &Partition) -> Result<f64, RunError> {
    let ext = partition_extrema(f, partition)?;
    let integral = f.integral();
    let up = compensated_sum(ext.iter().zip(partition.measures()).map(|(e, m)| m * e.upper)) - integral;
    let down = integral - compensated_sum(ext.iter().zip(partition.measures()).map(|(e, m)| m * e.lower));
    Ok(up.max(down).max(0.0))
}

pub fn table(f: &FunctionModel, depth: u32, strategy: Placement, seed: u64) -> Result<Table, RunError> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(RunError::Config(format!(
            "depth must be in 1..={MAX_DEPTH}, got {depth}"
        )));
    }
    if f.space().is_finite() || f.space().dim() != 1 {
        return Err(RunError::Config("convergence needs a function on [0,1]".into()));
    }
    if f.range_mode() != RangeMode::Exact {
        return Err(RunError::Config("convergence needs an exact range mode".into()));
    }
    let mut t = Table::new(COLUMNS);
    for m in 1..=depth {
        let partition = Partition::dyadic(m)?;
        let k = partition.len();
        let ext = partition_extrema(f, &partition)?;
        let bounds = bounds_from_extrema(&ext, partition.measures());
        let points = construct_uniform(&partition, k, strategy, seed)?;
        let realized = integration_error(f, points.nodes())?;
        let adversarial = adversarial_error(f, &partition)?;
        let edge = edge_placement_error(f, &partition)?;
        let [t1, c1, c2] = row_bounds(&bounds);
        t.push(vec![
            (m as usize).into(),
            k.into(),
            k.into(),
            t1,
            c1,
            c2,
            realized.into(),
            adversarial.into(),
            edge.into(),
            tightness(adversarial, bounds.weighted_oscillation).into(),
        ]);
    }
    Ok(t)
}

pub fn run(common: &Common, args: &ConvergenceArgs) -> Result<Outcome, RunError> {
    let f = match &common.config {
        Some(path) => {
            let mut list = read_config(path)?;
            if list.len() != 1 {
                return Err(RunError::Config(format!(
                    "convergence takes one instance, found {}",
                    list.len()
                )));
            }
            list.remove(0).function
        }
        None => args.family.function(),
    };
    Ok(Outcome::ok(table(&f, args.depth, args.strategy, common.seed)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_rows() {
        let t = table(&FunctionModel::identity(), 6, Placement::CellMidpoint, 0).unwrap();
        for (i, row) in t.rows.iter().enumerate() {
            let k = (1u32 << (i + 1)) as f64;
            for v in &row[3..6] {
                assert!((v.as_f64().unwrap() - 1.0 / k).abs() <= 1e-12);
            }
            assert_eq!(row[6].as_f64().unwrap(), 0.0);
            assert!((row[7].as_f64().unwrap() - 0.5 / k).abs() <= 1e-12);
            assert!((row[8].as_f64().unwrap() - 0.5 / k).abs() <= 1e-12);
        }
    }

    #[test]
    fn edge_matches_brute_force() {
        let f = FunctionModel::sinusoid(0.0, 1.0, 1.0, 0.3);
        let p = Partition::dyadic(3).unwrap();
        let k = p.len();
        let mut best: f64 = 0.0;
        for mask in 0u32..(1 << k) {
            let nodes: Vec<Point> = p
                .cells()
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let b = c.as_box().unwrap();
                    Point::scalar(if mask >> j & 1 == 1 { b.hi[0] } else { b.lo[0] })
                })
                .collect();
            let est: f64 = nodes.iter().map(|x| f.evaluate_base(x).unwrap()).sum::<f64>() / k as f64;
            best = best.max((est - f.integral()).abs());
        }
        assert!((edge_placement_error(&f, &p).unwrap() - best).abs() < 1e-12);
    }

    #[test]
    fn constant_is_all_zero() {
        let t = table(&Family::Constant.function(), 4, Placement::SeededRandom, 3).unwrap();
        for row in &t.rows {
            for v in &row[3..9] {
                assert_eq!(v.as_f64().unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn depth_is_checked() {
        assert!(table(&FunctionModel::identity(), 21, Placement::CellMidpoint, 0).is_err());
        assert!(table(&FunctionModel::identity(), 0, Placement::CellMidpoint, 0).is_err());
    }
}
