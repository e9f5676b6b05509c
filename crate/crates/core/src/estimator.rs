//! QMC estimates, realized errors and per-instance bound reports.

use crate::bounds::{bound_set, BoundSet};
use crate::error::{Error, Result};
use crate::measure::{FunctionModel, Partition, Point};
use crate::points::is_uniform;
use crate::sum::CompensatedSum;
use crate::BOUND_SLACK;

/// Node count above which the estimate switches to compensated summation.
pub const COMPENSATED_THRESHOLD: usize = 10_000;

/// Equal-weight mean `(1/N) sum_n f(X_n)`, summed in node order.
pub fn qmc_estimate(f: &FunctionModel, nodes: &[Point]) -> Result<f64> {
    let values = nodes.iter().map(|p| f.evaluate(p));
    mean(values, nodes.len())
}

/// Mean of `values` (of which there are `n`), in iteration order.
pub(crate) fn mean<I: Iterator<Item = Result<f64>>>(values: I, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfDomain("empty point set".into()));
    }
    let total = if n > COMPENSATED_THRESHOLD {
        let mut acc = CompensatedSum::new();
        for v in values {
            acc.add(v?);
        }
        acc.value()
    } else {
        let mut acc = 0.0;
        for v in values {
            acc += v?;
        }
        acc
    };
    Ok(total / n as f64)
}

/// `|qmc_estimate - integral|`.
pub fn integration_error(f: &FunctionModel, nodes: &[Point]) -> Result<f64> {
    Ok((qmc_estimate(f, nodes)? - f.integral()).abs())
}

/// Both sides of the worst-case inequality for one point set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub instance_id: String,
    pub n: usize,
    pub cells: usize,
    pub estimate: f64,
    pub integral: f64,
    pub error: f64,
    pub bounds: BoundSet,
}

/// Checks uniformity of `nodes`, then computes the estimate, the realized
/// error and the bounds. On exact-mode instances an error above the
/// weighted-oscillation bound is reported as [`Error::BoundViolation`].
pub fn bound_report(
    instance_id: &str,
    f: &FunctionModel,
    partition: &Partition,
    nodes: &[Point],
) -> Result<BoundReport> {
    let report = is_uniform(nodes, partition)?;
    if !report.uniform || nodes.is_empty() {
        return Err(Error::NotUniform {
            counts: report.counts,
            expected: report.expected,
        });
    }
    let bounds = bound_set(f, partition)?;
    let estimate = qmc_estimate(f, nodes)?;
    let integral = f.integral();
    let error = (estimate - integral).abs();
    if bounds.exact && error > bounds.weighted_oscillation + BOUND_SLACK {
        return Err(Error::BoundViolation {
            error,
            bound: bounds.weighted_oscillation,
        });
    }
    Ok(BoundReport {
        instance_id: instance_id.to_string(),
        n: nodes.len(),
        cells: partition.len(),
        estimate,
        integral,
        error,
        bounds,
    })
}
