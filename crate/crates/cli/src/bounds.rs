//! `bounds`: the bound set of one instance, or its full report when a point
//! set is available.

use std::path::PathBuf;

use clap::Args;
use linfqmc::bounds::bound_set;
use linfqmc::instance::Instance;
use linfqmc::points::{construct_uniform, read_point_set};
use linfqmc::{bound_report, Placement, Point};

use crate::{read_config, row_bounds, Common, Outcome, RunError, Table};

#[derive(Debug, Clone, Default, Args)]
pub struct BoundsArgs {
    /// Point-set file (the format written by `write_point_set`).
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Construct a uniform point set of this size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Placement for constructed point sets; defaults to the instance's.
    #[arg(long)]
    pub placement: Option<Placement>,
}

pub const SET_COLUMNS: &[&str] = &[
    "instance_id",
    "k",
    "span_bound",
    "max_oscillation",
    "weighted_oscillation",
    "D",
    "exact",
];

pub const REPORT_COLUMNS: &[&str] = &[
    "instance_id",
    "N",
    "k",
    "estimate",
    "integral",
    "error",
    "span_bound",
    "max_oscillation",
    "weighted_oscillation",
    "exact",
];

fn point_set(common: &Common, args: &BoundsArgs, inst: &Instance) -> Result<Option<Vec<Point>>, RunError> {
    if let Some(path) = &args.points {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        return Ok(Some(read_point_set(&inst.partition, &text)?));
    }
    if let Some(pts) = &inst.points {
        return Ok(Some(pts.clone()));
    }
    match args.n.or(inst.n) {
        Some(n) => {
            let placement = args.placement.unwrap_or(inst.placement);
            let seed = if common.seed != 0 { common.seed } else { inst.seed };
            Ok(Some(
                construct_uniform(&inst.partition, n, placement, seed)?.nodes().to_vec(),
            ))
        }
        None => Ok(None),
    }
}

pub fn run(common: &Common, args: &BoundsArgs) -> Result<Outcome, RunError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| RunError::Config("bounds needs --config".into()))?;
    let mut list = read_config(path)?;
    if list.len() != 1 {
        return Err(RunError::Config(format!(
            "bounds takes one instance, found {}",
            list.len()
        )));
    }
    let inst = list.remove(0);
    let table = match point_set(common, args, &inst)? {
        None => {
            let b = bound_set(&inst.function, &inst.partition)?;
            let [t1, c1, c2] = row_bounds(&b);
            let mut t = Table::new(SET_COLUMNS);
            t.push(vec![
                inst.id.clone().into(),
                inst.partition.len().into(),
                t1,
                c1,
                c2,
                b.distance.into(),
                b.exact.into(),
            ]);
            t
        }
        Some(nodes) => {
            let r = bound_report(&inst.id, &inst.function, &inst.partition, &nodes)?;
            let [t1, c1, c2] = row_bounds(&r.bounds);
            let mut t = Table::new(REPORT_COLUMNS);
            t.push(vec![
                r.instance_id.into(),
                r.n.into(),
                r.cells.into(),
                r.estimate.into(),
                r.integral.into(),
                r.error.into(),
                t1,
                c1,
                c2,
                r.bounds.exact.into(),
            ]);
            t
        }
    };
    Ok(Outcome::ok(table))
}
