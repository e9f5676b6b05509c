//! `verify`: exhaustive checks on finite instances.

use clap::{Args, ValueEnum};
use linfqmc::bounds::{bound_set, BoundSet};
use linfqmc::oracle::{random_instance, small_exhaustive_suite, verdict, worst_case_error_parallel, InstanceLimits};
use linfqmc::{FiniteInstance, VerificationVerdict};
use rayon::prelude::*;

use crate::{read_config, row_bounds, Common, Outcome, RunError, Table, Value};

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Built-in instance suite.
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Number of seeds for the random suite, starting at --seed.
    #[arg(long, default_value_t = 100)]
    pub count: u64,
    /// Replace every bound by one below the worst error.
    #[arg(long, hide = true)]
    pub inject_violation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    SmallExhaustive,
    Random,
    /// The exhaustive grid followed by the random suite.
    All,
}

pub const COLUMNS: &[&str] = &[
    "instance_id",
    "N",
    "k",
    "configurations",
    "worst_error",
    "span_bound",
    "max_oscillation",
    "weighted_oscillation",
    "tightness",
    "passed",
    "argmax",
];

pub fn instances(common: &Common, args: &VerifyArgs) -> Result<Vec<FiniteInstance>, RunError> {
    let mut out = Vec::new();
    let random = |out: &mut Vec<FiniteInstance>| {
        let limits = InstanceLimits::default();
        out.extend((0..args.count).map(|i| random_instance(common.seed.wrapping_add(i), &limits)));
    };
    match args.suite {
        Some(Suite::SmallExhaustive) => out.extend(small_exhaustive_suite()),
        Some(Suite::Random) => random(&mut out),
        Some(Suite::All) => {
            out.extend(small_exhaustive_suite());
            random(&mut out);
        }
        None => {}
    }
    if let Some(path) = &common.config {
        for inst in read_config(path)? {
            if !inst.space().is_finite() {
                return Err(RunError::Config(format!(
                    "instance {}: verify needs a finite space",
                    inst.id
                )));
            }
            let n = inst
                .n
                .ok_or_else(|| RunError::Config(format!("instance {}: verify needs n", inst.id)))?;
            out.push(FiniteInstance {
                id: inst.id,
                partition: inst.partition,
                function: inst.function,
                n,
            });
        }
    }
    if out.is_empty() {
        return Err(RunError::Config("verify needs --suite or --config".into()));
    }
    Ok(out)
}

fn injected(worst: f64) -> BoundSet {
    let b = worst / 2.0 - 1.0;
    BoundSet {
        span_distance_bound: b,
        max_oscillation: b,
        weighted_oscillation: b,
        distance: b / 2.0,
        exact: true,
    }
}

pub fn verdicts(
    common: &Common,
    args: &VerifyArgs,
    list: &[FiniteInstance],
) -> Result<Vec<VerificationVerdict>, RunError> {
    let inner = if list.len() == 1 {
        common.workers.unwrap_or(1)
    } else {
        1
    };
    list.par_iter()
        .map(|inst| {
            let context = |e: linfqmc::Error| RunError::Config(format!("instance {}: {e}", inst.id));
            let worst = worst_case_error_parallel(&inst.partition, &inst.function, inst.n, common.cap, inner)
                .map_err(context)?;
            let bounds = if args.inject_violation {
                injected(worst.error)
            } else {
                bound_set(&inst.function, &inst.partition).map_err(context)?
            };
            Ok(verdict(inst, worst, bounds))
        })
        .collect()
}

pub fn run(common: &Common, args: &VerifyArgs) -> Result<Outcome, RunError> {
    let list = instances(common, args)?;
    let results = verdicts(common, args, &list)?;

    let mut table = Table::new(COLUMNS);
    for (inst, v) in list.iter().zip(&results) {
        let [t1, c1, c2] = row_bounds(&v.bounds);
        table.push(vec![
            v.instance_id.clone().into(),
            v.n.into(),
            v.cells.into(),
            v.configurations.into(),
            v.worst_error.into(),
            t1,
            c1,
            c2,
            v.tightness.into(),
            v.passed.into(),
            Value::Str(v.argmax.describe(inst.space())),
        ]);
    }

    let passed = results.iter().filter(|v| v.passed).count();
    let mut worst_index = 0;
    for (i, v) in results.iter().enumerate() {
        if v.tightness > results[worst_index].tightness {
            worst_index = i;
        }
    }
    let failures: Vec<&str> = results
        .iter()
        .filter(|v| !v.passed)
        .map(|v| v.instance_id.as_str())
        .collect();
    let summary = serde_json::json!({
        "command": "verify",
        "instances": results.len(),
        "passed": passed,
        "failed": results.len() - passed,
        "max_tightness": results[worst_index].tightness,
        "worst_instance": serde_json::to_value(list[worst_index].describe()).expect("descriptor serializes"),
        "failures": failures,
    });
    let mut diagnostics = vec![summary.to_string()];
    for (inst, v) in list.iter().zip(&results) {
        if !v.passed {
            diagnostics.push(format!("replay {}", inst.describe().to_json()));
        }
    }
    Ok(Outcome {
        table,
        diagnostics,
        failed: passed < results.len(),
    })
}
