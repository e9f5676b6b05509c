//! `perturb`: the bounds before and after overriding the integrand on a
//! finite (null) set of spikes.
//!
//! Next to the essential bounds the table shows a pointwise foil: the same
//! three formulas with per-cell `max - min` taken over a dense closed grid
//! plus the spike points. The foil is not an essential bound; it exists to
//! show what ignoring null sets would cost.

use clap::Args;
use linfqmc::bounds::{bound_set, bounds_from_extrema, BoundSet, CellExtrema};
use linfqmc::estimator::integration_error;
use linfqmc::points::{construct_uniform, construct_uniform_avoiding};
use linfqmc::{FunctionModel, Partition, Placement, Point, Space, Spike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::convergence::Family;
use crate::{read_config, row_bounds, Common, Outcome, RunError, Table, Value};

#[derive(Debug, Clone, Args)]
pub struct PerturbArgs {
    /// Integrand; ignored when --config supplies one.
    #[arg(long, value_enum, default_value_t = Family::Linear)]
    pub family: Family,
    /// Spikes per perturbation.
    #[arg(long, default_value_t = 5)]
    pub spikes: usize,
    /// Fixed spike value; by default magnitudes are 10^U(3,6) with random sign.
    #[arg(long, allow_negative_numbers = true)]
    pub spike_value: Option<f64>,
    /// Equal cells of [0,1); every point set has one node per cell.
    #[arg(long, default_value_t = 4)]
    pub cells: usize,
    /// Seeded-random uniform point sets per perturbation.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Independent spike perturbations.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Put the spikes where unconstrained construction would place nodes.
    #[arg(long)]
    pub plant_spikes: bool,
    /// Grid points per cell for the pointwise foil.
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
}

impl Default for PerturbArgs {
    fn default() -> Self {
        PerturbArgs {
            family: Family::Linear,
            spikes: 5,
            spike_value: None,
            cells: 4,
            samples: 1000,
            trials: 1,
            plant_spikes: false,
            grid: 1024,
        }
    }
}

pub const COLUMNS: &[&str] = &["quantity", "kind", "base", "perturbed", "identical"];

/// Outcome of a perturbation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub base_bounds: BoundSet,
    /// Perturbed bounds of the trial that moved furthest from the base.
    pub perturbed_bounds: BoundSet,
    pub bounds_identical: bool,
    pub naive_base: BoundSet,
    /// Largest foil values over all trials.
    pub naive_perturbed: BoundSet,
    pub base_error_mean: f64,
    pub perturbed_error_mean: f64,
    pub errors_identical: bool,
    pub comparisons: usize,
}

/// Pointwise per-cell extrema over `grid + 1` closed-grid points plus every
/// spike inside the cell.
pub fn naive_extrema(f: &FunctionModel, partition: &Partition, grid: usize) -> Result<Vec<CellExtrema>, RunError> {
    let grid = grid.max(1);
    partition
        .cells()
        .iter()
        .enumerate()
        .map(|(j, cell)| {
            let b = cell
                .as_box()
                .ok_or_else(|| RunError::Config("the foil needs interval cells".into()))?;
            let (lo, hi) = (b.lo[0], b.hi[0]);
            let mut upper = f64::NEG_INFINITY;
            let mut lower = f64::INFINITY;
            for i in 0..=grid {
                let x = if i == grid {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64 / grid as f64)
                };
                let v = f.evaluate(&Point::scalar(x))?;
                upper = upper.max(v);
                lower = lower.min(v);
            }
            for s in f.spikes() {
                if cell.contains(&Point::Coords(s.point.clone())) {
                    upper = upper.max(s.value);
                    lower = lower.min(s.value);
                }
            }
            Ok(CellExtrema {
                cell_index: j,
                upper,
                lower,
                exact: false,
            })
        })
        .collect()
}

fn naive_bounds(f: &FunctionModel, partition: &Partition, grid: usize) -> Result<BoundSet, RunError> {
    Ok(bounds_from_extrema(
        &naive_extrema(f, partition, grid)?,
        partition.measures(),
    ))
}

fn sample_seed(seed: u64, trial: usize, sample: usize, samples: usize) -> u64 {
    seed.wrapping_add(1).wrapping_add((trial * samples + sample) as u64)
}

fn spike_value(rng: &mut ChaCha8Rng, fixed: Option<f64>) -> f64 {
    match fixed {
        Some(v) => v,
        None => {
            let magnitude = 10f64.powf(rng.gen_range(3.0..6.0));
            if rng.gen_bool(0.5) {
                magnitude
            } else {
                -magnitude
            }
        }
    }
}

fn planted_points(partition: &Partition, args: &PerturbArgs, seed: u64) -> Result<Vec<Vec<f64>>, RunError> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(args.spikes);
    'outer: for s in 0..args.samples.max(1) {
        let set = construct_uniform(
            partition,
            args.cells,
            Placement::SeededRandom,
            sample_seed(seed, 0, s, args.samples),
        )?;
        for node in set.nodes() {
            if out.len() == args.spikes {
                break 'outer;
            }
            let x = node.coords().expect("cube node").to_vec();
            if !out.contains(&x) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

fn furthest(base: &BoundSet, a: BoundSet, b: BoundSet) -> BoundSet {
    let dev = |s: &BoundSet| {
        (s.span_distance_bound - base.span_distance_bound)
            .abs()
            .max((s.max_oscillation - base.max_oscillation).abs())
            .max((s.weighted_oscillation - base.weighted_oscillation).abs())
    };
    if dev(&b) > dev(&a) {
        b
    } else {
        a
    }
}

fn elementwise_max(a: BoundSet, b: BoundSet) -> BoundSet {
    BoundSet {
        span_distance_bound: a.span_distance_bound.max(b.span_distance_bound),
        max_oscillation: a.max_oscillation.max(b.max_oscillation),
        weighted_oscillation: a.weighted_oscillation.max(b.weighted_oscillation),
        distance: a.distance.max(b.distance),
        exact: false,
    }
}

pub fn experiment(f: &FunctionModel, args: &PerturbArgs, seed: u64) -> Result<Perturbation, RunError> {
    if f.space() != &Space::unit_interval() {
        return Err(RunError::Config("perturb needs a function on [0,1]".into()));
    }
    if !f.spikes().is_empty() {
        return Err(RunError::Config("perturb needs a spike-free base function".into()));
    }
    if args.cells == 0 || args.trials == 0 {
        return Err(RunError::Config("--cells and --trials must be positive".into()));
    }
    let partition = Partition::grid(Space::unit_interval(), &[args.cells])?;
    let base_bounds = bound_set(f, &partition)?;
    let naive_base = naive_bounds(f, &partition, args.grid)?;
    let planted = if args.plant_spikes {
        Some(planted_points(&partition, args, seed)?)
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perturbed_bounds = base_bounds;
    let mut naive_perturbed = naive_base;
    let mut bounds_identical = true;
    let mut errors_identical = true;
    let (mut base_total, mut pert_total) = (0.0, 0.0);
    let mut comparisons = 0;

    for trial in 0..args.trials {
        let points: Vec<Vec<f64>> = match &planted {
            Some(p) => p.clone(),
            None => (0..args.spikes).map(|_| vec![rng.gen::<f64>()]).collect(),
        };
        let spikes: Vec<Spike> = points
            .into_iter()
            .map(|point| Spike {
                point,
                value: spike_value(&mut rng, args.spike_value),
            })
            .collect();
        let avoid: Vec<Vec<f64>> = spikes.iter().map(|s| s.point.clone()).collect();
        let g = f.clone().with_spikes(spikes)?;

        let b = bound_set(&g, &partition)?;
        bounds_identical &= b.bit_identical(&base_bounds);
        perturbed_bounds = furthest(&base_bounds, perturbed_bounds, b);
        naive_perturbed = elementwise_max(naive_perturbed, naive_bounds(&g, &partition, args.grid)?);

        let errors: Vec<(f64, f64)> = (0..args.samples)
            .into_par_iter()
            .map(|s| {
                let set = construct_uniform_avoiding(
                    &partition,
                    args.cells,
                    Placement::SeededRandom,
                    sample_seed(seed, trial, s, args.samples),
                    &avoid,
                )?;
                Ok((integration_error(f, set.nodes())?, integration_error(&g, set.nodes())?))
            })
            .collect::<Result<_, linfqmc::Error>>()?;
        for (e0, e1) in errors {
            errors_identical &= e0.to_bits() == e1.to_bits();
            base_total += e0;
            pert_total += e1;
            comparisons += 1;
        }
    }
    let denom = comparisons.max(1) as f64;
    Ok(Perturbation {
        base_bounds,
        perturbed_bounds,
        bounds_identical,
        naive_base,
        naive_perturbed,
        base_error_mean: base_total / denom,
        perturbed_error_mean: pert_total / denom,
        errors_identical,
        comparisons,
    })
}

pub fn table(p: &Perturbation) -> Table {
    let mut t = Table::new(COLUMNS);
    let names = ["span_bound", "max_oscillation", "weighted_oscillation"];
    let base = row_bounds(&p.base_bounds);
    let pert = row_bounds(&p.perturbed_bounds);
    for ((name, b), q) in names.iter().zip(base).zip(pert) {
        t.push(vec![
            (*name).into(),
            "essential".into(),
            b,
            q,
            p.bounds_identical.into(),
        ]);
    }
    let base = row_bounds(&p.naive_base);
    let pert = row_bounds(&p.naive_perturbed);
    for ((name, b), q) in names.iter().zip(base).zip(pert) {
        let same = b == q;
        t.push(vec![
            Value::Str(format!("naive_{name}")),
            "pointwise-foil".into(),
            b,
            q,
            same.into(),
        ]);
    }
    t.push(vec![
        "realized_error_mean".into(),
        "essential".into(),
        p.base_error_mean.into(),
        p.perturbed_error_mean.into(),
        p.errors_identical.into(),
    ]);
    t
}

pub fn run(common: &Common, args: &PerturbArgs) -> Result<Outcome, RunError> {
    let f = match &common.config {
        Some(path) => {
            let mut list = read_config(path)?;
            if list.len() != 1 {
                return Err(RunError::Config(format!(
                    "perturb takes one instance, found {}",
                    list.len()
                )));
            }
            list.remove(0).function
        }
        None => args.family.function(),
    };
    let p = experiment(&f, args, common.seed)?;
    let summary = serde_json::json!({
        "command": "perturb",
        "trials": args.trials,
        "spikes": args.spikes,
        "comparisons": p.comparisons,
        "bounds_identical": p.bounds_identical,
        "errors_identical": p.errors_identical,
    });
    Ok(Outcome {
        table: table(&p),
        diagnostics: vec![summary.to_string()],
        failed: false,
    })
}
