//! Ground truth on finite probability spaces.
//!
//! When every atom has positive weight, every configuration of `N` atoms has
//! product measure at least `(min weight)^N > 0`, so the essential supremum of
//! the error over uniform configurations is the plain maximum over the
//! enumeration. That is what [`worst_case_error`] computes.

use std::collections::BTreeMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{bound_set, BoundSet};
use crate::error::{Error, Result};
use crate::estimator::mean;
use crate::instance::{describe, InstanceFile};
use crate::measure::{Cell, FunctionModel, Partition, Point, Space};
use crate::points::{enumerate_uniform, is_uniform, Configuration};
use crate::BOUND_SLACK;

/// A finite-space instance: function, partition and node count.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteInstance {
    pub id: String,
    pub partition: Partition,
    pub function: FunctionModel,
    pub n: usize,
}

impl FiniteInstance {
    pub fn space(&self) -> &Space {
        self.partition.space()
    }

    pub fn describe(&self) -> InstanceFile {
        describe(&self.id, &self.partition, &self.function, Some(self.n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub error: f64,
    /// Lexicographically first configuration attaining `error`.
    pub configuration: Configuration,
    pub position: u128,
    pub configurations: u128,
}

fn atom_values(f: &FunctionModel) -> Result<Vec<f64>> {
    (0..f.space().atom_count())
        .map(|i| f.evaluate(&Point::Atom(i)))
        .collect()
}

fn config_error(values: &[f64], config: &Configuration, n: usize, integral: f64) -> f64 {
    let est = mean(config.atoms().map(|i| Ok(values[i])), n).expect("n > 0");
    (est - integral).abs()
}

/// Maximum integration error over every uniform configuration.
pub fn worst_case_error(partition: &Partition, f: &FunctionModel, n: usize, cap: u64) -> Result<WorstCase> {
    worst_case_error_parallel(partition, f, n, cap, 1)
}

/// [`worst_case_error`] split over `workers` threads by first-cell multiset.
/// The reduction keeps the largest error and, among ties, the smallest
/// enumeration position, so the result does not depend on `workers`.
pub fn worst_case_error_parallel(
    partition: &Partition,
    f: &FunctionModel,
    n: usize,
    cap: u64,
    workers: usize,
) -> Result<WorstCase> {
    if f.space() != partition.space() {
        return Err(Error::InvalidFunction(
            "function and partition live on different spaces".into(),
        ));
    }
    let stream = enumerate_uniform(partition, n, cap)?;
    let total = stream.total_count();
    let values = atom_values(f)?;
    let integral = f.integral();
    let workers = workers.max(1);

    let scan = |mut s: crate::points::ConfigurationStream| {
        let mut best: Option<(f64, u128, Configuration)> = None;
        while let Some(c) = s.next() {
            let e = config_error(&values, &c, n, integral);
            if best.as_ref().is_none_or(|(b, _, _)| e > *b) {
                best = Some((e, s.position(), c));
            }
        }
        best
    };

    let partial: Vec<(f64, u128, Configuration)> = if workers == 1 {
        scan(stream).into_iter().collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let s = stream.clone().shard(w, workers);
                    scope.spawn(move || scan(s))
                })
                .collect();
            handles
                .into_iter()
                .filter_map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let (error, position, configuration) = partial
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("at least one configuration");
    Ok(WorstCase {
        error,
        configuration,
        position,
        configurations: total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationVerdict {
    pub instance_id: String,
    pub n: usize,
    pub cells: usize,
    pub worst_error: f64,
    pub argmax: Configuration,
    pub configurations: u128,
    pub bounds: BoundSet,
    pub passed: bool,
    /// `worst_error / weighted_oscillation`, 1 when both vanish.
    pub tightness: f64,
}

/// Tightness ratio with the `0/0 = 1` convention. Against a zero bound, an
/// error within [`BOUND_SLACK`] counts as zero; it is summation rounding.
pub fn tightness(worst: f64, bound: f64) -> f64 {
    if bound == 0.0 {
        if worst <= BOUND_SLACK {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        worst / bound
    }
}

/// Checks the worst case against all three bounds.
pub fn verify_bounds_exhaustive(instance: &FiniteInstance, cap: u64) -> Result<VerificationVerdict> {
    verify_with_workers(instance, cap, 1)
}

pub fn verify_with_workers(instance: &FiniteInstance, cap: u64, workers: usize) -> Result<VerificationVerdict> {
    let worst = worst_case_error_parallel(&instance.partition, &instance.function, instance.n, cap, workers)?;
    let bounds = bound_set(&instance.function, &instance.partition)?;
    Ok(verdict(instance, worst, bounds))
}

/// Verdict for a precomputed worst case and bound set.
pub fn verdict(instance: &FiniteInstance, worst: WorstCase, bounds: BoundSet) -> VerificationVerdict {
    let e = worst.error;
    let passed = e <= bounds.weighted_oscillation + BOUND_SLACK
        && e <= bounds.max_oscillation + BOUND_SLACK
        && e <= bounds.span_distance_bound + BOUND_SLACK;
    VerificationVerdict {
        instance_id: instance.id.clone(),
        n: instance.n,
        cells: instance.partition.len(),
        worst_error: e,
        argmax: worst.configuration,
        configurations: worst.configurations,
        bounds,
        passed,
        tightness: tightness(e, bounds.weighted_oscillation),
    }
}

/// Re-checks that the argmax is itself a uniform point set.
pub fn argmax_is_uniform(instance: &FiniteInstance, verdict: &VerificationVerdict) -> Result<bool> {
    Ok(is_uniform(&verdict.argmax.nodes(), &instance.partition)?.uniform)
}

/// Solution of the discrete Chebyshev problem
/// `min over (c_0, c_M) of max_x |f(x) - c_0 - sum_M c_M chi_M(x)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxCertificate {
    /// Optimal value reported by the linear program.
    pub value: f64,
    pub intercept: f64,
    /// One coefficient per family member.
    pub coefficients: Vec<f64>,
    /// `max_x |f(x) - l(x)|` recomputed from the coefficients.
    pub achieved: f64,
}

/// `max_x |f(x) - l(x)|` over the atoms for `l = intercept + sum c_M chi_M`.
pub fn span_residual(f: &FunctionModel, family: &[Cell], intercept: f64, coefficients: &[f64]) -> Result<f64> {
    let values = atom_values(f)?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let l = intercept
                + family
                    .iter()
                    .zip(coefficients)
                    .filter(|(c, _)| c.contains(&Point::Atom(i)))
                    .map(|(_, a)| a)
                    .sum::<f64>();
            (v - l).abs()
        })
        .fold(0.0, f64::max))
}

/// Error bound `2 ||f - l||_inf` for any `l` in the span of a general family.
pub fn explicit_span_bound(f: &FunctionModel, family: &[Cell], intercept: f64, coefficients: &[f64]) -> Result<f64> {
    Ok(2.0 * span_residual(f, family, intercept, coefficients)?)
}

/// Exact `D(f, L_M)` on a finite space for any finite family of cells.
///
/// Atoms with the same membership pattern share one value of `l`, so only
/// the extreme values of `f` on each pattern class constrain the problem.
/// A family member equal to the whole space makes the intercept redundant;
/// it is then fixed at zero.
pub fn minimax_distance_finite(space: &Space, family: &[Cell], f: &FunctionModel) -> Result<MinimaxCertificate> {
    let atoms = space.atoms().ok_or(Error::NotFinite)?;
    if f.space() != space {
        return Err(Error::InvalidFunction("function lives on a different space".into()));
    }
    if family.is_empty() {
        return Err(Error::NoCells);
    }
    for (i, c) in family.iter().enumerate() {
        space.check_cell(c, i)?;
    }
    let values = atom_values(f)?;
    let mut classes: BTreeMap<Vec<bool>, (f64, f64)> = BTreeMap::new();
    for (i, &v) in values.iter().enumerate() {
        let sig: Vec<bool> = family.iter().map(|c| c.contains(&Point::Atom(i))).collect();
        let e = classes.entry(sig).or_insert((f64::INFINITY, f64::NEG_INFINITY));
        e.0 = e.0.min(v);
        e.1 = e.1.max(v);
    }
    let degenerate = family
        .iter()
        .any(|c| c.atom_ids().is_some_and(|ids| ids.len() == atoms.len()));

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let t = lp.add_var(1.0, (0.0, f64::INFINITY));
    let c0 = if degenerate {
        lp.add_var(0.0, (0.0, 0.0))
    } else {
        lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))
    };
    let cm: Vec<_> = family
        .iter()
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for (sig, (lo, hi)) in &classes {
        let mut upper = vec![(t, 1.0), (c0, 1.0)];
        let mut lower = vec![(t, 1.0), (c0, -1.0)];
        for (member, &v) in sig.iter().zip(&cm) {
            if *member {
                upper.push((v, 1.0));
                lower.push((v, -1.0));
            }
        }
        // t >= hi - l and t >= l - lo
        lp.add_constraint(&upper[..], ComparisonOp::Ge, *hi);
        lp.add_constraint(&lower[..], ComparisonOp::Ge, -*lo);
    }
    let solution = lp.solve().map_err(|e| Error::Solver(e.to_string()))?;
    let intercept = solution[c0];
    let coefficients: Vec<f64> = cm.iter().map(|&v| solution[v]).collect();
    let achieved = span_residual(f, family, intercept, &coefficients)?;
    Ok(MinimaxCertificate {
        value: solution.objective(),
        intercept,
        coefficients,
        achieved,
    })
}

/// Size limits for [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceLimits {
    pub max_atoms: usize,
    pub max_cells: usize,
    /// Largest node count; candidates are 2, 4, 8 and 16.
    pub max_n: usize,
    pub value_range: (f64, f64),
}

impl Default for InstanceLimits {
    fn default() -> Self {
        InstanceLimits {
            max_atoms: 6,
            max_cells: 3,
            max_n: 8,
            value_range: (-10.0, 10.0),
        }
    }
}

/// Weights are multiples of 1/16 and every cell mass is a multiple of `1/N`.
const WEIGHT_UNITS: usize = 16;

/// Deterministic random finite instance.
pub fn random_instance(seed: u64, limits: &InstanceLimits) -> FiniteInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ns: Vec<usize> = [2usize, 4, 8, 16]
        .into_iter()
        .filter(|&n| n <= limits.max_n.max(2))
        .collect();
    let n = ns[rng.gen_range(0..ns.len())];
    let max_atoms = limits.max_atoms.clamp(2, WEIGHT_UNITS);
    let atoms_total = rng.gen_range(2..=max_atoms);
    let k = rng.gen_range(1..=limits.max_cells.max(1).min(atoms_total).min(n));

    let counts = random_composition(&mut rng, n, k);
    let units: Vec<usize> = counts.iter().map(|&c| c * WEIGHT_UNITS / n).collect();
    // Cell sizes bounded by the weight units available to each cell.
    let mut sizes = vec![1usize; k];
    for _ in k..atoms_total {
        let open: Vec<usize> = (0..k).filter(|&j| sizes[j] < units[j]).collect();
        let j = open[rng.gen_range(0..open.len())];
        sizes[j] += 1;
    }
    let mut order: Vec<usize> = (0..atoms_total).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);

    let mut weights = vec![0.0; atoms_total];
    let mut cells = Vec::with_capacity(k);
    let mut next = 0;
    for j in 0..k {
        let ids = &order[next..next + sizes[j]];
        next += sizes[j];
        for (&atom, u) in ids.iter().zip(random_composition(&mut rng, units[j], sizes[j])) {
            weights[atom] = u as f64 / WEIGHT_UNITS as f64;
        }
        cells.push(Cell::atoms(ids.iter().copied()));
    }
    let (lo, hi) = limits.value_range;
    let values: Vec<f64> = (0..atoms_total).map(|_| rng.gen_range(lo..=hi)).collect();

    let space = Space::finite(weights.iter().enumerate().map(|(i, &w)| (format!("a{i}"), w)))
        .expect("dyadic weights sum to one");
    let partition = Partition::new(space.clone(), cells).expect("cells cover the atoms");
    let function = FunctionModel::table(space, values).expect("one value per atom");
    FiniteInstance {
        id: format!("random-{seed}"),
        partition,
        function,
        n,
    }
}

/// Uniformly random composition of `total` into `parts` positive parts.
fn random_composition(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    assert!(parts >= 1 && total >= parts);
    let mut cuts: Vec<usize> = sample(rng, total - 1, parts - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(parts);
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// All compositions of `total` into `parts` positive parts, lexicographically.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts >= 1 && total >= parts {
        go(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// Weight units per atom for the exhaustive grid.
const GRID_UNITS: usize = 64;

/// The deterministic exhaustive grid: 2 to 6 atoms, 1 to 3 cells, `N` in
/// {2, 4}, every composition of atoms and nodes into cells, two ways of
/// splitting each cell mass over its atoms, and two value patterns.
pub fn small_exhaustive_suite() -> Vec<FiniteInstance> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for m in 2..=6usize {
        for k in 1..=3usize.min(m) {
            for n in [2usize, 4] {
                if k > n {
                    continue;
                }
                for sizes in compositions(m, k) {
                    for counts in compositions(n, k) {
                        let mut seen: Vec<Vec<usize>> = Vec::new();
                        for (split_name, skewed) in [("even", false), ("skewed", true)] {
                            let units = split_units(&sizes, &counts, n, skewed);
                            if seen.contains(&units) {
                                continue;
                            }
                            seen.push(units.clone());
                            for values_name in ["random", "ramp"] {
                                let values: Vec<f64> = match values_name {
                                    "random" => (0..m).map(|_| rng.gen_range(-5.0..=5.0)).collect(),
                                    _ => (0..m).map(|i| ((i * i + 3 * i) % 7) as f64 - 3.0).collect(),
                                };
                                let id = format!(
                                    "grid-m{m}-k{k}-n{n}-s{}-c{}-{split_name}-{values_name}",
                                    join(&sizes),
                                    join(&counts)
                                );
                                out.push(grid_instance(id, &sizes, &units, values, n));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join("")
}

fn split_units(sizes: &[usize], counts: &[usize], n: usize, skewed: bool) -> Vec<usize> {
    let mut units = Vec::new();
    for (&s, &c) in sizes.iter().zip(counts) {
        let total = GRID_UNITS * c / n;
        if skewed {
            units.push(total - (s - 1));
            units.extend(std::iter::repeat_n(1, s - 1));
        } else {
            let (q, r) = (total / s, total % s);
            units.extend((0..s).map(|i| q + usize::from(i < r)));
        }
    }
    units
}

fn grid_instance(id: String, sizes: &[usize], units: &[usize], values: Vec<f64>, n: usize) -> FiniteInstance {
    let space = Space::finite(
        units
            .iter()
            .enumerate()
            .map(|(i, &u)| (format!("a{i}"), u as f64 / GRID_UNITS as f64)),
    )
    .expect("dyadic weights sum to one");
    let mut cells = Vec::new();
    let mut next = 0;
    for &s in sizes {
        cells.push(Cell::atoms(next..next + s));
        next += s;
    }
    let partition = Partition::new(space.clone(), cells).expect("contiguous cells cover");
    let function = FunctionModel::table(space, values).expect("one value per atom");
    FiniteInstance {
        id,
        partition,
        function,
        n,
    }
}
