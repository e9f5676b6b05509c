//! Construction, validation and exhaustive enumeration of uniform point sets.
//!
//! A point set of `N` nodes is uniform for a partition when cell `M_j` holds
//! exactly `N * mu(M_j)` nodes. On finite spaces the set of all such point
//! sets is enumerated up to node order: the QMC estimate is permutation
//! invariant, so one multiset per cell is enough.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measure::{BoxCell, Cell, Partition, Point, Space};

/// Tolerance for treating `N * mu(M_j)` as an integer.
pub const ALLOCATION_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Per-cell node counts `N * mu(M_j)`.
pub fn allocation(partition: &Partition, n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::NonIntegerAllocation {
            n,
            cell: 0,
            product: 0.0,
            suggested: smallest_feasible(partition, 1),
        });
    }
    match try_allocation(partition.measures(), n) {
        Ok(counts) => Ok(counts),
        Err((cell, product)) => Err(Error::NonIntegerAllocation {
            n,
            cell,
            product,
            suggested: smallest_feasible(partition, n),
        }),
    }
}

fn try_allocation(measures: &[f64], n: usize) -> std::result::Result<Vec<usize>, (usize, f64)> {
    measures
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let product = m * n as f64;
            let rounded = product.round();
            if (product - rounded).abs() <= ALLOCATION_TOLERANCE && rounded >= 1.0 {
                Ok(rounded as usize)
            } else {
                Err((j, product))
            }
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .and_then(|counts| {
            if counts.iter().sum::<usize>() == n {
                Ok(counts)
            } else {
                Err((0, measures[0] * n as f64))
            }
        })
}

/// Smallest `N' >= n` with an integral allocation, if one is found.
fn smallest_feasible(partition: &Partition, n: usize) -> Option<usize> {
    let measures = partition.measures();
    // Rational measures: N' must be a multiple of the lcm of the denominators.
    let lcm = measures.iter().try_fold(1u64, |acc, &m| {
        let (_, q) = rational_approximation(m, 1 << 24)?;
        let l = acc / gcd(acc, q) * q;
        (l <= 1 << 40).then_some(l)
    });
    if let Some(l) = lcm {
        let l = l as usize;
        let mut candidate = n.div_ceil(l) * l;
        for _ in 0..4 {
            if try_allocation(measures, candidate).is_ok() {
                return Some(candidate);
            }
            candidate += l;
        }
    }
    (n..n + 100_000).find(|&m| try_allocation(measures, m).is_ok())
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Continued-fraction approximation `p/q` of `x` within 1e-12 with `q <= max_den`.
fn rational_approximation(x: f64, max_den: u64) -> Option<(u64, u64)> {
    if !(0.0..=1.0).contains(&x) {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > max_den as f64 {
            break;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p1 as f64 / q1 as f64).abs() <= 1e-12 {
            return Some((p1, q1));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Node placement inside a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    /// Every node at the cell centre; on finite cells, the middle atom.
    #[default]
    CellMidpoint,
    /// Nodes at `(i - 0.5) / N_j` along the first axis of the cell, centred
    /// on the other axes; on finite cells, atoms spread evenly over the cell.
    Equispaced,
    /// Independent uniform draws inside the cell.
    SeededRandom,
}

impl Placement {
    pub fn name(self) -> &'static str {
        match self {
            Placement::CellMidpoint => "cell-midpoint",
            Placement::Equispaced => "per-cell-equispaced",
            Placement::SeededRandom => "seeded-random-in-cell",
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cell-midpoint" | "midpoint" => Ok(Placement::CellMidpoint),
            "per-cell-equispaced" | "equispaced" => Ok(Placement::Equispaced),
            "seeded-random-in-cell" | "random" => Ok(Placement::SeededRandom),
            other => Err(Error::Instance(format!("unknown placement `{other}`"))),
        }
    }
}

/// `N` nodes with exactly `allocation[j]` of them in cell `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformPointSet {
    nodes: Vec<Point>,
    cell_of_node: Vec<usize>,
    allocation: Vec<usize>,
}

impl UniformPointSet {
    /// Checks uniformity of arbitrary nodes.
    pub fn from_nodes(partition: &Partition, nodes: Vec<Point>) -> Result<Self> {
        let report = is_uniform(&nodes, partition)?;
        if !report.uniform {
            return Err(Error::NotUniform {
                counts: report.counts,
                expected: report.expected,
            });
        }
        let cell_of_node = nodes.iter().map(|p| partition.cell_of(p)).collect::<Result<_>>()?;
        Ok(UniformPointSet {
            nodes,
            cell_of_node,
            allocation: report.counts,
        })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn allocation(&self) -> &[usize] {
        &self.allocation
    }

    pub fn cell_of_node(&self) -> &[usize] {
        &self.cell_of_node
    }

    /// Nodes sorted within each cell, cells in index order.
    pub fn canonicalized(&self) -> Self {
        let mut pairs: Vec<(usize, Point)> = self
            .cell_of_node
            .iter()
            .copied()
            .zip(self.nodes.iter().cloned())
            .collect();
        pairs.sort_by(|(a, p), (b, q)| a.cmp(b).then_with(|| p.total_cmp(q)));
        let (cell_of_node, nodes) = pairs.into_iter().unzip();
        UniformPointSet {
            nodes,
            cell_of_node,
            allocation: self.allocation.clone(),
        }
    }
}

pub fn construct_uniform(partition: &Partition, n: usize, placement: Placement, seed: u64) -> Result<UniformPointSet> {
    construct_uniform_avoiding(partition, n, placement, seed, &[])
}

/// Like [`construct_uniform`], but never places a node exactly at one of
/// `avoid` (typically the spike coordinates of an integrand).
pub fn construct_uniform_avoiding(
    partition: &Partition,
    n: usize,
    placement: Placement,
    seed: u64,
    avoid: &[Vec<f64>],
) -> Result<UniformPointSet> {
    let counts = allocation(partition, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(n);
    let mut cell_of_node = Vec::with_capacity(n);
    for (j, (cell, &count)) in partition.cells().iter().zip(&counts).enumerate() {
        match cell {
            Cell::Atoms(ids) => {
                for i in 0..count {
                    let atom = match placement {
                        Placement::CellMidpoint => ids[(ids.len() - 1) / 2],
                        Placement::Equispaced => ids[i * ids.len() / count],
                        Placement::SeededRandom => ids[rng.gen_range(0..ids.len())],
                    };
                    nodes.push(Point::Atom(atom));
                }
            }
            Cell::Box(b) => {
                for i in 0..count {
                    let x = match placement {
                        Placement::CellMidpoint => nudge_off(b, b.center(), avoid),
                        Placement::Equispaced => {
                            let mut x = b.center();
                            x[0] = b.lo[0] + b.width(0) * ((i as f64 + 0.5) / count as f64);
                            nudge_off(b, x, avoid)
                        }
                        Placement::SeededRandom => sample_in_box(&mut rng, b, avoid),
                    };
                    nodes.push(Point::Coords(x));
                }
            }
        }
        cell_of_node.extend(std::iter::repeat_n(j, count));
    }
    Ok(UniformPointSet {
        nodes,
        cell_of_node,
        allocation: counts,
    })
}

fn sample_in_box(rng: &mut ChaCha8Rng, b: &BoxCell, avoid: &[Vec<f64>]) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..b.dim()).map(|a| b.lo[a] + b.width(a) * rng.gen::<f64>()).collect();
        if b.contains(&x) && !avoid.contains(&x) {
            return x;
        }
    }
}

/// Moves a deterministic node along the first axis until it misses `avoid`.
fn nudge_off(b: &BoxCell, mut x: Vec<f64>, avoid: &[Vec<f64>]) -> Vec<f64> {
    let start = x[0];
    let step = b.width(0) * f64::EPSILON.sqrt();
    let mut t = 1.0;
    while avoid.contains(&x) {
        x[0] = start + t * step;
        if !b.contains(&x) {
            x[0] = start - t * step;
        }
        t += 1.0;
    }
    x
}

/// Per-cell node counts of an arbitrary point set.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub uniform: bool,
    pub counts: Vec<usize>,
    /// `N * mu(M_j)`.
    pub expected: Vec<f64>,
}

pub fn is_uniform(points: &[Point], partition: &Partition) -> Result<UniformityReport> {
    let mut counts = vec![0usize; partition.len()];
    for p in points {
        counts[partition.cell_of(p)?] += 1;
    }
    let n = points.len() as f64;
    let expected: Vec<f64> = partition.measures().iter().map(|m| m * n).collect();
    let uniform = counts
        .iter()
        .zip(&expected)
        .all(|(&c, &e)| (e - e.round()).abs() <= ALLOCATION_TOLERANCE && c as f64 == e.round());
    Ok(UniformityReport {
        uniform,
        counts,
        expected,
    })
}

/// Number of size-`k` multisets drawn from `n` items, `C(n + k - 1, k)`;
/// `None` on overflow.
pub fn multichoose(n: u64, k: u64) -> Option<u128> {
    if n == 0 {
        return Some(u128::from(k == 0));
    }
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.checked_mul(n as u128 - 1 + i)? / i;
    }
    Some(acc)
}

/// One unordered uniform point set on a finite space: a multiset of atom
/// indices per cell, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub cells: Vec<Vec<usize>>,
}

impl Configuration {
    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().flatten().copied()
    }

    pub fn nodes(&self) -> Vec<Point> {
        self.atoms().map(Point::Atom).collect()
    }

    pub fn to_point_set(&self, partition: &Partition) -> Result<UniformPointSet> {
        UniformPointSet::from_nodes(partition, self.nodes())
    }

    /// Atom labels, cells separated by `|`.
    pub fn describe(&self, space: &Space) -> String {
        let atoms = space.atoms().unwrap_or(&[]);
        self.cells
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&i| atoms.get(i).map_or("?", |a| a.label.as_str()))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// Lexicographic iterator over all uniform configurations of a finite
/// partition; cell 0 varies slowest.
#[derive(Debug, Clone)]
pub struct ConfigurationStream {
    cell_atoms: Vec<Vec<usize>>,
    positions: Vec<Vec<usize>>,
    total: u128,
    rest_total: u128,
    first_rank: u128,
    rest_rank: u128,
    stride: u128,
    offset: u128,
    started: bool,
    done: bool,
}

/// Enumerates every uniform configuration of `n` nodes, failing when the
/// count exceeds `cap`.
pub fn enumerate_uniform(partition: &Partition, n: usize, cap: u64) -> Result<ConfigurationStream> {
    if !partition.space().is_finite() {
        return Err(Error::NotFinite);
    }
    let counts = allocation(partition, n)?;
    let cell_atoms: Vec<Vec<usize>> = partition
        .cells()
        .iter()
        .map(|c| c.atom_ids().expect("finite cells").to_vec())
        .collect();
    let sizes: Vec<Option<u128>> = cell_atoms
        .iter()
        .zip(&counts)
        .map(|(a, &k)| multichoose(a.len() as u64, k as u64))
        .collect();
    let total = sizes.iter().try_fold(1u128, |acc, s| acc.checked_mul((*s)?));
    let total = match total {
        Some(t) if t <= cap as u128 => t,
        Some(t) => {
            return Err(Error::EnumerationTooLarge {
                count: t.to_string(),
                cap,
            })
        }
        None => {
            return Err(Error::EnumerationTooLarge {
                count: "more than 2^128".into(),
                cap,
            })
        }
    };
    let rest_total = sizes[1..].iter().map(|s| s.expect("checked")).product();
    Ok(ConfigurationStream {
        positions: counts.iter().map(|&k| vec![0; k]).collect(),
        cell_atoms,
        total,
        rest_total,
        first_rank: 0,
        rest_rank: 0,
        stride: 1,
        offset: 0,
        started: false,
        done: false,
    })
}

impl ConfigurationStream {
    /// Number of configurations in the full enumeration.
    pub fn total_count(&self) -> u128 {
        self.total
    }

    /// Restricts the stream to configurations whose first-cell multiset has
    /// rank `index` modulo `shards`. The shards partition the enumeration.
    pub fn shard(mut self, index: usize, shards: usize) -> Self {
        assert!(shards > 0 && index < shards, "invalid shard {index}/{shards}");
        assert!(!self.started, "shard before iterating");
        self.stride = shards as u128;
        self.offset = index as u128;
        self
    }

    /// Position of the most recently yielded configuration in the full
    /// lexicographic enumeration.
    pub fn position(&self) -> u128 {
        self.first_rank * self.rest_total + self.rest_rank
    }

    fn advance_cell(&mut self, j: usize) -> bool {
        let m = self.cell_atoms[j].len();
        let p = &mut self.positions[j];
        match p.iter().rposition(|&x| x + 1 < m) {
            Some(i) => {
                let v = p[i] + 1;
                p[i..].iter_mut().for_each(|x| *x = v);
                true
            }
            None => {
                p.iter_mut().for_each(|x| *x = 0);
                false
            }
        }
    }

    fn advance_first(&mut self, times: u128) -> bool {
        for _ in 0..times {
            if !self.advance_cell(0) {
                return false;
            }
        }
        self.first_rank += times;
        true
    }

    fn current(&self) -> Configuration {
        Configuration {
            cells: self
                .positions
                .iter()
                .zip(&self.cell_atoms)
                .map(|(p, atoms)| p.iter().map(|&i| atoms[i]).collect())
                .collect(),
        }
    }
}

impl Iterator for ConfigurationStream {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.advance_first(self.offset) {
                self.done = true;
                return None;
            }
            return Some(self.current());
        }
        let mut j = self.positions.len() - 1;
        loop {
            if j == 0 {
                if !self.advance_first(self.stride) {
                    self.done = true;
                    return None;
                }
                self.rest_rank = 0;
                break;
            }
            if self.advance_cell(j) {
                self.rest_rank += 1;
                break;
            }
            j -= 1;
        }
        Some(self.current())
    }
}

/// Plain-text point-set format: a header `N <n> partition <fingerprint>`,
/// then one node per line (an atom label, or space-separated coordinates).
pub fn write_point_set(partition: &Partition, nodes: &[Point]) -> Result<String> {
    let mut out = format!("N {} partition {}\n", nodes.len(), partition.fingerprint());
    let space = partition.space();
    for p in nodes {
        space.check_point(p)?;
        match p {
            Point::Atom(i) => out.push_str(&space.atoms().expect("finite")[*i].label),
            Point::Coords(x) => {
                let coords: Vec<String> = x.iter().map(|c| format!("{c:?}")).collect();
                out.push_str(&coords.join(" "));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn read_point_set(partition: &Partition, text: &str) -> Result<Vec<Point>> {
    let bad = |msg: String| Error::Instance(msg);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty point-set file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, hash) = match fields.as_slice() {
        ["N", n, "partition", hash] => (
            n.parse::<usize>().map_err(|e| bad(format!("bad node count: {e}")))?,
            *hash,
        ),
        _ => return Err(bad(format!("bad point-set header `{header}`"))),
    };
    if hash != partition.fingerprint() {
        return Err(bad(format!(
            "point set was written for partition {hash}, not {}",
            partition.fingerprint()
        )));
    }
    let space = partition.space();
    let nodes = lines
        .map(|line| {
            let p = match space {
                Space::Finite { .. } => Point::Atom(space.atom_index(line.trim())?),
                Space::Cube { .. } => Point::Coords(
                    line.split_whitespace()
                        .map(|t| t.parse::<f64>().map_err(|e| bad(format!("bad coordinate `{t}`: {e}"))))
                        .collect::<Result<_>>()?,
                ),
            };
            space.check_point(&p)?;
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    if nodes.len() != n {
        return Err(bad(format!("header declares {n} nodes, found {}", nodes.len())));
    }
    Ok(nodes)
}

/// Position of `config` in the lexicographic enumeration, for cross-checks.
pub fn rank_of(partition: &Partition, config: &Configuration) -> Option<u128> {
    let mut rank = 0u128;
    for (cell, chosen) in partition.cells().iter().zip(&config.cells) {
        let atoms = cell.atom_ids()?;
        let m = atoms.len() as u64;
        let k = chosen.len() as u64;
        let size = multichoose(m, k)?;
        let idx: Vec<u64> = chosen
            .iter()
            .map(|a| atoms.binary_search(a).ok().map(|i| i as u64))
            .collect::<Option<_>>()?;
        // Rank of a nondecreasing sequence among all such sequences.
        let mut r = 0u128;
        let mut prev = 0u64;
        for (pos, &v) in idx.iter().enumerate() {
            let remaining = k - pos as u64 - 1;
            for smaller in prev..v {
                r += multichoose(m - smaller, remaining)?;
            }
            prev = v;
        }
        rank = rank * size + r;
    }
    Some(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_cells() -> Partition {
        Partition::dyadic(2).unwrap()
    }

    fn finite(weights: &[f64]) -> Space {
        Space::finite(weights.iter().enumerate().map(|(i, &w)| (format!("x{i}"), w))).unwrap()
    }

    #[test]
    fn allocation_examples() {
        assert_eq!(allocation(&four_cells(), 8).unwrap(), vec![2, 2, 2, 2]);
        let err = allocation(&four_cells(), 6).unwrap_err();
        assert_eq!(
            err,
            Error::NonIntegerAllocation {
                n: 6,
                cell: 0,
                product: 1.5,
                suggested: Some(8)
            }
        );
        let s = finite(&[0.25, 0.5, 0.25]);
        let p = Partition::new(s, vec![Cell::atoms([0]), Cell::atoms([1, 2])]).unwrap();
        assert_eq!(allocation(&p, 4).unwrap(), vec![1, 3]);
    }

    #[test]
    fn suggestion_for_thirds() {
        let s = finite(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        let p = Partition::new(s, vec![Cell::atoms([0]), Cell::atoms([1, 2])]).unwrap();
        match allocation(&p, 4).unwrap_err() {
            Error::NonIntegerAllocation { suggested, .. } => assert_eq!(suggested, Some(6)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn midpoint_nodes() {
        let ps = construct_uniform(&four_cells(), 4, Placement::CellMidpoint, 0).unwrap();
        assert_eq!(ps.nodes(), &[0.125, 0.375, 0.625, 0.875].map(Point::scalar));
    }

    #[test]
    fn equispaced_nodes() {
        let ps = construct_uniform(&Partition::dyadic(1).unwrap(), 4, Placement::Equispaced, 0).unwrap();
        assert_eq!(ps.nodes(), &[0.125, 0.375, 0.625, 0.875].map(Point::scalar));
        assert_eq!(ps.allocation(), &[2, 2]);
        assert!(is_uniform(ps.nodes(), &Partition::dyadic(1).unwrap()).unwrap().uniform);
    }

    #[test]
    fn singleton_cells_force_the_point_set() {
        let s = finite(&[0.5, 0.5]);
        let p = Partition::new(s, vec![Cell::atoms([0]), Cell::atoms([1])]).unwrap();
        for placement in [Placement::CellMidpoint, Placement::Equispaced, Placement::SeededRandom] {
            let ps = construct_uniform(&p, 2, placement, 7).unwrap();
            assert_eq!(ps.nodes(), &[Point::Atom(0), Point::Atom(1)]);
        }
    }

    #[test]
    fn random_nodes_avoid_listed_points() {
        let p = four_cells();
        let first = construct_uniform(&p, 8, Placement::SeededRandom, 3).unwrap();
        let avoid: Vec<Vec<f64>> = first.nodes().iter().map(|n| n.coords().unwrap().to_vec()).collect();
        let second = construct_uniform_avoiding(&p, 8, Placement::SeededRandom, 3, &avoid).unwrap();
        assert!(second
            .nodes()
            .iter()
            .all(|n| !avoid.contains(&n.coords().unwrap().to_vec())));
        assert!(is_uniform(second.nodes(), &p).unwrap().uniform);
    }

    #[test]
    fn midpoint_nudged_off_spike() {
        let p = four_cells();
        let avoid = vec![vec![0.375]];
        let ps = construct_uniform_avoiding(&p, 4, Placement::CellMidpoint, 0, &avoid).unwrap();
        assert_ne!(ps.nodes()[1], Point::scalar(0.375));
        assert!(is_uniform(ps.nodes(), &p).unwrap().uniform);
    }

    #[test]
    fn uniformity_checks() {
        let p = four_cells();
        let good = [0.125, 0.375, 0.625, 0.875].map(Point::scalar);
        assert!(is_uniform(&good, &p).unwrap().uniform);
        let bad = is_uniform(&[0.1, 0.2, 0.3, 0.9].map(Point::scalar), &p).unwrap();
        assert!(!bad.uniform);
        assert_eq!(bad.counts, vec![2, 1, 0, 1]);
        let whole = Partition::whole(Space::unit_interval());
        assert!(is_uniform(&[0.1, 0.1, 0.7].map(Point::scalar), &whole).unwrap().uniform);
        assert!(matches!(
            is_uniform(&[Point::scalar(2.0)], &p),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn multichoose_values() {
        assert_eq!(multichoose(2, 2), Some(3));
        assert_eq!(multichoose(1, 3), Some(1));
        assert_eq!(multichoose(6, 4), Some(126));
        assert_eq!(multichoose(0, 0), Some(1));
        assert_eq!(multichoose(0, 2), Some(0));
        assert_eq!(multichoose(u64::MAX, 40), None);
    }

    #[test]
    fn enumerate_fair_coin_pairs() {
        let p = Partition::whole(finite(&[0.5, 0.5]));
        let all: Vec<Configuration> = enumerate_uniform(&p, 2, DEFAULT_ENUMERATION_CAP).unwrap().collect();
        let cells: Vec<Vec<usize>> = all.iter().map(|c| c.cells[0].clone()).collect();
        assert_eq!(cells, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn enumerate_product_of_cells() {
        let s = finite(&[0.25; 4]);
        let p = Partition::new(s, vec![Cell::atoms([0, 1]), Cell::atoms([2, 3])]).unwrap();
        let stream = enumerate_uniform(&p, 2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(stream.total_count(), 4);
        let all: Vec<Vec<usize>> = stream.map(|c| c.atoms().collect()).collect();
        assert_eq!(all, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn enumerate_single_atom() {
        let p = Partition::whole(finite(&[1.0]));
        let all: Vec<Configuration> = enumerate_uniform(&p, 3, 10).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].cells, vec![vec![0, 0, 0]]);
    }

    #[test]
    fn enumeration_cap() {
        let p = Partition::whole(finite(&[0.125; 8]));
        let err = enumerate_uniform(&p, 8, 100).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { cap: 100, .. }));
        assert_eq!(
            enumerate_uniform(&Partition::dyadic(1).unwrap(), 2, 10).unwrap_err(),
            Error::NotFinite
        );
    }

    #[test]
    fn shards_partition_the_stream() {
        let s = finite(&[0.125, 0.125, 0.25, 0.25, 0.125, 0.125]);
        let p = Partition::new(s, vec![Cell::atoms([0, 1, 2]), Cell::atoms([3, 4, 5])]).unwrap();
        let full = enumerate_uniform(&p, 8, 1000).unwrap();
        let mut expected: Vec<(u128, Configuration)> = Vec::new();
        let mut s = full.clone();
        while let Some(c) = s.next() {
            expected.push((s.position(), c));
        }
        assert_eq!(expected.len() as u128, full.total_count());
        assert!(expected.iter().enumerate().all(|(i, (pos, _))| *pos == i as u128));
        let mut merged = Vec::new();
        for shard in 0..3 {
            let mut s = full.clone().shard(shard, 3);
            while let Some(c) = s.next() {
                merged.push((s.position(), c));
            }
        }
        merged.sort();
        assert_eq!(merged, expected);
        assert!(expected.iter().all(|(pos, c)| rank_of(&p, c) == Some(*pos)));
    }

    #[test]
    fn text_round_trip() {
        let p = four_cells();
        let nodes = [0.125, 0.375, 0.625, 1.0 / 3.0 + 0.5].map(Point::scalar).to_vec();
        let text = write_point_set(&p, &nodes).unwrap();
        assert!(text.starts_with(&format!("N 4 partition {}\n", p.fingerprint())));
        assert_eq!(read_point_set(&p, &text).unwrap(), nodes);
        assert!(read_point_set(&Partition::dyadic(3).unwrap(), &text).is_err());

        let s = finite(&[0.5, 0.5]);
        let q = Partition::whole(s);
        let text = write_point_set(&q, &[Point::Atom(1), Point::Atom(0)]).unwrap();
        assert_eq!(text.lines().nth(1), Some("x1"));
        assert_eq!(read_point_set(&q, &text).unwrap(), vec![Point::Atom(1), Point::Atom(0)]);
    }

    #[test]
    fn canonical_order_sorts_within_cells() {
        let p = Partition::dyadic(1).unwrap();
        let ps = UniformPointSet::from_nodes(&p, [0.9, 0.3, 0.6, 0.1].map(Point::scalar).to_vec()).unwrap();
        let c = ps.canonicalized();
        assert_eq!(c.nodes(), &[0.1, 0.3, 0.6, 0.9].map(Point::scalar));
        assert_eq!(c.cell_of_node(), &[0, 0, 1, 1]);
    }
}
