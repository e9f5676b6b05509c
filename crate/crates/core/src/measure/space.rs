use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::TOLERANCE;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub label: String,
    pub weight: f64,
}

/// A probability space: finitely many weighted atoms, or `[0,1]^d` with
/// Lebesgue measure.
#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Finite { atoms: Vec<Atom> },
    Cube { dim: usize },
}

impl Space {
    /// Validates (but never renormalizes) a list of weighted atoms.
    pub fn finite<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(label, weight)| Atom {
                label: label.into(),
                weight,
            })
            .collect();
        if atoms.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut seen = HashSet::new();
        for atom in &atoms {
            if !atom.weight.is_finite() || atom.weight <= 0.0 || atom.weight > 1.0 {
                return Err(Error::NonPositiveWeight {
                    label: atom.label.clone(),
                    weight: atom.weight,
                });
            }
            if !seen.insert(atom.label.as_str()) {
                return Err(Error::DuplicateLabel(atom.label.clone()));
            }
        }
        let sum = crate::sum::compensated_sum(atoms.iter().map(|a| a.weight));
        if (sum - 1.0).abs() > TOLERANCE {
            return Err(Error::WeightSum { sum });
        }
        Ok(Space::Finite { atoms })
    }

    pub fn cube(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Space::Cube { dim })
    }

    pub fn unit_interval() -> Self {
        Space::Cube { dim: 1 }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Space::Finite { .. })
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match self {
            Space::Finite { atoms } => Some(atoms),
            Space::Cube { .. } => None,
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atoms().map_or(0, <[Atom]>::len)
    }

    /// Dimension of a cube space; 0 for finite spaces.
    pub fn dim(&self) -> usize {
        match self {
            Space::Finite { .. } => 0,
            Space::Cube { dim } => *dim,
        }
    }

    pub fn atom_index(&self, label: &str) -> Result<usize> {
        self.atoms()
            .and_then(|atoms| atoms.iter().position(|a| a.label == label))
            .ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }

    pub fn contains(&self, point: &Point) -> bool {
        match (self, point) {
            (Space::Finite { atoms }, Point::Atom(i)) => *i < atoms.len(),
            (Space::Cube { dim }, Point::Coords(x)) => x.len() == *dim && x.iter().all(|&c| (0.0..=1.0).contains(&c)),
            _ => false,
        }
    }

    pub(crate) fn check_point(&self, point: &Point) -> Result<()> {
        if self.contains(point) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(format!("{point}")))
        }
    }

    /// The cell covering the whole space.
    pub fn whole_cell(&self) -> Cell {
        match self {
            Space::Finite { atoms } => Cell::Atoms((0..atoms.len()).collect()),
            Space::Cube { dim } => Cell::Box(BoxCell {
                lo: vec![0.0; *dim],
                hi: vec![1.0; *dim],
            }),
        }
    }

    /// Checks that `cell` is a well-formed, positive-measure cell of this space.
    pub(crate) fn check_cell(&self, cell: &Cell, index: usize) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidCell {
            index,
            reason: reason.to_string(),
        };
        match (self, cell) {
            (Space::Finite { atoms }, Cell::Atoms(ids)) => {
                if ids.is_empty() {
                    return Err(Error::EmptyCell { index });
                }
                if ids.iter().any(|&i| i >= atoms.len()) {
                    return Err(invalid("atom index out of range"));
                }
                if ids.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("atom indices must be strictly increasing"));
                }
                Ok(())
            }
            (Space::Cube { dim }, Cell::Box(b)) => {
                if b.lo.len() != *dim || b.hi.len() != *dim {
                    return Err(invalid("box dimension does not match the cube"));
                }
                if b.lo.iter().chain(&b.hi).any(|c| !(0.0..=1.0).contains(c)) {
                    return Err(invalid("box bounds must lie in [0,1]"));
                }
                if b.lo.iter().zip(&b.hi).any(|(l, h)| l >= h) {
                    return Err(Error::EmptyCell { index });
                }
                Ok(())
            }
            _ => Err(invalid("cell kind does not match the space")),
        }
    }

    /// Measure of a cell already checked against this space.
    pub fn measure(&self, cell: &Cell) -> f64 {
        match (self, cell) {
            (Space::Finite { atoms }, Cell::Atoms(ids)) => {
                crate::sum::compensated_sum(ids.iter().map(|&i| atoms[i].weight))
            }
            (Space::Cube { .. }, Cell::Box(b)) => b.volume(),
            _ => 0.0,
        }
    }

    /// Measure of the intersection of two cells of this space.
    pub fn intersection_measure(&self, a: &Cell, b: &Cell) -> f64 {
        match (self, a, b) {
            (Space::Finite { atoms }, Cell::Atoms(x), Cell::Atoms(y)) => crate::sum::compensated_sum(
                x.iter()
                    .filter(|i| y.binary_search(i).is_ok())
                    .map(|&i| atoms[i].weight),
            ),
            (Space::Cube { .. }, Cell::Box(x), Cell::Box(y)) => x.intersection_volume(y),
            _ => 0.0,
        }
    }
}

/// A node of a point set: an atom index, or coordinates in the cube.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Atom(usize),
    Coords(Vec<f64>),
}

impl Point {
    pub fn scalar(x: f64) -> Self {
        Point::Coords(vec![x])
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(x) => Some(x),
            Point::Atom(_) => None,
        }
    }

    /// Total order used for canonicalizing point sets.
    pub fn total_cmp(&self, other: &Point) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (Point::Atom(a), Point::Atom(b)) => a.cmp(b),
            (Point::Coords(a), Point::Coords(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or_else(|| a.len().cmp(&b.len())),
            (Point::Atom(_), Point::Coords(_)) => Ordering::Less,
            (Point::Coords(_), Point::Atom(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Atom(i) => write!(f, "atom#{i}"),
            Point::Coords(x) => {
                write!(f, "(")?;
                for (i, c) in x.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Axis-aligned box `[lo_1,hi_1) x ... x [lo_d,hi_d)`, closed on every face
/// where `hi_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxCell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxCell {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        BoxCell { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&c, (&l, &h))| c >= l && (c < h || (h == 1.0 && c == 1.0)))
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| l + 0.5 * (h - l)).collect()
    }

    pub fn intersection_volume(&self, other: &BoxCell) -> f64 {
        let mut v = 1.0;
        for i in 0..self.dim() {
            let w = self.hi[i].min(other.hi[i]) - self.lo[i].max(other.lo[i]);
            if w <= 0.0 {
                return 0.0;
            }
            v *= w;
        }
        v
    }

    /// True when `other` lies inside `self` (as point sets).
    pub fn encloses(&self, other: &BoxCell) -> bool {
        (0..self.dim()).all(|i| other.lo[i] >= self.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// Splits the box into two halves along `axis`.
    pub fn halve(&self, axis: usize) -> (BoxCell, BoxCell) {
        let mid = self.lo[axis] + 0.5 * self.width(axis);
        let mut left = self.clone();
        let mut right = self.clone();
        left.hi[axis] = mid;
        right.lo[axis] = mid;
        (left, right)
    }
}

/// A cell of a partition.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Sorted, duplicate-free atom indices of a finite space.
    Atoms(Vec<usize>),
    Box(BoxCell),
}

impl Cell {
    pub fn atoms<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let mut ids: Vec<usize> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Cell::Atoms(ids)
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Cell::Box(BoxCell::new(vec![lo], vec![hi]))
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Cell::Box(BoxCell::new(lo, hi))
    }

    pub fn contains(&self, point: &Point) -> bool {
        match (self, point) {
            (Cell::Atoms(ids), Point::Atom(i)) => ids.binary_search(i).is_ok(),
            (Cell::Box(b), Point::Coords(x)) => b.contains(x),
            _ => false,
        }
    }

    pub fn as_box(&self) -> Option<&BoxCell> {
        match self {
            Cell::Box(b) => Some(b),
            Cell::Atoms(_) => None,
        }
    }

    pub fn atom_ids(&self) -> Option<&[usize]> {
        match self {
            Cell::Atoms(ids) => Some(ids),
            Cell::Box(_) => None,
        }
    }

    /// True when `other` is a subset of `self`.
    pub fn encloses(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Atoms(a), Cell::Atoms(b)) => b.iter().all(|i| a.binary_search(i).is_ok()),
            (Cell::Box(a), Cell::Box(b)) => a.dim() == b.dim() && a.encloses(b),
            _ => false,
        }
    }
}
