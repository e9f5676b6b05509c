use sha2::{Digest, Sha256};

use super::space::{BoxCell, Cell, Point, Space};
use crate::error::{Error, Result};
use crate::TOLERANCE;

/// Deepest level accepted by [`Partition::dyadic`].
pub const MAX_DYADIC_LEVEL: u32 = 24;

/// A finite family of pairwise disjoint, positive-measure cells covering the
/// space, with cached cell measures.
///
/// For cube spaces, disjoint half-open boxes whose volumes sum to one cover
/// `[0,1]^d` exactly: the complement would be a finite union of nonempty
/// half-open boxes, each of positive volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    space: Space,
    cells: Vec<Cell>,
    measures: Vec<f64>,
    parents: Option<Vec<usize>>,
}

/// How one cell is split by [`Partition::refine`].
#[derive(Debug, Clone, PartialEq)]
pub enum Split {
    Keep,
    /// Halve a box cell along the given axis.
    Halve {
        axis: usize,
    },
    /// An explicit disjoint cover of the parent cell.
    Cells(Vec<Cell>),
}

impl Partition {
    pub fn new(space: Space, cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::NoCells);
        }
        for (i, cell) in cells.iter().enumerate() {
            space.check_cell(cell, i)?;
        }
        check_disjoint(&space, &cells)?;
        let measures: Vec<f64> = cells.iter().map(|c| space.measure(c)).collect();
        if let Some(i) = measures.iter().position(|&m| m.is_nan() || m <= 0.0) {
            return Err(Error::EmptyCell { index: i });
        }
        match &space {
            Space::Finite { atoms } => {
                let covered: usize = cells.iter().map(|c| c.atom_ids().map_or(0, <[usize]>::len)).sum();
                if covered != atoms.len() {
                    return Err(Error::Cover {
                        total: crate::sum::compensated_sum(measures.iter().copied()),
                    });
                }
            }
            Space::Cube { .. } => {
                let total = crate::sum::compensated_sum(measures.iter().copied());
                if (total - 1.0).abs() > TOLERANCE {
                    return Err(Error::Cover { total });
                }
            }
        }
        Ok(Partition {
            space,
            cells,
            measures,
            parents: None,
        })
    }

    /// The trivial partition `{X}`.
    pub fn whole(space: Space) -> Self {
        let cell = space.whole_cell();
        Partition {
            space,
            cells: vec![cell],
            measures: vec![1.0],
            parents: None,
        }
    }

    /// `2^m` equal intervals of `[0,1]`.
    pub fn dyadic(m: u32) -> Result<Self> {
        if m > MAX_DYADIC_LEVEL {
            return Err(Error::InvalidCell {
                index: 0,
                reason: format!("dyadic level {m} exceeds {MAX_DYADIC_LEVEL}"),
            });
        }
        Self::grid(Space::unit_interval(), &[1usize << m])
    }

    /// A tensor grid of `per_axis[i]` equal slabs along each axis of the cube.
    pub fn grid(space: Space, per_axis: &[usize]) -> Result<Self> {
        let dim = space.dim();
        if dim == 0 || per_axis.len() != dim || per_axis.contains(&0) {
            return Err(Error::InvalidCell {
                index: 0,
                reason: "grid shape must give a positive count per cube axis".into(),
            });
        }
        let total: usize = per_axis.iter().product();
        let mut cells = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let lo = (0..dim).map(|a| idx[a] as f64 / per_axis[a] as f64).collect();
            let hi = (0..dim).map(|a| (idx[a] + 1) as f64 / per_axis[a] as f64).collect();
            cells.push(Cell::Box(BoxCell::new(lo, hi)));
            for a in (0..dim).rev() {
                idx[a] += 1;
                if idx[a] < per_axis[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Partition::new(space, cells)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the parent cell in the partition this one was refined from.
    pub fn parent_of(&self, cell: usize) -> Option<usize> {
        self.parents.as_ref().map(|p| p[cell])
    }

    pub fn parents(&self) -> Option<&[usize]> {
        self.parents.as_deref()
    }

    /// Index of the cell containing `point`.
    pub fn cell_of(&self, point: &Point) -> Result<usize> {
        self.space.check_point(point)?;
        if let (Point::Coords(x), true) = (point, self.space.dim() == 1) {
            // 1-d cells kept sorted by the constructors in this crate; fall
            // back to a scan otherwise.
            if let Some(j) = self.sorted_interval_lookup(x[0]) {
                return Ok(j);
            }
        }
        self.cells
            .iter()
            .position(|c| c.contains(point))
            .ok_or_else(|| Error::OutOfDomain(format!("{point}")))
    }

    fn sorted_interval_lookup(&self, x: f64) -> Option<usize> {
        let j = self.cells.partition_point(|c| c.as_box().is_some_and(|b| b.lo[0] <= x));
        let j = j.checked_sub(1)?;
        self.cells[j].as_box().filter(|b| b.contains(&[x])).map(|_| j)
    }

    /// Splits every cell according to `splits` (one entry per cell).
    pub fn refine(&self, splits: &[Split]) -> Result<Partition> {
        if splits.len() != self.cells.len() {
            return Err(Error::InvalidCell {
                index: splits.len().min(self.cells.len()),
                reason: format!(
                    "expected {} split specifications, got {}",
                    self.cells.len(),
                    splits.len()
                ),
            });
        }
        let mut cells = Vec::new();
        let mut parents = Vec::new();
        for (j, (cell, split)) in self.cells.iter().zip(splits).enumerate() {
            let children = match split {
                Split::Keep => vec![cell.clone()],
                Split::Halve { axis } => match cell {
                    Cell::Box(b) if *axis < b.dim() => {
                        let (l, r) = b.halve(*axis);
                        vec![Cell::Box(l), Cell::Box(r)]
                    }
                    _ => {
                        return Err(Error::InvalidCell {
                            index: j,
                            reason: "halving needs a box cell and a valid axis".into(),
                        })
                    }
                },
                Split::Cells(children) => {
                    check_split(&self.space, cell, self.measures[j], children, j)?;
                    children.clone()
                }
            };
            parents.extend(std::iter::repeat_n(j, children.len()));
            cells.extend(children);
        }
        let mut refined = Partition::new(self.space.clone(), cells)?;
        refined.parents = Some(parents);
        Ok(refined)
    }

    /// Halves every box cell along `axis`.
    pub fn refine_halving(&self, axis: usize) -> Result<Partition> {
        let splits = vec![Split::Halve { axis }; self.cells.len()];
        self.refine(&splits)
    }

    /// Short stable hash of the space and cells, used in point-set headers.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        match &self.space {
            Space::Finite { atoms } => {
                h.update(b"finite");
                for a in atoms {
                    h.update(a.label.as_bytes());
                    h.update([0u8]);
                    h.update(a.weight.to_bits().to_le_bytes());
                }
            }
            Space::Cube { dim } => {
                h.update(b"cube");
                h.update((*dim as u64).to_le_bytes());
            }
        }
        for cell in &self.cells {
            match cell {
                Cell::Atoms(ids) => {
                    h.update(b"A");
                    for &i in ids {
                        h.update((i as u64).to_le_bytes());
                    }
                }
                Cell::Box(b) => {
                    h.update(b"B");
                    for c in b.lo.iter().chain(&b.hi) {
                        h.update(c.to_bits().to_le_bytes());
                    }
                }
            }
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn check_disjoint(space: &Space, cells: &[Cell]) -> Result<()> {
    match space {
        Space::Finite { atoms } => {
            let mut owner: Vec<Option<usize>> = vec![None; atoms.len()];
            for (j, cell) in cells.iter().enumerate() {
                for &i in cell.atom_ids().unwrap_or(&[]) {
                    if let Some(first) = owner[i] {
                        return Err(Error::Overlap { first, second: j });
                    }
                    owner[i] = Some(j);
                }
            }
        }
        Space::Cube { .. } => {
            let boxes: Vec<&BoxCell> = cells.iter().filter_map(Cell::as_box).collect();
            if boxes.len() > 1 && boxes[0].dim() == 1 && boxes.windows(2).all(|w| w[0].lo[0] <= w[1].lo[0]) {
                // Sorted intervals only need neighbour checks.
                for (j, w) in boxes.windows(2).enumerate() {
                    if w[0].hi[0] > w[1].lo[0] {
                        return Err(Error::Overlap {
                            first: j,
                            second: j + 1,
                        });
                    }
                }
                return Ok(());
            }
            for (a, x) in boxes.iter().enumerate() {
                for (b, y) in boxes.iter().enumerate().skip(a + 1) {
                    if x.intersection_volume(y) > 0.0 {
                        return Err(Error::Overlap { first: a, second: b });
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_split(space: &Space, parent: &Cell, measure: f64, children: &[Cell], j: usize) -> Result<()> {
    if children.is_empty() {
        return Err(Error::EmptyCell { index: j });
    }
    for child in children {
        space.check_cell(child, j)?;
        if !parent.encloses(child) {
            return Err(Error::InvalidCell {
                index: j,
                reason: "split cell is not contained in its parent".into(),
            });
        }
    }
    check_disjoint(space, children)?;
    let total = crate::sum::compensated_sum(children.iter().map(|c| space.measure(c)));
    if (total - measure).abs() > TOLERANCE {
        return Err(Error::Cover { total });
    }
    Ok(())
}

#[cfg(test)]
impl Partition {
    fn with_parents(mut self, parents: Vec<usize>) -> Self {
        self.parents = Some(parents);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Space {
        Space::finite([("a", 0.2), ("b", 0.3), ("c", 0.5)]).unwrap()
    }

    #[test]
    fn two_halves() {
        let p = Partition::new(
            Space::unit_interval(),
            vec![Cell::interval(0.0, 0.5), Cell::interval(0.5, 1.0)],
        )
        .unwrap();
        assert_eq!(p.measures(), &[0.5, 0.5]);
    }

    #[test]
    fn overlapping_intervals() {
        let err = Partition::new(
            Space::unit_interval(),
            vec![Cell::interval(0.0, 0.6), Cell::interval(0.5, 1.0)],
        )
        .unwrap_err();
        assert_eq!(err, Error::Overlap { first: 0, second: 1 });
    }

    #[test]
    fn gap_is_a_cover_error() {
        let err = Partition::new(
            Space::unit_interval(),
            vec![Cell::interval(0.0, 0.4), Cell::interval(0.5, 1.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Cover { .. }));
    }

    #[test]
    fn finite_measures() {
        let p = Partition::new(abc(), vec![Cell::atoms([0]), Cell::atoms([1, 2])]).unwrap();
        assert_eq!(p.measures(), &[0.2, 0.8]);
    }

    #[test]
    fn finite_overlap_and_cover() {
        let err = Partition::new(abc(), vec![Cell::atoms([0, 1]), Cell::atoms([1, 2])]).unwrap_err();
        assert_eq!(err, Error::Overlap { first: 0, second: 1 });
        let err = Partition::new(abc(), vec![Cell::atoms([0]), Cell::atoms([2])]).unwrap_err();
        assert!(matches!(err, Error::Cover { .. }));
    }

    #[test]
    fn empty_cells_rejected() {
        let err = Partition::new(abc(), vec![Cell::atoms([]), Cell::atoms([0, 1, 2])]).unwrap_err();
        assert_eq!(err, Error::EmptyCell { index: 0 });
        let err = Partition::new(
            Space::unit_interval(),
            vec![Cell::interval(0.5, 0.5), Cell::interval(0.0, 1.0)],
        )
        .unwrap_err();
        assert_eq!(err, Error::EmptyCell { index: 0 });
        assert_eq!(Partition::new(abc(), vec![]).unwrap_err(), Error::NoCells);
    }

    #[test]
    fn dyadic_level_is_capped() {
        assert_eq!(Partition::dyadic(3).unwrap().len(), 8);
        assert!(Partition::dyadic(MAX_DYADIC_LEVEL + 1).is_err());
        assert!(Partition::dyadic(70).is_err());
    }

    #[test]
    fn dyadic_split_of_unit_interval() {
        let p = Partition::whole(Space::unit_interval()).refine_halving(0).unwrap();
        assert_eq!(p.cells(), &[Cell::interval(0.0, 0.5), Cell::interval(0.5, 1.0)]);
        assert_eq!(p.parents(), Some(&[0, 0][..]));
    }

    #[test]
    fn repeated_dyadic_split() {
        let mut p = Partition::whole(Space::unit_interval());
        for _ in 0..6 {
            p = p.refine_halving(0).unwrap();
        }
        assert_eq!(p.len(), 64);
        assert!(p.measures().iter().all(|&m| m == 1.0 / 64.0));
        assert_eq!(
            p,
            Partition::dyadic(6)
                .unwrap()
                .with_parents(p.parents().unwrap().to_vec())
        );
    }

    #[test]
    fn explicit_finite_split() {
        let s = Space::finite([("a", 0.5), ("b", 0.5)]).unwrap();
        let p = Partition::whole(s);
        let q = p
            .refine(&[Split::Cells(vec![Cell::atoms([0]), Cell::atoms([1])])])
            .unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.parent_of(1), Some(0));
    }

    #[test]
    fn split_must_cover_parent() {
        let p = Partition::new(abc(), vec![Cell::atoms([0, 1]), Cell::atoms([2])]).unwrap();
        let err = p
            .refine(&[Split::Cells(vec![Cell::atoms([0])]), Split::Keep])
            .unwrap_err();
        assert!(matches!(err, Error::Cover { .. }));
        let err = p
            .refine(&[Split::Cells(vec![Cell::atoms([0]), Cell::atoms([1, 2])]), Split::Keep])
            .unwrap_err();
        assert!(matches!(err, Error::InvalidCell { .. }));
    }

    #[test]
    fn grid_2d_cells_cover() {
        let p = Partition::grid(Space::cube(2).unwrap(), &[2, 3]).unwrap();
        assert_eq!(p.len(), 6);
        let j = p.cell_of(&Point::Coords(vec![0.75, 0.5])).unwrap();
        assert!(p.cells()[j].contains(&Point::Coords(vec![0.75, 0.5])));
        assert!(p.cell_of(&Point::Coords(vec![1.0, 1.0])).is_ok());
    }

    #[test]
    fn cell_lookup_uses_half_open_convention() {
        let p = Partition::dyadic(2).unwrap();
        assert_eq!(p.cell_of(&Point::scalar(0.25)).unwrap(), 1);
        assert_eq!(p.cell_of(&Point::scalar(1.0)).unwrap(), 3);
        assert!(p.cell_of(&Point::scalar(1.5)).is_err());
    }

    #[test]
    fn fingerprint_is_stable_and_discriminating() {
        let a = Partition::dyadic(2).unwrap();
        assert_eq!(a.fingerprint(), Partition::dyadic(2).unwrap().fingerprint());
        assert_ne!(a.fingerprint(), Partition::dyadic(3).unwrap().fingerprint());
        assert_eq!(a.fingerprint().len(), 16);
    }
}
