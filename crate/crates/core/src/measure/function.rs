use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::partition::Partition;
use super::space::{BoxCell, Cell, Point, Space};
use crate::error::{Error, Result};

/// Value override at a single point of a cube space. A finite set of spikes
/// is a null set, so spikes change `f` pointwise but not as an element of
/// `L-infinity`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spike {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeMode {
    /// Closed-form extrema for the built-in families.
    Exact,
    /// Tensor grid with `(resolution - 1) * 2^levels + 1` points per axis.
    Grid { resolution: usize, levels: u32 },
}

/// The base function of a [`FunctionModel`].
///
/// The closed-form families live on cube spaces and are separable or
/// coordinate-wise monotone, which is what makes their per-box extrema exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Base {
    /// `intercept + sum_i slopes[i] * x_i`
    Affine { intercept: f64, slopes: Vec<f64> },
    /// `constant + sum_i (linear[i] * x_i + square[i] * x_i^2)`
    Quadratic {
        constant: f64,
        linear: Vec<f64>,
        square: Vec<f64>,
    },
    /// `offset + scale * prod_i x_i^exponents[i]` with positive exponents.
    MonotoneProduct {
        offset: f64,
        scale: f64,
        exponents: Vec<f64>,
    },
    /// `offset + amplitude * sin(2 pi frequency x_axis + phase)`
    Sinusoid {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        phase: f64,
        axis: usize,
    },
    /// Constant `values[j]` on cell `j` of `partition`.
    PiecewiseConstant { partition: Partition, values: Vec<f64> },
    /// Value per atom of a finite space.
    Table { values: Vec<f64> },
}

impl Base {
    fn is_closed_form(&self) -> bool {
        !matches!(self, Base::PiecewiseConstant { .. } | Base::Table { .. })
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Base::Affine { .. } => "affine",
            Base::Quadratic { .. } => "quadratic",
            Base::MonotoneProduct { .. } => "monotone_product",
            Base::Sinusoid { .. } => "sinusoid",
            Base::PiecewiseConstant { .. } => "piecewise_constant",
            Base::Table { .. } => "table",
        }
    }
}

/// Essential infimum and supremum of a function over one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssentialRange {
    pub lo: f64,
    pub hi: f64,
    /// False for grid estimates: then `hi` under-estimates the essential
    /// supremum and `lo` over-estimates the essential infimum, each by at most
    /// `tolerance`.
    pub exact: bool,
    pub tolerance: f64,
}

impl EssentialRange {
    fn exact(lo: f64, hi: f64) -> Self {
        EssentialRange {
            lo,
            hi,
            exact: true,
            tolerance: 0.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// An essentially bounded function: a base function plus finitely many spikes.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionModel {
    space: Space,
    base: Base,
    spikes: Vec<Spike>,
    range_mode: RangeMode,
}

const MAX_GRID_POINTS: f64 = 1e7;

impl FunctionModel {
    pub fn new(space: Space, base: Base) -> Result<Self> {
        validate_base(&space, &base)?;
        Ok(FunctionModel {
            space,
            base,
            spikes: Vec::new(),
            range_mode: RangeMode::Exact,
        })
    }

    /// `f(x) = x` on `[0,1]`.
    pub fn identity() -> Self {
        Self::affine(0.0, 1.0)
    }

    /// `intercept + slope * x` on `[0,1]`.
    pub fn affine(intercept: f64, slope: f64) -> Self {
        Self::new(
            Space::unit_interval(),
            Base::Affine {
                intercept,
                slopes: vec![slope],
            },
        )
        .expect("finite coefficients")
    }

    /// `constant + linear * x + square * x^2` on `[0,1]`.
    pub fn quadratic(constant: f64, linear: f64, square: f64) -> Self {
        Self::new(
            Space::unit_interval(),
            Base::Quadratic {
                constant,
                linear: vec![linear],
                square: vec![square],
            },
        )
        .expect("finite coefficients")
    }

    /// `offset + amplitude * sin(2 pi frequency x + phase)` on `[0,1]`.
    pub fn sinusoid(offset: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self::new(
            Space::unit_interval(),
            Base::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
                axis: 0,
            },
        )
        .expect("finite coefficients")
    }

    pub fn constant(space: Space, value: f64) -> Result<Self> {
        let base = match &space {
            Space::Finite { atoms } => Base::Table {
                values: vec![value; atoms.len()],
            },
            Space::Cube { dim } => Base::Affine {
                intercept: value,
                slopes: vec![0.0; *dim],
            },
        };
        Self::new(space, base)
    }

    pub fn table(space: Space, values: Vec<f64>) -> Result<Self> {
        Self::new(space, Base::Table { values })
    }

    pub fn piecewise_constant(partition: Partition, values: Vec<f64>) -> Result<Self> {
        let space = partition.space().clone();
        Self::new(space, Base::PiecewiseConstant { partition, values })
    }

    pub fn with_spikes(mut self, spikes: Vec<Spike>) -> Result<Self> {
        if self.space.is_finite() && !spikes.is_empty() {
            return Err(Error::SpikesOnFiniteSpace);
        }
        for s in &spikes {
            let p = Point::Coords(s.point.clone());
            self.space.check_point(&p)?;
            if !s.value.is_finite() {
                return Err(Error::InvalidFunction("spike values must be finite".into()));
            }
        }
        self.spikes = spikes;
        Ok(self)
    }

    pub fn with_range_mode(mut self, mode: RangeMode) -> Result<Self> {
        if let RangeMode::Grid { resolution, levels } = mode {
            if resolution < 2 || levels > 20 {
                return Err(Error::InvalidFunction(
                    "grid mode needs resolution >= 2 and at most 20 levels".into(),
                ));
            }
            let per_axis = grid_points_per_axis(resolution, levels) as f64;
            if per_axis.powi(self.space.dim().max(1) as i32) > MAX_GRID_POINTS {
                return Err(Error::InvalidFunction("grid has too many points".into()));
            }
        }
        self.range_mode = mode;
        Ok(self)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    pub fn range_mode(&self) -> RangeMode {
        self.range_mode
    }

    /// The same function with every spike removed.
    pub fn without_spikes(&self) -> Self {
        FunctionModel {
            spikes: Vec::new(),
            ..self.clone()
        }
    }

    /// True when some spike sits exactly at `x`.
    pub fn is_spike(&self, x: &[f64]) -> bool {
        self.spikes.iter().any(|s| s.point == x)
    }

    /// Value at `point`; a spike at `point` takes precedence over the base.
    pub fn evaluate(&self, point: &Point) -> Result<f64> {
        self.space.check_point(point)?;
        if let Point::Coords(x) = point {
            if let Some(s) = self.spikes.iter().find(|s| &s.point == x) {
                return Ok(s.value);
            }
        }
        self.evaluate_base(point)
    }

    /// Value of the base function, ignoring spikes.
    pub fn evaluate_base(&self, point: &Point) -> Result<f64> {
        self.space.check_point(point)?;
        Ok(match (&self.base, point) {
            (Base::Table { values }, Point::Atom(i)) => values[*i],
            (Base::PiecewiseConstant { partition, values }, p) => values[partition.cell_of(p)?],
            (_, Point::Coords(x)) => self.closed_form(x),
            _ => return Err(Error::OutOfDomain(format!("{point}"))),
        })
    }

    fn closed_form(&self, x: &[f64]) -> f64 {
        match &self.base {
            Base::Affine { intercept, slopes } => intercept + slopes.iter().zip(x).map(|(s, x)| s * x).sum::<f64>(),
            Base::Quadratic {
                constant,
                linear,
                square,
            } => {
                constant
                    + (0..x.len())
                        .map(|i| linear[i] * x[i] + square[i] * x[i] * x[i])
                        .sum::<f64>()
            }
            Base::MonotoneProduct {
                offset,
                scale,
                exponents,
            } => offset + scale * x.iter().zip(exponents).map(|(x, p)| x.powf(*p)).product::<f64>(),
            Base::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
                axis,
            } => offset + amplitude * (TAU * frequency * x[*axis] + phase).sin(),
            Base::PiecewiseConstant { .. } | Base::Table { .. } => unreachable!(),
        }
    }

    /// Essential infimum and supremum over `cell`. Spikes never enter.
    pub fn essential_range(&self, cell: &Cell) -> Result<EssentialRange> {
        self.space
            .check_cell(cell, 0)
            .map_err(|e| Error::OutOfDomain(e.to_string()))?;
        match (&self.base, cell) {
            (Base::Table { values }, Cell::Atoms(ids)) => {
                let (lo, hi) = min_max(ids.iter().map(|&i| values[i]));
                Ok(EssentialRange::exact(lo, hi))
            }
            (Base::PiecewiseConstant { partition, values }, cell) => {
                let hit = partition
                    .cells()
                    .iter()
                    .zip(values)
                    .filter(|(c, _)| self.space.intersection_measure(c, cell) > 0.0)
                    .map(|(_, v)| *v);
                let (lo, hi) = min_max(hit);
                Ok(EssentialRange::exact(lo, hi))
            }
            (_, Cell::Box(b)) => Ok(match self.range_mode {
                RangeMode::Exact => self.exact_box_range(b),
                RangeMode::Grid { resolution, levels } => self.grid_box_range(b, resolution, levels),
            }),
            _ => Err(Error::OutOfDomain("cell kind does not match the function".into())),
        }
    }

    fn exact_box_range(&self, b: &BoxCell) -> EssentialRange {
        match &self.base {
            Base::Affine { intercept, slopes } => {
                let (mut lo, mut hi) = (*intercept, *intercept);
                for (i, s) in slopes.iter().enumerate() {
                    let (a, c) = (s * b.lo[i], s * b.hi[i]);
                    lo += a.min(c);
                    hi += a.max(c);
                }
                EssentialRange::exact(lo, hi)
            }
            Base::Quadratic {
                constant,
                linear,
                square,
            } => {
                let (mut lo, mut hi) = (*constant, *constant);
                for i in 0..b.dim() {
                    let q = |t: f64| linear[i] * t + square[i] * t * t;
                    let (l, h) = (b.lo[i], b.hi[i]);
                    let mut cand = vec![q(l), q(h)];
                    if square[i] != 0.0 {
                        let vertex = -linear[i] / (2.0 * square[i]);
                        if l < vertex && vertex < h {
                            cand.push(q(vertex));
                        }
                    }
                    let (a, c) = min_max(cand);
                    lo += a;
                    hi += c;
                }
                EssentialRange::exact(lo, hi)
            }
            Base::MonotoneProduct { .. } => {
                let a = self.closed_form(&b.lo);
                let c = self.closed_form(&b.hi);
                EssentialRange::exact(a.min(c), a.max(c))
            }
            Base::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
                axis,
            } => {
                let (l, h) = (b.lo[*axis], b.hi[*axis]);
                let t0 = TAU * frequency * l + phase;
                let t1 = TAU * frequency * h + phase;
                let mut sines = vec![t0.sin(), t1.sin()];
                if *frequency > 0.0 {
                    // Critical points of sin on (t0, t1): pi/2 + n pi.
                    let first = ((t0 - FRAC_PI_2) / PI).floor() as i64;
                    let last = ((t1 - FRAC_PI_2) / PI).ceil() as i64;
                    for n in first..=last {
                        let t = FRAC_PI_2 + n as f64 * PI;
                        if t0 < t && t < t1 {
                            sines.push(if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 });
                        }
                    }
                }
                let (lo, hi) = min_max(sines.into_iter().map(|s| offset + amplitude * s));
                EssentialRange::exact(lo, hi)
            }
            Base::PiecewiseConstant { .. } | Base::Table { .. } => unreachable!(),
        }
    }

    fn grid_box_range(&self, b: &BoxCell, resolution: usize, levels: u32) -> EssentialRange {
        let n = grid_points_per_axis(resolution, levels);
        let dim = b.dim();
        let mut idx = vec![0usize; dim];
        let mut x = b.lo.clone();
        let total = n.pow(dim as u32);
        let mut values = Vec::with_capacity(total);
        for _ in 0..total {
            for a in 0..dim {
                x[a] = b.lo[a] + b.width(a) * (idx[a] as f64 / (n - 1) as f64);
            }
            values.push(self.closed_form(&x));
            for a in (0..dim).rev() {
                idx[a] += 1;
                if idx[a] < n {
                    break;
                }
                idx[a] = 0;
            }
        }
        let (lo, hi) = min_max(values);
        // Every point of the box is within half a grid step of a node on each axis.
        let tolerance = (0..dim)
            .map(|a| self.axis_lipschitz(b, a) * 0.5 * b.width(a) / (n - 1) as f64)
            .sum();
        EssentialRange {
            lo,
            hi,
            exact: false,
            tolerance,
        }
    }

    /// Bound on `|df/dx_axis|` over the box.
    fn axis_lipschitz(&self, b: &BoxCell, axis: usize) -> f64 {
        match &self.base {
            Base::Affine { slopes, .. } => slopes[axis].abs(),
            Base::Quadratic { linear, square, .. } => {
                let d = |t: f64| (2.0 * square[axis] * t + linear[axis]).abs();
                d(b.lo[axis]).max(d(b.hi[axis]))
            }
            Base::MonotoneProduct { scale, exponents, .. } => {
                let p = exponents[axis];
                let (l, h) = (b.lo[axis], b.hi[axis]);
                let own = if p >= 1.0 {
                    p * h.powf(p - 1.0)
                } else if l > 0.0 {
                    p * l.powf(p - 1.0)
                } else {
                    f64::INFINITY
                };
                let others: f64 = (0..b.dim())
                    .filter(|&j| j != axis)
                    .map(|j| b.hi[j].powf(exponents[j]))
                    .product();
                scale.abs() * own * others
            }
            Base::Sinusoid {
                amplitude,
                frequency,
                axis: a,
                ..
            } => {
                if *a == axis {
                    amplitude.abs() * TAU * frequency
                } else {
                    0.0
                }
            }
            Base::PiecewiseConstant { .. } | Base::Table { .. } => 0.0,
        }
    }

    /// `integral of f over the whole space`.
    pub fn integral(&self) -> f64 {
        self.integral_over(&self.space.whole_cell())
            .expect("whole cell belongs to the space")
    }

    /// Integral of the base function over `cell`; spikes never contribute.
    pub fn integral_over(&self, cell: &Cell) -> Result<f64> {
        self.space
            .check_cell(cell, 0)
            .map_err(|e| Error::OutOfDomain(e.to_string()))?;
        let atoms = self.space.atoms();
        Ok(match (&self.base, cell) {
            (Base::Table { values }, Cell::Atoms(ids)) => {
                let atoms = atoms.expect("table lives on a finite space");
                crate::sum::compensated_sum(ids.iter().map(|&i| atoms[i].weight * values[i]))
            }
            (Base::PiecewiseConstant { partition, values }, cell) => crate::sum::compensated_sum(
                partition
                    .cells()
                    .iter()
                    .zip(values)
                    .map(|(c, v)| v * self.space.intersection_measure(c, cell)),
            ),
            (_, Cell::Box(b)) => self.box_integral(b),
            _ => return Err(Error::OutOfDomain("cell kind does not match the function".into())),
        })
    }

    fn box_integral(&self, b: &BoxCell) -> f64 {
        let vol = b.volume();
        match &self.base {
            Base::Affine { intercept, slopes } => {
                vol * (intercept + (0..b.dim()).map(|i| slopes[i] * 0.5 * (b.lo[i] + b.hi[i])).sum::<f64>())
            }
            Base::Quadratic {
                constant,
                linear,
                square,
            } => {
                let mean: f64 = (0..b.dim())
                    .map(|i| {
                        let (l, h) = (b.lo[i], b.hi[i]);
                        linear[i] * 0.5 * (l + h) + square[i] * (l * l + l * h + h * h) / 3.0
                    })
                    .sum();
                vol * (constant + mean)
            }
            Base::MonotoneProduct {
                offset,
                scale,
                exponents,
            } => {
                let prod: f64 = (0..b.dim())
                    .map(|i| {
                        let p = exponents[i];
                        (b.hi[i].powf(p + 1.0) - b.lo[i].powf(p + 1.0)) / (p + 1.0)
                    })
                    .product();
                offset * vol + scale * prod
            }
            Base::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
                axis,
            } => {
                let w = b.width(*axis);
                let rest = vol / w;
                let along = if *frequency == 0.0 {
                    w * (offset + amplitude * phase.sin())
                } else {
                    let k = TAU * frequency;
                    offset * w + amplitude * ((k * b.lo[*axis] + phase).cos() - (k * b.hi[*axis] + phase).cos()) / k
                };
                rest * along
            }
            Base::PiecewiseConstant { .. } | Base::Table { .. } => unreachable!(),
        }
    }

    /// `c * f`, spikes included.
    pub fn scaled(&self, c: f64) -> Self {
        let base = match &self.base {
            Base::Affine { intercept, slopes } => Base::Affine {
                intercept: c * intercept,
                slopes: slopes.iter().map(|s| c * s).collect(),
            },
            Base::Quadratic {
                constant,
                linear,
                square,
            } => Base::Quadratic {
                constant: c * constant,
                linear: linear.iter().map(|s| c * s).collect(),
                square: square.iter().map(|s| c * s).collect(),
            },
            Base::MonotoneProduct {
                offset,
                scale,
                exponents,
            } => Base::MonotoneProduct {
                offset: c * offset,
                scale: c * scale,
                exponents: exponents.clone(),
            },
            Base::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
                axis,
            } => Base::Sinusoid {
                offset: c * offset,
                amplitude: c * amplitude,
                frequency: *frequency,
                phase: *phase,
                axis: *axis,
            },
            Base::PiecewiseConstant { partition, values } => Base::PiecewiseConstant {
                partition: partition.clone(),
                values: values.iter().map(|v| c * v).collect(),
            },
            Base::Table { values } => Base::Table {
                values: values.iter().map(|v| c * v).collect(),
            },
        };
        FunctionModel {
            base,
            spikes: self
                .spikes
                .iter()
                .map(|s| Spike {
                    point: s.point.clone(),
                    value: c * s.value,
                })
                .collect(),
            ..self.clone()
        }
    }

    /// `f + c`, spikes included.
    pub fn shifted(&self, c: f64) -> Self {
        let mut base = self.base.clone();
        match &mut base {
            Base::Affine { intercept: o, .. }
            | Base::Quadratic { constant: o, .. }
            | Base::MonotoneProduct { offset: o, .. }
            | Base::Sinusoid { offset: o, .. } => *o += c,
            Base::PiecewiseConstant { values, .. } | Base::Table { values } => values.iter_mut().for_each(|v| *v += c),
        }
        FunctionModel {
            base,
            spikes: self
                .spikes
                .iter()
                .map(|s| Spike {
                    point: s.point.clone(),
                    value: s.value + c,
                })
                .collect(),
            ..self.clone()
        }
    }
}

fn grid_points_per_axis(resolution: usize, levels: u32) -> usize {
    (resolution - 1) * (1usize << levels) + 1
}

fn min_max<I: IntoIterator<Item = f64>>(values: I) -> (f64, f64) {
    values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn validate_base(space: &Space, base: &Base) -> Result<()> {
    let bad = |msg: &str| Err(Error::InvalidFunction(msg.to_string()));
    let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
    if base.is_closed_form() && space.is_finite() {
        return bad("closed-form families need a cube space");
    }
    let dim = space.dim();
    match base {
        Base::Affine { intercept, slopes } => {
            if slopes.len() != dim || !finite(slopes) || !intercept.is_finite() {
                return bad("affine needs one finite slope per axis");
            }
        }
        Base::Quadratic {
            constant,
            linear,
            square,
        } => {
            if linear.len() != dim || square.len() != dim || !finite(linear) || !finite(square) || !constant.is_finite()
            {
                return bad("quadratic needs finite linear and square coefficients per axis");
            }
        }
        Base::MonotoneProduct {
            offset,
            scale,
            exponents,
        } => {
            if exponents.len() != dim || exponents.iter().any(|p| !p.is_finite() || *p <= 0.0) {
                return bad("monotone product needs one positive exponent per axis");
            }
            if !offset.is_finite() || !scale.is_finite() {
                return bad("monotone product coefficients must be finite");
            }
        }
        Base::Sinusoid {
            offset,
            amplitude,
            frequency,
            phase,
            axis,
        } => {
            if *axis >= dim
                || frequency.is_nan()
                || *frequency < 0.0
                || !finite(&[*offset, *amplitude, *frequency, *phase])
            {
                return bad("sinusoid needs a valid axis, finite parameters and frequency >= 0");
            }
        }
        Base::PiecewiseConstant { partition, values } => {
            if partition.space() != space {
                return bad("piecewise-constant partition lives on a different space");
            }
            if values.len() != partition.len() || !finite(values) {
                return bad("piecewise-constant needs one finite value per cell");
            }
        }
        Base::Table { values } => {
            if !space.is_finite() {
                return bad("value tables need a finite space");
            }
            if values.len() != space.atom_count() || !finite(values) {
                return bad("value table needs one finite value per atom");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_spike(at: f64, value: f64) -> FunctionModel {
        FunctionModel::identity()
            .with_spikes(vec![Spike { point: vec![at], value }])
            .unwrap()
    }

    /// Dense-grid extrema, used as an independent check on the closed forms.
    fn dense_range(f: &FunctionModel, lo: f64, hi: f64) -> (f64, f64) {
        let n = 200_001;
        min_max((0..n).map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            f.evaluate_base(&Point::scalar(x)).unwrap()
        }))
    }

    #[test]
    fn evaluate_plain_and_spiked() {
        assert_eq!(FunctionModel::identity().evaluate(&Point::scalar(0.25)).unwrap(), 0.25);
        let f = x_spike(1.0 / 3.0, 1000.0);
        assert_eq!(f.evaluate(&Point::scalar(1.0 / 3.0)).unwrap(), 1000.0);
        assert_eq!(f.evaluate_base(&Point::scalar(1.0 / 3.0)).unwrap(), 1.0 / 3.0);
        assert!(matches!(f.evaluate(&Point::scalar(1.5)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn evaluate_table() {
        let s = Space::finite([("a", 0.5), ("b", 0.5)]).unwrap();
        let f = FunctionModel::table(s, vec![0.0, 1.0]).unwrap();
        assert_eq!(f.evaluate(&Point::Atom(1)).unwrap(), 1.0);
        assert!(f.evaluate(&Point::Atom(2)).is_err());
        assert!(f.evaluate(&Point::scalar(0.5)).is_err());
    }

    #[test]
    fn spikes_forbidden_on_finite_spaces() {
        let s = Space::finite([("a", 1.0)]).unwrap();
        let f = FunctionModel::table(s, vec![0.0]).unwrap();
        let err = f
            .with_spikes(vec![Spike {
                point: vec![0.0],
                value: 1.0,
            }])
            .unwrap_err();
        assert_eq!(err, Error::SpikesOnFiniteSpace);
    }

    #[test]
    fn affine_range() {
        let r = FunctionModel::identity()
            .essential_range(&Cell::interval(0.0, 0.25))
            .unwrap();
        assert_eq!((r.lo, r.hi, r.exact), (0.0, 0.25, true));
    }

    #[test]
    fn spike_does_not_move_range() {
        let s = Space::unit_interval();
        let f = FunctionModel::constant(s, 3.0)
            .unwrap()
            .with_spikes(vec![Spike {
                point: vec![0.5],
                value: 100.0,
            }])
            .unwrap();
        let r = f.essential_range(&Cell::interval(0.0, 1.0)).unwrap();
        assert_eq!((r.lo, r.hi, r.exact), (3.0, 3.0, true));
    }

    #[test]
    fn quadratic_range_matches_dense_grid() {
        let f = FunctionModel::quadratic(0.0, 0.0, 1.0);
        let r = f.essential_range(&Cell::interval(0.5, 1.0)).unwrap();
        assert_eq!((r.lo, r.hi), (0.25, 1.0));
        let (lo, hi) = dense_range(&f, 0.5, 1.0);
        assert!((lo - 0.25).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);

        // Interior vertex.
        let g = FunctionModel::quadratic(1.0, -3.0, 2.0);
        let r = g.essential_range(&Cell::interval(0.25, 1.0)).unwrap();
        let (lo, hi) = dense_range(&g, 0.25, 1.0);
        assert!((r.lo - lo).abs() < 1e-9 && (r.hi - hi).abs() < 1e-12);
        assert_eq!(r.lo, 1.0 - 9.0 / 8.0);
    }

    #[test]
    fn sinusoid_range_matches_dense_grid() {
        for (f, a, b) in [
            (FunctionModel::sinusoid(0.0, 1.0, 1.0, 0.0), 0.0, 0.5),
            (FunctionModel::sinusoid(0.0, 1.0, 1.0, 0.0), 0.125, 0.875),
            (FunctionModel::sinusoid(2.0, -0.5, 3.0, 0.3), 0.1, 0.9),
            (FunctionModel::sinusoid(0.0, 1.0, 0.5, 1.0), 0.2, 0.3),
            (FunctionModel::sinusoid(1.0, 1.0, 0.0, 0.7), 0.2, 0.3),
        ] {
            let r = f.essential_range(&Cell::interval(a, b)).unwrap();
            let (lo, hi) = dense_range(&f, a, b);
            assert!(r.lo <= lo + 1e-15 && r.hi >= hi - 1e-15, "{r:?} vs ({lo}, {hi})");
            assert!((r.lo - lo).abs() < 1e-9 && (r.hi - hi).abs() < 1e-9);
        }
    }

    #[test]
    fn monotone_product_range() {
        let s = Space::cube(2).unwrap();
        let f = FunctionModel::new(
            s,
            Base::MonotoneProduct {
                offset: 1.0,
                scale: -2.0,
                exponents: vec![1.0, 2.0],
            },
        )
        .unwrap();
        let r = f.essential_range(&Cell::boxed(vec![0.5, 0.5], vec![1.0, 1.0])).unwrap();
        assert_eq!((r.lo, r.hi), (-1.0, 1.0 - 2.0 * 0.125));
    }

    #[test]
    fn grid_mode_brackets_exact_range() {
        let exact = FunctionModel::sinusoid(0.0, 1.0, 1.0, 0.1);
        let grid = exact
            .clone()
            .with_range_mode(RangeMode::Grid {
                resolution: 9,
                levels: 2,
            })
            .unwrap();
        for (a, b) in [(0.0, 0.5), (0.1, 0.35), (0.5, 1.0)] {
            let cell = Cell::interval(a, b);
            let e = exact.essential_range(&cell).unwrap();
            let g = grid.essential_range(&cell).unwrap();
            assert!(!g.exact);
            assert!(g.hi <= e.hi + 1e-15 && g.hi >= e.hi - g.tolerance);
            assert!(g.lo >= e.lo - 1e-15 && g.lo <= e.lo + g.tolerance);
        }
    }

    #[test]
    fn grid_mode_rejects_bad_settings() {
        let f = FunctionModel::identity();
        assert!(f
            .clone()
            .with_range_mode(RangeMode::Grid {
                resolution: 1,
                levels: 0
            })
            .is_err());
        let f = FunctionModel::constant(Space::cube(3).unwrap(), 0.0).unwrap();
        assert!(f
            .with_range_mode(RangeMode::Grid {
                resolution: 1001,
                levels: 1
            })
            .is_err());
    }

    #[test]
    fn piecewise_constant_range_over_foreign_cell() {
        let p = Partition::dyadic(2).unwrap();
        let f = FunctionModel::piecewise_constant(p, vec![4.0, -1.0, 2.0, 7.0]).unwrap();
        let r = f.essential_range(&Cell::interval(0.25, 0.75)).unwrap();
        assert_eq!((r.lo, r.hi), (-1.0, 2.0));
        // Touching a cell boundary without overlap does not count.
        let r = f.essential_range(&Cell::interval(0.0, 0.25)).unwrap();
        assert_eq!((r.lo, r.hi), (4.0, 4.0));
        assert_eq!(f.integral(), 3.0);
    }

    #[test]
    fn finite_range_is_min_max_of_atoms() {
        let s = Space::finite([("a", 0.25), ("b", 0.25), ("c", 0.5)]).unwrap();
        let f = FunctionModel::table(s, vec![3.0, -2.0, 5.0]).unwrap();
        let r = f.essential_range(&Cell::atoms([0, 2])).unwrap();
        assert_eq!((r.lo, r.hi, r.exact), (3.0, 5.0, true));
        assert!(f.essential_range(&Cell::atoms([4])).is_err());
    }

    #[test]
    fn integrals() {
        let s = Space::finite([("a", 0.5), ("b", 0.5)]).unwrap();
        assert_eq!(FunctionModel::table(s, vec![0.0, 1.0]).unwrap().integral(), 0.5);
        assert_eq!(FunctionModel::identity().integral(), 0.5);
        assert_eq!(x_spike(1.0 / 3.0, 1000.0).integral(), 0.5);
        assert!((FunctionModel::quadratic(0.0, 0.0, 1.0).integral() - 1.0 / 3.0).abs() < 1e-15);
        assert!(FunctionModel::sinusoid(0.0, 1.0, 1.0, 0.0).integral().abs() < 1e-15);
    }

    #[test]
    fn scale_and_shift_transform_values() {
        let f = x_spike(0.5, 10.0);
        let g = f.scaled(-2.0).shifted(1.0);
        assert_eq!(g.evaluate(&Point::scalar(0.25)).unwrap(), 0.5);
        assert_eq!(g.evaluate(&Point::scalar(0.5)).unwrap(), -19.0);
        assert_eq!(g.integral(), 0.0);
    }

    #[test]
    fn invalid_functions() {
        let s = Space::unit_interval();
        assert!(FunctionModel::new(
            s.clone(),
            Base::Affine {
                intercept: 0.0,
                slopes: vec![1.0, 2.0]
            }
        )
        .is_err());
        assert!(FunctionModel::table(s.clone(), vec![1.0]).is_err());
        let fs = Space::finite([("a", 1.0)]).unwrap();
        assert!(FunctionModel::new(
            fs,
            Base::Affine {
                intercept: 0.0,
                slopes: vec![]
            }
        )
        .is_err());
        assert!(FunctionModel::new(
            s,
            Base::MonotoneProduct {
                offset: 0.0,
                scale: 1.0,
                exponents: vec![0.0]
            }
        )
        .is_err());
    }
}
