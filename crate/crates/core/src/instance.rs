//! JSON instance descriptions.
//!
//! ```json
//! {
//!   "id": "square-halves",
//!   "space": { "kind": "cube", "dimension": 1 },
//!   "partition": { "cells": [ { "lo": [0.0], "hi": [0.5] }, { "lo": [0.5], "hi": [1.0] } ] },
//!   "function": { "family": "quadratic", "constant": 0, "linear": [0], "square": [1],
//!                 "spikes": [ { "point": [0.5], "value": -99 } ] },
//!   "range_mode": { "mode": "exact" },
//!   "n": 2,
//!   "placement": "cell-midpoint",
//!   "seed": 0
//! }
//! ```
//!
//! Finite spaces use `{"kind": "finite", "atoms": [{"label": "a", "weight": 0.5}, ...]}`
//! with cells `{"atoms": ["a", "b"]}`. The partition may also be given as
//! `{"dyadic": m}` (`2^m` equal intervals of `[0,1]`) or `{"grid": [k_1, ..., k_d]}`,
//! and defaults to the whole space. See the README for every field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Base, Cell, FunctionModel, Partition, Point, RangeMode, Space, Spike};
use crate::points::Placement;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
    pub function: FunctionSpec,
    #[serde(default)]
    pub range_mode: RangeModeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Finite { atoms: Vec<AtomSpec> },
    Cube { dimension: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub label: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PartitionSpec {
    Cells { cells: Vec<CellSpec> },
    Dyadic { dyadic: u32 },
    Grid { grid: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellSpec {
    Atoms { atoms: Vec<String> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    #[serde(flatten)]
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spikes: Vec<SpikeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Constant {
        value: f64,
    },
    Affine {
        #[serde(default)]
        intercept: f64,
        slopes: Vec<f64>,
    },
    Quadratic {
        #[serde(default)]
        constant: f64,
        linear: Vec<f64>,
        square: Vec<f64>,
    },
    MonotoneProduct {
        #[serde(default)]
        offset: f64,
        scale: f64,
        exponents: Vec<f64>,
    },
    Sinusoid {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        axis: usize,
    },
    PiecewiseConstant {
        values: Vec<f64>,
        /// Defaults to the instance partition.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partition: Option<PartitionSpec>,
    },
    Table {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeSpec {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RangeModeSpec {
    #[default]
    Exact,
    Grid {
        resolution: usize,
        levels: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Label(String),
    Coords(Vec<f64>),
}

/// A validated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub partition: Partition,
    pub function: FunctionModel,
    pub n: Option<usize>,
    pub placement: Placement,
    pub seed: u64,
    pub points: Option<Vec<Point>>,
}

impl Instance {
    pub fn space(&self) -> &Space {
        self.partition.space()
    }

    pub fn to_file(&self) -> InstanceFile {
        let mut file = describe(&self.id, &self.partition, &self.function, self.n);
        file.placement = Some(self.placement.name().to_string());
        file.seed = Some(self.seed);
        file.points = self.points.as_ref().map(|pts| {
            pts.iter()
                .map(|p| match p {
                    Point::Atom(i) => PointSpec::Label(self.space().atoms().expect("finite")[*i].label.clone()),
                    Point::Coords(x) => PointSpec::Coords(x.clone()),
                })
                .collect()
        });
        file
    }
}

/// Parses a single instance object or an array of them.
pub fn parse_instances(text: &str) -> Result<Vec<InstanceFile>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Instance(e.to_string()))?;
    let parse =
        |v: serde_json::Value| serde_json::from_value::<InstanceFile>(v).map_err(|e| Error::Instance(e.to_string()));
    match value {
        serde_json::Value::Array(items) => items.into_iter().map(parse).collect(),
        other => Ok(vec![parse(other)?]),
    }
}

pub fn load_instance(text: &str) -> Result<Instance> {
    let files = parse_instances(text)?;
    match files.as_slice() {
        [one] => one.build(),
        _ => Err(Error::Instance(format!("expected one instance, found {}", files.len()))),
    }
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Instance(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance files always serialize")
    }

    pub fn build(&self) -> Result<Instance> {
        let space = match &self.space {
            SpaceSpec::Finite { atoms } => Space::finite(atoms.iter().map(|a| (a.label.clone(), a.weight)))?,
            SpaceSpec::Cube { dimension } => Space::cube(*dimension)?,
        };
        let partition = match &self.partition {
            Some(spec) => build_partition(&space, spec)?,
            None => Partition::whole(space.clone()),
        };
        let base = match &self.function.family {
            FamilySpec::Constant { value } => FunctionModel::constant(space.clone(), *value)?.base().clone(),
            FamilySpec::Affine { intercept, slopes } => Base::Affine {
                intercept: *intercept,
                slopes: slopes.clone(),
            },
            FamilySpec::Quadratic {
                constant,
                linear,
                square,
            } => Base::Quadratic {
                constant: *constant,
                linear: linear.clone(),
                square: square.clone(),
            },
            FamilySpec::MonotoneProduct {
                offset,
                scale,
                exponents,
            } => Base::MonotoneProduct {
                offset: *offset,
                scale: *scale,
                exponents: exponents.clone(),
            },
            FamilySpec::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
                axis,
            } => Base::Sinusoid {
                offset: *offset,
                amplitude: *amplitude,
                frequency: *frequency,
                phase: *phase,
                axis: *axis,
            },
            FamilySpec::PiecewiseConstant { values, partition: p } => Base::PiecewiseConstant {
                partition: match p {
                    Some(spec) => build_partition(&space, spec)?,
                    None => partition.clone(),
                },
                values: values.clone(),
            },
            FamilySpec::Table { values } => Base::Table { values: values.clone() },
        };
        let spikes = self
            .function
            .spikes
            .iter()
            .map(|s| Spike {
                point: s.point.clone(),
                value: s.value,
            })
            .collect();
        let range_mode = match self.range_mode {
            RangeModeSpec::Exact => RangeMode::Exact,
            RangeModeSpec::Grid { resolution, levels } => RangeMode::Grid { resolution, levels },
        };
        let function = FunctionModel::new(space.clone(), base)?
            .with_spikes(spikes)?
            .with_range_mode(range_mode)?;
        let points = self
            .points
            .as_ref()
            .map(|pts| {
                pts.iter()
                    .map(|p| {
                        let point = match p {
                            PointSpec::Label(l) => Point::Atom(space.atom_index(l)?),
                            PointSpec::Coords(x) => Point::Coords(x.clone()),
                        };
                        space.check_point(&point)?;
                        Ok(point)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        Ok(Instance {
            id: self.id.clone().unwrap_or_else(|| "instance".to_string()),
            partition,
            function,
            n: self.n,
            placement: self
                .placement
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or_default(),
            seed: self.seed.unwrap_or(0),
            points,
        })
    }
}

fn build_partition(space: &Space, spec: &PartitionSpec) -> Result<Partition> {
    match spec {
        PartitionSpec::Dyadic { dyadic } => {
            if space.dim() != 1 || *dyadic > 24 {
                return Err(Error::Instance(
                    "dyadic partitions need the unit interval and m <= 24".into(),
                ));
            }
            Partition::grid(space.clone(), &[1usize << dyadic])
        }
        PartitionSpec::Grid { grid } => Partition::grid(space.clone(), grid),
        PartitionSpec::Cells { cells } => {
            let cells = cells
                .iter()
                .map(|c| match c {
                    CellSpec::Atoms { atoms } => Ok(Cell::atoms(
                        atoms.iter().map(|l| space.atom_index(l)).collect::<Result<Vec<_>>>()?,
                    )),
                    CellSpec::Box { lo, hi } => Ok(Cell::boxed(lo.clone(), hi.clone())),
                })
                .collect::<Result<Vec<_>>>()?;
            Partition::new(space.clone(), cells)
        }
    }
}

fn partition_spec(partition: &Partition) -> PartitionSpec {
    let space = partition.space();
    PartitionSpec::Cells {
        cells: partition
            .cells()
            .iter()
            .map(|c| match c {
                Cell::Atoms(ids) => CellSpec::Atoms {
                    atoms: ids
                        .iter()
                        .map(|&i| space.atoms().expect("finite")[i].label.clone())
                        .collect(),
                },
                Cell::Box(b) => CellSpec::Box {
                    lo: b.lo.clone(),
                    hi: b.hi.clone(),
                },
            })
            .collect(),
    }
}

/// Instance description of an in-memory instance, for replay.
pub fn describe(id: &str, partition: &Partition, function: &FunctionModel, n: Option<usize>) -> InstanceFile {
    let space = match partition.space() {
        Space::Finite { atoms } => SpaceSpec::Finite {
            atoms: atoms
                .iter()
                .map(|a| AtomSpec {
                    label: a.label.clone(),
                    weight: a.weight,
                })
                .collect(),
        },
        Space::Cube { dim } => SpaceSpec::Cube { dimension: *dim },
    };
    let family = match function.base() {
        Base::Affine { intercept, slopes } => FamilySpec::Affine {
            intercept: *intercept,
            slopes: slopes.clone(),
        },
        Base::Quadratic {
            constant,
            linear,
            square,
        } => FamilySpec::Quadratic {
            constant: *constant,
            linear: linear.clone(),
            square: square.clone(),
        },
        Base::MonotoneProduct {
            offset,
            scale,
            exponents,
        } => FamilySpec::MonotoneProduct {
            offset: *offset,
            scale: *scale,
            exponents: exponents.clone(),
        },
        Base::Sinusoid {
            offset,
            amplitude,
            frequency,
            phase,
            axis,
        } => FamilySpec::Sinusoid {
            offset: *offset,
            amplitude: *amplitude,
            frequency: *frequency,
            phase: *phase,
            axis: *axis,
        },
        Base::PiecewiseConstant { partition: p, values } => FamilySpec::PiecewiseConstant {
            values: values.clone(),
            partition: (p != partition).then(|| partition_spec(p)),
        },
        Base::Table { values } => FamilySpec::Table { values: values.clone() },
    };
    InstanceFile {
        id: Some(id.to_string()),
        space,
        partition: Some(partition_spec(partition)),
        function: FunctionSpec {
            family,
            spikes: function
                .spikes()
                .iter()
                .map(|s| SpikeSpec {
                    point: s.point.clone(),
                    value: s.value,
                })
                .collect(),
        },
        range_mode: match function.range_mode() {
            RangeMode::Exact => RangeModeSpec::Exact,
            RangeMode::Grid { resolution, levels } => RangeModeSpec::Grid { resolution, levels },
        },
        n,
        placement: None,
        seed: None,
        points: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = r#"{
        "id": "square-halves",
        "space": { "kind": "cube", "dimension": 1 },
        "partition": { "cells": [ { "lo": [0.0], "hi": [0.5] }, { "lo": [0.5], "hi": [1.0] } ] },
        "function": { "family": "quadratic", "linear": [0], "square": [1],
                      "spikes": [ { "point": [0.5], "value": -99 } ] },
        "n": 2
    }"#;

    const FINITE: &str = r#"{
        "space": { "kind": "finite", "atoms": [
            {"label": "1", "weight": 0.25}, {"label": "2", "weight": 0.25},
            {"label": "3", "weight": 0.25}, {"label": "4", "weight": 0.25} ] },
        "partition": { "cells": [ {"atoms": ["1", "2"]}, {"atoms": ["3", "4"]} ] },
        "function": { "family": "table", "values": [0, 1, 2, 4] },
        "points": ["1", "3"]
    }"#;

    #[test]
    fn parses_cube_instance() {
        let inst = load_instance(SQUARE).unwrap();
        assert_eq!(inst.id, "square-halves");
        assert_eq!(inst.partition.len(), 2);
        assert_eq!(inst.function.spikes().len(), 1);
        assert_eq!(inst.n, Some(2));
        assert_eq!(inst.placement, Placement::CellMidpoint);
    }

    #[test]
    fn parses_finite_instance() {
        let inst = load_instance(FINITE).unwrap();
        assert_eq!(inst.points, Some(vec![Point::Atom(0), Point::Atom(2)]));
        assert_eq!(inst.function.integral(), 1.75);
    }

    #[test]
    fn description_round_trips() {
        for text in [SQUARE, FINITE] {
            let inst = load_instance(text).unwrap();
            let json = inst.to_file().to_json();
            let again = load_instance(&json).unwrap();
            assert_eq!(again, inst);
        }
    }

    #[test]
    fn dyadic_and_grid_partitions() {
        let text = r#"{"space": {"kind": "cube", "dimension": 1}, "partition": {"dyadic": 3},
                      "function": {"family": "sinusoid", "amplitude": 1, "frequency": 1}}"#;
        assert_eq!(load_instance(text).unwrap().partition.len(), 8);
        let text = r#"{"space": {"kind": "cube", "dimension": 2}, "partition": {"grid": [2, 2]},
                      "function": {"family": "constant", "value": 2}}"#;
        assert_eq!(load_instance(text).unwrap().partition.len(), 4);
    }

    #[test]
    fn arrays_of_instances() {
        let text = format!("[{SQUARE}, {FINITE}]");
        assert_eq!(parse_instances(&text).unwrap().len(), 2);
        assert!(load_instance(&text).is_err());
    }

    #[test]
    fn malformed_descriptions() {
        assert!(matches!(load_instance("{"), Err(Error::Instance(_))));
        let text = r#"{"space": {"kind": "finite", "atoms": [{"label": "a", "weight": 0.4}]},
                      "function": {"family": "table", "values": [1]}}"#;
        assert!(matches!(load_instance(text), Err(Error::WeightSum { .. })));
        let text = r#"{"space": {"kind": "cube", "dimension": 1},
                      "function": {"family": "cubic", "values": [1]}}"#;
        assert!(matches!(load_instance(text), Err(Error::Instance(_))));
    }
}
