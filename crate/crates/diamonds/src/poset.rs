//! Diamond task-precedence posets and their labellings.
//!
//! A diamond is a poset with a unique minimum (the bottom), a unique
//! maximum (the top), and `v - 2` pairwise-incomparable middle vertices.
//! A system is a row of `d` such diamonds, optionally followed by one
//! incomplete diamond (a bottom plus some middles, no top). Labels
//! `1..=N` are assigned so that within each diamond the bottom is
//! smallest and the top largest.
//!
//! Reading the labels diamond by diamond (bottom, middles left to
//! right, then top) yields the associated permutation. The middles are
//! an ordered list even though the poset leaves them incomparable: two
//! labellings differing only in middle order read to different
//! permutations, so the order is part of the object.

use crate::patterns::Permutation;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("diamonds need at least 3 vertices, got v = {0}")]
    VertexCountTooSmall(u32),
    #[error("partial size j = {j} must satisfy 1 <= j <= v - 1 = {max}")]
    PartialSizeOutOfRange { j: u32, max: u32 },
    #[error("a shape must have at least one vertex")]
    Empty,
}

/// Which configuration is being studied: `d` full diamonds with `v`
/// vertices each, plus an optional trailing partial diamond with `j`
/// vertices (`1 <= j <= v - 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SystemShape {
    v: u32,
    d: u32,
    j: Option<u32>,
}

impl SystemShape {
    pub fn new(v: u32, d: u32, j: Option<u32>) -> Result<Self, ShapeError> {
        if v < 3 {
            return Err(ShapeError::VertexCountTooSmall(v));
        }
        if let Some(j) = j {
            if j == 0 || j > v - 1 {
                return Err(ShapeError::PartialSizeOutOfRange { j, max: v - 1 });
            }
        }
        if d == 0 && j.is_none() {
            return Err(ShapeError::Empty);
        }
        Ok(SystemShape { v, d, j })
    }

    /// `d` full diamonds, no partial.
    pub fn full(v: u32, d: u32) -> Result<Self, ShapeError> {
        Self::new(v, d, None)
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    /// Number of full diamonds.
    pub fn full_count(&self) -> u32 {
        self.d
    }

    pub fn partial_size(&self) -> Option<u32> {
        self.j
    }

    /// Total number of vertices, `N = v*d + j`.
    pub fn vertex_count(&self) -> u32 {
        self.v * self.d + self.j.unwrap_or(0)
    }
}

impl fmt::Display for SystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.j {
            Some(j) => write!(f, "(v={}, d={}, j={})", self.v, self.d, j),
            None => write!(f, "(v={}, d={})", self.v, self.d),
        }
    }
}

/// One fully labelled diamond: bottom, middles in reading order, top.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diamond {
    pub bottom: u32,
    pub middles: Vec<u32>,
    pub top: u32,
}

/// A labelled partial diamond: a bottom and `j - 1` middles, no top.
/// For `j = 1` there are no order relations at all.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialDiamond {
    pub bottom: u32,
    pub middles: Vec<u32>,
}

/// What `validate` reports: the first constraint a labelling breaks.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("label {0} appears more than once")]
    DuplicateLabel(u32),
    #[error("label {label} lies outside 1..={max}")]
    LabelOutOfRange { label: u32, max: u32 },
    #[error("diamond {diamond}: bottom is not the minimum")]
    BottomNotMin { diamond: usize },
    #[error("diamond {diamond}: top is not the maximum")]
    TopNotMax { diamond: usize },
    #[error("labelling does not fit the shape: {0}")]
    Structure(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PosetError {
    #[error("expected {expected} labels, got {got}")]
    LengthMismatch { expected: u32, got: u32 },
    #[error(transparent)]
    PosetViolation(#[from] Violation),
    #[error("operation unsupported for this shape: {0}")]
    ShapeUnsupported(&'static str),
}

/// A valid labelling of a diamond system. Construction always validates,
/// so a value of this type satisfies every invariant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelledSystem {
    shape: SystemShape,
    diamonds: Vec<Diamond>,
    partial: Option<PartialDiamond>,
}

impl LabelledSystem {
    pub fn new(
        shape: SystemShape,
        diamonds: Vec<Diamond>,
        partial: Option<PartialDiamond>,
    ) -> Result<Self, Violation> {
        let system = LabelledSystem {
            shape,
            diamonds,
            partial,
        };
        system.validate()?;
        Ok(system)
    }

    pub fn shape(&self) -> SystemShape {
        self.shape
    }

    pub fn diamonds(&self) -> &[Diamond] {
        &self.diamonds
    }

    pub fn partial(&self) -> Option<&PartialDiamond> {
        self.partial.as_ref()
    }

    /// Checks every invariant, reporting the first violation found:
    /// structural fit, label range, duplicates, then the per-diamond
    /// bottom-minimum / top-maximum order relations.
    pub fn validate(&self) -> Result<(), Violation> {
        let v = self.shape.v;
        let n = self.shape.vertex_count();
        if self.diamonds.len() as u32 != self.shape.d {
            return Err(Violation::Structure(format!(
                "expected {} full diamonds, got {}",
                self.shape.d,
                self.diamonds.len()
            )));
        }
        for (i, dia) in self.diamonds.iter().enumerate() {
            if dia.middles.len() as u32 != v - 2 {
                return Err(Violation::Structure(format!(
                    "diamond {i} has {} middles, expected {}",
                    dia.middles.len(),
                    v - 2
                )));
            }
        }
        match (&self.partial, self.shape.j) {
            (None, None) => {}
            (Some(p), Some(j)) => {
                if p.middles.len() as u32 != j - 1 {
                    return Err(Violation::Structure(format!(
                        "partial diamond has {} middles, expected {}",
                        p.middles.len(),
                        j - 1
                    )));
                }
            }
            (Some(_), None) => {
                return Err(Violation::Structure(
                    "shape has no partial diamond but one was supplied".into(),
                ))
            }
            (None, Some(_)) => {
                return Err(Violation::Structure(
                    "shape requires a partial diamond".into(),
                ))
            }
        }

        let mut seen = vec![false; n as usize + 1];
        for label in self.reading_labels() {
            if label == 0 || label > n {
                return Err(Violation::LabelOutOfRange { label, max: n });
            }
            if seen[label as usize] {
                return Err(Violation::DuplicateLabel(label));
            }
            seen[label as usize] = true;
        }

        for (i, dia) in self.diamonds.iter().enumerate() {
            if dia.middles.iter().any(|&m| m <= dia.bottom) || dia.top <= dia.bottom {
                return Err(Violation::BottomNotMin { diamond: i });
            }
            if dia.middles.iter().any(|&m| m >= dia.top) {
                return Err(Violation::TopNotMax { diamond: i });
            }
        }
        if let Some(p) = &self.partial {
            if p.middles.iter().any(|&m| m <= p.bottom) {
                return Err(Violation::BottomNotMin {
                    diamond: self.diamonds.len(),
                });
            }
        }
        Ok(())
    }

    fn reading_labels(&self) -> impl Iterator<Item = u32> + '_ {
        self.diamonds
            .iter()
            .flat_map(|d| {
                std::iter::once(d.bottom)
                    .chain(d.middles.iter().copied())
                    .chain(std::iter::once(d.top))
            })
            .chain(
                self.partial
                    .iter()
                    .flat_map(|p| std::iter::once(p.bottom).chain(p.middles.iter().copied())),
            )
    }

    /// The associated permutation: each diamond read bottom, middles
    /// left to right, top; the partial diamond (bottom then middles)
    /// read last.
    pub fn associated_permutation(&self) -> Permutation {
        let labels: Vec<u32> = self.reading_labels().collect();
        Permutation::new(labels).expect("a valid system reads to a permutation")
    }

    /// Inverse of the reading map: slices `perm` into per-diamond
    /// segments for `shape`.
    pub fn from_permutation(shape: SystemShape, perm: &Permutation) -> Result<Self, PosetError> {
        let n = shape.vertex_count();
        if perm.len() as u32 != n {
            return Err(PosetError::LengthMismatch {
                expected: n,
                got: perm.len() as u32,
            });
        }
        Self::from_reading_labels(shape, perm.values())
    }

    /// Builds a system from labels in reading order, validating them.
    pub fn from_reading_labels(shape: SystemShape, labels: &[u32]) -> Result<Self, PosetError> {
        let n = shape.vertex_count();
        if labels.len() as u32 != n {
            return Err(PosetError::LengthMismatch {
                expected: n,
                got: labels.len() as u32,
            });
        }
        let v = shape.v as usize;
        let mut diamonds = Vec::with_capacity(shape.d as usize);
        for chunk in labels[..v * shape.d as usize].chunks_exact(v) {
            diamonds.push(Diamond {
                bottom: chunk[0],
                middles: chunk[1..v - 1].to_vec(),
                top: chunk[v - 1],
            });
        }
        let partial = shape.j.map(|j| {
            let seg = &labels[v * shape.d as usize..];
            PartialDiamond {
                bottom: seg[0],
                middles: seg[1..j as usize].to_vec(),
            }
        });
        Ok(Self::new(shape, diamonds, partial)?)
    }

    /// Reverse-complements the system: diamond order is reversed and each
    /// diamond is flipped (top and bottom swap, middles reverse), with
    /// every label `l` replaced by `N + 1 - l`. The result reads to the
    /// reverse-complement of this system's permutation.
    ///
    /// Systems with a partial diamond are rejected: flipping an
    /// incomplete diamond does not produce a shape in the same family.
    pub fn reverse_complement(&self) -> Result<Self, PosetError> {
        if self.partial.is_some() {
            return Err(PosetError::ShapeUnsupported(
                "reverse-complement of a partial system",
            ));
        }
        let n = self.shape.vertex_count();
        let diamonds = self
            .diamonds
            .iter()
            .rev()
            .map(|d| Diamond {
                bottom: n + 1 - d.top,
                middles: d.middles.iter().rev().map(|&m| n + 1 - m).collect(),
                top: n + 1 - d.bottom,
            })
            .collect();
        Ok(LabelledSystem {
            shape: self.shape,
            diamonds,
            partial: None,
        })
    }

    /// Canonical JSON rendering, the wire format used by the CLI.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&SystemWire::from(self)).expect("serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, SystemJsonError> {
        let wire: SystemWire = serde_json::from_str(s)?;
        let d = wire.diamonds.len() as u32;
        let j = wire.partial.as_ref().map(|p| p.middles.len() as u32 + 1);
        let shape =
            SystemShape::new(wire.v, d, j).map_err(|e| SystemJsonError::Shape(e.to_string()))?;
        LabelledSystem::new(shape, wire.diamonds, wire.partial).map_err(SystemJsonError::Invalid)
    }
}

#[derive(Debug, Error)]
pub enum SystemJsonError {
    #[error("malformed system JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Invalid(Violation),
}

/// Field order is fixed: v, diamonds, partial.
#[derive(Serialize, Deserialize)]
struct SystemWire {
    v: u32,
    diamonds: Vec<Diamond>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    partial: Option<PartialDiamond>,
}

impl From<&LabelledSystem> for SystemWire {
    fn from(s: &LabelledSystem) -> Self {
        SystemWire {
            v: s.shape.v,
            diamonds: s.diamonds.clone(),
            partial: s.partial.clone(),
        }
    }
}
