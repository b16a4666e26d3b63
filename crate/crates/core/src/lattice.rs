//! Integer occupancy states on 1D and 2D discrete tori.
//!
//! Cells are addressed either by a multi-index or by a flat row-major offset.
//! In 2D the multi-index is `(k1, k2)` and `k2` varies fastest.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size of each axis of a 1D or 2D torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TorusShape {
    dims: Vec<usize>,
}

impl TorusShape {
    pub const MIN_DIM: usize = 3;

    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.len() > 2 {
            return Err(Error::Rank(dims.len()));
        }
        if let Some((index, &size)) = dims.iter().enumerate().find(|(_, &d)| d < Self::MIN_DIM) {
            return Err(Error::DimTooSmall { index, size });
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&t| i64::try_from(t).is_ok())
            .ok_or_else(|| Error::TooManyCells(dims.clone()))?;
        debug_assert!(total > 0);
        Ok(Self { dims })
    }

    pub fn line(m: usize) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn plane(m1: usize, m2: usize) -> Result<Self> {
        Self::new(vec![m1, m2])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn total_cells(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    fn check_rank(&self, got: usize) -> Result<()> {
        if got != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got,
            });
        }
        Ok(())
    }

    /// Reduce a signed multi-index onto the torus, componentwise mod `dims`.
    pub fn wrap(&self, idx: &[i64]) -> Result<Vec<usize>> {
        self.check_rank(idx.len())?;
        Ok(idx
            .iter()
            .zip(&self.dims)
            .map(|(&i, &d)| wrap_axis(i as i128, d))
            .collect())
    }

    /// Row-major flat offset of an in-range multi-index.
    pub fn flat(&self, cell: &[usize]) -> usize {
        debug_assert_eq!(cell.len(), self.rank());
        cell.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&c, &d)| acc * d + c)
    }

    /// Multi-index of a flat offset.
    pub fn unflat(&self, mut offset: usize) -> Vec<usize> {
        let mut cell = vec![0; self.rank()];
        for (slot, &d) in cell.iter_mut().zip(&self.dims).rev() {
            *slot = offset % d;
            offset /= d;
        }
        cell
    }
}

impl TryFrom<Vec<usize>> for TorusShape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<TorusShape> for Vec<usize> {
    fn from(shape: TorusShape) -> Self {
        shape.dims
    }
}

#[inline]
pub(crate) fn wrap_axis(i: i128, d: usize) -> usize {
    i.rem_euclid(d as i128) as usize
}

/// Occupancy of every cell of a torus at one time step.
///
/// Construction guarantees the total mass fits in an `i64`. Since the dynamics
/// conserve mass, no cell value and no neighbor difference can overflow later.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct LatticeState {
    shape: TorusShape,
    values: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRepr {
    dims: Vec<usize>,
    values: Vec<u64>,
}

impl TryFrom<StateRepr> for LatticeState {
    type Error = Error;

    fn try_from(repr: StateRepr) -> Result<Self> {
        LatticeState::new(TorusShape::new(repr.dims)?, repr.values)
    }
}

impl From<LatticeState> for StateRepr {
    fn from(state: LatticeState) -> Self {
        StateRepr {
            dims: state.shape.dims,
            values: state.values,
        }
    }
}

impl LatticeState {
    pub fn new(shape: TorusShape, values: Vec<u64>) -> Result<Self> {
        if values.len() != shape.total_cells() {
            return Err(Error::ValueCount {
                dims: shape.dims.clone(),
                expected: shape.total_cells(),
                got: values.len(),
            });
        }
        checked_mass(&values)?;
        Ok(Self { shape, values })
    }

    pub fn empty(shape: TorusShape) -> Self {
        let values = vec![0; shape.total_cells()];
        Self { shape, values }
    }

    /// Build from values produced by a mass-conserving map of a valid state.
    pub(crate) fn from_parts_unchecked(shape: TorusShape, values: Vec<u64>) -> Self {
        debug_assert_eq!(values.len(), shape.total_cells());
        Self { shape, values }
    }

    pub fn shape(&self) -> &TorusShape {
        &self.shape
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u64> {
        self.values
    }

    pub fn get(&self, cell: &[usize]) -> u64 {
        self.values[self.shape.flat(cell)]
    }

    pub fn total_mass(&self) -> u64 {
        // bounded by i64::MAX at construction
        self.values.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Cyclic translation: the value at `m` moves to `m + offset`.
    pub fn shift(&self, offset: &[i64]) -> Result<Self> {
        self.shape.check_rank(offset.len())?;
        Ok(self.remap(|cell| {
            cell.iter()
                .zip(offset)
                .map(|(&c, &o)| c as i128 + o as i128)
                .collect()
        }))
    }

    /// Point reflection: the value at `m` moves to `-m`.
    pub fn reflect(&self) -> Self {
        self.remap(|cell| cell.iter().map(|&c| -(c as i128)).collect())
    }

    fn remap(&self, dest: impl Fn(&[usize]) -> Vec<i128>) -> Self {
        let mut values = vec![0; self.values.len()];
        for (offset, &v) in self.values.iter().enumerate() {
            let cell = self.shape.unflat(offset);
            let target: Vec<usize> = dest(&cell)
                .into_iter()
                .zip(&self.shape.dims)
                .map(|(i, &d)| wrap_axis(i, d))
                .collect();
            values[self.shape.flat(&target)] = v;
        }
        Self::from_parts_unchecked(self.shape.clone(), values)
    }
}

fn checked_mass(values: &[u64]) -> Result<u64> {
    values
        .iter()
        .try_fold(0u64, |acc, &v| acc.checked_add(v))
        .filter(|&m| m <= i64::MAX as u64)
        .ok_or(Error::MassOverflow)
}

impl fmt::Debug for LatticeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeState{:?}{:?}", self.shape.dims, self.values)
    }
}
