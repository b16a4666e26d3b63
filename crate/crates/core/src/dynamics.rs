//! One step of the competition-accumulation map.
//!
//! Every occupied cell `k` is pushed to `k - grad T(k)`, where the gradient is
//! the central difference of the neighboring occupancies along each axis.
//! Groups landing in the same cell merge.

use crate::lattice::{wrap_axis, LatticeState};

/// Per-axis displacement of a group, in cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Displacement(pub Vec<i64>);

/// Central-difference gradient at the flat cell `k`.
pub fn gradient(state: &LatticeState, k: usize) -> Displacement {
    let shape = state.shape();
    let cell = shape.unflat(k);
    let components = (0..shape.rank())
        .map(|axis| {
            let mut fwd: Vec<i64> = cell.iter().map(|&c| c as i64).collect();
            let mut back = fwd.clone();
            fwd[axis] += 1;
            back[axis] -= 1;
            // wrap cannot fail: the index has the state's rank
            let hi = state.get(&shape.wrap(&fwd).unwrap());
            let lo = state.get(&shape.wrap(&back).unwrap());
            hi as i64 - lo as i64
        })
        .collect();
    Displacement(components)
}

/// Advance one time step with the central-difference gradient.
pub fn step(state: &LatticeState) -> LatticeState {
    let shape = state.shape().clone();
    let values = match *shape.dims() {
        [m] => step_line(state.values(), m),
        [m1, m2] => step_plane(state.values(), m1, m2),
        _ => unreachable!("TorusShape has rank 1 or 2"),
    };
    LatticeState::from_parts_unchecked(shape, values)
}

/// Advance one time step with an arbitrary gradient mapping.
///
/// `gradient` receives the current state and a flat cell index and returns the
/// displacement of that cell's group. Empty cells are skipped.
pub fn step_with<G>(state: &LatticeState, gradient: G) -> LatticeState
where
    G: Fn(&LatticeState, usize) -> Displacement,
{
    let shape = state.shape();
    let mut out = vec![0u64; state.values().len()];
    for (k, &v) in state.values().iter().enumerate() {
        if v == 0 {
            continue;
        }
        let Displacement(g) = gradient(state, k);
        assert_eq!(g.len(), shape.rank(), "gradient rank mismatch");
        let target: Vec<usize> = shape
            .unflat(k)
            .into_iter()
            .zip(g)
            .zip(shape.dims())
            .map(|((c, g), &d)| wrap_axis(c as i128 - g as i128, d))
            .collect();
        out[shape.flat(&target)] += v;
    }
    LatticeState::from_parts_unchecked(shape.clone(), out)
}

/// `(k - g) mod d` for `k < d`, without leaving 64-bit range.
#[inline]
fn back_by(k: usize, g: i64, d: usize) -> usize {
    let g = g.rem_euclid(d as i64) as usize;
    if k >= g {
        k - g
    } else {
        k + d - g
    }
}

fn step_line(v: &[u64], m: usize) -> Vec<u64> {
    let mut out = vec![0u64; m];
    for (k, &t) in v.iter().enumerate() {
        if t == 0 {
            continue;
        }
        let right = v[if k + 1 == m { 0 } else { k + 1 }];
        let left = v[if k == 0 { m - 1 } else { k - 1 }];
        out[back_by(k, right as i64 - left as i64, m)] += t;
    }
    out
}

fn step_plane(v: &[u64], m1: usize, m2: usize) -> Vec<u64> {
    let mut out = vec![0u64; m1 * m2];
    for k1 in 0..m1 {
        let up = if k1 + 1 == m1 { 0 } else { k1 + 1 } * m2;
        let down = if k1 == 0 { m1 - 1 } else { k1 - 1 } * m2;
        let row = k1 * m2;
        for k2 in 0..m2 {
            let t = v[row + k2];
            if t == 0 {
                continue;
            }
            let right = if k2 + 1 == m2 { 0 } else { k2 + 1 };
            let left = if k2 == 0 { m2 - 1 } else { k2 - 1 };
            let g1 = v[up + k2] as i64 - v[down + k2] as i64;
            let g2 = v[row + right] as i64 - v[row + left] as i64;
            out[back_by(k1, g1, m1) * m2 + back_by(k2, g2, m2)] += t;
        }
    }
    out
}

/// Reference step: for every target `m` sum every source `k` whose displaced
/// position equals `m`. Quadratic in the number of cells.
pub fn step_oracle(state: &LatticeState) -> LatticeState {
    let shape = state.shape();
    let n = shape.total_cells();
    let mut out = Vec::with_capacity(n);
    for m in 0..n {
        let target = shape.unflat(m);
        let mut acc = 0u64;
        for k in 0..n {
            let Displacement(g) = gradient(state, k);
            let moved: Vec<i64> = shape
                .unflat(k)
                .iter()
                .zip(&g)
                .map(|(&c, &g)| c as i64 - g)
                .collect();
            if shape.wrap(&moved).unwrap() == target {
                acc += state.values()[k];
            }
        }
        out.push(acc);
    }
    LatticeState::new(shape.clone(), out).expect("oracle step conserves mass")
}
