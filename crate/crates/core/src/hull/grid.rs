//! Spatial-hash vertex reduction: one pass over the input keeps, per occupied
//! cell, the points extreme along ±x, ±y and ±z.

use std::collections::HashMap;

use super::HullError;
use crate::geometry::Vec3;
use crate::par::{map_slice, Exec};

/// Extreme-point slots, in the order +x, −x, +y, −y, +z, −z.
const AXES: [(usize, bool); 6] = [(0, true), (0, false), (1, true), (1, false), (2, true), (2, false)];

/// One occupied cell: its axis-extreme points and its members in input order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell<'a> {
    pub key: [i64; 3],
    pub extremes: [u32; 6],
    pub members: &'a [u32],
}

/// Occupied cells sorted by key, with member lists in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct HashGrid {
    pub cell_size: f64,
    keys: Vec<[i64; 3]>,
    extremes: Vec<[u32; 6]>,
    start: Vec<u32>,
    members: Vec<u32>,
    /// Number of input points read while building; equals the input length.
    pub points_visited: usize,
}

impl HashGrid {
    pub fn key(&self, p: &Vec3) -> [i64; 3] {
        cell_key(p, self.cell_size)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = GridCell<'_>> + '_ {
        (0..self.len()).map(|c| self.cell_at(c))
    }

    pub fn cell(&self, key: &[i64; 3]) -> Option<GridCell<'_>> {
        self.keys.binary_search(key).ok().map(|c| self.cell_at(c))
    }

    fn cell_at(&self, c: usize) -> GridCell<'_> {
        GridCell {
            key: self.keys[c],
            extremes: self.extremes[c],
            members: &self.members[self.start[c] as usize..self.start[c + 1] as usize],
        }
    }

    pub fn representative_count(&self) -> usize {
        self.extremes.iter().map(|e| dedup_extremes(e).len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub grid: HashGrid,
    /// Representative points, cells in key order.
    pub points: Vec<Vec3>,
    /// Input index of each representative.
    pub source: Vec<usize>,
}

fn cell_key(p: &Vec3, size: f64) -> [i64; 3] {
    [
        (p.x / size).floor() as i64,
        (p.y / size).floor() as i64,
        (p.z / size).floor() as i64,
    ]
}

fn dedup_extremes(e: &[u32; 6]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(6);
    for &i in e {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// True if `i` beats `j` for slot `(axis, positive)`; lower index wins ties.
#[inline]
fn beats(points: &[Vec3], i: u32, j: u32, axis: usize, positive: bool) -> bool {
    let (a, b) = (points[i as usize][axis], points[j as usize][axis]);
    if a == b {
        return i < j;
    }
    (a > b) == positive
}

/// Maps cell keys to dense ids in order of first appearance. Uses a flat
/// table over the key bounding box when it is small, a hash map otherwise.
pub(super) struct CellIndex {
    lo: [i64; 3],
    dims: [i64; 3],
    table: Vec<u32>,
    map: HashMap<[i64; 3], u32>,
    pub keys: Vec<[i64; 3]>,
}

impl CellIndex {
    pub fn new(keys: &[[i64; 3]]) -> CellIndex {
        let mut lo = [i64::MAX; 3];
        let mut hi = [i64::MIN; 3];
        for k in keys {
            for a in 0..3 {
                lo[a] = lo[a].min(k[a]);
                hi[a] = hi[a].max(k[a]);
            }
        }
        let dims = [0, 1, 2].map(|a| hi[a].saturating_sub(lo[a]).saturating_add(1));
        let volume = dims.iter().try_fold(1i64, |acc, &d| acc.checked_mul(d));
        let limit = (4 * keys.len() as i64).max(1 << 16);
        let table = match volume {
            Some(v) if v <= limit => vec![u32::MAX; v as usize],
            _ => Vec::new(),
        };
        CellIndex {
            lo,
            dims,
            table,
            map: HashMap::new(),
            keys: Vec::new(),
        }
    }

    #[inline]
    pub fn id(&mut self, key: [i64; 3]) -> u32 {
        let next = self.keys.len() as u32;
        let slot = if self.table.is_empty() {
            self.map.entry(key).or_insert(u32::MAX)
        } else {
            let r = [0, 1, 2].map(|a| key[a] - self.lo[a]);
            &mut self.table[((r[2] * self.dims[1] + r[1]) * self.dims[0] + r[0]) as usize]
        };
        if *slot == u32::MAX {
            *slot = next;
            self.keys.push(key);
        }
        *slot
    }
}

pub fn reduce(points: &[Vec3], cell_size: f64) -> Result<Reduction, HullError> {
    reduce_with(points, cell_size, Exec::default())
}

pub fn reduce_with(points: &[Vec3], cell_size: f64, exec: Exec) -> Result<Reduction, HullError> {
    if points.is_empty() {
        return Err(HullError::EmptyInput);
    }
    if !(cell_size > 0.0) || !cell_size.is_finite() {
        return Err(HullError::NonPositiveCell);
    }
    let keys = map_slice(exec, points, |p| cell_key(p, cell_size));
    let mut index = CellIndex::new(&keys);
    let mut extremes: Vec<[u32; 6]> = Vec::new();
    let mut cell_of = Vec::with_capacity(points.len());
    let mut visited = 0;
    for (i, key) in keys.iter().enumerate() {
        visited += 1;
        let idx = i as u32;
        let c = index.id(*key) as usize;
        if c == extremes.len() {
            extremes.push([idx; 6]);
        }
        let e = &mut extremes[c];
        for (slot, &(axis, pos)) in AXES.iter().enumerate() {
            if beats(points, idx, e[slot], axis, pos) {
                e[slot] = idx;
            }
        }
        cell_of.push(c as u32);
    }
    // Renumber cells in key order, then lay members out per cell.
    let n = extremes.len();
    let mut by_key: Vec<u32> = (0..n as u32).collect();
    by_key.sort_unstable_by_key(|&c| index.keys[c as usize]);
    let mut rank = vec![0u32; n];
    for (r, &c) in by_key.iter().enumerate() {
        rank[c as usize] = r as u32;
    }
    let mut start = vec![0u32; n + 1];
    for &c in &cell_of {
        start[rank[c as usize] as usize + 1] += 1;
    }
    for c in 0..n {
        start[c + 1] += start[c];
    }
    let mut fill = start.clone();
    let mut members = vec![0u32; points.len()];
    for (i, &c) in cell_of.iter().enumerate() {
        let r = rank[c as usize] as usize;
        members[fill[r] as usize] = i as u32;
        fill[r] += 1;
    }
    let grid = HashGrid {
        cell_size,
        keys: by_key.iter().map(|&c| index.keys[c as usize]).collect(),
        extremes: by_key.iter().map(|&c| extremes[c as usize]).collect(),
        start,
        members,
        points_visited: visited,
    };
    let source: Vec<usize> = grid
        .extremes
        .iter()
        .flat_map(|e| dedup_extremes(e).into_iter().map(|i| i as usize))
        .collect();
    Ok(Reduction {
        points: source.iter().map(|&i| points[i]).collect(),
        source,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_cell_keeps_at_most_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Vec3> = (0..1000)
            .map(|_| Vec3::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()) * 0.9)
            .collect();
        let r = reduce(&pts, 1.0).unwrap();
        assert_eq!(r.grid.len(), 1);
        assert!(r.points.len() <= 6);
        assert_eq!(r.grid.points_visited, 1000);
    }

    #[test]
    fn sparse_points_all_kept() {
        let pts: Vec<Vec3> = (0..50)
            .map(|i| Vec3::new(i as f64 * 2.0 + 0.5, (i % 7) as f64 * 2.0 + 0.5, 0.5))
            .collect();
        let r = reduce(&pts, 1.0).unwrap();
        let mut s = r.source.clone();
        s.sort_unstable();
        assert_eq!(s, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn errors() {
        assert_eq!(reduce(&[], 1.0).unwrap_err(), HullError::EmptyInput);
        assert_eq!(reduce(&[Vec3::zeros()], 0.0).unwrap_err(), HullError::NonPositiveCell);
        assert_eq!(reduce(&[Vec3::zeros()], -1.0).unwrap_err(), HullError::NonPositiveCell);
    }

    #[test]
    fn extremes_and_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<Vec3> = (0..200_000)
            .map(|_| Vec3::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let seq = reduce_with(&pts, 0.05, Exec::Sequential).unwrap();
        let par = reduce_with(&pts, 0.05, Exec::Parallel).unwrap();
        assert_eq!(seq, par);
        assert!(seq.points.len() <= 6 * seq.grid.len());
        assert_eq!(seq.grid.representative_count(), seq.points.len());
        let mut total = 0;
        for cell in seq.grid.cells() {
            total += cell.members.len();
            assert_eq!(seq.grid.cell(&cell.key), Some(cell));
            assert!(cell.members.windows(2).all(|w| w[0] < w[1]));
            for &m in cell.members {
                let p = pts[m as usize];
                for (slot, &(axis, pos)) in AXES.iter().enumerate() {
                    let e = pts[cell.extremes[slot] as usize][axis];
                    assert!(if pos { e >= p[axis] } else { e <= p[axis] });
                }
                assert_eq!(seq.grid.key(&p), cell.key);
            }
        }
        assert_eq!(total, pts.len());
    }
}
