//! Grid-aware quickhull with round-based parallel face expansion.
//!
//! Points are bucketed into a uniform hash grid. Instead of per-point conflict
//! lists every face keeps a list of candidate *cells* that hold at least one
//! point above its plane. The apex of a face is the farthest point above it
//! among those cells; a cell is skipped when the bound of its tight box cannot
//! beat the best distance found so far.
//!
//! Each round computes apexes and visible regions for pending faces in
//! parallel, then accepts, in face-id order, every expansion whose visible
//! region is disjoint from the regions (and their one-ring) of expansions
//! already accepted that round. Such expansions cannot see each other's new
//! faces, so applying them one after another equals applying them at once.
//! Candidate cells of the new faces are then filtered in parallel. All
//! choices are made in a fixed order with lowest-index tie breaks, so the
//! output does not depend on the thread count.

use std::collections::HashSet;

use super::grid::CellIndex;

use super::mesh::{HullMesh, Visible};
use super::{Hull, HullError};
use crate::geometry::{Aabb, Vec3};
use crate::par::{map_slice, Exec};

/// Upper limit on faces examined per round.
const ROUND_CANDIDATES: usize = 256;

pub fn quickhull(points: &[Vec3]) -> Result<Hull, HullError> {
    quickhull_with(points, Exec::default())
}

pub fn quickhull_with(points: &[Vec3], exec: Exec) -> Result<Hull, HullError> {
    let mut mesh = HullMesh::init(points)?;
    let grid = CellGrid::build(points);
    let all: Vec<u32> = (0..grid.len() as u32).collect();
    let mut cells: Vec<Vec<u32>> = map_slice(exec, &[0u32, 1, 2, 3], |&f| grid.filter(&mesh, f, &all));
    let mut apex: Vec<Option<Option<u32>>> = vec![None; 4];
    let mut active: Vec<u32> = (0..4).filter(|&f| !cells[f as usize].is_empty()).collect();

    while !active.is_empty() {
        let batch: Vec<u32> = active.iter().copied().take(ROUND_CANDIDATES).collect();
        let missing: Vec<u32> = batch.iter().copied().filter(|&f| apex[f as usize].is_none()).collect();
        let found = map_slice(exec, &missing, |&f| grid.apex(&mesh, f, &cells[f as usize]));
        for (f, a) in missing.iter().zip(found) {
            apex[*f as usize] = Some(a);
            if a.is_none() {
                cells[*f as usize] = Vec::new();
            }
        }
        let candidates: Vec<(u32, u32)> = batch
            .iter()
            .filter_map(|&f| apex[f as usize].flatten().map(|a| (f, a)))
            .collect();
        let visible: Vec<Visible> = map_slice(exec, &candidates, |&(f, a)| mesh.visible_set(f, a));

        let mut claimed: HashSet<u32> = HashSet::new();
        let mut jobs: Vec<(std::ops::Range<u32>, Vec<u32>)> = Vec::new();
        for (k, vis) in visible.iter().enumerate() {
            if vis.faces.iter().any(|f| claimed.contains(f)) {
                continue;
            }
            for &f in &vis.faces {
                claimed.insert(f);
                claimed.extend(mesh.faces[f as usize].nbr);
            }
            let mut pool: Vec<u32> = vis
                .faces
                .iter()
                .flat_map(|&f| std::mem::take(&mut cells[f as usize]))
                .collect();
            pool.sort_unstable();
            pool.dedup();
            let new = mesh.expand(vis, candidates[k].1)?;
            jobs.push((new, pool));
        }
        cells.resize(mesh.faces.len(), Vec::new());
        apex.resize(mesh.faces.len(), None);

        let tasks: Vec<(u32, usize)> = jobs
            .iter()
            .enumerate()
            .flat_map(|(j, (range, _))| range.clone().map(move |f| (f, j)))
            .collect();
        let filtered = map_slice(exec, &tasks, |&(f, j)| grid.filter(&mesh, f, &jobs[j].1));
        for ((f, _), list) in tasks.iter().zip(filtered) {
            cells[*f as usize] = list;
        }
        active.retain(|&f| mesh.faces[f as usize].alive && !cells[f as usize].is_empty());
        active.extend(tasks.iter().map(|t| t.0).filter(|&f| !cells[f as usize].is_empty()));
    }
    Ok(mesh.into_hull())
}

/// Points bucketed by cell in CSR layout, with a tight box per cell.
struct CellGrid {
    order: Vec<u32>,
    start: Vec<u32>,
    center: Vec<Vec3>,
    half: Vec<Vec3>,
}

impl CellGrid {
    fn build(points: &[Vec3]) -> CellGrid {
        let bb = Aabb::from_points(points).expect("non-empty");
        let per_axis = (points.len() as f64 / 8.0).cbrt().max(1.0);
        let size = (bb.extent().max() / per_axis).max(f64::MIN_POSITIVE);
        let keys: Vec<[i64; 3]> = points
            .iter()
            .map(|p| {
                let r = (p - bb.min) / size;
                [r.x.floor() as i64, r.y.floor() as i64, r.z.floor() as i64]
            })
            .collect();
        let mut ids = CellIndex::new(&keys);
        let cell_of: Vec<u32> = keys.iter().map(|k| ids.id(*k)).collect();
        let n = ids.keys.len();
        let mut start = vec![0u32; n + 1];
        for &c in &cell_of {
            start[c as usize + 1] += 1;
        }
        for c in 0..n {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut order = vec![0u32; points.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            order[fill[c as usize] as usize] = i as u32;
            fill[c as usize] += 1;
        }
        let mut center = Vec::with_capacity(n);
        let mut half = Vec::with_capacity(n);
        for c in 0..n {
            let members = &order[start[c] as usize..start[c + 1] as usize];
            let b = Aabb::from_points(members.iter().map(|&i| &points[i as usize])).expect("occupied");
            center.push(b.center());
            half.push(b.extent() / 2.0);
        }
        CellGrid {
            order,
            start,
            center,
            half,
        }
    }

    fn len(&self) -> usize {
        self.center.len()
    }

    fn members(&self, c: u32) -> &[u32] {
        &self.order[self.start[c as usize] as usize..self.start[c as usize + 1] as usize]
    }

    /// Upper bound of the signed distance above face `f` over cell `c`.
    #[inline]
    fn bound(&self, mesh: &HullMesh, f: u32, c: u32) -> f64 {
        let face = &mesh.faces[f as usize];
        let n = face.normal;
        let h = self.half[c as usize];
        n.dot(&self.center[c as usize]) - face.offset + n.x.abs() * h.x + n.y.abs() * h.y + n.z.abs() * h.z
    }

    /// Cells from `pool` that hold a point strictly above face `f`.
    fn filter(&self, mesh: &HullMesh, f: u32, pool: &[u32]) -> Vec<u32> {
        pool.iter()
            .copied()
            .filter(|&c| {
                self.bound(mesh, f, c) > 0.0
                    && self
                        .members(c)
                        .iter()
                        .any(|&i| mesh.dist(f, &mesh.pts[i as usize]) > mesh.eps)
            })
            .collect()
    }

    /// Farthest point above face `f` among `cells`, lowest index on ties.
    fn apex(&self, mesh: &HullMesh, f: u32, cells: &[u32]) -> Option<u32> {
        let mut best: Option<(f64, u32)> = None;
        for &c in cells {
            if let Some((bd, _)) = best {
                if self.bound(mesh, f, c) < bd {
                    continue;
                }
            }
            for &i in self.members(c) {
                let d = mesh.dist(f, &mesh.pts[i as usize]);
                if d <= mesh.eps {
                    continue;
                }
                match best {
                    Some((bd, bi)) if d < bd || (d == bd && i > bi) => {}
                    _ => best = Some((d, i)),
                }
            }
        }
        best.map(|(_, i)| i)
    }
}
