//! Classic single-threaded quickhull with per-face point conflict lists.
//!
//! This is the baseline the grid-aware variant is benchmarked against.

use super::mesh::HullMesh;
use super::{Hull, HullError};
use crate::geometry::Vec3;

pub fn quickhull_naive(points: &[Vec3]) -> Result<Hull, HullError> {
    let mut mesh = HullMesh::init(points)?;
    let mut outside: Vec<Vec<u32>> = vec![Vec::new(); mesh.faces.len()];
    for i in 0..points.len() as u32 {
        for f in 0..4u32 {
            if mesh.dist(f, &points[i as usize]) > mesh.eps {
                outside[f as usize].push(i);
                break;
            }
        }
    }
    let mut stack: Vec<u32> = (0..4).rev().collect();
    while let Some(f) = stack.pop() {
        if !mesh.faces[f as usize].alive || outside[f as usize].is_empty() {
            continue;
        }
        let mut apex = outside[f as usize][0];
        let mut best = f64::NEG_INFINITY;
        for &i in &outside[f as usize] {
            let d = mesh.dist(f, &points[i as usize]);
            if d > best || (d == best && i < apex) {
                best = d;
                apex = i;
            }
        }
        let vis = mesh.visible_set(f, apex);
        let orphans: Vec<u32> = vis
            .faces
            .iter()
            .flat_map(|&v| std::mem::take(&mut outside[v as usize]))
            .filter(|&i| i != apex)
            .collect();
        let new = mesh.expand(&vis, apex)?;
        outside.resize(mesh.faces.len(), Vec::new());
        for i in orphans {
            for nf in new.clone() {
                if mesh.dist(nf, &points[i as usize]) > mesh.eps {
                    outside[nf as usize].push(i);
                    break;
                }
            }
        }
        stack.extend(new.rev());
    }
    Ok(mesh.into_hull())
}
