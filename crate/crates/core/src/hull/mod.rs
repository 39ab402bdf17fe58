//! Padded convex hulls for constraint groups.
//!
//! The pipeline is: pad each member's world-frame vertices with an axis
//! octahedron, optionally thin large inputs with a spatial-hash reduction, then
//! run the grid-aware quickhull. Group hulls enclose their child hulls by
//! inflating the children's vertices before hulling.

mod grid;
mod group;
mod mesh;
pub mod naive;
mod pad;
mod quickhull;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{centroid, Aabb, Vec3};
use crate::par::Exec;

pub use grid::{reduce, reduce_with, GridCell, HashGrid, Reduction};
pub use group::{default_nest_margin, group_hull, group_hulls, object_hull, visible_hulls};
pub use pad::pad_points;
pub use quickhull::{quickhull, quickhull_with};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HullError {
    #[error("empty input")]
    EmptyInput,
    #[error("cell size must be positive")]
    NonPositiveCell,
    #[error("padding must be non-negative")]
    NegativePadding,
    #[error("input is coplanar, collinear or coincident")]
    DegenerateInput,
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("hull topology broke down: {0}")]
    Topology(String),
}

/// Tuning for hull construction. Defaults: reduce only inputs above 4096
/// points, with a cell size of bbox-diagonal / 64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullOptions {
    pub cell_size: Option<f64>,
    pub nest_margin: Option<f64>,
    pub reduce_above: usize,
    pub exec: Exec,
}

impl Default for HullOptions {
    fn default() -> Self {
        Self {
            cell_size: None,
            nest_margin: None,
            reduce_above: 4096,
            exec: Exec::default(),
        }
    }
}

/// Default reduction cell size: bounding-box diagonal / 64.
pub fn default_cell_size(points: &[Vec3]) -> f64 {
    Aabb::from_points(points)
        .map(|b| b.diagonal() / 64.0)
        .filter(|s| *s > 0.0)
        .unwrap_or(1.0)
}

/// Hull of `points`, reducing first when the input is larger than
/// `opts.reduce_above`.
pub fn convex_hull(points: &[Vec3], opts: &HullOptions) -> Result<Hull, HullError> {
    if points.len() > opts.reduce_above {
        let cell = opts.cell_size.unwrap_or_else(|| default_cell_size(points));
        let red = reduce_with(points, cell, opts.exec)?;
        let mut hull = quickhull_with(&red.points, opts.exec)?;
        hull.source = hull.source.iter().map(|&i| red.source[i]).collect();
        Ok(hull)
    } else {
        quickhull_with(points, opts.exec)
    }
}

/// Convex polytope with outward-oriented triangular faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "HullRepr", into = "HullRepr")]
pub struct Hull {
    pub owner: String,
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    /// Outward unit normal and plane offset per face (`n·x = d` on the face).
    pub planes: Vec<(Vec3, f64)>,
    /// Index of each vertex in the point array the hull was built from.
    pub source: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct HullRepr {
    owner: String,
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
}

impl From<Hull> for HullRepr {
    fn from(h: Hull) -> Self {
        HullRepr {
            owner: h.owner,
            vertices: h.vertices.iter().map(|v| [v.x, v.y, v.z]).collect(),
            faces: h.faces,
        }
    }
}

impl From<HullRepr> for Hull {
    fn from(r: HullRepr) -> Self {
        let vertices: Vec<Vec3> = r.vertices.into_iter().map(Vec3::from).collect();
        let source = (0..vertices.len()).collect();
        Hull::from_parts(r.owner, vertices, r.faces, source)
    }
}

impl Hull {
    pub(crate) fn from_parts(owner: String, vertices: Vec<Vec3>, faces: Vec<[usize; 3]>, source: Vec<usize>) -> Hull {
        let planes = faces
            .iter()
            .map(|f| {
                let (a, b, c) = (vertices[f[0]], vertices[f[1]], vertices[f[2]]);
                let n = (b - a).cross(&(c - a));
                let n = if n.norm() > 0.0 { n.normalize() } else { n };
                (n, n.dot(&a))
            })
            .collect();
        Hull {
            owner,
            vertices,
            faces,
            planes,
            source,
        }
    }

    pub fn with_owner(mut self, owner: impl Into<String>) -> Hull {
        self.owner = owner.into();
        self
    }

    pub fn centroid(&self) -> Vec3 {
        centroid(&self.vertices)
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(&self.vertices).expect("hull has vertices")
    }

    /// Largest vertex distance from the centroid.
    pub fn radius(&self) -> f64 {
        let c = self.centroid();
        self.vertices.iter().map(|v| (v - c).norm()).fold(0.0, f64::max)
    }

    fn tolerance(&self) -> f64 {
        1e-9 * (1.0 + self.radius() + self.centroid().norm())
    }

    /// Largest signed distance of `p` above any face plane.
    pub fn max_plane_distance(&self, p: &Vec3) -> f64 {
        self.planes
            .iter()
            .map(|(n, d)| n.dot(p) - d)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Closed containment: on or behind every face plane.
    pub fn contains(&self, p: &Vec3) -> bool {
        self.max_plane_distance(p) <= self.tolerance()
    }

    /// Farthest vertex in direction `dir`, lowest index on ties.
    pub fn support(&self, dir: &Vec3) -> Vec3 {
        let mut best = 0;
        let mut best_d = f64::NEG_INFINITY;
        for (i, v) in self.vertices.iter().enumerate() {
            let d = v.dot(dir);
            if d > best_d {
                best_d = d;
                best = i;
            }
        }
        self.vertices[best]
    }

    pub fn translated(&self, t: &Vec3) -> Hull {
        Hull {
            owner: self.owner.clone(),
            vertices: self.vertices.iter().map(|v| v + t).collect(),
            faces: self.faces.clone(),
            planes: self.planes.iter().map(|(n, d)| (*n, d + n.dot(t))).collect(),
            source: self.source.clone(),
        }
    }

    pub fn transformed(&self, pose: &crate::geometry::Pose) -> Hull {
        Hull {
            owner: self.owner.clone(),
            vertices: self.vertices.iter().map(|v| pose.transform_point(v)).collect(),
            faces: self.faces.clone(),
            planes: self
                .planes
                .iter()
                .map(|(n, d)| {
                    let n2 = pose.transform_vector(n);
                    (n2, d + n2.dot(&pose.translation))
                })
                .collect(),
            source: self.source.clone(),
        }
    }

    /// Unique undirected edges as vertex-index pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| (0..3).map(move |i| (f[i].min(f[(i + 1) % 3]), f[i].max(f[(i + 1) % 3]))))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }
}
