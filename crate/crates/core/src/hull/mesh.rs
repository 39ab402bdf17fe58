//! Triangle-adjacency hull mesh shared by the quickhull variants.

use std::collections::HashMap;

use super::{Hull, HullError};
use crate::geometry::{scale_epsilon, Vec3};

pub(crate) const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) struct Face {
    /// Counter-clockwise seen from outside.
    pub v: [u32; 3],
    /// `nbr[i]` shares edge `v[i] -> v[(i + 1) % 3]`.
    pub nbr: [u32; 3],
    pub normal: Vec3,
    pub offset: f64,
    pub alive: bool,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Visible {
    pub faces: Vec<u32>,
    /// (a, b, outer face) with `a -> b` oriented as in the visible face.
    pub horizon: Vec<(u32, u32, u32)>,
}

pub(crate) struct HullMesh<'a> {
    pub pts: &'a [Vec3],
    pub eps: f64,
    pub faces: Vec<Face>,
}

impl<'a> HullMesh<'a> {
    /// Seeds the mesh with a tetrahedron of extreme points.
    pub fn init(pts: &'a [Vec3]) -> Result<Self, HullError> {
        if pts.is_empty() {
            return Err(HullError::EmptyInput);
        }
        if pts.len() < 4 {
            return Err(HullError::DegenerateInput);
        }
        if pts.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(HullError::DegenerateInput);
        }
        let eps = scale_epsilon(pts);
        let mut min = [0usize; 3];
        let mut max = [0usize; 3];
        for (i, p) in pts.iter().enumerate() {
            for k in 0..3 {
                if p[k] < pts[min[k]][k] {
                    min[k] = i;
                }
                if p[k] > pts[max[k]][k] {
                    max[k] = i;
                }
            }
        }
        let (mut a, mut b, mut span) = (0, 0, -1.0);
        for k in 0..3 {
            let d = (pts[max[k]] - pts[min[k]]).norm();
            if d > span {
                span = d;
                a = min[k];
                b = max[k];
            }
        }
        if span <= eps {
            return Err(HullError::DegenerateInput);
        }
        let ab = (pts[b] - pts[a]).normalize();
        let c = argmax(pts, |p| ab.cross(&(p - pts[a])).norm());
        let n = ab.cross(&(pts[c] - pts[a]));
        if n.norm() <= eps {
            return Err(HullError::DegenerateInput);
        }
        let n = n.normalize();
        let d = argmax(pts, |p| n.dot(&(p - pts[a])).abs());
        if n.dot(&(pts[d] - pts[a])).abs() <= eps {
            return Err(HullError::DegenerateInput);
        }

        let tet = [a as u32, b as u32, c as u32, d as u32];
        let inside = (pts[a] + pts[b] + pts[c] + pts[d]) / 4.0;
        let mut mesh = HullMesh {
            pts,
            eps,
            faces: Vec::with_capacity(64),
        };
        for skip in 0..4 {
            let mut tri: Vec<u32> = (0..4).filter(|&k| k != skip).map(|k| tet[k]).collect();
            let (n, off) = plane(pts, [tri[0], tri[1], tri[2]]);
            if n.dot(&inside) - off > 0.0 {
                tri.swap(0, 1);
            }
            mesh.push_face([tri[0], tri[1], tri[2]]);
        }
        let mut edges: HashMap<(u32, u32), (u32, usize)> = HashMap::new();
        for (fi, f) in mesh.faces.iter().enumerate() {
            for e in 0..3 {
                edges.insert((f.v[e], f.v[(e + 1) % 3]), (fi as u32, e));
            }
        }
        for fi in 0..4 {
            for e in 0..3 {
                let f = &mesh.faces[fi];
                let (x, y) = (f.v[e], f.v[(e + 1) % 3]);
                mesh.faces[fi].nbr[e] = edges[&(y, x)].0;
            }
        }
        Ok(mesh)
    }

    fn push_face(&mut self, v: [u32; 3]) -> u32 {
        let (normal, offset) = plane(self.pts, v);
        self.faces.push(Face {
            v,
            nbr: [NONE; 3],
            normal,
            offset,
            alive: true,
        });
        (self.faces.len() - 1) as u32
    }

    #[inline]
    pub fn dist(&self, f: u32, p: &Vec3) -> f64 {
        let f = &self.faces[f as usize];
        f.normal.dot(p) - f.offset
    }

    /// Faces visible from point `apex`, grown from `start`, plus their horizon.
    pub fn visible_set(&self, start: u32, apex: u32) -> Visible {
        let p = self.pts[apex as usize];
        let mut faces = vec![start];
        let mut seen = std::collections::HashSet::from([start]);
        let mut i = 0;
        while i < faces.len() {
            let f = faces[i];
            i += 1;
            for &n in &self.faces[f as usize].nbr {
                if !seen.contains(&n) && self.dist(n, &p) > self.eps {
                    seen.insert(n);
                    faces.push(n);
                }
            }
        }
        faces.sort_unstable();
        let mut horizon = Vec::new();
        for &f in &faces {
            let face = &self.faces[f as usize];
            for e in 0..3 {
                if !seen.contains(&face.nbr[e]) {
                    horizon.push((face.v[e], face.v[(e + 1) % 3], face.nbr[e]));
                }
            }
        }
        Visible { faces, horizon }
    }

    /// Replaces the visible faces with a cone to `apex`. Returns new face ids.
    pub fn expand(&mut self, vis: &Visible, apex: u32) -> Result<std::ops::Range<u32>, HullError> {
        let mut by_start: HashMap<u32, u32> = HashMap::with_capacity(vis.horizon.len());
        let mut by_end: HashMap<u32, u32> = HashMap::with_capacity(vis.horizon.len());
        let first = self.faces.len() as u32;
        for (k, &(a, _, _)) in vis.horizon.iter().enumerate() {
            if by_start.insert(a, first + k as u32).is_some() {
                return Err(HullError::Topology("horizon is not a simple loop".into()));
            }
        }
        for (k, &(_, b, _)) in vis.horizon.iter().enumerate() {
            if by_end.insert(b, first + k as u32).is_some() {
                return Err(HullError::Topology("horizon is not a simple loop".into()));
            }
        }
        for &f in &vis.faces {
            self.faces[f as usize].alive = false;
        }
        for &(a, b, outer) in &vis.horizon {
            let id = self.push_face([a, b, apex]);
            let next = *by_start
                .get(&b)
                .ok_or_else(|| HullError::Topology("open horizon".into()))?;
            let prev = *by_end
                .get(&a)
                .ok_or_else(|| HullError::Topology("open horizon".into()))?;
            self.faces[id as usize].nbr = [outer, next, prev];
            let o = &mut self.faces[outer as usize];
            let e = (0..3)
                .find(|&e| o.v[e] == b && o.v[(e + 1) % 3] == a)
                .ok_or_else(|| HullError::Topology("horizon edge mismatch".into()))?;
            o.nbr[e] = id;
        }
        Ok(first..self.faces.len() as u32)
    }

    /// Compacts live faces into a [`Hull`]; vertices ordered by input index.
    pub fn into_hull(self) -> Hull {
        let mut used: Vec<u32> = self
            .faces
            .iter()
            .filter(|f| f.alive)
            .flat_map(|f| f.v)
            .collect();
        used.sort_unstable();
        used.dedup();
        let remap: HashMap<u32, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut faces: Vec<[usize; 3]> = self
            .faces
            .iter()
            .filter(|f| f.alive)
            .map(|f| {
                let t = [remap[&f.v[0]], remap[&f.v[1]], remap[&f.v[2]]];
                // Rotate so the smallest index leads; orientation is kept.
                let k = (0..3).min_by_key(|&k| t[k]).expect("three");
                [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
            })
            .collect();
        faces.sort_unstable();
        let vertices = used.iter().map(|&i| self.pts[i as usize]).collect();
        Hull::from_parts(
            String::new(),
            vertices,
            faces,
            used.iter().map(|&i| i as usize).collect(),
        )
    }
}

fn plane(pts: &[Vec3], v: [u32; 3]) -> (Vec3, f64) {
    let (a, b, c) = (pts[v[0] as usize], pts[v[1] as usize], pts[v[2] as usize]);
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    let n = if len > 0.0 { n / len } else { n };
    (n, n.dot(&a))
}

/// Index maximizing `score`, lowest index on ties.
fn argmax(pts: &[Vec3], score: impl Fn(&Vec3) -> f64) -> usize {
    let mut best = 0;
    let mut best_s = f64::NEG_INFINITY;
    for (i, p) in pts.iter().enumerate() {
        let s = score(p);
        if s > best_s {
            best_s = s;
            best = i;
        }
    }
    best
}
