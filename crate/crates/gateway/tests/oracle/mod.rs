//! Brute-force reference computations used by the acceptance run. Nothing in
//! here calls into the library's geometry routines.

use std::collections::BTreeSet;

use hierasm_core::{Hull, Vec3};

/// Hull vertex indices by facet enumeration: a triple spans a facet when every
/// other point lies on one side of its plane. Points strictly inside a
/// tetrahedron of extreme points are dropped first; they cannot be vertices.
pub fn hull_vertices(points: &[Vec3]) -> BTreeSet<usize> {
    let scale = points.iter().map(|p| p.amax()).fold(1.0, f64::max);
    let eps = 1e-12 * scale;
    let mut extremes: Vec<usize> = Vec::new();
    let dirs: Vec<Vec3> = [-1.0, 0.0, 1.0]
        .iter()
        .flat_map(|&x| [-1.0, 0.0, 1.0].iter().flat_map(move |&y| [-1.0, 0.0, 1.0].map(move |z| Vec3::new(x, y, z))))
        .filter(|d| d.norm() > 0.0)
        .collect();
    for d in &dirs {
        let best = (0..points.len())
            .max_by(|&a, &b| d.dot(&points[a]).total_cmp(&d.dot(&points[b])).then(b.cmp(&a)))
            .unwrap();
        if !extremes.contains(&best) {
            extremes.push(best);
        }
    }
    // Tetrahedra fanned from one extreme cover the extremes' hull. Points
    // strictly inside one of them cannot be hull vertices.
    let e = &extremes;
    let mut tets = Vec::new();
    for b in 1..e.len() {
        for c in b + 1..e.len() {
            for d in c + 1..e.len() {
                if let Some(t) = inward_planes(&[points[e[0]], points[e[b]], points[e[c]], points[e[d]]], eps) {
                    tets.push(t);
                }
            }
        }
    }
    let candidates: Vec<usize> = (0..points.len())
        .filter(|&i| {
            extremes.contains(&i)
                || !tets.iter().any(|t| t.iter().all(|(n, off)| n.dot(&points[i]) - off > eps))
        })
        .collect();

    // The candidates' centroid is interior, so a facet plane through three
    // candidates is one with no candidate on the centroid's far side.
    let c = &candidates;
    let inner = c.iter().map(|&i| points[i]).sum::<Vec3>() / c.len() as f64;
    let mut vertex = vec![false; points.len()];
    let mut witness = c[0];
    for a in 0..c.len() {
        for b in a + 1..c.len() {
            for k in b + 1..c.len() {
                let (i, j, l) = (c[a], c[b], c[k]);
                if vertex[i] && vertex[j] && vertex[l] {
                    continue;
                }
                let mut n = (points[j] - points[i]).cross(&(points[l] - points[i]));
                let nn = n.norm();
                if nn <= eps {
                    continue;
                }
                let mut off = n.dot(&points[i]);
                let below = n.dot(&inner) - off;
                if below.abs() <= eps * nn {
                    continue;
                }
                if below > 0.0 {
                    n = -n;
                    off = -off;
                }
                let above = |m: usize| n.dot(&points[m]) - off > eps * nn;
                if above(witness) {
                    continue;
                }
                // Pruned points sit inside the extremes' hull, so they never
                // decide a side.
                match c.iter().find(|&&m| above(m)) {
                    Some(&m) => witness = m,
                    None => {
                        vertex[i] = true;
                        vertex[j] = true;
                        vertex[l] = true;
                    }
                }
            }
        }
    }
    (0..points.len()).filter(|&i| vertex[i]).collect()
}

/// Unit face planes of a tetrahedron, oriented so the interior is positive.
fn inward_planes(t: &[Vec3; 4], eps: f64) -> Option<[(Vec3, f64); 4]> {
    let faces = [(0, 1, 2, 3), (0, 1, 3, 2), (0, 2, 3, 1), (1, 2, 3, 0)];
    let mut out = [(Vec3::zeros(), 0.0); 4];
    for (slot, &(a, b, c, d)) in out.iter_mut().zip(&faces) {
        let n = (t[b] - t[a]).cross(&(t[c] - t[a]));
        let nn = n.norm();
        if nn <= eps {
            return None;
        }
        let mut n = n / nn;
        let s = n.dot(&(t[d] - t[a]));
        if s.abs() <= eps {
            return None;
        }
        if s < 0.0 {
            n = -n;
        }
        *slot = (n, n.dot(&t[a]));
    }
    Some(out)
}

fn project(h: &Hull, axis: &Vec3) -> (f64, f64) {
    h.vertices
        .iter()
        .map(|v| axis.dot(v))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn edges(h: &Hull) -> BTreeSet<(usize, usize)> {
    h.faces
        .iter()
        .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect()
}

fn face_normal(h: &Hull, f: &[usize; 3]) -> Vec3 {
    let [a, b, c] = f.map(|i| h.vertices[i]);
    (b - a).cross(&(c - a))
}

/// Separating-axis overlap: the smallest projection overlap over face
/// normals of both hulls and all edge-pair cross products. Negative means
/// separated; otherwise it is the penetration depth.
pub fn sat_overlap(a: &Hull, b: &Hull) -> f64 {
    let mut axes: Vec<Vec3> = a.faces.iter().map(|f| face_normal(a, f)).collect();
    axes.extend(b.faces.iter().map(|f| face_normal(b, f)));
    let (ea, eb) = (edges(a), edges(b));
    for &(i, j) in &ea {
        let da = a.vertices[j] - a.vertices[i];
        for &(k, l) in &eb {
            axes.push(da.cross(&(b.vertices[l] - b.vertices[k])));
        }
    }
    let mut best = f64::INFINITY;
    for axis in axes {
        let n = axis.norm();
        if n < 1e-12 {
            continue;
        }
        let u = axis / n;
        let (amin, amax) = project(a, &u);
        let (bmin, bmax) = project(b, &u);
        best = best.min((amax - bmin).min(bmax - amin));
    }
    best
}

/// Closest point on triangle `abc` to `p`.
pub fn closest_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let (ab, ac, ap) = (b - a, c - a, p - a);
    let (d1, d2) = (ab.dot(&ap), ac.dot(&ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let (d3, d4) = (ab.dot(&bp), ac.dot(&bp));
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let (d5, d6) = (ab.dot(&cp), ac.dot(&cp));
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Distance between segments `p1q1` and `p2q2`.
pub fn segment_segment(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> f64 {
    let (d1, d2, r) = (q1 - p1, q2 - p2, p1 - p2);
    let (a, e, f) = (d1.dot(&d1), d2.dot(&d2), d2.dot(&r));
    let (s, t);
    if a <= 1e-300 && e <= 1e-300 {
        return r.norm();
    }
    if a <= 1e-300 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= 1e-300 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            } else {
                t = t0;
                s = s0;
            }
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

fn inside(h: &Hull, p: &Vec3) -> bool {
    h.faces.iter().all(|f| face_normal(h, f).dot(&(p - h.vertices[f[0]])) <= 0.0)
}

/// Euclidean distance from `p` to the solid hull.
pub fn point_hull(h: &Hull, p: &Vec3) -> f64 {
    if inside(h, p) {
        return 0.0;
    }
    h.faces
        .iter()
        .map(|f| {
            let [a, b, c] = f.map(|i| h.vertices[i]);
            (closest_on_triangle(p, &a, &b, &c) - p).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// True if the segment passes through the solid hull (Cyrus-Beck clipping).
fn segment_hits(h: &Hull, a: &Vec3, b: &Vec3) -> bool {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let d = b - a;
    for f in &h.faces {
        let n = face_normal(h, f);
        let num = n.dot(&(a - h.vertices[f[0]]));
        let den = n.dot(&d);
        if den.abs() < 1e-300 {
            if num > 0.0 {
                return false;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
        if lo > hi {
            return false;
        }
    }
    true
}

/// Euclidean distance from segment `ab` to the solid hull.
pub fn segment_hull(h: &Hull, a: &Vec3, b: &Vec3) -> f64 {
    if segment_hits(h, a, b) {
        return 0.0;
    }
    let mut best = point_hull(h, a).min(point_hull(h, b));
    for (i, j) in edges(h) {
        best = best.min(segment_segment(a, b, &h.vertices[i], &h.vertices[j]));
    }
    best
}

/// Exact distance between two disjoint hulls (vertex-face and edge-edge
/// pairs); zero when they overlap.
pub fn hull_distance(a: &Hull, b: &Hull) -> f64 {
    if sat_overlap(a, b) >= 0.0 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for v in &a.vertices {
        best = best.min(point_hull(b, v));
    }
    for v in &b.vertices {
        best = best.min(point_hull(a, v));
    }
    let eb = edges(b);
    for (i, j) in edges(a) {
        for &(k, l) in &eb {
            best = best.min(segment_segment(&a.vertices[i], &a.vertices[j], &b.vertices[k], &b.vertices[l]));
        }
    }
    best
}

pub type Mat4 = [[f64; 4]; 4];

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Standard Denavit-Hartenberg link transform.
pub fn dh(theta: f64, d: f64, a: f64, alpha: f64) -> Mat4 {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    [
        [ct, -st * ca, st * sa, a * ct],
        [st, ct * ca, -ct * sa, a * st],
        [0.0, sa, ca, d],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

/// UR5 flange-plus-tool transform from the published DH table.
pub fn ur5_fk(q: &[f64]) -> Mat4 {
    use std::f64::consts::FRAC_PI_2;
    let table = [
        (0.089159, 0.0, FRAC_PI_2),
        (0.0, -0.425, 0.0),
        (0.0, -0.39225, 0.0),
        (0.10915, 0.0, FRAC_PI_2),
        (0.09465, 0.0, -FRAC_PI_2),
        (0.0823, 0.0, 0.0),
    ];
    let mut t = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
    for (&(d, a, alpha), &theta) in table.iter().zip(q) {
        t = mat_mul(&t, &dh(theta, d, a, alpha));
    }
    mat_mul(&t, &dh(0.0, 0.1, 0.0, 0.0))
}
