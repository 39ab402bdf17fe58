//! Convex intersection (GJK), penetration depth (EPA) and capsule queries.
//!
//! Closed-set convention throughout: touching counts as intersecting.

use thiserror::Error;

use crate::geometry::Vec3;
use crate::hull::Hull;

/// Separation below which two shapes are considered touching.
pub const TOUCH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CollisionError {
    #[error("shapes do not intersect")]
    NotIntersecting,
}

/// Anything with a support mapping: farthest point in a direction.
pub trait Support {
    fn support(&self, dir: &Vec3) -> Vec3;
}

impl Support for Hull {
    fn support(&self, dir: &Vec3) -> Vec3 {
        Hull::support(self, dir)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec3,
    pub b: Vec3,
}

impl Support for Segment {
    fn support(&self, dir: &Vec3) -> Vec3 {
        if self.b.dot(dir) > self.a.dot(dir) {
            self.b
        } else {
            self.a
        }
    }
}

/// Swept sphere around a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub segment: Segment,
    pub radius: f64,
}

impl Capsule {
    pub fn new(a: Vec3, b: Vec3, radius: f64) -> Self {
        Self {
            segment: Segment { a, b },
            radius,
        }
    }
}

struct Difference<'a, A: ?Sized, B: ?Sized> {
    a: &'a A,
    b: &'a B,
}

impl<A: Support + ?Sized, B: Support + ?Sized> Support for Difference<'_, A, B> {
    fn support(&self, dir: &Vec3) -> Vec3 {
        self.a.support(dir) - self.b.support(&-dir)
    }
}

/// Result of a GJK run: separation distance and the final simplex of the
/// Minkowski difference `a − b`.
#[derive(Debug, Clone)]
pub struct Gjk {
    pub distance: f64,
    simplex: Vec<Vec3>,
}

/// Euclidean distance between two convex shapes (0 when they overlap).
pub fn gjk<A: Support + ?Sized, B: Support + ?Sized>(a: &A, b: &B, hint: Vec3) -> Gjk {
    let md = Difference { a, b };
    let dir = if hint.norm_squared() > 0.0 { hint } else { Vec3::x() };
    let w0 = md.support(&dir);
    let mut simplex = vec![w0];
    let mut v = w0;
    for _ in 0..128 {
        let vv = v.norm_squared();
        if vv <= 1e-30 {
            return Gjk {
                distance: 0.0,
                simplex,
            };
        }
        let w = md.support(&-v);
        if vv - v.dot(&w) <= 1e-12 * vv {
            break;
        }
        if simplex.iter().any(|s| (s - w).norm_squared() <= 1e-30) {
            break;
        }
        simplex.push(w);
        let (closest, reduced) = closest_on_simplex(&simplex);
        simplex = reduced;
        if simplex.len() == 4 || closest.norm_squared() <= 1e-30 {
            return Gjk {
                distance: 0.0,
                simplex,
            };
        }
        if closest.norm_squared() >= vv {
            // No progress; numerical floor reached.
            break;
        }
        v = closest;
    }
    Gjk {
        distance: v.norm(),
        simplex,
    }
}

/// Closest point of the simplex to the origin and the minimal sub-simplex
/// supporting it.
fn closest_on_simplex(s: &[Vec3]) -> (Vec3, Vec<Vec3>) {
    match s.len() {
        1 => (s[0], s.to_vec()),
        2 => closest_on_segment(s[0], s[1]),
        3 => closest_on_triangle(s[0], s[1], s[2]),
        _ => closest_on_tetrahedron(s[0], s[1], s[2], s[3]),
    }
}

fn closest_on_segment(a: Vec3, b: Vec3) -> (Vec3, Vec<Vec3>) {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 <= 0.0 {
        return (a, vec![a]);
    }
    let t = -a.dot(&ab) / len2;
    if t <= 0.0 {
        (a, vec![a])
    } else if t >= 1.0 {
        (b, vec![b])
    } else {
        (a + ab * t, vec![a, b])
    }
}

fn closest_on_triangle(a: Vec3, b: Vec3, c: Vec3) -> (Vec3, Vec<Vec3>) {
    let ab = b - a;
    let ac = c - a;
    let ap = -a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (a, vec![a]);
    }
    let bp = -b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (b, vec![b]);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, vec![a, b]);
    }
    let cp = -c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (c, vec![c]);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, vec![a, c]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, vec![b, c]);
    }
    let denom = va + vb + vc;
    if denom.abs() <= f64::MIN_POSITIVE {
        // Degenerate triangle: fall back to its edges.
        return [closest_on_segment(a, b), closest_on_segment(b, c), closest_on_segment(a, c)]
            .into_iter()
            .min_by(|x, y| x.0.norm_squared().total_cmp(&y.0.norm_squared()))
            .expect("three edges");
    }
    let v = vb / denom;
    let w = vc / denom;
    (a + ab * v + ac * w, vec![a, b, c])
}

fn closest_on_tetrahedron(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> (Vec3, Vec<Vec3>) {
    let faces = [(a, b, c, d), (a, c, d, b), (a, d, b, c), (b, d, c, a)];
    let volume = (b - a).cross(&(c - a)).dot(&(d - a));
    let scale = [(b - a).norm(), (c - a).norm(), (d - a).norm()].iter().fold(0.0f64, |m, x| m.max(*x));
    let flat = volume.abs() <= 1e-12 * scale.powi(3);
    let mut best: Option<(Vec3, Vec<Vec3>)> = None;
    let mut inside = true;
    for (p, q, r, opp) in faces {
        let n = (q - p).cross(&(r - p));
        let side_origin = n.dot(&-p);
        let side_opp = n.dot(&(opp - p));
        if flat || side_origin * side_opp < 0.0 {
            inside = false;
            let cand = closest_on_triangle(p, q, r);
            if best.as_ref().is_none_or(|b| cand.0.norm_squared() < b.0.norm_squared()) {
                best = Some(cand);
            }
        }
    }
    if inside && !flat {
        return (Vec3::zeros(), vec![a, b, c, d]);
    }
    best.expect("some face is outside")
}

/// Closed intersection test between two hulls.
pub fn collide(a: &Hull, b: &Hull) -> bool {
    if !a.aabb().overlaps(&b.aabb(), TOUCH_EPS) {
        return false;
    }
    gjk(a, b, a.centroid() - b.centroid()).distance <= TOUCH_EPS
}

/// Distance between two hulls (0 when they overlap).
pub fn distance(a: &Hull, b: &Hull) -> f64 {
    gjk(a, b, a.centroid() - b.centroid()).distance
}

/// Distance between a capsule's surface and a hull (0 when they overlap).
pub fn capsule_distance(c: &Capsule, h: &Hull) -> f64 {
    let hint = (c.segment.a + c.segment.b) / 2.0 - h.centroid();
    (gjk(&c.segment, h, hint).distance - c.radius).max(0.0)
}

pub fn capsule_collides(c: &Capsule, h: &Hull) -> bool {
    let hint = (c.segment.a + c.segment.b) / 2.0 - h.centroid();
    gjk(&c.segment, h, hint).distance <= c.radius + TOUCH_EPS
}

/// Minimum translation separating `b` from `a`: moving `b` by
/// `depth · direction` leaves the two hulls touching. Axis directions win
/// ties in the order +x, +y, +z, −x, −y, −z.
pub fn penetration_depth(a: &Hull, b: &Hull) -> Result<(f64, Vec3), CollisionError> {
    let g = gjk(a, b, a.centroid() - b.centroid());
    if g.distance > TOUCH_EPS {
        return Err(CollisionError::NotIntersecting);
    }
    let md = Difference { a, b };
    let scale = 1.0 + a.radius() + b.radius();
    let (depth, dir) = epa(&md, g.simplex, scale);
    let axes = [Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::x(), -Vec3::y(), -Vec3::z()];
    for u in axes {
        let along = md.support(&u).dot(&u);
        if along <= depth + 1e-9 * scale {
            return Ok((along.max(0.0), u));
        }
    }
    Ok((depth, dir))
}

struct EpaFace {
    v: [usize; 3],
    n: Vec3,
    d: f64,
}

fn epa_face(pts: &[Vec3], v: [usize; 3], inner: &Vec3) -> EpaFace {
    let (a, b, c) = (pts[v[0]], pts[v[1]], pts[v[2]]);
    let mut n = (b - a).cross(&(c - a));
    let mut v = v;
    if n.dot(&(inner - a)) > 0.0 {
        n = -n;
        v.swap(0, 1);
    }
    let len = n.norm();
    if len <= f64::MIN_POSITIVE {
        return EpaFace {
            v,
            n: Vec3::zeros(),
            d: f64::INFINITY,
        };
    }
    let n = n / len;
    EpaFace { v, n, d: n.dot(&a) }
}

/// Expands a polytope inside the Minkowski difference until the face nearest
/// the origin is on its boundary. Returns exact support depth along that face.
fn epa<S: Support>(md: &S, simplex: Vec<Vec3>, scale: f64) -> (f64, Vec3) {
    let tol = 1e-10 * scale;
    let mut pts = blow_up(md, simplex, tol);
    if pts.len() < 4 {
        // Degenerate difference; fall back to the best axis.
        let u = [Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::x(), -Vec3::y(), -Vec3::z()]
            .into_iter()
            .min_by(|p, q| md.support(p).dot(p).total_cmp(&md.support(q).dot(q)))
            .expect("axes");
        return (md.support(&u).dot(&u).max(0.0), u);
    }
    let inner = (pts[0] + pts[1] + pts[2] + pts[3]) / 4.0;
    let mut faces: Vec<EpaFace> = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
        .into_iter()
        .map(|v| epa_face(&pts, v, &inner))
        .collect();
    let mut best = (f64::INFINITY, Vec3::x());
    for _ in 0..256 {
        let Some((fi, _)) = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.d.is_finite())
            .min_by(|x, y| x.1.d.total_cmp(&y.1.d))
        else {
            break;
        };
        let n = faces[fi].n;
        let d = faces[fi].d;
        let w = md.support(&n);
        let reach = w.dot(&n);
        if reach < best.0 {
            best = (reach, n);
        }
        if reach - d <= tol {
            break;
        }
        let wi = pts.len();
        pts.push(w);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        faces.retain(|f| {
            let visible = f.d.is_finite() && f.n.dot(&(w - pts[f.v[0]])) > tol;
            if visible {
                for e in 0..3 {
                    let (x, y) = (f.v[e], f.v[(e + 1) % 3]);
                    if let Some(k) = horizon.iter().position(|&(p, q)| p == y && q == x) {
                        horizon.swap_remove(k);
                    } else {
                        horizon.push((x, y));
                    }
                }
            }
            !visible
        });
        if horizon.is_empty() {
            break;
        }
        for (x, y) in horizon {
            faces.push(epa_face(&pts, [x, y, wi], &inner));
        }
    }
    (best.0.max(0.0), best.1)
}

/// Grows a GJK terminal simplex into a full-dimensional tetrahedron.
fn blow_up<S: Support>(md: &S, mut s: Vec<Vec3>, tol: f64) -> Vec<Vec3> {
    let axes = [Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::x(), -Vec3::y(), -Vec3::z()];
    if s.len() == 4 {
        let vol = (s[1] - s[0]).cross(&(s[2] - s[0])).dot(&(s[3] - s[0]));
        if vol.abs() > tol * tol * tol {
            return s;
        }
        s.truncate(3);
    }
    if s.len() == 1 {
        for u in axes {
            let w = md.support(&u);
            if (w - s[0]).norm() > tol {
                s.push(w);
                break;
            }
        }
    }
    if s.len() == 2 {
        let d = (s[1] - s[0]).normalize();
        let seed = axes[..3]
            .iter()
            .min_by(|p, q| d.dot(p).abs().total_cmp(&d.dot(q).abs()))
            .expect("axes");
        let n1 = d.cross(seed).normalize();
        let n2 = d.cross(&n1);
        for k in 0..6 {
            let a = std::f64::consts::TAU * k as f64 / 6.0;
            let u = n1 * a.cos() + n2 * a.sin();
            let w = md.support(&u);
            if d.cross(&(w - s[0])).norm() > tol {
                s.push(w);
                break;
            }
        }
    }
    if s.len() == 3 {
        let n = (s[1] - s[0]).cross(&(s[2] - s[0]));
        if n.norm() > 0.0 {
            let n = n.normalize();
            for u in [n, -n] {
                let w = md.support(&u);
                if n.dot(&(w - s[0])).abs() > tol {
                    s.push(w);
                    break;
                }
            }
        }
    }
    s
}
