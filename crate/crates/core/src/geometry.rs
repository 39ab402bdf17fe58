//! Rigid transforms, triangle meshes and small vector helpers shared by every
//! other module.

use nalgebra::{Quaternion, Unit, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

pub type Vec3 = Vector3<f64>;

/// A rigid transform: translation in meters plus a unit quaternion.
///
/// Serialized as `{"translation": [x, y, z], "rotation": [w, x, y, z]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "PoseRepr", into = "PoseRepr")]
pub struct Pose {
    pub translation: Vec3,
    pub rotation: UnitQuaternion<f64>,
}

#[derive(Serialize, Deserialize)]
struct PoseRepr {
    translation: [f64; 3],
    rotation: [f64; 4],
}

impl From<PoseRepr> for Pose {
    fn from(r: PoseRepr) -> Self {
        let [w, x, y, z] = r.rotation;
        Pose::new(Vec3::from(r.translation), Quaternion::new(w, x, y, z))
    }
}

impl From<Pose> for PoseRepr {
    fn from(p: Pose) -> Self {
        let q = p.rotation.quaternion();
        PoseRepr {
            translation: [p.translation.x, p.translation.y, p.translation.z],
            rotation: [q.w, q.i, q.j, q.k],
        }
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    /// Builds a pose, renormalizing the quaternion. A zero quaternion maps to
    /// the identity rotation.
    pub fn new(translation: Vec3, rotation: Quaternion<f64>) -> Self {
        let rotation = if rotation.norm() > 0.0 && rotation.norm().is_finite() {
            Unit::new_normalize(rotation)
        } else {
            UnitQuaternion::identity()
        };
        Self {
            translation,
            rotation,
        }
    }

    pub fn identity() -> Self {
        Self {
            translation: Vec3::zeros(),
            rotation: UnitQuaternion::identity(),
        }
    }

    pub fn from_translation(t: Vec3) -> Self {
        Self {
            translation: t,
            rotation: UnitQuaternion::identity(),
        }
    }

    pub fn from_parts(translation: Vec3, rotation: UnitQuaternion<f64>) -> Self {
        Self {
            translation,
            rotation,
        }
    }

    /// `self * other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            translation: self.translation + self.rotation * other.translation,
            rotation: self.rotation * other.rotation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.rotation.inverse();
        Pose {
            translation: -(inv * self.translation),
            rotation: inv,
        }
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    /// Translation distance and rotation angle between two poses.
    pub fn distance(&self, other: &Pose) -> (f64, f64) {
        (
            (self.translation - other.translation).norm(),
            self.rotation.angle_to(&other.rotation),
        )
    }

    pub fn approx_eq(&self, other: &Pose, tol: f64) -> bool {
        let (d, a) = self.distance(other);
        d <= tol && a <= tol
    }
}

/// Triangle mesh in its object frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn points(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.vertices.iter().map(|v| Vec3::from(*v))
    }

    /// Axis-aligned box centered at the origin.
    pub fn cuboid(half: Vec3) -> Mesh {
        let mut vertices = Vec::with_capacity(8);
        for i in 0..8 {
            let sx = if i & 1 == 0 { -1.0 } else { 1.0 };
            let sy = if i & 2 == 0 { -1.0 } else { 1.0 };
            let sz = if i & 4 == 0 { -1.0 } else { 1.0 };
            vertices.push([sx * half.x, sy * half.y, sz * half.z]);
        }
        let triangles = vec![
            [0, 2, 3],
            [0, 3, 1],
            [4, 5, 7],
            [4, 7, 6],
            [0, 1, 5],
            [0, 5, 4],
            [2, 6, 7],
            [2, 7, 3],
            [0, 4, 6],
            [0, 6, 2],
            [1, 3, 7],
            [1, 7, 5],
        ];
        Mesh {
            vertices,
            triangles,
        }
    }

    /// Closed prism approximating a cylinder along z, centered at the origin.
    pub fn cylinder(radius: f64, height: f64, sides: usize) -> Mesh {
        let sides = sides.max(3);
        let h = height / 2.0;
        let mut vertices = Vec::with_capacity(2 * sides + 2);
        for k in 0..sides {
            let a = std::f64::consts::TAU * k as f64 / sides as f64;
            vertices.push([radius * a.cos(), radius * a.sin(), -h]);
            vertices.push([radius * a.cos(), radius * a.sin(), h]);
        }
        let bottom = vertices.len();
        vertices.push([0.0, 0.0, -h]);
        let top = vertices.len();
        vertices.push([0.0, 0.0, h]);
        let mut triangles = Vec::new();
        for k in 0..sides {
            let (b0, t0) = (2 * k, 2 * k + 1);
            let (b1, t1) = (2 * ((k + 1) % sides), 2 * ((k + 1) % sides) + 1);
            triangles.push([b0, b1, t1]);
            triangles.push([b0, t1, t0]);
            triangles.push([bottom, b1, b0]);
            triangles.push([top, t0, t1]);
        }
        Mesh {
            vertices,
            triangles,
        }
    }

    /// True if the vertex set spans a volume (at least 4 non-coplanar points).
    pub fn is_volumetric(&self) -> bool {
        let pts: Vec<Vec3> = self.points().collect();
        spans_volume(&pts)
    }

    pub fn validate_indices(&self) -> bool {
        self.triangles
            .iter()
            .all(|t| t.iter().all(|&i| i < self.vertices.len()))
    }
}

/// Scale-aware tolerance for geometric predicates over `points`.
pub fn scale_epsilon(points: &[Vec3]) -> f64 {
    let mut m = [0.0f64; 3];
    for p in points {
        for k in 0..3 {
            m[k] = m[k].max(p[k].abs());
        }
    }
    3.0 * f64::EPSILON * (m[0] + m[1] + m[2]).max(1.0) * 16.0
}

/// True when the points are not all coplanar (nor collinear, nor coincident).
pub fn spans_volume(points: &[Vec3]) -> bool {
    if points.len() < 4 {
        return false;
    }
    let eps = scale_epsilon(points);
    let a = points[0];
    let Some(b) = points.iter().max_by(|p, q| {
        (*p - a)
            .norm_squared()
            .total_cmp(&(*q - a).norm_squared())
    }) else {
        return false;
    };
    let ab = b - a;
    if ab.norm() <= eps {
        return false;
    }
    let Some(c) = points
        .iter()
        .max_by(|p, q| ab.cross(&(*p - a)).norm().total_cmp(&ab.cross(&(*q - a)).norm()))
    else {
        return false;
    };
    let n = ab.cross(&(c - a));
    if n.norm() <= eps * ab.norm() {
        return false;
    }
    let n = n.normalize();
    points.iter().any(|p| n.dot(&(p - a)).abs() > eps)
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Option<Aabb> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut b = Aabb {
            min: first,
            max: first,
        };
        for p in it {
            b.min = b.min.inf(p);
            b.max = b.max.sup(p);
        }
        Some(b)
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) / 2.0
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn overlaps(&self, other: &Aabb, slack: f64) -> bool {
        (0..3).all(|k| self.min[k] <= other.max[k] + slack && other.min[k] <= self.max[k] + slack)
    }
}

pub fn centroid(points: &[Vec3]) -> Vec3 {
    if points.is_empty() {
        return Vec3::zeros();
    }
    points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / points.len() as f64
}

/// Rotation by `angle` radians about world z.
pub fn yaw_rotation(angle: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::from_axis_angle(&Vector3::z_axis(), angle)
}
