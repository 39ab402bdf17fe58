use super::HullError;
use crate::geometry::Vec3;

/// Dilates a point set by an axis octahedron of radius `padding`: every vertex
/// `v` contributes `v` and `v ± padding·eᵢ`. The hull of the output is the
/// Minkowski sum of the input hull with that octahedron. Along the diagonals
/// the dilation is `padding / √3`, not `padding`.
pub fn pad_points(vertices: &[Vec3], padding: f64) -> Result<Vec<Vec3>, HullError> {
    if !(padding >= 0.0) {
        return Err(HullError::NegativePadding);
    }
    if padding == 0.0 {
        return Ok(vertices.to_vec());
    }
    let mut out = Vec::with_capacity(vertices.len() * 7);
    for v in vertices {
        out.push(*v);
        for k in 0..3 {
            let mut e = Vec3::zeros();
            e[k] = padding;
            out.push(v + e);
            out.push(v - e);
        }
    }
    Ok(out)
}
