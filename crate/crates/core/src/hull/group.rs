use std::collections::{BTreeMap, BTreeSet};

use super::{convex_hull, pad_points, Hull, HullError, HullOptions};
use crate::geometry::{centroid, Vec3};
use crate::tree::{ConstraintTree, GroupId, TreeError};

impl From<TreeError> for HullError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::UnknownId(id) => HullError::UnknownId(id),
            other => HullError::Topology(other.to_string()),
        }
    }
}

/// Padded world-frame hull of a single object.
pub fn object_hull(tree: &ConstraintTree, id: &str, opts: &HullOptions) -> Result<Hull, HullError> {
    let obj = tree.object(id)?;
    let pose = tree.world_pose(id)?;
    let world: Vec<Vec3> = obj.mesh.points().map(|v| pose.transform_point(&v)).collect();
    Ok(convex_hull(&pad_points(&world, obj.padding)?, opts)?.with_owner(id))
}

/// Half the largest padding among the objects below `g`.
pub fn default_nest_margin(tree: &ConstraintTree, g: &str) -> Result<f64, HullError> {
    Ok(tree
        .subtree_objects(g)?
        .iter()
        .map(|o| tree.objects[o].padding)
        .fold(0.0, f64::max)
        * 0.5)
}

fn inflate(hull: &Hull, margin: f64) -> impl Iterator<Item = Vec3> + '_ {
    let c = centroid(&hull.vertices);
    hull.vertices.iter().map(move |v| {
        let d = v - c;
        let len = d.norm();
        if len > 0.0 {
            v + d * (margin / len)
        } else {
            *v
        }
    })
}

/// Hull over the padded vertices of `g`'s direct objects and its child-group
/// hulls inflated by `nest_margin`, so parents enclose their children.
pub fn group_hull(tree: &ConstraintTree, g: &str, nest_margin: f64, opts: &HullOptions) -> Result<Hull, HullError> {
    let mut memo = BTreeMap::new();
    group_hull_memo(tree, g, Some(nest_margin), opts, &mut memo)
}

fn group_hull_memo(
    tree: &ConstraintTree,
    g: &str,
    margin: Option<f64>,
    opts: &HullOptions,
    memo: &mut BTreeMap<GroupId, Hull>,
) -> Result<Hull, HullError> {
    if let Some(h) = memo.get(g) {
        return Ok(h.clone());
    }
    let node = tree.group(g)?;
    let margin = match margin.or(opts.nest_margin) {
        Some(m) => m,
        None => default_nest_margin(tree, g)?,
    };
    let mut points = Vec::new();
    for o in tree.direct_objects(g)? {
        let obj = &tree.objects[&o];
        let pose = tree.world_pose(&o)?;
        let world: Vec<Vec3> = obj.mesh.points().map(|v| pose.transform_point(&v)).collect();
        points.extend(pad_points(&world, obj.padding)?);
    }
    for child in tree.child_groups(&node.id)? {
        let h = group_hull_memo(tree, &child, None, opts, memo)?;
        points.extend(inflate(&h, margin));
    }
    let hull = convex_hull(&points, opts)?.with_owner(g);
    memo.insert(g.to_string(), hull.clone());
    Ok(hull)
}

/// Hulls of every group in the tree.
pub fn group_hulls(tree: &ConstraintTree, opts: &HullOptions) -> Result<BTreeMap<GroupId, Hull>, HullError> {
    let mut memo = BTreeMap::new();
    for g in tree.groups.keys() {
        group_hull_memo(tree, g, None, opts, &mut memo)?;
    }
    Ok(memo)
}

/// Root hulls are always visible; a hull containing `cursor` also reveals
/// its direct children, recursively.
pub fn visible_hulls(tree: &ConstraintTree, cursor: &Vec3, opts: &HullOptions) -> Result<BTreeSet<GroupId>, HullError> {
    let mut memo = BTreeMap::new();
    let mut visible = BTreeSet::new();
    let mut stack: Vec<GroupId> = tree.roots.iter().cloned().collect();
    while let Some(g) = stack.pop() {
        visible.insert(g.clone());
        let h = group_hull_memo(tree, &g, None, opts, &mut memo)?;
        if h.contains(cursor) {
            stack.extend(tree.child_groups(&g)?);
        }
    }
    Ok(visible)
}
