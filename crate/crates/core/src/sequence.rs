//! Assembly ordering: a hierarchy-respecting tour over groups, per-group
//! object sequences in joint space, and the composed assembly plan.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::distance;
use crate::geometry::{centroid, Vec3};
use crate::hull::Hull;
use crate::kinematics::{ik, plan_path, top_down, ArmModel, JointConfig, KinematicsError, PlannerOptions};
use crate::par::{argmin, map_range, Exec};
use crate::placement::{placed_hulls, Placement, PlacementError, Workspace};
use crate::tree::{ConstraintTree, GroupId, ObjectId};

/// Largest group count solved exactly.
pub const EXACT_GROUPS: usize = 12;
/// Largest object count sequenced by exhaustive search.
pub const EXACT_OBJECTS: usize = 8;
/// Effector stand-off above an object's top face.
pub const GRASP_OFFSET: f64 = 0.02;
/// Gap between neighbouring parts on the staging line.
pub const STAGING_GAP: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error("nothing to order")]
    EmptyInput,
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("no IK solution for object `{0}`")]
    IkFailure(ObjectId),
    #[error("precedence constraints contain a cycle")]
    CyclicPrecedence,
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error("motion planning for `{object}` failed: {source}")]
    Motion {
        object: ObjectId,
        #[source]
        source: KinematicsError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTour {
    pub order: Vec<GroupId>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSequence {
    pub group: GroupId,
    pub order: Vec<ObjectId>,
    pub cost: f64,
}

/// `parents[g]` is the parent group of `g` (None for roots).
pub type Hierarchy = BTreeMap<GroupId, Option<GroupId>>;

pub fn hierarchy(tree: &ConstraintTree) -> Hierarchy {
    tree.groups.iter().map(|(id, g)| (id.clone(), g.parent.clone())).collect()
}

/// For each node index, the bitmask of nodes that must come before it.
fn descendant_masks(ids: &[GroupId], parents: &Hierarchy) -> Result<Vec<u64>, SequenceError> {
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
    let mut masks = vec![0u64; ids.len()];
    for (i, g) in ids.iter().enumerate() {
        let mut cursor = parents.get(g).cloned().flatten();
        let mut hops = 0;
        while let Some(p) = cursor {
            hops += 1;
            if hops > ids.len() {
                return Err(SequenceError::CyclicPrecedence);
            }
            if let Some(&pi) = index.get(p.as_str()) {
                masks[pi] |= 1 << i;
            }
            cursor = parents.get(&p).cloned().flatten();
        }
    }
    Ok(masks)
}

fn open_length(order: &[usize], start: &Vec3, pts: &[Vec3]) -> f64 {
    let mut prev = *start;
    let mut total = 0.0;
    for &i in order {
        total += (pts[i] - prev).norm();
        prev = pts[i];
    }
    total
}

fn respects(order: &[usize], masks: &[u64]) -> bool {
    let mut seen = 0u64;
    for &i in order {
        if masks[i] & !seen != 0 {
            return false;
        }
        seen |= 1 << i;
    }
    true
}

/// Open tour from `base` over all group centroids, every group after its
/// descendants. Exact for up to [`EXACT_GROUPS`] groups.
pub fn order_groups(centroids: &BTreeMap<GroupId, Vec3>, base: Vec3, parents: &Hierarchy) -> Result<GroupTour, SequenceError> {
    if centroids.is_empty() {
        return Err(SequenceError::EmptyInput);
    }
    let ids: Vec<GroupId> = centroids.keys().cloned().collect();
    if ids.len() > 64 {
        return order_groups_heuristic(centroids, base, parents);
    }
    let masks = descendant_masks(&ids, parents)?;
    let pts: Vec<Vec3> = ids.iter().map(|g| centroids[g]).collect();
    let order = if ids.len() <= EXACT_GROUPS {
        held_karp(&pts, &base, &masks).ok_or(SequenceError::CyclicPrecedence)?
    } else {
        let nn = nearest_neighbour(&pts, &base, &masks).ok_or(SequenceError::CyclicPrecedence)?;
        two_opt(nn, &pts, &base, &masks)
    };
    Ok(GroupTour {
        length: open_length(&order, &base, &pts),
        order: order.into_iter().map(|i| ids[i].clone()).collect(),
    })
}

/// Nearest-neighbour construction followed by 2-opt, regardless of size.
pub fn order_groups_heuristic(
    centroids: &BTreeMap<GroupId, Vec3>,
    base: Vec3,
    parents: &Hierarchy,
) -> Result<GroupTour, SequenceError> {
    if centroids.is_empty() {
        return Err(SequenceError::EmptyInput);
    }
    let ids: Vec<GroupId> = centroids.keys().cloned().collect();
    if ids.len() > 64 {
        // Bitmask precedence is limited to 64 nodes; fall back to repair only.
        let pts: Vec<Vec3> = ids.iter().map(|g| centroids[g]).collect();
        let order = repair_by_ids(&ids, (0..ids.len()).collect(), parents);
        return Ok(GroupTour {
            length: open_length(&order, &base, &pts),
            order: order.into_iter().map(|i| ids[i].clone()).collect(),
        });
    }
    let masks = descendant_masks(&ids, parents)?;
    let pts: Vec<Vec3> = ids.iter().map(|g| centroids[g]).collect();
    let nn = nearest_neighbour(&pts, &base, &masks).ok_or(SequenceError::CyclicPrecedence)?;
    let order = two_opt(nn, &pts, &base, &masks);
    Ok(GroupTour {
        length: open_length(&order, &base, &pts),
        order: order.into_iter().map(|i| ids[i].clone()).collect(),
    })
}

/// Held-Karp over subsets; a node may join only once its required
/// predecessors are all in the subset.
fn held_karp(pts: &[Vec3], base: &Vec3, masks: &[u64]) -> Option<Vec<usize>> {
    let n = pts.len();
    let full = (1usize << n) - 1;
    let mut dp = vec![f64::INFINITY; (full + 1) * n];
    let mut prev = vec![usize::MAX; (full + 1) * n];
    for j in 0..n {
        if masks[j] == 0 {
            dp[(1 << j) * n + j] = (pts[j] - base).norm();
        }
    }
    for set in 1..=full {
        for last in 0..n {
            let cur = dp[set * n + last];
            if !cur.is_finite() {
                continue;
            }
            for j in 0..n {
                if set & (1 << j) != 0 || (masks[j] as usize) & !set != 0 {
                    continue;
                }
                let next = set | (1 << j);
                let cand = cur + (pts[j] - pts[last]).norm();
                if cand < dp[next * n + j] {
                    dp[next * n + j] = cand;
                    prev[next * n + j] = last;
                }
            }
        }
    }
    let scores: Vec<f64> = (0..n).map(|j| dp[full * n + j]).collect();
    let mut last = argmin(&scores).filter(|&j| scores[j].is_finite())?;
    let mut set = full;
    let mut order = Vec::with_capacity(n);
    loop {
        order.push(last);
        let p = prev[set * n + last];
        set &= !(1 << last);
        if p == usize::MAX {
            break;
        }
        last = p;
    }
    order.reverse();
    Some(order)
}

fn nearest_neighbour(pts: &[Vec3], base: &Vec3, masks: &[u64]) -> Option<Vec<usize>> {
    let n = pts.len();
    let mut seen = 0u64;
    let mut at = *base;
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let scores: Vec<f64> = (0..n)
            .map(|j| {
                if seen & (1 << j) != 0 || masks[j] & !seen != 0 {
                    f64::NAN
                } else {
                    (pts[j] - at).norm()
                }
            })
            .collect();
        let j = argmin(&scores)?;
        order.push(j);
        seen |= 1 << j;
        at = pts[j];
    }
    Some(order)
}

/// Stable repair: an element whose required predecessors have not all
/// appeared is moved to just after the last of them.
pub fn repair(order: Vec<usize>, masks: &[u64]) -> Vec<usize> {
    let mut out = Vec::with_capacity(order.len());
    let mut pending: Vec<usize> = Vec::new();
    let mut seen = 0u64;
    for x in order {
        if masks[x] & !seen != 0 {
            pending.push(x);
            continue;
        }
        out.push(x);
        seen |= 1 << x;
        while let Some(k) = pending.iter().position(|&p| masks[p] & !seen == 0) {
            let p = pending.remove(k);
            out.push(p);
            seen |= 1 << p;
        }
    }
    out.extend(pending);
    out
}

fn repair_by_ids(ids: &[GroupId], order: Vec<usize>, parents: &Hierarchy) -> Vec<usize> {
    // Depth-descending stable sort puts every descendant before its ancestors.
    let depth = |i: usize| {
        let mut d = 0;
        let mut c = parents.get(&ids[i]).cloned().flatten();
        while let Some(p) = c {
            d += 1;
            c = parents.get(&p).cloned().flatten();
        }
        d
    };
    let mut order = order;
    order.sort_by_key(|&i| std::cmp::Reverse(depth(i)));
    order
}

/// 2-opt segment reversals, repaired for precedence; a move is kept only if
/// it shortens the tour.
fn two_opt(mut order: Vec<usize>, pts: &[Vec3], base: &Vec3, masks: &[u64]) -> Vec<usize> {
    let n = order.len();
    let mut best = open_length(&order, base, pts);
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let mut cand = order.clone();
                cand[i..=j].reverse();
                let cand = repair(cand, masks);
                let len = open_length(&cand, base, pts);
                if len < best - 1e-12 {
                    order = cand;
                    best = len;
                    improved = true;
                }
            }
        }
    }
    order
}

fn joint_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Precedence pairs `(before, after)` restricted to `objects`, as bitmasks.
fn object_masks(objects: &[ObjectId], supports: &[(ObjectId, ObjectId)]) -> Result<Vec<u64>, SequenceError> {
    let index: BTreeMap<&str, usize> = objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    let mut masks = vec![0u64; objects.len()];
    for (before, after) in supports {
        if let (Some(&b), Some(&a)) = (index.get(before.as_str()), index.get(after.as_str())) {
            masks[a] |= 1 << b;
        }
    }
    // Transitive closure, then cycle check.
    for _ in 0..objects.len() {
        for i in 0..objects.len() {
            let mut m = masks[i];
            for j in 0..objects.len() {
                if m & (1 << j) != 0 {
                    m |= masks[j];
                }
            }
            masks[i] = m;
        }
    }
    if (0..objects.len()).any(|i| masks[i] & (1 << i) != 0) {
        return Err(SequenceError::CyclicPrecedence);
    }
    Ok(masks)
}

fn path_cost(order: &[usize], configs: &[JointConfig]) -> f64 {
    order.windows(2).map(|w| joint_distance(&configs[w[0]], &configs[w[1]])).sum()
}

/// Minimum joint-space travel order over `objects`, honouring `supports`
/// (`(supporter, supported)` pairs). Exhaustive up to [`EXACT_OBJECTS`].
pub fn sequence_objects(
    objects: &[ObjectId],
    configs: &BTreeMap<ObjectId, JointConfig>,
    supports: &[(ObjectId, ObjectId)],
    exec: Exec,
) -> Result<(Vec<ObjectId>, f64), SequenceError> {
    if objects.is_empty() {
        return Ok((Vec::new(), 0.0));
    }
    let mut objects = objects.to_vec();
    objects.sort();
    if objects.len() > 64 {
        return Err(SequenceError::EmptyInput);
    }
    let masks = object_masks(&objects, supports)?;
    let cfg: Vec<JointConfig> = objects
        .iter()
        .map(|o| configs.get(o).cloned().ok_or_else(|| SequenceError::IkFailure(o.clone())))
        .collect::<Result<_, _>>()?;
    let order = if objects.len() <= EXACT_OBJECTS {
        exhaustive(&cfg, &masks, exec)
    } else {
        greedy_swaps(&cfg, &masks)
    };
    let cost = path_cost(&order, &cfg);
    Ok((order.into_iter().map(|i| objects[i].clone()).collect(), cost))
}

fn exhaustive(cfg: &[JointConfig], masks: &[u64], exec: Exec) -> Vec<usize> {
    let n = cfg.len();
    let branches: Vec<(f64, Vec<usize>)> = map_range(exec, n, |first| {
        let mut best = (f64::INFINITY, Vec::new());
        if masks[first] == 0 {
            let mut order = vec![first];
            dfs(cfg, masks, &mut order, 1 << first, 0.0, &mut best);
        }
        best
    });
    let scores: Vec<f64> = branches.iter().map(|b| b.0).collect();
    let k = argmin(&scores).expect("at least one branch");
    branches[k].1.clone()
}

fn dfs(cfg: &[JointConfig], masks: &[u64], order: &mut Vec<usize>, seen: u64, cost: f64, best: &mut (f64, Vec<usize>)) {
    let n = cfg.len();
    if cost >= best.0 {
        return;
    }
    if order.len() == n {
        *best = (cost, order.clone());
        return;
    }
    let last = *order.last().expect("non-empty");
    for j in 0..n {
        if seen & (1 << j) != 0 || masks[j] & !seen != 0 {
            continue;
        }
        order.push(j);
        dfs(cfg, masks, order, seen | (1 << j), cost + joint_distance(&cfg[last], &cfg[j]), best);
        order.pop();
    }
}

/// Best nearest-neighbour order over all feasible starts, then pairwise swaps
/// that keep precedence and reduce cost.
fn greedy_swaps(cfg: &[JointConfig], masks: &[u64]) -> Vec<usize> {
    let n = cfg.len();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for first in (0..n).filter(|&f| masks[f] == 0) {
        let mut order = vec![first];
        let mut seen = 1u64 << first;
        while order.len() < n {
            let last = *order.last().expect("non-empty");
            let scores: Vec<f64> = (0..n)
                .map(|j| {
                    if seen & (1 << j) != 0 || masks[j] & !seen != 0 {
                        f64::NAN
                    } else {
                        joint_distance(&cfg[last], &cfg[j])
                    }
                })
                .collect();
            let j = argmin(&scores).expect("acyclic precedence leaves a candidate");
            order.push(j);
            seen |= 1 << j;
        }
        let c = path_cost(&order, cfg);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, order));
        }
    }
    let (mut cost, mut order) = best.expect("some object has no predecessor");
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..n {
            for j in i + 1..n {
                order.swap(i, j);
                let c = path_cost(&order, cfg);
                if c < cost - 1e-12 && respects(&order, masks) {
                    cost = c;
                    improved = true;
                } else {
                    order.swap(i, j);
                }
            }
        }
    }
    order
}

/// `(supporter, supported)` pairs: `a` rests on `b` when their hulls are
/// within `tol` and `a`'s bottom is no lower than `b`'s top.
pub fn support_pairs(hulls: &BTreeMap<ObjectId, Hull>, tol: f64) -> Vec<(ObjectId, ObjectId)> {
    let mut out = Vec::new();
    for (a, ha) in hulls {
        let ba = ha.aabb();
        for (b, hb) in hulls {
            if a == b {
                continue;
            }
            let bb = hb.aabb();
            if ba.min.z >= bb.max.z - tol && ba.overlaps(&bb, tol) && distance(ha, hb) <= tol {
                out.push((b.clone(), a.clone()));
            }
        }
    }
    out
}

/// Effector pose above an object's bounding box, pointing down.
pub fn grasp_pose(hull: &Hull) -> crate::geometry::Pose {
    let bb = hull.aabb();
    let c = bb.center();
    top_down(Vec3::new(c.x, c.y, bb.max.z + GRASP_OFFSET), 0.0)
}

/// Sequences the direct objects of `g` using place configurations solved
/// from the arm's home configuration.
pub fn order_within_group(
    tree: &ConstraintTree,
    g: &str,
    placement: &Placement,
    arm: &ArmModel,
    supports: &[(ObjectId, ObjectId)],
) -> Result<ObjectSequence, SequenceError> {
    let hulls = placed_hulls(tree, placement)?;
    let objects = tree.direct_objects(g).map_err(|_| SequenceError::UnknownId(g.to_string()))?;
    let configs = place_configs(&objects, &hulls, arm)?;
    let (order, cost) = sequence_objects(&objects, &configs, supports, Exec::default())?;
    Ok(ObjectSequence {
        group: g.to_string(),
        order,
        cost,
    })
}

fn place_configs(
    objects: &[ObjectId],
    hulls: &BTreeMap<ObjectId, Hull>,
    arm: &ArmModel,
) -> Result<BTreeMap<ObjectId, JointConfig>, SequenceError> {
    objects
        .iter()
        .map(|o| {
            let h = hulls.get(o).ok_or_else(|| SequenceError::UnknownId(o.clone()))?;
            let q = ik(arm, &grasp_pose(h), &arm.home).map_err(|_| SequenceError::IkFailure(o.clone()))?;
            Ok((o.clone(), q))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub object: ObjectId,
    pub group: GroupId,
    pub pick_config: JointConfig,
    pub place_config: JointConfig,
    /// Index into [`AssemblyPlan::trajectories`]: home or previous place
    /// configuration, through the pick, to the place configuration.
    pub trajectory: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyPlan {
    pub tour: GroupTour,
    pub sequences: Vec<ObjectSequence>,
    pub steps: Vec<PlanStep>,
    pub trajectories: Vec<Vec<JointConfig>>,
    /// Translation applied to each object's placed pose to stage it.
    pub staging: BTreeMap<ObjectId, [f64; 3]>,
}

impl AssemblyPlan {
    fn empty() -> Self {
        Self {
            tour: GroupTour {
                order: Vec::new(),
                length: 0.0,
            },
            sequences: Vec::new(),
            steps: Vec::new(),
            trajectories: Vec::new(),
            staging: BTreeMap::new(),
        }
    }
}

/// Offsets that move each object, in order, from its placed pose to a slot on
/// a staging line beyond the table's −y edge; rows wrap along x.
pub fn staging_offsets(order: &[ObjectId], hulls: &BTreeMap<ObjectId, Hull>, ws: &Workspace) -> BTreeMap<ObjectId, Vec3> {
    let mut out = BTreeMap::new();
    let x0 = ws.table_min[0];
    let mut x = x0;
    let mut row_y = ws.table_min[1] - STAGING_GAP;
    let mut row_depth: f64 = 0.0;
    for o in order {
        let bb = hulls[o].aabb();
        let ext = bb.extent();
        if x > x0 && x + ext.x > ws.table_max[0] {
            x = x0;
            row_y -= row_depth + STAGING_GAP;
            row_depth = 0.0;
        }
        let target = Vec3::new(x + ext.x / 2.0, row_y - ext.y / 2.0, ws.table_z + ext.z / 2.0);
        out.insert(o.clone(), target - bb.center());
        x += ext.x + STAGING_GAP;
        row_depth = row_depth.max(ext.y);
    }
    out
}

/// Centroid of each group's objects (its whole subtree).
pub fn group_centroids(tree: &ConstraintTree, hulls: &BTreeMap<ObjectId, Hull>) -> BTreeMap<GroupId, Vec3> {
    tree.groups
        .keys()
        .map(|g| {
            let cs: Vec<Vec3> = tree
                .subtree_objects(g)
                .expect("known group")
                .iter()
                .map(|o| hulls[o].centroid())
                .collect();
            (g.clone(), centroid(&cs))
        })
        .collect()
}

/// Composes the group tour, per-group sequences, grasp configurations and
/// motion plans. Static `obstacles` and objects placed in earlier steps are
/// avoided by every motion.
pub fn assemble_plan(
    tree: &ConstraintTree,
    placement: &Placement,
    ws: &Workspace,
    arm: &ArmModel,
    obstacles: &[Hull],
    planner: &PlannerOptions,
) -> Result<AssemblyPlan, SequenceError> {
    if tree.groups.is_empty() {
        return Ok(AssemblyPlan::empty());
    }
    let hulls = placed_hulls(tree, placement)?;
    let tour = order_groups(&group_centroids(tree, &hulls), ws.base(), &hierarchy(tree))?;
    let supports = support_pairs(&hulls, 1e-4);
    let mut sequences = Vec::new();
    for g in &tour.order {
        let objects = tree.direct_objects(g).map_err(|_| SequenceError::UnknownId(g.clone()))?;
        let configs = place_configs(&objects, &hulls, arm)?;
        let (order, cost) = sequence_objects(&objects, &configs, &supports, Exec::default())?;
        sequences.push(ObjectSequence {
            group: g.clone(),
            order,
            cost,
        });
    }
    let flat: Vec<(GroupId, ObjectId)> = sequences
        .iter()
        .flat_map(|s| s.order.iter().map(move |o| (s.group.clone(), o.clone())))
        .collect();
    let objects: Vec<ObjectId> = flat.iter().map(|(_, o)| o.clone()).collect();
    let staging = staging_offsets(&objects, &hulls, ws);
    let mut steps = Vec::new();
    let mut trajectories = Vec::new();
    let mut placed: Vec<Hull> = obstacles.to_vec();
    let mut current = arm.home.clone();
    for (k, (g, o)) in flat.into_iter().enumerate() {
        let hull = &hulls[&o];
        let place_pose = grasp_pose(hull);
        let pick_pose = grasp_pose(&hull.translated(&staging[&o]));
        let place = ik(arm, &place_pose, &arm.home).map_err(|_| SequenceError::IkFailure(o.clone()))?;
        let pick = ik(arm, &pick_pose, &arm.home).map_err(|_| SequenceError::IkFailure(o.clone()))?;
        let opts = PlannerOptions {
            seed: planner.seed.wrapping_add(k as u64),
            ..*planner
        };
        let motion = |e| SequenceError::Motion {
            object: o.clone(),
            source: e,
        };
        let mut path = plan_path(arm, &current, &pick, &placed, &opts).map_err(motion)?;
        let carry = plan_path(arm, &pick, &place, &placed, &opts).map_err(motion)?;
        path.extend(carry.into_iter().skip(1));
        trajectories.push(path);
        steps.push(PlanStep {
            object: o.clone(),
            group: g,
            pick_config: pick,
            place_config: place.clone(),
            trajectory: trajectories.len() - 1,
        });
        placed.push(hull.clone());
        current = place;
    }
    Ok(AssemblyPlan {
        tour,
        sequences,
        steps,
        trajectories,
        staging: staging.into_iter().map(|(k, v)| (k, [v.x, v.y, v.z])).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for k in 0..=p.len() {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn siblings(pts: &[Vec3]) -> (BTreeMap<GroupId, Vec3>, Hierarchy) {
        let c: BTreeMap<GroupId, Vec3> = pts.iter().enumerate().map(|(i, p)| (format!("g{i}"), *p)).collect();
        let h = c.keys().map(|k| (k.clone(), None)).collect();
        (c, h)
    }

    #[test]
    fn collinear_siblings() {
        let (c, h) = siblings(&[Vec3::new(3.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)]);
        let t = order_groups(&c, Vec3::zeros(), &h).unwrap();
        assert_eq!(t.order, vec!["g1", "g2", "g0"]);
        assert!((t.length - 3.0).abs() < 1e-12);
    }

    #[test]
    fn child_before_parent() {
        let c = BTreeMap::from([("p".to_string(), Vec3::new(0.1, 0.0, 0.0)), ("c".to_string(), Vec3::new(9.0, 0.0, 0.0))]);
        let h = BTreeMap::from([("p".to_string(), None), ("c".to_string(), Some("p".to_string()))]);
        assert_eq!(order_groups(&c, Vec3::zeros(), &h).unwrap().order, vec!["c", "p"]);
        assert_eq!(order_groups_heuristic(&c, Vec3::zeros(), &h).unwrap().order, vec!["c", "p"]);
    }

    #[test]
    fn exact_matches_brute_force_and_beats_heuristic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let perms = permutations(7);
        for _ in 0..10 {
            let pts: Vec<Vec3> = (0..7).map(|_| Vec3::new(rng.random(), rng.random(), 0.0)).collect();
            let (c, h) = siblings(&pts);
            let exact = order_groups(&c, Vec3::zeros(), &h).unwrap();
            let brute = perms
                .iter()
                .map(|p| open_length(p, &Vec3::zeros(), &pts))
                .fold(f64::INFINITY, f64::min);
            assert!((exact.length - brute).abs() < 1e-9);
            assert!(order_groups_heuristic(&c, Vec3::zeros(), &h).unwrap().length >= exact.length - 1e-12);
        }
    }

    #[test]
    fn repair_is_stable() {
        // 0 requires 2; 1 free; 2 free.
        let masks = [0b100, 0, 0];
        assert_eq!(repair(vec![0, 1, 2], &masks), vec![1, 2, 0]);
        assert_eq!(repair(vec![1, 2, 0], &masks), vec![1, 2, 0]);
    }

    #[test]
    fn within_group_exhaustive_and_precedence() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let names: Vec<ObjectId> = (0..5).map(|i| format!("o{i}")).collect();
        let configs: BTreeMap<ObjectId, JointConfig> = names
            .iter()
            .map(|n| (n.clone(), (0..3).map(|_| rng.random_range(-2.0..2.0)).collect()))
            .collect();
        let (order, cost) = sequence_objects(&names, &configs, &[], Exec::Sequential).unwrap();
        assert_eq!(order.len(), 5);
        let brute = permutations(5)
            .into_iter()
            .map(|p| {
                p.windows(2)
                    .map(|w| joint_distance(&configs[&names[w[0]]], &configs[&names[w[1]]]))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((cost - brute).abs() < 1e-9);
        let sup = vec![("o3".to_string(), "o1".to_string())];
        let (order, _) = sequence_objects(&names, &configs, &sup, Exec::Parallel).unwrap();
        let pos = |x: &str| order.iter().position(|o| o == x).unwrap();
        assert!(pos("o3") < pos("o1"));
        let cyc = vec![("o1".into(), "o2".into()), ("o2".into(), "o1".into())];
        assert_eq!(
            sequence_objects(&names, &configs, &cyc, Exec::Sequential),
            Err(SequenceError::CyclicPrecedence)
        );
    }

    #[test]
    fn greedy_respects_precedence() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let names: Vec<ObjectId> = (0..11).map(|i| format!("o{i:02}")).collect();
        let configs: BTreeMap<ObjectId, JointConfig> = names
            .iter()
            .map(|n| (n.clone(), (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()))
            .collect();
        let sup: Vec<(ObjectId, ObjectId)> = vec![("o05".into(), "o00".into()), ("o00".into(), "o09".into())];
        let (order, _) = sequence_objects(&names, &configs, &sup, Exec::Sequential).unwrap();
        let pos = |x: &str| order.iter().position(|o| o == x).unwrap();
        assert!(pos("o05") < pos("o00") && pos("o00") < pos("o09"));
    }

    #[test]
    fn single_object_costs_nothing() {
        let configs = BTreeMap::from([("a".to_string(), vec![0.5, 0.5])]);
        assert_eq!(
            sequence_objects(&["a".to_string()], &configs, &[], Exec::Sequential).unwrap(),
            (vec!["a".to_string()], 0.0)
        );
    }
}
