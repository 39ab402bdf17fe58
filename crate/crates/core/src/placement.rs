//! World-pose resolution for exported constraint trees, and static settling.
//!
//! Groups move as rigid units. A unit is headed by a root or relative group
//! and holds that group's direct objects plus those of its absolute
//! descendants (down to the next relative group). Units headed by an absolute
//! root never move.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::{collide, distance, penetration_depth};
use crate::geometry::{centroid, yaw_rotation, Mesh, Pose, Vec3};
use crate::hull::{convex_hull, pad_points, Hull, HullError, HullOptions};
use crate::par::{argmin, map_slice, Exec};
use crate::tree::{ChildRef, ConstraintTree, GroupId, Mode, ObjectId, SpecDocument, TreeError};

pub const W_COLLISION: f64 = 1e3;
pub const W_REACH: f64 = 1e2;
pub const W_GAP: f64 = 1e2;
pub const W_PARENT: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub table_z: f64,
    /// Table rectangle corners `[x, y]`.
    pub table_min: [f64; 2],
    pub table_max: [f64; 2],
    pub arm_base: [f64; 3],
    pub reach: f64,
    /// Optional inner radius of the reachable annulus.
    #[serde(default)]
    pub reach_min: f64,
}

impl Workspace {
    pub fn validate(&self) -> Result<(), PlacementError> {
        let bad = |m: &str| Err(PlacementError::InvalidWorkspace(m.into()));
        if !(self.reach > 0.0) {
            return bad("reach must be positive");
        }
        if !(self.reach_min >= 0.0 && self.reach_min < self.reach) {
            return bad("reach_min must lie in [0, reach)");
        }
        if !(self.table_min[0] < self.table_max[0] && self.table_min[1] < self.table_max[1]) {
            return bad("table extent is degenerate");
        }
        Ok(())
    }

    pub fn base(&self) -> Vec3 {
        Vec3::from(self.arm_base)
    }

    /// Squared distance outside the reachable annulus.
    fn reach_violation(&self, p: &Vec3) -> f64 {
        let r = (p - self.base()).norm();
        let v = (r - self.reach).max(0.0) + (self.reach_min - r).max(0.0);
        v * v
    }

    /// How far `p` lies outside the table rectangle in the xy plane.
    fn off_table(&self, p: &Vec3) -> f64 {
        let dx = (self.table_min[0] - p.x).max(p.x - self.table_max[0]).max(0.0);
        let dy = (self.table_min[1] - p.y).max(p.y - self.table_max[1]).max(0.0);
        dx.hypot(dy)
    }
}

/// World pose of every group and object.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Placement {
    pub poses: BTreeMap<String, Pose>,
}

impl Placement {
    /// Authored world poses of every node in `tree`.
    pub fn authored(tree: &ConstraintTree) -> Placement {
        let mut poses = BTreeMap::new();
        for id in tree.groups.keys().chain(tree.objects.keys()) {
            poses.insert(id.clone(), tree.world_pose(id).expect("known id"));
        }
        Placement { poses }
    }

    /// Copy of `tree` whose local poses reproduce this placement.
    pub fn apply_to(&self, tree: &ConstraintTree) -> ConstraintTree {
        let mut out = tree.clone();
        let local = |id: &str, parent: Option<&GroupId>| {
            let w = self.poses[id];
            match parent {
                Some(p) => self.poses[p].inverse().compose(&w),
                None => w,
            }
        };
        for (id, g) in out.groups.iter_mut() {
            if self.poses.contains_key(id) {
                g.pose = local(id, g.parent.as_ref());
            }
        }
        for (id, o) in out.objects.iter_mut() {
            if self.poses.contains_key(id) {
                o.pose = local(id, o.parent.as_ref());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlacementError {
    #[error("no feasible placement for group `{0}`")]
    Infeasible(GroupId),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("invalid workspace: {0}")]
    InvalidWorkspace(String),
    #[error("settling did not converge (max penetration {max_penetration:.3e}, {} unsupported)", unsupported.len())]
    NoConvergence {
        best: Box<Placement>,
        max_penetration: f64,
        unsupported: Vec<GroupId>,
    },
    #[error(transparent)]
    Hull(#[from] HullError),
}

impl From<TreeError> for PlacementError {
    fn from(e: TreeError) -> Self {
        PlacementError::InvalidSpec(e.to_string())
    }
}

/// A set of objects that moves as one rigid body.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub head: GroupId,
    pub objects: Vec<ObjectId>,
    pub fixed: bool,
    /// Unit containing the head's parent group.
    pub parent: Option<usize>,
}

/// Rigid units in root-down order.
pub fn rigid_units(tree: &ConstraintTree) -> Vec<Unit> {
    let mut units = Vec::new();
    let mut stack: Vec<(GroupId, Option<usize>)> = tree.roots.iter().rev().map(|r| (r.clone(), None)).collect();
    while let Some((head, parent)) = stack.pop() {
        let idx = units.len();
        let mut objects = Vec::new();
        let mut heads = Vec::new();
        let mut inner = vec![head.clone()];
        while let Some(g) = inner.pop() {
            for c in &tree.groups[&g].children {
                match c {
                    ChildRef::Object(o) => objects.push(o.clone()),
                    ChildRef::Group(cg) if tree.groups[cg].mode == Mode::Absolute => inner.push(cg.clone()),
                    ChildRef::Group(cg) => heads.push(cg.clone()),
                }
            }
        }
        objects.sort();
        let node = &tree.groups[&head];
        units.push(Unit {
            fixed: node.parent.is_none() && node.mode == Mode::Absolute,
            head,
            objects,
            parent,
        });
        for h in heads.into_iter().rev() {
            stack.push((h, Some(idx)));
        }
    }
    units
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementOptions {
    pub candidates: usize,
    pub restarts: usize,
    /// Minimum gap kept between a newly placed unit and everything else.
    pub clearance: f64,
    pub settle_rounds: usize,
    pub settle_tol: f64,
    pub contact_slack: f64,
    pub exec: Exec,
}

impl Default for PlacementOptions {
    fn default() -> Self {
        Self {
            candidates: 64,
            restarts: 8,
            clearance: 1e-3,
            settle_rounds: 200,
            settle_tol: 1e-4,
            contact_slack: 1e-6,
            exec: Exec::default(),
        }
    }
}

/// Padded hull of every object at its authored world pose.
fn authored_hulls(tree: &ConstraintTree) -> Result<BTreeMap<ObjectId, Hull>, PlacementError> {
    let opts = HullOptions::default();
    let mut out = BTreeMap::new();
    for (id, obj) in &tree.objects {
        let pose = tree.world_pose(id)?;
        let pts: Vec<Vec3> = obj.mesh.points().map(|v| pose.transform_point(&v)).collect();
        out.insert(id.clone(), convex_hull(&pad_points(&pts, obj.padding)?, &opts)?.with_owner(id));
    }
    Ok(out)
}

/// Scene state: current world poses plus hull bookkeeping.
struct Scene<'a> {
    tree: &'a ConstraintTree,
    ws: &'a Workspace,
    opts: PlacementOptions,
    units: Vec<Unit>,
    authored: BTreeMap<ObjectId, (Pose, Hull)>,
    world: BTreeMap<String, Pose>,
    obstacles: &'a [Hull],
}

impl<'a> Scene<'a> {
    fn new(
        tree: &'a ConstraintTree,
        ws: &'a Workspace,
        start: &Placement,
        obstacles: &'a [Hull],
        opts: PlacementOptions,
    ) -> Result<Self, PlacementError> {
        ws.validate()?;
        let units = rigid_units(tree);
        let hulls = authored_hulls(tree)?;
        let authored = hulls
            .into_iter()
            .map(|(id, h)| {
                let p = tree.world_pose(&id).expect("known");
                (id, (p, h))
            })
            .collect();
        let mut world = Placement::authored(tree).poses;
        for (k, v) in &start.poses {
            if let Some(w) = world.get_mut(k) {
                *w = *v;
            }
        }
        Ok(Self {
            tree,
            ws,
            opts,
            units,
            authored,
            world,
            obstacles,
        })
    }

    fn hull(&self, o: &str) -> Hull {
        let (p0, h) = &self.authored[o];
        h.transformed(&self.world[o].compose(&p0.inverse()))
    }

    fn unit_hulls(&self, u: usize) -> Vec<Hull> {
        self.units[u].objects.iter().map(|o| self.hull(o)).collect()
    }

    /// Every node moved by transforming unit `u`'s head.
    fn moved_nodes(&self, u: usize) -> Vec<String> {
        let head = &self.units[u].head;
        let mut out = self.tree.subtree_groups(head).expect("known");
        out.extend(self.tree.subtree_objects(head).expect("known"));
        out
    }

    fn apply(&mut self, u: usize, t: &Pose) {
        for id in self.moved_nodes(u) {
            let w = self.world.get_mut(&id).expect("known");
            *w = t.compose(w);
        }
    }

    fn placement(&self) -> Placement {
        Placement {
            poses: self.world.clone(),
        }
    }

    /// Reference point the unit is drawn towards: its parent unit's centroid.
    fn parent_anchor(&self, u: usize) -> Option<Vec3> {
        let p = self.units[u].parent?;
        if self.units[p].objects.is_empty() {
            return Some(self.world[&self.units[p].head].translation);
        }
        let cs: Vec<Vec3> = self.unit_hulls(p).iter().map(Hull::centroid).collect();
        Some(centroid(&cs))
    }
}

/// Halton radical inverse in `base`.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Objective terms for one candidate placement of a unit.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Score {
    collision: f64,
    reach: f64,
    gap: f64,
    parent: f64,
}

impl Score {
    fn total(&self) -> f64 {
        W_COLLISION * self.collision + W_REACH * self.reach + W_GAP * self.gap + W_PARENT * self.parent
    }

    fn feasible(&self) -> bool {
        self.collision == 0.0 && self.reach <= 1e-12 && self.gap <= 1e-12
    }
}

struct UnitProblem<'s> {
    hulls: Vec<Hull>,
    pivot: Vec3,
    lift: f64,
    obstacles: Vec<&'s Hull>,
    anchor: Option<Vec3>,
    ws: &'s Workspace,
    clearance: f64,
}

impl UnitProblem<'_> {
    /// World transform for table position `(x, y)` and yaw.
    fn transform(&self, x: f64, y: f64, yaw: f64) -> Pose {
        let rot = yaw_rotation(yaw);
        let t = Vec3::new(x, y, self.pivot.z + self.lift) - rot * self.pivot;
        Pose::from_parts(t, rot)
    }

    fn score(&self, x: [f64; 3]) -> Score {
        let t = self.transform(x[0], x[1], x[2]);
        let moved: Vec<Hull> = self.hulls.iter().map(|h| h.transformed(&t)).collect();
        let mut collision = 0.0;
        for h in &moved {
            let bb = h.aabb();
            for o in &self.obstacles {
                if !bb.overlaps(&o.aabb(), self.clearance) {
                    continue;
                }
                let d = distance(h, o);
                if d >= self.clearance {
                    continue;
                }
                collision += if d > 0.0 {
                    self.clearance - d
                } else {
                    self.clearance + penetration_depth(h, o).map(|p| p.0).unwrap_or(0.0)
                };
            }
        }
        let reach = moved.iter().map(|h| self.ws.reach_violation(&h.centroid())).sum();
        let gap = moved
            .iter()
            .map(|h| {
                let g = h.vertices.iter().map(|v| self.ws.off_table(v)).fold(0.0, f64::max);
                g * g
            })
            .sum();
        let parent = match self.anchor {
            Some(a) => {
                let c = centroid(&moved.iter().map(Hull::centroid).collect::<Vec<_>>());
                (c - a).norm_squared()
            }
            None => 0.0,
        };
        Score {
            collision,
            reach,
            gap,
            parent,
        }
    }
}

/// Places relative groups root-down; absolute roots keep their authored pose.
pub struct PlacementSolver<'a> {
    tree: &'a ConstraintTree,
    ws: &'a Workspace,
    obstacles: &'a [Hull],
    opts: PlacementOptions,
}

impl<'a> PlacementSolver<'a> {
    pub fn new(tree: &'a ConstraintTree, ws: &'a Workspace) -> Self {
        Self {
            tree,
            ws,
            obstacles: &[],
            opts: PlacementOptions::default(),
        }
    }

    /// Static hulls (e.g. ungrouped scene objects) to avoid.
    pub fn with_obstacles(mut self, obstacles: &'a [Hull]) -> Self {
        self.obstacles = obstacles;
        self
    }

    pub fn with_options(mut self, opts: PlacementOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn resolve(&self, seed: u64) -> Result<Placement, PlacementError> {
        let mut scene = Scene::new(self.tree, self.ws, &Placement::default(), self.obstacles, self.opts)?;
        let mut placed = vec![false; scene.units.len()];
        for (i, u) in scene.units.iter().enumerate() {
            placed[i] = u.fixed;
        }
        for u in 0..scene.units.len() {
            if scene.units[u].fixed || scene.units[u].objects.is_empty() {
                placed[u] = true;
                continue;
            }
            let t = self.place_unit(&scene, &placed, u, seed)?;
            scene.apply(u, &t);
            placed[u] = true;
        }
        Ok(scene.placement())
    }

    fn place_unit(&self, scene: &Scene, placed: &[bool], u: usize, seed: u64) -> Result<Pose, PlacementError> {
        let hulls = scene.unit_hulls(u);
        let all: Vec<Vec3> = hulls.iter().flat_map(|h| h.vertices.iter().copied()).collect();
        let pivot = centroid(&all);
        let bottom = all.iter().map(|v| v.z).fold(f64::INFINITY, f64::min);
        let others: Vec<Hull> = (0..scene.units.len())
            .filter(|&k| k != u && placed[k])
            .flat_map(|k| scene.unit_hulls(k))
            .collect();
        let problem = UnitProblem {
            hulls,
            pivot,
            lift: self.ws.table_z - bottom,
            obstacles: others.iter().chain(self.obstacles).collect(),
            anchor: scene.parent_anchor(u),
            ws: self.ws,
            clearance: self.opts.clearance,
        };
        let ws = self.ws;
        let lo = [ws.table_min[0], ws.table_min[1], 0.0];
        let span = [
            ws.table_max[0] - ws.table_min[0],
            ws.table_max[1] - ws.table_min[1],
            std::f64::consts::TAU,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let shift: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let n = self.opts.candidates as u64;
        for restart in 0..self.opts.restarts as u64 {
            let cands: Vec<[f64; 3]> = (restart * n + 1..=(restart + 1) * n)
                .map(|i| {
                    let h = [radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5)];
                    std::array::from_fn(|k| lo[k] + ((h[k] + shift[k]) % 1.0) * span[k])
                })
                .collect();
            let scores: Vec<f64> = map_slice(self.opts.exec, &cands, |c| problem.score(*c).total());
            let best = argmin(&scores).expect("candidates");
            if let Some(x) = refine(&problem, cands[best], span) {
                return Ok(problem.transform(x[0], x[1], x[2]));
            }
        }
        Err(PlacementError::Infeasible(scene.units[u].head.clone()))
    }

    /// Removes residual interpenetration and drops unsupported units.
    pub fn settle(&self, placement: &Placement) -> Result<Placement, PlacementError> {
        let mut scene = Scene::new(self.tree, self.ws, placement, self.obstacles, self.opts)?;
        settle_scene(&mut scene).map_err(|(e, _)| e)?;
        Ok(scene.placement())
    }

    /// Like [`settle`](Self::settle), also returning the per-round maximum
    /// penetration.
    pub fn settle_traced(&self, placement: &Placement) -> (Result<Placement, PlacementError>, Vec<f64>) {
        let mut scene = match Scene::new(self.tree, self.ws, placement, self.obstacles, self.opts) {
            Ok(s) => s,
            Err(e) => return (Err(e), Vec::new()),
        };
        match settle_scene(&mut scene) {
            Ok(trace) => (Ok(scene.placement()), trace),
            Err((e, trace)) => (Err(e), trace),
        }
    }
}

/// Coordinate descent with step halving from `x0`. Returns the best feasible
/// point visited, if any.
fn refine(p: &UnitProblem, x0: [f64; 3], span: [f64; 3]) -> Option<[f64; 3]> {
    let mut x = x0;
    let mut s = p.score(x);
    let mut best_feasible = s.feasible().then_some((s.total(), x));
    let mut step = [span[0] / 8.0, span[1] / 8.0, span[2] / 16.0];
    let mut evals = 0;
    while step.iter().any(|v| *v > 1e-4) && evals < 400 {
        let mut moved = false;
        for k in 0..3 {
            for sign in [1.0, -1.0] {
                let mut c = x;
                c[k] += sign * step[k];
                let cs = p.score(c);
                evals += 1;
                if cs.feasible() && best_feasible.is_none_or(|(b, _)| cs.total() < b) {
                    best_feasible = Some((cs.total(), c));
                }
                if cs.total() < s.total() {
                    x = c;
                    s = cs;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            for v in &mut step {
                *v *= 0.5;
            }
        }
    }
    best_feasible.map(|(_, x)| x)
}

/// Penetration beyond the contact slack between two hulls (0 if apart).
fn excess_penetration(a: &Hull, b: &Hull, slack: f64) -> Option<(f64, Vec3)> {
    if !collide(a, b) {
        return None;
    }
    let (d, n) = penetration_depth(a, b).ok()?;
    (d > slack).then_some((d - slack, n))
}

fn settle_scene(scene: &mut Scene) -> Result<Vec<f64>, (PlacementError, Vec<f64>)> {
    let opts = scene.opts;
    let mut trace = Vec::new();
    let mut best: Option<(f64, usize, Placement)> = None;
    for _ in 0..opts.settle_rounds {
        let pen = max_penetration(scene);
        let unsupported = unsupported_units(scene);
        trace.push(pen);
        if best.as_ref().is_none_or(|(bp, bu, _)| (pen, unsupported.len()) < (*bp, *bu)) {
            best = Some((pen, unsupported.len(), scene.placement()));
        }
        if pen < opts.settle_tol && unsupported.is_empty() {
            return Ok(trace);
        }
        resolve_step(scene, pen);
        for u in unsupported_units(scene) {
            drop_unit(scene, u);
        }
    }
    let pen = max_penetration(scene);
    let unsupported = unsupported_units(scene);
    trace.push(pen);
    if pen < opts.settle_tol && unsupported.is_empty() {
        return Ok(trace);
    }
    let (pen, _, placement) = best.expect("at least one round");
    let names = unsupported.iter().map(|&u| scene.units[u].head.clone()).collect();
    Err((
        PlacementError::NoConvergence {
            best: Box::new(placement),
            max_penetration: pen,
            unsupported: names,
        },
        trace,
    ))
}

/// Pairs of objects in different units (or against static obstacles).
fn contacts(scene: &Scene) -> Vec<(usize, Option<usize>, f64, Vec3)> {
    let slack = scene.opts.contact_slack;
    let objs: Vec<(usize, Hull)> = scene
        .units
        .iter()
        .enumerate()
        .flat_map(|(u, unit)| unit.objects.iter().map(move |o| (u, o)))
        .map(|(u, o)| (u, scene.hull(o)))
        .collect();
    let mut out = Vec::new();
    for i in 0..objs.len() {
        for j in i + 1..objs.len() {
            if objs[i].0 == objs[j].0 {
                continue;
            }
            if let Some((d, n)) = excess_penetration(&objs[i].1, &objs[j].1, slack) {
                out.push((objs[j].0, Some(objs[i].0), d, n));
            }
        }
        for o in scene.obstacles {
            // Moving the object (second argument) out of the obstacle.
            if let Some((d, n)) = excess_penetration(o, &objs[i].1, slack) {
                out.push((objs[i].0, None, d, n));
            }
        }
    }
    out
}

fn max_penetration(scene: &Scene) -> f64 {
    contacts(scene).iter().map(|c| c.2).fold(0.0, f64::max)
}

fn unit_bottom(scene: &Scene, u: usize) -> f64 {
    scene
        .unit_hulls(u)
        .iter()
        .flat_map(|h| h.vertices.iter().map(|v| v.z))
        .fold(f64::INFINITY, f64::min)
}

/// Worst penetration of unit `u` against everything else.
fn unit_penetration(scene: &Scene, u: usize, hulls: &[Hull]) -> f64 {
    let slack = scene.opts.contact_slack;
    let mut worst: f64 = 0.0;
    for (k, unit) in scene.units.iter().enumerate() {
        if k == u {
            continue;
        }
        for o in &unit.objects {
            let other = scene.hull(o);
            for h in hulls {
                if let Some((d, _)) = excess_penetration(&other, h, slack) {
                    worst = worst.max(d);
                }
            }
        }
    }
    for o in scene.obstacles {
        for h in hulls {
            if let Some((d, _)) = excess_penetration(o, h, slack) {
                worst = worst.max(d);
            }
        }
    }
    worst
}

fn lowered(hulls: &[Hull], dz: f64) -> Vec<Hull> {
    let t = Vec3::new(0.0, 0.0, -dz);
    hulls.iter().map(|h| h.translated(&t)).collect()
}

/// A unit is supported when fixed, resting on the table, or blocked from
/// moving down by `settle_tol`.
fn unit_supported(scene: &Scene, u: usize) -> bool {
    if scene.units[u].fixed || scene.units[u].objects.is_empty() {
        return true;
    }
    let tol = scene.opts.settle_tol;
    if unit_bottom(scene, u) <= scene.ws.table_z + tol {
        return true;
    }
    let hulls = scene.unit_hulls(u);
    let now = unit_penetration(scene, u, &hulls);
    unit_penetration(scene, u, &lowered(&hulls, tol)) > now
}

fn unsupported_units(scene: &Scene) -> Vec<usize> {
    (0..scene.units.len()).filter(|&u| !unit_supported(scene, u)).collect()
}

fn translate_unit(scene: &mut Scene, u: usize, t: Vec3) {
    scene.apply(u, &Pose::from_translation(t));
}

/// Half-displacement resolution of every penetrating pair, lifted above the
/// table, scaled back until the maximum penetration does not grow.
fn resolve_step(scene: &mut Scene, current: f64) {
    let mut disp = vec![Vec3::zeros(); scene.units.len()];
    for (b, a, d, n) in contacts(scene) {
        let v = n * d;
        let a_fixed = a.is_none_or(|a| scene.units[a].fixed);
        let b_fixed = scene.units[b].fixed;
        match (a_fixed, b_fixed) {
            (false, false) => {
                disp[b] += v / 2.0;
                disp[a.expect("movable")] -= v / 2.0;
            }
            (true, false) => disp[b] += v,
            (false, true) => disp[a.expect("movable")] -= v,
            (true, true) => {}
        }
    }
    if disp.iter().all(|d| d.norm_squared() == 0.0) {
        return;
    }
    let saved = scene.world.clone();
    let mut scale = 1.0;
    for _ in 0..12 {
        for (u, d) in disp.iter().enumerate() {
            if d.norm_squared() > 0.0 {
                translate_unit(scene, u, d * scale);
                let below = scene.ws.table_z - unit_bottom(scene, u);
                if below > 0.0 {
                    translate_unit(scene, u, Vec3::new(0.0, 0.0, below));
                }
            }
        }
        if max_penetration(scene) <= current {
            return;
        }
        scene.world = saved.clone();
        scale *= 0.5;
    }
}

/// Lowers unit `u` as far as possible towards the table without pushing
/// into anything beyond the contact slack.
fn drop_unit(scene: &mut Scene, u: usize) {
    let hulls = scene.unit_hulls(u);
    if unit_penetration(scene, u, &hulls) > 0.0 {
        return;
    }
    let full = unit_bottom(scene, u) - scene.ws.table_z;
    if full <= 0.0 {
        return;
    }
    let ok = |dz: f64| unit_penetration(scene, u, &lowered(&hulls, dz)) == 0.0;
    let dz = if ok(full) {
        full
    } else {
        let (mut lo, mut hi) = (0.0, full);
        for _ in 0..48 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if dz > 0.0 {
        translate_unit(scene, u, Vec3::new(0.0, 0.0, -dz));
    }
}

pub fn resolve_poses(tree: &ConstraintTree, ws: &Workspace, seed: u64) -> Result<Placement, PlacementError> {
    PlacementSolver::new(tree, ws).resolve(seed)
}

/// Resolves a spec document; `meshes` maps each mesh reference to geometry.
pub fn resolve_spec<F>(spec: &SpecDocument, meshes: F, ws: &Workspace, seed: u64) -> Result<Placement, PlacementError>
where
    F: Fn(&str) -> Option<Mesh>,
{
    let tree = ConstraintTree::from_spec(spec, meshes)?;
    resolve_poses(&tree, ws, seed)
}

pub fn settle(tree: &ConstraintTree, placement: &Placement, ws: &Workspace) -> Result<Placement, PlacementError> {
    PlacementSolver::new(tree, ws).settle(placement)
}

/// World-frame padded hull of every object under `placement`.
pub fn placed_hulls(tree: &ConstraintTree, placement: &Placement) -> Result<BTreeMap<ObjectId, Hull>, PlacementError> {
    let authored = authored_hulls(tree)?;
    Ok(authored
        .into_iter()
        .map(|(id, h)| {
            let p0 = tree.world_pose(&id).expect("known");
            let w = placement.poses.get(&id).copied().unwrap_or(p0);
            let moved = h.transformed(&w.compose(&p0.inverse()));
            (id, moved)
        })
        .collect())
}
