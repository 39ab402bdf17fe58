//! Serial revolute arms: forward/inverse kinematics and joint-space planning.

use nalgebra::{DMatrix, DVector, Quaternion, UnitQuaternion, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::{capsule_distance, Capsule};
use crate::geometry::{Pose, Vec3};
use crate::hull::Hull;

pub type JointConfig = Vec<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("invalid arm model: {0}")]
    InvalidModel(String),
    #[error("joint {joint} value {value} outside its limits")]
    LimitViolation { joint: usize, value: f64 },
    #[error("expected {expected} joint values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("no inverse kinematics solution found")]
    NoSolution,
    #[error("start configuration is in collision")]
    StartInCollision,
    #[error("goal configuration is in collision")]
    GoalInCollision,
    #[error("planner gave up after {0} iterations")]
    Timeout(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    /// Fixed transform from the previous joint frame (or base) to this joint.
    pub offset: Pose,
    pub axis: [f64; 3],
    pub limits: [f64; 2],
}

/// Collision capsule fixed in a chain frame: frame 0 is the base, frame `k`
/// the frame after joint `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkCapsule {
    pub frame: usize,
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub name: String,
    pub base: Pose,
    pub joints: Vec<Joint>,
    pub tool: Pose,
    pub capsules: Vec<LinkCapsule>,
    /// Configuration used as the IK seed and as the start of a plan.
    pub home: JointConfig,
}

fn default_version() -> u32 {
    1
}

fn dh(d: f64, a: f64, alpha: f64) -> Pose {
    Pose::from_parts(
        Vec3::new(a, 0.0, d),
        UnitQuaternion::from_axis_angle(&Vec3::x_axis(), alpha),
    )
}

impl ArmModel {
    pub fn validate(&self) -> Result<(), KinematicsError> {
        let bad = |m: String| Err(KinematicsError::InvalidModel(m));
        if self.joints.len() < 2 {
            return bad("an arm needs at least two joints".into());
        }
        for (i, j) in self.joints.iter().enumerate() {
            if !(j.limits[0] < j.limits[1]) {
                return bad(format!("joint {i}: lower limit must be below upper"));
            }
            if !(Vec3::from(j.axis).norm() > 0.0) {
                return bad(format!("joint {i}: zero axis"));
            }
        }
        for (i, c) in self.capsules.iter().enumerate() {
            if !(c.radius > 0.0) {
                return bad(format!("capsule {i}: radius must be positive"));
            }
            if c.frame > self.joints.len() {
                return bad(format!("capsule {i}: frame {} out of range", c.frame));
            }
        }
        if self.home.len() != self.joints.len() {
            return bad("home configuration has the wrong length".into());
        }
        self.check_limits(&self.home)
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn check_limits(&self, q: &[f64]) -> Result<(), KinematicsError> {
        if q.len() != self.dof() {
            return Err(KinematicsError::WrongLength {
                expected: self.dof(),
                got: q.len(),
            });
        }
        for (i, (v, j)) in q.iter().zip(&self.joints).enumerate() {
            if !(*v >= j.limits[0] && *v <= j.limits[1]) {
                return Err(KinematicsError::LimitViolation { joint: i, value: *v });
            }
        }
        Ok(())
    }

    fn clamp(&self, q: &mut [f64]) {
        for (v, j) in q.iter_mut().zip(&self.joints) {
            *v = v.clamp(j.limits[0], j.limits[1]);
        }
    }

    /// Frames 0..=n (base, then after each joint), without limit checks.
    pub fn frames(&self, q: &[f64]) -> Vec<Pose> {
        let mut out = Vec::with_capacity(q.len() + 1);
        let mut t = self.base;
        out.push(t);
        for (j, &v) in self.joints.iter().zip(q) {
            let axis = nalgebra::Unit::new_normalize(Vec3::from(j.axis));
            t = t
                .compose(&j.offset)
                .compose(&Pose::from_parts(Vec3::zeros(), UnitQuaternion::from_axis_angle(&axis, v)));
            out.push(t);
        }
        out
    }

    /// World-frame capsules at configuration `q`.
    pub fn capsules_at(&self, q: &[f64]) -> Vec<Capsule> {
        let frames = self.frames(q);
        self.capsules
            .iter()
            .map(|c| {
                let f = &frames[c.frame];
                Capsule::new(
                    f.transform_point(&Vec3::from(c.a)),
                    f.transform_point(&Vec3::from(c.b)),
                    c.radius,
                )
            })
            .collect()
    }

    /// Upper bound on the distance from the base to the tool point.
    pub fn reach(&self) -> f64 {
        self.joints.iter().skip(1).map(|j| j.offset.translation.norm()).sum::<f64>()
            + self.tool.translation.norm()
    }

    /// Per joint, an upper bound on how far any capsule point lies from the
    /// joint origin. Rotating joint `i` by `dq` moves capsules at most
    /// `radius_i · |dq|`.
    fn lever_arms(&self) -> Vec<f64> {
        let n = self.dof();
        let ext = self
            .capsules
            .iter()
            .map(|c| Vec3::from(c.a).norm().max(Vec3::from(c.b).norm()))
            .fold(0.0, f64::max);
        (0..n)
            .map(|i| self.joints[i + 1..].iter().map(|j| j.offset.translation.norm()).sum::<f64>() + ext)
            .collect()
    }

    /// Six-joint arm with UR5 link dimensions (standard DH parameters).
    pub fn ur5() -> ArmModel {
        use std::f64::consts::{FRAC_PI_2, PI};
        let params = [
            (0.089159, 0.0, FRAC_PI_2),
            (0.0, -0.425, 0.0),
            (0.0, -0.39225, 0.0),
            (0.10915, 0.0, FRAC_PI_2),
            (0.09465, 0.0, -FRAC_PI_2),
            (0.0823, 0.0, 0.0),
        ];
        let mut joints = Vec::new();
        let mut prev = Pose::identity();
        for &(d, a, alpha) in &params {
            joints.push(Joint {
                offset: prev,
                axis: [0.0, 0.0, 1.0],
                limits: [-PI, PI],
            });
            prev = dh(d, a, alpha);
        }
        let tool = prev.compose(&Pose::from_translation(Vec3::new(0.0, 0.0, 0.1)));
        let mut capsules = Vec::new();
        for k in 1..=6 {
            let next = if k < 6 { joints[k].offset } else { tool };
            let t = next.translation;
            let radius = match k {
                1..=3 => 0.045,
                4 | 5 => 0.035,
                _ => 0.015,
            };
            if t.norm() > 0.0 {
                capsules.push(LinkCapsule {
                    frame: k,
                    a: [0.0; 3],
                    b: [t.x, t.y, t.z],
                    radius,
                });
            }
        }
        ArmModel {
            format_version: 1,
            name: "ur5".into(),
            base: Pose::identity(),
            joints,
            tool,
            capsules,
            home: vec![0.0, -FRAC_PI_2, FRAC_PI_2, -FRAC_PI_2, -FRAC_PI_2, 0.0],
        }
    }

    /// Planar arm with two unit links rotating about +z.
    pub fn planar2() -> ArmModel {
        use std::f64::consts::PI;
        let joint = |x: f64| Joint {
            offset: Pose::from_translation(Vec3::new(x, 0.0, 0.0)),
            axis: [0.0, 0.0, 1.0],
            limits: [-PI, PI],
        };
        ArmModel {
            format_version: 1,
            name: "planar2".into(),
            base: Pose::identity(),
            joints: vec![joint(0.0), joint(1.0)],
            tool: Pose::from_translation(Vec3::new(1.0, 0.0, 0.0)),
            capsules: vec![
                LinkCapsule {
                    frame: 1,
                    a: [0.0; 3],
                    b: [1.0, 0.0, 0.0],
                    radius: 0.05,
                },
                LinkCapsule {
                    frame: 2,
                    a: [0.0; 3],
                    b: [1.0, 0.0, 0.0],
                    radius: 0.05,
                },
            ],
            home: vec![0.0, 0.0],
        }
    }

    pub fn builtin(name: &str) -> Option<ArmModel> {
        match name {
            "ur5" => Some(Self::ur5()),
            "planar2" => Some(Self::planar2()),
            _ => None,
        }
    }
}

/// End-effector pose: ordered product of base, joint and tool transforms.
pub fn fk(arm: &ArmModel, q: &[f64]) -> Result<Pose, KinematicsError> {
    arm.check_limits(q)?;
    Ok(fk_unchecked(arm, q))
}

fn fk_unchecked(arm: &ArmModel, q: &[f64]) -> Pose {
    arm.frames(q).last().expect("base frame").compose(&arm.tool)
}

/// Position and orientation error (world frame) from `current` to `target`.
fn pose_error(current: &Pose, target: &Pose) -> Vector6<f64> {
    let dp = target.translation - current.translation;
    let dr = (target.rotation * current.rotation.inverse()).scaled_axis();
    Vector6::new(dp.x, dp.y, dp.z, dr.x, dr.y, dr.z)
}

fn jacobian(arm: &ArmModel, q: &[f64]) -> DMatrix<f64> {
    let frames = arm.frames(q);
    let eff = frames.last().expect("base").compose(&arm.tool).translation;
    let mut jac = DMatrix::zeros(6, q.len());
    for (i, j) in arm.joints.iter().enumerate() {
        // Joint i rotates about its axis in frame `frames[i] · offset`.
        let f = frames[i].compose(&j.offset);
        let z = f.transform_vector(&Vec3::from(j.axis).normalize());
        let lin = z.cross(&(eff - f.translation));
        for k in 0..3 {
            jac[(k, i)] = lin[k];
            jac[(k + 3, i)] = z[k];
        }
    }
    jac
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkOptions {
    pub position_tol: f64,
    pub angle_tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub damping: f64,
}

impl Default for IkOptions {
    fn default() -> Self {
        Self {
            position_tol: 1e-5,
            angle_tol: 1e-4,
            max_iters: 300,
            restarts: 32,
            damping: 0.05,
        }
    }
}

const BASE_SWEEP: usize = 8;

/// Damped least-squares IK from `seed`; restarts from deterministic
/// perturbations of the seed when an attempt stalls.
pub fn ik(arm: &ArmModel, target: &Pose, seed: &[f64]) -> Result<JointConfig, KinematicsError> {
    ik_with(arm, target, seed, &IkOptions::default())
}

pub fn ik_with(arm: &ArmModel, target: &Pose, seed: &[f64], opts: &IkOptions) -> Result<JointConfig, KinematicsError> {
    arm.check_limits(seed)?;
    if (target.translation - arm.base.translation).norm() > arm.reach() * (1.0 + 1e-9) {
        return Err(KinematicsError::NoSolution);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1c0ffee);
    for attempt in 0..=opts.restarts {
        let mut q: Vec<f64> = seed.to_vec();
        if attempt > 0 && attempt < BASE_SWEEP && !q.is_empty() {
            // Swing the first joint around before perturbing everything.
            let j = &arm.joints[0];
            let width = j.limits[1] - j.limits[0];
            q[0] = j.limits[0] + (q[0] - j.limits[0] + width * attempt as f64 / BASE_SWEEP as f64).rem_euclid(width);
        } else if attempt > 0 {
            let spread = (attempt as f64 / opts.restarts as f64).min(1.0);
            for (v, j) in q.iter_mut().zip(&arm.joints) {
                let width = j.limits[1] - j.limits[0];
                *v += rng.random_range(-0.5..0.5) * width * spread;
            }
            arm.clamp(&mut q);
        }
        if let Some(sol) = dls(arm, target, q, opts) {
            return Ok(sol);
        }
    }
    Err(KinematicsError::NoSolution)
}

fn converged(e: &Vector6<f64>, opts: &IkOptions) -> bool {
    e.fixed_rows::<3>(0).norm() <= opts.position_tol && e.fixed_rows::<3>(3).norm() <= opts.angle_tol
}

/// Damped least squares with adaptive damping: shrink after a successful
/// step, grow after a rejected one.
fn dls(arm: &ArmModel, target: &Pose, mut q: Vec<f64>, opts: &IkOptions) -> Option<JointConfig> {
    let n = q.len();
    let mut e = pose_error(&fk_unchecked(arm, &q), target);
    let mut lambda = opts.damping;
    let mut jac = jacobian(arm, &q);
    for _ in 0..opts.max_iters {
        if converged(&e, opts) {
            return Some(q);
        }
        let err = DVector::from_column_slice(e.as_slice());
        let jjt = &jac * jac.transpose() + DMatrix::identity(6, 6) * (lambda * lambda);
        let step = jac.transpose() * jjt.lu().solve(&err)?;
        let mut cand: Vec<f64> = (0..n).map(|i| q[i] + step[i]).collect();
        arm.clamp(&mut cand);
        let ce = pose_error(&fk_unchecked(arm, &cand), target);
        if ce.norm() < e.norm() {
            q = cand;
            e = ce;
            jac = jacobian(arm, &q);
            lambda = (lambda * 0.5).max(1e-6);
        } else {
            lambda *= 4.0;
            if lambda > 1e3 {
                break;
            }
        }
    }
    converged(&e, opts).then_some(q)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerOptions {
    pub seed: u64,
    /// Interpolation resolution for collision checks (radians).
    pub resolution: f64,
    /// Maximum tree extension per step (radians, max-norm).
    pub step: f64,
    pub max_iters: usize,
    pub shortcut_rounds: usize,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            resolution: 0.05,
            step: 0.4,
            max_iters: 5000,
            shortcut_rounds: 60,
        }
    }
}

/// Collision checker for the arm against a fixed set of hulls.
pub struct CollisionWorld<'a> {
    arm: &'a ArmModel,
    obstacles: &'a [Hull],
    levers: Vec<f64>,
}

impl<'a> CollisionWorld<'a> {
    pub fn new(arm: &'a ArmModel, obstacles: &'a [Hull]) -> Self {
        Self {
            arm,
            obstacles,
            levers: arm.lever_arms(),
        }
    }

    /// Smallest capsule-to-hull distance (infinite without obstacles).
    pub fn clearance(&self, q: &[f64]) -> f64 {
        let caps = self.arm.capsules_at(q);
        let mut best = f64::INFINITY;
        for h in self.obstacles {
            let (c, r) = (h.centroid(), h.radius());
            for cap in &caps {
                // Cheap lower bound first.
                let seg = distance_point_segment(&c, &cap.segment.a, &cap.segment.b) - r - cap.radius;
                if seg >= best {
                    continue;
                }
                best = best.min(capsule_distance(cap, h));
                if best <= 0.0 {
                    return 0.0;
                }
            }
        }
        best
    }

    pub fn state_free(&self, q: &[f64]) -> bool {
        self.clearance(q) > 0.0
    }

    fn motion_bound(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(&self.levers).map(|((x, y), r)| (x - y).abs() * r).sum()
    }

    /// Certifies the straight joint-space segment `a → b`. Samples are at most
    /// `resolution` apart; between samples the clearance must exceed the
    /// largest possible capsule displacement, which makes the check valid at
    /// any finer resolution.
    pub fn segment_free(&self, a: &[f64], b: &[f64], resolution: f64) -> bool {
        let span = max_abs_diff(a, b);
        let n = ((span / resolution).ceil() as usize).max(1);
        let mut prev: Vec<f64> = a.to_vec();
        let mut c_prev = self.clearance(&prev);
        if c_prev <= 0.0 {
            return false;
        }
        for k in 1..=n {
            let next = lerp(a, b, k as f64 / n as f64);
            let c_next = self.clearance(&next);
            if c_next <= 0.0 || !self.certify(&prev, c_prev, &next, c_next, 0) {
                return false;
            }
            prev = next;
            c_prev = c_next;
        }
        true
    }

    fn certify(&self, a: &[f64], ca: f64, b: &[f64], cb: f64, depth: usize) -> bool {
        let bound = self.motion_bound(a, b);
        if ca.max(cb) > bound {
            return true;
        }
        if depth >= 24 {
            return false;
        }
        let mid = lerp(a, b, 0.5);
        let cm = self.clearance(&mid);
        cm > 0.0 && self.certify(a, ca, &mid, cm, depth + 1) && self.certify(&mid, cm, b, cb, depth + 1)
    }
}

fn distance_point_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((p - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (a + ab * t - p).norm()
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + (y - x) * t).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Joint-space path from `start` to `goal` avoiding `obstacles`, found by a
/// seeded bidirectional RRT and shortened by random shortcuts.
pub fn plan_path(
    arm: &ArmModel,
    start: &[f64],
    goal: &[f64],
    obstacles: &[Hull],
    opts: &PlannerOptions,
) -> Result<Vec<JointConfig>, KinematicsError> {
    arm.check_limits(start)?;
    arm.check_limits(goal)?;
    let world = CollisionWorld::new(arm, obstacles);
    if !world.state_free(start) {
        return Err(KinematicsError::StartInCollision);
    }
    if !world.state_free(goal) {
        return Err(KinematicsError::GoalInCollision);
    }
    if start == goal {
        return Ok(vec![start.to_vec()]);
    }
    if world.segment_free(start, goal, opts.resolution) {
        return Ok(vec![start.to_vec(), goal.to_vec()]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut trees = [Tree::new(start.to_vec()), Tree::new(goal.to_vec())];
    let mut path = None;
    for _ in 0..opts.max_iters {
        let sample: Vec<f64> = arm.joints.iter().map(|j| rng.random_range(j.limits[0]..=j.limits[1])).collect();
        let [a, b] = &mut trees;
        if let Some(new) = a.extend(&world, &sample, opts) {
            let target = a.nodes[new].clone();
            if let Some(reached) = b.connect(&world, &target, opts) {
                path = Some(if trees[0].nodes[0] == start {
                    join(&trees[0], new, &trees[1], reached)
                } else {
                    join(&trees[1], reached, &trees[0], new)
                });
                break;
            }
        }
        trees.swap(0, 1);
    }
    let path = path.ok_or(KinematicsError::Timeout(opts.max_iters))?;
    Ok(shortcut(&world, path, &mut rng, opts))
}

struct Tree {
    nodes: Vec<JointConfig>,
    parent: Vec<usize>,
}

impl Tree {
    fn new(root: JointConfig) -> Self {
        Self {
            nodes: vec![root],
            parent: vec![usize::MAX],
        }
    }

    fn nearest(&self, q: &[f64]) -> usize {
        let d: Vec<f64> = self.nodes.iter().map(|n| dist2(n, q)).collect();
        crate::par::argmin(&d).expect("non-empty tree")
    }

    fn steer(from: &[f64], to: &[f64], step: f64) -> Vec<f64> {
        let span = max_abs_diff(from, to);
        if span <= step {
            to.to_vec()
        } else {
            lerp(from, to, step / span)
        }
    }

    fn extend(&mut self, world: &CollisionWorld, q: &[f64], opts: &PlannerOptions) -> Option<usize> {
        let near = self.nearest(q);
        let new = Self::steer(&self.nodes[near], q, opts.step);
        if !world.segment_free(&self.nodes[near], &new, opts.resolution) {
            return None;
        }
        self.nodes.push(new);
        self.parent.push(near);
        Some(self.nodes.len() - 1)
    }

    /// Extends repeatedly towards `q`; returns the node equal to `q` if reached.
    fn connect(&mut self, world: &CollisionWorld, q: &[f64], opts: &PlannerOptions) -> Option<usize> {
        loop {
            let idx = self.extend(world, q, opts)?;
            if self.nodes[idx] == q {
                return Some(idx);
            }
        }
    }

    fn branch(&self, mut i: usize) -> Vec<JointConfig> {
        let mut out = Vec::new();
        while i != usize::MAX {
            out.push(self.nodes[i].clone());
            i = self.parent[i];
        }
        out
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Path root(start) → ia, then ib → root(goal). `ia` and `ib` hold the same
/// configuration.
fn join(start_tree: &Tree, ia: usize, goal_tree: &Tree, ib: usize) -> Vec<JointConfig> {
    let mut path = start_tree.branch(ia);
    path.reverse();
    path.extend(goal_tree.branch(ib).into_iter().skip(1));
    path
}

fn shortcut(world: &CollisionWorld, mut path: Vec<JointConfig>, rng: &mut ChaCha8Rng, opts: &PlannerOptions) -> Vec<JointConfig> {
    for _ in 0..opts.shortcut_rounds {
        if path.len() <= 2 {
            break;
        }
        let i = rng.random_range(0..path.len() - 2);
        let j = rng.random_range(i + 2..path.len());
        if world.segment_free(&path[i], &path[j], opts.resolution) {
            path.drain(i + 1..j);
        }
    }
    path
}

/// Joint-space length of a waypoint path (sum of L2 segment lengths).
pub fn path_length(path: &[JointConfig]) -> f64 {
    path.windows(2).map(|w| dist2(&w[0], &w[1]).sqrt()).sum()
}

/// Effector pose pointing straight down (tool z = world −z) at `p`, rotated
/// by `yaw` about the vertical.
pub fn top_down(p: Vec3, yaw: f64) -> Pose {
    let down = UnitQuaternion::from_quaternion(Quaternion::new(0.0, 1.0, 0.0, 0.0));
    Pose::from_parts(p, UnitQuaternion::from_axis_angle(&Vec3::z_axis(), yaw) * down)
}
