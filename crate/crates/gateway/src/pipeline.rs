//! Planning stages over scene + spec documents.

use std::collections::BTreeSet;
use std::path::Path;

use hierasm_core::hull::group_hulls;
use hierasm_core::kinematics::{ArmModel, PlannerOptions};
use hierasm_core::placement::{placed_hulls, Placement, PlacementSolver};
use hierasm_core::sequence::{
    assemble_plan, group_centroids, hierarchy, order_groups, order_within_group, support_pairs, GroupTour, ObjectSequence,
};
use hierasm_core::{ConstraintTree, Hull, HullOptions, SpecDocument};

use crate::error::GatewayError;
use crate::formats::{check_version, PlanFile, SceneFile, FORMAT_VERSION};

/// Shared knobs from the command line or request.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Settings {
    pub seed: u64,
    pub cell_size: Option<f64>,
}

impl Settings {
    fn hull_options(&self) -> HullOptions {
        HullOptions {
            cell_size: self.cell_size,
            ..HullOptions::default()
        }
    }
}

/// A scene and spec resolved into a frozen tree, static obstacles and arm.
pub struct Problem {
    pub scene: SceneFile,
    pub tree: ConstraintTree,
    pub obstacles: Vec<Hull>,
    pub arm: ArmModel,
}

impl Problem {
    pub fn new(scene: SceneFile, spec: &SpecDocument, arm_dir: Option<&Path>) -> Result<Self, GatewayError> {
        scene.validate()?;
        check_version(spec.format_version)?;
        let tree = ConstraintTree::from_spec(spec, |r| scene.object(r).map(|o| o.mesh()))?;
        let used: BTreeSet<String> = tree.objects.keys().cloned().collect();
        let obstacles = scene.static_obstacles(&used)?;
        let arm = scene.load_arm(arm_dir)?;
        Ok(Self {
            scene,
            tree,
            obstacles,
            arm,
        })
    }

    fn solver(&self) -> PlacementSolver<'_> {
        PlacementSolver::new(&self.tree, &self.scene.workspace).with_obstacles(&self.obstacles)
    }

    /// Group hulls for the spec as authored.
    pub fn hulls(&self, settings: &Settings) -> Result<Vec<Hull>, GatewayError> {
        Ok(group_hulls(&self.tree, &settings.hull_options())?.into_values().collect())
    }

    pub fn resolve(&self, settings: &Settings) -> Result<Placement, GatewayError> {
        Ok(self.solver().resolve(settings.seed)?)
    }

    pub fn settle(&self, placement: &Placement) -> Result<Placement, GatewayError> {
        Ok(self.solver().settle(placement)?)
    }

    pub fn tour(&self, placement: &Placement) -> Result<GroupTour, GatewayError> {
        let hulls = placed_hulls(&self.tree, placement)?;
        Ok(order_groups(
            &group_centroids(&self.tree, &hulls),
            self.scene.workspace.base(),
            &hierarchy(&self.tree),
        )?)
    }

    /// Group tour plus the object order inside each toured group.
    pub fn sequence(&self, placement: &Placement) -> Result<(GroupTour, Vec<ObjectSequence>), GatewayError> {
        let tour = self.tour(placement)?;
        let supports = support_pairs(&placed_hulls(&self.tree, placement)?, 1e-4);
        let sequences = tour
            .order
            .iter()
            .map(|g| order_within_group(&self.tree, g, placement, &self.arm, &supports))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((tour, sequences))
    }

    /// Resolve, settle, sequence and plan motions.
    pub fn plan(&self, settings: &Settings) -> Result<PlanFile, GatewayError> {
        let placement = self.settle(&self.resolve(settings)?)?;
        let planner = PlannerOptions {
            seed: settings.seed,
            ..PlannerOptions::default()
        };
        let plan = assemble_plan(
            &self.tree,
            &placement,
            &self.scene.workspace,
            &self.arm,
            &self.obstacles,
            &planner,
        )?;
        let placed_tree = placement.apply_to(&self.tree);
        Ok(PlanFile {
            format_version: FORMAT_VERSION,
            seed: settings.seed,
            hulls: group_hulls(&placed_tree, &settings.hull_options())?.into_values().collect(),
            object_hulls: placed_hulls(&self.tree, &placement)?.into_values().collect(),
            placement,
            tour: plan.tour,
            sequences: plan.sequences,
            steps: plan.steps,
            trajectories: plan.trajectories,
            staging: plan.staging,
        })
    }
}
