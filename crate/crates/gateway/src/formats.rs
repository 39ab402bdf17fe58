//! Versioned JSON documents: scene, spec and plan files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use hierasm_core::hull::{pad_points, quickhull};
use hierasm_core::kinematics::{ArmModel, JointConfig};
use hierasm_core::placement::{Placement, Workspace};
use hierasm_core::sequence::{GroupTour, ObjectSequence, PlanStep};
use hierasm_core::{ConstraintTree, Hull, Mesh, Pose, SceneObject, Vec3};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::GatewayError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneObjectEntry {
    pub id: String,
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub pose: Pose,
    #[serde(default)]
    pub padding: f64,
}

impl SceneObjectEntry {
    pub fn mesh(&self) -> Mesh {
        Mesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub format_version: u32,
    pub objects: Vec<SceneObjectEntry>,
    pub workspace: Workspace,
    /// Built-in arm name (`ur5`, `planar2`) or a path to an arm model file,
    /// relative to the scene file.
    pub arm: String,
}

impl SceneFile {
    /// Schema and invariant checks beyond parsing.
    pub fn validate(&self) -> Result<(), GatewayError> {
        check_version(self.format_version)?;
        let mut seen = BTreeSet::new();
        for o in &self.objects {
            if !seen.insert(o.id.as_str()) {
                return Err(GatewayError::DuplicateId(o.id.clone()));
            }
            let mesh = o.mesh();
            if !mesh.validate_indices() {
                return Err(GatewayError::Schema(format!("object `{}`: triangle index out of range", o.id)));
            }
            if !(o.padding >= 0.0) {
                return Err(GatewayError::Schema(format!("object `{}`: padding must be non-negative", o.id)));
            }
            if !mesh.is_volumetric() {
                return Err(GatewayError::Schema(format!("object `{}`: mesh does not span a volume", o.id)));
            }
        }
        self.workspace.validate()?;
        Ok(())
    }

    pub fn object(&self, id: &str) -> Option<&SceneObjectEntry> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Authoring tree with every scene object ungrouped at its pose.
    pub fn to_tree(&self) -> Result<ConstraintTree, GatewayError> {
        self.validate()?;
        let mut tree = ConstraintTree::new();
        for o in &self.objects {
            tree.insert_object(SceneObject::new(o.id.clone(), o.mesh(), o.pose, o.padding))?;
        }
        Ok(tree)
    }

    /// Padded world hulls of scene objects not listed in `used`.
    pub fn static_obstacles(&self, used: &BTreeSet<String>) -> Result<Vec<Hull>, GatewayError> {
        let mut out = Vec::new();
        for o in self.objects.iter().filter(|o| !used.contains(&o.id)) {
            let pts: Vec<Vec3> = o.mesh().points().map(|v| o.pose.transform_point(&v)).collect();
            out.push(quickhull(&pad_points(&pts, o.padding)?)?.with_owner(o.id.clone()));
        }
        Ok(out)
    }

    pub fn load_arm(&self, base_dir: Option<&Path>) -> Result<ArmModel, GatewayError> {
        let arm = match ArmModel::builtin(&self.arm) {
            Some(a) => a,
            None => {
                let path = match base_dir {
                    Some(d) => d.join(&self.arm),
                    None => Path::new(&self.arm).to_path_buf(),
                };
                read_json(&path)?
            }
        };
        arm.validate()?;
        Ok(arm)
    }
}

pub fn check_version(v: u32) -> Result<(), GatewayError> {
    if v != FORMAT_VERSION {
        return Err(GatewayError::Schema(format!("unsupported format_version {v}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub format_version: u32,
    pub seed: u64,
    pub placement: Placement,
    pub tour: GroupTour,
    pub sequences: Vec<ObjectSequence>,
    pub steps: Vec<PlanStep>,
    pub trajectories: Vec<Vec<JointConfig>>,
    pub staging: BTreeMap<String, [f64; 3]>,
    /// Group hulls at the placed poses.
    pub hulls: Vec<Hull>,
    /// Padded object hulls at the placed poses.
    pub object_hulls: Vec<Hull>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, GatewayError> {
    let text = std::fs::read_to_string(path).map_err(|e| GatewayError::Io(format!("{}: {e}", path.display())))?;
    parse_json(&text)
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, GatewayError> {
    serde_json::from_str(text).map_err(|e| GatewayError::Schema(e.to_string()))
}

/// Canonical emission: object keys sorted, floats in shortest round-trip
/// form, two-space indentation, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, GatewayError> {
    let v = serde_json::to_value(value).map_err(|e| GatewayError::Schema(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| GatewayError::Schema(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hierasm_core::SpecDocument;

    pub(crate) fn cube_entry(id: &str, at: [f64; 3]) -> SceneObjectEntry {
        let m = Mesh::cuboid(Vec3::repeat(0.05));
        SceneObjectEntry {
            id: id.into(),
            vertices: m.vertices,
            triangles: m.triangles,
            pose: Pose::from_translation(Vec3::from(at)),
            padding: 0.0,
        }
    }

    fn scene() -> SceneFile {
        SceneFile {
            format_version: 1,
            objects: vec![cube_entry("a", [0.4, 0.0, 0.05]), cube_entry("b", [0.4, 0.2, 0.05])],
            workspace: Workspace {
                table_z: 0.0,
                table_min: [0.2, -0.3],
                table_max: [0.6, 0.3],
                arm_base: [0.0; 3],
                reach: 0.8,
                reach_min: 0.0,
            },
            arm: "ur5".into(),
        }
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut s = scene();
        s.objects.push(cube_entry("a", [0.0; 3]));
        let e = s.validate().unwrap_err();
        assert_eq!(e.code(), "DUP_ID");
    }

    #[test]
    fn canonical_round_trip() {
        let s = scene();
        let text = to_canonical_json(&s).unwrap();
        let back: SceneFile = parse_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(to_canonical_json(&back).unwrap(), text);
        let mut tree = s.to_tree().unwrap();
        let g = tree.create_group("a", "b").unwrap();
        let spec = tree.export_spec(&g).unwrap();
        let text = to_canonical_json(&spec).unwrap();
        let back: SpecDocument = parse_json(&text).unwrap();
        assert_eq!(to_canonical_json(&back).unwrap(), text);
    }

    #[test]
    fn unknown_fields_and_versions_rejected() {
        let mut v = serde_json::to_value(scene()).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(parse_json::<SceneFile>(&v.to_string()).is_err());
        let mut s = scene();
        s.format_version = 2;
        assert_eq!(s.validate().unwrap_err().code(), "SCHEMA");
    }
}
