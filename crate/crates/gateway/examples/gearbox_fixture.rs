//! Writes the gearbox example scene and spec to `data/gearbox/`.
//!
//! Three groups, eight parts: an absolute housing (base plate, bearing block)
//! holding a relative gear train, plus a free relative cover with two screws.

use std::path::PathBuf;

use hierasm_core::kinematics::ArmModel;
use hierasm_core::placement::Workspace;
use hierasm_core::tree::{SpecChild, SpecGroup, SpecObject, SPEC_FORMAT_VERSION};
use hierasm_core::{Mesh, Mode, Pose, SpecDocument, Vec3};
use hierasm_gateway::formats::{to_canonical_json, SceneObjectEntry, FORMAT_VERSION};
use hierasm_gateway::SceneFile;

const PADDING: f64 = 0.002;

struct Part {
    id: &'static str,
    mesh: Mesh,
    /// Pose in the owning group's frame.
    local: [f64; 3],
}

fn cuboid(id: &'static str, half: [f64; 3], local: [f64; 3]) -> Part {
    Part {
        id,
        mesh: Mesh::cuboid(Vec3::from(half)),
        local,
    }
}

fn cylinder(id: &'static str, r: f64, h: f64, local: [f64; 3]) -> Part {
    Part {
        id,
        mesh: Mesh::cylinder(r, h, 16),
        local,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/gearbox"));
    std::fs::create_dir_all(&out)?;

    // Stacked parts leave exactly 2 * PADDING between meshes so padded hulls touch.
    let housing_at = [0.0, 0.0, 0.0];
    let housing = vec![
        cuboid("base_plate", [0.08, 0.06, 0.01], [0.45, 0.15, 0.012]),
        cuboid("bearing_block", [0.03, 0.03, 0.03], [0.45, 0.15, 0.056]),
    ];
    let geartrain_at = [0.35, -0.1, 0.0];
    let geartrain = vec![
        cuboid("gear_mount", [0.06, 0.04, 0.015], [0.0, 0.0, 0.017]),
        cylinder("gear_large", 0.035, 0.02, [-0.02, 0.0, 0.046]),
        cylinder("gear_small", 0.02, 0.02, [0.04, 0.0, 0.046]),
    ];
    let cover_at = [0.5, -0.15, 0.0];
    let cover = vec![
        cuboid("cover_plate", [0.05, 0.05, 0.005], [0.0, 0.0, 0.007]),
        cylinder("screw_a", 0.006, 0.02, [-0.03, 0.0, 0.026]),
        cylinder("screw_b", 0.006, 0.02, [0.03, 0.0, 0.026]),
    ];

    let mut objects = Vec::new();
    let mut spec_objects = |parts: &[Part], world: [f64; 3]| -> Vec<SpecChild> {
        parts
            .iter()
            .map(|p| {
                let w = Vec3::from(world) + Vec3::from(p.local);
                objects.push(SceneObjectEntry {
                    id: p.id.into(),
                    vertices: p.mesh.vertices.clone(),
                    triangles: p.mesh.triangles.clone(),
                    pose: Pose::from_translation(w),
                    padding: PADDING,
                });
                SpecChild::Object(SpecObject {
                    id: p.id.into(),
                    mesh: p.id.into(),
                    pose: Pose::from_translation(Vec3::from(p.local)),
                    padding: PADDING,
                })
            })
            .collect()
    };
    let housing_children = spec_objects(&housing, housing_at);
    let world_gt = [
        housing_at[0] + geartrain_at[0],
        housing_at[1] + geartrain_at[1],
        housing_at[2] + geartrain_at[2],
    ];
    let geartrain_children = spec_objects(&geartrain, world_gt);
    let cover_children = spec_objects(&cover, cover_at);

    let mut housing_group = SpecGroup {
        id: "housing".into(),
        mode: Mode::Absolute,
        pose: Pose::from_translation(Vec3::from(housing_at)),
        children: housing_children,
    };
    housing_group.children.push(SpecChild::Group(SpecGroup {
        id: "geartrain".into(),
        mode: Mode::Relative,
        pose: Pose::from_translation(Vec3::from(geartrain_at)),
        children: geartrain_children,
    }));
    let spec = SpecDocument {
        format_version: SPEC_FORMAT_VERSION,
        groups: vec![
            housing_group,
            SpecGroup {
                id: "cover".into(),
                mode: Mode::Relative,
                pose: Pose::from_translation(Vec3::from(cover_at)),
                children: cover_children,
            },
        ],
    };
    let scene = SceneFile {
        format_version: FORMAT_VERSION,
        objects,
        workspace: Workspace {
            table_z: 0.0,
            table_min: [0.2, -0.3],
            table_max: [0.6, 0.3],
            arm_base: [0.0, 0.0, 0.0],
            reach: 0.75,
            reach_min: 0.25,
        },
        arm: "ur5".into(),
    };
    scene.validate()?;
    std::fs::write(out.join("scene.json"), to_canonical_json(&scene)?)?;
    std::fs::write(out.join("spec.json"), to_canonical_json(&spec)?)?;
    let arms = out.join("../arms");
    std::fs::create_dir_all(&arms)?;
    for name in ["ur5", "planar2"] {
        let arm = ArmModel::builtin(name).expect("builtin arm");
        std::fs::write(arms.join(format!("{name}.json")), to_canonical_json(&arm)?)?;
    }
    println!("wrote {}", out.display());
    Ok(())
}
