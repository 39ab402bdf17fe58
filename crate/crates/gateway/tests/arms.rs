use std::path::Path;

use hierasm_core::kinematics::{fk, ArmModel};
use hierasm_core::SpecDocument;
use hierasm_gateway::formats::parse_json;
use hierasm_gateway::{Problem, SceneFile};

fn data() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data"))
}

#[test]
fn shipped_arm_files_match_builtins() {
    for name in ["ur5", "planar2"] {
        let text = std::fs::read_to_string(data().join(format!("arms/{name}.json"))).unwrap();
        let arm: ArmModel = parse_json(&text).unwrap();
        assert_eq!(arm, ArmModel::builtin(name).unwrap(), "{name}");
    }
}

#[test]
fn scene_can_reference_an_arm_file() {
    let dir = data().join("gearbox");
    let mut scene: SceneFile = parse_json(&std::fs::read_to_string(dir.join("scene.json")).unwrap()).unwrap();
    let spec: SpecDocument = parse_json(&std::fs::read_to_string(dir.join("spec.json")).unwrap()).unwrap();
    scene.arm = "../arms/ur5.json".into();
    let problem = Problem::new(scene, &spec, Some(&dir)).unwrap();
    let q = [0.3, -1.2, 1.1, -0.4, 0.7, 0.2];
    assert_eq!(fk(&problem.arm, &q).unwrap(), fk(&ArmModel::ur5(), &q).unwrap());
}

#[test]
fn missing_arm_file_is_an_io_error() {
    let dir = data().join("gearbox");
    let mut scene: SceneFile = parse_json(&std::fs::read_to_string(dir.join("scene.json")).unwrap()).unwrap();
    let spec: SpecDocument = parse_json(&std::fs::read_to_string(dir.join("spec.json")).unwrap()).unwrap();
    scene.arm = "no_such_arm.json".into();
    let err = Problem::new(scene, &spec, Some(&dir)).err().unwrap();
    assert_eq!(err.code(), "IO");
}
