//! Hierarchical assembly constraints: a nestable relative/absolute group
//! forest over scene objects, padded convex hulls per group, and a planning
//! pipeline that resolves free poses, settles contacts, orders assembly steps
//! and plans collision-free arm motions.

pub mod collision;
pub mod geometry;
pub mod hull;
pub mod kinematics;
pub mod par;
pub mod placement;
pub mod sequence;
pub mod tree;

pub use geometry::{Mesh, Pose, Vec3};
pub use hull::{Hull, HullError, HullOptions};
pub use par::Exec;
pub use tree::{ChildRef, ConstraintTree, GroupId, GroupNode, Mode, ObjectId, Op, SceneObject, SpecDocument, TreeError};
