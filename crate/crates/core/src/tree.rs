//! The hierarchical constraint forest: scene objects, nestable relative or
//! absolute groups, and the authoring transitions over them.
//!
//! Every mutating method validates all preconditions before touching state, so
//! a returned error always leaves the tree unchanged.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{centroid, Mesh, Pose, Vec3};

pub type ObjectId = String;
pub type GroupId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Relative,
    Absolute,
}

impl Mode {
    pub fn toggled(self) -> Mode {
        match self {
            Mode::Relative => Mode::Absolute,
            Mode::Absolute => Mode::Relative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChildRef {
    Object(ObjectId),
    Group(GroupId),
}

impl ChildRef {
    pub fn id(&self) -> &str {
        match self {
            ChildRef::Object(id) | ChildRef::Group(id) => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: ObjectId,
    pub mesh: Mesh,
    /// Pose in the frame of the parent group, or world when ungrouped.
    pub pose: Pose,
    pub padding: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<GroupId>,
}

impl SceneObject {
    pub fn new(id: impl Into<String>, mesh: Mesh, pose: Pose, padding: f64) -> Self {
        Self {
            id: id.into(),
            mesh,
            pose,
            padding,
            parent: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupNode {
    pub id: GroupId,
    pub mode: Mode,
    pub pose: Pose,
    pub children: Vec<ChildRef>,
    pub parent: Option<GroupId>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("object `{0}` already belongs to a group")]
    AlreadyGrouped(ObjectId),
    #[error("group `{0}` is frozen by export")]
    GroupFrozen(GroupId),
    #[error("nesting `{child}` under `{parent}` would create a cycle")]
    CycleError { parent: GroupId, child: GroupId },
    #[error("group `{0}` is not a root")]
    NotRoot(GroupId),
    #[error("both operands are group `{0}`")]
    SameGroup(GroupId),
    #[error("group `{0}` was already exported")]
    AlreadyExported(GroupId),
    #[error("mesh of object `{0}` has fewer than 4 non-coplanar vertices")]
    DegenerateMesh(ObjectId),
    #[error("object `{0}` has a negative padding")]
    NegativePadding(ObjectId),
    #[error("invalid spec document: {0}")]
    InvalidSpec(String),
}

impl TreeError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            TreeError::UnknownId(_) => "UnknownId",
            TreeError::DuplicateId(_) => "DUP_ID",
            TreeError::AlreadyGrouped(_) => "AlreadyGrouped",
            TreeError::GroupFrozen(_) => "GroupFrozen",
            TreeError::CycleError { .. } => "CycleError",
            TreeError::NotRoot(_) => "NotRoot",
            TreeError::SameGroup(_) => "SameGroup",
            TreeError::AlreadyExported(_) => "AlreadyExported",
            TreeError::DegenerateMesh(_) => "DegenerateMesh",
            TreeError::NegativePadding(_) => "NegativePadding",
            TreeError::InvalidSpec(_) => "InvalidSpec",
        }
    }
}

pub type Result<T, E = TreeError> = std::result::Result<T, E>;

/// A single authoring action. Used by the session service and by replay tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    CreateGroup { a: ObjectId, b: ObjectId },
    AddObject { group: GroupId, object: ObjectId },
    Nest { first: GroupId, second: GroupId },
    Wrap { a: GroupId, b: GroupId },
    DeleteGroup { group: GroupId },
    ToggleMode { group: GroupId },
    SetPose { target: String, pose: Pose },
    Export { group: GroupId },
}

/// What an [`Op`] produced, when it produced something.
#[derive(Debug, Clone, PartialEq)]
pub enum OpOutput {
    None,
    Group(GroupId),
    Spec(SpecDocument),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintTree {
    pub objects: BTreeMap<ObjectId, SceneObject>,
    pub groups: BTreeMap<GroupId, GroupNode>,
    pub roots: BTreeSet<GroupId>,
    pub ungrouped: BTreeSet<ObjectId>,
    pub exported: BTreeSet<GroupId>,
    #[serde(default)]
    next_group: u64,
}

impl ConstraintTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a new ungrouped object.
    pub fn insert_object(&mut self, object: SceneObject) -> Result<()> {
        if self.contains_id(&object.id) {
            return Err(TreeError::DuplicateId(object.id));
        }
        if !(object.padding >= 0.0) {
            return Err(TreeError::NegativePadding(object.id));
        }
        if !object.mesh.validate_indices() || !object.mesh.is_volumetric() {
            return Err(TreeError::DegenerateMesh(object.id));
        }
        let mut object = object;
        object.parent = None;
        self.ungrouped.insert(object.id.clone());
        self.objects.insert(object.id.clone(), object);
        Ok(())
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.objects.contains_key(id) || self.groups.contains_key(id)
    }

    pub fn object(&self, id: &str) -> Result<&SceneObject> {
        self.objects
            .get(id)
            .ok_or_else(|| TreeError::UnknownId(id.to_string()))
    }

    pub fn group(&self, id: &str) -> Result<&GroupNode> {
        self.groups
            .get(id)
            .ok_or_else(|| TreeError::UnknownId(id.to_string()))
    }

    fn parent_of(&self, id: &str) -> Result<Option<&GroupId>> {
        if let Some(o) = self.objects.get(id) {
            Ok(o.parent.as_ref())
        } else if let Some(g) = self.groups.get(id) {
            Ok(g.parent.as_ref())
        } else {
            Err(TreeError::UnknownId(id.to_string()))
        }
    }

    fn local_pose(&self, id: &str) -> Result<Pose> {
        if let Some(o) = self.objects.get(id) {
            Ok(o.pose)
        } else {
            Ok(self.group(id)?.pose)
        }
    }

    /// Composition of poses from the root down to `target`.
    pub fn world_pose(&self, target: &str) -> Result<Pose> {
        let mut pose = self.local_pose(target)?;
        let mut cursor = self.parent_of(target)?.cloned();
        while let Some(g) = cursor {
            let node = self.group(&g)?;
            pose = node.pose.compose(&pose);
            cursor = node.parent.clone();
        }
        Ok(pose)
    }

    /// Ancestor groups of `id`, nearest first.
    pub fn ancestors(&self, id: &str) -> Result<Vec<GroupId>> {
        let mut out = Vec::new();
        let mut cursor = self.parent_of(id)?.cloned();
        while let Some(g) = cursor {
            cursor = self.group(&g)?.parent.clone();
            out.push(g);
        }
        Ok(out)
    }

    /// Groups in the subtree rooted at `g` (including `g`), pre-order.
    pub fn subtree_groups(&self, g: &str) -> Result<Vec<GroupId>> {
        let mut out = Vec::new();
        let mut stack = vec![g.to_string()];
        while let Some(id) = stack.pop() {
            let node = self.group(&id)?;
            for c in node.children.iter().rev() {
                if let ChildRef::Group(cg) = c {
                    stack.push(cg.clone());
                }
            }
            out.push(id);
        }
        Ok(out)
    }

    /// Objects anywhere below `g`.
    pub fn subtree_objects(&self, g: &str) -> Result<Vec<ObjectId>> {
        let mut out = Vec::new();
        for gid in self.subtree_groups(g)? {
            for c in &self.groups[&gid].children {
                if let ChildRef::Object(o) = c {
                    out.push(o.clone());
                }
            }
        }
        Ok(out)
    }

    /// Direct object members of `g`.
    pub fn direct_objects(&self, g: &str) -> Result<Vec<ObjectId>> {
        Ok(self
            .group(g)?
            .children
            .iter()
            .filter_map(|c| match c {
                ChildRef::Object(o) => Some(o.clone()),
                ChildRef::Group(_) => None,
            })
            .collect())
    }

    pub fn child_groups(&self, g: &str) -> Result<Vec<GroupId>> {
        Ok(self
            .group(g)?
            .children
            .iter()
            .filter_map(|c| match c {
                ChildRef::Group(id) => Some(id.clone()),
                ChildRef::Object(_) => None,
            })
            .collect())
    }

    /// True if `target` or any of its ancestors is exported.
    pub fn is_frozen(&self, target: &str) -> Result<bool> {
        if self.exported.contains(target) {
            return Ok(true);
        }
        Ok(self
            .ancestors(target)?
            .iter()
            .any(|g| self.exported.contains(g)))
    }

    fn ensure_group_editable(&self, g: &str) -> Result<()> {
        self.group(g)?;
        if self.is_frozen(g)? {
            return Err(TreeError::GroupFrozen(g.to_string()));
        }
        Ok(())
    }

    fn ensure_ungrouped(&self, o: &str) -> Result<()> {
        self.object(o)?;
        if !self.ungrouped.contains(o) {
            return Err(TreeError::AlreadyGrouped(o.to_string()));
        }
        Ok(())
    }

    fn fresh_group_id(&mut self) -> GroupId {
        loop {
            self.next_group += 1;
            let id = format!("g{}", self.next_group);
            if !self.contains_id(&id) {
                return id;
            }
        }
    }

    fn is_descendant(&self, candidate: &str, ancestor: &str) -> Result<bool> {
        Ok(self.ancestors(candidate)?.iter().any(|g| g == ancestor))
    }

    /// Groups the ungrouped objects `a` and `b` (or just `a` when `a == b`)
    /// into a new relative root group framed at their centroid.
    pub fn create_group(&mut self, a: &str, b: &str) -> Result<GroupId> {
        self.ensure_ungrouped(a)?;
        self.ensure_ungrouped(b)?;
        let members: Vec<ObjectId> = if a == b {
            vec![a.to_string()]
        } else {
            vec![a.to_string(), b.to_string()]
        };
        let positions: Vec<Vec3> = members
            .iter()
            .map(|m| self.objects[m].pose.translation)
            .collect();
        let frame = Pose::from_translation(centroid(&positions));
        let inv = frame.inverse();
        let id = self.fresh_group_id();
        for m in &members {
            let o = self.objects.get_mut(m).expect("checked");
            o.pose = inv.compose(&o.pose);
            o.parent = Some(id.clone());
            self.ungrouped.remove(m);
        }
        self.groups.insert(
            id.clone(),
            GroupNode {
                id: id.clone(),
                mode: Mode::Relative,
                pose: frame,
                children: members.into_iter().map(ChildRef::Object).collect(),
                parent: None,
            },
        );
        self.roots.insert(id.clone());
        Ok(id)
    }

    /// Appends the ungrouped object `o` to group `g`, keeping its world pose.
    pub fn add_object(&mut self, g: &str, o: &str) -> Result<()> {
        self.group(g)?;
        self.ensure_ungrouped(o)?;
        self.ensure_group_editable(g)?;
        let frame = self.world_pose(g)?;
        let obj = self.objects.get_mut(o).expect("checked");
        obj.pose = frame.inverse().compose(&obj.pose);
        obj.parent = Some(g.to_string());
        self.ungrouped.remove(o);
        self.groups
            .get_mut(g)
            .expect("checked")
            .children
            .push(ChildRef::Object(o.to_string()));
        Ok(())
    }

    /// Makes root group `second` a child of `first`.
    pub fn nest_groups(&mut self, first: &str, second: &str) -> Result<()> {
        self.group(first)?;
        self.group(second)?;
        if first == second {
            return Err(TreeError::CycleError {
                parent: first.to_string(),
                child: second.to_string(),
            });
        }
        self.ensure_group_editable(first)?;
        self.ensure_group_editable(second)?;
        if !self.roots.contains(second) {
            return Err(TreeError::NotRoot(second.to_string()));
        }
        if self.is_descendant(first, second)? {
            return Err(TreeError::CycleError {
                parent: first.to_string(),
                child: second.to_string(),
            });
        }
        let frame = self.world_pose(first)?;
        let node = self.groups.get_mut(second).expect("checked");
        node.pose = frame.inverse().compose(&node.pose);
        node.parent = Some(first.to_string());
        self.roots.remove(second);
        self.groups
            .get_mut(first)
            .expect("checked")
            .children
            .push(ChildRef::Group(second.to_string()));
        Ok(())
    }

    /// Creates a new relative root containing root groups `a` and `b`.
    pub fn wrap_in_parent(&mut self, a: &str, b: &str) -> Result<GroupId> {
        self.group(a)?;
        self.group(b)?;
        if a == b {
            return Err(TreeError::SameGroup(a.to_string()));
        }
        for g in [a, b] {
            if !self.roots.contains(g) {
                return Err(TreeError::NotRoot(g.to_string()));
            }
        }
        self.ensure_group_editable(a)?;
        self.ensure_group_editable(b)?;
        let positions = [self.groups[a].pose.translation, self.groups[b].pose.translation];
        let frame = Pose::from_translation(centroid(&positions));
        let inv = frame.inverse();
        let id = self.fresh_group_id();
        for g in [a, b] {
            let node = self.groups.get_mut(g).expect("checked");
            node.pose = inv.compose(&node.pose);
            node.parent = Some(id.clone());
            self.roots.remove(g);
        }
        self.groups.insert(
            id.clone(),
            GroupNode {
                id: id.clone(),
                mode: Mode::Relative,
                pose: frame,
                children: vec![ChildRef::Group(a.to_string()), ChildRef::Group(b.to_string())],
                parent: None,
            },
        );
        self.roots.insert(id.clone());
        Ok(id)
    }

    /// Removes group `g`, promoting its children to `g`'s parent (or to roots
    /// and ungrouped objects when `g` is a root).
    pub fn delete_group(&mut self, g: &str) -> Result<()> {
        self.ensure_group_editable(g)?;
        let node = self.groups.remove(g).expect("checked");
        for c in &node.children {
            match c {
                ChildRef::Object(o) => {
                    let obj = self.objects.get_mut(o).expect("forest invariant");
                    obj.pose = node.pose.compose(&obj.pose);
                    obj.parent = node.parent.clone();
                    if node.parent.is_none() {
                        self.ungrouped.insert(o.clone());
                    }
                }
                ChildRef::Group(cg) => {
                    let child = self.groups.get_mut(cg).expect("forest invariant");
                    child.pose = node.pose.compose(&child.pose);
                    child.parent = node.parent.clone();
                    if node.parent.is_none() {
                        self.roots.insert(cg.clone());
                    }
                }
            }
        }
        match &node.parent {
            Some(p) => {
                let parent = self.groups.get_mut(p).expect("forest invariant");
                let at = parent
                    .children
                    .iter()
                    .position(|c| c == &ChildRef::Group(g.to_string()))
                    .expect("forest invariant");
                parent.children.splice(at..=at, node.children.iter().cloned());
            }
            None => {
                self.roots.remove(g);
            }
        }
        Ok(())
    }

    pub fn toggle_mode(&mut self, g: &str) -> Result<Mode> {
        self.ensure_group_editable(g)?;
        let node = self.groups.get_mut(g).expect("checked");
        node.mode = node.mode.toggled();
        Ok(node.mode)
    }

    /// Replaces the parent-frame pose of an object or group; descendants follow.
    pub fn set_pose(&mut self, target: &str, pose: Pose) -> Result<()> {
        if self.is_frozen(target)? {
            let frozen = std::iter::once(target.to_string())
                .chain(self.ancestors(target)?)
                .find(|g| self.exported.contains(g))
                .unwrap_or_else(|| target.to_string());
            return Err(TreeError::GroupFrozen(frozen));
        }
        if let Some(o) = self.objects.get_mut(target) {
            o.pose = pose;
        } else {
            self.groups.get_mut(target).expect("checked").pose = pose;
        }
        Ok(())
    }

    /// Serializes the subtree of root `g` and freezes it.
    pub fn export_spec(&mut self, g: &str) -> Result<SpecDocument> {
        self.group(g)?;
        if self.exported.contains(g) {
            return Err(TreeError::AlreadyExported(g.to_string()));
        }
        if !self.roots.contains(g) {
            return Err(TreeError::NotRoot(g.to_string()));
        }
        let doc = SpecDocument {
            format_version: SPEC_FORMAT_VERSION,
            groups: vec![self.spec_group(g)],
        };
        for id in self.subtree_groups(g)? {
            self.exported.insert(id);
        }
        Ok(doc)
    }

    fn spec_group(&self, g: &str) -> SpecGroup {
        let node = &self.groups[g];
        SpecGroup {
            id: node.id.clone(),
            mode: node.mode,
            pose: node.pose,
            children: node
                .children
                .iter()
                .map(|c| match c {
                    ChildRef::Object(o) => {
                        let obj = &self.objects[o];
                        SpecChild::Object(SpecObject {
                            id: obj.id.clone(),
                            mesh: obj.id.clone(),
                            pose: obj.pose,
                            padding: obj.padding,
                        })
                    }
                    ChildRef::Group(cg) => SpecChild::Group(self.spec_group(cg)),
                })
                .collect(),
        }
    }

    /// Rebuilds an (exported, frozen) tree from a spec document. `meshes`
    /// resolves each object's mesh reference.
    pub fn from_spec<F>(doc: &SpecDocument, meshes: F) -> Result<ConstraintTree>
    where
        F: Fn(&str) -> Option<Mesh>,
    {
        if doc.format_version != SPEC_FORMAT_VERSION {
            return Err(TreeError::InvalidSpec(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        let mut tree = ConstraintTree::new();
        for g in &doc.groups {
            tree.import_group(g, None, &meshes)?;
            tree.roots.insert(g.id.clone());
        }
        tree.exported = tree.groups.keys().cloned().collect();
        tree.validate().map_err(TreeError::InvalidSpec)?;
        Ok(tree)
    }

    fn import_group<F>(&mut self, g: &SpecGroup, parent: Option<&str>, meshes: &F) -> Result<()>
    where
        F: Fn(&str) -> Option<Mesh>,
    {
        if self.contains_id(&g.id) {
            return Err(TreeError::DuplicateId(g.id.clone()));
        }
        if g.children.is_empty() {
            return Err(TreeError::InvalidSpec(format!("group `{}` is empty", g.id)));
        }
        self.groups.insert(
            g.id.clone(),
            GroupNode {
                id: g.id.clone(),
                mode: g.mode,
                pose: g.pose,
                children: Vec::with_capacity(g.children.len()),
                parent: parent.map(str::to_string),
            },
        );
        for c in &g.children {
            let child = match c {
                SpecChild::Object(o) => {
                    let mesh = meshes(&o.mesh).ok_or_else(|| {
                        TreeError::InvalidSpec(format!("no mesh `{}` for object `{}`", o.mesh, o.id))
                    })?;
                    self.insert_object(SceneObject::new(o.id.clone(), mesh, o.pose, o.padding))?;
                    self.ungrouped.remove(&o.id);
                    self.objects.get_mut(&o.id).expect("inserted").parent = Some(g.id.clone());
                    ChildRef::Object(o.id.clone())
                }
                SpecChild::Group(cg) => {
                    self.import_group(cg, Some(&g.id), meshes)?;
                    ChildRef::Group(cg.id.clone())
                }
            };
            self.groups.get_mut(&g.id).expect("inserted").children.push(child);
        }
        Ok(())
    }

    pub fn apply(&mut self, op: &Op) -> Result<OpOutput> {
        Ok(match op {
            Op::CreateGroup { a, b } => OpOutput::Group(self.create_group(a, b)?),
            Op::AddObject { group, object } => {
                self.add_object(group, object)?;
                OpOutput::None
            }
            Op::Nest { first, second } => {
                self.nest_groups(first, second)?;
                OpOutput::None
            }
            Op::Wrap { a, b } => OpOutput::Group(self.wrap_in_parent(a, b)?),
            Op::DeleteGroup { group } => {
                self.delete_group(group)?;
                OpOutput::None
            }
            Op::ToggleMode { group } => {
                self.toggle_mode(group)?;
                OpOutput::None
            }
            Op::SetPose { target, pose } => {
                self.set_pose(target, *pose)?;
                OpOutput::None
            }
            Op::Export { group } => OpOutput::Spec(self.export_spec(group)?),
        })
    }

    /// Full invariant sweep: forest structure, id references, non-empty
    /// groups, ungrouped bookkeeping and export closure.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let mut seen_objects = BTreeSet::new();
        let mut seen_groups = BTreeSet::new();
        for (id, g) in &self.groups {
            if &g.id != id {
                return Err(format!("group key `{id}` holds id `{}`", g.id));
            }
            if g.children.is_empty() {
                return Err(format!("group `{id}` is empty"));
            }
            match &g.parent {
                None if !self.roots.contains(id) => return Err(format!("`{id}` has no parent but is not a root")),
                Some(_) if self.roots.contains(id) => return Err(format!("root `{id}` has a parent")),
                Some(p) => {
                    let parent = self.groups.get(p).ok_or(format!("`{id}` has unknown parent `{p}`"))?;
                    if !parent.children.contains(&ChildRef::Group(id.clone())) {
                        return Err(format!("`{p}` does not list child `{id}`"));
                    }
                }
                None => {}
            }
            for c in &g.children {
                match c {
                    ChildRef::Object(o) => {
                        let obj = self.objects.get(o).ok_or(format!("`{id}` references unknown object `{o}`"))?;
                        if obj.parent.as_deref() != Some(id.as_str()) {
                            return Err(format!("object `{o}` parent mismatch"));
                        }
                        if !seen_objects.insert(o.clone()) {
                            return Err(format!("object `{o}` appears twice"));
                        }
                    }
                    ChildRef::Group(cg) => {
                        let child = self.groups.get(cg).ok_or(format!("`{id}` references unknown group `{cg}`"))?;
                        if child.parent.as_deref() != Some(id.as_str()) {
                            return Err(format!("group `{cg}` parent mismatch"));
                        }
                        if !seen_groups.insert(cg.clone()) {
                            return Err(format!("group `{cg}` appears twice"));
                        }
                    }
                }
            }
        }
        for r in &self.roots {
            if !self.groups.contains_key(r) {
                return Err(format!("unknown root `{r}`"));
            }
        }
        // Acyclic: every group must reach a root within |groups| steps.
        for id in self.groups.keys() {
            let mut cursor = Some(id.clone());
            let mut steps = 0;
            while let Some(c) = cursor {
                steps += 1;
                if steps > self.groups.len() + 1 {
                    return Err(format!("cycle through `{id}`"));
                }
                cursor = self.groups[&c].parent.clone();
            }
        }
        for (id, o) in &self.objects {
            let grouped = seen_objects.contains(id);
            if grouped == self.ungrouped.contains(id) {
                return Err(format!("object `{id}` ungrouped bookkeeping is wrong"));
            }
            if !grouped && o.parent.is_some() {
                return Err(format!("ungrouped object `{id}` has a parent"));
            }
            if self.groups.contains_key(id) {
                return Err(format!("id `{id}` used by both an object and a group"));
            }
        }
        for u in &self.ungrouped {
            if !self.objects.contains_key(u) {
                return Err(format!("unknown ungrouped object `{u}`"));
            }
        }
        for e in &self.exported {
            let g = self.groups.get(e).ok_or(format!("unknown exported group `{e}`"))?;
            for c in &g.children {
                if let ChildRef::Group(cg) = c {
                    if !self.exported.contains(cg) {
                        return Err(format!("exported `{e}` has unfrozen child `{cg}`"));
                    }
                }
            }
        }
        Ok(())
    }
}

pub const SPEC_FORMAT_VERSION: u32 = 1;

/// Exported constraint specification: poses, modes and hierarchy of one or
/// more root groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub format_version: u32,
    pub groups: Vec<SpecGroup>,
}

impl SpecDocument {
    pub fn empty() -> Self {
        Self {
            format_version: SPEC_FORMAT_VERSION,
            groups: Vec::new(),
        }
    }

    /// Concatenates the root groups of several documents.
    pub fn merge(docs: impl IntoIterator<Item = SpecDocument>) -> Self {
        let mut out = Self::empty();
        for d in docs {
            out.groups.extend(d.groups);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecGroup {
    pub id: GroupId,
    pub mode: Mode,
    pub pose: Pose,
    pub children: Vec<SpecChild>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecChild {
    Object(SpecObject),
    Group(SpecGroup),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecObject {
    pub id: ObjectId,
    /// Mesh reference, resolved against the scene's objects.
    pub mesh: String,
    pub pose: Pose,
    pub padding: f64,
}
