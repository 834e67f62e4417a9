//! Object types, the type hierarchy and per-environment instance registries.
//!
//! The hierarchy is a tree rooted at `Thing`. The three built-in leaf types
//! are `Hand`, `Wooden_cube` and `Table`; registry files may declare further
//! types, which must hang below `Thing` (directly or transitively).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const THING: &str = "Thing";
pub const HAND: &str = "Hand";
pub const WOODEN_CUBE: &str = "Wooden_cube";
pub const TABLE: &str = "Table";

const DEMONSTRATION_JSON: &str = include_str!("../../../registries/demonstration.json");
const EXECUTION_JSON: &str = include_str!("../../../registries/execution.json");

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("type `{0}` is declared more than once")]
    DuplicateType(String),
    #[error("type `{name}` has parent `{parent}` which does not lead back to Thing")]
    Detached { name: String, parent: String },
    #[error("instance `{0}` is declared more than once")]
    DuplicateInstance(String),
    #[error("instance `{instance}` has unknown type `{ty}`")]
    UnknownInstanceType { instance: String, ty: String },
    #[error("registry must contain exactly one Table instance, found {0}")]
    TableCount(usize),
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("cannot read registry {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed registry: {0}")]
    Json(#[from] serde_json::Error),
}

/// A node of the type tree. `parent` is `None` only for `Thing`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectType {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeHierarchy {
    parents: BTreeMap<String, Option<String>>,
}

impl Default for TypeHierarchy {
    fn default() -> Self {
        let mut parents = BTreeMap::new();
        parents.insert(THING.to_string(), None);
        for leaf in [HAND, WOODEN_CUBE, TABLE] {
            parents.insert(leaf.to_string(), Some(THING.to_string()));
        }
        TypeHierarchy { parents }
    }
}

impl TypeHierarchy {
    /// Built-in hierarchy extended with user-declared types.
    pub fn with_extra(extra: &[ObjectType]) -> Result<Self, OntologyError> {
        let mut hierarchy = TypeHierarchy::default();
        for ty in extra {
            if hierarchy.parents.contains_key(&ty.name) {
                return Err(OntologyError::DuplicateType(ty.name.clone()));
            }
            let parent = ty.parent.clone().unwrap_or_else(|| THING.to_string());
            hierarchy.parents.insert(ty.name.clone(), Some(parent));
        }
        // every declared type must reach Thing without revisiting a node
        for (name, parent) in &hierarchy.parents {
            let mut seen = 0;
            let mut cursor = parent.clone();
            while let Some(p) = cursor {
                seen += 1;
                if seen > hierarchy.parents.len() {
                    return Err(OntologyError::Detached {
                        name: name.clone(),
                        parent: parent.clone().unwrap_or_default(),
                    });
                }
                cursor = match hierarchy.parents.get(&p) {
                    Some(next) => next.clone(),
                    None => {
                        return Err(OntologyError::Detached {
                            name: name.clone(),
                            parent: p,
                        })
                    }
                };
            }
        }
        Ok(hierarchy)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.parents.contains_key(name)
    }

    pub fn parent(&self, name: &str) -> Option<&str> {
        self.parents.get(name).and_then(|p| p.as_deref())
    }

    /// True iff `a == b` or `b` is an ancestor of `a`.
    pub fn is_subtype(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        if !self.contains(a) {
            return Err(OntologyError::UnknownType(a.to_string()));
        }
        if !self.contains(b) {
            return Err(OntologyError::UnknownType(b.to_string()));
        }
        let mut cursor = Some(a);
        while let Some(ty) = cursor {
            if ty == b {
                return Ok(true);
            }
            cursor = self.parent(ty);
        }
        Ok(false)
    }

    pub fn types(&self) -> impl Iterator<Item = ObjectType> + '_ {
        self.parents.iter().map(|(name, parent)| ObjectType {
            name: name.clone(),
            parent: parent.clone(),
        })
    }

    /// Types declared beyond the built-in four.
    pub fn extra_types(&self) -> Vec<ObjectType> {
        let builtin = TypeHierarchy::default();
        self.types()
            .filter(|t| !builtin.contains(&t.name))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Demonstration,
    Execution,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Demonstration => f.write_str("demonstration"),
            Role::Execution => f.write_str("execution"),
        }
    }
}

impl FromStr for Role {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "demonstration" => Ok(Role::Demonstration),
            "execution" => Ok(Role::Execution),
            other => Err(OntologyError::UnknownRole(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

impl ObjectInstance {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        ObjectInstance {
            name: name.into(),
            ty: ty.into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RegistryFile {
    role: Role,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    types: Vec<ObjectType>,
    instances: Vec<ObjectInstance>,
}

/// The objects present in one environment. Instance order is the file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvironmentRegistry {
    role: Role,
    hierarchy: TypeHierarchy,
    instances: Vec<ObjectInstance>,
    index: BTreeMap<String, usize>,
}

impl EnvironmentRegistry {
    pub fn new(
        role: Role,
        hierarchy: TypeHierarchy,
        instances: Vec<ObjectInstance>,
    ) -> Result<Self, OntologyError> {
        let mut index = BTreeMap::new();
        for (i, inst) in instances.iter().enumerate() {
            if !hierarchy.contains(&inst.ty) {
                return Err(OntologyError::UnknownInstanceType {
                    instance: inst.name.clone(),
                    ty: inst.ty.clone(),
                });
            }
            if index.insert(inst.name.clone(), i).is_some() {
                return Err(OntologyError::DuplicateInstance(inst.name.clone()));
            }
        }
        let tables = instances.iter().filter(|i| i.ty == TABLE).count();
        if tables != 1 {
            return Err(OntologyError::TableCount(tables));
        }
        Ok(EnvironmentRegistry {
            role,
            hierarchy,
            instances,
            index,
        })
    }

    /// The learning environment: two hands, eight cubes, `table1`.
    pub fn demonstration() -> Self {
        Self::from_json(DEMONSTRATION_JSON).expect("built-in demonstration registry is valid")
    }

    /// The robot environment: `Robot_gripper`, four cubes, `high_table`.
    pub fn execution() -> Self {
        Self::from_json(EXECUTION_JSON).expect("built-in execution registry is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, OntologyError> {
        let file: RegistryFile = serde_json::from_str(text)?;
        let hierarchy = TypeHierarchy::with_extra(&file.types)?;
        Self::new(file.role, hierarchy, file.instances)
    }

    pub fn to_json(&self) -> String {
        let file = RegistryFile {
            role: self.role,
            types: self.hierarchy.extra_types(),
            instances: self.instances.clone(),
        };
        serde_json::to_string_pretty(&file).expect("registry serializes")
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn hierarchy(&self) -> &TypeHierarchy {
        &self.hierarchy
    }

    pub fn instances(&self) -> &[ObjectInstance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&ObjectInstance> {
        self.index.get(name).map(|&i| &self.instances[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn type_of(&self, name: &str) -> Option<&str> {
        self.get(name).map(|i| i.ty.as_str())
    }

    /// Whether `name` is registered with a type at or below `ty`.
    pub fn is_instance_of(&self, name: &str, ty: &str) -> bool {
        match self.type_of(name) {
            Some(actual) => self.hierarchy.is_subtype(actual, ty).unwrap_or(false),
            None => false,
        }
    }

    /// Instances whose type is `ty` or a subtype, in registry order.
    pub fn instances_of<'a>(
        &'a self,
        ty: &'a str,
    ) -> impl Iterator<Item = &'a ObjectInstance> + 'a {
        self.instances
            .iter()
            .filter(move |i| self.hierarchy.is_subtype(&i.ty, ty).unwrap_or(false))
    }

    pub fn hands(&self) -> Vec<&str> {
        self.instances_of(HAND).map(|i| i.name.as_str()).collect()
    }

    pub fn cubes(&self) -> Vec<&str> {
        self.instances_of(WOODEN_CUBE)
            .map(|i| i.name.as_str())
            .collect()
    }

    pub fn table(&self) -> &str {
        self.instances_of(TABLE)
            .next()
            .map(|i| i.name.as_str())
            .expect("registry invariant: exactly one table")
    }
}

pub fn load_registry(path: impl AsRef<Path>) -> Result<EnvironmentRegistry, OntologyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| OntologyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    EnvironmentRegistry::from_json(&text)
}
