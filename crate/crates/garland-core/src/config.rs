//! JSON group configurations and generating-set specifications.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cayley::{Generator, GeneratingSet};
use crate::coordgroup::CoordinateGroup;
use crate::literal;
use crate::presets;
use crate::wreath::{GroupShape, ShapeKind};
use crate::{Error, Result};

/// `{"kind": "cyclic", "m": 2} | {"kind": "free", "rank": 2} |
/// {"kind": "integers"} | {"kind": "table", "elements": [...], "table":
/// [[...]], "generators": [...]}`
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupConfig {
    Cyclic { m: u32 },
    Free { rank: u32 },
    Integers,
    Table {
        elements: Vec<String>,
        table: Vec<Vec<u32>>,
        generators: Vec<String>,
    },
}

impl GroupConfig {
    pub fn build(&self) -> Result<CoordinateGroup> {
        match self {
            GroupConfig::Cyclic { m } => CoordinateGroup::cyclic(*m),
            GroupConfig::Free { rank } => CoordinateGroup::free(*rank),
            GroupConfig::Integers => Ok(CoordinateGroup::integers()),
            GroupConfig::Table { elements, table, generators } => {
                CoordinateGroup::table(elements.clone(), table.clone(), generators)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<GroupConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad group config: {e}")))
    }
}

/// Everything needed to pin down the ambient group and its generators.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroupSpec {
    /// Preset name, or `None` when `group`/`gens` are given explicitly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeKind>,
    /// Element literals for the generators; empty means `S₀ ∪ {t, t⁻¹}`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gens: Vec<String>,
}

impl GroupSpec {
    pub fn preset(name: &str) -> GroupSpec {
        GroupSpec { preset: Some(name.to_string()), group: None, shape: None, gens: Vec::new() }
    }

    pub fn build(&self) -> Result<(GroupShape, GeneratingSet)> {
        if let Some(name) = &self.preset {
            if self.group.is_some() || !self.gens.is_empty() {
                return Err(Error::Config("give either a preset or an explicit group, not both".into()));
            }
            return presets::by_name(name);
        }
        let group = self
            .group
            .as_ref()
            .ok_or_else(|| Error::Config("missing group config (or preset)".into()))?;
        let coord = group.build()?;
        let shape = GroupShape::new(self.shape.unwrap_or(ShapeKind::Wreath), std::sync::Arc::new(coord));
        let set = if self.gens.is_empty() {
            presets::standard_set(&shape)?
        } else {
            let mut gens = Vec::new();
            for lit in &self.gens {
                gens.push(Generator {
                    label: lit.clone(),
                    element: literal::parse_element(&shape, lit)?,
                });
            }
            GeneratingSet::new(&shape, gens)?
        };
        Ok((shape, set))
    }

    /// Stable digest of the group config plus generating set, used as the
    /// ball cache key together with the radius.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("GroupSpec serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex::encode(&hasher.finalize()[..12])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_config_round_trips_through_json() {
        let cfg = GroupConfig::from_json(r#"{"kind": "cyclic", "m": 2}"#).unwrap();
        assert_eq!(cfg, GroupConfig::Cyclic { m: 2 });
        let group = cfg.build().unwrap();
        assert_eq!(group.generators().len(), 1);
    }

    #[test]
    fn explicit_gens_build_a_generating_set() {
        let spec = GroupSpec {
            preset: None,
            group: Some(GroupConfig::Cyclic { m: 2 }),
            shape: Some(ShapeKind::Wreath),
            gens: vec!["a@4 t^-3".into(), "t^-2".into(), "a@1 t^3".into(), "t^2".into(), "a@0".into()],
        };
        let (_, s) = spec.build().unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.r_s(), 3);
    }

    #[test]
    fn digests_distinguish_specs() {
        let a = GroupSpec::preset("lamplighter");
        let b = GroupSpec::preset("example15");
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), GroupSpec::preset("lamplighter").digest());
    }
}
