//! Bundled plane and space group catalogs.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::groupcore::{build_group, GroupError, SpaceGroup};
use crate::symparse::{parse_catalog, CatalogEntry, GroupId, ParseError};

pub const ATLAS_2D: &str = include_str!("../data/atlas2d.cat");
pub const ATLAS_3D: &str = include_str!("../data/atlas3d.cat");
pub const FORMAT_VERSION: u32 = 1;

/// Enantiomorphic partners and the IT number standing for their pair.
pub const ENANTIOMORPH_ALIASES: [(u32, u32); 11] = [
    (78, 76),
    (95, 91),
    (96, 92),
    (145, 144),
    (153, 151),
    (154, 152),
    (170, 169),
    (172, 171),
    (179, 178),
    (181, 180),
    (213, 212),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("catalog parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("group {id} is invalid: {source}")]
    Build { id: GroupId, source: GroupError },
    #[error("bad group id: {0}")]
    BadId(String),
    #[error("unknown group {id}{}", near_list(.near))]
    UnknownId { id: String, near: Vec<String> },
    #[error("bundled catalog has {found} groups of dimension {dim}, expected {expected}")]
    Count {
        dim: usize,
        found: usize,
        expected: usize,
    },
}

fn near_list(near: &[String]) -> String {
    if near.is_empty() {
        String::new()
    } else {
        format!(" (did you mean {}?)", near.join(", "))
    }
}

#[derive(Debug, Clone)]
pub struct Atlas {
    entries: BTreeMap<GroupId, CatalogEntry>,
    groups: BTreeMap<GroupId, Arc<SpaceGroup>>,
    aliases: BTreeMap<GroupId, GroupId>,
    source: String,
}

impl Atlas {
    /// The bundled 17 plane groups and 219 space-group classes.
    pub fn load_default() -> Result<Atlas, AtlasError> {
        let mut text = String::from(ATLAS_2D);
        text.push('\n');
        text.push_str(ATLAS_3D);
        let atlas = Atlas::build(&text, true, "bundled")?;
        for (dim, expected) in [(2, 17), (3, 219)] {
            let found = atlas.ids(dim).len();
            if found != expected {
                return Err(AtlasError::Count {
                    dim,
                    found,
                    expected,
                });
            }
        }
        Ok(atlas)
    }

    /// A user catalog; every entry is kept as given.
    pub fn from_catalog_text(text: &str, source: &str) -> Result<Atlas, AtlasError> {
        Atlas::build(text, false, source)
    }

    fn build(text: &str, alias: bool, source: &str) -> Result<Atlas, AtlasError> {
        let parsed = parse_catalog(text)?;
        let mut aliases = BTreeMap::new();
        if alias {
            for (from, to) in ENANTIOMORPH_ALIASES {
                aliases.insert(GroupId::new(3, from), GroupId::new(3, to));
            }
        }
        let mut entries = BTreeMap::new();
        let mut groups = BTreeMap::new();
        for e in parsed {
            if !aliases.contains_key(&e.id) {
                let g = build_group(&e).map_err(|source| AtlasError::Build { id: e.id, source })?;
                groups.insert(e.id, Arc::new(g));
            }
            entries.insert(e.id, e);
        }
        aliases.retain(|_, to| groups.contains_key(to));
        Ok(Atlas {
            entries,
            groups,
            aliases,
            source: source.to_string(),
        })
    }

    /// Add or replace entries from a user catalog. Replaced ids stop being
    /// aliases.
    pub fn extend_from_text(&mut self, text: &str, source: &str) -> Result<(), AtlasError> {
        for e in parse_catalog(text)? {
            let g = build_group(&e).map_err(|source| AtlasError::Build { id: e.id, source })?;
            self.aliases.remove(&e.id);
            self.groups.insert(e.id, Arc::new(g));
            self.entries.insert(e.id, e);
        }
        self.source = format!("{} + {source}", self.source);
        Ok(())
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Stored representatives of the given dimension, in IT order.
    pub fn ids(&self, dim: usize) -> Vec<GroupId> {
        self.groups
            .keys()
            .filter(|id| id.dim == dim)
            .copied()
            .collect()
    }

    pub fn all_ids(&self) -> Vec<GroupId> {
        self.groups.keys().copied().collect()
    }

    /// Map an id to its stored representative.
    pub fn resolve(&self, id: &str) -> Result<GroupId, AtlasError> {
        let parsed: GroupId = match id.parse() {
            Ok(p) => p,
            Err(msg) => {
                return Err(match id.trim().split_once('/') {
                    Some((d, _)) if d.trim().parse::<usize>().is_ok() => AtlasError::UnknownId {
                        id: id.to_string(),
                        near: self.near(d.trim().parse().unwrap(), 0),
                    },
                    _ => AtlasError::BadId(msg),
                })
            }
        };
        if self.groups.contains_key(&parsed) {
            return Ok(parsed);
        }
        if let Some(to) = self.aliases.get(&parsed) {
            return Ok(*to);
        }
        Err(AtlasError::UnknownId {
            id: id.to_string(),
            near: self.near(parsed.dim, parsed.it),
        })
    }

    fn near(&self, dim: usize, it: u32) -> Vec<String> {
        let mut ids: Vec<GroupId> = self
            .groups
            .keys()
            .filter(|g| g.dim == dim)
            .copied()
            .collect();
        ids.sort_by_key(|g| (g.it as i64 - it as i64).abs());
        let mut near: Vec<String> = ids.into_iter().take(3).map(|g| g.to_string()).collect();
        if near.is_empty() {
            let mut dims: Vec<usize> = self.groups.keys().map(|g| g.dim).collect();
            dims.dedup();
            near = dims.into_iter().map(|d| format!("{d}/1")).collect();
        }
        near
    }

    pub fn get(&self, id: &str) -> Result<Arc<SpaceGroup>, AtlasError> {
        let rid = self.resolve(id)?;
        Ok(self.groups[&rid].clone())
    }

    pub fn group(&self, id: GroupId) -> Option<Arc<SpaceGroup>> {
        self.groups.get(&id).cloned()
    }

    pub fn entry(&self, id: GroupId) -> Option<&CatalogEntry> {
        self.entries.get(&id)
    }

    pub fn name(&self, id: GroupId) -> &str {
        self.entries.get(&id).map_or("", |e| e.name.as_str())
    }

    /// Ids that resolve to a different stored representative.
    pub fn aliases(&self) -> &BTreeMap<GroupId, GroupId> {
        &self.aliases
    }
}
