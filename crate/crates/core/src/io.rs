//! Relation and structure files: JSON documents with a schema tag.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loopcond::ConditionStructure;
use crate::orbit::WeakOrder;
use crate::relation::TemporalRelation;

pub const RELATION_SCHEMA: &str = "temporal-loops/relation/v1";
pub const STRUCTURE_SCHEMA: &str = "temporal-loops/structure/v1";

/// `arity` components of dimension `dim`; each orbit is a rank array of
/// length `arity * dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationFile {
    pub schema: String,
    pub arity: usize,
    pub dim: usize,
    pub orbits: Vec<WeakOrder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl RelationFile {
    pub fn from_relation(r: &TemporalRelation, names: Option<Vec<String>>) -> Self {
        RelationFile {
            schema: RELATION_SCHEMA.to_string(),
            arity: r.n,
            dim: r.k,
            orbits: r.orbits().iter().cloned().collect(),
            names,
        }
    }

    pub fn to_relation(&self) -> Result<TemporalRelation> {
        if self.schema != RELATION_SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {:?}", self.schema)));
        }
        if self.arity == 0 || self.dim == 0 {
            return Err(Error::Parse("arity and dim must be positive".into()));
        }
        if let Some(names) = &self.names {
            if names.len() != self.arity {
                return Err(Error::Parse(format!("{} names for arity {}", names.len(), self.arity)));
            }
        }
        if let Some(o) = self.orbits.iter().find(|o| o.len() != self.arity * self.dim) {
            return Err(Error::Parse(format!("orbit {o} does not have length {}", self.arity * self.dim)));
        }
        TemporalRelation::new(self.arity, self.dim, self.orbits.iter().cloned())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureFile {
    pub schema: String,
    #[serde(flatten)]
    pub structure: ConditionStructure,
}

/// Pretty JSON with a trailing newline; the one output format of the tools.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn parse_relation(text: &str) -> Result<(TemporalRelation, RelationFile)> {
    let file: RelationFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((file.to_relation()?, file))
}

pub fn read_relation(path: &Path) -> Result<(TemporalRelation, RelationFile)> {
    parse_relation(&std::fs::read_to_string(path)?)
}

pub fn relation_json(r: &TemporalRelation, names: Option<Vec<String>>) -> Result<String> {
    to_json(&RelationFile::from_relation(r, names))
}

pub fn parse_structure(text: &str) -> Result<ConditionStructure> {
    let file: StructureFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.schema != STRUCTURE_SCHEMA {
        return Err(Error::Parse(format!("unsupported schema {:?}", file.schema)));
    }
    Ok(file.structure)
}

pub fn read_structure(path: &Path) -> Result<ConditionStructure> {
    parse_structure(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_round_trip_is_exact() {
        let text = "{\n  \"schema\": \"temporal-loops/relation/v1\",\n  \"arity\": 2,\n  \"dim\": 1,\n  \"orbits\": [\n    [\n      0,\n      1\n    ]\n  ]\n}\n";
        let (r, file) = parse_relation(text).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(to_json(&file).unwrap(), text);
        assert_eq!(relation_json(&r, None).unwrap(), text);
    }

    #[test]
    fn bad_input_is_a_parse_error() {
        for text in [
            "{",
            r#"{"schema":"x","arity":2,"dim":1,"orbits":[[0,1]]}"#,
            r#"{"schema":"temporal-loops/relation/v1","arity":2,"dim":1,"orbits":[[0,2]]}"#,
            r#"{"schema":"temporal-loops/relation/v1","arity":2,"dim":2,"orbits":[[0,1]]}"#,
        ] {
            let err = parse_relation(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
    }

    #[test]
    fn structure_file() {
        let text = r#"{"schema":"temporal-loops/structure/v1","name":"edge","vertices":["u","v"],"edges":[[0,1],[1,0]]}"#;
        let s = parse_structure(text).unwrap();
        assert_eq!(s.edges.len(), 2);
    }
}
