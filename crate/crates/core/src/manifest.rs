//! JSON database manifests.
//!
//! ```json
//! {"schema": [{"name": "R", "arity": 2}],
//!  "relations": {"R": [{"tuple": [1, "a"], "endogenous": true}]}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Constant, Database, Fact, Provenance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaEntry {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactEntry {
    pub tuple: Vec<Value>,
    pub endogenous: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatabaseManifest {
    #[serde(default)]
    pub schema: Vec<SchemaEntry>,
    pub relations: BTreeMap<String, Vec<FactEntry>>,
}

fn to_constant(v: &Value) -> Constant {
    match v {
        Value::Int(i) => Constant::int(*i),
        Value::Str(s) => Constant::sym(s),
    }
}

fn to_value(c: &Constant) -> Result<Value> {
    match c {
        Constant::Int(i) => i64::try_from(i)
            .map(Value::Int)
            .map_err(|_| Error::OutOfRange(format!("{i} does not fit in 64 bits"))),
        Constant::Sym(s) => Ok(Value::Str(s.clone())),
    }
}

impl DatabaseManifest {
    pub fn to_database(&self) -> Result<Database> {
        let mut d = Database::new();
        for s in &self.schema {
            d.declare(&s.name, s.arity)?;
        }
        for (rel, facts) in &self.relations {
            for f in facts {
                let prov = if f.endogenous { Provenance::Endogenous } else { Provenance::Exogenous };
                d.insert(Fact::new(rel, f.tuple.iter().map(to_constant).collect()), prov)?;
            }
        }
        Ok(d)
    }

    pub fn from_database(d: &Database) -> Result<Self> {
        let mut relations: BTreeMap<String, Vec<FactEntry>> = BTreeMap::new();
        let schema = d
            .schema()
            .into_iter()
            .map(|s| SchemaEntry { name: s.name, arity: s.arity })
            .collect();
        for (f, p) in d.facts() {
            relations.entry(f.relation.clone()).or_default().push(FactEntry {
                tuple: f.tuple.iter().map(to_value).collect::<Result<_>>()?,
                endogenous: p == Provenance::Endogenous,
            });
        }
        Ok(DatabaseManifest { schema, relations })
    }
}

pub fn parse_manifest(text: &str) -> Result<Database> {
    let m: DatabaseManifest = serde_json::from_str(text).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
    m.to_database()
}

pub fn manifest_json(d: &Database) -> Result<String> {
    let m = DatabaseManifest::from_database(d)?;
    Ok(serde_json::to_string_pretty(&m).expect("manifest serializes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"schema":[{"name":"R","arity":2},{"name":"T","arity":1}],
            "relations":{"R":[{"tuple":[1,"a"],"endogenous":true},{"tuple":[2,"b"],"endogenous":false}]}}"#;
        let d = parse_manifest(text).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.arity("T"), Some(1));
        assert!(d.is_endogenous(&Fact::new("R", vec![Constant::int(1), Constant::sym("a")])));
        assert_eq!(parse_manifest(&manifest_json(&d).unwrap()).unwrap(), d);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_manifest("{"), Err(Error::Parse(_))));
        let dup = r#"{"relations":{"R":[{"tuple":[1],"endogenous":true},{"tuple":[1],"endogenous":false}]}}"#;
        assert!(matches!(parse_manifest(dup), Err(Error::DuplicateFact(_))));
        let arity = r#"{"schema":[{"name":"R","arity":2}],"relations":{"R":[{"tuple":[1],"endogenous":true}]}}"#;
        assert!(parse_manifest(arity).is_err());
    }
}
