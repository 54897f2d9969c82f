//! Instance description files and `key=value` instance arguments.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::catalog::{Space, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::model::{Atom, InstanceKind};
use crate::spaces::{Ellentuck, EllentuckParams, Fin, FinParams, Tree, TreeParams};

/// On-disk form: `{"instance": ..., "levels": [[atom, ...], ...], "params": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub instance: InstanceKind,
    #[serde(default)]
    pub levels: Vec<Vec<Atom>>,
    #[serde(default)]
    pub params: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceSpec {
    Ellentuck(EllentuckParams),
    Fin(FinParams),
    Tree(TreeParams),
}

fn param_usize(params: &Map<String, Value>, keys: &[&str]) -> Result<Option<usize>> {
    for k in keys {
        if let Some(v) = params.get(*k) {
            return v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| Error::Input(format!("parameter '{k}' must be a natural number")));
        }
    }
    Ok(None)
}

fn required(params: &Map<String, Value>, keys: &[&str], kind: &str) -> Result<usize> {
    param_usize(params, keys)?.ok_or_else(|| Error::Input(format!("{kind} needs parameter '{}'", keys[0])))
}

impl InstanceSpec {
    pub fn kind(&self) -> InstanceKind {
        match self {
            InstanceSpec::Ellentuck(_) => InstanceKind::Ellentuck,
            InstanceSpec::Fin(_) => InstanceKind::Fin,
            InstanceSpec::Tree(_) => InstanceKind::Tree,
        }
    }

    /// Parses `ellentuck N=6`, `fin blocks=4 span_cap=2`, `tree b=2 h=3`.
    pub fn parse_args(kind: &str, args: &[String]) -> Result<Self> {
        let mut params = Map::new();
        for a in args {
            let (k, v) = a
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("expected key=value, got '{a}'")))?;
            let n: u64 = v
                .parse()
                .map_err(|_| Error::Input(format!("'{k}' must be a natural number")))?;
            params.insert(k.to_string(), Value::from(n));
        }
        let instance = match kind {
            "ellentuck" => InstanceKind::Ellentuck,
            "fin" => InstanceKind::Fin,
            "tree" => InstanceKind::Tree,
            other => return Err(Error::Input(format!("unknown instance '{other}'"))),
        };
        Self::from_file(&InstanceFile {
            instance,
            levels: Vec::new(),
            params,
        })
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let p = &file.params;
        let known: &[&str] = match file.instance {
            InstanceKind::Ellentuck => &["N", "n"],
            InstanceKind::Fin => &["blocks", "span_cap", "span"],
            InstanceKind::Tree => &["b", "branching", "h", "height"],
        };
        if let Some(k) = p.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Input(format!("unknown parameter '{k}' for {}", file.instance)));
        }
        let spec = match file.instance {
            InstanceKind::Ellentuck => {
                let n = match param_usize(p, &["N", "n"])? {
                    Some(n) => n,
                    None if !file.levels.is_empty() => file.levels.len(),
                    None => return Err(Error::Input("ellentuck needs parameter 'N'".into())),
                };
                InstanceSpec::Ellentuck(EllentuckParams { n })
            }
            InstanceKind::Fin => {
                let blocks = if file.levels.is_empty() {
                    FinParams::singletons(required(p, &["blocks"], "fin")?).blocks
                } else {
                    if let Some(k) = param_usize(p, &["blocks"])? {
                        if k != file.levels.len() {
                            return Err(Error::Input(format!(
                                "blocks={k} but {} levels given",
                                file.levels.len()
                            )));
                        }
                    }
                    file.levels.clone()
                };
                InstanceSpec::Fin(FinParams {
                    blocks,
                    span_cap: param_usize(p, &["span_cap", "span"])?,
                })
            }
            InstanceKind::Tree => InstanceSpec::Tree(TreeParams {
                branching: required(p, &["b", "branching"], "tree")?,
                height: required(p, &["h", "height"], "tree")?,
            }),
        };
        if !file.levels.is_empty() {
            let expected = spec.to_file()?.levels;
            if expected != file.levels {
                return Err(Error::Input(format!(
                    "levels do not match the {} parameters",
                    file.instance
                )));
            }
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        let file: InstanceFile =
            serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::from_file(&file)
    }

    /// Full description with the ground levels written out.
    pub fn to_file(&self) -> Result<InstanceFile> {
        let mut params = Map::new();
        let ground = match self {
            InstanceSpec::Ellentuck(e) => {
                params.insert("N".into(), e.n.into());
                Ellentuck::new(*e)?.ground_levels()
            }
            InstanceSpec::Fin(f) => {
                if let Some(c) = f.span_cap {
                    params.insert("span_cap".into(), c.into());
                }
                f.blocks.clone()
            }
            InstanceSpec::Tree(t) => {
                params.insert("b".into(), t.branching.into());
                params.insert("h".into(), t.height.into());
                Tree::new(*t)?.ground_levels()
            }
        };
        Ok(InstanceFile {
            instance: self.kind(),
            levels: ground,
            params,
        })
    }

    pub fn span_cap(&self) -> Option<usize> {
        match self {
            InstanceSpec::Fin(f) => f.span_cap,
            _ => None,
        }
    }

    pub fn build(&self) -> Result<Space> {
        self.build_with_cap(DEFAULT_ENUM_CAP)
    }

    pub fn build_with_cap(&self, cap: usize) -> Result<Space> {
        match self {
            InstanceSpec::Ellentuck(p) => Space::with_cap(Arc::new(Ellentuck::new(*p)?), cap),
            InstanceSpec::Fin(p) => Space::with_cap(Arc::new(Fin::new(p.clone())?), cap),
            InstanceSpec::Tree(p) => Space::with_cap(Arc::new(Tree::new(*p)?), cap),
        }
    }
}

trait GroundLevels {
    fn ground_levels(&self) -> Vec<Vec<Atom>>;
}

impl<M: crate::model::SpaceModel> GroundLevels for M {
    fn ground_levels(&self) -> Vec<Vec<Atom>> {
        self.ground().levels.iter().map(|l| l.atoms.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn positional_forms() {
        assert_eq!(
            InstanceSpec::parse_args("ellentuck", &args(&["N=6"])).unwrap(),
            InstanceSpec::Ellentuck(EllentuckParams { n: 6 })
        );
        let fin = InstanceSpec::parse_args("fin", &args(&["blocks=4", "span_cap=2"])).unwrap();
        assert_eq!(fin, InstanceSpec::Fin(FinParams::singletons(4).with_span_cap(2)));
        assert!(InstanceSpec::parse_args("tree", &args(&["b=2"])).is_err());
        assert!(InstanceSpec::parse_args("ellentuck", &args(&["M=6"])).is_err());
        assert!(InstanceSpec::parse_args("cube", &args(&[])).is_err());
    }

    #[test]
    fn file_round_trip() {
        for spec in [
            InstanceSpec::Ellentuck(EllentuckParams { n: 4 }),
            InstanceSpec::Fin(FinParams {
                blocks: vec![vec![0, 1], vec![2], vec![5, 6]],
                span_cap: Some(2),
            }),
            InstanceSpec::Tree(TreeParams {
                branching: 2,
                height: 2,
            }),
        ] {
            let file = spec.to_file().unwrap();
            let text = serde_json::to_string(&file).unwrap();
            let back: InstanceFile = serde_json::from_str(&text).unwrap();
            assert_eq!(InstanceSpec::from_file(&back).unwrap(), spec);
        }
    }

    #[test]
    fn mismatched_levels_rejected() {
        let file: InstanceFile =
            serde_json::from_str(r#"{"instance":"ellentuck","levels":[[0],[2]],"params":{"N":2}}"#).unwrap();
        assert!(InstanceSpec::from_file(&file).is_err());
    }
}
