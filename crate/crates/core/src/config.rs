//! Algebra configurations: JSON schema, built-in presets and loading.
//!
//! ```json
//! {
//!   "type": "sl2" | "sl3" | "table",
//!   "basis": ["e", "f", "h"],                    // table only
//!   "brackets": [["e", "f", {"h": 1}], ...],     // table only, nonzero entries
//!   "form": [[0, 1, 0], ...],                    // optional
//!   "cartan": [{"h": 1}],                        // required for tables
//!   "n": 2,
//!   "m": [2, 1],
//!   "automorphisms": ["identity", {"diagonal": [...]}, {"matrix": [[...]]}],
//!   "elements": {"x": "e(1,0)"}
//! }
//! ```
//! In `{"matrix": ...}` column `j` holds the image of the `j`-th basis vector.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::expr::parse_element;
use crate::lattice::GradingLattice;
use crate::linalg::Mat;
use crate::scalar::CyclotomicField;
use crate::serial::{gelem_from_json, scalar_from_json};
use crate::simple_lie::{
    builtin, lie_torus_condition3, AutomorphismSet, GElem, LieTable, SimpleLieAlgebra, GROUP_ENUMERATION_BOUND,
};
use crate::tau::{TauAlgebra, TauElement};

const BUILTINS: [(&str, &str); 3] = [
    ("sl2_untwisted", include_str!("../../../configs/sl2_untwisted.json")),
    ("sl2_twisted", include_str!("../../../configs/sl2_twisted.json")),
    ("sl3_twisted", include_str!("../../../configs/sl3_twisted.json")),
];

/// Names of the embedded presets.
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

/// Source text of a preset, accepting `name`, `name.json` and `builtin:name`.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    let stem = name.strip_prefix("builtin:").unwrap_or(name);
    let stem = stem.strip_suffix(".json").unwrap_or(stem);
    BUILTINS.iter().find(|(n, _)| *n == stem).map(|(_, s)| *s)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    #[serde(rename = "type")]
    pub kind: String,
    pub n: usize,
    pub m: Vec<u32>,
    #[serde(default)]
    pub automorphisms: Vec<Value>,
    #[serde(default)]
    pub basis: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<Value>,
    #[serde(default)]
    pub form: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    pub cartan: Option<Vec<Value>>,
    #[serde(default)]
    pub elements: BTreeMap<String, String>,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub algebra: TauAlgebra,
    pub elements: BTreeMap<String, TauElement>,
}

impl LoadedConfig {
    pub fn condition3(&self) -> Result<bool> {
        lie_torus_condition3(self.algebra.automorphisms(), GROUP_ENUMERATION_BOUND)
    }
}

impl AlgebraConfig {
    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a file, falling back to the presets when no such file exists.
    pub fn load(path: &str) -> Result<Self> {
        if Path::new(path).exists() {
            let src = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
            return Self::from_json(&src);
        }
        match builtin_source(path) {
            Some(src) => Self::from_json(src),
            None => Err(Error::Config(format!(
                "{path}: no such file or preset (presets: {})",
                builtin_names().collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    pub fn build(&self) -> Result<LoadedConfig> {
        self.build_with(false)
    }

    /// Builds without the structure-table validations (negative controls only).
    pub fn build_unchecked(&self) -> Result<LoadedConfig> {
        self.build_with(true)
    }

    fn build_with(&self, unchecked: bool) -> Result<LoadedConfig> {
        if self.m.len() != self.n {
            return Err(Error::Config(format!(
                "n = {} but m has {} entries",
                self.n,
                self.m.len()
            )));
        }
        let lattice = GradingLattice::new(self.m.clone())?;
        let field = CyclotomicField::for_orders(&self.m)?;
        let lie = self.lie(field, unchecked)?;
        let auts = if self.automorphisms.is_empty() {
            if self.m.iter().any(|&m| m != 1) {
                return Err(Error::Config("automorphisms are required when some m_i > 1".into()));
            }
            AutomorphismSet::identity(&lie, self.n)
        } else {
            if self.automorphisms.len() != self.n {
                return Err(Error::Config(format!(
                    "{} automorphisms given for n = {}",
                    self.automorphisms.len(),
                    self.n
                )));
            }
            let mats = self
                .automorphisms
                .iter()
                .map(|a| automorphism_matrix(a, &lie))
                .collect::<Result<Vec<_>>>()?;
            AutomorphismSet::new(&lie, mats, self.m.clone())?
        };
        let algebra = TauAlgebra::new(lie, auts, lattice)?;
        let mut elements = BTreeMap::new();
        for (name, src) in &self.elements {
            let x = parse_element(src, &algebra).map_err(|e| Error::Config(format!("element {name:?}: {e}")))?;
            elements.insert(name.clone(), x);
        }
        Ok(LoadedConfig { algebra, elements })
    }

    fn lie(&self, field: CyclotomicField, unchecked: bool) -> Result<SimpleLieAlgebra> {
        let mut table = match self.kind.as_str() {
            "sl2" => builtin::table_of(&builtin::sl2(field)?),
            "sl3" => builtin::table_of(&builtin::sl3(field)?),
            "table" => self.table(field)?,
            other => return Err(Error::Config(format!("unknown algebra type {other:?}"))),
        };
        if self.kind != "table" {
            if let Some(cartan) = &self.cartan {
                let probe = SimpleLieAlgebra::new_unchecked(field, table.clone())?;
                table.cartan = cartan
                    .iter()
                    .map(|c| gelem_from_json(&probe, c))
                    .collect::<Result<_>>()?;
            }
        }
        if unchecked {
            SimpleLieAlgebra::new_unchecked(field, table)
        } else {
            SimpleLieAlgebra::new(field, table)
        }
    }

    fn table(&self, field: CyclotomicField) -> Result<LieTable> {
        if self.basis.is_empty() {
            return Err(Error::Config("a table needs a nonempty \"basis\"".into()));
        }
        let index = |l: &Value| -> Result<usize> {
            let s = l
                .as_str()
                .ok_or_else(|| Error::Config(format!("expected a label, got {l}")))?;
            self.basis
                .iter()
                .position(|b| b == s)
                .ok_or_else(|| Error::Config(format!("unknown basis label {s:?}")))
        };
        let labelled = |v: &Value| -> Result<GElem> {
            let map = v
                .as_object()
                .ok_or_else(|| Error::Config(format!("expected a {{label: scalar}} map, got {v}")))?;
            let mut out = GElem::zero();
            for (label, c) in map {
                out.add_term(index(&Value::String(label.clone()))?, &scalar_from_json(c, field)?);
            }
            Ok(out)
        };
        let mut brackets = Vec::new();
        for b in &self.brackets {
            match b.as_array().map(Vec::as_slice) {
                Some([x, y, v]) => brackets.push((index(x)?, index(y)?, labelled(v)?)),
                _ => {
                    return Err(Error::Config(format!(
                        "bracket entries are [a, b, {{label: scalar}}], got {b}"
                    )))
                }
            }
        }
        let d = self.basis.len();
        let form = match &self.form {
            None => None,
            Some(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Config(format!("form must be {d} x {d}")));
                }
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(|c| scalar_from_json(c, field)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Some(Mat::from_rows(rows)?)
            }
        };
        let cartan = self
            .cartan
            .as_ref()
            .ok_or_else(|| Error::Config("a table needs a \"cartan\" list".into()))?
            .iter()
            .map(labelled)
            .collect::<Result<_>>()?;
        Ok(LieTable {
            labels: self.basis.clone(),
            brackets,
            form,
            cartan,
        })
    }
}

fn automorphism_matrix(v: &Value, lie: &SimpleLieAlgebra) -> Result<Mat> {
    let field = lie.field();
    let d = lie.dim();
    if v.as_str() == Some("identity") {
        return Ok(Mat::identity(field, d));
    }
    if let Some(Value::Array(diag)) = v.get("diagonal") {
        if diag.len() != d {
            return Err(Error::Config(format!("diagonal automorphism needs {d} entries")));
        }
        let mut m = Mat::zeros(field, d, d);
        for (i, c) in diag.iter().enumerate() {
            m[(i, i)] = scalar_from_json(c, field)?;
        }
        return Ok(m);
    }
    if let Some(Value::Array(rows)) = v.get("matrix") {
        if rows.len() != d {
            return Err(Error::Config(format!("automorphism matrix must be {d} x {d}")));
        }
        let mut out = Vec::with_capacity(d);
        for r in rows {
            let r = r
                .as_array()
                .filter(|r| r.len() == d)
                .ok_or_else(|| Error::Config(format!("automorphism matrix must be {d} x {d}")))?;
            out.push(
                r.iter()
                    .map(|c| scalar_from_json(c, field))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        return Mat::from_rows(out);
    }
    Err(Error::Config(format!(
        "automorphism must be \"identity\", {{\"diagonal\": ...}} or {{\"matrix\": ...}}, got {v}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_load() {
        for name in builtin_names() {
            let cfg = AlgebraConfig::load(name).unwrap().build().unwrap();
            assert!(cfg.condition3().unwrap(), "{name}");
            assert!(!cfg.elements.is_empty());
        }
        assert!(AlgebraConfig::load("builtin:sl3_twisted").is_ok());
        assert!(AlgebraConfig::load("sl2_untwisted.json").is_ok());
        assert!(AlgebraConfig::load("nope").is_err());
    }

    #[test]
    fn corrupted_table_fails_validation() {
        let src = include_str!("../../../configs/sl2_corrupted.json");
        let cfg = AlgebraConfig::from_json(src).unwrap();
        assert!(matches!(cfg.build(), Err(Error::Validation(_))));
        assert!(cfg.build_unchecked().is_ok());
    }

    #[test]
    fn table_equals_builtin() {
        let mut src: Value = serde_json::from_str(include_str!("../../../configs/sl2_corrupted.json")).unwrap();
        src["brackets"][0][2] = serde_json::json!({"h": 1});
        let cfg = AlgebraConfig::from_json(&src.to_string()).unwrap().build().unwrap();
        let f = cfg.algebra.field();
        let b = builtin::sl2(f).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(cfg.algebra.lie().structure_constant(i, j), b.structure_constant(i, j));
            }
        }
    }
}
