//! Problem instances and their JSON file form.
//!
//! Complex entries serialize as `{"re": .., "im": ..}` objects and matrices
//! as arrays of rows.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{CMat, RANK_TOL};
use crate::space::SemiSpace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexEntry {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexEntry> for Complex64 {
    fn from(z: ComplexEntry) -> Self {
        Complex64::new(z.re, z.im)
    }
}

pub type MatrixRows = Vec<Vec<ComplexEntry>>;

pub fn matrix_to_rows(m: &CMat) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

/// Parses rows into a matrix, rejecting ragged rows and non-finite entries.
pub fn rows_to_matrix(name: &str, rows: &MatrixRows) -> Result<CMat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::InvalidInstance(format!(
            "{name}: row {} has {} entries, expected {ncols}",
            i + 1,
            rows[i].len()
        )));
    }
    if rows
        .iter()
        .flatten()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidInstance(format!("{name}: non-finite entry")));
    }
    Ok(CMat::from_fn(nrows, ncols, |i, j| rows[i][j].into()))
}

/// Serialized instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(rename = "A")]
    pub a: MatrixRows,
    pub operators: BTreeMap<String, MatrixRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_shape: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    /// Operator name to generator label.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tags: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, ComplexEntry>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

/// A weight together with named operators on its space.
#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: Option<u64>,
    pub profile: Option<String>,
    pub space: SemiSpace,
    pub operators: BTreeMap<String, CMat>,
    pub block_shape: Option<usize>,
    /// Operator name to generator label (`member`, `square_zero`, ...).
    pub tags: BTreeMap<String, String>,
    pub scalars: BTreeMap<String, Complex64>,
}

impl Instance {
    pub fn new(space: SemiSpace) -> Self {
        Self {
            seed: None,
            profile: None,
            space,
            operators: BTreeMap::new(),
            block_shape: None,
            tags: BTreeMap::new(),
            scalars: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rank(&self) -> usize {
        self.space.rank()
    }

    pub fn op(&self, name: &str) -> Option<&CMat> {
        self.operators.get(name)
    }

    pub fn insert(&mut self, name: &str, t: CMat, tag: &str) {
        self.operators.insert(name.to_string(), t);
        self.tags.insert(name.to_string(), tag.to_string());
    }

    /// Names of operators carrying `tag`, in name order.
    pub fn tagged(&self, tag: &str) -> Vec<&str> {
        self.tags
            .iter()
            .filter(|(name, t)| t.as_str() == tag && self.operators.contains_key(*name))
            .map(|(name, _)| name.as_str())
            .collect()
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            a: matrix_to_rows(self.space.weight()),
            operators: self
                .operators
                .iter()
                .map(|(k, m)| (k.clone(), matrix_to_rows(m)))
                .collect(),
            block_shape: self.block_shape,
            tol: Some(self.space.tol()),
            seed: self.seed,
            profile: self.profile.clone(),
            tags: self.tags.clone(),
            scalars: self
                .scalars
                .iter()
                .map(|(k, z)| (k.clone(), (*z).into()))
                .collect(),
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let a = rows_to_matrix("A", &file.a)?;
        if a.nrows() != a.ncols() {
            return Err(Error::NonSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        let tol = file.tol.unwrap_or(RANK_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidInstance(format!(
                "tol must lie in (0, 1), got {tol}"
            )));
        }
        let n = a.nrows();
        let mut inst = Instance::new(SemiSpace::new(&a, tol)?);
        for (name, rows) in &file.operators {
            let t = rows_to_matrix(name, rows)?;
            if t.nrows() != n || t.ncols() != n {
                return Err(Error::InvalidInstance(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    t.nrows(),
                    t.ncols()
                )));
            }
            inst.operators.insert(name.clone(), t);
        }
        if let Some(k) = file.block_shape {
            if k == 0 {
                return Err(Error::InvalidInstance(
                    "block_shape must be at least 1".into(),
                ));
            }
        }
        inst.block_shape = file.block_shape;
        inst.seed = file.seed;
        inst.profile = file.profile.clone();
        inst.tags = file.tags.clone();
        inst.scalars = file
            .scalars
            .iter()
            .map(|(k, z)| (k.clone(), (*z).into()))
            .collect();
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{c, diag_real, real_mat};

    #[test]
    fn json_shape_and_parse_back() {
        let s = SemiSpace::with_default_tol(&diag_real(&[1.0, 0.0])).unwrap();
        let mut inst = Instance::new(s);
        inst.insert("T", real_mat(2, 2, &[1.0, 0.0, 2.0, 3.0]), "member");
        inst.scalars.insert("z1".into(), c(0.5, -1.0));
        let text = inst.to_file().to_json_pretty();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["A"][0][0], serde_json::json!({"re": 1.0, "im": 0.0}));
        assert_eq!(v["operators"]["T"][1][0]["re"], 2.0);
        let back = Instance::from_file(&InstanceFile::from_json(&text).unwrap()).unwrap();
        assert_eq!(back.op("T"), inst.op("T"));
        assert_eq!(back.space.weight(), inst.space.weight());
        assert_eq!(back.scalars["z1"], c(0.5, -1.0));
    }

    #[test]
    fn rejects_bad_files() {
        let bad = [
            r#"{"A": [[{"re":1,"im":0}, {"re":0,"im":0}]], "operators": {}}"#,
            r#"{"A": [[{"re":1,"im":0}]], "operators": {"T": [[{"re":1,"im":0},{"re":1,"im":0}]]}}"#,
            r#"{"A": [[{"re":1e400,"im":0}]], "operators": {}}"#,
            r#"{"A": [[{"re":1,"im":0}], []], "operators": {}}"#,
            r#"{"A": [[{"re":-1,"im":0}]], "operators": {}}"#,
            r#"{"A": [[{"re":1,"im":0}]], "operators": {}, "tol": 0}"#,
            r#"{"A": [[{"re":1,"im":0}]], "operators": {}, "extra": 1}"#,
        ];
        for text in bad {
            let parsed = InstanceFile::from_json(text).and_then(|f| Instance::from_file(&f));
            assert!(parsed.is_err(), "{text}");
        }
    }
}
