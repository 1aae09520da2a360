//! Report data emitted by the verification suite and the CLI.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// One named consistency check with its witness data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub witness: String,
}

/// Dimensions attached to one regular character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaReport {
    /// Structure-field encodings of the character parameters.
    pub params: Vec<u64>,
    #[serde(rename = "dim_S")]
    pub dim_s: usize,
    #[serde(rename = "dim_D")]
    pub dim_d: usize,
    /// Index of the torus orbit this character belongs to.
    pub orbit: usize,
}

/// The full instance report: dimensions per regular character plus every
/// named check.  Serializes to the documented JSON shape.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorReport {
    pub group: String,
    pub n: usize,
    pub q: u64,
    pub p: u64,
    pub f: u32,
    pub ell: u64,
    pub m: u32,
    #[serde(rename = "index_GB")]
    pub index_gb: usize,
    #[serde(rename = "dim_St")]
    pub dim_st: usize,
    pub sigmas: Vec<SigmaReport>,
    #[serde(serialize_with = "checks_as_map")]
    pub checks: Vec<CheckResult>,
    pub elapsed_ms: u64,
}

impl FactorReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// `dim D <= dim S <= dim St <= [G:B]` for every character.
    pub fn dims_consistent(&self) -> bool {
        self.sigmas
            .iter()
            .all(|s| s.dim_d <= s.dim_s && s.dim_s <= self.dim_st && self.dim_st <= self.index_gb)
    }
}

fn checks_as_map<S: Serializer>(checks: &[CheckResult], ser: S) -> Result<S::Ok, S::Error> {
    // Sorted keys keep the serialized form canonical.
    let mut sorted: Vec<&CheckResult> = checks.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let mut map = ser.serialize_map(Some(sorted.len()))?;
    for c in sorted {
        map.serialize_entry(&c.name, &c.pass)?;
    }
    map.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_to_documented_shape() {
        let report = FactorReport {
            group: "gl".into(),
            n: 2,
            q: 3,
            p: 3,
            f: 1,
            ell: 2,
            m: 2,
            index_gb: 4,
            dim_st: 3,
            sigmas: vec![SigmaReport { params: vec![1], dim_s: 3, dim_d: 2, orbit: 0 }],
            checks: vec![
                CheckResult { name: "b_check".into(), pass: true, witness: "w".into() },
                CheckResult { name: "a_check".into(), pass: false, witness: "w".into() },
            ],
            elapsed_ms: 7,
        };
        let json: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(json["index_GB"], 4);
        assert_eq!(json["dim_St"], 3);
        assert_eq!(json["sigmas"][0]["dim_S"], 3);
        assert_eq!(json["sigmas"][0]["dim_D"], 2);
        assert_eq!(json["checks"]["a_check"], false);
        assert_eq!(json["checks"]["b_check"], true);
        assert!(!report.all_passed());
        assert!(report.dims_consistent());
    }
}
