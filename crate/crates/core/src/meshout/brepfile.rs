//! The brep file: the solid with its entity tables as a JSON document.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::brep::BrepSolid;
use crate::error::{Result, SweepError};

pub const BREP_VERSION: &str = "sweepforge-brep/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrepDocument {
    pub version: String,
    pub name: String,
    pub solid: BrepSolid,
}

pub fn to_brep_string(solid: &BrepSolid, name: &str) -> Result<String> {
    let doc = BrepDocument { version: BREP_VERSION.into(), name: name.into(), solid: solid.clone() };
    serde_json::to_string_pretty(&doc).map_err(|e| SweepError::Io(e.to_string()))
}

pub fn from_brep_str(text: &str) -> Result<BrepDocument> {
    let doc: BrepDocument = serde_json::from_str(text).map_err(|e| SweepError::InvalidInput(format!("brep file: {e}")))?;
    if doc.version != BREP_VERSION {
        return Err(SweepError::InvalidInput(format!("brep file version {} (expected {BREP_VERSION})", doc.version)));
    }
    Ok(doc)
}

pub fn write_brep(path: &Path, solid: &BrepSolid, name: &str) -> Result<()> {
    Ok(std::fs::write(path, to_brep_string(solid, name)?)?)
}

pub fn read_brep(path: &Path) -> Result<BrepDocument> {
    from_brep_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brep::test_solids::{ellipsoid, torus};

    #[test]
    fn round_trip_is_exact() {
        for s in [ellipsoid([1.0, 0.7, 1.3]), torus()] {
            let text = to_brep_string(&s, "x").unwrap();
            let back = from_brep_str(&text).unwrap();
            assert_eq!(back.solid, s);
            assert_eq!(to_brep_string(&back.solid, "x").unwrap(), text);
        }
    }

    #[test]
    fn wrong_version_rejected() {
        let text = to_brep_string(&torus(), "x").unwrap().replace(BREP_VERSION, "other/9");
        assert!(matches!(from_brep_str(&text), Err(SweepError::InvalidInput(_))));
    }
}
