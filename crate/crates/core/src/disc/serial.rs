//! Disc files: component-major coefficient lists.
//!
//! ```json
//! { "dim": 4, "deg_max": 1, "lifted": true,
//!   "components": [[[1, 0], [-1, 0]], …] }
//! ```
//!
//! A lifted disc stores its `2N` components with the base first.

use super::{DiscError, LiftedDisc, PolyDisc};
use crate::linalg::C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscFile {
    pub dim: usize,
    pub deg_max: usize,
    #[serde(default)]
    pub lifted: bool,
    pub components: Vec<Vec<[f64; 2]>>,
}

impl DiscFile {
    fn from_disc(disc: &PolyDisc, lifted: bool) -> Self {
        DiscFile {
            dim: disc.dim(),
            deg_max: disc.degree(),
            lifted,
            components: disc.components().iter().map(|c| c.iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
    }

    fn to_disc(&self) -> Result<PolyDisc, DiscError> {
        if self.components.len() != self.dim {
            return Err(DiscError::Format(format!("dim = {} but {} components given", self.dim, self.components.len())));
        }
        if let Some(bad) = self.components.iter().position(|c| c.len() != self.deg_max + 1) {
            return Err(DiscError::Format(format!("component {bad} does not have deg_max + 1 = {} coefficients", self.deg_max + 1)));
        }
        if self.components.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(DiscError::Format("non-finite coefficient".into()));
        }
        Ok(PolyDisc::new(self.components.iter().map(|c| c.iter().map(|p| C64::new(p[0], p[1])).collect()).collect()))
    }
}

pub fn disc_to_json(disc: &PolyDisc) -> String {
    serde_json::to_string(&DiscFile::from_disc(disc, false)).expect("disc serializes")
}

pub fn lift_to_json(lift: &LiftedDisc) -> String {
    serde_json::to_string(&DiscFile::from_disc(&lift.as_disc().padded(lift.degree()), true)).expect("disc serializes")
}

fn parse(text: &str) -> Result<DiscFile, DiscError> {
    serde_json::from_str(text).map_err(|e| DiscError::Format(e.to_string()))
}

/// Reads a disc; the base of a lifted file is returned when `lifted` is set.
pub fn disc_from_json(text: &str) -> Result<PolyDisc, DiscError> {
    let file = parse(text)?;
    let disc = file.to_disc()?;
    Ok(if file.lifted { LiftedDisc::from_disc(&disc).base } else { disc })
}

pub fn lift_from_json(text: &str) -> Result<LiftedDisc, DiscError> {
    let file = parse(text)?;
    if !file.lifted || file.dim % 2 != 0 {
        return Err(DiscError::Format("not a lifted disc".into()));
    }
    Ok(LiftedDisc::from_disc(&file.to_disc()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::canonical_lift;
    use crate::linalg::{Tolerance, I};
    use crate::model::HermitianModel;

    #[test]
    fn round_trips() {
        let lift = canonical_lift(&HermitianModel::q1(), &[C64::new(1.0, 0.0), I], &[1.0, 1.0, 0.0], Tolerance::default()).unwrap();
        assert_eq!(lift_from_json(&lift_to_json(&lift)).unwrap(), lift);
        assert_eq!(disc_from_json(&lift_to_json(&lift)).unwrap(), lift.base);
        assert_eq!(disc_from_json(&disc_to_json(&lift.base)).unwrap(), lift.base);
        assert!(lift_from_json(&disc_to_json(&lift.base)).is_err());
    }
}
