//! The AsBeC technologies: enhancements of the colony organisation and the
//! super-bee hybridizations, each usable on its own.

mod allocation;
mod movement;
mod prophet;
mod scout;
mod superbee;

pub use allocation::{biased_allocation, rescale_fitness, OnlookerAllocation};
pub use movement::{opposite_point, parabola_vertex, select_dims, Vertex, VERTEX_CURVATURE_EPS};
pub use prophet::{prophet_guess, ProphetHistory};
pub use scout::{diameters, smart_scout_position};
pub use superbee::{Emitted, MoveRecord, SuperBeeState, VERTEX_STEP_RATIO};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Toggles and parameters selecting between plain ABC and AsBeC behaviour.
///
/// Field names double as config-file keys and CLI flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TechnologySet {
    /// Passes per bee group between hive dances; `1` disables the technology.
    pub check: u32,
    /// Strictly biased onlooker assignment.
    pub biased: bool,
    /// Move a random number of parameters instead of one.
    pub multi_param: bool,
    /// Scouts sample the hull spanned by the food sources.
    pub smart_scout: bool,
    pub opposition: bool,
    /// Second-order interpolation; requires `opposition`.
    pub interpolation: bool,
    /// Prophet catalyst; `None` disables the prophet.
    pub prophet_catalyst: Option<f64>,
    /// Length of the optimal-path memory feeding the prophet.
    pub prophet_memory: usize,
}

impl Default for TechnologySet {
    fn default() -> Self {
        Self::abc()
    }
}

impl TechnologySet {
    /// Plain ABC: everything off.
    pub fn abc() -> Self {
        Self {
            check: 1,
            biased: false,
            multi_param: false,
            smart_scout: false,
            opposition: false,
            interpolation: false,
            prophet_catalyst: None,
            prophet_memory: 4,
        }
    }

    /// The selected serial AsBeC combination.
    pub fn asbec() -> Self {
        Self {
            check: 3,
            biased: true,
            opposition: true,
            interpolation: true,
            prophet_catalyst: Some(0.5),
            ..Self::abc()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.check == 0 {
            return Err(Error::Config("check must be at least 1".into()));
        }
        if self.interpolation && !self.opposition {
            return Err(Error::Config("interpolation requires opposition to be enabled".into()));
        }
        if let Some(c) = self.prophet_catalyst {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::Config(format!(
                    "prophet catalyst must be finite and non-negative, got {c}"
                )));
            }
            if self.prophet_memory < 2 {
                return Err(Error::Config("prophet memory must be at least 2".into()));
            }
        }
        Ok(())
    }

    /// Whether bees keep a super-bee stage between visits.
    pub fn super_bee(&self) -> bool {
        self.opposition
    }

    pub fn prophet_enabled(&self) -> bool {
        self.prophet_catalyst.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        TechnologySet::abc().validate().unwrap();
        let a = TechnologySet::asbec();
        a.validate().unwrap();
        assert_eq!(a.check, 3);
        assert!(a.biased && a.opposition && a.interpolation);
        assert!(!a.multi_param && !a.smart_scout);
        assert_eq!(a.prophet_catalyst, Some(0.5));
        assert_eq!(a.prophet_memory, 4);
    }

    #[test]
    fn interpolation_needs_opposition() {
        let t = TechnologySet {
            interpolation: true,
            ..TechnologySet::abc()
        };
        assert!(matches!(t.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn zero_check_rejected() {
        let t = TechnologySet {
            check: 0,
            ..TechnologySet::abc()
        };
        assert!(t.validate().is_err());
    }

    #[test]
    fn json_keys() {
        let t: TechnologySet =
            serde_json::from_str(r#"{"check": 3, "biased": true, "prophet_catalyst": 0.5}"#).unwrap();
        assert_eq!(t.check, 3);
        assert!(t.biased);
        assert_eq!(t.prophet_memory, 4);
        assert!(serde_json::from_str::<TechnologySet>(r#"{"chek": 3}"#).is_err());
    }
}
