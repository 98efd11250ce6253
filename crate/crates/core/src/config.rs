//! Tolerances and sampling parameters shared by every analysis stage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Contact tolerance, either absolute (model units) or relative to the
/// assembly bounding-box diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactTol {
    Absolute(f64),
    Relative(f64),
}

impl ContactTol {
    pub fn resolve(&self, bbox_diagonal: f64) -> f64 {
        match *self {
            ContactTol::Absolute(v) => v,
            ContactTol::Relative(f) => f * bbox_diagonal,
        }
    }

    fn value(&self) -> f64 {
        match *self {
            ContactTol::Absolute(v) | ContactTol::Relative(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Angular tolerance in radians for parallelism and zero-rotation tests.
    pub angle_tol: f64,
    /// Distance tolerance in model units for line coincidence and zero translation.
    pub dist_tol: f64,
    pub contact_tol: ContactTol,
    /// Penetration tolerance as a fraction of the swept pair's bounding-box diagonal.
    pub penetration_tol: f64,
    /// Sweep rotation magnitudes in degrees; each is tried with both signs.
    pub rotation_samples_deg: Vec<f64>,
    /// Sweep translation magnitudes as fractions of the bounding-box diagonal; both signs.
    pub translation_samples: Vec<f64>,
    /// When false, the geometric-consistency filter only checks contact.
    pub require_mate_axis_candidate: bool,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            angle_tol: 1e-3,
            dist_tol: 1e-3,
            contact_tol: ContactTol::Relative(1e-3),
            penetration_tol: 1e-3,
            rotation_samples_deg: vec![5.0, 10.0, 20.0, 45.0],
            translation_samples: vec![0.005, 0.01, 0.02, 0.05],
            require_mate_axis_candidate: true,
            seed: 0,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("angle_tol", self.angle_tol)?;
        positive("dist_tol", self.dist_tol)?;
        positive("contact_tol", self.contact_tol.value())?;
        positive("penetration_tol", self.penetration_tol)?;
        for &v in &self.rotation_samples_deg {
            positive("rotation_samples_deg", v)?;
        }
        for &v in &self.translation_samples {
            positive("translation_samples", v)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ToleranceConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg = ToleranceConfig::from_json(r#"{"angle_tol": 0.01, "contact_tol": {"absolute": 0.5}}"#)
            .unwrap();
        assert_eq!(cfg.angle_tol, 0.01);
        assert_eq!(cfg.contact_tol.resolve(1000.0), 0.5);
        assert_eq!(cfg.dist_tol, 1e-3);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(ToleranceConfig::from_json(r#"{"dist_tol": 0.0}"#).is_err());
        assert!(ToleranceConfig::from_json(r#"{"rotation_samples_deg": [5.0, -1.0]}"#).is_err());
        assert!(ToleranceConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }
}
