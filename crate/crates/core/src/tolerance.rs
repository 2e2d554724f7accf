use serde::{Deserialize, Serialize};

/// Numeric policy shared by every module. Defaults are desk-scale values
/// for `f64`; callers override individual fields or scale them all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Real-part norms at or below this are treated as zero.
    pub zero: f64,
    /// `|cos| >= 1 - parallel` is treated as parallel (no dual angle).
    pub parallel: f64,
    /// Real curvature at or below this leaves the Frenet frame undefined.
    pub kappa: f64,
    /// Threshold used by the straight-line and planarity classifiers.
    pub classify: f64,
    /// Normal/binormal parallelism threshold for Mannheim pairs.
    pub pair: f64,
    /// Threshold for theorem residuals.
    pub theorem: f64,
    /// Threshold for the partner ODE residual.
    pub ode: f64,
    /// Number of samples used by the classifiers.
    pub classify_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: 1e-12,
            parallel: 1e-9,
            kappa: 1e-10,
            classify: 1e-8,
            pair: 1e-6,
            theorem: 1e-6,
            ode: 1e-6,
            classify_samples: 64,
        }
    }
}

impl Tolerances {
    /// Multiply every threshold by `factor` (sample counts are unchanged).
    pub fn scaled(self, factor: f64) -> Self {
        Tolerances {
            zero: self.zero * factor,
            parallel: self.parallel * factor,
            kappa: self.kappa * factor,
            classify: self.classify * factor,
            pair: self.pair * factor,
            theorem: self.theorem * factor,
            ode: self.ode * factor,
            classify_samples: self.classify_samples,
        }
    }

    pub fn is_valid(&self) -> bool {
        [
            self.zero,
            self.parallel,
            self.kappa,
            self.classify,
            self.pair,
            self.theorem,
            self.ode,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0)
            && self.classify_samples >= 2
    }
}
