//! Dual Mannheim pairs: curves `C̃`, `C̃₁` whose principal normal and
//! binormal lines coincide at corresponding points.
//!
//! Frames follow the usual convention (`κ.re ≥ 0`), so `ñ` and `b̃₁` may
//! be parallel or antiparallel. The sign `σ` with `ñ = σ b̃₁` is fixed per
//! pair from the first sample, and every relation checked here is written
//! with `σ` in place. Printed variants that assume one particular
//! orientation are kept as non-gating diagnostics.

mod bundle;
mod check;
mod construct;
mod report;
mod theorems;

use serde::{Deserialize, Serialize};

use crate::curve::{DualCurve, FrenetData};
use crate::dual::DualScalar;
use crate::tolerance::Tolerances;
use crate::vector::DualVec3;

pub use bundle::{read_bundle, write_bundle, BundleMeta, PairBundle, BUNDLE_C1_FILE, BUNDLE_C_FILE, BUNDLE_META_FILE};
pub use check::{check_mannheim_condition, check_partner_ode, pair_check, PairCheck};
pub use construct::{
    generate_pair, mannheim_curvature, mannheim_from_partner, mannheim_from_partner_on,
    partner_from_mannheim, partner_from_mannheim_on, partner_of_straight_line, PairSpec,
    OFFSET_NODES,
};
pub use report::{CheckResult, Finding, Residuals, TheoremReport};
pub use theorems::{osculating_ratio, verify_theorems, OsculatingRatio, OsculatingSample};

/// Knobs for correspondence sampling and verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PairOptions {
    /// Number of parameters sampled on `C̃`.
    pub samples: usize,
    /// Samples where either real curvature falls below this are excluded
    /// from frame-based checks (the frame is ill-conditioned there).
    pub min_curvature: f64,
    /// Coarse scan density on `C̃₁`, per sample on `C̃`.
    pub scan_factor: usize,
    pub tol: Tolerances,
}

impl Default for PairOptions {
    fn default() -> Self {
        PairOptions {
            samples: 256,
            min_curvature: 1e-2,
            scan_factor: 4,
            tol: Tolerances::default(),
        }
    }
}

/// Data at one pair of corresponding points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSample {
    /// Parameter on `C̃`.
    pub t: f64,
    /// Corresponding parameter on `C̃₁`.
    pub t1: f64,
    pub point: DualVec3,
    pub point1: DualVec3,
    pub frame: FrenetData,
    pub frame1: FrenetData,
    /// Dual angle from `t̃₁` to `t̃`, measured towards `ñ₁`.
    pub theta: DualScalar,
    /// `λ̃ cot θ̃`, absent where `sin θ` vanishes.
    pub mu: Option<DualScalar>,
    /// `dt₁/dt` along the correspondence.
    pub dt1_dt: f64,
    /// `ds̃₁/ds̃`.
    pub ds1_ds: DualScalar,
}

/// A validated pair with its sampled correspondence.
#[derive(Debug, Clone)]
pub struct MannheimPair {
    pub curve_c: DualCurve,
    pub curve_c1: DualCurve,
    /// Offset constant recovered as the mean of `⟨α̃ − α̃₁, b̃₁⟩`.
    pub lambda: DualScalar,
    /// `ñ = σ b̃₁`.
    pub sigma: f64,
    pub samples: Vec<PairSample>,
    /// Correspondence points dropped for low curvature or missing frames.
    pub excluded: usize,
    pub options: PairOptions,
}

impl MannheimPair {
    /// The sampled correspondence `t ↦ t₁`.
    pub fn correspondence(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, s.t1)).collect()
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.lambda,
            "sigma": self.sigma,
            "samples": self.samples.len(),
            "excluded": self.excluded,
            "min_curvature": self.options.min_curvature,
            "domain_c": self.curve_c.domain(),
            "domain_c1": self.curve_c1.domain(),
        })
    }
}
