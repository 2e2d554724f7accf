//! On-disk form of a pair: two curve tables and a metadata file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{pair_check, MannheimPair, PairCheck, PairOptions, OFFSET_NODES};
use crate::curve::{uniform_grid, DualCurve, TabulatedCurve};
use crate::dual::DualScalar;
use crate::error::{Error, Result};

pub const BUNDLE_C_FILE: &str = "c.csv";
pub const BUNDLE_C1_FILE: &str = "c1.csv";
pub const BUNDLE_META_FILE: &str = "pair.json";

/// Node spacing used when writing curve tables.
const BUNDLE_SPACING: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub lambda: DualScalar,
    pub sigma: f64,
    pub options: PairOptions,
    pub c_file: String,
    pub c1_file: String,
}

#[derive(Debug, Clone)]
pub struct PairBundle {
    pub c: TabulatedCurve,
    pub c1: TabulatedCurve,
    pub meta: BundleMeta,
}

impl PairBundle {
    pub fn curves(&self) -> Result<(DualCurve, DualCurve)> {
        Ok((self.c.clone().into_curve()?, self.c1.clone().into_curve()?))
    }

    /// Re-run the correspondence check on the stored tables.
    pub fn check(&self, options: &PairOptions) -> Result<PairCheck> {
        let (c, c1) = self.curves()?;
        pair_check(&c, &c1, options)
    }
}

fn table(curve: &DualCurve) -> Result<TabulatedCurve> {
    let (a, b) = curve.domain();
    let n = (((b - a) / BUNDLE_SPACING).ceil() as usize + 1).max(OFFSET_NODES);
    TabulatedCurve::sample(curve, uniform_grid(a, b, n))
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

/// Write `c.csv`, `c1.csv` and `pair.json` into `dir`, creating it.
pub fn write_bundle(dir: &Path, pair: &MannheimPair) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let meta = BundleMeta {
        lambda: pair.lambda,
        sigma: pair.sigma,
        options: pair.options,
        c_file: BUNDLE_C_FILE.into(),
        c1_file: BUNDLE_C1_FILE.into(),
    };
    for (name, curve) in [(BUNDLE_C_FILE, &pair.curve_c), (BUNDLE_C1_FILE, &pair.curve_c1)] {
        let path = dir.join(name);
        fs::write(&path, table(curve)?.to_csv()).map_err(|e| io_err(&path, e))?;
    }
    let path = dir.join(BUNDLE_META_FILE);
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    fs::write(&path, json).map_err(|e| io_err(&path, e))
}

pub fn read_bundle(dir: &Path) -> Result<PairBundle> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|e| io_err(&path, e))
    };
    let meta: BundleMeta = serde_json::from_str(&read(BUNDLE_META_FILE)?)
        .map_err(|e| Error::InvalidInput(format!("{BUNDLE_META_FILE}: {e}")))?;
    let c = TabulatedCurve::from_csv(&read(&meta.c_file)?)?;
    let c1 = TabulatedCurve::from_csv(&read(&meta.c1_file)?)?;
    Ok(PairBundle { c, c1, meta })
}
