//! Curves known only at nodes.

use std::sync::Arc;

use nalgebra::Vector3;

use super::{CurveSource, DualCurve};
use crate::error::{Error, Result};
use crate::numeric::{fd_weights, nearest_stencil};
use crate::vector::DualVec3;

const STENCIL: usize = 7;

/// Node table behind a sampled [`DualCurve`]. Stores positions and,
/// optionally, first and second derivatives at each node; derivatives of
/// any order come from local Lagrange interpolation of the highest stored
/// derivative not exceeding that order.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCurve {
    nodes: Vec<f64>,
    /// `derivs[k][i]` is the k-th derivative at `nodes[i]`.
    derivs: Vec<Vec<DualVec3>>,
}

impl TabulatedCurve {
    pub fn new(
        nodes: Vec<f64>,
        points: Vec<DualVec3>,
        tangents: Option<Vec<DualVec3>>,
    ) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "tabulated curve needs >= 2 nodes and one point per node ({} vs {})",
                nodes.len(),
                points.len()
            )));
        }
        if !nodes.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidInput("tabulated curve has non-finite nodes".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("nodes must be strictly increasing".into()));
        }
        let mut tab = TabulatedCurve {
            nodes,
            derivs: Vec::new(),
        };
        tab.push_level(points)?;
        if let Some(d) = tangents {
            tab.push_level(d)?;
        }
        Ok(tab)
    }

    /// Add stored second derivatives; requires first derivatives.
    pub fn with_second_derivatives(mut self, acc: Vec<DualVec3>) -> Result<Self> {
        if self.derivs.len() != 2 {
            return Err(Error::InvalidInput(
                "second derivatives need stored first derivatives".into(),
            ));
        }
        self.push_level(acc)?;
        Ok(self)
    }

    fn push_level(&mut self, v: Vec<DualVec3>) -> Result<()> {
        if v.len() != self.nodes.len() {
            return Err(Error::InvalidInput("one value per node required".into()));
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("tabulated curve has non-finite data".into()));
        }
        self.derivs.push(v);
        Ok(())
    }

    /// Highest stored derivative order.
    pub fn stored_order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn points(&self) -> &[DualVec3] {
        &self.derivs[0]
    }

    pub fn tangents(&self) -> Option<&[DualVec3]> {
        self.derivs.get(1).map(|v| v.as_slice())
    }

    /// Sample `curve` at `nodes`, storing positions and first and second
    /// derivatives.
    pub fn sample(curve: &DualCurve, nodes: Vec<f64>) -> Result<Self> {
        let level = |k: usize| nodes.iter().map(|&t| curve.derivative(t, k)).collect::<Result<Vec<_>>>();
        let (points, tangents, acc) = (level(0)?, level(1)?, level(2)?);
        TabulatedCurve::new(nodes, points, Some(tangents))?.with_second_derivatives(acc)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn into_curve(self) -> Result<DualCurve> {
        let domain = self.domain();
        DualCurve::new(Arc::new(self), domain)
    }

    fn interpolate(values: &[DualVec3], nodes: &[f64], t: f64, order: usize) -> DualVec3 {
        let r = nearest_stencil(nodes, t, STENCIL);
        let w = fd_weights(t, &nodes[r.clone()], order);
        let mut acc = DualVec3::zero();
        for (j, c) in r.zip(&w[order]) {
            acc += values[j] * *c;
        }
        acc
    }

    /// CSV with header `t,re_x,re_y,re_z,du_x,du_y,du_z`, followed by
    /// `d_*` columns for stored first derivatives and `dd_*` columns for
    /// stored second derivatives.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for prefix in ["", "d_", "dd_"].iter().take(self.derivs.len()) {
            for part in ["re", "du"] {
                for axis in ["x", "y", "z"] {
                    out.push_str(&format!(",{prefix}{part}_{axis}"));
                }
            }
        }
        out.push('\n');
        for (i, t) in self.nodes.iter().enumerate() {
            let mut row = vec![*t];
            for level in &self.derivs {
                push_vec(&mut row, &level[i]);
            }
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty curve CSV".into()))?;
        let cols = header.split(',').count();
        if !matches!(cols, 7 | 13 | 19) {
            return Err(Error::InvalidInput(format!(
                "curve CSV needs 7, 13 or 19 columns, header has {cols}"
            )));
        }
        let levels = (cols - 1) / 6;
        let mut nodes = Vec::new();
        let mut data: Vec<Vec<DualVec3>> = vec![Vec::new(); levels];
        for (n, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidInput(format!("curve CSV row {}: {e}", n + 2)))?;
            if row.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "curve CSV row {} has {} cells, expected {cols}",
                    n + 2,
                    row.len()
                )));
            }
            nodes.push(row[0]);
            for (k, level) in data.iter_mut().enumerate() {
                level.push(read_vec(&row[1 + 6 * k..7 + 6 * k]));
            }
        }
        let mut data = data.into_iter();
        let points = data.next().unwrap_or_default();
        let mut tab = TabulatedCurve::new(nodes, points, data.next())?;
        if let Some(acc) = data.next() {
            tab = tab.with_second_derivatives(acc)?;
        }
        Ok(tab)
    }
}

fn push_vec(row: &mut Vec<f64>, v: &DualVec3) {
    row.extend(v.re.iter());
    row.extend(v.du.iter());
}

fn read_vec(c: &[f64]) -> DualVec3 {
    DualVec3::new(Vector3::new(c[0], c[1], c[2]), Vector3::new(c[3], c[4], c[5]))
}

impl CurveSource for TabulatedCurve {
    fn eval(&self, t: f64) -> Result<DualVec3> {
        Ok(Self::interpolate(&self.derivs[0], &self.nodes, t, 0))
    }

    fn derivative(&self, t: f64, order: usize) -> Option<Result<DualVec3>> {
        let level = order.min(self.stored_order());
        Some(Ok(Self::interpolate(&self.derivs[level], &self.nodes, t, order - level)))
    }

    fn has_derivatives(&self) -> bool {
        true
    }
}
