//! Solution profiles along the crack/interface line and their normalisation.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Crack,
    Interface,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Crack => "crack",
            Region::Interface => "interface",
        }
    }
}

/// `F` and `l` used to make the output dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalization {
    pub force: f64,
    pub length: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization {
            force: 1.0,
            length: 1.0,
        }
    }
}

impl Normalization {
    pub fn new(force: f64, length: f64) -> Result<Self> {
        if !(force > 0.0 && length > 0.0 && force.is_finite() && length.is_finite()) {
            return Err(Error::validation(
                "normalisation F > 0, l > 0",
                format!("F = {force}, l = {length}"),
            ));
        }
        Ok(Normalization { force, length })
    }
}

/// Nodal values on the line. Crack rows carry the jump; interface rows carry
/// the traction and the jump it implies through the interface law. The tip
/// appears twice, once from each side. Traction is NaN on crack rows.
///
/// Vector fields are indexed `[component][row]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionProfile {
    pub components: Vec<usize>,
    pub x1: Vec<f64>,
    pub region: Vec<Region>,
    pub jump_u: Vec<Vec<f64>>,
    pub jump_u_star: Vec<Vec<f64>>,
    pub traction: Vec<Vec<f64>>,
    pub t_star: Vec<Vec<f64>>,
    pub normalization: Normalization,
    /// Divisor applied to the jump: `F·[√(S₄₄S₅₅)]_I` for mode III, `F` in-plane.
    pub jump_scale: f64,
    pub kappa_star: Option<f64>,
    pub formulation: String,
}

impl SolutionProfile {
    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }

    /// Index of the component with label `c` (1, 2 or 3).
    pub fn component_index(&self, c: usize) -> Option<usize> {
        self.components.iter().position(|&k| k == c)
    }

    /// Linear interpolation of the normalised jump of component slot `k`
    /// within `region`.
    pub fn jump_star_at(&self, k: usize, region: Region, x: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = (0..self.len())
            .filter(|&i| self.region[i] == region)
            .map(|i| (self.x1[i], self.jump_u_star[k][i]))
            .collect();
        interpolate(&pts, x)
    }
}

/// Piecewise-linear interpolation on ascending `(x, y)` samples; `None`
/// outside the sampled range.
pub fn interpolate(pts: &[(f64, f64)], x: f64) -> Option<f64> {
    let n = pts.len();
    if n == 0 || x < pts[0].0 || x > pts[n - 1].0 {
        return None;
    }
    if n == 1 {
        return Some(pts[0].1);
    }
    let k = pts.partition_point(|p| p.0 <= x).clamp(1, n - 1);
    let (x0, y0) = pts[k - 1];
    let (x1, y1) = pts[k];
    if x1 == x0 {
        return Some(y1);
    }
    let w = (x - x0) / (x1 - x0);
    Some(y0 * (1.0 - w) + y1 * w)
}

/// Raw per-component nodal data assembled by the solvers.
pub(crate) struct RawProfile<'a> {
    pub components: Vec<usize>,
    pub crack_x: &'a [f64],
    pub interface_x: &'a [f64],
    /// `[component][crack node]`
    pub jump: Vec<Vec<f64>>,
    /// `[component][interface node]`
    pub traction: Vec<Vec<f64>>,
    /// Jump implied by the interface law, `[component][interface node]`.
    pub interface_jump: Vec<Vec<f64>>,
}

pub(crate) fn build_profile(
    raw: RawProfile<'_>,
    norm: Normalization,
    jump_scale: f64,
    kappa_star: Option<f64>,
    formulation: &str,
) -> SolutionProfile {
    let nc = raw.components.len();
    let mut x1 = Vec::new();
    let mut region = Vec::new();
    let mut jump_u = vec![Vec::new(); nc];
    let mut traction = vec![Vec::new(); nc];
    for (i, &x) in raw.crack_x.iter().enumerate() {
        x1.push(x);
        region.push(Region::Crack);
        for k in 0..nc {
            jump_u[k].push(raw.jump[k][i]);
            traction[k].push(f64::NAN);
        }
    }
    for (i, &x) in raw.interface_x.iter().enumerate() {
        x1.push(x);
        region.push(Region::Interface);
        for k in 0..nc {
            jump_u[k].push(raw.interface_jump[k][i]);
            traction[k].push(raw.traction[k][i]);
        }
    }
    let jump_u_star = jump_u
        .iter()
        .map(|c| c.iter().map(|v| v / jump_scale).collect())
        .collect();
    let t_star = traction
        .iter()
        .map(|c| c.iter().map(|v| v * norm.length / norm.force).collect())
        .collect();
    SolutionProfile {
        components: raw.components,
        x1,
        region,
        jump_u,
        jump_u_star,
        traction,
        t_star,
        normalization: norm,
        jump_scale,
        kappa_star,
        formulation: formulation.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation() {
        let pts = [(0.0, 0.0), (1.0, 2.0), (3.0, 2.0)];
        assert_eq!(interpolate(&pts, 0.5), Some(1.0));
        assert_eq!(interpolate(&pts, 2.0), Some(2.0));
        assert_eq!(interpolate(&pts, 3.0), Some(2.0));
        assert_eq!(interpolate(&pts, -0.1), None);
    }

    #[test]
    fn rejects_bad_normalisation() {
        assert!(Normalization::new(0.0, 1.0).is_err());
        assert!(Normalization::new(1.0, -1.0).is_err());
    }
}
