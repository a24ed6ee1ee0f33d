//! Orthotropic compliances, the interface imperfection law, crack-face
//! loadings and the bimaterial constants entering `H` and `W`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// In-plane compliance entries (1/stress).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InPlaneCompliance {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
    pub s66: f64,
}

/// Out-of-plane shear compliances (1/stress).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutOfPlaneCompliance {
    pub s44: f64,
    pub s55: f64,
}

/// Compliance of one orthotropic half-plane. Either block may be absent for
/// materials that are only used in one of the two problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthotropicCompliance {
    pub in_plane: Option<InPlaneCompliance>,
    pub out_of_plane: Option<OutOfPlaneCompliance>,
}

impl InPlaneCompliance {
    pub fn new(s11: f64, s12: f64, s22: f64, s66: f64) -> Result<Self> {
        let c = InPlaneCompliance { s11, s12, s22, s66 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.s11, self.s12, self.s22, self.s66]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::validation("finite compliance", format!("{self:?}")));
        }
        if !(self.s11 > 0.0 && self.s22 > 0.0 && self.s66 > 0.0) {
            return Err(Error::validation(
                "s11 > 0, s22 > 0, s66 > 0",
                format!("s11 = {}, s22 = {}, s66 = {}", self.s11, self.s22, self.s66),
            ));
        }
        let det = self.s11 * self.s22 - self.s12 * self.s12;
        if !(det > 0.0) {
            return Err(Error::validation(
                "in-plane positive definiteness s11·s22 − s12² > 0",
                format!("s11·s22 − s12² = {det}"),
            ));
        }
        Ok(())
    }

    fn root_s11_s22(&self) -> f64 {
        (self.s11 * self.s22).sqrt()
    }

    /// λ, ρ, n and the two `H` contributions of this material.
    pub fn contribution(&self) -> Result<InPlaneContribution> {
        let root = self.root_s11_s22();
        let lambda = self.s11 / self.s22;
        let rho = (2.0 * self.s12 + self.s66) / (2.0 * root);
        if !(1.0 + rho > 0.0) {
            return Err(Error::validation(
                "ρ > −1 so that n = √((1+ρ)/2) is real",
                format!("ρ = {rho}"),
            ));
        }
        let n = ((1.0 + rho) / 2.0).sqrt();
        Ok(InPlaneContribution {
            lambda,
            rho,
            n,
            h11_part: 2.0 * n * lambda.powf(0.25) * root,
            h22_part: 2.0 * n * lambda.powf(-0.25) * root,
            coupling_part: self.s12 + root,
        })
    }
}

impl OutOfPlaneCompliance {
    pub fn new(s44: f64, s55: f64) -> Result<Self> {
        if !(s44 > 0.0 && s55 > 0.0 && s44.is_finite() && s55.is_finite()) {
            return Err(Error::validation(
                "s44 > 0, s55 > 0",
                format!("s44 = {s44}, s55 = {s55}"),
            ));
        }
        Ok(OutOfPlaneCompliance { s44, s55 })
    }

    /// `√(S₄₄S₅₅)`, this material's contribution to `H₃₃`.
    pub fn shear_contribution(&self) -> f64 {
        (self.s44 * self.s55).sqrt()
    }
}

impl OrthotropicCompliance {
    pub fn validate(&self) -> Result<()> {
        if let Some(ip) = &self.in_plane {
            ip.validate()?;
        }
        if let Some(op) = &self.out_of_plane {
            OutOfPlaneCompliance::new(op.s44, op.s55)?;
        }
        if self.in_plane.is_none() && self.out_of_plane.is_none() {
            return Err(Error::validation(
                "at least one compliance block present",
                "material has neither in-plane nor out-of-plane entries",
            ));
        }
        Ok(())
    }

    pub fn in_plane(&self) -> Result<&InPlaneCompliance> {
        self.in_plane.as_ref().ok_or_else(|| {
            Error::validation(
                "in-plane compliances present",
                "material was defined for mode III only",
            )
        })
    }

    pub fn out_of_plane(&self) -> Result<&OutOfPlaneCompliance> {
        self.out_of_plane.as_ref().ok_or_else(|| {
            Error::validation(
                "out-of-plane compliances present",
                "material was defined for the in-plane problem only",
            )
        })
    }
}

/// `S₄₄ = 1/μ₂₃`, `S₅₅ = 1/μ₁₃`; in-plane entries copied when given.
pub fn compliance_from_shear_moduli(
    mu23: f64,
    mu13: f64,
    in_plane: Option<InPlaneCompliance>,
) -> Result<OrthotropicCompliance> {
    if !(mu23 > 0.0 && mu13 > 0.0 && mu23.is_finite() && mu13.is_finite()) {
        return Err(Error::validation(
            "shear moduli μ₂₃ > 0, μ₁₃ > 0",
            format!("μ₂₃ = {mu23}, μ₁₃ = {mu13}"),
        ));
    }
    if let Some(ip) = &in_plane {
        ip.validate()?;
    }
    Ok(OrthotropicCompliance {
        in_plane,
        out_of_plane: Some(OutOfPlaneCompliance {
            s44: 1.0 / mu23,
            s55: 1.0 / mu13,
        }),
    })
}

/// Four-parameter description of an incompressible orthotropic material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncompressibleOrthotropicParams {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub mu12: f64,
}

pub fn compliance_from_incompressible(
    p: IncompressibleOrthotropicParams,
) -> Result<OrthotropicCompliance> {
    let all_positive = [p.e1, p.e2, p.e3, p.mu12]
        .iter()
        .all(|v| *v > 0.0 && v.is_finite());
    if !all_positive {
        return Err(Error::validation(
            "E₁, E₂, E₃, μ₁₂ > 0",
            format!("{p:?}"),
        ));
    }
    let ip = InPlaneCompliance {
        s11: 1.0 / p.e1,
        s22: 1.0 / p.e2,
        s66: 1.0 / p.mu12,
        s12: 0.5 * (1.0 / p.e3 - 1.0 / p.e1 - 1.0 / p.e2),
    };
    ip.validate()?;
    Ok(OrthotropicCompliance {
        in_plane: Some(ip),
        out_of_plane: None,
    })
}

/// Named materials: orientations `A`, `B`, `C` (shear moduli permutations of
/// one orthotropic solid) and the incompressible pair `incompressible-I/II`.
pub fn preset(name: &str) -> Result<OrthotropicCompliance> {
    match name {
        "A" => compliance_from_shear_moduli(1.0, 2.0 / 3.0, None),
        "B" => compliance_from_shear_moduli(1.0, 0.5, None),
        "C" => compliance_from_shear_moduli(0.5, 2.0 / 3.0, None),
        "incompressible-I" => compliance_from_incompressible(IncompressibleOrthotropicParams {
            e1: 20.0,
            e2: 10.0,
            e3: 10.0,
            mu12: 5.0,
        }),
        "incompressible-II" => compliance_from_incompressible(IncompressibleOrthotropicParams {
            e1: 20.0,
            e2: 10.0,
            e3: 15.0,
            mu12: 5.0,
        }),
        other => Err(Error::Config(format!("unknown material preset '{other}'"))),
    }
}

pub const PRESET_NAMES: [&str; 5] = ["A", "B", "C", "incompressible-I", "incompressible-II"];

/// Imperfection matrix entries. `k*` govern the in-plane problem, `kappa` mode III.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceLaw {
    pub k11: f64,
    pub k12: f64,
    pub k22: f64,
    pub kappa: f64,
}

impl InterfaceLaw {
    pub fn mode3(kappa: f64) -> Self {
        InterfaceLaw {
            k11: 0.0,
            k12: 0.0,
            k22: 0.0,
            kappa,
        }
    }

    pub fn validate_mode3(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::validation(
                "κ > 0",
                format!("κ = {}", self.kappa),
            ));
        }
        Ok(())
    }

    pub fn validate_in_plane(&self) -> Result<()> {
        if !(self.k11 > 0.0 && self.k22 > 0.0) {
            return Err(Error::validation(
                "K₁₁ > 0, K₂₂ > 0",
                format!("K₁₁ = {}, K₂₂ = {}", self.k11, self.k22),
            ));
        }
        let d2 = self.k11 * self.k22 - self.k12 * self.k12;
        if !(d2 > 0.0) {
            return Err(Error::validation(
                "K positive definite (K₁₁K₂₂ − K₁₂² > 0)",
                format!("K₁₁K₂₂ − K₁₂² = {d2}"),
            ));
        }
        Ok(())
    }
}

/// λ = S₁₁/S₂₂, ρ, n and the per-material brackets of the in-plane formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InPlaneContribution {
    pub lambda: f64,
    pub rho: f64,
    pub n: f64,
    /// `2nλ^{1/4}√(S₁₁S₂₂)`
    pub h11_part: f64,
    /// `2nλ^{-1/4}√(S₁₁S₂₂)`
    pub h22_part: f64,
    /// `S₁₂ + √(S₁₁S₂₂)`
    pub coupling_part: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutOfPlaneConstants {
    pub h33: f64,
    pub delta3: f64,
    /// `[√(S₄₄S₅₅)]_I`, used for normalisation.
    pub shear_i: f64,
    pub shear_ii: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InPlaneBimaterial {
    pub h11: f64,
    pub h22: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub material_i: InPlaneContribution,
    pub material_ii: InPlaneContribution,
}

/// Everything in `H` and `W` that the solvers need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BimaterialConstants {
    pub out_of_plane: Option<OutOfPlaneConstants>,
    pub in_plane: Option<InPlaneBimaterial>,
}

impl BimaterialConstants {
    pub fn out_of_plane(&self) -> Result<&OutOfPlaneConstants> {
        self.out_of_plane.as_ref().ok_or_else(|| {
            Error::validation(
                "out-of-plane constants available",
                "both materials need S₄₄ and S₅₅",
            )
        })
    }

    pub fn in_plane(&self) -> Result<&InPlaneBimaterial> {
        self.in_plane.as_ref().ok_or_else(|| {
            Error::validation(
                "in-plane constants available",
                "both materials need S₁₁, S₁₂, S₂₂, S₆₆",
            )
        })
    }
}

/// Out-of-plane constants (`H₃₃`, `δ₃`) when both materials carry shear
/// compliances; in-plane constants (`H₁₁`, `H₂₂`, `β`, `γ`, `δ₁`, `δ₂`) when
/// both carry in-plane compliances.
pub fn bimaterial_constants(
    mat_i: &OrthotropicCompliance,
    mat_ii: &OrthotropicCompliance,
) -> Result<BimaterialConstants> {
    mat_i.validate()?;
    mat_ii.validate()?;

    let out_of_plane = match (&mat_i.out_of_plane, &mat_ii.out_of_plane) {
        (Some(a), Some(b)) => {
            let si = a.shear_contribution();
            let sii = b.shear_contribution();
            let h33 = si + sii;
            Some(OutOfPlaneConstants {
                h33,
                delta3: (si - sii) / h33,
                shear_i: si,
                shear_ii: sii,
            })
        }
        _ => None,
    };

    let in_plane = match (&mat_i.in_plane, &mat_ii.in_plane) {
        (Some(a), Some(b)) => {
            let ci = a.contribution()?;
            let cii = b.contribution()?;
            let h11 = ci.h11_part + cii.h11_part;
            let h22 = ci.h22_part + cii.h22_part;
            let root = (h11 * h22).sqrt();
            let beta = (cii.coupling_part - ci.coupling_part) / root;
            let gamma = (ci.coupling_part + cii.coupling_part) / root;
            if !(beta.abs() < 1.0) {
                return Err(Error::validation(
                    "|β| < 1 (d₀ > 0)",
                    format!("β = {beta}: material pair inadmissible for the in-plane problem"),
                ));
            }
            Some(InPlaneBimaterial {
                h11,
                h22,
                beta,
                gamma,
                delta1: (ci.h11_part - cii.h11_part) / h11,
                delta2: (ci.h22_part - cii.h22_part) / h22,
                material_i: ci,
                material_ii: cii,
            })
        }
        _ => None,
    };

    if out_of_plane.is_none() && in_plane.is_none() {
        return Err(Error::validation(
            "materials share at least one compliance block",
            "no out-of-plane or in-plane constants can be formed",
        ));
    }
    Ok(BimaterialConstants {
        out_of_plane,
        in_plane,
    })
}

/// Crack face on which a traction acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    Upper,
    Lower,
}

/// `p(x₁) = c·(x₁/l)ⁿ·e^{x₁/l}` on `x₁ ≤ 0`, acting on traction component
/// `component` (1, 2 or 3) of one face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadTerm {
    pub face: Face,
    pub component: usize,
    pub amplitude: f64,
    pub length: f64,
    pub power: u32,
}

impl LoadTerm {
    pub fn eval(&self, x: f64) -> f64 {
        if x > 0.0 {
            return 0.0;
        }
        let r = x / self.length;
        self.amplitude * r.powi(self.power as i32) * r.exp()
    }

    /// `∫₋∞⁰ p dx = c·(−1)ⁿ·n!·l`.
    pub fn integral(&self) -> f64 {
        let fact: f64 = (1..=self.power).map(|k| k as f64).product();
        let sign = if self.power.is_multiple_of(2) { 1.0 } else { -1.0 };
        self.amplitude * sign * fact * self.length
    }
}

/// Tabulated face tractions, linearly interpolated and zero outside the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedLoad {
    pub component: usize,
    pub x: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

impl TabulatedLoad {
    pub fn validate(&self) -> Result<()> {
        let n = self.x.len();
        if n < 2 || self.upper.len() != n || self.lower.len() != n {
            return Err(Error::validation(
                "tabulated loading has matching columns of length ≥ 2",
                format!("x: {}, upper: {}, lower: {}", n, self.upper.len(), self.lower.len()),
            ));
        }
        if self.x.windows(2).any(|w| !(w[1] > w[0])) || self.x[n - 1] > 0.0 {
            return Err(Error::validation(
                "tabulated x strictly increasing and ≤ 0",
                format!("x range [{}, {}]", self.x[0], self.x[n - 1]),
            ));
        }
        Ok(())
    }

    fn interp(&self, values: &[f64], x: f64) -> f64 {
        let n = self.x.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return 0.0;
        }
        let k = self.x.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (x0, x1) = (self.x[k - 1], self.x[k]);
        let w = (x - x0) / (x1 - x0);
        values[k - 1] * (1.0 - w) + values[k] * w
    }

    fn trapezoid(&self, values: &[f64]) -> f64 {
        self.x
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }
}

/// Crack-face loading: a sum of parametric terms and tabulated profiles.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Loading {
    #[serde(default)]
    pub terms: Vec<LoadTerm>,
    #[serde(default)]
    pub tables: Vec<TabulatedLoad>,
}

impl Loading {
    pub fn face(&self, face: Face, component: usize, x: f64) -> f64 {
        let mut v: f64 = self
            .terms
            .iter()
            .filter(|t| t.face == face && t.component == component)
            .map(|t| t.eval(x))
            .sum();
        for t in self.tables.iter().filter(|t| t.component == component) {
            v += match face {
                Face::Upper => t.interp(&t.upper, x),
                Face::Lower => t.interp(&t.lower, x),
            };
        }
        v
    }

    /// `⟨p⟩ = (p⁺ + p⁻)/2`
    pub fn average(&self, component: usize, x: f64) -> f64 {
        0.5 * (self.face(Face::Upper, component, x) + self.face(Face::Lower, component, x))
    }

    /// `⟦p⟧ = p⁺ − p⁻`
    pub fn jump(&self, component: usize, x: f64) -> f64 {
        self.face(Face::Upper, component, x) - self.face(Face::Lower, component, x)
    }

    /// Largest loading length scale, used for default truncation.
    pub fn max_length(&self) -> f64 {
        let mut l = self.terms.iter().map(|t| t.length).fold(0.0, f64::max);
        for t in &self.tables {
            l = l.max(-t.x[0]);
        }
        l
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
            && self
                .tables
                .iter()
                .all(|t| t.upper.iter().chain(&t.lower).all(|v| *v == 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if !(t.length > 0.0 && t.length.is_finite()) {
                return Err(Error::validation(
                    "load length scale l > 0",
                    format!("l = {}", t.length),
                ));
            }
            if !(1..=3).contains(&t.component) || !t.amplitude.is_finite() {
                return Err(Error::validation(
                    "load component in {1, 2, 3} with finite amplitude",
                    format!("{t:?}"),
                ));
            }
        }
        for t in &self.tables {
            t.validate()?;
            if !(1..=3).contains(&t.component) {
                return Err(Error::validation(
                    "load component in {1, 2, 3}",
                    format!("component {}", t.component),
                ));
            }
        }
        Ok(())
    }

    /// Multiply every amplitude by `factor`.
    pub fn scaled(&self, factor: f64) -> Loading {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.amplitude *= factor;
        }
        for t in &mut out.tables {
            t.upper.iter_mut().chain(t.lower.iter_mut()).for_each(|v| *v *= factor);
        }
        out
    }

    /// Symmetric load `p⁺ = p⁻ = −(F/l)e^{x/l}` on one component.
    pub fn symmetric_exponential(component: usize, force: f64, length: f64) -> Loading {
        let c = -force / length;
        Loading {
            terms: vec![
                LoadTerm { face: Face::Upper, component, amplitude: c, length, power: 0 },
                LoadTerm { face: Face::Lower, component, amplitude: c, length, power: 0 },
            ],
            tables: vec![],
        }
    }

    /// Asymmetric load `p⁺ = −(F/l)e^{x/l}`, `p⁻ = (F/l²)x e^{x/l}` on one component.
    pub fn asymmetric_exponential(component: usize, force: f64, length: f64) -> Loading {
        Loading {
            terms: vec![
                LoadTerm {
                    face: Face::Upper,
                    component,
                    amplitude: -force / length,
                    length,
                    power: 0,
                },
                LoadTerm {
                    face: Face::Lower,
                    component,
                    amplitude: force / length,
                    length,
                    power: 1,
                },
            ],
            tables: vec![],
        }
    }
}

/// Per-component outcome of the self-balance check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceReport {
    pub component: usize,
    pub residual: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub balanced: bool,
}

/// Relative tolerance used for purely parametric loadings.
pub const BALANCE_TOL_PARAMETRIC: f64 = 1e-10;
/// Relative tolerance used once a tabulated profile is involved.
pub const BALANCE_TOL_TABULATED: f64 = 1e-6;

/// `r = ∫(p⁺ − p⁻)dx₁` for each loaded component; balanced when
/// `|r| ≤ tol·(largest single-term integral)`.
pub fn validate_self_balance(load: &Loading, tol: Option<f64>) -> Vec<BalanceReport> {
    let mut out = Vec::new();
    for component in 1..=3 {
        let terms: Vec<_> = load.terms.iter().filter(|t| t.component == component).collect();
        let tables: Vec<_> = load.tables.iter().filter(|t| t.component == component).collect();
        if terms.is_empty() && tables.is_empty() {
            continue;
        }
        let mut residual = 0.0;
        let mut scale: f64 = 0.0;
        for t in &terms {
            let i = t.integral();
            scale = scale.max(i.abs());
            residual += match t.face {
                Face::Upper => i,
                Face::Lower => -i,
            };
        }
        for t in &tables {
            let iu = t.trapezoid(&t.upper);
            let il = t.trapezoid(&t.lower);
            scale = scale.max(iu.abs()).max(il.abs());
            residual += iu - il;
        }
        let tolerance = tol.unwrap_or(if tables.is_empty() {
            BALANCE_TOL_PARAMETRIC
        } else {
            BALANCE_TOL_TABULATED
        });
        let scale = if scale > 0.0 { scale } else { 1.0 };
        out.push(BalanceReport {
            component,
            residual,
            scale,
            tolerance,
            balanced: residual.abs() <= tolerance * scale,
        });
    }
    out
}

/// Error on the first unbalanced component, if any.
pub fn require_balanced(load: &Loading) -> Result<()> {
    load.validate()?;
    for r in validate_self_balance(load, None) {
        if !r.balanced {
            return Err(Error::UnbalancedLoading {
                component: r.component,
                residual: r.residual,
                tolerance: r.tolerance * r.scale,
            });
        }
    }
    Ok(())
}
