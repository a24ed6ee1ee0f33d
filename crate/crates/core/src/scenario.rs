//! Scenario files: one TOML document holds everything needed to reproduce a
//! run. Schema version 1:
//!
//! ```toml
//! schema = 1
//! name = "fig2-AC-kappa5"
//! mode = "iii"                      # or "i-ii"
//! formulation = "t-only"            # mode III only
//!
//! [material_i]
//! preset = "A"                      # or explicit [material_i.out_of_plane] / [material_i.in_plane]
//! [material_ii]
//! preset = "C"
//!
//! [interface]
//! kappa_star = 5.0                  # or kappa = …; in-plane: k11, k12, k22
//!
//! [loading]
//! preset = "symmetric-exponential"  # scaled by F and l; or [[loading.terms]]
//! component = 3
//!
//! [normalization]
//! force = 1.0
//! length = 1.0
//!
//! [grid]                            # every key optional
//! n_neg = 400
//!
//! [oracle]
//! threshold = 0.005
//! window = 5.0
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{
    bimaterial_constants, preset, BimaterialConstants, InterfaceLaw, LoadTerm, Loading,
    OrthotropicCompliance, TabulatedLoad,
};
use crate::mode12::{in_plane_constants, InPlaneConstants, Mode12Problem, Mode12Solution, Mode12System};
use crate::mode3::{default_mode3_truncation, reference_length, Formulation, Mode3Problem, Mode3Solution, Mode3System};
use crate::operators::{build_grid, default_truncation, Execution, Grid, DEFAULT_GRADING, DEFAULT_INTERVALS};
use crate::oracle::{
    compare_mode12, compare_mode3, config_for_mode12, config_for_mode3, spectral_solve_mode12,
    spectral_solve_mode3, OracleComparison, SpectralConfig,
};
use crate::profile::{Normalization, SolutionProfile};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "iii")]
    OutOfPlane,
    #[serde(rename = "i-ii")]
    InPlane,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::OutOfPlane => "iii",
            Mode::InPlane => "i-ii",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialSpec {
    Preset { preset: String },
    Compliance(OrthotropicCompliance),
}

impl MaterialSpec {
    pub fn resolve(&self) -> Result<OrthotropicCompliance> {
        match self {
            MaterialSpec::Preset { preset: name } => preset(name),
            MaterialSpec::Compliance(c) => {
                c.validate()?;
                Ok(*c)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSpec {
    pub kappa: Option<f64>,
    /// `κ/(l·[√(S₄₄S₅₅)]_I)`
    pub kappa_star: Option<f64>,
    pub k11: Option<f64>,
    pub k12: Option<f64>,
    pub k22: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoadPreset {
    /// `p± = −(F/l)e^{x/l}`
    SymmetricExponential,
    /// `p⁺ = −(F/l)e^{x/l}`, `p⁻ = (F/l²)x e^{x/l}`
    AsymmetricExponential,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadingSpec {
    #[serde(default = "no_preset")]
    pub preset: LoadPreset,
    pub component: Option<usize>,
    #[serde(default)]
    pub terms: Vec<LoadTerm>,
    #[serde(default)]
    pub tables: Vec<TabulatedLoad>,
}

fn no_preset() -> LoadPreset {
    LoadPreset::None
}

impl Default for LoadingSpec {
    fn default() -> Self {
        LoadingSpec {
            preset: LoadPreset::None,
            component: None,
            terms: vec![],
            tables: vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub l_neg: Option<f64>,
    pub l_pos: Option<f64>,
    pub n_neg: Option<usize>,
    pub n_pos: Option<usize>,
    pub grading: Option<f64>,
    /// Multiplies both interval counts after the other overrides.
    pub refine: Option<usize>,
}

impl GridSpec {
    pub fn is_default(&self) -> bool {
        *self == GridSpec::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    /// Relative max-norm threshold; 0.5% mode III, 1% in-plane by default.
    pub threshold: Option<f64>,
    /// Comparison window `|x₁| ≤ window·l`; default 5.
    pub window: Option<f64>,
    pub xi_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizationSpec {
    pub force: f64,
    pub length: f64,
}

impl Default for NormalizationSpec {
    fn default() -> Self {
        NormalizationSpec {
            force: 1.0,
            length: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub mode: Mode,
    #[serde(default)]
    pub formulation: Formulation,
    pub material_i: MaterialSpec,
    pub material_ii: MaterialSpec,
    #[serde(default)]
    pub interface: InterfaceSpec,
    #[serde(default)]
    pub loading: LoadingSpec,
    #[serde(default)]
    pub normalization: NormalizationSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
}

const BUNDLED: [(&str, &str); 11] = [
    ("fig2-AA-kappa5", include_str!("../scenarios/fig2-AA-kappa5.toml")),
    ("fig2-AA-kappa20", include_str!("../scenarios/fig2-AA-kappa20.toml")),
    ("fig2-AB-kappa5", include_str!("../scenarios/fig2-AB-kappa5.toml")),
    ("fig2-AB-kappa20", include_str!("../scenarios/fig2-AB-kappa20.toml")),
    ("fig2-AC-kappa5", include_str!("../scenarios/fig2-AC-kappa5.toml")),
    ("fig2-AC-kappa20", include_str!("../scenarios/fig2-AC-kappa20.toml")),
    ("fig3-asymmetric", include_str!("../scenarios/fig3-asymmetric.toml")),
    ("fig6-inplane", include_str!("../scenarios/fig6-inplane.toml")),
    ("table1-AC-kappa5", include_str!("../scenarios/table1-AC-kappa5.toml")),
    ("table1-CC-kappa20", include_str!("../scenarios/table1-CC-kappa20.toml")),
    ("table2-inplane", include_str!("../scenarios/table2-inplane.toml")),
];

/// Names of the scenarios compiled into the library.
pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

pub fn bundled(name: &str) -> Result<Scenario> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("no bundled scenario named '{name}'")))?;
    Scenario::from_toml(text)
}

/// Everything a solve needs, resolved from a scenario.
#[derive(Debug, Clone)]
pub enum Resolved {
    OutOfPlane(Mode3Problem),
    InPlane(Mode12Problem),
}

#[derive(Debug, Clone)]
pub enum RunSolution {
    OutOfPlane(Mode3Solution),
    InPlane(Mode12Solution),
}

/// Derived constants recorded alongside every run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode")]
pub enum DerivedConstants {
    #[serde(rename = "iii")]
    OutOfPlane {
        h33: f64,
        delta3: f64,
        shear_i: f64,
        shear_ii: f64,
        kappa: f64,
        kappa_star: f64,
        kernel_scale: f64,
    },
    #[serde(rename = "i-ii")]
    InPlane(InPlaneConstants),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRecord {
    pub l_neg: f64,
    pub l_pos: f64,
    pub n_neg: usize,
    pub n_pos: usize,
    pub grading: f64,
}

impl From<&Grid> for GridRecord {
    fn from(g: &Grid) -> Self {
        GridRecord {
            l_neg: g.l_neg,
            l_pos: g.l_pos,
            n_neg: g.n_neg,
            n_pos: g.n_pos,
            grading: g.q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub schema: u32,
    pub scenario: String,
    pub mode: &'static str,
    pub formulation: String,
    pub normalization: Normalization,
    pub constants: DerivedConstants,
    pub grid: GridRecord,
    pub residual: f64,
    pub tip_mismatch: f64,
    pub library_version: &'static str,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub solution: RunSolution,
    pub profile: SolutionProfile,
    pub metadata: RunMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub scenario: String,
    pub comparison: OracleComparison,
    pub threshold: f64,
    pub passed: bool,
    pub spectral: SpectralConfig,
    pub spectral_points: usize,
    pub spectral_iterations: usize,
    pub spectral_residual: f64,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if s.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "scenario schema {} not supported (expected {SCHEMA_VERSION})",
                s.schema
            )));
        }
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn normalization(&self) -> Result<Normalization> {
        Normalization::new(self.normalization.force, self.normalization.length)
    }

    pub fn constants(&self) -> Result<BimaterialConstants> {
        bimaterial_constants(&self.material_i.resolve()?, &self.material_ii.resolve()?)
    }

    pub fn resolved_loading(&self) -> Result<Loading> {
        let norm = self.normalization()?;
        let spec = &self.loading;
        let mut loading = match spec.preset {
            LoadPreset::None => Loading::default(),
            p => {
                let component = spec.component.ok_or_else(|| {
                    Error::Config("loading preset requires `component`".to_string())
                })?;
                match p {
                    LoadPreset::SymmetricExponential => {
                        Loading::symmetric_exponential(component, norm.force, norm.length)
                    }
                    _ => Loading::asymmetric_exponential(component, norm.force, norm.length),
                }
            }
        };
        loading.terms.extend(spec.terms.iter().copied());
        loading.tables.extend(spec.tables.iter().cloned());
        let allowed: &[usize] = match self.mode {
            Mode::OutOfPlane => &[3],
            Mode::InPlane => &[1, 2],
        };
        let bad = loading
            .terms
            .iter()
            .map(|t| t.component)
            .chain(loading.tables.iter().map(|t| t.component))
            .find(|c| !allowed.contains(c));
        if let Some(c) = bad {
            return Err(Error::Validation {
                invariant: "loading components match the mode",
                detail: format!("component {c} in a mode {} scenario", self.mode.as_str()),
            });
        }
        Ok(loading)
    }

    pub fn interface_law(&self, constants: &BimaterialConstants) -> Result<InterfaceLaw> {
        let i = &self.interface;
        match self.mode {
            Mode::OutOfPlane => {
                let kappa = match (i.kappa, i.kappa_star) {
                    (Some(k), None) => k,
                    (None, Some(ks)) => ks * self.normalization.length * constants.out_of_plane()?.shear_i,
                    _ => {
                        return Err(Error::Config(
                            "mode iii interface needs exactly one of `kappa`, `kappa_star`".to_string(),
                        ))
                    }
                };
                let law = InterfaceLaw::mode3(kappa);
                law.validate_mode3()?;
                Ok(law)
            }
            Mode::InPlane => match (i.k11, i.k12, i.k22) {
                (Some(k11), k12, Some(k22)) => Ok(InterfaceLaw {
                    k11,
                    k12: k12.unwrap_or(0.0),
                    k22,
                    kappa: i.kappa.unwrap_or(0.0),
                }),
                _ => Err(Error::Config("mode i-ii interface needs `k11` and `k22`".to_string())),
            },
        }
    }

    fn grid(&self, truncation: f64) -> Result<Option<Grid>> {
        let g = &self.grid;
        if g.is_default() {
            return Ok(None);
        }
        let factor = g.refine.unwrap_or(1);
        if factor == 0 {
            return Err(Error::Config("grid refine factor must be ≥ 1".to_string()));
        }
        build_grid(
            g.l_neg.unwrap_or(truncation),
            g.l_pos.unwrap_or(truncation),
            g.n_neg.unwrap_or(DEFAULT_INTERVALS) * factor,
            g.n_pos.unwrap_or(DEFAULT_INTERVALS) * factor,
            g.grading.unwrap_or(DEFAULT_GRADING),
        )
        .map(Some)
    }

    /// Validates everything and builds the problem; no solve is started.
    pub fn resolve(&self, execution: Execution) -> Result<Resolved> {
        let constants = self.constants()?;
        let loading = self.resolved_loading()?;
        let law = self.interface_law(&constants)?;
        match self.mode {
            Mode::OutOfPlane => {
                let h33 = constants.out_of_plane()?.h33;
                let grid = self.grid(default_mode3_truncation(h33, law.kappa, &loading))?;
                let p = Mode3Problem::new(&constants, law.kappa, loading, grid)?
                    .with_formulation(self.formulation)
                    .with_execution(execution);
                Ok(Resolved::OutOfPlane(p))
            }
            Mode::InPlane => {
                let c = in_plane_constants(&constants, &law)?;
                let grid = self.grid(default_truncation(c.xi1, reference_length(&loading)))?;
                let p = Mode12Problem::new(&constants, &law, loading, grid)?.with_execution(execution);
                Ok(Resolved::InPlane(p))
            }
        }
    }

    pub fn run(&self, execution: Execution) -> Result<RunOutput> {
        let norm = self.normalization()?;
        match self.resolve(execution)? {
            Resolved::OutOfPlane(p) => {
                let sol = Mode3System::assemble(&p)?.solve(p.formulation)?;
                let shear_i = p.constants.shear_i;
                let profile = sol.normalize(norm, shear_i);
                let metadata = RunMetadata {
                    schema: SCHEMA_VERSION,
                    scenario: self.name.clone(),
                    mode: self.mode.as_str(),
                    formulation: p.formulation.name().to_string(),
                    normalization: norm,
                    constants: DerivedConstants::OutOfPlane {
                        h33: p.constants.h33,
                        delta3: p.constants.delta3,
                        shear_i,
                        shear_ii: p.constants.shear_ii,
                        kappa: p.kappa,
                        kappa_star: p.kappa_star(norm.length),
                        kernel_scale: p.kernel_scale(),
                    },
                    grid: (&p.grid).into(),
                    residual: sol.residual,
                    tip_mismatch: sol.tip_mismatch(),
                    library_version: env!("CARGO_PKG_VERSION"),
                };
                Ok(RunOutput {
                    solution: RunSolution::OutOfPlane(sol),
                    profile,
                    metadata,
                })
            }
            Resolved::InPlane(p) => {
                let sol = Mode12System::assemble(&p)?.solve()?;
                let profile = sol.normalize(norm);
                let metadata = RunMetadata {
                    schema: SCHEMA_VERSION,
                    scenario: self.name.clone(),
                    mode: self.mode.as_str(),
                    formulation: "in-plane".to_string(),
                    normalization: norm,
                    constants: DerivedConstants::InPlane(p.constants),
                    grid: (&p.grid).into(),
                    residual: sol.residual,
                    tip_mismatch: sol.tip_mismatch(),
                    library_version: env!("CARGO_PKG_VERSION"),
                };
                Ok(RunOutput {
                    solution: RunSolution::InPlane(sol),
                    profile,
                    metadata,
                })
            }
        }
    }

    /// Nyström against spectral on `|x₁| ≤ window·l`. Solver failures are
    /// errors; a threshold miss is a report with `passed = false`.
    pub fn oracle_check(&self, execution: Execution) -> Result<OracleReport> {
        let norm = self.normalization()?;
        let window = self.oracle.window.unwrap_or(5.0) * norm.length;
        let resolved = self.resolve(execution)?;
        let (comparison, cfg, spectral, default_threshold) = match &resolved {
            Resolved::OutOfPlane(p) => {
                let sol = Mode3System::assemble(p)?.solve(p.formulation)?;
                let mut cfg = config_for_mode3(p);
                if let Some(x) = self.oracle.xi_max {
                    cfg.xi_max = x;
                }
                let spec = spectral_solve_mode3(p, &cfg)?;
                (compare_mode3(&sol, &spec, window), cfg, spec, 5e-3)
            }
            Resolved::InPlane(p) => {
                let sol = Mode12System::assemble(p)?.solve()?;
                let mut cfg = config_for_mode12(p);
                if let Some(x) = self.oracle.xi_max {
                    cfg.xi_max = x;
                }
                let spec = spectral_solve_mode12(p, &cfg)?;
                (compare_mode12(&sol, &spec, window), cfg, spec, 1e-2)
            }
        };
        let threshold = self.oracle.threshold.unwrap_or(default_threshold);
        Ok(OracleReport {
            scenario: self.name.clone(),
            passed: comparison.passes(threshold),
            comparison,
            threshold,
            spectral: cfg,
            spectral_points: spectral.points,
            spectral_iterations: spectral.iterations,
            spectral_residual: spectral.residual,
        })
    }
}
