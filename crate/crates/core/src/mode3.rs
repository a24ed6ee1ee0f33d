//! Anti-plane (mode III) crack on a soft imperfect interface.
//!
//! With `𝓗 = H₃₃/κ`, `u = ⟦u⟧` on the crack and `g = ⟨p⟩ + (δ₃/2)⟦p⟧`, the
//! transform relation `t⁺ − A u⁻ = −(1 + κA) g` can be inverted with either
//! kernel, which gives four equivalent pairs of equations (crack, interface):
//!
//! | formulation | crack line `x < 0`                         | interface `x > 0`                  |
//! |-------------|--------------------------------------------|------------------------------------|
//! | coupled-st  | `(1/πκ)𝒮u′ = −(𝓗/π)𝒯g`                      | `t = (1/πκ)𝒮u′ + (𝓗/π)𝒯g`          |
//! | mixed       | `−(𝓗/πκ)𝒯u − u/κ = (1/π)𝒮g′ + g`            | `t = −(𝓗/πκ)𝒯u − (1/π)𝒮g′`         |
//! | t-only      | `−(𝓗/πκ)𝒯u − u/κ = −(𝓗/π)𝒯g`               | `t = −(𝓗/πκ)𝒯u + (𝓗/π)𝒯g`          |
//! | s-only      | `(1/πκ)𝒮u′ = (1/π)𝒮g′ + g`                  | `t = (1/πκ)𝒮u′ − (1/π)𝒮g′`         |
//!
//! Primes are distributional derivatives of zero extensions, so `𝒮u′` and
//! `𝒮g′` carry the tip terms `−u(0⁻)S(x)` and `−g(0⁻)S(x)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{require_balanced, BimaterialConstants, Loading, OutOfPlaneConstants};
use crate::operators::{
    crack_targets, default_truncation, interface_targets, sample_crack, Execution, Grid,
    KernelMatrices,
};
use crate::profile::{build_profile, Normalization, RawProfile, SolutionProfile};
use crate::specfun::KernelScale;

/// Smallest accepted `κ* = κ/(l·[√(S₄₄S₅₅)]_I)`.
pub const MIN_KAPPA_STAR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    CoupledSt,
    Mixed,
    #[default]
    TOnly,
    SOnly,
}

impl Formulation {
    pub const ALL: [Formulation; 4] = [
        Formulation::CoupledSt,
        Formulation::Mixed,
        Formulation::TOnly,
        Formulation::SOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::CoupledSt => "coupled-st",
            Formulation::Mixed => "mixed",
            Formulation::TOnly => "t-only",
            Formulation::SOnly => "s-only",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Formulation::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown formulation `{s}`")))
    }

    /// Crack equation has the `−u/κ` identity term.
    pub fn is_second_kind(self) -> bool {
        matches!(self, Formulation::Mixed | Formulation::TOnly)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolveMethod {
    #[default]
    Direct,
    FixedPoint {
        relaxation: f64,
        max_iterations: usize,
        tolerance: f64,
    },
}

impl SolveMethod {
    pub fn fixed_point() -> Self {
        SolveMethod::FixedPoint {
            relaxation: 0.5,
            max_iterations: 500,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mode3Problem {
    pub constants: OutOfPlaneConstants,
    pub kappa: f64,
    pub loading: Loading,
    pub grid: Grid,
    pub formulation: Formulation,
    pub method: SolveMethod,
    pub execution: Execution,
}

impl Mode3Problem {
    /// Validates κ, the loading and `κ*`, and picks the default grid when
    /// none is given. `l` for `κ*` is the largest loading length (1 if none).
    pub fn new(
        constants: &BimaterialConstants,
        kappa: f64,
        loading: Loading,
        grid: Option<Grid>,
    ) -> Result<Self> {
        let c = *constants.out_of_plane()?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::validation("κ > 0", format!("κ = {kappa}")));
        }
        loading.validate()?;
        require_balanced(&loading)?;
        let l = reference_length(&loading);
        let kappa_star = kappa / (l * c.shear_i);
        if kappa_star < MIN_KAPPA_STAR {
            return Err(Error::UnsupportedRegime(format!(
                "κ* = {kappa_star:e} is below {MIN_KAPPA_STAR:e}; this is the perfect-interface \
                 limit, which needs the classical oscillatory-singularity treatment"
            )));
        }
        let a = c.h33 / kappa;
        let grid = match grid {
            Some(g) => g,
            None => Grid::default_for(a, l)?,
        };
        grid.require_solver_resolution()?;
        Ok(Mode3Problem {
            constants: c,
            kappa,
            loading,
            grid,
            formulation: Formulation::default(),
            method: SolveMethod::default(),
            execution: Execution::default(),
        })
    }

    pub fn with_formulation(mut self, f: Formulation) -> Self {
        self.formulation = f;
        self
    }

    pub fn with_method(mut self, m: SolveMethod) -> Self {
        self.method = m;
        self
    }

    pub fn with_execution(mut self, e: Execution) -> Self {
        self.execution = e;
        self
    }

    /// `𝓗₃₃ = H₃₃/κ`
    pub fn kernel_scale(&self) -> f64 {
        self.constants.h33 / self.kappa
    }

    /// `g = ⟨p⟩ + (δ₃/2)⟦p⟧` as a function of `x`.
    pub fn effective_load(&self, x: f64) -> f64 {
        self.loading.average(3, x) + 0.5 * self.constants.delta3 * self.loading.jump(3, x)
    }

    pub fn kappa_star(&self, length: f64) -> f64 {
        self.kappa / (length * self.constants.shear_i)
    }
}

pub(crate) fn reference_length(loading: &Loading) -> f64 {
    let l = loading.max_length();
    if l > 0.0 {
        l
    } else {
        1.0
    }
}

/// Truncation that [`Mode3Problem::new`] uses by default.
pub fn default_mode3_truncation(h33: f64, kappa: f64, loading: &Loading) -> f64 {
    default_truncation(h33 / kappa, reference_length(loading))
}

/// Kernel matrices on crack and interface targets plus the sampled load.
/// Assemble once, solve any formulation.
#[derive(Debug, Clone)]
pub struct Mode3System {
    pub problem: Mode3Problem,
    crack: KernelMatrices,
    interface: KernelMatrices,
    load: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct Mode3Solution {
    pub formulation: Formulation,
    pub crack_x: Vec<f64>,
    pub interface_x: Vec<f64>,
    /// `⟦u⟧` on crack nodes, ending with `⟦u⟧(0⁻)`.
    pub jump: DVector<f64>,
    /// `⟨t⟩` on interface nodes, starting with `⟨t⟩(0⁺)`.
    pub traction: DVector<f64>,
    pub kappa: f64,
    pub iterations: usize,
    /// Relative residual of the solved crack equation.
    pub residual: f64,
}

impl Mode3Solution {
    pub fn tip_jump(&self) -> f64 {
        self.jump[self.jump.len() - 1]
    }

    /// `|⟦u⟧(0⁻) − κ⟨t⟩(0⁺)| / |⟦u⟧(0⁻)|`
    pub fn tip_mismatch(&self) -> f64 {
        let u0 = self.tip_jump();
        (u0 - self.kappa * self.traction[0]).abs() / u0.abs()
    }

    /// Same as [`Self::tip_mismatch`] but with the traction at the first
    /// interface node past the tip.
    pub fn near_tip_mismatch(&self) -> f64 {
        let u0 = self.tip_jump();
        (u0 - self.kappa * self.traction[1]).abs() / u0.abs()
    }

    /// `⟦u*⟧ = ⟦u⟧/(F·[√(S₄₄S₅₅)]_I)`, `t* = l·t/F`, `κ* = κ/(l·[√(S₄₄S₅₅)]_I)`.
    pub fn normalize(&self, norm: Normalization, shear_i: f64) -> SolutionProfile {
        let interface_jump: Vec<f64> = self.traction.iter().map(|t| self.kappa * t).collect();
        build_profile(
            RawProfile {
                components: vec![3],
                crack_x: &self.crack_x,
                interface_x: &self.interface_x,
                jump: vec![self.jump.iter().copied().collect()],
                traction: vec![self.traction.iter().copied().collect()],
                interface_jump: vec![interface_jump],
            },
            norm,
            norm.force * shear_i,
            Some(self.kappa / (norm.length * shear_i)),
            self.formulation.name(),
        )
    }
}

impl Mode3System {
    pub fn assemble(problem: &Mode3Problem) -> Result<Self> {
        let a = KernelScale::new(problem.kernel_scale())?;
        let crack = KernelMatrices::assemble(
            a,
            &problem.grid,
            &crack_targets(&problem.grid),
            problem.execution,
        );
        let interface = KernelMatrices::assemble(
            a,
            &problem.grid,
            &interface_targets(&problem.grid),
            problem.execution,
        );
        let load = sample_crack(&problem.grid, |x| problem.effective_load(x));
        Ok(Mode3System {
            problem: problem.clone(),
            crack,
            interface,
            load,
        })
    }

    fn coefficients(&self) -> (f64, f64) {
        (self.problem.kernel_scale(), self.problem.kappa)
    }

    /// Matrix and right-hand side of the crack equation.
    pub fn crack_system(&self, f: Formulation) -> (DMatrix<f64>, DVector<f64>) {
        let (h, kappa) = self.coefficients();
        let c = &self.crack;
        let n = self.load.len();
        let second_kind = || &c.t_values * (-h / (PI * kappa)) - DMatrix::identity(n, n) / kappa;
        let first_kind = || &c.s_derivative / (PI * kappa);
        let t_rhs = || &c.t_values * &self.load * (-h / PI);
        let s_rhs = || &c.s_derivative * &self.load / PI + &self.load;
        match f {
            Formulation::CoupledSt => (first_kind(), t_rhs()),
            Formulation::Mixed => (second_kind(), s_rhs()),
            Formulation::TOnly => (second_kind(), t_rhs()),
            Formulation::SOnly => (first_kind(), s_rhs()),
        }
    }

    /// Interface traction from a crack solution (companion identity of `f`).
    pub fn traction(&self, f: Formulation, jump: &DVector<f64>) -> Result<DVector<f64>> {
        if jump.len() != self.load.len() {
            return Err(Error::validation(
                "jump lives on the crack nodes",
                format!("expected {}, got {}", self.load.len(), jump.len()),
            ));
        }
        let (h, kappa) = self.coefficients();
        let c = &self.interface;
        let su = || &c.s_derivative * jump / (PI * kappa);
        let tu = || &c.t_values * jump * (-h / (PI * kappa));
        let tg = || &c.t_values * &self.load * (h / PI);
        let sg = || &c.s_derivative * &self.load * (-1.0 / PI);
        Ok(match f {
            Formulation::CoupledSt => su() + tg(),
            Formulation::Mixed => tu() + sg(),
            Formulation::TOnly => tu() + tg(),
            Formulation::SOnly => su() + sg(),
        })
    }

    /// Relative residual `‖M u − b‖/‖b‖` of formulation `f`'s crack equation.
    pub fn residual(&self, f: Formulation, jump: &DVector<f64>) -> f64 {
        let (m, b) = self.crack_system(f);
        relative_residual(&m, jump, &b)
    }

    pub fn solve(&self, f: Formulation) -> Result<Mode3Solution> {
        let (m, b) = self.crack_system(f);
        let (jump, iterations) = match self.problem.method {
            SolveMethod::Direct => (dense_solve(m.clone(), &b)?, 0),
            SolveMethod::FixedPoint {
                relaxation,
                max_iterations,
                tolerance,
            } => {
                if !f.is_second_kind() {
                    return Err(Error::validation(
                        "fixed-point iteration needs a second-kind formulation",
                        format!("{} has no identity term", f.name()),
                    ));
                }
                self.fixed_point(&b, relaxation, max_iterations, tolerance)?
            }
        };
        let residual = relative_residual(&m, &jump, &b);
        let traction = self.traction(f, &jump)?;
        Ok(Mode3Solution {
            formulation: f,
            crack_x: self.problem.grid.crack_nodes().to_vec(),
            interface_x: self.problem.grid.interface_nodes().to_vec(),
            jump,
            traction,
            kappa: self.problem.kappa,
            iterations,
            residual,
        })
    }

    /// `u ← (1−ω)u + ω(−κb − (𝓗/π)𝒯u)`, the crack equation `−(𝓗/πκ)𝒯u − u/κ = b`
    /// rearranged.
    fn fixed_point(
        &self,
        b: &DVector<f64>,
        omega: f64,
        max_iterations: usize,
        tol: f64,
    ) -> Result<(DVector<f64>, usize)> {
        if !(omega > 0.0 && omega <= 1.0) {
            return Err(Error::validation("relaxation in (0, 1]", format!("ω = {omega}")));
        }
        let (h, kappa) = self.coefficients();
        let t = &self.crack.t_values * (-h / PI);
        let base = b * (-kappa);
        let mut u = base.clone();
        let mut update = f64::INFINITY;
        for it in 1..=max_iterations {
            let next = (&u * (1.0 - omega)) + (&base + &t * &u) * omega;
            let scale = next.amax().max(f64::MIN_POSITIVE);
            update = (&next - &u).amax() / scale;
            u = next;
            if update <= tol || u.amax() == 0.0 {
                return Ok((u, it));
            }
        }
        Err(Error::NonConvergence {
            method: "relaxed fixed-point",
            iterations: max_iterations,
            residual: update,
        })
    }
}

fn relative_residual(m: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let r = (m * x - b).amax();
    let s = b.amax();
    if s > 0.0 {
        r / s
    } else {
        r
    }
}

/// LU solve that reports a vanishing pivot as a conditioning failure.
pub(crate) fn dense_solve(m: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let lu = m.lu();
    let u = lu.u();
    let diag = u.diagonal();
    let max = diag.amax();
    let min = diag.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if !(max > 0.0) || min / max < 1e-14 {
        return Err(Error::Singular(format!(
            "LU pivot ratio {:e} (smallest {min:e}, largest {max:e})",
            if max > 0.0 { min / max } else { 0.0 }
        )));
    }
    lu.solve(b)
        .ok_or_else(|| Error::Singular("LU back-substitution failed".into()))
}

/// Solve with the problem's formulation and method.
pub fn solve_mode3(problem: &Mode3Problem) -> Result<Mode3Solution> {
    Mode3System::assemble(problem)?.solve(problem.formulation)
}

/// Traction on interface nodes for a given crack jump.
pub fn evaluate_traction(problem: &Mode3Problem, jump: &DVector<f64>) -> Result<DVector<f64>> {
    Mode3System::assemble(problem)?.traction(problem.formulation, jump)
}
