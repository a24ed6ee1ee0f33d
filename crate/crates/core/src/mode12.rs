//! Coupled in-plane (modes I and II) crack on a soft imperfect interface.
//!
//! The transform relation `t⁺ − B(ξ)(−iξ)ū⁻ = −C(ξ)⟨p̄⟩ − A(ξ)⟦p̄⟧` has
//! matrices whose entries are `(F_R + F_R†|ξ|)/D + i(F_I sign ξ + F_I† ξ)/D`
//! with `D = d₂(|ξ| + ξ₁)(|ξ| + ξ₂)`. Partial fractions turn each inverse
//! transform into a combination of `T_{ξⱼ}` and `S_{ξⱼ}`:
//!
//! `𝓕⁻¹[F] = −1/(π d₂(ξ₂ − ξ₁)) Σⱼ (F_R⁽ʲ⁾ T_{ξⱼ} + F_I⁽ʲ⁾ S_{ξⱼ})`
//!
//! with an extra ½ for `A`. Component 1 is the shear (σ₂₁) direction and
//! component 2 the normal (σ₂₂) direction.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::materials::{require_balanced, BimaterialConstants, InterfaceLaw, Loading};
use crate::mode3::{dense_solve, reference_length};
use crate::operators::{
    crack_targets, interface_targets, sample_crack, Execution, Grid, KernelMatrices, Target,
};
use crate::profile::{build_profile, Normalization, RawProfile, SolutionProfile};
use crate::specfun::{kernel_t_regular, KernelScale};

/// Roots closer than this (relative) are rejected.
pub const DOUBLE_ROOT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InPlaneConstants {
    pub h11: f64,
    pub h22: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub k11: f64,
    pub k12: f64,
    pub k22: f64,
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub xi1: f64,
    pub xi2: f64,
}

/// Positive roots `ξ₁ ≤ ξ₂` of `d₂ζ² − d₁ζ + d₀`, i.e. `D = d₂(|ξ|+ξ₁)(|ξ|+ξ₂)`.
pub fn factor_denominator(d0: f64, d1: f64, d2: f64) -> Result<(f64, f64)> {
    if !(d0 > 0.0 && d1 > 0.0 && d2 > 0.0) {
        return Err(Error::validation(
            "d₀, d₁, d₂ > 0",
            format!("d₀ = {d0}, d₁ = {d1}, d₂ = {d2}"),
        ));
    }
    let disc = d1 * d1 - 4.0 * d2 * d0;
    if disc < 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "discriminant d₁² − 4d₂d₀ = {disc:e} < 0: complex roots of the denominator"
        )));
    }
    let q = d1 + disc.sqrt();
    let xi2 = q / (2.0 * d2);
    let xi1 = 2.0 * d0 / q;
    if (xi2 - xi1) < DOUBLE_ROOT_TOL * xi2 {
        return Err(Error::UnsupportedRegime(format!(
            "double root ξ₁ ≈ ξ₂ ≈ {xi2:e} (relative gap {:e}); partial fractions degenerate",
            (xi2 - xi1) / xi2
        )));
    }
    Ok((xi1, xi2))
}

pub fn in_plane_constants(
    constants: &BimaterialConstants,
    law: &InterfaceLaw,
) -> Result<InPlaneConstants> {
    let b = constants.in_plane()?;
    law.validate_in_plane()?;
    if !(b.beta.abs() < 1.0) {
        return Err(Error::validation(
            "|β| < 1 (d₀ > 0)",
            format!("β = {}", b.beta),
        ));
    }
    let d0 = b.h11 * b.h22 * (1.0 - b.beta * b.beta);
    let d1 = law.k11 * b.h22 + law.k22 * b.h11;
    let d2 = law.k11 * law.k22 - law.k12 * law.k12;
    let (xi1, xi2) = factor_denominator(d0, d1, d2)?;
    Ok(InPlaneConstants {
        h11: b.h11,
        h22: b.h22,
        beta: b.beta,
        gamma: b.gamma,
        delta1: b.delta1,
        delta2: b.delta2,
        k11: law.k11,
        k12: law.k12,
        k22: law.k22,
        d0,
        d1,
        d2,
        xi1,
        xi2,
    })
}

impl InPlaneConstants {
    fn root_h(&self) -> f64 {
        (self.h11 * self.h22).sqrt()
    }

    pub fn denominator(&self, xi: f64) -> f64 {
        let a = xi.abs();
        self.d0 + self.d1 * a + self.d2 * a * a
    }

    /// `d₂(ξ₂ − ξ₁)`
    pub fn pf_scale(&self) -> f64 {
        self.d2 * (self.xi2 - self.xi1)
    }

    pub fn interface_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.k11, self.k12, self.k12, self.k22)
    }
}

pub type CMatrix2 = Matrix2<Complex64>;

/// `A(ξ)`, `B(ξ)`, `C(ξ)` from the element formulas (`A` includes its ½).
pub fn abc_at_xi(c: &InPlaneConstants, xi: f64) -> Result<[CMatrix2; 3]> {
    if xi == 0.0 || !xi.is_finite() {
        return Err(Error::Domain {
            function: "abc_at_xi",
            value: xi,
            expected: "ξ ≠ 0, finite (use abc_at_zero)",
        });
    }
    let i = Complex64::i();
    let r = |v: f64| Complex64::new(v, 0.0);
    let sg = xi.signum();
    let ax = xi.abs();
    let rh = c.root_h();
    let (h11, h22, be, ga, d1, d2) = (c.h11, c.h22, c.beta, c.gamma, c.delta1, c.delta2);
    let (k11, k12, k22) = (c.k11, c.k12, c.k22);
    let dd = c.denominator(xi);

    let a11 = r(h11 * h22 * (d1 + be * ga)) + ax * (r(d1 * h11 * k22) - i * ga * k12 * rh * sg);
    let a12 = -i * sg * h22 * rh * (ga + be * d2) - ax * (i * ga * k22 * rh * sg + d2 * h22 * k12);
    let a21 = i * sg * h11 * rh * (d1 * be + ga) - ax * (r(d1 * h11 * k12) - i * ga * k11 * rh * sg);
    let a22 = r(h11 * h22 * (be * ga + d2)) + ax * (r(d2 * h22 * k11) + i * ga * k12 * rh * sg);

    let b11 = -i * (xi * k22 + h22 * sg);
    let b12 = i * xi * k12 - be * rh;
    let b21 = i * xi * k12 + be * rh;
    let b22 = -i * (xi * k11 + h11 * sg);

    let c11 = r(h11 * h22 * (1.0 - be * be)) + ax * (r(h11 * k22) + i * be * k12 * rh * sg);
    let c12 = -ax * (r(h22 * k12) - i * be * sg * k22 * rh);
    let c21 = -ax * (r(h11 * k12) + i * be * sg * k11 * rh);
    let c22 = r(h11 * h22 * (1.0 - be * be)) + ax * (r(h22 * k11) - i * be * k12 * rh * sg);

    Ok([
        CMatrix2::new(a11, a12, a21, a22).map(|z| z / (2.0 * dd)),
        CMatrix2::new(b11, b12, b21, b22).map(|z| z / dd),
        CMatrix2::new(c11, c12, c21, c22).map(|z| z / dd),
    ])
}

/// Values at `ξ = 0` averaged over `0±` (real parts): `A_R/(2d₀)`, `B(0)`
/// and `C(0) = I`. `B` is returned as its even part; the physical relation
/// only uses `B(ξ)ξ`, which vanishes at the origin.
pub fn abc_at_zero(c: &InPlaneConstants) -> [Matrix2<f64>; 3] {
    let pf = invert_abc(c);
    [pf.a.r / (2.0 * c.d0), pf.b.r / c.d0, pf.c.r / c.d0]
}

/// One `F` family: the printed real/imaginary coefficient matrices and the
/// partial-fraction numerators `F⁽¹⁾ = F − F†ξ₁`, `F⁽²⁾ = −F + F†ξ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixFamily {
    pub r: Matrix2<f64>,
    pub r_dag: Matrix2<f64>,
    pub i: Matrix2<f64>,
    pub i_dag: Matrix2<f64>,
    pub r_pf: [Matrix2<f64>; 2],
    pub i_pf: [Matrix2<f64>; 2],
}

impl MatrixFamily {
    fn new(
        r: Matrix2<f64>,
        r_dag: Matrix2<f64>,
        i: Matrix2<f64>,
        i_dag: Matrix2<f64>,
        xi1: f64,
        xi2: f64,
    ) -> Self {
        MatrixFamily {
            r,
            r_dag,
            i,
            i_dag,
            r_pf: [r - r_dag * xi1, -r + r_dag * xi2],
            i_pf: [i - i_dag * xi1, -i + i_dag * xi2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialFractionSet {
    pub xi1: f64,
    pub xi2: f64,
    pub d2: f64,
    pub a: MatrixFamily,
    pub b: MatrixFamily,
    pub c: MatrixFamily,
}

pub fn invert_abc(c: &InPlaneConstants) -> PartialFractionSet {
    let (h11, h22, be, ga, d1, d2) = (c.h11, c.h22, c.beta, c.gamma, c.delta1, c.delta2);
    let (k11, k12, k22) = (c.k11, c.k12, c.k22);
    let rh = c.root_h();
    let hh = h11 * h22;
    let (x1, x2) = (c.xi1, c.xi2);
    let zero = Matrix2::zeros();

    let a = MatrixFamily::new(
        Matrix2::new(hh * (d1 + be * ga), 0.0, 0.0, hh * (d2 + be * ga)),
        Matrix2::new(d1 * h11 * k22, -d2 * h22 * k12, -d1 * h11 * k12, d2 * h22 * k11),
        Matrix2::new(0.0, -h22 * (d2 * be + ga), h11 * (d1 * be + ga), 0.0) * rh,
        Matrix2::new(-k12, -k22, k11, k12) * (ga * rh),
        x1,
        x2,
    );
    let b = MatrixFamily::new(
        Matrix2::new(0.0, -1.0, 1.0, 0.0) * (be * rh),
        zero,
        Matrix2::new(-h22, 0.0, 0.0, -h11),
        Matrix2::new(-k22, k12, k12, -k11),
        x1,
        x2,
    );
    let c_fam = MatrixFamily::new(
        Matrix2::identity() * (hh * (1.0 - be * be)),
        Matrix2::new(h11 * k22, -h22 * k12, -h11 * k12, h22 * k11),
        zero,
        Matrix2::new(k12, k22, -k11, -k12) * (be * rh),
        x1,
        x2,
    );
    PartialFractionSet {
        xi1: x1,
        xi2: x2,
        d2: c.d2,
        a,
        b,
        c: c_fam,
    }
}

impl PartialFractionSet {
    /// `(1/(d₂Δ)) Σⱼ (F_R⁽ʲ⁾ + i sign ξ F_I⁽ʲ⁾)/(|ξ| + ξⱼ)` times `prefactor`.
    pub fn reconstruct(&self, fam: &MatrixFamily, prefactor: f64, xi: f64) -> CMatrix2 {
        let s = prefactor / (self.d2 * (self.xi2 - self.xi1));
        let sg = xi.signum();
        let roots = [self.xi1, self.xi2];
        let mut out = CMatrix2::zeros();
        for (j, root) in roots.iter().enumerate() {
            let w = s / (xi.abs() + root);
            for k in 0..4 {
                out[k] += Complex64::new(fam.r_pf[j][k] * w, sg * fam.i_pf[j][k] * w);
            }
        }
        out
    }

    pub fn families(&self) -> [(&'static str, &MatrixFamily, f64); 3] {
        [("A", &self.a, 0.5), ("B", &self.b, 1.0), ("C", &self.c, 1.0)]
    }
}

#[derive(Debug, Clone)]
pub struct Mode12Problem {
    pub constants: InPlaneConstants,
    pub loading: Loading,
    pub grid: Grid,
    pub execution: Execution,
}

impl Mode12Problem {
    /// Default grid uses the slower decaying scale `ξ₁` for truncation.
    pub fn new(
        constants: &BimaterialConstants,
        law: &InterfaceLaw,
        loading: Loading,
        grid: Option<Grid>,
    ) -> Result<Self> {
        let c = in_plane_constants(constants, law)?;
        loading.validate()?;
        require_balanced(&loading)?;
        let grid = match grid {
            Some(g) => g,
            None => Grid::default_for(c.xi1, reference_length(&loading))?,
        };
        grid.require_solver_resolution()?;
        Ok(Mode12Problem {
            constants: c,
            loading,
            grid,
            execution: Execution::default(),
        })
    }

    pub fn with_execution(mut self, e: Execution) -> Self {
        self.execution = e;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Mode12Solution {
    pub crack_x: Vec<f64>,
    pub interface_x: Vec<f64>,
    /// `[⟦u⟧₁, ⟦u⟧₂]` on crack nodes.
    pub jump: [DVector<f64>; 2],
    /// `[⟨t⟩₁, ⟨t⟩₂]` on interface nodes.
    pub traction: [DVector<f64>; 2],
    pub constants: InPlaneConstants,
    pub residual: f64,
}

impl Mode12Solution {
    /// `K⟨t⟩` on interface nodes.
    pub fn interface_jump(&self) -> [DVector<f64>; 2] {
        let c = &self.constants;
        [
            &self.traction[0] * c.k11 + &self.traction[1] * c.k12,
            &self.traction[0] * c.k12 + &self.traction[1] * c.k22,
        ]
    }

    /// `max_k |⟦u⟧ₖ(0⁻) − (K⟨t⟩)ₖ(0⁺)| / max_k |⟦u⟧ₖ(0⁻)|`
    pub fn tip_mismatch(&self) -> f64 {
        let n = self.jump[0].len() - 1;
        let ij = self.interface_jump();
        let d = (0..2).map(|k| (self.jump[k][n] - ij[k][0]).abs()).fold(0.0, f64::max);
        let s = (0..2).map(|k| self.jump[k][n].abs()).fold(0.0, f64::max);
        d / s
    }

    /// `⟦u⟧/F` and `l·t/F`.
    pub fn normalize(&self, norm: Normalization) -> SolutionProfile {
        let ij = self.interface_jump();
        build_profile(
            RawProfile {
                components: vec![1, 2],
                crack_x: &self.crack_x,
                interface_x: &self.interface_x,
                jump: self.jump.iter().map(|v| v.iter().copied().collect()).collect(),
                traction: self.traction.iter().map(|v| v.iter().copied().collect()).collect(),
                interface_jump: ij.iter().map(|v| v.iter().copied().collect()).collect(),
            },
            norm,
            norm.force,
            None,
            "in-plane",
        )
    }
}

/// Kernel matrices at both root scales for one target set.
struct ScalePair {
    km: [KernelMatrices; 2],
    targets: Vec<Target>,
}

impl ScalePair {
    fn assemble(c: &InPlaneConstants, grid: &Grid, targets: Vec<Target>, exec: Execution) -> Result<Self> {
        let k1 = KernelMatrices::assemble(KernelScale::new(c.xi1)?, grid, &targets, exec);
        let k2 = KernelMatrices::assemble(KernelScale::new(c.xi2)?, grid, &targets, exec);
        Ok(ScalePair { km: [k1, k2], targets })
    }
}

/// `Σⱼ wⱼ T_{ξⱼ}(s)` with the logarithms combined, so that it stays finite at
/// `s = 0` when `Σ wⱼ = 0`.
fn t_combination(scales: [KernelScale; 2], w: [f64; 2], s: f64) -> Result<f64> {
    let reg = w[0] * kernel_t_regular(scales[0], s) + w[1] * kernel_t_regular(scales[1], s);
    let wsum = w[0] + w[1];
    if wsum == 0.0 {
        return Ok(reg);
    }
    if s == 0.0 {
        return Err(Error::Singular(
            "point mass on a logarithmic kernel with non-cancelling weights".into(),
        ));
    }
    Ok(reg + wsum * s.abs().ln())
}

/// Block operator `Σⱼ (F_R⁽ʲ⁾ ⊗ 𝒯_{ξⱼ} + F_I⁽ʲ⁾ ⊗ 𝒮_{ξⱼ})` acting on
/// `[φ₁; φ₂]`, either on values or on the derivative of the zero extension.
fn block_operator(
    fam: &MatrixFamily,
    pair: &ScalePair,
    crack: &[f64],
    scales: [KernelScale; 2],
    derivative: bool,
) -> Result<DMatrix<f64>> {
    let m = pair.targets.len();
    let n = crack.len();
    let mut out = DMatrix::zeros(2 * m, 2 * n);
    for r in 0..2 {
        for col in 0..2 {
            let wr = [fam.r_pf[0][(r, col)], fam.r_pf[1][(r, col)]];
            let wi = [fam.i_pf[0][(r, col)], fam.i_pf[1][(r, col)]];
            let mut block = out.view_mut((r * m, col * n), (m, n));
            for j in 0..2 {
                let km = &pair.km[j];
                if derivative {
                    block += &km.t_derivative_elements * wr[j] + &km.s_derivative * wi[j];
                } else {
                    block += &km.t_values * wr[j] + &km.s_values * wi[j];
                }
            }
            if derivative && (wr[0] != 0.0 || wr[1] != 0.0) {
                // point masses −φ(0)δ(t) and +φ(−L)δ(t + L) under 𝒯
                let (tip, far) = (crack[n - 1], crack[0]);
                for (i, t) in pair.targets.iter().enumerate() {
                    block[(i, n - 1)] -= t_combination(scales, wr, t.x - tip)?;
                    block[(i, 0)] += t_combination(scales, wr, t.x - far)?;
                }
            }
        }
    }
    Ok(out)
}

/// Assembled crack and interface operators; solve once per loading.
pub struct Mode12System {
    pub problem: Mode12Problem,
    pf: PartialFractionSet,
    b_crack: DMatrix<f64>,
    b_interface: DMatrix<f64>,
    a_crack: DMatrix<f64>,
    a_interface: DMatrix<f64>,
    c_crack: DMatrix<f64>,
    c_interface: DMatrix<f64>,
}

impl Mode12System {
    pub fn assemble(problem: &Mode12Problem) -> Result<Self> {
        let c = &problem.constants;
        let grid = &problem.grid;
        let pf = invert_abc(c);
        let scales = [KernelScale::new(c.xi1)?, KernelScale::new(c.xi2)?];
        let crack = grid.crack_nodes();
        let cp = ScalePair::assemble(c, grid, crack_targets(grid), problem.execution)?;
        let ip = ScalePair::assemble(c, grid, interface_targets(grid), problem.execution)?;
        Ok(Mode12System {
            problem: problem.clone(),
            b_crack: block_operator(&pf.b, &cp, crack, scales, true)?,
            b_interface: block_operator(&pf.b, &ip, crack, scales, true)?,
            a_crack: block_operator(&pf.a, &cp, crack, scales, false)?,
            a_interface: block_operator(&pf.a, &ip, crack, scales, false)?,
            c_crack: block_operator(&pf.c, &cp, crack, scales, false)?,
            c_interface: block_operator(&pf.c, &ip, crack, scales, false)?,
            pf,
        })
    }

    pub fn partial_fractions(&self) -> &PartialFractionSet {
        &self.pf
    }

    fn sampled_loads(&self) -> (DVector<f64>, DVector<f64>) {
        let g = &self.problem.grid;
        let l = &self.problem.loading;
        let n = g.crack_nodes().len();
        let mut avg = DVector::zeros(2 * n);
        let mut jump = DVector::zeros(2 * n);
        for k in 0..2 {
            avg.rows_mut(k * n, n)
                .copy_from(&sample_crack(g, |x| l.average(k + 1, x)));
            jump.rows_mut(k * n, n)
                .copy_from(&sample_crack(g, |x| l.jump(k + 1, x)));
        }
        (avg, jump)
    }

    /// `Σⱼ(C-part)⟨p⟩ + ½ Σⱼ(A-part)⟦p⟧` at crack or interface targets.
    fn load_term(&self, crack: bool, avg: &DVector<f64>, jump: &DVector<f64>) -> DVector<f64> {
        let (a, c) = if crack {
            (&self.a_crack, &self.c_crack)
        } else {
            (&self.a_interface, &self.c_interface)
        };
        c * avg + a * jump * 0.5
    }

    pub fn solve(&self) -> Result<Mode12Solution> {
        let grid = &self.problem.grid;
        let n = grid.crack_nodes().len();
        let (avg, jump) = self.sampled_loads();
        // crack equation multiplied through by −π d₂(ξ₂ − ξ₁)
        let rhs = self.load_term(true, &avg, &jump);
        let u = dense_solve(self.b_crack.clone(), &rhs)?;
        let r = (&self.b_crack * &u - &rhs).amax();
        let residual = if rhs.amax() > 0.0 { r / rhs.amax() } else { r };
        let scale = 1.0 / (PI * self.pf.d2 * (self.pf.xi2 - self.pf.xi1));
        let t = (self.load_term(false, &avg, &jump) - &self.b_interface * &u) * scale;
        let m = grid.interface_nodes().len();
        Ok(Mode12Solution {
            crack_x: grid.crack_nodes().to_vec(),
            interface_x: grid.interface_nodes().to_vec(),
            jump: [u.rows(0, n).into_owned(), u.rows(n, n).into_owned()],
            traction: [t.rows(0, m).into_owned(), t.rows(m, m).into_owned()],
            constants: self.problem.constants,
            residual,
        })
    }
}

pub fn solve_mode12(problem: &Mode12Problem) -> Result<Mode12Solution> {
    Mode12System::assemble(problem)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{bimaterial_constants, preset, InPlaneBimaterial};
    use crate::operators::build_grid;

    fn table2() -> BimaterialConstants {
        bimaterial_constants(
            &preset("incompressible-I").unwrap(),
            &preset("incompressible-II").unwrap(),
        )
        .unwrap()
    }

    fn fig6_law() -> InterfaceLaw {
        InterfaceLaw { k11: 10.0, k12: 2.0, k22: 3.0, kappa: 0.0 }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn constants_and_vieta() {
        let c = in_plane_constants(&table2(), &fig6_law()).unwrap();
        assert_eq!(c.d2, 26.0);
        assert!(c.xi1 > 0.0 && c.xi1 < c.xi2);
        assert!(rel(c.xi1 * c.xi2 * c.d2 / c.d0, 1.0) < 1e-14);
        assert!(rel(c.xi1 + c.xi2, c.d1 / c.d2) < 1e-14);
        for z in [c.xi1, c.xi2] {
            assert!((c.d0 - c.d1 * z + c.d2 * z * z).abs() < 1e-12 * c.d0);
        }
    }

    #[test]
    fn symmetric_pair_without_coupling() {
        let mut bc = table2();
        bc.in_plane.as_mut().unwrap().beta = 0.0;
        let law = InterfaceLaw { k11: 4.0, k12: 0.0, k22: 1.0, kappa: 0.0 };
        let c = in_plane_constants(&bc, &law).unwrap();
        assert_eq!(c.d2, 4.0);
        assert_eq!(c.d0, c.h11 * c.h22);
        assert_eq!(c.d1, 4.0 * c.h22 + c.h11);
        let [_, b, _] = abc_at_xi(&c, 0.7).unwrap();
        assert_eq!(b[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(b[(1, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn root_failures() {
        assert!(matches!(factor_denominator(1.0, 1.0, 1.0), Err(Error::UnsupportedRegime(_))));
        assert!(matches!(factor_denominator(1.0, 2.0, 1.0), Err(Error::UnsupportedRegime(_))));
        assert!(matches!(factor_denominator(1.0, 2.0 + 1e-13, 1.0), Err(Error::UnsupportedRegime(_))));
        assert!(factor_denominator(1.0, 3.0, 1.0).is_ok());
        assert!(matches!(factor_denominator(0.0, 3.0, 1.0), Err(Error::Validation { .. })));
    }

    #[test]
    fn beta_and_k_validation() {
        let mut bc = table2();
        let ip: &mut InPlaneBimaterial = bc.in_plane.as_mut().unwrap();
        ip.beta = 1.0;
        assert!(matches!(in_plane_constants(&bc, &fig6_law()), Err(Error::Validation { .. })));
        let bad = InterfaceLaw { k11: 1.0, k12: 2.0, k22: 1.0, kappa: 0.0 };
        assert!(matches!(in_plane_constants(&table2(), &bad), Err(Error::Validation { .. })));
    }

    #[test]
    fn printed_numerators_match_definitions() {
        let c = in_plane_constants(&table2(), &fig6_law()).unwrap();
        let pf = invert_abc(&c);
        let (h11, h22, be, ga) = (c.h11, c.h22, c.beta, c.gamma);
        let rh = (h11 * h22).sqrt();
        // a few entries as printed in closed form
        let ar1_00 = h11 * (h22 * (c.delta1 + be * ga) - c.delta1 * c.k22 * c.xi1);
        assert!(rel(pf.a.r_pf[0][(0, 0)], ar1_00) < 1e-14);
        let ai2_01 = rh * (h22 * (be * c.delta2 + ga) - ga * c.k22 * c.xi2);
        assert!(rel(pf.a.i_pf[1][(0, 1)], ai2_01) < 1e-13);
        let bi1_11 = -h11 + c.k11 * c.xi1;
        assert!(rel(pf.b.i_pf[0][(1, 1)], bi1_11) < 1e-14);
        let ci2_10 = -be * rh * c.xi2 * c.k11;
        assert!(rel(pf.c.i_pf[1][(1, 0)], ci2_10) < 1e-14);
        assert_eq!(pf.b.r_dag, Matrix2::zeros());
        assert_eq!(pf.c.i, Matrix2::zeros());
    }

    #[test]
    fn small_solve_is_linear_and_zero_safe() {
        let bc = table2();
        let grid = build_grid(40.0, 40.0, 60, 60, 3.0).unwrap();
        let load = Loading::asymmetric_exponential(2, 1.0, 1.0);
        let p = Mode12Problem::new(&bc, &fig6_law(), load.clone(), Some(grid.clone())).unwrap();
        let s = solve_mode12(&p).unwrap();
        assert!(s.residual < 1e-10);
        let p2 = Mode12Problem::new(&bc, &fig6_law(), load.scaled(3.0), Some(grid.clone())).unwrap();
        let s2 = solve_mode12(&p2).unwrap();
        for k in 0..2 {
            let d = (&s2.jump[k] - &s.jump[k] * 3.0).amax();
            assert!(d <= 1e-12 * s2.jump[k].amax());
        }
        let z = Mode12Problem::new(&bc, &fig6_law(), Loading::default(), Some(grid)).unwrap();
        let sz = solve_mode12(&z).unwrap();
        assert!(sz.jump.iter().chain(&sz.traction).all(|v| v.amax() == 0.0));
    }

    #[test]
    fn partial_fractions_reconstruct_element_tables() {
        let c = in_plane_constants(&table2(), &fig6_law()).unwrap();
        let pf = invert_abc(&c);
        for k in 0..20 {
            let xi = 10f64.powf(-3.0 + 6.0 * k as f64 / 19.0);
            let direct = abc_at_xi(&c, xi).unwrap();
            let neg = abc_at_xi(&c, -xi).unwrap();
            for (m, (_, fam, pre)) in pf.families().iter().enumerate() {
                let rec = pf.reconstruct(fam, *pre, xi);
                let scale = direct[m].iter().map(|z| z.norm()).fold(0.0, f64::max);
                let err = (rec - direct[m]).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(err <= 1e-12 * scale, "family {m} at ξ = {xi}: {err:e}");
                assert_eq!(neg[m], direct[m].map(|z| z.conj()));
            }
        }
        for (_, fam, _) in pf.families() {
            for (pf_pair, dag) in [(&fam.r_pf, &fam.r_dag), (&fam.i_pf, &fam.i_dag)] {
                let lhs = pf_pair[0] + pf_pair[1];
                let rhs = dag * (c.xi2 - c.xi1);
                assert!((lhs - rhs).amax() <= 4.0 * f64::EPSILON * dag.amax().max(1.0) * c.xi2);
            }
        }
    }
}
