//! Discretisation of the convolution operators `𝒮_a`, `𝒯_a` on a truncated,
//! tip-graded grid with piecewise-linear (hat) trial functions on the crack.
//!
//! Matrix entries are `∫ K_a(xᵢ − t) φⱼ(t) dt` (or `φⱼ'` for the derivative
//! operand). Elements close to the target use closed-form antiderivatives of
//! the kernels, which absorb the logarithmic singularity of `T` and the jump
//! of `S`; all other elements use an 8-point Gauss rule.
//!
//! Derivative operators act on the zero extension of the hat interpolant, so
//! they include the point masses `−u(0⁻)δ(t)` and `+u(−L)δ(t + L)` of its
//! distributional derivative. The first one is the tip correction term.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quad::GaussRule;
use crate::specfun::{self, aux_f, aux_g_plus_log, KernelScale, Side};

/// Minimum number of intervals per side accepted by the solvers.
pub const MIN_SOLVER_INTERVALS: usize = 8;
pub const DEFAULT_INTERVALS: usize = 400;
pub const DEFAULT_GRADING: f64 = 3.0;

/// Graded nodes on `[−L_neg, L_pos]` with 0 as a node and `|x| ∝ (k/n)^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub l_neg: f64,
    pub l_pos: f64,
    pub n_neg: usize,
    pub n_pos: usize,
    pub q: f64,
    nodes: Vec<f64>,
}

pub fn build_grid(l_neg: f64, l_pos: f64, n_neg: usize, n_pos: usize, q: f64) -> Result<Grid> {
    if !(l_neg > 0.0 && l_pos > 0.0 && l_neg.is_finite() && l_pos.is_finite()) {
        return Err(Error::validation(
            "truncation lengths L_neg, L_pos > 0",
            format!("L_neg = {l_neg}, L_pos = {l_pos}"),
        ));
    }
    if n_neg == 0 || n_pos == 0 {
        return Err(Error::validation(
            "at least one interval per side",
            format!("n_neg = {n_neg}, n_pos = {n_pos}"),
        ));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::validation("grading exponent q ≥ 1", format!("q = {q}")));
    }
    let mut nodes = Vec::with_capacity(n_neg + n_pos + 1);
    for k in (1..=n_neg).rev() {
        nodes.push(-l_neg * (k as f64 / n_neg as f64).powf(q));
    }
    nodes.push(0.0);
    for k in 1..=n_pos {
        nodes.push(l_pos * (k as f64 / n_pos as f64).powf(q));
    }
    Ok(Grid {
        l_neg,
        l_pos,
        n_neg,
        n_pos,
        q,
        nodes,
    })
}

impl Grid {
    /// Default truncation `L = max(10·l_max, 20/a)` with `n = 400`, `q = 3`.
    pub fn default_for(a: f64, l_max: f64) -> Result<Grid> {
        let l = default_truncation(a, l_max);
        build_grid(l, l, DEFAULT_INTERVALS, DEFAULT_INTERVALS, DEFAULT_GRADING)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Nodes on `[−L_neg, 0]`, ascending, ending with the tip.
    pub fn crack_nodes(&self) -> &[f64] {
        &self.nodes[..=self.n_neg]
    }

    /// Nodes on `[0, L_pos]`, ascending, starting with the tip.
    pub fn interface_nodes(&self) -> &[f64] {
        &self.nodes[self.n_neg..]
    }

    /// Same truncation and grading with interval counts multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Grid> {
        build_grid(
            self.l_neg,
            self.l_pos,
            self.n_neg * factor,
            self.n_pos * factor,
            self.q,
        )
    }

    pub fn scaled(&self, factor: f64) -> Result<Grid> {
        build_grid(
            self.l_neg * factor,
            self.l_pos * factor,
            self.n_neg,
            self.n_pos,
            self.q,
        )
    }

    pub(crate) fn require_solver_resolution(&self) -> Result<()> {
        if self.n_neg < MIN_SOLVER_INTERVALS || self.n_pos < MIN_SOLVER_INTERVALS {
            return Err(Error::validation(
                "at least 8 intervals per side for a solve",
                format!("n_neg = {}, n_pos = {}", self.n_neg, self.n_pos),
            ));
        }
        Ok(())
    }
}

pub fn default_truncation(a: f64, l_max: f64) -> f64 {
    (10.0 * l_max).max(20.0 / a)
}

/// A collocation point together with the side from which point sources
/// sitting exactly on it are seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub x: f64,
    pub side: Side,
}

/// Crack nodes approached from inside the crack: `−L` from the right, the
/// tip from the left.
pub fn crack_targets(grid: &Grid) -> Vec<Target> {
    let nodes = grid.crack_nodes();
    nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| Target {
            x,
            side: if i == 0 { Side::Plus } else { Side::Minus },
        })
        .collect()
}

/// Interface nodes approached from the right; the tip is `0⁺`.
pub fn interface_targets(grid: &Grid) -> Vec<Target> {
    grid.interface_nodes()
        .iter()
        .map(|&x| Target { x, side: Side::Plus })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    S,
    T,
}

/// `𝒮^(s) = P₋𝒮P₋`, `𝒮^(c) = P₊𝒮P₋` and likewise for `𝒯`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    SingularS,
    CompactS,
    SingularT,
    CompactT,
}

impl Variant {
    pub fn kernel(self) -> Kernel {
        match self {
            Variant::SingularS | Variant::CompactS => Kernel::S,
            Variant::SingularT | Variant::CompactT => Kernel::T,
        }
    }

    pub fn is_singular(self) -> bool {
        matches!(self, Variant::SingularS | Variant::SingularT)
    }

    pub fn targets(self, grid: &Grid) -> Vec<Target> {
        if self.is_singular() {
            crack_targets(grid)
        } else {
            interface_targets(grid)
        }
    }
}

/// What the trial expansion represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    /// Matrix acts on nodal values `φ(xⱼ)`.
    Values,
    /// Matrix acts on nodal values but applies the kernel to the
    /// distributional derivative of the zero-extended interpolant.
    Derivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Dense operator from crack nodal values to values at `targets`.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub variant: Variant,
    pub operand: Operand,
    pub scale: KernelScale,
    pub targets: Vec<Target>,
    pub matrix: DMatrix<f64>,
}

impl DiscreteOperator {
    pub fn apply(&self, values: &DVector<f64>) -> Result<DVector<f64>> {
        if values.len() != self.matrix.ncols() {
            return Err(Error::validation(
                "operand lives on the crack nodes",
                format!("expected {} values, got {}", self.matrix.ncols(), values.len()),
            ));
        }
        Ok(&self.matrix * values)
    }
}

/// All four kernel matrices for one scale and one target set.
#[derive(Debug, Clone)]
pub struct KernelMatrices {
    pub t_values: DMatrix<f64>,
    pub s_values: DMatrix<f64>,
    /// `𝒯` on the derivative, element part only (no point masses).
    pub t_derivative_elements: DMatrix<f64>,
    /// `𝒮` on the derivative of the zero extension, point masses included.
    pub s_derivative: DMatrix<f64>,
}

/// Antiderivatives on `s ≥ 0` of `T`, `sT`, `S`, `sS` for scale `a`.
fn antiderivatives_pos(a: f64, s: f64) -> [f64; 4] {
    let z = a * s;
    let f = aux_f(z);
    let big_g = aux_g_plus_log(z);
    let zlnz = if z > 0.0 { z * z.ln() } else { 0.0 };
    let zg = z * big_g - zlnz;
    let a2 = a * a;
    [f / a, (z * f - big_g) / a2, -big_g / a, -(zg + f + z) / a2]
}

/// `[∫T, ∫sT, ∫S, ∫sS]` over `[s1, s2]`.
fn raw_moments(a: f64, s1: f64, s2: f64) -> [f64; 4] {
    let pos = |lo: f64, hi: f64| {
        let p = antiderivatives_pos(a, hi);
        let q = antiderivatives_pos(a, lo);
        [p[0] - q[0], p[1] - q[1], p[2] - q[2], p[3] - q[3]]
    };
    let neg = |lo: f64, hi: f64| {
        let m = pos(-hi, -lo);
        [m[0], -m[1], -m[2], m[3]]
    };
    if s1 >= 0.0 {
        pos(s1, s2)
    } else if s2 <= 0.0 {
        neg(s1, s2)
    } else {
        let l = neg(s1, 0.0);
        let r = pos(0.0, s2);
        [l[0] + r[0], l[1] + r[1], l[2] + r[2], l[3] + r[3]]
    }
}

/// Kernel integrals against the two hats of element `[ta, tb]`:
/// `[T·φ_left, T·φ_right, S·φ_left, S·φ_right]`.
fn element_hat_integrals(rule: &GaussRule, a: f64, x: f64, ta: f64, tb: f64) -> [f64; 4] {
    let h = tb - ta;
    let dist = if x < ta {
        ta - x
    } else if x > tb {
        x - tb
    } else {
        0.0
    };
    if dist < h {
        let [t0, t1, s0, s1] = raw_moments(a, x - tb, x - ta);
        [
            ((tb - x) * t0 + t1) / h,
            ((x - ta) * t0 - t1) / h,
            ((tb - x) * s0 + s1) / h,
            ((x - ta) * s0 - s1) / h,
        ]
    } else {
        let mut out = [0.0; 4];
        for (t, w) in rule.points(ta, tb) {
            let (s, k) = specfun::kernels_st(a, x - t);
            let left = w * (tb - t) / h;
            let right = w * (t - ta) / h;
            out[0] += k * left;
            out[1] += k * right;
            out[2] += s * left;
            out[3] += s * right;
        }
        out
    }
}

/// `S_a(s)` with the one-sided convention of `side` at `s = 0`.
fn s_point(a: KernelScale, s: f64, side: Side) -> f64 {
    if s == 0.0 {
        // target approaching from `side` sees s → 0 with that sign
        specfun::kernel_s_limit(side)
    } else {
        specfun::kernel_s(a, s)
    }
}

fn assemble_row(rule: &GaussRule, a: KernelScale, crack: &[f64], target: Target) -> [Vec<f64>; 4] {
    let n = crack.len();
    let mut tv = vec![0.0; n];
    let mut sv = vec![0.0; n];
    let mut td = vec![0.0; n];
    let mut sd = vec![0.0; n];
    for e in 0..n - 1 {
        let (ta, tb) = (crack[e], crack[e + 1]);
        let h = tb - ta;
        let [tl, tr, sl, sr] = element_hat_integrals(rule, a.get(), target.x, ta, tb);
        tv[e] += tl;
        tv[e + 1] += tr;
        sv[e] += sl;
        sv[e + 1] += sr;
        let t_int = (tl + tr) / h;
        let s_int = (sl + sr) / h;
        td[e] -= t_int;
        td[e + 1] += t_int;
        sd[e] -= s_int;
        sd[e + 1] += s_int;
    }
    let tip = crack[n - 1];
    let far = crack[0];
    sd[n - 1] -= s_point(a, target.x - tip, target.side);
    sd[0] += s_point(a, target.x - far, target.side);
    [tv, sv, td, sd]
}

fn collect_rows<F>(count: usize, exec: Execution, row: F) -> Vec<[Vec<f64>; 4]>
where
    F: Fn(usize) -> [Vec<f64>; 4] + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(row).collect()
        }
        _ => (0..count).map(row).collect(),
    }
}

impl KernelMatrices {
    pub fn assemble(
        a: KernelScale,
        grid: &Grid,
        targets: &[Target],
        exec: Execution,
    ) -> KernelMatrices {
        let rule = GaussRule::new(8);
        let crack = grid.crack_nodes();
        let rows = collect_rows(targets.len(), exec, |i| {
            assemble_row(&rule, a, crack, targets[i])
        });
        let m = targets.len();
        let n = crack.len();
        let build = |k: usize| DMatrix::from_fn(m, n, |i, j| rows[i][k][j]);
        KernelMatrices {
            t_values: build(0),
            s_values: build(1),
            t_derivative_elements: build(2),
            s_derivative: build(3),
        }
    }
}

/// Assemble one projected operator on the crack nodes of `grid`.
pub fn assemble(
    variant: Variant,
    operand: Operand,
    a: KernelScale,
    grid: &Grid,
    exec: Execution,
) -> Result<DiscreteOperator> {
    if variant.kernel() == Kernel::T && operand == Operand::Derivative {
        return Err(Error::validation(
            "𝒯 derivative operand needs the combined tip treatment",
            "use KernelMatrices::t_derivative_elements with regularised point masses",
        ));
    }
    let targets = variant.targets(grid);
    let km = KernelMatrices::assemble(a, grid, &targets, exec);
    let matrix = match (variant.kernel(), operand) {
        (Kernel::T, _) => km.t_values,
        (Kernel::S, Operand::Values) => km.s_values,
        (Kernel::S, Operand::Derivative) => km.s_derivative,
    };
    Ok(DiscreteOperator {
        variant,
        operand,
        scale: a,
        targets,
        matrix,
    })
}

/// `S_a(xᵢ)·value_at_zero` on the targets (one-sided at the tip).
pub fn jump_correction(a: KernelScale, targets: &[Target], value_at_zero: f64) -> DVector<f64> {
    DVector::from_iterator(
        targets.len(),
        targets.iter().map(|t| s_point(a, t.x, t.side) * value_at_zero),
    )
}

/// Nodal samples of `f` on the crack nodes.
pub fn sample_crack<F: Fn(f64) -> f64>(grid: &Grid, f: F) -> DVector<f64> {
    let nodes = grid.crack_nodes();
    DVector::from_iterator(nodes.len(), nodes.iter().map(|&x| f(x)))
}
