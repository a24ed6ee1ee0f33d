//! Independent reference solutions.
//!
//! * [`kernel_quadrature_check`] integrates the defining oscillatory
//!   integrals of `S_a`, `T_a` directly.
//! * The spectral solvers never touch the kernels: they apply the
//!   transform-domain symbols with FFTs on a uniform half-offset grid and
//!   enforce the half-line supports in physical space. Functions are
//!   represented by their hat interpolants, whose exact transform is the DFT
//!   times `sinc²(ξh/2)`; summing the symbol over aliases makes the discrete
//!   operator act on that interpolant exactly (up to the periodic box).
//!
//! The unknown jump on `[−L, 0)` solves `P₋𝓕⁻¹[N ū] = P₋𝓕⁻¹[Σ Lᵢ p̄ᵢ]`, where
//! `−N` is Hermitian positive definite for both problems; the tip-step
//! correction makes the discrete system non-symmetric, so it is solved with
//! restarted GMRES. Traction follows as `P₊𝓕⁻¹[N ū − Σ Lᵢ p̄ᵢ]`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mode12::{abc_at_xi, abc_at_zero, InPlaneConstants, Mode12Problem, Mode12Solution};
use crate::mode3::{Mode3Problem, Mode3Solution};
use crate::profile::{build_profile, interpolate, Normalization, RawProfile, SolutionProfile};
use crate::quad::{adaptive, GaussRule};
use crate::specfun::{kernel_s, kernel_t, KernelScale};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelCheck {
    pub max_deviation: f64,
    pub worst_x: f64,
}

/// `∫₀^∞ e^{iu}/(u + z) du` as (cos part, sin part).
fn oscillatory_integral(z: f64) -> Result<(f64, f64)> {
    let periods = 64;
    let upper = 2.0 * PI * periods as f64;
    let head = 2.0 * PI;
    let tol = 1e-14;
    let cos_head = adaptive(&|u: f64| u.cos() / (u + z), 0.0, head, tol, 1e-14)?;
    let sin_head = adaptive(&|u: f64| u.sin() / (u + z), 0.0, head, tol, 1e-14)?;
    let rule = GaussRule::new(20);
    let (mut c, mut s) = (cos_head, sin_head);
    let mut a = head;
    while a < upper - 1e-9 {
        let b = a + PI;
        c += rule.integrate(a, b, |u| u.cos() / (u + z));
        s += rule.integrate(a, b, |u| u.sin() / (u + z));
        a = b;
    }
    // ∫_U^∞ e^{iu}/(u+z) du = −e^{iU} Σ k!/(i^{k+1}(U+z)^{k+1})
    let w = upper + z;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut coef = 1.0 / w;
    let mut ipow = Complex64::i();
    for k in 0..12 {
        tail += coef / ipow;
        coef *= (k + 1) as f64 / w;
        ipow *= Complex64::i();
    }
    let tail = -Complex64::from_polar(1.0, upper) * tail;
    Ok((c + tail.re, s + tail.im))
}

/// Largest absolute deviation of the closed-form kernels from direct
/// quadrature of `T_a(x) = −∫₀^∞ cos(xξ)/(ξ+a) dξ`,
/// `S_a(x) = −∫₀^∞ sin(xξ)/(ξ+a) dξ` over the samples.
pub fn kernel_quadrature_check(a: KernelScale, xs: &[f64]) -> Result<KernelCheck> {
    let mut worst = KernelCheck {
        max_deviation: 0.0,
        worst_x: f64::NAN,
    };
    for &x in xs {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::Domain {
                function: "kernel_quadrature_check",
                value: x,
                expected: "finite, non-zero sample",
            });
        }
        let (ic, is) = oscillatory_integral(a.get() * x.abs())?;
        let t_ref = -ic;
        let s_ref = -x.signum() * is;
        let dev = (kernel_t(a, x)? - t_ref)
            .abs()
            .max((kernel_s(a, x) - s_ref).abs());
        if !(dev <= worst.max_deviation) {
            worst = KernelCheck {
                max_deviation: dev,
                worst_x: x,
            };
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralConfig {
    /// Band limit; the grid step is `π/xi_max`.
    pub xi_max: f64,
    /// Crack truncation: the unknown lives on `[−length, 0)`.
    pub length: f64,
    /// Periodic box is at least `box_factor·length`.
    pub box_factor: f64,
    /// Aliases summed on each side of the band.
    pub alias_terms: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl SpectralConfig {
    /// `ξ_max = 200/l_min`, box `4L`.
    pub fn new(length: f64, l_min: f64) -> Self {
        SpectralConfig {
            xi_max: 200.0 / l_min,
            length,
            box_factor: 4.0,
            alias_terms: 16,
            tolerance: 1e-10,
            max_iterations: 20_000,
        }
    }

    pub fn step(&self) -> f64 {
        PI / self.xi_max
    }

    /// Power-of-two point count covering the box.
    pub fn points(&self) -> usize {
        ((self.box_factor * self.length / self.step()).ceil() as usize).next_power_of_two()
    }

    fn validate(&self) -> Result<()> {
        let ok = self.xi_max > 0.0
            && self.length > 0.0
            && self.box_factor >= 2.0
            && self.tolerance > 0.0
            && self.xi_max.is_finite()
            && self.length.is_finite();
        if !ok {
            return Err(Error::validation(
                "spectral config: ξ_max, L > 0, box ≥ 2L, tolerance > 0",
                format!("{self:?}"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSolution {
    pub components: Vec<usize>,
    pub crack_x: Vec<f64>,
    pub interface_x: Vec<f64>,
    /// `[component][crack node]`
    pub jump: Vec<Vec<f64>>,
    /// `[component][interface node]`
    pub traction: Vec<Vec<f64>>,
    /// Jump implied on the interface by the interface law.
    pub interface_jump: Vec<Vec<f64>>,
    pub iterations: usize,
    pub residual: f64,
    pub points: usize,
    pub step: f64,
}

/// `u₀ + c·x·ln|x| + d·x`, the local form of the jump at the tip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TipModel {
    pub value: f64,
    pub log_slope: f64,
    pub slope: f64,
}

impl TipModel {
    pub fn eval(&self, x: f64) -> f64 {
        let xl = if x == 0.0 { 0.0 } else { x * x.abs().ln() };
        self.value + self.log_slope * xl + self.slope * x
    }
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let a = nalgebra::Matrix3::from_fn(|i, j| m[i][j]);
    let v = a.lu().solve(&nalgebra::Vector3::from(b)).unwrap_or_default();
    [v[0], v[1], v[2]]
}

impl SpectralSolution {
    /// Tip models fitted to the last three crack nodes and, sharing `u₀`,
    /// the first two interface nodes.
    fn tip_models(&self, k: usize) -> (TipModel, TipModel) {
        let xl = |x: f64| x * x.abs().ln();
        let n = self.crack_x.len();
        let xs = [self.crack_x[n - 1], self.crack_x[n - 2], self.crack_x[n - 3]];
        let ys = [self.jump[k][n - 1], self.jump[k][n - 2], self.jump[k][n - 3]];
        let v = solve3(
            [
                [1.0, xl(xs[0]), xs[0]],
                [1.0, xl(xs[1]), xs[1]],
                [1.0, xl(xs[2]), xs[2]],
            ],
            ys,
        );
        let crack = TipModel { value: v[0], log_slope: v[1], slope: v[2] };
        let (x1, x2) = (self.interface_x[0], self.interface_x[1]);
        let (y1, y2) = (self.interface_jump[k][0] - v[0], self.interface_jump[k][1] - v[0]);
        let det = xl(x1) * x2 - xl(x2) * x1;
        let iface = TipModel {
            value: v[0],
            log_slope: (y1 * x2 - y2 * x1) / det,
            slope: (xl(x1) * y2 - xl(x2) * y1) / det,
        };
        (crack, iface)
    }

    /// Profile in the same layout as the Nyström solvers produce.
    pub fn normalize(&self, norm: Normalization, jump_scale: f64, kappa_star: Option<f64>) -> SolutionProfile {
        build_profile(
            RawProfile {
                components: self.components.clone(),
                crack_x: &self.crack_x,
                interface_x: &self.interface_x,
                jump: self.jump.clone(),
                traction: self.traction.clone(),
                interface_jump: self.interface_jump.clone(),
            },
            norm,
            jump_scale,
            kappa_star,
            "spectral",
        )
    }

    /// Jump at the tip from the fitted local model.
    pub fn tip_jump(&self, k: usize) -> f64 {
        self.tip_models(k).0.value
    }

    pub fn crack_jump_at(&self, k: usize, x: f64) -> f64 {
        if x > -1.5 * self.step {
            return self.tip_models(k).0.eval(x.min(0.0));
        }
        sample_line(&self.crack_x, &self.jump[k], x)
    }

    pub fn interface_jump_at(&self, k: usize, x: f64) -> f64 {
        if x < 1.5 * self.step {
            return self.tip_models(k).1.eval(x.max(0.0));
        }
        sample_line(&self.interface_x, &self.interface_jump[k], x)
    }
}

/// Symbol as a row-major `nc × nc` complex matrix per frequency.
type Symbol = Vec<Complex64>;

/// A transform-domain multiplier acting on grid functions. The last crack
/// node carries the hat function plus a sawtooth that turns its right half
/// into a step at `x = 0`, so the jump discontinuity at the tip is exact.
struct Discrete {
    symbols: Vec<Symbol>,
    /// Response to the sawtooth, `[row][col]` full-length samples.
    step: Vec<Vec<Vec<f64>>>,
}

/// Transform of the sawtooth `c(x) = x/h + 1/2` on `[−h/2, 0)`,
/// `x/h − 1/2` on `[0, h/2)`.
fn sawtooth_transform(xi: f64, h: f64) -> Complex64 {
    let piece = |p: f64, q: f64, a: f64, b: f64| -> Complex64 {
        if (xi * h).abs() < 0.5 {
            let rule = GaussRule::new(16);
            let re = rule.integrate(a, b, |x| (p + q * x) * (xi * x).cos());
            let im = rule.integrate(a, b, |x| (p + q * x) * (xi * x).sin());
            return Complex64::new(re, im);
        }
        let prim = |x: f64| {
            let e = Complex64::from_polar(1.0, xi * x);
            e * (p + q * x) / Complex64::new(0.0, xi) + e * q / (xi * xi)
        };
        prim(b) - prim(a)
    };
    piece(0.5, 1.0 / h, -0.5 * h, 0.0) + piece(-0.5, 1.0 / h, 0.0, 0.5 * h)
}

struct SpectralCore {
    n: usize,
    nc: usize,
    h: f64,
    x0: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// indices of crack nodes `x ∈ [−L, 0)` and interface nodes `x ∈ (0, L]`
    crack: std::ops::Range<usize>,
    interface: std::ops::Range<usize>,
}

impl SpectralCore {
    fn new(cfg: &SpectralConfig, nc: usize) -> Self {
        let n = cfg.points();
        let h = cfg.step();
        let x0 = (-(n as f64) / 2.0 + 0.5) * h;
        let mut planner = FftPlanner::new();
        let idx = |x: f64| ((x - x0) / h).round() as isize;
        let first = idx(-cfg.length).max(0) as usize;
        let first = if x0 + first as f64 * h < -cfg.length - 1e-12 { first + 1 } else { first };
        let tip = n / 2;
        let last = ((cfg.length - x0) / h).floor() as usize;
        SpectralCore {
            n,
            nc,
            h,
            x0,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            crack: first..tip,
            interface: tip..(last + 1).min(n),
        }
    }

    fn x(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.h
    }

    fn xi(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 { j as isize } else { j as isize - self.n as isize };
        2.0 * PI * m as f64 / (self.n as f64 * self.h)
    }

    /// Per frequency: the alias-summed symbol
    /// `Σₘ M(ξ + 2πm/h) sinc²(ξh/2 + πm)` and the transform of the response
    /// to the tip sawtooth. `at_infinity` is subtracted inside the sums and
    /// added back once, which speeds up convergence. The sawtooth vanishes at
    /// every node, so only `M − M_∞` acts on it; its transform decays like
    /// 1/ξ, hence the longer alias sum.
    fn alias_sums<F>(&self, terms: usize, at_infinity: &[Complex64], sym: &F) -> Vec<(Symbol, Symbol)>
    where
        F: Fn(f64) -> Symbol + Sync,
    {
        let nn = self.nc * self.nc;
        let period = 2.0 * PI / self.h;
        let step_terms = 4 * terms as isize;
        let one = |j: usize| -> (Symbol, Symbol) {
            let xi = self.xi(j);
            let theta = 0.5 * xi * self.h;
            let s2 = theta.sin().powi(2);
            let phase = Complex64::from_polar(1.0, -xi * self.x0);
            let mut acc: Symbol = at_infinity.to_vec();
            let mut step = vec![Complex64::new(0.0, 0.0); nn];
            for a in -step_terms..=step_terms {
                let xa = xi + period * a as f64;
                if xa == 0.0 {
                    acc = sym(0.0);
                    continue;
                }
                let v = sym(xa);
                let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
                let ws = sawtooth_transform(xa, self.h) * sign * phase;
                let arg = theta + PI * a as f64;
                let w = if xi != 0.0 && a.unsigned_abs() <= terms { s2 / (arg * arg) } else { 0.0 };
                for k in 0..nn {
                    let dv = v[k] - at_infinity[k];
                    acc[k] += dv * w;
                    step[k] += dv * ws;
                }
            }
            if j == self.n / 2 {
                acc.iter_mut().for_each(|z| *z = Complex64::new(z.re, 0.0));
            }
            (acc, step)
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..self.n).into_par_iter().map(one).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..self.n).map(one).collect()
        }
    }

    fn discrete<F>(&self, terms: usize, at_infinity: &[Complex64], sym: F) -> Discrete
    where
        F: Fn(f64) -> Symbol + Sync,
    {
        let nc = self.nc;
        let (mut symbols, step_spectra): (Vec<Symbol>, Vec<Symbol>) =
            self.alias_sums(terms, at_infinity, &sym).into_iter().unzip();
        self.remove_images(&mut symbols, &sym);
        let scale = 1.0 / (self.n as f64 * self.h);
        let mut flat: Vec<Vec<f64>> = (0..nc * nc)
            .map(|k| {
                let mut buf: Vec<Complex64> = step_spectra.iter().map(|s| s[k]).collect();
                self.forward.process(&mut buf);
                buf.into_iter().map(|z| z.re * scale).collect()
            })
            .collect();
        let mut step = Vec::with_capacity(nc);
        for _ in 0..nc {
            step.push(flat.drain(..nc).collect());
        }
        Discrete { symbols, step }
    }

    /// Subtract the periodic images of the slowly decaying kernel tails.
    /// Near `ξ = 0` a symbol behaves like `M₀ + s·sign ξ + c|ξ|`; these
    /// give tails `−i s/(πy)` and `−c/(πy²)` whose image sums
    /// `Σ_{n≠0} (y − nP)^{−k}` are known in closed form.
    fn remove_images<F>(&self, symbols: &mut [Symbol], sym: &F)
    where
        F: Fn(f64) -> Symbol,
    {
        let nn = self.nc * self.nc;
        let period = self.n as f64 * self.h;
        let d = 1e-6 * 2.0 * PI / period;
        let (m0, mp, mm) = (sym(0.0), sym(d), sym(-d));
        let jump: Vec<Complex64> = (0..nn).map(|k| 0.5 * (mp[k] - mm[k])).collect();
        let cusp: Vec<Complex64> = (0..nn).map(|k| (0.5 * (mp[k] + mm[k]) - m0[k]) / d).collect();
        let z = PI / period;
        let mut kernels = vec![vec![Complex64::new(0.0, 0.0); self.n]; nn];
        for i in 0..self.n {
            let m = if i < self.n / 2 { i as isize } else { i as isize - self.n as isize };
            let y = m as f64 * self.h;
            let (q1, q2) = if m == 0 {
                (0.0, z * z / 3.0)
            } else {
                let t = z * y;
                (z / t.tan() - 1.0 / y, (z / t.sin()).powi(2) - 1.0 / (y * y))
            };
            for (k, row) in kernels.iter_mut().enumerate() {
                row[i] = (Complex64::new(0.0, -1.0) * jump[k] * q1 - cusp[k] * q2) / PI * self.h;
            }
        }
        for (k, mut buf) in kernels.into_iter().enumerate() {
            self.inverse.process(&mut buf);
            for (s, q) in symbols.iter_mut().zip(buf) {
                s[k] -= q;
            }
        }
    }

    /// Hat-interpolant response plus the tip-step correction.
    fn apply(&self, op: &Discrete, inputs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut out = self.apply_symbol(&op.symbols, inputs);
        let last = self.crack.end - 1;
        for (r, row) in out.iter_mut().enumerate() {
            for (c, input) in inputs.iter().enumerate() {
                let u = input[last];
                if u != 0.0 {
                    row.iter_mut().zip(&op.step[r][c]).for_each(|(o, w)| *o += u * w);
                }
            }
        }
        out
    }

    /// `𝓕⁻¹[Σ M ū]` sampled on the grid for full-length inputs.
    fn apply_symbol(&self, symbols: &[Symbol], inputs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let nc = self.nc;
        let mut spectra: Vec<Vec<Complex64>> = inputs
            .iter()
            .map(|v| {
                let mut buf: Vec<Complex64> = v.iter().map(|&r| Complex64::new(r, 0.0)).collect();
                self.inverse.process(&mut buf);
                buf
            })
            .collect();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); self.n]; nc];
        for j in 0..self.n {
            let s = &symbols[j];
            for r in 0..nc {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..nc {
                    acc += s[r * nc + c] * spectra[c][j];
                }
                out[r][j] = acc;
            }
        }
        spectra.clear();
        let scale = 1.0 / self.n as f64;
        out.into_iter()
            .map(|mut buf| {
                self.forward.process(&mut buf);
                buf.into_iter().map(|z| z.re * scale).collect()
            })
            .collect()
    }

    fn embed(&self, v: &DVector<f64>) -> Vec<Vec<f64>> {
        let m = self.crack.len();
        (0..self.nc)
            .map(|c| {
                let mut full = vec![0.0; self.n];
                full[self.crack.clone()].copy_from_slice(v.rows(c * m, m).as_slice());
                full
            })
            .collect()
    }

    fn restrict(&self, full: &[Vec<f64>], range: std::ops::Range<usize>) -> DVector<f64> {
        let m = range.len();
        let mut v = DVector::zeros(self.nc * m);
        for (c, comp) in full.iter().enumerate().take(self.nc) {
            v.rows_mut(c * m, m).copy_from_slice(&comp[range.clone()]);
        }
        v
    }

    fn sample_crack<F: Fn(usize, f64) -> f64>(&self, f: F) -> Vec<Vec<f64>> {
        (0..self.nc)
            .map(|c| {
                let mut full = vec![0.0; self.n];
                for k in self.crack.clone() {
                    full[k] = f(c, self.x(k));
                }
                full
            })
            .collect()
    }

    /// Solve `P₋𝓕⁻¹[N u] = P₋ rhs`, then return
    /// `(u, P₊(𝓕⁻¹[N u] − rhs), iterations, residual)`.
    fn solve(
        &self,
        n_op: &Discrete,
        rhs_full: &[Vec<f64>],
        cfg: &SpectralConfig,
    ) -> Result<(DVector<f64>, DVector<f64>, usize, f64)> {
        let op = |v: &DVector<f64>| -> DVector<f64> {
            -self.restrict(&self.apply(n_op, &self.embed(v)), self.crack.clone())
        };
        let b = -self.restrict(rhs_full, self.crack.clone());
        let (u, iterations, residual) = gmres(op, &b, cfg.tolerance, cfg.max_iterations)?;
        let nu = self.apply(n_op, &self.embed(&u));
        let diff: Vec<Vec<f64>> = nu
            .iter()
            .zip(rhs_full)
            .map(|(a, r)| a.iter().zip(r).map(|(x, y)| x - y).collect())
            .collect();
        let t = self.restrict(&diff, self.interface.clone());
        Ok((u, t, iterations, residual))
    }

    fn split(&self, v: &DVector<f64>, range: &std::ops::Range<usize>) -> Vec<Vec<f64>> {
        let m = range.len();
        (0..self.nc).map(|c| v.rows(c * m, m).iter().copied().collect()).collect()
    }
}

/// Restarted GMRES with modified Gram-Schmidt; `tol` is on `‖r‖/‖b‖`.
fn gmres<F>(op: F, b: &DVector<f64>, tol: f64, max_iter: usize) -> Result<(DVector<f64>, usize, f64)>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    const RESTART: usize = 60;
    let bnorm = b.norm();
    let mut x = DVector::zeros(b.len());
    if bnorm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let mut total = 0;
    let mut res = 1.0;
    while total < max_iter {
        let r = b - op(&x);
        let beta = r.norm();
        res = beta / bnorm;
        if res <= tol {
            return Ok((x, total, res));
        }
        let mut basis = vec![r / beta];
        let mut hess = vec![vec![0.0; RESTART]; RESTART + 1];
        let (mut cs, mut sn) = (vec![0.0; RESTART], vec![0.0; RESTART]);
        let mut g = vec![0.0; RESTART + 1];
        g[0] = beta;
        let mut k = 0;
        while k < RESTART && total < max_iter {
            let mut w = op(&basis[k]);
            for (i, v) in basis.iter().enumerate() {
                hess[i][k] = w.dot(v);
                w.axpy(-hess[i][k], v, 1.0);
            }
            hess[k + 1][k] = w.norm();
            for i in 0..k {
                let t = cs[i] * hess[i][k] + sn[i] * hess[i + 1][k];
                hess[i + 1][k] = -sn[i] * hess[i][k] + cs[i] * hess[i + 1][k];
                hess[i][k] = t;
            }
            let d = hess[k][k].hypot(hess[k + 1][k]);
            cs[k] = hess[k][k] / d;
            sn[k] = hess[k + 1][k] / d;
            hess[k][k] = d;
            hess[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            let breakdown = !(w.norm() > 1e-300);
            if !breakdown {
                let nw = w.norm();
                basis.push(w / nw);
            }
            k += 1;
            res = g[k].abs() / bnorm;
            if res <= tol || breakdown {
                break;
            }
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| hess[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / hess[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            x.axpy(*yi, &basis[i], 1.0);
        }
        if res <= tol {
            let true_res = (b - op(&x)).norm() / bnorm;
            if true_res <= 10.0 * tol {
                return Ok((x, total, true_res));
            }
        }
    }
    Err(Error::NonConvergence {
        method: "spectral GMRES",
        iterations: total,
        residual: res,
    })
}

fn scalar(z: Complex64) -> Symbol {
    vec![z]
}

/// Reference solve of the scalar transform relation.
pub fn spectral_solve_mode3(problem: &Mode3Problem, cfg: &SpectralConfig) -> Result<SpectralSolution> {
    cfg.validate()?;
    let core = SpectralCore::new(cfg, 1);
    let kappa = problem.kappa;
    let h = problem.kernel_scale();
    // A(ξ) = −|ξ|/(κ(|ξ| + 𝓗)), 1 + κA = 𝓗/(|ξ| + 𝓗)
    let a_sym = core.discrete(cfg.alias_terms, &[Complex64::new(-1.0 / kappa, 0.0)], |xi| {
        scalar(Complex64::new(-xi.abs() / (kappa * (xi.abs() + h)), 0.0))
    });
    let m_sym = core.discrete(cfg.alias_terms, &[Complex64::new(0.0, 0.0)], |xi| {
        scalar(Complex64::new(h / (xi.abs() + h), 0.0))
    });
    let g = core.sample_crack(|_, x| problem.effective_load(x));
    let rhs = core.apply(&m_sym, &g);
    let (u, t, iterations, residual) = core.solve(&a_sym, &rhs, cfg)?;
    let traction = core.split(&t, &core.interface);
    let interface_jump = vec![traction[0].iter().map(|v| kappa * v).collect()];
    Ok(SpectralSolution {
        components: vec![3],
        crack_x: core.crack.clone().map(|k| core.x(k)).collect(),
        interface_x: core.interface.clone().map(|k| core.x(k)).collect(),
        jump: core.split(&u, &core.crack),
        traction,
        interface_jump,
        iterations,
        residual,
        points: core.n,
        step: core.h,
    })
}

fn flatten(m: &crate::mode12::CMatrix2) -> Symbol {
    vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

/// Reference solve of the 2×2 in-plane transform relation.
pub fn spectral_solve_mode12(problem: &Mode12Problem, cfg: &SpectralConfig) -> Result<SpectralSolution> {
    cfg.validate()?;
    let c: InPlaneConstants = problem.constants;
    let core = SpectralCore::new(cfg, 2);
    let zero = Complex64::new(0.0, 0.0);
    let at0 = abc_at_zero(&c);
    let abc = |xi: f64| -> [crate::mode12::CMatrix2; 3] {
        abc_at_xi(&c, xi).expect("ξ ≠ 0 checked by caller")
    };
    // N(ξ) = B(ξ)(−iξ) → B_I†/d₂ as |ξ| → ∞; B_I† = [[−K₂₂, K₁₂], [K₁₂, −K₁₁]]
    let n_inf = [
        Complex64::new(-c.k22 / c.d2, 0.0),
        Complex64::new(c.k12 / c.d2, 0.0),
        Complex64::new(c.k12 / c.d2, 0.0),
        Complex64::new(-c.k11 / c.d2, 0.0),
    ];
    let n_sym = core.discrete(cfg.alias_terms, &n_inf, |xi| {
        if xi == 0.0 {
            return vec![zero; 4];
        }
        flatten(&(abc(xi)[1] * Complex64::new(0.0, -xi)))
    });
    let real = |m: &nalgebra::Matrix2<f64>| -> Symbol {
        vec![
            Complex64::new(m[(0, 0)], 0.0),
            Complex64::new(m[(0, 1)], 0.0),
            Complex64::new(m[(1, 0)], 0.0),
            Complex64::new(m[(1, 1)], 0.0),
        ]
    };
    let c_sym = core.discrete(cfg.alias_terms, &[zero; 4], |xi| {
        if xi == 0.0 {
            return real(&at0[2]);
        }
        flatten(&abc(xi)[2])
    });
    let a_sym = core.discrete(cfg.alias_terms, &[zero; 4], |xi| {
        if xi == 0.0 {
            return real(&at0[0]);
        }
        flatten(&abc(xi)[0])
    });
    let avg = core.sample_crack(|k, x| problem.loading.average(k + 1, x));
    let jump = core.sample_crack(|k, x| problem.loading.jump(k + 1, x));
    let ca = core.apply(&c_sym, &avg);
    let aj = core.apply(&a_sym, &jump);
    let rhs: Vec<Vec<f64>> = ca
        .iter()
        .zip(&aj)
        .map(|(p, q)| p.iter().zip(q).map(|(x, y)| x + y).collect())
        .collect();
    let (u, t, iterations, residual) = core.solve(&n_sym, &rhs, cfg)?;
    let traction = core.split(&t, &core.interface);
    let interface_jump = vec![
        traction[0].iter().zip(&traction[1]).map(|(a, b)| c.k11 * a + c.k12 * b).collect(),
        traction[0].iter().zip(&traction[1]).map(|(a, b)| c.k12 * a + c.k22 * b).collect(),
    ];
    Ok(SpectralSolution {
        components: vec![1, 2],
        crack_x: core.crack.clone().map(|k| core.x(k)).collect(),
        interface_x: core.interface.clone().map(|k| core.x(k)).collect(),
        jump: core.split(&u, &core.crack),
        traction,
        interface_jump,
        iterations,
        residual,
        points: core.n,
        step: core.h,
    })
}

/// Deviation statistics over one region, relative to the reference max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionDeviation {
    pub max_relative: f64,
    pub mean_relative: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleComparison {
    pub crack: RegionDeviation,
    pub interface: RegionDeviation,
    /// Over both regions, normalised by the largest reference jump.
    pub max_relative: f64,
    pub window: f64,
}

impl OracleComparison {
    pub fn passes(&self, threshold: f64) -> bool {
        self.max_relative <= threshold
    }
}

/// Linear interpolation with linear extrapolation past either end.
fn sample_line(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    if let Some(v) = interpolate(&pts, x) {
        return v;
    }
    let (i, j) = if x < xs[0] { (0, 1) } else { (n - 2, n - 1) };
    let w = (x - xs[i]) / (xs[j] - xs[i]);
    ys[i] + w * (ys[j] - ys[i])
}

/// Compare jump profiles (crack jump and interface-law jump) on Nyström
/// nodes with `|x| ≤ window`. `candidate` is `[component](crack values,
/// interface values)` on the given nodes.
pub fn compare_jumps(
    crack_x: &[f64],
    interface_x: &[f64],
    candidate: &[(Vec<f64>, Vec<f64>)],
    reference: &SpectralSolution,
    window: f64,
) -> OracleComparison {
    let mut crack_d = Vec::new();
    let mut iface_d = Vec::new();
    let mut scale: f64 = 0.0;
    for (k, (cj, ij)) in candidate.iter().enumerate() {
        for (i, &x) in crack_x.iter().enumerate() {
            if x.abs() <= window {
                let r = reference.crack_jump_at(k, x);
                scale = scale.max(r.abs());
                crack_d.push((cj[i] - r).abs());
            }
        }
        for (i, &x) in interface_x.iter().enumerate() {
            if x.abs() <= window {
                let r = reference.interface_jump_at(k, x);
                scale = scale.max(r.abs());
                iface_d.push((ij[i] - r).abs());
            }
        }
    }
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let stats = |d: &[f64]| RegionDeviation {
        max_relative: d.iter().fold(0.0f64, |a, b| a.max(*b)) / scale,
        mean_relative: if d.is_empty() { 0.0 } else { d.iter().sum::<f64>() / (d.len() as f64 * scale) },
        samples: d.len(),
    };
    let crack = stats(&crack_d);
    let interface = stats(&iface_d);
    OracleComparison {
        max_relative: crack.max_relative.max(interface.max_relative),
        crack,
        interface,
        window,
    }
}

pub fn compare_mode3(sol: &Mode3Solution, reference: &SpectralSolution, window: f64) -> OracleComparison {
    let iface: Vec<f64> = sol.traction.iter().map(|t| sol.kappa * t).collect();
    compare_jumps(
        &sol.crack_x,
        &sol.interface_x,
        &[(sol.jump.iter().copied().collect(), iface)],
        reference,
        window,
    )
}

pub fn compare_mode12(sol: &Mode12Solution, reference: &SpectralSolution, window: f64) -> OracleComparison {
    let ij = sol.interface_jump();
    let cand: Vec<(Vec<f64>, Vec<f64>)> = (0..2)
        .map(|k| (sol.jump[k].iter().copied().collect(), ij[k].iter().copied().collect()))
        .collect();
    compare_jumps(&sol.crack_x, &sol.interface_x, &cand, reference, window)
}

/// Spectral settings matched to a Nyström problem's truncation.
pub fn config_for_mode3(problem: &Mode3Problem) -> SpectralConfig {
    SpectralConfig::new(problem.grid.l_neg, min_length(&problem.loading))
}

pub fn config_for_mode12(problem: &Mode12Problem) -> SpectralConfig {
    SpectralConfig::new(problem.grid.l_neg, min_length(&problem.loading))
}

fn min_length(loading: &crate::materials::Loading) -> f64 {
    let l = loading
        .terms
        .iter()
        .map(|t| t.length)
        .fold(f64::INFINITY, f64::min);
    if l.is_finite() {
        l
    } else {
        1.0
    }
}
