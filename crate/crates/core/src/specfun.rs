//! Sine and cosine integrals and the convolution kernels built from them.
//!
//! With `si(z) = Si(z) − π/2` and `ci(z) = Ci(z)` the auxiliary functions
//!
//! ```text
//! f(z) = ci(z) sin z − si(z) cos z = ∫₀^∞ sin t /(t + z) dt
//! g(z) = −ci(z) cos z − si(z) sin z = ∫₀^∞ cos t /(t + z) dt
//! ```
//!
//! give the two kernels of scale `a > 0` as
//!
//! ```text
//! S_a(x) = −sign(x) f(a|x|)          (odd, jump −π at the origin)
//! T_a(x) = −g(a|x|)                  (even, ~ ln(a|x|) + γ near the origin)
//! ```
//!
//! Small arguments use the power series of `Si` and `Cin`; large ones the
//! continued fraction of `e^{iz} E₁(iz) = g(z) − i f(z)`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Argument at which evaluation switches from power series to continued fraction.
const SERIES_LIMIT: f64 = 4.0;

/// Positive kernel scale (inverse length).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct KernelScale(f64);

impl KernelScale {
    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() && a > 0.0 {
            Ok(KernelScale(a))
        } else {
            Err(Error::validation("kernel scale a > 0", format!("a = {a}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Which side of the origin a one-sided limit is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// `(Si(z), Cin(z))` by power series, `Cin(z) = γ + ln z − Ci(z)`.
fn si_cin_series(z: f64) -> (f64, f64) {
    let z2 = z * z;
    // term = (−1)^k z^(2k+1)/(2k+1)!  and  (−1)^k z^(2k)/(2k)!
    let mut odd = z;
    let mut even = 1.0;
    let mut si_sum = z;
    let mut cin_sum = 0.0;
    for k in 1..60 {
        let kk = k as f64;
        even *= -z2 / ((2.0 * kk - 1.0) * (2.0 * kk));
        odd *= -z2 / ((2.0 * kk) * (2.0 * kk + 1.0));
        let c = -even / (2.0 * kk);
        let s = odd / (2.0 * kk + 1.0);
        cin_sum += c;
        si_sum += s;
        if s.abs() < 1e-18 * si_sum.abs() && c.abs() < 1e-18 * cin_sum.abs().max(1e-300) {
            break;
        }
    }
    (si_sum, cin_sum)
}

/// `(f(z), g(z))` by modified Lentz evaluation of the continued fraction.
fn fg_continued_fraction(z: f64) -> (f64, f64) {
    use num_complex::Complex64;
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, z);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..10_000 {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-h.im, h.re)
}

/// Auxiliary `f(z)` and `g(z)` for `z > 0`.
pub fn aux_fg(z: f64) -> (f64, f64) {
    debug_assert!(z > 0.0);
    if z.is_infinite() {
        return (0.0, 0.0);
    }
    if z <= SERIES_LIMIT {
        let (si_, ci_) = si_ci_small(z);
        let (s, c) = z.sin_cos();
        (ci_ * s - si_ * c, -ci_ * c - si_ * s)
    } else {
        fg_continued_fraction(z)
    }
}

fn si_ci_small(z: f64) -> (f64, f64) {
    let (si_full, cin) = si_cin_series(z);
    (si_full - FRAC_PI_2, EULER_GAMMA + z.ln() - cin)
}

/// `f(z)` for `z ≥ 0`, with `f(0) = π/2`.
pub fn aux_f(z: f64) -> f64 {
    if z == 0.0 {
        FRAC_PI_2
    } else {
        aux_fg(z).0
    }
}

/// `g(z) + ln z` for `z ≥ 0`; finite at the origin where it equals `−γ`.
pub fn aux_g_plus_log(z: f64) -> f64 {
    if z == 0.0 {
        return -EULER_GAMMA;
    }
    if z <= SERIES_LIMIT {
        let (si_full, cin) = si_cin_series(z);
        let si_ = si_full - FRAC_PI_2;
        let (s, c) = z.sin_cos();
        let lz = z.ln();
        // ci − ln z = γ − Cin; the ln z parts combine into ln z (1 − cos z)
        let one_minus_cos = 2.0 * (0.5 * z).sin().powi(2);
        -(EULER_GAMMA - cin) * c + lz * one_minus_cos - si_ * s
    } else {
        aux_fg(z).1 + z.ln()
    }
}

/// Sine integral `si(x) = −∫ₓ^∞ sin t / t dt`.
pub fn si(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "si",
            value: x,
            expected: "x > 0",
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= SERIES_LIMIT {
        Ok(si_ci_small(x).0)
    } else {
        let (f, g) = fg_continued_fraction(x);
        let (s, c) = x.sin_cos();
        Ok(-f * c - g * s)
    }
}

/// Cosine integral `ci(x) = −∫ₓ^∞ cos t / t dt`.
pub fn ci(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "ci",
            value: x,
            expected: "x > 0",
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= SERIES_LIMIT {
        Ok(si_ci_small(x).1)
    } else {
        let (f, g) = fg_continued_fraction(x);
        let (s, c) = x.sin_cos();
        Ok(f * s - g * c)
    }
}

/// `S_a(x)`. Returns 0 at `x = 0`, the midpoint of the jump; use
/// [`kernel_s_limit`] for one-sided values.
pub fn kernel_s(a: KernelScale, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    -x.signum() * aux_f(a.get() * x.abs())
}

/// One-sided limit of `S_a` at the origin: `+π/2` from the left, `−π/2` from the right.
pub fn kernel_s_limit(side: Side) -> f64 {
    match side {
        Side::Minus => FRAC_PI_2,
        Side::Plus => -FRAC_PI_2,
    }
}

/// `T_a(x)`; logarithmically singular at the origin.
pub fn kernel_t(a: KernelScale, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::Domain {
            function: "kernel_t",
            value: x,
            expected: "x ≠ 0 (log singularity; integrate by product rule)",
        });
    }
    Ok(-aux_fg(a.get() * x.abs()).1)
}

/// `T_a(x) − ln|x|`, bounded everywhere and equal to `γ + ln a` at the origin.
pub fn kernel_t_regular(a: KernelScale, x: f64) -> f64 {
    -aux_g_plus_log(a.get() * x.abs()) + a.get().ln()
}

/// Both kernels at once, sharing one auxiliary evaluation. `x ≠ 0`.
#[inline]
pub(crate) fn kernels_st(a: f64, x: f64) -> (f64, f64) {
    let (f, g) = aux_fg(a * x.abs());
    (-x.signum() * f, -g)
}
