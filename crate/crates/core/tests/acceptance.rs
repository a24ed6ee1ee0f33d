//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::f64::consts::PI;
use std::time::Instant;

use imperfect_crack::materials::{
    bimaterial_constants, preset, Face, InterfaceLaw, LoadTerm, Loading,
};
use imperfect_crack::mode12::{
    abc_at_xi, factor_denominator, in_plane_constants, invert_abc, Mode12Problem,
};
use imperfect_crack::mode3::{Formulation, Mode3Problem, Mode3System};
use imperfect_crack::operators::{crack_targets, sample_crack, Execution, Grid, KernelMatrices};
use imperfect_crack::oracle::kernel_quadrature_check;
use imperfect_crack::profile::Region;
use imperfect_crack::scenario::{bundled, Resolved, RunSolution, Scenario};
use imperfect_crack::specfun::{kernel_s, kernel_t, KernelScale};
use imperfect_crack::Error;

const FIG2: [&str; 6] = [
    "fig2-AA-kappa5",
    "fig2-AB-kappa5",
    "fig2-AC-kappa5",
    "fig2-AA-kappa20",
    "fig2-AB-kappa20",
    "fig2-AC-kappa20",
];

fn verdict(id: u32, pass: bool, detail: String) {
    println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id}: {detail}");
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

fn mode3_problem(name: &str) -> Mode3Problem {
    match bundled(name).unwrap().resolve(Execution::Parallel).unwrap() {
        Resolved::OutOfPlane(p) => p,
        Resolved::InPlane(_) => panic!("{name} is not mode III"),
    }
}

fn rel_max(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    diff / scale
}

#[test]
fn c01_kernel_closed_forms() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 5.0] {
        let mut xs = log_space(1e-3 / a, 1e2 / a, 40);
        xs.extend(xs.clone().iter().map(|x| -x));
        let check = kernel_quadrature_check(KernelScale::new(a).unwrap(), &xs).unwrap();
        worst = worst.max(check.max_deviation);
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        worst <= 1e-8 && secs <= 10.0,
        format!("max deviation {worst:.2e} (≤ 1e-8), {secs:.2} s (≤ 10 s)"),
    );
}

/// Mean ratio-test exponent of `r` between `z` and `z·step` over `zs`, and
/// the fitted constant `max |r(z)|/w(z)`.
fn ratio_fit(r: &dyn Fn(f64) -> f64, w: &dyn Fn(f64) -> f64, zs: &[f64], step: f64) -> (f64, f64) {
    let p = zs
        .iter()
        .map(|&z| (r(z * step).abs() / r(z).abs()).ln() / step.ln())
        .sum::<f64>()
        / zs.len() as f64;
    let c = zs.iter().fold(0.0f64, |m, &z| m.max(r(z).abs() / w(z)));
    (p, c.max(f64::MIN_POSITIVE))
}

#[test]
fn c02_asymptotic_laws() {
    // Remainders in z = a|x|. Near field steps z → z/10, far field z → 10z;
    // orders are powers of z near and of 1/z far.
    //
    // S near: the remainder is −z ln z + (1 − γ)z, so its exponent sits just
    // under 1 and C is fitted against z(1 + |ln z|); against z alone it grows
    // like |ln z|. T far: O(1/z³) bounds a remainder that decays as 6/z⁴, so
    // the exponent only has to reach the stated order.
    let mut lines = Vec::new();
    let mut pass = true;
    for a in [0.5, 1.0, 5.0] {
        let k = KernelScale::new(a).unwrap();
        let s = move |z: f64| kernel_s(k, z / a);
        let t = move |z: f64| kernel_t(k, z / a).unwrap();
        let near_s = move |z: f64| s(z) + PI / 2.0;
        let near_t = move |z: f64| t(z) - z.ln();
        let far_s = move |z: f64| s(z) + 1.0 / z;
        let far_t = move |z: f64| t(z) + 1.0 / (z * z);
        let zlog = |z: f64| z * (1.0 - z.ln());
        let one = |_: f64| 1.0;
        let cube = |z: f64| z.powi(-3);
        let near = log_space(1e-4, 1e-3, 8);
        let near_ext = log_space(1e-5, 1e-4, 8);
        let far = log_space(1e3, 1e4, 8);
        let far_ext = log_space(1e4, 1e5, 8);
        type Case<'a> = (&'a str, &'a dyn Fn(f64) -> f64, &'a dyn Fn(f64) -> f64, bool, f64, bool);
        let cases: [Case; 4] = [
            ("S near", &near_s, &zlog, true, 1.0, true),
            ("T near", &near_t, &one, true, 0.0, true),
            ("S far", &far_s, &cube, false, 3.0, true),
            ("T far", &far_t, &cube, false, 3.0, false),
        ];
        for (name, r, w, is_near, order, sharp) in cases {
            let (zs, ext, step) = if is_near { (&near, &near_ext, 0.1) } else { (&far, &far_ext, 10.0) };
            let (p, c) = ratio_fit(r, w, zs, step);
            let (p_ext, c_ext) = ratio_fit(r, w, ext, step);
            let (p, p_ext) = if is_near { (p, p_ext) } else { (-p, -p_ext) };
            let tol = 0.2 * order.max(1.0);
            let order_ok = if sharp {
                (p - order).abs() <= tol && (p_ext - order).abs() <= tol
            } else {
                p >= order - tol && p_ext >= order - tol
            };
            let c_ok = c_ext <= 1.2 * c;
            pass &= order_ok && c_ok;
            lines.push(format!(
                "a={a} {name}: exponent {p:.3}/{p_ext:.3} (order {order}), C {c:.3e} -> {c_ext:.3e}"
            ));
        }
    }
    verdict(2, pass, lines.join("; "));
}

#[test]
fn c03_auxiliary_relation() {
    let gaussian = |x: f64| (-(x + 2.0) * (x + 2.0)).exp();
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 5.0] {
        let g = Grid::default_for(a, 1.0).unwrap();
        let t = crack_targets(&g);
        let km = KernelMatrices::assemble(KernelScale::new(a).unwrap(), &g, &t, Execution::Parallel);
        let phi = sample_crack(&g, gaussian);
        let lhs = &km.t_values * &phi * (-a / PI);
        let rhs = &phi + &km.s_derivative * &phi / PI;
        worst = worst.max((lhs - rhs).amax());
    }
    verdict(3, worst <= 1e-6, format!("max residual {worst:.2e} (≤ 1e-6) for a ∈ {{0.5, 1, 5}}"));
}

#[test]
fn c04_cross_formulation() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for name in FIG2 {
        let p = mode3_problem(name);
        let sys = Mode3System::assemble(&p).unwrap();
        let profiles: Vec<Vec<f64>> = Formulation::ALL
            .iter()
            .map(|&f| {
                let s = sys.solve(f).unwrap();
                s.jump.iter().copied().chain(s.traction.iter().map(|t| s.kappa * t)).collect()
            })
            .collect();
        for i in 0..profiles.len() {
            for j in i + 1..profiles.len() {
                worst = worst.max(rel_max(&profiles[i], &profiles[j]));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        4,
        worst <= 1e-4 && secs <= 60.0,
        format!("worst pairwise deviation {worst:.2e} (≤ 1e-4), {secs:.1} s (≤ 60 s)"),
    );
}

#[test]
fn c05_dual_path_mode3() {
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for name in FIG2.iter().chain(&["fig3-asymmetric"]) {
        let r = bundled(name).unwrap().oracle_check(Execution::Parallel).unwrap();
        worst = worst.max(r.comparison.max_relative);
        lines.push(format!("{name} {:.2e}", r.comparison.max_relative));
    }
    verdict(5, worst <= 5e-3, format!("worst {worst:.2e} (≤ 5e-3): {}", lines.join(", ")));
}

fn fig2_jumps(name: &str, xs: &[f64]) -> Vec<f64> {
    let out = bundled(name).unwrap().run(Execution::Parallel).unwrap();
    xs.iter()
        .map(|&x| {
            let region = if x < 0.0 { Region::Crack } else { Region::Interface };
            out.profile.jump_star_at(0, region, x).unwrap()
        })
        .collect()
}

#[test]
fn c06_fig2_ordering() {
    let xs = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    let mut pass = true;
    let mut lines = Vec::new();
    let mut by_kappa = Vec::new();
    for kappa in ["kappa5", "kappa20"] {
        let [a, b, c] = ["AA", "AB", "AC"].map(|m| fig2_jumps(&format!("fig2-{m}-{kappa}"), &xs));
        let ok = (0..xs.len()).all(|i| c[i] > b[i] && b[i] > a[i]);
        pass &= ok;
        lines.push(format!("{kappa}: C > B > A {}", if ok { "holds" } else { "violated" }));
        by_kappa.push([a, b, c]);
    }
    for (m, label) in ["A", "B", "C"].iter().enumerate() {
        let ok = (0..xs.len()).all(|i| by_kappa[1][m][i] > by_kappa[0][m][i]);
        pass &= ok;
        lines.push(format!("A/{label}: κ*=20 > κ*=5 {}", if ok { "holds" } else { "violated" }));
    }
    verdict(6, pass, lines.join("; "));
}

#[test]
fn c07_tip_consistency() {
    let mut pass = true;
    let mut lines = Vec::new();
    for name in FIG2 {
        let s = bundled(name).unwrap();
        let mut fine = s.clone();
        fine.grid.refine = Some(2);
        let sol = |sc: &Scenario| match sc.run(Execution::Parallel).unwrap().solution {
            RunSolution::OutOfPlane(m) => m,
            RunSolution::InPlane(_) => unreachable!(),
        };
        let (c, f) = (sol(&s), sol(&fine));
        let ok = c.tip_mismatch() <= 1e-2
            && f.tip_mismatch() <= c.tip_mismatch().max(1e-12)
            && f.near_tip_mismatch() < c.near_tip_mismatch()
            && c.near_tip_mismatch() <= 1e-2;
        pass &= ok;
        lines.push(format!(
            "{name} tip {:.1e}, first node {:.2e} -> {:.2e}",
            c.tip_mismatch(),
            c.near_tip_mismatch(),
            f.near_tip_mismatch()
        ));
    }
    verdict(7, pass, lines.join("; "));
}

#[test]
fn c08_in_plane_algebra() {
    let mut pass = true;
    let mut lines = Vec::new();
    for name in ["fig6-inplane", "table2-inplane"] {
        let s = bundled(name).unwrap();
        let bc = s.constants().unwrap();
        let c = in_plane_constants(&bc, &s.interface_law(&bc).unwrap()).unwrap();
        let pf = invert_abc(&c);
        let xis = log_space(1e-3 * c.xi1, 1e3 * c.xi2, 10);
        let samples: Vec<f64> = xis.iter().flat_map(|&x| [x, -x]).collect();

        let mut recon = 0.0f64;
        let mut conj = 0.0f64;
        for &xi in &samples {
            let direct = abc_at_xi(&c, xi).unwrap();
            for (k, (_, fam, pre)) in pf.families().iter().enumerate() {
                let m = pf.reconstruct(fam, *pre, xi);
                let scale = direct[k].iter().map(|z| z.norm()).fold(0.0, f64::max);
                let err = (m - direct[k]).iter().map(|z| z.norm()).fold(0.0, f64::max);
                recon = recon.max(err / scale);
            }
            if xi > 0.0 {
                let mirrored = abc_at_xi(&c, -xi).unwrap();
                for k in 0..3 {
                    let d = (mirrored[k] - direct[k].map(|z| z.conj()))
                        .iter()
                        .map(|z| z.norm())
                        .fold(0.0, f64::max);
                    let scale = direct[k].iter().map(|z| z.norm()).fold(0.0, f64::max);
                    conj = conj.max(d / scale);
                }
            }
        }

        let mut sum_id = 0.0f64;
        for (_, fam, _) in pf.families() {
            for (pf_pair, dag) in [(&fam.r_pf, &fam.r_dag), (&fam.i_pf, &fam.i_dag)] {
                let lhs = pf_pair[0] + pf_pair[1];
                let rhs = dag * (c.xi2 - c.xi1);
                let scale = pf_pair[0].amax().max(pf_pair[1].amax()).max(1e-300);
                sum_id = sum_id.max((lhs - rhs).amax() / scale);
            }
        }

        let vieta = ((c.xi1 + c.xi2) / (c.d1 / c.d2) - 1.0)
            .abs()
            .max((c.xi1 * c.xi2 / (c.d0 / c.d2) - 1.0).abs());

        let eps = f64::EPSILON;
        let ok = recon <= 1e-12 && sum_id <= 16.0 * eps && vieta <= 1e-12 && conj <= 4.0 * eps;
        pass &= ok;
        lines.push(format!(
            "{name}: reconstruction {recon:.1e}, sum identity {sum_id:.1e}, Vieta {vieta:.1e}, conjugate {conj:.1e}"
        ));
    }
    verdict(8, pass, lines.join("; "));
}

#[test]
fn c09_fig6() {
    let s = bundled("fig6-inplane").unwrap();
    let solve = |sc: &Scenario| match sc.run(Execution::Parallel).unwrap().solution {
        RunSolution::InPlane(m) => m,
        RunSolution::OutOfPlane(_) => unreachable!(),
    };
    let amax = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let coarse = solve(&s);
    let mut fine_s = s.clone();
    fine_s.grid.refine = Some(2);
    let fine = solve(&fine_s);

    let (u1, u2) = (coarse.jump[0].amax(), coarse.jump[1].amax());
    let t_max = |m: &imperfect_crack::mode12::Mode12Solution| {
        amax(m.traction[0].as_slice()).max(amax(m.traction[1].as_slice()))
    };
    let t_change = (t_max(&fine) / t_max(&coarse) - 1.0).abs();
    let oracle = s.oracle_check(Execution::Parallel).unwrap().comparison.max_relative;

    verdict(
        9,
        u2 > u1 && t_change <= 2e-2 && oracle <= 1e-2,
        format!(
            "max|u2| {u2:.4} > max|u1| {u1:.4}; max|t| change {t_change:.2e} (≤ 2e-2); oracle {oracle:.2e} (≤ 1e-2)"
        ),
    );
}

#[test]
fn c10_validation() {
    let a = preset("A").unwrap();
    let bc3 = bimaterial_constants(&a, &a).unwrap();
    let balanced = Loading::symmetric_exponential(3, 1.0, 1.0);
    let unbalanced = Loading {
        terms: vec![LoadTerm {
            face: Face::Upper,
            component: 3,
            amplitude: 1.0,
            length: 1.0,
            power: 0,
        }],
        tables: vec![],
    };

    let s6 = bundled("fig6-inplane").unwrap();
    let bc12 = s6.constants().unwrap();
    let law = s6.interface_law(&bc12).unwrap();
    let load12 = s6.resolved_loading().unwrap();

    let mut bad_beta = bc12;
    if let Some(b) = bad_beta.in_plane.as_mut() {
        b.beta = 1.0;
    }
    let indefinite = InterfaceLaw { k12: 10.0, ..law };

    let checks: [(&str, bool); 6] = [
        (
            "unbalanced mode III",
            matches!(Mode3Problem::new(&bc3, 1.0, unbalanced, None), Err(Error::UnbalancedLoading { .. })),
        ),
        (
            "κ = 0",
            matches!(Mode3Problem::new(&bc3, 0.0, balanced.clone(), None), Err(Error::Validation { .. })),
        ),
        (
            "κ < 0",
            matches!(Mode3Problem::new(&bc3, -1.0, balanced, None), Err(Error::Validation { .. })),
        ),
        (
            "|β| ≥ 1",
            matches!(Mode12Problem::new(&bad_beta, &law, load12.clone(), None), Err(Error::Validation { .. })),
        ),
        (
            "indefinite K",
            matches!(Mode12Problem::new(&bc12, &indefinite, load12, None), Err(Error::Validation { .. })),
        ),
        (
            "negative discriminant",
            matches!(factor_denominator(1.0, 1.0, 1.0), Err(Error::UnsupportedRegime(_))),
        ),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    verdict(
        10,
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} invalid inputs rejected at construction", checks.len())
        } else {
            format!("not rejected as expected: {}", failed.join(", "))
        },
    );
}
