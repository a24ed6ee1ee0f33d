use imperfect_crack::materials::{
    bimaterial_constants, compliance_from_shear_moduli, preset, InPlaneCompliance, InterfaceLaw,
    Loading,
};
use imperfect_crack::mode12::{abc_at_xi, in_plane_constants, invert_abc, solve_mode12, Mode12Problem};
use imperfect_crack::mode3::{solve_mode3, Formulation, Mode3Problem};
use imperfect_crack::operators::{build_grid, Grid};
use imperfect_crack::specfun::{kernel_s, kernel_t, KernelScale};
use nalgebra::DVector;
use proptest::prelude::*;

fn small_grid() -> Grid {
    build_grid(20.0, 20.0, 60, 60, 3.0).unwrap()
}

fn in_plane() -> impl Strategy<Value = InPlaneCompliance> {
    (0.3f64..3.0, 0.3f64..3.0, -0.9f64..0.9, 0.3f64..3.0).prop_map(|(s11, s22, r, s66)| {
        InPlaneCompliance {
            s11,
            s12: r * (s11 * s22).sqrt(),
            s22,
            s66,
        }
    })
}

fn material() -> impl Strategy<Value = imperfect_crack::materials::OrthotropicCompliance> {
    (0.2f64..5.0, 0.2f64..5.0, in_plane())
        .prop_map(|(m23, m13, ip)| compliance_from_shear_moduli(m23, m13, Some(ip)).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.amax().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_parity(a in 0.1f64..10.0, lz in -6.0f64..3.0) {
        let k = KernelScale::new(a).unwrap();
        let x = 10f64.powf(lz) / a;
        prop_assert_eq!(kernel_s(k, -x), -kernel_s(k, x));
        prop_assert_eq!(kernel_t(k, -x).unwrap(), kernel_t(k, x).unwrap());
    }

    #[test]
    fn kernel_scale_covariance(a in 0.1f64..10.0, x in -50.0f64..50.0) {
        prop_assume!(x != 0.0);
        let k = KernelScale::new(a).unwrap();
        let one = KernelScale::new(1.0).unwrap();
        prop_assert_eq!(kernel_s(k, x), kernel_s(one, a * x));
        prop_assert_eq!(kernel_t(k, x).unwrap(), kernel_t(one, a * x).unwrap());
    }

    #[test]
    fn swapping_materials_flips_mismatch(m1 in material(), m2 in material()) {
        let (fwd, rev) = (bimaterial_constants(&m1, &m2), bimaterial_constants(&m2, &m1));
        prop_assume!(fwd.is_ok() && rev.is_ok());
        let (fwd, rev) = (fwd.unwrap(), rev.unwrap());
        let (o1, o2) = (fwd.out_of_plane.unwrap(), rev.out_of_plane.unwrap());
        prop_assert!(rel(o1.h33, o2.h33) < 1e-14);
        prop_assert!((o1.delta3 + o2.delta3).abs() < 1e-14);
        let (p1, p2) = (fwd.in_plane.unwrap(), rev.in_plane.unwrap());
        prop_assert!(rel(p1.h11, p2.h11) < 1e-14 && rel(p1.h22, p2.h22) < 1e-14);
        prop_assert!((p1.beta + p2.beta).abs() < 1e-14);
        prop_assert!((p1.delta1 + p2.delta1).abs() < 1e-14);
        prop_assert!((p1.delta2 + p2.delta2).abs() < 1e-14);
        prop_assert!(rel(p1.gamma, p2.gamma) < 1e-14);
    }

    #[test]
    fn constants_are_homogeneous(m1 in material(), m2 in material(), c in 0.1f64..10.0) {
        let scale = |m: &imperfect_crack::materials::OrthotropicCompliance| {
            let mut s = *m;
            if let Some(ip) = s.in_plane.as_mut() {
                ip.s11 *= c; ip.s12 *= c; ip.s22 *= c; ip.s66 *= c;
            }
            if let Some(op) = s.out_of_plane.as_mut() {
                op.s44 *= c; op.s55 *= c;
            }
            s
        };
        let base = bimaterial_constants(&m1, &m2);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let scaled = bimaterial_constants(&scale(&m1), &scale(&m2)).unwrap();
        let (o, os) = (base.out_of_plane.unwrap(), scaled.out_of_plane.unwrap());
        prop_assert!(rel(os.h33, c * o.h33) < 1e-13);
        prop_assert!((os.delta3 - o.delta3).abs() < 1e-13);
        let (p, ps) = (base.in_plane.unwrap(), scaled.in_plane.unwrap());
        prop_assert!(rel(ps.h11, c * p.h11) < 1e-13 && rel(ps.h22, c * p.h22) < 1e-13);
        for (u, v) in [(p.beta, ps.beta), (p.gamma, ps.gamma), (p.delta1, ps.delta1), (p.delta2, ps.delta2)] {
            prop_assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn partial_fractions_hold_for_any_interface(
        m1 in material(),
        m2 in material(),
        k11 in 0.2f64..20.0,
        k22 in 0.2f64..20.0,
        r in -0.95f64..0.95,
        lxi in -3.0f64..3.0,
    ) {
        let bc = bimaterial_constants(&m1, &m2);
        prop_assume!(bc.is_ok());
        let bc = bc.unwrap();
        let law = InterfaceLaw { k11, k12: r * (k11 * k22).sqrt(), k22, kappa: 1.0 };
        let c = in_plane_constants(&bc, &law);
        prop_assume!(c.is_ok());
        let c = c.unwrap();
        prop_assert!(c.xi1 > 0.0 && c.xi1 < c.xi2);
        prop_assert!(rel(c.xi1 + c.xi2, c.d1 / c.d2) < 1e-12);
        prop_assert!(rel(c.xi1 * c.xi2, c.d0 / c.d2) < 1e-12);
        let pf = invert_abc(&c);
        let xi = 10f64.powf(lxi) * c.xi1;
        let direct = abc_at_xi(&c, xi).unwrap();
        let mirrored = abc_at_xi(&c, -xi).unwrap();
        for (k, (_, fam, pre)) in pf.families().iter().enumerate() {
            let scale = direct[k].iter().map(|z| z.norm()).fold(1e-300, f64::max);
            let err = (pf.reconstruct(fam, *pre, xi) - direct[k]).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(err / scale < 1e-10, "family {k}: {:e}", err / scale);
            let conj = (mirrored[k] - direct[k].map(|z| z.conj())).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(conj / scale < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn mode3_is_linear(
        alpha in -3.0f64..3.0,
        l1 in 0.5f64..2.0,
        l2 in 0.5f64..2.0,
        kappa in 0.5f64..5.0,
        f in prop::sample::select(Formulation::ALL.to_vec()),
    ) {
        let bc = bimaterial_constants(&preset("A").unwrap(), &preset("C").unwrap()).unwrap();
        let p1 = Loading::symmetric_exponential(3, 1.0, l1);
        let p2 = Loading::asymmetric_exponential(3, 1.0, l2);
        let mut sum = p1.scaled(alpha);
        sum.terms.extend(p2.terms.iter().copied());
        let solve = |load: Loading| {
            let p = Mode3Problem::new(&bc, kappa, load, Some(small_grid())).unwrap().with_formulation(f);
            solve_mode3(&p).unwrap()
        };
        let (s1, s2, s) = (solve(p1), solve(p2), solve(sum));
        let jump = &s1.jump * alpha + &s2.jump;
        let traction = &s1.traction * alpha + &s2.traction;
        prop_assert!((&s.jump - &jump).amax() / max_abs(&jump) < 1e-10);
        prop_assert!((&s.traction - &traction).amax() / max_abs(&traction) < 1e-10);
    }

    #[test]
    fn mode3_jump_grows_with_kappa(k1 in 0.5f64..10.0, ratio in 1.2f64..4.0, l in 0.5f64..2.0) {
        let bc = bimaterial_constants(&preset("A").unwrap(), &preset("B").unwrap()).unwrap();
        let load = Loading::symmetric_exponential(3, 1.0, l);
        let solve = |kappa: f64| {
            let p = Mode3Problem::new(&bc, kappa, load.clone(), Some(small_grid())).unwrap();
            solve_mode3(&p).unwrap()
        };
        let (lo, hi) = (solve(k1), solve(k1 * ratio));
        for (a, b) in lo.jump.iter().zip(hi.jump.iter()) {
            prop_assert!(b >= a, "crack jump {a} -> {b}");
        }
        for (a, b) in lo.traction.iter().zip(hi.traction.iter()) {
            prop_assert!(hi.kappa * b >= lo.kappa * a, "interface jump {} -> {}", lo.kappa * a, hi.kappa * b);
        }
    }

    #[test]
    fn mode12_is_linear(alpha in -3.0f64..3.0, l in 0.5f64..2.0, component in 1usize..=2) {
        let bc = bimaterial_constants(&preset("incompressible-I").unwrap(), &preset("incompressible-II").unwrap()).unwrap();
        let law = InterfaceLaw { k11: 10.0, k12: 2.0, k22: 3.0, kappa: 1.0 };
        let p1 = Loading::asymmetric_exponential(component, 1.0, l);
        let p2 = Loading::symmetric_exponential(3 - component, 1.0, 1.0);
        let mut sum = p1.scaled(alpha);
        sum.terms.extend(p2.terms.iter().copied());
        let solve = |load: Loading| {
            solve_mode12(&Mode12Problem::new(&bc, &law, load, Some(small_grid())).unwrap()).unwrap()
        };
        let (s1, s2, s) = (solve(p1), solve(p2), solve(sum));
        for k in 0..2 {
            let jump = &s1.jump[k] * alpha + &s2.jump[k];
            let scale = max_abs(&jump).max(max_abs(&s.jump[0])).max(max_abs(&s.jump[1]));
            prop_assert!((&s.jump[k] - &jump).amax() / scale < 1e-10);
        }
    }
}
