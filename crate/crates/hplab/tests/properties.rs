use hplab::equivalence::verify_corollary_identity;
use hplab::hgseries::{coeff_f2_classical, coeff_f2n, eval_f2n, pochhammer, HGParamsF2n, HGParamsFnm, SeriesConfig};
use hplab::integrals::{beta_rule, QuadratureConfig};
use hplab::painleve::{birational_map, PhasePoint};
use hplab::pfaff::*;
use hplab::scalar::{Rational, Scalar};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use proptest::prelude::*;

fn dyadic() -> impl Strategy<Value = f64> {
    (103i64..=921).prop_map(|k| k as f64 / 1024.0)
}

fn painleve(n: usize) -> impl Strategy<Value = PainleveParams> {
    (prop::collection::vec(dyadic(), 3), prop::collection::vec(dyadic(), n + 1), prop::collection::vec(dyadic(), n))
        .prop_map(|(th, k, r)| PainleveParams::new(th[0], th[1], th[2], k, r).unwrap())
}

fn off_divisor() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..0.95, 0.05f64..0.95).prop_filter("near t1 = t2", |(a, b)| (a - b).abs() > 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn main_connection_is_flat(p in (1usize..=3).prop_flat_map(painleve), pt in off_divisor()) {
        let c = build_connection_main(&p);
        prop_assert!(flatness_residual(&c, pt.0, pt.1).unwrap() < 1e-10);
    }

    #[test]
    fn degenerate_connection_is_flat(p in painleve(2), pt in off_divisor()) {
        let mut q = p.clone();
        q.kappa[0] = q.kappa[1];
        let d = build_connection_degenerate(&q).unwrap();
        prop_assert!(flatness_residual(&d, pt.0, pt.1).unwrap() < 1e-10);
    }

    #[test]
    fn f4_connection_is_flat(a0 in dyadic(), a2 in dyadic(), a3 in dyadic(), a5 in dyadic(), pt in off_divisor()) {
        let a = [a0, 0.0, a2, a3, -(2.0 * a0 + a2 + a3 + a5), a5];
        let c = build_connection_f4(&a).unwrap();
        prop_assert!(flatness_residual(&c, pt.0, pt.1).unwrap() < 1e-10);
    }

    #[test]
    fn e23_conjugation_is_an_involution(v in prop::collection::vec(-5.0f64..5.0, 16)) {
        let m = DMatrix::from_row_slice(4, 4, &v);
        prop_assert_eq!(e23_conjugate(&e23_conjugate(&m)), m);
    }

    #[test]
    fn scaling_is_linear_in_residues(p in painleve(1), lambda in -3.0f64..3.0) {
        let c = build_connection_main(&p);
        let s = c.scaled(lambda);
        for d in Divisor::ALL {
            let diff = (s.residue(d) - c.residue(d) * lambda).amax();
            prop_assert!(diff == 0.0);
        }
    }

    #[test]
    fn exponents_sum_to_zero(p in painleve(2)) {
        let r = riemann_scheme(&build_connection_main(&p));
        prop_assert!(r.weighted_sum(&T1_COLUMNS).abs() < 1e-9);
        prop_assert!(r.weighted_sum(&T2_COLUMNS).abs() < 1e-9);
    }

    #[test]
    fn birational_map_is_involutive(
        p in painleve(2),
        q in prop::collection::vec(0.2f64..2.0, 2),
        pv in prop::collection::vec(-1.0f64..1.0, 2),
        qp in prop::collection::vec(-1.0f64..1.0, 2),
        pp in prop::collection::vec(-1.0f64..1.0, 2),
        t in off_divisor(),
    ) {
        let x = PhasePoint { q, p: pv, qp, pp, t1: t.0, t2: t.1 };
        let a = birational_map(&x, &p).unwrap();
        let b = birational_map(&a.point, &a.params).unwrap();
        for (u, v) in b.point.coords().iter().zip(x.coords()) {
            prop_assert!((u - v).abs() < 1e-9 * (1.0 + v.abs()));
        }
        prop_assert_eq!(b.params, p);
    }

    #[test]
    fn pochhammer_recurrence_is_exact(k in -2000i64..2000, len in 0usize..12) {
        let a = Rational::new(BigInt::from(k), BigInt::from(64));
        let next = pochhammer(a.clone(), len) * (a.clone() + Rational::from_i64(len as i64));
        prop_assert_eq!(pochhammer(a, len + 1), next);
    }

    #[test]
    fn n1_coefficients_are_appell_f2(b in dyadic(), bp in dyadic(), a in dyadic(), c in dyadic(), cp in dyadic(), i in 0usize..8, j in 0usize..8) {
        let p = HGParamsF2n::new(vec![b], bp, a, vec![1.0 + c], 1.0 + cp).unwrap();
        let x: Rational = coeff_f2n(&p, i, j).unwrap();
        let y: Rational = coeff_f2_classical(a, b, bp, 1.0 + c, 1.0 + cp, i, j);
        prop_assert_eq!(x, y);
    }

    #[test]
    fn bprime_zero_leaves_the_x_series(b in dyadic(), a in dyadic(), c in dyadic(), x in -0.4f64..0.4, y in -0.4f64..0.4) {
        let p = HGParamsF2n::new(vec![b], 0.0, a, vec![1.0 + c], 1.5).unwrap();
        let both = eval_f2n(&p, x, y, 60, &SeriesConfig::default()).unwrap().value;
        let only_x = eval_f2n(&p, x, 0.0, 60, &SeriesConfig::default()).unwrap().value;
        prop_assert!((both - only_x).abs() < 1e-14);
    }

    #[test]
    fn corollary_identity_at_random_points(al in dyadic(), b1 in dyadic(), b2 in dyadic(), g in dyadic(), s1 in 0.1f64..0.4, r in -0.3f64..0.3) {
        let p = HGParamsFnm::new(vec![al], vec![b1, b2], vec![1.0 + g]).unwrap();
        let s2 = s1 / (1.0 - r);
        let c = verify_corollary_identity(&p, s1, s2, 200, &SeriesConfig::default()).unwrap();
        prop_assert!(c.discrepancy < 1e-10, "{:?}", c);
    }

    #[test]
    fn beta_rule_reproduces_the_mean(p in -0.9f64..2.0, q in -0.9f64..2.0) {
        let r = beta_rule(&QuadratureConfig::default(), p, q).unwrap();
        prop_assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-12);
        prop_assert!((r.integrate(|s| s) - (p + 1.0) / (p + q + 2.0)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn degeneration_relation_is_exact(p in painleve(2)) {
        let mut p = p;
        p.kappa[0] = p.kappa[1];
        prop_assume!(dictionary_main(&p).is_ok());
        let w = main_series_solution::<Rational>(&p, 5).unwrap();
        prop_assert!(degeneration_substitution(&w, &p).is_ok());
    }

    #[test]
    fn transport_there_and_back_is_identity(p in painleve(1), dt in -0.1f64..0.1) {
        let c = build_connection_main(&p);
        let cfg = TransportConfig::default();
        let a = transport_matrix(&c, &[(0.2, 0.8), (0.2 + dt, 0.75), (0.2, 0.8)], &cfg).unwrap();
        prop_assert!((a - DMatrix::identity(3, 3)).amax() < 1e-9);
    }
}
