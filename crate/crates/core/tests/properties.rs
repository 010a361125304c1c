//! Property-based invariants across the library.
//!
//! Matrices are drawn from canonical parameters (every 2×2 unitary has one),
//! so the strategies cover the full unitary group rather than a sampled
//! subset of named gates.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use gate_structure::circuit::text::{circuit_to_text, parse_circuit_str};
use gate_structure::circuit::{
    circuit_unitary, metrics, optimize, pass_absorb, pass_cancel_inverses, pass_decompose,
    unitary_distance_up_to_phase, Circuit,
};
use gate_structure::factorize::phase_family;
use gate_structure::gen::{random_circuit, random_genuine, rng_from_seed};
use gate_structure::io::{matrix_to_json, parse_matrix_str, AnyMatrix};
use gate_structure::matrix::{cis, tensor2x2, GateMatrix2, GateMatrix4};
use gate_structure::separability::realign;
use gate_structure::single_qubit::{classify_hermitian, HermitianParams, Hermiticity, Sign};
use gate_structure::{analyze, separability_oracle, CanonicalSingleQubit, Tolerance, Verdict};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn angle() -> impl Strategy<Value = f64> {
    -PI..=PI
}

fn canonical() -> impl Strategy<Value = CanonicalSingleQubit> {
    (0.0..=FRAC_PI_2, angle(), angle(), angle())
        .prop_map(|(t, p0, p1, p2)| CanonicalSingleQubit::new(t, p0, p1, p2))
}

fn unitary2() -> impl Strategy<Value = GateMatrix2> {
    canonical().prop_map(|c| c.realize())
}

fn product4() -> impl Strategy<Value = (GateMatrix2, GateMatrix2, f64)> {
    (unitary2(), unitary2(), angle())
}

fn genuine4() -> impl Strategy<Value = GateMatrix4> {
    any::<u64>().prop_map(|seed| random_genuine(&mut rng_from_seed(seed)))
}

fn circuit3() -> impl Strategy<Value = Circuit> {
    any::<u64>().prop_map(|seed| random_circuit(&mut rng_from_seed(seed), 3, 8))
}

fn same_circuit_semantics(a: &Circuit, b: &Circuit) -> f64 {
    unitary_distance_up_to_phase(&circuit_unitary(a).unwrap(), &circuit_unitary(b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_round_trip(c in canonical()) {
        let u = c.realize();
        let back = CanonicalSingleQubit::canonicalize(&u, &tol()).unwrap();
        prop_assert!(back.realize().max_abs_diff(&u) <= 1e-12);
        prop_assert!((0.0..=FRAC_PI_2).contains(&back.theta));
        for phase in [back.phi0, back.phi1, back.phi2] {
            prop_assert!(phase > -PI - 1e-15 && phase <= PI + 1e-15);
        }
    }

    #[test]
    fn canonical_form_moduli_and_phase_constraint(c in canonical()) {
        let u = c.realize();
        prop_assert!((u[(0, 0)].norm() - u[(1, 1)].norm()).abs() <= 1e-15);
        prop_assert!((u[(0, 1)].norm() - u[(1, 0)].norm()).abs() <= 1e-15);
        // arg a + arg d = 2·φ0 (mod 2π) whenever the diagonal is non-zero.
        if u[(0, 0)].norm() > 1e-6 {
            let lhs = (u[(0, 0)] * u[(1, 1)]).arg();
            prop_assert!(gate_structure::matrix::angular_distance(lhs, 2.0 * c.phi0) <= 1e-9);
        }
    }

    #[test]
    fn sign_forms_are_unitary(c in canonical()) {
        let forms = c.equivalent_sign_forms();
        prop_assert_eq!(forms[2], c.realize());
        for f in forms {
            prop_assert!(f.unitarity_residual() <= 1e-14);
        }
    }

    #[test]
    fn hermitian_family_is_self_inverse(theta in 0.0..=PI, phi2 in angle(), minus in any::<bool>()) {
        let sign = if minus { Sign::Minus } else { Sign::Plus };
        let u = HermitianParams { theta, phi2, sign }.realize();
        prop_assert!(u.mat_mul(&u).max_abs_diff(&GateMatrix2::identity()) <= 1e-14);
        let h = classify_hermitian(&u, &tol()).unwrap();
        let Hermiticity::Reflection(p) = h else {
            return Err(TestCaseError::fail(format!("{h:?}")));
        };
        prop_assert!(p.realize().max_abs_diff(&u) <= 1e-12);
    }

    #[test]
    fn non_involutions_are_rejected(c in canonical()) {
        let u = c.realize();
        let is_involution = u.mat_mul(&u).max_abs_diff(&GateMatrix2::identity()) <= 1e-6;
        let h = classify_hermitian(&u, &tol()).unwrap();
        if !is_involution {
            prop_assert_eq!(h, Hermiticity::NotSelfInverse);
        }
    }

    #[test]
    fn products_pass_every_necessary_check((u1, u2, g) in product4()) {
        let a = tensor2x2(&u1, &u2).scale(cis(g));
        let r = analyze(&a, &tol()).unwrap();
        prop_assert!(r.condition1_diag && r.condition1_antidiag);
        prop_assert!(r.tests_passed());
        prop_assert!(r.det_conditions_passed());
        prop_assert_eq!(r.verdict, Verdict::Separable);
        let fp = r.factors.unwrap();
        prop_assert!(fp.product().max_abs_diff(&a) <= 1e-9);
        prop_assert!(fp.u1.unitarity_residual() <= 1e-12 && fp.u2.unitarity_residual() <= 1e-12);
    }

    #[test]
    fn factors_are_unique_up_to_phase((u1, u2, g) in product4()) {
        let fp = analyze(&tensor2x2(&u1, &u2).scale(cis(g)), &tol()).unwrap().factors.unwrap();
        prop_assert!(fp.u1.distance_up_to_phase(&u1) <= 1e-9);
        prop_assert!(fp.u2.distance_up_to_phase(&u2) <= 1e-9);
    }

    #[test]
    fn gauge_family_preserves_the_product((u1, u2, g) in product4(), alpha in angle()) {
        let a = tensor2x2(&u1, &u2).scale(cis(g));
        let fp = analyze(&a, &tol()).unwrap().factors.unwrap();
        let moved = phase_family(&fp, alpha);
        prop_assert!(moved.product().max_abs_diff(&a) <= 1e-9);
        prop_assert!(moved.u1.distance_up_to_phase(&fp.u1) <= 1e-12);
    }

    #[test]
    fn verdict_is_invariant_under_global_and_local_phases(
        a in genuine4(), g in angle(), v in product4(), w in product4(),
    ) {
        let (v1, v2, _) = v;
        let (w1, w2, _) = w;
        let base = analyze(&a, &tol()).unwrap();
        let phased = analyze(&a.scale(cis(g)), &tol()).unwrap();
        let dressed_m = tensor2x2(&v1, &v2).mat_mul(&a).mat_mul(&tensor2x2(&w1, &w2));
        let dressed = analyze(&dressed_m, &tol()).unwrap();
        prop_assert_eq!(base.verdict, Verdict::GenuineTwoQubit);
        prop_assert_eq!(phased.verdict, Verdict::GenuineTwoQubit);
        prop_assert_eq!(dressed.verdict, Verdict::GenuineTwoQubit);
        prop_assert!((base.oracle_residual - phased.oracle_residual).abs() <= 1e-9);
        prop_assert!((base.oracle_residual - dressed.oracle_residual).abs() <= 1e-9);
    }

    #[test]
    fn oracle_matches_svd_of_realignment(a in genuine4()) {
        let r = realign(&a);
        let dense = DMatrix::<Complex64>::from_row_slice(4, 4, &r.to_row_major());
        let sv = dense.singular_values();
        let top = sv.max();
        let expected = (sv.iter().map(|s| s * s).sum::<f64>() - top * top).max(0.0).sqrt();
        let oracle = separability_oracle(&a, &tol()).unwrap();
        prop_assert!((oracle.residual - expected).abs() <= 1e-7,
            "oracle {} vs svd {}", oracle.residual, expected);
    }

    #[test]
    fn controlled_phase_passes_condition_one_but_is_genuine(phi in 0.05..(2.0 * PI - 0.05)) {
        let m = GateMatrix4::diagonal([
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            cis(phi),
        ]);
        let r = analyze(&m, &tol()).unwrap();
        prop_assert!(r.condition1_diag && r.condition1_antidiag);
        prop_assert!(!r.tests_passed());
        prop_assert_eq!(r.verdict, Verdict::GenuineTwoQubit);
    }

    #[test]
    fn matrix_json_round_trip_is_exact(u in unitary2(), (p1, p2, g) in product4()) {
        let path = std::path::Path::new("mem.json");
        prop_assert_eq!(parse_matrix_str(&matrix_to_json(&u), path).unwrap(), AnyMatrix::Two(u));
        let m = tensor2x2(&p1, &p2).scale(cis(g));
        prop_assert_eq!(parse_matrix_str(&matrix_to_json(&m), path).unwrap(), AnyMatrix::Four(m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn each_pass_preserves_semantics(c in circuit3()) {
        for out in [
            pass_decompose(c.clone(), &tol()),
            pass_cancel_inverses(c.clone(), &tol()),
            pass_absorb(c.clone(), &tol()),
            optimize(c.clone(), &tol()).circuit,
        ] {
            prop_assert!(same_circuit_semantics(&c, &out) <= 1e-9);
        }
    }

    #[test]
    fn absorption_realizes_the_quantum_cost(c in circuit3()) {
        let absorbed = pass_absorb(c.clone(), &tol());
        prop_assert_eq!(metrics(&absorbed).gate_count, metrics(&c).quantum_cost);
        prop_assert_eq!(metrics(&absorbed).quantum_cost, metrics(&c).quantum_cost);
    }

    #[test]
    fn decompose_leaves_no_separable_pair(c in circuit3()) {
        let out = pass_decompose(c, &tol());
        for g in out.gates() {
            if let gate_structure::circuit::GateOp::Pair { matrix, .. } = &g.op {
                prop_assert_eq!(analyze(matrix, &tol()).unwrap().verdict, Verdict::GenuineTwoQubit);
            }
        }
    }

    #[test]
    fn optimize_is_monotone_and_idempotent(c in circuit3()) {
        let once = optimize(c, &tol());
        prop_assert!(once.after.dominated_by(&once.before));
        let twice = optimize(once.circuit.clone(), &tol());
        prop_assert_eq!(&twice.circuit, &once.circuit);
        prop_assert_eq!(twice.before, twice.after);
    }

    #[test]
    fn circuit_text_round_trip_is_exact(c in circuit3()) {
        let parsed = parse_circuit_str(&circuit_to_text(&c), std::path::Path::new("mem.txt"), &tol()).unwrap();
        prop_assert_eq!(parsed, c);
    }
}
