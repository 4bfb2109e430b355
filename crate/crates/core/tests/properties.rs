use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use upqp_core::banach::{cb_norm, distortion, rademacher_average, NormSpace, RademacherMode};
use upqp_core::distances::{
    channel_distance, diamond_distance, fidelity, trace_distance, unitary_diamond_distance,
};
use upqp_core::linalg::random::{ginibre, haar_unitary, random_contraction, random_density};
use upqp_core::linalg::{Schatten, Subsystem};
use upqp_core::processors::russo_dye_decompose;
use upqp_core::quantum::{Channel, Processor};
use upqp_core::CMatrix;

const ALL_P: [Schatten; 4] = [
    Schatten::Trace,
    Schatten::Frobenius,
    Schatten::Operator,
    Schatten::P(3.0),
];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn norm(a: &CMatrix, p: Schatten) -> f64 {
    a.schatten_norm(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schatten_norm_axioms(seed in any::<u64>(), n in 1usize..6, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let mut r = rng(seed);
        let a: CMatrix = ginibre(n, n, &mut r);
        let b: CMatrix = ginibre(n, n, &mut r);
        let c = Complex64::new(re, im);
        for p in ALL_P {
            let (na, nb) = (norm(&a, p), norm(&b, p));
            prop_assert!(norm(&(&a + &b), p) <= na + nb + 1e-10);
            prop_assert!((norm(&a.scale(c), p) - c.norm() * na).abs() <= 1e-9 * na.max(1.0));
            prop_assert!(na >= 0.0);
        }
        let (t, f, o) = (norm(&a, Schatten::Trace), norm(&a, Schatten::Frobenius), norm(&a, Schatten::Operator));
        prop_assert!(o <= f + 1e-10 && f <= t + 1e-10);
        prop_assert!(t <= (n as f64).sqrt() * f + 1e-9);
    }

    #[test]
    fn holder_inequality(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let a: CMatrix = ginibre(n, n, &mut r);
        let b: CMatrix = ginibre(n, n, &mut r);
        let pairing = (&a.dagger() * &b).trace().norm();
        prop_assert!(pairing <= norm(&a, Schatten::Trace) * norm(&b, Schatten::Operator) + 1e-9);
        prop_assert!(pairing <= norm(&a, Schatten::Frobenius) * norm(&b, Schatten::Frobenius) + 1e-9);
    }

    #[test]
    fn unitary_invariance(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let a: CMatrix = ginibre(n, n, &mut r);
        let u: CMatrix = haar_unitary(n, &mut r);
        let v: CMatrix = haar_unitary(n, &mut r);
        let rotated = &(&u * &a) * &v;
        for p in ALL_P {
            prop_assert!((norm(&rotated, p) - norm(&a, p)).abs() <= 1e-9 * norm(&a, p).max(1.0));
        }
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let rho: CMatrix = random_density(da, &mut r);
        let sigma: CMatrix = random_density(db, &mut r);
        let joint = rho.tensor(&sigma).unwrap();
        prop_assert!(joint.partial_trace((da, db), Subsystem::B).unwrap().max_abs_diff(&rho) < 1e-12);
        prop_assert!(joint.partial_trace((da, db), Subsystem::A).unwrap().max_abs_diff(&sigma) < 1e-12);
        let g: CMatrix = ginibre(da * db, da * db, &mut r);
        let tb = g.partial_trace((da, db), Subsystem::B).unwrap();
        prop_assert!((tb.trace() - g.trace()).norm() < 1e-10);
    }

    #[test]
    fn random_channels_map_states_to_states(seed in any::<u64>(), d in 1usize..5, k in 1usize..5) {
        let mut r = rng(seed);
        let c: Channel = Channel::random(d, k, &mut r);
        prop_assert!(c.tp_deviation() < 1e-10);
        let out = c.apply(&random_density(d, &mut r)).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(out.is_hermitian(1e-10));
        prop_assert!(out.eigvals_hermitian().unwrap()[0] > -1e-10);
        let j = c.choi();
        prop_assert!(j.eigvals_hermitian().unwrap()[0] > -1e-10);
    }

    #[test]
    fn choi_round_trip(seed in any::<u64>(), d in 1usize..4, k in 1usize..4) {
        let mut r = rng(seed);
        let c: Channel = Channel::random(d, k, &mut r);
        let back = Channel::from_choi(&c.choi(), d, d).unwrap();
        prop_assert!(back.choi().max_abs_diff(&c.choi()) < 1e-9);
        let rho: CMatrix = random_density(d, &mut r);
        prop_assert!(back.apply(&rho).unwrap().max_abs_diff(&c.apply(&rho).unwrap()) < 1e-9);
        prop_assert!(back.kraus_rank() <= k);
    }

    #[test]
    fn trace_distance_contracts_under_channels(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let c: Channel = Channel::random(d, 2, &mut r);
        let rho: CMatrix = random_density(d, &mut r);
        let sigma: CMatrix = random_density(d, &mut r);
        let before = trace_distance(&rho, &sigma).unwrap();
        let after = trace_distance(&c.apply(&rho).unwrap(), &c.apply(&sigma).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-10);
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assert!((0.0..=1.0 + 1e-10).contains(&f));
    }

    #[test]
    fn unitary_distance_is_a_metric_on_channels(seed in any::<u64>(), d in 2usize..5, phase in 0.0f64..6.3) {
        let mut r = rng(seed);
        let u: CMatrix = haar_unitary(d, &mut r);
        let v: CMatrix = haar_unitary(d, &mut r);
        let w: CMatrix = haar_unitary(d, &mut r);
        let uv = unitary_diamond_distance(&u, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&uv));
        prop_assert!((uv - unitary_diamond_distance(&v, &u).unwrap()).abs() < 1e-12);
        let shifted = u.scale(Complex64::from_polar(1.0, phase));
        prop_assert!(unitary_diamond_distance(&u, &shifted).unwrap() < 1e-7);
        let uw = unitary_diamond_distance(&u, &w).unwrap();
        let wv = unitary_diamond_distance(&w, &v).unwrap();
        prop_assert!(uv <= uw + wv + 1e-12);
    }

    #[test]
    fn russo_dye_reconstructs(seed in any::<u64>(), n in 1usize..7, radius in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let t = random_contraction(n, n, radius, &mut r);
        let rd = russo_dye_decompose(&t).unwrap();
        prop_assert!(rd.reconstruct().max_abs_diff(&t) < 1e-10);
        prop_assert!(rd.plus.isometry_deviation() < 1e-10 && rd.minus.isometry_deviation() < 1e-10);
    }

    #[test]
    fn rademacher_ratio_is_at_most_sqrt_n(seed in any::<u64>(), n in 1usize..7, d in 1usize..4) {
        let mut r = rng(seed);
        let family: Vec<CMatrix> = (0..n).map(|_| ginibre(d, d, &mut r)).collect();
        for space in [NormSpace::TraceNorm, NormSpace::OperatorNorm] {
            let est = rademacher_average(&family, space, RademacherMode::Exact, "ginibre").unwrap();
            // ‖Σ ε_i x_i‖ ≤ Σ‖x_i‖ ≤ √n (Σ‖x_i‖²)^{1/2}
            prop_assert!(est.ratio <= (n as f64).sqrt() + 1e-10);
            prop_assert!(est.ratio > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn diamond_triangle_inequality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cs: Vec<Channel> = (0..3).map(|_| Channel::random(2, 2, &mut r)).collect();
        let dist = |a: &Channel, b: &Channel| diamond_distance(a, b, 1e-8).unwrap().value;
        let (ab, bc, ac) = (dist(&cs[0], &cs[1]), dist(&cs[1], &cs[2]), dist(&cs[0], &cs[2]));
        prop_assert!(ac <= ab + bc + 1e-6);
        prop_assert!((0.0..=1.0 + 1e-6).contains(&ab));
    }

    #[test]
    fn diamond_distance_contracts_under_postprocessing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a: Channel = Channel::random(2, 2, &mut r);
        let b: Channel = Channel::random(2, 2, &mut r);
        let post: Channel = Channel::random(2, 3, &mut r);
        let before = diamond_distance(&a, &b, 1e-8).unwrap().value;
        let after = diamond_distance(&post.compose(&a).unwrap(), &post.compose(&b).unwrap(), 1e-8).unwrap().value;
        prop_assert!(after <= before + 1e-6);
        prop_assert!(trace_distance(&a.apply(&CMatrix::identity(2).scale_real(0.5)).unwrap(),
            &b.apply(&CMatrix::identity(2).scale_real(0.5)).unwrap()).unwrap() <= before + 1e-6);
    }

    #[test]
    fn sdp_matches_closed_form_for_unitaries(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let u: CMatrix = haar_unitary(d, &mut r);
        let w: CMatrix = haar_unitary(d, &mut r);
        let (cu, cw) = (Channel::unitary(u.clone()).unwrap(), Channel::unitary(w.clone()).unwrap());
        let sdp = diamond_distance(&cu, &cw, 1e-8).unwrap().value;
        prop_assert!((sdp - unitary_diamond_distance(&u, &w).unwrap()).abs() < 1e-6);
        prop_assert!((channel_distance(&cu, &cw, 1e-8).unwrap().value - sdp).abs() < 1e-6);
    }

    #[test]
    fn unitary_processors_embed_contractively(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v: CMatrix = haar_unitary(4, &mut r);
        let p = Processor::unitary(v, 2, 2).unwrap();
        let rep = distortion(&p, 200, seed).unwrap();
        prop_assert!(rep.sampled_max_ratio <= 1.0 + 1e-8);
        prop_assert!(rep.sampled_min_ratio <= rep.sampled_max_ratio);
        prop_assert!((cb_norm(&p).unwrap() - 1.0).abs() < 1e-9);
    }
}
