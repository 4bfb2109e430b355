use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use upqp_core::linalg::random::haar_unitary;
use upqp_core::processors::*;
use upqp_core::quantum::{weyl, ProgramState};
use upqp_core::CMatrix;

fn weyl_shifted_program(u: &CMatrix, a: usize, b: usize) -> ProgramState {
    let d = u.rows();
    let w: CMatrix = weyl(d, a, b);
    let base = teleportation_program(u).unwrap().vector;
    // (W ⊗ Id) on B ⊗ C
    let v: Vec<Complex64> = (0..d * d)
        .map(|k| {
            let (bb, c) = (k / d, k % d);
            (0..d).map(|x| w[(bb, x)] * base[x * d + c]).sum()
        })
        .collect();
    ProgramState::new(v, "shifted").unwrap()
}

#[test]
fn teleportation_error_is_weyl_covariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for d in [2, 3] {
        let p = build_teleportation_processor(d).unwrap();
        let u: CMatrix = haar_unitary(d, &mut rng);
        let expect = 1.0 - 1.0 / (d * d) as f64;
        for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let e = programming_error(&p, &u, &weyl_shifted_program(&u, a, b)).unwrap();
            assert!(
                (e.half_diamond_error - expect).abs() < 1e-5,
                "d={d} ({a},{b}): {}",
                e.half_diamond_error
            );
        }
    }
}

#[test]
fn teleportation_best_program_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for d in [2, 3] {
        let p = build_teleportation_processor(d).unwrap();
        let u: CMatrix = haar_unitary(d, &mut rng);
        let s = best_program_state(&p, &u).unwrap();
        assert!(s.degenerate);
        let e = programming_error(&p, &u, &s.program).unwrap();
        assert!((e.half_diamond_error - (1.0 - 1.0 / (d * d) as f64)).abs() < 1e-5);
    }
}

#[test]
fn net_processor_is_sound_on_haar_targets() {
    let eps = 0.5;
    let net = build_epsilon_net(2, eps, 7, net::DEFAULT_MAX_CANDIDATES).unwrap();
    assert!(net.certified());
    let p = build_controlled_processor(&net).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..50 {
        let u: CMatrix = haar_unitary(2, &mut rng);
        let s = best_program_state(&p, &u).unwrap();
        let e = programming_error(&p, &u, &s.program).unwrap();
        assert!(
            e.half_diamond_error <= eps + 1e-9,
            "{}",
            e.half_diamond_error
        );
    }
}

#[test]
fn target_between_members_uses_nearer_member() {
    let members = vec![CMatrix::identity(2), CMatrix::from_real_diag(&[1.0, -1.0])];
    let net = UnitaryNet {
        d: 2,
        resolution: 1.5,
        members: members.clone(),
        certification: NetCertification {
            samples: 0,
            max_residual: 0.0,
        },
    };
    let p = build_controlled_processor(&net).unwrap();
    let th: f64 = 0.3;
    let u = CMatrix::from_diag(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, th)]);
    let s = best_program_state(&p, &u).unwrap();
    assert_eq!(s.program.vector[0], Complex64::new(1.0, 0.0));
    let e = programming_error(&p, &u, &s.program).unwrap();
    assert!(e.half_diamond_error <= op_distance(&u, &members[0]) + 1e-9);
}

#[test]
fn synthesized_processor_meets_functional_guarantee() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let t: CMatrix = haar_unitary(4, &mut rng);
    let s = synthesize_processor(&t, 2, 1.0).unwrap();
    assert!(s.processor.m() <= 2 * 8);
    for _ in 0..5 {
        let u: CMatrix = haar_unitary(2, &mut rng);
        let p = s.program_for(&u).unwrap();
        assert!(p.report.half_diamond_error <= p.functional_bound + 1e-6);
        assert!(p.report.half_diamond_error <= (2.0 * s.achieved_delta).sqrt() + 1e-6);
    }
}
