use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use upqp_core::banach::*;
use upqp_core::linalg::random::haar_unitary;
use upqp_core::processors::{
    build_controlled_processor, build_epsilon_net, build_teleportation_processor,
};
use upqp_core::quantum::Processor;
use upqp_core::CMatrix;

#[test]
fn teleportation_embedding_respects_accuracy() {
    for d in [2, 3] {
        let p = build_teleportation_processor(d).unwrap();
        let eps = 1.0 - 1.0 / (d * d) as f64;
        let rep = distortion(&p, if d == 2 { 1000 } else { 100 }, 11).unwrap();
        assert!(
            rep.sampled_min_ratio >= (1.0 - eps).sqrt() - 1e-9,
            "d={d}: {}",
            rep.sampled_min_ratio
        );
        assert!(rep.sampled_max_ratio <= 1.0 + 1e-8);
    }
}

#[test]
fn witness_chain_holds_for_teleportation_and_nets() {
    for d in [2, 3] {
        let p = build_teleportation_processor(d).unwrap();
        let w = memory_lower_bound_witness(&p, 1.0 - 1.0 / (d * d) as f64).unwrap();
        assert!(w.chain.unwrap().holds());
    }
    let net = build_epsilon_net(2, 0.5, 1, 500).unwrap();
    let p = build_controlled_processor(&net).unwrap();
    let w = memory_lower_bound_witness(&p, 0.5).unwrap();
    assert_eq!(w.kind, ProcessorKind::Unitary);
    let chain = w.chain.unwrap();
    assert!(chain.holds());
    assert_eq!(chain.m_prime, net.len());
}

#[test]
fn near_one_accuracy_gives_vacuous_bound() {
    let p = build_teleportation_processor(2).unwrap();
    let w = memory_lower_bound_witness(&p, 1.0).unwrap();
    assert!(w.bound.vacuous && w.chain.is_none());
    assert_eq!(w.certified_m_lower(), 1.0);
}

#[test]
fn transpose_conventions_share_norms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let v: CMatrix = haar_unitary(6, &mut rng);
    let p = Processor::unitary(v, 2, 3).unwrap();
    let keep = embedding_map_with(&p, Transpose::Keep).unwrap();
    let drop = embedding_map_with(&p, Transpose::Drop).unwrap();
    for x in diagonal_family(2) {
        assert!((keep.image_norm(&x).unwrap() - drop.image_norm(&x).unwrap()).abs() < 1e-12);
    }
    assert!((cb_norm(&p).unwrap() - 1.0).abs() < 1e-9);
}
