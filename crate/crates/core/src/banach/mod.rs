//! The embedding `Φ_V` of a processor, its distortion, and type-2 witnesses.

pub mod embedding;
pub mod rademacher;
pub mod witness;

pub use embedding::{
    cb_norm, distortion, embedding_map, embedding_map_with, EmbeddingMap, EmbeddingReport,
    Transpose, CONTRACTIVITY_TOL, DEFAULT_DISTORTION_SAMPLES,
};
pub use rademacher::{
    diagonal_family, rademacher_average, rademacher_from_oracle, NormSpace, RademacherMode,
    TypeEstimate, AUTO_EXACT_FAMILY, MAX_EXACT_FAMILY,
};
pub use witness::{
    memory_lower_bound_formula, memory_lower_bound_witness, memory_lower_bound_witness_with,
    type2_proof_path, type2_upper_bound_operator_norm, type2_upper_bound_with, LowerBoundWitness,
    MemoryBound, ProcessorKind, TypeChain, DEFAULT_TYPE_CONSTANT,
};
