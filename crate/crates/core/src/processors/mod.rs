//! Explicit approximate processors and their programs.

pub mod net;
pub mod program;
pub mod synthesis;
pub mod teleport;

pub use net::{
    build_controlled_processor, build_epsilon_net, build_epsilon_net_with, op_distance,
    NetCertification, UnitaryNet,
};
pub use program::{
    best_program_state, fidelity_operator, programming_error, programming_error_with_tol,
    ProgramSearch, ProgrammingErrorReport,
};
pub use synthesis::{
    apply_map, map_images, russo_dye_decompose, synthesize_processor, ProgramSource, RussoDye,
    SynthesisResult, SynthesizedProgram,
};
pub use teleport::{build_teleportation_processor, teleportation_program};
