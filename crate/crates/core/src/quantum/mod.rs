//! Channels, program states and processors.

mod channel;
mod processor;

pub use channel::{
    apply_channel, choi_matrix, kraus_from_choi, stinespring_dilation, weyl, Channel, Stinespring,
    KRAUS_RANK_TOL, TP_TOL,
};
pub use processor::{
    induced_program_channel, Branched, Processor, ProcessorRepresentation, ProgramState,
    PROGRAM_NORM_TOL,
};
