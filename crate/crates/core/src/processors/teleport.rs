use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quantum::{weyl, Channel, Processor, ProgramState};
use crate::CMatrix;

/// Teleportation with the classical outcome discarded.
///
/// Data `A`, memory `B ⊗ C`. Kraus operators are
/// `SWAP_AC (|Φ_ab⟩⟨Φ_ab|_AB ⊗ Id_C)` over the generalized Bell basis, so the
/// data register receives what `C` held after the Bell measurement.
pub fn build_teleportation_processor(d: usize) -> Result<Processor> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "teleportation needs d >= 2, got {d}"
        )));
    }
    let n = d * d * d;
    crate::linalg::check_dim(n)?;
    let s = 1.0 / (d as f64).sqrt();
    // SWAP_AC on A ⊗ B ⊗ C, index a·d² + b·d + c
    let swap = ComplexMatrix::from_fn(n, n, |r, c| {
        let (a, b, cc) = (c / (d * d), (c / d) % d, c % d);
        if r == cc * d * d + b * d + a {
            1.0.into()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let id_c = CMatrix::identity(d);
    let mut kraus = Vec::with_capacity(d * d);
    for x in 0..d {
        for z in 0..d {
            let w: CMatrix = weyl(d, x, z);
            // |Φ_xz⟩ = (W_xz ⊗ Id)|Ω⟩/√d
            let bell: Vec<Complex64> = (0..d * d).map(|k| w[(k / d, k % d)] * s).collect();
            let proj = ComplexMatrix::outer(&bell, &bell).tensor(&id_c)?;
            kraus.push(&swap * &proj);
        }
    }
    Processor::from_channel(Channel::new(kraus)?, d, d * d)
}

/// The program `(Id ⊗ U)|Ω⟩/√d` on `B ⊗ C`.
pub fn teleportation_program(u: &CMatrix) -> Result<ProgramState> {
    let d = u.require_square()?;
    let s = 1.0 / (d as f64).sqrt();
    let v = (0..d * d).map(|k| u[(k % d, k / d)] * s).collect();
    ProgramState::new(v, "teleport")
}
