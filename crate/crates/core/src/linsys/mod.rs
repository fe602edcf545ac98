//! Static condensation, sparse skeleton solve and the dense reference path.

pub mod condense;
pub mod full;
pub mod gauge;
pub mod sparse;

pub use condense::{condense, CondensedSystem, KnownValues, Solution};
pub use full::solve_full;
pub use gauge::{pressure_integral, pressure_moments, Gauge};
pub use sparse::{relative_residual, CsrMatrix, SparseSolver};

use crate::error::Result;
use crate::hdg::{Assembler, Loads};

/// Assembles, condenses and solves one linear problem.
pub fn solve_condensed(
    asm: &Assembler,
    loads: &Loads,
    known: &KnownValues,
    gauge: Gauge,
    solver: &mut SparseSolver,
) -> Result<Solution> {
    let systems = asm.all_systems(loads)?;
    let moments = if gauge == Gauge::MeanZero {
        pressure_moments(asm.space, asm.mesh)
    } else {
        Vec::new()
    };
    condense(&systems, asm.mesh, asm.layout, known, gauge, &moments)?.solve(solver)
}
