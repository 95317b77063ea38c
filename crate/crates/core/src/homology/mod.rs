//! Betti numbers of real zero sets from sign-free grid samples.
//!
//! Net points where `‖f(x)‖` is small relative to the local condition are kept, and the Čech
//! nerve of balls around them is reduced over GF(2). Small complexes are built explicitly;
//! large ones go through an implicit coboundary reduction.

mod cohomology;
mod complex;
mod miniball;
mod neighbors;
mod pipeline;

pub use cohomology::{cech_betti, CechBetti, MAX_STORED_SIMPLICES};
pub use complex::{betti_numbers, cech_nerve, BettiVector, BitMatrix, SimplicialComplex, MAX_NERVE_POINTS, MAX_NERVE_SIMPLICES};
pub use miniball::{miniball, Ball};
pub use neighbors::NeighborGraph;
pub use pipeline::{
    full_level, hausdorff_estimate, polybetti, refine_on_sphere, select_points, BettiMode, PolyBettiReport, RadiusWindow,
    Refined, SelectedCloud, FULL_GRID_LIMIT, PIPELINE_ACCURACY,
};
