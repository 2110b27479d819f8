//! Saddle cycles: graph transform along itineraries, Newton refinement,
//! cone-field certificates, and itinerary counts.

mod cone;
mod counting;
mod graph;
mod model;
mod orbit;

pub use cone::{cone_certificate, ConeCertificate, ConeSample, APERTURE};
pub use counting::{count_itineraries, enumerate_cyclic_itineraries};
pub use graph::{graph_transform_step, GraphDisk, DEFAULT_NODES};
pub use model::LocalAffine;
pub use orbit::{
    check_itinerary, newton_refine_periodic, newton_sweep, periodic_itinerary_orbit, same_cycle, seed_grid,
    ItineraryOptions, Multipliers, NewtonOptions, PeriodicOrbit, SweepReport, DEDUP_TOL, DEFAULT_RESIDUAL_TOL,
    MINIMALITY_GAP,
};
