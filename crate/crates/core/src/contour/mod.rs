//! Argument-principle tools: winding numbers, preimage location, univalent
//! islands and the quasi-normality probe.

mod island;
mod probe;
mod roots;
mod winding;

pub use island::{find_univalent_island, Island};
pub use probe::{chordal_distance, quasinormality_probe, ProbeGrid, ProbeReport, Witness};
pub use roots::locate_preimages;
pub use winding::{
    count_preimages, winding_along, winding_number, winding_number_with, winding_on_contour, Contour, WindingOptions,
    WindingResult,
};
