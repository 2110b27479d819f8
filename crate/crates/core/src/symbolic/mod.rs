//! The symbolic horseshoe: transition tables, admissible words, subshift
//! entropy, separated sets and survivor clouds.

mod separated;
mod survivor;
mod table;
mod words;

pub use separated::{
    first_separation, max_distance, orbit_prefix, separated_set_estimate, OneDimensional, PlaneMap,
    SeparatedSetEstimate,
};
pub use survivor::{disk_grid, in_h, replay_cloud, survivor_clouds, survivor_set, SurvivorCloud};
pub use table::{
    build_transition_table, transition_table_at, DiskLayout, IslandEntry, TransitionStructure, TransitionTable,
};
pub use words::{count_admissible_words, subshift_entropy, subshift_entropy_estimate, transfer_graph, EntropyEstimate};
