//! Acceptance checks for `henon-core`. The checks live in
//! `tests/acceptance.rs`; this package sorts after the others so the
//! acceptance binary runs once every other test binary has reported.
