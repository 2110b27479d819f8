pub mod contour;
pub mod error;
pub mod function;
pub mod henon_like;
pub mod lacunary;
pub mod periodic;
pub mod symbolic;
