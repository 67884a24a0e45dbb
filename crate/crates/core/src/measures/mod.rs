//! Measure representations: weighted point clouds, grid densities and unions of
//! balls, plus ball geometry.

mod ball_union;
mod discrete;
pub mod geometry;
mod grid;
mod io;

pub use ball_union::{
    discretize_ball_union, sample_ball_union, sample_ball_union_stratified, sample_in_ball,
    BallDiscretization,
    BallUnionMeasure,
};
pub use discrete::DiscreteMeasure;
pub(crate) use discrete::euclidean;
pub use geometry::{rad_ball, vol_ball};
pub use grid::{GridMeasure, GridSpec};
pub use io::Measure;
