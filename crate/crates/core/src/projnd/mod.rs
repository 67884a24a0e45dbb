//! Projection onto `K_lambda` in `R^d`.
//!
//! Two routes: separated atoms project analytically onto balls of volume
//! `w_i / lambda`; general discrete inputs are projected onto piecewise-constant
//! densities on a grid by one capacitated transportation problem.

mod analytic;
mod capacitated;

pub use analytic::{project_atoms_analytic, symmetric_difference_mass};
pub use capacitated::{
    project_capacitated, projection_distance, CapacitatedInstance, CapacitatedProjection,
};
