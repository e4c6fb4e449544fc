//! P1 finite elements for the Dirichlet Laplace-Beltrami eigenproblem.

mod assembly;
pub mod cg;
mod eigen;
pub mod matrix_market;
mod refinement;
mod sparse;

pub use assembly::{assemble, assemble_with, AssemblyOptions};
pub use eigen::{
    dirichlet_problem, dirichlet_reduce, mesh_eigenpair, rayleigh_quotient, smallest_eigenpair,
    DirichletProblem, EigenOptions, EigenResult,
};
pub use refinement::{doubling_ladder, refinement_study, RefinementStudy, Rung};
pub use sparse::SparseSymmetricOperator;
