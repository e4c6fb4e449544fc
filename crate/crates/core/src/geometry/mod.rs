//! Space forms, immersed surfaces, meshes with element-wise metrics, and
//! discrete fields on them.

mod fields;
mod immersion;
mod mesh;
pub mod mesh_io;
mod patch;
mod space_form;

pub use fields::{
    analytic_distance_gradient, constant_field, position_field, pullback_distance_field,
    pullback_gradient, radial_unit_field, tangential_gradient, traced_hessian_laplacian,
    weak_divergence, PullbackGradient, ScalarField, VectorField,
};
pub use immersion::{
    mean_curvature_norm, ChartRect, Cylinder, Equidistant, Frame, Jet, ParametricImmersion, Plane,
    RoundSphere,
};
pub use mesh::{
    geodesic_ball_mesh, interval_mesh, square_mesh, ElementGeometry, Elements, Metric2,
    RiemannianMesh,
};
pub use patch::immersed_patch_mesh;
pub use space_form::{space_form_distance, SpaceForm};

pub(crate) use mesh::grid_triangulation;
