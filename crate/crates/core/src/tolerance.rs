//! Default numerical tolerances.

/// Hermiticity defect accepted for input matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Deviation of norms and traces from 1.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const DENSITY_EIGEN_FLOOR: f64 = 1e-10;
/// Smallest eigenvalue accepted for a Gram matrix.
pub const PSD_FLOOR: f64 = 1e-9;
/// Agreement of two invariant values.
pub const EQUALITY_TOL: f64 = 1e-8;
/// Frame-graph edge presence: `|<psi_i|psi_j>| > EDGE_TOL`.
pub const EDGE_TOL: f64 = 1e-8;
/// Open-boundary margin for the two-qubit entanglement inequality.
pub const BOUNDARY_TOL: f64 = 1e-10;
