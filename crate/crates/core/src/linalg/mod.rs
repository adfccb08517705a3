//! Dense complex matrix substrate: states, Gram matrices, bipartite operations.

mod eigen;
mod matrix;
mod sampling;
mod states;

pub use eigen::{eigh, hermitian_determinant, HermitianEigen};
pub use matrix::{inner, norm, ComplexMatrix};
pub use sampling::{complex_gaussian, haar_unit_vector, haar_unitary, random_density, random_hermitian};
pub use states::{
    factor_gram, gram_matrix, partial_trace, partial_transpose, DensityMatrix, GramMatrix, State, StateTuple,
    Subsystem, UnitVector,
};
