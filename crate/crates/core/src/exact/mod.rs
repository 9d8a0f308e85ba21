//! Dense reference computations for small graphs.

pub mod dense;
pub mod eigen;
pub mod identities;
pub mod profile;

pub use dense::{exact_distribution, symmetrized_walk_matrix, walk_matrix, DenseMatrix};
pub use eigen::{symmetric_eigenvalues, SpectralReport};
pub use identities::{cheeger_check, eta_lambda_gap, trace_identity_gap, verify_decomposition, verify_p_matrix};
pub use profile::{expansion_profile, far_decomposition, graph_conductance, spectral_profile_bound, ExpansionProfile};
