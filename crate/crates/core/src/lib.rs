//! Worst-case approximation in Gaussian-kernel Hilbert spaces: the Mercer
//! spectrum of the Gaussian kernel under the Gaussian weight, optimal
//! algorithms for linear and function-value information, and the
//! information complexity and tractability quantities derived from them.

pub mod algorithms;
pub mod complexity;
pub mod error;
pub mod kernel;
mod linalg;
pub mod quadrature;
pub mod shape;
pub mod spectrum;
pub mod verify;

pub use algorithms::{
    eigen_projection, minimal_error_all, power_function, spline_fit, spline_worst_case_error,
    spline_worst_case_error_with, Design, EigenExpansion, EigenProjector, PowerKernel, Projection, SplineModel,
    WorstCaseMethod,
};
pub use complexity::{
    decay_rate_r, error_sequence_all, estimate_rate, info_complexity, info_complexity_streaming, quasipoly_exponent,
    tractability_probe, Classification, ComplexityCell, ComplexityReport, Criterion, DecayRate, ErrorSequence,
    PolyFit, Provenance, RateEstimate,
};
pub use error::{Error, Result};
pub use kernel::{gram_matrix, initial_error, kernel_eval, GaussianKernel, GaussianWeight, GramMatrix};
pub use quadrature::{gauss_hermite, integrate, nystrom_eigs, QuadratureRule, TensorGrid};
pub use shape::ShapeSequence;
pub use spectrum::{
    mercer_check, top_n_tensor_eigenvalues, univariate_eigenfunction, univariate_spectrum, MultiIndex,
    TensorEigen, TensorEigenIter, TensorEigenList, UnivariateSpectrum,
};

/// Library version, echoed in every CLI output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
