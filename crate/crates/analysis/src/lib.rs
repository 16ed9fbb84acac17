//! Asymptotic analysis of counting series: ratio methods, rational
//! extrapolation, windowed fits, renormalization and differential approximants.

pub mod diffapprox;
pub mod error;
pub mod extrapolate;
pub mod fit;
pub mod linalg;
pub mod ratio;
pub mod series;

pub use diffapprox::{
    balanced_degrees, exponent_at, fit_da, fit_da_reducing, physical_root, polynomial_roots, scan,
    singularities, Approximant, Canary, DAModel, DegreePolicy, ScanCell, ScanReport, Singularity,
    Summary,
};
pub use error::AnalysisError;
pub use extrapolate::{bs_tableau, rational_tableau, BsTableau};
pub use fit::{fit_log_quad, fit_log_triple_mu, fit_ratio_triple, FitResult, FitWindow};
pub use ratio::{
    amplitude_sequence, loglog_gradient, pair_extrapolate, renormalize, sigma_free,
    sigma_local_given_mu, Renormalized,
};
pub use series::{parse_series, CoefficientSeries, RealSeries};
