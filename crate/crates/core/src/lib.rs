//! Exact time-bounded two-part complexity and facticity over a small reference
//! machine, the analytic collapse curves for stochastic strings, and practical
//! two-part estimators for real data.
//!
//! The analytic modules are generic over [`Scalar`]; the aliases below fix the
//! double-precision instantiation used by the command-line tool.

pub mod bitcodec;
pub mod collapse;
pub mod entropy;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod microvm;
pub mod processes;
pub mod report;
pub mod scalar;
pub mod special;
pub mod taxonomy;

pub use bitcodec::{decode_sd, encode_sd, sd_len, BitString, SdFrame};
pub use error::{Error, Result};
pub use estimator::{estimate, ModelId};
pub use exact::{enumerate, CodeEntry, CodeTable, Witness};
pub use microvm::{run, Budget, RunOutcome, RunStatus};
pub use processes::ProcessClass;
pub use report::FacticityReport;
pub use scalar::Scalar;
pub use taxonomy::Taxonomy;

/// Default real type.
pub type Real = f64;
pub type EntropyValue = entropy::EntropyValue<Real>;
pub type Probability = entropy::Probability<Real>;
pub type BlockParams = collapse::BlockParams<Real>;
pub type ModelCandidate = estimator::ModelCandidate<Real>;
pub type StochasticSpec = estimator::StochasticSpec<Real>;
pub type SweepRow = estimator::SweepRow<Real>;
pub type SweepTable = estimator::SweepTable<Real>;
pub type ProcessReport = processes::ProcessReport<Real>;
