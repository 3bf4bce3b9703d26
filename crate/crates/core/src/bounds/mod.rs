//! Performance limits: Fisher information and CRBs, mutual coherence with the
//! probabilistic recovery guarantees, and a single-target ML estimator.

mod coherence;
mod fim;
mod ml;

pub use coherence::{
    canonical_coherence, coherence_prob_bound, exact_recovery_sparsity, mutual_coherence, qcbp_error_bound,
    CoherenceReport,
};
pub use fim::{crb_uncorrelated, fim, steering_derivatives, FimReport};
pub use ml::{ml_estimate, MlEstimate};
