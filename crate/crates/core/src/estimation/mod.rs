//! Receiver side: interference covariance, Cramér-Rao bound and the
//! training-based maximum-likelihood AoA estimator.

mod covariance;
mod crb;
mod ml;
mod training;

pub use covariance::{
    rz_noise_only, rz_perfect_csi, rz_statistical, rz_worst_case_aware, InterferenceCovariance, KnowledgeLevel,
};
pub use crb::{crb, crb_curve, fisher_term, CrbCurve, UNIDENTIFIABLE};
pub use ml::{
    estimate_aoa, ml_spectrum, ml_spectrum_with, AngleGrid, MlObjective, MlSpectrum, REFINE_TOLERANCE,
};
pub use training::TrainingSequence;
