//! Estimate measurement: admissible pairs, ratio records, dispersive and
//! Strichartz ratios, kernel quadrature and δ-sweeps.

pub mod admissible;
pub mod estimates;
pub mod kernel;
pub mod records;
pub mod sweep;

pub use admissible::{admissible_check, AdmissibleCheck, AdmissiblePair, PairKind};
pub use estimates::{
    decay_run, decay_slope_fit, dispersive_ratio, dispersive_series, duhamel, fit_power_law,
    homogeneous_ratio, inhomogeneous_ratio, log_time_ladder, random_forcing, trajectory_norms,
    DecayRun, DuhamelWeighting, SlopeFit,
};
pub use kernel::{
    kernel_convolve, kernel_quadrature, ring_kernel, Branch, KernelNodes, DEFAULT_REFINEMENT,
};
pub use records::{write_csv, write_jsonl, RatioRecord, CSV_HEADER};
pub use sweep::{uniformity_sweep, uniformity_sweep_with_jobs, Profile, SweepConfig};
