//! Numerical checks of the bilinear, Strichartz and transference estimates.

pub mod bilinear;
pub mod lemma;
pub mod report;
pub mod strichartz;
pub mod transference;
pub mod vnorm;

pub use bilinear::{band_datum, bernstein_scan, bilinear_scan, bilinear_scan_leq, space_time_norm, BandProfile, OutputWeight, SecondFactor, SpaceTimeNorm, WindowOptions};
pub use lemma::{brute_force_i, closed_form_i, closed_form_profiles, closed_form_i_signed, closed_form_i_simple_limit, Bump, BumpPair, BruteForce, LemmaSample};
pub use report::{DyadicRecord, DyadicReport, ReportMeta};
pub use vnorm::{v2_norm_exact, v2_norm_lower, StepAtom, V2Lower};
pub use transference::{random_atom, random_band_piece, sum_bilinear_check, transference_scan, SumBilinearReport};
pub use strichartz::{is_admissible, strichartz_ratio, strichartz_report, strichartz_theta, StrichartzOptions, StrichartzReport};
