//! Exact lattice point counts near dilated convex surfaces and near level
//! sets of quasi-homogeneous phase functions, with the numerical checks that
//! go with them: Monge-Ampere certification, discrete energies and
//! log-log exponent fits.

pub mod analysis;
pub mod counting;
pub mod curvature;
pub mod energy;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod phase;
pub mod sum;

mod par;

pub use analysis::{bound_ratio_scan, fit_exponent, BoundRatios, PowerFit, ScanReport, ScanRow};
pub use counting::{
    ball_count, discrepancy, discrepancy_from_count, pair_count_brute, pair_count_diff_weight, sharpness_count, shell_count_brute,
    shell_count_fiber, theorem_bound, CountResult, Method, PairQuery, ShellQuery,
};
pub use curvature::{certify_level_set, monge_ampere_det, FdOrder, FdScheme, LevelSetReport, LevelSetScan};
pub use energy::{discrete_energy, dyadic_inner_sum, energy_scan, EnergyParams};
pub use error::{Error, Result};
pub use geometry::{BodyDescriptor, ConvexBody, Convention, IntVec};
pub use phase::{check_quasi_homogeneity, AnisotropicDilation, PhaseDescriptor, PhaseFunction};
