//! Pinned numerical thresholds.
//!
//! Every tolerance used by a contract in this crate is a named constant here;
//! the CLI surfaces the tunable ones as flags but the defaults below are the
//! reference values the test suite asserts against.

/// Absolute weight below which an atom counts as carrying no measure.
/// Float noise floor for sums of O(1) nonnegative terms.
pub const TAU_ZERO: f64 = 1e-14;

/// Relative singular-value cutoff for rank decisions: singular values below
/// `TOL_RANK * sigma_max` count as zero.
pub const TOL_RANK: f64 = 1e-9;

/// Condition-number ceiling for leading blocks of coordinate-tuple density
/// matrices. Beyond this the per-atom solves lose ~8 digits.
pub const KAPPA_MAX: f64 = 1e8;

/// Maximum number of fresh Gaussian draws before coordinate sampling gives up.
pub const MAX_REDRAWS: u32 = 32;

/// Relative tolerance for exact measure identities (total mass, polarization,
/// constant invariance, self-similarity).
pub const REL_MEASURE: f64 = 1e-12;

/// Relative tolerance for per-atom gradient-machinery contracts
/// (Schur residual, remainder density, energy reconstruction).
pub const REL_GRADIENT: f64 = 1e-8;

/// Agreement required between two independent factorization routes.
pub const TOL_CROSSCHECK: f64 = 1e-10;

/// Tunable thresholds threaded through the density/rank/sampling pipeline.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub tau_zero: f64,
    pub tol_rank: f64,
    pub kappa_max: f64,
    pub max_redraws: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau_zero: TAU_ZERO,
            tol_rank: TOL_RANK,
            kappa_max: KAPPA_MAX,
            max_redraws: MAX_REDRAWS,
        }
    }
}
