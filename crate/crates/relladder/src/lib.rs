//! Exact two-terminal reliability of K4-ladder networks.
//!
//! The ladder is a recursive graph whose cell `i` attaches nodes `S_i`, `T_i`
//! to the previous pair, every edge and node carrying its own reliability.
//! The probability that a working directed path connects `S_0` to the last
//! cell is a contraction of per-cell transfer matrices, computed here over a
//! pluggable scalar ring: floats for numbers, dual numbers for sensitivities,
//! exact rationals for verification, polynomials for the reliability
//! polynomial in the edge reliability `p`.
//!
//! On top of the engine sit generating functions, eigenvalue asymptotics,
//! failure frequency/rate, and the complex-zero structure of the reliability
//! polynomials. A brute-force connectivity oracle cross-validates every exact
//! formula.

pub mod ladder;
pub mod oracle;
pub mod scalar;
pub mod spectral;
pub mod transfer;
pub mod verify;
pub mod zeros;

pub use ladder::{
    expand_graph, CellParams, CellValues, ComponentGraph, ComponentId, ConfigError, Destination,
    EdgeKind, LadderConfig, NodeKind, NodeRef, Preset,
};
pub use oracle::{oracle_enumerate, oracle_enumerate_f64, oracle_factoring, reachable, OracleError};
pub use scalar::{minimal_recurrence, FromRational, Ring, SqrtRing};
pub use spectral::{
    asymptotic_rate, closed_form_directed, closed_form_undirected_perfect, failure_frequency,
    gf_extract, numeric_spectrum, ComponentRates, FrequencyResult, RateSpec, RationalGf,
    SpectralError, SpectralForm,
};
pub use transfer::{build_matrix_3, build_matrix_5, build_xs, rel2, rel2_exact, rel2_generic,
    rel2_gradient, rel2_gradient_f64, TransferError};
pub use zeros::{
    asymptotic_loci, critical_rho, find_roots, ladder_zeros, limit_curve, poly_in_p,
    segment_endpoints_directed, CriticalCase, LadderZeros, LimitCurveSample, RootSet, ZerosError,
};

/// Exact rational scalar (arbitrary precision).
pub type Rat = scalar::Rat;
/// Double-precision dual number for forward-mode differentiation.
pub type Dual64 = scalar::Dual<f64>;
/// Polynomial in one indeterminate with exact rational coefficients.
pub type RatPoly = scalar::UniPoly<Rat>;
/// Double-precision complex scalar.
pub type Cplx64 = num_complex::Complex64;
/// Multiprecision complex scalar used by the root finder.
pub type CplxMp = scalar::mp::MpComplex;

/// Default mantissa bits for multiprecision root finding; override per call
/// or through the CLI `--precision` flag / `RELLADDER_PRECISION`.
pub const DEFAULT_PRECISION_BITS: usize = 256;
