//! Numerical gates shared across the crate.

/// Max-norm gate on `M - M^dagger` when accepting a Hermitian operator.
pub const HERMITIAN: f64 = 1e-9;
/// Floor below which a density-operator eigenvalue is rejected rather than clipped.
pub const NEGATIVE_EIGENVALUE: f64 = 1e-9;
/// Allowed deviation of a state's trace from one.
pub const TRACE: f64 = 1e-9;
/// Default relative tolerance for merging degenerate eigenvalues.
pub const DEGENERACY: f64 = 1e-8;
/// Completeness gate `max |sum M^dagger M - I|`.
pub const COMPLETENESS: f64 = 1e-9;
/// Smallest eigenvalue tolerated in a POM element.
pub const EFFECT_POSITIVITY: f64 = 1e-10;
/// Unitarity and readout orthonormality gate for indirect models.
pub const UNITARY: f64 = 1e-9;
/// Detector eigenbranches with weight at or below this are dropped.
pub const DETECTOR_WEIGHT: f64 = 1e-12;
/// Residual gate for contextual-value solutions.
pub const EXPRESSIBLE: f64 = 1e-8;
/// Operator gate for the unbiasedness predicate.
pub const UNBIASED: f64 = 1e-8;
/// Commutator gate for the QND predicate.
pub const QND: f64 = 1e-9;
/// Second moments in `[-SECOND_MOMENT, 0)` are clipped to zero.
pub const SECOND_MOMENT: f64 = 1e-9;
/// Probabilities at or below this cannot be conditioned on.
pub const NULL_PROBABILITY: f64 = 1e-12;
/// Inequality satisfaction margin.
pub const SATISFACTION: f64 = 1e-9;
/// Agreement required between independent routes to the same quantity in a report.
pub const CROSS_CHECK: f64 = 1e-9;
