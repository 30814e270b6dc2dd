//! Numerical tolerances shared by the library and its test suites.

/// Hermiticity check used by [`crate::linalg::ComplexMatrix::is_hermitian`].
pub const HERMITIAN: f64 = 1e-12;
/// Input tolerance accepted by the eigensolver.
pub const EIG_INPUT_HERMITIAN: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this fraction of ‖M‖_F.
pub const JACOBI_OFFDIAG: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Group membership, symmetry-subspace membership and pairing checks.
pub const MEMBERSHIP: f64 = 1e-10;
pub const PAIRING: f64 = 1e-8;
/// Relative accuracy targets of the quadrature layer.
pub const QUAD_1D_REL: f64 = 1e-10;
pub const MEANDER_REL: f64 = 1e-8;
/// Gauss-Legendre points per dimension for ordered-region quadrature.
pub const ORDERED_NODES: usize = 64;
/// Truncation radius, in units of √t, for Gaussian-tailed integrands.
pub const TAIL_RADII: f64 = 12.0;
/// Origin warm start for SDEs, as a fraction of the horizon.
pub const WARM_START_FRACTION: f64 = 1e-4;
pub const MAX_HALVINGS: u32 = 20;
pub const MIN_STEP_FRACTION: f64 = 1e-12;
/// Gap-to-width ratio above which the Karlin-McGregor determinant is replaced
/// by its diagonal product (off-diagonal terms are below e^{-200}).
pub const SEPARATED_GAP: f64 = 20.0;
/// Significance level used by acceptance-style checks.
pub const P_MIN: f64 = 0.01;
pub const Z_MAX: f64 = 3.0;
/// An SDE step is halved while the drift moves some particle by more than
/// this fraction of the smallest spacing.
pub const DRIFT_FRACTION: f64 = 0.1;
/// Depth limit for those drift-controlled halvings; leaving the chamber
/// may still halve down to the full limit.
pub const DRIFT_HALVINGS: u32 = 12;
