//! Centralized numeric policy.
//!
//! Every tolerance shared between the solvers and their verification
//! oracles lives here so a test and the code it checks can never
//! disagree about what "zero" means.

/// Tolerances used across matrix algebra, conic solves and recovery.
#[derive(Debug, Clone, Copy)]
pub struct NumericPolicy {
    /// Absolute Hermitian-symmetry tolerance on construction.
    pub hermitian_sym: f64,
    /// Relative eigendecomposition reconstruction residual.
    pub eig_residual: f64,
    /// Convergence tolerance of the secular-equation bisection.
    pub secular: f64,
    /// Relative PSD slack: `min_eig >= -psd_slack * trace` counts as PSD.
    pub psd_slack: f64,
    /// Conic solver relative duality-gap target.
    pub solver_gap: f64,
    /// Conic solver feasibility-residual target.
    pub solver_feas: f64,
    /// Post-solve constraint-residual audit threshold.
    pub audit_residual: f64,
    /// Complementary slackness bound `tr(Y W̄*)`.
    pub compl_slack: f64,
    /// Relative eigenvalue threshold for the numerical rank of `W̄*`.
    pub rank_threshold: f64,
    /// Relative eigenvalue threshold defining the null space of `A*`.
    pub nullspace_threshold: f64,
    /// Frobenius residual (relative to trace) accepted by the projection
    /// step of the rank-one recovery before the fallback kicks in.
    pub recovery_projection: f64,
    /// `β*` below this (on trace-normalized data) is treated as a
    /// degenerate dual.
    pub beta_degenerate: f64,
    /// One-sided KKT identity residual `‖Y* − (A* − β*H)‖_F` (relative).
    pub kkt_identity: f64,
    /// Rank-one certificate: `σ₂/σ₁` of a recovered matrix.
    pub rank_one_ratio: f64,
    /// Relative tolerance for metric identities (ratio invariance etc.).
    pub metric_identity: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            hermitian_sym: 1e-12,
            eig_residual: 1e-9,
            secular: 1e-12,
            psd_slack: 1e-8,
            solver_gap: 1e-8,
            solver_feas: 1e-7,
            audit_residual: 1e-7,
            compl_slack: 1e-6,
            rank_threshold: 1e-6,
            nullspace_threshold: 1e-7,
            recovery_projection: 1e-8,
            beta_degenerate: 1e-9,
            kkt_identity: 1e-5,
            rank_one_ratio: 1e-6,
            metric_identity: 1e-9,
        }
    }
}

impl NumericPolicy {
    pub const fn strict() -> Self {
        Self {
            hermitian_sym: 1e-12,
            eig_residual: 1e-9,
            secular: 1e-12,
            psd_slack: 1e-8,
            solver_gap: 1e-9,
            solver_feas: 1e-9,
            audit_residual: 1e-7,
            compl_slack: 1e-6,
            rank_threshold: 1e-6,
            nullspace_threshold: 1e-7,
            recovery_projection: 1e-8,
            beta_degenerate: 1e-9,
            kkt_identity: 1e-5,
            rank_one_ratio: 1e-6,
            metric_identity: 1e-9,
        }
    }
}
