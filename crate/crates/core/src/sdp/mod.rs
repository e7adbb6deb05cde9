//! Finite convex cone program for the relaxed weighted-Tchebycheff
//! design problem: variable layout, the four S-procedure LMI families,
//! scalar constraints, the conic backend contract, and dual extraction.

pub mod assemble;
pub mod backend;
pub mod expr;
pub mod lmi;

use thiserror::Error;

use crate::hermitian::HermitianMatrix;

pub use assemble::{
    assemble, audit_solution, inverse_scale_soc, kkt_a_matrix, solve, AssembledProblem,
    AuditReport, BeamMode, SolveInfo, SolveOutput, VariableLayout,
};
pub use backend::{
    BackendSolution, BackendStatus, ClarabelBackend, ConicBackend, SolverSettings,
};
pub use expr::{AffineHermitian, HermVar, LinExpr, WRepr};
pub use lmi::{FamilyKind, RobustBlock};

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("invalid scalarization: {0}")]
    InvalidSpec(String),
    #[error("model assembly error: {0}")]
    Assembly(String),
    #[error("problem is primal infeasible")]
    Infeasible,
    #[error("numerical failure in conic solve: {0}")]
    NumericalFailure(String),
    #[error("backend error: {0}")]
    Backend(String),
    #[error("backend '{0}' does not return dual multipliers; rejected because the rank-one recovery consumes the dual certificate")]
    BackendLacksDuals(&'static str),
    #[error(transparent)]
    Metrics(#[from] crate::metrics::MetricsError),
    #[error(transparent)]
    Hermitian(#[from] crate::hermitian::HermitianError),
}

/// Which form of the scalarized problem is assembled.
///
/// `Standard` keeps the trace normalization and the fractional
/// transmit-power objective `1/ξ` (ratio objectives). In
/// `DropNormalization` the scale variable is pinned to one and the
/// normalization row is removed, so the barred variables are the
/// physical covariances and all three objectives are totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    Standard,
    DropNormalization,
}

/// Weights and objective anchors of the scalarization.
#[derive(Debug, Clone)]
pub struct TchebycheffSpec {
    /// Simplex weights (λ₁, λ₂, λ₃) for the harvested-power,
    /// transmit-power, and leakage objectives respectively.
    pub lambda: [f64; 3],
    /// Anchor values F_p* the objectives are normalized against.
    pub anchors: [f64; 3],
    pub variant: Variant,
}

impl TchebycheffSpec {
    pub fn new(lambda: [f64; 3], anchors: [f64; 3], variant: Variant) -> Result<Self, SdpError> {
        let spec = Self {
            lambda,
            anchors,
            variant,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Single-objective anchor solve for objective `p` (0-based), with
    /// placeholder anchors: the choice of positive constant does not
    /// affect the argmin.
    pub fn axis(p: usize, variant: Variant) -> Self {
        let mut lambda = [0.0; 3];
        lambda[p] = 1.0;
        Self {
            lambda,
            anchors: [1.0; 3],
            variant,
        }
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.lambda.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            return Err(SdpError::InvalidSpec("weights must be nonnegative".into()));
        }
        let sum: f64 = self.lambda.iter().sum();
        if sum == 0.0 {
            return Err(SdpError::InvalidSpec("all weights are zero".into()));
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SdpError::InvalidSpec(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        for p in 0..3 {
            if self.lambda[p] > 0.0 {
                let a = self.anchors[p];
                if !a.is_finite() || a == 0.0 {
                    return Err(SdpError::InvalidSpec(format!(
                        "anchor {} must be finite and nonzero for an active objective, got {a}",
                        p + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Role of a cone block inside one assembled problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintTag {
    /// Minimum-SINR constraint of the desired receiver.
    MinSinr,
    /// Transmit power budget.
    PowerBudget,
    /// Trace normalization of the variable change.
    Normalization,
    /// Scale variable pinned to one (totals variant).
    XiFixed,
    /// Tchebycheff row of the harvested-power objective.
    TchebyHp,
    /// Tchebycheff row of the transmit-power objective.
    TchebyTp,
    /// Tchebycheff row of the leakage objective.
    TchebyIp,
    /// Rotated-cone encoding of `t ≥ 1/ξ`.
    InverseScaleSoc,
    /// PSD cone of the information covariance.
    PsdW,
    /// PSD cone of the artificial-noise covariance.
    PsdV,
    /// Nonnegativity of ξ, the S-procedure multipliers and, in
    /// fixed-direction mode, the beam power.
    NonnegScalars,
    /// S-procedure block: eavesdropper SINR at idle receiver k.
    EveIdle(usize),
    /// S-procedure block: eavesdropper SINR at primary receiver j.
    EvePrimary(usize),
    /// S-procedure block: harvested-power floor at idle receiver k.
    Harvest(usize),
    /// S-procedure block: leakage ceiling at primary receiver j.
    Leak(usize),
}

/// One cone constraint over affine expressions of the decision vector.
#[derive(Debug, Clone)]
pub enum ConeBlock {
    /// Every row equals zero.
    Zero(Vec<LinExpr>),
    /// Every row is nonnegative.
    Nonneg(Vec<LinExpr>),
    /// `(e₀, e₁, …)` with `e₀ ≥ ‖(e₁, …)‖`.
    Soc(Vec<LinExpr>),
    /// Complex Hermitian affine block, positive semidefinite.
    Psd(AffineHermitian),
}

/// Structured cone program: variables, objective and tagged blocks.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    pub num_vars: usize,
    pub objective: Vec<(usize, f64)>,
    pub blocks: Vec<(ConstraintTag, ConeBlock)>,
}

impl ConicProblem {
    /// Number of S-procedure LMI blocks (2(K−1) + 2J when assembled).
    pub fn count_robust_blocks(&self) -> usize {
        self.blocks
            .iter()
            .filter(|(tag, _)| {
                matches!(
                    tag,
                    ConstraintTag::EveIdle(_)
                        | ConstraintTag::EvePrimary(_)
                        | ConstraintTag::Harvest(_)
                        | ConstraintTag::Leak(_)
                )
            })
            .count()
    }

    pub fn has_normalization(&self) -> bool {
        self.blocks
            .iter()
            .any(|(tag, _)| *tag == ConstraintTag::Normalization)
    }

    /// Dump in a plain text conic format (sparse triplets per cone).
    pub fn write_text(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        backend::write_problem_text(self, out)
    }
}

/// Primal variables of the relaxed solve, in barred (variable-changed)
/// form, plus the raw decision vector for audits.
#[derive(Debug, Clone)]
pub struct RelaxedSolution {
    pub w_bar: HermitianMatrix,
    pub v_bar: HermitianMatrix,
    pub xi: f64,
    pub tau: f64,
    pub e_su: Vec<f64>,
    pub i_pu: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub phi: Vec<f64>,
    pub omega: Vec<f64>,
    /// Beam power in fixed-direction mode.
    pub p_b: Option<f64>,
    pub x: Vec<f64>,
}

/// Dual multipliers of the relaxed solve, lifted to complex form.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    /// Multiplier of the `W̄ ⪰ 0` cone.
    pub y: HermitianMatrix,
    /// Multiplier of the minimum-SINR row.
    pub beta: f64,
    /// Multiplier of the power budget row.
    pub alpha: f64,
    /// Multiplier of the normalization row (zero in the totals variant).
    pub mu: f64,
    /// Multiplier of the affine transmit-power Tchebycheff row, which
    /// touches `tr(W̄)` only in the totals variant.
    pub rho_tp: f64,
    pub d_eve_idle: Vec<HermitianMatrix>,
    pub d_eve_primary: Vec<HermitianMatrix>,
    pub d_harvest: Vec<HermitianMatrix>,
    pub d_leak: Vec<HermitianMatrix>,
}

impl DualCertificate {
    /// `tr(Y W̄*)`, which complementary slackness drives to zero.
    pub fn complementary_slackness(&self, w_bar: &HermitianMatrix) -> f64 {
        self.y.inner(w_bar).abs()
    }
}
