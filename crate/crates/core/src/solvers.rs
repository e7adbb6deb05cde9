//! Solution procedures: single-objective anchor solves, the optimal
//! scheme with dual-based rank-one recovery, two fixed-direction
//! suboptimal schemes, the matched-filter baseline, and the scale-change
//! recovery back to physical covariances.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::UncertainChannelSet;
use crate::hermitian::{worst_case_quadratic, C64, CMatrix, CVector, HermitianMatrix, Sense};
use crate::metrics::{
    evaluate_point, BeamformingSolution, MetricsError, RankCertificate, SolveStatus, SystemParams,
    TradeoffPoint,
};
use crate::policy::NumericPolicy;
use crate::sdp::{
    assemble, audit_solution, kkt_a_matrix, solve as sdp_solve, AssembledProblem, BeamMode,
    ConicBackend, DualCertificate, RelaxedSolution, SdpError, SolveInfo, SolverSettings,
    TchebycheffSpec, Variant, WRepr,
};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("rank-one recovery failed: {0}")]
    Recovery(#[from] RecoveryError),
    #[error("scale variable ξ = {0:.3e} is numerically zero; the minimum-SINR constraint cannot hold")]
    DegenerateScale(f64),
    #[error("anchor for objective {objective} is degenerate ({value:.3e})")]
    DegenerateAnchor { objective: usize, value: f64 },
    #[error("all {attempts} fixed-direction subproblems were infeasible")]
    SchemeInfeasible { attempts: usize },
}

#[derive(Debug, Error, Clone)]
pub enum RecoveryError {
    #[error("dual is degenerate: β* = {beta:.3e} is not positive")]
    DualDegenerate { beta: f64 },
    #[error("inconsistent dual: rank(W̄*) = {rank} > 1 but the KKT matrix has no null space")]
    InconsistentDual { rank: usize },
    #[error("re-audit after substitution failed: max violation {max_violation:.3e}")]
    AuditFailed { max_violation: f64 },
}

/// The three scalarized objectives in their fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    HarvestedPower,
    TransmitPower,
    Leakage,
}

impl Objective {
    pub fn index(self) -> usize {
        match self {
            Objective::HarvestedPower => 0,
            Objective::TransmitPower => 1,
            Objective::Leakage => 2,
        }
    }

    pub const ALL: [Objective; 3] = [
        Objective::HarvestedPower,
        Objective::TransmitPower,
        Objective::Leakage,
    ];
}

/// Channels and parameters rescaled so the desired-link matrix has unit
/// trace; receive-side powers scale by `scale`, transmit powers do not.
#[derive(Debug, Clone)]
pub struct ScaledInstance {
    pub channels: UncertainChannelSet,
    pub params: SystemParams,
    pub scale: f64,
}

impl ScaledInstance {
    pub fn into_scaled(self) -> (UncertainChannelSet, SystemParams) {
        (self.channels, self.params)
    }

    /// Convert a receive-side power from scaled to physical units.
    pub fn unscale_power(&self, p: f64) -> f64 {
        p / self.scale
    }
}

/// Rescale an instance so `tr(h hᴴ) = 1`, conditioning the conic solve.
pub fn scale_instance(channels: &UncertainChannelSet, params: &SystemParams) -> ScaledInstance {
    let scale = 1.0 / channels.h.norm_squared();
    let root = scale.sqrt();
    let sv = |v: &CVector| v * C64::new(root, 0.0);
    let channels = UncertainChannelSet {
        h: sv(&channels.h),
        g_true: channels.g_true.iter().map(|v| sv(v)).collect(),
        g_hat: channels.g_hat.iter().map(|v| sv(v)).collect(),
        eps: channels.eps.iter().map(|e| e * root).collect(),
        l_true: channels.l_true.iter().map(|v| sv(v)).collect(),
        l_hat: channels.l_hat.iter().map(|v| sv(v)).collect(),
        upsilon: channels.upsilon.iter().map(|u| u * root).collect(),
    };
    let params = SystemParams {
        sigma_z2: params.sigma_z2 * scale,
        sigma_zk2: params.sigma_zk2.iter().map(|s| s * scale).collect(),
        sigma_pu2: params.sigma_pu2 * scale,
        ..params.clone()
    };
    ScaledInstance {
        channels,
        params,
        scale,
    }
}

/// One problem instance: physical data plus its pre-scaled mirror.
#[derive(Debug, Clone)]
pub struct Instance {
    pub channels: UncertainChannelSet,
    pub params: SystemParams,
    pub scaled: ScaledInstance,
}

impl Instance {
    pub fn new(channels: UncertainChannelSet, params: SystemParams) -> Result<Self, SolverError> {
        params.validate()?;
        let scaled = scale_instance(&channels, &params);
        Ok(Self {
            channels,
            params,
            scaled,
        })
    }
}

/// Shared solver configuration.
pub struct SolveContext<'a> {
    pub backend: &'a dyn ConicBackend,
    pub settings: SolverSettings,
    pub policy: NumericPolicy,
}

impl<'a> SolveContext<'a> {
    pub fn new(backend: &'a dyn ConicBackend) -> Self {
        Self {
            backend,
            settings: SolverSettings::default(),
            policy: NumericPolicy::default(),
        }
    }
}

/// How the rank-one construction went.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryReport {
    /// Numerical rank of the relaxed `W̄*`.
    pub input_rank: usize,
    /// Whether the dual-based construction ran (false for pass-through).
    pub used_dual: bool,
    /// Eigenvalues of the part moved into the noise covariance.
    pub psi: Vec<f64>,
    /// Power of the recovered beam direction.
    pub f: f64,
    /// Recovered unit beam direction.
    #[serde(with = "crate::channel::cvec_serde")]
    pub u: CVector,
    /// Relative objective change through recovery.
    pub objective_delta: f64,
    /// Dimension of the KKT-matrix null space.
    pub nullspace_dim: usize,
    /// Ratio of the smallest retained KKT eigenvalue to the largest;
    /// records how clear the null-space cut was.
    pub spectral_gap: f64,
    /// `‖H Υ‖_F`, which the theory drives to zero.
    pub h_nullspace_residual: f64,
    /// Residual of the stationarity identity `Y* = A* − β*H`.
    pub kkt_residual: f64,
    /// Off-span mass of `W̄* − f u uᴴ` relative to `tr(W̄*)`.
    pub projection_residual: f64,
    /// `σ₂/σ₁` of the recovered information covariance.
    pub rank_one_ratio: f64,
}

/// Replace `(W̄*, V̄*)` by a rank-one-information solution with identical
/// objective value, constructed from the dual certificate.
pub fn recover_rank_one(
    assembled: &AssembledProblem,
    relaxed: &RelaxedSolution,
    dual: &DualCertificate,
    policy: &NumericPolicy,
) -> Result<(RelaxedSolution, RecoveryReport), RecoveryError> {
    let n = relaxed.w_bar.dim();
    let eig_w = relaxed.w_bar.eig();
    let input_rank = eig_w.numerical_rank(policy.rank_threshold);

    if input_rank <= 1 {
        let f = eig_w.eigenvalues[0].max(0.0);
        let u: CVector = eig_w.eigenvectors.column(0).into();
        let ratio = if eig_w.eigenvalues[0] > 0.0 {
            (eig_w.eigenvalues[1].max(0.0)) / eig_w.eigenvalues[0]
        } else {
            0.0
        };
        return Ok((
            relaxed.clone(),
            RecoveryReport {
                input_rank,
                used_dual: false,
                psi: Vec::new(),
                f,
                u,
                objective_delta: 0.0,
                nullspace_dim: 0,
                spectral_gap: 0.0,
                h_nullspace_residual: 0.0,
                kkt_residual: 0.0,
                projection_residual: 0.0,
                rank_one_ratio: ratio,
            },
        ));
    }

    if dual.beta <= policy.beta_degenerate {
        return Err(RecoveryError::DualDegenerate { beta: dual.beta });
    }

    // KKT matrix and its null space
    let a = kkt_a_matrix(assembled, dual);
    let h = HermitianMatrix::outer(&assembled.h).expect("nonempty");
    let kkt_residual = {
        let resid = a.sub(&h.scale(dual.beta)).sub(&dual.y).frobenius();
        resid / (1.0 + a.frobenius().max(dual.y.frobenius()))
    };
    let eig_a = a.eig();
    let lam_max = eig_a.eigenvalues[0].max(0.0);
    let cut = policy.nullspace_threshold * lam_max;
    let null_idx: Vec<usize> = (0..n).filter(|&i| eig_a.eigenvalues[i] < cut).collect();
    if null_idx.is_empty() {
        return Err(RecoveryError::InconsistentDual { rank: input_rank });
    }
    let retained_min = (0..n)
        .filter(|i| !null_idx.contains(i))
        .map(|i| eig_a.eigenvalues[i])
        .fold(f64::INFINITY, f64::min);
    let spectral_gap = if lam_max > 0.0 && retained_min.is_finite() {
        retained_min / lam_max
    } else {
        0.0
    };
    let mut upsilon = CMatrix::zeros(n, null_idx.len());
    for (c, &i) in null_idx.iter().enumerate() {
        upsilon.set_column(c, &eig_a.eigenvectors.column(i));
    }
    let h_nullspace_residual = (h.matrix() * &upsilon).norm();

    // split W̄* across span(Υ) and its orthocomplement
    let p_span = &upsilon * upsilon.adjoint();
    let p_perp = CMatrix::identity(n, n) - &p_span;
    let outside = HermitianMatrix::symmetrize(&p_perp * relaxed.w_bar.matrix() * &p_perp);
    let eig_r = outside.eig();
    let f = eig_r.eigenvalues[0].max(0.0);
    let u: CVector = eig_r.eigenvectors.column(0).into();
    let rank_one_ratio = if f > 0.0 {
        eig_r.eigenvalues[1].max(0.0) / f
    } else {
        0.0
    };
    let w_tilde =
        HermitianMatrix::outer(&(u.clone() * C64::new(f.sqrt(), 0.0))).expect("nonempty");
    // part of the remainder that lives outside span(Υ)
    let remainder = relaxed.w_bar.sub(&w_tilde);
    let off_span = {
        let m = remainder.matrix();
        let projected = &p_span * m * &p_span;
        (m - projected).norm()
    };
    let projection_residual = off_span / relaxed.w_bar.trace().max(f64::MIN_POSITIVE);

    // exact conservation: whatever leaves W̄ enters V̄
    let v_tilde = relaxed.v_bar.add(&remainder);
    let psi: Vec<f64> = {
        let psi_mat =
            HermitianMatrix::symmetrize(upsilon.adjoint() * relaxed.w_bar.matrix() * &upsilon);
        psi_mat.eig().eigenvalues.iter().cloned().collect()
    };

    // write back and re-audit every constraint
    let mut x = relaxed.x.clone();
    match &assembled.layout.w {
        WRepr::Free(hvar) => hvar.store(&w_tilde, &mut x),
        WRepr::Scaled { .. } => unreachable!("recovery only runs on free-beam solves"),
    }
    assembled.layout.v.store(&v_tilde, &mut x);
    let audit = audit_solution(assembled, &x);
    let audit_tol = 10.0 * policy.audit_residual;
    if !audit.passes(audit_tol) {
        return Err(RecoveryError::AuditFailed {
            max_violation: audit.max_violation(),
        });
    }

    let recovered = RelaxedSolution {
        w_bar: w_tilde,
        v_bar: v_tilde,
        x,
        ..relaxed.clone()
    };
    Ok((
        recovered,
        RecoveryReport {
            input_rank,
            used_dual: true,
            psi,
            f,
            u,
            objective_delta: 0.0,
            nullspace_dim: null_idx.len(),
            spectral_gap,
            h_nullspace_residual,
            kkt_residual,
            projection_residual,
            rank_one_ratio,
        },
    ))
}

/// Undo the scale change: `W = W̄/ξ`, `V = V̄/ξ`, `w = w̄/√ξ`.
pub fn charnes_cooper_recover(
    barred: &BeamformingSolution,
    xi: f64,
    policy: &NumericPolicy,
) -> Result<BeamformingSolution, SolverError> {
    if xi <= 1e-12 {
        return Err(SolverError::DegenerateScale(xi));
    }
    let cert = match &barred.rank_certificate {
        RankCertificate::RankOne(w) => {
            RankCertificate::RankOne(w * C64::new(1.0 / xi.sqrt(), 0.0))
        }
        RankCertificate::General => RankCertificate::General,
    };
    Ok(BeamformingSolution::new(
        barred.w_cov.scale(1.0 / xi),
        barred.v_cov.scale(1.0 / xi),
        cert,
        policy,
    )?)
}

/// Objective value of objective `p` re-evaluated from primal variables
/// of a (scaled) relaxed solution, via the worst-case oracle rather than
/// the auxiliary variables.
pub fn objective_value_from_primal(
    relaxed: &RelaxedSolution,
    channels: &UncertainChannelSet,
    params: &SystemParams,
    objective: Objective,
    variant: Variant,
    policy: &NumericPolicy,
) -> Result<f64, SolverError> {
    let total = relaxed.w_bar.add(&relaxed.v_bar);
    match objective {
        Objective::HarvestedPower => {
            let mut acc = 0.0;
            for k in 0..channels.n_idle() {
                let wc = worst_case_quadratic(
                    &total,
                    &channels.g_hat[k],
                    channels.eps[k],
                    Sense::Min,
                    policy,
                )
                .map_err(MetricsError::from)?;
                acc += params.eta[k] * wc.value.max(0.0);
            }
            Ok(-acc)
        }
        Objective::TransmitPower => match variant {
            Variant::Standard => Ok(1.0 / relaxed.xi),
            Variant::DropNormalization => Ok(relaxed.w_bar.trace() + relaxed.v_bar.trace()),
        },
        Objective::Leakage => {
            let mut acc = 0.0;
            for j in 0..channels.n_primary() {
                let wc = worst_case_quadratic(
                    &total,
                    &channels.l_hat[j],
                    channels.upsilon[j],
                    Sense::Max,
                    policy,
                )
                .map_err(MetricsError::from)?;
                acc += wc.value;
            }
            Ok(acc)
        }
    }
}

/// Solve the single-objective anchor problem for objective `p` and
/// return its optimal value in scaled units, re-evaluated from primal
/// variables.
pub fn solve_anchor(
    inst: &Instance,
    objective: Objective,
    variant: Variant,
    ctx: &SolveContext,
) -> Result<(f64, RelaxedSolution), SolverError> {
    let spec = TchebycheffSpec::axis(objective.index(), variant);
    let asm = assemble(
        &inst.scaled.channels,
        &inst.scaled.params,
        &spec,
        &BeamMode::Optimize,
    )?;
    let out = sdp_solve(&asm, ctx.backend, &ctx.settings, &ctx.policy)?;
    let value = objective_value_from_primal(
        &out.relaxed,
        &inst.scaled.channels,
        &inst.scaled.params,
        objective,
        variant,
        &ctx.policy,
    )?;
    Ok((value, out.relaxed))
}

/// Compute the anchor triple for the given variant; objectives not
/// marked as needed keep a placeholder value of one.
pub fn compute_anchors(
    inst: &Instance,
    variant: Variant,
    needed: [bool; 3],
    ctx: &SolveContext,
) -> Result<[f64; 3], SolverError> {
    let mut anchors = [1.0; 3];
    for obj in Objective::ALL {
        let p = obj.index();
        if !needed[p] {
            continue;
        }
        let (value, _) = solve_anchor(inst, obj, variant, ctx)?;
        if !value.is_finite() || value == 0.0 {
            return Err(SolverError::DegenerateAnchor {
                objective: p + 1,
                value,
            });
        }
        anchors[p] = value;
    }
    Ok(anchors)
}

/// Result of one scheme on one instance.
#[derive(Debug, Clone)]
pub struct SchemeResult {
    pub tau: f64,
    pub point: TradeoffPoint,
    pub physical: BeamformingSolution,
    pub recovery: Option<RecoveryReport>,
    pub status: SolveStatus,
    pub solve_time_s: f64,
    pub iterations: u32,
}

/// Optimal-scheme output, retaining what the hybrid suboptimal schemes
/// reuse.
#[derive(Debug, Clone)]
pub struct MopSolve {
    pub result: SchemeResult,
    pub relaxed_pre_recovery: RelaxedSolution,
    pub relaxed: RelaxedSolution,
    pub dual: DualCertificate,
    pub info: SolveInfo,
    /// Numerical rank of `W̄*` before recovery.
    pub input_rank: usize,
}

fn physical_from_relaxed(
    inst: &Instance,
    relaxed: &RelaxedSolution,
    w_vec_scaled: Option<CVector>,
    status: SolveStatus,
    ctx: &SolveContext,
) -> Result<(BeamformingSolution, TradeoffPoint), SolverError> {
    let cert = match w_vec_scaled {
        Some(w) => RankCertificate::RankOne(w),
        None => RankCertificate::General,
    };
    let barred = BeamformingSolution::new(
        relaxed.w_bar.clone(),
        relaxed.v_bar.clone(),
        cert,
        &ctx.policy,
    )?;
    let physical = charnes_cooper_recover(&barred, relaxed.xi, &ctx.policy)?;
    let point = evaluate_point(&physical, &inst.channels, &inst.params, status, &ctx.policy)?;
    Ok((physical, point))
}

/// Optimal scheme: relaxed solve, rank-one recovery from the dual, scale
/// recovery, then metric evaluation at the physical channels.
///
/// A degenerate dual falls back to the fixed-direction re-solve of
/// suboptimal scheme 1 and tags the point accordingly.
pub fn solve_mop(
    inst: &Instance,
    spec: &TchebycheffSpec,
    ctx: &SolveContext,
) -> Result<MopSolve, SolverError> {
    let asm = assemble(
        &inst.scaled.channels,
        &inst.scaled.params,
        spec,
        &BeamMode::Optimize,
    )?;
    let out = sdp_solve(&asm, ctx.backend, &ctx.settings, &ctx.policy)?;
    let dual = out
        .dual
        .clone()
        .expect("free-beam solve always carries duals");
    let pre = out.relaxed.clone();

    match recover_rank_one(&asm, &out.relaxed, &dual, &ctx.policy) {
        Ok((recovered, report)) => {
            let w_vec = &report.u * C64::new(report.f.max(0.0).sqrt(), 0.0);
            let (physical, point) =
                physical_from_relaxed(inst, &recovered, Some(w_vec), SolveStatus::Solved, ctx)?;
            let input_rank = report.input_rank;
            Ok(MopSolve {
                result: SchemeResult {
                    tau: recovered.tau,
                    point,
                    physical,
                    recovery: Some(report),
                    status: SolveStatus::Solved,
                    solve_time_s: out.info.solve_time_s,
                    iterations: out.info.iterations,
                },
                relaxed_pre_recovery: pre,
                relaxed: recovered,
                dual,
                info: out.info,
                input_rank,
            })
        }
        Err(err @ (RecoveryError::DualDegenerate { .. } | RecoveryError::AuditFailed { .. })) => {
            log::warn!("rank-one recovery fell back to a fixed direction: {err}");
            let eig = out.relaxed.w_bar.eig();
            let direction: CVector = eig.eigenvectors.column(0).into();
            let mut sub = solve_fixed_direction(inst, spec, &direction, ctx)?;
            sub.status = SolveStatus::DegenerateFallback;
            sub.point.solve_status = SolveStatus::DegenerateFallback;
            let tau_rel = out.relaxed.tau;
            sub.recovery = Some(RecoveryReport {
                input_rank: eig.numerical_rank(ctx.policy.rank_threshold),
                used_dual: false,
                psi: Vec::new(),
                f: 0.0,
                u: direction.clone(),
                objective_delta: if tau_rel.abs() > 0.0 {
                    (sub.tau - tau_rel) / tau_rel.abs()
                } else {
                    sub.tau - tau_rel
                },
                nullspace_dim: 0,
                spectral_gap: 0.0,
                h_nullspace_residual: 0.0,
                kkt_residual: 0.0,
                projection_residual: 0.0,
                rank_one_ratio: 0.0,
            });
            let input_rank = eig.numerical_rank(ctx.policy.rank_threshold);
            Ok(MopSolve {
                result: sub,
                relaxed_pre_recovery: pre.clone(),
                relaxed: pre,
                dual,
                info: out.info,
                input_rank,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Solve the fixed-direction subproblem (scalar beam power, free noise
/// covariance) for a given beam direction.
pub fn solve_fixed_direction(
    inst: &Instance,
    spec: &TchebycheffSpec,
    direction: &CVector,
    ctx: &SolveContext,
) -> Result<SchemeResult, SolverError> {
    let dir_mat = HermitianMatrix::outer(direction).map_err(MetricsError::from)?;
    let asm = assemble(
        &inst.scaled.channels,
        &inst.scaled.params,
        spec,
        &BeamMode::FixedDirection(dir_mat),
    )?;
    let out = sdp_solve(&asm, ctx.backend, &ctx.settings, &ctx.policy)?;
    let p_b = out
        .relaxed
        .p_b
        .expect("fixed-direction layout carries the beam power");
    let unit = direction * C64::new(1.0 / direction.norm(), 0.0);
    let w_vec = unit * C64::new(p_b.max(0.0).sqrt(), 0.0);
    let (physical, point) =
        physical_from_relaxed(inst, &out.relaxed, Some(w_vec), SolveStatus::Solved, ctx)?;
    Ok(SchemeResult {
        tau: out.relaxed.tau,
        point,
        physical,
        recovery: None,
        status: SolveStatus::Solved,
        solve_time_s: out.info.solve_time_s,
        iterations: out.info.iterations,
    })
}

/// Suboptimal scheme 1: hybrid. Passes the optimal solution through when
/// the relaxed beam was already rank-one; otherwise re-solves with the
/// principal eigenvector of `W̄*` as the beam direction.
pub fn suboptimal_1(
    inst: &Instance,
    spec: &TchebycheffSpec,
    prior: &MopSolve,
    ctx: &SolveContext,
) -> Result<SchemeResult, SolverError> {
    if prior.input_rank <= 1 && prior.result.status == SolveStatus::Solved {
        return Ok(prior.result.clone());
    }
    let eig = prior.relaxed_pre_recovery.w_bar.eig();
    let direction: CVector = eig.eigenvectors.column(0).into();
    solve_fixed_direction(inst, spec, &direction, ctx)
}

/// Suboptimal scheme 2: hybrid with Gaussian randomization. Directions
/// are `U Σ^{1/2} r`, `r ~ CN(0, I)`; the best of `trials` re-solves by
/// objective value wins.
pub fn suboptimal_2(
    inst: &Instance,
    spec: &TchebycheffSpec,
    prior: &MopSolve,
    trials: usize,
    rng: &mut impl Rng,
    ctx: &SolveContext,
) -> Result<SchemeResult, SolverError> {
    if prior.input_rank <= 1 && prior.result.status == SolveStatus::Solved {
        return Ok(prior.result.clone());
    }
    let eig = prior.relaxed_pre_recovery.w_bar.eig();
    let n = eig.eigenvalues.len();
    let mut best: Option<SchemeResult> = None;
    let mut attempts = 0usize;
    for _ in 0..trials.max(1) {
        let r = DVector::from_fn(n, |_, _| {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * s, im * s)
        });
        let mut direction = CVector::zeros(n);
        for i in 0..n {
            let col: CVector = eig.eigenvectors.column(i).into();
            direction += col * (r[i] * C64::new(eig.eigenvalues[i].max(0.0).sqrt(), 0.0));
        }
        if direction.norm() == 0.0 {
            continue;
        }
        attempts += 1;
        match solve_fixed_direction(inst, spec, &direction, ctx) {
            Ok(res) => {
                if best.as_ref().map_or(true, |b| res.tau < b.tau) {
                    best = Some(res);
                }
            }
            Err(SolverError::Sdp(SdpError::Infeasible)) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(SolverError::SchemeInfeasible { attempts })
}

/// Matched-filter baseline: the beam direction is fixed to the desired
/// receiver's channel; only its power and the noise covariance are
/// optimized.
pub fn baseline_mrt(
    inst: &Instance,
    spec: &TchebycheffSpec,
    ctx: &SolveContext,
) -> Result<SchemeResult, SolverError> {
    let h = &inst.scaled.channels.h;
    let direction = h * C64::new(1.0 / h.norm(), 0.0);
    solve_fixed_direction(inst, spec, &direction, ctx)
}
