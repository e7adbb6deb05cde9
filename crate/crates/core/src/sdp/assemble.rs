//! Problem assembly, the conic solve wrapper, post-solve residual
//! audits, and the dual-side KKT matrix used by the rank-one recovery.

use crate::channel::UncertainChannelSet;
use crate::hermitian::{CMatrix, HermitianMatrix};
use crate::metrics::SystemParams;
use crate::policy::NumericPolicy;

use super::backend::{BackendStatus, ConicBackend, SolverSettings};
use super::expr::{lin_trace, trace_expr, AffineHermitian, HermVar, LinExpr, WRepr};
use super::lmi::{
    lmi_eve_idle, lmi_eve_primary, lmi_harvest_floor, lmi_leak_ceiling, FamilyKind, RobustBlock,
};
use super::{
    ConeBlock, ConicProblem, ConstraintTag, DualCertificate, RelaxedSolution, SdpError,
    TchebycheffSpec, Variant,
};

/// Whether the information covariance is optimized freely or confined to
/// a fixed beam direction with a scalar power.
#[derive(Debug, Clone)]
pub enum BeamMode {
    Optimize,
    /// Rank-one direction, normalized to unit trace at assembly.
    FixedDirection(HermitianMatrix),
}

/// Index map of the decision vector.
#[derive(Debug, Clone)]
pub struct VariableLayout {
    pub n: usize,
    pub k1: usize,
    pub j: usize,
    pub w: WRepr,
    pub v: HermVar,
    pub xi: usize,
    pub tau: usize,
    pub e_su: Vec<usize>,
    pub i_pu: Vec<usize>,
    pub delta: Vec<usize>,
    pub gamma: Vec<usize>,
    pub phi: Vec<usize>,
    pub omega: Vec<usize>,
    /// Epigraph variable of `1/ξ` (standard variant with active
    /// transmit-power weight).
    pub t_inv_xi: Option<usize>,
    pub p_b: Option<usize>,
    pub num_vars: usize,
}

/// Assembled problem plus the metadata needed for audits and recovery.
#[derive(Debug, Clone)]
pub struct AssembledProblem {
    pub problem: ConicProblem,
    pub layout: VariableLayout,
    pub robust: Vec<RobustBlock>,
    pub spec: TchebycheffSpec,
    /// Desired-receiver channel the problem was assembled against.
    pub h: crate::hermitian::CVector,
}

/// Second-order-cone encoding of `t ≥ 1/ξ` (with `ξ ≥ 0` held
/// elsewhere): `(t+ξ, t−ξ, 2)` lies in the SOC iff `t ξ ≥ 1`.
pub fn inverse_scale_soc(t_var: usize, xi_var: usize) -> ConeBlock {
    let mut e0 = LinExpr::var(t_var);
    e0.add_term(xi_var, 1.0);
    let mut e1 = LinExpr::var(t_var);
    e1.add_term(xi_var, -1.0);
    let e2 = LinExpr::constant(2.0);
    ConeBlock::Soc(vec![e0, e1, e2])
}

/// Build the full relaxed cone program for one `(channels, params,
/// scalarization)` triple.
pub fn assemble(
    channels: &UncertainChannelSet,
    params: &SystemParams,
    spec: &TchebycheffSpec,
    mode: &BeamMode,
) -> Result<AssembledProblem, SdpError> {
    spec.validate()?;
    params.validate()?;
    let n = channels.n_antennas();
    let k1 = channels.n_idle();
    let j = channels.n_primary();
    if params.n_idle() != k1 || params.n_primary() != j {
        return Err(SdpError::Assembly(format!(
            "params are sized for K-1={}, J={} but channels carry K-1={k1}, J={j}",
            params.n_idle(),
            params.n_primary()
        )));
    }
    if spec.lambda[0] > 0.0 && k1 == 0 {
        return Err(SdpError::Assembly(
            "harvested-power objective is active but there are no idle receivers".into(),
        ));
    }
    if spec.lambda[2] > 0.0 && j == 0 {
        return Err(SdpError::Assembly(
            "leakage objective is active but there are no primary receivers".into(),
        ));
    }

    // ---- variable layout ----
    let mut next = 0usize;
    let w = match mode {
        BeamMode::Optimize => {
            let h = HermVar { start: next, n };
            next += h.num_scalars();
            WRepr::Free(h)
        }
        BeamMode::FixedDirection(dir) => {
            if dir.dim() != n {
                return Err(SdpError::Assembly("beam direction has wrong dimension".into()));
            }
            let tr = dir.trace();
            if tr <= 0.0 {
                return Err(SdpError::Assembly("beam direction must have positive trace".into()));
            }
            let p_var = next;
            next += 1;
            WRepr::Scaled {
                dir: dir.scale(1.0 / tr),
                power_var: p_var,
            }
        }
    };
    let v = HermVar { start: next, n };
    next += v.num_scalars();
    let xi = next;
    next += 1;
    let tau = next;
    next += 1;
    let mut alloc = |count: usize, next: &mut usize| -> Vec<usize> {
        let out: Vec<usize> = (*next..*next + count).collect();
        *next += count;
        out
    };
    let e_su = alloc(k1, &mut next);
    let i_pu = alloc(j, &mut next);
    let delta = alloc(k1, &mut next);
    let gamma = alloc(j, &mut next);
    let phi = alloc(k1, &mut next);
    let omega = alloc(j, &mut next);
    let t_inv_xi = if spec.variant == Variant::Standard && spec.lambda[1] > 0.0 {
        let t = next;
        next += 1;
        Some(t)
    } else {
        None
    };
    let p_b = match &w {
        WRepr::Scaled { power_var, .. } => Some(*power_var),
        WRepr::Free(_) => None,
    };
    let layout = VariableLayout {
        n,
        k1,
        j,
        w: w.clone(),
        v,
        xi,
        tau,
        e_su: e_su.clone(),
        i_pu: i_pu.clone(),
        delta: delta.clone(),
        gamma: gamma.clone(),
        phi: phi.clone(),
        omega: omega.clone(),
        t_inv_xi,
        p_b,
        num_vars: next,
    };

    // ---- constraints ----
    let h_mat = HermitianMatrix::outer(&channels.h)?;
    let v_repr = WRepr::Free(v);
    let mut blocks: Vec<(ConstraintTag, ConeBlock)> = Vec::new();

    // minimum SINR of the desired receiver:
    // tr(H W̄) − Γ_req tr(H V̄) − Γ_req σ_z² ξ ≥ 0
    let mut c1 = lin_trace(&h_mat, &w);
    c1.add_scaled(&lin_trace(&h_mat, &v_repr), -params.gamma_req);
    c1.add_term(xi, -params.gamma_req * params.sigma_z2);
    blocks.push((ConstraintTag::MinSinr, ConeBlock::Nonneg(vec![c1])));

    // power budget: P_max ξ − tr(W̄) − tr(V̄) ≥ 0
    let mut c4 = LinExpr::term(xi, params.p_max);
    c4.add_scaled(&trace_expr(&w), -1.0);
    c4.add_scaled(&trace_expr(&v_repr), -1.0);
    blocks.push((ConstraintTag::PowerBudget, ConeBlock::Nonneg(vec![c4])));

    // PSD cones of the matrix variables
    if let WRepr::Free(wh) = &w {
        let mut aff = AffineHermitian::zero(n);
        for jj in 0..n {
            for ii in 0..=jj {
                *aff.entry_mut(ii, jj) = wh.entry(ii, jj);
            }
        }
        blocks.push((ConstraintTag::PsdW, ConeBlock::Psd(aff)));
    }
    {
        let mut aff = AffineHermitian::zero(n);
        for jj in 0..n {
            for ii in 0..=jj {
                *aff.entry_mut(ii, jj) = v.entry(ii, jj);
            }
        }
        blocks.push((ConstraintTag::PsdV, ConeBlock::Psd(aff)));
    }

    // scale handling
    match spec.variant {
        Variant::Standard => {
            let mut c7 = trace_expr(&w);
            c7.add(&trace_expr(&v_repr));
            c7.add_const(-1.0);
            blocks.push((ConstraintTag::Normalization, ConeBlock::Zero(vec![c7])));
        }
        Variant::DropNormalization => {
            let mut fix = LinExpr::var(xi);
            fix.add_const(-1.0);
            blocks.push((ConstraintTag::XiFixed, ConeBlock::Zero(vec![fix])));
        }
    }

    // Tchebycheff rows for the active objectives
    let [l1, l2, l3] = spec.lambda;
    if l1 > 0.0 {
        // τ|F₁*| − λ₁(Σ E_k − F₁*) ≥ 0
        let mut row = LinExpr::term(tau, spec.anchors[0].abs());
        for &e in &e_su {
            row.add_term(e, -l1);
        }
        row.add_const(l1 * spec.anchors[0]);
        blocks.push((ConstraintTag::TchebyHp, ConeBlock::Nonneg(vec![row])));
    }
    if l2 > 0.0 {
        match spec.variant {
            Variant::Standard => {
                let t = t_inv_xi.expect("allocated above");
                let mut row = LinExpr::term(tau, spec.anchors[1].abs());
                row.add_term(t, -l2);
                row.add_const(l2 * spec.anchors[1]);
                blocks.push((ConstraintTag::TchebyTp, ConeBlock::Nonneg(vec![row])));
                blocks.push((ConstraintTag::InverseScaleSoc, inverse_scale_soc(t, xi)));
            }
            Variant::DropNormalization => {
                // the scale is pinned, so the transmit power is the
                // plain trace sum
                let mut row = LinExpr::term(tau, spec.anchors[1].abs());
                row.add_scaled(&trace_expr(&w), -l2);
                row.add_scaled(&trace_expr(&v_repr), -l2);
                row.add_const(l2 * spec.anchors[1]);
                blocks.push((ConstraintTag::TchebyTp, ConeBlock::Nonneg(vec![row])));
            }
        }
    }
    if l3 > 0.0 {
        let mut row = LinExpr::term(tau, spec.anchors[2].abs());
        for &i in &i_pu {
            row.add_term(i, -l3);
        }
        row.add_const(l3 * spec.anchors[2]);
        blocks.push((ConstraintTag::TchebyIp, ConeBlock::Nonneg(vec![row])));
    }

    // nonnegative scalars: ξ, multipliers, beam power
    {
        let mut rows: Vec<LinExpr> = vec![LinExpr::var(xi)];
        for &i in delta.iter().chain(&gamma).chain(&phi).chain(&omega) {
            rows.push(LinExpr::var(i));
        }
        if let Some(p) = p_b {
            rows.push(LinExpr::var(p));
        }
        blocks.push((ConstraintTag::NonnegScalars, ConeBlock::Nonneg(rows)));
    }

    // robust LMI families
    let mut robust = Vec::with_capacity(2 * k1 + 2 * j);
    for k in 0..k1 {
        let b = lmi_eve_idle(
            k,
            &channels.g_hat[k],
            channels.eps[k],
            params.gamma_tol[k],
            params.sigma_zk2[k],
            xi,
            delta[k],
            &w,
            &v,
        );
        blocks.push((ConstraintTag::EveIdle(k), ConeBlock::Psd(b.block.clone())));
        robust.push(b);
    }
    for jj in 0..j {
        let b = lmi_eve_primary(
            jj,
            &channels.l_hat[jj],
            channels.upsilon[jj],
            params.gamma_pu_tol[jj],
            params.sigma_pu2,
            xi,
            gamma[jj],
            &w,
            &v,
        );
        blocks.push((ConstraintTag::EvePrimary(jj), ConeBlock::Psd(b.block.clone())));
        robust.push(b);
    }
    for k in 0..k1 {
        let b = lmi_harvest_floor(
            k,
            &channels.g_hat[k],
            channels.eps[k],
            params.eta[k],
            e_su[k],
            phi[k],
            &w,
            &v,
        );
        blocks.push((ConstraintTag::Harvest(k), ConeBlock::Psd(b.block.clone())));
        robust.push(b);
    }
    for jj in 0..j {
        let b = lmi_leak_ceiling(
            jj,
            &channels.l_hat[jj],
            channels.upsilon[jj],
            i_pu[jj],
            omega[jj],
            &w,
            &v,
        );
        blocks.push((ConstraintTag::Leak(jj), ConeBlock::Psd(b.block.clone())));
        robust.push(b);
    }

    let problem = ConicProblem {
        num_vars: layout.num_vars,
        objective: vec![(tau, 1.0)],
        blocks,
    };
    Ok(AssembledProblem {
        problem,
        layout,
        robust,
        spec: spec.clone(),
        h: channels.h.clone(),
    })
}

/// Per-cone residuals of a candidate decision vector.
#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub max_eq_violation: f64,
    pub max_ineq_violation: f64,
    pub max_soc_violation: f64,
    /// Most negative LMI eigenvalue, relative to the block scale.
    pub max_psd_violation: f64,
}

impl AuditReport {
    pub fn max_violation(&self) -> f64 {
        self.max_eq_violation
            .max(self.max_ineq_violation)
            .max(self.max_soc_violation)
            .max(self.max_psd_violation)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Evaluate every constraint of the assembled problem at `x`.
pub fn audit_solution(assembled: &AssembledProblem, x: &[f64]) -> AuditReport {
    let mut report = AuditReport::default();
    for (_, block) in &assembled.problem.blocks {
        match block {
            ConeBlock::Zero(rows) => {
                for e in rows {
                    report.max_eq_violation = report.max_eq_violation.max(e.eval(x).abs());
                }
            }
            ConeBlock::Nonneg(rows) => {
                for e in rows {
                    report.max_ineq_violation = report.max_ineq_violation.max(-e.eval(x));
                }
            }
            ConeBlock::Soc(rows) => {
                let vals: Vec<f64> = rows.iter().map(|e| e.eval(x)).collect();
                let tail: f64 = vals[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                report.max_soc_violation = report.max_soc_violation.max(tail - vals[0]);
            }
            ConeBlock::Psd(aff) => {
                let m = aff.eval(x);
                let scale = 1.0 + m.frobenius();
                report.max_psd_violation =
                    report.max_psd_violation.max(-m.min_eigenvalue() / scale);
            }
        }
    }
    report
}

/// Solve metadata.
#[derive(Debug, Clone)]
pub struct SolveInfo {
    pub status: BackendStatus,
    pub iterations: u32,
    pub solve_time_s: f64,
    pub obj_val: f64,
    pub audit: AuditReport,
}

/// Full output of one relaxed solve.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub relaxed: RelaxedSolution,
    pub dual: Option<DualCertificate>,
    pub info: SolveInfo,
}

/// Run the backend and extract primal variables plus, in free-beam mode,
/// the lifted dual certificate.
pub fn solve(
    assembled: &AssembledProblem,
    backend: &dyn ConicBackend,
    settings: &SolverSettings,
    _policy: &NumericPolicy,
) -> Result<SolveOutput, SdpError> {
    let need_duals = matches!(assembled.layout.w, WRepr::Free(_));
    if need_duals && !backend.provides_duals() {
        return Err(SdpError::BackendLacksDuals(backend.name()));
    }
    let sol = backend.solve(&assembled.problem, settings)?;
    match sol.status {
        BackendStatus::Solved | BackendStatus::AlmostSolved => {}
        BackendStatus::PrimalInfeasible => return Err(SdpError::Infeasible),
        BackendStatus::DualInfeasible => {
            return Err(SdpError::NumericalFailure(
                "dual infeasible (primal unbounded)".into(),
            ))
        }
        BackendStatus::NumericalTrouble => {
            return Err(SdpError::NumericalFailure(
                "backend reported numerical trouble".into(),
            ))
        }
    }

    let layout = &assembled.layout;
    let x = &sol.x;
    let relaxed = RelaxedSolution {
        w_bar: layout.w.extract(x),
        v_bar: WRepr::Free(layout.v).extract(x),
        xi: x[layout.xi],
        tau: x[layout.tau],
        e_su: layout.e_su.iter().map(|&i| x[i]).collect(),
        i_pu: layout.i_pu.iter().map(|&i| x[i]).collect(),
        delta: layout.delta.iter().map(|&i| x[i]).collect(),
        gamma: layout.gamma.iter().map(|&i| x[i]).collect(),
        phi: layout.phi.iter().map(|&i| x[i]).collect(),
        omega: layout.omega.iter().map(|&i| x[i]).collect(),
        p_b: layout.p_b.map(|i| x[i]),
        x: x.clone(),
    };

    let dual = if need_duals {
        Some(extract_dual(assembled, &sol)?)
    } else {
        None
    };

    let audit = audit_solution(assembled, x);
    Ok(SolveOutput {
        relaxed,
        dual,
        info: SolveInfo {
            status: sol.status,
            iterations: sol.iterations,
            solve_time_s: sol.solve_time_s,
            obj_val: sol.obj_val,
            audit,
        },
    })
}

/// Lift the per-cone duals into the named multipliers.
///
/// Uniform lowering gives the Lagrangian `qᵀx − Σ z·expr`, so the
/// multiplier of a `expr ≥ 0` row is the cone dual itself, while the
/// free multiplier of the normalization equality flips sign relative to
/// the convention where the row reads `tr(W̄)+tr(V̄) = 1`.
fn extract_dual(
    assembled: &AssembledProblem,
    sol: &super::backend::BackendSolution,
) -> Result<DualCertificate, SdpError> {
    let n = assembled.layout.n;
    let mut y = None;
    let mut beta = 0.0;
    let mut alpha = 0.0;
    let mut mu = 0.0;
    let mut rho_tp = 0.0;
    let mut d_eve_idle = vec![HermitianMatrix::zeros(n + 1); assembled.layout.k1];
    let mut d_eve_primary = vec![HermitianMatrix::zeros(n + 1); assembled.layout.j];
    let mut d_harvest = vec![HermitianMatrix::zeros(n + 1); assembled.layout.k1];
    let mut d_leak = vec![HermitianMatrix::zeros(n + 1); assembled.layout.j];

    for ((tag, block), dual) in assembled.problem.blocks.iter().zip(&sol.block_duals) {
        match (tag, block) {
            (ConstraintTag::MinSinr, _) => beta = dual[0],
            (ConstraintTag::PowerBudget, _) => alpha = dual[0],
            (ConstraintTag::Normalization, _) => mu = -dual[0],
            (ConstraintTag::TchebyTp, _) => {
                if assembled.spec.variant == Variant::DropNormalization {
                    rho_tp = dual[0];
                }
            }
            (ConstraintTag::PsdW, ConeBlock::Psd(aff)) => {
                y = Some(super::backend::lift_embedded_dual(dual, aff.dim));
            }
            (ConstraintTag::EveIdle(k), ConeBlock::Psd(aff)) => {
                d_eve_idle[*k] = super::backend::lift_embedded_dual(dual, aff.dim);
            }
            (ConstraintTag::EvePrimary(j), ConeBlock::Psd(aff)) => {
                d_eve_primary[*j] = super::backend::lift_embedded_dual(dual, aff.dim);
            }
            (ConstraintTag::Harvest(k), ConeBlock::Psd(aff)) => {
                d_harvest[*k] = super::backend::lift_embedded_dual(dual, aff.dim);
            }
            (ConstraintTag::Leak(j), ConeBlock::Psd(aff)) => {
                d_leak[*j] = super::backend::lift_embedded_dual(dual, aff.dim);
            }
            _ => {}
        }
    }
    Ok(DualCertificate {
        y: y.ok_or_else(|| SdpError::Backend("missing dual for the W̄ PSD cone".into()))?,
        beta,
        alpha,
        mu,
        rho_tp,
        d_eve_idle,
        d_eve_primary,
        d_harvest,
        d_leak,
    })
}

/// Dual-side KKT matrix `A*` for which stationarity forces
/// `Y* = A* − β* H`:
///
/// `A* = (α* + μ* + λ₂ρ*·[totals]) I − Σ_f cw_f · U_f D_f* U_fᴴ`
///
/// with `U_f = [I v̂_f]` and `cw_f` the coefficient of `W̄` inside family
/// f's block.
pub fn kkt_a_matrix(assembled: &AssembledProblem, dual: &DualCertificate) -> HermitianMatrix {
    let n = assembled.layout.n;
    let mut scalar = dual.alpha + dual.mu;
    if assembled.spec.variant == Variant::DropNormalization {
        scalar += assembled.spec.lambda[1] * dual.rho_tp;
    }
    let mut a = HermitianMatrix::identity(n).scale(scalar);
    for rb in &assembled.robust {
        let d = match rb.kind {
            FamilyKind::EveSinrIdle => &dual.d_eve_idle[rb.index],
            FamilyKind::EveSinrPrimary => &dual.d_eve_primary[rb.index],
            FamilyKind::HarvestFloor => &dual.d_harvest[rb.index],
            FamilyKind::LeakCeiling => &dual.d_leak[rb.index],
        };
        // U D Uᴴ with U = [I v̂]
        let mut u = CMatrix::zeros(n, n + 1);
        for i in 0..n {
            u[(i, i)] = crate::hermitian::C64::new(1.0, 0.0);
            u[(i, n)] = rb.vhat[i];
        }
        let udu = HermitianMatrix::symmetrize(&u * d.matrix() * u.adjoint());
        a = a.add(&udu.scale(-rb.w_coeff));
    }
    a
}
