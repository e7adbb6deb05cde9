//! Performance functionals of a candidate transmit policy: radiated
//! power, harvested power, interference leakage, SINRs, the secrecy-rate
//! bound, and their worst cases over the CSI uncertainty balls.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{NoiseModel, UncertainChannelSet};
use crate::hermitian::{worst_case_quadratic, CVector, HermitianError, HermitianMatrix, Sense};
use crate::policy::NumericPolicy;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Hermitian(#[from] HermitianError),
    #[error("dimension mismatch between solution ({sol}) and channels ({ch})")]
    Dimensions { sol: usize, ch: usize },
}

/// QoS and power constants of one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemParams {
    /// Minimum required SINR of the desired receiver (linear).
    pub gamma_req: f64,
    /// Maximum tolerable SINR per idle receiver (linear, length K−1).
    pub gamma_tol: Vec<f64>,
    /// Maximum tolerable SINR per primary receiver (linear, length J).
    pub gamma_pu_tol: Vec<f64>,
    /// Transmit power budget in Watts.
    pub p_max: f64,
    /// RF energy conversion efficiency per idle receiver (length K−1).
    pub eta: Vec<f64>,
    /// Noise variance at the desired receiver in Watts.
    pub sigma_z2: f64,
    /// Noise variances at the idle receivers in Watts (length K−1).
    pub sigma_zk2: Vec<f64>,
    /// Noise variance at the primary receivers in Watts.
    pub sigma_pu2: f64,
}

impl SystemParams {
    /// Assemble from QoS constants plus the per-realization noise model.
    pub fn new(
        gamma_req: f64,
        gamma_tol: Vec<f64>,
        gamma_pu_tol: Vec<f64>,
        p_max: f64,
        eta: Vec<f64>,
        noise: &NoiseModel,
    ) -> Result<Self, MetricsError> {
        let params = Self {
            gamma_req,
            gamma_tol,
            gamma_pu_tol,
            p_max,
            eta,
            sigma_z2: noise.sigma_z2,
            sigma_zk2: noise.sigma_zk2.clone(),
            sigma_pu2: noise.sigma_pu2,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        if !self
            .gamma_tol
            .iter()
            .chain(self.gamma_pu_tol.iter())
            .all(|&t| t > 0.0)
        {
            return Err(MetricsError::InvalidParams(
                "eavesdropper SINR tolerances must be positive".into(),
            ));
        }
        let max_tol = self
            .gamma_tol
            .iter()
            .chain(self.gamma_pu_tol.iter())
            .cloned()
            .fold(0.0f64, f64::max);
        if self.gamma_req <= max_tol {
            return Err(MetricsError::InvalidParams(format!(
                "gamma_req ({}) must exceed every eavesdropper tolerance (max {})",
                self.gamma_req, max_tol
            )));
        }
        if self.p_max <= 0.0 || self.sigma_z2 <= 0.0 || self.sigma_pu2 <= 0.0 {
            return Err(MetricsError::InvalidParams("powers must be positive".into()));
        }
        if self.sigma_zk2.iter().any(|&s| s <= 0.0) {
            return Err(MetricsError::InvalidParams(
                "noise variances must be positive".into(),
            ));
        }
        if self.eta.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
            return Err(MetricsError::InvalidParams("eta must lie in [0,1]".into()));
        }
        if self.eta.len() != self.gamma_tol.len() || self.eta.len() != self.sigma_zk2.len() {
            return Err(MetricsError::InvalidParams(
                "eta, gamma_tol and sigma_zk2 must all have length K-1".into(),
            ));
        }
        Ok(())
    }

    pub fn n_idle(&self) -> usize {
        self.eta.len()
    }

    pub fn n_primary(&self) -> usize {
        self.gamma_pu_tol.len()
    }
}

/// How a rank-one information beam was certified, if at all.
#[derive(Debug, Clone)]
pub enum RankCertificate {
    /// `W ≈ w wᴴ` with the certified vector.
    RankOne(CVector),
    General,
}

/// A transmit policy: information covariance `W`, artificial-noise
/// covariance `V`, and the rank certificate of `W`.
#[derive(Debug, Clone)]
pub struct BeamformingSolution {
    pub w_cov: HermitianMatrix,
    pub v_cov: HermitianMatrix,
    pub rank_certificate: RankCertificate,
}

impl BeamformingSolution {
    pub fn new(
        w_cov: HermitianMatrix,
        v_cov: HermitianMatrix,
        rank_certificate: RankCertificate,
        policy: &NumericPolicy,
    ) -> Result<Self, MetricsError> {
        if w_cov.dim() != v_cov.dim() {
            return Err(MetricsError::Dimensions {
                sol: w_cov.dim(),
                ch: v_cov.dim(),
            });
        }
        if !w_cov.is_psd(policy) || !v_cov.is_psd(policy) {
            return Err(MetricsError::InvalidParams(
                "covariance matrices must be positive semidefinite".into(),
            ));
        }
        if let RankCertificate::RankOne(w) = &rank_certificate {
            let outer = HermitianMatrix::outer(w)?;
            let resid = w_cov.sub(&outer).frobenius();
            if resid > 1e-6 * w_cov.trace().max(f64::MIN_POSITIVE) {
                return Err(MetricsError::InvalidParams(format!(
                    "rank-one certificate violated: residual {resid:.3e}"
                )));
            }
        }
        Ok(Self {
            w_cov,
            v_cov,
            rank_certificate,
        })
    }

    pub fn dim(&self) -> usize {
        self.w_cov.dim()
    }

    /// `W + V`, the covariance seen by an energy harvester.
    pub fn total_cov(&self) -> HermitianMatrix {
        self.w_cov.add(&self.v_cov)
    }

    pub fn is_rank_one(&self) -> bool {
        matches!(self.rank_certificate, RankCertificate::RankOne(_))
    }
}

/// Evaluate metrics at the true channels or at the worst case over the
/// uncertainty balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    True,
    Worst,
}

/// Which eavesdropper a SINR query refers to.
#[derive(Debug, Clone, Copy)]
pub enum Eavesdropper {
    Idle(usize),
    Primary(usize),
}

/// Outcome of one solve attempt, carried through campaign bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Solved,
    /// Solved, but the rank-one construction fell back to a
    /// fixed-direction re-solve because the dual was degenerate.
    DegenerateFallback,
    Infeasible,
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Solved => "solved",
            SolveStatus::DegenerateFallback => "degenerate_fallback",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NumericalFailure => "numerical_failure",
        };
        f.write_str(s)
    }
}

/// Metrics bundle for one `(weights, channel)` pair. Ratios are `None`
/// when the radiated power is zero, never NaN.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub tp: f64,
    pub hp_worst: f64,
    pub ip_worst: f64,
    pub eta_eff_worst: Option<f64>,
    pub iptr_worst: Option<f64>,
    pub secrecy_bound: f64,
    pub feasible: bool,
    pub rank_one: bool,
    pub solve_status: SolveStatus,
}

/// Total radiated power `tr(W) + tr(V)`.
pub fn transmit_power(sol: &BeamformingSolution) -> f64 {
    sol.w_cov.trace() + sol.v_cov.trace()
}

/// Total harvested power `Σ_k η_k g_kᴴ (W+V) g_k`, minimized over the
/// uncertainty balls in worst mode.
pub fn harvested_power(
    sol: &BeamformingSolution,
    channels: &UncertainChannelSet,
    params: &SystemParams,
    mode: EvalMode,
    policy: &NumericPolicy,
) -> Result<f64, MetricsError> {
    check_dims(sol, channels)?;
    let total = sol.total_cov();
    let mut hp = 0.0;
    for k in 0..channels.n_idle() {
        let q = match mode {
            EvalMode::True => total.quad_form(&channels.g_true[k])?,
            EvalMode::Worst => worst_case_quadratic(
                &total,
                &channels.g_hat[k],
                channels.eps[k],
                Sense::Min,
                policy,
            )?
            .value
            .max(0.0),
        };
        hp += params.eta[k] * q;
    }
    Ok(hp)
}

/// Total interference power `Σ_j l_jᴴ (W+V) l_j`, maximized over the
/// uncertainty balls in worst mode.
pub fn interference_leakage(
    sol: &BeamformingSolution,
    channels: &UncertainChannelSet,
    mode: EvalMode,
    policy: &NumericPolicy,
) -> Result<f64, MetricsError> {
    check_dims(sol, channels)?;
    let total = sol.total_cov();
    let mut ip = 0.0;
    for j in 0..channels.n_primary() {
        ip += match mode {
            EvalMode::True => total.quad_form(&channels.l_true[j])?,
            EvalMode::Worst => worst_case_quadratic(
                &total,
                &channels.l_hat[j],
                channels.upsilon[j],
                Sense::Max,
                policy,
            )?
            .value,
        };
    }
    Ok(ip)
}

/// SINR of the desired receiver, `hᴴWh / (hᴴVh + σ_z²)`.
pub fn sinr_desired(
    sol: &BeamformingSolution,
    channels: &UncertainChannelSet,
    params: &SystemParams,
) -> Result<f64, MetricsError> {
    check_dims(sol, channels)?;
    let num = sol.w_cov.quad_form(&channels.h)?;
    let den = sol.v_cov.quad_form(&channels.h)? + params.sigma_z2;
    Ok(num.max(0.0) / den)
}

/// Eavesdropper SINR at the true channel, or its maximum over the
/// uncertainty ball.
///
/// The worst case of the ratio of two coupled quadratics is found by a
/// 1-D root search on the level Γ of the implication form
/// `max_Δ (quad_W − Γ·quad_V) = Γ σ²` — the same sign certificate the
/// LMI relaxation encodes.
pub fn sinr_eavesdropper(
    sol: &BeamformingSolution,
    channels: &UncertainChannelSet,
    params: &SystemParams,
    which: Eavesdropper,
    mode: EvalMode,
    policy: &NumericPolicy,
) -> Result<f64, MetricsError> {
    check_dims(sol, channels)?;
    let (true_ch, hat, radius, sigma2) = match which {
        Eavesdropper::Idle(k) => (
            &channels.g_true[k],
            &channels.g_hat[k],
            channels.eps[k],
            params.sigma_zk2[k],
        ),
        Eavesdropper::Primary(j) => (
            &channels.l_true[j],
            &channels.l_hat[j],
            channels.upsilon[j],
            params.sigma_pu2,
        ),
    };
    match mode {
        EvalMode::True => {
            let num = sol.w_cov.quad_form(true_ch)?;
            let den = sol.v_cov.quad_form(true_ch)? + sigma2;
            Ok(num.max(0.0) / den)
        }
        EvalMode::Worst => {
            let level = |gamma: f64| -> Result<f64, MetricsError> {
                let m = sol.w_cov.sub(&sol.v_cov.scale(gamma));
                let wc = worst_case_quadratic(&m, hat, radius, Sense::Max, policy)?;
                Ok(wc.value - gamma * sigma2)
            };
            let top = worst_case_quadratic(&sol.w_cov, hat, radius, Sense::Max, policy)?.value;
            if top <= 0.0 {
                return Ok(0.0);
            }
            let mut lo = 0.0;
            let mut hi = top / sigma2 + 1.0;
            debug_assert!(level(hi)? < 0.0);
            for _ in 0..200 {
                if hi - lo <= 1e-12 * hi.max(1.0) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if level(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// Guaranteed secrecy-rate floor
/// `log₂(1+Γ_req) − log₂(1 + max tolerance)` in bit/s/Hz.
pub fn secrecy_rate_bound(params: &SystemParams) -> f64 {
    let max_tol = params
        .gamma_tol
        .iter()
        .chain(params.gamma_pu_tol.iter())
        .cloned()
        .fold(0.0f64, f64::max);
    (1.0 + params.gamma_req).log2() - (1.0 + max_tol).log2()
}

/// Worst-case QoS audit of a physical-variable solution: C1 at the
/// perfect-CSI channel, C2/C3 in their robust form, C4 power budget.
pub fn qos_feasible(
    sol: &BeamformingSolution,
    channels: &UncertainChannelSet,
    params: &SystemParams,
    rel_tol: f64,
    policy: &NumericPolicy,
) -> Result<bool, MetricsError> {
    let sinr = sinr_desired(sol, channels, params)?;
    if sinr < params.gamma_req * (1.0 - rel_tol) {
        return Ok(false);
    }
    if transmit_power(sol) > params.p_max * (1.0 + rel_tol) {
        return Ok(false);
    }
    for k in 0..channels.n_idle() {
        let worst = sinr_eavesdropper(
            sol,
            channels,
            params,
            Eavesdropper::Idle(k),
            EvalMode::Worst,
            policy,
        )?;
        if worst > params.gamma_tol[k] * (1.0 + rel_tol) {
            return Ok(false);
        }
    }
    for j in 0..channels.n_primary() {
        let worst = sinr_eavesdropper(
            sol,
            channels,
            params,
            Eavesdropper::Primary(j),
            EvalMode::Worst,
            policy,
        )?;
        if worst > params.gamma_pu_tol[j] * (1.0 + rel_tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bundle every objective evaluation for one solution.
pub fn evaluate_point(
    sol: &BeamformingSolution,
    channels: &UncertainChannelSet,
    params: &SystemParams,
    status: SolveStatus,
    policy: &NumericPolicy,
) -> Result<TradeoffPoint, MetricsError> {
    let tp = transmit_power(sol);
    let hp_worst = harvested_power(sol, channels, params, EvalMode::Worst, policy)?;
    let ip_worst = interference_leakage(sol, channels, EvalMode::Worst, policy)?;
    let (eta_eff_worst, iptr_worst) = if tp > 0.0 {
        (Some(hp_worst / tp), Some(ip_worst / tp))
    } else {
        (None, None)
    };
    let feasible = if tp > 0.0 {
        qos_feasible(sol, channels, params, 1e-6, policy)?
    } else {
        false
    };
    Ok(TradeoffPoint {
        tp,
        hp_worst,
        ip_worst,
        eta_eff_worst,
        iptr_worst,
        secrecy_bound: secrecy_rate_bound(params),
        feasible,
        rank_one: sol.is_rank_one(),
        solve_status: status,
    })
}

fn check_dims(
    sol: &BeamformingSolution,
    channels: &UncertainChannelSet,
) -> Result<(), MetricsError> {
    if sol.dim() != channels.n_antennas() {
        return Err(MetricsError::Dimensions {
            sol: sol.dim(),
            ch: channels.n_antennas(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate, TopologyConfig};
    use crate::hermitian::{sampled_worst_case, C64, CMatrix};
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn toy_params(k1: usize, j: usize) -> SystemParams {
        SystemParams {
            gamma_req: 100.0,
            gamma_tol: vec![1.0; k1],
            gamma_pu_tol: vec![1.0; j],
            p_max: 1.0,
            eta: vec![0.5; k1],
            sigma_z2: 5e-6,
            sigma_zk2: vec![5e-6; k1],
            sigma_pu2: 5e-6,
        }
    }

    fn toy_instance(seed: u64) -> (UncertainChannelSet, SystemParams) {
        let cfg = TopologyConfig {
            n_antennas: 3,
            n_secondary: 3,
            n_primary: 2,
            seed,
            ..TopologyConfig::default()
        };
        let real = generate(&cfg, 0).unwrap();
        let params = SystemParams::new(
            100.0,
            vec![1.0; 2],
            vec![1.0; 2],
            1.0,
            vec![0.5; 2],
            &real.noise,
        )
        .unwrap();
        (real.channels, params)
    }

    fn random_solution(rng: &mut impl Rng, n: usize) -> BeamformingSolution {
        let a = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let b = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        BeamformingSolution::new(
            HermitianMatrix::symmetrize(&a * a.adjoint()),
            HermitianMatrix::symmetrize(&b * b.adjoint()),
            RankCertificate::General,
            &policy(),
        )
        .unwrap()
    }

    #[test]
    fn transmit_power_linearity() {
        let zero = BeamformingSolution::new(
            HermitianMatrix::zeros(2),
            HermitianMatrix::zeros(2),
            RankCertificate::General,
            &policy(),
        )
        .unwrap();
        assert_eq!(transmit_power(&zero), 0.0);

        let w = HermitianMatrix::identity(3).scale(0.2); // trace 0.6
        let mut vm = CMatrix::zeros(3, 3);
        vm[(0, 0)] = C64::new(0.4, 0.0);
        let v = HermitianMatrix::symmetrize(vm);
        let sol = BeamformingSolution::new(w, v, RankCertificate::General, &policy()).unwrap();
        assert_relative_eq!(transmit_power(&sol), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn transmit_power_matches_vector_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = DVector::from_fn(4, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let v_cov = {
            let b = CMatrix::from_fn(4, 4, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            HermitianMatrix::symmetrize(&b * b.adjoint())
        };
        let sol = BeamformingSolution::new(
            HermitianMatrix::outer(&w).unwrap(),
            v_cov.clone(),
            RankCertificate::RankOne(w.clone()),
            &policy(),
        )
        .unwrap();
        assert_relative_eq!(
            transmit_power(&sol),
            w.norm_squared() + v_cov.trace(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn harvested_power_zero_eta() {
        let (channels, mut params) = toy_instance(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sol = random_solution(&mut rng, 3);
        params.eta = vec![0.0; 2];
        let hp = harvested_power(&sol, &channels, &params, EvalMode::Worst, &policy()).unwrap();
        assert_eq!(hp, 0.0);
    }

    #[test]
    fn worst_equals_true_without_uncertainty() {
        let (mut channels, params) = toy_instance(5);
        for k in 0..channels.n_idle() {
            channels.eps[k] = 0.0;
            channels.g_hat[k] = channels.g_true[k].clone();
        }
        for j in 0..channels.n_primary() {
            channels.upsilon[j] = 0.0;
            channels.l_hat[j] = channels.l_true[j].clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sol = random_solution(&mut rng, 3);
        let hp_w = harvested_power(&sol, &channels, &params, EvalMode::Worst, &policy()).unwrap();
        let hp_t = harvested_power(&sol, &channels, &params, EvalMode::True, &policy()).unwrap();
        assert_relative_eq!(hp_w, hp_t, max_relative = 1e-10);
        let ip_w = interference_leakage(&sol, &channels, EvalMode::Worst, &policy()).unwrap();
        let ip_t = interference_leakage(&sol, &channels, EvalMode::True, &policy()).unwrap();
        assert_relative_eq!(ip_w, ip_t, max_relative = 1e-10);
    }

    #[test]
    fn no_primary_receivers_leak_nothing() {
        let cfg = TopologyConfig {
            n_antennas: 3,
            n_secondary: 3,
            n_primary: 0,
            seed: 1,
            ..TopologyConfig::default()
        };
        let real = generate(&cfg, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sol = random_solution(&mut rng, 3);
        let ip =
            interference_leakage(&sol, &real.channels, EvalMode::Worst, &policy()).unwrap();
        assert_eq!(ip, 0.0);
    }

    #[test]
    fn worst_case_dominance() {
        let (channels, params) = toy_instance(7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let sol = random_solution(&mut rng, 3);
            let hp_w =
                harvested_power(&sol, &channels, &params, EvalMode::Worst, &policy()).unwrap();
            let hp_t =
                harvested_power(&sol, &channels, &params, EvalMode::True, &policy()).unwrap();
            assert!(hp_w <= hp_t + 1e-12);
            let ip_w = interference_leakage(&sol, &channels, EvalMode::Worst, &policy()).unwrap();
            let ip_t = interference_leakage(&sol, &channels, EvalMode::True, &policy()).unwrap();
            assert!(ip_w >= ip_t - 1e-12);
            for k in 0..channels.n_idle() {
                let s_w = sinr_eavesdropper(
                    &sol,
                    &channels,
                    &params,
                    Eavesdropper::Idle(k),
                    EvalMode::Worst,
                    &policy(),
                )
                .unwrap();
                let s_t = sinr_eavesdropper(
                    &sol,
                    &channels,
                    &params,
                    Eavesdropper::Idle(k),
                    EvalMode::True,
                    &policy(),
                )
                .unwrap();
                assert!(s_w >= s_t - 1e-9, "worst {s_w} true {s_t}");
            }
        }
    }

    #[test]
    fn worst_metrics_match_sampling() {
        let (channels, params) = toy_instance(9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let sol = random_solution(&mut rng, 3);
        let total = sol.total_cov();

        let mut hp_sampled = 0.0;
        for k in 0..channels.n_idle() {
            hp_sampled += params.eta[k]
                * sampled_worst_case(
                    &total,
                    &channels.g_hat[k],
                    channels.eps[k],
                    Sense::Min,
                    30_000,
                    &mut rng,
                )
                .0;
        }
        let hp = harvested_power(&sol, &channels, &params, EvalMode::Worst, &policy()).unwrap();
        assert_relative_eq!(hp, hp_sampled, max_relative = 1e-4);

        let mut ip_sampled = 0.0;
        for j in 0..channels.n_primary() {
            ip_sampled += sampled_worst_case(
                &total,
                &channels.l_hat[j],
                channels.upsilon[j],
                Sense::Max,
                30_000,
                &mut rng,
            )
            .0;
        }
        let ip = interference_leakage(&sol, &channels, EvalMode::Worst, &policy()).unwrap();
        assert_relative_eq!(ip, ip_sampled, max_relative = 1e-4);
    }

    #[test]
    fn worst_eavesdropper_sinr_matches_ball_sampling() {
        let (channels, params) = toy_instance(11);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let sol = random_solution(&mut rng, 3);
        let k = 0;
        let worst = sinr_eavesdropper(
            &sol,
            &channels,
            &params,
            Eavesdropper::Idle(k),
            EvalMode::Worst,
            &policy(),
        )
        .unwrap();
        // direct sampling of the ratio over the ball, with local polish
        let eps = channels.eps[k];
        let ratio_at = |delta: &DVector<C64>| {
            let g = &channels.g_hat[k] + delta;
            let num = sol.w_cov.quad_form(&g).unwrap();
            let den = sol.v_cov.quad_form(&g).unwrap() + params.sigma_zk2[k];
            num / den
        };
        let mut best = ratio_at(&DVector::zeros(3));
        let mut best_delta = DVector::<C64>::zeros(3);
        for _ in 0..60_000 {
            let dir = DVector::from_fn(3, |_, _| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let norm = dir.norm();
            if norm == 0.0 {
                continue;
            }
            let r = eps * rng.random::<f64>().powf(1.0 / 6.0);
            let delta = dir * C64::new(r / norm, 0.0);
            let v = ratio_at(&delta);
            if v > best {
                best = v;
                best_delta = delta;
            }
        }
        let mut step = 0.3 * eps;
        for _ in 0..60 {
            let mut improved = false;
            for _ in 0..200 {
                let dir = DVector::from_fn(3, |_, _| {
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                let norm = dir.norm();
                if norm == 0.0 {
                    continue;
                }
                let mut cand = &best_delta + dir * C64::new(step / norm, 0.0);
                let cn = cand.norm();
                if cn > eps {
                    cand *= C64::new(eps / cn, 0.0);
                }
                let v = ratio_at(&cand);
                if v > best {
                    best = v;
                    best_delta = cand;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
                if step < 1e-10 * eps {
                    break;
                }
            }
        }
        assert!(
            best <= worst * (1.0 + 1e-6),
            "sampled {best} exceeds worst {worst}"
        );
        assert_relative_eq!(worst, best, max_relative = 2e-3);
    }

    #[test]
    fn sinr_closed_form_no_noise_cov() {
        let (mut channels, params) = toy_instance(13);
        channels.eps = vec![0.0; 2];
        for k in 0..2 {
            channels.g_hat[k] = channels.g_true[k].clone();
        }
        let w = channels.g_true[0].clone();
        let sol = BeamformingSolution::new(
            HermitianMatrix::outer(&w).unwrap(),
            HermitianMatrix::zeros(3),
            RankCertificate::RankOne(w.clone()),
            &policy(),
        )
        .unwrap();
        let s = sinr_eavesdropper(
            &sol,
            &channels,
            &params,
            Eavesdropper::Idle(0),
            EvalMode::Worst,
            &policy(),
        )
        .unwrap();
        let expected = w.norm_squared().powi(2) / params.sigma_zk2[0];
        assert_relative_eq!(s, expected, max_relative = 1e-9);

        let zero = BeamformingSolution::new(
            HermitianMatrix::zeros(3),
            HermitianMatrix::zeros(3),
            RankCertificate::General,
            &policy(),
        )
        .unwrap();
        assert_eq!(sinr_desired(&zero, &channels, &params).unwrap(), 0.0);
    }

    #[test]
    fn secrecy_bound_values() {
        let params = toy_params(2, 2);
        // Γ_req = 20 dB, tolerances 0 dB
        assert_relative_eq!(secrecy_rate_bound(&params), 5.6582, epsilon = 1e-4);

        let p2 = SystemParams {
            gamma_req: 3.0,
            gamma_tol: vec![1.0],
            gamma_pu_tol: vec![],
            eta: vec![0.5],
            sigma_zk2: vec![5e-6],
            ..toy_params(1, 0)
        };
        assert_relative_eq!(secrecy_rate_bound(&p2), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn secrecy_bound_zero_at_equal_rates() {
        // Γ_req = Γ_tol = 1 violates the params invariant, so evaluate
        // the formula on an unvalidated struct.
        let p = SystemParams {
            gamma_req: 1.0,
            gamma_tol: vec![1.0],
            gamma_pu_tol: vec![],
            p_max: 1.0,
            eta: vec![0.5],
            sigma_z2: 1e-6,
            sigma_zk2: vec![1e-6],
            sigma_pu2: 1e-6,
        };
        assert_relative_eq!(secrecy_rate_bound(&p), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_point_degenerate_and_scaling() {
        let (channels, params) = toy_instance(15);
        let zero = BeamformingSolution::new(
            HermitianMatrix::zeros(3),
            HermitianMatrix::zeros(3),
            RankCertificate::General,
            &policy(),
        )
        .unwrap();
        let pt =
            evaluate_point(&zero, &channels, &params, SolveStatus::Solved, &policy()).unwrap();
        assert_eq!(pt.tp, 0.0);
        assert_eq!(pt.hp_worst, 0.0);
        assert!(pt.eta_eff_worst.is_none() && pt.iptr_worst.is_none());

        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let sol = random_solution(&mut rng, 3);
        let scaled = BeamformingSolution::new(
            sol.w_cov.scale(3.0),
            sol.v_cov.scale(3.0),
            RankCertificate::General,
            &policy(),
        )
        .unwrap();
        let a = evaluate_point(&sol, &channels, &params, SolveStatus::Solved, &policy()).unwrap();
        let b =
            evaluate_point(&scaled, &channels, &params, SolveStatus::Solved, &policy()).unwrap();
        assert_relative_eq!(b.tp, 3.0 * a.tp, max_relative = 1e-12);
        assert_relative_eq!(
            a.eta_eff_worst.unwrap(),
            b.eta_eff_worst.unwrap(),
            max_relative = 1e-9
        );
        assert_relative_eq!(
            a.iptr_worst.unwrap(),
            b.iptr_worst.unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn params_invariants_enforced() {
        let mut p = toy_params(2, 1);
        p.gamma_req = 0.5;
        assert!(p.validate().is_err());
        let mut p = toy_params(2, 1);
        p.eta[0] = 1.5;
        assert!(p.validate().is_err());
        let mut p = toy_params(2, 1);
        p.p_max = 0.0;
        assert!(p.validate().is_err());
        assert!(toy_params(2, 1).validate().is_ok());
    }
}
