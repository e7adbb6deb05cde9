//! Network realization generator: topology sampling, log-distance path
//! loss with a breakpoint, Rician fading, and ball-bounded CSI estimates.
//!
//! Generation is pure given `(config, realization index)`: one
//! counter-based RNG stream per realization, so campaigns can be
//! parallelized across realizations without affecting the draws.

use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hermitian::{C64, CVector};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid topology config: {0}")]
    InvalidConfig(String),
}

/// Static description of the simulated network. Defaults reproduce the
/// reference measurement campaign (915 MHz, 2–20 m secondary ring,
/// 20–40 m primary ring, Rician factor 3 dB, −23 dBm noise, 10 dBi
/// transmit antennas).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    /// Transmit antennas at the secondary transmitter.
    pub n_antennas: usize,
    /// Secondary receivers (1 active + K−1 idle).
    pub n_secondary: usize,
    /// Primary receivers.
    pub n_primary: usize,
    /// Path-loss reference distance in meters.
    pub ref_distance_m: f64,
    /// Maximum secondary service distance in meters.
    pub secondary_max_distance_m: f64,
    /// Primary receivers are placed uniformly in this distance ring (m).
    pub primary_ring_m: (f64, f64),
    /// Rician K-factor in dB.
    pub rician_k_db: f64,
    /// Carrier frequency in MHz.
    pub carrier_mhz: f64,
    /// Per-antenna transmit gain in dBi.
    pub tx_antenna_gain_dbi: f64,
    /// Thermal + signal-processing noise variance in dBm.
    pub noise_dbm: f64,
    /// Primary transmitter power in dBm (folded into secondary-side
    /// noise as Gaussian interference).
    pub primary_tx_power_dbm: f64,
    /// Distance of the primary transmitter from the secondary
    /// transmitter in meters.
    pub primary_tx_distance_m: f64,
    /// Path-loss breakpoint distance in meters.
    pub breakpoint_m: f64,
    /// Path-loss exponent before the breakpoint.
    pub pathloss_exp_near: f64,
    /// Path-loss exponent beyond the breakpoint.
    pub pathloss_exp_far: f64,
    /// Normalized CSI error σ²_SU = ε²/‖g‖² of the idle receivers.
    pub csi_err_secondary: f64,
    /// Normalized CSI error σ²_PU = υ²/‖l‖² of the primary receivers.
    pub csi_err_primary: f64,
    /// Campaign seed.
    pub seed: u64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            n_antennas: 8,
            n_secondary: 4,
            n_primary: 2,
            ref_distance_m: 2.0,
            secondary_max_distance_m: 20.0,
            primary_ring_m: (20.0, 40.0),
            rician_k_db: 3.0,
            carrier_mhz: 915.0,
            tx_antenna_gain_dbi: 10.0,
            noise_dbm: -23.0,
            primary_tx_power_dbm: 5.0,
            primary_tx_distance_m: 40.0,
            breakpoint_m: 10.0,
            pathloss_exp_near: 2.0,
            pathloss_exp_far: 3.5,
            csi_err_secondary: 0.01,
            csi_err_primary: 0.05,
            seed: 0,
        }
    }
}

impl TopologyConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.n_antennas == 0 {
            return Err(ChannelError::InvalidConfig("n_antennas must be >= 1".into()));
        }
        if self.n_antennas <= self.n_primary {
            return Err(ChannelError::InvalidConfig(format!(
                "need n_antennas > n_primary for efficient communication, got {} <= {}",
                self.n_antennas, self.n_primary
            )));
        }
        if self.n_secondary == 0 {
            return Err(ChannelError::InvalidConfig("n_secondary must be >= 1".into()));
        }
        if self.ref_distance_m <= 0.0 || self.ref_distance_m >= self.secondary_max_distance_m {
            return Err(ChannelError::InvalidConfig(
                "require 0 < ref_distance < secondary_max_distance".into(),
            ));
        }
        if self.primary_ring_m.0 >= self.primary_ring_m.1 {
            return Err(ChannelError::InvalidConfig(
                "primary ring must satisfy min < max".into(),
            ));
        }
        if self.csi_err_secondary < 0.0 || self.csi_err_primary < 0.0 {
            return Err(ChannelError::InvalidConfig("CSI errors must be >= 0".into()));
        }
        Ok(())
    }

    pub fn rician_k_linear(&self) -> f64 {
        db_to_linear(self.rician_k_db)
    }

    pub fn antenna_gain_linear(&self) -> f64 {
        db_to_linear(self.tx_antenna_gain_dbi)
    }

    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    pub fn primary_tx_power_watts(&self) -> f64 {
        dbm_to_watts(self.primary_tx_power_dbm)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Planar positions of one realization; the secondary transmitter sits
/// at the origin, the primary transmitter on the positive x-axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Positions {
    pub secondary: Vec<[f64; 2]>,
    pub primary: Vec<[f64; 2]>,
    pub primary_tx: [f64; 2],
}

impl Positions {
    pub fn secondary_distances(&self) -> Vec<f64> {
        self.secondary.iter().map(|p| (p[0].powi(2) + p[1].powi(2)).sqrt()).collect()
    }

    pub fn primary_distances(&self) -> Vec<f64> {
        self.primary.iter().map(|p| (p[0].powi(2) + p[1].powi(2)).sqrt()).collect()
    }
}

/// All channel vectors of one realization: perfect CSI of the desired
/// link plus estimate/radius pairs (and the true vectors, kept for
/// oracle checks) for every potential eavesdropper.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UncertainChannelSet {
    /// Desired receiver channel (perfect CSI).
    #[serde(with = "cvec_serde")]
    pub h: CVector,
    #[serde(with = "cvec_list_serde")]
    pub g_true: Vec<CVector>,
    #[serde(with = "cvec_list_serde")]
    pub g_hat: Vec<CVector>,
    /// Uncertainty radii ε_k of the idle-receiver channels.
    pub eps: Vec<f64>,
    #[serde(with = "cvec_list_serde")]
    pub l_true: Vec<CVector>,
    #[serde(with = "cvec_list_serde")]
    pub l_hat: Vec<CVector>,
    /// Uncertainty radii υ_j of the primary-receiver channels.
    pub upsilon: Vec<f64>,
}

impl UncertainChannelSet {
    pub fn n_antennas(&self) -> usize {
        self.h.len()
    }

    pub fn n_idle(&self) -> usize {
        self.g_hat.len()
    }

    pub fn n_primary(&self) -> usize {
        self.l_hat.len()
    }

    /// Ball-membership invariant: every true channel lies inside the
    /// declared uncertainty sphere around its estimate.
    pub fn check_ball_membership(&self) -> bool {
        let g_ok = self
            .g_true
            .iter()
            .zip(&self.g_hat)
            .zip(&self.eps)
            .all(|((t, e), &r)| (t - e).norm() <= r * (1.0 + 1e-12) + 1e-15);
        let l_ok = self
            .l_true
            .iter()
            .zip(&self.l_hat)
            .zip(&self.upsilon)
            .all(|((t, e), &r)| (t - e).norm() <= r * (1.0 + 1e-12) + 1e-15);
        g_ok && l_ok
    }
}

/// Per-receiver noise variances in Watts, with the primary-transmitter
/// interference folded into the secondary side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Desired secondary receiver.
    pub sigma_z2: f64,
    /// Idle secondary receivers (length K−1).
    pub sigma_zk2: Vec<f64>,
    /// Primary receivers (shared value; their own downlink signal is not
    /// interference).
    pub sigma_pu2: f64,
}

/// One complete network realization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkRealization {
    pub channels: UncertainChannelSet,
    pub noise: NoiseModel,
    pub positions: Positions,
    /// Which secondary position the scheduler selected for information
    /// transfer (the strongest channel); the rest idle and harvest.
    pub desired_index: usize,
}

fn rng_for(seed: u64, realization: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization);
    rng
}

/// Draw receiver positions. Distances are uniform over the declared
/// rings (matching the stated placement), angles uniform on the circle.
pub fn sample_topology(cfg: &TopologyConfig, realization: u64) -> Result<Positions, ChannelError> {
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed, realization);
    Ok(sample_topology_with(cfg, &mut rng))
}

fn sample_topology_with(cfg: &TopologyConfig, rng: &mut ChaCha8Rng) -> Positions {
    let place = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| -> [f64; 2] {
        let d = lo + (hi - lo) * rng.random::<f64>();
        let th = std::f64::consts::TAU * rng.random::<f64>();
        [d * th.cos(), d * th.sin()]
    };
    let secondary = (0..cfg.n_secondary)
        .map(|_| place(rng, cfg.ref_distance_m, cfg.secondary_max_distance_m))
        .collect();
    let primary = (0..cfg.n_primary)
        .map(|_| place(rng, cfg.primary_ring_m.0, cfg.primary_ring_m.1))
        .collect();
    Positions {
        secondary,
        primary,
        primary_tx: [cfg.primary_tx_distance_m, 0.0],
    }
}

/// Linear power gain of the log-distance model with breakpoint.
/// Distances below the reference distance are clamped.
pub fn path_loss(d: f64, cfg: &TopologyConfig) -> f64 {
    let d = if d < cfg.ref_distance_m {
        log::warn!(
            "path_loss: distance {d:.3} m below reference {:.3} m, clamping",
            cfg.ref_distance_m
        );
        cfg.ref_distance_m
    } else {
        d
    };
    let fs = |dist: f64| -> f64 {
        10.0 * cfg.pathloss_exp_near * dist.log10() + 20.0 * cfg.carrier_mhz.log10() - 27.55
    };
    let pl_db = if d <= cfg.breakpoint_m {
        fs(d)
    } else {
        fs(cfg.breakpoint_m) + 10.0 * cfg.pathloss_exp_far * (d / cfg.breakpoint_m).log10()
    };
    db_to_linear(-pl_db)
}

fn cn01(rng: &mut ChaCha8Rng) -> C64 {
    // CN(0,1): unit total variance split across re/im.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Rician fade: deterministic steering-vector line-of-sight component
/// plus CSCG scatter, scaled so `E‖·‖² = n_antennas · path_loss · gain`.
pub fn sample_channel(
    d: f64,
    angle: f64,
    cfg: &TopologyConfig,
    rng: &mut ChaCha8Rng,
) -> CVector {
    let n = cfg.n_antennas;
    let kappa = cfg.rician_k_linear();
    let amp = (path_loss(d, cfg) * cfg.antenna_gain_linear()).sqrt();
    let los_w = (kappa / (1.0 + kappa)).sqrt();
    let nlos_w = (1.0 / (1.0 + kappa)).sqrt();
    DVector::from_fn(n, |m, _| {
        let phase = std::f64::consts::PI * (m as f64) * angle.sin();
        let los = C64::new(phase.cos(), phase.sin());
        (los * los_w + cn01(rng) * nlos_w) * amp
    })
}

/// Scalar fade power from a single-antenna transmitter (no array gain).
fn scalar_fade_power(d: f64, cfg: &TopologyConfig, rng: &mut ChaCha8Rng) -> f64 {
    let kappa = cfg.rician_k_linear();
    let los_w = (kappa / (1.0 + kappa)).sqrt();
    let nlos_w = (1.0 / (1.0 + kappa)).sqrt();
    let fade = C64::new(los_w, 0.0) + cn01(rng) * nlos_w;
    path_loss(d, cfg) * fade.norm_sqr()
}

/// Produce an estimate and radius with `ε² = σ²_norm ‖g‖²`; the error is
/// drawn uniformly in the ε-ball so non-tight worst cases are exercised.
pub fn degrade_csi(
    true_channel: &CVector,
    sigma2_norm: f64,
    rng: &mut ChaCha8Rng,
) -> (CVector, f64) {
    let eps = (sigma2_norm.max(0.0)).sqrt() * true_channel.norm();
    if eps == 0.0 {
        return (true_channel.clone(), 0.0);
    }
    let n = true_channel.len();
    let dir = DVector::from_fn(n, |_, _| cn01(rng));
    let norm = dir.norm();
    // radius density ∝ r^(2n−1) makes the draw uniform in the ball
    let r = eps * rng.random::<f64>().powf(1.0 / (2.0 * n as f64));
    let delta = if norm > 0.0 {
        dir * C64::new(r / norm, 0.0)
    } else {
        DVector::zeros(n)
    };
    (true_channel - &delta, eps)
}

/// Generate one full network realization.
pub fn generate(cfg: &TopologyConfig, realization: u64) -> Result<NetworkRealization, ChannelError> {
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed, realization);
    let positions = sample_topology_with(cfg, &mut rng);

    let angle_of = |p: &[f64; 2]| p[1].atan2(p[0]);
    let dist_of = |p: &[f64; 2]| (p[0].powi(2) + p[1].powi(2)).sqrt();

    // One channel per secondary position; the scheduler then hands the
    // information stream to the strongest one and the rest idle.
    let secondary_ch: Vec<CVector> = positions
        .secondary
        .iter()
        .map(|p| sample_channel(dist_of(p), angle_of(p), cfg, &mut rng))
        .collect();
    let desired_index = secondary_ch
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            a.norm_squared()
                .partial_cmp(&b.norm_squared())
                .expect("finite norms")
        })
        .map(|(i, _)| i)
        .expect("at least one secondary receiver");
    let h = secondary_ch[desired_index].clone();
    let g_true: Vec<CVector> = secondary_ch
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != desired_index)
        .map(|(_, ch)| ch.clone())
        .collect();
    let mut l_true = Vec::with_capacity(cfg.n_primary);
    for p in positions.primary.iter() {
        l_true.push(sample_channel(dist_of(p), angle_of(p), cfg, &mut rng));
    }

    // Fold the primary transmitter's received power into the noise
    // variances of the secondary-side receivers.
    let p_pu = cfg.primary_tx_power_watts();
    let base = cfg.noise_watts();
    let d_pu = |p: &[f64; 2]| {
        let dx = p[0] - positions.primary_tx[0];
        let dy = p[1] - positions.primary_tx[1];
        (dx * dx + dy * dy).sqrt().max(cfg.ref_distance_m)
    };
    let fold: Vec<f64> = positions
        .secondary
        .iter()
        .map(|p| base + p_pu * scalar_fade_power(d_pu(p), cfg, &mut rng))
        .collect();
    let sigma_z2 = fold[desired_index];
    let sigma_zk2: Vec<f64> = fold
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != desired_index)
        .map(|(_, s)| *s)
        .collect();

    let mut g_hat = Vec::with_capacity(g_true.len());
    let mut eps = Vec::with_capacity(g_true.len());
    for g in &g_true {
        let (hat, r) = degrade_csi(g, cfg.csi_err_secondary, &mut rng);
        g_hat.push(hat);
        eps.push(r);
    }
    let mut l_hat = Vec::with_capacity(l_true.len());
    let mut upsilon = Vec::with_capacity(l_true.len());
    for l in &l_true {
        let (hat, r) = degrade_csi(l, cfg.csi_err_primary, &mut rng);
        l_hat.push(hat);
        upsilon.push(r);
    }

    let channels = UncertainChannelSet {
        h,
        g_true,
        g_hat,
        eps,
        l_true,
        l_hat,
        upsilon,
    };
    debug_assert!(channels.check_ball_membership());
    Ok(NetworkRealization {
        channels,
        noise: NoiseModel {
            sigma_z2,
            sigma_zk2,
            sigma_pu2: base,
        },
        positions,
        desired_index,
    })
}

/// Complex vectors serialize as `[re, im]` pairs for replay and
/// cross-implementation regression.
pub(crate) mod cvec_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        serde::Serialize::serialize(&pairs, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
        let pairs: Vec<[f64; 2]> = serde::Deserialize::deserialize(d)?;
        Ok(DVector::from_iterator(
            pairs.len(),
            pairs.iter().map(|p| C64::new(p[0], p[1])),
        ))
    }
}

pub(crate) mod cvec_list_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[CVector], s: S) -> Result<S::Ok, S::Error> {
        let lists: Vec<Vec<[f64; 2]>> = v
            .iter()
            .map(|vec| vec.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        serde::Serialize::serialize(&lists, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CVector>, D::Error> {
        let lists: Vec<Vec<[f64; 2]>> = serde::Deserialize::deserialize(d)?;
        Ok(lists
            .into_iter()
            .map(|pairs| {
                DVector::from_iterator(pairs.len(), pairs.iter().map(|p| C64::new(p[0], p[1])))
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_cfg() -> TopologyConfig {
        TopologyConfig {
            n_antennas: 4,
            n_secondary: 3,
            n_primary: 2,
            seed: 42,
            ..TopologyConfig::default()
        }
    }

    #[test]
    fn topology_respects_rings() {
        let cfg = small_cfg();
        for r in 0..50 {
            let pos = sample_topology(&cfg, r).unwrap();
            for d in pos.secondary_distances() {
                assert!(d >= cfg.ref_distance_m - 1e-12 && d <= cfg.secondary_max_distance_m + 1e-12);
            }
            for d in pos.primary_distances() {
                assert!(d >= cfg.primary_ring_m.0 - 1e-12 && d <= cfg.primary_ring_m.1 + 1e-12);
            }
        }
    }

    #[test]
    fn topology_single_secondary_no_primary() {
        let cfg = TopologyConfig {
            n_antennas: 2,
            n_secondary: 1,
            n_primary: 0,
            ..TopologyConfig::default()
        };
        let pos = sample_topology(&cfg, 0).unwrap();
        assert_eq!(pos.secondary.len(), 1);
        let d = pos.secondary_distances()[0];
        assert!((2.0..=20.0).contains(&d));
    }

    #[test]
    fn topology_deterministic() {
        let cfg = small_cfg();
        let a = sample_topology(&cfg, 7).unwrap();
        let b = sample_topology(&cfg, 7).unwrap();
        assert_eq!(a.secondary, b.secondary);
        assert_eq!(a.primary, b.primary);
    }

    #[test]
    fn topology_distance_cdf_uniform() {
        let cfg = small_cfg();
        let mut ds: Vec<f64> = (0..4000u64)
            .flat_map(|r| sample_topology(&cfg, r).unwrap().secondary_distances())
            .collect();
        ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = ds.len() as f64;
        let (lo, hi) = (cfg.ref_distance_m, cfg.secondary_max_distance_m);
        let ks = ds
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let f_emp_hi = (i + 1) as f64 / n;
                let f_emp_lo = i as f64 / n;
                let f_true = (d - lo) / (hi - lo);
                (f_emp_hi - f_true).abs().max((f_true - f_emp_lo).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn path_loss_anchor_and_monotonicity() {
        let cfg = TopologyConfig::default();
        let ref_gain = path_loss(cfg.ref_distance_m, &cfg);
        // free-space at 915 MHz and 2 m: PL = 20log10(2) + 20log10(915) − 27.55 dB
        let expected_db = 20.0 * 2f64.log10() + 20.0 * 915f64.log10() - 27.55;
        assert_relative_eq!(linear_to_db(ref_gain), -expected_db, epsilon = 1e-9);
        assert!(path_loss(20.0, &cfg) < path_loss(2.0, &cfg));
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let d = 2.0 + 0.4 * i as f64;
            let g = path_loss(d, &cfg);
            assert!(g <= prev + 1e-15 && g > 0.0 && g <= 1.0);
            prev = g;
        }
    }

    #[test]
    fn path_loss_slope_beyond_breakpoint() {
        let cfg = TopologyConfig::default();
        let g1 = path_loss(15.0, &cfg);
        let g2 = path_loss(30.0, &cfg);
        let drop_db = linear_to_db(g1) - linear_to_db(g2);
        assert_relative_eq!(drop_db, 10.0 * cfg.pathloss_exp_far * 2f64.log10(), epsilon = 1e-9);
    }

    #[test]
    fn path_loss_clamps_below_reference() {
        let cfg = TopologyConfig::default();
        assert_relative_eq!(path_loss(0.5, &cfg), path_loss(cfg.ref_distance_m, &cfg));
    }

    #[test]
    fn channel_mean_power_and_k_factor() {
        let cfg = small_cfg();
        let mut rng = rng_for(1, 0);
        let d = 5.0;
        let expected = cfg.n_antennas as f64 * path_loss(d, &cfg) * cfg.antenna_gain_linear();
        let trials = 20_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            acc += sample_channel(d, 0.3, &cfg, &mut rng).norm_squared();
        }
        let mean = acc / trials as f64;
        assert_relative_eq!(mean, expected, max_relative = 0.02);

        // LOS-to-scatter power ratio ≈ the linear K factor
        let kappa = cfg.rician_k_linear();
        let amp = (path_loss(d, &cfg) * cfg.antenna_gain_linear()).sqrt();
        let los_power = cfg.n_antennas as f64 * amp * amp * kappa / (1.0 + kappa);
        let mut scatter = 0.0;
        let mut rng2 = rng_for(2, 0);
        for _ in 0..trials {
            let ch = sample_channel(d, 0.3, &cfg, &mut rng2);
            // subtract deterministic LOS
            let los = DVector::from_fn(cfg.n_antennas, |m, _| {
                let phase = std::f64::consts::PI * (m as f64) * 0.3f64.sin();
                C64::new(phase.cos(), phase.sin())
                    * C64::new(amp * (kappa / (1.0 + kappa)).sqrt(), 0.0)
            });
            scatter += (ch - los).norm_squared();
        }
        let scatter_mean = scatter / trials as f64;
        assert_relative_eq!(los_power / scatter_mean, kappa, max_relative = 0.02);
    }

    #[test]
    fn rician_infinite_k_is_pure_los() {
        let cfg = TopologyConfig {
            rician_k_db: 300.0,
            ..small_cfg()
        };
        let mut rng = rng_for(3, 0);
        let d = 4.0;
        let ch = sample_channel(d, 0.7, &cfg, &mut rng);
        let amp = (path_loss(d, &cfg) * cfg.antenna_gain_linear()).sqrt();
        for m in 0..cfg.n_antennas {
            let phase = std::f64::consts::PI * (m as f64) * 0.7f64.sin();
            let los = C64::new(phase.cos(), phase.sin()) * amp;
            assert!((ch[m] - los).norm() < 1e-10 * amp);
        }
    }

    #[test]
    fn degrade_csi_examples() {
        let mut rng = rng_for(4, 0);
        let g = DVector::from_vec(vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.2)]);
        let (hat, r) = degrade_csi(&g, 0.0, &mut rng);
        assert_eq!(r, 0.0);
        assert_eq!(hat, g);

        let (hat, r) = degrade_csi(&g, 0.01, &mut rng);
        assert_relative_eq!(r, 0.1 * g.norm(), epsilon = 1e-12);
        assert!((&g - &hat).norm() <= r + 1e-15);
    }

    #[test]
    fn generate_is_deterministic_and_consistent() {
        let cfg = small_cfg();
        let a = generate(&cfg, 5).unwrap();
        let b = generate(&cfg, 5).unwrap();
        assert_eq!(a.channels.h, b.channels.h);
        assert_eq!(a.channels.g_hat, b.channels.g_hat);
        assert_eq!(a.noise.sigma_zk2, b.noise.sigma_zk2);
        assert!(a.channels.check_ball_membership());
        assert_eq!(a.channels.n_idle(), cfg.n_secondary - 1);
        assert_eq!(a.channels.n_primary(), cfg.n_primary);
        assert!(a.noise.sigma_z2 > cfg.noise_watts());
        assert_relative_eq!(a.noise.sigma_pu2, cfg.noise_watts());
    }

    #[test]
    fn mean_power_decreases_with_distance() {
        let cfg = small_cfg();
        let mut rng = rng_for(6, 0);
        let mean_at = |d: f64, rng: &mut ChaCha8Rng| -> f64 {
            (0..4000)
                .map(|_| sample_channel(d, 0.1, &cfg, rng).norm_squared())
                .sum::<f64>()
                / 4000.0
        };
        let p5 = mean_at(5.0, &mut rng);
        let p12 = mean_at(12.0, &mut rng);
        let p19 = mean_at(19.0, &mut rng);
        assert!(p5 > p12 && p12 > p19);
    }

    #[test]
    fn channel_set_json_roundtrip() {
        let cfg = small_cfg();
        let real = generate(&cfg, 0).unwrap();
        let json = serde_json::to_string(&real.channels).unwrap();
        let back: UncertainChannelSet = serde_json::from_str(&json).unwrap();
        assert_eq!(real.channels.h, back.h);
        assert_eq!(real.channels.l_hat, back.l_hat);
        assert_eq!(real.channels.eps, back.eps);
    }

    #[test]
    fn invalid_configs_rejected() {
        let cfg = TopologyConfig {
            n_antennas: 2,
            n_primary: 2,
            ..TopologyConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = TopologyConfig {
            ref_distance_m: 25.0,
            ..TopologyConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
