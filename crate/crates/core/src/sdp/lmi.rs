//! S-procedure LMI blocks for the four robust constraint families.
//!
//! Each family certifies a worst-case quadratic constraint over a
//! Euclidean uncertainty ball by one (N_T+1)-dimensional Hermitian LMI
//! with a single nonnegative multiplier:
//!
//! * eavesdropper SINR ceilings at idle receivers (multiplier δ_k),
//! * eavesdropper SINR ceilings at primary receivers (multiplier γ_j),
//! * harvested-power floors at idle receivers (multiplier φ_k),
//! * leakage ceilings at primary receivers (multiplier ω_j).
//!
//! The generic block is
//! `[[μ I + M , M v̂], [v̂ᴴ M , −μ r² + corner + v̂ᴴ M v̂]] ⪰ 0`
//! with `M = cw·W̄ + cv·V̄`; the family fixes `(cw, cv, v̂, r, corner)`.

use crate::hermitian::CVector;
use crate::policy::NumericPolicy;

use super::expr::{sandwich, AffComplex, AffineHermitian, HermVar, LinExpr, WRepr};

/// Which robust family a block belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// SINR ceiling at idle receiver k.
    EveSinrIdle,
    /// SINR ceiling at primary receiver j.
    EveSinrPrimary,
    /// Harvested-power floor at idle receiver k.
    HarvestFloor,
    /// Leakage ceiling at primary receiver j.
    LeakCeiling,
}

/// One assembled robust block plus the data the dual-side KKT
/// reconstruction needs: the coefficient of `W̄` inside the block and the
/// bordering vector.
#[derive(Debug, Clone)]
pub struct RobustBlock {
    pub kind: FamilyKind,
    pub index: usize,
    pub block: AffineHermitian,
    pub w_coeff: f64,
    pub vhat: CVector,
    pub mult_var: usize,
    pub radius: f64,
}

/// Build the bordered S-procedure block.
pub fn robust_block(
    kind: FamilyKind,
    index: usize,
    cw: f64,
    cv: f64,
    vhat: &CVector,
    radius: f64,
    mult_var: usize,
    corner: LinExpr,
    w: &WRepr,
    v: &HermVar,
) -> RobustBlock {
    let n = vhat.len();
    let vr = WRepr::Free(*v);
    let mut block = AffineHermitian::zero(n + 1);

    let m_entry = |i: usize, j: usize| -> AffComplex {
        let mut e = w.entry(i, j).scaled(cw);
        let ve = vr.entry(i, j).scaled(cv);
        e.add(&ve);
        e
    };

    // top-left N×N: μ I + M
    for j in 0..n {
        for i in 0..=j {
            let mut e = m_entry(i, j);
            if i == j {
                e.re.add_term(mult_var, 1.0);
            }
            *block.entry_mut(i, j) = e;
        }
    }
    // border column: (M v̂)_i
    for i in 0..n {
        let mut e = AffComplex::zero();
        for c in 0..n {
            e.add_mul(&m_entry(i, c), vhat[c]);
        }
        *block.entry_mut(i, n) = e;
    }
    // corner: −μ r² + corner + v̂ᴴ M v̂
    let mut quad = sandwich(w, vhat, vhat).scaled(cw);
    let vquad = sandwich(&vr, vhat, vhat).scaled(cv);
    quad.add(&vquad);
    let mut corner_expr = quad.re;
    corner_expr.add_term(mult_var, -radius * radius);
    corner_expr.add(&corner);
    *block.entry_mut(n, n) = AffComplex {
        re: corner_expr,
        im: LinExpr::default(),
    };

    RobustBlock {
        kind,
        index,
        block,
        w_coeff: cw,
        vhat: vhat.clone(),
        mult_var,
        radius,
    }
}

/// SINR ceiling at idle receiver k:
/// worst-case `quad_W ≤ Γ_tol (quad_V + ξ σ²)` over the ε-ball.
#[allow(clippy::too_many_arguments)]
pub fn lmi_eve_idle(
    k: usize,
    g_hat: &CVector,
    eps: f64,
    gamma_tol: f64,
    sigma_zk2: f64,
    xi_var: usize,
    mult_var: usize,
    w: &WRepr,
    v: &HermVar,
) -> RobustBlock {
    robust_block(
        FamilyKind::EveSinrIdle,
        k,
        -1.0 / gamma_tol,
        1.0,
        g_hat,
        eps,
        mult_var,
        LinExpr::term(xi_var, sigma_zk2),
        w,
        v,
    )
}

/// SINR ceiling at primary receiver j.
#[allow(clippy::too_many_arguments)]
pub fn lmi_eve_primary(
    j: usize,
    l_hat: &CVector,
    upsilon: f64,
    gamma_pu_tol: f64,
    sigma_pu2: f64,
    xi_var: usize,
    mult_var: usize,
    w: &WRepr,
    v: &HermVar,
) -> RobustBlock {
    robust_block(
        FamilyKind::EveSinrPrimary,
        j,
        -1.0 / gamma_pu_tol,
        1.0,
        l_hat,
        upsilon,
        mult_var,
        LinExpr::term(xi_var, sigma_pu2),
        w,
        v,
    )
}

/// Harvested-power floor at idle receiver k:
/// `E_k ≥ −η_k · min quad_{W+V}` over the ε-ball. The block carries η_k
/// on the matrix side so η_k = 0 degenerates cleanly to `E_k ≥ 0`.
#[allow(clippy::too_many_arguments)]
pub fn lmi_harvest_floor(
    k: usize,
    g_hat: &CVector,
    eps: f64,
    eta: f64,
    e_su_var: usize,
    mult_var: usize,
    w: &WRepr,
    v: &HermVar,
) -> RobustBlock {
    robust_block(
        FamilyKind::HarvestFloor,
        k,
        eta,
        eta,
        g_hat,
        eps,
        mult_var,
        LinExpr::var(e_su_var),
        w,
        v,
    )
}

/// Leakage ceiling at primary receiver j:
/// `I_j ≥ max quad_{W+V}` over the υ-ball.
#[allow(clippy::too_many_arguments)]
pub fn lmi_leak_ceiling(
    j: usize,
    l_hat: &CVector,
    upsilon: f64,
    i_pu_var: usize,
    mult_var: usize,
    w: &WRepr,
    v: &HermVar,
) -> RobustBlock {
    robust_block(
        FamilyKind::LeakCeiling,
        j,
        -1.0,
        -1.0,
        l_hat,
        upsilon,
        mult_var,
        LinExpr::var(i_pu_var),
        w,
        v,
    )
}

/// Search for a nonnegative multiplier that makes the block PSD at a
/// fixed assignment of all other variables.
///
/// `g(μ) = min_eig(block(μ))` is concave in μ, so a golden-section scan
/// over an adaptively expanded bracket decides feasibility to within
/// `tol`. Used by the oracle-equivalence tests; independent of the conic
/// solver.
pub fn feasible_for_some_multiplier(
    block: &RobustBlock,
    x: &mut [f64],
    tol: f64,
    _policy: &NumericPolicy,
) -> (bool, f64) {
    let eval = |mu: f64, x: &mut [f64]| -> f64 {
        x[block.mult_var] = mu;
        block.block.eval(x).min_eigenvalue()
    };
    if block.radius == 0.0 {
        // degenerate ball: the multiplier sup sits at infinity and the
        // block reduces to its corner entry by the Schur limit
        x[block.mult_var] = 0.0;
        let m = block.block.eval(x);
        let n = m.dim();
        let corner = m.matrix()[(n - 1, n - 1)].re;
        return (corner >= -tol, f64::INFINITY);
    }
    // expand until the objective decreases at the right end or the
    // Schur effect of the multiplier has saturated
    let mut hi = 1.0;
    let mut best = eval(0.0, x);
    let mut best_mu = 0.0;
    for _ in 0..60 {
        let v = eval(hi, x);
        if v > best {
            best = v;
            best_mu = hi;
        }
        if v < best - tol.max(1e-15) && hi > best_mu * 4.0 {
            break;
        }
        hi *= 4.0;
        if best >= -tol || hi > 1e10 {
            break;
        }
    }
    if best >= -tol {
        x[block.mult_var] = best_mu;
        return (true, best_mu);
    }
    // golden-section maximization of the concave min-eigenvalue
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = eval(c, x);
    let mut fd = eval(d, x);
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c, x);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d, x);
        }
        if (b - a).abs() < 1e-12 * (1.0 + b.abs()) {
            break;
        }
        if fc.max(fd) >= -tol {
            break;
        }
    }
    let (mu, val) = if fc > fd { (c, fc) } else { (d, fd) };
    x[block.mult_var] = mu;
    (val >= -tol, mu)
}
