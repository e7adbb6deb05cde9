//! Conic backend contract and the Clarabel implementation.
//!
//! The model side hands over a structured cone problem; the backend must
//! return primal values *and* one dual vector per cone, because the
//! rank-one recovery consumes the dual certificate. A backend that
//! cannot produce duals is rejected at configuration time.
//!
//! Complex Hermitian LMIs are lowered through the standard real-symmetric
//! embedding `M = A + iB ↦ [[A, −B], [B, A]]` before handoff, and duals
//! are lifted back with the adjoint map `Z ↦ (Z11+Z22) + i(Z21−Z12)`,
//! which makes the complex KKT stationarity identity hold with unit
//! coefficients alongside the scalar-cone duals.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use crate::hermitian::{C64, CMatrix, HermitianMatrix};

use super::expr::LinExpr;
use super::{ConeBlock, ConicProblem, SdpError};

/// Backend-agnostic solver knobs.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    pub max_iter: u32,
    pub tol_gap_abs: f64,
    pub tol_gap_rel: f64,
    pub tol_feas: f64,
    pub verbose: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol_gap_abs: 1e-9,
            tol_gap_rel: 1e-9,
            tol_feas: 1e-9,
            verbose: false,
        }
    }
}

/// Terminal status of a conic solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendStatus {
    Solved,
    AlmostSolved,
    PrimalInfeasible,
    DualInfeasible,
    NumericalTrouble,
}

/// Raw backend output: primal vector plus one dual slice per cone block,
/// in the block order of the problem.
#[derive(Debug, Clone)]
pub struct BackendSolution {
    pub status: BackendStatus,
    pub x: Vec<f64>,
    pub block_duals: Vec<Vec<f64>>,
    pub obj_val: f64,
    pub iterations: u32,
    pub solve_time_s: f64,
}

/// Contract every conic backend must satisfy.
pub trait ConicBackend: Send + Sync {
    fn name(&self) -> &'static str;
    /// Whether dual multipliers per cone are returned. Backends answering
    /// `false` are rejected when the dual certificate is required.
    fn provides_duals(&self) -> bool;
    fn solve(
        &self,
        problem: &ConicProblem,
        settings: &SolverSettings,
    ) -> Result<BackendSolution, SdpError>;
}

/// Number of svec scalars of a real symmetric matrix of size `d`.
pub fn tri_len(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Real dimension of the embedded PSD cone for a complex block of size m.
pub fn embedded_rows(m: usize) -> usize {
    tri_len(2 * m)
}

/// svec rows (upper triangle, column-major, off-diagonal × √2) of the
/// real embedding of a complex Hermitian affine block.
pub fn embedded_svec_rows(block: &super::expr::AffineHermitian) -> Vec<LinExpr> {
    let m = block.dim;
    let d = 2 * m;
    let r2 = std::f64::consts::SQRT_2;
    let mut rows = Vec::with_capacity(tri_len(d));
    // embedded entry (p, q): [[Re, −Im], [Im, Re]]
    let t_entry = |p: usize, q: usize| -> LinExpr {
        match (p < m, q < m) {
            (true, true) => block.entry(p, q).re,
            (true, false) => block.entry(p, q - m).im.scaled(-1.0),
            (false, true) => block.entry(p - m, q).im,
            (false, false) => block.entry(p - m, q - m).re,
        }
    };
    for q in 0..d {
        for p in 0..=q {
            let e = t_entry(p, q);
            rows.push(if p == q { e } else { e.scaled(r2) });
        }
    }
    rows
}

/// Unpack a PSD-cone dual slice (svec of the embedded matrix) and lift
/// it to a complex Hermitian multiplier.
pub fn lift_embedded_dual(z: &[f64], m: usize) -> HermitianMatrix {
    let d = 2 * m;
    debug_assert_eq!(z.len(), tri_len(d));
    let inv_r2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut zmat = nalgebra::DMatrix::<f64>::zeros(d, d);
    let mut idx = 0;
    for q in 0..d {
        for p in 0..=q {
            let v = if p == q { z[idx] } else { z[idx] * inv_r2 };
            zmat[(p, q)] = v;
            zmat[(q, p)] = v;
            idx += 1;
        }
    }
    let mut out = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let re = zmat[(i, j)] + zmat[(m + i, m + j)];
            let im = zmat[(m + i, j)] - zmat[(i, m + j)];
            out[(i, j)] = C64::new(re, im);
        }
    }
    HermitianMatrix::symmetrize(out)
}

/// Rows occupied by one cone block after lowering.
pub fn block_rows(block: &ConeBlock) -> usize {
    match block {
        ConeBlock::Zero(rows) | ConeBlock::Nonneg(rows) | ConeBlock::Soc(rows) => rows.len(),
        ConeBlock::Psd(aff) => embedded_rows(aff.dim),
    }
}

/// Lowered standard-form data `min qᵀx  s.t.  Ax + s = b, s ∈ K`,
/// kept in triplet form plus the cone list.
pub struct LoweredProblem {
    pub num_vars: usize,
    pub num_rows: usize,
    pub q: Vec<f64>,
    pub a_rows: Vec<usize>,
    pub a_cols: Vec<usize>,
    pub a_vals: Vec<f64>,
    pub b: Vec<f64>,
    pub cones: Vec<ConeSpec>,
}

/// Backend-agnostic cone descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeSpec {
    Zero(usize),
    Nonneg(usize),
    Soc(usize),
    PsdTriangle(usize),
}

/// Lower the structured problem: every affine row `expr` becomes
/// `s_r = expr(x)` via `A[r, i] = −coeff_i`, `b[r] = constant`.
pub fn lower(problem: &ConicProblem) -> LoweredProblem {
    let n = problem.num_vars;
    let mut q = vec![0.0; n];
    for &(i, c) in &problem.objective {
        q[i] += c;
    }
    let mut a_rows = Vec::new();
    let mut a_cols = Vec::new();
    let mut a_vals = Vec::new();
    let mut b = Vec::new();
    let mut cones = Vec::new();
    let mut row = 0usize;
    let mut push_row = |expr: &LinExpr, row: usize, a_rows: &mut Vec<usize>, a_cols: &mut Vec<usize>, a_vals: &mut Vec<f64>, b: &mut Vec<f64>| {
        for (i, c) in expr.compressed(n) {
            a_rows.push(row);
            a_cols.push(i);
            a_vals.push(-c);
        }
        b.push(expr.constant);
    };
    for (_, block) in &problem.blocks {
        match block {
            ConeBlock::Zero(rows) => {
                for e in rows {
                    push_row(e, row, &mut a_rows, &mut a_cols, &mut a_vals, &mut b);
                    row += 1;
                }
                cones.push(ConeSpec::Zero(rows.len()));
            }
            ConeBlock::Nonneg(rows) => {
                for e in rows {
                    push_row(e, row, &mut a_rows, &mut a_cols, &mut a_vals, &mut b);
                    row += 1;
                }
                cones.push(ConeSpec::Nonneg(rows.len()));
            }
            ConeBlock::Soc(rows) => {
                for e in rows {
                    push_row(e, row, &mut a_rows, &mut a_cols, &mut a_vals, &mut b);
                    row += 1;
                }
                cones.push(ConeSpec::Soc(rows.len()));
            }
            ConeBlock::Psd(aff) => {
                for e in embedded_svec_rows(aff) {
                    push_row(&e, row, &mut a_rows, &mut a_cols, &mut a_vals, &mut b);
                    row += 1;
                }
                cones.push(ConeSpec::PsdTriangle(2 * aff.dim));
            }
        }
    }
    LoweredProblem {
        num_vars: n,
        num_rows: row,
        q,
        a_rows,
        a_cols,
        a_vals,
        b,
        cones,
    }
}

/// Pure-Rust interior-point backend.
#[derive(Debug, Default, Clone)]
pub struct ClarabelBackend;

impl ConicBackend for ClarabelBackend {
    fn name(&self) -> &'static str {
        "clarabel"
    }

    fn provides_duals(&self) -> bool {
        true
    }

    fn solve(
        &self,
        problem: &ConicProblem,
        settings: &SolverSettings,
    ) -> Result<BackendSolution, SdpError> {
        let low = lower(problem);
        let p = CscMatrix::<f64>::zeros((low.num_vars, low.num_vars));
        let a = CscMatrix::new_from_triplets(
            low.num_rows,
            low.num_vars,
            low.a_rows.clone(),
            low.a_cols.clone(),
            low.a_vals.clone(),
        );
        let cones: Vec<SupportedConeT<f64>> = low
            .cones
            .iter()
            .map(|c| match *c {
                ConeSpec::Zero(d) => SupportedConeT::ZeroConeT(d),
                ConeSpec::Nonneg(d) => SupportedConeT::NonnegativeConeT(d),
                ConeSpec::Soc(d) => SupportedConeT::SecondOrderConeT(d),
                ConeSpec::PsdTriangle(d) => SupportedConeT::PSDTriangleConeT(d),
            })
            .collect();
        // chordal decomposition is disabled: the embedded Hermitian
        // blocks carry structural zeros that would be split into
        // cliques, and the rank-one recovery needs the dual of the
        // whole cone, not a re-assembled one
        let clarabel_settings = DefaultSettingsBuilder::default()
            .verbose(settings.verbose)
            .max_iter(settings.max_iter)
            .tol_gap_abs(settings.tol_gap_abs)
            .tol_gap_rel(settings.tol_gap_rel)
            .tol_feas(settings.tol_feas)
            .chordal_decomposition_enable(false)
            .build()
            .map_err(|e| SdpError::Backend(format!("settings: {e}")))?;
        let mut solver = DefaultSolver::new(&p, &low.q, &a, &low.b, &cones, clarabel_settings)
            .map_err(|e| SdpError::Backend(format!("setup: {e:?}")))?;
        solver.solve();
        let sol = &solver.solution;
        let status = match sol.status {
            SolverStatus::Solved => BackendStatus::Solved,
            SolverStatus::AlmostSolved => BackendStatus::AlmostSolved,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                BackendStatus::PrimalInfeasible
            }
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
                BackendStatus::DualInfeasible
            }
            _ => BackendStatus::NumericalTrouble,
        };
        // split the dual vector per cone block
        let mut block_duals = Vec::with_capacity(low.cones.len());
        let mut offset = 0usize;
        for c in &low.cones {
            let d = match *c {
                ConeSpec::Zero(d) | ConeSpec::Nonneg(d) | ConeSpec::Soc(d) => d,
                ConeSpec::PsdTriangle(d) => tri_len(d),
            };
            block_duals.push(sol.z[offset..offset + d].to_vec());
            offset += d;
        }
        Ok(BackendSolution {
            status,
            x: sol.x.clone(),
            block_duals,
            obj_val: sol.obj_val,
            iterations: sol.iterations,
            solve_time_s: sol.solve_time,
        })
    }
}

/// Text dump of the lowered problem: one header line, then per cone a
/// section with its `b` segment and `A` triplets. Intended for
/// cross-solver regression.
pub fn write_problem_text(
    problem: &ConicProblem,
    out: &mut dyn std::io::Write,
) -> std::io::Result<()> {
    let low = lower(problem);
    writeln!(out, "conic-problem vars={} rows={}", low.num_vars, low.num_rows)?;
    writeln!(out, "objective")?;
    for (i, v) in low.q.iter().enumerate() {
        if *v != 0.0 {
            writeln!(out, "  {} {:.17e}", i, v)?;
        }
    }
    // group triplets by row
    let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); low.num_rows];
    for ((&r, &c), &v) in low.a_rows.iter().zip(&low.a_cols).zip(&low.a_vals) {
        per_row[r].push((c, v));
    }
    let mut row = 0usize;
    for cone in &low.cones {
        let (name, dim, rows) = match *cone {
            ConeSpec::Zero(d) => ("zero", d, d),
            ConeSpec::Nonneg(d) => ("nonneg", d, d),
            ConeSpec::Soc(d) => ("soc", d, d),
            ConeSpec::PsdTriangle(d) => ("psd-triangle", d, tri_len(d)),
        };
        writeln!(out, "cone {name} dim={dim}")?;
        for _ in 0..rows {
            write!(out, "  b {:.17e} |", low.b[row])?;
            for (c, v) in &per_row[row] {
                write!(out, " {}:{:.17e}", c, v)?;
            }
            writeln!(out)?;
            row += 1;
        }
    }
    Ok(())
}
