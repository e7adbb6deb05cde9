//! Sparse affine expressions over the real decision vector, and affine
//! complex Hermitian matrices built from them.
//!
//! A Hermitian matrix variable of size n occupies n² real scalars:
//! the n diagonal entries first, then (re, im) pairs of the strict upper
//! triangle in column-major order.

use crate::hermitian::{C64, CVector, HermitianMatrix};

/// `constant + Σ coeff·x_i`. Terms may repeat; consumers accumulate.
#[derive(Debug, Clone, Default)]
pub struct LinExpr {
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl LinExpr {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn var(i: usize) -> Self {
        Self {
            constant: 0.0,
            terms: vec![(i, 1.0)],
        }
    }

    pub fn term(i: usize, coeff: f64) -> Self {
        Self {
            constant: 0.0,
            terms: vec![(i, coeff)],
        }
    }

    pub fn add_term(&mut self, i: usize, coeff: f64) {
        if coeff != 0.0 {
            self.terms.push((i, coeff));
        }
    }

    pub fn add_const(&mut self, c: f64) {
        self.constant += c;
    }

    pub fn add(&mut self, other: &LinExpr) {
        self.constant += other.constant;
        self.terms.extend_from_slice(&other.terms);
    }

    pub fn add_scaled(&mut self, other: &LinExpr, s: f64) {
        if s == 0.0 {
            return;
        }
        self.constant += s * other.constant;
        for &(i, c) in &other.terms {
            self.terms.push((i, s * c));
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = LinExpr::constant(s * self.constant);
        for &(i, c) in &self.terms {
            out.terms.push((i, s * c));
        }
        out
    }

    pub fn minus(&self, other: &LinExpr) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>()
    }

    /// Accumulate coefficients per variable (duplicates merged).
    pub fn compressed(&self, num_vars: usize) -> Vec<(usize, f64)> {
        let mut dense = vec![0.0f64; num_vars];
        for &(i, c) in &self.terms {
            dense[i] += c;
        }
        dense
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c != 0.0)
            .collect()
    }
}

/// Affine complex scalar: independent real and imaginary parts.
#[derive(Debug, Clone, Default)]
pub struct AffComplex {
    pub re: LinExpr,
    pub im: LinExpr,
}

impl AffComplex {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(z: C64) -> Self {
        Self {
            re: LinExpr::constant(z.re),
            im: LinExpr::constant(z.im),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.scaled(-1.0),
        }
    }

    pub fn add(&mut self, other: &AffComplex) {
        self.re.add(&other.re);
        self.im.add(&other.im);
    }

    /// Accumulate `z · other`.
    pub fn add_mul(&mut self, other: &AffComplex, z: C64) {
        self.re.add_scaled(&other.re, z.re);
        self.re.add_scaled(&other.im, -z.im);
        self.im.add_scaled(&other.re, z.im);
        self.im.add_scaled(&other.im, z.re);
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            re: self.re.scaled(s),
            im: self.im.scaled(s),
        }
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        C64::new(self.re.eval(x), self.im.eval(x))
    }
}

/// Handle to a Hermitian matrix variable block inside the decision
/// vector.
#[derive(Debug, Clone, Copy)]
pub struct HermVar {
    pub start: usize,
    pub n: usize,
}

impl HermVar {
    pub fn num_scalars(&self) -> usize {
        self.n * self.n
    }

    fn upper_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        // strict upper triangle, column-major
        j * (j - 1) / 2 + i
    }

    pub fn diag_var(&self, i: usize) -> usize {
        self.start + i
    }

    pub fn re_var(&self, i: usize, j: usize) -> usize {
        self.start + self.n + 2 * self.upper_index(i, j)
    }

    pub fn im_var(&self, i: usize, j: usize) -> usize {
        self.re_var(i, j) + 1
    }

    /// Affine accessor for entry `(i, j)`; the lower triangle is the
    /// conjugate of the upper.
    pub fn entry(&self, i: usize, j: usize) -> AffComplex {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => AffComplex {
                re: LinExpr::var(self.diag_var(i)),
                im: LinExpr::default(),
            },
            Ordering::Less => AffComplex {
                re: LinExpr::var(self.re_var(i, j)),
                im: LinExpr::var(self.im_var(i, j)),
            },
            Ordering::Greater => AffComplex {
                re: LinExpr::var(self.re_var(j, i)),
                im: LinExpr::term(self.im_var(j, i), -1.0),
            },
        }
    }

    /// Write a matrix value into the decision vector (inverse of
    /// [`HermVar::extract`]).
    pub fn store(&self, m: &HermitianMatrix, x: &mut [f64]) {
        debug_assert_eq!(m.dim(), self.n);
        for i in 0..self.n {
            x[self.diag_var(i)] = m.matrix()[(i, i)].re;
            for j in (i + 1)..self.n {
                x[self.re_var(i, j)] = m.matrix()[(i, j)].re;
                x[self.im_var(i, j)] = m.matrix()[(i, j)].im;
            }
        }
    }

    /// Reconstruct the matrix value from a solved decision vector.
    pub fn extract(&self, x: &[f64]) -> HermitianMatrix {
        let mut m = crate::hermitian::CMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            m[(i, i)] = C64::new(x[self.diag_var(i)], 0.0);
            for j in (i + 1)..self.n {
                let z = C64::new(x[self.re_var(i, j)], x[self.im_var(i, j)]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianMatrix::symmetrize(m)
    }
}

/// The information-covariance block: a free Hermitian variable in the
/// full solve, or a fixed direction times a scalar power in the
/// fixed-beam subproblems.
#[derive(Debug, Clone)]
pub enum WRepr {
    Free(HermVar),
    Scaled {
        dir: HermitianMatrix,
        power_var: usize,
    },
}

impl WRepr {
    pub fn dim(&self) -> usize {
        match self {
            WRepr::Free(h) => h.n,
            WRepr::Scaled { dir, .. } => dir.dim(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> AffComplex {
        match self {
            WRepr::Free(h) => h.entry(i, j),
            WRepr::Scaled { dir, power_var } => {
                let d = dir.matrix()[(i, j)];
                AffComplex {
                    re: LinExpr::term(*power_var, d.re),
                    im: LinExpr::term(*power_var, d.im),
                }
            }
        }
    }

    pub fn extract(&self, x: &[f64]) -> HermitianMatrix {
        match self {
            WRepr::Free(h) => h.extract(x),
            WRepr::Scaled { dir, power_var } => dir.scale(x[*power_var]),
        }
    }
}

/// `tr(M X)` as an affine expression; real because both are Hermitian.
pub fn lin_trace(m: &HermitianMatrix, x: &WRepr) -> LinExpr {
    let n = m.dim();
    let mut out = LinExpr::default();
    for i in 0..n {
        let e = x.entry(i, i);
        out.add_scaled(&e.re, m.matrix()[(i, i)].re);
        for j in (i + 1)..n {
            let e = x.entry(i, j);
            let mij = m.matrix()[(i, j)];
            out.add_scaled(&e.re, 2.0 * mij.re);
            out.add_scaled(&e.im, 2.0 * mij.im);
        }
    }
    out
}

/// `tr(X)`.
pub fn trace_expr(x: &WRepr) -> LinExpr {
    let n = x.dim();
    let mut out = LinExpr::default();
    for i in 0..n {
        out.add(&x.entry(i, i).re);
    }
    out
}

/// `aᴴ X b` as an affine complex scalar.
pub fn sandwich(x: &WRepr, a: &CVector, b: &CVector) -> AffComplex {
    let n = x.dim();
    let mut out = AffComplex::zero();
    for i in 0..n {
        for j in 0..n {
            let coeff = a[i].conj() * b[j];
            if coeff != C64::new(0.0, 0.0) {
                out.add_mul(&x.entry(i, j), coeff);
            }
        }
    }
    out
}

/// Affine Hermitian matrix stored as its upper triangle (column-major).
#[derive(Debug, Clone)]
pub struct AffineHermitian {
    pub dim: usize,
    /// `entries[tri(i, j)]` for `i <= j`, column-major.
    entries: Vec<AffComplex>,
}

impl AffineHermitian {
    pub fn zero(dim: usize) -> Self {
        let len = dim * (dim + 1) / 2;
        Self {
            dim,
            entries: vec![AffComplex::zero(); len],
        }
    }

    fn tri(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.dim);
        j * (j + 1) / 2 + i
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut AffComplex {
        let idx = self.tri(i, j);
        &mut self.entries[idx]
    }

    pub fn upper(&self, i: usize, j: usize) -> &AffComplex {
        &self.entries[self.tri(i, j)]
    }

    /// Entry with conjugation for the lower triangle.
    pub fn entry(&self, i: usize, j: usize) -> AffComplex {
        if i <= j {
            self.upper(i, j).clone()
        } else {
            self.upper(j, i).conj()
        }
    }

    pub fn eval(&self, x: &[f64]) -> HermitianMatrix {
        let mut m = crate::hermitian::CMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            for i in 0..=j {
                let z = self.upper(i, j).eval(x);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HermitianMatrix::symmetrize(m)
    }
}
