//! Small dense symmetric matrices, symmetric tridiagonal systems and the
//! inverse-iteration eigensolver used by the spectral probes.
//!
//! The problem sizes here are desk scale: dense matrices are ambient-space
//! Hessians and coefficient matrices (dimension <= 10), tridiagonal systems
//! come from 1-d finite elements (a few thousand unknowns). Direct LDL^T
//! solves keep every code path deterministic.

use crate::error::{Error, Result};
use crate::Real;

/// Dense symmetric matrix stored row-major with full redundancy.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat<F> {
    n: usize,
    data: Vec<F>,
}

impl<F: Real> SymMat<F> {
    pub fn zeros(n: usize) -> Self {
        SymMat { n, data: vec![F::zero(); n * n] }
    }

    pub fn scaled_identity(n: usize, s: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = s;
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, F::one())
    }

    pub fn from_diagonal(d: &[F]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.n + j]
    }

    /// Sets entry `(i, j)` and its mirror.
    pub fn set_sym(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// `self += s * I`.
    pub fn add_scaled_identity(&mut self, s: F) {
        for i in 0..self.n {
            self.data[i * self.n + i] += s;
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &SymMat<F>, s: F) {
        assert_eq!(self.n, other.n);
        for (a, &b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: F) {
        for a in self.data.iter_mut() {
            *a *= s;
        }
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Quadratic form `v^T A v`.
    pub fn quad(&self, v: &[F]) -> F {
        self.mul_vec(v).iter().zip(v.iter()).map(|(&a, &b)| a * b).sum()
    }

    pub fn trace(&self) -> F {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise inner product; for symmetric matrices equals `tr(A B)`.
    pub fn frobenius_inner(&self, other: &SymMat<F>) -> F {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(other.data.iter()).map(|(&a, &b)| a * b).sum()
    }

    /// All eigenvalues in ascending order, by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Vec<F> {
        let n = self.n;
        if n == 1 {
            return vec![self.data[0]];
        }
        let mut a = self.clone();
        let frob: F = self.data.iter().map(|&x| x * x).sum::<F>().sqrt();
        let tol = F::of(1e-15) * (frob + F::one());
        for _sweep in 0..64 {
            let mut off = F::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.get(p, q).abs();
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= tol * F::of(1e-3) {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    let theta = (aqq - app) / (F::of(2.0) * apq);
                    let t = {
                        let s = if theta >= F::zero() { F::one() } else { -F::one() };
                        s / (theta.abs() + (F::one() + theta * theta).sqrt())
                    };
                    let c = F::one() / (F::one() + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set_sym(k, p, c * akp - s * akq);
                        a.set_sym(k, q, s * akp + c * akq);
                    }
                    let app2 = c * c * app - F::of(2.0) * s * c * apq + s * s * aqq;
                    let aqq2 = s * s * app + F::of(2.0) * s * c * apq + c * c * aqq;
                    a.data[p * n + p] = app2;
                    a.data[q * n + q] = aqq2;
                    a.set_sym(p, q, F::zero());
                }
            }
        }
        let mut eig: Vec<F> = (0..n).map(|i| a.get(i, i)).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("non-finite eigenvalue"));
        eig
    }

    /// Spectral norm `max |lambda|`.
    pub fn spectral_norm(&self) -> F {
        self.eigenvalues()
            .into_iter()
            .fold(F::zero(), |m, l| m.max(l.abs()))
    }

    /// Sum of absolute eigenvalues, the trace of the operator modulus.
    pub fn abs_eigenvalue_sum(&self) -> F {
        self.eigenvalues().into_iter().map(|l| l.abs()).sum()
    }

    pub fn min_eigenvalue(&self) -> F {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> F {
        *self.eigenvalues().last().expect("empty matrix")
    }
}

/// Symmetric tridiagonal matrix: `diag` of length n, `off` of length n-1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag<F> {
    pub diag: Vec<F>,
    pub off: Vec<F>,
}

impl<F: Real> SymTridiag<F> {
    pub fn zeros(n: usize) -> Self {
        SymTridiag { diag: vec![F::zero(); n], off: vec![F::zero(); n.saturating_sub(1)] }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        let n = self.n();
        assert_eq!(v.len(), n);
        let mut out = vec![F::zero(); n];
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
        out
    }

    /// Quadratic form `v^T A v`.
    pub fn quad(&self, v: &[F]) -> F {
        self.mul_vec(v).iter().zip(v.iter()).map(|(&a, &b)| a * b).sum()
    }

    pub fn row_sums(&self) -> Vec<F> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i];
                if i > 0 {
                    s += self.off[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i];
                }
                s
            })
            .collect()
    }

    /// LDL^T factorisation for positive definite matrices.
    pub fn ldlt(&self) -> Result<Ldlt<F>> {
        let n = self.n();
        let mut d = vec![F::zero(); n];
        let mut l = vec![F::zero(); n.saturating_sub(1)];
        let mut prev = F::zero();
        for i in 0..n {
            let mut di = self.diag[i];
            if i > 0 {
                di -= l[i - 1] * l[i - 1] * prev;
            }
            if di <= F::zero() || !di.is_finite() {
                return Err(Error::invalid(format!(
                    "matrix is not positive definite (pivot {i} = {:e})",
                    di.to_f64().unwrap_or(f64::NAN)
                )));
            }
            d[i] = di;
            if i + 1 < n {
                l[i] = self.off[i] / di;
            }
            prev = di;
        }
        Ok(Ldlt { d, l })
    }

    /// Number of eigenvalues strictly below `shift`, by Sylvester inertia of
    /// the shifted LDL^T factorisation.
    pub fn eigenvalues_below(&self, shift: F) -> usize {
        let n = self.n();
        let mut count = 0usize;
        let mut prev_d = F::one();
        let mut prev_l = F::zero();
        for i in 0..n {
            let mut di = self.diag[i] - shift;
            if i > 0 {
                di -= prev_l * prev_l * prev_d;
            }
            if di == F::zero() {
                di = F::of(-1e-300);
            }
            if di < F::zero() {
                count += 1;
            }
            if i + 1 < n {
                prev_l = self.off[i] / di;
            }
            prev_d = di;
        }
        count
    }
}

/// LDL^T factors of a symmetric positive definite tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct Ldlt<F> {
    d: Vec<F>,
    l: Vec<F>,
}

impl<F: Real> Ldlt<F> {
    pub fn solve(&self, rhs: &[F]) -> Vec<F> {
        let n = self.d.len();
        assert_eq!(rhs.len(), n);
        let mut y = rhs.to_vec();
        for i in 1..n {
            let c = self.l[i - 1] * y[i - 1];
            y[i] -= c;
        }
        for (yi, di) in y.iter_mut().zip(&self.d) {
            *yi /= *di;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let c = self.l[i] * y[i + 1];
            y[i] -= c;
        }
        y
    }
}

/// Result of an inverse-iteration solve for the smallest pencil eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct PencilEig<F> {
    pub value: F,
    pub iterations: usize,
}

/// Smallest eigenvalue of the pencil `A v = lambda B v` with `B` diagonal
/// positive, by inverse iteration with shift zero.
///
/// `apply_inv_a` must solve `A y = rhs`; `quad_a` must evaluate `v^T A v`.
/// The initial vector is the all-ones vector (the projection onto the
/// constraint space is implicit in the reduced index set), so the iteration
/// is fully deterministic. Convergence is declared when the Rayleigh
/// quotient is stable to `rel_tol` between iterations.
pub fn smallest_pencil_eigenvalue<F: Real>(
    apply_inv_a: impl Fn(&[F]) -> Vec<F>,
    quad_a: impl Fn(&[F]) -> F,
    b_diag: &[F],
    rel_tol: F,
    max_iter: usize,
) -> Result<PencilEig<F>> {
    if b_diag.is_empty() {
        return Err(Error::invalid("empty pencil"));
    }
    smallest_pencil_eigenvalue_general(
        apply_inv_a,
        quad_a,
        |v| v.iter().zip(b_diag).map(|(&x, &b)| x * b).collect(),
        |v| v.iter().zip(b_diag).map(|(&x, &b)| x * x * b).sum(),
        b_diag.len(),
        rel_tol,
        max_iter,
    )
}

/// Inverse iteration for a general symmetric positive `B` given by its
/// matrix-vector product and quadratic form.
pub fn smallest_pencil_eigenvalue_general<F: Real>(
    apply_inv_a: impl Fn(&[F]) -> Vec<F>,
    quad_a: impl Fn(&[F]) -> F,
    b_mul: impl Fn(&[F]) -> Vec<F>,
    b_quad: impl Fn(&[F]) -> F,
    n: usize,
    rel_tol: F,
    max_iter: usize,
) -> Result<PencilEig<F>> {
    if n == 0 {
        return Err(Error::invalid("empty pencil"));
    }
    let mut v = vec![F::one(); n];
    let nv = b_quad(&v).sqrt();
    for x in v.iter_mut() {
        *x /= nv;
    }
    let mut prev = F::nan();
    for it in 1..=max_iter {
        let w = b_mul(&v);
        let mut y = apply_inv_a(&w);
        let ny = b_quad(&y).sqrt();
        if !(ny > F::zero()) || !ny.is_finite() {
            return Err(Error::NoConvergence { iterations: it, residual: f64::NAN });
        }
        for x in y.iter_mut() {
            *x /= ny;
        }
        let rq = quad_a(&y) / b_quad(&y);
        if prev.is_finite() {
            let delta = (rq - prev).abs();
            if delta <= rel_tol * rq.abs() {
                return Ok(PencilEig { value: rq, iterations: it });
            }
        }
        prev = rq;
        v = y;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: prev.to_f64().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiag<f64> {
        let mut t = SymTridiag::zeros(n);
        for i in 0..n {
            t.diag[i] = 2.0;
        }
        for i in 0..n - 1 {
            t.off[i] = -1.0;
        }
        t
    }

    #[test]
    fn ldlt_solves_tridiagonal_system() {
        let t = laplacian(50);
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = t.mul_vec(&x);
        let f = t.ldlt().unwrap();
        let y = f.solve(&b);
        for (xi, yi) in x.iter().zip(y.iter()) {
            assert!((xi - yi).abs() < 1e-10);
        }
    }

    #[test]
    fn ldlt_rejects_indefinite() {
        let mut t = laplacian(5);
        t.diag[2] = -3.0;
        assert!(t.ldlt().is_err());
    }

    #[test]
    fn inertia_counts_eigenvalues() {
        // Eigenvalues of the n-point discrete Laplacian: 2 - 2 cos(k pi / (n+1)).
        let n = 20;
        let t = laplacian(n);
        let lam3 = 2.0 - 2.0 * (3.0 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert_eq!(t.eigenvalues_below(lam3 + 1e-12), 3);
        assert_eq!(t.eigenvalues_below(-1e-12), 0);
    }

    #[test]
    fn jacobi_eigenvalues_match_known_spectrum() {
        let mut m = SymMat::zeros(3);
        m.set_sym(0, 0, 2.0);
        m.set_sym(1, 1, 2.0);
        m.set_sym(2, 2, 2.0);
        m.set_sym(0, 1, -1.0);
        m.set_sym(1, 2, -1.0);
        // Eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2).
        let eig = m.eigenvalues();
        assert!((eig[0] - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!((eig[1] - 2.0).abs() < 1e-12);
        assert!((eig[2] - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn inverse_iteration_finds_smallest_pencil_eigenvalue() {
        let n = 200;
        let t = laplacian(n);
        let b = vec![1.0f64; n];
        let f = t.ldlt().unwrap();
        let out = smallest_pencil_eigenvalue(
            |rhs| f.solve(rhs),
            |v| t.quad(v),
            &b,
            1e-12,
            500,
        )
        .unwrap();
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((out.value - exact).abs() < 1e-12 * exact.abs().max(1.0));
    }
}
