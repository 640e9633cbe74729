//! Test-only dense oracles built from explicit Kronecker products, kept
//! separate from the monomial-action engine in `sim::dense`.

use crate::pauli::PauliOperator;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Generalized X: |j⟩ → |j+1 mod d⟩.
pub fn shift(d: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        m[((j + 1) % d, j)] = c(1.0, 0.0);
    }
    m
}

/// Generalized Z: |j⟩ → e^{2πij/d}|j⟩.
pub fn clock(d: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        m[(j, j)] = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64);
    }
    m
}

fn mat_pow(m: &DMatrix<Complex64>, e: u32) -> DMatrix<Complex64> {
    let mut acc = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..e {
        acc = &acc * m;
    }
    acc
}

/// Dense matrix of an operator via ⊗_s X^{x_s} Z^{z_s} times e^{iπ·phase/d}.
pub fn dense_pauli_kron(op: &PauliOperator) -> DMatrix<Complex64> {
    let d = op.d() as usize;
    let (x, z) = (shift(d), clock(d));
    let mut acc = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for s in 0..op.n_sites() {
        let local = mat_pow(&x, op.x()[s]) * mat_pow(&z, op.z()[s]);
        acc = acc.kronecker(&local);
    }
    acc * Complex64::from_polar(1.0, PI * op.phase() as f64 / d as f64)
}

pub fn mat_approx_eq(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}
