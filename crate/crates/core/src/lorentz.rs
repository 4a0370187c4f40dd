//! Spin-factor (Lorentz cone) structure on `R^m`.
//!
//! A vector `x = (x0, x1, .., x_{m-1})` has Jordan eigenvalues `x0 ± ||(x1, ..)||`,
//! trace `2 x0` and determinant `x0^2 - sum x_k^2 = x^T J_m x` with
//! `J_m = diag(1, -1, .., -1)`. The Lorentz cone `L_m` is `{x : x0 >= ||(x1, ..)||}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::herm::HermitianMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct LorentzVector {
    x: DVector<f64>,
}

/// Jordan eigenvalues `lambda_plus >= lambda_minus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanSpectrum {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeMembership {
    Interior,
    Boundary,
    Outside,
}

impl LorentzVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite vector component".into()));
        }
        if components.is_empty() {
            return Err(Error::InvalidDimension("empty vector".into()));
        }
        Ok(Self {
            x: DVector::from_vec(components),
        })
    }

    pub fn from_dvector(x: DVector<f64>) -> Result<Self> {
        Self::new(x.iter().copied().collect())
    }

    /// Standard basis vector `e_k` of `R^m`.
    pub fn basis(m: usize, k: usize) -> Self {
        let mut x = DVector::zeros(m);
        x[k] = 1.0;
        Self { x }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.x.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn into_dvector(self) -> DVector<f64> {
        self.x
    }

    pub fn norm(&self) -> f64 {
        self.x.norm()
    }

    fn radial_norm(&self) -> f64 {
        self.x.rows(1, self.x.len() - 1).norm()
    }

    fn require_jordan_dim(&self) -> Result<()> {
        if self.dim() < 2 {
            return Err(Error::InvalidDimension(format!(
                "Jordan structure needs m >= 2, got {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

pub fn jordan_eigenvalues(x: &LorentzVector) -> Result<JordanSpectrum> {
    x.require_jordan_dim()?;
    let r = x.radial_norm();
    let x0 = x.x[0];
    Ok(JordanSpectrum {
        lambda_plus: x0 + r,
        lambda_minus: x0 - r,
    })
}

pub fn jordan_trace(x: &LorentzVector) -> Result<f64> {
    x.require_jordan_dim()?;
    Ok(2.0 * x.x[0])
}

pub fn jordan_det(x: &LorentzVector) -> Result<f64> {
    x.require_jordan_dim()?;
    let x0 = x.x[0];
    let tail: f64 = x.x.iter().skip(1).map(|v| v * v).sum();
    Ok(x0 * x0 - tail)
}

/// The sign matrix `J_m = diag(1, -1, .., -1)`.
pub fn lorentz_form(m: usize) -> DMatrix<f64> {
    let mut j = DMatrix::from_diagonal_element(m, m, -1.0);
    if m > 0 {
        j[(0, 0)] = 1.0;
    }
    j
}

/// Classifies `x` against `L_m`; the tolerance is scaled by `max(1, ||x||)`.
pub fn cone_membership(x: &LorentzVector, tol: f64) -> ConeMembership {
    if x.dim() < 2 {
        // L_1 is the half-line.
        let v = x.x[0];
        let scale = v.abs().max(1.0);
        return if v > tol * scale {
            ConeMembership::Interior
        } else if v.abs() <= tol * scale {
            ConeMembership::Boundary
        } else {
            ConeMembership::Outside
        };
    }
    let r = x.radial_norm();
    let x0 = x.x[0];
    let scale = x.norm().max(1.0);
    let lambda_minus = x0 - r;
    let lambda_plus = x0 + r;
    if lambda_minus > tol * scale {
        ConeMembership::Interior
    } else if lambda_minus.abs() <= tol * scale && lambda_plus >= 0.0 {
        ConeMembership::Boundary
    } else {
        ConeMembership::Outside
    }
}

/// `I(x) = [[x0 + x1, x2 + i x3], [x2 - i x3, x0 - x1]]`.
pub fn iso_to_hermitian(x: &LorentzVector) -> Result<HermitianMatrix> {
    if x.dim() != 4 {
        return Err(Error::InvalidDimension(format!(
            "the R^4 -> H(2) isomorphism needs m = 4, got {}",
            x.dim()
        )));
    }
    let v = x.as_slice();
    let off = Complex64::new(v[2], v[3]);
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(v[0] + v[1], 0.0),
            off,
            off.conj(),
            Complex64::new(v[0] - v[1], 0.0),
        ],
    );
    Ok(HermitianMatrix::from_exact(m))
}

pub fn iso_from_hermitian(a: &HermitianMatrix) -> Result<LorentzVector> {
    if a.dim() != 2 {
        return Err(Error::InvalidDimension(format!(
            "the H(2) -> R^4 isomorphism needs a 2x2 matrix, got {0}x{0}",
            a.dim()
        )));
    }
    let m = a.matrix();
    let a11 = m[(0, 0)].re;
    let a22 = m[(1, 1)].re;
    let a12 = m[(0, 1)];
    LorentzVector::new(vec![(a11 + a22) / 2.0, (a11 - a22) / 2.0, a12.re, a12.im])
}

/// A point on `∂L_m` with `x0 = 1` and a uniformly random radial unit direction.
pub fn sample_boundary(m: usize, seed: u64) -> Result<LorentzVector> {
    if m < 2 {
        return Err(Error::InvalidDimension(format!("m >= 2 required, got {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let dir: Vec<f64> = (1..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            let mut comps = Vec::with_capacity(m);
            comps.push(1.0);
            comps.extend(dir.iter().map(|v| v / n));
            return LorentzVector::new(comps);
        }
    }
}
