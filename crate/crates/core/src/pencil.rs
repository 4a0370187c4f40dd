//! Real symmetric pencils `P - λJ` with `J` of signature `(+, -, .., -)`.
//!
//! When some `P - λ̂J` is positive semidefinite all generalized eigenvalues are
//! real, `P - λJ ⪰ 0` exactly for `λ ∈ [λ2, λ1]`, and for `λ < λ1` any `x` with
//! `x^T (P - λJ) x <= 0` satisfies `x^T J x <= 0`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const SIGNATURE_TOL: f64 = 1e-9;
const REAL_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-8;
/// Relative gap below which computed eigenvalues are treated as one
/// multiple eigenvalue.
const CLUSTER_TOL: f64 = 1e-7;
const SCHUR_EPS: [f64; 3] = [f64::EPSILON, 1e-14, 1e-12];

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPencil {
    p: DMatrix<f64>,
    j: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct PencilSpectrum {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<DVector<f64>>,
    pub max_imag_residual: f64,
}

/// `P - λJ ⪰ 0` holds for `λ ∈ [lambda2, lambda1]`; `certified` records
/// whether this was confirmed at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdInterval {
    pub lambda2: f64,
    pub lambda1: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

fn check_symmetric(name: &str, m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidShape(format!(
            "{name} is not square: {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} has non-finite entries")));
    }
    let dev = (m - m.transpose()).norm();
    if dev > SYMMETRY_TOL * m.norm().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "{name} is not symmetric (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// Smallest eigenvalue of a symmetric matrix.
pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(m)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Counts of positive, negative and zero eigenvalues, relative to `‖S‖_F`.
pub fn signature(s: &DMatrix<f64>) -> Signature {
    let cut = SIGNATURE_TOL * s.norm();
    let ev = symmetric_eigenvalues(&symmetrize(s));
    Signature {
        n_plus: ev.iter().filter(|v| **v > cut).count(),
        n_minus: ev.iter().filter(|v| **v < -cut).count(),
        n_zero: ev.iter().filter(|v| v.abs() <= cut).count(),
    }
}

/// `P - λJ ⪰ 0` up to `tol` relative to `max(1, ‖P - λJ‖)`.
pub fn is_psd_at(p: &DMatrix<f64>, j: &DMatrix<f64>, lambda: f64, tol: f64) -> bool {
    let m = p - j * lambda;
    let scale = m.norm().max(1.0);
    min_eigenvalue(&symmetrize(&m)) >= -tol * scale
}

impl SymmetricPencil {
    pub fn new(p: DMatrix<f64>, j: DMatrix<f64>) -> Result<Self> {
        check_symmetric("P", &p)?;
        check_symmetric("J", &j)?;
        if p.shape() != j.shape() {
            return Err(Error::InvalidShape(format!(
                "P is {}x{} but J is {}x{}",
                p.nrows(),
                p.ncols(),
                j.nrows(),
                j.ncols()
            )));
        }
        let m = p.nrows();
        let sig = signature(&j);
        if sig.n_zero > 0 {
            return Err(Error::InvalidInput("J is singular".into()));
        }
        if sig.n_plus != 1 || sig.n_minus + 1 != m {
            return Err(Error::InvalidInput(format!(
                "J must have signature (+, -, .., -), found {} positive and {} negative",
                sig.n_plus, sig.n_minus
            )));
        }
        Ok(Self {
            p: symmetrize(&p),
            j: symmetrize(&j),
        })
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    /// `‖P‖ + |λ| ‖J‖`, the residual scale at `λ`.
    fn scale_at(&self, lambda: f64) -> f64 {
        self.p.norm() + lambda.abs() * self.j.norm()
    }

    fn shifted(&self, lambda: f64) -> DMatrix<f64> {
        &self.p - &self.j * lambda
    }
}

fn sign_normalize(v: &mut DVector<f64>) {
    if let Some(first) = v.iter().copied().find(|c| c.abs() > 1e-12) {
        if first < 0.0 {
            v.neg_mut();
        }
    }
}

fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Eigenvectors of the symmetric matrix `m` for its `count` eigenvalues of
/// smallest magnitude, orthonormal, sign-normalized and sorted.
fn smallest_modes(m: &DMatrix<f64>, count: usize) -> Vec<(f64, DVector<f64>)> {
    let eig = symmetrize(m).symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()));
    idx.into_iter()
        .take(count)
        .map(|i| {
            let mut v = eig.eigenvectors.column(i).into_owned();
            sign_normalize(&mut v);
            (eig.eigenvalues[i], v)
        })
        .collect()
}

/// Generalized eigenvalues (descending) and eigenvectors of `P - λJ`.
pub fn generalized_eigenvalues(pencil: &SymmetricPencil) -> Result<PencilSpectrum> {
    let m = pencil.dim();
    if m < 3 {
        return Err(Error::InvalidDimension(format!(
            "pencil eigenvalues need m >= 3, got {m}"
        )));
    }
    let j_inv = pencil
        .j
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("J is singular".into()))?;
    let a = &j_inv * &pencil.p;
    // Near-scalar J⁻¹P (e.g. P ≈ cJ) can stall the Francis iteration at a
    // deflation threshold of ε; loosen it step by step.
    let raw = SCHUR_EPS
        .iter()
        .find_map(|eps| a.clone().try_schur(*eps, 10_000))
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?
        .complex_eigenvalues();

    // A multiple eigenvalue of the nonsymmetric J⁻¹P is only resolved to
    // about √ε per copy, while the mean of its cluster stays accurate. Group
    // nearby values, including conjugate pairs split off the real axis, and
    // replace each group by its mean.
    let mut raw: Vec<_> = raw.iter().copied().collect();
    raw.sort_by(|a, b| b.re.total_cmp(&a.re));
    let mut max_imag = 0.0f64;
    let mut values = Vec::with_capacity(m);
    let mut eigenvectors = Vec::with_capacity(m);
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m
            && (raw[end - 1] - raw[end]).norm() <= CLUSTER_TOL * raw[end - 1].norm().max(1.0)
        {
            end += 1;
        }
        let size = end - start;
        let mean = raw[start..end].iter().sum::<nalgebra::Complex<f64>>() / size as f64;
        max_imag = max_imag.max(mean.im.abs());
        if mean.im.abs() > REAL_TOL * mean.re.abs().max(1.0) {
            return Err(Error::HypothesisViolated(format!(
                "non-real generalized eigenvalue {:.6e} {:+.6e}i",
                mean.re, mean.im
            )));
        }
        values.extend(std::iter::repeat_n(mean.re, size));
        let mut modes: Vec<DVector<f64>> = smallest_modes(&pencil.shifted(mean.re), size)
            .into_iter()
            .map(|(_, v)| v)
            .collect();
        modes.sort_by(lex_cmp);
        eigenvectors.extend(modes);
        start = end;
    }

    Ok(PencilSpectrum {
        eigenvalues: values,
        eigenvectors,
        max_imag_residual: max_imag,
    })
}

impl PencilSpectrum {
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda2(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Largest `‖(P - λ_k J) v_k‖ / ((‖P‖ + |λ_k| ‖J‖) ‖v_k‖)` over the spectrum.
    pub fn max_relative_residual(&self, pencil: &SymmetricPencil) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(l, v)| {
                let r = (pencil.shifted(*l) * v).norm();
                r / (pencil.scale_at(*l).max(f64::MIN_POSITIVE) * v.norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn residuals_ok(&self, pencil: &SymmetricPencil) -> bool {
        self.max_relative_residual(pencil) <= RESIDUAL_TOL
    }
}

/// `(λ2, λ1)` with a PSD certificate at their midpoint.
pub fn psd_interval(pencil: &SymmetricPencil, spectrum: &PencilSpectrum) -> PsdInterval {
    let (l1, l2) = (spectrum.lambda1(), spectrum.lambda2());
    let mid = if l1 == l2 { l1 } else { 0.5 * (l1 + l2) };
    PsdInterval {
        lambda2: l2,
        lambda1: l1,
        certified: is_psd_at(&pencil.p, &pencil.j, mid, SIGNATURE_TOL),
    }
}

/// Computes the spectrum and fails unless the PSD interval is certified.
pub fn certified_spectrum(pencil: &SymmetricPencil) -> Result<(PencilSpectrum, PsdInterval)> {
    let spectrum = generalized_eigenvalues(pencil)?;
    let interval = psd_interval(pencil, &spectrum);
    if !interval.certified {
        return Err(Error::HypothesisViolated(format!(
            "P - λJ is not positive semidefinite on [{:.6e}, {:.6e}]",
            interval.lambda2, interval.lambda1
        )));
    }
    Ok((spectrum, interval))
}

/// Orthonormal basis of the null space of `P - λJ`, keeping modes with
/// `|μ| <= tol * (‖P‖ + |λ| ‖J‖)`.
pub fn eigenvector_for(pencil: &SymmetricPencil, lambda: f64, tol: f64) -> Result<Vec<DVector<f64>>> {
    let cut = tol * pencil.scale_at(lambda).max(f64::MIN_POSITIVE);
    let mut out: Vec<DVector<f64>> = smallest_modes(&pencil.shifted(lambda), pencil.dim())
        .into_iter()
        .filter(|(mu, _)| mu.abs() <= cut)
        .map(|(_, v)| v)
        .collect();
    if out.is_empty() {
        return Err(Error::NumericalFailure(format!(
            "P - λJ is regular at λ = {lambda:.6e}"
        )));
    }
    out.sort_by(lex_cmp);
    Ok(out)
}
