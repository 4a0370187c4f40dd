//! Complex hermitian matrices: σ2, partial traces, spectral queries and the
//! two-dimensional range subspaces used to restrict quadratic forms.
//!
//! Bipartite matrices of shape `d1 ⊗ d2` are stored with the second subsystem
//! contiguous: block `(k, l)` occupies rows `k*d2..(k+1)*d2` and columns
//! `l*d2..(l+1)*d2`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest matrix size accepted anywhere in the crate.
pub const MAX_DIM: usize = 64;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BipartiteShape {
    pub d1: usize,
    pub d2: usize,
}

impl BipartiteShape {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidShape(format!("empty subsystem {d1}x{d2}")));
        }
        Ok(Self { d1, d2 })
    }

    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    fn check(&self, a: &HermitianMatrix) -> Result<()> {
        if a.dim() != self.total() {
            return Err(Error::InvalidShape(format!(
                "matrix of size {} does not split as {} ⊗ {}",
                a.dim(),
                self.d1,
                self.d2
            )));
        }
        Ok(())
    }
}

/// Spectral decomposition with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<DVector<Complex64>>,
}

/// Orthonormal pair spanning a 2-dimensional subspace `P ⊂ C^d`, together
/// with an orthonormal basis of `U_P`, the hermitian matrices with range in `P`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub d: usize,
    pub vectors: [DVector<Complex64>; 2],
    pub up_basis: [HermitianMatrix; 4],
}

impl HermitianMatrix {
    /// Symmetrizes `m` with its conjugate transpose after checking that the
    /// deviation is within `1e-12` relative.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidShape(format!(
                "matrix is not square: {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 || m.nrows() > MAX_DIM {
            return Err(Error::InvalidDimension(format!(
                "matrix size {} outside 1..={MAX_DIM}",
                m.nrows()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let adj = m.adjoint();
        let dev = (&m - &adj).norm();
        let scale = m.norm().max(1.0);
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not hermitian (deviation {dev:.3e})"
            )));
        }
        Ok(Self {
            m: (m + adj) * Complex64::new(0.5, 0.0),
        })
    }

    /// Wraps a matrix that is hermitian by construction.
    pub(crate) fn from_exact(m: DMatrix<Complex64>) -> Self {
        debug_assert!(m.is_square());
        Self { m }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidShape("rows of unequal length".into()));
        }
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_real(&DMatrix::from_row_slice(d, d, &flat))
    }

    pub fn from_parts(re: &DMatrix<f64>, im: &DMatrix<f64>) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(Error::InvalidShape("real and imaginary parts differ in shape".into()));
        }
        Self::new(re.zip_map(im, Complex64::new))
    }

    pub fn zeros(d: usize) -> Self {
        Self::from_exact(DMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        Self::from_exact(DMatrix::identity(d, d))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = DMatrix::zeros(d, d);
        for (k, v) in values.iter().enumerate() {
            m[(k, k)] = Complex64::new(*v, 0.0);
        }
        Self::from_exact(m)
    }

    /// Rank-one projector-like matrix `ξ ξ*`.
    pub fn outer(xi: &DVector<Complex64>) -> Self {
        Self::from_exact(xi * xi.adjoint())
    }

    /// `A ↦ T A T*`, exact for any complex `T`.
    pub fn congruence(&self, t: &DMatrix<Complex64>) -> Self {
        let out = t * &self.m * t.adjoint();
        Self::from_exact((&out + out.adjoint()) * Complex64::new(0.5, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.m.map(|z| z.re)
    }

    pub fn imag_part(&self) -> DMatrix<f64> {
        self.m.map(|z| z.im)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.m[(k, k)].re).sum()
    }

    /// Real Frobenius inner product `Re tr(A* B)`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_exact(&self.m * Complex64::new(s, 0.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_exact(self.m.kronecker(&other.m))
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix::from_exact(&self.m + &rhs.m)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix::from_exact(&self.m - &rhs.m)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

/// Second elementary symmetric function of the eigenvalues.
pub fn sigma2(a: &HermitianMatrix) -> f64 {
    let t = a.trace();
    0.5 * (t * t - a.inner(a))
}

/// Polarization of σ2: `B(A, B) = (tr A tr B - <A, B>) / 2`.
pub fn sigma2_bilinear(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    0.5 * (a.trace() * b.trace() - a.inner(b))
}

/// Traces out the first subsystem: `Σ_k M_kk`, a `d2 × d2` matrix.
pub fn partial_trace_1(m: &HermitianMatrix, shape: BipartiteShape) -> Result<HermitianMatrix> {
    shape.check(m)?;
    let d2 = shape.d2;
    let mut out = DMatrix::zeros(d2, d2);
    for k in 0..shape.d1 {
        out += m.m.view((k * d2, k * d2), (d2, d2));
    }
    Ok(HermitianMatrix::from_exact(out))
}

/// Traces out the second subsystem: entry `(k, l)` is `tr M_kl`.
pub fn partial_trace_2(m: &HermitianMatrix, shape: BipartiteShape) -> Result<HermitianMatrix> {
    shape.check(m)?;
    let (d1, d2) = (shape.d1, shape.d2);
    let out = DMatrix::from_fn(d1, d1, |k, l| {
        (0..d2)
            .map(|j| m.m[(k * d2 + j, l * d2 + j)])
            .sum::<Complex64>()
    });
    Ok(HermitianMatrix::from_exact(out))
}

pub fn eigen_hermitian(a: &HermitianMatrix) -> Result<HermitianEigen> {
    let d = a.dim();
    let eig = a
        .m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 100 * d.max(1) * d.max(1))
        .ok_or_else(|| Error::NumericalFailure("hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    Ok(HermitianEigen {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        eigenvectors: order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect(),
    })
}

fn spectral_scale(a: &HermitianMatrix) -> f64 {
    a.frobenius_norm().max(1.0)
}

pub fn rank_within(a: &HermitianMatrix, tol: f64) -> Result<usize> {
    let cut = tol * spectral_scale(a);
    Ok(eigen_hermitian(a)?
        .eigenvalues
        .iter()
        .filter(|mu| mu.abs() > cut)
        .count())
}

pub fn is_psd(a: &HermitianMatrix, tol: f64) -> Result<bool> {
    let eig = eigen_hermitian(a)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    Ok(min >= -tol * spectral_scale(a))
}

/// Orthonormal basis of `H(d)`: `E_kk`, then for `k < l` the pairs
/// `(E_kl + E_lk)/√2` and `i(E_kl - E_lk)/√2`, in lexicographic order.
pub fn orthonormal_basis(d: usize) -> Vec<HermitianMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut m = DMatrix::zeros(d, d);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        out.push(HermitianMatrix::from_exact(m));
    }
    for k in 0..d {
        for l in (k + 1)..d {
            let mut s = DMatrix::zeros(d, d);
            s[(k, l)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            s[(l, k)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            out.push(HermitianMatrix::from_exact(s));
            let mut a = DMatrix::zeros(d, d);
            a[(k, l)] = Complex64::new(0.0, FRAC_1_SQRT_2);
            a[(l, k)] = Complex64::new(0.0, -FRAC_1_SQRT_2);
            out.push(HermitianMatrix::from_exact(a));
        }
    }
    out
}

/// Coordinates of `a` in [`orthonormal_basis`].
pub fn basis_coordinates(a: &HermitianMatrix) -> DVector<f64> {
    let d = a.dim();
    let mut c = Vec::with_capacity(d * d);
    for k in 0..d {
        c.push(a.m[(k, k)].re);
    }
    for k in 0..d {
        for l in (k + 1)..d {
            let z = a.m[(k, l)];
            c.push(std::f64::consts::SQRT_2 * z.re);
            c.push(std::f64::consts::SQRT_2 * z.im);
        }
    }
    DVector::from_vec(c)
}

/// Inverse of [`basis_coordinates`].
pub fn from_basis_coordinates(d: usize, c: &[f64]) -> Result<HermitianMatrix> {
    if c.len() != d * d {
        return Err(Error::InvalidShape(format!(
            "{} coordinates cannot describe H({d})",
            c.len()
        )));
    }
    let mut m = DMatrix::zeros(d, d);
    for k in 0..d {
        m[(k, k)] = Complex64::new(c[k], 0.0);
    }
    let mut idx = d;
    for k in 0..d {
        for l in (k + 1)..d {
            let z = Complex64::new(c[idx], c[idx + 1]) * FRAC_1_SQRT_2;
            m[(k, l)] = z;
            m[(l, k)] = z.conj();
            idx += 2;
        }
    }
    Ok(HermitianMatrix::from_exact(m))
}

/// `S_d(A) = tr(A) I - A`.
pub fn universal_inverter(a: &HermitianMatrix) -> HermitianMatrix {
    &HermitianMatrix::identity(a.dim()).scale(a.trace()) - a
}

impl SubspaceBasis {
    /// Builds the basis of `U_P` from an orthonormal pair `(u, v)`.
    pub fn from_pair(u: DVector<Complex64>, v: DVector<Complex64>) -> Self {
        let d = u.len();
        let uv = &u * v.adjoint();
        let vu = &v * u.adjoint();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let ih = Complex64::new(0.0, FRAC_1_SQRT_2);
        let up_basis = [
            HermitianMatrix::outer(&u),
            HermitianMatrix::outer(&v),
            HermitianMatrix::from_exact((&uv + &vu) * h),
            HermitianMatrix::from_exact((&uv - &vu) * ih),
        ];
        Self {
            d,
            vectors: [u, v],
            up_basis,
        }
    }

    /// Coordinates `<M_i, X>` of `x` in the `U_P` basis.
    pub fn coordinates(&self, x: &HermitianMatrix) -> DVector<f64> {
        DVector::from_iterator(4, self.up_basis.iter().map(|b| b.inner(x)))
    }

    pub fn from_coordinates(&self, c: &[f64]) -> HermitianMatrix {
        let mut m = DMatrix::zeros(self.d, self.d);
        for (b, ci) in self.up_basis.iter().zip(c) {
            m += &b.m * Complex64::new(*ci, 0.0);
        }
        HermitianMatrix::from_exact(m)
    }

    /// Coordinates of the projector onto `P`; lies inside the PSD component.
    pub fn anchor(&self) -> DVector<f64> {
        DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0])
    }
}

/// A 2-dimensional subspace containing the range of `x`. Rank-one inputs are
/// padded with the lowest-index canonical vector not parallel to the range.
pub fn range_subspace(x: &HermitianMatrix, tol: f64) -> Result<SubspaceBasis> {
    let d = x.dim();
    if d < 2 {
        return Err(Error::InvalidDimension(
            "a 2-dimensional subspace needs d >= 2".into(),
        ));
    }
    let eig = eigen_hermitian(x)?;
    let cut = tol * spectral_scale(x);
    let mut range: Vec<(f64, DVector<Complex64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors)
        .filter(|(mu, _)| mu.abs() > cut)
        .map(|(mu, v)| (*mu, v))
        .collect();
    if range.len() > 2 {
        return Err(Error::RankTooHigh { rank: range.len() });
    }
    range.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
    let mut vecs: Vec<DVector<Complex64>> = range.into_iter().map(|(_, v)| v).collect();
    for k in 0..d {
        if vecs.len() == 2 {
            break;
        }
        let mut e = DVector::zeros(d);
        e[k] = Complex64::new(1.0, 0.0);
        for v in &vecs {
            let proj = v.dotc(&e);
            e -= v * proj;
        }
        let n = e.norm();
        if n > 1e-6 {
            vecs.push(e / Complex64::new(n, 0.0));
        }
    }
    let v = vecs.pop().expect("two vectors");
    let u = vecs.pop().expect("two vectors");
    Ok(SubspaceBasis::from_pair(u, v))
}

/// Gram matrix of a symmetric bilinear form on the `U_P` basis.
pub fn restrict_form<F>(bilinear: F, basis: &SubspaceBasis) -> DMatrix<f64>
where
    F: Fn(&HermitianMatrix, &HermitianMatrix) -> f64,
{
    let mut g = DMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in i..4 {
            let v = bilinear(&basis.up_basis[i], &basis.up_basis[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> HermitianMatrix {
        let s = FRAC_1_SQRT_2;
        let xi = DVector::from_vec(vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ]);
        HermitianMatrix::outer(&xi)
    }

    fn close(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() <= tol
    }

    #[test]
    fn construction_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(HermitianMatrix::new(m), Err(Error::InvalidInput(_))));
        let rect = DMatrix::<Complex64>::zeros(2, 3);
        assert!(matches!(HermitianMatrix::new(rect), Err(Error::InvalidShape(_))));
        assert!(HermitianMatrix::new(DMatrix::zeros(65, 65)).is_err());
    }

    #[test]
    fn sigma2_examples() {
        assert_eq!(sigma2(&HermitianMatrix::identity(2)), 1.0);
        assert!((sigma2(&HermitianMatrix::diagonal(&[1.0, 2.0, 3.0])) - 11.0).abs() < 1e-14);
        assert!(sigma2(&bell()).abs() < 1e-15);
    }

    #[test]
    fn partial_trace_examples() {
        let s = BipartiteShape::new(2, 2).unwrap();
        let i4 = HermitianMatrix::identity(4);
        let two_i = HermitianMatrix::identity(2).scale(2.0);
        assert!(close(&partial_trace_1(&i4, s).unwrap(), &two_i, 0.0));
        assert!(close(&partial_trace_2(&i4, s).unwrap(), &two_i, 0.0));
        let half_i = HermitianMatrix::identity(2).scale(0.5);
        assert!(close(&partial_trace_1(&bell(), s).unwrap(), &half_i, 1e-15));
        assert!(close(&partial_trace_2(&bell(), s).unwrap(), &half_i, 1e-15));
        let dg = HermitianMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            partial_trace_1(&dg, s).unwrap(),
            HermitianMatrix::diagonal(&[4.0, 6.0])
        );
        assert_eq!(
            partial_trace_2(&dg, s).unwrap(),
            HermitianMatrix::diagonal(&[3.0, 7.0])
        );
        let bad = BipartiteShape::new(2, 3).unwrap();
        assert!(matches!(partial_trace_1(&i4, bad), Err(Error::InvalidShape(_))));
        assert!(matches!(partial_trace_2(&i4, bad), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn eigen_examples() {
        let e = eigen_hermitian(&HermitianMatrix::diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
        let sx = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = eigen_hermitian(&sx).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-14);
        let e = eigen_hermitian(&HermitianMatrix::identity(5)).unwrap();
        assert!(e.eigenvalues.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn rank_and_psd_examples() {
        assert_eq!(rank_within(&bell(), 1e-9).unwrap(), 1);
        assert!(is_psd(&HermitianMatrix::identity(2), 1e-9).unwrap());
        assert!(!is_psd(&HermitianMatrix::diagonal(&[1.0, -1.0]), 1e-9).unwrap());
    }

    #[test]
    fn orthonormal_basis_examples() {
        let b1 = orthonormal_basis(1);
        assert_eq!(b1, vec![HermitianMatrix::identity(1)]);
        let b2 = orthonormal_basis(2);
        assert_eq!(b2.len(), 4);
        assert_eq!(b2[0], HermitianMatrix::diagonal(&[1.0, 0.0]));
        assert_eq!(b2[1], HermitianMatrix::diagonal(&[0.0, 1.0]));
        for d in 1..5 {
            let b = orthonormal_basis(d);
            assert_eq!(b.len(), d * d);
            for (i, bi) in b.iter().enumerate() {
                for (j, bj) in b.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((bi.inner(bj) - expect).abs() < 1e-15);
                }
                let c = basis_coordinates(bi);
                for (j, cj) in c.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((cj - expect).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn universal_inverter_examples() {
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(universal_inverter(&i2), i2);
        assert_eq!(
            universal_inverter(&HermitianMatrix::diagonal(&[1.0, 0.0])),
            HermitianMatrix::diagonal(&[0.0, 1.0])
        );
        let z = HermitianMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]).unwrap();
        assert_eq!(universal_inverter(&z), z.scale(-1.0));
    }

    fn spans(basis: &SubspaceBasis, v: &DVector<Complex64>) -> bool {
        let mut r = v.clone();
        for u in &basis.vectors {
            let p = u.dotc(v);
            r -= u * p;
        }
        r.norm() < 1e-10
    }

    fn canon(d: usize, k: usize) -> DVector<Complex64> {
        let mut e = DVector::zeros(d);
        e[k] = Complex64::new(1.0, 0.0);
        e
    }

    #[test]
    fn range_subspace_examples() {
        let b = range_subspace(&HermitianMatrix::diagonal(&[1.0, 1.0, 0.0]), 1e-9).unwrap();
        assert!(spans(&b, &canon(3, 0)) && spans(&b, &canon(3, 1)));

        let b = range_subspace(&bell(), 1e-9).unwrap();
        let s = FRAC_1_SQRT_2;
        let xi = DVector::from_vec(vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ]);
        assert!(spans(&b, &xi));
        assert!(b.vectors[1].dotc(&xi).norm() < 1e-12);

        let b = range_subspace(&HermitianMatrix::diagonal(&[0.0, 0.0, 2.0, 3.0]), 1e-9).unwrap();
        assert!(spans(&b, &canon(4, 2)) && spans(&b, &canon(4, 3)));

        let r3 = HermitianMatrix::diagonal(&[1.0, 2.0, 3.0]);
        assert!(matches!(range_subspace(&r3, 1e-9), Err(Error::RankTooHigh { rank: 3 })));
    }

    #[test]
    fn subspace_basis_invariants() {
        let x = HermitianMatrix::from_real_rows(&[
            &[2.0, 1.0, 0.0],
            &[1.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0],
        ])
        .unwrap();
        let b = range_subspace(&x, 1e-9).unwrap();
        assert!((b.vectors[0].dotc(&b.vectors[1])).norm() < 1e-12);
        for (i, mi) in b.up_basis.iter().enumerate() {
            for (j, mj) in b.up_basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((mi.inner(mj) - expect).abs() < 1e-12);
            }
        }
        let back = b.from_coordinates(b.coordinates(&x).as_slice());
        assert!(close(&back, &x, 1e-12));
    }

    #[test]
    fn restrict_form_examples() {
        let b = SubspaceBasis::from_pair(canon(2, 0), canon(2, 1));
        let tr2 = restrict_form(|a, c| a.trace() * c.trace(), &b);
        // (tr A)^2 polarizes to tr A tr B; only uu* and vv* have nonzero trace.
        let mut expect = DMatrix::zeros(4, 4);
        expect[(0, 0)] = 1.0;
        expect[(0, 1)] = 1.0;
        expect[(1, 0)] = 1.0;
        expect[(1, 1)] = 1.0;
        assert!((tr2 - expect).norm() < 1e-15);

        assert_eq!(restrict_form(|_, _| 0.0, &b), DMatrix::zeros(4, 4));
        let g = restrict_form(|a, c| a.inner(c), &b);
        assert!((g - DMatrix::identity(4, 4)).norm() < 1e-15);
    }

    #[test]
    fn sigma2_restriction_has_lorentz_signature() {
        let b = SubspaceBasis::from_pair(canon(3, 0), canon(3, 2));
        let g = restrict_form(sigma2_bilinear, &b);
        let e = g.symmetric_eigen();
        let pos = e.eigenvalues.iter().filter(|v| **v > 1e-12).count();
        let neg = e.eigenvalues.iter().filter(|v| **v < -1e-12).count();
        assert_eq!((pos, neg), (1, 3));
    }
}
