//! Convex and concave roofs of `x ↦ c·√P(x)` over cones cut out by a
//! quadratic form `J` of signature `(+, -, .., -)`.
//!
//! With `λ1 >= .. >= λn` the generalized eigenvalues of `P - λJ`, the convex
//! roof (concurrence) is `c·√(P(x) - λ2 J(x))` and the concave roof
//! (I-fidelity) is `c·√(P(x) - λn J(x))`. Both are affine along lines parallel
//! to the corresponding eigenspace, which yields optimal two-point
//! decompositions. The prefactor `c` is 2 for maps and 1 for bipartite
//! matrices, where the forms `Q1`, `Q2` already absorb it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::herm::{
    is_psd, partial_trace_1, partial_trace_2, range_subspace, rank_within, restrict_form, sigma2,
    sigma2_bilinear, BipartiteShape, HermitianMatrix, SubspaceBasis,
};
use crate::lorentz::{
    cone_membership, iso_from_hermitian, iso_to_hermitian, lorentz_form, ConeMembership,
    LorentzVector,
};
use crate::maps::{apply_lorentz, apply_positive, LorentzMap, PositiveMapH};
use crate::pencil::{certified_spectrum, eigenvector_for, PencilSpectrum, SymmetricPencil};
use crate::DEFAULT_TOL;

/// Radicands in `[-RADICAND_TOL·scale, 0)` are rounding noise and clamp to 0.
const RADICAND_TOL: f64 = 1e-9;
/// Radicands this small relative to `|P(x)| + |λJ(x)|` are treated as 0.
const CANCELLATION_TOL: f64 = 1e-12;
const NOISE_FLOOR: f64 = 1e-13;
/// Null-space threshold when extracting eigenspaces for decompositions.
const EIGENSPACE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoofKind {
    /// Convex roof, uses `λ2`.
    Concurrence,
    /// Concave roof, uses the smallest eigenvalue.
    Fidelity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    /// Convex combination of boundary points.
    Convex,
    /// One boundary point plus a nonnegative multiple of an extreme ray.
    Conic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicDecomposition<T> {
    pub parts: Vec<(f64, T)>,
    pub kind: DecompositionKind,
}

#[derive(Debug, Clone)]
pub struct RoofResult<T> {
    pub kind: RoofKind,
    pub value: f64,
    /// The eigenvalue entering the formula; `None` when the pencil was bypassed.
    pub lambda_used: Option<f64>,
    /// `P(x) - λ J(x)` before clamping, in the units of the producing forms.
    pub radicand: f64,
    pub spectrum: Option<PencilSpectrum>,
    pub decomposition: Option<ConicDecomposition<T>>,
}

/// Which quadratic form plays the role of `Q1` for bipartite matrices. All
/// three agree on pure states and give identical roof values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Q1Variant {
    /// `2((tr A)² - tr((tr_1 A)²))`.
    PartialTrace1,
    /// `2((tr A)² - tr((tr_2 A)²))`.
    PartialTrace2,
    /// `<A, (S ⊗ S)(A)>` with `S(A) = tr(A) I - A`.
    UniversalInverter,
}

fn quad(m: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(m * x))
}

fn bilin(m: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    x.dot(&(m * y))
}

impl<T> ConicDecomposition<T> {
    pub fn trivial(point: T) -> Self {
        Self {
            parts: vec![(1.0, point)],
            kind: DecompositionKind::Convex,
        }
    }

    fn map<U>(self, f: impl Fn(T) -> U) -> ConicDecomposition<U> {
        ConicDecomposition {
            parts: self.parts.into_iter().map(|(w, p)| (w, f(p))).collect(),
            kind: self.kind,
        }
    }
}

impl<T> RoofResult<T> {
    fn map_points<U>(self, f: impl Fn(T) -> U) -> RoofResult<U> {
        RoofResult {
            kind: self.kind,
            value: self.value,
            lambda_used: self.lambda_used,
            radicand: self.radicand,
            spectrum: self.spectrum,
            decomposition: self.decomposition.map(|d| d.map(f)),
        }
    }
}

/// Splits an interior `x` along `xhat ∈ ker(P - λJ)` into points with `J = 0`.
///
/// Solves `J(x + t·xhat) = 0`. For `J(xhat) < 0` the roots straddle zero and
/// give a convex pair; for lightlike `xhat` the single root gives a boundary
/// point plus a multiple of the ray through `xhat`.
pub fn optimal_decomposition(
    j: &DMatrix<f64>,
    x: &DVector<f64>,
    xhat: &DVector<f64>,
    tol: f64,
) -> Result<ConicDecomposition<DVector<f64>>> {
    let jn = j.norm().max(f64::MIN_POSITIVE);
    let c = quad(j, x);
    if c <= tol * jn * x.norm_squared() {
        return Ok(ConicDecomposition::trivial(x.clone()));
    }
    let xhat_norm = xhat.norm();
    if xhat_norm == 0.0 {
        return Err(Error::NumericalFailure("zero eigenvector".into()));
    }
    let perp = xhat - x * (x.dot(xhat) / x.norm_squared());
    if perp.norm() <= 1e-9 * xhat_norm {
        return Err(Error::NumericalFailure(
            "eigenvector is parallel to the input".into(),
        ));
    }
    let a = quad(j, xhat);
    let b = bilin(j, xhat, x);
    let a_tol = tol * jn * xhat_norm * xhat_norm;
    if a < -a_tol {
        // a t² + 2 b t + c = 0 with a < 0 < c.
        let disc = (b * b - a * c).sqrt();
        let q = -(b + b.signum() * disc);
        let (r1, r2) = if q == 0.0 {
            let t = (-c / a).sqrt();
            (t, -t)
        } else {
            (q / a, c / q)
        };
        let (t_plus, t_minus) = if r1 > r2 { (r1, r2) } else { (r2, r1) };
        let mu = -t_minus / (t_plus - t_minus);
        let y = x + xhat * t_plus;
        let z = x + xhat * t_minus;
        Ok(ConicDecomposition {
            parts: vec![(mu, y), (1.0 - mu, z)],
            kind: DecompositionKind::Convex,
        })
    } else if a <= a_tol {
        if b.abs() <= tol * jn * xhat_norm * x.norm() {
            return Err(Error::NumericalFailure(
                "lightlike eigenvector is J-orthogonal to the input".into(),
            ));
        }
        let (dir, b) = if b > 0.0 { (xhat.clone(), b) } else { (-xhat, -b) };
        let t_star = -c / (2.0 * b);
        let y = x + &dir * t_star;
        Ok(ConicDecomposition {
            parts: vec![(1.0, y), (-t_star * xhat_norm, dir / xhat_norm)],
            kind: DecompositionKind::Conic,
        })
    } else {
        Err(Error::NumericalFailure(
            "eigenvector lies inside the cone; the pencil hypothesis fails".into(),
        ))
    }
}

/// Picks a decomposition direction inside `span(space)`: the most J-negative
/// direction when one exists, otherwise the lightlike one with the largest
/// `|xhat^T J x|`.
fn select_direction(
    j: &DMatrix<f64>,
    x: &DVector<f64>,
    space: &[DVector<f64>],
) -> DVector<f64> {
    let k = space.len();
    let w = DMatrix::from_columns(space);
    let g = w.transpose() * j * &w;
    let eig = ((&g + g.transpose()) * 0.5).symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let gtol = 1e-9 * j.norm();
    let most_negative = order[0];
    if eig.eigenvalues[most_negative] < -gtol {
        return &w * eig.eigenvectors.column(most_negative);
    }
    order
        .iter()
        .filter(|&&i| eig.eigenvalues[i].abs() <= gtol)
        .map(|&i| &w * eig.eigenvectors.column(i))
        .max_by(|a, b| bilin(j, a, x).abs().total_cmp(&bilin(j, b, x).abs()))
        .unwrap_or_else(|| &w * eig.eigenvectors.column(most_negative))
}

/// Evaluation settings for [`roof_forms`].
#[derive(Debug, Clone, Copy)]
struct FormSettings {
    prefactor: f64,
    tol: f64,
    /// Squared size of the quantities `P` was assembled from. Radicands
    /// below `NOISE_FLOOR` times this are cancellation residue.
    magnitude: f64,
}

/// Shared engine: roof of `prefactor·√P` on the component of `{J >= 0}`
/// containing `x` (and `anchor`, when given).
fn roof_forms(
    p: &DMatrix<f64>,
    j: &DMatrix<f64>,
    x: &DVector<f64>,
    anchor: Option<&DVector<f64>>,
    kind: RoofKind,
    want_decomposition: bool,
    settings: FormSettings,
) -> Result<RoofResult<DVector<f64>>> {
    let FormSettings {
        prefactor,
        tol,
        magnitude,
    } = settings;
    if x.len() != p.nrows() {
        return Err(Error::InvalidShape(format!(
            "input has {} coordinates, forms act on {}",
            x.len(),
            p.nrows()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite input".into()));
    }
    let pencil = SymmetricPencil::new(p.clone(), j.clone())?;
    let jx = quad(j, x);
    let jscale = j.norm() * x.norm_squared();
    if jx < -tol * jscale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidInput(format!(
            "input lies outside the cone (J(x) = {jx:.6e})"
        )));
    }
    if let Some(a) = anchor {
        let side = bilin(j, x, a);
        if side < -tol * (j.norm() * x.norm() * a.norm()).max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidInput(
                "input lies in the opposite cone component".into(),
            ));
        }
    }
    let (spectrum, _) = certified_spectrum(&pencil)?;
    let lambda = match kind {
        RoofKind::Concurrence => spectrum.lambda2(),
        RoofKind::Fidelity => spectrum.lambda_min(),
    };
    let px = quad(p, x);
    let radicand = px - lambda * jx;
    let rscale = (px.abs() + (lambda * jx).abs()).max(1.0);
    if radicand < -RADICAND_TOL * rscale {
        return Err(Error::NumericalFailure(format!(
            "negative radicand {radicand:.6e}; the positivity hypothesis fails"
        )));
    }
    // `P(x)` and `λJ(x)` can cancel exactly (e.g. `P = cJ`), and `P` itself
    // can be pure rounding residue; keep both out of the square root.
    let cancelled = radicand.abs()
        <= CANCELLATION_TOL * (px.abs() + (lambda * jx).abs()) + NOISE_FLOOR * magnitude;
    let value = if cancelled {
        0.0
    } else {
        prefactor * radicand.max(0.0).sqrt()
    };

    let decomposition = if want_decomposition {
        let interior = jx > tol * jscale.max(f64::MIN_POSITIVE);
        if interior {
            let space = eigenvector_for(&pencil, lambda, EIGENSPACE_TOL).or_else(|_| {
                let idx = match kind {
                    RoofKind::Concurrence => 1,
                    RoofKind::Fidelity => spectrum.eigenvectors.len() - 1,
                };
                Ok::<_, Error>(vec![spectrum.eigenvectors[idx].clone()])
            })?;
            let xhat = select_direction(j, x, &space);
            Some(optimal_decomposition(j, x, &xhat, tol)?)
        } else {
            Some(ConicDecomposition::trivial(x.clone()))
        }
    } else {
        None
    };

    Ok(RoofResult {
        kind,
        value,
        lambda_used: Some(lambda),
        radicand,
        spectrum: Some(spectrum),
        decomposition,
    })
}

/// Roof of `2√P` for a general pair of forms. Without an anchor the cone
/// component is the one containing `x`.
pub fn roof_general(
    p: &DMatrix<f64>,
    j: &DMatrix<f64>,
    x: &DVector<f64>,
    kind: RoofKind,
    anchor: Option<&DVector<f64>>,
    want_decomposition: bool,
) -> Result<RoofResult<DVector<f64>>> {
    let settings = FormSettings {
        prefactor: 2.0,
        tol: DEFAULT_TOL,
        magnitude: 0.0,
    };
    roof_forms(p, j, x, anchor, kind, want_decomposition, settings)
}

/// Concurrence or I-fidelity of a Lorentz-positive map at `x ∈ L_m`:
/// `2√(det Υ(x) - λ det x)`.
pub fn roof_lorentz(
    u: &LorentzMap,
    x: &LorentzVector,
    kind: RoofKind,
    want_decomposition: bool,
) -> Result<RoofResult<LorentzVector>> {
    roof_lorentz_with_tol(u, x, kind, want_decomposition, DEFAULT_TOL)
}

pub fn roof_lorentz_with_tol(
    u: &LorentzMap,
    x: &LorentzVector,
    kind: RoofKind,
    want_decomposition: bool,
    tol: f64,
) -> Result<RoofResult<LorentzVector>> {
    let m = u.m();
    if m < 3 {
        return Err(Error::InvalidDimension(format!(
            "roof computations need m >= 3, got {m}"
        )));
    }
    if x.dim() != m {
        return Err(Error::InvalidShape(format!(
            "map expects R^{m}, got R^{}",
            x.dim()
        )));
    }
    if cone_membership(x, tol) == ConeMembership::Outside {
        return Err(Error::InvalidInput("input lies outside the Lorentz cone".into()));
    }
    let p = u.pulled_back_det();
    let j = lorentz_form(m);
    let e0 = LorentzVector::basis(m, 0).into_dvector();
    let settings = FormSettings {
        prefactor: 2.0,
        tol,
        magnitude: apply_lorentz(u, x)?.norm().powi(2),
    };
    let res = roof_forms(&p, &j, x.as_dvector(), Some(&e0), kind, want_decomposition, settings)?;
    Ok(res.map_points(|v| LorentzVector::from_dvector(v).expect("finite point")))
}

fn require_psd(x: &HermitianMatrix, tol: f64) -> Result<()> {
    if !is_psd(x, tol)? {
        return Err(Error::InvalidInput(
            "input matrix is not positive semidefinite".into(),
        ));
    }
    Ok(())
}

fn bypass<T>(kind: RoofKind, value: f64, radicand: f64, point: T, want: bool) -> RoofResult<T> {
    RoofResult {
        kind,
        value,
        lambda_used: None,
        radicand,
        spectrum: None,
        decomposition: want.then(|| ConicDecomposition::trivial(point)),
    }
}

/// `x ↦ σ2(Φ(x))` polarized.
fn pulled_back_sigma2(phi: &PositiveMapH, basis: &[HermitianMatrix]) -> Result<DMatrix<f64>> {
    let images = basis
        .iter()
        .map(|b| apply_positive(phi, b))
        .collect::<Result<Vec<_>>>()?;
    let k = images.len();
    let mut g = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let v = sigma2_bilinear(&images[a], &images[b]);
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    Ok(g)
}

/// Concurrence or I-fidelity of `X ∈ H_+(2)` with respect to a positive map
/// on `H(2)`: `2√(σ2(Φ(X)) - λ det X)` with the pencil taken in the
/// coordinates of the `R^4 ≅ H(2)` isomorphism.
pub fn concurrence_h2(
    phi: &PositiveMapH,
    x: &HermitianMatrix,
    kind: RoofKind,
    want_decomposition: bool,
) -> Result<RoofResult<HermitianMatrix>> {
    concurrence_h2_with_tol(phi, x, kind, want_decomposition, DEFAULT_TOL)
}

pub fn concurrence_h2_with_tol(
    phi: &PositiveMapH,
    x: &HermitianMatrix,
    kind: RoofKind,
    want_decomposition: bool,
    tol: f64,
) -> Result<RoofResult<HermitianMatrix>> {
    if phi.d1() != 2 || x.dim() != 2 {
        return Err(Error::InvalidDimension(
            "concurrence_h2 needs a map on H(2) and a 2x2 input".into(),
        ));
    }
    require_psd(x, tol)?;
    if rank_within(x, tol)? <= 1 {
        let s = sigma2(&apply_positive(phi, x)?);
        return Ok(bypass(kind, 2.0 * s.max(0.0).sqrt(), s, x.clone(), want_decomposition));
    }
    let iso_basis: Vec<HermitianMatrix> = (0..4)
        .map(|k| iso_to_hermitian(&LorentzVector::basis(4, k)).expect("m = 4"))
        .collect();
    let p = pulled_back_sigma2(phi, &iso_basis)?;
    let j = lorentz_form(4);
    let coords = iso_from_hermitian(x)?.into_dvector();
    let e0 = LorentzVector::basis(4, 0).into_dvector();
    let settings = FormSettings {
        prefactor: 2.0,
        tol,
        magnitude: apply_positive(phi, x)?.trace().powi(2),
    };
    let res = roof_forms(&p, &j, &coords, Some(&e0), kind, want_decomposition, settings)?;
    Ok(res.map_points(|v| {
        iso_to_hermitian(&LorentzVector::from_dvector(v).expect("finite")).expect("m = 4")
    }))
}

/// Concurrence or I-fidelity of a rank ≤ 2 matrix with respect to any
/// positive map, through the pencil of `σ2∘Φ` against `σ2` on `U_P`.
pub fn roof_rank2(
    phi: &PositiveMapH,
    x: &HermitianMatrix,
    kind: RoofKind,
    want_decomposition: bool,
) -> Result<RoofResult<HermitianMatrix>> {
    roof_rank2_with_tol(phi, x, kind, want_decomposition, DEFAULT_TOL)
}

pub fn roof_rank2_with_tol(
    phi: &PositiveMapH,
    x: &HermitianMatrix,
    kind: RoofKind,
    want_decomposition: bool,
    tol: f64,
) -> Result<RoofResult<HermitianMatrix>> {
    if x.dim() != phi.d1() {
        return Err(Error::InvalidShape(format!(
            "map expects H({}), got H({})",
            phi.d1(),
            x.dim()
        )));
    }
    require_psd(x, tol)?;
    let rank = rank_within(x, tol)?;
    if rank > 2 {
        return Err(Error::RankTooHigh { rank });
    }
    if rank <= 1 {
        let s = sigma2(&apply_positive(phi, x)?);
        return Ok(bypass(kind, 2.0 * s.max(0.0).sqrt(), s, x.clone(), want_decomposition));
    }
    let basis = range_subspace(x, tol)?;
    let p = pulled_back_sigma2(phi, &basis.up_basis)?;
    let j = restrict_form(sigma2_bilinear, &basis);
    let res = roof_forms(
        &p,
        &j,
        &basis.coordinates(x),
        Some(&basis.anchor()),
        kind,
        want_decomposition,
        FormSettings {
            prefactor: 2.0,
            tol,
            magnitude: apply_positive(phi, x)?.trace().powi(2),
        },
    )?;
    Ok(res.map_points(|v| basis.from_coordinates(v.as_slice())))
}

/// `S_{d1} ⊗ S_{d2}` applied to `a`:
/// `tr(A) I - I ⊗ tr_1 A - tr_2 A ⊗ I + A`.
pub fn universal_inverter_product(
    a: &HermitianMatrix,
    shape: BipartiteShape,
) -> Result<HermitianMatrix> {
    let t1 = partial_trace_1(a, shape)?;
    let t2 = partial_trace_2(a, shape)?;
    let i1 = HermitianMatrix::identity(shape.d1);
    let i2 = HermitianMatrix::identity(shape.d2);
    let id = HermitianMatrix::identity(shape.total()).scale(a.trace());
    Ok(&(&(&id - &i1.kron(&t1)) - &t2.kron(&i2)) + a)
}

/// Symmetric bilinear form of the chosen `Q1` variant.
pub fn q1_bilinear(
    variant: Q1Variant,
    shape: BipartiteShape,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<f64> {
    Ok(match variant {
        Q1Variant::PartialTrace1 => {
            2.0 * (a.trace() * b.trace()
                - partial_trace_1(a, shape)?.inner(&partial_trace_1(b, shape)?))
        }
        Q1Variant::PartialTrace2 => {
            2.0 * (a.trace() * b.trace()
                - partial_trace_2(a, shape)?.inner(&partial_trace_2(b, shape)?))
        }
        Q1Variant::UniversalInverter => a.inner(&universal_inverter_product(b, shape)?),
    })
}

/// `Q2(A) = (tr A)² - tr A²`, polarized.
pub fn q2_bilinear(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    a.trace() * b.trace() - a.inner(b)
}

fn restrict_q1(
    variant: Q1Variant,
    shape: BipartiteShape,
    basis: &SubspaceBasis,
) -> Result<DMatrix<f64>> {
    let mut g = DMatrix::zeros(4, 4);
    for i in 0..4 {
        for k in i..4 {
            let v = q1_bilinear(variant, shape, &basis.up_basis[i], &basis.up_basis[k])?;
            g[(i, k)] = v;
            g[(k, i)] = v;
        }
    }
    Ok(g)
}

/// Concurrence or I-fidelity of a rank ≤ 2 bipartite matrix:
/// `√(Q1(M) - λ Q2(M))` with the pencil `Q1|U_P - λ Q2|U_P`.
pub fn roof_bipartite(
    m: &HermitianMatrix,
    shape: BipartiteShape,
    kind: RoofKind,
    variant: Q1Variant,
    want_decomposition: bool,
) -> Result<RoofResult<HermitianMatrix>> {
    roof_bipartite_with_tol(m, shape, kind, variant, want_decomposition, DEFAULT_TOL)
}

pub fn roof_bipartite_with_tol(
    m: &HermitianMatrix,
    shape: BipartiteShape,
    kind: RoofKind,
    variant: Q1Variant,
    want_decomposition: bool,
    tol: f64,
) -> Result<RoofResult<HermitianMatrix>> {
    if m.dim() != shape.total() {
        return Err(Error::InvalidShape(format!(
            "matrix of size {} does not split as {} ⊗ {}",
            m.dim(),
            shape.d1,
            shape.d2
        )));
    }
    require_psd(m, tol)?;
    let rank = rank_within(m, tol)?;
    if rank > 2 {
        return Err(Error::RankTooHigh { rank });
    }
    if rank <= 1 {
        let q = q1_bilinear(variant, shape, m, m)?;
        return Ok(bypass(kind, q.max(0.0).sqrt(), q, m.clone(), want_decomposition));
    }
    let basis = range_subspace(m, tol)?;
    let p = restrict_q1(variant, shape, &basis)?;
    let j = restrict_form(q2_bilinear, &basis);
    let res = roof_forms(
        &p,
        &j,
        &basis.coordinates(m),
        Some(&basis.anchor()),
        kind,
        want_decomposition,
        FormSettings {
            prefactor: 1.0,
            tol,
            magnitude: m.trace().powi(2),
        },
    )?;
    Ok(res.map_points(|v| basis.from_coordinates(v.as_slice())))
}
