//! Linear maps between cones: Lorentz-positive matrices `R^m -> R^n`,
//! positive maps `H(d1) -> H(d2)` in orthonormal-basis coordinates, and
//! completely positive maps in Kraus form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::herm::{
    basis_coordinates, from_basis_coordinates, orthonormal_basis, BipartiteShape, HermitianMatrix,
    MAX_DIM,
};
use crate::lorentz::{cone_membership, lorentz_form, sample_boundary, ConeMembership, LorentzVector};
use crate::pencil::{generalized_eigenvalues, is_psd_at, SymmetricPencil};

/// `Υ: R^m -> R^n` stored as an `n × m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMap {
    matrix: DMatrix<f64>,
}

/// `Φ: H(d1) -> H(d2)` as a `d2² × d1²` matrix acting on
/// [`orthonormal_basis`] coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveMapH {
    d1: usize,
    d2: usize,
    matrix: DMatrix<f64>,
}

/// `Φ(X) = Σ_k A_k X A_k*` with `d3` operators of shape `d2 × d1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    ops: Vec<DMatrix<Complex64>>,
}

impl LorentzMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::InvalidDimension("empty map".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite map entry".into()));
        }
        Ok(Self { matrix })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            matrix: DMatrix::identity(m, m),
        }
    }

    /// Output dimension.
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Input dimension.
    pub fn m(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `Υ^T J_n Υ`, the quadratic form `x ↦ det Υ(x)`.
    pub fn pulled_back_det(&self) -> DMatrix<f64> {
        self.matrix.transpose() * lorentz_form(self.n()) * &self.matrix
    }
}

pub fn apply_lorentz(u: &LorentzMap, x: &LorentzVector) -> Result<LorentzVector> {
    if x.dim() != u.m() {
        return Err(Error::InvalidShape(format!(
            "map expects R^{}, got R^{}",
            u.m(),
            x.dim()
        )));
    }
    LorentzVector::from_dvector(&u.matrix * x.as_dvector())
}

impl PositiveMapH {
    pub fn new(d1: usize, d2: usize, matrix: DMatrix<f64>) -> Result<Self> {
        if d1 == 0 || d2 == 0 || d1 > MAX_DIM || d2 > MAX_DIM {
            return Err(Error::InvalidDimension(format!("map dimensions {d1} -> {d2}")));
        }
        if matrix.shape() != (d2 * d2, d1 * d1) {
            return Err(Error::InvalidShape(format!(
                "H({d1}) -> H({d2}) needs a {}x{} matrix, got {}x{}",
                d2 * d2,
                d1 * d1,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite map entry".into()));
        }
        Ok(Self { d1, d2, matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d1: d,
            d2: d,
            matrix: DMatrix::identity(d * d, d * d),
        }
    }

    /// Builds the coordinate matrix of an arbitrary linear action on `H(d1)`.
    pub fn from_action<F>(d1: usize, d2: usize, action: F) -> Result<Self>
    where
        F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
    {
        let basis = orthonormal_basis(d1);
        let mut matrix = DMatrix::zeros(d2 * d2, d1 * d1);
        for (j, b) in basis.iter().enumerate() {
            let out = action(b)?;
            if out.dim() != d2 {
                return Err(Error::InvalidShape(format!(
                    "action produced a {0}x{0} matrix, expected {d2}x{d2}",
                    out.dim()
                )));
            }
            matrix.set_column(j, &basis_coordinates(&out));
        }
        Self::new(d1, d2, matrix)
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

pub fn apply_positive(phi: &PositiveMapH, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    if x.dim() != phi.d1 {
        return Err(Error::InvalidShape(format!(
            "map expects H({}), got H({})",
            phi.d1,
            x.dim()
        )));
    }
    let out = &phi.matrix * basis_coordinates(x);
    from_basis_coordinates(phi.d2, out.as_slice())
}

impl KrausMap {
    pub fn new(ops: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidInput("Kraus map needs at least one operator".into()))?;
        let shape = first.shape();
        if shape.0 == 0 || shape.1 == 0 || shape.0 > MAX_DIM || shape.1 > MAX_DIM {
            return Err(Error::InvalidDimension(format!(
                "Kraus operator shape {}x{}",
                shape.0, shape.1
            )));
        }
        if ops.iter().any(|a| a.shape() != shape) {
            return Err(Error::InvalidShape("Kraus operators differ in shape".into()));
        }
        if ops
            .iter()
            .flat_map(|a| a.iter())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite Kraus entry".into()));
        }
        Ok(Self { ops })
    }

    /// Input dimension.
    pub fn d1(&self) -> usize {
        self.ops[0].ncols()
    }

    /// Output dimension.
    pub fn d2(&self) -> usize {
        self.ops[0].nrows()
    }

    /// Number of operators.
    pub fn d3(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[DMatrix<Complex64>] {
        &self.ops
    }

    pub fn apply(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        if x.dim() != self.d1() {
            return Err(Error::InvalidShape(format!(
                "Kraus map expects H({}), got H({})",
                self.d1(),
                x.dim()
            )));
        }
        let mut acc = DMatrix::zeros(self.d2(), self.d2());
        for a in &self.ops {
            acc += a * x.matrix() * a.adjoint();
        }
        let adj = acc.adjoint();
        HermitianMatrix::new((acc + adj) * Complex64::new(0.5, 0.0))
    }

    /// Random operators with i.i.d. complex normal entries.
    pub fn random(d1: usize, d2: usize, d3: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops = (0..d3)
            .map(|_| {
                DMatrix::from_fn(d2, d1, |_, _| {
                    Complex64::new(
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                    )
                })
            })
            .collect();
        Self::new(ops)
    }
}

pub fn from_kraus(k: &KrausMap) -> Result<PositiveMapH> {
    PositiveMapH::from_action(k.d1(), k.d2(), |x| k.apply(x))
}

/// Exchanges output and Kraus indices: `(A'_β)_{γα} = (A_γ)_{βα}`.
pub fn kraus_swap(k: &KrausMap) -> KrausMap {
    let (d1, d2, d3) = (k.d1(), k.d2(), k.d3());
    let ops = (0..d2)
        .map(|beta| DMatrix::from_fn(d3, d1, |gamma, alpha| k.ops[gamma][(beta, alpha)]))
        .collect();
    KrausMap { ops }
}

/// Vertical concatenation `A = [A_1; ..; A_{d3}]`, of size `(d2·d3) × d1`.
pub fn stack(k: &KrausMap) -> DMatrix<Complex64> {
    let (d1, d2) = (k.d1(), k.d2());
    let mut a = DMatrix::zeros(d2 * k.d3(), d1);
    for (g, op) in k.ops.iter().enumerate() {
        a.view_mut((g * d2, 0), (d2, d1)).copy_from(op);
    }
    a
}

/// `A X A*` as a `d3 ⊗ d2` bipartite matrix.
pub fn bipartite_lift(k: &KrausMap, x: &HermitianMatrix) -> Result<(HermitianMatrix, BipartiteShape)> {
    if x.dim() != k.d1() {
        return Err(Error::InvalidShape(format!(
            "Kraus map expects H({}), got H({})",
            k.d1(),
            x.dim()
        )));
    }
    let shape = BipartiteShape::new(k.d3(), k.d2())?;
    Ok((x.congruence(&stack(k)), shape))
}

/// `Φ_L(X) = (√2/2) (tr Φ(X), <Φ(X), M_1>, .., <Φ(X), M_{d2²}>)` as a map
/// from `H(d1)` basis coordinates to `R^{d2²+1}`; `det Φ_L(X) = σ2(Φ(X))`.
pub fn lift_to_lorentz(phi: &PositiveMapH) -> LorentzMap {
    let d2 = phi.d2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cols = phi.matrix.ncols();
    let mut out = DMatrix::zeros(d2 * d2 + 1, cols);
    for j in 0..cols {
        // Only the diagonal units E_kk carry trace.
        let trace: f64 = (0..d2).map(|k| phi.matrix[(k, j)]).sum();
        out[(0, j)] = s * trace;
        for r in 0..d2 * d2 {
            out[(r + 1, j)] = s * phi.matrix[(r, j)];
        }
    }
    LorentzMap { matrix: out }
}

/// Which part of the positivity certificate failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailedStage {
    NonRealSpectrum,
    NoPsdCertificate,
    AnchorOutside,
    BoundaryImage,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PositivityVerdict {
    /// `Υ^T J_n Υ ⪰ λ̂ J_m` with `λ̂ >= 0` and `Υ e0 ∈ L_n`.
    Positive { lambda_hat: f64 },
    NotPositive {
        stage: FailedStage,
        /// A point of `L_m` whose image leaves `L_n`, when one was found.
        witness: Option<LorentzVector>,
    },
}

impl PositivityVerdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, PositivityVerdict::Positive { .. })
    }
}

const WITNESS_SAMPLES: u64 = 1000;

fn image_outside(u: &LorentzMap, x: &LorentzVector, tol: f64) -> bool {
    let y = apply_lorentz(u, x).expect("dimension checked");
    cone_membership(&y, tol) == ConeMembership::Outside
}

fn find_witness(u: &LorentzMap, tol: f64) -> Option<LorentzVector> {
    let m = u.m();
    let e0 = LorentzVector::basis(m, 0);
    if image_outside(u, &e0, tol) {
        return Some(e0);
    }
    for k in 1..m {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; m];
            c[0] = 1.0;
            c[k] = sign;
            let x = LorentzVector::new(c).expect("finite");
            if image_outside(u, &x, tol) {
                return Some(x);
            }
        }
    }
    (0..WITNESS_SAMPLES)
        .map(|seed| sample_boundary(m, seed).expect("m >= 2"))
        .find(|x| image_outside(u, x, tol))
}

/// Decides Lorentz positivity through the S-lemma certificate
/// `Υ^T J_n Υ ⪰ λ̂ J_m`, `λ̂ >= 0`, plus `Υ e0 ∈ L_n`.
pub fn is_lorentz_positive(u: &LorentzMap, tol: f64) -> Result<PositivityVerdict> {
    let (n, m) = (u.n(), u.m());
    if n < 2 || m < 2 {
        return Err(Error::InvalidDimension(format!(
            "positivity test needs n, m >= 2, got n = {n}, m = {m}"
        )));
    }
    let not_positive = |stage| PositivityVerdict::NotPositive {
        stage,
        witness: find_witness(u, tol),
    };

    let anchor = apply_lorentz(u, &LorentzVector::basis(m, 0))?;
    if cone_membership(&anchor, tol) == ConeMembership::Outside {
        return Ok(not_positive(FailedStage::AnchorOutside));
    }

    if m == 2 {
        // L_2 is generated by the two rays (1, ±1).
        for sign in [1.0, -1.0] {
            let x = LorentzVector::new(vec![1.0, sign])?;
            if image_outside(u, &x, tol) {
                return Ok(PositivityVerdict::NotPositive {
                    stage: FailedStage::BoundaryImage,
                    witness: Some(x),
                });
            }
        }
        return Ok(PositivityVerdict::Positive { lambda_hat: 0.0 });
    }

    let p = u.pulled_back_det();
    let j = lorentz_form(m);
    let pencil = SymmetricPencil::new(p.clone(), j.clone())?;
    let spectrum = match generalized_eigenvalues(&pencil) {
        Ok(s) => s,
        Err(Error::HypothesisViolated(_)) => return Ok(not_positive(FailedStage::NonRealSpectrum)),
        Err(e) => return Err(e),
    };
    let (l1, l2) = (spectrum.lambda1(), spectrum.lambda2());
    if l1 < -tol * l1.abs().max(1.0) {
        return Ok(not_positive(FailedStage::NoPsdCertificate));
    }
    let lambda_hat = l2.max(0.0).clamp(l2, l1.max(l2));
    if !is_psd_at(&p, &j, lambda_hat, tol) {
        return Ok(not_positive(FailedStage::NoPsdCertificate));
    }
    Ok(PositivityVerdict::Positive { lambda_hat })
}

/// Random Lorentz-positive map `[[a, b^T], [c, D]]` with
/// `a = (‖b‖ + ‖c‖ + σ_max(D)) / (1 - margin)`, normalized so that `a = 1`.
/// On `L_m` this gives `Υ(x)_0 - ‖Υ(x)_rest‖ >= margin · a · x_0`.
pub fn random_lorentz_positive(n: usize, m: usize, seed: u64) -> Result<LorentzMap> {
    random_lorentz_positive_with_margin(n, m, seed, 0.05)
}

pub fn random_lorentz_positive_with_margin(
    n: usize,
    m: usize,
    seed: u64,
    margin: f64,
) -> Result<LorentzMap> {
    if n < 3 || m < 3 {
        return Err(Error::InvalidDimension(format!(
            "generator needs n, m >= 3, got n = {n}, m = {m}"
        )));
    }
    if !(0.0..1.0).contains(&margin) || margin == 0.0 {
        return Err(Error::InvalidInput(format!("margin {margin} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let b = DVector::from_fn(m - 1, |_, _| draw());
    let c = DVector::from_fn(n - 1, |_, _| draw());
    let d = DMatrix::from_fn(n - 1, m - 1, |_, _| draw());
    let sigma = d.singular_values().max();
    let a = (b.norm() + c.norm() + sigma) / (1.0 - margin);
    let mut u = DMatrix::zeros(n, m);
    u[(0, 0)] = a;
    u.view_mut((0, 1), (1, m - 1)).copy_from(&b.transpose());
    u.view_mut((1, 0), (n - 1, 1)).copy_from(&c);
    u.view_mut((1, 1), (n - 1, m - 1)).copy_from(&d);
    LorentzMap::new(u / a)
}
