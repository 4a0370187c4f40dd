//! Brute-force search over decompositions into extremal points.
//!
//! Gives upper bounds on the convex roof (the smallest decomposition value
//! found) and lower bounds on the concave roof (the largest). Used to falsify
//! the closed forms; it never certifies optimality.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::herm::{eigen_hermitian, is_psd, rank_within, sigma2, HermitianMatrix};
use crate::maps::{apply_positive, PositiveMapH};
use crate::roof::ConicDecomposition;
use crate::DEFAULT_TOL;

#[derive(Debug, Clone)]
pub struct OracleEstimate<T> {
    /// Smallest decomposition value found; bounds the concurrence from above.
    pub lower_kind_value: f64,
    /// Largest decomposition value found; bounds the I-fidelity from below.
    pub upper_kind_value: f64,
    pub samples: usize,
    /// Witnesses for the two values, in that order.
    pub best_decompositions: (ConicDecomposition<T>, ConicDecomposition<T>),
}

fn quad(m: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(m * x))
}

/// Two-point split of `x` along `v`, if the line crosses `{J = 0}` on both
/// sides of `x`.
fn split_along(
    p: &DMatrix<f64>,
    j: &DMatrix<f64>,
    x: &DVector<f64>,
    jx: f64,
    v: &DVector<f64>,
) -> Option<(f64, ConicDecomposition<DVector<f64>>)> {
    let a = quad(j, v);
    if a >= 0.0 {
        return None;
    }
    let b = v.dot(&(j * x));
    let disc = (b * b - a * jx).sqrt();
    let q = -(b + b.signum() * disc);
    if q == 0.0 {
        return None;
    }
    let (r1, r2) = (q / a, jx / q);
    let (tp, tm) = if r1 > r2 { (r1, r2) } else { (r2, r1) };
    if !(tp > 0.0 && tm < 0.0) {
        return None;
    }
    // Work with the weighted parts `μy` and `(1-μ)z` so that nearly
    // lightlike directions, where `tp` blows up, stay well conditioned.
    let mu = -tm / (tp - tm);
    let wy = x * mu + v * (-tm * tp / (tp - tm));
    let wz = x - &wy;
    let f = |g: &DVector<f64>| 2.0 * quad(p, g).max(0.0).sqrt();
    let value = f(&wy) + f(&wz);
    Some((
        value,
        ConicDecomposition {
            parts: vec![(mu, wy / mu), (1.0 - mu, wz / (1.0 - mu))],
            kind: crate::roof::DecompositionKind::Convex,
        },
    ))
}

fn random_unit(m: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v: DVector<f64> = DVector::from_fn(m, |_, _| StandardNormal.sample(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Hyperspherical angles of a unit vector.
fn to_angles(v: &DVector<f64>) -> Vec<f64> {
    let m = v.len();
    let mut angles = Vec::with_capacity(m - 1);
    for k in 0..m - 1 {
        let tail = v.rows(k + 1, m - k - 1).norm();
        let mut a = tail.atan2(v[k]);
        if k == m - 2 && v[m - 1] < 0.0 {
            a = 2.0 * PI - a;
        }
        angles.push(a);
    }
    angles
}

fn from_angles(angles: &[f64]) -> DVector<f64> {
    let m = angles.len() + 1;
    let mut v = DVector::zeros(m);
    let mut s = 1.0;
    for (k, a) in angles.iter().enumerate() {
        v[k] = s * a.cos();
        s *= a.sin();
    }
    v[m - 1] = s;
    v
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const GOLDEN_STEPS: usize = 24;

/// Golden-section search of `f` on `[lo, hi]`; returns the best point seen.
fn golden_min(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let (mut best_t, mut best_f) = if fc < fd { (c, fc) } else { (d, fd) };
    for _ in 0..GOLDEN_STEPS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
            if fc < best_f {
                best_t = c;
                best_f = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
            if fd < best_f {
                best_t = d;
                best_f = fd;
            }
        }
    }
    (best_t, best_f)
}

/// Coordinate-wise golden-section refinement of an incumbent direction.
/// `sign = 1` minimizes, `sign = -1` maximizes.
fn refine<F>(eval: &mut F, start: &DVector<f64>, start_val: f64, sign: f64, rounds: usize) -> (DVector<f64>, f64)
where
    F: FnMut(&DVector<f64>) -> Option<f64>,
{
    let mut angles = to_angles(start);
    let mut best = sign * start_val;
    let mut width = 0.25;
    for _ in 0..rounds {
        for k in 0..angles.len() {
            let base = angles.clone();
            let mut obj = |t: f64| {
                let mut trial = base.clone();
                trial[k] = t;
                eval(&from_angles(&trial)).map_or(f64::INFINITY, |v| sign * v)
            };
            let (t, fv) = golden_min(&mut obj, base[k] - width, base[k] + width);
            if fv < best {
                best = fv;
                angles[k] = t;
            }
        }
        width *= 0.8;
    }
    (from_angles(&angles), sign * best)
}

/// Random two-point decompositions of `x` inside `{J >= 0}`, then local
/// refinement of the best minimizing and maximizing directions.
pub fn two_point_search(
    p: &DMatrix<f64>,
    j: &DMatrix<f64>,
    x: &DVector<f64>,
    samples: usize,
    seed: u64,
    refine_iters: usize,
) -> Result<OracleEstimate<DVector<f64>>> {
    let m = x.len();
    if p.shape() != (m, m) || j.shape() != (m, m) || m < 2 {
        return Err(Error::InvalidShape("forms and input disagree in size".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sample is required".into()));
    }
    let jx = quad(j, x);
    if jx <= 0.0 {
        return Err(Error::InvalidInput("input is not interior to the cone".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo: Option<(f64, DVector<f64>)> = None;
    let mut hi: Option<(f64, DVector<f64>)> = None;
    for _ in 0..samples {
        let v = random_unit(m, &mut rng);
        if let Some((val, _)) = split_along(p, j, x, jx, &v) {
            if lo.as_ref().is_none_or(|(b, _)| val < *b) {
                lo = Some((val, v.clone()));
            }
            if hi.as_ref().is_none_or(|(b, _)| val > *b) {
                hi = Some((val, v));
            }
        }
    }
    let (lo, hi) = match (lo, hi) {
        (Some(l), Some(h)) => (l, h),
        _ => {
            return Err(Error::InvalidInput(
                "no sampled line produced a two-point decomposition".into(),
            ))
        }
    };
    let mut eval = |v: &DVector<f64>| split_along(p, j, x, jx, v).map(|(val, _)| val);
    let (lo_dir, _) = refine(&mut eval, &lo.1, lo.0, 1.0, refine_iters);
    let (hi_dir, _) = refine(&mut eval, &hi.1, hi.0, -1.0, refine_iters);
    let (lo_val, lo_dec) = split_along(p, j, x, jx, &lo_dir).expect("refined direction is valid");
    let (hi_val, hi_dec) = split_along(p, j, x, jx, &hi_dir).expect("refined direction is valid");
    Ok(OracleEstimate {
        lower_kind_value: lo_val,
        upper_kind_value: hi_val,
        samples,
        best_decompositions: (lo_dec, hi_dec),
    })
}

fn random_isometry(k: usize, r: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(k, r, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    g.qr().q()
}

/// Random decompositions of a rank ≤ 2 matrix `X = Σ w_i w_i*` into `k` pure
/// states, evaluating `Σ 2√σ2(Φ(w_i w_i*))`.
pub fn pure_state_search(
    phi: &PositiveMapH,
    x: &HermitianMatrix,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<OracleEstimate<HermitianMatrix>> {
    if k < 2 {
        return Err(Error::InvalidInput("decompositions need k >= 2 parts".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sample is required".into()));
    }
    if x.dim() != phi.d1() {
        return Err(Error::InvalidShape(format!(
            "map expects H({}), got H({})",
            phi.d1(),
            x.dim()
        )));
    }
    if !is_psd(x, DEFAULT_TOL)? {
        return Err(Error::InvalidInput("input is not positive semidefinite".into()));
    }
    let rank = rank_within(x, DEFAULT_TOL)?;
    if rank > 2 {
        return Err(Error::RankTooHigh { rank });
    }
    let f = |a: &HermitianMatrix| -> Result<f64> {
        Ok(2.0 * sigma2(&apply_positive(phi, a)?).max(0.0).sqrt())
    };
    if rank <= 1 {
        let v = f(x)?;
        let d = ConicDecomposition::trivial(x.clone());
        return Ok(OracleEstimate {
            lower_kind_value: v,
            upper_kind_value: v,
            samples,
            best_decompositions: (d.clone(), d),
        });
    }
    let eig = eigen_hermitian(x)?;
    let w = DMatrix::from_columns(&[
        &eig.eigenvectors[0] * Complex64::new(eig.eigenvalues[0].sqrt(), 0.0),
        &eig.eigenvectors[1] * Complex64::new(eig.eigenvalues[1].max(0.0).sqrt(), 0.0),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = (f64::INFINITY, None);
    let mut hi = (f64::NEG_INFINITY, None);
    for _ in 0..samples {
        // Draw the number of active parts in 2..=k so short decompositions
        // stay well represented.
        let parts = rng.random_range(2..=k);
        let u = random_isometry(parts, 2, &mut rng);
        let vecs: Vec<DVector<Complex64>> = (0..parts)
            .map(|i| &w * u.row(i).transpose())
            .collect();
        let mut total = 0.0;
        for v in &vecs {
            total += f(&HermitianMatrix::outer(v))?;
        }
        if total < lo.0 {
            lo = (total, Some(vecs.clone()));
        }
        if total > hi.0 {
            hi = (total, Some(vecs));
        }
    }
    let to_dec = |vecs: Vec<DVector<Complex64>>| ConicDecomposition {
        parts: vecs
            .into_iter()
            .filter(|v| v.norm() > 0.0)
            .map(|v| {
                let p = v.norm_squared();
                (p, HermitianMatrix::outer(&(v / Complex64::new(p.sqrt(), 0.0))))
            })
            .collect(),
        kind: crate::roof::DecompositionKind::Convex,
    };
    Ok(OracleEstimate {
        lower_kind_value: lo.0,
        upper_kind_value: hi.0,
        samples,
        best_decompositions: (
            to_dec(lo.1.expect("samples > 0")),
            to_dec(hi.1.expect("samples > 0")),
        ),
    })
}
