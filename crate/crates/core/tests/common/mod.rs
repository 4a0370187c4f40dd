#![allow(dead_code)]

use lroof::herm::HermitianMatrix;
use lroof::lorentz::LorentzVector;
use lroof::maps::{random_lorentz_positive, LorentzMap};
use lroof::nalgebra::{DMatrix, DVector};
use lroof::num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

/// `x0 = ‖x̄‖ + |N| + 0.05`, strictly inside `L_m`.
pub fn interior_point(m: usize, rng: &mut ChaCha8Rng) -> LorentzVector {
    let mut v: Vec<f64> = (0..m).map(|_| normal(rng)).collect();
    let tail = v[1..].iter().map(|t| t * t).sum::<f64>().sqrt();
    v[0] = tail + normal(rng).abs() + 0.05;
    LorentzVector::new(v).unwrap()
}

pub fn boundary_point(m: usize, rng: &mut ChaCha8Rng) -> LorentzVector {
    let mut v: Vec<f64> = (0..m).map(|_| normal(rng)).collect();
    v[0] = v[1..].iter().map(|t| t * t).sum::<f64>().sqrt();
    LorentzVector::new(v).unwrap()
}

pub fn complex_vector(d: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(d, |_, _| complex_normal(rng))
}

pub fn hermitian(d: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    HermitianMatrix::new((&g + g.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

/// `G G*` with `G` of size `d × rank`.
pub fn psd(d: usize, rank: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = DMatrix::from_fn(d, rank, |_, _| complex_normal(rng));
    HermitianMatrix::identity(rank).congruence(&g)
}

pub fn rank_one(d: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    HermitianMatrix::outer(&complex_vector(d, rng))
}

pub fn pick<T: Copy>(options: &[T], rng: &mut ChaCha8Rng) -> T {
    options[rng.random_range(0..options.len())]
}

/// Map dimensions for ensemble seed `s`: domain `m` and codomain `n` in 3..=6.
pub fn ensemble_dims(seed: u64) -> (usize, usize) {
    (3 + (seed % 4) as usize, 3 + ((seed / 4) % 4) as usize)
}

/// Fifty random Lorentz-positive maps, seeds 0..50, each with ten interior
/// points of its domain.
pub fn ensemble() -> Vec<(u64, LorentzMap, Vec<LorentzVector>)> {
    (0..50)
        .map(|seed| {
            let (m, n) = ensemble_dims(seed);
            let u = random_lorentz_positive(n, m, seed).unwrap();
            let mut r = rng(1000 + seed);
            let points = (0..10).map(|_| interior_point(m, &mut r)).collect();
            (seed, u, points)
        })
        .collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
