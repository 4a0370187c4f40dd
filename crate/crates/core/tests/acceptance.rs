//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::time::Instant;

use common::*;
use lroof::graphs::table_multiset;
use lroof::herm::{
    basis_coordinates, rank_within, sigma2, BipartiteShape, HermitianMatrix,
};
use lroof::lorentz::{cone_membership, jordan_det, lorentz_form, ConeMembership, LorentzVector};
use lroof::maps::{
    apply_lorentz, apply_positive, bipartite_lift, from_kraus, kraus_swap, lift_to_lorentz,
    KrausMap, LorentzMap, PositiveMapH,
};
use lroof::oracle::two_point_search;
use lroof::pencil::{generalized_eigenvalues, is_psd_at, SymmetricPencil};
use lroof::roof::{
    concurrence_h2, q1_bilinear, roof_bipartite, roof_lorentz, roof_rank2, ConicDecomposition,
    Q1Variant, RoofKind,
};
use rand::Rng;
use rayon::prelude::*;

const KINDS: [RoofKind; 2] = [RoofKind::Concurrence, RoofKind::Fidelity];
const VARIANTS: [Q1Variant; 3] = [
    Q1Variant::PartialTrace1,
    Q1Variant::PartialTrace2,
    Q1Variant::UniversalInverter,
];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

/// Reference rows of the graph table with the grid they were read from.
fn reference_rows() -> Vec<(&'static str, (usize, usize), [f64; 8])> {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    let s6 = 6f64.sqrt();
    let t = 1.0 / 3.0;
    let q = [t, t, -t, -t];
    let h = [2.0 * t, 2.0 * t, -2.0 * t, -2.0 * t];
    let row = |e: [f64; 4], q1: f64, q2: f64, c: f64, f: f64| {
        [e[0], e[1], e[2], e[3], q1, q2, c, f]
    };
    vec![
        ("Ia", (2, 2), row(q, 0.125, 0.375, 0.0, 0.5)),
        ("Ib", (2, 2), row(q, 0.375, 0.375, 0.5, s2 / 2.0)),
        ("Ic", (2, 2), row(q, 5.0 / 18.0, 0.5, t, 2.0 * t)),
        ("II", (2, 2), row([0.0; 4], 0.0, 0.5, 0.0, 0.0)),
        ("III", (2, 2), row([1.0, 1.0, -1.0, -1.0], 0.5, 0.5, 0.0, 1.0)),
        ("IVa", (2, 3), row(h, 0.5, 0.375, 0.5, s3 / 2.0)),
        ("IVb", (2, 3), row(h, 0.75, 0.375, s2 / 2.0, 1.0)),
        ("IVc", (2, 3), row(h, 5.0 / 9.0, 0.5, s2 / 3.0, 2.0 * s2 / 3.0)),
        ("V", (2, 3), row([0.5, 0.5, -0.5, -0.5], 0.25, 0.5, 0.0, s2 / 2.0)),
        ("VI", (2, 3), row([0.75, 0.75, -0.75, -0.75], 0.375, 0.5, 0.0, s3 / 2.0)),
        ("VII", (2, 3), row([0.5, 0.5, -0.5, -0.5], 0.5, 0.5, 0.5, s3 / 2.0)),
        ("VIII", (2, 3), row([0.25, 0.25, -0.25, -0.25], 0.375, 0.5, 0.5, s2 / 2.0)),
        ("IX", (2, 3), row([1.25, -0.25, -0.25, -0.75], 0.625, 0.5, s3 / 2.0, 1.0)),
        ("X", (2, 4), row([1.0, 1.0, -1.0, -1.0], 0.5, 0.5, 0.0, 1.0)),
        ("XI", (2, 4), row([0.5, 0.5, -0.5, -0.5], 0.5, 0.5, 0.5, s3 / 2.0)),
        ("XII", (2, 4), row([1.5, -0.5, -0.5, -0.5], 0.75, 0.5, 1.0, 1.0)),
        ("XIIIa", (3, 3), row([5.0 * t, -t, -t, -1.0], 0.875, 0.375, 1.0, s5 / 2.0)),
        ("XIIIb", (3, 3), row([5.0 * t, -t, -t, -1.0], 5.0 / 6.0, 0.5, 1.0, 2.0 * s3 / 3.0)),
        ("XIV", (3, 3), row([1.0, 1.0, -1.0, -1.0], 0.5, 0.5, 0.0, 1.0)),
        ("XV", (3, 3), row([0.75, 0.75, -0.75, -0.75], 0.625, 0.5, 0.5, 1.0)),
        ("XVI", (3, 3), row([1.5, -0.5, -0.5, -0.5], 0.75, 0.5, 1.0, 1.0)),
        ("XVII", (3, 3), row([1.5, -0.5, -0.5, -0.5], 0.75, 0.5, 1.0, 1.0)),
        ("XVIII", (3, 4), row([1.0, 1.0, -1.0, -1.0], 0.75, 0.5, 0.5, s5 / 2.0)),
        ("XIX", (3, 4), row([1.75, -0.25, -0.75, -0.75], 0.875, 0.5, 1.0, s5 / 2.0)),
        ("XX", (4, 4), row([2.0, 0.0, -1.0, -1.0], 1.0, 0.5, 1.0, s6 / 2.0)),
    ]
}

fn graph_table() -> Outcome {
    let start = Instant::now();
    let grids = [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 4)];
    let rows = reference_rows();
    let mut missing = Vec::new();
    for grid in grids {
        let computed = table_multiset(grid.0, grid.1).expect("table computes");
        for (label, _, expected) in rows.iter().filter(|r| r.1 == grid) {
            let found = computed
                .iter()
                .any(|t| t.iter().zip(expected).all(|(a, b)| (a - b).abs() <= 1e-9));
            if !found {
                missing.push(*label);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        missing.is_empty() && secs < 60.0,
        format!(
            "{} rows checked, missing {:?}, {:.1}s",
            rows.len(),
            missing,
            secs
        ),
    )
}

fn oracle_agreement() -> Outcome {
    let ensemble = ensemble();
    let results: Vec<(f64, f64, bool)> = ensemble
        .par_iter()
        .flat_map_iter(|(seed, u, points)| {
            let p = u.pulled_back_det();
            let j = lorentz_form(u.m());
            points.iter().enumerate().map(move |(k, x)| {
                let c = roof_lorentz(u, x, RoofKind::Concurrence, false).unwrap().value;
                let f = roof_lorentz(u, x, RoofKind::Fidelity, false).unwrap().value;
                let est = two_point_search(&p, &j, x.as_dvector(), 10_000, seed * 100 + k as u64, 64)
                    .unwrap();
                let inside = est.lower_kind_value >= c - 1e-9 && est.upper_kind_value <= f + 1e-9;
                ((est.lower_kind_value - c).abs(), (est.upper_kind_value - f).abs(), inside)
            })
        })
        .collect();
    let worst_c = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let worst_f = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let outside = results.iter().filter(|r| !r.2).count();
    Outcome::new(
        worst_c <= 1e-4 && worst_f <= 1e-4 && outside == 0,
        format!(
            "{} points, max |min - C| = {:.2e}, max |max - F| = {:.2e}, {} outside [C, F]",
            results.len(),
            worst_c,
            worst_f,
            outside
        ),
    )
}

fn pencil_structure() -> Outcome {
    let mut worst_imag = 0.0f64;
    let mut failures = Vec::new();
    for (seed, u, _) in ensemble() {
        let p = u.pulled_back_det();
        let j = lorentz_form(u.m());
        let pencil = SymmetricPencil::new(p.clone(), j.clone()).unwrap();
        let spectrum = match generalized_eigenvalues(&pencil) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        worst_imag = worst_imag.max(spectrum.max_imag_residual);
        let (l1, l2) = (spectrum.lambda1(), spectrum.lambda2());
        let inside = (0..5).all(|k| is_psd_at(&p, &j, l2 + (l1 - l2) * k as f64 / 4.0, 1e-9));
        let delta = 0.01 * (1.0 + l1.abs());
        let outside = !is_psd_at(&p, &j, l2 - delta, 1e-9) && !is_psd_at(&p, &j, l1 + delta, 1e-9);
        if !inside || !outside {
            failures.push(format!("seed {seed}: inside {inside}, outside {outside}"));
        }
    }
    Outcome::new(
        failures.is_empty() && worst_imag <= 1e-8,
        format!("50 pencils, max imag residual {worst_imag:.2e}, failures {failures:?}"),
    )
}

fn lift_identity() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for seed in 0..10_000u64 {
        let d1 = pick(&[1, 2, 3, 4], &mut r);
        let d2 = pick(&[1, 2, 3, 4], &mut r);
        let d3 = pick(&[1, 2, 3], &mut r);
        let phi = from_kraus(&KrausMap::random(d1, d2, d3, seed).unwrap()).unwrap();
        let x = hermitian(d1, &mut r);
        let image = apply_positive(&phi, &x).unwrap();
        let lifted = apply_lorentz(
            &lift_to_lorentz(&phi),
            &LorentzVector::from_dvector(basis_coordinates(&x)).unwrap(),
        )
        .unwrap();
        let scale = image.frobenius_norm().powi(2).max(1.0);
        worst = worst.max((sigma2(&image) - jordan_det(&lifted).unwrap()).abs() / scale);
    }
    Outcome::new(
        worst <= 1e-10,
        format!("10000 samples, max scaled gap {worst:.2e}"),
    )
}

fn phi_prime_equality() -> Outcome {
    let mut r = rng(5);
    let mut worst_swap = 0.0f64;
    let mut worst_bip = 0.0f64;
    for seed in 0..100u64 {
        let d2 = pick(&[2, 3], &mut r);
        let d3 = pick(&[2, 3], &mut r);
        let k = KrausMap::random(2, d2, d3, 500 + seed).unwrap();
        let phi = from_kraus(&k).unwrap();
        let phi_prime = from_kraus(&kraus_swap(&k)).unwrap();
        for _ in 0..10 {
            let x = psd(2, 2, &mut r);
            let (m, shape) = bipartite_lift(&k, &x).unwrap();
            for kind in KINDS {
                let a = concurrence_h2(&phi, &x, kind, false).unwrap().value;
                let b = concurrence_h2(&phi_prime, &x, kind, false).unwrap().value;
                let c = roof_bipartite(&m, shape, kind, Q1Variant::UniversalInverter, false)
                    .unwrap()
                    .value;
                let scale = a.abs().max(1.0);
                worst_swap = worst_swap.max((a - b).abs() / scale);
                worst_bip = worst_bip.max((a - c).abs() / scale);
            }
        }
    }
    Outcome::new(
        worst_swap <= 1e-9 && worst_bip <= 1e-9,
        format!("1000 inputs, max Φ/Φ' gap {worst_swap:.2e}, max bipartite gap {worst_bip:.2e}"),
    )
}

fn lorentz_value(u: &LorentzMap, x: &LorentzVector, kind: RoofKind) -> f64 {
    roof_lorentz(u, x, kind, false).unwrap().value
}

fn convexity() -> Outcome {
    let maps = ensemble();
    let mut r = rng(6);
    let mut midpoint_failures = [0usize; 2];
    for _ in 0..10_000 {
        let (_, u, _) = &maps[r.random_range(0..maps.len())];
        let x = interior_point(u.m(), &mut r);
        let y = interior_point(u.m(), &mut r);
        let mid = LorentzVector::from_dvector((x.as_dvector() + y.as_dvector()) * 0.5).unwrap();
        for (i, kind) in KINDS.into_iter().enumerate() {
            let (vx, vy, vm) = (
                lorentz_value(u, &x, kind),
                lorentz_value(u, &y, kind),
                lorentz_value(u, &mid, kind),
            );
            let avg = 0.5 * (vx + vy);
            let slack = 1e-9 * avg.max(1.0);
            let ok = match kind {
                RoofKind::Concurrence => vm <= avg + slack,
                RoofKind::Fidelity => vm >= avg - slack,
            };
            if !ok {
                midpoint_failures[i] += 1;
            }
        }
    }
    let mut worst_hom = 0.0f64;
    let mut worst_boundary = 0.0f64;
    for _ in 0..1_000 {
        let (_, u, _) = &maps[r.random_range(0..maps.len())];
        let x = interior_point(u.m(), &mut r);
        let t = 0.1 + 9.9 * r.random::<f64>();
        let tx = LorentzVector::from_dvector(x.as_dvector() * t).unwrap();
        for kind in KINDS {
            let v = lorentz_value(u, &x, kind);
            let vt = lorentz_value(u, &tx, kind);
            worst_hom = worst_hom.max((vt - t * v).abs() / (t * v).max(1.0));
        }
        let b = boundary_point(u.m(), &mut r);
        let direct = 2.0 * jordan_det(&apply_lorentz(u, &b).unwrap()).unwrap().max(0.0).sqrt();
        for kind in KINDS {
            let v = lorentz_value(u, &b, kind);
            worst_boundary = worst_boundary.max((v - direct).abs() / direct.max(1.0));
        }
    }
    Outcome::new(
        midpoint_failures == [0, 0] && worst_hom <= 1e-12 && worst_boundary <= 1e-12,
        format!(
            "midpoint failures C {} F {} of 10000, homogeneity {:.2e}, boundary {:.2e}",
            midpoint_failures[0], midpoint_failures[1], worst_hom, worst_boundary
        ),
    )
}

#[derive(Default)]
struct ContractStats {
    checked: usize,
    reconstruction: f64,
    value: f64,
    non_extremal: usize,
}

impl ContractStats {
    fn record<T>(
        &mut self,
        dec: &ConicDecomposition<T>,
        value: f64,
        residual: impl Fn(&ConicDecomposition<T>) -> f64,
        extremal: impl Fn(&T) -> bool,
        f: impl Fn(&T) -> f64,
    ) {
        self.checked += 1;
        self.reconstruction = self.reconstruction.max(residual(dec));
        if !dec.parts.iter().all(|(_, p)| extremal(p)) {
            self.non_extremal += 1;
        }
        let total: f64 = dec.parts.iter().map(|(w, p)| w * f(p)).sum();
        self.value = self.value.max((total - value).abs() / value.max(1.0));
    }
}

fn matrix_residual(x: &HermitianMatrix) -> impl Fn(&ConicDecomposition<HermitianMatrix>) -> f64 + '_ {
    move |dec| {
        let mut sum = HermitianMatrix::zeros(x.dim());
        for (w, p) in &dec.parts {
            sum = &sum + &p.scale(*w);
        }
        (&sum - x).frobenius_norm() / x.frobenius_norm()
    }
}

fn rank_one_part(p: &HermitianMatrix) -> bool {
    rank_within(p, 1e-9).unwrap() <= 1
}

/// `2√σ2(Φ(p))`, with `σ2` below `1e-12 (tr Φ(p))²` read as 0: a rank-one
/// image has `σ2 = 0` only up to rounding.
fn pullback_value(phi: &PositiveMapH) -> impl Fn(&HermitianMatrix) -> f64 + '_ {
    move |p| {
        let image = apply_positive(phi, p).unwrap();
        let s = sigma2(&image);
        if s.abs() <= 1e-12 * image.trace().powi(2) {
            0.0
        } else {
            2.0 * s.max(0.0).sqrt()
        }
    }
}

fn decomposition_contract() -> Outcome {
    let mut stats = ContractStats::default();
    for (_, u, points) in ensemble() {
        for x in &points {
            for kind in KINDS {
                let res = roof_lorentz(&u, x, kind, true).unwrap();
                let dec = res.decomposition.expect("decomposition requested");
                stats.record(
                    &dec,
                    res.value,
                    |d| {
                        let sum = d
                            .parts
                            .iter()
                            .fold(x.as_dvector() * 0.0, |acc, (w, p)| acc + p.as_dvector() * *w);
                        (sum - x.as_dvector()).norm() / x.norm()
                    },
                    |p| cone_membership(p, 1e-9) == ConeMembership::Boundary,
                    |p| 2.0 * jordan_det(&apply_lorentz(&u, p).unwrap()).unwrap().max(0.0).sqrt(),
                );
            }
        }
    }
    let mut r = rng(7);
    for seed in 0..200u64 {
        let d1 = pick(&[2, 3], &mut r);
        let d2 = pick(&[2, 3], &mut r);
        let d3 = pick(&[1, 2, 3], &mut r);
        let k = KrausMap::random(d1, d2, d3, 700 + seed).unwrap();
        let phi = from_kraus(&k).unwrap();
        let x = psd(d1, 2, &mut r);
        for kind in KINDS {
            let res = if d1 == 2 {
                concurrence_h2(&phi, &x, kind, true)
            } else {
                roof_rank2(&phi, &x, kind, true)
            }
            .unwrap();
            let dec = res.decomposition.expect("decomposition requested");
            stats.record(&dec, res.value, matrix_residual(&x), rank_one_part, pullback_value(&phi));
        }
        let shape = BipartiteShape::new(pick(&[2, 3], &mut r), pick(&[2, 3], &mut r)).unwrap();
        let m = psd(shape.total(), 2, &mut r);
        for kind in KINDS {
            let variant = pick(&VARIANTS, &mut r);
            let res = roof_bipartite(&m, shape, kind, variant, true).unwrap();
            let dec = res.decomposition.expect("decomposition requested");
            stats.record(&dec, res.value, matrix_residual(&m), rank_one_part, |p| {
                q1_bilinear(variant, shape, p, p).unwrap().max(0.0).sqrt()
            });
        }
    }
    Outcome::new(
        stats.reconstruction <= 1e-9 && stats.value <= 1e-9 && stats.non_extremal == 0,
        format!(
            "{} decompositions, reconstruction {:.2e}, value {:.2e}, non-extremal {}",
            stats.checked, stats.reconstruction, stats.value, stats.non_extremal
        ),
    )
}

fn rank_one_exactness() -> Outcome {
    let mut r = rng(8);
    let mut mismatches = 0;
    let mut multi_part = 0;
    let mut check = |value: f64, expected: f64, parts: usize| {
        if value != expected {
            mismatches += 1;
        }
        if parts != 1 {
            multi_part += 1;
        }
    };
    for seed in 0..1_000u64 {
        let d1 = pick(&[2, 3, 4], &mut r);
        let k = KrausMap::random(d1, pick(&[2, 3], &mut r), pick(&[1, 2, 3], &mut r), seed)
            .unwrap();
        let phi = from_kraus(&k).unwrap();
        let x = rank_one(d1, &mut r);
        let expected = 2.0 * sigma2(&apply_positive(&phi, &x).unwrap()).max(0.0).sqrt();
        for kind in KINDS {
            if d1 == 2 {
                let res = concurrence_h2(&phi, &x, kind, true).unwrap();
                check(res.value, expected, res.decomposition.unwrap().parts.len());
            }
            let res = roof_rank2(&phi, &x, kind, true).unwrap();
            check(res.value, expected, res.decomposition.unwrap().parts.len());
        }
        let shape = BipartiteShape::new(pick(&[2, 3], &mut r), pick(&[2, 3, 4], &mut r)).unwrap();
        let m = rank_one(shape.total(), &mut r);
        for variant in VARIANTS {
            let expected = q1_bilinear(variant, shape, &m, &m).unwrap().max(0.0).sqrt();
            for kind in KINDS {
                let res = roof_bipartite(&m, shape, kind, variant, true).unwrap();
                check(res.value, expected, res.decomposition.unwrap().parts.len());
            }
        }
    }
    Outcome::new(
        mismatches == 0 && multi_part == 0,
        format!("1000 inputs, {mismatches} value mismatches, {multi_part} multi-part decompositions"),
    )
}

fn q1_variants() -> Outcome {
    let mut r = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let shape = BipartiteShape::new(pick(&[2, 3, 4], &mut r), pick(&[2, 3, 4], &mut r)).unwrap();
        let m = psd(shape.total(), 2, &mut r);
        for kind in KINDS {
            let values: Vec<f64> = VARIANTS
                .iter()
                .map(|v| roof_bipartite(&m, shape, kind, *v, false).unwrap().value)
                .collect();
            for v in &values[1..] {
                worst = worst.max((v - values[0]).abs() / values[0].max(1.0));
            }
        }
    }
    Outcome::new(
        worst <= 1e-9,
        format!("1000 rank-2 inputs, max variant gap {worst:.2e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("graph table reproduction", graph_table),
        ("oracle agreement", oracle_agreement),
        ("pencil structure", pencil_structure),
        ("lifting identity", lift_identity),
        ("Φ/Φ' equality", phi_prime_equality),
        ("convexity/concavity", convexity),
        ("decomposition contract", decomposition_contract),
        ("rank-1 exactness", rank_one_exactness),
        ("Q1-variant independence", q1_variants),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        if !outcome.passed {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {}: {} ({:.1}s)",
            i + 1,
            if outcome.passed { "PASS" } else { "FAIL" },
            name,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
