//! Density matrices `L(G) / (2 n_e)` of graphs whose vertices sit on a
//! `rows × cols` grid, read as `rows ⊗ cols` bipartite states.
//!
//! Vertex `(r, c)` is basis index `r * cols + c`. Every graph with two edges
//! and every triangle has a rank-two density matrix, so its concurrence and
//! I-fidelity follow from the restricted `Q1 - λ Q2` pencil.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::herm::{rank_within, BipartiteShape, HermitianMatrix};
use crate::roof::{q1_bilinear, q2_bilinear, roof_bipartite, Q1Variant, RoofKind};
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridGraph {
    rows: usize,
    cols: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphReport {
    pub eigenvalues: [f64; 4],
    pub q1: f64,
    pub q2: f64,
    pub concurrence: f64,
    pub fidelity: f64,
}

impl GridGraph {
    /// Edges are stored as sorted `(u, v)` pairs with `u < v`.
    pub fn new(rows: usize, cols: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let n = rows * cols;
        if n == 0 || n > crate::herm::MAX_DIM {
            return Err(Error::InvalidDimension(format!("grid {rows}x{cols}")));
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) outside a grid of {n} vertices"
                )));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidInput(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self {
            rows,
            cols,
            edges: set.into_iter().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape {
            d1: self.rows,
            d2: self.cols,
        }
    }
}

/// Combinatorial Laplacian `Δ(G) - M(G)`.
pub fn laplacian(g: &GridGraph) -> Result<HermitianMatrix> {
    if g.edges.is_empty() {
        return Err(Error::InvalidInput("graph has no edges".into()));
    }
    let n = g.vertex_count();
    let mut l = nalgebra::DMatrix::<f64>::zeros(n, n);
    for &(u, v) in &g.edges {
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
    }
    HermitianMatrix::from_real(&l)
}

/// `L(G) / (2 n_e)`.
pub fn density_matrix(g: &GridGraph) -> Result<HermitianMatrix> {
    let l = laplacian(g)?;
    Ok(l.scale(1.0 / (2.0 * g.edges.len() as f64)))
}

pub fn graph_report(g: &GridGraph) -> Result<GraphReport> {
    let rho = density_matrix(g)?;
    let shape = g.shape();
    let rank = rank_within(&rho, DEFAULT_TOL)?;
    if rank > 2 {
        return Err(Error::RankTooHigh { rank });
    }
    let variant = Q1Variant::UniversalInverter;
    let c = roof_bipartite(&rho, shape, RoofKind::Concurrence, variant, false)?;
    let f = roof_bipartite(&rho, shape, RoofKind::Fidelity, variant, false)?;
    let spectrum = c
        .spectrum
        .ok_or_else(|| Error::NumericalFailure("rank-two density matrix expected".into()))?;
    let mut eigenvalues = [0.0; 4];
    eigenvalues.copy_from_slice(&spectrum.eigenvalues);
    Ok(GraphReport {
        eigenvalues,
        q1: q1_bilinear(variant, shape, &rho, &rho)?,
        q2: q2_bilinear(&rho, &rho),
        concurrence: c.value,
        fidelity: f.value,
    })
}

/// All two-edge graphs and all triangles on the grid's vertex set, with
/// edges drawn from the complete graph. Labeled, no isomorphism reduction.
pub fn enumerate_rank2_graphs(rows: usize, cols: usize) -> Result<Vec<GridGraph>> {
    let n = rows * cols;
    if n > crate::herm::MAX_DIM {
        return Err(Error::InvalidDimension(format!("grid {rows}x{cols}")));
    }
    if n < 3 {
        return Err(Error::InvalidDimension(format!(
            "grid {rows}x{cols} has no two-edge graph or triangle"
        )));
    }
    let all_edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    let mut out = Vec::new();
    for (i, &e) in all_edges.iter().enumerate() {
        for &f in &all_edges[i + 1..] {
            out.push(GridGraph::new(rows, cols, &[e, f])?);
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                out.push(GridGraph::new(rows, cols, &[(a, b), (b, c), (a, c)])?);
            }
        }
    }
    Ok(out)
}

impl GraphReport {
    pub fn tuple(&self) -> [f64; 8] {
        let e = self.eigenvalues;
        [e[0], e[1], e[2], e[3], self.q1, self.q2, self.concurrence, self.fidelity]
    }
}

/// Reports for every rank-two graph on the grid, in enumeration order.
pub fn all_reports(rows: usize, cols: usize) -> Result<Vec<(GridGraph, GraphReport)>> {
    let graphs = enumerate_rank2_graphs(rows, cols)?;
    graphs
        .into_par_iter()
        .map(|g| graph_report(&g).map(|r| (g, r)))
        .collect()
}

/// One row of the distinct-value table.
#[derive(Debug, Clone)]
pub struct TableEntry {
    pub report: GraphReport,
    /// Number of enumerated graphs producing this tuple.
    pub graphs: usize,
    /// The first such graph in enumeration order.
    pub example: GridGraph,
}

/// Distinct reports in ascending tuple order. Tuples within `1e-8` of each
/// other in every entry are merged.
pub fn distinct_reports(rows: usize, cols: usize) -> Result<Vec<TableEntry>> {
    let mut distinct: Vec<TableEntry> = Vec::new();
    for (g, r) in all_reports(rows, cols)? {
        let t = r.tuple();
        let seen = distinct.iter_mut().find(|e| {
            e.report
                .tuple()
                .iter()
                .zip(&t)
                .all(|(a, b)| (a - b).abs() <= MERGE_TOL)
        });
        match seen {
            Some(e) => e.graphs += 1,
            None => distinct.push(TableEntry {
                report: r,
                graphs: 1,
                example: g,
            }),
        }
    }
    distinct.sort_by(|a, b| {
        a.report
            .tuple()
            .iter()
            .zip(&b.report.tuple())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(distinct)
}

/// Tuples of [`distinct_reports`].
pub fn table_multiset(rows: usize, cols: usize) -> Result<Vec<[f64; 8]>> {
    Ok(distinct_reports(rows, cols)?
        .iter()
        .map(|e| e.report.tuple())
        .collect())
}

const MERGE_TOL: f64 = 1e-8;
