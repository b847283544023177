//! Test-only reference implementations, independent of the closed-form
//! Fourier route used by the library.
#![allow(dead_code)]

use circwalk::graph::CirculantGraph;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Dense 0/1 adjacency matrix: `a ~ b` iff `(b - a) mod n ∈ S`.
pub fn adjacency(graph: &CirculantGraph) -> DMatrix<f64> {
    let n = graph.order();
    DMatrix::from_fn(n, n, |a, b| {
        if graph.contains((b + n - a) % n) {
            1.0
        } else {
            0.0
        }
    })
}

/// `exp(-itA)` via a real symmetric eigendecomposition `A = Q Λ Qᵀ`.
pub struct DenseOracle {
    pub eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl DenseOracle {
    pub fn new(graph: &CirculantGraph) -> Self {
        let eig = SymmetricEigen::new(adjacency(graph));
        DenseOracle {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn entry(&self, u: usize, v: usize, t: f64) -> Complex64 {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &lambda)| {
                let w = self.vectors[(u, j)] * self.vectors[(v, j)];
                Complex64::new(0.0, -lambda * t).exp() * w
            })
            .sum()
    }

    pub fn matrix(&self, t: f64) -> DMatrix<Complex64> {
        let n = self.eigenvalues.len();
        let q = self.vectors.map(|x| Complex64::new(x, 0.0));
        let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            self.eigenvalues
                .iter()
                .map(|&l| Complex64::new(0.0, -l * t).exp()),
        ));
        &q * phases * q.transpose()
    }

    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

/// Peak `|H(t)_{u,v}|` over `t = offset + step * q`, `q` in `[qmin, qmax]`,
/// scanned sequentially with the dense oracle. Ties keep the first `q`.
pub fn oracle_peak(
    graph: &CirculantGraph,
    u: usize,
    v: usize,
    offset: f64,
    step: f64,
    qmin: i64,
    qmax: i64,
) -> (i64, f64) {
    let oracle = DenseOracle::new(graph);
    let mut best = (qmin, -1.0);
    for q in qmin..=qmax {
        let f = oracle.entry(u, v, offset + step * q as f64).norm();
        if f > best.1 {
            best = (q, f);
        }
    }
    best
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
