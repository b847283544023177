//! Transition amplitudes of the walk `H(t) = exp(-itA)`.
//!
//! Entries are evaluated from the Fourier diagonalization,
//!
//! ```text
//! H(t)_{u,v} = (1/n) Σ_l exp(-i θ_l t) · w^{l (v - u)},   w = exp(2πi/n)
//! ```
//!
//! so an entry costs `O(n)` and depends only on `(v - u) mod n`. Fidelity is
//! the modulus `|H(t)_{u,v}|`, not its square.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::graph::CirculantGraph;
use crate::spectral::{cos_turn, sin_turn, spectrum};

/// Largest order for which full matrices are materialized by default.
pub const DEFAULT_MATRIX_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { n: usize, vertex: usize },
    #[error("order {n} exceeds the full-matrix cap {cap}")]
    OrderTooLarge { n: usize, cap: usize },
    #[error("connection sets share element {0}")]
    SetsNotDisjoint(usize),
    #[error("graphs have different orders ({0} vs {1})")]
    OrderMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
}

impl Amplitude {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl From<Complex64> for Amplitude {
    fn from(z: Complex64) -> Self {
        Amplitude { re: z.re, im: z.im }
    }
}

impl From<Amplitude> for Complex64 {
    fn from(a: Amplitude) -> Self {
        Complex64::new(a.re, a.im)
    }
}

/// One evaluated time point. `q` is the lattice index when the time came from
/// a [`crate::diophantine::TimeLattice`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    pub t: f64,
    #[serde(flatten)]
    pub amplitude: Amplitude,
    pub fidelity: f64,
}

impl TransferRecord {
    pub fn new(q: Option<i64>, t: f64, z: Complex64) -> Self {
        let amplitude = Amplitude::from(z);
        TransferRecord {
            q,
            t,
            amplitude,
            fidelity: amplitude.modulus(),
        }
    }
}

fn check_vertex(n: usize, vertex: usize) -> Result<(), DynamicsError> {
    if vertex >= n {
        Err(DynamicsError::VertexOutOfRange { n, vertex })
    } else {
        Ok(())
    }
}

/// `w^m / n` as a complex number, exact on quarter turns.
fn root_of_unity(m: usize, n: usize) -> Complex64 {
    Complex64::new(cos_turn(m, n), sin_turn(m, n))
}

/// The amplitude `H(t)_{0,k}` as a function of `t`, with the Fourier sum
/// pre-collected over equal eigenvalues.
#[derive(Debug, Clone)]
pub struct EntryKernel {
    offset: usize,
    terms: Vec<(f64, Complex64)>,
}

impl EntryKernel {
    pub fn new(graph: &CirculantGraph, offset: usize) -> Self {
        let n = graph.order();
        let offset = offset % n;
        let values = spectrum(graph).values;
        let scale = 1.0 / n as f64;
        let mut terms: Vec<(f64, Complex64)> = Vec::with_capacity(n);
        for (l, &theta) in values.iter().enumerate() {
            let coeff = root_of_unity(l * offset % n, n) * scale;
            // θ_l and θ_{n-l} are bitwise equal by construction; merge them.
            match terms
                .iter_mut()
                .find(|(th, _)| th.to_bits() == theta.to_bits())
            {
                Some((_, c)) => *c += coeff,
                None => terms.push((theta, coeff)),
            }
        }
        EntryKernel { offset, terms }
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(theta, coeff)| {
                let (s, c) = (theta * t).sin_cos();
                coeff * Complex64::new(c, -s)
            })
            .sum()
    }

    pub fn record(&self, q: Option<i64>, t: f64) -> TransferRecord {
        TransferRecord::new(q, t, self.eval(t))
    }
}

/// `H(t)_{u,v}`.
pub fn transition_entry(
    graph: &CirculantGraph,
    u: usize,
    v: usize,
    t: f64,
) -> Result<Amplitude, DynamicsError> {
    let n = graph.order();
    check_vertex(n, u)?;
    check_vertex(n, v)?;
    let offset = (v + n - u) % n;
    Ok(EntryKernel::new(graph, offset).eval(t).into())
}

pub fn fidelity(graph: &CirculantGraph, u: usize, v: usize, t: f64) -> Result<f64, DynamicsError> {
    transition_entry(graph, u, v, t).map(|a| a.modulus())
}

/// First row of `H(t)`: `H(t)_{0,k}` for `k = 0..n`. Every other row is a
/// cyclic shift of it.
pub fn first_row(graph: &CirculantGraph, t: f64) -> Vec<Complex64> {
    let n = graph.order();
    if t == 0.0 {
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        row[0] = Complex64::new(1.0, 0.0);
        return row;
    }
    let values = spectrum(graph).values;
    let phases: Vec<Complex64> = values
        .iter()
        .map(|&theta| {
            let (s, c) = (theta * t).sin_cos();
            Complex64::new(c, -s) / n as f64
        })
        .collect();
    (0..n)
        .map(|k| {
            phases
                .iter()
                .enumerate()
                .map(|(l, &p)| p * root_of_unity(l * k % n, n))
                .sum()
        })
        .collect()
}

pub fn transition_matrix(
    graph: &CirculantGraph,
    t: f64,
) -> Result<DMatrix<Complex64>, DynamicsError> {
    transition_matrix_capped(graph, t, DEFAULT_MATRIX_CAP)
}

pub fn transition_matrix_capped(
    graph: &CirculantGraph,
    t: f64,
    cap: usize,
) -> Result<DMatrix<Complex64>, DynamicsError> {
    let n = graph.order();
    if n > cap {
        return Err(DynamicsError::OrderTooLarge { n, cap });
    }
    let row = first_row(graph, t);
    Ok(DMatrix::from_fn(n, n, |u, v| row[(v + n - u) % n]))
}

/// `Some(γ)` when `H(t) = γ I` up to `tol`: all off-diagonal entries below
/// `tol` in modulus and the (common) diagonal entry within `tol` of the unit
/// circle.
pub fn is_periodic_at(graph: &CirculantGraph, t: f64, tol: f64) -> Option<Complex64> {
    let row = first_row(graph, t);
    let gamma = row[0];
    let off_diagonal = row[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    if off_diagonal < tol && (gamma.norm() - 1.0).abs() < tol {
        Some(gamma)
    } else {
        None
    }
}

/// `Cay(Z_n, S1 ∪ S2)` for disjoint symmetric sets.
pub fn edge_union(a: &CirculantGraph, b: &CirculantGraph) -> Result<CirculantGraph, DynamicsError> {
    if a.order() != b.order() {
        return Err(DynamicsError::OrderMismatch(a.order(), b.order()));
    }
    if let Some(&shared) = a.connection_set().iter().find(|&&s| b.contains(s)) {
        return Err(DynamicsError::SetsNotDisjoint(shared));
    }
    let elements: Vec<i64> = a
        .connection_set()
        .iter()
        .chain(b.connection_set())
        .map(|&s| s as i64)
        .collect();
    Ok(CirculantGraph::new(a.order(), &elements).expect("union of symmetric sets is symmetric"))
}

/// `max |H_{S1∪S2}(t) - H_{S1}(t) H_{S2}(t)|` over all entries.
pub fn product_law_check(
    a: &CirculantGraph,
    b: &CirculantGraph,
    t: f64,
) -> Result<f64, DynamicsError> {
    let union = edge_union(a, b)?;
    let joint = transition_matrix(&union, t)?;
    let product = transition_matrix(a, t)? * transition_matrix(b, t)?;
    Ok(max_abs_diff(&joint, &product))
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
