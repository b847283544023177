//! Time search: simultaneous approximation of eigenvalue phases and
//! fidelity maximization over arithmetic time lattices.
//!
//! Two lattices carry all the transfer-time sequences used here:
//! `2πZ` (`t = 2πq`) and `(2Z+1)π/2` (`t = π/2 + πq`). Scans are split
//! across rayon workers and merged in `q` order, so results never depend on
//! the number of threads.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dynamics::{DynamicsError, EntryKernel, TransferRecord};
use crate::graph::CirculantGraph;
use crate::spectral::cycle_eigenvalue;

pub const DEFAULT_SOLVER_EPS: f64 = 1e-3;
pub const DEFAULT_SCAN_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("empty q range [{min}, {max}]")]
    EmptyRange { min: i64, max: i64 },
    #[error("q range of {len} points exceeds the scan cap {cap}")]
    RangeTooLarge { len: u64, cap: usize },
    #[error("{thetas} thetas but {alphas} alphas")]
    LengthMismatch { thetas: usize, alphas: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidEps(f64),
    #[error("qmax must be at least 1")]
    InvalidBound,
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("n / d' = {n} / {d} is below 8")]
    RatioTooSmall { n: usize, d: usize },
    #[error("unknown lattice {0:?} (expected 2piZ or oddHalfPi)")]
    UnknownLattice(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    /// `{2πq}`.
    TwoPiZ,
    /// `{(2q+1)π/2}`.
    OddHalfPi,
}

impl LatticeKind {
    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::TwoPiZ => "2piZ",
            LatticeKind::OddHalfPi => "oddHalfPi",
        }
    }

    pub fn lattice(self) -> TimeLattice {
        match self {
            LatticeKind::TwoPiZ => TimeLattice::two_pi_z(),
            LatticeKind::OddHalfPi => TimeLattice::odd_half_pi(),
        }
    }

    /// Smallest index worth scanning: `t = 0` is excluded on `2πZ`.
    pub fn default_qmin(self) -> i64 {
        match self {
            LatticeKind::TwoPiZ => 1,
            LatticeKind::OddHalfPi => 0,
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2piZ" => Ok(LatticeKind::TwoPiZ),
            "oddHalfPi" => Ok(LatticeKind::OddHalfPi),
            other => Err(SearchError::UnknownLattice(other.to_string())),
        }
    }
}

impl Serialize for LatticeKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// `time(q) = offset + step * q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeLattice {
    pub kind: LatticeKind,
    pub offset: f64,
    pub step: f64,
}

impl TimeLattice {
    pub fn two_pi_z() -> Self {
        TimeLattice {
            kind: LatticeKind::TwoPiZ,
            offset: 0.0,
            step: 2.0 * PI,
        }
    }

    pub fn odd_half_pi() -> Self {
        TimeLattice {
            kind: LatticeKind::OddHalfPi,
            offset: PI / 2.0,
            step: PI,
        }
    }

    pub fn time(&self, q: i64) -> f64 {
        self.offset + self.step * q as f64
    }
}

/// Inclusive range of lattice indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QRange {
    min: i64,
    max: i64,
}

impl QRange {
    pub fn new(min: i64, max: i64) -> Result<Self, SearchError> {
        if min > max {
            return Err(SearchError::EmptyRange { min, max });
        }
        Ok(QRange { min, max })
    }

    pub fn min(&self) -> i64 {
        self.min
    }

    pub fn max(&self) -> i64 {
        self.max
    }

    pub fn len(&self) -> u64 {
        (self.max - self.min) as u64 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn indices(&self) -> impl IndexedParallelIterator<Item = i64> {
        let min = self.min;
        (0..self.len() as usize)
            .into_par_iter()
            .map(move |i| min + i as i64)
    }
}

/// Phases `θ_j` to be pushed simultaneously towards targets `α_j` mod 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KroneckerTarget {
    pub thetas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub eps: f64,
}

impl KroneckerTarget {
    pub fn new(thetas: Vec<f64>, alphas: Vec<f64>, eps: f64) -> Result<Self, SearchError> {
        if thetas.len() != alphas.len() {
            return Err(SearchError::LengthMismatch {
                thetas: thetas.len(),
                alphas: alphas.len(),
            });
        }
        if eps.is_nan() || eps <= 0.0 {
            return Err(SearchError::InvalidEps(eps));
        }
        Ok(KroneckerTarget {
            thetas,
            alphas,
            eps,
        })
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self, SearchError> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(SearchError::InvalidEps(eps));
        }
        self.eps = eps;
        Ok(self)
    }

    /// `dist(q θ_j - α_j, Z)` for every `j`.
    pub fn residuals(&self, q: i64) -> Vec<f64> {
        self.thetas
            .iter()
            .zip(&self.alphas)
            .map(|(&theta, &alpha)| distance_to_integer(q as f64 * theta - alpha))
            .collect()
    }

    fn accepts(&self, q: i64) -> bool {
        self.thetas
            .iter()
            .zip(&self.alphas)
            .all(|(&theta, &alpha)| distance_to_integer(q as f64 * theta - alpha) < self.eps)
    }
}

pub fn distance_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KroneckerSolution {
    pub q: i64,
    pub residuals: Vec<f64>,
}

/// Backend for simultaneous approximation. Kronecker's theorem gives no
/// rate, so the only backend shipped is an exhaustive scan.
pub trait SimultaneousApproximator {
    fn solve(&self, target: &KroneckerTarget, q_max: i64) -> Option<KroneckerSolution>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExhaustiveScan;

impl SimultaneousApproximator for ExhaustiveScan {
    fn solve(&self, target: &KroneckerTarget, q_max: i64) -> Option<KroneckerSolution> {
        if q_max < 1 {
            return None;
        }
        let range = QRange { min: 1, max: q_max };
        range
            .indices()
            .find_first(|&q| target.accepts(q))
            .map(|q| KroneckerSolution {
                q,
                residuals: target.residuals(q),
            })
    }
}

/// Smallest `q` in `[1, q_max]` with every residual below `eps`.
pub fn kronecker_solve(
    target: &KroneckerTarget,
    q_max: i64,
) -> Result<Option<KroneckerSolution>, SearchError> {
    if target.thetas.len() != target.alphas.len() {
        return Err(SearchError::LengthMismatch {
            thetas: target.thetas.len(),
            alphas: target.alphas.len(),
        });
    }
    if q_max < 1 {
        return Err(SearchError::InvalidBound);
    }
    Ok(ExhaustiveScan.solve(target, q_max))
}

fn check_power_pair(n: usize, d_prime: usize) -> Result<(), SearchError> {
    if !n.is_power_of_two() {
        return Err(SearchError::NotPowerOfTwo(n));
    }
    if !d_prime.is_power_of_two() {
        return Err(SearchError::NotPowerOfTwo(d_prime));
    }
    if d_prime > n || n / d_prime < 8 {
        return Err(SearchError::RatioTooSmall { n, d: d_prime });
    }
    Ok(())
}

/// `a` when `l = d' * a` with `a` odd, otherwise `None`.
fn odd_cofactor(l: usize, d_prime: usize) -> Option<usize> {
    (l.is_multiple_of(d_prime) && (l / d_prime) % 2 == 1).then_some(l / d_prime)
}

/// Targets for the cycle `C_n`, `n = 2^k`: approximate `q λ_l` for
/// `1 <= l < n/4`, aiming at `1/2` exactly when `l = d' * (odd)`.
pub fn cycle_phase_targets(n: usize, d_prime: usize) -> Result<KroneckerTarget, SearchError> {
    check_power_pair(n, d_prime)?;
    let ls = 1..n / 4;
    let thetas = ls
        .clone()
        .map(|l| cycle_eigenvalue(n, l).expect("l < n"))
        .collect();
    let alphas = ls
        .map(|l| {
            if odd_cofactor(l, d_prime).is_some() {
                0.5
            } else {
                0.0
            }
        })
        .collect();
    KroneckerTarget::new(thetas, alphas, DEFAULT_SOLVER_EPS)
}

/// Largest deviation, in radians, over all `l in 0..n` at `t = 2πq` of
/// `λ_l t + aπ` (or `λ_l t` when `l` is not `d' * odd`) from the nearest
/// multiple of `2π`.
pub fn cycle_phase_deviation(n: usize, d_prime: usize, q: i64) -> Result<f64, SearchError> {
    check_power_pair(n, d_prime)?;
    let worst = (0..n)
        .map(|l| {
            let lambda = cycle_eigenvalue(n, l).expect("l < n");
            let shift = odd_cofactor(l, d_prime).map_or(0.0, |a| a as f64 / 2.0);
            // (λ t + aπ) / 2π with t = 2πq
            2.0 * PI * distance_to_integer(q as f64 * lambda + shift)
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

fn kernel_for(graph: &CirculantGraph, u: usize, v: usize) -> Result<EntryKernel, SearchError> {
    let n = graph.order();
    for vertex in [u, v] {
        if vertex >= n {
            return Err(DynamicsError::VertexOutOfRange { n, vertex }.into());
        }
    }
    Ok(EntryKernel::new(graph, (v + n - u) % n))
}

fn better(a: TransferRecord, b: TransferRecord) -> TransferRecord {
    // higher fidelity wins; ties go to the smaller q
    if b.fidelity > a.fidelity || (b.fidelity == a.fidelity && b.q < a.q) {
        b
    } else {
        a
    }
}

/// Maximum-fidelity record over the lattice points of `range`.
pub fn best_time_on_lattice(
    graph: &CirculantGraph,
    u: usize,
    v: usize,
    lattice: &TimeLattice,
    range: QRange,
) -> Result<TransferRecord, SearchError> {
    let kernel = kernel_for(graph, u, v)?;
    let best = range
        .indices()
        .map(|q| kernel.record(Some(q), lattice.time(q)))
        .reduce_with(better)
        .expect("range is non-empty");
    Ok(best)
}

/// Smallest `q` in `range` whose fidelity reaches `threshold`.
pub fn first_time_reaching(
    graph: &CirculantGraph,
    u: usize,
    v: usize,
    lattice: &TimeLattice,
    range: QRange,
    threshold: f64,
) -> Result<Option<TransferRecord>, SearchError> {
    let kernel = kernel_for(graph, u, v)?;
    Ok(range
        .indices()
        .map(|q| kernel.record(Some(q), lattice.time(q)))
        .find_first(|r| r.fidelity >= threshold))
}

pub fn scan_lattice(
    graph: &CirculantGraph,
    u: usize,
    v: usize,
    lattice: &TimeLattice,
    range: QRange,
) -> Result<Vec<TransferRecord>, SearchError> {
    scan_lattice_capped(graph, u, v, lattice, range, DEFAULT_SCAN_CAP)
}

/// One record per `q` in `range`, in ascending `q`.
pub fn scan_lattice_capped(
    graph: &CirculantGraph,
    u: usize,
    v: usize,
    lattice: &TimeLattice,
    range: QRange,
    cap: usize,
) -> Result<Vec<TransferRecord>, SearchError> {
    if range.len() > cap as u64 {
        return Err(SearchError::RangeTooLarge {
            len: range.len(),
            cap,
        });
    }
    let kernel = kernel_for(graph, u, v)?;
    Ok(range
        .indices()
        .map(|q| kernel.record(Some(q), lattice.time(q)))
        .collect())
}
