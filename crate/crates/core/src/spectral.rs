//! Closed-form spectra of circulant graphs.
//!
//! The adjacency matrix of `Cay(Z_n, S)` is diagonalized by the Fourier
//! vectors `v_l = (1, w^l, ..., w^{l(n-1)})`, `w = exp(2πi/n)`, with
//! eigenvalue `θ_l = Σ_{s∈S} cos(2π l s / n)`. Indexing follows that Fourier
//! order throughout the crate.

use serde::Serialize;
use thiserror::Error;

use crate::graph::CirculantGraph;

pub const DEFAULT_EQUALITY_TOL: f64 = 1e-10;
pub const DEFAULT_INTEGRALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error("eigenvalue index {l} out of range for n = {n}")]
    IndexOutOfRange { n: usize, l: usize },
    #[error("{0} is not a power of two >= 8")]
    NotPowerOfTwo(usize),
}

/// `cos(2π m / n)` evaluated on the angle folded into `[0, π/2]`.
///
/// Folding makes `c(m) = c(n-m)` and `c(m) = -c(n/2 - m)` hold bit-for-bit,
/// so eigenvalues that coincide algebraically through these symmetries also
/// coincide in floating point. Angles of 0, π/3 and π/2 are returned exactly.
pub(crate) fn cos_turn(m: usize, n: usize) -> f64 {
    let m = m % n;
    let m = m.min(n - m);
    // angle = π a / n with a in [0, n]
    let a = 2 * m;
    let (sign, a) = if 2 * a > n { (-1.0, n - a) } else { (1.0, a) };
    let value = if a == 0 {
        1.0
    } else if 2 * a == n {
        0.0
    } else if 3 * a == n {
        0.5
    } else {
        (std::f64::consts::PI * a as f64 / n as f64).cos()
    };
    sign * value
}

/// `sin(2π m / n)`, exact at multiples of a quarter turn.
pub(crate) fn sin_turn(m: usize, n: usize) -> f64 {
    let m = m % n;
    if m == 0 || 2 * m == n {
        return 0.0;
    }
    if 4 * m == n {
        return 1.0;
    }
    if 4 * m == 3 * n {
        return -1.0;
    }
    // sin(x) = cos(x - π/2); shift by a quarter turn using 4n as denominator.
    let (mm, nn) = (4 * m + 3 * n, 4 * n);
    cos_turn(mm % nn, nn)
}

/// `λ_l = 2 cos(2π l / n)`, the `l`-th eigenvalue of `C_n`.
pub fn cycle_eigenvalue(n: usize, l: usize) -> Result<f64, SpectralError> {
    if l >= n {
        return Err(SpectralError::IndexOutOfRange { n, l });
    }
    Ok(2.0 * cos_turn(l, n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleSpectrum {
    pub n: usize,
    pub values: Vec<f64>,
}

pub fn cycle_spectrum(n: usize) -> CycleSpectrum {
    let values = (0..n).map(|l| 2.0 * cos_turn(l, n)).collect();
    CycleSpectrum { n, values }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub n: usize,
    pub values: Vec<f64>,
    pub integral: bool,
}

impl Spectrum {
    pub fn is_integral_within(&self, tol: f64) -> bool {
        self.values.iter().all(|v| (v - v.round()).abs() < tol)
    }
}

/// Eigenvalue `θ_l` of `Cay(Z_n, S)`.
///
/// Each pair `{s, n-s}` contributes `2 cos(2π l s / n)` as one term
/// (`λ_{ls mod n}`), and the self-paired `n/2` contributes `cos(π l)`.
pub fn eigenvalue(graph: &CirculantGraph, l: usize) -> f64 {
    let n = graph.order();
    let mut sum = 0.0;
    for &s in graph.connection_set() {
        if 2 * s > n {
            continue;
        }
        let m = (l % n) * s % n;
        if 2 * s == n {
            sum += cos_turn(m, n);
        } else {
            sum += 2.0 * cos_turn(m, n);
        }
    }
    sum
}

pub fn spectrum(graph: &CirculantGraph) -> Spectrum {
    spectrum_with_tol(graph, DEFAULT_INTEGRALITY_TOL)
}

pub fn spectrum_with_tol(graph: &CirculantGraph, integrality_tol: f64) -> Spectrum {
    let n = graph.order();
    let values: Vec<f64> = (0..n).map(|l| eigenvalue(graph, l)).collect();
    let integral = values
        .iter()
        .all(|v| (v - v.round()).abs() < integrality_tol);
    Spectrum {
        n,
        values,
        integral,
    }
}

/// `(l, λ_l)` for `0 <= l < n/4`: the distinct positive eigenvalues of `C_n`
/// for `n = 2^k`, `k >= 3`, strictly decreasing.
pub fn distinct_positive_cycle_eigenvalues(n: usize) -> Result<Vec<(usize, f64)>, SpectralError> {
    if !n.is_power_of_two() || n < 8 {
        return Err(SpectralError::NotPowerOfTwo(n));
    }
    Ok((0..n / 4).map(|l| (l, 2.0 * cos_turn(l, n))).collect())
}

/// Two eigenvalues that agree numerically at indices of opposite parity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParityConflict {
    pub l: usize,
    pub l_prime: usize,
    pub value: f64,
}

/// All pairs `l < l'` of opposite parity with `|θ_l - θ_l'| < tol`, in
/// lexicographic order.
pub fn parity_conflicts(spectrum: &Spectrum, tol: f64) -> Vec<ParityConflict> {
    let values = &spectrum.values;
    let mut out = Vec::new();
    for l in 0..values.len() {
        for l_prime in (l + 1..values.len()).step_by(2) {
            if (values[l] - values[l_prime]).abs() < tol {
                out.push(ParityConflict {
                    l,
                    l_prime,
                    value: values[l],
                });
            }
        }
    }
    out
}

/// First conflict in lexicographic order, if any.
pub fn first_parity_conflict(spectrum: &Spectrum, tol: f64) -> Option<ParityConflict> {
    let values = &spectrum.values;
    (0..values.len()).find_map(|l| {
        (l + 1..values.len())
            .step_by(2)
            .find(|&lp| (values[l] - values[lp]).abs() < tol)
            .map(|l_prime| ParityConflict {
                l,
                l_prime,
                value: values[l],
            })
    })
}
