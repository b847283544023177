//! Circulant graphs `Cay(Z_n, S)` and the gcd-class decomposition of `Z_n`.
//!
//! A connection set `S` is stored canonically: reduced mod `n`, sorted and
//! deduplicated. Every downstream computation (spectra, divisor profiles,
//! serialization) relies on that canonical form.
//!
//! The gcd class of a proper divisor `d` of `n` is
//! `S_n(d) = { x in Z_n : gcd(x, n) = d }`. Membership follows the definition
//! strictly: for `n = 16` the element `4` lives in `S_16(4)`, not in
//! `S_16(2)`, so `{1,2,3,4,12,13,14,15} ∩ S_16(2) = {2,14}`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid order {0}: a circulant graph needs n >= 2")]
    InvalidOrder(usize),
    #[error("connection set is empty")]
    EmptySet,
    #[error("connection set contains 0 (mod n); loops are not allowed")]
    ContainsZero,
    #[error("connection set is not symmetric: {s} is present but {missing} = n - {s} is not")]
    NotSymmetric { s: usize, missing: usize },
    #[error("{d} is not a proper divisor of {n}")]
    NotADivisor { n: usize, d: usize },
    #[error("cannot parse connection set element {0:?}")]
    Parse(String),
}

/// `Cay(Z_n, S)` with a validated, canonical connection set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct CirculantGraph {
    n: usize,
    set: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    set: Vec<i64>,
}

impl TryFrom<RawGraph> for CirculantGraph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, Self::Error> {
        CirculantGraph::new(raw.n, &raw.set)
    }
}

impl From<CirculantGraph> for RawGraph {
    fn from(g: CirculantGraph) -> Self {
        RawGraph {
            n: g.n,
            set: g.set.iter().map(|&s| s as i64).collect(),
        }
    }
}

impl CirculantGraph {
    /// Builds a graph from any integers; elements are reduced mod `n` first.
    pub fn new(n: usize, elements: &[i64]) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::InvalidOrder(n));
        }
        let mut set: Vec<usize> = elements
            .iter()
            .map(|&s| s.rem_euclid(n as i64) as usize)
            .collect();
        set.sort_unstable();
        set.dedup();
        if set.is_empty() {
            return Err(GraphError::EmptySet);
        }
        if set[0] == 0 {
            return Err(GraphError::ContainsZero);
        }
        for &s in &set {
            let mirror = n - s;
            if set.binary_search(&mirror).is_err() {
                return Err(GraphError::NotSymmetric { s, missing: mirror });
            }
        }
        Ok(CirculantGraph { n, set })
    }

    /// The cycle `C_n`, i.e. `S = {1, n-1}`. For `n = 2` this is `P_2`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        CirculantGraph::new(n, &[1, n as i64 - 1])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn connection_set(&self) -> &[usize] {
        &self.set
    }

    pub fn degree(&self) -> usize {
        self.set.len()
    }

    pub fn contains(&self, s: usize) -> bool {
        self.set.binary_search(&s).is_ok()
    }

    pub fn is_cycle(&self) -> bool {
        let n = self.n;
        self.set == [1, n - 1] || (n == 2 && self.set == [1])
    }

    /// The subgraph on the same vertex set keeping only `S ∩ keep`.
    /// Returns `None` when the intersection is empty.
    pub fn restrict<F: Fn(usize) -> bool>(&self, keep: F) -> Option<CirculantGraph> {
        let set: Vec<usize> = self.set.iter().copied().filter(|&s| keep(s)).collect();
        if set.is_empty() {
            return None;
        }
        // Restrictions used here are closed under negation (gcd classes,
        // explicit symmetric lists); re-validate anyway.
        let elements: Vec<i64> = set.iter().map(|&s| s as i64).collect();
        CirculantGraph::new(self.n, &elements).ok()
    }
}

impl fmt::Display for CirculantGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cay(Z_{}, {{{}}})", self.n, join(&self.set))
    }
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// A connection set as typed on the command line: `"1,7,9,15"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSpec(pub Vec<i64>);

impl FromStr for SetSpec {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(str::trim)
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<i64>()
                    .map_err(|_| GraphError::Parse(tok.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SetSpec)
    }
}

/// `S_n(d)`: the residues whose gcd with `n` is exactly `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GcdClass {
    pub d: usize,
    pub members: Vec<usize>,
}

pub fn gcd_class(n: usize, d: usize) -> Result<GcdClass, GraphError> {
    if d == 0 || d >= n || !n.is_multiple_of(d) {
        return Err(GraphError::NotADivisor { n, d });
    }
    let members = (1..n).filter(|x| x.gcd(&n) == d).collect();
    Ok(GcdClass { d, members })
}

/// Proper divisors of `n` in ascending order (trial division).
pub fn proper_divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small.retain(|&d| d < n);
    small
}

pub fn euler_phi(mut m: usize) -> usize {
    if m == 0 {
        return 0;
    }
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn is_power_of_two(n: usize) -> bool {
    n.is_power_of_two()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassStatus {
    Empty,
    Proper,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisorEntry {
    pub d: usize,
    pub intersection_size: usize,
    pub class_size: usize,
    pub status: ClassStatus,
}

impl DivisorEntry {
    pub fn is_proper(&self) -> bool {
        self.status == ClassStatus::Proper
    }
}

/// `|S ∩ S_n(d)|` for every proper divisor `d` of `n`, ascending in `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorProfile {
    pub n: usize,
    pub entries: Vec<DivisorEntry>,
}

impl DivisorProfile {
    pub fn entry(&self, d: usize) -> Option<&DivisorEntry> {
        self.entries.iter().find(|e| e.d == d)
    }

    pub fn intersection_size(&self, d: usize) -> usize {
        self.entry(d).map_or(0, |e| e.intersection_size)
    }

    /// Least divisor whose class is met by `S` in a non-empty proper subset.
    pub fn least_proper(&self) -> Option<&DivisorEntry> {
        self.entries.iter().find(|e| e.is_proper())
    }
}

pub fn divisor_profile(graph: &CirculantGraph) -> DivisorProfile {
    let n = graph.order();
    let entries = proper_divisors(n)
        .into_iter()
        .map(|d| {
            let class_size = euler_phi(n / d);
            let intersection_size = graph
                .connection_set()
                .iter()
                .filter(|s| s.gcd(&n) == d)
                .count();
            let status = if intersection_size == 0 {
                ClassStatus::Empty
            } else if intersection_size == class_size {
                ClassStatus::Full
            } else {
                ClassStatus::Proper
            };
            DivisorEntry {
                d,
                intersection_size,
                class_size,
                status,
            }
        })
        .collect();
    DivisorProfile { n, entries }
}

/// True iff `S` is a union of whole gcd classes.
pub fn is_gcd_set(graph: &CirculantGraph) -> bool {
    divisor_profile(graph)
        .entries
        .iter()
        .all(|e| e.status != ClassStatus::Proper)
}

/// All symmetric, non-empty connection sets of `Z_n`, in bitmask order over
/// the pairs `{s, n-s}` for `s = 1..=n/2`.
pub fn symmetric_sets(n: usize) -> impl Iterator<Item = CirculantGraph> {
    let half = n / 2;
    let pairs: u32 = half as u32;
    (1u64..(1u64 << pairs)).map(move |mask| {
        let mut elements = Vec::new();
        for bit in 0..pairs {
            if mask & (1 << bit) != 0 {
                let s = bit as i64 + 1;
                elements.push(s);
                elements.push(n as i64 - s);
            }
        }
        CirculantGraph::new(n, &elements).expect("pair construction is symmetric")
    })
}
