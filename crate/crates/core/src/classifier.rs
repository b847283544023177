//! Decision procedure for antipodal state transfer on `Cay(Z_n, S)`.
//!
//! Rules are tried in order and the first one that fires wins:
//!
//! 1. odd `n`: no pretty good state transfer (PGST) at all, since a
//!    circulant can only transfer between antipodal vertices `u`, `u + n/2`;
//! 2. two equal eigenvalues at indices of opposite parity: no PGST;
//! 3. cycles: PGST iff `n = 2^k`, `k >= 2`, perfect (PST) for `n = 2, 4`;
//! 4. `n = 2^k`, `S` not a gcd-set: decided by the size mod 4 of the
//!    intersection of `S` with the least partially-covered gcd class (T2),
//!    with the least partially-covered class of size `2 mod 4` (T3), or by the
//!    `{n/2, n/4}` parity condition (T4);
//! 5. `n = 2^k`, `S` a gcd-set: the T4 condition plus periodicity at `2π`
//!    gives PST;
//! 6. anything else is `Unknown`.
//!
//! "Least" always means numerically smallest divisor. The obstruction in
//! rule 2 compares floating-point eigenvalues, so verdicts from it carry
//! `numeric_caveat = true`.

use serde::Serialize;

use crate::diophantine::{
    best_time_on_lattice, first_time_reaching, LatticeKind, QRange, SearchError,
};
use crate::dynamics::TransferRecord;
use crate::graph::{divisor_profile, CirculantGraph, ClassStatus, DivisorEntry, DivisorProfile};
use crate::spectral::{first_parity_conflict, spectrum, ParityConflict, DEFAULT_EQUALITY_TOL};

/// Fidelity that counts as perfect transfer when verifying a PST verdict.
pub const PST_FIDELITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "PST")]
    Pst,
    #[serde(rename = "PGST")]
    Pgst,
    AlmostPeriodic,
    #[serde(rename = "NoPGST")]
    NoPgst,
    Unknown,
}

impl Verdict {
    pub fn transfers(self) -> bool {
        matches!(self, Verdict::Pst | Verdict::Pgst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Citation {
    T1,
    T2,
    T3,
    T4,
    ParityObstruction,
    LemmaL1,
    #[serde(rename = "So_IP2_upgrade")]
    SoIp2Upgrade,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub citation: Citation,
    pub witness_divisor: Option<usize>,
    pub pair: Option<(usize, usize)>,
    pub lattice: Option<LatticeKind>,
    pub numeric_caveat: bool,
    pub obstruction: Option<ParityConflict>,
}

impl Classification {
    fn new(verdict: Verdict, citation: Citation) -> Self {
        Classification {
            verdict,
            citation,
            witness_divisor: None,
            pair: None,
            lattice: None,
            numeric_caveat: false,
            obstruction: None,
        }
    }

    fn transfer(verdict: Verdict, citation: Citation, n: usize, lattice: LatticeKind) -> Self {
        Classification {
            pair: Some((0, n / 2)),
            lattice: Some(lattice),
            ..Classification::new(verdict, citation)
        }
    }

    fn witness(mut self, d: usize) -> Self {
        self.witness_divisor = Some(d);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    /// Two eigenvalues closer than this are treated as equal.
    pub equality_tol: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            equality_tol: DEFAULT_EQUALITY_TOL,
        }
    }
}

/// Least divisor `d` whose class is met properly with `|S ∩ S_n(d)| ≡ 2 (mod 4)`.
fn least_proper_two_mod_four(profile: &DivisorProfile) -> Option<&DivisorEntry> {
    profile
        .entries
        .iter()
        .find(|e| e.is_proper() && e.intersection_size % 4 == 2)
}

/// The `{n/2, n/4}` parity condition for `n = 2^k`, `k >= 2`.
fn t4_condition(graph: &CirculantGraph, profile: &DivisorProfile) -> Result<(), String> {
    let n = graph.order();
    if !n.is_power_of_two() || n < 4 {
        return Err(format!("n = {n} is not 2^k with k >= 2"));
    }
    let (half, quarter) = (n / 2, n / 4);
    let hits = [half, quarter]
        .iter()
        .filter(|&&s| graph.contains(s))
        .count();
    if hits % 2 != 1 {
        return Err(format!("|{{{half},{quarter}}} ∩ S| = {hits} is even"));
    }
    for e in &profile.entries {
        if e.d != half && e.d != quarter && e.intersection_size % 4 != 0 {
            return Err(format!(
                "|S∩S_{n}({})| = {} ≢ 0 mod 4",
                e.d, e.intersection_size
            ));
        }
    }
    Ok(())
}

pub fn classify(graph: &CirculantGraph) -> Classification {
    classify_with(graph, &ClassifierConfig::default())
}

pub fn classify_with(graph: &CirculantGraph, config: &ClassifierConfig) -> Classification {
    let n = graph.order();

    if n % 2 == 1 {
        return Classification::new(Verdict::NoPgst, Citation::LemmaL1);
    }

    if let Some(conflict) = first_parity_conflict(&spectrum(graph), config.equality_tol) {
        return Classification {
            pair: Some((0, n / 2)),
            numeric_caveat: true,
            obstruction: Some(conflict),
            ..Classification::new(Verdict::NoPgst, Citation::ParityObstruction)
        };
    }

    if graph.is_cycle() {
        return match n {
            2 => Classification::transfer(Verdict::Pst, Citation::T4, n, LatticeKind::OddHalfPi),
            4 => Classification::transfer(Verdict::Pst, Citation::T1, n, LatticeKind::OddHalfPi),
            _ if n.is_power_of_two() => {
                Classification::transfer(Verdict::Pgst, Citation::T1, n, LatticeKind::TwoPiZ)
            }
            _ => Classification {
                pair: Some((0, n / 2)),
                ..Classification::new(Verdict::NoPgst, Citation::T1)
            },
        };
    }

    if !n.is_power_of_two() {
        return Classification::new(Verdict::Unknown, Citation::None);
    }

    let profile = divisor_profile(graph);
    match profile.least_proper() {
        Some(least) => {
            if least.intersection_size % 4 == 2 {
                return Classification::transfer(
                    Verdict::Pgst,
                    Citation::T2,
                    n,
                    LatticeKind::TwoPiZ,
                )
                .witness(least.d);
            }
            if let Some(entry) = least_proper_two_mod_four(&profile) {
                return Classification::transfer(
                    Verdict::Pgst,
                    Citation::T3,
                    n,
                    LatticeKind::TwoPiZ,
                )
                .witness(entry.d);
            }
            if t4_condition(graph, &profile).is_ok() {
                return Classification::transfer(
                    Verdict::Pgst,
                    Citation::T4,
                    n,
                    LatticeKind::OddHalfPi,
                );
            }
            // sizes in classes below n/2 are even, so this is the 0 mod 4 branch
            Classification {
                lattice: Some(LatticeKind::TwoPiZ),
                ..Classification::new(Verdict::AlmostPeriodic, Citation::T2)
            }
            .witness(least.d)
        }
        None => {
            if t4_condition(graph, &profile).is_ok() {
                Classification::transfer(
                    Verdict::Pst,
                    Citation::SoIp2Upgrade,
                    n,
                    LatticeKind::OddHalfPi,
                )
            } else {
                Classification::new(Verdict::Unknown, Citation::None)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Holds,
    Fails,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    fn holds(detail: impl Into<String>) -> Self {
        Check {
            status: CheckStatus::Holds,
            detail: detail.into(),
        }
    }

    fn fails(detail: impl Into<String>) -> Self {
        Check {
            status: CheckStatus::Fails,
            detail: detail.into(),
        }
    }

    fn not_applicable(detail: impl Into<String>) -> Self {
        Check {
            status: CheckStatus::NotApplicable,
            detail: detail.into(),
        }
    }
}

/// Which hypothesis of which result holds or fails for a graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub even_order: Check,
    pub parity_obstruction: Check,
    pub t1: Check,
    pub t2: Check,
    pub t3: Check,
    pub t4: Check,
    pub integral: bool,
    pub least_proper_divisor: Option<DivisorEntry>,
}

pub fn hypothesis_report(graph: &CirculantGraph) -> HypothesisReport {
    hypothesis_report_with(graph, &ClassifierConfig::default())
}

pub fn hypothesis_report_with(
    graph: &CirculantGraph,
    config: &ClassifierConfig,
) -> HypothesisReport {
    let n = graph.order();
    let profile = divisor_profile(graph);
    let integral = profile
        .entries
        .iter()
        .all(|e| e.status != ClassStatus::Proper);
    let least = profile.least_proper().copied();
    let power = n.is_power_of_two();

    let even_order = if n.is_multiple_of(2) {
        Check::holds(format!("n = {n} is even; antipodal pair (0, {})", n / 2))
    } else {
        Check::fails(format!("n = {n} is odd; no antipodal pair"))
    };

    let parity_obstruction = match first_parity_conflict(&spectrum(graph), config.equality_tol) {
        Some(c) => Check::holds(format!(
            "θ_{} = θ_{} = {} at indices of opposite parity",
            c.l, c.l_prime, c.value
        )),
        None => Check::fails("no equal eigenvalues at indices of opposite parity"),
    };

    let t1 = if !graph.is_cycle() {
        Check::not_applicable("S is not {1, n-1}")
    } else if power && n >= 4 {
        Check::holds(format!("cycle with n = {n} = 2^{}", n.trailing_zeros()))
    } else if n == 2 {
        Check::not_applicable("n = 2 is the path P_2")
    } else {
        Check::fails(format!("cycle with n = {n} not a power of two"))
    };

    let (t2, t3) = if !power {
        (
            Check::not_applicable(format!("n = {n} is not a power of two")),
            Check::not_applicable(format!("n = {n} is not a power of two")),
        )
    } else if let Some(e) = least {
        let t2 = if e.intersection_size % 4 == 2 {
            Check::holds(format!(
                "least proper divisor d={}, |S∩S_{n}({})| = {} ≡ 2 mod 4",
                e.d, e.d, e.intersection_size
            ))
        } else {
            Check::fails(format!(
                "least proper divisor d={}, |S∩S_{n}({})| = {} ≡ 0 mod 4: almost periodic branch",
                e.d, e.d, e.intersection_size
            ))
        };
        let t3 = match least_proper_two_mod_four(&profile) {
            Some(w) => Check::holds(format!(
                "least proper divisor with size ≡ 2 mod 4 is d={}, |S∩S_{n}({})| = {}",
                w.d, w.d, w.intersection_size
            )),
            None => Check::fails("every proper intersection has size ≡ 0 mod 4"),
        };
        (t2, t3)
    } else {
        (
            Check::not_applicable("S is a gcd-set (graph is integral)"),
            Check::not_applicable("S is a gcd-set (graph is integral)"),
        )
    };

    let t4 = match t4_condition(graph, &profile) {
        Ok(()) => {
            let rest = profile
                .entries
                .iter()
                .filter(|e| e.d != n / 2 && e.d != n / 4)
                .count();
            if rest == 0 {
                Check::holds(format!(
                    "|{{{},{}}} ∩ S| odd; no other divisors (vacuous)",
                    n / 2,
                    n / 4
                ))
            } else {
                Check::holds(format!(
                    "|{{{},{}}} ∩ S| odd; all other divisors have size ≡ 0 mod 4",
                    n / 2,
                    n / 4
                ))
            }
        }
        Err(reason) if !power || n < 4 => Check::not_applicable(reason),
        Err(reason) => Check::fails(reason),
    };

    HypothesisReport {
        even_order,
        parity_obstruction,
        t1,
        t2,
        t3,
        t4,
        integral,
        least_proper_divisor: least,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyBudget {
    /// Largest lattice index searched.
    pub q_max: i64,
}

impl Default for VerifyBudget {
    fn default() -> Self {
        VerifyBudget { q_max: 100_000 }
    }
}

/// Numerical evidence gathered for a verdict. Never changes the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub lattice: Option<LatticeKind>,
    pub q_range: Option<(i64, i64)>,
    /// Highest fidelity found on the scanned range.
    pub peak: Option<TransferRecord>,
    /// First time with fidelity within [`PST_FIDELITY_TOL`] of 1 (PST only).
    pub pst_time: Option<TransferRecord>,
    /// Upper bound on the antipodal fidelity implied by an obstruction.
    pub analytic_ceiling: Option<f64>,
    pub obstruction: Option<ParityConflict>,
    /// The budget ran out before the required evidence was found.
    pub budget_exhausted: bool,
    pub note: String,
}

pub fn verify_classification(
    graph: &CirculantGraph,
    classification: &Classification,
    budget: VerifyBudget,
) -> Result<Evidence, SearchError> {
    let n = graph.order();
    let mut evidence = Evidence {
        lattice: None,
        q_range: None,
        peak: None,
        pst_time: None,
        analytic_ceiling: None,
        obstruction: classification.obstruction,
        budget_exhausted: false,
        note: String::new(),
    };
    if n % 2 == 1 {
        evidence.note = "odd order: no antipodal vertex to search".into();
        return Ok(evidence);
    }
    let (u, v) = classification.pair.unwrap_or((0, n / 2));
    let kind = classification.lattice.unwrap_or(LatticeKind::TwoPiZ);
    let lattice = kind.lattice();
    let q_min = kind.default_qmin();
    let q_max = budget.q_max.max(q_min);
    let range = QRange::new(q_min, q_max)?;
    evidence.lattice = Some(kind);
    evidence.q_range = Some((q_min, q_max));
    evidence.peak = Some(best_time_on_lattice(graph, u, v, &lattice, range)?);

    match classification.verdict {
        Verdict::Pst => {
            evidence.pst_time =
                first_time_reaching(graph, u, v, &lattice, range, 1.0 - PST_FIDELITY_TOL)?;
            evidence.budget_exhausted = evidence.pst_time.is_none();
            evidence.note = match evidence.pst_time {
                Some(r) => format!("fidelity {} at q = {:?}", r.fidelity, r.q),
                None => "no fidelity-1 time found within budget".into(),
            };
        }
        Verdict::Pgst => {
            evidence.note = "peak fidelity over the declared lattice".into();
        }
        Verdict::NoPgst => {
            if let Some(c) = classification.obstruction {
                // the two conflicting terms of the antipodal Fourier sum cancel
                evidence.analytic_ceiling = Some((n as f64 - 2.0) / n as f64);
                evidence.note = format!(
                    "θ_{} = θ_{} forces opposite limit phases; scan ceiling reported",
                    c.l, c.l_prime
                );
            } else {
                evidence.note = "scan ceiling on 2piZ".into();
            }
        }
        Verdict::AlmostPeriodic | Verdict::Unknown => {
            evidence.note = "undecided; scan ceiling on 2piZ".into();
        }
    }
    Ok(evidence)
}
