//! Free-face pairs, elementary and filtered collapses, and a
//! certificate-producing collapse search.

use std::collections::HashSet;
use std::fmt;

use crate::complex::{Cell, CellSet, Complex};
use crate::error::{Error, Result};
use crate::stratification::{Stratification, StratumId};

/// Default node budget for [`find_collapse`].
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// `tau` is a codimension-one face of `sigma` whose only coface in the
/// current complex is `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeFacePair {
    pub sigma: Cell,
    pub tau: Cell,
}

/// An ordered sequence of elementary collapses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CollapseCertificate {
    pub pairs: Vec<FreeFacePair>,
    /// Every pair stays inside a single stratum.
    pub filtered: bool,
    /// Stratum of each pair, when filtered.
    pub strata: Option<Vec<StratumId>>,
}

impl CollapseCertificate {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Cells removed by the certificate.
    pub fn removed(&self) -> CellSet {
        self.pairs.iter().flat_map(|p| [p.sigma, p.tau]).collect()
    }

    /// `pair <sigma> <tau> [<stratum>]` lines.
    pub fn lines(&self, complex: &Complex) -> Vec<String> {
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut line = format!("pair {} {}", complex.name(p.sigma), complex.name(p.tau));
                if let Some(s) = self.strata.as_ref().and_then(|s| s.get(i)) {
                    line.push_str(&format!(" {s}"));
                }
                line
            })
            .collect()
    }
}

/// Why a certificate pair failed to replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairFault {
    Absent(String),
    NotFree { sigma: String, tau: String },
    CrossStratum { sigma: String, tau: String },
    WrongWitness { expected: usize, found: usize },
}

impl fmt::Display for PairFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Absent(cell) => write!(f, "cell {cell} is not in the current complex"),
            Self::NotFree { sigma, tau } => write!(f, "({sigma}, {tau}) is not a free-face pair"),
            Self::CrossStratum { sigma, tau } => {
                write!(f, "{sigma} and {tau} lie in different strata")
            }
            Self::WrongWitness { expected, found } => {
                write!(f, "stratum witness S{expected} does not match S{found}")
            }
        }
    }
}

fn is_free(complex: &Complex, current: &CellSet, pair: FreeFacePair) -> bool {
    let mut up = complex.cofaces(pair.tau).iter().filter(|c| current.contains(c));
    up.next() == Some(&pair.sigma)
        && up.next().is_none()
        && !complex.cofaces(pair.sigma).iter().any(|c| current.contains(c))
}

fn free_pairs_in(complex: &Complex, current: &CellSet) -> Vec<FreeFacePair> {
    let mut out = Vec::new();
    for &tau in current {
        let mut up = complex.cofaces(tau).iter().filter(|c| current.contains(c));
        if let (Some(&sigma), None) = (up.next(), up.next()) {
            if !complex.cofaces(sigma).iter().any(|c| current.contains(c)) {
                out.push(FreeFacePair { sigma, tau });
            }
        }
    }
    out.sort();
    out
}

/// All free-face pairs of the subcomplex `k`, sorted by `(sigma, tau)`.
pub fn free_face_pairs(complex: &Complex, k: &CellSet) -> Result<Vec<FreeFacePair>> {
    complex.require_subcomplex(k)?;
    Ok(free_pairs_in(complex, k))
}

/// Replays a certificate from `k`, returning the final subcomplex or the
/// first invalid pair.
pub fn replay(
    complex: &Complex,
    k: &CellSet,
    cert: &CollapseCertificate,
    strat: Option<&Stratification>,
) -> Result<CellSet> {
    complex.require_subcomplex(k)?;
    if cert.filtered && strat.is_none() {
        return Err(Error::MissingStratification);
    }
    let mut current = k.clone();
    for (index, &pair) in cert.pairs.iter().enumerate() {
        let fault = |reason| Error::InvalidPair { index, reason };
        for cell in [pair.sigma, pair.tau] {
            if !current.contains(&cell) {
                return Err(fault(PairFault::Absent(complex.name(cell).to_string())));
            }
        }
        let names = || (complex.name(pair.sigma).to_string(), complex.name(pair.tau).to_string());
        if !complex.faces(pair.sigma).contains(&pair.tau) || !is_free(complex, &current, pair) {
            let (sigma, tau) = names();
            return Err(fault(PairFault::NotFree { sigma, tau }));
        }
        if let (true, Some(strat)) = (cert.filtered, strat) {
            if !strat.same_stratum(pair.sigma, pair.tau) {
                let (sigma, tau) = names();
                return Err(fault(PairFault::CrossStratum { sigma, tau }));
            }
            if let Some(&witness) = cert.strata.as_ref().and_then(|w| w.get(index)) {
                let found = strat.stratum_of(pair.sigma);
                if witness != found {
                    return Err(fault(PairFault::WrongWitness {
                        expected: witness.0,
                        found: found.0,
                    }));
                }
            }
        }
        current.remove(&pair.sigma);
        current.remove(&pair.tau);
    }
    Ok(current)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CollapseOutcome {
    Found(CollapseCertificate),
    /// The exhaustive search finished without reaching the target.
    NoCollapse,
    /// The node budget ran out first; the answer is unknown.
    BudgetExhausted,
}

struct Search<'a> {
    complex: &'a Complex,
    target: &'a CellSet,
    strat: Option<&'a Stratification>,
    budget: u64,
    nodes: u64,
    dead: HashSet<Vec<u64>>,
    slot: Vec<Option<usize>>,
    words: usize,
}

impl Search<'_> {
    fn key(&self, current: &CellSet) -> Vec<u64> {
        let mut bits = vec![0u64; self.words];
        for &c in current {
            if let Some(i) = self.slot[c.0] {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        bits
    }

    fn candidates(&self, current: &CellSet) -> Vec<FreeFacePair> {
        let mut pairs: Vec<FreeFacePair> = free_pairs_in(self.complex, current)
            .into_iter()
            .filter(|p| !self.target.contains(&p.sigma) && !self.target.contains(&p.tau))
            .filter(|p| self.strat.is_none_or(|s| s.same_stratum(p.sigma, p.tau)))
            .collect();
        // highest dimension first, then token order
        pairs.sort_by_key(|p| (std::cmp::Reverse(self.complex.dim(p.sigma)), *p));
        pairs
    }

    /// `Some(true)` on success (pairs pushed onto `path`), `Some(false)` when
    /// the subtree is exhausted, `None` when the budget ran out.
    fn run(&mut self, current: &mut CellSet, path: &mut Vec<FreeFacePair>) -> Option<bool> {
        if current.len() == self.target.len() {
            return Some(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let key = self.key(current);
        if self.dead.contains(&key) {
            return Some(false);
        }
        for pair in self.candidates(current) {
            current.remove(&pair.sigma);
            current.remove(&pair.tau);
            path.push(pair);
            let found = self.run(current, path);
            if found != Some(false) {
                return found;
            }
            path.pop();
            current.insert(pair.sigma);
            current.insert(pair.tau);
        }
        self.dead.insert(key);
        Some(false)
    }
}

/// Searches for a sequence of elementary collapses from `k` down to `l`.
///
/// Depth-first with backtracking over free pairs lying wholly in `k - l`,
/// highest dimension first. With a stratification only same-stratum pairs are
/// used and the certificate is filtered. States proven dead are memoized, so
/// `NoCollapse` is exact; `BudgetExhausted` means the node count exceeded
/// `budget` first.
pub fn find_collapse(
    complex: &Complex,
    k: &CellSet,
    l: &CellSet,
    strat: Option<&Stratification>,
    budget: u64,
) -> Result<CollapseOutcome> {
    complex.require_subcomplex(k)?;
    complex.require_subcomplex(l)?;
    if let Some(&extra) = l.difference(k).next() {
        return Err(Error::NotContained {
            small: complex.name(extra).to_string(),
            big: "the source subcomplex".to_string(),
        });
    }
    let removable: Vec<Cell> = k.difference(l).copied().collect();
    if removable.len() % 2 == 1 {
        return Ok(CollapseOutcome::NoCollapse);
    }
    let mut slot = vec![None; complex.len()];
    for (i, c) in removable.iter().enumerate() {
        slot[c.0] = Some(i);
    }
    let mut search = Search {
        complex,
        target: l,
        strat,
        budget,
        nodes: 0,
        dead: HashSet::new(),
        slot,
        words: removable.len().div_ceil(64).max(1),
    };
    let mut current = k.clone();
    let mut path = Vec::new();
    Ok(match search.run(&mut current, &mut path) {
        Some(true) => CollapseOutcome::Found(CollapseCertificate {
            strata: strat.map(|s| path.iter().map(|p| s.stratum_of(p.sigma)).collect()),
            filtered: strat.is_some(),
            pairs: path,
        }),
        Some(false) => CollapseOutcome::NoCollapse,
        None => CollapseOutcome::BudgetExhausted,
    })
}
