//! Halos, shadows, sublevel closures, stratified discrete Morse functions,
//! criticality, and the sublevel sweep.
//!
//! Everything here is order-theoretic: values are exact rationals and all
//! comparisons are exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::collapse::{find_collapse, replay, CollapseCertificate, CollapseOutcome, FreeFacePair};
use crate::complex::{Cell, CellSet, Complex};
use crate::error::{Error, Result};
use crate::stratification::{check_frontier, Stratification, StratumId};
use crate::value::{format_value, Value};

/// A value for every cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueMap(Vec<Value>);

impl ValueMap {
    pub fn new(complex: &Complex, values: &BTreeMap<Cell, Value>) -> Result<Self> {
        complex
            .cells()
            .map(|c| {
                values
                    .get(&c)
                    .cloned()
                    .ok_or_else(|| Error::MissingValue(complex.name(c).to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn from_fn(complex: &Complex, f: impl Fn(Cell) -> Value) -> Self {
        Self(complex.cells().map(f).collect())
    }

    pub fn value(&self, cell: Cell) -> &Value {
        &self.0[cell.0]
    }

    /// Cells sorted by increasing value, ties by token.
    pub fn ascending(&self) -> Vec<Cell> {
        let mut cells: Vec<Cell> = (0..self.0.len()).map(Cell).collect();
        cells.sort_by(|&a, &b| self.value(a).cmp(self.value(b)).then(a.cmp(&b)));
        cells
    }

    pub fn check_injective(&self, complex: &Complex) -> Result<()> {
        let cells = self.ascending();
        for w in cells.windows(2) {
            if self.value(w[0]) == self.value(w[1]) {
                return Err(Error::NotInjective {
                    first: complex.name(w[0]).to_string(),
                    second: complex.name(w[1]).to_string(),
                    value: format_value(self.value(w[0])),
                });
            }
        }
        Ok(())
    }

    /// Breaks ties by adding `k * 10^-m` to the `k`-th cell (in token order)
    /// of each group of equal values, with `m` chosen so that no strict
    /// inequality between the original values is reversed.
    pub fn tiebreak(&self) -> ValueMap {
        let cells = self.ascending();
        let mut groups: Vec<Vec<Cell>> = Vec::new();
        for &c in &cells {
            match groups.last_mut() {
                Some(g) if self.value(g[0]) == self.value(c) => g.push(c),
                _ => groups.push(vec![c]),
            }
        }
        let widest = groups.iter().map(Vec::len).max().unwrap_or(1);
        if widest <= 1 {
            return self.clone();
        }
        let gap = groups
            .windows(2)
            .map(|w| self.value(w[1][0]) - self.value(w[0][0]))
            .min();
        let spread = BigRational::from_integer(BigInt::from(widest - 1));
        let ten = BigRational::from_integer(BigInt::from(10u32));
        let mut step = BigRational::one();
        if let Some(gap) = gap {
            while &step * &spread >= gap {
                step /= &ten;
            }
        }
        let mut out = self.0.clone();
        for group in &groups {
            for (k, &c) in group.iter().enumerate() {
                out[c.0] = self.value(c) + &step * BigRational::from_integer(BigInt::from(k));
            }
        }
        ValueMap(out)
    }
}

fn require_injective(complex: &Complex, f: &ValueMap) -> Result<()> {
    f.check_injective(complex)
}

/// `st⁻(σ;f)`: strict cofaces with value at most `f(σ)`.
pub fn lower_star(complex: &Complex, f: &ValueMap, sigma: Cell) -> CellSet {
    complex
        .strict_cofaces(sigma)
        .iter()
        .filter(|&&t| f.value(t) <= f.value(sigma))
        .copied()
        .collect()
}

/// `cl⁺(σ;f)`: strict faces with value at least `f(σ)`.
pub fn upper_closure(complex: &Complex, f: &ValueMap, sigma: Cell) -> CellSet {
    complex
        .strict_faces(sigma)
        .iter()
        .filter(|&&t| f.value(t) >= f.value(sigma))
        .copied()
        .collect()
}

/// The value-minimal member of the lower star, if any.
fn lower_star_argmin(complex: &Complex, f: &ValueMap, tau: Cell) -> Option<Cell> {
    complex
        .strict_cofaces(tau)
        .iter()
        .filter(|&&t| f.value(t) <= f.value(tau))
        .min_by(|&&a, &&b| f.value(a).cmp(f.value(b)))
        .copied()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaloResult {
    pub cell: Cell,
    pub halo: CellSet,
    /// The halo together with the cell itself.
    pub augmented: CellSet,
    /// `cl(σ)` minus the augmented halo; always a subcomplex.
    pub shadow: CellSet,
}

/// Faces `τ` of `σ` whose lower star has `σ` as its unique minimum.
pub fn halo(complex: &Complex, f: &ValueMap, sigma: Cell) -> Result<HaloResult> {
    require_injective(complex, f)?;
    Ok(halo_unchecked(complex, f, sigma))
}

fn halo_unchecked(complex: &Complex, f: &ValueMap, sigma: Cell) -> HaloResult {
    let halo: CellSet = complex
        .strict_faces(sigma)
        .iter()
        .filter(|&&tau| lower_star_argmin(complex, f, tau) == Some(sigma))
        .copied()
        .collect();
    let mut augmented = halo.clone();
    augmented.insert(sigma);
    let shadow = complex
        .closure_of(sigma)
        .difference(&augmented)
        .copied()
        .collect();
    HaloResult {
        cell: sigma,
        halo,
        augmented,
        shadow,
    }
}

/// `cl(f_{≤ t})`.
pub fn sublevel_closure(complex: &Complex, f: &ValueMap, threshold: &Value) -> CellSet {
    let sub: CellSet = complex.cells().filter(|&c| f.value(c) <= threshold).collect();
    complex.closure(&sub)
}

/// Half the distance from `center` to the nearest other value, or 1 when no
/// other value exists.
pub fn choose_epsilon(complex: &Complex, f: &ValueMap, center: &Value) -> Result<Value> {
    if !complex.cells().any(|c| f.value(c) == center) {
        return Err(Error::NotAttained(format_value(center)));
    }
    let two = BigRational::from_integer(BigInt::from(2u32));
    Ok(complex
        .cells()
        .map(|c| f.value(c))
        .filter(|&v| v != center)
        .map(|v| {
            let d = v - center;
            if d < BigRational::zero() {
                -d
            } else {
                d
            }
        })
        .min()
        .map(|gap| gap / two)
        .unwrap_or_else(BigRational::one))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaResult {
    pub cell: Cell,
    /// `cl(f_{≤hi}) - cl(f_{≤lo})`.
    pub delta: CellSet,
    /// Whether the cell was already present below, in which case `delta` is empty;
    /// otherwise `delta` is the augmented halo.
    pub already_present: bool,
}

/// Difference of sublevel closures across an interval containing one value,
/// cross-checked against the halo case analysis.
pub fn delta(complex: &Complex, f: &ValueMap, lo: &Value, hi: &Value) -> Result<DeltaResult> {
    require_injective(complex, f)?;
    let inside: Vec<Cell> = complex
        .cells()
        .filter(|&c| f.value(c) >= lo && f.value(c) <= hi)
        .collect();
    let [sigma] = inside[..] else {
        return Err(Error::Interval {
            lo: format_value(lo),
            hi: format_value(hi),
            count: inside.len(),
        });
    };
    let below = sublevel_closure(complex, f, lo);
    let above = sublevel_closure(complex, f, hi);
    let direct: CellSet = above.difference(&below).copied().collect();
    let already_present = below.contains(&sigma);
    let expected = if already_present {
        CellSet::new()
    } else {
        halo_unchecked(complex, f, sigma).augmented
    };
    if direct != expected {
        return Err(Error::Invariant(format!(
            "sublevel difference at {} disagrees with the halo case analysis",
            complex.name(sigma)
        )));
    }
    Ok(DeltaResult {
        cell: sigma,
        delta: direct,
        already_present,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    /// Paired with a face in its stratum.
    PairedBelow,
    /// Paired with a coface in its stratum.
    PairedAbove,
    Critical,
    /// Critical with an empty lower star.
    SCritical,
    /// More than one exceptional neighbour in its stratum.
    Conflicted,
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PairedBelow => "paired-below",
            Self::PairedAbove => "paired-above",
            Self::Critical => "critical",
            Self::SCritical => "s-critical",
            Self::Conflicted => "conflicted",
        })
    }
}

/// A failed rule for one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// More than one exceptional face or coface inside the stratum.
    Forman { faces: CellSet, cofaces: CellSet },
    /// The stratum partner is not in the halo.
    PartnerNotInHalo { partner: Cell },
    /// `cl(σ)` has no filtered collapse onto the shadow.
    NoFilteredCollapse,
    /// The collapse search ran out of budget.
    CollapseUndecided,
    /// A collapse certificate that does not start with `(σ, partner)`.
    FirstPair { found: FreeFacePair },
    /// Empty lower star disagrees with lying in no halo.
    HaloMembershipMismatch,
}

impl Violation {
    pub fn describe(&self, complex: &Complex) -> String {
        let list = |s: &CellSet| complex.names(s).join(",");
        match self {
            Self::Forman { faces, cofaces } => format!(
                "forman-condition upper-closure={{{}}} lower-star={{{}}}",
                list(faces),
                list(cofaces)
            ),
            Self::PartnerNotInHalo { partner } => {
                format!("partner-not-in-halo partner={}", complex.name(*partner))
            }
            Self::NoFilteredCollapse => "no-filtered-collapse-onto-shadow".to_string(),
            Self::CollapseUndecided => "collapse-search-budget-exhausted".to_string(),
            Self::FirstPair { found } => format!(
                "first-pair found=({},{})",
                complex.name(found.sigma),
                complex.name(found.tau)
            ),
            Self::HaloMembershipMismatch => "halo-membership-mismatch".to_string(),
        }
    }

    fn is_undecided(&self) -> bool {
        matches!(self, Self::CollapseUndecided)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRecord {
    pub cell: Cell,
    pub stratum: StratumId,
    pub status: CellStatus,
    pub partner: Option<Cell>,
    /// `cl(σ) ↝ sh(σ;f)` for cells paired with a face.
    pub certificate: Option<CollapseCertificate>,
    pub failures: Vec<Violation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Valid => "valid",
            Self::Invalid => "invalid",
            Self::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseReport {
    /// One record per cell, in token order.
    pub records: Vec<CellRecord>,
    pub verdict: Verdict,
}

impl MorseReport {
    pub fn record(&self, cell: Cell) -> &CellRecord {
        &self.records[cell.0]
    }

    fn with_verdict(records: Vec<CellRecord>) -> Self {
        let failures = || records.iter().flat_map(|r| &r.failures);
        let verdict = if failures().any(|v| !v.is_undecided()) {
            Verdict::Invalid
        } else if failures().next().is_some() {
            Verdict::Inconclusive
        } else {
            Verdict::Valid
        };
        Self { records, verdict }
    }
}

fn classify_cell(complex: &Complex, strat: &Stratification, f: &ValueMap, sigma: Cell) -> CellRecord {
    let stratum = strat.stratum_of(sigma);
    let in_stratum = |s: CellSet| -> CellSet {
        s.into_iter().filter(|&c| strat.get_stratum_of(c) == Some(stratum)).collect()
    };
    let star = lower_star(complex, f, sigma);
    let star_empty = star.is_empty();
    let faces = in_stratum(upper_closure(complex, f, sigma));
    let cofaces = in_stratum(star);
    let mut failures = Vec::new();
    let (status, partner) = match (faces.len(), cofaces.len()) {
        (0, 0) if star_empty => (CellStatus::SCritical, None),
        (0, 0) => (CellStatus::Critical, None),
        (1, 0) => (CellStatus::PairedBelow, faces.first().copied()),
        (0, 1) => (CellStatus::PairedAbove, cofaces.first().copied()),
        _ => {
            failures.push(Violation::Forman { faces, cofaces });
            (CellStatus::Conflicted, None)
        }
    };
    // an empty lower star is the same as lying in no halo
    let in_some_halo = lower_star_argmin(complex, f, sigma).is_some_and(|tau| {
        halo_unchecked(complex, f, tau).halo.contains(&sigma)
    });
    if in_some_halo == star_empty {
        failures.push(Violation::HaloMembershipMismatch);
    }
    CellRecord {
        cell: sigma,
        stratum,
        status,
        partner,
        certificate: None,
        failures,
    }
}

/// Statuses from the stratum-wise Forman condition alone.
pub fn classify(complex: &Complex, strat: &Stratification, f: &ValueMap) -> Result<MorseReport> {
    require_injective(complex, f)?;
    let records = complex
        .cells()
        .map(|c| classify_cell(complex, strat, f, c))
        .collect();
    Ok(MorseReport::with_verdict(records))
}

/// Checks both conditions of a stratified discrete Morse function and keeps
/// the collapse certificates of paired cells.
pub fn validate_sdmf(
    complex: &Complex,
    strat: &Stratification,
    f: &ValueMap,
    budget: u64,
) -> Result<MorseReport> {
    require_injective(complex, f)?;
    if let Some(v) = check_frontier(complex, strat).violations.first() {
        return Err(Error::FrontierViolated {
            cell: complex.name(v.cell).to_string(),
            stratum: v.stratum.0,
        });
    }
    let mut records = Vec::with_capacity(complex.len());
    for sigma in complex.cells() {
        let mut record = classify_cell(complex, strat, f, sigma);
        if let (CellStatus::PairedBelow, Some(tau)) = (record.status, record.partner) {
            let h = halo_unchecked(complex, f, sigma);
            if !h.halo.contains(&tau) {
                record.failures.push(Violation::PartnerNotInHalo { partner: tau });
            }
            let closure = complex.closure_of(sigma);
            match find_collapse(complex, &closure, &h.shadow, Some(strat), budget)? {
                CollapseOutcome::Found(cert) => {
                    let first = FreeFacePair { sigma, tau };
                    if let Some(&found) = cert.pairs.first() {
                        if found != first {
                            record.failures.push(Violation::FirstPair { found });
                        }
                    }
                    record.certificate = Some(cert);
                }
                CollapseOutcome::NoCollapse => record.failures.push(Violation::NoFilteredCollapse),
                CollapseOutcome::BudgetExhausted => {
                    record.failures.push(Violation::CollapseUndecided)
                }
            }
        }
        records.push(record);
    }
    Ok(MorseReport::with_verdict(records))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    /// The cell was already in the sublevel closure below.
    NoChange,
    /// A filtered collapse from above onto below.
    RegularCollapse { certificate: CollapseCertificate },
    /// Above is `cl(σ) ∪ below`, glued along `sh(σ;f) = cl(σ) ∩ below`.
    Attachment { closure: CellSet, shadow: CellSet },
    /// A replay or set identity failed.
    TheoremViolation { reason: String },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NoChange => "no-change",
            Self::RegularCollapse { .. } => "regular-collapse",
            Self::Attachment { .. } => "s-critical-attachment",
            Self::TheoremViolation { .. } => "theorem-violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepEvent {
    pub cell: Cell,
    pub value: Value,
    pub epsilon: Value,
    /// `cl(f_{≤ c-ε})`.
    pub below: CellSet,
    /// `cl(f_{≤ c+ε})`.
    pub above: CellSet,
    pub kind: EventKind,
}

/// Sweeps the sublevel closures in increasing value order. Refuses to run
/// unless the function validates.
pub fn sweep(
    complex: &Complex,
    strat: &Stratification,
    f: &ValueMap,
    budget: u64,
) -> Result<Vec<SweepEvent>> {
    let report = validate_sdmf(complex, strat, f, budget)?;
    match report.verdict {
        Verdict::Valid => Ok(sweep_validated(complex, strat, f, &report)),
        Verdict::Invalid => Err(Error::NotValidMorse("invalid")),
        Verdict::Inconclusive => Err(Error::NotValidMorse("inconclusive")),
    }
}

/// Sweep driven by an existing valid report, reusing its certificates.
pub fn sweep_validated(
    complex: &Complex,
    strat: &Stratification,
    f: &ValueMap,
    report: &MorseReport,
) -> Vec<SweepEvent> {
    f.ascending()
        .into_iter()
        .map(|sigma| {
            let value = f.value(sigma).clone();
            let epsilon =
                choose_epsilon(complex, f, &value).expect("value of a cell is attained");
            let below = sublevel_closure(complex, f, &(&value - &epsilon));
            let above = sublevel_closure(complex, f, &(&value + &epsilon));
            let record = report.record(sigma);
            let kind = sweep_kind(complex, strat, f, sigma, record, &below, &above);
            SweepEvent {
                cell: sigma,
                value,
                epsilon,
                below,
                above,
                kind,
            }
        })
        .collect()
}

fn sweep_kind(
    complex: &Complex,
    strat: &Stratification,
    f: &ValueMap,
    sigma: Cell,
    record: &CellRecord,
    below: &CellSet,
    above: &CellSet,
) -> EventKind {
    let name = complex.name(sigma);
    let violation = |reason: String| EventKind::TheoremViolation { reason };
    if below.contains(&sigma) {
        return if above == below {
            EventKind::NoChange
        } else {
            violation(format!("{name} already present but the sublevel closure grew"))
        };
    }
    if record.status != CellStatus::SCritical {
        let Some(cert) = &record.certificate else {
            return violation(format!("{name} is regular but has no collapse certificate"));
        };
        return match replay(complex, above, cert, Some(strat)) {
            Ok(rest) if &rest == below => EventKind::RegularCollapse {
                certificate: cert.clone(),
            },
            Ok(_) => violation(format!("collapse at {name} does not end at the lower closure")),
            Err(e) => violation(format!("collapse at {name} failed to replay: {e}")),
        };
    }
    let closure = complex.closure_of(sigma);
    let shadow = halo_unchecked(complex, f, sigma).shadow;
    let union: CellSet = closure.union(below).copied().collect();
    let meet: CellSet = closure.intersection(below).copied().collect();
    if &union != above {
        violation(format!("union identity fails at {name}"))
    } else if meet != shadow {
        violation(format!("intersection identity fails at {name}"))
    } else {
        EventKind::Attachment { closure, shadow }
    }
}
