//! Barycentric subdivision, upper envelopes, links, lower links and the
//! horizontal/vertical splitting of a lower link.
//!
//! The subdivision is materialized as an ordinary [`Complex`] whose cells are
//! the strictly ascending chains of the base face poset, named by chain
//! tokens such as `[a<ab<F]`. Sets of simplices are therefore plain
//! [`CellSet`]s over [`SdComplex::complex`].

use std::collections::{BTreeMap, HashMap};

use crate::complex::{Cell, CellSet, Complex, ComplexViolation, ValidationReport};
use crate::error::{Error, Result};
use crate::morse::{choose_epsilon, classify, CellStatus, ValueMap};
use crate::stratification::{
    check_frontier, check_stratum_frontier, compute_strata, stratum_order_coarse, FrontierReport,
    LevelMap, Stratification, StratumId, StratumOrder,
};

/// Token of a chain: `[σ0<σ1<...]`.
pub fn chain_token(base: &Complex, chain: &[Cell]) -> String {
    let names: Vec<&str> = chain.iter().map(|&c| base.name(c)).collect();
    format!("[{}]", names.join("<"))
}

#[derive(Debug, Clone)]
pub struct SdComplex {
    base: Complex,
    complex: Complex,
    /// Chain of each simplex, indexed by simplex.
    chains: Vec<Vec<Cell>>,
    lookup: HashMap<Vec<Cell>, Cell>,
    base_strat: Stratification,
    strat: Stratification,
}

pub struct SdCheck {
    pub structure: ValidationReport<ComplexViolation>,
    /// Holds whenever the base stratification satisfies the frontier axiom.
    pub strata_frontier: FrontierReport,
    /// Usually fails: a chain `[a<F]` reaches a lower stratum only at `[a]`.
    pub cell_frontier: FrontierReport,
}

/// Every strictly ascending chain of the face order, each listed once.
fn all_chains(base: &Complex) -> Vec<Vec<Cell>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Cell>> = base.cells().map(|c| vec![c]).collect();
    while let Some(chain) = stack.pop() {
        let top = *chain.last().expect("chains are nonempty");
        for &next in base.strict_cofaces(top) {
            let mut longer = chain.clone();
            longer.push(next);
            stack.push(longer);
        }
        out.push(chain);
    }
    out
}

impl SdComplex {
    pub fn base(&self) -> &Complex {
        &self.base
    }

    /// The subdivision as a simplicial complex.
    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn chain(&self, simplex: Cell) -> &[Cell] {
        &self.chains[simplex.0]
    }

    pub fn last_cell(&self, simplex: Cell) -> Cell {
        *self.chains[simplex.0].last().expect("chains are nonempty")
    }

    /// The simplex of a chain, if it is one.
    pub fn simplex(&self, chain: &[Cell]) -> Option<Cell> {
        self.lookup.get(chain).copied()
    }

    /// The barycenter `[σ]`.
    pub fn vertex(&self, sigma: Cell) -> Cell {
        self.lookup[&vec![sigma]]
    }

    pub fn token(&self, simplex: Cell) -> &str {
        self.complex.name(simplex)
    }

    pub fn tokens<'a>(&'a self, set: &'a CellSet) -> Vec<&'a str> {
        self.complex.names(set)
    }

    /// Stratification of the base that the subdivision inherits from.
    pub fn base_stratification(&self) -> &Stratification {
        &self.base_strat
    }

    /// Inherited stratification: a simplex sits at the level of its last cell.
    pub fn stratification(&self) -> &Stratification {
        &self.strat
    }

    /// Stratum of the subdivision made of the chains ending in the base
    /// stratum of `sigma`.
    pub fn stratum_of_cell(&self, sigma: Cell) -> StratumId {
        self.strat.stratum_of(self.vertex(sigma))
    }

    /// Structural validation of the subdivision together with the stratum-wise
    /// and cell-wise frontier checks of the inherited stratification.
    pub fn check(&self) -> SdCheck {
        SdCheck {
            structure: self.complex.validate(),
            strata_frontier: check_stratum_frontier(&self.complex, &self.strat),
            cell_frontier: check_frontier(&self.complex, &self.strat),
        }
    }

    /// Chain union of two simplices, if it is a chain.
    fn merge(&self, a: Cell, b: Cell) -> Option<Cell> {
        let mut merged: Vec<Cell> = self.chain(a).iter().chain(self.chain(b)).copied().collect();
        merged.sort_by_key(|&c| (self.base.dim(c), c));
        merged.dedup();
        if merged.windows(2).all(|w| self.base.lt(w[0], w[1])) {
            self.simplex(&merged)
        } else {
            None
        }
    }
}

/// Builds the order complex of the face poset with the stratification
/// carried over through the last-cell map. Without a stratification the base
/// is given the trivial one.
pub fn barycentric_subdivide(base: &Complex, strat: Option<&Stratification>) -> Result<SdComplex> {
    let base_strat = match strat {
        Some(s) => s.clone(),
        None => compute_strata(base, &LevelMap::trivial(base))?,
    };
    let chains = all_chains(base);
    let cells: Vec<(String, usize)> = chains
        .iter()
        .map(|ch| (chain_token(base, ch), ch.len() - 1))
        .collect();
    let mut covering = Vec::new();
    for ch in chains.iter().filter(|ch| ch.len() > 1) {
        let parent = chain_token(base, ch);
        for skip in 0..ch.len() {
            let face: Vec<Cell> = (0..ch.len()).filter(|&i| i != skip).map(|i| ch[i]).collect();
            covering.push((parent.clone(), chain_token(base, &face)));
        }
    }
    let complex = Complex::new(cells, covering)?;
    let mut ordered = vec![Vec::new(); chains.len()];
    let mut lookup = HashMap::with_capacity(chains.len());
    for ch in chains {
        let simplex = complex.cell(&chain_token(base, &ch))?;
        lookup.insert(ch.clone(), simplex);
        ordered[simplex.0] = ch;
    }
    let levels: BTreeMap<Cell, u32> = complex
        .cells()
        .map(|s| (s, base_strat.level(*ordered[s.0].last().expect("nonempty"))))
        .collect();
    let strat = compute_strata(&complex, &LevelMap::new(&complex, &levels)?)?;
    Ok(SdComplex {
        base: base.clone(),
        complex,
        chains: ordered,
        lookup,
        base_strat,
        strat,
    })
}

/// `Sd(K)` for a subcomplex `K` of the base: chains whose last cell is in `K`.
pub fn subdivide_subcomplex(sd: &SdComplex, k: &CellSet) -> Result<CellSet> {
    sd.base().require_subcomplex(k)?;
    Ok(sd
        .complex()
        .cells()
        .filter(|&s| k.contains(&sd.last_cell(s)))
        .collect())
}

/// `Û f`: the maximum of `f` along each chain.
pub fn upper_envelope(sd: &SdComplex, f: &ValueMap) -> Result<ValueMap> {
    let env = ValueMap::from_fn(sd.complex(), |s| {
        sd.chain(s)
            .iter()
            .map(|&c| f.value(c))
            .max()
            .expect("nonempty")
            .clone()
    });
    for (upper, lower) in sd.complex().covering_pairs() {
        if env.value(lower) > env.value(upper) {
            return Err(Error::Invariant(format!(
                "upper envelope decreases from {} to {}",
                sd.token(lower),
                sd.token(upper)
            )));
        }
    }
    Ok(env)
}

/// `{ξ : env(ξ) ≤ t}`.
pub fn envelope_sublevel(sd: &SdComplex, env: &ValueMap, threshold: &crate::value::Value) -> CellSet {
    let out: CellSet = sd
        .complex()
        .cells()
        .filter(|&s| env.value(s) <= threshold)
        .collect();
    debug_assert!(sd.complex().is_subcomplex(&out));
    out
}

/// Where a link simplex would receive `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    /// Every entry lies above `σ`.
    Begin,
    /// Every entry lies below `σ`.
    End,
    /// `σ` goes strictly between two entries.
    Middle,
}

/// Chains that omit `σ` and stay chains when `σ` is inserted.
pub fn link_of_vertex(sd: &SdComplex, sigma: Cell) -> CellSet {
    let base = sd.base();
    sd.complex()
        .cells()
        .filter(|&s| {
            let ch = sd.chain(s);
            !ch.contains(&sigma) && ch.iter().all(|&c| base.comparable(c, sigma))
        })
        .collect()
}

/// Trichotomy of a link simplex.
pub fn link_kind(sd: &SdComplex, sigma: Cell, simplex: Cell) -> LinkKind {
    let ch = sd.chain(simplex);
    let base = sd.base();
    if base.lt(sigma, ch[0]) {
        LinkKind::Begin
    } else if base.lt(*ch.last().expect("nonempty"), sigma) {
        LinkKind::End
    } else {
        LinkKind::Middle
    }
}

/// `lk[σ] ∩ Û f_{<f(σ)}`.
pub fn lower_link(sd: &SdComplex, env: &ValueMap, sigma: Cell) -> CellSet {
    let c = env.value(sd.vertex(sigma));
    link_of_vertex(sd, sigma)
        .into_iter()
        .filter(|&s| env.value(s) < c)
        .collect()
}

/// `K ⋆ L`: both parts together with all chain unions.
pub fn join(sd: &SdComplex, k: &CellSet, l: &CellSet) -> Result<CellSet> {
    let mut out: CellSet = k.union(l).copied().collect();
    for &a in k {
        for &b in l {
            match sd.merge(a, b) {
                Some(s) => {
                    out.insert(s);
                }
                None => {
                    return Err(Error::InvalidChain(format!(
                        "{} and {} do not combine into a chain",
                        sd.token(a),
                        sd.token(b)
                    )))
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HvSplit {
    pub lower_link: CellSet,
    /// Chains lying below `σ`.
    pub horizontal: CellSet,
    /// Chains lying above `σ`.
    pub vertical: CellSet,
    /// Chains straddling `σ`; they are joins of a horizontal and a vertical chain.
    pub middle: CellSet,
}

/// Splits the lower link of `[σ]` and checks that it is `H ⋆ V` with
/// `H ∩ V = ∅`.
pub fn hv_split(sd: &SdComplex, env: &ValueMap, sigma: Cell) -> Result<HvSplit> {
    let lower_link = lower_link(sd, env, sigma);
    let mut split = HvSplit {
        lower_link: lower_link.clone(),
        horizontal: CellSet::new(),
        vertical: CellSet::new(),
        middle: CellSet::new(),
    };
    for &s in &lower_link {
        match link_kind(sd, sigma, s) {
            LinkKind::End => split.horizontal.insert(s),
            LinkKind::Begin => split.vertical.insert(s),
            LinkKind::Middle => split.middle.insert(s),
        };
    }
    if !split.horizontal.is_disjoint(&split.vertical) {
        return Err(Error::Invariant("horizontal and vertical parts overlap".into()));
    }
    if join(sd, &split.horizontal, &split.vertical)? != lower_link {
        return Err(Error::Invariant(format!(
            "lower link of {} is not the join of its horizontal and vertical parts",
            sd.token(sd.vertex(sigma))
        )));
    }
    Ok(split)
}

/// Outcome of one identity or containment check, with offending simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub witnesses: CellSet,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremCReport {
    pub cell: Cell,
    pub epsilon: crate::value::Value,
    pub split: HvSplit,
    /// `[σ] ⋆ H ⋆ V`.
    pub cone: CellSet,
    pub checks: Vec<CheckResult>,
}

impl TheoremCReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

fn symmetric_difference(a: &CellSet, b: &CellSet) -> CellSet {
    a.symmetric_difference(b).copied().collect()
}

fn cone_checks(sd: &SdComplex, f: &ValueMap, sigma: Cell) -> Result<(TheoremCReport, ValueMap)> {
    let env = upper_envelope(sd, f)?;
    let c = f.value(sigma).clone();
    let epsilon = choose_epsilon(sd.base(), f, &c)?;
    let split = hv_split(sd, &env, sigma)?;
    let apex = CellSet::from([sd.vertex(sigma)]);
    let cone = join(sd, &apex, &split.lower_link)?;
    let below = envelope_sublevel(sd, &env, &(&c - &epsilon));
    let above = envelope_sublevel(sd, &env, &(&c + &epsilon));
    let union: CellSet = below.union(&cone).copied().collect();
    let meet: CellSet = below.intersection(&cone).copied().collect();
    let order = sd_order(sd)?;
    let home = sd.stratum_of_cell(sigma);
    let strata = sd.stratification();
    let tangential: CellSet = join(sd, &apex, &split.horizontal)?
        .into_iter()
        .filter(|&s| !order.leq(strata.stratum_of(s), home))
        .collect();
    let checks = vec![
        CheckResult {
            name: "pushout",
            witnesses: symmetric_difference(&above, &union),
        },
        CheckResult {
            name: "intersection",
            witnesses: symmetric_difference(&meet, &split.lower_link),
        },
        CheckResult {
            name: "tangential-strata",
            witnesses: tangential,
        },
    ];
    Ok((
        TheoremCReport {
            cell: sigma,
            epsilon,
            split,
            cone,
            checks,
        },
        env,
    ))
}

fn sd_order(sd: &SdComplex) -> Result<StratumOrder> {
    stratum_order_coarse(sd.complex(), sd.stratification())
}

/// The pushout and intersection identities at `[σ]` together with the
/// tangential strata containment. Valid for every cell.
pub fn pushout_check(sd: &SdComplex, f: &ValueMap, sigma: Cell) -> Result<TheoremCReport> {
    f.check_injective(sd.base())?;
    Ok(cone_checks(sd, f, sigma)?.0)
}

/// All four checks at a critical cell, adding that `V` lies in strictly
/// higher strata.
pub fn theorem_c_check(sd: &SdComplex, f: &ValueMap, sigma: Cell) -> Result<TheoremCReport> {
    let report = classify(sd.base(), sd.base_stratification(), f)?;
    if !matches!(
        report.record(sigma).status,
        CellStatus::Critical | CellStatus::SCritical
    ) {
        return Err(Error::NotCritical(sd.base().name(sigma).to_string()));
    }
    let (mut out, _) = cone_checks(sd, f, sigma)?;
    let order = sd_order(sd)?;
    let home = sd.stratum_of_cell(sigma);
    let strata = sd.stratification();
    let normal: CellSet = out
        .split
        .vertical
        .iter()
        .filter(|&&s| !order.lt(home, strata.stratum_of(s)))
        .copied()
        .collect();
    out.checks.push(CheckResult {
        name: "normal-strata",
        witnesses: normal,
    });
    Ok(out)
}
