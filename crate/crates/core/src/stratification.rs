//! Levels, strata, the frontier axiom and the frontier order on strata.

use std::collections::BTreeMap;
use std::fmt;

use crate::complex::{Cell, CellSet, Complex, ValidationReport};
use crate::error::{Error, Result};

/// A level per cell. Monotonicity is checked by [`compute_strata`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMap(Vec<u32>);

impl LevelMap {
    pub fn new(complex: &Complex, levels: &BTreeMap<Cell, u32>) -> Result<Self> {
        complex
            .cells()
            .map(|c| {
                levels
                    .get(&c)
                    .copied()
                    .ok_or_else(|| Error::MissingLevel(complex.name(c).to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Level equal to dimension.
    pub fn skeletal(complex: &Complex) -> Self {
        Self(complex.cells().map(|c| complex.dim(c) as u32).collect())
    }

    /// A single level: the trivial stratification `X ⊃ ∅`.
    pub fn trivial(complex: &Complex) -> Self {
        Self(vec![0; complex.len()])
    }

    pub fn level(&self, cell: Cell) -> u32 {
        self.0[cell.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StratumId(pub usize);

impl fmt::Display for StratumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub id: StratumId,
    pub level: u32,
    pub cells: CellSet,
}

/// Strata of a level map, possibly restricted to a subcomplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    levels: Vec<Option<u32>>,
    strata: Vec<Stratum>,
    cell_stratum: Vec<Option<StratumId>>,
}

impl Stratification {
    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum(&self, id: StratumId) -> &Stratum {
        &self.strata[id.0]
    }

    /// Stratum of a cell in the domain. Panics for cells outside it.
    pub fn stratum_of(&self, cell: Cell) -> StratumId {
        self.cell_stratum[cell.0].expect("cell outside the stratified domain")
    }

    pub fn get_stratum_of(&self, cell: Cell) -> Option<StratumId> {
        self.cell_stratum.get(cell.0).copied().flatten()
    }

    pub fn level(&self, cell: Cell) -> u32 {
        self.levels[cell.0].expect("cell outside the stratified domain")
    }

    pub fn domain(&self) -> CellSet {
        self.cell_stratum
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| Cell(i))
            .collect()
    }

    pub fn same_stratum(&self, a: Cell, b: Cell) -> bool {
        self.get_stratum_of(a).is_some() && self.get_stratum_of(a) == self.get_stratum_of(b)
    }
}

fn strata_of(complex: &Complex, domain: &CellSet, level: impl Fn(Cell) -> u32) -> Stratification {
    let mut by_level: BTreeMap<u32, CellSet> = BTreeMap::new();
    for &c in domain {
        by_level.entry(level(c)).or_default().insert(c);
    }
    let mut strata = Vec::new();
    let mut cell_stratum = vec![None; complex.len()];
    let mut levels = vec![None; complex.len()];
    for (lvl, delta) in by_level {
        for cells in complex.connected_components(&delta) {
            let id = StratumId(strata.len());
            for &c in &cells {
                cell_stratum[c.0] = Some(id);
                levels[c.0] = Some(lvl);
            }
            strata.push(Stratum { id, level: lvl, cells });
        }
    }
    Stratification {
        levels,
        strata,
        cell_stratum,
    }
}

/// Splits each level difference into zigzag-connected strata. Strata are
/// numbered by level, then by least cell.
pub fn compute_strata(complex: &Complex, levels: &LevelMap) -> Result<Stratification> {
    for (parent, child) in complex.covering_pairs() {
        if levels.level(child) > levels.level(parent) {
            return Err(Error::NonMonotoneLevels {
                parent: complex.name(parent).to_string(),
                child: complex.name(child).to_string(),
                parent_level: levels.level(parent),
                child_level: levels.level(child),
            });
        }
    }
    Ok(strata_of(complex, &complex.all_cells(), |c| levels.level(c)))
}

/// Restricts a stratification to a subcomplex and recomputes components
/// there. The result need not satisfy the frontier axiom.
pub fn induced_stratification(
    complex: &Complex,
    strat: &Stratification,
    sub: &CellSet,
) -> Result<Stratification> {
    complex.require_subcomplex(sub)?;
    Ok(strata_of(complex, sub, |c| strat.level(c)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierViolation {
    pub cell: Cell,
    pub stratum: StratumId,
}

pub type FrontierReport = ValidationReport<FrontierViolation>;

/// Checks the frontier axiom in singleton form: for every cell `σ` and
/// every stratum `T` not containing `σ`, if `cl(σ)` meets `T` then it
/// contains `T`.
///
/// This is equivalent to the axiom over connected subsets: a connected `S`
/// whose closure meets `T` does so through one of its cells, and a connected
/// piece of a stratum inherits containment from the whole stratum. Pairs
/// inside one stratum are excluded, as are pairs across different strata of
/// one level (the closure of one never meets the other).
pub fn check_frontier(complex: &Complex, strat: &Stratification) -> FrontierReport {
    let mut violations = Vec::new();
    for sigma in strat.domain() {
        let own = strat.stratum_of(sigma);
        let closure = complex.closure_of(sigma);
        let mut touched: Vec<StratumId> = closure
            .iter()
            .filter_map(|&c| strat.get_stratum_of(c))
            .filter(|&t| t != own)
            .collect();
        touched.sort();
        touched.dedup();
        for t in touched {
            if !strat.stratum(t).cells.is_subset(&closure) {
                violations.push(FrontierViolation { cell: sigma, stratum: t });
            }
        }
    }
    ValidationReport { violations }
}

/// The frontier axiom with both sides whole strata: if `cl(S)` meets
/// another stratum `T` then it contains `T`. Violations name the least cell
/// of `S`.
///
/// This is weaker than [`check_frontier`] and is what the frontier order
/// needs. Stratifications carried over to a barycentric subdivision satisfy
/// this form but usually not the cell-wise one.
pub fn check_stratum_frontier(complex: &Complex, strat: &Stratification) -> FrontierReport {
    let mut violations = Vec::new();
    for s in strat.strata() {
        let closure = complex.closure(&s.cells);
        for t in strat.strata() {
            if t.id != s.id && !t.cells.is_disjoint(&closure) && !t.cells.is_subset(&closure) {
                let cell = *s.cells.first().expect("strata are nonempty");
                violations.push(FrontierViolation { cell, stratum: t.id });
            }
        }
    }
    ValidationReport { violations }
}

/// The frontier partial order: `T <= S` iff `T` meets `cl(S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumOrder {
    leq: Vec<Vec<bool>>,
}

impl StratumOrder {
    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, lower: StratumId, upper: StratumId) -> bool {
        self.leq[lower.0][upper.0]
    }

    pub fn lt(&self, lower: StratumId, upper: StratumId) -> bool {
        lower != upper && self.leq(lower, upper)
    }

    /// All related pairs `(lower, upper)`, reflexive ones included.
    pub fn pairs(&self) -> Vec<(StratumId, StratumId)> {
        let n = self.leq.len();
        (0..n)
            .flat_map(|t| (0..n).map(move |s| (t, s)))
            .filter(|&(t, s)| self.leq[t][s])
            .map(|(t, s)| (StratumId(t), StratumId(s)))
            .collect()
    }
}

pub fn stratum_order(complex: &Complex, strat: &Stratification) -> Result<StratumOrder> {
    order_given(complex, strat, check_frontier(complex, strat))
}

/// The frontier order under the stratum-wise axiom only.
pub fn stratum_order_coarse(complex: &Complex, strat: &Stratification) -> Result<StratumOrder> {
    order_given(complex, strat, check_stratum_frontier(complex, strat))
}

fn order_given(complex: &Complex, strat: &Stratification, frontier: FrontierReport) -> Result<StratumOrder> {
    if let Some(v) = frontier.violations.first() {
        return Err(Error::FrontierViolated {
            cell: complex.name(v.cell).to_string(),
            stratum: v.stratum.0,
        });
    }
    let n = strat.strata().len();
    let mut leq = vec![vec![false; n]; n];
    for s in strat.strata() {
        for t in complex
            .closure(&s.cells)
            .iter()
            .filter_map(|&c| strat.get_stratum_of(c))
        {
            leq[t.0][s.id.0] = true;
        }
    }
    for (t, row) in leq.iter().enumerate() {
        for s in (t + 1)..n {
            if row[s] && leq[s][t] {
                return Err(Error::StrataNotAntisymmetric(t, s));
            }
        }
    }
    Ok(StratumOrder { leq })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexityViolation {
    pub lower: Cell,
    pub middle: Cell,
    pub upper: Cell,
}

/// Reports triples `σ <= τ <= σ'` with `σ, σ'` in one stratum and `τ` outside.
pub fn check_convexity(complex: &Complex, strat: &Stratification) -> ValidationReport<ConvexityViolation> {
    let mut violations = Vec::new();
    for upper in strat.domain() {
        let own = strat.stratum_of(upper);
        for &middle in complex.strict_faces(upper) {
            if strat.get_stratum_of(middle) == Some(own) {
                continue;
            }
            for &lower in complex.strict_faces(middle) {
                if strat.get_stratum_of(lower) == Some(own) {
                    violations.push(ConvexityViolation { lower, middle, upper });
                }
            }
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(c: &Complex, s: &Stratum) -> Vec<String> {
        c.names(&s.cells).into_iter().map(String::from).collect()
    }

    #[test]
    fn skeletal_levels_give_singleton_strata() {
        let doc = fixtures::fig1();
        let c = &doc.complex;
        let strat = compute_strata(c, &LevelMap::skeletal(c)).unwrap();
        assert_eq!(strat.strata().len(), c.len());
        assert!(strat.strata().iter().all(|s| s.cells.len() == 1));
        assert!(check_frontier(c, &strat).passes());
        assert!(check_convexity(c, &strat).passes());
        let order = stratum_order(c, &strat).unwrap();
        for a in c.cells() {
            for b in c.cells() {
                assert_eq!(
                    order.leq(strat.stratum_of(a), strat.stratum_of(b)),
                    c.leq(a, b)
                );
            }
        }
    }

    #[test]
    fn disc_has_circle_and_face_strata() {
        let doc = fixtures::disc();
        let c = &doc.complex;
        let strat = compute_strata(c, doc.levels.as_ref().unwrap()).unwrap();
        assert_eq!(strat.strata().len(), 2);
        assert_eq!(names(c, &strat.strata()[0]), ["a", "ab", "b", "bc", "c", "ca"]);
        assert_eq!(names(c, &strat.strata()[1]), ["F"]);
        assert!(check_frontier(c, &strat).passes());
        assert!(check_convexity(c, &strat).passes());
        let order = stratum_order(c, &strat).unwrap();
        assert!(order.lt(StratumId(0), StratumId(1)));
        assert!(!order.leq(StratumId(1), StratumId(0)));
    }

    #[test]
    fn constant_level_gives_one_stratum() {
        let doc = fixtures::disc();
        let c = &doc.complex;
        let strat = compute_strata(c, &LevelMap::trivial(c)).unwrap();
        assert_eq!(strat.strata().len(), 1);
        assert_eq!(stratum_order(c, &strat).unwrap().pairs(), vec![(StratumId(0), StratumId(0))]);
    }

    #[test]
    fn non_monotone_levels_are_rejected() {
        let doc = fixtures::disc();
        let c = &doc.complex;
        let mut levels: BTreeMap<Cell, u32> = c.cells().map(|x| (x, 1)).collect();
        levels.insert(c.cell("a").unwrap(), 2);
        let lm = LevelMap::new(c, &levels).unwrap();
        assert!(matches!(
            compute_strata(c, &lm),
            Err(Error::NonMonotoneLevels { .. })
        ));
    }

    #[test]
    fn path_examples_pass_frontier() {
        let c = Complex::new(
            [("a", 0), ("b", 0), ("c", 0), ("e1", 1), ("e2", 1)],
            [("e1", "a"), ("e1", "b"), ("e2", "b"), ("e2", "c")],
        )
        .unwrap();
        let strat = compute_strata(&c, &LevelMap::skeletal(&c)).unwrap();
        assert!(check_frontier(&c, &strat).passes());
        let levels: BTreeMap<Cell, u32> = c
            .cells()
            .map(|x| (x, u32::from(["e1", "b", "e2"].contains(&c.name(x)))))
            .collect();
        let strat = compute_strata(&c, &LevelMap::new(&c, &levels).unwrap()).unwrap();
        assert_eq!(strat.strata().len(), 3);
        assert!(check_frontier(&c, &strat).passes());
    }

    #[test]
    fn square_boundary_fails_frontier_but_is_convex() {
        let doc = fixtures::square_frontier_fail();
        let c = &doc.complex;
        let strat = compute_strata(c, doc.levels.as_ref().unwrap()).unwrap();
        assert_eq!(strat.strata().len(), 2);
        let report = check_frontier(c, &strat);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(c.name(report.violations[0].cell), "e1");
        assert!(check_convexity(c, &strat).passes());
        assert!(!check_stratum_frontier(c, &strat).passes());
        assert!(matches!(
            stratum_order(c, &strat),
            Err(Error::FrontierViolated { .. })
        ));
    }

    #[test]
    fn induced_examples() {
        let doc = fixtures::fig1();
        let c = &doc.complex;
        let strat = compute_strata(c, &LevelMap::skeletal(c)).unwrap();
        let same = induced_stratification(c, &strat, &c.all_cells()).unwrap();
        assert_eq!(same, strat);
        let sub = c.closure_of(c.cell("e1").unwrap());
        let ind = induced_stratification(c, &strat, &sub).unwrap();
        let got: Vec<Vec<String>> = ind.strata().iter().map(|s| names(c, s)).collect();
        assert_eq!(got, vec![vec!["v"], vec!["w1"], vec!["e1"]]);

        let disc = fixtures::disc();
        let dc = &disc.complex;
        let dstrat = compute_strata(dc, disc.levels.as_ref().unwrap()).unwrap();
        let circle = dc.cell_set(["a", "b", "c", "ab", "bc", "ca"]).unwrap();
        let ind = induced_stratification(dc, &dstrat, &circle).unwrap();
        assert_eq!(ind.strata().len(), 1);
        assert!(induced_stratification(dc, &dstrat, &dc.cell_set(["ab"]).unwrap()).is_err());
    }
}
