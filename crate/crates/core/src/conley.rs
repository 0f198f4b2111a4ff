//! Multivector fields, exit sets, Conley indices and the E¹ page of the
//! filtration induced by an acyclic field.

use std::fmt;

use crate::complex::{Cell, CellSet, Complex, ValidationReport};
use crate::error::{Error, Result};
use crate::homology::{alternating, relative_homology, GradedHomology};
use crate::stratification::Stratification;
use crate::subdivision::{barycentric_subdivide, subdivide_subcomplex, SdComplex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multivector {
    pub label: String,
    pub cells: CellSet,
}

/// A family of cell sets meant to partition the complex. Parts are kept
/// sorted by their least cell.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultivectorField {
    parts: Vec<Multivector>,
}

impl MultivectorField {
    pub fn from_parts(parts: impl IntoIterator<Item = (String, CellSet)>) -> Self {
        let mut parts: Vec<Multivector> = parts
            .into_iter()
            .map(|(label, cells)| Multivector { label, cells })
            .collect();
        parts.sort_by(|a, b| a.cells.first().cmp(&b.cells.first()).then(a.label.cmp(&b.label)));
        Self { parts }
    }

    /// One part per cell.
    pub fn singletons(complex: &Complex) -> Self {
        Self::from_parts(
            complex
                .cells()
                .map(|c| (complex.name(c).to_string(), CellSet::from([c]))),
        )
    }

    /// One part per stratum, labelled by the stratum id.
    pub fn from_strata(strat: &Stratification) -> Self {
        Self::from_parts(
            strat
                .strata()
                .iter()
                .map(|s| (s.id.to_string(), s.cells.clone())),
        )
    }

    pub fn parts(&self) -> &[Multivector] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Index of the part containing `cell`.
    pub fn part_of(&self, cell: Cell) -> Option<usize> {
        self.parts.iter().position(|p| p.cells.contains(&cell))
    }
}

/// Returns a triple `lower <= middle <= upper` with the ends in `set` and
/// the middle outside.
pub fn convexity_witness(complex: &Complex, set: &CellSet) -> Option<(Cell, Cell, Cell)> {
    for &upper in set {
        for &middle in complex.strict_faces(upper) {
            if set.contains(&middle) {
                continue;
            }
            if let Some(&lower) = complex.strict_faces(middle).iter().find(|c| set.contains(c)) {
                return Some((lower, middle, upper));
            }
        }
    }
    None
}

fn require_convex(complex: &Complex, set: &CellSet) -> Result<()> {
    match convexity_witness(complex, set) {
        None => Ok(()),
        Some((lower, middle, upper)) => Err(Error::NotConvex {
            lower: complex.name(lower).to_string(),
            middle: complex.name(middle).to_string(),
            upper: complex.name(upper).to_string(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MvfViolation {
    Empty { part: String },
    Uncovered { cell: Cell },
    Overlap { cell: Cell, parts: Vec<String> },
    NotConvex { part: String, lower: Cell, middle: Cell, upper: Cell },
    Disconnected { part: String, components: usize },
}

impl MvfViolation {
    pub fn describe(&self, complex: &Complex) -> String {
        match self {
            Self::Empty { part } => format!("empty-part part={part}"),
            Self::Uncovered { cell } => format!("uncovered cell={}", complex.name(*cell)),
            Self::Overlap { cell, parts } => {
                format!("overlap cell={} parts={}", complex.name(*cell), parts.join(","))
            }
            Self::NotConvex { part, lower, middle, upper } => format!(
                "not-convex part={part} lower={} middle={} upper={}",
                complex.name(*lower),
                complex.name(*middle),
                complex.name(*upper)
            ),
            Self::Disconnected { part, components } => {
                format!("disconnected part={part} components={components}")
            }
        }
    }
}

/// Partition, convexity and connectivity of every part.
pub fn validate_mvf(complex: &Complex, mvf: &MultivectorField) -> ValidationReport<MvfViolation> {
    let mut violations = Vec::new();
    for part in mvf.parts() {
        if part.cells.is_empty() {
            violations.push(MvfViolation::Empty { part: part.label.clone() });
            continue;
        }
        if let Some((lower, middle, upper)) = convexity_witness(complex, &part.cells) {
            violations.push(MvfViolation::NotConvex {
                part: part.label.clone(),
                lower,
                middle,
                upper,
            });
        }
        let components = complex.connected_components(&part.cells).len();
        if components > 1 {
            violations.push(MvfViolation::Disconnected {
                part: part.label.clone(),
                components,
            });
        }
    }
    for cell in complex.cells() {
        let owners: Vec<String> = mvf
            .parts()
            .iter()
            .filter(|p| p.cells.contains(&cell))
            .map(|p| p.label.clone())
            .collect();
        match owners.len() {
            0 => violations.push(MvfViolation::Uncovered { cell }),
            1 => {}
            _ => violations.push(MvfViolation::Overlap { cell, parts: owners }),
        }
    }
    ValidationReport { violations }
}

fn require_valid(complex: &Complex, mvf: &MultivectorField) -> Result<()> {
    match validate_mvf(complex, mvf).violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidMultivectorField(v.describe(complex))),
    }
}

/// `ex(M) = cl(M) - M`.
pub fn exit_set(complex: &Complex, m: &CellSet) -> Result<CellSet> {
    require_convex(complex, m)?;
    let exit: CellSet = complex.closure(m).difference(m).copied().collect();
    if !complex.is_subcomplex(&exit) {
        return Err(Error::Invariant("exit set is not a subcomplex".into()));
    }
    Ok(exit)
}

/// `H_*(cl M, ex M; ℤ)` computed on an existing subdivision.
pub fn conley_index_in(sd: &SdComplex, m: &CellSet) -> Result<GradedHomology> {
    let base = sd.base();
    let exit = exit_set(base, m)?;
    if base.connected_components(m).len() != 1 {
        return Err(Error::InvalidMultivectorField(
            "a multivector must be nonempty and connected".into(),
        ));
    }
    let closure = subdivide_subcomplex(sd, &base.closure(m))?;
    let exit = subdivide_subcomplex(sd, &exit)?;
    relative_homology(sd, &closure, &exit)
}

pub fn conley_index(complex: &Complex, m: &CellSet) -> Result<GradedHomology> {
    conley_index_in(&barycentric_subdivide(complex, None)?, m)
}

/// Transitive closure of `M_i ▶ M_j` (some cell of `M_i` lies above some
/// cell of `M_j`), read as `M_j <= M_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvfOrder {
    leq: Vec<Vec<bool>>,
    /// Parts listed lower first, ties broken by least cell.
    pub extension: Vec<usize>,
}

impl MvfOrder {
    pub fn leq(&self, lower: usize, upper: usize) -> bool {
        self.leq[lower][upper]
    }

    pub fn lt(&self, lower: usize, upper: usize) -> bool {
        lower != upper && self.leq(lower, upper)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MvfOrdering {
    Acyclic(MvfOrder),
    /// Parts `p0 ▶ p1 ▶ ... ▶ p0`.
    Cyclic(Vec<usize>),
}

/// Edges `i -> j` for `M_i ▶ M_j`, `i != j`.
fn arrows(complex: &Complex, mvf: &MultivectorField) -> Vec<Vec<usize>> {
    let n = mvf.len();
    let mut out = vec![Vec::new(); n];
    for (i, part) in mvf.parts().iter().enumerate() {
        let below = complex.closure(&part.cells);
        for (j, other) in mvf.parts().iter().enumerate() {
            if i != j && !below.is_disjoint(&other.cells) {
                out[i].push(j);
            }
        }
    }
    out
}

fn find_cycle(edges: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    fn visit(v: usize, edges: &[Vec<usize>], mark: &mut [Mark], path: &mut Vec<usize>) -> Option<Vec<usize>> {
        mark[v] = Mark::Open;
        path.push(v);
        for &w in &edges[v] {
            match mark[w] {
                Mark::Open => {
                    let start = path.iter().position(|&p| p == w).expect("open vertex on path");
                    return Some(path[start..].to_vec());
                }
                Mark::New => {
                    if let Some(cycle) = visit(w, edges, mark, path) {
                        return Some(cycle);
                    }
                }
                Mark::Done => {}
            }
        }
        path.pop();
        mark[v] = Mark::Done;
        None
    }
    let mut mark = vec![Mark::New; edges.len()];
    for v in 0..edges.len() {
        if mark[v] == Mark::New {
            if let Some(cycle) = visit(v, edges, &mut mark, &mut Vec::new()) {
                return Some(cycle);
            }
        }
    }
    None
}

pub fn mvf_order(complex: &Complex, mvf: &MultivectorField) -> Result<MvfOrdering> {
    require_valid(complex, mvf)?;
    let edges = arrows(complex, mvf);
    if let Some(cycle) = find_cycle(&edges) {
        return Ok(MvfOrdering::Cyclic(cycle));
    }
    let n = mvf.len();
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|upper| {
            let mut seen = vec![false; n];
            seen[upper] = true;
            let mut stack = vec![upper];
            while let Some(v) = stack.pop() {
                for &lower in &edges[v] {
                    if !seen[lower] {
                        seen[lower] = true;
                        stack.push(lower);
                    }
                }
            }
            seen
        })
        .collect();
    let leq: Vec<Vec<bool>> = (0..n)
        .map(|lower| reach.iter().map(|below| below[lower]).collect())
        .collect();
    // lowest available part first; parts are indexed by least cell
    let mut placed = vec![false; n];
    let mut extension = Vec::with_capacity(n);
    while extension.len() < n {
        let next = (0..n)
            .find(|&i| !placed[i] && (0..n).all(|j| placed[j] || j == i || !leq[j][i]))
            .expect("acyclic relation has a minimal element");
        placed[next] = true;
        extension.push(next);
    }
    Ok(MvfOrdering::Acyclic(MvfOrder { leq, extension }))
}

/// One column of the E¹ page: the pair `(F_q, F_{q-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E1Column {
    pub q: usize,
    pub part: usize,
    /// `H_*(F_q, F_{q-1})`, indexed by total degree `p + q`.
    pub filtration: GradedHomology,
    /// `Con_*(M_q)`.
    pub index: GradedHomology,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E1Page {
    pub columns: Vec<E1Column>,
    /// Total E¹ rank in each degree.
    pub totals: Vec<usize>,
    /// Betti numbers of the whole complex.
    pub betti: Vec<usize>,
    pub euler_page: i64,
    pub euler_complex: i64,
}

impl E1Page {
    /// Columns whose two computations disagree.
    pub fn excision_failures(&self) -> Vec<usize> {
        self.columns
            .iter()
            .filter(|c| !same_homology(&c.filtration, &c.index))
            .map(|c| c.q)
            .collect()
    }

    pub fn euler_holds(&self) -> bool {
        self.euler_page == self.euler_complex
    }

    pub fn betti_bounded(&self) -> bool {
        self.betti
            .iter()
            .enumerate()
            .all(|(k, &b)| b <= self.totals.get(k).copied().unwrap_or(0))
    }

    pub fn passed(&self) -> bool {
        self.excision_failures().is_empty() && self.euler_holds() && self.betti_bounded()
    }
}

/// Equality up to trailing zero degrees.
pub fn same_homology(a: &GradedHomology, b: &GradedHomology) -> bool {
    let n = a.degrees.len().max(b.degrees.len());
    (0..n).all(|k| a.degrees.get(k).cloned().unwrap_or_default() == b.degrees.get(k).cloned().unwrap_or_default())
}

impl fmt::Display for E1Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} filtration=[{}] index=[{}]", self.q, self.filtration, self.index)
    }
}

/// Builds the filtration from the linear extension and computes every
/// column both as a filtration quotient and as a Conley index.
pub fn e1_page(complex: &Complex, mvf: &MultivectorField) -> Result<E1Page> {
    let order = match mvf_order(complex, mvf)? {
        MvfOrdering::Acyclic(order) => order,
        MvfOrdering::Cyclic(cycle) => return Err(Error::CyclicField(cycle)),
    };
    let sd = barycentric_subdivide(complex, None)?;
    let mut filtration = CellSet::new();
    let mut previous = CellSet::new();
    let mut columns = Vec::with_capacity(order.extension.len());
    for (q, &part) in order.extension.iter().enumerate() {
        let cells = &mvf.parts()[part].cells;
        filtration.extend(cells.iter().copied());
        let big = subdivide_subcomplex(&sd, &filtration)?;
        let direct = relative_homology(&sd, &big, &previous)?;
        let index = conley_index_in(&sd, cells)?;
        columns.push(E1Column {
            q,
            part,
            filtration: direct,
            index,
        });
        previous = big;
    }
    let width = complex.dimension().map_or(0, |d| d + 1);
    let mut totals = vec![0; width];
    for col in &columns {
        for (k, d) in col.filtration.degrees.iter().enumerate() {
            totals[k] += d.betti;
        }
    }
    let whole = relative_homology(&sd, &sd.complex().all_cells(), &CellSet::new())?;
    let mut by_dim = vec![0; width];
    for c in complex.cells() {
        by_dim[complex.dim(c)] += 1;
    }
    Ok(E1Page {
        columns,
        euler_page: alternating(&totals),
        totals,
        betti: whole.betti_numbers(),
        euler_complex: alternating(&by_dim),
    })
}
