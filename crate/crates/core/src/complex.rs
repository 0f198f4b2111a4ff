//! Finite regular CW complexes represented by their face posets.
//!
//! A [`Complex`] stores cells together with the covering (codimension-one)
//! relation. The face order is the reflexive-transitive closure of the
//! covering pairs and is memoized at construction. Cells are indexed in
//! token order, so iterating any [`CellSet`] yields cells sorted by id.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a cell inside its [`Complex`]. Ordering matches token order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell(pub(crate) usize);

impl Cell {
    pub fn index(self) -> usize {
        self.0
    }
}

pub type CellSet = BTreeSet<Cell>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    names: Vec<String>,
    lookup: HashMap<String, Cell>,
    dims: Vec<usize>,
    faces: Vec<Vec<Cell>>,
    cofaces: Vec<Vec<Cell>>,
    below: Vec<Vec<Cell>>,
    above: Vec<Vec<Cell>>,
}

/// One violated structural invariant of a [`Complex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexViolation {
    /// A covering pair whose dimensions do not differ by one.
    Dimension { parent: String, child: String },
    /// A cell lying strictly below itself.
    Cycle { cell: String },
    /// A 1-cell without exactly two distinct 0-faces.
    EdgeEndpoints { edge: String, vertices: usize },
    /// An interval of length two that does not contain exactly two cells.
    Diamond {
        lower: String,
        upper: String,
        middle: usize,
    },
}

impl fmt::Display for ComplexViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dimension { parent, child } => {
                write!(f, "dimension parent={parent} child={child}")
            }
            Self::Cycle { cell } => write!(f, "cycle cell={cell}"),
            Self::EdgeEndpoints { edge, vertices } => {
                write!(f, "edge-endpoints edge={edge} vertices={vertices}")
            }
            Self::Diamond { lower, upper, middle } => {
                write!(f, "diamond lower={lower} upper={upper} middle={middle}")
            }
        }
    }
}

/// A list of violations; empty means the checked invariants all hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport<V> {
    pub violations: Vec<V>,
}

impl<V> ValidationReport<V> {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<V> Default for ValidationReport<V> {
    fn default() -> Self {
        Self { violations: Vec::new() }
    }
}

fn valid_token(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(char::is_whitespace)
}

impl Complex {
    /// Builds a complex from `(id, dimension)` cells and `(parent, child)`
    /// covering pairs. Repeated covering pairs collapse into one.
    ///
    /// Only structural problems (bad or duplicate ids, undeclared cells) are
    /// rejected here; the poset invariants are checked by [`Complex::validate`].
    pub fn new<C, F, S, T>(cells: C, covering: F) -> Result<Self>
    where
        C: IntoIterator<Item = (S, usize)>,
        F: IntoIterator<Item = (T, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let mut declared: Vec<(String, usize)> = Vec::new();
        for (id, dim) in cells {
            let id = id.into();
            if !valid_token(&id) {
                return Err(Error::InvalidCellId(id));
            }
            declared.push((id, dim));
        }
        declared.sort();
        for pair in declared.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateCell(pair[0].0.clone()));
            }
        }
        let n = declared.len();
        let (names, dims): (Vec<String>, Vec<usize>) = declared.into_iter().unzip();
        let lookup: HashMap<String, Cell> = names
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), Cell(i)))
            .collect();

        let mut face_sets = vec![BTreeSet::new(); n];
        let mut coface_sets = vec![BTreeSet::new(); n];
        for (parent, child) in covering {
            let find = |id: &str| {
                lookup
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::UnknownCell(id.to_string()))
            };
            let p = find(parent.as_ref())?;
            let c = find(child.as_ref())?;
            face_sets[p.0].insert(c);
            coface_sets[c.0].insert(p);
        }
        let faces: Vec<Vec<Cell>> = face_sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let cofaces: Vec<Vec<Cell>> =
            coface_sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let below = transitive(&faces);
        let above = transitive(&cofaces);
        Ok(Self {
            names,
            lookup,
            dims,
            faces,
            cofaces,
            below,
            above,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn cells(&self) -> impl DoubleEndedIterator<Item = Cell> + ExactSizeIterator + '_ {
        (0..self.names.len()).map(Cell)
    }

    pub fn all_cells(&self) -> CellSet {
        self.cells().collect()
    }

    pub fn cell(&self, id: &str) -> Result<Cell> {
        self.lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownCell(id.to_string()))
    }

    /// Resolves a list of ids into a [`CellSet`].
    pub fn cell_set<I, S>(&self, ids: I) -> Result<CellSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        ids.into_iter().map(|id| self.cell(id.as_ref())).collect()
    }

    pub fn name(&self, cell: Cell) -> &str {
        &self.names[cell.0]
    }

    pub fn names<'a>(&'a self, set: impl IntoIterator<Item = &'a Cell>) -> Vec<&'a str> {
        set.into_iter().map(|&c| self.name(c)).collect()
    }

    pub fn dim(&self, cell: Cell) -> usize {
        self.dims[cell.0]
    }

    /// Maximal cell dimension, `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.dims.iter().copied().max()
    }

    /// Codimension-one faces.
    pub fn faces(&self, cell: Cell) -> &[Cell] {
        &self.faces[cell.0]
    }

    /// Codimension-one cofaces.
    pub fn cofaces(&self, cell: Cell) -> &[Cell] {
        &self.cofaces[cell.0]
    }

    /// All cells strictly below `cell`, sorted.
    pub fn strict_faces(&self, cell: Cell) -> &[Cell] {
        &self.below[cell.0]
    }

    /// All cells strictly above `cell`, sorted.
    pub fn strict_cofaces(&self, cell: Cell) -> &[Cell] {
        &self.above[cell.0]
    }

    /// The face order `lower <= upper`.
    pub fn leq(&self, lower: Cell, upper: Cell) -> bool {
        lower == upper || self.lt(lower, upper)
    }

    pub fn lt(&self, lower: Cell, upper: Cell) -> bool {
        self.below[upper.0].binary_search(&lower).is_ok()
    }

    pub fn comparable(&self, a: Cell, b: Cell) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Iterates over covering pairs `(parent, child)` in token order.
    pub fn covering_pairs(&self) -> impl Iterator<Item = (Cell, Cell)> + '_ {
        self.cells()
            .flat_map(move |p| self.faces[p.0].iter().map(move |&c| (p, c)))
    }

    pub fn closure(&self, set: &CellSet) -> CellSet {
        let mut out = set.clone();
        for &cell in set {
            out.extend(self.below[cell.0].iter().copied());
        }
        out
    }

    pub fn star(&self, set: &CellSet) -> CellSet {
        let mut out = set.clone();
        for &cell in set {
            out.extend(self.above[cell.0].iter().copied());
        }
        out
    }

    pub fn closure_of(&self, cell: Cell) -> CellSet {
        self.closure(&CellSet::from([cell]))
    }

    pub fn star_of(&self, cell: Cell) -> CellSet {
        self.star(&CellSet::from([cell]))
    }

    /// Down-set test.
    pub fn is_subcomplex(&self, set: &CellSet) -> bool {
        self.missing_face(set).is_none()
    }

    pub(crate) fn missing_face(&self, set: &CellSet) -> Option<(Cell, Cell)> {
        set.iter().find_map(|&cell| {
            self.faces[cell.0]
                .iter()
                .find(|f| !set.contains(f))
                .map(|&f| (cell, f))
        })
    }

    pub(crate) fn require_subcomplex(&self, set: &CellSet) -> Result<()> {
        match self.missing_face(set) {
            None => Ok(()),
            Some((cell, missing)) => Err(Error::NotSubcomplex {
                cell: self.name(cell).to_string(),
                missing: self.name(missing).to_string(),
            }),
        }
    }

    /// Partitions `set` into zigzag-connected pieces, where every
    /// intermediate cell of a zigzag must itself lie in `set`. Components are
    /// ordered by their least cell.
    pub fn connected_components(&self, set: &CellSet) -> Vec<CellSet> {
        let members: Vec<Cell> = set.iter().copied().collect();
        let slot: HashMap<Cell, usize> = members.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut parent: Vec<usize> = (0..members.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, &cell) in members.iter().enumerate() {
            for lower in &self.below[cell.0] {
                if let Some(&j) = slot.get(lower) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<(usize, CellSet)> = Vec::new();
        let mut root_slot: HashMap<usize, usize> = HashMap::new();
        for (i, &cell) in members.iter().enumerate() {
            let root = find(&mut parent, i);
            let g = *root_slot.entry(root).or_insert_with(|| {
                groups.push((root, CellSet::new()));
                groups.len() - 1
            });
            groups[g].1.insert(cell);
        }
        // members are sorted, so groups are already ordered by least cell
        groups.into_iter().map(|(_, g)| g).collect()
    }

    /// Checks the grading, acyclicity and the two regularity proxies.
    ///
    /// Regularity is only checked up to combinatorial proxies: every edge has
    /// two distinct vertices, and every length-two interval is a diamond.
    pub fn validate(&self) -> ValidationReport<ComplexViolation> {
        let mut violations = Vec::new();
        for (parent, child) in self.covering_pairs() {
            if self.dim(parent) != self.dim(child) + 1 {
                violations.push(ComplexViolation::Dimension {
                    parent: self.name(parent).to_string(),
                    child: self.name(child).to_string(),
                });
            }
        }
        for cell in self.cells() {
            if self.lt(cell, cell) {
                violations.push(ComplexViolation::Cycle {
                    cell: self.name(cell).to_string(),
                });
            }
        }
        for edge in self.cells().filter(|&c| self.dim(c) == 1) {
            let vertices = self.faces(edge).iter().filter(|&&v| self.dim(v) == 0).count();
            if vertices != 2 || self.faces(edge).len() != 2 {
                violations.push(ComplexViolation::EdgeEndpoints {
                    edge: self.name(edge).to_string(),
                    vertices,
                });
            }
        }
        for upper in self.cells() {
            let d = self.dim(upper);
            if d < 2 {
                continue;
            }
            for &lower in &self.below[upper.0] {
                if lower == upper || self.dim(lower) + 2 != d {
                    continue;
                }
                let middle = self.below[upper.0]
                    .iter()
                    .filter(|&&m| m != lower && m != upper && self.lt(lower, m))
                    .count();
                if middle != 2 {
                    violations.push(ComplexViolation::Diamond {
                        lower: self.name(lower).to_string(),
                        upper: self.name(upper).to_string(),
                        middle,
                    });
                }
            }
        }
        ValidationReport { violations }
    }
}

fn transitive(step: &[Vec<Cell>]) -> Vec<Vec<Cell>> {
    let n = step.len();
    let mut out = Vec::with_capacity(n);
    let mut seen = vec![usize::MAX; n];
    for start in 0..n {
        let mut reached = Vec::new();
        let mut stack: Vec<Cell> = step[start].clone();
        while let Some(c) = stack.pop() {
            if seen[c.0] == start {
                continue;
            }
            seen[c.0] = start;
            reached.push(c);
            stack.extend(step[c.0].iter().copied());
        }
        reached.sort();
        out.push(reached);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ids(c: &Complex, set: &CellSet) -> Vec<String> {
        c.names(set).into_iter().map(String::from).collect()
    }

    fn edge() -> Complex {
        Complex::new([("a", 0), ("b", 0), ("e", 1)], [("e", "a"), ("e", "b")]).unwrap()
    }

    #[test]
    fn single_edge_is_valid() {
        assert!(edge().validate().passes());
    }

    #[test]
    fn repeated_vertex_face_breaks_edge_proxy() {
        let c = Complex::new([("a", 0), ("e", 1)], [("e", "a"), ("e", "a")]).unwrap();
        assert_eq!(
            c.validate().violations,
            vec![ComplexViolation::EdgeEndpoints {
                edge: "e".into(),
                vertices: 1
            }]
        );
    }

    #[test]
    fn missing_covering_pair_breaks_proxies() {
        // the hollow triangle without (ab, a): proxy (a) fails
        let hollow = Complex::new(
            [("a", 0), ("b", 0), ("c", 0), ("ab", 1), ("bc", 1), ("ca", 1)],
            [("ab", "b"), ("bc", "b"), ("bc", "c"), ("ca", "c"), ("ca", "a")],
        )
        .unwrap();
        assert_eq!(
            hollow.validate().violations,
            vec![ComplexViolation::EdgeEndpoints {
                edge: "ab".into(),
                vertices: 1
            }]
        );
        // with a 2-cell present, the diamond (a, F) has only ca in between
        let solid = Complex::new(
            [("a", 0), ("b", 0), ("c", 0), ("ab", 1), ("bc", 1), ("ca", 1), ("F", 2)],
            [
                ("ab", "b"),
                ("bc", "b"),
                ("bc", "c"),
                ("ca", "c"),
                ("ca", "a"),
                ("F", "ab"),
                ("F", "bc"),
                ("F", "ca"),
            ],
        )
        .unwrap();
        let v = solid.validate().violations;
        assert!(v.contains(&ComplexViolation::Diamond {
            lower: "a".into(),
            upper: "F".into(),
            middle: 1
        }));
    }

    #[test]
    fn grading_and_cycles_are_reported() {
        let c = Complex::new([("a", 0), ("b", 0)], [("a", "b"), ("b", "a")]).unwrap();
        let v = c.validate().violations;
        assert!(v.contains(&ComplexViolation::Cycle { cell: "a".into() }));
        assert!(v.contains(&ComplexViolation::Dimension {
            parent: "a".into(),
            child: "b".into()
        }));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            Complex::new([("a", 0), ("a", 1)], Vec::<(&str, &str)>::new()).unwrap_err(),
            Error::DuplicateCell("a".into())
        );
        assert_eq!(
            Complex::new([("a", 0)], [("e", "a")]).unwrap_err(),
            Error::UnknownCell("e".into())
        );
        assert!(matches!(
            Complex::new([("a b", 0)], Vec::<(&str, &str)>::new()),
            Err(Error::InvalidCellId(_))
        ));
        assert!(edge().cell_set(["zz"]).is_err());
    }

    #[test]
    fn closure_examples() {
        let disc = fixtures::disc().complex;
        let f = disc.cell_set(["F"]).unwrap();
        assert_eq!(disc.closure(&f), disc.all_cells());
        let a = disc.cell_set(["a"]).unwrap();
        assert_eq!(disc.closure(&a), a);
        let fig1 = fixtures::fig1().complex;
        let e1 = fig1.cell_set(["e1"]).unwrap();
        assert_eq!(ids(&fig1, &fig1.closure(&e1)), ["e1", "v", "w1"]);
        assert!(disc.closure(&CellSet::new()).is_empty());
    }

    #[test]
    fn star_examples() {
        let disc = fixtures::disc().complex;
        assert_eq!(ids(&disc, &disc.star(&disc.cell_set(["F"]).unwrap())), ["F"]);
        assert_eq!(
            ids(&disc, &disc.star(&disc.cell_set(["a"]).unwrap())),
            ["F", "a", "ab", "ca"]
        );
        let fig1 = fixtures::fig1().complex;
        assert_eq!(
            ids(&fig1, &fig1.star(&fig1.cell_set(["v"]).unwrap())),
            ["e1", "e2", "e4", "e5", "v"]
        );
    }

    #[test]
    fn component_examples() {
        let fig1 = fixtures::fig1().complex;
        let edges = fig1.cell_set(["e1", "e2", "e4", "e5"]).unwrap();
        assert_eq!(fig1.connected_components(&edges).len(), 4);
        let hollow = fixtures::hollow_triangle().complex;
        let path = hollow.cell_set(["a", "ab", "b"]).unwrap();
        assert_eq!(hollow.connected_components(&path), vec![path.clone()]);
        assert!(hollow.connected_components(&CellSet::new()).is_empty());
    }

    #[test]
    fn subcomplex_examples() {
        let fig1 = fixtures::fig1().complex;
        assert!(fig1.is_subcomplex(&fig1.cell_set(["e1", "v", "w1"]).unwrap()));
        assert!(!fig1.is_subcomplex(&fig1.cell_set(["e1"]).unwrap()));
        assert!(fig1.is_subcomplex(&CellSet::new()));
    }
}
