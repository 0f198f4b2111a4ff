//! Integer homology of simplicial pairs via Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::complex::{Cell, CellSet};
use crate::error::{Error, Result};
use crate::subdivision::SdComplex;

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[target] -= q * row[source]`.
    fn sub_row(&mut self, target: usize, source: usize, q: &BigInt) {
        for j in 0..self.cols {
            let delta = q * &self[(source, j)];
            self[(target, j)] -= delta;
        }
    }

    fn sub_col(&mut self, target: usize, source: usize, q: &BigInt) {
        for i in 0..self.rows {
            let delta = q * &self[(i, source)];
            self[(i, target)] -= delta;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// Nonzero invariant factors, each dividing the next.
pub fn smith_normal_form(m: &IntegerMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let mut out = Vec::new();
    let limit = a.rows.min(a.cols);
    for t in 0..limit {
        // pivot: smallest nonzero magnitude in the trailing block
        let Some((pi, pj)) = smallest_entry(&a, t) else {
            break;
        };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..a.rows {
                if !a[(i, t)].is_zero() {
                    let q = a[(i, t)].div_floor(&a[(t, t)]);
                    a.sub_row(i, t, &q);
                    if !a[(i, t)].is_zero() {
                        a.swap_rows(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..a.cols {
                if !a[(t, j)].is_zero() {
                    let q = a[(t, j)].div_floor(&a[(t, t)]);
                    a.sub_col(j, t, &q);
                    if !a[(t, j)].is_zero() {
                        a.swap_cols(t, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // the pivot must divide the whole trailing block
            let offender = (t + 1..a.rows)
                .flat_map(|i| (t + 1..a.cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_multiple_of(&a[(t, t)]));
            match offender {
                Some((i, _)) => {
                    let minus_one = -BigInt::one();
                    a.sub_row(t, i, &minus_one);
                }
                None => break,
            }
        }
        out.push(a[(t, t)].abs());
    }
    out
}

fn smallest_entry(a: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = &a[(i, j)];
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Homology in one degree: free rank and torsion coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeHomology {
    pub betti: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedHomology {
    /// Degrees `0..=dim`.
    pub degrees: Vec<DegreeHomology>,
}

impl GradedHomology {
    pub fn betti(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |d| d.betti)
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.iter().all(|d| d.betti == 0 && d.torsion.is_empty())
    }

    pub fn total_rank(&self) -> usize {
        self.degrees.iter().map(|d| d.betti).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating(&self.betti_numbers())
    }
}

impl fmt::Display for GradedHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .degrees
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let mut s = format!("H{k}=Z^{}", d.betti);
                for t in &d.torsion {
                    s.push_str(&format!("+Z/{t}"));
                }
                s
            })
            .collect();
        if parts.is_empty() {
            f.write_str("zero")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

pub(crate) fn alternating(ranks: &[usize]) -> i64 {
    ranks
        .iter()
        .enumerate()
        .map(|(k, &r)| if k % 2 == 0 { r as i64 } else { -(r as i64) })
        .sum()
}

/// Relative chain complex of a simplicial pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    /// Basis simplices of each chain group, by degree.
    pub bases: Vec<Vec<Cell>>,
    /// `boundaries[k]` maps degree `k + 1` to degree `k`.
    pub boundaries: Vec<IntegerMatrix>,
}

impl ChainComplex {
    pub fn ranks(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }
}

fn require_pair(sd: &SdComplex, big: &CellSet, small: &CellSet) -> Result<()> {
    let c = sd.complex();
    c.require_subcomplex(big)?;
    c.require_subcomplex(small)?;
    match small.difference(big).next() {
        Some(&extra) => Err(Error::NotContained {
            small: c.name(extra).to_string(),
            big: "the larger subcomplex".to_string(),
        }),
        None => Ok(()),
    }
}

/// Boundary matrices of `C(big) / C(small)`. Simplices are oriented by the
/// token order of their base cells.
pub fn chain_complex_of_pair(sd: &SdComplex, big: &CellSet, small: &CellSet) -> Result<ChainComplex> {
    require_pair(sd, big, small)?;
    let c = sd.complex();
    let top = big.iter().map(|&s| c.dim(s)).max();
    let mut bases: Vec<Vec<Cell>> = vec![Vec::new(); top.map_or(0, |d| d + 1)];
    for &s in big.difference(small) {
        bases[c.dim(s)].push(s);
    }
    let mut boundaries = Vec::new();
    for k in 1..bases.len() {
        let row_of = |s: Cell| bases[k - 1].binary_search(&s).ok();
        let mut m = IntegerMatrix::zeros(bases[k - 1].len(), bases[k].len());
        for (j, &s) in bases[k].iter().enumerate() {
            let mut vertices = sd.chain(s).to_vec();
            vertices.sort();
            for i in 0..vertices.len() {
                let mut face = vertices.clone();
                face.remove(i);
                face.sort_by_key(|&v| (sd.base().dim(v), v));
                let face = sd.simplex(&face).expect("faces of chains are chains");
                if let Some(r) = row_of(face) {
                    m[(r, j)] = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                }
            }
        }
        boundaries.push(m);
    }
    for w in boundaries.windows(2) {
        if !w[0].mul(&w[1]).is_zero() {
            return Err(Error::Invariant("boundary of a boundary is nonzero".into()));
        }
    }
    Ok(ChainComplex { bases, boundaries })
}

/// `H_*(big, small; ℤ)`.
pub fn relative_homology(sd: &SdComplex, big: &CellSet, small: &CellSet) -> Result<GradedHomology> {
    Ok(homology_of(&chain_complex_of_pair(sd, big, small)?))
}

pub fn homology_of(cc: &ChainComplex) -> GradedHomology {
    let invariants: Vec<Vec<BigInt>> = cc.boundaries.iter().map(smith_normal_form).collect();
    let degrees = (0..cc.bases.len())
        .map(|k| {
            let outgoing = if k == 0 { 0 } else { invariants[k - 1].len() };
            let incoming = invariants.get(k).map_or(&[][..], |v| &v[..]);
            DegreeHomology {
                betti: cc.bases[k].len() - outgoing - incoming.len(),
                torsion: incoming.iter().filter(|x| !x.is_one()).cloned().collect(),
            }
        })
        .collect();
    GradedHomology { degrees }
}
