//! Random instances and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stratmorse::collapse::DEFAULT_BUDGET;
use stratmorse::morse::{validate_sdmf, ValueMap, Verdict};
use stratmorse::stratification::{check_frontier, compute_strata, LevelMap, Stratification};
use stratmorse::{Cell, CellSet, Complex, Document};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn simplex_name(vertices: &[usize]) -> String {
    let parts: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
    format!("s{}", parts.join("_"))
}

/// A random simplicial complex with at most `max_cells` cells.
pub fn random_complex(rng: &mut impl Rng, max_cells: usize) -> Complex {
    let n = rng.gen_range(1..=6usize);
    let mut simplices: BTreeSet<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for _ in 0..rng.gen_range(0..8) {
        let size = rng.gen_range(2..=n.clamp(2, 4));
        if size > n {
            continue;
        }
        let mut verts: Vec<usize> = (0..n).collect();
        verts.shuffle(rng);
        let mut top: Vec<usize> = verts[..size].to_vec();
        top.sort();
        let mut closure = BTreeSet::new();
        for mask in 1u32..(1 << size) {
            let face: Vec<usize> = (0..size).filter(|i| mask & (1 << i) != 0).map(|i| top[i]).collect();
            closure.insert(face);
        }
        let union: BTreeSet<Vec<usize>> = simplices.union(&closure).cloned().collect();
        if union.len() <= max_cells {
            simplices = union;
        }
    }
    let cells: Vec<(String, usize)> = simplices.iter().map(|s| (simplex_name(s), s.len() - 1)).collect();
    let mut covering = Vec::new();
    for s in simplices.iter().filter(|s| s.len() > 1) {
        for skip in 0..s.len() {
            let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            covering.push((simplex_name(s), simplex_name(&face)));
        }
    }
    Complex::new(cells, covering).expect("generated complex is well formed")
}

/// Random distinct rationals.
pub fn random_values(rng: &mut impl Rng, c: &Complex) -> ValueMap {
    let den = BigInt::from(rng.gen_range(1..=12u32));
    let mut nums: Vec<i64> = (-200..200).collect();
    nums.shuffle(rng);
    ValueMap::from_fn(c, |cell| BigRational::new(BigInt::from(nums[cell.index()]), den.clone()))
}

/// Random monotone levels, not necessarily frontier-valid.
pub fn random_levels(rng: &mut impl Rng, c: &Complex) -> LevelMap {
    let mut cells: Vec<Cell> = c.cells().collect();
    cells.sort_by_key(|&x| c.dim(x));
    let mut levels: BTreeMap<Cell, u32> = BTreeMap::new();
    for x in cells {
        let floor = c.faces(x).iter().map(|f| levels[f]).max().unwrap_or(0);
        levels.insert(x, floor + rng.gen_range(0..=1));
    }
    LevelMap::new(c, &levels).unwrap()
}

/// A frontier-valid stratification: random levels when they pass, else skeletal.
pub fn random_stratification(rng: &mut impl Rng, c: &Complex) -> Stratification {
    for _ in 0..20 {
        let strat = compute_strata(c, &random_levels(rng, c)).unwrap();
        if check_frontier(c, &strat).passes() {
            return strat;
        }
    }
    compute_strata(c, &LevelMap::skeletal(c)).unwrap()
}

/// Values from a topological order of the Hasse diagram with a random
/// in-stratum matching reversed. Not every result is a valid stratified
/// function; callers filter.
pub fn matching_values(rng: &mut impl Rng, c: &Complex, strat: &Stratification) -> ValueMap {
    let mut pairs: Vec<(Cell, Cell)> = c
        .covering_pairs()
        .filter(|&(p, ch)| strat.same_stratum(p, ch))
        .collect();
    pairs.shuffle(rng);
    let mut used = BTreeSet::new();
    let mut matched: Vec<(Cell, Cell)> = Vec::new();
    for (p, ch) in pairs {
        if used.contains(&p) || used.contains(&ch) || rng.gen_bool(0.3) {
            continue;
        }
        matched.push((p, ch));
        if topological(c, &matched).is_some() {
            used.insert(p);
            used.insert(ch);
        } else {
            matched.pop();
        }
    }
    let order = topological(c, &matched).expect("matching kept acyclic");
    let mut rank = vec![0i64; c.len()];
    for (i, x) in order.iter().enumerate() {
        rank[x.index()] = i as i64;
    }
    ValueMap::from_fn(c, |x| BigRational::from_integer(BigInt::from(rank[x.index()])))
}

/// Topological order of the Hasse diagram with matched edges reversed.
fn topological(c: &Complex, matched: &[(Cell, Cell)]) -> Option<Vec<Cell>> {
    let n = c.len();
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for (p, ch) in c.covering_pairs() {
        let (from, to) = if matched.contains(&(p, ch)) { (p, ch) } else { (ch, p) };
        succ[from.index()].push(to);
        indeg[to.index()] += 1;
    }
    let mut ready: Vec<Cell> = c.cells().filter(|x| indeg[x.index()] == 0).collect();
    let mut out = Vec::new();
    while let Some(x) = ready.pop() {
        out.push(x);
        for &y in &succ[x.index()] {
            indeg[y.index()] -= 1;
            if indeg[y.index()] == 0 {
                ready.push(y);
            }
        }
    }
    (out.len() == n).then_some(out)
}

/// A random instance that validates as a stratified discrete Morse function.
pub struct Instance {
    pub complex: Complex,
    pub strat: Stratification,
    pub f: ValueMap,
}

pub fn random_valid_instance(rng: &mut impl Rng, max_cells: usize) -> Instance {
    loop {
        let complex = random_complex(rng, max_cells);
        let strat = random_stratification(rng, &complex);
        let f = matching_values(rng, &complex, &strat);
        if validate_sdmf(&complex, &strat, &f, DEFAULT_BUDGET).unwrap().verdict == Verdict::Valid {
            return Instance { complex, strat, f };
        }
    }
}

/// Random skeletal instance with random injective values; always valid.
pub fn random_skeletal_instance(rng: &mut impl Rng, max_cells: usize) -> Instance {
    let complex = random_complex(rng, max_cells);
    let strat = compute_strata(&complex, &LevelMap::skeletal(&complex)).unwrap();
    let f = random_values(rng, &complex);
    Instance { complex, strat, f }
}

/// Stratification of a fixture: its levels if given, else the trivial one.
pub fn fixture_strat(doc: &Document) -> Stratification {
    let levels = doc
        .levels
        .clone()
        .unwrap_or_else(|| LevelMap::trivial(&doc.complex));
    compute_strata(&doc.complex, &levels).unwrap()
}

/// Every connected subset of `set`, as bitmasks over the cells of `c`.
pub fn connected_subsets(c: &Complex, set: &CellSet) -> Vec<u64> {
    let members: Vec<Cell> = set.iter().copied().collect();
    let mut out = Vec::new();
    for mask in 1u64..(1 << members.len()) {
        let subset: CellSet = (0..members.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| members[i])
            .collect();
        if c.connected_components(&subset).len() == 1 {
            out.push(to_mask(&subset));
        }
    }
    out
}

pub fn to_mask(set: &CellSet) -> u64 {
    set.iter().fold(0, |m, c| m | (1 << c.index()))
}

/// The frontier axiom with both sides ranging over all connected subsets of
/// level differences at distinct levels.
pub fn frontier_brute_force(c: &Complex, strat: &Stratification) -> bool {
    assert!(c.len() <= 20, "brute force is exponential");
    let mut by_level: BTreeMap<u32, CellSet> = BTreeMap::new();
    for x in c.cells() {
        by_level.entry(strat.level(x)).or_default().insert(x);
    }
    let pieces: Vec<(u32, Vec<u64>)> = by_level
        .iter()
        .map(|(&l, cells)| (l, connected_subsets(c, cells)))
        .collect();
    let closure_mask = |mask: u64| {
        let set: CellSet = c.cells().filter(|x| mask & (1 << x.index()) != 0).collect();
        to_mask(&c.closure(&set))
    };
    for (i, ss) in &pieces {
        for &s in ss {
            let cl = closure_mask(s);
            for (j, ts) in &pieces {
                if i == j {
                    continue;
                }
                for &t in ts {
                    if cl & t != 0 && t & !cl != 0 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Rank of a 0/1 matrix over the two-element field.
pub fn rank_mod2(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] {
                let pivot_row = rows[rank].clone();
                for (x, p) in rows[r].iter_mut().zip(pivot_row) {
                    *x ^= p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Mod-2 Betti numbers of a simplicial complex from its face incidences.
pub fn betti_mod2(c: &Complex) -> Vec<usize> {
    let top = match c.dimension() {
        Some(d) => d,
        None => return Vec::new(),
    };
    let by_dim: Vec<Vec<Cell>> = (0..=top)
        .map(|k| c.cells().filter(|&x| c.dim(x) == k).collect())
        .collect();
    let rank = |k: usize| -> usize {
        if k == 0 || k > top {
            return 0;
        }
        let rows: Vec<Vec<bool>> = by_dim[k - 1]
            .iter()
            .map(|&lower| by_dim[k].iter().map(|&upper| c.faces(upper).contains(&lower)).collect())
            .collect();
        rank_mod2(rows)
    };
    (0..=top).map(|k| by_dim[k].len() - rank(k) - rank(k + 1)).collect()
}
