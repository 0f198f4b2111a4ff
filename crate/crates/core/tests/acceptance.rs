//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails. Run with `--nocapture` to see the lines.

mod common;

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::One;

use stratmorse::collapse::{replay, DEFAULT_BUDGET};
use stratmorse::conley::{conley_index, e1_page, mvf_order, MultivectorField, MvfOrdering};
use stratmorse::cwx::Document;
use stratmorse::fixtures;
use stratmorse::homology::{relative_homology, GradedHomology};
use stratmorse::morse::{
    classify, delta, halo, sublevel_closure, sweep, CellStatus, EventKind, ValueMap,
};
use stratmorse::stratification::{
    check_frontier, compute_strata, LevelMap, Stratification,
};
use stratmorse::subdivision::{
    barycentric_subdivide, lower_link, subdivide_subcomplex, theorem_c_check, upper_envelope,
};
use stratmorse::value::{midpoint, parse_value};
use stratmorse::{Cell, CellSet, Complex};

use common::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn named_fixtures() -> Vec<(&'static str, Document)> {
    fixtures::ALL
        .iter()
        .map(|(name, text)| (*name, stratmorse::cwx::parse(text).unwrap()))
        .collect()
}

fn valued_fixtures() -> Vec<(&'static str, Document, ValueMap)> {
    named_fixtures()
        .into_iter()
        .filter_map(|(name, doc)| {
            let f = doc.values.clone()?;
            f.check_injective(&doc.complex).ok()?;
            Some((name, doc, f))
        })
        .collect()
}

fn frontier_valid(c: &Complex, strat: &Stratification) -> bool {
    check_frontier(c, strat).passes()
}

fn value(text: &str) -> BigRational {
    parse_value(text).unwrap()
}

fn names(c: &Complex, set: &CellSet) -> String {
    c.names(set).join(",")
}

fn criterion_1() -> Outcome {
    let doc = fixtures::fig1();
    let c = &doc.complex;
    let f = doc.values.as_ref().unwrap();
    let v = c.cell("v").unwrap();
    ensure!(*f.value(v) == value("3"), "f(v) = {}", f.value(v));
    let got = sublevel_closure(c, f, &value("1"));
    let expected = c.cell_set(["v", "w1", "w2", "w4", "w5", "e1"]).unwrap();
    ensure!(got == expected, "cl(f<=1) = {{{}}}", names(c, &got));
    ensure!(got.contains(&v), "v missing");
    Ok(format!("cl(f<=1) = {{{}}} contains v", names(c, &got)))
}

fn criterion_2() -> Outcome {
    let doc = fixtures::fig1();
    let c = &doc.complex;
    let f = doc.values.as_ref().unwrap();
    let strat = fixture_strat(&doc);
    let sd = barycentric_subdivide(c, Some(&strat)).map_err(|e| e.to_string())?;
    let env = upper_envelope(&sd, f).map_err(|e| e.to_string())?;
    let v = c.cell("v").unwrap();
    let link = lower_link(&sd, &env, v);
    ensure!(link.len() == 2, "lower link has {} simplices", link.len());
    ensure!(link.iter().all(|&s| sd.chain(s).len() == 1), "lower link is not two vertices");
    let mut values: Vec<BigRational> = link.iter().map(|&s| env.value(s).clone()).collect();
    values.sort();
    ensure!(values == vec![value("1"), value("2")], "envelope values {values:?}");
    Ok(format!("lower link of [v] = {{{}}} with values 1,2", sd.tokens(&link).join(",")))
}

fn random_valued(count: u64, seed: u64, max_cells: usize) -> Vec<(Complex, ValueMap)> {
    (0..count)
        .map(|i| {
            let mut r = rng(seed + i);
            let c = random_complex(&mut r, max_cells);
            let f = random_values(&mut r, &c);
            (c, f)
        })
        .collect()
}

fn halo_laws(c: &Complex, f: &ValueMap) -> Result<(), String> {
    let halos: Vec<_> = c.cells().map(|x| halo(c, f, x).unwrap()).collect();
    for (i, a) in halos.iter().enumerate() {
        for b in &halos[i + 1..] {
            ensure!(a.halo.is_disjoint(&b.halo), "halos of {} and {} meet", c.name(a.cell), c.name(b.cell));
        }
        for &x in &a.augmented {
            for &y in c.strict_cofaces(x) {
                ensure!(
                    !c.leq(y, a.cell) || a.augmented.contains(&y),
                    "augmented halo of {} is not an up-set in its closure",
                    c.name(a.cell)
                );
            }
        }
        ensure!(c.is_subcomplex(&a.shadow), "shadow of {} is not a subcomplex", c.name(a.cell));
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let fixtures = valued_fixtures();
    for (name, doc, f) in &fixtures {
        halo_laws(&doc.complex, f).map_err(|e| format!("{name}: {e}"))?;
    }
    let random = random_valued(200, 3_000, 30);
    for (i, (c, f)) in random.iter().enumerate() {
        halo_laws(c, f).map_err(|e| format!("random #{i}: {e}"))?;
    }
    Ok(format!("{} fixtures, {} random complexes", fixtures.len(), random.len()))
}

/// Faces whose lower star has `sigma` as its unique minimum, by exhaustive search.
fn augmented_halo_oracle(c: &Complex, f: &ValueMap, sigma: Cell) -> CellSet {
    let mut out = CellSet::from([sigma]);
    for tau in c.cells().filter(|&t| c.lt(t, sigma)) {
        let star: Vec<Cell> = c
            .cells()
            .filter(|&r| c.lt(tau, r) && f.value(r) <= f.value(tau))
            .collect();
        if star.iter().min_by_key(|&&r| f.value(r)) == Some(&sigma) {
            out.insert(tau);
        }
    }
    out
}

fn closure_oracle(c: &Complex, f: &ValueMap, t: &BigRational) -> CellSet {
    c.cells()
        .filter(|&x| c.cells().any(|y| c.leq(x, y) && f.value(y) <= t))
        .collect()
}

fn criterion_4() -> Outcome {
    let mut intervals = 0;
    for (i, (c, f)) in random_valued(200, 4_000, 30).iter().enumerate() {
        let order = f.ascending();
        let one = BigRational::one();
        for (k, &sigma) in order.iter().enumerate() {
            let v = f.value(sigma);
            let lower = if k == 0 { v - &one } else { midpoint(f.value(order[k - 1]), v) };
            let upper = order.get(k + 1).map_or(v + &one, |&y| midpoint(v, f.value(y)));
            for lo in [&lower, v] {
                for hi in [v, &upper] {
                    let got = delta(c, f, lo, hi).map_err(|e| format!("random #{i}: {e}"))?;
                    let below = closure_oracle(c, f, lo);
                    let direct: CellSet =
                        closure_oracle(c, f, hi).difference(&below).copied().collect();
                    let cases = if below.contains(&sigma) {
                        CellSet::new()
                    } else {
                        augmented_halo_oracle(c, f, sigma)
                    };
                    ensure!(got.delta == direct, "random #{i}: delta differs from subtraction");
                    ensure!(direct == cases, "random #{i}: subtraction differs from case analysis at {}", c.name(sigma));
                    intervals += 1;
                }
            }
        }
    }
    Ok(format!("{intervals} intervals on 200 random complexes"))
}

/// Valid stratified discrete Morse functions: fixtures under their own and
/// the skeletal stratification, random skeletal and random stratified ones.
fn valid_instances() -> Vec<(String, Instance)> {
    let mut out = Vec::new();
    for (name, doc, f) in valued_fixtures() {
        let own = fixture_strat(&doc);
        let skeletal = compute_strata(&doc.complex, &LevelMap::skeletal(&doc.complex)).unwrap();
        for (label, strat) in [("own", own), ("skeletal", skeletal)] {
            if !frontier_valid(&doc.complex, &strat) {
                continue;
            }
            let report = stratmorse::validate_sdmf(&doc.complex, &strat, &f, DEFAULT_BUDGET).unwrap();
            if report.verdict == stratmorse::Verdict::Valid {
                out.push((
                    format!("{name}/{label}"),
                    Instance { complex: doc.complex.clone(), strat, f: f.clone() },
                ));
            }
        }
    }
    for i in 0..100 {
        out.push((format!("skeletal #{i}"), random_skeletal_instance(&mut rng(5_000 + i), 30)));
    }
    for i in 0..100 {
        out.push((format!("stratified #{i}"), random_valid_instance(&mut rng(6_000 + i), 16)));
    }
    out
}

fn criterion_5(instances: &[(String, Instance)]) -> Outcome {
    let (mut collapses, mut pairs, mut unchanged) = (0, 0, 0);
    for (name, inst) in instances {
        let (c, strat, f) = (&inst.complex, &inst.strat, &inst.f);
        let sd = barycentric_subdivide(c, Some(strat)).unwrap();
        for event in sweep(c, strat, f, DEFAULT_BUDGET).map_err(|e| format!("{name}: {e}"))? {
            let at = || format!("{name} at {}", c.name(event.cell));
            let removed: CellSet = event.above.difference(&event.below).copied().collect();
            match &event.kind {
                EventKind::NoChange => {
                    ensure!(removed.is_empty(), "{}: no-change event grew the closure", at());
                    unchanged += 1;
                }
                EventKind::RegularCollapse { certificate } => {
                    for p in &certificate.pairs {
                        ensure!(strat.same_stratum(p.sigma, p.tau), "{}: pair crosses strata", at());
                    }
                    let end = replay(c, &event.above, certificate, Some(strat))
                        .map_err(|e| format!("{}: {e}", at()))?;
                    ensure!(end == event.below, "{}: replay misses the lower closure", at());
                    let big = subdivide_subcomplex(&sd, &event.above).unwrap();
                    let small = subdivide_subcomplex(&sd, &event.below).unwrap();
                    let h = relative_homology(&sd, &big, &small).unwrap();
                    ensure!(h.is_zero(), "{}: relative homology {h}", at());
                    collapses += 1;
                    pairs += certificate.pairs.len();
                }
                EventKind::Attachment { .. } => {}
                EventKind::TheoremViolation { reason } => {
                    return Err(format!("{}: {reason}", at()));
                }
            }
        }
    }
    ensure!(pairs > 0, "no instance exercised a nonempty collapse");
    Ok(format!(
        "{} instances, {collapses} collapse events ({pairs} pairs), {unchanged} unchanged",
        instances.len()
    ))
}

fn criterion_6(instances: &[(String, Instance)]) -> Outcome {
    let mut attachments = 0;
    for (name, inst) in instances {
        let (c, strat, f) = (&inst.complex, &inst.strat, &inst.f);
        let report = classify(c, strat, f).unwrap();
        for event in sweep(c, strat, f, DEFAULT_BUDGET).map_err(|e| format!("{name}: {e}"))? {
            let at = format!("{name} at {}", c.name(event.cell));
            let s_critical = report.record(event.cell).status == CellStatus::SCritical;
            let EventKind::Attachment { closure, shadow } = &event.kind else {
                ensure!(!s_critical, "{at}: s-critical cell without attachment");
                continue;
            };
            ensure!(s_critical, "{at}: attachment at a cell that is not s-critical");
            let cl = c.closure_of(event.cell);
            let aug = augmented_halo_oracle(c, f, event.cell);
            let sh: CellSet = cl.difference(&aug).copied().collect();
            ensure!(*closure == cl && *shadow == sh, "{at}: reported sets differ from oracle");
            let union: CellSet = event.below.union(&cl).copied().collect();
            let meet: CellSet = event.below.intersection(&cl).copied().collect();
            ensure!(event.above == union, "{at}: union identity fails");
            ensure!(meet == sh, "{at}: intersection identity fails");
            attachments += 1;
        }
    }
    Ok(format!("{attachments} s-critical events"))
}

fn theorem_c_instances() -> Vec<(String, Complex, Stratification, ValueMap)> {
    let mut out = Vec::new();
    for (name, doc, f) in valued_fixtures() {
        let strat = fixture_strat(&doc);
        if frontier_valid(&doc.complex, &strat) {
            out.push((name.to_string(), doc.complex, strat, f));
        }
    }
    for i in 0..60 {
        let inst = random_valid_instance(&mut rng(7_000 + i), 12);
        out.push((format!("stratified #{i}"), inst.complex, inst.strat, inst.f));
    }
    for i in 0..60 {
        let mut r = rng(8_000 + i);
        let c = random_complex(&mut r, 12);
        let strat = random_stratification(&mut r, &c);
        let f = random_values(&mut r, &c);
        out.push((format!("random #{i}"), c, strat, f));
    }
    out
}

fn criterion_7() -> Outcome {
    let instances = theorem_c_instances();
    let mut cells = 0;
    for (name, c, strat, f) in &instances {
        let report = classify(c, strat, f).unwrap();
        let sd = barycentric_subdivide(c, Some(strat)).unwrap();
        for rec in &report.records {
            if !matches!(rec.status, CellStatus::Critical | CellStatus::SCritical) {
                continue;
            }
            let at = format!("{name} at {}", c.name(rec.cell));
            let tc = theorem_c_check(&sd, f, rec.cell).map_err(|e| format!("{at}: {e}"))?;
            ensure!(tc.checks.len() == 4, "{at}: {} checks", tc.checks.len());
            for check in &tc.checks {
                ensure!(
                    check.passed(),
                    "{at}: {} fails at {{{}}}",
                    check.name,
                    sd.tokens(&check.witnesses).join(",")
                );
            }
            cells += 1;
        }
    }
    Ok(format!("{cells} critical cells on {} instances", instances.len()))
}

fn criterion_8() -> Outcome {
    let mut cases: Vec<(String, Complex, ValueMap)> = valued_fixtures()
        .into_iter()
        .map(|(n, d, f)| (n.to_string(), d.complex, f))
        .collect();
    for (i, (c, f)) in random_valued(200, 9_000, 30).into_iter().enumerate() {
        cases.push((format!("random #{i}"), c, f));
    }
    let mut critical = 0;
    for (name, c, f) in &cases {
        let strat = compute_strata(c, &LevelMap::trivial(c)).unwrap();
        let report = classify(c, &strat, f).unwrap();
        for rec in &report.records {
            let x = rec.cell;
            let faces = c.cells().filter(|&y| c.lt(y, x) && f.value(y) >= f.value(x)).count();
            let cofaces = c.cells().filter(|&y| c.lt(x, y) && f.value(y) <= f.value(x)).count();
            let forman_critical = faces == 0 && cofaces == 0;
            let reported_critical = matches!(rec.status, CellStatus::Critical | CellStatus::SCritical);
            ensure!(
                forman_critical == reported_critical,
                "{name} at {}: critical mismatch",
                c.name(x)
            );
            ensure!(
                reported_critical == (rec.status == CellStatus::SCritical),
                "{name} at {}: critical but not s-critical",
                c.name(x)
            );
            critical += usize::from(forman_critical);
        }
    }
    Ok(format!("{critical} critical cells on {} instances", cases.len()))
}

fn concentrated(h: &GradedHomology, k: usize) -> bool {
    h.degrees.iter().enumerate().all(|(d, deg)| {
        deg.torsion.is_empty() && deg.betti == usize::from(d == k)
    }) && h.betti(k) == 1
}

fn criterion_9() -> Outcome {
    let mut complexes: Vec<(String, Complex)> = named_fixtures()
        .into_iter()
        .map(|(n, d)| (n.to_string(), d.complex))
        .collect();
    for i in 0..40 {
        complexes.push((format!("random #{i}"), random_complex(&mut rng(10_000 + i), 20)));
    }
    let (mut singles, mut free) = (0, 0);
    for (name, c) in &complexes {
        for x in c.cells() {
            let h = conley_index(c, &CellSet::from([x])).map_err(|e| format!("{name}: {e}"))?;
            ensure!(concentrated(&h, c.dim(x)), "{name}: index of {} is {h}", c.name(x));
            singles += 1;
        }
        for (p, ch) in c.covering_pairs() {
            let h = conley_index(c, &CellSet::from([p, ch])).map_err(|e| format!("{name}: {e}"))?;
            ensure!(h.is_zero(), "{name}: index of {{{},{}}} is {h}", c.name(ch), c.name(p));
            free += 1;
        }
    }
    Ok(format!("{singles} single cells, {free} pairs"))
}

fn criterion_10() -> Outcome {
    let mut pages = 0;
    let mut slowest = Duration::ZERO;
    for (name, doc) in named_fixtures() {
        let c = &doc.complex;
        let start = Instant::now();
        let mut fields = vec![MultivectorField::singletons(c)];
        let strat = fixture_strat(&doc);
        if frontier_valid(c, &strat) {
            fields.push(MultivectorField::from_strata(&strat));
        }
        if let Some(mvf) = &doc.mvf {
            if matches!(mvf_order(c, mvf).unwrap(), MvfOrdering::Acyclic(_)) {
                fields.push(mvf.clone());
            }
        }
        for mvf in &fields {
            let page = e1_page(c, mvf).map_err(|e| format!("{name}: {e}"))?;
            ensure!(page.excision_failures().is_empty(), "{name}: excision fails at {:?}", page.excision_failures());
            ensure!(page.euler_holds(), "{name}: Euler {} vs {}", page.euler_page, page.euler_complex);
            ensure!(page.betti_bounded(), "{name}: betti {:?} exceed totals {:?}", page.betti, page.totals);
            pages += 1;
        }
        slowest = slowest.max(start.elapsed());
    }
    ensure!(slowest < Duration::from_secs(60), "slowest fixture took {slowest:?}");
    Ok(format!("{pages} pages, slowest fixture {slowest:.2?}"))
}

fn criterion_11() -> Outcome {
    let (mut agree_pass, mut agree_fail) = (0, 0);
    let mut cases: Vec<(String, Complex, Stratification)> = named_fixtures()
        .into_iter()
        .filter(|(_, d)| d.complex.len() <= 12)
        .map(|(n, d)| {
            let strat = fixture_strat(&d);
            (n.to_string(), d.complex, strat)
        })
        .collect();
    for i in 0..300 {
        let mut r = rng(11_000 + i);
        let c = random_complex(&mut r, 12);
        let strat = compute_strata(&c, &random_levels(&mut r, &c)).unwrap();
        cases.push((format!("random #{i}"), c, strat));
    }
    for (name, c, strat) in &cases {
        let singleton = check_frontier(c, strat).passes();
        ensure!(singleton == frontier_brute_force(c, strat), "{name}: checkers disagree");
        if singleton {
            agree_pass += 1;
        } else {
            agree_fail += 1;
        }
    }
    ensure!(agree_fail > 0 && agree_pass > 0, "random levels never exercised both outcomes");
    Ok(format!("{} complexes: {agree_pass} valid, {agree_fail} violating", cases.len()))
}

fn run(number: usize, title: &str, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    match &outcome {
        Ok(detail) => println!("PASS {number:>2} {title}: {detail} [{elapsed:.2?}]"),
        Err(reason) => println!("FAIL {number:>2} {title}: {reason} [{elapsed:.2?}]"),
    }
    outcome.is_ok()
}

#[test]
fn acceptance() {
    let instances = valid_instances();
    let results = [
        run(1, "sublevel closure at 1 contains v", criterion_1),
        run(2, "lower link of [v] in the subdivision", criterion_2),
        run(3, "halo laws", criterion_3),
        run(4, "sublevel difference case analysis", criterion_4),
        run(5, "regular intervals collapse", || criterion_5(&instances)),
        run(6, "s-critical attachments", || criterion_6(&instances)),
        run(7, "decomposition at critical cells", criterion_7),
        run(8, "trivial stratification recovers criticality", criterion_8),
        run(9, "Conley indices of cells and free pairs", criterion_9),
        run(10, "E1 page consistency", criterion_10),
        run(11, "frontier checker against brute force", criterion_11),
    ];
    let failed: Vec<usize> = (1..=results.len()).filter(|&i| !results[i - 1]).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
