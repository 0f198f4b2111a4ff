use std::collections::BTreeMap;
use std::error::Error as StdError;
use std::fs;
use std::path::Path;

use stratmorse::collapse::CollapseCertificate;
use stratmorse::conley::{e1_page, mvf_order, validate_mvf, MultivectorField, MvfOrdering};
use stratmorse::cwx::{self, Document};
use stratmorse::homology::{relative_homology, GradedHomology};
use stratmorse::morse::{
    delta, halo, sweep_validated, validate_sdmf, classify, EventKind, MorseReport, ValueMap, Verdict,
};
use stratmorse::stratification::{
    check_convexity, check_frontier, compute_strata, stratum_order, LevelMap, Stratification,
};
use stratmorse::subdivision::{
    barycentric_subdivide, hv_split, pushout_check, theorem_c_check, upper_envelope, SdComplex,
};
use stratmorse::{format_value, parse_value, Cell, CellSet, Complex};

use crate::report::{braces, pass_fail, Record, Report};
use crate::{Cli, Command, Global};

type Result<T> = std::result::Result<T, Box<dyn StdError>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
            Self::Inconclusive => 3,
        }
    }

    fn from_ok(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

pub struct Output {
    pub text: String,
    pub status: Status,
}

fn load(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(cwx::parse(&text)?)
}

fn stratification(doc: &Document, global: &Global) -> Result<Stratification> {
    let levels = if global.skeletal {
        LevelMap::skeletal(&doc.complex)
    } else {
        doc.levels
            .clone()
            .unwrap_or_else(|| LevelMap::trivial(&doc.complex))
    };
    Ok(compute_strata(&doc.complex, &levels)?)
}

fn values(doc: &Document) -> Result<ValueMap> {
    doc.values.clone().ok_or_else(|| "the file has no value lines".into())
}

fn names(c: &Complex, set: &CellSet) -> String {
    braces(c.names(set))
}

fn betti_list(h: &GradedHomology) -> String {
    let items: Vec<String> = h.betti_numbers().iter().map(usize::to_string).collect();
    format!("[{}]", items.join(","))
}

fn torsion_list(h: &GradedHomology) -> String {
    let items: Vec<String> = h
        .degrees
        .iter()
        .enumerate()
        .flat_map(|(k, d)| d.torsion.iter().map(move |t| format!("{k}:{t}")))
        .collect();
    format!("[{}]", items.join(","))
}

fn homology_fields(record: Record, prefix: &str, h: &GradedHomology) -> Record {
    record
        .field(format!("{prefix}betti"), betti_list(h))
        .field(format!("{prefix}torsion"), torsion_list(h))
}

pub fn run(cli: &Cli) -> Result<Output> {
    let g = &cli.global;
    let (report, status) = match &cli.command {
        Command::Validate { file } => validate(&load(file)?, g)?,
        Command::Strata { file } => strata(&load(file)?, g)?,
        Command::Halo { file, cell } => halo_cmd(&load(file)?, cell)?,
        Command::Classify { file } => classify_cmd(&load(file)?, g)?,
        Command::CheckMorse { file, budget, tiebreak } => check_morse(&load(file)?, g, *budget, *tiebreak)?,
        Command::Sweep { file, budget } => sweep_cmd(&load(file)?, g, *budget)?,
        Command::Delta { file, lo, hi } => delta_cmd(&load(file)?, lo, hi)?,
        Command::Subdivide { file } => {
            return subdivide(&load(file)?, g);
        }
        Command::Lowerlink { file, cell } => lowerlink(&load(file)?, g, cell)?,
        Command::TheoremC { file, cell, pushout_only } => theorem_c(&load(file)?, g, cell, *pushout_only)?,
        Command::Conley { file } => conley(&load(file)?, g)?,
        Command::Homology { file, rel } => homology(&load(file)?, rel.as_deref())?,
    };
    Ok(Output {
        text: report.render(g.json_like),
        status,
    })
}

fn validate(doc: &Document, g: &Global) -> Result<(Report, Status)> {
    let c = &doc.complex;
    let mut r = Report::default();
    let structure = c.validate();
    for v in &structure.violations {
        r.push(Record::new("violation").field("check", "complex").field("detail", v.to_string().replace(' ', ";")));
    }
    r.push(Record::new("note").field("regularity", "checked-up-to-combinatorial-proxies"));
    let strat = stratification(doc, g)?;
    let frontier = check_frontier(c, &strat);
    for v in &frontier.violations {
        r.push(
            Record::new("violation")
                .field("check", "frontier")
                .field("cell", c.name(v.cell))
                .field("stratum", v.stratum),
        );
    }
    let convexity = check_convexity(c, &strat);
    for v in &convexity.violations {
        r.push(
            Record::new("violation")
                .field("check", "convexity")
                .field("lower", c.name(v.lower))
                .field("middle", c.name(v.middle))
                .field("upper", c.name(v.upper)),
        );
    }
    let mut ok = structure.passes() && frontier.passes() && convexity.passes();
    let mut summary = Record::new("result")
        .field("complex", pass_fail(structure.passes()))
        .field("frontier", pass_fail(frontier.passes()))
        .field("convexity", pass_fail(convexity.passes()));
    if let Some(f) = &doc.values {
        let injective = f.check_injective(c);
        if let Err(e) = &injective {
            r.push(Record::new("violation").field("check", "injective").field("detail", e.to_string().replace(' ', ";")));
        }
        ok &= injective.is_ok();
        summary = summary.field("injective", pass_fail(injective.is_ok()));
    }
    if let Some(mvf) = &doc.mvf {
        let report = validate_mvf(c, mvf);
        for v in &report.violations {
            r.push(Record::new("violation").field("check", "mvf").field("detail", v.describe(c).replace(' ', ";")));
        }
        ok &= report.passes();
        summary = summary.field("mvf", pass_fail(report.passes()));
    }
    r.push(summary);
    Ok((r, Status::from_ok(ok)))
}

fn strata(doc: &Document, g: &Global) -> Result<(Report, Status)> {
    let c = &doc.complex;
    let strat = stratification(doc, g)?;
    let mut r = Report::default();
    for s in strat.strata() {
        r.push(
            Record::new("stratum")
                .field("id", s.id)
                .field("level", s.level)
                .field("cells", names(c, &s.cells)),
        );
    }
    let frontier = check_frontier(c, &strat);
    for v in &frontier.violations {
        r.push(
            Record::new("violation")
                .field("check", "frontier")
                .field("cell", c.name(v.cell))
                .field("stratum", v.stratum),
        );
    }
    if frontier.passes() {
        let order = stratum_order(c, &strat)?;
        for (lower, upper) in order.pairs() {
            if lower != upper {
                r.push(Record::new("order").field("lower", lower).field("upper", upper));
            }
        }
    }
    r.push(Record::new("result").field("frontier", pass_fail(frontier.passes())));
    Ok((r, Status::from_ok(frontier.passes())))
}

fn halo_cmd(doc: &Document, id: &str) -> Result<(Report, Status)> {
    let c = &doc.complex;
    let f = values(doc)?;
    let h = halo(c, &f, c.cell(id)?)?;
    let mut r = Report::default();
    r.push(
        Record::new("halo")
            .field("cell", id)
            .field("halo", names(c, &h.halo))
            .field("augmented", names(c, &h.augmented))
            .field("shadow", names(c, &h.shadow)),
    );
    Ok((r, Status::Pass))
}

fn cell_records(r: &mut Report, c: &Complex, report: &MorseReport) {
    for rec in &report.records {
        let mut line = Record::new("cell")
            .field("id", c.name(rec.cell))
            .field("stratum", rec.stratum)
            .field("status", rec.status);
        if let Some(p) = rec.partner {
            line = line.field("partner", c.name(p));
        }
        r.push(line);
        if let Some(cert) = &rec.certificate {
            certificate_records(r, c, rec.cell, cert);
        }
        for v in &rec.failures {
            r.push(
                Record::new("violation")
                    .field("cell", c.name(rec.cell))
                    .field("detail", v.describe(c).replace(' ', ";")),
            );
        }
    }
    r.push(Record::new("verdict").field("value", report.verdict));
}

fn certificate_records(r: &mut Report, c: &Complex, cell: Cell, cert: &CollapseCertificate) {
    for (i, p) in cert.pairs.iter().enumerate() {
        let mut line = Record::new("pair")
            .field("cell", c.name(cell))
            .field("sigma", c.name(p.sigma))
            .field("tau", c.name(p.tau));
        if let Some(s) = cert.strata.as_ref().and_then(|s| s.get(i)) {
            line = line.field("stratum", s);
        }
        r.push(line);
    }
}

fn verdict_status(v: Verdict) -> Status {
    match v {
        Verdict::Valid => Status::Pass,
        Verdict::Invalid => Status::Fail,
        Verdict::Inconclusive => Status::Inconclusive,
    }
}

fn classify_cmd(doc: &Document, g: &Global) -> Result<(Report, Status)> {
    let c = &doc.complex;
    let strat = stratification(doc, g)?;
    let report = classify(c, &strat, &values(doc)?)?;
    let mut r = Report::default();
    cell_records(&mut r, c, &report);
    Ok((r, verdict_status(report.verdict)))
}

fn check_morse(doc: &Document, g: &Global, budget: u64, tiebreak: bool) -> Result<(Report, Status)> {
    let c = &doc.complex;
    let strat = stratification(doc, g)?;
    let mut f = values(doc)?;
    let mut r = Report::default();
    if tiebreak {
        let broken = f.tiebreak();
        for cell in c.cells() {
            if broken.value(cell) != f.value(cell) {
                r.push(
                    Record::new("tiebreak")
                        .field("cell", c.name(cell))
                        .field("value", format_value(broken.value(cell))),
                );
            }
        }
        f = broken;
    }
    let report = validate_sdmf(c, &strat, &f, budget)?;
    cell_records(&mut r, c, &report);
    Ok((r, verdict_status(report.verdict)))
}

fn sweep_cmd(doc: &Document, g: &Global, budget: u64) -> Result<(Report, Status)> {
    let c = &doc.complex;
    let strat = stratification(doc, g)?;
    let f = values(doc)?;
    let report = validate_sdmf(c, &strat, &f, budget)?;
    let mut r = Report::default();
    if report.verdict != Verdict::Valid {
        cell_records(&mut r, c, &report);
        return Ok((r, verdict_status(report.verdict)));
    }
    let mut ok = true;
    for e in sweep_validated(c, &strat, &f, &report) {
        let mut line = Record::new("event")
            .field("cell", c.name(e.cell))
            .field("value", format_value(&e.value))
            .field("epsilon", format_value(&e.epsilon))
            .field("kind", e.kind.name());
        match &e.kind {
            EventKind::NoChange => {}
            EventKind::RegularCollapse { certificate } => {
                r.push(line);
                certificate_records(&mut r, c, e.cell, certificate);
                continue;
            }
            EventKind::Attachment { closure, shadow } => {
                line = line
                    .field("closure", names(c, closure))
                    .field("below", names(c, &e.below))
                    .field("shadow", names(c, shadow));
            }
            EventKind::TheoremViolation { reason } => {
                ok = false;
                line = line.field("reason", reason.replace(' ', ";"));
            }
        }
        r.push(line);
    }
    r.push(Record::new("result").field("sweep", pass_fail(ok)));
    Ok((r, Status::from_ok(ok)))
}

fn parse_number(text: &str) -> Result<stratmorse::Value> {
    parse_value(text).ok_or_else(|| format!("bad number {text:?}").into())
}

fn delta_cmd(doc: &Document, lo: &str, hi: &str) -> Result<(Report, Status)> {
    let c = &doc.complex;
    let f = values(doc)?;
    let d = delta(c, &f, &parse_number(lo)?, &parse_number(hi)?)?;
    let mut r = Report::default();
    r.push(
        Record::new("delta")
            .field("cell", c.name(d.cell))
            .field("case", if d.already_present { "already-present" } else { "augmented-halo" })
            .field("cells", names(c, &d.delta)),
    );
    Ok((r, Status::Pass))
}

fn subdivision(doc: &Document, g: &Global) -> Result<SdComplex> {
    let strat = stratification(doc, g)?;
    Ok(barycentric_subdivide(&doc.complex, Some(&strat))?)
}

fn subdivide(doc: &Document, g: &Global) -> Result<Output> {
    let sd = subdivision(doc, g)?;
    let check = sd.check();
    let complex = sd.complex().clone();
    let levels: BTreeMap<Cell, u32> = complex
        .cells()
        .map(|s| (s, sd.stratification().level(s)))
        .collect();
    let mut out = Document::new(complex.clone());
    out.levels = Some(LevelMap::new(&complex, &levels)?);
    if let Some(f) = &doc.values {
        out.values = Some(upper_envelope(&sd, f)?);
    }
    let ok = check.structure.passes() && check.strata_frontier.passes();
    let header = format!(
        "# structure {}\n# strata-frontier {}\n# cell-frontier {} ({} violations)\n",
        pass_fail(check.structure.passes()),
        pass_fail(check.strata_frontier.passes()),
        pass_fail(check.cell_frontier.passes()),
        check.cell_frontier.violations.len()
    );
    Ok(Output {
        text: header + &cwx::serialize(&out),
        status: Status::from_ok(ok),
    })
}

fn sd_names(sd: &SdComplex, set: &CellSet) -> String {
    braces(sd.tokens(set))
}

fn lowerlink(doc: &Document, g: &Global, id: &str) -> Result<(Report, Status)> {
    let f = values(doc)?;
    f.check_injective(&doc.complex)?;
    let sigma = doc.complex.cell(id)?;
    let sd = subdivision(doc, g)?;
    let env = upper_envelope(&sd, &f)?;
    let split = hv_split(&sd, &env, sigma)?;
    let mut r = Report::default();
    r.push(
        Record::new("lower-link")
            .field("cell", id)
            .field("simplices", sd_names(&sd, &split.lower_link))
            .field("horizontal", sd_names(&sd, &split.horizontal))
            .field("vertical", sd_names(&sd, &split.vertical))
            .field("middle", sd_names(&sd, &split.middle)),
    );
    for &s in &split.lower_link {
        let part = if split.horizontal.contains(&s) {
            "horizontal"
        } else if split.vertical.contains(&s) {
            "vertical"
        } else {
            "middle"
        };
        r.push(
            Record::new("simplex")
                .field("token", sd.token(s))
                .field("dim", sd.complex().dim(s))
                .field("envelope", format_value(env.value(s)))
                .field("part", part),
        );
    }
    Ok((r, Status::Pass))
}

fn theorem_c(doc: &Document, g: &Global, id: &str, pushout_only: bool) -> Result<(Report, Status)> {
    let f = values(doc)?;
    let sigma = doc.complex.cell(id)?;
    let sd = subdivision(doc, g)?;
    let report = if pushout_only {
        pushout_check(&sd, &f, sigma)?
    } else {
        theorem_c_check(&sd, &f, sigma)?
    };
    let mut r = Report::default();
    r.push(
        Record::new("split")
            .field("cell", id)
            .field("epsilon", format_value(&report.epsilon))
            .field("horizontal", sd_names(&sd, &report.split.horizontal))
            .field("vertical", sd_names(&sd, &report.split.vertical))
            .field("middle", sd_names(&sd, &report.split.middle)),
    );
    r.push(Record::new("cone").field("simplices", sd_names(&sd, &report.cone)));
    for check in &report.checks {
        r.push(
            Record::new("check")
                .field("name", check.name)
                .field("status", pass_fail(check.passed()))
                .field("witnesses", sd_names(&sd, &check.witnesses)),
        );
    }
    Ok((r, Status::from_ok(report.passed())))
}

fn conley(doc: &Document, g: &Global) -> Result<(Report, Status)> {
    let c = &doc.complex;
    let mvf = match &doc.mvf {
        Some(m) => m.clone(),
        None => MultivectorField::from_strata(&stratification(doc, g)?),
    };
    let mut r = Report::default();
    let validation = validate_mvf(c, &mvf);
    if !validation.passes() {
        for v in &validation.violations {
            r.push(Record::new("violation").field("check", "mvf").field("detail", v.describe(c).replace(' ', ";")));
        }
        return Ok((r, Status::Fail));
    }
    let order = match mvf_order(c, &mvf)? {
        MvfOrdering::Cyclic(cycle) => {
            let labels: Vec<&str> = cycle.iter().map(|&i| mvf.parts()[i].label.as_str()).collect();
            r.push(Record::new("cycle").field("parts", braces(labels)));
            return Ok((r, Status::Fail));
        }
        MvfOrdering::Acyclic(order) => order,
    };
    let page = e1_page(c, &mvf)?;
    for col in &page.columns {
        let part = &mvf.parts()[col.part];
        let mut line = Record::new("e1")
            .field("q", col.q)
            .field("part", &part.label)
            .field("cells", names(c, &part.cells));
        line = homology_fields(line, "filtration-", &col.filtration);
        line = homology_fields(line, "index-", &col.index);
        let same = stratmorse::conley::same_homology(&col.filtration, &col.index);
        r.push(line.field("excision", pass_fail(same)));
    }
    let extension: Vec<&str> = order.extension.iter().map(|&i| mvf.parts()[i].label.as_str()).collect();
    r.push(Record::new("extension").field("parts", braces(extension)));
    let totals: Vec<String> = page.totals.iter().map(usize::to_string).collect();
    let betti: Vec<String> = page.betti.iter().map(usize::to_string).collect();
    r.push(
        Record::new("result")
            .field("e1-ranks", format!("[{}]", totals.join(",")))
            .field("betti", format!("[{}]", betti.join(",")))
            .field("euler-page", page.euler_page)
            .field("euler-complex", page.euler_complex)
            .field("excision", pass_fail(page.excision_failures().is_empty()))
            .field("euler", pass_fail(page.euler_holds()))
            .field("betti-bound", pass_fail(page.betti_bounded())),
    );
    Ok((r, Status::from_ok(page.passed())))
}

fn homology(doc: &Document, rel: Option<&Path>) -> Result<(Report, Status)> {
    let c = &doc.complex;
    let sd = barycentric_subdivide(c, None)?;
    let small = match rel {
        None => CellSet::new(),
        Some(path) => {
            let sub = load(path)?;
            let cells = c.cell_set(sub.complex.cells().map(|x| sub.complex.name(x)))?;
            stratmorse::subdivision::subdivide_subcomplex(&sd, &cells)?
        }
    };
    let h = relative_homology(&sd, &sd.complex().all_cells(), &small)?;
    let mut r = Report::default();
    for (k, d) in h.degrees.iter().enumerate() {
        let torsion: Vec<String> = d.torsion.iter().map(ToString::to_string).collect();
        r.push(
            Record::new("homology")
                .field("degree", k)
                .field("betti", d.betti)
                .field("torsion", format!("[{}]", torsion.join(","))),
        );
    }
    Ok((r, Status::Pass))
}
