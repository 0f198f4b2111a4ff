//! The `cwx` text format.
//!
//! ```text
//! cwx 1
//! # comment
//! cell <id> <dim>
//! face <parent> <child>
//! value <id> <decimal>
//! level <id> <int>
//! mvf <part> <id>
//! ```
//!
//! Ids must be declared by a `cell` line before they are used. Values and
//! levels are all-or-nothing: once one cell has one, every cell needs one.

use std::collections::BTreeMap;

use crate::complex::{Cell, CellSet, Complex};
use crate::conley::MultivectorField;
use crate::error::{Error, Result};
use crate::morse::ValueMap;
use crate::stratification::LevelMap;
use crate::value::{format_value, parse_value, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub complex: Complex,
    pub levels: Option<LevelMap>,
    pub values: Option<ValueMap>,
    pub mvf: Option<MultivectorField>,
}

impl Document {
    pub fn new(complex: Complex) -> Self {
        Self {
            complex,
            levels: None,
            values: None,
            mvf: None,
        }
    }
}

fn fail(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

pub fn parse(text: &str) -> Result<Document> {
    let mut header_seen = false;
    let mut cells: Vec<(String, usize)> = Vec::new();
    let mut declared: BTreeMap<String, usize> = BTreeMap::new();
    let mut faces: Vec<(String, String)> = Vec::new();
    let mut values: BTreeMap<String, (usize, Value)> = BTreeMap::new();
    let mut levels: BTreeMap<String, (usize, u32)> = BTreeMap::new();
    let mut parts: BTreeMap<String, Vec<String>> = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        if !header_seen {
            if words != ["cwx", "1"] {
                return Err(fail(line, "expected header `cwx 1`"));
            }
            header_seen = true;
            continue;
        }
        let known = |id: &str| {
            if declared.contains_key(id) {
                Ok(id.to_string())
            } else {
                Err(fail(line, format!("undeclared cell {id}")))
            }
        };
        match words[..] {
            ["cell", id, dim] => {
                let dim: usize = dim
                    .parse()
                    .map_err(|_| fail(line, format!("bad dimension {dim:?}")))?;
                if declared.insert(id.to_string(), dim).is_some() {
                    return Err(fail(line, format!("duplicate cell {id}")));
                }
                cells.push((id.to_string(), dim));
            }
            ["face", parent, child] => faces.push((known(parent)?, known(child)?)),
            ["value", id, text] => {
                let id = known(id)?;
                let v = parse_value(text).ok_or_else(|| fail(line, format!("bad value {text:?}")))?;
                if values.insert(id.clone(), (line, v)).is_some() {
                    return Err(fail(line, format!("second value for {id}")));
                }
            }
            ["level", id, text] => {
                let id = known(id)?;
                let l: u32 = text
                    .parse()
                    .map_err(|_| fail(line, format!("bad level {text:?}")))?;
                if levels.insert(id.clone(), (line, l)).is_some() {
                    return Err(fail(line, format!("second level for {id}")));
                }
            }
            ["mvf", part, id] => {
                let id = known(id)?;
                let members = parts.entry(part.to_string()).or_default();
                if members.contains(&id) {
                    return Err(fail(line, format!("{id} listed twice in part {part}")));
                }
                members.push(id);
            }
            _ => return Err(fail(line, format!("unrecognized line {content:?}"))),
        }
    }
    if !header_seen {
        return Err(fail(1, "missing header `cwx 1`"));
    }

    let complex = Complex::new(cells, faces)?;
    let resolve = |id: &String| complex.cell(id);
    let mut doc = Document::new(complex.clone());
    if !values.is_empty() {
        let map: BTreeMap<Cell, Value> = values
            .iter()
            .map(|(id, (_, v))| Ok((resolve(id)?, v.clone())))
            .collect::<Result<_>>()?;
        doc.values = Some(ValueMap::new(&complex, &map)?);
    }
    if !levels.is_empty() {
        let map: BTreeMap<Cell, u32> = levels
            .iter()
            .map(|(id, (_, l))| Ok((resolve(id)?, *l)))
            .collect::<Result<_>>()?;
        doc.levels = Some(LevelMap::new(&complex, &map)?);
    }
    if !parts.is_empty() {
        let parts = parts
            .into_iter()
            .map(|(label, ids)| Ok((label, ids.iter().map(resolve).collect::<Result<CellSet>>()?)))
            .collect::<Result<Vec<_>>>()?;
        doc.mvf = Some(MultivectorField::from_parts(parts));
    }
    Ok(doc)
}

/// Canonical form: cells in token order, then faces, levels, values and
/// multivector parts.
pub fn serialize(doc: &Document) -> String {
    let c = &doc.complex;
    let mut out = String::from("cwx 1\n");
    for cell in c.cells() {
        out.push_str(&format!("cell {} {}\n", c.name(cell), c.dim(cell)));
    }
    for (parent, child) in c.covering_pairs() {
        out.push_str(&format!("face {} {}\n", c.name(parent), c.name(child)));
    }
    if let Some(levels) = &doc.levels {
        for cell in c.cells() {
            out.push_str(&format!("level {} {}\n", c.name(cell), levels.level(cell)));
        }
    }
    if let Some(values) = &doc.values {
        for cell in c.cells() {
            out.push_str(&format!("value {} {}\n", c.name(cell), format_value(values.value(cell))));
        }
    }
    if let Some(mvf) = &doc.mvf {
        for part in mvf.parts() {
            for &cell in &part.cells {
                out.push_str(&format!("mvf {} {}\n", part.label, c.name(cell)));
            }
        }
    }
    out
}
