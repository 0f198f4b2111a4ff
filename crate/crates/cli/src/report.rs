//! Line-oriented reports.
//!
//! Plain mode prints one record per line as `kind key=value ...`. The
//! `--json-like` mode prints the same records as nested key/value blocks:
//!
//! ```text
//! report {
//!   event {
//!     cell = w1
//!     kind = s-critical-attachment
//!   }
//! }
//! ```

use std::fmt::Write;

#[derive(Debug, Clone)]
pub struct Record {
    kind: String,
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }
}

/// `{a,b,c}`.
pub fn braces<'a>(items: impl IntoIterator<Item = &'a str>) -> String {
    format!("{{{}}}", items.into_iter().collect::<Vec<_>>().join(","))
}

pub fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Debug, Default)]
pub struct Report {
    records: Vec<Record>,
}

impl Report {
    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn render(&self, json_like: bool) -> String {
        let mut out = String::new();
        if json_like {
            out.push_str("report {\n");
            for r in &self.records {
                let _ = writeln!(out, "  {} {{", r.kind);
                for (k, v) in &r.fields {
                    let _ = writeln!(out, "    {k} = {v}");
                }
                out.push_str("  }\n");
            }
            out.push_str("}\n");
        } else {
            for r in &self.records {
                out.push_str(&r.kind);
                for (k, v) in &r.fields {
                    let _ = write!(out, " {k}={v}");
                }
                out.push('\n');
            }
        }
        out
    }
}
