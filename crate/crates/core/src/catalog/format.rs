//! The line-oriented catalog document: `[family id]` and `[entry id]`
//! sections of `key = value` fields. See `docs/catalog-format.md`.

use std::fmt::Write as _;

use num_traits::{One, Signed, ToPrimitive};

use super::{Catalog, CatalogEntry, TransformFamily};
use crate::accelerate::{ChuSeries, ConstantExpr};
use crate::certify::{Certificate, Recursion};
use crate::error::{Error, Result};
use crate::exact::{parse_poly, parse_ratfunc, parse_rational, ExactRational, MultiPoly, RatFunc};
use crate::hyperterm::{Assignment, HyperTerm, PochFactor};

pub const HEADER: &str = "hyperaccel-catalog v1";

/// A field value, possibly spread over continuation lines. `pieces` maps
/// byte offsets of the joined text back to document positions.
struct Value {
    text: String,
    pieces: Vec<(usize, usize, usize)>, // (offset in text, line, column)
}

impl Value {
    fn position(&self, offset: usize) -> (usize, usize) {
        let mut at = (self.pieces[0].1, self.pieces[0].2);
        for &(off, line, col) in &self.pieces {
            if off > offset {
                break;
            }
            at = (line, col + (offset - off));
        }
        at
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> Error {
        let (line, column) = self.position(offset);
        Error::ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    /// Re-anchors an error from a sub-parser that saw `self.text[start..]`.
    fn relocate(&self, start: usize, e: Error) -> Error {
        match e {
            Error::ParseError { column, message, .. } => self.error(start + column - 1, message),
            other => other,
        }
    }
}

struct Field {
    key: String,
    key_line: usize,
    value: Value,
}

struct Section {
    kind: String,
    id: String,
    line: usize,
    fields: Vec<Field>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Field> {
        let pos = self.fields.iter().position(|f| f.key == key)?;
        Some(self.fields.remove(pos))
    }

    fn require(&mut self, key: &str) -> Result<Field> {
        self.take(key).ok_or_else(|| Error::ParseError {
            line: self.line,
            column: 1,
            message: format!("{} `{}` is missing `{key}`", self.kind, self.id),
        })
    }

    fn finish(self) -> Result<()> {
        match self.fields.first() {
            Some(f) => Err(Error::ParseError {
                line: f.key_line,
                column: 1,
                message: format!("unknown key `{}` in {} `{}`", f.key, self.kind, self.id),
            }),
            None => Ok(()),
        }
    }
}

fn split_sections(src: &str) -> Result<Vec<Section>> {
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim_end() == HEADER => {}
        _ => {
            return Err(Error::ParseError {
                line: 1,
                column: 1,
                message: format!("expected header `{HEADER}`"),
            })
        }
    }
    let mut sections: Vec<Section> = Vec::new();
    for (no, raw) in lines {
        let line = raw.trim_end();
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = line.len() - trimmed.len();
        if indent > 0 {
            let field = sections
                .last_mut()
                .and_then(|s| s.fields.last_mut())
                .ok_or_else(|| Error::ParseError {
                    line: no,
                    column: 1,
                    message: "continuation line outside a field".into(),
                })?;
            let v = &mut field.value;
            v.text.push(' ');
            v.pieces.push((v.text.len(), no, indent + 1));
            v.text.push_str(trimmed);
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let inner = rest.strip_suffix(']').ok_or_else(|| Error::ParseError {
                line: no,
                column: line.len() + 1,
                message: "expected `]`".into(),
            })?;
            let mut parts = inner.split_whitespace();
            let (Some(kind), Some(id), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::ParseError {
                    line: no,
                    column: 2,
                    message: "expected `[family <id>]` or `[entry <id>]`".into(),
                });
            };
            if kind != "family" && kind != "entry" {
                return Err(Error::ParseError {
                    line: no,
                    column: 2,
                    message: format!("unknown section kind `{kind}`"),
                });
            }
            sections.push(Section {
                kind: kind.to_string(),
                id: id.to_string(),
                line: no,
                fields: Vec::new(),
            });
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::ParseError {
                line: no,
                column: 1,
                message: "expected `key = value`".into(),
            });
        };
        let Some(section) = sections.last_mut() else {
            return Err(Error::ParseError {
                line: no,
                column: 1,
                message: "field before the first section".into(),
            });
        };
        let key = line[..eq].trim().to_string();
        if section.fields.iter().any(|f| f.key == key) {
            return Err(Error::ParseError {
                line: no,
                column: 1,
                message: format!("duplicate key `{key}`"),
            });
        }
        let after = &line[eq + 1..];
        let value = after.trim_start();
        let col = eq + 2 + (after.len() - value.len());
        section.fields.push(Field {
            key,
            key_line: no,
            value: Value {
                text: value.to_string(),
                pieces: vec![(0, no, col)],
            },
        });
    }
    Ok(sections)
}

fn rational(v: &Value) -> Result<ExactRational> {
    parse_rational(v.text.trim()).ok_or_else(|| v.error(0, format!("not a rational: `{}`", v.text)))
}

fn rational_list(v: &Value) -> Result<Vec<ExactRational>> {
    if v.text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut offset = 0;
    for part in v.text.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push(
            parse_rational(part.trim())
                .ok_or_else(|| v.error(offset + lead, format!("not a rational: `{}`", part.trim())))?,
        );
        offset += part.len() + 1;
    }
    Ok(out)
}

fn poly(v: &Value) -> Result<MultiPoly> {
    parse_poly(&v.text).map_err(|e| v.relocate(0, e))
}

fn ratfunc(v: &Value) -> Result<RatFunc> {
    parse_ratfunc(&v.text).map_err(|e| v.relocate(0, e))
}

fn poly_list(v: &Value) -> Result<Vec<MultiPoly>> {
    if v.text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut offset = 0;
    for part in v.text.split(',') {
        out.push(parse_poly(part).map_err(|e| v.relocate(offset, e))?);
        offset += part.len() + 1;
    }
    Ok(out)
}

/// Groups repeated bases into one factor per base, keeping first-seen order.
fn pochhammer_factors(upper: Vec<MultiPoly>, lower: Vec<MultiPoly>) -> Result<Vec<PochFactor>> {
    let mut acc: Vec<(MultiPoly, i32)> = Vec::new();
    for (base, e) in upper.into_iter().map(|b| (b, 1)).chain(lower.into_iter().map(|b| (b, -1))) {
        match acc.iter_mut().find(|(b, _)| *b == base) {
            Some((_, x)) => *x += e,
            None => acc.push((base, e)),
        }
    }
    acc.into_iter()
        .filter(|(_, e)| *e != 0)
        .map(|(b, e)| PochFactor::new(b, e))
        .collect()
}

fn parse_family(mut s: Section) -> Result<TransformFamily> {
    let section = s.take("section").map(|f| f.value.text).unwrap_or_default();
    let upper = s.take("upper").map(|f| poly_list(&f.value)).transpose()?.unwrap_or_default();
    let lower = s.take("lower").map(|f| poly_list(&f.value)).transpose()?.unwrap_or_default();
    let power = match s.take("power") {
        Some(f) => rational(&f.value)?,
        None => ExactRational::one(),
    };
    let prefactor = match s.take("prefactor") {
        Some(f) => ratfunc(&f.value)?,
        None => RatFunc::one(),
    };
    let r_field = s.require("r")?;
    let r: u32 = r_field
        .value
        .text
        .trim()
        .parse()
        .map_err(|_| r_field.value.error(0, "shift `r` must be a positive integer"))?;
    if r == 0 {
        return Err(r_field.value.error(0, "shift `r` must be a positive integer"));
    }
    let r_fn = ratfunc(&s.require("R")?.value)?;
    let p1 = poly(&s.require("p1")?.value)?;
    let p2 = poly(&s.require("p2")?.value)?;
    let published = match (s.take("g1"), s.take("g2")) {
        (Some(g1), Some(g2)) => Some(Recursion {
            g1: ratfunc(&g1.value)?,
            g2: ratfunc(&g2.value)?,
            r,
        }),
        (None, None) => None,
        (Some(f), None) | (None, Some(f)) => {
            return Err(f.value.error(0, "`g1` and `g2` must be given together"))
        }
    };
    let id = s.id.clone();
    s.finish()?;
    let poch = pochhammer_factors(upper, lower).map_err(|e| match e {
        Error::ValidationError { message, .. } => Error::ValidationError {
            id: id.clone(),
            message,
        },
        other => other,
    })?;
    let term = HyperTerm::new(poch, power, prefactor);
    let certificate = Certificate { r_fn, p1, p2, r };
    TransformFamily::new(&id, term, certificate, &section, published)
}

fn parse_entry(mut s: Section) -> Result<CatalogEntry> {
    let family = s.take("family").map(|f| f.value.text.trim().to_string());
    let a = s.take("a").map(|f| rational(&f.value)).transpose()?;
    let b = s.take("b").map(|f| rational(&f.value)).transpose()?;
    let n = s.take("n").map(|f| rational(&f.value)).transpose()?;
    let assignment = match (a, b, n) {
        (Some(a), Some(b), Some(n)) => Some(Assignment::new(a, b, n)),
        (None, None, None) => None,
        _ => {
            return Err(Error::ParseError {
                line: s.line,
                column: 1,
                message: format!("entry `{}` must give all of a, b, n or none", s.id),
            })
        }
    };
    let target_field = s.require("target")?;
    let target = ConstantExpr::parse(&target_field.value.text)
        .map_err(|e| target_field.value.relocate(0, e))?;
    let displayed = match s.take("rate") {
        Some(rate) => {
            let rate = rational(&rate.value)?;
            let uppers = s.take("upper").map(|f| rational_list(&f.value)).transpose()?.unwrap_or_default();
            let lowers = s.take("lower").map(|f| rational_list(&f.value)).transpose()?.unwrap_or_default();
            let summand = ratfunc(&s.require("summand")?.value)?;
            let start_index = match s.take("start") {
                Some(f) => f
                    .value
                    .text
                    .trim()
                    .parse()
                    .map_err(|_| f.value.error(0, "`start` must be a nonnegative integer"))?,
                None => 0,
            };
            Some(ChuSeries {
                rate,
                uppers,
                lowers,
                summand,
                start_index,
                target: Some(target.clone()),
            })
        }
        None => None,
    };
    let mut display_shifted = false;
    let mut numeric_only = false;
    if let Some(f) = s.take("flags") {
        let mut offset = 0;
        for part in f.value.text.split(',') {
            match part.trim() {
                "display-shifted" => display_shifted = true,
                "numeric-only" => numeric_only = true,
                "" => {}
                other => return Err(f.value.error(offset, format!("unknown flag `{other}`"))),
            }
            offset += part.len() + 1;
        }
    }
    let provenance = s.take("provenance").map(|f| f.value.text).unwrap_or_default();
    let id = s.id.clone();
    s.finish()?;
    Ok(CatalogEntry {
        id,
        family,
        assignment,
        displayed,
        target,
        provenance,
        display_shifted,
        numeric_only,
    })
}

/// Parses a catalog document and re-checks every invariant.
pub fn load_catalog(src: &str) -> Result<Catalog> {
    let mut families = Vec::new();
    let mut entries = Vec::new();
    for s in split_sections(src)? {
        let dup = |id: &str| Error::ValidationError {
            id: id.to_string(),
            message: "duplicate id".into(),
        };
        if s.kind == "family" {
            let f = parse_family(s)?;
            if families.iter().any(|g: &TransformFamily| g.id == f.id) {
                return Err(dup(&f.id));
            }
            families.push(f);
        } else {
            let e = parse_entry(s)?;
            if entries.iter().any(|g: &CatalogEntry| g.id == e.id) {
                return Err(dup(&e.id));
            }
            entries.push(e);
        }
    }
    let catalog = Catalog { families, entries };
    for e in &catalog.entries {
        catalog.check_entry(e)?;
    }
    Ok(catalog)
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Writes a document that [`load_catalog`] reads back to an equal catalog.
pub fn serialize_catalog(c: &Catalog) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    for f in &c.families {
        let _ = writeln!(out, "\n[family {}]", f.id);
        if !f.section.is_empty() {
            let _ = writeln!(out, "section = {}", f.section);
        }
        let (mut up, mut low) = (Vec::new(), Vec::new());
        for p in &f.term.poch {
            let side = if p.exponent > 0 { &mut up } else { &mut low };
            for _ in 0..p.exponent.abs() {
                side.push(p.base.to_string());
            }
        }
        let _ = writeln!(out, "upper = {}", up.join(", "));
        let _ = writeln!(out, "lower = {}", low.join(", "));
        if !f.term.power_base.is_one() {
            let _ = writeln!(out, "power = {}", f.term.power_base);
        }
        if f.term.prefactor != RatFunc::one() {
            let _ = writeln!(out, "prefactor = {}", f.term.prefactor);
        }
        let c = &f.certificate;
        let _ = writeln!(out, "r = {}", c.r);
        let _ = writeln!(out, "R = {}", c.r_fn);
        let _ = writeln!(out, "p1 = {}", c.p1);
        let _ = writeln!(out, "p2 = {}", c.p2);
        if let Some(p) = &f.published {
            let _ = writeln!(out, "g1 = {}", p.g1);
            let _ = writeln!(out, "g2 = {}", p.g2);
        }
    }
    for e in &c.entries {
        let _ = writeln!(out, "\n[entry {}]", e.id);
        if let Some(fam) = &e.family {
            let _ = writeln!(out, "family = {fam}");
        }
        if let Some(asg) = &e.assignment {
            let _ = writeln!(out, "a = {}\nb = {}\nn = {}", asg.a, asg.b, asg.n);
        }
        let _ = writeln!(out, "target = {}", e.target);
        if let Some(d) = &e.displayed {
            let _ = writeln!(out, "rate = {}", d.rate);
            let _ = writeln!(out, "upper = {}", join(&d.uppers));
            let _ = writeln!(out, "lower = {}", join(&d.lowers));
            let _ = writeln!(out, "summand = {}", d.summand);
            if d.start_index != 0 {
                let _ = writeln!(out, "start = {}", d.start_index);
            }
        }
        let mut flags = Vec::new();
        if e.display_shifted {
            flags.push("display-shifted");
        }
        if e.numeric_only {
            flags.push("numeric-only");
        }
        if !flags.is_empty() {
            let _ = writeln!(out, "flags = {}", flags.join(", "));
        }
        if !e.provenance.is_empty() {
            let _ = writeln!(out, "provenance = {}", e.provenance);
        }
    }
    out
}

/// Smallest `k >= 0` with `x + k = 0`, if any.
pub(crate) fn nonpositive_integer(x: &ExactRational) -> Option<u64> {
    if x.is_integer() && !x.is_positive() {
        (-x).to_integer().to_u64()
    } else {
        None
    }
}
