use std::collections::BTreeSet;
use std::time::Instant;

use hyperaccel::accelerate::{approx, emit_chu_style, term_count, ChuSeries};
use hyperaccel::catalog::{
    family_value_reference, match_display, validate_entry_with_terms, Catalog, CatalogEntry,
    TransformFamily,
};
use hyperaccel::certify::{derive_recursion, match_published_recursion, verify_certificate};
use hyperaccel::exact::rational::to_decimal;
use hyperaccel::refconst::{digits_agree, reference_value, FixedDecimal};
use hyperaccel::{ExactRational, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{mark, Printer, Record};
use crate::{Precision, Select, UsageError};

/// Reference places beyond the requested digits.
const GUARD: u32 = 20;

fn entries<'a>(cat: &'a Catalog, sel: &Select) -> Result<Vec<&'a CatalogEntry>, UsageError> {
    let mut ids = BTreeSet::new();
    for id in &sel.entries {
        cat.entry(id)
            .ok_or_else(|| UsageError(format!("unknown entry `{id}`")))?;
        ids.insert(id.as_str());
    }
    for fid in &sel.families {
        cat.family(fid)
            .ok_or_else(|| UsageError(format!("unknown family `{fid}`")))?;
        ids.extend(
            cat.entries
                .iter()
                .filter(|e| e.family.as_deref() == Some(fid))
                .map(|e| e.id.as_str()),
        );
    }
    if sel.all {
        ids.extend(cat.entries.iter().map(|e| e.id.as_str()));
    }
    if ids.is_empty() && !sel.all {
        return Err(UsageError("nothing selected; use --entry, --family or --all".into()));
    }
    Ok(ids.into_iter().map(|id| cat.entry(id).unwrap()).collect())
}

fn families<'a>(cat: &'a Catalog, sel: &Select) -> Result<Vec<&'a TransformFamily>, UsageError> {
    let mut ids = BTreeSet::new();
    for fid in &sel.families {
        cat.family(fid)
            .ok_or_else(|| UsageError(format!("unknown family `{fid}`")))?;
        ids.insert(fid.as_str());
    }
    for id in &sel.entries {
        let e = cat
            .entry(id)
            .ok_or_else(|| UsageError(format!("unknown entry `{id}`")))?;
        let fid = e
            .family
            .as_deref()
            .ok_or_else(|| UsageError(format!("entry `{id}` is numeric-only; it has no certificate")))?;
        ids.insert(fid);
    }
    if sel.all {
        ids.extend(cat.families.iter().map(|f| f.id.as_str()));
    }
    if ids.is_empty() && !sel.all {
        return Err(UsageError("nothing selected; use --family, --entry or --all".into()));
    }
    Ok(ids.into_iter().map(|id| cat.family(id).unwrap()).collect())
}

// ---------------------------------------------------------------------------
// verify

#[derive(Serialize)]
struct VerifyRecord {
    record: &'static str,
    family: String,
    r: u32,
    rate: String,
    certificate: &'static str,
    recursion: &'static str,
    pass: bool,
    error: Option<String>,
}

impl Record for VerifyRecord {
    fn text(&self) -> String {
        let tail = self.error.as_deref().map(|e| format!("  ({e})")).unwrap_or_default();
        format!(
            "{:<6} r={} rate={:<9} certificate {:<6} recursion {:<18} {}{tail}",
            self.family,
            self.r,
            self.rate,
            self.certificate,
            self.recursion,
            mark(self.pass)
        )
    }
    fn verdict(&self) -> Option<bool> {
        Some(self.pass)
    }
}

fn verify_one(f: &TransformFamily) -> VerifyRecord {
    let report = verify_certificate(&f.term, &f.certificate);
    let derived = derive_recursion(&f.term, &f.certificate);
    let (recursion, error) = match (&derived, &f.published) {
        (Err(e), _) => ("underived", Some(e.to_string())),
        (Ok(d), Some(p)) if match_published_recursion(d, p) => ("matches-published", None),
        (Ok(_), Some(_)) => ("differs-published", None),
        (Ok(d), None) if *d == f.recursion => ("derived", None),
        (Ok(_), None) => ("differs-stored", None),
    };
    VerifyRecord {
        record: "verify",
        family: f.id.clone(),
        r: f.certificate.r,
        rate: f.rate.to_string(),
        certificate: if report.holds { "holds" } else { "fails" },
        recursion,
        pass: report.holds && matches!(recursion, "matches-published" | "derived"),
        error,
    }
}

pub fn verify(cat: &Catalog, sel: &Select, out: &mut Printer) -> Result<(), UsageError> {
    let fams = families(cat, sel)?;
    let records: Vec<VerifyRecord> = fams.par_iter().map(|f| verify_one(f)).collect();
    records.iter().for_each(|r| out.print(r));
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate

#[derive(Serialize)]
struct EvaluateRecord {
    record: &'static str,
    entry: String,
    target: String,
    required: u32,
    terms: Option<usize>,
    digits: Option<u32>,
    value: Option<String>,
    pass: bool,
    error: Option<String>,
}

impl Record for EvaluateRecord {
    fn text(&self) -> String {
        match &self.error {
            Some(e) => format!("{:<34} {:<22} error: {e}  FAIL", self.entry, self.target),
            None => format!(
                "{:<34} {:<22} terms {:>4}  digits {:>4}/{}  {}  {}",
                self.entry,
                self.target,
                self.terms.unwrap_or(0),
                self.digits.unwrap_or(0),
                self.required,
                self.value.as_deref().unwrap_or(""),
                mark(self.pass)
            ),
        }
    }
    fn verdict(&self) -> Option<bool> {
        Some(self.pass)
    }
}

fn terms_override(p: Precision) -> Option<usize> {
    p.terms.map(|t| t as usize)
}

pub fn evaluate(cat: &Catalog, sel: &Select, p: Precision, out: &mut Printer) -> Result<(), UsageError> {
    let list = entries(cat, sel)?;
    let records: Vec<EvaluateRecord> = list
        .par_iter()
        .map(|e| {
            let base = EvaluateRecord {
                record: "evaluate",
                entry: e.id.clone(),
                target: e.target.to_string(),
                required: p.digits,
                terms: None,
                digits: None,
                value: None,
                pass: false,
                error: None,
            };
            match validate_entry_with_terms(cat, e, p.digits, terms_override(p)) {
                Ok(r) => EvaluateRecord {
                    terms: Some(r.terms),
                    digits: Some(r.digits),
                    value: Some(to_decimal(&r.value, p.digits)),
                    pass: r.pass,
                    ..base
                },
                Err(err) => EvaluateRecord {
                    error: Some(err.to_string()),
                    ..base
                },
            }
        })
        .collect();
    records.iter().for_each(|r| out.print(r));
    Ok(())
}

// ---------------------------------------------------------------------------
// emit

#[derive(Serialize)]
struct EmitRecord {
    record: &'static str,
    entry: String,
    source: &'static str,
    series: Option<String>,
    /// `display(j) = scale * emitted(j + shift)`
    shift: Option<i64>,
    scale: Option<String>,
    pass: bool,
    error: Option<String>,
}

impl Record for EmitRecord {
    fn text(&self) -> String {
        let mut s = format!("{}  [{}]", self.entry, self.source);
        if let (Some(shift), Some(scale)) = (self.shift, &self.scale) {
            s += &format!(" display = {scale} * emitted(j{shift:+})");
        }
        if let Some(e) = &self.error {
            s += &format!(" error: {e}");
        }
        s += &format!("  {}", mark(self.pass));
        if let Some(series) = &self.series {
            s += &format!("\n    {series}");
        }
        s
    }
    fn verdict(&self) -> Option<bool> {
        Some(self.pass)
    }
}

/// Displayed terms compared against emission.
const EMIT_CHECK_TERMS: usize = 21;

fn emit_one(cat: &Catalog, e: &CatalogEntry) -> EmitRecord {
    let mut rec = EmitRecord {
        record: "emit",
        entry: e.id.clone(),
        source: "emitted",
        series: None,
        shift: None,
        scale: None,
        pass: false,
        error: None,
    };
    let Some(inst) = cat.instance(e) else {
        rec.source = "display";
        rec.series = e.displayed.as_ref().map(ChuSeries::to_string);
        rec.pass = rec.series.is_some();
        return rec;
    };
    let emitted = match emit_chu_style(&inst) {
        Ok(s) => s,
        Err(err) => {
            rec.error = Some(err.to_string());
            return rec;
        }
    };
    rec.series = Some(emitted.to_string());
    rec.pass = true;
    if let Some(d) = &e.displayed {
        match match_display(d, &emitted, EMIT_CHECK_TERMS) {
            Ok(Some(m)) => {
                rec.shift = Some(m.shift);
                rec.scale = Some(m.scale.to_string());
            }
            Ok(None) => {
                rec.pass = false;
                rec.error = Some("display does not match the emitted series".into());
            }
            Err(err) => {
                rec.pass = false;
                rec.error = Some(err.to_string());
            }
        }
    }
    rec
}

pub fn emit(cat: &Catalog, sel: &Select, out: &mut Printer) -> Result<(), UsageError> {
    let list = entries(cat, sel)?;
    let records: Vec<EmitRecord> = list.par_iter().map(|e| emit_one(cat, e)).collect();
    records.iter().for_each(|r| out.print(r));
    Ok(())
}

// ---------------------------------------------------------------------------
// compare

#[derive(Serialize)]
struct CompareRow {
    record: &'static str,
    entry: String,
    terms: usize,
    accelerated_digits: u32,
    /// `None` for numeric-only entries, which have no original series.
    naive_digits: Option<u32>,
}

impl Record for CompareRow {
    fn text(&self) -> String {
        let naive = self.naive_digits.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        format!("    {:>5} {:>12} {:>7}", self.terms, self.accelerated_digits, naive)
    }
}

#[derive(Serialize)]
struct CompareResult {
    record: &'static str,
    entry: String,
    rate: String,
    required: u32,
    terms: usize,
    accelerated_digits: Option<u32>,
    naive_digits: Option<u32>,
    pass: bool,
    error: Option<String>,
}

impl Record for CompareResult {
    fn text(&self) -> String {
        match &self.error {
            Some(e) => format!("{}  rate {}  error: {e}  FAIL", self.entry, self.rate),
            None => format!(
                "{}  rate {}  {} terms: accelerated {} digits, original {}  {}",
                self.entry,
                self.rate,
                self.terms,
                self.accelerated_digits.unwrap_or(0),
                self.naive_digits
                    .map(|d| format!("{d} digits"))
                    .unwrap_or_else(|| "n/a".into()),
                mark(self.pass)
            ),
        }
    }
    fn verdict(&self) -> Option<bool> {
        Some(self.pass)
    }
}

/// 1, 2, 4, ... below `max`, then `max`.
fn budgets(max: usize) -> Vec<usize> {
    let mut v: Vec<usize> = std::iter::successors(Some(1usize), |t| Some(t * 2))
        .take_while(|t| *t < max)
        .collect();
    v.push(max);
    v
}

fn prefix_sums(
    iter: impl Iterator<Item = Result<ExactRational>>,
    at: &[usize],
) -> Result<Vec<ExactRational>> {
    let mut out = Vec::with_capacity(at.len());
    let mut acc = ExactRational::from_integer(0.into());
    let mut want = at.iter().peekable();
    for (i, t) in iter.enumerate() {
        acc += t?;
        while want.peek().is_some_and(|w| **w == i + 1) {
            out.push(acc.clone());
            want.next();
        }
        if want.peek().is_none() {
            break;
        }
    }
    Ok(out)
}

fn compare_one(cat: &Catalog, e: &CatalogEntry, p: Precision) -> Result<(Vec<CompareRow>, CompareResult)> {
    let places = p.digits + GUARD;
    let inst = cat.instance(e);
    let (rate, reference, accelerated, naive);
    match &inst {
        Some(inst) => {
            rate = inst.family.rate.clone();
            let max = terms_override(p).unwrap_or_else(|| term_count(&rate, p.digits));
            let at = budgets(max);
            let f = family_value_reference(cat, e, places)?.expect("family-backed");
            reference = FixedDecimal::from_rational(&f, places);
            accelerated = (prefix_sums(inst.accelerated_terms()?, &at)?, at.clone());
            naive = Some(prefix_sums(inst.family.term.terms(&inst.assignment)?, &at)?);
        }
        None => {
            let d = e.displayed.as_ref().expect("numeric-only entries have a display");
            rate = d.rate.clone();
            let max = terms_override(p).unwrap_or_else(|| term_count(&rate, p.digits));
            let at = budgets(max);
            reference = reference_value(&e.target, places)?;
            accelerated = (prefix_sums(d.terms()?, &at)?, at);
            naive = None;
        }
    }
    let (acc_sums, at) = accelerated;
    let mut rows = Vec::new();
    for (i, terms) in at.iter().enumerate() {
        let a = digits_agree(&acc_sums[i], &reference)?.min(places);
        let n = match &naive {
            Some(v) => Some(digits_agree(&v[i], &reference)?.min(places)),
            None => None,
        };
        rows.push(CompareRow {
            record: "compare",
            entry: e.id.clone(),
            terms: *terms,
            accelerated_digits: a,
            naive_digits: n,
        });
    }
    let last = rows.last().expect("at least one budget");
    let result = CompareResult {
        record: "compare-result",
        entry: e.id.clone(),
        rate: rate.to_string(),
        required: p.digits,
        terms: last.terms,
        accelerated_digits: Some(last.accelerated_digits),
        naive_digits: last.naive_digits,
        pass: last.accelerated_digits >= p.digits,
        error: None,
    };
    Ok((rows, result))
}

pub fn compare(cat: &Catalog, sel: &Select, p: Precision, out: &mut Printer) -> Result<(), UsageError> {
    let list = entries(cat, sel)?;
    let results: Vec<_> = list
        .par_iter()
        .map(|e| {
            compare_one(cat, e, p).unwrap_or_else(|err| {
                let rate = e
                    .displayed
                    .as_ref()
                    .map(|d| d.rate.to_string())
                    .unwrap_or_default();
                (
                    Vec::new(),
                    CompareResult {
                        record: "compare-result",
                        entry: e.id.clone(),
                        rate,
                        required: p.digits,
                        terms: 0,
                        accelerated_digits: None,
                        naive_digits: None,
                        pass: false,
                        error: Some(err.to_string()),
                    },
                )
            })
        })
        .collect();
    for (rows, result) in &results {
        out.print(result);
        if !rows.is_empty() && out.is_text() {
            out.raw("    terms  accelerated  original");
        }
        rows.iter().for_each(|r| out.print(r));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench

#[derive(Serialize)]
struct BenchRecord {
    record: &'static str,
    entry: String,
    rate: String,
    terms: usize,
    digits: u32,
    digits_per_term: f64,
    /// `-log10 |rate|`, the asymptotic gain per term.
    rate_digits_per_term: f64,
    /// The only field that varies between runs.
    wall_ms: f64,
    pass: bool,
    error: Option<String>,
}

impl Record for BenchRecord {
    fn text(&self) -> String {
        match &self.error {
            Some(e) => format!("{:<34} error: {e}  FAIL", self.entry),
            None => format!(
                "{:<34} rate {:<9} terms {:>4}  digits {:>4}  {:>6.3} digits/term (rate {:.3})  {:>9.3} ms  {}",
                self.entry,
                self.rate,
                self.terms,
                self.digits,
                self.digits_per_term,
                self.rate_digits_per_term,
                self.wall_ms,
                mark(self.pass)
            ),
        }
    }
    fn verdict(&self) -> Option<bool> {
        Some(self.pass)
    }
}

fn rate_digits(rate: &ExactRational) -> f64 {
    -approx(rate).abs().log10()
}

fn round_to(x: f64, places: i32) -> f64 {
    let s = 10f64.powi(places);
    (x * s).round() / s
}

pub fn bench(cat: &Catalog, sel: &Select, p: Precision, out: &mut Printer) -> Result<(), UsageError> {
    let list = entries(cat, sel)?;
    // sequential on purpose: concurrent runs would distort the timings
    for e in list {
        let rate = match (cat.instance(e), &e.displayed) {
            (_, Some(d)) => d.rate.clone(),
            (Some(inst), None) => inst.family.rate.clone(),
            (None, None) => unreachable!("catalog load rejects entries with nothing to sum"),
        };
        let t = Instant::now();
        let report = validate_entry_with_terms(cat, e, p.digits, terms_override(p));
        let wall_ms = round_to(t.elapsed().as_secs_f64() * 1e3, 3);
        let rec = match report {
            Ok(r) => BenchRecord {
                record: "bench",
                entry: e.id.clone(),
                rate: rate.to_string(),
                terms: r.terms,
                digits: r.digits,
                digits_per_term: round_to(r.digits as f64 / r.terms.max(1) as f64, 4),
                rate_digits_per_term: round_to(rate_digits(&rate), 4),
                wall_ms,
                pass: r.pass,
                error: None,
            },
            Err(err) => BenchRecord {
                record: "bench",
                entry: e.id.clone(),
                rate: rate.to_string(),
                terms: 0,
                digits: 0,
                digits_per_term: 0.0,
                rate_digits_per_term: round_to(rate_digits(&rate), 4),
                wall_ms,
                pass: false,
                error: Some(err.to_string()),
            },
        };
        out.print(&rec);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// list

#[derive(Serialize)]
struct FamilyRecord {
    record: &'static str,
    id: String,
    r: u32,
    rate: String,
    section: String,
}

impl Record for FamilyRecord {
    fn text(&self) -> String {
        format!("family {:<6} r={} rate={:<9} {}", self.id, self.r, self.rate, self.section)
    }
}

#[derive(Serialize)]
struct EntryRecord {
    record: &'static str,
    id: String,
    family: Option<String>,
    target: String,
    numeric_only: bool,
}

impl Record for EntryRecord {
    fn text(&self) -> String {
        format!(
            "entry  {:<34} {:<6} {}",
            self.id,
            self.family.as_deref().unwrap_or("-"),
            self.target
        )
    }
}

pub fn list(cat: &Catalog, out: &mut Printer) -> Result<(), UsageError> {
    let mut fams: Vec<&TransformFamily> = cat.families.iter().collect();
    fams.sort_by(|a, b| a.id.cmp(&b.id));
    for f in fams {
        out.print(&FamilyRecord {
            record: "family",
            id: f.id.clone(),
            r: f.certificate.r,
            rate: f.rate.to_string(),
            section: f.section.clone(),
        });
    }
    let mut ents: Vec<&CatalogEntry> = cat.entries.iter().collect();
    ents.sort_by(|a, b| a.id.cmp(&b.id));
    for e in ents {
        out.print(&EntryRecord {
            record: "entry",
            id: e.id.clone(),
            family: e.family.clone(),
            target: e.target.to_string(),
            numeric_only: e.numeric_only,
        });
    }
    Ok(())
}
