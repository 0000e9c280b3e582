//! Built-in transform families and identities, and their text format.

mod format;

use std::sync::OnceLock;

use num_traits::{Signed, Zero};

pub use format::{load_catalog, serialize_catalog, HEADER};

use crate::accelerate::{
    emit_chu_style, rate_of, sum_to_digits, term_count, ChuSeries, ConstantExpr, SeriesInstance,
};
use crate::certify::{
    derive_recursion, match_published_recursion, verify_certificate, Certificate, Recursion,
};
use crate::error::{Error, Result};
use crate::exact::{factor_linear_rational, ExactRational, Var};
use crate::hyperterm::{Assignment, HyperTerm};
use crate::refconst::{digits_agree, reference_value, FixedDecimal};
use format::nonpositive_integer;

/// A bivariate term with a verified certificate and the recursion it gives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformFamily {
    pub id: String,
    pub term: HyperTerm,
    pub certificate: Certificate,
    pub recursion: Recursion,
    pub rate: ExactRational,
    pub section: String,
    /// `(g1, g2)` as stated alongside the certificate, when there is one.
    pub published: Option<Recursion>,
}

impl TransformFamily {
    /// Checks the certificate and derives the recursion and rate from it.
    pub fn new(
        id: &str,
        term: HyperTerm,
        certificate: Certificate,
        section: &str,
        published: Option<Recursion>,
    ) -> Result<Self> {
        let invalid = |message: String| Error::ValidationError {
            id: id.to_string(),
            message,
        };
        if certificate.p2.is_zero() {
            return Err(invalid("p2 is the zero polynomial".into()));
        }
        let report = verify_certificate(&term, &certificate);
        if !report.holds {
            return Err(invalid(format!(
                "certificate does not verify; residual {}",
                report.residual
            )));
        }
        let recursion = derive_recursion(&term, &certificate)?;
        if let Some(p) = &published {
            if !match_published_recursion(&recursion, p) {
                return Err(invalid("stated (g1, g2) differ from the derived recursion".into()));
            }
        }
        let rate = rate_of(&recursion).map_err(|e| invalid(e.to_string()))?;
        Ok(Self {
            id: id.to_string(),
            term,
            certificate,
            recursion,
            rate,
            section: section.to_string(),
            published,
        })
    }
}

/// One identity: a closed form together with the series that sums to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: String,
    /// `None` for identities evaluated only numerically.
    pub family: Option<String>,
    pub assignment: Option<Assignment>,
    pub displayed: Option<ChuSeries>,
    pub target: ConstantExpr,
    pub provenance: String,
    /// The display is an index-shifted form of the emitted series.
    pub display_shifted: bool,
    pub numeric_only: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Catalog {
    pub families: Vec<TransformFamily>,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn family(&self, id: &str) -> Option<&TransformFamily> {
        self.families.iter().find(|f| f.id == id)
    }

    pub fn entry(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// The family and assignment of a family-backed entry.
    pub fn instance<'a>(&'a self, e: &CatalogEntry) -> Option<SeriesInstance<'a>> {
        let family = self.family(e.family.as_deref()?)?;
        Some(SeriesInstance::new(family, e.assignment.clone()?))
    }

    /// Structural checks run on load: references resolve, flags are
    /// consistent, and nothing sits on a pole.
    pub fn check_entry(&self, e: &CatalogEntry) -> Result<()> {
        let invalid = |message: String| Error::ValidationError {
            id: e.id.clone(),
            message,
        };
        match (&e.family, e.numeric_only) {
            (Some(_), true) => return Err(invalid("numeric-only entry names a family".into())),
            (None, false) => return Err(invalid("entry without a family must be numeric-only".into())),
            _ => {}
        }
        if let Some(fid) = &e.family {
            let fam = self
                .family(fid)
                .ok_or_else(|| invalid(format!("unknown family `{fid}`")))?;
            let asg = e
                .assignment
                .as_ref()
                .ok_or_else(|| invalid("family-backed entry needs a, b, n".into()))?;
            for p in fam.term.poch.iter().filter(|p| p.exponent < 0) {
                let v = asg.bind(&crate::RatFunc::from_poly(p.base.clone()))?;
                if let Some(k) = v.constant_value().as_ref().and_then(nonpositive_integer) {
                    return Err(invalid(format!(
                        "lower Pochhammer ({})_k has a pole at k={k}",
                        p.base
                    )));
                }
            }
        } else if e.displayed.is_none() {
            return Err(invalid("numeric-only entry needs a displayed series".into()));
        }
        if e.display_shifted && e.family.is_none() {
            return Err(invalid("display-shifted needs a family to shift against".into()));
        }
        if let Some(d) = &e.displayed {
            if d.rate.is_zero() || d.rate.abs() >= ExactRational::from_integer(1.into()) {
                return Err(invalid(format!("rate {} is not inside (-1, 1)", d.rate)));
            }
            for l in &d.lowers {
                if let Some(k) = nonpositive_integer(l) {
                    return Err(invalid(format!(
                        "lower Pochhammer parameter {l} has a pole at k={k}"
                    )));
                }
            }
            let den = factor_linear_rational(d.summand.den(), Var::J);
            for (root, _) in &den.roots {
                if root.is_integer() && *root >= ExactRational::from_integer(d.start_index.into()) {
                    return Err(invalid(format!("summand has a pole at j={root}")));
                }
            }
        }
        Ok(())
    }
}

static BUILTIN: OnceLock<Catalog> = OnceLock::new();

/// The shipped families and identities, parsed and checked once.
pub fn builtin_catalog() -> &'static Catalog {
    BUILTIN.get_or_init(|| {
        load_catalog(include_str!("builtin.cat")).expect("built-in catalog is valid")
    })
}

/// Outcome of [`validate_entry`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryReport {
    pub id: String,
    pub value: ExactRational,
    pub reference: FixedDecimal,
    /// Significant digits shared by `value` and the reference.
    pub digits: u32,
    pub required: u32,
    pub terms: usize,
    pub pass: bool,
}

/// Extra reference places beyond the digit requirement; covers targets
/// down to about `1e-10`.
const REFERENCE_GUARD: u32 = 20;

/// Sums the entry's series to `digits` digits (the display when there is
/// one, else the accelerated series) and compares with the closed form.
pub fn validate_entry(catalog: &Catalog, e: &CatalogEntry, digits: u32) -> Result<EntryReport> {
    validate_entry_with_terms(catalog, e, digits, None)
}

/// [`validate_entry`] with the term count fixed at `terms` instead of
/// chosen from the rate.
pub fn validate_entry_with_terms(
    catalog: &Catalog,
    e: &CatalogEntry,
    digits: u32,
    terms: Option<usize>,
) -> Result<EntryReport> {
    let sum = |iter: &mut dyn Iterator<Item = Result<ExactRational>>, rate: &ExactRational| match terms {
        Some(t) => {
            let mut acc = ExactRational::zero();
            for x in iter.take(t) {
                acc += x?;
            }
            Ok((acc, t))
        }
        None => sum_to_digits(iter, rate, digits, 20 * term_count(rate, digits)),
    };
    let (value, terms) = match &e.displayed {
        Some(d) => sum(&mut d.terms()?, &d.rate)?,
        None => {
            let inst = catalog.instance(e).ok_or_else(|| Error::ValidationError {
                id: e.id.clone(),
                message: "nothing to evaluate".into(),
            })?;
            sum(&mut inst.accelerated_terms()?, &inst.family.rate)?
        }
    };
    let reference = reference_value(&e.target, digits + REFERENCE_GUARD)?;
    let agree = digits_agree(&value, &reference)?;
    Ok(EntryReport {
        id: e.id.clone(),
        value,
        reference,
        digits: agree,
        required: digits,
        terms,
        pass: agree >= digits,
    })
}

/// How a display lines up with the emitted series of its instance:
/// `display(j) = scale * emitted(j + shift)` wherever `j + shift >= 0`.
/// A negative shift means the display carries extra leading terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplayMatch {
    pub shift: i64,
    pub scale: ExactRational,
}

/// Largest index shift tried by [`match_display`].
const MAX_DISPLAY_SHIFT: i64 = 3;

/// Compares the first `count` displayed terms with the emitted series,
/// allowing a constant factor and a small index shift. `None` when no
/// such alignment exists.
pub fn match_display(
    display: &ChuSeries,
    emitted: &ChuSeries,
    count: usize,
) -> Result<Option<DisplayMatch>> {
    let start = display.start_index as i64;
    let shown: Vec<ExactRational> = display.terms()?.take(count).collect::<Result<_>>()?;
    let span = (count as i64 + start + MAX_DISPLAY_SHIFT) as usize;
    // emitted series start at 0, so index = position
    let mut produced: Vec<ExactRational> = Vec::with_capacity(span);
    for t in emitted.terms()?.take(span) {
        match t {
            Ok(v) => produced.push(v),
            Err(_) => break,
        }
    }
    'shift: for shift in -MAX_DISPLAY_SHIFT..=MAX_DISPLAY_SHIFT {
        let mut scale: Option<ExactRational> = None;
        for (i, d) in shown.iter().enumerate() {
            let idx = start + i as i64 + shift;
            if idx < 0 {
                // leading displayed terms with no emitted counterpart
                continue;
            }
            if idx as usize >= produced.len() {
                continue 'shift;
            }
            let p = &produced[idx as usize];
            match (&scale, p.is_zero()) {
                (_, true) if d.is_zero() => {}
                (_, true) => continue 'shift,
                (None, false) => {
                    if d.is_zero() {
                        continue 'shift;
                    }
                    scale = Some(d / p);
                }
                (Some(c), false) => {
                    if *d != c * p {
                        continue 'shift;
                    }
                }
            }
        }
        if let Some(scale) = scale {
            return Ok(Some(DisplayMatch { shift, scale }));
        }
    }
    Ok(None)
}

/// `f(n0)` for a family-backed entry, from its closed form to `places`
/// decimal places: the target minus any leading displayed terms the
/// emission lacks, divided by the display scale. `Ok(None)` for
/// numeric-only entries.
pub fn family_value_reference(
    catalog: &Catalog,
    e: &CatalogEntry,
    places: u32,
) -> Result<Option<ExactRational>> {
    let Some(inst) = catalog.instance(e) else {
        return Ok(None);
    };
    let target = reference_value(&e.target, places)?.to_rational();
    let Some(d) = &e.displayed else {
        return Ok(Some(target));
    };
    let emitted = emit_chu_style(&inst)?;
    let m = match_display(d, &emitted, DISPLAY_PROBE_TERMS)?.ok_or_else(|| Error::ValidationError {
        id: e.id.clone(),
        message: "display does not match the emitted series".into(),
    })?;
    let lead_count = (-(d.start_index as i64) - m.shift).max(0) as usize;
    let mut lead = ExactRational::zero();
    for t in d.terms()?.take(lead_count) {
        lead += t?;
    }
    Ok(Some((target - lead) / m.scale))
}

/// Displayed terms compared by [`family_value_reference`].
const DISPLAY_PROBE_TERMS: usize = 21;

/// Termwise check of a family-backed display against emission.
/// `Ok(None)` when the entry has no family or display.
pub fn check_display(
    catalog: &Catalog,
    e: &CatalogEntry,
    count: usize,
) -> Result<Option<Option<DisplayMatch>>> {
    let (Some(inst), Some(d)) = (catalog.instance(e), &e.displayed) else {
        return Ok(None);
    };
    let emitted = emit_chu_style(&inst)?;
    Ok(Some(match_display(d, &emitted, count)?))
}
