//! Conditional relations extracted from a master relation.
//!
//! A master comparison `(X, Y)` is evidence for the conditional on a fixed
//! value `v` of an axis exactly when `X` and `Y` agree outside the `v`-slice.
//! The evidence is the pair of slices with the master verdict. Because two
//! alternatives that differ somewhere can agree outside at most one slice per
//! axis, one pass over the comparisons sorts all evidence for an axis.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::alternative::value_key;
use crate::dataset::{Comparison, PreferenceDataset, Verdict};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::space::{Axis, FixedValue, Layout};

/// One master comparison read as a comparison of slices.
///
/// `x` and `y` are stored in canonical orientation (`x` lexicographically
/// above `y`), with `verdict` taken relative to `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub verdict: Verdict,
    pub source: Comparison,
}

/// Two contexts that induce different verdicts for the same slice pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contradiction {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub first: (Verdict, Comparison),
    pub second: (Verdict, Comparison),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    /// No evidence for this pair.
    Unknown,
    Known(Verdict),
    /// Evidence exists but disagrees across contexts.
    Conflicting,
}

#[derive(Debug, Clone)]
pub struct ConditionalRelation {
    pub axis: Axis,
    pub fixed: FixedValue,
    /// All evidence in canonical order.
    pub evidence: Vec<Evidence>,
    pub well_defined: bool,
    pub contradictions: Vec<Contradiction>,
    index: HashMap<(Vec<u64>, Vec<u64>), Vec<Verdict>>,
}

pub(crate) fn lex_cmp(x: &[f64], y: &[f64]) -> Ordering {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| x.len().cmp(&y.len()))
}

/// Puts a slice pair in canonical orientation, flipping the verdict if needed.
pub(crate) fn orient(x: Vec<f64>, y: Vec<f64>, verdict: Verdict) -> (Vec<f64>, Vec<f64>, Verdict) {
    if lex_cmp(&x, &y) == Ordering::Less {
        (y, x, verdict.flip())
    } else {
        (x, y, verdict)
    }
}

fn evidence_cmp(a: &Evidence, b: &Evidence) -> Ordering {
    lex_cmp(&a.x, &b.x)
        .then_with(|| lex_cmp(&a.y, &b.y))
        .then_with(|| a.verdict.cmp(&b.verdict))
        .then_with(|| a.source.cmp(&b.source))
}

impl ConditionalRelation {
    fn build(axis: Axis, fixed: FixedValue, mut evidence: Vec<Evidence>) -> Self {
        evidence.sort_by(evidence_cmp);
        let mut index: HashMap<(Vec<u64>, Vec<u64>), Vec<Verdict>> = HashMap::new();
        let mut contradictions = Vec::new();
        let mut start = 0;
        while start < evidence.len() {
            let mut end = start + 1;
            while end < evidence.len()
                && lex_cmp(&evidence[end].x, &evidence[start].x).is_eq()
                && lex_cmp(&evidence[end].y, &evidence[start].y).is_eq()
            {
                end += 1;
            }
            let group = &evidence[start..end];
            let mut verdicts: Vec<Verdict> = Vec::new();
            for e in group {
                if !verdicts.contains(&e.verdict) {
                    verdicts.push(e.verdict);
                }
            }
            let head = &group[0];
            for e in group.iter().filter(|e| e.verdict != head.verdict) {
                if contradictions
                    .iter()
                    .any(|c: &Contradiction| c.second.0 == e.verdict && c.x == head.x && c.y == head.y)
                {
                    continue;
                }
                contradictions.push(Contradiction {
                    x: head.x.clone(),
                    y: head.y.clone(),
                    first: (head.verdict, head.source),
                    second: (e.verdict, e.source),
                });
            }
            index.insert((value_key(&head.x), value_key(&head.y)), verdicts);
            start = end;
        }
        ConditionalRelation {
            axis,
            fixed,
            well_defined: contradictions.is_empty(),
            evidence,
            contradictions,
            index,
        }
    }

    /// What the evidence says about `x` versus `y` (in that orientation).
    pub fn lookup(&self, x: &[f64], y: &[f64]) -> Lookup {
        if value_key(x) == value_key(y) {
            return Lookup::Known(Verdict::Indifferent);
        }
        let (flip, key) = if lex_cmp(x, y) == Ordering::Less {
            (true, (value_key(y), value_key(x)))
        } else {
            (false, (value_key(x), value_key(y)))
        };
        match self.index.get(&key).map(Vec::as_slice) {
            None | Some([]) => Lookup::Unknown,
            Some([v]) => Lookup::Known(if flip { v.flip() } else { *v }),
            Some(_) => Lookup::Conflicting,
        }
    }

    /// Distinct slice pairs with a single verdict, in canonical orientation.
    pub fn settled_pairs(&self) -> BTreeMap<(Vec<u64>, Vec<u64>), (Verdict, Comparison)> {
        let mut out = BTreeMap::new();
        for e in &self.evidence {
            let key = (value_key(&e.x), value_key(&e.y));
            if matches!(self.index.get(&key).map(Vec::len), Some(1)) {
                out.entry(key).or_insert((e.verdict, e.source));
            }
        }
        out
    }
}

fn check_axis(data: &PreferenceDataset, axis: Axis) -> Result<Layout> {
    let layout = data
        .layout()
        .ok_or_else(|| Error::Dataset("the universe is empty".into()))?;
    if !layout.has_axis(axis) {
        return Err(Error::AxisAbsent(axis.to_string()));
    }
    Ok(layout)
}

fn differing_cells(a: &[f64], b: &[f64]) -> Vec<usize> {
    a.iter().zip(b).enumerate().filter(|(_, (x, y))| x != y).map(|(k, _)| k).collect()
}

fn slice(values: &[f64], cells: &[usize]) -> Vec<f64> {
    // `+ 0.0` folds -0.0 into 0.0 so identity stays exact-value based
    cells.iter().map(|&c| values[c] + 0.0).collect()
}

/// Routes one comparison to the fixed value whose slice holds every
/// difference, if any.
fn route(data: &PreferenceDataset, layout: &Layout, axis: Axis, c: &Comparison) -> Option<(FixedValue, Evidence)> {
    let xa = data.universe()[c.a].values();
    let xb = data.universe()[c.b].values();
    let diff = differing_cells(xa, xb);
    let owner = layout.owner(axis, *diff.first()?);
    if diff.iter().any(|&k| layout.owner(axis, k) != owner) {
        return None;
    }
    let cells = layout.slice_cells(axis, owner);
    let (x, y, verdict) = orient(slice(xa, &cells), slice(xb, &cells), c.verdict);
    Some((owner, Evidence { x, y, verdict, source: *c }))
}

/// Every conditional along `axis`, one per fixed value in canonical order.
pub fn conditionals_with(data: &PreferenceDataset, axis: Axis, exec: Execution) -> Result<Vec<ConditionalRelation>> {
    let layout = check_axis(data, axis)?;
    let routed = exec.map(data.comparisons(), |c| route(data, &layout, axis, c));
    let mut by_value: BTreeMap<FixedValue, Vec<Evidence>> =
        layout.fixed_values(axis).into_iter().map(|v| (v, Vec::new())).collect();
    for (v, e) in routed.into_iter().flatten() {
        by_value.entry(v).or_default().push(e);
    }
    let groups: Vec<(FixedValue, Vec<Evidence>)> = by_value.into_iter().collect();
    Ok(exec.map(&groups, |(v, ev)| ConditionalRelation::build(axis, *v, ev.clone())))
}

pub fn conditionals(data: &PreferenceDataset, axis: Axis) -> Result<Vec<ConditionalRelation>> {
    conditionals_with(data, axis, Execution::default())
}

/// The conditional of the master relation on `fixed` along `axis`.
pub fn conditional_on(data: &PreferenceDataset, axis: Axis, fixed: FixedValue) -> Result<ConditionalRelation> {
    let layout = check_axis(data, axis)?;
    layout.check_fixed(axis, fixed)?;
    let evidence = data
        .comparisons()
        .iter()
        .filter_map(|c| route(data, &layout, axis, c))
        .filter(|(v, _)| *v == fixed)
        .map(|(_, e)| e)
        .collect();
    Ok(ConditionalRelation::build(axis, fixed, evidence))
}

/// A comparison differing in one cell whose verdict contradicts `≥`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalOrderViolation {
    pub comparison: Comparison,
    /// `(s, t)` or `(s, t, i)`.
    pub cell: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalOrderReport {
    pub evidence: usize,
    pub violations: Vec<NaturalOrderViolation>,
    /// No single-cell comparison was available.
    pub untested: bool,
}

impl NaturalOrderReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every comparison differing in exactly one cell agrees with
/// the natural order of the reals on that cell.
pub fn st_conditional_is_natural_order(data: &PreferenceDataset) -> NaturalOrderReport {
    let Some(layout) = data.layout() else {
        return NaturalOrderReport { evidence: 0, violations: vec![], untested: true };
    };
    let mut evidence = 0;
    let mut violations = Vec::new();
    let mut comparisons = data.comparisons().to_vec();
    comparisons.sort();
    for c in comparisons {
        let xa = data.universe()[c.a].values();
        let xb = data.universe()[c.b].values();
        let diff = differing_cells(xa, xb);
        if diff.len() != 1 {
            continue;
        }
        evidence += 1;
        let k = diff[0];
        let expected = Verdict::from_values(xa[k], xb[k]);
        if c.verdict != expected {
            let (s, t, i) = layout.coords(k);
            let cell = if layout.periods { vec![s, t, i] } else { vec![s, t] };
            violations.push(NaturalOrderViolation { comparison: c, cell });
        }
    }
    NaturalOrderReport { evidence, untested: evidence == 0, violations }
}
