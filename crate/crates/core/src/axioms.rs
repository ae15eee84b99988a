//! Checks for every preference condition the two representation theorems
//! rely on. Each failing check carries witnesses that can be replayed
//! against the dataset with [`Witness::replays`].
//!
//! Continuity of the master relation is assumed and never checked: no finite
//! set of comparisons can refute it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alternative::value_key;
use crate::conditionals::{self, st_conditional_is_natural_order, ConditionalRelation, Lookup};
use crate::dataset::{Comparison, PreferenceDataset, Verdict};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::space::{Axis, FixedValue, Layout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportVerdict {
    Pass,
    Fail,
    Vacuous,
}

impl fmt::Display for ReportVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportVerdict::Pass => "pass",
            ReportVerdict::Fail => "fail",
            ReportVerdict::Vacuous => "vacuous",
        })
    }
}

/// Evidence that a dataset violates a condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// One unordered pair recorded with different verdicts.
    Conflict { a: usize, b: usize, verdicts: Vec<Verdict> },
    /// Two alternatives with identical values compared strictly.
    Irreflexive { comparison: Comparison },
    /// `members[0] ≽ members[1] ≽ … ≽ members[0]` with at least one strict step.
    Cycle { members: Vec<usize> },
    /// Two contexts inducing different verdicts for one slice pair.
    Separability {
        axis: Axis,
        fixed: FixedValue,
        x: Vec<f64>,
        y: Vec<f64>,
        first: (Verdict, Comparison),
        second: (Verdict, Comparison),
    },
    /// `a` dominates `b` slice by slice (strictly somewhere if `strict`),
    /// but the recorded verdict on `(a, b)` says otherwise.
    Dominance { axis: Axis, a: usize, b: usize, strict: bool, recorded: Verdict },
    /// The same slice pair ranked differently under two fixed values.
    Invariance {
        axis: Axis,
        fixed_a: FixedValue,
        fixed_b: FixedValue,
        x: Vec<f64>,
        y: Vec<f64>,
        verdict_a: Verdict,
        verdict_b: Verdict,
        source_a: Comparison,
        source_b: Comparison,
    },
    /// A single-cell comparison that contradicts `≥` on that cell.
    NaturalOrder { comparison: Comparison, cell: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub verdict: ReportVerdict,
    pub witnesses: Vec<Witness>,
    /// Number of evidence items examined.
    pub coverage: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// A passing check with less evidence than this is reported vacuous.
    pub min_evidence: usize,
    /// Witnesses kept per report; the total count goes into `detail`.
    pub max_witnesses: usize,
    pub exec: Execution,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { min_evidence: 1, max_witnesses: 64, exec: Execution::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Joint,
    Product,
}

impl AxiomReport {
    fn conclude(
        axiom: String,
        mut witnesses: Vec<Witness>,
        coverage: usize,
        detail: Option<String>,
        opts: &CheckOptions,
    ) -> Self {
        let total = witnesses.len();
        let verdict = if total > 0 {
            ReportVerdict::Fail
        } else if coverage < opts.min_evidence.max(1) {
            ReportVerdict::Vacuous
        } else {
            ReportVerdict::Pass
        };
        let mut detail = detail;
        if total > opts.max_witnesses {
            witnesses.truncate(opts.max_witnesses.max(1));
            let note = format!("{total} violations, {} shown", witnesses.len());
            detail = Some(match detail {
                Some(d) => format!("{d}; {note}"),
                None => note,
            });
        }
        AxiomReport { axiom, verdict, witnesses, coverage, detail }
    }

    fn untestable(axiom: String, why: String) -> Self {
        AxiomReport { axiom, verdict: ReportVerdict::Vacuous, witnesses: vec![], coverage: 0, detail: Some(why) }
    }
}

/// Fail if anything fails, pass if everything passes, vacuous otherwise.
pub fn summarize(reports: &[AxiomReport]) -> ReportVerdict {
    if reports.iter().any(|r| r.verdict == ReportVerdict::Fail) {
        ReportVerdict::Fail
    } else if reports.iter().all(|r| r.verdict == ReportVerdict::Pass) {
        ReportVerdict::Pass
    } else {
        ReportVerdict::Vacuous
    }
}

// ---------------------------------------------------------------------------
// weak order
// ---------------------------------------------------------------------------

/// `≽`-graph over universe indices from pairs with a single recorded verdict.
struct WeakGraph {
    weak: Vec<Vec<usize>>,
    strict: Vec<(usize, usize)>,
}

impl WeakGraph {
    fn new(n: usize, pairs: &BTreeMap<(usize, usize), Vec<Verdict>>) -> Self {
        let mut weak = vec![Vec::new(); n];
        let mut strict = Vec::new();
        for (&(a, b), verdicts) in pairs {
            if a == b || verdicts.len() != 1 {
                continue;
            }
            match verdicts[0] {
                Verdict::ABetter => {
                    weak[a].push(b);
                    strict.push((a, b));
                }
                Verdict::BBetter => {
                    weak[b].push(a);
                    strict.push((b, a));
                }
                Verdict::Indifferent => {
                    weak[a].push(b);
                    weak[b].push(a);
                }
            }
        }
        for adj in &mut weak {
            adj.sort_unstable();
        }
        strict.sort_unstable();
        WeakGraph { weak, strict }
    }

    /// Strongly connected component id per node (iterative Tarjan).
    fn components(&self) -> Vec<usize> {
        let n = self.weak.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut next_comp = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut edge)) = call.last_mut() {
                if let Some(&w) = self.weak[v].get(*edge) {
                    *edge += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        while let Some(w) = stack.pop() {
                            on_stack[w] = false;
                            comp[w] = next_comp;
                            if w == v {
                                break;
                            }
                        }
                        next_comp += 1;
                    }
                }
            }
        }
        comp
    }

    /// Shortest `≽`-path from `from` to `to` (inclusive), by BFS.
    fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.weak.len()];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.weak[v] {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Transitivity and consistency of the master relation on the recorded
/// pairs. Completeness is reported as the fraction of pairs compared.
pub fn check_weak_order(data: &PreferenceDataset, opts: &CheckOptions) -> AxiomReport {
    let n = data.universe().len();
    let pairs = data.pair_verdicts();
    let mut witnesses: Vec<Witness> = data
        .conflicts()
        .into_iter()
        .map(|c| Witness::Conflict { a: c.a, b: c.b, verdicts: c.verdicts })
        .collect();

    let mut sorted = data.comparisons().to_vec();
    sorted.sort();
    for c in sorted.iter().filter(|c| c.verdict.is_strict()) {
        if c.a == c.b || value_key(data.universe()[c.a].values()) == value_key(data.universe()[c.b].values()) {
            witnesses.push(Witness::Irreflexive { comparison: *c });
        }
    }

    let graph = WeakGraph::new(n, &pairs);
    let comp = graph.components();
    for &(a, b) in &graph.strict {
        if comp[a] == comp[b] {
            if let Some(back) = graph.path(b, a) {
                let mut members = vec![a];
                members.extend(&back[..back.len() - 1]);
                witnesses.push(Witness::Cycle { members });
            }
        }
    }

    let compared = pairs.keys().filter(|(a, b)| a != b).count();
    let total = n * n.saturating_sub(1) / 2;
    let detail = Some(format!("{compared}/{total} pairs compared"));
    AxiomReport::conclude("weak_order".into(), witnesses, compared, detail, opts)
}

// ---------------------------------------------------------------------------
// conditional-based checks
// ---------------------------------------------------------------------------

fn name(check: &str, axis: Axis) -> String {
    format!("{check}({axis})")
}

/// The conditionals along `axis` are context independent.
pub fn check_weak_separability(data: &PreferenceDataset, axis: Axis, opts: &CheckOptions) -> Result<AxiomReport> {
    let rels = conditionals::conditionals_with(data, axis, opts.exec)?;
    Ok(separability_report(&rels, axis, opts))
}

fn separability_report(rels: &[ConditionalRelation], axis: Axis, opts: &CheckOptions) -> AxiomReport {
    let coverage = rels.iter().map(|r| r.evidence.len()).sum();
    let witnesses = rels
        .iter()
        .flat_map(|r| {
            r.contradictions.iter().map(move |c| Witness::Separability {
                axis,
                fixed: r.fixed,
                x: c.x.clone(),
                y: c.y.clone(),
                first: c.first,
                second: c.second,
            })
        })
        .collect();
    AxiomReport::conclude(name("weak_separability", axis), witnesses, coverage, None, opts)
}

fn ill_defined(rels: &[ConditionalRelation]) -> Option<FixedValue> {
    rels.iter().find(|r| !r.well_defined).map(|r| r.fixed)
}

/// Slice verdict of `x` against `y`: recorded evidence first, then the
/// componentwise order implied by the natural order on cells.
fn slice_verdict(rel: &ConditionalRelation, x: &[f64], y: &[f64]) -> Option<Verdict> {
    match rel.lookup(x, y) {
        Lookup::Known(v) => Some(v),
        Lookup::Conflicting => None,
        Lookup::Unknown => {
            let ge = x.iter().zip(y).all(|(a, b)| a >= b);
            let le = x.iter().zip(y).all(|(a, b)| a <= b);
            match (ge, le) {
                (true, true) => Some(Verdict::Indifferent),
                (true, false) => Some(Verdict::ABetter),
                (false, true) => Some(Verdict::BBetter),
                (false, false) => None,
            }
        }
    }
}

/// `Some((strict, a_side))` when one side dominates the other slice-wise.
/// When every slice is indifferent the result is `(false, true)`.
fn dominance_of(cells: &[Vec<usize>], rels: &[ConditionalRelation], xa: &[f64], xb: &[f64]) -> Option<(bool, bool)> {
    let mut verdicts = Vec::with_capacity(rels.len());
    for (rel, cells) in rels.iter().zip(cells) {
        let x: Vec<f64> = cells.iter().map(|&c| xa[c]).collect();
        let y: Vec<f64> = cells.iter().map(|&c| xb[c]).collect();
        verdicts.push(slice_verdict(rel, &x, &y)?);
    }
    let a_dom = verdicts.iter().all(|v| v.a_weakly_better());
    let b_dom = verdicts.iter().all(|v| v.flip().a_weakly_better());
    let strict = verdicts.iter().any(|v| v.is_strict());
    match (a_dom, b_dom) {
        (true, _) => Some((strict, true)),
        (false, true) => Some((strict, false)),
        (false, false) => None,
    }
}

fn slice_table(layout: &Layout, rels: &[ConditionalRelation]) -> Vec<Vec<usize>> {
    rels.iter().map(|r| layout.slice_cells(r.axis, r.fixed)).collect()
}

fn dominance_violation(strict: bool, a_side: bool, recorded: Verdict) -> bool {
    let seen_from_dominant = if a_side { recorded } else { recorded.flip() };
    if strict {
        seen_from_dominant != Verdict::ABetter
    } else {
        seen_from_dominant != Verdict::Indifferent
    }
}

/// The master relation is increasing in the conditionals along `axis`.
pub fn check_dominance(data: &PreferenceDataset, axis: Axis, opts: &CheckOptions) -> Result<AxiomReport> {
    let rels = conditionals::conditionals_with(data, axis, opts.exec)?;
    Ok(dominance_report(data, &rels, axis, opts))
}

fn dominance_report(data: &PreferenceDataset, rels: &[ConditionalRelation], axis: Axis, opts: &CheckOptions) -> AxiomReport {
    let axiom = name("dominance", axis);
    if let Some(v) = ill_defined(rels) {
        return AxiomReport::untestable(axiom, format!("conditional on {axis}={v} is ill defined; dominance untestable"));
    }
    let Some(layout) = data.layout() else {
        return AxiomReport::untestable(axiom, "empty universe".into());
    };
    let cells = slice_table(&layout, rels);
    let mut comparisons = data.comparisons().to_vec();
    comparisons.sort();
    let found = opts.exec.map(&comparisons, |c| {
        let xa = data.universe()[c.a].values();
        let xb = data.universe()[c.b].values();
        let (strict, a_side) = dominance_of(&cells, rels, xa, xb)?;
        let witness = dominance_violation(strict, a_side, c.verdict).then(|| {
            let (a, b, recorded) = if a_side { (c.a, c.b, c.verdict) } else { (c.b, c.a, c.verdict.flip()) };
            Witness::Dominance { axis, a, b, strict, recorded }
        });
        Some(witness)
    });
    let coverage = found.iter().filter(|f| f.is_some()).count();
    let witnesses = found.into_iter().flatten().flatten().collect();
    AxiomReport::conclude(axiom, witnesses, coverage, None, opts)
}

/// All conditionals along `axis` coincide on the slice pairs they share.
/// Running one axis alone gives the one-sided check.
pub fn check_invariance(data: &PreferenceDataset, axis: Axis, opts: &CheckOptions) -> Result<AxiomReport> {
    let rels = conditionals::conditionals_with(data, axis, opts.exec)?;
    Ok(invariance_report(&rels, axis, opts))
}

fn invariance_report(rels: &[ConditionalRelation], axis: Axis, opts: &CheckOptions) -> AxiomReport {
    let axiom = name("invariance", axis);
    if let Some(v) = ill_defined(rels) {
        return AxiomReport::untestable(axiom, format!("conditional on {axis}={v} is ill defined; invariance untestable"));
    }
    type Entry<'a> = (FixedValue, Verdict, Comparison, &'a ConditionalRelation);
    let mut shared: BTreeMap<(Vec<u64>, Vec<u64>), Vec<Entry<'_>>> = BTreeMap::new();
    for rel in rels {
        for (key, (verdict, source)) in rel.settled_pairs() {
            shared.entry(key).or_default().push((rel.fixed, verdict, source, rel));
        }
    }
    let mut coverage = 0;
    let mut witnesses = Vec::new();
    for entries in shared.values() {
        for (k, a) in entries.iter().enumerate() {
            for b in &entries[k + 1..] {
                coverage += 1;
                if a.1 != b.1 {
                    let e = a
                        .3
                        .evidence
                        .iter()
                        .find(|e| e.source == a.2)
                        .expect("settled pair has evidence");
                    witnesses.push(Witness::Invariance {
                        axis,
                        fixed_a: a.0,
                        fixed_b: b.0,
                        x: e.x.clone(),
                        y: e.y.clone(),
                        verdict_a: a.1,
                        verdict_b: b.1,
                        source_a: a.2,
                        source_b: b.2,
                    });
                }
            }
        }
    }
    AxiomReport::conclude(axiom, witnesses, coverage, None, opts)
}

/// The single-cell conditional is the natural order of the reals.
pub fn check_natural_order(data: &PreferenceDataset, opts: &CheckOptions) -> AxiomReport {
    let report = st_conditional_is_natural_order(data);
    let witnesses = report
        .violations
        .into_iter()
        .map(|v| Witness::NaturalOrder { comparison: v.comparison, cell: v.cell })
        .collect();
    let detail = report.untested.then(|| "untested: no single-cell comparisons".to_string());
    AxiomReport::conclude("natural_order".into(), witnesses, report.evidence, detail, opts)
}

// ---------------------------------------------------------------------------
// bundles
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Job {
    WeakOrder,
    Axis(Axis),
    NaturalOrder,
}

fn run_bundle(data: &PreferenceDataset, axes: &[(Axis, bool)], opts: &CheckOptions) -> Result<Vec<AxiomReport>> {
    let mut jobs = vec![Job::WeakOrder];
    jobs.extend(axes.iter().map(|&(a, _)| Job::Axis(a)));
    jobs.push(Job::NaturalOrder);
    let results = opts.exec.map(&jobs, |job| -> Result<Vec<AxiomReport>> {
        Ok(match *job {
            Job::WeakOrder => vec![check_weak_order(data, opts)],
            Job::NaturalOrder => vec![check_natural_order(data, opts)],
            Job::Axis(axis) => {
                let rels = conditionals::conditionals_with(data, axis, opts.exec)?;
                vec![
                    separability_report(&rels, axis, opts),
                    dominance_report(data, &rels, axis, opts),
                    invariance_report(&rels, axis, opts),
                ]
            }
        })
    });
    let mut flat = Vec::new();
    for r in results {
        flat.extend(r?);
    }
    // order: weak order, separability per axis, dominance per axis, invariance per axis, natural order
    let mut ordered = vec![flat[0].clone()];
    for check in 0..3 {
        for (k, &(_, with_invariance)) in axes.iter().enumerate() {
            if check == 2 && !with_invariance {
                continue;
            }
            ordered.push(flat[1 + 3 * k + check].clone());
        }
    }
    ordered.push(flat[flat.len() - 1].clone());
    Ok(ordered)
}

/// Weak order, weak separability and dominance on `S` and `T`, invariance of
/// both families, and the natural order on cells.
pub fn check_theorem1_hypotheses(data: &PreferenceDataset, opts: &CheckOptions) -> Result<Vec<AxiomReport>> {
    if data.has_periods() {
        return Err(Error::Precondition("the two-factor bundle needs a dataset of prospects".into()));
    }
    if data.layout().is_none() {
        return Err(Error::Dataset("the universe is empty".into()));
    }
    run_bundle(data, &[(Axis::S, true), (Axis::T, true)], opts)
}

/// Joint stage: the `I` and `ST` conditionals are orderings, the `ST` family
/// is invariant, cells follow the natural order. Product stage adds
/// ordering and invariance of the `S` conditionals.
pub fn check_theorem2_hypotheses(data: &PreferenceDataset, stage: Stage, opts: &CheckOptions) -> Result<Vec<AxiomReport>> {
    if data.layout().is_none() {
        return Err(Error::Dataset("the universe is empty".into()));
    }
    if !data.has_periods() {
        return Err(Error::AxisAbsent(Axis::I.to_string()));
    }
    let mut axes = vec![(Axis::I, false), (Axis::ST, true)];
    if stage == Stage::Product {
        axes.push((Axis::S, true));
    }
    run_bundle(data, &axes, opts)
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

impl Witness {
    /// Re-derives the violation from the dataset alone.
    pub fn replays(&self, data: &PreferenceDataset) -> bool {
        let has = |c: &Comparison| data.comparisons().contains(c);
        let pairs = data.pair_verdicts();
        let settled = |a: usize, b: usize| -> Option<Verdict> {
            let (lo, hi, flip) = if a <= b { (a, b, false) } else { (b, a, true) };
            match pairs.get(&(lo, hi)).map(Vec::as_slice) {
                Some([v]) => Some(if flip { v.flip() } else { *v }),
                _ => None,
            }
        };
        let n = data.universe().len();
        match self {
            Witness::Conflict { a, b, verdicts } => {
                let recorded: BTreeSet<Verdict> = pairs.get(&(*a, *b)).into_iter().flatten().copied().collect();
                verdicts.len() > 1 && verdicts.iter().all(|v| recorded.contains(v))
            }
            Witness::Irreflexive { comparison: c } => {
                has(c)
                    && c.verdict.is_strict()
                    && value_key(data.universe()[c.a].values()) == value_key(data.universe()[c.b].values())
            }
            Witness::Cycle { members } => {
                if members.len() < 2 || members.iter().any(|&m| m >= n) {
                    return false;
                }
                let mut any_strict = false;
                for k in 0..members.len() {
                    match settled(members[k], members[(k + 1) % members.len()]) {
                        Some(Verdict::ABetter) => any_strict = true,
                        Some(Verdict::Indifferent) => {}
                        _ => return false,
                    }
                }
                any_strict
            }
            Witness::Separability { axis, fixed, x, y, first, second } => {
                first.0 != second.0
                    && [first, second].iter().all(|(v, c)| has(c) && routes_to(data, *axis, *fixed, c, x, y, *v))
            }
            Witness::Dominance { axis, a, b, strict, recorded } => {
                let Some(layout) = data.layout() else { return false };
                let Ok(rels) = conditionals::conditionals(data, *axis) else { return false };
                if ill_defined(&rels).is_some() || *a >= n || *b >= n {
                    return false;
                }
                let recorded_ok = data
                    .comparisons()
                    .iter()
                    .any(|c| (c.a == *a && c.b == *b && c.verdict == *recorded) || (c.a == *b && c.b == *a && c.verdict.flip() == *recorded));
                let xa = data.universe()[*a].values();
                let xb = data.universe()[*b].values();
                recorded_ok
                    && dominance_of(&slice_table(&layout, &rels), &rels, xa, xb) == Some((*strict, true))
                    && dominance_violation(*strict, true, *recorded)
            }
            Witness::Invariance { axis, fixed_a, fixed_b, x, y, verdict_a, verdict_b, source_a, source_b } => {
                fixed_a != fixed_b
                    && verdict_a != verdict_b
                    && has(source_a)
                    && has(source_b)
                    && routes_to(data, *axis, *fixed_a, source_a, x, y, *verdict_a)
                    && routes_to(data, *axis, *fixed_b, source_b, x, y, *verdict_b)
            }
            Witness::NaturalOrder { comparison: c, cell } => {
                let Some(layout) = data.layout() else { return false };
                if !has(c) {
                    return false;
                }
                let xa = data.universe()[c.a].values();
                let xb = data.universe()[c.b].values();
                let diff: Vec<usize> = (0..xa.len()).filter(|&k| xa[k] != xb[k]).collect();
                let [k] = diff[..] else { return false };
                let (s, t, i) = layout.coords(k);
                let expected_cell = if layout.periods { vec![s, t, i] } else { vec![s, t] };
                *cell == expected_cell && c.verdict != Verdict::from_values(xa[k], xb[k])
            }
        }
    }
}

fn routes_to(data: &PreferenceDataset, axis: Axis, fixed: FixedValue, c: &Comparison, x: &[f64], y: &[f64], verdict: Verdict) -> bool {
    let Some(layout) = data.layout() else { return false };
    if !layout.has_axis(axis) || layout.check_fixed(axis, fixed).is_err() {
        return false;
    }
    let xa = data.universe()[c.a].values();
    let xb = data.universe()[c.b].values();
    let cells = layout.slice_cells(axis, fixed);
    let outside_equal = (0..xa.len()).filter(|k| !cells.contains(k)).all(|k| xa[k] == xb[k]);
    let sa: Vec<f64> = cells.iter().map(|&k| xa[k]).collect();
    let sb: Vec<f64> = cells.iter().map(|&k| xb[k]).collect();
    let (kx, ky) = (value_key(x), value_key(y));
    outside_equal
        && ((value_key(&sa) == kx && value_key(&sb) == ky && c.verdict == verdict)
            || (value_key(&sa) == ky && value_key(&sb) == kx && c.verdict.flip() == verdict))
}
