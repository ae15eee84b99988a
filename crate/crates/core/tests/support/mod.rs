//! Shared fixtures and a brute-force axiom scanner for integration tests.
//!
//! The scanner restates each condition from its definition with quadratic
//! scans and a Floyd–Warshall closure. It shares no code with the checkers.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use eufactor::generators::random_utility;
use eufactor::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

pub fn random_prospect(rng: &mut ChaCha8Rng, space: &Arc<StateSpace>, grid: &[f64]) -> Alternative {
    let n = space.n_s() * space.n_t() * space.n_i();
    let values = (0..n).map(|_| grid[rng.random_range(0..grid.len())]).collect();
    Alternative::from_flat(space, values).unwrap()
}

pub fn random_real_prospect(rng: &mut ChaCha8Rng, space: &Arc<StateSpace>) -> Prospect {
    let n = space.n_s() * space.n_t();
    Prospect::from_flat(Arc::clone(space), (0..n).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap()
}

pub fn random_real_utility(rng: &mut ChaCha8Rng) -> UtilityFunction {
    let mut grid: Vec<f64> = (0..rng.random_range(2..6)).map(|_| rng.random_range(-6.0..6.0)).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.len() < 2 {
        grid = vec![-1.0, 1.0];
    }
    random_utility(rng, &grid).unwrap()
}

/// `Σ_s Σ_t p_s q_t u(x_st)` straight from the definition.
pub fn brute_v(x: &Prospect, u: &UtilityFunction, p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (s, ps) in p.iter().enumerate() {
        for (t, qt) in q.iter().enumerate() {
            total += ps * qt * u.eval(x.get(s, t));
        }
    }
    total
}

/// `Σ_st π_st Σ_i u^i(x_sti)` straight from the definition.
pub fn brute_w(x: &Alternative, us: &[UtilityFunction], pi: &JointBelief) -> f64 {
    let (n_s, n_t, n_i) = (pi.n_s(), pi.n_t(), us.len());
    let v = x.values();
    let mut total = 0.0;
    for s in 0..n_s {
        for t in 0..n_t {
            for (i, u) in us.iter().enumerate() {
                total += pi.get(s, t) * u.eval(v[(s * n_t + t) * n_i + i]);
            }
        }
    }
    total
}

/// Universe of `size` random distinct alternatives on `grid`.
pub fn random_universe(rng: &mut ChaCha8Rng, space: &Arc<StateSpace>, grid: &[f64], size: usize) -> Vec<Alternative> {
    let mut out: Vec<Alternative> = Vec::new();
    let mut tries = 0;
    while out.len() < size && tries < size * 100 {
        let x = random_prospect(rng, space, grid);
        if !out.iter().any(|y| y.values() == x.values()) {
            out.push(x);
        }
        tries += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// brute-force scanner
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    Pass,
    Fail,
    Vacuous,
}

impl From<ReportVerdict> for Oracle {
    fn from(v: ReportVerdict) -> Self {
        match v {
            ReportVerdict::Pass => Oracle::Pass,
            ReportVerdict::Fail => Oracle::Fail,
            ReportVerdict::Vacuous => Oracle::Vacuous,
        }
    }
}

fn conclude(failed: bool, evidence: bool) -> Oracle {
    if failed {
        Oracle::Fail
    } else if evidence {
        Oracle::Pass
    } else {
        Oracle::Vacuous
    }
}

/// `+1` when the first is preferred, `0` indifferent, `-1` the second.
fn sign(v: Verdict) -> i8 {
    match v {
        Verdict::ABetter => 1,
        Verdict::Indifferent => 0,
        Verdict::BBetter => -1,
    }
}

struct Geometry {
    n_s: usize,
    n_t: usize,
    n_i: usize,
}

impl Geometry {
    fn of(data: &PreferenceDataset) -> Self {
        let sp = data.space().unwrap();
        Geometry { n_s: sp.n_s(), n_t: sp.n_t(), n_i: sp.n_i() }
    }

    fn len(&self) -> usize {
        self.n_s * self.n_t * self.n_i
    }

    fn cell(&self, k: usize) -> (usize, usize, usize) {
        (k / (self.n_t * self.n_i), (k / self.n_i) % self.n_t, k % self.n_i)
    }

    fn fixed_values(&self, axis: Axis) -> Vec<(usize, usize)> {
        match axis {
            Axis::S => (0..self.n_s).map(|s| (s, 0)).collect(),
            Axis::T => (0..self.n_t).map(|t| (t, 0)).collect(),
            Axis::I => (0..self.n_i).map(|i| (i, 0)).collect(),
            Axis::ST => (0..self.n_s).flat_map(|s| (0..self.n_t).map(move |t| (s, t))).collect(),
        }
    }

    fn in_slice(&self, axis: Axis, v: (usize, usize), k: usize) -> bool {
        let (s, t, i) = self.cell(k);
        match axis {
            Axis::S => s == v.0,
            Axis::T => t == v.0,
            Axis::I => i == v.0,
            Axis::ST => (s, t) == v,
        }
    }

    fn slice(&self, axis: Axis, v: (usize, usize), x: &[f64]) -> Vec<f64> {
        (0..self.len()).filter(|&k| self.in_slice(axis, v, k)).map(|k| x[k]).collect()
    }
}

fn same(x: &[f64], y: &[f64]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(a, b)| a == b)
}

/// Evidence `(slice_a, slice_b, sign)` for the conditional on `v`.
fn evidence(data: &PreferenceDataset, g: &Geometry, axis: Axis, v: (usize, usize)) -> Vec<(Vec<f64>, Vec<f64>, i8)> {
    let mut out = Vec::new();
    for c in data.comparisons() {
        let xa = data.universe()[c.a].values();
        let xb = data.universe()[c.b].values();
        let diff: Vec<usize> = (0..g.len()).filter(|&k| xa[k] != xb[k]).collect();
        if !diff.is_empty() && diff.iter().all(|&k| g.in_slice(axis, v, k)) {
            out.push((g.slice(axis, v, xa), g.slice(axis, v, xb), sign(c.verdict)));
        }
    }
    out
}

/// Sign of `x` against `y` per the evidence list, `None` if unrecorded,
/// `Some(None)` if contradictory.
fn recorded(ev: &[(Vec<f64>, Vec<f64>, i8)], x: &[f64], y: &[f64]) -> Option<Option<i8>> {
    let mut seen: Vec<i8> = Vec::new();
    for (a, b, s) in ev {
        if same(a, x) && same(b, y) {
            seen.push(*s);
        } else if same(a, y) && same(b, x) {
            seen.push(-*s);
        }
    }
    seen.sort_unstable();
    seen.dedup();
    match seen.len() {
        0 => None,
        1 => Some(Some(seen[0])),
        _ => Some(None),
    }
}

fn contradictory(ev: &[(Vec<f64>, Vec<f64>, i8)]) -> bool {
    ev.iter().any(|(a, b, _)| matches!(recorded(ev, a, b), Some(None)))
}

pub fn weak_order(data: &PreferenceDataset) -> Oracle {
    let n = data.universe().len();
    let mut signs: HashMap<(usize, usize), Vec<i8>> = HashMap::new();
    let mut failed = false;
    for c in data.comparisons() {
        let identical = same(data.universe()[c.a].values(), data.universe()[c.b].values());
        if c.verdict != Verdict::Indifferent && (c.a == c.b || identical) {
            failed = true;
        }
        let (key, s) = if c.a <= c.b { ((c.a, c.b), sign(c.verdict)) } else { ((c.b, c.a), -sign(c.verdict)) };
        let e = signs.entry(key).or_default();
        if !e.contains(&s) {
            e.push(s);
        }
    }
    let mut ge = vec![vec![false; n]; n];
    let mut strict = Vec::new();
    let mut compared = false;
    for (&(a, b), s) in &signs {
        if a != b {
            compared = true;
        }
        if s.len() > 1 {
            failed = true;
            continue;
        }
        match s[0] {
            1 => {
                ge[a][b] = true;
                strict.push((a, b));
            }
            -1 => {
                ge[b][a] = true;
                strict.push((b, a));
            }
            _ => {
                ge[a][b] = true;
                ge[b][a] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if ge[i][k] {
                for j in 0..n {
                    if ge[k][j] {
                        ge[i][j] = true;
                    }
                }
            }
        }
    }
    if strict.iter().any(|&(a, b)| a != b && ge[b][a]) {
        failed = true;
    }
    conclude(failed, compared)
}

pub fn separability(data: &PreferenceDataset, axis: Axis) -> Oracle {
    let g = Geometry::of(data);
    let mut failed = false;
    let mut any = false;
    for v in g.fixed_values(axis) {
        let ev = evidence(data, &g, axis, v);
        any |= !ev.is_empty();
        failed |= contradictory(&ev);
    }
    conclude(failed, any)
}

pub fn invariance(data: &PreferenceDataset, axis: Axis) -> Oracle {
    let g = Geometry::of(data);
    let fixed = g.fixed_values(axis);
    let evs: Vec<_> = fixed.iter().map(|&v| evidence(data, &g, axis, v)).collect();
    if evs.iter().any(|ev| contradictory(ev)) {
        return Oracle::Vacuous;
    }
    let mut failed = false;
    let mut shared = false;
    for (k1, e1) in evs.iter().enumerate() {
        for e2 in &evs[k1 + 1..] {
            for (a, b, s) in e1 {
                if let Some(Some(s2)) = recorded(e2, a, b) {
                    shared = true;
                    failed |= s2 != *s;
                }
            }
        }
    }
    conclude(failed, shared)
}

pub fn dominance(data: &PreferenceDataset, axis: Axis) -> Oracle {
    let g = Geometry::of(data);
    let fixed = g.fixed_values(axis);
    let evs: Vec<_> = fixed.iter().map(|&v| evidence(data, &g, axis, v)).collect();
    if evs.iter().any(|ev| contradictory(ev)) {
        return Oracle::Vacuous;
    }
    let mut failed = false;
    let mut decided = false;
    'comparisons: for c in data.comparisons() {
        let xa = data.universe()[c.a].values();
        let xb = data.universe()[c.b].values();
        let mut signs = Vec::new();
        for (&v, ev) in fixed.iter().zip(&evs) {
            let (sa, sb) = (g.slice(axis, v, xa), g.slice(axis, v, xb));
            let s = if same(&sa, &sb) {
                0
            } else if let Some(Some(s)) = recorded(ev, &sa, &sb) {
                s
            } else {
                let ge = sa.iter().zip(&sb).all(|(a, b)| a >= b);
                let le = sa.iter().zip(&sb).all(|(a, b)| a <= b);
                match (ge, le) {
                    (true, true) => 0,
                    (true, false) => 1,
                    (false, true) => -1,
                    (false, false) => continue 'comparisons,
                }
            };
            signs.push(s);
        }
        let side = if signs.iter().all(|&s| s >= 0) {
            1
        } else if signs.iter().all(|&s| s <= 0) {
            -1
        } else {
            continue;
        };
        decided = true;
        let strict = signs.iter().any(|&s| s != 0);
        let observed = side * sign(c.verdict);
        if (strict && observed != 1) || (!strict && observed != 0) {
            failed = true;
        }
    }
    conclude(failed, decided)
}

pub fn natural_order(data: &PreferenceDataset) -> Oracle {
    let mut failed = false;
    let mut any = false;
    for c in data.comparisons() {
        let xa = data.universe()[c.a].values();
        let xb = data.universe()[c.b].values();
        let diff: Vec<usize> = (0..xa.len()).filter(|&k| xa[k] != xb[k]).collect();
        if diff.len() == 1 {
            any = true;
            let k = diff[0];
            let expected = if xa[k] > xb[k] { 1 } else { -1 };
            failed |= sign(c.verdict) != expected;
        }
    }
    conclude(failed, any)
}

/// Scanner verdict for a report name such as `dominance(ST)`.
pub fn by_name(data: &PreferenceDataset, name: &str) -> Oracle {
    let axis = |s: &str| match s {
        "S" => Axis::S,
        "T" => Axis::T,
        "I" => Axis::I,
        "ST" => Axis::ST,
        other => panic!("unknown axis {other}"),
    };
    if name == "weak_order" {
        return weak_order(data);
    }
    if name == "natural_order" {
        return natural_order(data);
    }
    let (check, rest) = name.split_once('(').expect("axis-qualified name");
    let a = axis(rest.trim_end_matches(')'));
    match check {
        "weak_separability" => separability(data, a),
        "dominance" => dominance(data, a),
        "invariance" => invariance(data, a),
        other => panic!("unknown check {other}"),
    }
}

/// Flips `k` random verdicts and appends `dups` contradicting duplicates.
pub fn perturb(rng: &mut ChaCha8Rng, data: &PreferenceDataset, k: usize, dups: usize) -> PreferenceDataset {
    let mut cs = data.comparisons().to_vec();
    if cs.is_empty() {
        return data.clone();
    }
    for _ in 0..k {
        let j = rng.random_range(0..cs.len());
        cs[j].verdict = match rng.random_range(0..3) {
            0 => Verdict::ABetter,
            1 => Verdict::Indifferent,
            _ => Verdict::BBetter,
        };
    }
    for _ in 0..dups {
        let c = cs[rng.random_range(0..cs.len())];
        cs.push(Comparison::new(c.b, c.a, c.verdict));
    }
    data.with_comparisons(cs).unwrap()
}

/// Keeps each comparison with probability `keep`.
pub fn thin(rng: &mut ChaCha8Rng, data: &PreferenceDataset, keep: f64) -> PreferenceDataset {
    let cs = data.comparisons().iter().copied().filter(|_| rng.random::<f64>() < keep).collect();
    data.with_comparisons(cs).unwrap()
}
