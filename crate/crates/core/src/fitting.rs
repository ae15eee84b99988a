//! Recovering a representation from comparison data.
//!
//! The utilities live on one knot set (every distinct consequence in the
//! universe) and are parametrized by their increments `δ^i_k ≥ GAP`, with
//! `Σ_{i,k} δ^i_k = 1`. That pins the affine freedom to the canonical form
//! directly. Beliefs live on simplices with a floor. Every block is linear in
//! its own parameters, so each block step is a projected-gradient solve of a
//! smoothed hinge loss over one simplex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alternative::Alternative;
use crate::axioms::{check_theorem2_hypotheses, summarize, AxiomReport, CheckOptions, ReportVerdict, Stage};
use crate::belief::{JointBelief, ProductBelief};
use crate::dataset::{PreferenceDataset, Verdict};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::representation::{factorize, normalize_representation, EURepresentation, FactorizationResult, RepresentationKind};
use crate::utility::UtilityFunction;

/// Smallest utility increment between neighbouring knots.
pub const GAP: f64 = 1e-6;
/// Smallest probability on any fitted state.
pub const SIMPLEX_FLOOR: f64 = 1e-6;
/// `|Eval(A) − Eval(B)|` above this breaks a recorded indifference.
pub const INDIFFERENCE_TOL: f64 = 1e-9;

const MAX_RESTARTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub model: RepresentationKind,
    pub max_outer_iterations: usize,
    /// Stop once an outer sweep lowers the objective by less than this.
    pub convergence_tol: f64,
    pub margin: f64,
    pub seed: u64,
    /// Seed-derived restarts tried when the first run leaves violations.
    pub restarts: usize,
    /// Projected-gradient steps per block per sweep.
    pub inner_iterations: usize,
    /// Factorization tolerance for fitted beliefs in the numeric independence route.
    pub independence_tol: f64,
    /// Times the margin is divided by 10 and the fit repeated while
    /// violations remain. A margin above the smallest true value gap can
    /// make the hinge minimum sacrifice a near-tie.
    pub margin_backoff: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            model: RepresentationKind::Product2D,
            max_outer_iterations: 200,
            convergence_tol: 1e-9,
            margin: 1e-3,
            seed: 0,
            restarts: MAX_RESTARTS,
            inner_iterations: 500,
            independence_tol: 0.02,
            margin_backoff: 1,
            exec: Execution::default(),
        }
    }
}

impl FitConfig {
    pub fn with_model(model: RepresentationKind) -> Self {
        FitConfig { model, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(Error::Precondition(format!("margin must be a finite value >= 0, got {}", self.margin)));
        }
        if self.max_outer_iterations == 0 {
            return Err(Error::Precondition("max_outer_iterations must be at least 1".into()));
        }
        if !(self.convergence_tol >= 0.0) {
            return Err(Error::Precondition("convergence_tol must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub representation: EURepresentation,
    pub violations: usize,
    pub objective: f64,
    pub trace: Vec<f64>,
    pub converged: bool,
    /// Fewer comparisons than free parameters.
    pub underdetermined: bool,
    pub iterations: usize,
    /// 0 for the initial run, otherwise the restart that won.
    pub restart: usize,
    /// Margin the returned fit was computed with.
    pub margin: f64,
}

/// Comparisons the representation gets wrong: a strict preference whose
/// value difference is not positive, or an indifference further apart than
/// [`INDIFFERENCE_TOL`].
pub fn count_violations(rep: &EURepresentation, data: &PreferenceDataset) -> Result<usize> {
    let values = rep.evaluate_all(data.universe(), Execution::Sequential)?;
    Ok(data
        .comparisons()
        .iter()
        .filter(|c| {
            let d = values[c.a] - values[c.b];
            match c.verdict {
                Verdict::ABetter => !(d > 0.0),
                Verdict::BBetter => !(d < 0.0),
                Verdict::Indifferent => !(d.abs() <= INDIFFERENCE_TOL),
            }
        })
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Penalty {
    Hinge,
    Abs,
}

/// Per-comparison loss on the oriented difference `d`.
fn loss(kind: Penalty, d: f64, margin: f64) -> f64 {
    match kind {
        Penalty::Hinge => (margin - d).max(0.0),
        Penalty::Abs => d.abs(),
    }
}

/// Huber-smoothed loss and its derivative in `d`.
fn smooth(kind: Penalty, d: f64, margin: f64, mu: f64) -> (f64, f64) {
    match kind {
        Penalty::Hinge => {
            let z = margin - d;
            if z <= 0.0 {
                (0.0, 0.0)
            } else if z < mu {
                (z * z / (2.0 * mu), -z / mu)
            } else {
                (z - mu / 2.0, -1.0)
            }
        }
        Penalty::Abs => {
            if d.abs() <= mu {
                (d * d / (2.0 * mu), d / mu)
            } else {
                (d.abs() - mu / 2.0, d.signum())
            }
        }
    }
}

/// Euclidean projection onto `{x : x_k ≥ floor, Σ x = total}`.
fn project(y: &[f64], floor: f64, total: f64) -> Vec<f64> {
    let n = y.len();
    let budget = total - floor * n as f64;
    let mut sorted: Vec<f64> = y.iter().map(|v| v - floor).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - budget) / (k + 1) as f64;
        if v - t > 0.0 {
            tau = t;
        }
    }
    y.iter().map(|v| (v - floor - tau).max(0.0) + floor).collect()
}

/// One linear block: oriented differences `d = G θ` and their penalties.
struct Block<'a> {
    rows: Vec<f64>,
    dim: usize,
    kinds: &'a [Penalty],
    margin: f64,
    mu: f64,
}

impl Block<'_> {
    fn diffs(&self, theta: &[f64]) -> impl Iterator<Item = f64> + '_ {
        let theta = theta.to_vec();
        self.rows.chunks(self.dim).map(move |g| g.iter().zip(&theta).map(|(a, b)| a * b).sum())
    }

    fn smooth_value(&self, theta: &[f64]) -> f64 {
        let m = self.kinds.len() as f64;
        self.diffs(theta).zip(self.kinds).map(|(d, &k)| smooth(k, d, self.margin, self.mu).0).sum::<f64>() / m
    }

    fn smooth_grad(&self, theta: &[f64]) -> Vec<f64> {
        let m = self.kinds.len() as f64;
        let mut grad = vec![0.0; self.dim];
        for ((d, &k), g) in self.diffs(theta).zip(self.kinds).zip(self.rows.chunks(self.dim)) {
            let w = smooth(k, d, self.margin, self.mu).1;
            if w != 0.0 {
                for (acc, gj) in grad.iter_mut().zip(g) {
                    *acc += w * gj / m;
                }
            }
        }
        grad
    }

    /// Projected gradient with Armijo backtracking from `theta`.
    fn solve(&self, theta: &[f64], floor: f64, total: f64, iters: usize) -> Vec<f64> {
        let mut x = theta.to_vec();
        let mut f = self.smooth_value(&x);
        let mut step = 1.0;
        for _ in 0..iters {
            let grad = self.smooth_grad(&x);
            let mut moved = false;
            while step > 1e-14 {
                let trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
                let cand = project(&trial, floor, total);
                let delta: Vec<f64> = cand.iter().zip(&x).map(|(c, a)| c - a).collect();
                let lin: f64 = grad.iter().zip(&delta).map(|(g, d)| g * d).sum();
                let sq: f64 = delta.iter().map(|d| d * d).sum();
                if sq == 0.0 {
                    break;
                }
                let fc = self.smooth_value(&cand);
                if fc <= f + lin + sq / (2.0 * step) {
                    x = cand;
                    f = fc;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
            step *= 2.0;
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
enum BeliefParams {
    Product { p: Vec<f64>, q: Vec<f64> },
    Joint { pi: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
struct State {
    belief: BeliefParams,
    /// `δ[i * k + j]`, period-major.
    deltas: Vec<f64>,
}

/// Fixed facts about the problem: knot indices per cell and oriented pairs.
struct Problem<'a> {
    model: RepresentationKind,
    n_s: usize,
    n_t: usize,
    n_i: usize,
    knots: Vec<f64>,
    /// Knot index of every cell of every alternative.
    idx: Vec<Vec<usize>>,
    pairs: Vec<(usize, usize)>,
    kinds: Vec<Penalty>,
    margin: f64,
    data: &'a PreferenceDataset,
}

impl<'a> Problem<'a> {
    fn new(data: &'a PreferenceDataset, cfg: &FitConfig) -> Result<Self> {
        let space = data.space().ok_or_else(|| Error::Precondition("dataset has an empty universe".into()))?;
        if data.comparisons().is_empty() {
            return Err(Error::Precondition("dataset has no comparisons".into()));
        }
        if cfg.model.has_periods() != space.has_periods() {
            return Err(Error::Precondition(format!("{:?} does not match the dataset's dimensionality", cfg.model)));
        }
        let mut knots: Vec<f64> = data.universe().iter().flat_map(|x| x.values().iter().copied()).collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        if knots.len() < 2 {
            return Err(Error::DegenerateDomain("universe consequences span fewer than 2 distinct values".into()));
        }
        let idx = data
            .universe()
            .iter()
            .map(|x| x.values().iter().map(|v| knots.partition_point(|k| k < v)).collect())
            .collect();
        let (pairs, kinds) = data
            .comparisons()
            .iter()
            .map(|c| match c.verdict {
                Verdict::ABetter => ((c.a, c.b), Penalty::Hinge),
                Verdict::BBetter => ((c.b, c.a), Penalty::Hinge),
                Verdict::Indifferent => ((c.a, c.b), Penalty::Abs),
            })
            .unzip();
        Ok(Problem {
            model: cfg.model,
            n_s: space.n_s(),
            n_t: space.n_t(),
            n_i: space.n_i(),
            knots,
            idx,
            pairs,
            kinds,
            margin: cfg.margin,
            data,
        })
    }

    fn k(&self) -> usize {
        self.knots.len() - 1
    }

    fn free_parameters(&self) -> usize {
        let beliefs = match self.model {
            RepresentationKind::Product2D | RepresentationKind::Product3D => self.n_s + self.n_t - 2,
            _ => self.n_s * self.n_t - 1,
        };
        beliefs + self.n_i * self.k() - 1
    }

    fn weights(&self, belief: &BeliefParams) -> Vec<f64> {
        match belief {
            BeliefParams::Product { p, q } => p.iter().flat_map(|ps| q.iter().map(move |qt| ps * qt)).collect(),
            BeliefParams::Joint { pi } => pi.clone(),
        }
    }

    /// `U[i][k]`: cumulative utility of knot `k` in period `i`.
    fn levels(&self, deltas: &[f64]) -> Vec<Vec<f64>> {
        let k = self.k();
        (0..self.n_i)
            .map(|i| {
                let mut acc = 0.0;
                std::iter::once(0.0)
                    .chain(deltas[i * k..(i + 1) * k].iter().map(|d| {
                        acc += d;
                        acc
                    }))
                    .collect()
            })
            .collect()
    }

    /// Per-state utility sums `Σ_i U[i][x_sti]` of one alternative.
    fn state_utilities(&self, a: usize, levels: &[Vec<f64>]) -> Vec<f64> {
        self.idx[a]
            .chunks(self.n_i)
            .map(|fiber| fiber.iter().enumerate().map(|(i, &k)| levels[i][k]).sum())
            .collect()
    }

    fn values(&self, state: &State) -> Vec<f64> {
        let w = self.weights(&state.belief);
        let levels = self.levels(&state.deltas);
        (0..self.idx.len())
            .map(|a| self.state_utilities(a, &levels).iter().zip(&w).map(|(u, p)| u * p).sum())
            .collect()
    }

    fn objective(&self, state: &State) -> f64 {
        let v = self.values(state);
        let total: f64 = self
            .pairs
            .iter()
            .zip(&self.kinds)
            .map(|(&(a, b), &k)| loss(k, v[a] - v[b], self.margin))
            .sum();
        total / self.pairs.len() as f64
    }

    fn block(&self, features: &[Vec<f64>], dim: usize, mu: f64) -> Block<'_> {
        let rows = self
            .pairs
            .iter()
            .flat_map(|&(a, b)| features[a].iter().zip(&features[b]).map(|(x, y)| x - y).collect::<Vec<_>>())
            .collect();
        Block { rows, dim, kinds: &self.kinds, margin: self.margin, mu }
    }

    fn utility_features(&self, belief: &BeliefParams) -> Vec<Vec<f64>> {
        let w = self.weights(belief);
        let k = self.k();
        (0..self.idx.len())
            .map(|a| {
                let mut f = vec![0.0; self.n_i * k];
                for (cell, &ki) in self.idx[a].iter().enumerate() {
                    let (st, i) = (cell / self.n_i, cell % self.n_i);
                    for j in 0..ki {
                        f[i * k + j] += w[st];
                    }
                }
                f
            })
            .collect()
    }

    fn sweep(&self, state: &mut State, inner: usize, mu: f64) {
        let accept = |state: &mut State, cand: State| {
            if self.objective(&cand) <= self.objective(state) {
                *state = cand;
            }
        };

        let levels = self.levels(&state.deltas);
        let us: Vec<Vec<f64>> = (0..self.idx.len()).map(|a| self.state_utilities(a, &levels)).collect();
        match state.belief.clone() {
            BeliefParams::Product { p, q } => {
                let fp: Vec<Vec<f64>> = us
                    .iter()
                    .map(|u| (0..self.n_s).map(|s| (0..self.n_t).map(|t| q[t] * u[s * self.n_t + t]).sum()).collect())
                    .collect();
                let p2 = self.block(&fp, self.n_s, mu).solve(&p, SIMPLEX_FLOOR, 1.0, inner);
                accept(state, State { belief: BeliefParams::Product { p: p2, q: q.clone() }, deltas: state.deltas.clone() });
                let BeliefParams::Product { p, .. } = state.belief.clone() else { unreachable!() };
                let fq: Vec<Vec<f64>> = us
                    .iter()
                    .map(|u| (0..self.n_t).map(|t| (0..self.n_s).map(|s| p[s] * u[s * self.n_t + t]).sum()).collect())
                    .collect();
                let q2 = self.block(&fq, self.n_t, mu).solve(&q, SIMPLEX_FLOOR, 1.0, inner);
                accept(state, State { belief: BeliefParams::Product { p, q: q2 }, deltas: state.deltas.clone() });
            }
            BeliefParams::Joint { pi } => {
                let pi2 = self.block(&us, self.n_s * self.n_t, mu).solve(&pi, SIMPLEX_FLOOR, 1.0, inner);
                accept(state, State { belief: BeliefParams::Joint { pi: pi2 }, deltas: state.deltas.clone() });
            }
        }

        let fu = self.utility_features(&state.belief);
        let d2 = self.block(&fu, self.n_i * self.k(), mu).solve(&state.deltas, GAP, 1.0, inner);
        accept(state, State { belief: state.belief.clone(), deltas: d2 });

        let polished = self.polish(state, inner, mu);
        accept(state, polished);
    }

    /// Smoothed objective and the per-alternative weights `∂L/∂Eval(a)`.
    fn smooth_objective(&self, state: &State, mu: f64) -> (f64, Vec<f64>) {
        let v = self.values(state);
        let m = self.pairs.len() as f64;
        let mut coef = vec![0.0; v.len()];
        let mut total = 0.0;
        for (&(a, b), &k) in self.pairs.iter().zip(&self.kinds) {
            let (f, g) = smooth(k, v[a] - v[b], self.margin, mu);
            total += f;
            coef[a] += g / m;
            coef[b] -= g / m;
        }
        (total / m, coef)
    }

    /// Gradient of `Σ_a coef[a] · Eval(a)` in every parameter block.
    fn gradient(&self, state: &State, coef: &[f64]) -> State {
        let levels = self.levels(&state.deltas);
        let weigh = |features: Vec<Vec<f64>>, dim: usize| -> Vec<f64> {
            let mut g = vec![0.0; dim];
            for (f, c) in features.iter().zip(coef) {
                for (acc, x) in g.iter_mut().zip(f) {
                    *acc += c * x;
                }
            }
            g
        };
        let us: Vec<Vec<f64>> = (0..self.idx.len()).map(|a| self.state_utilities(a, &levels)).collect();
        let belief = match &state.belief {
            BeliefParams::Product { p, q } => {
                let fp = us
                    .iter()
                    .map(|u| (0..self.n_s).map(|s| (0..self.n_t).map(|t| q[t] * u[s * self.n_t + t]).sum()).collect())
                    .collect();
                let fq = us
                    .iter()
                    .map(|u| (0..self.n_t).map(|t| (0..self.n_s).map(|s| p[s] * u[s * self.n_t + t]).sum()).collect())
                    .collect();
                BeliefParams::Product { p: weigh(fp, self.n_s), q: weigh(fq, self.n_t) }
            }
            BeliefParams::Joint { .. } => BeliefParams::Joint { pi: weigh(us, self.n_s * self.n_t) },
        };
        State { belief, deltas: weigh(self.utility_features(&state.belief), self.n_i * self.k()) }
    }

    /// `state − step · grad`, projected block by block.
    fn step(&self, state: &State, grad: &State, step: f64) -> State {
        let go = |x: &[f64], g: &[f64], floor: f64| -> Vec<f64> {
            let trial: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - step * b).collect();
            project(&trial, floor, 1.0)
        };
        let belief = match (&state.belief, &grad.belief) {
            (BeliefParams::Product { p, q }, BeliefParams::Product { p: gp, q: gq }) => {
                BeliefParams::Product { p: go(p, gp, SIMPLEX_FLOOR), q: go(q, gq, SIMPLEX_FLOOR) }
            }
            (BeliefParams::Joint { pi }, BeliefParams::Joint { pi: g }) => BeliefParams::Joint { pi: go(pi, g, SIMPLEX_FLOOR) },
            _ => unreachable!("gradient has the shape of the state"),
        };
        State { belief, deltas: go(&state.deltas, &grad.deltas, GAP) }
    }

    /// Joint projected-gradient descent over all blocks at once, which moves
    /// along directions the block updates cannot reach one at a time.
    fn polish(&self, start: &State, iters: usize, mu: f64) -> State {
        let flat = |s: &State| -> Vec<f64> {
            let mut v = match &s.belief {
                BeliefParams::Product { p, q } => [p.as_slice(), q.as_slice()].concat(),
                BeliefParams::Joint { pi } => pi.clone(),
            };
            v.extend(&s.deltas);
            v
        };
        let mut x = start.clone();
        let (mut f, mut coef) = self.smooth_objective(&x, mu);
        let mut step = 1.0;
        for _ in 0..iters {
            let grad = self.gradient(&x, &coef);
            let g = flat(&grad);
            let x0 = flat(&x);
            let mut moved = false;
            while step > 1e-14 {
                let cand = self.step(&x, &grad, step);
                let delta: Vec<f64> = flat(&cand).iter().zip(&x0).map(|(c, a)| c - a).collect();
                let sq: f64 = delta.iter().map(|d| d * d).sum();
                if sq == 0.0 {
                    break;
                }
                let lin: f64 = g.iter().zip(&delta).map(|(a, b)| a * b).sum();
                let (fc, cc) = self.smooth_objective(&cand, mu);
                if fc <= f + lin + sq / (2.0 * step) {
                    x = cand;
                    f = fc;
                    coef = cc;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
            step *= 2.0;
        }
        x
    }

    fn initial(&self, restart: usize, seed: u64) -> State {
        let k = self.k();
        let span = self.knots[k] - self.knots[0];
        let mut deltas: Vec<f64> = (0..self.n_i)
            .flat_map(|_| self.knots.windows(2).map(|w| (w[1] - w[0]) / (span * self.n_i as f64)))
            .collect();
        let uniform = |n: usize| vec![1.0 / n as f64; n];
        let (mut p, mut q, mut pi) = (uniform(self.n_s), uniform(self.n_t), uniform(self.n_s * self.n_t));
        if restart > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            // odd restarts sample the whole simplex, even ones stay near the start
            let spread = restart % 2 == 1;
            let mut jitter = |v: &mut Vec<f64>, floor: f64| {
                let noisy: Vec<f64> = v
                    .iter()
                    .map(|x| {
                        let u = rng.random::<f64>();
                        if spread { -(1.0 - u).ln() } else { x * (0.5 + u) }
                    })
                    .collect();
                let total: f64 = noisy.iter().sum();
                *v = project(&noisy.iter().map(|x| x / total).collect::<Vec<_>>(), floor, 1.0);
            };
            jitter(&mut deltas, GAP);
            jitter(&mut p, SIMPLEX_FLOOR);
            jitter(&mut q, SIMPLEX_FLOOR);
            jitter(&mut pi, SIMPLEX_FLOOR);
        }
        deltas = project(&deltas, GAP, 1.0);
        let belief = match self.model {
            RepresentationKind::Product2D | RepresentationKind::Product3D => BeliefParams::Product { p, q },
            _ => BeliefParams::Joint { pi },
        };
        State { belief, deltas }
    }

    fn run(&self, cfg: &FitConfig, restart: usize) -> Result<FitResult> {
        let mut state = self.initial(restart, cfg.seed);
        let mut trace = vec![self.objective(&state)];
        let mut converged = false;
        let mut iterations = 0;
        while iterations < cfg.max_outer_iterations {
            // the smoothing width shrinks towards the true hinge
            let mu = (self.margin * 0.5f64.powi(iterations as i32)).max(self.margin * 1e-3).max(1e-9);
            self.sweep(&mut state, cfg.inner_iterations, mu);
            iterations += 1;
            let obj = self.objective(&state);
            let prev = *trace.last().unwrap();
            trace.push(obj);
            if obj == 0.0 || prev - obj <= cfg.convergence_tol {
                converged = true;
                break;
            }
        }
        let representation = self.representation(&state)?;
        Ok(FitResult {
            violations: count_violations(&representation, self.data)?,
            objective: *trace.last().unwrap(),
            representation,
            trace,
            converged,
            underdetermined: self.pairs.len() < self.free_parameters(),
            iterations,
            restart,
            margin: self.margin,
        })
    }

    fn representation(&self, state: &State) -> Result<EURepresentation> {
        let levels = self.levels(&state.deltas);
        let utilities = levels
            .iter()
            .map(|l| UtilityFunction::new(self.knots.iter().copied().zip(l.iter().copied()).collect()))
            .collect::<Result<Vec<_>>>()?;
        let joint = |pi: &[f64]| JointBelief::from_flat(self.n_s, self.n_t, pi.to_vec());
        let product = |p: &[f64], q: &[f64]| ProductBelief::new(p.to_vec(), q.to_vec());
        let one = |mut us: Vec<UtilityFunction>| us.remove(0);
        let rep = match (&state.belief, self.model) {
            (BeliefParams::Product { p, q }, RepresentationKind::Product2D) => {
                EURepresentation::Product2D { utility: one(utilities), belief: product(p, q)? }
            }
            (BeliefParams::Product { p, q }, _) => EURepresentation::product3d(utilities, product(p, q)?)?,
            (BeliefParams::Joint { pi }, RepresentationKind::Joint2D) => {
                EURepresentation::Joint2D { utility: one(utilities), belief: joint(pi)? }
            }
            (BeliefParams::Joint { pi }, _) => EURepresentation::joint3d(utilities, joint(pi)?)?,
        };
        normalize_representation(&rep)
    }
}

/// Fits a representation of `cfg.model` by alternating block minimization
/// of the hinge loss.
///
/// Restarts run when the first attempt leaves violations; the winner has
/// the fewest violations, then the lowest objective, then the earliest
/// restart. If violations still remain, the whole procedure is repeated with
/// a smaller margin up to `margin_backoff` times, keeping a later result only
/// when it has fewer violations.
pub fn fit(data: &PreferenceDataset, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    let mut best = fit_at(data, cfg, cfg.margin)?;
    let mut margin = cfg.margin;
    for _ in 0..cfg.margin_backoff {
        if best.violations == 0 || margin == 0.0 {
            break;
        }
        margin /= 10.0;
        let next = fit_at(data, cfg, margin)?;
        if next.violations < best.violations {
            best = next;
        }
    }
    Ok(best)
}

fn fit_at(data: &PreferenceDataset, cfg: &FitConfig, margin: f64) -> Result<FitResult> {
    let mut problem = Problem::new(data, cfg)?;
    problem.margin = margin;
    let first = problem.run(cfg, 0)?;
    if first.violations == 0 || cfg.restarts == 0 {
        return Ok(first);
    }
    let others = cfg.exec.map_range(cfg.restarts.min(MAX_RESTARTS), |r| problem.run(cfg, r + 1));
    let mut best = first;
    for result in others {
        let result = result?;
        let rank = |r: &FitResult| (r.violations, r.objective);
        let (rv, ro) = rank(&result);
        let (bv, bo) = rank(&best);
        if rv < bv || (rv == bv && ro.total_cmp(&bo).is_lt()) {
            best = result;
        }
    }
    Ok(best)
}

/// Both answers to "is the joint belief a product?" for period data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceVerdict {
    /// Summary of the product-stage axiom checks.
    pub axiomatic: ReportVerdict,
    pub reports: Vec<AxiomReport>,
    pub fit: FitResult,
    pub factorization: FactorizationResult,
    /// `Some(true)` when both routes give a definite, matching answer.
    pub agree: Option<bool>,
}

/// Route (a): the product-stage hypotheses. Route (b): fit a joint period
/// representation and factorize its belief at `cfg.independence_tol`.
pub fn test_independence_from_preferences(data: &PreferenceDataset, cfg: &FitConfig) -> Result<IndependenceVerdict> {
    let reports = check_theorem2_hypotheses(data, Stage::Product, &CheckOptions { exec: cfg.exec, ..CheckOptions::default() })?;
    let axiomatic = summarize(&reports);
    let joint_cfg = FitConfig { model: RepresentationKind::Joint3D, ..cfg.clone() };
    let fitted = fit(data, &joint_cfg)?;
    let factorization = factorize(&fitted.representation.joint_belief(), cfg.independence_tol)?;
    let agree = match axiomatic {
        ReportVerdict::Vacuous => None,
        _ if fitted.underdetermined => None,
        v => Some((v == ReportVerdict::Pass) == factorization.is_product()),
    };
    Ok(IndependenceVerdict { axiomatic, reports, fit: fitted, factorization, agree })
}

/// Values of the fitted representation on arbitrary alternatives.
pub fn predict(result: &FitResult, xs: &[Alternative]) -> Result<Vec<f64>> {
    result.representation.evaluate_all(xs, Execution::Sequential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alternative::Prospect;
    use crate::dataset::Comparison;
    use crate::space::StateSpace;
    use std::sync::Arc;

    #[test]
    fn projection_lands_on_the_floored_simplex() {
        let x = project(&[0.9, -3.0, 0.4, 0.2], 0.01, 1.0);
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(x.iter().all(|v| *v >= 0.01));
        assert_eq!(project(&[0.25; 4], 0.0, 1.0), vec![0.25; 4]);
    }

    #[test]
    fn single_comparison_is_fit() {
        let space = Arc::new(StateSpace::indexed(2, 2, None).unwrap());
        let hi = Prospect::constant(Arc::clone(&space), 2.0).unwrap();
        let lo = Prospect::constant(Arc::clone(&space), 1.0).unwrap();
        let data = PreferenceDataset::new(vec![hi.into(), lo.into()], vec![Comparison::new(0, 1, Verdict::ABetter)]).unwrap();
        let r = fit(&data, &FitConfig::default()).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.underdetermined);
        let u = &r.representation.utilities()[0];
        assert!(u.eval(2.0) > u.eval(1.0));
    }

    #[test]
    fn a_cycle_cannot_be_fit() {
        let space = Arc::new(StateSpace::indexed(2, 2, None).unwrap());
        let xs: Vec<Alternative> = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]
            .iter()
            .map(|v| Prospect::from_flat(Arc::clone(&space), v.to_vec()).unwrap().into())
            .collect();
        let cs = vec![
            Comparison::new(0, 1, Verdict::ABetter),
            Comparison::new(1, 2, Verdict::ABetter),
            Comparison::new(2, 0, Verdict::ABetter),
        ];
        let data = PreferenceDataset::new(xs, cs).unwrap();
        let r = fit(&data, &FitConfig::default()).unwrap();
        assert!(r.violations >= 1);
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn degenerate_span_is_rejected() {
        let space = Arc::new(StateSpace::indexed(2, 2, None).unwrap());
        let x = Prospect::constant(Arc::clone(&space), 1.0).unwrap();
        let y = Prospect::constant(Arc::clone(&space), 1.0).unwrap();
        let data = PreferenceDataset::new(vec![x.into(), y.into()], vec![Comparison::new(0, 1, Verdict::Indifferent)]).unwrap();
        assert!(matches!(fit(&data, &FitConfig::default()), Err(Error::DegenerateDomain(_))));
        let bad = FitConfig { margin: -1.0, ..FitConfig::default() };
        assert!(fit(&data, &bad).is_err());
    }
}
