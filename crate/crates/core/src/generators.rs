//! Synthetic agents and datasets with known verdict patterns.

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alternative::{value_key, Alternative, Prospect};
use crate::belief::{JointBelief, ProductBelief};
use crate::dataset::{PreferenceDataset, Verdict};
use crate::error::{Error, Result};
use crate::representation::{induced_preference, induced_preference_on_pairs, max_minor, EURepresentation, RepresentationKind};
use crate::space::{Axis, StateSpace};
use crate::utility::UtilityFunction;

/// Minimum 2×2 minor forced on correlated beliefs unless configured.
pub const DEFAULT_MIN_MINOR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefStructure {
    /// `π = p ⊗ q`.
    Product,
    /// Rows `s1`, `s2` tilt in opposite directions on `t1`, `t2`, and some
    /// 2×2 minor is at least `min_minor`.
    Correlated { min_minor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonPlan {
    Exhaustive,
    Sampled(usize),
}

#[derive(Debug, Clone)]
pub struct AgentConfig {
    pub model: RepresentationKind,
    pub seed: u64,
    pub space: StateSpace,
    pub grid: Vec<f64>,
    pub universe_size: usize,
    /// Defaults to `Product` for product models and a correlated belief with
    /// [`DEFAULT_MIN_MINOR`] for joint models.
    pub structure: Option<BeliefStructure>,
    pub comparisons: ComparisonPlan,
}

impl AgentConfig {
    pub fn new(model: RepresentationKind, seed: u64, space: StateSpace, grid: Vec<f64>, universe_size: usize) -> Self {
        AgentConfig { model, seed, space, grid, universe_size, structure: None, comparisons: ComparisonPlan::Exhaustive }
    }

    pub fn structure(&self) -> BeliefStructure {
        self.structure.unwrap_or(match self.model {
            RepresentationKind::Product2D | RepresentationKind::Product3D => BeliefStructure::Product,
            _ => BeliefStructure::Correlated { min_minor: DEFAULT_MIN_MINOR },
        })
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random point well inside the simplex (every coordinate ≥ 0.2/n).
pub fn interior_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    let floor = 0.2 / n as f64;
    let mut out: Vec<f64> = raw.iter().map(|w| 0.8 * w / total + floor).collect();
    // push the rounding residue into the largest coordinate
    let residue = 1.0 - out.iter().sum::<f64>();
    let big = (0..n).max_by(|&a, &b| out[a].total_cmp(&out[b])).unwrap_or(0);
    out[big] += residue;
    out
}

fn sorted_grid(grid: &[f64]) -> Result<Vec<f64>> {
    let mut g: Vec<f64> = grid.to_vec();
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("consequence grid must be finite".into()));
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    if g.len() < 2 {
        return Err(Error::Precondition("consequence grid needs at least 2 distinct values".into()));
    }
    Ok(g)
}

/// Knots at the grid points with random strictly positive increments.
pub fn random_utility<R: Rng>(rng: &mut R, grid: &[f64]) -> Result<UtilityFunction> {
    let g = sorted_grid(grid)?;
    let mut level = 0.0;
    let knots = g
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            if k > 0 {
                level += 0.2 + rng.random::<f64>();
            }
            (x, level)
        })
        .collect();
    UtilityFunction::new(knots)
}

fn normalized(m: &[f64]) -> Vec<f64> {
    let total: f64 = m.iter().sum();
    m.iter().map(|v| v / total).collect()
}

/// A joint belief with the row tilt `π_11 > π_12`, `π_21 < π_22` and a
/// 2×2 minor of at least `min_minor`.
pub fn correlated_belief<R: Rng>(rng: &mut R, n_s: usize, n_t: usize, min_minor: f64) -> Result<JointBelief> {
    let base: Vec<f64> = (0..n_s * n_t).map(|_| 0.5 + rng.random::<f64>()).collect();
    let mut boost = 2.0;
    while boost < 1e8 {
        let mut m = base.clone();
        m[0] *= boost;
        m[n_t + 1] *= boost;
        let pi = normalized(&m);
        let tilt = pi[0] > pi[1] && pi[n_t] < pi[n_t + 1];
        let belief = JointBelief::from_flat(n_s, n_t, pi)?;
        if tilt && max_minor(&belief).0 >= min_minor {
            return Ok(belief);
        }
        boost *= 1.5;
    }
    Err(Error::Precondition(format!("cannot reach a minor of {min_minor} on a {n_s}x{n_t} belief")))
}

/// A random representation of the given kind on `space`.
pub fn random_representation<R: Rng>(
    rng: &mut R,
    model: RepresentationKind,
    space: &StateSpace,
    grid: &[f64],
    structure: BeliefStructure,
) -> Result<EURepresentation> {
    if model.has_periods() != space.has_periods() {
        return Err(Error::Precondition(format!("{model:?} does not match the space's dimensionality")));
    }
    let (n_s, n_t) = (space.n_s(), space.n_t());
    let product = |rng: &mut R| ProductBelief::new(interior_simplex(rng, n_s), interior_simplex(rng, n_t));
    let joint = |rng: &mut R| -> Result<JointBelief> {
        match structure {
            BeliefStructure::Product => Ok(product(rng)?.to_joint()),
            BeliefStructure::Correlated { min_minor } => correlated_belief(rng, n_s, n_t, min_minor),
        }
    };
    let utilities = |rng: &mut R| -> Result<Vec<UtilityFunction>> {
        (0..space.n_i()).map(|_| random_utility(rng, grid)).collect()
    };
    match model {
        RepresentationKind::Product2D => {
            let belief = product(rng)?;
            Ok(EURepresentation::Product2D { utility: random_utility(rng, grid)?, belief })
        }
        RepresentationKind::Joint2D => {
            let belief = joint(rng)?;
            Ok(EURepresentation::Joint2D { utility: random_utility(rng, grid)?, belief })
        }
        RepresentationKind::Product3D => {
            let belief = product(rng)?;
            EURepresentation::product3d(utilities(rng)?, belief)
        }
        RepresentationKind::Joint3D => {
            let belief = joint(rng)?;
            EURepresentation::joint3d(utilities(rng)?, belief)
        }
    }
}

struct UniverseBuilder {
    space: Arc<StateSpace>,
    items: Vec<Alternative>,
    seen: HashSet<Vec<u64>>,
    size: usize,
}

impl UniverseBuilder {
    fn push(&mut self, values: Vec<f64>) -> Result<()> {
        if self.items.len() < self.size && self.seen.insert(value_key(&values)) {
            self.items.push(Alternative::from_flat(&self.space, values)?);
        }
        Ok(())
    }

    fn full(&self) -> bool {
        self.items.len() >= self.size
    }

    /// `context` with the `axis`-slice replaced by `a`, then by `b`, for
    /// every fixed value of the axis.
    fn family(&mut self, axis: Axis, context: &[f64], a: &[f64], b: &[f64]) -> Result<()> {
        let layout = self.space.layout();
        for v in layout.fixed_values(axis) {
            for sub in [a, b] {
                let mut values = context.to_vec();
                for (&cell, &x) in layout.slice_cells(axis, v).iter().zip(sub) {
                    values[cell] = x;
                }
                self.push(values)?;
            }
        }
        Ok(())
    }
}

/// A universe built from swap families: for an axis, one context with a
/// pair of sub-alternatives transplanted into every slice of that axis.
///
/// It opens with the deterministic tilt families (best consequence on the
/// first vs second column of each row, and likewise for columns), then
/// cycles through random families on every axis and single-cell variations.
/// Duplicates are dropped; the result has at most `size` members.
pub fn swap_universe<R: Rng>(rng: &mut R, space: &Arc<StateSpace>, grid: &[f64], size: usize) -> Result<Vec<Alternative>> {
    let g = sorted_grid(grid)?;
    let layout = space.layout();
    let (lo, hi, mid) = (g[0], g[g.len() - 1], g[g.len() / 2]);
    let mut builder = UniverseBuilder { space: Arc::clone(space), items: Vec::new(), seen: HashSet::new(), size };

    let context = vec![mid; layout.len()];
    for (axis, along) in [(Axis::S, 1usize), (Axis::T, 0usize)] {
        let cells = layout.slice_cells(axis, crate::space::FixedValue::Single(0));
        let tilt = |first: f64, second: f64| -> Vec<f64> {
            cells
                .iter()
                .map(|&c| {
                    let (s, t, _) = layout.coords(c);
                    let pos = if along == 1 { t } else { s };
                    match pos {
                        0 => first,
                        1 => second,
                        _ => mid,
                    }
                })
                .collect()
        };
        builder.family(axis, &context, &tilt(hi, lo), &tilt(lo, hi))?;
    }

    let axes = space.axes();
    let mut round = 0usize;
    let mut stale = 0usize;
    while !builder.full() && stale < 1000 {
        let before = builder.items.len();
        let pick = |rng: &mut R| g[rng.random_range(0..g.len())];
        let context: Vec<f64> = (0..layout.len()).map(|_| pick(rng)).collect();
        if round % (axes.len() + 1) == axes.len() {
            let cell = rng.random_range(0..layout.len());
            let mut tweaked = context.clone();
            while tweaked[cell] == context[cell] {
                tweaked[cell] = pick(rng);
            }
            builder.push(context)?;
            builder.push(tweaked)?;
        } else {
            let axis = axes[round % (axes.len() + 1)];
            let width = layout.slice_cells(axis, layout.fixed_values(axis)[0]).len();
            let a: Vec<f64> = (0..width).map(|_| pick(rng)).collect();
            let mut b: Vec<f64> = (0..width).map(|_| pick(rng)).collect();
            while b == a {
                b = (0..width).map(|_| pick(rng)).collect();
            }
            builder.family(axis, &context, &a, &b)?;
        }
        round += 1;
        stale = if builder.items.len() == before { stale + 1 } else { 0 };
    }
    Ok(builder.items)
}

/// A seeded agent and the comparisons its representation induces on a swap
/// universe.
pub fn gen_agent(cfg: &AgentConfig) -> Result<(EURepresentation, PreferenceDataset)> {
    if cfg.universe_size < 2 {
        return Err(Error::Precondition("universe_size must be at least 2".into()));
    }
    let mut rng = rng_for(cfg.seed);
    let rep = random_representation(&mut rng, cfg.model, &cfg.space, &cfg.grid, cfg.structure())?;
    let space = Arc::new(cfg.space.clone());
    let universe = swap_universe(&mut rng, &space, &cfg.grid, cfg.universe_size)?;
    let data = match cfg.comparisons {
        ComparisonPlan::Exhaustive => induced_preference(&rep, &universe)?,
        ComparisonPlan::Sampled(k) => {
            let n = universe.len();
            let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            pairs.shuffle(&mut rng);
            pairs.truncate(k);
            pairs.sort_unstable();
            induced_preference_on_pairs(&rep, &universe, &pairs)?
        }
    };
    Ok((rep, data))
}

/// All 2×2 prospects with entries in `{ξ, ξ′}`: `X`, then `Y`, then the
/// rest by bitmask.
pub fn counterexample_universe(xi: f64, xi_prime: f64) -> Result<Vec<Alternative>> {
    let space = Arc::new(StateSpace::new(["s1", "s2"], ["t1", "t2"])?);
    let from_mask = |mask: u32| -> Vec<f64> {
        (0..4).map(|bit| if mask & (1 << (3 - bit)) != 0 { xi } else { xi_prime }).collect()
    };
    // X = (ξ ξ′ / ξ′ ξ) is 0b1001, Y = (ξ′ ξ / ξ ξ′) is 0b0110
    let order = [0b1001u32, 0b0110].into_iter().chain((0..16).filter(|m| *m != 0b1001 && *m != 0b0110));
    order
        .map(|m| Prospect::from_flat(Arc::clone(&space), from_mask(m)).map(Alternative::from))
        .collect()
}

/// The correlated-belief counterexample: `X` and `Y` together with every
/// other `{ξ, ξ′}` prospect, ranked by expected value under `b`. Row `s1`
/// prefers `(ξ, ξ′)` to `(ξ′, ξ)` while row `s2` prefers the reverse, so
/// the `S`-conditionals cannot be invariant.
pub fn gen_correlated_counterexample(xi: f64, xi_prime: f64, b: &JointBelief) -> Result<PreferenceDataset> {
    if !(xi.is_finite() && xi_prime.is_finite() && xi > xi_prime) {
        return Err(Error::Precondition(format!("need finite ξ > ξ′, got ξ={xi}, ξ′={xi_prime}")));
    }
    if b.n_s() != 2 || b.n_t() != 2 {
        return Err(Error::Precondition("the construction uses a 2x2 belief".into()));
    }
    if !(b.get(0, 0) > b.get(0, 1) && b.get(1, 0) < b.get(1, 1)) {
        return Err(Error::Precondition(
            "belief must satisfy π11 > π12 and π21 < π22 (correlated rows)".into(),
        ));
    }
    let rep = EURepresentation::Joint2D { utility: UtilityFunction::identity(), belief: b.clone() };
    induced_preference(&rep, &counterexample_universe(xi, xi_prime)?)
}

/// Two-by-two producer example: climate `s`, demand `t`, and policies as
/// numeric fills of the symbolic `x_ij`.
#[derive(Debug, Clone)]
pub struct CornExample {
    pub space: Arc<StateSpace>,
    pub prospects: Vec<Prospect>,
    pub belief: ProductBelief,
    pub utility: UtilityFunction,
}

impl CornExample {
    pub fn representation(&self) -> EURepresentation {
        EURepresentation::Product2D { utility: self.utility.clone(), belief: self.belief.clone() }
    }
}

pub fn corn_example(fills: &[[[f64; 2]; 2]], p: [f64; 2], q: [f64; 2]) -> Result<CornExample> {
    let space = Arc::new(StateSpace::new(["s1", "s2"], ["t1", "t2"])?);
    let prospects = fills
        .iter()
        .map(|f| Prospect::from_rows(Arc::clone(&space), f.iter().map(|r| r.to_vec()).collect()))
        .collect::<Result<_>>()?;
    Ok(CornExample {
        space,
        prospects,
        belief: ProductBelief::new(p.to_vec(), q.to_vec())?,
        utility: UtilityFunction::identity(),
    })
}

/// Default fill `[[1,2],[3,4]]`, uniform marginals, identity utility.
pub fn gen_corn_example() -> CornExample {
    corn_example(&[[[1.0, 2.0], [3.0, 4.0]]], [0.5, 0.5], [0.5, 0.5]).expect("default corn example is valid")
}

/// Checks a verdict list against another on the same pairs; the fraction
/// that agree.
pub fn agreement(a: &[Verdict], b: &[Verdict]) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / a.len() as f64
}
