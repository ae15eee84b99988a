//! Expected-utility representations: evaluation, induced preferences and
//! canonical normalization.

mod factorize;

pub use factorize::{factorize, factorize_from, max_minor, FactorWitness, FactorizationResult, Outcome, DEFAULT_FACTORIZE_TOL};

use serde::{Deserialize, Serialize};

use crate::alternative::{Alternative, Plan, Prospect};
use crate::belief::{Belief, JointBelief, ProductBelief};
use crate::dataset::{Comparison, PreferenceDataset, Verdict};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::space::{Axis, StateSpace};
use crate::utility::UtilityFunction;

/// Tolerance for algebraic regroupings of the same sum.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationKind {
    Product2D,
    Joint2D,
    Joint3D,
    Product3D,
}

impl RepresentationKind {
    pub fn has_periods(self) -> bool {
        matches!(self, RepresentationKind::Joint3D | RepresentationKind::Product3D)
    }
}

/// `V(X) = Σ p_s q_t u(x_s^t)`, its correlated two-factor variant, or the
/// period-additive `W(𝕏) = Σ π_st Σ_i u^i(x_st^i)` with joint or product `π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRepresentation", into = "RawRepresentation")]
pub enum EURepresentation {
    Product2D { utility: UtilityFunction, belief: ProductBelief },
    Joint2D { utility: UtilityFunction, belief: JointBelief },
    Joint3D { utilities: Vec<UtilityFunction>, belief: JointBelief },
    Product3D { utilities: Vec<UtilityFunction>, belief: ProductBelief },
}

#[derive(Serialize, Deserialize)]
struct RawRepresentation {
    kind: RepresentationKind,
    utilities: Vec<UtilityFunction>,
    belief: Belief,
}

impl TryFrom<RawRepresentation> for EURepresentation {
    type Error = Error;
    fn try_from(raw: RawRepresentation) -> Result<Self> {
        use RepresentationKind as K;
        let single = |mut us: Vec<UtilityFunction>| -> Result<UtilityFunction> {
            if us.len() != 1 {
                return Err(Error::Dimension(format!("expected one utility, got {}", us.len())));
            }
            Ok(us.remove(0))
        };
        let wrong = |what: &str| Error::Dimension(format!("{:?} needs a {what} belief", raw.kind));
        match (raw.kind, raw.belief) {
            (K::Product2D, Belief::Product(belief)) => Ok(Self::Product2D { utility: single(raw.utilities)?, belief }),
            (K::Joint2D, Belief::Joint(belief)) => Ok(Self::Joint2D { utility: single(raw.utilities)?, belief }),
            (K::Joint3D, Belief::Joint(belief)) => Self::joint3d(raw.utilities, belief),
            (K::Product3D, Belief::Product(belief)) => Self::product3d(raw.utilities, belief),
            (K::Product2D | K::Product3D, _) => Err(wrong("product")),
            (K::Joint2D | K::Joint3D, _) => Err(wrong("joint")),
        }
    }
}

impl From<EURepresentation> for RawRepresentation {
    fn from(rep: EURepresentation) -> Self {
        let kind = rep.kind();
        match rep {
            EURepresentation::Product2D { utility, belief } => RawRepresentation { kind, utilities: vec![utility], belief: Belief::Product(belief) },
            EURepresentation::Joint2D { utility, belief } => RawRepresentation { kind, utilities: vec![utility], belief: Belief::Joint(belief) },
            EURepresentation::Joint3D { utilities, belief } => RawRepresentation { kind, utilities, belief: Belief::Joint(belief) },
            EURepresentation::Product3D { utilities, belief } => RawRepresentation { kind, utilities, belief: Belief::Product(belief) },
        }
    }
}

fn check_prospect(x: &Prospect, n_s: usize, n_t: usize) -> Result<()> {
    let space = x.space();
    if space.n_s() != n_s || space.n_t() != n_t {
        return Err(Error::Dimension(format!(
            "prospect is {}x{}, belief is {n_s}x{n_t}",
            space.n_s(),
            space.n_t()
        )));
    }
    Ok(())
}

fn check_plan(plan: &Plan, us: &[UtilityFunction], n_s: usize, n_t: usize) -> Result<()> {
    let space = plan.space();
    if space.n_s() != n_s || space.n_t() != n_t {
        return Err(Error::Dimension(format!(
            "plan is {}x{}, belief is {n_s}x{n_t}",
            space.n_s(),
            space.n_t()
        )));
    }
    if us.len() != space.n_i() {
        return Err(Error::Dimension(format!("{} utilities for {} periods", us.len(), space.n_i())));
    }
    Ok(())
}

/// `Σ_s Σ_t p_s q_t u(x_s^t)`.
pub fn evaluate_v(x: &Prospect, u: &UtilityFunction, b: &ProductBelief) -> Result<f64> {
    check_prospect(x, b.p().len(), b.q().len())?;
    let mut acc = 0.0;
    for (s, &ps) in b.p().iter().enumerate() {
        for (t, &qt) in b.q().iter().enumerate() {
            acc += ps * qt * u.eval(x.get(s, t));
        }
    }
    Ok(acc)
}

/// The same value with one marginal factored out:
/// `Σ_s p_s [Σ_t q_t u(x_s^t)]` for `S`, `Σ_t q_t [Σ_s p_s u(x_s^t)]` for `T`.
pub fn evaluate_v_nested(x: &Prospect, u: &UtilityFunction, b: &ProductBelief, outer: Axis) -> Result<f64> {
    check_prospect(x, b.p().len(), b.q().len())?;
    let (p, q) = (b.p(), b.q());
    match outer {
        Axis::S => Ok(p
            .iter()
            .enumerate()
            .map(|(s, &ps)| ps * q.iter().enumerate().map(|(t, &qt)| qt * u.eval(x.get(s, t))).sum::<f64>())
            .sum()),
        Axis::T => Ok(q
            .iter()
            .enumerate()
            .map(|(t, &qt)| qt * p.iter().enumerate().map(|(s, &ps)| ps * u.eval(x.get(s, t))).sum::<f64>())
            .sum()),
        other => Err(Error::AxisAbsent(format!("{other} (nesting uses S or T)"))),
    }
}

/// `Σ_{s,t} π_st u(x_s^t)`.
pub fn evaluate_v_joint(x: &Prospect, u: &UtilityFunction, b: &JointBelief) -> Result<f64> {
    check_prospect(x, b.n_s(), b.n_t())?;
    Ok(x.values().iter().zip(b.as_slice()).map(|(&v, &w)| w * u.eval(v)).sum())
}

/// `Σ_{s,t} Σ_i π_st u^i(x_st^i)`.
pub fn evaluate_w(plan: &Plan, us: &[UtilityFunction], b: &JointBelief) -> Result<f64> {
    check_plan(plan, us, b.n_s(), b.n_t())?;
    let mut acc = 0.0;
    for s in 0..b.n_s() {
        for t in 0..b.n_t() {
            let w = b.get(s, t);
            for (u, &x) in us.iter().zip(plan.fiber(s, t)) {
                acc += w * u.eval(x);
            }
        }
    }
    Ok(acc)
}

/// `Σ_s Σ_t Σ_i p_s q_t u^i(x_st^i)`.
pub fn evaluate_w_product(plan: &Plan, us: &[UtilityFunction], b: &ProductBelief) -> Result<f64> {
    check_plan(plan, us, b.p().len(), b.q().len())?;
    let mut acc = 0.0;
    for (s, &ps) in b.p().iter().enumerate() {
        for (t, &qt) in b.q().iter().enumerate() {
            for (u, &x) in us.iter().zip(plan.fiber(s, t)) {
                acc += ps * qt * u.eval(x);
            }
        }
    }
    Ok(acc)
}

impl EURepresentation {
    pub fn joint3d(utilities: Vec<UtilityFunction>, belief: JointBelief) -> Result<Self> {
        if utilities.len() < 2 {
            return Err(Error::Dimension(format!("need one utility per period (>= 2), got {}", utilities.len())));
        }
        Ok(Self::Joint3D { utilities, belief })
    }

    pub fn product3d(utilities: Vec<UtilityFunction>, belief: ProductBelief) -> Result<Self> {
        if utilities.len() < 2 {
            return Err(Error::Dimension(format!("need one utility per period (>= 2), got {}", utilities.len())));
        }
        Ok(Self::Product3D { utilities, belief })
    }

    pub fn kind(&self) -> RepresentationKind {
        match self {
            Self::Product2D { .. } => RepresentationKind::Product2D,
            Self::Joint2D { .. } => RepresentationKind::Joint2D,
            Self::Joint3D { .. } => RepresentationKind::Joint3D,
            Self::Product3D { .. } => RepresentationKind::Product3D,
        }
    }

    pub fn utilities(&self) -> &[UtilityFunction] {
        match self {
            Self::Product2D { utility, .. } | Self::Joint2D { utility, .. } => std::slice::from_ref(utility),
            Self::Joint3D { utilities, .. } | Self::Product3D { utilities, .. } => utilities,
        }
    }

    /// The belief as a joint matrix.
    pub fn joint_belief(&self) -> JointBelief {
        match self {
            Self::Product2D { belief, .. } | Self::Product3D { belief, .. } => belief.to_joint(),
            Self::Joint2D { belief, .. } | Self::Joint3D { belief, .. } => belief.clone(),
        }
    }

    /// Whether alternatives on `space` can be evaluated.
    pub fn fits(&self, space: &StateSpace) -> bool {
        let b = self.joint_belief();
        b.matches(space)
            && space.has_periods() == self.kind().has_periods()
            && (!space.has_periods() || self.utilities().len() == space.n_i())
    }

    pub fn evaluate(&self, x: &Alternative) -> Result<f64> {
        match (self, x) {
            (Self::Product2D { utility, belief }, Alternative::Prospect(p)) => evaluate_v(p, utility, belief),
            (Self::Joint2D { utility, belief }, Alternative::Prospect(p)) => evaluate_v_joint(p, utility, belief),
            (Self::Joint3D { utilities, belief }, Alternative::Plan(p)) => evaluate_w(p, utilities, belief),
            (Self::Product3D { utilities, belief }, Alternative::Plan(p)) => evaluate_w_product(p, utilities, belief),
            (rep, _) => Err(Error::Dimension(format!(
                "a {:?} representation cannot evaluate this alternative",
                rep.kind()
            ))),
        }
    }

    pub fn evaluate_all(&self, universe: &[Alternative], exec: Execution) -> Result<Vec<f64>> {
        exec.map(universe, |x| self.evaluate(x)).into_iter().collect()
    }

    /// Replaces every utility by `a·u + b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        let us: Vec<UtilityFunction> = self.utilities().iter().map(|u| u.affine(a, b)).collect::<Result<_>>()?;
        Ok(self.with_utilities(us))
    }

    fn with_utilities(&self, mut us: Vec<UtilityFunction>) -> Self {
        match self {
            Self::Product2D { belief, .. } => Self::Product2D { utility: us.remove(0), belief: belief.clone() },
            Self::Joint2D { belief, .. } => Self::Joint2D { utility: us.remove(0), belief: belief.clone() },
            Self::Joint3D { belief, .. } => Self::Joint3D { utilities: us, belief: belief.clone() },
            Self::Product3D { belief, .. } => Self::Product3D { utilities: us, belief: belief.clone() },
        }
    }
}

/// All pairwise verdicts `(i, j)`, `i < j`, from the representation's values.
/// Exact ties are indifference.
pub fn induced_preference(rep: &EURepresentation, universe: &[Alternative]) -> Result<PreferenceDataset> {
    induced_preference_with(rep, universe, Execution::default())
}

pub fn induced_preference_with(rep: &EURepresentation, universe: &[Alternative], exec: Execution) -> Result<PreferenceDataset> {
    let values = rep.evaluate_all(universe, exec)?;
    let n = values.len();
    let comparisons: Vec<Comparison> = exec
        .map_range(n, |i| {
            (i + 1..n)
                .map(|j| Comparison::new(i, j, Verdict::from_values(values[i], values[j])))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
    PreferenceDataset::new(universe.to_vec(), comparisons)
}

/// Verdicts for the listed pairs only.
pub fn induced_preference_on_pairs(rep: &EURepresentation, universe: &[Alternative], pairs: &[(usize, usize)]) -> Result<PreferenceDataset> {
    let values = rep.evaluate_all(universe, Execution::default())?;
    let n = values.len();
    let comparisons = pairs
        .iter()
        .map(|&(i, j)| {
            if i >= n || j >= n {
                return Err(Error::Dataset(format!("pair ({i}, {j}) outside a universe of {n}")));
            }
            Ok(Comparison::new(i, j, Verdict::from_values(values[i], values[j])))
        })
        .collect::<Result<Vec<_>>>()?;
    PreferenceDataset::new(universe.to_vec(), comparisons)
}

fn is_canonical(us: &[UtilityFunction]) -> bool {
    let lows_zero = us.iter().all(|u| u.knots()[0].1 == 0.0);
    let range: f64 = us.iter().map(|u| u.knots()[u.knots().len() - 1].1).sum();
    lows_zero && (range - 1.0).abs() <= IDENTITY_TOL
}

/// Canonical affine representative.
///
/// Two-factor forms map `u` so that `u(min) = 0` and `u(max) = 1` on the
/// knot domain. Period forms shift each `u^i` to `u^i(min_i) = 0` and divide
/// all of them by one common multiplier so the ranges sum to 1.
pub fn normalize_representation(rep: &EURepresentation) -> Result<EURepresentation> {
    let us = rep.utilities();
    if rep.kind().has_periods() && is_canonical(us) {
        return Ok(rep.clone());
    }
    let lows: Vec<f64> = us.iter().map(|u| u.knots()[0].1).collect();
    let range: f64 = us
        .iter()
        .zip(&lows)
        .map(|(u, lo)| u.knots()[u.knots().len() - 1].1 - lo)
        .sum();
    if !(range > 0.0 && range.is_finite()) {
        return Err(Error::DegenerateDomain(format!("utility range {range}")));
    }
    let normalized = us
        .iter()
        .zip(&lows)
        .map(|(u, &lo)| UtilityFunction::new(u.knots().iter().map(|&(x, v)| (x, (v - lo) / range)).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(rep.with_utilities(normalized))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn space2() -> Arc<StateSpace> {
        Arc::new(StateSpace::indexed(2, 2, None).unwrap())
    }

    fn prospect(rows: Vec<Vec<f64>>) -> Prospect {
        Prospect::from_rows(space2(), rows).unwrap()
    }

    #[test]
    fn evaluate_v_examples() {
        let u = UtilityFunction::identity();
        let half = ProductBelief::new(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        assert_eq!(evaluate_v(&prospect(vec![vec![1.0, 0.0], vec![0.0, 1.0]]), &u, &half).unwrap(), 0.5);

        let b = ProductBelief::new(vec![0.3, 0.7], vec![0.6, 0.4]).unwrap();
        let x = prospect(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        // brute force: 0.3·(0.6·1 + 0.4·2) + 0.7·(0.6·3 + 0.4·4)
        let oracle: f64 = 0.3 * (0.6 * 1.0 + 0.4 * 2.0) + 0.7 * (0.6 * 3.0 + 0.4 * 4.0);
        assert!((oracle - 2.8).abs() < 1e-12);
        for v in [
            evaluate_v(&x, &u, &b).unwrap(),
            evaluate_v_nested(&x, &u, &b, Axis::S).unwrap(),
            evaluate_v_nested(&x, &u, &b, Axis::T).unwrap(),
        ] {
            assert!((v - 2.8).abs() <= IDENTITY_TOL, "{v}");
        }

        let c = 1.7;
        let bent = UtilityFunction::new(vec![(0.0, 0.0), (1.0, 3.0), (2.0, 3.5)]).unwrap();
        let v = evaluate_v(&Prospect::constant(space2(), c).unwrap(), &bent, &b).unwrap();
        assert!((v - bent.eval(c)).abs() <= IDENTITY_TOL);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let b = ProductBelief::new(vec![0.2, 0.3, 0.5], vec![0.5, 0.5]).unwrap();
        let x = prospect(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(matches!(evaluate_v(&x, &UtilityFunction::identity(), &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn evaluate_w_examples() {
        let space = Arc::new(StateSpace::indexed(2, 2, Some(2)).unwrap());
        let id = vec![UtilityFunction::identity(); 2];
        let c = 2.5;
        let w = evaluate_w(&Plan::constant(Arc::clone(&space), c).unwrap(), &id, &JointBelief::uniform(&space)).unwrap();
        assert!((w - 2.0 * c).abs() <= IDENTITY_TOL);

        let pi = JointBelief::from_rows(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let cube = (0..2).map(|s| vec![vec![(s + 1) as f64; 2]; 2]).collect();
        let plan = Plan::from_cube(Arc::clone(&space), cube).unwrap();
        // brute force over the 8 terms
        let mut oracle = 0.0;
        for s in 0..2 {
            for t in 0..2 {
                for _i in 0..2 {
                    oracle += pi.get(s, t) * (s + 1) as f64;
                }
            }
        }
        assert!((oracle - 3.0).abs() < 1e-12);
        assert!((evaluate_w(&plan, &id, &pi).unwrap() - 3.0).abs() <= IDENTITY_TOL);

        assert!(matches!(evaluate_w(&plan, &id[..1], &pi), Err(Error::Dimension(_))));
    }

    #[test]
    fn induced_preference_basics() {
        let rep = EURepresentation::Product2D {
            utility: UtilityFunction::identity(),
            belief: ProductBelief::uniform(&space2()),
        };
        let universe: Vec<Alternative> = vec![
            prospect(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).into(),
            prospect(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).into(),
            prospect(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).into(),
        ];
        let data = induced_preference(&rep, &universe).unwrap();
        assert_eq!(
            data.comparisons(),
            &[
                Comparison::new(0, 1, Verdict::ABetter),
                Comparison::new(0, 2, Verdict::Indifferent),
                Comparison::new(1, 2, Verdict::BBetter),
            ]
        );
        let seq = induced_preference_with(&rep, &universe, Execution::Sequential).unwrap();
        assert_eq!(seq, data);
    }

    #[test]
    fn normalize_examples() {
        let rep = EURepresentation::Product2D {
            utility: UtilityFunction::new(vec![(0.0, 5.0), (1.0, 9.0)]).unwrap(),
            belief: ProductBelief::uniform(&space2()),
        };
        let norm = normalize_representation(&rep).unwrap();
        assert_eq!(norm.utilities()[0].knots(), &[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(normalize_representation(&norm).unwrap(), norm);

        let us = vec![
            UtilityFunction::new(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap(),
            UtilityFunction::new(vec![(0.0, -1.0), (1.0, 5.0), (2.0, 7.0)]).unwrap(),
        ];
        let rep3 = EURepresentation::product3d(us, ProductBelief::uniform(&space2())).unwrap();
        let norm3 = normalize_representation(&rep3).unwrap();
        let knots: Vec<_> = norm3.utilities().iter().map(|u| u.knots().to_vec()).collect();
        assert_eq!(knots[0], vec![(0.0, 0.0), (2.0, 0.2)]);
        assert_eq!(knots[1], vec![(0.0, 0.0), (1.0, 0.6), (2.0, 0.8)]);
        assert_eq!(normalize_representation(&norm3).unwrap(), norm3);
    }

    #[test]
    fn representation_json() {
        let json = r#"{"kind":"joint3d","utilities":[{"knots":[[0,0],[1,1]]},{"knots":[[0,0],[1,2]]}],"belief":{"pi":[[0.4,0.1],[0.1,0.4]]}}"#;
        let rep: EURepresentation = serde_json::from_str(json).unwrap();
        assert_eq!(rep.kind(), RepresentationKind::Joint3D);
        let back: EURepresentation = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        assert_eq!(back, rep);
        let wrong = r#"{"kind":"product2d","utilities":[{"knots":[[0,0],[1,1]]}],"belief":{"pi":[[0.4,0.1],[0.1,0.4]]}}"#;
        assert!(serde_json::from_str::<EURepresentation>(wrong).is_err());
    }
}
