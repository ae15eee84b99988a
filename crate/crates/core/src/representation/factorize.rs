//! Deciding whether a joint belief is a product of its marginals.
//!
//! `π = p ⊗ q` holds exactly when every 2×2 minor
//! `π_st π_s't' − π_st' π_s't` vanishes. The factors are read off as the
//! row marginal `p_s = Σ_t π_st` and the row-normalized reference row
//! `q_t = π_{s0 t} / Σ_t π_{s0 t}`.

use serde::{Deserialize, Serialize};

use crate::belief::{JointBelief, ProductBelief};
use crate::error::{Error, Result};

pub const DEFAULT_FACTORIZE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Product,
    NotIndependent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorWitness {
    /// `|π_{s_a t_a} π_{s_b t_b} − π_{s_a t_b} π_{s_b t_a}|`.
    Minor { rows: (usize, usize), cols: (usize, usize), value: f64 },
    /// `|π_st − p_s q_t|` for a cell.
    Residual { cell: (usize, usize), value: f64 },
}

impl FactorWitness {
    pub fn value(&self) -> f64 {
        match self {
            FactorWitness::Minor { value, .. } | FactorWitness::Residual { value, .. } => *value,
        }
    }

    /// Recomputes the witnessed quantity from `belief` (and the reported factors).
    pub fn recompute(&self, belief: &JointBelief, p: &[f64], q: &[f64]) -> f64 {
        match *self {
            FactorWitness::Minor { rows: (sa, sb), cols: (ta, tb), .. } => minor(belief, sa, sb, ta, tb),
            FactorWitness::Residual { cell: (s, t), .. } => (belief.get(s, t) - p[s] * q[t]).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationResult {
    pub outcome: Outcome,
    /// Row marginal of the belief, whatever the outcome.
    pub p: Vec<f64>,
    /// Row-normalized reference row.
    pub q: Vec<f64>,
    pub reference_row: usize,
    pub max_minor: f64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub witness: FactorWitness,
}

impl FactorizationResult {
    pub fn is_product(&self) -> bool {
        self.outcome == Outcome::Product
    }

    /// The factors as a belief, when the outcome is `Product`.
    pub fn product(&self) -> Option<ProductBelief> {
        if !self.is_product() {
            return None;
        }
        // p and q sum to one up to rounding; rebuild without re-validating
        ProductBelief::new(self.p.clone(), self.q.clone()).ok()
    }
}

fn minor(b: &JointBelief, sa: usize, sb: usize, ta: usize, tb: usize) -> f64 {
    (b.get(sa, ta) * b.get(sb, tb) - b.get(sa, tb) * b.get(sb, ta)).abs()
}

/// Largest 2×2 minor and where it sits.
pub fn max_minor(b: &JointBelief) -> (f64, FactorWitness) {
    let mut best = (f64::NEG_INFINITY, FactorWitness::Minor { rows: (0, 1), cols: (0, 1), value: 0.0 });
    for sa in 0..b.n_s() {
        for sb in sa + 1..b.n_s() {
            for ta in 0..b.n_t() {
                for tb in ta + 1..b.n_t() {
                    let value = minor(b, sa, sb, ta, tb);
                    if value > best.0 {
                        best = (value, FactorWitness::Minor { rows: (sa, sb), cols: (ta, tb), value });
                    }
                }
            }
        }
    }
    best
}

/// [`factorize_from`] with the first row as reference.
pub fn factorize(b: &JointBelief, tol: f64) -> Result<FactorizationResult> {
    factorize_from(b, tol, 0)
}

/// Tests `π = p ⊗ q` within `tol` using reference row `s0` for `q`.
///
/// The outcome is `Product` iff every minor and every cell residual
/// `|π_st − p_s q_t|` is within `tol`.
pub fn factorize_from(b: &JointBelief, tol: f64, s0: usize) -> Result<FactorizationResult> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::Precondition(format!("tolerance must be a nonnegative real, got {tol}")));
    }
    if s0 >= b.n_s() {
        return Err(Error::FixedValue(format!("reference row {s0} of {}", b.n_s())));
    }
    let p = b.row_sums();
    if let Some(s) = p.iter().position(|&m| m <= 0.0) {
        return Err(Error::ZeroRowMass(s));
    }
    let q: Vec<f64> = b.row(s0).iter().map(|&v| v / p[s0]).collect();

    let (max_minor, minor_witness) = max_minor(b);
    let mut max_residual = 0.0_f64;
    let mut residual_cell = (0, 0);
    for (s, &ps) in p.iter().enumerate() {
        for (t, &qt) in q.iter().enumerate() {
            let r = (b.get(s, t) - ps * qt).abs();
            if r > max_residual {
                max_residual = r;
                residual_cell = (s, t);
            }
        }
    }

    let (outcome, witness) = if max_minor > tol {
        (Outcome::NotIndependent, minor_witness)
    } else if max_residual > tol {
        (Outcome::NotIndependent, FactorWitness::Residual { cell: residual_cell, value: max_residual })
    } else {
        (Outcome::Product, minor_witness)
    };
    Ok(FactorizationResult { outcome, p, q, reference_row: s0, max_minor, max_residual, tolerance: tol, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_product() {
        let b = ProductBelief::new(vec![0.3, 0.7], vec![0.6, 0.4]).unwrap().to_joint();
        let r = factorize(&b, DEFAULT_FACTORIZE_TOL).unwrap();
        assert!(r.is_product());
        for (got, want) in r.p.iter().zip([0.3, 0.7]) {
            assert!((got - want).abs() <= 1e-12);
        }
        for (got, want) in r.q.iter().zip([0.6, 0.4]) {
            assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn correlated_two_by_two() {
        let b = JointBelief::from_rows(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let r = factorize(&b, DEFAULT_FACTORIZE_TOL).unwrap();
        assert_eq!(r.outcome, Outcome::NotIndependent);
        // |0.4·0.4 − 0.1·0.1|
        assert!((r.max_minor - 0.15).abs() < 1e-15);
        assert!(r.witness.recompute(&b, &r.p, &r.q) > DEFAULT_FACTORIZE_TOL);
        assert!(r.product().is_none());
        assert_eq!(r.p, b.row_sums());
    }

    #[test]
    fn uniform_three_by_three() {
        let space = crate::space::StateSpace::indexed(3, 3, None).unwrap();
        let r = factorize(&JointBelief::uniform(&space), DEFAULT_FACTORIZE_TOL).unwrap();
        assert!(r.is_product());
        for v in r.p.iter().chain(&r.q) {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_row_mass_is_rejected() {
        let b = JointBelief::from_rows(vec![vec![0.5, 0.5], vec![0.0, 0.0]]).unwrap();
        assert_eq!(factorize(&b, 1e-9).unwrap_err(), Error::ZeroRowMass(1));
        let b = JointBelief::from_rows(vec![vec![0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        assert!(factorize(&b, 1e-9).unwrap().is_product());
    }
}
