//! Joint beliefs on `S × T` and product beliefs `p ⊗ q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::StateSpace;

/// Tolerance on `|Σ − 1|` accepted by the simplex constructors.
pub const SIMPLEX_TOL: f64 = 1e-12;

fn check_simplex(values: &[f64], what: &str) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::Simplex(format!("{what} needs at least 2 entries")));
    }
    for (k, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Simplex(format!("{what}[{k}] = {v} is not a nonnegative real")));
        }
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::Simplex(format!("{what} sums to {sum:.17}, not 1")));
    }
    Ok(())
}

/// A probability function `π ∈ Δ_{S×T}`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct JointBelief {
    n_s: usize,
    n_t: usize,
    pi: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawJoint {
    pi: Vec<Vec<f64>>,
}

impl TryFrom<RawJoint> for JointBelief {
    type Error = Error;
    fn try_from(raw: RawJoint) -> Result<Self> {
        JointBelief::from_rows(raw.pi)
    }
}

impl From<JointBelief> for RawJoint {
    fn from(b: JointBelief) -> Self {
        RawJoint { pi: b.pi.chunks(b.n_t).map(<[f64]>::to_vec).collect() }
    }
}

impl JointBelief {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_s = rows.len();
        let n_t = rows.first().map_or(0, Vec::len);
        if n_s < 2 || n_t < 2 {
            return Err(Error::Dimension(format!("joint belief must be at least 2x2, got {n_s}x{n_t}")));
        }
        if let Some((s, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n_t) {
            return Err(Error::Dimension(format!("row {s} has length {}, expected {n_t}", row.len())));
        }
        Self::from_flat(n_s, n_t, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(n_s: usize, n_t: usize, pi: Vec<f64>) -> Result<Self> {
        if n_s < 2 || n_t < 2 || pi.len() != n_s * n_t {
            return Err(Error::Dimension(format!(
                "joint belief needs {n_s}x{n_t} >= 2x2 entries, got {}",
                pi.len()
            )));
        }
        check_simplex(&pi, "pi")?;
        Ok(JointBelief { n_s, n_t, pi })
    }

    /// `π_st = 1 / (|S|·|T|)`.
    pub fn uniform(space: &StateSpace) -> Self {
        let n = space.n_s() * space.n_t();
        JointBelief { n_s: space.n_s(), n_t: space.n_t(), pi: vec![1.0 / n as f64; n] }
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.pi[s * self.n_t + t]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.pi
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.pi[s * self.n_t..(s + 1) * self.n_t]
    }

    /// Row marginal `(Σ_t π_st)_s`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.pi.chunks(self.n_t).map(|r| r.iter().sum()).collect()
    }

    /// Column marginal `(Σ_s π_st)_t`.
    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n_t).map(|t| (0..self.n_s).map(|s| self.get(s, t)).sum()).collect()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.pi.iter().all(|&v| v > 0.0)
    }

    /// The product of this belief's marginals.
    pub fn marginal_product(&self) -> Result<ProductBelief> {
        ProductBelief::new(self.row_sums(), self.col_sums())
    }

    pub fn matches(&self, space: &StateSpace) -> bool {
        self.n_s == space.n_s() && self.n_t == space.n_t()
    }
}

/// A pair of marginals `p ∈ Δ_S`, `q ∈ Δ_T` standing for `p ⊗ q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProduct", into = "RawProduct")]
pub struct ProductBelief {
    p: Vec<f64>,
    q: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProduct {
    p: Vec<f64>,
    q: Vec<f64>,
}

impl TryFrom<RawProduct> for ProductBelief {
    type Error = Error;
    fn try_from(raw: RawProduct) -> Result<Self> {
        ProductBelief::new(raw.p, raw.q)
    }
}

impl From<ProductBelief> for RawProduct {
    fn from(b: ProductBelief) -> Self {
        RawProduct { p: b.p, q: b.q }
    }
}

impl ProductBelief {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        check_simplex(&p, "p")?;
        check_simplex(&q, "q")?;
        Ok(ProductBelief { p, q })
    }

    pub fn uniform(space: &StateSpace) -> Self {
        ProductBelief {
            p: vec![1.0 / space.n_s() as f64; space.n_s()],
            q: vec![1.0 / space.n_t() as f64; space.n_t()],
        }
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.p.iter().chain(&self.q).all(|&v| v > 0.0)
    }

    /// `π_st = p_s q_t`.
    pub fn to_joint(&self) -> JointBelief {
        let pi = self.p.iter().flat_map(|&ps| self.q.iter().map(move |&qt| ps * qt)).collect();
        JointBelief { n_s: self.p.len(), n_t: self.q.len(), pi }
    }

    pub fn matches(&self, space: &StateSpace) -> bool {
        self.p.len() == space.n_s() && self.q.len() == space.n_t()
    }
}

/// Either belief format, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Belief {
    Joint(JointBelief),
    Product(ProductBelief),
}

impl Belief {
    pub fn to_joint(&self) -> JointBelief {
        match self {
            Belief::Joint(b) => b.clone(),
            Belief::Product(b) => b.to_joint(),
        }
    }
}
