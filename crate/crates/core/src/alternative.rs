//! Prospects (`S × T` matrices) and contingent plans (`S × T × I` arrays).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Layout, StateSpace};

fn check_finite(values: &[f64], layout: &Layout) -> Result<()> {
    for (flat, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            let (s, t, i) = layout.coords(flat);
            let location = if layout.periods {
                format!("(s={s}, t={t}, i={i})")
            } else {
                format!("(s={s}, t={t})")
            };
            return Err(Error::NonFinite { value: v, location });
        }
    }
    Ok(())
}

/// A mapping from states `(s,t)` to real consequences, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProspect", into = "RawProspect")]
pub struct Prospect {
    space: Arc<StateSpace>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProspect {
    space: Arc<StateSpace>,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<RawProspect> for Prospect {
    type Error = Error;
    fn try_from(raw: RawProspect) -> Result<Self> {
        Prospect::from_rows(raw.space, raw.rows)
    }
}

impl From<Prospect> for RawProspect {
    fn from(p: Prospect) -> Self {
        let rows = p.rows().map(<[f64]>::to_vec).collect();
        RawProspect { space: p.space, rows }
    }
}

impl Prospect {
    /// Builds a prospect from `|S|` rows of length `|T|`.
    pub fn from_rows(space: impl Into<Arc<StateSpace>>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let space = space.into();
        if space.has_periods() {
            return Err(Error::Dimension("a prospect needs a space without periods".into()));
        }
        if rows.len() != space.n_s() {
            return Err(Error::Dimension(format!(
                "expected {} rows, got {}",
                space.n_s(),
                rows.len()
            )));
        }
        for (s, row) in rows.iter().enumerate() {
            if row.len() != space.n_t() {
                return Err(Error::Dimension(format!(
                    "row {s} has length {}, expected {}",
                    row.len(),
                    space.n_t()
                )));
            }
        }
        Self::from_flat(space, rows.into_iter().flatten().collect())
    }

    /// Builds a prospect from row-major values.
    pub fn from_flat(space: impl Into<Arc<StateSpace>>, values: Vec<f64>) -> Result<Self> {
        let space = space.into();
        let layout = space.layout();
        if space.has_periods() || values.len() != layout.len() {
            return Err(Error::Dimension(format!(
                "expected {} values for a {}x{} prospect, got {}",
                layout.len(),
                layout.n_s,
                layout.n_t,
                values.len()
            )));
        }
        check_finite(&values, &layout)?;
        Ok(Prospect { space, values })
    }

    pub fn constant(space: impl Into<Arc<StateSpace>>, c: f64) -> Result<Self> {
        let space = space.into();
        let n = space.layout().len();
        Self::from_flat(space, vec![c; n])
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.values[s * self.space.n_t() + t]
    }

    /// The `s`-row `x_s ∈ ℝ^T`.
    pub fn row(&self, s: usize) -> &[f64] {
        let n_t = self.space.n_t();
        &self.values[s * n_t..(s + 1) * n_t]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.space.n_t())
    }

    /// The `t`-column `x^t ∈ ℝ^S`.
    pub fn column(&self, t: usize) -> Vec<f64> {
        (0..self.space.n_s()).map(|s| self.get(s, t)).collect()
    }
}

/// A contingent plan `(s,t,i) ↦ x_st^i`, stored `s`-major, then `t`, then `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlan", into = "RawPlan")]
pub struct Plan {
    space: Arc<StateSpace>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPlan {
    space: Arc<StateSpace>,
    cube: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawPlan> for Plan {
    type Error = Error;
    fn try_from(raw: RawPlan) -> Result<Self> {
        Plan::from_cube(raw.space, raw.cube)
    }
}

impl From<Plan> for RawPlan {
    fn from(p: Plan) -> Self {
        let (n_t, n_i) = (p.space.n_t(), p.space.n_i());
        let cube = p
            .values
            .chunks(n_t * n_i)
            .map(|slab| slab.chunks(n_i).map(<[f64]>::to_vec).collect())
            .collect();
        RawPlan { space: p.space, cube }
    }
}

impl Plan {
    pub fn from_cube(space: impl Into<Arc<StateSpace>>, cube: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let space = space.into();
        if !space.has_periods() {
            return Err(Error::Dimension("a plan needs a space with periods".into()));
        }
        if cube.len() != space.n_s() {
            return Err(Error::Dimension(format!(
                "expected {} s-slabs, got {}",
                space.n_s(),
                cube.len()
            )));
        }
        for (s, slab) in cube.iter().enumerate() {
            if slab.len() != space.n_t() {
                return Err(Error::Dimension(format!(
                    "slab {s} has {} t-entries, expected {}",
                    slab.len(),
                    space.n_t()
                )));
            }
            for (t, fiber) in slab.iter().enumerate() {
                if fiber.len() != space.n_i() {
                    return Err(Error::Dimension(format!(
                        "fiber ({s},{t}) has length {}, expected {}",
                        fiber.len(),
                        space.n_i()
                    )));
                }
            }
        }
        Self::from_flat(space, cube.into_iter().flatten().flatten().collect())
    }

    pub fn from_flat(space: impl Into<Arc<StateSpace>>, values: Vec<f64>) -> Result<Self> {
        let space = space.into();
        let layout = space.layout();
        if !space.has_periods() || values.len() != layout.len() {
            return Err(Error::Dimension(format!(
                "expected {} values for a {}x{}x{} plan, got {}",
                layout.len(),
                layout.n_s,
                layout.n_t,
                layout.n_i,
                values.len()
            )));
        }
        check_finite(&values, &layout)?;
        Ok(Plan { space, values })
    }

    pub fn constant(space: impl Into<Arc<StateSpace>>, c: f64) -> Result<Self> {
        let space = space.into();
        let n = space.layout().len();
        Self::from_flat(space, vec![c; n])
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, s: usize, t: usize, i: usize) -> f64 {
        self.values[self.space.layout().index(s, t, i)]
    }

    /// The non-contingent plan `x_st ∈ ℝ^I`.
    pub fn fiber(&self, s: usize, t: usize) -> &[f64] {
        let n_i = self.space.n_i();
        let start = (s * self.space.n_t() + t) * n_i;
        &self.values[start..start + n_i]
    }

    /// The dated prospect `X^i`.
    pub fn dated(&self, i: usize) -> Result<Prospect> {
        let space = StateSpace::new(self.space.s_labels().to_vec(), self.space.t_labels().to_vec())?;
        let n_i = self.space.n_i();
        Prospect::from_flat(space, self.values.iter().skip(i).step_by(n_i).copied().collect())
    }
}

/// Either kind of alternative a dataset can hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alternative {
    Prospect(Prospect),
    Plan(Plan),
}

impl Alternative {
    pub fn space(&self) -> &Arc<StateSpace> {
        match self {
            Alternative::Prospect(p) => p.space(),
            Alternative::Plan(p) => p.space(),
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Alternative::Prospect(p) => p.values(),
            Alternative::Plan(p) => p.values(),
        }
    }

    pub fn layout(&self) -> Layout {
        self.space().layout()
    }

    /// Same geometry as `space`, with new values.
    pub fn from_flat(space: &Arc<StateSpace>, values: Vec<f64>) -> Result<Self> {
        if space.has_periods() {
            Plan::from_flat(Arc::clone(space), values).map(Alternative::Plan)
        } else {
            Prospect::from_flat(Arc::clone(space), values).map(Alternative::Prospect)
        }
    }
}

impl From<Prospect> for Alternative {
    fn from(p: Prospect) -> Self {
        Alternative::Prospect(p)
    }
}

impl From<Plan> for Alternative {
    fn from(p: Plan) -> Self {
        Alternative::Plan(p)
    }
}

/// Exact identity key for a vector of reals; `-0.0` and `0.0` collapse.
pub(crate) fn value_key(values: &[f64]) -> Vec<u64> {
    values.iter().map(|&v| if v == 0.0 { 0 } else { v.to_bits() }).collect()
}
