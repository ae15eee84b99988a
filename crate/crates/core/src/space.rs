//! Finite state spaces and the axes along which alternatives are sliced.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label sets for the two uncertainty sources `S`, `T` and the optional
/// period axis `I`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct StateSpace {
    s: Vec<String>,
    t: Vec<String>,
    i: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    s: Vec<String>,
    t: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    i: Option<Vec<String>>,
}

impl TryFrom<RawSpace> for StateSpace {
    type Error = Error;
    fn try_from(raw: RawSpace) -> Result<Self> {
        StateSpace::build(raw.s, raw.t, raw.i)
    }
}

impl From<StateSpace> for RawSpace {
    fn from(space: StateSpace) -> Self {
        RawSpace { s: space.s, t: space.t, i: space.i }
    }
}

fn check_axis(name: &str, labels: &[String]) -> Result<()> {
    if labels.len() < 2 {
        return Err(Error::Space(format!(
            "axis {name} needs at least 2 labels, got {}",
            labels.len()
        )));
    }
    let mut seen = HashSet::new();
    for label in labels {
        if !seen.insert(label) {
            return Err(Error::Space(format!("duplicate label {label:?} on axis {name}")));
        }
    }
    Ok(())
}

impl StateSpace {
    fn build(s: Vec<String>, t: Vec<String>, i: Option<Vec<String>>) -> Result<Self> {
        check_axis("S", &s)?;
        check_axis("T", &t)?;
        if let Some(i) = &i {
            check_axis("I", i)?;
        }
        Ok(StateSpace { s, t, i })
    }

    /// Two-dimensional space `S × T`.
    pub fn new<L: Into<String>>(
        s: impl IntoIterator<Item = L>,
        t: impl IntoIterator<Item = L>,
    ) -> Result<Self> {
        Self::build(
            s.into_iter().map(Into::into).collect(),
            t.into_iter().map(Into::into).collect(),
            None,
        )
    }

    /// Three-dimensional space `S × T × I`.
    pub fn with_periods<L: Into<String>>(
        s: impl IntoIterator<Item = L>,
        t: impl IntoIterator<Item = L>,
        i: impl IntoIterator<Item = L>,
    ) -> Result<Self> {
        Self::build(
            s.into_iter().map(Into::into).collect(),
            t.into_iter().map(Into::into).collect(),
            Some(i.into_iter().map(Into::into).collect()),
        )
    }

    /// Space with generated labels `s1..`, `t1..` and, if requested, `i1..`.
    pub fn indexed(n_s: usize, n_t: usize, n_i: Option<usize>) -> Result<Self> {
        let labels = |prefix: &str, n: usize| (1..=n).map(|k| format!("{prefix}{k}")).collect();
        Self::build(labels("s", n_s), labels("t", n_t), n_i.map(|n| labels("i", n)))
    }

    pub fn s_labels(&self) -> &[String] {
        &self.s
    }

    pub fn t_labels(&self) -> &[String] {
        &self.t
    }

    pub fn i_labels(&self) -> Option<&[String]> {
        self.i.as_deref()
    }

    pub fn n_s(&self) -> usize {
        self.s.len()
    }

    pub fn n_t(&self) -> usize {
        self.t.len()
    }

    /// Number of periods; 1 for a two-dimensional space.
    pub fn n_i(&self) -> usize {
        self.i.as_ref().map_or(1, Vec::len)
    }

    pub fn has_periods(&self) -> bool {
        self.i.is_some()
    }

    pub fn layout(&self) -> Layout {
        Layout { n_s: self.n_s(), n_t: self.n_t(), n_i: self.n_i(), periods: self.has_periods() }
    }

    /// Axes on which conditionals can be taken in this space.
    pub fn axes(&self) -> Vec<Axis> {
        if self.has_periods() {
            vec![Axis::S, Axis::T, Axis::I, Axis::ST]
        } else {
            vec![Axis::S, Axis::T]
        }
    }

    /// Human-readable label of a fixed value on an axis.
    pub fn fixed_label(&self, axis: Axis, fixed: FixedValue) -> String {
        let get = |labels: &[String], k: usize| labels.get(k).cloned().unwrap_or_else(|| format!("#{k}"));
        match (axis, fixed) {
            (Axis::S, FixedValue::Single(k)) => get(&self.s, k),
            (Axis::T, FixedValue::Single(k)) => get(&self.t, k),
            (Axis::I, FixedValue::Single(k)) => get(self.i.as_deref().unwrap_or(&[]), k),
            (_, FixedValue::Pair(s, t)) => format!("({},{})", get(&self.s, s), get(&self.t, t)),
            (Axis::ST, FixedValue::Single(k)) => format!("#{k}"),
        }
    }
}

/// Axis a conditional fixes: an `s`-row, a `t`-column, a period `i`, or an
/// `(s,t)` fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    S,
    T,
    I,
    ST,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::S => "S",
            Axis::T => "T",
            Axis::I => "I",
            Axis::ST => "ST",
        })
    }
}

/// Value held fixed on an axis: an index for `S`, `T`, `I`, a pair for `ST`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FixedValue {
    Single(usize),
    Pair(usize, usize),
}

impl fmt::Display for FixedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedValue::Single(k) => write!(f, "{k}"),
            FixedValue::Pair(s, t) => write!(f, "({s},{t})"),
        }
    }
}

/// Flat row-major geometry of an alternative: `s`-major, then `t`, then `i`.
/// Two-dimensional prospects use `n_i = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n_s: usize,
    pub n_t: usize,
    pub n_i: usize,
    pub periods: bool,
}

impl Layout {
    pub fn len(&self) -> usize {
        self.n_s * self.n_t * self.n_i
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, s: usize, t: usize, i: usize) -> usize {
        (s * self.n_t + t) * self.n_i + i
    }

    pub fn coords(&self, flat: usize) -> (usize, usize, usize) {
        let i = flat % self.n_i;
        let st = flat / self.n_i;
        (st / self.n_t, st % self.n_t, i)
    }

    pub fn has_axis(&self, axis: Axis) -> bool {
        match axis {
            Axis::S | Axis::T => true,
            Axis::I | Axis::ST => self.periods,
        }
    }

    /// All fixed values of an axis in canonical order.
    pub fn fixed_values(&self, axis: Axis) -> Vec<FixedValue> {
        match axis {
            Axis::S => (0..self.n_s).map(FixedValue::Single).collect(),
            Axis::T => (0..self.n_t).map(FixedValue::Single).collect(),
            Axis::I => (0..self.n_i).map(FixedValue::Single).collect(),
            Axis::ST => (0..self.n_s)
                .flat_map(|s| (0..self.n_t).map(move |t| FixedValue::Pair(s, t)))
                .collect(),
        }
    }

    pub fn check_fixed(&self, axis: Axis, fixed: FixedValue) -> Result<()> {
        let ok = match (axis, fixed) {
            (Axis::S, FixedValue::Single(k)) => k < self.n_s,
            (Axis::T, FixedValue::Single(k)) => k < self.n_t,
            (Axis::I, FixedValue::Single(k)) => self.periods && k < self.n_i,
            (Axis::ST, FixedValue::Pair(s, t)) => self.periods && s < self.n_s && t < self.n_t,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::FixedValue(format!("{fixed} on axis {axis}")))
        }
    }

    /// The fixed value on `axis` that owns cell `flat`.
    pub fn owner(&self, axis: Axis, flat: usize) -> FixedValue {
        let (s, t, i) = self.coords(flat);
        match axis {
            Axis::S => FixedValue::Single(s),
            Axis::T => FixedValue::Single(t),
            Axis::I => FixedValue::Single(i),
            Axis::ST => FixedValue::Pair(s, t),
        }
    }

    /// Cells of the slice selected by `fixed`, in flat order.
    pub fn slice_cells(&self, axis: Axis, fixed: FixedValue) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.owner(axis, c) == fixed).collect()
    }
}
