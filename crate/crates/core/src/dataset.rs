//! Finite preference data: a universe of alternatives and pairwise verdicts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alternative::Alternative;
use crate::error::{Error, Result};
use crate::space::{Layout, StateSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "A>B")]
    ABetter,
    #[serde(rename = "A~B")]
    Indifferent,
    #[serde(rename = "B>A")]
    BBetter,
}

impl Verdict {
    /// The same judgement with the operands swapped.
    pub fn flip(self) -> Self {
        match self {
            Verdict::ABetter => Verdict::BBetter,
            Verdict::Indifferent => Verdict::Indifferent,
            Verdict::BBetter => Verdict::ABetter,
        }
    }

    /// Verdict of the numeric order on two evaluations; exact ties are
    /// indifference.
    pub fn from_values(a: f64, b: f64) -> Self {
        if a > b {
            Verdict::ABetter
        } else if a < b {
            Verdict::BBetter
        } else {
            Verdict::Indifferent
        }
    }

    pub fn is_strict(self) -> bool {
        self != Verdict::Indifferent
    }

    /// `A ≽ B`.
    pub fn a_weakly_better(self) -> bool {
        self != Verdict::BBetter
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ABetter => "A>B",
            Verdict::Indifferent => "A~B",
            Verdict::BBetter => "B>A",
        })
    }
}

/// One recorded comparison between universe members `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize, Verdict)", into = "(usize, usize, Verdict)")]
pub struct Comparison {
    pub a: usize,
    pub b: usize,
    pub verdict: Verdict,
}

impl From<(usize, usize, Verdict)> for Comparison {
    fn from((a, b, verdict): (usize, usize, Verdict)) -> Self {
        Comparison { a, b, verdict }
    }
}

impl From<Comparison> for (usize, usize, Verdict) {
    fn from(c: Comparison) -> Self {
        (c.a, c.b, c.verdict)
    }
}

impl Comparison {
    pub fn new(a: usize, b: usize, verdict: Verdict) -> Self {
        Comparison { a, b, verdict }
    }

    /// `(min, max, verdict as seen from min)`.
    pub fn oriented(&self) -> (usize, usize, Verdict) {
        if self.a <= self.b {
            (self.a, self.b, self.verdict)
        } else {
            (self.b, self.a, self.verdict.flip())
        }
    }
}

/// Two recorded verdicts on the same unordered pair that disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub a: usize,
    pub b: usize,
    pub verdicts: Vec<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDataset", into = "RawDataset")]
pub struct PreferenceDataset {
    universe: Vec<Alternative>,
    comparisons: Vec<Comparison>,
}

#[derive(Serialize, Deserialize)]
struct RawDataset {
    universe: Vec<Alternative>,
    comparisons: Vec<Comparison>,
}

impl TryFrom<RawDataset> for PreferenceDataset {
    type Error = Error;
    fn try_from(raw: RawDataset) -> Result<Self> {
        PreferenceDataset::new(raw.universe, raw.comparisons)
    }
}

impl From<PreferenceDataset> for RawDataset {
    fn from(d: PreferenceDataset) -> Self {
        RawDataset { universe: d.universe, comparisons: d.comparisons }
    }
}

impl PreferenceDataset {
    /// Validates indices and that every alternative lives on one space.
    /// Conflicting verdicts are kept; see [`PreferenceDataset::conflicts`].
    pub fn new(universe: Vec<Alternative>, comparisons: Vec<Comparison>) -> Result<Self> {
        if let Some(first) = universe.first() {
            let space = first.space();
            if let Some(k) = universe.iter().position(|x| x.space() != space) {
                return Err(Error::Dataset(format!("universe member {k} lives on a different state space")));
            }
        }
        let n = universe.len();
        if let Some(c) = comparisons.iter().find(|c| c.a >= n || c.b >= n) {
            return Err(Error::Dataset(format!(
                "comparison ({}, {}) refers outside a universe of {n}",
                c.a, c.b
            )));
        }
        Ok(PreferenceDataset { universe, comparisons })
    }

    pub fn universe(&self) -> &[Alternative] {
        &self.universe
    }

    pub fn comparisons(&self) -> &[Comparison] {
        &self.comparisons
    }

    pub fn space(&self) -> Option<&Arc<StateSpace>> {
        self.universe.first().map(Alternative::space)
    }

    pub fn layout(&self) -> Option<Layout> {
        self.space().map(|s| s.layout())
    }

    pub fn has_periods(&self) -> bool {
        self.space().is_some_and(|s| s.has_periods())
    }

    /// Same universe, different comparisons.
    pub fn with_comparisons(&self, comparisons: Vec<Comparison>) -> Result<Self> {
        Self::new(self.universe.clone(), comparisons)
    }

    /// Recorded verdicts per unordered pair, oriented from the smaller index.
    pub fn pair_verdicts(&self) -> BTreeMap<(usize, usize), Vec<Verdict>> {
        let mut map: BTreeMap<(usize, usize), Vec<Verdict>> = BTreeMap::new();
        for c in &self.comparisons {
            let (a, b, v) = c.oriented();
            let entry = map.entry((a, b)).or_default();
            if !entry.contains(&v) {
                entry.push(v);
            }
        }
        for v in map.values_mut() {
            v.sort();
        }
        map
    }

    /// Unordered pairs that carry more than one distinct verdict.
    pub fn conflicts(&self) -> Vec<Conflict> {
        self.pair_verdicts()
            .into_iter()
            .filter(|(_, v)| v.len() > 1)
            .map(|((a, b), verdicts)| Conflict { a, b, verdicts })
            .collect()
    }
}
