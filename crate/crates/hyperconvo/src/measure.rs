//! Finite-support measures with exact weights.
//!
//! A [`FiniteMeasure`] is a sparse non-negative rational-weighted measure on
//! element indices. Zero weights are never stored, so the support of a
//! measure is exactly its key set and `q = Σ_{j ∈ spt(q)} q(j)·δ_j` with
//! every stored `q(j) > 0`. A probability measure additionally has total
//! mass exactly 1.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteMeasure {
    weights: BTreeMap<usize, Rational>,
}

impl FiniteMeasure {
    pub fn zero() -> Self {
        FiniteMeasure::default()
    }

    /// The Dirac measure `δ_j`.
    pub fn point_mass(j: usize) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(j, Rational::one());
        FiniteMeasure { weights }
    }

    /// Builds a measure from `(index, weight)` pairs. Weights of equal index
    /// accumulate. Negative totals are rejected; zero totals are pruned.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut m = FiniteMeasure::zero();
        for (j, w) in entries {
            m.add_weight(j, &w);
        }
        if let Some((&j, _)) = m.weights.iter().find(|(_, w)| w.is_negative()) {
            return Err(Error::Parameter(format!("negative weight at index {j}")));
        }
        m.prune();
        Ok(m)
    }

    fn prune(&mut self) {
        self.weights.retain(|_, w| !w.is_zero());
    }

    /// Adds `w` to the weight at `j` without sign checks; used internally by
    /// the bilinear extension where partial sums are always non-negative.
    fn add_weight(&mut self, j: usize, w: &Rational) {
        if w.is_zero() {
            return;
        }
        let entry = self.weights.entry(j).or_insert_with(Rational::zero);
        *entry = &*entry + w;
        if entry.is_zero() {
            self.weights.remove(&j);
        }
    }

    /// Weight at `j`; zero when `j` is outside the support.
    pub fn get(&self, j: usize) -> Rational {
        self.weights.get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn contains(&self, j: usize) -> bool {
        self.weights.contains_key(&j)
    }

    /// Support in increasing index order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.weights.iter().map(|(&j, w)| (j, w))
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass(&self) -> Rational {
        self.weights.values().sum()
    }

    pub fn is_probability(&self) -> bool {
        self.mass().is_one()
    }

    /// Dirac test: `Some(j)` when the measure is exactly `δ_j`.
    pub fn as_point_mass(&self) -> Option<usize> {
        if self.weights.len() == 1 {
            let (&j, w) = self.weights.iter().next().unwrap();
            if w.is_one() {
                return Some(j);
            }
        }
        None
    }

    /// Non-Dirac means the support has at least two points.
    pub fn is_non_dirac(&self) -> bool {
        self.weights.len() >= 2
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return FiniteMeasure::zero();
        }
        FiniteMeasure {
            weights: self.weights.iter().map(|(&j, w)| (j, w * c)).collect(),
        }
    }

    /// `self += c·other`, combining weights exactly.
    pub fn add_scaled(&mut self, other: &FiniteMeasure, c: &Rational) {
        if c.is_zero() {
            return;
        }
        if c.is_one() {
            for (j, w) in other.iter() {
                self.add_weight(j, w);
            }
        } else {
            for (j, w) in other.iter() {
                self.add_weight(j, &(w * c));
            }
        }
    }

    /// Pushforward under an index map.
    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut out = FiniteMeasure::zero();
        for (j, w) in self.iter() {
            out.add_weight(f(j), w);
        }
        out
    }

    pub fn add(&self, other: &FiniteMeasure) -> Self {
        let mut out = self.clone();
        for (j, w) in other.iter() {
            out.add_weight(j, w);
        }
        out
    }

    /// Integrates a function given as a dense table of values over indices:
    /// `Σ_j μ(j)·f(j)`. Indices outside `values` are an error.
    pub fn integrate(&self, values: &[Rational]) -> Result<Rational> {
        let mut total = Rational::zero();
        for (j, w) in self.iter() {
            let v = values
                .get(j)
                .ok_or_else(|| Error::Parameter(format!("no function value at index {j}")))?;
            total = total + w * v;
        }
        Ok(total)
    }
}

/// Extends a point-pair kernel bilinearly to a pair of measures:
/// `Σ_{m,n} μ(m)·ν(n)·kernel(m,n)`, all weights combined exactly.
///
/// The kernel reports `Err` for pairs it is not defined on (products that
/// left a truncation window); the offending pair is propagated so callers
/// can record the overflow.
pub fn bilinear_extend<K>(mu: &FiniteMeasure, nu: &FiniteMeasure, mut kernel: K) -> Result<FiniteMeasure>
where
    K: FnMut(usize, usize) -> Result<FiniteMeasure>,
{
    let mut out = FiniteMeasure::zero();
    for (m, wm) in mu.iter() {
        for (n, wn) in nu.iter() {
            let k = kernel(m, n)?;
            let c = wm * wn;
            if c.is_one() {
                for (j, w) in k.iter() {
                    out.add_weight(j, w);
                }
            } else {
                for (j, w) in k.iter() {
                    out.add_weight(j, &(w * &c));
                }
            }
        }
    }
    Ok(out)
}

impl fmt::Debug for FiniteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.weights.iter()).finish()
    }
}

impl fmt::Display for FiniteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (j, w)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{j}: {w}")?;
        }
        write!(f, "}}")
    }
}
