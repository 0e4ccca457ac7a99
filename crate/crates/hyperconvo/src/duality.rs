//! Characters and dual hypergroups of max-semigroup deformations.
//!
//! The bounded characters of a deformation with weights `v` form the one
//! point compactification `ℤ_+ ∪ {∞}`: the row at `k` is 1 up to `k`, then
//! `β_k = u_{k+1}/v_{k+1} − 1 ∈ [−1, 0)`, then 0, and the row at `∞` is
//! constantly 1. Under pointwise multiplication the characters again form a
//! hermitian hypergroup: products of distinct characters collapse to the
//! smaller index, while the square at `m` is `Σ_j γ_j^m δ_{χ_j}` with
//! coefficients computed here by two independent routes — the telescoping
//! closed form and forward substitution on the evaluation system's
//! lower-triangular matrix. Truncations are exact: the omitted mass is the
//! rational `−γ_{m+P}·β_{m+P}`, never an estimate.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::axioms::PairWitness;
use crate::deformation::{ConvolutionStructure, VSequence, WindowSemantics};
use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::rational::Rational;
use crate::semigroup::SemigroupTable;

/// A point of the dual: a finite character index or the point at infinity.
/// The point at infinity is a distinguished symbolic value, never a numeric
/// sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualPoint {
    Finite(usize),
    Infinity,
}

impl fmt::Display for DualPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualPoint::Finite(k) => write!(f, "{k}"),
            DualPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for DualPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(DualPoint::Infinity),
            other => other
                .parse::<usize>()
                .map(DualPoint::Finite)
                .map_err(|_| Error::Parameter(format!("not a dual point: {s:?}"))),
        }
    }
}

/// `β_k = −(v_0 + … + v_k)/v_{k+1}`, always in `[−1, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct BetaSequence {
    values: Vec<Rational>,
}

impl BetaSequence {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        for (k, b) in values.iter().enumerate() {
            if b < &Rational::from_int(-1) || !b.is_negative() {
                return Err(Error::invalid(
                    format!("/beta/{k}"),
                    format!("β_{k} = {b} is outside [-1, 0)"),
                ));
            }
        }
        Ok(BetaSequence { values })
    }

    /// Derives β from the weights; equals `q_{k+1}(k+1) − 1`.
    pub fn from_v(v: &VSequence) -> Self {
        let mut values = Vec::with_capacity(v.len().saturating_sub(1));
        let mut prefix = Rational::zero();
        for k in 0..v.last_index() {
            prefix = prefix + v.v(k);
            values.push(-(&prefix / v.v(k + 1)));
        }
        BetaSequence { values }
    }

    /// Reads β off the diagonal measures of a finite max-deformation window:
    /// `β_k = (δ_{k+1}*δ_{k+1})(k+1) − 1`. The structure must actually be a
    /// deformation of the ascending max chain — identity at 0, off-diagonal
    /// convolutions collapsing to the larger index, diagonal supports
    /// reaching the identity and staying below their level.
    pub fn from_structure(k: &ConvolutionStructure) -> Result<Self> {
        if k.identity() != 0 {
            return Err(Error::Unsupported(
                "not a max-deformation window: identity is not the least element".into(),
            ));
        }
        for m in 0..k.len() {
            for n in 0..k.len() {
                if m == n {
                    continue;
                }
                if k.kernel(m, n)?.as_point_mass() != Some(m.max(n)) {
                    return Err(Error::Unsupported(format!(
                        "not a max-deformation window: δ_{m}*δ_{n} is not the point mass at {}",
                        m.max(n)
                    )));
                }
            }
        }
        let mut values = Vec::new();
        for n in 1..k.len() {
            let q = k.kernel(n, n)?;
            if !q.contains(0) || q.support().any(|j| j > n) {
                return Err(Error::Unsupported(format!(
                    "not a max-deformation window: spt(δ_{n}*δ_{n}) must contain 0 and stay below {n}"
                )));
            }
            values.push(q.get(n) - Rational::one());
        }
        BetaSequence::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn beta(&self, k: usize) -> &Rational {
        &self.values[k]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `χ_k(n)` for a dual point `k` and a base point `n`.
    pub fn chi(&self, k: DualPoint, n: usize) -> Rational {
        match k {
            DualPoint::Infinity => Rational::one(),
            DualPoint::Finite(k) => {
                if n <= k {
                    Rational::one()
                } else if n == k + 1 {
                    self.values[k].clone()
                } else {
                    Rational::zero()
                }
            }
        }
    }
}

/// Character table of a deformation window: one row per finite character
/// `χ_0, …, χ_{N−1}` plus the constant row `χ_∞`, over points `0..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterTable {
    points: usize,
    rows: Vec<Vec<Rational>>,
    infinity_row: Vec<Rational>,
}

impl CharacterTable {
    /// Number of columns (base points).
    pub fn points(&self) -> usize {
        self.points
    }

    /// Number of finite rows.
    pub fn finite_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, k: DualPoint) -> &[Rational] {
        match k {
            DualPoint::Finite(k) => &self.rows[k],
            DualPoint::Infinity => &self.infinity_row,
        }
    }

    /// All rows, finite ones first.
    pub fn iter_rows(&self) -> impl Iterator<Item = (DualPoint, &[Rational])> {
        self.rows
            .iter()
            .enumerate()
            .map(|(k, r)| (DualPoint::Finite(k), r.as_slice()))
            .chain(std::iter::once((
                DualPoint::Infinity,
                self.infinity_row.as_slice(),
            )))
    }
}

/// Builds the table from the weights: row `k` is
/// `(1, …, 1, β_k, 0, …)` with the `β_k` at point `k+1`.
pub fn character_table(v: &VSequence) -> CharacterTable {
    let n_points = v.len();
    let beta = BetaSequence::from_v(v);
    let rows = (0..v.last_index())
        .map(|k| {
            (0..n_points)
                .map(|n| beta.chi(DualPoint::Finite(k), n))
                .collect()
        })
        .collect();
    CharacterTable {
        points: n_points,
        rows,
        infinity_row: vec![Rational::one(); n_points],
    }
}

/// Result of checking one character row against a structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterCheck {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PairWitness>,
    pub pairs_checked: u64,
    pub pairs_skipped: u64,
}

/// Verifies `χ(m*n) = χ(m)·χ(n)` exactly for every in-window pair, where
/// `χ(m*n)` integrates the row values against the kernel. Pairs needing a
/// kernel value or a character value outside the window are skipped and
/// counted.
pub fn verify_character(
    chi: &[Rational],
    k: &ConvolutionStructure,
    window: usize,
) -> CharacterCheck {
    let dom: Vec<usize> = k
        .elements()
        .filter(|&i| i <= window && i < chi.len())
        .collect();
    let mut pairs_checked = 0;
    let mut pairs_skipped = 0;
    let mut witness = None;
    'outer: for &m in &dom {
        for &n in &dom {
            let Some(q) = k.kernel_opt(m, n) else {
                pairs_skipped += 1;
                continue;
            };
            let Ok(lhs) = q.integrate(chi) else {
                pairs_skipped += 1;
                continue;
            };
            pairs_checked += 1;
            if lhs != &chi[m] * &chi[n] {
                witness = Some(PairWitness { m, n });
                break 'outer;
            }
        }
    }
    CharacterCheck {
        pass: witness.is_none(),
        witness,
        pairs_checked,
        pairs_skipped,
    }
}

/// Finds every character of a finite deformation window by enumeration,
/// independently of the β formulas: a non-constant multiplicative function
/// is 1 up to some cutoff `c`, takes a root of
/// `x² − q_c(c)·x − (1 − q_c(c)) = 0` at `c`, and vanishes beyond; each
/// candidate of that shape (and the constant row) is kept exactly when the
/// full multiplicativity scan over all pairs passes. Returns the vectors
/// sorted lexicographically.
pub fn enumerate_characters_bruteforce(k: &ConvolutionStructure) -> Result<Vec<Vec<Rational>>> {
    let size = k.len();
    if size > 12 {
        return Err(Error::Parameter(format!(
            "brute-force character enumeration is capped at 12 elements, got {size}"
        )));
    }
    let mut candidates: Vec<Vec<Rational>> = vec![vec![Rational::one(); size]];
    for c in 1..size {
        let qc = k.kernel(c, c)?;
        let diag = qc.get(c);
        for x in [Rational::one(), &diag - &Rational::one()] {
            let mut row = vec![Rational::zero(); size];
            for (n, entry) in row.iter_mut().enumerate() {
                *entry = match n.cmp(&c) {
                    std::cmp::Ordering::Less => Rational::one(),
                    std::cmp::Ordering::Equal => x.clone(),
                    std::cmp::Ordering::Greater => Rational::zero(),
                };
            }
            if !candidates.contains(&row) {
                candidates.push(row);
            }
        }
    }
    let mut found: Vec<Vec<Rational>> = candidates
        .into_iter()
        .filter(|row| verify_character(row, k, size - 1).pass)
        .collect();
    found.sort();
    found.dedup();
    Ok(found)
}

/// A probability measure on the dual, truncated exactly: the retained
/// coefficients, the exact mass of the omitted finite indices, and the atom
/// at infinity (always 0 for diagonal duals, recorded explicitly).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualMeasure {
    /// Retained coefficients `γ_j`, zero entries pruned.
    pub gamma: BTreeMap<usize, Rational>,
    /// Exact total weight of the truncated indices.
    pub tail_mass: Rational,
    /// `γ_∞`.
    pub infinity_mass: Rational,
    /// For a diagonal dual `δ_{χ_m}*δ_{χ_m}`: the retained index range
    /// `(m, m+P)`; `None` for point masses.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<(usize, usize)>,
    /// For diagonal duals: whether the atom at the base index `m` itself is
    /// present (`γ_m^m > 0`, the deformed square keeps its own point).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_atom: Option<bool>,
}

impl DualMeasure {
    fn point(j: DualPoint) -> Self {
        match j {
            DualPoint::Finite(j) => DualMeasure {
                gamma: BTreeMap::from([(j, Rational::one())]),
                tail_mass: Rational::zero(),
                infinity_mass: Rational::zero(),
                range: None,
                self_atom: None,
            },
            DualPoint::Infinity => DualMeasure {
                gamma: BTreeMap::new(),
                tail_mass: Rational::zero(),
                infinity_mass: Rational::one(),
                range: None,
                self_atom: None,
            },
        }
    }

    /// Sum of the retained coefficients.
    pub fn retained_mass(&self) -> Rational {
        self.gamma.values().sum()
    }

    /// Retained + tail + infinity; exactly 1 for every measure produced here.
    pub fn total_mass(&self) -> Rational {
        self.retained_mass() + &self.tail_mass + &self.infinity_mass
    }

    pub fn gamma_at(&self, j: usize) -> Rational {
        self.gamma.get(&j).cloned().unwrap_or_else(Rational::zero)
    }
}

fn diagonal_range_check(m: usize, trunc: usize, beta: &BetaSequence) -> Result<()> {
    if m + trunc >= beta.len() {
        return Err(Error::Parameter(format!(
            "truncation needs β up to index {}, but only {} values are available",
            m + trunc,
            beta.len()
        )));
    }
    Ok(())
}

/// Dual convolution by the closed form. Distinct indices collapse to the
/// point mass at the minimum (`δ_∞` is the identity); the diagonal at a
/// finite `m` retains `γ_m, …, γ_{m+P}` with
///
/// ```text
/// γ_m = 1 + β_m,    γ_{m+p} = Π_{j=m}^{m+p−1} (−β_j)/(1−β_{j+1}),
/// ```
///
/// and exact tail mass `−γ_{m+P}·β_{m+P}`.
pub fn dual_convolution_closed(
    m: DualPoint,
    n: DualPoint,
    beta: &BetaSequence,
    trunc: usize,
) -> Result<DualMeasure> {
    let m_idx = match (m, n) {
        (DualPoint::Infinity, DualPoint::Infinity) => {
            return Ok(DualMeasure::point(DualPoint::Infinity))
        }
        (DualPoint::Finite(a), DualPoint::Infinity)
        | (DualPoint::Infinity, DualPoint::Finite(a)) => {
            return Ok(DualMeasure::point(DualPoint::Finite(a)))
        }
        (DualPoint::Finite(a), DualPoint::Finite(b)) if a != b => {
            return Ok(DualMeasure::point(DualPoint::Finite(a.min(b))))
        }
        (DualPoint::Finite(a), DualPoint::Finite(_)) => a,
    };
    diagonal_range_check(m_idx, trunc, beta)?;

    let one = Rational::one();
    let gamma_m = &one + beta.beta(m_idx);
    let mut gamma = BTreeMap::new();
    if !gamma_m.is_zero() {
        gamma.insert(m_idx, gamma_m.clone());
    }
    let mut prod = one.clone();
    let mut last = gamma_m.clone();
    for p in 1..=trunc {
        let j = m_idx + p - 1;
        prod = prod * (-beta.beta(j)) / (&one - beta.beta(j + 1));
        last = prod.clone();
        if !prod.is_zero() {
            gamma.insert(m_idx + p, prod.clone());
        }
    }
    let tail_mass = -(&last * beta.beta(m_idx + trunc));
    Ok(DualMeasure {
        gamma,
        tail_mass,
        infinity_mass: Rational::zero(),
        range: Some((m_idx, m_idx + trunc)),
        self_atom: Some(!gamma_m.is_zero()),
    })
}

/// Dual convolution of `δ_{χ_m}` with itself by forward substitution on the
/// evaluation system: lower-triangular with diagonal `1 − β_{m+i}`, unit
/// entries below, and right-hand side `(1 − β_m², 1, 1, …)`. Independent
/// oracle for [`dual_convolution_closed`]; the tail here is `1 − Σ γ`.
pub fn dual_convolution_solve(
    m: usize,
    beta: &BetaSequence,
    trunc: usize,
) -> Result<DualMeasure> {
    diagonal_range_check(m, trunc, beta)?;
    let one = Rational::one();
    let mut gamma = BTreeMap::new();
    let mut prefix = Rational::zero();
    let mut first_positive = false;
    for i in 0..=trunc {
        let rhs = if i == 0 {
            &one - &(beta.beta(m) * beta.beta(m))
        } else {
            one.clone()
        };
        let x = (rhs - &prefix) / (&one - beta.beta(m + i));
        if i == 0 {
            first_positive = !x.is_zero();
        }
        prefix = prefix + &x;
        if !x.is_zero() {
            gamma.insert(m + i, x);
        }
    }
    Ok(DualMeasure {
        gamma,
        tail_mass: &one - &prefix,
        infinity_mass: Rational::zero(),
        range: Some((m, m + trunc)),
        self_atom: Some(first_positive),
    })
}

/// Checks the defining property of the dual convolution against the
/// character values: `χ_m(t)·χ_n(t) = Σ_j γ_j·χ_j(t) + γ_∞` for every
/// `t = 1, …, t_max`, reduced through the eventually-1 structure to the
/// finite exact sum `χ_m(t)χ_n(t) − 1 = Σ_{j<t} γ_j·(χ_j(t) − 1)`.
pub fn verify_dual_transport(
    mu: &DualMeasure,
    m: DualPoint,
    n: DualPoint,
    beta: &BetaSequence,
    t_max: usize,
) -> Result<crate::axioms::Check<usize>> {
    if let Some((_, upto)) = mu.range {
        if t_max > upto + 1 {
            return Err(Error::Parameter(format!(
                "transport check needs retained coefficients below t = {t_max}, \
                 but the truncation stops at {upto}"
            )));
        }
    }
    if t_max > beta.len() {
        return Err(Error::Parameter(format!(
            "transport check at t = {t_max} needs β up to {}, have {}",
            t_max - 1,
            beta.len()
        )));
    }
    for t in 1..=t_max {
        let lhs = beta.chi(m, t) * beta.chi(n, t) - Rational::one();
        let mut rhs = Rational::zero();
        for (&j, g) in mu.gamma.range(..t) {
            rhs = rhs + g * &(beta.chi(DualPoint::Finite(j), t) - Rational::one());
        }
        if lhs != rhs {
            return Ok(crate::axioms::Check::Fail { witness: t });
        }
    }
    Ok(crate::axioms::Check::Pass)
}

/// The double dual table: row `n` lists `ξ_n(k) = χ_k(n)` over the finite
/// dual points `k`; at the point at infinity every `ξ_n` equals 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleDualTable {
    rows: Vec<Vec<Rational>>,
}

impl DoubleDualTable {
    /// Rows `ξ_0, …, ξ_N` over columns `k = 0, …, N−1`.
    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn value(&self, n: usize, k: DualPoint) -> Rational {
        match k {
            DualPoint::Infinity => Rational::one(),
            DualPoint::Finite(k) => self.rows[n][k].clone(),
        }
    }
}

/// Evaluation functionals of the base points on the dual, by the case
/// formula: `ξ_0 ≡ 1`; `ξ_n` vanishes below `k = n−1`, takes `β_{n−1}`
/// there, and is 1 from `k = n` on.
pub fn double_dual_table(beta: &BetaSequence) -> DoubleDualTable {
    let n_dual = beta.len();
    let rows = (0..=n_dual)
        .map(|n| {
            (0..n_dual)
                .map(|k| {
                    if n == 0 {
                        Rational::one()
                    } else if k + 1 < n {
                        Rational::zero()
                    } else if k + 1 == n {
                        beta.beta(n - 1).clone()
                    } else {
                        Rational::one()
                    }
                })
                .collect()
        })
        .collect();
    DoubleDualTable { rows }
}

/// Builds the dual hypergroup of a finite verified deformation window as an
/// explicit structure on its `k` characters: `χ_0, …, χ_{k−2}` and the
/// constant character, which is the dual identity. Every pairwise product
/// of characters is expanded exactly through the evaluation system; the
/// result is validated entrywise and rejected if any coefficient is
/// negative or any evaluation equation fails.
pub fn finite_dual(k: &ConvolutionStructure) -> Result<ConvolutionStructure> {
    let size = k.len();
    if size > 16 {
        return Err(Error::Parameter(format!(
            "finite dual construction is capped at 16 elements, got {size}"
        )));
    }
    if size < 2 {
        return Err(Error::Parameter("finite dual needs at least 2 elements".into()));
    }
    let beta = BetaSequence::from_structure(k)?;
    let one = Rational::one();

    // character vectors over base points 0..size−1; dual index size−1 is
    // the constant character
    let chi_row = |d: usize| -> Vec<Rational> {
        (0..size)
            .map(|t| {
                if d == size - 1 || t <= d {
                    one.clone()
                } else if t == d + 1 {
                    beta.beta(d).clone()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    };
    let characters: Vec<Vec<Rational>> = (0..size).map(chi_row).collect();

    let solve_pair = |i: usize, j: usize| -> Result<FiniteMeasure> {
        let prod: Vec<Rational> = (0..size)
            .map(|t| &characters[i][t] * &characters[j][t])
            .collect();
        // forward substitution over rows t = 1..size−1
        let mut gamma = vec![Rational::zero(); size];
        let mut prefix = Rational::zero();
        for t in 1..size {
            let x = (&prod[t] - &one + &prefix) / (beta.beta(t - 1) - &one);
            prefix = prefix + &x;
            gamma[t - 1] = x;
        }
        gamma[size - 1] = &one - &prefix;
        for (d, g) in gamma.iter().enumerate() {
            if g.is_negative() {
                return Err(Error::Unsupported(format!(
                    "dual evaluation system inconsistent at pair ({i}, {j}): \
                     coefficient γ_{d} = {g} is negative; \
                     the structure is not a valid deformation"
                )));
            }
        }
        // re-verify every evaluation equation, including total mass at t = 0
        for t in 0..size {
            let total: Rational = (0..size)
                .map(|d| &gamma[d] * &characters[d][t])
                .sum();
            if total != prod[t] {
                return Err(Error::Unsupported(format!(
                    "dual evaluation system inconsistent at pair ({i}, {j}), point {t}"
                )));
            }
        }
        FiniteMeasure::from_entries(gamma.into_iter().enumerate())
    };

    let kernel = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| solve_pair(i, j).map(Some))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut names: Vec<String> = (0..size - 1).map(|d| format!("chi{d}")).collect();
    names.push("one".into());
    // base: product of distinct characters collapses to the smaller index,
    // with the constant character as identity
    let top = size - 1;
    let table: Vec<Vec<usize>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    if i == top {
                        j
                    } else if j == top {
                        i
                    } else {
                        i.min(j)
                    }
                })
                .collect()
        })
        .collect();
    let base = SemigroupTable::new(names.clone(), top, table, None)?;
    Ok(ConvolutionStructure::from_parts(
        names,
        top,
        kernel,
        Some(base),
        WindowSemantics::Complete,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{haar, verify_hypergroup, Check};
    use crate::deformation::{build_dunkl_ramirez, build_max_deformation};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn v(vals: &[(i64, i64)]) -> VSequence {
        VSequence::new(vals.iter().map(|&(n, d)| r(n, d)).collect()).unwrap()
    }

    fn dr_beta(a: (i64, i64), len: usize) -> BetaSequence {
        BetaSequence::from_v(&VSequence::dunkl_ramirez(&r(a.0, a.1), len).unwrap())
    }

    #[test]
    fn beta_values() {
        // Dunkl–Ramirez: β_k = −a/(1−a) for every k
        let beta = dr_beta((1, 3), 6);
        for k in 0..beta.len() {
            assert_eq!(beta.beta(k), &r(-1, 2));
        }
        // u ≡ 0: β ≡ −1
        let beta = dr_beta((1, 2), 6);
        for k in 0..beta.len() {
            assert_eq!(beta.beta(k), &r(-1, 1));
        }
        // v = (1,2,3,6) → β = (−1/2, −1, −1)
        let beta = BetaSequence::from_v(&v(&[(1, 1), (2, 1), (3, 1), (6, 1)]));
        assert_eq!(beta.values(), &[r(-1, 2), r(-1, 1), r(-1, 1)]);
    }

    #[test]
    fn beta_from_structure_matches_from_v() {
        let vs = VSequence::dunkl_ramirez(&r(1, 3), 6).unwrap();
        let k = build_max_deformation(&vs).unwrap();
        assert_eq!(
            BetaSequence::from_structure(&k).unwrap(),
            BetaSequence::from_v(&vs)
        );
    }

    #[test]
    fn character_table_shape() {
        let vs = VSequence::dunkl_ramirez(&r(1, 3), 4).unwrap();
        let table = character_table(&vs);
        assert_eq!(table.points(), 5);
        assert_eq!(table.finite_rows(), 4);
        // χ_0 = (1, β_0, 0, 0, 0)
        assert_eq!(
            table.row(DualPoint::Finite(0)),
            &[r(1, 1), r(-1, 2), r(0, 1), r(0, 1), r(0, 1)]
        );
        // χ_1 = (1, 1, −1/2, 0, 0)
        assert_eq!(
            table.row(DualPoint::Finite(1)),
            &[r(1, 1), r(1, 1), r(-1, 2), r(0, 1), r(0, 1)]
        );
        assert!(table
            .row(DualPoint::Infinity)
            .iter()
            .all(|x| x.is_one()));
        // rows pairwise distinct
        let rows: Vec<_> = table.iter_rows().map(|(_, r)| r.to_vec()).collect();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                assert_ne!(rows[i], rows[j]);
            }
        }
    }

    #[test]
    fn all_rows_are_characters() {
        let vs = VSequence::dunkl_ramirez(&r(1, 3), 8).unwrap();
        let k = build_max_deformation(&vs).unwrap();
        let table = character_table(&vs);
        for (_, row) in table.iter_rows() {
            let check = verify_character(row, &k, 8);
            assert!(check.pass, "row {row:?}");
            assert_eq!(check.pairs_skipped, 0);
        }
    }

    #[test]
    fn broken_row_fails_at_the_quadratic() {
        let vs = VSequence::dunkl_ramirez(&r(1, 3), 4).unwrap();
        let k = build_max_deformation(&vs).unwrap();
        let mut row = character_table(&vs).row(DualPoint::Finite(1)).to_vec();
        row[2] = r(1, 2); // β_1 with the wrong sign
        let check = verify_character(&row, &k, 4);
        assert!(!check.pass);
        assert_eq!(check.witness, Some(PairWitness { m: 2, n: 2 }));
    }

    #[test]
    fn constant_function_is_always_a_character() {
        let k = build_dunkl_ramirez(&r(1, 5), 6).unwrap();
        let row = vec![Rational::one(); 7];
        assert!(verify_character(&row, &k, 6).pass);
    }

    #[test]
    fn bruteforce_enumeration_matches_table() {
        // ℤ_3 with v = (1,1,2): characters (1,1,1), (1,1,−1), (1,−1,0)
        let vs = v(&[(1, 1), (1, 1), (2, 1)]);
        let k = build_max_deformation(&vs).unwrap();
        let found = enumerate_characters_bruteforce(&k).unwrap();
        let mut expected = vec![
            vec![r(1, 1), r(1, 1), r(1, 1)],
            vec![r(1, 1), r(1, 1), r(-1, 1)],
            vec![r(1, 1), r(-1, 1), r(0, 1)],
        ];
        expected.sort();
        assert_eq!(found, expected);

        // ℤ_2 with v = (1,1)
        let vs = v(&[(1, 1), (1, 1)]);
        let k = build_max_deformation(&vs).unwrap();
        let found = enumerate_characters_bruteforce(&k).unwrap();
        let mut expected = vec![vec![r(1, 1), r(1, 1)], vec![r(1, 1), r(-1, 1)]];
        expected.sort();
        assert_eq!(found, expected);

        // ℤ_1: only the trivial character
        let vs = v(&[(1, 1)]);
        let k = build_max_deformation(&vs).unwrap();
        assert_eq!(
            enumerate_characters_bruteforce(&k).unwrap(),
            vec![vec![r(1, 1)]]
        );
    }

    #[test]
    fn dual_minimum_rule() {
        let beta = dr_beta((1, 3), 12);
        let mu = dual_convolution_closed(
            DualPoint::Finite(2),
            DualPoint::Finite(5),
            &beta,
            4,
        )
        .unwrap();
        assert_eq!(mu.gamma_at(2), Rational::one());
        assert_eq!(mu.total_mass(), Rational::one());
        assert!(mu.tail_mass.is_zero());

        let mu = dual_convolution_closed(DualPoint::Infinity, DualPoint::Finite(3), &beta, 4)
            .unwrap();
        assert_eq!(mu.gamma_at(3), Rational::one());

        let mu = dual_convolution_closed(DualPoint::Infinity, DualPoint::Infinity, &beta, 4)
            .unwrap();
        assert_eq!(mu.infinity_mass, Rational::one());
        assert!(mu.gamma.is_empty());
    }

    #[test]
    fn dual_diagonal_closed_form_at_a_third() {
        let beta = dr_beta((1, 3), 20);
        let m = 2;
        let p_max = 8;
        let mu =
            dual_convolution_closed(DualPoint::Finite(m), DualPoint::Finite(m), &beta, p_max)
                .unwrap();
        assert_eq!(mu.gamma_at(m), r(1, 2));
        for p in 1..=p_max {
            assert_eq!(mu.gamma_at(m + p), r(1, 3).pow(p as i32));
        }
        assert_eq!(mu.self_atom, Some(true));
        assert_eq!(mu.total_mass(), Rational::one());
        // tail = −γ_{m+P}·β_{m+P} = 3^{−P}/2
        assert_eq!(mu.tail_mass, r(1, 2) * r(1, 3).pow(p_max as i32));
    }

    #[test]
    fn dual_diagonal_at_a_half_drops_self_atom() {
        let beta = dr_beta((1, 2), 20);
        let mu = dual_convolution_closed(DualPoint::Finite(0), DualPoint::Finite(0), &beta, 8)
            .unwrap();
        assert_eq!(mu.self_atom, Some(false));
        assert!(!mu.gamma.contains_key(&0));
        for p in 1..=8 {
            assert_eq!(mu.gamma_at(p), r(1, 2).pow(p as i32));
        }
        assert_eq!(mu.tail_mass, r(1, 2).pow(8));
        assert_eq!(mu.total_mass(), Rational::one());
    }

    #[test]
    fn solve_route_matches_closed_form() {
        let vs = v(&[(1, 1), (3, 2), (4, 1), (8, 1), (17, 1), (33, 1), (100, 1)]);
        let beta = BetaSequence::from_v(&vs);
        for m in 0..3 {
            let closed =
                dual_convolution_closed(DualPoint::Finite(m), DualPoint::Finite(m), &beta, 3)
                    .unwrap();
            let solved = dual_convolution_solve(m, &beta, 3).unwrap();
            assert_eq!(closed.gamma, solved.gamma);
            assert_eq!(closed.tail_mass, solved.tail_mass);
            assert_eq!(closed.self_atom, solved.self_atom);
        }
    }

    #[test]
    fn first_solve_row_gives_one_plus_beta() {
        let beta = dr_beta((1, 5), 10);
        let mu = dual_convolution_solve(2, &beta, 4).unwrap();
        let expected = Rational::one() + beta.beta(2);
        assert_eq!(mu.gamma_at(2), expected);
        // nothing below the base index
        assert!(mu.gamma.range(..2).next().is_none());
    }

    #[test]
    fn transport_holds_for_dual_measures() {
        let beta = dr_beta((1, 3), 24);
        for m in 0..4usize {
            let mu =
                dual_convolution_closed(DualPoint::Finite(m), DualPoint::Finite(m), &beta, 16)
                    .unwrap();
            let check = verify_dual_transport(
                &mu,
                DualPoint::Finite(m),
                DualPoint::Finite(m),
                &beta,
                m + 17,
            )
            .unwrap();
            assert_eq!(check, Check::Pass);
        }
        let mu = dual_convolution_closed(DualPoint::Finite(1), DualPoint::Finite(4), &beta, 8)
            .unwrap();
        let check =
            verify_dual_transport(&mu, DualPoint::Finite(1), DualPoint::Finite(4), &beta, 20)
                .unwrap();
        assert_eq!(check, Check::Pass);
    }

    #[test]
    fn ratio_identity_between_levels() {
        let vs = v(&[(1, 1), (2, 1), (5, 1), (11, 1), (25, 1), (60, 1), (130, 1)]);
        let beta = BetaSequence::from_v(&vs);
        let mu0 = dual_convolution_closed(DualPoint::Finite(0), DualPoint::Finite(0), &beta, 5)
            .unwrap();
        for m in 1..3usize {
            let mum =
                dual_convolution_closed(DualPoint::Finite(m), DualPoint::Finite(m), &beta, 2)
                    .unwrap();
            let gm0 = mu0.gamma_at(m);
            assert!(gm0.is_positive());
            for j in m + 1..=m + 2 {
                assert_eq!(mum.gamma_at(j), mu0.gamma_at(j) / gm0.clone());
            }
        }
    }

    #[test]
    fn double_dual_is_the_transpose() {
        let vs = VSequence::dunkl_ramirez(&r(1, 3), 6).unwrap();
        let beta = BetaSequence::from_v(&vs);
        let chars = character_table(&vs);
        let double = double_dual_table(&beta);
        for n in 0..=6usize {
            for k in 0..6usize {
                assert_eq!(
                    double.value(n, DualPoint::Finite(k)),
                    chars.row(DualPoint::Finite(k))[n]
                );
            }
            assert_eq!(double.value(n, DualPoint::Infinity), Rational::one());
        }
        // ξ_0 ≡ 1
        assert!(double.rows()[0].iter().all(|x| x.is_one()));
        // a = 1/3: ξ_2 = (0, −1/2, 1, 1, …)
        assert_eq!(double.rows()[2][0], Rational::zero());
        assert_eq!(double.rows()[2][1], r(-1, 2));
        assert!(double.rows()[2][2..].iter().all(|x| x.is_one()));
        // injectivity
        for i in 0..double.rows().len() {
            for j in i + 1..double.rows().len() {
                assert_ne!(double.rows()[i], double.rows()[j]);
            }
        }
    }

    #[test]
    fn finite_dual_of_z3() {
        let vs = v(&[(1, 1), (1, 1), (2, 1)]);
        let k = build_max_deformation(&vs).unwrap();
        let dual = finite_dual(&k).unwrap();
        assert_eq!(dual.len(), 3);
        assert_eq!(dual.identity(), 2);

        // min rule: δ_{χ_0} * δ_{χ_1} = δ_{χ_0}
        assert_eq!(
            *dual.kernel(0, 1).unwrap(),
            FiniteMeasure::point_mass(0)
        );
        // δ_{χ_0} * δ_{χ_0} = 1/2 δ_{χ_1} + 1/2 δ_{one}
        assert_eq!(
            *dual.kernel(0, 0).unwrap(),
            FiniteMeasure::from_entries([(1, r(1, 2)), (2, r(1, 2))]).unwrap()
        );
        // identity acts trivially
        assert_eq!(*dual.kernel(2, 1).unwrap(), FiniteMeasure::point_mass(1));

        let report = verify_hypergroup(&dual, 2);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn finite_dual_verifies_on_larger_windows() {
        let vs = VSequence::dunkl_ramirez(&r(1, 3), 5).unwrap();
        let k = build_max_deformation(&vs).unwrap();
        let dual = finite_dual(&k).unwrap();
        let report = verify_hypergroup(&dual, dual.len() - 1);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn character_orthogonality_under_haar_on_finite_windows() {
        let vs = VSequence::dunkl_ramirez(&r(1, 3), 5).unwrap();
        let k = build_max_deformation(&vs).unwrap();
        let lambda = haar(&k).unwrap();
        let size = k.len();
        let beta = BetaSequence::from_structure(&k).unwrap();
        let chi = |d: usize, t: usize| -> Rational {
            if d == size - 1 {
                Rational::one()
            } else {
                beta.chi(DualPoint::Finite(d), t)
            }
        };
        for i in 0..size {
            for j in 0..size {
                if i == j {
                    continue;
                }
                let total: Rational = (0..size)
                    .map(|t| lambda.get(t).unwrap() * &chi(i, t) * &chi(j, t))
                    .sum();
                assert!(total.is_zero(), "rows {i} and {j} not orthogonal");
            }
        }
    }

    #[test]
    fn finite_dual_rejects_structures_off_the_max_chain() {
        let base =
            crate::semigroup::build_named_example("maxsum", &[3, 4]).unwrap();
        let v2 = VSequence::dunkl_ramirez(&r(1, 3), 2).unwrap();
        let k = crate::deformation::build_general_deformation(base, &v2).unwrap();
        let err = finite_dual(&k).unwrap_err();
        assert!(matches!(
            err,
            crate::error::Error::Unsupported(_) | crate::error::Error::OutOfWindow { .. }
        ));

        // a sentinel-free non-max structure is caught by the shape check
        // (the cyclic group of order 3: 1·2 = 0 is not the max)
        let z3 = crate::semigroup::SemigroupTable::new(
            vec!["0".into(), "1".into(), "2".into()],
            0,
            vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
            None,
        )
        .unwrap();
        let spec = crate::deformation::DeformationSpec::new(z3, Default::default());
        let k = ConvolutionStructure::from_deformation_spec(&spec).unwrap();
        let err = finite_dual(&k).unwrap_err();
        assert!(matches!(err, crate::error::Error::Unsupported(_)), "{err:?}");
    }

    #[test]
    fn truncation_needs_enough_beta() {
        let beta = dr_beta((1, 3), 4);
        assert!(dual_convolution_closed(
            DualPoint::Finite(2),
            DualPoint::Finite(2),
            &beta,
            4
        )
        .is_err());
        assert!(dual_convolution_solve(2, &beta, 4).is_err());
    }

    #[test]
    fn dual_point_parsing() {
        assert_eq!("7".parse::<DualPoint>().unwrap(), DualPoint::Finite(7));
        assert_eq!("inf".parse::<DualPoint>().unwrap(), DualPoint::Infinity);
        assert!("x".parse::<DualPoint>().is_err());
    }
}
