//! Deformations of the idempotent diagonal.
//!
//! A candidate convolution keeps `δ_m * δ_n = δ_{m·n}` everywhere except on
//! the pairs `(n, n)` with `n` a non-identity idempotent, where it is
//! replaced by a probability measure `q_n` whose support contains the
//! identity. On a linearly ordered max semigroup the admissible `q_n` are
//! exactly
//!
//! ```text
//! q_n(m) = v_m / v_n   (m < n),     q_n(n) = u_n / v_n,
//! ```
//!
//! for a weight sequence `v` with `v_0 = 1` and increments
//! `u_n = v_n − Σ_{j<n} v_j ≥ 0`; `v_n` is also the Haar weight of `n`.
//! This module builds such structures (including the Dunkl–Ramirez family
//! `v_n = (1−a)/aⁿ` and, as verifier fixtures, the two Chebyshev polynomial
//! hypergroups), transports them along the idempotent chain of a general
//! commutative monoid, and checks the necessary-and-sufficient conditions
//! for a candidate to be a semiconvo or hermitian hypergroup.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{bilinear_extend, FiniteMeasure};
use crate::rational::Rational;
use crate::semigroup::{build_named_example, classify, idempotent_chain, IdempotentChain, SemigroupTable};

/// Weight sequence `v_0, …, v_N` with `v_0 = 1` and
/// `v_n ≥ Σ_{j<n} v_j` for every `n ≥ 1` (hence `v_n ≥ 1` throughout).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct VSequence {
    values: Vec<Rational>,
}

impl VSequence {
    /// Validates the defining inequalities, naming the first failing index.
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("/values", "v-sequence is empty"));
        }
        if !values[0].is_one() {
            return Err(Error::invalid("/values/0", "v_0 must be 1"));
        }
        let mut prefix = Rational::zero();
        for (n, v) in values.iter().enumerate() {
            if n > 0 && *v < prefix {
                return Err(Error::invalid(
                    format!("/values/{n}"),
                    format!("v_{n} = {v} violates v_{n} ≥ v_0 + … + v_{}", n - 1),
                ));
            }
            prefix = prefix + v;
        }
        Ok(VSequence { values })
    }

    /// The Dunkl–Ramirez weights `v_0 = 1`, `v_n = (1−a)/aⁿ` for
    /// `0 < a ≤ 1/2`.
    pub fn dunkl_ramirez(a: &Rational, last: usize) -> Result<Self> {
        if !a.is_positive() || a > &Rational::new(1, 2) {
            return Err(Error::Parameter(format!(
                "Dunkl–Ramirez parameter must satisfy 0 < a ≤ 1/2, got {a}"
            )));
        }
        let one_minus_a = Rational::one() - a;
        let values = (0..=last)
            .map(|n| {
                if n == 0 {
                    Rational::one()
                } else {
                    &one_minus_a / &a.pow(n as i32)
                }
            })
            .collect();
        VSequence::new(values)
    }

    /// Forward construction of a deformation whose diagonal support drops
    /// the point `n` exactly at the prescribed indices (`u_n = 0` there);
    /// all remaining increments default to 1.
    pub fn with_vanishing_increments(zero_at: &[usize], last: usize) -> Result<Self> {
        let mut u = Vec::with_capacity(last);
        for n in 1..=last {
            u.push(if zero_at.contains(&n) {
                Rational::zero()
            } else {
                Rational::one()
            });
        }
        Ok(v_from_u(&USequence::new(u)?))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest index carried by the sequence.
    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn v(&self, n: usize) -> &Rational {
        &self.values[n]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// Increment sequence `u_1, …, u_N`, each `u_n ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct USequence {
    values: Vec<Rational>,
}

impl USequence {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        for (i, u) in values.iter().enumerate() {
            if u.is_negative() {
                return Err(Error::invalid(
                    format!("/values/{i}"),
                    format!("u_{} = {u} must be non-negative", i + 1),
                ));
            }
        }
        Ok(USequence { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `u_n` for `n ≥ 1`.
    pub fn u(&self, n: usize) -> &Rational {
        &self.values[n - 1]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// `v_0 = 1`, `v_n = (v_0 + … + v_{n−1}) + u_n`.
pub fn v_from_u(u: &USequence) -> VSequence {
    let mut values = vec![Rational::one()];
    let mut prefix = Rational::one();
    for n in 1..=u.len() {
        let v = &prefix + u.u(n);
        prefix = &prefix + &v;
        values.push(v);
    }
    VSequence { values }
}

/// `u_n = v_n − Σ_{j<n} v_j`; total on valid v-sequences.
pub fn u_from_v(v: &VSequence) -> USequence {
    let mut values = Vec::with_capacity(v.len().saturating_sub(1));
    let mut prefix = Rational::zero();
    for n in 0..v.len() {
        if n > 0 {
            values.push(v.v(n) - &prefix);
        }
        prefix = prefix + v.v(n);
    }
    USequence { values }
}

/// A base monoid together with the deformed diagonal: one probability
/// measure `q_n` for each non-identity idempotent `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeformationSpec {
    pub base: SemigroupTable,
    /// `q_n`, keyed by element index.
    pub q: BTreeMap<usize, FiniteMeasure>,
}

impl DeformationSpec {
    /// Raw diagonal data; the shape is validated by the condition checkers,
    /// not here, so intentionally broken specs can be expressed.
    pub fn new(base: SemigroupTable, q: BTreeMap<usize, FiniteMeasure>) -> Self {
        DeformationSpec { base, q }
    }

    /// Transports the weights `v` along the idempotent chain of `base`:
    /// the `q` at the chain element of rank `i` puts mass `v_j/v_i` on the
    /// rank-`j` element for `j < i` and the leftover `u_i/v_i` on itself.
    pub fn from_v(base: SemigroupTable, v: &VSequence) -> Result<Self> {
        let chain = match idempotent_chain(&base) {
            IdempotentChain::Chain { order } => order,
            IdempotentChain::NotMaxMin { m, n } => {
                return Err(Error::Unsupported(format!(
                    "idempotents are not linearly ordered: witness pair ({m}, {n})"
                )))
            }
        };
        if v.len() != chain.len() {
            return Err(Error::Parameter(format!(
                "v-sequence has {} entries but the idempotent chain has {}",
                v.len(),
                chain.len()
            )));
        }
        let u = u_from_v(v);
        let mut q = BTreeMap::new();
        for i in 1..chain.len() {
            let mut entries: Vec<(usize, Rational)> = (0..i)
                .map(|j| (chain[j], v.v(j) / v.v(i)))
                .collect();
            entries.push((chain[i], u.u(i) / v.v(i)));
            q.insert(chain[i], FiniteMeasure::from_entries(entries)?);
        }
        Ok(DeformationSpec { base, q })
    }

    pub fn from_u(base: SemigroupTable, u: &USequence) -> Result<Self> {
        DeformationSpec::from_v(base, &v_from_u(u))
    }
}

/// How truncation limits the kernel of a structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSemantics {
    /// All products stay inside the window; every check on the window is
    /// exact, not an approximation.
    Complete,
    /// Convolutions are defined exactly for pairs with `m + n ≤ cap`.
    AdditiveCap(usize),
    /// Some base-table products fell on the sentinel; checks skip those
    /// pairs and report the quantification domain.
    Truncated,
}

/// A candidate convolution: every pair of elements maps to a finite measure
/// (`None` marks pairs whose product left the window), plus an involution.
///
/// All structures built by this module are hermitian: the involution is the
/// identity permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvolutionStructure {
    element_names: Vec<String>,
    identity: usize,
    kernel: Vec<Vec<Option<FiniteMeasure>>>,
    involution: Vec<usize>,
    base: Option<SemigroupTable>,
    semantics: WindowSemantics,
}

impl ConvolutionStructure {
    /// Realizes a deformation spec: `δ_{m·n}` off the deformed diagonal,
    /// `q_n` on it.
    pub fn from_deformation_spec(spec: &DeformationSpec) -> Result<Self> {
        let base = &spec.base;
        let n_elems = base.len();
        let mut kernel: Vec<Vec<Option<FiniteMeasure>>> = vec![vec![None; n_elems]; n_elems];
        let mut truncated = false;
        for m in base.elements() {
            for n in base.elements() {
                kernel[m][n] = if m == n && spec.q.contains_key(&n) {
                    Some(spec.q[&n].clone())
                } else {
                    match base.product_checked(m, n) {
                        Some(p) => Some(FiniteMeasure::point_mass(p)),
                        None => {
                            truncated = true;
                            None
                        }
                    }
                };
            }
        }
        Ok(ConvolutionStructure {
            element_names: base.names().to_vec(),
            identity: base.identity(),
            kernel,
            involution: (0..n_elems).collect(),
            base: Some(base.clone()),
            semantics: if truncated {
                WindowSemantics::Truncated
            } else {
                WindowSemantics::Complete
            },
        })
    }

    /// Assembles a structure from parts; used by the duality layer.
    pub(crate) fn from_parts(
        element_names: Vec<String>,
        identity: usize,
        kernel: Vec<Vec<Option<FiniteMeasure>>>,
        base: Option<SemigroupTable>,
        semantics: WindowSemantics,
    ) -> Self {
        let n = element_names.len();
        ConvolutionStructure {
            element_names,
            identity,
            kernel,
            involution: (0..n).collect(),
            base,
            semantics,
        }
    }

    pub fn len(&self) -> usize {
        self.element_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_names.is_empty()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn name(&self, i: usize) -> &str {
        &self.element_names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.element_names
    }

    pub fn involution(&self, m: usize) -> usize {
        self.involution[m]
    }

    pub fn is_hermitian(&self) -> bool {
        self.involution.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn base(&self) -> Option<&SemigroupTable> {
        self.base.as_ref()
    }

    pub fn semantics(&self) -> WindowSemantics {
        self.semantics
    }

    /// Elements excluding a base sentinel, if any.
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.is_sentinel(i))
    }

    pub fn is_sentinel(&self, i: usize) -> bool {
        self.base
            .as_ref()
            .is_some_and(|b| b.is_sentinel(i))
    }

    pub fn kernel(&self, m: usize, n: usize) -> Result<&FiniteMeasure> {
        self.kernel[m][n]
            .as_ref()
            .ok_or(Error::OutOfWindow { m, n })
    }

    pub fn kernel_opt(&self, m: usize, n: usize) -> Option<&FiniteMeasure> {
        self.kernel[m][n].as_ref()
    }

    /// Convolution of two measures by bilinear extension of the kernel.
    pub fn convolve(&self, mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<FiniteMeasure> {
        bilinear_extend(mu, nu, |m, n| self.kernel(m, n).cloned())
    }

    /// The deformed diagonal measure at `n`, when `n²` was deformed.
    pub fn diagonal(&self, n: usize) -> Result<&FiniteMeasure> {
        self.kernel(n, n)
    }
}

/// Deformation of the window `{0, …, last}` of `(ℤ_+, max)` by the weight
/// sequence `v`, per the forced formulas: `q_n(m) = v_m/v_n` below the
/// diagonal, `q_n(n) = u_n/v_n` on it, nothing above.
pub fn build_max_deformation(v: &VSequence) -> Result<ConvolutionStructure> {
    let base = build_named_example("zmax", &[v.len()])?;
    let spec = DeformationSpec::from_v(base, v)?;
    ConvolutionStructure::from_deformation_spec(&spec)
}

/// The Dunkl–Ramirez deformation of `(ℤ_+, max)` on `{0, …, last}`:
/// `q_n(0) = aⁿ/(1−a)`, `q_n(k) = a^{n−k}`, `q_n(n) = (1−2a)/(1−a)`.
pub fn build_dunkl_ramirez(a: &Rational, last: usize) -> Result<ConvolutionStructure> {
    build_max_deformation(&VSequence::dunkl_ramirez(a, last)?)
}

/// Deformation of a general commutative monoid along its idempotent chain.
/// Requires the base to be action-free and its idempotents to be linearly
/// ordered; the failed hypothesis is named otherwise.
pub fn build_general_deformation(
    base: SemigroupTable,
    v_on_chain: &VSequence,
) -> Result<ConvolutionStructure> {
    let classification = classify(&base);
    if !classification.action_free {
        let witness = classification
            .units_acting_trivially
            .iter()
            .copied()
            .find(|&g| g != base.identity());
        return Err(Error::Unsupported(format!(
            "base is not action-free: unit {} acts as the identity on every non-identity idempotent",
            witness.map_or_else(|| "?".into(), |g| base.name(g).to_string()),
        )));
    }
    let spec = DeformationSpec::from_v(base, v_on_chain)?;
    ConvolutionStructure::from_deformation_spec(&spec)
}

/// Chebyshev polynomial hypergroup kernels on `{0, …, cap}`; pairs with
/// `m + n > cap` are left undefined (out-of-window marker).
pub fn build_chebyshev(kind: u8, cap: usize) -> Result<ConvolutionStructure> {
    if cap < 1 {
        return Err(Error::Parameter("window must be at least 1".into()));
    }
    if kind != 1 && kind != 2 {
        return Err(Error::Parameter(format!("Chebyshev kind must be 1 or 2, got {kind}")));
    }
    let n_elems = cap + 1;
    let mut kernel: Vec<Vec<Option<FiniteMeasure>>> = vec![vec![None; n_elems]; n_elems];
    for (m, row) in kernel.iter_mut().enumerate() {
        for (n, slot) in row.iter_mut().enumerate() {
            if m + n > cap {
                continue;
            }
            let measure = if kind == 1 {
                let half = Rational::new(1, 2);
                FiniteMeasure::from_entries([
                    (m.abs_diff(n), half.clone()),
                    (m + n, half),
                ])?
            } else {
                let denom = Rational::from_int(((m + 1) * (n + 1)) as i64);
                let entries = (0..=m.min(n)).map(|k| {
                    let idx = m.abs_diff(n) + 2 * k;
                    let num = Rational::from_int((m.abs_diff(n) + 2 * k + 1) as i64);
                    (idx, &num / &denom)
                });
                FiniteMeasure::from_entries(entries)?
            };
            *slot = Some(measure);
        }
    }
    Ok(ConvolutionStructure::from_parts(
        (0..n_elems).map(|i| i.to_string()).collect(),
        0,
        kernel,
        None,
        WindowSemantics::AdditiveCap(cap),
    ))
}

/// Pass/fail status of one checked condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Pass,
    Fail,
    /// Not applicable: quantification domain empty or the small-case guard
    /// (#S ≤ 2) applies.
    Vacuous,
}

/// A witness pinned to a failed (or passed) scan, re-checkable by the
/// library layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Element { n: usize },
    Pair { m: usize, n: usize },
    Triple { m: usize, n: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub id: String,
    pub status: ConditionStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConditionOutcome {
    fn pass(id: &str) -> Self {
        ConditionOutcome {
            id: id.into(),
            status: ConditionStatus::Pass,
            witness: None,
            note: None,
        }
    }

    fn fail(id: &str, witness: Witness, note: impl Into<String>) -> Self {
        ConditionOutcome {
            id: id.into(),
            status: ConditionStatus::Fail,
            witness: Some(witness),
            note: Some(note.into()),
        }
    }

    fn vacuous(id: &str, note: impl Into<String>) -> Self {
        ConditionOutcome {
            id: id.into(),
            status: ConditionStatus::Vacuous,
            witness: None,
            note: Some(note.into()),
        }
    }
}

/// Which family of conditions was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckerKind {
    /// Linearly ordered max semigroup with every element idempotent.
    MaxSemigroup,
    /// General commutative monoid with non-empty `E_0(S)`.
    GeneralCommutative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub checker: CheckerKind,
    pub conditions: Vec<ConditionOutcome>,
    pub all_pass: bool,
    /// True when some scan had to skip products that left the window.
    pub window_limited: bool,
}

impl ConditionReport {
    fn finish(checker: CheckerKind, conditions: Vec<ConditionOutcome>, window_limited: bool) -> Self {
        let all_pass = conditions
            .iter()
            .all(|c| c.status != ConditionStatus::Fail);
        ConditionReport {
            checker,
            conditions,
            all_pass,
            window_limited,
        }
    }

    pub fn outcome(&self, id: &str) -> Option<&ConditionOutcome> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

/// Checks the diagonal setup itself: `q_n` given exactly for the required
/// indices, each a probability measure whose support contains the identity.
fn setup_condition(
    spec: &DeformationSpec,
    required: &[usize],
) -> ConditionOutcome {
    let e = spec.base.identity();
    for &n in required {
        let Some(q) = spec.q.get(&n) else {
            return ConditionOutcome::fail(
                "setup",
                Witness::Element { n },
                "no diagonal measure given for this non-identity idempotent",
            );
        };
        if !q.contains(e) {
            return ConditionOutcome::fail(
                "setup",
                Witness::Element { n },
                "the identity is outside the support of q_n",
            );
        }
        if !q.is_probability() {
            return ConditionOutcome::fail(
                "setup",
                Witness::Element { n },
                format!("q_n has total mass {} instead of 1", q.mass()),
            );
        }
    }
    for &n in spec.q.keys() {
        if !required.contains(&n) {
            return ConditionOutcome::fail(
                "setup",
                Witness::Element { n },
                "diagonal measure given for an element that is not a non-identity idempotent",
            );
        }
    }
    ConditionOutcome::pass("setup")
}

/// Support sandwich `𝓛_n ⊆ Q_n ⊆ 𝓛_n ∪ {n}` along a chain. `chain` lists
/// the idempotents in increasing order; `q` is keyed by element index.
fn support_sandwich_condition(
    chain: &[usize],
    q: &BTreeMap<usize, FiniteMeasure>,
) -> ConditionOutcome {
    for (rank, &n) in chain.iter().enumerate().skip(1) {
        let Some(qn) = q.get(&n) else { continue };
        for &below in &chain[..rank] {
            if !qn.contains(below) {
                return ConditionOutcome::fail(
                    "support_sandwich",
                    Witness::Pair { m: below, n },
                    "element below n is missing from the support of q_n",
                );
            }
        }
        for j in qn.support() {
            if !chain[..=rank].contains(&j) {
                return ConditionOutcome::fail(
                    "support_sandwich",
                    Witness::Pair { m: j, n },
                    "support of q_n reaches past n",
                );
            }
        }
    }
    ConditionOutcome::pass("support_sandwich")
}

/// Ratio condition `q_n(e) = q_n(m)·q_m(e)` for `e ≠ m < n` along the chain.
fn ratio_condition(
    chain: &[usize],
    q: &BTreeMap<usize, FiniteMeasure>,
    e: usize,
) -> ConditionOutcome {
    if chain.len() <= 2 {
        return ConditionOutcome::vacuous("ratio", "fewer than three idempotents");
    }
    for (rank_n, &n) in chain.iter().enumerate().skip(2) {
        let Some(qn) = q.get(&n) else { continue };
        for &m in &chain[1..rank_n] {
            let Some(qm) = q.get(&m) else { continue };
            if qn.get(e) != qn.get(m) * qm.get(e) {
                return ConditionOutcome::fail(
                    "ratio",
                    Witness::Pair { m, n },
                    format!(
                        "q_n(e) = {} but q_n(m)·q_m(e) = {}",
                        qn.get(e),
                        qn.get(m) * qm.get(e)
                    ),
                );
            }
        }
    }
    ConditionOutcome::pass("ratio")
}

/// Mass budget `q_n(e)·(1 + Σ_{e≠k<n} 1/q_k(e)) ≤ 1` along the chain.
fn mass_bound_condition(
    chain: &[usize],
    q: &BTreeMap<usize, FiniteMeasure>,
    e: usize,
) -> ConditionOutcome {
    if chain.len() <= 2 {
        return ConditionOutcome::vacuous("mass_bound", "fewer than three idempotents");
    }
    for (rank_n, &n) in chain.iter().enumerate().skip(1) {
        let Some(qn) = q.get(&n) else { continue };
        if qn.get(e).is_zero() {
            // setup violation, reported there
            continue;
        }
        let mut budget = Rational::one();
        let mut ok = true;
        for &k in &chain[1..rank_n] {
            let Some(qk) = q.get(&k) else { ok = false; break };
            if qk.get(e).is_zero() {
                ok = false;
                break;
            }
            budget = budget + qk.get(e).recip().expect("nonzero");
        }
        if !ok {
            continue;
        }
        let lhs = qn.get(e) * &budget;
        if lhs > Rational::one() {
            return ConditionOutcome::fail(
                "mass_bound",
                Witness::Element { n },
                format!("q_n(e)·(1 + Σ 1/q_k(e)) = {lhs} exceeds 1"),
            );
        }
    }
    ConditionOutcome::pass("mass_bound")
}

/// Conditions for a deformation of a linearly ordered max semigroup (every
/// element idempotent) to be a hermitian hypergroup: the support sandwich,
/// the ratio identity and the mass budget, plus the diagonal setup itself.
///
/// Errors when the base is not a pure max semigroup; the general checker
/// handles those.
pub fn check_max_conditions(spec: &DeformationSpec) -> Result<ConditionReport> {
    let base = &spec.base;
    let classification = classify(base);
    let all_idempotent =
        classification.idempotents.len() == base.elements().count();
    if !all_idempotent || !classification.max_min_type {
        return Err(Error::Unsupported(
            "base is not a linearly ordered max semigroup; use the general commutative checker"
                .into(),
        ));
    }
    let chain = match idempotent_chain(base) {
        IdempotentChain::Chain { order } => order,
        IdempotentChain::NotMaxMin { m, n } => {
            return Err(Error::Unsupported(format!(
                "idempotents are not linearly ordered: witness pair ({m}, {n})"
            )))
        }
    };
    let e = base.identity();
    let required: Vec<usize> = chain.iter().copied().filter(|&n| n != e).collect();

    let conditions = vec![
        setup_condition(spec, &required),
        support_sandwich_condition(&chain, &spec.q),
        ratio_condition(&chain, &spec.q, e),
        mass_bound_condition(&chain, &spec.q, e),
    ];
    Ok(ConditionReport::finish(
        CheckerKind::MaxSemigroup,
        conditions,
        false,
    ))
}

/// Reformulation of the max-semigroup conditions through the weights
/// `v_n = 1/q_n(e)`: `q_n(m) = v_m/v_n` and `Σ_{k<n} v_k ≤ v_n`. Used as an
/// independent route to the same verdict as [`check_max_conditions`].
pub fn check_max_conditions_v_form(spec: &DeformationSpec) -> Result<ConditionReport> {
    let base = &spec.base;
    let chain = match idempotent_chain(base) {
        IdempotentChain::Chain { order } => order,
        IdempotentChain::NotMaxMin { m, n } => {
            return Err(Error::Unsupported(format!(
                "idempotents are not linearly ordered: witness pair ({m}, {n})"
            )))
        }
    };
    let e = base.identity();
    let required: Vec<usize> = chain.iter().copied().filter(|&n| n != e).collect();
    let setup = setup_condition(spec, &required);

    // v_e = 1, v_n = 1/q_n(e); indices where q_n(e) = 0 have no finite
    // weight and surface as ratio failures.
    let mut v: BTreeMap<usize, Option<Rational>> = BTreeMap::new();
    v.insert(e, Some(Rational::one()));
    for &n in &required {
        let w = spec.q.get(&n).map(|q| q.get(e));
        v.insert(
            n,
            match w {
                Some(w) if !w.is_zero() => Some(w.recip().expect("nonzero")),
                _ => None,
            },
        );
    }

    let mut ratio = ConditionOutcome::pass("ratio");
    let mut mass = ConditionOutcome::pass("mass_bound");
    if chain.len() <= 2 {
        ratio = ConditionOutcome::vacuous("ratio", "fewer than three idempotents");
        mass = ConditionOutcome::vacuous("mass_bound", "fewer than three idempotents");
    } else {
        'ratio: for (rank_n, &n) in chain.iter().enumerate().skip(1) {
            let (Some(qn), Some(Some(vn))) = (spec.q.get(&n), v.get(&n)) else {
                continue;
            };
            for &m in &chain[1..rank_n] {
                let Some(Some(vm)) = v.get(&m) else { continue };
                if qn.get(m) != vm / vn {
                    ratio = ConditionOutcome::fail(
                        "ratio",
                        Witness::Pair { m, n },
                        format!("q_n(m) = {} but v_m/v_n = {}", qn.get(m), vm / vn),
                    );
                    break 'ratio;
                }
            }
        }
        'mass: for (rank_n, &n) in chain.iter().enumerate().skip(1) {
            let Some(Some(vn)) = v.get(&n) else { continue };
            let mut sum = Rational::zero();
            for &k in &chain[..rank_n] {
                match v.get(&k) {
                    Some(Some(vk)) => sum = sum + vk,
                    _ => continue 'mass,
                }
            }
            if sum > *vn {
                mass = ConditionOutcome::fail(
                    "mass_bound",
                    Witness::Element { n },
                    format!("Σ_{{k<n}} v_k = {sum} exceeds v_n = {vn}"),
                );
                break 'mass;
            }
        }
    }

    let sandwich = support_sandwich_condition(&chain, &spec.q);
    Ok(ConditionReport::finish(
        CheckerKind::MaxSemigroup,
        vec![setup, sandwich, ratio, mass],
        false,
    ))
}

/// The six semiconvo conditions for a commutative monoid with non-empty
/// `E_0(S)`, evaluated exhaustively on the window:
///
/// 1. `idempotent_chain` — the idempotents are linearly ordered (hence the
///    chain is a finite prefix of ℤ_+);
/// 2. `nonidempotents_ideal` — `S̃ = S \ E(S)` is an ideal;
/// 3. `support_in_idempotents` — `Q_n ⊆ E(S)`;
/// 4. `translate_collapse` — `Q_n·m = {n·m}` for `n ∈ E_0(S)`, `m ∈ S̃`;
/// 5. `support_sandwich` — `𝓛_n ⊆ Q_n ⊆ 𝓛_n ∪ {n}` along the chain;
/// 6. `ratio` and `mass_bound` — as for max semigroups, on the chain.
///
/// The `action_free` hypothesis is evaluated first; a failure there is the
/// reported rejection reason. The diagonal setup is checked as `setup`.
pub fn check_main_conditions(spec: &DeformationSpec) -> Result<ConditionReport> {
    let base = &spec.base;
    let classification = classify(base);
    if classification.nonidentity_idempotents.is_empty() {
        return Err(Error::Unsupported(
            "base has no non-identity idempotents; there is no diagonal to deform".into(),
        ));
    }
    let e = base.identity();
    let e_set = &classification.idempotents;
    let e0 = &classification.nonidentity_idempotents;
    let s_tilde: Vec<usize> = base
        .elements()
        .filter(|&m| !base.is_idempotent(m))
        .collect();
    let mut window_limited = false;
    let mut conditions = Vec::new();

    // Standing hypothesis of the deformation theorems.
    conditions.push(if classification.action_free {
        ConditionOutcome::pass("action_free")
    } else {
        let g = classification
            .units_acting_trivially
            .iter()
            .copied()
            .find(|&g| g != e)
            .unwrap_or(e);
        ConditionOutcome::fail(
            "action_free",
            Witness::Element { n: g },
            "a non-identity unit acts as the identity on every non-identity idempotent",
        )
    });

    conditions.push(setup_condition(spec, e0));

    let chain = match idempotent_chain(base) {
        IdempotentChain::Chain { order } => {
            conditions.push(ConditionOutcome::pass("idempotent_chain"));
            Some(order)
        }
        IdempotentChain::NotMaxMin { m, n } => {
            conditions.push(ConditionOutcome::fail(
                "idempotent_chain",
                Witness::Pair { m, n },
                "product of idempotents equals neither factor",
            ));
            None
        }
    };

    // S̃ an ideal; vacuous when S = E(S).
    conditions.push(if s_tilde.is_empty() {
        ConditionOutcome::vacuous("nonidempotents_ideal", "every element is idempotent")
    } else {
        let mut witness = None;
        for &t in &s_tilde {
            for x in base.elements() {
                match base.product_checked(t, x) {
                    None => window_limited = true,
                    Some(p) => {
                        if !s_tilde.contains(&p) && witness.is_none() {
                            witness = Some((t, x));
                        }
                    }
                }
            }
        }
        match witness {
            None => ConditionOutcome::pass("nonidempotents_ideal"),
            Some((m, n)) => ConditionOutcome::fail(
                "nonidempotents_ideal",
                Witness::Pair { m, n },
                "product of a non-idempotent with this element is idempotent",
            ),
        }
    });

    // Q_n ⊆ E(S).
    let mut support_ok = ConditionOutcome::pass("support_in_idempotents");
    'sup: for &n in e0 {
        let Some(qn) = spec.q.get(&n) else { continue };
        for j in qn.support() {
            if !e_set.contains(&j) {
                support_ok = ConditionOutcome::fail(
                    "support_in_idempotents",
                    Witness::Pair { m: j, n },
                    "support of q_n contains a non-idempotent",
                );
                break 'sup;
            }
        }
    }
    conditions.push(support_ok);

    // Q_n·m = {n·m} for n ∈ E_0, m ∈ S̃.
    conditions.push(if s_tilde.is_empty() {
        ConditionOutcome::vacuous("translate_collapse", "every element is idempotent")
    } else {
        let mut outcome = ConditionOutcome::pass("translate_collapse");
        'tc: for &n in e0 {
            let Some(qn) = spec.q.get(&n) else { continue };
            for &m in &s_tilde {
                let Some(nm) = base.product_checked(n, m) else {
                    window_limited = true;
                    continue;
                };
                for j in qn.support() {
                    match base.product_checked(j, m) {
                        None => window_limited = true,
                        Some(p) => {
                            if p != nm {
                                outcome = ConditionOutcome::fail(
                                    "translate_collapse",
                                    Witness::Triple { m: j, n, k: m },
                                    format!(
                                        "j·m = {} differs from n·m = {}",
                                        base.name(p),
                                        base.name(nm)
                                    ),
                                );
                                break 'tc;
                            }
                        }
                    }
                }
            }
        }
        outcome
    });

    match &chain {
        Some(order) => {
            conditions.push(support_sandwich_condition(order, &spec.q));
            conditions.push(ratio_condition(order, &spec.q, e));
            conditions.push(mass_bound_condition(order, &spec.q, e));
        }
        None => {
            for id in ["support_sandwich", "ratio", "mass_bound"] {
                conditions.push(ConditionOutcome::vacuous(
                    id,
                    "not evaluated: idempotents are not linearly ordered",
                ));
            }
        }
    }

    Ok(ConditionReport::finish(
        CheckerKind::GeneralCommutative,
        conditions,
        window_limited,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn rs(values: &[(i64, i64)]) -> Vec<Rational> {
        values.iter().map(|&(n, d)| r(n, d)).collect()
    }

    #[test]
    fn u_zero_gives_doubling_weights() {
        let u = USequence::new(vec![Rational::zero(); 5]).unwrap();
        let v = v_from_u(&u);
        let expected: Vec<Rational> = [1, 1, 2, 4, 8, 16].iter().map(|&n| Rational::from_int(n)).collect();
        assert_eq!(v.values(), &expected[..]);
    }

    #[test]
    fn dunkl_ramirez_third_weights_and_increments() {
        let v = VSequence::dunkl_ramirez(&r(1, 3), 3).unwrap();
        assert_eq!(v.values(), &rs(&[(1, 1), (2, 1), (6, 1), (18, 1)])[..]);
        let u = u_from_v(&v);
        assert_eq!(u.values(), &rs(&[(1, 1), (3, 1), (9, 1)])[..]);
    }

    #[test]
    fn u_from_v_by_subtraction() {
        let v = VSequence::new(rs(&[(1, 1), (2, 1), (3, 1), (6, 1)])).unwrap();
        let u = u_from_v(&v);
        assert_eq!(u.values(), &rs(&[(1, 1), (0, 1), (0, 1)])[..]);
    }

    #[test]
    fn v_u_round_trip() {
        let v = VSequence::new(rs(&[(1, 1), (3, 2), (4, 1), (13, 2)])).unwrap();
        assert_eq!(v_from_u(&u_from_v(&v)), v);
        let u = USequence::new(rs(&[(1, 2), (0, 1), (7, 3)])).unwrap();
        assert_eq!(u_from_v(&v_from_u(&u)), u);
    }

    #[test]
    fn invalid_v_names_first_failing_index() {
        let err = VSequence::new(rs(&[(1, 1), (1, 1), (1, 1)])).unwrap_err();
        assert_eq!(
            err,
            Error::Invalid {
                pointer: "/values/2".into(),
                message: "v_2 = 1 violates v_2 ≥ v_0 + … + v_1".into()
            }
        );
        assert!(VSequence::new(rs(&[(2, 1)])).is_err());
    }

    #[test]
    fn dunkl_ramirez_parameter_range() {
        assert!(VSequence::dunkl_ramirez(&r(2, 3), 4).is_err());
        assert!(VSequence::dunkl_ramirez(&Rational::zero(), 4).is_err());
        assert!(VSequence::dunkl_ramirez(&r(1, 2), 4).is_ok());
    }

    #[test]
    fn max_deformation_diagonals() {
        // a = 1/3, n = 2: q_2 = 1/6 δ_0 + 1/3 δ_1 + 1/2 δ_2
        let k = build_dunkl_ramirez(&r(1, 3), 4).unwrap();
        let q2 = k.diagonal(2).unwrap();
        assert_eq!(
            *q2,
            FiniteMeasure::from_entries([(0, r(1, 6)), (1, r(1, 3)), (2, r(1, 2))]).unwrap()
        );

        // u ≡ 0 (a = 1/2): the diagonal weight vanishes, support is exactly 𝓛_n
        let k = build_dunkl_ramirez(&r(1, 2), 4).unwrap();
        let q2 = k.diagonal(2).unwrap();
        assert_eq!(
            *q2,
            FiniteMeasure::from_entries([(0, r(1, 2)), (1, r(1, 2))]).unwrap()
        );
        assert!(!q2.contains(2));

        // v = (1,2,3): q_2 = 1/3 δ_0 + 2/3 δ_1 with the diagonal entry pruned
        let v = VSequence::new(rs(&[(1, 1), (2, 1), (3, 1)])).unwrap();
        let k = build_max_deformation(&v).unwrap();
        assert_eq!(
            *k.diagonal(2).unwrap(),
            FiniteMeasure::from_entries([(0, r(1, 3)), (1, r(2, 3))]).unwrap()
        );
    }

    #[test]
    fn dunkl_ramirez_first_diagonal() {
        let k = build_dunkl_ramirez(&r(1, 3), 8).unwrap();
        assert_eq!(
            *k.diagonal(1).unwrap(),
            FiniteMeasure::from_entries([(0, r(1, 2)), (1, r(1, 2))]).unwrap()
        );
        // off-diagonal pairs stay point masses at the max
        assert_eq!(*k.kernel(3, 5).unwrap(), FiniteMeasure::point_mass(5));
        assert_eq!(*k.kernel(0, 4).unwrap(), FiniteMeasure::point_mass(4));
    }

    #[test]
    fn chebyshev_kernels() {
        let k1 = build_chebyshev(1, 8).unwrap();
        assert_eq!(
            *k1.kernel(2, 3).unwrap(),
            FiniteMeasure::from_entries([(1, r(1, 2)), (5, r(1, 2))]).unwrap()
        );
        assert_eq!(*k1.kernel(0, 5).unwrap(), FiniteMeasure::point_mass(5));
        assert!(k1.kernel(4, 4).is_ok());
        assert_eq!(
            k1.kernel(5, 5).unwrap_err(),
            Error::OutOfWindow { m: 5, n: 5 }
        );

        let k2 = build_chebyshev(2, 8).unwrap();
        assert_eq!(
            *k2.kernel(1, 1).unwrap(),
            FiniteMeasure::from_entries([(0, r(1, 4)), (2, r(3, 4))]).unwrap()
        );
        for m in 0..=4 {
            for n in 0..=4 {
                assert!(k2.kernel(m, n).unwrap().is_probability());
            }
        }
    }

    #[test]
    fn max_conditions_pass_on_dunkl_ramirez() {
        let v = VSequence::dunkl_ramirez(&r(1, 3), 8).unwrap();
        let base = build_named_example("zmax", &[9]).unwrap();
        let spec = DeformationSpec::from_v(base, &v).unwrap();
        let report = check_max_conditions(&spec).unwrap();
        assert!(report.all_pass, "{report:?}");
        let report_v = check_max_conditions_v_form(&spec).unwrap();
        assert!(report_v.all_pass);
    }

    #[test]
    fn max_conditions_catch_ratio_perturbation() {
        // replace q_2(0) by 1/5, rebalancing the lost mass onto q_2(2)
        let v = VSequence::dunkl_ramirez(&r(1, 3), 4).unwrap();
        let base = build_named_example("zmax", &[5]).unwrap();
        let mut spec = DeformationSpec::from_v(base, &v).unwrap();
        let q2 = spec.q.get_mut(&2).unwrap();
        let shift = q2.get(0) - r(1, 5);
        *q2 = FiniteMeasure::from_entries([
            (0, r(1, 5)),
            (1, q2.get(1)),
            (2, q2.get(2) + shift),
        ])
        .unwrap();
        assert!(spec.q[&2].is_probability());
        let report = check_max_conditions(&spec).unwrap();
        let ratio = report.outcome("ratio").unwrap();
        assert_eq!(ratio.status, ConditionStatus::Fail);
        assert_eq!(ratio.witness, Some(Witness::Pair { m: 1, n: 2 }));
        // the v-form route reaches the same verdict
        let report_v = check_max_conditions_v_form(&spec).unwrap();
        assert_eq!(
            report_v.outcome("ratio").unwrap().status,
            ConditionStatus::Fail
        );
    }

    #[test]
    fn max_conditions_catch_support_gap() {
        // Q_2 = {0, 2}: the element 1 of 𝓛_2 is missing
        let base = build_named_example("zmax", &[3]).unwrap();
        let mut q = BTreeMap::new();
        q.insert(
            1,
            FiniteMeasure::from_entries([(0, r(1, 2)), (1, r(1, 2))]).unwrap(),
        );
        q.insert(
            2,
            FiniteMeasure::from_entries([(0, r(1, 2)), (2, r(1, 2))]).unwrap(),
        );
        let spec = DeformationSpec::new(base, q);
        let report = check_max_conditions(&spec).unwrap();
        let sandwich = report.outcome("support_sandwich").unwrap();
        assert_eq!(sandwich.status, ConditionStatus::Fail);
        assert_eq!(sandwich.witness, Some(Witness::Pair { m: 1, n: 2 }));
    }

    #[test]
    fn max_conditions_vacuous_for_two_elements() {
        let base = build_named_example("zmax", &[2]).unwrap();
        let mut q = BTreeMap::new();
        q.insert(
            1,
            FiniteMeasure::from_entries([(0, r(1, 3)), (1, r(2, 3))]).unwrap(),
        );
        let spec = DeformationSpec::new(base, q);
        let report = check_max_conditions(&spec).unwrap();
        assert!(report.all_pass);
        assert_eq!(
            report.outcome("ratio").unwrap().status,
            ConditionStatus::Vacuous
        );
        assert_eq!(
            report.outcome("mass_bound").unwrap().status,
            ConditionStatus::Vacuous
        );
    }

    #[test]
    fn mass_bound_failure_is_reported() {
        // q_1(0) = 1/4, q_2(0) = 1/2: the budget at n = 2 is 1/2·(1+4) > 1
        let base = build_named_example("zmax", &[3]).unwrap();
        let mut q = BTreeMap::new();
        q.insert(
            1,
            FiniteMeasure::from_entries([(0, r(1, 4)), (1, r(3, 4))]).unwrap(),
        );
        q.insert(
            2,
            FiniteMeasure::from_entries([(0, r(1, 2)), (1, r(1, 4)), (2, r(1, 4))]).unwrap(),
        );
        let spec = DeformationSpec::new(base, q);
        let report = check_max_conditions(&spec).unwrap();
        let mass = report.outcome("mass_bound").unwrap();
        assert_eq!(mass.status, ConditionStatus::Fail);
        assert_eq!(mass.witness, Some(Witness::Element { n: 2 }));
    }

    #[test]
    fn general_checker_handles_pure_max_bases() {
        // q_1(0) = 1/4, q_2(0) = 1/2 breaks the budget at n = 2:
        // 1/2 · (1 + 4) > 1
        let base = build_named_example("zmax", &[3]).unwrap();
        let mut q = BTreeMap::new();
        q.insert(
            1,
            FiniteMeasure::from_entries([(0, r(1, 4)), (1, r(3, 4))]).unwrap(),
        );
        q.insert(
            2,
            FiniteMeasure::from_entries([(0, r(1, 2)), (1, r(1, 4)), (2, r(1, 4))]).unwrap(),
        );
        let spec = DeformationSpec::new(base, q);
        let report = check_main_conditions(&spec).unwrap();
        let mass = report.outcome("mass_bound").unwrap();
        assert_eq!(mass.status, ConditionStatus::Fail);
        assert_eq!(mass.witness, Some(Witness::Element { n: 2 }));
        // the pure-max degenerate case leaves the ideal conditions vacuous
        assert_eq!(
            report.outcome("nonidempotents_ideal").unwrap().status,
            ConditionStatus::Vacuous
        );
        assert_eq!(
            report.outcome("translate_collapse").unwrap().status,
            ConditionStatus::Vacuous
        );
    }

    #[test]
    fn general_checker_accepts_maxsum() {
        let base = build_named_example("maxsum", &[4, 6]).unwrap();
        let v = VSequence::dunkl_ramirez(&r(1, 3), 3).unwrap();
        let spec = DeformationSpec::from_v(base, &v).unwrap();
        let report = check_main_conditions(&spec).unwrap();
        assert!(report.all_pass, "{report:?}");
        assert!(report.window_limited);
    }

    #[test]
    fn general_checker_rejects_ex23_on_ideal_condition() {
        let base = build_named_example("ex2.3", &[3]).unwrap();
        // any candidate diagonal will do
        let e0 = classify(&base).nonidentity_idempotents;
        let mut q = BTreeMap::new();
        for &n in &e0 {
            q.insert(
                n,
                FiniteMeasure::from_entries([(0, r(1, 2)), (n, r(1, 2))]).unwrap(),
            );
        }
        let spec = DeformationSpec::new(base, q);
        let report = check_main_conditions(&spec).unwrap();
        assert!(!report.all_pass);
        let ideal = report.outcome("nonidempotents_ideal").unwrap();
        assert_eq!(ideal.status, ConditionStatus::Fail);
        // witness: (0,1)·(0,1) = (0,0) is idempotent
        assert_eq!(ideal.witness, Some(Witness::Pair { m: 1, n: 1 }));
        // action-freeness itself holds for this base
        assert_eq!(
            report.outcome("action_free").unwrap().status,
            ConditionStatus::Pass
        );
    }

    #[test]
    fn general_builder_rejects_ex22() {
        let base = build_named_example("ex2.2", &[8]).unwrap();
        let v = VSequence::dunkl_ramirez(&r(1, 3), 8).unwrap();
        let err = build_general_deformation(base, &v).unwrap_err();
        assert!(matches!(err, Error::Unsupported(ref msg) if msg.contains("action-free")));
    }

    #[test]
    fn general_deformation_on_pure_max_matches_specialized_builder() {
        let v = VSequence::dunkl_ramirez(&r(1, 3), 5).unwrap();
        let base = build_named_example("zmax", &[6]).unwrap();
        let general = build_general_deformation(base, &v).unwrap();
        let direct = build_max_deformation(&v).unwrap();
        for m in 0..6 {
            for n in 0..6 {
                assert_eq!(general.kernel(m, n).unwrap(), direct.kernel(m, n).unwrap());
            }
        }
    }

    #[test]
    fn vanishing_increment_pattern() {
        let v = VSequence::with_vanishing_increments(&[2, 4], 5).unwrap();
        let u = u_from_v(&v);
        assert_eq!(
            u.values(),
            &rs(&[(1, 1), (0, 1), (1, 1), (0, 1), (1, 1)])[..]
        );
        let k = build_max_deformation(&v).unwrap();
        assert!(!k.diagonal(2).unwrap().contains(2));
        assert!(!k.diagonal(4).unwrap().contains(4));
        assert!(k.diagonal(3).unwrap().contains(3));
    }

    #[test]
    fn spt_rule_follows_increments() {
        let v = VSequence::dunkl_ramirez(&r(1, 2), 6).unwrap();
        let u = u_from_v(&v);
        let k = build_max_deformation(&v).unwrap();
        for n in 1..=6 {
            assert!(u.u(n).is_zero());
            let q = k.diagonal(n).unwrap();
            assert_eq!(q.support().collect::<Vec<_>>(), (0..n).collect::<Vec<_>>());
        }
        let v = VSequence::dunkl_ramirez(&r(1, 3), 6).unwrap();
        let k = build_max_deformation(&v).unwrap();
        for n in 1..=6 {
            let q = k.diagonal(n).unwrap();
            assert_eq!(
                q.support().collect::<Vec<_>>(),
                (0..=n).collect::<Vec<_>>()
            );
        }
    }
}
