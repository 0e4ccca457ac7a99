//! Exhaustive axiom verification.
//!
//! A candidate convolution is checked by enumeration: every in-window
//! triple for associativity, every pair for the identity, involution and
//! support conditions, with exact measure equality throughout. Triples or
//! pairs whose evaluation needed a product outside the window are skipped
//! and counted, and the report distinguishes "verified exactly" from
//! "window-limited" domains. Counterexamples carry both sides of the failed
//! equality so they can be re-evaluated independently.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::deformation::{ConvolutionStructure, DeformationSpec, WindowSemantics};
use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::rational::Rational;
use crate::semigroup::{classify, idempotent_chain, IdempotentChain, SemigroupTable};

/// Outcome of one scanned axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Check<T> {
    Pass,
    Fail { witness: T },
}

impl<T> Check<T> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Check::Pass)
    }

    pub fn witness(&self) -> Option<&T> {
        match self {
            Check::Pass => None,
            Check::Fail { witness } => Some(witness),
        }
    }
}

/// A failed associativity instance, with both evaluated sides so the report
/// is self-checking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociativityCounterexample {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub lhs: FiniteMeasure,
    pub rhs: FiniteMeasure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub associativity: Check<AssociativityCounterexample>,
    pub identity: Check<usize>,
    pub commutativity: Check<PairWitness>,
    /// `(δ_m*δ_n)ˇ = δ_ň*δ_m̌`; only filled by the hypergroup pass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub involution_axiom: Option<Check<PairWitness>>,
    /// `e ∈ spt(δ_m*δ_ň)` iff `m = n`; only filled by the hypergroup pass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hermitian_support_axiom: Option<Check<PairWitness>>,
    /// Whether the involution is the identity map.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hermitian: Option<bool>,
    pub window: usize,
    pub triples_checked: u64,
    pub triples_skipped: u64,
    pub pairs_skipped: u64,
    pub window_limited: bool,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.associativity.is_pass()
            && self.identity.is_pass()
            && self.commutativity.is_pass()
            && self.involution_axiom.as_ref().is_none_or(Check::is_pass)
            && self
                .hermitian_support_axiom
                .as_ref()
                .is_none_or(Check::is_pass)
    }
}

fn domain(k: &ConvolutionStructure, window: usize) -> Vec<usize> {
    k.elements().filter(|&i| i <= window).collect()
}

/// `μ * δ_k`, or `None` when a needed kernel value is undefined.
fn convolve_right_point(
    k: &ConvolutionStructure,
    mu: &FiniteMeasure,
    point: usize,
) -> Option<FiniteMeasure> {
    let mut out = FiniteMeasure::zero();
    for (j, w) in mu.iter() {
        out.add_scaled(k.kernel_opt(j, point)?, w);
    }
    Some(out)
}

/// `δ_m * ν`, or `None` when a needed kernel value is undefined.
fn convolve_left_point(
    k: &ConvolutionStructure,
    point: usize,
    nu: &FiniteMeasure,
) -> Option<FiniteMeasure> {
    let mut out = FiniteMeasure::zero();
    for (j, w) in nu.iter() {
        out.add_scaled(k.kernel_opt(point, j)?, w);
    }
    Some(out)
}

/// Checks the semiconvo axioms on the window: two-sided identity,
/// commutativity of the kernel, and associativity
/// `(δ_m*δ_n)*δ_k = δ_m*(δ_n*δ_k)` over all in-window triples.
/// The failure witness, when present, is the lexicographically least.
pub fn verify_semiconvo(k: &ConvolutionStructure, window: usize) -> VerificationReport {
    let dom = domain(k, window);
    let e = k.identity();

    let mut identity = Check::Pass;
    for &m in &dom {
        let left_ok = k.kernel_opt(e, m).map(|q| q.as_point_mass() == Some(m));
        let right_ok = k.kernel_opt(m, e).map(|q| q.as_point_mass() == Some(m));
        if left_ok != Some(true) || right_ok != Some(true) {
            identity = Check::Fail { witness: m };
            break;
        }
    }

    let mut commutativity = Check::Pass;
    let mut pairs_skipped = 0u64;
    'comm: for &m in &dom {
        for &n in &dom {
            match (k.kernel_opt(m, n), k.kernel_opt(n, m)) {
                (None, None) => pairs_skipped += 1,
                (Some(a), Some(b)) => {
                    if a != b {
                        commutativity = Check::Fail {
                            witness: PairWitness { m, n },
                        };
                        break 'comm;
                    }
                }
                _ => {
                    commutativity = Check::Fail {
                        witness: PairWitness { m, n },
                    };
                    break 'comm;
                }
            }
        }
    }

    let mut associativity = Check::Pass;
    let mut triples_checked = 0u64;
    let mut triples_skipped = 0u64;
    'outer: for &m in &dom {
        for &n in &dom {
            let Some(mn) = k.kernel_opt(m, n) else {
                triples_skipped += dom.len() as u64;
                continue;
            };
            for &t in &dom {
                let lhs = convolve_right_point(k, mn, t);
                let rhs = k
                    .kernel_opt(n, t)
                    .and_then(|nt| convolve_left_point(k, m, nt));
                match (lhs, rhs) {
                    (Some(lhs), Some(rhs)) => {
                        triples_checked += 1;
                        if lhs != rhs {
                            associativity = Check::Fail {
                                witness: AssociativityCounterexample {
                                    m,
                                    n,
                                    k: t,
                                    lhs,
                                    rhs,
                                },
                            };
                            break 'outer;
                        }
                    }
                    _ => triples_skipped += 1,
                }
            }
        }
    }

    let window_limited = triples_skipped > 0 || pairs_skipped > 0;
    VerificationReport {
        associativity,
        identity,
        commutativity,
        involution_axiom: None,
        hermitian_support_axiom: None,
        hermitian: None,
        window,
        triples_checked,
        triples_skipped,
        pairs_skipped,
        window_limited,
    }
}

/// Runs the semiconvo checks and then the two hypergroup axioms for the
/// structure's involution: compatibility `(δ_m*δ_n)ˇ = δ_ň*δ_m̌` and the
/// support condition `e ∈ spt(δ_m*δ_ň) ⇔ m = n`.
pub fn verify_hypergroup(k: &ConvolutionStructure, window: usize) -> VerificationReport {
    let mut report = verify_semiconvo(k, window);
    let dom = domain(k, window);
    let e = k.identity();

    let mut involution_axiom = Check::Pass;
    'inv: for &m in &dom {
        for &n in &dom {
            let lhs = k
                .kernel_opt(m, n)
                .map(|q| q.map_indices(|j| k.involution(j)));
            let rhs = k.kernel_opt(k.involution(n), k.involution(m)).cloned();
            match (lhs, rhs) {
                (None, None) => report.pairs_skipped += 1,
                (Some(a), Some(b)) if a == b => {}
                _ => {
                    involution_axiom = Check::Fail {
                        witness: PairWitness { m, n },
                    };
                    break 'inv;
                }
            }
        }
    }

    let mut support_axiom = Check::Pass;
    'sup: for &m in &dom {
        for &n in &dom {
            match k.kernel_opt(m, k.involution(n)) {
                None => report.pairs_skipped += 1,
                Some(q) => {
                    let has_e = q.contains(e);
                    if has_e != (m == n) {
                        support_axiom = Check::Fail {
                            witness: PairWitness { m, n },
                        };
                        break 'sup;
                    }
                }
            }
        }
    }

    report.involution_axiom = Some(involution_axiom);
    report.hermitian_support_axiom = Some(support_axiom);
    report.hermitian = Some(k.is_hermitian());
    report.window_limited = report.triples_skipped > 0 || report.pairs_skipped > 0;
    report
}

/// The Haar weights of a hermitian structure: `λ(e) = 1` and
/// `λ(n) = 1/(δ_n*δ_n)(e)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaarVector {
    pub values: BTreeMap<usize, Rational>,
    /// False when some diagonal was outside the window, so `values` covers
    /// only part of the structure.
    pub complete: bool,
}

impl HaarVector {
    pub fn get(&self, n: usize) -> Option<&Rational> {
        self.values.get(&n)
    }
}

/// Computes the Haar weights from the diagonal. Errors when some in-window
/// diagonal gives no mass to the identity — the structure is then not a
/// hermitian hypergroup and has no Haar measure of this form.
pub fn haar(k: &ConvolutionStructure) -> Result<HaarVector> {
    let e = k.identity();
    let mut values = BTreeMap::new();
    let mut complete = true;
    for n in k.elements() {
        if n == e {
            values.insert(n, Rational::one());
            continue;
        }
        match k.kernel_opt(n, n) {
            None => complete = false,
            Some(q) => {
                let w = q.get(e);
                if w.is_zero() {
                    return Err(Error::Unsupported(format!(
                        "(δ_n*δ_n)(e) = 0 at n = {}: not a hermitian hypergroup",
                        k.name(n)
                    )));
                }
                values.insert(n, w.recip()?);
            }
        }
    }
    Ok(HaarVector { values, complete })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub pass: bool,
    /// Pair (n, k) where `Σ_m λ(m)·(δ_m*δ_n)(k) ≠ λ(k)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(usize, usize)>,
    pub pairs_checked: u64,
    pub pairs_skipped: u64,
    pub window_limited: bool,
}

/// Independent cross-check of the Haar weights: exact translation
/// invariance `Σ_m λ(m)·(δ_m*δ_n)(k) = λ(k)` for every in-window pair
/// `(n, k)` whose sum is provably complete within the window.
///
/// For max-deformations every pair is complete: an element `m` above both
/// `n` and `k` convolves to `δ_m` and cannot contribute at `k`. For
/// additive-window kernels a pair is complete when every index that could
/// contribute (at most `n + k`) has both a Haar weight and a defined kernel
/// value; other pairs are skipped and counted.
pub fn verify_haar_invariance(
    k: &ConvolutionStructure,
    lambda: &HaarVector,
    window: usize,
) -> Result<InvarianceReport> {
    let dom: Vec<usize> = domain(k, window)
        .into_iter()
        .filter(|i| lambda.values.contains_key(i))
        .collect();
    let mut pairs_checked = 0u64;
    let mut pairs_skipped = 0u64;
    let mut witness = None;

    'pairs: for &n in &dom {
        for &t in &dom {
            let contributors: Vec<usize> = match k.semantics() {
                WindowSemantics::Complete => dom.clone(),
                WindowSemantics::AdditiveCap(_) => {
                    // Support of δ_m*δ_n reaches t only when |m − n| ≤ t,
                    // so contributors are bounded by n + t.
                    let bound = n + t;
                    let all_present = (0..=bound).all(|m| {
                        lambda.values.contains_key(&m) && k.kernel_opt(m, n).is_some()
                    });
                    if !all_present {
                        pairs_skipped += 1;
                        continue;
                    }
                    (0..=bound).collect()
                }
                WindowSemantics::Truncated => {
                    return Err(Error::Unsupported(
                        "Haar invariance over sentinel-truncated tables is not window-exact"
                            .into(),
                    ))
                }
            };
            let mut total = Rational::zero();
            for m in contributors {
                let Some(q) = k.kernel_opt(m, n) else {
                    pairs_skipped += 1;
                    continue 'pairs;
                };
                let w = q.get(t);
                if !w.is_zero() {
                    total = total + &lambda.values[&m] * &w;
                }
            }
            pairs_checked += 1;
            if &total != lambda.get(t).expect("t is in the domain") {
                witness = Some((n, t));
                break 'pairs;
            }
        }
    }

    Ok(InvarianceReport {
        pass: witness.is_none(),
        witness,
        pairs_checked,
        pairs_skipped,
        window_limited: pairs_skipped > 0,
    })
}

/// The five equivalent characterizations of deformability, evaluated
/// independently so their agreement can be observed rather than assumed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Q_n ⊆ E(S) for every deformed n.
    pub support_in_idempotents: bool,
    /// (E(S), ·) is max-min type.
    pub idempotents_max_min: bool,
    pub inverse_free: bool,
    pub action_free: bool,
    /// n ≠ n·m for n ∈ E_0(S), m ∈ S̃.
    pub no_fixed_idempotent: bool,
    /// All five booleans coincide.
    pub agreement: bool,
}

impl EquivalenceReport {
    pub fn booleans(&self) -> [bool; 5] {
        [
            self.support_in_idempotents,
            self.idempotents_max_min,
            self.inverse_free,
            self.action_free,
            self.no_fixed_idempotent,
        ]
    }
}

/// Evaluates the five conditions for a commutative monoid with at least one
/// non-identity idempotent. Their equivalence is a theorem only when the
/// candidate actually is a semiconvo; pair with [`verify_semiconvo`] to
/// exercise it.
pub fn check_equivalence_conditions(spec: &DeformationSpec) -> Result<EquivalenceReport> {
    let base = &spec.base;
    let classification = classify(base);
    if classification.nonidentity_idempotents.is_empty() {
        return Err(Error::Unsupported(
            "base has no non-identity idempotents".into(),
        ));
    }
    let e_set = &classification.idempotents;

    let support_in_idempotents = spec
        .q
        .values()
        .all(|q| q.support().all(|j| e_set.contains(&j)));

    let idempotents_max_min =
        matches!(idempotent_chain(base), IdempotentChain::Chain { .. });

    // A product on the sentinel left the window and is in particular a
    // different element from n, so these scans are never window-limited.
    let s_tilde: Vec<usize> = base
        .elements()
        .filter(|&m| !base.is_idempotent(m))
        .collect();
    let no_fixed_idempotent = classification
        .nonidentity_idempotents
        .iter()
        .all(|&n| s_tilde.iter().all(|&m| base.product(n, m) != n));

    let bools = [
        support_in_idempotents,
        idempotents_max_min,
        classification.inverse_free,
        classification.action_free,
        no_fixed_idempotent,
    ];
    Ok(EquivalenceReport {
        support_in_idempotents,
        idempotents_max_min,
        inverse_free: classification.inverse_free,
        action_free: classification.action_free,
        no_fixed_idempotent,
        agreement: bools.iter().all(|&b| b == bools[0]),
    })
}

/// Restricts a verified structure to its idempotents, reindexed along the
/// idempotent chain. Requires every deformed diagonal to be supported in
/// E(S); the restriction is then itself a candidate hermitian hypergroup.
pub fn extract_idempotent_hypergroup(
    k: &ConvolutionStructure,
) -> Result<ConvolutionStructure> {
    let base = k
        .base()
        .ok_or_else(|| Error::Unsupported("structure has no base table".into()))?;
    let chain = match idempotent_chain(base) {
        IdempotentChain::Chain { order } => order,
        IdempotentChain::NotMaxMin { m, n } => {
            return Err(Error::Unsupported(format!(
                "idempotents are not linearly ordered: witness pair ({m}, {n})"
            )))
        }
    };
    let rank: BTreeMap<usize, usize> = chain
        .iter()
        .enumerate()
        .map(|(i, &el)| (el, i))
        .collect();
    for &n in &chain {
        let q = k.kernel(n, n)?;
        if let Some(j) = q.support().find(|j| !rank.contains_key(j)) {
            return Err(Error::Unsupported(format!(
                "spt(δ_n*δ_n) at n = {} contains the non-idempotent {}",
                k.name(n),
                k.name(j)
            )));
        }
    }

    let size = chain.len();
    let names: Vec<String> = chain.iter().map(|&el| k.name(el).to_string()).collect();
    let mut table = vec![vec![0usize; size]; size];
    for i in 0..size {
        for j in 0..size {
            let p = base
                .product_checked(chain[i], chain[j])
                .ok_or(Error::OutOfWindow {
                    m: chain[i],
                    n: chain[j],
                })?;
            table[i][j] = rank[&p];
        }
    }
    let restricted_base = SemigroupTable::new(names.clone(), rank[&base.identity()], table, None)?;

    let mut kernel = vec![vec![None; size]; size];
    for i in 0..size {
        for j in 0..size {
            let q = k.kernel(chain[i], chain[j])?;
            kernel[i][j] = Some(q.map_indices(|el| rank[&el]));
        }
    }
    Ok(ConvolutionStructure::from_parts(
        names,
        rank[&base.identity()],
        kernel,
        Some(restricted_base),
        WindowSemantics::Complete,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{
        build_chebyshev, build_dunkl_ramirez, build_general_deformation, build_max_deformation,
        VSequence,
    };
    use crate::semigroup::build_named_example;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn dunkl_ramirez_verifies() {
        let k = build_dunkl_ramirez(&r(1, 3), 10).unwrap();
        let report = verify_hypergroup(&k, 10);
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.hermitian, Some(true));
        assert!(!report.window_limited);
        assert_eq!(report.triples_checked, 11 * 11 * 11);
    }

    #[test]
    fn group_table_with_identity_kernel_verifies() {
        let z2 = SemigroupTable::new(
            vec!["0".into(), "1".into()],
            0,
            vec![vec![0, 1], vec![1, 0]],
            None,
        )
        .unwrap();
        let spec = DeformationSpec::new(z2, BTreeMap::new());
        let k = ConvolutionStructure::from_deformation_spec(&spec).unwrap();
        let report = verify_hypergroup(&k, 1);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn undeformed_max_fails_support_axiom() {
        let base = build_named_example("zmax", &[3]).unwrap();
        let spec = DeformationSpec::new(base, BTreeMap::new());
        let k = ConvolutionStructure::from_deformation_spec(&spec).unwrap();
        let report = verify_hypergroup(&k, 2);
        assert!(report.associativity.is_pass());
        let support = report.hermitian_support_axiom.unwrap();
        assert_eq!(
            support.witness(),
            Some(&PairWitness { m: 1, n: 1 }),
            "e should be missing from spt(δ_1*δ_1) = δ_1"
        );
    }

    #[test]
    fn perturbed_diagonal_breaks_associativity() {
        // move mass 1/100 of q_3 from key 0 to key 1
        let mut k = build_dunkl_ramirez(&r(1, 3), 6).unwrap();
        let q3 = k.diagonal(3).unwrap().clone();
        let eps = r(1, 100);
        let perturbed = FiniteMeasure::from_entries(
            q3.iter()
                .map(|(j, w)| match j {
                    0 => (j, w - &eps),
                    1 => (j, w + &eps),
                    _ => (j, w.clone()),
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let spec = DeformationSpec::new(
            k.base().unwrap().clone(),
            BTreeMap::from([(3usize, perturbed)])
                .into_iter()
                .chain((1..=6).filter(|&n| n != 3).map(|n| (n, k.diagonal(n).unwrap().clone())))
                .collect(),
        );
        k = ConvolutionStructure::from_deformation_spec(&spec).unwrap();
        let report = verify_semiconvo(&k, 6);
        let ce = report.associativity.witness().expect("must fail");
        // the stored counterexample re-evaluates to genuinely unequal sides
        assert_ne!(ce.lhs, ce.rhs);
        let lhs = convolve_right_point(&k, k.kernel(ce.m, ce.n).unwrap(), ce.k).unwrap();
        let rhs = convolve_left_point(&k, ce.m, k.kernel(ce.n, ce.k).unwrap()).unwrap();
        assert_eq!(&lhs, &ce.lhs);
        assert_eq!(&rhs, &ce.rhs);
    }

    #[test]
    fn haar_weights_match_the_parameterization() {
        let a = r(1, 3);
        let k = build_dunkl_ramirez(&a, 8).unwrap();
        let lambda = haar(&k).unwrap();
        for n in 1..=8usize {
            let expected = (Rational::one() - &a) / a.pow(n as i32);
            assert_eq!(lambda.get(n), Some(&expected));
        }
        assert_eq!(lambda.get(0), Some(&Rational::one()));

        // u ≡ 0: λ(n) = 2^{n−1}
        let k = build_dunkl_ramirez(&r(1, 2), 8).unwrap();
        let lambda = haar(&k).unwrap();
        for n in 1..=8usize {
            assert_eq!(lambda.get(n), Some(&Rational::from_int(1 << (n - 1))));
        }

        // generally λ(n) = v_n
        let v = VSequence::new(vec![r(1, 1), r(3, 2), r(3, 1), r(11, 2)]).unwrap();
        let k = build_max_deformation(&v).unwrap();
        let lambda = haar(&k).unwrap();
        for n in 0..=3usize {
            assert_eq!(lambda.get(n), Some(v.v(n)));
        }
    }

    #[test]
    fn haar_invariance_on_max_deformation() {
        let k = build_dunkl_ramirez(&r(1, 3), 10).unwrap();
        let lambda = haar(&k).unwrap();
        let inv = verify_haar_invariance(&k, &lambda, 10).unwrap();
        assert!(inv.pass, "{inv:?}");
        assert!(!inv.window_limited);
    }

    #[test]
    fn haar_invariance_on_chebyshev() {
        let k = build_chebyshev(1, 16).unwrap();
        let lambda = haar(&k).unwrap();
        assert!(!lambda.complete);
        // λ = (1, 2, 2, …) on the half-window where diagonals are defined
        assert_eq!(lambda.get(0), Some(&Rational::one()));
        for n in 1..=8usize {
            assert_eq!(lambda.get(n), Some(&Rational::from_int(2)));
        }
        let inv = verify_haar_invariance(&k, &lambda, 8).unwrap();
        assert!(inv.pass, "{inv:?}");
        assert!(inv.pairs_checked > 0);
        assert!(inv.window_limited);
    }

    #[test]
    fn haar_rejects_structures_without_identity_in_diagonal() {
        let base = build_named_example("maxsum", &[3, 4]).unwrap();
        let v = VSequence::dunkl_ramirez(&r(1, 3), 2).unwrap();
        let k = build_general_deformation(base, &v).unwrap();
        // naturals convolve to point masses away from the identity
        assert!(haar(&k).is_err());
    }

    #[test]
    fn maxsum_is_semiconvo_but_not_hypergroup() {
        let base = build_named_example("maxsum", &[4, 6]).unwrap();
        let v = VSequence::dunkl_ramirez(&r(1, 3), 3).unwrap();
        let k = build_general_deformation(base, &v).unwrap();
        let report = verify_semiconvo(&k, k.len() - 1);
        assert!(report.all_pass(), "{report:?}");
        assert!(report.window_limited);

        let full = verify_hypergroup(&k, k.len() - 1);
        let support = full.hermitian_support_axiom.unwrap();
        assert!(!support.is_pass(), "S ≠ E(S) cannot be hermitian");
    }

    #[test]
    fn ex23_deformation_fails_associativity() {
        let base = build_named_example("ex2.3", &[3]).unwrap();
        let v = VSequence::dunkl_ramirez(&r(1, 3), 3).unwrap();
        let k = build_general_deformation(base, &v).unwrap();
        let report = verify_semiconvo(&k, k.len() - 1);
        assert!(!report.associativity.is_pass());
    }

    #[test]
    fn equivalence_conditions_on_the_examples() {
        // maxsum: all five hold
        let base = build_named_example("maxsum", &[4, 6]).unwrap();
        let v = VSequence::dunkl_ramirez(&r(1, 3), 3).unwrap();
        let spec = DeformationSpec::from_v(base, &v).unwrap();
        let eq = check_equivalence_conditions(&spec).unwrap();
        assert!(eq.agreement);
        assert!(eq.booleans().iter().all(|&b| b));

        // ex2.3: action-free yet not inverse-free
        let base = build_named_example("ex2.3", &[3]).unwrap();
        let spec = DeformationSpec::new(base, BTreeMap::new());
        let eq = check_equivalence_conditions(&spec).unwrap();
        assert!(!eq.inverse_free);
        assert!(eq.action_free);
        assert!(!eq.agreement);

        // ex2.2: max-min idempotents yet not action-free
        let base = build_named_example("ex2.2", &[8]).unwrap();
        let spec = DeformationSpec::new(base, BTreeMap::new());
        let eq = check_equivalence_conditions(&spec).unwrap();
        assert!(eq.idempotents_max_min);
        assert!(!eq.action_free);
        assert!(!eq.no_fixed_idempotent);
        assert!(!eq.agreement);
    }

    #[test]
    fn idempotent_restriction_of_maxsum_matches_max_deformation() {
        let base = build_named_example("maxsum", &[4, 6]).unwrap();
        let v = VSequence::dunkl_ramirez(&r(1, 3), 3).unwrap();
        let k = build_general_deformation(base, &v).unwrap();
        let restricted = extract_idempotent_hypergroup(&k).unwrap();
        assert_eq!(restricted.len(), 4);
        let report = verify_hypergroup(&restricted, 3);
        assert!(report.all_pass(), "{report:?}");

        let direct = build_max_deformation(&v).unwrap();
        for m in 0..4 {
            for n in 0..4 {
                assert_eq!(
                    restricted.kernel(m, n).unwrap(),
                    direct.kernel(m, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn restriction_of_pure_max_is_the_structure_itself() {
        let v = VSequence::dunkl_ramirez(&r(1, 3), 4).unwrap();
        let k = build_max_deformation(&v).unwrap();
        let restricted = extract_idempotent_hypergroup(&k).unwrap();
        for m in 0..5 {
            for n in 0..5 {
                assert_eq!(restricted.kernel(m, n).unwrap(), k.kernel(m, n).unwrap());
            }
        }
    }

    #[test]
    fn subhypergroup_closure_below_each_level() {
        let k = build_dunkl_ramirez(&r(1, 3), 8).unwrap();
        for n in 0..=8usize {
            for m in 0..=n {
                for mp in 0..=n {
                    let q = k.kernel(m, mp).unwrap();
                    assert!(q.support().all(|j| j <= n));
                }
            }
        }
    }
}
