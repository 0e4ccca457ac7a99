//! Finite (or window-truncated) commutative monoids as Cayley tables.
//!
//! Infinite semigroups are represented on a finite window with one absorbing
//! sentinel element standing for "the product left the window". Every
//! downstream scan quantifies only over sentinel-avoiding products and
//! reports when a check was window-limited, so nothing is ever claimed
//! beyond what was verified exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A commutative monoid given by its multiplication table.
///
/// Commutativity, the identity law and (sentinel-avoiding) associativity are
/// verified at construction, never assumed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemigroupTable {
    element_names: Vec<String>,
    identity: usize,
    table: Vec<Vec<usize>>,
    sentinel: Option<usize>,
}

impl SemigroupTable {
    pub fn new(
        element_names: Vec<String>,
        identity: usize,
        table: Vec<Vec<usize>>,
        sentinel: Option<usize>,
    ) -> Result<Self> {
        let n = element_names.len();
        if n == 0 {
            return Err(Error::invalid("/elements", "element list is empty"));
        }
        if table.len() != n {
            return Err(Error::invalid(
                "/table",
                format!("expected {n} rows, found {}", table.len()),
            ));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(
                    format!("/table/{i}"),
                    format!("expected {n} columns, found {}", row.len()),
                ));
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::invalid(
                        format!("/table/{i}/{j}"),
                        format!("index {v} out of range"),
                    ));
                }
            }
        }
        if identity >= n {
            return Err(Error::invalid("/identity", "index out of range"));
        }
        if let Some(s) = sentinel {
            if s >= n {
                return Err(Error::invalid("/sentinel", "index out of range"));
            }
            if s == identity {
                return Err(Error::invalid("/sentinel", "sentinel cannot be the identity"));
            }
        }
        let t = SemigroupTable {
            element_names,
            identity,
            table,
            sentinel,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for m in 0..n {
            if self.table[m][self.identity] != m || self.table[self.identity][m] != m {
                return Err(Error::BrokenIdentity { m });
            }
        }
        if let Some(s) = self.sentinel {
            for m in 0..n {
                if self.table[s][m] != s || self.table[m][s] != s {
                    return Err(Error::invalid(
                        "/sentinel",
                        format!("sentinel is not absorbing at element {m}"),
                    ));
                }
            }
        }
        for m in 0..n {
            for k in m + 1..n {
                if self.table[m][k] != self.table[k][m] {
                    return Err(Error::NotCommutative { m, n: k });
                }
            }
        }
        // Associativity over all triples whose intermediate products stay in
        // the window.
        for m in 0..n {
            for p in 0..n {
                let mp = self.table[m][p];
                for k in 0..n {
                    let pk = self.table[p][k];
                    if self.is_sentinel(mp) || self.is_sentinel(pk) {
                        continue;
                    }
                    let lhs = self.table[mp][k];
                    let rhs = self.table[m][pk];
                    if self.is_sentinel(lhs) || self.is_sentinel(rhs) {
                        continue;
                    }
                    if lhs != rhs {
                        return Err(Error::NotAssociative { m, n: p, k });
                    }
                }
            }
        }
        Ok(())
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

    pub fn sentinel(&self) -> Option<usize> {
        self.sentinel
    }

    pub fn name(&self, i: usize) -> &str {
        &self.element_names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.element_names
    }

    pub fn product(&self, m: usize, n: usize) -> usize {
        self.table[m][n]
    }

    /// `None` when the product fell onto the sentinel.
    pub fn product_checked(&self, m: usize, n: usize) -> Option<usize> {
        let p = self.table[m][n];
        (!self.is_sentinel(p)).then_some(p)
    }

    pub fn is_sentinel(&self, i: usize) -> bool {
        self.sentinel == Some(i)
    }

    /// Indices of the proper (non-sentinel) elements.
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.is_sentinel(i))
    }

    pub fn is_idempotent(&self, m: usize) -> bool {
        !self.is_sentinel(m) && self.table[m][m] == m
    }

    /// Whether any product in the table hits the sentinel, i.e. whether
    /// scans over this table are window-limited.
    pub fn window_limited(&self) -> bool {
        match self.sentinel {
            None => false,
            Some(s) => self
                .elements()
                .any(|m| self.elements().any(|n| self.table[m][n] == s)),
        }
    }
}

/// Structural classification of a commutative monoid: idempotents, the
/// maximal group of units, the units acting trivially on the non-identity
/// idempotents, and the derived flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// E(S): all idempotent elements (the identity included).
    pub idempotents: Vec<usize>,
    /// E_0(S) = E(S) \ {e}.
    pub nonidentity_idempotents: Vec<usize>,
    /// G(S): elements with a two-sided inverse.
    pub units: Vec<usize>,
    /// G_1(S): units g with g·m = m for every m in E_0(S). Equals G(S) by
    /// empty quantification when E_0(S) is empty.
    pub units_acting_trivially: Vec<usize>,
    /// m·n = e forces m = n = e.
    pub inverse_free: bool,
    /// G_1(S) = {e}.
    pub action_free: bool,
    /// Every product equals one of its factors.
    pub max_min_type: bool,
    /// The non-idempotent part S̃ = S \ E(S) is an ideal. False when S̃ is
    /// empty (an ideal is non-empty by definition).
    pub nonidempotents_ideal: bool,
    /// S̃ is an ideal and its complement is closed under the product.
    pub nonidempotents_prime_ideal: bool,
    /// Some scan skipped a product that left the window.
    pub window_limited: bool,
}

/// Classifies by exhaustive table scans. The sentinel is excluded from all
/// sets; products hitting it are skipped and flagged.
pub fn classify(s: &SemigroupTable) -> Classification {
    let e = s.identity();
    let mut window_limited = false;

    let idempotents: Vec<usize> = s.elements().filter(|&m| s.is_idempotent(m)).collect();
    let nonidentity_idempotents: Vec<usize> =
        idempotents.iter().copied().filter(|&m| m != e).collect();

    let units: Vec<usize> = s
        .elements()
        .filter(|&g| s.elements().any(|h| s.product(g, h) == e))
        .collect();

    let units_acting_trivially: Vec<usize> = units
        .iter()
        .copied()
        .filter(|&g| {
            nonidentity_idempotents
                .iter()
                .all(|&m| s.product(g, m) == m)
        })
        .collect();

    let mut inverse_free = true;
    let mut max_min_type = true;
    for m in s.elements() {
        for n in s.elements() {
            let p = s.product(m, n);
            if p == e && (m != e || n != e) {
                inverse_free = false;
            }
            // A product that left the window is in particular not equal to
            // either factor.
            if p != m && p != n {
                max_min_type = false;
            }
        }
    }

    let s_tilde: Vec<usize> = s
        .elements()
        .filter(|&m| !s.is_idempotent(m))
        .collect();
    let (nonidempotents_ideal, nonidempotents_prime_ideal) = if s_tilde.is_empty() {
        (false, false)
    } else {
        let mut ideal = true;
        for &t in &s_tilde {
            for x in s.elements() {
                match s.product_checked(t, x) {
                    None => window_limited = true,
                    Some(p) => {
                        if !s_tilde.contains(&p) {
                            ideal = false;
                        }
                    }
                }
            }
        }
        let mut complement_closed = true;
        let complement: Vec<usize> = s
            .elements()
            .filter(|m| !s_tilde.contains(m))
            .collect();
        for &x in &complement {
            for &y in &complement {
                match s.product_checked(x, y) {
                    None => window_limited = true,
                    Some(p) => {
                        if !complement.contains(&p) {
                            complement_closed = false;
                        }
                    }
                }
            }
        }
        (ideal, ideal && complement_closed)
    };

    // e always lies in G_1(S), so G_1(S) = {e} iff the set is a singleton.
    let action_free = units_acting_trivially.len() == 1;

    Classification {
        idempotents,
        nonidentity_idempotents,
        units,
        units_acting_trivially,
        inverse_free,
        action_free,
        max_min_type,
        nonidempotents_ideal,
        nonidempotents_prime_ideal,
        window_limited,
    }
}

/// Outcome of the power dichotomy: either some power of the element is
/// idempotent, or the powers marched out of the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "snake_case")]
pub enum ElementOrder {
    /// Least `j ≥ 1` with `m^j` idempotent.
    Finite(usize),
    /// The power sequence reached the sentinel before hitting an idempotent.
    InfiniteWithinWindow,
}

/// Walks the powers `m, m², m³, …` until one is idempotent or the sentinel
/// absorbs them. In a valid finite table one of the two always happens.
pub fn element_order(s: &SemigroupTable, m: usize) -> ElementOrder {
    assert!(!s.is_sentinel(m), "sentinel has no order");
    let mut power = m;
    for j in 1..=2 * s.len() + 1 {
        if s.is_idempotent(power) {
            return ElementOrder::Finite(j);
        }
        power = s.product(power, m);
        if s.is_sentinel(power) {
            return ElementOrder::InfiniteWithinWindow;
        }
    }
    // Unreachable for a validated table: the power sequence of a finite
    // semigroup always contains an idempotent.
    unreachable!("power sequence of a valid table neither cycled to an idempotent nor overflowed")
}

/// Result of ordering the idempotents: the induced chain when `(E(S), ·)`
/// is max-min type, otherwise a witness pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IdempotentChain {
    /// E(S) listed in increasing order: `m < n` iff `m·n = n ≠ m`. The chain
    /// is order-isomorphic to some ℤ_k, i.e. a prefix of ℤ_+.
    Chain { order: Vec<usize> },
    /// `m·n` equals neither factor.
    NotMaxMin { m: usize, n: usize },
}

/// Orders E(S) by `m < n` iff `m·n = n ≠ m`, when that relation is total.
pub fn idempotent_chain(s: &SemigroupTable) -> IdempotentChain {
    let idem: Vec<usize> = s.elements().filter(|&m| s.is_idempotent(m)).collect();
    for &m in &idem {
        for &n in &idem {
            let p = s.product(m, n);
            if p != m && p != n {
                return IdempotentChain::NotMaxMin { m, n };
            }
        }
    }
    // Products of idempotents never reach the sentinel (they equal a factor),
    // and transitivity follows from associativity, so this comparator is a
    // total order.
    let mut order = idem;
    order.sort_by(|&m, &n| {
        if m == n {
            std::cmp::Ordering::Equal
        } else if s.product(m, n) == n {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    IdempotentChain::Chain { order }
}

/// Ideal test for a subset `T`, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealReport {
    pub is_subsemigroup: bool,
    /// Pair in T whose product escapes T.
    pub subsemigroup_witness: Option<(usize, usize)>,
    pub is_ideal: bool,
    /// Pair (t, s) with t ∈ T, s ∈ S and t·s outside T.
    pub ideal_witness: Option<(usize, usize)>,
    pub is_prime_ideal: bool,
    pub window_limited: bool,
}

/// Scans `T·T` and `T·S` for closure; a prime ideal additionally has its
/// complement closed under the product.
pub fn check_ideal(s: &SemigroupTable, t: &[usize]) -> Result<IdealReport> {
    if t.is_empty() {
        return Err(Error::Parameter("subset T is empty".into()));
    }
    for &x in t {
        if x >= s.len() || s.is_sentinel(x) {
            return Err(Error::Parameter(format!(
                "subset contains invalid element {x}"
            )));
        }
    }
    let in_t = |x: usize| t.contains(&x);
    let mut window_limited = false;

    let mut subsemigroup_witness = None;
    for &x in t {
        for &y in t {
            match s.product_checked(x, y) {
                None => window_limited = true,
                Some(p) => {
                    if !in_t(p) && subsemigroup_witness.is_none() {
                        subsemigroup_witness = Some((x, y));
                    }
                }
            }
        }
    }

    let mut ideal_witness = None;
    for &x in t {
        for y in s.elements() {
            match s.product_checked(x, y) {
                None => window_limited = true,
                Some(p) => {
                    if !in_t(p) && ideal_witness.is_none() {
                        ideal_witness = Some((x, y));
                    }
                }
            }
        }
    }

    let is_ideal = ideal_witness.is_none();
    let complement: Vec<usize> = s.elements().filter(|&x| !in_t(x)).collect();
    let is_proper = !complement.is_empty();
    let mut complement_closed = true;
    for &x in &complement {
        for &y in &complement {
            match s.product_checked(x, y) {
                None => window_limited = true,
                Some(p) => {
                    if in_t(p) {
                        complement_closed = false;
                    }
                }
            }
        }
    }

    Ok(IdealReport {
        is_subsemigroup: subsemigroup_witness.is_none(),
        subsemigroup_witness,
        is_ideal,
        ideal_witness,
        is_prime_ideal: is_ideal && is_proper && complement_closed,
        window_limited,
    })
}

/// Builds one of the reference Cayley tables.
///
/// * `"zmax"`, params `[k]` — the linearly ordered set `{0, …, k−1}` under max.
/// * `"zplus"`, params `[n]` — the window `{0, …, n}` of ℤ_+ under max
///   (same table as `zmax` with `k = n+1`).
/// * `"ex2.2"`, params `[r]` — `(ℤ_+ × {0}) ∪ {(0,1)}` truncated at `r`:
///   max on the first coordinate, `(0,1)` a self-inverse unit acting
///   trivially on the idempotents.
/// * `"ex2.3"`, params `[w]` — `(ℤ_+, max) × ({0,1}, + mod 2)` truncated
///   at `w` in the first coordinate.
/// * `"maxsum"`, params `[t, w]` — the chain `T = {1 − 1/(r+1)}` of `t`
///   idempotents together with the naturals `1..=w`; products take the max
///   when either factor lies in `T` and the sum when both are naturals.
///   Sums beyond `w` land on an absorbing sentinel.
pub fn build_named_example(name: &str, params: &[usize]) -> Result<SemigroupTable> {
    let want = |k: usize| -> Result<()> {
        if params.len() != k {
            return Err(Error::Parameter(format!(
                "example {name:?} takes {k} parameter(s), got {}",
                params.len()
            )));
        }
        Ok(())
    };
    match name {
        "zmax" | "zplus" => {
            want(1)?;
            let k = if name == "zmax" { params[0] } else { params[0] + 1 };
            if k < 1 {
                return Err(Error::Parameter("window must contain the identity".into()));
            }
            let names = (0..k).map(|i| i.to_string()).collect();
            let table = (0..k).map(|m| (0..k).map(|n| m.max(n)).collect()).collect();
            SemigroupTable::new(names, 0, table, None)
        }
        "ex2.2" => {
            want(1)?;
            let r = params[0];
            if r < 2 {
                return Err(Error::Parameter("window must be at least 2".into()));
            }
            // indices 0..=r are (j,0); index r+1 is (0,1)
            let unit = r + 1;
            let mut names: Vec<String> = (0..=r).map(|j| format!("({j},0)")).collect();
            names.push("(0,1)".into());
            let n = names.len();
            let product = |i: usize, k: usize| -> usize {
                match (i == unit, k == unit) {
                    (false, false) => i.max(k),
                    (true, true) => 0,
                    (true, false) => {
                        if k == 0 {
                            unit
                        } else {
                            k
                        }
                    }
                    (false, true) => {
                        if i == 0 {
                            unit
                        } else {
                            i
                        }
                    }
                }
            };
            let table = (0..n)
                .map(|i| (0..n).map(|k| product(i, k)).collect())
                .collect();
            SemigroupTable::new(names, 0, table, None)
        }
        "ex2.3" => {
            want(1)?;
            let w = params[0];
            if w < 2 {
                return Err(Error::Parameter("window must be at least 2".into()));
            }
            // index = 2j + α for the pair (j, α)
            let names: Vec<String> = (0..=w)
                .flat_map(|j| [format!("({j},0)"), format!("({j},1)")])
                .collect();
            let n = names.len();
            let table = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|k| 2 * (i / 2).max(k / 2) + (i % 2 + k % 2) % 2)
                        .collect()
                })
                .collect();
            SemigroupTable::new(names, 0, table, None)
        }
        "maxsum" => {
            want(2)?;
            let (t, w) = (params[0], params[1]);
            if t < 2 || w < 1 {
                return Err(Error::Parameter(
                    "maxsum needs a chain of length ≥ 2 and a window of ≥ 1 naturals".into(),
                ));
            }
            // indices 0..t: the chain 1 − 1/(r+1); indices t..t+w: naturals
            // 1..=w; last index: sentinel
            let mut names: Vec<String> = (0..t)
                .map(|r| {
                    if r == 0 {
                        "0".to_string()
                    } else {
                        format!("{r}/{}", r + 1)
                    }
                })
                .collect();
            names.extend((1..=w).map(|v| v.to_string()));
            names.push("#overflow".into());
            let n = names.len();
            let sentinel = n - 1;
            let natural = |i: usize| -> Option<usize> {
                (i >= t && i < sentinel).then(|| i - t + 1)
            };
            let product = |i: usize, k: usize| -> usize {
                if i == sentinel || k == sentinel {
                    return sentinel;
                }
                match (natural(i), natural(k)) {
                    // both natural: additive part
                    (Some(a), Some(b)) => {
                        if a + b <= w {
                            t + (a + b) - 1
                        } else {
                            sentinel
                        }
                    }
                    // at least one chain element: everything in the chain
                    // sits below every natural, so max applies
                    _ => i.max(k),
                }
            };
            let table = (0..n)
                .map(|i| (0..n).map(|k| product(i, k)).collect())
                .collect();
            SemigroupTable::new(names, 0, table, Some(sentinel))
        }
        _ => Err(Error::Parameter(format!("unknown example {name:?}"))),
    }
}
