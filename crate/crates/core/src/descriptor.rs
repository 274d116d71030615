//! Symbolic shapes of abelian groups: direct sums of copies of `Q`, the
//! divisible `p`-groups of rank one, and finite cyclic groups of prime-power
//! order, with symbolic multiplicities, plus an optional unstructured
//! countable summand. The torsion, divisible-part and splitting calculus
//! works on these shapes without ever materializing elements.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cardinal::{card_add, card_predicates, CardValue, SymbolicCardinal};
use crate::group::{gcd, is_prime, ConcreteGroup, GroupElem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DescriptorError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cyclic summand exponent must be at least 1")]
    ZeroExponent,
    #[error("n must be positive")]
    ZeroN,
    #[error("the bounded-divisibility test is defined for pure shapes only; this descriptor has a countable summand")]
    CountablePartPresent,
    #[error("splitting off a countable complement requires the caller to declare the quotient by the divisible-plus-torsion part countable")]
    HypothesisNotDeclared,
    #[error("summand {0} has uncountable multiplicity but does not fit the bounded-divisible shape, contradicting the declared countability hypothesis")]
    HypothesisViolated(SIndex),
}

/// Index of a building-block summand: `Inf` for the rationals, `Pruefer(p)`
/// for the rank-one divisible `p`-group, `Cyc(p, k)` for the cyclic group of
/// order `p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SIndex {
    Inf,
    Pruefer(u64),
    Cyc(u64, u32),
}

impl SIndex {
    pub fn pruefer(p: u64) -> Result<Self, DescriptorError> {
        if !is_prime(p) {
            return Err(DescriptorError::NotPrime(p));
        }
        Ok(SIndex::Pruefer(p))
    }

    pub fn cyc(p: u64, k: u32) -> Result<Self, DescriptorError> {
        if !is_prime(p) {
            return Err(DescriptorError::NotPrime(p));
        }
        if k == 0 {
            return Err(DescriptorError::ZeroExponent);
        }
        Ok(SIndex::Cyc(p, k))
    }

    /// Indices admissible outside a countable exceptional set (no Pruefer
    /// blocks there).
    pub fn is_tame(&self) -> bool {
        !matches!(self, SIndex::Pruefer(_))
    }
}

impl fmt::Display for SIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SIndex::Inf => write!(f, "q"),
            SIndex::Pruefer(p) => write!(f, "pruefer {p}"),
            SIndex::Cyc(p, k) => write!(f, "z {p}^{k}"),
        }
    }
}

/// Declared structural knowledge about an unstructured countable summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountableDecl {
    /// `Some(true)`: the summand is divisible; `Some(false)`: reduced.
    pub divisible: Option<bool>,
    /// `Some(true)`: the summand is bounded-divisible (with `bound` as a
    /// witness when known); `Some(false)`: for every n some element escapes
    /// the divisible part plus the n-torsion.
    pub bounded_divisible: Option<bool>,
    pub bound: Option<u64>,
}

impl CountableDecl {
    pub fn divisible() -> Self {
        CountableDecl { divisible: Some(true), bounded_divisible: Some(true), bound: Some(1) }
    }

    pub fn reduced() -> Self {
        CountableDecl { divisible: Some(false), ..Default::default() }
    }

    pub fn bounded(n: u64) -> Self {
        CountableDecl { divisible: None, bounded_divisible: Some(true), bound: Some(n) }
    }

    /// A summand like the integers: reduced and escaping every torsion bound.
    pub fn unbounded() -> Self {
        CountableDecl { divisible: Some(false), bounded_divisible: Some(false), bound: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountablePart {
    #[default]
    None,
    Countable(CountableDecl),
}

impl CountablePart {
    pub fn is_present(&self) -> bool {
        matches!(self, CountablePart::Countable(_))
    }
}

/// Symbolic direct-sum shape of an abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AbelianDescriptor {
    pub countable: CountablePart,
    lambdas: BTreeMap<SIndex, SymbolicCardinal>,
}

/// Outcome of separating the divisible part from the reduced part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivSplit {
    pub divisible: AbelianDescriptor,
    pub reduced: AbelianDescriptor,
    /// Set when the countable summand's divisibility was undeclared; the
    /// reduced component is then known only up to a countable summand.
    pub reduced_unknown_countable: bool,
}

/// Outcome of splitting off a countable complement: the bounded-divisible
/// component `M`, plus a record of what was absorbed into the countable `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitKM {
    pub m: AbelianDescriptor,
    pub absorbed_into_k: Vec<(SIndex, SymbolicCardinal)>,
    pub countable_part_absorbed: bool,
}

impl AbelianDescriptor {
    pub fn trivial() -> Self {
        AbelianDescriptor::default()
    }

    pub fn with_countable(mut self, decl: CountableDecl) -> Self {
        self.countable = CountablePart::Countable(decl);
        self
    }

    pub fn with_summand(mut self, s: SIndex, multiplicity: SymbolicCardinal) -> Self {
        self.add_summand(s, multiplicity);
        self
    }

    /// Adds `multiplicity` copies of the block `s`; zero multiplicities are
    /// not stored.
    pub fn add_summand(&mut self, s: SIndex, multiplicity: SymbolicCardinal) {
        if multiplicity.is_zero() {
            return;
        }
        let entry = self
            .lambdas
            .remove(&s)
            .map(|old| match card_add(&old.into(), &multiplicity.clone().into()) {
                CardValue::Card(c) => c,
                // joins only arise from distinct named atoms; keep the first
                CardValue::Join(mut atoms) => SymbolicCardinal::Mid(atoms.pop_first().unwrap()),
            })
            .unwrap_or(multiplicity);
        self.lambdas.insert(s, entry);
    }

    pub fn lambdas(&self) -> impl Iterator<Item = (&SIndex, &SymbolicCardinal)> {
        self.lambdas.iter()
    }

    pub fn multiplicity(&self, s: &SIndex) -> SymbolicCardinal {
        self.lambdas.get(s).cloned().unwrap_or(SymbolicCardinal::Fin(0))
    }

    pub fn is_trivial(&self) -> bool {
        self.lambdas.is_empty() && !self.countable.is_present()
    }

    /// Whether the whole group is countable (every multiplicity at most
    /// `ℵ₀`; the unstructured summand is countable by definition).
    pub fn is_countable(&self) -> bool {
        self.lambdas.values().all(|c| c.is_countable())
    }

    /// `{g : ng = 0}` at the level of shapes. Rational blocks are
    /// torsion-free; a Pruefer block contributes the cyclic group of order
    /// `p^v` where `p^v` exactly divides `n`; a cyclic block of order `p^k`
    /// contributes the cyclic group of order `p^min(k,v)`. The unstructured
    /// countable summand stays a countable marker (its torsion is countable
    /// and bounded by `n`).
    pub fn tor_n(&self, n: u64) -> Result<AbelianDescriptor, DescriptorError> {
        if n == 0 {
            return Err(DescriptorError::ZeroN);
        }
        let mut out = AbelianDescriptor::trivial();
        for (s, lam) in &self.lambdas {
            match *s {
                SIndex::Inf => {}
                SIndex::Pruefer(p) => {
                    let v = padic_valuation(n, p);
                    if v >= 1 {
                        out.add_summand(SIndex::Cyc(p, v), lam.clone());
                    }
                }
                SIndex::Cyc(p, k) => {
                    let m = k.min(padic_valuation(n, p));
                    if m >= 1 {
                        out.add_summand(SIndex::Cyc(p, m), lam.clone());
                    }
                }
            }
        }
        if self.countable.is_present() {
            out.countable = CountablePart::Countable(CountableDecl::bounded(n));
        }
        Ok(out)
    }

    /// Separates the maximal divisible subgroup (rational and Pruefer
    /// blocks) from the reduced complement (cyclic blocks).
    pub fn div_part(&self) -> DivSplit {
        let mut divisible = AbelianDescriptor::trivial();
        let mut reduced = AbelianDescriptor::trivial();
        for (s, lam) in &self.lambdas {
            match s {
                SIndex::Inf | SIndex::Pruefer(_) => divisible.add_summand(*s, lam.clone()),
                SIndex::Cyc(..) => reduced.add_summand(*s, lam.clone()),
            }
        }
        let mut unknown = false;
        if let CountablePart::Countable(decl) = self.countable {
            match decl.divisible {
                Some(true) => divisible.countable = self.countable,
                Some(false) => reduced.countable = self.countable,
                None => {
                    reduced.countable = self.countable;
                    unknown = true;
                }
            }
        }
        DivSplit { divisible, reduced, reduced_unknown_countable: unknown }
    }

    /// Whether the shape is a sum of rationals, Pruefer groups and cyclic
    /// groups of order dividing `n`. Defined for pure shapes only.
    pub fn is_n_bounded_divisible(&self, n: u64) -> Result<bool, DescriptorError> {
        if n == 0 {
            return Err(DescriptorError::ZeroN);
        }
        if self.countable.is_present() {
            return Err(DescriptorError::CountablePartPresent);
        }
        Ok(self.lambdas.keys().all(|s| match *s {
            SIndex::Inf | SIndex::Pruefer(_) => true,
            SIndex::Cyc(p, k) => divides_prime_power(p, k, n),
        }))
    }

    /// Whether the shape is bounded-divisible for some `n`; `None` when an
    /// undeclared countable summand leaves it open. Pure shapes always are
    /// (the least common multiple of the finitely many cyclic orders works).
    pub fn is_bounded_divisible(&self) -> Option<bool> {
        match self.countable {
            CountablePart::None => Some(true),
            CountablePart::Countable(decl) => decl.bounded_divisible,
        }
    }

    /// Splits `G = K ⊕ M` with `K` countable and `M` bounded-divisible,
    /// given the caller's declaration that the quotient by the
    /// divisible-plus-`n`-torsion part is countable. Countable multiplicities
    /// are absorbed into `K`; uncountable ones pass through to `M` unchanged.
    pub fn split_k_m(&self, n: u64, quotient_countable: bool) -> Result<SplitKM, DescriptorError> {
        if n == 0 {
            return Err(DescriptorError::ZeroN);
        }
        if !quotient_countable {
            return Err(DescriptorError::HypothesisNotDeclared);
        }
        let mut m = AbelianDescriptor::trivial();
        let mut absorbed = Vec::new();
        for (s, lam) in &self.lambdas {
            let fits = match *s {
                SIndex::Inf | SIndex::Pruefer(_) => true,
                SIndex::Cyc(p, k) => divides_prime_power(p, k, n),
            };
            if lam.is_countable() {
                absorbed.push((*s, lam.clone()));
            } else if fits {
                m.add_summand(*s, lam.clone());
            } else {
                return Err(DescriptorError::HypothesisViolated(*s));
            }
        }
        Ok(SplitKM {
            m,
            absorbed_into_k: absorbed,
            countable_part_absorbed: self.countable.is_present(),
        })
    }

    /// Whether some element escapes the divisible part plus the `n`-torsion:
    /// true exactly when a cyclic block of order not dividing `n` is present,
    /// or the countable summand is declared to escape every bound.
    pub fn phi_n_holds(&self, n: u64) -> bool {
        assert!(n >= 1, "n must be positive");
        let cyc_escape = self.lambdas.keys().any(|s| match *s {
            SIndex::Cyc(p, k) => !divides_prime_power(p, k, n),
            _ => false,
        });
        let countable_escape = match self.countable {
            CountablePart::Countable(decl) => decl.bounded_divisible == Some(false),
            CountablePart::None => false,
        };
        cyc_escape || countable_escape
    }

    /// Total multiplicity of summands surviving in the quotient by the
    /// divisible part plus the `n`-torsion (cyclic blocks of order not
    /// dividing `n`). The countable summand contributes at most countably.
    pub fn quotient_mod_div_tor(&self, n: u64) -> CardValue {
        let mut acc = CardValue::zero();
        for (s, lam) in &self.lambdas {
            if let SIndex::Cyc(p, k) = *s {
                if !divides_prime_power(p, k, n) {
                    acc = card_add(&acc, &lam.clone().into());
                }
            }
        }
        acc
    }

    pub fn quotient_mod_div_tor_uncountable(&self, n: u64) -> bool {
        !card_predicates(&self.quotient_mod_div_tor(n)).leq_aleph0
    }

    /// Exact shape of a concrete abelian group; `None` for non-abelian input.
    /// Finite parts decompose into primary cyclic blocks; an integer summand
    /// becomes a countable summand declared reduced and unbounded.
    pub fn of_concrete(g: &ConcreteGroup) -> Option<AbelianDescriptor> {
        if !g.is_abelian() {
            return None;
        }
        let mut out = AbelianDescriptor::trivial();
        accumulate_concrete(g, &mut out);
        Some(out)
    }
}

fn accumulate_concrete(g: &ConcreteGroup, out: &mut AbelianDescriptor) {
    match g {
        ConcreteGroup::IntCyclic => {
            out.countable = CountablePart::Countable(CountableDecl::unbounded());
        }
        ConcreteGroup::ModCyclic { modulus } => {
            let (p, k) = crate::group::prime_power(*modulus).expect("validated modulus");
            out.add_summand(SIndex::Cyc(p, k), SymbolicCardinal::Fin(1));
        }
        ConcreteGroup::Table(t) => {
            for (p, k, count) in primary_decomposition_table(g, t.order() as u64) {
                out.add_summand(SIndex::Cyc(p, k), SymbolicCardinal::Fin(count));
            }
        }
        ConcreteGroup::DirectSum(gs) => {
            for part in gs {
                accumulate_concrete(part, out);
            }
        }
    }
}

/// Primary cyclic invariants `(p, k, multiplicity)` of a finite abelian
/// group, recovered by counting elements killed by each prime power.
fn primary_decomposition_table(g: &ConcreteGroup, order: u64) -> Vec<(u64, u32, u64)> {
    let elements = g.elements().expect("finite group");
    let mut out = Vec::new();
    let mut rem = order;
    let mut p = 2u64;
    while rem > 1 {
        if rem.is_multiple_of(p) {
            while rem.is_multiple_of(p) {
                rem /= p;
            }
            // d[j] = log_p #{x : p^j x = 0}
            let mut d = vec![0u32];
            loop {
                let j = d.len() as u32;
                let pj = p.pow(j) as i64;
                let count = elements.iter().filter(|x| g.is_identity(&g.pow(x, pj))).count() as u64;
                let dj = count.ilog(p);
                let stable = *d.last().unwrap() == dj;
                d.push(dj);
                if stable {
                    break;
                }
            }
            for m in 1..d.len() - 1 {
                let rising = d[m] - d[m - 1];
                let next = d[m + 1] - d[m];
                if rising > next {
                    out.push((p, m as u32, (rising - next) as u64));
                }
            }
        }
        p += 1;
    }
    out
}

fn padic_valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Whether `p^k` divides `n`.
fn divides_prime_power(p: u64, k: u32, n: u64) -> bool {
    match p.checked_pow(k) {
        Some(pk) => n.is_multiple_of(pk),
        None => false,
    }
}

/// Greatest common divisor exposed for torsion-composition laws in tests.
pub fn tor_gcd(n: u64, m: u64) -> u64 {
    gcd(n, m)
}

/// Brute-force `{x : n·x = identity}` over a finite concrete group, as a
/// sorted element list. Used as the element-level reference for the
/// shape-level torsion calculus.
pub fn brute_force_tor(g: &ConcreteGroup, n: u64) -> Vec<GroupElem> {
    let elements = g.elements().expect("finite group");
    elements.into_iter().filter(|x| g.is_identity(&g.pow(x, n as i64))).collect()
}
