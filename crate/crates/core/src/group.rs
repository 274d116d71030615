//! Concrete computable factor groups: finite multiplication tables, the
//! integers, cyclic groups of prime-power order, and finite direct sums of
//! these. Tables are validated eagerly on load.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("multiplication table is not square over {0} elements")]
    MalformedTable(usize),
    #[error("table entry {0} out of range")]
    EntryOutOfRange(usize),
    #[error("index 0 is not a two-sided identity (fails at element {0})")]
    NotIdentity(usize),
    #[error("element {0} has no two-sided inverse")]
    NoInverse(usize),
    #[error("associativity fails at triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("modulus {0} is not a prime power >= 2")]
    BadModulus(u64),
    #[error("element {0} does not belong to the factor group")]
    ForeignElement(String),
}

/// Returns `(p, k)` with `n = p^k`, `k >= 1`, if `n` is a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut m = n;
    let mut p = 0u64;
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Some((n, 1)); // n itself is prime
    }
    let mut k = 0u32;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    if m == 1 {
        Some((p, k))
    } else {
        None
    }
}

pub fn is_prime(n: u64) -> bool {
    matches!(prime_power(n), Some((_, 1)))
}

/// A finite group given by its row-major multiplication table over element
/// indices, with the identity at index 0. Group laws are checked on load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTable {
    n: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
}

/// Checks that a row-major table describes a group with identity at index 0.
/// The first failing associativity triple is reported.
pub fn group_verify(rows: &[Vec<usize>]) -> Result<Vec<usize>, GroupError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(GroupError::MalformedTable(n));
    }
    for &e in rows.iter().flatten() {
        if e >= n {
            return Err(GroupError::EntryOutOfRange(e));
        }
    }
    for a in 0..n {
        if rows[0][a] != a || rows[a][0] != a {
            return Err(GroupError::NotIdentity(a));
        }
    }
    let mut inv = vec![usize::MAX; n];
    for a in 0..n {
        match (0..n).find(|&b| rows[a][b] == 0 && rows[b][a] == 0) {
            Some(b) => inv[a] = b,
            None => return Err(GroupError::NoInverse(a)),
        }
    }
    // Deterministic even when parallel: find_first keeps triple order.
    let bad = (0..n * n).into_par_iter().find_map_first(|ab| {
        let (a, b) = (ab / n, ab % n);
        (0..n).find(|&c| rows[rows[a][b]][c] != rows[a][rows[b][c]]).map(|c| (a, b, c))
    });
    if let Some((a, b, c)) = bad {
        return Err(GroupError::NotAssociative(a, b, c));
    }
    Ok(inv)
}

impl FiniteTable {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let inv = group_verify(&rows)?;
        let n = rows.len();
        let mul = rows.into_iter().flatten().collect();
        Ok(FiniteTable { n, mul, inv })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.mul(a, b)).collect()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Table of the cyclic group of order `n`.
    pub fn cyclic(n: usize) -> Self {
        let rows: Vec<Vec<usize>> =
            (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteTable::new(rows).expect("cyclic tables satisfy the group laws")
    }

    /// Table of the direct product of two tables, indices in row-major order.
    pub fn direct_product(&self, other: &FiniteTable) -> Self {
        let m = other.n;
        let n = self.n * m;
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| self.mul(a / m, b / m) * m + other.mul(a % m, b % m))
                    .collect()
            })
            .collect();
        FiniteTable::new(rows).expect("products of groups satisfy the group laws")
    }

    /// Table of the symmetric group on `deg` letters, elements being the
    /// permutations in lexicographic order (identity first).
    pub fn symmetric(deg: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = vec![(0..deg).collect()];
        // next_permutation enumeration keeps identity at index 0
        let mut cur: Vec<usize> = (0..deg).collect();
        while next_permutation(&mut cur) {
            perms.push(cur.clone());
        }
        let idx = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let rows: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        // (a*b)(x) = a(b(x))
                        let comp: Vec<usize> = (0..deg).map(|x| a[b[x]]).collect();
                        idx(&comp)
                    })
                    .collect()
            })
            .collect();
        FiniteTable::new(rows).expect("symmetric group tables satisfy the group laws")
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// An element of a [`ConcreteGroup`]; the variant must match the group kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElem {
    Index(usize),
    Int(i64),
    Mod(u64),
    Tuple(Vec<GroupElem>),
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Index(i) => write!(f, "{i}"),
            GroupElem::Int(x) => write!(f, "{x}"),
            GroupElem::Mod(x) => write!(f, "{x}"),
            GroupElem::Tuple(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

/// A vertex group the word engine can compute in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConcreteGroup {
    Table(FiniteTable),
    /// The integers under addition.
    IntCyclic,
    /// Integers modulo a prime power.
    ModCyclic { modulus: u64 },
    DirectSum(Vec<ConcreteGroup>),
}

impl ConcreteGroup {
    pub fn mod_cyclic(modulus: u64) -> Result<Self, GroupError> {
        if prime_power(modulus).is_none() {
            return Err(GroupError::BadModulus(modulus));
        }
        Ok(ConcreteGroup::ModCyclic { modulus })
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            ConcreteGroup::Table(_) => GroupElem::Index(0),
            ConcreteGroup::IntCyclic => GroupElem::Int(0),
            ConcreteGroup::ModCyclic { .. } => GroupElem::Mod(0),
            ConcreteGroup::DirectSum(gs) => {
                GroupElem::Tuple(gs.iter().map(|g| g.identity()).collect())
            }
        }
    }

    pub fn is_identity(&self, x: &GroupElem) -> bool {
        *x == self.identity()
    }

    pub fn validate(&self, x: &GroupElem) -> Result<(), GroupError> {
        let ok = match (self, x) {
            (ConcreteGroup::Table(t), GroupElem::Index(i)) => *i < t.order(),
            (ConcreteGroup::IntCyclic, GroupElem::Int(_)) => true,
            (ConcreteGroup::ModCyclic { modulus }, GroupElem::Mod(r)) => r < modulus,
            (ConcreteGroup::DirectSum(gs), GroupElem::Tuple(xs)) => {
                gs.len() == xs.len()
                    && gs.iter().zip(xs).all(|(g, x)| g.validate(x).is_ok())
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::ForeignElement(x.to_string()))
        }
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        match (self, a, b) {
            (ConcreteGroup::Table(t), GroupElem::Index(a), GroupElem::Index(b)) => {
                GroupElem::Index(t.mul(*a, *b))
            }
            (ConcreteGroup::IntCyclic, GroupElem::Int(a), GroupElem::Int(b)) => {
                GroupElem::Int(a + b)
            }
            (ConcreteGroup::ModCyclic { modulus }, GroupElem::Mod(a), GroupElem::Mod(b)) => {
                GroupElem::Mod((a + b) % modulus)
            }
            (ConcreteGroup::DirectSum(gs), GroupElem::Tuple(xs), GroupElem::Tuple(ys)) => {
                GroupElem::Tuple(
                    gs.iter().zip(xs.iter().zip(ys)).map(|(g, (x, y))| g.mul(x, y)).collect(),
                )
            }
            _ => panic!("element does not match group kind"),
        }
    }

    pub fn inv(&self, a: &GroupElem) -> GroupElem {
        match (self, a) {
            (ConcreteGroup::Table(t), GroupElem::Index(a)) => GroupElem::Index(t.inv(*a)),
            (ConcreteGroup::IntCyclic, GroupElem::Int(a)) => GroupElem::Int(-a),
            (ConcreteGroup::ModCyclic { modulus }, GroupElem::Mod(a)) => {
                GroupElem::Mod(if *a == 0 { 0 } else { modulus - a })
            }
            (ConcreteGroup::DirectSum(gs), GroupElem::Tuple(xs)) => {
                GroupElem::Tuple(gs.iter().zip(xs).map(|(g, x)| g.inv(x)).collect())
            }
            _ => panic!("element does not match group kind"),
        }
    }

    pub fn pow(&self, a: &GroupElem, k: i64) -> GroupElem {
        if k < 0 {
            return self.pow(&self.inv(a), -k);
        }
        match (self, a) {
            (ConcreteGroup::IntCyclic, GroupElem::Int(a)) => GroupElem::Int(a * k),
            (ConcreteGroup::ModCyclic { modulus }, GroupElem::Mod(a)) => {
                GroupElem::Mod(((*a as u128 * k as u128) % *modulus as u128) as u64)
            }
            _ => {
                let mut acc = self.identity();
                let mut base = a.clone();
                let mut k = k as u64;
                while k > 0 {
                    if k & 1 == 1 {
                        acc = self.mul(&acc, &base);
                    }
                    base = self.mul(&base, &base);
                    k >>= 1;
                }
                acc
            }
        }
    }

    /// Order of the element, `None` when infinite.
    pub fn elem_order(&self, a: &GroupElem) -> Option<u64> {
        match (self, a) {
            (ConcreteGroup::IntCyclic, GroupElem::Int(x)) => (*x == 0).then_some(1),
            (ConcreteGroup::ModCyclic { modulus }, GroupElem::Mod(r)) => {
                Some(modulus / gcd(*modulus, *r))
            }
            (ConcreteGroup::Table(t), GroupElem::Index(i)) => {
                let mut x = *i;
                let mut k = 1;
                while x != 0 {
                    x = t.mul(x, *i);
                    k += 1;
                }
                Some(k)
            }
            (ConcreteGroup::DirectSum(gs), GroupElem::Tuple(xs)) => gs
                .iter()
                .zip(xs)
                .try_fold(1u64, |acc, (g, x)| g.elem_order(x).map(|o| lcm(acc, o))),
            _ => panic!("element does not match group kind"),
        }
    }

    /// Number of elements, `None` when infinite.
    pub fn size(&self) -> Option<u64> {
        match self {
            ConcreteGroup::Table(t) => Some(t.order() as u64),
            ConcreteGroup::IntCyclic => None,
            ConcreteGroup::ModCyclic { modulus } => Some(*modulus),
            ConcreteGroup::DirectSum(gs) => {
                gs.iter().try_fold(1u64, |acc, g| g.size().map(|s| acc * s))
            }
        }
    }

    /// All elements of a finite group, identity first; `None` when infinite.
    pub fn elements(&self) -> Option<Vec<GroupElem>> {
        match self {
            ConcreteGroup::Table(t) => Some((0..t.order()).map(GroupElem::Index).collect()),
            ConcreteGroup::IntCyclic => None,
            ConcreteGroup::ModCyclic { modulus } => {
                Some((0..*modulus).map(GroupElem::Mod).collect())
            }
            ConcreteGroup::DirectSum(gs) => {
                let parts: Vec<Vec<GroupElem>> =
                    gs.iter().map(|g| g.elements()).collect::<Option<_>>()?;
                let mut out = vec![GroupElem::Tuple(Vec::new())];
                for part in &parts {
                    let mut next = Vec::with_capacity(out.len() * part.len());
                    for prefix in &out {
                        for x in part {
                            let GroupElem::Tuple(mut v) = prefix.clone() else { unreachable!() };
                            v.push(x.clone());
                            next.push(GroupElem::Tuple(v));
                        }
                    }
                    out = next;
                }
                Some(out)
            }
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            ConcreteGroup::Table(t) => t.is_abelian(),
            ConcreteGroup::IntCyclic | ConcreteGroup::ModCyclic { .. } => true,
            ConcreteGroup::DirectSum(gs) => gs.iter().all(|g| g.is_abelian()),
        }
    }

    /// Total order on elements used for canonical tie-breaking: table index
    /// order, absolute value then sign on the integers, residue order on
    /// modular groups, and lexicographic order on tuples.
    pub fn cmp_elems(&self, a: &GroupElem, b: &GroupElem) -> Ordering {
        match (self, a, b) {
            (ConcreteGroup::Table(_), GroupElem::Index(a), GroupElem::Index(b)) => a.cmp(b),
            (ConcreteGroup::IntCyclic, GroupElem::Int(a), GroupElem::Int(b)) => {
                (a.unsigned_abs(), *a < 0).cmp(&(b.unsigned_abs(), *b < 0))
            }
            (ConcreteGroup::ModCyclic { .. }, GroupElem::Mod(a), GroupElem::Mod(b)) => a.cmp(b),
            (ConcreteGroup::DirectSum(gs), GroupElem::Tuple(xs), GroupElem::Tuple(ys)) => {
                for (g, (x, y)) in gs.iter().zip(xs.iter().zip(ys)) {
                    match g.cmp_elems(x, y) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
            _ => panic!("element does not match group kind"),
        }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_table_verifies() {
        let rows = vec![vec![0, 1], vec![1, 0]];
        assert!(group_verify(&rows).is_ok());
    }

    #[test]
    fn planted_associativity_failure_is_reported_with_witness() {
        // Z4 table with one entry corrupted.
        let mut rows = FiniteTable::cyclic(4).rows();
        rows[3][3] = 3; // should be 2
        match group_verify(&rows) {
            Err(GroupError::NotAssociative(a, b, c)) => {
                // re-check the witness against the raw table
                assert_ne!(rows[rows[a][b]][c], rows[a][rows[b][c]]);
            }
            other => panic!("expected associativity failure, got {other:?}"),
        }
    }

    #[test]
    fn s3_table_verifies_and_is_not_abelian() {
        let s3 = FiniteTable::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        assert!(group_verify(&s3.rows()).is_ok());
    }

    #[test]
    fn identity_must_sit_at_index_zero() {
        let rows = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(group_verify(&rows), Err(GroupError::NotIdentity(0)));
    }

    #[test]
    fn mod_cyclic_requires_prime_power() {
        assert!(ConcreteGroup::mod_cyclic(8).is_ok());
        assert!(ConcreteGroup::mod_cyclic(9).is_ok());
        assert_eq!(ConcreteGroup::mod_cyclic(6), Err(GroupError::BadModulus(6)));
        assert_eq!(ConcreteGroup::mod_cyclic(1), Err(GroupError::BadModulus(1)));
    }

    #[test]
    fn element_orders() {
        let z = ConcreteGroup::IntCyclic;
        assert_eq!(z.elem_order(&GroupElem::Int(5)), None);
        assert_eq!(z.elem_order(&GroupElem::Int(0)), Some(1));
        let z8 = ConcreteGroup::mod_cyclic(8).unwrap();
        assert_eq!(z8.elem_order(&GroupElem::Mod(2)), Some(4));
        let s3 = ConcreteGroup::Table(FiniteTable::symmetric(3));
        let orders: Vec<u64> = (0..6)
            .map(|i| s3.elem_order(&GroupElem::Index(i)).unwrap())
            .collect();
        let mut sorted = orders.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 2, 2, 3, 3]);
    }

    #[test]
    fn int_order_is_abs_then_sign() {
        let z = ConcreteGroup::IntCyclic;
        let seq = [0i64, 1, -1, 2, -2, 3];
        for w in seq.windows(2) {
            assert_eq!(z.cmp_elems(&GroupElem::Int(w[0]), &GroupElem::Int(w[1])), Ordering::Less);
        }
    }

    #[test]
    fn direct_sum_enumeration_and_ops() {
        let g = ConcreteGroup::DirectSum(vec![
            ConcreteGroup::mod_cyclic(2).unwrap(),
            ConcreteGroup::mod_cyclic(3).unwrap(),
        ]);
        let els = g.elements().unwrap();
        assert_eq!(els.len(), 6);
        assert_eq!(els[0], g.identity());
        let a = GroupElem::Tuple(vec![GroupElem::Mod(1), GroupElem::Mod(2)]);
        assert_eq!(g.elem_order(&a), Some(6));
        assert!(g.is_identity(&g.mul(&a, &g.inv(&a))));
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
