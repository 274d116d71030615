//! Symbolic cardinal arithmetic.
//!
//! Cardinals are finite numbers, `ℵ₀`, named atoms strictly between `ℵ₀` and
//! `2^ℵ₀`, or `2^ℵ₀` itself. Distinct named atoms are order-incomparable;
//! sums of distinct atoms degrade to a formal join on which only the
//! three-region predicate (`≤ ℵ₀` / strictly between / `= 2^ℵ₀`) is defined.
//! Every verdict downstream consults regions only, so the join loses nothing.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// `Fin(n) < Aleph0 < Mid(_) < Continuum`; distinct `Mid` atoms are
/// incomparable with each other.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymbolicCardinal {
    Fin(u64),
    Aleph0,
    Mid(String),
    Continuum,
}

impl SymbolicCardinal {
    pub fn mid(name: impl Into<String>) -> Self {
        SymbolicCardinal::Mid(name.into())
    }

    fn rank(&self) -> u8 {
        match self {
            SymbolicCardinal::Fin(_) => 0,
            SymbolicCardinal::Aleph0 => 1,
            SymbolicCardinal::Mid(_) => 2,
            SymbolicCardinal::Continuum => 3,
        }
    }

    pub fn is_countable(&self) -> bool {
        matches!(self, SymbolicCardinal::Fin(_) | SymbolicCardinal::Aleph0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SymbolicCardinal::Fin(0))
    }
}

impl PartialOrd for SymbolicCardinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use SymbolicCardinal::*;
        match (self, other) {
            (Fin(a), Fin(b)) => Some(a.cmp(b)),
            (Mid(a), Mid(b)) if a != b => None,
            _ => Some(self.rank().cmp(&other.rank())),
        }
    }
}

impl fmt::Display for SymbolicCardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolicCardinal::Fin(n) => write!(f, "{n}"),
            SymbolicCardinal::Aleph0 => write!(f, "aleph0"),
            SymbolicCardinal::Mid(name) => write!(f, "mid {name}"),
            SymbolicCardinal::Continuum => write!(f, "continuum"),
        }
    }
}

/// Result of cardinal arithmetic: either a genuine cardinal or a formal join
/// of two or more distinct named atoms (still strictly between `ℵ₀` and
/// `2^ℵ₀`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CardValue {
    Card(SymbolicCardinal),
    Join(BTreeSet<String>),
}

impl CardValue {
    pub fn zero() -> Self {
        CardValue::Card(SymbolicCardinal::Fin(0))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CardValue::Card(SymbolicCardinal::Fin(0)))
    }
}

impl From<SymbolicCardinal> for CardValue {
    fn from(c: SymbolicCardinal) -> Self {
        CardValue::Card(c)
    }
}

impl fmt::Display for CardValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardValue::Card(c) => c.fmt(f),
            CardValue::Join(atoms) => {
                write!(f, "join(")?;
                for (i, a) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Which of the three decision regions a value lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardRegion {
    LeqAleph0,
    StrictlyBetween,
    Continuum,
}

/// The three-region predicate. Exactly one field is true.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardPredicates {
    pub leq_aleph0: bool,
    pub equals_continuum: bool,
    pub strictly_between: bool,
}

/// Whether named atoms keep their strictly-between reading or collapse to the
/// continuum (there is nothing strictly between `ℵ₀` and `2^ℵ₀` once
/// `ℵ₁ = 2^ℵ₀` is assumed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CardMode {
    #[default]
    NotCh,
    Ch,
}

pub fn card_region(v: &CardValue, mode: CardMode) -> CardRegion {
    match v {
        CardValue::Card(SymbolicCardinal::Fin(_)) | CardValue::Card(SymbolicCardinal::Aleph0) => {
            CardRegion::LeqAleph0
        }
        CardValue::Card(SymbolicCardinal::Continuum) => CardRegion::Continuum,
        CardValue::Card(SymbolicCardinal::Mid(_)) | CardValue::Join(_) => match mode {
            CardMode::NotCh => CardRegion::StrictlyBetween,
            CardMode::Ch => CardRegion::Continuum,
        },
    }
}

pub fn card_predicates(v: &CardValue) -> CardPredicates {
    let region = card_region(v, CardMode::NotCh);
    CardPredicates {
        leq_aleph0: region == CardRegion::LeqAleph0,
        equals_continuum: region == CardRegion::Continuum,
        strictly_between: region == CardRegion::StrictlyBetween,
    }
}

/// Cardinal addition of two values.
pub fn card_add(a: &CardValue, b: &CardValue) -> CardValue {
    use CardValue::*;
    use SymbolicCardinal::*;
    match (a, b) {
        (Card(Continuum), _) | (_, Card(Continuum)) => Card(Continuum),
        (Card(Fin(x)), Card(Fin(y))) => Card(Fin(x.saturating_add(*y))),
        (Card(Aleph0), Card(Fin(_) | Aleph0)) | (Card(Fin(_)), Card(Aleph0)) => Card(Aleph0),
        (Card(Mid(m)), Card(Fin(_) | Aleph0)) | (Card(Fin(_) | Aleph0), Card(Mid(m))) => {
            Card(Mid(m.clone()))
        }
        (Card(Mid(m)), Card(Mid(n))) => {
            if m == n {
                Card(Mid(m.clone()))
            } else {
                Join([m.clone(), n.clone()].into())
            }
        }
        (Join(s), Card(Fin(_) | Aleph0)) | (Card(Fin(_) | Aleph0), Join(s)) => Join(s.clone()),
        (Join(s), Card(Mid(m))) | (Card(Mid(m)), Join(s)) => {
            let mut s = s.clone();
            s.insert(m.clone());
            Join(s)
        }
        (Join(s), Join(t)) => Join(s.union(t).cloned().collect()),
    }
}

/// Product `multiplicand · count` — the value of `multiplicand` summed
/// `count` many times.
///
/// An infinite count at most the size of an infinite multiplicand is
/// absorbed; since every uncountable cardinal dominates any count the engine
/// can describe short of the continuum, a `Mid` multiplicand absorbs every
/// non-continuum count and keeps its atom as the region representative.
pub fn card_mul(multiplicand: &SymbolicCardinal, count: &SymbolicCardinal) -> CardValue {
    use SymbolicCardinal::*;
    if multiplicand.is_zero() || count.is_zero() {
        return CardValue::zero();
    }
    let c = match (multiplicand, count) {
        (Fin(a), Fin(b)) => Fin(a.saturating_mul(*b)),
        (Continuum, _) | (_, Continuum) => Continuum,
        (Mid(m), _) => Mid(m.clone()),
        (_, Mid(m)) => Mid(m.clone()),
        (Aleph0, _) | (_, Aleph0) => Aleph0,
    };
    CardValue::Card(c)
}

/// Sum of `multiplicand · count` over all items. `Fin(0)` is the unit.
pub fn card_sum<'a, I>(items: I) -> CardValue
where
    I: IntoIterator<Item = (&'a SymbolicCardinal, &'a SymbolicCardinal)>,
{
    items
        .into_iter()
        .map(|(m, c)| card_mul(m, c))
        .fold(CardValue::zero(), |acc, v| card_add(&acc, &v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use SymbolicCardinal::*;

    fn one() -> SymbolicCardinal {
        Fin(1)
    }

    #[test]
    fn order_chain() {
        assert!(Fin(7) < Aleph0);
        assert!(Aleph0 < SymbolicCardinal::mid("x"));
        assert!(SymbolicCardinal::mid("x") < Continuum);
        assert!(Fin(3) < Fin(4));
        assert_eq!(
            SymbolicCardinal::mid("x").partial_cmp(&SymbolicCardinal::mid("y")),
            None
        );
    }

    #[test]
    fn continuum_absorbs_mid() {
        let s = card_sum([(&SymbolicCardinal::mid("l"), &one()), (&Continuum, &one())]);
        assert_eq!(s, CardValue::Card(Continuum));
    }

    #[test]
    fn mid_summed_over_uncountable_class_stays_itself() {
        // A per-vertex multiplicity of `l` summed over a class of size `w1`.
        let s = card_sum([(&SymbolicCardinal::mid("l"), &SymbolicCardinal::mid("w1"))]);
        assert_eq!(s, CardValue::Card(SymbolicCardinal::mid("l")));
    }

    #[test]
    fn finite_sums_are_finite() {
        let s = card_sum([(&Fin(3), &one()), (&Fin(4), &one())]);
        assert_eq!(s, CardValue::Card(Fin(7)));
        let s = card_sum([(&Fin(3), &Fin(5))]);
        assert_eq!(s, CardValue::Card(Fin(15)));
    }

    #[test]
    fn predicates_pick_exactly_one_region() {
        for v in [
            CardValue::Card(Fin(0)),
            CardValue::Card(Aleph0),
            CardValue::Card(SymbolicCardinal::mid("l")),
            CardValue::Card(Continuum),
            card_add(
                &CardValue::Card(SymbolicCardinal::mid("a")),
                &CardValue::Card(SymbolicCardinal::mid("b")),
            ),
        ] {
            let p = card_predicates(&v);
            assert_eq!(
                [p.leq_aleph0, p.strictly_between, p.equals_continuum]
                    .iter()
                    .filter(|b| **b)
                    .count(),
                1,
                "value {v}"
            );
        }
    }

    #[test]
    fn aleph0_is_leq_aleph0() {
        assert!(card_predicates(&CardValue::Card(Aleph0)).leq_aleph0);
    }

    #[test]
    fn mid_is_strictly_between() {
        assert!(card_predicates(&CardValue::Card(SymbolicCardinal::mid("l"))).strictly_between);
    }

    #[test]
    fn join_of_two_atoms_is_strictly_between() {
        let j = card_sum([
            (&SymbolicCardinal::mid("l1"), &one()),
            (&SymbolicCardinal::mid("l2"), &one()),
        ]);
        assert!(matches!(&j, CardValue::Join(s) if s.len() == 2));
        assert!(card_predicates(&j).strictly_between);
    }

    #[test]
    fn ch_mode_collapses_mid_to_continuum() {
        let v = CardValue::Card(SymbolicCardinal::mid("l"));
        assert_eq!(card_region(&v, CardMode::NotCh), CardRegion::StrictlyBetween);
        assert_eq!(card_region(&v, CardMode::Ch), CardRegion::Continuum);
    }
}
