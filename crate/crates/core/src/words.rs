//! Words over a graph-product presentation and their canonical normal forms.
//!
//! A word is a sequence of syllables, each a non-identity element of one
//! vertex group. Words are reduced by deleting identity syllables, merging
//! same-vertex syllables that can be brought together across commuting gaps,
//! and finally picking the lexicographically least representative of the
//! commutation orbit (vertex order first, element order second). Two words
//! represent the same group element exactly when they reduce to the same
//! canonical form.

use std::cmp::Ordering;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;
use crate::group::{ConcreteGroup, GroupElem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("vertex index {0} does not belong to the presentation")]
    ForeignVertex(usize),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("syllable on `{0}` carries the identity element")]
    IdentitySyllable(String),
    #[error("element `{0}` does not belong to the factor of `{1}`")]
    ForeignElement(String, String),
    #[error("presentation needs a factor per vertex ({vertices} vertices, {factors} factors)")]
    FactorCountMismatch { vertices: usize, factors: usize },
    #[error("presentations are limited to 128 vertices")]
    TooManyVertices,
    #[error("malformed word token `{0}` (expected vertex:element)")]
    BadToken(String),
}

/// One syllable: a non-identity element of the vertex group at `vertex`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub vertex: usize,
    pub elem: GroupElem,
}

/// A formal product of syllables; arbitrary words are allowed pre-reduction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Syllable>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }
}

impl From<Vec<Syllable>> for Word {
    fn from(v: Vec<Syllable>) -> Self {
        Word(v)
    }
}

/// A canonical normal form: the lexicographically least fully-merged word in
/// its commutation orbit. Equality of normal forms is equality in the group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm(Word);

impl NormalForm {
    pub fn empty() -> Self {
        NormalForm(Word::empty())
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn syllables(&self) -> &[Syllable] {
        self.0.syllables()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    /// Wraps a word the caller knows to be canonical (used by the oracle and
    /// the parser after round-trips through `reduce`).
    pub(crate) fn from_canonical(w: Word) -> Self {
        NormalForm(w)
    }
}

/// A graph product presentation: a finite graph plus a concrete factor group
/// per vertex. Immutable once built.
#[derive(Debug, Clone)]
pub struct Presentation {
    graph: Graph,
    factors: Vec<ConcreteGroup>,
    adj: Vec<u128>,
}

impl Presentation {
    pub fn new(graph: Graph, factors: Vec<ConcreteGroup>) -> Result<Self, WordError> {
        let n = graph.vertex_count();
        if factors.len() != n {
            return Err(WordError::FactorCountMismatch { vertices: n, factors: factors.len() });
        }
        if n > 128 {
            return Err(WordError::TooManyVertices);
        }
        let mut adj = vec![0u128; n];
        for a in 0..n {
            for b in 0..n {
                if graph.adjacent(a, b) {
                    adj[a] |= 1 << b;
                }
            }
        }
        Ok(Presentation { graph, factors, adj })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn factor(&self, vertex: usize) -> &ConcreteGroup {
        &self.factors[vertex]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[a] & (1 << b) != 0
    }

    /// Builds a validated syllable.
    pub fn syllable(&self, vertex: usize, elem: GroupElem) -> Result<Syllable, WordError> {
        if vertex >= self.factors.len() {
            return Err(WordError::ForeignVertex(vertex));
        }
        let g = &self.factors[vertex];
        g.validate(&elem).map_err(|_| {
            WordError::ForeignElement(elem.to_string(), self.graph.vertex_id(vertex).to_string())
        })?;
        if g.is_identity(&elem) {
            return Err(WordError::IdentitySyllable(self.graph.vertex_id(vertex).to_string()));
        }
        Ok(Syllable { vertex, elem })
    }

    fn validate_word(&self, w: &Word) -> Result<(), WordError> {
        for s in w.syllables() {
            if s.vertex >= self.factors.len() {
                return Err(WordError::ForeignVertex(s.vertex));
            }
            self.factors[s.vertex].validate(&s.elem).map_err(|_| {
                WordError::ForeignElement(
                    s.elem.to_string(),
                    self.graph.vertex_id(s.vertex).to_string(),
                )
            })?;
        }
        Ok(())
    }

    /// Total order on syllables: vertex order first, element order second.
    pub fn cmp_syllables(&self, a: &Syllable, b: &Syllable) -> Ordering {
        a.vertex
            .cmp(&b.vertex)
            .then_with(|| self.factors[a.vertex].cmp_elems(&a.elem, &b.elem))
    }

    /// Pushes a syllable onto a fully-merged stack, merging it into the
    /// nearest same-vertex entry reachable across commuting entries.
    fn push_merge(&self, stack: &mut Vec<Syllable>, s: Syllable) {
        let g = &self.factors[s.vertex];
        if g.is_identity(&s.elem) {
            return;
        }
        let mut j = stack.len();
        while j > 0 {
            let t = &stack[j - 1];
            if t.vertex == s.vertex {
                let prod = g.mul(&t.elem, &s.elem);
                if g.is_identity(&prod) {
                    stack.remove(j - 1);
                } else {
                    stack[j - 1].elem = prod;
                }
                return;
            }
            if self.adjacent(t.vertex, s.vertex) {
                j -= 1;
            } else {
                break;
            }
        }
        stack.push(s);
    }

    fn merged(&self, syllables: &[Syllable]) -> Vec<Syllable> {
        let mut stack = Vec::with_capacity(syllables.len());
        for s in syllables {
            self.push_merge(&mut stack, s.clone());
        }
        stack
    }

    /// Lexicographically least representative of the commutation orbit of a
    /// fully-merged word: repeatedly emit the least syllable whose whole
    /// prefix commutes with it. Candidates always sit near the front (the
    /// scan stops once no vertex commutes with the whole prefix), so removal
    /// from a deque keeps the pass close to linear.
    fn canonicalize(&self, rest: Vec<Syllable>) -> Vec<Syllable> {
        let mut rest: std::collections::VecDeque<Syllable> = rest.into();
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut candidates: u128 = !0;
            let mut best: Option<usize> = None;
            for (i, s) in rest.iter().enumerate() {
                if candidates == 0 {
                    break;
                }
                if candidates & (1 << s.vertex) != 0 {
                    best = Some(match best {
                        None => i,
                        Some(b) => {
                            if self.cmp_syllables(s, &rest[b]) == Ordering::Less {
                                i
                            } else {
                                b
                            }
                        }
                    });
                }
                candidates &= self.adj[s.vertex];
            }
            let b = best.expect("the first syllable is always emittable");
            out.push(rest.remove(b).expect("index is in range"));
        }
        out
    }

    /// Canonical normal form of a word.
    pub fn reduce(&self, w: &Word) -> Result<NormalForm, WordError> {
        self.validate_word(w)?;
        Ok(NormalForm(Word(self.canonicalize(self.merged(w.syllables())))))
    }

    pub fn multiply(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        let mut stack = a.syllables().to_vec();
        for s in b.syllables() {
            self.push_merge(&mut stack, s.clone());
        }
        NormalForm(Word(self.canonicalize(stack)))
    }

    pub fn inverse(&self, w: &NormalForm) -> NormalForm {
        let inverted: Vec<Syllable> = w
            .syllables()
            .iter()
            .rev()
            .map(|s| Syllable { vertex: s.vertex, elem: self.factors[s.vertex].inv(&s.elem) })
            .collect();
        NormalForm(Word(self.canonicalize(inverted)))
    }

    /// `w^k` by repeated squaring; negative exponents invert first.
    pub fn power(&self, w: &NormalForm, k: i64) -> NormalForm {
        if k < 0 {
            return self.power(&self.inverse(w), -k);
        }
        let mut acc = NormalForm::empty();
        let mut base = w.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    pub fn lg(&self, w: &NormalForm) -> usize {
        w.len()
    }

    /// Vertices occurring in the word (invariant across the orbit).
    pub fn sp(&self, w: &NormalForm) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count()];
        for s in w.syllables() {
            seen[s.vertex] = true;
        }
        (0..self.vertex_count()).filter(|&v| seen[v]).collect()
    }

    /// Positions whose entire prefix commutes with them: the syllables that
    /// can begin some normal form of the element.
    pub(crate) fn front_positions(&self, w: &[Syllable]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut candidates: u128 = !0;
        for (i, s) in w.iter().enumerate() {
            if candidates == 0 {
                break;
            }
            if candidates & (1 << s.vertex) != 0 {
                out.push(i);
            }
            candidates &= self.adj[s.vertex];
        }
        out
    }

    /// Positions whose entire suffix commutes with them.
    pub(crate) fn end_positions(&self, w: &[Syllable]) -> Vec<usize> {
        let n = w.len();
        let mut out = Vec::new();
        let mut candidates: u128 = !0;
        for (k, s) in w.iter().rev().enumerate() {
            if candidates == 0 {
                break;
            }
            if candidates & (1 << s.vertex) != 0 {
                out.push(n - 1 - k);
            }
            candidates &= self.adj[s.vertex];
        }
        out.reverse();
        out
    }

    /// First syllables over all normal forms of the element.
    pub fn first_set(&self, w: &NormalForm) -> Vec<Syllable> {
        self.front_positions(w.syllables())
            .into_iter()
            .map(|i| w.syllables()[i].clone())
            .collect()
    }

    /// Last syllables over all normal forms of the element.
    pub fn last_set(&self, w: &NormalForm) -> Vec<Syllable> {
        self.end_positions(w.syllables())
            .into_iter()
            .map(|i| w.syllables()[i].clone())
            .collect()
    }

    /// Inverses of the last syllables.
    pub fn lhat(&self, w: &NormalForm) -> Vec<Syllable> {
        self.last_set(w)
            .into_iter()
            .map(|s| Syllable { vertex: s.vertex, elem: self.factors[s.vertex].inv(&s.elem) })
            .collect()
    }

    /// Kills every syllable whose vertex is outside `keep`, then reduces.
    /// This is the retraction onto the sub-product and is a homomorphism.
    pub fn project(&self, w: &NormalForm, keep: &[usize]) -> Result<NormalForm, WordError> {
        for &v in keep {
            if v >= self.vertex_count() {
                return Err(WordError::ForeignVertex(v));
            }
        }
        let mut mask = vec![false; self.vertex_count()];
        for &v in keep {
            mask[v] = true;
        }
        let filtered: Vec<Syllable> =
            w.syllables().iter().filter(|s| mask[s.vertex]).cloned().collect();
        self.reduce(&Word(filtered))
    }

    /// Serializes a word as whitespace-separated `vertex:element` tokens;
    /// the empty word is spelled `1`.
    pub fn format_word(&self, w: &[Syllable]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        for (i, s) in w.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}:{}", self.graph.vertex_id(s.vertex), s.elem);
        }
        out
    }

    /// Parses the `vertex:element` token format (empty word: `1`).
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut syllables = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (vid, elem_text) =
                token.split_once(':').ok_or_else(|| WordError::BadToken(token.to_string()))?;
            let vertex = self
                .graph
                .vertex_index(vid)
                .ok_or_else(|| WordError::UnknownVertex(vid.to_string()))?;
            let elem = parse_elem(&self.factors[vertex], elem_text)
                .ok_or_else(|| WordError::BadToken(token.to_string()))?;
            syllables.push(self.syllable(vertex, elem)?);
        }
        Ok(Word(syllables))
    }
}

fn parse_elem(g: &ConcreteGroup, text: &str) -> Option<GroupElem> {
    match g {
        ConcreteGroup::Table(_) => text.parse().ok().map(GroupElem::Index),
        ConcreteGroup::IntCyclic => text.parse().ok().map(GroupElem::Int),
        ConcreteGroup::ModCyclic { .. } => text.parse().ok().map(GroupElem::Mod),
        ConcreteGroup::DirectSum(gs) => {
            let parts: Vec<&str> = text.split(',').collect();
            if parts.len() != gs.len() {
                return None;
            }
            let xs: Option<Vec<GroupElem>> =
                gs.iter().zip(parts).map(|(g, t)| parse_elem(g, t)).collect();
            xs.map(GroupElem::Tuple)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn g(vertices: &[&str], edges: &[(&str, &str)]) -> Graph {
        Graph::new(
            vertices.iter().map(|s| s.to_string()),
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
        )
        .unwrap()
    }

    fn z() -> ConcreteGroup {
        ConcreteGroup::IntCyclic
    }

    fn zmod(m: u64) -> ConcreteGroup {
        ConcreteGroup::mod_cyclic(m).unwrap()
    }

    fn syl(v: usize, x: i64) -> Syllable {
        Syllable { vertex: v, elem: GroupElem::Int(x) }
    }

    fn free2() -> Presentation {
        Presentation::new(g(&["a", "b"], &[]), vec![z(), z()]).unwrap()
    }

    #[test]
    fn cancelling_pair_reduces_to_empty() {
        let p = free2();
        let w = Word(vec![syl(0, 5), syl(0, -5)]);
        assert!(p.reduce(&w).unwrap().is_empty());
    }

    #[test]
    fn commuting_pair_is_sorted_into_vertex_order() {
        let p = Presentation::new(g(&["a", "b"], &[("a", "b")]), vec![z(), z()]).unwrap();
        let w = Word(vec![syl(1, 2), syl(0, 3)]);
        let nf = p.reduce(&w).unwrap();
        assert_eq!(nf.syllables(), &[syl(0, 3), syl(1, 2)]);
    }

    #[test]
    fn alternating_word_over_free_product_is_stable() {
        let p = free2();
        let w = Word(vec![syl(0, 1), syl(1, 1), syl(0, 1)]);
        let nf = p.reduce(&w).unwrap();
        assert_eq!(nf.len(), 3);
        assert_eq!(nf.syllables(), w.syllables());
    }

    #[test]
    fn merge_across_commuting_gap() {
        // c commutes with a; the two a-syllables meet and cancel
        let p = Presentation::new(g(&["a", "c"], &[("a", "c")]), vec![z(), z()]).unwrap();
        let w = Word(vec![syl(0, 2), syl(1, 7), syl(0, -2)]);
        let nf = p.reduce(&w).unwrap();
        assert_eq!(nf.syllables(), &[syl(1, 7)]);
    }

    #[test]
    fn blocked_merge_stays() {
        let p = free2();
        let w = Word(vec![syl(0, 2), syl(1, 7), syl(0, -2)]);
        assert_eq!(p.reduce(&w).unwrap().len(), 3);
    }

    #[test]
    fn multiply_by_inverse_is_identity() {
        let p = free2();
        let w = p.reduce(&Word(vec![syl(0, 1), syl(1, 4), syl(0, -2)])).unwrap();
        let winv = p.inverse(&w);
        assert!(p.multiply(&w, &winv).is_empty());
        assert!(p.multiply(&winv, &w).is_empty());
    }

    #[test]
    fn power_of_order_three_torsion_is_identity() {
        let p = Presentation::new(g(&["a"], &[]), vec![zmod(3)]).unwrap();
        let s = Syllable { vertex: 0, elem: GroupElem::Mod(1) };
        let w = p.reduce(&Word(vec![s])).unwrap();
        assert!(p.power(&w, 3).is_empty());
        assert_eq!(p.power(&w, 2).len(), 1);
    }

    #[test]
    fn power_of_alternating_word_concatenates() {
        let p = free2();
        let w = p.reduce(&Word(vec![syl(0, 1), syl(1, 1)])).unwrap();
        let w2 = p.power(&w, 2);
        assert_eq!(w2.len(), 4);
        assert_eq!(w2.syllables(), &[syl(0, 1), syl(1, 1), syl(0, 1), syl(1, 1)]);
        assert_eq!(p.power(&w, -1), p.inverse(&w));
        assert!(p.power(&w, 0).is_empty());
    }

    #[test]
    fn empty_word_has_empty_invariants() {
        let p = free2();
        let e = NormalForm::empty();
        assert_eq!(p.lg(&e), 0);
        assert!(p.sp(&e).is_empty());
        assert!(p.first_set(&e).is_empty());
        assert!(p.last_set(&e).is_empty());
        assert!(p.lhat(&e).is_empty());
    }

    #[test]
    fn first_set_without_swaps_is_the_first_syllable() {
        let p = free2();
        let w = p.reduce(&Word(vec![syl(0, 1), syl(1, 2)])).unwrap();
        assert_eq!(p.first_set(&w), vec![syl(0, 1)]);
        assert_eq!(p.last_set(&w), vec![syl(1, 2)]);
        assert_eq!(p.lhat(&w), vec![syl(1, -2)]);
    }

    #[test]
    fn first_set_collects_all_commuting_leaders() {
        let p = Presentation::new(
            g(&["a", "b", "c"], &[("a", "b")]),
            vec![z(), z(), z()],
        )
        .unwrap();
        let w = p.reduce(&Word(vec![syl(0, 1), syl(1, 2), syl(2, 3)])).unwrap();
        assert_eq!(p.first_set(&w), vec![syl(0, 1), syl(1, 2)]);
        assert_eq!(p.last_set(&w), vec![syl(2, 3)]);
    }

    #[test]
    fn project_examples() {
        let p = free2();
        let w = p.reduce(&Word(vec![syl(0, 1), syl(1, 2), syl(0, 1)])).unwrap();
        // projecting onto the support fixes the word
        assert_eq!(p.project(&w, &[0, 1]).unwrap(), w);
        // projecting onto nothing kills it
        assert!(p.project(&w, &[]).unwrap().is_empty());
        // deleting the a-syllables leaves the middle
        let onto_b = p.project(&w, &[1]).unwrap();
        assert_eq!(onto_b.syllables(), &[syl(1, 2)]);
    }

    #[test]
    fn project_is_a_homomorphism_on_samples() {
        let p = Presentation::new(
            g(&["a", "b", "c"], &[("a", "c")]),
            vec![z(), zmod(3), z()],
        )
        .unwrap();
        let words = [
            Word(vec![syl(0, 1), Syllable { vertex: 1, elem: GroupElem::Mod(2) }, syl(2, -1)]),
            Word(vec![syl(2, 2), syl(0, 1), Syllable { vertex: 1, elem: GroupElem::Mod(1) }]),
            Word(vec![syl(0, -1), syl(2, 1)]),
        ];
        let keep = [0usize, 1];
        for x in &words {
            for y in &words {
                let x = p.reduce(x).unwrap();
                let y = p.reduce(y).unwrap();
                let lhs = p.project(&p.multiply(&x, &y), &keep).unwrap();
                let rhs =
                    p.multiply(&p.project(&x, &keep).unwrap(), &p.project(&y, &keep).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn word_round_trip_through_text() {
        let p = Presentation::new(
            g(&["a", "b"], &[]),
            vec![z(), zmod(4)],
        )
        .unwrap();
        let w = p.parse_word("a:-3 b:2 a:1").unwrap();
        assert_eq!(p.format_word(w.syllables()), "a:-3 b:2 a:1");
        assert_eq!(p.parse_word("1").unwrap(), Word::empty());
        assert_eq!(p.format_word(&[]), "1");
        assert!(matches!(p.parse_word("a:0"), Err(WordError::IdentitySyllable(_))));
        assert!(matches!(p.parse_word("q:1"), Err(WordError::UnknownVertex(_))));
        assert!(matches!(p.parse_word("b:9"), Err(WordError::ForeignElement(..))));
    }

    #[test]
    fn reduce_rejects_foreign_vertices() {
        let p = free2();
        let w = Word(vec![Syllable { vertex: 7, elem: GroupElem::Int(1) }]);
        assert_eq!(p.reduce(&w), Err(WordError::ForeignVertex(7)));
    }
}
