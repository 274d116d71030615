//! Cyclic reduction and the head/tail decomposition of a word into
//! `w1 · w2 · w3 · w2' · w1⁻¹` with a clique head/tail pair, together with
//! the derived conjugation-invariant support and length.

use crate::words::{NormalForm, Presentation, Syllable, Word};

/// A conjugation pair: position `front` can start a normal form, position
/// `end` can end one, and both carry the same vertex.
#[derive(Debug, Clone, Copy)]
struct Pair {
    front: usize,
    end: usize,
    cancelling: bool,
}

fn pairs(p: &Presentation, w: &[Syllable]) -> Vec<Pair> {
    let fronts = p.front_positions(w);
    let ends = p.end_positions(w);
    let mut out = Vec::new();
    for &i in &fronts {
        for &j in &ends {
            if i != j && w[i].vertex == w[j].vertex {
                let g = p.factor(w[i].vertex);
                let cancelling = g.is_identity(&g.mul(&w[j].elem, &w[i].elem));
                out.push(Pair { front: i, end: j, cancelling });
            }
        }
    }
    // at most one pair per vertex; vertex order makes the choice deterministic
    out.sort_by_key(|pr| w[pr.front].vertex);
    out
}

/// Removes positions `i` and `j` and appends the product of the end syllable
/// with the front syllable (the effect of conjugating the front syllable
/// out), then re-reduces.
fn extract(p: &Presentation, w: &[Syllable], pr: Pair) -> NormalForm {
    let mut rest: Vec<Syllable> = w
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != pr.front && *k != pr.end)
        .map(|(_, s)| s.clone())
        .collect();
    if !pr.cancelling {
        let v = w[pr.front].vertex;
        let g = p.factor(v);
        rest.push(Syllable { vertex: v, elem: g.mul(&w[pr.end].elem, &w[pr.front].elem) });
    }
    p.reduce(&Word(rest)).expect("extraction preserves validity")
}

/// Whether no first syllable is the inverse of a last syllable.
pub fn is_weakly_cyclically_reduced(p: &Presentation, w: &NormalForm) -> bool {
    let firsts = p.first_set(w);
    p.lhat(w).iter().all(|t| !firsts.contains(t))
}

/// Whether no sequence of moves, including rotations, shortens the word:
/// equivalent to the absence of a same-vertex front/end pair on distinct
/// positions (rotating such a pair together enables a merge).
pub fn is_cyclically_reduced(p: &Presentation, w: &NormalForm) -> bool {
    pairs(p, w.syllables()).is_empty()
}

/// Whether `w ≠ e`, every first syllable lies in the factor of `a`, and
/// every last syllable lies in the factor of `b`.
pub fn is_ab_cyclically_reduced(p: &Presentation, w: &NormalForm, a: usize, b: usize) -> bool {
    !w.is_empty()
        && p.first_set(w).iter().all(|s| s.vertex == a)
        && p.last_set(w).iter().all(|s| s.vertex == b)
}

/// Conjugation-minimal core: returns `(conjugator, core)` with
/// `w = conjugator · core · conjugator⁻¹`, the core cyclically reduced and of
/// minimal length among rotation-reachable conjugates.
pub fn cyclically_reduce(p: &Presentation, w: &NormalForm) -> (NormalForm, NormalForm) {
    let mut conj: Vec<Syllable> = Vec::new();
    let mut core = w.clone();
    loop {
        let prs = pairs(p, core.syllables());
        let Some(&pr) = prs.first() else { break };
        conj.push(core.syllables()[pr.front].clone());
        core = extract(p, core.syllables(), pr);
    }
    let conj = p.reduce(&Word(conj)).expect("conjugator syllables are valid");
    debug_assert!(is_cyclically_reduced(p, &core));
    debug_assert_eq!(
        p.multiply(&p.multiply(&conj, &core), &p.inverse(&conj)),
        *w,
        "conjugator and core must reassemble to the input"
    );
    (conj, core)
}

/// The decomposition `w = w1 · w2 · w3 · w2' · w1⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PyramidDecomposition {
    pub w1: NormalForm,
    pub w2: NormalForm,
    pub w3: NormalForm,
    pub w2p: NormalForm,
}

/// The five conditions the decomposition must satisfy, checked literally.
pub fn validate_pyramid(
    p: &Presentation,
    w: &NormalForm,
    d: &PyramidDecomposition,
) -> Result<(), String> {
    let total = d.w1.len() + d.w2.len() + d.w3.len() + d.w2p.len() + d.w1.len();
    let mut all: Vec<Syllable> = Vec::new();
    all.extend_from_slice(d.w1.syllables());
    all.extend_from_slice(d.w2.syllables());
    all.extend_from_slice(d.w3.syllables());
    all.extend_from_slice(d.w2p.syllables());
    all.extend_from_slice(p.inverse(&d.w1).syllables());
    let reassembled = p.reduce(&Word(all)).expect("fragments are valid");
    if reassembled.len() != total {
        return Err("concatenation is not a normal form".into());
    }
    if reassembled != *w {
        return Err("decomposition does not spell the input element".into());
    }
    let mut rotated: Vec<Syllable> = Vec::new();
    rotated.extend_from_slice(d.w3.syllables());
    rotated.extend_from_slice(d.w2p.syllables());
    rotated.extend_from_slice(d.w2.syllables());
    let rotated = p.reduce(&Word(rotated)).expect("fragments are valid");
    if !is_cyclically_reduced(p, &rotated) {
        return Err("rotated core is not cyclically reduced".into());
    }
    if p.sp(&d.w2) != p.sp(&d.w2p) {
        return Err("head and tail have different supports".into());
    }
    let head_sp = p.sp(&d.w2);
    if !d.w2.is_empty() {
        for (x, &a) in head_sp.iter().enumerate() {
            for &b in head_sp.iter().skip(x + 1) {
                if !p.adjacent(a, b) {
                    return Err("head support is not a clique".into());
                }
            }
        }
    }
    let firsts = p.first_set(&d.w2);
    if p.lhat(&d.w2p).iter().any(|t| firsts.contains(t)) {
        return Err("head meets the inverted tail".into());
    }
    Ok(())
}

/// Decomposes a canonical word: the conjugator `w1` collects cancelling
/// front/end pairs, then the remaining same-vertex front/end pairs form the
/// clique head `w2` and tail `w2'`, and `w3` is what is left in between.
pub fn pyramid_decompose(p: &Presentation, w: &NormalForm) -> PyramidDecomposition {
    let mut w1: Vec<Syllable> = Vec::new();
    let mut core = w.clone();
    loop {
        let prs = pairs(p, core.syllables());
        let Some(&pr) = prs.iter().find(|pr| pr.cancelling) else { break };
        w1.push(core.syllables()[pr.front].clone());
        core = extract(p, core.syllables(), pr);
    }
    let prs = pairs(p, core.syllables());
    debug_assert!(prs.iter().all(|pr| !pr.cancelling));
    let mut in_head = vec![false; core.len()];
    for pr in &prs {
        in_head[pr.front] = true;
        in_head[pr.end] = true;
    }
    let w2: Vec<Syllable> = prs.iter().map(|pr| core.syllables()[pr.front].clone()).collect();
    let w2p: Vec<Syllable> = prs.iter().map(|pr| core.syllables()[pr.end].clone()).collect();
    let w3: Vec<Syllable> = core
        .syllables()
        .iter()
        .enumerate()
        .filter(|(k, _)| !in_head[*k])
        .map(|(_, s)| s.clone())
        .collect();
    let d = PyramidDecomposition {
        w1: p.reduce(&Word(w1)).expect("valid syllables"),
        w2: p.reduce(&Word(w2)).expect("valid syllables"),
        w3: p.reduce(&Word(w3)).expect("valid syllables"),
        w2p: p.reduce(&Word(w2p)).expect("valid syllables"),
    };
    debug_assert_eq!(validate_pyramid(p, w, &d), Ok(()));
    d
}

/// Support of the rotation-invariant core `w2 · w3 · w2'`.
pub fn csp(p: &Presentation, w: &NormalForm) -> Vec<usize> {
    let d = pyramid_decompose(p, w);
    let mut seen = vec![false; p.vertex_count()];
    for part in [&d.w2, &d.w3, &d.w2p] {
        for s in part.syllables() {
            seen[s.vertex] = true;
        }
    }
    (0..p.vertex_count()).filter(|&v| seen[v]).collect()
}

/// Length of the core `w2 · w3 · w2'`.
pub fn clg(p: &Presentation, w: &NormalForm) -> usize {
    let d = pyramid_decompose(p, w);
    d.w2.len() + d.w3.len() + d.w2p.len()
}

/// Whether the listed vertices induce a complete subgraph.
pub fn is_clique(p: &Presentation, vertices: &[usize]) -> bool {
    vertices
        .iter()
        .enumerate()
        .all(|(x, &a)| vertices.iter().skip(x + 1).all(|&b| p.adjacent(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::group::{ConcreteGroup, GroupElem};

    fn pres(vertices: &[&str], edges: &[(&str, &str)]) -> Presentation {
        let g = Graph::new(
            vertices.iter().map(|s| s.to_string()),
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
        )
        .unwrap();
        let factors = vertices.iter().map(|_| ConcreteGroup::IntCyclic).collect();
        Presentation::new(g, factors).unwrap()
    }

    fn syl(v: usize, x: i64) -> Syllable {
        Syllable { vertex: v, elem: GroupElem::Int(x) }
    }

    fn nf(p: &Presentation, syls: Vec<Syllable>) -> NormalForm {
        p.reduce(&Word(syls)).unwrap()
    }

    #[test]
    fn conjugate_is_not_weakly_cyclically_reduced() {
        let p = pres(&["a", "b"], &[]);
        let w = nf(&p, vec![syl(0, 1), syl(1, 5), syl(0, -1)]);
        assert!(!is_weakly_cyclically_reduced(&p, &w));
        assert!(!is_cyclically_reduced(&p, &w));
    }

    #[test]
    fn alternating_pair_is_ab_cyclically_reduced() {
        let p = pres(&["a", "b"], &[]);
        let w = nf(&p, vec![syl(0, 1), syl(1, 5)]);
        assert!(is_ab_cyclically_reduced(&p, &w, 0, 1));
        assert!(!is_ab_cyclically_reduced(&p, &w, 1, 0));
        assert!(!is_ab_cyclically_reduced(&p, &NormalForm::empty(), 0, 1));
        assert!(is_weakly_cyclically_reduced(&p, &w));
        assert!(is_cyclically_reduced(&p, &w));
    }

    #[test]
    fn merge_pair_is_not_cyclically_reduced_but_weakly_ok() {
        // rotating brings the two a-syllables together; they merge but do not cancel
        let p = pres(&["a", "b"], &[]);
        let w = nf(&p, vec![syl(0, 1), syl(1, 5), syl(0, 2)]);
        assert!(is_weakly_cyclically_reduced(&p, &w));
        assert!(!is_cyclically_reduced(&p, &w));
    }

    #[test]
    fn involution_singleton_is_cyclically_but_not_weakly_reduced() {
        let g = Graph::new(["a".to_string()], []).unwrap();
        let p = Presentation::new(g, vec![ConcreteGroup::mod_cyclic(2).unwrap()]).unwrap();
        let w = p
            .reduce(&Word(vec![Syllable { vertex: 0, elem: GroupElem::Mod(1) }]))
            .unwrap();
        assert!(is_cyclically_reduced(&p, &w));
        assert!(!is_weakly_cyclically_reduced(&p, &w));
    }

    #[test]
    fn cyclically_reduce_strips_one_conjugator() {
        let p = pres(&["a", "b"], &[]);
        let w = nf(&p, vec![syl(0, 1), syl(1, 5), syl(0, -1)]);
        let (c, core) = cyclically_reduce(&p, &w);
        assert_eq!(c.syllables(), &[syl(0, 1)]);
        assert_eq!(core.syllables(), &[syl(1, 5)]);
    }

    #[test]
    fn cyclically_reduce_keeps_reduced_words() {
        let p = pres(&["a", "b"], &[]);
        let w = nf(&p, vec![syl(0, 1), syl(1, 5)]);
        let (c, core) = cyclically_reduce(&p, &w);
        assert!(c.is_empty());
        assert_eq!(core, w);
    }

    #[test]
    fn cyclically_reduce_nested_conjugators() {
        let p = pres(&["a", "b", "c"], &[]);
        let w = nf(&p, vec![syl(0, 1), syl(1, 1), syl(2, 9), syl(1, -1), syl(0, -1)]);
        let (c, core) = cyclically_reduce(&p, &w);
        assert_eq!(c.syllables(), &[syl(0, 1), syl(1, 1)]);
        assert_eq!(core.syllables(), &[syl(2, 9)]);
    }

    #[test]
    fn cyclically_reduce_handles_merge_pairs() {
        let p = pres(&["a", "b"], &[]);
        let w = nf(&p, vec![syl(0, 2), syl(1, 5), syl(0, 1)]);
        let (c, core) = cyclically_reduce(&p, &w);
        assert_eq!(c.syllables(), &[syl(0, 2)]);
        assert_eq!(core.len(), 2);
        assert_eq!(p.multiply(&p.multiply(&c, &core), &p.inverse(&c)), w);
    }

    #[test]
    fn pyramid_of_cyclically_reduced_word_is_bare() {
        let p = pres(&["a", "b"], &[]);
        let w = nf(&p, vec![syl(0, 1), syl(1, 5)]);
        let d = pyramid_decompose(&p, &w);
        assert!(d.w1.is_empty());
        assert!(d.w2.is_empty());
        assert!(d.w2p.is_empty());
        assert_eq!(d.w3, w);
    }

    #[test]
    fn pyramid_splits_head_and_tail() {
        let p = pres(&["a", "b"], &[]);
        let w = nf(&p, vec![syl(0, 1), syl(1, 5), syl(0, 2)]);
        let d = pyramid_decompose(&p, &w);
        assert!(d.w1.is_empty());
        assert_eq!(d.w2.syllables(), &[syl(0, 1)]);
        assert_eq!(d.w3.syllables(), &[syl(1, 5)]);
        assert_eq!(d.w2p.syllables(), &[syl(0, 2)]);
    }

    #[test]
    fn pyramid_extracts_conjugator_then_decomposes() {
        let p = pres(&["a", "b", "c"], &[]);
        let w = nf(&p, vec![syl(2, 3), syl(0, 1), syl(1, 5), syl(0, -1), syl(2, -3)]);
        let d = pyramid_decompose(&p, &w);
        assert_eq!(d.w1.syllables(), &[syl(2, 3), syl(0, 1)]);
        assert_eq!(d.w3.syllables(), &[syl(1, 5)]);
        assert!(d.w2.is_empty() && d.w2p.is_empty());
    }

    #[test]
    fn csp_and_clg_examples() {
        let p = pres(&["a", "b"], &[]);
        assert!(csp(&p, &NormalForm::empty()).is_empty());
        assert_eq!(clg(&p, &NormalForm::empty()), 0);

        let w = nf(&p, vec![syl(0, 1), syl(1, 5)]);
        assert_eq!(csp(&p, &w), p.sp(&w));
        assert_eq!(clg(&p, &w), w.len());

        let conj = nf(&p, vec![syl(0, 1), syl(1, 5), syl(0, -1)]);
        assert_eq!(csp(&p, &conj), vec![1]);
        assert_eq!(clg(&p, &conj), 1);
    }

    #[test]
    fn clique_head_with_two_vertices() {
        // a and c are adjacent; b blocks both pairs from merging
        let p = pres(&["a", "b", "c"], &[("a", "c")]);
        let w = nf(&p, vec![syl(0, 1), syl(2, 1), syl(1, 5), syl(0, 2), syl(2, 2)]);
        let d = pyramid_decompose(&p, &w);
        assert_eq!(validate_pyramid(&p, &w, &d), Ok(()));
        assert_eq!(p.sp(&d.w2), vec![0, 2]);
        assert_eq!(p.sp(&d.w2p), vec![0, 2]);
    }
}
