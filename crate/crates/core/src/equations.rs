//! Desk-scale verification lab for words in free products: alternating
//! sandwich words, the length trichotomy for `g1·u^p·g2`, and bounded
//! searches for finite orders and q-th roots on the four-vertex instance.

use std::collections::HashSet;

use thiserror::Error;

use crate::group::GroupElem;
use crate::pyramid::{clg, csp, is_ab_cyclically_reduced, is_clique};
use crate::words::{NormalForm, Presentation, Syllable, Word, WordError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquationsError {
    #[error("the instance must have exactly two non-adjacent vertices")]
    NotFreeProduct,
    #[error("k must be even and at least 2 (got {0})")]
    BadK(usize),
    #[error("p = {p} is below the safe bound 36k+100 = {bound}; pass the override to weaken")]
    PTooSmall { p: u64, bound: u64 },
    #[error("sandwich base element must not be the identity")]
    TrivialBase,
    #[error("sandwich entry ({0}, {1}) is the identity")]
    TrivialEntry(usize, usize),
    #[error("sandwich entries repeat at ({0}, {1}) and ({2}, {3})")]
    RepeatedEntries(usize, usize, usize, usize),
    #[error("the closing entry of column 1 inverts an opening entry of column 2")]
    HeadTailInverse,
    #[error("the opening entry of column 2 inverts entry ({0}, 2)")]
    OpeningInverse(usize),
    #[error("the closing entry of column 1 inverts entry ({0}, 1)")]
    ClosingInverse(usize),
    #[error("level ladder must be strictly increasing: k({0}) = {1} is not above k({2}) = {3}")]
    LadderNotIncreasing(usize, usize, usize, usize),
    #[error("search alphabet for vertex `{0}` is empty")]
    EmptyAlphabet(String),
    #[error("bounded search needs finite factors")]
    InfiniteFactors,
    #[error("{0} and {1} must be primes with the first smaller")]
    BadPrimes(u64, u64),
    #[error("word size cap {0} exceeded during chain evaluation")]
    CapExceeded(usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Group(#[from] crate::group::GroupError),
}

/// A two-vertex edgeless presentation: the free product of the two factors.
/// Vertex 0 carries the first factor, vertex 1 the second.
#[derive(Debug, Clone)]
pub struct FreeProductInstance {
    pres: Presentation,
}

impl FreeProductInstance {
    pub fn new(pres: Presentation) -> Result<Self, EquationsError> {
        if pres.vertex_count() != 2 || pres.adjacent(0, 1) {
            return Err(EquationsError::NotFreeProduct);
        }
        Ok(FreeProductInstance { pres })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    /// Vertex of the first factor.
    pub const FIRST: usize = 0;
    /// Vertex of the second factor.
    pub const SECOND: usize = 1;
}

/// Data for one sandwich word pair: an even number `k` of second-factor
/// entries per column, interleaved with the base element of the first factor
/// and its inverse.
#[derive(Debug, Clone)]
pub struct SandwichSpec {
    pub k: usize,
    pub p: u64,
    /// marks runs whose exponent was weakened below the safe bound
    pub parameter_weakened: bool,
    g_star: GroupElem,
    /// `h[l] = [column-1 entry, column-2 entry]`, `l < k`
    h: Vec<[GroupElem; 2]>,
}

impl SandwichSpec {
    /// Validates every side condition; `p_override` lowers the exponent
    /// below the safe bound `36k + 100` and marks the result parameter-weakened.
    pub fn new(
        fp: &FreeProductInstance,
        k: usize,
        p_override: Option<u64>,
        g_star: GroupElem,
        h: Vec<[GroupElem; 2]>,
    ) -> Result<Self, EquationsError> {
        if k < 2 || !k.is_multiple_of(2) {
            return Err(EquationsError::BadK(k));
        }
        let bound = 36 * k as u64 + 100;
        let (p, parameter_weakened) = match p_override {
            None => (bound, false),
            Some(p) if p >= bound => (p, false),
            Some(p) => (p, true),
        };
        let pres = fp.presentation();
        let g1 = pres.factor(FreeProductInstance::FIRST);
        let g2 = pres.factor(FreeProductInstance::SECOND);
        g1.validate(&g_star)?;
        if g1.is_identity(&g_star) {
            return Err(EquationsError::TrivialBase);
        }
        assert_eq!(h.len(), k, "one entry row per level");
        for (l, row) in h.iter().enumerate() {
            for (i, e) in row.iter().enumerate() {
                g2.validate(e)?;
                if g2.is_identity(e) {
                    return Err(EquationsError::TrivialEntry(l, i + 1));
                }
            }
        }
        let flat: Vec<(usize, usize, &GroupElem)> = h
            .iter()
            .enumerate()
            .flat_map(|(l, row)| row.iter().enumerate().map(move |(i, e)| (l, i + 1, e)))
            .collect();
        for (x, &(l1, i1, e1)) in flat.iter().enumerate() {
            for &(l2, i2, e2) in flat.iter().skip(x + 1) {
                if e1 == e2 {
                    return Err(EquationsError::RepeatedEntries(l1, i1, l2, i2));
                }
            }
        }
        let closing = &h[k - 1][0]; // column-1 entry at level k-1
        if *closing == g2.inv(&h[0][1]) || *closing == g2.inv(&h[1][1]) {
            return Err(EquationsError::HeadTailInverse);
        }
        for l in 1..k {
            if h[0][1] == g2.inv(&h[l][1]) {
                return Err(EquationsError::OpeningInverse(l));
            }
        }
        for l in 0..k - 1 {
            if *closing == g2.inv(&h[l][0]) {
                return Err(EquationsError::ClosingInverse(l));
            }
        }
        Ok(SandwichSpec { k, p, parameter_weakened, g_star, h })
    }

    /// The two alternating words `h(0,i) g* h(1,i) g*⁻¹ ⋯`, each of length
    /// `2k`, starting in the second factor and ending in the first.
    pub fn build_words(&self, fp: &FreeProductInstance) -> (NormalForm, NormalForm) {
        let pres = fp.presentation();
        let g1 = pres.factor(FreeProductInstance::FIRST);
        let build = |col: usize| -> NormalForm {
            let mut syllables = Vec::with_capacity(2 * self.k);
            for l in 0..self.k {
                syllables.push(Syllable {
                    vertex: FreeProductInstance::SECOND,
                    elem: self.h[l][col].clone(),
                });
                let base =
                    if l % 2 == 0 { self.g_star.clone() } else { g1.inv(&self.g_star) };
                syllables.push(Syllable { vertex: FreeProductInstance::FIRST, elem: base });
            }
            let nf = pres.reduce(&Word(syllables)).expect("validated syllables");
            debug_assert_eq!(nf.len(), 2 * self.k);
            nf
        };
        (build(0), build(1))
    }
}

/// Which clause of the trichotomy a given `u` satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrichotomyCase {
    LengthGrows,
    CyclicallyReducedFloor,
    LengthPreservedFloor,
}

/// Truth values and the measured quantities behind them.
#[derive(Debug, Clone)]
pub struct TrichotomyReport {
    pub case_a: bool,
    pub case_b: bool,
    pub case_c: bool,
    pub lg_u: usize,
    pub lg_w: usize,
    pub clg_u: usize,
    pub floor: usize,
    pub chosen: Option<TrichotomyCase>,
}

/// Evaluates the three clauses for `w = g1 · u^p · g2`:
/// (a) `lg(w) > lg(u)`;
/// (b) `clg(u) <= 1`, `lg(w) >= 2k` and `w` starts in the second factor and
///     ends in the first with no other normal form doing otherwise;
/// (c) `clg(u) <= 1`, `lg(w) >= 2k` and `lg(w) = lg(u)`.
/// `g1 · u^p · g2` assembled through the conjugation core of `u`, so the
/// power costs one pass instead of repeated squaring: `u = c · d · c⁻¹`
/// gives `u^p = c · d^p · c⁻¹`, and a single reduction settles the rest.
fn sandwich_power(
    p: &Presentation,
    g1: &NormalForm,
    u: &NormalForm,
    power: u64,
    g2: &NormalForm,
) -> NormalForm {
    let (c, d) = crate::pyramid::cyclically_reduce(p, u);
    let mut v: Vec<Syllable> = Vec::with_capacity(
        g1.len() + 2 * c.len() + d.len() * power as usize + g2.len(),
    );
    v.extend_from_slice(g1.syllables());
    v.extend_from_slice(c.syllables());
    if d.len() == 1 {
        let s = &d.syllables()[0];
        let e = p.factor(s.vertex).pow(&s.elem, power as i64);
        if !p.factor(s.vertex).is_identity(&e) {
            v.push(Syllable { vertex: s.vertex, elem: e });
        }
    } else {
        for _ in 0..power {
            v.extend_from_slice(d.syllables());
        }
    }
    v.extend_from_slice(p.inverse(&c).syllables());
    v.extend_from_slice(g2.syllables());
    p.reduce(&Word(v)).expect("assembled from valid syllables")
}

pub fn trichotomy_check(
    fp: &FreeProductInstance,
    spec: &SandwichSpec,
    u: &NormalForm,
) -> TrichotomyReport {
    let pres = fp.presentation();
    let (g1, g2) = spec.build_words(fp);
    let w = sandwich_power(pres, &g1, u, spec.p, &g2);
    let lg_u = u.len();
    let lg_w = w.len();
    let clg_u = clg(pres, u);
    let floor = 2 * spec.k;
    let case_a = lg_w > lg_u;
    let reduced_21 = is_ab_cyclically_reduced(
        pres,
        &w,
        FreeProductInstance::SECOND,
        FreeProductInstance::FIRST,
    );
    let case_b = clg_u <= 1 && lg_w >= floor && reduced_21;
    let case_c = clg_u <= 1 && lg_w >= floor && lg_w == lg_u;
    let chosen = if case_a {
        Some(TrichotomyCase::LengthGrows)
    } else if case_b {
        Some(TrichotomyCase::CyclicallyReducedFloor)
    } else if case_c {
        Some(TrichotomyCase::LengthPreservedFloor)
    } else {
        None
    };
    TrichotomyReport { case_a, case_b, case_c, lg_u, lg_w, clg_u, floor, chosen }
}

/// Report of a bounded finite-order check.
#[derive(Debug, Clone)]
pub struct FiniteOrderReport {
    /// least exponent up to the bound with trivial power, if any
    pub order: Option<u64>,
    pub csp: Vec<usize>,
    pub csp_complete: bool,
}

/// Looks for a finite order of `w` up to `bound`; when found, reports the
/// support of the conjugation core and whether it induces a complete graph.
pub fn finite_order_csp(p: &Presentation, w: &NormalForm, bound: u64) -> FiniteOrderReport {
    let mut acc = NormalForm::empty();
    let mut order = None;
    for k in 1..=bound {
        acc = p.multiply(&acc, w);
        if acc.is_empty() {
            order = Some(k);
            break;
        }
    }
    let support = csp(p, w);
    let complete = is_clique(p, &support);
    FiniteOrderReport { order, csp: support, csp_complete: complete }
}

/// Enumerates every canonical word of length at most `max_len` over the
/// finite factors of `p`, in deterministic short-lex order.
pub fn enumerate_canonical_words(
    p: &Presentation,
    max_len: usize,
) -> Result<Vec<NormalForm>, EquationsError> {
    let mut alphabet: Vec<Syllable> = Vec::new();
    for v in 0..p.vertex_count() {
        let g = p.factor(v);
        let elems = g.elements().ok_or(EquationsError::InfiniteFactors)?;
        for e in elems.into_iter().filter(|e| !g.is_identity(e)) {
            alphabet.push(Syllable { vertex: v, elem: e });
        }
    }
    let mut seen: HashSet<NormalForm> = HashSet::new();
    let mut out: Vec<NormalForm> = vec![NormalForm::empty()];
    seen.insert(NormalForm::empty());
    let mut frontier: Vec<Vec<Syllable>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for stem in &frontier {
            for s in &alphabet {
                if stem.last().map(|t| t.vertex) == Some(s.vertex) {
                    continue; // an immediate same-vertex repeat always merges
                }
                let mut word = stem.clone();
                word.push(s.clone());
                let nf = p.reduce(&Word(word.clone())).expect("alphabet syllables are valid");
                if nf.len() == word.len() && seen.insert(nf.clone()) {
                    out.push(nf);
                }
                next.push(word);
            }
        }
        frontier = next;
    }
    out.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| {
                for (x, y) in a.syllables().iter().zip(b.syllables()) {
                    match p.cmp_syllables(x, y) {
                        std::cmp::Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                std::cmp::Ordering::Equal
            })
    });
    Ok(out)
}

/// Indexed enumeration of the alternating canonical words over a two-vertex
/// edgeless presentation with integer factors, elements drawn from
/// `±1..=±alphabet`, shortest first. Random access by index keeps exhaustive
/// runs parallelizable without materializing the word list.
#[derive(Debug, Clone)]
pub struct ZAlternating {
    pool: Vec<i64>,
    max_len: usize,
}

impl ZAlternating {
    pub fn new(alphabet: i64, max_len: usize) -> Self {
        let mut pool = Vec::new();
        for v in 1..=alphabet {
            pool.push(v);
            pool.push(-v);
        }
        ZAlternating { pool, max_len }
    }

    pub fn count(&self) -> u64 {
        let p = self.pool.len() as u64;
        let mut total = 1;
        let mut block = 1;
        for _ in 1..=self.max_len {
            block *= p;
            total += 2 * block;
        }
        total
    }

    /// The `idx`-th word: index 0 is the empty word, then all words of
    /// length 1 starting at vertex 0, then starting at vertex 1, and so on
    /// by length.
    pub fn word(&self, idx: u64) -> Word {
        if idx == 0 {
            return Word::empty();
        }
        let p = self.pool.len() as u64;
        let mut rest = idx - 1;
        for len in 1..=self.max_len {
            let block = p.pow(len as u32);
            for start in 0..2usize {
                if rest < block {
                    let mut syllables = Vec::with_capacity(len);
                    let mut digits = rest;
                    for i in 0..len {
                        let d = (digits % p) as usize;
                        digits /= p;
                        let vertex = (start + i) % 2;
                        syllables.push(Syllable { vertex, elem: GroupElem::Int(self.pool[d]) });
                    }
                    return Word(syllables);
                }
                rest -= block;
            }
        }
        panic!("index {idx} out of range");
    }
}

/// Outcome of the bounded q-th-root search for `d·(g1 g2 h1 h2)^p`.
#[derive(Debug, Clone)]
pub struct RootSearchReport {
    pub target: NormalForm,
    pub candidates: usize,
    /// lexicographically least root found, if any
    pub root: Option<NormalForm>,
}

/// Exhaustively checks every canonical word `y` of length at most `max_len`
/// over the finite factors for `y^q = d·(g1 g2 h1 h2)^p`.
#[allow(clippy::too_many_arguments)]
pub fn no_qth_root_search(
    p4: &Presentation,
    d: &NormalForm,
    q: u64,
    p: u64,
    g1: Syllable,
    g2: Syllable,
    h1: Syllable,
    h2: Syllable,
    max_len: usize,
) -> Result<RootSearchReport, EquationsError> {
    if !crate::group::is_prime(q) || !crate::group::is_prime(p) || q >= p {
        return Err(EquationsError::BadPrimes(q, p));
    }
    let base = p4.reduce(&Word(vec![g1, g2, h1, h2]))?;
    let target = p4.multiply(d, &p4.power(&base, p as i64));
    let candidates = enumerate_canonical_words(p4, max_len)?;
    let count = candidates.len();
    for y in candidates {
        if p4.power(&y, q as i64) == target {
            return Ok(RootSearchReport { target, candidates: count, root: Some(y) });
        }
    }
    Ok(RootSearchReport { target, candidates: count, root: None })
}
