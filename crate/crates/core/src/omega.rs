//! The ladder of equations `x_n = g(n,1) · x_{n+1}^p(n) · g(n,2)` over a free
//! product, and a bounded solvability search: candidates for the deepest
//! unknown are enumerated and the chain is evaluated upward exactly. Words
//! that outgrow a small threshold stay compressed as towers of repeated
//! cyclically reduced cores with explicit prefixes and suffixes; lengths,
//! boundary syllables and syllable streams all come out of the compressed
//! form without materializing anything.

use std::collections::HashSet;

use crate::equations::{EquationsError, FreeProductInstance, SandwichSpec};
use crate::group::GroupElem;
use crate::words::{NormalForm, Presentation, Syllable, Word};

/// One rung of the ladder: the sandwich spec plus its two built words.
#[derive(Debug, Clone)]
pub struct OmegaLevel {
    pub spec: SandwichSpec,
    pub g1: NormalForm,
    pub g2: NormalForm,
}

/// Finitely many rungs of the ladder, with strictly increasing `k`.
#[derive(Debug, Clone)]
pub struct OmegaSystem {
    levels: Vec<OmegaLevel>,
}

impl OmegaSystem {
    pub fn new(fp: &FreeProductInstance, specs: Vec<SandwichSpec>) -> Result<Self, EquationsError> {
        for pair in specs.windows(2) {
            if pair[1].k <= pair[0].k {
                return Err(EquationsError::LadderNotIncreasing(1, pair[1].k, 0, pair[0].k));
            }
        }
        let levels = specs
            .into_iter()
            .map(|spec| {
                let (g1, g2) = spec.build_words(fp);
                OmegaLevel { spec, g1, g2 }
            })
            .collect();
        Ok(OmegaSystem { levels })
    }

    /// Default ladder over two integer factors: `k(n) = 2(n+1)`, entries
    /// `1..=2k` split between the two columns, base element 1.
    pub fn default_over_z(
        fp: &FreeProductInstance,
        depth: usize,
        p_override: Option<u64>,
    ) -> Result<Self, EquationsError> {
        let mut specs = Vec::with_capacity(depth);
        for n in 0..depth {
            let k = 2 * (n + 1);
            let h: Vec<[GroupElem; 2]> = (0..k)
                .map(|l| [GroupElem::Int(2 * l as i64 + 1), GroupElem::Int(2 * l as i64 + 2)])
                .collect();
            specs.push(SandwichSpec::new(fp, k, p_override, GroupElem::Int(1), h)?);
        }
        OmegaSystem::new(fp, specs)
    }

    pub fn levels(&self) -> &[OmegaLevel] {
        &self.levels
    }

    pub fn parameter_weakened(&self) -> bool {
        self.levels.iter().any(|l| l.spec.parameter_weakened)
    }
}

/// Words above this length stay compressed.
const FLAT_THRESHOLD: u64 = 1 << 16;

/// A canonical word over the free product, either materialized or as
/// `prefix · m · suffix` where `m` is `count` copies of a repeated base with
/// `skip_front`/`skip_back` syllables trimmed, all junctions known clean.
#[derive(Debug, Clone)]
pub enum BigWord {
    Flat(NormalForm),
    Tower {
        prefix: Vec<Syllable>,
        base: Box<BigWord>,
        count: u64,
        skip_front: u64,
        skip_back: u64,
        suffix: Vec<Syllable>,
    },
}

impl BigWord {
    pub fn empty() -> Self {
        BigWord::Flat(NormalForm::empty())
    }

    pub fn lg(&self) -> u64 {
        match self {
            BigWord::Flat(w) => w.len() as u64,
            BigWord::Tower { prefix, base, count, skip_front, skip_back, suffix } => {
                prefix.len() as u64 + (base.lg() * count - skip_front - skip_back)
                    + suffix.len() as u64
            }
        }
    }

    /// Syllable at a position, resolved through the compression.
    pub fn at(&self, i: u64) -> &Syllable {
        match self {
            BigWord::Flat(w) => &w.syllables()[i as usize],
            BigWord::Tower { prefix, base, count, skip_front, skip_back, suffix } => {
                let plen = prefix.len() as u64;
                if i < plen {
                    return &prefix[i as usize];
                }
                let middle = base.lg() * count - skip_front - skip_back;
                if i < plen + middle {
                    return base.at((skip_front + (i - plen)) % base.lg());
                }
                &suffix[(i - plen - middle) as usize]
            }
        }
    }

    pub fn first(&self) -> Option<&Syllable> {
        (self.lg() > 0).then(|| self.at(0))
    }

    pub fn last(&self) -> Option<&Syllable> {
        (self.lg() > 0).then(|| self.at(self.lg() - 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Syllable> + '_ {
        (0..self.lg()).map(move |i| self.at(i))
    }

    pub fn equals_nf(&self, other: &NormalForm) -> bool {
        self.lg() == other.len() as u64
            && self.iter().zip(other.syllables()).all(|(a, b)| a == b)
    }

    pub fn materialize(&self, cap: u64) -> Result<NormalForm, EquationsError> {
        if self.lg() > cap {
            return Err(EquationsError::CapExceeded(cap as usize));
        }
        match self {
            BigWord::Flat(w) => Ok(w.clone()),
            _ => Ok(NormalForm::from_canonical(Word(self.iter().cloned().collect()))),
        }
    }
}

/// A both-ends-mutable view of a big word: explicit front and back vectors
/// around the untouched compressed middle.
struct Ends {
    front: Vec<Syllable>,
    base: Option<Box<BigWord>>,
    count: u64,
    skip_front: u64,
    skip_back: u64,
    /// stored reversed: `back[0]` is the last syllable
    back: Vec<Syllable>,
}

impl Ends {
    fn of(w: &BigWord) -> Ends {
        match w {
            BigWord::Flat(nf) => Ends {
                front: nf.syllables().to_vec(),
                base: None,
                count: 0,
                skip_front: 0,
                skip_back: 0,
                back: Vec::new(),
            },
            BigWord::Tower { prefix, base, count, skip_front, skip_back, suffix } => Ends {
                front: prefix.clone(),
                base: Some(base.clone()),
                count: *count,
                skip_front: *skip_front,
                skip_back: *skip_back,
                back: suffix.iter().rev().cloned().collect(),
            },
        }
    }

    fn middle_len(&self) -> u64 {
        match &self.base {
            None => 0,
            Some(b) => b.lg() * self.count - self.skip_front - self.skip_back,
        }
    }

    fn lg(&self) -> u64 {
        self.front.len() as u64 + self.middle_len() + self.back.len() as u64
    }

    fn first(&self) -> Option<Syllable> {
        if let Some(s) = self.front.first() {
            return Some(s.clone());
        }
        if self.middle_len() > 0 {
            let b = self.base.as_ref().unwrap();
            return Some(b.at(self.skip_front % b.lg()).clone());
        }
        self.back.last().cloned()
    }

    fn last(&self) -> Option<Syllable> {
        if let Some(s) = self.back.first() {
            return Some(s.clone());
        }
        if self.middle_len() > 0 {
            let b = self.base.as_ref().unwrap();
            let j = b.lg() * self.count - self.skip_back - 1;
            return Some(b.at(j % b.lg()).clone());
        }
        self.front.last().cloned()
    }

    fn pop_front(&mut self) -> Syllable {
        if !self.front.is_empty() {
            return self.front.remove(0);
        }
        if self.middle_len() > 0 {
            let b = self.base.as_ref().unwrap();
            let s = b.at(self.skip_front % b.lg()).clone();
            self.skip_front += 1;
            return s;
        }
        self.back.pop().expect("pop on empty word")
    }

    fn pop_back(&mut self) -> Syllable {
        if !self.back.is_empty() {
            return self.back.remove(0);
        }
        if self.middle_len() > 0 {
            let b = self.base.as_ref().unwrap();
            let j = b.lg() * self.count - self.skip_back - 1;
            let s = b.at(j % b.lg()).clone();
            self.skip_back += 1;
            return s;
        }
        self.front.pop().expect("pop on empty word")
    }

    fn push_back_clean(&mut self, s: Syllable) {
        self.back.insert(0, s);
    }

    fn into_bigword(self, pres: &Presentation) -> BigWord {
        let Ends { front, base, count, skip_front, skip_back, back } = self;
        let back: Vec<Syllable> = back.into_iter().rev().collect();
        let middle = match &base {
            None => 0,
            Some(b) => b.lg() * count - skip_front - skip_back,
        };
        if middle == 0 {
            let mut all = front;
            all.extend(back);
            return BigWord::Flat(pres.reduce(&Word(all)).expect("valid fragments"));
        }
        BigWord::Tower {
            prefix: front,
            base: base.unwrap(),
            count,
            skip_front,
            skip_back,
            suffix: back,
        }
    }
}

/// Conjugation core of a big word over the free product: repeatedly pulls a
/// front syllable around to merge with a same-vertex back syllable. Returns
/// the conjugator and the core, which has distinct first and last vertices
/// (or length at most 1).
fn cyc_reduce_big(
    fp: &FreeProductInstance,
    w: &BigWord,
) -> (Vec<Syllable>, BigWord) {
    let pres = fp.presentation();
    let mut view = Ends::of(w);
    let mut conj = Vec::new();
    loop {
        if view.lg() <= 1 {
            break;
        }
        let f = view.first().unwrap();
        let l = view.last().unwrap();
        if f.vertex != l.vertex {
            break;
        }
        let s = view.pop_front();
        let t = view.pop_back();
        let g = pres.factor(s.vertex);
        let prod = g.mul(&t.elem, &s.elem);
        if !g.is_identity(&prod) {
            view.push_back_clean(Syllable { vertex: s.vertex, elem: prod });
            conj.push(s);
            break; // merged but not cancelled: the pair is now one syllable
        }
        conj.push(s);
    }
    (conj, view.into_bigword(pres))
}

/// `left · mid · right` with the junction interactions resolved exactly.
/// Over a free product a junction is settled as soon as one syllable lands
/// without merging, so only boundary syllables of `mid` are ever touched.
fn sandwich_big(
    fp: &FreeProductInstance,
    left: &[Syllable],
    mid: BigWord,
    right: &[Syllable],
) -> BigWord {
    let pres = fp.presentation();
    let mut view = Ends::of(&mid);
    let mut stack: Vec<Syllable> = left.to_vec();
    while let (Some(top), Some(front)) = (stack.last().cloned(), view.first()) {
        if top.vertex != front.vertex {
            break;
        }
        let s = view.pop_front();
        let t = stack.pop().unwrap();
        let g = pres.factor(s.vertex);
        let prod = g.mul(&t.elem, &s.elem);
        if !g.is_identity(&prod) {
            stack.push(Syllable { vertex: s.vertex, elem: prod });
            break;
        }
    }
    let mut rqueue: std::collections::VecDeque<Syllable> = right.iter().cloned().collect();
    while let (Some(back), Some(head)) = (view.last(), rqueue.front().cloned()) {
        if back.vertex != head.vertex {
            break;
        }
        let t = view.pop_back();
        let r = rqueue.pop_front().unwrap();
        let g = pres.factor(t.vertex);
        let prod = g.mul(&t.elem, &r.elem);
        if !g.is_identity(&prod) {
            rqueue.push_front(Syllable { vertex: t.vertex, elem: prod });
            break;
        }
    }
    let mut front = stack;
    front.append(&mut view.front);
    view.front = front;
    let mut back: Vec<Syllable> = rqueue.into_iter().rev().collect();
    back.append(&mut view.back);
    view.back = back;
    view.into_bigword(pres)
}

/// `t^p` exactly, compressed when large: the conjugation core repeats with
/// clean junctions because its first and last vertices differ.
fn power_big(fp: &FreeProductInstance, t: &BigWord, p: u64) -> BigWord {
    let pres = fp.presentation();
    if t.lg() * p <= FLAT_THRESHOLD {
        let flat = t.materialize(FLAT_THRESHOLD).expect("under the threshold");
        return BigWord::Flat(pres.power(&flat, p as i64));
    }
    let (conj, core) = cyc_reduce_big(fp, t);
    if core.lg() <= 1 {
        let core_flat = core.materialize(2).expect("tiny core");
        let conj_nf = pres.reduce(&Word(conj.clone())).expect("valid syllables");
        let pow = pres.multiply(
            &pres.multiply(&conj_nf, &pres.power(&core_flat, p as i64)),
            &pres.inverse(&conj_nf),
        );
        return BigWord::Flat(pow);
    }
    debug_assert_ne!(
        core.first().unwrap().vertex,
        core.last().unwrap().vertex,
        "cores repeat cleanly only with distinct boundary vertices"
    );
    let tower = BigWord::Tower {
        prefix: Vec::new(),
        base: Box::new(core),
        count: p,
        skip_front: 0,
        skip_back: 0,
        suffix: Vec::new(),
    };
    let conj_inv: Vec<Syllable> = conj
        .iter()
        .rev()
        .map(|s| Syllable { vertex: s.vertex, elem: pres.factor(s.vertex).inv(&s.elem) })
        .collect();
    sandwich_big(fp, &conj, tower, &conj_inv)
}

/// Evaluates `g1 · t^p · g2` exactly; results under the threshold come back
/// materialized.
pub fn apply_level(
    fp: &FreeProductInstance,
    level: &OmegaLevel,
    t: &BigWord,
    cap: u64,
) -> Result<BigWord, EquationsError> {
    let _ = cap;
    let pres = fp.presentation();
    let p = level.spec.p;
    let projected = t.lg() * p + level.g1.len() as u64 + level.g2.len() as u64;
    if projected <= FLAT_THRESHOLD {
        let flat = t.materialize(FLAT_THRESHOLD)?;
        let pow = pres.power(&flat, p as i64);
        return Ok(BigWord::Flat(pres.multiply(&pres.multiply(&level.g1, &pow), &level.g2)));
    }
    let pow = power_big(fp, t, p);
    Ok(sandwich_big(fp, level.g1.syllables(), pow, level.g2.syllables()))
}

/// Runs the chain from a candidate for the deepest unknown up to level 0,
/// returning `[t_0, ..., t_depth]` with `t_depth` the candidate.
pub fn chain_up(
    fp: &FreeProductInstance,
    sys: &OmegaSystem,
    candidate: &NormalForm,
    depth: usize,
    cap: u64,
) -> Result<Vec<BigWord>, EquationsError> {
    let mut chain = vec![BigWord::Flat(candidate.clone())];
    for n in (0..depth).rev() {
        let next = apply_level(fp, &sys.levels[n], chain.last().unwrap(), cap)?;
        chain.push(next);
    }
    chain.reverse();
    Ok(chain)
}

/// Per-level quantities of a chain: length and whether the word starts in
/// the second factor and ends in the first.
#[derive(Debug, Clone)]
pub struct ChainTrace {
    pub lengths: Vec<u64>,
    pub reduced_21: Vec<bool>,
}

pub fn chain_trace(_fp: &FreeProductInstance, chain: &[BigWord]) -> ChainTrace {
    let lengths = chain.iter().map(|w| w.lg()).collect();
    let reduced_21 = chain
        .iter()
        .map(|w| {
            w.first().map(|s| s.vertex) == Some(FreeProductInstance::SECOND)
                && w.last().map(|s| s.vertex) == Some(FreeProductInstance::FIRST)
        })
        .collect();
    ChainTrace { lengths, reduced_21 }
}

/// The per-vertex element pools candidates draw from: every element
/// occurring in the ladder words plus their inverses, plus declared extras.
pub fn system_alphabet(
    fp: &FreeProductInstance,
    sys: &OmegaSystem,
    depth: usize,
    extras: &[Syllable],
) -> Result<[Vec<GroupElem>; 2], EquationsError> {
    let pres = fp.presentation();
    let mut pools: [Vec<GroupElem>; 2] = [Vec::new(), Vec::new()];
    let mut seen: [HashSet<GroupElem>; 2] = [HashSet::new(), HashSet::new()];
    {
        let mut add = |vertex: usize, elem: GroupElem| {
            if !pres.factor(vertex).is_identity(&elem) && seen[vertex].insert(elem.clone()) {
                pools[vertex].push(elem);
            }
        };
        for level in sys.levels().iter().take(depth) {
            for w in [&level.g1, &level.g2] {
                for s in w.syllables() {
                    add(s.vertex, s.elem.clone());
                    add(s.vertex, pres.factor(s.vertex).inv(&s.elem));
                }
            }
        }
        for s in extras {
            add(s.vertex, s.elem.clone());
            add(s.vertex, pres.factor(s.vertex).inv(&s.elem));
        }
    }
    for (v, pool) in pools.iter_mut().enumerate() {
        if pool.is_empty() {
            return Err(EquationsError::EmptyAlphabet(
                pres.graph().vertex_id(v).to_string(),
            ));
        }
        pool.sort_by(|a, b| pres.factor(v).cmp_elems(a, b));
    }
    Ok(pools)
}

/// All alternating words of length at most `max_len` over the pools, in
/// short-lex order.
fn candidates(pools: &[Vec<GroupElem>; 2], max_len: usize) -> Vec<NormalForm> {
    let mut out = vec![NormalForm::empty()];
    for len in 1..=max_len {
        for start in [0usize, 1] {
            let mut partial: Vec<Vec<Syllable>> = vec![Vec::new()];
            for i in 0..len {
                let vertex = (start + i) % 2;
                let mut next = Vec::with_capacity(partial.len() * pools[vertex].len());
                for stem in &partial {
                    for e in &pools[vertex] {
                        let mut w = stem.clone();
                        w.push(Syllable { vertex, elem: e.clone() });
                        next.push(w);
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|w| NormalForm::from_canonical(Word(w))));
        }
    }
    out
}

/// Exhaustive bounded solvability check: enumerates candidates for the
/// deepest unknown, evaluates the chain exactly, and returns the
/// materialized witness chain for the lexicographically least candidate
/// whose top word equals `target`; `None` when no candidate works.
pub fn omega_prefix_search(
    fp: &FreeProductInstance,
    sys: &OmegaSystem,
    depth: usize,
    max_len: usize,
    target: &NormalForm,
    extras: &[Syllable],
    cap: u64,
) -> Result<Option<Vec<NormalForm>>, EquationsError> {
    assert!(depth >= 1, "depth must be at least 1");
    assert!(sys.levels().len() >= depth, "ladder must define every level up to the depth");
    let pools = system_alphabet(fp, sys, depth, extras)?;
    for t in candidates(&pools, max_len) {
        let chain = chain_up(fp, sys, &t, depth, cap)?;
        if chain[0].equals_nf(target) {
            let witness: Result<Vec<NormalForm>, _> =
                chain.iter().map(|w| w.materialize(cap)).collect();
            return Ok(Some(witness?));
        }
    }
    Ok(None)
}
