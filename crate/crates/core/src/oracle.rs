//! Brute-force reference implementations: exhaustive closures of words under
//! the raw rewriting moves, with and without rotations. Deliberately
//! independent of the reduction engine — these enumerate one-step moves and
//! nothing else — so agreement between the two is evidence, not tautology.

use std::collections::{HashSet, VecDeque};

use crate::pyramid::{validate_pyramid, PyramidDecomposition};
use crate::words::{NormalForm, Presentation, Syllable, Word};

/// One raw move: delete an identity syllable, merge two adjacent
/// same-vertex syllables, swap two adjacent commuting syllables, or rotate
/// the whole word by one syllable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Delete(usize),
    Merge(usize),
    Swap(usize),
    RotateLeft,
    RotateRight,
}

pub fn applicable_moves(p: &Presentation, w: &[Syllable], rotations: bool) -> Vec<Move> {
    let mut out = Vec::new();
    for (i, s) in w.iter().enumerate() {
        if p.factor(s.vertex).is_identity(&s.elem) {
            out.push(Move::Delete(i));
        }
    }
    for i in 0..w.len().saturating_sub(1) {
        if w[i].vertex == w[i + 1].vertex {
            out.push(Move::Merge(i));
        } else if p.adjacent(w[i].vertex, w[i + 1].vertex) {
            out.push(Move::Swap(i));
        }
    }
    if rotations && w.len() >= 2 {
        out.push(Move::RotateLeft);
        out.push(Move::RotateRight);
    }
    out
}

pub fn apply_move(p: &Presentation, w: &[Syllable], mv: Move) -> Vec<Syllable> {
    let mut out = w.to_vec();
    match mv {
        Move::Delete(i) => {
            out.remove(i);
        }
        Move::Merge(i) => {
            let g = p.factor(w[i].vertex);
            out[i].elem = g.mul(&w[i].elem, &w[i + 1].elem);
            out.remove(i + 1);
        }
        Move::Swap(i) => out.swap(i, i + 1),
        Move::RotateLeft => out.rotate_left(1),
        Move::RotateRight => out.rotate_right(1),
    }
    out
}

/// Every word reachable from `w` by raw moves. Merges and deletions shorten,
/// swaps and rotations preserve length, so the closure is finite.
pub fn closure(
    p: &Presentation,
    w: &[Syllable],
    rotations: bool,
    max_states: usize,
) -> HashSet<Vec<Syllable>> {
    let mut seen: HashSet<Vec<Syllable>> = HashSet::new();
    let mut queue: VecDeque<Vec<Syllable>> = VecDeque::new();
    seen.insert(w.to_vec());
    queue.push_back(w.to_vec());
    while let Some(cur) = queue.pop_front() {
        for mv in applicable_moves(p, &cur, rotations) {
            let next = apply_move(p, &cur, mv);
            if seen.insert(next.clone()) {
                assert!(seen.len() <= max_states, "closure exceeded {max_states} states");
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Whether the move closure of `w` contains the empty word.
pub fn closure_contains_empty(p: &Presentation, w: &[Syllable], max_states: usize) -> bool {
    closure(p, w, false, max_states).contains(&Vec::new())
}

/// Least minimal-length word of the closure under the syllable order: an
/// engine-independent canonical representative.
pub fn oracle_canonical(p: &Presentation, w: &[Syllable], max_states: usize) -> Word {
    let states = closure(p, w, false, max_states);
    let min_len = states.iter().map(|s| s.len()).min().unwrap();
    let best = states
        .into_iter()
        .filter(|s| s.len() == min_len)
        .min_by(|a, b| cmp_words(p, a, b))
        .unwrap();
    Word(best)
}

fn cmp_words(p: &Presentation, a: &[Syllable], b: &[Syllable]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match p.cmp_syllables(x, y) {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    a.len().cmp(&b.len())
}

/// Shortest length reachable when rotations are allowed as well.
pub fn min_rotation_length(p: &Presentation, w: &[Syllable], max_states: usize) -> usize {
    closure(p, w, true, max_states).iter().map(|s| s.len()).min().unwrap()
}

/// A random walk over applicable moves, ending only when no shortening move
/// is left (a maximal move sequence up to commutations).
pub fn random_walk(
    p: &Presentation,
    w: &[Syllable],
    rng: &mut impl FnMut(usize) -> usize,
    steps: usize,
) -> Vec<Syllable> {
    let mut cur = w.to_vec();
    for _ in 0..steps {
        let moves = applicable_moves(p, &cur, false);
        if moves.is_empty() {
            break;
        }
        cur = apply_move(p, &cur, moves[rng(moves.len())]);
    }
    // finish every pending deletion or merge so the sequence is maximal
    loop {
        let mv = applicable_moves(p, &cur, false)
            .into_iter()
            .find(|m| matches!(m, Move::Delete(_) | Move::Merge(_)));
        match mv {
            Some(m) => cur = apply_move(p, &cur, m),
            None => break,
        }
    }
    cur
}

/// All decompositions of `w` into `w1 · w2 · w3 · w2' · w1⁻¹` satisfying the
/// five side conditions, found by splitting every normal form of the
/// element. Lives entirely on the closure, not on the engine's own
/// decomposition routine.
pub fn pyramid_decompositions_brute(
    p: &Presentation,
    w: &NormalForm,
    max_states: usize,
) -> Vec<PyramidDecomposition> {
    let states = closure(p, w.syllables(), false, max_states);
    let min_len = states.iter().map(|s| s.len()).min().unwrap_or(0);
    let mut out = Vec::new();
    for u in states.into_iter().filter(|s| s.len() == min_len) {
        let n = u.len();
        for a in 0..=n / 2 {
            // the closing fragment must spell the inverse of the opening one
            let closes = (0..a).all(|i| {
                let s = &u[a - 1 - i];
                let t = &u[n - a + i];
                s.vertex == t.vertex
                    && p.factor(s.vertex).is_identity(
                        &p.factor(s.vertex).mul(&s.elem, &t.elem),
                    )
            });
            if !closes {
                continue;
            }
            let m = n - 2 * a;
            for b in 0..=m {
                for c in b..=m {
                    let d = PyramidDecomposition {
                        w1: to_nf(p, &u[0..a]),
                        w2: to_nf(p, &u[a..a + b]),
                        w3: to_nf(p, &u[a + b..a + c]),
                        w2p: to_nf(p, &u[a + c..a + m]),
                    };
                    if validate_pyramid(p, w, &d).is_ok() {
                        out.push(d);
                    }
                }
            }
        }
    }
    out
}

fn to_nf(p: &Presentation, syllables: &[Syllable]) -> NormalForm {
    p.reduce(&Word(syllables.to_vec())).expect("fragments of valid words are valid")
}
