//! Deterministic plain-text reports: stable field order, no timestamps, no
//! hash-map iteration.

use std::fmt::Write as _;

use graphprod::cardinal::CardMode;
use graphprod::classify::{
    check_restricted_admissibility, classify_instance, FullReport, Outcome, PartitionA, SymbolicInstance,
    Verdict,
};
use graphprod::descriptor::{AbelianDescriptor, CountablePart, DivSplit};
use graphprod::equations::{
    trichotomy_check, FreeProductInstance, SandwichSpec, TrichotomyCase, ZAlternating,
};
use graphprod::group::GroupElem;
use graphprod::omega::{chain_up, omega_prefix_search, OmegaSystem};
use graphprod::pyramid::{
    clg, csp, cyclically_reduce, is_ab_cyclically_reduced, is_cyclically_reduced,
    is_weakly_cyclically_reduced, pyramid_decompose,
};
use graphprod::words::{NormalForm, Presentation, Syllable, Word};

pub fn fmt_descriptor(d: &AbelianDescriptor) -> String {
    let mut parts: Vec<String> = Vec::new();
    if let CountablePart::Countable(_) = d.countable {
        parts.push("countable part".to_string());
    }
    for (s, lam) in d.lambdas() {
        parts.push(format!("{s} ^ {lam}"));
    }
    if parts.is_empty() {
        "trivial".to_string()
    } else {
        parts.join(" + ")
    }
}

pub fn fmt_vertex_list(p: &Presentation, vs: &[usize]) -> String {
    if vs.is_empty() {
        return "-".to_string();
    }
    vs.iter().map(|&v| p.graph().vertex_id(v)).collect::<Vec<_>>().join(" ")
}

fn fmt_ids(ids: &[String]) -> String {
    if ids.is_empty() {
        "-".to_string()
    } else {
        ids.join(" ")
    }
}

pub fn fmt_verdict(out: &mut String, v: &Verdict, indent: &str) {
    let _ = writeln!(out, "{indent}verdict: {}", v.outcome);
    for hit in &v.trail {
        let _ = writeln!(out, "{indent}rule {}: {} [{}]", hit.rule, hit.statement, hit.data);
    }
}

pub fn partition_report(out: &mut String, part: &PartitionA) {
    out.push_str("partition {\n");
    let _ = writeln!(out, "  a0: {}", fmt_ids(&part.a0));
    let _ = writeln!(out, "  a5: {}", fmt_ids(&part.a5));
    let _ = writeln!(out, "  a6: {}", fmt_ids(&part.a6));
    let _ = writeln!(out, "  a7: {}", fmt_ids(&part.a7));
    let _ = writeln!(out, "  a8: {}", fmt_ids(&part.a8));
    let _ = writeln!(out, "  a9: {}", fmt_ids(&part.a9));
    let _ = writeln!(out, "  n: {}", part.n);
    match part.n_phi {
        Some(n) => {
            let _ = writeln!(out, "  n-phi: {n}");
        }
        None => out.push_str("  n-phi: none\n"),
    }
    for (id, why) in &part.undetermined {
        let _ = writeln!(out, "  undetermined {id}: {why}");
    }
    out.push_str("}\n");
}

/// The classify subcommand's report; returns the text and the verdict the
/// expectation flag is judged against.
pub fn classify_report(
    inst: &SymbolicInstance,
    mode: CardMode,
    cap: u64,
    b0: &[String],
    query: Option<&[String]>,
) -> Result<(String, Outcome), graphprod::classify::ClassifyError> {
    let mut out = String::new();
    let FullReport { partition, verdict, sums } = classify_instance(inst, mode, cap)?;
    let _ = writeln!(
        out,
        "mode: {}",
        match mode {
            CardMode::NotCh => "not-ch",
            CardMode::Ch => "ch",
        }
    );
    partition_report(&mut out, &partition);
    if !sums.is_empty() {
        out.push_str("light-part sums {\n");
        for (s, total) in &sums {
            let _ = writeln!(out, "  {s}: {total}");
        }
        out.push_str("}\n");
    }
    fmt_verdict(&mut out, &verdict, "");
    let mut decisive = verdict.outcome.clone();
    if query.is_some() || !b0.is_empty() {
        let restricted = check_restricted_admissibility(inst, b0, query, mode, cap)?;
        out.push_str("restricted {\n");
        if !b0.is_empty() {
            let _ = writeln!(out, "  b0: {}", b0.join(" "));
        }
        if let Some(q) = query {
            let _ = writeln!(out, "  query: {}", q.join(" "));
        }
        fmt_verdict(&mut out, &restricted, "  ");
        out.push_str("}\n");
        decisive = restricted.outcome;
    }
    Ok((out, decisive))
}

pub fn decompose_report(p: &Presentation, w: &NormalForm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "word: {}", p.format_word(w.syllables()));
    let d = pyramid_decompose(p, w);
    let _ = writeln!(out, "w1: {}", p.format_word(d.w1.syllables()));
    let _ = writeln!(out, "w2: {}", p.format_word(d.w2.syllables()));
    let _ = writeln!(out, "w3: {}", p.format_word(d.w3.syllables()));
    let _ = writeln!(out, "w2p: {}", p.format_word(d.w2p.syllables()));
    let _ = writeln!(out, "csp: {}", fmt_vertex_list(p, &csp(p, w)));
    let _ = writeln!(out, "clg: {}", clg(p, w));
    let (conj, core) = cyclically_reduce(p, w);
    let _ = writeln!(out, "conjugator: {}", p.format_word(conj.syllables()));
    let _ = writeln!(out, "core: {}", p.format_word(core.syllables()));
    let _ = writeln!(out, "cyclically-reduced: {}", is_cyclically_reduced(p, w));
    let _ = writeln!(out, "weakly-cyclically-reduced: {}", is_weakly_cyclically_reduced(p, w));
    out
}

pub struct EquationsParams {
    pub k: usize,
    pub p_override: Option<u64>,
    pub alphabet: i64,
    pub max_len: usize,
    pub depth: usize,
    pub omega_max_len: usize,
    pub trials: usize,
    pub seed: u64,
}

const WORD_CAP: u64 = 1 << 22;

/// The equations subcommand's report over an integer free product; returns
/// the text and whether every check came out clean.
pub fn equations_report(
    fp: &FreeProductInstance,
    params: &EquationsParams,
) -> Result<(String, bool), graphprod::equations::EquationsError> {
    let mut out = String::new();
    let mut clean = true;
    let pres = fp.presentation();
    let h: Vec<[GroupElem; 2]> = (0..params.k)
        .map(|l| [GroupElem::Int(2 * l as i64 + 1), GroupElem::Int(2 * l as i64 + 2)])
        .collect();
    let spec = SandwichSpec::new(fp, params.k, params.p_override, GroupElem::Int(1), h)?;
    let _ = writeln!(
        out,
        "sandwich k={} p={}{}",
        spec.k,
        spec.p,
        if spec.parameter_weakened { " (parameter-weakened)" } else { "" }
    );

    // exhaustive trichotomy over the declared alphabet
    let words = ZAlternating::new(params.alphabet, params.max_len);
    let mut tally = [0usize; 3];
    let mut multi = 0usize;
    let mut violations = 0usize;
    for idx in 0..words.count() {
        let u = pres.reduce(&words.word(idx))?;
        let rep = trichotomy_check(fp, &spec, &u);
        match rep.chosen {
            Some(TrichotomyCase::LengthGrows) => tally[0] += 1,
            Some(TrichotomyCase::CyclicallyReducedFloor) => tally[1] += 1,
            Some(TrichotomyCase::LengthPreservedFloor) => tally[2] += 1,
            None => violations += 1,
        }
        if [rep.case_a, rep.case_b, rep.case_c].iter().filter(|b| **b).count() > 1 {
            multi += 1;
        }
    }
    let _ = writeln!(
        out,
        "trichotomy alphabet={} maxlen={} words={}",
        params.alphabet,
        params.max_len,
        words.count()
    );
    let _ = writeln!(out, "  case-a: {}", tally[0]);
    let _ = writeln!(out, "  case-b: {}", tally[1]);
    let _ = writeln!(out, "  case-c: {}", tally[2]);
    let _ = writeln!(out, "  multi: {multi}");
    let _ = writeln!(out, "  violations: {violations}");
    clean &= violations == 0;

    // one-step growth law on seeded random head/tail-reduced words
    let sys = OmegaSystem::default_over_z(fp, params.depth.max(1), params.p_override)?;
    let mut state = params.seed | 1;
    let mut rng = move |m: usize| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % m as u64) as usize
    };
    let mut attempts = 0usize;
    let mut grew = 0usize;
    let mut stayed = 0usize;
    for t in 0..params.trials {
        let len = 2 * (1 + rng(4));
        let mut syllables = Vec::with_capacity(len);
        for i in 0..len {
            let vertex = if i % 2 == 0 { 1 } else { 0 };
            let val = 1 + rng(params.alphabet.unsigned_abs() as usize) as i64;
            let sign = if rng(2) == 0 { 1 } else { -1 };
            syllables.push(Syllable { vertex, elem: GroupElem::Int(sign * val) });
        }
        let u = pres.reduce(&Word(syllables))?;
        if !is_ab_cyclically_reduced(pres, &u, 1, 0) {
            continue;
        }
        attempts += 1;
        let level = &sys.levels()[t % sys.levels().len()];
        let w = pres.multiply(
            &pres.multiply(&level.g1, &pres.power(&u, level.spec.p as i64)),
            &level.g2,
        );
        if w.len() > u.len() {
            grew += 1;
        }
        if is_ab_cyclically_reduced(pres, &w, 1, 0) {
            stayed += 1;
        }
    }
    let _ = writeln!(
        out,
        "growth-law trials={} attempts={attempts} seed={}",
        params.trials, params.seed
    );
    let _ = writeln!(out, "  grew: {grew}");
    let _ = writeln!(out, "  stayed-reduced: {stayed}");
    clean &= grew == attempts && stayed == attempts;

    // bounded solvability search with the empty target, plus a planted control
    let depth = params.depth.max(1);
    let found =
        omega_prefix_search(fp, &sys, depth, params.omega_max_len, &NormalForm::empty(), &[], WORD_CAP)?;
    let _ = writeln!(out, "omega depth={depth} maxlen={} target=1", params.omega_max_len);
    let _ = writeln!(
        out,
        "  witness: {}",
        match &found {
            None => "none".to_string(),
            Some(chain) => format!("found ({} levels)", chain.len()),
        }
    );
    clean &= found.is_none();
    // explicit length traces of a few chains, deepest level last
    for text in ["1", "h2:1 h1:1"] {
        let t = pres.reduce(&pres.parse_word(text)?)?;
        let chain = chain_up(fp, &sys, &t, depth, WORD_CAP)?;
        let trace = graphprod::omega::chain_trace(fp, &chain);
        let lengths: Vec<String> = trace.lengths.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(out, "trace t_depth={text}: lengths {}", lengths.join(" "));
    }

    let planted_chain = chain_up(fp, &sys, &NormalForm::empty(), depth, WORD_CAP)?;
    let planted_target = planted_chain[0].materialize(WORD_CAP)?;
    let control =
        omega_prefix_search(fp, &sys, depth, params.omega_max_len, &planted_target, &[], WORD_CAP)?;
    let _ = writeln!(
        out,
        "omega planted control: {}",
        match &control {
            Some(_) => "found",
            None => "missed",
        }
    );
    clean &= control.is_some();
    Ok((out, clean))
}

pub struct DivSplitText(pub DivSplit);

impl std::fmt::Display for DivSplitText {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "divisible = {}; reduced = {}{}",
            fmt_descriptor(&self.0.divisible),
            fmt_descriptor(&self.0.reduced),
            if self.0.reduced_unknown_countable { " (unknown countable part)" } else { "" }
        )
    }
}
