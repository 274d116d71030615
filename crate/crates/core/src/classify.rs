//! Partition of the vertex set by factor-group structure and the
//! admissibility verdicts built on top of it. Everything here is symbolic:
//! factor groups enter either as concrete computable groups or as declared
//! shapes with flags, and every negative verdict carries a trail of the
//! rules that produced it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cardinal::{card_add, card_region, CardMode, CardRegion, CardValue, SymbolicCardinal};
use crate::descriptor::{AbelianDescriptor, SIndex};
use crate::graph::SymbolicGraph;
use crate::group::{lcm, ConcreteGroup};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("node `{0}` has no factor specification")]
    MissingFactor(String),
    #[error("clique class `{0}` must carry a symbolic factor, not a concrete one")]
    ConcreteOnClass(String),
    #[error("factor of `{0}` is not declared countable; use the general theorem checks instead")]
    NotCountable(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("query set intersects the excluded finite set at `{0}`")]
    QueryIntersectsExcluded(String),
    #[error("the excluded set may contain explicit vertices only, not class `{0}`")]
    ClassInB0(String),
    #[error("no torsion bound below the cap {0} covers the required prime powers")]
    BoundExceeded(u64),
}

/// Declared shape of a factor group whose structure the engine cannot
/// compute: either an abelian shape or a non-abelian profile of flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorSpec {
    Concrete(ConcreteGroup),
    Abelian(AbelianDescriptor),
    NonAbelian(NonAbelianProfile),
}

/// What the classifier needs to know about a non-abelian factor: whether the
/// center has countable index, the shape of the center when known, and
/// whether the whole group is countable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonAbelianProfile {
    pub center_index_countable: bool,
    pub center: Option<AbelianDescriptor>,
    pub countable: bool,
}

impl FactorSpec {
    pub fn is_abelian(&self) -> bool {
        match self {
            FactorSpec::Concrete(g) => g.is_abelian(),
            FactorSpec::Abelian(_) => true,
            FactorSpec::NonAbelian(_) => false,
        }
    }

    pub fn is_countable(&self) -> bool {
        match self {
            FactorSpec::Concrete(_) => true,
            FactorSpec::Abelian(d) => d.is_countable(),
            FactorSpec::NonAbelian(p) => p.countable,
        }
    }

    /// The abelian shape of the factor itself, when it has one.
    pub fn abelian_descriptor(&self) -> Option<AbelianDescriptor> {
        match self {
            FactorSpec::Concrete(g) => AbelianDescriptor::of_concrete(g),
            FactorSpec::Abelian(d) => Some(d.clone()),
            FactorSpec::NonAbelian(_) => None,
        }
    }

    /// Whether the center has countable index.
    pub fn center_index_countable(&self) -> bool {
        match self {
            FactorSpec::Concrete(_) | FactorSpec::Abelian(_) => true,
            FactorSpec::NonAbelian(p) => p.center_index_countable,
        }
    }

    /// Shape of the center: the factor itself when abelian, the declared
    /// center otherwise. Concrete groups are countable, so their center
    /// never carries uncountable content; a trivial shape stands in for it.
    fn center_descriptor(&self) -> Option<AbelianDescriptor> {
        match self {
            FactorSpec::Concrete(g) => {
                Some(AbelianDescriptor::of_concrete(g).unwrap_or_else(AbelianDescriptor::trivial))
            }
            FactorSpec::Abelian(d) => Some(d.clone()),
            FactorSpec::NonAbelian(p) => p.center.clone(),
        }
    }
}

/// A symbolically described graph product: the graph plus one factor spec
/// per explicit vertex and per clique class.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicInstance {
    pub graph: SymbolicGraph,
    pub factors: BTreeMap<String, FactorSpec>,
}

impl SymbolicInstance {
    /// Views a fully concrete presentation as a symbolic instance with no
    /// clique classes.
    pub fn from_presentation(p: &crate::words::Presentation) -> Self {
        let graph = SymbolicGraph::new(p.graph().clone(), Vec::new())
            .expect("a plain graph is a valid symbolic graph");
        let factors = p
            .graph()
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), FactorSpec::Concrete(p.factor(i).clone())))
            .collect();
        SymbolicInstance { graph, factors }
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        for id in self.graph.node_ids() {
            match self.factors.get(&id) {
                None => return Err(ClassifyError::MissingFactor(id)),
                Some(FactorSpec::Concrete(_)) if self.graph.class(&id).is_some() => {
                    return Err(ClassifyError::ConcreteOnClass(id));
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    fn factor(&self, id: &str) -> &FactorSpec {
        &self.factors[id]
    }

    /// Number of vertices a node stands for.
    fn weight(&self, id: &str) -> SymbolicCardinal {
        match self.graph.class(id) {
            Some(c) => c.multiplicity.clone(),
            None => SymbolicCardinal::Fin(1),
        }
    }
}

/// The structural partition of the nodes, with the torsion bounds that
/// define its quotient-heavy part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionA {
    pub a0: Vec<String>,
    pub a5: Vec<String>,
    pub a6: Vec<String>,
    pub a7: Vec<String>,
    pub a8: Vec<String>,
    pub a9: Vec<String>,
    /// least bound making the quotient-heavy set finite; drives membership
    /// in `a6`
    pub n: u64,
    /// least bound m >= 2 for which only countably many factors have an
    /// element escaping the divisible part plus the m-torsion; `None` when
    /// no bound below the cap works
    pub n_phi: Option<u64>,
    pub undetermined: Vec<(String, String)>,
}

/// Admissibility outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Admits,
    AdmitsNonArchimedean,
    DoesNotAdmit,
    Undetermined(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Admits => write!(f, "admits"),
            Outcome::AdmitsNonArchimedean => write!(f, "admits-non-archimedean"),
            Outcome::DoesNotAdmit => write!(f, "does-not-admit"),
            Outcome::Undetermined(reason) => write!(f, "undetermined: {reason}"),
        }
    }
}

/// One fired rule: a stable identifier, the statement of the rule, and the
/// data that triggered it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleHit {
    pub rule: &'static str,
    pub statement: &'static str,
    pub data: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub trail: Vec<RuleHit>,
}

impl Verdict {
    fn admits(trail: Vec<RuleHit>) -> Self {
        Verdict { outcome: Outcome::Admits, trail }
    }

    fn rejects(trail: Vec<RuleHit>) -> Self {
        assert!(!trail.is_empty(), "negative verdicts carry a trail");
        Verdict { outcome: Outcome::DoesNotAdmit, trail }
    }
}

pub const RULE_NON_ADJACENT_UNCOUNTABLE: &str = "non-adjacent-uncountable-factor";
pub const RULE_UNCOUNTABLE_FREE_PRODUCT: &str = "uncountable-free-product";
pub const RULE_PRUEFER_UNCOUNTABLE: &str = "pruefer-total-uncountable";
pub const RULE_OUTSIDE_SHAPE: &str = "outside-shape";
pub const RULE_TORSION_BOUND: &str = "torsion-bound-missing";
pub const RULE_GLOBAL_SUM_BETWEEN: &str = "global-sum-strictly-between";
pub const RULE_RESTRICTED_SUM_BETWEEN: &str = "restricted-sum-strictly-between";
pub const RULE_RESTRICTED_SUM_FINITE: &str = "restricted-sum-below-aleph0";
pub const RULE_CENTER_HEAVY_INFINITE: &str = "center-heavy-set-infinite";
pub const RULE_QUOTIENT_HEAVY_INFINITE: &str = "quotient-heavy-set-infinite";
pub const RULE_NONABELIAN_UNCOUNTABLE: &str = "nonabelian-set-uncountable";
pub const RULE_UNBOUNDED_UNCOUNTABLE: &str = "unbounded-set-uncountable";
pub const RULE_BLOCK_SUM_BETWEEN: &str = "block-multiplicity-strictly-between";
pub const RULE_CH_RESTRICTION: &str = "restriction-admits-under-ch";

const STMT_NON_ADJACENT: &str =
    "a factor sitting on a vertex with a non-neighbor must be countable";
const STMT_FREE_PRODUCT: &str =
    "an uncountable group that splits as a non-trivial free product is not admissible";
const STMT_PRUEFER: &str =
    "the total multiplicity of rank-one divisible p-torsion blocks must be countable";
const STMT_OUTSIDE_SHAPE: &str =
    "outside a countable set, factors must be sums of rational and prime-power cyclic blocks";
const STMT_TORSION_BOUND: &str =
    "one shared bound must cover every prime-power block occurring outside the countable set";
const STMT_SUM_BETWEEN: &str =
    "a block's total multiplicity must be countable or the full continuum, never in between";
const STMT_SUM_FINITE: &str =
    "read literally the restricted sum should be exactly the first infinite cardinal; a finite sum passes only under the at-most-countable reading";
const STMT_CENTER_HEAVY: &str =
    "only finitely many factors may have a center of uncountable index";
const STMT_QUOTIENT_HEAVY: &str =
    "only finitely many centers may stay uncountable modulo their divisible part and torsion";
const STMT_NONABELIAN: &str = "only countably many factors may be non-abelian";
const STMT_UNBOUNDED: &str = "only countably many abelian factors may fail to be bounded-divisible";
const STMT_CH_RESTRICTION: &str =
    "with the continuum hypothesis, the restriction away from the heavy finite part admits a non-archimedean topology";

/// Default cap for torsion-bound searches.
pub const DEFAULT_BOUND_CAP: u64 = 1_000_000;

fn is_uncountable(c: &SymbolicCardinal) -> bool {
    !c.is_countable()
}

fn is_infinite(c: &SymbolicCardinal) -> bool {
    !matches!(c, SymbolicCardinal::Fin(_))
}

/// lcm with a cap; `None` when the cap is exceeded.
fn capped_lcm(values: impl IntoIterator<Item = u64>, cap: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for v in values {
        acc = lcm(acc, v);
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

fn cyc_value(p: u64, k: u32) -> u64 {
    p.checked_pow(k).unwrap_or(u64::MAX)
}

/// Computes the structural partition. Flags the engine cannot evaluate land
/// the node in `undetermined` instead of guessing.
pub fn compute_partition(
    inst: &SymbolicInstance,
    cap: u64,
) -> Result<PartitionA, ClassifyError> {
    inst.validate()?;
    let a0: BTreeSet<String> = inst.graph.non_clique_set().into_iter().collect();

    // Bound for the quotient-heavy set: every prime-power block of
    // uncountable multiplicity inside a factor carried by infinitely many
    // vertices must divide it.
    let mut required: Vec<u64> = Vec::new();
    let mut undetermined: Vec<(String, String)> = Vec::new();
    for id in inst.graph.node_ids() {
        if a0.contains(&id) || !is_infinite(&inst.weight(&id)) {
            continue;
        }
        let spec = inst.factor(&id);
        if !spec.center_index_countable() {
            continue;
        }
        match spec.center_descriptor() {
            Some(d) => {
                for (s, lam) in d.lambdas() {
                    if let SIndex::Cyc(p, k) = s {
                        if is_uncountable(lam) {
                            required.push(cyc_value(*p, *k));
                        }
                    }
                }
            }
            None => undetermined
                .push((id.clone(), "center shape unknown; cannot bound its quotient".into())),
        }
    }
    let n = capped_lcm(required, cap).ok_or(ClassifyError::BoundExceeded(cap))?.max(1);

    // Def-style bound: all prime-power blocks of factors carried by
    // uncountably many vertices must divide it, and such factors must not
    // escape every bound.
    let mut phi_required: Vec<u64> = Vec::new();
    let mut phi_unbounded = false;
    for id in inst.graph.node_ids() {
        if !is_uncountable(&inst.weight(&id)) {
            continue;
        }
        if let Some(d) = inst.factor(&id).abelian_descriptor() {
            for (s, _) in d.lambdas() {
                if let SIndex::Cyc(p, k) = s {
                    phi_required.push(cyc_value(*p, *k));
                }
            }
            if d.is_bounded_divisible() == Some(false) {
                phi_unbounded = true;
            }
        }
    }
    let n_phi = if phi_unbounded {
        None
    } else {
        capped_lcm(phi_required, cap).map(|v| v.max(2))
    };

    let mut part = PartitionA {
        a0: a0.iter().cloned().collect(),
        a5: Vec::new(),
        a6: Vec::new(),
        a7: Vec::new(),
        a8: Vec::new(),
        a9: Vec::new(),
        n,
        n_phi,
        undetermined,
    };

    for id in inst.graph.node_ids() {
        if a0.contains(&id) {
            continue;
        }
        let spec = inst.factor(&id);
        if !spec.is_abelian() && !spec.center_index_countable() {
            part.a5.push(id);
            continue;
        }
        // quotient-heavy test at the bound n
        match spec.center_descriptor() {
            Some(d) => {
                if d.quotient_mod_div_tor_uncountable(n) {
                    part.a6.push(id);
                    continue;
                }
            }
            None => {
                part.undetermined.push((
                    id.clone(),
                    "center shape unknown; quotient-heaviness undecidable".into(),
                ));
                continue;
            }
        }
        if !spec.is_abelian() {
            part.a7.push(id);
            continue;
        }
        match spec.abelian_descriptor().expect("abelian factors have shapes").is_bounded_divisible()
        {
            Some(true) => part.a9.push(id),
            Some(false) => part.a8.push(id),
            None => part.undetermined.push((
                id.clone(),
                "countable summand's bounded-divisibility undeclared".into(),
            )),
        }
    }
    Ok(part)
}

/// Structural rules the partition itself must satisfy; each violation is a
/// rejection rule hit.
pub fn partition_rules(inst: &SymbolicInstance, part: &PartitionA) -> Vec<RuleHit> {
    let mut hits = Vec::new();
    for id in &part.a0 {
        if !inst.factor(id).is_countable() {
            hits.push(RuleHit {
                rule: RULE_NON_ADJACENT_UNCOUNTABLE,
                statement: STMT_NON_ADJACENT,
                data: format!("vertex `{id}` has a non-neighbor and an uncountable factor"),
            });
        }
    }
    let infinite_total = |ids: &[String]| -> bool {
        ids.iter().any(|id| is_infinite(&inst.weight(id)))
    };
    let uncountable_total = |ids: &[String]| -> bool {
        ids.iter().any(|id| is_uncountable(&inst.weight(id)))
    };
    if infinite_total(&part.a5) {
        hits.push(RuleHit {
            rule: RULE_CENTER_HEAVY_INFINITE,
            statement: STMT_CENTER_HEAVY,
            data: format!("nodes {:?}", part.a5),
        });
    }
    if infinite_total(&part.a6) {
        hits.push(RuleHit {
            rule: RULE_QUOTIENT_HEAVY_INFINITE,
            statement: STMT_QUOTIENT_HEAVY,
            data: format!("nodes {:?} at bound {}", part.a6, part.n),
        });
    }
    if uncountable_total(&part.a7) {
        hits.push(RuleHit {
            rule: RULE_NONABELIAN_UNCOUNTABLE,
            statement: STMT_NONABELIAN,
            data: format!("nodes {:?}", part.a7),
        });
    }
    if uncountable_total(&part.a8) {
        hits.push(RuleHit {
            rule: RULE_UNBOUNDED_UNCOUNTABLE,
            statement: STMT_UNBOUNDED,
            data: format!("nodes {:?}", part.a8),
        });
    }
    // total multiplicity of divisible p-torsion blocks must stay countable
    let mut pruefer_total = CardValue::zero();
    for id in inst.graph.node_ids() {
        if let Some(d) = inst.factor(&id).abelian_descriptor() {
            for (s, lam) in d.lambdas() {
                if matches!(s, SIndex::Pruefer(_)) {
                    pruefer_total = card_add(
                        &pruefer_total,
                        &crate::cardinal::card_mul(lam, &inst.weight(&id)),
                    );
                }
            }
        }
    }
    if card_region(&pruefer_total, CardMode::NotCh) != CardRegion::LeqAleph0 {
        hits.push(RuleHit {
            rule: RULE_PRUEFER_UNCOUNTABLE,
            statement: STMT_PRUEFER,
            data: format!("total divisible p-torsion multiplicity {pruefer_total}"),
        });
    }
    hits
}

/// Whether a factor fits the shape allowed outside the countable
/// exceptional set: a pure sum of rational and prime-power cyclic blocks.
fn tame_outside_shape(spec: &FactorSpec) -> bool {
    match spec {
        FactorSpec::Abelian(d) => {
            !d.countable.is_present() && d.lambdas().all(|(s, _)| s.is_tame())
        }
        _ => false,
    }
}

/// The necessary conditions of the countable-exception theorem: outside a
/// countable witness set the graph is complete and factors are tame block
/// sums whose prime-power blocks share a bound; with an empty witness set,
/// each block's global multiplicity must avoid the middle region.
pub fn check_necessary_conditions(
    inst: &SymbolicInstance,
    mode: CardMode,
    cap: u64,
) -> Result<Verdict, ClassifyError> {
    inst.validate()?;
    let mut trail = Vec::new();
    // the explicit part is finite, so it always fits in the witness set;
    // classes are universally adjacent, so completeness outside it is
    // structural. Violating classes of countable multiplicity join the
    // witness set; uncountable ones are fatal.
    let mut witness: Vec<String> = inst.graph.explicit.vertices().to_vec();
    let mut outside: Vec<String> = Vec::new();
    for c in &inst.graph.classes {
        let spec = inst.factor(&c.id);
        if tame_outside_shape(spec) {
            outside.push(c.id.clone());
        } else if c.multiplicity.is_countable() {
            witness.push(c.id.clone());
        } else {
            let pruefer = spec
                .abelian_descriptor()
                .map(|d| d.lambdas().any(|(s, _)| matches!(s, SIndex::Pruefer(_))))
                .unwrap_or(false);
            if pruefer {
                trail.push(RuleHit {
                    rule: RULE_PRUEFER_UNCOUNTABLE,
                    statement: STMT_PRUEFER,
                    data: format!("class `{}` carries a divisible p-torsion block", c.id),
                });
            }
            trail.push(RuleHit {
                rule: RULE_OUTSIDE_SHAPE,
                statement: STMT_OUTSIDE_SHAPE,
                data: format!("class `{}` of multiplicity {}", c.id, c.multiplicity),
            });
            return Ok(Verdict::rejects(trail));
        }
    }
    // shared torsion bound over the outside factors
    let mut keys: Vec<u64> = Vec::new();
    for id in &outside {
        if let Some(d) = inst.factor(id).abelian_descriptor() {
            for (s, _) in d.lambdas() {
                if let SIndex::Cyc(p, k) = s {
                    keys.push(cyc_value(*p, *k));
                }
            }
        }
    }
    let Some(bound) = capped_lcm(keys, cap) else {
        trail.push(RuleHit {
            rule: RULE_TORSION_BOUND,
            statement: STMT_TORSION_BOUND,
            data: format!("no bound below {cap}"),
        });
        return Ok(Verdict {
            outcome: Outcome::Undetermined("torsion bound exceeds the search cap".into()),
            trail,
        });
    };
    let _ = bound;
    if witness.is_empty() {
        for hit in global_sum_rules(inst, &outside, mode, RULE_GLOBAL_SUM_BETWEEN) {
            trail.push(hit);
        }
        if trail.iter().any(|h| h.rule == RULE_GLOBAL_SUM_BETWEEN) {
            return Ok(Verdict::rejects(trail));
        }
    }
    Ok(Verdict::admits(trail))
}

/// Per-block global sums over the given nodes; returns a rule hit per block
/// whose total lands strictly between countable and continuum.
fn global_sum_rules(
    inst: &SymbolicInstance,
    nodes: &[String],
    mode: CardMode,
    rule: &'static str,
) -> Vec<RuleHit> {
    let mut hits = Vec::new();
    for (s, total) in block_sums(inst, nodes) {
        if card_region(&total, mode) == CardRegion::StrictlyBetween {
            hits.push(RuleHit {
                rule,
                statement: STMT_SUM_BETWEEN,
                data: format!("block {s}: total {total}"),
            });
        }
    }
    hits
}

/// Sum of each tame block's multiplicity over the given nodes, weighted by
/// node multiplicity.
fn block_sums(inst: &SymbolicInstance, nodes: &[String]) -> BTreeMap<SIndex, CardValue> {
    let mut sums: BTreeMap<SIndex, CardValue> = BTreeMap::new();
    for id in nodes {
        if let Some(d) = inst.factor(id).abelian_descriptor() {
            let w = inst.weight(id);
            for (s, lam) in d.lambdas() {
                if !s.is_tame() {
                    continue;
                }
                let term = crate::cardinal::card_mul(lam, &w);
                let entry = sums.entry(*s).or_insert_with(CardValue::zero);
                *entry = card_add(entry, &term);
            }
        }
    }
    sums
}

/// Full equivalence for instances whose factors are all countable: the
/// graph is complete outside a countable set, outside factors are tame
/// block sums with a shared bound, and each block's global sum over the
/// remaining vertices is countable or the continuum. Polish and
/// non-archimedean admissibility coincide here.
pub fn classify_countable_factors(
    inst: &SymbolicInstance,
    mode: CardMode,
    cap: u64,
) -> Result<Verdict, ClassifyError> {
    inst.validate()?;
    for id in inst.graph.node_ids() {
        if !inst.factor(&id).is_countable() {
            return Err(ClassifyError::NotCountable(id));
        }
    }
    let base = check_necessary_conditions(inst, mode, cap)?;
    if base.outcome != Outcome::Admits {
        return Ok(base);
    }
    let mut trail = base.trail;
    // the witness set absorbs the whole explicit part and every countable
    // class, so only uncountable classes contribute to the remaining sums
    let outside: Vec<String> = inst
        .graph
        .classes
        .iter()
        .filter(|c| !c.multiplicity.is_countable())
        .map(|c| c.id.clone())
        .collect();
    let bad = global_sum_rules(inst, &outside, mode, RULE_GLOBAL_SUM_BETWEEN);
    if bad.is_empty() {
        Ok(Verdict::admits(trail))
    } else {
        trail.extend(bad);
        Ok(Verdict::rejects(trail))
    }
}

/// Admissibility of an abelian group given as a shape: divisible p-torsion
/// blocks must have countable total multiplicity, and every tame block's
/// multiplicity must avoid the middle region.
pub fn classify_abelian_sum(d: &AbelianDescriptor, mode: CardMode) -> Verdict {
    let mut trail = Vec::new();
    for (s, lam) in d.lambdas() {
        let region = card_region(&lam.clone().into(), mode);
        match s {
            SIndex::Pruefer(_) => {
                if region != CardRegion::LeqAleph0 {
                    trail.push(RuleHit {
                        rule: RULE_PRUEFER_UNCOUNTABLE,
                        statement: STMT_PRUEFER,
                        data: format!("block {s}: multiplicity {lam}"),
                    });
                }
            }
            SIndex::Inf | SIndex::Cyc(..) => {
                if region == CardRegion::StrictlyBetween {
                    trail.push(RuleHit {
                        rule: RULE_BLOCK_SUM_BETWEEN,
                        statement: STMT_SUM_BETWEEN,
                        data: format!("block {s}: multiplicity {lam}"),
                    });
                }
            }
        }
    }
    if trail.is_empty() {
        Verdict::admits(Vec::new())
    } else {
        Verdict::rejects(trail)
    }
}

/// Restricted admissibility: partitions the instance without the excluded
/// vertices, forms the finite heavy set, and judges a queried subset (or,
/// with no query, the whole light part) by its per-block sums.
pub fn check_restricted_admissibility(
    inst: &SymbolicInstance,
    b0: &[String],
    query: Option<&[String]>,
    mode: CardMode,
    cap: u64,
) -> Result<Verdict, ClassifyError> {
    inst.validate()?;
    for id in b0 {
        if inst.graph.class(id).is_some() {
            return Err(ClassifyError::ClassInB0(id.clone()));
        }
        if inst.graph.explicit.vertex_index(id).is_none() {
            return Err(ClassifyError::UnknownNode(id.clone()));
        }
    }
    let reduced = restrict_instance(inst, b0)?;
    let part = compute_partition(&reduced, cap)?;
    let mut excluded: BTreeSet<String> = b0.iter().cloned().collect();
    excluded.extend(part.a5.iter().cloned());
    excluded.extend(part.a6.iter().cloned());
    let nodes: Vec<String> = match query {
        Some(q) => {
            for id in q {
                if excluded.contains(id) {
                    return Err(ClassifyError::QueryIntersectsExcluded(id.clone()));
                }
                if !reduced.factors.contains_key(id) {
                    return Err(ClassifyError::UnknownNode(id.clone()));
                }
            }
            q.to_vec()
        }
        None => {
            let mut light: Vec<String> = Vec::new();
            light.extend(part.a7.iter().cloned());
            light.extend(part.a8.iter().cloned());
            light.extend(part.a9.iter().cloned());
            light
        }
    };
    // the restricted equivalence presupposes the structural conditions on
    // the ambient instance; any violated necessary condition rejects here
    // too, keeping the checks monotone
    let mut trail = partition_rules(&reduced, &part);
    let base = check_necessary_conditions(&reduced, mode, cap)?;
    if base.outcome == Outcome::DoesNotAdmit {
        trail.extend(base.trail);
    }
    if !trail.is_empty() {
        return Ok(Verdict::rejects(trail));
    }
    let mut rejected = false;
    for (s, total) in block_sums(&reduced, &nodes) {
        match card_region(&total, mode) {
            CardRegion::StrictlyBetween => {
                rejected = true;
                trail.push(RuleHit {
                    rule: RULE_RESTRICTED_SUM_BETWEEN,
                    statement: STMT_SUM_BETWEEN,
                    data: format!("block {s}: restricted sum {total}"),
                });
            }
            CardRegion::LeqAleph0 => {
                if !matches!(total, CardValue::Card(SymbolicCardinal::Aleph0)) {
                    trail.push(RuleHit {
                        rule: RULE_RESTRICTED_SUM_FINITE,
                        statement: STMT_SUM_FINITE,
                        data: format!("block {s}: restricted sum {total}"),
                    });
                }
            }
            CardRegion::Continuum => {}
        }
    }
    if rejected {
        Ok(Verdict::rejects(trail))
    } else {
        Ok(Verdict::admits(trail))
    }
}

fn restrict_instance(
    inst: &SymbolicInstance,
    drop: &[String],
) -> Result<SymbolicInstance, ClassifyError> {
    let dropset: BTreeSet<&str> = drop.iter().map(|s| s.as_str()).collect();
    let keep: Vec<&str> = inst
        .graph
        .explicit
        .vertices()
        .iter()
        .map(|s| s.as_str())
        .filter(|v| !dropset.contains(v))
        .collect();
    let explicit = inst
        .graph
        .explicit
        .induced_subgraph(keep.iter().copied())
        .expect("kept vertices exist");
    let graph = SymbolicGraph::new(explicit, inst.graph.classes.clone())
        .expect("restriction preserves class ids");
    let factors = inst
        .factors
        .iter()
        .filter(|(id, _)| !dropset.contains(id.as_str()))
        .map(|(id, f)| (id.clone(), f.clone()))
        .collect();
    Ok(SymbolicInstance { graph, factors })
}

/// Free-product obstruction: with no clique classes, a disconnected explicit
/// part splits the group as a non-trivial free product, which an uncountable
/// factor makes inadmissible.
pub fn free_product_guard(inst: &SymbolicInstance) -> Result<Verdict, ClassifyError> {
    inst.validate()?;
    if !inst.graph.classes.is_empty() || !inst.graph.explicit.is_disconnected() {
        return Ok(Verdict::admits(Vec::new()));
    }
    let mut trail = Vec::new();
    for id in inst.graph.explicit.vertices() {
        if !inst.factor(id).is_countable() {
            trail.push(RuleHit {
                rule: RULE_NON_ADJACENT_UNCOUNTABLE,
                statement: STMT_NON_ADJACENT,
                data: format!("vertex `{id}` is uncountable across the split"),
            });
        }
    }
    if trail.is_empty() {
        Ok(Verdict::admits(Vec::new()))
    } else {
        trail.push(RuleHit {
            rule: RULE_UNCOUNTABLE_FREE_PRODUCT,
            statement: STMT_FREE_PRODUCT,
            data: "the explicit graph is disconnected".into(),
        });
        Ok(Verdict::rejects(trail))
    }
}

/// Full report of the orchestrated pipeline.
#[derive(Debug, Clone)]
pub struct FullReport {
    pub partition: PartitionA,
    pub verdict: Verdict,
    /// per-block sums over the light part, for the report
    pub sums: Vec<(SIndex, CardValue)>,
}

/// Runs the guard, the partition rules and the necessary conditions in
/// order, then settles the outcome: the full equivalence when every factor
/// is countable, the restriction conclusion under the continuum hypothesis,
/// and an explicit undetermined outcome otherwise.
pub fn classify_instance(
    inst: &SymbolicInstance,
    mode: CardMode,
    cap: u64,
) -> Result<FullReport, ClassifyError> {
    let partition = compute_partition(inst, cap)?;
    let light: Vec<String> = partition
        .a7
        .iter()
        .chain(&partition.a8)
        .chain(&partition.a9)
        .cloned()
        .collect();
    let sums: Vec<(SIndex, CardValue)> = block_sums(inst, &light).into_iter().collect();

    let guard = free_product_guard(inst)?;
    if guard.outcome == Outcome::DoesNotAdmit {
        return Ok(FullReport { partition, verdict: guard, sums });
    }
    let mut trail = partition_rules(inst, &partition);
    if !trail.is_empty() {
        return Ok(FullReport { partition, verdict: Verdict::rejects(trail), sums });
    }
    let base = check_necessary_conditions(inst, mode, cap)?;
    if base.outcome == Outcome::DoesNotAdmit {
        return Ok(FullReport { partition, verdict: base, sums });
    }
    trail = base.trail;
    let all_countable = inst.graph.node_ids().iter().all(|id| inst.factor(id).is_countable());
    if all_countable {
        let verdict = classify_countable_factors(inst, mode, cap)?;
        return Ok(FullReport { partition, verdict, sums });
    }
    if !partition.undetermined.is_empty() {
        let (node, why) = partition.undetermined[0].clone();
        return Ok(FullReport {
            partition,
            verdict: Verdict {
                outcome: Outcome::Undetermined(format!("node `{node}`: {why}")),
                trail,
            },
            sums,
        });
    }
    if mode == CardMode::Ch {
        trail.push(RuleHit {
            rule: RULE_CH_RESTRICTION,
            statement: STMT_CH_RESTRICTION,
            data: format!(
                "restriction to {:?} plus the plain part",
                [&partition.a7, &partition.a8, &partition.a9].map(|v| v.len())
            ),
        });
        return Ok(FullReport {
            partition,
            verdict: Verdict { outcome: Outcome::AdmitsNonArchimedean, trail },
            sums,
        });
    }
    Ok(FullReport {
        partition,
        verdict: Verdict {
            outcome: Outcome::Undetermined(
                "necessary conditions hold; uncountable factors leave admissibility open".into(),
            ),
            trail,
        },
        sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cardinal::SymbolicCardinal::*;
    use crate::descriptor::CountableDecl;
    use crate::graph::{CliqueClass, Graph};

    const CAP: u64 = DEFAULT_BOUND_CAP;

    fn mid(name: &str) -> SymbolicCardinal {
        SymbolicCardinal::mid(name)
    }

    fn z2_block(mult: SymbolicCardinal) -> AbelianDescriptor {
        AbelianDescriptor::trivial().with_summand(SIndex::cyc(2, 1).unwrap(), mult)
    }

    /// One uncountable-center-index vertex plus an uncountable clique class
    /// of identical tame factors with multiplicity strictly between the
    /// countable and the continuum.
    fn heavy_vertex_plus_tame_class() -> SymbolicInstance {
        let explicit = Graph::new(["0".to_string()], []).unwrap();
        let graph = SymbolicGraph::new(
            explicit,
            vec![CliqueClass { id: "alpha".into(), multiplicity: mid("omega1") }],
        )
        .unwrap();
        let mut factors = BTreeMap::new();
        factors.insert(
            "0".to_string(),
            FactorSpec::NonAbelian(NonAbelianProfile {
                center_index_countable: false,
                center: None,
                countable: false,
            }),
        );
        factors.insert("alpha".to_string(), FactorSpec::Abelian(z2_block(mid("lambda"))));
        SymbolicInstance { graph, factors }
    }

    #[test]
    fn heavy_instance_partition() {
        let inst = heavy_vertex_plus_tame_class();
        let part = compute_partition(&inst, CAP).unwrap();
        assert_eq!(part.a5, vec!["0".to_string()]);
        assert_eq!(part.a9, vec!["alpha".to_string()]);
        assert!(part.a0.is_empty());
        assert!(part.a6.is_empty());
        assert!(part.a7.is_empty());
        assert!(part.a8.is_empty());
        assert!(part.undetermined.is_empty());
        assert_eq!(part.n, 2);
        assert_eq!(part.n_phi, Some(2));
        assert!(partition_rules(&inst, &part).is_empty());
    }

    #[test]
    fn heavy_instance_light_sum_is_the_middle_atom() {
        let inst = heavy_vertex_plus_tame_class();
        let report = classify_instance(&inst, CardMode::NotCh, CAP).unwrap();
        let (s, total) = &report.sums[0];
        assert_eq!(*s, SIndex::Cyc(2, 1));
        assert_eq!(*total, CardValue::Card(mid("lambda")));
        assert!(matches!(report.verdict.outcome, Outcome::Undetermined(_)));
    }

    #[test]
    fn heavy_instance_restriction_is_rejected_without_ch() {
        let inst = heavy_vertex_plus_tame_class();
        let v = check_restricted_admissibility(
            &inst,
            &[],
            Some(&["alpha".to_string()]),
            CardMode::NotCh,
            CAP,
        )
        .unwrap();
        assert_eq!(v.outcome, Outcome::DoesNotAdmit);
        assert!(v.trail.iter().any(|h| h.rule == RULE_RESTRICTED_SUM_BETWEEN));
    }

    #[test]
    fn heavy_instance_restriction_passes_under_ch() {
        let inst = heavy_vertex_plus_tame_class();
        let v = check_restricted_admissibility(
            &inst,
            &[],
            Some(&["alpha".to_string()]),
            CardMode::Ch,
            CAP,
        )
        .unwrap();
        assert_eq!(v.outcome, Outcome::Admits);
    }

    #[test]
    fn querying_the_excluded_vertex_errors() {
        let inst = heavy_vertex_plus_tame_class();
        let err =
            check_restricted_admissibility(&inst, &[], Some(&["0".to_string()]), CardMode::NotCh, CAP);
        assert_eq!(err, Err(ClassifyError::QueryIntersectsExcluded("0".into())));
    }

    #[test]
    fn empty_query_admits_vacuously() {
        let inst = heavy_vertex_plus_tame_class();
        let v = check_restricted_admissibility(&inst, &[], Some(&[]), CardMode::NotCh, CAP).unwrap();
        assert_eq!(v.outcome, Outcome::Admits);
    }

    #[test]
    fn middle_block_alone_is_rejected_but_absorbed_by_continuum() {
        // a block of multiplicity strictly between admits nothing on its own,
        // while adding a continuum block of the same kind absorbs it
        let alone = z2_block(mid("lambda"));
        let v = classify_abelian_sum(&alone, CardMode::NotCh);
        assert_eq!(v.outcome, Outcome::DoesNotAdmit);
        assert!(v.trail.iter().any(|h| h.rule == RULE_BLOCK_SUM_BETWEEN));

        let absorbed = z2_block(mid("lambda")).with_summand(SIndex::cyc(2, 1).unwrap(), Continuum);
        let v = classify_abelian_sum(&absorbed, CardMode::NotCh);
        assert_eq!(v.outcome, Outcome::Admits);
    }

    #[test]
    fn complementary_middle_blocks_admit_together_but_not_apart() {
        let s1 = SIndex::cyc(2, 1).unwrap();
        let s2 = SIndex::Inf;
        let h1 = AbelianDescriptor::trivial()
            .with_summand(s1, Continuum)
            .with_summand(s2, mid("lambda"));
        let h2 = AbelianDescriptor::trivial()
            .with_summand(s1, mid("lambda"))
            .with_summand(s2, Continuum);
        let mut both = h1.clone();
        for (s, lam) in h2.lambdas() {
            both.add_summand(*s, lam.clone());
        }
        assert_eq!(classify_abelian_sum(&both, CardMode::NotCh).outcome, Outcome::Admits);
        assert_eq!(classify_abelian_sum(&h1, CardMode::NotCh).outcome, Outcome::DoesNotAdmit);
        assert_eq!(classify_abelian_sum(&h2, CardMode::NotCh).outcome, Outcome::DoesNotAdmit);
    }

    #[test]
    fn bounded_shape_with_countable_summand_admits() {
        let d = AbelianDescriptor::trivial()
            .with_countable(CountableDecl::bounded(4))
            .with_summand(SIndex::Inf, Continuum)
            .with_summand(SIndex::cyc(2, 2).unwrap(), Aleph0);
        assert_eq!(classify_abelian_sum(&d, CardMode::NotCh).outcome, Outcome::Admits);
    }

    #[test]
    fn uncountable_pruefer_block_is_rejected() {
        let d = AbelianDescriptor::trivial()
            .with_summand(SIndex::pruefer(3).unwrap(), Continuum);
        let v = classify_abelian_sum(&d, CardMode::NotCh);
        assert_eq!(v.outcome, Outcome::DoesNotAdmit);
        assert!(v.trail.iter().any(|h| h.rule == RULE_PRUEFER_UNCOUNTABLE));
    }

    fn single_class_instance(mult: SymbolicCardinal, factor: FactorSpec) -> SymbolicInstance {
        let graph = SymbolicGraph::new(
            Graph::empty(),
            vec![CliqueClass { id: "k".into(), multiplicity: mult }],
        )
        .unwrap();
        let mut factors = BTreeMap::new();
        factors.insert("k".to_string(), factor);
        SymbolicInstance { graph, factors }
    }

    #[test]
    fn countable_factors_continuum_class_admits() {
        let inst =
            single_class_instance(Continuum, FactorSpec::Abelian(z2_block(Fin(1))));
        let v = classify_countable_factors(&inst, CardMode::NotCh, CAP).unwrap();
        assert_eq!(v.outcome, Outcome::Admits);
    }

    #[test]
    fn countable_factors_middle_class_rejected_without_ch_only() {
        let inst =
            single_class_instance(mid("omega1"), FactorSpec::Abelian(z2_block(Fin(1))));
        let v = classify_countable_factors(&inst, CardMode::NotCh, CAP).unwrap();
        assert_eq!(v.outcome, Outcome::DoesNotAdmit);
        assert!(v.trail.iter().any(|h| h.rule == RULE_GLOBAL_SUM_BETWEEN));
        let v = classify_countable_factors(&inst, CardMode::Ch, CAP).unwrap();
        assert_eq!(v.outcome, Outcome::Admits);
    }

    #[test]
    fn countable_path_instance_admits() {
        let explicit = Graph::new(
            ["a", "b", "c"].map(String::from),
            [("a".to_string(), "b".to_string()), ("b".to_string(), "c".to_string())],
        )
        .unwrap();
        let graph = SymbolicGraph::new(explicit, Vec::new()).unwrap();
        let mut factors = BTreeMap::new();
        for v in ["a", "b", "c"] {
            factors.insert(v.to_string(), FactorSpec::Concrete(ConcreteGroup::IntCyclic));
        }
        let inst = SymbolicInstance { graph, factors };
        let v = classify_countable_factors(&inst, CardMode::NotCh, CAP).unwrap();
        assert_eq!(v.outcome, Outcome::Admits);
        let part = compute_partition(&inst, CAP).unwrap();
        assert_eq!(part.a0, vec!["a".to_string(), "c".to_string()]);
        assert_eq!(part.a8, vec!["b".to_string()]);
    }

    #[test]
    fn countable_classifier_rejects_undeclared_uncountable_factors() {
        let inst = heavy_vertex_plus_tame_class();
        assert_eq!(
            classify_countable_factors(&inst, CardMode::NotCh, CAP),
            Err(ClassifyError::NotCountable("0".into()))
        );
    }

    #[test]
    fn outside_shape_violation_on_uncountable_class() {
        let d = AbelianDescriptor::trivial()
            .with_summand(SIndex::pruefer(2).unwrap(), Continuum);
        let inst = single_class_instance(Continuum, FactorSpec::Abelian(d));
        let v = check_necessary_conditions(&inst, CardMode::NotCh, CAP).unwrap();
        assert_eq!(v.outcome, Outcome::DoesNotAdmit);
        let rules: Vec<&str> = v.trail.iter().map(|h| h.rule).collect();
        assert!(rules.contains(&RULE_PRUEFER_UNCOUNTABLE));
        assert!(rules.contains(&RULE_OUTSIDE_SHAPE));
    }

    #[test]
    fn rational_continuum_classes_pass_the_necessary_conditions() {
        let d = AbelianDescriptor::trivial().with_summand(SIndex::Inf, Continuum);
        let inst = single_class_instance(Continuum, FactorSpec::Abelian(d));
        let v = check_necessary_conditions(&inst, CardMode::NotCh, CAP).unwrap();
        assert_eq!(v.outcome, Outcome::Admits);
    }

    #[test]
    fn empty_witness_set_checks_global_sums() {
        let inst =
            single_class_instance(mid("omega1"), FactorSpec::Abelian(z2_block(Fin(1))));
        let v = check_necessary_conditions(&inst, CardMode::NotCh, CAP).unwrap();
        assert_eq!(v.outcome, Outcome::DoesNotAdmit);
        assert!(v.trail.iter().any(|h| h.rule == RULE_GLOBAL_SUM_BETWEEN));
    }

    fn edgeless_pair(first_countable: bool) -> SymbolicInstance {
        let explicit = Graph::new(["a".to_string(), "b".to_string()], []).unwrap();
        let graph = SymbolicGraph::new(explicit, Vec::new()).unwrap();
        let mut factors = BTreeMap::new();
        let uncountable = FactorSpec::Abelian(
            AbelianDescriptor::trivial().with_summand(SIndex::Inf, Continuum),
        );
        let countable = FactorSpec::Concrete(ConcreteGroup::mod_cyclic(2).unwrap());
        factors.insert(
            "a".to_string(),
            if first_countable { countable.clone() } else { uncountable.clone() },
        );
        factors.insert("b".to_string(), countable);
        SymbolicInstance { graph, factors }
    }

    #[test]
    fn free_product_with_uncountable_side_is_rejected() {
        let inst = edgeless_pair(false);
        let v = free_product_guard(&inst).unwrap();
        assert_eq!(v.outcome, Outcome::DoesNotAdmit);
        let rules: Vec<&str> = v.trail.iter().map(|h| h.rule).collect();
        assert!(rules.contains(&RULE_NON_ADJACENT_UNCOUNTABLE));
        assert!(rules.contains(&RULE_UNCOUNTABLE_FREE_PRODUCT));
        // the same obstruction shows up as a partition rule
        let part = compute_partition(&inst, CAP).unwrap();
        let hits = partition_rules(&inst, &part);
        assert!(hits.iter().any(|h| h.rule == RULE_NON_ADJACENT_UNCOUNTABLE));
    }

    #[test]
    fn countable_free_product_is_not_blocked() {
        let inst = edgeless_pair(true);
        let v = free_product_guard(&inst).unwrap();
        assert_eq!(v.outcome, Outcome::Admits);
    }

    #[test]
    fn class_with_concrete_factor_is_an_input_error() {
        let inst = single_class_instance(
            Continuum,
            FactorSpec::Concrete(ConcreteGroup::mod_cyclic(2).unwrap()),
        );
        assert_eq!(
            compute_partition(&inst, CAP),
            Err(ClassifyError::ConcreteOnClass("k".into()))
        );
    }

    #[test]
    fn infinite_heavy_class_is_pre_rejected() {
        // an uncountable class of factors with uncountable center index
        let inst = single_class_instance(
            Continuum,
            FactorSpec::NonAbelian(NonAbelianProfile {
                center_index_countable: false,
                center: None,
                countable: false,
            }),
        );
        let part = compute_partition(&inst, CAP).unwrap();
        let hits = partition_rules(&inst, &part);
        assert!(hits.iter().any(|h| h.rule == RULE_CENTER_HEAVY_INFINITE));
        let v = check_restricted_admissibility(&inst, &[], None, CardMode::NotCh, CAP).unwrap();
        assert_eq!(v.outcome, Outcome::DoesNotAdmit);
    }

    #[test]
    fn restricted_check_is_monotone_over_the_necessary_conditions() {
        // an uncountable class with a divisible p-torsion block fails the
        // necessary conditions, so the restricted check rejects as well
        let d = AbelianDescriptor::trivial()
            .with_summand(SIndex::pruefer(2).unwrap(), Continuum);
        let inst = single_class_instance(Continuum, FactorSpec::Abelian(d));
        let base = check_necessary_conditions(&inst, CardMode::NotCh, CAP).unwrap();
        assert_eq!(base.outcome, Outcome::DoesNotAdmit);
        let restricted =
            check_restricted_admissibility(&inst, &[], Some(&[]), CardMode::NotCh, CAP).unwrap();
        assert_eq!(restricted.outcome, Outcome::DoesNotAdmit);
    }

    #[test]
    fn excluded_vertices_shrink_the_heavy_set() {
        let inst = heavy_vertex_plus_tame_class();
        // dropping the heavy vertex up front leaves the same restricted sums
        let v = check_restricted_admissibility(
            &inst,
            &["0".to_string()],
            Some(&["alpha".to_string()]),
            CardMode::NotCh,
            CAP,
        )
        .unwrap();
        assert_eq!(v.outcome, Outcome::DoesNotAdmit);
        // with the heavy vertex gone the empty witness set applies and the
        // middle-region sum already violates the global conditions
        assert!(v
            .trail
            .iter()
            .any(|h| h.rule == RULE_GLOBAL_SUM_BETWEEN || h.rule == RULE_RESTRICTED_SUM_BETWEEN));
        // the dropped vertex can no longer be queried
        let err = check_restricted_admissibility(
            &inst,
            &["0".to_string()],
            Some(&["0".to_string()]),
            CardMode::NotCh,
            CAP,
        );
        assert!(err.is_err());
    }

    #[test]
    fn verdicts_are_deterministic_under_renaming_order() {
        let inst1 = heavy_vertex_plus_tame_class();
        let inst2 = heavy_vertex_plus_tame_class();
        let r1 = classify_instance(&inst1, CardMode::NotCh, CAP).unwrap();
        let r2 = classify_instance(&inst2, CardMode::NotCh, CAP).unwrap();
        assert_eq!(r1.partition, r2.partition);
        assert_eq!(r1.verdict, r2.verdict);
    }
}
