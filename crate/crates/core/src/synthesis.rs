//! Synthesized plans: anchor tuples, gap-filling walks, connectors and tuned
//! constants for the distributed strategies.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::classify::{Classification, Strategy};
use crate::debruijn::{DeBruijnGraph, NodeId, Subgraph, SubgraphKind, WalkTable};
use crate::params::{threshold_view, ProblemParameters};
use crate::problem::{Aggregation, CostValue, ModelError, Objective, OptLcl};
use crate::scalar::{parse_rational, Scalar};

/// Largest walk-table horizon tried while sizing segment bounds.
pub const MAX_HORIZON: usize = 1 << 13;

/// Per-segment probability that a randomized segment exceeds `b_max`.
pub const LONG_SEGMENT_PROB: f64 = 1e-6;

/// Largest marking probability denominator considered by the tuner.
pub const MAX_MARK_PROB_INV: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("class {0} has no strategy to synthesize")]
    NoStrategy(String),
    #[error("no constants needed for strategy {0}")]
    NoConstants(Strategy),
    #[error("infeasible plan: {0}")]
    Infeasible(String),
    #[error("gap length {g} outside [{lo}, {hi}]")]
    OutOfRange { g: usize, lo: usize, hi: usize },
    #[error("plan text line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl From<ModelError> for SynthesisError {
    fn from(e: ModelError) -> Self {
        SynthesisError::Parse { line: 0, message: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanConstants {
    pub a_min: usize,
    pub b_max: usize,
    /// Marks are drawn with probability `1 / mark_prob_inv`.
    pub mark_prob_inv: u64,
    pub long_cut: usize,
    pub n0: usize,
    /// Ruling-set levels of the deterministic boundary selection.
    pub levels: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisPlan<S> {
    pub strategy: Strategy,
    pub alpha: S,
    /// Per-node cost target: `alpha*beta_opt` (min) or `beta_opt/alpha` (max).
    pub budget: Option<S>,
    /// Tuples are stored as label ids.
    pub anchor: Option<Vec<usize>>,
    pub loop_node: Option<Vec<usize>>,
    /// `(anchor -> loop, loop -> anchor)` label strings.
    pub connectors: Option<(Vec<usize>, Vec<usize>)>,
    pub gap_walks: BTreeMap<usize, Vec<usize>>,
    pub constants: Option<PlanConstants>,
}

impl<S: Scalar> SynthesisPlan<S> {
    fn empty(strategy: Strategy, alpha: S, budget: Option<S>) -> Self {
        SynthesisPlan {
            strategy,
            alpha,
            budget,
            anchor: None,
            loop_node: None,
            connectors: None,
            gap_walks: BTreeMap::new(),
            constants: None,
        }
    }

    pub fn gap_walk(&self, g: usize) -> Result<&[usize], SynthesisError> {
        let range = || {
            let lo = self.gap_walks.keys().next().copied().unwrap_or(0);
            let hi = self.gap_walks.keys().next_back().copied().unwrap_or(0);
            SynthesisError::OutOfRange { g, lo, hi }
        };
        self.gap_walks.get(&g).map(Vec::as_slice).ok_or_else(range)
    }

    pub fn loop_label(&self) -> Option<usize> {
        self.loop_node.as_ref().map(|t| t[0])
    }

    /// Aggregate cost of `anchor + walk` read cyclically, i.e. of the closed walk itself.
    pub fn walk_cost(&self, p: &OptLcl<S>, labels: &[usize]) -> CostValue<S> {
        crate::verify::solution_value(p, labels).unwrap_or(CostValue::Bot)
    }

    /// Human-readable plan summary.
    pub fn report(&self, p: &OptLcl<S>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "strategy = {}", self.strategy);
        let _ = writeln!(out, "alpha = {}", self.alpha);
        if let Some(b) = &self.budget {
            let _ = writeln!(out, "budget = {b}");
        }
        if let Some(a) = &self.anchor {
            let _ = writeln!(out, "anchor = {}", p.format_labels(a));
        }
        if let Some(l) = &self.loop_node {
            let _ = writeln!(out, "loop = {}", p.format_labels(l));
        }
        if let Some((to_loop, to_anchor)) = &self.connectors {
            let _ = writeln!(out, "connector_lengths = {} {}", to_loop.len(), to_anchor.len());
        }
        if let Some(c) = &self.constants {
            let _ = writeln!(out, "a_min = {}\nb_max = {}", c.a_min, c.b_max);
            let _ = writeln!(out, "mark_prob_inv = {}\nlong_cut = {}", c.mark_prob_inv, c.long_cut);
            let _ = writeln!(out, "levels = {}\nn0 = {}", c.levels, c.n0);
        }
        if !self.gap_walks.is_empty() {
            let _ = writeln!(out, "gap_walks = {}", self.gap_walks.len());
            if let Some(worst) = self.worst_gap_rate(p) {
                let _ = writeln!(out, "worst_gap_rate = {worst}");
            }
        }
        out
    }

    /// Worst per-node cost over the stored gap walks (sum problems: cost/g;
    /// min/max problems: the aggregate).
    pub fn worst_gap_rate(&self, p: &OptLcl<S>) -> Option<S> {
        let objective = p.objective();
        let rates = self.gap_walks.iter().map(|(&g, w)| {
            let cost = self.walk_cost(p, w).into_option()?;
            Some(match p.aggregation() {
                Aggregation::Sum => cost / S::from_count(g),
                _ => cost,
            })
        });
        let mut worst: Option<S> = None;
        for r in rates {
            let r = r?;
            // The worst rate is the least favourable one.
            worst = Some(match worst {
                None => r,
                Some(w) if objective.better(&w, &r) => r,
                Some(w) => w,
            });
        }
        worst
    }

    /// Replayable text block.
    pub fn to_text(&self, p: &OptLcl<S>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "strategy = {}", self.strategy);
        let _ = writeln!(out, "alpha = {}", self.alpha);
        if let Some(b) = &self.budget {
            let _ = writeln!(out, "budget = {b}");
        }
        let words = |ids: &[usize]| ids.iter().map(|&i| p.label(i)).collect::<Vec<_>>().join(" ");
        if let Some(a) = &self.anchor {
            let _ = writeln!(out, "anchor = {}", words(a));
        }
        if let Some(l) = &self.loop_node {
            let _ = writeln!(out, "loop = {}", words(l));
        }
        if let Some((to_loop, to_anchor)) = &self.connectors {
            let _ = writeln!(out, "connector.out = {}", words(to_loop));
            let _ = writeln!(out, "connector.in = {}", words(to_anchor));
        }
        if let Some(c) = &self.constants {
            let _ = writeln!(out, "a_min = {}", c.a_min);
            let _ = writeln!(out, "b_max = {}", c.b_max);
            let _ = writeln!(out, "mark_prob_inv = {}", c.mark_prob_inv);
            let _ = writeln!(out, "long_cut = {}", c.long_cut);
            let _ = writeln!(out, "n0 = {}", c.n0);
            let _ = writeln!(out, "levels = {}", c.levels);
        }
        for (g, w) in &self.gap_walks {
            let _ = writeln!(out, "gap {g} = {}", words(w));
        }
        out
    }

    pub fn from_text(p: &OptLcl<S>, text: &str) -> Result<Self, SynthesisError> {
        let mut alpha: Option<S> = None;
        let mut strategy: Option<Strategy> = None;
        let mut consts: BTreeMap<String, (usize, u64)> = BTreeMap::new();
        let mut out_conn: Option<Vec<usize>> = None;
        let mut in_conn: Option<Vec<usize>> = None;
        let mut budget = None;
        let mut anchor = None;
        let mut loop_node = None;
        let mut gaps = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| SynthesisError::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let labels = |v: &str| -> Result<Vec<usize>, SynthesisError> {
                v.split_whitespace()
                    .map(|l| p.label_id(l).ok_or_else(|| err(format!("unknown label `{l}`"))))
                    .collect()
            };
            let rational = |v: &str| parse_rational::<S>(v).map_err(|e| err(e.to_string()));
            match key {
                "strategy" => {
                    strategy = Some(Strategy::from_key(value).ok_or_else(|| err(format!("unknown strategy `{value}`")))?)
                }
                "alpha" => alpha = Some(rational(value)?),
                "budget" => budget = Some(rational(value)?),
                "anchor" => anchor = Some(labels(value)?),
                "loop" => loop_node = Some(labels(value)?),
                "connector.out" => out_conn = Some(labels(value)?),
                "connector.in" => in_conn = Some(labels(value)?),
                "a_min" | "b_max" | "long_cut" | "n0" | "levels" | "mark_prob_inv" => {
                    let v: u64 = value.parse().map_err(|_| err(format!("bad integer `{value}`")))?;
                    consts.insert(key.to_string(), (v as usize, v));
                }
                _ => {
                    let g = key
                        .strip_prefix("gap ")
                        .and_then(|g| g.trim().parse::<usize>().ok())
                        .ok_or_else(|| err(format!("unknown key `{key}`")))?;
                    let w = labels(value)?;
                    if w.len() != g {
                        return Err(err(format!("gap walk of length {} stored under {g}", w.len())));
                    }
                    gaps.insert(g, w);
                }
            }
        }
        let missing = |k: &str| SynthesisError::Parse { line: 0, message: format!("missing `{k}`") };
        let strategy = strategy.ok_or_else(|| missing("strategy"))?;
        let alpha = alpha.ok_or_else(|| missing("alpha"))?;
        let mut result = SynthesisPlan::empty(strategy, alpha, budget);
        result.anchor = anchor;
        result.loop_node = loop_node;
        result.gap_walks = gaps;
        result.connectors = match (out_conn, in_conn) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => return Err(missing("connector.out / connector.in")),
        };
        if !consts.is_empty() {
            let get = |k: &str| consts.get(k).copied().ok_or_else(|| missing(k));
            result.constants = Some(PlanConstants {
                a_min: get("a_min")?.0,
                b_max: get("b_max")?.0,
                mark_prob_inv: get("mark_prob_inv")?.1,
                long_cut: get("long_cut")?.0,
                n0: get("n0")?.0,
                levels: get("levels")?.0 as u32,
            });
        }
        Ok(result)
    }
}

/// Per-node target of an alpha-approximation.
pub fn budget<S: Scalar>(objective: Objective, alpha: &S, beta_opt: &S) -> S {
    match objective {
        Objective::Min => alpha.clone() * beta_opt.clone(),
        Objective::Max => beta_opt.clone() / alpha.clone(),
    }
}

pub fn synthesize<S: Scalar>(
    p: &OptLcl<S>,
    params: &ProblemParameters<S>,
    alpha: &S,
    cls: &Classification,
) -> Result<SynthesisPlan<S>, SynthesisError> {
    synthesize_with_graph(&DeBruijnGraph::build(p), params, alpha, cls)
}

pub fn synthesize_with_graph<S: Scalar>(
    g: &DeBruijnGraph<S>,
    params: &ProblemParameters<S>,
    alpha: &S,
    cls: &Classification,
) -> Result<SynthesisPlan<S>, SynthesisError> {
    let target = params
        .beta_opt
        .as_ref()
        .and_then(|b| b.finite())
        .map(|b| budget(g.objective(), alpha, b));
    match cls.strategy {
        Strategy::None => Err(SynthesisError::NoStrategy(cls.class.to_string())),
        Strategy::Optimal => Ok(SynthesisPlan::empty(Strategy::Optimal, alpha.clone(), target)),
        Strategy::ConstantSolution => {
            let walk = params
                .witness
                .constant
                .as_ref()
                .ok_or_else(|| SynthesisError::Infeasible("no self-loop witness".into()))?;
            let mut plan = SynthesisPlan::empty(Strategy::ConstantSolution, alpha.clone(), target);
            plan.loop_node = Some(g.node(walk[0]).tuple.clone());
            Ok(plan)
        }
        Strategy::Flexible => {
            let target = target.ok_or_else(|| SynthesisError::Infeasible("beta_opt = bot".into()))?;
            let (view, witness) = flexible_view(g, params)?;
            let rule = Budget::new(g, target.clone());
            // Any node of the witness component may anchor; keep the one with
            // the shortest segments.
            let mut best = flexible_constants(&view, witness, &rule).map(|(t, c)| (witness, t, c));
            for v in view.nodes().filter(|&v| v != witness) {
                if let Ok((t, c)) = flexible_constants(&view, v, &rule) {
                    if best.as_ref().is_err() || best.as_ref().is_ok_and(|(_, _, b)| c.a_min < b.a_min) {
                        best = Ok((v, t, c));
                    }
                }
            }
            let (anchor, table, constants) = best?;
            let mut plan = SynthesisPlan::empty(Strategy::Flexible, alpha.clone(), Some(target));
            plan.anchor = Some(g.node(anchor).tuple.clone());
            plan.gap_walks = gap_table(g, &table, constants.a_min, constants.b_max);
            plan.constants = Some(constants);
            Ok(plan)
        }
        Strategy::ConstantFragment => {
            let target = target.ok_or_else(|| SynthesisError::Infeasible("beta_opt = bot".into()))?;
            fragment_plan(g, params, alpha, target)
        }
    }
}

/// The constants of a plan, without the tables.
pub fn plan_constants<S: Scalar>(
    p: &OptLcl<S>,
    params: &ProblemParameters<S>,
    alpha: &S,
    strategy: Strategy,
) -> Result<PlanConstants, SynthesisError> {
    if !matches!(strategy, Strategy::Flexible | Strategy::ConstantFragment) {
        return Err(SynthesisError::NoConstants(strategy));
    }
    let class = match strategy {
        Strategy::Flexible => crate::classify::ComplexityClass::C,
        _ => crate::classify::ComplexityClass::B,
    };
    let cls = Classification {
        class,
        strategy,
        matched_condition: String::new(),
        lower_bound_note: String::new(),
    };
    let plan = synthesize(p, params, alpha, &cls)?;
    Ok(plan.constants.expect("segment strategies carry constants"))
}

/// Acceptance rule for a closed anchor walk of length `g`.
struct Budget<S> {
    objective: Objective,
    aggregation: Aggregation,
    rate: S,
}

impl<S: Scalar> Budget<S> {
    fn new(g: &DeBruijnGraph<S>, rate: S) -> Self {
        Budget { objective: g.objective(), aggregation: g.aggregation(), rate }
    }

    fn accepts(&self, total: &S, len: usize) -> bool {
        let limit = match self.aggregation {
            Aggregation::Sum => self.rate.clone() * S::from_count(len),
            _ => self.rate.clone(),
        };
        self.objective.at_least_as_good(total, &limit)
    }

    fn good(&self, table: &WalkTable<S>, len: usize) -> bool {
        table.closed(len).is_some_and(|t| self.accepts(t, len))
    }
}

fn max_index_node<S: Scalar>(g: &DeBruijnGraph<S>, walk: &[NodeId]) -> NodeId {
    *walk.iter().max_by_key(|&&v| g.node(v).tuple_index).expect("non-empty walk")
}

/// The anchor's component: `G_flex` for sum problems, the `beta_coprime`
/// threshold graph for min/max problems.
fn flexible_view<'g, S: Scalar>(
    g: &'g DeBruijnGraph<S>,
    params: &ProblemParameters<S>,
) -> Result<(Subgraph<'g, S>, NodeId), SynthesisError> {
    if g.aggregation() == Aggregation::Sum {
        let flex = g.subgraph(SubgraphKind::Flex);
        let anchor = match (&params.witness.exact_flex, &params.witness.flex) {
            (Some(w), _) if params.delta_flex == Some(false) => w.node,
            (_, Some(walk)) => max_index_node(g, walk),
            _ => return Err(SynthesisError::Infeasible("no flexible witness".into())),
        };
        Ok((flex.component_view(anchor), anchor))
    } else {
        let w = params
            .witness
            .coprime
            .as_ref()
            .ok_or_else(|| SynthesisError::Infeasible("no coprime witness".into()))?;
        let level = w.threshold.clone().expect("threshold recorded");
        let view = threshold_view(&g.full(), &level);
        Ok((view.component_view(w.node), w.node))
    }
}

/// Ruling-set levels needed for gaps of at least `a_min`.
pub fn ruling_levels(a_min: usize) -> u32 {
    if a_min <= 1 {
        0
    } else {
        usize::BITS - (a_min - 1).leading_zeros()
    }
}

fn flexible_b_max(a_min: usize) -> usize {
    (3 * a_min).max(3usize.pow(ruling_levels(a_min)))
}

/// Color-reduction rounds from identifiers in `[1, n^2]` down to 6 colors.
pub fn cv_rounds(n: usize) -> usize {
    let id_max = (n as u128).saturating_mul(n as u128).max(1);
    let bits = 128 - id_max.leading_zeros() as u64;
    let mut m: u64 = if bits >= 64 { u64::MAX } else { 1 << bits };
    let mut rounds = 0;
    while m > 6 {
        m = 2 * (64 - (m - 1).leading_zeros() as u64);
        rounds += 1;
    }
    rounds
}

/// View radius of the deterministic segmentation with `levels` ruling levels.
///
/// Level `l` reads 5 leaders back and `5 + cv_rounds` leaders forward on the
/// level-`(l-1)` ring, whose gaps are at most `3^(l-1)`; the final boundary
/// search adds one more gap in each direction.
pub fn ruling_locality(levels: u32, n: usize) -> usize {
    if levels == 0 {
        return 0;
    }
    let t = cv_rounds(n);
    let (mut back, mut fwd) = (0usize, 0usize);
    for l in 1..=levels {
        let gap = 3usize.pow(l - 1);
        back += 5 * gap;
        fwd += (5 + t) * gap;
    }
    let top = 3usize.pow(levels);
    (back + top - 1).max(fwd + top)
}

/// View radius of the randomized segmentation.
pub fn fragment_locality(c: &PlanConstants) -> usize {
    c.b_max + c.a_min - 1
}

fn smallest_unsaturated(locality: impl Fn(usize) -> usize) -> usize {
    (1..).find(|&n| 2 * locality(n) < n).expect("locality grows sublinearly")
}

fn flexible_constants<'g, S: Scalar>(
    view: &Subgraph<'g, S>,
    anchor: NodeId,
    rule: &Budget<S>,
) -> Result<(WalkTable<S>, PlanConstants), SynthesisError> {
    let mut horizon = 64;
    while horizon <= MAX_HORIZON {
        let table = WalkTable::build(view, anchor, horizon);
        let mut a = 1;
        while flexible_b_max(a) <= horizon {
            let b = flexible_b_max(a);
            if (a..=b).all(|len| rule.good(&table, len)) {
                let levels = ruling_levels(a);
                let n0 = smallest_unsaturated(|n| ruling_locality(levels, n));
                let constants = PlanConstants { a_min: a, b_max: b, mark_prob_inv: 1, long_cut: b, n0, levels };
                return Ok((table, constants));
            }
            a += 1;
        }
        horizon *= 2;
    }
    Err(SynthesisError::Infeasible(format!("no segment bound within horizon {MAX_HORIZON} meets the budget {}", rule.rate)))
}

fn gap_table<S: Scalar>(g: &DeBruijnGraph<S>, table: &WalkTable<S>, lo: usize, hi: usize) -> BTreeMap<usize, Vec<usize>> {
    (lo..=hi)
        .map(|len| {
            let walk = table.walk_to(table.source(), len).expect("closed walk checked");
            (len, g.walk_to_labels(&walk).expect("walk in graph"))
        })
        .collect()
}

fn fragment_plan<S: Scalar>(
    g: &DeBruijnGraph<S>,
    params: &ProblemParameters<S>,
    alpha: &S,
    target: S,
) -> Result<SynthesisPlan<S>, SynthesisError> {
    let beta_gap = params
        .beta_gap
        .as_ref()
        .and_then(|b| b.finite())
        .ok_or_else(|| SynthesisError::Infeasible("beta_gap = bot".into()))?
        .clone();
    let walk = params
        .witness
        .gap
        .as_ref()
        .ok_or_else(|| SynthesisError::Infeasible("no gap witness".into()))?;
    let anchor = max_index_node(g, walk);
    let view = g.subgraph(SubgraphKind::Gap).component_view(anchor);
    let objective = g.objective();

    let margin = match objective {
        Objective::Min => target.clone() - beta_gap.clone(),
        Objective::Max => beta_gap.clone() - target.clone(),
    };
    if margin <= S::zero() {
        return Err(SynthesisError::Infeasible(format!("margin {margin} against beta_gap {beta_gap}")));
    }
    let half = margin.clone() / S::from_count(2);
    let rate = match objective {
        Objective::Min => beta_gap.clone() + half,
        Objective::Max => beta_gap.clone() - half,
    };
    let rule = Budget::new(g, rate);

    // Worst per-node cost a long segment can incur against the budget.
    let worst = match objective {
        Objective::Min => view.nodes().map(|v| g.cost(v).clone()).max().unwrap_or_else(S::zero),
        Objective::Max => beta_gap.clone(),
    };
    let long_fraction = if worst.is_zero() {
        1.0
    } else {
        (margin.to_f64() / (4.0 * worst.to_f64())).min(1.0)
    };

    let loop_node = view
        .nodes()
        .filter(|&v| g.has_self_loop(v))
        .min_by(|&a, &b| {
            if objective.better(g.cost(a), g.cost(b)) {
                std::cmp::Ordering::Less
            } else if objective.better(g.cost(b), g.cost(a)) {
                std::cmp::Ordering::Greater
            } else {
                a.cmp(&b)
            }
        })
        .ok_or_else(|| SynthesisError::Infeasible("gap component has no self-loop".into()))?;
    let (to_loop, to_anchor) = if loop_node == anchor {
        (vec![], vec![])
    } else {
        let out = view.shortest_path(anchor, loop_node).expect("same component");
        let back = view.shortest_path(loop_node, anchor).expect("same component");
        (heads(g, &out), heads(g, &back))
    };
    debug_assert!(to_loop.len() <= g.gamma() && to_anchor.len() <= g.gamma());

    let mut horizon = 64;
    loop {
        if horizon > MAX_HORIZON {
            return Err(SynthesisError::Infeasible("segment bounds exceed the horizon".into()));
        }
        let table = WalkTable::build(&view, anchor, horizon);
        let Some(a_min) = (1..=horizon).find(|&a| (a..=horizon).all(|len| rule.good(&table, len))) else {
            horizon *= 2;
            continue;
        };
        if a_min > horizon / 4 {
            horizon *= 2;
            continue;
        }
        let min_b = a_min.max(to_loop.len() + to_anchor.len());
        let Some((inv, b_max)) = tune_marking(a_min, min_b, long_fraction) else {
            return Err(SynthesisError::Infeasible("no marking probability meets the long-segment target".into()));
        };
        if b_max > horizon {
            horizon = b_max.next_power_of_two();
            continue;
        }
        let mut constants =
            PlanConstants { a_min, b_max, mark_prob_inv: inv, long_cut: b_max, n0: 0, levels: 0 };
        constants.n0 = 2 * fragment_locality(&constants) + 1;
        let mut plan = SynthesisPlan::empty(Strategy::ConstantFragment, alpha.clone(), Some(target));
        plan.anchor = Some(g.node(anchor).tuple.clone());
        plan.loop_node = Some(g.node(loop_node).tuple.clone());
        plan.connectors = Some((to_loop, to_anchor));
        plan.gap_walks = gap_table(g, &table, a_min, b_max);
        plan.constants = Some(constants);
        return Ok(plan);
    }
}

/// Labels written along a path: heads of every node after the first.
fn heads<S: Scalar>(g: &DeBruijnGraph<S>, path: &[NodeId]) -> Vec<usize> {
    path[1..].iter().map(|&v| g.node(v).head()).collect()
}

/// Segment-length distribution of the windowed marking rule: a node is a
/// boundary iff it is marked and none of its `a_min - 1` predecessors is.
///
/// Returns `P(gap = t)` for `t = 1..` until the remaining mass is negligible.
pub fn gap_distribution(a_min: usize, mark_prob_inv: u64, limit: usize) -> Vec<f64> {
    let q = 1.0 / mark_prob_inv as f64;
    // state[s-1]: probability that the last mark is s steps back (s capped at a_min).
    let mut state = vec![0.0; a_min];
    state[0] = 1.0;
    let mut dist = vec![0.0];
    let mut remaining = 1.0;
    for _ in 1..=limit {
        let hit = q * state[a_min - 1];
        dist.push(hit);
        remaining -= hit;
        let mut next = vec![0.0; a_min];
        next[0] = q * state[..a_min - 1].iter().sum::<f64>();
        for (s, p) in state.iter().enumerate() {
            next[(s + 1).min(a_min - 1)] += (1.0 - q) * p;
        }
        state = next;
        if remaining < 1e-15 {
            break;
        }
    }
    dist
}

/// Expected fraction of nodes in segments longer than `b`, and `P(gap > b)`.
pub fn long_segment_stats(dist: &[f64], b: usize) -> (f64, f64) {
    let mean: f64 = dist.iter().enumerate().map(|(t, p)| t as f64 * p).sum();
    let tail_nodes: f64 = dist.iter().enumerate().skip(b + 1).map(|(t, p)| t as f64 * p).sum();
    let total: f64 = dist.iter().sum();
    let tail_prob: f64 = (total - dist.iter().take(b + 1).sum::<f64>()).max(0.0) + (1.0 - total).max(0.0);
    (if mean > 0.0 { tail_nodes / mean } else { 0.0 }, tail_prob)
}

/// Smallest `b_max >= min_b` over marking probabilities `1/inv`, subject to
/// the long-node fraction and per-segment tail targets.
fn tune_marking(a_min: usize, min_b: usize, long_fraction: f64) -> Option<(u64, usize)> {
    let mut best: Option<(u64, usize)> = None;
    for inv in 1..=MAX_MARK_PROB_INV {
        if inv == 1 && a_min > 1 {
            continue;
        }
        let dist = gap_distribution(a_min, inv, MAX_HORIZON);
        let found = (min_b..dist.len()).find(|&b| {
            let (fraction, tail) = long_segment_stats(&dist, b);
            fraction <= long_fraction && tail <= LONG_SEGMENT_PROB
        });
        if let Some(b) = found {
            if best.is_none_or(|(_, bb)| b < bb) {
                best = Some((inv, b));
            }
        }
    }
    best
}
