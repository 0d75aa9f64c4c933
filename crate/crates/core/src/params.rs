//! The seven problem parameters that determine a problem's complexity class.

use std::fmt::Write as _;

use crate::debruijn::{
    closed_walk_lengths, coprime_pair, flexibility_horizon, DeBruijnGraph, NodeId, Subgraph, SubgraphKind,
    WalkTable,
};
use crate::problem::{Aggregation, CostValue, Objective, OptLcl};
use crate::scalar::Scalar;

/// Two closed walks of coprime lengths through one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimeWitness<S> {
    pub node: NodeId,
    pub lengths: (usize, usize),
    /// Cost threshold of the filtered graph the walks live in (min/max problems).
    pub threshold: Option<S>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witnesses<S> {
    pub opt: Option<Vec<NodeId>>,
    pub flex: Option<Vec<NodeId>>,
    pub gap: Option<Vec<NodeId>>,
    pub constant: Option<Vec<NodeId>>,
    /// Exact-cost coprime walks certifying `delta_flex = false`.
    pub exact_flex: Option<CoprimeWitness<S>>,
    pub coprime: Option<CoprimeWitness<S>>,
}

impl<S> Default for Witnesses<S> {
    fn default() -> Self {
        Witnesses { opt: None, flex: None, gap: None, constant: None, exact_flex: None, coprime: None }
    }
}

/// `None` marks a parameter the problem's (objective, aggregation) class does
/// not use; `Some(CostValue::Bot)` is a computed ⊥.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemParameters<S> {
    pub objective: Objective,
    pub aggregation: Aggregation,
    pub beta_opt: Option<CostValue<S>>,
    pub beta_flex: Option<CostValue<S>>,
    pub delta_flex: Option<bool>,
    pub beta_coprime: Option<CostValue<S>>,
    pub beta_gap: Option<CostValue<S>>,
    pub delta_gap: Option<bool>,
    pub beta_const: Option<CostValue<S>>,
    pub witness: Witnesses<S>,
}

/// Objective-optimal cycle cost in a view, with a canonical witness walk.
///
/// Sum problems use the average window cost; min/max problems the aggregate.
/// Walks of length at most `gamma` suffice: an optimal closed walk always
/// contains an optimal simple cycle.
pub fn beta_of_subgraph<S: Scalar>(view: &Subgraph<'_, S>) -> (CostValue<S>, Option<Vec<NodeId>>) {
    let g = view.graph();
    let horizon = g.gamma();
    let mut best: Option<(S, Vec<NodeId>)> = None;
    for s in view.nodes() {
        let table = WalkTable::build(view, s, horizon);
        for k in 1..=horizon {
            let Some(total) = table.closed(k) else { continue };
            let value = match g.aggregation() {
                Aggregation::Sum => total.clone() / S::from_count(k),
                _ => total.clone(),
            };
            if best.as_ref().is_none_or(|(b, _)| g.objective().better(&value, b)) {
                best = Some((value, table.walk_to(s, k).expect("closed walk")));
            }
        }
    }
    match best {
        Some((value, walk)) => (CostValue::Finite(value), Some(walk)),
        None => (CostValue::Bot, None),
    }
}

/// `delta_flex` for sum problems: false iff some node of `G_flex` lies on two
/// closed walks of coprime lengths (at most `2 gamma + 1`) whose average is
/// exactly `beta_flex`.
pub fn compute_delta_flex<S: Scalar>(flex: &Subgraph<'_, S>, beta_flex: &S) -> (bool, Option<CoprimeWitness<S>>) {
    let g = flex.graph();
    let horizon = flexibility_horizon(g.gamma());
    for v in flex.nodes() {
        let table = WalkTable::build(flex, v, horizon);
        let exact: Vec<usize> = (1..=horizon)
            .filter(|&k| table.closed(k).is_some_and(|t| *t == beta_flex.clone() * S::from_count(k)))
            .collect();
        if let Some(lengths) = coprime_pair(&exact) {
            return (false, Some(CoprimeWitness { node: v, lengths, threshold: None }));
        }
    }
    (true, None)
}

/// Threshold scan for min-max / max-min problems: the best node cost `l` such
/// that the nodes with cost `<= l` (resp. `>= l`) carry two closed walks of
/// coprime lengths through a common node.
pub fn compute_beta_coprime<S: Scalar>(g: &DeBruijnGraph<S>) -> (CostValue<S>, Option<CoprimeWitness<S>>) {
    let mut levels: Vec<S> = g.nodes().iter().map(|n| n.cost.clone()).collect();
    levels.sort();
    levels.dedup();
    if g.objective() == Objective::Max {
        levels.reverse();
    }
    let full = g.full();
    let horizon = flexibility_horizon(g.gamma());
    for level in levels {
        let view = threshold_view(&full, &level);
        for comp in view.strongly_connected_components() {
            let v = comp[0];
            let lengths = closed_walk_lengths(&view, v, horizon);
            if let Some(pair) = coprime_pair(&lengths) {
                let witness = CoprimeWitness { node: v, lengths: pair, threshold: Some(level.clone()) };
                return (CostValue::Finite(level), Some(witness));
            }
        }
    }
    (CostValue::Bot, None)
}

/// Nodes whose cost is at least as good as `level`: `<=` for min, `>=` for max.
pub fn threshold_view<'g, S: Scalar>(view: &Subgraph<'g, S>, level: &S) -> Subgraph<'g, S> {
    let g = view.graph();
    let objective = g.objective();
    view.restrict(|v| objective.at_least_as_good(g.cost(v), level))
}

pub fn compute_all<S: Scalar>(p: &OptLcl<S>) -> ProblemParameters<S> {
    compute_with_graph(&DeBruijnGraph::build(p))
}

pub fn compute_with_graph<S: Scalar>(g: &DeBruijnGraph<S>) -> ProblemParameters<S> {
    let mut witness = Witnesses::default();
    let (beta_opt, w) = beta_of_subgraph(&g.subgraph(SubgraphKind::Opt));
    witness.opt = w;
    let (beta_const, w) = beta_of_subgraph(&g.subgraph(SubgraphKind::Const));
    witness.constant = w;

    let mut params = ProblemParameters {
        objective: g.objective(),
        aggregation: g.aggregation(),
        beta_opt: Some(beta_opt),
        beta_flex: None,
        delta_flex: None,
        beta_coprime: None,
        beta_gap: None,
        delta_gap: None,
        beta_const: Some(beta_const.clone()),
        witness,
    };

    if g.aggregation() == Aggregation::Sum {
        let flex_view = g.subgraph(SubgraphKind::Flex);
        let (beta_flex, w) = beta_of_subgraph(&flex_view);
        params.witness.flex = w;
        let (beta_gap, w) = beta_of_subgraph(&g.subgraph(SubgraphKind::Gap));
        params.witness.gap = w;
        params.delta_flex = Some(match beta_flex.finite() {
            Some(b) => {
                let (delta, w) = compute_delta_flex(&flex_view, b);
                params.witness.exact_flex = w;
                delta
            }
            // Vacuous: no walks at all in G_flex.
            None => true,
        });
        params.delta_gap = Some(beta_gap != beta_const);
        params.beta_gap = Some(beta_gap);
        params.beta_flex = Some(beta_flex);
    } else {
        let (beta_coprime, w) = compute_beta_coprime(g);
        params.witness.coprime = w;
        params.beta_coprime = Some(beta_coprime);
    }
    params
}

impl<S: Scalar> ProblemParameters<S> {
    /// `key = value` report; `unset` marks parameters this problem class does
    /// not use.
    pub fn report(&self, p: &OptLcl<S>, g: &DeBruijnGraph<S>, with_witness: bool) -> String {
        let mut out = String::new();
        let cost = |c: &Option<CostValue<S>>| c.as_ref().map_or("unset".to_string(), |c| c.to_string());
        let flag = |d: Option<bool>| d.map_or("unset".to_string(), |d| d.to_string());
        let _ = writeln!(out, "objective = {}", self.objective);
        let _ = writeln!(out, "aggregation = {}", self.aggregation);
        for (key, value) in self.entries() {
            let text = match value {
                ParamValue::Cost(c) => cost(c),
                ParamValue::Flag(d) => flag(d),
            };
            let _ = writeln!(out, "{key} = {text}");
        }
        if with_witness {
            let walk = |w: &[NodeId]| {
                w.iter().map(|&v| p.format_labels(&g.node(v).tuple)).collect::<Vec<_>>().join(" -> ")
            };
            for (key, w) in [
                ("beta_opt", &self.witness.opt),
                ("beta_flex", &self.witness.flex),
                ("beta_gap", &self.witness.gap),
                ("beta_const", &self.witness.constant),
            ] {
                if let Some(w) = w {
                    let _ = writeln!(out, "witness.{key} = {}", walk(w));
                }
            }
            for (key, w) in [("delta_flex", &self.witness.exact_flex), ("beta_coprime", &self.witness.coprime)] {
                if let Some(w) = w {
                    let _ = writeln!(
                        out,
                        "witness.{key} = node {} lengths {} {}",
                        p.format_labels(&g.node(w.node).tuple),
                        w.lengths.0,
                        w.lengths.1
                    );
                }
            }
        }
        out
    }

    pub fn entries(&self) -> [(&'static str, ParamValue<'_, S>); 7] {
        [
            ("beta_opt", ParamValue::Cost(&self.beta_opt)),
            ("beta_flex", ParamValue::Cost(&self.beta_flex)),
            ("delta_flex", ParamValue::Flag(self.delta_flex)),
            ("beta_coprime", ParamValue::Cost(&self.beta_coprime)),
            ("beta_gap", ParamValue::Cost(&self.beta_gap)),
            ("delta_gap", ParamValue::Flag(self.delta_gap)),
            ("beta_const", ParamValue::Cost(&self.beta_const)),
        ]
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ParamValue<'a, S> {
    Cost(&'a Option<CostValue<S>>),
    Flag(Option<bool>),
}
