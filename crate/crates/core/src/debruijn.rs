//! The pruned, weighted de Bruijn graph of a problem.
//!
//! Nodes are the windows with finite cost; `u -> v` whenever the last
//! `radius` labels of `u` are the first `radius` labels of `v`. Closed walks
//! of length `n` are exactly the valid labelings of the `n`-cycle, so all
//! structural questions about a problem become walk questions here.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_integer::Integer;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::problem::{Aggregation, CostValue, Objective, OptLcl};
use crate::scalar::Scalar;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbgNode<S> {
    /// Index of the tuple in the problem's cost table.
    pub tuple_index: usize,
    pub tuple: Vec<usize>,
    pub cost: S,
}

impl<S> DbgNode<S> {
    /// First label of the window: the label a node outputs when it sits at
    /// this window's start.
    pub fn head(&self) -> usize {
        self.tuple[0]
    }

    pub fn is_constant(&self) -> bool {
        self.tuple.iter().all(|&l| l == self.tuple[0])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMeta {
    /// Members in ascending order.
    pub nodes: Vec<NodeId>,
    pub flexible: bool,
    pub has_self_loop: bool,
}

#[derive(Debug, Clone)]
pub struct DeBruijnGraph<S> {
    nodes: Vec<DbgNode<S>>,
    node_of_tuple: Vec<Option<NodeId>>,
    succ: Vec<Vec<NodeId>>,
    pred: Vec<Vec<NodeId>>,
    gamma: usize,
    scc_id: Vec<usize>,
    components: Vec<ComponentMeta>,
    objective: Objective,
    aggregation: Aggregation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubgraphKind {
    Opt,
    Flex,
    Gap,
    Const,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WalkError {
    #[error("walk is empty")]
    Empty,
    #[error("walk does not return to its start")]
    NotClosed,
    #[error("no edge {0} -> {1}")]
    MissingEdge(NodeId, NodeId),
    #[error("window at position {0} is forbidden")]
    ForbiddenWindow(usize),
    #[error("label {0} is not in the alphabet")]
    UnknownLabel(usize),
}

impl<S: Scalar> DeBruijnGraph<S> {
    pub fn build(p: &OptLcl<S>) -> Self {
        let k = p.alphabet().len();
        let gamma = p.gamma();
        let mut nodes = Vec::new();
        let mut node_of_tuple = vec![None; gamma];
        for (index, cost) in p.costs().iter().enumerate() {
            if let CostValue::Finite(c) = cost {
                node_of_tuple[index] = Some(nodes.len());
                nodes.push(DbgNode { tuple_index: index, tuple: p.tuple_of(index), cost: c.clone() });
            }
        }
        // Successor windows drop the first label and append any label.
        let mut succ = vec![Vec::new(); nodes.len()];
        let mut pred = vec![Vec::new(); nodes.len()];
        for (u, node) in nodes.iter().enumerate() {
            let shifted = (node.tuple_index * k) % gamma;
            for label in 0..k {
                if let Some(v) = node_of_tuple[shifted + label] {
                    succ[u].push(v);
                    pred[v].push(u);
                }
            }
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }
        let mut graph = DeBruijnGraph {
            nodes,
            node_of_tuple,
            succ,
            pred,
            gamma,
            scc_id: Vec::new(),
            components: Vec::new(),
            objective: p.objective(),
            aggregation: p.aggregation(),
        };
        graph.decompose();
        graph
    }

    fn decompose(&mut self) {
        let full = self.full();
        let comps = full.strongly_connected_components();
        let mut scc_id = vec![usize::MAX; self.nodes.len()];
        let mut meta = Vec::with_capacity(comps.len());
        for (id, members) in comps.into_iter().enumerate() {
            for &v in &members {
                scc_id[v] = id;
            }
            let has_self_loop = members.iter().any(|&v| self.has_self_loop(v));
            let flexible = is_flexible_node(&full, members[0]);
            meta.push(ComponentMeta { nodes: members, flexible, has_self_loop });
        }
        self.scc_id = scc_id;
        self.components = meta;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `|labels|^(radius+1)`, counted before pruning.
    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }

    pub fn node(&self, v: NodeId) -> &DbgNode<S> {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[DbgNode<S>] {
        &self.nodes
    }

    pub fn cost(&self, v: NodeId) -> &S {
        &self.nodes[v].cost
    }

    pub fn node_of_tuple(&self, tuple_index: usize) -> Option<NodeId> {
        self.node_of_tuple.get(tuple_index).copied().flatten()
    }

    pub fn successors(&self, v: NodeId) -> &[NodeId] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: NodeId) -> &[NodeId] {
        &self.pred[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn has_self_loop(&self, v: NodeId) -> bool {
        self.has_edge(v, v)
    }

    pub fn scc_id(&self, v: NodeId) -> usize {
        self.scc_id[v]
    }

    pub fn components(&self) -> &[ComponentMeta] {
        &self.components
    }

    pub fn component_of(&self, v: NodeId) -> &ComponentMeta {
        &self.components[self.scc_id[v]]
    }

    pub fn full(&self) -> Subgraph<'_, S> {
        Subgraph { graph: self, members: vec![true; self.nodes.len()], loops_only: false }
    }

    /// The four nested views `G_opt ⊇ G_flex ⊇ G_gap ⊇ G_const`.
    pub fn subgraph(&self, kind: SubgraphKind) -> Subgraph<'_, S> {
        let keep = |v: NodeId| {
            let meta = self.component_of(v);
            match kind {
                SubgraphKind::Opt => true,
                SubgraphKind::Flex => meta.flexible,
                SubgraphKind::Gap => meta.flexible && meta.has_self_loop,
                SubgraphKind::Const => meta.flexible && meta.has_self_loop && self.has_self_loop(v),
            }
        };
        Subgraph {
            graph: self,
            members: (0..self.nodes.len()).map(keep).collect(),
            loops_only: kind == SubgraphKind::Const,
        }
    }

    /// Aggregate of the windows `w_1..w_k` of a walk (the start is skipped).
    pub fn walk_total(&self, walk: &[NodeId]) -> Option<S> {
        let mut iter = walk.iter().skip(1);
        let first = self.cost(*iter.next()?).clone();
        Some(iter.fold(first, |acc, &v| self.aggregation.combine(&acc, self.cost(v))))
    }

    /// Cost of a closed walk: its average window cost for sum problems, the
    /// aggregate otherwise.
    pub fn cycle_cost(&self, walk: &[NodeId]) -> Option<S> {
        let total = self.walk_total(walk)?;
        Some(match self.aggregation {
            Aggregation::Sum => total / S::from_count(walk.len() - 1),
            _ => total,
        })
    }

    /// Spells a closed walk `w_0 .. w_k` (with `w_0 = w_k`) as the cyclic
    /// labeling of length `k` whose windows are `w_1 .. w_k`.
    pub fn walk_to_labels(&self, walk: &[NodeId]) -> Result<Vec<usize>, WalkError> {
        if walk.len() < 2 {
            return Err(WalkError::Empty);
        }
        if walk[0] != walk[walk.len() - 1] {
            return Err(WalkError::NotClosed);
        }
        for pair in walk.windows(2) {
            if !self.has_edge(pair[0], pair[1]) {
                return Err(WalkError::MissingEdge(pair[0], pair[1]));
            }
        }
        Ok(walk[1..].iter().map(|&v| self.nodes[v].head()).collect())
    }

    /// The closed walk of a cyclic labeling; fails on a forbidden window.
    pub fn labels_to_walk(&self, labels: &[usize], alphabet_size: usize) -> Result<Vec<NodeId>, WalkError> {
        let n = labels.len();
        if n == 0 {
            return Err(WalkError::Empty);
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= alphabet_size) {
            return Err(WalkError::UnknownLabel(bad));
        }
        let arity = self.nodes.first().map_or(0, |node| node.tuple.len());
        let arity = if arity == 0 { return Err(WalkError::ForbiddenWindow(0)) } else { arity };
        let window = |i: usize| -> Result<NodeId, WalkError> {
            let index = (0..arity).fold(0, |acc, j| acc * alphabet_size + labels[(i + j) % n]);
            self.node_of_tuple(index).ok_or(WalkError::ForbiddenWindow(i))
        };
        let mut walk = Vec::with_capacity(n + 1);
        walk.push(window(n - 1)?);
        for i in 0..n {
            walk.push(window(i)?);
        }
        Ok(walk)
    }

    /// Graphviz text; node labels are tuples annotated with their cost.
    pub fn to_dot(&self, p: &OptLcl<S>) -> String {
        let mut out = String::from("digraph debruijn {\n");
        for (v, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                out,
                "  n{v} [label=\"{} ({})\"{}];",
                p.format_labels(&node.tuple),
                node.cost,
                if self.components[self.scc_id[v]].flexible { ", style=bold" } else { "" }
            );
        }
        for (u, list) in self.succ.iter().enumerate() {
            for v in list {
                let _ = writeln!(out, "  n{u} -> n{v};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// A node-induced view of a [`DeBruijnGraph`]. The constant view keeps only
/// self-loops as edges.
#[derive(Debug, Clone)]
pub struct Subgraph<'g, S> {
    graph: &'g DeBruijnGraph<S>,
    members: Vec<bool>,
    loops_only: bool,
}

impl<'g, S: Scalar> Subgraph<'g, S> {
    pub fn graph(&self) -> &'g DeBruijnGraph<S> {
        self.graph
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members[v]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(v, _)| v)
    }

    pub fn node_count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn successors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let ok = self.members[v];
        self.graph.succ[v]
            .iter()
            .copied()
            .filter(move |&w| ok && self.members[w] && (!self.loops_only || w == v))
    }

    pub fn predecessors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let ok = self.members[v];
        self.graph.pred[v]
            .iter()
            .copied()
            .filter(move |&u| ok && self.members[u] && (!self.loops_only || u == v))
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.members[u] && self.members[v] && (!self.loops_only || u == v) && self.graph.has_edge(u, v)
    }

    /// Further restriction to the members satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(NodeId) -> bool) -> Subgraph<'g, S> {
        Subgraph {
            graph: self.graph,
            members: self.members.iter().enumerate().map(|(v, &m)| m && keep(v)).collect(),
            loops_only: self.loops_only,
        }
    }

    /// Strongly connected components of the view, each sorted, ordered by
    /// smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<NodeId>> {
        let mut g: DiGraph<NodeId, ()> = DiGraph::new();
        let mut local = vec![None; self.members.len()];
        for v in self.nodes() {
            local[v] = Some(g.add_node(v));
        }
        for u in self.nodes() {
            for v in self.successors(u) {
                g.add_edge(local[u].unwrap(), local[v].unwrap(), ());
            }
        }
        let mut comps: Vec<Vec<NodeId>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<NodeId> = c.into_iter().map(|ix| g[ix]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        comps.sort_unstable_by_key(|c| c[0]);
        comps
    }

    /// The view restricted to the strongly connected component containing `v`.
    pub fn component_view(&self, v: NodeId) -> Subgraph<'g, S> {
        let comp = self
            .strongly_connected_components()
            .into_iter()
            .find(|c| c.binary_search(&v).is_ok())
            .unwrap_or_default();
        let mut members = vec![false; self.members.len()];
        for w in comp {
            members[w] = true;
        }
        Subgraph { graph: self.graph, members, loops_only: self.loops_only }
    }

    /// Shortest path `from -> to` inside the view (fewest edges, smallest ids on ties).
    pub fn shortest_path(&self, from: NodeId, to: NodeId) -> Option<Vec<NodeId>> {
        let mut parent = vec![None; self.members.len()];
        let mut seen = vec![false; self.members.len()];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            for w in self.successors(u) {
                if w == to {
                    let mut path = vec![to, u];
                    let mut cur = u;
                    while let Some(p) = parent[cur] {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Lengths `k <= k_max` for which a closed walk `v -> v` of length exactly `k`
/// exists in the view.
pub fn closed_walk_lengths<S: Scalar>(view: &Subgraph<'_, S>, v: NodeId, k_max: usize) -> BTreeSet<usize> {
    let mut lengths = BTreeSet::new();
    if !view.contains(v) {
        return lengths;
    }
    let n = view.graph().node_count();
    let mut frontier = vec![false; n];
    frontier[v] = true;
    for k in 1..=k_max {
        let mut next = vec![false; n];
        for u in (0..n).filter(|&u| frontier[u]) {
            for w in view.successors(u) {
                next[w] = true;
            }
        }
        if next[v] {
            lengths.insert(k);
        }
        if !next.iter().any(|&b| b) {
            break;
        }
        frontier = next;
    }
    lengths
}

/// Lexicographically smallest pair `(a, b)`, `a <= b`, with `gcd(a, b) = 1`.
pub fn coprime_pair<'a>(lengths: impl IntoIterator<Item = &'a usize> + Clone) -> Option<(usize, usize)> {
    for &a in lengths.clone() {
        for &b in lengths.clone() {
            if a <= b && a.gcd(&b) == 1 {
                return Some((a, b));
            }
        }
    }
    None
}

/// Walk-length horizon `2 * gamma + 1` within which a flexible node always
/// exhibits two closed walks of coprime lengths.
pub fn flexibility_horizon(gamma: usize) -> usize {
    2 * gamma + 1
}

/// A node is flexible iff it lies on closed walks of two coprime lengths.
pub fn is_flexible_node<S: Scalar>(view: &Subgraph<'_, S>, v: NodeId) -> bool {
    let lengths = closed_walk_lengths(view, v, flexibility_horizon(view.graph().gamma()));
    coprime_pair(&lengths).is_some()
}

#[derive(Debug, Clone)]
struct Entry<S> {
    total: S,
    pred: NodeId,
}

/// Optimal walks of every exact length from a fixed source.
///
/// `best(v, k)` is the objective-optimal aggregate over windows `w_1..w_k` of
/// a walk `s = w_0 -> ... -> w_k = v` inside the view. Ties keep the smallest
/// predecessor, so reconstructed walks are canonical.
#[derive(Debug, Clone)]
pub struct WalkTable<S> {
    source: NodeId,
    horizon: usize,
    rows: Vec<Vec<Option<Entry<S>>>>,
}

impl<S: Scalar> WalkTable<S> {
    pub fn build(view: &Subgraph<'_, S>, source: NodeId, horizon: usize) -> Self {
        let g = view.graph();
        let n = g.node_count();
        let (objective, aggregation) = (g.objective(), g.aggregation());
        let mut rows: Vec<Vec<Option<Entry<S>>>> = Vec::with_capacity(horizon + 1);
        let mut first = vec![None; n];
        if view.contains(source) {
            // Row 0 holds only the source; its total is never read.
            first[source] = Some(Entry { total: S::zero(), pred: source });
        }
        rows.push(first);
        let members: Vec<NodeId> = view.nodes().collect();
        for k in 0..horizon {
            let prev = &rows[k];
            let mut row: Vec<Option<Entry<S>>> = vec![None; n];
            for &v in &members {
                let cost = g.cost(v);
                let mut best: Option<Entry<S>> = None;
                for u in view.predecessors(v) {
                    let Some(entry) = &prev[u] else { continue };
                    let total = if k == 0 { cost.clone() } else { aggregation.combine(&entry.total, cost) };
                    if best.as_ref().is_none_or(|b| objective.better(&total, &b.total)) {
                        best = Some(Entry { total, pred: u });
                    }
                }
                row[v] = best;
            }
            rows.push(row);
        }
        WalkTable { source, horizon, rows }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Optimal aggregate of a length-`k` walk from the source to `v` (`k >= 1`).
    pub fn best(&self, v: NodeId, k: usize) -> Option<&S> {
        if k == 0 {
            return None;
        }
        self.rows.get(k)?.get(v)?.as_ref().map(|e| &e.total)
    }

    pub fn reachable(&self, v: NodeId, k: usize) -> bool {
        self.rows.get(k).and_then(|r| r.get(v)).is_some_and(Option::is_some)
    }

    /// Optimal closed walk of length `k` at the source.
    pub fn closed(&self, k: usize) -> Option<&S> {
        self.best(self.source, k)
    }

    /// The canonical optimal walk `w_0 = source, .., w_k = v`.
    pub fn walk_to(&self, v: NodeId, k: usize) -> Option<Vec<NodeId>> {
        if !self.reachable(v, k) {
            return None;
        }
        let mut walk = vec![v];
        let mut cur = v;
        for step in (1..=k).rev() {
            cur = self.rows[step][cur].as_ref()?.pred;
            walk.push(cur);
        }
        walk.reverse();
        Some(walk)
    }
}
