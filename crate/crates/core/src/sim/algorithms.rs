use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::{LocalAlgorithm, SimError, View};
use crate::classify::Strategy;
use crate::debruijn::DeBruijnGraph;
use crate::problem::OptLcl;
use crate::scalar::Scalar;
use crate::synthesis::{cv_rounds, fragment_locality, ruling_locality, PlanConstants, SynthesisPlan};
use crate::verify::opt_dp_with_graph;

/// Every node outputs the self-loop label.
pub struct ConstantAlgorithm {
    label: usize,
}

pub fn alg_constant<S: Scalar>(plan: &SynthesisPlan<S>) -> Result<ConstantAlgorithm, SimError> {
    let label = plan.loop_label().ok_or(SimError::MissingPlanPart("loop node"))?;
    Ok(ConstantAlgorithm { label })
}

impl LocalAlgorithm for ConstantAlgorithm {
    fn name(&self) -> String {
        "constant".into()
    }

    fn strategy(&self) -> Strategy {
        Strategy::ConstantSolution
    }

    fn randomized(&self) -> bool {
        false
    }

    fn locality(&self, _n: usize) -> usize {
        0
    }

    fn output(&self, _view: &View<'_>) -> Option<usize> {
        Some(self.label)
    }
}

/// Full view: every node rotates the canonical optimum to start at the
/// smallest identifier and outputs its own position.
pub struct OptimalAlgorithm<S> {
    graph: DeBruijnGraph<S>,
    cache: Mutex<HashMap<usize, Option<Arc<Vec<usize>>>>>,
}

pub fn alg_optimal<S: Scalar>(p: &OptLcl<S>) -> OptimalAlgorithm<S> {
    OptimalAlgorithm { graph: DeBruijnGraph::build(p), cache: Mutex::new(HashMap::new()) }
}

impl<S: Scalar> OptimalAlgorithm<S> {
    fn witness(&self, n: usize) -> Option<Arc<Vec<usize>>> {
        if let Some(w) = self.cache.lock().unwrap().get(&n) {
            return w.clone();
        }
        let w = opt_dp_with_graph(&self.graph, n).witness.map(Arc::new);
        self.cache.lock().unwrap().insert(n, w.clone());
        w
    }
}

impl<S: Scalar> LocalAlgorithm for OptimalAlgorithm<S> {
    fn name(&self) -> String {
        "optimal".into()
    }

    fn strategy(&self) -> Strategy {
        Strategy::Optimal
    }

    fn randomized(&self) -> bool {
        false
    }

    fn locality(&self, n: usize) -> usize {
        n.div_ceil(2)
    }

    fn prepare(&self, n: usize) {
        self.witness(n);
    }

    fn output(&self, view: &View<'_>) -> Option<usize> {
        let n = view.n();
        let witness = self.witness(n)?;
        let offset = |d: usize| if d <= n / 2 { d as isize } else { d as isize - n as isize };
        let min_offset = (0..n).map(offset).min_by_key(|&o| view.id(o)).expect("n >= 1");
        Some(witness[(-min_offset).rem_euclid(n as isize) as usize])
    }
}

/// Deterministic segmentation by a hierarchy of ruling sets built from
/// Cole-Vishkin colorings, filled with the plan's gap walks.
pub struct FlexibleAlgorithm<S> {
    gaps: BTreeMap<usize, Vec<usize>>,
    constants: PlanConstants,
    fallback: OptimalAlgorithm<S>,
}

pub fn alg_flexible<S: Scalar>(p: &OptLcl<S>, plan: &SynthesisPlan<S>) -> Result<FlexibleAlgorithm<S>, SimError> {
    let constants = plan.constants.ok_or(SimError::MissingPlanPart("constants"))?;
    if plan.gap_walks.is_empty() {
        return Err(SimError::MissingPlanPart("gap walks"));
    }
    Ok(FlexibleAlgorithm { gaps: plan.gap_walks.clone(), constants, fallback: alg_optimal(p) })
}

fn cv_step(own: u64, succ: u64) -> u64 {
    let i = (own ^ succ).trailing_zeros() as u64;
    2 * i + ((own >> i) & 1)
}

/// One ruling level on the ring of current leaders inside the window.
///
/// `valid` is the window range where leadership is known; returns the new range.
fn ruling_level(ids: &[u64], leader: &mut [bool], valid: (usize, usize), rounds: usize) -> (usize, usize) {
    let (lo, hi) = valid;
    let pos: Vec<usize> = (lo..=hi).filter(|&i| leader[i]).collect();
    let cnt = pos.len();
    let mut colors: Vec<u64> = pos.iter().map(|&i| ids[i]).collect();
    // Valid virtual indices [a, b].
    let (mut a, mut b) = (0usize, cnt as isize - 1);
    for _ in 0..rounds {
        for j in 0..(b.max(0) as usize) {
            colors[j] = cv_step(colors[j], colors[j + 1]);
        }
        b -= 1;
    }
    for c in [5, 4, 3] {
        let prev = colors.clone();
        for j in (a + 1)..(b.max(0) as usize) {
            if prev[j] == c {
                colors[j] = (0..3).find(|&x| x != prev[j - 1] && x != prev[j + 1]).expect("three colors");
            }
        }
        a += 1;
        b -= 1;
    }
    let mut in_set: Vec<bool> = colors.iter().map(|&c| c == 0).collect();
    for c in [1, 2] {
        let prev = in_set.clone();
        for j in (a + 1)..(b.max(0) as usize) {
            if colors[j] == c && !prev[j - 1] && !prev[j + 1] {
                in_set[j] = true;
            }
        }
        a += 1;
        b -= 1;
    }
    assert!(a as isize <= b, "view too small for the ruling hierarchy");
    let b = b as usize;
    let new_lo = pos[a - 1] + 1;
    let new_hi = pos[b + 1] - 1;
    for flag in &mut leader[new_lo..=new_hi] {
        *flag = false;
    }
    for j in a..=b {
        leader[pos[j]] = in_set[j];
    }
    (new_lo, new_hi)
}

impl<S: Scalar> LocalAlgorithm for FlexibleAlgorithm<S> {
    fn name(&self) -> String {
        "flexible".into()
    }

    fn strategy(&self) -> Strategy {
        Strategy::Flexible
    }

    fn randomized(&self) -> bool {
        false
    }

    fn locality(&self, n: usize) -> usize {
        if self.fallback(n) {
            self.fallback.locality(n)
        } else {
            ruling_locality(self.constants.levels, n)
        }
    }

    fn fallback(&self, n: usize) -> bool {
        n < self.constants.n0
    }

    fn prepare(&self, n: usize) {
        if self.fallback(n) {
            self.fallback.prepare(n);
        }
    }

    fn output(&self, view: &View<'_>) -> Option<usize> {
        let n = view.n();
        if self.fallback(n) {
            return self.fallback.output(view);
        }
        let t = self.locality(n) as isize;
        let ids: Vec<u64> = (-t..=t).map(|o| view.id(o)).collect();
        let width = ids.len();
        let mut leader = vec![true; width];
        let mut valid = (0, width - 1);
        let rounds = cv_rounds(n);
        for _ in 0..self.constants.levels {
            valid = ruling_level(&ids, &mut leader, valid, rounds);
        }
        let center = t as usize;
        let p = (valid.0..=center).rev().find(|&i| leader[i]).expect("boundary behind");
        let q = (center + 1..=valid.1).find(|&i| leader[i]).expect("boundary ahead");
        let walk = self.gaps.get(&(q - p)).expect("segment length within plan range");
        Some(walk[center - p])
    }
}

/// Randomized segmentation by windowed marks, with a self-loop filler for
/// overlong segments.
pub struct FragmentAlgorithm {
    gaps: BTreeMap<usize, Vec<usize>>,
    loop_label: usize,
    to_loop: Vec<usize>,
    to_anchor: Vec<usize>,
    constants: PlanConstants,
}

pub fn alg_fragment<S: Scalar>(plan: &SynthesisPlan<S>) -> Result<FragmentAlgorithm, SimError> {
    let constants = plan.constants.ok_or(SimError::MissingPlanPart("constants"))?;
    let loop_label = plan.loop_label().ok_or(SimError::MissingPlanPart("loop node"))?;
    let (to_loop, to_anchor) = plan.connectors.clone().ok_or(SimError::MissingPlanPart("connectors"))?;
    if plan.gap_walks.is_empty() {
        return Err(SimError::MissingPlanPart("gap walks"));
    }
    Ok(FragmentAlgorithm { gaps: plan.gap_walks.clone(), loop_label, to_loop, to_anchor, constants })
}

impl FragmentAlgorithm {
    fn marked(&self, view: &View<'_>, offset: isize) -> bool {
        // Probability exactly 1/mark_prob_inv up to 2^-64.
        ((view.tape(offset, 0) as u128 * self.constants.mark_prob_inv as u128) >> 64) == 0
    }
}

impl LocalAlgorithm for FragmentAlgorithm {
    fn name(&self) -> String {
        "fragment".into()
    }

    fn strategy(&self) -> Strategy {
        Strategy::ConstantFragment
    }

    fn randomized(&self) -> bool {
        true
    }

    /// Independent of `n`: on short cycles the view wraps around, and the
    /// unrolled marks are periodic, so every node still sees the same segments.
    fn locality(&self, _n: usize) -> usize {
        fragment_locality(&self.constants)
    }

    fn output(&self, view: &View<'_>) -> Option<usize> {
        let a = self.constants.a_min as isize;
        let b = self.constants.b_max as isize;
        let t = fragment_locality(&self.constants) as isize;
        // boundary[o + t]: marked with no mark among the a - 1 predecessors.
        let mut boundary = vec![false; (2 * t + 1) as usize];
        let mut last_mark: Option<isize> = None;
        for o in -t..=t {
            if self.marked(view, o) {
                boundary[(o + t) as usize] = o - a >= -t - 1 && last_mark.is_none_or(|m| o - m >= a);
                last_mark = Some(o);
            }
        }
        let is_boundary = |o: isize| boundary[(o + t) as usize];
        let p = (-b..=0).rev().find(|&o| is_boundary(o));
        let q = (1..=b).find(|&o| is_boundary(o));
        if let (Some(p), Some(q)) = (p, q) {
            if q - p <= b {
                return Some(self.gaps[&((q - p) as usize)][(-p) as usize]);
            }
        }
        if let Some(p) = p {
            if ((-p) as usize) < self.to_loop.len() {
                return Some(self.to_loop[(-p) as usize]);
            }
        }
        if let Some(q) = q {
            if (q as usize) <= self.to_anchor.len() {
                return Some(self.to_anchor[self.to_anchor.len() - q as usize]);
            }
        }
        Some(self.loop_label)
    }
}

/// The algorithm realizing a plan's strategy.
pub fn build_algorithm<S: Scalar>(p: &OptLcl<S>, plan: &SynthesisPlan<S>) -> Result<Box<dyn LocalAlgorithm>, SimError> {
    Ok(match plan.strategy {
        Strategy::ConstantSolution => Box::new(alg_constant(plan)?),
        Strategy::ConstantFragment => Box::new(alg_fragment(plan)?),
        Strategy::Flexible => Box::new(alg_flexible(p, plan)?),
        Strategy::Optimal => Box::new(alg_optimal(p)),
        Strategy::None => return Err(SimError::NoAlgorithm(Strategy::None)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::example;
    use crate::classify::classify;
    use crate::params::compute_all;
    use crate::problem::CostValue;
    use crate::sim::{assign_ids, run, CycleInstance, IdPolicy};
    use crate::synthesis::synthesize;
    use crate::verify::{opt_dp, solution_value};
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn setup(name: &str, n: i64, d: i64) -> (OptLcl<R>, SynthesisPlan<R>) {
        let p = example::<R>(name).unwrap();
        let params = compute_all(&p);
        let alpha = R::new(n, d);
        let cls = classify(&params, &alpha).unwrap();
        let plan = synthesize(&p, &params, &alpha, &cls).unwrap();
        (p, plan)
    }

    #[test]
    fn constant_outputs() {
        let (p, plan) = setup("min-dominating-set", 3, 1);
        let alg = alg_constant(&plan).unwrap();
        let r = run(&alg, &assign_ids(9, 1, IdPolicy::RandomPermutation), 0).unwrap();
        assert_eq!(p.format_labels(&r.labeling), "111111111");
        assert_eq!(r.measured_locality, 0);
        let r = run(&alg, &CycleInstance::new(vec![4]), 0).unwrap();
        assert_eq!(solution_value(&p, &r.labeling).unwrap(), CostValue::Finite(R::from_integer(1)));
    }

    #[test]
    fn optimal_outputs() {
        let p = example::<R>("max-independent-set").unwrap();
        let alg = alg_optimal(&p);
        for n in 1..=9 {
            let inst = assign_ids(n, n as u64, IdPolicy::RandomPermutation);
            let r = run(&alg, &inst, 0);
            let opt = opt_dp(&p, n).value;
            match r {
                Ok(r) => assert_eq!(solution_value(&p, &r.labeling).unwrap(), opt),
                Err(e) => assert_eq!((e, opt), (SimError::Unsatisfiable(n), CostValue::Bot)),
            }
        }
        let s = example::<R>("sloppy-coloring").unwrap();
        let r = run(&alg_optimal(&s), &assign_ids(4, 3, IdPolicy::RandomPermutation), 0).unwrap();
        assert_eq!(solution_value(&s, &r.labeling).unwrap(), CostValue::Finite(R::from_integer(4)));
    }

    #[test]
    fn flexible_coloring() {
        let (p, plan) = setup("min-vertex-coloring", 3, 2);
        let alg = alg_flexible(&p, &plan).unwrap();
        for n in [100, 101, 1000] {
            let r = run(&alg, &assign_ids(n, 5, IdPolicy::RandomPermutation), 0).unwrap();
            assert!(!r.fallback);
            assert_eq!(solution_value(&p, &r.labeling).unwrap(), CostValue::Finite(R::from_integer(3)));
        }
    }

    #[test]
    fn flexible_sorted_ids() {
        let (p, plan) = setup("sloppy-coloring", 2, 1);
        let alg = alg_flexible(&p, &plan).unwrap();
        let n = 300;
        let r = run(&alg, &assign_ids(n, 2, IdPolicy::AdversarialBlocks(n)), 0).unwrap();
        assert_eq!(solution_value(&p, &r.labeling).unwrap(), CostValue::Finite(R::from_integer(2 * n as i64)));
    }

    #[test]
    fn fragment_valid_with_long_segments() {
        let (p, mut plan) = setup("max-independent-set", 3, 2);
        // Rare marks force overlong segments through the filler path.
        let c = plan.constants.as_mut().unwrap();
        c.mark_prob_inv = 200;
        let alg = alg_fragment(&plan).unwrap();
        for seed in 0..20 {
            let r = run(&alg, &assign_ids(2000, seed, IdPolicy::RandomPermutation), seed).unwrap();
            assert!(solution_value(&p, &r.labeling).unwrap().finite().is_some());
        }
    }
}
