//! Exact optima, brute-force enumeration and labeling evaluation.

use rayon::prelude::*;
use thiserror::Error;

use crate::debruijn::{DeBruijnGraph, WalkTable};
use crate::problem::{CostValue, Objective, OptLcl};
use crate::scalar::Scalar;

/// Default cap on `|alphabet|^n` for brute-force enumeration.
pub const DEFAULT_ENUM_BUDGET: u64 = 2_000_000;

/// Environment variable overriding [`DEFAULT_ENUM_BUDGET`].
pub const ENUM_BUDGET_VAR: &str = "OPTLCL_ENUM_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown label id {0}")]
    UnknownLabel(usize),
    #[error("empty labeling")]
    Empty,
    #[error("{size} labelings exceed the enumeration budget {budget}")]
    BudgetExceeded { size: String, budget: u64 },
}

/// Budget from the environment, falling back to the default.
pub fn enum_budget() -> u64 {
    std::env::var(ENUM_BUDGET_VAR).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ENUM_BUDGET)
}

/// Aggregate cost of a cyclic labeling; `Bot` if any window is forbidden.
pub fn solution_value<S: Scalar>(p: &OptLcl<S>, labels: &[usize]) -> Result<CostValue<S>, VerifyError> {
    let n = labels.len();
    if n == 0 {
        return Err(VerifyError::Empty);
    }
    let k = p.alphabet().len();
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(VerifyError::UnknownLabel(bad));
    }
    let arity = p.arity();
    let mut acc: Option<S> = None;
    for i in 0..n {
        let index = (0..arity).fold(0, |a, j| a * k + labels[(i + j) % n]);
        let CostValue::Finite(c) = p.cost_at(index) else { return Ok(CostValue::Bot) };
        acc = Some(match acc {
            None => c.clone(),
            Some(a) => p.aggregation().combine(&a, c),
        });
    }
    Ok(CostValue::from(acc))
}

/// Optimal value of a cycle of a given length together with a labeling attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum<S> {
    pub n: usize,
    pub value: CostValue<S>,
    pub witness: Option<Vec<usize>>,
}

/// `opt(n)` as the best closed walk of length exactly `n`.
///
/// Ties between start nodes keep the smallest node index.
pub fn opt_dp<S: Scalar>(p: &OptLcl<S>, n: usize) -> Optimum<S> {
    opt_dp_with_graph(&DeBruijnGraph::build(p), n)
}

pub fn opt_dp_with_graph<S: Scalar>(g: &DeBruijnGraph<S>, n: usize) -> Optimum<S> {
    assert!(n >= 1, "cycle length must be positive");
    let full = g.full();
    let objective = g.objective();
    let totals: Vec<Option<S>> = (0..g.node_count()).into_par_iter().map(|s| closed_total(g, s, n)).collect();
    let mut best: Option<(usize, S)> = None;
    for (s, total) in totals.into_iter().enumerate() {
        let Some(total) = total else { continue };
        if best.as_ref().is_none_or(|(_, b)| objective.better(&total, b)) {
            best = Some((s, total));
        }
    }
    match best {
        None => Optimum { n, value: CostValue::Bot, witness: None },
        Some((s, value)) => {
            let table = WalkTable::build(&full, s, n);
            let walk = table.walk_to(s, n).expect("optimal walk");
            let labels = g.walk_to_labels(&walk).expect("closed walk in the graph");
            Optimum { n, value: CostValue::Finite(value), witness: Some(labels) }
        }
    }
}

/// Best closed walk of length `n` at `s`, with two rolling rows.
fn closed_total<S: Scalar>(g: &DeBruijnGraph<S>, s: usize, n: usize) -> Option<S> {
    let (objective, aggregation) = (g.objective(), g.aggregation());
    let count = g.node_count();
    let mut prev: Vec<Option<S>> = vec![None; count];
    for &v in g.successors(s) {
        prev[v] = Some(g.cost(v).clone());
    }
    for _ in 1..n {
        let mut next: Vec<Option<S>> = vec![None; count];
        for (u, total) in prev.iter().enumerate() {
            let Some(total) = total else { continue };
            for &v in g.successors(u) {
                let candidate = aggregation.combine(total, g.cost(v));
                if next[v].as_ref().is_none_or(|b| objective.better(&candidate, b)) {
                    next[v] = Some(candidate);
                }
            }
        }
        prev = next;
    }
    prev[s].take()
}

/// `opt(n)` by enumerating all `|alphabet|^n` labelings.
pub fn opt_bruteforce<S: Scalar>(p: &OptLcl<S>, n: usize, budget: u64) -> Result<CostValue<S>, VerifyError> {
    if n == 0 {
        return Err(VerifyError::Empty);
    }
    let k = p.alphabet().len();
    let size = (k as u128).checked_pow(n as u32);
    if size.is_none_or(|s| s > budget as u128) {
        let size = size.map_or_else(|| format!("{k}^{n}"), |s| s.to_string());
        return Err(VerifyError::BudgetExceeded { size, budget });
    }
    let objective = p.objective();
    let best = (0..k)
        .into_par_iter()
        .filter_map(|first| {
            let mut labels = vec![0; n];
            labels[0] = first;
            let mut best: Option<S> = None;
            loop {
                if let CostValue::Finite(v) = solution_value(p, &labels).expect("labels in range") {
                    if best.as_ref().is_none_or(|b| objective.better(&v, b)) {
                        best = Some(v);
                    }
                }
                // Odometer over positions 1..n.
                let mut i = n;
                loop {
                    i -= 1;
                    if i == 0 {
                        return best;
                    }
                    labels[i] += 1;
                    if labels[i] < k {
                        break;
                    }
                    labels[i] = 0;
                }
            }
        })
        .reduce_with(|a, b| objective.pick(a, b));
    Ok(CostValue::from(best))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation<S> {
    pub valid: bool,
    pub value: Option<CostValue<S>>,
    pub opt: Option<CostValue<S>>,
    /// `value/opt` for min problems, `opt/value` for max problems.
    pub ratio: Option<S>,
    pub alpha_ok: Option<bool>,
}

pub fn evaluate<S: Scalar>(p: &OptLcl<S>, labels: &[usize], alpha: Option<&S>) -> Result<Evaluation<S>, VerifyError> {
    let value = solution_value(p, labels)?;
    if value.is_bot() {
        return Ok(invalid());
    }
    let opt = opt_dp(p, labels.len()).value;
    Ok(assemble(p.objective(), value, opt, alpha))
}

/// Like [`evaluate`], with a precomputed `opt(n)`.
pub fn evaluate_with_opt<S: Scalar>(
    p: &OptLcl<S>,
    labels: &[usize],
    opt: &CostValue<S>,
    alpha: Option<&S>,
) -> Result<Evaluation<S>, VerifyError> {
    let value = solution_value(p, labels)?;
    if value.is_bot() {
        return Ok(invalid());
    }
    Ok(assemble(p.objective(), value, opt.clone(), alpha))
}

fn invalid<S>() -> Evaluation<S> {
    Evaluation { valid: false, value: None, opt: None, ratio: None, alpha_ok: None }
}

fn assemble<S: Scalar>(objective: Objective, value: CostValue<S>, opt: CostValue<S>, alpha: Option<&S>) -> Evaluation<S> {
    let (ratio, alpha_ok) = match (value.finite(), opt.finite()) {
        (Some(v), Some(o)) => (ratio(objective, v, o), alpha.map(|a| alpha_ok(objective, v, o, a))),
        _ => (None, None),
    };
    Evaluation { valid: true, value: Some(value), opt: Some(opt), ratio, alpha_ok }
}

fn ratio<S: Scalar>(objective: Objective, value: &S, opt: &S) -> Option<S> {
    let (num, den) = match objective {
        Objective::Min => (value, opt),
        Objective::Max => (opt, value),
    };
    if den.is_zero() {
        return num.is_zero().then(S::one);
    }
    Some(num.clone() / den.clone())
}

/// The approximation predicate in product form.
pub fn alpha_ok<S: Scalar>(objective: Objective, value: &S, opt: &S, alpha: &S) -> bool {
    match objective {
        Objective::Min => alpha.clone() * opt.clone() >= *value,
        Objective::Max => *opt <= alpha.clone() * value.clone(),
    }
}

/// Largest `n` with `|alphabet|^n <= budget`.
pub fn max_enumerable_n<S: Scalar>(p: &OptLcl<S>, budget: u64) -> usize {
    let k = p.alphabet().len() as u128;
    if k <= 1 {
        return usize::MAX;
    }
    let mut n = 0;
    let mut size = 1u128;
    while size * k <= budget as u128 {
        size *= k;
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin_examples, example};
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn problem(name: &str) -> OptLcl<R> {
        example(name).unwrap()
    }

    fn labels(p: &OptLcl<R>, text: &str) -> Vec<usize> {
        p.parse_labels(text).unwrap()
    }

    fn fin(v: i64) -> CostValue<R> {
        CostValue::Finite(R::from_integer(v))
    }

    #[test]
    fn values() {
        let p = problem("max-independent-set");
        assert_eq!(solution_value(&p, &labels(&p, "1010")).unwrap(), fin(2));
        assert_eq!(solution_value(&p, &labels(&p, "11")).unwrap(), CostValue::Bot);
        let c = problem("min-vertex-coloring");
        assert_eq!(solution_value(&c, &labels(&c, "1212")).unwrap(), fin(2));
        assert_eq!(solution_value(&c, &[7]), Err(VerifyError::UnknownLabel(7)));
    }

    #[test]
    fn dp_values() {
        assert_eq!(opt_dp(&problem("max-independent-set"), 5).value, fin(2));
        assert_eq!(opt_dp(&problem("min-dominating-set"), 6).value, fin(2));
        assert_eq!(opt_dp(&problem("min-vertex-coloring"), 4).value, fin(2));
        assert_eq!(opt_dp(&problem("min-vertex-coloring"), 5).value, fin(3));
        let empty = OptLcl::<R>::parse("alphabet: x\nradius: 1\nobjective: min\naggregation: sum\ncost x x = bot\n").unwrap();
        assert_eq!(opt_dp(&empty, 3).value, CostValue::Bot);
        assert_eq!(opt_dp(&empty, 3).witness, None);
    }

    #[test]
    fn dp_witness_attains_value() {
        for (name, p) in builtin_examples::<R>() {
            for n in 1..=12 {
                let opt = opt_dp(&p, n);
                if let Some(w) = &opt.witness {
                    assert_eq!(w.len(), n);
                    assert_eq!(solution_value(&p, w).unwrap(), opt.value, "{name} n={n}");
                }
            }
        }
    }

    #[test]
    fn brute_force_small() {
        assert_eq!(opt_bruteforce(&problem("max-independent-set"), 2, DEFAULT_ENUM_BUDGET).unwrap(), fin(1));
        assert_eq!(opt_bruteforce(&problem("sloppy-coloring"), 2, DEFAULT_ENUM_BUDGET).unwrap(), fin(2));
        assert!(matches!(
            opt_bruteforce(&problem("sloppy-coloring"), 10, DEFAULT_ENUM_BUDGET),
            Err(VerifyError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn evaluation() {
        let p = problem("min-dominating-set");
        let e = evaluate(&p, &labels(&p, "111111"), Some(&R::from_integer(3))).unwrap();
        assert!(e.valid);
        assert_eq!(e.value, Some(fin(6)));
        assert_eq!(e.opt, Some(fin(2)));
        assert_eq!(e.ratio, Some(R::from_integer(3)));
        assert_eq!(e.alpha_ok, Some(true));

        let m = problem("max-independent-set");
        let e = evaluate(&m, &labels(&m, "0000"), Some(&R::from_integer(2))).unwrap();
        assert!(e.valid);
        assert_eq!(e.value, Some(fin(0)));
        assert_eq!(e.alpha_ok, Some(false));
        assert_eq!(e.ratio, None);

        let e = evaluate(&m, &labels(&m, "0110"), Some(&R::from_integer(2))).unwrap();
        assert_eq!(e, Evaluation { valid: false, value: None, opt: None, ratio: None, alpha_ok: None });
    }

    #[test]
    fn zero_optimum_ratio() {
        assert_eq!(ratio(Objective::Min, &R::from_integer(0), &R::from_integer(0)), Some(R::from_integer(1)));
        assert_eq!(ratio(Objective::Min, &R::from_integer(1), &R::from_integer(0)), None);
        assert!(alpha_ok(Objective::Min, &R::from_integer(0), &R::from_integer(0), &R::from_integer(2)));
    }

    #[test]
    fn enumerable_lengths() {
        assert_eq!(max_enumerable_n(&problem("max-independent-set"), DEFAULT_ENUM_BUDGET), 20);
        assert_eq!(max_enumerable_n(&problem("sloppy-coloring"), DEFAULT_ENUM_BUDGET), 6);
    }
}
