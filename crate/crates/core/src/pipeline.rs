//! End-to-end runs: classify, synthesize, simulate and evaluate.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use thiserror::Error;

use crate::classify::{classify, Classification, ClassifyError, Strategy};
use crate::debruijn::DeBruijnGraph;
use crate::params::{compute_with_graph, ProblemParameters};
use crate::problem::{CostValue, OptLcl};
use crate::scalar::Scalar;
use crate::sim::{assign_ids, build_algorithm, run, IdPolicy, LocalAlgorithm, SimError};
use crate::synthesis::{synthesize_with_graph, SynthesisError, SynthesisPlan};
use crate::verify::{evaluate_with_opt, opt_dp_with_graph};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A problem with its graph and parameters, plus a cache of `opt(n)`.
pub struct Pipeline<S> {
    pub problem: OptLcl<S>,
    pub graph: DeBruijnGraph<S>,
    pub params: ProblemParameters<S>,
    opt_cache: Mutex<HashMap<usize, CostValue<S>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport<S> {
    pub n: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub locality: usize,
    pub value: Option<CostValue<S>>,
    pub opt: CostValue<S>,
    pub ratio: Option<S>,
    pub valid: bool,
    pub alpha_ok: Option<bool>,
    pub fallback: bool,
    pub saturated: bool,
    pub labeling: Vec<usize>,
}

pub const CSV_HEADER: &str = "n,seed,strategy,locality,value,opt,ratio,valid,alpha_ok";

impl<S: Scalar> RunReport<S> {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.seed,
            self.strategy,
            self.locality,
            self.value.as_ref().map_or("-".into(), |v| v.to_string()),
            self.opt,
            self.ratio.as_ref().map_or("-".into(), |r| r.to_string()),
            self.valid,
            self.alpha_ok.map_or("-".into(), |a| a.to_string())
        )
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let opt = |v: &Option<CostValue<S>>| v.as_ref().map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "strategy = {}", self.strategy);
        let _ = writeln!(out, "measured_locality = {}", self.locality);
        let _ = writeln!(out, "value = {}", opt(&self.value));
        let _ = writeln!(out, "opt = {}", self.opt);
        let _ = writeln!(out, "ratio = {}", self.ratio.as_ref().map_or("-".into(), |r| r.to_string()));
        let _ = writeln!(out, "valid = {}", self.valid);
        let _ = writeln!(out, "alpha_ok = {}", self.alpha_ok.map_or("-".into(), |a| a.to_string()));
        let _ = writeln!(out, "fallback = {}", self.fallback);
        out
    }
}

impl<S: Scalar> Pipeline<S> {
    pub fn new(problem: OptLcl<S>) -> Self {
        let graph = DeBruijnGraph::build(&problem);
        let params = compute_with_graph(&graph);
        Pipeline { problem, graph, params, opt_cache: Mutex::new(HashMap::new()) }
    }

    pub fn classify(&self, alpha: &S) -> Result<Classification, ClassifyError> {
        classify(&self.params, alpha)
    }

    pub fn plan(&self, alpha: &S) -> Result<SynthesisPlan<S>, PipelineError> {
        let cls = self.classify(alpha)?;
        Ok(synthesize_with_graph(&self.graph, &self.params, alpha, &cls)?)
    }

    pub fn algorithm(&self, plan: &SynthesisPlan<S>) -> Result<Box<dyn LocalAlgorithm>, SimError> {
        build_algorithm(&self.problem, plan)
    }

    pub fn opt(&self, n: usize) -> CostValue<S> {
        if let Some(v) = self.opt_cache.lock().unwrap().get(&n) {
            return v.clone();
        }
        let v = opt_dp_with_graph(&self.graph, n).value;
        self.opt_cache.lock().unwrap().insert(n, v.clone());
        v
    }

    /// One simulated run on fresh identifiers, evaluated against `opt(n)`.
    pub fn run_once(
        &self,
        alg: &dyn LocalAlgorithm,
        n: usize,
        seed: u64,
        ids: IdPolicy,
        alpha: &S,
    ) -> Result<RunReport<S>, PipelineError> {
        let inst = assign_ids(n, seed, ids);
        let result = run(alg, &inst, seed)?;
        let opt = self.opt(n);
        let e = evaluate_with_opt(&self.problem, &result.labeling, &opt, Some(alpha)).expect("labels come from the alphabet");
        Ok(RunReport {
            n,
            seed,
            strategy: alg.strategy(),
            locality: result.measured_locality,
            value: e.value,
            opt,
            ratio: e.ratio,
            valid: e.valid,
            alpha_ok: e.alpha_ok,
            fallback: result.fallback,
            saturated: result.saturated,
            labeling: result.labeling,
        })
    }
}
