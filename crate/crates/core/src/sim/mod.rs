//! A LOCAL-model simulator on directed cycles.
//!
//! Algorithms are functions of a node's radius-`T` view; the engine evaluates
//! every node independently and records the largest offset any node read.

mod algorithms;

use std::cell::Cell;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::classify::Strategy;

pub use algorithms::{
    alg_constant, alg_flexible, alg_fragment, alg_optimal, build_algorithm, ConstantAlgorithm, FlexibleAlgorithm,
    FragmentAlgorithm, OptimalAlgorithm,
};

/// Name of the per-node random tape stream.
pub const TAPE_HASH: &str = "splitmix64(seed, key, word)";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("no valid solution exists for n = {0}")]
    Unsatisfiable(usize),
    #[error("plan has no {0}")]
    MissingPlanPart(&'static str),
    #[error("strategy {0} has no distributed algorithm")]
    NoAlgorithm(Strategy),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdPolicy {
    RandomPermutation,
    /// Ascending runs of the given length.
    AdversarialBlocks(usize),
}

/// A directed cycle with unique identifiers; node `i`'s successor is `i + 1 mod n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleInstance {
    ids: Vec<u64>,
    /// Keys of the random tapes; the ids unless overridden.
    tape_keys: Option<Vec<u64>>,
}

impl CycleInstance {
    pub fn new(ids: Vec<u64>) -> Self {
        assert!(!ids.is_empty(), "a cycle has at least one node");
        CycleInstance { ids, tape_keys: None }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn set_id(&mut self, i: usize, id: u64) {
        self.ids[i] = id;
    }

    /// Replaces the tape key of node `i` (tapes default to being keyed by id).
    pub fn set_tape_key(&mut self, i: usize, key: u64) {
        let keys = self.tape_keys.get_or_insert_with(|| self.ids.clone());
        keys[i] = key;
    }

    fn tape_key(&self, i: usize) -> u64 {
        self.tape_keys.as_ref().map_or(self.ids[i], |k| k[i])
    }
}

/// Distinct identifiers drawn from `[1, n^2]`.
pub fn assign_ids(n: usize, seed: u64, policy: IdPolicy) -> CycleInstance {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = n.checked_mul(n).expect("id space fits usize");
    let mut ids: Vec<u64> = sample(&mut rng, space, n).into_iter().map(|x| x as u64 + 1).collect();
    if let IdPolicy::AdversarialBlocks(block) = policy {
        for chunk in ids.chunks_mut(block.max(1)) {
            chunk.sort_unstable();
        }
    }
    CycleInstance::new(ids)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Word `word` of the tape keyed by `key` under `seed`.
pub fn tape_word(seed: u64, key: u64, word: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ key) ^ word)
}

/// What a node sees: identifiers and tapes within `radius` hops, and `n`.
///
/// Reading beyond the radius panics; the largest offset read is recorded.
pub struct View<'a> {
    inst: &'a CycleInstance,
    center: usize,
    radius: usize,
    seed: u64,
    used: Cell<usize>,
}

impl<'a> View<'a> {
    pub fn new(inst: &'a CycleInstance, center: usize, radius: usize, seed: u64) -> Self {
        View { inst, center, radius, seed, used: Cell::new(0) }
    }

    pub fn n(&self) -> usize {
        self.inst.n()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    fn position(&self, offset: isize) -> usize {
        let d = offset.unsigned_abs();
        assert!(d <= self.radius, "offset {offset} outside view radius {}", self.radius);
        self.used.set(self.used.get().max(d));
        (self.center as isize + offset).rem_euclid(self.n() as isize) as usize
    }

    pub fn id(&self, offset: isize) -> u64 {
        self.inst.ids[self.position(offset)]
    }

    pub fn tape(&self, offset: isize, word: u64) -> u64 {
        let i = self.position(offset);
        tape_word(self.seed, self.inst.tape_key(i), word)
    }

    pub fn used(&self) -> usize {
        self.used.get()
    }
}

/// A distributed algorithm in view form.
pub trait LocalAlgorithm: Send + Sync {
    fn name(&self) -> String;

    fn strategy(&self) -> Strategy;

    fn randomized(&self) -> bool;

    /// View radius used on cycles of length `n`.
    fn locality(&self, n: usize) -> usize;

    /// Whether cycles of length `n` are handled by the full-view fallback.
    fn fallback(&self, _n: usize) -> bool {
        false
    }

    /// Shared precomputation for length `n`, run once before the nodes.
    fn prepare(&self, _n: usize) {}

    /// The node's label, or `None` when no valid solution exists.
    fn output(&self, view: &View<'_>) -> Option<usize>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub labeling: Vec<usize>,
    pub declared_locality: usize,
    pub measured_locality: usize,
    pub seed: Option<u64>,
    pub fallback: bool,
    /// The declared radius covers the whole cycle.
    pub saturated: bool,
}

/// Output of node `i` and the largest offset it read.
pub fn run_node(alg: &dyn LocalAlgorithm, inst: &CycleInstance, seed: u64, i: usize) -> (Option<usize>, usize) {
    let view = View::new(inst, i, alg.locality(inst.n()), seed);
    let label = alg.output(&view);
    (label, view.used())
}

pub fn run(alg: &dyn LocalAlgorithm, inst: &CycleInstance, seed: u64) -> Result<RunResult, SimError> {
    let n = inst.n();
    alg.prepare(n);
    let outputs: Vec<(Option<usize>, usize)> = (0..n).into_par_iter().map(|i| run_node(alg, inst, seed, i)).collect();
    let measured_locality = outputs.iter().map(|&(_, u)| u).max().unwrap_or(0);
    let labeling: Option<Vec<usize>> = outputs.into_iter().map(|(l, _)| l).collect();
    let labeling = labeling.ok_or(SimError::Unsatisfiable(n))?;
    let declared_locality = alg.locality(n);
    Ok(RunResult {
        labeling,
        declared_locality,
        measured_locality,
        seed: alg.randomized().then_some(seed),
        fallback: alg.fallback(n),
        saturated: 2 * declared_locality + 1 > n,
    })
}

/// Iterated logarithm (base 2).
pub fn log_star(n: usize) -> usize {
    let mut x = n as f64;
    let mut k = 0;
    while x > 1.0 {
        x = x.log2();
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn random_ids() {
        let inst = assign_ids(5, 7, IdPolicy::RandomPermutation);
        assert_eq!(inst.n(), 5);
        assert!(inst.ids().iter().all(|&x| (1..=25).contains(&x)));
        assert_eq!(inst.ids().iter().collect::<HashSet<_>>().len(), 5);
        assert_eq!(assign_ids(1, 3, IdPolicy::RandomPermutation).ids(), [1]);
    }

    #[test]
    fn adversarial_blocks() {
        let inst = assign_ids(6, 1, IdPolicy::AdversarialBlocks(3));
        for block in inst.ids().chunks(3) {
            assert!(block.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn view_bounds() {
        let inst = CycleInstance::new(vec![10, 20, 30, 40, 50]);
        let view = View::new(&inst, 0, 2, 0);
        assert_eq!(view.id(-1), 50);
        assert_eq!(view.id(2), 30);
        assert_eq!(view.used(), 2);
        let r = std::panic::catch_unwind(|| View::new(&inst, 0, 2, 0).id(3));
        assert!(r.is_err());
    }

    #[test]
    fn tape_keys() {
        let mut inst = CycleInstance::new(vec![1, 2, 3]);
        let before = View::new(&inst, 0, 1, 9).tape(1, 0);
        inst.set_tape_key(1, 77);
        assert_ne!(View::new(&inst, 0, 1, 9).tape(1, 0), before);
        assert_eq!(inst.ids(), [1, 2, 3]);
    }

    #[test]
    fn iterated_log() {
        assert_eq!(log_star(1), 0);
        assert_eq!(log_star(2), 1);
        assert_eq!(log_star(16), 3);
        assert_eq!(log_star(65536), 4);
    }
}
