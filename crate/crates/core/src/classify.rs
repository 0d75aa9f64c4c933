//! Complexity classes from problem parameters and an approximation ratio.

use std::fmt;

use thiserror::Error;

use crate::params::ProblemParameters;
use crate::problem::{Aggregation, CostValue, Objective};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComplexityClass {
    A,
    B,
    C,
    D,
    E,
}

impl ComplexityClass {
    pub fn deterministic(self) -> &'static str {
        match self {
            ComplexityClass::A => "O(1)",
            ComplexityClass::B | ComplexityClass::C => "Theta(log* n)",
            ComplexityClass::D => "Theta(n)",
            ComplexityClass::E => "unsolvable",
        }
    }

    pub fn randomized(self) -> &'static str {
        match self {
            ComplexityClass::A | ComplexityClass::B => "O(1)",
            ComplexityClass::C => "Theta(log* n)",
            ComplexityClass::D => "Theta(n)",
            ComplexityClass::E => "unsolvable",
        }
    }

    pub fn strategy(self) -> Strategy {
        match self {
            ComplexityClass::A => Strategy::ConstantSolution,
            ComplexityClass::B => Strategy::ConstantFragment,
            ComplexityClass::C => Strategy::Flexible,
            ComplexityClass::D => Strategy::Optimal,
            ComplexityClass::E => Strategy::None,
        }
    }
}

impl fmt::Display for ComplexityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    ConstantSolution,
    ConstantFragment,
    Flexible,
    Optimal,
    None,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::ConstantSolution,
        Strategy::ConstantFragment,
        Strategy::Flexible,
        Strategy::Optimal,
        Strategy::None,
    ];

    /// Machine name used in reports, e.g. `constant_fragment`.
    pub fn key(self) -> &'static str {
        match self {
            Strategy::ConstantSolution => "constant_solution",
            Strategy::ConstantFragment => "constant_fragment",
            Strategy::Flexible => "flexible",
            Strategy::Optimal => "optimal",
            Strategy::None => "none",
        }
    }

    /// Human name used in tables, e.g. `Constant fragment`.
    pub fn title(self) -> &'static str {
        match self {
            Strategy::ConstantSolution => "Constant solution",
            Strategy::ConstantFragment => "Constant fragment",
            Strategy::Flexible => "Flexible",
            Strategy::Optimal => "Optimal",
            Strategy::None => "None",
        }
    }

    pub fn from_key(key: &str) -> Option<Strategy> {
        Strategy::ALL.into_iter().find(|s| s.key() == key)
    }

    pub fn is_randomized(self) -> bool {
        self == Strategy::ConstantFragment
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub class: ComplexityClass,
    pub strategy: Strategy,
    pub matched_condition: String,
    pub lower_bound_note: String,
}

impl Classification {
    fn new(class: ComplexityClass, matched: String) -> Self {
        let note = match class {
            ComplexityClass::A => "none needed: constant time is optimal",
            ComplexityClass::B => {
                "Omega(log* n) deterministic: a constant-round algorithm outputs a constant solution on sorted IDs, and alpha*beta_opt < beta_const"
            }
            ComplexityClass::C => {
                "Omega(log* n) randomized: alpha*beta_opt does not beat beta_gap strictly, so an algorithm yields a 3-coloring"
            }
            ComplexityClass::D => {
                "Omega(n): a sublinear algorithm cannot tell lengths apart and pays at least beta_flex per node"
            }
            ComplexityClass::E => "no valid solution exists for infinitely many n",
        };
        Classification { class, strategy: class.strategy(), matched_condition: matched, lower_bound_note: note.into() }
    }

    /// `key = value` report.
    pub fn report(&self) -> String {
        format!(
            "class = {}\nstrategy = {}\ndet = {}\nrand = {}\nmatched = \"{}\"\nlower_bound = \"{}\"\n",
            self.class,
            self.strategy,
            self.class.deterministic(),
            self.class.randomized(),
            self.matched_condition,
            self.lower_bound_note
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("alpha must be >= 1")]
    AlphaBelowOne,
    #[error("parameter {0} is required for {1}-{2} problems")]
    MissingParameter(&'static str, Objective, Aggregation),
}

fn need<'a, S>(
    value: &'a Option<CostValue<S>>,
    name: &'static str,
    params: &ProblemParameters<S>,
) -> Result<&'a CostValue<S>, ClassifyError> {
    value.as_ref().ok_or(ClassifyError::MissingParameter(name, params.objective, params.aggregation))
}

/// Budget comparisons in product form.
struct Scan<'a, S> {
    objective: Objective,
    alpha: &'a S,
    beta_opt: &'a S,
}

impl<S: Scalar> Scan<'_, S> {
    /// `alpha*beta_opt >= x` (min) or `beta_opt/alpha <= x` (max); strict when asked.
    fn suffices(&self, x: &CostValue<S>, strict: bool) -> bool {
        let Some(x) = x.finite() else { return false };
        let (lhs, rhs) = match self.objective {
            Objective::Min => (self.alpha.clone() * self.beta_opt.clone(), x.clone()),
            Objective::Max => (self.alpha.clone() * x.clone(), self.beta_opt.clone()),
        };
        if strict {
            lhs > rhs
        } else {
            lhs >= rhs
        }
    }

    fn budget(&self) -> &'static str {
        match self.objective {
            Objective::Min => "alpha*beta_opt",
            Objective::Max => "beta_opt/alpha",
        }
    }

    fn rel(&self, strict: bool) -> &'static str {
        match (self.objective, strict) {
            (Objective::Min, false) => ">=",
            (Objective::Min, true) => ">",
            (Objective::Max, false) => "<=",
            (Objective::Max, true) => "<",
        }
    }

    fn condition(&self, x: &str, delta: Option<(&str, bool)>) -> String {
        match delta {
            Some((name, d)) => format!("{} {} {x} and {name} {d}", self.budget(), self.rel(d)),
            None => format!("{} {} {x}", self.budget(), self.rel(false)),
        }
    }

    /// The Theta(n) row: strict failure, or equality blocked by a true delta.
    fn fallthrough(&self, x: &CostValue<S>, name: &str, delta: Option<&str>) -> String {
        let beaten = match self.objective {
            Objective::Min => "<",
            Objective::Max => ">",
        };
        if self.suffices(x, false) {
            format!("{} = {name} and {} true", self.budget(), delta.unwrap_or("delta"))
        } else {
            format!("{} {beaten} {name}", self.budget())
        }
    }
}

/// Scans the sufficient-condition rows top to bottom; the first match wins.
pub fn classify<S: Scalar>(params: &ProblemParameters<S>, alpha: &S) -> Result<Classification, ClassifyError> {
    if *alpha < S::one() {
        return Err(ClassifyError::AlphaBelowOne);
    }
    let beta_opt = need(&params.beta_opt, "beta_opt", params)?;
    let beta_const = need(&params.beta_const, "beta_const", params)?;
    let Some(opt) = beta_opt.finite() else {
        let key = if params.aggregation == Aggregation::Sum { "beta_flex" } else { "beta_coprime" };
        return Ok(Classification::new(ComplexityClass::E, format!("{key} = bot")));
    };
    let scan = Scan { objective: params.objective, alpha, beta_opt: opt };

    if params.aggregation == Aggregation::Sum {
        let beta_flex = need(&params.beta_flex, "beta_flex", params)?;
        let beta_gap = need(&params.beta_gap, "beta_gap", params)?;
        let delta_flex = params.delta_flex.ok_or(ClassifyError::MissingParameter(
            "delta_flex",
            params.objective,
            params.aggregation,
        ))?;
        let delta_gap = params.delta_gap.ok_or(ClassifyError::MissingParameter(
            "delta_gap",
            params.objective,
            params.aggregation,
        ))?;
        if beta_flex.is_bot() {
            debug_assert!(beta_const.is_bot() && beta_gap.is_bot());
            return Ok(Classification::new(ComplexityClass::E, "beta_flex = bot".into()));
        }
        if scan.suffices(beta_const, false) {
            return Ok(Classification::new(ComplexityClass::A, scan.condition("beta_const", None)));
        }
        if scan.suffices(beta_gap, delta_gap) {
            return Ok(Classification::new(ComplexityClass::B, scan.condition("beta_gap", Some(("delta_gap", delta_gap)))));
        }
        if scan.suffices(beta_flex, delta_flex) {
            return Ok(Classification::new(
                ComplexityClass::C,
                scan.condition("beta_flex", Some(("delta_flex", delta_flex))),
            ));
        }
        Ok(Classification::new(ComplexityClass::D, scan.fallthrough(beta_flex, "beta_flex", Some("delta_flex"))))
    } else {
        let beta_coprime = need(&params.beta_coprime, "beta_coprime", params)?;
        if beta_coprime.is_bot() {
            return Ok(Classification::new(ComplexityClass::E, "beta_coprime = bot".into()));
        }
        if scan.suffices(beta_const, false) {
            return Ok(Classification::new(ComplexityClass::A, scan.condition("beta_const", None)));
        }
        if scan.suffices(beta_coprime, false) {
            return Ok(Classification::new(ComplexityClass::C, scan.condition("beta_coprime", None)));
        }
        Ok(Classification::new(ComplexityClass::D, scan.fallthrough(beta_coprime, "beta_coprime", None)))
    }
}

/// An interval of alpha values; `hi = None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaInterval<S> {
    pub lo: S,
    pub lo_closed: bool,
    pub hi: Option<S>,
    pub hi_closed: bool,
}

impl<S: Scalar> AlphaInterval<S> {
    pub fn contains(&self, alpha: &S) -> bool {
        let above = if self.lo_closed { *alpha >= self.lo } else { *alpha > self.lo };
        let below = match &self.hi {
            None => true,
            Some(hi) if self.hi_closed => alpha <= hi,
            Some(hi) => alpha < hi,
        };
        above && below
    }

    pub fn is_point(&self) -> bool {
        self.hi.as_ref() == Some(&self.lo)
    }

    /// An alpha inside the interval: the left endpoint if closed, else the
    /// midpoint (or `lo + 1` when unbounded).
    pub fn representative(&self) -> S {
        if self.lo_closed {
            return self.lo.clone();
        }
        match &self.hi {
            Some(hi) => (self.lo.clone() + hi.clone()) / S::from_count(2),
            None => self.lo.clone() + S::one(),
        }
    }

    pub fn midpoint(&self) -> S {
        match &self.hi {
            Some(hi) => (self.lo.clone() + hi.clone()) / S::from_count(2),
            None => self.lo.clone() + S::one(),
        }
    }
}

impl<S: Scalar> fmt::Display for AlphaInterval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        let open = if self.lo_closed { '[' } else { '(' };
        match &self.hi {
            None => write!(f, "{open}{},inf)", self.lo),
            Some(hi) => write!(f, "{open}{},{hi}{}", self.lo, if self.hi_closed { ']' } else { ')' }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdReport<S> {
    pub pieces: Vec<(AlphaInterval<S>, Classification)>,
}

impl<S: Scalar> ThresholdReport<S> {
    pub fn classification_at(&self, alpha: &S) -> Option<&Classification> {
        self.pieces.iter().find(|(i, _)| i.contains(alpha)).map(|(_, c)| c)
    }

    pub fn report(&self) -> String {
        self.pieces
            .iter()
            .map(|(i, c)| format!("{i} {} {} {}\n", c.class, c.strategy, c.matched_condition))
            .collect()
    }
}

/// Alpha values at which some scan row can switch.
fn breakpoints<S: Scalar>(params: &ProblemParameters<S>, beta_opt: &S) -> Vec<S> {
    let candidates = [&params.beta_const, &params.beta_gap, &params.beta_flex, &params.beta_coprime];
    let mut points: Vec<S> = candidates
        .into_iter()
        .filter_map(|c| c.as_ref().and_then(|c| c.finite()))
        .filter_map(|x| match params.objective {
            Objective::Min if !beta_opt.is_zero() => Some(x.clone() / beta_opt.clone()),
            Objective::Max if !x.is_zero() => Some(beta_opt.clone() / x.clone()),
            _ => None,
        })
        .filter(|b| *b > S::one())
        .collect();
    points.push(S::one());
    points.sort();
    points.dedup();
    points
}

/// Partition of `[1, inf)` into maximal intervals of equal classification.
pub fn threshold_report<S: Scalar>(params: &ProblemParameters<S>) -> Result<ThresholdReport<S>, ClassifyError> {
    let beta_opt = need(&params.beta_opt, "beta_opt", params)?;
    let Some(opt) = beta_opt.finite() else {
        let interval = AlphaInterval { lo: S::one(), lo_closed: true, hi: None, hi_closed: false };
        return Ok(ThresholdReport { pieces: vec![(interval, classify(params, &S::one())?)] });
    };
    let points = breakpoints(params, opt);

    // Alternating point pieces {b_i} and open pieces (b_i, b_{i+1}).
    let mut atoms: Vec<(AlphaInterval<S>, Classification)> = Vec::new();
    for (i, b) in points.iter().enumerate() {
        let point = AlphaInterval { lo: b.clone(), lo_closed: true, hi: Some(b.clone()), hi_closed: true };
        atoms.push((point, classify(params, b)?));
        let next = points.get(i + 1).cloned();
        let open = AlphaInterval { lo: b.clone(), lo_closed: false, hi: next, hi_closed: false };
        let c = classify(params, &open.midpoint())?;
        atoms.push((open, c));
    }

    let mut pieces: Vec<(AlphaInterval<S>, Classification)> = Vec::new();
    for (interval, c) in atoms {
        match pieces.last_mut() {
            Some((last, lc)) if lc.class == c.class => {
                last.hi = interval.hi;
                last.hi_closed = interval.hi_closed;
            }
            _ => pieces.push((interval, c)),
        }
    }
    Ok(ThresholdReport { pieces })
}
