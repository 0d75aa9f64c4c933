//! Optimization LCLs on directed cycles: the problem tuple, its text format
//! and validation.

use std::collections::HashMap;
use std::fmt;

use crate::scalar::{parse_rational, Scalar};

/// Largest de Bruijn node count (`|labels|^(radius+1)`) accepted by the parser.
pub const MAX_TUPLES: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregation {
    Sum,
    Min,
    Max,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Min => "min",
            Objective::Max => "max",
        })
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Sum => "sum",
            Aggregation::Min => "min",
            Aggregation::Max => "max",
        })
    }
}

impl Objective {
    /// Whether `a` is strictly better than `b` under this objective.
    pub fn better<S: Ord>(self, a: &S, b: &S) -> bool {
        match self {
            Objective::Min => a < b,
            Objective::Max => a > b,
        }
    }

    /// Whether `a` is at least as good as `b`.
    pub fn at_least_as_good<S: Ord>(self, a: &S, b: &S) -> bool {
        !self.better(b, a)
    }

    pub fn pick<S: Ord>(self, a: S, b: S) -> S {
        if self.better(&b, &a) {
            b
        } else {
            a
        }
    }
}

impl Aggregation {
    /// Folds one more window value into a running aggregate.
    pub fn combine<S: Scalar>(self, acc: &S, value: &S) -> S {
        match self {
            Aggregation::Sum => acc.clone() + value.clone(),
            Aggregation::Min => acc.min(value).clone(),
            Aggregation::Max => acc.max(value).clone(),
        }
    }
}

/// A neighborhood cost: a non-negative rational, or `bot` for a forbidden window.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CostValue<S> {
    Finite(S),
    Bot,
}

impl<S> CostValue<S> {
    pub fn is_bot(&self) -> bool {
        matches!(self, CostValue::Bot)
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            CostValue::Finite(v) => Some(v),
            CostValue::Bot => None,
        }
    }

    pub fn into_option(self) -> Option<S> {
        match self {
            CostValue::Finite(v) => Some(v),
            CostValue::Bot => None,
        }
    }
}

impl<S> From<Option<S>> for CostValue<S> {
    fn from(value: Option<S>) -> Self {
        value.map_or(CostValue::Bot, CostValue::Finite)
    }
}

impl<S: fmt::Display> fmt::Display for CostValue<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostValue::Finite(v) => write!(f, "{v}"),
            CostValue::Bot => f.write_str("bot"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("label `{0}` contains whitespace or is empty")]
    BadLabel(String),
    #[error("tuple has {found} labels, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("negative cost {0}")]
    NegativeCost(String),
    #[error("objective {0} with aggregation {1} is not classified by this method (min-min / max-max)")]
    UnsupportedCombination(Objective, Aggregation),
    #[error("cost table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("problem too large: {0} tuples exceeds the limit")]
    TooLarge(u128),
}

/// A locally checkable optimization problem on directed cycles.
///
/// Window costs are stored densely, indexed by the tuple read as a base-`k`
/// number with the first label most significant (node first, then its
/// successors).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptLcl<S> {
    alphabet: Vec<String>,
    radius: usize,
    costs: Vec<CostValue<S>>,
    aggregation: Aggregation,
    objective: Objective,
}

impl<S: Scalar> OptLcl<S> {
    pub fn new(
        alphabet: Vec<String>,
        radius: usize,
        objective: Objective,
        aggregation: Aggregation,
        costs: Vec<CostValue<S>>,
    ) -> Result<Self, ModelError> {
        if alphabet.is_empty() {
            return Err(ModelError::EmptyAlphabet);
        }
        let mut seen = HashMap::new();
        for label in &alphabet {
            if label.is_empty() || label.chars().any(char::is_whitespace) || label == "#" {
                return Err(ModelError::BadLabel(label.clone()));
            }
            if seen.insert(label.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateLabel(label.clone()));
            }
        }
        check_combination(objective, aggregation)?;
        let expected = tuple_count(alphabet.len(), radius)?;
        if costs.len() != expected {
            return Err(ModelError::TableSize { expected, found: costs.len() });
        }
        if let Some(neg) = costs.iter().filter_map(CostValue::finite).find(|c| c.is_negative()) {
            return Err(ModelError::NegativeCost(neg.to_string()));
        }
        Ok(OptLcl { alphabet, radius, costs, aggregation, objective })
    }

    /// Builds the cost table by evaluating `cost` on every tuple.
    pub fn from_fn(
        alphabet: Vec<String>,
        radius: usize,
        objective: Objective,
        aggregation: Aggregation,
        mut cost: impl FnMut(&[usize]) -> CostValue<S>,
    ) -> Result<Self, ModelError> {
        let count = tuple_count(alphabet.len(), radius)?;
        let k = alphabet.len();
        let costs = (0..count).map(|i| cost(&decode(i, k, radius + 1))).collect();
        Self::new(alphabet, radius, objective, aggregation, costs)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn label(&self, id: usize) -> &str {
        &self.alphabet[id]
    }

    pub fn label_id(&self, label: &str) -> Option<usize> {
        self.alphabet.iter().position(|l| l == label)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Window width, `radius + 1`.
    pub fn arity(&self) -> usize {
        self.radius + 1
    }

    /// `|labels|^(radius+1)`, the tuple count before pruning.
    pub fn gamma(&self) -> usize {
        self.costs.len()
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }

    pub fn is_sum(&self) -> bool {
        self.aggregation == Aggregation::Sum
    }

    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity());
        tuple.iter().fold(0, |acc, &l| acc * self.alphabet.len() + l)
    }

    pub fn tuple_of(&self, index: usize) -> Vec<usize> {
        decode(index, self.alphabet.len(), self.arity())
    }

    pub fn cost_at(&self, index: usize) -> &CostValue<S> {
        &self.costs[index]
    }

    pub fn costs(&self) -> &[CostValue<S>] {
        &self.costs
    }

    pub fn cost_of_ids(&self, tuple: &[usize]) -> &CostValue<S> {
        &self.costs[self.tuple_index(tuple)]
    }

    /// Cost of a window given by label names.
    pub fn neighborhood_cost(&self, tuple: &[&str]) -> Result<CostValue<S>, ModelError> {
        if tuple.len() != self.arity() {
            return Err(ModelError::Arity { expected: self.arity(), found: tuple.len() });
        }
        let ids = tuple
            .iter()
            .map(|l| self.label_id(l).ok_or_else(|| ModelError::UnknownLabel(l.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.cost_of_ids(&ids).clone())
    }

    /// Renders label ids compactly: concatenated when every label is a single
    /// character, space separated otherwise.
    pub fn format_labels(&self, ids: &[usize]) -> String {
        let sep = if self.alphabet.iter().all(|l| l.chars().count() == 1) { "" } else { " " };
        ids.iter().map(|&i| self.alphabet[i].as_str()).collect::<Vec<_>>().join(sep)
    }

    /// Inverse of [`Self::format_labels`]; also accepts whitespace separated input.
    pub fn parse_labels(&self, text: &str) -> Result<Vec<usize>, ModelError> {
        let tokens: Vec<&str> = if text.split_whitespace().count() > 1
            || self.alphabet.iter().any(|l| l.chars().count() != 1)
        {
            text.split_whitespace().collect()
        } else {
            let t = text.trim();
            t.char_indices().map(|(i, c)| &t[i..i + c.len_utf8()]).collect()
        };
        tokens
            .into_iter()
            .map(|l| self.label_id(l).ok_or_else(|| ModelError::UnknownLabel(l.to_string())))
            .collect()
    }

    /// Canonical problem-file text; re-parses to an equal problem.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("alphabet: {}\n", self.alphabet.join(" ")));
        out.push_str(&format!("radius: {}\n", self.radius));
        out.push_str(&format!("objective: {}\n", self.objective));
        out.push_str(&format!("aggregation: {}\n", self.aggregation));
        for (i, c) in self.costs.iter().enumerate() {
            let labels: Vec<&str> = self.tuple_of(i).iter().map(|&l| self.label(l)).collect();
            out.push_str(&format!("cost {} = {}\n", labels.join(" "), c));
        }
        out
    }

    /// Parses the line-oriented problem format.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_problem(text)
    }
}

fn check_combination(objective: Objective, aggregation: Aggregation) -> Result<(), ModelError> {
    match (objective, aggregation) {
        (Objective::Min, Aggregation::Min) | (Objective::Max, Aggregation::Max) => {
            Err(ModelError::UnsupportedCombination(objective, aggregation))
        }
        _ => Ok(()),
    }
}

fn tuple_count(k: usize, radius: usize) -> Result<usize, ModelError> {
    let mut count: u128 = 1;
    for _ in 0..=radius {
        count = count.saturating_mul(k as u128);
        if count > MAX_TUPLES as u128 {
            return Err(ModelError::TooLarge(count));
        }
    }
    Ok(count as usize)
}

fn decode(mut index: usize, k: usize, arity: usize) -> Vec<usize> {
    let mut tuple = vec![0; arity];
    for slot in tuple.iter_mut().rev() {
        *slot = index % k;
        index /= k;
    }
    tuple
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Rational(#[from] crate::scalar::RationalError),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("`{0}` given more than once")]
    DuplicateKey(String),
    #[error("missing `{0}`")]
    MissingKey(&'static str),
    #[error("tuple `{0}` listed more than once")]
    DuplicateTuple(String),
    #[error("no cost for tuple `{0}` and no default")]
    MissingTuple(String),
}

/// A parse failure, with the 1-based line it refers to when there is one.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: Option<usize>,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

fn at(line: usize, kind: impl Into<ParseErrorKind>) -> ParseError {
    ParseError { line: Some(line), kind: kind.into() }
}

fn parse_cost<S: Scalar>(text: &str) -> Result<CostValue<S>, ParseErrorKind> {
    if text.trim() == "bot" {
        return Ok(CostValue::Bot);
    }
    let value: S = parse_rational(text)?;
    if value.is_negative() {
        return Err(ModelError::NegativeCost(text.trim().to_string()).into());
    }
    Ok(CostValue::Finite(value))
}

fn parse_problem<S: Scalar>(text: &str) -> Result<OptLcl<S>, ParseError> {
    let mut alphabet: Option<(usize, Vec<String>)> = None;
    let mut radius: Option<(usize, usize)> = None;
    let mut objective: Option<(usize, Objective)> = None;
    let mut aggregation: Option<(usize, Aggregation)> = None;
    let mut default: Option<(usize, CostValue<S>)> = None;
    let mut entries: Vec<(usize, Vec<String>, CostValue<S>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("cost ") {
            let (tuple, value) = rest
                .split_once('=')
                .ok_or_else(|| at(line_no, ParseErrorKind::Syntax("expected `=` in cost line".into())))?;
            let labels: Vec<String> = tuple.split_whitespace().map(str::to_string).collect();
            let value = parse_cost(value).map_err(|k| at(line_no, k))?;
            entries.push((line_no, labels, value));
            continue;
        }
        if let Some(rest) = line.strip_prefix("default") {
            let value = rest
                .trim_start()
                .strip_prefix('=')
                .ok_or_else(|| at(line_no, ParseErrorKind::Syntax("expected `default = <value>`".into())))?;
            if default.is_some() {
                return Err(at(line_no, ParseErrorKind::DuplicateKey("default".into())));
            }
            default = Some((line_no, parse_cost(value).map_err(|k| at(line_no, k))?));
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| at(line_no, ParseErrorKind::Syntax(format!("unrecognized line `{line}`"))))?;
        let value = value.trim();
        let dup = |present: bool, name: &str| {
            if present {
                Err(at(line_no, ParseErrorKind::DuplicateKey(name.into())))
            } else {
                Ok(())
            }
        };
        match key.trim() {
            "alphabet" => {
                dup(alphabet.is_some(), "alphabet")?;
                alphabet = Some((line_no, value.split_whitespace().map(str::to_string).collect()));
            }
            "radius" => {
                dup(radius.is_some(), "radius")?;
                let r = value
                    .parse()
                    .map_err(|_| at(line_no, ParseErrorKind::Syntax(format!("bad radius `{value}`"))))?;
                radius = Some((line_no, r));
            }
            "objective" => {
                dup(objective.is_some(), "objective")?;
                let o = match value {
                    "min" => Objective::Min,
                    "max" => Objective::Max,
                    _ => return Err(at(line_no, ParseErrorKind::Syntax(format!("bad objective `{value}`")))),
                };
                objective = Some((line_no, o));
            }
            "aggregation" => {
                dup(aggregation.is_some(), "aggregation")?;
                let a = match value {
                    "sum" => Aggregation::Sum,
                    "min" => Aggregation::Min,
                    "max" => Aggregation::Max,
                    _ => return Err(at(line_no, ParseErrorKind::Syntax(format!("bad aggregation `{value}`")))),
                };
                aggregation = Some((line_no, a));
            }
            other => return Err(at(line_no, ParseErrorKind::Syntax(format!("unknown key `{other}`")))),
        }
    }

    let missing = |k| ParseError { line: None, kind: ParseErrorKind::MissingKey(k) };
    let (alpha_line, alphabet) = alphabet.ok_or_else(|| missing("alphabet"))?;
    let (radius_line, radius) = radius.ok_or_else(|| missing("radius"))?;
    let (obj_line, objective) = objective.ok_or_else(|| missing("objective"))?;
    let (_, aggregation) = aggregation.ok_or_else(|| missing("aggregation"))?;
    check_combination(objective, aggregation).map_err(|e| at(obj_line, e))?;
    if alphabet.is_empty() {
        return Err(at(alpha_line, ModelError::EmptyAlphabet));
    }
    let mut ids = HashMap::new();
    for (i, label) in alphabet.iter().enumerate() {
        if label == "bot" {
            return Err(at(alpha_line, ModelError::BadLabel(label.clone())));
        }
        if ids.insert(label.clone(), i).is_some() {
            return Err(at(alpha_line, ModelError::DuplicateLabel(label.clone())));
        }
    }
    let count = tuple_count(alphabet.len(), radius).map_err(|e| at(radius_line, e))?;
    let k = alphabet.len();
    let mut table: Vec<Option<CostValue<S>>> = vec![None; count];
    for (line_no, labels, value) in entries {
        if labels.len() != radius + 1 {
            return Err(at(line_no, ModelError::Arity { expected: radius + 1, found: labels.len() }));
        }
        let mut index = 0;
        for l in &labels {
            let id = *ids.get(l).ok_or_else(|| at(line_no, ModelError::UnknownLabel(l.clone())))?;
            index = index * k + id;
        }
        if table[index].is_some() {
            return Err(at(line_no, ParseErrorKind::DuplicateTuple(labels.join(" "))));
        }
        table[index] = Some(value);
    }
    let mut costs = Vec::with_capacity(count);
    for (i, slot) in table.into_iter().enumerate() {
        match (slot, &default) {
            (Some(c), _) => costs.push(c),
            (None, Some((_, d))) => costs.push(d.clone()),
            (None, None) => {
                let labels: Vec<&str> = decode(i, k, radius + 1).iter().map(|&l| alphabet[l].as_str()).collect();
                return Err(ParseError { line: None, kind: ParseErrorKind::MissingTuple(labels.join(" ")) });
            }
        }
    }
    OptLcl::new(alphabet, radius, objective, aggregation, costs).map_err(|e| ParseError { line: None, kind: e.into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    const MIS: &str = "\
# maximum independent set
alphabet: 0 1
radius: 1
objective: max
aggregation: sum
cost 0 0 = 0
cost 0 1 = 0
cost 1 0 = 1
cost 1 1 = bot
";

    #[test]
    fn parses_independent_set() {
        let p: OptLcl<R> = OptLcl::parse(MIS).unwrap();
        assert_eq!(p.gamma(), 4);
        assert_eq!(p.costs().iter().filter(|c| c.is_bot()).count(), 1);
        assert_eq!(p.neighborhood_cost(&["1", "0"]).unwrap(), CostValue::Finite(R::from_integer(1)));
        assert_eq!(p.neighborhood_cost(&["1", "1"]).unwrap(), CostValue::Bot);
        assert_eq!(p.objective(), Objective::Max);
        assert_eq!(p.aggregation(), Aggregation::Sum);
    }

    #[test]
    fn default_fills_unlisted_tuples() {
        let text = "alphabet: 0 1\nradius: 1\nobjective: min\naggregation: sum\ndefault = bot\ncost 0 1 = 1/2\ncost 1 0 = 0.5\ncost 1 1 = 2\n";
        let p: OptLcl<R> = OptLcl::parse(text).unwrap();
        assert_eq!(p.neighborhood_cost(&["0", "0"]).unwrap(), CostValue::Bot);
        assert_eq!(p.neighborhood_cost(&["1", "0"]).unwrap(), CostValue::Finite(R::new(1, 2)));
    }

    fn parse_err(text: &str) -> ParseError {
        OptLcl::<R>::parse(text).unwrap_err()
    }

    #[test]
    fn rejects_unsupported_combinations() {
        let e = parse_err("alphabet: 0\nradius: 0\nobjective: min\naggregation: min\ncost 0 = 1\n");
        assert!(matches!(e.kind, ParseErrorKind::Model(ModelError::UnsupportedCombination(..))));
        assert_eq!(e.line, Some(3));
        let e = parse_err("alphabet: 0\nradius: 0\nobjective: max\naggregation: max\ncost 0 = 1\n");
        assert!(matches!(e.kind, ParseErrorKind::Model(ModelError::UnsupportedCombination(..))));
    }

    #[test]
    fn error_paths_name_the_line() {
        let head = "alphabet: 0 1\nradius: 1\nobjective: min\naggregation: sum\n";
        let cases: Vec<(String, usize)> = vec![
            (format!("{head}cost 0 = 1\n"), 5),
            (format!("{head}cost 0 2 = 1\n"), 5),
            (format!("{head}default = 0\ncost 0 1 = -1\n"), 6),
            (format!("{head}default = 0\ncost 0 1 = 1/x\n"), 6),
            (format!("{head}default = 0\ncost 0 1 = 1\ncost 0 1 = 2\n"), 7),
            ("alphabet: 0 0\nradius: 1\nobjective: min\naggregation: sum\ndefault = 0\n".to_string(), 1),
            (format!("{head}default = 0\nfoo: 1\n"), 6),
        ];
        for (text, line) in cases {
            let e = parse_err(&text);
            assert_eq!(e.line, Some(line), "{text}: {e}");
            assert!(e.to_string().starts_with(&format!("line {line}:")));
        }
    }

    #[test]
    fn missing_tuple_without_default() {
        let e = parse_err("alphabet: 0 1\nradius: 1\nobjective: min\naggregation: sum\ncost 0 0 = 1\n");
        assert!(matches!(e.kind, ParseErrorKind::MissingTuple(_)));
        let e = parse_err("alphabet: 0 1\nobjective: min\naggregation: sum\n");
        assert_eq!(e.kind, ParseErrorKind::MissingKey("radius"));
    }

    #[test]
    fn text_round_trip() {
        let p: OptLcl<R> = OptLcl::parse(MIS).unwrap();
        let again: OptLcl<R> = OptLcl::parse(&p.to_text()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn tuple_indexing_is_node_first() {
        let p: OptLcl<R> = OptLcl::parse(MIS).unwrap();
        assert_eq!(p.tuple_index(&[1, 0]), 2);
        assert_eq!(p.tuple_of(1), vec![0, 1]);
        assert_eq!(p.neighborhood_cost(&["1"]), Err(ModelError::Arity { expected: 2, found: 1 }));
        assert_eq!(p.neighborhood_cost(&["1", "x"]), Err(ModelError::UnknownLabel("x".into())));
    }

    #[test]
    fn label_formatting() {
        let p: OptLcl<R> = OptLcl::parse(MIS).unwrap();
        assert_eq!(p.format_labels(&[1, 0, 1]), "101");
        assert_eq!(p.parse_labels("101").unwrap(), vec![1, 0, 1]);
        assert_eq!(p.parse_labels("1 0 1").unwrap(), vec![1, 0, 1]);
    }
}
