//! Decision trees: evaluation, construction from query orders,
//! simplification, and depth padding.
//!
//! The low child is taken when the queried variable is 0. Proper query trees
//! never repeat a variable on a root-to-leaf path;
//! [`DecisionTree::pad_to_uniform_depth`] deliberately relaxes that by
//! inserting trivial queries whose branches are identical.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::boolfn::TruthTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DtreeError {
    #[error("query order misses dependent variable {0}")]
    MissingVariable(usize),
    #[error("query order repeats variable {0}")]
    DuplicateVariable(usize),
    #[error("variable {var} out of range for {num_vars} inputs")]
    VarOutOfRange { var: usize, num_vars: usize },
    #[error("tree depth {depth} exceeds the padding target {target}")]
    TargetTooSmall { depth: usize, target: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DtreeParseError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("trailing content after the tree")]
    TrailingContent,
}

/// A binary query tree; leaves carry the output bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DecisionTree {
    Leaf(bool),
    Query {
        var: usize,
        low: Box<DecisionTree>,
        high: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn query(var: usize, low: DecisionTree, high: DecisionTree) -> Self {
        DecisionTree::Query { var, low: Box::new(low), high: Box::new(high) }
    }

    pub fn evaluate(&self, input: &[bool]) -> bool {
        match self {
            DecisionTree::Leaf(v) => *v,
            DecisionTree::Query { var, low, high } => {
                if input[*var] {
                    high.evaluate(input)
                } else {
                    low.evaluate(input)
                }
            }
        }
    }

    /// Longest root-to-leaf query count.
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Query { low, high, .. } => 1 + low.depth().max(high.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Query { low, high, .. } => low.leaf_count() + high.leaf_count(),
        }
    }

    /// Largest variable index queried anywhere, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            DecisionTree::Leaf(_) => None,
            DecisionTree::Query { var, low, high } => {
                Some((*var).max(low.max_var().unwrap_or(0)).max(high.max_var().unwrap_or(0)))
            }
        }
    }

    /// True when no variable repeats on any root-to-leaf path. Proper query
    /// trees satisfy this; [`Self::pad_to_uniform_depth`] deliberately does
    /// not, since its padding queries are trivial.
    pub fn has_no_repeated_queries(&self) -> bool {
        fn walk(tree: &DecisionTree, seen: &mut Vec<usize>) -> bool {
            match tree {
                DecisionTree::Leaf(_) => true,
                DecisionTree::Query { var, low, high } => {
                    if seen.contains(var) {
                        return false;
                    }
                    seen.push(*var);
                    let ok = walk(low, seen) && walk(high, seen);
                    seen.pop();
                    ok
                }
            }
        }
        walk(self, &mut Vec::new())
    }

    /// The set of variables queried anywhere in the tree.
    pub fn vars(&self) -> std::collections::BTreeSet<usize> {
        fn collect(tree: &DecisionTree, out: &mut std::collections::BTreeSet<usize>) {
            if let DecisionTree::Query { var, low, high } = tree {
                out.insert(*var);
                collect(low, out);
                collect(high, out);
            }
        }
        let mut out = std::collections::BTreeSet::new();
        collect(self, &mut out);
        out
    }

    /// Collapses every query whose branches are structurally identical,
    /// bottom-up. After collapsing, identical branches coincide with equal
    /// residual subfunctions, so every surviving query is sensitive within
    /// its subtree. Idempotent; the computed function is unchanged.
    pub fn simplify(&self) -> DecisionTree {
        match self {
            DecisionTree::Leaf(v) => DecisionTree::Leaf(*v),
            DecisionTree::Query { var, low, high } => {
                let low = low.simplify();
                let high = high.simplify();
                if low == high {
                    low
                } else {
                    DecisionTree::query(*var, low, high)
                }
            }
        }
    }

    /// Extends every leaf with trivial queries on variable 0 until all
    /// leaves sit at exactly `target` depth. The function is unchanged since
    /// both branches of a padding query are identical.
    pub fn pad_to_uniform_depth(&self, target: usize) -> Result<DecisionTree, DtreeError> {
        let depth = self.depth();
        if depth > target {
            return Err(DtreeError::TargetTooSmall { depth, target });
        }
        fn pad(tree: &DecisionTree, remaining: usize) -> DecisionTree {
            match tree {
                DecisionTree::Leaf(v) => {
                    let mut t = DecisionTree::Leaf(*v);
                    for _ in 0..remaining {
                        t = DecisionTree::query(0, t.clone(), t);
                    }
                    t
                }
                DecisionTree::Query { var, low, high } => DecisionTree::query(
                    *var,
                    pad(low, remaining - 1),
                    pad(high, remaining - 1),
                ),
            }
        }
        Ok(pad(self, target))
    }
}

/// Builds the complete tree that queries `order` on every path, with leaves
/// labeled by `f`. The order must cover every dependent variable of `f`; any
/// variables outside the order are irrelevant by then and the residual
/// function is constant at each leaf.
pub fn full_tree_from_order(
    f: &TruthTable,
    order: &[usize],
) -> Result<DecisionTree, DtreeError> {
    let mut seen = vec![false; f.num_vars()];
    for &v in order {
        if v >= f.num_vars() {
            return Err(DtreeError::VarOutOfRange { var: v, num_vars: f.num_vars() });
        }
        if seen[v] {
            return Err(DtreeError::DuplicateVariable(v));
        }
        seen[v] = true;
    }
    if let Some(&v) = f.dependent_vars().iter().find(|&&v| !seen[v]) {
        return Err(DtreeError::MissingVariable(v));
    }

    fn build(f: &TruthTable, order: &[usize], fixed: usize) -> DecisionTree {
        match order.split_first() {
            None => DecisionTree::Leaf(f.get(fixed)),
            Some((&v, rest)) => DecisionTree::query(
                v,
                build(f, rest, fixed),
                build(f, rest, fixed | (1 << v)),
            ),
        }
    }
    Ok(build(f, order, 0))
}

impl fmt::Display for DecisionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionTree::Leaf(v) => write!(f, "{}", *v as u8),
            DecisionTree::Query { var, low, high } => write!(f, "(x{var} {low} {high})"),
        }
    }
}

impl FromStr for DecisionTree {
    type Err = DtreeParseError;

    fn from_str(s: &str) -> Result<Self, DtreeParseError> {
        let mut tokens = Vec::new();
        let mut cur = String::new();
        for ch in s.chars() {
            match ch {
                '(' | ')' => {
                    if !cur.is_empty() {
                        tokens.push(std::mem::take(&mut cur));
                    }
                    tokens.push(ch.to_string());
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        tokens.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            tokens.push(cur);
        }

        fn parse(tokens: &[String], pos: &mut usize) -> Result<DecisionTree, DtreeParseError> {
            let tok = tokens.get(*pos).ok_or(DtreeParseError::UnexpectedEnd)?;
            *pos += 1;
            match tok.as_str() {
                "0" => Ok(DecisionTree::Leaf(false)),
                "1" => Ok(DecisionTree::Leaf(true)),
                "(" => {
                    let head = tokens.get(*pos).ok_or(DtreeParseError::UnexpectedEnd)?;
                    *pos += 1;
                    let var = head
                        .strip_prefix('x')
                        .and_then(|d| d.parse::<usize>().ok())
                        .ok_or_else(|| DtreeParseError::UnexpectedToken(head.clone()))?;
                    let low = parse(tokens, pos)?;
                    let high = parse(tokens, pos)?;
                    match tokens.get(*pos).map(String::as_str) {
                        Some(")") => {
                            *pos += 1;
                            Ok(DecisionTree::query(var, low, high))
                        }
                        Some(other) => Err(DtreeParseError::UnexpectedToken(other.to_string())),
                        None => Err(DtreeParseError::UnexpectedEnd),
                    }
                }
                other => Err(DtreeParseError::UnexpectedToken(other.to_string())),
            }
        }

        let mut pos = 0;
        let tree = parse(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(DtreeParseError::TrailingContent);
        }
        Ok(tree)
    }
}
