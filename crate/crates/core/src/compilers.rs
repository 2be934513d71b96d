//! Circuit generators with audited worst-case energy.
//!
//! Two compilers turn decision trees into circuits: [`compile_linear`]
//! activates at most `vars + 2*depth - 2` inner gates, and
//! [`compile_quadratic`] re-encodes the evaluation path through per-level
//! branch variables to activate at most `depth^2/2 + 5*depth/2 - 2`.
//! [`build_or_sqrt`] computes the n-way disjunction within `4*ceil(sqrt(n)) + 4`
//! energy, and [`build_addr`] / [`build_eaddr`] realize the address selectors
//! within `3n` and `6n + 2`.

use std::fmt;

use thiserror::Error;

use crate::boolfn::{self, BoolFnError, TruthTable};
use crate::circuit::{Circuit, CircuitBuilder, CircuitError, EnergyMode, Gate, GateId};
use crate::dtree::{DecisionTree, DtreeError};

/// Cap on the level-variable compiler's input arity.
pub const QUADRATIC_CAP: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("one-hot or-gadget needs at least one source")]
    EmptyGadget,
    #[error("{requested} total variables exceed the cap of {cap}")]
    SizeCap { requested: usize, cap: usize },
    #[error("decision tree queries variable {var}, but the circuit has {num_vars} inputs")]
    TreeVarOutOfRange { var: usize, num_vars: usize },
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
    #[error(transparent)]
    Dtree(#[from] DtreeError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Gate counts and an exhaustive energy audit against a claimed bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileStats {
    pub gates_total: usize,
    pub not_gates: usize,
    /// Exhaustive worst-case energy, when the sweep is feasible.
    pub measured_energy: Option<usize>,
    pub bound_claimed: usize,
    pub bound_satisfied: Option<bool>,
}

impl CompileStats {
    pub fn audit(circuit: &Circuit, bound_claimed: usize) -> Self {
        let measured = circuit
            .max_energy(EnergyMode::exhaustive())
            .ok()
            .map(|r| r.max_energy);
        CompileStats {
            gates_total: circuit.inner_gate_count(),
            not_gates: circuit.count_not_gates(),
            measured_energy: measured,
            bound_claimed,
            bound_satisfied: measured.map(|e| e <= bound_claimed),
        }
    }
}

impl fmt::Display for CompileStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gates_total={} not_gates={} measured_energy={} bound_claimed={} bound_satisfied={}",
            self.gates_total,
            self.not_gates,
            self.measured_energy
                .map_or_else(|| "none".to_string(), |e| e.to_string()),
            self.bound_claimed,
            self.bound_satisfied
                .map_or_else(|| "none".to_string(), |b| b.to_string()),
        )
    }
}

/// Energy bound claimed by [`compile_linear`] for a tree over `vars_used`
/// distinct variables with the given depth.
pub fn linear_energy_bound(vars_used: usize, depth: usize) -> usize {
    (vars_used + 2 * depth).saturating_sub(2)
}

/// Energy bound claimed by [`compile_quadratic`] for decision tree depth `d`.
pub fn quadratic_energy_bound(d: usize) -> usize {
    if d == 0 {
        0
    } else {
        (d * d + 5 * d - 4) / 2
    }
}

/// Bounds claimed by [`build_or_sqrt`]: measured energy lies in
/// `[floor(sqrt(n)), 4*ceil(sqrt(n)) + 4]`.
pub fn or_sqrt_energy_bounds(n: usize) -> (usize, usize) {
    (n.isqrt(), 4 * ceil_sqrt(n) + 4)
}

pub fn addr_energy_bound(n: usize) -> usize {
    3 * n
}

pub fn eaddr_energy_bound(n: usize) -> usize {
    6 * n + 2
}

fn ceil_sqrt(n: usize) -> usize {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Balanced disjunction over `sources`, `m - 1` or-gates in total.
///
/// Under the promise that at most one source is active, the activated gadget
/// gates form the root-to-source path, so at most `ceil(log2 m)` of them
/// fire. A single source is returned as a bare wire.
pub fn or_gadget_onehot(
    builder: &mut CircuitBuilder,
    sources: &[GateId],
) -> Result<GateId, CompileError> {
    if sources.is_empty() {
        return Err(CompileError::EmptyGadget);
    }
    Ok(or_tree(builder, sources))
}

fn or_tree(builder: &mut CircuitBuilder, sources: &[GateId]) -> GateId {
    if sources.len() == 1 {
        return sources[0];
    }
    let mid = sources.len().div_ceil(2);
    let left = or_tree(builder, &sources[..mid]);
    let right = or_tree(builder, &sources[mid..]);
    builder.or(left, right)
}

/// Instrumented output of [`compile_linear`].
#[derive(Debug, Clone)]
pub struct LinearArtifacts {
    pub circuit: Circuit,
    /// Gate standing for each tree node that received one, keyed by the
    /// branch path from the root (false = low).
    pub node_gates: Vec<(Vec<bool>, GateId)>,
    /// Gate pairs of sibling nodes that both received gates; at most one of
    /// each pair can be active under any input.
    pub sibling_pairs: Vec<(GateId, GateId)>,
    /// Gates feeding the one-hot output disjunction, one per 1-leaf.
    pub or_sources: Vec<GateId>,
    /// The shared negation gate of each variable that needed one.
    pub not_gates: Vec<(usize, GateId)>,
}

/// Compiles a decision tree gate-for-node: each non-root node that is not a
/// 0-leaf gets a conjunction of its parent's gate with the branch literal,
/// the root's children collapse into the bare literal, and the 1-leaf gates
/// are combined by a one-hot disjunction. A negation gate is created per
/// variable, shared, and only when some low branch actually needs it.
///
/// Any tree compiles to the right function; the
/// [`linear_energy_bound`] guarantee presumes a simplified tree.
pub fn compile_linear(tree: &DecisionTree, num_vars: usize) -> Result<Circuit, CompileError> {
    Ok(compile_linear_artifacts(tree, num_vars)?.circuit)
}

pub fn compile_linear_artifacts(
    tree: &DecisionTree,
    num_vars: usize,
) -> Result<LinearArtifacts, CompileError> {
    if let Some(max) = tree.max_var() {
        if max >= num_vars {
            return Err(CompileError::TreeVarOutOfRange { var: max, num_vars });
        }
    }

    let mut builder = CircuitBuilder::new(num_vars);
    if let DecisionTree::Leaf(v) = tree {
        let g = builder.constant(*v);
        return Ok(LinearArtifacts {
            circuit: builder.finish(g),
            node_gates: Vec::new(),
            sibling_pairs: Vec::new(),
            or_sources: Vec::new(),
            not_gates: Vec::new(),
        });
    }

    struct Ctx {
        builder: CircuitBuilder,
        inputs: Vec<Option<GateId>>,
        nots: Vec<Option<GateId>>,
        node_gates: Vec<(Vec<bool>, GateId)>,
        sibling_pairs: Vec<(GateId, GateId)>,
        or_sources: Vec<GateId>,
    }

    impl Ctx {
        fn input(&mut self, var: usize) -> GateId {
            *self.inputs[var].get_or_insert_with(|| self.builder.input(var))
        }

        fn negated(&mut self, var: usize) -> GateId {
            if let Some(g) = self.nots[var] {
                return g;
            }
            let input = self.input(var);
            let g = self.builder.not(input);
            self.nots[var] = Some(g);
            g
        }

        /// Gate for a child reached over `branch`; `parent_gate` is `None`
        /// exactly for the root's children, which collapse into the literal.
        fn child_gate(&mut self, var: usize, branch: bool, parent_gate: Option<GateId>) -> GateId {
            let literal = if branch { self.input(var) } else { self.negated(var) };
            match parent_gate {
                None => literal,
                Some(p) => self.builder.and(p, literal),
            }
        }

        fn walk(&mut self, node: &DecisionTree, gate: Option<GateId>, path: &mut Vec<bool>) {
            match node {
                DecisionTree::Leaf(false) => {}
                DecisionTree::Leaf(true) => {
                    self.or_sources.push(gate.expect("1-leaves below the root have gates"));
                }
                DecisionTree::Query { var, low, high } => {
                    let low_gate = if matches!(**low, DecisionTree::Leaf(false)) {
                        None
                    } else {
                        Some(self.child_gate(*var, false, gate))
                    };
                    let high_gate = if matches!(**high, DecisionTree::Leaf(false)) {
                        None
                    } else {
                        Some(self.child_gate(*var, true, gate))
                    };
                    if let (Some(l), Some(h)) = (low_gate, high_gate) {
                        self.sibling_pairs.push((l, h));
                    }
                    for (branch, child_gate) in [(false, low_gate), (true, high_gate)] {
                        if let Some(g) = child_gate {
                            path.push(branch);
                            self.node_gates.push((path.clone(), g));
                            path.pop();
                        }
                    }
                    path.push(false);
                    self.walk(low, low_gate, path);
                    path.pop();
                    path.push(true);
                    self.walk(high, high_gate, path);
                    path.pop();
                }
            }
        }
    }

    let mut ctx = Ctx {
        builder,
        inputs: vec![None; num_vars],
        nots: vec![None; num_vars],
        node_gates: Vec::new(),
        sibling_pairs: Vec::new(),
        or_sources: Vec::new(),
    };
    ctx.walk(tree, None, &mut Vec::new());

    let Ctx { mut builder, nots, node_gates, sibling_pairs, or_sources, .. } = ctx;
    let output = if or_sources.is_empty() {
        builder.constant(false)
    } else {
        or_gadget_onehot(&mut builder, &or_sources)?
    };
    let not_gates = nots
        .iter()
        .enumerate()
        .filter_map(|(v, g)| g.map(|g| (v, g)))
        .collect();
    Ok(LinearArtifacts {
        circuit: builder.finish(output),
        node_gates,
        sibling_pairs,
        or_sources,
        not_gates,
    })
}

/// Instrumented output of [`compile_quadratic`].
#[derive(Debug, Clone)]
pub struct QuadraticArtifacts {
    pub circuit: Circuit,
    /// Per level, the gates of the path-selector products; at most one per
    /// level is active under any input. Level 1 holds the root literal and
    /// its negation.
    pub selector_levels: Vec<Vec<GateId>>,
    pub depth: usize,
}

/// Compiles `f` through its optimal decision tree, re-encoding the
/// evaluation path with one branch variable per level. Selector products
/// pick the unique path prefix, so each level contributes at most one
/// activated product; the branch variables are shared across the level, and
/// the output disjunction switches to the complemented leaf set whenever
/// that side is smaller.
pub fn compile_quadratic(f: &TruthTable) -> Result<Circuit, CompileError> {
    Ok(compile_quadratic_artifacts(f)?.circuit)
}

pub fn compile_quadratic_artifacts(f: &TruthTable) -> Result<QuadraticArtifacts, CompileError> {
    let n = f.num_vars();
    if n > QUADRATIC_CAP {
        return Err(CompileError::SizeCap { requested: n, cap: QUADRATIC_CAP });
    }
    if let Some(v) = f.is_constant() {
        let mut b = CircuitBuilder::new(n);
        let g = b.constant(v);
        return Ok(QuadraticArtifacts {
            circuit: b.finish(g),
            selector_levels: Vec::new(),
            depth: 0,
        });
    }

    let (d, tree) = boolfn::decision_tree_complexity(f)?;
    let tree = tree.pad_to_uniform_depth(d)?;
    let mut b = CircuitBuilder::new(n);

    // The variable queried at depth `k` on branch path `z` (most significant
    // bit of `z` = first branch).
    let label_at = |z: usize, k: usize| -> usize {
        let mut node = &tree;
        for i in (0..k).rev() {
            let DecisionTree::Query { low, high, .. } = node else {
                unreachable!("padded tree is uniform");
            };
            node = if z >> i & 1 == 1 { high } else { low };
        }
        match node {
            DecisionTree::Query { var, .. } => *var,
            DecisionTree::Leaf(_) => unreachable!("padded tree is uniform"),
        }
    };
    let leaf_at = |z: usize| -> bool {
        let mut node = &tree;
        for i in (0..d).rev() {
            let DecisionTree::Query { low, high, .. } = node else {
                unreachable!("padded tree is uniform");
            };
            node = if z >> i & 1 == 1 { high } else { low };
        }
        match node {
            DecisionTree::Leaf(v) => *v,
            DecisionTree::Query { .. } => unreachable!("padded tree is uniform"),
        }
    };

    let root_var = label_at(0, 0);
    let y1 = b.input(root_var);
    let mut inputs: Vec<Option<GateId>> = vec![None; n];
    inputs[root_var] = Some(y1);
    let mut selector_levels: Vec<Vec<GateId>> = Vec::new();

    let output = if d == 1 {
        // A single query; the unique 1-leaf picks the literal directly.
        if leaf_at(1) {
            selector_levels.push(vec![y1]);
            y1
        } else {
            let ny1 = b.not(y1);
            selector_levels.push(vec![ny1]);
            ny1
        }
    } else {
        let ny1 = b.not(y1);
        selector_levels.push(vec![ny1, y1]);
        let mut selectors = vec![ny1, y1];
        let mut output = None;
        for k in 1..d {
            // Next branch variable: one-hot disjunction of (path selector
            // AND queried variable) over the 2^k depth-k nodes.
            let terms: Vec<GateId> = (0..1usize << k)
                .map(|z| {
                    let var = label_at(z, k);
                    let x = *inputs[var].get_or_insert_with(|| b.input(var));
                    b.and(selectors[z], x)
                })
                .collect();
            let y = or_gadget_onehot(&mut b, &terms)?;
            if k == d - 1 {
                // Final selector row: build products only for the smaller
                // leaf side and complement the disjunction if needed.
                let ones: Vec<usize> = (0..1usize << d).filter(|&z| leaf_at(z)).collect();
                let complement = ones.len() > 1 << (d - 1);
                let set: Vec<usize> = if complement {
                    (0..1usize << d).filter(|&z| !leaf_at(z)).collect()
                } else {
                    ones
                };
                let mut ny = None;
                let prods: Vec<GateId> = set
                    .iter()
                    .map(|&z| {
                        let lit =
                            if z & 1 == 1 { y } else { *ny.get_or_insert_with(|| b.not(y)) };
                        b.and(selectors[z >> 1], lit)
                    })
                    .collect();
                selector_levels.push(prods.clone());
                let disj = or_gadget_onehot(&mut b, &prods)?;
                output = Some(if complement { b.not(disj) } else { disj });
            } else {
                let ny = b.not(y);
                let next: Vec<GateId> = (0..1usize << (k + 1))
                    .map(|z| {
                        let lit = if z & 1 == 1 { y } else { ny };
                        b.and(selectors[z >> 1], lit)
                    })
                    .collect();
                selector_levels.push(next.clone());
                selectors = next;
            }
        }
        output.expect("the final level sets the output when d >= 2")
    };

    let circuit = b.finish(output);
    let (circuit, map) = circuit.prune_uncovered_with_map();
    let selector_levels = selector_levels
        .into_iter()
        .map(|level| level.into_iter().filter_map(|g| map[g]).collect())
        .collect();
    Ok(QuadraticArtifacts { circuit, selector_levels, depth: d })
}

/// Instrumented output of [`build_or_sqrt`].
#[derive(Debug, Clone)]
pub struct OrSqrtArtifacts {
    pub circuit: Circuit,
    /// The block-switch negations; under the all-zero input these are
    /// exactly the activated gates.
    pub switch_nots: Vec<GateId>,
    pub block_count: usize,
}

/// The n-way disjunction in blocks of `ceil(sqrt(n))` variables. Each block
/// is gated by the negation of everything before it, so a 1 anywhere
/// switches off all later blocks and the worst-case energy stays within
/// `4*ceil(sqrt(n)) + 4`.
pub fn build_or_sqrt(n: usize) -> Circuit {
    build_or_sqrt_artifacts(n).circuit
}

pub fn build_or_sqrt_artifacts(n: usize) -> OrSqrtArtifacts {
    assert!(n >= 1, "the disjunction needs at least one variable");
    let block = ceil_sqrt(n);
    let block_count = n.div_ceil(block);
    let mut b = CircuitBuilder::new(n);
    let inputs: Vec<GateId> = (0..n).map(|v| b.input(v)).collect();

    let first: Vec<GateId> = inputs[..block.min(n)].to_vec();
    let mut acc = or_tree(&mut b, &first);
    let mut switch_nots = Vec::new();
    for i in 1..block_count {
        let switch = b.not(acc);
        switch_nots.push(switch);
        let lo = i * block;
        let hi = ((i + 1) * block).min(n);
        let gated: Vec<GateId> = (lo..hi).map(|v| b.and(inputs[v], switch)).collect();
        let block_or = or_tree(&mut b, &gated);
        acc = b.or(acc, block_or);
    }
    OrSqrtArtifacts { circuit: b.finish(acc), switch_nots, block_count }
}

/// The depth-(n+1) tree that queries the n selector variables and then the
/// addressed cell. Cell `j` lives at variable `n + j`.
pub fn natural_addr_tree(n: usize) -> DecisionTree {
    fn build(n: usize, level: usize, address: usize) -> DecisionTree {
        if level == n {
            return DecisionTree::query(
                n + address,
                DecisionTree::Leaf(false),
                DecisionTree::Leaf(true),
            );
        }
        DecisionTree::query(
            level,
            build(n, level + 1, address),
            build(n, level + 1, address | (1 << (n - 1 - level))),
        )
    }
    build(n, 0, 0)
}

/// Compiles the natural selector tree with [`compile_linear`]. The lazy
/// negation rule never creates not-gates on cell inputs (their low branches
/// are 0-leaves), which keeps the worst-case energy within `3n`.
pub fn build_addr(n: usize) -> Result<Circuit, CompileError> {
    let vars = n + (1usize << n);
    if vars > TruthTable::MAX_VARS {
        return Err(CompileError::SizeCap { requested: vars, cap: TruthTable::MAX_VARS });
    }
    compile_linear(&natural_addr_tree(n), vars)
}

/// Instrumented output of [`build_eaddr`].
#[derive(Debug, Clone)]
pub struct EaddrArtifacts {
    /// The combined circuit: `not(negated_copy) or direct_copy`.
    pub circuit: Circuit,
    /// Standalone selector copy whose output feeds the negation; cells whose
    /// address satisfies the selector function are forced to constant 1.
    pub negated_copy: Circuit,
    /// Standalone selector copy feeding the disjunction directly; cells
    /// whose address falsifies the selector function are forced to
    /// constant 0.
    pub direct_copy: Circuit,
}

/// Builds the extended selector from two address-circuit copies sharing the
/// selector inputs, with cells replaced by constants according to `g`, and a
/// final negation + disjunction pair. Worst-case energy is within the sum of
/// the copies' energies plus 2, hence within `6n + 2`.
pub fn build_eaddr(n: usize, g: &TruthTable) -> Result<Circuit, CompileError> {
    Ok(build_eaddr_artifacts(n, g)?.circuit)
}

pub fn build_eaddr_artifacts(n: usize, g: &TruthTable) -> Result<EaddrArtifacts, CompileError> {
    let vars = n + (1usize << n);
    if vars > TruthTable::MAX_VARS {
        return Err(CompileError::SizeCap { requested: vars, cap: TruthTable::MAX_VARS });
    }
    if g.num_vars() != n {
        return Err(CompileError::BoolFn(BoolFnError::SelectorArity {
            expected: n,
            got: g.num_vars(),
        }));
    }
    let template = compile_linear(&natural_addr_tree(n), vars)?;

    // Cell j is selected by the address assignment whose table index is the
    // bit-reversal of j.
    let selector_at_cell = |j: usize| g.get(boolfn::address_of(j, n));
    let negated_subst = |var: usize| -> Option<bool> {
        if var >= n && selector_at_cell(var - n) {
            Some(true)
        } else {
            None
        }
    };
    let direct_subst = |var: usize| -> Option<bool> {
        if var >= n && !selector_at_cell(var - n) {
            Some(false)
        } else {
            None
        }
    };

    let standalone = |subst: &dyn Fn(usize) -> Option<bool>| -> Circuit {
        let mut b = CircuitBuilder::new(vars);
        let out = instantiate(&mut b, &template, &mut |builder, var| match subst(var) {
            Some(c) => builder.constant(c),
            None => builder.input(var),
        });
        b.finish(out)
    };
    let negated_copy = standalone(&negated_subst);
    let direct_copy = standalone(&direct_subst);

    let mut b = CircuitBuilder::new(vars);
    let shared: Vec<GateId> = (0..n).map(|v| b.input(v)).collect();
    let with_shared = |subst: &dyn Fn(usize) -> Option<bool>,
                           b: &mut CircuitBuilder|
     -> GateId {
        instantiate(b, &template, &mut |builder, var| {
            if var < n {
                shared[var]
            } else {
                match subst(var) {
                    Some(c) => builder.constant(c),
                    None => builder.input(var),
                }
            }
        })
    };
    let out0 = with_shared(&negated_subst, &mut b);
    let out1 = with_shared(&direct_subst, &mut b);
    let flipped = b.not(out0);
    let output = b.or(flipped, out1);
    Ok(EaddrArtifacts { circuit: b.finish(output), negated_copy, direct_copy })
}

/// Replays `template` into `builder`, mapping each input gate through
/// `leaf`. Returns the copied output gate.
fn instantiate(
    builder: &mut CircuitBuilder,
    template: &Circuit,
    leaf: &mut dyn FnMut(&mut CircuitBuilder, usize) -> GateId,
) -> GateId {
    let mut map: Vec<GateId> = Vec::with_capacity(template.len());
    for gate in template.gates() {
        let new = match *gate {
            Gate::Input(v) => leaf(builder, v),
            Gate::Const(c) => builder.constant(c),
            Gate::And(a, b) => builder.and(map[a], map[b]),
            Gate::Or(a, b) => builder.or(map[a], map[b]),
            Gate::Not(a) => builder.not(map[a]),
        };
        map.push(new);
    }
    map[template.output()]
}
