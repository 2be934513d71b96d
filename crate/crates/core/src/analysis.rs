//! Lower-bound machinery: an exact-energy search oracle, inequality
//! verifiers, the negation-driven circuit-to-tree analyzer, and sensitive
//! flip paths.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::boolfn::{self, BoolFnError, TruthTable};
use crate::circuit::{Circuit, CircuitBuilder, CircuitError, EnergyMode, Gate, GateId};
use crate::dtree::{self, DecisionTree, DtreeError};

/// Cap on the circuit-to-tree analyzer's input arity.
pub const CIRCUIT_TO_TREE_CAP: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("the exact-energy oracle supports at most {cap} variables, got {requested}")]
    OracleVars { requested: usize, cap: usize },
    #[error("max_gates {requested} exceeds the oracle cap of {cap}")]
    OracleGates { requested: usize, cap: usize },
    #[error("oracle state budget of {0} states exceeded")]
    StateBudget(usize),
    #[error("the circuit is not monotone ({0} not-gates)")]
    NotMonotone(usize),
    #[error("circuit-to-tree analysis supports at most {cap} variables, got {requested}")]
    TreeCap { requested: usize, cap: usize },
    #[error("the input is not sensitive to variable {0}")]
    NotSensitive(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
    #[error(transparent)]
    Dtree(#[from] DtreeError),
}

/// Smallest `t` with `4^t >= m`, i.e. `ceil(log2(m) / 2)`.
pub fn half_log2_ceil(m: usize) -> usize {
    let mut t = 0;
    let mut pow = 1usize;
    while pow < m {
        pow *= 4;
        t += 1;
    }
    t
}

/// True when `f` is computable with zero inner gates: a constant or a bare
/// input wire. Such functions have energy complexity 0, so the fractional
/// lower bounds (which presume at least one gate) do not apply to them.
pub fn wire_realizable(f: &TruthTable) -> bool {
    if f.is_constant().is_some() {
        return true;
    }
    (0..f.num_vars()).any(|v| (0..f.size()).all(|k| f.get(k) == (k >> v & 1 == 1)))
}

/// The aggregate lower bound `max(ceil(psens/3), ceil(log2(m)/2))`, where
/// `m` counts the dependent variables; 0 for wire-realizable functions.
pub fn lower_bound_aggregate(f: &TruthTable) -> usize {
    if wire_realizable(f) {
        return 0;
    }
    let psens = boolfn::positive_sensitivity(f);
    let m = f.dependent_vars().len();
    psens.div_ceil(3).max(half_log2_ceil(m))
}

/// Resource caps for [`brute_force_ec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vars: usize,
    pub max_gates: usize,
    /// Abort once this many distinct states have been enumerated.
    pub state_budget: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_vars: 3, max_gates: 7, state_budget: 2_000_000 }
    }
}

/// Outcome of the exact-energy search.
///
/// `upper` is the least worst-case energy over every enumerated circuit that
/// computes the target, or `None` when no circuit within `max_gates` does.
/// `certified` holds exactly when the enumeration met the aggregate lower
/// bound, in which case `upper` is the true energy complexity.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub lower: usize,
    pub upper: Option<usize>,
    pub certified: bool,
    pub witness_circuit: Option<Circuit>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Op {
    And,
    Or,
    Not,
}

struct StateRec {
    tts: Vec<u32>,
    parent: usize,
    step: Option<(Op, u32, u32, u32)>,
}

fn input_pattern(var: usize, size: usize) -> u32 {
    let mut p = 0u32;
    for k in 0..size {
        if k >> var & 1 == 1 {
            p |= 1 << k;
        }
    }
    p
}

fn tt_bits(f: &TruthTable) -> u32 {
    let mut p = 0u32;
    for k in 0..f.size() {
        if f.get(k) {
            p |= 1 << k;
        }
    }
    p
}

/// Searches all circuits with up to `max_gates` inner gates for the least
/// worst-case energy realization of `f`, under [`OracleLimits::default`].
///
/// States are canonicalized to the set of distinct gate functions present:
/// energy and computed function depend only on that set, and circuits with
/// duplicated or input-equal gate functions are dominated by smaller ones.
/// Extending a circuit never lowers its worst-case energy, so branches at or
/// above the best energy found are pruned.
pub fn brute_force_ec(f: &TruthTable, max_gates: usize) -> Result<OracleResult, AnalysisError> {
    brute_force_ec_with(f, max_gates, &OracleLimits::default())
}

pub fn brute_force_ec_with(
    f: &TruthTable,
    max_gates: usize,
    limits: &OracleLimits,
) -> Result<OracleResult, AnalysisError> {
    let n = f.num_vars();
    if n > limits.max_vars {
        return Err(AnalysisError::OracleVars { requested: n, cap: limits.max_vars });
    }
    if max_gates > limits.max_gates {
        return Err(AnalysisError::OracleGates { requested: max_gates, cap: limits.max_gates });
    }

    let size = f.size();
    let mask: u32 = if size >= 32 { !0 } else { (1u32 << size) - 1 };
    let target = tt_bits(f);
    let lower = lower_bound_aggregate(f);

    // 0-gate circuits: a bare input wire or a constant gate.
    if let Some(witness) = zero_gate_witness(n, target, mask) {
        return Ok(OracleResult {
            lower,
            upper: Some(0),
            certified: lower == 0,
            witness_circuit: Some(witness),
        });
    }

    let inputs: Vec<u32> = (0..n).map(|v| input_pattern(v, size)).collect();
    let mut base: Vec<u32> = inputs.clone();
    base.push(0);
    base.push(mask);
    let base_set: HashSet<u32> = base.iter().copied().collect();

    let ec_of = |tts: &[u32]| -> usize {
        (0..size)
            .map(|k| tts.iter().filter(|t| *t >> k & 1 == 1).count())
            .max()
            .unwrap_or(0)
    };

    let mut arena: Vec<StateRec> = vec![StateRec { tts: Vec::new(), parent: 0, step: None }];
    let mut visited: HashSet<Vec<u32>> = HashSet::new();
    visited.insert(Vec::new());
    let mut frontier: Vec<usize> = vec![0];
    let mut best: Option<(usize, usize)> = None; // (energy, arena index)

    'levels: for _ in 0..max_gates {
        let mut next = Vec::new();
        for &idx in &frontier {
            let state_ec = ec_of(&arena[idx].tts);
            if best.is_some_and(|(be, _)| state_ec >= be) {
                continue;
            }
            let nodes: Vec<u32> = base.iter().chain(arena[idx].tts.iter()).copied().collect();
            let extend = |op: Op, a: u32, b: u32, arena: &mut Vec<StateRec>,
                              visited: &mut HashSet<Vec<u32>>,
                              next: &mut Vec<usize>,
                              best: &mut Option<(usize, usize)>|
             -> Result<(), AnalysisError> {
                let out = match op {
                    Op::And => a & b,
                    Op::Or => a | b,
                    Op::Not => !a & mask,
                };
                if base_set.contains(&out) || arena[idx].tts.contains(&out) {
                    return Ok(());
                }
                let mut tts = arena[idx].tts.clone();
                let pos = tts.partition_point(|&t| t < out);
                tts.insert(pos, out);
                if !visited.insert(tts.clone()) {
                    return Ok(());
                }
                if visited.len() > limits.state_budget {
                    return Err(AnalysisError::StateBudget(limits.state_budget));
                }
                let e = ec_of(&tts);
                if best.is_some_and(|(be, _)| e >= be) {
                    return Ok(());
                }
                let contains_target = out == target;
                arena.push(StateRec { tts, parent: idx, step: Some((op, a, b, out)) });
                let rec_idx = arena.len() - 1;
                if contains_target {
                    *best = Some((e, rec_idx));
                } else {
                    next.push(rec_idx);
                }
                Ok(())
            };
            for i in 0..nodes.len() {
                extend(Op::Not, nodes[i], 0, &mut arena, &mut visited, &mut next, &mut best)?;
                for j in (i + 1)..nodes.len() {
                    extend(Op::And, nodes[i], nodes[j], &mut arena, &mut visited, &mut next, &mut best)?;
                    extend(Op::Or, nodes[i], nodes[j], &mut arena, &mut visited, &mut next, &mut best)?;
                }
            }
            if best.is_some_and(|(be, _)| be == lower) {
                break 'levels;
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    let upper = best.map(|(e, _)| e);
    let witness_circuit = best.map(|(_, idx)| reconstruct(n, &inputs, mask, &arena, idx));
    Ok(OracleResult {
        lower,
        upper,
        certified: upper == Some(lower),
        witness_circuit,
    })
}

fn zero_gate_witness(n: usize, target: u32, mask: u32) -> Option<Circuit> {
    let size = if n >= 6 { 32 } else { 1usize << n };
    let mut b = CircuitBuilder::new(n);
    if target == 0 {
        let g = b.constant(false);
        return Some(b.finish(g));
    }
    if target == mask {
        let g = b.constant(true);
        return Some(b.finish(g));
    }
    (0..n).find(|&v| input_pattern(v, size) == target).map(|v| {
        let g = b.input(v);
        b.finish(g)
    })
}

fn reconstruct(
    n: usize,
    inputs: &[u32],
    mask: u32,
    arena: &[StateRec],
    idx: usize,
) -> Circuit {
    let mut steps = Vec::new();
    let mut cur = idx;
    while let Some(step) = arena[cur].step {
        steps.push(step);
        cur = arena[cur].parent;
    }
    steps.reverse();

    let mut b = CircuitBuilder::new(n);
    let mut node_of: HashMap<u32, GateId> = HashMap::new();
    for (v, &p) in inputs.iter().enumerate() {
        let id = b.input(v);
        node_of.entry(p).or_insert(id);
    }
    let mut output = 0;
    for (op, a_tt, b_tt, out_tt) in steps {
        let mut resolve = |tt: u32, b: &mut CircuitBuilder| -> GateId {
            if let Some(&g) = node_of.get(&tt) {
                return g;
            }
            debug_assert!(tt == 0 || tt == mask, "source must be a known node");
            let g = b.constant(tt == mask);
            node_of.insert(tt, g);
            g
        };
        let ga = resolve(a_tt, &mut b);
        let gate = match op {
            Op::And => {
                let gb = resolve(b_tt, &mut b);
                b.and(ga, gb)
            }
            Op::Or => {
                let gb = resolve(b_tt, &mut b);
                b.or(ga, gb)
            }
            Op::Not => b.not(ga),
        };
        node_of.insert(out_tt, gate);
        output = gate;
    }
    b.finish(output)
}

/// Check that a monotone circuit's worst-case energy is at least one less
/// than the number of variables it depends on, along with the mechanism
/// behind it: with every input high, every covered inner gate fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneReport {
    pub depends_on: usize,
    pub max_energy: usize,
    pub inner_after_prune: usize,
    pub energy_all_ones: usize,
    pub passed: bool,
}

impl fmt::Display for MonotoneReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "depends_on={} max_energy={} inner_after_prune={} energy_all_ones={} passed={}",
            self.depends_on, self.max_energy, self.inner_after_prune, self.energy_all_ones, self.passed
        )
    }
}

pub fn verify_lemma4(circuit: &Circuit) -> Result<MonotoneReport, AnalysisError> {
    if !circuit.is_monotone() {
        return Err(AnalysisError::NotMonotone(circuit.count_not_gates()));
    }
    let tt = circuit.truth_table()?;
    let depends_on = tt.dependent_vars().len();
    let max_energy = circuit.max_energy(EnergyMode::exhaustive())?.max_energy;
    let pruned = circuit.prune_uncovered();
    let inner_after_prune = pruned.inner_gate_count();
    let energy_all_ones = pruned.energy(&vec![true; pruned.num_vars()])?;
    let passed =
        max_energy >= depends_on.saturating_sub(1) && energy_all_ones == inner_after_prune;
    Ok(MonotoneReport { depends_on, max_energy, inner_after_prune, energy_all_ones, passed })
}

/// Check that worst-case energy is at least the not-gate count, after
/// normalizing the negation substructures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegationReport {
    pub not_gates: usize,
    pub max_energy: usize,
    pub passed: bool,
}

impl fmt::Display for NegationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "not_gates={} max_energy={} passed={}",
            self.not_gates, self.max_energy, self.passed
        )
    }
}

pub fn verify_lemma5(circuit: &Circuit) -> Result<NegationReport, AnalysisError> {
    let normalized = circuit.normalize_negations();
    let not_gates = normalized.count_not_gates();
    let max_energy = normalized.max_energy(EnergyMode::exhaustive())?.max_energy;
    Ok(NegationReport { not_gates, max_energy, passed: max_energy >= not_gates })
}

/// Check the function-level lower bounds on one circuit: worst-case energy
/// at least `ceil(log2(m)/2)` for `m` dependent variables and at least
/// `ceil(psens/3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub dependent: usize,
    pub psens: usize,
    pub max_energy: usize,
    pub log_bound: usize,
    pub psens_bound: usize,
    pub passed: bool,
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dependent={} psens={} max_energy={} log_bound={} psens_bound={} passed={}",
            self.dependent, self.psens, self.max_energy, self.log_bound, self.psens_bound, self.passed
        )
    }
}

pub fn theorem_bounds_audit(circuit: &Circuit) -> Result<BoundsReport, AnalysisError> {
    let tt = circuit.truth_table()?;
    let dependent = tt.dependent_vars().len();
    let psens = boolfn::positive_sensitivity(&tt);
    let max_energy = circuit.max_energy(EnergyMode::exhaustive())?.max_energy;
    let log_bound = half_log2_ceil(dependent);
    // The psens bound presumes a gate; wire-realizable functions are exempt.
    let psens_bound = if wire_realizable(&tt) { 0 } else { psens.div_ceil(3) };
    Ok(BoundsReport {
        dependent,
        psens,
        max_energy,
        log_bound,
        psens_bound,
        passed: max_energy >= log_bound && max_energy >= psens_bound,
    })
}

/// The decision tree induced by a circuit's negation structure.
///
/// Not-gates are listed in topological order (which coincides with gate-id
/// order); block `i` holds the variables first covered by the `i`-th
/// not-gate, and the final block holds the remainder. Querying the blocks in
/// order and simplifying yields a tree computing the circuit's function
/// whose depth can never undercut the true decision tree depth.
#[derive(Debug, Clone)]
pub struct TreeAnalysis {
    pub neg_order: Vec<GateId>,
    pub partition: Vec<Vec<usize>>,
    pub induced_tree: DecisionTree,
    pub induced_depth: usize,
    pub min_depth: usize,
    pub function_matches: bool,
}

impl TreeAnalysis {
    pub fn passed(&self) -> bool {
        self.function_matches && self.induced_depth >= self.min_depth
    }
}

pub fn circuit_to_tree(circuit: &Circuit) -> Result<TreeAnalysis, AnalysisError> {
    let n = circuit.num_vars();
    if n > CIRCUIT_TO_TREE_CAP {
        return Err(AnalysisError::TreeCap { requested: n, cap: CIRCUIT_TO_TREE_CAP });
    }
    let neg_order: Vec<GateId> = (0..circuit.len())
        .filter(|&id| matches!(circuit.gates()[id], Gate::Not(_)))
        .collect();

    let mut taken: BTreeSet<usize> = BTreeSet::new();
    let mut partition: Vec<Vec<usize>> = Vec::new();
    for &ng in &neg_order {
        let covered = circuit.covered_inputs(ng)?;
        let block: Vec<usize> = covered.difference(&taken).copied().collect();
        taken.extend(block.iter().copied());
        partition.push(block);
    }
    partition.push((0..n).filter(|v| !taken.contains(v)).collect());

    let order: Vec<usize> = partition.iter().flatten().copied().collect();
    let f = circuit.truth_table()?;
    let induced_tree = dtree::full_tree_from_order(&f, &order)?.simplify();
    let induced_depth = induced_tree.depth();
    let (min_depth, _) = boolfn::decision_tree_complexity(&f)?;
    let function_matches = (0..f.size()).all(|k| {
        let bits: Vec<bool> = (0..n).map(|v| k >> v & 1 == 1).collect();
        induced_tree.evaluate(&bits) == f.get(k)
    });
    Ok(TreeAnalysis {
        neg_order,
        partition,
        induced_tree,
        induced_depth,
        min_depth,
        function_matches,
    })
}

/// A directed path from a flipped input gate to the output on which every
/// gate changes value between the two inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathWitness {
    /// Gate ids from the input gate of the flipped variable to the output.
    pub path: Vec<GateId>,
    /// Number of inner gates on the path.
    pub length: usize,
    /// Energy of the two inputs summed; at least `length`, since each
    /// flipping inner gate is active under exactly one of the two.
    pub energy_sum: usize,
}

pub fn sensitive_path(
    circuit: &Circuit,
    input: &[bool],
    var: usize,
) -> Result<PathWitness, AnalysisError> {
    if var >= circuit.num_vars() {
        return Err(AnalysisError::Circuit(CircuitError::VarOutOfRange {
            var,
            num_vars: circuit.num_vars(),
        }));
    }
    let (out0, act0) = circuit.evaluate(input)?;
    let mut flipped = input.to_vec();
    flipped[var] = !flipped[var];
    let (out1, act1) = circuit.evaluate(&flipped)?;
    if out0 == out1 {
        return Err(AnalysisError::NotSensitive(var));
    }

    // Walk back from the output along value-changing sources; a changing
    // gate always has a changing source, and the only changing sources with
    // no predecessors are input gates of the flipped variable.
    let differs = |g: GateId| act0.get(g) != act1.get(g);
    let mut rev = vec![circuit.output()];
    let mut cur = circuit.output();
    while !matches!(circuit.gates()[cur], Gate::Input(_)) {
        let next = circuit.gates()[cur]
            .sources()
            .filter(|&s| differs(s))
            .min()
            .expect("a changing gate has a changing source");
        rev.push(next);
        cur = next;
    }
    debug_assert!(matches!(circuit.gates()[cur], Gate::Input(v) if v == var));
    rev.reverse();
    let length = rev.iter().filter(|&&g| circuit.gates()[g].is_inner()).count();
    let energy_sum = circuit.energy_of(&act0) + circuit.energy_of(&act1);
    Ok(PathWitness { path: rev, length, energy_sum })
}
