//! Gate-level circuit representation and energy measurement.
//!
//! A [`Circuit`] is a DAG over the basis {or, and, not} plus input and
//! constant gates. Gate ids are dense and topologically sorted by
//! construction: every gate may only reference gates with smaller ids, so a
//! single forward pass evaluates the whole circuit.
//!
//! Energy of a circuit under an input is the number of *inner* gates (and,
//! or, not) that output 1. Input and constant gates never count.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::boolfn::TruthTable;

/// Dense gate identifier; also the gate's position in the circuit's gate list.
pub type GateId = usize;

/// Default cap on `num_vars` for exhaustive energy sweeps.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 25;

/// Hard ceiling on exhaustive sweeps regardless of the configured cap.
const EXHAUSTIVE_HARD_CAP: usize = 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("input has {actual} bits but the circuit has {expected} variables")]
    InputLength { expected: usize, actual: usize },
    #[error("gate g{0} is not defined")]
    InvalidGateId(GateId),
    #[error("gate g{gate} references g{src}, which is not defined earlier")]
    ForwardReference { gate: GateId, src: GateId },
    #[error("variable {var} out of range for {num_vars} inputs")]
    VarOutOfRange { var: usize, num_vars: usize },
    #[error("conflicting assignment for variable {0}")]
    ConflictingAssignment(usize),
    #[error("exhaustive sweep over {requested} variables exceeds the cap of {cap}")]
    ExhaustiveCap { requested: usize, cap: usize },
    #[error("truth table over {requested} variables exceeds the cap of {cap}")]
    TruthTableCap { requested: usize, cap: usize },
    #[error("sampled energy estimation requires at least one sample")]
    EmptySample,
    #[error("circuit has no gates")]
    Empty,
}

/// A single gate. `Input` and `Const` are the fan-in-0 gates; the other
/// three form the basis and are the only gates that count toward energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(usize),
    Const(bool),
    And(GateId, GateId),
    Or(GateId, GateId),
    Not(GateId),
}

impl Gate {
    /// True for and/or/not gates, i.e. the gates that count toward energy.
    pub fn is_inner(&self) -> bool {
        matches!(self, Gate::And(..) | Gate::Or(..) | Gate::Not(..))
    }

    pub fn sources(&self) -> impl Iterator<Item = GateId> {
        let (a, b) = match *self {
            Gate::And(x, y) | Gate::Or(x, y) => (Some(x), Some(y)),
            Gate::Not(x) => (Some(x), None),
            Gate::Input(_) | Gate::Const(_) => (None, None),
        };
        a.into_iter().chain(b)
    }
}

/// An immutable circuit: `num_vars` input variables, a topologically ordered
/// gate list, and a designated output gate.
///
/// The output may be an input or constant gate; such circuits have energy 0
/// everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_vars: usize,
    gates: Vec<Gate>,
    output: GateId,
}

/// Incremental circuit constructor. Gate ids are handed out densely in push
/// order, which makes the topological-order invariant hold by construction.
///
/// Builder methods panic on out-of-range sources or variables since those are
/// programming errors; use [`Circuit::new`] for data-driven construction with
/// error reporting.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    num_vars: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(num_vars: usize) -> Self {
        CircuitBuilder { num_vars, gates: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, id: GateId) -> Gate {
        self.gates[id]
    }

    fn check_src(&self, src: GateId) {
        assert!(src < self.gates.len(), "source g{src} is not defined yet");
    }

    pub fn input(&mut self, var: usize) -> GateId {
        assert!(var < self.num_vars, "variable {var} out of range");
        self.push(Gate::Input(var))
    }

    pub fn constant(&mut self, value: bool) -> GateId {
        self.push(Gate::Const(value))
    }

    pub fn and(&mut self, a: GateId, b: GateId) -> GateId {
        self.check_src(a);
        self.check_src(b);
        self.push(Gate::And(a, b))
    }

    pub fn or(&mut self, a: GateId, b: GateId) -> GateId {
        self.check_src(a);
        self.check_src(b);
        self.push(Gate::Or(a, b))
    }

    pub fn not(&mut self, a: GateId) -> GateId {
        self.check_src(a);
        self.push(Gate::Not(a))
    }

    fn push(&mut self, gate: Gate) -> GateId {
        self.gates.push(gate);
        self.gates.len() - 1
    }

    pub fn finish(self, output: GateId) -> Circuit {
        assert!(output < self.gates.len(), "output g{output} is not defined");
        Circuit { num_vars: self.num_vars, gates: self.gates, output }
    }
}

/// Gate values under one fixed input, one bit per gate id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activation {
    bits: Vec<bool>,
}

impl Activation {
    pub fn get(&self, id: GateId) -> bool {
        self.bits[id]
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }
}

/// How to search the input space in [`Circuit::max_energy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyMode {
    /// Visit every input; exact. Refused above `cap` variables.
    Exhaustive { cap: usize },
    /// Visit `count` seeded random inputs; yields a lower estimate.
    Sampled { count: u64, seed: u64 },
}

impl EnergyMode {
    /// Exhaustive mode with the default variable cap.
    pub fn exhaustive() -> Self {
        EnergyMode::Exhaustive { cap: DEFAULT_EXHAUSTIVE_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportMode {
    Exhaustive,
    Sampled,
}

/// Result of a worst-case energy search.
///
/// In exhaustive mode `max_energy` is exact and `witness` is the numerically
/// smallest input attaining it (variable 0 is the least-significant bit of
/// the input's index), so the report is identical under any parallel
/// schedule. In sampled mode `max_energy` is only a lower estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyReport {
    pub max_energy: usize,
    pub witness: Vec<bool>,
    pub inputs_checked: u64,
    pub mode: ReportMode,
}

impl Circuit {
    /// Validates all structural invariants: every source defined on an
    /// earlier id, variables in range, output defined.
    pub fn new(num_vars: usize, gates: Vec<Gate>, output: GateId) -> Result<Self, CircuitError> {
        if gates.is_empty() {
            return Err(CircuitError::Empty);
        }
        for (id, gate) in gates.iter().enumerate() {
            if let Gate::Input(var) = *gate {
                if var >= num_vars {
                    return Err(CircuitError::VarOutOfRange { var, num_vars });
                }
            }
            for src in gate.sources() {
                if src >= id {
                    return Err(CircuitError::ForwardReference { gate: id, src });
                }
            }
        }
        if output >= gates.len() {
            return Err(CircuitError::InvalidGateId(output));
        }
        Ok(Circuit { num_vars, gates, output })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of and/or/not gates.
    pub fn inner_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_inner()).count()
    }

    pub fn count_not_gates(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Not(_))).count()
    }

    /// A circuit is monotone when it contains no not-gate.
    pub fn is_monotone(&self) -> bool {
        self.count_not_gates() == 0
    }

    /// Evaluates the circuit in one topological pass.
    pub fn evaluate(&self, input: &[bool]) -> Result<(bool, Activation), CircuitError> {
        if input.len() != self.num_vars {
            return Err(CircuitError::InputLength {
                expected: self.num_vars,
                actual: input.len(),
            });
        }
        let mut bits = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::Input(i) => input[i],
                Gate::Const(b) => b,
                Gate::And(a, b) => bits[a] && bits[b],
                Gate::Or(a, b) => bits[a] || bits[b],
                Gate::Not(a) => !bits[a],
            };
            bits.push(v);
        }
        let out = bits[self.output];
        Ok((out, Activation { bits }))
    }

    /// Number of activated inner gates under `input`.
    pub fn energy(&self, input: &[bool]) -> Result<usize, CircuitError> {
        let (_, act) = self.evaluate(input)?;
        Ok(self.energy_of(&act))
    }

    /// Counts activated inner gates in a previously computed activation.
    pub fn energy_of(&self, activation: &Activation) -> usize {
        self.gates
            .iter()
            .zip(activation.as_slice())
            .filter(|(g, &v)| g.is_inner() && v)
            .count()
    }

    /// Worst-case energy over the input space.
    ///
    /// Exhaustive mode partitions the input space across parallel workers;
    /// the reduction keeps the maximum energy and, among ties, the smallest
    /// input index, so the result matches a sequential sweep exactly.
    pub fn max_energy(&self, mode: EnergyMode) -> Result<EnergyReport, CircuitError> {
        match mode {
            EnergyMode::Exhaustive { cap } => self.max_energy_exhaustive(cap),
            EnergyMode::Sampled { count, seed } => self.max_energy_sampled(count, seed),
        }
    }

    fn max_energy_exhaustive(&self, cap: usize) -> Result<EnergyReport, CircuitError> {
        let n = self.num_vars;
        let cap = cap.min(EXHAUSTIVE_HARD_CAP);
        if n > cap {
            return Err(CircuitError::ExhaustiveCap { requested: n, cap });
        }
        let total: u64 = 1u64 << n;
        let inner: Vec<GateId> = (0..self.gates.len())
            .filter(|&id| self.gates[id].is_inner())
            .collect();
        if inner.is_empty() {
            return Ok(EnergyReport {
                max_energy: 0,
                witness: vec![false; n],
                inputs_checked: total,
                mode: ReportMode::Exhaustive,
            });
        }
        // Count bits needed to hold energies up to inner.len().
        let plane_count = (usize::BITS - inner.len().leading_zeros()) as usize;
        let blocks = total.div_ceil(64);

        let best = (0..blocks)
            .into_par_iter()
            .fold(
                || (vec![0u64; self.gates.len()], vec![0u64; plane_count], None),
                |(mut vals, mut planes, mut best): (Vec<u64>, Vec<u64>, Option<(usize, u64)>),
                 block| {
                    sim::eval_block(&self.gates, block, &mut vals);
                    planes.fill(0);
                    for &g in &inner {
                        sim::ripple_add(&mut planes, vals[g]);
                    }
                    let lanes = (total - block * 64).min(64);
                    for lane in 0..lanes {
                        let mut e = 0usize;
                        for (p, w) in planes.iter().enumerate() {
                            e |= (((w >> lane) & 1) as usize) << p;
                        }
                        let idx = block * 64 + lane;
                        let better = match best {
                            None => true,
                            Some((be, bi)) => e > be || (e == be && idx < bi),
                        };
                        if better {
                            best = Some((e, idx));
                        }
                    }
                    (vals, planes, best)
                },
            )
            .map(|(_, _, best)| best)
            .reduce(
                || None,
                |a, b| match (a, b) {
                    (None, x) | (x, None) => x,
                    (Some((ea, ia)), Some((eb, ib))) => {
                        if eb > ea || (eb == ea && ib < ia) {
                            Some((eb, ib))
                        } else {
                            Some((ea, ia))
                        }
                    }
                },
            )
            .expect("at least one input was swept");

        let (max_energy, idx) = best;
        let witness = (0..n).map(|v| (idx >> v) & 1 == 1).collect();
        Ok(EnergyReport {
            max_energy,
            witness,
            inputs_checked: total,
            mode: ReportMode::Exhaustive,
        })
    }

    fn max_energy_sampled(&self, count: u64, seed: u64) -> Result<EnergyReport, CircuitError> {
        use rand::{Rng, SeedableRng};
        if count == 0 {
            return Err(CircuitError::EmptySample);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<(usize, Vec<bool>)> = None;
        let mut input = vec![false; self.num_vars];
        for _ in 0..count {
            for bit in input.iter_mut() {
                *bit = rng.random();
            }
            let e = self.energy(&input)?;
            if best.as_ref().is_none_or(|(be, _)| e > *be) {
                best = Some((e, input.clone()));
            }
        }
        let (max_energy, witness) = best.expect("count > 0");
        Ok(EnergyReport {
            max_energy,
            witness,
            inputs_checked: count,
            mode: ReportMode::Sampled,
        })
    }

    /// Distribution of energies over the whole input space: entry `e` counts
    /// the inputs of energy exactly `e`. Subject to the same cap as
    /// exhaustive [`Self::max_energy`].
    pub fn energy_histogram(&self, cap: usize) -> Result<Vec<u64>, CircuitError> {
        let n = self.num_vars;
        let cap = cap.min(EXHAUSTIVE_HARD_CAP);
        if n > cap {
            return Err(CircuitError::ExhaustiveCap { requested: n, cap });
        }
        let total: u64 = 1u64 << n;
        let inner: Vec<GateId> = (0..self.gates.len())
            .filter(|&id| self.gates[id].is_inner())
            .collect();
        let mut histogram = vec![0u64; inner.len() + 1];
        if inner.is_empty() {
            histogram[0] = total;
            return Ok(histogram);
        }
        let plane_count = (usize::BITS - inner.len().leading_zeros()) as usize;
        let mut vals = vec![0u64; self.gates.len()];
        let mut planes = vec![0u64; plane_count];
        for block in 0..total.div_ceil(64) {
            sim::eval_block(&self.gates, block, &mut vals);
            planes.fill(0);
            for &g in &inner {
                sim::ripple_add(&mut planes, vals[g]);
            }
            let lanes = (total - block * 64).min(64);
            for lane in 0..lanes {
                let mut e = 0usize;
                for (p, w) in planes.iter().enumerate() {
                    e |= (((w >> lane) & 1) as usize) << p;
                }
                histogram[e] += 1;
            }
        }
        while histogram.len() > 1 && *histogram.last().unwrap() == 0 {
            histogram.pop();
        }
        Ok(histogram)
    }

    /// Truth table of the circuit; bit `k` holds the output with variable `v`
    /// set to bit `v` of `k`.
    pub fn truth_table(&self) -> Result<TruthTable, CircuitError> {
        let n = self.num_vars;
        if n > TruthTable::MAX_VARS {
            return Err(CircuitError::TruthTableCap { requested: n, cap: TruthTable::MAX_VARS });
        }
        let total = 1u64 << n;
        let blocks = total.div_ceil(64);
        let mut vals = vec![0u64; self.gates.len()];
        let mut words = Vec::with_capacity(blocks as usize);
        for block in 0..blocks {
            sim::eval_block(&self.gates, block, &mut vals);
            words.push(vals[self.output]);
        }
        Ok(TruthTable::from_words(n, words))
    }

    /// Variables of input gates from which a directed path reaches `from`.
    pub fn covered_inputs(&self, from: GateId) -> Result<BTreeSet<usize>, CircuitError> {
        if from >= self.gates.len() {
            return Err(CircuitError::InvalidGateId(from));
        }
        let mut seen = vec![false; self.gates.len()];
        let mut stack = vec![from];
        seen[from] = true;
        let mut vars = BTreeSet::new();
        while let Some(id) = stack.pop() {
            if let Gate::Input(v) = self.gates[id] {
                vars.insert(v);
            }
            for src in self.gates[id].sources() {
                if !seen[src] {
                    seen[src] = true;
                    stack.push(src);
                }
            }
        }
        Ok(vars)
    }

    /// Drops every gate the output does not cover and compacts ids.
    pub fn prune_uncovered(&self) -> Circuit {
        self.prune_uncovered_with_map().0
    }

    /// As [`Self::prune_uncovered`], also returning old-id -> new-id mapping.
    pub fn prune_uncovered_with_map(&self) -> (Circuit, Vec<Option<GateId>>) {
        let mut keep = vec![false; self.gates.len()];
        let mut stack = vec![self.output];
        keep[self.output] = true;
        while let Some(id) = stack.pop() {
            for src in self.gates[id].sources() {
                if !keep[src] {
                    keep[src] = true;
                    stack.push(src);
                }
            }
        }
        let mut map: Vec<Option<GateId>> = vec![None; self.gates.len()];
        let mut gates = Vec::with_capacity(keep.iter().filter(|&&k| k).count());
        for (id, gate) in self.gates.iter().enumerate() {
            if !keep[id] {
                continue;
            }
            let remapped = match *gate {
                Gate::And(a, b) => Gate::And(map[a].unwrap(), map[b].unwrap()),
                Gate::Or(a, b) => Gate::Or(map[a].unwrap(), map[b].unwrap()),
                Gate::Not(a) => Gate::Not(map[a].unwrap()),
                g => g,
            };
            gates.push(remapped);
            map[id] = Some(gates.len() - 1);
        }
        let output = map[self.output].unwrap();
        (Circuit { num_vars: self.num_vars, gates, output }, map)
    }

    /// Rewrites the not-gate substructures that never pay off: two not-gates
    /// sharing a source are merged, a not-gate fed by a not-gate is forwarded
    /// to the grandparent, and a not-gate on a constant folds into the
    /// opposite constant. Unreachable gates are pruned afterwards.
    ///
    /// The result computes the same function and its worst-case energy never
    /// exceeds the original's.
    pub fn normalize_negations(&self) -> Circuit {
        let mut gates: Vec<Gate> = Vec::with_capacity(self.gates.len());
        let mut remap: Vec<GateId> = Vec::with_capacity(self.gates.len());
        // new source id -> id of the unique not-gate reading it
        let mut not_of: HashMap<GateId, GateId> = HashMap::new();
        let mut const_of: [Option<GateId>; 2] = [None, None];
        for gate in &self.gates {
            let new_id = match *gate {
                Gate::Input(_) | Gate::Const(_) => {
                    gates.push(*gate);
                    gates.len() - 1
                }
                Gate::And(a, b) => {
                    gates.push(Gate::And(remap[a], remap[b]));
                    gates.len() - 1
                }
                Gate::Or(a, b) => {
                    gates.push(Gate::Or(remap[a], remap[b]));
                    gates.len() - 1
                }
                Gate::Not(a) => {
                    let src = remap[a];
                    match gates[src] {
                        Gate::Not(t) => t,
                        Gate::Const(v) => *const_of[usize::from(!v)].get_or_insert_with(|| {
                            gates.push(Gate::Const(!v));
                            gates.len() - 1
                        }),
                        _ => *not_of.entry(src).or_insert_with(|| {
                            gates.push(Gate::Not(src));
                            gates.len() - 1
                        }),
                    }
                }
            };
            remap.push(new_id);
        }
        let circuit = Circuit {
            num_vars: self.num_vars,
            output: remap[self.output],
            gates,
        };
        circuit.prune_uncovered()
    }

    /// Substitutes the given variables by constants and folds the
    /// consequences: an and-gate with a constant-0 source becomes constant 0,
    /// with a constant-1 source it becomes a wire, dually for or-gates, and
    /// not-gates on constants flip them. Dead gates are pruned. The circuit
    /// keeps its variable count; substituted variables become
    /// irrelevant.
    pub fn restrict(&self, partial: &[(usize, bool)]) -> Result<Circuit, CircuitError> {
        #[derive(Clone, Copy)]
        enum Node {
            Fixed(bool),
            Wire(GateId),
        }
        let mut fixed: Vec<Option<bool>> = vec![None; self.num_vars];
        for &(var, bit) in partial {
            if var >= self.num_vars {
                return Err(CircuitError::VarOutOfRange { var, num_vars: self.num_vars });
            }
            if fixed[var].is_some_and(|prev| prev != bit) {
                return Err(CircuitError::ConflictingAssignment(var));
            }
            fixed[var] = Some(bit);
        }

        let mut b = CircuitBuilder::new(self.num_vars);
        let mut map: Vec<Node> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let node = match *gate {
                Gate::Input(v) => match fixed[v] {
                    Some(bit) => Node::Fixed(bit),
                    None => Node::Wire(b.input(v)),
                },
                Gate::Const(v) => Node::Fixed(v),
                Gate::And(x, y) => match (map[x], map[y]) {
                    (Node::Fixed(false), _) | (_, Node::Fixed(false)) => Node::Fixed(false),
                    (Node::Fixed(true), n) | (n, Node::Fixed(true)) => n,
                    (Node::Wire(a), Node::Wire(c)) => Node::Wire(b.and(a, c)),
                },
                Gate::Or(x, y) => match (map[x], map[y]) {
                    (Node::Fixed(true), _) | (_, Node::Fixed(true)) => Node::Fixed(true),
                    (Node::Fixed(false), n) | (n, Node::Fixed(false)) => n,
                    (Node::Wire(a), Node::Wire(c)) => Node::Wire(b.or(a, c)),
                },
                Gate::Not(x) => match map[x] {
                    Node::Fixed(v) => Node::Fixed(!v),
                    Node::Wire(a) => Node::Wire(b.not(a)),
                },
            };
            map.push(node);
        }
        let output = match map[self.output] {
            Node::Fixed(v) => b.constant(v),
            Node::Wire(g) => g,
        };
        Ok(b.finish(output).prune_uncovered())
    }
}

/// 64-lane bit-parallel evaluation: lane `j` of block `b` carries the gate
/// value under input index `b * 64 + j`.
mod sim {
    use super::Gate;

    /// Value of variable `v` across the 64 lanes of a block, for `v < 6`.
    const LANE: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];

    fn input_word(var: usize, block: u64) -> u64 {
        if var < 6 {
            LANE[var]
        } else if (block << 6 >> var) & 1 == 1 {
            !0
        } else {
            0
        }
    }

    pub(super) fn eval_block(gates: &[Gate], block: u64, vals: &mut [u64]) {
        for (id, gate) in gates.iter().enumerate() {
            vals[id] = match *gate {
                Gate::Input(v) => input_word(v, block),
                Gate::Const(b) => {
                    if b {
                        !0
                    } else {
                        0
                    }
                }
                Gate::And(a, b) => vals[a] & vals[b],
                Gate::Or(a, b) => vals[a] | vals[b],
                Gate::Not(a) => !vals[a],
            };
        }
    }

    /// Adds one bit per lane into the bit-sliced counters.
    pub(super) fn ripple_add(planes: &mut [u64], mut carry: u64) {
        for plane in planes.iter_mut() {
            if carry == 0 {
                break;
            }
            let t = *plane & carry;
            *plane ^= carry;
            carry = t;
        }
        debug_assert_eq!(carry, 0, "counter planes overflowed");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> Circuit {
        let mut b = CircuitBuilder::new(2);
        let x0 = b.input(0);
        let x1 = b.input(1);
        let g = b.and(x0, x1);
        b.finish(g)
    }

    fn bits(idx: u64, n: usize) -> Vec<bool> {
        (0..n).map(|v| (idx >> v) & 1 == 1).collect()
    }

    #[test]
    fn evaluate_not_gate() {
        let mut b = CircuitBuilder::new(1);
        let x = b.input(0);
        let g = b.not(x);
        let c = b.finish(g);
        let (out, act) = c.evaluate(&[false]).unwrap();
        assert!(out);
        assert!(act.get(g));
        assert!(!act.get(x));
    }

    #[test]
    fn evaluate_and_gate() {
        let c = and2();
        assert!(c.evaluate(&[true, true]).unwrap().0);
        assert!(!c.evaluate(&[false, true]).unwrap().0);
    }

    #[test]
    fn evaluate_const_output() {
        let mut b = CircuitBuilder::new(2);
        let g = b.constant(false);
        let c = b.finish(g);
        for idx in 0..4 {
            assert!(!c.evaluate(&bits(idx, 2)).unwrap().0);
        }
    }

    #[test]
    fn evaluate_rejects_wrong_input_length() {
        let c = and2();
        assert_eq!(
            c.evaluate(&[true]).unwrap_err(),
            CircuitError::InputLength { expected: 2, actual: 1 }
        );
    }

    #[test]
    fn energy_counts_inner_gates_only() {
        let c = and2();
        assert_eq!(c.energy(&[true, true]).unwrap(), 1);
        assert_eq!(c.energy(&[false, true]).unwrap(), 0);
    }

    #[test]
    fn energy_double_negation_chain() {
        let mut b = CircuitBuilder::new(1);
        let x = b.input(0);
        let n1 = b.not(x);
        let n2 = b.not(n1);
        let c = b.finish(n2);
        // On input 1 only the outer not fires.
        assert_eq!(c.energy(&[true]).unwrap(), 1);
        assert_eq!(c.energy(&[false]).unwrap(), 1);
    }

    fn balanced_or_tree(n: usize) -> Circuit {
        let mut b = CircuitBuilder::new(n);
        let mut layer: Vec<GateId> = (0..n).map(|v| b.input(v)).collect();
        while layer.len() > 1 {
            layer = layer
                .chunks(2)
                .map(|pair| {
                    if pair.len() == 2 {
                        b.or(pair[0], pair[1])
                    } else {
                        pair[0]
                    }
                })
                .collect();
        }
        b.finish(layer[0])
    }

    #[test]
    fn max_energy_and2() {
        let r = and2().max_energy(EnergyMode::exhaustive()).unwrap();
        assert_eq!(r.max_energy, 1);
        assert_eq!(r.witness, bits(3, 2));
        assert_eq!(r.inputs_checked, 4);
        assert_eq!(r.mode, ReportMode::Exhaustive);
    }

    #[test]
    fn max_energy_or_tree_4() {
        let c = balanced_or_tree(4);
        // Independent sweep with the scalar evaluator.
        let mut expect = 0;
        let mut expect_witness = 0;
        for idx in 0..16u64 {
            let e = c.energy(&bits(idx, 4)).unwrap();
            if e > expect {
                expect = e;
                expect_witness = idx;
            }
        }
        assert_eq!(expect, 3);
        let r = c.max_energy(EnergyMode::exhaustive()).unwrap();
        assert_eq!(r.max_energy, 3);
        assert_eq!(r.witness, bits(expect_witness, 4));
        // 1111 attains the maximum too, but 0101 comes first.
        assert_eq!(expect_witness, 0b0101);
        assert_eq!(c.energy(&bits(0b1111, 4)).unwrap(), 3);
    }

    #[test]
    fn max_energy_single_not() {
        let mut b = CircuitBuilder::new(1);
        let x = b.input(0);
        let g = b.not(x);
        let r = b.finish(g).max_energy(EnergyMode::exhaustive()).unwrap();
        assert_eq!(r.max_energy, 1);
        assert_eq!(r.witness, vec![false]);
    }

    #[test]
    fn max_energy_cap_enforced() {
        let c = balanced_or_tree(5);
        assert!(matches!(
            c.max_energy(EnergyMode::Exhaustive { cap: 4 }),
            Err(CircuitError::ExhaustiveCap { requested: 5, cap: 4 })
        ));
    }

    #[test]
    fn max_energy_matches_scalar_sweep_above_word_size() {
        // 7 variables exercises the multi-block bit-parallel path.
        let c = balanced_or_tree(7);
        let r = c.max_energy(EnergyMode::exhaustive()).unwrap();
        let mut expect = 0usize;
        let mut expect_idx = 0u64;
        for idx in 0..128u64 {
            let e = c.energy(&bits(idx, 7)).unwrap();
            if e > expect {
                expect = e;
                expect_idx = idx;
            }
        }
        assert_eq!(r.max_energy, expect);
        assert_eq!(r.witness, bits(expect_idx, 7));
    }

    #[test]
    fn energy_histogram_counts_every_input() {
        let c = balanced_or_tree(4);
        let hist = c.energy_histogram(25).unwrap();
        assert_eq!(hist.iter().sum::<u64>(), 16);
        assert_eq!(hist.len() - 1, 3); // maximum energy is the last entry
        let mut expect = vec![0u64; 4];
        for idx in 0..16u64 {
            expect[c.energy(&bits(idx, 4)).unwrap()] += 1;
        }
        assert_eq!(hist, expect);

        let mut b = CircuitBuilder::new(2);
        let k = b.constant(true);
        let c = b.finish(k);
        assert_eq!(c.energy_histogram(25).unwrap(), vec![4]);
    }

    #[test]
    fn max_energy_sampled_is_lower_estimate() {
        let c = balanced_or_tree(4);
        let r = c.max_energy(EnergyMode::Sampled { count: 64, seed: 7 }).unwrap();
        assert!(r.max_energy <= 3);
        assert_eq!(r.mode, ReportMode::Sampled);
        assert_eq!(r.inputs_checked, 64);
        assert_eq!(c.energy(&r.witness).unwrap(), r.max_energy);
        // Same seed, same report.
        let again = c.max_energy(EnergyMode::Sampled { count: 64, seed: 7 }).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn truth_table_basic_gates() {
        assert_eq!(and2().truth_table().unwrap().to_string(), "0001");
        let mut b = CircuitBuilder::new(1);
        let x = b.input(0);
        let g = b.not(x);
        assert_eq!(b.finish(g).truth_table().unwrap().to_string(), "10");
        let mut b = CircuitBuilder::new(2);
        let x0 = b.input(0);
        let x1 = b.input(1);
        let g = b.or(x0, x1);
        assert_eq!(b.finish(g).truth_table().unwrap().to_string(), "0111");
    }

    #[test]
    fn truth_table_matches_scalar_eval() {
        let c = balanced_or_tree(7);
        let tt = c.truth_table().unwrap();
        for idx in 0..128u64 {
            assert_eq!(tt.get(idx as usize), c.evaluate(&bits(idx, 7)).unwrap().0);
        }
    }

    #[test]
    fn covered_inputs_examples() {
        let c = and2();
        let vars = c.covered_inputs(c.output()).unwrap();
        assert_eq!(vars.into_iter().collect::<Vec<_>>(), vec![0, 1]);

        let mut b = CircuitBuilder::new(1);
        let k = b.constant(true);
        let c = b.finish(k);
        assert!(c.covered_inputs(0).unwrap().is_empty());
        assert_eq!(c.covered_inputs(7).unwrap_err(), CircuitError::InvalidGateId(7));
    }

    #[test]
    fn normalize_merges_shared_nots() {
        let mut b = CircuitBuilder::new(1);
        let x = b.input(0);
        let n1 = b.not(x);
        let n2 = b.not(x);
        let g = b.or(n1, n2);
        let c = b.finish(g);
        let norm = c.normalize_negations();
        assert_eq!(norm.count_not_gates(), 1);
        assert_eq!(norm.truth_table().unwrap(), c.truth_table().unwrap());
    }

    #[test]
    fn normalize_forwards_double_negation() {
        let mut b = CircuitBuilder::new(2);
        let x0 = b.input(0);
        let x1 = b.input(1);
        let n1 = b.not(x0);
        let n2 = b.not(n1);
        let g = b.and(n2, x1);
        let c = b.finish(g);
        let norm = c.normalize_negations();
        assert_eq!(norm.count_not_gates(), 0);
        assert_eq!(norm.truth_table().unwrap(), c.truth_table().unwrap());
        // The consumer now reads the grandparent input directly.
        assert!(norm.gates().iter().any(|g| matches!(g, Gate::And(..))));
    }

    #[test]
    fn normalize_folds_negated_constants() {
        let mut b = CircuitBuilder::new(1);
        let k = b.constant(true);
        let n = b.not(k);
        let x = b.input(0);
        let g = b.or(n, x);
        let c = b.finish(g);
        let norm = c.normalize_negations();
        assert_eq!(norm.count_not_gates(), 0);
        assert_eq!(norm.truth_table().unwrap(), c.truth_table().unwrap());
    }

    #[test]
    fn normalize_is_identity_on_normal_circuits() {
        let mut b = CircuitBuilder::new(2);
        let x0 = b.input(0);
        let x1 = b.input(1);
        let n = b.not(x0);
        let g = b.and(n, x1);
        let c = b.finish(g);
        assert_eq!(c.normalize_negations(), c);
    }

    #[test]
    fn restrict_to_wire() {
        let c = and2();
        let r = c.restrict(&[(1, true)]).unwrap();
        assert_eq!(r.inner_gate_count(), 0);
        assert_eq!(r.num_vars(), 2);
        for idx in 0..4u64 {
            let input = bits(idx, 2);
            assert_eq!(r.evaluate(&input).unwrap().0, input[0]);
        }
    }

    #[test]
    fn restrict_to_constant() {
        let c = and2();
        let r = c.restrict(&[(1, false)]).unwrap();
        assert_eq!(r.inner_gate_count(), 0);
        for idx in 0..4u64 {
            assert!(!r.evaluate(&bits(idx, 2)).unwrap().0);
        }
    }

    #[test]
    fn restrict_empty_map_is_identity_without_constants() {
        let c = and2();
        let r = c.restrict(&[]).unwrap();
        assert_eq!(r, c);
        assert_eq!(
            r.max_energy(EnergyMode::exhaustive()).unwrap().max_energy,
            c.max_energy(EnergyMode::exhaustive()).unwrap().max_energy
        );
    }

    #[test]
    fn restrict_rejects_bad_keys() {
        let c = and2();
        assert_eq!(
            c.restrict(&[(5, true)]).unwrap_err(),
            CircuitError::VarOutOfRange { var: 5, num_vars: 2 }
        );
        assert_eq!(
            c.restrict(&[(0, true), (0, false)]).unwrap_err(),
            CircuitError::ConflictingAssignment(0)
        );
    }

    #[test]
    fn monotone_all_ones_saturation() {
        let c = balanced_or_tree(8).prune_uncovered();
        assert!(c.is_monotone());
        let e = c.energy(&[true; 8]).unwrap();
        assert_eq!(e, c.inner_gate_count());
    }

    #[test]
    fn circuit_new_validates() {
        assert!(matches!(
            Circuit::new(1, vec![Gate::Not(0)], 0),
            Err(CircuitError::ForwardReference { gate: 0, src: 0 })
        ));
        assert!(matches!(
            Circuit::new(1, vec![Gate::Input(3)], 0),
            Err(CircuitError::VarOutOfRange { var: 3, num_vars: 1 })
        ));
        assert!(matches!(
            Circuit::new(1, vec![Gate::Input(0)], 4),
            Err(CircuitError::InvalidGateId(4))
        ));
        assert!(matches!(Circuit::new(0, vec![], 0), Err(CircuitError::Empty)));
    }
}
