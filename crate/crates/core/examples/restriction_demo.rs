//! Iterated restriction walkthrough.
//!
//! Round after round, the variables first covered by the earliest not-gate
//! are fixed to values taken from the deepest path of the induced decision
//! tree. Each restriction folds that not-gate away, so the negation count
//! falls while the induced tree keeps describing the shrinking circuit;
//! once the circuit is monotone, the all-ones input activates every gate
//! that is left.
//!
//! Run with: cargo run -p ec-core --example restriction_demo

use ec_core::analysis;
use ec_core::circuit::EnergyMode;
use ec_core::compilers;
use ec_core::dtree::DecisionTree;

/// An input following the deepest root-to-leaf path; other variables 0.
fn deepest_assignment(tree: &DecisionTree, num_vars: usize) -> Vec<bool> {
    let mut input = vec![false; num_vars];
    let mut node = tree;
    while let DecisionTree::Query { var, low, high } = node {
        let go_high = high.depth() > low.depth();
        input[*var] = go_high;
        node = if go_high { high } else { low };
    }
    input
}

fn main() {
    let mut circuit = compilers::build_or_sqrt(9);
    println!("blockwise disjunction on 9 variables");

    let mut round = 0;
    loop {
        let analysis = analysis::circuit_to_tree(&circuit).unwrap();
        let energy = circuit.max_energy(EnergyMode::exhaustive()).unwrap().max_energy;
        println!(
            "round {round}: not_gates={} induced_depth={} min_depth={} max_energy={energy}",
            analysis.neg_order.len(),
            analysis.induced_depth,
            analysis.min_depth,
        );
        if analysis.neg_order.is_empty() {
            break;
        }
        let anchor = deepest_assignment(&analysis.induced_tree, circuit.num_vars());
        let fixes: Vec<(usize, bool)> =
            analysis.partition[0].iter().map(|&v| (v, anchor[v])).collect();
        if fixes.is_empty() {
            break;
        }
        println!(
            "  fixing {}",
            fixes
                .iter()
                .map(|&(v, b)| format!("x{v}={}", b as u8))
                .collect::<Vec<_>>()
                .join(" ")
        );
        circuit = circuit.restrict(&fixes).unwrap();
        round += 1;
    }

    let pruned = circuit.prune_uncovered();
    let ones = vec![true; pruned.num_vars()];
    println!(
        "monotone remainder: {} inner gates, energy {} at the all-ones input",
        pruned.inner_gate_count(),
        pruned.energy(&ones).unwrap()
    );
}
