//! Seeded corpus generators shared by the integration suites.
#![allow(dead_code)]

use ec_core::boolfn::TruthTable;
use ec_core::circuit::{Circuit, CircuitBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Assignment bits of input index `k` (variable `v` = bit `v`).
pub fn bits(k: usize, n: usize) -> Vec<bool> {
    (0..n).map(|v| k >> v & 1 == 1).collect()
}

pub fn random_table(n: usize, rng: &mut ChaCha8Rng) -> TruthTable {
    let picks: Vec<bool> = (0..1usize << n).map(|_| rng.random()).collect();
    TruthTable::from_fn(n, |k| picks[k]).unwrap()
}

fn random_circuit_with(
    num_vars: usize,
    gate_count: usize,
    monotone: bool,
    rng: &mut ChaCha8Rng,
) -> Circuit {
    let mut b = CircuitBuilder::new(num_vars);
    for v in 0..num_vars {
        b.input(v);
    }
    for _ in 0..gate_count {
        let len = b.len();
        let a = rng.random_range(0..len);
        let c = rng.random_range(0..len);
        match rng.random_range(0..if monotone { 2 } else { 3 }) {
            0 => b.and(a, c),
            1 => b.or(a, c),
            _ => b.not(a),
        };
    }
    let out = b.len() - 1;
    b.finish(out)
}

/// Constant-free random circuit whose output is the last gate.
pub fn random_circuit(num_vars: usize, gate_count: usize, rng: &mut ChaCha8Rng) -> Circuit {
    random_circuit_with(num_vars, gate_count, false, rng)
}

pub fn random_monotone_circuit(
    num_vars: usize,
    gate_count: usize,
    rng: &mut ChaCha8Rng,
) -> Circuit {
    random_circuit_with(num_vars, gate_count, true, rng)
}

/// The shared function corpus: 200 seeded random tables on 3..=8 variables
/// plus the named families.
pub fn function_corpus() -> Vec<TruthTable> {
    use ec_core::boolfn;
    let mut r = rng(42);
    let mut out = Vec::new();
    for i in 0..200 {
        let n = 3 + i % 6;
        out.push(random_table(n, &mut r));
    }
    for n in 3..=8 {
        out.push(boolfn::or_n(n).unwrap());
        out.push(boolfn::and_n(n).unwrap());
        out.push(boolfn::xor_n(n).unwrap());
    }
    out.push(boolfn::addr(2).unwrap());
    out
}
