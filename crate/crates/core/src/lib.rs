//! Boolean circuit toolkit over the basis {or, and, not} with energy
//! complexity (the maximum number of activated inner gates over all inputs)
//! as the central metric.
//!
//! The crate is organized around five building blocks:
//!
//! * [`circuit`]: gate-level DAG representation, evaluation, energy
//!   measurement, negation normalization, restriction, and text formats.
//! * [`boolfn`]: packed truth tables plus the query-complexity measure zoo
//!   (decision tree depth, sensitivity, block sensitivity, certificates,
//!   degree).
//! * [`dtree`]: decision trees: evaluation, construction from query orders,
//!   simplification, and depth padding.
//! * [`compilers`]: circuit generators that trade gate count for low energy:
//!   decision-tree compilation, level-variable compilation, blockwise OR,
//!   and address selectors.
//! * [`analysis`]: lower-bound machinery: an exact-energy search oracle,
//!   inequality verifiers, the negation-driven circuit-to-tree analyzer, and
//!   sensitive-path extraction.
//!
//! ```
//! use ec_core::circuit::{CircuitBuilder, EnergyMode};
//!
//! let mut b = CircuitBuilder::new(2);
//! let x0 = b.input(0);
//! let x1 = b.input(1);
//! let lo = b.not(x0);
//! let g = b.and(lo, x1);
//! let c = b.finish(g);
//!
//! assert_eq!(c.energy(&[false, true]).unwrap(), 2); // both gates fire
//! let report = c.max_energy(EnergyMode::exhaustive()).unwrap();
//! assert_eq!(report.max_energy, 2);
//! assert_eq!(report.witness, vec![false, true]);
//! assert_eq!(c.truth_table().unwrap().to_string(), "0010");
//! ```

#![forbid(unsafe_code)]

pub mod analysis;
pub mod boolfn;
pub mod circuit;
pub mod compilers;
mod dot;
pub mod dtree;
pub mod netlist;

pub use boolfn::TruthTable;
pub use circuit::{Circuit, CircuitBuilder, Gate, GateId};
pub use dtree::DecisionTree;
