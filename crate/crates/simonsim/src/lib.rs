//! Statevector simulator and query-cost benchmark for the evenly-spaced
//! hidden-shift collision problem.
//!
//! The problem: a function f: B^n → B^n promises that f(x) = f(x ⊕ r)
//! for a single hidden nonzero shift r, with no other collisions. One
//! quantum round — argument superposition, one oracle pass, an optional
//! value-register measurement, a Hadamard transform and an argument
//! readout — yields a uniformly random vector z orthogonal to r over
//! GF(2). A handful of rounds pins r down as the null space of the
//! accumulated constraints, while any classical strategy must pay for a
//! colliding pair query by query.
//!
//! The crate provides the dense two-register simulator ([`state`]),
//! promise-checked function tables ([`oracle`]), the constraint solver
//! ([`gf2`]), the end-to-end recovery pipeline with its exact
//! distribution checks ([`pipeline`]), classical collision baselines and
//! cost accounting ([`baseline`]), and the `simonsim` command-line tool
//! ([`cli`]).
//!
//! ```
//! use simonsim::oracle::{HiddenShift, SimonFunction};
//! use simonsim::pipeline::recover_hidden_shift;
//!
//! let shift = HiddenShift::new(0b1011).unwrap();
//! let f = SimonFunction::generate(4, shift, 7).unwrap();
//! let report = recover_hidden_shift(&f, true, 42, 80).unwrap();
//! assert!(report.success);
//! assert_eq!(report.recovered_value(), Some(0b1011));
//! ```

pub mod baseline;
pub mod cli;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod pipeline;
pub mod state;

pub use error::{Error, Result};
