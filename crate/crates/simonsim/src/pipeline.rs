//! The end-to-end shift-recovery algorithm and its exact checks.
//!
//! One *round* prepares the uniform argument superposition, applies the
//! oracle once, optionally measures the value register, transforms the
//! argument register and measures it, yielding one constraint vector z
//! with z·r = 0. Rounds accumulate into a [`ConstraintSystem`] until the
//! rank reaches n − 1, at which point the shift is the unique nonzero
//! null vector.
//!
//! Two sampling routes produce rounds. The dense route runs the full
//! statevector simulation. The sparse route exploits the known structure
//! of the post-oracle state — the value register is uniform over the
//! 2^(n−1) range values and the constraint vector is uniform over the
//! (n−1)-dimensional subspace orthogonal to the shift — and samples those
//! distributions directly, which keeps wide instances cheap. The two
//! routes draw from identical distributions (the exact-distribution and
//! equivalence checks below pin this down against the dense simulation);
//! a given width always uses the same route, and both consume random
//! draws in the same order (value draw first when the value register is
//! measured, then the argument draw).

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{dot, ConstraintSystem};
use crate::oracle::{to_hex, SimonFunction};
use crate::state::{hadamard_transform, Register, RegisterLayout, StateVector};

/// Widths up to this run rounds on the dense statevector; wider ones use
/// the sparse route.
pub const DENSE_ROUTE_MAX_N: usize = 6;

/// Which simulation route a round runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Pick by width: dense up to [`DENSE_ROUTE_MAX_N`], sparse above.
    Auto,
    /// Full statevector simulation (memory-bounded).
    Dense,
    /// Structure-exploiting direct sampling.
    Sparse,
}

impl Route {
    fn resolve(self, n: usize) -> Route {
        match self {
            Route::Auto if n <= DENSE_ROUTE_MAX_N => Route::Dense,
            Route::Auto => Route::Sparse,
            fixed => fixed,
        }
    }
}

/// One round's observations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundSample {
    /// Measured value-register outcome, when that register was measured.
    pub v_outcome: Option<u64>,
    /// Measured argument-register outcome: one constraint vector.
    pub z: u64,
    /// Constraint-system rank after absorbing z. Zero until a recovery
    /// loop places the sample in a system.
    pub rank_after: usize,
}

/// Outcome of a full recovery run, in its on-disk JSON shape.
///
/// `recovered` is the shift as lowercase zero-padded hex (see the table
/// file format); `oracle_queries` counts one superposed evaluation per
/// round; `rank_trajectory[i]` is the constraint rank after round i + 1.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub n: usize,
    pub seed: u64,
    pub measure_v: bool,
    pub rounds: usize,
    pub oracle_queries: u64,
    pub rank_trajectory: Vec<usize>,
    pub recovered: Option<String>,
    pub success: bool,
}

impl RunReport {
    /// The recovered shift as a number, if any.
    pub fn recovered_value(&self) -> Option<u64> {
        self.recovered
            .as_deref()
            .and_then(|s| u64::from_str_radix(s, 16).ok())
    }
}

/// H on the argument register, then one oracle pass:
/// 2^(−n/2) Σ_x |x⟩_a |f(x)⟩_v.
pub fn prepare_parallel_state(f: &SimonFunction) -> Result<StateVector> {
    let layout = RegisterLayout::new(f.n())?;
    StateVector::zero(layout).hadamard(Register::A).apply_oracle(f)
}

/// Run one round on the automatic route.
pub fn run_round(f: &SimonFunction, measure_v: bool, rng: &mut ChaCha8Rng) -> Result<RoundSample> {
    run_round_routed(f, measure_v, rng, Route::Auto)
}

/// Run one round on an explicit route (exposed so validation can compare
/// the routes against each other on the same widths).
pub fn run_round_routed(
    f: &SimonFunction,
    measure_v: bool,
    rng: &mut ChaCha8Rng,
    route: Route,
) -> Result<RoundSample> {
    match route.resolve(f.n()) {
        Route::Dense => run_round_dense(f, measure_v, rng),
        Route::Sparse => Ok(run_round_sparse(f, measure_v, rng)),
        Route::Auto => unreachable!("resolve returns a concrete route"),
    }
}

fn run_round_dense(
    f: &SimonFunction,
    measure_v: bool,
    rng: &mut ChaCha8Rng,
) -> Result<RoundSample> {
    let mut state = prepare_parallel_state(f)?;
    let mut v_outcome = None;
    if measure_v {
        let outcome = state.measure(Register::V, rng.gen())?;
        v_outcome = Some(outcome.value);
        state = outcome.post_state;
    }
    let state = state.hadamard(Register::A);
    let outcome = state.measure(Register::A, rng.gen())?;
    Ok(RoundSample {
        v_outcome,
        z: outcome.value,
        rank_after: 0,
    })
}

fn run_round_sparse(f: &SimonFunction, measure_v: bool, rng: &mut ChaCha8Rng) -> RoundSample {
    let n = f.n();
    let half = (1u64 << (n - 1)) as f64;
    let mut v_outcome = None;
    if measure_v {
        // The value register is uniform over the range values; scaling a
        // [0,1) draw by a power of two is exact, so this reproduces the
        // ascending inverse-CDF selection of the dense route.
        let idx = (rng.gen::<f64>() * half) as usize;
        v_outcome = Some(f.range_values()[idx]);
    }
    let k = (rng.gen::<f64>() * half) as u64;
    let z = nth_orthogonal(f.hidden_shift().value(), n, k);
    RoundSample {
        v_outcome,
        z,
        rank_after: 0,
    }
}

/// The k-th vector (under a fixed bijection from (n−1)-bit indices) of
/// the subspace orthogonal to r: spread k over the bit positions other
/// than r's highest, then fix that bit to make the parity even.
fn nth_orthogonal(r: u64, n: usize, k: u64) -> u64 {
    debug_assert!(r != 0 && r >> n == 0 && k >> (n - 1) == 0);
    let high = 63 - r.leading_zeros() as usize;
    let mut z = 0u64;
    let mut k = k;
    for pos in (0..n).filter(|&pos| pos != high) {
        if k & 1 == 1 {
            z |= 1 << pos;
        }
        k >>= 1;
    }
    if dot(z, r) == 1 {
        z |= 1 << high;
    }
    z
}

/// Exact probability of each argument-register outcome z for one round,
/// computed on the dense state.
///
/// With `measure_v` set this is the mixture over value outcomes: each
/// surviving column of the state is projected out, renormalized and
/// transformed on its own, which is the measurement-then-Hadamard path
/// without materializing every post-measurement state.
pub fn exact_z_distribution(f: &SimonFunction, measure_v: bool) -> Result<Vec<f64>> {
    let state = prepare_parallel_state(f)?;
    if !measure_v {
        return Ok(state.hadamard(Register::A).marginal(Register::A));
    }
    let n = f.n();
    let dim = state.layout().register_dim();
    let mut dist = vec![0.0; dim];
    for &value in &f.range_values() {
        let mut column: Vec<Complex64> = (0..dim)
            .map(|x| state.amplitudes()[(x << n) | value as usize])
            .collect();
        let p_value: f64 = column.iter().map(|a| a.norm_sqr()).sum();
        if p_value == 0.0 {
            continue;
        }
        let inv_norm = 1.0 / p_value.sqrt();
        for a in &mut column {
            *a *= inv_norm;
        }
        hadamard_transform(&mut column, n);
        for (z, a) in column.iter().enumerate() {
            dist[z] += p_value * a.norm_sqr();
        }
    }
    Ok(dist)
}

/// Comparison of the argument-outcome distribution with and without the
/// intermediate value-register measurement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub max_abs_difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Check that measuring the value register first leaves the final
/// argument-outcome distribution unchanged (deferred measurement).
pub fn equivalence_check(f: &SimonFunction, tolerance: f64) -> Result<EquivalenceReport> {
    let with_v = exact_z_distribution(f, true)?;
    let without_v = exact_z_distribution(f, false)?;
    let max_abs_difference = with_v
        .iter()
        .zip(&without_v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(EquivalenceReport {
        n: f.n(),
        max_abs_difference,
        tolerance,
        pass: max_abs_difference <= tolerance,
    })
}

/// One value-register outcome's post-measurement argument support.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistillationOutcome {
    pub value: u64,
    pub probability: f64,
    /// Argument values with nonzero amplitude, ascending.
    pub support: Vec<u64>,
}

/// Post-measurement structure across every value outcome: each collapses
/// the argument register onto one collision pair in an even split.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistillationReport {
    pub n: usize,
    pub outcomes: Vec<DistillationOutcome>,
    /// Largest |p(value) − 2^(1−n)| over value outcomes.
    pub max_value_probability_error: f64,
    /// Largest ||amplitude|² − ½| over surviving argument amplitudes.
    pub max_support_probability_error: f64,
    /// True when every outcome's support is exactly its collision pair
    /// and every other amplitude is exactly zero.
    pub support_ok: bool,
}

impl DistillationReport {
    pub fn pass(&self, tolerance: f64) -> bool {
        self.support_ok
            && self.max_value_probability_error <= tolerance
            && self.max_support_probability_error <= tolerance
    }
}

/// Measure the value register at each of its possible outcomes in turn
/// and inspect the collapsed states.
///
/// Outcomes are forced by drawing at the lower CDF boundary of each
/// value, accumulated in the same order the measurement walks, so the
/// returned outcome is exact rather than sampled.
pub fn distillation_check(f: &SimonFunction) -> Result<DistillationReport> {
    let state = prepare_parallel_state(f)?;
    let marginal = state.marginal(Register::V);
    let n = f.n();
    let dim = state.layout().register_dim();
    let expected_probability = 2.0f64.powi(1 - n as i32);

    let mut outcomes = Vec::new();
    let mut max_value_probability_error = 0.0f64;
    let mut max_support_probability_error = 0.0f64;
    let mut support_ok = true;
    let mut cumulative = 0.0;
    for (w, &p) in marginal.iter().enumerate() {
        if p > 0.0 {
            let measured = state.measure(Register::V, cumulative)?;
            if measured.value != w as u64 {
                return Err(Error::InvalidState {
                    reason: format!(
                        "boundary draw for value {w:x} selected {:x}",
                        measured.value
                    ),
                });
            }
            let post = &measured.post_state;
            let mut support = Vec::new();
            for x in 0..dim as u64 {
                let amp = post.amplitude(x, w as u64);
                if amp != Complex64::new(0.0, 0.0) {
                    support.push(x);
                    max_support_probability_error =
                        max_support_probability_error.max((amp.norm_sqr() - 0.5).abs());
                }
            }
            // Projection zeroes every other column exactly.
            for k in 0..post.amplitudes().len() {
                if post.layout().component(k, Register::V) != w as u64 {
                    support_ok &= post.amplitudes()[k] == Complex64::new(0.0, 0.0);
                }
            }
            support_ok &= support.len() == 2
                && f.preimages(w as u64) == Some((support[0], support[1]));
            max_value_probability_error = max_value_probability_error
                .max((measured.probability - expected_probability).abs());
            outcomes.push(DistillationOutcome {
                value: w as u64,
                probability: measured.probability,
                support,
            });
        }
        cumulative += p;
    }
    // Every range value must have shown up as a positive-probability
    // outcome, and nothing else.
    support_ok &= outcomes.iter().map(|o| o.value).collect::<Vec<_>>() == f.range_values();
    Ok(DistillationReport {
        n,
        outcomes,
        max_value_probability_error,
        max_support_probability_error,
        support_ok,
    })
}

/// Run rounds until the constraint system determines the shift, then
/// solve for it.
///
/// Draws come from a ChaCha stream seeded with `seed`, so runs are
/// reproducible. Exceeding `max_rounds` before reaching rank n − 1
/// returns [`Error::BudgetExhausted`] carrying the partial report.
pub fn recover_hidden_shift(
    f: &SimonFunction,
    measure_v: bool,
    seed: u64,
    max_rounds: usize,
) -> Result<RunReport> {
    use rand::SeedableRng;
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut system = ConstraintSystem::new(n);
    let mut rank_trajectory = Vec::new();
    let mut rounds = 0usize;
    while system.rank() < n - 1 {
        if rounds >= max_rounds {
            let report = RunReport {
                n,
                seed,
                measure_v,
                rounds,
                oracle_queries: rounds as u64,
                rank_trajectory,
                recovered: None,
                success: false,
            };
            return Err(Error::BudgetExhausted {
                max_rounds,
                rank: system.rank(),
                report: Box::new(report),
            });
        }
        let mut sample = run_round(f, measure_v, &mut rng)?;
        rounds += 1;
        system.add_row(sample.z);
        sample.rank_after = system.rank();
        rank_trajectory.push(sample.rank_after);
    }
    let shift = system.solve_hidden_shift()?;
    Ok(RunReport {
        n,
        seed,
        measure_v,
        rounds,
        oracle_queries: rounds as u64,
        rank_trajectory,
        recovered: Some(to_hex(shift.value(), n)),
        success: shift == f.hidden_shift(),
    })
}
