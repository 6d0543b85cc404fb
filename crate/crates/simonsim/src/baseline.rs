//! Classical collision search and query-cost accounting.
//!
//! The classical competition for shift recovery is finding one colliding
//! argument pair: x₁ ≠ x₂ with f(x₁) = f(x₂) reveals r = x₁ ⊕ x₂
//! immediately, since the promise allows no other collisions. Two
//! strategies are provided — a deterministic ascending scan and a
//! randomized birthday search — plus a cost report that puts quantum
//! rounds, classical queries and the size of a written-out state side by
//! side.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::oracle::CountingOracle;
use crate::pipeline::RunReport;

/// Classical search strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Evaluate arguments in ascending order until a value repeats.
    Scan,
    /// Evaluate uniformly random fresh arguments until a value repeats.
    Birthday,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Scan => write!(f, "scan"),
            Strategy::Birthday => write!(f, "birthday"),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "scan" => Ok(Strategy::Scan),
            "birthday" => Ok(Strategy::Birthday),
            other => Err(format!("unknown strategy {other:?} (scan, birthday)")),
        }
    }
}

/// A found collision: the ordered pair and what it cost to find.
/// x₁ ⊕ x₂ is the hidden shift.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CollisionResult {
    pub n: usize,
    pub strategy: Strategy,
    /// Smaller argument of the colliding pair.
    pub x1: u64,
    /// Larger argument of the colliding pair.
    pub x2: u64,
    /// Function evaluations spent.
    pub queries: u64,
}

impl CollisionResult {
    pub fn offset(&self) -> u64 {
        self.x1 ^ self.x2
    }
}

/// Scan arguments upward until a value repeats.
///
/// Resets the oracle's counter on entry, so `queries` is this search's
/// own cost. For an evenly-spaced table the first repeat happens at
/// x = 2^h where h is the highest set bit of the shift, i.e. after
/// 2^h + 1 evaluations — at worst 2^(n−1) + 1.
pub fn scan_collision(oracle: &mut CountingOracle) -> CollisionResult {
    oracle.reset();
    let n = oracle.n();
    let mut first_preimage: HashMap<u64, u64> = HashMap::new();
    for x in 0..1u64 << n {
        let v = oracle.evaluate(x);
        if let Some(&x1) = first_preimage.get(&v) {
            return CollisionResult {
                n,
                strategy: Strategy::Scan,
                x1,
                x2: x,
                queries: oracle.queries(),
            };
        }
        first_preimage.insert(v, x);
    }
    unreachable!("an evenly spaced table repeats a value within 2^(n-1) + 1 evaluations");
}

/// Query uniformly random arguments until a value repeats.
///
/// Arguments already queried are skipped without spending an evaluation,
/// so `queries` counts distinct arguments only. Resets the oracle's
/// counter on entry. Deterministic per RNG state.
pub fn birthday_collision(oracle: &mut CountingOracle, rng: &mut ChaCha8Rng) -> CollisionResult {
    oracle.reset();
    let n = oracle.n();
    let dim = 1u64 << n;
    let mut first_preimage: HashMap<u64, u64> = HashMap::new();
    let mut queried: HashSet<u64> = HashSet::new();
    loop {
        let x = rng.gen_range(0..dim);
        if !queried.insert(x) {
            continue;
        }
        let v = oracle.evaluate(x);
        if let Some(&x1) = first_preimage.get(&v) {
            return CollisionResult {
                n,
                strategy: Strategy::Birthday,
                x1: x1.min(x),
                x2: x1.max(x),
                queries: oracle.queries(),
            };
        }
        first_preimage.insert(v, x);
    }
}

/// Number of terms in the fully written-out argument-value superposition:
/// one per argument, 2^n.
pub fn printout_term_count(n: usize) -> u64 {
    assert!((1..=63).contains(&n), "width {n} outside 1..=63");
    1u64 << n
}

/// Side-by-side cost accounting for one problem instance.
///
/// `quantum_measurement_units` charges each round one measurement pass
/// over all 2n qubits (readout time grows linearly with register width):
/// rounds × 2n. `printout_terms` and `printout_term_bits` size the
/// alternative of printing the full superposition: 2^n terms of 2n bits
/// each. Arms not exercised in a given run are null.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CostReport {
    pub n: usize,
    pub quantum_rounds: Option<usize>,
    pub quantum_oracle_queries: Option<u64>,
    pub quantum_measurement_units: Option<u64>,
    pub classical_scan_queries: Option<u64>,
    pub classical_birthday_queries: Option<u64>,
    pub printout_terms: u64,
    pub printout_term_bits: u64,
}

/// Assemble the report for a quantum run plus the classical searches run
/// against the same instance. All inputs must agree on the register
/// width; a mismatch means they measured different problems.
pub fn build_cost_report(
    run: &RunReport,
    scan: &CollisionResult,
    birthday: Option<&CollisionResult>,
) -> Result<CostReport> {
    for (label, width) in [("scan", Some(scan.n)), ("birthday", birthday.map(|b| b.n))] {
        if let Some(width) = width {
            if width != run.n {
                return Err(Error::InvalidState {
                    reason: format!(
                        "cost report mixes widths: quantum n = {}, {label} n = {width}",
                        run.n
                    ),
                });
            }
        }
    }
    Ok(CostReport {
        n: run.n,
        quantum_rounds: Some(run.rounds),
        quantum_oracle_queries: Some(run.oracle_queries),
        quantum_measurement_units: Some((run.rounds * 2 * run.n) as u64),
        classical_scan_queries: Some(scan.queries),
        classical_birthday_queries: birthday.map(|b| b.queries),
        printout_terms: printout_term_count(run.n),
        printout_term_bits: 2 * run.n as u64,
    })
}

/// Lower median of a count sample: element ⌊(len−1)/2⌋ after sorting.
/// Sorts the slice in place; panics on an empty slice.
pub fn lower_median(values: &mut [u64]) -> u64 {
    assert!(!values.is_empty(), "median of an empty sample");
    values.sort_unstable();
    values[(values.len() - 1) / 2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{HiddenShift, SimonFunction};
    use rand::SeedableRng;

    fn oracle_for(n: usize, r: u64, seed: u64) -> CountingOracle {
        CountingOracle::new(SimonFunction::generate(n, HiddenShift::new(r).unwrap(), seed).unwrap())
    }

    #[test]
    fn scan_finds_the_documented_pair_in_three_queries() {
        let f = SimonFunction::from_table(2, vec![1, 2, 2, 1]).unwrap();
        let result = scan_collision(&mut CountingOracle::new(f));
        assert_eq!(result.x1, 1);
        assert_eq!(result.x2, 2);
        assert_eq!(result.queries, 3);
        assert_eq!(result.offset(), 3);
        assert_eq!(result.strategy, Strategy::Scan);
    }

    #[test]
    fn scan_cost_follows_the_shift_high_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=8 {
            for _ in 0..6 {
                let r = rng.gen_range(1..1u64 << n);
                let mut oracle = oracle_for(n, r, rng.gen());
                let result = scan_collision(&mut oracle);
                let high_bit = 63 - r.leading_zeros();
                assert_eq!(result.queries, (1u64 << high_bit) + 1, "n={n} r={r:#b}");
                assert_eq!(result.offset(), r);
                assert!(result.x1 < result.x2);
                assert!(result.queries <= (1 << (n - 1)) + 1);
            }
        }
    }

    #[test]
    fn scan_is_cheapest_when_the_shift_is_one() {
        let result = scan_collision(&mut oracle_for(6, 1, 5));
        assert_eq!(result.queries, 2);
        assert_eq!((result.x1, result.x2), (0, 1));
    }

    #[test]
    fn birthday_pairs_reveal_the_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for n in 1..=8 {
            let r = rng.gen_range(1..1u64 << n);
            let mut oracle = oracle_for(n, r, rng.gen());
            for _ in 0..5 {
                let result = birthday_collision(&mut oracle, &mut rng);
                assert_eq!(result.offset(), r, "n={n}");
                assert!(result.x1 < result.x2);
                assert!(result.queries >= 2);
                // Pigeonhole: one more query than distinct values forces
                // a repeat.
                assert!(result.queries <= (1 << (n - 1)) + 1);
            }
        }
    }

    #[test]
    fn birthday_is_deterministic_per_rng_state() {
        let mut oracle = oracle_for(7, 0b101_0010, 3);
        let mut rng_a = ChaCha8Rng::seed_from_u64(8);
        let mut rng_b = ChaCha8Rng::seed_from_u64(8);
        let a = birthday_collision(&mut oracle, &mut rng_a);
        let b = birthday_collision(&mut oracle, &mut rng_b);
        assert_eq!(a, b);
    }

    #[test]
    fn birthday_cost_scales_near_the_square_root() {
        // Median over enough trials sits within a factor 4 of 2^(n/2).
        let n = 10;
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let mut oracle = oracle_for(n, 0b10_0110_1001, 2);
        let mut queries: Vec<u64> = (0..201)
            .map(|_| birthday_collision(&mut oracle, &mut rng).queries)
            .collect();
        let median = lower_median(&mut queries);
        let sqrt_scale = 2.0f64.powf(n as f64 / 2.0);
        assert!(
            (median as f64) < 4.0 * sqrt_scale && (median as f64) > sqrt_scale / 4.0,
            "median {median} vs 2^(n/2) = {sqrt_scale}"
        );
    }

    #[test]
    fn birthday_median_doubles_when_width_grows_by_two() {
        // Median queries track 2^(n/2), so two extra bits should double
        // the cost, give or take half.
        let median_for = |n: usize| {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let r = rng.gen_range(1..1u64 << n);
            let mut oracle = oracle_for(n, r, rng.gen());
            let mut queries: Vec<u64> = (0..1000)
                .map(|_| birthday_collision(&mut oracle, &mut rng).queries)
                .collect();
            lower_median(&mut queries) as f64
        };
        let mut previous = median_for(8);
        for n in [10, 12] {
            let current = median_for(n);
            let ratio = current / previous;
            assert!(
                (1.0..=3.0).contains(&ratio),
                "median went {previous} -> {current} from n = {} to {n}",
                n - 2
            );
            previous = current;
        }
    }

    #[test]
    fn searches_reset_the_counter_between_runs() {
        let mut oracle = oracle_for(4, 0b1000, 1);
        let first = scan_collision(&mut oracle);
        let second = scan_collision(&mut oracle);
        assert_eq!(first.queries, second.queries);
        assert_eq!(oracle.queries(), second.queries);
    }

    #[test]
    fn printout_grows_exponentially() {
        assert_eq!(printout_term_count(1), 2);
        assert_eq!(printout_term_count(2), 4);
        assert_eq!(printout_term_count(10), 1024);
        assert_eq!(printout_term_count(63), 1u64 << 63);
    }

    #[test]
    fn cost_report_wires_all_arms() {
        let run = RunReport {
            n: 4,
            seed: 9,
            measure_v: true,
            rounds: 5,
            oracle_queries: 5,
            rank_trajectory: vec![1, 2, 2, 3, 3],
            recovered: Some("b".into()),
            success: true,
        };
        let scan = CollisionResult {
            n: 4,
            strategy: Strategy::Scan,
            x1: 3,
            x2: 8,
            queries: 9,
        };
        let birthday = CollisionResult {
            n: 4,
            strategy: Strategy::Birthday,
            x1: 3,
            x2: 8,
            queries: 4,
        };
        let report = build_cost_report(&run, &scan, Some(&birthday)).unwrap();
        assert_eq!(report.quantum_rounds, Some(5));
        assert_eq!(report.quantum_measurement_units, Some(40)); // 5 × 2·4
        assert_eq!(report.classical_scan_queries, Some(9));
        assert_eq!(report.classical_birthday_queries, Some(4));
        assert_eq!(report.printout_terms, 16);
        assert_eq!(report.printout_term_bits, 8);
        let without_birthday = build_cost_report(&run, &scan, None).unwrap();
        assert_eq!(without_birthday.classical_birthday_queries, None);

        let mut foreign = scan;
        foreign.n = 5;
        let err = build_cost_report(&run, &foreign, None).unwrap_err();
        assert!(err.to_string().contains("mixes widths"), "{err}");
    }

    #[test]
    fn lower_median_takes_the_left_of_an_even_split() {
        assert_eq!(lower_median(&mut [5]), 5);
        assert_eq!(lower_median(&mut [4, 1, 3, 2]), 2);
        assert_eq!(lower_median(&mut [9, 1, 5]), 5);
    }

    #[test]
    fn strategy_parses_and_prints_lowercase_names() {
        assert_eq!("scan".parse::<Strategy>().unwrap(), Strategy::Scan);
        assert_eq!("birthday".parse::<Strategy>().unwrap(), Strategy::Birthday);
        assert!("walk".parse::<Strategy>().is_err());
        assert_eq!(Strategy::Scan.to_string(), "scan");
        assert_eq!(
            serde_json::to_string(&Strategy::Birthday).unwrap(),
            "\"birthday\""
        );
    }
}
