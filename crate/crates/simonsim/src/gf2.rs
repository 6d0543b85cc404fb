//! Incremental linear algebra over GF(2) for shift recovery.
//!
//! Constraint vectors are n-bit words; the inner product of two words is
//! the parity of their AND. Rows accumulate one at a time in reduced row
//! echelon form, so rank queries are O(1) and each insertion is O(rank).
//! Once the rows span the (n−1)-dimensional space orthogonal to the
//! hidden shift, the null space contains exactly one nonzero vector:
//! the shift itself.

use crate::error::{Error, Result};
use crate::oracle::HiddenShift;

/// GF(2) inner product of two bit vectors: parity of a & b.
pub fn dot(a: u64, b: u64) -> u8 {
    ((a & b).count_ones() & 1) as u8
}

/// An incrementally built GF(2) linear system over n-bit vectors.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    n: usize,
    /// Rows in reduced row echelon form, ordered by descending pivot.
    /// Each row's pivot (highest set bit) appears in no other row.
    rows: Vec<u64>,
}

impl ConstraintSystem {
    pub fn new(n: usize) -> Self {
        assert!((1..=63).contains(&n), "vector width {n} outside 1..=63");
        Self { n, rows: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduced rows, descending by pivot position.
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Insert a constraint vector. Returns true if it was linearly
    /// independent of the rows so far (i.e. the rank grew).
    pub fn add_row(&mut self, z: u64) -> bool {
        assert!(z >> self.n == 0, "row {z:#x} exceeds width n={}", self.n);
        let mut z = z;
        for &row in &self.rows {
            if z & pivot_bit(row) != 0 {
                z ^= row;
            }
        }
        if z == 0 {
            return false;
        }
        // Back-reduce existing rows so the new pivot stays unique to z.
        let p = pivot_bit(z);
        for row in &mut self.rows {
            if *row & p != 0 {
                *row ^= z;
            }
        }
        let at = self.rows.partition_point(|&row| pivot_bit(row) > p);
        self.rows.insert(at, z);
        true
    }

    /// All nonzero vectors orthogonal to every row, ascending.
    ///
    /// There are 2^(n − rank) − 1 of them; callers asking for the whole
    /// set on low-rank wide systems get what they asked for.
    pub fn null_space_nonzero(&self) -> Vec<u64> {
        let free_bits: Vec<u64> = (0..self.n as u32)
            .map(|b| 1u64 << b)
            .filter(|&b| !self.rows.iter().any(|&row| pivot_bit(row) == b))
            .collect();
        let mut vectors = Vec::with_capacity((1usize << free_bits.len()) - 1);
        for combo in 1u64..1 << free_bits.len() {
            let mut v = 0u64;
            for (i, &bit) in free_bits.iter().enumerate() {
                if combo >> i & 1 == 1 {
                    v |= bit;
                }
            }
            // Pivot coordinates follow from the free ones: each reduced
            // row contains its pivot plus free bits only.
            for &row in &self.rows {
                if dot(row & !pivot_bit(row), v) == 1 {
                    v |= pivot_bit(row);
                }
            }
            vectors.push(v);
        }
        vectors.sort_unstable();
        vectors
    }

    /// Extract the shift once the system pins it down exactly.
    ///
    /// Requires rank n − 1, the point at which the null space holds a
    /// single nonzero vector.
    pub fn solve_hidden_shift(&self) -> Result<HiddenShift> {
        let required = self.n - 1;
        if self.rank() < required {
            return Err(Error::InsufficientRank {
                rank: self.rank(),
                required,
            });
        }
        if self.rank() > required {
            return Err(Error::InvalidState {
                reason: format!(
                    "constraint rank {} admits only the zero vector; \
                     some row was not orthogonal to the shift",
                    self.rank()
                ),
            });
        }
        let solutions = self.null_space_nonzero();
        debug_assert_eq!(solutions.len(), 1);
        HiddenShift::new(solutions[0])
    }
}

/// Highest set bit of a nonzero row.
fn pivot_bit(row: u64) -> u64 {
    debug_assert_ne!(row, 0);
    1u64 << (63 - row.leading_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// All nonzero v with row·v = 0 for every raw (unreduced) row.
    fn brute_force_null_space(n: usize, raw_rows: &[u64]) -> Vec<u64> {
        (1u64..1 << n)
            .filter(|&v| raw_rows.iter().all(|&row| dot(row, v) == 0))
            .collect()
    }

    #[test]
    fn two_constraints_pin_down_a_width_three_shift() {
        let mut sys = ConstraintSystem::new(3);
        assert!(sys.add_row(0b110));
        assert!(sys.add_row(0b011));
        assert_eq!(sys.rank(), 2);
        assert_eq!(sys.null_space_nonzero(), vec![0b111]);
        assert_eq!(sys.solve_hidden_shift().unwrap().value(), 0b111);
    }

    #[test]
    fn empty_width_two_system_leaves_every_nonzero_candidate() {
        let sys = ConstraintSystem::new(2);
        assert_eq!(sys.null_space_nonzero(), vec![0b01, 0b10, 0b11]);
    }

    #[test]
    fn single_constraint_suffices_at_width_two() {
        let mut sys = ConstraintSystem::new(2);
        assert!(sys.add_row(0b11));
        assert_eq!(sys.null_space_nonzero(), vec![0b11]);
        assert_eq!(sys.solve_hidden_shift().unwrap().value(), 0b11);
    }

    #[test]
    fn width_one_needs_no_constraints() {
        let sys = ConstraintSystem::new(1);
        assert_eq!(sys.rank(), 0);
        assert_eq!(sys.null_space_nonzero(), vec![1]);
        assert_eq!(sys.solve_hidden_shift().unwrap().value(), 1);
    }

    #[test]
    fn dependent_and_zero_rows_do_not_grow_rank() {
        let mut sys = ConstraintSystem::new(3);
        assert!(!sys.add_row(0));
        assert!(sys.add_row(0b110));
        assert!(sys.add_row(0b011));
        assert!(!sys.add_row(0b101)); // 110 ⊕ 011
        assert!(!sys.add_row(0b110));
        assert_eq!(sys.rank(), 2);
    }

    #[test]
    fn null_space_matches_brute_force_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let n = rng.gen_range(1..=8);
            let rows: Vec<u64> = (0..rng.gen_range(0..=n + 2))
                .map(|_| rng.gen_range(0..1u64 << n))
                .collect();
            let mut sys = ConstraintSystem::new(n);
            for &z in &rows {
                sys.add_row(z);
            }
            assert_eq!(
                sys.null_space_nonzero(),
                brute_force_null_space(n, &rows),
                "n={n} rows={rows:?}"
            );
        }
    }

    #[test]
    fn orthogonal_samples_recover_the_planted_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for n in 2..=10 {
            let r = rng.gen_range(1..1u64 << n);
            let mut sys = ConstraintSystem::new(n);
            let mut additions = 0;
            while sys.rank() < n - 1 {
                let z = rng.gen_range(0..1u64 << n);
                if dot(z, r) == 0 {
                    sys.add_row(z);
                }
                additions += 1;
                assert!(additions < 10_000, "rank stalled at n={n}");
            }
            assert_eq!(sys.solve_hidden_shift().unwrap().value(), r, "n={n}");
        }
    }

    #[test]
    fn solve_reports_rank_deficit_and_excess() {
        let mut sys = ConstraintSystem::new(3);
        sys.add_row(0b110);
        match sys.solve_hidden_shift() {
            Err(Error::InsufficientRank { rank: 1, required: 2 }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        // Full-rank system: only the zero vector remains.
        let mut sys = ConstraintSystem::new(2);
        sys.add_row(0b01);
        sys.add_row(0b10);
        assert!(matches!(
            sys.solve_hidden_shift(),
            Err(Error::InvalidState { .. })
        ));
    }

    proptest! {
        #[test]
        fn rank_is_bounded_and_readding_never_grows_it(
            n in 1usize..=10,
            seed in 0u64..1024,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sys = ConstraintSystem::new(n);
            let mut accepted = Vec::new();
            for _ in 0..2 * n {
                let z = rng.gen_range(0..1u64 << n);
                if sys.add_row(z) {
                    accepted.push(z);
                }
                prop_assert!(sys.rank() <= n);
                prop_assert!(!sys.add_row(z), "re-adding {z:#b} grew the rank");
            }
            prop_assert_eq!(sys.rank(), accepted.len());
            let null = sys.null_space_nonzero();
            prop_assert_eq!(null.len(), (1usize << (n - sys.rank())) - 1);
            for &v in &null {
                for &z in &accepted {
                    prop_assert_eq!(dot(z, v), 0);
                }
            }
        }
    }
}
