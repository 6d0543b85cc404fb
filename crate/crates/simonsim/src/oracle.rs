//! Hidden-shift function tables and the promise they must satisfy.
//!
//! A function f: B^n → B^n is *evenly spaced* with shift r ≠ 0 when
//! f(x) = f(x ⊕ r) for every x and no other pair of arguments collides;
//! equivalently, every value in the range has exactly two preimages that
//! differ by r, and the range has exactly 2^(n−1) distinct values (for
//! n = 1, a single value taken twice). Functions here are explicit
//! tables, so the promise is checkable and generation can sample
//! uniformly over all valid tables for a given shift.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonzero shift value. Width validation against a specific n happens
/// where the shift meets a function or register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HiddenShift(u64);

impl HiddenShift {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(Error::ZeroShift);
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for HiddenShift {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

/// An explicit function table satisfying the evenly-spaced promise.
///
/// Construction always verifies the promise, so holding a `SimonFunction`
/// is proof that the shift exists and is the stored one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimonFunction {
    n: usize,
    table: Vec<u64>,
    shift: HiddenShift,
}

impl SimonFunction {
    /// Sample a uniformly random promise-satisfying table with the given
    /// shift. Deterministic per seed.
    pub fn generate(n: usize, shift: HiddenShift, seed: u64) -> Result<Self> {
        check_width(n)?;
        if shift.value() >> n != 0 {
            return Err(Error::ValueOutOfRange {
                value: shift.value(),
                n,
            });
        }
        let dim = 1u64 << n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // A random ordered half of B^n: the range values, one per
        // argument pair {x, x ⊕ r}, assigned in ascending order of the
        // smaller pair member.
        let mut values: Vec<u64> = (0..dim).collect();
        values.shuffle(&mut rng);
        let mut next_value = values.into_iter();
        let mut table = vec![u64::MAX; dim as usize];
        for x in 0..dim {
            if table[x as usize] == u64::MAX {
                let v = next_value.next().expect("one value per pair");
                table[x as usize] = v;
                table[(x ^ shift.value()) as usize] = v;
            }
        }
        Ok(Self { n, table, shift })
    }

    /// Adopt an explicit table, verifying the promise and recovering the
    /// shift from it.
    pub fn from_table(n: usize, table: Vec<u64>) -> Result<Self> {
        let shift = Self::verify_promise(n, &table)?;
        Ok(Self { n, table, shift })
    }

    /// Check that a table is evenly spaced and return its shift.
    ///
    /// Errors identify the first argument (in ascending order) at which
    /// the table breaks the promise.
    pub fn verify_promise(n: usize, table: &[u64]) -> Result<HiddenShift> {
        check_width(n)?;
        let dim = 1usize << n;
        if table.len() != dim {
            return Err(Error::InvalidState {
                reason: format!(
                    "function table has {} entries, width {n} needs {dim}",
                    table.len()
                ),
            });
        }
        for (x, &v) in table.iter().enumerate() {
            if v >> n != 0 {
                let _ = x;
                return Err(Error::ValueOutOfRange { value: v, n });
            }
        }
        // First preimage of each value seen so far, indexed by value.
        let mut first_seen = vec![u64::MAX; dim];
        let mut shift: Option<u64> = None;
        for x in 0..dim as u64 {
            let v = table[x as usize] as usize;
            let x1 = first_seen[v];
            if x1 == u64::MAX {
                first_seen[v] = x;
                continue;
            }
            if x1 >> 63 == 1 {
                // High bit marks a value already paired off.
                return Err(Error::PromiseViolation {
                    x,
                    reason: format!("value {:x} has more than two preimages", v),
                });
            }
            let offset = x1 ^ x;
            match shift {
                None => shift = Some(offset),
                Some(r) if r != offset => {
                    return Err(Error::PromiseViolation {
                        x,
                        reason: format!(
                            "pair offset {offset:x} differs from established shift {r:x}"
                        ),
                    });
                }
                Some(_) => {}
            }
            first_seen[v] = x1 | 1 << 63;
        }
        for x in 0..dim as u64 {
            let v = table[x as usize] as usize;
            if first_seen[v] >> 63 == 0 {
                return Err(Error::PromiseViolation {
                    x,
                    reason: format!("value {:x} has only one preimage", v),
                });
            }
        }
        let r = shift.expect("every length-2^n table with n ≥ 1 has at least one pair");
        HiddenShift::new(r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn hidden_shift(&self) -> HiddenShift {
        self.shift
    }

    /// f(x). Panics if x is not an n-bit value; callers hold the width.
    pub fn value(&self, x: u64) -> u64 {
        assert!(
            x >> self.n == 0,
            "argument {x:#x} exceeds function width n={}",
            self.n
        );
        self.table[x as usize]
    }

    /// The other argument mapping to the same value as x.
    pub fn collision_partner(&self, x: u64) -> u64 {
        x ^ self.shift.value()
    }

    /// The distinct range values in ascending order (2^(n−1) of them).
    pub fn range_values(&self) -> Vec<u64> {
        let mut values = self.table.clone();
        values.sort_unstable();
        values.dedup();
        values
    }

    /// The ordered preimage pair (x₁ < x₂) of a range value, if present.
    pub fn preimages(&self, value: u64) -> Option<(u64, u64)> {
        let x1 = (0..self.table.len() as u64).find(|&x| self.table[x as usize] == value)?;
        // x₁ is the first hit scanning upward, so its partner is above it.
        Some((x1, self.collision_partner(x1)))
    }
}

/// Query-counting wrapper around a function table. Every classical and
/// quantum access that should appear in cost accounting goes through
/// `evaluate`.
#[derive(Clone, Debug)]
pub struct CountingOracle {
    f: SimonFunction,
    queries: u64,
}

impl CountingOracle {
    pub fn new(f: SimonFunction) -> Self {
        Self { f, queries: 0 }
    }

    pub fn evaluate(&mut self, x: u64) -> u64 {
        self.queries += 1;
        self.f.value(x)
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn reset(&mut self) {
        self.queries = 0;
    }

    pub fn function(&self) -> &SimonFunction {
        &self.f
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }
}

/// On-disk JSON form of a function table.
///
/// `n` is the register width, `table` lists f(0), f(1), … as lowercase
/// hex strings zero-padded to ⌈n/4⌉ digits, and `r` optionally declares
/// the shift in the same encoding. A declared shift is cross-checked
/// against the table on load.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TableDocument {
    pub n: usize,
    pub table: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
}

impl TableDocument {
    pub fn from_function(f: &SimonFunction, include_shift: bool) -> Self {
        Self {
            n: f.n(),
            table: f.table().iter().map(|&v| to_hex(v, f.n())).collect(),
            r: include_shift.then(|| to_hex(f.hidden_shift().value(), f.n())),
        }
    }

    /// Verify the table and reconcile any declared shift.
    pub fn to_function(&self) -> Result<SimonFunction> {
        let table = self
            .table
            .iter()
            .map(|s| parse_hex(s))
            .collect::<Result<Vec<u64>>>()?;
        let f = SimonFunction::from_table(self.n, table)?;
        if let Some(declared) = &self.r {
            let declared = parse_hex(declared)?;
            if declared != f.hidden_shift().value() {
                return Err(Error::MalformedDocument(format!(
                    "declared shift {declared:x} does not match the table's shift {}",
                    f.hidden_shift()
                )));
            }
        }
        Ok(f)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Hex digits needed for an n-bit value: ⌈n/4⌉.
pub fn hex_width(n: usize) -> usize {
    n.div_ceil(4)
}

/// Lowercase zero-padded hex encoding of an n-bit value.
pub fn to_hex(value: u64, n: usize) -> String {
    format!("{value:0width$x}", width = hex_width(n))
}

pub fn parse_hex(s: &str) -> Result<u64> {
    u64::from_str_radix(s, 16)
        .map_err(|e| Error::MalformedDocument(format!("bad hex value {s:?}: {e}")))
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > 63 {
        return Err(Error::InvalidState {
            reason: format!("function width n={n} outside supported range 1..=63"),
        });
    }
    Ok(())
}
