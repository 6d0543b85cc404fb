//! Dense statevector simulation of two n-qubit registers.
//!
//! The joint system is an argument register `a` and a function-value
//! register `v`, each n qubits wide. A joint basis index `k` in
//! `[0, 4^n)` encodes the pair `(x, y)` as
//!
//! ```text
//! k = x * 2^n + y
//! ```
//!
//! so register `a` occupies the high n bits and register `v` the low
//! n bits. This convention is fixed here and used everywhere amplitudes,
//! marginals and file formats are concerned. Within a register an n-bit
//! value is an ordinary unsigned integer; bit strings are written
//! most-significant-bit first, e.g. `10` for the 2-bit value 2.
//!
//! All public operations preserve normalization to within
//! [`NORM_TOLERANCE`]; the oracle application is an exact basis
//! permutation and preserves it bit-for-bit.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::oracle::SimonFunction;

/// Default capacity bound on the per-register qubit count. A state at
/// n = 12 holds 4^12 ≈ 17M complex amplitudes (~270 MB); anything larger
/// must be opted into explicitly.
pub const DEFAULT_MAX_N: usize = 12;

/// Environment variable overriding the capacity bound used by
/// [`RegisterLayout::new`].
pub const MAX_N_ENV_VAR: &str = "SIMONSIM_MAX_N";

/// The capacity bound in effect: [`MAX_N_ENV_VAR`] when set to a number,
/// otherwise [`DEFAULT_MAX_N`].
pub fn effective_max_n() -> usize {
    std::env::var(MAX_N_ENV_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_N)
}

/// Tolerance on `|Σ|amp|² − 1|` after every public operation.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// One of the two n-qubit registers of the joint state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Register {
    /// The argument register holding x.
    A,
    /// The function-value register holding f(x).
    V,
}

impl std::fmt::Display for Register {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Register::A => write!(f, "a"),
            Register::V => write!(f, "v"),
        }
    }
}

/// Width and bit placement of the two registers.
///
/// Constructing a layout enforces the capacity bound, so every layout in
/// circulation describes a state that fits in memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    n: usize,
}

impl RegisterLayout {
    /// Layout for two n-qubit registers under the ambient capacity bound
    /// (the default, unless overridden through the environment).
    pub fn new(n: usize) -> Result<Self> {
        Self::with_capacity(n, effective_max_n())
    }

    /// Layout with an explicit capacity bound (for configured overrides).
    pub fn with_capacity(n: usize, max_n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidState {
                reason: "register width n must be at least 1".into(),
            });
        }
        if n > max_n {
            return Err(Error::CapacityExceeded { n, max_n });
        }
        Ok(Self { n })
    }

    /// Qubits per register.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total qubit count of the joint system (2n).
    pub fn qubit_count(&self) -> usize {
        2 * self.n
    }

    /// Qubit indices of register `a`.
    pub fn a_qubits(&self) -> Range<usize> {
        0..self.n
    }

    /// Qubit indices of register `v`.
    pub fn v_qubits(&self) -> Range<usize> {
        self.n..2 * self.n
    }

    /// Number of basis values per register (2^n).
    pub fn register_dim(&self) -> usize {
        1 << self.n
    }

    /// Number of joint basis states (4^n).
    pub fn dimension(&self) -> usize {
        1 << (2 * self.n)
    }

    /// Joint basis index of the pair (x, y).
    pub fn joint_index(&self, x: u64, y: u64) -> usize {
        debug_assert!(x < self.register_dim() as u64 && y < self.register_dim() as u64);
        ((x as usize) << self.n) | y as usize
    }

    /// The chosen register's component of a joint basis index.
    pub fn component(&self, k: usize, register: Register) -> u64 {
        match register {
            Register::A => (k >> self.n) as u64,
            Register::V => (k & (self.register_dim() - 1)) as u64,
        }
    }

    /// Joint-index bit positions spanned by the chosen register.
    fn joint_bits(&self, register: Register) -> Range<usize> {
        match register {
            Register::A => self.n..2 * self.n,
            Register::V => 0..self.n,
        }
    }
}

/// Dense complex amplitude array over the joint (a, v) basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

/// Result of measuring one register: the observed value, its
/// pre-measurement probability and the collapsed, renormalized state.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub register: Register,
    pub value: u64,
    pub probability: f64,
    pub post_state: StateVector,
}

impl StateVector {
    /// The joint basis state |0⟩_a |0⟩_v.
    pub fn zero(layout: RegisterLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dimension()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { layout, amps }
    }

    /// Build a state from raw amplitudes, validating length and norm.
    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dimension() {
            return Err(Error::InvalidState {
                reason: format!(
                    "amplitude array has length {}, layout needs {}",
                    amps.len(),
                    layout.dimension()
                ),
            });
        }
        let state = Self { layout, amps };
        let norm = state.norm_sqr_sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState {
                reason: format!("state is not normalized: Σ|amp|² = {norm}"),
            });
        }
        Ok(state)
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of the joint basis state |x⟩_a |y⟩_v.
    pub fn amplitude(&self, x: u64, y: u64) -> Complex64 {
        self.amps[self.layout.joint_index(x, y)]
    }

    /// Σ_k |amplitude_k|².
    pub fn norm_sqr_sum(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply H^⊗n to the chosen register, leaving the other untouched.
    pub fn hadamard(mut self, register: Register) -> Self {
        for bit in self.layout.joint_bits(register) {
            butterfly_pass(&mut self.amps, bit);
        }
        self
    }

    /// Apply the reversible oracle |x⟩|y⟩ → |x⟩|y ⊕ f(x)⟩.
    ///
    /// This is a permutation of basis states, so normalization is
    /// preserved exactly and applying the oracle twice is the identity.
    pub fn apply_oracle(mut self, f: &SimonFunction) -> Result<Self> {
        if f.n() != self.layout.n() {
            return Err(Error::DimensionMismatch {
                expected: self.layout.n(),
                actual: f.n(),
            });
        }
        let n = self.layout.n();
        let dim = self.layout.register_dim();
        for x in 0..dim as u64 {
            let fx = f.value(x) as usize;
            if fx == 0 {
                continue;
            }
            let base = (x as usize) << n;
            for y in 0..dim {
                let y2 = y ^ fx;
                if y < y2 {
                    self.amps.swap(base | y, base | y2);
                }
            }
        }
        Ok(self)
    }

    /// Exact marginal probability of each value of the chosen register.
    pub fn marginal(&self, register: Register) -> Vec<f64> {
        let dim = self.layout.register_dim();
        let mut probs = vec![0.0; dim];
        match register {
            Register::A => {
                for (x, p) in probs.iter_mut().enumerate() {
                    let block = &self.amps[x << self.layout.n()..(x + 1) << self.layout.n()];
                    *p = block.iter().map(|a| a.norm_sqr()).sum();
                }
            }
            Register::V => {
                let mask = dim - 1;
                for (k, amp) in self.amps.iter().enumerate() {
                    probs[k & mask] += amp.norm_sqr();
                }
            }
        }
        probs
    }

    /// Measure the chosen register using one uniform draw from [0, 1).
    ///
    /// The outcome value is selected by inverse CDF over outcome values in
    /// ascending numeric order, so the set of draws yielding a value `w`
    /// is the half-open interval of length equal to its marginal
    /// probability. The returned post-state is the projection onto the
    /// observed value, renormalized; amplitudes of every non-matching
    /// basis state are exactly zero.
    pub fn measure(&self, register: Register, draw: f64) -> Result<MeasurementOutcome> {
        if !(0.0..1.0).contains(&draw) {
            return Err(Error::InvalidDraw { draw });
        }
        let marginal = self.marginal(register);
        let value = select_outcome(&marginal, draw) as u64;
        let probability = marginal[value as usize];
        let inv_norm = 1.0 / probability.sqrt();
        let mut amps = self.amps.clone();
        for (k, amp) in amps.iter_mut().enumerate() {
            if self.layout.component(k, register) == value {
                *amp *= inv_norm;
            } else {
                *amp = Complex64::new(0.0, 0.0);
            }
        }
        Ok(MeasurementOutcome {
            register,
            value,
            probability,
            post_state: StateVector {
                layout: self.layout,
                amps,
            },
        })
    }
}

/// One Hadamard butterfly over the given joint-index bit, with the 1/√2
/// scaling folded in.
fn butterfly_pass(amps: &mut [Complex64], bit: usize) {
    let step = 1usize << bit;
    let mut base = 0;
    while base < amps.len() {
        for i in base..base + step {
            let lo = amps[i];
            let hi = amps[i + step];
            amps[i] = (lo + hi) * FRAC_1_SQRT_2;
            amps[i + step] = (lo - hi) * FRAC_1_SQRT_2;
        }
        base += step << 1;
    }
}

/// Apply H^⊗qubits to a bare 2^qubits amplitude vector.
///
/// Used on single-register sub-vectors; `StateVector::hadamard` is the
/// same butterflies run over the register's joint-index bit range.
pub(crate) fn hadamard_transform(amps: &mut [Complex64], qubits: usize) {
    debug_assert_eq!(amps.len(), 1 << qubits);
    for bit in 0..qubits {
        butterfly_pass(amps, bit);
    }
}

/// Inverse-CDF selection over outcomes in ascending numeric order.
///
/// The cumulative sum is accumulated in index order; callers that need to
/// target a specific outcome can reproduce the same boundary by summing
/// the marginal in the same order. Falls back to the last
/// positive-probability outcome if rounding leaves the total below the
/// draw.
pub(crate) fn select_outcome(probs: &[f64], draw: f64) -> usize {
    let mut cumulative = 0.0;
    let mut fallback = 0;
    for (w, &p) in probs.iter().enumerate() {
        cumulative += p;
        if p > 0.0 {
            fallback = w;
            if draw < cumulative {
                return w;
            }
        }
    }
    fallback
}
