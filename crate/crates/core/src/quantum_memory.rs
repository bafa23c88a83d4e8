//! Dense statevector model of the amplitude-encoded memory.
//!
//! The register holds one ancilla and n data qubits. The ancilla-0 branch
//! carries a_ψ·ψ(x_j)/√𝒩; for a_ψ < 1 the ancilla-1 branch carries the
//! remaining weight spread uniformly over all 2ⁿ indices.
//!
//! Windows are always given in the original (unshifted) index space. A
//! memory that has been cyclically shifted by W stores original index k at
//! physical slot (k - W) mod 2ⁿ, so measuring "all zeros from bit p up" on
//! the shifted register is the window [W, W + 2ᵖ) of the original.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_model::GridFunction;
use crate::numeric::neumaier_sum;

/// Amplitudes on both ancilla branches.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    pub good: Vec<Complex64>,
    /// Empty when the preparation is unitary (a_ψ = 1).
    pub bad: Vec<Complex64>,
}

impl Statevector {
    pub fn norm_sq(&self) -> f64 {
        neumaier_sum(self.good.iter().chain(self.bad.iter()).map(|c| c.norm_sqr()))
    }

    /// Squared norm of the ancilla-0 amplitudes at physical slots
    /// `[start, start + len)`.
    pub fn physical_probability(&self, start: usize, len: usize) -> f64 {
        neumaier_sum(self.good[start..start + len].iter().map(|c| c.norm_sqr()))
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            let re = neumaier_sum(a.iter().zip(b).map(|(x, y)| (x.conj() * y).re));
            let im = neumaier_sum(a.iter().zip(b).map(|(x, y)| (x.conj() * y).im));
            Complex64::new(re, im)
        };
        dot(&self.good, &other.good) + dot(&self.bad, &other.bad)
    }
}

/// Prepared memory state, possibly cyclically shifted.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumMemory {
    n: u32,
    a_psi: f64,
    state: Statevector,
    shift_offset: usize,
}

/// Good subspace for amplitude estimation: ancilla 0 and original index in
/// `[window_start, window_start + 2^window_log2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodSet {
    pub window_start: usize,
    pub window_log2: u32,
}

impl GoodSet {
    pub fn new(window_start: usize, window_log2: u32) -> Self {
        GoodSet {
            window_start,
            window_log2,
        }
    }

    pub fn len(&self) -> usize {
        1usize << self.window_log2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn end(&self) -> usize {
        self.window_start + self.len()
    }

    fn validate(&self, n: u32) -> Result<()> {
        if self.window_log2 > n || self.end() > 1usize << n {
            return Err(Error::out_of_range(
                "good-set window",
                format!("[{}, {}) exceeds 2^{n}", self.window_start, self.end()),
            ));
        }
        Ok(())
    }
}

impl QuantumMemory {
    /// Loads the grid into amplitudes with sub-normalization `a_psi`.
    pub fn prepare(grid: &GridFunction, a_psi: f64) -> Result<Self> {
        if !(a_psi > 0.0 && a_psi <= 1.0) {
            return Err(Error::out_of_range("a_psi", format!("{a_psi}, need 0 < a_psi <= 1")));
        }
        let len = grid.values.len();
        let amp = a_psi / grid.norm_sq.sqrt();
        let good = grid.values.iter().map(|v| Complex64::new(amp * v, 0.0)).collect();
        let bad = if a_psi < 1.0 {
            let junk = ((1.0 - a_psi * a_psi) / len as f64).sqrt();
            vec![Complex64::new(junk, 0.0); len]
        } else {
            Vec::new()
        };
        Ok(QuantumMemory {
            n: grid.n,
            a_psi,
            state: Statevector { good, bad },
            shift_offset: 0,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn a_psi(&self) -> f64 {
        self.a_psi
    }

    pub fn shift_offset(&self) -> usize {
        self.shift_offset
    }

    pub fn state(&self) -> &Statevector {
        &self.state
    }

    pub fn amplitudes_good(&self) -> &[Complex64] {
        &self.state.good
    }

    pub fn amplitudes_bad(&self) -> &[Complex64] {
        &self.state.bad
    }

    /// Physical slot holding original index `k`.
    #[inline]
    pub fn physical_index(&self, k: usize) -> usize {
        let d = self.dim();
        (k + d - self.shift_offset % d) % d
    }

    /// S_{-W}: slot k of the result holds slot (k + W) mod 2ⁿ of the input.
    pub fn shift(&self, w: usize) -> Result<Self> {
        let d = self.dim();
        if w >= d {
            return Err(Error::out_of_range("shift", format!("W = {w}, need W < {d}")));
        }
        let mut out = self.clone();
        out.state.good.rotate_left(w);
        if !out.state.bad.is_empty() {
            out.state.bad.rotate_left(w);
        }
        out.shift_offset = (self.shift_offset + w) % d;
        Ok(out)
    }

    /// Exact probability of the good set, window in original indexing.
    pub fn prefix_probability(&self, good: &GoodSet) -> Result<f64> {
        good.validate(self.n)?;
        Ok(window_probability(&self.state, self, good))
    }

    pub fn total_norm_sq(&self) -> f64 {
        self.state.norm_sq()
    }

    pub fn good_branch_norm_sq(&self) -> f64 {
        self.state.physical_probability(0, self.dim())
    }

    pub(crate) fn validate_window(&self, good: &GoodSet) -> Result<()> {
        good.validate(self.n)
    }
}

/// Probability of `good` in an arbitrary state laid out like `mem`.
pub(crate) fn window_probability(state: &Statevector, mem: &QuantumMemory, good: &GoodSet) -> f64 {
    let d = mem.dim();
    let start = mem.physical_index(good.window_start);
    let len = good.len();
    if start + len <= d {
        state.physical_probability(start, len)
    } else {
        let head = d - start;
        state.physical_probability(start, head) + state.physical_probability(0, len - head)
    }
}

/// Flips the sign of every good-set amplitude in place.
pub(crate) fn reflect_window(state: &mut Statevector, mem: &QuantumMemory, good: &GoodSet) {
    let d = mem.dim();
    let start = mem.physical_index(good.window_start);
    for i in 0..good.len() {
        let slot = (start + i) % d;
        state.good[slot] = -state.good[slot];
    }
}
