//! Dense and sparse statevector simulation.
//!
//! [`DenseState`] executes gate IR directly and is used for the gate-level
//! backend (up to ~20 qubits). [`SparseState`] stores only nonzero
//! amplitudes keyed by packed register values and carries the group states
//! of the element search, whose supports stay tiny compared to the full
//! Hilbert space.
//!
//! The Fourier transform over Z_N ([`DenseState::dft_zn`],
//! [`SparseState::dft_zn`]) is evaluated exactly in O(N^2): at desk scale
//! (N <= 2^14) an approximate construction would only add error to the very
//! quantities these simulations are meant to validate.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{apply_classical, Circuit, Gate};
use crate::error::{Error, Result};

/// Amplitudes below this magnitude are treated as zero and pruned from
/// sparse states. Far below any probability gap the algorithms distinguish.
pub const PRUNE_EPS: f64 = 1e-12;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Kernel sign for the Fourier transform over Z_N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DftDirection {
    /// Kernel `exp(+2 pi i j l / N)`.
    Plus,
    /// Kernel `exp(-2 pi i j l / N)`.
    Minus,
}

impl DftDirection {
    fn sign(self) -> f64 {
        match self {
            DftDirection::Plus => 1.0,
            DftDirection::Minus => -1.0,
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            DftDirection::Plus => DftDirection::Minus,
            DftDirection::Minus => DftDirection::Plus,
        }
    }
}

/// A contiguous run of qubits interpreted as an integer register
/// (little-endian: bit k of the value lives on qubit `lo + k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Register {
    pub lo: usize,
    pub width: usize,
}

impl Register {
    pub fn mask(&self) -> u64 {
        ((1u64 << self.width) - 1) << self.lo
    }
}

/// One measurement: the observed value, the Born probability of that
/// branch, and the RNG stream position that produced it. The measured state
/// itself is collapsed and renormalized in place.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub value: u64,
    pub probability: f64,
    pub rng_word_pos: u128,
}

fn born_pick(probs: &[(u64, f64)], total: f64, rng: &mut ChaCha8Rng) -> (u64, f64) {
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for &(v, p) in probs {
        acc += p;
        if u < acc {
            return (v, p / total);
        }
    }
    let &(v, p) = probs.last().expect("nonempty distribution");
    (v, p / total)
}

/// A full statevector over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// |0...0>.
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        Self::basis_state(num_qubits, 0)
    }

    pub fn basis_state(num_qubits: usize, index: u64) -> Result<Self> {
        if num_qubits > 24 {
            return Err(Error::UnsupportedSize(alloc::format!(
                "dense simulation capped at 24 qubits, got {num_qubits}"
            )));
        }
        let dim = 1usize << num_qubits;
        if index >= dim as u64 {
            return Err(Error::InvalidInput(alloc::format!("basis index {index} out of range")));
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index as usize] = Complex64::ONE;
        Ok(DenseState { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, index: u64) -> Complex64 {
        self.amps[index as usize]
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::InvalidInput(alloc::format!(
                "qubit {q} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Apply one gate; unitary, norm-preserving.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        for q in gate.qubits() {
            self.check_qubit(q)?;
        }
        let dim = self.amps.len();
        match gate {
            Gate::H { target } => {
                let bit = 1usize << target;
                for i in 0..dim {
                    if i & bit == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | bit];
                        self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                        self.amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::Phase { k, target } => {
                let ang = 2.0 * PI / 2f64.powi(*k as i32);
                let ph = Complex64::new(libm::cos(ang), libm::sin(ang));
                let bit = 1usize << target;
                for i in 0..dim {
                    if i & bit != 0 {
                        self.amps[i] *= ph;
                    }
                }
            }
            g => {
                // classical gates permute basis states in 2-cycles
                let target = match g {
                    Gate::X { target } | Gate::Cnot { target, .. } | Gate::Mcx { target, .. } => {
                        *target
                    }
                    Gate::Swap { .. } => 0, // unused below
                    _ => unreachable!(),
                };
                match g {
                    Gate::Swap { a, b } => {
                        let (ba, bb) = (1usize << a, 1usize << b);
                        for i in 0..dim {
                            if i & ba != 0 && i & bb == 0 {
                                self.amps.swap(i, i ^ ba ^ bb);
                            }
                        }
                    }
                    _ => {
                        let tbit = 1usize << target;
                        for i in 0..dim {
                            if i & tbit == 0 && apply_classical(g, i as u64) != i as u64 {
                                self.amps.swap(i, i | tbit);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() > self.num_qubits {
            return Err(Error::InvalidInput(alloc::format!(
                "circuit on {} qubits applied to {} qubits",
                circuit.num_qubits(),
                self.num_qubits
            )));
        }
        for g in circuit.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Relocate amplitudes along a bijection of basis indices.
    pub fn apply_basis_map<F: Fn(u64) -> u64>(&mut self, f: F) -> Result<()> {
        let dim = self.amps.len();
        let mut out = vec![Complex64::ZERO; dim];
        let mut written = vec![false; dim];
        for (i, &a) in self.amps.iter().enumerate() {
            let j = f(i as u64);
            if j >= dim as u64 || written[j as usize] {
                return Err(Error::NonInjectiveMap);
            }
            written[j as usize] = true;
            out[j as usize] = a;
        }
        self.amps = out;
        Ok(())
    }

    /// Exact N-point unitary Fourier transform on `register`, applied per
    /// value of all other qubits. The register's support must lie in 0..N.
    pub fn dft_zn(&mut self, register: Register, n_points: u64, dir: DftDirection) -> Result<()> {
        if register.lo + register.width > self.num_qubits {
            return Err(Error::InvalidInput(alloc::format!(
                "register out of range: lo {} width {}",
                register.lo,
                register.width
            )));
        }
        let reg_dim = 1u64 << register.width;
        if n_points < 1 || n_points > reg_dim {
            return Err(Error::InvalidInput(alloc::format!(
                "N = {n_points} does not fit a {}-qubit register",
                register.width
            )));
        }
        let n = n_points;
        for (i, a) in self.amps.iter().enumerate() {
            if (i as u64 & register.mask()) >> register.lo >= n && a.norm() > PRUNE_EPS {
                return Err(Error::Precondition("register support leaks beyond N - 1"));
            }
        }
        let twiddle = twiddle_table(n, dir);
        let scale = 1.0 / libm::sqrt(n as f64);
        let full_mask = (self.amps.len() - 1) as u64;
        let other_mask = full_mask & !register.mask();
        let mut src = vec![Complex64::ZERO; n as usize];
        let mut other = 0u64;
        loop {
            for j in 0..n {
                src[j as usize] = self.amps[(other | (j << register.lo)) as usize];
            }
            for l in 0..n {
                let mut acc = Complex64::ZERO;
                for j in 0..n {
                    acc += src[j as usize] * twiddle[(j * l % n) as usize];
                }
                self.amps[(other | (l << register.lo)) as usize] = acc * scale;
            }
            other = (other | register.mask()).wrapping_add(1) & other_mask;
            if other == 0 {
                break;
            }
        }
        Ok(())
    }

    /// Measure the listed qubits (bit k of the outcome is qubit `qubits[k]`),
    /// collapse and renormalize in place.
    pub fn measure(&mut self, qubits: &[usize], rng: &mut ChaCha8Rng) -> Result<MeasurementOutcome> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        if qubits.is_empty() || qubits.len() > 24 {
            return Err(Error::InvalidInput(alloc::string::String::from(
                "measure 1..=24 qubits at a time",
            )));
        }
        let extract = |i: u64| -> u64 {
            qubits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (k, &q)| acc | ((i >> q & 1) << k))
        };
        let mut weights = vec![0.0f64; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            weights[extract(i as u64) as usize] += a.norm_sqr();
        }
        let probs: Vec<(u64, f64)> = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(v, &w)| (v as u64, w))
            .collect();
        let total: f64 = probs.iter().map(|&(_, w)| w).sum();
        let word_pos = rng.get_word_pos();
        let (value, probability) = born_pick(&probs, total, rng);
        let scale = 1.0 / libm::sqrt(probability * total);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if extract(i as u64) == value {
                *a *= scale;
            } else {
                *a = Complex64::ZERO;
            }
        }
        Ok(MeasurementOutcome { value, probability, rng_word_pos: word_pos })
    }

    /// Probability of observing `value` on the listed qubits.
    pub fn probability_of(&self, qubits: &[usize], value: u64) -> f64 {
        let extract = |i: u64| -> u64 {
            qubits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (k, &q)| acc | ((i >> q & 1) << k))
        };
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| extract(*i as u64) == value)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Append `extra` qubits above the current ones, initialized to the
    /// basis state `value`.
    pub fn tensor_basis(&self, extra: usize, value: u64) -> Result<DenseState> {
        let total = self.num_qubits + extra;
        if total > 24 {
            return Err(Error::UnsupportedSize(alloc::format!(
                "dense simulation capped at 24 qubits, got {total}"
            )));
        }
        if value >= 1u64 << extra {
            return Err(Error::InvalidInput(alloc::string::String::from(
                "basis value out of range for the new register",
            )));
        }
        let mut out = vec![Complex64::ZERO; 1 << total];
        let offset = (value as usize) << self.num_qubits;
        for (i, &a) in self.amps.iter().enumerate() {
            out[offset | i] = a;
        }
        Ok(DenseState { num_qubits: total, amps: out })
    }

    /// Drop the top qubit, which must carry no amplitude in the |1> branch.
    pub fn drop_top_qubit(&mut self) -> Result<()> {
        if self.num_qubits == 0 {
            return Err(Error::InvalidInput(alloc::string::String::from("no qubit to drop")));
        }
        let half = self.amps.len() / 2;
        if self.amps[half..].iter().any(|a| a.norm() > PRUNE_EPS) {
            return Err(Error::Precondition("top qubit is not |0>"));
        }
        self.amps.truncate(half);
        self.num_qubits -= 1;
        Ok(())
    }

    /// Nonzero amplitudes as sorted (index, amplitude) pairs.
    pub fn nonzero_entries(&self) -> Vec<(u64, Complex64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > PRUNE_EPS)
            .map(|(i, &a)| (i as u64, a))
            .collect()
    }
}

fn twiddle_table(n: u64, dir: DftDirection) -> Vec<Complex64> {
    let sign = dir.sign();
    (0..n)
        .map(|t| {
            let ang = sign * 2.0 * PI * t as f64 / n as f64;
            Complex64::new(libm::cos(ang), libm::sin(ang))
        })
        .collect()
}

/// Amplitudes keyed by packed register values; only nonzero entries are
/// stored (pruning threshold [`PRUNE_EPS`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    register_widths: Vec<u32>,
    amps: BTreeMap<u64, Complex64>,
    normalized: bool,
}

impl SparseState {
    /// A basis state with the given per-register values.
    pub fn basis(register_widths: &[u32], values: &[u64]) -> Result<Self> {
        let total: u32 = register_widths.iter().sum();
        if total > 63 {
            return Err(Error::UnsupportedSize(alloc::format!(
                "sparse keys capped at 63 bits, got {total}"
            )));
        }
        if values.len() != register_widths.len() {
            return Err(Error::RegisterMismatch);
        }
        let mut key = 0u64;
        let mut lo = 0u32;
        for (w, &v) in register_widths.iter().zip(values) {
            if v >= 1u64 << w {
                return Err(Error::InvalidInput(alloc::format!(
                    "value {v} out of range for a {w}-bit register"
                )));
            }
            key |= v << lo;
            lo += w;
        }
        let mut amps = BTreeMap::new();
        amps.insert(key, Complex64::ONE);
        Ok(SparseState { register_widths: register_widths.to_vec(), amps, normalized: true })
    }

    /// Build from (key, amplitude) pairs; amplitudes on equal keys add.
    pub fn from_entries<I>(register_widths: &[u32], entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        let total: u32 = register_widths.iter().sum();
        if total > 63 {
            return Err(Error::UnsupportedSize(alloc::format!(
                "sparse keys capped at 63 bits, got {total}"
            )));
        }
        let limit = if total == 63 { u64::MAX } else { 1u64 << total };
        let mut amps: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (k, a) in entries {
            if k >= limit {
                return Err(Error::InvalidInput(alloc::format!("key {k} out of range")));
            }
            *amps.entry(k).or_insert(Complex64::ZERO) += a;
        }
        amps.retain(|_, a| a.norm() > PRUNE_EPS);
        Ok(SparseState { register_widths: register_widths.to_vec(), amps, normalized: false })
    }

    pub fn register_widths(&self) -> &[u32] {
        &self.register_widths
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, key: u64) -> Complex64 {
        self.amps.get(&key).copied().unwrap_or(Complex64::ZERO)
    }

    /// Sorted iteration over the support.
    pub fn entries(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.amps.iter().map(|(&k, &a)| (k, a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr();
        if n > 0.0 {
            let s = 1.0 / libm::sqrt(n);
            for a in self.amps.values_mut() {
                *a *= s;
            }
        }
        self.normalized = true;
    }

    fn register_offset(&self, reg: usize) -> u32 {
        self.register_widths[..reg].iter().sum()
    }

    /// (offset, mask) of register `reg` within a key.
    pub fn register_span(&self, reg: usize) -> (u32, u64) {
        let off = self.register_offset(reg);
        let w = self.register_widths[reg];
        (off, ((1u64 << w) - 1) << off)
    }

    pub fn register_value(&self, key: u64, reg: usize) -> u64 {
        let (off, mask) = self.register_span(reg);
        (key & mask) >> off
    }

    /// Relocate amplitudes along a map of full keys; must be injective on
    /// the support.
    pub fn apply_basis_map<F: Fn(u64) -> u64>(&mut self, f: F) -> Result<()> {
        let mut moved: Vec<(u64, Complex64)> =
            self.amps.iter().map(|(&k, &a)| (f(k), a)).collect();
        moved.sort_unstable_by_key(|&(k, _)| k);
        if moved.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::NonInjectiveMap);
        }
        self.amps = moved.into_iter().collect();
        Ok(())
    }

    /// Relocate amplitudes along a map of one register's value, other
    /// registers unchanged.
    pub fn apply_register_map<F: Fn(u64) -> u64>(&mut self, reg: usize, f: F) -> Result<()> {
        let (off, mask) = self.register_span(reg);
        let limit = 1u64 << self.register_widths[reg];
        let bad = core::cell::Cell::new(false);
        let res = self.apply_basis_map(|k| {
            let v = f((k & mask) >> off);
            if v >= limit {
                bad.set(true);
            }
            (k & !mask) | (v << off)
        });
        if bad.get() {
            return Err(Error::InvalidInput(alloc::string::String::from(
                "register map value out of range",
            )));
        }
        res
    }

    /// Exact N-point unitary Fourier transform on register `reg`, applied
    /// per value of the remaining registers.
    pub fn dft_zn(&mut self, reg: usize, n_points: u64, dir: DftDirection) -> Result<()> {
        let (off, mask) = self.register_span(reg);
        let reg_dim = 1u64 << self.register_widths[reg];
        if n_points < 1 || n_points > reg_dim {
            return Err(Error::InvalidInput(alloc::format!(
                "N = {n_points} does not fit register {reg}"
            )));
        }
        let n = n_points;
        if self.amps.keys().any(|&k| (k & mask) >> off >= n) {
            return Err(Error::Precondition("register support leaks beyond N - 1"));
        }
        let twiddle = twiddle_table(n, dir);
        let scale = 1.0 / libm::sqrt(n as f64);
        let mut groups: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
        for (&k, &a) in &self.amps {
            groups.entry(k & !mask).or_default().push(((k & mask) >> off, a));
        }
        let mut out: Vec<(u64, Complex64)> = Vec::new();
        for (other, members) in groups {
            for l in 0..n {
                let mut acc = Complex64::ZERO;
                for &(j, a) in &members {
                    acc += a * twiddle[(j * l % n) as usize];
                }
                if acc.norm() > PRUNE_EPS {
                    out.push((other | (l << off), acc * scale));
                }
            }
        }
        out.sort_unstable_by_key(|&(k, _)| k);
        self.amps = out.into_iter().collect();
        Ok(())
    }

    /// Measure register `reg`, collapse and renormalize in place.
    pub fn measure_register(
        &mut self,
        reg: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<MeasurementOutcome> {
        let (off, mask) = self.register_span(reg);
        let mut weights: BTreeMap<u64, f64> = BTreeMap::new();
        for (&k, a) in &self.amps {
            *weights.entry((k & mask) >> off).or_insert(0.0) += a.norm_sqr();
        }
        if weights.is_empty() {
            return Err(Error::Precondition("measuring an empty state"));
        }
        let probs: Vec<(u64, f64)> = weights.into_iter().collect();
        let total: f64 = probs.iter().map(|&(_, w)| w).sum();
        let word_pos = rng.get_word_pos();
        let (value, probability) = born_pick(&probs, total, rng);
        let scale = 1.0 / libm::sqrt(probability * total);
        self.amps.retain(|&k, _| (k & mask) >> off == value);
        for a in self.amps.values_mut() {
            *a *= scale;
        }
        Ok(MeasurementOutcome { value, probability, rng_word_pos: word_pos })
    }

    /// <self|other> over the sparse supports.
    pub fn inner_product(&self, other: &SparseState) -> Result<Complex64> {
        if self.register_widths != other.register_widths {
            return Err(Error::RegisterMismatch);
        }
        let (small, large) = if self.amps.len() <= other.amps.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Complex64::ZERO;
        for (&k, &a) in &small.amps {
            if let Some(&b) = large.amps.get(&k) {
                if core::ptr::eq(small, self) {
                    acc += a.conj() * b;
                } else {
                    acc += b.conj() * a;
                }
            }
        }
        Ok(acc)
    }

    /// `ca * a + cb * b`, unnormalized.
    pub fn superpose(
        a: &SparseState,
        ca: Complex64,
        b: &SparseState,
        cb: Complex64,
    ) -> Result<SparseState> {
        if a.register_widths != b.register_widths {
            return Err(Error::RegisterMismatch);
        }
        let entries = a
            .amps
            .iter()
            .map(|(&k, &v)| (k, v * ca))
            .chain(b.amps.iter().map(|(&k, &v)| (k, v * cb)));
        SparseState::from_entries(&a.register_widths, entries)
    }

    /// Expand to a dense state (total width <= 24 qubits).
    pub fn to_dense(&self) -> Result<DenseState> {
        let total: u32 = self.register_widths.iter().sum();
        if total > 24 {
            return Err(Error::UnsupportedSize(alloc::format!(
                "cannot densify {total} qubits"
            )));
        }
        let mut state = DenseState::zero_state(total as usize)?;
        state.amps[0] = Complex64::ZERO;
        for (&k, &a) in &self.amps {
            state.amps[k as usize] = a;
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_ux;
    use crate::ffield::{BitPoly, FieldCtx};
    use crate::rng;

    fn assert_close(a: Complex64, b: Complex64) {
        assert!((a - b).norm() < 1e-9, "{a} != {b}");
    }

    #[test]
    fn hadamard_and_phase() {
        let mut st = DenseState::zero_state(1).unwrap();
        st.apply_gate(&Gate::H { target: 0 }).unwrap();
        assert_close(st.amp(0), Complex64::new(FRAC_1_SQRT_2, 0.0));
        assert_close(st.amp(1), Complex64::new(FRAC_1_SQRT_2, 0.0));
        // PHASE k=1 is Z
        st.apply_gate(&Gate::Phase { k: 1, target: 0 }).unwrap();
        st.apply_gate(&Gate::H { target: 0 }).unwrap();
        assert_close(st.amp(1), Complex64::ONE);
    }

    #[test]
    fn cnot_and_mcx() {
        // CNOT(0 -> 1) on |01> (qubit 0 set) gives |11>
        let mut st = DenseState::basis_state(2, 0b01).unwrap();
        st.apply_gate(&Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert_close(st.amp(0b11), Complex64::ONE);
        let mut st = DenseState::basis_state(3, 0b011).unwrap();
        st.apply_gate(&Gate::Mcx { controls: vec![0, 1], target: 2, relative_phase: true })
            .unwrap();
        assert_close(st.amp(0b111), Complex64::ONE);
    }

    #[test]
    fn ux_circuit_maps_one_to_x() {
        // the multiply-by-x circuit on |00001> yields |00010>
        let ux = build_ux(&BitPoly::from_u64(0x3b)).unwrap();
        let mut st = DenseState::basis_state(5, 1).unwrap();
        st.apply_circuit(&ux.circuit).unwrap();
        assert_close(st.amp(2), Complex64::ONE);
        // and agrees with the field oracle from a superposition
        let ctx = FieldCtx::gf2(&BitPoly::from_u64(0x3b)).unwrap();
        let mut st = DenseState::zero_state(5).unwrap();
        for q in 0..5 {
            st.apply_gate(&Gate::H { target: q }).unwrap();
        }
        let before = st.clone();
        st.apply_circuit(&ux.circuit).unwrap();
        for s in 0..32u64 {
            assert_close(st.amp(ctx.index_mul(ctx.x_index(), s)), before.amp(s));
        }
    }

    #[test]
    fn basis_map_identity_and_collision() {
        let mut st = DenseState::basis_state(2, 0b10).unwrap();
        st.apply_basis_map(|i| i).unwrap();
        assert_close(st.amp(0b10), Complex64::ONE);
        assert_eq!(st.apply_basis_map(|_| 0), Err(Error::NonInjectiveMap));

        let mut sp = SparseState::basis(&[2], &[2]).unwrap();
        sp.apply_basis_map(|k| k ^ 1).unwrap();
        assert_close(sp.amp(3), Complex64::ONE);
        let mut two = SparseState::from_entries(
            &[2],
            [(0u64, Complex64::ONE), (1u64, Complex64::ONE)],
        )
        .unwrap();
        assert_eq!(two.apply_basis_map(|_| 0), Err(Error::NonInjectiveMap));
    }

    #[test]
    fn dft_delta_and_uniform() {
        // delta -> uniform
        let mut st = DenseState::basis_state(2, 0).unwrap();
        st.dft_zn(Register { lo: 0, width: 2 }, 3, DftDirection::Plus).unwrap();
        let u = 1.0 / libm::sqrt(3.0);
        for j in 0..3 {
            assert_close(st.amp(j), Complex64::new(u, 0.0));
        }
        assert_close(st.amp(3), Complex64::ZERO);
        // uniform -> delta at 0 under either sign
        st.dft_zn(Register { lo: 0, width: 2 }, 3, DftDirection::Minus).unwrap();
        assert_close(st.amp(0), Complex64::ONE);
    }

    #[test]
    fn dft_round_trip_is_identity() {
        let mut st = DenseState::zero_state(4).unwrap();
        for q in 0..3 {
            st.apply_gate(&Gate::H { target: q }).unwrap();
        }
        let before = st.clone();
        let reg = Register { lo: 0, width: 4 };
        // support is 0..8, use N = 11
        st.dft_zn(reg, 11, DftDirection::Plus).unwrap();
        st.dft_zn(reg, 11, DftDirection::Minus).unwrap();
        for i in 0..16 {
            assert_close(st.amp(i), before.amp(i));
        }
        assert!((st.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dft_precondition_checked() {
        let mut st = DenseState::basis_state(2, 3).unwrap();
        assert_eq!(
            st.dft_zn(Register { lo: 0, width: 2 }, 3, DftDirection::Plus),
            Err(Error::Precondition("register support leaks beyond N - 1"))
        );
    }

    #[test]
    fn sparse_and_dense_dft_agree() {
        // same multi-register state both ways
        let widths = [3u32, 2u32];
        let entries: Vec<(u64, Complex64)> = (0..5u64)
            .map(|j| (j | ((j % 3) << 3), Complex64::new(0.3 + j as f64, 0.1 * j as f64)))
            .collect();
        let mut sp = SparseState::from_entries(&widths, entries.clone()).unwrap();
        sp.normalize();
        let mut dn = sp.to_dense().unwrap();
        sp.dft_zn(0, 5, DftDirection::Plus).unwrap();
        dn.dft_zn(Register { lo: 0, width: 3 }, 5, DftDirection::Plus).unwrap();
        for i in 0..dn.dim() as u64 {
            assert_close(sp.amp(i), dn.amp(i));
        }
    }

    #[test]
    fn measurement_collapses_and_is_seeded() {
        let mut st = DenseState::basis_state(1, 1).unwrap();
        let out = st.measure(&[0], &mut rng::from_seed(1)).unwrap();
        assert_eq!(out.value, 1);
        assert!((out.probability - 1.0).abs() < 1e-12);

        // Born statistics on (|0> + |1>)/sqrt(2)
        let mut ones = 0u32;
        let shots = 4000;
        let mut r = rng::from_seed(7);
        for _ in 0..shots {
            let mut st = DenseState::zero_state(1).unwrap();
            st.apply_gate(&Gate::H { target: 0 }).unwrap();
            ones += st.measure(&[0], &mut r).unwrap().value as u32;
        }
        let dev = (ones as f64 - shots as f64 / 2.0).abs();
        assert!(dev < 5.0 * libm::sqrt(shots as f64 * 0.25), "dev = {dev}");

        // identical streams give identical outcomes
        let seq1: Vec<u64> = (0..20)
            .map(|i| {
                let mut st = DenseState::zero_state(2).unwrap();
                st.apply_gate(&Gate::H { target: 0 }).unwrap();
                st.apply_gate(&Gate::H { target: 1 }).unwrap();
                st.measure(&[0, 1], &mut rng::stream(3, i)).unwrap().value
            })
            .collect();
        let seq2: Vec<u64> = (0..20)
            .map(|i| {
                let mut st = DenseState::zero_state(2).unwrap();
                st.apply_gate(&Gate::H { target: 0 }).unwrap();
                st.apply_gate(&Gate::H { target: 1 }).unwrap();
                st.measure(&[0, 1], &mut rng::stream(3, i)).unwrap().value
            })
            .collect();
        assert_eq!(seq1, seq2);
    }

    #[test]
    fn sparse_measurement_renormalizes() {
        let mut sp = SparseState::from_entries(
            &[2, 2],
            [
                (0b0100u64, Complex64::new(0.6, 0.0)),
                (0b1001u64, Complex64::new(0.8, 0.0)),
            ],
        )
        .unwrap();
        sp.normalize();
        let out = sp.measure_register(0, &mut rng::from_seed(5)).unwrap();
        assert!(out.value == 0 || out.value == 1);
        assert!((sp.norm_sqr() - 1.0).abs() < 1e-9);
        assert_eq!(sp.support_len(), 1);
    }

    #[test]
    fn inner_products() {
        let a = SparseState::from_entries(
            &[3],
            [(1u64, Complex64::new(0.6, 0.0)), (2u64, Complex64::new(0.0, 0.8))],
        )
        .unwrap();
        assert_close(a.inner_product(&a).unwrap(), Complex64::new(1.0, 0.0));
        let b = SparseState::basis(&[3], &[2]).unwrap();
        assert_close(a.inner_product(&b).unwrap(), Complex64::new(0.0, -0.8));
        assert_close(b.inner_product(&a).unwrap(), Complex64::new(0.0, 0.8));
        let c = SparseState::basis(&[2], &[2]).unwrap();
        assert_eq!(a.inner_product(&c), Err(Error::RegisterMismatch));
    }

    #[test]
    fn norm_preserved_over_many_gates() {
        use rand::Rng;
        let mut st = DenseState::zero_state(8).unwrap();
        let mut r = rng::from_seed(9);
        for _ in 0..10_000 {
            let q = r.gen_range(0..8usize);
            let p = (q + 1 + r.gen_range(0..7usize)) % 8;
            match r.gen_range(0..5u8) {
                0 => st.apply_gate(&Gate::H { target: q }).unwrap(),
                1 => st.apply_gate(&Gate::X { target: q }).unwrap(),
                2 => st.apply_gate(&Gate::Cnot { control: q, target: p }).unwrap(),
                3 => st.apply_gate(&Gate::Swap { a: q, b: p }).unwrap(),
                _ => st.apply_gate(&Gate::Phase { k: r.gen_range(1..8), target: q }).unwrap(),
            }
        }
        assert!((st.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn drop_top_qubit_checks_support() {
        let mut st = DenseState::basis_state(3, 0b011).unwrap();
        st.drop_top_qubit().unwrap();
        assert_eq!(st.num_qubits(), 2);
        assert_close(st.amp(0b11), Complex64::ONE);
        let mut st = DenseState::basis_state(3, 0b100).unwrap();
        assert!(st.drop_top_qubit().is_err());
    }
}
