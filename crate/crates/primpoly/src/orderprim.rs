//! Primitivity testing by subgroup order finding.
//!
//! For an irreducible binary modulus p(x) of degree n, the residue x
//! generates a cyclic subgroup of order r | N = 2^n - 1, and p is primitive
//! iff r = N. One trial prepares a uniform superposition over 0..N-1
//! (postselecting an ancilla), entangles it with |x^j>, Fourier-transforms
//! over Z_N and measures: outcomes land exactly on the multiples of N/r,
//! uniformly. GCDs of a few outcomes (0 read as N) pin down N/r, and one
//! classical power decides the verdict with certainty either way.
//!
//! Two interchangeable backends execute a trial: a gate-level statevector
//! run of the controlled multiplier networks, and a semantic run that
//! applies the same basis permutation through field arithmetic on a sparse
//! state. They produce identical states and share the measurement code.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_integer::Integer;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{build_u_pow2k, Gate};
use crate::error::{Error, Result};
use crate::ffield::{bitpoly, BitPoly, FieldCtx};
use crate::rng;
use crate::sim::{DenseState, DftDirection, Register, SparseState};

/// How a trial's state is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialBackend {
    /// Basis-permutation semantics on a sparse state; widths up to 14 bits.
    Semantic,
    /// Gate IR on a dense statevector; widths up to 10 bits.
    GateLevel,
}

/// Knobs for [`test_primitivity`].
#[derive(Debug, Clone)]
pub struct TrialPolicy {
    /// Give up (Undecided) after this many trials.
    pub max_trials: usize,
    /// Measurement records drawn per trial iteration.
    pub shots_per_trial: usize,
    pub seed: u64,
    pub backend: TrialBackend,
}

impl Default for TrialPolicy {
    fn default() -> Self {
        TrialPolicy {
            max_trials: 32,
            shots_per_trial: 1,
            seed: 0,
            backend: TrialBackend::Semantic,
        }
    }
}

/// One measured frequency sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    /// Raw measured value in 0..N.
    pub l: u64,
    /// l with 0 replaced by N; the value entering the GCD.
    pub l_normalized: u64,
    /// Ancilla postselection failures during state preparation.
    pub retries: u32,
    /// RNG stream index that produced this record.
    pub stream: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Primitive,
    NotPrimitive,
    Undecided,
}

/// Outcome of the GCD post-processing. `Primitive` and `NotPrimitive` are
/// certain; `Undecided` means more trials are needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub decision: Decision,
    /// Running gcd of N and the normalized samples.
    pub g: u64,
    pub trials_used: usize,
    /// The order of x when the verdict is decided.
    pub order: Option<u64>,
}

/// Uniform superposition over 0..2^width-2 by Hadamards, a width-controlled
/// NOT onto an ancilla and postselection on ancilla 0 (success probability
/// N/(N+1)). Returns the state and the retry count.
pub fn prepare_uniform_range(width: usize, rng: &mut ChaCha8Rng) -> Result<(DenseState, u32)> {
    if !(2..=14).contains(&width) {
        return Err(Error::UnsupportedSize(alloc::format!(
            "frequency register width must be in 2..=14, got {width}"
        )));
    }
    let mut retries = 0u32;
    loop {
        let mut st = DenseState::zero_state(width + 1)?;
        for q in 0..width {
            st.apply_gate(&Gate::H { target: q })?;
        }
        st.apply_gate(&Gate::Mcx {
            controls: (0..width).collect(),
            target: width,
            relative_phase: true,
        })?;
        let out = st.measure(&[width], rng)?;
        if out.value == 0 {
            st.drop_top_qubit()?;
            return Ok((st, retries));
        }
        retries += 1;
        if retries > 100_000 {
            return Err(Error::Precondition("ancilla postselection never succeeded"));
        }
    }
}

/// A trial's entangled two-register state, in either backend.
#[derive(Debug, Clone)]
pub enum EntangledState {
    Dense(DenseState),
    Sparse(SparseState),
}

impl EntangledState {
    /// Amplitude of |frequency = j, field = e>.
    pub fn amp(&self, j: u64, e: u64, width: usize) -> num_complex::Complex64 {
        match self {
            EntangledState::Dense(st) => st.amp(j | (e << width)),
            EntangledState::Sparse(st) => st.amp(j | (e << width)),
        }
    }
}

fn binary_width(ctx: &FieldCtx) -> Result<usize> {
    ctx.index_bits()
        .map(|w| w as usize)
        .ok_or(Error::InvalidInput(alloc::string::String::from(
            "order finding runs over binary fields (p = 2)",
        )))
}

/// Entangle a prepared frequency register with the powers of x:
/// sum_j |j>|x^j mod f>.
pub fn entangle_powers(
    freq: &DenseState,
    ctx: &Arc<FieldCtx>,
    backend: TrialBackend,
) -> Result<EntangledState> {
    let w = binary_width(ctx)?;
    if freq.num_qubits() != w {
        return Err(Error::InvalidInput(alloc::format!(
            "frequency register has {} qubits, field needs {w}",
            freq.num_qubits()
        )));
    }
    match backend {
        TrialBackend::GateLevel => {
            if w > 10 {
                return Err(Error::UnsupportedSize(alloc::format!(
                    "gate-level backend capped at 10-bit registers, got {w}"
                )));
            }
            // field register |0...01> above the frequency register, then one
            // controlled multiplier network per frequency qubit
            let mut st = freq.tensor_basis(w, 1)?;
            for k in 0..w {
                let net = build_u_pow2k(ctx, k as u32)?;
                let ctrl = net.shifted(w, 2 * w)?.controlled_on(k, 2 * w)?;
                st.apply_circuit(&ctrl)?;
            }
            Ok(EntangledState::Dense(st))
        }
        TrialBackend::Semantic => {
            let n_val = ctx.group_order_u64();
            let mut powers = Vec::with_capacity(n_val as usize);
            let mut acc = 1u64; // index of x^0
            let x = ctx.x_index();
            for _ in 0..n_val {
                powers.push(acc);
                acc = ctx.index_mul(acc, x);
            }
            let entries = freq.nonzero_entries().into_iter().map(|(j, a)| {
                debug_assert!(j < n_val, "prepared support exceeds N - 1");
                (j | (powers[j as usize] << w), a)
            });
            let mut st = SparseState::from_entries(&[w as u32, w as u32], entries)?;
            st.normalize();
            Ok(EntangledState::Sparse(st))
        }
    }
}

/// Fourier-transform the frequency register over Z_N and measure it.
pub fn measure_frequency(
    state: &mut EntangledState,
    ctx: &FieldCtx,
    rng: &mut ChaCha8Rng,
) -> Result<u64> {
    let w = binary_width(ctx)?;
    let n_val = ctx.group_order_u64();
    match state {
        EntangledState::Dense(st) => {
            st.dft_zn(Register { lo: 0, width: w }, n_val, DftDirection::Plus)?;
            Ok(st.measure(&(0..w).collect::<Vec<_>>(), rng)?.value)
        }
        EntangledState::Sparse(st) => {
            st.dft_zn(0, n_val, DftDirection::Plus)?;
            Ok(st.measure_register(0, rng)?.value)
        }
    }
}

/// One full trial: prepare, entangle, transform, measure.
pub fn run_trial(
    ctx: &Arc<FieldCtx>,
    backend: TrialBackend,
    stream: u64,
    rng: &mut ChaCha8Rng,
) -> Result<TrialRecord> {
    let w = binary_width(ctx)?;
    let (freq, retries) = prepare_uniform_range(w, rng)?;
    let mut entangled = entangle_powers(&freq, ctx, backend)?;
    let l = measure_frequency(&mut entangled, ctx, rng)?;
    let n_val = ctx.group_order_u64();
    Ok(TrialRecord { l, l_normalized: if l == 0 { n_val } else { l }, retries, stream })
}

/// GCD post-processing of the measured samples.
///
/// Every sample is a multiple of N/r, so g = gcd(N, samples) is too. If
/// g = 1 then N/r = 1 and the modulus is primitive. Otherwise N/g divides
/// r, and a single classical power x^(N/g) settles whether r = N/g: if it
/// is 1 with N/g < N the modulus is certainly not primitive (r = N/g); if
/// it is not 1 the samples have not pinned r down yet.
pub fn gcd_postprocess(records: &[TrialRecord], ctx: &Arc<FieldCtx>) -> Result<Verdict> {
    if records.is_empty() {
        return Err(Error::InvalidInput(alloc::string::String::from(
            "post-processing needs at least one record",
        )));
    }
    let n_val = ctx.group_order_u64();
    let g = records.iter().fold(n_val, |acc, r| acc.gcd(&r.l_normalized));
    if g == 1 {
        return Ok(Verdict {
            decision: Decision::Primitive,
            g,
            trials_used: records.len(),
            order: Some(n_val),
        });
    }
    let candidate = n_val / g;
    if ctx.x().pow_u64(candidate).is_one() {
        if candidate < n_val {
            Ok(Verdict {
                decision: Decision::NotPrimitive,
                g,
                trials_used: records.len(),
                order: Some(candidate),
            })
        } else {
            Ok(Verdict {
                decision: Decision::Primitive,
                g,
                trials_used: records.len(),
                order: Some(n_val),
            })
        }
    } else {
        Ok(Verdict { decision: Decision::Undecided, g, trials_used: records.len(), order: None })
    }
}

/// Full primitivity test of an irreducible binary context.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitivityRun {
    pub verdict: Verdict,
    pub records: Vec<TrialRecord>,
    pub group_order: u64,
}

pub fn test_primitivity_ctx(ctx: &Arc<FieldCtx>, policy: &TrialPolicy) -> Result<PrimitivityRun> {
    if policy.max_trials == 0 || policy.shots_per_trial == 0 {
        return Err(Error::InvalidInput(alloc::string::String::from(
            "need max_trials >= 1 and shots_per_trial >= 1",
        )));
    }
    let mut records = Vec::new();
    let mut verdict = None;
    for trial in 0..policy.max_trials {
        let mut rng = rng::stream(policy.seed, trial as u64);
        for _ in 0..policy.shots_per_trial {
            records.push(run_trial(ctx, policy.backend, trial as u64, &mut rng)?);
        }
        let v = gcd_postprocess(&records, ctx)?;
        let done = v.decision != Decision::Undecided;
        verdict = Some(v);
        if done {
            break;
        }
    }
    Ok(PrimitivityRun {
        verdict: verdict.expect("at least one trial ran"),
        records,
        group_order: ctx.group_order_u64(),
    })
}

/// Primitivity of a polynomial over GF(2). The irreducibility precondition
/// is checked classically first; reducible inputs are rejected.
pub fn test_primitivity(poly: &BitPoly, policy: &TrialPolicy) -> Result<PrimitivityRun> {
    if !bitpoly::is_irreducible(poly)? {
        return Err(Error::NotIrreducible);
    }
    let ctx = FieldCtx::gf2(poly)?;
    test_primitivity_ctx(&ctx, policy)
}

/// Qubits a gate-level trial touches: two field-width registers plus the
/// postselection ancilla.
pub fn qubit_budget(ctx: &FieldCtx) -> Result<usize> {
    Ok(2 * binary_width(ctx)? + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn gf16_primitive() -> Arc<FieldCtx> {
        FieldCtx::gf2(&BitPoly::from_u64(0x13)).unwrap()
    }

    fn gf16_order5() -> Arc<FieldCtx> {
        FieldCtx::gf2(&BitPoly::from_u64(0x1f)).unwrap()
    }

    #[test]
    fn preparation_is_uniform_without_top_state() {
        let mut rng = rng::from_seed(2);
        let (st, _) = prepare_uniform_range(4, &mut rng).unwrap();
        let u = 1.0 / libm::sqrt(15.0);
        for j in 0..15u64 {
            assert!((st.amp(j) - Complex64::new(u, 0.0)).norm() < 1e-9);
        }
        assert!(st.amp(15).norm() < 1e-12);
        let (st2, _) = prepare_uniform_range(2, &mut rng).unwrap();
        let u3 = 1.0 / libm::sqrt(3.0);
        for j in 0..3u64 {
            assert!((st2.amp(j) - Complex64::new(u3, 0.0)).norm() < 1e-9);
        }
        assert!(prepare_uniform_range(1, &mut rng).is_err());
    }

    #[test]
    fn retry_rate_is_geometric() {
        // success probability 15/16 at width 4: mean retries 1/15
        let mut total = 0u64;
        let runs = 10_000;
        for i in 0..runs {
            let mut rng = rng::stream(11, i);
            total += prepare_uniform_range(4, &mut rng).unwrap().1 as u64;
        }
        let mean = total as f64 / runs as f64;
        // mean of the geometric retry count is 1/15, sd ~ sqrt(16/225)/sqrt(runs)
        let expect = 1.0 / 15.0;
        let sd = libm::sqrt((16.0 / 225.0) / runs as f64);
        assert!((mean - expect).abs() < 5.0 * sd, "mean {mean} vs {expect}");
    }

    #[test]
    fn entangled_support_is_the_power_graph() {
        let mut rng = rng::from_seed(3);
        // order 5: the field register takes exactly 5 distinct values
        let ctx = gf16_order5();
        let (freq, _) = prepare_uniform_range(4, &mut rng).unwrap();
        let st = entangle_powers(&freq, &ctx, TrialBackend::Semantic).unwrap();
        if let EntangledState::Sparse(sp) = &st {
            assert_eq!(sp.support_len(), 15);
            let distinct: std::collections::BTreeSet<u64> =
                sp.entries().map(|(k, _)| k >> 4).collect();
            assert_eq!(distinct.len(), 5);
        } else {
            panic!("semantic backend returned a dense state");
        }
        // primitive: 15 distinct values
        let ctx = gf16_primitive();
        let st = entangle_powers(&freq, &ctx, TrialBackend::Semantic).unwrap();
        if let EntangledState::Sparse(sp) = &st {
            let distinct: std::collections::BTreeSet<u64> =
                sp.entries().map(|(k, _)| k >> 4).collect();
            assert_eq!(distinct.len(), 15);
        }
        // smallest field: support {(0,1), (1,x), (2,x^2=x+1)}
        let ctx3 = FieldCtx::gf2(&BitPoly::from_u64(0b111)).unwrap();
        let (freq2, _) = prepare_uniform_range(2, &mut rng).unwrap();
        let st = entangle_powers(&freq2, &ctx3, TrialBackend::Semantic).unwrap();
        if let EntangledState::Sparse(sp) = &st {
            let keys: Vec<u64> = sp.entries().map(|(k, _)| k).collect();
            assert_eq!(keys, vec![1 << 2, 1 | (2 << 2), 2 | (3 << 2)]);
        }
    }

    #[test]
    fn backends_agree_on_the_entangled_state() {
        let mut rng = rng::from_seed(4);
        for bits in [0x13u64, 0x1f, 0b1011, 0b111011] {
            let ctx = FieldCtx::gf2(&BitPoly::from_u64(bits)).unwrap();
            let w = ctx.index_bits().unwrap() as usize;
            let (freq, _) = prepare_uniform_range(w, &mut rng).unwrap();
            let dense = entangle_powers(&freq, &ctx, TrialBackend::GateLevel).unwrap();
            let sparse = entangle_powers(&freq, &ctx, TrialBackend::Semantic).unwrap();
            for j in 0..ctx.group_order_u64() {
                for e in 0..ctx.elem_count() {
                    let d = dense.amp(j, e, w);
                    let s = sparse.amp(j, e, w);
                    assert!((d - s).norm() < 1e-12, "({j}, {e}) differs for {bits:#x}");
                }
            }
        }
    }

    #[test]
    fn outcomes_lie_on_the_order_lattice() {
        // r = 5, N = 15: every outcome is a multiple of 3
        let ctx = gf16_order5();
        for i in 0..200 {
            let mut rng = rng::stream(5, i);
            let rec = run_trial(&ctx, TrialBackend::Semantic, i, &mut rng).unwrap();
            assert_eq!(rec.l % 3, 0, "outcome {} off the lattice", rec.l);
            assert_eq!(rec.l_normalized % 3, 0);
            assert!(rec.l_normalized >= 1 && rec.l_normalized <= 15);
        }
    }

    #[test]
    fn postprocessing_examples() {
        let ctx = gf16_order5();
        let rec = |l: u64| TrialRecord {
            l,
            l_normalized: if l == 0 { 15 } else { l },
            retries: 0,
            stream: 0,
        };
        // {3, 6}: g = 3, x^5 = 1, so not primitive with order 5
        let v = gcd_postprocess(&[rec(3), rec(6)], &ctx).unwrap();
        assert_eq!(v.decision, Decision::NotPrimitive);
        assert_eq!((v.g, v.order), (3, Some(5)));
        // a single coprime sample proves primitivity
        let ctx13 = gf16_primitive();
        let v = gcd_postprocess(&[rec(7)], &ctx13).unwrap();
        assert_eq!(v.decision, Decision::Primitive);
        assert_eq!(v.order, Some(15));
        // a single zero outcome carries no information
        let v = gcd_postprocess(&[rec(0)], &ctx13).unwrap();
        assert_eq!(v.decision, Decision::Undecided);
        assert_eq!(v.g, 15);
        assert!(gcd_postprocess(&[], &ctx).is_err());
    }

    #[test]
    fn end_to_end_verdicts() {
        let policy = TrialPolicy { seed: 17, ..TrialPolicy::default() };
        let run = test_primitivity(&BitPoly::from_u64(0x1f), &policy).unwrap();
        assert_eq!(run.verdict.decision, Decision::NotPrimitive);
        assert_eq!(run.verdict.order, Some(5));
        let run = test_primitivity(&BitPoly::from_u64(0x13), &policy).unwrap();
        assert_eq!(run.verdict.decision, Decision::Primitive);
        assert_eq!(run.verdict.order, Some(15));
        // reducible input is rejected up front
        assert_eq!(
            test_primitivity(&BitPoly::from_u64(0b10101), &policy),
            Err(Error::NotIrreducible)
        );
    }

    #[test]
    fn gate_level_verdicts_match() {
        let policy = TrialPolicy {
            seed: 23,
            backend: TrialBackend::GateLevel,
            ..TrialPolicy::default()
        };
        let run = test_primitivity(&BitPoly::from_u64(0x1f), &policy).unwrap();
        assert_eq!(run.verdict.decision, Decision::NotPrimitive);
        let run = test_primitivity(&BitPoly::from_u64(0b1011), &policy).unwrap();
        assert_eq!(run.verdict.decision, Decision::Primitive);
    }

    #[test]
    fn binary_tower_order_finding() {
        // GF((2^2)^2): N = 15, q = 4
        let ctx = FieldCtx::new(2, 2, 2).unwrap();
        let policy = TrialPolicy { seed: 29, ..TrialPolicy::default() };
        let run = test_primitivity_ctx(&ctx, &policy).unwrap();
        // the verdict must match the classical oracle for x
        let oracle = ctx.with_factored_order().unwrap();
        let expect = oracle.x().order().unwrap() == 15;
        match run.verdict.decision {
            Decision::Primitive => assert!(expect),
            Decision::NotPrimitive => assert!(!expect),
            Decision::Undecided => panic!("default budget should decide"),
        }
    }

    #[test]
    fn qubit_budget_is_two_registers_plus_ancilla() {
        assert_eq!(qubit_budget(&gf16_primitive()).unwrap(), 9);
        let gf64 = FieldCtx::gf2(&BitPoly::from_u64(0b1000011)).unwrap();
        assert_eq!(qubit_budget(&gf64).unwrap(), 13);
    }

    #[test]
    fn trials_are_reproducible() {
        let policy = TrialPolicy { seed: 99, ..TrialPolicy::default() };
        let a = test_primitivity(&BitPoly::from_u64(0x1f), &policy).unwrap();
        let b = test_primitivity(&BitPoly::from_u64(0x1f), &policy).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.verdict, b.verdict);
    }
}
