//! Qubit gate IR, the shift-register multiplier circuits, and gate-cost
//! accounting.
//!
//! The central construction is [`build_ux`]: for a binary modulus
//! `p(x) = x^n + a_(n-1) x^(n-1) + ... + a_1 x + 1` the map
//! `|s> -> |x*s mod p>` is `|p| - 2` CNOTs (control on the top coefficient
//! qubit) followed by `n - 1` neighbor SWAPs performing the cyclic shift.
//! Its 2^k-th powers are synthesized as CNOT networks from the GF(2) matrix
//! of multiplication by `x^(2^k)` ([`build_u_pow2k`]), since multiplication
//! by a fixed field element is linear over GF(2).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::ffield::{bitpoly, BitPoly, FieldCtx};

/// One gate. Operand indices are qubit positions; qubit `i` carries the
/// coefficient of `x^i` (little-endian).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    X { target: usize },
    H { target: usize },
    Cnot { control: usize, target: usize },
    Swap { a: usize, b: usize },
    /// Multi-controlled NOT. `relative_phase` marks that an implementation
    /// up to relative phases on the work qubits would be acceptable; the
    /// basis action is the same either way.
    Mcx { controls: Vec<usize>, target: usize, relative_phase: bool },
    /// Diagonal phase `diag(1, e^(2 pi i / 2^k))`, 1 <= k <= 64.
    Phase { k: u32, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X { target } | Gate::H { target } | Gate::Phase { target, .. } => {
                vec![*target]
            }
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Swap { a, b } => vec![*a, *b],
            Gate::Mcx { controls, target, .. } => {
                let mut q = controls.clone();
                q.push(*target);
                q
            }
        }
    }

    /// True when the gate acts as a permutation of computational basis
    /// states.
    pub fn is_classical(&self) -> bool {
        !matches!(self, Gate::H { .. } | Gate::Phase { .. })
    }

    fn validate(&self) -> Result<()> {
        let qs = self.qubits();
        for (i, a) in qs.iter().enumerate() {
            if qs[i + 1..].contains(a) {
                return Err(Error::InvalidInput(format!("repeated operand qubit {a}")));
            }
        }
        match self {
            Gate::Mcx { controls, .. } if controls.is_empty() => Err(Error::InvalidInput(
                String::from("MCX needs at least one control"),
            )),
            Gate::Phase { k, .. } if !(1..=64).contains(k) => Err(Error::InvalidInput(
                format!("phase exponent k must be in 1..=64, got {k}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::X { target } => write!(f, "X {target}"),
            Gate::H { target } => write!(f, "H {target}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Swap { a, b } => write!(f, "SWAP {a} {b}"),
            Gate::Mcx { controls, target, .. } => {
                write!(f, "MCX")?;
                for c in controls {
                    write!(f, " {c}")?;
                }
                write!(f, " -> {target}")
            }
            Gate::Phase { k, target } => write!(f, "PHASE {k} {target}"),
        }
    }
}

/// An ordered gate list on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    label: Option<String>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, gates: Vec::new(), label: None }
    }

    pub fn with_label(num_qubits: usize, label: &str) -> Self {
        Circuit { num_qubits, gates: Vec::new(), label: Some(String::from(label)) }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate()?;
        if let Some(&q) = gate.qubits().iter().max() {
            if q >= self.num_qubits {
                return Err(Error::InvalidInput(format!(
                    "gate operand {q} out of range for {} qubits",
                    self.num_qubits
                )));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// The same circuit with every qubit index shifted up by `offset`, on
    /// `num_qubits` wires.
    pub fn shifted(&self, offset: usize, num_qubits: usize) -> Result<Circuit> {
        let mut out = Circuit::new(num_qubits);
        out.label = self.label.clone();
        for g in &self.gates {
            let g = match g {
                Gate::X { target } => Gate::X { target: target + offset },
                Gate::H { target } => Gate::H { target: target + offset },
                Gate::Cnot { control, target } => {
                    Gate::Cnot { control: control + offset, target: target + offset }
                }
                Gate::Swap { a, b } => Gate::Swap { a: a + offset, b: b + offset },
                Gate::Mcx { controls, target, relative_phase } => Gate::Mcx {
                    controls: controls.iter().map(|c| c + offset).collect(),
                    target: target + offset,
                    relative_phase: *relative_phase,
                },
                Gate::Phase { k, target } => Gate::Phase { k: *k, target: target + offset },
            };
            out.push(g)?;
        }
        Ok(out)
    }

    /// The circuit with every gate additionally controlled on `control`.
    /// Only classical-reversible gates can be controlled here.
    pub fn controlled_on(&self, control: usize, num_qubits: usize) -> Result<Circuit> {
        let mut out = Circuit::new(num_qubits);
        for g in &self.gates {
            match g {
                Gate::X { target } => {
                    out.push(Gate::Cnot { control, target: *target })?;
                }
                Gate::Cnot { control: c, target } => {
                    out.push(Gate::Mcx {
                        controls: vec![control, *c],
                        target: *target,
                        relative_phase: true,
                    })?;
                }
                Gate::Swap { a, b } => {
                    // controlled SWAP as CNOT / Toffoli / CNOT
                    out.push(Gate::Cnot { control: *b, target: *a })?;
                    out.push(Gate::Mcx {
                        controls: vec![control, *a],
                        target: *b,
                        relative_phase: true,
                    })?;
                    out.push(Gate::Cnot { control: *b, target: *a })?;
                }
                Gate::Mcx { controls, target, relative_phase } => {
                    let mut cs = controls.clone();
                    cs.push(control);
                    out.push(Gate::Mcx {
                        controls: cs,
                        target: *target,
                        relative_phase: *relative_phase,
                    })?;
                }
                Gate::H { .. } | Gate::Phase { .. } => {
                    return Err(Error::NotClassical("cannot control a non-classical gate here"))
                }
            }
        }
        Ok(out)
    }

    /// The permutation of computational basis states induced by a circuit of
    /// classical-reversible gates, as a lookup table.
    pub fn permutation(&self) -> Result<Vec<u64>> {
        if self.num_qubits > 24 {
            return Err(Error::UnsupportedSize(format!(
                "permutation table of 2^{} entries",
                self.num_qubits
            )));
        }
        let dim = 1u64 << self.num_qubits;
        let mut table: Vec<u64> = (0..dim).collect();
        for g in &self.gates {
            if !g.is_classical() {
                return Err(Error::NotClassical("circuit contains H or PHASE"));
            }
            for v in table.iter_mut() {
                *v = apply_classical(g, *v);
            }
        }
        Ok(table)
    }

    pub fn counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        let mut layer = vec![0usize; self.num_qubits];
        for g in &self.gates {
            match g {
                Gate::X { .. } => counts.x += 1,
                Gate::H { .. } => counts.h += 1,
                Gate::Cnot { .. } => counts.cnot += 1,
                Gate::Swap { .. } => counts.swap += 1,
                Gate::Mcx { .. } => counts.mcx += 1,
                Gate::Phase { .. } => counts.phase += 1,
            }
            // greedy as-soon-as-possible layering
            let qs = g.qubits();
            let next = qs.iter().map(|&q| layer[q]).max().unwrap_or(0) + 1;
            for q in qs {
                layer[q] = next;
            }
            counts.depth = counts.depth.max(next);
        }
        counts.total = self.gates.len();
        counts
    }

    /// Line-oriented text serialization, one gate per line, in circuit
    /// order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&format!("{g}\n"));
        }
        s
    }
}

/// Basis action of a single classical gate.
pub(crate) fn apply_classical(gate: &Gate, index: u64) -> u64 {
    match gate {
        Gate::X { target } => index ^ (1 << target),
        Gate::Cnot { control, target } => {
            if index >> control & 1 == 1 {
                index ^ (1 << target)
            } else {
                index
            }
        }
        Gate::Swap { a, b } => {
            let (ba, bb) = (index >> a & 1, index >> b & 1);
            if ba != bb {
                index ^ (1 << a) ^ (1 << b)
            } else {
                index
            }
        }
        Gate::Mcx { controls, target, .. } => {
            if controls.iter().all(|&c| index >> c & 1 == 1) {
                index ^ (1 << target)
            } else {
                index
            }
        }
        Gate::H { .. } | Gate::Phase { .. } => unreachable!("checked by caller"),
    }
}

/// Gate tallies and greedy depth.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub x: usize,
    pub h: usize,
    pub cnot: usize,
    pub swap: usize,
    pub mcx: usize,
    pub phase: usize,
    pub total: usize,
    pub depth: usize,
}

/// The multiply-by-x circuit and whether its modulus is irreducible. A
/// reducible modulus still yields a valid basis permutation, so it is
/// accepted but flagged.
#[derive(Debug, Clone)]
pub struct UxCircuit {
    pub circuit: Circuit,
    pub modulus: BitPoly,
    pub modulus_irreducible: bool,
}

/// Circuit for `|s> -> |x*s mod p>` over GF(2): one CNOT from qubit n-1
/// onto qubit k for every nonzero a_(k+1) (k <= n-2), then the cyclic shift
/// as n-1 neighbor SWAPs. Exactly `|p| - 2` CNOTs, where `|p|` counts the
/// nonzero coefficients.
pub fn build_ux(modulus: &BitPoly) -> Result<UxCircuit> {
    let n = match modulus.degree() {
        None | Some(0) => return Err(Error::InvalidModulus("modulus must have degree >= 1")),
        Some(n) => n,
    };
    if n > 24 {
        return Err(Error::UnsupportedSize(format!(
            "multiplier circuits are desk-scale (degree <= 24), got {n}"
        )));
    }
    if !modulus.coeff(0) {
        return Err(Error::InvalidModulus(
            "modulus needs constant term 1 for the map to be invertible",
        ));
    }
    let mut circuit = Circuit::with_label(n, "U_x");
    for k in 0..n.saturating_sub(1) {
        if modulus.coeff(k + 1) {
            circuit.push(Gate::Cnot { control: n - 1, target: k })?;
        }
    }
    for k in (1..n).rev() {
        circuit.push(Gate::Swap { a: k, b: k - 1 })?;
    }
    Ok(UxCircuit {
        circuit,
        modulus: modulus.clone(),
        modulus_irreducible: bitpoly::is_irreducible(modulus)?,
    })
}

/// CNOT network for `|s> -> |x^(2^k) * s mod f>` on a binary field context,
/// synthesized by Gauss-Jordan elimination of the GF(2) matrix of the map.
/// `k` ranges over `0..index_bits`.
pub fn build_u_pow2k(ctx: &FieldCtx, k: u32) -> Result<Circuit> {
    let w = ctx.index_bits().ok_or(Error::InvalidInput(String::from(
        "shift-register circuits need a binary field (p = 2)",
    )))? as usize;
    if w > 24 {
        return Err(Error::UnsupportedSize(format!(
            "multiplier circuits are desk-scale (width <= 24), got {w}"
        )));
    }
    if k as usize >= w {
        return Err(Error::InvalidInput(format!(
            "power index {k} out of range for {w} qubits"
        )));
    }
    // the multiplier constant x^(2^k), by repeated squaring
    let mut mult = ctx.x_index();
    for _ in 0..k {
        mult = ctx.index_mul(mult, mult);
    }
    // matrix of the map, rows as bit masks: column j = mult * e_j
    let mut rows: Vec<u64> = vec![0; w];
    for j in 0..w {
        let col = ctx.index_mul(mult, 1 << j);
        for (i, row) in rows.iter_mut().enumerate() {
            *row |= (col >> i & 1) << j;
        }
    }
    // Gauss-Jordan to the identity, recording row additions; the gate list
    // is the recorded ops reversed, each `row_t ^= row_c` being CNOT(c, t).
    let mut ops: Vec<(usize, usize)> = Vec::new();
    for col in 0..w {
        if rows[col] >> col & 1 == 0 {
            let pivot = (col + 1..w)
                .find(|&i| rows[i] >> col & 1 == 1)
                .expect("multiplication by a unit is invertible");
            rows[col] ^= rows[pivot];
            ops.push((col, pivot));
        }
        for i in 0..w {
            if i != col && rows[i] >> col & 1 == 1 {
                rows[i] ^= rows[col];
                ops.push((i, col));
            }
        }
    }
    debug_assert!(rows.iter().enumerate().all(|(i, &r)| r == 1 << i));
    let mut circuit = Circuit::with_label(w, "U_x^(2^k)");
    for &(target, control) in ops.iter().rev() {
        circuit.push(Gate::Cnot { control, target })?;
    }
    Ok(circuit)
}

/// Resource counts for a relative-phase multi-controlled NOT on
/// `n = controls + target` qubits: `8n - 17` T gates, `6n - 12` CNOTs,
/// `4n - 10` Hadamards and `ceil((n - 3) / 2)` work qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McxCosts {
    pub t: u64,
    pub cnot: u64,
    pub hadamard: u64,
    pub ancillas: u64,
}

pub fn mcx_costs(n: u64) -> Result<McxCosts> {
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "MCX accounting starts at 3 qubits, got {n}"
        )));
    }
    Ok(McxCosts {
        t: 8 * n - 17,
        cnot: 6 * n - 12,
        hadamard: 4 * n - 10,
        ancillas: (n - 3).div_ceil(2),
    })
}
