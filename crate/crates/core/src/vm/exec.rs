use std::fmt;

use super::{CompiledProgram, CregLayout, ExecError, KernelInstruction};
use crate::kernel::{RngState, StateVector};

/// Classical register contents. Bit `k` of a register is element `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalStore {
    layout: CregLayout,
    bits: Vec<u8>,
}

impl ClassicalStore {
    pub fn new(layout: &CregLayout) -> Self {
        ClassicalStore {
            layout: layout.clone(),
            bits: vec![0; layout.total()],
        }
    }

    pub fn layout(&self) -> &CregLayout {
        &self.layout
    }

    /// Bits of register `name`, element 0 first.
    pub fn bits(&self, name: &str) -> Option<&[u8]> {
        self.layout.find(name).map(|id| self.bits_of(id))
    }

    fn bits_of(&self, id: usize) -> &[u8] {
        let e = self.layout.get(id);
        &self.bits[e.offset..e.offset + e.size]
    }

    /// Register value as an unsigned integer; `None` if unknown or wider
    /// than 64 significant bits.
    pub fn value(&self, name: &str) -> Option<u64> {
        let bits = self.bits(name)?;
        if bits.iter().skip(64).any(|&b| b != 0) {
            return None;
        }
        Some(bits.iter().take(64).enumerate().map(|(k, &b)| u64::from(b) << k).sum())
    }

    /// Bits rendered element 0 first, e.g. `"0101"`.
    pub fn bitstring(&self, name: &str) -> Option<String> {
        self.bits(name)
            .map(|bits| bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect())
    }

    /// All registers concatenated in declaration order.
    pub fn concatenated(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }

    fn set(&mut self, creg: usize, bit: usize, value: u8) {
        let offset = self.layout.get(creg).offset;
        self.bits[offset + bit] = value;
    }

    fn equals(&self, creg: usize, value: u64) -> bool {
        self.bits_of(creg)
            .iter()
            .enumerate()
            .all(|(k, &b)| u64::from(b) == if k < 64 { (value >> k) & 1 } else { 0 })
    }
}

impl fmt::Display for ClassicalStore {
    /// One `name = bits` line per register.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, e) in self.layout.entries().iter().enumerate() {
            let bits: String = self
                .bits_of(id)
                .iter()
                .map(|&b| if b == 1 { '1' } else { '0' })
                .collect();
            writeln!(f, "{} = {bits}", e.name)?;
        }
        Ok(())
    }
}

/// Runs `program` in order against `state`, drawing measurement outcomes
/// from `rng`. The state is updated in place.
pub fn execute(
    program: &CompiledProgram,
    state: &mut StateVector,
    rng: &mut RngState,
) -> Result<ClassicalStore, ExecError> {
    if state.n_qubits() != program.n_qubits() {
        return Err(ExecError::StateSizeMismatch {
            expected: program.n_qubits(),
            actual: state.n_qubits(),
        });
    }
    let mut store = ClassicalStore::new(&program.cregs);
    for instr in &program.instructions {
        step(instr, state, rng, &mut store)?;
    }
    Ok(store)
}

fn step(
    instr: &KernelInstruction,
    state: &mut StateVector,
    rng: &mut RngState,
    store: &mut ClassicalStore,
) -> Result<(), ExecError> {
    match instr {
        KernelInstruction::Apply1 { gate, target } => state.apply_1q(gate, *target)?,
        KernelInstruction::Apply2 { gate, q0, q1 } => state.apply_2q(gate, *q0, *q1)?,
        KernelInstruction::Measure { qubit, creg, bit } => {
            let outcome = state.measure(*qubit, rng)?;
            store.set(*creg, *bit, outcome);
        }
        KernelInstruction::Reset { qubit } => {
            state.reset(*qubit, rng)?;
        }
        KernelInstruction::Conditional { creg, value, body } => {
            // Evaluated once: a measurement in the body must not change
            // whether the rest of the body runs.
            if store.equals(*creg, *value) {
                for inner in body {
                    step(inner, state, rng, store)?;
                }
            }
        }
    }
    Ok(())
}
