//! Lowers an OpenQASM program to flat kernel instructions and runs them.

mod compile;
mod exec;

use std::fmt;

use thiserror::Error;

use crate::kernel::{Gate1, Gate1Kind, Gate2, Gate2Kind, KernelError};

pub use compile::{compile, compile_with, CompileOptions};
pub use exec::{execute, ClassicalStore};

/// Named registers laid out back to back; element `i` of a register lives at
/// `offset + i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RegisterLayout {
    entries: Vec<RegisterEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterEntry {
    pub name: String,
    pub offset: usize,
    pub size: usize,
}

/// Quantum registers mapped onto global qubit indices.
pub type QubitMap = RegisterLayout;
/// Classical registers in declaration order.
pub type CregLayout = RegisterLayout;

impl RegisterLayout {
    pub(crate) fn push(&mut self, name: &str, size: usize) -> usize {
        let offset = self.total();
        self.entries.push(RegisterEntry {
            name: name.to_string(),
            offset,
            size,
        });
        self.entries.len() - 1
    }

    /// Sum of all register sizes.
    pub fn total(&self) -> usize {
        self.entries.last().map_or(0, |e| e.offset + e.size)
    }

    pub fn entries(&self) -> &[RegisterEntry] {
        &self.entries
    }

    pub fn get(&self, id: usize) -> &RegisterEntry {
        &self.entries[id]
    }

    /// Register id for `name`.
    pub fn find(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    /// Register name and element index owning global slot `index`.
    pub fn locate(&self, index: usize) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .find(|e| (e.offset..e.offset + e.size).contains(&index))
            .map(|e| (e.name.as_str(), index - e.offset))
    }
}

// Gates are stored inline: instruction streams are short next to the state
// passes they drive, and boxing would only add an indirection per gate.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq)]
pub enum KernelInstruction {
    Apply1 {
        gate: Gate1,
        target: usize,
    },
    Apply2 {
        gate: Gate2,
        q0: usize,
        q1: usize,
    },
    Measure {
        qubit: usize,
        creg: usize,
        bit: usize,
    },
    Reset {
        qubit: usize,
    },
    /// Runs `body` iff register `creg` reads as `value` when the conditional
    /// is reached. `body` holds the expansion of one source statement and
    /// never contains another conditional.
    Conditional {
        creg: usize,
        value: u64,
        body: Vec<KernelInstruction>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ProgramStats {
    pub gate_count: usize,
    pub measure_count: usize,
    pub reset_count: usize,
}

impl ProgramStats {
    fn tally(&mut self, instr: &KernelInstruction) {
        match instr {
            KernelInstruction::Apply1 { .. } | KernelInstruction::Apply2 { .. } => self.gate_count += 1,
            KernelInstruction::Measure { .. } => self.measure_count += 1,
            KernelInstruction::Reset { .. } => self.reset_count += 1,
            KernelInstruction::Conditional { body, .. } => body.iter().for_each(|i| self.tally(i)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledProgram {
    pub instructions: Vec<KernelInstruction>,
    pub qubit_map: QubitMap,
    pub cregs: CregLayout,
    pub stats: ProgramStats,
}

impl CompiledProgram {
    pub(crate) fn new(instructions: Vec<KernelInstruction>, qubit_map: QubitMap, cregs: CregLayout) -> Self {
        let mut stats = ProgramStats::default();
        instructions.iter().for_each(|i| stats.tally(i));
        CompiledProgram {
            instructions,
            qubit_map,
            cregs,
            stats,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.qubit_map.total()
    }

    /// Same program with every measurement (including conditional ones)
    /// removed; handy for inspecting the pre-measurement state.
    pub fn without_measurements(&self) -> CompiledProgram {
        fn strip(instrs: &[KernelInstruction]) -> Vec<KernelInstruction> {
            instrs
                .iter()
                .filter(|i| !matches!(i, KernelInstruction::Measure { .. }))
                .map(|i| match i {
                    KernelInstruction::Conditional { creg, value, body } => KernelInstruction::Conditional {
                        creg: *creg,
                        value: *value,
                        body: strip(body),
                    },
                    other => other.clone(),
                })
                .collect()
        }
        CompiledProgram::new(strip(&self.instructions), self.qubit_map.clone(), self.cregs.clone())
    }

    /// One instruction per line: opcode, kind tag, operands.
    pub fn disassemble(&self) -> String {
        let mut out = String::new();
        for instr in &self.instructions {
            out.push_str(&self.render(instr));
            out.push('\n');
        }
        out
    }

    fn render(&self, instr: &KernelInstruction) -> String {
        let bit = |creg: usize, bit: usize| format!("{}[{bit}]", self.cregs.get(creg).name);
        match instr {
            KernelInstruction::Apply1 { gate, target } => format!("apply1 {} {target}", Gate1Tag(gate)),
            KernelInstruction::Apply2 { gate, q0, q1 } => format!("apply2 {} {q0} {q1}", Gate2Tag(gate)),
            KernelInstruction::Measure { qubit, creg, bit: b } => format!("measure {qubit} -> {}", bit(*creg, *b)),
            KernelInstruction::Reset { qubit } => format!("reset {qubit}"),
            KernelInstruction::Conditional { creg, value, body } => {
                let inner: Vec<String> = body.iter().map(|i| self.render(i)).collect();
                format!("if {}=={value} {{ {} }}", self.cregs.get(*creg).name, inner.join("; "))
            }
        }
    }
}

struct Gate1Tag<'a>(&'a Gate1);

impl fmt::Display for Gate1Tag<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0.kind() {
            Gate1Kind::Dense => "dense",
            Gate1Kind::Diagonal => "diag",
            Gate1Kind::AntiDiagonal => "antidiag",
        })
    }
}

struct Gate2Tag<'a>(&'a Gate2);

impl fmt::Display for Gate2Tag<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.kind() {
            Gate2Kind::Dense => f.write_str("dense"),
            Gate2Kind::Diagonal => f.write_str("diag"),
            Gate2Kind::ControlledPhase { phase } => write!(f, "cphase({phase:.9})"),
            Gate2Kind::Permutation => f.write_str("perm"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("{line}:{col}: unknown gate '{name}'")]
    UnknownGate { name: String, line: usize, col: usize },
    #[error("{line}:{col}: unknown register '{name}'")]
    UnknownRegister { name: String, line: usize, col: usize },
    #[error("{line}:{col}: '{name}' is not a {expected} register")]
    RegisterKindMismatch {
        name: String,
        expected: &'static str,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: gate '{name}' takes {expected} {what}, got {found}")]
    ArityMismatch {
        name: String,
        what: &'static str,
        expected: usize,
        found: usize,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: register operands have different lengths")]
    BroadcastLengthMismatch { line: usize, col: usize },
    #[error("{line}:{col}: opaque gate '{name}' has no definition to execute")]
    OpaqueCallUnsupported { name: String, line: usize, col: usize },
    #[error("{line}:{col}: value {value} does not fit in register '{creg}' of size {size}")]
    RegisterOverflow {
        creg: String,
        value: u64,
        size: usize,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: index {index} out of range for register '{name}' of size {size}")]
    IndexOutOfRange {
        name: String,
        index: usize,
        size: usize,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: qubit {qubit} used twice in one gate application")]
    DuplicateQubit { qubit: usize, line: usize, col: usize },
    #[error("{line}:{col}: {message}")]
    Expression { message: String, line: usize, col: usize },
    #[error("{line}:{col}: {message}")]
    Unsupported { message: String, line: usize, col: usize },
    #[error("{line}:{col}: gate '{name}' lowers to an invalid matrix: {source}")]
    InvalidGate {
        name: String,
        source: KernelError,
        line: usize,
        col: usize,
    },
}

impl CompileError {
    pub fn position(&self) -> (usize, usize) {
        use CompileError::*;
        match self {
            UnknownGate { line, col, .. }
            | UnknownRegister { line, col, .. }
            | RegisterKindMismatch { line, col, .. }
            | ArityMismatch { line, col, .. }
            | BroadcastLengthMismatch { line, col }
            | OpaqueCallUnsupported { line, col, .. }
            | RegisterOverflow { line, col, .. }
            | IndexOutOfRange { line, col, .. }
            | DuplicateQubit { line, col, .. }
            | Expression { line, col, .. }
            | Unsupported { line, col, .. }
            | InvalidGate { line, col, .. } => (*line, *col),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error("program needs {expected} qubits but the state has {actual}")]
    StateSizeMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
