//! Exact state-vector emulation of gate-based quantum programs written in
//! OpenQASM 2.0.
//!
//! The pipeline is `qasm` (text to checked AST) → `vm` (AST to flat kernel
//! instructions, then execution) → `kernel` (in-place amplitude updates).
//! `bench` times compiled programs and generates the standard circuit
//! families.

pub mod bench;
pub mod kernel;
pub mod qasm;
pub mod vm;

use std::path::Path;

use thiserror::Error;

pub use kernel::{
    state_footprint, ExecConfig, Gate1, Gate1Kind, Gate2, Gate2Kind, KernelError, Precision, RngState, StateVector,
};
pub use qasm::{FrontendError, Program};
pub use vm::{
    compile, execute, ClassicalStore, CompileError, CompiledProgram, ExecError, KernelInstruction, ProgramStats,
};

/// Any failure along the source-to-result pipeline, tagged by phase.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{} error: {}", frontend_phase(.0), .0)]
    Frontend(FrontendError),
    #[error("compile error: {0}")]
    Compile(CompileError),
    #[error("allocation error: {0}")]
    Allocate(KernelError),
    #[error("runtime error: {0}")]
    Execute(ExecError),
}

fn frontend_phase(e: &FrontendError) -> &'static str {
    match e {
        FrontendError::Lex { .. } => "lex",
        FrontendError::Parse { .. } => "parse",
        FrontendError::Semantic { .. } => "semantic",
        FrontendError::IncludeNotFound { .. } | FrontendError::IncludeCycle { .. } => "include",
        FrontendError::InFile { error, .. } => frontend_phase(error),
    }
}

impl Error {
    /// Short name of the failing phase: `lex`, `parse`, `semantic`,
    /// `include`, `compile`, `allocation` or `runtime`.
    pub fn phase(&self) -> &'static str {
        match self {
            Error::Frontend(e) => frontend_phase(e),
            Error::Compile(_) => "compile",
            Error::Allocate(_) => "allocation",
            Error::Execute(_) => "runtime",
        }
    }

    /// Source `(line, col)` for frontend and compile errors.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            Error::Frontend(e) => e.position(),
            Error::Compile(e) => Some(e.position()),
            _ => None,
        }
    }
}

impl From<FrontendError> for Error {
    fn from(e: FrontendError) -> Self {
        Error::Frontend(e)
    }
}

impl From<CompileError> for Error {
    fn from(e: CompileError) -> Self {
        Error::Compile(e)
    }
}

impl From<ExecError> for Error {
    fn from(e: ExecError) -> Self {
        Error::Execute(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub classical: ClassicalStore,
    pub stats: ProgramStats,
    /// Squared norm of the final state.
    pub final_norm: f64,
}

/// Parses, compiles and executes `source` once from `|0...0>`. Includes
/// other than the bundled `qelib1.inc` resolve against the working
/// directory.
pub fn run_source(source: &str, precision: Precision, seed: u64, config: &ExecConfig) -> Result<RunOutcome, Error> {
    run_source_at(source, Path::new("."), precision, seed, config)
}

/// [`run_source`] with includes resolved relative to `base_path`.
pub fn run_source_at(
    source: &str,
    base_path: &Path,
    precision: Precision,
    seed: u64,
    config: &ExecConfig,
) -> Result<RunOutcome, Error> {
    let program = compile(&qasm::load_source(source, base_path)?)?;
    let mut state = StateVector::new(program.n_qubits(), precision, config).map_err(Error::Allocate)?;
    let classical = execute(&program, &mut state, &mut RngState::new(seed))?;
    Ok(RunOutcome {
        classical,
        stats: program.stats,
        final_norm: state.norm_sqr(),
    })
}
