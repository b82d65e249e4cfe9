//! Repeated timed execution and the generated circuit families.

mod generate;
mod report;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::kernel::{ExecConfig, Precision, RngState, StateVector};
use crate::vm::{compile, execute, CompiledProgram};
use crate::Error as PipelineError;

pub use generate::{generate_bv, generate_ghz, generate_qft, BitString, Family, GenError};
pub use report::{format_report, BenchmarkReport, ReportFormat};

/// Where a benchmark's program comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum BenchmarkSource {
    /// OpenQASM text; includes resolve relative to `base_path`.
    Qasm {
        text: String,
        base_path: PathBuf,
    },
    Generated(Family),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub name: String,
    pub source: BenchmarkSource,
    pub runs: usize,
    pub precision: Precision,
    /// Run `r` draws measurement outcomes from seed `seed_base + r`.
    pub seed_base: u64,
    pub threads: usize,
}

impl BenchmarkSpec {
    pub fn generated(family: Family, runs: usize) -> Self {
        BenchmarkSpec {
            name: family.to_string(),
            source: BenchmarkSource::Generated(family),
            runs,
            precision: Precision::Double,
            seed_base: 0,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("{0}")]
    Generate(#[from] GenError),
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    #[error("invalid benchmark: {0}")]
    InvalidSpec(String),
    #[error("invalid report: {0}")]
    ReportInvalid(String),
}

/// Time source for the timed region. Readings must never decrease.
pub trait Clock {
    fn now(&mut self) -> Duration;
}

/// Wall clock backed by [`Instant`].
#[derive(Debug)]
pub struct MonotonicClock(Instant);

impl Default for MonotonicClock {
    fn default() -> Self {
        MonotonicClock(Instant::now())
    }
}

impl Clock for MonotonicClock {
    fn now(&mut self) -> Duration {
        self.0.elapsed()
    }
}

/// Advances by a fixed step on every reading; each run then measures
/// exactly one step.
#[derive(Debug, Default)]
pub struct StepClock {
    pub t: Duration,
    pub step: Duration,
}

impl Clock for StepClock {
    fn now(&mut self) -> Duration {
        let t = self.t;
        self.t += self.step;
        t
    }
}

/// Replays a fixed list of readings, for testing the statistics.
#[derive(Debug, Default)]
pub struct ScriptedClock {
    pub readings: Vec<Duration>,
    next: usize,
}

impl ScriptedClock {
    pub fn new(readings: Vec<Duration>) -> Self {
        ScriptedClock { readings, next: 0 }
    }
}

impl Clock for ScriptedClock {
    fn now(&mut self) -> Duration {
        let t = self.readings[self.next.min(self.readings.len() - 1)];
        self.next += 1;
        t
    }
}

fn load(spec: &BenchmarkSpec) -> Result<CompiledProgram, BenchError> {
    let program = match &spec.source {
        BenchmarkSource::Qasm { text, base_path } => {
            crate::qasm::load_source(text, base_path).map_err(PipelineError::from)?
        }
        BenchmarkSource::Generated(family) => {
            crate::qasm::load_source(&family.generate()?, std::path::Path::new(".")).map_err(PipelineError::from)?
        }
    };
    Ok(compile(&program).map_err(PipelineError::from)?)
}

/// Runs with a monotonic clock and a default-sized execution config.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkReport, BenchError> {
    run_benchmark_with(spec, &ExecConfig::default(), &mut MonotonicClock::default())
}

/// Compiles once, then per run allocates a fresh state, seeds a fresh RNG
/// and executes. The timed region is allocation plus execution. `base`
/// supplies chunking and the memory limit; the thread count comes from the
/// spec.
pub fn run_benchmark_with(
    spec: &BenchmarkSpec,
    base: &ExecConfig,
    clock: &mut dyn Clock,
) -> Result<BenchmarkReport, BenchError> {
    if spec.runs == 0 {
        return Err(BenchError::InvalidSpec("runs must be at least 1".into()));
    }
    let config = base
        .with_threads(spec.threads)
        .map_err(|e| BenchError::InvalidSpec(e.to_string()))?;
    let program = load(spec)?;
    let mut samples = Vec::with_capacity(spec.runs);
    for r in 0..spec.runs {
        let mut rng = RngState::new(spec.seed_base.wrapping_add(r as u64));
        let start = clock.now();
        let mut state =
            StateVector::new(program.n_qubits(), spec.precision, &config).map_err(PipelineError::Allocate)?;
        execute(&program, &mut state, &mut rng).map_err(PipelineError::from)?;
        let end = clock.now();
        drop(state);
        let elapsed = end
            .checked_sub(start)
            .ok_or_else(|| BenchError::ReportInvalid(format!("clock went backwards during run {r}")))?;
        samples.push(elapsed.as_secs_f64());
    }
    let (mean, max, min, stddev) = statistics(&samples);
    Ok(BenchmarkReport {
        name: spec.name.clone(),
        n_qubits: program.n_qubits(),
        runs: spec.runs,
        mean_s: mean,
        max_s: max,
        min_s: min,
        stddev_s: stddev,
        gate_count: program.stats.gate_count,
        measure_count: program.stats.measure_count,
        reset_count: program.stats.reset_count,
    })
}

/// `(mean, max, min, sample stddev)`; stddev is 0 for a single sample. The
/// mean is clamped into `[min, max]` against summation round-off.
fn statistics(samples: &[f64]) -> (f64, f64, f64, f64) {
    let n = samples.len() as f64;
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = (samples.iter().sum::<f64>() / n).clamp(min, max);
    let stddev = if samples.len() < 2 {
        0.0
    } else {
        (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (mean, max, min, stddev)
}
