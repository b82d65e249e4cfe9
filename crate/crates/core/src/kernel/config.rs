use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use super::KernelError;

/// Smallest number of amplitude groups handed to one worker.
pub const MIN_CHUNK_LEN: usize = 1 << 14;

/// Floating-point format of the stored amplitudes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Precision {
    /// Two 32-bit components per amplitude.
    Single,
    /// Two 64-bit components per amplitude.
    #[default]
    Double,
}

impl Precision {
    /// Bytes occupied by one complex amplitude.
    pub const fn element_size(self) -> u64 {
        match self {
            Precision::Single => 8,
            Precision::Double => 16,
        }
    }

    /// Normalization tolerance guaranteed after every public operation.
    pub const fn norm_tolerance(self) -> f64 {
        match self {
            Precision::Single => 1e-6,
            Precision::Double => 1e-12,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Single => "single",
            Precision::Double => "double",
        })
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" | "f32" => Ok(Precision::Single),
            "double" | "f64" => Ok(Precision::Double),
            other => Err(format!("unknown precision '{other}' (expected single or double)")),
        }
    }
}

/// Execution parameters shared by every state built from this config.
///
/// Cloning a config shares its worker pool, so the pool is created at most
/// once no matter how many states or benchmark runs use it.
#[derive(Clone)]
pub struct ExecConfig {
    threads: usize,
    chunk_len: usize,
    memory_limit_bytes: u64,
    pool: Arc<OnceLock<Option<rayon::ThreadPool>>>,
}

impl ExecConfig {
    pub fn new(threads: usize, chunk_len: usize, memory_limit_bytes: u64) -> Result<Self, KernelError> {
        if threads == 0 {
            return Err(KernelError::InvalidConfig("thread count must be at least 1".into()));
        }
        if !chunk_len.is_power_of_two() || chunk_len < MIN_CHUNK_LEN {
            return Err(KernelError::InvalidConfig(format!(
                "chunk length must be a power of two no smaller than {MIN_CHUNK_LEN}, got {chunk_len}"
            )));
        }
        Ok(ExecConfig {
            threads,
            chunk_len,
            memory_limit_bytes,
            pool: Arc::new(OnceLock::new()),
        })
    }

    /// Single worker, default chunking, no memory cap.
    pub fn single_threaded() -> Self {
        Self::new(1, MIN_CHUNK_LEN, u64::MAX).expect("valid config")
    }

    pub fn with_threads(&self, threads: usize) -> Result<Self, KernelError> {
        Self::new(threads, self.chunk_len, self.memory_limit_bytes)
    }

    pub fn with_chunk_len(&self, chunk_len: usize) -> Result<Self, KernelError> {
        Self::new(self.threads, chunk_len, self.memory_limit_bytes)
    }

    pub fn with_memory_limit(&self, memory_limit_bytes: u64) -> Self {
        ExecConfig {
            memory_limit_bytes,
            ..self.clone()
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn chunk_len(&self) -> usize {
        self.chunk_len
    }

    pub fn memory_limit_bytes(&self) -> u64 {
        self.memory_limit_bytes
    }

    /// Worker pool, built on first use. `None` when running on one thread
    /// (or when the pool could not be spawned, which degrades to inline work).
    pub(crate) fn pool(&self) -> Option<&rayon::ThreadPool> {
        if self.threads == 1 {
            return None;
        }
        self.pool
            .get_or_init(|| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(self.threads)
                    .thread_name(|i| format!("svemu-worker-{i}"))
                    .build()
                    .ok()
            })
            .as_ref()
    }
}

impl Default for ExecConfig {
    fn default() -> Self {
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self::new(threads, MIN_CHUNK_LEN, u64::MAX).expect("valid config")
    }
}

impl fmt::Debug for ExecConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExecConfig")
            .field("threads", &self.threads)
            .field("chunk_len", &self.chunk_len)
            .field("memory_limit_bytes", &self.memory_limit_bytes)
            .finish()
    }
}
