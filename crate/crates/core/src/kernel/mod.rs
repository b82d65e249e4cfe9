//! Exact state-vector storage and the native operations on it.
//!
//! Basis index `i` encodes qubit `q` as bit `q` of `i` (little-endian). All
//! updates happen in place on the single buffer allocated at construction.

mod config;
mod gate;
pub(crate) mod par;
mod rng;

use num_complex::{Complex, Complex32, Complex64};
use num_traits::{Float, One, Zero};
use thiserror::Error;

pub use config::{ExecConfig, Precision, MIN_CHUNK_LEN};
pub use gate::{classify_gate2, u_matrix, Gate1, Gate1Kind, Gate2, Gate2Kind, Matrix2, Matrix4, UNITARY_TOL, ZERO_TOL};
pub use rng::RngState;

use par::{for_each_chunk, insert_two_zeros, insert_zero, sum_chunks, SharedMut};

/// A sampled outcome below this probability means the state is corrupted.
pub const DEGENERATE_PROBABILITY: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("qubit count must be at least 1")]
    InvalidQubitCount,
    #[error("a {n_qubits}-qubit state needs {requested_bytes} bytes, above the {limit_bytes}-byte memory limit")]
    MemoryLimitExceeded {
        n_qubits: usize,
        requested_bytes: u128,
        limit_bytes: u64,
    },
    #[error("could not allocate {bytes} bytes for the state")]
    AllocationFailed { bytes: u128 },
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {qubit} used twice in one two-qubit gate")]
    DuplicateQubit { qubit: usize },
    #[error("basis index {index} out of range (state length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("sampled outcome on qubit {qubit} has probability {probability:e}")]
    DegenerateProbability { qubit: usize, probability: f64 },
    #[error("amplitudes are not normalized (squared norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("amplitude count {len} is not a power of two >= 2")]
    InvalidLength { len: usize },
    #[error("invalid execution config: {0}")]
    InvalidConfig(String),
}

/// Bytes needed to store an `n_qubits` state at `precision`.
pub fn state_footprint(n_qubits: usize, precision: Precision) -> u128 {
    if n_qubits >= 120 {
        return u128::MAX;
    }
    (precision.element_size() as u128) << n_qubits
}

/// Floating-point component type of a stored amplitude.
pub(crate) trait Real: Float + Send + Sync + 'static {
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Real for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
}

#[inline(always)]
fn cast<T: Real>(z: Complex64) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

#[derive(Clone)]
enum Amplitudes {
    Single(Vec<Complex32>),
    Double(Vec<Complex64>),
}

macro_rules! with_amps {
    ($amps:expr, $v:ident => $body:expr) => {
        match $amps {
            Amplitudes::Single($v) => $body,
            Amplitudes::Double($v) => $body,
        }
    };
}

/// The emulated register: `2^n` complex amplitudes in one contiguous buffer.
#[derive(Clone)]
pub struct StateVector {
    n_qubits: usize,
    amps: Amplitudes,
    config: ExecConfig,
}

impl std::fmt::Debug for StateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StateVector")
            .field("n_qubits", &self.n_qubits)
            .field("precision", &self.precision())
            .finish_non_exhaustive()
    }
}

fn alloc_zero_state<T: Real>(len: usize, bytes: u128) -> Result<Vec<Complex<T>>, KernelError> {
    let mut v: Vec<Complex<T>> = Vec::new();
    v.try_reserve_exact(len)
        .map_err(|_| KernelError::AllocationFailed { bytes })?;
    v.resize(len, Complex::zero());
    v[0] = Complex::one();
    Ok(v)
}

impl StateVector {
    /// Allocates `|0...0>`. Fails before allocating if the footprint exceeds
    /// the configured memory limit.
    pub fn new(n_qubits: usize, precision: Precision, config: &ExecConfig) -> Result<Self, KernelError> {
        if n_qubits == 0 {
            return Err(KernelError::InvalidQubitCount);
        }
        let bytes = state_footprint(n_qubits, precision);
        if bytes > config.memory_limit_bytes() as u128 || n_qubits >= usize::BITS as usize - 1 {
            return Err(KernelError::MemoryLimitExceeded {
                n_qubits,
                requested_bytes: bytes,
                limit_bytes: config.memory_limit_bytes(),
            });
        }
        let len = 1usize << n_qubits;
        let amps = match precision {
            Precision::Single => Amplitudes::Single(alloc_zero_state(len, bytes)?),
            Precision::Double => Amplitudes::Double(alloc_zero_state(len, bytes)?),
        };
        Ok(StateVector {
            n_qubits,
            amps,
            config: config.clone(),
        })
    }

    /// Builds a state from explicit amplitudes, which must be normalized.
    pub fn from_amplitudes(
        amplitudes: &[Complex64],
        precision: Precision,
        config: &ExecConfig,
    ) -> Result<Self, KernelError> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(KernelError::InvalidLength { len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        let mut state = Self::new(n_qubits, precision, config)?;
        with_amps!(&mut state.amps, v => {
            for (dst, src) in v.iter_mut().zip(amplitudes) {
                *dst = cast(*src);
            }
        });
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > precision.norm_tolerance() {
            return Err(KernelError::NotNormalized { norm });
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn precision(&self) -> Precision {
        match self.amps {
            Amplitudes::Single(_) => Precision::Single,
            Amplitudes::Double(_) => Precision::Double,
        }
    }

    pub fn config(&self) -> &ExecConfig {
        &self.config
    }

    /// Bytes held by the amplitude buffer.
    pub fn footprint_bytes(&self) -> u64 {
        with_amps!(&self.amps, v => (v.capacity() * std::mem::size_of_val(&v[0])) as u64)
    }

    pub fn amplitude(&self, index: usize) -> Result<Complex64, KernelError> {
        if index >= self.len() {
            return Err(KernelError::IndexOutOfRange { index, len: self.len() });
        }
        Ok(with_amps!(&self.amps, v => Complex64::new(v[index].re.to_f64(), v[index].im.to_f64())))
    }

    /// Copy of all amplitudes widened to double precision.
    pub fn to_vec(&self) -> Vec<Complex64> {
        with_amps!(&self.amps, v => v.iter().map(|z| Complex64::new(z.re.to_f64(), z.im.to_f64())).collect())
    }

    /// Sum of `|a_i|^2`, reduced in fixed chunk order.
    pub fn norm_sqr(&self) -> f64 {
        let chunk = self.config.chunk_len();
        let pool = self.config.pool();
        with_amps!(&self.amps, v => {
            let v = v.as_slice();
            sum_chunks(pool, v.len(), chunk, |r| (v[r].iter().map(|z| z.norm_sqr().to_f64()).sum(), 0.0)).0
        })
    }

    fn check_qubit(&self, qubit: usize) -> Result<u32, KernelError> {
        if qubit >= self.n_qubits {
            Err(KernelError::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(qubit as u32)
        }
    }

    /// Applies a one-qubit gate in place.
    pub fn apply_1q(&mut self, gate: &Gate1, target: usize) -> Result<(), KernelError> {
        let t = self.check_qubit(target)?;
        let chunk = self.config.chunk_len();
        let pool = self.config.pool();
        with_amps!(&mut self.amps, v => apply_1q_kernel(v, pool, chunk, gate, t));
        Ok(())
    }

    /// Applies a two-qubit gate in place; `q0` is the low bit of the gate's
    /// local basis.
    pub fn apply_2q(&mut self, gate: &Gate2, q0: usize, q1: usize) -> Result<(), KernelError> {
        let b0 = self.check_qubit(q0)?;
        let b1 = self.check_qubit(q1)?;
        if q0 == q1 {
            return Err(KernelError::DuplicateQubit { qubit: q0 });
        }
        let chunk = self.config.chunk_len();
        let pool = self.config.pool();
        with_amps!(&mut self.amps, v => apply_2q_kernel(v, pool, chunk, gate, b0, b1));
        Ok(())
    }

    /// Probability of reading 0 on `qubit`.
    pub fn probability_zero(&self, qubit: usize) -> Result<f64, KernelError> {
        let q = self.check_qubit(qubit)?;
        Ok(self.branch_weights(q).0.min(1.0))
    }

    fn branch_weights(&self, q: u32) -> (f64, f64) {
        let chunk = self.config.chunk_len();
        let pool = self.config.pool();
        with_amps!(&self.amps, v => {
            let v = v.as_slice();
            let bit = 1usize << q;
            sum_chunks(pool, v.len() / 2, chunk, |r| {
                let (mut p0, mut p1) = (0.0, 0.0);
                for g in r {
                    let i0 = insert_zero(g, q);
                    p0 += v[i0].norm_sqr().to_f64();
                    p1 += v[i0 | bit].norm_sqr().to_f64();
                }
                (p0, p1)
            })
        })
    }

    /// Projective measurement in the computational basis. Outcome 0 is chosen
    /// iff a uniform draw `u` satisfies `u < p0`.
    pub fn measure(&mut self, qubit: usize, rng: &mut RngState) -> Result<u8, KernelError> {
        let u = rng.uniform();
        self.measure_with_draw(qubit, u, false)
    }

    /// Measures `qubit` and flips it back to `|0>` if the outcome was 1.
    /// Returns the measured outcome.
    pub fn reset(&mut self, qubit: usize, rng: &mut RngState) -> Result<u8, KernelError> {
        let u = rng.uniform();
        self.measure_with_draw(qubit, u, true)
    }

    fn measure_with_draw(&mut self, qubit: usize, u: f64, flip: bool) -> Result<u8, KernelError> {
        let q = self.check_qubit(qubit)?;
        let (w0, w1) = self.branch_weights(q);
        let total = w0 + w1;
        let outcome = u8::from(u >= w0 / total);
        let weight = if outcome == 0 { w0 } else { w1 };
        // NaN (an all-zero state) counts as degenerate too.
        if (weight / total).is_nan() || weight / total < DEGENERATE_PROBABILITY {
            return Err(KernelError::DegenerateProbability {
                qubit,
                probability: weight / total,
            });
        }
        let scale = 1.0 / weight.sqrt();
        let chunk = self.config.chunk_len();
        let pool = self.config.pool();
        let op = match (outcome, flip) {
            (0, _) => Collapse::KeepZero,
            (_, false) => Collapse::KeepOne,
            (_, true) => Collapse::MoveOneToZero,
        };
        with_amps!(&mut self.amps, v => collapse_kernel(v, pool, chunk, q, scale, op));
        Ok(outcome)
    }
}

#[derive(Clone, Copy)]
enum Collapse {
    KeepZero,
    KeepOne,
    MoveOneToZero,
}

fn collapse_kernel<T: Real>(
    v: &mut [Complex<T>],
    pool: Option<&rayon::ThreadPool>,
    chunk: usize,
    q: u32,
    scale: f64,
    op: Collapse,
) {
    let s = T::from_f64(scale);
    let bit = 1usize << q;
    let n_groups = v.len() / 2;
    let p = SharedMut::new(v);
    let zero = Complex::<T>::zero();
    for_each_chunk(pool, n_groups, chunk, |r| {
        for g in r {
            let i0 = insert_zero(g, q);
            let i1 = i0 | bit;
            // SAFETY: pair (i0, i1) belongs to group g only.
            unsafe {
                match op {
                    Collapse::KeepZero => {
                        p.set(i0, p.get(i0) * s);
                        p.set(i1, zero);
                    }
                    Collapse::KeepOne => {
                        p.set(i0, zero);
                        p.set(i1, p.get(i1) * s);
                    }
                    Collapse::MoveOneToZero => {
                        p.set(i0, p.get(i1) * s);
                        p.set(i1, zero);
                    }
                }
            }
        }
    });
}

fn apply_1q_kernel<T: Real>(
    v: &mut [Complex<T>],
    pool: Option<&rayon::ThreadPool>,
    chunk: usize,
    gate: &Gate1,
    t: u32,
) {
    let m = gate.matrix();
    let (m00, m01, m10, m11) = (
        cast::<T>(m[0][0]),
        cast::<T>(m[0][1]),
        cast::<T>(m[1][0]),
        cast::<T>(m[1][1]),
    );
    let bit = 1usize << t;
    let n_groups = v.len() / 2;
    let p = SharedMut::new(v);
    // SAFETY (all arms): each group g owns exactly the pair (i0, i0 | bit),
    // and work items cover disjoint group ranges.
    match gate.kind() {
        Gate1Kind::Dense => for_each_chunk(pool, n_groups, chunk, |r| {
            for g in r {
                let i0 = insert_zero(g, t);
                let i1 = i0 | bit;
                unsafe {
                    let (a0, a1) = (p.get(i0), p.get(i1));
                    p.set(i0, m00 * a0 + m01 * a1);
                    p.set(i1, m10 * a0 + m11 * a1);
                }
            }
        }),
        Gate1Kind::Diagonal => for_each_chunk(pool, n_groups, chunk, |r| {
            for g in r {
                let i0 = insert_zero(g, t);
                let i1 = i0 | bit;
                unsafe {
                    p.set(i0, m00 * p.get(i0));
                    p.set(i1, m11 * p.get(i1));
                }
            }
        }),
        Gate1Kind::AntiDiagonal => for_each_chunk(pool, n_groups, chunk, |r| {
            for g in r {
                let i0 = insert_zero(g, t);
                let i1 = i0 | bit;
                unsafe {
                    let (a0, a1) = (p.get(i0), p.get(i1));
                    p.set(i0, m01 * a1);
                    p.set(i1, m10 * a0);
                }
            }
        }),
    }
}

fn apply_2q_kernel<T: Real>(
    v: &mut [Complex<T>],
    pool: Option<&rayon::ThreadPool>,
    chunk: usize,
    gate: &Gate2,
    q0: u32,
    q1: u32,
) {
    let mut m = [[Complex::<T>::zero(); 4]; 4];
    for (r, row) in gate.matrix().iter().enumerate() {
        for (c, z) in row.iter().enumerate() {
            m[r][c] = cast(*z);
        }
    }
    let (lo, hi) = (q0.min(q1), q0.max(q1));
    let (b0, b1) = (1usize << q0, 1usize << q1);
    let n_groups = v.len() / 4;
    let p = SharedMut::new(v);
    // SAFETY (all arms): group g owns the four indices base | {0, b0, b1, b0|b1},
    // and work items cover disjoint group ranges.
    match gate.kind() {
        Gate2Kind::Dense => for_each_chunk(pool, n_groups, chunk, |r| {
            for g in r {
                let base = insert_two_zeros(g, lo, hi);
                let idx = [base, base | b0, base | b1, base | b0 | b1];
                unsafe {
                    let a = idx.map(|i| p.get(i));
                    for (row, &i) in m.iter().zip(&idx) {
                        p.set(i, row[0] * a[0] + row[1] * a[1] + row[2] * a[2] + row[3] * a[3]);
                    }
                }
            }
        }),
        Gate2Kind::ControlledPhase { .. } => {
            let phase = m[3][3];
            for_each_chunk(pool, n_groups, chunk, |r| {
                for g in r {
                    let i = insert_two_zeros(g, lo, hi) | b0 | b1;
                    unsafe { p.set(i, phase * p.get(i)) }
                }
            })
        }
        Gate2Kind::Diagonal => {
            let d = [m[0][0], m[1][1], m[2][2], m[3][3]];
            for_each_chunk(pool, n_groups, chunk, |r| {
                for g in r {
                    let base = insert_two_zeros(g, lo, hi);
                    let idx = [base, base | b0, base | b1, base | b0 | b1];
                    for (k, &i) in idx.iter().enumerate() {
                        unsafe { p.set(i, d[k] * p.get(i)) }
                    }
                }
            })
        }
        Gate2Kind::Permutation => {
            let perm = gate.permutation().map(|(src, f)| (src, cast::<T>(f)));
            for_each_chunk(pool, n_groups, chunk, |r| {
                for g in r {
                    let base = insert_two_zeros(g, lo, hi);
                    let idx = [base, base | b0, base | b1, base | b0 | b1];
                    unsafe {
                        let a = idx.map(|i| p.get(i));
                        for (k, &i) in idx.iter().enumerate() {
                            let (src, f) = perm[k];
                            p.set(i, f * a[src]);
                        }
                    }
                }
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn cfg() -> ExecConfig {
        ExecConfig::single_threaded()
    }

    fn h() -> Gate1 {
        Gate1::u(PI / 2.0, 0.0, PI)
    }

    fn x() -> Gate1 {
        Gate1::u(PI, 0.0, PI)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn new_state_is_ground() {
        let s = StateVector::new(1, Precision::Double, &cfg()).unwrap();
        assert_eq!(s.to_vec(), vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(s.footprint_bytes(), 32);
        let s = StateVector::new(3, Precision::Single, &cfg()).unwrap();
        assert_eq!(s.footprint_bytes(), 64);
    }

    #[test]
    fn new_state_errors() {
        assert_eq!(
            StateVector::new(0, Precision::Double, &cfg()).unwrap_err(),
            KernelError::InvalidQubitCount
        );
        let limited = cfg().with_memory_limit(1024);
        assert!(matches!(
            StateVector::new(7, Precision::Double, &limited),
            Err(KernelError::MemoryLimitExceeded {
                requested_bytes: 2048,
                ..
            })
        ));
        assert!(StateVector::new(6, Precision::Double, &limited).is_ok());
        assert!(matches!(
            StateVector::new(200, Precision::Single, &cfg()),
            Err(KernelError::MemoryLimitExceeded { .. })
        ));
    }

    #[test]
    fn footprint_accounting_at_the_ram_ceiling() {
        // 34 single-precision qubits: 128 GiB.
        assert_eq!(state_footprint(34, Precision::Single), 8 << 34);
        assert_eq!(state_footprint(34, Precision::Single), 128 * (1u128 << 30));
        // 35 qubits need 256 GiB, above a 2^37.5-byte cap.
        let cap = 2f64.powf(37.5) as u64;
        let config = cfg().with_memory_limit(cap);
        assert!(matches!(
            StateVector::new(35, Precision::Single, &config),
            Err(KernelError::MemoryLimitExceeded { requested_bytes, .. }) if requested_bytes == 256 << 30
        ));
    }

    #[test]
    fn hadamard_and_z() {
        let mut s = StateVector::new(1, Precision::Double, &cfg()).unwrap();
        s.apply_1q(&h(), 0).unwrap();
        let r = FRAC_1_SQRT_2;
        assert!(close(s.amplitude(0).unwrap(), Complex64::new(r, 0.0), 1e-15));
        assert!(close(s.amplitude(1).unwrap(), Complex64::new(r, 0.0), 1e-15));
        let z = Gate1::u(0.0, 0.0, PI);
        assert_eq!(z.kind(), Gate1Kind::Diagonal);
        s.apply_1q(&z, 0).unwrap();
        assert!(close(s.amplitude(1).unwrap(), Complex64::new(-r, 0.0), 1e-15));
    }

    #[test]
    fn amplitude_access() {
        let mut s = StateVector::new(2, Precision::Double, &cfg()).unwrap();
        assert_eq!(s.amplitude(0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitude(1).unwrap(), Complex64::new(0.0, 0.0));
        s.apply_1q(&h(), 0).unwrap();
        assert_abs_diff_eq!(s.amplitude(1).unwrap().re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(s.amplitude(4), Err(KernelError::IndexOutOfRange { index: 4, len: 4 }));
    }

    #[test]
    fn cx_truth_table() {
        let mut s = StateVector::new(2, Precision::Double, &cfg()).unwrap();
        s.apply_1q(&x(), 0).unwrap();
        s.apply_2q(&Gate2::cx(), 0, 1).unwrap();
        let probs: Vec<f64> = s.to_vec().iter().map(|z| z.norm_sqr()).collect();
        assert_eq!(probs, vec![0.0, 0.0, 0.0, 1.0]);
        s.apply_2q(&Gate2::controlled_phase(PI), 0, 1).unwrap();
        assert!(close(s.amplitude(3).unwrap(), Complex64::new(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn gate_errors() {
        let mut s = StateVector::new(2, Precision::Double, &cfg()).unwrap();
        assert_eq!(
            s.apply_1q(&h(), 2),
            Err(KernelError::QubitOutOfRange { qubit: 2, n_qubits: 2 })
        );
        assert_eq!(
            s.apply_2q(&Gate2::cx(), 1, 1),
            Err(KernelError::DuplicateQubit { qubit: 1 })
        );
        assert!(s.apply_2q(&Gate2::cx(), 0, 5).is_err());
        assert!(s.probability_zero(9).is_err());
    }

    #[test]
    fn probability_zero_basics() {
        let mut s = StateVector::new(1, Precision::Double, &cfg()).unwrap();
        assert_eq!(s.probability_zero(0).unwrap(), 1.0);
        s.apply_1q(&h(), 0).unwrap();
        assert_abs_diff_eq!(s.probability_zero(0).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn measure_ground_is_deterministic() {
        for seed in 0..20 {
            let mut s = StateVector::new(2, Precision::Double, &cfg()).unwrap();
            let before = s.to_vec();
            assert_eq!(s.measure(0, &mut RngState::new(seed)).unwrap(), 0);
            assert_eq!(s.to_vec(), before);
        }
    }

    #[test]
    fn measure_bell_collapses_both() {
        for seed in 0..20 {
            let mut s = StateVector::new(2, Precision::Double, &cfg()).unwrap();
            s.apply_1q(&h(), 0).unwrap();
            s.apply_2q(&Gate2::cx(), 0, 1).unwrap();
            let b = s.measure(0, &mut RngState::new(seed)).unwrap();
            let idx = if b == 0 { 0 } else { 3 };
            for i in 0..4 {
                let want = if i == idx { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(s.amplitude(i).unwrap().norm(), want, epsilon = 1e-15);
            }
            // Off-branch amplitudes are exactly zero.
            assert_eq!(s.amplitude(3 - idx).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn measure_frequency_of_plus_state() {
        let mut ones = 0;
        for seed in 0..10_000 {
            let mut s = StateVector::new(1, Precision::Double, &cfg()).unwrap();
            s.apply_1q(&h(), 0).unwrap();
            ones += s.measure(0, &mut RngState::new(seed)).unwrap() as u32;
        }
        let freq = ones as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&freq), "frequency {freq}");
    }

    #[test]
    fn reset_one_to_zero() {
        let mut s = StateVector::new(1, Precision::Double, &cfg()).unwrap();
        s.apply_1q(&x(), 0).unwrap();
        s.reset(0, &mut RngState::new(3)).unwrap();
        assert_eq!(s.to_vec()[0].norm(), 1.0);
        assert_eq!(s.to_vec()[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reset_bell_keeps_partner_branch() {
        for seed in 0..20 {
            let mut s = StateVector::new(2, Precision::Double, &cfg()).unwrap();
            s.apply_1q(&h(), 0).unwrap();
            s.apply_2q(&Gate2::cx(), 0, 1).unwrap();
            let b = s.reset(0, &mut RngState::new(seed)).unwrap();
            // Qubit 0 is |0>, qubit 1 holds the sampled bit: index 0 or 2.
            let idx = if b == 0 { 0 } else { 2 };
            assert_abs_diff_eq!(s.amplitude(idx).unwrap().norm(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(s.probability_zero(0).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reset_branch_frequencies() {
        let a0 = 0.3f64.sqrt();
        let a1 = 0.7f64.sqrt();
        let amps = [Complex64::new(a0, 0.0), Complex64::new(a1, 0.0)];
        let mut ones = 0;
        for seed in 0..1000 {
            let mut s = StateVector::from_amplitudes(&amps, Precision::Double, &cfg()).unwrap();
            ones += s.reset(0, &mut RngState::new(seed)).unwrap() as u32;
            assert_abs_diff_eq!(s.amplitude(0).unwrap().norm(), 1.0, epsilon = 1e-12);
            assert_eq!(s.amplitude(1).unwrap(), Complex64::new(0.0, 0.0));
        }
        let freq = ones as f64 / 1000.0;
        assert!((freq - 0.7).abs() < 0.05, "frequency {freq}");
    }

    #[test]
    fn degenerate_probability_is_reported() {
        let amps = [Complex64::new(1e-9, 0.0), Complex64::new(1.0, 0.0)];
        let mut s = StateVector::from_amplitudes(&amps, Precision::Double, &cfg()).unwrap();
        let before = s.to_vec();
        // u = 0 selects the branch of weight 1e-18.
        assert!(matches!(
            s.measure_with_draw(0, 0.0, false),
            Err(KernelError::DegenerateProbability { qubit: 0, .. })
        ));
        assert_eq!(s.to_vec(), before);
        assert_eq!(s.measure_with_draw(0, 0.5, false).unwrap(), 1);
    }

    #[test]
    fn from_amplitudes_validates() {
        let c = Complex64::new(1.0, 0.0);
        assert!(matches!(
            StateVector::from_amplitudes(&[c, c, c], Precision::Double, &cfg()),
            Err(KernelError::InvalidLength { len: 3 })
        ));
        assert!(matches!(
            StateVector::from_amplitudes(&[c, c], Precision::Double, &cfg()),
            Err(KernelError::NotNormalized { .. })
        ));
    }

    #[test]
    fn single_precision_roundtrip() {
        let mut s = StateVector::new(3, Precision::Single, &cfg()).unwrap();
        for q in 0..3 {
            s.apply_1q(&h(), q).unwrap();
        }
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(s.amplitude(5).unwrap().re, (0.125f64).sqrt(), epsilon = 1e-7);
    }
}
