//! One- and two-qubit gate matrices and their sparsity classification.
//!
//! Matrices are row-major. A two-qubit matrix acts on the local basis
//! `b1 * 2 + b0`, where `b0` is the bit of the first operand.

use num_complex::Complex64;

use super::KernelError;

pub type Matrix2 = [[Complex64; 2]; 2];
pub type Matrix4 = [[Complex64; 4]; 4];

/// Entries with modulus below this are structural zeros.
pub const ZERO_TOL: f64 = 1e-12;
/// Tolerance for `m * m^dagger == I`.
pub const UNITARY_TOL: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate1Kind {
    Dense,
    Diagonal,
    AntiDiagonal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate1 {
    matrix: Matrix2,
    kind: Gate1Kind,
}

impl Gate1 {
    /// Validates unitarity and tags the sparsest applicable kind. Structural
    /// zeros of a sparse kind are stored as exact zeros.
    pub fn new(matrix: Matrix2) -> Result<Self, KernelError> {
        check_unitary(&flatten2(&matrix), 2)?;
        let mut matrix = matrix;
        let kind = if is_zero(matrix[0][1]) && is_zero(matrix[1][0]) {
            matrix[0][1] = ZERO;
            matrix[1][0] = ZERO;
            Gate1Kind::Diagonal
        } else if is_zero(matrix[0][0]) && is_zero(matrix[1][1]) {
            matrix[0][0] = ZERO;
            matrix[1][1] = ZERO;
            Gate1Kind::AntiDiagonal
        } else {
            Gate1Kind::Dense
        };
        Ok(Gate1 { matrix, kind })
    }

    /// `U(theta, phi, lambda)`:
    /// `[[cos(t/2), -e^{i l} sin(t/2)], [e^{i p} sin(t/2), e^{i(p+l)} cos(t/2)]]`.
    pub fn u(theta: f64, phi: f64, lambda: f64) -> Self {
        Self::new(u_matrix(theta, phi, lambda)).expect("U is unitary")
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.matrix
    }

    pub fn kind(&self) -> Gate1Kind {
        self.kind
    }

    /// Same matrix, but always routed through the general 2x2 update.
    pub fn force_dense(self) -> Self {
        Gate1 {
            kind: Gate1Kind::Dense,
            ..self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate2Kind {
    Dense,
    Diagonal,
    ControlledPhase { phase: f64 },
    Permutation,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate2 {
    matrix: Matrix4,
    kind: Gate2Kind,
}

impl Gate2 {
    pub fn new(matrix: Matrix4) -> Result<Self, KernelError> {
        classify_gate2(matrix)
    }

    /// Controlled-NOT with the first operand as control.
    pub fn cx() -> Self {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][3] = ONE;
        m[2][2] = ONE;
        m[3][1] = ONE;
        Gate2 {
            matrix: m,
            kind: Gate2Kind::Permutation,
        }
    }

    /// `diag(1, 1, 1, e^{i phase})`.
    pub fn controlled_phase(phase: f64) -> Self {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][1] = ONE;
        m[2][2] = ONE;
        m[3][3] = Complex64::from_polar(1.0, phase);
        Gate2 {
            matrix: m,
            kind: Gate2Kind::ControlledPhase { phase },
        }
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn kind(&self) -> Gate2Kind {
        self.kind
    }

    pub fn force_dense(self) -> Self {
        Gate2 {
            kind: Gate2Kind::Dense,
            ..self
        }
    }

    /// For a permutation gate: `(source, factor)` per output row, so that
    /// `new[r] = factor_r * old[source_r]`.
    pub(crate) fn permutation(&self) -> [(usize, Complex64); 4] {
        let mut out = [(0, ZERO); 4];
        for (r, row) in self.matrix.iter().enumerate() {
            let c = (0..4).find(|&c| !is_zero(row[c])).unwrap_or(r);
            out[r] = (c, row[c]);
        }
        out
    }
}

/// Tags a 4x4 unitary with the most specific structure it satisfies, in the
/// order controlled-phase, diagonal, permutation, dense. The matrix itself is
/// kept as given.
pub fn classify_gate2(matrix: Matrix4) -> Result<Gate2, KernelError> {
    check_unitary(&flatten4(&matrix), 4)?;
    let off_diag_zero = (0..4).all(|r| (0..4).all(|c| r == c || is_zero(matrix[r][c])));
    let kind = if off_diag_zero {
        let unit = |z: Complex64| (z - ONE).norm() < ZERO_TOL;
        if unit(matrix[0][0]) && unit(matrix[1][1]) && unit(matrix[2][2]) {
            Gate2Kind::ControlledPhase {
                phase: matrix[3][3].arg(),
            }
        } else {
            Gate2Kind::Diagonal
        }
    } else if is_permutation(&matrix) {
        Gate2Kind::Permutation
    } else {
        Gate2Kind::Dense
    };
    Ok(Gate2 { matrix, kind })
}

fn is_permutation(m: &Matrix4) -> bool {
    let line_ok = |entries: [Complex64; 4]| {
        let nonzero: Vec<_> = entries.iter().filter(|z| !is_zero(**z)).collect();
        nonzero.len() == 1 && (nonzero[0].norm() - 1.0).abs() < ZERO_TOL
    };
    (0..4).all(|r| line_ok(m[r])) && (0..4).all(|c| line_ok([m[0][c], m[1][c], m[2][c], m[3][c]]))
}

pub fn u_matrix(theta: f64, phi: f64, lambda: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), -Complex64::from_polar(1.0, lambda) * s],
        [
            Complex64::from_polar(1.0, phi) * s,
            Complex64::from_polar(1.0, phi + lambda) * c,
        ],
    ]
}

#[inline]
fn is_zero(z: Complex64) -> bool {
    z.norm() < ZERO_TOL
}

fn flatten2(m: &Matrix2) -> Vec<Complex64> {
    m.iter().flatten().copied().collect()
}

fn flatten4(m: &Matrix4) -> Vec<Complex64> {
    m.iter().flatten().copied().collect()
}

fn check_unitary(m: &[Complex64], dim: usize) -> Result<(), KernelError> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(KernelError::NotUnitary {
            deviation: f64::INFINITY,
        });
    }
    let mut deviation: f64 = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            let dot: Complex64 = (0..dim).map(|k| m[r * dim + k] * m[c * dim + k].conj()).sum();
            let expected = if r == c { ONE } else { ZERO };
            deviation = deviation.max((dot - expected).norm());
        }
    }
    if deviation > UNITARY_TOL {
        Err(KernelError::NotUnitary { deviation })
    } else {
        Ok(())
    }
}
