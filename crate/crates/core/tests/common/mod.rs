//! Test-only reference implementation: textbook gate matrices and a dense
//! matrix-vector simulator that builds every operator as a Kronecker
//! product followed by a qubit relabelling. It shares no code with the
//! kernel or the compiler.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::path::Path;

use num_complex::Complex64 as C;
use rand::Rng;

pub type Matrix = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn cis(phi: f64) -> C {
    C::from_polar(1.0, phi)
}

pub fn scale(m: &Matrix, z: C) -> Matrix {
    m.iter().map(|r| r.iter().map(|x| x * z).collect()).collect()
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|r| {
            (0..dim)
                .map(|k| if r == k { c(1.0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (na, nb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); na * nb]; na * nb];
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn m2(a: C, b: C, d: C, e: C) -> Matrix {
    vec![vec![a, b], vec![d, e]]
}

fn diag(d: &[C]) -> Matrix {
    let mut m = identity(d.len());
    for (i, z) in d.iter().enumerate() {
        m[i][i] = *z;
    }
    m
}

/// `U(theta, phi, lambda)` as defined by OpenQASM 2.0.
pub fn u(theta: f64, phi: f64, lambda: f64) -> Matrix {
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    m2(c(co, 0.0), -cis(lambda) * s, cis(phi) * s, cis(phi + lambda) * co)
}

/// Two-qubit gate controlled by its first operand (local bit 0) acting with
/// `g` on its second (local bit 1).
pub fn controlled(g: &Matrix) -> Matrix {
    let mut m = identity(4);
    m[1][1] = g[0][0];
    m[1][3] = g[0][1];
    m[3][1] = g[1][0];
    m[3][3] = g[1][1];
    m
}

fn pauli_x() -> Matrix {
    m2(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

fn hadamard() -> Matrix {
    let h = FRAC_1_SQRT_2;
    m2(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0))
}

fn sqrt_x() -> Matrix {
    m2(c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5))
}

fn rot_x(t: f64) -> Matrix {
    let (s, co) = ((t / 2.0).sin(), (t / 2.0).cos());
    m2(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
}

fn rot_y(t: f64) -> Matrix {
    let (s, co) = ((t / 2.0).sin(), (t / 2.0).cos());
    m2(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

fn rot_z_symmetric(t: f64) -> Matrix {
    diag(&[cis(-t / 2.0), cis(t / 2.0)])
}

/// Number of parameters and qubits of each standard-library gate.
pub const STANDARD_GATES: &[(&str, usize, usize)] = &[
    ("u3", 3, 1),
    ("u2", 2, 1),
    ("u1", 1, 1),
    ("cx", 0, 2),
    ("id", 0, 1),
    ("u0", 1, 1),
    ("u", 3, 1),
    ("p", 1, 1),
    ("x", 0, 1),
    ("y", 0, 1),
    ("z", 0, 1),
    ("h", 0, 1),
    ("s", 0, 1),
    ("sdg", 0, 1),
    ("t", 0, 1),
    ("tdg", 0, 1),
    ("rx", 1, 1),
    ("ry", 1, 1),
    ("rz", 1, 1),
    ("sx", 0, 1),
    ("sxdg", 0, 1),
    ("cz", 0, 2),
    ("cy", 0, 2),
    ("swap", 0, 2),
    ("ch", 0, 2),
    ("ccx", 0, 3),
    ("cswap", 0, 3),
    ("crx", 1, 2),
    ("cry", 1, 2),
    ("crz", 1, 2),
    ("cu1", 1, 2),
    ("cp", 1, 2),
    ("cu3", 3, 2),
    ("csx", 0, 2),
    ("cu", 4, 2),
    ("rxx", 1, 2),
    ("rzz", 1, 2),
    ("rccx", 0, 3),
];

/// Textbook matrix of a standard gate, in the local basis where the first
/// qubit argument is bit 0. Global phases follow the library's own
/// definitions (noted where they differ from the usual textbook form).
pub fn textbook(name: &str, p: &[f64]) -> Matrix {
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let i = c(0.0, 1.0);
    match name {
        "u3" | "u" => u(p[0], p[1], p[2]),
        "u2" => u(PI / 2.0, p[0], p[1]),
        "u1" | "p" | "rz" => diag(&[one, cis(p[0])]),
        "id" | "u0" => identity(2),
        "x" => pauli_x(),
        "y" => m2(zero, -i, i, zero),
        "z" => diag(&[one, -one]),
        "h" => hadamard(),
        "s" => diag(&[one, i]),
        "sdg" => diag(&[one, -i]),
        "t" => diag(&[one, cis(FRAC_PI_4)]),
        "tdg" => diag(&[one, cis(-FRAC_PI_4)]),
        "rx" => rot_x(p[0]),
        "ry" => rot_y(p[0]),
        // sdg.h.sdg = e^{-i pi/4} sqrt(X)
        "sx" => scale(&sqrt_x(), cis(-FRAC_PI_4)),
        "sxdg" => {
            let m = sqrt_x();
            let dag = m2(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj());
            scale(&dag, cis(FRAC_PI_4))
        }
        "cx" => controlled(&pauli_x()),
        "cz" => diag(&[one, one, one, -one]),
        "cy" => controlled(&m2(zero, -i, i, zero)),
        "swap" => {
            let mut m = vec![vec![zero; 4]; 4];
            m[0][0] = one;
            m[1][2] = one;
            m[2][1] = one;
            m[3][3] = one;
            m
        }
        // the library's decomposition carries e^{i pi/4}
        "ch" => scale(&controlled(&hadamard()), cis(FRAC_PI_4)),
        "crx" => controlled(&rot_x(p[0])),
        "cry" => controlled(&rot_y(p[0])),
        "crz" => controlled(&rot_z_symmetric(p[0])),
        "cu1" | "cp" => diag(&[one, one, one, cis(p[0])]),
        "cu3" => controlled(&u(p[0], p[1], p[2])),
        "csx" => controlled(&sqrt_x()),
        "cu" => controlled(&scale(&u(p[0], p[1], p[2]), cis(p[3]))),
        // exp(-i t/2 XX) times e^{-i t/2}
        "rxx" => {
            let (s, co) = ((p[0] / 2.0).sin(), (p[0] / 2.0).cos());
            let mut m = vec![vec![zero; 4]; 4];
            for k in 0..4 {
                m[k][k] = c(co, 0.0);
                m[k][3 - k] = c(0.0, -s);
            }
            scale(&m, cis(-p[0] / 2.0))
        }
        // e^{i t/2} exp(-i t/2 ZZ)
        "rzz" => diag(&[one, cis(p[0]), cis(p[0]), one]),
        "ccx" | "cswap" | "rccx" => {
            let mut m = identity(8);
            match name {
                "ccx" => {
                    m[3][3] = zero;
                    m[7][7] = zero;
                    m[3][7] = one;
                    m[7][3] = one;
                }
                "cswap" => {
                    m[3][3] = zero;
                    m[5][5] = zero;
                    m[3][5] = one;
                    m[5][3] = one;
                }
                _ => {
                    m[3][3] = zero;
                    m[7][7] = zero;
                    m[3][7] = -i;
                    m[7][3] = i;
                    m[5][5] = -one;
                }
            }
            m
        }
        other => panic!("no textbook matrix for {other}"),
    }
}

/// Dense reference simulator.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub n: usize,
    pub amps: Vec<C>,
}

impl Oracle {
    pub fn new(n: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(1.0, 0.0);
        Oracle { n, amps }
    }

    pub fn from_amps(amps: Vec<C>) -> Self {
        Oracle {
            n: amps.len().trailing_zeros() as usize,
            amps,
        }
    }

    /// Full `2^n x 2^n` operator for `g` on `qubits` (`qubits[i]` is local
    /// bit `i` of `g`): `I (x) g` with `g` on the lowest bits, conjugated by
    /// the basis relabelling that moves `qubits` into those positions.
    pub fn operator(&self, g: &Matrix, qubits: &[usize]) -> Matrix {
        let k = qubits.len();
        let lifted = kron(&identity(1 << (self.n - k)), g);
        let mut order: Vec<usize> = qubits.to_vec();
        order.extend((0..self.n).filter(|q| !qubits.contains(q)));
        // relabel(x): bit j of the result is bit order[j] of x
        let relabel = |x: usize| -> usize { order.iter().enumerate().map(|(j, &q)| ((x >> q) & 1) << j).sum() };
        let dim = 1 << self.n;
        let map: Vec<usize> = (0..dim).map(relabel).collect();
        (0..dim)
            .map(|r| (0..dim).map(|col| lifted[map[r]][map[col]]).collect())
            .collect()
    }

    pub fn apply(&mut self, g: &Matrix, qubits: &[usize]) {
        let op = self.operator(g, qubits);
        self.amps = op
            .iter()
            .map(|row| row.iter().zip(&self.amps).map(|(a, b)| a * b).sum())
            .collect();
    }

    pub fn apply_named(&mut self, name: &str, params: &[f64], qubits: &[usize]) {
        self.apply(&textbook(name, params), qubits);
    }

    pub fn probability_zero(&self, q: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> q) & 1 == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// One standard-gate application in a random program.
#[derive(Clone, Debug)]
pub struct Op {
    pub name: &'static str,
    pub params: Vec<f64>,
    pub qubits: Vec<usize>,
}

impl Op {
    pub fn to_qasm(&self) -> String {
        let params = if self.params.is_empty() {
            String::new()
        } else {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{p:?}")).collect();
            format!("({})", ps.join(","))
        };
        let qs: Vec<String> = self.qubits.iter().map(|q| format!("q[{q}]")).collect();
        format!("{}{} {};", self.name, params, qs.join(","))
    }
}

/// `len` random standard-gate applications on `n` qubits.
pub fn random_ops(rng: &mut impl Rng, n: usize, len: usize) -> Vec<Op> {
    let usable: Vec<_> = STANDARD_GATES.iter().filter(|(_, _, k)| *k <= n).collect();
    (0..len)
        .map(|_| {
            let (name, np, nq) = *usable[rng.random_range(0..usable.len())];
            let params = (0..np).map(|_| rng.random_range(-2.0 * PI..2.0 * PI)).collect();
            let mut qubits = Vec::with_capacity(nq);
            while qubits.len() < nq {
                let q = rng.random_range(0..n);
                if !qubits.contains(&q) {
                    qubits.push(q);
                }
            }
            Op { name, params, qubits }
        })
        .collect()
}

pub fn program_source(n: usize, ops: &[Op], cregs: &str) -> String {
    let mut s = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{n}];\n{cregs}");
    for op in ops {
        s.push_str(&op.to_qasm());
        s.push('\n');
    }
    s
}

pub fn oracle_run(n: usize, ops: &[Op]) -> Oracle {
    let mut o = Oracle::new(n);
    for op in ops {
        o.apply_named(op.name, &op.params, &op.qubits);
    }
    o
}

/// Compiles `source` and runs it on a fresh double-precision state.
pub fn emulate(source: &str, config: &svemu::ExecConfig, seed: u64) -> (svemu::StateVector, svemu::ClassicalStore) {
    let program = svemu::compile(&svemu::qasm::load_source(source, Path::new(".")).unwrap()).unwrap();
    let mut state = svemu::StateVector::new(program.n_qubits(), svemu::Precision::Double, config).unwrap();
    let store = svemu::execute(&program, &mut state, &mut svemu::RngState::new(seed)).unwrap();
    (state, store)
}
