//! Source generators for the QFT, GHZ and Bernstein-Vazirani families.

use std::fmt::{self, Write};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{family} needs at least {min} qubit(s), got {n}")]
    TooSmall { family: &'static str, n: usize, min: usize },
    #[error("invalid bit string '{0}': expected one or more of '0'/'1'")]
    BadBitString(String),
    #[error("unknown circuit family '{0}': expected qft:N, ghz:N or bv:BITS")]
    BadFamily(String),
}

/// Hidden string for Bernstein-Vazirani. Character `k` is bit `k`, which is
/// read out on data qubit `k` and lands in element `k` of the result.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// Low `len` bits of `value`, bit 0 first.
    pub fn from_value(value: u64, len: usize) -> Self {
        BitString((0..len).map(|k| k < 64 && (value >> k) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl FromStr for BitString {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        if s.is_empty() || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(GenError::BadBitString(s.to_string()));
        }
        Ok(BitString(s.bytes().map(|b| b == b'1').collect()))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|&b| f.write_char(if b { '1' } else { '0' }))
    }
}

const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

/// Hadamard layer, QFT without the final swap network, measurement layer.
/// The QFT maps the uniform superposition to `|0...0>`, so every run reads
/// all zeros. `2n + n(n-1)/2` gates, `n` measurements.
pub fn generate_qft(n: usize) -> Result<String, GenError> {
    if n == 0 {
        return Err(GenError::TooSmall {
            family: "qft",
            n,
            min: 1,
        });
    }
    let mut s = format!("{HEADER}qreg q[{n}];\ncreg c[{n}];\n");
    for i in 0..n {
        writeln!(s, "h q[{i}];").unwrap();
    }
    for j in (0..n).rev() {
        writeln!(s, "h q[{j}];").unwrap();
        for k in (0..j).rev() {
            let d = j - k;
            let angle = if d < 63 {
                format!("pi/{}", 1u64 << d)
            } else {
                format!("pi/2^{d}")
            };
            writeln!(s, "cu1({angle}) q[{k}],q[{j}];").unwrap();
        }
    }
    for i in 0..n {
        writeln!(s, "measure q[{i}] -> c[{i}];").unwrap();
    }
    Ok(s)
}

/// Hadamard on qubit 0 and a CX chain; `n` gates, `n` measurements.
pub fn generate_ghz(n: usize) -> Result<String, GenError> {
    if n < 2 {
        return Err(GenError::TooSmall {
            family: "ghz",
            n,
            min: 2,
        });
    }
    let mut s = format!("{HEADER}qreg q[{n}];\ncreg c[{n}];\nh q[0];\n");
    for i in 1..n {
        writeln!(s, "cx q[{}],q[{i}];", i - 1).unwrap();
    }
    for i in 0..n {
        writeln!(s, "measure q[{i}] -> c[{i}];").unwrap();
    }
    Ok(s)
}

/// Data qubits `0..n`, ancilla `n` prepared in `|->`, oracle `CX q[k],anc`
/// for every set bit. `2n + 2 + weight(s)` gates, `n` measurements.
pub fn generate_bv(secret: &BitString) -> Result<String, GenError> {
    let n = secret.len();
    if n == 0 {
        return Err(GenError::TooSmall {
            family: "bv",
            n,
            min: 1,
        });
    }
    let mut s = format!("{HEADER}qreg q[{}];\ncreg c[{n}];\nx q[{n}];\n", n + 1);
    for i in 0..=n {
        writeln!(s, "h q[{i}];").unwrap();
    }
    for (k, _) in secret.bits().iter().enumerate().filter(|(_, &b)| b) {
        writeln!(s, "cx q[{k}],q[{n}];").unwrap();
    }
    for i in 0..n {
        writeln!(s, "h q[{i}];").unwrap();
    }
    for i in 0..n {
        writeln!(s, "measure q[{i}] -> c[{i}];").unwrap();
    }
    Ok(s)
}

/// A generator reference as written on the command line: `qft:N`, `ghz:N`
/// or `bv:BITS`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Qft(usize),
    Ghz(usize),
    Bv(BitString),
}

impl Family {
    pub fn generate(&self) -> Result<String, GenError> {
        match self {
            Family::Qft(n) => generate_qft(*n),
            Family::Ghz(n) => generate_ghz(*n),
            Family::Bv(s) => generate_bv(s),
        }
    }
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(spec: &str) -> Result<Self, GenError> {
        let bad = || GenError::BadFamily(spec.to_string());
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        let size = || arg.parse::<usize>().map_err(|_| bad());
        let family = match kind {
            "qft" => Family::Qft(size()?),
            "ghz" => Family::Ghz(size()?),
            "bv" => Family::Bv(arg.parse()?),
            _ => return Err(bad()),
        };
        // Reject sizes the generator would refuse up front.
        family.generate()?;
        Ok(family)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Qft(n) => write!(f, "qft:{n}"),
            Family::Ghz(n) => write!(f, "ghz:{n}"),
            Family::Bv(s) => write!(f, "bv:{s}"),
        }
    }
}
