use std::collections::HashMap;

use num_complex::Complex64;

use super::{CompileError, CompiledProgram, CregLayout, KernelInstruction, QubitMap};
use crate::kernel::{classify_gate2, u_matrix, Gate1, Gate2, Gate2Kind, Matrix2, Matrix4, ZERO_TOL};
use crate::qasm::ast::{GateDef, Item, Operand, Pos, Program, Statement};
use crate::qasm::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    /// Lower each call of a one- or two-qubit gate to a single native gate
    /// by multiplying out its body. When off, every call is inlined down to
    /// `U` and `CX`. Gates on three or more qubits are always inlined.
    pub fuse_small_gates: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { fuse_small_gates: true }
    }
}

pub fn compile(program: &Program) -> Result<CompiledProgram, CompileError> {
    compile_with(program, &CompileOptions::default())
}

pub fn compile_with(program: &Program, options: &CompileOptions) -> Result<CompiledProgram, CompileError> {
    let mut c = Compiler {
        options: *options,
        gates: HashMap::new(),
        qubits: QubitMap::default(),
        cregs: CregLayout::default(),
    };
    let mut out = Vec::new();
    for item in &program.items {
        match item {
            Item::Qreg(r) => {
                c.qubits.push(&r.name, r.size);
            }
            Item::Creg(r) => {
                c.cregs.push(&r.name, r.size);
            }
            Item::Gate(g) => {
                let order = c.gates.len();
                c.gates.insert(g.name.clone(), (order, Some(g)));
            }
            Item::Opaque(o) => {
                let order = c.gates.len();
                c.gates.insert(o.name.clone(), (order, None));
            }
            Item::Include(inc) => {
                return Err(CompileError::Unsupported {
                    message: format!("unresolved include '{}'", inc.path),
                    line: inc.pos.line,
                    col: inc.pos.col,
                })
            }
            Item::Statement(s) => c.statement(s, &mut out)?,
        }
    }
    Ok(CompiledProgram::new(out, c.qubits, c.cregs))
}

type Matrix = Vec<Vec<Complex64>>;

struct Compiler<'a> {
    options: CompileOptions,
    /// Definition order and body (`None` for opaque declarations).
    gates: HashMap<String, (usize, Option<&'a GateDef>)>,
    qubits: QubitMap,
    cregs: CregLayout,
}

fn err_at<T>(pos: Pos, f: impl FnOnce(usize, usize) -> CompileError) -> Result<T, CompileError> {
    Err(f(pos.line, pos.col))
}

fn eval_all(exprs: &[Expr], bindings: &HashMap<String, f64>, pos: Pos) -> Result<Vec<f64>, CompileError> {
    exprs
        .iter()
        .map(|e| {
            e.eval(bindings).map_err(|e| CompileError::Expression {
                message: e.to_string(),
                line: pos.line,
                col: pos.col,
            })
        })
        .collect()
}

fn check_distinct(qubits: &[usize], pos: Pos) -> Result<(), CompileError> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return err_at(pos, |line, col| CompileError::DuplicateQubit { qubit: *q, line, col });
        }
    }
    Ok(())
}

impl<'a> Compiler<'a> {
    /// Global indices an operand denotes: one for `r[i]`, all of `r` for `r`.
    fn resolve(&self, op: &Operand, quantum: bool) -> Result<Vec<usize>, CompileError> {
        let (layout, other, kind) = if quantum {
            (&self.qubits, &self.cregs, "quantum")
        } else {
            (&self.cregs, &self.qubits, "classical")
        };
        let Some(id) = layout.find(&op.name) else {
            if other.find(&op.name).is_some() {
                return err_at(op.pos, |line, col| CompileError::RegisterKindMismatch {
                    name: op.name.clone(),
                    expected: kind,
                    line,
                    col,
                });
            }
            return err_at(op.pos, |line, col| CompileError::UnknownRegister {
                name: op.name.clone(),
                line,
                col,
            });
        };
        let reg = layout.get(id);
        match op.index {
            Some(i) if i >= reg.size => err_at(op.pos, |line, col| CompileError::IndexOutOfRange {
                name: op.name.clone(),
                index: i,
                size: reg.size,
                line,
                col,
            }),
            Some(i) => Ok(vec![reg.offset + i]),
            None => Ok((reg.offset..reg.offset + reg.size).collect()),
        }
    }

    /// Expands mixed register/element operands into one qubit tuple per
    /// application.
    fn broadcast(&self, ops: &[&Operand], pos: Pos) -> Result<Vec<Vec<usize>>, CompileError> {
        let resolved = ops
            .iter()
            .map(|o| self.resolve(o, true))
            .collect::<Result<Vec<_>, _>>()?;
        let mut len = None;
        for (op, r) in ops.iter().zip(&resolved) {
            if op.index.is_none() {
                match len {
                    None => len = Some(r.len()),
                    Some(l) if l != r.len() => {
                        return err_at(pos, |line, col| CompileError::BroadcastLengthMismatch { line, col })
                    }
                    _ => {}
                }
            }
        }
        let tuples: Vec<Vec<usize>> = (0..len.unwrap_or(1))
            .map(|i| {
                resolved
                    .iter()
                    .map(|r| if r.len() == 1 { r[0] } else { r[i] })
                    .collect()
            })
            .collect();
        for t in &tuples {
            check_distinct(t, pos)?;
        }
        Ok(tuples)
    }

    fn statement(&self, s: &Statement, out: &mut Vec<KernelInstruction>) -> Result<(), CompileError> {
        let none = HashMap::new();
        match s {
            Statement::GateCall {
                name,
                params,
                operands,
                pos,
            } => {
                let def = self.lookup(name, usize::MAX, params.len(), operands.len(), *pos)?;
                let values = eval_all(params, &none, *pos)?;
                for qubits in self.broadcast(&operands.iter().collect::<Vec<_>>(), *pos)? {
                    self.call(def, &values, &qubits, *pos, out)?;
                }
            }
            Statement::U {
                theta,
                phi,
                lambda,
                operand,
                pos,
            } => {
                let v = eval_all(&[theta.clone(), phi.clone(), lambda.clone()], &none, *pos)?;
                let gate = Gate1::u(v[0], v[1], v[2]);
                for t in self.broadcast(&[operand], *pos)? {
                    out.push(KernelInstruction::Apply1 { gate, target: t[0] });
                }
            }
            Statement::CX { control, target, pos } => {
                for t in self.broadcast(&[control, target], *pos)? {
                    out.push(KernelInstruction::Apply2 {
                        gate: Gate2::cx(),
                        q0: t[0],
                        q1: t[1],
                    });
                }
            }
            Statement::Measure { qubit, bit, pos } => {
                let qs = self.resolve(qubit, true)?;
                let bs = self.resolve(bit, false)?;
                if qs.len() != bs.len() || qubit.index.is_some() != bit.index.is_some() {
                    return err_at(*pos, |line, col| CompileError::BroadcastLengthMismatch { line, col });
                }
                let creg = self.cregs.find(&bit.name).expect("resolved above");
                let base = self.cregs.get(creg).offset;
                for (q, b) in qs.into_iter().zip(bs) {
                    out.push(KernelInstruction::Measure {
                        qubit: q,
                        creg,
                        bit: b - base,
                    });
                }
            }
            Statement::Reset { qubit, pos } => {
                for t in self.broadcast(&[qubit], *pos)? {
                    out.push(KernelInstruction::Reset { qubit: t[0] });
                }
            }
            Statement::Barrier { operands, .. } => {
                for op in operands {
                    self.resolve(op, true)?;
                }
            }
            Statement::If { creg, value, body, pos } => {
                let Some(id) = self.cregs.find(creg) else {
                    let op = Operand {
                        name: creg.clone(),
                        index: None,
                        pos: *pos,
                    };
                    return self.resolve(&op, false).map(|_| ());
                };
                let size = self.cregs.get(id).size;
                if size < 64 && *value >> size != 0 {
                    return err_at(*pos, |line, col| CompileError::RegisterOverflow {
                        creg: creg.clone(),
                        value: *value,
                        size,
                        line,
                        col,
                    });
                }
                if matches!(**body, Statement::If { .. }) {
                    return err_at(*pos, |line, col| CompileError::Unsupported {
                        message: "nested conditional".into(),
                        line,
                        col,
                    });
                }
                let mut inner = Vec::new();
                self.statement(body, &mut inner)?;
                out.push(KernelInstruction::Conditional {
                    creg: id,
                    value: *value,
                    body: inner,
                });
            }
        }
        Ok(())
    }

    /// Finds a callable gate defined before position `before` in definition
    /// order and checks the call's arity against it.
    fn lookup(
        &self,
        name: &str,
        before: usize,
        n_params: usize,
        n_qubits: usize,
        pos: Pos,
    ) -> Result<&'a GateDef, CompileError> {
        let unknown = |line, col| CompileError::UnknownGate {
            name: name.to_string(),
            line,
            col,
        };
        let Some(&(order, def)) = self.gates.get(name) else {
            return err_at(pos, unknown);
        };
        if order >= before {
            return err_at(pos, unknown);
        }
        let Some(def) = def else {
            return err_at(pos, |line, col| CompileError::OpaqueCallUnsupported {
                name: name.to_string(),
                line,
                col,
            });
        };
        let arity = |what, expected, found| {
            err_at(pos, |line, col| CompileError::ArityMismatch {
                name: name.to_string(),
                what,
                expected,
                found,
                line,
                col,
            })
        };
        if def.params.len() != n_params {
            return arity("parameter(s)", def.params.len(), n_params);
        }
        if def.qargs.len() != n_qubits {
            return arity("qubit argument(s)", def.qargs.len(), n_qubits);
        }
        Ok(def)
    }

    fn order_of(&self, def: &GateDef) -> usize {
        self.gates[&def.name].0
    }

    fn call(
        &self,
        def: &'a GateDef,
        params: &[f64],
        qubits: &[usize],
        pos: Pos,
        out: &mut Vec<KernelInstruction>,
    ) -> Result<(), CompileError> {
        if self.options.fuse_small_gates && qubits.len() <= 2 {
            let m = self.fuse(def, params)?;
            let invalid = |source| CompileError::InvalidGate {
                name: def.name.clone(),
                source,
                line: pos.line,
                col: pos.col,
            };
            out.push(if qubits.len() == 1 {
                let m: Matrix2 = [[m[0][0], m[0][1]], [m[1][0], m[1][1]]];
                KernelInstruction::Apply1 {
                    gate: Gate1::new(m).map_err(invalid)?,
                    target: qubits[0],
                }
            } else {
                KernelInstruction::Apply2 {
                    gate: lower2(&m).map_err(invalid)?,
                    q0: qubits[0],
                    q1: qubits[1],
                }
            });
            return Ok(());
        }
        let bindings: HashMap<String, f64> = def.params.iter().cloned().zip(params.iter().copied()).collect();
        let local: HashMap<&str, usize> = def
            .qargs
            .iter()
            .map(String::as_str)
            .zip(qubits.iter().copied())
            .collect();
        let q = |op: &Operand| local[op.name.as_str()];
        let order = self.order_of(def);
        for stmt in &def.body {
            match stmt {
                Statement::GateCall {
                    name,
                    params,
                    operands,
                    pos,
                } => {
                    let callee = self.lookup(name, order, params.len(), operands.len(), *pos)?;
                    let values = eval_all(params, &bindings, *pos)?;
                    let targets: Vec<usize> = operands.iter().map(q).collect();
                    check_distinct(&targets, *pos)?;
                    self.call(callee, &values, &targets, *pos, out)?;
                }
                Statement::U {
                    theta,
                    phi,
                    lambda,
                    operand,
                    pos,
                } => {
                    let v = eval_all(&[theta.clone(), phi.clone(), lambda.clone()], &bindings, *pos)?;
                    out.push(KernelInstruction::Apply1 {
                        gate: Gate1::u(v[0], v[1], v[2]),
                        target: q(operand),
                    });
                }
                Statement::CX { control, target, pos } => {
                    let t = [q(control), q(target)];
                    check_distinct(&t, *pos)?;
                    out.push(KernelInstruction::Apply2 {
                        gate: Gate2::cx(),
                        q0: t[0],
                        q1: t[1],
                    });
                }
                Statement::Barrier { .. } => {}
                other => {
                    return err_at(other.pos(), |line, col| CompileError::Unsupported {
                        message: "only gate applications may appear in a gate body".into(),
                        line,
                        col,
                    })
                }
            }
        }
        Ok(())
    }

    /// Unitary of `def` on its own qubits (first qubit argument = low bit).
    fn fuse(&self, def: &GateDef, params: &[f64]) -> Result<Matrix, CompileError> {
        let k = def.qargs.len();
        let bindings: HashMap<String, f64> = def.params.iter().cloned().zip(params.iter().copied()).collect();
        let local: HashMap<&str, usize> = def.qargs.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let q = |op: &Operand| local[op.name.as_str()];
        let order = self.order_of(def);
        let mut acc = identity(1 << k);
        for stmt in &def.body {
            let (op, on): (Matrix, Vec<usize>) = match stmt {
                Statement::GateCall {
                    name,
                    params,
                    operands,
                    pos,
                } => {
                    let callee = self.lookup(name, order, params.len(), operands.len(), *pos)?;
                    let values = eval_all(params, &bindings, *pos)?;
                    let on: Vec<usize> = operands.iter().map(q).collect();
                    check_distinct(&on, *pos)?;
                    (self.fuse(callee, &values)?, on)
                }
                Statement::U {
                    theta,
                    phi,
                    lambda,
                    operand,
                    pos,
                } => {
                    let v = eval_all(&[theta.clone(), phi.clone(), lambda.clone()], &bindings, *pos)?;
                    let m = u_matrix(v[0], v[1], v[2]);
                    (m.iter().map(|r| r.to_vec()).collect(), vec![q(operand)])
                }
                Statement::CX { control, target, pos } => {
                    let on = vec![q(control), q(target)];
                    check_distinct(&on, *pos)?;
                    (Gate2::cx().matrix().iter().map(|r| r.to_vec()).collect(), on)
                }
                Statement::Barrier { .. } => continue,
                other => {
                    return err_at(other.pos(), |line, col| CompileError::Unsupported {
                        message: "only gate applications may appear in a gate body".into(),
                        line,
                        col,
                    })
                }
            };
            acc = matmul(&embed(&op, &on, k), &acc);
        }
        Ok(acc)
    }
}

fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| {
                    if r == c {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|r| (0..n).map(|c| (0..n).map(|j| a[r][j] * b[j][c]).sum()).collect())
        .collect()
}

/// Lifts `op`, acting on local qubits `on` (bit `i` of its index is qubit
/// `on[i]`), to the full `2^k`-dimensional space.
fn embed(op: &Matrix, on: &[usize], k: usize) -> Matrix {
    let dim = 1usize << k;
    let mask: usize = on.iter().map(|&q| 1 << q).sum();
    let sub = |x: usize| on.iter().enumerate().map(|(i, &q)| ((x >> q) & 1) << i).sum::<usize>();
    (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| {
                    if r & !mask == c & !mask {
                        op[sub(r)][sub(c)]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// Classifies a fused two-qubit matrix. Round-off below the structural-zero
/// threshold is snapped away first, and a recognised controlled phase is
/// rebuilt exactly from its phase.
fn lower2(m: &Matrix) -> Result<Gate2, crate::kernel::KernelError> {
    let mut a: Matrix4 = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            a[r][c] = if m[r][c].norm() < ZERO_TOL {
                Complex64::new(0.0, 0.0)
            } else {
                m[r][c]
            };
        }
    }
    let g = classify_gate2(a)?;
    Ok(match g.kind() {
        Gate2Kind::ControlledPhase { phase } => Gate2::controlled_phase(phase),
        _ => g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Gate1Kind, Gate2Kind};
    use crate::qasm::load_source;
    use crate::vm::ProgramStats;
    use std::path::Path;

    fn build(body: &str) -> Result<CompiledProgram, CompileError> {
        let src = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n{body}");
        compile(&load_source(&src, Path::new(".")).unwrap())
    }

    fn build_unchecked(body: &str) -> Result<CompiledProgram, CompileError> {
        let src = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n{body}");
        let p = crate::qasm::resolve_includes(crate::qasm::parse_source(&src).unwrap(), Path::new(".")).unwrap();
        compile(&p)
    }

    #[test]
    fn standard_gates_get_sparse_kinds() {
        let p = build("qreg q[2]; h q[0]; x q[0]; rz(0.3) q[1]; cx q[0],q[1]; cu1(0.5) q[0],q[1]; cz q[1],q[0]; swap q[0],q[1]; ch q[0],q[1];")
            .unwrap();
        let kinds: Vec<String> = p
            .disassemble()
            .lines()
            .map(|l| l.split(' ').nth(1).unwrap().to_string())
            .collect();
        assert_eq!(
            kinds,
            [
                "dense",
                "antidiag",
                "diag",
                "perm",
                "cphase(0.500000000)",
                "cphase(3.141592654)",
                "perm",
                "dense"
            ]
        );
        match &p.instructions[4] {
            KernelInstruction::Apply2 { gate, q0, q1 } => {
                assert_eq!(gate.kind(), Gate2Kind::ControlledPhase { phase: 0.5 });
                assert_eq!((*q0, *q1), (0, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unfused_lowers_to_u_and_cx() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2]; h q[0]; cu1(0.5) q[0],q[1];";
        let p = compile_with(
            &load_source(src, Path::new(".")).unwrap(),
            &CompileOptions {
                fuse_small_gates: false,
            },
        )
        .unwrap();
        // h -> u2 -> U; cu1 -> u1, cx, u1, cx, u1
        assert_eq!(p.stats.gate_count, 6);
        assert!(p.instructions.iter().all(|i| match i {
            KernelInstruction::Apply2 { gate, .. } => gate.kind() == Gate2Kind::Permutation,
            KernelInstruction::Apply1 { .. } => true,
            _ => false,
        }));
    }

    #[test]
    fn three_qubit_gates_are_inlined() {
        let p = build("qreg q[3]; ccx q[0],q[1],q[2];").unwrap();
        assert_eq!(p.stats.gate_count, 15);
        let p = build("qreg q[3]; cswap q[0],q[1],q[2];").unwrap();
        assert_eq!(p.stats.gate_count, 17);
    }

    #[test]
    fn broadcasting() {
        let p = build("qreg a[3]; qreg b[3]; creg c[3]; h a; cx a[0],b; cx a,b; measure b -> c; reset a;").unwrap();
        assert_eq!(
            p.stats,
            ProgramStats {
                gate_count: 9,
                measure_count: 3,
                reset_count: 3
            }
        );
        assert_eq!(
            p.instructions[6],
            KernelInstruction::Apply2 {
                gate: Gate2::cx(),
                q0: 0,
                q1: 3
            }
        );
        assert_eq!(
            p.instructions[10],
            KernelInstruction::Measure {
                qubit: 4,
                creg: 0,
                bit: 1
            }
        );
    }

    #[test]
    fn conditional_wraps_one_statement() {
        let p = build("qreg q[2]; creg c[2]; if (c==1) x q;").unwrap();
        let KernelInstruction::Conditional { creg, value, body } = &p.instructions[0] else {
            panic!()
        };
        assert_eq!((*creg, *value, body.len()), (0, 1, 2));
        assert_eq!(p.stats.gate_count, 2);
        match &body[0] {
            KernelInstruction::Apply1 { gate, target } => {
                assert_eq!(gate.kind(), Gate1Kind::AntiDiagonal);
                assert_eq!(*target, 0);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(p.disassemble(), "if c==1 { apply1 antidiag 0; apply1 antidiag 1 }\n");
    }

    #[test]
    fn compile_errors_carry_positions() {
        type Case = (&'static str, fn(&CompileError) -> bool);
        let cases: [Case; 8] = [
            ("qreg q[2];\nfoo q[0];", |e| {
                matches!(e, CompileError::UnknownGate { line: 4, col: 1, .. })
            }),
            ("qreg q[2];\nrz q[0];", |e| {
                matches!(e, CompileError::ArityMismatch { line: 4, .. })
            }),
            ("qreg q[2]; qreg r[3];\ncx q,r;", |e| {
                matches!(e, CompileError::BroadcastLengthMismatch { line: 4, col: 1 })
            }),
            ("opaque g a;\nqreg q[1];\ng q[0];", |e| {
                matches!(e, CompileError::OpaqueCallUnsupported { line: 5, .. })
            }),
            ("qreg q[1]; creg c[2];\nif (c==4) x q[0];", |e| {
                matches!(e, CompileError::RegisterOverflow { value: 4, size: 2, .. })
            }),
            ("qreg q[2];\ncx q[1],q[1];", |e| {
                matches!(e, CompileError::DuplicateQubit { qubit: 1, .. })
            }),
            ("qreg q[2];\nx q[2];", |e| {
                matches!(e, CompileError::IndexOutOfRange { index: 2, .. })
            }),
            ("qreg q[2]; creg c[1];\nmeasure q -> c;", |e| {
                matches!(e, CompileError::BroadcastLengthMismatch { .. })
            }),
        ];
        for (src, ok) in cases {
            let e = build_unchecked(src).unwrap_err();
            assert!(ok(&e), "{src}: {e:?}");
        }
    }

    #[test]
    fn embed_places_first_operand_low() {
        // CX with control on local qubit 1, target on local qubit 0.
        let cx: Matrix = Gate2::cx().matrix().iter().map(|r| r.to_vec()).collect();
        let m = embed(&cx, &[1, 0], 2);
        // |b1 b0> = |1 0> (index 2) -> |1 1> (index 3)
        assert_eq!(m[3][2], Complex64::new(1.0, 0.0));
        assert_eq!(m[1][1], Complex64::new(1.0, 0.0));
    }
}
