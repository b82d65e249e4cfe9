//! Name resolution and arity checks over an include-resolved program.

use std::collections::HashMap;

use super::ast::*;
use super::FrontendError;

#[derive(Clone, Copy)]
struct Signature {
    n_params: usize,
    n_qubits: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum RegKind {
    Quantum,
    Classical,
}

#[derive(Default)]
struct Symbols {
    gates: HashMap<String, Signature>,
    regs: HashMap<String, (RegKind, usize)>,
}

fn err(pos: Pos, message: String) -> FrontendError {
    FrontendError::Semantic {
        line: pos.line,
        col: pos.col,
        message,
    }
}

/// Rejects duplicate definitions, unknown identifiers, arity mismatches and
/// out-of-range register indices.
pub fn analyze(program: &Program) -> Result<(), FrontendError> {
    let mut sym = Symbols::default();
    sym.gates.insert(
        "U".into(),
        Signature {
            n_params: 3,
            n_qubits: 1,
        },
    );
    sym.gates.insert(
        "CX".into(),
        Signature {
            n_params: 0,
            n_qubits: 2,
        },
    );
    for item in &program.items {
        match item {
            Item::Qreg(r) | Item::Creg(r) => {
                if sym.regs.contains_key(&r.name) {
                    return Err(err(r.pos, format!("duplicate definition of register '{}'", r.name)));
                }
                let kind = if matches!(item, Item::Qreg(_)) {
                    RegKind::Quantum
                } else {
                    RegKind::Classical
                };
                sym.regs.insert(r.name.clone(), (kind, r.size));
            }
            Item::Gate(g) => {
                define_gate(&mut sym, &g.name, g.pos, g.params.len(), g.qargs.len())?;
                for stmt in &g.body {
                    check_body_stmt(&sym, g, stmt)?;
                }
            }
            Item::Opaque(o) => define_gate(&mut sym, &o.name, o.pos, o.params.len(), o.qargs.len())?,
            Item::Include(inc) => {
                return Err(err(inc.pos, format!("unresolved include '{}'", inc.path)));
            }
            Item::Statement(s) => check_stmt(&sym, s)?,
        }
    }
    Ok(())
}

fn define_gate(sym: &mut Symbols, name: &str, pos: Pos, n_params: usize, n_qubits: usize) -> Result<(), FrontendError> {
    if sym.gates.contains_key(name) {
        return Err(err(pos, format!("duplicate definition of gate '{name}'")));
    }
    sym.gates.insert(name.to_string(), Signature { n_params, n_qubits });
    Ok(())
}

fn check_call(sym: &Symbols, name: &str, pos: Pos, n_params: usize, n_qubits: usize) -> Result<(), FrontendError> {
    let sig = sym
        .gates
        .get(name)
        .ok_or_else(|| err(pos, format!("unknown gate '{name}'")))?;
    if sig.n_params != n_params {
        return Err(err(
            pos,
            format!("gate '{name}' takes {} parameter(s), got {n_params}", sig.n_params),
        ));
    }
    if sig.n_qubits != n_qubits {
        return Err(err(
            pos,
            format!("gate '{name}' takes {} qubit argument(s), got {n_qubits}", sig.n_qubits),
        ));
    }
    Ok(())
}

fn check_body_stmt(sym: &Symbols, def: &GateDef, stmt: &Statement) -> Result<(), FrontendError> {
    let distinct = |ops: &[&Operand]| -> Result<(), FrontendError> {
        for (i, a) in ops.iter().enumerate() {
            if ops[..i].iter().any(|b| b.name == a.name) {
                return Err(err(a.pos, format!("qubit argument '{}' repeated in one call", a.name)));
            }
        }
        Ok(())
    };
    match stmt {
        Statement::GateCall {
            name,
            params,
            operands,
            pos,
        } => {
            if name == &def.name {
                return Err(err(*pos, format!("gate '{name}' cannot call itself")));
            }
            check_call(sym, name, *pos, params.len(), operands.len())?;
            distinct(&operands.iter().collect::<Vec<_>>())
        }
        Statement::CX { control, target, .. } => distinct(&[control, target]),
        _ => Ok(()),
    }
}

fn check_operand(sym: &Symbols, op: &Operand, want: RegKind) -> Result<(), FrontendError> {
    let what = match want {
        RegKind::Quantum => "quantum",
        RegKind::Classical => "classical",
    };
    match sym.regs.get(&op.name) {
        None => Err(err(op.pos, format!("unknown register '{}'", op.name))),
        Some((kind, _)) if *kind != want => Err(err(op.pos, format!("'{}' is not a {what} register", op.name))),
        Some((_, size)) => match op.index {
            Some(i) if i >= *size => Err(err(
                op.pos,
                format!("index {i} out of range for register '{}' of size {size}", op.name),
            )),
            _ => Ok(()),
        },
    }
}

fn check_stmt(sym: &Symbols, stmt: &Statement) -> Result<(), FrontendError> {
    use RegKind::*;
    match stmt {
        Statement::GateCall {
            name,
            params,
            operands,
            pos,
        } => {
            check_call(sym, name, *pos, params.len(), operands.len())?;
            operands.iter().try_for_each(|o| check_operand(sym, o, Quantum))
        }
        Statement::U { operand, .. } => check_operand(sym, operand, Quantum),
        Statement::CX { control, target, .. } => {
            check_operand(sym, control, Quantum)?;
            check_operand(sym, target, Quantum)
        }
        Statement::Measure { qubit, bit, .. } => {
            check_operand(sym, qubit, Quantum)?;
            check_operand(sym, bit, Classical)
        }
        Statement::Reset { qubit, .. } => check_operand(sym, qubit, Quantum),
        Statement::Barrier { operands, .. } => operands.iter().try_for_each(|o| check_operand(sym, o, Quantum)),
        Statement::If { creg, body, pos, .. } => {
            match sym.regs.get(creg) {
                Some((Classical, _)) => {}
                Some(_) => return Err(err(*pos, format!("'{creg}' is not a classical register"))),
                None => return Err(err(*pos, format!("unknown register '{creg}'"))),
            }
            check_stmt(sym, body)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qasm::load_source;
    use std::path::Path;

    fn check(src: &str) -> Result<(), FrontendError> {
        load_source(src, Path::new(".")).map(|_| ())
    }

    #[test]
    fn accepts_well_formed() {
        check("OPENQASM 2.0; include \"qelib1.inc\"; qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q -> c;")
            .unwrap();
    }

    #[test]
    fn rejects_semantic_errors() {
        let bad = [
            "OPENQASM 2.0; qreg q[1]; creg q[1];",
            "OPENQASM 2.0; gate g a { U(0,0,0) a; } gate g a { U(0,0,0) a; }",
            "OPENQASM 2.0; qreg q[1]; h q[0];",
            "OPENQASM 2.0; include \"qelib1.inc\"; qreg q[1]; h q[1];",
            "OPENQASM 2.0; include \"qelib1.inc\"; qreg q[2]; cx q[0];",
            "OPENQASM 2.0; include \"qelib1.inc\"; qreg q[1]; rz q[0];",
            "OPENQASM 2.0; include \"qelib1.inc\"; qreg q[1]; creg c[1]; measure c[0] -> q[0];",
            "OPENQASM 2.0; include \"qelib1.inc\"; qreg q[1]; if (c==0) x q[0];",
            "OPENQASM 2.0; gate g a,b { CX a,a; }",
            "OPENQASM 2.0; gate g a { g a; }",
            "OPENQASM 2.0; gate g a { f a; }",
        ];
        for src in bad {
            let e = check(src).unwrap_err();
            assert!(matches!(e, FrontendError::Semantic { .. }), "{src}: {e:?}");
            assert!(e.position().is_some());
        }
    }

    #[test]
    fn error_position_points_at_use() {
        let e = check("OPENQASM 2.0;\nqreg q[2];\n\nfoo q[0];").unwrap_err();
        assert_eq!(e.position(), Some((4, 1)));
    }
}
