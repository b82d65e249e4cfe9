use std::fmt::Write;

use super::ast::*;

/// Renders a program as OpenQASM 2.0 source that parses back to an equal AST.
pub fn print_program(program: &Program) -> String {
    let mut out = format!("OPENQASM {}.{};\n", program.version.0, program.version.1);
    for item in &program.items {
        print_item(&mut out, item);
    }
    out
}

fn print_item(out: &mut String, item: &Item) {
    match item {
        Item::Include(inc) => writeln!(out, "include \"{}\";", inc.path).unwrap(),
        Item::Qreg(r) => writeln!(out, "qreg {}[{}];", r.name, r.size).unwrap(),
        Item::Creg(r) => writeln!(out, "creg {}[{}];", r.name, r.size).unwrap(),
        Item::Gate(g) => {
            write!(out, "gate {}", g.name).unwrap();
            if !g.params.is_empty() {
                write!(out, "({})", g.params.join(",")).unwrap();
            }
            writeln!(out, " {}\n{{", g.qargs.join(",")).unwrap();
            for s in &g.body {
                out.push_str("  ");
                print_statement(out, s);
                out.push('\n');
            }
            out.push_str("}\n");
        }
        Item::Opaque(o) => {
            write!(out, "opaque {}", o.name).unwrap();
            if !o.params.is_empty() {
                write!(out, "({})", o.params.join(",")).unwrap();
            }
            writeln!(out, " {};", o.qargs.join(",")).unwrap();
        }
        Item::Statement(s) => {
            print_statement(out, s);
            out.push('\n');
        }
    }
}

fn operand(op: &Operand) -> String {
    match op.index {
        Some(i) => format!("{}[{i}]", op.name),
        None => op.name.clone(),
    }
}

fn operands(ops: &[Operand]) -> String {
    ops.iter().map(operand).collect::<Vec<_>>().join(",")
}

pub(crate) fn print_statement(out: &mut String, s: &Statement) {
    match s {
        Statement::GateCall {
            name,
            params,
            operands: ops,
            ..
        } => {
            out.push_str(name);
            if !params.is_empty() {
                let ps: Vec<String> = params.iter().map(ToString::to_string).collect();
                write!(out, "({})", ps.join(",")).unwrap();
            }
            write!(out, " {};", operands(ops)).unwrap();
        }
        Statement::U {
            theta,
            phi,
            lambda,
            operand: op,
            ..
        } => write!(out, "U({theta},{phi},{lambda}) {};", operand(op)).unwrap(),
        Statement::CX { control, target, .. } => write!(out, "CX {},{};", operand(control), operand(target)).unwrap(),
        Statement::Measure { qubit, bit, .. } => {
            write!(out, "measure {} -> {};", operand(qubit), operand(bit)).unwrap()
        }
        Statement::Reset { qubit, .. } => write!(out, "reset {};", operand(qubit)).unwrap(),
        Statement::Barrier { operands: ops, .. } => write!(out, "barrier {};", operands(ops)).unwrap(),
        Statement::If { creg, value, body, .. } => {
            write!(out, "if({creg}=={value}) ").unwrap();
            print_statement(out, body);
        }
    }
}
