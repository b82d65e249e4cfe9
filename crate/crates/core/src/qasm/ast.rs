//! Parse tree of an OpenQASM 2.0 translation unit.

use super::expr::Expr;

/// Source position. Positions never take part in structural equality, so a
/// re-printed and re-parsed program compares equal to the original.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Pos { line, col }
    }
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub version: (u32, u32),
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Qreg(RegDecl),
    Creg(RegDecl),
    Gate(GateDef),
    Opaque(OpaqueDecl),
    Include(Include),
    Statement(Statement),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegDecl {
    pub name: String,
    pub size: usize,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateDef {
    pub name: String,
    pub params: Vec<String>,
    pub qargs: Vec<String>,
    pub body: Vec<Statement>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpaqueDecl {
    pub name: String,
    pub params: Vec<String>,
    pub qargs: Vec<String>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Include {
    pub path: String,
    pub pos: Pos,
}

/// A whole register (`q`) or one element (`q[3]`).
#[derive(Clone, Debug, PartialEq)]
pub struct Operand {
    pub name: String,
    pub index: Option<usize>,
    pub pos: Pos,
}

impl Operand {
    pub fn new(name: impl Into<String>, index: Option<usize>) -> Self {
        Operand {
            name: name.into(),
            index,
            pos: Pos::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    GateCall {
        name: String,
        params: Vec<Expr>,
        operands: Vec<Operand>,
        pos: Pos,
    },
    U {
        theta: Expr,
        phi: Expr,
        lambda: Expr,
        operand: Operand,
        pos: Pos,
    },
    CX {
        control: Operand,
        target: Operand,
        pos: Pos,
    },
    Measure {
        qubit: Operand,
        bit: Operand,
        pos: Pos,
    },
    Reset {
        qubit: Operand,
        pos: Pos,
    },
    Barrier {
        operands: Vec<Operand>,
        pos: Pos,
    },
    If {
        creg: String,
        value: u64,
        body: Box<Statement>,
        pos: Pos,
    },
}

impl Statement {
    pub fn pos(&self) -> Pos {
        match self {
            Statement::GateCall { pos, .. }
            | Statement::U { pos, .. }
            | Statement::CX { pos, .. }
            | Statement::Measure { pos, .. }
            | Statement::Reset { pos, .. }
            | Statement::Barrier { pos, .. }
            | Statement::If { pos, .. } => *pos,
        }
    }
}
