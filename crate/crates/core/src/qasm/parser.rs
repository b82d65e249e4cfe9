//! Recursive-descent parser for OpenQASM 2.0.
//!
//! Checks that do not depend on included files (gate-local scoping, duplicate
//! formal names, register sizes) happen here; cross-item resolution lives in
//! [`super::analyze`].

use std::collections::HashSet;

use super::ast::*;
use super::expr::{BinOp, Expr, Func};
use super::lexer::{tokenize, Token, TokenKind};
use super::FrontendError;

/// Parses a complete translation unit, which must start with `OPENQASM 2.0;`.
pub fn parse(tokens: &[Token<'_>]) -> Result<Program, FrontendError> {
    let mut p = Parser::new(tokens);
    p.expect_keyword("OPENQASM", "'OPENQASM' header")?;
    let version = p.expect_kind(TokenKind::Real, "version number")?;
    if version.text != "2.0" {
        return Err(semantic(
            &version,
            format!("unsupported OpenQASM version {}", version.text),
        ));
    }
    p.expect_symbol(";")?;
    let items = p.items()?;
    Ok(Program { version: (2, 0), items })
}

/// Parses the body of an included file (no version header).
pub fn parse_fragment(tokens: &[Token<'_>]) -> Result<Vec<Item>, FrontendError> {
    Parser::new(tokens).items()
}

/// Parses a standalone parameter expression.
pub fn parse_expr(source: &str) -> Result<Expr, FrontendError> {
    let tokens = tokenize(source)?;
    let mut p = Parser::new(&tokens);
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(p.unexpected(t, "end of expression"));
    }
    Ok(e)
}

struct Parser<'t, 'src> {
    tokens: &'t [Token<'src>],
    at: usize,
}

fn semantic(tok: &Token<'_>, message: String) -> FrontendError {
    FrontendError::Semantic {
        line: tok.line,
        col: tok.col,
        message,
    }
}

fn pos_of(tok: &Token<'_>) -> Pos {
    Pos::new(tok.line, tok.col)
}

impl<'t, 'src> Parser<'t, 'src> {
    fn new(tokens: &'t [Token<'src>]) -> Self {
        Parser { tokens, at: 0 }
    }

    fn peek(&self) -> Option<Token<'src>> {
        self.tokens.get(self.at).copied()
    }

    fn bump(&mut self) -> Option<Token<'src>> {
        let t = self.peek();
        self.at += 1;
        t
    }

    fn eat_symbol(&mut self, s: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_symbol(s)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    /// Error for a missing token. When the offending token starts a later
    /// line (or input ended), the error points just past the previous token,
    /// which is where the missing text belongs.
    fn missing(&self, expected: &str) -> FrontendError {
        let prev = self.at.checked_sub(1).and_then(|i| self.tokens.get(i));
        let found = self.peek();
        let (line, col) = match (prev, found) {
            (Some(p), Some(f)) if f.line > p.line => (p.line, p.end_col()),
            (Some(p), None) => (p.line, p.end_col()),
            (_, Some(f)) => (f.line, f.col),
            (None, None) => (1, 1),
        };
        FrontendError::Parse {
            line,
            col,
            expected: expected.to_string(),
            found: found.map_or_else(|| "end of input".to_string(), |t| format!("'{}'", t.text)),
        }
    }

    fn unexpected(&self, tok: Token<'_>, expected: &str) -> FrontendError {
        FrontendError::Parse {
            line: tok.line,
            col: tok.col,
            expected: expected.to_string(),
            found: format!("'{}'", tok.text),
        }
    }

    fn expect_symbol(&mut self, s: &str) -> Result<Token<'src>, FrontendError> {
        match self.peek() {
            Some(t) if t.is_symbol(s) => {
                self.at += 1;
                Ok(t)
            }
            _ => Err(self.missing(&format!("'{s}'"))),
        }
    }

    fn expect_keyword(&mut self, k: &str, what: &str) -> Result<Token<'src>, FrontendError> {
        match self.peek() {
            Some(t) if t.is_keyword(k) => {
                self.at += 1;
                Ok(t)
            }
            _ => Err(self.missing(what)),
        }
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &str) -> Result<Token<'src>, FrontendError> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.at += 1;
                Ok(t)
            }
            _ => Err(self.missing(what)),
        }
    }

    fn ident(&mut self) -> Result<Token<'src>, FrontendError> {
        self.expect_kind(TokenKind::Identifier, "identifier")
    }

    fn integer(&mut self) -> Result<(u64, Token<'src>), FrontendError> {
        let t = self.expect_kind(TokenKind::Integer, "integer")?;
        let v = t
            .text
            .parse::<u64>()
            .map_err(|_| semantic(&t, format!("integer {} is too large", t.text)))?;
        Ok((v, t))
    }

    fn items(&mut self) -> Result<Vec<Item>, FrontendError> {
        let mut items = Vec::new();
        while let Some(t) = self.peek() {
            items.push(self.item(t)?);
        }
        Ok(items)
    }

    fn item(&mut self, t: Token<'src>) -> Result<Item, FrontendError> {
        if t.kind == TokenKind::Keyword {
            match t.text {
                "include" => {
                    self.bump();
                    let s = self.expect_kind(TokenKind::String, "file name string")?;
                    self.expect_symbol(";")?;
                    return Ok(Item::Include(Include {
                        path: s.text[1..s.text.len() - 1].to_string(),
                        pos: pos_of(&t),
                    }));
                }
                "qreg" | "creg" => {
                    self.bump();
                    let name = self.ident()?;
                    self.expect_symbol("[")?;
                    let (size, size_tok) = self.integer()?;
                    if size == 0 {
                        return Err(semantic(&size_tok, format!("register '{}' has size 0", name.text)));
                    }
                    self.expect_symbol("]")?;
                    self.expect_symbol(";")?;
                    let decl = RegDecl {
                        name: name.text.to_string(),
                        size: size as usize,
                        pos: pos_of(&t),
                    };
                    return Ok(if t.text == "qreg" {
                        Item::Qreg(decl)
                    } else {
                        Item::Creg(decl)
                    });
                }
                "gate" => return self.gate_def().map(Item::Gate),
                "opaque" => return self.opaque_decl().map(Item::Opaque),
                "OPENQASM" => return Err(semantic(&t, "duplicate OPENQASM header".into())),
                _ => {}
            }
        }
        self.statement(None).map(Item::Statement)
    }

    /// `(a, b)`-style formal list after a gate name; `()` and absence are both
    /// empty.
    fn formal_params(&mut self) -> Result<Vec<Token<'src>>, FrontendError> {
        if !self.eat_symbol("(") {
            return Ok(Vec::new());
        }
        if self.eat_symbol(")") {
            return Ok(Vec::new());
        }
        let list = self.id_list()?;
        self.expect_symbol(")")?;
        Ok(list)
    }

    fn id_list(&mut self) -> Result<Vec<Token<'src>>, FrontendError> {
        let mut list = vec![self.ident()?];
        while self.eat_symbol(",") {
            list.push(self.ident()?);
        }
        Ok(list)
    }

    fn unique_names(list: &[Token<'_>], what: &str) -> Result<Vec<String>, FrontendError> {
        let mut seen = HashSet::new();
        for t in list {
            if !seen.insert(t.text) {
                return Err(semantic(t, format!("duplicate {what} '{}'", t.text)));
            }
        }
        Ok(list.iter().map(|t| t.text.to_string()).collect())
    }

    fn signature(&mut self) -> Result<(Token<'src>, Vec<String>, Vec<String>), FrontendError> {
        let name = self.ident()?;
        let params = self.formal_params()?;
        let qargs = self.id_list()?;
        let params = Self::unique_names(&params, "parameter")?;
        let qargs_names = Self::unique_names(&qargs, "qubit argument")?;
        if let Some(t) = qargs.iter().find(|t| params.iter().any(|p| p == t.text)) {
            return Err(semantic(
                t,
                format!("'{}' is both a parameter and a qubit argument", t.text),
            ));
        }
        Ok((name, params, qargs_names))
    }

    fn gate_def(&mut self) -> Result<GateDef, FrontendError> {
        let kw = self.bump().expect("peeked");
        let (name, params, qargs) = self.signature()?;
        self.expect_symbol("{")?;
        let scope = GateScope {
            params: &params,
            qargs: &qargs,
        };
        let mut body = Vec::new();
        while !self.eat_symbol("}") {
            if self.peek().is_none() {
                return Err(self.missing("'}'"));
            }
            body.push(self.statement(Some(&scope))?);
        }
        Ok(GateDef {
            name: name.text.to_string(),
            params,
            qargs,
            body,
            pos: pos_of(&kw),
        })
    }

    fn opaque_decl(&mut self) -> Result<OpaqueDecl, FrontendError> {
        let kw = self.bump().expect("peeked");
        let (name, params, qargs) = self.signature()?;
        self.expect_symbol(";")?;
        Ok(OpaqueDecl {
            name: name.text.to_string(),
            params,
            qargs,
            pos: pos_of(&kw),
        })
    }

    fn operand(&mut self, scope: Option<&GateScope<'_>>) -> Result<Operand, FrontendError> {
        let name = self.ident()?;
        let index = if self.eat_symbol("[") {
            let (i, _) = self.integer()?;
            self.expect_symbol("]")?;
            Some(i as usize)
        } else {
            None
        };
        if let Some(scope) = scope {
            if index.is_some() {
                return Err(semantic(&name, "gate bodies may not index qubit arguments".into()));
            }
            if !scope.qargs.iter().any(|q| q == name.text) {
                return Err(semantic(&name, format!("unknown qubit argument '{}'", name.text)));
            }
        }
        Ok(Operand {
            name: name.text.to_string(),
            index,
            pos: pos_of(&name),
        })
    }

    fn operand_list(&mut self, scope: Option<&GateScope<'_>>) -> Result<Vec<Operand>, FrontendError> {
        let mut list = vec![self.operand(scope)?];
        while self.eat_symbol(",") {
            list.push(self.operand(scope)?);
        }
        Ok(list)
    }

    /// One quantum statement. Inside a gate body (`scope` set) only unitary
    /// calls and barriers are allowed.
    fn statement(&mut self, scope: Option<&GateScope<'_>>) -> Result<Statement, FrontendError> {
        let Some(t) = self.peek() else {
            return Err(self.missing("statement"));
        };
        let pos = pos_of(&t);
        let in_gate = scope.is_some();
        let stmt = match (t.kind, t.text) {
            (TokenKind::Keyword, "U") => {
                self.bump();
                self.expect_symbol("(")?;
                let theta = self.scoped_expr(scope)?;
                self.expect_symbol(",")?;
                let phi = self.scoped_expr(scope)?;
                self.expect_symbol(",")?;
                let lambda = self.scoped_expr(scope)?;
                self.expect_symbol(")")?;
                let operand = self.operand(scope)?;
                Statement::U {
                    theta,
                    phi,
                    lambda,
                    operand,
                    pos,
                }
            }
            (TokenKind::Keyword, "CX") => {
                self.bump();
                let control = self.operand(scope)?;
                self.expect_symbol(",")?;
                let target = self.operand(scope)?;
                Statement::CX { control, target, pos }
            }
            (TokenKind::Keyword, "barrier") => {
                self.bump();
                Statement::Barrier {
                    operands: self.operand_list(scope)?,
                    pos,
                }
            }
            (TokenKind::Keyword, "measure") if !in_gate => {
                self.bump();
                let qubit = self.operand(None)?;
                self.expect_symbol("->")?;
                let bit = self.operand(None)?;
                Statement::Measure { qubit, bit, pos }
            }
            (TokenKind::Keyword, "reset") if !in_gate => {
                self.bump();
                Statement::Reset {
                    qubit: self.operand(None)?,
                    pos,
                }
            }
            (TokenKind::Keyword, "if") if !in_gate => {
                self.bump();
                self.expect_symbol("(")?;
                let creg = self.ident()?;
                self.expect_symbol("==")?;
                let (value, _) = self.integer()?;
                self.expect_symbol(")")?;
                let body = match self.peek() {
                    Some(n) if n.is_keyword("if") => return Err(semantic(&n, "nested 'if' is not allowed".into())),
                    Some(n) if n.is_keyword("barrier") => {
                        return Err(self.unexpected(n, "quantum operation after 'if'"))
                    }
                    _ => self.statement(None)?,
                };
                // The inner statement consumed its own ';'.
                return Ok(Statement::If {
                    creg: creg.text.to_string(),
                    value,
                    body: Box::new(body),
                    pos,
                });
            }
            (TokenKind::Identifier, name) => {
                self.bump();
                let params = if self.eat_symbol("(") {
                    if self.eat_symbol(")") {
                        Vec::new()
                    } else {
                        let mut list = vec![self.scoped_expr(scope)?];
                        while self.eat_symbol(",") {
                            list.push(self.scoped_expr(scope)?);
                        }
                        self.expect_symbol(")")?;
                        list
                    }
                } else {
                    Vec::new()
                };
                Statement::GateCall {
                    name: name.to_string(),
                    params,
                    operands: self.operand_list(scope)?,
                    pos,
                }
            }
            _ => {
                let what = if in_gate { "gate operation or '}'" } else { "statement" };
                return Err(self.unexpected(t, what));
            }
        };
        self.expect_symbol(";")?;
        Ok(stmt)
    }

    /// Expression whose identifiers must be parameters of the enclosing gate;
    /// top-level expressions may not reference identifiers at all.
    fn scoped_expr(&mut self, scope: Option<&GateScope<'_>>) -> Result<Expr, FrontendError> {
        let start = self.at;
        let e = self.expr()?;
        let allowed: &[String] = scope.map_or(&[], |s| s.params);
        for name in e.params() {
            if !allowed.iter().any(|p| p == name) {
                let tok = self.tokens[start..self.at]
                    .iter()
                    .find(|t| t.kind == TokenKind::Identifier && t.text == name)
                    .copied()
                    .unwrap_or(self.tokens[start]);
                return Err(semantic(&tok, format!("unknown parameter '{name}'")));
            }
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_symbol("+") {
                BinOp::Add
            } else if self.eat_symbol("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_symbol("*") {
                BinOp::Mul
            } else if self.eat_symbol("/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, FrontendError> {
        if self.eat_symbol("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat_symbol("^") {
            return Ok(Expr::binary(BinOp::Pow, base, self.unary()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, FrontendError> {
        let Some(t) = self.peek() else {
            return Err(self.missing("expression"));
        };
        let e = match t.kind {
            TokenKind::Real => {
                self.bump();
                Expr::Real(
                    t.text
                        .parse()
                        .map_err(|_| semantic(&t, format!("bad real '{}'", t.text)))?,
                )
            }
            TokenKind::Integer => Expr::Int(self.integer()?.0),
            TokenKind::Identifier => {
                self.bump();
                Expr::Param(t.text.to_string())
            }
            TokenKind::Keyword if t.text == "pi" => {
                self.bump();
                Expr::Pi
            }
            TokenKind::Keyword if Func::from_name(t.text).is_some() => {
                self.bump();
                self.expect_symbol("(")?;
                let arg = self.expr()?;
                self.expect_symbol(")")?;
                Expr::Call(Func::from_name(t.text).expect("checked"), Box::new(arg))
            }
            TokenKind::Symbol if t.text == "(" => {
                self.bump();
                let e = self.expr()?;
                self.expect_symbol(")")?;
                e
            }
            _ => return Err(self.unexpected(t, "expression")),
        };
        Ok(e)
    }
}

struct GateScope<'a> {
    params: &'a [String],
    qargs: &'a [String],
}
