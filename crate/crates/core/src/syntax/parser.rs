//! Recursive-descent parser.
//!
//! Besides the grammar itself the parser enforces the declaration-level
//! well-formedness rules: procedure parameters are pairwise distinct, no
//! parameter is assigned to, a name is declared by at most one top-level
//! declaration (alternatives of a single choice may repeat it, since only
//! one of them ever becomes part of the program), and constant values only
//! mention constants from earlier declarations.

use std::collections::{HashMap, HashSet};

use super::ast::{BinaryOp, Branch, Clause, DFormula, Expr, GoalStmt, SourceProgram, UnaryOp};
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Source position of a procedure call, for diagnostics that need one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    pub name: String,
    pub arity: usize,
    pub line: usize,
    pub column: usize,
}

/// A parsed program together with positional side information.
#[derive(Debug, Clone)]
pub struct ParsedProgram {
    pub program: SourceProgram,
    pub calls: Vec<CallSite>,
}

pub fn parse_program(source: &str) -> Result<SourceProgram, ParseError> {
    parse_program_with_info(source).map(|p| p.program)
}

pub fn parse_program_with_info(source: &str) -> Result<ParsedProgram, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        calls: Vec::new(),
        params: None,
        depth: 0,
    };
    let program = parser.program()?;
    Ok(ParsedProgram {
        program,
        calls: parser.calls,
    })
}

/// Parses a standalone expression (used by tooling and tests).
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(source)?,
        pos: 0,
        calls: Vec::new(),
        params: None,
        depth: 0,
    };
    let expr = parser.expr()?;
    parser.expect(Tok::Eof)?;
    Ok(expr)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    calls: Vec<CallSite>,
    /// Parameters of the procedure whose body is being parsed.
    params: Option<Vec<String>>,
    depth: usize,
}

/// Bound on syntactic nesting (parentheses, unary operators, choices,
/// procedure bodies).
pub const MAX_NESTING: usize = 200;

/// Bound on the number of statements in one block.
pub const MAX_SEQUENCE: usize = 4096;

#[derive(Default)]
struct DeclNames {
    /// Name -> (line, column) of its first top-level declaration.
    seen: HashMap<String, (usize, usize)>,
    constants: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn check(&self, tok: &Tok) -> bool {
        &self.peek().tok == tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.check(tok) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(t.line, t.column, format!("expected {expected}, found {}", t.tok))
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if self.check(&tok) {
            Ok(self.advance())
        } else {
            Err(self.error_here(&tok.to_string()))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            let t = self.peek();
            return Err(ParseError::new(
                t.line,
                t.column,
                format!("nesting deeper than {MAX_NESTING} levels"),
            ));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(name) => {
                self.advance();
                Ok((name, t.line, t.column))
            }
            _ => Err(self.error_here("identifier")),
        }
    }

    fn program(&mut self) -> Result<SourceProgram, ParseError> {
        let mut decls = Vec::new();
        let mut names = DeclNames::default();
        while !self.check(&Tok::Main) {
            let start = self.peek().clone();
            let decl = match start.tok {
                Tok::Choose => self.choice_decl(&names)?,
                Tok::Const | Tok::Proc => {
                    let clause = self.clause(&names)?;
                    self.expect(Tok::Semi)?;
                    DFormula::Plain(clause)
                }
                _ => return Err(self.error_here("`const`, `proc`, `choose` or `main`")),
            };
            register_names(&decl, &mut names, start.line, start.column)?;
            decls.push(decl);
        }
        self.expect(Tok::Main)?;
        self.expect(Tok::LBrace)?;
        let main = self.gstmt()?;
        self.expect(Tok::RBrace)?;
        self.expect(Tok::Eof)?;
        Ok(SourceProgram { decls, main })
    }

    fn choice_decl(&mut self, names: &DeclNames) -> Result<DFormula, ParseError> {
        let open = self.expect(Tok::Choose)?;
        self.expect(Tok::LBrace)?;
        let mut alts = vec![self.dform(names)?];
        while self.eat(&Tok::Bar) {
            alts.push(self.dform(names)?);
        }
        if alts.len() < 2 {
            return Err(ParseError::new(
                open.line,
                open.column,
                "a choice declaration needs at least two alternatives separated by `|`",
            ));
        }
        self.expect(Tok::RBrace)?;
        Ok(DFormula::ChoiceDecl(alts))
    }

    fn dform(&mut self, names: &DeclNames) -> Result<DFormula, ParseError> {
        if self.check(&Tok::Choose) {
            self.enter()?;
            let decl = self.choice_decl(names);
            self.leave();
            decl
        } else {
            Ok(DFormula::Plain(self.clause(names)?))
        }
    }

    fn clause(&mut self, names: &DeclNames) -> Result<Clause, ParseError> {
        if self.eat(&Tok::Const) {
            let (name, line, column) = self.ident()?;
            self.expect(Tok::EqEq)?;
            let value = self.expr()?;
            for var in value.free_vars() {
                if !names.constants.contains(var) {
                    return Err(ParseError::new(
                        line,
                        column,
                        format!(
                            "constant `{name}` refers to `{var}`, which is not a constant declared earlier"
                        ),
                    ));
                }
            }
            return Ok(Clause::ConstDecl { name, value });
        }
        if !self.eat(&Tok::Proc) {
            return Err(self.error_here("`const` or `proc`"));
        }
        let (name, _, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params: Vec<String> = Vec::new();
        if !self.check(&Tok::RParen) {
            loop {
                let (param, line, column) = self.ident()?;
                if params.contains(&param) {
                    return Err(ParseError::new(
                        line,
                        column,
                        format!("duplicate parameter `{param}` in procedure `{name}`"),
                    ));
                }
                params.push(param);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Assign)?;
        self.expect(Tok::LBrace)?;
        let outer = self.params.replace(params.clone());
        self.enter()?;
        let body = self.gstmt();
        self.leave();
        self.params = outer;
        let body = body?;
        self.expect(Tok::RBrace)?;
        Ok(Clause::ProcDecl { name, params, body })
    }

    fn gstmt(&mut self) -> Result<GoalStmt, ParseError> {
        let mut stmts = vec![self.simple()?];
        while self.eat(&Tok::Semi) {
            if stmts.len() == MAX_SEQUENCE {
                return Err(self.error_here(&format!(
                    "`}}` (blocks are limited to {MAX_SEQUENCE} statements)"
                )));
            }
            stmts.push(self.simple()?);
        }
        Ok(GoalStmt::seq_all(stmts))
    }

    fn simple(&mut self) -> Result<GoalStmt, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Skip => {
                self.advance();
                Ok(GoalStmt::True)
            }
            Tok::Cond => {
                self.advance();
                self.expect(Tok::LParen)?;
                let test = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(GoalStmt::Cond(test))
            }
            Tok::Choose => {
                self.advance();
                self.expect(Tok::LBrace)?;
                self.enter()?;
                let branches = self.branches();
                self.leave();
                let branches = branches?;
                self.expect(Tok::RBrace)?;
                Ok(GoalStmt::Choice(branches))
            }
            Tok::Ident(name) => match self.peek_at(1) {
                Tok::Assign => {
                    self.advance();
                    self.advance();
                    if self.params.as_ref().is_some_and(|p| p.contains(&name)) {
                        return Err(ParseError::new(
                            t.line,
                            t.column,
                            format!("cannot assign to procedure parameter `{name}`"),
                        ));
                    }
                    let value = self.expr()?;
                    Ok(GoalStmt::Assign {
                        target: name,
                        value,
                    })
                }
                Tok::LParen => {
                    self.advance();
                    self.advance();
                    let mut args = Vec::new();
                    if !self.check(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    self.calls.push(CallSite {
                        name: name.clone(),
                        arity: args.len(),
                        line: t.line,
                        column: t.column,
                    });
                    Ok(GoalStmt::Call { name, args })
                }
                _ => {
                    self.advance();
                    Err(self.error_here("`=` or `(` after identifier"))
                }
            },
            _ => Err(self.error_here("a statement")),
        }
    }

    fn branches(&mut self) -> Result<Vec<Branch>, ParseError> {
        let mut branches = vec![self.branch()?];
        while self.eat(&Tok::Bar) {
            branches.push(self.branch()?);
        }
        Ok(branches)
    }

    fn branch(&mut self) -> Result<Branch, ParseError> {
        let guard = self.expr()?;
        self.expect(Tok::Arrow)?;
        let body = self.gstmt()?;
        Ok(Branch { guard, body })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binary_op(tok: &Tok) -> Option<BinaryOp> {
        Some(match tok {
            Tok::OrOr => BinaryOp::Or,
            Tok::AndAnd => BinaryOp::And,
            Tok::EqEq => BinaryOp::Eq,
            Tok::NotEq => BinaryOp::Ne,
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            Tok::Plus => BinaryOp::Add,
            Tok::Minus => BinaryOp::Sub,
            Tok::Star => BinaryOp::Mul,
            Tok::Slash => BinaryOp::Div,
            _ => return None,
        })
    }

    /// Precedence climbing; every level is left-associative.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = Self::binary_op(&self.peek().tok) {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.advance();
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let mut ops = Vec::new();
        loop {
            if self.eat(&Tok::Bang) {
                ops.push(UnaryOp::Not);
            } else if self.eat(&Tok::Minus) {
                ops.push(UnaryOp::Neg);
            } else {
                break;
            }
        }
        for _ in &ops {
            self.enter()?;
        }
        let expr = self.primary();
        self.depth -= ops.len();
        let mut expr = expr?;
        while let Some(op) = ops.pop() {
            expr = Expr::unary(op, expr);
        }
        Ok(expr)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        let expr = match t.tok {
            Tok::Int(v) => Expr::IntLit(v),
            Tok::Str(s) => Expr::StrLit(s),
            Tok::True => Expr::BoolLit(true),
            Tok::False => Expr::BoolLit(false),
            Tok::Ident(name) => Expr::Var(name),
            Tok::LParen => {
                self.advance();
                self.enter()?;
                let inner = self.expr();
                self.leave();
                let inner = inner?;
                self.expect(Tok::RParen)?;
                return Ok(inner);
            }
            _ => return Err(self.error_here("an expression")),
        };
        self.advance();
        Ok(expr)
    }
}

fn register_names(
    decl: &DFormula,
    names: &mut DeclNames,
    line: usize,
    column: usize,
) -> Result<(), ParseError> {
    let mut local: Vec<&Clause> = decl.leaves();
    local.sort_by(|a, b| a.name().cmp(b.name()));
    local.dedup_by(|a, b| a.name() == b.name());
    for clause in &local {
        if let Some((l, c)) = names.seen.get(clause.name()) {
            let what = match clause {
                Clause::ProcDecl { .. } => "procedure",
                Clause::ConstDecl { .. } => "constant",
            };
            return Err(ParseError::new(
                line,
                column,
                format!(
                    "duplicate {what} `{}` (first declared at {l}:{c})",
                    clause.name()
                ),
            ));
        }
    }
    for clause in decl.leaves() {
        names
            .seen
            .entry(clause.name().to_string())
            .or_insert((line, column));
        if let Clause::ConstDecl { name, .. } = clause {
            names.constants.insert(name.clone());
        }
    }
    Ok(())
}
