//! Abstract syntax for programs: expressions, goal statements, clauses and
//! declaration formulas.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter. All binary levels are
    /// left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
            BinaryOp::Mul | BinaryOp::Div => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Neg => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    IntLit(i64),
    StrLit(String),
    BoolLit(bool),
    Var(String),
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn str(value: impl Into<String>) -> Expr {
        Expr::StrLit(value.into())
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Expr {
        Expr::Unary {
            op,
            operand: Box::new(operand),
        }
    }

    pub fn eq(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinaryOp::Eq, lhs, rhs)
    }

    /// Free variable names in left-to-right order, with repeats.
    pub fn free_vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Var(name) => out.push(name),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
            Expr::Unary { operand, .. } => operand.collect_vars(out),
            Expr::IntLit(_) | Expr::StrLit(_) | Expr::BoolLit(_) => {}
        }
    }
}

/// A guarded alternative of a goal-level choice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Branch {
    pub guard: Expr,
    pub body: GoalStmt,
}

/// Main statements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GoalStmt {
    /// Always succeeds; written `skip`.
    True,
    Call { name: String, args: Vec<Expr> },
    /// A condition used as a statement: succeeds iff it evaluates to true.
    Cond(Expr),
    Assign { target: String, value: Expr },
    Seq(Box<GoalStmt>, Box<GoalStmt>),
    /// Machine-resolved choice among guarded branches.
    Choice(Vec<Branch>),
}

impl GoalStmt {
    pub fn call(name: impl Into<String>, args: Vec<Expr>) -> GoalStmt {
        GoalStmt::Call {
            name: name.into(),
            args,
        }
    }

    pub fn assign(target: impl Into<String>, value: Expr) -> GoalStmt {
        GoalStmt::Assign {
            target: target.into(),
            value,
        }
    }

    pub fn seq(first: GoalStmt, second: GoalStmt) -> GoalStmt {
        GoalStmt::Seq(Box::new(first), Box::new(second))
    }

    /// Builds a right-nested sequence from a nonempty list of statements.
    ///
    /// Panics on an empty list.
    pub fn seq_all(stmts: Vec<GoalStmt>) -> GoalStmt {
        let mut iter = stmts.into_iter().rev();
        let last = iter.next().expect("seq_all needs at least one statement");
        iter.fold(last, |acc, stmt| GoalStmt::seq(stmt, acc))
    }

    /// Flattens a sequence into its statements, left to right.
    pub fn sequence(&self) -> Vec<&GoalStmt> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                GoalStmt::Seq(first, second) => {
                    out.extend(first.sequence());
                    cur = second;
                }
                other => {
                    out.push(other);
                    return out;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Clause {
    /// `const name == value`
    ConstDecl { name: String, value: Expr },
    /// `proc name(params) = { body }`, universally closed over `params`.
    ProcDecl {
        name: String,
        params: Vec<String>,
        body: GoalStmt,
    },
}

impl Clause {
    pub fn name(&self) -> &str {
        match self {
            Clause::ConstDecl { name, .. } | Clause::ProcDecl { name, .. } => name,
        }
    }

    pub fn constant(name: impl Into<String>, value: Expr) -> Clause {
        Clause::ConstDecl {
            name: name.into(),
            value,
        }
    }
}

/// A clause, or a user-resolved choice among at least two formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DFormula {
    Plain(Clause),
    ChoiceDecl(Vec<DFormula>),
}

impl DFormula {
    pub fn is_choice(&self) -> bool {
        matches!(self, DFormula::ChoiceDecl(_))
    }

    /// Number of choice nodes in this formula, nested ones included.
    pub fn choice_nodes(&self) -> usize {
        match self {
            DFormula::Plain(_) => 0,
            DFormula::ChoiceDecl(alts) => 1 + alts.iter().map(DFormula::choice_nodes).sum::<usize>(),
        }
    }

    /// Every clause reachable through any alternative.
    pub fn leaves(&self) -> Vec<&Clause> {
        match self {
            DFormula::Plain(clause) => vec![clause],
            DFormula::ChoiceDecl(alts) => alts.iter().flat_map(DFormula::leaves).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceProgram {
    pub decls: Vec<DFormula>,
    pub main: GoalStmt,
}

impl fmt::Display for SourceProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::pretty::pretty_print(self))
    }
}
