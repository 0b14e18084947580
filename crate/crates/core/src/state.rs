//! The runtime program: declarations (some possibly still awaiting the
//! user's choice) together with the machine state of variable bindings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{BinaryOp, Clause, DFormula, Expr, SourceProgram, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
    Bool(bool),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Str(_) => "string",
            Value::Bool(_) => "bool",
        }
    }

    /// The literal expression denoting this value.
    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Int(v) => Expr::IntLit(*v),
            Value::Str(s) => Expr::StrLit(s.clone()),
            Value::Bool(b) => Expr::BoolLit(*b),
        }
    }
}

/// Display text: bare decimal for integers, unquoted text for strings.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Str(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow in `{0}`")]
    Overflow(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BindError {
    #[error("cannot assign to constant `{0}`")]
    AssignToConstant(String),
}

/// Variable bindings; at most one value per name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MachineState {
    bindings: BTreeMap<String, Value>,
}

impl MachineState {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Bindings rendered as display text, ordered by name.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        self.bindings
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect()
    }
}

impl FromIterator<(String, Value)> for MachineState {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        MachineState {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// Declarations plus machine state. Cloning is cheap and every update
/// returns a new store, so snapshots can be kept and shared freely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramStore {
    decls: Arc<Vec<DFormula>>,
    theta: MachineState,
}

impl ProgramStore {
    pub fn new(decls: Vec<DFormula>) -> Self {
        ProgramStore {
            decls: Arc::new(decls),
            theta: MachineState::default(),
        }
    }

    pub fn from_program(program: &SourceProgram) -> Self {
        Self::new(program.decls.clone())
    }

    pub fn with_theta(mut self, theta: MachineState) -> Self {
        self.theta = theta;
        self
    }

    pub fn decls(&self) -> &[DFormula] {
        &self.decls
    }

    pub fn theta(&self) -> &MachineState {
        &self.theta
    }

    /// Number of top-level declarations still awaiting a user choice.
    pub fn unresolved_count(&self) -> usize {
        self.decls.iter().filter(|d| d.is_choice()).count()
    }

    /// Choice nodes anywhere in the declarations, nested ones included.
    /// Every user move strictly decreases this.
    pub fn pending_choice_nodes(&self) -> usize {
        self.decls.iter().map(DFormula::choice_nodes).sum()
    }

    pub fn first_unresolved(&self) -> Option<(usize, &[DFormula])> {
        self.decls.iter().enumerate().find_map(|(i, d)| match d {
            DFormula::ChoiceDecl(alts) => Some((i, alts.as_slice())),
            DFormula::Plain(_) => None,
        })
    }

    /// Replaces the choice declaration at `position` by its alternative
    /// `index`. Returns `None` if there is no choice there or the index is
    /// out of range.
    pub fn resolve(&self, position: usize, index: usize) -> Option<ProgramStore> {
        let DFormula::ChoiceDecl(alts) = self.decls.get(position)? else {
            return None;
        };
        let chosen = alts.get(index)?.clone();
        let mut decls = (*self.decls).clone();
        decls[position] = chosen;
        Some(ProgramStore {
            decls: Arc::new(decls),
            theta: self.theta.clone(),
        })
    }

    /// Whether `name` is declared as a constant anywhere, including inside
    /// unresolved choices.
    pub fn declares_constant(&self, name: &str) -> bool {
        self.decls.iter().any(|d| {
            d.leaves()
                .iter()
                .any(|c| matches!(c, Clause::ConstDecl { name: n, .. } if n == name))
        })
    }

    /// Binds `name` to `value`, replacing any previous binding.
    pub fn bind(&self, name: &str, value: Value) -> Result<ProgramStore, BindError> {
        if self.declares_constant(name) {
            return Err(BindError::AssignToConstant(name.to_string()));
        }
        let mut store = self.clone();
        store.theta.bindings.insert(name.to_string(), value);
        Ok(store)
    }

    /// The resolved procedure declaration named `name`. Procedures inside
    /// unresolved choices are not visible.
    pub fn lookup_procedure(&self, name: &str) -> Option<&Clause> {
        self.decls.iter().find_map(|d| match d {
            DFormula::Plain(clause @ Clause::ProcDecl { name: n, .. }) if n == name => {
                Some(clause)
            }
            _ => None,
        })
    }

    /// Evaluates `expr`. Variables resolve against the machine state first,
    /// then against resolved constant declarations.
    pub fn eval(&self, expr: &Expr) -> Result<Value, EvalError> {
        eval_with(expr, &|name| {
            if let Some(v) = self.theta.get(name) {
                return Ok(v.clone());
            }
            self.constant(name, self.decls.len())
        })
    }

    /// Value of a resolved constant declared among the first `limit`
    /// declarations. Constant values only refer to earlier constants, so
    /// the recursion is well-founded.
    fn constant(&self, name: &str, limit: usize) -> Result<Value, EvalError> {
        let found = self.decls[..limit].iter().enumerate().find_map(|(i, d)| match d {
            DFormula::Plain(Clause::ConstDecl { name: n, value }) if n == name => Some((i, value)),
            _ => None,
        });
        match found {
            Some((i, value)) => eval_with(value, &|n| self.constant(n, i)),
            None => Err(EvalError::UnboundVariable(name.to_string())),
        }
    }
}

fn eval_with(
    expr: &Expr,
    lookup: &dyn Fn(&str) -> Result<Value, EvalError>,
) -> Result<Value, EvalError> {
    match expr {
        Expr::IntLit(v) => Ok(Value::Int(*v)),
        Expr::StrLit(s) => Ok(Value::Str(s.clone())),
        Expr::BoolLit(b) => Ok(Value::Bool(*b)),
        Expr::Var(name) => lookup(name),
        Expr::Unary { op, operand } => {
            let v = eval_with(operand, lookup)?;
            match (op, v) {
                (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                (UnaryOp::Neg, Value::Int(i)) => {
                    i.checked_neg().map(Value::Int).ok_or(EvalError::Overflow("-"))
                }
                (op, v) => Err(EvalError::TypeMismatch(format!(
                    "`{}` applied to {}",
                    op.symbol(),
                    v.type_name()
                ))),
            }
        }
        Expr::Binary { op, lhs, rhs } => {
            let l = eval_with(lhs, lookup)?;
            let r = eval_with(rhs, lookup)?;
            apply_binary(*op, l, r)
        }
    }
}

fn apply_binary(op: BinaryOp, l: Value, r: Value) -> Result<Value, EvalError> {
    use BinaryOp::*;
    match (op, &l, &r) {
        (Eq, _, _) => Ok(Value::Bool(l == r)),
        (Ne, _, _) => Ok(Value::Bool(l != r)),
        (Add | Sub | Mul | Div | Lt | Le | Gt | Ge, Value::Int(a), Value::Int(b)) => {
            let (a, b) = (*a, *b);
            let overflow = || EvalError::Overflow(op.symbol());
            Ok(match op {
                Add => Value::Int(a.checked_add(b).ok_or_else(overflow)?),
                Sub => Value::Int(a.checked_sub(b).ok_or_else(overflow)?),
                Mul => Value::Int(a.checked_mul(b).ok_or_else(overflow)?),
                Div if b == 0 => return Err(EvalError::DivisionByZero),
                Div => Value::Int(a.checked_div(b).ok_or_else(overflow)?),
                Lt => Value::Bool(a < b),
                Le => Value::Bool(a <= b),
                Gt => Value::Bool(a > b),
                _ => Value::Bool(a >= b),
            })
        }
        (And, Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(*a && *b)),
        (Or, Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(*a || *b)),
        _ => Err(EvalError::TypeMismatch(format!(
            "`{}` applied to {} and {}",
            op.symbol(),
            l.type_name(),
            r.type_name()
        ))),
    }
}
