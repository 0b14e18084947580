//! The execution and backchaining procedures.
//!
//! A goal is executed against a [`ProgramStore`]. Procedure calls are
//! solved by backchaining on the unique resolved declaration of that name,
//! after substituting the evaluated arguments for its parameters.
//!
//! A goal-level choice alternates between the two players. When the program
//! is stable (the elementarization of `P ⊃ choice` is true) the user moves
//! first by resolving a pending choice declaration, and the choice is
//! retried. Once unstable, the machine moves: it commits to the branch
//! whose guard holds, which must be unique.

use std::collections::HashMap;

use thiserror::Error;

use crate::events::{Event, EventSink};
use crate::interaction::{user_move, ChoiceSource, InteractionError};
use crate::state::{BindError, EvalError, ProgramStore, Value};
use crate::syntax::{compact_expr, Branch, Clause, DFormula, Expr, GoalStmt, SourceProgram};

/// Maximum depth of nested procedure calls.
pub const MAX_CALL_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FailureReason {
    #[error("guard_false: condition `{0}` is false")]
    GuardFalse(String),
    #[error("no_true_branch: no guard of the choice holds")]
    NoTrueBranch,
    #[error("unknown_procedure: `{0}`")]
    UnknownProcedure(String),
    #[error("arity_mismatch: `{name}` takes {expected} argument(s), got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("eval_fault: {0}")]
    EvalFault(EvalError),
    #[error("bind_fault: {0}")]
    BindFault(BindError),
    #[error("exclusivity_violation: guards {0:?} hold simultaneously")]
    ExclusivityViolation(Vec<usize>),
    #[error("choice_source_exhausted: {0}")]
    ChoiceSourceExhausted(String),
    #[error("index_out_of_range: {0}")]
    ChoiceOutOfRange(String),
    #[error("aborted")]
    Aborted,
    #[error("call_depth_exceeded: more than {0} nested calls")]
    CallDepthExceeded(usize),
}

impl FailureReason {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            FailureReason::GuardFalse(_) => "guard_false",
            FailureReason::NoTrueBranch => "no_true_branch",
            FailureReason::UnknownProcedure(_) => "unknown_procedure",
            FailureReason::ArityMismatch { .. } => "arity_mismatch",
            FailureReason::EvalFault(_) => "eval_fault",
            FailureReason::BindFault(_) => "bind_fault",
            FailureReason::ExclusivityViolation(_) => "exclusivity_violation",
            FailureReason::ChoiceSourceExhausted(_) => "choice_source_exhausted",
            FailureReason::ChoiceOutOfRange(_) => "index_out_of_range",
            FailureReason::Aborted => "aborted",
            FailureReason::CallDepthExceeded(_) => "call_depth_exceeded",
        }
    }
}

impl From<InteractionError> for FailureReason {
    fn from(e: InteractionError) -> Self {
        match e {
            InteractionError::Exhausted { .. } => FailureReason::ChoiceSourceExhausted(e.to_string()),
            InteractionError::OutOfRange { .. } => FailureReason::ChoiceOutOfRange(e.to_string()),
            InteractionError::Aborted => FailureReason::Aborted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecOutcome {
    Success(ProgramStore),
    Failure(FailureReason),
}

impl ExecOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, ExecOutcome::Success(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// Which part of the elementarization decided the verdict.
    pub witness: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExecOptions {
    /// Pick the least-index true guard instead of failing when several
    /// guards hold at once. A warning event is emitted when this happens.
    pub first_match: bool,
}

/// Elementarization of a goal: top-level choices become false, assignments
/// become true. Conditions and calls are left as atoms, taken as true.
pub fn elementarize_goal(goal: &GoalStmt) -> bool {
    goal.sequence().into_iter().all(|stmt| match stmt {
        GoalStmt::Choice(_) => false,
        GoalStmt::True | GoalStmt::Assign { .. } | GoalStmt::Cond(_) | GoalStmt::Call { .. } => true,
        GoalStmt::Seq(..) => unreachable!("sequence() flattens Seq"),
    })
}

/// Elementarization of the declarations: false iff a pending choice
/// declaration remains.
pub fn elementarize_program(decls: &[DFormula]) -> bool {
    decls.iter().all(|d| !d.is_choice())
}

/// Stability of `P ⊃ goal`: the elementarization of the implication,
/// `¬elem(P) ∨ elem(goal)`, is true.
pub fn is_stable(store: &ProgramStore, goal: &GoalStmt) -> StabilityVerdict {
    let program = elementarize_program(store.decls());
    let goal_elem = elementarize_goal(goal);
    let stable = !program || goal_elem;
    let witness = if !program {
        let (pos, _) = store.first_unresolved().expect("a pending choice exists");
        format!("pending choice declaration at position {pos}")
    } else if goal_elem {
        "goal elementarizes to true".to_string()
    } else {
        "declarations resolved; goal choice elementarizes to false".to_string()
    };
    StabilityVerdict { stable, witness }
}

/// One execution session: owns the choice-id counter and borrows the
/// choice source and event sink for its duration.
pub struct Machine<'a> {
    source: &'a mut dyn ChoiceSource,
    events: &'a mut dyn EventSink,
    options: ExecOptions,
    next_choice_id: u64,
    depth: usize,
}

impl<'a> Machine<'a> {
    pub fn new(
        source: &'a mut dyn ChoiceSource,
        events: &'a mut dyn EventSink,
        options: ExecOptions,
    ) -> Self {
        Machine {
            source,
            events,
            options,
            next_choice_id: 0,
            depth: 0,
        }
    }

    pub fn execute(&mut self, store: ProgramStore, goal: &GoalStmt) -> ExecOutcome {
        let mut store = store;
        for stmt in goal.sequence() {
            match self.execute_simple(store, stmt) {
                ExecOutcome::Success(next) => store = next,
                failure => return failure,
            }
        }
        ExecOutcome::Success(store)
    }

    fn execute_simple(&mut self, store: ProgramStore, goal: &GoalStmt) -> ExecOutcome {
        use ExecOutcome::{Failure, Success};
        match goal {
            GoalStmt::True => Success(store),
            GoalStmt::Assign { target, value } => {
                let value = match store.eval(value) {
                    Ok(v) => v,
                    Err(e) => return Failure(FailureReason::EvalFault(e)),
                };
                match store.bind(target, value) {
                    Ok(next) => {
                        self.events.emit(Event::State {
                            bindings: next.theta().snapshot(),
                        });
                        Success(next)
                    }
                    Err(e) => Failure(FailureReason::BindFault(e)),
                }
            }
            GoalStmt::Cond(test) => match store.eval(test) {
                Ok(Value::Bool(true)) => Success(store),
                Ok(Value::Bool(false)) => Failure(FailureReason::GuardFalse(compact_expr(test))),
                Ok(other) => Failure(FailureReason::EvalFault(EvalError::TypeMismatch(format!(
                    "condition evaluated to {}",
                    other.type_name()
                )))),
                Err(e) => Failure(FailureReason::EvalFault(e)),
            },
            GoalStmt::Seq(..) => self.execute(store, goal),
            GoalStmt::Call { name, args } => self.call(store, name, args),
            GoalStmt::Choice(branches) => self.choice(store, goal, branches),
        }
    }

    fn call(&mut self, store: ProgramStore, name: &str, args: &[Expr]) -> ExecOutcome {
        let mut values = Vec::with_capacity(args.len());
        for arg in args {
            match store.eval(arg) {
                Ok(v) => values.push(v),
                Err(e) => return ExecOutcome::Failure(FailureReason::EvalFault(e)),
            }
        }
        if let Some(clause) = store.lookup_procedure(name) {
            let clause = clause.clone();
            return self.backchain(&clause, store, name, &values);
        }
        match builtin_arity(name) {
            Some(arity) if arity != values.len() => ExecOutcome::Failure(FailureReason::ArityMismatch {
                name: name.to_string(),
                expected: arity,
                found: values.len(),
            }),
            Some(_) => {
                // print is the only builtin
                self.events.emit(Event::Output {
                    text: values[0].to_string(),
                });
                ExecOutcome::Success(store)
            }
            None => ExecOutcome::Failure(FailureReason::UnknownProcedure(name.to_string())),
        }
    }

    /// Solves a call against a matching procedure declaration: instantiate
    /// the parameters with the argument values, then execute the body.
    pub fn backchain(
        &mut self,
        clause: &Clause,
        store: ProgramStore,
        name: &str,
        args: &[Value],
    ) -> ExecOutcome {
        let Clause::ProcDecl {
            name: decl_name,
            params,
            body,
        } = clause
        else {
            return ExecOutcome::Failure(FailureReason::UnknownProcedure(name.to_string()));
        };
        if decl_name != name {
            return ExecOutcome::Failure(FailureReason::UnknownProcedure(name.to_string()));
        }
        if params.len() != args.len() {
            return ExecOutcome::Failure(FailureReason::ArityMismatch {
                name: name.to_string(),
                expected: params.len(),
                found: args.len(),
            });
        }
        if self.depth == MAX_CALL_DEPTH {
            return ExecOutcome::Failure(FailureReason::CallDepthExceeded(MAX_CALL_DEPTH));
        }
        let bindings: HashMap<&str, &Value> = params.iter().map(String::as_str).zip(args).collect();
        let instance = substitute_goal(body, &bindings);
        self.depth += 1;
        let outcome = self.execute(store, &instance);
        self.depth -= 1;
        outcome
    }

    fn choice(&mut self, store: ProgramStore, goal: &GoalStmt, branches: &[Branch]) -> ExecOutcome {
        let mut store = store;
        loop {
            if is_stable(&store, goal).stable {
                let before = store.pending_choice_nodes();
                let choice_id = self.next_choice_id;
                self.next_choice_id += 1;
                match user_move(&store, choice_id, &mut *self.source, &mut *self.events) {
                    Ok(result) if result.moved => {
                        debug_assert!(result.store.pending_choice_nodes() < before);
                        store = result.store;
                    }
                    // No move was available: terminate with success.
                    Ok(result) => return ExecOutcome::Success(result.store),
                    Err(e) => return ExecOutcome::Failure(e.into()),
                }
                continue;
            }

            let mut holding = Vec::new();
            for (i, branch) in branches.iter().enumerate() {
                match store.eval(&branch.guard) {
                    Ok(Value::Bool(true)) => holding.push(i),
                    Ok(Value::Bool(false)) => {}
                    Ok(other) => {
                        return ExecOutcome::Failure(FailureReason::EvalFault(EvalError::TypeMismatch(
                            format!("guard {i} evaluated to {}", other.type_name()),
                        )))
                    }
                    Err(e) => return ExecOutcome::Failure(FailureReason::EvalFault(e)),
                }
            }
            let chosen = match holding.as_slice() {
                [] => return ExecOutcome::Failure(FailureReason::NoTrueBranch),
                [k] => *k,
                [k, ..] if self.options.first_match => {
                    self.events.emit(Event::Warning {
                        message: format!(
                            "guards {holding:?} hold simultaneously; first-match selects branch {k}"
                        ),
                    });
                    *k
                }
                _ => return ExecOutcome::Failure(FailureReason::ExclusivityViolation(holding)),
            };
            let branch = &branches[chosen];
            self.events.emit(Event::MachineMove {
                branch_index: chosen,
                guard_text: compact_expr(&branch.guard),
            });
            return match self.execute_simple(store, &GoalStmt::Cond(branch.guard.clone())) {
                ExecOutcome::Success(store) => self.execute(store, &branch.body),
                failure => failure,
            };
        }
    }
}

/// Arity of a builtin procedure.
pub fn builtin_arity(name: &str) -> Option<usize> {
    match name {
        "print" => Some(1),
        _ => None,
    }
}

/// Executes `goal` against `store` with a fresh session.
pub fn execute(
    store: ProgramStore,
    goal: &GoalStmt,
    source: &mut dyn ChoiceSource,
    events: &mut dyn EventSink,
    options: ExecOptions,
) -> ExecOutcome {
    Machine::new(source, events, options).execute(store, goal)
}

/// Runs a whole program from an empty machine state and reports the final
/// `Done` event.
pub fn run_program(
    program: &SourceProgram,
    source: &mut dyn ChoiceSource,
    events: &mut dyn EventSink,
    options: ExecOptions,
) -> ExecOutcome {
    let store = ProgramStore::from_program(program);
    let outcome = Machine::new(source, &mut *events, options).execute(store, &program.main);
    let done = match &outcome {
        ExecOutcome::Success(_) => Event::Done {
            success: true,
            reason: None,
        },
        ExecOutcome::Failure(reason) => Event::Done {
            success: false,
            reason: Some(reason.to_string()),
        },
    };
    events.emit(done);
    outcome
}

fn substitute_expr(expr: &Expr, bindings: &HashMap<&str, &Value>) -> Expr {
    match expr {
        Expr::Var(name) => match bindings.get(name.as_str()) {
            Some(v) => v.to_expr(),
            None => expr.clone(),
        },
        Expr::Binary { op, lhs, rhs } => Expr::binary(
            *op,
            substitute_expr(lhs, bindings),
            substitute_expr(rhs, bindings),
        ),
        Expr::Unary { op, operand } => Expr::unary(*op, substitute_expr(operand, bindings)),
        Expr::IntLit(_) | Expr::StrLit(_) | Expr::BoolLit(_) => expr.clone(),
    }
}

fn substitute_goal(goal: &GoalStmt, bindings: &HashMap<&str, &Value>) -> GoalStmt {
    let stmts = goal
        .sequence()
        .into_iter()
        .map(|stmt| match stmt {
            GoalStmt::True => GoalStmt::True,
            GoalStmt::Call { name, args } => GoalStmt::Call {
                name: name.clone(),
                args: args.iter().map(|a| substitute_expr(a, bindings)).collect(),
            },
            GoalStmt::Cond(test) => GoalStmt::Cond(substitute_expr(test, bindings)),
            GoalStmt::Assign { target, value } => GoalStmt::Assign {
                target: target.clone(),
                value: substitute_expr(value, bindings),
            },
            GoalStmt::Choice(branches) => GoalStmt::Choice(
                branches
                    .iter()
                    .map(|b| Branch {
                        guard: substitute_expr(&b.guard, bindings),
                        body: substitute_goal(&b.body, bindings),
                    })
                    .collect(),
            ),
            GoalStmt::Seq(..) => unreachable!("sequence() flattens Seq"),
        })
        .collect();
    GoalStmt::seq_all(stmts)
}
