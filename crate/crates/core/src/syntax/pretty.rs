//! Canonical concrete syntax.
//!
//! `pretty_print` lays a program out over multiple lines with two-space
//! indentation; the `compact_*` functions render a single line and are used
//! for prompt alternatives and trace text.

use super::ast::{Branch, Clause, DFormula, Expr, GoalStmt, SourceProgram};

const UNARY_PREC: u8 = 6;

pub fn pretty_print(program: &SourceProgram) -> String {
    let mut out = String::new();
    for decl in &program.decls {
        match decl {
            DFormula::Plain(clause) => {
                write_clause(&mut out, clause, 0);
                out.push_str(";\n");
            }
            choice => {
                write_dformula(&mut out, choice, 0);
                out.push('\n');
            }
        }
    }
    if !program.decls.is_empty() {
        out.push('\n');
    }
    out.push_str("main {\n");
    write_block(&mut out, &program.main, 2);
    out.push_str("}\n");
    out
}

pub fn compact_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr, 0);
    out
}

pub fn compact_goal(goal: &GoalStmt) -> String {
    let parts: Vec<String> = goal
        .sequence()
        .into_iter()
        .map(|stmt| match stmt {
            GoalStmt::Choice(branches) => {
                let alts: Vec<String> = branches
                    .iter()
                    .map(|b| format!("{} -> {}", compact_expr(&b.guard), compact_goal(&b.body)))
                    .collect();
                format!("choose {{ {} }}", alts.join(" | "))
            }
            simple => simple_stmt(simple),
        })
        .collect();
    parts.join("; ")
}

pub fn compact_clause(clause: &Clause) -> String {
    match clause {
        Clause::ConstDecl { name, value } => format!("const {name} == {}", compact_expr(value)),
        Clause::ProcDecl { name, params, body } => format!(
            "proc {name}({}) = {{ {} }}",
            params.join(", "),
            compact_goal(body)
        ),
    }
}

pub fn compact_dformula(dform: &DFormula) -> String {
    match dform {
        DFormula::Plain(clause) => compact_clause(clause),
        DFormula::ChoiceDecl(alts) => {
            let alts: Vec<String> = alts.iter().map(compact_dformula).collect();
            format!("choose {{ {} }}", alts.join(" | "))
        }
    }
}

fn indent(out: &mut String, n: usize) {
    out.extend(std::iter::repeat_n(' ', n));
}

fn write_clause(out: &mut String, clause: &Clause, level: usize) {
    match clause {
        Clause::ConstDecl { .. } => out.push_str(&compact_clause(clause)),
        Clause::ProcDecl { name, params, body } => {
            out.push_str(&format!("proc {name}({}) = {{\n", params.join(", ")));
            write_block(out, body, level + 2);
            indent(out, level);
            out.push('}');
        }
    }
}

/// Writes a declaration formula starting at the current column; nested
/// lines are indented relative to `level`.
fn write_dformula(out: &mut String, dform: &DFormula, level: usize) {
    match dform {
        DFormula::Plain(clause) => write_clause(out, clause, level),
        DFormula::ChoiceDecl(alts) => {
            out.push_str("choose {\n");
            for (i, alt) in alts.iter().enumerate() {
                indent(out, level + 2);
                if i > 0 {
                    out.push_str("| ");
                }
                write_dformula(out, alt, level + 2);
                out.push('\n');
            }
            indent(out, level);
            out.push('}');
        }
    }
}

/// Writes a statement sequence, one statement per line, each at `level`.
fn write_block(out: &mut String, goal: &GoalStmt, level: usize) {
    let stmts = goal.sequence();
    let last = stmts.len() - 1;
    for (i, stmt) in stmts.into_iter().enumerate() {
        indent(out, level);
        match stmt {
            GoalStmt::Choice(branches) => write_choice(out, branches, level),
            simple => out.push_str(&simple_stmt(simple)),
        }
        if i != last {
            out.push(';');
        }
        out.push('\n');
    }
}

fn write_choice(out: &mut String, branches: &[Branch], level: usize) {
    out.push_str("choose {\n");
    for (i, branch) in branches.iter().enumerate() {
        indent(out, level + 2);
        if i > 0 {
            out.push_str("| ");
        }
        out.push_str(&compact_expr(&branch.guard));
        out.push_str(" ->");
        match &branch.body {
            GoalStmt::Seq(..) | GoalStmt::Choice(_) => {
                out.push('\n');
                write_block(out, &branch.body, level + 6);
            }
            simple => {
                out.push(' ');
                out.push_str(&simple_stmt(simple));
                out.push('\n');
            }
        }
    }
    indent(out, level);
    out.push('}');
}

/// Single-line rendering of a statement that is neither a sequence nor a
/// choice.
fn simple_stmt(stmt: &GoalStmt) -> String {
    match stmt {
        GoalStmt::True => "skip".to_string(),
        GoalStmt::Call { name, args } => {
            let args: Vec<String> = args.iter().map(compact_expr).collect();
            format!("{name}({})", args.join(", "))
        }
        GoalStmt::Cond(test) => format!("cond({})", compact_expr(test)),
        GoalStmt::Assign { target, value } => format!("{target} = {}", compact_expr(value)),
        GoalStmt::Seq(..) | GoalStmt::Choice(_) => compact_goal(stmt),
    }
}

fn write_expr(out: &mut String, expr: &Expr, min_prec: u8) {
    match expr {
        Expr::IntLit(v) => out.push_str(&v.to_string()),
        Expr::StrLit(s) => write_string(out, s),
        Expr::BoolLit(b) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Var(name) => out.push_str(name),
        Expr::Unary { op, operand } => {
            out.push_str(op.symbol());
            write_expr(out, operand, UNARY_PREC);
        }
        Expr::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            let parens = prec < min_prec;
            if parens {
                out.push('(');
            }
            write_expr(out, lhs, prec);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(out, rhs, prec + 1);
            if parens {
                out.push(')');
            }
        }
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            c => out.push(c),
        }
    }
    out.push('"');
}
