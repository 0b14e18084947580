//! Static checks run by `choo check`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::engine::builtin_arity;
use crate::syntax::{parse_program_with_info, Clause, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl From<ParseError> for Finding {
    fn from(e: ParseError) -> Self {
        Finding {
            line: e.line,
            column: e.column,
            message: e.message,
        }
    }
}

/// Parses `source` and reports every problem found. Parse errors (which
/// include duplicate declarations and malformed choice declarations) stop
/// the check early; otherwise every call whose argument count matches no
/// declaration of the called procedure is reported.
pub fn check_source(source: &str) -> Vec<Finding> {
    let parsed = match parse_program_with_info(source) {
        Ok(parsed) => parsed,
        Err(e) => return vec![e.into()],
    };

    let mut arities: HashMap<&str, BTreeSet<usize>> = HashMap::new();
    for decl in &parsed.program.decls {
        for clause in decl.leaves() {
            if let Clause::ProcDecl { name, params, .. } = clause {
                arities.entry(name).or_default().insert(params.len());
            }
        }
    }

    let mut findings = Vec::new();
    for call in &parsed.calls {
        let known = match arities.get(call.name.as_str()) {
            Some(set) => set.clone(),
            None => match builtin_arity(&call.name) {
                Some(n) => BTreeSet::from([n]),
                None => continue,
            },
        };
        if !known.contains(&call.arity) {
            let expected: Vec<String> = known.iter().map(usize::to_string).collect();
            findings.push(Finding {
                line: call.line,
                column: call.column,
                message: format!(
                    "`{}` called with {} argument(s), expected {}",
                    call.name,
                    call.arity,
                    expected.join(" or ")
                ),
            });
        }
    }
    findings
}
