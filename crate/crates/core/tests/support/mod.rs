//! Test support shared by the core integration tests and the acceptance
//! suite: the example corpus, a generated program family with a
//! brute-force oracle, and random stores for user-move properties.
//!
//! The oracle works from the family description directly and never calls
//! into the interpreter's parser or evaluator.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use rand::Rng;

use choo::syntax::{Clause, DFormula, Expr};
use choo::ProgramStore;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../programs"))
}

/// `(file name, source)` for every `.choo` file in the corpus, sorted.
pub fn corpus() -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "choo"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

pub fn corpus_file(name: &str) -> String {
    fs::read_to_string(corpus_dir().join(name)).unwrap()
}

#[derive(Debug, Clone)]
pub enum DeclSpec {
    Plain { var: String, value: i64 },
    Choice { var: String, values: Vec<i64> },
}

/// A branch whose guard is the conjunction `var == value` over `conds`
/// (`true` when empty) and whose body assigns `value` to the choice's
/// result variable.
#[derive(Debug, Clone)]
pub struct BranchSpec {
    pub conds: Vec<(String, i64)>,
    pub value: i64,
}

#[derive(Debug, Clone)]
pub struct FamilyProgram {
    pub decls: Vec<DeclSpec>,
    /// One or two choice statements, run in sequence; the first assigns
    /// `r`, the second `s`.
    pub choices: Vec<Vec<BranchSpec>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Success(BTreeMap<String, i64>),
    NoTrueBranch,
    Exclusivity(Vec<usize>),
}

const RESULT_VARS: [&str; 2] = ["r", "s"];

impl FamilyProgram {
    pub fn random(rng: &mut impl Rng) -> Self {
        let n_choice = rng.random_range(0..=3);
        let n_plain = rng.random_range(0..=2);
        let mut decls = Vec::new();
        for i in 0..n_choice {
            let n_alts = rng.random_range(2..=3);
            decls.push(DeclSpec::Choice {
                var: format!("c{i}"),
                values: (0..n_alts).map(|_| rng.random_range(0..3)).collect(),
            });
        }
        for i in 0..n_plain {
            let at = rng.random_range(0..=decls.len());
            decls.insert(
                at,
                DeclSpec::Plain {
                    var: format!("p{i}"),
                    value: rng.random_range(0..3),
                },
            );
        }
        let vars: Vec<String> = decls
            .iter()
            .map(|d| match d {
                DeclSpec::Plain { var, .. } | DeclSpec::Choice { var, .. } => var.clone(),
            })
            .collect();
        let n_stmts = rng.random_range(1..=2);
        let choices = (0..n_stmts)
            .map(|_| {
                let n_branches = rng.random_range(1..=4);
                (0..n_branches)
                    .map(|_| {
                        let n_conds = if vars.is_empty() {
                            0
                        } else {
                            rng.random_range(0..=2.min(vars.len()))
                        };
                        let conds = (0..n_conds)
                            .map(|_| {
                                let v = &vars[rng.random_range(0..vars.len())];
                                (v.clone(), rng.random_range(0..3))
                            })
                            .collect();
                        BranchSpec {
                            conds,
                            value: rng.random_range(0..100),
                        }
                    })
                    .collect()
            })
            .collect();
        FamilyProgram { decls, choices }
    }

    pub fn source(&self) -> String {
        let mut out = String::new();
        for d in &self.decls {
            match d {
                DeclSpec::Plain { var, value } => out.push_str(&format!("const {var} == {value};\n")),
                DeclSpec::Choice { var, values } => {
                    let alts: Vec<String> = values.iter().map(|v| format!("const {var} == {v}")).collect();
                    out.push_str(&format!("choose {{ {} }}\n", alts.join(" | ")));
                }
            }
        }
        let stmts: Vec<String> = self
            .choices
            .iter()
            .zip(RESULT_VARS)
            .map(|(branches, target)| {
                let bs: Vec<String> = branches
                    .iter()
                    .map(|b| {
                        let guard = if b.conds.is_empty() {
                            "true".to_string()
                        } else {
                            b.conds
                                .iter()
                                .map(|(v, k)| format!("{v} == {k}"))
                                .collect::<Vec<_>>()
                                .join(" && ")
                        };
                        format!("{guard} -> {target} = {}", b.value)
                    })
                    .collect();
                format!("choose {{ {} }}", bs.join(" | "))
            })
            .collect();
        out.push_str(&format!("main {{ {} }}\n", stmts.join("; ")));
        out
    }

    /// Alternative counts of the choice declarations, in order.
    pub fn arities(&self) -> Vec<usize> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                DeclSpec::Choice { values, .. } => Some(values.len()),
                DeclSpec::Plain { .. } => None,
            })
            .collect()
    }

    /// Every complete script: one index per choice declaration.
    pub fn scripts(&self) -> Vec<Vec<usize>> {
        let mut scripts = vec![vec![]];
        for n in self.arities() {
            scripts = scripts
                .into_iter()
                .flat_map(|s| {
                    (0..n).map(move |k| {
                        let mut s = s.clone();
                        s.push(k);
                        s
                    })
                })
                .collect();
        }
        scripts
    }

    /// Brute force: resolve the declarations per `script`, then select
    /// branches by direct comparison.
    pub fn oracle(&self, script: &[usize]) -> Expected {
        let mut env = BTreeMap::new();
        let mut picks = script.iter();
        for d in &self.decls {
            match d {
                DeclSpec::Plain { var, value } => {
                    env.insert(var.clone(), *value);
                }
                DeclSpec::Choice { var, values } => {
                    env.insert(var.clone(), values[*picks.next().unwrap()]);
                }
            }
        }
        let mut theta = BTreeMap::new();
        for (branches, target) in self.choices.iter().zip(RESULT_VARS) {
            let holding: Vec<usize> = branches
                .iter()
                .enumerate()
                .filter(|(_, b)| b.conds.iter().all(|(v, k)| env[v] == *k))
                .map(|(i, _)| i)
                .collect();
            match holding.as_slice() {
                [] => return Expected::NoTrueBranch,
                [k] => {
                    theta.insert(target.to_string(), branches[*k].value);
                }
                _ => return Expected::Exclusivity(holding),
            }
        }
        Expected::Success(theta)
    }
}

/// A random store of plain constants and flat choice declarations (every
/// alternative a clause).
pub fn random_flat_store(rng: &mut impl Rng) -> ProgramStore {
    let n = rng.random_range(0..=6);
    let decls = (0..n)
        .map(|i| {
            let name = format!("k{i}");
            if rng.random_bool(0.6) {
                let alts = rng.random_range(2..=4);
                DFormula::ChoiceDecl(
                    (0..alts)
                        .map(|a| DFormula::Plain(Clause::constant(name.clone(), Expr::IntLit(a))))
                        .collect(),
                )
            } else {
                DFormula::Plain(Clause::constant(name, Expr::IntLit(i as i64)))
            }
        })
        .collect();
    ProgramStore::new(decls)
}
