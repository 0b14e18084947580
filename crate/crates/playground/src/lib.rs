//! Browser bindings for the interpreter.
//!
//! The page keeps the user's answers so far and re-runs the program with
//! them after every click; the run stops at the first unanswered prompt,
//! which the page shows as the pending choice. All functions take and
//! return JSON strings.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use choo::check::check_source;
use choo::{
    is_stable, parse_program, pretty_print, run_program, scripted_source, Event, ExecOptions,
    ExecOutcome, FailureReason, ProgramStore, SessionEvent,
};

/// Runs `source` answering prompts with `choices` in order.
///
/// Returns `{"events": [...], "pending": prompt | null, "error": msg | null}`.
/// Events use the session wire format with tracing on. When the answers
/// run out, the trailing `done` is dropped and the unanswered
/// `choice_request` is returned as `pending`.
pub fn run_json(source: &str, choices: &[usize], first_match: bool) -> Value {
    let program = match parse_program(source) {
        Ok(p) => p,
        Err(e) => return json!({"events": [], "pending": null, "error": e.to_string()}),
    };
    let mut events: Vec<Event> = Vec::new();
    let outcome = run_program(
        &program,
        &mut scripted_source(choices.to_vec()),
        &mut events,
        ExecOptions { first_match },
    );
    let waiting = matches!(outcome, ExecOutcome::Failure(FailureReason::ChoiceSourceExhausted(_)));
    if waiting {
        events.pop();
    }
    let mut messages: Vec<Value> = events
        .iter()
        .filter_map(|e| SessionEvent::from_event(e, true))
        .map(|m| serde_json::to_value(m).expect("session events serialize"))
        .collect();
    let pending = if waiting { messages.pop() } else { None };
    json!({"events": messages, "pending": pending, "error": null})
}

/// Static findings plus the stability of the initial program.
pub fn analyze_json(source: &str) -> Value {
    let findings: Vec<Value> = check_source(source)
        .into_iter()
        .map(|f| json!({"line": f.line, "column": f.column, "message": f.message}))
        .collect();
    let stability = parse_program(source).ok().map(|program| {
        let store = ProgramStore::from_program(&program);
        let verdict = is_stable(&store, &program.main);
        json!({
            "stable": verdict.stable,
            "witness": verdict.witness,
            "pending_choices": store.unresolved_count(),
        })
    });
    json!({"findings": findings, "stability": stability})
}

/// Canonical layout, or the parse error.
pub fn format_json(source: &str) -> Value {
    match parse_program(source) {
        Ok(program) => json!({"text": pretty_print(&program), "error": null}),
        Err(e) => json!({"text": null, "error": e.to_string()}),
    }
}

/// `choices` is a comma-separated list of 0-based answers.
#[wasm_bindgen]
pub fn run(source: &str, choices: &str, first_match: bool) -> String {
    let parsed: Result<Vec<usize>, _> = choices
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    match parsed {
        Ok(indices) => run_json(source, &indices, first_match).to_string(),
        Err(e) => json!({"events": [], "pending": null, "error": format!("bad choices: {e}")}).to_string(),
    }
}

#[wasm_bindgen]
pub fn analyze(source: &str) -> String {
    analyze_json(source).to_string()
}

#[wasm_bindgen]
pub fn format(source: &str) -> String {
    format_json(source).to_string()
}
