use std::collections::BTreeMap;

use crate::interaction::ChoicePrompt;

/// Observable steps of an execution, reported in the order they happen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    /// The machine committed to the branch whose guard held.
    MachineMove { branch_index: usize, guard_text: String },
    /// The user is asked to resolve a pending choice declaration.
    UserPrompt(ChoicePrompt),
    UserResolved { choice_id: u64, index: usize },
    Output { text: String },
    /// Machine state after an assignment, rendered as display text.
    State { bindings: BTreeMap<String, String> },
    Warning { message: String },
    Done { success: bool, reason: Option<String> },
}

pub trait EventSink {
    fn emit(&mut self, event: Event);
}

impl EventSink for Vec<Event> {
    fn emit(&mut self, event: Event) {
        self.push(event);
    }
}

/// Discards every event.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl EventSink for NullSink {
    fn emit(&mut self, _event: Event) {}
}

impl<F: FnMut(Event)> EventSink for F {
    fn emit(&mut self, event: Event) {
        self(event)
    }
}
