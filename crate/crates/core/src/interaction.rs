//! User moves over the declarations, and the sources that supply them.
//!
//! A user move resolves exactly one pending choice declaration: the
//! leftmost one. Declarations that are plain clauses admit no move, so a
//! store without pending choices yields `moved == false` and comes back
//! unchanged.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::events::{Event, EventSink};
use crate::state::ProgramStore;
use crate::syntax::compact_dformula;

/// A request for the user to pick one alternative of a choice declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoicePrompt {
    /// Unique and increasing within a session.
    pub choice_id: u64,
    /// Single-line rendering of each alternative.
    pub alternatives: Vec<String>,
    /// Index of the choice declaration among the program's declarations.
    pub path: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error("no more choices available")]
    Exhausted,
    #[error("aborted")]
    Aborted,
}

/// Supplies the user's answers to choice prompts.
pub trait ChoiceSource {
    /// Returns a 0-based alternative index. Implementations may return an
    /// index out of range; [`user_move`] rejects it.
    fn next_choice(&mut self, prompt: &ChoicePrompt) -> Result<usize, SourceError>;
}

impl<S: ChoiceSource + ?Sized> ChoiceSource for &mut S {
    fn next_choice(&mut self, prompt: &ChoicePrompt) -> Result<usize, SourceError> {
        (**self).next_choice(prompt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InteractionError {
    #[error("no more choices available for choice {choice_id}")]
    Exhausted { choice_id: u64 },
    #[error("choice {choice_id} has {alternatives} alternatives, got index {index}")]
    OutOfRange {
        choice_id: u64,
        index: usize,
        alternatives: usize,
    },
    #[error("aborted")]
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveResult {
    pub store: ProgramStore,
    /// Whether a choice declaration was resolved.
    pub moved: bool,
}

/// Lets the user resolve the leftmost pending choice declaration.
pub fn user_move(
    store: &ProgramStore,
    choice_id: u64,
    source: &mut dyn ChoiceSource,
    events: &mut dyn EventSink,
) -> Result<MoveResult, InteractionError> {
    let Some((path, alts)) = store.first_unresolved() else {
        return Ok(MoveResult {
            store: store.clone(),
            moved: false,
        });
    };
    let prompt = ChoicePrompt {
        choice_id,
        alternatives: alts.iter().map(compact_dformula).collect(),
        path,
    };
    events.emit(Event::UserPrompt(prompt.clone()));
    let index = source.next_choice(&prompt).map_err(|e| match e {
        SourceError::Exhausted => InteractionError::Exhausted { choice_id },
        SourceError::Aborted => InteractionError::Aborted,
    })?;
    let Some(resolved) = store.resolve(path, index) else {
        return Err(InteractionError::OutOfRange {
            choice_id,
            index,
            alternatives: alts.len(),
        });
    };
    events.emit(Event::UserResolved { choice_id, index });
    Ok(MoveResult {
        store: resolved,
        moved: true,
    })
}

/// Replays a fixed list of answers, then reports exhaustion.
#[derive(Debug, Clone, Default)]
pub struct ScriptedSource {
    indices: VecDeque<usize>,
}

impl ScriptedSource {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        ScriptedSource {
            indices: indices.into_iter().collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.indices.len()
    }
}

pub fn scripted_source(indices: impl IntoIterator<Item = usize>) -> ScriptedSource {
    ScriptedSource::new(indices)
}

impl ChoiceSource for ScriptedSource {
    fn next_choice(&mut self, _prompt: &ChoicePrompt) -> Result<usize, SourceError> {
        self.indices.pop_front().ok_or(SourceError::Exhausted)
    }
}

/// Asks a human through a line-oriented text stream, using a numbered
/// menu starting at 1. Invalid answers are re-prompted.
pub struct InteractiveSource<R, W> {
    input: R,
    output: W,
}

pub fn interactive_source<R: BufRead, W: Write>(input: R, output: W) -> InteractiveSource<R, W> {
    InteractiveSource { input, output }
}

impl<R: BufRead, W: Write> InteractiveSource<R, W> {
    pub fn into_inner(self) -> (R, W) {
        (self.input, self.output)
    }

    fn ask(&mut self, prompt: &ChoicePrompt) -> std::io::Result<Option<usize>> {
        let n = prompt.alternatives.len();
        writeln!(self.output, "choose one:")?;
        for (i, alt) in prompt.alternatives.iter().enumerate() {
            writeln!(self.output, "  {}) {alt}", i + 1)?;
        }
        loop {
            write!(self.output, "> ")?;
            self.output.flush()?;
            let mut line = String::new();
            if self.input.read_line(&mut line)? == 0 {
                return Ok(None);
            }
            match line.trim().parse::<usize>() {
                Ok(k) if (1..=n).contains(&k) => return Ok(Some(k - 1)),
                _ => writeln!(self.output, "please enter a number from 1 to {n}")?,
            }
        }
    }
}

impl<R: BufRead, W: Write> ChoiceSource for InteractiveSource<R, W> {
    fn next_choice(&mut self, prompt: &ChoicePrompt) -> Result<usize, SourceError> {
        match self.ask(prompt) {
            Ok(Some(index)) => Ok(index),
            Ok(None) | Err(_) => Err(SourceError::Exhausted),
        }
    }
}
