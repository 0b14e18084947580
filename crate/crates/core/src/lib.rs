//! An interpreter for a core imperative language extended with choice.
//!
//! Programs declare constants and procedures, possibly under a choice
//! declaration (`choose { A | B }`) that the *user* resolves, and run a
//! main statement whose choice statements (`choose { guard -> body | ... }`)
//! the *machine* resolves by picking the branch whose guard holds. Which
//! player moves next is decided by the stability of the program.
//!
//! ```
//! use choo::{parse_program, run_program, scripted_source, Event, ExecOptions};
//!
//! let program = parse_program(r#"
//!     choose { const major == "english" | const major == "medical" }
//!     main {
//!       choose { major == "english" -> fee = 2000 | major == "medical" -> fee = 4000 };
//!       print(fee)
//!     }
//! "#).unwrap();
//! let mut events = Vec::new();
//! let outcome = run_program(&program, &mut scripted_source([1]), &mut events, ExecOptions::default());
//! assert!(outcome.is_success());
//! assert!(events.contains(&Event::Output { text: "4000".into() }));
//! ```

pub mod check;
pub mod engine;
pub mod events;
pub mod interaction;
pub mod session;
pub mod state;
pub mod syntax;

pub use engine::{
    elementarize_goal, elementarize_program, execute, is_stable, run_program, ExecOptions,
    ExecOutcome, FailureReason, Machine, StabilityVerdict,
};
pub use events::{Event, EventSink, NullSink};
pub use interaction::{
    interactive_source, scripted_source, user_move, ChoicePrompt, ChoiceSource, InteractionError,
    MoveResult, ScriptedSource, SourceError,
};
pub use session::{run_session, SessionCommand, SessionEvent, Status, Transport};
pub use state::{BindError, EvalError, MachineState, ProgramStore, Value};
pub use syntax::{parse_program, pretty_print, ParseError, SourceProgram};
