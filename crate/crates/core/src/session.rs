//! Execution sessions over a message channel.
//!
//! The wire format is newline-delimited JSON, one object per line, with a
//! `"type"` field naming the variant. The server streams [`SessionEvent`]s;
//! whenever a `choice_request` is outstanding it waits for the client's
//! matching `choice_response` (or an `abort`). Bad responses are answered
//! with an `error` message and the same request is sent again. `done` is
//! always the last message of a session.

use std::cell::RefCell;
use std::collections::{BTreeMap, VecDeque};
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::engine::{run_program, ExecOptions, ExecOutcome};
use crate::events::{Event, EventSink};
use crate::interaction::{ChoicePrompt, ChoiceSource, SourceError};
use crate::syntax::SourceProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Success,
    Failure,
}

/// Server-to-client messages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SessionEvent {
    ChoiceRequest {
        choice_id: u64,
        alternatives: Vec<String>,
    },
    Output {
        text: String,
    },
    MachineMove {
        branch_index: usize,
        guard_text: String,
    },
    UserResolved {
        choice_id: u64,
        index: usize,
    },
    State {
        bindings: BTreeMap<String, String>,
    },
    Warning {
        message: String,
    },
    Done {
        status: Status,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
    Error {
        code: String,
        message: String,
    },
}

/// Client-to-server messages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SessionCommand {
    ChoiceResponse { choice_id: i64, index: i64 },
    Abort,
}

impl SessionEvent {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("session events always serialize")
    }

    /// The wire form of an engine event. `trace == false` drops machine
    /// moves, user resolutions and state snapshots.
    pub fn from_event(event: &Event, trace: bool) -> Option<SessionEvent> {
        Some(match event {
            Event::UserPrompt(prompt) => SessionEvent::ChoiceRequest {
                choice_id: prompt.choice_id,
                alternatives: prompt.alternatives.clone(),
            },
            Event::Output { text } => SessionEvent::Output { text: text.clone() },
            Event::Warning { message } => SessionEvent::Warning {
                message: message.clone(),
            },
            Event::Done { success, reason } => SessionEvent::Done {
                status: if *success {
                    Status::Success
                } else {
                    Status::Failure
                },
                reason: reason.clone(),
            },
            _ if !trace => return None,
            Event::MachineMove {
                branch_index,
                guard_text,
            } => SessionEvent::MachineMove {
                branch_index: *branch_index,
                guard_text: guard_text.clone(),
            },
            Event::UserResolved { choice_id, index } => SessionEvent::UserResolved {
                choice_id: *choice_id,
                index: *index,
            },
            Event::State { bindings } => SessionEvent::State {
                bindings: bindings.clone(),
            },
        })
    }
}

impl SessionCommand {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("session commands always serialize")
    }
}

/// A duplex channel carrying whole lines (messages) in order.
pub trait Transport {
    fn send(&mut self, message: &str) -> io::Result<()>;
    /// The next message, or `None` once the peer has closed its side.
    fn recv(&mut self) -> io::Result<Option<String>>;
}

impl<T: Transport + ?Sized> Transport for &mut T {
    fn send(&mut self, message: &str) -> io::Result<()> {
        (**self).send(message)
    }

    fn recv(&mut self) -> io::Result<Option<String>> {
        (**self).recv()
    }
}

/// Newline-delimited messages over a reader/writer pair (stdio, sockets).
pub struct LineTransport<R, W> {
    reader: R,
    writer: W,
}

impl<R: BufRead, W: Write> LineTransport<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        LineTransport { reader, writer }
    }

    pub fn into_inner(self) -> (R, W) {
        (self.reader, self.writer)
    }
}

impl<R: BufRead, W: Write> Transport for LineTransport<R, W> {
    fn send(&mut self, message: &str) -> io::Result<()> {
        self.writer.write_all(message.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()
    }

    fn recv(&mut self) -> io::Result<Option<String>> {
        loop {
            let mut line = String::new();
            if self.reader.read_line(&mut line)? == 0 {
                return Ok(None);
            }
            let line = line.trim_end_matches(['\n', '\r']);
            if !line.trim().is_empty() {
                return Ok(Some(line.to_string()));
            }
        }
    }
}

/// Which side sent a transcript line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ServerToClient,
    ClientToServer,
}

/// An in-memory client that answers with a fixed queue of messages and
/// records the full conversation.
#[derive(Debug, Default, Clone)]
pub struct ScriptedClient {
    replies: VecDeque<String>,
    pub transcript: Vec<(Direction, String)>,
}

impl ScriptedClient {
    pub fn new(replies: impl IntoIterator<Item = String>) -> Self {
        ScriptedClient {
            replies: replies.into_iter().collect(),
            transcript: Vec::new(),
        }
    }

    /// A client that answers successive choice requests with `indices`,
    /// numbering responses from choice id 0.
    pub fn answering(indices: &[usize]) -> Self {
        Self::new(indices.iter().enumerate().map(|(id, &index)| {
            SessionCommand::ChoiceResponse {
                choice_id: id as i64,
                index: index as i64,
            }
            .to_line()
        }))
    }

    pub fn transcript_lines(&self) -> Vec<&str> {
        self.transcript.iter().map(|(_, l)| l.as_str()).collect()
    }

    pub fn server_messages(&self) -> Vec<SessionEvent> {
        self.transcript
            .iter()
            .filter(|(d, _)| *d == Direction::ServerToClient)
            .map(|(_, l)| serde_json::from_str(l).expect("server sent valid JSON"))
            .collect()
    }
}

impl Transport for ScriptedClient {
    fn send(&mut self, message: &str) -> io::Result<()> {
        self.transcript
            .push((Direction::ServerToClient, message.to_string()));
        Ok(())
    }

    fn recv(&mut self) -> io::Result<Option<String>> {
        let reply = self.replies.pop_front();
        if let Some(line) = &reply {
            self.transcript
                .push((Direction::ClientToServer, line.clone()));
        }
        Ok(reply)
    }
}

struct Wire<'t> {
    transport: &'t mut dyn Transport,
    trace: bool,
    broken: bool,
}

impl Wire<'_> {
    fn send(&mut self, event: &SessionEvent) {
        if self.broken {
            return;
        }
        if self.transport.send(&event.to_line()).is_err() {
            self.broken = true;
        }
    }

    fn send_error(&mut self, code: &str, message: String) {
        self.send(&SessionEvent::Error {
            code: code.to_string(),
            message,
        });
    }
}

struct WireSink<'a, 't>(&'a RefCell<Wire<'t>>);

impl EventSink for WireSink<'_, '_> {
    fn emit(&mut self, event: Event) {
        let mut wire = self.0.borrow_mut();
        if let Some(message) = SessionEvent::from_event(&event, wire.trace) {
            wire.send(&message);
        }
    }
}

struct WireSource<'a, 't>(&'a RefCell<Wire<'t>>);

impl ChoiceSource for WireSource<'_, '_> {
    fn next_choice(&mut self, prompt: &ChoicePrompt) -> Result<usize, SourceError> {
        let mut wire = self.0.borrow_mut();
        loop {
            if wire.broken {
                return Err(SourceError::Exhausted);
            }
            let line = match wire.transport.recv() {
                Ok(Some(line)) => line,
                Ok(None) | Err(_) => return Err(SourceError::Exhausted),
            };
            match serde_json::from_str::<SessionCommand>(&line) {
                Ok(SessionCommand::Abort) => return Err(SourceError::Aborted),
                Ok(SessionCommand::ChoiceResponse { choice_id, index }) => {
                    let n = prompt.alternatives.len();
                    if choice_id < 0 || choice_id as u64 != prompt.choice_id {
                        wire.send_error(
                            "bad_choice_id",
                            format!(
                                "outstanding choice is {}, got {choice_id}",
                                prompt.choice_id
                            ),
                        );
                    } else if index < 0 || index as usize >= n {
                        wire.send_error(
                            "index_out_of_range",
                            format!("choice {choice_id} has {n} alternatives, got index {index}"),
                        );
                    } else {
                        return Ok(index as usize);
                    }
                }
                Err(e) => wire.send_error("bad_message", e.to_string()),
            }
            wire.send(&SessionEvent::ChoiceRequest {
                choice_id: prompt.choice_id,
                alternatives: prompt.alternatives.clone(),
            });
        }
    }
}

/// Runs `program` as one session over `transport`. Returns the terminal
/// status; the outcome (with the final store) is available through
/// [`run_session_outcome`].
pub fn run_session(
    program: &SourceProgram,
    transport: &mut dyn Transport,
    trace: bool,
    options: ExecOptions,
) -> Status {
    match run_session_outcome(program, transport, trace, options) {
        ExecOutcome::Success(_) => Status::Success,
        ExecOutcome::Failure(_) => Status::Failure,
    }
}

pub fn run_session_outcome(
    program: &SourceProgram,
    transport: &mut dyn Transport,
    trace: bool,
    options: ExecOptions,
) -> ExecOutcome {
    let wire = RefCell::new(Wire {
        transport,
        trace,
        broken: false,
    });
    let mut source = WireSource(&wire);
    let mut sink = WireSink(&wire);
    run_program(program, &mut source, &mut sink, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn example2() -> SourceProgram {
        parse_program(
            r#"choose { const major == "english" | const major == "medical" | const major == "liberal" }
               main {
                 choose {
                   major == "english" -> tuition = 2000
                   | major == "medical" -> tuition = 4000
                   | major == "liberal" -> tuition = 2200
                 };
                 print(tuition)
               }"#,
        )
        .unwrap()
    }

    #[test]
    fn wire_shapes() {
        assert_eq!(
            SessionEvent::Done {
                status: Status::Success,
                reason: None
            }
            .to_line(),
            r#"{"type":"done","status":"success"}"#
        );
        assert_eq!(
            SessionEvent::Done {
                status: Status::Failure,
                reason: Some("aborted".into())
            }
            .to_line(),
            r#"{"type":"done","status":"failure","reason":"aborted"}"#
        );
        assert_eq!(
            SessionCommand::ChoiceResponse {
                choice_id: 0,
                index: 1
            }
            .to_line(),
            r#"{"type":"choice_response","choice_id":0,"index":1}"#
        );
        assert_eq!(
            serde_json::from_str::<SessionCommand>(r#"{"type":"abort"}"#).unwrap(),
            SessionCommand::Abort
        );
        assert_eq!(
            SessionEvent::MachineMove {
                branch_index: 1,
                guard_text: "x == 1".into()
            }
            .to_line(),
            r#"{"type":"machine_move","branch_index":1,"guard_text":"x == 1"}"#
        );
    }

    #[test]
    fn traced_session_event_order() {
        let mut client = ScriptedClient::answering(&[1]);
        let status = run_session(&example2(), &mut client, true, ExecOptions::default());
        assert_eq!(status, Status::Success);
        let kinds: Vec<String> = client
            .server_messages()
            .iter()
            .map(|m| {
                serde_json::to_value(m).unwrap()["type"]
                    .as_str()
                    .unwrap()
                    .to_string()
            })
            .collect();
        assert_eq!(
            kinds,
            ["choice_request", "user_resolved", "machine_move", "state", "output", "done"]
        );
        assert!(client.server_messages().contains(&SessionEvent::MachineMove {
            branch_index: 1,
            guard_text: r#"major == "medical""#.into()
        }));
    }

    #[test]
    fn stale_choice_id_is_answered_and_prompt_reissued() {
        let mut client = ScriptedClient::new([
            r#"{"type":"choice_response","choice_id":7,"index":1}"#.to_string(),
            r#"{"type":"choice_response","choice_id":0,"index":5}"#.to_string(),
            "not json".to_string(),
            r#"{"type":"choice_response","choice_id":0,"index":2}"#.to_string(),
        ]);
        let status = run_session(&example2(), &mut client, false, ExecOptions::default());
        assert_eq!(status, Status::Success);
        let msgs = client.server_messages();
        let codes: Vec<&str> = msgs
            .iter()
            .filter_map(|m| match m {
                SessionEvent::Error { code, .. } => Some(code.as_str()),
                _ => None,
            })
            .collect();
        assert_eq!(codes, ["bad_choice_id", "index_out_of_range", "bad_message"]);
        let requests = msgs
            .iter()
            .filter(|m| matches!(m, SessionEvent::ChoiceRequest { .. }))
            .count();
        assert_eq!(requests, 4);
        assert!(msgs.contains(&SessionEvent::Output {
            text: "2200".into()
        }));
    }

    #[test]
    fn abort_ends_with_failure() {
        let mut client = ScriptedClient::new([SessionCommand::Abort.to_line()]);
        let status = run_session(&example2(), &mut client, false, ExecOptions::default());
        assert_eq!(status, Status::Failure);
        assert_eq!(
            client.server_messages().last(),
            Some(&SessionEvent::Done {
                status: Status::Failure,
                reason: Some("aborted".into())
            })
        );
    }

    #[test]
    fn closed_client_exhausts_the_source() {
        let mut client = ScriptedClient::new([]);
        assert_eq!(
            run_session(&example2(), &mut client, false, ExecOptions::default()),
            Status::Failure
        );
        let Some(SessionEvent::Done { reason, .. }) = client.server_messages().pop() else {
            panic!("missing done");
        };
        assert!(reason.unwrap().starts_with("choice_source_exhausted"));
    }

    #[test]
    fn line_transport_over_buffers() {
        let input = b"\n{\"type\":\"choice_response\",\"choice_id\":0,\"index\":1}\r\n";
        let mut transport = LineTransport::new(&input[..], Vec::new());
        let status = run_session(&example2(), &mut transport, false, ExecOptions::default());
        assert_eq!(status, Status::Success);
        let (_, out) = transport.into_inner();
        let out = String::from_utf8(out).unwrap();
        assert_eq!(out.lines().count(), 3);
        assert!(out.ends_with("{\"type\":\"done\",\"status\":\"success\"}\n"));
    }
}
