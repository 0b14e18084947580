use std::io::{self, BufReader};
use std::net::{Shutdown, TcpListener, TcpStream};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use tungstenite::{Message, WebSocket};

use choo::session::{run_session, LineTransport, Status, Transport};
use choo::{ExecOptions, SourceProgram};

const UPGRADE_WAIT: Duration = Duration::from_millis(250);

pub fn serve_stdio(program: &SourceProgram, trace: bool, options: ExecOptions) -> u8 {
    eprintln!("session stdio: started");
    let stdin = io::stdin();
    let mut transport = LineTransport::new(stdin.lock(), io::stdout().lock());
    let status = run_session(program, &mut transport, trace, options);
    eprintln!("session stdio: finished ({})", status_text(status));
    match status {
        Status::Success => 0,
        Status::Failure => 1,
    }
}

pub fn serve_port(program: SourceProgram, port: u16, trace: bool, options: ExecOptions) -> u8 {
    let listener = match TcpListener::bind(("127.0.0.1", port)) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind 127.0.0.1:{port}: {e}");
            return 2;
        }
    };
    match listener.local_addr() {
        Ok(addr) => eprintln!("listening on {addr}"),
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    }
    let program = Arc::new(program);
    let counter = AtomicU64::new(0);
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        let id = counter.fetch_add(1, Ordering::Relaxed);
        let program = Arc::clone(&program);
        thread::spawn(move || {
            let peer = stream
                .peer_addr()
                .map(|a| a.to_string())
                .unwrap_or_else(|_| "?".into());
            eprintln!("session {id} ({peer}): started");
            match serve_connection(&program, stream, trace, options) {
                Ok(status) => eprintln!("session {id}: finished ({})", status_text(status)),
                Err(e) => eprintln!("session {id}: error: {e}"),
            }
        });
    }
    0
}

fn status_text(status: Status) -> &'static str {
    match status {
        Status::Success => "success",
        Status::Failure => "failure",
    }
}

/// Serves one session on an accepted connection, as a WebSocket if the
/// client opens with an HTTP request, otherwise as raw NDJSON lines.
fn serve_connection(
    program: &SourceProgram,
    stream: TcpStream,
    trace: bool,
    options: ExecOptions,
) -> io::Result<Status> {
    // raw clients wait for the server to speak first, so only wait briefly
    stream.set_read_timeout(Some(UPGRADE_WAIT))?;
    let mut head = [0u8; 4];
    let n = match stream.peek(&mut head) {
        Ok(n) => n,
        Err(e) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => 0,
        Err(e) => return Err(e),
    };
    stream.set_read_timeout(None)?;
    if &head[..n] == b"GET " {
        let ws = tungstenite::accept(stream).map_err(io::Error::other)?;
        let mut transport = WsTransport { ws };
        let status = run_session(program, &mut transport, trace, options);
        let _ = transport.ws.close(None);
        let _ = transport.ws.flush();
        return Ok(status);
    }
    let reader = BufReader::new(stream.try_clone()?);
    let mut transport = LineTransport::new(reader, stream.try_clone()?);
    let status = run_session(program, &mut transport, trace, options);
    let _ = stream.shutdown(Shutdown::Both);
    Ok(status)
}

struct WsTransport {
    ws: WebSocket<TcpStream>,
}

impl Transport for WsTransport {
    fn send(&mut self, message: &str) -> io::Result<()> {
        self.ws
            .send(Message::text(message))
            .map_err(io::Error::other)
    }

    fn recv(&mut self) -> io::Result<Option<String>> {
        loop {
            match self.ws.read() {
                Ok(Message::Text(text)) => return Ok(Some(text.to_string())),
                Ok(Message::Binary(bytes)) => {
                    return String::from_utf8(bytes.to_vec())
                        .map(Some)
                        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
                }
                Ok(Message::Close(_)) => return Ok(None),
                Ok(_) => continue,
                Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => {
                    return Ok(None)
                }
                Err(e) => return Err(io::Error::other(e)),
            }
        }
    }
}
