use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Child, Command, Output, Stdio};

use serde_json::{json, Value};
use tungstenite::Message;

fn choo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_choo"))
}

fn program(name: &str) -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../programs")).join(name)
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = choo()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn temp_program(source: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::Builder::new().suffix(".choo").tempfile().unwrap();
    file.write_all(source.as_bytes()).unwrap();
    file
}

#[test]
fn fixed_tuition_prints_without_prompting() {
    let path = program("tuition_fixed.choo");
    let out = run_with_stdin(&["run", path.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), "4000\n");
    assert_eq!(text(&out.stderr), "");
}

#[test]
fn scripted_tuition_choices() {
    let path = program("tuition_interactive.choo");
    for (choice, expected) in [("0", "2000\n"), ("1", "4000\n"), ("2", "2200\n")] {
        let out = run_with_stdin(&["run", path.to_str().unwrap(), "--choices", choice], "");
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(text(&out.stdout), expected);
    }
}

#[test]
fn out_of_range_choice_fails() {
    let path = program("tuition_interactive.choo");
    let out = run_with_stdin(&["run", path.to_str().unwrap(), "--choices", "9"], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("index_out_of_range"), "{}", text(&out.stderr));
}

#[test]
fn interactive_prompt_reads_one_based_answers() {
    let path = program("tuition_interactive.choo");
    let out = run_with_stdin(&["run", path.to_str().unwrap()], "banana\n3\n");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), "2200\n");
    let err = text(&out.stderr);
    assert!(err.contains("1) const major == \"english\""), "{err}");
    assert!(err.contains("please enter a number from 1 to 3"), "{err}");
}

#[test]
fn interactive_prompt_at_eof_fails() {
    let path = program("tuition_interactive.choo");
    let out = run_with_stdin(&["run", path.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("choice_source_exhausted"));
}

#[test]
fn nested_menu_takes_two_answers() {
    let path = program("nested_menu.choo");
    let out = run_with_stdin(&["run", path.to_str().unwrap(), "--choices", "1,1"], "");
    assert_eq!(text(&out.stdout), "coffee\n5\n");
}

#[test]
fn overlapping_guards() {
    let path = program("overlap.choo");
    let out = run_with_stdin(&["run", path.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("exclusivity_violation"));

    let out = run_with_stdin(&["run", path.to_str().unwrap(), "--first-match"], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), "pass\n");
    assert!(text(&out.stderr).starts_with("warning: "));
}

#[test]
fn trace_reports_moves_as_json_lines() {
    let path = program("tuition_interactive.choo");
    let out = run_with_stdin(&["run", path.to_str().unwrap(), "--choices", "1", "--trace"], "");
    let kinds: Vec<String> = text(&out.stderr)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["type"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(kinds, ["choice_request", "user_resolved", "machine_move", "state", "done"]);
}

#[test]
fn parse_errors_exit_2_with_position() {
    let file = temp_program("main { x = }\n");
    let out = run_with_stdin(&["run", file.path().to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains(":1:12:"), "{}", text(&out.stderr));
}

#[test]
fn missing_file_exits_2() {
    let out = run_with_stdin(&["run", "/nonexistent/x.choo"], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_reports_arity_problems() {
    let file = temp_program("main { print() }\n");
    let out = run_with_stdin(&["check", file.path().to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("print"));

    let file = temp_program("proc p() = { skip };\nproc p() = { skip };\nmain { p() }\n");
    let out = run_with_stdin(&["check", file.path().to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));

    for name in ["tuition_fixed.choo", "greeting.choo", "lottery.choo"] {
        let path = program(name);
        let out = run_with_stdin(&["check", path.to_str().unwrap()], "");
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
}

#[test]
fn fmt_prints_and_rewrites() {
    let file = temp_program("main{x=1;print(x)}");
    let path = file.path().to_str().unwrap();
    let out = run_with_stdin(&["fmt", path], "");
    let formatted = text(&out.stdout);
    assert_eq!(formatted, "main {\n  x = 1;\n  print(x)\n}\n");

    let out = run_with_stdin(&["fmt", path, "--write"], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(path).unwrap(), formatted);
}

#[test]
fn serve_stdio_session() {
    let path = program("tuition_interactive.choo");
    let out = run_with_stdin(
        &["serve", path.to_str().unwrap(), "--stdio"],
        "{\"type\":\"choice_response\",\"choice_id\":0,\"index\":2}\n",
    );
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = text(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["type"], "choice_request");
    assert_eq!(lines[1], json!({"type": "output", "text": "2200"}));
    assert_eq!(lines[2], json!({"type": "done", "status": "success"}));
}

#[test]
fn serve_stdio_rejects_bad_messages_and_honours_abort() {
    let path = program("tuition_interactive.choo");
    let out = run_with_stdin(
        &["serve", path.to_str().unwrap(), "--stdio"],
        "not json\n{\"type\":\"choice_response\",\"choice_id\":7,\"index\":0}\n{\"type\":\"abort\"}\n",
    );
    assert_eq!(out.status.code(), Some(1));
    let kinds: Vec<Value> = text(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .collect();
    let types: Vec<&str> = kinds.iter().map(|v| v["type"].as_str().unwrap()).collect();
    assert_eq!(
        types,
        ["choice_request", "error", "choice_request", "error", "choice_request", "done"]
    );
    assert_eq!(kinds[1]["code"], "bad_message");
    assert_eq!(kinds[3]["code"], "bad_choice_id");
    assert_eq!(kinds[5], json!({"type": "done", "status": "failure", "reason": "aborted"}));
}

struct Server {
    child: Child,
    addr: String,
}

impl Server {
    fn start(name: &str) -> Server {
        let path = program(name);
        let mut child = choo()
            .args(["serve", path.to_str().unwrap(), "--port", "0"])
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .unwrap();
        let mut first = String::new();
        BufReader::new(child.stderr.as_mut().unwrap())
            .read_line(&mut first)
            .unwrap();
        let addr = first
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {first:?}"))
            .to_string();
        Server { child, addr }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[test]
fn serve_port_speaks_ndjson_over_tcp() {
    let server = Server::start("tuition_interactive.choo");
    // two sessions on the same listener, each independent
    for (index, expected) in [(1, "4000"), (0, "2000")] {
        let stream = TcpStream::connect(&server.addr).unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut writer = stream;
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        let request: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(request["type"], "choice_request");
        assert_eq!(request["alternatives"].as_array().unwrap().len(), 3);
        writeln!(writer, "{}", json!({"type": "choice_response", "choice_id": 0, "index": index})).unwrap();
        let rest: Vec<Value> = reader
            .lines()
            .map(|l| serde_json::from_str(&l.unwrap()).unwrap())
            .collect();
        assert_eq!(
            rest,
            [
                json!({"type": "output", "text": expected}),
                json!({"type": "done", "status": "success"})
            ]
        );
    }
}

#[test]
fn serve_port_upgrades_browser_connections() {
    let server = Server::start("tuition_interactive.choo");
    let (mut ws, _) = tungstenite::connect(format!("ws://{}/", server.addr)).unwrap();
    let request: Value = loop {
        if let Message::Text(t) = ws.read().unwrap() {
            break serde_json::from_str(t.as_str()).unwrap();
        }
    };
    assert_eq!(request["type"], "choice_request");
    ws.send(Message::text(
        json!({"type": "choice_response", "choice_id": 0, "index": 1}).to_string(),
    ))
    .unwrap();
    let mut messages = Vec::new();
    loop {
        match ws.read() {
            Ok(Message::Text(t)) => messages.push(serde_json::from_str::<Value>(t.as_str()).unwrap()),
            Ok(Message::Close(_)) | Err(_) => break,
            Ok(_) => {}
        }
    }
    assert_eq!(
        messages,
        [
            json!({"type": "output", "text": "4000"}),
            json!({"type": "done", "status": "success"})
        ]
    );
}
