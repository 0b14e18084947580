//! `choo` command-line interface.
//!
//! ```text
//! choo run <file> [--choices 0,2] [--trace] [--first-match]
//! choo check <file>
//! choo fmt <file> [--write]
//! choo serve <file> (--stdio | --port N) [--trace] [--first-match]
//! ```
//!
//! Exit codes: 0 success, 1 execution failure, 2 parse or usage error.

mod serve;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use choo::check::check_source;
use choo::{
    interactive_source, parse_program, pretty_print, run_program, scripted_source, ChoiceSource,
    Event, ExecOptions, ExecOutcome, SessionEvent, SourceProgram,
};

#[derive(Parser)]
#[command(name = "choo", version, about = "Run, check, format and serve choo programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program. Choices are read from the terminal unless `--choices` is given.
    Run {
        file: PathBuf,
        /// 0-based answers to the program's choice prompts, comma separated.
        #[arg(long, value_delimiter = ',')]
        choices: Option<Vec<usize>>,
        /// Report machine moves, user moves and state changes on stderr.
        #[arg(long)]
        trace: bool,
        /// Pick the first true guard when several hold instead of failing.
        #[arg(long)]
        first_match: bool,
    },
    /// Parse a program and report static problems.
    Check { file: PathBuf },
    /// Print a program in canonical layout.
    Fmt {
        file: PathBuf,
        /// Rewrite the file in place instead of printing it.
        #[arg(long)]
        write: bool,
    },
    /// Serve execution sessions over newline-delimited JSON.
    #[command(group(ArgGroup::new("transport").required(true).args(["stdio", "port"])))]
    Serve {
        file: PathBuf,
        /// One session over standard input and output.
        #[arg(long)]
        stdio: bool,
        /// Listen on 127.0.0.1:PORT, one session per connection. Connections
        /// that open with an HTTP upgrade request are served as WebSockets.
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        first_match: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            file,
            choices,
            trace,
            first_match,
        } => cmd_run(&file, choices, trace, ExecOptions { first_match }),
        Command::Check { file } => cmd_check(&file),
        Command::Fmt { file, write } => cmd_fmt(&file, write),
        Command::Serve {
            file,
            stdio,
            port,
            trace,
            first_match,
        } => {
            let options = ExecOptions { first_match };
            match load(&file) {
                Err(code) => code,
                Ok(program) if stdio => serve::serve_stdio(&program, trace, options),
                Ok(program) => serve::serve_port(program, port.unwrap_or(0), trace, options),
            }
        }
    };
    ExitCode::from(code)
}

fn read_source(file: &Path) -> Result<String, u8> {
    fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", file.display());
        2
    })
}

fn load(file: &Path) -> Result<SourceProgram, u8> {
    let source = read_source(file)?;
    parse_program(&source).map_err(|e| {
        eprintln!("error: {}:{e}", file.display());
        2
    })
}

fn cmd_run(file: &Path, choices: Option<Vec<usize>>, trace: bool, options: ExecOptions) -> u8 {
    let program = match load(file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let stdin = io::stdin();
    let mut source: Box<dyn ChoiceSource> = match choices {
        Some(indices) => Box::new(scripted_source(indices)),
        None => Box::new(interactive_source(stdin.lock(), io::stderr())),
    };
    run_with(&program, source.as_mut(), trace, options)
}

fn run_with(program: &SourceProgram, source: &mut dyn ChoiceSource, trace: bool, options: ExecOptions) -> u8 {
    let mut sink = |event: Event| {
        if let Event::Output { text } = &event {
            let mut out = io::stdout().lock();
            let _ = writeln!(out, "{text}");
            let _ = out.flush();
            return;
        }
        if trace {
            if let Some(msg) = SessionEvent::from_event(&event, true) {
                eprintln!("{}", msg.to_line());
            }
        } else if let Event::Warning { message } = &event {
            eprintln!("warning: {message}");
        }
    };
    match run_program(program, source, &mut sink, options) {
        ExecOutcome::Success(_) => 0,
        ExecOutcome::Failure(reason) => {
            eprintln!("error: execution failed: {reason}");
            1
        }
    }
}

fn cmd_check(file: &Path) -> u8 {
    let source = match read_source(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let findings = check_source(&source);
    for finding in &findings {
        eprintln!("{}:{finding}", file.display());
    }
    if findings.is_empty() {
        0
    } else {
        2
    }
}

fn cmd_fmt(file: &Path, write: bool) -> u8 {
    let program = match load(file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let text = pretty_print(&program);
    if write {
        if let Err(e) = fs::write(file, &text) {
            eprintln!("error: cannot write {}: {e}", file.display());
            return 2;
        }
    } else {
        let mut out = io::stdout().lock();
        if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
            return 2;
        }
    }
    0
}
