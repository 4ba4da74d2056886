//! The interactive top level and batch runner behind the command-line tool.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use crate::engine::{Reply, Runtime};
use crate::error::{Error, LoadError};
use crate::symbol::atoms;
use crate::term::Term;
use crate::writer::write_term;

#[derive(Clone, Debug, Default)]
pub struct SessionConfig {
    /// Loaded in order, after the prelude.
    pub files: Vec<PathBuf>,
    pub batch_goal: Option<String>,
    pub answer_limit: Option<usize>,
    pub trace: bool,
}

pub fn load(config: &SessionConfig) -> Result<Runtime, LoadError> {
    let mut builder = Runtime::builder().trace(config.trace);
    for file in &config.files {
        builder = builder.consult_file(file)?;
    }
    Ok(builder.build())
}

/// The payload of a yielded `exception(E)`, which no catch/3 handled.
fn uncaught(t: &Term) -> Option<Term> {
    let t = t.deref();
    (t.functor() == Some((atoms::EXCEPTION, 1))).then(|| t.args()[0].clone())
}

enum Outcome {
    Answers(usize),
    Failed(String),
}

/// Prints replies to `out` until the query ends, `limit` is reached, or
/// `more` declines. Errors go to `err`.
fn drive(
    rt: &Runtime,
    goal: &str,
    limit: Option<usize>,
    interactive: bool,
    out: &mut dyn Write,
    mut more: impl FnMut(&mut dyn Write) -> bool,
) -> std::io::Result<Outcome> {
    let mut query = match rt.query(goal) {
        Ok(q) => q,
        Err(e) => return Ok(Outcome::Failed(e.to_string())),
    };
    let mut count = 0;
    loop {
        if limit.is_some_and(|n| count >= n) {
            query.stop();
            return Ok(Outcome::Answers(count));
        }
        match query.next() {
            None => {
                // batch output lists answers only; `no` marks an empty result
                if interactive || count == 0 {
                    writeln!(out, "no")?;
                }
                return Ok(Outcome::Answers(count));
            }
            Some(Reply::Error(e)) => return Ok(Outcome::Failed(format!("error: {e}"))),
            Some(Reply::Yield(t)) if uncaught(&t).is_some() => {
                let e = uncaught(&t).expect("checked");
                return Ok(Outcome::Failed(format!(
                    "uncaught exception: {}",
                    write_term(&e)
                )));
            }
            Some(reply) => {
                count += 1;
                writeln!(out, "{}", reply.render())?;
                if !more(out) {
                    query.stop();
                    return Ok(Outcome::Answers(count));
                }
            }
        }
    }
}

/// Runs the configured goal once. Exit code 0 if it had an answer, 1 if
/// none, 2 on any error.
pub fn run_batch(config: &SessionConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let rt = match load(config) {
        Ok(rt) => rt,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return 2;
        }
    };
    let Some(goal) = config.batch_goal.as_deref() else {
        let _ = writeln!(err, "no goal given");
        return 2;
    };
    match drive(&rt, goal, config.answer_limit, false, out, |_| true) {
        Ok(Outcome::Answers(0)) => 1,
        Ok(Outcome::Answers(_)) => 0,
        Ok(Outcome::Failed(message)) => {
            let _ = writeln!(err, "{message}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            2
        }
    }
}

/// Reads queries from `input` until end of input. After each answer a line
/// holding `;` asks for the next one; anything else ends the query.
pub fn repl(
    config: &SessionConfig,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let rt = match load(config) {
        Ok(rt) => rt,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return 2;
        }
    };
    match session(&rt, config.answer_limit, input, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            2
        }
    }
}

fn session(
    rt: &Runtime,
    limit: Option<usize>,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<()> {
    loop {
        write!(out, "?- ")?;
        out.flush()?;
        let Some(text) = read_query(input, out)? else {
            writeln!(out)?;
            return Ok(());
        };
        if text.trim().is_empty() {
            continue;
        }
        if let Err(e) = crate::reader::parse_query(&text) {
            writeln!(err, "{}", Error::from(e))?;
            continue;
        }
        let outcome = drive(rt, &text, limit, true, out, |_| {
            let mut line = String::new();
            matches!(input.read_line(&mut line), Ok(n) if n > 0) && line.trim() == ";"
        })?;
        if let Outcome::Failed(message) = outcome {
            writeln!(err, "{message}")?;
        }
    }
}

/// Collects lines until the text ends with a full stop; `None` at end of input.
fn read_query(input: &mut dyn BufRead, out: &mut dyn Write) -> std::io::Result<Option<String>> {
    let mut text = String::new();
    loop {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(if text.trim().is_empty() {
                None
            } else {
                Some(text)
            });
        }
        text.push_str(&line);
        let trimmed = text.trim_end();
        if trimmed.is_empty() || trimmed.ends_with('.') {
            return Ok(Some(text));
        }
        write!(out, "|  ")?;
        out.flush()?;
    }
}
