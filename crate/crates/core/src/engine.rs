//! Engine handles for host programs, and the registry shared with the
//! object-language builtins.

use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::Mutex;

use crate::database::{Database, DatabaseBuilder};
use crate::error::{Error, ErrorKind, LoadError, MachineError};
use crate::machine::{engine_handle, engine_id, Machine, MachineEvent};
use crate::reader::parse_query;
use crate::symbol::atoms;
use crate::term::{copy_term, Term};
use crate::threads::Hub;
use crate::writer::write_term;

/// What `get` hands back: an answer instance or the end of the stream.
#[derive(Clone, Debug)]
pub enum Answer {
    The(Term),
    No,
}

impl Answer {
    /// The object-language form, `the(T)` or `no`.
    pub fn to_term(&self) -> Term {
        match self {
            Answer::The(t) => Term::compound(atoms::THE, vec![t.clone()]),
            Answer::No => Term::Atom(atoms::NO),
        }
    }

    pub fn into_option(self) -> Option<Term> {
        match self {
            Answer::The(t) => Some(t),
            Answer::No => None,
        }
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Answer::No)
    }
}

pub(crate) type Sink = Arc<dyn Fn(&str) + Send + Sync>;

enum Slot {
    Idle(Box<Machine>),
    /// Taken out of the table by whoever is resuming it.
    Busy {
        stop: bool,
        inbox: Vec<Term>,
    },
}

/// State shared by every engine of one runtime.
pub(crate) struct Context {
    pub(crate) db: Arc<Database>,
    engines: Mutex<HashMap<u64, Slot>>,
    hubs: Mutex<HashMap<u64, Arc<Hub>>>,
    next_id: AtomicU64,
    sink: Sink,
    trace: bool,
}

impl Context {
    pub(crate) fn new(db: Database, sink: Sink, trace: bool) -> Arc<Context> {
        Arc::new(Context {
            db: Arc::new(db),
            engines: Mutex::new(HashMap::new()),
            hubs: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            sink,
            trace,
        })
    }

    pub(crate) fn diagnostic(&self, message: &str) {
        (self.sink)(message)
    }

    pub(crate) fn new_engine(
        self: &Arc<Self>,
        pattern: &Term,
        goal: &Term,
    ) -> Result<u64, MachineError> {
        let machine = Machine::boot(pattern, goal)?;
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        self.engines
            .lock()
            .insert(id, Slot::Idle(Box::new(machine)));
        Ok(id)
    }

    /// Runs engine `id` to its next event; `None` if the id names no live engine.
    pub(crate) fn resume(self: &Arc<Self>, id: u64) -> Result<Option<MachineEvent>, MachineError> {
        let mut machine = match self.take_for_run(id)? {
            Some(m) => m,
            None => return Ok(None),
        };
        let event = machine.resume(self);
        if self.trace {
            self.diagnostic(&format!("[trace] engine {id}: {}", describe(&event)));
        }
        let mut engines = self.engines.lock();
        if let Some(Slot::Busy { stop, inbox }) = engines.remove(&id) {
            for data in &inbox {
                machine.deposit(data);
            }
            if stop {
                machine.kill();
            }
        }
        if machine.is_dead() {
            drop(engines);
            drop(machine);
        } else {
            engines.insert(id, Slot::Idle(machine));
        }
        Ok(Some(event))
    }

    fn take_for_run(&self, id: u64) -> Result<Option<Box<Machine>>, MachineError> {
        let mut engines = self.engines.lock();
        match engines.get_mut(&id) {
            None => Ok(None),
            Some(Slot::Busy { .. }) => Err(MachineError::new(
                ErrorKind::EngineBusy,
                engine_handle(id),
                "engine is already running",
            )),
            Some(slot) => {
                let Slot::Idle(m) = std::mem::replace(
                    slot,
                    Slot::Busy {
                        stop: false,
                        inbox: Vec::new(),
                    },
                ) else {
                    unreachable!()
                };
                Ok(Some(m))
            }
        }
    }

    /// The `get/2` protocol. A machine error inside the engine becomes `No`
    /// plus a diagnostic; only faults of the call itself are returned.
    pub(crate) fn get(self: &Arc<Self>, id: u64) -> Result<Answer, MachineError> {
        Ok(match self.resume(id)? {
            Some(MachineEvent::AnswerReady(t)) | Some(MachineEvent::Yielded(t)) => Answer::The(t),
            Some(MachineEvent::Error(e)) => {
                self.diagnostic(&format!("engine {id} died: {e}"));
                Answer::No
            }
            Some(MachineEvent::Exhausted) | None => Answer::No,
        })
    }

    pub(crate) fn stop(&self, id: u64) {
        let mut engines = self.engines.lock();
        match engines.get_mut(&id) {
            Some(Slot::Busy { stop, .. }) => *stop = true,
            Some(Slot::Idle(_)) => {
                let slot = engines.remove(&id);
                drop(engines);
                drop(slot);
            }
            None => {}
        }
    }

    pub(crate) fn to_engine(&self, id: u64, data: &Term) -> bool {
        let mut engines = self.engines.lock();
        match engines.get_mut(&id) {
            Some(Slot::Idle(m)) => m.deposit(data),
            Some(Slot::Busy { stop: false, inbox }) => {
                inbox.push(copy_term(data));
                true
            }
            _ => false,
        }
    }

    /// Removes an idle engine from the table, handing it to the caller.
    pub(crate) fn detach(&self, id: u64) -> Option<Box<Machine>> {
        let mut engines = self.engines.lock();
        match engines.get(&id) {
            Some(Slot::Idle(_)) => match engines.remove(&id) {
                Some(Slot::Idle(m)) => Some(m),
                _ => unreachable!(),
            },
            _ => None,
        }
    }

    pub(crate) fn is_live(&self, id: u64) -> bool {
        self.engines.lock().contains_key(&id)
    }

    pub(crate) fn live_engines(&self) -> usize {
        self.engines.lock().len()
    }

    pub(crate) fn hub_ms(&self, timeout_ms: i64) -> Result<Arc<Hub>, MachineError> {
        if timeout_ms < 0 {
            return Err(MachineError::type_error(
                "non-negative timeout",
                Term::Int(timeout_ms),
            ));
        }
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let hub = Arc::new(Hub::new(id, timeout_ms as u64));
        self.hubs.lock().insert(id, hub.clone());
        Ok(hub)
    }

    pub(crate) fn hub(&self, id: u64) -> Option<Arc<Hub>> {
        self.hubs.lock().get(&id).cloned()
    }

    pub(crate) fn destroy_hub(&self, id: u64) {
        if let Some(hub) = self.hubs.lock().remove(&id) {
            hub.close();
        }
    }
}

fn describe(event: &MachineEvent) -> String {
    match event {
        MachineEvent::AnswerReady(t) => format!("answer {}", write_term(t)),
        MachineEvent::Yielded(t) => format!("yield {}", write_term(t)),
        MachineEvent::Exhausted => "exhausted".to_string(),
        MachineEvent::Error(e) => format!("error {e}"),
    }
}

/// A loaded program plus the engines running over it.
#[derive(Clone)]
pub struct Runtime {
    ctx: Arc<Context>,
}

pub struct RuntimeBuilder {
    db: DatabaseBuilder,
    sink: Sink,
    trace: bool,
}

impl RuntimeBuilder {
    /// Adds a source unit. A predicate it defines replaces any earlier definition.
    pub fn consult_str(mut self, text: &str, name: &str) -> Result<Self, LoadError> {
        self.db.consult_str(text, Some(name))?;
        Ok(self)
    }

    pub fn consult_file(self, path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let name = path.display().to_string();
        self.consult_str(&text, &name)
    }

    /// Where engine deaths and trace lines go; standard error by default.
    pub fn diagnostics(mut self, sink: impl Fn(&str) + Send + Sync + 'static) -> Self {
        self.sink = Arc::new(sink);
        self
    }

    pub fn trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn build(self) -> Runtime {
        Runtime {
            ctx: Context::new(self.db.build(), self.sink, self.trace),
        }
    }
}

impl Runtime {
    /// A builder with the prelude already loaded.
    pub fn builder() -> RuntimeBuilder {
        let mut b = Self::bare();
        for (name, text) in crate::prelude::FILES {
            b.db.consult_str(text, Some(name)).expect("prelude loads");
        }
        b
    }

    /// A builder with no prelude.
    pub fn bare() -> RuntimeBuilder {
        RuntimeBuilder {
            db: DatabaseBuilder::new(),
            sink: Arc::new(|line: &str| eprintln!("{line}")),
            trace: false,
        }
    }

    /// The prelude plus `program`.
    pub fn with_program(program: &str) -> Result<Runtime, LoadError> {
        Ok(Self::builder().consult_str(program, "program")?.build())
    }

    pub fn database(&self) -> &Database {
        &self.ctx.db
    }

    pub(crate) fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    /// Creates an engine that answers instances of `pattern` for each solution of `goal`.
    pub fn new_engine(&self, pattern: &Term, goal: &Term) -> Result<Engine, MachineError> {
        let id = self.ctx.new_engine(pattern, goal)?;
        Ok(Engine {
            id,
            ctx: self.ctx.clone(),
            owned: true,
        })
    }

    /// Parses `pattern` and `goal` together, so equally named variables are shared.
    pub fn engine_from_text(&self, pattern: &str, goal: &str) -> Result<Engine, Error> {
        let q = parse_query(&format!("'$pair'({pattern}, ({goal}))"))?;
        let parts = q.term.args();
        Ok(self.new_engine(&parts[0], &parts[1])?)
    }

    /// A non-owning view of an engine named by a `'$engine'(Id)` term.
    pub fn engine(&self, handle: &Term) -> Option<Engine> {
        let id = engine_id(handle).ok()?;
        Some(Engine {
            id,
            ctx: self.ctx.clone(),
            owned: false,
        })
    }

    /// Starts a top-level query whose answers bind the query's named variables.
    pub fn query(&self, text: &str) -> Result<Query, Error> {
        let q = parse_query(text)?;
        // `_Name` variables are not reported
        let shown: Vec<_> = q
            .names
            .iter()
            .filter(|(n, _)| !n.starts_with('_'))
            .collect();
        let names: Vec<String> = shown.iter().map(|(n, _)| n.clone()).collect();
        let pattern = Term::list(shown.iter().map(|(_, v)| Term::Var(v.clone())));
        let engine = self.new_engine(&pattern, &q.term)?;
        Ok(Query { engine, names })
    }

    /// Every reply of `text` rendered as one line, stopping at `limit` replies.
    pub fn answers(&self, text: &str, limit: Option<usize>) -> Result<Vec<String>, Error> {
        let mut lines = Vec::new();
        for reply in self.query(text)? {
            if limit.is_some_and(|n| lines.len() >= n) {
                break;
            }
            match reply {
                Reply::Error(e) => return Err(e.into()),
                r => lines.push(r.render()),
            }
        }
        Ok(lines)
    }

    /// Number of engines that are alive and reachable through a handle.
    pub fn live_engines(&self) -> usize {
        self.ctx.live_engines()
    }
}

/// A handle to one engine. The handle returned by `Runtime::new_engine`
/// owns its engine and stops it when dropped.
pub struct Engine {
    id: u64,
    ctx: Arc<Context>,
    owned: bool,
}

impl Engine {
    pub fn id(&self) -> u64 {
        self.id
    }

    /// The `'$engine'(Id)` term naming this engine in object code.
    pub fn handle(&self) -> Term {
        engine_handle(self.id)
    }

    pub fn is_alive(&self) -> bool {
        self.ctx.is_live(self.id)
    }

    /// Resumes the engine. Total: exhaustion, death and misuse all read as `No`.
    pub fn get(&self) -> Answer {
        match self.ctx.get(self.id) {
            Ok(a) => a,
            Err(e) => {
                self.ctx
                    .diagnostic(&format!("get on engine {}: {e}", self.id));
                Answer::No
            }
        }
    }

    /// Resumes the engine and reports exactly what happened.
    pub fn next_event(&self) -> MachineEvent {
        match self.ctx.resume(self.id) {
            Ok(Some(event)) => event,
            Ok(None) => MachineEvent::Exhausted,
            Err(e) => MachineEvent::Error(e),
        }
    }

    /// Kills the engine and releases its state. Idempotent.
    pub fn stop(&self) {
        self.ctx.stop(self.id)
    }

    /// Queues a copy of `data` for the engine's `from_engine/1`; false once it is dead.
    pub fn to_engine(&self, data: &Term) -> bool {
        self.ctx.to_engine(self.id, data)
    }

    /// Releases ownership: dropping this handle no longer stops the engine.
    pub fn into_handle(mut self) -> Term {
        self.owned = false;
        self.handle()
    }

    pub(crate) fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub(crate) fn disown(&mut self) {
        self.owned = false;
    }
}

impl Iterator for Engine {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        self.get().into_option()
    }
}

impl Drop for Engine {
    fn drop(&mut self) {
        if self.owned {
            self.ctx.stop(self.id);
        }
    }
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Engine({})", self.id)
    }
}

/// One step of a top-level query.
#[derive(Clone, Debug)]
pub enum Reply {
    /// Bindings of the query's named variables, in order of first occurrence.
    Answer(Vec<(String, Term)>),
    /// A term passed to `return/1` by the query itself.
    Yield(Term),
    Error(MachineError),
}

impl Reply {
    /// `X=1, Y=f(a)`, `yes` for an answer without named variables, or the yielded term.
    pub fn render(&self) -> String {
        match self {
            Reply::Answer(bindings) if bindings.is_empty() => "yes".to_string(),
            Reply::Answer(bindings) => bindings
                .iter()
                .map(|(name, value)| format!("{name}={}", write_term(value)))
                .collect::<Vec<_>>()
                .join(", "),
            Reply::Yield(t) => write_term(t),
            Reply::Error(e) => format!("error: {e}"),
        }
    }
}

/// A running top-level query.
pub struct Query {
    engine: Engine,
    names: Vec<String>,
}

impl Query {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn stop(&self) {
        self.engine.stop()
    }
}

impl Iterator for Query {
    type Item = Reply;

    fn next(&mut self) -> Option<Reply> {
        match self.engine.next_event() {
            MachineEvent::AnswerReady(t) => {
                let values = t.to_vec().unwrap_or_default();
                Some(Reply::Answer(visible_bindings(&self.names, values)))
            }
            MachineEvent::Yielded(t) => Some(Reply::Yield(t)),
            MachineEvent::Exhausted => None,
            MachineEvent::Error(e) => Some(Reply::Error(e)),
        }
    }
}

/// Pairs names with values, leaving out variables that are still free and
/// occur nowhere else in the answer.
fn visible_bindings(names: &[String], values: Vec<Term>) -> Vec<(String, Term)> {
    // bounded, since answers may be cyclic
    let mut budget = 100_000usize;
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut stack: Vec<Term> = values.clone();
    while let Some(t) = stack.pop() {
        if budget == 0 {
            return names.iter().cloned().zip(values).collect();
        }
        budget -= 1;
        match t.deref() {
            Term::Var(v) => *seen.entry(v.serial()).or_default() += 1,
            Term::Compound(c) if !c.is_ground() => stack.extend(c.args().iter().cloned()),
            _ => {}
        }
    }
    names
        .iter()
        .cloned()
        .zip(values)
        .filter(|(_, v)| match v.deref() {
            Term::Var(var) => seen.get(&var.serial()).copied().unwrap_or(0) > 1,
            _ => true,
        })
        .collect()
}
