//! Engines on their own threads, and hubs for passing terms between them.

use std::cell::Cell;
use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, LazyLock};
use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex};

use crate::engine::{Context, Engine, Runtime};
use crate::error::{ErrorKind, MachineError};
use crate::machine::{Machine, MachineEvent};
use crate::symbol::atoms;
use crate::term::{copy_term, Term};

const THREAD_STACK: usize = 256 << 20;

/// A queue where producers `put` terms and consumers `collect` them, waiting
/// up to a timeout. A timeout of zero waits indefinitely.
pub struct Hub {
    id: u64,
    timeout: Option<Duration>,
    state: Mutex<HubState>,
    ready: Condvar,
}

struct HubState {
    queue: VecDeque<Term>,
    closed: bool,
}

impl Hub {
    pub(crate) fn new(id: u64, timeout_ms: u64) -> Hub {
        Hub {
            id,
            timeout: (timeout_ms > 0).then(|| Duration::from_millis(timeout_ms)),
            state: Mutex::new(HubState {
                queue: VecDeque::new(),
                closed: false,
            }),
            ready: Condvar::new(),
        }
    }

    pub fn handle(&self) -> Term {
        Term::compound(atoms::HUB_TAG, vec![Term::Int(self.id as i64)])
    }

    pub fn timeout_ms(&self) -> u64 {
        self.timeout.map_or(0, |d| d.as_millis() as u64)
    }

    /// Enqueues a copy of `data`; false once the hub is closed.
    pub fn put(&self, data: &Term) -> bool {
        let copy = copy_term(data);
        let mut state = self.state.lock();
        if state.closed {
            return false;
        }
        state.queue.push_back(copy);
        drop(state);
        self.ready.notify_one();
        true
    }

    /// Takes the oldest term, waiting for one up to the hub's timeout.
    pub fn collect(&self) -> Option<Term> {
        let deadline = self.timeout.map(|t| Instant::now() + t);
        let mut state = self.state.lock();
        loop {
            if let Some(t) = state.queue.pop_front() {
                return Some(t);
            }
            if state.closed {
                return None;
            }
            match deadline {
                None => self.ready.wait(&mut state),
                Some(d) => {
                    if self.ready.wait_until(&mut state, d).timed_out() {
                        return state.queue.pop_front();
                    }
                }
            }
        }
    }

    /// Closes the hub: queued terms are dropped and waiting consumers fail.
    pub fn close(&self) {
        let mut state = self.state.lock();
        state.closed = true;
        state.queue.clear();
        drop(state);
        self.ready.notify_all();
    }

    pub fn len(&self) -> usize {
        self.state.lock().queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Debug for Hub {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Hub({})", self.id)
    }
}

struct ThreadState {
    done: Mutex<bool>,
    finished: Condvar,
}

static THREADS: LazyLock<Mutex<HashMap<u64, Arc<ThreadState>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));
static NEXT_THREAD: AtomicU64 = AtomicU64::new(1);

thread_local! {
    static CURRENT: Cell<u64> = const { Cell::new(0) };
}

/// A thread known to the runtime: one started by `bg`/`run_bg`, or any
/// other thread that asked for `current_thread`.
#[derive(Clone)]
pub struct ThreadRef {
    id: u64,
    state: Arc<ThreadState>,
}

impl ThreadRef {
    fn register() -> ThreadRef {
        let id = NEXT_THREAD.fetch_add(1, Ordering::Relaxed);
        let state = Arc::new(ThreadState {
            done: Mutex::new(false),
            finished: Condvar::new(),
        });
        THREADS.lock().insert(id, state.clone());
        ThreadRef { id, state }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn handle(&self) -> Term {
        Term::compound(atoms::THREAD_TAG, vec![Term::Int(self.id as i64)])
    }

    pub fn is_finished(&self) -> bool {
        *self.state.done.lock()
    }

    /// Waits for the thread to finish. Joining the calling thread is an error.
    pub fn join(&self) -> Result<(), MachineError> {
        if CURRENT.with(Cell::get) == self.id {
            return Err(MachineError::new(
                ErrorKind::Deadlock,
                self.handle(),
                "a thread cannot join itself",
            ));
        }
        let mut done = self.state.done.lock();
        while !*done {
            self.state.finished.wait(&mut done);
        }
        Ok(())
    }
}

impl std::fmt::Debug for ThreadRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ThreadRef({})", self.id)
    }
}

/// Marks the thread finished even if the engine panics.
struct Finish(Arc<ThreadState>);

impl Drop for Finish {
    fn drop(&mut self) {
        *self.0.done.lock() = true;
        self.0.finished.notify_all();
    }
}

pub fn current_thread() -> ThreadRef {
    let id = CURRENT.with(Cell::get);
    if id != 0 {
        if let Some(t) = thread_ref(id) {
            return t;
        }
    }
    let t = ThreadRef::register();
    CURRENT.with(|c| c.set(t.id));
    t
}

pub(crate) fn thread_ref(id: u64) -> Option<ThreadRef> {
    THREADS.lock().get(&id).map(|state| ThreadRef {
        id,
        state: state.clone(),
    })
}

pub fn sleep_ms(ms: u64) {
    std::thread::sleep(Duration::from_millis(ms))
}

fn spawn(ctx: Arc<Context>, mut machine: Box<Machine>) -> ThreadRef {
    let thread = ThreadRef::register();
    let id = thread.id;
    let finish = Finish(thread.state.clone());
    let spawned = std::thread::Builder::new()
        .name(format!("engine-thread-{id}"))
        .stack_size(THREAD_STACK)
        .spawn(move || {
            let _finish = finish;
            CURRENT.with(|c| c.set(id));
            loop {
                match machine.resume(&ctx) {
                    MachineEvent::Exhausted => break,
                    MachineEvent::Error(e) => {
                        ctx.diagnostic(&format!("thread {id} died: {e}"));
                        break;
                    }
                    MachineEvent::AnswerReady(_) | MachineEvent::Yielded(_) => {}
                }
            }
        });
    if let Err(e) = spawned {
        // the closure, and with it the Finish guard, was dropped
        eprintln!("cannot start thread: {e}");
    }
    thread
}

/// Moves engine `id` onto a new thread; `None` if it is not an idle live engine.
pub(crate) fn run_bg(ctx: &Arc<Context>, id: u64) -> Option<ThreadRef> {
    let machine = ctx.detach(id)?;
    if machine.is_dead() {
        return None;
    }
    Some(spawn(ctx.clone(), machine))
}

pub(crate) fn bg(ctx: &Arc<Context>, goal: &Term) -> Result<ThreadRef, MachineError> {
    let machine = Machine::boot(&Term::var(), goal)?;
    Ok(spawn(ctx.clone(), Box::new(machine)))
}

impl Engine {
    /// Hands the engine to a new thread that runs it to exhaustion.
    pub fn run_bg(mut self) -> Option<ThreadRef> {
        self.disown();
        run_bg(self.context(), self.id())
    }
}

impl Runtime {
    /// Runs `goal` on its own engine and thread.
    pub fn bg(&self, goal: &Term) -> Result<ThreadRef, MachineError> {
        bg(self.context(), goal)
    }

    pub fn hub_ms(&self, timeout_ms: i64) -> Result<Arc<Hub>, MachineError> {
        self.context().hub_ms(timeout_ms)
    }

    /// The hub named by a `'$hub'(Id)` term, if it still exists.
    pub fn hub(&self, handle: &Term) -> Option<Arc<Hub>> {
        let h = handle.deref();
        if h.functor() != Some((atoms::HUB_TAG, 1)) {
            return None;
        }
        self.context().hub(h.args()[0].as_int()? as u64)
    }

    pub fn destroy_hub(&self, hub: &Hub) {
        self.context().destroy_hub(hub.id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_then_collect_is_fifo() {
        let hub = Hub::new(1, 10);
        assert!(hub.put(&Term::atom("a")));
        assert!(hub.put(&Term::atom("b")));
        assert_eq!(
            hub.collect().unwrap().as_atom().unwrap().name().as_ref(),
            "a"
        );
        assert_eq!(
            hub.collect().unwrap().as_atom().unwrap().name().as_ref(),
            "b"
        );
        let start = Instant::now();
        assert!(hub.collect().is_none());
        assert!(start.elapsed() >= Duration::from_millis(10));
    }

    #[test]
    fn closed_hub_rejects_and_releases() {
        let hub = Arc::new(Hub::new(1, 0));
        let waiter = {
            let hub = hub.clone();
            std::thread::spawn(move || hub.collect())
        };
        sleep_ms(20);
        hub.close();
        assert!(waiter.join().unwrap().is_none());
        assert!(!hub.put(&Term::int(1)));
    }

    #[test]
    fn join_self_is_an_error() {
        let me = current_thread();
        assert_eq!(me.join().unwrap_err().kind, ErrorKind::Deadlock);
        assert_eq!(current_thread().id(), me.id());
    }
}
