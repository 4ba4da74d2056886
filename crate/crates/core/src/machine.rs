//! The resumable LD-resolution machine.
//!
//! All control state is explicit: the continuation is a shared linked list of
//! goal frames and backtracking state lives in a choice-point stack. A run can
//! therefore stop at an answer or at `return/1` and later continue exactly
//! where it left off, and host stack depth never grows with program recursion.
//!
//! A clause body is pushed directly in front of its caller's continuation, so
//! once the last body goal starts nothing of the clause remains reachable
//! unless a younger choice point holds it (last-call optimization).

use std::collections::VecDeque;
use std::sync::Arc;

use crate::arith::eval_arith;
use crate::database::{Clause, Key, Predicate, Template};
use crate::engine::{Answer, Context};
use crate::error::{ErrorKind, MachineError};
use crate::symbol::{atoms, Atom};
use crate::term::{copy_term, serial_watermark, term_equal, unify, Bindings, Term, TrailMark};
use crate::threads;

/// What a single `resume` produced.
///
/// Failure of an injected goal is reported as `Exhausted`: with no
/// alternatives left the engine is dead.
#[derive(Debug, Clone)]
pub enum MachineEvent {
    AnswerReady(Term),
    Yielded(Term),
    Exhausted,
    Error(MachineError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Status {
    Ready,
    Suspended,
    Dead,
}

type Cont = Option<Arc<Frame>>;

struct Frame {
    goal: Term,
    /// Choice-point height a `!` in this goal cuts back to.
    barrier: usize,
    next: Cont,
}

impl Drop for Frame {
    fn drop(&mut self) {
        let mut next = self.next.take();
        while let Some(frame) = next {
            match Arc::try_unwrap(frame) {
                Ok(mut f) => next = f.next.take(),
                Err(_) => break,
            }
        }
    }
}

enum Alternative {
    Clauses {
        goal: Term,
        pred: Arc<Predicate>,
        next: usize,
    },
    Between {
        target: Term,
        next: i64,
        high: i64,
    },
}

struct ChoicePoint {
    alt: Alternative,
    cont: Cont,
    trail_mark: TrailMark,
    var_mark: u64,
}

enum Flow {
    Continue,
    Fail,
    Yield(Term),
}

impl From<bool> for Flow {
    fn from(ok: bool) -> Flow {
        if ok {
            Flow::Continue
        } else {
            Flow::Fail
        }
    }
}

pub(crate) struct Machine {
    goals: Cont,
    cps: Vec<ChoicePoint>,
    trail: Bindings,
    pattern: Term,
    mailbox: VecDeque<Term>,
    status: Status,
    redo: bool,
    slots: Vec<Option<Term>>,
}

impl Machine {
    /// Prepares a machine for `goal`; nothing runs until the first `resume`.
    ///
    /// The pattern and goal are copied together, so variables they share stay shared.
    pub fn boot(pattern: &Term, goal: &Term) -> Result<Machine, MachineError> {
        if !goal.is_callable() {
            return Err(MachineError::type_error("callable", goal.deref()));
        }
        let both = copy_term(&Term::compound(
            atoms::COMMA,
            vec![pattern.clone(), goal.clone()],
        ));
        let parts = both.args();
        let mut trail = Bindings::new();
        trail.set_floor(0);
        Ok(Machine {
            goals: Some(Arc::new(Frame {
                goal: parts[1].clone(),
                barrier: 0,
                next: None,
            })),
            cps: Vec::new(),
            trail,
            pattern: parts[0].clone(),
            mailbox: VecDeque::new(),
            status: Status::Ready,
            redo: false,
            slots: Vec::new(),
        })
    }

    #[cfg(test)]
    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_dead(&self) -> bool {
        self.status == Status::Dead
    }

    #[cfg(test)]
    pub fn choice_points(&self) -> usize {
        self.cps.len()
    }

    #[cfg(test)]
    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    /// Queues a copy of `t` for `from_engine/1`; false if the machine is dead.
    pub fn deposit(&mut self, t: &Term) -> bool {
        if self.is_dead() {
            return false;
        }
        self.mailbox.push_back(copy_term(t));
        true
    }

    /// Releases all state; later resumes report `Exhausted`.
    pub fn kill(&mut self) {
        self.status = Status::Dead;
        self.redo = false;
        self.goals = None;
        self.cps.clear();
        self.trail.clear();
        self.mailbox.clear();
        self.slots.clear();
        self.pattern = Term::nil();
    }

    pub fn resume(&mut self, ctx: &Arc<Context>) -> MachineEvent {
        if self.is_dead() {
            return MachineEvent::Exhausted;
        }
        if self.redo {
            self.redo = false;
            if !self.backtrack() {
                self.kill();
                return MachineEvent::Exhausted;
            }
        }
        self.status = Status::Ready;
        loop {
            let Some(frame) = self.goals.take() else {
                let answer = copy_term(&self.pattern);
                self.redo = true;
                self.status = Status::Suspended;
                return MachineEvent::AnswerReady(answer);
            };
            let goal = frame.goal.clone();
            let barrier = frame.barrier;
            self.goals = frame.next.clone();
            drop(frame);
            match self.step(ctx, goal, barrier) {
                Ok(Flow::Continue) => {}
                Ok(Flow::Fail) => {
                    if !self.backtrack() {
                        self.kill();
                        return MachineEvent::Exhausted;
                    }
                }
                Ok(Flow::Yield(t)) => {
                    self.status = Status::Suspended;
                    return MachineEvent::Yielded(t);
                }
                Err(e) => {
                    self.kill();
                    return MachineEvent::Error(e);
                }
            }
        }
    }

    fn push_goal(&mut self, goal: Term, barrier: usize) {
        self.goals = Some(Arc::new(Frame {
            goal,
            barrier,
            next: self.goals.take(),
        }));
    }

    fn refresh_floor(&mut self) {
        let floor = self.cps.last().map_or(0, |cp| cp.var_mark);
        self.trail.set_floor(floor);
    }

    fn push_choice(&mut self, alt: Alternative) {
        let var_mark = serial_watermark();
        self.cps.push(ChoicePoint {
            alt,
            cont: self.goals.clone(),
            trail_mark: self.trail.mark(),
            var_mark,
        });
        self.trail.set_floor(var_mark);
    }

    fn cut(&mut self, barrier: usize) {
        if self.cps.len() <= barrier {
            return;
        }
        let mark = self.cps[barrier].trail_mark;
        self.cps.truncate(barrier);
        self.refresh_floor();
        self.trail.tidy(mark);
    }

    fn unify(&mut self, a: &Term, b: &Term) -> Flow {
        unify(a, b, &mut self.trail).into()
    }

    fn backtrack(&mut self) -> bool {
        loop {
            let Some(cp) = self.cps.last_mut() else {
                return false;
            };
            let mark = cp.trail_mark;
            let cont = cp.cont.clone();
            let depth = self.cps.len() - 1;
            self.trail.undo_to(mark);
            let cp = self.cps.last_mut().expect("choice point");
            match &mut cp.alt {
                Alternative::Clauses { goal, pred, next } => {
                    let goal = goal.clone();
                    let pred = pred.clone();
                    let index = *next;
                    let args: &[Term] = match &goal {
                        Term::Compound(c) => c.args(),
                        _ => &[],
                    };
                    let key = args.first().and_then(Key::of);
                    match pred.next_candidate(index + 1, key) {
                        Some(later) => *next = later,
                        None => {
                            self.cps.pop();
                            self.refresh_floor();
                        }
                    }
                    self.goals = cont;
                    if self.try_clause(&pred.clauses[index], args, depth) {
                        return true;
                    }
                }
                Alternative::Between { target, next, high } => {
                    let value = *next;
                    let target = target.clone();
                    if value >= *high {
                        self.cps.pop();
                        self.refresh_floor();
                    } else {
                        *next = value + 1;
                    }
                    self.goals = cont;
                    if unify(&target, &Term::Int(value), &mut self.trail) {
                        return true;
                    }
                }
            }
        }
    }

    fn call_user(
        &mut self,
        ctx: &Context,
        goal: &Term,
        name: Atom,
        args: &[Term],
    ) -> Result<Flow, MachineError> {
        let Some(pred) = ctx.db.lookup(name, args.len()).cloned() else {
            let indicator = Term::compound(
                atoms::DIV,
                vec![Term::Atom(name), Term::Int(args.len() as i64)],
            );
            return Err(MachineError::new(
                ErrorKind::UnknownPredicate,
                indicator,
                "no such predicate",
            ));
        };
        let key = args.first().and_then(Key::of);
        let Some(first) = pred.next_candidate(0, key) else {
            return Ok(Flow::Fail);
        };
        let depth = self.cps.len();
        if let Some(later) = pred.next_candidate(first + 1, key) {
            self.push_choice(Alternative::Clauses {
                goal: goal.clone(),
                pred: pred.clone(),
                next: later,
            });
        }
        Ok(self.try_clause(&pred.clauses[first], args, depth).into())
    }

    fn try_clause(&mut self, clause: &Clause, args: &[Term], barrier: usize) -> bool {
        let mut slots = std::mem::take(&mut self.slots);
        slots.clear();
        slots.resize(clause.slots, None);
        let mut ok = true;
        for (tpl, arg) in clause.head.iter().zip(args) {
            if !self.unify_head(tpl, arg, &mut slots) {
                ok = false;
                break;
            }
        }
        if ok {
            for goal in clause.body.iter().rev() {
                let goal = instantiate(goal, &mut slots);
                self.push_goal(goal, barrier);
            }
        }
        slots.clear();
        self.slots = slots;
        ok
    }

    fn unify_head(&mut self, tpl: &Template, term: &Term, slots: &mut [Option<Term>]) -> bool {
        match tpl {
            Template::Shared(t) => unify(t, term, &mut self.trail),
            Template::Slot(i) => match &slots[*i] {
                None => {
                    slots[*i] = Some(term.deref());
                    true
                }
                Some(bound) => {
                    let bound = bound.clone();
                    unify(&bound, term, &mut self.trail)
                }
            },
            Template::Struct(name, targs) => match term.deref() {
                Term::Var(v) => {
                    let built = instantiate(tpl, slots);
                    self.trail.bind(&v, built);
                    true
                }
                Term::Compound(c) if c.name() == *name && c.arity() == targs.len() => targs
                    .iter()
                    .zip(c.args())
                    .all(|(t, a)| self.unify_head(t, a, slots)),
                _ => false,
            },
        }
    }

    fn step(
        &mut self,
        ctx: &Arc<Context>,
        goal: Term,
        barrier: usize,
    ) -> Result<Flow, MachineError> {
        let goal = goal.deref();
        let (name, args): (Atom, &[Term]) = match &goal {
            Term::Atom(a) => (*a, &[]),
            Term::Compound(c) => (c.name(), c.args()),
            Term::Var(_) => return Err(MachineError::instantiation(goal.clone())),
            Term::Int(_) => return Err(MachineError::type_error("callable", goal.clone())),
        };
        let flow = match (name, args.len()) {
            (atoms::COMMA, 2) => {
                self.push_goal(args[1].clone(), barrier);
                self.push_goal(args[0].clone(), barrier);
                Flow::Continue
            }
            (atoms::TRUE, 0) => Flow::Continue,
            (atoms::FAIL, 0) | (atoms::FALSE, 0) => Flow::Fail,
            (atoms::CUT, 0) => {
                self.cut(barrier);
                Flow::Continue
            }
            (atoms::CALL, n) if n >= 1 => {
                let target = add_args(&args[0], &args[1..])?;
                let opaque = self.cps.len();
                self.push_goal(target, opaque);
                Flow::Continue
            }
            (atoms::UNIFY, 2) => self.unify(&args[0], &args[1]),
            (atoms::EQ, 2) => term_equal(&args[0], &args[1]).into(),
            (atoms::NEQ, 2) => (!term_equal(&args[0], &args[1])).into(),
            (atoms::IS, 2) => {
                let value = eval_arith(&args[1])?;
                self.unify(&args[0], &Term::Int(value))
            }
            (
                atoms::ARITH_EQ | atoms::ARITH_NE | atoms::LT | atoms::GT | atoms::LE | atoms::GE,
                2,
            ) => {
                let x = eval_arith(&args[0])?;
                let y = eval_arith(&args[1])?;
                let holds = match name {
                    atoms::ARITH_EQ => x == y,
                    atoms::ARITH_NE => x != y,
                    atoms::LT => x < y,
                    atoms::GT => x > y,
                    atoms::LE => x <= y,
                    _ => x >= y,
                };
                holds.into()
            }
            (atoms::VAR, 1) => matches!(args[0].deref(), Term::Var(_)).into(),
            (atoms::NONVAR, 1) => (!matches!(args[0].deref(), Term::Var(_))).into(),
            (atoms::BETWEEN, 3) => self.between(args)?,
            (atoms::RETURN, 1) => Flow::Yield(copy_term(&args[0])),
            (atoms::FROM_ENGINE, 1) => match self.mailbox.pop_front() {
                Some(data) => self.unify(&args[0], &data),
                None => {
                    return Err(MachineError::new(
                        ErrorKind::MailboxEmpty,
                        goal.clone(),
                        "from_engine/1 found no data",
                    ));
                }
            },
            (atoms::NEW_ENGINE, 3) => {
                let id = ctx.new_engine(&args[0], &args[1])?;
                self.unify(&args[2], &engine_handle(id))
            }
            (atoms::GET, 2) => {
                let id = engine_id(&args[0])?;
                let answer = match ctx.get(id)? {
                    Answer::The(t) => Term::compound(atoms::THE, vec![t]),
                    Answer::No => Term::Atom(atoms::NO),
                };
                self.unify(&args[1], &answer)
            }
            (atoms::STOP, 1) => {
                let handle = args[0].deref();
                match handle.functor() {
                    Some((atoms::HUB_TAG, 1)) => {
                        ctx.destroy_hub(tagged_id(&handle, atoms::HUB_TAG, "hub")?)
                    }
                    _ => ctx.stop(engine_id(&handle)?),
                }
                Flow::Continue
            }
            (atoms::TO_ENGINE, 2) => {
                let id = engine_id(&args[0])?;
                ctx.to_engine(id, &args[1]).into()
            }
            (atoms::BG, 1) => {
                threads::bg(ctx, &args[0])?;
                Flow::Continue
            }
            (atoms::RUN_BG, 2) => {
                let id = engine_id(&args[0])?;
                match threads::run_bg(ctx, id) {
                    Some(thread) => self.unify(&args[1], &thread.handle()),
                    None => Flow::Fail,
                }
            }
            (atoms::HUB_MS, 2) => {
                let hub = ctx.hub_ms(int_arg(&args[0])?)?;
                self.unify(&args[1], &hub.handle())
            }
            (atoms::PUT, 2) => {
                let id = tagged_id(&args[0], atoms::HUB_TAG, "hub")?;
                ctx.hub(id).is_some_and(|hub| hub.put(&args[1])).into()
            }
            (atoms::COLLECT, 2) => {
                let id = tagged_id(&args[0], atoms::HUB_TAG, "hub")?;
                match ctx.hub(id).and_then(|hub| hub.collect()) {
                    Some(data) => self.unify(&args[1], &data),
                    None => Flow::Fail,
                }
            }
            (atoms::CURRENT_THREAD, 1) => self.unify(&args[0], &threads::current_thread().handle()),
            (atoms::JOIN_THREAD, 1) => {
                let id = tagged_id(&args[0], atoms::THREAD_TAG, "thread")?;
                match threads::thread_ref(id) {
                    Some(thread) => {
                        thread.join()?;
                        Flow::Continue
                    }
                    None => Flow::Fail,
                }
            }
            (atoms::SLEEP_MS, 1) => {
                let ms = int_arg(&args[0])?;
                if ms < 0 {
                    return Err(MachineError::type_error(
                        "non-negative integer",
                        args[0].deref(),
                    ));
                }
                threads::sleep_ms(ms as u64);
                Flow::Continue
            }
            _ => self.call_user(ctx, &goal, name, args)?,
        };
        Ok(flow)
    }

    fn between(&mut self, args: &[Term]) -> Result<Flow, MachineError> {
        let low = int_arg(&args[0])?;
        let high = int_arg(&args[1])?;
        match args[2].deref() {
            Term::Int(x) => Ok((low <= x && x <= high).into()),
            Term::Var(_) => {
                if low > high {
                    return Ok(Flow::Fail);
                }
                if low < high {
                    self.push_choice(Alternative::Between {
                        target: args[2].clone(),
                        next: low + 1,
                        high,
                    });
                }
                Ok(self.unify(&args[2], &Term::Int(low)))
            }
            other => Err(MachineError::type_error("integer", other)),
        }
    }
}

fn instantiate(tpl: &Template, slots: &mut [Option<Term>]) -> Term {
    match tpl {
        Template::Shared(t) => t.clone(),
        Template::Slot(i) => slots[*i].get_or_insert_with(Term::var).clone(),
        Template::Struct(name, args) => {
            Term::compound(*name, args.iter().map(|a| instantiate(a, slots)).collect())
        }
    }
}

/// `call/N`: appends extra arguments to a callable term.
fn add_args(goal: &Term, extra: &[Term]) -> Result<Term, MachineError> {
    match goal.deref() {
        Term::Atom(a) => Ok(Term::compound(a, extra.to_vec())),
        Term::Compound(c) => {
            if extra.is_empty() {
                return Ok(Term::Compound(c));
            }
            let mut args = c.args().to_vec();
            args.extend_from_slice(extra);
            Ok(Term::compound(c.name(), args))
        }
        v @ Term::Var(_) => Err(MachineError::instantiation(v)),
        other => Err(MachineError::type_error("callable", other)),
    }
}

fn int_arg(t: &Term) -> Result<i64, MachineError> {
    match t.deref() {
        Term::Int(i) => Ok(i),
        v @ Term::Var(_) => Err(MachineError::instantiation(v)),
        other => Err(MachineError::type_error("integer", other)),
    }
}

pub(crate) fn engine_handle(id: u64) -> Term {
    Term::compound(atoms::ENGINE_TAG, vec![Term::Int(id as i64)])
}

fn tagged_id(t: &Term, tag: Atom, what: &str) -> Result<u64, MachineError> {
    let t = t.deref();
    if let Term::Var(_) = t {
        return Err(MachineError::instantiation(t));
    }
    if t.functor() == Some((tag, 1)) {
        if let Some(id) = t.args()[0].as_int() {
            return Ok(id as u64);
        }
    }
    Err(MachineError::type_error(what, t))
}

pub(crate) fn engine_id(t: &Term) -> Result<u64, MachineError> {
    tagged_id(t, atoms::ENGINE_TAG, "engine")
}

/// Names dispatched natively by the machine rather than looked up in the database.
pub fn is_builtin(name: Atom, arity: usize) -> bool {
    use atoms::*;
    matches!(
        (name, arity),
        (TRUE, 0)
            | (FAIL, 0)
            | (FALSE, 0)
            | (CUT, 0)
            | (COMMA, 2)
            | (UNIFY, 2)
            | (EQ, 2)
            | (NEQ, 2)
            | (IS, 2)
            | (ARITH_EQ, 2)
            | (ARITH_NE, 2)
            | (LT, 2)
            | (GT, 2)
            | (LE, 2)
            | (GE, 2)
            | (VAR, 1)
            | (NONVAR, 1)
            | (BETWEEN, 3)
            | (RETURN, 1)
            | (FROM_ENGINE, 1)
            | (NEW_ENGINE, 3)
            | (GET, 2)
            | (STOP, 1)
            | (TO_ENGINE, 2)
            | (BG, 1)
            | (RUN_BG, 2)
            | (HUB_MS, 2)
            | (PUT, 2)
            | (COLLECT, 2)
            | (CURRENT_THREAD, 1)
            | (JOIN_THREAD, 1)
            | (SLEEP_MS, 1)
    ) || (name == CALL && arity >= 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::DatabaseBuilder;
    use crate::reader::parse_query;
    use crate::writer::write_term;

    fn ctx(program: &str) -> Arc<Context> {
        let mut b = DatabaseBuilder::new();
        b.consult_str(program, None).unwrap();
        Context::new(b.build(), Arc::new(|_: &str| {}), false)
    }

    fn boot(_ctx: &Arc<Context>, pattern_and_goal: &str) -> Machine {
        let q = parse_query(pattern_and_goal).unwrap();
        let parts = q.term.args();
        Machine::boot(&parts[0], &parts[1]).unwrap()
    }

    fn describe(e: &MachineEvent) -> String {
        match e {
            MachineEvent::AnswerReady(t) => format!("answer {}", write_term(t)),
            MachineEvent::Yielded(t) => format!("yield {}", write_term(t)),
            MachineEvent::Exhausted => "exhausted".into(),
            MachineEvent::Error(e) => format!("error {}", e.kind),
        }
    }

    fn run(c: &Arc<Context>, m: &mut Machine, n: usize) -> Vec<String> {
        (0..n).map(|_| describe(&m.resume(c))).collect()
    }

    const LISTS: &str =
        "member(X,[X|_]).\nmember(X,[_|T]):-member(X,T).\nloop(N):-return(N),N1 is N+1,loop(N1).";

    #[test]
    fn member_answers_then_exhausts() {
        let c = ctx(LISTS);
        let mut m = boot(&c, "p(X, member(X,[1,2]))");
        assert_eq!(m.status(), Status::Ready);
        assert_eq!(
            run(&c, &mut m, 4),
            ["answer 1", "answer 2", "exhausted", "exhausted"]
        );
        assert!(m.is_dead());
    }

    #[test]
    fn return_yields_and_resumes() {
        let c = ctx(LISTS);
        let mut m = boot(&c, "p(_, loop(0))");
        assert_eq!(run(&c, &mut m, 3), ["yield 0", "yield 1", "yield 2"]);
        assert_eq!(m.status(), Status::Suspended);
    }

    #[test]
    fn fail_exhausts() {
        let c = ctx(LISTS);
        let mut m = boot(&c, "p(x, fail)");
        assert_eq!(run(&c, &mut m, 2), ["exhausted", "exhausted"]);
    }

    #[test]
    fn boot_rejects_non_callable() {
        let e = Machine::boot(&Term::var(), &Term::Int(7)).err().unwrap();
        assert_eq!(e.kind, ErrorKind::TypeError);
        let e = Machine::boot(&Term::var(), &Term::var()).err().unwrap();
        assert_eq!(e.kind, ErrorKind::TypeError);
    }

    #[test]
    fn boot_shares_pattern_with_goal_copy() {
        let c = ctx("q(1,2).");
        let q = parse_query("A-B").unwrap();
        let goal = Term::from_parts(
            "q",
            vec![
                Term::Var(q.names[0].1.clone()),
                Term::Var(q.names[1].1.clone()),
            ],
        );
        let mut m = Machine::boot(&q.term, &goal).unwrap();
        assert_eq!(run(&c, &mut m, 1), ["answer 1-2"]);
        // the caller's variables are untouched
        assert!(!q.names[0].1.is_bound());
    }

    #[test]
    fn mailbox_is_fifo_and_empty_read_is_an_error() {
        let c = ctx("two(X,Y):-from_engine(X),from_engine(Y).");
        let mut m = boot(&c, "p(X-Y, two(X,Y))");
        assert!(m.deposit(&Term::atom("first")));
        assert!(m.deposit(&Term::atom("second")));
        assert_eq!(run(&c, &mut m, 1), ["answer first-second"]);
        let mut m = boot(&c, "p(X-Y, two(X,Y))");
        assert_eq!(run(&c, &mut m, 2), ["error mailbox_empty", "exhausted"]);
        assert!(!m.deposit(&Term::atom("late")));
    }

    #[test]
    fn deposit_is_a_copy() {
        let c = ctx("echo(X):-from_engine(X).");
        let q = parse_query("p(X, echo(X))").unwrap();
        let parts = q.term.args();
        let mut m = Machine::boot(&parts[0], &parts[1]).unwrap();
        let data = Term::var();
        assert!(m.deposit(&Term::from_parts("d", vec![data.clone()])));
        match m.resume(&c) {
            MachineEvent::AnswerReady(t) => {
                let inner = t.args()[0].deref();
                match (inner, data.deref()) {
                    (Term::Var(a), Term::Var(b)) => assert!(!a.same(&b)),
                    _ => panic!("expected variables"),
                }
            }
            other => panic!("{}", describe(&other)),
        }
    }

    #[test]
    fn kill_is_idempotent() {
        let c = ctx(LISTS);
        let mut m = boot(&c, "p(X, member(X,[1,2]))");
        m.kill();
        m.kill();
        assert!(m.is_dead());
        assert_eq!(run(&c, &mut m, 1), ["exhausted"]);
    }

    #[test]
    fn errors_kill_the_machine() {
        let c = ctx("p(X) :- Y is X + 1, q(Y).");
        let mut m = boot(&c, "p(X, X is foo+1)");
        assert_eq!(run(&c, &mut m, 2), ["error type_error", "exhausted"]);
        let mut m = boot(&c, "p(X, p(1))");
        assert_eq!(run(&c, &mut m, 1), ["error unknown_predicate"]);
        let mut m = boot(&c, "p(X, X is Y)");
        assert_eq!(run(&c, &mut m, 1), ["error instantiation_error"]);
        let mut m = boot(&c, "p(X, X is 1/0)");
        assert_eq!(run(&c, &mut m, 1), ["error arith_error"]);
        let mut m = boot(&c, "p(X, call(X))");
        assert_eq!(run(&c, &mut m, 1), ["error instantiation_error"]);
    }

    #[test]
    fn cut_is_local_to_its_clause() {
        let c = ctx("first(X,[X|_]) :- !.\nfirst(X,[_|T]) :- first(X,T).\n\
             member(X,[X|_]).\nmember(X,[_|T]):-member(X,T).\n\
             t(X) :- member(X,[1,2,3]), first(_, [a,b]).\n\
             c(X) :- call((member(X,[1,2,3]), !)).\n\
             d(X) :- member(X,[1,2,3]), !.\nd(9).");
        let mut m = boot(&c, "p(X, first(X,[a,b,c]))");
        assert_eq!(run(&c, &mut m, 2), ["answer a", "exhausted"]);
        let mut m = boot(&c, "p(X, t(X))");
        assert_eq!(
            run(&c, &mut m, 4),
            ["answer 1", "answer 2", "answer 3", "exhausted"]
        );
        let mut m = boot(&c, "p(X, c(X))");
        assert_eq!(run(&c, &mut m, 2), ["answer 1", "exhausted"]);
        let mut m = boot(&c, "p(X, d(X))");
        assert_eq!(run(&c, &mut m, 2), ["answer 1", "exhausted"]);
    }

    #[test]
    fn between_generates_on_backtracking() {
        let c = ctx("");
        let mut m = boot(&c, "p(X, between(1,3,X))");
        assert_eq!(
            run(&c, &mut m, 4),
            ["answer 1", "answer 2", "answer 3", "exhausted"]
        );
        let mut m = boot(&c, "p(x, between(1,3,2))");
        assert_eq!(run(&c, &mut m, 2), ["answer x", "exhausted"]);
        let mut m = boot(&c, "p(X, between(3,1,X))");
        assert_eq!(run(&c, &mut m, 1), ["exhausted"]);
    }

    #[test]
    fn call_adds_arguments() {
        let c = ctx("add(X,Y,Z) :- Z is X+Y.");
        let mut m = boot(&c, "p(R, call(add(1),2,R))");
        assert_eq!(run(&c, &mut m, 1), ["answer 3"]);
        let mut m = boot(&c, "p(yes, call(>, 3, 2))");
        assert_eq!(run(&c, &mut m, 1), ["answer yes"]);
        let mut m = boot(&c, "p(yes, call(>, 2, 3))");
        assert_eq!(run(&c, &mut m, 1), ["exhausted"]);
    }

    #[test]
    fn deep_recursion_uses_no_host_stack() {
        let c = ctx(
            "count(N,N).\ncount(I,N) :- I < N, I1 is I+1, count(I1,N).\n\
                     len([],0).\nlen([_|T],N) :- len(T,M), N is M+1.\n\
                     mk(0,[]) :- !.\nmk(N,[N|T]) :- N1 is N-1, mk(N1,T).",
        );
        let mut m = boot(&c, "p(ok, mk(300000, L))");
        assert_eq!(run(&c, &mut m, 1), ["answer ok"]);
        let mut m = boot(&c, "p(N, (mk(200000, L), len(L, N)))");
        assert_eq!(run(&c, &mut m, 1), ["answer 200000"]);
    }

    #[test]
    fn deterministic_loops_run_in_constant_state() {
        let c = ctx("loop(N):-return(N),N1 is N+1,loop(N1).\n\
                     s(the(X), X).\ns(no, none).\n\
                     cl(N) :- s(the(N), _), return(N), N1 is N+1, cl(N1).");
        let mut m = boot(&c, "p(_, cl(0))");
        for _ in 0..10_000 {
            assert!(matches!(m.resume(&c), MachineEvent::Yielded(_)));
        }
        assert_eq!(m.choice_points(), 0);
        assert_eq!(m.trail_len(), 0);
    }

    #[test]
    fn answers_are_isolated_copies() {
        let c = ctx(LISTS);
        let mut m = boot(&c, "p(f(X,Y), member(X-Y,[1-A, 2-A]))");
        let first = match m.resume(&c) {
            MachineEvent::AnswerReady(t) => t,
            other => panic!("{}", describe(&other)),
        };
        let mut trail = Bindings::new();
        assert!(unify(
            &first,
            &parse_query("f(1, bound)").unwrap().term,
            &mut trail
        ));
        assert!(write_term(&first).contains("bound"));
        match m.resume(&c) {
            MachineEvent::AnswerReady(t) => {
                let s = write_term(&t);
                assert!(s.starts_with("f(2,_G"), "{s}");
            }
            other => panic!("{}", describe(&other)),
        }
    }
}
