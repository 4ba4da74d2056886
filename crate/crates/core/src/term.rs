//! Terms, variable cells, the binding trail, unification and renaming.
//!
//! Variables are shared, mutable binding slots. Every variable carries a
//! process-wide serial number taken from a monotonic counter; the machine
//! compares serials against choice-point watermarks to decide whether a
//! binding has to be trailed, and the writer prints them as `_G<serial>`.

use std::cell::Cell;
use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::Mutex;

use crate::symbol::{atoms, Atom};

static NEXT_SERIAL: AtomicU64 = AtomicU64::new(1);

/// The serial the next fresh variable will receive.
pub fn serial_watermark() -> u64 {
    NEXT_SERIAL.load(Ordering::Relaxed)
}

#[derive(Clone)]
pub enum Term {
    Var(Var),
    Atom(Atom),
    Int(i64),
    Compound(Arc<Compound>),
}

pub struct Compound {
    name: Atom,
    args: Vec<Term>,
    ground: bool,
}

#[derive(Clone)]
pub struct Var(Arc<VarCell>);

struct VarCell {
    serial: u64,
    binding: Mutex<Option<Term>>,
}

impl Var {
    pub fn fresh() -> Var {
        Var(Arc::new(VarCell {
            serial: NEXT_SERIAL.fetch_add(1, Ordering::Relaxed),
            binding: Mutex::new(None),
        }))
    }

    pub fn serial(&self) -> u64 {
        self.0.serial
    }

    pub fn binding(&self) -> Option<Term> {
        self.0.binding.lock().clone()
    }

    pub fn is_bound(&self) -> bool {
        self.0.binding.lock().is_some()
    }

    pub fn same(&self, other: &Var) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    fn set(&self, value: Term) {
        *self.0.binding.lock() = Some(value);
    }

    fn reset(&self) {
        let old = self.0.binding.lock().take();
        release(old);
    }
}

impl Term {
    pub fn var() -> Term {
        Term::Var(Var::fresh())
    }

    pub fn atom(text: &str) -> Term {
        Term::Atom(Atom::new(text))
    }

    pub fn int(value: i64) -> Term {
        Term::Int(value)
    }

    pub fn compound(name: Atom, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return Term::Atom(name);
        }
        let ground = args.iter().all(Term::is_ground_shallow);
        Term::Compound(Arc::new(Compound { name, args, ground }))
    }

    pub fn from_parts(name: &str, args: Vec<Term>) -> Term {
        Term::compound(Atom::new(name), args)
    }

    pub fn nil() -> Term {
        Term::Atom(atoms::NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(atoms::DOT, vec![head, tail])
    }

    /// Builds `[items | tail]`.
    pub fn list_with_tail(items: impl IntoIterator<Item = Term>, tail: Term) -> Term {
        let items: Vec<Term> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn list(items: impl IntoIterator<Item = Term>) -> Term {
        Term::list_with_tail(items, Term::nil())
    }

    fn is_ground_shallow(&self) -> bool {
        match self {
            Term::Atom(_) | Term::Int(_) => true,
            Term::Compound(c) => c.ground,
            Term::Var(_) => false,
        }
    }

    /// Follows variable bindings until an unbound variable or a non-variable.
    pub fn deref(&self) -> Term {
        let mut current = self.clone();
        loop {
            let next = match &current {
                Term::Var(v) => match v.binding() {
                    Some(bound) => bound,
                    None => return current,
                },
                _ => return current,
            };
            current = next;
        }
    }

    pub fn as_atom(&self) -> Option<Atom> {
        match self.deref() {
            Term::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.deref() {
            Term::Int(i) => Some(i),
            _ => None,
        }
    }

    /// Name and arity of an atom or compound.
    pub fn functor(&self) -> Option<(Atom, usize)> {
        match self.deref() {
            Term::Atom(a) => Some((a, 0)),
            Term::Compound(c) => Some((c.name, c.args.len())),
            _ => None,
        }
    }

    /// Arguments of a compound (empty for anything else), not dereferenced.
    pub fn args(&self) -> Vec<Term> {
        match self.deref() {
            Term::Compound(c) => c.args.clone(),
            _ => Vec::new(),
        }
    }

    pub fn is_callable(&self) -> bool {
        matches!(self.deref(), Term::Atom(_) | Term::Compound(_))
    }

    /// Collects the elements of a proper list; `None` for partial or improper lists.
    pub fn to_vec(&self) -> Option<Vec<Term>> {
        let mut items = Vec::new();
        let mut current = self.deref();
        loop {
            match &current {
                Term::Atom(a) if *a == atoms::NIL => return Some(items),
                Term::Compound(c) if c.name == atoms::DOT && c.args.len() == 2 => {
                    items.push(c.args[0].clone());
                    let tail = c.args[1].deref();
                    current = tail;
                }
                _ => return None,
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            match t.deref() {
                Term::Var(_) => return false,
                Term::Compound(c) if !c.ground => stack.extend(c.args.iter().cloned()),
                _ => {}
            }
        }
        true
    }
}

impl Compound {
    pub fn name(&self) -> Atom {
        self.name
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.ground
    }
}

impl From<i64> for Term {
    fn from(value: i64) -> Term {
        Term::Int(value)
    }
}

impl From<Atom> for Term {
    fn from(atom: Atom) -> Term {
        Term::Atom(atom)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::writer::write_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::writer::write_term(self))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_G{}", self.serial())
    }
}

// Long lists and deep continuations would otherwise be freed recursively
// without bound. Shallow terms drop recursively, which needs no allocation;
// past DROP_DEPTH nested drops the rest is freed with an explicit stack.
const DROP_DEPTH: u32 = 512;

thread_local! {
    static DROP_NESTING: Cell<u32> = const { Cell::new(0) };
}

fn nested_drop(f: impl FnOnce()) -> bool {
    DROP_NESTING.with(|n| {
        let depth = n.get();
        if depth >= DROP_DEPTH {
            return false;
        }
        n.set(depth + 1);
        f();
        n.set(depth);
        true
    })
}

impl Drop for Compound {
    fn drop(&mut self) {
        if self
            .args
            .iter()
            .all(|a| matches!(a, Term::Atom(_) | Term::Int(_)))
        {
            return;
        }
        let args = std::mem::take(&mut self.args);
        let mut pending = Some(args);
        if nested_drop(|| drop(pending.take())) {
            return;
        }
        let mut stack = pending.take().unwrap_or_default();
        while let Some(t) = stack.pop() {
            dismantle(t, &mut stack);
        }
    }
}

impl Drop for VarCell {
    fn drop(&mut self) {
        let mut pending = self.binding.get_mut().take();
        if pending.is_none() || nested_drop(|| drop(pending.take())) {
            return;
        }
        release(pending);
    }
}

fn release(term: Option<Term>) {
    let Some(term) = term else { return };
    let mut stack = Vec::new();
    dismantle(term, &mut stack);
    while let Some(t) = stack.pop() {
        dismantle(t, &mut stack);
    }
}

/// Moves the children of a uniquely owned node onto `stack` before the node drops.
fn dismantle(term: Term, stack: &mut Vec<Term>) {
    match term {
        Term::Compound(c) => {
            if let Ok(mut c) = Arc::try_unwrap(c) {
                stack.append(&mut c.args);
            }
        }
        Term::Var(v) => {
            if let Ok(mut cell) = Arc::try_unwrap(v.0) {
                if let Some(b) = cell.binding.get_mut().take() {
                    stack.push(b);
                }
            }
        }
        Term::Atom(_) | Term::Int(_) => {}
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrailMark(usize);

/// The binding trail.
///
/// Variables whose serial is at or above `floor` were created after the newest
/// choice point and are not recorded: backtracking makes them unreachable.
/// A standalone trail has `floor = u64::MAX` and records every binding.
pub struct Bindings {
    entries: Vec<Var>,
    floor: u64,
    pending: Vec<Var>,
    pairs: Vec<(Term, Term)>,
}

impl Default for Bindings {
    fn default() -> Self {
        Bindings::new()
    }
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings {
            entries: Vec::new(),
            floor: u64::MAX,
            pending: Vec::new(),
            pairs: Vec::new(),
        }
    }

    pub fn mark(&self) -> TrailMark {
        TrailMark(self.entries.len())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Unbinds, newest first, every variable recorded after `mark`.
    pub fn undo_to(&mut self, mark: TrailMark) {
        while self.entries.len() > mark.0 {
            let v = self.entries.pop().expect("trail entry");
            v.reset();
        }
    }

    pub(crate) fn set_floor(&mut self, floor: u64) {
        self.floor = floor;
    }

    /// Drops entries above `mark` that no longer need undoing under the current floor.
    pub(crate) fn tidy(&mut self, mark: TrailMark) {
        let floor = self.floor;
        let mut keep = mark.0;
        for i in mark.0..self.entries.len() {
            if self.entries[i].serial() < floor {
                self.entries.swap(keep, i);
                keep += 1;
            }
        }
        self.entries.truncate(keep);
    }

    pub(crate) fn clear(&mut self) {
        self.entries.clear();
    }

    /// Binds an unbound variable, trailing it if it predates the floor.
    pub(crate) fn bind(&mut self, var: &Var, value: Term) {
        var.set(value);
        if var.serial() < self.floor {
            self.entries.push(var.clone());
        }
    }

    fn bind_pending(&mut self, var: &Var, value: Term) {
        var.set(value);
        self.pending.push(var.clone());
    }

    fn commit(&mut self) {
        let floor = self.floor;
        for v in self.pending.drain(..) {
            if v.serial() < floor {
                self.entries.push(v);
            }
        }
    }

    fn rollback(&mut self) {
        while let Some(v) = self.pending.pop() {
            v.reset();
        }
    }
}

/// Unifies `a` and `b` without occurs-check.
///
/// On failure every binding made by this call is undone before returning.
pub fn unify(a: &Term, b: &Term, trail: &mut Bindings) -> bool {
    let mut pairs = std::mem::take(&mut trail.pairs);
    pairs.clear();
    pairs.push((a.clone(), b.clone()));
    let mut ok = true;
    while let Some((x, y)) = pairs.pop() {
        let x = x.deref();
        let y = y.deref();
        match (&x, &y) {
            (Term::Var(vx), Term::Var(vy)) => {
                if vx.same(vy) {
                    continue;
                }
                // younger points at older
                if vx.serial() < vy.serial() {
                    trail.bind_pending(vy, x.clone());
                } else {
                    trail.bind_pending(vx, y.clone());
                }
            }
            (Term::Var(vx), _) => trail.bind_pending(vx, y.clone()),
            (_, Term::Var(vy)) => trail.bind_pending(vy, x.clone()),
            (Term::Atom(p), Term::Atom(q)) => {
                if p != q {
                    ok = false;
                    break;
                }
            }
            (Term::Int(p), Term::Int(q)) => {
                if p != q {
                    ok = false;
                    break;
                }
            }
            (Term::Compound(cx), Term::Compound(cy)) => {
                if Arc::ptr_eq(cx, cy) {
                    continue;
                }
                if cx.name != cy.name || cx.args.len() != cy.args.len() {
                    ok = false;
                    break;
                }
                for (p, q) in cx.args.iter().zip(cy.args.iter()).rev() {
                    pairs.push((p.clone(), q.clone()));
                }
            }
            _ => {
                ok = false;
                break;
            }
        }
    }
    pairs.clear();
    trail.pairs = pairs;
    if ok {
        trail.commit();
    } else {
        trail.rollback();
    }
    ok
}

/// Structural identity (`==`): variables are equal only to themselves.
pub fn term_equal(a: &Term, b: &Term) -> bool {
    let mut pairs = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = pairs.pop() {
        match (x.deref(), y.deref()) {
            (Term::Var(vx), Term::Var(vy)) => {
                if !vx.same(&vy) {
                    return false;
                }
            }
            (Term::Atom(p), Term::Atom(q)) if p == q => {}
            (Term::Int(p), Term::Int(q)) if p == q => {}
            (Term::Compound(cx), Term::Compound(cy)) => {
                if Arc::ptr_eq(&cx, &cy) {
                    continue;
                }
                if cx.name != cy.name || cx.args.len() != cy.args.len() {
                    return false;
                }
                pairs.extend(cx.args.iter().cloned().zip(cy.args.iter().cloned()));
            }
            _ => return false,
        }
    }
    true
}

/// True when `a` and `b` are equal up to a consistent renaming of variables.
pub fn variant(a: &Term, b: &Term) -> bool {
    let mut left: HashMap<usize, usize> = HashMap::new();
    let mut right: HashMap<usize, usize> = HashMap::new();
    let mut pairs = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = pairs.pop() {
        match (x.deref(), y.deref()) {
            (Term::Var(vx), Term::Var(vy)) => {
                let (kx, ky) = (vx.addr(), vy.addr());
                match (left.get(&kx), right.get(&ky)) {
                    (None, None) => {
                        left.insert(kx, ky);
                        right.insert(ky, kx);
                    }
                    (Some(&mx), Some(&my)) if mx == ky && my == kx => {}
                    _ => return false,
                }
            }
            (Term::Atom(p), Term::Atom(q)) if p == q => {}
            (Term::Int(p), Term::Int(q)) if p == q => {}
            (Term::Compound(cx), Term::Compound(cy)) => {
                if cx.name != cy.name || cx.args.len() != cy.args.len() {
                    return false;
                }
                pairs.extend(cx.args.iter().cloned().zip(cy.args.iter().cloned()));
            }
            _ => return false,
        }
    }
    true
}

enum CopyTask {
    Visit(Term),
    Build(Atom, usize),
    Finish(usize),
}

enum Copied {
    InProgress,
    Placeholder(Var),
    Done(Term),
}

/// Returns a renamed copy of `t`.
///
/// Distinct unbound variables map to distinct fresh variables, sharing is
/// preserved, bound variables are replaced by copies of their values, and
/// ground compounds are shared rather than copied. Cyclic bindings are
/// reproduced as cyclic bindings in the copy.
pub fn copy_term(t: &Term) -> Term {
    let mut fresh: HashMap<usize, Term> = HashMap::new();
    let mut bound: HashMap<usize, Copied> = HashMap::new();
    let mut tasks = vec![CopyTask::Visit(t.clone())];
    let mut values: Vec<Term> = Vec::new();
    while let Some(task) = tasks.pop() {
        match task {
            CopyTask::Visit(term) => match term {
                Term::Atom(_) | Term::Int(_) => values.push(term),
                Term::Compound(ref c) if c.ground => values.push(term.clone()),
                Term::Compound(c) => {
                    tasks.push(CopyTask::Build(c.name, c.args.len()));
                    for arg in c.args.iter().rev() {
                        tasks.push(CopyTask::Visit(arg.clone()));
                    }
                }
                Term::Var(v) => match v.binding() {
                    None => {
                        let copy = fresh.entry(v.addr()).or_insert_with(Term::var).clone();
                        values.push(copy);
                    }
                    Some(value) => {
                        let key = v.addr();
                        match bound.get_mut(&key) {
                            Some(Copied::Done(t)) => values.push(t.clone()),
                            Some(Copied::Placeholder(p)) => values.push(Term::Var(p.clone())),
                            Some(entry @ Copied::InProgress) => {
                                let p = Var::fresh();
                                values.push(Term::Var(p.clone()));
                                *entry = Copied::Placeholder(p);
                            }
                            None => {
                                bound.insert(key, Copied::InProgress);
                                tasks.push(CopyTask::Finish(key));
                                tasks.push(CopyTask::Visit(value));
                            }
                        }
                    }
                },
            },
            CopyTask::Build(name, arity) => {
                let args = values.split_off(values.len() - arity);
                values.push(Term::compound(name, args));
            }
            CopyTask::Finish(key) => {
                let copy = values.last().expect("copied value").clone();
                if let Some(Copied::Placeholder(p)) = bound.get(&key) {
                    p.set(copy.clone());
                }
                bound.insert(key, Copied::Done(copy));
            }
        }
    }
    values.pop().expect("copy result")
}

/// Every distinct unbound variable of `t`, in depth-first left-to-right order.
pub fn term_variables(t: &Term) -> Vec<Var> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut stack = vec![t.clone()];
    while let Some(x) = stack.pop() {
        match x.deref() {
            Term::Var(v) => {
                if seen.insert(v.addr()) {
                    out.push(v);
                }
            }
            Term::Compound(c) if !c.ground => {
                for a in c.args.iter().rev() {
                    stack.push(a.clone());
                }
            }
            _ => {}
        }
    }
    out
}
