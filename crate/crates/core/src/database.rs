//! The frozen clause database.
//!
//! Clauses are stored as templates: variables become frame slots and ground
//! subterms are kept as shared terms, so renaming a clause only allocates for
//! its non-ground structure.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::LoadError;
use crate::reader::{self, SourceClause};
use crate::symbol::{atoms, Atom};
use crate::term::{Term, Var};

#[derive(Clone, Debug)]
pub(crate) enum Template {
    Slot(usize),
    Shared(Term),
    Struct(Atom, Box<[Template]>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Key {
    Atom(Atom),
    Int(i64),
    Functor(Atom, usize),
}

impl Key {
    pub(crate) fn of(t: &Term) -> Option<Key> {
        match t.deref() {
            Term::Atom(a) => Some(Key::Atom(a)),
            Term::Int(i) => Some(Key::Int(i)),
            Term::Compound(c) => Some(Key::Functor(c.name(), c.arity())),
            Term::Var(_) => None,
        }
    }
}

#[derive(Debug)]
pub(crate) struct Clause {
    pub(crate) slots: usize,
    pub(crate) head: Box<[Template]>,
    pub(crate) body: Box<[Template]>,
    pub(crate) key: Option<Key>,
}

#[derive(Debug)]
pub struct Predicate {
    name: Atom,
    arity: usize,
    pub(crate) clauses: Vec<Clause>,
}

impl Predicate {
    pub fn name(&self) -> Atom {
        self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Index of the first clause at or after `from` whose first head argument can match `first`.
    pub(crate) fn next_candidate(&self, from: usize, first: Option<Key>) -> Option<usize> {
        (from..self.clauses.len()).find(|&i| match (first, self.clauses[i].key) {
            (Some(goal), Some(head)) => goal == head,
            _ => true,
        })
    }
}

/// Predicates indexed by name and arity, in source order.
#[derive(Debug, Default)]
pub struct Database {
    preds: HashMap<(Atom, usize), Arc<Predicate>>,
}

impl Database {
    pub fn lookup(&self, name: Atom, arity: usize) -> Option<&Arc<Predicate>> {
        self.preds.get(&(name, arity))
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Arc<Predicate>> {
        self.preds.values()
    }

    /// Body goals that name neither a builtin nor a defined predicate.
    pub fn undefined_callees(&self) -> Vec<(Atom, usize)> {
        let mut missing = Vec::new();
        for pred in self.preds.values() {
            for clause in &pred.clauses {
                for goal in clause.body.iter() {
                    let (name, arity) = match goal {
                        Template::Shared(t) => match t.functor() {
                            Some(f) => f,
                            None => continue,
                        },
                        Template::Struct(name, args) => (*name, args.len()),
                        Template::Slot(_) => continue,
                    };
                    if is_control(name, arity) {
                        continue;
                    }
                    if !crate::machine::is_builtin(name, arity)
                        && self.lookup(name, arity).is_none()
                        && !missing.contains(&(name, arity))
                    {
                        missing.push((name, arity));
                    }
                }
            }
        }
        missing
    }
}

fn is_control(name: Atom, arity: usize) -> bool {
    matches!(
        (name, arity),
        (atoms::COMMA, 2) | (atoms::TRUE, 0) | (atoms::FAIL, 0) | (atoms::CUT, 0)
    ) || (name == atoms::CALL && arity >= 1)
}

/// Accumulates clauses before the database is frozen.
///
/// A predicate defined in one source unit and defined again by a later unit
/// is replaced, so reconsulting a listing does not duplicate clauses.
#[derive(Default)]
pub struct DatabaseBuilder {
    preds: HashMap<(Atom, usize), (usize, Vec<Clause>)>,
    unit: usize,
}

impl DatabaseBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn consult_str(&mut self, text: &str, origin: Option<&str>) -> Result<usize, LoadError> {
        let clauses = reader::parse_program_named(text, origin).map_err(|error| match origin {
            Some(file) => LoadError::ParseIn {
                file: file.to_string(),
                error,
            },
            None => LoadError::Parse(error),
        })?;
        self.add_clauses(&clauses)
    }

    /// Adds clauses as one source unit; returns how many were added.
    pub fn add_clauses(&mut self, clauses: &[SourceClause]) -> Result<usize, LoadError> {
        self.unit += 1;
        for sc in clauses {
            let (name, arity) = sc.head.functor().expect("parser guarantees callable heads");
            if crate::machine::is_builtin(name, arity) || is_control(name, arity) {
                return Err(LoadError::Builtin {
                    name: name.to_string(),
                    arity,
                    origin: sc.origin.to_string(),
                });
            }
            let clause = compile(sc)?;
            let entry = self
                .preds
                .entry((name, arity))
                .or_insert_with(|| (self.unit, Vec::new()));
            if entry.0 != self.unit {
                *entry = (self.unit, Vec::new());
            }
            entry.1.push(clause);
        }
        Ok(clauses.len())
    }

    pub fn build(self) -> Database {
        let preds = self
            .preds
            .into_iter()
            .map(|((name, arity), (_, clauses))| {
                (
                    (name, arity),
                    Arc::new(Predicate {
                        name,
                        arity,
                        clauses,
                    }),
                )
            })
            .collect();
        Database { preds }
    }
}

struct Compiler {
    slots: Vec<Var>,
}

impl Compiler {
    fn template(&mut self, t: &Term) -> Template {
        match t.deref() {
            Term::Var(v) => {
                let slot = match self.slots.iter().position(|s| s.same(&v)) {
                    Some(i) => i,
                    None => {
                        self.slots.push(v);
                        self.slots.len() - 1
                    }
                };
                Template::Slot(slot)
            }
            t @ (Term::Atom(_) | Term::Int(_)) => Template::Shared(t),
            Term::Compound(c) => {
                if c.is_ground() {
                    return Template::Shared(Term::Compound(c));
                }
                let args: Vec<Template> = c.args().iter().map(|a| self.template(a)).collect();
                if args.iter().all(|a| matches!(a, Template::Shared(_))) {
                    let shared = args
                        .into_iter()
                        .map(|a| match a {
                            Template::Shared(t) => t,
                            _ => unreachable!(),
                        })
                        .collect();
                    return Template::Shared(Term::compound(c.name(), shared));
                }
                Template::Struct(c.name(), args.into_boxed_slice())
            }
        }
    }
}

fn flatten_body(t: &Term, out: &mut Vec<Term>) {
    let t = t.deref();
    match t.functor() {
        Some((atoms::COMMA, 2)) => {
            let args = t.args();
            flatten_body(&args[0], out);
            flatten_body(&args[1], out);
        }
        _ => out.push(t),
    }
}

fn compile(sc: &SourceClause) -> Result<Clause, LoadError> {
    let mut goals = Vec::new();
    let body = sc.body.deref();
    if body.as_atom() != Some(atoms::TRUE) {
        flatten_body(&body, &mut goals);
    }
    let mut compiler = Compiler { slots: Vec::new() };
    let head_args = sc.head.args();
    let head: Box<[Template]> = head_args.iter().map(|a| compiler.template(a)).collect();
    let key = head_args.first().and_then(Key::of);
    let mut body_templates = Vec::with_capacity(goals.len());
    for goal in goals {
        let goal = match goal.deref() {
            // a variable goal behaves as call/1
            v @ Term::Var(_) => Term::compound(atoms::CALL, vec![v]),
            Term::Int(_) => {
                return Err(LoadError::NotCallable {
                    goal: goal.to_string(),
                    origin: sc.origin.to_string(),
                })
            }
            g => g,
        };
        body_templates.push(compiler.template(&goal));
    }
    Ok(Clause {
        slots: compiler.slots.len(),
        head,
        body: body_templates.into_boxed_slice(),
        key,
    })
}
