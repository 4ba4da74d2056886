//! An embeddable Horn-clause engine whose engines are first-class values.
//!
//! Each engine runs a goal over a shared, frozen program and hands its
//! answers to the client one at a time. A client may also inject terms into
//! an engine, and an engine may suspend itself mid-computation with
//! `return/1`. Dynamic databases, exceptions, `findall` and if-then-else are
//! built from these operations in the prelude.
//!
//! ```
//! use interactors::Runtime;
//!
//! let rt = Runtime::builder().build();
//! let answers = rt.answers("inc_test(R1,R2)", None).unwrap();
//! assert_eq!(answers, ["R1=the(0=>2), R2=the(2=>7)"]);
//! ```

mod arith;
pub mod database;
mod engine;
pub mod error;
pub mod machine;
pub mod ops;
pub mod prelude;
pub mod reader;
pub mod repl;
pub mod symbol;
pub mod term;
pub mod threads;
pub mod writer;

pub use arith::eval_arith;
pub use database::{Database, DatabaseBuilder};
pub use engine::{Answer, Engine, Query, Reply, Runtime, RuntimeBuilder};
pub use error::{Error, ErrorKind, LoadError, MachineError};
pub use machine::MachineEvent;
pub use reader::{parse_program, parse_query, parse_term, ParseError};
pub use symbol::Atom;
pub use term::{copy_term, unify, variant, Bindings, Term, Var};
pub use threads::{current_thread, sleep_ms, Hub, ThreadRef};
pub use writer::write_term;
