//! Process-wide atom interning.
//!
//! Atoms are small copyable ids; the text lives in a global table so terms can
//! move freely between engines and threads. A fixed set of atoms the machine
//! dispatches on is interned first, in a known order, so it can be matched by
//! constant.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(u32);

struct Interner {
    names: Vec<Arc<str>>,
    ids: HashMap<Arc<str>, u32>,
}

impl Interner {
    fn insert(&mut self, text: &str) -> Atom {
        if let Some(&id) = self.ids.get(text) {
            return Atom(id);
        }
        let id = u32::try_from(self.names.len()).expect("atom table overflow");
        let name: Arc<str> = Arc::from(text);
        self.names.push(name.clone());
        self.ids.insert(name, id);
        Atom(id)
    }
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(|| {
    let mut interner = Interner {
        names: Vec::with_capacity(256),
        ids: HashMap::with_capacity(256),
    };
    for text in atoms::WELL_KNOWN {
        interner.insert(text);
    }
    RwLock::new(interner)
});

impl Atom {
    pub fn new(text: &str) -> Atom {
        if let Some(&id) = INTERNER.read().ids.get(text) {
            return Atom(id);
        }
        INTERNER.write().insert(text)
    }

    pub fn name(self) -> Arc<str> {
        INTERNER.read().names[self.0 as usize].clone()
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl From<&str> for Atom {
    fn from(text: &str) -> Atom {
        Atom::new(text)
    }
}

/// Atoms with fixed ids. The order of `WELL_KNOWN` must match the constants.
pub mod atoms {
    use super::Atom;

    pub(super) const WELL_KNOWN: &[&str] = &[
        "[]",
        ".",
        ",",
        "true",
        "fail",
        "!",
        "call",
        "=",
        "==",
        "\\==",
        "is",
        "=:=",
        "=\\=",
        "<",
        ">",
        "=<",
        ">=",
        "var",
        "nonvar",
        "between",
        "return",
        "from_engine",
        "new_engine",
        "get",
        "stop",
        "to_engine",
        "the",
        "no",
        "$engine",
        "$hub",
        "$thread",
        "bg",
        "run_bg",
        "hub_ms",
        "put",
        "collect",
        "current_thread",
        "join_thread",
        "sleep_ms",
        ":-",
        "-",
        "+",
        "*",
        "/",
        "mod",
        "integer",
        "sqrt",
        "exception",
        "false",
    ];

    pub const NIL: Atom = Atom(0);
    pub const DOT: Atom = Atom(1);
    pub const COMMA: Atom = Atom(2);
    pub const TRUE: Atom = Atom(3);
    pub const FAIL: Atom = Atom(4);
    pub const CUT: Atom = Atom(5);
    pub const CALL: Atom = Atom(6);
    pub const UNIFY: Atom = Atom(7);
    pub const EQ: Atom = Atom(8);
    pub const NEQ: Atom = Atom(9);
    pub const IS: Atom = Atom(10);
    pub const ARITH_EQ: Atom = Atom(11);
    pub const ARITH_NE: Atom = Atom(12);
    pub const LT: Atom = Atom(13);
    pub const GT: Atom = Atom(14);
    pub const LE: Atom = Atom(15);
    pub const GE: Atom = Atom(16);
    pub const VAR: Atom = Atom(17);
    pub const NONVAR: Atom = Atom(18);
    pub const BETWEEN: Atom = Atom(19);
    pub const RETURN: Atom = Atom(20);
    pub const FROM_ENGINE: Atom = Atom(21);
    pub const NEW_ENGINE: Atom = Atom(22);
    pub const GET: Atom = Atom(23);
    pub const STOP: Atom = Atom(24);
    pub const TO_ENGINE: Atom = Atom(25);
    pub const THE: Atom = Atom(26);
    pub const NO: Atom = Atom(27);
    pub const ENGINE_TAG: Atom = Atom(28);
    pub const HUB_TAG: Atom = Atom(29);
    pub const THREAD_TAG: Atom = Atom(30);
    pub const BG: Atom = Atom(31);
    pub const RUN_BG: Atom = Atom(32);
    pub const HUB_MS: Atom = Atom(33);
    pub const PUT: Atom = Atom(34);
    pub const COLLECT: Atom = Atom(35);
    pub const CURRENT_THREAD: Atom = Atom(36);
    pub const JOIN_THREAD: Atom = Atom(37);
    pub const SLEEP_MS: Atom = Atom(38);
    pub const NECK: Atom = Atom(39);
    pub const MINUS: Atom = Atom(40);
    pub const PLUS: Atom = Atom(41);
    pub const TIMES: Atom = Atom(42);
    pub const DIV: Atom = Atom(43);
    pub const MOD: Atom = Atom(44);
    pub const INTEGER: Atom = Atom(45);
    pub const SQRT: Atom = Atom(46);
    pub const EXCEPTION: Atom = Atom(47);
    pub const FALSE: Atom = Atom(48);
}
