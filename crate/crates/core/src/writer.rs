//! Canonical term output that reads back under the same operator table.

use crate::ops;
use crate::reader::{is_alnum, is_symbol_char};
use crate::symbol::{atoms, Atom};
use crate::term::Term;

/// Nesting depth beyond which output is elided as `...` (cyclic terms).
pub const MAX_DEPTH: usize = 64;

// Argument positions: priority 999, where a bare operator atom is still readable.
const ARG: u32 = 999;

pub fn write_term(t: &Term) -> String {
    let mut w = Writer { out: String::new() };
    w.term(t, 1200, 0);
    w.out
}

/// Renders an atom as it must appear in source text.
pub fn atom_text(a: Atom) -> String {
    let name = a.name();
    if needs_quotes(&name) {
        format!("'{}'", name.replace('\'', "''"))
    } else {
        name.to_string()
    }
}

fn needs_quotes(name: &str) -> bool {
    if matches!(name, "[]" | "!" | ";") {
        return false;
    }
    let mut chars = name.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_lowercase() => !name.chars().all(is_alnum),
        Some(c) if is_symbol_char(c) => !name.chars().all(is_symbol_char),
        Some(_) => true,
    }
}

struct Writer {
    out: String,
}

impl Writer {
    /// Appends a token, separating it from the previous one when the two would lex as one.
    fn token(&mut self, s: &str) {
        if let (Some(last), Some(first)) = (self.out.chars().last(), s.chars().next()) {
            let glue = (is_symbol_char(last) && is_symbol_char(first))
                || (is_alnum(last) && is_alnum(first));
            if glue {
                self.out.push(' ');
            }
        }
        self.out.push_str(s);
    }

    fn atom(&mut self, a: Atom, operand: bool) {
        let text = atom_text(a);
        if operand && ops::is_operator(&a.name()) {
            self.token("(");
            self.out.push_str(&text);
            self.out.push(')');
        } else {
            self.token(&text);
        }
    }

    fn term(&mut self, t: &Term, max: u32, depth: usize) {
        if depth > MAX_DEPTH {
            self.token("...");
            return;
        }
        match t.deref() {
            Term::Var(v) => self.token(&format!("_G{}", v.serial())),
            Term::Int(i) => self.token(&i.to_string()),
            // operator atoms are bare at top level and as arguments, parenthesized as operands
            Term::Atom(a) => self.atom(a, max < 1200 && max != ARG),
            Term::Compound(c) => {
                let name = c.name();
                let args = c.args();
                let text = name.name();
                if name == atoms::DOT && args.len() == 2 {
                    return self.list(t, depth);
                }
                if args.len() == 2 {
                    if let Some(op) = ops::infix(&text) {
                        let (lmax, rmax) = op.operand_limits();
                        let paren = op.priority > max;
                        if paren {
                            self.token("(");
                        }
                        self.term(&args[0], lmax, depth + 1);
                        if name == atoms::COMMA {
                            self.out.push(',');
                        } else {
                            self.token(&atom_text(name));
                        }
                        self.term(&args[1], rmax, depth + 1);
                        if paren {
                            self.out.push(')');
                        }
                        return;
                    }
                }
                if args.len() == 1 {
                    if let Some(op) = ops::prefix(&text) {
                        let arg = args[0].deref();
                        let (_, amax) = op.operand_limits();
                        let plain = match &arg {
                            Term::Int(_) => false,
                            Term::Atom(a) => !ops::is_operator(&a.name()),
                            _ => operand_priority(&arg) <= amax,
                        };
                        if plain {
                            let paren = op.priority > max;
                            if paren {
                                self.token("(");
                            }
                            self.token(&atom_text(name));
                            self.term(&arg, amax, depth + 1);
                            if paren {
                                self.out.push(')');
                            }
                            return;
                        }
                    }
                }
                self.token(&atom_text(name));
                self.out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        self.out.push(',');
                    }
                    self.term(a, ARG, depth + 1);
                }
                self.out.push(')');
            }
        }
    }

    fn list(&mut self, t: &Term, depth: usize) {
        self.token("[");
        let mut current = t.deref();
        let mut first = true;
        let mut count = depth;
        loop {
            match &current {
                Term::Compound(c) if c.name() == atoms::DOT && c.arity() == 2 => {
                    if !first {
                        self.out.push(',');
                    }
                    first = false;
                    count += 1;
                    if count > MAX_DEPTH * 1024 {
                        self.token("...");
                        break;
                    }
                    self.term(&c.args()[0], ARG, depth + 1);
                    let next = c.args()[1].deref();
                    current = next;
                }
                Term::Atom(a) if *a == atoms::NIL => break,
                other => {
                    self.out.push('|');
                    self.term(other, ARG, depth + 1);
                    break;
                }
            }
        }
        self.out.push(']');
    }
}

fn operand_priority(t: &Term) -> u32 {
    match t.deref() {
        Term::Compound(c) => {
            let text = c.name().name();
            if c.arity() == 2 && c.name() != atoms::DOT {
                if let Some(op) = ops::infix(&text) {
                    return op.priority;
                }
            }
            if c.arity() == 1 {
                if let Some(op) = ops::prefix(&text) {
                    return op.priority;
                }
            }
            0
        }
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::parse_term;
    use crate::term::variant;
    use proptest::prelude::*;

    fn squash(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    #[test]
    fn operators_print_infix() {
        let t = parse_term("the(0 => 2)").unwrap();
        assert_eq!(squash(&write_term(&t)), "the(0=>2)");
        assert!(write_term(&parse_term("X is Y+1").unwrap()).contains(" is "));
        assert_eq!(write_term(&parse_term("a:-b,c").unwrap()), "a:-b,c");
        assert_eq!(write_term(&parse_term("f((a,b))").unwrap()), "f((a,b))");
        assert_eq!(write_term(&parse_term("1-(2-3)").unwrap()), "1-(2-3)");
        assert_eq!(write_term(&parse_term("a- -1").unwrap()), "a- -1");
        assert_eq!(write_term(&parse_term("-(1)").unwrap()), "-(1)");
        assert_eq!(write_term(&parse_term("- a").unwrap()), "-a");
        assert_eq!(write_term(&parse_term("-(-(a))").unwrap()), "- -a");
    }

    #[test]
    fn lists_and_variables() {
        let t = Term::cons(Term::int(1), Term::cons(Term::int(2), Term::nil()));
        assert_eq!(write_term(&t), "[1,2]");
        let x = Term::var();
        let serial = match &x {
            Term::Var(v) => v.serial(),
            _ => unreachable!(),
        };
        let f = Term::from_parts("f", vec![x.clone(), x]);
        assert_eq!(write_term(&f), format!("f(_G{serial},_G{serial})"));
        assert!(write_term(&parse_term("[a|T]").unwrap()).starts_with("[a|_G"));
    }

    #[test]
    fn atoms_quote_when_needed() {
        assert_eq!(write_term(&Term::atom("hello world")), "'hello world'");
        assert_eq!(write_term(&Term::atom("it's")), "'it''s'");
        assert_eq!(write_term(&Term::atom("Foo")), "'Foo'");
        assert_eq!(write_term(&Term::atom("[]")), "[]");
        assert_eq!(write_term(&Term::atom("$engine")), "'$engine'");
        assert_eq!(
            write_term(&parse_term("'$engine'(3)").unwrap()),
            "'$engine'(3)"
        );
        assert_eq!(
            write_term(&parse_term("f(',', '|')").unwrap()),
            "f(',','|')"
        );
        assert!(write_term(&parse_term("best_of(X,>,g)").unwrap()).contains(",>,"));
        assert_eq!(write_term(&parse_term("(>) = (<)").unwrap()), "(>)=(<)");
    }

    fn arb_source() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("a".to_string()),
            Just("'B c'".to_string()),
            Just("[]".to_string()),
            (-3i64..40).prop_map(|i| i.to_string()),
            Just("X".to_string()),
            Just("Y".to_string()),
            Just("(>)".to_string()),
            Just("(-)".to_string()),
        ];
        leaf.prop_recursive(5, 40, 3, |inner| {
            let bin = prop_oneof![
                Just(":-"),
                Just(","),
                Just("="),
                Just("=>"),
                Just("is"),
                Just("+"),
                Just("-"),
                Just("*"),
                Just("mod"),
                Just("=:="),
                Just("<")
            ];
            prop_oneof![
                (inner.clone(), bin, inner.clone())
                    .prop_map(|(a, op, b)| format!("'{op}'({a},{b})")),
                inner.clone().prop_map(|a| format!("-({a})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("f({a},{b})")),
                (inner.clone(), inner).prop_map(|(a, b)| format!("[{a}|{b}]")),
            ]
        })
    }

    proptest! {
        #[test]
        fn write_then_parse_is_a_variant(src in arb_source()) {
            let t = parse_term(&src).unwrap();
            let text = write_term(&t);
            let back = parse_term(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
            prop_assert!(variant(&t, &back), "{} -> {}", src, text);
        }
    }
}
