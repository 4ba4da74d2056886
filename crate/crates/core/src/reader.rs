//! Tokenizer and operator-precedence parser for clause text.

use std::fmt;

use crate::ops;
use crate::symbol::{atoms, Atom};
use crate::term::{Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Quoted(String),
    Var(String),
    Int(i64),
    /// Digits too large for a signed 64-bit literal unless negated.
    IntMinMagnitude,
    Punct(char),
    End,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    layout_before: bool,
    line: usize,
    column: usize,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

pub(crate) fn is_symbol_char(c: char) -> bool {
    SYMBOL_CHARS.contains(c)
}

pub(crate) fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.char_indices().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn skip_layout(&mut self) -> bool {
        let mut skipped = false;
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
                skipped = true;
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
                skipped = true;
            } else {
                break;
            }
        }
        skipped
    }

    fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut tokens = Vec::new();
        let mut layout_before = true;
        loop {
            layout_before |= self.skip_layout();
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else {
                tokens.push(Token {
                    tok: Tok::Eof,
                    layout_before,
                    line,
                    column,
                });
                return Ok(tokens);
            };
            let tok = if c.is_ascii_digit() {
                self.number()?
            } else if c == '_' || c.is_uppercase() {
                Tok::Var(self.take_while(is_alnum))
            } else if c.is_alphabetic() {
                Tok::Name(self.take_while(is_alnum))
            } else if c == '\'' {
                self.quoted()?
            } else if matches!(c, '(' | ')' | '[' | ']' | ',' | '|' | '{' | '}') {
                self.bump();
                Tok::Punct(c)
            } else if c == '!' || c == ';' {
                self.bump();
                Tok::Name(c.to_string())
            } else if is_symbol_char(c) {
                let symbol = self.take_while(is_symbol_char);
                let at_end = matches!(self.peek(), None | Some('%'))
                    || self.peek().is_some_and(char::is_whitespace);
                if symbol == "." && at_end {
                    Tok::End
                } else {
                    Tok::Name(symbol)
                }
            } else {
                return Err(self.error(format!("unexpected character {c:?}")));
            };
            tokens.push(Token {
                tok,
                layout_before,
                line,
                column,
            });
            layout_before = false;
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let digits = self.take_while(|c| c.is_ascii_digit());
        match digits.parse::<i64>() {
            Ok(v) => Ok(Tok::Int(v)),
            Err(_) if digits.trim_start_matches('0') == "9223372036854775808" => {
                Ok(Tok::IntMinMagnitude)
            }
            Err(_) => Err(self.error(format!("integer literal {digits} does not fit in 64 bits"))),
        }
    }

    fn quoted(&mut self) -> Result<Tok, ParseError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated quoted atom")),
                Some('\'') => {
                    if self.peek() == Some('\'') {
                        self.bump();
                        s.push('\'');
                    } else {
                        return Ok(Tok::Quoted(s));
                    }
                }
                Some(c) => s.push(c),
            }
        }
    }
}

/// A parsed clause with its source location.
#[derive(Clone, Debug)]
pub struct SourceClause {
    pub head: Term,
    pub body: Term,
    pub origin: Origin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub file: Option<String>,
    pub line: usize,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{}:{}", file, self.line),
            None => write!(f, "line {}", self.line),
        }
    }
}

/// A term together with the source names of its named variables.
#[derive(Clone, Debug)]
pub struct Query {
    pub term: Term,
    pub names: Vec<(String, Var)>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    names: Vec<(String, Var)>,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            tokens: Lexer::new(text).tokenize()?,
            pos: 0,
            names: Vec::new(),
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, token: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: token.line,
            column: token.column,
            message: message.into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.advance();
        if t.tok == Tok::Punct(c) {
            Ok(())
        } else {
            Err(self.error_at(&t, format!("expected '{c}', found {}", describe(&t.tok))))
        }
    }

    fn variable(&mut self, name: &str) -> Term {
        if name == "_" {
            return Term::var();
        }
        if let Some((_, v)) = self.names.iter().find(|(n, _)| n == name) {
            return Term::Var(v.clone());
        }
        let v = Var::fresh();
        self.names.push((name.to_string(), v.clone()));
        Term::Var(v)
    }

    fn is_term_end(tok: &Tok) -> bool {
        matches!(
            tok,
            Tok::Punct(',' | ')' | '|' | ']' | '}') | Tok::End | Tok::Eof
        )
    }

    fn parse(&mut self, max: u32) -> Result<Term, ParseError> {
        let (mut left, mut left_prec) = self.primary(max)?;
        loop {
            let token = self.peek().clone();
            let name = match &token.tok {
                Tok::Punct(',') => ",".to_string(),
                Tok::Name(n) => n.clone(),
                _ => break,
            };
            let Some(op) = ops::infix(&name) else { break };
            let (left_max, right_max) = op.operand_limits();
            if op.priority > max || left_prec > left_max {
                break;
            }
            self.advance();
            let right = self.parse(right_max)?;
            left = Term::compound(Atom::new(&name), vec![left, right]);
            left_prec = op.priority;
        }
        Ok(left)
    }

    fn primary(&mut self, max: u32) -> Result<(Term, u32), ParseError> {
        let token = self.advance();
        match token.tok {
            Tok::Int(v) => Ok((Term::Int(v), 0)),
            Tok::IntMinMagnitude => {
                Err(self.error_at(&token, "integer literal does not fit in 64 bits"))
            }
            Tok::Var(ref name) => Ok((self.variable(name), 0)),
            Tok::Punct('(') => {
                let t = self.parse(1200)?;
                self.expect_punct(')')?;
                Ok((t, 0))
            }
            Tok::Punct('[') => {
                if self.peek().tok == Tok::Punct(']') {
                    self.advance();
                    return self.after_name(atoms::NIL);
                }
                let mut items = vec![self.parse(999)?];
                let mut tail = Term::nil();
                loop {
                    let t = self.advance();
                    match t.tok {
                        Tok::Punct(',') => items.push(self.parse(999)?),
                        Tok::Punct('|') => {
                            tail = self.parse(999)?;
                            self.expect_punct(']')?;
                            break;
                        }
                        Tok::Punct(']') => break,
                        ref other => {
                            return Err(self.error_at(
                                &t,
                                format!(
                                    "expected ',', '|' or ']' in list, found {}",
                                    describe(other)
                                ),
                            ))
                        }
                    }
                }
                Ok((Term::list_with_tail(items, tail), 0))
            }
            Tok::Quoted(ref name) => self.after_name(Atom::new(name)),
            Tok::Name(ref name) => {
                let next = self.peek().clone();
                if name == "-" && !next.layout_before {
                    match next.tok {
                        Tok::Int(v) => {
                            self.advance();
                            return Ok((Term::Int(-v), 0));
                        }
                        Tok::IntMinMagnitude => {
                            self.advance();
                            return Ok((Term::Int(i64::MIN), 0));
                        }
                        _ => {}
                    }
                }
                if next.tok == Tok::Punct('(') && !next.layout_before {
                    return self.after_name(Atom::new(name));
                }
                if let Some(op) = ops::prefix(name) {
                    if !self.prefix_is_atom(&next) {
                        let (_, arg_max) = op.operand_limits();
                        if op.priority > max {
                            return Err(self
                                .error_at(&token, format!("operator priority clash at '{name}'")));
                        }
                        let arg = self.parse(arg_max)?;
                        return Ok((Term::compound(Atom::new(name), vec![arg]), op.priority));
                    }
                }
                self.after_name(Atom::new(name))
            }
            Tok::Punct('{') | Tok::Punct('}') => {
                Err(self.error_at(&token, "curly-brace terms are not supported"))
            }
            ref other => Err(self.error_at(&token, format!("unexpected {}", describe(other)))),
        }
    }

    /// A prefix operator followed by something that cannot start an operand is read as an atom.
    fn prefix_is_atom(&self, next: &Token) -> bool {
        if Self::is_term_end(&next.tok) {
            return true;
        }
        if let Tok::Name(n) = &next.tok {
            if ops::infix(n).is_some() && ops::prefix(n).is_none() {
                let functional = self
                    .peek_at(1)
                    .is_some_and(|t| t.tok == Tok::Punct('(') && !t.layout_before);
                return !functional;
            }
        }
        false
    }

    fn after_name(&mut self, name: Atom) -> Result<(Term, u32), ParseError> {
        let next = self.peek().clone();
        if next.tok == Tok::Punct('(') && !next.layout_before {
            self.advance();
            let mut args = vec![self.parse(999)?];
            loop {
                let t = self.advance();
                match t.tok {
                    Tok::Punct(',') => args.push(self.parse(999)?),
                    Tok::Punct(')') => break,
                    ref other => {
                        return Err(self.error_at(
                            &t,
                            format!(
                                "expected ',' or ')' in arguments, found {}",
                                describe(other)
                            ),
                        ))
                    }
                }
            }
            return Ok((Term::compound(name, args), 0));
        }
        Ok((Term::Atom(name), 0))
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        let t = self.advance();
        match t.tok {
            Tok::End => Ok(()),
            ref other => Err(self.error_at(
                &t,
                format!("expected operator or '.', found {}", describe(other)),
            )),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Name(n) | Tok::Quoted(n) => format!("'{n}'"),
        Tok::Var(v) => format!("variable {v}"),
        Tok::Int(i) => format!("integer {i}"),
        Tok::IntMinMagnitude => "integer".to_string(),
        Tok::Punct(c) => format!("'{c}'"),
        Tok::End => "end of clause".to_string(),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses a single term; a terminating `.` is optional.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_query(text).map(|q| q.term)
}

/// Parses a single term and reports its named variables in order of appearance.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(text)?;
    let term = p.parse(1200)?;
    let t = p.advance();
    match t.tok {
        Tok::End => {
            let after = p.advance();
            if after.tok != Tok::Eof {
                return Err(p.error_at(&after, "unexpected text after end of term"));
            }
        }
        Tok::Eof => {}
        ref other => {
            return Err(p.error_at(
                &t,
                format!(
                    "expected operator or end of term, found {}",
                    describe(other)
                ),
            ))
        }
    }
    Ok(Query {
        term,
        names: p.names,
    })
}

/// Parses clause text into clauses; `H :- B` yields `(H, B)` and a fact `H` yields `(H, true)`.
pub fn parse_program(text: &str) -> Result<Vec<SourceClause>, ParseError> {
    parse_program_named(text, None)
}

pub fn parse_program_named(
    text: &str,
    file: Option<&str>,
) -> Result<Vec<SourceClause>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut clauses = Vec::new();
    while p.peek().tok != Tok::Eof {
        let start = p.peek().clone();
        p.names.clear();
        let term = p.parse(1200)?;
        if p.peek().tok == Tok::Eof {
            return Err(p.error_at(p.peek(), "missing '.' at end of clause"));
        }
        p.expect_end()?;
        let (head, body) = match term.functor() {
            Some((n, 2)) if n == atoms::NECK => {
                let args = term.args();
                (args[0].clone(), args[1].clone())
            }
            Some((n, 1)) if n == atoms::NECK => {
                return Err(p.error_at(&start, "directives are not supported"));
            }
            _ => (term, Term::Atom(atoms::TRUE)),
        };
        if !head.is_callable() {
            return Err(p.error_at(
                &start,
                format!("clause head must be an atom or compound, found {head}"),
            ));
        }
        clauses.push(SourceClause {
            head,
            body,
            origin: Origin {
                file: file.map(str::to_string),
                line: start.line,
            },
        });
    }
    Ok(clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{term_equal, variant};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn list_with_tail() {
        let term = t("f(X,[1,2|T])");
        assert_eq!(term.functor(), Some((Atom::new("f"), 2)));
        let list = term.args()[1].clone();
        assert_eq!(list.functor(), Some((atoms::DOT, 2)));
        let second = list.args()[1].clone();
        assert_eq!(second.args()[0].as_int(), Some(2));
        assert!(matches!(second.args()[1].deref(), Term::Var(_)));
    }

    #[test]
    fn neck_binds_loosest() {
        let term = t("(S1=>S2 :- S2 is S1+2)");
        let expected = {
            let q = parse_query("':-'('=>'(S1,S2), is(S2, '+'(S1,2)))").unwrap();
            q.term
        };
        assert!(variant(&term, &expected));
        let args = term.args();
        assert_eq!(args[0].functor(), Some((Atom::new("=>"), 2)));
    }

    #[test]
    fn difference_pair() {
        let term = t("Xs-Ys");
        assert_eq!(term.functor(), Some((atoms::MINUS, 2)));
    }

    #[test]
    fn same_name_same_variable() {
        let q = parse_query("f(X, Y, X, _, _)").unwrap();
        assert_eq!(q.names.len(), 2);
        let a = q.term.args();
        assert!(term_equal(&a[0], &a[2]));
        assert!(!term_equal(&a[3], &a[4]));
    }

    #[test]
    fn bare_operator_arguments_are_atoms() {
        let term = t("best_of(X,>,member(X,[2,1,4,3]))");
        assert_eq!(term.args()[1].as_atom(), Some(atoms::GT));
        let term = t("efoldl(E,+,0,R)");
        assert_eq!(term.args()[1].as_atom(), Some(atoms::PLUS));
        assert_eq!(t("[-]").args()[0].as_atom(), Some(atoms::MINUS));
    }

    #[test]
    fn precedence_and_associativity() {
        assert!(variant(&t("1-2-3"), &t("-(-(1,2),3)")));
        assert!(variant(&t("a,b,c"), &t("','(a,','(b,c))")));
        assert!(variant(&t("1+2*3"), &t("+(1,*(2,3))")));
        assert!(variant(&t("N mod D =:= 0"), &t("=:=(mod(N,D),0)")));
        assert!(variant(&t("X is -1"), &t("is(X,-1)")));
        assert_eq!(t("-1").as_int(), Some(-1));
        assert_eq!(t("- 1").functor(), Some((atoms::MINUS, 1)));
        assert_eq!(t("-(1)").functor(), Some((atoms::MINUS, 1)));
        assert_eq!(t("a- -1").args()[1].as_int(), Some(-1));
        assert_eq!(t("-9223372036854775808").as_int(), Some(i64::MIN));
    }

    #[test]
    fn quoted_atoms_and_comments() {
        assert_eq!(t("'it''s'").as_atom(), Some(Atom::new("it's")));
        assert_eq!(
            t("'hello world' % trailing\n").as_atom(),
            Some(Atom::new("hello world"))
        );
        assert_eq!(t("!").as_atom(), Some(atoms::CUT));
        assert_eq!(t("[]").as_atom(), Some(atoms::NIL));
    }

    #[test]
    fn program_splits_clauses() {
        let cs = parse_program("a(1). a(2).").unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].body.as_atom(), Some(atoms::TRUE));
        let cs = parse_program("p(X) :- q(X), r.\n% comment\nq(1).").unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].body.functor(), Some((atoms::COMMA, 2)));
        assert_eq!(cs[1].origin.line, 3);
    }

    #[test]
    fn queue_server_listing() {
        let text = r"
queue_server:-queue_server(Xs,Xs).

queue_server(Hs1,Ts1):-
  from_engine(Q),
    server_task(Q,Hs1,Ts1,Hs2,Ts2,A),
  return(A),
  queue_server(Hs2,Ts2).

server_task(add_element(X),Xs,[X|Ys],Xs,Ys,yes).
server_task(push_element(X),Xs,Ys,[X|Xs],Ys,yes).
server_task(queue,Xs,Ys,Xs,Ys,Xs-Ys).
server_task(delete_element(X),Xs,Ys,NewXs,Ys,YesNo):-
  server_task_delete(X,Xs,NewXs,YesNo).
";
        let cs = parse_program(text).unwrap();
        let count = |name: &str, arity: usize| {
            cs.iter()
                .filter(|c| c.head.functor() == Some((Atom::new(name), arity)))
                .count()
        };
        assert_eq!(count("queue_server", 0), 1);
        assert_eq!(count("queue_server", 2), 1);
        assert_eq!(count("server_task", 6), 4);
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse_program("a(1)").unwrap_err();
        assert!(e.message.contains("missing '.'"), "{e}");
        let e = parse_program("a(1).\nb(,).").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_term("f(").is_err());
        assert!(parse_program("X :- a.").is_err());
        assert!(parse_program("3.").is_err());
        assert!(parse_program(":- a.").is_err());
        assert!(parse_term("99999999999999999999").is_err());
    }
}
