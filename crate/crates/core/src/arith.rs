//! Integer arithmetic for `is/2` and the comparison builtins.

use crate::error::MachineError;
use crate::symbol::{atoms, Atom};
use crate::term::Term;

enum Step {
    Eval(Term),
    Apply(Atom, usize, Term),
}

/// Evaluates `+ - * / mod`, unary minus and `integer(sqrt(N))` over 64-bit integers.
///
/// `/` truncates toward zero and `mod` takes the sign of the divisor. `sqrt/1`
/// is only evaluable under `integer/1`, where it yields the floor of the square
/// root.
pub fn eval_arith(expr: &Term) -> Result<i64, MachineError> {
    match eval_shallow(expr, 32) {
        Some(result) => result,
        None => eval_deep(expr),
    }
}

/// Recursive evaluation for ordinary expressions; `None` once deeper than `budget`.
fn eval_shallow(expr: &Term, budget: u32) -> Option<Result<i64, MachineError>> {
    let t = expr.deref();
    let c = match &t {
        Term::Int(i) => return Some(Ok(*i)),
        Term::Compound(c) if budget > 0 => c,
        Term::Compound(_) => return None,
        _ => return Some(eval_deep(&t)),
    };
    let args = c.args();
    let op = c.name();
    if args.len() != 2
        || !matches!(
            op,
            atoms::PLUS | atoms::MINUS | atoms::TIMES | atoms::DIV | atoms::MOD
        )
    {
        return Some(eval_deep(&t));
    }
    let x = match eval_shallow(&args[0], budget - 1)? {
        Ok(x) => x,
        e => return Some(e),
    };
    let y = match eval_shallow(&args[1], budget - 1)? {
        Ok(y) => y,
        e => return Some(e),
    };
    Some(apply2(op, x, y, &t))
}

fn apply2(op: Atom, x: i64, y: i64, culprit: &Term) -> Result<i64, MachineError> {
    let overflow = || MachineError::arith(culprit.clone(), "integer overflow");
    match op {
        atoms::PLUS => x.checked_add(y).ok_or_else(overflow),
        atoms::MINUS => x.checked_sub(y).ok_or_else(overflow),
        atoms::TIMES => x.checked_mul(y).ok_or_else(overflow),
        atoms::DIV => {
            if y == 0 {
                return Err(MachineError::arith(culprit.clone(), "zero divisor"));
            }
            x.checked_div(y).ok_or_else(overflow)
        }
        _ => {
            if y == 0 {
                return Err(MachineError::arith(culprit.clone(), "zero divisor"));
            }
            let r = x.wrapping_rem(y);
            Ok(if r != 0 && ((r < 0) != (y < 0)) {
                r + y
            } else {
                r
            })
        }
    }
}

fn eval_deep(expr: &Term) -> Result<i64, MachineError> {
    let mut steps = vec![Step::Eval(expr.clone())];
    let mut values: Vec<i64> = Vec::new();
    while let Some(step) = steps.pop() {
        match step {
            Step::Eval(t) => match t.deref() {
                Term::Int(i) => values.push(i),
                Term::Var(_) => return Err(MachineError::instantiation(t.deref())),
                Term::Atom(_) => return Err(MachineError::type_error("evaluable", t.deref())),
                Term::Compound(c) => {
                    let name = c.name();
                    let args = c.args();
                    if name == atoms::INTEGER && args.len() == 1 {
                        let inner = args[0].deref();
                        if inner.functor() == Some((atoms::SQRT, 1)) {
                            steps.push(Step::Apply(atoms::SQRT, 1, inner.clone()));
                            steps.push(Step::Eval(inner.args()[0].clone()));
                        } else {
                            steps.push(Step::Eval(inner));
                        }
                        continue;
                    }
                    let known = matches!(
                        (name, args.len()),
                        (
                            atoms::PLUS | atoms::MINUS | atoms::TIMES | atoms::DIV | atoms::MOD,
                            2
                        ) | (atoms::MINUS, 1)
                    );
                    if !known {
                        return Err(MachineError::type_error(
                            "evaluable",
                            Term::Compound(c.clone()),
                        ));
                    }
                    steps.push(Step::Apply(name, args.len(), Term::Compound(c.clone())));
                    for a in args.iter().rev() {
                        steps.push(Step::Eval(a.clone()));
                    }
                }
            },
            Step::Apply(name, arity, culprit) => {
                let overflow = || MachineError::arith(culprit.clone(), "integer overflow");
                let v = if arity == 1 {
                    let x = values.pop().expect("operand");
                    if name == atoms::SQRT {
                        if x < 0 {
                            return Err(MachineError::arith(
                                culprit,
                                "square root of a negative number",
                            ));
                        }
                        x.isqrt()
                    } else {
                        x.checked_neg().ok_or_else(overflow)?
                    }
                } else {
                    let y = values.pop().expect("operand");
                    let x = values.pop().expect("operand");
                    apply2(name, x, y, &culprit)?
                };
                values.push(v);
            }
        }
    }
    Ok(values.pop().expect("result"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;
    use crate::reader::parse_term;

    fn eval(s: &str) -> Result<i64, ErrorKind> {
        eval_arith(&parse_term(s).unwrap()).map_err(|e| e.kind)
    }

    /// Largest m with m*m <= n, by linear search.
    fn isqrt_oracle(n: i64) -> i64 {
        let mut m = 0;
        while (m + 1) * (m + 1) <= n {
            m += 1;
        }
        m
    }

    #[test]
    fn basic_operations() {
        assert_eq!(eval("0+2"), Ok(2));
        assert_eq!(eval("7 mod 2"), Ok(1));
        assert_eq!(eval("2+3*4-1"), Ok(13));
        assert_eq!(eval("-(3)"), Ok(-3));
        assert_eq!(eval("7/2"), Ok(3));
        assert_eq!(eval("-7/2"), Ok(-3));
        assert_eq!(eval("-7 mod 2"), Ok(1));
        assert_eq!(eval("7 mod -2"), Ok(-1));
    }

    #[test]
    fn integer_square_root() {
        assert_eq!(eval("integer(sqrt(10))"), Ok(3));
        for n in 0..2000 {
            assert_eq!(
                eval(&format!("integer(sqrt({n}))")),
                Ok(isqrt_oracle(n)),
                "n={n}"
            );
        }
        assert_eq!(eval("integer(5+1)"), Ok(6));
        assert_eq!(eval("integer(sqrt(-1))"), Err(ErrorKind::ArithError));
        assert_eq!(eval("sqrt(4)"), Err(ErrorKind::TypeError));
    }

    #[test]
    fn faults() {
        assert_eq!(eval("X+1"), Err(ErrorKind::InstantiationError));
        assert_eq!(eval("foo+1"), Err(ErrorKind::TypeError));
        assert_eq!(eval("1/0"), Err(ErrorKind::ArithError));
        assert_eq!(eval("1 mod 0"), Err(ErrorKind::ArithError));
        assert_eq!(eval("9223372036854775807+1"), Err(ErrorKind::ArithError));
        assert_eq!(eval("-9223372036854775808/ -1"), Err(ErrorKind::ArithError));
        assert_eq!(eval("-(-9223372036854775808)"), Err(ErrorKind::ArithError));
    }

    #[test]
    fn deep_expressions_do_not_recurse() {
        let mut t = Term::int(0);
        for i in 1..=100_000 {
            t = Term::compound(atoms::PLUS, vec![t, Term::int(i)]);
        }
        assert_eq!(eval_arith(&t).unwrap(), 5_000_050_000);
    }
}
