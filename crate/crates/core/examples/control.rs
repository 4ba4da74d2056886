// if-then-else, negation and exceptions, all built from engines.

use interactors::Runtime;

const PROGRAM: &str = "
safe_div(X, Y, Z) :- if(Y =:= 0, throw(division_by_zero(X)), Z is X / Y).
ratio(X, Y, R) :- catch(safe_div(X, Y, R), division_by_zero(_), R = undefined).
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rt = Runtime::with_program(PROGRAM)?;
    for goal in [
        "if(member(X,[1,2]), R=X, R=none)",
        "if(fail, R=1, R=none)",
        "if_any(member(X,[1,2]), Y=X, Y=0)",
        "not(member(c,[a,b]))",
        "catch(throw(boom), boom, R=caught)",
        "catch(member(X,[1,2]), _, fail)",
        "ratio(7, 2, R)",
        "ratio(7, 0, R)",
    ] {
        println!("?- {goal}.");
        for line in rt.answers(goal, None)? {
            println!("   {line}");
        }
    }
    assert_eq!(rt.answers("ratio(7, 0, R)", None)?, ["R=undefined"]);
    // an exception nobody catches reaches the client as exception(E)
    assert_eq!(rt.answers("throw(lost)", Some(1))?, ["exception(lost)"]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("control example failed");
}
