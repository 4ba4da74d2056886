// Folding over the answers of an engine instead of collecting them.

use interactors::Runtime;

const PROGRAM: &str = "
square(X, Y) :- member(X, [1,2,3,4]), Y is X*X.
add_sq(Acc, _-Y, Out) :- Out is Acc + Y.
sum_of_squares(S) :- new_engine(X-Y, square(X,Y), E), efoldl(E, add_sq, 0, S).
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rt = Runtime::with_program(PROGRAM)?;
    for (goal, expected) in [
        ("sum_of_squares(S)", "S=30"),
        ("reverse([1,2,3], Ys)", "Ys=[3,2,1]"),
        ("best_of(X, >, member(X,[2,1,4,3]))", "X=4"),
        ("best_of(X, <, member(X,[2,1,4,3]))", "X=1"),
        ("count_partitions(10, R)", "R=42"),
        (
            "findall(X-Y, (member(X,[1,2]), member(Y,[a])), L)",
            "L=[1-a,2-a]",
        ),
    ] {
        let line = rt.answers(goal, Some(1))?.remove(0);
        println!("{goal:45} {line}");
        assert!(line.ends_with(expected), "{line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("folds example failed");
}
