// Pull answers out of an engine one at a time.

use interactors::{parse_term, write_term, Answer, Runtime, Term};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rt = Runtime::builder().build();

    // the pattern X is instantiated once per solution of the goal
    let x = Term::var();
    let goal = Term::from_parts("member", vec![x.clone(), parse_term("[red, green, blue]")?]);
    let colors = rt.new_engine(&x, &goal)?;
    let mut seen = Vec::new();
    while let Answer::The(c) = colors.get() {
        seen.push(write_term(&c));
    }
    println!("colors: {}", seen.join(" "));
    assert_eq!(seen, ["red", "green", "blue"]);
    // an exhausted engine keeps saying no
    assert!(colors.get().is_no());

    // engines are iterators too; stopping early frees the engine
    let mut naturals = rt.engine_from_text("N", "between(1, 1000000, N)")?;
    let first: Vec<i64> = naturals
        .by_ref()
        .take(5)
        .filter_map(|t| t.as_int())
        .collect();
    println!("first naturals: {first:?}");
    naturals.stop();
    assert!(naturals.get().is_no());

    // the same protocol from object code: get/2 answers the(X) or no
    let replies = rt.answers(
        "new_engine(X, member(X,[a,b]), E), get(E,A1), get(E,A2), get(E,A3)",
        None,
    )?;
    println!("{}", replies[0]);
    assert!(replies[0].ends_with("A1=the(a), A2=the(b), A3=no"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("answer_stream example failed");
}
