// An engine as a coroutine: it yields with return/1 and receives goals
// through to_engine/2.

use interactors::{parse_term, write_term, Runtime};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rt = Runtime::builder().build();

    // sum_loop keeps a running state inside an infinite loop; each injected
    // clause says how to advance it
    let adder = rt.engine_from_text("_", "sum_loop(0)")?;
    for step in [2, 5, 10] {
        adder.to_engine(&parse_term(&format!("(S1=>S2 :- S2 is S1+{step})"))?);
        let state = adder.get().into_option().expect("sum_loop never ends");
        println!("after +{step}: {}", write_term(&state));
    }
    adder.stop();

    let lines = rt.answers("inc_test(R1,R2)", None)?;
    println!("inc_test: {}", lines[0]);
    assert_eq!(lines, ["R1=the(0=>2), R2=the(2=>7)"]);

    // return/1 hands out intermediate results without backtracking
    let mut counter = rt.engine_from_text("_", "loop(0)")?;
    let ticks: Vec<String> = counter.by_ref().take(3).map(|t| write_term(&t)).collect();
    println!("loop: {}", ticks.join(","));
    assert_eq!(ticks, ["0", "1", "2"]);

    // a goal that fails inside the engine ends it for good
    let fragile = rt.engine_from_text("_", "sum_loop(0)")?;
    fragile.to_engine(&parse_term("(_=>_ :- fail)")?);
    assert!(fragile.get().is_no());
    assert!(!fragile.to_engine(&parse_term("late")?));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("yield_and_inject example failed");
}
