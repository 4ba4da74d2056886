// A mutable clause store kept alive by a server engine, while the program
// itself stays frozen.

use interactors::{parse_term, write_term, Runtime};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rt = Runtime::builder().build();
    for line in rt.answers("test_clause(H, B)", None)? {
        println!("test_clause: {line}");
    }

    // drive the same server from the host: keep its handle in a term
    let db = rt.answers("new_edb(Db)", None)?;
    println!("{}", db[0]);
    let handle = db[0].trim_start_matches("Db=").to_string();
    let run = |goal: String| rt.answers(&goal, None);
    run(format!("edb_assertz({handle}, (colour(red) :- true))"))?;
    run(format!("edb_assertz({handle}, (colour(blue) :- true))"))?;
    run(format!("edb_asserta({handle}, (colour(green) :- true))"))?;
    let listed = run(format!("edb_clause({handle}, colour(C), _)"))?;
    println!("colours: {listed:?}");
    assert_eq!(listed, ["C=green", "C=red", "C=blue"]);

    // retracting something absent fails but leaves the server running
    assert!(run(format!("edb_retract1({handle}, colour(pink))"))?.is_empty());
    run(format!("edb_retract1({handle}, colour(red))"))?;
    let left = run(format!("edb_clause({handle}, colour(C), _)"))?;
    assert_eq!(left, ["C=green", "C=blue"]);

    let engine = rt.engine(&parse_term(&handle)?).expect("an engine handle");
    println!(
        "server {} alive: {}",
        write_term(&engine.handle()),
        engine.is_alive()
    );
    run(format!("edb_delete({handle})"))?;
    assert!(!engine.is_alive());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("dynamic_db example failed");
}
