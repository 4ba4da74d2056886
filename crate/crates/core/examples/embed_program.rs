// Embedding: load a program, run queries, and watch for failures.

use std::sync::{Arc, Mutex};

use interactors::{Reply, Runtime};

const FAMILY: &str = "
parent(ann, bob).  parent(bob, cid).  parent(bob, dot).
ancestor(X, Y) :- parent(X, Y).
ancestor(X, Y) :- parent(X, Z), ancestor(Z, Y).
broken(X) :- X is nothing + 1.
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let log = Arc::new(Mutex::new(Vec::new()));
    let sink = log.clone();
    let rt = Runtime::builder()
        .consult_str(FAMILY, "family.pl")?
        .diagnostics(move |line| sink.lock().unwrap().push(line.to_string()))
        .build();

    let query = rt.query("ancestor(ann, Who)")?;
    println!("variables: {:?}", query.names());
    for reply in query {
        println!("  {}", reply.render());
    }

    // machine errors inside a nested engine read as `no` to its client ...
    assert_eq!(
        rt.answers("new_engine(X, broken(X), E), get(E, A)", None)?[0]
            .split(", ")
            .last(),
        Some("A=no")
    );
    assert!(log.lock().unwrap()[0].contains("type_error"));
    // ... while a top-level query reports them directly
    let mut q = rt.query("broken(X)")?;
    assert!(matches!(q.next(), Some(Reply::Error(_))));

    // load errors carry their position
    let err = Runtime::builder()
        .consult_str("p :- q(.", "bad.pl")
        .err()
        .unwrap();
    println!("load error: {err}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("embed_program example failed");
}
