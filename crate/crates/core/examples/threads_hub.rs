// Engines on background threads feeding a hub.

use interactors::{parse_term, write_term, Runtime};

const PROGRAM: &str = "
produce(Hub, Tag) :- between(1, 5, I), put(Hub, Tag-I), fail.
produce(_, _).
drain(Hub, [X|Xs]) :- collect(Hub, X), !, drain(Hub, Xs).
drain(_, []).
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rt = Runtime::with_program(PROGRAM)?;
    let hub = rt.hub_ms(200)?;
    let h = write_term(&hub.handle());

    // one producer started from the host, one from object code
    let left = rt.bg(&parse_term(&format!("produce({h}, left)"))?)?;
    let right = rt
        .engine_from_text("_", &format!("produce({h}, right)"))?
        .run_bg()
        .expect("a live engine");
    left.join()?;
    right.join()?;

    let got = rt.answers(&format!("drain({h}, Xs), length(Xs, N)"), None)?;
    println!("{}", got[0]);
    assert!(got[0].ends_with("N=10"));

    // an empty hub gives up after its timeout
    let quick = rt.hub_ms(10)?;
    let t0 = std::time::Instant::now();
    assert!(quick.collect().is_none());
    println!("empty collect gave up after {:?}", t0.elapsed());
    rt.destroy_hub(&quick);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("threads_hub example failed");
}
