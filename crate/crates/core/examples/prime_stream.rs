// An infinite generator consumed lazily, with the engine's state staying small.

use interactors::Runtime;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rt = Runtime::builder().build();
    let mut primes = rt.engine_from_text("P", "prime(P)")?;
    let first: Vec<i64> = primes
        .by_ref()
        .take(10)
        .filter_map(|p| p.as_int())
        .collect();
    println!("first primes: {first:?}");
    assert_eq!(first, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    let thousandth = primes.by_ref().nth(989).and_then(|p| p.as_int());
    println!("1000th prime: {thousandth:?}");
    assert_eq!(thousandth, Some(7919));
    primes.stop();

    // a forward-recursing client pulls from the stream with get/2
    let lines = rt.answers(
        "prime_engine(E), get(E,the(A)), get(E,the(B)), get(E,the(C)), stop(E)",
        None,
    )?;
    println!("{}", lines[0]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("prime_stream example failed");
}
