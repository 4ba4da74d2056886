use std::sync::{Arc, Mutex};

use interactors::{parse_term, Answer, ErrorKind, MachineEvent, Runtime, Term};

fn rt() -> Runtime {
    Runtime::builder().build()
}

/// A runtime whose diagnostics are kept for inspection.
fn recording() -> (Runtime, Arc<Mutex<Vec<String>>>) {
    let lines = Arc::new(Mutex::new(Vec::new()));
    let sink = lines.clone();
    let rt = Runtime::builder()
        .diagnostics(move |l| sink.lock().unwrap().push(l.to_string()))
        .build();
    (rt, lines)
}

fn show(a: Answer) -> String {
    a.to_term().to_string()
}

#[test]
fn get_follows_the_answer_protocol() {
    let rt = rt();
    let e = rt.engine_from_text("X", "member(X,[1,2])").unwrap();
    let got: Vec<_> = (0..5).map(|_| show(e.get())).collect();
    assert_eq!(got, ["the(1)", "the(2)", "no", "no", "no"]);
    assert!(!e.is_alive());
}

#[test]
fn returned_values_arrive_as_answers() {
    let rt = Runtime::with_program("hello_loop :- return(hello), hello_loop.").unwrap();
    let e = rt.engine_from_text("_", "hello_loop").unwrap();
    assert_eq!(show(e.get()), "the(hello)");
    assert_eq!(show(e.get()), "the(hello)");
    assert!(e.is_alive());
}

#[test]
fn stop_is_idempotent_and_final() {
    let rt = rt();
    let e = rt.engine_from_text("X", "member(X,[a,b,c])").unwrap();
    assert_eq!(show(e.get()), "the(a)");
    assert_eq!(rt.live_engines(), 1);
    e.stop();
    e.stop();
    assert_eq!(rt.live_engines(), 0);
    assert!(e.get().is_no());
    assert!(e.get().is_no());
}

#[test]
fn exhaustion_releases_the_engine() {
    let rt = rt();
    let e = rt.engine_from_text("X", "member(X,[a])").unwrap();
    assert_eq!(rt.live_engines(), 1);
    assert_eq!(show(e.get()), "the(a)");
    assert!(e.get().is_no());
    assert_eq!(rt.live_engines(), 0);
}

#[test]
fn engines_made_by_object_code_are_released() {
    let rt = rt();
    // findall and friends create and exhaust private engines
    let out = rt
        .answers(
            "findall(_X, member(_X,[1,2,3]), L), count_partitions(6,R)",
            None,
        )
        .unwrap();
    assert_eq!(out, ["L=[1,2,3], R=11"]);
    assert_eq!(rt.live_engines(), 0);
}

#[test]
fn dropping_an_owned_engine_stops_it() {
    let rt = rt();
    {
        let e = rt.engine_from_text("X", "member(X,[1,2,3])").unwrap();
        assert_eq!(show(e.get()), "the(1)");
        assert_eq!(rt.live_engines(), 1);
    }
    assert_eq!(rt.live_engines(), 0);

    let handle = rt
        .engine_from_text("X", "member(X,[1,2,3])")
        .unwrap()
        .into_handle();
    assert_eq!(rt.live_engines(), 1);
    let view = rt.engine(&handle).unwrap();
    assert_eq!(show(view.get()), "the(1)");
    drop(view);
    // a view does not own the engine
    assert_eq!(rt.live_engines(), 1);
    let again = rt.engine(&handle).unwrap();
    assert_eq!(show(again.get()), "the(2)");
    again.stop();
    assert_eq!(rt.live_engines(), 0);
}

#[test]
fn to_engine_feeds_from_engine_in_order() {
    let rt = Runtime::with_program(
        "echo :- from_engine(X), return(X), echo.
         twice :- from_engine(A), from_engine(B), return(A-B).",
    )
    .unwrap();
    let e = rt.engine_from_text("_", "echo").unwrap();
    for word in ["one", "two", "three"] {
        assert!(e.to_engine(&Term::atom(word)));
    }
    let got: Vec<_> = (0..3).map(|_| show(e.get())).collect();
    assert_eq!(got, ["the(one)", "the(two)", "the(three)"]);

    let t = rt.engine_from_text("_", "twice").unwrap();
    assert!(t.to_engine(&Term::int(1)));
    assert!(t.to_engine(&Term::int(2)));
    assert_eq!(show(t.get()), "the(1-2)");
}

#[test]
fn to_engine_on_a_stopped_engine_fails() {
    let rt = rt();
    let e = rt.engine_from_text("X", "member(X,[1])").unwrap();
    e.stop();
    assert!(!e.to_engine(&Term::int(1)));
    assert_eq!(
        rt.answers("new_engine(X,true,E), stop(E), to_engine(E,hi)", None)
            .unwrap(),
        Vec::<String>::new()
    );
}

#[test]
fn data_sent_to_an_engine_is_copied() {
    let rt = Runtime::with_program("bind :- from_engine(X), X = bound, return(X).").unwrap();
    let e = rt.engine_from_text("_", "bind").unwrap();
    let v = Term::var();
    assert!(e.to_engine(&v));
    assert_eq!(show(e.get()), "the(bound)");
    assert!(matches!(v.deref(), Term::Var(_)));
}

#[test]
fn sum_loop_accepts_injected_goals() {
    let rt = rt();
    let e = rt.engine_from_text("_", "sum_loop(0)").unwrap();
    let step = parse_term("(S1=>S2 :- S2 is S1+2)").unwrap();
    assert!(e.to_engine(&step));
    assert_eq!(show(e.get()), "the(0=>2)");
    let step = parse_term("(S1=>S2 :- S2 is S1+5)").unwrap();
    assert!(e.to_engine(&step));
    assert_eq!(show(e.get()), "the(2=>7)");
}

#[test]
fn failing_injected_goal_kills_the_engine() {
    let rt = rt();
    let e = rt.engine_from_text("_", "sum_loop(0)").unwrap();
    assert!(e.to_engine(&parse_term("(_=>_ :- fail)").unwrap()));
    assert!(e.get().is_no());
    assert!(!e.is_alive());
    assert!(!e.to_engine(&Term::int(1)));
}

#[test]
fn engines_nest() {
    let rt = rt();
    let out = rt
        .answers(
            "new_engine(X, member(X,[1,2]), Inner),
             new_engine(Y-A, (member(Y,[a,b]), get(Inner,A)), Outer),
             get(Outer,R1), get(Outer,R2), get(Outer,R3)",
            None,
        )
        .unwrap();
    assert_eq!(out.len(), 1);
    let line = &out[0];
    assert!(line.contains("R1=the(a-the(1))"), "{line}");
    assert!(line.contains("R2=the(b-the(2))"), "{line}");
    assert!(line.contains("R3=no"), "{line}");
}

#[test]
fn engines_do_not_interfere() {
    let rt = rt();
    let a = rt.engine_from_text("X", "member(X,[1,2,3])").unwrap();
    let b = rt.engine_from_text("X", "member(X,[1,2,3])").unwrap();
    assert_eq!(show(a.get()), "the(1)");
    assert_eq!(show(a.get()), "the(2)");
    assert_eq!(show(b.get()), "the(1)");
    assert_eq!(show(a.get()), "the(3)");
    assert_eq!(show(b.get()), "the(2)");
}

#[test]
fn answers_do_not_alias_the_pattern() {
    let rt = rt();
    let e = rt.engine_from_text("f(X,Y)", "X = Y").unwrap();
    let a = e.get().into_option().unwrap();
    let args = a.args();
    // the two variables in the answer are shared with each other only
    assert!(matches!(args[0].deref(), Term::Var(_)));
    interactors::unify(&args[0], &Term::int(7), &mut interactors::Bindings::new());
    assert_eq!(args[1].deref().to_string(), "7");
}

#[test]
fn a_running_engine_cannot_be_resumed_again() {
    let (rt, lines) = recording();
    let e = rt
        .engine_from_text("A", "from_engine(Me), get(Me, A)")
        .unwrap();
    assert!(e.to_engine(&e.handle()));
    match e.next_event() {
        MachineEvent::Error(err) => assert_eq!(err.kind, ErrorKind::EngineBusy),
        other => panic!("expected an error, got {other:?}"),
    }
    assert!(!e.is_alive());

    let f = rt
        .engine_from_text("A", "from_engine(Me), get(Me, A)")
        .unwrap();
    assert!(f.to_engine(&f.handle()));
    assert!(f.get().is_no());
    let lines = lines.lock().unwrap();
    assert_eq!(lines.len(), 1, "{lines:?}");
    assert!(lines[0].contains("engine_busy"), "{lines:?}");
}

#[test]
fn unknown_handles_read_as_dead() {
    let rt = rt();
    let ghost = rt
        .engine(&parse_term("'$engine'(987654)").unwrap())
        .unwrap();
    assert!(!ghost.is_alive());
    assert!(ghost.get().is_no());
    assert!(!ghost.to_engine(&Term::int(1)));
    ghost.stop();
    assert!(rt.engine(&Term::atom("nope")).is_none());
    assert_eq!(
        rt.answers("get('$engine'(987654), A)", None).unwrap(),
        ["A=no"]
    );
}

#[test]
fn backtracking_into_creation_makes_a_fresh_engine() {
    let rt = rt();
    let out = rt
        .answers(
            "member(_, [x,y]), new_engine(Z, member(Z,[1,2]), E), get(E, A)",
            None,
        )
        .unwrap();
    assert_eq!(out.len(), 2);
    let handles: Vec<_> = out
        .iter()
        .map(|l| l.split(", ").next().unwrap().to_string())
        .collect();
    assert_ne!(handles[0], handles[1]);
    for line in &out {
        assert!(line.ends_with("A=the(1)"), "{line}");
    }
}

#[test]
fn machine_errors_are_diagnosed_and_end_the_stream() {
    let (rt, lines) = recording();
    let e = rt.engine_from_text("X", "X is foo + 1").unwrap();
    assert!(e.get().is_no());
    assert!(e.get().is_no());
    let lines = lines.lock().unwrap();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].contains("type_error"), "{lines:?}");
}

#[test]
fn new_engine_rejects_non_callable_goals() {
    let rt = rt();
    assert_eq!(
        rt.new_engine(&Term::var(), &Term::int(3)).unwrap_err().kind,
        ErrorKind::TypeError
    );
    assert_eq!(
        rt.new_engine(&Term::var(), &Term::var()).unwrap_err().kind,
        ErrorKind::TypeError
    );
}

#[test]
fn engine_is_an_iterator() {
    let rt = rt();
    let e = rt.engine_from_text("X-Y", "append(X,Y,[1,2])").unwrap();
    let got: Vec<_> = e.map(|t| t.to_string()).collect();
    assert_eq!(got, ["[]-[1,2]", "[1]-[2]", "[1,2]-[]"]);
}

#[test]
fn trace_reports_each_resume() {
    let lines = Arc::new(Mutex::new(Vec::new()));
    let sink = lines.clone();
    let rt = Runtime::builder()
        .diagnostics(move |l| sink.lock().unwrap().push(l.to_string()))
        .trace(true)
        .build();
    let e = rt.engine_from_text("X", "member(X,[1])").unwrap();
    assert!(e.get().into_option().is_some());
    assert!(e.get().is_no());
    let lines = lines.lock().unwrap();
    assert!(
        lines.iter().all(|l| l.starts_with("[trace] engine")),
        "{lines:?}"
    );
    assert!(lines.len() >= 2, "{lines:?}");
}
