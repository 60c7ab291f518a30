use fibaut::logic::Engine;
use fibaut::numeration::floor_phi_u64;
use fibaut::seqs;
use fibaut::synth::{synthesize_certified, Certificate, Verdict};

fn table(name: &'static str) -> impl Fn(usize) -> Vec<i128> {
    move |n| seqs::table(name, n).unwrap()
}

#[test]
fn lower_wythoff_is_certified() {
    let e = Engine::default();
    let r = synthesize_certified(&e, "phin", &table("beatty_b"), Certificate::Wythoff, &[1 << 12]).unwrap();
    assert_eq!(r.verdict, Verdict::Certified);
    let a = r.automaton.as_ref().unwrap();
    for n in 0..50_000u64 {
        assert!(a.accepts_values(&[n, floor_phi_u64(n)]));
    }
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(json["verdict"], "Certified");
}

#[test]
fn generalized_recurrences_are_certified() {
    let e = Engine::default();
    let cases = [
        ("a21", Certificate::Fibonacci { x: 2, y: 1 }, 22),
        ("nested_b", Certificate::Nested, 24),
        ("lucas_variant", Certificate::Lucas, 102),
    ];
    for (name, cert, states) in cases {
        let r = synthesize_certified(&e, name, &table(name), cert, &[1 << 12, 1 << 14, 1 << 16]).unwrap();
        assert!(r.is_certified(), "{name}: {:?}", r.attempts);
        assert_eq!(r.automaton.unwrap().live_state_count(), states, "{name}");
    }
}

#[test]
fn wrong_certificate_is_not_accepted() {
    let e = Engine::default();
    // a_{2,1} does not satisfy the plain recurrence
    let r = synthesize_certified(&e, "a21", &table("a21"), Certificate::Fibonacci { x: 1, y: 1 }, &[1 << 12]).unwrap();
    assert_eq!(r.verdict, Verdict::Exhausted);
    assert!(r.attempts[0].outcome.contains("FALSE"), "{:?}", r.attempts);
}

#[test]
fn squares_are_not_synchronized() {
    let e = Engine::default();
    let squares = |n: usize| (0..n as i128).map(|i| i * i).collect::<Vec<_>>();
    let r = synthesize_certified(&e, "squares", &squares, Certificate::Function, &[1 << 10, 1 << 12]).unwrap();
    assert_eq!(r.verdict, Verdict::Exhausted);
    assert!(r.automaton.is_none());
}
