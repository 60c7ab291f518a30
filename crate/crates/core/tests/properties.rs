use fibaut::arith;
use fibaut::automata::{deserialize, serialize, Automaton, Kind};
use fibaut::linrep::{counting_linrep, digits_word};
use fibaut::logic::{parse_formula, Engine};
use fibaut::numeration::{decode_u64, encode_u64};
use fibaut::reproduce::brute_force;
use fibaut::synth::guess_dfa;
use proptest::prelude::*;

fn automaton(arity: usize, max_states: usize) -> impl Strategy<Value = Automaton> {
    (1..=max_states).prop_flat_map(move |n| {
        let nsym = 1usize << arity;
        (
            prop::collection::vec(0..n as u32, n * nsym),
            prop::collection::vec(0..2u32, n),
        )
            .prop_map(move |(trans, outputs)| {
                Automaton::from_parts(arity, Kind::Dfa, 0, outputs, trans).unwrap()
            })
    })
}

fn word(arity: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..1u32 << arity, 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn boolean_laws(a in automaton(2, 5), b in automaton(2, 5), c in automaton(2, 5)) {
        prop_assert!(a.complement().unwrap().complement().unwrap().equivalent(&a).unwrap());
        let lhs = a.union(&b).unwrap().complement().unwrap();
        let rhs = a.complement().unwrap().intersect(&b.complement().unwrap()).unwrap();
        prop_assert!(lhs.equivalent(&rhs).unwrap());
        let lhs = a.intersect(&b.union(&c).unwrap()).unwrap();
        let rhs = a.intersect(&b).unwrap().union(&a.intersect(&c).unwrap()).unwrap();
        prop_assert!(lhs.equivalent(&rhs).unwrap());
    }

    #[test]
    fn minimization_is_canonical(a in automaton(1, 7), w in word(1)) {
        let m = a.minimize();
        prop_assert_eq!(m.minimize(), m.clone());
        prop_assert_eq!(a.intersect(&a).unwrap().minimize(), m.clone());
        prop_assert_eq!(m.accepts(&w), a.accepts(&w));
        prop_assert!(m.num_states() <= a.num_states());
    }

    #[test]
    fn products_agree_with_membership(a in automaton(2, 5), b in automaton(2, 5), w in word(2)) {
        prop_assert_eq!(a.intersect(&b).unwrap().accepts(&w), a.accepts(&w) && b.accepts(&w));
        prop_assert_eq!(a.union(&b).unwrap().accepts(&w), a.accepts(&w) || b.accepts(&w));
    }

    #[test]
    fn projection_is_existential(a in automaton(2, 4), w in prop::collection::vec(0..2u32, 0..8)) {
        let a = a.zero_normalize().unwrap();
        let p = a.project(1).unwrap();
        // the dropped value may be longer, so the kept one is zero padded
        let witness = (0..=6usize).any(|pad| {
            let kept: Vec<u32> = std::iter::repeat_n(0, pad).chain(w.iter().copied()).collect();
            let n = kept.len();
            (0..1u32 << n).any(|code| {
                let pair: Vec<u32> = (0..n).map(|i| (kept[i] << 1) | (code >> i & 1)).collect();
                a.accepts(&pair)
            })
        });
        prop_assert_eq!(p.accepts(&w), witness);
    }

    #[test]
    fn text_format_round_trips(a in automaton(3, 4)) {
        prop_assert_eq!(deserialize(&serialize(&a)).unwrap(), a);
    }

    #[test]
    fn learner_recovers_small_zero_invariant_dfas(
        trans in prop::collection::vec(0..8u32, 16),
        outputs in prop::collection::vec(0..2u32, 8),
        k in 1usize..=8,
    ) {
        let mut t: Vec<u32> = trans[..2 * k].iter().map(|&q| q % k as u32).collect();
        t[0] = 0;
        let target = Automaton::from_parts(1, Kind::Dfa, 0, outputs[..k].to_vec(), t).unwrap().minimize();
        let bound = 2 * target.num_states() + 2;
        let learned = guess_dfa(1, bound, |w| target.accepts(w)).unwrap();
        prop_assert!(learned.equivalent(&target).unwrap());
    }

    #[test]
    fn counting_values_ignore_padding(rel in automaton(2, 4), n in 0u64..500) {
        let valid = arith::valid();
        let both = valid.cylindrify(2, &[0]).unwrap().intersect(&valid.cylindrify(2, &[1]).unwrap()).unwrap();
        if let Ok(lr) = counting_linrep(&rel.intersect(&both).unwrap(), 0) {
            let v = lr.evaluate(&digits_word(n, 0));
            for pad in 1..4 {
                prop_assert_eq!(lr.evaluate(&digits_word(n, pad)), v.clone());
            }
        }
    }

    #[test]
    fn zeckendorf_round_trip(n in 0u64..1_000_000_000) {
        let z = encode_u64(n);
        prop_assert!(z.is_canonical());
        prop_assert_eq!(decode_u64(z.digits()), Some(n));
    }
}

const SHAPES: &[&str] = &[
    "x+y=z+3",
    "x-y<z",
    "2*x=y+z | x/2>z",
    "Ew w<=x & w+w=y",
    "Aw w<=y => (w<x | z>=w)",
    "~(x=y) <=> (x<y | y<x)",
    "x-y!=z",
    "3*x<=y+1 => z/3=x",
];

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn engine_matches_brute_force(shape in 0..SHAPES.len(), x in 0u64..500, y in 0u64..500, z in 0u64..500) {
        let f = parse_formula(&format!("({}) & x=x & y=y & z=z", SHAPES[shape])).unwrap();
        let rel = Engine::default().relation(&f).unwrap();
        let mut env = vec![("x".to_string(), x), ("y".to_string(), y), ("z".to_string(), z)];
        prop_assert_eq!(rel.dfa().accepts_values(&[x, y, z]), brute_force(&f, &mut env, 500));
    }
}
