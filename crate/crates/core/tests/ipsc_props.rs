use std::collections::BTreeSet;

use proptest::prelude::*;
use sc_forge::ipsc::{check_combination_decomposition, check_ipsc_witness, Decomposition, DecompositionPart, IpscWitness};
use sc_forge::rational::int;
use sc_forge::words::{cyclic_reduce, symmetrize, Alphabet, CyclicWord, Letter, Presentation, Word};
use sc_forge::FunctionSpec;

fn letters(n_gens: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..n_gens, any::<bool>()), 3..12).prop_map(|v| {
        v.into_iter()
            .map(|(g, neg)| if neg { Letter::inv_gen(g) } else { Letter::gen(g) })
            .collect()
    })
}

fn presentation(rels: Vec<Vec<Letter>>) -> Presentation {
    let mut p = Presentation::free(Alphabet::from_str_names("a b c").unwrap());
    for r in rels {
        let cr = cyclic_reduce(&Word(r));
        if !cr.trivial {
            let _ = p.add_relator(cr.core);
        }
    }
    p
}

/// Longest subword of `x` that is a common prefix of two distinct elements
/// of the symmetrized set, one of them a rotation of `r` or its inverse.
fn shared_piece_oracle(x: &Word, r: &CyclicWord, sym: &BTreeSet<Word>) -> usize {
    let own: BTreeSet<Word> = [r.clone(), r.inverse()].iter().flat_map(|c| c.rotations()).collect();
    let mut best = 0;
    for i in 0..x.len() {
        for j in i + 1..=x.len() {
            let s = &x.0[i..j];
            let is_piece = own.iter().any(|a| {
                a.0.starts_with(s) && sym.iter().any(|b| b != a && b.0.starts_with(s))
            });
            if is_piece {
                best = best.max(j - i);
            }
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn witness_conditions_match_direct_recomputation(
        rels in prop::collection::vec(letters(3), 1..4),
        pick in any::<prop::sample::Index>(),
        rot in any::<prop::sample::Index>(),
        cut in any::<prop::sample::Index>(),
        i in 1u64..6,
        n_i in 1u64..14,
    ) {
        let p = presentation(rels);
        prop_assume!(!p.relators().is_empty());
        let r = &p.relators()[pick.index(p.relators().len())];
        let rw = r.word().rotate(rot.index(r.len()));
        let x = Word(rw.0[..cut.index(rw.len() + 1)].to_vec());
        let f = FunctionSpec::Constant(int(6));
        let rep = check_ipsc_witness(&IpscWitness::new(rw.clone(), &x, i, n_i, f).unwrap(), &p).unwrap();
        prop_assert_eq!(rep.length, rw.len() as u64 >= n_i);
        prop_assert_eq!(rep.proportion, i * x.len() as u64 >= rw.len() as u64);
        let sym = symmetrize(&p);
        let pair = p.relators().iter().all(|q| 6 * shared_piece_oracle(&x, q, &sym) < q.len());
        prop_assert_eq!(rep.pair, pair);
    }

    #[test]
    fn adding_relators_never_repairs_the_pair_condition(
        rels in prop::collection::vec(letters(3), 1..3),
        extra in letters(3),
        cut in any::<prop::sample::Index>(),
    ) {
        let p = presentation(rels);
        prop_assume!(!p.relators().is_empty());
        let mut bigger = p.clone();
        let cr = cyclic_reduce(&Word(extra));
        prop_assume!(!cr.trivial && bigger.add_relator(cr.core).is_ok());
        let rw = p.relators()[0].word().clone();
        let x = Word(rw.0[..cut.index(rw.len() + 1)].to_vec());
        let f = FunctionSpec::Constant(int(6));
        let w = IpscWitness::new(rw, &x, 1, 1, f).unwrap();
        let small = check_ipsc_witness(&w, &p).unwrap();
        let large = check_ipsc_witness(&w, &bigger).unwrap();
        prop_assert!(!large.pair || small.pair);
        prop_assert_eq!((small.length, small.proportion), (large.length, large.proportion));
    }
}

#[test]
fn inflating_a_connector_breaks_condition_d() {
    let alphabet = Alphabet::from_str_names("a b c").unwrap();
    let base = Presentation::from_strs(alphabet.clone(), &["aabab'"]).unwrap();
    let build = |k: usize| {
        let u = alphabet.parse_word("aabab'").unwrap();
        let v = Word(vec![Letter::gen(2); k]);
        Decomposition {
            r_prime: CyclicWord::new(u.concat(&v)).unwrap(),
            parts: vec![DecompositionPart { u, r: base.relators()[0].clone(), v }],
            n: 1,
            b: 2,
            rho: FunctionSpec::Constant(int(2)),
        }
    };
    let ok = check_combination_decomposition(&build(2), &base).unwrap();
    assert!(ok.pass, "{ok:?}");
    let bad = check_combination_decomposition(&build(3), &base).unwrap();
    assert!(!bad.pass && !bad.parts[0].d && bad.parts[0].a && bad.parts[0].b && bad.parts[0].c);
    assert_eq!(bad.first_failure.as_deref(), Some("part 1 fails (d)"));
}
