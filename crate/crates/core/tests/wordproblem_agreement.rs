use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sc_forge::base::two_generator;
use sc_forge::wordproblem::{dehn_reduce, is_identity_bfs, BfsVerdict};
use sc_forge::words::{free_reduce, Letter, Word};

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    while out.len() < len {
        let g = rng.gen_range(0..2);
        let l = if rng.gen() { Letter::gen(g) } else { Letter::inv_gen(g) };
        if out.last() != Some(&l.inverse()) {
            out.push(l);
        }
    }
    Word(out)
}

#[test]
fn conjugates_products_and_random_words_agree() {
    let p = two_generator();
    let r = p.relators()[0].word().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases: Vec<(Word, bool)> = Vec::new();
    for _ in 0..40 {
        let glen = rng.gen_range(0..3);
        let g = random_word(&mut rng, glen);
        let k = rng.gen_range(0..r.len());
        let rel = if rng.gen() { r.rotate(k) } else { r.rotate(k).inverse() };
        cases.push((free_reduce(&g.concat(&rel).concat(&g.inverse())), true));
    }
    for _ in 0..15 {
        let a = r.rotate(rng.gen_range(0..r.len()));
        let b = r.rotate(rng.gen_range(0..r.len())).inverse();
        let g = random_word(&mut rng, 1);
        cases.push((free_reduce(&a.concat(&g).concat(&b).concat(&g.inverse())), true));
    }
    for _ in 0..40 {
        let len = rng.gen_range(9..13);
        cases.push((random_word(&mut rng, len), false));
    }
    let mut conclusive = 0;
    for (w, _) in &cases {
        let (reduced, _) = dehn_reduce(w, &p).unwrap();
        let bfs = is_identity_bfs(w, &p, w.len() + 2, 400_000).unwrap();
        match bfs.verdict {
            BfsVerdict::Identity => assert!(reduced.is_empty(), "{}", p.alphabet.render(w)),
            BfsVerdict::NotIdentityWithinRadius => assert!(!reduced.is_empty(), "{}", p.alphabet.render(w)),
            BfsVerdict::Inconclusive => continue,
        }
        conclusive += 1;
    }
    assert!(conclusive * 2 >= cases.len(), "only {conclusive} conclusive runs");
    for (w, identity) in &cases {
        if *identity {
            assert!(dehn_reduce(w, &p).unwrap().0.is_empty());
        }
    }
}
