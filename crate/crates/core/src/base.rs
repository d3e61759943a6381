//! Base presentations shipped with the toolkit.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::text::parse_presentation;
use crate::words::{Alphabet, CyclicWord, Letter, Presentation, Word};

pub const SURFACE_GENUS_2: &str = include_str!("../data/surface2.pres");
pub const STAIRCASE: &str = include_str!("../data/staircase.pres");
pub const BLOCKS: &str = include_str!("../data/blocks.pres");
pub const TWO_GENERATOR: &str = include_str!("../data/two-generator.pres");

/// Seed and target lengths of the shipped block family.
pub const BLOCKS_SEED: u64 = 36;
pub const BLOCKS_LENGTHS: [usize; 4] = [320, 350, 390, 450];

pub fn surface_genus_2() -> Presentation {
    parse_presentation(SURFACE_GENUS_2).expect("shipped data parses")
}

pub fn staircase_family() -> Presentation {
    parse_presentation(STAIRCASE).expect("shipped data parses")
}

pub fn block_family_shipped() -> Presentation {
    parse_presentation(BLOCKS).expect("shipped data parses")
}

pub fn two_generator() -> Presentation {
    parse_presentation(TWO_GENERATOR).expect("shipped data parses")
}

/// `r_n = a b a b^2 ... a b^n` for `n = 1..=n_max`.
pub fn staircase(n_max: usize) -> Presentation {
    let alphabet = Alphabet::from_str_names("a b").unwrap();
    let (a, b) = (Letter::gen(0), Letter::gen(1));
    let mut p = Presentation::free(alphabet);
    for n in 1..=n_max {
        let mut w = Vec::new();
        for k in 1..=n {
            w.push(a);
            w.extend(std::iter::repeat_n(b, k));
        }
        p.add_relator(CyclicWord::new(Word(w)).unwrap()).unwrap();
    }
    p
}

const SEPARATORS: usize = 5;
const RUN_MIN: usize = 11;
const RUN_MAX: usize = 16;

/// Relators `X_1 y^{e_1} X_2 y^{e_2} ...` over separator letters `b c d e g`
/// and a run letter `y`, with `11 <= e_j <= 16`. Every cyclic triple
/// `(X_j, e_j, X_{j+1})` occurs once in the whole family, so a piece holds at
/// most one separator and has length at most `2 * 16 + 1`.
pub fn block_family(seed: u64, lengths: &[usize]) -> Result<Presentation> {
    let alphabet = Alphabet::from_str_names("b c d e g y").unwrap();
    let y = Letter::gen(SEPARATORS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut p = Presentation::free(alphabet);
    for &len in lengths {
        let blocks = (0..10_000)
            .find_map(|_| {
                let first = rng.gen_range_usize(SEPARATORS);
                let mut path = Vec::new();
                let mut budget = 200_000usize;
                if search(first, first, len, &mut used, &mut path, &mut rng, &mut budget) {
                    Some((first, path))
                } else {
                    None
                }
            })
            .ok_or_else(|| Error::Internal(format!("no block relator of length {len}")))?;
        let (first, path) = blocks;
        let mut w = Vec::with_capacity(len);
        let mut x = first;
        for &(e, next) in &path {
            w.push(Letter::gen(x));
            w.extend(std::iter::repeat_n(y, e));
            x = next;
        }
        p.add_relator(CyclicWord::new(Word(w))?)?;
    }
    Ok(p)
}

trait GenRange {
    fn gen_range_usize(&mut self, n: usize) -> usize;
}

impl GenRange for ChaCha8Rng {
    fn gen_range_usize(&mut self, n: usize) -> usize {
        use rand::Rng;
        self.gen_range(0..n)
    }
}

fn reachable(rem: usize) -> bool {
    rem == 0 || (1..=rem / (RUN_MIN + 1)).any(|k| rem <= k * (RUN_MAX + 1))
}

/// Depth-first search for blocks `(e_j, X_{j+1})` starting after separator
/// `x`, closing back to `first` exactly when `rem` letters are used up.
fn search(
    first: usize,
    x: usize,
    rem: usize,
    used: &mut HashSet<(usize, usize, usize)>,
    path: &mut Vec<(usize, usize)>,
    rng: &mut ChaCha8Rng,
    budget: &mut usize,
) -> bool {
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let mut moves: Vec<(usize, usize)> = (RUN_MIN..=RUN_MAX)
        .flat_map(|e| (0..SEPARATORS).map(move |n| (e, n)))
        .collect();
    moves.shuffle(rng);
    for (e, next) in moves {
        let block = e + 1;
        if block > rem || !reachable(rem - block) || used.contains(&(x, e, next)) {
            continue;
        }
        let closing = rem == block;
        if closing && next != first {
            continue;
        }
        used.insert((x, e, next));
        path.push((e, next));
        if closing || search(first, next, rem - block, used, path, rng, budget) {
            return true;
        }
        path.pop();
        used.remove(&(x, e, next));
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pieces::check_c_prime;
    use crate::rational::ratio;
    use crate::text::serialize_presentation;

    #[test]
    fn shipped_blocks_match_generator() {
        let p = block_family(BLOCKS_SEED, &BLOCKS_LENGTHS).unwrap();
        assert_eq!(serialize_presentation(&p), BLOCKS);
        let lens: Vec<usize> = p.relators().iter().map(|r| r.len()).collect();
        assert_eq!(lens, BLOCKS_LENGTHS.to_vec());
    }

    #[test]
    fn shipped_blocks_are_c_prime_ninth() {
        let rep = check_c_prime(&block_family_shipped(), ratio(1, 9));
        assert!(rep.verdict);
        assert!(rep.per_relator.iter().all(|r| r.max_piece <= 2 * RUN_MAX + 1));
    }

    #[test]
    fn shipped_staircase_is_the_literal_family() {
        assert_eq!(serialize_presentation(&staircase(30)), STAIRCASE);
    }

    #[test]
    fn two_generator_presentation_is_c_sixth() {
        let p = two_generator();
        assert_eq!(p.alphabet.len(), 2);
        assert!(check_c_prime(&p, ratio(1, 6)).verdict);
        assert!(check_c_prime(&surface_genus_2(), ratio(1, 6)).verdict);
    }
}
