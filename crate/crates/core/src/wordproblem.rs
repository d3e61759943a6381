//! Dehn's algorithm for `C'(1/6)` presentations and a breadth-first
//! rewriting oracle for the identity problem.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pieces::check_c_prime;
use crate::rational::ratio;
use crate::words::{free_reduce, Letter, Presentation, Word};

/// One rewrite: `replaced` letters at `position` were a prefix of rotation
/// `rotation` of relator `relator` (inverted if `inverse`) and were replaced
/// by the inverse of the complementary `replacement` letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DehnStep {
    pub position: usize,
    pub relator: usize,
    pub inverse: bool,
    pub rotation: usize,
    pub replaced: usize,
    pub replacement: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DehnTrace {
    pub steps: Vec<DehnStep>,
}

struct Rotation {
    word: Vec<Letter>,
    relator: usize,
    inverse: bool,
    rotation: usize,
}

fn closure_rotations(p: &Presentation) -> Vec<Rotation> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, r) in p.relators().iter().enumerate() {
        for (inverse, c) in [(false, r.clone()), (true, r.inverse())] {
            for k in 0..c.len() {
                let w = c.word().rotate(k);
                if seen.insert(w.clone()) {
                    out.push(Rotation { word: w.0, relator: i, inverse, rotation: k });
                }
            }
        }
    }
    out.sort_by(|a, b| a.word.cmp(&b.word));
    out
}

/// Reduces `w` with Dehn's algorithm. Refuses presentations that are not
/// `C'(1/6)`, for which a nonempty terminal word would not certify anything.
pub fn dehn_reduce(w: &Word, p: &Presentation) -> Result<(Word, DehnTrace)> {
    if !check_c_prime(p, ratio(1, 6)).verdict {
        return Err(Error::Precondition(
            "Dehn reduction needs a C'(1/6) presentation".into(),
        ));
    }
    Ok(dehn_reduce_unchecked(w, p))
}

pub(crate) fn dehn_reduce_unchecked(w: &Word, p: &Presentation) -> (Word, DehnTrace) {
    let rots = closure_rotations(p);
    let mut cur = free_reduce(w);
    let mut trace = DehnTrace::default();
    'outer: loop {
        for i in 0..cur.len() {
            let mut best: Option<(usize, &Rotation)> = None;
            for rot in &rots {
                let n = rot.word.len();
                let l = cur.0[i..]
                    .iter()
                    .zip(&rot.word)
                    .take_while(|(a, b)| a == b)
                    .count();
                if 2 * l > n && best.is_none_or(|(bl, _)| l > bl) {
                    best = Some((l, rot));
                }
            }
            if let Some((l, rot)) = best {
                let complement: Vec<Letter> =
                    rot.word[l..].iter().rev().map(|x| x.inverse()).collect();
                let mut next = cur.0[..i].to_vec();
                next.extend_from_slice(&complement);
                next.extend_from_slice(&cur.0[i + l..]);
                trace.steps.push(DehnStep {
                    position: i,
                    relator: rot.relator,
                    inverse: rot.inverse,
                    rotation: rot.rotation,
                    replaced: l,
                    replacement: complement.len(),
                });
                cur = free_reduce(&Word(next));
                continue 'outer;
            }
        }
        return (cur, trace);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BfsVerdict {
    Identity,
    NotIdentityWithinRadius,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct BfsReport {
    pub verdict: BfsVerdict,
    pub radius: usize,
    pub explored: usize,
    pub cap: usize,
}

pub const DEFAULT_BFS_CAP: usize = 2_000_000;

/// Breadth-first closure of `w` under inserting elements of the symmetrized
/// closure followed by free reduction, restricted to reduced words of length
/// at most `radius`. Deleting a relator occurrence is the insertion of its
/// inverse next to it, so both rewriting directions are covered.
pub fn is_identity_bfs(w: &Word, p: &Presentation, radius: usize, cap: usize) -> Result<BfsReport> {
    let start = free_reduce(w);
    if radius < start.len() {
        return Err(Error::Input(format!(
            "radius {radius} is shorter than the reduced word ({})",
            start.len()
        )));
    }
    let rots = closure_rotations(p);
    let mut seen: HashSet<Vec<Letter>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.0.clone());
    queue.push_back(start.0);
    let report = |verdict, explored| BfsReport { verdict, radius, explored, cap };
    while let Some(cur) = queue.pop_front() {
        if cur.is_empty() {
            return Ok(report(BfsVerdict::Identity, seen.len()));
        }
        for pos in 0..=cur.len() {
            for rot in &rots {
                let mut next = Vec::with_capacity(cur.len() + rot.word.len());
                next.extend_from_slice(&cur[..pos]);
                next.extend_from_slice(&rot.word);
                next.extend_from_slice(&cur[pos..]);
                let next = free_reduce(&Word(next)).0;
                if next.len() > radius || seen.contains(&next) {
                    continue;
                }
                if next.is_empty() {
                    return Ok(report(BfsVerdict::Identity, seen.len() + 1));
                }
                if seen.len() >= cap {
                    return Ok(report(BfsVerdict::Inconclusive, seen.len()));
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(report(BfsVerdict::NotIdentityWithinRadius, seen.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn surface() -> Presentation {
        Presentation::from_strs(Alphabet::from_str_names("a b c d").unwrap(), &["aba'b'cdc'd'"]).unwrap()
    }

    #[test]
    fn relator_reduces_to_empty() {
        let p = surface();
        let w = p.relators()[0].word().clone();
        let (red, trace) = dehn_reduce(&w, &p).unwrap();
        assert!(red.is_empty());
        assert_eq!(trace.steps.len(), 1);
    }

    #[test]
    fn generator_is_terminal() {
        let p = surface();
        let a = p.alphabet.parse_word("a").unwrap();
        let (red, trace) = dehn_reduce(&a, &p).unwrap();
        assert_eq!(red, a);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn refuses_non_c16() {
        let p = Presentation::from_strs(Alphabet::from_str_names("a b").unwrap(), &["abab'"]).unwrap();
        assert!(dehn_reduce(&Word::empty(), &p).is_err());
    }

    #[test]
    fn trace_steps_shrink_and_use_long_subwords() {
        let p = surface();
        let w = p.alphabet.parse_word("c a b a'b'c d c'd' c' a").unwrap();
        let (red, trace) = dehn_reduce(&w, &p).unwrap();
        assert_eq!(red, p.alphabet.parse_word("a").unwrap());
        for s in &trace.steps {
            assert!(s.replacement < s.replaced);
            assert!(2 * s.replaced > p.relators()[s.relator].len());
        }
    }

    #[test]
    fn bfs_trivial_cases() {
        let p = surface();
        let r = is_identity_bfs(&Word::empty(), &p, 0, 10).unwrap();
        assert_eq!(r.verdict, BfsVerdict::Identity);
        let free = Presentation::free(Alphabet::from_str_names("a").unwrap());
        let a = free.alphabet.parse_word("a").unwrap();
        assert_eq!(is_identity_bfs(&a, &free, 5, 100).unwrap().verdict, BfsVerdict::NotIdentityWithinRadius);
        let w = p.relators()[0].word().clone();
        assert_eq!(is_identity_bfs(&w, &p, 8, 1000).unwrap().verdict, BfsVerdict::Identity);
    }
}
