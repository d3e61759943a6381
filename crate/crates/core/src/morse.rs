//! Intersection functions of paths in the Cayley graph, read off labels.
//!
//! `rho(t)` is the length of the longest common subword of the path label
//! and some element of the symmetrized closure of length at most `t`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, Rational};
use crate::suffix::SuffixAutomaton;
use crate::words::{Presentation, Word};

/// A common subword: `length` letters starting at cyclic offset `offset` of
/// relator `relator` (inverted if `inverse`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RhoWitness {
    pub relator: usize,
    pub inverse: bool,
    pub offset: usize,
    pub length: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionTable {
    #[serde(rename = "tMax")]
    pub t_max: usize,
    /// `values[t - 1] = rho(t)`.
    pub values: Vec<usize>,
    pub witnesses: Vec<Option<RhoWitness>>,
}

impl IntersectionTable {
    pub fn rho(&self, t: usize) -> usize {
        if t == 0 {
            0
        } else {
            self.values[t.min(self.t_max) - 1]
        }
    }

    pub fn witness_word(&self, p: &Presentation, w: &RhoWitness) -> Word {
        let r = &p.relators()[w.relator];
        let c = if w.inverse { r.inverse() } else { r.clone() };
        Word((0..w.length).map(|k| c.at(w.offset + k)).collect())
    }
}

/// The first `len` letters of the periodic word `period^infinity`.
pub fn periodic_path(period: &Word, len: usize) -> Word {
    assert!(!period.is_empty());
    Word((0..len).map(|k| period.0[k % period.len()]).collect())
}

/// Periodic label long enough that every subword of length `<= t_max` of
/// the infinite periodic path occurs in it.
pub fn periodic_path_for(period: &Word, t_max: usize) -> Word {
    periodic_path(period, t_max + period.len())
}

pub fn intersection_function(path: &Word, p: &Presentation, t_max: usize) -> Result<IntersectionTable> {
    if !path.is_reduced() {
        return Err(Error::Input("path label must be freely reduced".into()));
    }
    let codes: Vec<u32> = path.letters().iter().map(|l| l.code()).collect();
    let sam = SuffixAutomaton::new(&codes);
    // best shared subword per relator (both orientations)
    let per_relator: Vec<Option<RhoWitness>> = p
        .relators()
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let n = r.len();
            if n > t_max || path.is_empty() {
                return None;
            }
            let mut best: Option<RhoWitness> = None;
            for (inverse, c) in [(false, r.clone()), (true, r.inverse())] {
                let doubled: Vec<u32> = (0..2 * n).map(|k| c.at(k).code()).collect();
                let m = sam.match_lengths(&doubled, n);
                for (j, &l) in m.iter().enumerate() {
                    if l > 0 && best.is_none_or(|b| l > b.length) {
                        best = Some(RhoWitness {
                            relator: i,
                            inverse,
                            offset: (j + 1 - l) % n,
                            length: l,
                        });
                    }
                }
            }
            best
        })
        .collect();

    let mut by_len: Vec<Option<RhoWitness>> = vec![None; t_max + 1];
    for (i, w) in per_relator.into_iter().enumerate() {
        if let Some(w) = w {
            let n = p.relators()[i].len();
            if by_len[n].is_none_or(|b| w.length > b.length) {
                by_len[n] = Some(w);
            }
        }
    }
    let mut values = Vec::with_capacity(t_max);
    let mut witnesses = Vec::with_capacity(t_max);
    let mut cur: Option<RhoWitness> = None;
    for slot in by_len.iter().skip(1) {
        if let Some(w) = slot {
            if cur.is_none_or(|c| w.length > c.length) {
                cur = Some(*w);
            }
        }
        values.push(cur.map_or(0, |c| c.length));
        witnesses.push(cur);
    }
    Ok(IntersectionTable { t_max, values, witnesses })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicVerdict {
    pub pass: bool,
    /// Smallest `t` with `3 rho(t) > t`.
    #[serde(rename = "firstViolation")]
    pub first_violation: Option<usize>,
}

/// `rho(t) <= t/3` for every `t <= tMax`.
pub fn check_geodesic_criterion(tbl: &IntersectionTable) -> GeodesicVerdict {
    let first_violation = (1..=tbl.t_max).find(|&t| 3 * tbl.rho(t) > t);
    GeodesicVerdict {
        pass: first_violation.is_none(),
        first_violation,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicRow {
    pub t: usize,
    pub rho: usize,
    pub ratio: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SublinearityProbe {
    pub certificate: &'static str,
    pub dyadic: Vec<DyadicRow>,
    #[serde(rename = "maxDyadicRatio")]
    pub max_dyadic_ratio: String,
    /// `(t, E(t))` with `E(t) = max_{t <= s <= tMax} rho(s)/s`, at tMax/4, tMax/2, tMax.
    pub envelope: Vec<(usize, String)>,
    #[serde(rename = "consistentWithSublinear")]
    pub consistent_with_sublinear: bool,
}

/// Finite-scale trend of `rho(t)/t`. The upper envelope is sampled at the
/// top three dyadic scales; the flag is set when it is nonincreasing there
/// and either strictly drops or is already zero.
pub fn sublinearity_probe(tbl: &IntersectionTable) -> Result<SublinearityProbe> {
    let t_max = tbl.t_max;
    if t_max < 100 {
        return Err(Error::Input(format!("tMax must be at least 100 (got {t_max})")));
    }
    let ratio = |t: usize| Rational::new(tbl.rho(t) as i128, t as i128);
    let mut envelope_all = vec![int(0); t_max + 2];
    for t in (1..=t_max).rev() {
        envelope_all[t] = envelope_all[t + 1].max(ratio(t));
    }
    let mut dyadic = Vec::new();
    let mut max_ratio = int(0);
    let mut t = 1;
    while t <= t_max {
        max_ratio = max_ratio.max(ratio(t));
        dyadic.push(DyadicRow { t, rho: tbl.rho(t), ratio: fmt_rational(&ratio(t)) });
        t *= 2;
    }
    let probes = [t_max / 4, t_max / 2, t_max];
    let e: Vec<Rational> = probes.iter().map(|&t| envelope_all[t]).collect();
    let consistent = e[0] >= e[1] && e[1] >= e[2] && (e[2] < e[0] || e[2] == int(0));
    Ok(SublinearityProbe {
        certificate: "finite-scale probe",
        dyadic,
        max_dyadic_ratio: fmt_rational(&max_ratio),
        envelope: probes.iter().zip(&e).map(|(&t, v)| (t, fmt_rational(v))).collect(),
        consistent_with_sublinear: consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, Letter};
    use proptest::prelude::*;

    fn synthetic(t_max: usize, f: impl Fn(usize) -> usize) -> IntersectionTable {
        IntersectionTable {
            t_max,
            values: (1..=t_max).map(f).collect(),
            witnesses: vec![None; t_max],
        }
    }

    /// Quadratic common-substring oracle.
    fn oracle(path: &Word, p: &Presentation, t_max: usize) -> Vec<usize> {
        let mut by_len = vec![0usize; t_max + 1];
        for r in p.relators() {
            let n = r.len();
            if n > t_max {
                continue;
            }
            for c in [r.clone(), r.inverse()] {
                for s in 0..n {
                    for l in 1..=n {
                        let sub: Vec<Letter> = (0..l).map(|k| c.at(s + k)).collect();
                        if path.0.windows(l).any(|w| w == sub.as_slice()) {
                            by_len[n] = by_len[n].max(l);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = 0;
        for v in by_len.iter().skip(1) {
            cur = cur.max(*v);
            out.push(cur);
        }
        out
    }

    #[test]
    fn absent_letters_give_zero() {
        let p = Presentation::from_strs(Alphabet::from_str_names("a b c").unwrap(), &["bcbc'", "bbc"]).unwrap();
        let path = periodic_path_for(&p.alphabet.parse_word("a").unwrap(), 50);
        let t = intersection_function(&path, &p, 50).unwrap();
        assert!(t.values.iter().all(|&v| v == 0));
        assert!(check_geodesic_criterion(&t).pass);
    }

    #[test]
    fn geodesic_criterion_arithmetic() {
        let t = synthetic(10, |t| if t >= 6 { 3 } else { 0 });
        let v = check_geodesic_criterion(&t);
        assert!(!v.pass);
        assert_eq!(v.first_violation, Some(6));
    }

    #[test]
    fn probe_examples() {
        assert!(sublinearity_probe(&synthetic(400, |_| 5)).unwrap().consistent_with_sublinear);
        assert!(!sublinearity_probe(&synthetic(400, |t| t)).unwrap().consistent_with_sublinear);
        let sqrt = |t: usize| crate::rational::ceil_sqrt(t as u128) as usize;
        assert!(sublinearity_probe(&synthetic(1000, sqrt)).unwrap().consistent_with_sublinear);
        assert!(sublinearity_probe(&synthetic(50, sqrt)).is_err());
    }

    #[test]
    fn witness_is_common_subword() {
        let p = Presentation::from_strs(Alphabet::from_str_names("a b").unwrap(), &["aaab", "aab'ab'"]).unwrap();
        let path = periodic_path_for(&p.alphabet.parse_word("a").unwrap(), 20);
        let t = intersection_function(&path, &p, 20).unwrap();
        assert_eq!(t.rho(4), 3);
        assert_eq!(t.rho(3), 0);
        let w = t.witnesses[19].unwrap();
        let sub = t.witness_word(&p, &w);
        assert!(sub.is_subword_of(&path));
    }

    fn letters(max_gen: i32) -> impl Strategy<Value = Letter> {
        (0..max_gen, any::<bool>()).prop_map(|(g, inv)| if inv { Letter::inv_gen(g as usize) } else { Letter::gen(g as usize) })
    }

    proptest! {
        #[test]
        fn matches_quadratic_oracle(
            path in proptest::collection::vec(letters(2), 0..60),
            rels in proptest::collection::vec(proptest::collection::vec(letters(2), 1..10), 1..6),
            t_max in 1usize..14,
        ) {
            let path = crate::words::free_reduce(&Word(path));
            let mut p = Presentation::free(Alphabet::from_str_names("a b").unwrap());
            for r in rels {
                let cr = crate::words::cyclic_reduce(&Word(r));
                if !cr.trivial {
                    let _ = p.add_relator(cr.core);
                }
            }
            let t = intersection_function(&path, &p, t_max).unwrap();
            prop_assert_eq!(&t.values, &oracle(&path, &p, t_max));
            for (i, v) in t.values.iter().enumerate() {
                prop_assert!(*v <= i + 1);
                if i > 0 { prop_assert!(t.values[i - 1] <= *v); }
            }
            for w in t.witnesses.iter().flatten() {
                prop_assert!(t.witness_word(&p, w).is_subword_of(&path));
            }
        }
    }
}
