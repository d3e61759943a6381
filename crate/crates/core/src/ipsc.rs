//! Finite certificates for the IPSC property: witness checks, the
//! hypotheses of the combination lemma, and the derived thresholds `n'_i`.
//!
//! IPSC quantifies over all sequences and all `K`; nothing here decides it.
//! Every verdict is a check of one finite witness.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspec::FunctionSpec;
use crate::pieces::{check_pair_condition, PairReport};
use crate::rational::int;
use crate::words::{is_cyclic_subword, symmetrize, CyclicWord, Presentation, Word};

/// A relator split as `r = x y` at the stored rotation, with an index `i`,
/// the threshold `n_i` and the function `f` of the pair condition.
#[derive(Clone, Debug)]
pub struct IpscWitness {
    pub r: Word,
    pub x_len: usize,
    pub i: u64,
    pub n_i: u64,
    pub f: FunctionSpec,
}

impl IpscWitness {
    pub fn new(r: Word, x: &Word, i: u64, n_i: u64, f: FunctionSpec) -> Result<IpscWitness> {
        if x.len() > r.len() || r.0[..x.len()] != x.0[..] {
            return Err(Error::Input("x must be a prefix of the given rotation of r".into()));
        }
        if i == 0 {
            return Err(Error::Input("index i must be at least 1".into()));
        }
        Ok(IpscWitness { r, x_len: x.len(), i, n_i, f })
    }

    pub fn x(&self) -> Word {
        Word(self.r.0[..self.x_len].to_vec())
    }

    pub fn y(&self) -> Word {
        Word(self.r.0[self.x_len..].to_vec())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IpscReport {
    pub certificate: &'static str,
    /// `|r| >= n_i`.
    pub length: bool,
    /// `i |x| >= |r|`.
    pub proportion: bool,
    /// The pair `(x, R)` satisfies `C'(1/f)`.
    pub pair: bool,
    #[serde(rename = "pairDetail")]
    pub pair_detail: PairReport,
    pub pass: bool,
}

pub fn check_ipsc_witness(w: &IpscWitness, p: &Presentation) -> Result<IpscReport> {
    let r = CyclicWord::new(w.r.clone())?;
    if !p.relators().iter().any(|q| q.canonical() == r.canonical()) {
        return Err(Error::Input("r is not a relator of the presentation".into()));
    }
    let n = w.r.len() as u64;
    let length = n >= w.n_i;
    let proportion = w.i * w.x_len as u64 >= n;
    let pair_detail = check_pair_condition(&w.x(), p, &w.f)?;
    let pair = pair_detail.verdict;
    Ok(IpscReport {
        certificate: "finite certificate",
        length,
        proportion,
        pair,
        pair_detail,
        pass: length && proportion && pair,
    })
}

#[derive(Clone, Debug)]
pub struct DecompositionPart {
    pub u: Word,
    pub r: CyclicWord,
    pub v: Word,
}

/// `r' = u_1 v_1 ... u_k v_k` up to rotation, with `u_i` a subword of `r_i`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub r_prime: CyclicWord,
    pub parts: Vec<DecompositionPart>,
    pub n: u64,
    pub b: u64,
    pub rho: FunctionSpec,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartVerdict {
    pub index: usize,
    /// `u_i` is a prefix of a rotation of `r_i`, and `r_i` lies in the symmetrized base set.
    pub a: bool,
    /// `B |u_i| >= |r_i|`.
    pub b: bool,
    /// `B |r'| >= |r_i|` and `B |r_i| >= |r'|`.
    pub c: bool,
    /// `|v_i| <= rho(|r'|)`.
    pub d: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub certificate: &'static str,
    /// The parts concatenate to a rotation of `r'`.
    pub concatenation: bool,
    /// `1 <= k <= N`.
    pub count: bool,
    pub parts: Vec<PartVerdict>,
    #[serde(rename = "firstFailure")]
    pub first_failure: Option<String>,
    pub pass: bool,
}

pub fn check_combination_decomposition(d: &Decomposition, base: &Presentation) -> Result<DecompositionReport> {
    check_combination_decomposition_with(d, &symmetrize(base))
}

/// As `check_combination_decomposition`, given the symmetrized base set.
pub fn check_combination_decomposition_with(d: &Decomposition, sym: &BTreeSet<Word>) -> Result<DecompositionReport> {
    let rp = d.r_prime.len() as u64;
    let rho = d.rho.eval(rp)?;
    let mut all = Vec::new();
    for part in &d.parts {
        all.extend_from_slice(&part.u.0);
        all.extend_from_slice(&part.v.0);
    }
    let concatenation = all.len() == d.r_prime.len()
        && (d.r_prime.is_empty() || CyclicWord::new_unchecked(Word(all)).canonical() == d.r_prime.canonical());
    let k = d.parts.len() as u64;
    let count = k >= 1 && k <= d.n;

    let mut first_failure = None;
    if !concatenation {
        first_failure = Some("parts do not concatenate to a rotation of r'".to_string());
    } else if !count {
        first_failure = Some(format!("k = {k} is outside [1, {}]", d.n));
    }
    let mut parts = Vec::with_capacity(d.parts.len());
    for (i, part) in d.parts.iter().enumerate() {
        let ri = part.r.len() as u64;
        let in_base = sym.contains(part.r.word());
        let a = in_base && !part.u.is_empty() && !is_cyclic_subword(&part.u, &part.r).is_empty();
        let b = d.b * part.u.len() as u64 >= ri;
        let c = d.b * rp >= ri && d.b * ri >= rp;
        let dd = rho.certainly_ge(int(part.v.len() as i128));
        if first_failure.is_none() {
            let which = [(a, "(a)"), (b, "(b)"), (c, "(c)"), (dd, "(d)")]
                .iter()
                .find(|(ok, _)| !ok)
                .map(|(_, n)| *n);
            if let Some(n) = which {
                let why = if n == "(a)" && !in_base { ": r_i is not in the symmetrized base set" } else { "" };
                first_failure = Some(format!("part {} fails {n}{why}", i + 1));
            }
        }
        parts.push(PartVerdict { index: i + 1, a, b, c, d: dd });
    }
    let pass = concatenation && count && parts.iter().all(|p| p.a && p.b && p.c && p.d);
    Ok(DecompositionReport {
        certificate: "finite certificate",
        concatenation,
        count,
        parts,
        first_failure,
        pass,
    })
}

/// The least `n'_1 <= ... <= n'_count` with
/// (i) `rho(t) < t / (i(2N+1))` for all `t >= n'_i`, and
/// (ii) `n'_i >= B n_j` for all `j <= i(2N+1)B`.
/// `n` is 1-indexed: `n[0]` is `n_1`.
pub fn derive_n_prime_sequence(rho: &FunctionSpec, n_const: u64, b: u64, n: &[u64], count: usize) -> Result<Vec<u64>> {
    if !rho.is_declared_sublinear() {
        return Err(Error::Input(format!("rho = {rho} is not sublinear")));
    }
    if n.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Input("the sequence n must be nondecreasing".into()));
    }
    if n_const == 0 || b == 0 {
        return Err(Error::Input("N and B must be positive".into()));
    }
    let mut out = Vec::with_capacity(count);
    let mut prefix_max = 0u64;
    let mut used = 0usize;
    for i in 1..=count as u64 {
        let k = i * (2 * n_const + 1);
        let need = (k * b) as usize;
        if need > n.len() {
            return Err(Error::Input(format!(
                "sequence n has {} terms; n_{need} is needed for i = {i}",
                n.len()
            )));
        }
        while used < need {
            prefix_max = prefix_max.max(n[used]);
            used += 1;
        }
        let threshold = rho.sublinear_threshold(k)?;
        out.push(threshold.max(b * prefix_max));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::words::Alphabet;

    fn pres(names: &str, rels: &[&str]) -> Presentation {
        Presentation::from_strs(Alphabet::from_str_names(names).unwrap(), rels).unwrap()
    }

    #[test]
    fn empty_x_fails_proportion() {
        let p = pres("a b", &["ab"]);
        let r = p.alphabet.parse_word("ab").unwrap();
        let w = IpscWitness::new(r, &Word::empty(), 1, 1, FunctionSpec::Constant(int(6))).unwrap();
        let rep = check_ipsc_witness(&w, &p).unwrap();
        assert!(!rep.proportion);
        assert!(!rep.pass);
    }

    #[test]
    fn whole_relator_in_piece_free_presentation_passes() {
        let p = pres("a b", &["ab"]);
        let r = p.alphabet.parse_word("ab").unwrap();
        let w = IpscWitness::new(r.clone(), &r, 1, 2, FunctionSpec::Constant(int(6))).unwrap();
        let rep = check_ipsc_witness(&w, &p).unwrap();
        assert!(rep.pass, "{rep:?}");
        let w = IpscWitness::new(r.clone(), &r, 1, 3, FunctionSpec::Constant(int(6))).unwrap();
        assert!(!check_ipsc_witness(&w, &p).unwrap().length);
    }

    #[test]
    fn non_viable_f_is_an_input_error() {
        let p = pres("a b", &["ab"]);
        let r = p.alphabet.parse_word("ab").unwrap();
        let w = IpscWitness::new(r.clone(), &r, 1, 1, FunctionSpec::Constant(int(2))).unwrap();
        assert!(check_ipsc_witness(&w, &p).is_err());
    }

    #[test]
    fn self_decomposition_passes() {
        let p = pres("a b c d", &["aba'b'cdc'd'"]);
        let r = p.relators()[0].clone();
        let d = Decomposition {
            r_prime: r.clone(),
            parts: vec![DecompositionPart { u: r.word().clone(), r: r.clone(), v: Word::empty() }],
            n: 1,
            b: 1,
            rho: FunctionSpec::Constant(int(0)),
        };
        assert!(check_combination_decomposition(&d, &p).unwrap().pass);
    }

    #[test]
    fn foreign_relator_fails_a() {
        let p = pres("a b c d", &["aba'b'cdc'd'"]);
        let other = CyclicWord::new(p.alphabet.parse_word("abcd").unwrap()).unwrap();
        let d = Decomposition {
            r_prime: other.clone(),
            parts: vec![DecompositionPart { u: other.word().clone(), r: other, v: Word::empty() }],
            n: 1,
            b: 1,
            rho: FunctionSpec::Constant(int(0)),
        };
        let rep = check_combination_decomposition(&d, &p).unwrap();
        assert!(!rep.parts[0].a);
        assert!(rep.first_failure.unwrap().contains("(a)"));
    }

    #[test]
    fn n_prime_with_zero_rho_is_the_prefix_constraint() {
        let n: Vec<u64> = (1..=100).collect();
        let out = derive_n_prime_sequence(&FunctionSpec::Constant(int(0)), 1, 2, &n, 3).unwrap();
        // i(2N+1)B = 6i, so B * n_{6i} = 12 i
        assert_eq!(out, vec![12, 24, 36]);
    }

    #[test]
    fn n_prime_sqrt_matches_integer_scan() {
        let n = vec![1u64; 200];
        let out = derive_n_prime_sequence(&FunctionSpec::CeilSqrt, 1, 1, &n, 20).unwrap();
        for (idx, &v) in out.iter().enumerate() {
            let k = 3 * (idx as u64 + 1);
            let horizon = 4 * (k + 2) * (k + 2);
            let last_fail = (1..horizon)
                .filter(|&t| k * crate::rational::ceil_sqrt(t as u128) as u64 >= t)
                .max()
                .unwrap_or(0);
            assert_eq!(v, (last_fail + 1).max(1));
        }
        assert!(out.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn n_prime_reports_short_sequences_and_short_tables() {
        assert!(derive_n_prime_sequence(&FunctionSpec::CeilSqrt, 1, 1, &[1, 1], 1).is_err());
        let tab = FunctionSpec::Table((1..=10).map(|t| (t, int(t as i128))).collect());
        let err = derive_n_prime_sequence(&tab, 1, 1, &[1; 10], 1).unwrap_err();
        assert!(err.to_string().contains("t=10"));
        let lin = FunctionSpec::Affine { slope: ratio(1, 2), intercept: int(0) };
        assert!(derive_n_prime_sequence(&lin, 1, 1, &[1; 10], 1).is_err());
    }
}
