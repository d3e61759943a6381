//! The relator synthesis `G' = <S u T u {a} | R u C>` and exact verifiers
//! for the bounds its correctness rests on.
//!
//! For each relator `r` of `R_1` (at most one per length, all of length at
//! least `V`) and each window subword `w` of `r`, the relator
//! `c_w = a^{f(|r|)} (w u_{i_w+1}) ... (w u_{i_w+M})` is added, where the
//! `u_i` are fresh words over `T` taken in order.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspec::FunctionSpec;
use crate::ipsc::{check_combination_decomposition_with, Decomposition, DecompositionPart};
use crate::pieces::{check_c_prime, check_c_prime_with, enumerate_pieces_grouped, PieceTable};
use crate::rational::{bit_length, fmt_rational, int, log2, Enclosure, Rational};
use crate::words::{symmetrize, t_word, Alphabet, CyclicWord, Letter, Presentation, Word};

pub const REPORT_SCHEMA: &str = "sc-forge/construction-report/v1";

#[derive(Clone, Debug)]
pub struct ConstructionParams {
    pub n: u64,
    pub m: u64,
    pub l: u64,
    pub u: u64,
    pub v: u64,
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    pub t_letters: [char; 2],
    pub a_letter: char,
}

impl ConstructionParams {
    /// Checks `N, M, L, U, V >= 36`, `L >= U`, that `f` is declared sublinear
    /// and superlogarithmic, and that `f/g` grows on a sample of scales.
    pub fn new(n: u64, m: u64, l: u64, u: u64, v: u64, f: FunctionSpec, g: FunctionSpec) -> Result<Self> {
        for (name, x) in [("N", n), ("M", m), ("L", l), ("U", u), ("V", v)] {
            if x < 36 {
                return Err(Error::Input(format!("{name} = {x} must be at least 36")));
            }
        }
        if l < u {
            return Err(Error::Input(format!("L = {l} must be at least U = {u}")));
        }
        if !f.is_declared_sublinear() || !f.is_declared_superlogarithmic() {
            return Err(Error::Input(format!("f = {f} must be sublinear and superlogarithmic")));
        }
        let ratios: Vec<f64> = (5..=15)
            .map(|k| {
                let x = 1u64 << (4 * k);
                Ok(f.eval(x)?.midpoint_f64() / g.eval(x)?.midpoint_f64())
            })
            .collect::<Result<_>>()?;
        let grows = ratios.windows(2).all(|w| w[1] >= w[0]) && ratios[ratios.len() - 1] > 2.0 * ratios[0];
        if ratios.iter().any(|r| !r.is_finite() || *r <= 0.0) || !grows {
            return Err(Error::Input(format!("g = {g} does not appear to grow slower than f = {f}")));
        }
        Ok(Self::unchecked(n, m, l, u, v, f, g))
    }

    /// No validation; for experiments outside the admissible range.
    pub fn unchecked(n: u64, m: u64, l: u64, u: u64, v: u64, f: FunctionSpec, g: FunctionSpec) -> Self {
        ConstructionParams { n, m, l, u, v, f, g, t_letters: ['s', 't'], a_letter: 'a' }
    }

    pub fn with_v(&self, v: u64) -> Self {
        ConstructionParams { v, ..self.clone() }
    }

    /// `lambda = max{N, M, U} / 4`.
    pub fn lambda(&self) -> Rational {
        Rational::new(self.n.max(self.m).max(self.u) as i128, 4)
    }
}

/// One synthesized relator `c_w`.
#[derive(Clone, Debug)]
pub struct CwRelator {
    /// Index of `r` in the truncated base presentation.
    pub base_relator: usize,
    pub base_len: usize,
    pub window: Word,
    pub a_power: u64,
    /// `i_w`: number of t-words used before this relator.
    pub start_index: u64,
    pub t_words: Vec<Word>,
    /// Index in the constructed presentation.
    pub relator: usize,
    pub word: Word,
}

impl CwRelator {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub params: ConstructionParams,
    pub max_base_len: usize,
    /// Truncated base, written over the extended alphabet.
    pub base: Presentation,
    pub presentation: Presentation,
    /// Indices into `base`, increasing in length.
    pub r1: Vec<usize>,
    pub window_counts: Vec<usize>,
    pub cw: Vec<CwRelator>,
}

/// Among relators of each length `>= v`, the lexicographically least
/// canonical form; returned in increasing length.
pub fn select_r1(p: &Presentation, v: u64) -> Vec<usize> {
    let mut by_len: BTreeMap<usize, (Word, usize)> = BTreeMap::new();
    for (i, r) in p.relators().iter().enumerate() {
        if (r.len() as u64) < v {
            continue;
        }
        let canon = r.canonical();
        match by_len.get(&r.len()) {
            Some((c, _)) if *c <= canon => {}
            _ => {
                by_len.insert(r.len(), (canon, i));
            }
        }
    }
    by_len.into_values().map(|(_, i)| i).collect()
}

/// Distinct cyclic subwords `w` of `r`, read in the orientation of `r`, with
/// `|r|/L < |w| < |r|/U`, ordered by length, then lexicographically.
pub fn window_subwords(r: &CyclicWord, l: u64, u: u64) -> Vec<Word> {
    assert!(l >= u && u >= 1);
    let n = r.len() as u64;
    let mut out: BTreeSet<(usize, Word)> = BTreeSet::new();
    let lengths: Vec<usize> = (1..=n).filter(|&k| k * l > n && k * u < n).map(|k| k as usize).collect();
    for start in 0..r.len() {
        for &k in &lengths {
            let w = Word((0..k).map(|j| r.at(start + j)).collect());
            out.insert((k, w));
        }
    }
    out.into_iter().map(|(_, w)| w).collect()
}

/// Copies `p`'s alphabet and adds the T letters and `a`, refusing collisions.
fn extended_alphabet(p: &Presentation, params: &ConstructionParams) -> Result<Alphabet> {
    let mut a = p.alphabet.clone();
    let [t0, t1] = params.t_letters;
    for c in [t0, t1, params.a_letter] {
        if a.index_of(c).is_some() {
            return Err(Error::Input(format!("letter `{c}` of the construction already occurs in the base alphabet")));
        }
    }
    if t0 == t1 || t0 == params.a_letter || t1 == params.a_letter {
        return Err(Error::Input("the T letters and `a` must be distinct".into()));
    }
    let i0 = a.push(t0)?;
    let i1 = a.push(t1)?;
    let ia = a.push(params.a_letter)?;
    a.set_t_letters(vec![i0, i1])?;
    a.set_morse_letter(Some(ia))?;
    Ok(a)
}

/// Builds `G'` from the base relators of length at most `max_base_len`.
/// Refuses bases that are not `C'(4/N)`.
pub fn build_presentation(base: &Presentation, params: &ConstructionParams, max_base_len: usize) -> Result<Construction> {
    let truncated = base.filtered(|r| r.len() <= max_base_len);
    let sc = check_c_prime(&truncated, Rational::new(4, params.n as i128));
    if !sc.verdict {
        let why = sc
            .violations
            .first()
            .map(|v| format!(": piece {} of {}", v.piece, v.relator))
            .unwrap_or_default();
        return Err(Error::Precondition(format!("base presentation is not C'(4/{}){why}", params.n)));
    }
    build_unverified(&truncated, params, max_base_len)
}

/// As `build_presentation`, without the small-cancellation precondition.
pub fn build_unverified(truncated: &Presentation, params: &ConstructionParams, max_base_len: usize) -> Result<Construction> {
    let alphabet = extended_alphabet(truncated, params)?;
    let t0 = Letter::gen(alphabet.t_letters()[0]);
    let t1 = Letter::gen(alphabet.t_letters()[1]);
    let a = Letter::gen(alphabet.morse_letter().unwrap());
    let base = Presentation::new(alphabet.clone(), truncated.relators().to_vec())?;
    let mut g = base.clone();

    let r1 = select_r1(&base, params.v);
    let mut window_counts = Vec::with_capacity(r1.len());
    let mut cw = Vec::new();
    let mut used = 0u64;
    for &ri in &r1 {
        let r = &base.relators()[ri];
        let k = params.f.eval_ceil(r.len() as u64)?;
        let windows = window_subwords(r, params.l, params.u);
        window_counts.push(windows.len());
        for w in windows {
            let start_index = used;
            let t_words: Vec<Word> = (1..=params.m).map(|i| t_word(start_index + i, t0, t1)).collect();
            used += params.m;
            let mut word = vec![a; k as usize];
            for u in &t_words {
                word.extend_from_slice(&w.0);
                word.extend_from_slice(&u.0);
            }
            let word = Word(word);
            g.add_relator(CyclicWord::new(word.clone())?)?;
            cw.push(CwRelator {
                base_relator: ri,
                base_len: r.len(),
                window: w,
                a_power: k,
                start_index,
                t_words,
                relator: g.relators().len() - 1,
                word,
            });
        }
    }
    Ok(Construction {
        params: params.clone(),
        max_base_len,
        base,
        presentation: g,
        r1,
        window_counts,
        cw,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CwViolation {
    pub cw: usize,
    #[serde(rename = "baseLen")]
    pub base_len: usize,
    pub detail: String,
}

const MAX_LISTED: usize = 50;

fn push_limited(list: &mut Vec<CwViolation>, v: CwViolation) {
    if list.len() < MAX_LISTED {
        list.push(v);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma41Report {
    /// `|u| <= log2(2M|r|^3) + 1` for every t-word.
    #[serde(rename = "logBound")]
    pub log_bound: bool,
    /// `|u| <= |c_w| / (2M)` for every t-word; needs `V` large.
    #[serde(rename = "proportionBound")]
    pub proportion_bound: bool,
    /// `i_w <= M |r|^3`.
    #[serde(rename = "startIndexBound")]
    pub start_index_bound: bool,
    /// No t-word index is used twice.
    pub freshness: bool,
    #[serde(rename = "proportionViolations")]
    pub proportion_violations: Vec<CwViolation>,
    #[serde(rename = "proportionViolationCount")]
    pub proportion_violation_count: usize,
    #[serde(rename = "logViolations")]
    pub log_violations: Vec<CwViolation>,
    pub pass: bool,
}

fn two_m_r3(m: u64, r: usize) -> u128 {
    2 * m as u128 * (r as u128).pow(3)
}

pub fn verify_lemma_4_1(c: &Construction) -> Lemma41Report {
    let m = c.params.m;
    let mut log_violations = Vec::new();
    let mut proportion_violations = Vec::new();
    let mut proportion_count = 0;
    let mut start_index_bound = true;
    let mut seen: HashSet<u64> = HashSet::new();
    let mut freshness = true;
    for (idx, cw) in c.cw.iter().enumerate() {
        let x = two_m_r3(m, cw.base_len);
        start_index_bound &= (cw.start_index as u128) <= m as u128 * (cw.base_len as u128).pow(3);
        for (j, u) in cw.t_words.iter().enumerate() {
            freshness &= seen.insert(cw.start_index + 1 + j as u64);
            // |u| <= log2(X) + 1  <=>  2^(|u|-1) <= X
            if !u.is_empty() && (u.len() > 128 || (1u128 << (u.len() - 1)) > x) {
                push_limited(&mut log_violations, CwViolation {
                    cw: idx,
                    base_len: cw.base_len,
                    detail: format!("|u_{}| = {} > log2({x}) + 1", cw.start_index + 1 + j as u64, u.len()),
                });
            }
        }
        let longest = cw.t_words.iter().map(|u| u.len()).max().unwrap_or(0);
        if 2 * m as usize * longest > cw.len() {
            proportion_count += 1;
            push_limited(&mut proportion_violations, CwViolation {
                cw: idx,
                base_len: cw.base_len,
                detail: format!("longest t-word {longest} > |c_w|/(2M) = {}/{}", cw.len(), 2 * m),
            });
        }
    }
    let log_bound = log_violations.is_empty();
    let proportion_bound = proportion_count == 0;
    Lemma41Report {
        log_bound,
        proportion_bound,
        start_index_bound,
        freshness,
        proportion_violations,
        proportion_violation_count: proportion_count,
        log_violations,
        pass: log_bound && proportion_bound && start_index_bound && freshness,
    }
}

/// The exact value `floor(log2(2M|r|^3)) + 1` used by the first bound.
pub fn log_bound_value(m: u64, r: usize) -> u32 {
    bit_length(two_m_r3(m, r))
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma42Report {
    pub lambda: String,
    /// `C'(1/lambda)` graded directly on all pieces.
    pub generic: bool,
    #[serde(rename = "genericViolationCount")]
    pub generic_violation_count: usize,
    #[serde(rename = "genericFirstViolation")]
    pub generic_first_violation: Option<String>,
    /// Pieces shared with base relators: `|p| <= |w| < |r_1|/M`.
    pub case1: bool,
    /// Pieces shared with other `c_w`: `|p| <= |u_j1| + |u_j2| + |w| + k`,
    /// `|u_j1| + |u_j2| <= |r_1|/M`, `k < |r_1|/M` and `|w| <= 2|r_1|/M`.
    pub case2: bool,
    #[serde(rename = "caseViolations")]
    pub case_violations: Vec<CwViolation>,
    #[serde(rename = "caseViolationCount")]
    pub case_violation_count: usize,
    pub agree: bool,
    pub pass: bool,
}

/// Piece table of the construction with base relators in group 0 and the
/// synthesized relators in group 1.
pub fn construction_pieces(c: &Construction) -> PieceTable {
    let nb = c.base.relators().len();
    let groups: Vec<u8> = (0..c.presentation.relators().len()).map(|i| u8::from(i >= nb)).collect();
    enumerate_pieces_grouped(&c.presentation, &groups)
}

pub fn verify_lemma_4_2(c: &Construction) -> Lemma42Report {
    let table = construction_pieces(c);
    verify_lemma_4_2_with(c, &table)
}

pub fn verify_lemma_4_2_with(c: &Construction, table: &PieceTable) -> Lemma42Report {
    let lambda = c.params.lambda();
    let generic = check_c_prime_with(&c.presentation, table, Rational::from_integer(1) / lambda);
    let m = c.params.m as usize;
    let mut case1 = true;
    let mut case2 = true;
    let mut case_violations = Vec::new();
    let mut count = 0;
    for (idx, cw) in c.cw.iter().enumerate() {
        let r1 = cw.len();
        let wl = cw.window.len();
        let p1 = table.max_piece_vs_group(cw.relator, 0);
        let ok1 = p1 <= wl && m * wl < r1;
        let p2 = table.max_piece_vs_group(cw.relator, 1);
        let mut tl: Vec<usize> = cw.t_words.iter().map(|u| u.len()).collect();
        tl.sort_unstable_by(|a, b| b.cmp(a));
        let s2 = tl.iter().take(2).sum::<usize>();
        let k = cw.a_power as usize;
        let ok2 = p2 <= s2 + wl + k && m * s2 <= r1 && m * k < r1 && m * wl <= 2 * r1;
        case1 &= ok1;
        case2 &= ok2;
        if !ok1 || !ok2 {
            count += 1;
            let mut detail = Vec::new();
            if !ok1 {
                detail.push(format!("case 1: piece {p1} vs base, |w| = {wl}, |c_w| = {r1}"));
            }
            if !ok2 {
                detail.push(format!(
                    "case 2: piece {p2}, two longest t-words {s2}, |w| = {wl}, k = {k}, |c_w| = {r1}, M = {m}"
                ));
            }
            push_limited(&mut case_violations, CwViolation { cw: idx, base_len: cw.base_len, detail: detail.join("; ") });
        }
    }
    let cases = case1 && case2;
    Lemma42Report {
        lambda: fmt_rational(&lambda),
        generic: generic.verdict,
        generic_violation_count: generic.violations.len() + generic.violations_truncated,
        generic_first_violation: generic
            .violations
            .first()
            .map(|v| format!("piece {} (length {}) of {} shared with {}", v.piece, v.witness.length, v.relator, v.partner)),
        case1,
        case2,
        case_violations,
        case_violation_count: count,
        agree: generic.verdict == cases,
        pass: generic.verdict && cases,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthBoundReport {
    /// `|c_w| = f(|r|) + M|w| + sum |u|`.
    pub additivity: bool,
    /// `|c_w| <= 2M|r|/U`.
    pub upper: bool,
    /// `|c_w| >= M|r|/L`.
    pub lower: bool,
    #[serde(rename = "upperViolations")]
    pub upper_violations: Vec<CwViolation>,
    #[serde(rename = "upperViolationCount")]
    pub upper_violation_count: usize,
    #[serde(rename = "lowerViolations")]
    pub lower_violations: Vec<CwViolation>,
    pub pass: bool,
}

pub fn verify_cw_length_bound(c: &Construction) -> LengthBoundReport {
    let p = &c.params;
    let mut additivity = true;
    let mut upper_violations = Vec::new();
    let mut upper_count = 0;
    let mut lower_violations = Vec::new();
    for (idx, cw) in c.cw.iter().enumerate() {
        let sum_u: usize = cw.t_words.iter().map(|u| u.len()).sum();
        additivity &= cw.len() == cw.a_power as usize + p.m as usize * cw.window.len() + sum_u;
        let len = cw.len() as u128;
        let r = cw.base_len as u128;
        if p.u as u128 * len > 2 * p.m as u128 * r {
            upper_count += 1;
            push_limited(&mut upper_violations, CwViolation {
                cw: idx,
                base_len: cw.base_len,
                detail: format!("|c_w| = {len} > 2M|r|/U = {}", fmt_rational(&Rational::new((2 * p.m as u128 * r) as i128, p.u as i128))),
            });
        }
        if p.l as u128 * len < p.m as u128 * r {
            push_limited(&mut lower_violations, CwViolation {
                cw: idx,
                base_len: cw.base_len,
                detail: format!("|c_w| = {len} < M|r|/L"),
            });
        }
    }
    let upper = upper_count == 0;
    let lower = lower_violations.is_empty();
    LengthBoundReport {
        additivity,
        upper,
        lower,
        upper_violations,
        upper_violation_count: upper_count,
        lower_violations,
        pass: additivity && upper && lower,
    }
}

/// `A(n) = M g(n) + M log2(2 M n^3) + M`.
pub fn loxodromic_obstruction_bound(n: usize, g: &FunctionSpec, m: u64) -> Result<Enclosure> {
    let mm = int(m as i128);
    let gv = g.eval(n as u64)?.scale(mm);
    let lv = log2(int(two_m_r3(m, n) as i128)).scale(mm);
    Ok(gv.add(lv).add(Enclosure::exact(mm)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionRow {
    pub len: usize,
    pub f: Enclosure,
    #[serde(rename = "A")]
    pub a: Enclosure,
    pub ratio: Enclosure,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub rows: Vec<ObstructionRow>,
    /// First row of the longest certified strictly decreasing tail of `A/f`.
    #[serde(rename = "thresholdIndex")]
    pub threshold_index: usize,
    /// The tail has at least two rows.
    #[serde(rename = "decreasingTail")]
    pub decreasing_tail: bool,
}

/// Tabulates `A(|r|)/f(|r|)` over the lengths of `R_1`.
pub fn obstruction_table(c: &Construction) -> Result<ObstructionReport> {
    let mut rows = Vec::new();
    for &ri in &c.r1 {
        let n = c.base.relators()[ri].len();
        let a = loxodromic_obstruction_bound(n, &c.params.g, c.params.m)?;
        let f = c.params.f.eval(n as u64)?;
        rows.push(ObstructionRow { len: n, f, a, ratio: a.div_pos(f) });
    }
    let mut threshold = rows.len().saturating_sub(1);
    while threshold > 0 && rows[threshold].ratio.hi < rows[threshold - 1].ratio.lo {
        threshold -= 1;
    }
    let tail = rows.len() - threshold;
    Ok(ObstructionReport { decreasing_tail: rows.len() >= 2 && tail >= 2, threshold_index: threshold, rows })
}

/// Constants `(B, rho)` under which every `c_w` decomposes for the
/// combination lemma: `B` maximizes `|r|/|w|`, `|c_w|/|r|`, `|r|/|c_w|`
/// (rounded up), and `rho(|c_w|)` is the largest `f(|r|) + floor(log2(2M|r|^3)) + 1`
/// over relators of that length.
pub fn decomposition_constants(c: &Construction) -> (u64, FunctionSpec) {
    let mut b = 1u64;
    let mut table: BTreeMap<u64, Rational> = BTreeMap::new();
    for cw in &c.cw {
        let (r, w, l) = (cw.base_len as u64, cw.window.len() as u64, cw.len() as u64);
        b = b.max(r.div_ceil(w)).max(l.div_ceil(r)).max(r.div_ceil(l));
        let bound = int((cw.a_power + log_bound_value(c.params.m, cw.base_len) as u64) as i128);
        let e = table.entry(l).or_insert(bound);
        *e = (*e).max(bound);
    }
    (b, FunctionSpec::Table(table))
}

/// The rotation `w u_{i_w+M} a^k w u_{i_w+1} ... w u_{i_w+M-1}` of `c_w`,
/// cut into `M` parts with `u_i = w` and the `a`-power in `v_1`.
pub fn canonical_decomposition(c: &Construction, idx: usize, b: u64, rho: &FunctionSpec) -> Decomposition {
    let cw = &c.cw[idx];
    let a = Letter::gen(c.presentation.alphabet.morse_letter().unwrap());
    let r = c.base.relators()[cw.base_relator].clone();
    let m = cw.t_words.len();
    let mut parts = Vec::with_capacity(m);
    let mut v1 = cw.t_words[m - 1].0.clone();
    v1.extend(std::iter::repeat_n(a, cw.a_power as usize));
    parts.push(DecompositionPart { u: cw.window.clone(), r: r.clone(), v: Word(v1) });
    for u in &cw.t_words[..m - 1] {
        parts.push(DecompositionPart { u: cw.window.clone(), r: r.clone(), v: u.clone() });
    }
    Decomposition {
        r_prime: c.presentation.relators()[cw.relator].clone(),
        parts,
        n: c.params.m,
        b,
        rho: rho.clone(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSummary {
    #[serde(rename = "B")]
    pub b: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub rho: String,
    pub checked: usize,
    pub failures: Vec<String>,
    pub pass: bool,
}

pub fn verify_decompositions(c: &Construction) -> Result<DecompositionSummary> {
    let (b, rho) = decomposition_constants(c);
    let sym = symmetrize(&c.base);
    let mut failures = Vec::new();
    for idx in 0..c.cw.len() {
        let d = canonical_decomposition(c, idx, b, &rho);
        let rep = check_combination_decomposition_with(&d, &sym)?;
        if !rep.pass && failures.len() < MAX_LISTED {
            failures.push(format!("c_w #{idx}: {}", rep.first_failure.unwrap_or_default()));
        }
    }
    Ok(DecompositionSummary {
        b,
        n: c.params.m,
        rho: rho.to_string(),
        checked: c.cw.len(),
        pass: failures.is_empty(),
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsEcho {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(rename = "U")]
    pub u: u64,
    #[serde(rename = "V")]
    pub v: u64,
    pub f: String,
    pub g: String,
    pub lambda: String,
    #[serde(rename = "maxBaseLen")]
    pub max_base_len: usize,
    #[serde(rename = "tAlphabet")]
    pub t_alphabet: String,
    #[serde(rename = "morseLetter")]
    pub morse_letter: char,
}

#[derive(Clone, Debug, Serialize)]
pub struct CwRow {
    pub index: usize,
    #[serde(rename = "baseLen")]
    pub base_len: usize,
    pub window: String,
    #[serde(rename = "aPower")]
    pub a_power: u64,
    #[serde(rename = "startIndex")]
    pub start_index: u64,
    pub length: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct R1Row {
    pub len: usize,
    #[serde(rename = "windowCount")]
    pub window_count: usize,
    pub relator: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub schema: &'static str,
    pub params: ParamsEcho,
    #[serde(rename = "baseRelators")]
    pub base_relators: usize,
    pub r1: Vec<R1Row>,
    #[serde(rename = "windowTotal")]
    pub window_total: usize,
    #[serde(rename = "totalLength")]
    pub total_length: usize,
    pub notes: Vec<&'static str>,
    #[serde(rename = "lemmaLengthBounds")]
    pub lemma41: Lemma41Report,
    #[serde(rename = "smallCancellation")]
    pub lemma42: Lemma42Report,
    #[serde(rename = "cwLength")]
    pub length_bound: LengthBoundReport,
    pub decomposition: DecompositionSummary,
    pub obstruction: ObstructionReport,
    pub cw: Vec<CwRow>,
    pub pass: bool,
}

const NOTES: [&str; 3] = [
    "R1 keeps the lexicographically least canonical relator of each length",
    "windows are read in the orientation of r and ordered by length, then lexicographically",
    "the failure of IPSC for the base presentation is assumed, not checked",
];

pub fn params_echo(p: &ConstructionParams, max_base_len: usize) -> ParamsEcho {
    ParamsEcho {
        n: p.n,
        m: p.m,
        l: p.l,
        u: p.u,
        v: p.v,
        f: p.f.to_string(),
        g: p.g.to_string(),
        lambda: fmt_rational(&p.lambda()),
        max_base_len,
        t_alphabet: format!("{} {}", p.t_letters[0], p.t_letters[1]),
        morse_letter: p.a_letter,
    }
}

/// Runs every verifier and collects the results.
pub fn construction_report(c: &Construction) -> Result<ConstructionReport> {
    let alphabet = &c.presentation.alphabet;
    let lemma41 = verify_lemma_4_1(c);
    let lemma42 = verify_lemma_4_2(c);
    let length_bound = verify_cw_length_bound(c);
    let decomposition = verify_decompositions(c)?;
    let obstruction = obstruction_table(c)?;
    let pass = lemma41.pass && lemma42.pass && length_bound.pass && decomposition.pass;
    Ok(ConstructionReport {
        schema: REPORT_SCHEMA,
        params: params_echo(&c.params, c.max_base_len),
        base_relators: c.base.relators().len(),
        r1: c
            .r1
            .iter()
            .zip(&c.window_counts)
            .map(|(&i, &wc)| R1Row {
                len: c.base.relators()[i].len(),
                window_count: wc,
                relator: alphabet.render(c.base.relators()[i].word()),
            })
            .collect(),
        window_total: c.window_counts.iter().sum(),
        total_length: c.presentation.total_length(),
        notes: NOTES.to_vec(),
        lemma41,
        lemma42,
        length_bound,
        decomposition,
        obstruction,
        cw: c
            .cw
            .iter()
            .enumerate()
            .map(|(index, cw)| CwRow {
                index,
                base_len: cw.base_len,
                window: alphabet.render(&cw.window),
                a_power: cw.a_power,
                start_index: cw.start_index,
                length: cw.len(),
            })
            .collect(),
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VRow {
    #[serde(rename = "V")]
    pub v: u64,
    #[serde(rename = "r1Count")]
    pub r1_count: usize,
    #[serde(rename = "cwCount")]
    pub cw_count: usize,
    #[serde(rename = "logBound")]
    pub log_bound: bool,
    #[serde(rename = "proportionBound")]
    pub proportion_bound: bool,
    #[serde(rename = "proportionViolationCount")]
    pub proportion_violation_count: usize,
    #[serde(rename = "startIndexBound")]
    pub start_index_bound: bool,
    pub freshness: bool,
    #[serde(rename = "smallCancellation")]
    pub small_cancellation: bool,
    #[serde(rename = "cwLengthUpper")]
    pub cw_length_upper: bool,
    #[serde(rename = "cwLengthUpperViolationCount")]
    pub cw_length_upper_violation_count: usize,
    #[serde(rename = "cwLengthLower")]
    pub cw_length_lower: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FindMinVReport {
    pub candidates: Vec<VRow>,
    pub found: Option<u64>,
}

/// Smallest `V` for which the graded bounds of both lemmas and the length
/// bound all hold. `R_1` only changes at relator lengths, so the candidates
/// are the distinct base lengths `>= 36` (up to `max_base_len`), scanned in
/// increasing order. Values of `V` beyond every length leave `R_1` empty and
/// are not considered.
pub fn find_min_v(base: &Presentation, params: &ConstructionParams, max_base_len: usize) -> Result<FindMinVReport> {
    let lengths: BTreeSet<u64> = base
        .relators()
        .iter()
        .map(|r| r.len() as u64)
        .filter(|&n| n >= 36 && n as usize <= max_base_len)
        .collect();
    let mut candidates = Vec::new();
    let mut found = None;
    for v in lengths {
        let c = build_presentation(base, &params.with_v(v), max_base_len)?;
        let l1 = verify_lemma_4_1(&c);
        let l2 = verify_lemma_4_2(&c);
        let lb = verify_cw_length_bound(&c);
        let pass = l1.pass && l2.pass && lb.pass;
        candidates.push(VRow {
            v,
            r1_count: c.r1.len(),
            cw_count: c.cw.len(),
            log_bound: l1.log_bound,
            proportion_bound: l1.proportion_bound,
            proportion_violation_count: l1.proportion_violation_count,
            start_index_bound: l1.start_index_bound,
            freshness: l1.freshness,
            small_cancellation: l2.pass,
            cw_length_upper: lb.upper,
            cw_length_upper_violation_count: lb.upper_violation_count,
            cw_length_lower: lb.lower,
            pass,
        });
        if pass {
            found = Some(v);
            break;
        }
    }
    Ok(FindMinVReport { candidates, found })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::block_family_shipped;
    use crate::rational::ratio;

    fn pres(names: &str, rels: &[&str]) -> Presentation {
        Presentation::from_strs(Alphabet::from_str_names(names).unwrap(), rels).unwrap()
    }

    #[test]
    fn select_r1_examples() {
        let p = pres("b c d", &["bcd", "bbcd", "bccd", "bcbcd"]);
        assert!(select_r1(&p, 6).is_empty());
        // lengths 4 tie: bbcd < bccd
        assert_eq!(select_r1(&p, 4), vec![1, 3]);
        let r1 = select_r1(&p, 1);
        let lens: Vec<usize> = r1.iter().map(|&i| p.relators()[i].len()).collect();
        assert!(lens.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(lens, vec![3, 4, 5]);
    }

    #[test]
    fn window_examples() {
        let p = pres("b c", &[&"bc".repeat(36)]);
        let r = &p.relators()[0];
        assert!(window_subwords(r, 36, 36).is_empty());
        let w = window_subwords(r, 1152, 36);
        let rendered: Vec<String> = w.iter().map(|w| p.alphabet.render(w)).collect();
        assert_eq!(rendered, vec!["b", "c"]);
        let r = CyclicWord::new(p.alphabet.parse_word("bbcbcc").unwrap()).unwrap();
        assert!(window_subwords(&r, 6, 1).len() <= 36);
    }

    #[test]
    fn direct_instantiation_with_two_t_words() {
        let p = pres("b c", &["bcbcc"]);
        let f = FunctionSpec::Constant(int(3));
        let params = ConstructionParams::unchecked(4, 2, 5, 2, 5, f.clone(), f);
        let c = build_unverified(&p, &params, 100).unwrap();
        // window: 1 < |w| < 2.5, so the length-2 subwords
        assert!(c.cw.iter().all(|cw| cw.window.len() == 2));
        let first = &c.cw[0];
        let al = &c.presentation.alphabet;
        let w = al.render(&first.window);
        assert_eq!(al.render(&first.word), format!("aaa{w}s{w}t"));
        let second = &c.cw[1];
        assert_eq!(second.start_index, 2);
        assert_eq!(al.render(&second.t_words[0]), "ss");
    }

    #[test]
    fn empty_r1_adds_only_letters() {
        let p = pres("b c", &["bcbcc"]);
        let params = ConstructionParams::new(36, 36, 1152, 36, 36, FunctionSpec::CeilSqrt, FunctionSpec::default_g()).unwrap();
        let c = build_presentation(&p, &params, 400);
        // bcbcc is not C'(1/9): single letters are pieces of a length-5 relator
        assert!(c.is_err());
        let c = build_unverified(&p, &params, 400).unwrap();
        assert!(c.cw.is_empty());
        assert_eq!(c.presentation.relators().len(), 1);
        assert_eq!(c.presentation.alphabet.len(), 5);
    }

    #[test]
    fn collisions_are_refused() {
        let p = pres("a b", &["ab"]);
        let params = ConstructionParams::unchecked(4, 2, 5, 2, 5, FunctionSpec::CeilSqrt, FunctionSpec::default_g());
        assert!(build_unverified(&p, &params, 10).is_err());
    }

    #[test]
    fn params_validation() {
        let f = FunctionSpec::CeilSqrt;
        let g = FunctionSpec::default_g();
        assert!(ConstructionParams::new(35, 36, 36, 36, 36, f.clone(), g.clone()).is_err());
        assert!(ConstructionParams::new(36, 36, 36, 40, 36, f.clone(), g.clone()).is_err());
        let lin = FunctionSpec::Affine { slope: int(1), intercept: int(0) };
        assert!(ConstructionParams::new(36, 36, 36, 36, 36, lin, g.clone()).is_err());
        assert!(ConstructionParams::new(36, 36, 36, 36, 36, f.clone(), FunctionSpec::CeilSqrt).is_err());
        assert_eq!(ConstructionParams::new(36, 40, 36, 36, 36, f, g).unwrap().lambda(), int(10));
    }

    #[test]
    fn log_bound_is_exact() {
        // 2 * 36 * 100^3 = 7.2e7, floor(log2) = 26
        assert_eq!(log_bound_value(36, 100), 27);
        assert!(1u128 << 26 <= 72_000_000 && 72_000_000 < 1u128 << 27);
    }

    #[test]
    fn obstruction_formula() {
        let a = loxodromic_obstruction_bound(2, &FunctionSpec::Constant(int(0)), 36).unwrap();
        // 36 log2(576) + 36 = 36 (6 + log2 9) + 36
        let want = 36.0 * 576f64.log2() + 36.0;
        assert!(a.lo <= ratio((want * 1e6) as i128 + 1, 1_000_000) && a.hi >= ratio((want * 1e6) as i128 - 1, 1_000_000));
        assert!(a.hi - a.lo < ratio(1, 1_000_000));
    }

    #[test]
    fn block_family_construction_is_consistent() {
        let params = ConstructionParams::new(36, 36, 1152, 36, 320, FunctionSpec::CeilSqrt, FunctionSpec::default_g()).unwrap();
        let c = build_presentation(&block_family_shipped(), &params, 400).unwrap();
        assert_eq!(c.r1.len(), 3);
        let l1 = verify_lemma_4_1(&c);
        assert!(l1.log_bound && l1.start_index_bound && l1.freshness);
        let lb = verify_cw_length_bound(&c);
        assert!(lb.additivity && lb.lower);
        let dec = verify_decompositions(&c).unwrap();
        assert!(dec.pass, "{:?}", dec.failures);
        let obs = obstruction_table(&c).unwrap();
        assert!(obs.decreasing_tail);
        // at this scale the a-power and t-words of the shortest c_w are too long
        let l2 = verify_lemma_4_2(&c);
        assert!(!l2.case2 && !l2.pass);
        assert_eq!(l2.generic, l2.generic_first_violation.is_none());
    }
}
