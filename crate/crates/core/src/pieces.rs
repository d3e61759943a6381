//! Pieces of a presentation and the small-cancellation conditions
//! `C'(lambda)`, `C'(1/f)` and the pair condition for a word.
//!
//! A piece is a nonempty common prefix of two distinct words of the
//! symmetrized closure. Every subword of a piece is again a piece, so the
//! pieces lying in a relator are described by one number per rotation: the
//! longest piece starting there, i.e. the largest common prefix with any other
//! element of the closure. Those numbers come from one generalized suffix
//! array over the doubled cyclic words.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::funcspec::FunctionSpec;
use crate::rational::{fmt_rational, int, Enclosure, Rational};
use crate::suffix::{lcp_array, suffix_array, SuffixAutomaton};
use crate::words::{Presentation, Word};

const NONE: u32 = u32::MAX;

/// One cyclic word of the symmetrized closure, up to rotation.
#[derive(Clone, Debug)]
pub struct SymClass {
    pub word: Word,
    /// First relator of the presentation mapping onto this class.
    pub relator: usize,
    pub inverse: bool,
    pub period: usize,
    pub group: u8,
    first_start: usize,
}

/// A maximal piece: the longest common prefix of rotation `rotation` of
/// (the inverse of) relator `relator` with the partner rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceWitness {
    pub relator: usize,
    pub inverse: bool,
    pub rotation: usize,
    pub length: usize,
    pub partner_relator: usize,
    pub partner_inverse: bool,
    pub partner_rotation: usize,
}

/// Longest-common-prefix data over the symmetrized relator set.
#[derive(Clone, Debug)]
pub struct PieceTable {
    classes: Vec<SymClass>,
    /// Classes of relator `i`: forward, then inverse (may coincide).
    relator_classes: Vec<[usize; 2]>,
    groups: usize,
    /// `best[g][s]`: longest piece starting at start `s` witnessed by a partner in group `g`.
    best: Vec<Vec<u32>>,
    partner: Vec<Vec<u32>>,
    start_class: Vec<u32>,
}

impl PieceTable {
    pub fn classes(&self) -> &[SymClass] {
        &self.classes
    }

    pub fn num_relators(&self) -> usize {
        self.relator_classes.len()
    }

    fn start_best(&self, s: usize) -> (u32, Option<u32>) {
        let mut b = 0;
        let mut p = None;
        for g in 0..self.groups {
            if self.best[g][s] > b {
                b = self.best[g][s];
                p = Some(self.partner[g][s]);
            }
        }
        (b, p)
    }

    /// Longest piece starting at cyclic offset `offset` of class `class`.
    pub fn longest_piece_at(&self, class: usize, offset: usize) -> usize {
        let c = &self.classes[class];
        self.start_best(c.first_start + offset % c.period).0 as usize
    }

    fn class_max(&self, class: usize, group: Option<usize>) -> (usize, Option<usize>) {
        let c = &self.classes[class];
        let mut best = 0usize;
        let mut arg = None;
        for off in 0..c.period {
            let s = c.first_start + off;
            let v = match group {
                Some(g) => self.best[g][s],
                None => self.start_best(s).0,
            } as usize;
            if v > best {
                best = v;
                arg = Some(s);
            }
        }
        (best, arg)
    }

    /// Maximum length of a piece that is a (cyclic) subword of relator `i`.
    pub fn max_piece(&self, i: usize) -> usize {
        self.relator_classes[i]
            .iter()
            .map(|&c| self.class_max(c, None).0)
            .max()
            .unwrap_or(0)
    }

    /// As `max_piece`, counting only pieces shared with words of group `g`.
    pub fn max_piece_vs_group(&self, i: usize, g: usize) -> usize {
        self.relator_classes[i]
            .iter()
            .map(|&c| self.class_max(c, Some(g)).0)
            .max()
            .unwrap_or(0)
    }

    fn witness_for_start(&self, s: usize, len: u32, partner: u32) -> PieceWitness {
        let c = &self.classes[self.start_class[s] as usize];
        let pc = &self.classes[self.start_class[partner as usize] as usize];
        PieceWitness {
            relator: c.relator,
            inverse: c.inverse,
            rotation: s - c.first_start,
            length: len as usize,
            partner_relator: pc.relator,
            partner_inverse: pc.inverse,
            partner_rotation: partner as usize - pc.first_start,
        }
    }

    /// A longest piece of relator `i`, if it has any.
    pub fn witness(&self, i: usize) -> Option<PieceWitness> {
        let mut best: Option<PieceWitness> = None;
        for &c in &self.relator_classes[i] {
            let (len, arg) = self.class_max(c, None);
            if let Some(s) = arg {
                if best.as_ref().is_none_or(|b| len > b.length) {
                    let (l, p) = self.start_best(s);
                    best = Some(self.witness_for_start(s, l, p.unwrap()));
                }
            }
        }
        best
    }

    /// All left-maximal pieces of the forward class of relator `i` with
    /// length at least `min_len`.
    pub fn maximal_pieces(&self, i: usize, min_len: usize) -> Vec<PieceWitness> {
        let c = &self.classes[self.relator_classes[i][0]];
        let mut out = Vec::new();
        for off in 0..c.period {
            let s = c.first_start + off;
            let (len, partner) = self.start_best(s);
            if len == 0 || (len as usize) < min_len {
                continue;
            }
            let prev = c.first_start + (off + c.period - 1) % c.period;
            if c.period > 1 && self.start_best(prev).0 > len {
                continue;
            }
            out.push(self.witness_for_start(s, len, partner.unwrap()));
        }
        out
    }

    pub fn piece_word(&self, w: &PieceWitness) -> Word {
        let c = &self.classes[self.relator_classes[w.relator][usize::from(w.inverse)]];
        let mut v = Vec::with_capacity(w.length);
        for k in 0..w.length {
            v.push(c.word.0[(w.rotation + k) % c.word.len()]);
        }
        Word(v)
    }

    /// Per position of the class word, the start of the longest piece
    /// ending there (doubled indexing).
    fn piece_end_starts(&self, class: usize) -> Vec<usize> {
        let c = &self.classes[class];
        let n = c.word.len();
        let ends: Vec<usize> = (0..2 * n)
            .map(|i| i + self.start_best(c.first_start + i % c.period).0 as usize)
            .collect();
        // pieces are closed under subwords, so `ends` is nondecreasing
        let mut starts = Vec::with_capacity(2 * n);
        let mut i = 0usize;
        for j in 0..2 * n {
            while i <= j && ends[i] <= j {
                i += 1;
            }
            starts.push(i);
        }
        starts
    }
}

/// Builds the piece table with every relator in a single group.
pub fn enumerate_pieces(p: &Presentation) -> PieceTable {
    enumerate_pieces_grouped(p, &vec![0u8; p.relators().len()])
}

/// Builds the piece table, tracking partners separately per relator group.
pub fn enumerate_pieces_grouped(p: &Presentation, group_of: &[u8]) -> PieceTable {
    assert_eq!(group_of.len(), p.relators().len());
    let groups = group_of.iter().copied().max().map_or(1, |g| g as usize + 1);

    let mut classes: Vec<SymClass> = Vec::new();
    let mut relator_classes = Vec::with_capacity(p.relators().len());
    let mut by_canon: HashMap<Word, usize> = HashMap::new();
    let mut total_starts = 0usize;
    for (i, r) in p.relators().iter().enumerate() {
        let mut ids = [0usize; 2];
        for (k, cw) in [r.clone(), r.inverse()].into_iter().enumerate() {
            let canon = cw.canonical();
            let id = *by_canon.entry(canon).or_insert_with(|| {
                let period = cw.period();
                classes.push(SymClass {
                    word: cw.word().clone(),
                    relator: i,
                    inverse: k == 1,
                    period,
                    group: group_of[i],
                    first_start: total_starts,
                });
                total_starts += period;
                classes.len() - 1
            });
            ids[k] = id;
        }
        relator_classes.push(ids);
    }

    // text: each class doubled, then a separator
    let text_len: usize = classes.iter().map(|c| 2 * c.word.len() + 1).sum();
    let mut text = Vec::with_capacity(text_len);
    let mut pos_start = Vec::with_capacity(text_len);
    let mut start_class = vec![0u32; total_starts];
    let mut start_cap = vec![0u32; total_starts];
    for (ci, c) in classes.iter().enumerate() {
        let n = c.word.len();
        for k in 0..2 * n {
            text.push(c.word.0[k % n].code() + 2);
            pos_start.push(if k < c.period { (c.first_start + k) as u32 } else { NONE });
        }
        text.push(1);
        pos_start.push(NONE);
        for k in 0..c.period {
            start_class[c.first_start + k] = ci as u32;
            start_cap[c.first_start + k] = n as u32;
        }
    }
    let sa = suffix_array(&text);
    let lcp = lcp_array(&text, &sa);

    // valid starts in suffix order, with LCP to the previous valid start
    let mut order: Vec<u32> = Vec::with_capacity(total_starts);
    let mut adj: Vec<u32> = Vec::with_capacity(total_starts);
    let mut run = u32::MAX;
    for (rank, &pos) in sa.iter().enumerate() {
        if rank > 0 {
            run = run.min(lcp[rank]);
        }
        let s = pos_start[pos as usize];
        if s != NONE {
            adj.push(if order.is_empty() { 0 } else { run });
            order.push(s);
            run = u32::MAX;
        }
    }
    drop(sa);
    drop(lcp);
    drop(text);

    let n = order.len();
    let cap: Vec<u32> = order.iter().map(|&s| start_cap[s as usize]).collect();
    let grp: Vec<u8> = order
        .iter()
        .map(|&s| classes[start_class[s as usize] as usize].group)
        .collect();

    let mut best = vec![vec![0u32; total_starts]; groups];
    let mut partner = vec![vec![NONE; total_starts]; groups];
    for g in 0..groups {
        // nearest group-g starts left and right, with the LCP minimum up to them
        let mut prev = vec![NONE; n];
        let mut minprev = vec![0u32; n];
        let mut last = NONE;
        let mut run = u32::MAX;
        for j in 0..n {
            run = run.min(adj[j]);
            prev[j] = last;
            minprev[j] = run;
            if grp[j] as usize == g {
                last = j as u32;
                run = u32::MAX;
            }
        }
        let mut next = vec![NONE; n];
        let mut minnext = vec![0u32; n];
        let mut last = NONE;
        let mut run = u32::MAX;
        for j in (0..n).rev() {
            next[j] = last;
            minnext[j] = run;
            if grp[j] as usize == g {
                last = j as u32;
                run = u32::MAX;
            }
            run = run.min(adj[j]);
        }

        let results: Vec<(u32, u32)> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut b = 0u32;
                let mut arg = NONE;
                let (mut k, mut m) = (prev[j], minprev[j]);
                while k != NONE && m > b {
                    let v = m.min(cap[k as usize]);
                    if v > b {
                        b = v;
                        arg = k;
                    }
                    m = m.min(minprev[k as usize]);
                    k = prev[k as usize];
                }
                let (mut k, mut m) = (next[j], minnext[j]);
                while k != NONE && m > b {
                    let v = m.min(cap[k as usize]);
                    if v > b {
                        b = v;
                        arg = k;
                    }
                    m = m.min(minnext[k as usize]);
                    k = next[k as usize];
                }
                let b = b.min(cap[j]);
                (b, if b == 0 { NONE } else { order[arg as usize] })
            })
            .collect();
        for (j, (b, a)) in results.into_iter().enumerate() {
            let s = order[j] as usize;
            best[g][s] = b;
            partner[g][s] = a;
        }
    }

    PieceTable {
        classes,
        relator_classes,
        groups,
        best,
        partner,
        start_class,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelatorRow {
    pub relator: String,
    pub len: usize,
    #[serde(rename = "maxPiece")]
    pub max_piece: usize,
    pub bound: Enclosure,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationRow {
    pub piece: String,
    pub relator: String,
    pub partner: String,
    #[serde(flatten)]
    pub witness: PieceWitness,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScReport {
    pub verdict: bool,
    pub condition: String,
    #[serde(rename = "perRelator")]
    pub per_relator: Vec<RelatorRow>,
    pub violations: Vec<ViolationRow>,
    #[serde(rename = "violationsTruncated")]
    pub violations_truncated: usize,
}

const MAX_VIOLATIONS: usize = 10_000;

fn render_relator(p: &Presentation, i: usize, inverse: bool, rotation: usize) -> String {
    let r = &p.relators()[i];
    let w = if inverse { r.inverse().word().rotate(rotation) } else { r.word().rotate(rotation) };
    p.alphabet.render(&w)
}

fn sc_report(
    p: &Presentation,
    table: &PieceTable,
    condition: String,
    bound_of: impl Fn(usize) -> Result<Enclosure>,
    passes: impl Fn(usize, usize) -> Result<bool>,
) -> Result<ScReport> {
    let mut per_relator = Vec::with_capacity(p.relators().len());
    let mut violations = Vec::new();
    let mut truncated = 0usize;
    let mut verdict = true;
    for (i, r) in p.relators().iter().enumerate() {
        let mp = table.max_piece(i);
        let ok = passes(r.len(), mp)?;
        verdict &= ok;
        per_relator.push(RelatorRow {
            relator: p.alphabet.render(r.word()),
            len: r.len(),
            max_piece: mp,
            bound: bound_of(r.len())?,
            pass: ok,
        });
        if !ok {
            // smallest violating length for this relator
            let mut min_bad = mp;
            while min_bad > 1 && !passes(r.len(), min_bad - 1)? {
                min_bad -= 1;
            }
            for w in table.maximal_pieces(i, min_bad) {
                if violations.len() >= MAX_VIOLATIONS {
                    truncated += 1;
                    continue;
                }
                violations.push(ViolationRow {
                    piece: p.alphabet.render(&table.piece_word(&w)),
                    relator: render_relator(p, w.relator, w.inverse, w.rotation),
                    partner: render_relator(p, w.partner_relator, w.partner_inverse, w.partner_rotation),
                    witness: w,
                });
            }
        }
    }
    Ok(ScReport {
        verdict,
        condition,
        per_relator,
        violations,
        violations_truncated: truncated,
    })
}

/// `C'(lambda)`: every piece `p` of every relator `r` has `|p| < lambda |r|`.
pub fn check_c_prime(p: &Presentation, lambda: Rational) -> ScReport {
    let table = enumerate_pieces(p);
    check_c_prime_with(p, &table, lambda)
}

pub fn check_c_prime_with(p: &Presentation, table: &PieceTable, lambda: Rational) -> ScReport {
    assert!(lambda > int(0), "lambda must be positive");
    sc_report(
        p,
        table,
        format!("C'({})", fmt_rational(&lambda)),
        |n| Ok(Enclosure::exact(lambda * int(n as i128))),
        |n, piece| Ok(int(piece as i128) < lambda * int(n as i128)),
    )
    .expect("exact C' grading cannot fail")
}

fn length_range(p: &Presentation) -> (u64, u64) {
    let lo = p.relators().iter().map(|r| r.len()).min().unwrap_or(1) as u64;
    let hi = p.relators().iter().map(|r| r.len()).max().unwrap_or(1) as u64;
    (lo, hi)
}

/// `C'(1/f)`: every piece `p` of a relator `r` has `|p| < |r| / f(|r|)`.
/// `f` must be viable on the range of relator lengths.
pub fn check_c_prime_f(p: &Presentation, f: &FunctionSpec) -> Result<ScReport> {
    let (lo, hi) = length_range(p);
    f.check_viable(lo, hi)?;
    let table = enumerate_pieces(p);
    check_c_prime_f_with(p, &table, f)
}

pub fn check_c_prime_f_with(p: &Presentation, table: &PieceTable, f: &FunctionSpec) -> Result<ScReport> {
    sc_report(
        p,
        table,
        format!("C'(1/f), f = {f}"),
        |n| {
            let v = f.eval(n as u64)?;
            Ok(Enclosure::exact(int(n as i128)).div_pos(v))
        },
        |n, piece| piece_below(n, piece, f),
    )
}

/// Certified `piece < n / f(n)`, i.e. `piece * f(n) < n`.
fn piece_below(n: usize, piece: usize, f: &FunctionSpec) -> Result<bool> {
    if piece == 0 {
        return Ok(true);
    }
    let v = f.eval(n as u64)?;
    Ok(v.scale(int(piece as i128)).certainly_lt(int(n as i128)))
}

#[derive(Clone, Debug, Serialize)]
pub struct PairRow {
    pub relator: String,
    pub len: usize,
    /// Longest piece of this relator that is also a subword of `x`.
    pub shared_piece: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub verdict: bool,
    pub rows: Vec<PairRow>,
}

/// The pair `(x, R)` satisfies `C'(1/f)`: every piece of a relator `r` that is
/// a subword of `x` has `|p| < |r| / f(|r|)`.
pub fn check_pair_condition(x: &Word, p: &Presentation, f: &FunctionSpec) -> Result<PairReport> {
    let (lo, hi) = length_range(p);
    f.check_viable(lo, hi)?;
    let table = enumerate_pieces(p);
    check_pair_condition_with(x, p, &table, f)
}

pub fn check_pair_condition_with(
    x: &Word,
    p: &Presentation,
    table: &PieceTable,
    f: &FunctionSpec,
) -> Result<PairReport> {
    let codes: Vec<u32> = x.letters().iter().map(|l| l.code()).collect();
    let sam = SuffixAutomaton::new(&codes);
    let mut rows = Vec::with_capacity(p.relators().len());
    let mut verdict = true;
    for (i, r) in p.relators().iter().enumerate() {
        let mut shared = 0usize;
        if !x.is_empty() {
            for &c in &table.relator_classes[i] {
                shared = shared.max(shared_piece_len(table, c, &sam));
            }
        }
        let ok = piece_below(r.len(), shared, f)?;
        verdict &= ok;
        rows.push(PairRow {
            relator: p.alphabet.render(r.word()),
            len: r.len(),
            shared_piece: shared,
            pass: ok,
        });
    }
    Ok(PairReport { verdict, rows })
}

fn shared_piece_len(table: &PieceTable, class: usize, sam: &SuffixAutomaton) -> usize {
    let c = &table.classes[class];
    let n = c.word.len();
    let doubled: Vec<u32> = (0..2 * n).map(|k| c.word.0[k % n].code()).collect();
    let matches = sam.match_lengths(&doubled, n);
    let starts = table.piece_end_starts(class);
    (0..2 * n)
        .map(|j| matches[j].min(j + 1 - starts[j].min(j + 1)))
        .max()
        .unwrap_or(0)
}
