//! Words over symmetrized alphabets, cyclic words and presentations.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A generator (positive) or its formal inverse (negative). Generator `k`
/// (0-based) is stored as `k + 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter(i32);

impl Letter {
    pub fn gen(index: usize) -> Letter {
        Letter(index as i32 + 1)
    }

    pub fn inv_gen(index: usize) -> Letter {
        Letter(-(index as i32 + 1))
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Dense code: generator order, each generator directly followed by its
    /// inverse. This is the alphabet order used for all lexicographic
    /// comparisons.
    pub fn code(self) -> u32 {
        2 * self.generator() as u32 + u32::from(!self.is_positive())
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code().cmp(&other.code())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn power(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(&f), Some(&l)) => self.0.len() == 1 || f != l.inverse(),
                _ => true,
            }
    }

    /// Rotation starting at position `k`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    pub fn is_subword_of(&self, other: &Word) -> bool {
        self.is_empty() || other.0.windows(self.len()).any(|w| w == self.0.as_slice())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Returns the unique reduced word freely equal to `w`.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.0 {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// Index of the lexicographically least rotation (Booth-style two pointers).
pub fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        match a.cmp(&b) {
            Ordering::Equal => k += 1,
            Ordering::Greater => {
                i += k + 1;
                if i == j {
                    i += 1;
                }
                k = 0;
            }
            Ordering::Less => {
                j += k + 1;
                if i == j {
                    j += 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}

/// Length of the primitive period of a cyclic word (smallest `p` with
/// rotation by `p` equal to the word).
pub fn primitive_period(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    // prefix function of s
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && s[i] != s[k] {
            k = pi[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let p = n - pi[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

/// A cyclically reduced word considered up to rotation.
#[derive(Clone, Debug)]
pub struct CyclicWord {
    word: Word,
    canonical_shift: usize,
}

impl CyclicWord {
    pub fn new(word: Word) -> Result<CyclicWord> {
        if !word.is_cyclically_reduced() {
            return Err(Error::Input("relator is not cyclically reduced".into()));
        }
        Ok(Self::new_unchecked(word))
    }

    pub(crate) fn new_unchecked(word: Word) -> CyclicWord {
        let canonical_shift = least_rotation(&word.0);
        CyclicWord {
            word,
            canonical_shift,
        }
    }

    pub fn empty() -> CyclicWord {
        CyclicWord {
            word: Word::empty(),
            canonical_shift: 0,
        }
    }

    /// The stored representative.
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn canonical_shift(&self) -> usize {
        self.canonical_shift
    }

    pub fn canonical(&self) -> Word {
        self.word.rotate(self.canonical_shift)
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::new_unchecked(self.word.inverse())
    }

    pub fn period(&self) -> usize {
        primitive_period(&self.word.0)
    }

    /// Equality up to rotation, without allocating.
    pub fn cyclic_eq(&self, other: &CyclicWord) -> bool {
        let n = self.len();
        n == other.len()
            && (0..n).all(|i| self.at(self.canonical_shift + i) == other.at(other.canonical_shift + i))
    }

    /// All distinct rotations of the representative.
    pub fn rotations(&self) -> Vec<Word> {
        (0..self.period()).map(|k| self.word.rotate(k)).collect()
    }

    /// Letter at cyclic position `i`.
    pub fn at(&self, i: usize) -> Letter {
        self.word.0[i % self.word.len()]
    }
}

impl PartialEq for CyclicWord {
    fn eq(&self, other: &Self) -> bool {
        self.cyclic_eq(other)
    }
}

impl Eq for CyclicWord {}

impl std::hash::Hash for CyclicWord {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canonical().hash(state)
    }
}

/// Result of `cyclic_reduce`: `w = conjugator * core * conjugator^-1`.
#[derive(Clone, Debug)]
pub struct CyclicReduction {
    pub core: CyclicWord,
    pub conjugator: Word,
    /// Set when `w` is freely trivial and the core is empty.
    pub trivial: bool,
}

/// Peels inverse pairs off both ends of a reduced word.
pub fn cyclic_reduce(w: &Word) -> CyclicReduction {
    let w = free_reduce(w);
    let n = w.len();
    let mut k = 0;
    while 2 * k + 1 < n && w.0[k] == w.0[n - 1 - k].inverse() {
        k += 1;
    }
    let core = Word(w.0[k..n - k].to_vec());
    CyclicReduction {
        trivial: core.is_empty(),
        conjugator: Word(w.0[..k].to_vec()),
        core: CyclicWord::new_unchecked(core),
    }
}

/// Which declared part of the alphabet a generator belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    Base,
    T,
    Morse,
}

/// Ordered generator names; each generator has a formal inverse written
/// with a trailing `'`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Alphabet {
    names: Vec<char>,
    index: HashMap<char, usize>,
    t_letters: Vec<usize>,
    morse: Option<usize>,
}

fn valid_name(c: char) -> bool {
    c.is_alphanumeric()
}

impl Alphabet {
    pub fn new(names: &[char]) -> Result<Alphabet> {
        let mut a = Alphabet::default();
        for &c in names {
            a.push(c)?;
        }
        Ok(a)
    }

    pub fn from_str_names(names: &str) -> Result<Alphabet> {
        let chars: Vec<char> = names.chars().filter(|c| !c.is_whitespace()).collect();
        Alphabet::new(&chars)
    }

    pub fn push(&mut self, c: char) -> Result<usize> {
        if !valid_name(c) {
            return Err(Error::Input(format!("`{c}` is not a valid generator name")));
        }
        if self.index.contains_key(&c) {
            return Err(Error::Input(format!("generator `{c}` declared twice")));
        }
        self.index.insert(c, self.names.len());
        self.names.push(c);
        Ok(self.names.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn letter(&self, c: char) -> Result<Letter> {
        self.index_of(c)
            .map(Letter::gen)
            .ok_or_else(|| Error::UnknownLetter(c.to_string()))
    }

    pub fn t_letters(&self) -> &[usize] {
        &self.t_letters
    }

    pub fn morse_letter(&self) -> Option<usize> {
        self.morse
    }

    pub fn set_t_letters(&mut self, t: Vec<usize>) -> Result<()> {
        if t.iter().any(|&g| g >= self.len()) {
            return Err(Error::Input("t-alphabet letter outside alphabet".into()));
        }
        self.t_letters = t;
        self.check_disjoint()
    }

    pub fn set_morse_letter(&mut self, a: Option<usize>) -> Result<()> {
        if a.is_some_and(|g| g >= self.len()) {
            return Err(Error::Input("morse letter outside alphabet".into()));
        }
        self.morse = a;
        self.check_disjoint()
    }

    /// The declared sub-alphabets `S`, `T`, `{a}` are pairwise disjoint.
    pub fn check_disjoint(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &t in &self.t_letters {
            if !seen.insert(t) {
                return Err(Error::Input("t-alphabet repeats a letter".into()));
            }
        }
        if let Some(a) = self.morse {
            if seen.contains(&a) {
                return Err(Error::Input("morse letter also declared in t-alphabet".into()));
            }
        }
        Ok(())
    }

    pub fn part(&self, g: usize) -> Part {
        if self.morse == Some(g) {
            Part::Morse
        } else if self.t_letters.contains(&g) {
            Part::T
        } else {
            Part::Base
        }
    }

    pub fn base_generators(&self) -> Vec<usize> {
        (0..self.len()).filter(|&g| self.part(g) == Part::Base).collect()
    }

    /// Parses juxtaposed letters, `X'` is the inverse of `X`. Whitespace is
    /// ignored. Errors carry a 1-based column.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        self.parse_word_at(s, 1, 1)
    }

    pub(crate) fn parse_word_at(&self, s: &str, line: usize, col0: usize) -> Result<Word> {
        let mut out: Vec<Letter> = Vec::new();
        for (col, c) in s.chars().enumerate() {
            let col = col + col0;
            if c.is_whitespace() {
                continue;
            }
            if c == '\'' {
                match out.pop() {
                    Some(l) => out.push(l.inverse()),
                    None => return Err(Error::parse(line, col, "`'` without a preceding letter")),
                }
                continue;
            }
            match self.index_of(c) {
                Some(g) => out.push(Letter::gen(g)),
                None => {
                    return Err(Error::parse(line, col, format!("unknown letter `{c}`")));
                }
            }
        }
        Ok(Word(out))
    }

    pub fn render(&self, w: &Word) -> String {
        let mut s = String::with_capacity(w.len() * 2);
        for l in w.letters() {
            s.push(self.names[l.generator()]);
            if !l.is_positive() {
                s.push('\'');
            }
        }
        s
    }
}

/// `<S | R>` with relators pairwise distinct as cyclic words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    relators: Vec<CyclicWord>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<CyclicWord>) -> Result<Presentation> {
        let mut p = Presentation {
            alphabet,
            relators: Vec::with_capacity(relators.len()),
        };
        for r in relators {
            p.add_relator(r)?;
        }
        Ok(p)
    }

    pub fn free(alphabet: Alphabet) -> Presentation {
        Presentation {
            alphabet,
            relators: Vec::new(),
        }
    }

    /// Builds from relator strings, rejecting duplicates and non-cyclically
    /// reduced words.
    pub fn from_strs(alphabet: Alphabet, relators: &[&str]) -> Result<Presentation> {
        let mut rs = Vec::new();
        for r in relators {
            rs.push(CyclicWord::new(alphabet.parse_word(r)?)?);
        }
        Presentation::new(alphabet, rs)
    }

    pub fn relators(&self) -> &[CyclicWord] {
        &self.relators
    }

    pub fn add_relator(&mut self, r: CyclicWord) -> Result<()> {
        if r.is_empty() {
            return Err(Error::Input("empty relator".into()));
        }
        if !r.word().is_cyclically_reduced() {
            return Err(Error::Input("relator is not cyclically reduced".into()));
        }
        if r.word().letters().iter().any(|l| l.generator() >= self.alphabet.len()) {
            return Err(Error::Input("relator uses a letter outside the alphabet".into()));
        }
        if self.relators.iter().any(|q| q.cyclic_eq(&r)) {
            return Err(Error::Input(format!(
                "duplicate relator {}",
                self.alphabet.render(r.word())
            )));
        }
        self.relators.push(r);
        Ok(())
    }

    /// Keeps relators satisfying `keep`, in order.
    pub fn filtered(&self, keep: impl Fn(&CyclicWord) -> bool) -> Presentation {
        Presentation {
            alphabet: self.alphabet.clone(),
            relators: self.relators.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(|r| r.len()).sum()
    }
}

/// All rotations of all relators and of their inverses, deduplicated.
pub fn symmetrize(p: &Presentation) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for r in p.relators() {
        for c in [r.clone(), r.inverse()] {
            for k in 0..c.len() {
                out.insert(c.word().rotate(k));
            }
        }
    }
    out
}

/// An occurrence of a word inside an element of the symmetrized closure of a
/// cyclic word: the rotation start in the representative (or its inverse)
/// and the offset of the match inside that rotation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub struct Occurrence {
    pub inverse: bool,
    pub rotation: usize,
    pub offset: usize,
}

/// Every `(rotation, offset)` with `w` a subword of a word in the closure of
/// `r`. Matches are reported with offset 0, i.e. once per distinct rotation
/// that starts with `w`; words longer than `r` never match.
pub fn is_cyclic_subword(w: &Word, r: &CyclicWord) -> Vec<Occurrence> {
    let mut out = Vec::new();
    if w.is_empty() || w.len() > r.len() || r.is_empty() {
        return out;
    }
    let period = r.period();
    for (inverse, c) in [(false, r.clone()), (true, r.inverse())] {
        if inverse && c == *r {
            break;
        }
        for start in 0..period {
            if (0..w.len()).all(|i| c.at(start + i) == w.0[i]) {
                out.push(Occurrence {
                    inverse,
                    rotation: start,
                    offset: 0,
                });
            }
        }
    }
    out
}

/// The `i`-th (1-based) nonempty positive word over a two-letter alphabet
/// `{t0, t1}`, ordered by length then lexicographically.
pub fn t_word(i: u64, t0: Letter, t1: Letter) -> Word {
    assert!(i >= 1);
    let code = i + 1;
    let len = 63 - code.leading_zeros();
    let letters = (0..len)
        .rev()
        .map(|b| if (code >> b) & 1 == 0 { t0 } else { t1 })
        .collect();
    Word(letters)
}

/// The first `count` nonempty positive words over `{t0, t1}`.
pub fn enumerate_t_words(t0: Letter, t1: Letter, count: usize) -> Vec<Word> {
    (1..=count as u64).map(|i| t_word(i, t0, t1)).collect()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            if l.is_positive() {
                write!(f, "g{}", l.generator())?;
            } else {
                write!(f, "g{}'", l.generator())?;
            }
        }
        Ok(())
    }
}
