//! Suffix array with LCP, and a suffix automaton for substring matching.

use std::collections::HashMap;

/// Suffix array of `s` by prefix doubling over cyclic shifts of `s + [0]`.
/// Symbols must be `>= 1`; `0` is reserved for the terminal sentinel.
pub fn suffix_array(s: &[u32]) -> Vec<u32> {
    let n = s.len() + 1;
    let at = |i: usize| if i < s.len() { s[i] } else { 0 };
    let alpha = s.iter().copied().max().unwrap_or(0) as usize + 1;

    let mut p = vec![0u32; n];
    let mut c = vec![0u32; n];
    let mut cnt = vec![0u32; alpha.max(n)];
    for i in 0..n {
        cnt[at(i) as usize] += 1;
    }
    for i in 1..alpha {
        cnt[i] += cnt[i - 1];
    }
    for i in (0..n).rev() {
        let ch = at(i) as usize;
        cnt[ch] -= 1;
        p[cnt[ch] as usize] = i as u32;
    }
    let mut classes = 1u32;
    for i in 1..n {
        if at(p[i] as usize) != at(p[i - 1] as usize) {
            classes += 1;
        }
        c[p[i] as usize] = classes - 1;
    }

    let mut pn = vec![0u32; n];
    let mut cn = vec![0u32; n];
    let mut h = 0usize;
    while (1usize << h) < n && (classes as usize) < n {
        let step = 1usize << h;
        for i in 0..n {
            pn[i] = ((p[i] as usize + n - step) % n) as u32;
        }
        cnt[..classes as usize].iter_mut().for_each(|x| *x = 0);
        for i in 0..n {
            cnt[c[pn[i] as usize] as usize] += 1;
        }
        for i in 1..classes as usize {
            cnt[i] += cnt[i - 1];
        }
        for i in (0..n).rev() {
            let cl = c[pn[i] as usize] as usize;
            cnt[cl] -= 1;
            p[cnt[cl] as usize] = pn[i];
        }
        cn[p[0] as usize] = 0;
        classes = 1;
        for i in 1..n {
            let cur = (c[p[i] as usize], c[(p[i] as usize + step) % n]);
            let prev = (c[p[i - 1] as usize], c[(p[i - 1] as usize + step) % n]);
            if cur != prev {
                classes += 1;
            }
            cn[p[i] as usize] = classes - 1;
        }
        std::mem::swap(&mut c, &mut cn);
        h += 1;
    }
    // drop the sentinel, which sorts first
    p.remove(0);
    p
}

/// Kasai: `lcp[i]` = LCP of suffixes `sa[i-1]` and `sa[i]`, `lcp[0] = 0`.
pub fn lcp_array(s: &[u32], sa: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut rank = vec![0u32; n];
    for (i, &p) in sa.iter().enumerate() {
        rank[p as usize] = i as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut k = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            k = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + k < n && j + k < n && s[i + k] == s[j + k] {
            k += 1;
        }
        lcp[r] = k as u32;
        k = k.saturating_sub(1);
    }
    lcp
}

#[derive(Clone, Debug)]
struct SamState {
    len: usize,
    link: Option<usize>,
    next: HashMap<u32, usize>,
}

/// Suffix automaton of a single text; recognises exactly its substrings.
#[derive(Clone, Debug)]
pub struct SuffixAutomaton {
    states: Vec<SamState>,
}

impl SuffixAutomaton {
    pub fn new(text: &[u32]) -> SuffixAutomaton {
        let mut sam = SuffixAutomaton {
            states: vec![SamState {
                len: 0,
                link: None,
                next: HashMap::new(),
            }],
        };
        let mut last = 0usize;
        for &ch in text {
            last = sam.extend(last, ch);
        }
        sam
    }

    fn extend(&mut self, last: usize, ch: u32) -> usize {
        let cur = self.states.len();
        self.states.push(SamState {
            len: self.states[last].len + 1,
            link: None,
            next: HashMap::new(),
        });
        let mut p = Some(last);
        while let Some(q) = p {
            if self.states[q].next.contains_key(&ch) {
                break;
            }
            self.states[q].next.insert(ch, cur);
            p = self.states[q].link;
        }
        match p {
            None => self.states[cur].link = Some(0),
            Some(p) => {
                let q = self.states[p].next[&ch];
                if self.states[p].len + 1 == self.states[q].len {
                    self.states[cur].link = Some(q);
                } else {
                    let clone = self.states.len();
                    let st = SamState {
                        len: self.states[p].len + 1,
                        link: self.states[q].link,
                        next: self.states[q].next.clone(),
                    };
                    self.states.push(st);
                    let mut pp = Some(p);
                    while let Some(x) = pp {
                        if self.states[x].next.get(&ch) == Some(&q) {
                            self.states[x].next.insert(ch, clone);
                            pp = self.states[x].link;
                        } else {
                            break;
                        }
                    }
                    self.states[q].link = Some(clone);
                    self.states[cur].link = Some(clone);
                }
            }
        }
        cur
    }

    /// For every position `j` of `query`, the length of the longest suffix of
    /// `query[..=j]` that is a substring of the text, capped at `cap`.
    pub fn match_lengths(&self, query: &[u32], cap: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(query.len());
        let mut state = 0usize;
        let mut len = 0usize;
        for &ch in query {
            loop {
                if let Some(&nx) = self.states[state].next.get(&ch) {
                    state = nx;
                    len += 1;
                    break;
                }
                match self.states[state].link {
                    Some(l) => {
                        state = l;
                        len = self.states[state].len;
                    }
                    None => {
                        len = 0;
                        break;
                    }
                }
            }
            if len > cap {
                len = cap;
                while let Some(l) = self.states[state].link {
                    if self.states[l].len >= len {
                        state = l;
                    } else {
                        break;
                    }
                }
            }
            out.push(len);
        }
        out
    }
}
