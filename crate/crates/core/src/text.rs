//! Presentation text format.
//!
//! ```text
//! # comment
//! alphabet: x y s t a
//! t-alphabet: s t
//! morse-letter: a
//! xyx'y'
//! ```
//!
//! One relator per line, letters juxtaposed, `X'` is the inverse of `X`.

use crate::error::{Error, Result};
use crate::words::{Alphabet, CyclicWord, Presentation};

pub fn parse_presentation(src: &str) -> Result<Presentation> {
    let mut alphabet: Option<Alphabet> = None;
    let mut t_names: Option<(usize, Vec<char>)> = None;
    let mut morse_name: Option<(usize, char)> = None;
    let mut relator_lines: Vec<(usize, usize, &str)> = Vec::new();

    for (i, raw) in src.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        if let Some((key, value)) = trimmed.split_once(':') {
            let names: Vec<char> = value.chars().filter(|c| !c.is_whitespace()).collect();
            match key.trim() {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(Error::parse(line_no, 1, "duplicate `alphabet:` header"));
                    }
                    if !relator_lines.is_empty() {
                        return Err(Error::parse(line_no, 1, "header after relators"));
                    }
                    let mut a = Alphabet::default();
                    for c in names {
                        a.push(c).map_err(|e| Error::parse(line_no, 1, e.to_string()))?;
                    }
                    alphabet = Some(a);
                }
                "t-alphabet" => {
                    if names.len() != 2 {
                        return Err(Error::parse(line_no, 1, "t-alphabet needs exactly two letters"));
                    }
                    t_names = Some((line_no, names));
                }
                "morse-letter" => {
                    if names.len() != 1 {
                        return Err(Error::parse(line_no, 1, "morse-letter needs exactly one letter"));
                    }
                    morse_name = Some((line_no, names[0]));
                }
                other => {
                    return Err(Error::parse(line_no, indent + 1, format!("unknown header `{other}`")));
                }
            }
            continue;
        }
        relator_lines.push((line_no, indent + 1, trimmed));
    }

    let mut alphabet =
        alphabet.ok_or_else(|| Error::parse(1, 1, "missing `alphabet:` header"))?;
    if let Some((line, names)) = t_names {
        let mut idx = Vec::new();
        for c in names {
            idx.push(
                alphabet
                    .index_of(c)
                    .ok_or_else(|| Error::parse(line, 1, format!("t-letter `{c}` not in alphabet")))?,
            );
        }
        alphabet
            .set_t_letters(idx)
            .map_err(|e| Error::parse(line, 1, e.to_string()))?;
    }
    if let Some((line, c)) = morse_name {
        let g = alphabet
            .index_of(c)
            .ok_or_else(|| Error::parse(line, 1, format!("morse letter `{c}` not in alphabet")))?;
        alphabet
            .set_morse_letter(Some(g))
            .map_err(|e| Error::parse(line, 1, e.to_string()))?;
    }

    let mut p = Presentation::free(alphabet.clone());
    for (line, col, text) in relator_lines {
        let w = alphabet.parse_word_at(text, line, col)?;
        if w.is_empty() {
            return Err(Error::parse(line, col, "empty relator"));
        }
        if !w.is_cyclically_reduced() {
            return Err(Error::parse(line, col, "relator is not cyclically reduced"));
        }
        p.add_relator(CyclicWord::new_unchecked(w))
            .map_err(|e| Error::parse(line, col, e.to_string()))?;
    }
    Ok(p)
}

pub fn serialize_presentation(p: &Presentation) -> String {
    let a = &p.alphabet;
    let mut out = String::new();
    let names: Vec<String> = a.names().iter().map(|c| c.to_string()).collect();
    out.push_str(&format!("alphabet: {}\n", names.join(" ")));
    if !a.t_letters().is_empty() {
        let t: Vec<String> = a.t_letters().iter().map(|&g| a.names()[g].to_string()).collect();
        out.push_str(&format!("t-alphabet: {}\n", t.join(" ")));
    }
    if let Some(m) = a.morse_letter() {
        out.push_str(&format!("morse-letter: {}\n", a.names()[m]));
    }
    for r in p.relators() {
        out.push_str(&a.render(r.word()));
        out.push('\n');
    }
    out
}

pub fn read_presentation(path: &std::path::Path) -> Result<Presentation> {
    let src = std::fs::read_to_string(path)?;
    parse_presentation(&src)
}
