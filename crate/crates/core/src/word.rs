//! Letters, words and the structural operators on them.
//!
//! A word is an immutable sequence of letters `x_1, x_2, ...`. Every operator
//! here returns a fresh word. The slice-level helpers (`split_s`, `split_e`)
//! are shared with the canonical-form and invariant recursions, which work on
//! borrowed subwords to avoid copying.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A variable `x_k` of the alphabet `X_n`, stored by its 1-based index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Letter(u32);

impl Letter {
    pub fn new(index: u32) -> Result<Self> {
        if index == 0 {
            Err(Error::Parse("letter indices start at 1".into()))
        } else {
            Ok(Letter(index))
        }
    }

    /// Panics on index 0; for literal letters in code and tests.
    pub fn x(index: u32) -> Self {
        Self::new(index).expect("letter index must be positive")
    }

    pub fn index(self) -> u32 {
        self.0
    }

    fn as_char(self) -> Option<char> {
        (1..=26)
            .contains(&self.0)
            .then(|| (b'a' + (self.0 - 1) as u8) as char)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// The two accepted text syntaxes for words.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Syntax {
    /// Contiguous lowercase letters, `a` = x1 ... `z` = x26.
    Letters,
    /// Whitespace-separated tokens `x1 x2 ...`.
    Tokens,
}

impl Syntax {
    /// The syntax a piece of text is written in.
    pub fn detect(text: &str) -> Syntax {
        if text.chars().any(|c| c.is_ascii_digit()) {
            Syntax::Tokens
        } else {
            Syntax::Letters
        }
    }
}

/// A finite word over an indexed alphabet. The empty word is allowed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Builds a word from 1-based indices. Panics on 0.
    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        Word(indices.into_iter().map(Letter::x).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Largest letter index used, 0 for the empty word.
    pub fn max_index(&self) -> u32 {
        self.0.iter().map(|l| l.0).max().unwrap_or(0)
    }

    pub fn content(&self) -> BTreeSet<Letter> {
        self.0.iter().copied().collect()
    }

    pub fn content_size(&self) -> usize {
        content_size(&self.0)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        self.0.contains(&letter)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, letter: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    pub fn reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// `s(w)`: the longest prefix missing exactly one letter of the content.
    pub fn s_prefix(&self) -> Result<Word> {
        let pos = split_s(&self.0).ok_or(Error::EmptyWord)?;
        Ok(Word(self.0[..pos].to_vec()))
    }

    /// `σ(w)`: the last letter to occur for the first time, reading left to right.
    pub fn sigma(&self) -> Result<Letter> {
        let pos = split_s(&self.0).ok_or(Error::EmptyWord)?;
        Ok(self.0[pos])
    }

    /// `e(w)`: the longest suffix missing exactly one letter of the content.
    pub fn e_suffix(&self) -> Result<Word> {
        let pos = split_e(&self.0).ok_or(Error::EmptyWord)?;
        Ok(Word(self.0[pos + 1..].to_vec()))
    }

    /// `ε(w)`: the last letter to occur for the first time, reading right to left.
    pub fn epsilon(&self) -> Result<Letter> {
        let pos = split_e(&self.0).ok_or(Error::EmptyWord)?;
        Ok(self.0[pos])
    }

    /// Replaces every occurrence of `from` by `to`.
    pub fn identify(&self, from: Letter, to: Letter) -> Result<Word> {
        if from == to {
            return Err(Error::SameLetter(from));
        }
        Ok(self.rename(|l| if l == from { to } else { l }))
    }

    /// Applies a letter-to-letter map.
    pub fn rename<F: Fn(Letter) -> Letter>(&self, f: F) -> Word {
        Word(self.0.iter().map(|&l| f(l)).collect())
    }

    /// Replaces each letter by its (nonempty) image and concatenates.
    pub fn substitute(&self, images: &BTreeMap<Letter, Word>) -> Result<Word> {
        let mut out = Vec::new();
        for &l in &self.0 {
            let img = images.get(&l).ok_or(Error::MissingImage(l))?;
            if img.is_empty() {
                return Err(Error::EmptyWord);
            }
            out.extend_from_slice(&img.0);
        }
        Ok(Word(out))
    }

    /// Renders in the requested syntax. Letter syntax falls back to tokens
    /// when some index exceeds 26.
    pub fn render(&self, syntax: Syntax) -> String {
        let letters_ok = self.0.iter().all(|l| l.as_char().is_some());
        if syntax == Syntax::Letters && letters_ok {
            self.0.iter().filter_map(|l| l.as_char()).collect()
        } else {
            let toks: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
            toks.join(" ")
        }
    }

    pub fn to_tokens(&self) -> String {
        self.render(Syntax::Tokens)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        f.write_str(&self.render(Syntax::Letters))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses either `xyzx` (letters) or `x1 x2 x3 x1` (tokens). An all-blank
    /// string is the empty word.
    fn from_str(text: &str) -> Result<Word> {
        let text = text.trim();
        match Syntax::detect(text) {
            Syntax::Letters => {
                let mut out = Vec::with_capacity(text.len());
                for c in text.chars() {
                    if !c.is_ascii_lowercase() {
                        return Err(Error::Parse(format!(
                            "unexpected character {c:?} in word {text:?}"
                        )));
                    }
                    out.push(Letter((c as u8 - b'a' + 1) as u32));
                }
                Ok(Word(out))
            }
            Syntax::Tokens => {
                let mut out = Vec::new();
                for tok in text.split_whitespace() {
                    let digits = tok.strip_prefix('x').ok_or_else(|| {
                        Error::Parse(format!("token {tok:?} is not of the form xK"))
                    })?;
                    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                        return Err(Error::Parse(format!("token {tok:?} is not of the form xK")));
                    }
                    let k: u32 = digits
                        .parse()
                        .map_err(|_| Error::Parse(format!("index in {tok:?} is too large")))?;
                    out.push(Letter::new(k)?);
                }
                Ok(Word(out))
            }
        }
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_tokens())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Small insertion-ordered letter set; word contents in this crate are tiny.
#[derive(Default)]
pub(crate) struct Seen(Vec<Letter>);

impl Seen {
    /// Returns true if the letter was new.
    #[inline]
    pub(crate) fn insert(&mut self, l: Letter) -> bool {
        if self.0.contains(&l) {
            false
        } else {
            self.0.push(l);
            true
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.0.len()
    }
}

pub(crate) fn content_size(w: &[Letter]) -> usize {
    let mut seen = Seen::default();
    for &l in w {
        seen.insert(l);
    }
    seen.len()
}

/// Position of `σ(w)`: `w[..pos]` is `s(w)`. `None` for the empty word.
#[inline]
pub(crate) fn split_s(w: &[Letter]) -> Option<usize> {
    let mut seen = Seen::default();
    let mut pos = None;
    for (p, &l) in w.iter().enumerate() {
        if seen.insert(l) {
            pos = Some(p);
        }
    }
    pos
}

/// Position of `ε(w)`: `w[pos + 1..]` is `e(w)`. `None` for the empty word.
#[inline]
pub(crate) fn split_e(w: &[Letter]) -> Option<usize> {
    let mut seen = Seen::default();
    let mut pos = None;
    for (p, &l) in w.iter().enumerate().rev() {
        if seen.insert(l) {
            pos = Some(p);
        }
    }
    pos
}
