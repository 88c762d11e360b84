//! The canonical form `b(w) = b(s(w)) σ(w) ε(w) b(e(w))` for the free band,
//! and the word problem for the variety of all bands it solves.
//!
//! Two words are equal in every band exactly when their `b`-images coincide
//! letter for letter. The image of a word with `k` distinct letters has length
//! `2^(k+1) - 2`, so deciders refuse words above a configurable content cap.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::word::{content_size, split_e, split_s, Letter, Word};

/// Default cap on distinct letters per word for the `b`-based decider.
pub const DEFAULT_MAX_CONTENT: usize = 20;

// Below this many distinct letters the plain recursion beats hashing subwords.
const MEMO_THRESHOLD: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CanonicalConfig {
    pub max_content: usize,
}

impl Default for CanonicalConfig {
    fn default() -> Self {
        CanonicalConfig {
            max_content: DEFAULT_MAX_CONTENT,
        }
    }
}

impl CanonicalConfig {
    pub(crate) fn check(&self, w: &Word) -> Result<()> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        let found = w.content_size();
        if found > self.max_content {
            return Err(Error::TooManyLetters {
                found,
                cap: self.max_content,
            });
        }
        Ok(())
    }
}

/// `b(w)`. Total: `b(∅) = ∅`. No content cap is applied here.
pub fn b_canonical(w: &Word) -> Word {
    Word::from_letters(b_letters(w.letters()))
}

pub(crate) fn b_letters(w: &[Letter]) -> Vec<Letter> {
    let k = content_size(w);
    let mut out = Vec::with_capacity((1usize << (k + 1).min(40)).saturating_sub(2));
    if k < MEMO_THRESHOLD {
        b_plain(w, &mut out);
    } else {
        let mut memo = HashMap::new();
        out.extend_from_slice(&b_memo(w, &mut memo));
    }
    out
}

fn b_plain(w: &[Letter], out: &mut Vec<Letter>) {
    let (Some(sp), Some(ep)) = (split_s(w), split_e(w)) else {
        return;
    };
    b_plain(&w[..sp], out);
    out.push(w[sp]);
    out.push(w[ep]);
    b_plain(&w[ep + 1..], out);
}

// Keyed by the subword itself: the s/e recursions revisit equal factors.
fn b_memo<'a>(w: &'a [Letter], memo: &mut HashMap<&'a [Letter], Rc<[Letter]>>) -> Rc<[Letter]> {
    if let Some(hit) = memo.get(w) {
        return hit.clone();
    }
    let value: Rc<[Letter]> = match (split_s(w), split_e(w)) {
        (Some(sp), Some(ep)) => {
            let left = b_memo(&w[..sp], memo);
            let right = b_memo(&w[ep + 1..], memo);
            let mut v = Vec::with_capacity(left.len() + right.len() + 2);
            v.extend_from_slice(&left);
            v.push(w[sp]);
            v.push(w[ep]);
            v.extend_from_slice(&right);
            v.into()
        }
        _ => Rc::from(Vec::new()),
    };
    memo.insert(w, value.clone());
    value
}

/// Decides whether `u ≈ v` holds in every band.
pub fn band_satisfies(u: &Word, v: &Word) -> Result<bool> {
    band_satisfies_with(&CanonicalConfig::default(), u, v)
}

pub fn band_satisfies_with(cfg: &CanonicalConfig, u: &Word, v: &Word) -> Result<bool> {
    cfg.check(u)?;
    cfg.check(v)?;
    if u.content() != v.content() {
        return Ok(false);
    }
    Ok(b_letters(u.letters()) == b_letters(v.letters()))
}
