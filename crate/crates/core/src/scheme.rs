//! n-schemes of words.
//!
//! A scheme of arity `n` assigns a word `w_ij` over `X_n` to every pair
//! `1 <= i < j <= n`. Against a variety it is checked for dependency (D),
//! `w_ij` not depending on `x_i`, and the consistency conditions
//! (C1) `w_ij^(pq) ≈ w_pq^(ij)` for disjoint pairs and
//! (C2) `w_ij^(jk) ≈ w_jk^(ik) ≈ w_ik^(jk)` for `i < j < k`.
//! Here `w^(pq)` replaces `x_p` by `x_q`.
//!
//! The solver reconstructs a word the scheme comes from, by induction along
//! the chains of irreducible varieties, and always verifies its answer.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::variety::{Atom, Family, Side, Variety};
use crate::word::{Letter, Seen, Word};

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// All pairs `(i, j)` with `1 <= i < j <= n`, in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

fn x(i: usize) -> Letter {
    Letter::x(i as u32)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scheme {
    n: usize,
    // lexicographic pair order, see `pairs`
    entries: Vec<Word>,
}

impl Scheme {
    /// Builds a scheme from a full map of entries over `X_n`.
    pub fn new(n: usize, mut entries: BTreeMap<(usize, usize), Word>) -> Result<Scheme> {
        if n < 2 {
            return Err(Error::InvalidScheme(format!(
                "arity must be at least 2, got {n}"
            )));
        }
        let mut out = Vec::with_capacity(pair_count(n));
        for (i, j) in pairs(n) {
            let w = entries
                .remove(&(i, j))
                .ok_or_else(|| Error::InvalidScheme(format!("missing entry ({i},{j})")))?;
            if w.is_empty() {
                return Err(Error::InvalidScheme(format!("entry ({i},{j}) is empty")));
            }
            if let Some(&l) = w.letters().iter().find(|l| l.index() as usize > n) {
                return Err(Error::BadArity { letter: l, n });
            }
            out.push(w);
        }
        if let Some(&(i, j)) = entries.keys().next() {
            return Err(Error::InvalidScheme(format!(
                "entry ({i},{j}) is not a pair 1 <= i < j <= {n}"
            )));
        }
        Ok(Scheme { n, entries: out })
    }

    /// The family of identification minors `w^(ij)` of a word over `X_n`.
    pub fn from_word(w: &Word, n: usize) -> Result<Scheme> {
        if let Some(&l) = w.letters().iter().find(|l| l.index() as usize > n) {
            return Err(Error::BadArity { letter: l, n });
        }
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        if n < 2 {
            return Err(Error::InvalidScheme(format!(
                "arity must be at least 2, got {n}"
            )));
        }
        let entries = pairs(n).map(|(i, j)| minor(w, i, j)).collect();
        Ok(Scheme { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        assert!(
            1 <= i && i < j && j <= self.n,
            "no pair ({i},{j}) in a {}-scheme",
            self.n
        );
        (i - 1) * self.n - (i - 1) * i / 2 + (j - i - 1)
    }

    /// `w_ij`; `(j, i)` means the same entry as `(i, j)`. Panics on a bad pair.
    pub fn entry(&self, i: usize, j: usize) -> &Word {
        &self.entries[self.index(i, j)]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Word)> {
        pairs(self.n).zip(self.entries.iter())
    }

    /// A copy with one entry replaced.
    pub fn with_entry(&self, i: usize, j: usize, w: Word) -> Result<Scheme> {
        if w.is_empty() {
            return Err(Error::InvalidScheme(format!("entry ({i},{j}) is empty")));
        }
        if let Some(&l) = w.letters().iter().find(|l| l.index() as usize > self.n) {
            return Err(Error::BadArity {
                letter: l,
                n: self.n,
            });
        }
        let mut out = self.clone();
        let idx = out.index(i, j);
        out.entries[idx] = w;
        Ok(out)
    }

    /// The scheme of reversed entries; it is a scheme for the dual variety.
    pub fn reversed(&self) -> Scheme {
        Scheme {
            n: self.n,
            entries: self.entries.iter().map(Word::reverse).collect(),
        }
    }

    /// Every entry has content exactly `X_n \ {x_i}`.
    pub fn is_essential(&self) -> bool {
        self.iter().all(|((i, _), w)| {
            let c = w.content();
            c.len() == self.n - 1
                && !c.contains(&x(i))
                && c.iter().all(|l| (l.index() as usize) <= self.n)
        })
    }

    pub fn from_json(text: &str) -> Result<Scheme> {
        let file: SchemeFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("scheme file: {e}")))?;
        let mut entries = BTreeMap::new();
        for (key, value) in file.entries {
            let (i, j) = parse_pair(&key)?;
            if i >= j {
                return Err(Error::InvalidScheme(format!("key {key:?} must have i < j")));
            }
            entries.insert((i, j), value.parse()?);
        }
        Scheme::new(file.n, entries)
    }

    pub fn to_json(&self) -> String {
        let entries = self
            .iter()
            .map(|((i, j), w)| (format!("{i},{j}"), w.to_tokens()))
            .collect();
        serde_json::to_string_pretty(&SchemeFile { n: self.n, entries }).unwrap()
    }
}

#[derive(Serialize, Deserialize)]
struct SchemeFile {
    n: usize,
    entries: BTreeMap<String, String>,
}

fn parse_pair(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("scheme key {key:?} is not of the form \"i,j\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i = a.trim().parse().map_err(|_| bad())?;
    let j = b.trim().parse().map_err(|_| bad())?;
    Ok((i, j))
}

/// `w^(ij)`: replace `x_i` by `x_j`.
fn minor(w: &Word, i: usize, j: usize) -> Word {
    w.identify(x(i), x(j)).expect("i != j")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Condition {
    Dependency,
    C1,
    C2,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Dependency => "D",
            Condition::C1 => "C1",
            Condition::C2 => "C2",
        })
    }
}

/// A failing instance of a scheme condition: the variety does not satisfy
/// `lhs ≈ rhs`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub condition: Condition,
    pub instance: String,
    pub lhs: Word,
    pub rhs: Word,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} ≈ {}",
            self.condition,
            self.instance,
            self.lhs.to_tokens(),
            self.rhs.to_tokens()
        )
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SchemeReport {
    pub dependency: bool,
    pub c1: bool,
    pub c2: bool,
    pub violations: Vec<Violation>,
}

impl SchemeReport {
    pub fn passed(&self) -> bool {
        self.dependency && self.c1 && self.c2
    }
}

/// Checks (D), (C1) and (C2) of `scheme` over `variety`, collecting every
/// failing instance.
pub fn check_scheme(scheme: &Scheme, variety: &Variety) -> Result<SchemeReport> {
    let n = scheme.n;
    let mut violations = Vec::new();

    let fresh = x(n + 1);
    for ((i, j), w) in scheme.iter() {
        if w.contains(x(i)) {
            let renamed = w.identify(x(i), fresh)?;
            if !variety.satisfies(w, &renamed)? {
                violations.push(Violation {
                    condition: Condition::Dependency,
                    instance: format!("({i},{j}) depends on x{i}"),
                    lhs: w.clone(),
                    rhs: renamed,
                });
            }
        }
    }

    let all: Vec<(usize, usize)> = pairs(n).collect();
    for (a, &(i, j)) in all.iter().enumerate() {
        for &(p, q) in &all[a + 1..] {
            if [p, q].iter().any(|t| *t == i || *t == j) {
                continue;
            }
            let lhs = minor(scheme.entry(i, j), p, q);
            let rhs = minor(scheme.entry(p, q), i, j);
            if !variety.satisfies(&lhs, &rhs)? {
                violations.push(Violation {
                    condition: Condition::C1,
                    instance: format!("w{i}{j}^({p}{q}) vs w{p}{q}^({i}{j})"),
                    lhs,
                    rhs,
                });
            }
        }
    }

    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                let a = minor(scheme.entry(i, j), j, k);
                let b = minor(scheme.entry(j, k), i, k);
                let c = minor(scheme.entry(i, k), j, k);
                if !variety.satisfies(&a, &b)? {
                    violations.push(Violation {
                        condition: Condition::C2,
                        instance: format!("w{i}{j}^({j}{k}) vs w{j}{k}^({i}{k})"),
                        lhs: a.clone(),
                        rhs: b.clone(),
                    });
                }
                if !variety.satisfies(&b, &c)? {
                    violations.push(Violation {
                        condition: Condition::C2,
                        instance: format!("w{j}{k}^({i}{k}) vs w{i}{k}^({j}{k})"),
                        lhs: b,
                        rhs: c,
                    });
                }
            }
        }
    }

    let has = |c: Condition| violations.iter().any(|v| v.condition == c);
    Ok(SchemeReport {
        dependency: !has(Condition::Dependency),
        c1: !has(Condition::C1),
        c2: !has(Condition::C2),
        violations,
    })
}

/// A permutation of `{1..n}` stored as its image sequence `(1π, ..., nπ)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &a in &images {
            if a == 0 || a > n || seen[a] {
                return Err(Error::Parse(format!(
                    "{images:?} is not a permutation of 1..{n}"
                )));
            }
            seen[a] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation((1..=n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `x_{1π} ... x_{nπ}`.
    pub fn word(&self) -> Word {
        Word::from_letters(self.0.iter().map(|&a| x(a)).collect())
    }

    /// `π^(ij)`: replace `i` by `j`, then drop the right one of the two `j`s.
    pub fn minor_sequence(&self, i: usize, j: usize) -> Vec<usize> {
        let mut seen_j = false;
        let mut out = Vec::with_capacity(self.0.len() - 1);
        for &a in &self.0 {
            let a = if a == i { j } else { a };
            if a == j {
                if seen_j {
                    continue;
                }
                seen_j = true;
            }
            out.push(a);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

fn initial_part(w: &Word) -> Vec<usize> {
    let mut seen = Seen::default();
    w.letters()
        .iter()
        .filter(|&&l| seen.insert(l))
        .map(|l| l.index() as usize)
        .collect()
}

/// The unique permutation `π` with `i_2(w_ij) = x_{α_1} ... x_{α_{n-1}}` for
/// `(α) = π^(ij)` and every pair.
///
/// The relative order of two letters `a, b` is read off any entry `w_ij` with
/// `{i, j}` disjoint from `{a, b}`, which leaves both letters and their order
/// untouched; this needs `n >= 4`. Smaller arities are handled by exhaustive
/// search (strict mode rejects them, as uniqueness needs `n >= 5`). Every
/// constraint is verified before returning.
pub fn associated_permutation(scheme: &Scheme, strict: bool) -> Result<Permutation> {
    let n = scheme.n;
    if strict && n < 5 {
        return Err(Error::ArityTooSmall(n));
    }
    if !scheme.is_essential() {
        return Err(Error::NoPermutation("scheme is not essential".into()));
    }
    let parts: Vec<Vec<usize>> = scheme.entries.iter().map(initial_part).collect();
    let candidate = if n >= 4 {
        let mut preceded_by = vec![0usize; n + 1];
        for a in 1..=n {
            for b in a + 1..=n {
                let (i, j) = pairs(n)
                    .find(|&(i, j)| ![i, j].contains(&a) && ![i, j].contains(&b))
                    .unwrap();
                let seq = &parts[scheme.index(i, j)];
                let pa = seq.iter().position(|&c| c == a).unwrap();
                let pb = seq.iter().position(|&c| c == b).unwrap();
                if pa < pb {
                    preceded_by[b] += 1;
                } else {
                    preceded_by[a] += 1;
                }
            }
        }
        let mut images = vec![0; n];
        for (a, &r) in preceded_by.iter().enumerate().skip(1) {
            if images[r] != 0 {
                return Err(Error::NoPermutation(
                    "pairwise order constraints are cyclic".into(),
                ));
            }
            images[r] = a;
        }
        Permutation(images)
    } else {
        all_permutations(n)
            .into_iter()
            .find(|p| mismatches(scheme, &parts, p).is_none())
            .ok_or_else(|| Error::NoPermutation("no permutation fits all entries".into()))?
    };
    if let Some((i, j)) = mismatches(scheme, &parts, &candidate) {
        let expected =
            Word::from_letters(candidate.minor_sequence(i, j).into_iter().map(x).collect());
        return Err(Error::NoPermutation(format!(
            "entry ({i},{j}) has initial part {} but {} requires {}",
            Word::from_letters(parts[scheme.index(i, j)].iter().map(|&a| x(a)).collect())
                .to_tokens(),
            candidate,
            expected.to_tokens()
        )));
    }
    Ok(candidate)
}

fn mismatches(scheme: &Scheme, parts: &[Vec<usize>], p: &Permutation) -> Option<(usize, usize)> {
    pairs(scheme.n).find(|&(i, j)| parts[scheme.index(i, j)] != p.minor_sequence(i, j))
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, out: &mut Vec<Permutation>) {
        if prefix.len() == n {
            out.push(Permutation(prefix.clone()));
            return;
        }
        for a in 1..=n {
            if !used[a] {
                used[a] = true;
                prefix.push(a);
                go(prefix, used, n, out);
                prefix.pop();
                used[a] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n + 1], n, &mut out);
    out
}

/// The scheme `{ s(w_ij) : l ∉ {i, j} }` over `X_n \ {x_l}`, reindexed onto
/// `X_{n-1}` by the order-preserving bijection.
#[derive(Clone, Debug)]
pub struct DerivedScheme {
    pub scheme: Scheme,
    pub removed: Letter,
    /// `letters[k - 1]` is the original letter now called `x_k`.
    pub letters: Vec<Letter>,
}

impl DerivedScheme {
    /// Maps a word over the reindexed alphabet back to the original letters.
    pub fn lift(&self, w: &Word) -> Word {
        w.rename(|l| self.letters[l.index() as usize - 1])
    }
}

pub fn derived_scheme(scheme: &Scheme, l: usize) -> Result<DerivedScheme> {
    let n = scheme.n;
    if n < 3 {
        return Err(Error::InvalidScheme(format!(
            "derived scheme needs arity at least 3, got {n}"
        )));
    }
    if l == 0 || l > n {
        return Err(Error::InvalidScheme(format!("pivot {l} outside 1..{n}")));
    }
    let pivot = x(l);
    let down = |a: usize| if a > l { a - 1 } else { a };
    let mut entries = BTreeMap::new();
    for ((i, j), w) in scheme.iter() {
        if i == l || j == l {
            continue;
        }
        let sigma = w.sigma()?;
        if sigma != pivot {
            return Err(Error::BadPivot {
                i,
                j,
                found: sigma,
                pivot,
            });
        }
        let s = w.s_prefix()?;
        let reindexed = s.rename(|c| x(down(c.index() as usize)));
        entries.insert((down(i), down(j)), reindexed);
    }
    let letters = (1..=n).filter(|&a| a != l).map(x).collect();
    Ok(DerivedScheme {
        scheme: Scheme::new(n - 1, entries)?,
        removed: pivot,
        letters,
    })
}

/// The first pair whose entry is not `variety`-equivalent to the matching
/// minor of `w`: `(i, j, w_ij, w^(ij))`.
pub fn first_mismatch(
    scheme: &Scheme,
    w: &Word,
    variety: &Variety,
) -> Result<Option<(usize, usize, Word, Word)>> {
    for ((i, j), entry) in scheme.iter() {
        let m = minor(w, i, j);
        if m.is_empty() || !variety.satisfies(entry, &m)? {
            return Ok(Some((i, j, entry.clone(), m)));
        }
    }
    Ok(None)
}

/// Whether the scheme comes from `w` over `variety`: `w_ij ≈ w^(ij)` for all pairs.
pub fn comes_from(scheme: &Scheme, w: &Word, variety: &Variety) -> Result<bool> {
    Ok(first_mismatch(scheme, w, variety)?.is_none())
}

/// Finds a word the scheme comes from over `variety`.
///
/// Construction follows the chain induction: for `A_m`/`B_m` with `m >= 3`
/// and `π` the associated permutation, `k = (n-1)π`, `l = nπ`, the result is
/// `s(w_{k'l'}) x_k ũ x_l û` where `û` solves the scheme and `ũ` the derived
/// scheme over the dual of the previous chain member. `LZ` and `B_2` have
/// closed forms, duals go through reversal and joins concatenate the
/// joinands' solutions. The candidate is then verified with [`comes_from`];
/// failure yields [`Error::NoSolution`] carrying the violated identity.
///
/// For the variety of all bands there is no exact construction; candidates
/// solving `B_M ∨ dual B_M` for `M = 2, ..., n + 2` are tried in turn and the
/// first one verified against the free band is returned.
pub fn solve_scheme(scheme: &Scheme, variety: &Variety) -> Result<Word> {
    let mut solver = Solver::default();
    let candidates: Vec<Word> = match variety {
        Variety::AllBands => (2..=scheme.n as u32 + 2)
            .map(|m| solver.join(scheme, &[Atom::b(m), Atom::b(m).dual()]))
            .collect(),
        Variety::Join(atoms) => {
            let atoms: Vec<Atom> = atoms.iter().copied().collect();
            vec![solver.join(scheme, &atoms)]
        }
    };
    let mut first_failure = None;
    for candidate in candidates {
        match first_mismatch(scheme, &candidate, variety)? {
            None => return Ok(candidate),
            Some(failure) => {
                first_failure.get_or_insert(failure);
            }
        }
    }
    let (i, j, entry, minor) = first_failure.expect("at least one candidate");
    Err(Error::NoSolution {
        i,
        j,
        entry,
        minor,
        variety: variety.to_string(),
    })
}

// Construction only; verification happens once, at the top.
#[derive(Default)]
struct Solver {
    memo: HashMap<(Scheme, Atom), Word>,
}

impl Solver {
    fn join(&mut self, scheme: &Scheme, atoms: &[Atom]) -> Word {
        if atoms.is_empty() {
            return best_effort_permutation(scheme).word();
        }
        let mut sorted = atoms.to_vec();
        sorted.sort_by_key(|a| a.solve_order_key());
        sorted
            .iter()
            .fold(Word::empty(), |acc, &a| acc.concat(&self.atom(scheme, a)))
    }

    fn atom(&mut self, scheme: &Scheme, atom: Atom) -> Word {
        if scheme.n == 1 {
            return Word::from_indices([1]);
        }
        let key = (scheme.clone(), atom);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let word = match atom {
            Atom::Trivial | Atom::Semilattice => best_effort_permutation(scheme).word(),
            Atom::Chain {
                side: Side::Right, ..
            } => self.atom(&scheme.reversed(), atom.dual()).reverse(),
            Atom::Chain {
                family: Family::A,
                m: 2,
                ..
            } => left_zero_word(scheme),
            Atom::Chain {
                family: Family::B,
                m: 2,
                ..
            } => best_effort_permutation(scheme).word(),
            Atom::Chain { .. } => self
                .chain_step(scheme, atom)
                .unwrap_or_else(|| best_effort_permutation(scheme).word()),
        };
        self.memo.insert(key, word.clone());
        word
    }

    // s(w_{k'l'}) x_k ũ x_l û
    fn chain_step(&mut self, scheme: &Scheme, atom: Atom) -> Option<Word> {
        let n = scheme.n;
        let pred = atom.dual_predecessor()?;
        let pi = best_effort_permutation(scheme);
        let (k, l) = (pi.images()[n - 2], pi.images()[n - 1]);
        let hat = self.atom(scheme, pred);
        let tilde = if n == 2 {
            Word::from_letters(vec![x(k)])
        } else {
            let derived = derived_scheme(scheme, l).ok()?;
            derived.lift(&self.atom(&derived.scheme, pred))
        };
        let head = scheme.entry(k.min(l), k.max(l)).s_prefix().ok()?;
        Some(head.push(x(k)).concat(&tilde).push(x(l)).concat(&hat))
    }
}

/// The associated permutation when it exists; otherwise a majority-vote
/// order, so construction can proceed and verification reports the failure.
fn best_effort_permutation(scheme: &Scheme) -> Permutation {
    if let Ok(p) = associated_permutation(scheme, false) {
        return p;
    }
    let n = scheme.n;
    let parts: Vec<Vec<usize>> = scheme.entries.iter().map(initial_part).collect();
    if n < 4 {
        return all_permutations(n)
            .into_iter()
            .max_by_key(|p| {
                let fits = pairs(n)
                    .filter(|&(i, j)| parts[scheme.index(i, j)] == p.minor_sequence(i, j))
                    .count();
                // max_by_key keeps the last maximum; prefer lexicographically first
                (fits, std::cmp::Reverse(p.0.clone()))
            })
            .unwrap();
    }
    let mut wins = vec![0i64; n + 1];
    for ((i, j), part) in pairs(n).zip(&parts) {
        for (pa, &a) in part.iter().enumerate() {
            for &b in &part[pa + 1..] {
                if ![i, j].contains(&a) && ![i, j].contains(&b) {
                    wins[a] += 1;
                    wins[b] -= 1;
                }
            }
        }
    }
    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by_key(|&a| (std::cmp::Reverse(wins[a]), a));
    Permutation(order)
}

/// A word whose head matches every entry's head as well as possible, followed
/// by the remaining letters in permutation order.
fn left_zero_word(scheme: &Scheme) -> Word {
    let n = scheme.n;
    let pi = best_effort_permutation(scheme);
    let score = |a: usize| {
        scheme
            .iter()
            .filter(|((i, j), w)| w.first() == Some(x(if a == *i { *j } else { a })))
            .count()
    };
    let mut best = pi.images()[0];
    for a in 1..=n {
        if score(a) > score(best) {
            best = a;
        }
    }
    let mut letters = vec![x(best)];
    letters.extend(pi.images().iter().filter(|&&a| a != best).map(|&a| x(a)));
    Word::from_letters(letters)
}
