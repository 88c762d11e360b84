//! The lattice of band varieties and its identity deciders.
//!
//! Every proper band variety handled here is a join of irreducible atoms:
//! the semilattices `SL`, and the two chains `A_m`, `B_m` (m >= 2) together
//! with their left-right duals, where `A_2 = LZ` and its dual is `RZ`.
//! Identities of `A_m` are decided by the word function `h_m`, those of `B_m`
//! by `i_m`; duals use the mirrored functions. An identity holds in a join
//! iff it holds in every joinand, so the invariant of a join is the tuple of
//! its atoms' invariants.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::canonical::{b_letters, CanonicalConfig};
use crate::error::{Error, Result};
use crate::word::{split_e, split_s, Letter, Seen, Syntax, Word};

/// Which irreducible chain an atom belongs to: `A` is decided by `h_m`,
/// `B` by `i_m`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Family {
    A,
    B,
}

/// Left atoms are `A_m`, `B_m`; right atoms are their mirror duals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Atom {
    Trivial,
    Semilattice,
    Chain { family: Family, m: u32, side: Side },
}

impl Atom {
    pub fn chain(family: Family, m: u32, side: Side) -> Result<Atom> {
        if m < 2 {
            return Err(Error::BadIndex(m));
        }
        Ok(Atom::Chain { family, m, side })
    }

    pub fn left_zero() -> Atom {
        Atom::Chain {
            family: Family::A,
            m: 2,
            side: Side::Left,
        }
    }

    pub fn right_zero() -> Atom {
        Atom::left_zero().dual()
    }

    /// `A_m`. Panics if `m < 2`.
    pub fn a(m: u32) -> Atom {
        Atom::chain(Family::A, m, Side::Left).expect("m >= 2")
    }

    /// `B_m`. Panics if `m < 2`.
    pub fn b(m: u32) -> Atom {
        Atom::chain(Family::B, m, Side::Left).expect("m >= 2")
    }

    pub fn dual(self) -> Atom {
        match self {
            Atom::Chain { family, m, side } => Atom::Chain {
                family,
                m,
                side: side.flip(),
            },
            other => other,
        }
    }

    /// Height along its chain: `A_2, B_2, A_3, B_3, ...` get `1, 2, 3, 4, ...`.
    pub fn level(self) -> Option<u32> {
        match self {
            Atom::Chain {
                family: Family::A,
                m,
                ..
            } => Some(2 * m - 3),
            Atom::Chain {
                family: Family::B,
                m,
                ..
            } => Some(2 * m - 2),
            _ => None,
        }
    }

    pub fn side(self) -> Option<Side> {
        match self {
            Atom::Chain { side, .. } => Some(side),
            _ => None,
        }
    }

    /// The atom one step down the chain on the opposite side: the variety the
    /// scheme solver recurses into (`A_m -> dual A_{m-1}`, `B_m -> dual B_{m-1}`).
    pub fn dual_predecessor(self) -> Option<Atom> {
        match self {
            Atom::Chain { family, m, side } if m >= 3 => Some(Atom::Chain {
                family,
                m: m - 1,
                side: side.flip(),
            }),
            _ => None,
        }
    }

    /// The order of the lattice restricted to atoms.
    ///
    /// Along one side the chain is `A_2 < B_2 < A_3 < B_3 < ...`. Across sides
    /// an atom of level `d` lies below one of level `l` iff `d <= l - 2`, i.e.
    /// `A_m` is above dual `A_{m-1}` and `B_m` above dual `B_{m-1}`.
    /// Semilattices lie below every chain atom from `B_2` up.
    pub fn leq(self, other: Atom) -> bool {
        match (self, other) {
            (Atom::Trivial, _) => true,
            (_, Atom::Trivial) => false,
            (Atom::Semilattice, Atom::Semilattice) => true,
            (Atom::Semilattice, b) => b.level().unwrap() >= 2,
            (Atom::Chain { .. }, Atom::Semilattice) => false,
            (a, b) => {
                let (la, lb) = (a.level().unwrap(), b.level().unwrap());
                if a.side() == b.side() {
                    la <= lb
                } else {
                    la + 2 <= lb
                }
            }
        }
    }

    /// Order used when concatenating per-atom scheme solutions: left chain
    /// atoms by level, then semilattice/trivial, then right chain atoms.
    pub(crate) fn solve_order_key(self) -> (u8, u32) {
        match self {
            Atom::Chain {
                side: Side::Left, ..
            } => (0, self.level().unwrap()),
            Atom::Semilattice => (1, 0),
            Atom::Trivial => (1, 1),
            Atom::Chain {
                side: Side::Right, ..
            } => (2, self.level().unwrap()),
        }
    }

    /// The invariant word of `w` for this atom. `w` must be nonempty.
    pub fn invariant_word(self, w: &Word) -> Result<Word> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(match self {
            Atom::Trivial => Word::empty(),
            Atom::Semilattice => Word::from_letters(w.content().into_iter().collect()),
            Atom::Chain { family, m, side } => {
                let mut out = Vec::new();
                chain_into(family, m, side, w.letters(), &mut out);
                Word::from_letters(out)
            }
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::Trivial => f.write_str("T"),
            Atom::Semilattice => f.write_str("SL"),
            Atom::Chain {
                family: Family::A,
                m: 2,
                side,
            } => f.write_str(if side == Side::Left { "LZ" } else { "RZ" }),
            Atom::Chain { family, m, side } => {
                let fam = if family == Family::A { 'A' } else { 'B' };
                let tilde = if side == Side::Right { "~" } else { "" };
                write!(f, "{fam}{m}{tilde}")
            }
        }
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(text: &str) -> Result<Atom> {
        let text = text.trim();
        let (body, side) = match text.strip_suffix('~') {
            Some(b) => (b, Side::Right),
            None => (text, Side::Left),
        };
        let atom = match body {
            "T" => Atom::Trivial,
            "SL" => Atom::Semilattice,
            "LZ" => Atom::left_zero(),
            "RZ" => Atom::right_zero(),
            _ => {
                let mut chars = body.chars();
                let family = match chars.next() {
                    Some('A') => Family::A,
                    Some('B') => Family::B,
                    _ => return Err(Error::Parse(format!("unknown variety atom {text:?}"))),
                };
                let digits = chars.as_str();
                if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                    return Err(Error::Parse(format!("unknown variety atom {text:?}")));
                }
                let m: u32 = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("index too large in {text:?}")))?;
                Atom::chain(family, m, Side::Left)?
            }
        };
        Ok(if side == Side::Right {
            atom.dual()
        } else {
            atom
        })
    }
}

/// A band variety: a join of atoms (kept as an antichain), or the variety of
/// all bands.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Variety {
    Join(BTreeSet<Atom>),
    AllBands,
}

impl Variety {
    pub fn trivial() -> Variety {
        Variety::Join(BTreeSet::new())
    }

    pub fn atom(a: Atom) -> Variety {
        Variety::join_of([a])
    }

    /// The join of the given atoms, normalized to an antichain.
    pub fn join_of<I: IntoIterator<Item = Atom>>(atoms: I) -> Variety {
        let all: Vec<Atom> = atoms.into_iter().filter(|a| *a != Atom::Trivial).collect();
        let kept = all
            .iter()
            .copied()
            .filter(|&a| !all.iter().any(|&b| b != a && a.leq(b)))
            .collect();
        Variety::Join(kept)
    }

    /// The atoms of the join; `None` for the variety of all bands.
    pub fn atoms(&self) -> Option<&BTreeSet<Atom>> {
        match self {
            Variety::Join(a) => Some(a),
            Variety::AllBands => None,
        }
    }

    pub fn join(&self, other: &Variety) -> Variety {
        match (self, other) {
            (Variety::Join(a), Variety::Join(b)) => Variety::join_of(a.iter().chain(b).copied()),
            _ => Variety::AllBands,
        }
    }

    pub fn dual(&self) -> Variety {
        match self {
            Variety::Join(a) => Variety::Join(a.iter().map(|x| x.dual()).collect()),
            Variety::AllBands => Variety::AllBands,
        }
    }

    /// Inclusion of varieties. Atoms are join-prime, so an atom lies below a
    /// join iff it lies below one of the joinands.
    pub fn leq(&self, other: &Variety) -> bool {
        match (self, other) {
            (_, Variety::AllBands) => true,
            (Variety::AllBands, Variety::Join(_)) => false,
            (Variety::Join(a), Variety::Join(b)) => a.iter().all(|&x| b.iter().any(|&y| x.leq(y))),
        }
    }

    /// The complete invariant of `w` in this variety.
    pub fn invariant(&self, w: &Word) -> Result<InvariantValue> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        match self {
            Variety::AllBands => {
                CanonicalConfig::default().check(w)?;
                Ok(InvariantValue {
                    parts: vec![(
                        "BAND".to_string(),
                        Word::from_letters(b_letters(w.letters())),
                    )],
                })
            }
            Variety::Join(atoms) => {
                let parts = atoms
                    .iter()
                    .map(|a| Ok((a.to_string(), a.invariant_word(w)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(InvariantValue { parts })
            }
        }
    }

    /// Decides whether the identity `u ≈ v` holds in this variety.
    pub fn satisfies(&self, u: &Word, v: &Word) -> Result<bool> {
        if u.is_empty() || v.is_empty() {
            return Err(Error::EmptyWord);
        }
        match self {
            Variety::AllBands => crate::canonical::band_satisfies(u, v),
            Variety::Join(atoms) => {
                for a in atoms {
                    if a.invariant_word(u)? != a.invariant_word(v)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Whether the word operation of `w` depends on `letter` in this variety:
    /// the identity `w ≈ w[letter := fresh]` fails, `fresh` being a letter
    /// outside the content of `w`.
    pub fn depends_on(&self, w: &Word, letter: Letter) -> Result<bool> {
        if !w.contains(letter) {
            return Ok(false);
        }
        let fresh = Letter::x(w.max_index() + 1);
        let renamed = w.identify(letter, fresh)?;
        Ok(!self.satisfies(w, &renamed)?)
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variety::AllBands => f.write_str("BAND"),
            Variety::Join(atoms) if atoms.is_empty() => f.write_str("T"),
            Variety::Join(atoms) => {
                let names: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
                f.write_str(&names.join("+"))
            }
        }
    }
}

impl FromStr for Variety {
    type Err = Error;

    fn from_str(text: &str) -> Result<Variety> {
        let mut atoms = Vec::new();
        for part in text.split('+') {
            let part = part.trim();
            if part == "BAND" {
                return Ok(Variety::AllBands);
            }
            if part.is_empty() {
                return Err(Error::Parse(format!("empty joinand in {text:?}")));
            }
            atoms.push(part.parse()?);
        }
        Ok(Variety::join_of(atoms))
    }
}

/// Canonical invariant of a word in a variety: one tagged word per atom.
/// Two words have equal invariants iff the variety satisfies their identity.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct InvariantValue {
    parts: Vec<(String, Word)>,
}

impl InvariantValue {
    pub fn parts(&self) -> &[(String, Word)] {
        &self.parts
    }

    /// Untagged rendering: the invariant words joined by `|`; `()` for the
    /// trivial variety.
    pub fn render(&self, syntax: Syntax) -> String {
        if self.parts.is_empty() {
            return "()".to_string();
        }
        let words: Vec<String> = self.parts.iter().map(|(_, w)| w.render(syntax)).collect();
        words.join("|")
    }
}

impl fmt::Display for InvariantValue {
    /// Tagged encoding, e.g. `A3:x1 x1 x2 x1;B2~:x2 x1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("T:()");
        }
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|(tag, w)| format!("{tag}:{}", w.to_tokens()))
            .collect();
        f.write_str(&parts.join(";"))
    }
}

/// `h_m(w)`, deciding identities of `A_m`.
pub fn h(w: &Word, m: u32) -> Result<Word> {
    chain_word(Family::A, m, Side::Left, w)
}

/// `i_m(w)`, deciding identities of `B_m`.
pub fn i(w: &Word, m: u32) -> Result<Word> {
    chain_word(Family::B, m, Side::Left, w)
}

/// The mirror of `h_m`: `reverse(h_m(reverse(w)))`.
pub fn h_dual(w: &Word, m: u32) -> Result<Word> {
    chain_word(Family::A, m, Side::Right, w)
}

/// The mirror of `i_m`: `reverse(i_m(reverse(w)))`.
pub fn i_dual(w: &Word, m: u32) -> Result<Word> {
    chain_word(Family::B, m, Side::Right, w)
}

/// `t_m(w)` for the chosen family and side; `t_m(∅) = ∅`.
pub fn chain_word(family: Family, m: u32, side: Side, w: &Word) -> Result<Word> {
    if m < 2 {
        return Err(Error::BadIndex(m));
    }
    let mut out = Vec::new();
    chain_into(family, m, side, w.letters(), &mut out);
    Ok(Word::from_letters(out))
}

// Left:  t_m(w)  = t_m(s(w)) σ(w) t̄_{m-1}(w)
// Right: t̄_m(w) = t_{m-1}(w) ε(w) t̄_m(e(w))
fn chain_into(family: Family, m: u32, side: Side, w: &[Letter], out: &mut Vec<Letter>) {
    if w.is_empty() {
        return;
    }
    if m == 2 {
        match (family, side) {
            (Family::A, Side::Left) => out.push(w[0]),
            (Family::A, Side::Right) => out.push(w[w.len() - 1]),
            (Family::B, Side::Left) => {
                let mut seen = Seen::default();
                out.extend(w.iter().copied().filter(|&l| seen.insert(l)));
            }
            (Family::B, Side::Right) => {
                let mut seen = Seen::default();
                let start = out.len();
                out.extend(w.iter().rev().copied().filter(|&l| seen.insert(l)));
                out[start..].reverse();
            }
        }
        return;
    }
    match side {
        Side::Left => {
            let sp = split_s(w).unwrap();
            chain_into(family, m, Side::Left, &w[..sp], out);
            out.push(w[sp]);
            chain_into(family, m - 1, Side::Right, w, out);
        }
        Side::Right => {
            let ep = split_e(w).unwrap();
            chain_into(family, m - 1, Side::Left, w, out);
            out.push(w[ep]);
            chain_into(family, m, Side::Right, &w[ep + 1..], out);
        }
    }
}
