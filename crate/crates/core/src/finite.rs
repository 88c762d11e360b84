//! Finite bands as Cayley tables.
//!
//! This is the brute-force side of the library: words are evaluated in
//! concrete bands, n-ary word operations are tabulated exhaustively, and
//! relatively free bands are built by closure over canonical invariants.
//! Everything here is independent of the symbolic deciders except
//! [`free_band`], which uses them only to identify elements.
//!
//! Operation tables are flat arrays indexed by tuples in mixed radix with the
//! first argument most significant.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::variety::{InvariantValue, Variety};
use crate::word::{Letter, Syntax, Word};

pub const DEFAULT_TABLE_CELLS: u128 = 10_000_000;
pub const DEFAULT_CLOSURE_ELEMENTS: u128 = 1_000_000;
pub const DEFAULT_ASSIGNMENTS: u128 = 1_000_000;

/// Limits on the exhaustive computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Cells of a single table: `size^n` for an operation, `size^2` for a band.
    pub table_cells: u128,
    /// Elements of a free-band closure, or operations in a clone closure.
    pub closure_elements: u128,
    /// Assignments tried by [`satisfies_by_evaluation`].
    pub assignments: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            table_cells: DEFAULT_TABLE_CELLS,
            closure_elements: DEFAULT_CLOSURE_ELEMENTS,
            assignments: DEFAULT_ASSIGNMENTS,
        }
    }
}

impl Budget {
    /// The same limit for every kind of work.
    pub fn uniform(limit: u128) -> Budget {
        Budget {
            table_cells: limit,
            closure_elements: limit,
            assignments: limit,
        }
    }

    pub fn unlimited() -> Budget {
        Budget::uniform(u128::MAX)
    }
}

fn require(what: &'static str, needed: u128, limit: u128) -> Result<()> {
    if needed > limit {
        Err(Error::BudgetExceeded {
            what,
            needed,
            limit,
        })
    } else {
        Ok(())
    }
}

fn power(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// A validated finite band.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteBand {
    size: usize,
    table: Vec<usize>,
    names: Vec<String>,
    provenance: Option<String>,
}

/// Validates a Cayley table: square, in range, idempotent and associative.
pub fn make_band(table: Vec<Vec<usize>>) -> Result<FiniteBand> {
    let size = table.len();
    if size == 0 {
        return Err(Error::InvalidTable(
            "a band needs at least one element".into(),
        ));
    }
    let mut flat = Vec::with_capacity(size * size);
    for (a, row) in table.iter().enumerate() {
        if row.len() != size {
            return Err(Error::InvalidTable(format!(
                "row {a} has {} entries, expected {size}",
                row.len()
            )));
        }
        if let Some(&bad) = row.iter().find(|&&c| c >= size) {
            return Err(Error::InvalidTable(format!(
                "row {a} contains {bad}, outside 0..{size}"
            )));
        }
        flat.extend_from_slice(row);
    }
    let band = FiniteBand {
        size,
        table: flat,
        names: default_names(size),
        provenance: None,
    };
    band.validate()?;
    Ok(band)
}

fn default_names(size: usize) -> Vec<String> {
    (0..size).map(|a| a.to_string()).collect()
}

impl FiniteBand {
    fn validate(&self) -> Result<()> {
        if let Some(a) = (0..self.size).find(|&a| self.mul(a, a) != a) {
            return Err(Error::NotIdempotent { a });
        }
        for a in 0..self.size {
            for b in 0..self.size {
                let ab = self.mul(a, b);
                for c in 0..self.size {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(())
    }

    fn built(size: usize, table: Vec<usize>, names: Vec<String>, provenance: String) -> Self {
        FiniteBand {
            size,
            table,
            names,
            provenance: Some(provenance),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.size)
            .map(<[usize]>::to_vec)
            .collect()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.size {
            return Err(Error::InvalidTable(format!(
                "{} names for {} elements",
                names.len(),
                self.size
            )));
        }
        self.names = names;
        Ok(self)
    }

    /// Index of the element with this name.
    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn from_json(text: &str) -> Result<FiniteBand> {
        let file: BandFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("band file: {e}")))?;
        if let Some(size) = file.size {
            if size != file.table.len() {
                return Err(Error::InvalidTable(format!(
                    "size is {size} but the table has {} rows",
                    file.table.len()
                )));
            }
        }
        let band = make_band(file.table)?;
        match file.names {
            Some(names) => band.with_names(names),
            None => Ok(band),
        }
    }

    pub fn to_json(&self) -> String {
        let file = BandFile {
            size: Some(self.size),
            table: self.rows(),
            names: Some(self.names.clone()),
        };
        serde_json::to_string(&file).unwrap()
    }
}

impl fmt::Display for FiniteBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.names.iter().map(String::len).max().unwrap_or(1);
        write!(f, "{:>width$} |", "")?;
        for n in &self.names {
            write!(f, " {n:>width$}")?;
        }
        for (a, row) in self.table.chunks(self.size).enumerate() {
            write!(f, "\n{:>width$} |", self.names[a])?;
            for &c in row {
                write!(f, " {:>width$}", self.names[c])?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct BandFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    size: Option<usize>,
    table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

/// The `k`-element band with `ab = a`.
pub fn left_zero(k: usize) -> FiniteBand {
    assert!(k >= 1, "a band needs at least one element");
    let table = (0..k).flat_map(|a| std::iter::repeat_n(a, k)).collect();
    FiniteBand::built(k, table, default_names(k), format!("left_zero({k})"))
}

/// The `k`-element band with `ab = b`.
pub fn right_zero(k: usize) -> FiniteBand {
    assert!(k >= 1, "a band needs at least one element");
    let table = (0..k).flat_map(|_| 0..k).collect();
    FiniteBand::built(k, table, default_names(k), format!("right_zero({k})"))
}

/// `{0, 1}` under logical AND.
pub fn and_semilattice() -> FiniteBand {
    FiniteBand::built(
        2,
        vec![0, 0, 0, 1],
        default_names(2),
        "and_semilattice".into(),
    )
}

/// `S` with a new identity element at index 0, named `1`.
pub fn adjoin_identity(s: &FiniteBand) -> FiniteBand {
    let n = s.size + 1;
    let mut table = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            table[a * n + b] = match (a, b) {
                (0, b) => b,
                (a, 0) => a,
                (a, b) => s.mul(a - 1, b - 1) + 1,
            };
        }
    }
    let mut names = vec!["1".to_string()];
    names.extend(s.names.iter().cloned());
    if s.names.iter().any(|x| x == "1") {
        // keep names unique: shifted default names would clash with the identity
        names = std::iter::once("1".to_string())
            .chain(s.names.iter().map(|x| format!("{x}'")))
            .collect();
    }
    FiniteBand::built(n, table, names, format!("adjoin_identity({})", s.label()))
}

/// The product band on pairs, pair `(a, b)` at index `a * |T| + b`.
pub fn direct_product(s: &FiniteBand, t: &FiniteBand) -> FiniteBand {
    let n = s.size * t.size;
    let mut table = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let (a1, a2) = (a / t.size, a % t.size);
            let (b1, b2) = (b / t.size, b % t.size);
            table[a * n + b] = s.mul(a1, b1) * t.size + t.mul(a2, b2);
        }
    }
    let names = (0..n)
        .map(|a| format!("({},{})", s.names[a / t.size], t.names[a % t.size]))
        .collect();
    FiniteBand::built(
        n,
        table,
        names,
        format!("direct_product({}, {})", s.label(), t.label()),
    )
}

/// The same elements with multiplication reversed.
pub fn dual_band(s: &FiniteBand) -> FiniteBand {
    let n = s.size;
    let table = (0..n * n).map(|ab| s.mul(ab % n, ab / n)).collect();
    FiniteBand::built(n, table, s.names.clone(), format!("dual({})", s.label()))
}

impl FiniteBand {
    fn label(&self) -> String {
        self.provenance
            .clone()
            .unwrap_or_else(|| format!("band of size {}", self.size))
    }
}

/// A relatively free band together with a representative word per element.
#[derive(Clone, Debug)]
pub struct FreeBand {
    pub band: FiniteBand,
    pub representatives: Vec<Word>,
    /// `generators[i - 1]` is the class of `x_i`.
    pub generators: Vec<usize>,
}

impl FreeBand {
    /// The element represented by `w`, with `x_i` mapped to its class.
    pub fn element_of(&self, w: &Word) -> Result<usize> {
        let assignment = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, &e)| (Letter::x(i as u32 + 1), e))
            .collect();
        eval_word(&self.band, w, &assignment)
    }
}

struct Closure {
    representatives: Vec<Word>,
    generators: Vec<usize>,
    // right[e][g] = e * x_{g+1}
    right: Vec<Vec<usize>>,
}

fn closure(variety: &Variety, k: usize, budget: &Budget) -> Result<Closure> {
    if k == 0 {
        return Err(Error::InvalidTable(
            "a free band needs at least one generator".into(),
        ));
    }
    let mut index: HashMap<InvariantValue, usize> = HashMap::new();
    let mut representatives = Vec::new();
    let mut generators = Vec::with_capacity(k);
    for i in 1..=k as u32 {
        let g = Word::from_indices([i]);
        let key = variety.invariant(&g)?;
        let e = *index.entry(key).or_insert_with(|| {
            representatives.push(g);
            representatives.len() - 1
        });
        generators.push(e);
    }
    let mut right = Vec::new();
    let mut next = 0;
    while next < representatives.len() {
        let mut row = Vec::with_capacity(k);
        for i in 1..=k as u32 {
            let product = representatives[next].push(Letter::x(i));
            let key = variety.invariant(&product)?;
            let target = match index.get(&key) {
                Some(&e) => e,
                None => {
                    let e = representatives.len();
                    require("free band elements", e as u128 + 1, budget.closure_elements)?;
                    index.insert(key, e);
                    representatives.push(product);
                    e
                }
            };
            row.push(target);
        }
        right.push(row);
        next += 1;
    }
    Ok(Closure {
        representatives,
        generators,
        right,
    })
}

/// The free band on `k` generators in `variety`, with its full Cayley table.
///
/// Elements are discovered by closing the generators under right
/// multiplication, two words being identified when their invariants agree.
/// `free_band(V, j)` generates `V` once `j` is at least the number of
/// variables in a defining identity basis of `V`.
pub fn free_band(variety: &Variety, k: usize, budget: &Budget) -> Result<FreeBand> {
    let Closure {
        representatives,
        generators,
        right,
    } = closure(variety, k, budget)?;
    let n = representatives.len();
    require(
        "band table cells",
        (n as u128) * (n as u128),
        budget.table_cells,
    )?;
    let mut table = vec![0; n * n];
    for a in 0..n {
        for (b, rep) in representatives.iter().enumerate() {
            table[a * n + b] = rep
                .letters()
                .iter()
                .fold(a, |acc, l| right[acc][l.index() as usize - 1]);
        }
    }
    let syntax = if k <= 26 {
        Syntax::Letters
    } else {
        Syntax::Tokens
    };
    let names = representatives.iter().map(|w| w.render(syntax)).collect();
    let band = FiniteBand::built(n, table, names, format!("free_band({variety}, {k})"));
    Ok(FreeBand {
        band,
        representatives,
        generators,
    })
}

/// The number of elements of the free band on `k` generators, without
/// building its table.
pub fn free_band_size(variety: &Variety, k: usize, budget: &Budget) -> Result<usize> {
    Ok(closure(variety, k, budget)?.representatives.len())
}

/// Evaluates `w` in `band` under `assignment`, folding left to right.
pub fn eval_word(
    band: &FiniteBand,
    w: &Word,
    assignment: &BTreeMap<Letter, usize>,
) -> Result<usize> {
    let value = |l: &Letter| -> Result<usize> {
        let e = *assignment.get(l).ok_or(Error::MissingAssignment(*l))?;
        if e >= band.size {
            return Err(Error::InvalidTable(format!(
                "letter {l} assigned {e}, outside 0..{}",
                band.size
            )));
        }
        Ok(e)
    };
    let (first, rest) = w.letters().split_first().ok_or(Error::EmptyWord)?;
    rest.iter()
        .try_fold(value(first)?, |acc, l| Ok(band.mul(acc, value(l)?)))
}

/// An `n`-ary operation on a finite band, tabulated over all of `S^n`.
#[derive(Clone, Debug)]
pub struct WordOperation<'a> {
    band: &'a FiniteBand,
    arity: usize,
    values: Vec<usize>,
    witness: Option<Word>,
}

impl PartialEq for WordOperation<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.band == other.band && self.arity == other.arity && self.values == other.values
    }
}

impl<'a> WordOperation<'a> {
    /// An operation from raw values; no witness.
    pub fn from_values(band: &'a FiniteBand, arity: usize, values: Vec<usize>) -> Result<Self> {
        let cells = power(band.size, arity);
        if cells != values.len() as u128 {
            return Err(Error::InvalidTable(format!(
                "an operation of arity {arity} on {} elements has {cells} values, got {}",
                band.size,
                values.len()
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= band.size) {
            return Err(Error::InvalidTable(format!(
                "value {bad} outside 0..{}",
                band.size
            )));
        }
        Ok(WordOperation {
            band,
            arity,
            values,
            witness: None,
        })
    }

    pub fn band(&self) -> &FiniteBand {
        self.band
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn witness(&self) -> Option<&Word> {
        self.witness.as_ref()
    }

    /// `f(args)`.
    pub fn apply(&self, args: &[usize]) -> usize {
        assert_eq!(args.len(), self.arity);
        let idx = args.iter().fold(0, |acc, &a| acc * self.band.size + a);
        self.values[idx]
    }

    pub fn from_json(band: &'a FiniteBand, text: &str) -> Result<Self> {
        let file: OperationFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("operation file: {e}")))?;
        WordOperation::from_values(band, file.arity, file.values)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&OperationFile {
            arity: self.arity,
            values: self.values.clone(),
        })
        .unwrap()
    }
}

#[derive(Serialize, Deserialize)]
struct OperationFile {
    arity: usize,
    values: Vec<usize>,
}

fn digits(mut idx: usize, size: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = idx % size;
        idx /= size;
    }
}

/// The operation `(a_1, ..., a_n) ↦ w(a_1, ..., a_n)` on `band`.
pub fn word_operation<'a>(
    band: &'a FiniteBand,
    w: &Word,
    n: usize,
    budget: &Budget,
) -> Result<WordOperation<'a>> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if let Some(&l) = w.letters().iter().find(|l| l.index() as usize > n) {
        return Err(Error::BadArity { letter: l, n });
    }
    let cells = power(band.size, n);
    require("operation table cells", cells, budget.table_cells)?;
    let slots: Vec<usize> = w.letters().iter().map(|l| l.index() as usize - 1).collect();
    let mut args = vec![0; n];
    let values = (0..cells as usize)
        .map(|idx| {
            digits(idx, band.size, &mut args);
            slots[1..]
                .iter()
                .fold(args[slots[0]], |acc, &s| band.mul(acc, args[s]))
        })
        .collect();
    Ok(WordOperation {
        band,
        arity: n,
        values,
        witness: Some(w.clone()),
    })
}

fn check_coordinate(f: &WordOperation<'_>, i: usize) -> Result<()> {
    if i == 0 || i > f.arity {
        return Err(Error::BadCoordinate {
            i,
            j: i,
            arity: f.arity,
        });
    }
    Ok(())
}

/// `f_ij`: the operation reading argument `j` in place of argument `i`.
pub fn minor<'a>(f: &WordOperation<'a>, i: usize, j: usize) -> Result<WordOperation<'a>> {
    if i == 0 || i >= j || j > f.arity {
        return Err(Error::BadCoordinate {
            i,
            j,
            arity: f.arity,
        });
    }
    let size = f.band.size;
    let weight_i = power(size, f.arity - i) as usize;
    let weight_j = power(size, f.arity - j) as usize;
    let values = (0..f.values.len())
        .map(|idx| {
            let ai = (idx / weight_i) % size;
            let aj = (idx / weight_j) % size;
            f.values[idx - ai * weight_i + aj * weight_i]
        })
        .collect();
    let witness = f
        .witness
        .as_ref()
        .map(|w| w.identify(Letter::x(i as u32), Letter::x(j as u32)))
        .transpose()?;
    Ok(WordOperation {
        band: f.band,
        arity: f.arity,
        values,
        witness,
    })
}

/// Whether some two argument tuples differing only in slot `i` give
/// different values.
pub fn depends_on(f: &WordOperation<'_>, i: usize) -> Result<bool> {
    check_coordinate(f, i)?;
    let size = f.band.size;
    let weight = power(size, f.arity - i) as usize;
    Ok((0..f.values.len())
        .filter(|idx| (idx / weight).is_multiple_of(size))
        .any(|base| (1..size).any(|a| f.values[base + a * weight] != f.values[base])))
}

/// Every `n`-ary operation induced by a word on `band`, each with a witness.
///
/// Breadth-first closure of the projections under right multiplication by
/// projections, deduplicated on the full value table. Witnesses are
/// shortest words.
pub fn enumerate_word_operations<'a>(
    band: &'a FiniteBand,
    n: usize,
    budget: &Budget,
) -> Result<Vec<WordOperation<'a>>> {
    if n == 0 {
        return Err(Error::BadArity {
            letter: Letter::x(1),
            n,
        });
    }
    let projections: Vec<WordOperation<'a>> = (1..=n as u32)
        .map(|i| word_operation(band, &Word::from_indices([i]), n, budget))
        .collect::<Result<_>>()?;
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut ops: Vec<WordOperation<'a>> = Vec::new();
    for p in &projections {
        if !seen.contains_key(&p.values) {
            seen.insert(p.values.clone(), ops.len());
            ops.push(p.clone());
        }
    }
    let mut next = 0;
    while next < ops.len() {
        for (i, p) in projections.iter().enumerate() {
            let values: Vec<usize> = ops[next]
                .values
                .iter()
                .zip(&p.values)
                .map(|(&a, &b)| band.mul(a, b))
                .collect();
            if seen.contains_key(&values) {
                continue;
            }
            require(
                "word operations",
                ops.len() as u128 + 1,
                budget.closure_elements,
            )?;
            let witness = ops[next]
                .witness
                .as_ref()
                .map(|w| w.push(Letter::x(i as u32 + 1)));
            seen.insert(values.clone(), ops.len());
            ops.push(WordOperation {
                band,
                arity: n,
                values,
                witness,
            });
        }
        next += 1;
    }
    Ok(ops)
}

/// A word inducing `f`, if there is one.
pub fn induced_by_word(
    band: &FiniteBand,
    f: &WordOperation<'_>,
    budget: &Budget,
) -> Result<Option<Word>> {
    if f.band != band {
        return Err(Error::InvalidTable(
            "operation belongs to a different band".into(),
        ));
    }
    Ok(enumerate_word_operations(band, f.arity, budget)?
        .into_iter()
        .find(|g| g.values == f.values)
        .and_then(|g| g.witness))
}

/// Whether `u ≈ v` holds in `band`, by trying every assignment of the
/// letters of `u` and `v`.
pub fn satisfies_by_evaluation(
    band: &FiniteBand,
    u: &Word,
    v: &Word,
    budget: &Budget,
) -> Result<bool> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::EmptyWord);
    }
    let letters: Vec<Letter> = u.content().union(&v.content()).copied().collect();
    let total = power(band.size, letters.len());
    require("assignments", total, budget.assignments)?;
    let slot = |w: &Word| -> Vec<usize> {
        w.letters()
            .iter()
            .map(|l| letters.binary_search(l).unwrap())
            .collect()
    };
    let (us, vs) = (slot(u), slot(v));
    let eval = |slots: &[usize], args: &[usize]| {
        slots[1..]
            .iter()
            .fold(args[slots[0]], |acc, &s| band.mul(acc, args[s]))
    };
    let mut args = vec![0; letters.len()];
    for idx in 0..total as usize {
        digits(idx, band.size, &mut args);
        if eval(&us, &args) != eval(&vs, &args) {
            return Ok(false);
        }
    }
    Ok(true)
}
