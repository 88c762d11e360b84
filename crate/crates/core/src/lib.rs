//! Canonical forms and identity deciders for varieties of bands, n-schemes of
//! words with a constructive solver, and finite bands as a brute-force oracle.
//!
//! ```
//! use bandkit::{Variety, Word};
//!
//! let u: Word = "xyxzx".parse().unwrap();
//! let v: Word = "xyzx".parse().unwrap();
//! let regular: Variety = "B2+B2~".parse().unwrap();
//! assert!(regular.satisfies(&u, &v).unwrap());
//! assert!(!"A3".parse::<Variety>().unwrap().satisfies(&u, &v).unwrap());
//! ```

pub mod canonical;
pub mod error;
pub mod finite;
pub mod scheme;
pub mod variety;
pub mod word;

pub use canonical::{b_canonical, band_satisfies};
pub use error::{Error, Result};
pub use finite::{Budget, FiniteBand, FreeBand, WordOperation};
pub use scheme::{
    associated_permutation, check_scheme, comes_from, derived_scheme, solve_scheme, Permutation,
    Scheme, SchemeReport,
};
pub use variety::{Atom, Family, InvariantValue, Side, Variety};
pub use word::{Letter, Syntax, Word};
