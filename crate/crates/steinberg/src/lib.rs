//! Exact computations in the permutation module `k[G/B]` for finite groups
//! with a split BN-pair, instantiated for `GL_n(q)` and `SL_2(q)`.
//!
//! The toolkit builds, over a finite coefficient field `k = F_{l^m}` with
//! `l != p`:
//!
//! * the permutation module `k[G/B]` with its `G`-invariant bilinear form,
//! * the Steinberg submodule (alternating sum of Weyl translates of the
//!   base coset, spun under the unipotent radical),
//! * the Gelfand-Graev submodules attached to regular characters of the
//!   unipotent radical, and
//! * the dimension of the distinguished composition factor of the Steinberg
//!   module, computed as the rank of a bilinear pairing.
//!
//! Everything is exact: finite-field arithmetic on integer encodings,
//! deterministic echelon forms, reproducible enumeration orders.  The
//! [`gg::verify_suite`] entry point runs the full battery of internal
//! consistency checks and returns a [`report::FactorReport`].
//!
//! See the accompanying book (`book/` in the repository) for a guided tour;
//! its code snippets are compiled as doctests of this crate.

pub mod bn;
pub mod fields;
pub mod gg;
pub mod linalg;
pub mod perm;
pub mod report;
pub mod rng;

pub use bn::{BnProvider, BruhatDecomposition, CosetIndex, GroupElement, GroupKind, WeylElem};
pub use fields::{AdditiveCharacter, CoeffField, FieldDesc, FqElem, KScalar};
pub use gg::RegularCharacter;
pub use linalg::{KVector, SubspaceBasis};
pub use perm::{PermModule, SteinbergVector};
pub use report::FactorReport;

#[cfg(doctest)]
mod book {
    //! Each chapter of the book is compiled here so its Rust snippets stay
    //! in sync with the library (`cargo test --doc`).
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/finite-fields.md")]
    mod finite_fields {}
    #[doc = include_str!("../../../book/src/exact-linear-algebra.md")]
    mod exact_linear_algebra {}
    #[doc = include_str!("../../../book/src/bn-pairs.md")]
    mod bn_pairs {}
    #[doc = include_str!("../../../book/src/permutation-module.md")]
    mod permutation_module {}
    #[doc = include_str!("../../../book/src/gelfand-graev.md")]
    mod gelfand_graev {}
}
