//! Exact symbolic toolkit for Lie identities of the 2×2 supermatrix algebras
//! M₁,₁(E) and M₁,₁(E¹) over ℚ and GF(p).
//!
//! The crate is `no_std` (with `alloc`). Layers, bottom up:
//!
//! * [`scalars`]: field arithmetic and coefficient polynomials.
//! * [`grassmann`]: truncated Grassmann algebras with their ℤ₂ grading.
//! * [`supermatrix`]: the supermatrix algebra and its commutator bracket.
//! * [`freelie`]: Lie polynomials and their associative expansion.
//! * [`lang`]: the bracket-notation parser and printer.
//! * [`linalg`]: sparse exact echelon forms.
//! * [`engine`]: identity deciding, identity spaces, consequence spaces.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod freelie;
pub mod grassmann;
pub mod lang;
pub mod library;
pub mod linalg;
pub mod scalars;
pub mod supermatrix;

pub use engine::{AlgebraSpec, Verdict};
pub use freelie::{AssocPoly, LiePoly, LieTerm, MultiDegree, Var};
pub use grassmann::{GrassmannElement, GrassmannWord};
pub use scalars::{CoeffPoly, Field, Scalar};
pub use supermatrix::SuperMatrix;
