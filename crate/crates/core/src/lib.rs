//! Exact-arithmetic toolkit for deciding when Hilbert-type partial
//! resolutions of linear and toric quotients can be smooth.
//!
//! Everything is computed over arbitrary-precision rationals or over
//! number fields `Q[x]/(p(x))`; there is no floating point anywhere.
//! The main entry point is [`pipeline::analyze`], which takes a rational
//! subspace of `Q^k` (plus optional affine offset) and produces a full
//! report: normalizer group, reflection census, Chevalley–Shephard–Todd
//! smoothness verdict, Coxeter classification, translation filtration
//! and isogeny index.

pub mod caps;
pub mod hilbstrata;
pub mod linalg;
pub mod numberfield;
pub mod permaction;
pub mod pipeline;
pub mod reflect;
pub mod toruslat;

pub use caps::Caps;
