//! Exact computations in the word algebra of multiple Eisenstein series:
//! harmonic and shuffle products, the derivations and the Drop1 map, the
//! bimould calculus behind the Fourier expansion, and ranks of relation spaces.

pub mod drop1;
pub mod error;
pub mod linalg;
pub mod lincomb;
pub mod moulds;
pub mod operators;
pub mod parallel;
pub mod products;
pub mod relspaces;
pub mod word;

pub use error::{Error, Result};
pub use lincomb::{LinComb, Q};
pub use products::Product;
pub use word::{BWord, Space, XyWord, ZWord};
