//! Moulds over commutative rings, the `gila` product and the symbolic Fourier
//! expansion of multiple Eisenstein series.

pub mod formula;
pub mod fourier;
pub mod mould;
pub mod ring;

pub use formula::{
    convolution, gila_coeff, gilat_coeff, goncharov_coproduct, goncharov_coproduct_word, SignConvention,
};
pub use fourier::{fourier_expansion, fourier_expansion_via_moulds, FourierExpansion};
pub use mould::{constant_mould, free_mould, Mould};
pub use ring::{CoeffRing, FreeSymbols, Poly, ShuffleRing, Symbol};
