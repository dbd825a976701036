//! Exact integer, polynomial, binary form and number field arithmetic.

use alloc::string::String;

pub mod form;
pub mod int;
pub mod linalg;
pub mod modp;
pub mod nf;
pub mod poly;
mod zassenhaus;

pub use form::{factor_binary_form, resultant, BinaryForm, FactoredForm};
pub use int::{factor_integer, is_probable_prime, jacobi, valuation};
pub use nf::{nf_is_square, nf_sqrt, NumberField, NumberFieldElement};
pub use poly::{QPoly, ZPoly};
pub use zassenhaus::{factor_zpoly, squarefree_decomposition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid field: modulus is not monic irreducible")]
    InvalidField,
    #[error("valuation of zero is infinite")]
    InfiniteValuation,
}
