//! Exact number types: rationals, valuations, prime sets, quadratic
//! irrationals and the extended real line.

mod ext;
mod quadratic;
mod rational;
mod squarefree;

use num_bigint::BigInt;
use thiserror::Error;

pub use ext::ExtReal;
pub use quadratic::{FieldOp, Quadratic, INITIAL_COMPARE_BITS};
pub use rational::{
    ceil, floor, format_rational, height, in_s_integers, int, int_valuation, is_prime,
    padic_valuation, prime_power, serialize_rational, ratio, PrimeSet, Rational,
};
pub use squarefree::{is_square, square_decompose};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NumberError {
    #[error("the valuation of 0 is not represented")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("operands lie in distinct quadratic fields Q(sqrt({left})) and Q(sqrt({right}))")]
    MixedFields { left: BigInt, right: BigInt },
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative radicand {0}")]
    NegativeRadicand(BigInt),
}
