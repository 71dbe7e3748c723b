//! Private polynomial-coded matrix multiplication over a prime field, with
//! asynchronous decoding and straggler timing models.

pub mod audit;
pub mod codec;
pub mod error;
pub mod field;
pub mod figures;
pub mod matrix;
pub mod protocol;
pub mod sim;
pub mod timing;

pub use error::{Error, Result};
pub use field::{Fp, PrimeField, SampleScalar, Scalar};
pub use matrix::{Matrix, PartitionSpec};
pub use timing::{Convention, DelayModel, Real};

/// Default field, modulus `2^61 - 1`.
pub type Fp61 = Fp<2305843009213693951>;
/// Field with modulus `2^31 - 1`.
pub type Fp31 = Fp<2147483647>;
pub type Matrix61 = Matrix<Fp61>;
pub type DelayModel64 = DelayModel<f64>;
pub type Rational = num_rational::BigRational;
