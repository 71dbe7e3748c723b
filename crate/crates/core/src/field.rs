//! Scalar abstraction for the coding math, the prime field `Fp<P>`, and
//! polynomials with matrix-valued coefficients.
//!
//! Everything in [`crate::codec`] is written against [`Scalar`], so the same
//! encoder and twofold decoder run over `Fp<P>` (exact, the protocol field),
//! over `BigRational` (exact, handy as an independent cross-check) and over
//! `f64` (approximate).

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Inv, One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// The arithmetic the polynomial code needs: a commutative ring with
/// (partial) inversion.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Multiplicative inverse, `None` for zero.
    fn checked_inv(&self) -> Option<Self>;
}

/// Scalars from which evaluation points can be drawn at random.
pub trait SampleScalar: Scalar + Eq + Hash {
    /// Number of nonzero elements the sampler can produce.
    fn nonzero_count() -> u128;

    /// Uniform draw over the nonzero elements the sampler can produce.
    fn sample_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

/// A prime field with a 64-bit modulus and canonical residues.
pub trait PrimeField: SampleScalar + Copy + fmt::Display {
    const MODULUS: u64;

    /// Reduces `v` modulo the field prime.
    fn from_u64(v: u64) -> Self;

    /// Canonical representative in `[0, p)`.
    fn residue(&self) -> u64;

    /// Reduces a signed integer, so `-1` maps to `p - 1`.
    fn from_i128(v: i128) -> Self {
        let p = Self::MODULUS as i128;
        Self::from_u64(v.rem_euclid(p) as u64)
    }
}

/// Element of the prime field of order `P`.
///
/// `P` must be prime; it is not checked at compile time. The value is always
/// fully reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub const fn new(v: u64) -> Self {
        Fp(v % P)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::<P>(1 % P);
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base *= base;
            exp >>= 1;
        }
        acc
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> From<u64> for Fp<P> {
    fn from(v: u64) -> Self {
        Fp::new(v)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let s = self.0 as u128 + rhs.0 as u128;
        Fp((s % P as u128) as u64)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        if self.0 >= rhs.0 {
            Fp(self.0 - rhs.0)
        } else {
            Fp(P - (rhs.0 - self.0))
        }
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Fp(P - self.0)
        }
    }
}

impl<const P: u64> AddAssign for Fp<P> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const P: u64> SubAssign for Fp<P> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const P: u64> MulAssign for Fp<P> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u64> Inv for Fp<P> {
    type Output = Option<Self>;
    fn inv(self) -> Option<Self> {
        self.checked_inv()
    }
}

impl<const P: u64> Scalar for Fp<P> {
    fn checked_inv(&self) -> Option<Self> {
        // Fermat: a^(p-2) = a^-1 for prime p.
        (self.0 != 0).then(|| self.pow(P - 2))
    }
}

impl<const P: u64> SampleScalar for Fp<P> {
    fn nonzero_count() -> u128 {
        P as u128 - 1
    }

    fn sample_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fp(rng.random_range(1..P))
    }
}

impl<const P: u64> PrimeField for Fp<P> {
    const MODULUS: u64 = P;

    fn from_u64(v: u64) -> Self {
        Fp::new(v)
    }

    fn residue(&self) -> u64 {
        self.0
    }
}

impl Scalar for f64 {
    fn checked_inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}

impl Scalar for f32 {
    fn checked_inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}

/// Range of the integers drawn as rational evaluation points.
const RATIONAL_POINT_RANGE: u64 = 1 << 32;

impl Scalar for BigRational {
    fn checked_inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

impl SampleScalar for BigRational {
    fn nonzero_count() -> u128 {
        RATIONAL_POINT_RANGE as u128
    }

    fn sample_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Self {
        BigRational::from_integer(BigInt::from(rng.random_range(1..=RATIONAL_POINT_RANGE)))
    }
}

/// Multiplicative inverse, erroring on zero.
pub fn field_inv<F: Scalar>(a: &F) -> Result<F> {
    a.checked_inv().ok_or(Error::NoInverse)
}

/// Draws `count` pairwise-distinct nonzero elements avoiding `forbidden`.
///
/// Sequential rejection sampling, so every ordered tuple of admissible
/// points is equally likely and the result is a pure function of the RNG
/// state.
pub fn sample_distinct_points<F, R>(count: usize, forbidden: &HashSet<F>, rng: &mut R) -> Result<Vec<F>>
where
    F: SampleScalar,
    R: Rng + ?Sized,
{
    let blocked = forbidden.iter().filter(|f| !f.is_zero()).count() as u128;
    let available = F::nonzero_count().saturating_sub(blocked);
    if count as u128 > available {
        return Err(Error::InsufficientPoints {
            requested: count as u128,
            available,
        });
    }
    let mut seen: HashSet<F> = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = F::sample_nonzero(rng);
        if forbidden.contains(&x) || !seen.insert(x.clone()) {
            continue;
        }
        out.push(x);
    }
    Ok(out)
}

/// True when no two entries compare equal.
pub(crate) fn pairwise_distinct<F: PartialEq>(points: &[F]) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, a)| points[i + 1..].iter().all(|b| a != b))
}

/// Polynomial with matrix coefficients, constant term first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    coeffs: Vec<Matrix<F>>,
}

impl<F: Scalar> Poly<F> {
    pub fn new(coeffs: Vec<Matrix<F>>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Shape("polynomial needs at least one coefficient".into()))?;
        let shape = first.shape();
        if let Some(bad) = coeffs.iter().find(|c| c.shape() != shape) {
            return Err(Error::Shape(format!(
                "coefficient shape {:?} differs from {:?}",
                bad.shape(),
                shape
            )));
        }
        Ok(Poly { coeffs })
    }

    /// Polynomial with 1×1 coefficients.
    pub fn from_scalars(coeffs: Vec<F>) -> Result<Self> {
        Poly::new(coeffs.into_iter().map(Matrix::scalar).collect())
    }

    pub fn coeffs(&self) -> &[Matrix<F>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Matrix<F>> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.coeffs[0].shape()
    }

    /// Horner evaluation, entrywise.
    pub fn eval(&self, point: &F) -> Matrix<F> {
        let mut iter = self.coeffs.iter().rev();
        let mut acc = iter.next().expect("non-empty by construction").clone();
        for c in iter {
            acc = acc.scale(point);
            acc.add_assign_matrix(c).expect("shapes agree by construction");
        }
        acc
    }
}

/// Evaluates `poly` at `point`.
pub fn eval_poly<F: Scalar>(poly: &Poly<F>, point: &F) -> Matrix<F> {
    poly.eval(point)
}

/// Coefficient form of the Lagrange basis for a fixed set of points.
///
/// `weights[i][l]` is the coefficient of `x^l` in the basis polynomial that is
/// one at `points[i]` and zero at every other point. Interpolating matrix
/// data is then one linear combination per coefficient.
#[derive(Clone, Debug)]
pub struct LagrangeBasis<F> {
    points: Vec<F>,
    weights: Vec<Vec<F>>,
}

impl<F: Scalar> LagrangeBasis<F> {
    pub fn new(points: &[F]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Shape("interpolation needs at least one point".into()));
        }
        if !pairwise_distinct(points) {
            return Err(Error::SingularSystem);
        }
        let k = points.len();

        // master(x) = prod_j (x - x_j), constant term first
        let mut master = vec![F::one()];
        for xj in points {
            let mut next = vec![F::zero(); master.len() + 1];
            for (d, c) in master.iter().enumerate() {
                next[d + 1] = next[d + 1].clone() + c.clone();
                next[d] = next[d].clone() - xj.clone() * c.clone();
            }
            master = next;
        }

        let mut weights = Vec::with_capacity(k);
        for (i, xi) in points.iter().enumerate() {
            // synthetic division of master by (x - x_i)
            let mut quot = vec![F::zero(); k];
            quot[k - 1] = master[k].clone();
            for d in (1..k).rev() {
                quot[d - 1] = master[d].clone() + xi.clone() * quot[d].clone();
            }
            let denom = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(F::one(), |acc, (_, xj)| acc * (xi.clone() - xj.clone()));
            let inv = denom.checked_inv().ok_or(Error::SingularSystem)?;
            weights.push(quot.into_iter().map(|q| q * inv.clone()).collect());
        }
        Ok(LagrangeBasis {
            points: points.to_vec(),
            weights,
        })
    }

    pub fn points(&self) -> &[F] {
        &self.points
    }

    /// Coefficients of the unique polynomial of degree `< k` through
    /// `(points[i], values[i])`.
    pub fn apply(&self, values: &[Matrix<F>]) -> Result<Poly<F>> {
        let k = self.points.len();
        if values.len() != k {
            return Err(Error::Shape(format!(
                "{} values for {} interpolation points",
                values.len(),
                k
            )));
        }
        let shape = values[0].shape();
        if values.iter().any(|v| v.shape() != shape) {
            return Err(Error::Shape("interpolation values differ in shape".into()));
        }
        let coeffs = (0..k)
            .map(|l| {
                let mut acc = Matrix::zeros(shape.0, shape.1);
                for (w, v) in self.weights.iter().zip(values) {
                    acc.add_scaled(v, &w[l])?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Poly::new(coeffs)
    }
}

/// Interpolates matrix values at distinct points.
pub fn interpolate<F: Scalar>(points: &[F], values: &[Matrix<F>]) -> Result<Poly<F>> {
    if points.len() != values.len() {
        return Err(Error::Shape(format!(
            "{} points but {} values",
            points.len(),
            values.len()
        )));
    }
    LagrangeBasis::new(points)?.apply(values)
}
