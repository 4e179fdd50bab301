use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact real of the form `±sqrt(p/q)` with `p/q` a non-negative rational.
///
/// Clebsch-Gordan coefficients and their products are all of this form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSqrt {
    negative: bool,
    square: BigRational,
}

impl SignedSqrt {
    pub fn zero() -> Self {
        SignedSqrt {
            negative: false,
            square: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        SignedSqrt {
            negative: false,
            square: BigRational::one(),
        }
    }

    /// `sign(sign) * sqrt(square)`; the square must be non-negative.
    pub fn new(negative: bool, square: BigRational) -> Self {
        assert!(!square.is_negative(), "radicand must be non-negative");
        let negative = negative && !square.is_zero();
        SignedSqrt { negative, square }
    }

    /// `r * sqrt(1)` for a rational `r`, i.e. `sign(r) * sqrt(r^2)`.
    pub fn from_rational(r: &BigRational) -> Self {
        SignedSqrt::new(r.is_negative(), r * r)
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// The exact square of the value.
    pub fn squared(&self) -> &BigRational {
        &self.square
    }

    pub fn to_f64(&self) -> f64 {
        let magnitude = ratio_to_f64(&self.square).sqrt();
        if self.negative {
            -magnitude
        } else {
            magnitude
        }
    }
}

impl Mul for &SignedSqrt {
    type Output = SignedSqrt;
    fn mul(self, rhs: &SignedSqrt) -> SignedSqrt {
        SignedSqrt::new(self.negative != rhs.negative, &self.square * &rhs.square)
    }
}

impl Mul for SignedSqrt {
    type Output = SignedSqrt;
    fn mul(self, rhs: SignedSqrt) -> SignedSqrt {
        &self * &rhs
    }
}

/// Golden-file form: `0`, `+sqrt(p/q)` or `-sqrt(p/q)`.
impl fmt::Display for SignedSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let sign = if self.negative { '-' } else { '+' };
        write!(f, "{}sqrt({}/{})", sign, self.square.numer(), self.square.denom())
    }
}

/// Float projection of a rational that stays accurate when numerator and
/// denominator individually overflow `f64`.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
    let n = r.numer() >> shift;
    let d = r.denom() >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
