use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A half-integer stored as twice its value, so `Half(3)` is 3/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Half(i32);

impl Half {
    pub const ZERO: Half = Half(0);
    pub const ONE: Half = Half(2);

    pub const fn from_doubled(twice: i32) -> Self {
        Half(twice)
    }

    pub const fn int(n: i32) -> Self {
        Half(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        Half(self.0.abs())
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Projections `-j, -j+1, ..., j`.
    pub fn projections(self) -> impl Iterator<Item = Half> + Clone {
        let j = self.0;
        (-j..=j).step_by(2).map(Half)
    }

    /// Converts a float that is an exact multiple of 1/2.
    pub fn try_from_f64(x: f64) -> Option<Self> {
        let twice = 2.0 * x;
        if twice.is_finite() && twice.fract() == 0.0 && twice.abs() <= f64::from(i32::MAX) {
            Some(Half(twice as i32))
        } else {
            None
        }
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl From<i32> for Half {
    fn from(n: i32) -> Self {
        Half::int(n)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
