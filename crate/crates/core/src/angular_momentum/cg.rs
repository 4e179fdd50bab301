use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::exact::{factorial, SignedSqrt};
use super::half::Half;
use crate::error::{Error, Result};

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>` in the Condon-Shortley
/// convention, evaluated exactly with the Racah sum.
///
/// Selection-rule violations (`M != m1 + m2`, triangle failure) give zero.
/// Malformed arguments (`|m| > j`, mismatched integer/half-integer parity,
/// negative `j`) are domain errors.
pub fn clebsch_gordan(j1: Half, m1: Half, j2: Half, m2: Half, j: Half, m: Half) -> Result<SignedSqrt> {
    for (name, jj, mm) in [("j1", j1, m1), ("j2", j2, m2), ("J", j, m)] {
        check_pair(name, jj, mm)?;
    }
    if m1 + m2 != m {
        return Ok(SignedSqrt::zero());
    }
    let (dj1, dj2, dj) = (j1.twice(), j2.twice(), j.twice());
    if (dj1 + dj2 + dj) % 2 != 0 || dj < (dj1 - dj2).abs() || dj > dj1 + dj2 {
        return Ok(SignedSqrt::zero());
    }
    let (dm1, dm2, dm) = (m1.twice(), m2.twice(), m.twice());

    // every argument below is an integer because of the parity checks above
    let n = |twice: i32| -> u32 {
        debug_assert!(twice >= 0 && twice % 2 == 0);
        (twice / 2) as u32
    };
    let triangle = BigRational::new(
        factorial(n(dj1 + dj2 - dj)) * factorial(n(dj1 - dj2 + dj)) * factorial(n(-dj1 + dj2 + dj)),
        factorial(n(dj1 + dj2 + dj + 2)),
    );
    let projections = factorial(n(dj1 + dm1))
        * factorial(n(dj1 - dm1))
        * factorial(n(dj2 + dm2))
        * factorial(n(dj2 - dm2))
        * factorial(n(dj + dm))
        * factorial(n(dj - dm));
    let prefactor = triangle * BigRational::from_integer(projections * BigInt::from(dj + 1));

    // k runs over every value that keeps all six factorial arguments >= 0
    let k_min = 0.max((dj2 - dj - dm1) / 2).max((dj1 - dj + dm2) / 2);
    let k_max = ((dj1 + dj2 - dj) / 2).min((dj1 - dm1) / 2).min((dj2 + dm2) / 2);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k as u32)
            * factorial(n(dj1 + dj2 - dj - 2 * k))
            * factorial(n(dj1 - dm1 - 2 * k))
            * factorial(n(dj2 + dm2 - 2 * k))
            * factorial(n(dj - dj2 + dm1 + 2 * k))
            * factorial(n(dj - dj1 - dm2 + 2 * k));
        let term = BigRational::new(BigInt::from(if k % 2 == 0 { 1 } else { -1 }), denom);
        sum += term;
    }
    Ok(SignedSqrt::new(sum.is_negative(), prefactor * &sum * &sum))
}

/// Float projection of [`clebsch_gordan`].
pub fn clebsch_gordan_f64(j1: Half, m1: Half, j2: Half, m2: Half, j: Half, m: Half) -> Result<f64> {
    clebsch_gordan(j1, m1, j2, m2, j, m).map(|c| c.to_f64())
}

fn check_pair(name: &str, j: Half, m: Half) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::domain(format!("{name} = {j} is negative")));
    }
    if m.abs() > j {
        return Err(Error::domain(format!("|m| = {} exceeds {name} = {j}", m.abs())));
    }
    if (j.twice() - m.twice()) % 2 != 0 {
        return Err(Error::domain(format!("{name} = {j} and its projection {m} differ by a half-integer")));
    }
    Ok(())
}
