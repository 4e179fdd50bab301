use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::cg::clebsch_gordan;
use super::constants::{EPSILON_0, HBAR};
use super::exact::{ratio_to_f64, SignedSqrt};
use super::half::Half;
use crate::error::{Error, Result};

/// Hyperfine levels of the Raman scheme: ground `|a>` (prepared), ground `|b>`
/// (spin-wave partner) and excited `|c>`, with the Zeeman populations of `|a>`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelScheme {
    f_a: Half,
    f_b: Half,
    f_c: Half,
    /// `populations[i]` belongs to `m = -F_a + i`.
    populations: Vec<BigRational>,
}

impl LevelScheme {
    /// Unpolarized ensemble: `p_m = 1 / (2 F_a + 1)` exactly.
    pub fn unpolarized(f_a: Half, f_b: Half, f_c: Half) -> Result<Self> {
        let n = (f_a.twice() + 1).max(1);
        let p = BigRational::new(BigInt::one(), BigInt::from(n));
        Self::with_exact_populations(f_a, f_b, f_c, vec![p; n as usize])
    }

    /// The 85Rb D1 scheme, `F_a = 3`, `F_b = 2`, `F_c = 3`, unpolarized.
    pub fn rb85_d1() -> Self {
        Self::unpolarized(Half::int(3), Half::int(2), Half::int(3)).expect("valid scheme")
    }

    /// Populations given as floats, ordered from `m = -F_a` to `m = F_a`.
    /// They are converted exactly, so ratios built from them stay exact.
    pub fn new(f_a: Half, f_b: Half, f_c: Half, populations: &[f64]) -> Result<Self> {
        validate_levels(f_a, f_b, f_c)?;
        check_population_len(f_a, populations.len())?;
        let mut total = 0.0;
        let mut exact = Vec::with_capacity(populations.len());
        for (i, &p) in populations.iter().enumerate() {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidScheme(format!("population #{i} = {p} is not a probability")));
            }
            total += p;
            exact.push(BigRational::from_float(p).expect("finite"));
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidScheme(format!("populations sum to {total}, not 1")));
        }
        Ok(LevelScheme {
            f_a,
            f_b,
            f_c,
            populations: exact,
        })
    }

    pub fn with_exact_populations(f_a: Half, f_b: Half, f_c: Half, populations: Vec<BigRational>) -> Result<Self> {
        validate_levels(f_a, f_b, f_c)?;
        check_population_len(f_a, populations.len())?;
        if populations.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidScheme("negative population".into()));
        }
        let total: BigRational = populations.iter().sum();
        if (ratio_to_f64(&total) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidScheme(format!("populations sum to {}, not 1", ratio_to_f64(&total))));
        }
        Ok(LevelScheme {
            f_a,
            f_b,
            f_c,
            populations,
        })
    }

    pub fn f_a(&self) -> Half {
        self.f_a
    }

    pub fn f_b(&self) -> Half {
        self.f_b
    }

    pub fn f_c(&self) -> Half {
        self.f_c
    }

    pub fn population(&self, m: Half) -> Option<&BigRational> {
        if m.abs() > self.f_a || (m.twice() - self.f_a.twice()) % 2 != 0 {
            return None;
        }
        self.populations.get(((m.twice() + self.f_a.twice()) / 2) as usize)
    }

    fn weighted(&self) -> impl Iterator<Item = (Half, &BigRational)> {
        self.f_a.projections().zip(self.populations.iter())
    }

    /// `sum_m p_m X_{m,alpha}^2`, exactly.
    pub fn channel_weight(&self, alpha: i32) -> BigRational {
        self.weighted()
            .filter(|(_, p)| !p.is_zero())
            .map(|(m, p)| {
                let x = x_coefficient(self, m, alpha).expect("m ranges over valid projections");
                p * x.squared()
            })
            .sum()
    }
}

fn check_population_len(f_a: Half, len: usize) -> Result<()> {
    let expected = (f_a.twice() + 1) as usize;
    if len != expected {
        return Err(Error::InvalidScheme(format!(
            "expected {expected} populations for F_a = {f_a}, got {len}"
        )));
    }
    Ok(())
}

fn validate_levels(f_a: Half, f_b: Half, f_c: Half) -> Result<()> {
    for (name, f) in [("F_a", f_a), ("F_b", f_b), ("F_c", f_c)] {
        if f.twice() < 0 {
            return Err(Error::InvalidScheme(format!("{name} = {f} is negative")));
        }
    }
    for (name, f) in [("F_a", f_a), ("F_b", f_b)] {
        if (f.twice() + f_c.twice()) % 2 != 0 {
            return Err(Error::InvalidScheme(format!("{name} = {f} and F_c = {f_c} cannot be dipole coupled")));
        }
        let lo = (f - Half::ONE).abs();
        let hi = f + Half::ONE;
        if f_c < lo || f_c > hi {
            return Err(Error::InvalidScheme(format!(
                "F_c = {f_c} outside [{lo}, {hi}] allowed by a dipole transition from {name} = {f}"
            )));
        }
    }
    Ok(())
}

/// `X_{m,alpha} = C^{F_a 1 F_c}_{m 0 m} C^{F_b 1 F_c}_{m-alpha alpha m}`.
///
/// Zero when `|m - alpha| > F_b` or either factor violates a selection rule.
pub fn x_coefficient(scheme: &LevelScheme, m: Half, alpha: i32) -> Result<SignedSqrt> {
    if !(-1..=1).contains(&alpha) {
        return Err(Error::domain(format!("alpha = {alpha} is not a spherical component")));
    }
    if m.abs() > scheme.f_a || (m.twice() - scheme.f_a.twice()) % 2 != 0 {
        return Err(Error::domain(format!("m = {m} is not a projection of F_a = {}", scheme.f_a)));
    }
    let a = Half::int(alpha);
    let mb = m - a;
    if m.abs() > scheme.f_c || mb.abs() > scheme.f_b {
        return Ok(SignedSqrt::zero());
    }
    let absorb = clebsch_gordan(scheme.f_a, m, Half::ONE, Half::ZERO, scheme.f_c, m)?;
    if absorb.is_zero() {
        return Ok(absorb);
    }
    let emit = clebsch_gordan(scheme.f_b, mb, Half::ONE, a, scheme.f_c, m)?;
    Ok(&absorb * &emit)
}

/// `cos^2 theta`: share of the `alpha = -1` channel in the H-polarized spin wave.
pub fn branching_angle(scheme: &LevelScheme) -> Result<BigRational> {
    let minus = scheme.channel_weight(-1);
    let total = &minus + scheme.channel_weight(1);
    if total.is_zero() {
        return Err(Error::DegenerateScheme("all X_{m,+-1} vanish".into()));
    }
    Ok(minus / total)
}

/// `cos^2 eta`: relative strength of the H-polarized (alpha = +-1) Raman
/// channel against the V-polarized (alpha = 0) one.
pub fn mixing_angle(scheme: &LevelScheme) -> Result<BigRational> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let sigma = (scheme.channel_weight(-1) + scheme.channel_weight(1)) * &half;
    let pi = scheme.channel_weight(0);
    let denominator = &pi + &sigma;
    if denominator.is_zero() {
        return Err(Error::DegenerateScheme("all X_{m,alpha} vanish".into()));
    }
    Ok(sigma / denominator)
}

/// Physical inputs of the parametric coupling, SI units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingInputs {
    /// Reduced dipole matrix element `c <-> b`, C m.
    pub d_cb: f64,
    /// Reduced dipole matrix element `c <-> a`, C m.
    pub d_ca: f64,
    /// Write detuning from `c <-> a`, rad/s.
    pub detuning: f64,
    /// Signal wavenumber, 1/m.
    pub k_s: f64,
    /// Write wavenumber, 1/m.
    pub k_w: f64,
    /// Mean write-pulse photon number.
    pub n_w: f64,
    /// Atom number.
    pub atoms: f64,
    /// Effective overlap area of write beam and signal mode, m^2.
    pub overlap_area: f64,
}

impl CouplingInputs {
    fn validate(&self) -> Result<()> {
        if self.detuning == 0.0 || !self.detuning.is_finite() {
            return Err(Error::domain("detuning must be non-zero: the Raman model needs an off-resonant drive"));
        }
        for (name, v) in [
            ("k_s", self.k_s),
            ("k_w", self.k_w),
            ("n_w", self.n_w),
            ("N", self.atoms),
            ("A_bar", self.overlap_area),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

/// Dimensionless coupling
/// `chi = 2 d_cb d_ca / Delta * sqrt(k_s k_w n_w N) / (hbar eps0 A) * sqrt(sum_m p_m (X_m0^2 + sum_{+-} X^2 / 2))`.
pub fn coupling_chi(scheme: &LevelScheme, inputs: &CouplingInputs) -> Result<f64> {
    inputs.validate()?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let angular = scheme.channel_weight(0) + (scheme.channel_weight(-1) + scheme.channel_weight(1)) * half;
    let angular = ratio_to_f64(&angular).sqrt();
    let dipole = 2.0 * inputs.d_cb * inputs.d_ca / inputs.detuning;
    let field = (inputs.k_s * inputs.k_w * inputs.n_w * inputs.atoms).sqrt() / (HBAR * EPSILON_0 * inputs.overlap_area);
    Ok(dipole * field * angular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn h(n: i32) -> Half {
        Half::int(n)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rb85_channel_weights() {
        let s = LevelScheme::rb85_d1();
        // X_{m,0}^2 = m^2 (9 - m^2) / 180, summed with p_m = 1/7
        assert_eq!(s.channel_weight(0), q(2, 45));
        assert_eq!(s.channel_weight(-1) + s.channel_weight(1), q(13, 45));
    }

    #[test]
    fn x_selection_rules() {
        let s = LevelScheme::rb85_d1();
        // |m - alpha| > F_b
        assert!(x_coefficient(&s, h(3), -1).unwrap().is_zero());
        assert!(x_coefficient(&s, h(-3), 1).unwrap().is_zero());
        // C^{3 1 3}_{0 0 0} = 0
        assert!(x_coefficient(&s, h(0), 0).unwrap().is_zero());
        // m = 3, alpha = 0: m - alpha = 3 > F_b
        assert!(x_coefficient(&s, h(3), 0).unwrap().is_zero());
        assert!(x_coefficient(&s, h(4), 0).is_err());
        assert!(x_coefficient(&s, h(1), 2).is_err());
    }

    #[test]
    fn x_is_product_of_two_cg_factors() {
        let s = LevelScheme::rb85_d1();
        let x = x_coefficient(&s, h(1), 1).unwrap();
        let a = clebsch_gordan(h(3), h(1), h(1), h(0), h(3), h(1)).unwrap();
        let b = clebsch_gordan(h(2), h(0), h(1), h(1), h(3), h(1)).unwrap();
        assert_eq!(x, &a * &b);
        assert!((x.to_f64() - a.to_f64() * b.to_f64()).abs() < 1e-15);
    }

    #[test]
    fn rb85_branching_is_half_by_reflection_symmetry() {
        assert_eq!(branching_angle(&LevelScheme::rb85_d1()).unwrap(), q(1, 2));
    }

    #[test]
    fn stretched_population_selects_one_channel() {
        // all atoms at m = -F_a: only alpha = -1 has |m - alpha| <= F_b
        let mut p = vec![0.0; 7];
        p[0] = 1.0;
        let s = LevelScheme::new(h(3), h(2), h(3), &p).unwrap();
        assert_eq!(branching_angle(&s).unwrap(), q(1, 1));
        p.reverse();
        let s = LevelScheme::new(h(3), h(2), h(3), &p).unwrap();
        assert_eq!(branching_angle(&s).unwrap(), q(0, 1));
    }

    #[test]
    fn mixing_angle_limits() {
        // all atoms in m = 0 of F_a = 1 -> F_c = 1: C^{1 1 1}_{0 0 0} = 0
        let s = LevelScheme::new(h(1), h(1), h(1), &[0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(mixing_angle(&s), Err(Error::DegenerateScheme(_))));

        // F_a = 0 -> F_c = 1 -> F_b = 0: only alpha = 0 couples, so cos^2 eta = 0
        let s = LevelScheme::unpolarized(h(0), h(0), h(1)).unwrap();
        assert_eq!(mixing_angle(&s).unwrap(), q(0, 1));
        assert!(matches!(branching_angle(&s), Err(Error::DegenerateScheme(_))));

        // F_a = 0 -> F_c = 1 -> F_b = 1: C^{1 1 1}_{0 0 0} = 0 closes alpha = 0
        let s = LevelScheme::unpolarized(h(0), h(1), h(1)).unwrap();
        assert_eq!(mixing_angle(&s).unwrap(), q(1, 1));
    }

    #[test]
    fn rejects_bad_schemes() {
        assert!(LevelScheme::unpolarized(h(3), h(2), h(5)).is_err());
        assert!(LevelScheme::unpolarized(h(3), Half::from_doubled(3), h(3)).is_err());
        assert!(LevelScheme::new(h(1), h(1), h(1), &[0.5, 0.5, 0.5]).is_err());
        assert!(LevelScheme::new(h(1), h(1), h(1), &[1.2, -0.2, 0.0]).is_err());
        assert!(LevelScheme::new(h(1), h(1), h(1), &[1.0, 0.0]).is_err());
    }

    fn inputs() -> CouplingInputs {
        // 85Rb D1-like numbers; the absolute scale only matters for the
        // hand-evaluated cross-check below
        CouplingInputs {
            d_cb: 2.0e-29,
            d_ca: 2.5e-29,
            detuning: 2.0 * std::f64::consts::PI * 10e6,
            k_s: 2.0 * std::f64::consts::PI / 795e-9,
            k_w: 2.0 * std::f64::consts::PI / 795e-9,
            n_w: 1e6,
            atoms: 1e7,
            overlap_area: 1e-8,
        }
    }

    #[test]
    fn chi_scalings() {
        let s = LevelScheme::rb85_d1();
        let base = inputs();
        let chi = coupling_chi(&s, &base).unwrap();
        assert!(chi > 0.0);
        let quad = coupling_chi(&s, &CouplingInputs { n_w: 4.0 * base.n_w, ..base }).unwrap();
        assert!((quad / chi - 2.0).abs() < 1e-12);
        let flipped = coupling_chi(&s, &CouplingInputs { detuning: -base.detuning, ..base }).unwrap();
        assert!((flipped + chi).abs() < 1e-12 * chi);
        assert!(coupling_chi(&s, &CouplingInputs { detuning: 0.0, ..base }).is_err());
        assert!(coupling_chi(&s, &CouplingInputs { atoms: -1.0, ..base }).is_err());
    }

    #[test]
    fn chi_matches_independent_evaluation() {
        // Evaluated separately at 30 significant digits (mpmath) with the
        // angular sum 2/45 + 13/90 = 17/90:
        //   2 d_cb d_ca / Delta  = 1.59154943091895335768883763373e-65
        //   sqrt(k_s k_w n_w N)  = 24992674882505.9150551787438247
        //   hbar eps0 A_bar      = 9.3373769298037518576e-54
        //   chi                  = 18.5144658341563210199909561666
        let chi = coupling_chi(&LevelScheme::rb85_d1(), &inputs()).unwrap();
        assert!((chi / 18.514_465_834_156_321 - 1.0).abs() < 1e-12, "{chi}");
    }

    #[test]
    fn populations_exact_lookup() {
        let s = LevelScheme::rb85_d1();
        assert_eq!(s.population(h(-3)).unwrap().to_f64().unwrap(), 1.0 / 7.0);
        assert!(s.population(h(4)).is_none());
    }
}
