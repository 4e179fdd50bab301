use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of widths kept on each side of a Gaussian mode when integrating.
pub const GAUSSIAN_WINDOW_WIDTHS: f64 = 6.0;

/// Temporal mode `phi(t)` of a write pulse (and of the signal it scatters),
/// normalized so that `∫|phi|² dt = 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum Wavepacket {
    /// `|phi|²` is a normal density with standard deviation `width`.
    Gaussian { center: f64, width: f64 },
    /// Flat top of total duration `width`.
    Square { center: f64, width: f64 },
    /// Uniformly sampled complex amplitudes, linearly interpolated.
    Sampled(SampledProfile),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledProfile {
    start: f64,
    step: f64,
    samples: Vec<Complex64>,
}

impl SampledProfile {
    /// Ingests a profile on the grid `start + k * step`. Profiles that are not
    /// unit-normalized (to 1e-9) are rescaled with a warning.
    pub fn new(start: f64, step: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(step > 0.0) || !start.is_finite() {
            return Err(Error::domain("sampled wavepacket needs a finite start and a positive step"));
        }
        if samples.len() < 2 {
            return Err(Error::domain("sampled wavepacket needs at least two samples"));
        }
        let mut profile = SampledProfile { start, step, samples };
        let norm = profile.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("sampled wavepacket has zero norm"));
        }
        if (norm - 1.0).abs() > 1e-9 {
            log::warn!("sampled wavepacket has norm {norm:.6e}; renormalizing to 1");
            let scale = norm.sqrt().recip();
            for s in &mut profile.samples {
                *s *= scale;
            }
        }
        Ok(profile)
    }

    /// Exact `∫|phi|²` of the piecewise-linear interpolant.
    fn norm(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| self.step * (w[0].norm_sqr() + w[1].norm_sqr() + (w[0] * w[1].conj()).re) / 3.0)
            .sum()
    }

    fn end(&self) -> f64 {
        self.start + self.step * (self.samples.len() - 1) as f64
    }

    fn amplitude(&self, t: f64) -> Complex64 {
        if t < self.start || t > self.end() {
            return Complex64::new(0.0, 0.0);
        }
        let x = (t - self.start) / self.step;
        let k = (x.floor() as usize).min(self.samples.len() - 2);
        let frac = x - k as f64;
        self.samples[k] * (1.0 - frac) + self.samples[k + 1] * frac
    }
}

impl Wavepacket {
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        check_width(width)?;
        Ok(Wavepacket::Gaussian { center, width })
    }

    pub fn square(center: f64, width: f64) -> Result<Self> {
        check_width(width)?;
        Ok(Wavepacket::Square { center, width })
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        match self {
            Wavepacket::Gaussian { center, width } => {
                let norm = (2.0 * std::f64::consts::PI * width * width).powf(-0.25);
                let x = (t - center) / width;
                Complex64::new(norm * (-0.25 * x * x).exp(), 0.0)
            }
            Wavepacket::Square { center, width } => {
                if (t - center).abs() <= 0.5 * width {
                    Complex64::new(width.sqrt().recip(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Wavepacket::Sampled(p) => p.amplitude(t),
        }
    }

    /// Interval outside which `phi` is zero or negligible.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Wavepacket::Gaussian { center, width } => {
                let half = GAUSSIAN_WINDOW_WIDTHS * width;
                (center - half, center + half)
            }
            Wavepacket::Square { center, width } => (center - 0.5 * width, center + 0.5 * width),
            Wavepacket::Sampled(p) => (p.start, p.end()),
        }
    }

    /// Points where `phi` has a kink or a jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Wavepacket::Gaussian { .. } => Vec::new(),
            Wavepacket::Square { .. } => {
                let (lo, hi) = self.support();
                vec![lo, hi]
            }
            Wavepacket::Sampled(p) => (0..p.samples.len()).map(|k| p.start + p.step * k as f64).collect(),
        }
    }

    /// Upper bound on `|phi(t)|²`.
    pub fn peak_intensity(&self) -> f64 {
        match self {
            Wavepacket::Gaussian { width, .. } => (2.0 * std::f64::consts::PI * width * width).sqrt().recip(),
            Wavepacket::Square { width, .. } => width.recip(),
            Wavepacket::Sampled(p) => p.samples.iter().map(|s| s.norm_sqr()).fold(0.0, f64::max),
        }
    }

    /// Characteristic duration used to size integration windows.
    pub fn duration(&self) -> f64 {
        let (lo, hi) = self.support();
        hi - lo
    }
}

fn check_width(width: f64) -> Result<()> {
    if width > 0.0 && width.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("wavepacket width {width} must be positive")))
    }
}
