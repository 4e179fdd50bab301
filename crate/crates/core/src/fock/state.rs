use num_complex::Complex64;

use super::basis::{passive_map, squeezer_map, Layout, TwoModeMap};
use super::registry::{ModeLabel, ModeRegistry};
use crate::analytic::params::check_probability;
use crate::error::{Error, Result};

/// Pure state on a truncated multi-mode Fock space.
///
/// Loss is kept as a pending per-mode transmission: the channel commutes with
/// everything that follows it until a squeezer acts on the mode or a passive
/// gate mixes it with a mode that saw a different loss. Only then is it
/// purified into an explicit ancilla mode. Pending loss left at measurement
/// is folded into the detector POVM.
#[derive(Clone, Debug)]
pub struct FockState {
    pub(crate) registry: ModeRegistry,
    pub(crate) amplitudes: Vec<Complex64>,
    pub(crate) pending: Vec<f64>,
    /// Modes that may carry photons; `false` means exactly vacuum.
    pub(crate) occupied: Vec<bool>,
}

pub(crate) fn layout_of(registry: &ModeRegistry) -> Layout {
    Layout {
        modes: registry.len(),
        cutoff: registry.cutoff(),
    }
}

pub(crate) fn allocate(layout: &Layout) -> Result<usize> {
    layout.dimension().ok_or_else(|| {
        Error::domain(format!(
            "{} modes at cutoff {} exceed the amplitude budget",
            layout.modes, layout.cutoff
        ))
    })
}

pub(crate) fn rotation_matrix(angle: f64) -> [[f64; 2]; 2] {
    let quarter = angle / std::f64::consts::FRAC_PI_2;
    let (s, c) = if (quarter - quarter.round()).abs() < 1e-12 {
        match (quarter.round() as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        angle.sin_cos()
    };
    [[c, -s], [s, c]]
}

pub(crate) fn beamsplitter_matrix(reflectance: f64) -> [[f64; 2]; 2] {
    let (t, r) = ((1.0 - reflectance).sqrt(), reflectance.sqrt());
    [[t, r], [r, -t]]
}

impl FockState {
    pub fn vacuum(registry: ModeRegistry) -> Result<Self> {
        let layout = layout_of(&registry);
        let dim = allocate(&layout)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        let n = registry.len();
        Ok(FockState {
            registry,
            amplitudes,
            pending: vec![1.0; n],
            occupied: vec![false; n],
        })
    }

    /// State with the given amplitudes, indexed as in [`Layout`].
    pub fn from_amplitudes(registry: ModeRegistry, amplitudes: Vec<Complex64>) -> Result<Self> {
        let layout = layout_of(&registry);
        if allocate(&layout)? != amplitudes.len() {
            return Err(Error::domain("amplitude vector does not match the registry"));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm > 1.0 + 1e-12 {
            return Err(Error::domain(format!("state norm {norm} exceeds 1")));
        }
        let occupied = (0..registry.len())
            .map(|m| amplitudes.iter().enumerate().any(|(i, a)| a.norm_sqr() > 0.0 && layout.occupation(i, m) > 0))
            .collect();
        let n = registry.len();
        Ok(FockState {
            registry,
            amplitudes,
            pending: vec![1.0; n],
            occupied,
        })
    }

    /// Number state `|n_1, ..., n_k>`.
    pub fn number_state(registry: ModeRegistry, occupations: &[usize]) -> Result<Self> {
        let layout = layout_of(&registry);
        let idx = layout
            .index(occupations)
            .ok_or_else(|| Error::domain("occupations do not fit the registry"))?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); allocate(&layout)?];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(registry, amplitudes)
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub(crate) fn layout(&self) -> Layout {
        layout_of(&self.registry)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Option<Complex64> {
        self.layout().index(occupations).map(|i| self.amplitudes[i])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `1 - <psi|psi>`: probability lost to truncation so far.
    pub fn norm_deficit(&self) -> f64 {
        1.0 - self.norm()
    }

    /// Transmission still to be applied to `mode` at measurement.
    pub fn pending_transmission(&self, mode: &ModeLabel) -> Result<f64> {
        Ok(self.pending[self.registry.index_of(mode)?])
    }

    /// Photon-number distribution of one mode, loss included.
    pub fn marginal(&self, mode: &ModeLabel) -> Result<Vec<f64>> {
        let m = self.registry.index_of(mode)?;
        let layout = self.layout();
        let mut raw = vec![0.0; layout.radix()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            raw[layout.occupation(i, m)] += a.norm_sqr();
        }
        Ok(thin(&raw, self.pending[m]))
    }

    /// `<n>` of one mode, loss included.
    pub fn mean_photon_number(&self, mode: &ModeLabel) -> Result<f64> {
        Ok(self.marginal(mode)?.iter().enumerate().map(|(n, p)| n as f64 * p).sum())
    }

    fn pair(&self, a: &ModeLabel, b: &ModeLabel) -> Result<(usize, usize)> {
        let (i, j) = (self.registry.index_of(a)?, self.registry.index_of(b)?);
        if i == j {
            return Err(Error::domain(format!("two-mode gate on a single mode {a}")));
        }
        Ok((i, j))
    }

    fn apply_map(&mut self, map: &TwoModeMap, i: usize, j: usize) {
        self.amplitudes = map.apply(&self.layout(), &self.amplitudes, i, j);
    }

    /// `exp(r (a†b† - ab))`; amplitude pushed above the cutoff is dropped and
    /// shows up in [`norm_deficit`](Self::norm_deficit).
    pub fn apply_two_mode_squeezer(&mut self, a: &ModeLabel, b: &ModeLabel, r: f64) -> Result<()> {
        let (i, j) = self.pair(a, b)?;
        if !r.is_finite() {
            return Err(Error::domain(format!("squeeze parameter {r} is not finite")));
        }
        if r == 0.0 {
            return Ok(());
        }
        self.settle_for_active(i)?;
        self.settle_for_active(j)?;
        let map = squeezer_map(self.registry.cutoff(), r);
        self.apply_map(&map, i, j);
        self.occupied[i] = true;
        self.occupied[j] = true;
        Ok(())
    }

    /// Mixes `a_1 -> sqrt(T) a_1 + sqrt(R) a_2`, `a_2 -> sqrt(R) a_1 - sqrt(T) a_2`.
    pub fn apply_beamsplitter(&mut self, a: &ModeLabel, b: &ModeLabel, reflectance: f64) -> Result<()> {
        check_probability("reflectance", reflectance)?;
        if let (ModeLabel::Signal { polarization: p, .. }, ModeLabel::Signal { polarization: q, .. }) = (a, b) {
            if p != q {
                return Err(Error::domain(format!("beamsplitter between {a} and {b} mixes polarizations")));
            }
        }
        let (i, j) = self.pair(a, b)?;
        self.apply_passive(i, j, beamsplitter_matrix(reflectance))
    }

    /// Rotates the polarization pair `(h, v)` by `angle`: `h -> cos h + sin v`.
    pub fn apply_polarization_rotation(&mut self, h: &ModeLabel, v: &ModeLabel, angle: f64) -> Result<()> {
        if !angle.is_finite() {
            return Err(Error::domain(format!("rotation angle {angle} is not finite")));
        }
        let (i, j) = self.pair(h, v)?;
        self.apply_passive(i, j, rotation_matrix(angle))
    }

    fn apply_passive(&mut self, i: usize, j: usize, u: [[f64; 2]; 2]) -> Result<()> {
        if !self.occupied[i] && !self.occupied[j] {
            return Ok(());
        }
        if self.pending[i] != self.pending[j] {
            if !self.occupied[i] {
                self.pending[i] = self.pending[j];
            } else if !self.occupied[j] {
                self.pending[j] = self.pending[i];
            } else {
                self.purify(i)?;
                self.purify(j)?;
            }
        }
        let map = passive_map(self.registry.cutoff(), u);
        self.apply_map(&map, i, j);
        self.occupied[i] = true;
        self.occupied[j] = true;
        Ok(())
    }

    /// Loss channel of transmission `t` on one mode.
    pub fn apply_loss(&mut self, mode: &ModeLabel, transmission: f64) -> Result<()> {
        check_probability("transmission", transmission)?;
        let m = self.registry.index_of(mode)?;
        if self.occupied[m] {
            self.pending[m] *= transmission;
        }
        Ok(())
    }

    /// Renames a mode, e.g. a spin wave read out as an idler photon.
    pub fn relabel(&mut self, from: &ModeLabel, to: ModeLabel) -> Result<()> {
        self.registry.relabel(from, to)
    }

    fn settle_for_active(&mut self, m: usize) -> Result<()> {
        if self.pending[m] == 1.0 {
            return Ok(());
        }
        if self.occupied[m] {
            self.purify(m)
        } else {
            self.pending[m] = 1.0;
            Ok(())
        }
    }

    /// Replaces the pending loss on mode `m` by a beamsplitter onto a fresh
    /// vacuum ancilla.
    fn purify(&mut self, m: usize) -> Result<()> {
        let t = self.pending[m];
        if t == 1.0 {
            return Ok(());
        }
        let ancilla = self.registry.fresh_ancilla();
        let mut registry = self.registry.clone();
        let k = registry.push(ancilla)?;
        let dim = allocate(&layout_of(&registry))?;
        // The new mode has the largest stride, so its vacuum block is the old vector.
        self.amplitudes.resize(dim, Complex64::new(0.0, 0.0));
        self.registry = registry;
        self.pending.push(1.0);
        self.occupied.push(false);
        self.pending[m] = 1.0;
        let map = passive_map(self.registry.cutoff(), beamsplitter_matrix(1.0 - t));
        self.apply_map(&map, m, k);
        self.occupied[k] = true;
        Ok(())
    }
}

/// Binomial thinning of a photon-number distribution.
pub(crate) fn thin(raw: &[f64], t: f64) -> Vec<f64> {
    if t == 1.0 {
        return raw.to_vec();
    }
    let mut out = vec![0.0; raw.len()];
    for (n, &p) in raw.iter().enumerate() {
        let mut c = 1.0;
        for k in 0..=n {
            out[k] += p * c * t.powi(k as i32) * (1.0 - t).powi((n - k) as i32);
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
    }
    out
}
