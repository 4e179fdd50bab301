//! Density operator as an explicit sum of unnormalised pure branches, with
//! loss applied through its Kraus operators. Slow, but independent of the
//! pending-loss bookkeeping in [`FockState`].

use num_complex::Complex64;

use super::basis::{passive_map, squeezer_map, Layout, TwoModeMap};
use super::detection::{accumulate, resolve, ClickDistribution, Detector};
use super::registry::{ModeLabel, ModeRegistry};
use super::state::{allocate, beamsplitter_matrix, layout_of, rotation_matrix, FockState};
use crate::analytic::params::check_probability;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct MixedState {
    registry: ModeRegistry,
    branches: Vec<Vec<Complex64>>,
}

impl MixedState {
    pub fn vacuum(registry: ModeRegistry) -> Result<Self> {
        Ok(Self::from_pure(&FockState::vacuum(registry)?))
    }

    /// Pure state without pending loss.
    pub fn from_pure(state: &FockState) -> Self {
        debug_assert!(state.pending.iter().all(|&t| t == 1.0));
        MixedState {
            registry: state.registry.clone(),
            branches: vec![state.amplitudes.clone()],
        }
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn trace(&self) -> f64 {
        self.branches.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    fn layout(&self) -> Layout {
        layout_of(&self.registry)
    }

    fn pair(&self, a: &ModeLabel, b: &ModeLabel) -> Result<(usize, usize)> {
        let (i, j) = (self.registry.index_of(a)?, self.registry.index_of(b)?);
        if i == j {
            return Err(Error::domain(format!("two-mode gate on a single mode {a}")));
        }
        Ok((i, j))
    }

    fn apply_map(&mut self, map: &TwoModeMap, i: usize, j: usize) {
        let layout = self.layout();
        for b in &mut self.branches {
            *b = map.apply(&layout, b, i, j);
        }
    }

    pub fn apply_two_mode_squeezer(&mut self, a: &ModeLabel, b: &ModeLabel, r: f64) -> Result<()> {
        let (i, j) = self.pair(a, b)?;
        let map = squeezer_map(self.registry.cutoff(), r);
        self.apply_map(&map, i, j);
        Ok(())
    }

    pub fn apply_beamsplitter(&mut self, a: &ModeLabel, b: &ModeLabel, reflectance: f64) -> Result<()> {
        check_probability("reflectance", reflectance)?;
        let (i, j) = self.pair(a, b)?;
        self.apply_map(&passive_map(self.registry.cutoff(), beamsplitter_matrix(reflectance)), i, j);
        Ok(())
    }

    pub fn apply_polarization_rotation(&mut self, h: &ModeLabel, v: &ModeLabel, angle: f64) -> Result<()> {
        let (i, j) = self.pair(h, v)?;
        self.apply_map(&passive_map(self.registry.cutoff(), rotation_matrix(angle)), i, j);
        Ok(())
    }

    /// `K_k |n> = sqrt(C(n, k) t^(n-k) (1-t)^k) |n - k>`, one branch per `k`.
    pub fn apply_loss(&mut self, mode: &ModeLabel, transmission: f64) -> Result<()> {
        check_probability("transmission", transmission)?;
        let m = self.registry.index_of(mode)?;
        if transmission == 1.0 {
            return Ok(());
        }
        let layout = self.layout();
        let stride = layout.stride(m);
        let mut out = Vec::new();
        for branch in &self.branches {
            for k in 0..=layout.cutoff {
                let mut next = vec![Complex64::new(0.0, 0.0); branch.len()];
                let mut any = false;
                for (idx, &a) in branch.iter().enumerate() {
                    let n = layout.occupation(idx, m);
                    if n < k || a.norm_sqr() == 0.0 {
                        continue;
                    }
                    let w = binomial(n, k) * transmission.powi((n - k) as i32) * (1.0 - transmission).powi(k as i32);
                    if w == 0.0 {
                        continue;
                    }
                    next[idx - k * stride] += a * w.sqrt();
                    any = true;
                }
                if any {
                    out.push(next);
                }
            }
        }
        self.branches = out;
        Ok(())
    }

    pub fn relabel(&mut self, from: &ModeLabel, to: ModeLabel) -> Result<()> {
        self.registry.relabel(from, to)
    }

    /// Ideal threshold detection summed over all branches.
    pub fn click_probabilities(&self, detectors: &[Detector]) -> Result<ClickDistribution> {
        let resolved = resolve(&self.registry, detectors)?;
        let layout = self.layout();
        allocate(&layout)?;
        let ones = vec![1.0; self.registry.len()];
        let mut probabilities = vec![0.0; 1 << detectors.len()];
        for b in &self.branches {
            accumulate(&layout, b, &ones, &resolved, &mut probabilities);
        }
        Ok(ClickDistribution {
            names: detectors.iter().map(|d| d.name.clone()).collect(),
            probabilities,
            leakage: (1.0 - self.trace()).max(0.0),
        })
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
