use std::fmt;

use crate::analytic::Site;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

/// Label of one bosonic mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeLabel {
    /// Signal field in beamsplitter port 1 or 2. Site A's signal enters
    /// port 1 and site B's port 2.
    Signal { port: u8, polarization: Polarization },
    SpinWave(Site),
    Idler(Site),
    /// Environment mode created when a loss channel has to be purified.
    Ancilla(u32),
    /// Free-form mode for standalone circuits.
    Named(String),
}

impl ModeLabel {
    pub fn signal(port: u8, polarization: Polarization) -> Self {
        ModeLabel::Signal { port, polarization }
    }

    pub fn named(name: &str) -> Self {
        ModeLabel::Named(name.to_string())
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::Signal { port, polarization } => write!(f, "signal{port}{polarization:?}"),
            ModeLabel::SpinWave(site) => write!(f, "spin{site}"),
            ModeLabel::Idler(site) => write!(f, "idler{site}"),
            ModeLabel::Ancilla(k) => write!(f, "ancilla{k}"),
            ModeLabel::Named(name) => f.write_str(name),
        }
    }
}

/// Ordered, duplicate-free list of modes sharing one photon-number cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeRegistry {
    modes: Vec<ModeLabel>,
    cutoff: usize,
}

impl ModeRegistry {
    pub fn new(modes: Vec<ModeLabel>, cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::domain(format!("cutoff {cutoff} is below 2")));
        }
        let mut reg = ModeRegistry { modes: Vec::new(), cutoff };
        for label in modes {
            reg.push(label)?;
        }
        Ok(reg)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn contains(&self, label: &ModeLabel) -> bool {
        self.modes.contains(label)
    }

    pub fn index_of(&self, label: &ModeLabel) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m == label)
            .ok_or_else(|| Error::domain(format!("mode {label} is not registered")))
    }

    pub(crate) fn push(&mut self, label: ModeLabel) -> Result<usize> {
        if self.contains(&label) {
            return Err(Error::domain(format!("mode {label} registered twice")));
        }
        self.modes.push(label);
        Ok(self.modes.len() - 1)
    }

    pub(crate) fn relabel(&mut self, from: &ModeLabel, to: ModeLabel) -> Result<()> {
        let idx = self.index_of(from)?;
        if self.contains(&to) && &to != from {
            return Err(Error::domain(format!("mode {to} registered twice")));
        }
        self.modes[idx] = to;
        Ok(())
    }

    /// First ancilla label not yet in use.
    pub(crate) fn fresh_ancilla(&self) -> ModeLabel {
        let next = self
            .modes
            .iter()
            .filter_map(|m| match m {
                ModeLabel::Ancilla(k) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        ModeLabel::Ancilla(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_small_cutoff() {
        let a = ModeLabel::named("a");
        assert!(ModeRegistry::new(vec![a.clone(), a.clone()], 3).is_err());
        assert!(ModeRegistry::new(vec![a.clone()], 1).is_err());
        let reg = ModeRegistry::new(vec![a.clone(), ModeLabel::SpinWave(Site::A)], 3).unwrap();
        assert_eq!(reg.index_of(&ModeLabel::SpinWave(Site::A)).unwrap(), 1);
        assert!(reg.index_of(&ModeLabel::Idler(Site::A)).is_err());
        assert_eq!(reg.fresh_ancilla(), ModeLabel::Ancilla(0));
    }
}
