use super::mixed::MixedState;
use super::registry::{ModeLabel, ModeRegistry};
use super::state::FockState;
use crate::analytic::params::check_probability;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    TwoModeSqueezer { r: f64, modes: (ModeLabel, ModeLabel) },
    /// Only `R` is stored; `T = 1 - R`.
    Beamsplitter { reflectance: f64, modes: (ModeLabel, ModeLabel) },
    /// `(H, V)` pair at one port.
    PolarizationRotation { angle: f64, modes: (ModeLabel, ModeLabel) },
    Loss { transmission: f64, mode: ModeLabel },
    /// Renames a mode without touching the state.
    Relabel { from: ModeLabel, to: ModeLabel },
}

/// Ordered list of mode transformations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OpticalCircuit {
    elements: Vec<Element>,
}

impl OpticalCircuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn push(&mut self, element: Element) -> &mut Self {
        self.elements.push(element);
        self
    }

    pub fn squeezer(&mut self, a: ModeLabel, b: ModeLabel, r: f64) -> &mut Self {
        self.push(Element::TwoModeSqueezer { r, modes: (a, b) })
    }

    pub fn beamsplitter(&mut self, a: ModeLabel, b: ModeLabel, reflectance: f64) -> &mut Self {
        self.push(Element::Beamsplitter {
            reflectance,
            modes: (a, b),
        })
    }

    pub fn rotation(&mut self, h: ModeLabel, v: ModeLabel, angle: f64) -> &mut Self {
        self.push(Element::PolarizationRotation { angle, modes: (h, v) })
    }

    pub fn loss(&mut self, mode: ModeLabel, transmission: f64) -> &mut Self {
        self.push(Element::Loss { transmission, mode })
    }

    pub fn relabel(&mut self, from: ModeLabel, to: ModeLabel) -> &mut Self {
        self.push(Element::Relabel { from, to })
    }

    /// Checks every element against the registry it will run on.
    pub fn validate(&self, registry: &ModeRegistry) -> Result<()> {
        let mut labels: Vec<ModeLabel> = registry.labels().to_vec();
        let known = |labels: &[ModeLabel], m: &ModeLabel| {
            if labels.contains(m) {
                Ok(())
            } else {
                Err(Error::domain(format!("circuit references unregistered mode {m}")))
            }
        };
        for e in &self.elements {
            match e {
                Element::TwoModeSqueezer { modes: (a, b), .. }
                | Element::Beamsplitter { modes: (a, b), .. }
                | Element::PolarizationRotation { modes: (a, b), .. } => {
                    known(&labels, a)?;
                    known(&labels, b)?;
                    if a == b {
                        return Err(Error::domain(format!("two-mode element on a single mode {a}")));
                    }
                }
                Element::Loss { mode, .. } => known(&labels, mode)?,
                Element::Relabel { from, to } => {
                    known(&labels, from)?;
                    if labels.contains(to) {
                        return Err(Error::domain(format!("relabel target {to} already exists")));
                    }
                    let i = labels.iter().position(|m| m == from).unwrap_or_default();
                    labels[i] = to.clone();
                }
            }
            match e {
                Element::Beamsplitter { reflectance, .. } => check_probability("reflectance", *reflectance)?,
                Element::Loss { transmission, .. } => check_probability("transmission", *transmission)?,
                _ => {}
            }
        }
        Ok(())
    }

    pub fn apply(&self, mut state: FockState) -> Result<FockState> {
        self.validate(state.registry())?;
        for e in &self.elements {
            match e {
                Element::TwoModeSqueezer { r, modes: (a, b) } => state.apply_two_mode_squeezer(a, b, *r)?,
                Element::Beamsplitter { reflectance, modes: (a, b) } => state.apply_beamsplitter(a, b, *reflectance)?,
                Element::PolarizationRotation { angle, modes: (h, v) } => state.apply_polarization_rotation(h, v, *angle)?,
                Element::Loss { transmission, mode } => state.apply_loss(mode, *transmission)?,
                Element::Relabel { from, to } => state.relabel(from, to.clone())?,
            }
        }
        Ok(state)
    }

    pub fn apply_mixed(&self, mut state: MixedState) -> Result<MixedState> {
        self.validate(state.registry())?;
        for e in &self.elements {
            match e {
                Element::TwoModeSqueezer { r, modes: (a, b) } => state.apply_two_mode_squeezer(a, b, *r)?,
                Element::Beamsplitter { reflectance, modes: (a, b) } => state.apply_beamsplitter(a, b, *reflectance)?,
                Element::PolarizationRotation { angle, modes: (h, v) } => state.apply_polarization_rotation(h, v, *angle)?,
                Element::Loss { transmission, mode } => state.apply_loss(mode, *transmission)?,
                Element::Relabel { from, to } => state.relabel(from, to.clone())?,
            }
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_is_identity() {
        let reg = ModeRegistry::new(vec![ModeLabel::named("a"), ModeLabel::named("b")], 3).unwrap();
        let s = FockState::number_state(reg, &[2, 1]).unwrap();
        let out = OpticalCircuit::new().apply(s.clone()).unwrap();
        assert_eq!(out.amplitudes(), s.amplitudes());
    }

    #[test]
    fn validation_catches_unknown_modes() {
        let reg = ModeRegistry::new(vec![ModeLabel::named("a")], 3).unwrap();
        let mut c = OpticalCircuit::new();
        c.loss(ModeLabel::named("b"), 0.5);
        assert!(c.validate(&reg).is_err());
        let mut c = OpticalCircuit::new();
        c.relabel(ModeLabel::named("a"), ModeLabel::named("c")).loss(ModeLabel::named("c"), 0.5);
        assert!(c.validate(&reg).is_ok());
    }
}
