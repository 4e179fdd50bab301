//! Text dump of a state for golden tests.
//!
//! ```text
//! # modes: <label> <label> ...
//! # cutoff: <n>
//! # pending: <t> <t> ...
//! <n_1> <n_2> ... <re> <im>
//! ```
//!
//! One line per nonzero amplitude in index order (first mode fastest);
//! floats are written as `{:+.17e}`.

use std::fmt::Write;

use super::state::FockState;

impl FockState {
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let labels: Vec<String> = self.registry.labels().iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "# modes: {}", labels.join(" "));
        let _ = writeln!(out, "# cutoff: {}", self.registry.cutoff());
        let pending: Vec<String> = self.pending.iter().map(|t| format!("{t:+.17e}")).collect();
        let _ = writeln!(out, "# pending: {}", pending.join(" "));
        let layout = self.layout();
        for (idx, a) in self.amplitudes.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let occ: Vec<String> = layout.occupations(idx).iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{} {:+.17e} {:+.17e}", occ.join(" "), a.re, a.im);
        }
        out
    }
}
