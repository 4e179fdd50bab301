//! Mixed-radix occupation indexing and the sparse two-mode gate kernel.

use num_complex::Complex64;

/// Largest amplitude vector the engine will allocate.
pub const MAX_AMPLITUDES: usize = 1 << 23;

/// Occupation `n_i` of mode `i` is digit `i` of the index in base
/// `cutoff + 1`, least significant first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub modes: usize,
    pub cutoff: usize,
}

impl Layout {
    pub fn radix(&self) -> usize {
        self.cutoff + 1
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.radix().pow(mode as u32)
    }

    /// `(cutoff + 1)^modes`, or `None` past [`MAX_AMPLITUDES`].
    pub fn dimension(&self) -> Option<usize> {
        let mut dim = 1usize;
        for _ in 0..self.modes {
            dim = dim.checked_mul(self.radix()).filter(|&d| d <= MAX_AMPLITUDES)?;
        }
        Some(dim)
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.radix()
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let d = self.radix();
        (0..self.modes)
            .map(|_| {
                let n = index % d;
                index /= d;
                n
            })
            .collect()
    }

    pub fn index(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.modes || occupations.iter().any(|&n| n > self.cutoff) {
            return None;
        }
        Some(occupations.iter().rev().fold(0, |acc, &n| acc * self.radix() + n))
    }
}

/// Real matrix of a two-mode operator restricted to the truncated space:
/// `entries[n1 + d n2]` lists `(m1 + d m2, <m1 m2|U|n1 n2>)`.
#[derive(Clone, Debug)]
pub struct TwoModeMap {
    radix: usize,
    entries: Vec<Vec<(usize, f64)>>,
}

impl TwoModeMap {
    pub fn from_fn<F: FnMut(usize, usize) -> Vec<(usize, usize, f64)>>(cutoff: usize, mut column: F) -> Self {
        let d = cutoff + 1;
        let mut entries = vec![Vec::new(); d * d];
        for n2 in 0..d {
            for n1 in 0..d {
                entries[n1 + d * n2] = column(n1, n2)
                    .into_iter()
                    .filter(|&(m1, m2, c)| m1 < d && m2 < d && c != 0.0)
                    .map(|(m1, m2, c)| (m1 + d * m2, c))
                    .collect();
            }
        }
        TwoModeMap { radix: d, entries }
    }

    /// Applies the map to modes `(i, j)` of `amps`.
    pub fn apply(&self, layout: &Layout, amps: &[Complex64], i: usize, j: usize) -> Vec<Complex64> {
        debug_assert_eq!(self.radix, layout.radix());
        let d = self.radix;
        let (si, sj) = (layout.stride(i), layout.stride(j));
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (idx, &a) in amps.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let ni = (idx / si) % d;
            let nj = (idx / sj) % d;
            let base = idx - ni * si - nj * sj;
            for &(local, c) in &self.entries[ni + d * nj] {
                out[base + (local % d) * si + (local / d) * sj] += a * c;
            }
        }
        out
    }
}

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

fn binomial(f: &[f64], n: usize, k: usize) -> f64 {
    f[n] / (f[k] * f[n - k])
}

/// Passive two-mode transformation sending `a_j†` to `Σ_i u[i][j] a_i†`.
pub fn passive_map(cutoff: usize, u: [[f64; 2]; 2]) -> TwoModeMap {
    let f = factorials(2 * cutoff);
    TwoModeMap::from_fn(cutoff, |n1, n2| {
        let total = n1 + n2;
        let mut column = Vec::new();
        for m1 in 0..=total {
            let m2 = total - m1;
            let mut sum = 0.0;
            // k creation operators of mode 1 stay in mode 1, l of mode 2 move to it.
            for k in 0..=n1.min(m1) {
                let l = m1 - k;
                if l > n2 {
                    continue;
                }
                sum += binomial(&f, n1, k)
                    * binomial(&f, n2, l)
                    * u[0][0].powi(k as i32)
                    * u[1][0].powi((n1 - k) as i32)
                    * u[0][1].powi(l as i32)
                    * u[1][1].powi((n2 - l) as i32);
            }
            let scale = (f[m1] * f[m2] / (f[n1] * f[n2])).sqrt();
            column.push((m1, m2, scale * sum));
        }
        column
    })
}

/// `exp(r (a†b† - ab))` through the normal-ordered factorisation
/// `exp(tanh r a†b†) cosh(r)^-(n_a + n_b + 1) exp(-tanh r ab)`.
pub fn squeezer_map(cutoff: usize, r: f64) -> TwoModeMap {
    let tau = r.tanh();
    let sech = r.cosh().recip();
    let f = factorials(2 * cutoff + 2);
    TwoModeMap::from_fn(cutoff, |n1, n2| {
        let mut column = Vec::new();
        for j in 0..=n1.min(n2) {
            let (p1, p2) = (n1 - j, n2 - j);
            let down = (-tau).powi(j as i32) / f[j] * (f[n1] / f[p1] * f[n2] / f[p2]).sqrt();
            let damp = sech.powi((p1 + p2 + 1) as i32);
            for i in 0..=(cutoff - p1.max(p2)) {
                let up = tau.powi(i as i32) / f[i] * (f[p1 + i] / f[p1] * f[p2 + i] / f[p2]).sqrt();
                column.push((p1 + i, p2 + i, down * damp * up));
            }
        }
        // Merge contributions to the same output.
        column.sort_by_key(|&(m1, m2, _)| (m1, m2));
        column.dedup_by(|next, kept| {
            if (next.0, next.1) == (kept.0, kept.1) {
                kept.2 += next.2;
                true
            } else {
                false
            }
        });
        column
    })
}
