use super::{Filtration, Partition};
use crate::{Error, Result, Violation};

/// A grid-valued process `(t, ω) ↦ values[t][ω]` together with the
/// filtration it is a stopping time for at each `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingProcess {
    pub values: Vec<Vec<usize>>,
    pub info: Filtration,
}

/// Which boundaries a stopping process must respect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// `0 ≤ δ(t) ≤ t`.
    Information,
    /// `t ≤ π(t) ≤ n_ext` and `π(t) < cap`.
    Execution { n_ext: usize, cap: usize },
}

impl StoppingProcess {
    pub fn new(values: Vec<Vec<usize>>, info: Filtration) -> Self {
        Self { values, info }
    }

    /// `values[t][ω] = f(t, ω)` for `t < rows`.
    pub fn from_fn(rows: usize, info: Filtration, f: impl Fn(usize, usize) -> usize) -> Self {
        let n = info.num_states();
        let values = (0..rows).map(|t| (0..n).map(|w| f(t, w)).collect()).collect();
        Self { values, info }
    }

    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn num_states(&self) -> usize {
        self.info.num_states()
    }

    pub fn at(&self, t: usize) -> &[usize] {
        &self.values[t]
    }

    /// Largest value taken anywhere.
    pub fn max_value(&self) -> usize {
        self.values.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Every path has increments in `{0, 1}`.
    pub fn is_continuous(&self) -> bool {
        self.values
            .windows(2)
            .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| *b == *a || *b == *a + 1))
    }
}

/// Checks that `{τ ≤ s} ∈ σ(f at s)` for every `s`. Returns the first failing `s`.
pub fn stopping_time_failure(f: &Filtration, tau: &[usize]) -> Option<usize> {
    let top = tau.iter().copied().max().unwrap_or(0).max(f.last_time());
    (0..=top).find(|&s| {
        let set: Vec<bool> = tau.iter().map(|&v| v <= s).collect();
        !f.at(s).contains_set(&set)
    })
}

pub fn is_stopping_time(f: &Filtration, tau: &[usize]) -> bool {
    tau.len() == f.num_states() && stopping_time_failure(f, tau).is_none()
}

/// The σ-field of the `τ`-past: atoms `A ∩ {τ = s}` for atoms `A` of `f` at `s`.
///
/// Times past the end of `f` read its last partition.
pub fn stopped_sigma_field(f: &Filtration, tau: &[usize]) -> Result<Partition> {
    if tau.len() != f.num_states() {
        return Err(Error::MismatchedStates {
            expected: f.num_states(),
            found: tau.len(),
        });
    }
    if let Some(s) = stopping_time_failure(f, tau) {
        return Err(Error::NotAStoppingTime(format!(
            "{{τ ≤ {s}}} is not a union of atoms at time {s}"
        )));
    }
    Ok(Partition::from_key(tau.len(), |w| {
        let s = tau[w];
        (s, f.at(s).label(w))
    }))
}

/// Lists every violated property of `sp` (empty iff valid).
pub fn validate_stopping_process(sp: &StoppingProcess, mode: BoundMode) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = sp.num_states();
    for (t, row) in sp.values.iter().enumerate() {
        if row.len() != n {
            out.push(Violation::new(
                "shape mismatch",
                format!("row {t} has {} entries, expected {n}", row.len()),
            ));
            continue;
        }
        for (w, &v) in row.iter().enumerate() {
            match mode {
                BoundMode::Information if v > t => out.push(Violation::new(
                    "information delay bounds",
                    format!("δ({t}) = {v} > {t} at state {w}"),
                )),
                BoundMode::Execution { n_ext, cap } => {
                    if v < t {
                        out.push(Violation::new(
                            "execution delay bounds",
                            format!("π({t}) = {v} < {t} at state {w}"),
                        ));
                    }
                    if v > n_ext {
                        out.push(Violation::new(
                            "execution delay bounds",
                            format!("π({t}) = {v} exceeds n_ext = {n_ext} at state {w}"),
                        ));
                    }
                    if v >= cap {
                        out.push(Violation::new(
                            "execution delay cap",
                            format!("π({t}) = {v} is not below the cap {cap} at state {w}"),
                        ));
                    }
                }
                _ => {}
            }
        }
        if let Some(s) = stopping_time_failure(&sp.info, row) {
            out.push(Violation::new(
                "stopping-time property",
                format!("{{value at time {t} ≤ {s}}} is not in the delay information at {s}"),
            ));
        }
    }
    for t in 1..sp.values.len() {
        let (prev, cur) = (&sp.values[t - 1], &sp.values[t]);
        if prev.len() != n || cur.len() != n {
            continue;
        }
        if let Some(w) = (0..n).find(|&w| cur[w] < prev[w]) {
            out.push(Violation::new(
                "path-wise monotonicity",
                format!("value drops from {} to {} between times {} and {t} at state {w}", prev[w], cur[w], t - 1),
            ));
        }
    }
    out
}
