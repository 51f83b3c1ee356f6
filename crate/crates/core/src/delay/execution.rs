use super::information::recursive_delayed_filtrations;
use crate::market::{Asset, Market};
use crate::prob::{stopped_sigma_field, validate_stopping_process, BoundMode, Filtration, Partition, StoppingProcess};
use crate::{Error, Result, Violation};

/// Execution delay `π^a` of one asset with its optional strict cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionDelay {
    pub process: StoppingProcess,
    pub cap: Option<usize>,
}

impl ExecutionDelay {
    /// The declared cap, or `n_ext + 1` when absent.
    pub fn effective_cap(&self, n_ext: usize) -> usize {
        self.cap.unwrap_or(n_ext + 1)
    }
}

/// One execution delay per asset, aligned with `Market::assets`. All delays
/// share the same number of rows `R + 1`; the delayed market lives on the
/// grid `0..=R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionDelayFamily {
    pub delays: Vec<ExecutionDelay>,
}

impl ExecutionDelayFamily {
    /// `π(t) = t` for `t` in `0..rows`, with the grand filtration as delay information.
    pub fn identity(m: &Market, rows: usize) -> Self {
        let delays = m
            .assets
            .iter()
            .map(|_| ExecutionDelay {
                process: StoppingProcess::from_fn(rows, m.grand.clone(), |t, _| t),
                cap: None,
            })
            .collect();
        Self { delays }
    }

    pub fn rows(&self) -> usize {
        self.delays.first().map_or(0, |d| d.process.rows())
    }
}

pub fn validate_execution_family(m: &Market, p: &ExecutionDelayFamily) -> Vec<Violation> {
    let mut out = Vec::new();
    let n_ext = m.n_ext();
    if p.delays.len() != m.assets.len() {
        out.push(Violation::new(
            "shape mismatch",
            format!("{} execution delays for {} assets", p.delays.len(), m.assets.len()),
        ));
        return out;
    }
    let rows = p.rows();
    for (asset, d) in m.assets.iter().zip(&p.delays) {
        let id = &asset.id;
        if d.process.rows() != rows || rows < m.n() + 1 || d.process.num_states() != m.num_states() {
            out.push(Violation::new(
                "shape mismatch",
                format!("delay of {id} must have a common row count of at least n + 1 = {}", m.n() + 1),
            ));
            continue;
        }
        if let Some(c) = d.cap.filter(|&c| c > n_ext + 1) {
            out.push(Violation::new(
                "execution delay cap",
                format!("cap {c} of {id} exceeds n_ext + 1 = {}", n_ext + 1),
            ));
        }
        let mode = BoundMode::Execution {
            n_ext,
            cap: d.effective_cap(n_ext),
        };
        for v in validate_stopping_process(&d.process, mode) {
            out.push(Violation::new(v.rule, format!("{id}: {}", v.detail)));
        }
        if let Some(t) = (0..=n_ext).find(|&t| !m.grand.at(t).refines(d.process.info.at(t))) {
            out.push(Violation::new(
                "delay information exceeds grand filtration",
                format!("{id}: delay information at time {t} is not contained in 𝒢"),
            ));
        }
    }
    out
}

fn ensure_valid(m: &Market, p: &ExecutionDelayFamily) -> Result<()> {
    let violations = validate_execution_family(m, p);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(violations))
    }
}

/// The market with prices `S^a(π^a(t, ω), ω)` and grand filtration
/// `σ(⋃_a 𝒢_{π^a(t)})` on the grid `0..=R`; trading filtrations unchanged.
pub fn delayed_market(m: &Market, p: &ExecutionDelayFamily) -> Result<Market> {
    ensure_valid(m, p)?;
    let rows = p.rows();
    let n_states = m.num_states();
    let assets = m
        .assets
        .iter()
        .zip(&p.delays)
        .map(|(asset, d)| Asset {
            id: asset.id.clone(),
            prices: d
                .process
                .values
                .iter()
                .map(|row| (0..n_states).map(|w| asset.prices[row[w]][w].clone()).collect())
                .collect(),
        })
        .collect();
    let mut grand = Vec::with_capacity(rows);
    for t in 0..rows {
        let mut acc = Partition::trivial(n_states);
        for d in &p.delays {
            acc = acc.join(&stopped_sigma_field(&m.grand, d.process.at(t))?);
        }
        grand.push(acc);
    }
    let trading = m.trading.iter().map(|f| f.resized(f.len().min(rows))).collect();
    Market::new(
        m.space.with_grid(m.n(), rows - 1)?,
        assets,
        m.index_system.clone(),
        trading,
        Filtration::new(grand)?,
    )
}

/// `δ(t, ω) = min{s : π(s, ω) ≥ t} ∧ n` for `t` in `0..=n`.
pub fn invert_delay(pi: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let n_states = pi.first().map_or(0, Vec::len);
    (0..=n)
        .map(|t| {
            (0..n_states)
                .map(|w| pi.iter().position(|row| row[w] >= t).unwrap_or(n).min(n))
                .collect()
        })
        .collect()
}

/// Delay `π̂` on the `π`-delayed market that reproduces the `π̃`-delayed
/// prices: `S^{a,π}(π̂(t)) = S^{a,π̃}(t)`.
///
/// `π̂(t) = min{s ≥ t : π(s) ≥ π̃(t)}`, which for continuous `π` lands on a
/// time with `π(π̂(t)) = π̃(t)`. The delay information of `π̂` is `𝔍̃`
/// stopped at `π(t)`.
pub fn superimpose_delays(pi: &ExecutionDelayFamily, pi_tilde: &ExecutionDelayFamily) -> Result<ExecutionDelayFamily> {
    if pi.delays.len() != pi_tilde.delays.len() {
        return Err(Error::Precondition(vec!["families cover different assets".into()]));
    }
    let m_rows = pi.rows();
    let mut problems = Vec::new();
    let mut delays = Vec::new();
    for (a, (base, target)) in pi.delays.iter().zip(&pi_tilde.delays).enumerate() {
        let (base, target) = (&base.process, &target.process);
        if !base.is_continuous() {
            problems.push(format!("asset {a}: base delay is not continuous"));
        }
        if target.rows() > m_rows || base.rows() != m_rows {
            problems.push(format!("asset {a}: target delay has more rows than the base delay"));
            continue;
        }
        let n_states = base.num_states();
        let mut values = Vec::with_capacity(target.rows());
        for t in 0..target.rows() {
            let mut row = Vec::with_capacity(n_states);
            for w in 0..n_states {
                let goal = target.values[t][w];
                if base.values[t][w] > goal {
                    problems.push(format!("asset {a}: π({t}) > π̃({t}) at state {w}"));
                }
                match (t..m_rows).find(|&s| base.values[s][w] >= goal) {
                    Some(s) => row.push(s),
                    None => {
                        problems.push(format!("asset {a}: π̃({t}) is beyond the range of π at state {w}"));
                        row.push(t);
                    }
                }
            }
            values.push(row);
        }
        if !problems.is_empty() {
            continue;
        }
        let info = (0..m_rows)
            .map(|t| stopped_sigma_field(&target.info, base.at(t)))
            .collect::<Result<Vec<_>>>()?;
        let process = StoppingProcess::new(values, Filtration::new(info)?);
        let mode = BoundMode::Execution {
            n_ext: m_rows - 1,
            cap: m_rows,
        };
        let violations = validate_stopping_process(&process, mode);
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        delays.push(ExecutionDelay { process, cap: None });
    }
    if problems.is_empty() {
        Ok(ExecutionDelayFamily { delays })
    } else {
        Err(Error::Precondition(problems))
    }
}

/// Pointwise minimum of several brokers' families sharing delay information.
pub fn min_delay(families: &[ExecutionDelayFamily]) -> Result<ExecutionDelayFamily> {
    let (first, rest) = families
        .split_first()
        .ok_or_else(|| Error::Precondition(vec!["no families given".into()]))?;
    let mut out = first.clone();
    for fam in rest {
        if fam.delays.len() != out.delays.len() {
            return Err(Error::Precondition(vec!["families cover different assets".into()]));
        }
        for (a, (acc, d)) in out.delays.iter_mut().zip(&fam.delays).enumerate() {
            if d.process.info != acc.process.info {
                return Err(Error::Precondition(vec![format!("asset {a}: delay information differs")]));
            }
            if d.process.rows() != acc.process.rows() {
                return Err(Error::Precondition(vec![format!("asset {a}: row counts differ")]));
            }
            for (row, other) in acc.process.values.iter_mut().zip(&d.process.values) {
                for (x, y) in row.iter_mut().zip(other) {
                    *x = (*x).min(*y);
                }
            }
            acc.cap = match (acc.cap, d.cap) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            };
        }
    }
    Ok(out)
}

/// Checks that the execution-delayed information structure can be undone by
/// an information delay: with `ℱ̃^A_t = σ(⋃_{a∈A} ℱ^A_{π^a(t)})` and
/// `δ^A = min_{a∈A} π^{a,−1}`, the recursively delayed `ℱ̃^{A,δ}` equals
/// `ℱ^A` at every `t ≤ n`.
///
/// Requires every singleton in the index system, continuous delays with
/// `π(0) = 0`, and delay information of `a` inside `ℱ^A` whenever `a ∈ A`;
/// violations are returned as a precondition error. Returns `false` if some
/// `δ^A` is not an information delay for `ℱ̃^A` or the filtrations differ.
pub fn representation_check(m: &Market, p: &ExecutionDelayFamily) -> Result<bool> {
    ensure_valid(m, p)?;
    let mut problems = Vec::new();
    for (a, asset) in m.assets.iter().enumerate() {
        if m.index_of(&[a].into_iter().collect()).is_none() {
            problems.push(format!("singleton {{{}}} is not in the index system", asset.id));
        }
        let d = &p.delays[a].process;
        if !d.is_continuous() {
            problems.push(format!("delay of {} is not continuous", asset.id));
        }
        if d.values[0].iter().any(|&v| v != 0) {
            problems.push(format!("delay of {} does not start at 0", asset.id));
        }
        for (i, set) in m.index_system.iter().enumerate() {
            if set.contains(&a) && (0..=m.n_ext()).any(|t| !m.trading_at(i, t).refines(d.info.at(t))) {
                problems.push(format!(
                    "delay information of {} is not contained in ℱ^{}",
                    asset.id,
                    m.set_label(set)
                ));
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Precondition(problems));
    }

    let n = m.n();
    let inverses: Vec<Vec<Vec<usize>>> = p.delays.iter().map(|d| invert_delay(&d.process.values, n)).collect();
    let mut enlarged = Vec::new();
    let mut deltas = Vec::new();
    for (i, set) in m.index_system.iter().enumerate() {
        let mut parts = Vec::with_capacity(n + 1);
        for t in 0..=n {
            let mut acc = Partition::trivial(m.num_states());
            for &a in set {
                acc = acc.join(&stopped_sigma_field(&m.trading[i], p.delays[a].process.at(t))?);
            }
            parts.push(acc);
        }
        let f_tilde = Filtration::new(parts)?;
        let values = (0..=n)
            .map(|t| {
                (0..m.num_states())
                    .map(|w| set.iter().map(|&a| inverses[a][t][w]).min().expect("nonempty set"))
                    .collect()
            })
            .collect();
        let delta = StoppingProcess::new(values, f_tilde.clone());
        if !validate_stopping_process(&delta, BoundMode::Information).is_empty() {
            return Ok(false);
        }
        enlarged.push(f_tilde);
        deltas.push(delta);
    }
    let rebuilt = recursive_delayed_filtrations(&m.index_system, &enlarged, &deltas)?;
    Ok(rebuilt
        .iter()
        .enumerate()
        .all(|(i, f)| (0..=n).all(|t| f.at(t) == m.trading_at(i, t))))
}
