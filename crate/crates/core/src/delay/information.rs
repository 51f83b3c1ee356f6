use crate::market::{IndexSet, Market};
use crate::prob::{stopped_sigma_field, validate_stopping_process, BoundMode, Filtration, StoppingProcess};
use crate::{Error, Result, Violation};

/// One information delay `δ^A` per index set, aligned with
/// `Market::index_system`. Each has as many rows as the trading filtration
/// of its index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationDelayFamily {
    pub delays: Vec<StoppingProcess>,
}

impl InformationDelayFamily {
    /// `δ^A(t) = t` with delay information equal to `ℱ^A`.
    pub fn zero(m: &Market) -> Self {
        let delays = m
            .trading
            .iter()
            .map(|f| StoppingProcess::from_fn(f.len(), f.clone(), |t, _| t))
            .collect();
        Self { delays }
    }
}

pub fn validate_information_family(m: &Market, d: &InformationDelayFamily) -> Vec<Violation> {
    let mut out = Vec::new();
    if d.delays.len() != m.index_system.len() {
        out.push(Violation::new(
            "shape mismatch",
            format!("{} information delays for {} index sets", d.delays.len(), m.index_system.len()),
        ));
        return out;
    }
    for (i, delta) in d.delays.iter().enumerate() {
        let label = m.set_label(&m.index_system[i]);
        if delta.rows() != m.trading[i].len() || delta.num_states() != m.num_states() {
            out.push(Violation::new(
                "shape mismatch",
                format!("delay of {label} must have {} rows over {} states", m.trading[i].len(), m.num_states()),
            ));
            continue;
        }
        for v in validate_stopping_process(delta, BoundMode::Information) {
            out.push(Violation::new(v.rule, format!("{label}: {}", v.detail)));
        }
        if let Some(t) = (0..delta.rows()).find(|&t| !m.trading_at(i, t).refines(delta.info.at(t))) {
            out.push(Violation::new(
                "delay information exceeds trading filtration",
                format!("{label}: delay information at time {t} is not contained in ℱ^A"),
            ));
        }
    }
    out
}

/// `t ↦ ℱ_{δ(t)}`, the σ-field of the `δ(t)`-past at every `t`.
pub fn delayed_trading_filtration(f: &Filtration, delta: &StoppingProcess) -> Result<Filtration> {
    let mut violations = validate_stopping_process(delta, BoundMode::Information);
    if delta.num_states() != f.num_states() {
        return Err(Error::MismatchedStates {
            expected: f.num_states(),
            found: delta.num_states(),
        });
    }
    if let Some(t) = (0..delta.rows()).find(|&t| !f.at(t).refines(delta.info.at(t))) {
        violations.push(Violation::new(
            "delay information exceeds trading filtration",
            format!("delay information at time {t} is not contained in the filtration"),
        ));
    }
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let parts = delta
        .values
        .iter()
        .map(|row| stopped_sigma_field(f, row))
        .collect::<Result<Vec<_>>>()?;
    Filtration::new(parts)
}

/// The recursion behind [`large_delayed_filtrations`] on bare filtrations:
/// `ℱ^{A,δ}_t = σ(ℱ^{A,δ^A}_t ∪ ⋃_{A' ⊊ A} ℱ^{A',δ}_t)`.
pub fn recursive_delayed_filtrations(
    index_system: &[IndexSet],
    filtrations: &[Filtration],
    delays: &[StoppingProcess],
) -> Result<Vec<Filtration>> {
    let mut order: Vec<usize> = (0..index_system.len()).collect();
    order.sort_by_key(|&i| index_system[i].len());
    let mut done: Vec<Option<Filtration>> = vec![None; index_system.len()];
    for &i in &order {
        let mut acc = delayed_trading_filtration(&filtrations[i], &delays[i])?;
        for (j, sub) in index_system.iter().enumerate() {
            if sub.len() < index_system[i].len() && sub.is_subset(&index_system[i]) {
                let smaller = done[j].as_ref().expect("subsets are processed first");
                acc = acc.join(smaller);
            }
        }
        done[i] = Some(acc.resized(filtrations[i].len()));
    }
    Ok(done.into_iter().map(|f| f.expect("every index set processed")).collect())
}

/// Large δ-delayed trading filtrations, one per index set.
pub fn large_delayed_filtrations(m: &Market, d: &InformationDelayFamily) -> Result<Vec<Filtration>> {
    let violations = validate_information_family(m, d);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    recursive_delayed_filtrations(&m.index_system, &m.trading, &d.delays)
}

/// The market traded under the large delayed filtrations.
pub fn apply_information_delay(m: &Market, d: &InformationDelayFamily) -> Result<Market> {
    m.with_trading(large_delayed_filtrations(m, d)?)
}

/// `true` iff every delayed filtration is coarser than the original one.
pub fn check_coarseness(m: &Market, d: &InformationDelayFamily) -> Result<bool> {
    let delayed = large_delayed_filtrations(m, d)?;
    Ok(m.trading.iter().zip(&delayed).all(|(orig, del)| orig.refines(del)))
}

/// Pairs `A ⊊ A'` where the larger set sees more recent information
/// (`δ^{A'}(t, ω) > δ^A(t, ω)`), contrary to the usual modelling advice that
/// delays grow with the index set. Advisory only.
pub fn dominance_lint(m: &Market, d: &InformationDelayFamily) -> Vec<String> {
    let mut out = Vec::new();
    for (i, small) in m.index_system.iter().enumerate() {
        for (j, large) in m.index_system.iter().enumerate() {
            if i == j || !small.is_subset(large) {
                continue;
            }
            let (ds, dl) = (&d.delays[i], &d.delays[j]);
            let hit = (0..ds.rows().min(dl.rows())).find_map(|t| {
                (0..m.num_states())
                    .find(|&w| dl.values[t][w] > ds.values[t][w])
                    .map(|w| (t, w))
            });
            if let Some((t, w)) = hit {
                out.push(format!(
                    "δ^{} exceeds δ^{} at time {t}, state {}",
                    m.set_label(large),
                    m.set_label(small),
                    m.space.names()[w]
                ));
            }
        }
    }
    out
}
