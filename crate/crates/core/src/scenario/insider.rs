use crate::delay::{ExecutionDelay, ExecutionDelayFamily, InformationDelayFamily};
use crate::market::{Asset, Market};
use crate::prob::{FiniteSpace, Filtration, Partition, StoppingProcess};
use crate::{int, Error, Result};

pub const DEFAULT_STATE_CAP: usize = 1 << 14;

/// All `±1` paths of length `steps`, uniformly weighted. State `ω` takes an
/// up-step at step `k` (1-based) iff bit `steps − k` of `ω` is set.
struct Walk {
    steps: usize,
}

impl Walk {
    fn new(steps: usize, cap: usize) -> Result<Self> {
        let states = 1usize.checked_shl(steps as u32).unwrap_or(usize::MAX);
        if steps >= usize::BITS as usize || states > cap {
            return Err(Error::StateSpaceTooLarge { states, cap });
        }
        Ok(Self { steps })
    }

    fn states(&self) -> usize {
        1 << self.steps
    }

    fn up(&self, w: usize, k: usize) -> bool {
        (w >> (self.steps - k)) & 1 == 1
    }

    fn name(&self, w: usize) -> String {
        (1..=self.steps).map(|k| if self.up(w, k) { 'u' } else { 'd' }).collect()
    }

    fn value(&self, w: usize, t: usize) -> i64 {
        (1..=t.min(self.steps)).map(|k| if self.up(w, k) { 1 } else { -1 }).sum()
    }

    /// `σ(W_0, …, W_r)`.
    fn revealed(&self, r: usize) -> Partition {
        let r = r.min(self.steps);
        Partition::from_key(self.states(), |w| w >> (self.steps - r))
    }

    fn space(&self, n: usize, n_ext: usize) -> Result<FiniteSpace> {
        let names = (0..self.states()).map(|w| self.name(w)).collect();
        let p = crate::rat(1, self.states() as i64);
        FiniteSpace::new(names, vec![p; self.states()], n, n_ext)
    }

    fn asset(&self, last: usize) -> Asset {
        Asset {
            id: "W".into(),
            prices: (0..=last)
                .map(|t| (0..self.states()).map(|w| int(self.value(w, t))).collect())
                .collect(),
        }
    }
}

fn check_params(steps: usize, lookahead: usize) -> Result<()> {
    if steps < 2 || lookahead > steps {
        return Err(Error::Precondition(vec![format!(
            "insider markets need n ≥ 2 and 0 ≤ h ≤ n, got n = {steps}, h = {lookahead}"
        )]));
    }
    Ok(())
}

/// Insider market with information lookahead `h` and the undoing delay
/// `δ(t) = (t − h)_+`.
///
/// Paths have length `n + h`; `S_t = W_t`; `𝒢_t` reveals the walk up to
/// `t + h`; the trading filtration is trivial at 0 and equals `𝒢_t` after.
pub fn gen_insider_market(steps: usize, lookahead: usize, state_cap: usize) -> Result<(Market, InformationDelayFamily)> {
    check_params(steps, lookahead)?;
    let walk = Walk::new(steps + lookahead, state_cap)?;
    let grand = Filtration::new((0..=steps).map(|t| walk.revealed(t + lookahead)).collect())?;
    let trading = Filtration::new(
        (0..=steps)
            .map(|t| if t == 0 { Partition::trivial(walk.states()) } else { walk.revealed(t + lookahead) })
            .collect(),
    )?;
    let market = Market::new(
        walk.space(steps, steps)?,
        vec![walk.asset(steps)],
        vec![[0].into_iter().collect()],
        vec![trading],
        grand,
    )?;
    let delta = StoppingProcess::from_fn(steps + 1, Filtration::trivial(walk.states(), steps + 1), |t, _| {
        t.saturating_sub(lookahead)
    });
    Ok((market, InformationDelayFamily { delays: vec![delta] }))
}

/// Insider market seen through execution delay `π(t) = t + h`.
///
/// Paths have length `n + 2h`, `S_t = W_t` up to `n_ext = n + h`, and
/// `ℱ_t = 𝒢_t` reveal the walk up to `t + h`.
pub fn gen_insider_execution_market(
    steps: usize,
    lookahead: usize,
    state_cap: usize,
) -> Result<(Market, ExecutionDelayFamily)> {
    check_params(steps, lookahead)?;
    let walk = Walk::new(steps + 2 * lookahead, state_cap)?;
    let n_ext = steps + lookahead;
    let grand = Filtration::new((0..=n_ext).map(|t| walk.revealed(t + lookahead)).collect())?;
    let trading = grand.resized(steps + 1);
    let market = Market::new(
        walk.space(steps, n_ext)?,
        vec![walk.asset(n_ext)],
        vec![[0].into_iter().collect()],
        vec![trading],
        grand,
    )?;
    let pi = StoppingProcess::from_fn(steps + 1, Filtration::trivial(walk.states(), n_ext + 1), |t, _| {
        t + lookahead
    });
    let family = ExecutionDelayFamily {
        delays: vec![ExecutionDelay { process: pi, cap: None }],
    };
    Ok((market, family))
}
