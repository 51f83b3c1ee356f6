use super::Partition;
use crate::{Error, Result};

/// A refining sequence of partitions indexed by grid time.
///
/// Reads past the last stored time return the last partition, so a
/// filtration over `0..=N` is implicitly extended as constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Filtration {
    parts: Vec<Partition>,
}

impl Filtration {
    pub fn new(parts: Vec<Partition>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidPartition("a filtration needs at least one time".into()));
        };
        let n = first.num_states();
        for p in &parts {
            if p.num_states() != n {
                return Err(Error::MismatchedStates {
                    expected: n,
                    found: p.num_states(),
                });
            }
        }
        if let Some(t) = (1..parts.len()).find(|&t| !parts[t].refines(&parts[t - 1])) {
            return Err(Error::InvalidPartition(format!(
                "partition at time {t} does not refine the one at time {}",
                t - 1
            )));
        }
        Ok(Self { parts })
    }

    pub fn constant(p: Partition, len: usize) -> Self {
        Self {
            parts: vec![p; len.max(1)],
        }
    }

    pub fn trivial(num_states: usize, len: usize) -> Self {
        Self::constant(Partition::trivial(num_states), len)
    }

    /// Number of stored times.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last_time(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn num_states(&self) -> usize {
        self.parts[0].num_states()
    }

    /// Partition at `t`, extended as constant past the last stored time.
    pub fn at(&self, t: usize) -> &Partition {
        &self.parts[t.min(self.parts.len() - 1)]
    }

    pub fn parts(&self) -> &[Partition] {
        &self.parts
    }

    /// Keeps times `0..len`, extending constantly if `len` exceeds the stored length.
    pub fn resized(&self, len: usize) -> Self {
        Self {
            parts: (0..len.max(1)).map(|t| self.at(t).clone()).collect(),
        }
    }

    /// `true` iff `other` is coarser at every time in `0..max(len)`.
    pub fn refines(&self, other: &Filtration) -> bool {
        (0..self.len().max(other.len())).all(|t| self.at(t).refines(other.at(t)))
    }

    /// Pointwise-in-time meet.
    pub fn meet(&self, other: &Filtration) -> Filtration {
        let len = self.len().max(other.len());
        Filtration {
            parts: (0..len).map(|t| self.at(t).meet(other.at(t))).collect(),
        }
    }

    /// Pointwise-in-time join.
    pub fn join(&self, other: &Filtration) -> Filtration {
        let len = self.len().max(other.len());
        Filtration {
            parts: (0..len).map(|t| self.at(t).join(other.at(t))).collect(),
        }
    }
}
