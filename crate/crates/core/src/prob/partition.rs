use std::collections::HashMap;
use std::hash::Hash;

use num_traits::{Signed, Zero};

use crate::{Error, Rational, Result};

/// A σ-field on `{0, …, n−1}`, stored by its atoms.
///
/// The representation is canonical: atoms are sorted internally and ordered
/// by their smallest state, so two partitions are equal as σ-fields iff they
/// are equal as values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    /// Canonical atom index of every state.
    labels: Vec<usize>,
    atoms: Vec<Vec<usize>>,
}

impl Partition {
    /// Groups states with equal keys.
    pub fn from_key<K: Eq + Hash>(num_states: usize, key: impl Fn(usize) -> K) -> Self {
        let mut first_seen: HashMap<K, usize> = HashMap::new();
        let mut labels = Vec::with_capacity(num_states);
        let mut atoms: Vec<Vec<usize>> = Vec::new();
        for w in 0..num_states {
            let next = atoms.len();
            let label = *first_seen.entry(key(w)).or_insert(next);
            if label == next {
                atoms.push(Vec::new());
            }
            atoms[label].push(w);
            labels.push(label);
        }
        Self { labels, atoms }
    }

    pub fn from_atoms(num_states: usize, atoms: &[Vec<usize>]) -> Result<Self> {
        let mut label = vec![usize::MAX; num_states];
        for (i, atom) in atoms.iter().enumerate() {
            if atom.is_empty() {
                return Err(Error::InvalidPartition(format!("atom {i} is empty")));
            }
            for &w in atom {
                if w >= num_states {
                    return Err(Error::InvalidPartition(format!("state {w} out of range")));
                }
                if label[w] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("state {w} appears in two atoms")));
                }
                label[w] = i;
            }
        }
        if let Some(w) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("state {w} is not covered by any atom")));
        }
        Ok(Self::from_key(num_states, |w| label[w]))
    }

    pub fn trivial(num_states: usize) -> Self {
        Self::from_key(num_states, |_| ())
    }

    pub fn discrete(num_states: usize) -> Self {
        Self::from_key(num_states, |w| w)
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    /// Index of the atom containing `state`.
    pub fn label(&self, state: usize) -> usize {
        self.labels[state]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn atom_of(&self, state: usize) -> &[usize] {
        &self.atoms[self.labels[state]]
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.num_states() == other.num_states() {
            Ok(())
        } else {
            Err(Error::MismatchedStates {
                expected: self.num_states(),
                found: other.num_states(),
            })
        }
    }

    /// `true` iff every atom of `self` lies inside an atom of `coarse`,
    /// i.e. `σ(coarse) ⊆ σ(self)`. Panics on mismatched state sets.
    pub fn refines(&self, coarse: &Partition) -> bool {
        assert_eq!(self.num_states(), coarse.num_states(), "mismatched state sets");
        self.atoms
            .iter()
            .all(|atom| atom.iter().all(|&w| coarse.labels[w] == coarse.labels[atom[0]]))
    }

    /// Coarsest common refinement.
    pub fn join(&self, other: &Partition) -> Partition {
        assert_eq!(self.num_states(), other.num_states(), "mismatched state sets");
        Self::from_key(self.num_states(), |w| (self.labels[w], other.labels[w]))
    }

    /// Finest common coarsening (intersection of the σ-fields).
    pub fn meet(&self, other: &Partition) -> Partition {
        assert_eq!(self.num_states(), other.num_states(), "mismatched state sets");
        let n = self.num_states();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for p in [self, other] {
            for atom in &p.atoms {
                for &w in &atom[1..] {
                    let a = find(&mut parent, atom[0]);
                    let b = find(&mut parent, w);
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..n).map(|w| find(&mut parent, w)).collect();
        Self::from_key(n, |w| roots[w])
    }

    /// `true` iff `x` is constant on every atom.
    pub fn is_measurable<T: PartialEq>(&self, x: &[T]) -> bool {
        x.len() == self.num_states() && self.atoms.iter().all(|atom| atom.iter().all(|&w| x[w] == x[atom[0]]))
    }

    /// `true` iff the indicated set is a union of atoms.
    pub fn contains_set(&self, set: &[bool]) -> bool {
        self.is_measurable(set)
    }
}

/// `refines(fine, coarse) ⇔ σ(coarse) ⊆ σ(fine)`.
pub fn refines(fine: &Partition, coarse: &Partition) -> Result<bool> {
    fine.same_space(coarse)?;
    Ok(fine.refines(coarse))
}

/// σ-field generated by the union of the inputs.
pub fn sigma_join(parts: &[&Partition]) -> Result<Partition> {
    let (first, rest) = parts.split_first().ok_or(Error::EmptyJoin)?;
    let mut out = (*first).clone();
    for p in rest {
        out.same_space(p)?;
        out = out.join(p);
    }
    Ok(out)
}

/// Intersection of the σ-fields.
pub fn meet(parts: &[&Partition]) -> Result<Partition> {
    let (first, rest) = parts.split_first().ok_or(Error::EmptyJoin)?;
    let mut out = (*first).clone();
    for p in rest {
        out.same_space(p)?;
        out = out.meet(p);
    }
    Ok(out)
}

/// `E_q[x | σ]`, constant on atoms.
pub fn conditional_expectation(x: &[Rational], sigma: &Partition, q: &[Rational]) -> Result<Vec<Rational>> {
    let n = sigma.num_states();
    if x.len() != n || q.len() != n {
        return Err(Error::MismatchedStates {
            expected: n,
            found: if x.len() != n { x.len() } else { q.len() },
        });
    }
    let mut out = vec![Rational::zero(); n];
    for atom in sigma.atoms() {
        let mass: Rational = atom.iter().map(|&w| &q[w]).sum();
        if !mass.is_positive() {
            return Err(Error::ZeroMassAtom);
        }
        let weighted: Rational = atom.iter().map(|&w| &q[w] * &x[w]).sum();
        let value = weighted / mass;
        for &w in atom {
            out[w] = value.clone();
        }
    }
    Ok(out)
}
