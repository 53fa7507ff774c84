//! Factors induced by sign patterns and conditional averages over them.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Cap on the number of defining functions (2^24 atoms).
pub const MAX_FACTOR_FUNCTIONS: usize = 24;

/// A partition of a finite ground set into atoms of equal sign pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorPartition {
    /// Atom id of every ground element.
    pub atom_of: Vec<usize>,
    /// Members of each atom, ascending. Ids follow first appearance.
    pub atoms: Vec<Vec<usize>>,
    /// Pattern of each atom: the value of every defining function on it.
    pub patterns: Vec<Vec<i8>>,
}

impl FactorPartition {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn ground_size(&self) -> usize {
        self.atom_of.len()
    }

    /// Lifts a per-atom vector to the ground set.
    pub fn expand(&self, per_atom: &[f64]) -> Vec<f64> {
        self.atom_of.iter().map(|&a| per_atom[a]).collect()
    }
}

/// Groups elements of [n] by the vector of values of the defining functions.
pub fn build_factor(functions: &[Vec<i8>], n: usize) -> Result<FactorPartition> {
    if functions.len() > MAX_FACTOR_FUNCTIONS {
        return Err(Error::cap(
            "factor defining functions",
            functions.len() as u128,
            MAX_FACTOR_FUNCTIONS as u128,
        ));
    }
    if let Some(f) = functions.iter().find(|f| f.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: f.len(),
        });
    }
    Ok(partition_by_patterns(functions, n))
}

/// The same partition without the function-count cap; atoms never exceed n.
pub(crate) fn partition_by_patterns(functions: &[Vec<i8>], n: usize) -> FactorPartition {
    let mut ids: HashMap<Vec<i8>, usize> = HashMap::new();
    let mut atom_of = Vec::with_capacity(n);
    let mut atoms: Vec<Vec<usize>> = Vec::new();
    let mut patterns = Vec::new();
    for x in 0..n {
        let pat: Vec<i8> = functions.iter().map(|f| f[x]).collect();
        let id = *ids.entry(pat.clone()).or_insert_with(|| {
            atoms.push(Vec::new());
            patterns.push(pat);
            atoms.len() - 1
        });
        atoms[id].push(x);
        atom_of.push(id);
    }
    FactorPartition {
        atom_of,
        atoms,
        patterns,
    }
}

/// E[f|B] under the uniform measure.
pub fn conditional_average(f: &[f64], factor: &FactorPartition) -> Result<Vec<f64>> {
    conditional_average_weighted(f, factor, None)
}

/// E[f|B] under the measure with the given nonnegative weights (uniform when `None`).
/// Atoms of zero mass get the value 0.
pub fn conditional_average_weighted(
    f: &[f64],
    factor: &FactorPartition,
    weights: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = factor.ground_size();
    if f.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: f.len(),
        });
    }
    if let Some(w) = weights {
        if w.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: w.len(),
            });
        }
        if w.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::Invalid("weights must be nonnegative".into()));
        }
    }
    let weight = |x: usize| weights.map_or(1.0, |w| w[x]);
    let means: Vec<f64> = factor
        .atoms
        .iter()
        .map(|members| {
            let (mut num, mut den) = (0.0, 0.0);
            for &x in members {
                num += weight(x) * f[x];
                den += weight(x);
            }
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .collect();
    Ok(factor.expand(&means))
}
