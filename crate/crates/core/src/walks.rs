//! Tuple collections W(k) ⊆ [n]^k, walk enumerations and split operators.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::{self, DenseOperator, RotationGraph, SWideProduct, DEFAULT_DENSE_CAP};

/// Default cap on the number of materialized tuples.
pub const DEFAULT_TUPLE_CAP: usize = 2_000_000;

/// An ordered list of k-tuples over [n], stored flat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleCollection {
    n: usize,
    k: usize,
    d: usize,
    tuples: Vec<u32>,
}

impl TupleCollection {
    /// Builds the collection and checks that it is d-regular.
    pub fn new(n: usize, k: usize, d: usize, tuples: Vec<u32>) -> Result<Self> {
        let w = Self::unchecked(n, k, d, tuples)?;
        w.check_regular()?;
        Ok(w)
    }

    /// Builds the collection without the regularity witness. Entries are still range-checked.
    pub fn unchecked(n: usize, k: usize, d: usize, tuples: Vec<u32>) -> Result<Self> {
        if n == 0 || k == 0 || d == 0 {
            return Err(Error::Invalid(
                "ground size, arity and degree must be positive".into(),
            ));
        }
        if tuples.len() % k != 0 {
            return Err(Error::Invalid(format!(
                "{} entries do not split into {k}-tuples",
                tuples.len()
            )));
        }
        if let Some(&x) = tuples.iter().find(|&&x| x as usize >= n) {
            return Err(Error::Invalid(format!(
                "tuple entry {x} outside ground set of size {n}"
            )));
        }
        Ok(TupleCollection { n, k, d, tuples })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn step_degree(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.tuples.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    #[inline]
    pub fn tuple(&self, i: usize) -> &[u32] {
        &self.tuples[i * self.k..(i + 1) * self.k]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u32> {
        self.tuples.chunks_exact(self.k)
    }

    pub fn flat(&self) -> &[u32] {
        &self.tuples
    }

    /// Distinct projections onto positions a..=b (1-indexed), sorted.
    pub fn projection(&self, a: usize, b: usize) -> Result<Vec<Vec<u32>>> {
        self.check_range(a, b)?;
        let set: HashSet<&[u32]> = self.iter().map(|t| &t[a - 1..b]).collect();
        let mut out: Vec<Vec<u32>> = set.into_iter().map(<[u32]>::to_vec).collect();
        out.sort_unstable();
        Ok(out)
    }

    fn check_range(&self, a: usize, b: usize) -> Result<()> {
        if a == 0 || a > b || b > self.k {
            return Err(Error::Invalid(format!(
                "positions {a}..={b} invalid for arity {}",
                self.k
            )));
        }
        Ok(())
    }

    /// |W[a,b]| = d^{b−a}·n for every 1 ≤ a ≤ b ≤ k, and W[a] = [n].
    pub fn check_regular(&self) -> Result<()> {
        for a in 1..=self.k {
            for b in a..=self.k {
                let count = self
                    .iter()
                    .map(|t| &t[a - 1..b])
                    .collect::<HashSet<_>>()
                    .len();
                let want = (self.d as u128).pow((b - a) as u32) * self.n as u128;
                if count as u128 != want {
                    return Err(Error::NotRegular(format!(
                        "|W[{a},{b}]| = {count} but d^(b-a)*n = {want} (d = {}, n = {})",
                        self.d, self.n
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_regular(&self) -> bool {
        self.check_regular().is_ok()
    }
}

/// All of [n]^k in lexicographic order, with step degree n.
pub fn complete(n: usize, k: usize, cap: usize) -> Result<TupleCollection> {
    let count = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    Error::check_cap("complete collection size", count, cap as u128)?;
    let count = count as usize;
    let mut tuples = Vec::with_capacity(count * k);
    for idx in 0..count {
        let mut rem = idx;
        let start = tuples.len();
        tuples.resize(start + k, 0);
        for pos in (0..k).rev() {
            tuples[start + pos] = (rem % n) as u32;
            rem /= n;
        }
    }
    TupleCollection::unchecked(n, k, n, tuples)
}

/// Shared enumeration: for each start vertex, every port sequence in lexicographic order.
fn enumerate_walks(
    ground: usize,
    k: usize,
    degree: usize,
    cap: usize,
    step: impl Fn(usize, usize, usize) -> usize,
) -> Result<Vec<u32>> {
    let per_start = (degree as u128)
        .checked_pow((k - 1) as u32)
        .unwrap_or(u128::MAX);
    Error::check_cap(
        "walk collection size",
        per_start.saturating_mul(ground as u128),
        cap as u128,
    )?;
    let per_start = per_start as usize;
    let mut tuples = Vec::with_capacity(ground * per_start * k);
    let mut ports = vec![0usize; k.saturating_sub(1)];
    for x in 0..ground {
        for idx in 0..per_start {
            let mut rem = idx;
            for p in ports.iter_mut().rev() {
                *p = rem % degree;
                rem /= degree;
            }
            let mut cur = x;
            tuples.push(cur as u32);
            for (i, &m) in ports.iter().enumerate() {
                cur = step(cur, i, m);
                tuples.push(cur as u32);
            }
        }
    }
    Ok(tuples)
}

/// All length-(k−1) walks on `g`, ordered by start vertex then port sequence.
pub fn all_walks(g: &RotationGraph, k: usize, cap: usize) -> Result<TupleCollection> {
    let tuples = all_walks_raw(g, k, cap)?;
    TupleCollection::new(g.n(), k, g.degree(), tuples)
}

/// The walk list of [`all_walks`] without the regularity witness.
pub fn all_walks_raw(g: &RotationGraph, k: usize, cap: usize) -> Result<Vec<u32>> {
    if k == 0 {
        return Err(Error::Invalid("arity must be positive".into()));
    }
    enumerate_walks(g.n(), k, g.degree(), cap, |x, _, j| g.neighbor(x, j))
}

/// Walks on the s-wide product. Step i (0-indexed) uses G_{i mod s}; tweaked steps are
/// H, Rot_i, H with port m = h1·d₂ + h2, untweaked steps are H, Rot_i.
pub fn swide_walks_raw(
    p: &SWideProduct,
    k: usize,
    tweaked: bool,
    cap: usize,
) -> Result<TupleCollection> {
    if k == 0 {
        return Err(Error::Invalid("arity must be positive".into()));
    }
    let degree = if tweaked { p.d2() * p.d2() } else { p.d2() };
    let tuples = if tweaked {
        enumerate_walks(p.size(), k, degree, cap, |x, i, m| p.zigzag_step(x, i, m))?
    } else {
        enumerate_walks(p.size(), k, degree, cap, |x, i, h| p.plain_step(x, i, h))?
    };
    TupleCollection::unchecked(p.size(), k, degree, tuples)
}

/// Like [`swide_walks_raw`] but fails with `NotRegular` when walks collide.
pub fn swide_walks(
    p: &SWideProduct,
    k: usize,
    tweaked: bool,
    cap: usize,
) -> Result<TupleCollection> {
    let w = swide_walks_raw(p, k, tweaked, cap)?;
    w.check_regular()?;
    Ok(w)
}

/// The split operator between W[a,t] and W[t+1,b].
#[derive(Clone, Debug)]
pub struct SplitOperator {
    pub a: usize,
    pub t: usize,
    pub b: usize,
    pub rows: Vec<Vec<u32>>,
    pub cols: Vec<Vec<u32>>,
    /// Entry 1[row‖col ∈ W[a,b]] / d^{b−t}.
    pub matrix: DenseOperator,
}

impl SplitOperator {
    /// σ₂ of the matrix rescaled by √(|cols|/|rows|) so that its top singular value is 1.
    ///
    /// For regular collections this equals σ₂ of the one-step walk operator at the split.
    pub fn sigma2(&self) -> Result<f64> {
        let scale = (self.cols.len() as f64 / self.rows.len() as f64).sqrt();
        Ok(spectral::sigma2(&self.matrix)? * scale)
    }

    /// σ₂ of the matrix exactly as defined, without rescaling.
    pub fn sigma2_raw(&self) -> Result<f64> {
        spectral::sigma2(&self.matrix)
    }
}

/// Builds the split operator for 1 ≤ a ≤ t < b ≤ k.
pub fn split_operator(w: &TupleCollection, a: usize, t: usize, b: usize) -> Result<SplitOperator> {
    split_operator_with_cap(w, a, t, b, DEFAULT_DENSE_CAP)
}

pub fn split_operator_with_cap(
    w: &TupleCollection,
    a: usize,
    t: usize,
    b: usize,
    cap: usize,
) -> Result<SplitOperator> {
    if !(a >= 1 && a <= t && t < b && b <= w.arity()) {
        return Err(Error::Invalid(format!(
            "split ({a},{t},{b}) invalid for arity {}",
            w.arity()
        )));
    }
    let rows = w.projection(a, t)?;
    let cols = w.projection(t + 1, b)?;
    Error::check_cap(
        "split operator dimension",
        rows.len().max(cols.len()) as u128,
        cap as u128,
    )?;
    let row_idx: HashMap<&[u32], usize> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.as_slice(), i))
        .collect();
    let col_idx: HashMap<&[u32], usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();
    let weight = 1.0 / (w.step_degree() as f64).powi((b - t) as i32);
    let mut matrix = DMatrix::zeros(rows.len(), cols.len());
    let mut seen: HashSet<&[u32]> = HashSet::new();
    for tup in w.iter() {
        let seg = &tup[a - 1..b];
        if seen.insert(seg) {
            let r = row_idx[&seg[..t + 1 - a]];
            let c = col_idx[&seg[t + 1 - a..]];
            matrix[(r, c)] = weight;
        }
    }
    Ok(SplitOperator {
        a,
        t,
        b,
        rows,
        cols,
        matrix,
    })
}

/// Rescaled σ₂ of every split (a, t, b), in lexicographic order of (a, t, b).
pub fn split_sigmas(w: &TupleCollection) -> Result<Vec<((usize, usize, usize), f64)>> {
    let k = w.arity();
    let mut out = Vec::new();
    for a in 1..=k {
        for t in a..k {
            for b in t + 1..=k {
                out.push(((a, t, b), split_operator(w, a, t, b)?.sigma2()?));
            }
        }
    }
    Ok(out)
}

/// τ = max over all splits of the rescaled σ₂; 0 for k = 1.
pub fn splittability_tau(w: &TupleCollection) -> Result<f64> {
    Ok(split_sigmas(w)?
        .into_iter()
        .map(|(_, s)| s)
        .fold(0.0, f64::max))
}
