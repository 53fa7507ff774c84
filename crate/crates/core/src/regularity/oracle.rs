//! Exact and heuristic correlation oracles for tensor and matrix cut classes.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CorrelationOracle, CutClass, OracleReply, TensorCutFunction, TensorSpace};
use crate::error::{Error, Result};

/// Largest side the exact matrix oracle will enumerate.
pub const EXACT_SIDE_LIMIT: usize = 24;

/// Cap on the number of factor assignments the exhaustive tensor oracle enumerates.
pub const TENSOR_ENUM_CAP: u128 = 1 << 26;

const TIE: f64 = 1e-12;

/// Free bits enumerated sequentially inside one parallel chunk.
const CHUNK_BITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutMode {
    /// Enumerate the smaller side; fails past [`EXACT_SIDE_LIMIT`].
    Exact,
    /// Alternating best responses from a spectral start plus seeded random restarts.
    Alternating { restarts: usize, seed: u64 },
    /// Exact when the smaller side fits, otherwise alternating.
    Auto { restarts: usize, seed: u64 },
}

/// A maximizer of sign·xᵀAy.
#[derive(Clone, Debug, PartialEq)]
pub struct CutSolution {
    pub x: Vec<i8>,
    pub y: Vec<i8>,
    pub sign: i8,
    pub value: f64,
    pub exact: bool,
}

#[inline]
fn bit_of(v: i8, class: CutClass) -> u8 {
    match class {
        CutClass::Signed => u8::from(v < 0),
        CutClass::Boolean => v as u8,
    }
}

/// Best global sign and value for column sums s under the closed-form response.
#[inline]
fn respond(colsum: &[f64], class: CutClass) -> (f64, i8) {
    match class {
        CutClass::Signed => (colsum.iter().map(|c| c.abs()).sum(), 1),
        CutClass::Boolean => {
            let (mut pos, mut neg) = (0.0, 0.0);
            for &c in colsum {
                if c > 0.0 {
                    pos += c;
                } else {
                    neg -= c;
                }
            }
            if pos >= neg {
                (pos, 1)
            } else {
                (neg, -1)
            }
        }
    }
}

/// The response vector; zero sums go to the lexicographically smaller choice.
fn response(sums: &[f64], class: CutClass, sign: i8) -> Vec<i8> {
    sums.iter()
        .map(|&c| {
            let c = c * sign as f64;
            match class {
                CutClass::Signed => {
                    if c >= 0.0 {
                        1
                    } else {
                        -1
                    }
                }
                CutClass::Boolean => i8::from(c > 0.0),
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
struct Candidate {
    value: f64,
    key: Vec<u8>,
    x: Vec<i8>,
    y: Vec<i8>,
    sign: i8,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        self.value > other.value + TIE
            || ((self.value - other.value).abs() <= TIE && self.key < other.key)
    }
}

fn fold_best(cands: impl IntoIterator<Item = Candidate>) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for c in cands {
        if best.as_ref().map_or(true, |b| c.beats(b)) {
            best = Some(c);
        }
    }
    best
}

/// Builds the tie-break key in the original orientation and canonicalizes signed twins.
fn finish(
    mut x: Vec<i8>,
    mut y: Vec<i8>,
    sign: i8,
    value: f64,
    class: CutClass,
    transposed: bool,
) -> Candidate {
    if transposed {
        std::mem::swap(&mut x, &mut y);
    }
    if class == CutClass::Signed && x.first() == Some(&-1) {
        x.iter_mut().for_each(|v| *v = -*v);
        y.iter_mut().for_each(|v| *v = -*v);
    }
    let mut key: Vec<u8> = x.iter().chain(&y).map(|&v| bit_of(v, class)).collect();
    key.push(u8::from(sign < 0));
    Candidate {
        value,
        key,
        x,
        y,
        sign,
    }
}

/// Maximizes sign·xᵀMy by enumerating x over the rows of `m` with y in closed form.
fn exact_search(m: &DMatrix<f64>, class: CutClass, transposed: bool) -> Candidate {
    let (rows, cols) = m.shape();
    let row_vecs: Vec<Vec<f64>> = (0..rows)
        .map(|r| m.row(r).iter().copied().collect())
        .collect();
    // For the signed class x_0 = +1 w.l.o.g.
    let first_free = usize::from(class == CutClass::Signed && rows > 0);
    let free: Vec<usize> = (first_free..rows).collect();
    let outer_bits = free.len().saturating_sub(CHUNK_BITS);
    let inner = &free[..free.len() - outer_bits];
    let outer = &free[free.len() - outer_bits..];

    let chunk = |c: u64| -> Candidate {
        let mut bits = vec![0u8; rows];
        for (i, &r) in outer.iter().enumerate() {
            bits[r] = ((c >> i) & 1) as u8;
        }
        let xval = |b: u8| -> f64 {
            match class {
                CutClass::Signed => 1.0 - 2.0 * b as f64,
                CutClass::Boolean => b as f64,
            }
        };
        let mut colsum = vec![0.0; cols];
        for r in 0..rows {
            let xr = xval(bits[r]);
            if xr != 0.0 {
                for (s, v) in colsum.iter_mut().zip(&row_vecs[r]) {
                    *s += xr * v;
                }
            }
        }
        let mut best: Option<Candidate> = None;
        let consider = |bits: &[u8], colsum: &[f64], best: &mut Option<Candidate>| {
            let (value, sign) = respond(colsum, class);
            let dominated = best.as_ref().is_some_and(|b| value < b.value - TIE);
            if !dominated {
                let x: Vec<i8> = bits.iter().map(|&b| xval(b) as i8).collect();
                let y = response(colsum, class, sign);
                let cand = finish(x, y, sign, value, class, transposed);
                if best.as_ref().map_or(true, |b| cand.beats(b)) {
                    *best = Some(cand);
                }
            }
        };
        consider(&bits, &colsum, &mut best);
        for i in 1u64..(1u64 << inner.len()) {
            let r = inner[i.trailing_zeros() as usize];
            let old = xval(bits[r]);
            bits[r] ^= 1;
            let delta = xval(bits[r]) - old;
            for (s, v) in colsum.iter_mut().zip(&row_vecs[r]) {
                *s += delta * v;
            }
            consider(&bits, &colsum, &mut best);
        }
        best.expect("at least one assignment is visited")
    };

    let cands: Vec<Candidate> = if outer_bits == 0 {
        vec![chunk(0)]
    } else {
        (0u64..(1u64 << outer_bits))
            .into_par_iter()
            .map(chunk)
            .collect()
    };
    fold_best(cands).expect("nonempty")
}

fn top_left_singular(m: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut u = DVector::from_fn(m.nrows(), |_, _| rng.gen::<f64>() + 0.5);
    for _ in 0..60 {
        let v = m.transpose() * &u;
        let next = m * v;
        let nrm = next.norm();
        if nrm < 1e-300 {
            break;
        }
        u = next / nrm;
    }
    u
}

fn alternating(m: &DMatrix<f64>, class: CutClass, restarts: usize, seed: u64) -> Candidate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = m.nrows();
    let u = top_left_singular(m, &mut rng);
    let mut inits: Vec<Vec<f64>> = Vec::with_capacity(restarts + 2);
    match class {
        CutClass::Signed => inits.push(
            u.iter()
                .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
                .collect(),
        ),
        CutClass::Boolean => {
            inits.push(u.iter().map(|&v| f64::from(u8::from(v > 0.0))).collect());
            inits.push(u.iter().map(|&v| f64::from(u8::from(v < 0.0))).collect());
        }
    }
    for _ in 0..restarts {
        inits.push(
            (0..rows)
                .map(|_| {
                    let b: bool = rng.gen();
                    match class {
                        CutClass::Signed => {
                            if b {
                                -1.0
                            } else {
                                1.0
                            }
                        }
                        CutClass::Boolean => f64::from(u8::from(b)),
                    }
                })
                .collect(),
        );
    }
    let signs: &[i8] = match class {
        CutClass::Signed => &[1],
        CutClass::Boolean => &[1, -1],
    };
    let mut cands = Vec::new();
    for &s in signs {
        for init in &inits {
            let mut x = DVector::from_vec(init.clone());
            let mut prev = f64::NEG_INFINITY;
            let mut best_xy: Option<(Vec<i8>, Vec<i8>, f64)> = None;
            for _ in 0..200 {
                let colsum = m.transpose() * &x;
                let y = response(colsum.as_slice(), class, s);
                let yv = DVector::from_iterator(y.len(), y.iter().map(|&v| v as f64));
                let rowsum = m * &yv;
                let xn = response(rowsum.as_slice(), class, s);
                let xnv = DVector::from_iterator(xn.len(), xn.iter().map(|&v| v as f64));
                let value = s as f64 * xnv.dot(&rowsum);
                if value <= prev + 1e-15 {
                    break;
                }
                prev = value;
                best_xy = Some((xn, y, value));
                x = xnv;
            }
            if let Some((xv, yv, value)) = best_xy {
                cands.push(finish(xv, yv, s, value, class, false));
            }
        }
    }
    fold_best(cands).unwrap_or_else(|| {
        let x = response(&vec![0.0; rows], class, 1);
        let y = response(&vec![0.0; m.ncols()], class, 1);
        finish(x, y, 1, 0.0, class, false)
    })
}

/// Maximizes sign·xᵀAy over the class. Exact mode enumerates the smaller side.
pub fn matrix_cut_oracle(a: &DMatrix<f64>, class: CutClass, mode: CutMode) -> Result<CutSolution> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::Invalid("empty matrix".into()));
    }
    let exact_ok = rows.min(cols) <= EXACT_SIDE_LIMIT;
    let (cand, exact) = match mode {
        CutMode::Exact if !exact_ok => {
            return Err(Error::cap(
                "exact cut oracle side",
                rows.min(cols) as u128,
                EXACT_SIDE_LIMIT as u128,
            ))
        }
        CutMode::Exact | CutMode::Auto { .. } if exact_ok => {
            let c = if cols < rows {
                exact_search(&a.transpose(), class, true)
            } else {
                exact_search(a, class, false)
            };
            (c, true)
        }
        CutMode::Alternating { restarts, seed } | CutMode::Auto { restarts, seed } => {
            (alternating(a, class, restarts, seed), false)
        }
        CutMode::Exact => unreachable!(),
    };
    Ok(CutSolution {
        x: cand.x,
        y: cand.y,
        sign: cand.sign,
        value: cand.value,
        exact,
    })
}

/// max over the class of ⟨r, f⟩ under the uniform measure on the space, with the
/// lexicographically smallest maximizer (factor 1 first, bit 0 of each factor first).
pub fn exhaustive_tensor_max(
    space: &TensorSpace,
    residual: &[f64],
    class: CutClass,
    cap: u128,
) -> Result<(f64, TensorCutFunction)> {
    let (n, k) = (space.n(), space.k());
    if residual.len() != space.len() {
        return Err(Error::LengthMismatch {
            expected: space.len(),
            got: residual.len(),
        });
    }
    let scale = 1.0 / space.len() as f64;
    if k == 1 {
        let mut agg = DMatrix::zeros(1, n);
        for (p, r) in space.iter().zip(residual) {
            agg[(0, p[0] as usize)] += r * scale;
        }
        let (value, sign) = respond(
            agg.row(0).iter().copied().collect::<Vec<_>>().as_slice(),
            class,
        );
        let f = response(
            agg.row(0).iter().copied().collect::<Vec<_>>().as_slice(),
            class,
            sign,
        );
        return Ok((
            value,
            TensorCutFunction {
                sign,
                factors: vec![f],
            },
        ));
    }
    let total_bits = n as u128 * (k as u128 - 1);
    if total_bits >= 127 || (1u128 << total_bits) > cap {
        return Err(Error::cap(
            "tensor oracle enumeration",
            1u128.checked_shl(total_bits as u32).unwrap_or(u128::MAX),
            cap,
        ));
    }
    let outer = k - 2;
    let outer_bits = n * outer;
    // For the signed class with outer factors, fix f_1(0) = +1.
    let fixed = usize::from(class == CutClass::Signed && outer > 0);
    let combos = 1u64 << (outer_bits - fixed);
    let decode = |code: u64| -> Vec<Vec<i8>> {
        let code = code << fixed;
        (0..outer)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        // Factor 1 occupies the most significant bits.
                        let bit = (code >> (outer_bits - 1 - (j * n + i))) & 1;
                        match class {
                            CutClass::Signed => 1 - 2 * bit as i8,
                            CutClass::Boolean => bit as i8,
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let eval = |code: u64| -> Candidate {
        let heads = decode(code);
        let mut m = DMatrix::zeros(n, n);
        for (p, r) in space.iter().zip(residual) {
            let mut w = r * scale;
            for (j, h) in heads.iter().enumerate() {
                w *= h[p[j] as usize] as f64;
            }
            m[(p[k - 2] as usize, p[k - 1] as usize)] += w;
        }
        let inner = exact_search(&m, class, false);
        let mut key: Vec<u8> = heads.iter().flatten().map(|&v| bit_of(v, class)).collect();
        key.extend_from_slice(&inner.key);
        let mut x = heads.into_iter().flatten().collect::<Vec<i8>>();
        x.extend_from_slice(&inner.x);
        Candidate {
            value: inner.value,
            key,
            x,
            y: inner.y,
            sign: inner.sign,
        }
    };
    let cands: Vec<Candidate> = if combos > 1 {
        (0..combos).into_par_iter().map(eval).collect()
    } else {
        vec![eval(0)]
    };
    let best = fold_best(cands).expect("nonempty");
    let mut factors: Vec<Vec<i8>> = best.x.chunks(n).map(<[i8]>::to_vec).collect();
    factors.push(best.y);
    let f = TensorCutFunction {
        sign: best.sign,
        factors,
    };
    // Recompute the value on the chosen function to avoid drift from incremental sums.
    let value: f64 = space
        .iter()
        .zip(residual)
        .map(|(p, r)| r * f.eval(p))
        .sum::<f64>()
        * scale;
    Ok((value, f))
}

/// The exact oracle over a tensor space.
pub struct ExhaustiveTensorOracle {
    pub space: TensorSpace,
    pub class: CutClass,
    pub cap: u128,
}

impl ExhaustiveTensorOracle {
    pub fn new(space: TensorSpace, class: CutClass) -> Self {
        ExhaustiveTensorOracle {
            space,
            class,
            cap: TENSOR_ENUM_CAP,
        }
    }
}

impl CorrelationOracle for ExhaustiveTensorOracle {
    type Item = TensorCutFunction;

    fn propose(
        &mut self,
        residual: &[f64],
        _current: &[(f64, TensorCutFunction)],
        threshold: f64,
    ) -> Result<OracleReply<TensorCutFunction>> {
        let (value, f) = exhaustive_tensor_max(&self.space, residual, self.class, self.cap)?;
        let found = (value >= threshold).then(|| {
            let vals = f.values_on(&self.space);
            (f, vals)
        });
        Ok(OracleReply {
            found,
            value,
            exact: true,
        })
    }
}
