//! Direct-sum lifting over tuple collections and parity-sampling measurements.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{self, BitWord, LinearCode, TOL};
use crate::walks::TupleCollection;

/// y_s = ⊕_{j} z_{s_j} for every tuple s, in collection order.
pub fn dsum_lift_word(z: &BitWord, w: &TupleCollection) -> Result<BitWord> {
    if z.len() != w.ground_size() {
        return Err(Error::LengthMismatch {
            expected: w.ground_size(),
            got: z.len(),
        });
    }
    let bits = z.bits();
    Ok(BitWord::from_bools(w.iter().map(|t| {
        t.iter().fold(0u8, |acc, &i| acc ^ bits[i as usize]) == 1
    })))
}

/// Signed sum Σ_s (−1)^{dsum(z)_s} for z given as the low bits of an integer.
fn lift_sign_sum(z: u64, w: &TupleCollection) -> i64 {
    w.iter()
        .map(|t| {
            let parity = t.iter().fold(0u64, |acc, &i| acc ^ (z >> i)) & 1;
            1 - 2 * parity as i64
        })
        .sum()
}

/// A base code lifted through a tuple collection.
#[derive(Clone, Debug)]
pub struct LiftedCode {
    pub base: LinearCode,
    pub tuples: TupleCollection,
    pub code: LinearCode,
}

impl LiftedCode {
    pub fn blocklength(&self) -> usize {
        self.tuples.len()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn rate(&self) -> f64 {
        self.dim() as f64 / self.blocklength() as f64
    }

    pub fn encode(&self, msg: &BitWord) -> Result<BitWord> {
        self.code.encode(msg)
    }
}

/// Lifts the generator rows. Fails if the lift is not injective on the base code.
pub fn dsum_lift_code(c: &LinearCode, w: &TupleCollection, cap: u64) -> Result<LiftedCode> {
    if c.blocklength() != w.ground_size() {
        return Err(Error::LengthMismatch {
            expected: w.ground_size(),
            got: c.blocklength(),
        });
    }
    let gen = c
        .generator()
        .iter()
        .map(|row| dsum_lift_word(row, w))
        .collect::<Result<Vec<_>>>()?;
    if gf2::rank(&gen) != gen.len() {
        return Err(Error::Invalid(
            "direct-sum lift is not injective on the base code".into(),
        ));
    }
    let code = LinearCode::new(gen, w.len(), cap)?;
    Ok(LiftedCode {
        base: c.clone(),
        tuples: w.clone(),
        code,
    })
}

/// Max bias over nonzero lifted codewords; 0 for the zero code.
pub fn lifted_code_bias(lc: &LiftedCode) -> Result<f64> {
    gf2::code_bias_bruteforce(&lc.code)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParityMode {
    /// Every z ∈ F₂^n with bias(z) ≤ ε₀; requires 2^n ≤ cap.
    Exhaustive { cap: u64 },
    /// Uniform words of weight ⌈(n − ε₀n)/2⌉.
    Sampled { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParitySampling {
    /// Largest lifted bias seen.
    pub epsilon: f64,
    /// A word attaining it (lexicographically smallest index in exhaustive mode).
    pub worst: Option<BitWord>,
    pub tested: usize,
}

pub fn measured_parity_sampling(
    w: &TupleCollection,
    eps0: f64,
    mode: ParityMode,
) -> Result<ParitySampling> {
    let n = w.ground_size();
    let total = w.len() as f64;
    match mode {
        ParityMode::Exhaustive { cap } => {
            if n >= 64 {
                return Err(Error::cap(
                    "parity-sampling enumeration",
                    u128::MAX,
                    cap as u128,
                ));
            }
            Error::check_cap("parity-sampling enumeration", 1u128 << n, cap as u128)?;
            let best = (0u64..(1u64 << n))
                .into_par_iter()
                .filter(|&z| {
                    let wt = z.count_ones() as f64;
                    (n as f64 - 2.0 * wt).abs() / n as f64 <= eps0 + TOL
                })
                .map(|z| (lift_sign_sum(z, w).unsigned_abs(), z, 1usize))
                .reduce(
                    || (0, u64::MAX, 0),
                    |a, b| {
                        let tested = a.2 + b.2;
                        let pick = if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                            a
                        } else {
                            b
                        };
                        (pick.0, pick.1, tested)
                    },
                );
            let worst = (best.1 != u64::MAX).then(|| BitWord::from_u64(best.1, n));
            Ok(ParitySampling {
                epsilon: best.0 as f64 / total,
                worst,
                tested: best.2,
            })
        }
        ParityMode::Sampled { trials, seed } => {
            let weight = ((n as f64 - eps0 * n as f64) / 2.0 - TOL).ceil().max(0.0) as usize;
            let weight = weight.min(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = ParitySampling {
                epsilon: 0.0,
                worst: None,
                tested: 0,
            };
            for _ in 0..trials {
                let mut z = BitWord::zeros(n);
                for i in sample(&mut rng, n, weight) {
                    z.set(i, true);
                }
                let b = gf2::bias(&dsum_lift_word(&z, w)?);
                if out.worst.is_none() || b > out.epsilon {
                    out.epsilon = b;
                    out.worst = Some(z);
                }
                out.tested += 1;
            }
            Ok(out)
        }
    }
}
