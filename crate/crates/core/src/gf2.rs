//! Bit vectors over F₂, small linear codes and brute-force reference decoders.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on the number of codewords any enumeration may touch.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 22;

/// Tolerance for comparing fractional distances and biases.
pub const TOL: f64 = 1e-9;

/// A word over F₂ packed into 64-bit limbs. Bit `i` lives in limb `i / 64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitWord {
    len: usize,
    limbs: Vec<u64>,
}

impl BitWord {
    pub fn zeros(len: usize) -> Self {
        BitWord {
            len,
            limbs: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = Self::zeros(len);
        for limb in w.limbs.iter_mut() {
            *limb = u64::MAX;
        }
        w.mask_tail();
        w
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut w = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                w.set(i, true);
            }
        }
        w
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(it: I) -> Self {
        let bits: Vec<u8> = it.into_iter().map(u8::from).collect();
        Self::from_bits(&bits)
    }

    /// Low `len` bits of `value`, bit `i` of the word being bit `i` of the integer.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut w = Self::zeros(len);
        if len > 0 {
            w.limbs[0] = value;
            w.mask_tail();
        }
        w
    }

    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut w = Self::zeros(len);
        for limb in w.limbs.iter_mut() {
            *limb = rng.gen();
        }
        w.mask_tail();
        w
    }

    fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        u8::from(self.get(i))
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        let m = 1u64 << (i & 63);
        if v {
            self.limbs[i >> 6] |= m;
        } else {
            self.limbs[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.limbs[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn xor_assign(&mut self, other: &BitWord) {
        assert_eq!(self.len, other.len, "xor of words with different lengths");
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitWord) -> BitWord {
        let mut w = self.clone();
        w.xor_assign(other);
        w
    }

    pub fn complement(&self) -> BitWord {
        let mut w = self.clone();
        for l in w.limbs.iter_mut() {
            *l = !*l;
        }
        w.mask_tail();
        w
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    /// The ±1 view χ(i) = (−1)^{w_i}.
    pub fn signs(&self) -> Vec<f64> {
        (0..self.len)
            .map(|i| if self.get(i) { -1.0 } else { 1.0 })
            .collect()
    }

    pub fn signs_i8(&self) -> Vec<i8> {
        (0..self.len)
            .map(|i| if self.get(i) { -1 } else { 1 })
            .collect()
    }

    /// Inverse of [`BitWord::signs_i8`]: negative entries become 1.
    pub fn from_signs(signs: &[i8]) -> Self {
        Self::from_bools(signs.iter().map(|&s| s < 0))
    }

    /// Number of positions where the two words differ.
    pub fn hamming(&self, other: &BitWord) -> usize {
        assert_eq!(self.len, other.len);
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut w = BitWord::zeros(self.len + other.len);
        for i in 0..self.len {
            w.set(i, self.get(i));
        }
        for i in 0..other.len {
            w.set(self.len + i, other.get(i));
        }
        w
    }

    pub fn slice(&self, start: usize, end: usize) -> BitWord {
        BitWord::from_bools((start..end).map(|i| self.get(i)))
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }
}

impl Ord for BitWord {
    /// Lexicographic order on the bit sequence, position 0 first, with 0 < 1.
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.limbs.iter().zip(&other.limbs) {
            let x = a ^ b;
            if x != 0 {
                let pos = x.trailing_zeros();
                return if (a >> pos) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for BitWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c if c.is_whitespace() => {}
                c => {
                    return Err(Error::Parse(format!(
                        "unexpected character {c:?} in bit string"
                    )))
                }
            }
        }
        if bits.is_empty() {
            return Err(Error::Parse("empty bit string".into()));
        }
        Ok(BitWord::from_bits(&bits))
    }
}

/// |E_i (−1)^{w_i}|.
pub fn bias(w: &BitWord) -> f64 {
    let n = w.len() as f64;
    (n - 2.0 * w.weight() as f64).abs() / n
}

/// Signed bias E_i (−1)^{w_i} as an exact pair (numerator, denominator).
pub fn signed_bias_counts(w: &BitWord) -> (i64, u64) {
    (w.len() as i64 - 2 * w.weight() as i64, w.len() as u64)
}

/// Fractional Hamming distance.
pub fn hamming_distance(a: &BitWord, b: &BitWord) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.hamming(b) as f64 / a.len() as f64)
}

/// Rank of a set of equal-length words over F₂.
pub fn rank(rows: &[BitWord]) -> usize {
    let mut rows: Vec<BitWord> = rows.to_vec();
    let Some(n) = rows.first().map(|r| r.len()) else {
        return 0;
    };
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// A binary linear code given by a full-rank generator matrix.
#[derive(Clone, Debug)]
pub struct LinearCode {
    generator: Vec<BitWord>,
    n: usize,
    codewords: Option<Vec<BitWord>>,
}

impl LinearCode {
    /// Builds the code and caches all codewords when `2^D <= cap`.
    pub fn new(generator: Vec<BitWord>, n: usize, cap: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("blocklength must be positive".into()));
        }
        if let Some(bad) = generator.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        if generator.len() > n {
            return Err(Error::Invalid(format!(
                "dimension {} exceeds blocklength {n}",
                generator.len()
            )));
        }
        if rank(&generator) != generator.len() {
            return Err(Error::Invalid(
                "generator matrix is not full row rank".into(),
            ));
        }
        let mut code = LinearCode {
            generator,
            n,
            codewords: None,
        };
        let d = code.dim();
        if d < 63 && (1u64 << d) <= cap {
            code.codewords = Some(code.enumerate());
        }
        Ok(code)
    }

    fn enumerate(&self) -> Vec<BitWord> {
        let count = 1usize << self.dim();
        (0..count).map(|m| self.encode_index(m as u64)).collect()
    }

    pub fn dim(&self) -> usize {
        self.generator.len()
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    pub fn rate(&self) -> f64 {
        self.dim() as f64 / self.n as f64
    }

    pub fn generator(&self) -> &[BitWord] {
        &self.generator
    }

    pub fn is_cached(&self) -> bool {
        self.codewords.is_some()
    }

    /// Message whose bit `i` is bit `i` of `index`.
    pub fn message(&self, index: u64) -> BitWord {
        BitWord::from_u64(index, self.dim())
    }

    fn encode_index(&self, index: u64) -> BitWord {
        let mut w = BitWord::zeros(self.n);
        for (i, row) in self.generator.iter().enumerate() {
            if (index >> i) & 1 == 1 {
                w.xor_assign(row);
            }
        }
        w
    }

    pub fn encode(&self, msg: &BitWord) -> Result<BitWord> {
        if msg.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: msg.len(),
            });
        }
        let mut w = BitWord::zeros(self.n);
        for (i, row) in self.generator.iter().enumerate() {
            if msg.get(i) {
                w.xor_assign(row);
            }
        }
        Ok(w)
    }

    /// All codewords, indexed by message integer.
    pub fn codewords(&self) -> Result<&[BitWord]> {
        self.codewords.as_deref().ok_or_else(|| {
            Error::cap(
                "codeword enumeration",
                1u128 << self.dim().min(127),
                DEFAULT_ENUM_CAP as u128,
            )
        })
    }

    /// Minimum fractional distance, from the cached enumeration.
    pub fn min_distance(&self) -> Result<f64> {
        let cws = self.codewords()?;
        let w = cws
            .iter()
            .skip(1)
            .map(|c| c.weight())
            .min()
            .unwrap_or(self.n);
        Ok(w as f64 / self.n as f64)
    }
}

/// Parameters for a seeded random ε₀-balanced code.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseCodeSpec {
    pub epsilon0: f64,
    pub dim: usize,
    pub blocklength: usize,
    pub multiplicity: usize,
    pub seed: u64,
}

impl BaseCodeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon0 > 0.0 && self.epsilon0 <= 1.0) {
            return Err(Error::Invalid(format!(
                "epsilon0 must lie in (0,1], got {}",
                self.epsilon0
            )));
        }
        if self.multiplicity == 0 {
            return Err(Error::Invalid("multiplicity must be at least 1".into()));
        }
        if self.dim == 0 || self.dim > self.blocklength {
            return Err(Error::Invalid(format!(
                "need 0 < dim <= blocklength, got dim {} and blocklength {}",
                self.dim, self.blocklength
            )));
        }
        Ok(())
    }
}

/// Maximum bias over the nonzero codewords (0 for the zero code).
pub fn code_bias_bruteforce(c: &LinearCode) -> Result<f64> {
    let cws = c.codewords()?;
    Ok(cws.par_iter().skip(1).map(bias).reduce(|| 0.0, f64::max))
}

/// Rejection-samples generator matrices until every nonzero codeword has bias at most ε₀.
///
/// The accepted code of blocklength `spec.blocklength` is replicated `spec.multiplicity` times.
pub fn random_balanced_code(spec: &BaseCodeSpec, budget: usize, cap: u64) -> Result<LinearCode> {
    spec.validate()?;
    Error::check_cap(
        "random code enumeration",
        1u128 << spec.dim.min(127),
        cap as u128,
    )?;
    let n = spec.blocklength;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..budget {
        let rows: Vec<BitWord> = (0..spec.dim)
            .map(|_| BitWord::random(n, &mut rng))
            .collect();
        if rank(&rows) != spec.dim {
            continue;
        }
        // Gray-code walk over all nonzero codewords, rejecting at the first biased one.
        let mut cw = BitWord::zeros(n);
        let mut ok = true;
        for i in 1u64..(1u64 << spec.dim) {
            cw.xor_assign(&rows[i.trailing_zeros() as usize]);
            if bias(&cw) > spec.epsilon0 + TOL {
                ok = false;
                break;
            }
        }
        if ok {
            let base = LinearCode::new(rows, n, cap)?;
            return if spec.multiplicity == 1 {
                Ok(base)
            } else {
                Ok(replicate_code(&base, spec.multiplicity, cap)?.code)
            };
        }
    }
    Err(Error::Budget {
        what: format!(
            "no code with bias <= {} for D={} n={}",
            spec.epsilon0, spec.dim, n
        ),
        attempts: budget,
    })
}

fn within(dist: usize, n: usize, radius: f64) -> bool {
    dist as f64 / n as f64 <= radius + TOL
}

/// Messages of all codewords within fractional distance `radius` (closed ball), in message order.
pub fn list_messages_at_radius(c: &LinearCode, w: &BitWord, radius: f64) -> Result<Vec<BitWord>> {
    if w.len() != c.blocklength() {
        return Err(Error::LengthMismatch {
            expected: c.blocklength(),
            got: w.len(),
        });
    }
    let cws = c.codewords()?;
    Ok(cws
        .iter()
        .enumerate()
        .filter(|(_, cw)| within(cw.hamming(w), c.blocklength(), radius))
        .map(|(m, _)| c.message(m as u64))
        .collect())
}

/// Exact list {h ∈ C : Δ(w,h) ≤ radius}.
pub fn list_at_radius_bruteforce(c: &LinearCode, w: &BitWord, radius: f64) -> Result<Vec<BitWord>> {
    list_messages_at_radius(c, w, radius)?
        .iter()
        .map(|m| c.encode(m))
        .collect()
}

/// The message of the unique codeword within `radius` of `w`, if exactly one exists.
pub fn ml_decode_bruteforce(c: &LinearCode, w: &BitWord, radius: f64) -> Result<Option<BitWord>> {
    let list = list_messages_at_radius(c, w, radius)?;
    Ok(if list.len() == 1 {
        list.into_iter().next()
    } else {
        None
    })
}

/// A code formed by concatenating `m` copies of every codeword of a base code.
#[derive(Clone, Debug)]
pub struct ReplicatedCode {
    pub base: LinearCode,
    pub m: usize,
    pub code: LinearCode,
}

pub fn replicate_code(c: &LinearCode, m: usize, cap: u64) -> Result<ReplicatedCode> {
    if m == 0 {
        return Err(Error::Invalid("multiplicity must be at least 1".into()));
    }
    let gen: Vec<BitWord> = c
        .generator()
        .iter()
        .map(|row| (1..m).fold(row.clone(), |acc, _| acc.concat(row)))
        .collect();
    let code = LinearCode::new(gen, c.blocklength() * m, cap)?;
    Ok(ReplicatedCode {
        base: c.clone(),
        m,
        code,
    })
}

/// Unique-decodes each copy separately and keeps the candidates whose full replicated codeword
/// is within `radius` of `w`. Returns a message only when exactly one candidate survives.
pub fn decode_replicated(
    rep: &ReplicatedCode,
    w: &BitWord,
    radius: f64,
) -> Result<Option<BitWord>> {
    let n = rep.base.blocklength();
    if w.len() != n * rep.m {
        return Err(Error::LengthMismatch {
            expected: n * rep.m,
            got: w.len(),
        });
    }
    let mut found: Vec<BitWord> = Vec::new();
    for j in 0..rep.m {
        let block = w.slice(j * n, (j + 1) * n);
        if let Some(msg) = ml_decode_bruteforce(&rep.base, &block, radius)? {
            if found.contains(&msg) {
                continue;
            }
            let cw = rep.code.encode(&msg)?;
            if within(cw.hamming(w), w.len(), radius) {
                found.push(msg);
            }
        }
    }
    Ok(if found.len() == 1 { found.pop() } else { None })
}
