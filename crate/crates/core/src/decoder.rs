//! List and unique decoding of lifted codes through the weak-regularity pipeline.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::direct_sum::{dsum_lift_word, LiftedCode};
use crate::error::{Error, Result};
use crate::gf2::{self, BitWord, LinearCode, TOL};
use crate::regularity::{
    conditional_average, partition_by_patterns, efficient_split_decompose, CutClass, CutMode,
    FactorPartition, SplitDecomposition, SplitParams, StepRule, DEFAULT_CONFIG_CAP,
};
use crate::walks::TupleCollection;

/// Default cap on rounding enumerations (atom unions or grid points).
pub const DEFAULT_ROUNDING_CAP: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rounding {
    /// Every common-threshold rounding of every grid function.
    Threshold,
    /// Independent ±1 coordinates with mean f̄(i).
    Sampled { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecodeConfig {
    /// Radius parameter; the list radius is 1/2 − β.
    pub beta: f64,
    /// Grid spacing; defaults to 1/⌈2/ε₀⌉ with ε₀ the measured base bias.
    pub eta: Option<f64>,
    /// Regularity accuracy; defaults to β.
    pub delta: Option<f64>,
    /// Accuracy and oracle threshold of each split level; defaults to δ.
    pub level_delta: Option<f64>,
    pub rounding: Rounding,
    #[serde(skip)]
    pub oracle: CutMode,
    pub rounding_cap: u128,
    pub config_cap: u128,
}

impl DecodeConfig {
    pub fn new(beta: f64) -> Self {
        DecodeConfig {
            beta,
            eta: None,
            delta: None,
            level_delta: None,
            rounding: Rounding::Threshold,
            oracle: CutMode::Auto {
                restarts: 8,
                seed: 0,
            },
            rounding_cap: DEFAULT_ROUNDING_CAP,
            config_cap: DEFAULT_CONFIG_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_beta_max(0.5)
    }

    fn validate_with_beta_max(&self, beta_max: f64) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < beta_max) {
            return Err(Error::Config(format!(
                "β must lie in (0, {beta_max}), got {}",
                self.beta
            )));
        }
        for (name, v) in [
            ("δ", self.delta),
            ("level δ", self.level_delta),
            ("η", self.eta),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v <= 1.0) {
                    return Err(Error::Config(format!("{name} must lie in (0, 1], got {v}")));
                }
            }
        }
        if let Rounding::Sampled { trials: 0, .. } = self.rounding {
            return Err(Error::Config(
                "sampled rounding needs at least one trial".into(),
            ));
        }
        Ok(())
    }
}

/// η = 1/⌈2/ε₀⌉.
pub fn default_eta(eps0: f64) -> f64 {
    1.0 / (2.0 / eps0 - TOL).ceil()
}

/// ±1 values of a received word on W: g(s) = (−1)^{ỹ_s}.
pub fn received_to_sign_function(y: &BitWord, w: &TupleCollection) -> Result<Vec<f64>> {
    if y.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            got: y.len(),
        });
    }
    Ok(y.signs())
}

/// ⟨g, χ_z^{⊗k}⟩ under the uniform measure on W, as an exact fraction.
pub fn sign_correlation(y: &BitWord, z: &BitWord, w: &TupleCollection) -> Result<Ratio<i64>> {
    let lift = dsum_lift_word(z, w)?;
    if y.len() != lift.len() {
        return Err(Error::LengthMismatch {
            expected: lift.len(),
            got: y.len(),
        });
    }
    let agree = lift.len() as i64 - 2 * y.hamming(&lift) as i64;
    Ok(Ratio::new(agree, lift.len() as i64))
}

/// One measured premise of list decoding.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PremiseCheck {
    pub name: String,
    pub measured: f64,
    pub required: f64,
    pub holds: bool,
}

/// β ≥ max{√ε, (2²⁰τk³)^{1/2}, 2(1/2 + 2ε₀)^{k/2}}, one check per term.
pub fn list_decoding_premises(
    beta: f64,
    lifted_bias: f64,
    tau: f64,
    k: usize,
    eps0: f64,
) -> Vec<PremiseCheck> {
    let k = k as f64;
    [
        ("beta >= sqrt(lifted bias)", lifted_bias.sqrt()),
        (
            "beta >= sqrt(2^20 tau k^3)",
            (2f64.powi(20) * tau * k.powi(3)).sqrt(),
        ),
        (
            "beta >= 2 (1/2 + 2 eps0)^(k/2)",
            2.0 * (0.5 + 2.0 * eps0).powf(k / 2.0),
        ),
    ]
    .into_iter()
    .map(|(name, required)| PremiseCheck {
        name: name.into(),
        measured: beta,
        required,
        holds: beta >= required - TOL,
    })
    .collect()
}

/// How a candidate was produced.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Origin {
    /// Subset of [k] used for the target (all positions for direct sum).
    pub subset: Vec<usize>,
    /// Grid value index per atom, each in 0..|D_η| with D_η listed from −1 upward.
    pub grid_point: Vec<usize>,
    /// Threshold index (threshold rounding) or trial number (sampled rounding).
    pub rounding: usize,
    /// Whether the complement of the rounded word decoded.
    pub complement: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ListEntry {
    pub message: BitWord,
    pub codeword: BitWord,
    /// Fractional distance from the received word.
    pub distance: f64,
    pub origins: Vec<Origin>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSummary {
    pub terms: usize,
    pub coefficient_l1: f64,
    pub level_steps: Vec<usize>,
    pub level_final_correlation: Vec<f64>,
    pub certified: bool,
}

impl From<&SplitDecomposition> for DecompositionSummary {
    fn from(d: &SplitDecomposition) -> Self {
        DecompositionSummary {
            terms: d.num_terms(),
            coefficient_l1: d.coefficient_l1(),
            level_steps: d.levels.iter().map(|l| l.steps).collect(),
            level_final_correlation: d.levels.iter().map(|l| l.final_correlation).collect(),
            certified: d.certified,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ListResult {
    pub radius: f64,
    pub entries: Vec<ListEntry>,
    pub decompositions: Vec<DecompositionSummary>,
    pub atoms: Vec<usize>,
    pub roundings_tried: usize,
    pub eta: f64,
    pub delta: f64,
    /// Every decomposition was certified.
    pub certified: bool,
    pub warnings: Vec<String>,
}

impl ListResult {
    pub fn messages(&self) -> Vec<BitWord> {
        self.entries.iter().map(|e| e.message.clone()).collect()
    }
}

/// D_η = {−1, −1+η, …, 1} (η must divide 1).
pub fn grid_values(eta: f64) -> Vec<f64> {
    let steps = (1.0 / eta).round() as i64;
    (-steps..=steps).map(|i| i as f64 / steps as f64).collect()
}

/// Every distinct common-threshold rounding: χ(i) = +1 iff f̄(i) ≥ θ, for θ at each distinct
/// value of f̄ and above the maximum. Returns (θ, word) with bit 1 where χ = −1.
pub fn threshold_roundings(fbar: &[f64]) -> Vec<(f64, BitWord)> {
    let mut values: Vec<f64> = fbar.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let above = values.last().map_or(1.0, |v| v + 1.0);
    values.push(above);
    values
        .into_iter()
        .map(|theta| (theta, BitWord::from_bools(fbar.iter().map(|&v| v < theta))))
        .collect()
}

/// χ(i) = +1 with probability (1 + f̄(i))/2, independently; bit 1 where χ = −1.
pub fn sampled_rounding<R: Rng>(fbar: &[f64], rng: &mut R) -> BitWord {
    BitWord::from_bools(fbar.iter().map(|&v| rng.gen::<f64>() >= (1.0 + v) / 2.0))
}

/// The codeword message within `radius` of `z`, if any (nearest, smallest message on ties).
fn base_unique(base: &LinearCode, z: &BitWord, radius: f64) -> Result<Option<BitWord>> {
    let n = base.blocklength();
    let best = base
        .codewords()?
        .iter()
        .enumerate()
        .map(|(m, c)| (c.hamming(z), m))
        .min();
    Ok(best
        .filter(|&(d, _)| d as f64 / n as f64 <= radius + TOL)
        .map(|(_, m)| base.message(m as u64)))
}

/// Base-decodes z̃ and its complement at radius (1 − γ₀)/4 and keeps a message whose lift is
/// within `target` of ỹ.
pub fn simple_unique_from_candidate(
    z: &BitWord,
    y: &BitWord,
    lifted: &LiftedCode,
    gamma0: f64,
    target: f64,
) -> Result<Option<BitWord>> {
    let radius = (1.0 - gamma0) / 4.0;
    for cand in [z.clone(), z.complement()] {
        if let Some(msg) = base_unique(&lifted.base, &cand, radius)? {
            let cw = lifted.encode(&msg)?;
            if cw.hamming(y) as f64 / y.len() as f64 <= target + TOL {
                return Ok(Some(msg));
            }
        }
    }
    Ok(None)
}

struct InnerOutcome {
    found: BTreeMap<BitWord, BTreeSet<Origin>>,
    summary: DecompositionSummary,
    atoms: usize,
    tried: usize,
}

/// Factor functions of h: distinct nonconstant factor vectors, identified up to sign.
/// There is no cap on the function count; atoms never exceed n and enumeration is capped separately.
pub fn factor_of(dec: &SplitDecomposition) -> Result<FactorPartition> {
    let mut seen: BTreeSet<Vec<i8>> = BTreeSet::new();
    let mut funcs = Vec::new();
    for (_, f) in &dec.terms {
        for v in &f.factors {
            if v.iter().all(|&x| x == v[0]) {
                continue;
            }
            let canon: Vec<i8> = if v[0] < 0 {
                v.iter().map(|&x| -x).collect()
            } else {
                v.clone()
            };
            if seen.insert(canon.clone()) {
                funcs.push(canon);
            }
        }
    }
    Ok(partition_by_patterns(&funcs, dec.n))
}

/// Decomposes g, rounds every measurable grid function and base-decodes the results.
fn inner_candidates(
    g: &[f64],
    w: &TupleCollection,
    base: &LinearCode,
    gamma0: f64,
    delta: f64,
    eta: f64,
    subset: &[usize],
    cfg: &DecodeConfig,
) -> Result<InnerOutcome> {
    let mut sp = SplitParams::new(delta, CutClass::Signed);
    sp.mode = cfg.oracle;
    sp.step = StepRule::LineSearch;
    sp.level_delta = Some(cfg.level_delta.unwrap_or(delta));
    sp.delta_prime = sp.level_delta;
    sp.config_cap = cfg.config_cap;
    let dec = efficient_split_decompose(w, g, &sp)?;
    let factor = factor_of(&dec)?;
    let atoms = factor.num_atoms();
    let radius = (1.0 - gamma0) / 4.0;
    let n = w.ground_size();

    let decode = |z: &BitWord| -> Result<Vec<(BitWord, bool)>> {
        let mut out = Vec::new();
        for (cand, comp) in [(z.clone(), false), (z.complement(), true)] {
            if let Some(m) = base_unique(base, &cand, radius)? {
                out.push((m, comp));
            }
        }
        Ok(out)
    };

    let mut found: BTreeMap<BitWord, BTreeSet<Origin>> = BTreeMap::new();
    let tried;
    match cfg.rounding {
        Rounding::Threshold => {
            // The union over grid functions and thresholds of all roundings is exactly the set of
            // atom unions, each realized by the ±1 grid function at threshold 0.
            Error::check_cap(
                "threshold roundings (2^atoms)",
                1u128.checked_shl(atoms as u32).unwrap_or(u128::MAX),
                cfg.rounding_cap,
            )?;
            let top = grid_values(eta).len() - 1;
            let results: Vec<Result<Vec<(BitWord, Origin)>>> = (0u64..(1u64 << atoms))
                .into_par_iter()
                .map(|mask| {
                    let z =
                        BitWord::from_bools((0..n).map(|i| (mask >> factor.atom_of[i]) & 1 == 0));
                    let grid_point: Vec<usize> = (0..atoms)
                        .map(|a| if (mask >> a) & 1 == 1 { top } else { 0 })
                        .collect();
                    Ok(decode(&z)?
                        .into_iter()
                        .map(|(m, complement)| {
                            (
                                m,
                                Origin {
                                    subset: subset.to_vec(),
                                    grid_point: grid_point.clone(),
                                    rounding: 1,
                                    complement,
                                },
                            )
                        })
                        .collect())
                })
                .collect();
            tried = 1usize << atoms;
            for r in results {
                for (m, p) in r? {
                    found.entry(m).or_default().insert(p);
                }
            }
        }
        Rounding::Sampled { trials, seed } => {
            let grid = grid_values(eta);
            let q = grid.len() as u128;
            let total = q.checked_pow(atoms as u32).unwrap_or(u128::MAX);
            Error::check_cap("grid functions (|D_eta|^atoms)", total, cfg.rounding_cap)?;
            let results: Vec<Result<Vec<(BitWord, Origin)>>> = (0..total as u64)
                .into_par_iter()
                .map(|idx| {
                    let mut rest = idx;
                    let grid_point: Vec<usize> = (0..atoms)
                        .map(|_| {
                            let v = (rest % q as u64) as usize;
                            rest /= q as u64;
                            v
                        })
                        .collect();
                    let fbar: Vec<f64> = (0..n)
                        .map(|i| grid[grid_point[factor.atom_of[i]]])
                        .collect();
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(idx);
                    let mut out = Vec::new();
                    for trial in 0..trials {
                        let z = sampled_rounding(&fbar, &mut rng);
                        for (m, complement) in decode(&z)? {
                            out.push((
                                m,
                                Origin {
                                    subset: subset.to_vec(),
                                    grid_point: grid_point.clone(),
                                    rounding: trial,
                                    complement,
                                },
                            ));
                        }
                    }
                    Ok(out)
                })
                .collect();
            tried = total as usize * trials;
            for r in results {
                for (m, p) in r? {
                    found.entry(m).or_default().insert(p);
                }
            }
        }
    }
    Ok(InnerOutcome {
        found,
        summary: (&dec).into(),
        atoms,
        tried,
    })
}

/// Keeps only the first few origin records per message.
const MAX_ORIGINS: usize = 8;

/// Measured base bias γ₀ and the grid spacing in use.
fn base_parameters(lifted: &LiftedCode, cfg: &DecodeConfig) -> Result<(f64, f64)> {
    let gamma0 = gf2::code_bias_bruteforce(&lifted.base)?;
    let eta = cfg.eta.unwrap_or_else(|| default_eta(gamma0.max(1e-3)));
    let steps = 1.0 / eta;
    if (steps - steps.round()).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "η must be 1/q for an integer q, got {eta}"
        )));
    }
    Ok((gamma0, eta))
}

/// All codewords of the lifted code within 1/2 − β of ỹ that the pipeline surfaces.
pub fn list_decode(y: &BitWord, lifted: &LiftedCode, cfg: &DecodeConfig) -> Result<ListResult> {
    cfg.validate()?;
    let w = &lifted.tuples;
    let g = received_to_sign_function(y, w)?;
    let (gamma0, eta) = base_parameters(lifted, cfg)?;
    let delta = cfg.delta.unwrap_or(cfg.beta);
    let subset: Vec<usize> = (0..w.arity()).collect();
    let inner = inner_candidates(&g, w, &lifted.base, gamma0, delta, eta, &subset, cfg)?;
    let radius = 0.5 - cfg.beta;
    let mut entries = Vec::new();
    for (message, prov) in inner.found {
        let codeword = lifted.encode(&message)?;
        let distance = codeword.hamming(y) as f64 / y.len() as f64;
        if distance <= radius + TOL {
            entries.push(ListEntry {
                message,
                codeword,
                distance,
                origins: prov.into_iter().take(MAX_ORIGINS).collect(),
            });
        }
    }
    let mut warnings = Vec::new();
    if !inner.summary.certified {
        warnings.push(
            "regularity decomposition is uncertified (heuristic oracle or coarse grid)".into(),
        );
    }
    Ok(ListResult {
        radius,
        entries,
        certified: inner.summary.certified,
        decompositions: vec![inner.summary],
        atoms: vec![inner.atoms],
        roundings_tried: inner.tried,
        eta,
        delta,
        warnings,
    })
}

/// List decoding at β = 1/4 followed by nearest selection (smallest message on ties).
pub fn unique_decode(
    y: &BitWord,
    lifted: &LiftedCode,
    cfg: &DecodeConfig,
) -> Result<(Option<BitWord>, ListResult)> {
    let mut c = cfg.clone();
    c.beta = 0.25;
    let list = list_decode(y, lifted, &c)?;
    let best = list
        .entries
        .iter()
        .min_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then_with(|| a.message.cmp(&b.message))
        })
        .map(|e| e.message.clone());
    Ok((best, list))
}

/// Nearest lifted codeword by enumeration (smallest message on ties).
pub fn nearest_codeword_bruteforce(y: &BitWord, lifted: &LiftedCode) -> Result<(BitWord, f64)> {
    let cws = lifted.code.codewords()?;
    let (d, m) = cws
        .iter()
        .enumerate()
        .map(|(m, c)| (c.hamming(y), m))
        .min()
        .ok_or_else(|| Error::Invalid("empty code".into()))?;
    Ok((lifted.code.message(m as u64), d as f64 / y.len() as f64))
}

/// Margins of the sampling argument for a planted base codeword.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingSoundness {
    /// ‖E[χ_z|B]‖² under the uniform measure on [n].
    pub projection_norm_sq: f64,
    /// (β/2)^{2/k}.
    pub norm_threshold: f64,
    /// ⟨f̄, χ_z⟩ for the grid function nearest to E[χ_z|B].
    pub grid_correlation: f64,
    pub eta: f64,
    /// projection_norm_sq − norm_threshold.
    pub norm_margin: f64,
    /// grid_correlation − (projection_norm_sq − η).
    pub grid_margin: f64,
}

pub fn sampling_soundness_check(
    z: &BitWord,
    factor: &FactorPartition,
    beta: f64,
    k: usize,
    eta: f64,
) -> Result<SamplingSoundness> {
    let chi = z.signs();
    let e = conditional_average(&chi, factor)?;
    let n = chi.len() as f64;
    let projection_norm_sq = e.iter().map(|v| v * v).sum::<f64>() / n;
    let fbar: Vec<f64> = e
        .iter()
        .map(|v| ((v / eta).round() * eta).clamp(-1.0, 1.0))
        .collect();
    let grid_correlation = fbar.iter().zip(&chi).map(|(a, b)| a * b).sum::<f64>() / n;
    let norm_threshold = (beta / 2.0).powf(2.0 / k as f64);
    Ok(SamplingSoundness {
        projection_norm_sq,
        norm_threshold,
        grid_correlation,
        eta,
        norm_margin: projection_norm_sq - norm_threshold,
        grid_margin: grid_correlation - (projection_norm_sq - eta),
    })
}

/// Direct-product symbols: bit j of symbol s is z at the j-th coordinate of tuple s.
pub fn dprod_lift_word(z: &BitWord, w: &TupleCollection) -> Result<Vec<u32>> {
    if z.len() != w.ground_size() {
        return Err(Error::LengthMismatch {
            expected: w.ground_size(),
            got: z.len(),
        });
    }
    if w.arity() > 32 {
        return Err(Error::Invalid(
            "direct-product symbols hold at most 32 coordinates".into(),
        ));
    }
    let bits = z.bits();
    Ok(w.iter()
        .map(|t| {
            t.iter()
                .enumerate()
                .fold(0u32, |acc, (j, &i)| acc | ((bits[i as usize] as u32) << j))
        })
        .collect())
}

/// Fraction of symbols that differ.
pub fn symbol_distance(a: &[u32], b: &[u32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count() as f64 / a.len().max(1) as f64)
}

/// g^{(K)}(s) = ∏_{t∈K} (−1)^{ỹ_{s,t}} for a subset mask K.
pub fn subset_sign_function(y: &[u32], mask: u32) -> Vec<f64> {
    y.iter()
        .map(|&s| {
            if (s & mask).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            }
        })
        .collect()
}

/// 1 − Δ(ỹ, dprod(z)) and E_{K⊆[k]} ⟨g^{(K)}, χ_z^{(K)}⟩, both exact.
pub fn dprod_subset_identity(
    y: &[u32],
    z: &BitWord,
    w: &TupleCollection,
) -> Result<(Ratio<i64>, Ratio<i64>)> {
    let lift = dprod_lift_word(z, w)?;
    if y.len() != lift.len() {
        return Err(Error::LengthMismatch {
            expected: lift.len(),
            got: y.len(),
        });
    }
    let len = y.len() as i64;
    let agree = y.iter().zip(&lift).filter(|(a, b)| a == b).count() as i64;
    let lhs = Ratio::new(agree, len);
    let k = w.arity();
    let mut sum = Ratio::from_integer(0i64);
    for mask in 0u32..(1 << k) {
        let corr: i64 = y
            .iter()
            .zip(&lift)
            .map(|(&a, &b)| {
                if ((a ^ b) & mask).count_ones() % 2 == 1 {
                    -1
                } else {
                    1
                }
            })
            .sum();
        sum += Ratio::new(corr, len);
    }
    Ok((lhs, sum / Ratio::from_integer(1i64 << k)))
}

/// Direct-product list decoding: runs the direct-sum inner loop on g^{(K)} for every K with
/// |K| ≥ k/3 and keeps messages within symbol distance 1 − β, β ∈ (0, 1).
pub fn list_decode_direct_product(
    y: &[u32],
    lifted: &LiftedCode,
    cfg: &DecodeConfig,
) -> Result<ListResult> {
    cfg.validate_with_beta_max(1.0)?;
    let w = &lifted.tuples;
    if y.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            got: y.len(),
        });
    }
    let k = w.arity();
    if k > 16 {
        return Err(Error::cap(
            "subset enumeration",
            1u128 << k.min(127),
            1 << 16,
        ));
    }
    let (gamma0, eta) = base_parameters(lifted, cfg)?;
    let delta = cfg.delta.unwrap_or(cfg.beta);
    let min_size = (k as f64 / 3.0).ceil() as u32;
    let mut found: BTreeMap<BitWord, BTreeSet<Origin>> = BTreeMap::new();
    let mut decompositions = Vec::new();
    let mut atoms = Vec::new();
    let mut tried = 0;
    for mask in 1u32..(1 << k) {
        if mask.count_ones() < min_size {
            continue;
        }
        let subset: Vec<usize> = (0..k).filter(|&t| (mask >> t) & 1 == 1).collect();
        let g = subset_sign_function(y, mask);
        let inner = inner_candidates(&g, w, &lifted.base, gamma0, delta, eta, &subset, cfg)?;
        for (m, p) in inner.found {
            found.entry(m).or_default().extend(p);
        }
        decompositions.push(inner.summary);
        atoms.push(inner.atoms);
        tried += inner.tried;
    }
    let radius = 1.0 - cfg.beta;
    let mut entries = Vec::new();
    for (message, prov) in found {
        let z = lifted.base.encode(&message)?;
        let distance = symbol_distance(y, &dprod_lift_word(&z, w)?)?;
        if distance <= radius + TOL {
            let codeword = lifted.encode(&message)?;
            entries.push(ListEntry {
                message,
                codeword,
                distance,
                origins: prov.into_iter().take(MAX_ORIGINS).collect(),
            });
        }
    }
    let certified = decompositions.iter().all(|d| d.certified);
    let mut warnings = Vec::new();
    if !certified {
        warnings.push("at least one regularity decomposition is uncertified".into());
    }
    Ok(ListResult {
        radius,
        entries,
        decompositions,
        atoms,
        roundings_tried: tried,
        eta,
        delta,
        certified,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_and_grid() {
        assert_eq!(default_eta(0.5), 0.25);
        assert_eq!(default_eta(0.3), 1.0 / 7.0);
        assert_eq!(grid_values(0.5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn threshold_rounding_examples() {
        let r = threshold_roundings(&[0.5, -0.5, 0.5]);
        let words: Vec<String> = r.iter().map(|(_, w)| w.to_string()).collect();
        assert_eq!(words, vec!["000", "010", "111"]);
    }

    #[test]
    fn dprod_symbol_example() {
        let w = TupleCollection::unchecked(2, 2, 1, vec![0, 1]).unwrap();
        let z: BitWord = "01".parse().unwrap();
        assert_eq!(dprod_lift_word(&z, &w).unwrap(), vec![0b10]);
        assert_eq!(dprod_lift_word(&BitWord::zeros(2), &w).unwrap(), vec![0]);
    }

    #[test]
    fn premise_formula() {
        let p = list_decoding_premises(0.5, 0.04, 0.0, 2, 0.0);
        assert!(p[0].holds && p[1].holds);
        assert!((p[2].required - 1.0).abs() < 1e-12);
        assert!(!p[2].holds);
    }
}
