//! Weak regularity for splittable collections by induction over split levels.
//!
//! Level t lives on X_t = [n]^t × L_t, where L_t holds the distinct suffixes W[t+1,k]
//! and ν_t is uniform on X_t. A level term is coef · f_1 ⊗ ⋯ ⊗ f_t ⊗ tail. Each step
//! approximates h_t under ν_t by functions whose tail splits as x(first) · y(rest).

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::factor::partition_by_patterns;
use super::oracle::{exhaustive_tensor_max, matrix_cut_oracle, CutMode, EXACT_SIDE_LIMIT};
use super::{
    abstract_decompose, dot, CorrelationOracle, CutClass, LogEntry, LoopParams, OracleReply,
    StepRule, TensorCutFunction, TensorSpace,
};
use crate::error::{Error, Result};
use crate::walks::{self, TupleCollection};

/// Default cap on atom-count configurations per oracle call.
pub const DEFAULT_CONFIG_CAP: u128 = 1 << 20;

#[derive(Clone, Debug)]
struct SuffixLevel {
    width: usize,
    suffixes: Vec<u32>,
    first: Vec<u32>,
    rest: Vec<u32>,
}

/// Distinct suffixes of every length with links between consecutive levels.
#[derive(Clone, Debug)]
pub struct SuffixIndex {
    n: usize,
    levels: Vec<SuffixLevel>,
    tuple_id: Vec<usize>,
}

impl SuffixIndex {
    pub fn new(w: &TupleCollection) -> Self {
        let k = w.arity();
        let mut maps: Vec<BTreeMap<&[u32], usize>> = (0..k)
            .map(|t| {
                let mut m: BTreeMap<&[u32], usize> = w.iter().map(|tup| (&tup[t..], 0)).collect();
                for (i, v) in m.values_mut().enumerate() {
                    *v = i;
                }
                m
            })
            .collect();
        let levels = (0..k)
            .map(|t| {
                let width = k - t;
                let mut suffixes = Vec::with_capacity(maps[t].len() * width);
                let mut first = Vec::with_capacity(maps[t].len());
                let mut rest = Vec::new();
                for s in maps[t].keys() {
                    suffixes.extend_from_slice(s);
                    first.push(s[0]);
                    if t + 1 < k {
                        rest.push(maps[t + 1][&s[1..]] as u32);
                    }
                }
                SuffixLevel {
                    width,
                    suffixes,
                    first,
                    rest,
                }
            })
            .collect();
        let tuple_id = w.iter().map(|tup| maps[0][tup]).collect();
        maps.clear();
        SuffixIndex {
            n: w.ground_size(),
            levels,
            tuple_id,
        }
    }

    pub fn arity(&self) -> usize {
        self.levels.len()
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    /// |L_t|.
    pub fn len(&self, t: usize) -> usize {
        self.levels[t].first.len()
    }

    pub fn suffix(&self, t: usize, e: usize) -> &[u32] {
        let w = self.levels[t].width;
        &self.levels[t].suffixes[e * w..(e + 1) * w]
    }

    #[inline]
    pub fn first(&self, t: usize, e: usize) -> usize {
        self.levels[t].first[e] as usize
    }

    /// Id at level t+1 of the suffix with its first element dropped.
    #[inline]
    pub fn rest(&self, t: usize, e: usize) -> usize {
        self.levels[t].rest[e] as usize
    }

    /// Level-0 id of the i-th tuple of the collection.
    pub fn tuple_id(&self, i: usize) -> usize {
        self.tuple_id[i]
    }

    /// |X_t| = n^t · |L_t|.
    pub fn space_len(&self, t: usize) -> usize {
        self.n.pow(t as u32) * self.len(t)
    }
}

/// A function in the class of level t+1, viewed on X_{t+1}: sign · heads ⊗ tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SplitFunction {
    pub sign: i8,
    /// t+1 vectors over [n].
    pub heads: Vec<Vec<i8>>,
    /// A vector over L_{t+1}.
    pub tail: Vec<i8>,
}

impl SplitFunction {
    pub fn level(&self) -> usize {
        self.heads.len()
    }
}

#[derive(Clone, Debug)]
struct LevelTerm {
    coef: f64,
    heads: Vec<Vec<i8>>,
    tail: Vec<f64>,
}

/// Products ∏_j h_j(p_j) over p ∈ [n]^t, position 0 most significant.
fn head_products<H: AsRef<[i8]>>(heads: &[H], n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for h in heads {
        let h = h.as_ref();
        out = out
            .iter()
            .flat_map(|&v| h.iter().map(move |&a| v * a as f64))
            .collect();
    }
    debug_assert!(heads.is_empty() || out.len() == n.pow(heads.len() as u32));
    out
}

fn level_values(terms: &[LevelTerm], n: usize, len: usize) -> Vec<f64> {
    let t = terms.first().map_or(0, |x| x.heads.len());
    let mut out = vec![0.0; n.pow(t as u32) * len];
    for term in terms {
        for (pi, hp) in head_products(&term.heads, n).into_iter().enumerate() {
            if hp == 0.0 {
                continue;
            }
            let row = &mut out[pi * len..(pi + 1) * len];
            for (o, &v) in row.iter_mut().zip(&term.tail) {
                *o += term.coef * hp * v;
            }
        }
    }
    out
}

/// Tail over L_t of a level-(t+1) function: x(first e) · y(rest e).
fn collapse_tail(idx: &SuffixIndex, t: usize, x: &[i8], y: &[i8]) -> Vec<f64> {
    (0..idx.len(t))
        .map(|e| (x[idx.first(t, e)] * y[idx.rest(t, e)]) as f64)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitParams {
    /// Target accuracy of the final decomposition.
    pub delta: f64,
    pub class: CutClass,
    #[serde(skip)]
    pub mode: CutMode,
    pub step: StepRule,
    /// Accuracy of each level's loop; defaults to δ/(2k).
    pub level_delta: Option<f64>,
    /// Per-step oracle threshold; defaults to the level accuracy, divided by 16 when the matrix oracle is heuristic.
    pub delta_prime: Option<f64>,
    /// Grid spacing for atom fractions.
    pub eta: Option<f64>,
    pub config_cap: u128,
}

impl SplitParams {
    pub fn new(delta: f64, class: CutClass) -> Self {
        SplitParams {
            delta,
            class,
            mode: CutMode::Auto {
                restarts: 8,
                seed: 0,
            },
            step: StepRule::Fixed,
            level_delta: None,
            delta_prime: None,
            eta: None,
            config_cap: DEFAULT_CONFIG_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    /// ‖h_t‖² under ν_t, the ball used at this level.
    pub bound: f64,
    pub steps: usize,
    pub terms: usize,
    pub final_correlation: f64,
    pub certified: bool,
    pub log: Vec<LogEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitDecomposition {
    pub n: usize,
    pub k: usize,
    #[serde(skip)]
    pub terms: Vec<(f64, TensorCutFunction)>,
    pub levels: Vec<LevelReport>,
    pub delta: f64,
    pub delta_step: f64,
    pub delta_prime: f64,
    pub eta: f64,
    /// Every oracle call at every level was exact.
    pub certified: bool,
}

impl SplitDecomposition {
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn eval(&self, point: &[u32]) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.eval(point)).sum()
    }

    /// h on [n]^k in lexicographic order.
    pub fn grid_values(&self, cap: usize) -> Result<Vec<f64>> {
        let space = TensorSpace::full(self.n, self.k, cap)?;
        Ok(space.iter().map(|p| self.eval(p)).collect())
    }

    /// ‖h‖² under the uniform measure on [n]^k, computed from the factors.
    pub fn norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for (c1, f1) in &self.terms {
            for (c2, f2) in &self.terms {
                let mut v = c1 * c2 * (f1.sign * f2.sign) as f64;
                for (a, b) in f1.factors.iter().zip(&f2.factors) {
                    v *=
                        a.iter().zip(b).map(|(&x, &y)| (x * y) as f64).sum::<f64>() / self.n as f64;
                }
                s += v;
            }
        }
        s
    }
}

struct ResidualTerm {
    coef: f64,
    heads: Vec<Vec<i8>>,
    tail: Vec<f64>,
}

struct Position {
    /// Members of each atom.
    atoms: Vec<Vec<usize>>,
    /// Count options per atom.
    options: Vec<Vec<usize>>,
    exact: bool,
}

struct StepOracle<'a> {
    idx: &'a SuffixIndex,
    t: usize,
    targets: &'a [LevelTerm],
    class: CutClass,
    mode: CutMode,
    eta: f64,
    zero_below: Option<f64>,
    config_cap: u128,
}

struct Candidate {
    value: f64,
    f: SplitFunction,
    exact: bool,
}

impl StepOracle<'_> {
    /// Residual terms with identical heads merged.
    fn residual_terms(&self, current: &[(f64, SplitFunction)]) -> Vec<ResidualTerm> {
        let len = self.idx.len(self.t);
        let mut merged: Vec<ResidualTerm> = Vec::new();
        let mut by_heads: HashMap<Vec<Vec<i8>>, usize> = HashMap::new();
        let mut add = |coef: f64, heads: &[Vec<i8>], tail: &[f64]| {
            let id = *by_heads.entry(heads.to_vec()).or_insert_with(|| {
                merged.push(ResidualTerm {
                    coef: 1.0,
                    heads: heads.to_vec(),
                    tail: vec![0.0; len],
                });
                merged.len() - 1
            });
            for (m, v) in merged[id].tail.iter_mut().zip(tail) {
                *m += coef * v;
            }
        };
        for term in self.targets {
            add(term.coef, &term.heads, &term.tail);
        }
        for (c, f) in current {
            let tail = collapse_tail(self.idx, self.t, &f.heads[self.t], &f.tail);
            add(-c * f.sign as f64, &f.heads[..self.t], &tail);
        }
        merged.retain(|r| r.tail.iter().any(|&v| v != 0.0));
        merged
    }

    fn positions(&self, terms: &[ResidualTerm]) -> Vec<Position> {
        let n = self.idx.ground_size();
        (0..self.t)
            .map(|j| {
                let funcs: Vec<Vec<i8>> = terms.iter().map(|r| r.heads[j].clone()).collect();
                let part = partition_by_patterns(&funcs, n);
                let mut exact = true;
                let options = part
                    .atoms
                    .iter()
                    .map(|a| {
                        let size = a.len();
                        if size as f64 * self.eta <= 1.0 {
                            (0..=size).collect()
                        } else {
                            exact = false;
                            let steps = (1.0 / self.eta).floor() as usize;
                            let mut v: Vec<usize> = (0..=steps)
                                .map(|i| {
                                    ((i as f64 * self.eta).min(1.0) * size as f64).round() as usize
                                })
                                .chain(std::iter::once(size))
                                .collect();
                            v.dedup();
                            v
                        }
                    })
                    .collect();
                Position {
                    atoms: part.atoms,
                    options,
                    exact,
                }
            })
            .collect()
    }

    fn best(&self, terms: &[ResidualTerm]) -> Result<Option<Candidate>> {
        let (t, n) = (self.t, self.idx.ground_size());
        let len_t = self.idx.len(t);
        let len_next = self.idx.len(t + 1);
        let positions = self.positions(terms);
        let radices: Vec<usize> = positions
            .iter()
            .flat_map(|p| p.options.iter().map(Vec::len))
            .collect();
        let total = radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
            .unwrap_or(u128::MAX);
        Error::check_cap("atom configurations", total, self.config_cap)?;
        let grid_exact = positions.iter().all(|p| p.exact);
        // Head value of each term on each atom.
        let head_on_atom: Vec<Vec<Vec<i64>>> = positions
            .iter()
            .enumerate()
            .map(|(j, p)| {
                terms
                    .iter()
                    .map(|r| p.atoms.iter().map(|a| r.heads[j][a[0]] as i64).collect())
                    .collect()
            })
            .collect();

        let counts_of = |mut idx: u128| -> Vec<Vec<usize>> {
            let mut out: Vec<Vec<usize>> =
                positions.iter().map(|p| vec![0; p.atoms.len()]).collect();
            for (j, p) in positions.iter().enumerate().rev() {
                for a in (0..p.atoms.len()).rev() {
                    let r = p.options[a].len() as u128;
                    out[j][a] = p.options[a][(idx % r) as usize];
                    idx /= r;
                }
            }
            out
        };
        let nums_of = |counts: &[Vec<usize>]| -> Vec<i64> {
            (0..terms.len())
                .map(|l| {
                    positions
                        .iter()
                        .enumerate()
                        .map(|(j, p)| {
                            p.atoms
                                .iter()
                                .enumerate()
                                .map(|(a, members)| {
                                    let m = counts[j][a] as i64;
                                    let s = match self.class {
                                        CutClass::Signed => 2 * m - members.len() as i64,
                                        CutClass::Boolean => m,
                                    };
                                    head_on_atom[j][l][a] * s
                                })
                                .sum::<i64>()
                        })
                        .product()
                })
                .collect()
        };

        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut configs: Vec<(Vec<Vec<usize>>, Vec<i64>)> = Vec::new();
        for i in 0..total {
            let counts = counts_of(i);
            let nums = nums_of(&counts);
            let mut key = nums.clone();
            if self.class == CutClass::Signed {
                if let Some(&first) = key.iter().find(|&&v| v != 0) {
                    if first < 0 {
                        key.iter_mut().for_each(|v| *v = -*v);
                    }
                }
            }
            if seen.insert(key, ()).is_none() {
                configs.push((counts, nums));
            }
        }

        let scale = 1.0 / (n as f64).powi(t as i32);
        let cands: Vec<Result<Candidate>> = configs
            .par_iter()
            .map(|(counts, nums)| {
                let gammas: Vec<f64> = nums.iter().map(|&v| v as f64 * scale).collect();
                let a: Vec<f64> = (0..len_t)
                    .map(|e| {
                        terms
                            .iter()
                            .zip(&gammas)
                            .map(|(r, g)| r.coef * g * r.tail[e])
                            .sum()
                    })
                    .collect();
                let mut m = DMatrix::zeros(n, len_next);
                for (e, &v) in a.iter().enumerate() {
                    let v = match self.zero_below {
                        Some(th) if v.abs() < th => 0.0,
                        _ => v,
                    };
                    m[(self.idx.first(t, e), self.idx.rest(t, e))] = v / len_t as f64;
                }
                let sol = matrix_cut_oracle(&m, self.class, self.mode)?;
                let value = sol.sign as f64
                    * (0..len_t)
                        .map(|e| {
                            a[e] * (sol.x[self.idx.first(t, e)] * sol.y[self.idx.rest(t, e)]) as f64
                        })
                        .sum::<f64>()
                    / len_t as f64;
                let mut heads: Vec<Vec<i8>> = positions
                    .iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let (on, off) = match self.class {
                            CutClass::Signed => (1, -1),
                            CutClass::Boolean => (1, 0),
                        };
                        let mut f = vec![off; n];
                        for (members, &c) in p.atoms.iter().zip(&counts[j]) {
                            for &x in &members[..c] {
                                f[x] = on;
                            }
                        }
                        f
                    })
                    .collect();
                heads.push(sol.x);
                Ok(Candidate {
                    value,
                    f: SplitFunction {
                        sign: sol.sign,
                        heads,
                        tail: sol.y,
                    },
                    exact: sol.exact,
                })
            })
            .collect();
        let mut best: Option<Candidate> = None;
        let mut all_exact = grid_exact;
        for c in cands {
            let c = c?;
            all_exact &= c.exact;
            if best.as_ref().map_or(true, |b| c.value > b.value + 1e-12) {
                best = Some(c);
            }
        }
        Ok(best.map(|mut b| {
            b.exact = all_exact;
            b
        }))
    }
}

impl CorrelationOracle for StepOracle<'_> {
    type Item = SplitFunction;

    fn propose(
        &mut self,
        _residual: &[f64],
        current: &[(f64, SplitFunction)],
        threshold: f64,
    ) -> Result<OracleReply<SplitFunction>> {
        let terms = self.residual_terms(current);
        let exact_matrix = match self.mode {
            CutMode::Exact => true,
            CutMode::Auto { .. } => {
                self.idx.ground_size().min(self.idx.len(self.t + 1)) <= EXACT_SIDE_LIMIT
            }
            CutMode::Alternating { .. } => false,
        };
        if terms.is_empty() {
            return Ok(OracleReply {
                found: None,
                value: 0.0,
                exact: exact_matrix,
            });
        }
        let Some(best) = self.best(&terms)? else {
            return Ok(OracleReply {
                found: None,
                value: 0.0,
                exact: exact_matrix,
            });
        };
        let found = (best.value >= threshold).then(|| {
            let n = self.idx.ground_size();
            let tail = collapse_tail(self.idx, self.t, &best.f.heads[self.t], &best.f.tail);
            let term = LevelTerm {
                coef: best.f.sign as f64,
                heads: best.f.heads[..self.t].to_vec(),
                tail,
            };
            let values = level_values(std::slice::from_ref(&term), n, self.idx.len(self.t));
            (best.f.clone(), values)
        });
        Ok(OracleReply {
            found,
            value: best.value,
            exact: best.exact,
        })
    }
}

/// Decomposes g over a regular collection into k-fold cut functions on [n]^k.
pub fn efficient_split_decompose(
    w: &TupleCollection,
    g: &[f64],
    params: &SplitParams,
) -> Result<SplitDecomposition> {
    w.check_regular()?;
    let (n, k) = (w.ground_size(), w.arity());
    if g.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            got: g.len(),
        });
    }
    if !(params.delta > 0.0) {
        return Err(Error::Invalid(format!(
            "δ must be positive, got {}",
            params.delta
        )));
    }
    let norm = dot(g, g) / g.len() as f64;
    if norm > 1.0 + 1e-12 {
        return Err(Error::Invalid(format!("‖g‖² = {norm} exceeds 1")));
    }
    let idx = SuffixIndex::new(w);
    if idx.len(0) != w.len() {
        return Err(Error::NotRegular("collection has repeated tuples".into()));
    }
    let delta_step = params
        .level_delta
        .unwrap_or(params.delta / (2.0 * k as f64));
    let exact_matrix = match params.mode {
        CutMode::Exact => true,
        CutMode::Auto { .. } => n <= EXACT_SIDE_LIMIT,
        CutMode::Alternating { .. } => false,
    };
    let delta_prime = params.delta_prime.unwrap_or(if exact_matrix {
        delta_step
    } else {
        delta_step / 16.0
    });
    let eta = params
        .eta
        .unwrap_or_else(|| delta_step.powi(3) / (4.0 * k as f64 * (1.0 / delta_prime)));
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Invalid(format!("η must lie in (0, 1], got {eta}")));
    }

    if k == 1 {
        let space = TensorSpace::from_collection(w);
        let mut oracle = super::ExhaustiveTensorOracle::new(space, params.class);
        let mut lp = LoopParams::new(params.delta, delta_prime.min(params.delta), 1.0)?;
        lp.step = params.step;
        let mut g1 = vec![0.0; n];
        for (tup, v) in w.iter().zip(g) {
            g1[tup[0] as usize] = *v;
        }
        let dec = abstract_decompose(&g1, &mut oracle, lp)?;
        let report = LevelReport {
            level: 0,
            bound: 1.0,
            steps: dec.log.len(),
            terms: dec.terms.len(),
            final_correlation: dec.final_correlation,
            certified: dec.certified,
            log: dec.log,
        };
        return Ok(SplitDecomposition {
            n,
            k,
            terms: dec.terms,
            levels: vec![report],
            delta: params.delta,
            delta_step,
            delta_prime,
            eta,
            certified: dec.certified,
        });
    }

    let mut tail0 = vec![0.0; idx.len(0)];
    for (i, &v) in g.iter().enumerate() {
        tail0[idx.tuple_id(i)] = v;
    }
    let mut current = vec![LevelTerm {
        coef: 1.0,
        heads: vec![],
        tail: tail0,
    }];
    let mut levels = Vec::new();
    let mut certified = true;
    for t in 0..k - 1 {
        let values = level_values(&current, n, idx.len(t));
        let bound = dot(&values, &values) / values.len() as f64;
        if bound <= 1e-300 {
            current.clear();
            break;
        }
        let mut oracle = StepOracle {
            idx: &idx,
            t,
            targets: &current,
            class: params.class,
            mode: params.mode,
            eta,
            zero_below: (!exact_matrix).then_some(delta_step / 8.0),
            config_cap: params.config_cap,
        };
        let lp = LoopParams {
            delta: delta_step,
            delta_prime: delta_prime.min(delta_step),
            bound,
            step: params.step,
        };
        let dec = abstract_decompose(&values, &mut oracle, lp)?;
        certified &= dec.certified;
        levels.push(LevelReport {
            level: t,
            bound,
            steps: dec.log.len(),
            terms: dec.terms.len(),
            final_correlation: dec.final_correlation,
            certified: dec.certified,
            log: dec.log,
        });
        current = dec
            .terms
            .into_iter()
            .map(|(c, f)| LevelTerm {
                coef: c * f.sign as f64,
                heads: f.heads,
                tail: f.tail.iter().map(|&v| v as f64).collect(),
            })
            .collect();
        if current.is_empty() {
            break;
        }
    }

    let terms = current
        .into_iter()
        .map(|term| {
            let mut factors = term.heads;
            let mut last = vec![0i8; n];
            for (e, &v) in term.tail.iter().enumerate() {
                last[idx.suffix(k - 1, e)[0] as usize] = v as i8;
            }
            factors.push(last);
            (term.coef, TensorCutFunction { sign: 1, factors })
        })
        .collect();
    Ok(SplitDecomposition {
        n,
        k,
        terms,
        levels,
        delta: params.delta,
        delta_step,
        delta_prime,
        eta,
        certified: certified && exact_matrix,
    })
}

/// max_f ⟨R, f⟩ over [n]^k with R = (n^k/|W|)·g·1_W − h, by exhaustive search.
pub fn verify_split_residual(
    w: &TupleCollection,
    g: &[f64],
    dec: &SplitDecomposition,
    class: CutClass,
    cap: u128,
) -> Result<f64> {
    let (n, k) = (w.ground_size(), w.arity());
    if g.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            got: g.len(),
        });
    }
    let space = TensorSpace::full(n, k, walks::DEFAULT_TUPLE_CAP)?;
    let mut r: Vec<f64> = space.iter().map(|p| -dec.eval(p)).collect();
    let scale = space.len() as f64 / w.len() as f64;
    let tw = TensorSpace::from_collection(w);
    for (gi, v) in tw.grid_indices().into_iter().zip(g) {
        r[gi] += scale * v;
    }
    Ok(exhaustive_tensor_max(&space, &r, class, cap)?.0)
}

/// Measures the splittable-mixing gap for pairs of level functions.
pub struct MixingChecker {
    idx: SuffixIndex,
    tau: f64,
}

impl MixingChecker {
    pub fn new(w: &TupleCollection) -> Result<Self> {
        w.check_regular()?;
        Ok(MixingChecker {
            idx: SuffixIndex::new(w),
            tau: walks::splittability_tau(w)?,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn index(&self) -> &SuffixIndex {
        &self.idx
    }

    /// |⟨f′, f⟩_{ν_{t+1}} − ⟨f′, f⟩_{ν_t}| for f, f′ of level t+1, with τ.
    pub fn check(&self, f: &SplitFunction, g: &SplitFunction) -> Result<(f64, f64)> {
        let lvl = f.level();
        if lvl == 0 || lvl != g.level() || lvl >= self.idx.arity() {
            return Err(Error::Invalid(format!(
                "functions must share a level in 1..k, got {} and {}",
                lvl,
                g.level()
            )));
        }
        let (n, t) = (self.idx.ground_size(), lvl - 1);
        let len_next = self.idx.len(lvl);
        for h in f.heads.iter().chain(&g.heads) {
            if h.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: h.len(),
                });
            }
        }
        for tail in [&f.tail, &g.tail] {
            if tail.len() != len_next {
                return Err(Error::LengthMismatch {
                    expected: len_next,
                    got: tail.len(),
                });
            }
        }
        let mut common = (f.sign * g.sign) as f64;
        for j in 0..t {
            common *= f.heads[j]
                .iter()
                .zip(&g.heads[j])
                .map(|(&a, &b)| (a * b) as f64)
                .sum::<f64>()
                / n as f64;
        }
        let u: Vec<f64> = f.heads[t]
            .iter()
            .zip(&g.heads[t])
            .map(|(&a, &b)| (a * b) as f64)
            .collect();
        let v: Vec<f64> = f
            .tail
            .iter()
            .zip(&g.tail)
            .map(|(&a, &b)| (a * b) as f64)
            .collect();
        let len_t = self.idx.len(t);
        let joint: f64 = (0..len_t)
            .map(|e| u[self.idx.first(t, e)] * v[self.idx.rest(t, e)])
            .sum::<f64>()
            / len_t as f64;
        let split = u.iter().sum::<f64>() / n as f64 * v.iter().sum::<f64>() / len_next as f64;
        Ok(((common * (joint - split)).abs(), self.tau))
    }
}

/// |E_W f − E_{[n]^k} f| and the bound (k−1)τ.
pub fn iterated_mixing_gap(
    checker: &MixingChecker,
    w: &TupleCollection,
    f: &TensorCutFunction,
) -> Result<(f64, f64)> {
    let (n, k) = (w.ground_size(), w.arity());
    if f.arity() != k || f.factors.iter().any(|x| x.len() != n) {
        return Err(Error::Invalid(
            "function shape does not match the collection".into(),
        ));
    }
    let on_w = w.iter().map(|p| f.eval(p)).sum::<f64>() / w.len() as f64;
    let full = f.sign as f64
        * f.factors
            .iter()
            .map(|x| x.iter().map(|&v| v as f64).sum::<f64>() / n as f64)
            .product::<f64>();
    Ok(((on_w - full).abs(), (k as f64 - 1.0) * checker.tau))
}
