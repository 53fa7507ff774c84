//! Weak-regularity decompositions: cut-function classes, the abstract descent loop,
//! correlation oracles and the split-level induction.

mod factor;
pub(crate) use factor::partition_by_patterns;
mod oracle;
mod split;

pub use factor::{
    build_factor, conditional_average, conditional_average_weighted, FactorPartition,
    MAX_FACTOR_FUNCTIONS,
};
pub use oracle::{
    exhaustive_tensor_max, matrix_cut_oracle, CutMode, CutSolution, ExhaustiveTensorOracle,
    EXACT_SIDE_LIMIT, TENSOR_ENUM_CAP,
};
pub use split::{
    efficient_split_decompose, iterated_mixing_gap, verify_split_residual, LevelReport,
    MixingChecker, SplitDecomposition, SplitFunction, SplitParams, SuffixIndex, DEFAULT_CONFIG_CAP,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::walks::TupleCollection;

/// Which tensor cut class: products of 0/1 indicators or of ±1 characters, each with a global sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CutClass {
    Boolean,
    Signed,
}

impl CutClass {
    fn allows(self, v: i8) -> bool {
        match self {
            CutClass::Boolean => v == 0 || v == 1,
            CutClass::Signed => v == 1 || v == -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CutClass::Boolean => "cut01",
            CutClass::Signed => "cutpm",
        }
    }
}

/// ±f_1 ⊗ ⋯ ⊗ f_k with each factor a vector over [n].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorCutFunction {
    pub sign: i8,
    pub factors: Vec<Vec<i8>>,
}

impl TensorCutFunction {
    pub fn new(sign: i8, factors: Vec<Vec<i8>>, class: CutClass) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Invalid(format!("sign must be ±1, got {sign}")));
        }
        let n = factors.first().map(Vec::len).unwrap_or(0);
        for f in &factors {
            if f.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: f.len(),
                });
            }
            if let Some(v) = f.iter().find(|&&v| !class.allows(v)) {
                return Err(Error::Invalid(format!(
                    "factor entry {v} not allowed in class {}",
                    class.name()
                )));
            }
        }
        Ok(TensorCutFunction { sign, factors })
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    #[inline]
    pub fn eval(&self, point: &[u32]) -> f64 {
        let mut v = self.sign as i32;
        for (f, &x) in self.factors.iter().zip(point) {
            v *= f[x as usize] as i32;
        }
        v as f64
    }

    pub fn values_on(&self, space: &TensorSpace) -> Vec<f64> {
        space.iter().map(|p| self.eval(p)).collect()
    }
}

/// A finite set of points in [n]^k carrying the uniform measure.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSpace {
    n: usize,
    k: usize,
    points: Vec<u32>,
}

impl TensorSpace {
    pub fn new(n: usize, k: usize, points: Vec<u32>) -> Result<Self> {
        if n == 0 || k == 0 || points.is_empty() || points.len() % k != 0 {
            return Err(Error::Invalid(
                "tensor space needs n, k > 0 and a nonempty list of k-tuples".into(),
            ));
        }
        if points.iter().any(|&x| x as usize >= n) {
            return Err(Error::Invalid("point coordinate out of range".into()));
        }
        Ok(TensorSpace { n, k, points })
    }

    /// All of [n]^k in lexicographic order.
    pub fn full(n: usize, k: usize, cap: usize) -> Result<Self> {
        let w = crate::walks::complete(n, k, cap)?;
        Self::new(n, k, w.flat().to_vec())
    }

    pub fn from_collection(w: &TupleCollection) -> Self {
        TensorSpace {
            n: w.ground_size(),
            k: w.arity(),
            points: w.flat().to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u32> {
        self.points.chunks_exact(self.k)
    }

    /// Index of every point in the full grid [n]^k (position 0 most significant).
    pub fn grid_indices(&self) -> Vec<usize> {
        self.iter()
            .map(|p| p.iter().fold(0usize, |acc, &x| acc * self.n + x as usize))
            .collect()
    }
}

/// E_μ[a·b] for the uniform measure on the common index set.
pub fn inner_product(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Invalid("inner product over an empty set".into()));
    }
    Ok(dot(a, b) / a.len() as f64)
}

/// Σ a·b without normalization.
pub fn counting_inner_product(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(dot(a, b))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How the abstract loop sizes each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepRule {
    /// c = δ′.
    Fixed,
    /// c = ⟨r, f⟩ / ‖f‖², the exact minimizer along f.
    LineSearch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LoopParams {
    pub delta: f64,
    pub delta_prime: f64,
    /// Radius² of the ball h is projected onto.
    pub bound: f64,
    pub step: StepRule,
}

impl LoopParams {
    pub fn new(delta: f64, delta_prime: f64, bound: f64) -> Result<Self> {
        let p = LoopParams {
            delta,
            delta_prime,
            bound,
            step: StepRule::Fixed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta_prime > 0.0 && self.delta_prime <= self.delta + 1e-15) {
            return Err(Error::Invalid(format!(
                "need δ ≥ δ′ > 0, got δ = {}, δ′ = {}",
                self.delta, self.delta_prime
            )));
        }
        if !(self.bound > 0.0) {
            return Err(Error::Invalid(format!(
                "norm bound must be positive, got {}",
                self.bound
            )));
        }
        Ok(())
    }

    /// ⌈B/δ′²⌉.
    pub fn max_steps(&self) -> usize {
        (self.bound / (self.delta_prime * self.delta_prime) - 1e-9)
            .ceil()
            .max(0.0) as usize
    }
}

/// One accepted step: the oracle's correlation and ‖g − h‖² after the update.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogEntry {
    pub step: usize,
    pub correlation: f64,
    pub residual_sq: f64,
}

/// What an oracle returns for a residual.
pub struct OracleReply<T> {
    /// A class function with its values on the space, when the oracle's best reaches the threshold.
    pub found: Option<(T, Vec<f64>)>,
    /// The oracle's best correlation.
    pub value: f64,
    /// Whether `value` is the true maximum over the class.
    pub exact: bool,
}

pub trait CorrelationOracle {
    type Item: Clone + PartialEq;

    fn propose(
        &mut self,
        residual: &[f64],
        current: &[(f64, Self::Item)],
        threshold: f64,
    ) -> Result<OracleReply<Self::Item>>;
}

#[derive(Clone, Debug)]
pub struct RegularityDecomposition<T> {
    pub terms: Vec<(f64, T)>,
    pub values: Vec<f64>,
    pub log: Vec<LogEntry>,
    pub initial_residual_sq: f64,
    pub params: LoopParams,
    /// Every oracle call was exact, so the final residual correlation is below δ′.
    pub certified: bool,
    /// The oracle's best correlation at termination.
    pub final_correlation: f64,
}

impl<T> RegularityDecomposition<T> {
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.values, &self.values) / self.values.len().max(1) as f64
    }
}

/// If ‖h‖² > B, scales h (values and coefficients) onto the sphere of radius √B.
pub fn project_ball<T>(values: &mut [f64], terms: &mut [(f64, T)], bound: f64) {
    let norm_sq = dot(values, values) / values.len().max(1) as f64;
    if norm_sq > bound {
        let s = (bound / norm_sq).sqrt();
        values.iter_mut().for_each(|v| *v *= s);
        terms.iter_mut().for_each(|(c, _)| *c *= s);
    }
}

/// Greedy descent: add c·f for each oracle proposal with ⟨g − h, f⟩ ≥ δ′ and project onto the
/// ball of radius √B, until the oracle finds nothing above δ′ or ⌈B/δ′²⌉ steps are taken.
pub fn abstract_decompose<O: CorrelationOracle>(
    g: &[f64],
    oracle: &mut O,
    params: LoopParams,
) -> Result<RegularityDecomposition<O::Item>> {
    params.validate()?;
    if g.is_empty() {
        return Err(Error::Invalid("empty target".into()));
    }
    let len = g.len() as f64;
    let g_norm_sq = dot(g, g) / len;
    if g_norm_sq > params.bound * (1.0 + 1e-12) {
        return Err(Error::Invalid(format!(
            "‖g‖² = {g_norm_sq} exceeds the bound {}",
            params.bound
        )));
    }
    let mut h = vec![0.0; g.len()];
    let mut terms: Vec<(f64, O::Item)> = Vec::new();
    let mut log = Vec::new();
    let mut certified = true;
    let mut residual: Vec<f64> = g.to_vec();
    let mut final_correlation;
    let max_steps = params.max_steps();
    loop {
        let reply = oracle.propose(&residual, &terms, params.delta_prime)?;
        certified &= reply.exact;
        final_correlation = reply.value;
        let Some((f, fv)) = reply.found else { break };
        if log.len() >= max_steps {
            break;
        }
        if fv.len() != g.len() {
            return Err(Error::LengthMismatch {
                expected: g.len(),
                got: fv.len(),
            });
        }
        let corr = dot(&residual, &fv) / len;
        if corr < params.delta_prime - 1e-12 {
            return Err(Error::Contract(format!(
                "oracle returned correlation {corr:.6e} below δ′ = {:.6e} (claimed {:.6e})",
                params.delta_prime, reply.value
            )));
        }
        let c = match params.step {
            StepRule::Fixed => params.delta_prime,
            StepRule::LineSearch => corr / (dot(&fv, &fv) / len),
        };
        for (hv, fx) in h.iter_mut().zip(&fv) {
            *hv += c * fx;
        }
        match terms.iter_mut().find(|(_, t)| *t == f) {
            Some(term) => term.0 += c,
            None => terms.push((c, f)),
        }
        project_ball(&mut h, &mut terms, params.bound);
        for ((r, gv), hv) in residual.iter_mut().zip(g).zip(&h) {
            *r = gv - hv;
        }
        log.push(LogEntry {
            step: log.len() + 1,
            correlation: corr,
            residual_sq: dot(&residual, &residual) / len,
        });
    }
    terms.retain(|(c, _)| *c != 0.0);
    Ok(RegularityDecomposition {
        terms,
        values: h,
        log,
        initial_residual_sq: g_norm_sq,
        params,
        certified,
        final_correlation,
    })
}
