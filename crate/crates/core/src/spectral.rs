//! Rotation-map graphs, dense walk operators and second singular values.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::BitWord;

/// Largest dimension handled by full factorization in [`sigma2`].
pub const DENSE_FACTOR_LIMIT: usize = 2048;

/// Default cap on the dimension of any dense operator built from a product graph.
pub const DEFAULT_DENSE_CAP: usize = 8192;

pub type DenseOperator = DMatrix<f64>;

/// A d-regular graph given by its rotation map, stored as `rot[v * d + j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationGraph {
    n: usize,
    d: usize,
    rot: Vec<(u32, u32)>,
}

impl RotationGraph {
    /// Validates ranges and the involution property.
    pub fn new(n: usize, d: usize, rot: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Invalid(
                "graph needs at least one vertex and one port".into(),
            ));
        }
        if rot.len() != n * d {
            return Err(Error::LengthMismatch {
                expected: n * d,
                got: rot.len(),
            });
        }
        if n > u32::MAX as usize || d > u32::MAX as usize {
            return Err(Error::Invalid("graph too large".into()));
        }
        for (idx, &(w, p)) in rot.iter().enumerate() {
            if w >= n || p >= d {
                return Err(Error::Invalid(format!(
                    "rot({}, {}) = ({w}, {p}) out of range",
                    idx / d,
                    idx % d
                )));
            }
            if rot[w * d + p] != (idx / d, idx % d) {
                return Err(Error::Invalid(format!(
                    "rotation map is not an involution at ({}, {})",
                    idx / d,
                    idx % d
                )));
            }
        }
        let rot = rot.into_iter().map(|(w, p)| (w as u32, p as u32)).collect();
        Ok(RotationGraph { n, d, rot })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn rot(&self, v: usize, j: usize) -> (usize, usize) {
        let (w, p) = self.rot[v * self.d + j];
        (w as usize, p as usize)
    }

    #[inline]
    pub fn neighbor(&self, v: usize, j: usize) -> usize {
        self.rot[v * self.d + j].0 as usize
    }

    /// True when no vertex has a loop or two ports to the same neighbor.
    pub fn is_simple(&self) -> bool {
        let mut seen = vec![usize::MAX; self.n];
        for v in 0..self.n {
            for j in 0..self.d {
                let w = self.neighbor(v, j);
                if w == v || seen[w] == v {
                    return false;
                }
                seen[w] = v;
            }
        }
        true
    }

    /// The cycle C_n: port 0 steps forward, port 1 steps back.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Invalid(format!("cycle needs n >= 3, got {n}")));
        }
        let mut rot = Vec::with_capacity(2 * n);
        for v in 0..n {
            rot.push(((v + 1) % n, 1));
            rot.push(((v + n - 1) % n, 0));
        }
        Self::new(n, 2, rot)
    }

    /// The complete graph with a loop at every vertex; its normalized adjacency is J/n.
    pub fn complete_with_loops(n: usize) -> Result<Self> {
        let mut rot = Vec::with_capacity(n * n);
        for u in 0..n {
            for j in 0..n {
                rot.push((j, u));
            }
        }
        Self::new(n, n, rot)
    }

    /// Cayley graph on F₂^m: port j adds generator a_j and returns on port j.
    pub fn cayley_f2(spec: &CayleyGraphSpec) -> Result<Self> {
        spec.validate()?;
        let n = 1usize << spec.m;
        let d = spec.generators.len();
        let mut rot = Vec::with_capacity(n * d);
        for v in 0..n {
            for (j, &a) in spec.generators.iter().enumerate() {
                rot.push((v ^ a as usize, j));
            }
        }
        Self::new(n, d, rot)
    }

    /// A simple d-regular graph from d/2 random permutations, resampled until simple.
    pub fn random_regular(n: usize, d: usize, seed: u64, budget: usize) -> Result<Self> {
        if d == 0 || d % 2 != 0 {
            return Err(Error::Invalid(format!(
                "random regular graphs need even positive degree, got {d}"
            )));
        }
        if d >= n {
            return Err(Error::Invalid(format!(
                "degree {d} too large for {n} vertices"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget {
            let mut rot = vec![(0usize, 0usize); n * d];
            for i in 0..d / 2 {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                for v in 0..n {
                    let w = perm[v];
                    rot[v * d + 2 * i] = (w, 2 * i + 1);
                    rot[w * d + 2 * i + 1] = (v, 2 * i);
                }
            }
            let g = Self::new(n, d, rot)?;
            if g.is_simple() {
                return Ok(g);
            }
        }
        Err(Error::Budget {
            what: format!("no simple {d}-regular graph on {n} vertices"),
            attempts: budget,
        })
    }
}

/// Generators of a Cayley graph on F₂^m, each an m-bit integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyGraphSpec {
    pub m: usize,
    pub generators: Vec<u64>,
}

impl CayleyGraphSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > 24 {
            return Err(Error::Invalid(format!(
                "group dimension must be in 1..=24, got {}",
                self.m
            )));
        }
        if self.generators.is_empty() {
            return Err(Error::Invalid("empty generator set".into()));
        }
        let mut sorted = self.generators.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.generators.len() {
            return Err(Error::Invalid("generators must be distinct".into()));
        }
        if let Some(&a) = self
            .generators
            .iter()
            .find(|&&a| a == 0 || a >> self.m != 0)
        {
            return Err(Error::Invalid(format!(
                "generator {a} is zero or outside F2^{}",
                self.m
            )));
        }
        Ok(())
    }

    /// `d` distinct nonzero generators drawn uniformly.
    pub fn random(m: usize, d: usize, seed: u64) -> Result<Self> {
        if m == 0 || m > 24 || d >= (1usize << m) || d == 0 {
            return Err(Error::Invalid(format!(
                "cannot draw {d} distinct nonzero generators from F2^{m}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gens = Vec::with_capacity(d);
        while gens.len() < d {
            let a: u64 = rng.gen_range(1..(1u64 << m));
            if !gens.contains(&a) {
                gens.push(a);
            }
        }
        Ok(CayleyGraphSpec {
            m,
            generators: gens,
        })
    }

    /// Generators given as bit strings, most significant bit first.
    pub fn from_bitstrings(m: usize, gens: &[&str]) -> Result<Self> {
        let generators = gens
            .iter()
            .map(|s| {
                u64::from_str_radix(s.trim(), 2)
                    .map_err(|e| Error::Parse(format!("generator {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = CayleyGraphSpec { m, generators };
        spec.validate()?;
        Ok(spec)
    }
}

/// Entry (u, v) is the number of ports from u to v divided by d.
pub fn normalized_adjacency(g: &RotationGraph) -> DenseOperator {
    let mut a = DMatrix::zeros(g.n(), g.n());
    let w = 1.0 / g.degree() as f64;
    for v in 0..g.n() {
        for j in 0..g.degree() {
            a[(v, g.neighbor(v, j))] += w;
        }
    }
    a
}

fn is_symmetric(m: &DenseOperator) -> bool {
    m.is_square() && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= 1e-12))
}

/// All singular values in decreasing order, by full factorization.
pub fn singular_values(m: &DenseOperator) -> Vec<f64> {
    let mut s: Vec<f64> = if m.nrows() == 0 || m.ncols() == 0 {
        Vec::new()
    } else if is_symmetric(m) {
        SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .map(|x| x.abs())
            .collect()
    } else {
        m.clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Second-largest singular value (0 when fewer than two exist).
pub fn sigma2(m: &DenseOperator) -> Result<f64> {
    Ok(top_two_singular(m)?.1)
}

/// Second-largest eigenvalue of a symmetric operator, by full factorization.
pub fn second_eigenvalue(m: &DenseOperator) -> Result<f64> {
    if !is_symmetric(m) {
        return Err(Error::Invalid(
            "second eigenvalue needs a symmetric operator".into(),
        ));
    }
    if m.nrows() < 2 {
        return Ok(0.0);
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev[1])
}

/// Largest singular value, the operator norm.
pub fn sigma1(m: &DenseOperator) -> Result<f64> {
    Ok(top_two_singular(m)?.0)
}

fn top_two_singular(m: &DenseOperator) -> Result<(f64, f64)> {
    if m.nrows().max(m.ncols()) < DENSE_FACTOR_LIMIT {
        let s = singular_values(m);
        Ok((
            s.first().copied().unwrap_or(0.0),
            s.get(1).copied().unwrap_or(0.0),
        ))
    } else {
        top_two_iterative(m)
    }
}

/// Top two singular values by Lanczos with full reorthogonalization and one deflation.
pub fn sigma2_iterative(m: &DenseOperator) -> Result<f64> {
    Ok(top_two_iterative(m)?.1)
}

fn top_two_iterative(m: &DenseOperator) -> Result<(f64, f64)> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok((0.0, 0.0));
    }
    if is_symmetric(m) {
        let apply = |x: &DVector<f64>| m * x;
        let dim = m.nrows();
        let (l1, v1) = lanczos_top(&apply, dim, Which::Magnitude, &[])?;
        if dim == 1 {
            return Ok((l1.abs(), 0.0));
        }
        let (l2, _) = lanczos_top(&apply, dim, Which::Magnitude, &[(l1, v1)])?;
        Ok((l1.abs(), l2.abs()))
    } else {
        // Eigenvalues of [[0, M], [Mᵀ, 0]] are ±σ_i plus zeros.
        let (r, c) = (m.nrows(), m.ncols());
        let apply = |x: &DVector<f64>| {
            let top = m * x.rows(r, c);
            let bottom = m.transpose() * x.rows(0, r);
            let mut y = DVector::zeros(r + c);
            y.rows_mut(0, r).copy_from(&top);
            y.rows_mut(r, c).copy_from(&bottom);
            y
        };
        let (l1, v1) = lanczos_top(&apply, r + c, Which::Algebraic, &[])?;
        if r.min(c) == 1 {
            return Ok((l1.max(0.0), 0.0));
        }
        let (l2, _) = lanczos_top(&apply, r + c, Which::Algebraic, &[(l1, v1)])?;
        Ok((l1.max(0.0), l2.max(0.0)))
    }
}

#[derive(Clone, Copy)]
enum Which {
    Magnitude,
    Algebraic,
}

/// Extreme eigenpair of the symmetric operator `apply` minus the given rank-one deflations.
fn lanczos_top(
    apply: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    dim: usize,
    which: Which,
    deflate: &[(f64, DVector<f64>)],
) -> Result<(f64, DVector<f64>)> {
    let op = |x: &DVector<f64>| {
        let mut y = apply(x);
        for (lam, v) in deflate {
            y.axpy(-lam * v.dot(x), v, 1.0);
        }
        y
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002 + deflate.len() as u64);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = fresh_direction(dim, &basis, &mut rng);
    let tol = 1e-12;
    let mut last_residual = f64::INFINITY;
    loop {
        let mut w = op(&q);
        let a = q.dot(&w);
        w.axpy(-a, &q, 1.0);
        basis.push(q.clone());
        alpha.push(a);
        // Twice-applied Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let b = w.norm();
        let j = basis.len();
        let check = j == dim || j % 8 == 0 || b < 1e-10;
        if check {
            let (theta, s) = ritz(&alpha, &beta, which);
            let scale = theta.abs().max(1.0);
            let residual = (b * s[j - 1]).abs();
            last_residual = residual;
            if residual <= tol * scale || j == dim {
                let mut v = DVector::zeros(dim);
                for (i, bi) in basis.iter().enumerate() {
                    v.axpy(s[i], bi, 1.0);
                }
                let nv = v.norm();
                return Ok((theta, v / nv));
            }
        }
        if j >= dim + 8 {
            return Err(Error::Convergence {
                residual: last_residual,
            });
        }
        if b < 1e-10 {
            // Invariant subspace found; continue from a new orthogonal direction.
            beta.push(0.0);
            q = fresh_direction(dim, &basis, &mut rng);
        } else {
            beta.push(b);
            q = w / b;
        }
    }
}

fn fresh_direction(dim: usize, basis: &[DVector<f64>], rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let mut v = DVector::from_fn(dim, |_, _| rng.gen::<f64>() - 0.5);
        for _ in 0..2 {
            for b in basis {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

fn ritz(alpha: &[f64], beta: &[f64], which: Which) -> (f64, Vec<f64>) {
    let j = alpha.len();
    let t = DMatrix::from_fn(j, j, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let key = |x: f64| match which {
        Which::Magnitude => x.abs(),
        Which::Algebraic => x,
    };
    let best = (0..j)
        .max_by(|&a, &b| key(eig.eigenvalues[a]).total_cmp(&key(eig.eigenvalues[b])))
        .unwrap_or(0);
    (
        eig.eigenvalues[best],
        eig.eigenvectors.column(best).iter().copied().collect(),
    )
}

/// Outcome of an expander-mixing comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingCheck {
    pub lhs: f64,
    pub bound: f64,
}

impl MixingCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound + 1e-9
    }
}

/// Compares |e(S,T)/(nd) − |S||T|/n²| with σ₂·√(|S|/n · |T|/n).
pub fn expander_mixing_check(g: &RotationGraph, s: &[usize], t: &[usize]) -> Result<MixingCheck> {
    let n = g.n();
    let mut in_s = vec![false; n];
    let mut in_t = vec![false; n];
    for (set, mask) in [(s, &mut in_s), (t, &mut in_t)] {
        for &v in set {
            if v >= n {
                return Err(Error::Invalid(format!("vertex {v} out of range")));
            }
            mask[v] = true;
        }
    }
    let (ns, nt) = (
        in_s.iter().filter(|&&b| b).count(),
        in_t.iter().filter(|&&b| b).count(),
    );
    let mut edges = 0usize;
    for v in (0..n).filter(|&v| in_s[v]) {
        edges += (0..g.degree()).filter(|&j| in_t[g.neighbor(v, j)]).count();
    }
    let nf = n as f64;
    let lhs = (edges as f64 / (nf * g.degree() as f64) - (ns * nt) as f64 / (nf * nf)).abs();
    let lambda = sigma2(&normalized_adjacency(g))?;
    let bound = lambda * (ns as f64 / nf).sqrt() * (nt as f64 / nf).sqrt();
    Ok(MixingCheck { lhs, bound })
}

/// Diagonal ±1 operator on V(G)×V(H) with entry (−1)^{z_v} at (v, u).
pub fn sign_operator(z: &BitWord, cloud_size: usize) -> DenseOperator {
    let n = z.len();
    DMatrix::from_diagonal(&DVector::from_fn(n * cloud_size, |x, _| {
        if z.get(x / cloud_size) {
            -1.0
        } else {
            1.0
        }
    }))
}

/// The s-wide replacement product of a d₁-regular G with a d₂-regular H on d₁^s vertices.
///
/// A product vertex (v, u) has index `v * d₁^s + u`. The label u is read as s base-d₁ digits
/// a_0 … a_{s−1} with a_0 the most significant; step i of G moves along port a_i.
#[derive(Clone, Debug)]
pub struct SWideProduct {
    pub g: RotationGraph,
    pub h: RotationGraph,
    pub s: usize,
    cloud: usize,
}

impl SWideProduct {
    pub fn new(g: RotationGraph, h: RotationGraph, s: usize) -> Result<Self> {
        Self::with_cap(g, h, s, DEFAULT_DENSE_CAP)
    }

    pub fn with_cap(g: RotationGraph, h: RotationGraph, s: usize, cap: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::Invalid("width s must be positive".into()));
        }
        let cloud = (g.degree() as u128)
            .checked_pow(s as u32)
            .unwrap_or(u128::MAX);
        if h.n() as u128 != cloud {
            return Err(Error::Dimension(format!(
                "inner graph has {} vertices but d1^s = {}^{} = {cloud}",
                h.n(),
                g.degree(),
                s
            )));
        }
        Error::check_cap("product dimension", g.n() as u128 * cloud, cap as u128)?;
        Ok(SWideProduct {
            g,
            h,
            s,
            cloud: cloud as usize,
        })
    }

    pub fn cloud_size(&self) -> usize {
        self.cloud
    }

    pub fn d1(&self) -> usize {
        self.g.degree()
    }

    pub fn d2(&self) -> usize {
        self.h.degree()
    }

    /// Number of product vertices N = n·d₁^s.
    pub fn size(&self) -> usize {
        self.g.n() * self.cloud
    }

    fn place(&self, i: usize) -> usize {
        self.d1().pow((self.s - 1 - i) as u32)
    }

    /// Rot_i: move along the G-port held in digit i and record the return port there.
    #[inline]
    pub fn rot_i(&self, x: usize, i: usize) -> usize {
        let (v, u) = (x / self.cloud, x % self.cloud);
        let place = self.place(i % self.s);
        let digit = (u / place) % self.d1();
        let (w, p) = self.g.rot(v, digit);
        w * self.cloud + u - digit * place + p * place
    }

    /// One H step inside the cloud along port h.
    #[inline]
    pub fn h_step(&self, x: usize, h: usize) -> usize {
        let (v, u) = (x / self.cloud, x % self.cloud);
        v * self.cloud + self.h.neighbor(u, h)
    }

    /// The vertex reached by a tweaked step (H, G_i, H) with ports m = h1·d₂ + h2.
    #[inline]
    pub fn zigzag_step(&self, x: usize, i: usize, m: usize) -> usize {
        let (h1, h2) = (m / self.d2(), m % self.d2());
        self.h_step(self.rot_i(self.h_step(x, h1), i), h2)
    }

    /// The vertex reached by an untweaked step (H, G_i) along H-port h.
    #[inline]
    pub fn plain_step(&self, x: usize, i: usize, h: usize) -> usize {
        self.rot_i(self.h_step(x, h), i)
    }

    /// Dense (I⊗A_H)·Ĝ_i·(I⊗A_H).
    pub fn zigzag_operator(&self, i: usize) -> DenseOperator {
        let nn = self.size();
        let d = self.d2() * self.d2();
        let w = 1.0 / d as f64;
        let mut z = DMatrix::zeros(nn, nn);
        for x in 0..nn {
            for m in 0..d {
                z[(x, self.zigzag_step(x, i, m))] += w;
            }
        }
        z
    }

    /// Dense (I⊗A_H)·Ĝ_i.
    pub fn plain_operator(&self, i: usize) -> DenseOperator {
        let nn = self.size();
        let w = 1.0 / self.d2() as f64;
        let mut z = DMatrix::zeros(nn, nn);
        for x in 0..nn {
            for h in 0..self.d2() {
                z[(x, self.plain_step(x, i, h))] += w;
            }
        }
        z
    }

    fn check_word(&self, z: &BitWord) -> Result<()> {
        if z.len() != self.g.n() {
            return Err(Error::LengthMismatch {
                expected: self.g.n(),
                got: z.len(),
            });
        }
        Ok(())
    }

    /// Norm of ∏_{i=0}^{s−1} (I⊗A_H)P_z Ĝ_i(I⊗A_H), multiplied left to right.
    pub fn signed_product_norm(&self, z: &BitWord) -> Result<f64> {
        self.check_word(z)?;
        let p = sign_operator(z, self.cloud);
        let mut acc = DMatrix::identity(self.size(), self.size());
        for i in 0..self.s {
            acc = acc * (&p * self.zigzag_operator(i));
        }
        sigma1(&acc)
    }

    /// |⟨1, P_z Z_0 P_z Z_1 ⋯ Z_{k−2} P_z 1⟩| / N, where Z_i uses G_{i mod s}.
    pub fn lifted_bias_via_operator(&self, z: &BitWord, k: usize) -> Result<f64> {
        self.check_word(z)?;
        if k == 0 {
            return Err(Error::Invalid("arity must be positive".into()));
        }
        let nn = self.size();
        let signs: Vec<f64> = (0..nn)
            .map(|x| if z.get(x / self.cloud) { -1.0 } else { 1.0 })
            .collect();
        let zs: Vec<DenseOperator> = (0..self.s.min(k - 1))
            .map(|i| self.zigzag_operator(i))
            .collect();
        // Evaluate right to left as a vector recursion.
        let mut v = DVector::from_vec(signs.clone());
        for i in (0..k - 1).rev() {
            v = &zs[i % self.s] * v;
            v.component_mul_assign(&DVector::from_vec(signs.clone()));
        }
        Ok((v.sum() / nn as f64).abs())
    }

    /// The closed-form norm bound σ₂(H²)^{s−1} + (s−1)σ₂(H²)^{s−2} + (s−1)²σ₂(H²)^{s−4},
    /// reported only when ε₀ + 2σ₂(G) ≤ σ₂(H)⁴ with ε₀ = bias(z).
    pub fn signed_product_bound(&self, z: &BitWord) -> Result<Option<f64>> {
        self.check_word(z)?;
        let ah = normalized_adjacency(&self.h);
        let s2h = sigma2(&ah)?;
        let s2g = sigma2(&normalized_adjacency(&self.g))?;
        let eps0 = crate::gf2::bias(z);
        if eps0 + 2.0 * s2g > s2h.powi(4) + 1e-12 {
            return Ok(None);
        }
        let l = sigma2(&(&ah * &ah))?;
        let s = self.s as i32;
        let sm1 = (self.s - 1) as f64;
        Ok(Some(
            l.powi(s - 1) + sm1 * l.powi(s - 2) + sm1 * sm1 * l.powi(s - 4),
        ))
    }
}

/// σ₂(G) + 2σ₂(H) + σ₂(H)².
pub fn zigzag_bound(s2g: f64, s2h: f64) -> f64 {
    s2g + 2.0 * s2h + s2h * s2h
}
