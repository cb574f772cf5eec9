//! Scrambled tensor-product instances.
//!
//! A [`TensorSpaceInstance`] is a space `V = Q^(mn)` that secretly arises as
//! `Q^m ⊗ Q^n` through an invertible scramble matrix. The rest of the crate
//! sees the cone of simple vectors only through three doors: the membership
//! oracle [`TensorSpaceInstance::is_simple`], the list of quadrics cutting it
//! out, and the sampler [`TensorSpaceInstance::sample_simple`]. The hidden
//! factorization is kept for verification code.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratlin::{solve_linear, Matrix, Scalar, Vector};

/// Deterministic random stream used by every randomized operation.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default entry bound for sampled factors.
pub const DEFAULT_SAMPLE_RANGE: i64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactorShape {
    pub m: usize,
    pub n: usize,
}

impl FactorShape {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput(format!("factor dimensions must be >= 1, got {m}x{n}")));
        }
        Ok(FactorShape { m, n })
    }

    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    /// Number of 2x2 minors, `C(m,2) * C(n,2)`.
    pub fn quadric_count(&self) -> usize {
        (self.m * (self.m - 1) / 2) * (self.n * (self.n - 1) / 2)
    }

    pub fn is_trivial(&self) -> bool {
        self.m == 1 || self.n == 1
    }

    /// Row-major position of the coefficient `x_{ij}`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }
}

impl std::fmt::Display for FactorShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

/// A quadratic form `Q(v) = v^T G v` with symmetric Gram matrix `G`.
///
/// `2G` is kept alongside `G`: minors have half-integer Gram matrices, and
/// zero tests on `2G` stay in integer arithmetic for integer vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    gram: Matrix,
    doubled: Matrix,
}

impl QuadraticForm {
    pub fn new(gram: Matrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::InvalidInput("gram matrix must be symmetric".into()));
        }
        Ok(Self::from_gram(gram))
    }

    fn from_gram(gram: Matrix) -> Self {
        let doubled = gram.scale(&Scalar::from(2));
        QuadraticForm { gram, doubled }
    }

    /// Whether `Q(v) = 0`.
    pub fn vanishes_at(&self, v: &Vector) -> bool {
        v.dot(&self.doubled.mul_vec(v)).is_zero()
    }

    /// `2 G v`: the functional `w -> 2 B(v, w)`.
    pub(crate) fn doubled_polar_functional(&self, v: &Vector) -> Vector {
        self.doubled.mul_vec(v)
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn eval(&self, v: &Vector) -> Scalar {
        v.dot(&self.doubled.mul_vec(v)) / Scalar::from(2)
    }

    /// Polarization `B(u, w) = u^T G w`, so `Q(u+w) = Q(u) + Q(w) + 2B(u,w)`.
    pub fn polar(&self, u: &Vector, w: &Vector) -> Scalar {
        u.dot(&self.gram.mul_vec(w))
    }

    /// The linear functional `w -> B(v, w)` as a coefficient vector.
    pub fn polar_functional(&self, v: &Vector) -> Vector {
        self.gram.mul_vec(v)
    }

    /// Gram matrix of `v -> Q(map v)`.
    pub fn pull_back(&self, map: &Matrix) -> QuadraticForm {
        Self::from_gram(map.transpose().mul(&self.gram).mul(map))
    }
}

/// The secret isomorphism `Q^m ⊗ Q^n -> V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiddenFactorization {
    shape: FactorShape,
    scramble: Matrix,
    scramble_inverse: Matrix,
}

impl HiddenFactorization {
    pub fn new(shape: FactorShape, scramble: Matrix) -> Result<Self> {
        if scramble.rows() != shape.dim() || scramble.cols() != shape.dim() {
            return Err(Error::DimensionMismatch { expected: shape.dim(), found: scramble.rows() });
        }
        let scramble_inverse = scramble.inverse()?;
        Ok(HiddenFactorization { shape, scramble, scramble_inverse })
    }

    pub fn shape(&self) -> FactorShape {
        self.shape
    }

    pub fn scramble(&self) -> &Matrix {
        &self.scramble
    }

    pub fn scramble_inverse(&self) -> &Matrix {
        &self.scramble_inverse
    }

    /// Image of the flattened outer product `alpha beta^T`.
    pub fn embed(&self, alpha: &Vector, beta: &Vector) -> Result<Vector> {
        alpha.check_len(self.shape.m)?;
        beta.check_len(self.shape.n)?;
        let outer: Vector = alpha.iter().flat_map(|a| beta.iter().map(move |b| a * b)).collect();
        Ok(self.scramble.mul_vec(&outer))
    }

    /// The `m x n` coefficient matrix of `v` in hidden coordinates.
    pub fn unscramble(&self, v: &Vector) -> Result<Matrix> {
        v.check_len(self.shape.dim())?;
        Ok(self.scramble_inverse.mul_vec(v).reshape(self.shape.m, self.shape.n))
    }

    /// Splits a simple vector into hidden factors `(alpha, beta)` with the first
    /// nonzero entry of `alpha` equal to one. Returns `None` for vectors of
    /// hidden rank two or more; zero maps to a pair of zero vectors.
    pub fn factor(&self, v: &Vector) -> Result<Option<(Vector, Vector)>> {
        let x = self.unscramble(v)?;
        Ok(split_rank_one(&x))
    }
}

/// Writes a matrix of rank at most one as `c r^T` with `c` normalized to have
/// leading entry one.
pub(crate) fn split_rank_one(x: &Matrix) -> Option<(Vector, Vector)> {
    let flat = x.flatten();
    let Some(p) = flat.first_nonzero() else {
        return Some((Vector::zeros(x.rows()), Vector::zeros(x.cols())));
    };
    let (i, j) = (p / x.cols(), p % x.cols());
    let pivot = x[(i, j)].clone();
    let col = x.column(j).scale(&pivot.recip().expect("pivot is nonzero"));
    let row = x.row(i);
    let outer: Vector = col.iter().flat_map(|a| row.iter().map(move |b| a * b)).collect();
    (outer == flat).then_some((col, row))
}

/// Lists the 2x2 minors `x_{ij} x_{kl} - x_{il} x_{kj}`, `i<k`, `j<l`, as
/// index quadruples `(ij, kl, il, kj)` in the flattened coordinates.
pub(crate) fn minor_indices(shape: FactorShape) -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(shape.quadric_count());
    for i in 0..shape.m {
        for k in i + 1..shape.m {
            for j in 0..shape.n {
                for l in j + 1..shape.n {
                    out.push([shape.index(i, j), shape.index(k, l), shape.index(i, l), shape.index(k, j)]);
                }
            }
        }
    }
    out
}

fn symmetric_outer(u: &Vector, w: &Vector, weight: &Scalar, gram: &mut Matrix) {
    for a in 0..u.len() {
        if u[a].is_zero() && w[a].is_zero() {
            continue;
        }
        for b in 0..w.len() {
            let term = &u[a] * &w[b] + &w[a] * &u[b];
            if !term.is_zero() {
                gram[(a, b)] += term * weight;
            }
        }
    }
}

/// Minors pulled back through the inverse scramble. With `fault` set the
/// first minor has one monomial sign flipped, which no longer vanishes on
/// the simple cone.
fn build_quadrics(hidden: &HiddenFactorization, fault: bool) -> Vec<QuadraticForm> {
    let dim = hidden.shape.dim();
    let rows = hidden.scramble_inverse.row_vectors();
    let half = Scalar::new(1, 2);
    let minus_half = Scalar::new(-1, 2);
    minor_indices(hidden.shape)
        .into_iter()
        .enumerate()
        .map(|(k, [p, q, r, s])| {
            let mut gram = Matrix::zeros(dim, dim);
            symmetric_outer(&rows[p], &rows[q], &half, &mut gram);
            let sign = if fault && k == 0 { &half } else { &minus_half };
            symmetric_outer(&rows[r], &rows[s], sign, &mut gram);
            QuadraticForm::from_gram(gram)
        })
        .collect()
}

/// Random nonzero integer vector with entries in `[-range, range]`.
pub fn random_nonzero<R: Rng + ?Sized>(rng: &mut R, len: usize, range: i64) -> Vector {
    loop {
        let v: Vector = (0..len).map(|_| Scalar::from(rng.gen_range(-range..=range))).collect();
        if !v.is_zero() {
            return v;
        }
    }
}

/// Random factor pair with integer entries in `[-range, range]`, both nonzero.
pub fn random_factors<R: Rng + ?Sized>(rng: &mut R, shape: FactorShape, range: i64) -> (Vector, Vector) {
    let alpha = random_nonzero(rng, shape.m, range);
    let beta = random_nonzero(rng, shape.n, range);
    (alpha, beta)
}

/// Random invertible integer matrix with integer inverse: a row permutation of
/// `L U` with unit-triangular factors whose off-diagonal entries lie in
/// `{-1, 0, 1}`.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    let mut lower = Matrix::identity(dim);
    let mut upper = Matrix::identity(dim);
    for i in 0..dim {
        for j in 0..i {
            lower[(i, j)] = Scalar::from(rng.gen_range(-1i64..=1));
            upper[(j, i)] = Scalar::from(rng.gen_range(-1i64..=1));
        }
    }
    let mut perm: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let lu = lower.mul(&upper);
    let rows: Vec<Vector> = perm.iter().map(|&i| lu.row(i)).collect();
    Matrix::from_rows(dim, &rows)
}

/// A vector space of dimension `mn` with a hidden tensor-product structure.
#[derive(Debug)]
pub struct TensorSpaceInstance {
    seed: u64,
    quadrics: Vec<QuadraticForm>,
    hidden: HiddenFactorization,
    base_point: Option<Vector>,
    sample_range: i64,
    oracle_calls: AtomicU64,
}

impl Clone for TensorSpaceInstance {
    fn clone(&self) -> Self {
        TensorSpaceInstance {
            seed: self.seed,
            quadrics: self.quadrics.clone(),
            hidden: self.hidden.clone(),
            base_point: self.base_point.clone(),
            sample_range: self.sample_range,
            oracle_calls: AtomicU64::new(self.oracle_calls()),
        }
    }
}

impl TensorSpaceInstance {
    /// Builds an instance from an explicit scramble.
    pub fn from_scramble(shape: FactorShape, scramble: Matrix, base_point: Option<Vector>, seed: u64) -> Result<Self> {
        let hidden = HiddenFactorization::new(shape, scramble)?;
        let quadrics = build_quadrics(&hidden, false);
        let inst = TensorSpaceInstance {
            seed,
            quadrics,
            hidden,
            base_point: None,
            sample_range: DEFAULT_SAMPLE_RANGE,
            oracle_calls: AtomicU64::new(0),
        };
        match base_point {
            None => Ok(inst),
            Some(b) => inst.with_base_point(b),
        }
    }

    /// The unscrambled instance `V = Q^m ⊗ Q^n` itself.
    pub fn identity(shape: FactorShape) -> Self {
        Self::from_scramble(shape, Matrix::identity(shape.dim()), None, 0).expect("identity scramble is invertible")
    }

    pub fn with_base_point(mut self, base_point: Vector) -> Result<Self> {
        base_point.check_len(self.dim())?;
        if base_point.is_zero() {
            return Err(Error::ZeroVector);
        }
        if self.hidden.factor(&base_point)?.is_none() {
            return Err(Error::NotSimple);
        }
        self.base_point = Some(base_point);
        Ok(self)
    }

    pub fn with_sample_range(mut self, range: i64) -> Self {
        assert!(range >= 1, "sample range must be positive");
        self.sample_range = range;
        self
    }

    /// Flips one monomial sign in the first quadric. Used to check that the
    /// property suites notice a broken presentation.
    pub fn inject_fault(&mut self) {
        self.quadrics = build_quadrics(&self.hidden, true);
    }

    pub fn shape(&self) -> FactorShape {
        self.hidden.shape
    }

    pub fn dim(&self) -> usize {
        self.hidden.shape.dim()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn quadrics(&self) -> &[QuadraticForm] {
        &self.quadrics
    }

    pub fn base_point(&self) -> Option<&Vector> {
        self.base_point.as_ref()
    }

    pub fn sample_range(&self) -> i64 {
        self.sample_range
    }

    /// Verification-only access to the secret factorization.
    pub fn hidden(&self) -> &HiddenFactorization {
        &self.hidden
    }

    /// Number of queries made against the presentation of the simple cone.
    pub fn oracle_calls(&self) -> u64 {
        self.oracle_calls.load(Ordering::Relaxed)
    }

    pub(crate) fn record_oracle_call(&self) {
        self.oracle_calls.fetch_add(1, Ordering::Relaxed);
    }

    /// Membership in the cone of simple vectors: every quadric vanishes.
    pub fn is_simple(&self, v: &Vector) -> Result<bool> {
        v.check_len(self.dim())?;
        self.record_oracle_call();
        Ok(self.quadrics.iter().all(|q| q.vanishes_at(v)))
    }

    /// `alpha ⊗ beta` pushed through the scramble. Verification and sampling
    /// only; recovery code never calls this.
    pub fn embed_simple(&self, alpha: &Vector, beta: &Vector) -> Result<Vector> {
        self.hidden.embed(alpha, beta)
    }

    /// A random nonzero simple vector.
    pub fn sample_simple<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        let (alpha, beta) = random_factors(rng, self.shape(), self.sample_range);
        self.hidden.embed(&alpha, &beta).expect("factor lengths match shape")
    }

    /// Checks the cancellation rule for `sum_j a_j ⊗ b_j` on this instance:
    /// the verdict of [`rule_says_zero`] must agree with direct evaluation of
    /// the sum.
    pub fn verify_rule(&self, a_list: &[Vector], b_list: &[Vector]) -> Result<bool> {
        if a_list.len() != b_list.len() {
            return Err(Error::DimensionMismatch { expected: a_list.len(), found: b_list.len() });
        }
        let mut total = Vector::zeros(self.dim());
        for (a, b) in a_list.iter().zip(b_list) {
            total = &total + &self.embed_simple(a, b)?;
        }
        Ok(rule_says_zero(a_list, b_list)? == total.is_zero())
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            m: self.shape().m,
            n: self.shape().n,
            seed: self.seed,
            scramble: self.hidden.scramble.clone(),
            base_point: self.base_point.clone(),
            quadric_count: self.quadrics.len(),
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let shape = FactorShape::new(file.m, file.n)?;
        Self::from_scramble(shape, file.scramble.clone(), file.base_point.clone(), file.seed)
    }
}

/// Decides whether `sum_j a_j ⊗ b_j` vanishes without forming it: redundant
/// `a_j` are first rewritten in terms of the independent ones, their `b_j`
/// redistributed, and then the sum is zero iff every remaining `b` is zero.
pub fn rule_says_zero(a_list: &[Vector], b_list: &[Vector]) -> Result<bool> {
    let mut kept: Vec<(Vector, Vector)> = Vec::new();
    for (a, b) in a_list.iter().zip(b_list) {
        if a.is_zero() {
            continue;
        }
        let coeffs = if kept.is_empty() {
            Err(Error::Inconsistent)
        } else {
            let cols: Vec<Vector> = kept.iter().map(|(a, _)| a.clone()).collect();
            solve_linear(&Matrix::from_columns(a.len(), &cols), a)
        };
        match coeffs {
            Ok(c) => {
                for ((_, kb), ci) in kept.iter_mut().zip(c.iter()) {
                    if !ci.is_zero() {
                        *kb = kb.axpy(ci, b);
                    }
                }
            }
            Err(Error::Inconsistent) => kept.push((a.clone(), b.clone())),
            Err(e) => return Err(e),
        }
    }
    Ok(kept.iter().all(|(_, b)| b.is_zero()))
}

/// Generates a scrambled instance. The scramble is unimodular with small
/// integer entries so that quadrics have half-integer Gram matrices.
pub fn generate_instance(shape: FactorShape, seed: u64, pointed: bool) -> TensorSpaceInstance {
    let mut rng = seeded_rng(seed);
    let scramble = random_unimodular(&mut rng, shape.dim());
    let inst =
        TensorSpaceInstance::from_scramble(shape, scramble, None, seed).expect("unimodular scramble is invertible");
    if pointed {
        let base = inst.sample_simple(&mut rng);
        inst.with_base_point(base).expect("sampled base point is simple and nonzero")
    } else {
        inst
    }
}

/// On-disk form of an instance. Only the scramble is stored; quadrics are
/// rebuilt on load.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub scramble: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vector>,
    #[serde(default)]
    pub quadric_count: usize,
}
