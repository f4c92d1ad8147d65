//! Truncated Fock spaces, two-level spaces, their tensor products, and the
//! dense operator algebra acting on them.
//!
//! Basis ordering follows the Kronecker convention: factor 0 is the
//! slowest-varying index of the composite basis. Two-level factors use
//! index 0 for `|g>` and index 1 for `|e>`, with `sigma_z |e> = +|e>`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Tolerance on `max |M - M^dagger|` for an operator to count as hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Allowed deviation of a state norm from one.
pub const NORM_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("factor index {index} out of range for a space with {len} factors")]
    FactorOutOfRange { index: usize, len: usize },
    #[error("factor {index} is {found}, expected {expected}")]
    WrongFactorKind {
        index: usize,
        expected: &'static str,
        found: &'static str,
    },
    #[error("bosonic cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),
    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variance requires a hermitian operator")]
    NotHermitian,
    #[error("state norm {0} is not within tolerance of one")]
    NotNormalized(f64),
    #[error(
        "coherent amplitude |alpha|={alpha_abs} leaves tail mass {tail:e} above cutoff {dim}, \
         tolerance is {tolerance:e}"
    )]
    TailMassExceeded {
        alpha_abs: f64,
        dim: usize,
        tail: f64,
        tolerance: f64,
    },
    #[error("tail tolerance must lie in (0, 1), got {0}")]
    InvalidTailTolerance(f64),
    #[error("basis index {index} out of range for factor of dimension {dim}")]
    LevelOutOfRange { index: usize, dim: usize },
}

/// One tensor factor of a composite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    /// Bosonic mode truncated to Fock levels `0..dim`.
    Boson { dim: usize },
    TwoLevel,
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Boson { dim } => *dim,
            Factor::TwoLevel => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Factor::Boson { .. } => "Boson",
            Factor::TwoLevel => "TwoLevel",
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Boson { dim } => write!(f, "Boson({dim})"),
            Factor::TwoLevel => write!(f, "TwoLevel"),
        }
    }
}

/// Ordered list of tensor factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceDescriptor {
    factors: Vec<Factor>,
}

impl SpaceDescriptor {
    pub fn new(factors: Vec<Factor>) -> Result<Self, HilbertError> {
        for f in &factors {
            if let Factor::Boson { dim } = f {
                if *dim < 2 {
                    return Err(HilbertError::CutoffTooSmall(*dim));
                }
            }
        }
        Ok(Self { factors })
    }

    pub fn boson(dim: usize) -> Result<Self, HilbertError> {
        Self::new(vec![Factor::Boson { dim }])
    }

    pub fn two_level() -> Self {
        Self {
            factors: vec![Factor::TwoLevel],
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(Factor::dim).product()
    }

    /// Concatenation of factor lists, `self` first.
    pub fn tensor(&self, other: &SpaceDescriptor) -> SpaceDescriptor {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        SpaceDescriptor { factors }
    }

    pub fn factor(&self, index: usize) -> Result<Factor, HilbertError> {
        self.factors
            .get(index)
            .copied()
            .ok_or(HilbertError::FactorOutOfRange {
                index,
                len: self.factors.len(),
            })
    }

    fn expect_boson(&self, index: usize) -> Result<usize, HilbertError> {
        match self.factor(index)? {
            Factor::Boson { dim } => Ok(dim),
            other => Err(HilbertError::WrongFactorKind {
                index,
                expected: "Boson",
                found: other.kind(),
            }),
        }
    }

    fn expect_two_level(&self, index: usize) -> Result<(), HilbertError> {
        match self.factor(index)? {
            Factor::TwoLevel => Ok(()),
            other => Err(HilbertError::WrongFactorKind {
                index,
                expected: "TwoLevel",
                found: other.kind(),
            }),
        }
    }

    /// Composite basis index of a product of per-factor levels.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize, HilbertError> {
        if levels.len() != self.factors.len() {
            return Err(HilbertError::DimensionMismatch {
                expected: self.factors.len(),
                found: levels.len(),
            });
        }
        let mut idx = 0;
        for (f, &l) in self.factors.iter().zip(levels) {
            if l >= f.dim() {
                return Err(HilbertError::LevelOutOfRange {
                    index: l,
                    dim: f.dim(),
                });
            }
            idx = idx * f.dim() + l;
        }
        Ok(idx)
    }

    /// Per-factor levels of a composite basis index.
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.factors.len()];
        for (slot, f) in levels.iter_mut().zip(&self.factors).rev() {
            *slot = index % f.dim();
            index /= f.dim();
        }
        levels
    }

    fn check_same(&self, other: &SpaceDescriptor) -> Result<(), HilbertError> {
        if self == other {
            Ok(())
        } else {
            Err(HilbertError::SpaceMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

/// Kronecker product of two dense matrices.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

fn max_antihermitian_part(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Dense operator on a composite space.
///
/// The hermitian hint is computed on construction, so it always satisfies
/// `max |M - M^dagger| <= HERMITIAN_TOL` when set.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: SpaceDescriptor,
    matrix: DMatrix<Complex64>,
    hermitian: bool,
}

impl Operator {
    pub fn new(space: SpaceDescriptor, matrix: DMatrix<Complex64>) -> Result<Self, HilbertError> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(HilbertError::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let hermitian = max_antihermitian_part(&matrix) <= HERMITIAN_TOL;
        Ok(Self {
            space,
            matrix,
            hermitian,
        })
    }

    fn from_parts(space: SpaceDescriptor, matrix: DMatrix<Complex64>) -> Self {
        let hermitian = max_antihermitian_part(&matrix) <= HERMITIAN_TOL;
        Self {
            space,
            matrix,
            hermitian,
        }
    }

    /// Embed a single-factor matrix into `space` at `factor_index`.
    fn embed(space: &SpaceDescriptor, factor_index: usize, local: DMatrix<Complex64>) -> Self {
        let mut m = DMatrix::from_element(1, 1, ONE);
        for (i, f) in space.factors.iter().enumerate() {
            let block = if i == factor_index {
                local.clone()
            } else {
                DMatrix::identity(f.dim(), f.dim())
            };
            m = kron(&m, &block);
        }
        Self::from_parts(space.clone(), m)
    }

    pub fn identity(space: &SpaceDescriptor) -> Self {
        let n = space.total_dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::identity(n, n),
            hermitian: true,
        }
    }

    pub fn zeros(space: &SpaceDescriptor) -> Self {
        let n = space.total_dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::zeros(n, n),
            hermitian: true,
        }
    }

    /// Lowering operator on a bosonic factor, `<n-1|a|n> = sqrt(n)`.
    pub fn annihilation(space: &SpaceDescriptor, factor_index: usize) -> Result<Self, HilbertError> {
        let dim = space.expect_boson(factor_index)?;
        let mut local = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            local[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        Ok(Self::embed(space, factor_index, local))
    }

    /// Raising operator. Hard truncation: the top level maps to zero.
    pub fn creation(space: &SpaceDescriptor, factor_index: usize) -> Result<Self, HilbertError> {
        Ok(Self::annihilation(space, factor_index)?.dagger())
    }

    pub fn number(space: &SpaceDescriptor, factor_index: usize) -> Result<Self, HilbertError> {
        let dim = space.expect_boson(factor_index)?;
        let local = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(i as f64, 0.0)
            } else {
                ZERO
            }
        });
        Ok(Self::embed(space, factor_index, local))
    }

    /// Projector onto level `level` of factor `factor_index`.
    pub fn level_projector(
        space: &SpaceDescriptor,
        factor_index: usize,
        level: usize,
    ) -> Result<Self, HilbertError> {
        let dim = space.factor(factor_index)?.dim();
        if level >= dim {
            return Err(HilbertError::LevelOutOfRange { index: level, dim });
        }
        let mut local = DMatrix::zeros(dim, dim);
        local[(level, level)] = ONE;
        Ok(Self::embed(space, factor_index, local))
    }

    pub fn pauli(space: &SpaceDescriptor, factor_index: usize, which: Pauli) -> Result<Self, HilbertError> {
        space.expect_two_level(factor_index)?;
        Ok(Self::embed(space, factor_index, which.matrix()))
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// Kronecker product; the result lives on `self.space x other.space`.
    pub fn tensor(&self, other: &Operator) -> Self {
        Self::from_parts(
            self.space.tensor(&other.space),
            kron(&self.matrix, &other.matrix),
        )
    }

    /// Operator product `self * other`.
    pub fn compose(&self, other: &Operator) -> Result<Self, HilbertError> {
        self.space.check_same(&other.space)?;
        Ok(Self::from_parts(self.space.clone(), &self.matrix * &other.matrix))
    }

    pub fn add(&self, other: &Operator) -> Result<Self, HilbertError> {
        self.space.check_same(&other.space)?;
        Ok(Self::from_parts(self.space.clone(), &self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Operator) -> Result<Self, HilbertError> {
        self.space.check_same(&other.space)?;
        Ok(Self::from_parts(self.space.clone(), &self.matrix - &other.matrix))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_parts(self.space.clone(), &self.matrix * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            hermitian: self.hermitian,
        }
    }

    /// `[self, other] = self other - other self`.
    pub fn commutator(&self, other: &Operator) -> Result<Self, HilbertError> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<Complex64>, HilbertError> {
        self.space.check_same(&psi.space)?;
        Ok(&self.matrix * &psi.amplitudes)
    }

    /// `<psi|O|psi>`.
    pub fn expectation(&self, psi: &StateVector) -> Result<Complex64, HilbertError> {
        let o_psi = self.apply(psi)?;
        Ok(psi.amplitudes.dotc(&o_psi))
    }

    /// `<O^2> - <O>^2`, evaluated as `||O psi||^2 - <O>^2` for hermitian `O`.
    pub fn variance(&self, psi: &StateVector) -> Result<f64, HilbertError> {
        if !self.hermitian {
            return Err(HilbertError::NotHermitian);
        }
        let o_psi = self.apply(psi)?;
        let mean = psi.amplitudes.dotc(&o_psi).re;
        let second = o_psi.norm_squared();
        Ok((second - mean * mean).max(0.0))
    }
}

/// Free-function forms of the expectation and variance.
pub fn expectation(op: &Operator, psi: &StateVector) -> Result<Complex64, HilbertError> {
    op.expectation(psi)
}

pub fn variance(op: &Operator, psi: &StateVector) -> Result<f64, HilbertError> {
    op.variance(psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// Raising, `|g> -> |e>`.
    Plus,
    /// Lowering, `|e> -> |g>`.
    Minus,
}

impl Pauli {
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let (a, b, c, d) = match self {
            Pauli::X => (ZERO, ONE, ONE, ZERO),
            Pauli::Y => (ZERO, i, -i, ZERO),
            Pauli::Z => (-ONE, ZERO, ZERO, ONE),
            Pauli::Plus => (ZERO, ZERO, ONE, ZERO),
            Pauli::Minus => (ZERO, ONE, ZERO, ZERO),
        };
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }
}

/// Normalized state vector on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: SpaceDescriptor,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Rejects vectors whose norm is off by more than `NORM_TOL`.
    pub fn new(space: SpaceDescriptor, amplitudes: DVector<Complex64>) -> Result<Self, HilbertError> {
        let n = space.total_dim();
        if amplitudes.len() != n {
            return Err(HilbertError::DimensionMismatch {
                expected: n,
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(HilbertError::NotNormalized(norm));
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalizes first; fails only on a zero vector.
    pub fn normalized(space: SpaceDescriptor, amplitudes: DVector<Complex64>) -> Result<Self, HilbertError> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(HilbertError::NotNormalized(norm));
        }
        Self::new(space, amplitudes / Complex64::new(norm, 0.0))
    }

    /// Product basis state with the given level on each factor.
    pub fn basis(space: &SpaceDescriptor, levels: &[usize]) -> Result<Self, HilbertError> {
        let idx = space.index_of(levels)?;
        let mut amps = DVector::zeros(space.total_dim());
        amps[idx] = ONE;
        Ok(Self {
            space: space.clone(),
            amplitudes: amps,
        })
    }

    /// Tensor product of per-factor kets, factor 0 first.
    pub fn product(space: &SpaceDescriptor, locals: &[DVector<Complex64>]) -> Result<Self, HilbertError> {
        if locals.len() != space.factors.len() {
            return Err(HilbertError::DimensionMismatch {
                expected: space.factors.len(),
                found: locals.len(),
            });
        }
        let mut amps = DVector::from_element(1, ONE);
        for (f, local) in space.factors.iter().zip(locals) {
            if local.len() != f.dim() {
                return Err(HilbertError::DimensionMismatch {
                    expected: f.dim(),
                    found: local.len(),
                });
            }
            amps = amps.kronecker(local);
        }
        Self::new(space.clone(), amps)
    }

    pub(crate) fn from_raw(space: SpaceDescriptor, amplitudes: DVector<Complex64>) -> Self {
        Self { space, amplitudes }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64, HilbertError> {
        self.space.check_same(&other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Tensor product of two states.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            space: self.space.tensor(&other.space),
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    /// Population distribution of one factor with all others traced out.
    pub fn marginal(&self, factor_index: usize) -> Result<Vec<f64>, HilbertError> {
        let dim = self.space.factor(factor_index)?.dim();
        let inner: usize = self.space.factors[factor_index + 1..]
            .iter()
            .map(Factor::dim)
            .product();
        let mut probs = vec![0.0; dim];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let level = (idx / inner) % dim;
            probs[level] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Population of `level` on `factor_index`.
    pub fn level_population(&self, factor_index: usize, level: usize) -> Result<f64, HilbertError> {
        let probs = self.marginal(factor_index)?;
        probs
            .get(level)
            .copied()
            .ok_or(HilbertError::LevelOutOfRange {
                index: level,
                dim: probs.len(),
            })
    }

    /// Largest population sitting on the top level of any bosonic factor.
    pub fn top_level_population(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, f) in self.space.factors.iter().enumerate() {
            if let Factor::Boson { dim } = f {
                if let Ok(p) = self.level_population(i, dim - 1) {
                    worst = worst.max(p);
                }
            }
        }
        worst
    }
}

/// Coherent amplitude together with the probability mass allowed above the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentSpec {
    pub alpha: Complex64,
    pub tail_tolerance: f64,
}

impl CoherentSpec {
    pub const DEFAULT_TAIL: f64 = 1e-12;

    pub fn new(alpha: Complex64, tail_tolerance: f64) -> Result<Self, HilbertError> {
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(HilbertError::InvalidTailTolerance(tail_tolerance));
        }
        Ok(Self {
            alpha,
            tail_tolerance,
        })
    }

    pub fn real(alpha: f64) -> Self {
        Self {
            alpha: Complex64::new(alpha, 0.0),
            tail_tolerance: Self::DEFAULT_TAIL,
        }
    }

    /// Poisson mass `sum_{n >= dim} e^{-|a|^2} |a|^{2n} / n!`.
    pub fn tail_mass(&self, dim: usize) -> f64 {
        poisson_tail(self.alpha.norm_sqr(), dim)
    }

    /// Smallest cutoff (at least 2) whose tail mass is within tolerance.
    pub fn min_cutoff(&self) -> usize {
        let mut dim = 2;
        while self.tail_mass(dim) > self.tail_tolerance {
            dim += 1;
        }
        dim
    }

    /// Truncated, renormalized coherent ket of dimension `dim`.
    pub fn ket(&self, dim: usize) -> Result<DVector<Complex64>, HilbertError> {
        let tail = self.tail_mass(dim);
        if tail > self.tail_tolerance {
            return Err(HilbertError::TailMassExceeded {
                alpha_abs: self.alpha.norm(),
                dim,
                tail,
                tolerance: self.tail_tolerance,
            });
        }
        let mean = self.alpha.norm_sqr();
        let mut amps = DVector::zeros(dim);
        // c_n = e^{-|a|^2/2} a^n / sqrt(n!), built by recurrence
        let mut c = Complex64::new((-mean / 2.0).exp(), 0.0);
        for n in 0..dim {
            amps[n] = c;
            c = c * self.alpha / ((n + 1) as f64).sqrt();
        }
        let norm = amps.norm();
        Ok(amps / Complex64::new(norm, 0.0))
    }
}

/// Upper Poisson tail `P(N >= start)` for mean `mean`.
///
/// Summed directly from the terms rather than as `1 - cdf` so tiny tails
/// keep their relative accuracy.
pub fn poisson_tail(mean: f64, start: usize) -> f64 {
    if mean == 0.0 {
        return if start == 0 { 1.0 } else { 0.0 };
    }
    let ln_mean = mean.ln();
    let mut ln_fact = 0.0;
    for k in 2..=start {
        ln_fact += (k as f64).ln();
    }
    let mut ln_term = -mean + start as f64 * ln_mean - ln_fact;
    let mut sum = 0.0;
    let mut n = start;
    loop {
        let term = ln_term.exp();
        sum += term;
        n += 1;
        ln_term += ln_mean - (n as f64).ln();
        // past the mode the terms decay geometrically
        if (n as f64) > mean && term < sum * 1e-18 {
            break;
        }
        if n > start + 100_000 {
            break;
        }
    }
    sum.min(1.0)
}

/// Coherent state on `factor_index`; every other factor sits in its level 0.
pub fn coherent_state(
    space: &SpaceDescriptor,
    factor_index: usize,
    spec: &CoherentSpec,
) -> Result<StateVector, HilbertError> {
    let dim = space.expect_boson(factor_index)?;
    let ket = spec.ket(dim)?;
    let locals: Vec<DVector<Complex64>> = space
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if i == factor_index {
                ket.clone()
            } else {
                let mut v = DVector::zeros(f.dim());
                v[0] = ONE;
                v
            }
        })
        .collect();
    StateVector::product(space, &locals)
}

/// Ket of a single factor: level `level` of a `dim`-dimensional factor.
pub fn level_ket(dim: usize, level: usize) -> Result<DVector<Complex64>, HilbertError> {
    if level >= dim {
        return Err(HilbertError::LevelOutOfRange { index: level, dim });
    }
    let mut v = DVector::zeros(dim);
    v[level] = ONE;
    Ok(v)
}
