//! Truncated two-mode Fock space: basis indexing, ladder operators, states,
//! expectation values and partial transposition.
//!
//! Basis states `|n_a, n_b>` are stored row-major with `n_a` outer, so the
//! flat index is `n_a * cutoff_b + n_b`. Truncation means every operator
//! identity only holds on a guarded subspace where the top Fock levels of
//! each mode are unpopulated; see [`QuantumState::tail_mass`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest accepted product-space dimension.
pub const MAX_DIM: usize = 1_000_000;
/// Default per-mode cutoff.
pub const DEFAULT_CUTOFF: usize = 16;
/// Default number of top levels per mode required to be empty.
pub const DEFAULT_TAIL_GUARD: usize = 4;
/// Default bound on the population allowed in the guarded levels.
pub const DEFAULT_GUARD_TOL: f64 = 1e-8;
/// Absolute tolerance for hermiticity, trace and normalization checks.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Slack allowed below zero for eigenvalues of physical density matrices.
pub const POSITIVITY_SLACK: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    cutoff_a: usize,
    cutoff_b: usize,
}

impl FockSpace {
    pub fn new(cutoff_a: usize, cutoff_b: usize) -> Result<Self> {
        if cutoff_a == 0 || cutoff_b == 0 {
            return Err(Error::InvalidCutoff {
                cutoff_a,
                cutoff_b,
                reason: "cutoffs must be at least 1",
            });
        }
        match cutoff_a.checked_mul(cutoff_b) {
            Some(dim) if dim <= MAX_DIM => Ok(Self { cutoff_a, cutoff_b }),
            _ => Err(Error::InvalidCutoff {
                cutoff_a,
                cutoff_b,
                reason: "dimension exceeds 10^6",
            }),
        }
    }

    pub fn cutoff_a(&self) -> usize {
        self.cutoff_a
    }

    pub fn cutoff_b(&self) -> usize {
        self.cutoff_b
    }

    pub fn min_cutoff(&self) -> usize {
        self.cutoff_a.min(self.cutoff_b)
    }

    pub fn dim(&self) -> usize {
        self.cutoff_a * self.cutoff_b
    }

    /// Flat index of `|n_a, n_b>`. Panics when out of range; use
    /// [`Self::checked_index`] for untrusted input.
    #[inline]
    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        debug_assert!(n_a < self.cutoff_a && n_b < self.cutoff_b);
        n_a * self.cutoff_b + n_b
    }

    pub fn checked_index(&self, n_a: usize, n_b: usize) -> Result<usize> {
        if n_a < self.cutoff_a && n_b < self.cutoff_b {
            Ok(self.index(n_a, n_b))
        } else {
            Err(Error::OutOfRangeIndex {
                n_a,
                n_b,
                cutoff_a: self.cutoff_a,
                cutoff_b: self.cutoff_b,
            })
        }
    }

    #[inline]
    pub fn levels(&self, index: usize) -> (usize, usize) {
        (index / self.cutoff_b, index % self.cutoff_b)
    }

    /// All basis labels in flat-index order.
    pub fn basis(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim()).map(move |i| self.levels(i))
    }

    /// True when both occupation numbers stay clear of the top `guard` levels.
    #[inline]
    pub fn is_guarded(&self, n_a: usize, n_b: usize, guard: usize) -> bool {
        n_a + guard < self.cutoff_a && n_b + guard < self.cutoff_b
    }

    pub fn check_guard(&self, guard: usize) -> Result<()> {
        if guard < self.min_cutoff() {
            Ok(())
        } else {
            Err(Error::GuardOutOfRange {
                guard,
                cutoff_a: self.cutoff_a,
                cutoff_b: self.cutoff_b,
            })
        }
    }

    /// The default tail guard, clipped so that it is valid on this space.
    pub fn default_tail_guard(&self) -> usize {
        DEFAULT_TAIL_GUARD.min(self.min_cutoff() - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

/// Dense matrix on a [`FockSpace`].
#[derive(Clone, Debug)]
pub struct Operator {
    matrix: CMatrix,
    label: String,
    space: FockSpace,
    hermitian: bool,
}

impl Operator {
    pub fn new(space: FockSpace, matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let dim = space.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim,
            });
        }
        Ok(Self {
            matrix,
            label: label.into(),
            space,
            hermitian: false,
        })
    }

    /// Builds an operator flagged hermitian, rejecting matrices that are not
    /// within [`STRUCTURE_TOL`] of their adjoint.
    pub fn hermitian(space: FockSpace, matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let mut op = Self::new(space, matrix, label)?;
        if hermiticity_defect(&op.matrix) > STRUCTURE_TOL {
            return Err(Error::NonHermitianInput(op.label));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn identity(space: FockSpace) -> Self {
        let dim = space.dim();
        Self {
            matrix: CMatrix::identity(dim, dim),
            label: "I".into(),
            space,
            hermitian: true,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            label: format!("({})†", self.label),
            space: self.space,
            hermitian: self.hermitian,
        }
    }

    pub fn product(&self, rhs: &Operator) -> Result<Self> {
        self.same_space(rhs)?;
        Ok(Self {
            matrix: matmul(&self.matrix, &rhs.matrix),
            label: format!("{} {}", self.label, rhs.label),
            space: self.space,
            hermitian: false,
        })
    }

    pub fn commutator(&self, rhs: &Operator) -> Result<Self> {
        self.same_space(rhs)?;
        let ab = matmul(&self.matrix, &rhs.matrix);
        let ba = matmul(&rhs.matrix, &self.matrix);
        Ok(Self {
            matrix: ab - ba,
            label: format!("[{}, {}]", self.label, rhs.label),
            space: self.space,
            hermitian: false,
        })
    }

    /// Apply to a ket.
    pub fn apply(&self, ket: &CVector) -> CVector {
        &self.matrix * ket
    }

    fn same_space(&self, rhs: &Operator) -> Result<()> {
        if self.space == rhs.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

/// `max |M - M^†|` elementwise.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Single-mode `a^{†m} a^n` on levels `0..cutoff`, computed from the truncated
/// ladder matrices (lower first, then raise).
pub fn single_mode_monomial(cutoff: usize, raise: usize, lower: usize) -> DMatrix<f64> {
    DMatrix::from_fn(cutoff, cutoff, |row, col| {
        // a^n |col> = sqrt(col!/(col-n)!) |col-n>, then a^{†m} raises.
        if col < lower {
            return 0.0;
        }
        let mid = col - lower;
        if mid + raise != row {
            return 0.0;
        }
        let down: f64 = (mid + 1..=col).map(|k| k as f64).product();
        let up: f64 = (mid + 1..=row).map(|k| k as f64).product();
        (down * up).sqrt()
    })
}

/// `A ⊗ B` on the product space with mode `a` as the outer factor.
fn kron_modes(space: FockSpace, on_a: &DMatrix<f64>, on_b: &DMatrix<f64>) -> CMatrix {
    let m = on_a.kronecker(on_b).map(|x| C64::new(x, 0.0));
    debug_assert_eq!(m.nrows(), space.dim());
    m
}

pub fn annihilation(space: FockSpace, mode: Mode) -> Operator {
    monomial(space, mode_powers(mode, 0, 1)).relabel(match mode {
        Mode::A => "a",
        Mode::B => "b",
    })
}

pub fn creation(space: FockSpace, mode: Mode) -> Operator {
    monomial(space, mode_powers(mode, 1, 0)).relabel(match mode {
        Mode::A => "a†",
        Mode::B => "b†",
    })
}

pub fn number(space: FockSpace, mode: Mode) -> Operator {
    let mut op = monomial(space, mode_powers(mode, 1, 1)).relabel(match mode {
        Mode::A => "a†a",
        Mode::B => "b†b",
    });
    op.hermitian = true;
    op
}

fn mode_powers(mode: Mode, raise: usize, lower: usize) -> [usize; 4] {
    match mode {
        Mode::A => [raise, lower, 0, 0],
        Mode::B => [0, 0, raise, lower],
    }
}

/// Normal-ordered monomial `a^{†m} a^n b^{†p} b^q` with powers `[m, n, p, q]`.
pub fn monomial(space: FockSpace, powers: [usize; 4]) -> Operator {
    let [m, n, p, q] = powers;
    let on_a = single_mode_monomial(space.cutoff_a(), m, n);
    let on_b = single_mode_monomial(space.cutoff_b(), p, q);
    Operator {
        matrix: kron_modes(space, &on_a, &on_b),
        label: format!("a†^{m} a^{n} b†^{p} b^{q}"),
        space,
        hermitian: false,
    }
}

impl Operator {
    fn relabel(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    Pure(CVector),
    Density(CMatrix),
}

/// Pure or mixed two-mode state.
///
/// Pure states are unit-norm; density matrices are hermitian with unit trace
/// (positivity is only checked on request, see [`Self::min_eigenvalue`],
/// since partial transposes are stored in the same type).
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    repr: Representation,
    space: FockSpace,
    tail_guard: usize,
    discarded_mass: f64,
}

impl QuantumState {
    /// Normalized pure state from sparse `((n_a, n_b), amplitude)` entries.
    /// Repeated labels accumulate.
    pub fn pure_state<I>(space: FockSpace, amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), C64)>,
    {
        let mut psi = CVector::zeros(space.dim());
        for ((n_a, n_b), amp) in amplitudes {
            psi[space.checked_index(n_a, n_b)?] += amp;
        }
        Self::from_amplitudes(space, psi)
    }

    /// Normalizes a dense amplitude vector.
    pub fn from_amplitudes(space: FockSpace, psi: CVector) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                rows: psi.len(),
                cols: 1,
                dim: space.dim(),
            });
        }
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            repr: Representation::Pure(psi.unscale(norm)),
            space,
            tail_guard: space.default_tail_guard(),
            discarded_mass: 0.0,
        })
    }

    /// Wraps a density matrix after checking hermiticity and unit trace.
    pub fn from_density(space: FockSpace, rho: CMatrix) -> Result<Self> {
        let dim = space.dim();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                rows: rho.nrows(),
                cols: rho.ncols(),
                dim,
            });
        }
        let defect = hermiticity_defect(&rho);
        if defect > STRUCTURE_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix not hermitian (defect {defect:e})"
            )));
        }
        let trace = rho.trace();
        if (trace - ONE).norm() > STRUCTURE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        Ok(Self {
            repr: Representation::Density(rho),
            space,
            tail_guard: space.default_tail_guard(),
            discarded_mass: 0.0,
        })
    }

    /// Convex combination `Σ w_i ρ_i`; weights are normalized to sum to one.
    pub fn mixture(components: &[(f64, QuantumState)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let space = first.1.space;
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| !(*w >= 0.0)) || !(total > 0.0) {
            return Err(Error::InvalidState("mixture weights must be non-negative".into()));
        }
        let mut rho = CMatrix::zeros(space.dim(), space.dim());
        let mut discarded = 0.0;
        for (w, state) in components {
            if state.space != space {
                return Err(Error::SpaceMismatch);
            }
            rho += state.density_matrix() * C64::new(w / total, 0.0);
            discarded += w / total * state.discarded_mass;
        }
        let mut mixed = Self::from_density(space, symmetrize(rho))?;
        mixed.tail_guard = first.1.tail_guard;
        mixed.discarded_mass = discarded;
        Ok(mixed)
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Representation::Pure(_))
    }

    pub fn tail_guard(&self) -> usize {
        self.tail_guard
    }

    pub fn with_tail_guard(mut self, guard: usize) -> Result<Self> {
        self.space.check_guard(guard)?;
        self.tail_guard = guard;
        Ok(self)
    }

    /// Probability mass dropped when the state was truncated to the space.
    pub fn discarded_mass(&self) -> f64 {
        self.discarded_mass
    }

    pub(crate) fn with_discarded_mass(mut self, mass: f64) -> Self {
        self.discarded_mass = mass;
        self
    }

    pub fn amplitudes(&self) -> Option<&CVector> {
        match &self.repr {
            Representation::Pure(psi) => Some(psi),
            Representation::Density(_) => None,
        }
    }

    /// `|ψ><ψ|` for pure states, a copy of `ρ` otherwise.
    pub fn density_matrix(&self) -> CMatrix {
        match &self.repr {
            Representation::Pure(psi) => psi * psi.adjoint(),
            Representation::Density(rho) => rho.clone(),
        }
    }

    pub fn density_from_pure(&self) -> Result<Self> {
        match &self.repr {
            Representation::Pure(psi) => Ok(Self {
                repr: Representation::Density(psi * psi.adjoint()),
                ..self.clone()
            }),
            Representation::Density(_) => Err(Error::WrongRepresentation { expected: "pure" }),
        }
    }

    /// Density form regardless of the stored representation.
    pub fn to_density(&self) -> Self {
        match &self.repr {
            Representation::Pure(_) => self.density_from_pure().expect("pure"),
            Representation::Density(_) => self.clone(),
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.repr {
            Representation::Pure(_) => 1.0,
            Representation::Density(rho) => {
                // Tr(ρ²) = Σ |ρ_ij|² for hermitian ρ.
                rho.iter().map(|z| z.norm_sqr()).sum()
            }
        }
    }

    /// Occupation probability of each basis state.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Representation::Pure(psi) => psi.iter().map(|z| z.norm_sqr()).collect(),
            Representation::Density(rho) => (0..rho.nrows()).map(|i| rho[(i, i)].re).collect(),
        }
    }

    /// `Tr(ρ M)` or `<ψ|M|ψ>`.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        self.same_space(op.space)?;
        Ok(match &self.repr {
            Representation::Pure(psi) => psi.dotc(&(op.matrix() * psi)),
            Representation::Density(rho) => trace_of_product(rho, op.matrix()),
        })
    }

    /// `<A B>` without forming the product operator for pure states.
    pub fn expectation_of_product(&self, lhs: &Operator, rhs: &Operator) -> Result<C64> {
        self.same_space(lhs.space)?;
        self.same_space(rhs.space)?;
        Ok(match &self.repr {
            Representation::Pure(psi) => {
                let left = lhs.matrix().adjoint() * psi;
                left.dotc(&(rhs.matrix() * psi))
            }
            Representation::Density(rho) => {
                let rho_a = matmul(rho, lhs.matrix());
                trace_of_product(&rho_a, rhs.matrix())
            }
        })
    }

    /// Transpose on the mode-b indices:
    /// `<n_a, n_b| ρ^PT |m_a, m_b> = <n_a, m_b| ρ |m_a, n_b>`.
    ///
    /// The result is hermitian with unit trace but in general not positive.
    pub fn partial_transpose(&self) -> Result<Self> {
        let rho = match &self.repr {
            Representation::Density(rho) => rho,
            Representation::Pure(_) => return Err(Error::WrongRepresentation { expected: "density" }),
        };
        let space = self.space;
        let (ca, cb) = (space.cutoff_a(), space.cutoff_b());
        let out = CMatrix::from_fn(space.dim(), space.dim(), |row, col| {
            let (na, nb) = (row / cb, row % cb);
            let (ma, mb) = (col / cb, col % cb);
            debug_assert!(na < ca && ma < ca);
            rho[(na * cb + mb, ma * cb + nb)]
        });
        Ok(Self {
            repr: Representation::Density(out),
            ..self.clone()
        })
    }

    /// Population on basis states with `n_a >= cutoff_a - k` or
    /// `n_b >= cutoff_b - k`.
    pub fn tail_mass(&self, k: usize) -> Result<f64> {
        self.space.check_guard(k)?;
        let pops = self.populations();
        let tail: f64 = self
            .space
            .basis()
            .zip(pops)
            .filter(|&((na, nb), _)| !self.space.is_guarded(na, nb, k))
            .map(|(_, p)| p)
            .sum();
        Ok(tail.clamp(0.0, 1.0))
    }

    /// Guard diagnostics at the state's own tail guard.
    pub fn guard_status(&self, tolerance: f64) -> GuardStatus {
        let tail = self.tail_mass(self.tail_guard).unwrap_or(1.0);
        GuardStatus {
            guard: self.tail_guard,
            tail_mass: tail,
            discarded_mass: self.discarded_mass,
            tolerance,
            clean: tail <= tolerance,
        }
    }

    /// Smallest eigenvalue of the (hermitian) density matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let rho = symmetrize(self.density_matrix());
        rho.symmetric_eigenvalues().iter().copied().collect()
    }

    /// Full validation including positivity.
    pub fn validate_physical(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_SLACK {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub(crate) fn map_representation(&self, f: impl FnOnce(&Representation) -> Representation) -> Self {
        Self {
            repr: f(&self.repr),
            ..self.clone()
        }
    }

    fn same_space(&self, other: FockSpace) -> Result<()> {
        if self.space == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

/// Truncation diagnostics attached to reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuardStatus {
    pub guard: usize,
    pub tail_mass: f64,
    pub discarded_mass: f64,
    pub tolerance: f64,
    pub clean: bool,
}

impl GuardStatus {
    pub fn label(&self) -> &'static str {
        if self.clean {
            "clean"
        } else {
            "tainted"
        }
    }
}

/// Largest entry magnitude.
pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `Tr(X Y) = Σ_ij X_ij Y_ji`.
pub fn trace_of_product(x: &CMatrix, y: &CMatrix) -> C64 {
    let n = x.nrows();
    let mut acc = ZERO;
    for j in 0..n {
        for i in 0..n {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// `x * y`, skipping the zero entries of `y`. Ladder-operator polynomials
/// have a handful of non-zeros per column, which makes this far cheaper than
/// a dense product on large spaces.
pub fn matmul(x: &CMatrix, y: &CMatrix) -> CMatrix {
    assert_eq!(x.ncols(), y.nrows(), "matmul shape mismatch");
    let nnz = y.iter().filter(|z| **z != ZERO).count();
    if nnz * 8 > y.len() {
        return x * y;
    }
    let mut out = CMatrix::zeros(x.nrows(), y.ncols());
    for j in 0..y.ncols() {
        for k in 0..y.nrows() {
            let w = y[(k, j)];
            if w != ZERO {
                out.column_mut(j).axpy(w, &x.column(k), ONE);
            }
        }
    }
    out
}

/// `(M + M^†) / 2`.
pub fn symmetrize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj) * C64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn space_dimensions_and_indexing() {
        assert_eq!(FockSpace::new(1, 1).unwrap().dim(), 1);
        assert_eq!(FockSpace::new(4, 4).unwrap().dim(), 16);
        let s = FockSpace::new(3, 5).unwrap();
        assert_eq!(s.index(2, 3), 13);
        for i in 0..s.dim() {
            let (na, nb) = s.levels(i);
            assert_eq!(s.index(na, nb), i);
        }
    }

    #[test]
    fn space_rejects_bad_cutoffs() {
        assert!(FockSpace::new(0, 3).is_err());
        assert!(FockSpace::new(3, 0).is_err());
        assert!(FockSpace::new(1001, 1000).is_err());
        assert!(FockSpace::new(1000, 1000).is_ok());
        assert!(FockSpace::new(usize::MAX, 2).is_err());
    }

    #[test]
    fn ladder_actions() {
        let s = FockSpace::new(3, 3).unwrap();
        let a = annihilation(s, Mode::A);
        let b = annihilation(s, Mode::B);
        let ket = |na, nb| {
            let mut v = CVector::zeros(s.dim());
            v[s.index(na, nb)] = ONE;
            v
        };
        let out = a.apply(&ket(1, 0));
        assert_abs_diff_eq!(out[s.index(0, 0)].re, 1.0);
        assert_abs_diff_eq!(out.norm(), 1.0);
        let out = a.apply(&ket(2, 0));
        assert_abs_diff_eq!(out[s.index(1, 0)].re, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.apply(&ket(0, 0)).norm(), 0.0);
    }

    #[test]
    fn creation_is_adjoint_of_annihilation() {
        let s = FockSpace::new(4, 3).unwrap();
        for mode in [Mode::A, Mode::B] {
            let diff = creation(s, mode).matrix() - annihilation(s, mode).matrix().adjoint();
            assert_eq!(max_abs_entry(&diff), 0.0);
        }
    }

    #[test]
    fn canonical_commutator_on_guarded_levels() {
        let s = FockSpace::new(6, 5).unwrap();
        let a = annihilation(s, Mode::A);
        let comm = a.commutator(&a.adjoint()).unwrap();
        for (i, (na, _)) in s.basis().enumerate() {
            for j in 0..s.dim() {
                let expected = if i == j { ONE } else { ZERO };
                if na + 2 <= s.cutoff_a() {
                    assert!((comm.matrix()[(i, j)] - expected).norm() <= 1e-12);
                }
            }
        }
        // the top level is corrupted by truncation
        let top = s.index(s.cutoff_a() - 1, 0);
        assert!((comm.matrix()[(top, top)] - ONE).norm() > 1.0);
    }

    #[test]
    fn pure_state_normalization() {
        let s = FockSpace::new(3, 3).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        assert_abs_diff_eq!(vac.amplitudes().unwrap().norm(), 1.0);
        let t = std::f64::consts::FRAC_PI_4;
        let fam = QuantumState::pure_state(s, [((2, 0), c(t.cos(), 0.0)), ((0, 2), c(0.0, t.sin()))]).unwrap();
        assert_abs_diff_eq!(fam.amplitudes().unwrap().norm(), 1.0, epsilon = 1e-15);
        let bell = QuantumState::pure_state(s, [((1, 0), ONE), ((0, 1), ONE)]).unwrap();
        let psi = bell.amplitudes().unwrap();
        assert_abs_diff_eq!(psi[s.index(1, 0)].re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(psi[s.index(0, 1)].re, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn pure_state_errors() {
        let s = FockSpace::new(3, 3).unwrap();
        assert!(matches!(
            QuantumState::pure_state(s, [((3, 0), ONE)]),
            Err(Error::OutOfRangeIndex { .. })
        ));
        assert_eq!(
            QuantumState::pure_state(s, [((1, 1), ZERO)]).unwrap_err(),
            Error::ZeroNorm
        );
    }

    #[test]
    fn density_from_pure_examples() {
        let s = FockSpace::new(3, 3).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        let rho = vac.density_from_pure().unwrap();
        let m = rho.density_matrix();
        assert_eq!(m[(0, 0)], ONE);
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert!(rho.density_from_pure().is_err());

        let bell = QuantumState::pure_state(s, [((1, 0), ONE), ((0, 1), ONE)]).unwrap();
        let m = bell.density_from_pure().unwrap().density_matrix();
        let idx = [s.index(1, 0), s.index(0, 1)];
        for &i in &idx {
            for &j in &idx {
                assert_abs_diff_eq!(m[(i, j)].re, 0.5, epsilon = 1e-15);
            }
        }
        assert_eq!(m.iter().filter(|z| z.norm() > 1e-15).count(), 4);
        let idem = &m * &m - &m;
        assert!(max_abs_entry(&idem) <= 1e-12);
        assert_abs_diff_eq!(bell.density_from_pure().unwrap().purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn number_expectation() {
        let s = FockSpace::new(4, 4).unwrap();
        let st = QuantumState::pure_state(s, [((2, 0), ONE)]).unwrap();
        let n_plus = Operator::hermitian(s, number(s, Mode::A).matrix() + number(s, Mode::B).matrix(), "N+").unwrap();
        assert_abs_diff_eq!(st.expectation(&n_plus).unwrap().re, 2.0);
        assert_abs_diff_eq!(st.to_density().expectation(&n_plus).unwrap().re, 2.0);
        let other = FockSpace::new(3, 4).unwrap();
        assert_eq!(
            st.expectation(&Operator::identity(other)).unwrap_err(),
            Error::SpaceMismatch
        );
    }

    #[test]
    fn partial_transpose_examples() {
        let s = FockSpace::new(4, 4).unwrap();
        let prod = QuantumState::pure_state(s, [((2, 0), ONE)]).unwrap().to_density();
        assert_eq!(prod.partial_transpose().unwrap(), prod);

        let t = std::f64::consts::FRAC_PI_4;
        let fam = QuantumState::pure_state(s, [((2, 0), c(t.cos(), 0.0)), ((0, 2), c(0.0, t.sin()))])
            .unwrap()
            .to_density();
        let pt = fam.partial_transpose().unwrap();
        assert_eq!(pt.partial_transpose().unwrap(), fam);
        assert!(pt.min_eigenvalue() < -0.1);
        assert!(fam.min_eigenvalue() > -POSITIVITY_SLACK);
        assert!(fam.to_density().amplitudes().is_none());
        assert!(QuantumState::pure_state(s, [((0, 0), ONE)])
            .unwrap()
            .partial_transpose()
            .is_err());
    }

    #[test]
    fn tail_mass_examples() {
        let s = FockSpace::new(4, 4).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        assert_eq!(vac.tail_mass(1).unwrap(), 0.0);
        let top = QuantumState::pure_state(s, [((3, 0), ONE)]).unwrap();
        assert_eq!(top.tail_mass(1).unwrap(), 1.0);
        assert!(top.tail_mass(4).is_err());

        // two-mode squeezed vacuum, r = 0.3, amplitudes tanh^n r / cosh r
        let big = FockSpace::new(16, 16).unwrap();
        let r: f64 = 0.3;
        let tmsv = QuantumState::pure_state(
            big,
            (0..16).map(|n| ((n, n), c(r.tanh().powi(n as i32) / r.cosh(), 0.0))),
        )
        .unwrap();
        assert!(tmsv.tail_mass(4).unwrap() < 1e-8);
    }

    #[test]
    fn mixture_is_normalized() {
        let s = FockSpace::new(3, 3).unwrap();
        let a = QuantumState::pure_state(s, [((1, 0), ONE)]).unwrap();
        let b = QuantumState::pure_state(s, [((0, 1), ONE)]).unwrap();
        let mix = QuantumState::mixture(&[(2.0, a), (2.0, b)]).unwrap();
        assert_abs_diff_eq!(mix.purity(), 0.5, epsilon = 1e-15);
        assert!(QuantumState::mixture(&[]).is_err());
    }

    #[test]
    fn from_density_validates_structure() {
        let s = FockSpace::new(2, 2).unwrap();
        let mut rho = CMatrix::zeros(4, 4);
        rho[(0, 0)] = c(0.5, 0.0);
        assert!(QuantumState::from_density(s, rho.clone()).is_err());
        rho[(1, 1)] = c(0.5, 0.0);
        rho[(0, 1)] = c(0.1, 0.0);
        assert!(QuantumState::from_density(s, rho.clone()).is_err());
        rho[(1, 0)] = c(0.1, 0.0);
        assert!(QuantumState::from_density(s, rho).is_ok());
    }
}
