//! Uncertainty bounds, Jx/Jy covariance statistics and the three
//! separability witnesses built from them.
//!
//! Witness values are `LHS - RHS` of the corresponding inequality, so a
//! negative value certifies entanglement. A non-negative value never
//! certifies separability; the vocabulary is `detected`, `not-detected` and
//! `boundary`.

use serde::{Deserialize, Serialize};

use crate::algebra::OperatorSet;
use crate::error::{Error, Result};
use crate::fock::{monomial, single_mode_monomial, GuardStatus, Operator, QuantumState, DEFAULT_GUARD_TOL};

/// Default equality tolerance for verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default z-score required to call an estimated witness detected.
pub const DEFAULT_Z_THRESHOLD: f64 = 3.0;

/// Standard errors of the record fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RecordErrors {
    pub mean_jx: f64,
    pub mean_jy: f64,
    pub var_jx: f64,
    pub var_jy: f64,
    pub cov_xy: f64,
    pub mean_n: f64,
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    Estimated {
        stderr: RecordErrors,
        /// Covariance of the estimators in field order
        /// `(mean_jx, mean_jy, var_jx, var_jy, cov_xy, mean_n)`.
        covariance: [[f64; 6]; 6],
    },
}

/// First and second moments of `Jx`, `Jy` plus `<N+>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceRecord {
    pub mean_jx: f64,
    pub mean_jy: f64,
    pub var_jx: f64,
    pub var_jy: f64,
    pub cov_xy: f64,
    pub mean_n: f64,
    pub provenance: Provenance,
}

impl CovarianceRecord {
    pub fn exact(mean_jx: f64, mean_jy: f64, var_jx: f64, var_jy: f64, cov_xy: f64, mean_n: f64) -> Self {
        Self {
            mean_jx,
            mean_jy,
            var_jx,
            var_jy,
            cov_xy,
            mean_n,
            provenance: Provenance::Exact,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.provenance, Provenance::Exact)
    }

    pub fn fields(&self) -> [f64; 6] {
        [
            self.mean_jx,
            self.mean_jy,
            self.var_jx,
            self.var_jy,
            self.cov_xy,
            self.mean_n,
        ]
    }

    /// The symmetric 2x2 matrix of central second moments, row-major.
    pub fn covariance_matrix(&self) -> [[f64; 2]; 2] {
        [[self.var_jx, self.cov_xy], [self.cov_xy, self.var_jy]]
    }

    pub fn determinant(&self) -> f64 {
        self.var_jx * self.var_jy - self.cov_xy * self.cov_xy
    }

    pub fn trace(&self) -> f64 {
        self.var_jx + self.var_jy
    }

    pub fn stderr(&self) -> Option<&RecordErrors> {
        match &self.provenance {
            Provenance::Exact => None,
            Provenance::Estimated { stderr, .. } => Some(stderr),
        }
    }

    /// Physical-moment sanity for exact records.
    pub fn validate(&self) -> Result<()> {
        const SLACK: f64 = 1e-10;
        if !self.fields().iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidState("non-finite moment".into()));
        }
        if self.is_exact()
            && (self.var_jx < -SLACK || self.var_jy < -SLACK || self.mean_n < -SLACK || self.determinant() < -SLACK)
        {
            return Err(Error::InvalidState(format!("unphysical covariance record {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Detected,
    NotDetected,
    Boundary,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Detected => "detected",
            Verdict::NotDetected => "not-detected",
            Verdict::Boundary => "boundary",
        }
    }

    /// Classification of an exact witness value at an absolute tolerance.
    pub fn classify(value: f64, tol: f64) -> Self {
        if value.abs() <= tol {
            Verdict::Boundary
        } else if value < 0.0 {
            Verdict::Detected
        } else {
            Verdict::NotDetected
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    W9,
    W12,
    W14,
}

impl Witness {
    pub const ALL: [Witness; 3] = [Witness::W9, Witness::W12, Witness::W14];

    pub fn value(&self, record: &CovarianceRecord) -> f64 {
        match self {
            Witness::W9 => witness_w9(record),
            Witness::W12 => witness_w12(record),
            Witness::W14 => witness_w14(record),
        }
    }

    /// Right-hand side of the inequality, used to scale the equality tolerance.
    pub fn rhs(&self, r: &CovarianceRecord) -> f64 {
        let base = (1.0 + r.mean_n).powi(2) / 16.0;
        match self {
            Witness::W9 => base,
            Witness::W12 => base + r.cov_xy * r.cov_xy,
            Witness::W14 => (r.mean_n * r.mean_n + 2.0 * r.mean_n) / 16.0,
        }
    }

    /// Gradient with respect to the record fields, for error propagation.
    pub fn gradient(&self, r: &CovarianceRecord) -> [f64; 6] {
        let dvx = 0.25 + r.var_jy;
        let dvy = 0.25 + r.var_jx;
        let dn = -(1.0 + r.mean_n) / 8.0;
        let dcov = match self {
            Witness::W9 => 0.0,
            Witness::W12 | Witness::W14 => -2.0 * r.cov_xy,
        };
        [0.0, 0.0, dvx, dvy, dcov, dn]
    }
}

/// `(1/4 + var_jx)(1/4 + var_jy) - (1 + <N+>)^2 / 16`.
pub fn witness_w9(r: &CovarianceRecord) -> f64 {
    (0.25 + r.var_jx) * (0.25 + r.var_jy) - (1.0 + r.mean_n).powi(2) / 16.0
}

/// `w9 - cov_xy^2`.
pub fn witness_w12(r: &CovarianceRecord) -> f64 {
    witness_w9(r) - r.cov_xy * r.cov_xy
}

/// `Det C + Tr C / 4 - (<N+>^2 + 2 <N+>) / 16`; the rotation-invariant form.
pub fn witness_w14(r: &CovarianceRecord) -> f64 {
    r.determinant() + r.trace() / 4.0 - (r.mean_n * r.mean_n + 2.0 * r.mean_n) / 16.0
}

fn require_hermitian(op: &Operator) -> Result<()> {
    if op.is_hermitian() {
        Ok(())
    } else {
        Err(Error::NonHermitianInput(op.label().to_string()))
    }
}

/// `<A>`, `<B>`, `<AB>` for hermitian A, B.
fn moments(state: &QuantumState, a: &Operator, b: &Operator) -> Result<(f64, f64, num_complex::Complex64)> {
    require_hermitian(a)?;
    require_hermitian(b)?;
    let mean_a = state.expectation(a)?.re;
    let mean_b = state.expectation(b)?.re;
    let ab = state.expectation_of_product(a, b)?;
    Ok((mean_a, mean_b, ab))
}

/// `½<AB + BA> - <A><B>`.
pub fn sym_covariance(state: &QuantumState, a: &Operator, b: &Operator) -> Result<f64> {
    let (mean_a, mean_b, ab) = moments(state, a, b)?;
    // <BA> = conj <AB> for hermitian A, B and hermitian ρ
    Ok(ab.re - mean_a * mean_b)
}

/// All terms of the Heisenberg and Schrödinger–Robertson bounds for a pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyTerms {
    pub var_a: f64,
    pub var_b: f64,
    /// `¼ |<[A, B]>|²`
    pub commutator_term: f64,
    pub sym_cov: f64,
}

impl UncertaintyTerms {
    pub fn hur_margin(&self) -> f64 {
        self.var_a * self.var_b - self.commutator_term
    }

    pub fn srr_margin(&self) -> f64 {
        self.hur_margin() - self.sym_cov * self.sym_cov
    }
}

pub fn uncertainty_terms(state: &QuantumState, a: &Operator, b: &Operator) -> Result<UncertaintyTerms> {
    let (mean_a, mean_b, ab) = moments(state, a, b)?;
    let var_a = state.expectation_of_product(a, a)?.re - mean_a * mean_a;
    let var_b = state.expectation_of_product(b, b)?.re - mean_b * mean_b;
    // <[A, B]> = <AB> - conj <AB> = 2i Im <AB>
    let comm = 2.0 * ab.im;
    Ok(UncertaintyTerms {
        var_a,
        var_b,
        commutator_term: 0.25 * comm * comm,
        sym_cov: ab.re - mean_a * mean_b,
    })
}

pub fn hur_margin(state: &QuantumState, a: &Operator, b: &Operator) -> Result<f64> {
    Ok(uncertainty_terms(state, a, b)?.hur_margin())
}

pub fn srr_margin(state: &QuantumState, a: &Operator, b: &Operator) -> Result<f64> {
    Ok(uncertainty_terms(state, a, b)?.srr_margin())
}

/// Exact moments of `Jx`, `Jy`, `N+`.
pub fn covariance_record(state: &QuantumState, set: &OperatorSet) -> Result<CovarianceRecord> {
    use crate::fock::{trace_of_product, Representation};
    if state.space() != set.space() {
        return Err(Error::SpaceMismatch);
    }
    let (jx, jy) = (set.jx.matrix(), set.jy.matrix());
    let (mx, my, xx, yy, xy) = match state.representation() {
        Representation::Pure(psi) => {
            let x_psi = jx * psi;
            let y_psi = jy * psi;
            (
                psi.dotc(&x_psi).re,
                psi.dotc(&y_psi).re,
                x_psi.norm_squared(),
                y_psi.norm_squared(),
                x_psi.dotc(&y_psi).re,
            )
        }
        Representation::Density(rho) => {
            let rho_x = crate::fock::matmul(rho, jx);
            let rho_y = crate::fock::matmul(rho, jy);
            (
                rho_x.trace().re,
                rho_y.trace().re,
                trace_of_product(&rho_x, jx).re,
                trace_of_product(&rho_y, jy).re,
                trace_of_product(&rho_x, jy).re,
            )
        }
    };
    let mean_n = state.expectation(&set.n_plus)?.re;
    Ok(CovarianceRecord::exact(
        mx,
        my,
        xx - mx * mx,
        yy - my * my,
        xy - mx * my,
        mean_n,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessOutcome {
    pub value: f64,
    pub verdict: Verdict,
    /// Absolute tolerance applied, `tol * max(1, rhs)`.
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_score: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub w9: WitnessOutcome,
    pub w12: WitnessOutcome,
    pub w14: WitnessOutcome,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard: Option<GuardStatus>,
    pub record: CovarianceRecord,
}

impl CriterionReport {
    pub fn outcome(&self, witness: Witness) -> &WitnessOutcome {
        match witness {
            Witness::W9 => &self.w9,
            Witness::W12 => &self.w12,
            Witness::W14 => &self.w14,
        }
    }

    /// Witnesses from an exact record.
    pub fn from_exact(record: CovarianceRecord, tol: f64, guard: Option<GuardStatus>) -> Result<Self> {
        check_tol(tol)?;
        if !record.is_exact() {
            return Err(Error::EstimatedRecord);
        }
        let outcome = |w: Witness| {
            let value = w.value(&record);
            let abs_tol = tol * w.rhs(&record).max(1.0);
            WitnessOutcome {
                value,
                verdict: Verdict::classify(value, abs_tol),
                tolerance: abs_tol,
                stderr: None,
                z_score: None,
            }
        };
        Ok(Self {
            w9: outcome(Witness::W9),
            w12: outcome(Witness::W12),
            w14: outcome(Witness::W14),
            tol,
            z_threshold: None,
            guard,
            record,
        })
    }

    /// Witnesses from an estimated record with delta-method standard errors.
    ///
    /// Detected requires `W < 0` beyond the tolerance and `z >= z_threshold`;
    /// not-detected requires `W > 0` at the same significance; everything
    /// else is boundary.
    pub fn from_estimated(record: CovarianceRecord, tol: f64, z_threshold: f64) -> Result<Self> {
        check_tol(tol)?;
        if !(z_threshold > 0.0) {
            return Err(Error::Config(format!(
                "z threshold must be positive, got {z_threshold}"
            )));
        }
        let covariance = match &record.provenance {
            Provenance::Estimated { covariance, .. } => *covariance,
            Provenance::Exact => return Err(Error::ExactRecord),
        };
        let outcome = |w: Witness| {
            let value = w.value(&record);
            let abs_tol = tol * w.rhs(&record).max(1.0);
            let g = w.gradient(&record);
            let mut var = 0.0;
            for i in 0..6 {
                for j in 0..6 {
                    var += g[i] * covariance[i][j] * g[j];
                }
            }
            let stderr = var.max(0.0).sqrt();
            let z = if value.abs() <= abs_tol {
                0.0
            } else if stderr > 0.0 {
                value.abs() / stderr
            } else {
                f64::INFINITY
            };
            let verdict = if z < z_threshold || value.abs() <= abs_tol {
                Verdict::Boundary
            } else if value < 0.0 {
                Verdict::Detected
            } else {
                Verdict::NotDetected
            };
            WitnessOutcome {
                value,
                verdict,
                tolerance: abs_tol,
                stderr: Some(stderr),
                z_score: Some(z),
            }
        };
        Ok(Self {
            w9: outcome(Witness::W9),
            w12: outcome(Witness::W12),
            w14: outcome(Witness::W14),
            tol,
            z_threshold: Some(z_threshold),
            guard: None,
            record,
        })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("tolerance must be positive, got {tol}")))
    }
}

/// Record, witnesses and guard diagnostics for a state.
pub fn evaluate(state: &QuantumState, set: &OperatorSet, tol: f64) -> Result<CriterionReport> {
    evaluate_with_guard(state, set, tol, DEFAULT_GUARD_TOL)
}

pub fn evaluate_with_guard(
    state: &QuantumState,
    set: &OperatorSet,
    tol: f64,
    guard_tol: f64,
) -> Result<CriterionReport> {
    let record = covariance_record(state, set)?;
    CriterionReport::from_exact(record, tol, Some(state.guard_status(guard_tol)))
}

/// Normal-ordered monomial powers `[m, n, p, q]` with total order `<= max_order`.
pub fn normal_ordered_powers(max_order: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for m in 0..=max_order {
        for n in 0..=max_order - m {
            for p in 0..=max_order - m - n {
                for q in 0..=max_order - m - n - p {
                    out.push([m, n, p, q]);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtMomentCheck {
    pub max_residual: f64,
    pub worst_powers: [usize; 4],
    pub monomials: usize,
    pub guard: GuardStatus,
}

/// Compares `<a†^m a^n b†^p b^q>` on the literal partial transpose with
/// `<a†^m a^n b†^q b^p>` on the original state, for every normal-ordered
/// monomial up to `max_order`.
pub fn verify_pt_moments(state: &QuantumState, max_order: usize) -> Result<PtMomentCheck> {
    verify_pt_moments_with_guard(state, max_order, DEFAULT_GUARD_TOL)
}

pub fn verify_pt_moments_with_guard(state: &QuantumState, max_order: usize, guard_tol: f64) -> Result<PtMomentCheck> {
    let rho = state.to_density();
    let pt = rho.partial_transpose()?;
    let space = state.space();
    let (ca, cb) = (space.cutoff_a(), space.cutoff_b());
    let rho_m = rho.density_matrix();
    let pt_m = pt.density_matrix();

    // Tr(ρ (A ⊗ B)) = Σ ρ[(i,k),(j,l)] A[j,i] B[l,k]
    let kron_expectation = |m: &crate::fock::CMatrix, on_a: &nalgebra::DMatrix<f64>, on_b: &nalgebra::DMatrix<f64>| {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..ca {
            for j in 0..ca {
                let a_ji = on_a[(j, i)];
                if a_ji == 0.0 {
                    continue;
                }
                for k in 0..cb {
                    for l in 0..cb {
                        let b_lk = on_b[(l, k)];
                        if b_lk != 0.0 {
                            acc += m[(i * cb + k, j * cb + l)] * (a_ji * b_lk);
                        }
                    }
                }
            }
        }
        acc
    };

    let powers = normal_ordered_powers(max_order);
    let mut worst = (0.0f64, [0usize; 4]);
    for &[m, n, p, q] in &powers {
        let on_a = single_mode_monomial(ca, m, n);
        let lhs = kron_expectation(&pt_m, &on_a, &single_mode_monomial(cb, p, q));
        let rhs = kron_expectation(&rho_m, &on_a, &single_mode_monomial(cb, q, p));
        let r = (lhs - rhs).norm();
        if r > worst.0 {
            worst = (r, [m, n, p, q]);
        }
    }
    Ok(PtMomentCheck {
        max_residual: worst.0,
        worst_powers: worst.1,
        monomials: powers.len(),
        guard: state.guard_status(guard_tol),
    })
}

/// Expectation of a single normal-ordered monomial; handy for spot checks.
pub fn monomial_expectation(state: &QuantumState, powers: [usize; 4]) -> Result<num_complex::Complex64> {
    state.expectation(&monomial(state.space(), powers))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtCovarianceCheck {
    /// `<ΔKxΔKy>_S` on the partial transpose.
    pub pt_cov_k: f64,
    /// `<ΔJxΔJy>_S` on the state.
    pub cov_j: f64,
    pub cov_residual: f64,
    /// `|<(ΔKx)²>_PT - (¼ + <(ΔJx)²>)|`
    pub var_x_residual: f64,
    pub var_y_residual: f64,
    /// `|<Kz>_PT - (1 + <N+>)/2|`
    pub kz_residual: f64,
    pub guard: GuardStatus,
}

impl PtCovarianceCheck {
    pub fn max_residual(&self) -> f64 {
        self.cov_residual
            .max(self.var_x_residual)
            .max(self.var_y_residual)
            .max(self.kz_residual)
    }
}

/// Checks the covariance bridge between `Kx, Ky` under partial transposition
/// and `Jx, Jy` on the state, plus the variance and `Kz` identities that turn
/// the su(1,1) bound into the Jx/Jy witness.
pub fn verify_pt_covariance(state: &QuantumState, set: &OperatorSet) -> Result<PtCovarianceCheck> {
    verify_pt_covariance_with_guard(state, set, DEFAULT_GUARD_TOL)
}

pub fn verify_pt_covariance_with_guard(
    state: &QuantumState,
    set: &OperatorSet,
    guard_tol: f64,
) -> Result<PtCovarianceCheck> {
    let rho = state.to_density();
    let pt = rho.partial_transpose()?;
    let k = uncertainty_terms(&pt, &set.kx, &set.ky)?;
    let j = uncertainty_terms(&rho, &set.jx, &set.jy)?;
    let kz_pt = pt.expectation(&set.kz)?.re;
    let n = rho.expectation(&set.n_plus)?.re;
    Ok(PtCovarianceCheck {
        pt_cov_k: k.sym_cov,
        cov_j: j.sym_cov,
        cov_residual: (k.sym_cov - j.sym_cov).abs(),
        var_x_residual: (k.var_a - (0.25 + j.var_a)).abs(),
        var_y_residual: (k.var_b - (0.25 + j.var_b)).abs(),
        kz_residual: (kz_pt - 0.5 * (1.0 + n)).abs(),
        guard: state.guard_status(guard_tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64 as C64;
    use std::f64::consts::FRAC_PI_4;

    const ONE: C64 = C64::new(1.0, 0.0);

    fn family(space: FockSpace, theta: f64) -> QuantumState {
        QuantumState::pure_state(
            space,
            [
                ((2, 0), C64::new(theta.cos(), 0.0)),
                ((0, 2), C64::new(0.0, theta.sin())),
            ],
        )
        .unwrap()
    }

    fn bell(space: FockSpace) -> QuantumState {
        QuantumState::pure_state(space, [((1, 0), ONE), ((0, 1), ONE)]).unwrap()
    }

    #[test]
    fn sym_covariance_examples() {
        let s = FockSpace::new(6, 6).unwrap();
        let set = OperatorSet::new(s).unwrap();
        let st = QuantumState::pure_state(s, [((2, 0), ONE)]).unwrap();
        assert_abs_diff_eq!(sym_covariance(&st, &set.jx, &set.jx).unwrap(), 0.5, epsilon = 1e-14);
        for theta in [0.1, 0.7, FRAC_PI_4, 2.0] {
            let st = family(s, theta);
            assert_abs_diff_eq!(
                sym_covariance(&st, &set.jx, &set.jy).unwrap(),
                (2.0 * theta).sin() / 2.0,
                epsilon = 1e-14
            );
        }
        for (na, nb) in [(0, 0), (1, 2), (3, 1)] {
            let st = QuantumState::pure_state(s, [((na, nb), ONE)]).unwrap();
            assert_abs_diff_eq!(sym_covariance(&st, &set.jx, &set.jy).unwrap(), 0.0, epsilon = 1e-14);
        }
        let raw = monomial(s, [0, 1, 0, 0]);
        assert!(matches!(
            sym_covariance(&st, &raw, &set.jx),
            Err(Error::NonHermitianInput(_))
        ));
    }

    #[test]
    fn uncertainty_margins() {
        let s = FockSpace::new(6, 6).unwrap();
        let set = OperatorSet::new(s).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        let t = uncertainty_terms(&vac, &set.kx, &set.ky).unwrap();
        assert_abs_diff_eq!(t.var_a, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(t.var_b, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(t.hur_margin(), 0.0, epsilon = 1e-15);

        let st = family(s, FRAC_PI_4);
        assert_abs_diff_eq!(srr_margin(&st, &set.jx, &set.jx).unwrap(), 0.0, epsilon = 1e-14);
        let t = uncertainty_terms(&st, &set.jx, &set.jy).unwrap();
        assert!(t.srr_margin() >= -1e-10);
        assert!(t.srr_margin() <= t.hur_margin());
    }

    #[test]
    fn record_examples() {
        let s = FockSpace::new(6, 6).unwrap();
        let set = OperatorSet::new(s).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        let r = covariance_record(&vac, &set).unwrap();
        assert_eq!(r.fields(), [0.0; 6]);

        let r = covariance_record(&family(s, FRAC_PI_4), &set).unwrap();
        let expected = [0.0, 0.0, 0.5, 0.5, 0.5, 2.0];
        for (got, want) in r.fields().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }

        let r = covariance_record(&bell(s), &set).unwrap();
        let expected = [0.5, 0.0, 0.0, 0.25, 0.0, 1.0];
        for (got, want) in r.fields().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        // density route agrees with the pure route
        let rd = covariance_record(&bell(s).to_density(), &set).unwrap();
        for (a, b) in r.fields().iter().zip(rd.fields()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let other = OperatorSet::new(FockSpace::new(5, 6).unwrap()).unwrap();
        assert_eq!(covariance_record(&vac, &other).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn witness_examples() {
        let vac = CovarianceRecord::exact(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(witness_w9(&vac), 0.0);
        assert_eq!(witness_w14(&vac), 0.0);
        let b = CovarianceRecord::exact(0.5, 0.0, 0.0, 0.25, 0.0, 1.0);
        assert_abs_diff_eq!(witness_w9(&b), -0.125, epsilon = 1e-15);
        assert_eq!(witness_w12(&b), witness_w9(&b));
        let f = CovarianceRecord::exact(0.0, 0.0, 0.5, 0.5, 0.5, 2.0);
        assert_abs_diff_eq!(witness_w9(&f), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(witness_w12(&f), -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(witness_w14(&f), -0.25, epsilon = 1e-15);
    }

    #[test]
    fn family_sweep_against_closed_form() {
        let s = FockSpace::new(6, 6).unwrap();
        let set = OperatorSet::new(s).unwrap();
        for k in 0..16 {
            let theta = k as f64 * std::f64::consts::PI / 8.0;
            let r = covariance_record(&family(s, theta), &set).unwrap();
            assert_abs_diff_eq!(witness_w9(&r), 0.0, epsilon = 1e-13);
            let expected = -(2.0 * theta).sin().powi(2) / 4.0;
            assert_abs_diff_eq!(witness_w12(&r), expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn evaluate_verdicts() {
        let s = FockSpace::new(8, 8).unwrap();
        let set = OperatorSet::new(s).unwrap();
        let rep = evaluate(&family(s, FRAC_PI_4), &set, DEFAULT_TOL).unwrap();
        assert_eq!(rep.w9.verdict, Verdict::Boundary);
        assert_eq!(rep.w12.verdict, Verdict::Detected);
        assert_eq!(rep.w14.verdict, Verdict::Detected);
        assert!(rep.guard.unwrap().clean);

        let prod = QuantumState::pure_state(s, [((2, 0), ONE)]).unwrap();
        let rep = evaluate(&prod, &set, DEFAULT_TOL).unwrap();
        for w in Witness::ALL {
            assert!(rep.outcome(w).value >= -DEFAULT_TOL);
            assert_ne!(rep.outcome(w).verdict, Verdict::Detected);
        }
        assert!(evaluate(&prod, &set, 0.0).is_err());
    }

    #[test]
    fn pt_moment_examples() {
        let s = FockSpace::new(8, 8).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        let check = verify_pt_moments(&vac, 4).unwrap();
        assert_eq!(check.max_residual, 0.0);
        assert_eq!(check.monomials, 70);

        let st = family(s, FRAC_PI_4).to_density();
        let check = verify_pt_moments(&st, 4).unwrap();
        assert!(check.max_residual <= 1e-12);
        let pt = st.partial_transpose().unwrap();
        let lhs = monomial_expectation(&pt, [2, 0, 2, 0]).unwrap();
        let rhs = monomial_expectation(&st, [2, 0, 0, 2]).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12);
        assert_abs_diff_eq!(rhs.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pt_covariance_examples() {
        let s = FockSpace::new(8, 8).unwrap();
        let set = OperatorSet::new(s).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        assert!(verify_pt_covariance(&vac, &set).unwrap().max_residual() <= 1e-15);
        let check = verify_pt_covariance(&family(s, FRAC_PI_4), &set).unwrap();
        assert!(check.max_residual() <= 1e-10);
        assert_abs_diff_eq!(check.pt_cov_k, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(check.cov_j, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn normal_ordered_enumeration() {
        assert_eq!(normal_ordered_powers(0), vec![[0, 0, 0, 0]]);
        assert_eq!(normal_ordered_powers(1).len(), 5);
        assert_eq!(normal_ordered_powers(4).len(), 70);
    }

    #[test]
    fn estimated_verdicts_need_significance() {
        let mut cov = [[0.0; 6]; 6];
        cov[4][4] = 0.01;
        let rec = CovarianceRecord {
            provenance: Provenance::Estimated {
                stderr: RecordErrors {
                    cov_xy: 0.1,
                    ..Default::default()
                },
                covariance: cov,
            },
            ..CovarianceRecord::exact(0.0, 0.0, 0.5, 0.5, 0.5, 2.0)
        };
        let rep = CriterionReport::from_estimated(rec.clone(), DEFAULT_TOL, 3.0).unwrap();
        // stderr(w12) = |-2 cov| * 0.1 = 0.1, z = 2.5
        assert_abs_diff_eq!(rep.w12.stderr.unwrap(), 0.1, epsilon = 1e-15);
        assert_eq!(rep.w12.verdict, Verdict::Boundary);
        let rep = CriterionReport::from_estimated(rec, DEFAULT_TOL, 2.0).unwrap();
        assert_eq!(rep.w12.verdict, Verdict::Detected);
        assert_eq!(rep.w9.verdict, Verdict::Boundary);
        assert!(
            CriterionReport::from_estimated(CovarianceRecord::exact(0.0, 0.0, 0.0, 0.0, 0.0, 0.0), 1e-9, 3.0).is_err()
        );
    }
}
