//! Local phase shifts, the 50:50 beamsplitter, and the closed-form action of a
//! phase shift on a covariance record.
//!
//! Convention: a phase shift by `φ` on mode b maps `b -> b e^{-iφ}` in the
//! Heisenberg picture, which rotates `(Jx, Jy)` as
//! `Jx' = cos φ Jx + sin φ Jy`, `Jy' = -sin φ Jx + cos φ Jy`. In the
//! Schrödinger picture the state picks up `e^{-iφ n_b}` per basis state.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::OperatorSet;
use crate::criteria::{covariance_record, witness_w14, witness_w9, CovarianceRecord};
use crate::error::{Error, Result};
use crate::fock::{annihilation, matmul, CMatrix, FockSpace, Mode, Operator, QuantumState, Representation};

/// Phase setting on mode b, stored reduced to `(-π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseShift {
    phi: f64,
}

impl PhaseShift {
    pub fn new(phi: f64) -> Self {
        Self { phi: reduce_angle(phi) }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Same setting up to `tol` after reduction, treating `-π` and `π` alike.
    pub fn approx_eq(&self, other: f64, tol: f64) -> bool {
        let d = reduce_angle(self.phi - other);
        d.abs() <= tol
    }
}

/// Reduce an angle to `(-π, π]`.
pub fn reduce_angle(phi: f64) -> f64 {
    let mut r = phi.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

fn phase_factor(phi: f64, n_b: usize) -> C64 {
    C64::from_polar(1.0, -phi * n_b as f64)
}

/// Apply `exp(-iφ n_b)` to the state.
pub fn phase_shift(state: &QuantumState, phi: f64) -> QuantumState {
    ensure_convention();
    apply_phase(state, phi)
}

fn apply_phase(state: &QuantumState, phi: f64) -> QuantumState {
    let space = state.space();
    let factors: Vec<C64> = space.basis().map(|(_, nb)| phase_factor(phi, nb)).collect();
    state.map_representation(|repr| match repr {
        Representation::Pure(psi) => {
            Representation::Pure(psi.zip_map(&nalgebra::DVector::from_vec(factors.clone()), |z, f| z * f))
        }
        Representation::Density(rho) => {
            let dim = rho.nrows();
            Representation::Density(CMatrix::from_fn(dim, dim, |i, j| {
                rho[(i, j)] * factors[i] * factors[j].conj()
            }))
        }
    })
}

static CONVENTION: OnceLock<std::result::Result<(), String>> = OnceLock::new();

/// Runs the phase-convention self-test once per process and panics if the
/// state-level phase shift disagrees with the `(Jx, Jy)` rotation.
pub fn ensure_convention() {
    if let Err(msg) = CONVENTION.get_or_init(convention_self_test) {
        panic!("phase-shift convention self-test failed: {msg}");
    }
}

/// Checks `<J'x> = cos φ <Jx> + sin φ <Jy>` and `<J'y> = -sin φ <Jx> + cos φ <Jy>`
/// on a small state with nonzero mean spin in both directions.
pub fn convention_self_test() -> std::result::Result<(), String> {
    let space = FockSpace::new(3, 3).map_err(|e| e.to_string())?;
    let set = OperatorSet::new(space).map_err(|e| e.to_string())?;
    let state = QuantumState::pure_state(
        space,
        [
            ((1, 0), C64::new(0.8, 0.0)),
            ((0, 1), C64::new(0.3, 0.5)),
            ((1, 1), C64::new(0.1, -0.2)),
        ],
    )
    .map_err(|e| e.to_string())?;
    let mean = |s: &QuantumState, op: &Operator| s.expectation(op).map(|z| z.re).map_err(|e| e.to_string());
    let (jx, jy) = (mean(&state, &set.jx)?, mean(&state, &set.jy)?);
    for phi in [0.3, 1.1, -2.0] {
        let shifted = apply_phase(&state, phi);
        let (jx2, jy2) = (mean(&shifted, &set.jx)?, mean(&shifted, &set.jy)?);
        let (c, s) = (phi.cos(), phi.sin());
        let err = (jx2 - (c * jx + s * jy)).abs().max((jy2 - (-s * jx + c * jy)).abs());
        if err > 1e-12 {
            return Err(format!("rotation mismatch {err:e} at phi = {phi}"));
        }
    }
    Ok(())
}

/// Covariance record of the phase-shifted state, from the record alone.
pub fn rotate_record(record: &CovarianceRecord, phi: f64) -> Result<CovarianceRecord> {
    if !record.is_exact() {
        return Err(Error::EstimatedRecord);
    }
    let (c, s) = (phi.cos(), phi.sin());
    let (s2, c2) = ((2.0 * phi).sin(), (2.0 * phi).cos());
    let r = record;
    Ok(CovarianceRecord::exact(
        c * r.mean_jx + s * r.mean_jy,
        -s * r.mean_jx + c * r.mean_jy,
        c * c * r.var_jx + s * s * r.var_jy + 2.0 * c * s * r.cov_xy,
        s * s * r.var_jx + c * c * r.var_jy - 2.0 * c * s * r.cov_xy,
        0.5 * s2 * (r.var_jy - r.var_jx) + c2 * r.cov_xy,
        r.mean_n,
    ))
}

/// Phase that removes the Jx/Jy cross covariance,
/// `½ atan2(2 cov_xy, var_jx - var_jy)`; 0 when the record is already
/// isotropic and uncorrelated.
pub fn nulling_phase(record: &CovarianceRecord) -> Result<f64> {
    if !record.is_exact() {
        return Err(Error::EstimatedRecord);
    }
    let y = 2.0 * record.cov_xy;
    let x = record.var_jx - record.var_jy;
    if y == 0.0 && x == 0.0 {
        return Ok(0.0);
    }
    Ok(0.5 * y.atan2(x))
}

/// Orthogonal 50:50 mixing `exp(π/4 (a†b - ab†))` restricted to the given
/// total-number sector basis, listed as `(n_a, n_b)` pairs.
fn mixing_block(levels: &[(usize, usize)]) -> DMatrix<f64> {
    let m = levels.len();
    let generator = DMatrix::from_fn(m, m, |r, c| {
        let (ra, rb) = levels[r];
        let (ca, cb) = levels[c];
        // a†b |ca, cb> = sqrt((ca+1) cb) |ca+1, cb-1>
        if ra == ca + 1 && rb + 1 == cb {
            FRAC_PI_4 * ((ra * cb) as f64).sqrt()
        } else if ra + 1 == ca && rb == cb + 1 {
            -FRAC_PI_4 * ((ca * rb) as f64).sqrt()
        } else {
            0.0
        }
    });
    generator.exp()
}

/// Unitary for the phase shifter followed by the 50:50 beamsplitter.
///
/// Output modes are `c = (a + b e^{-iφ})/√2` and `d = (-a + b e^{-iφ})/√2`;
/// `U ρ U†` holds the output state with `c` in the mode-a slot. Built
/// sector by sector as the exponential of the truncated `i π/2 Jy`
/// generator, so it is exactly unitary; it is only faithful to the
/// untruncated optics on sectors with `n_a + n_b < min(cutoff_a, cutoff_b)`.
pub fn beamsplitter_unitary(space: FockSpace, phi: f64) -> Operator {
    let dim = space.dim();
    let mut u = CMatrix::zeros(dim, dim);
    for total in 0..=(space.cutoff_a() + space.cutoff_b() - 2) {
        let levels: Vec<(usize, usize)> = (0..=total)
            .map(|na| (na, total - na))
            .filter(|&(na, nb)| na < space.cutoff_a() && nb < space.cutoff_b())
            .collect();
        let block = mixing_block(&levels);
        for (r, &(ra, rb)) in levels.iter().enumerate() {
            for (c, &(ca, cb)) in levels.iter().enumerate() {
                u[(space.index(ra, rb), space.index(ca, cb))] = phase_factor(phi, cb) * block[(r, c)];
            }
        }
    }
    Operator::new(space, u, format!("BS·PS({phi})")).expect("square by construction")
}

/// Exact phase-shifter plus beamsplitter on the full sector of `total`
/// photons, in the basis `|k, total - k>`, `k = 0..=total`.
pub fn sector_unitary(total: usize, phi: f64) -> CMatrix {
    let levels: Vec<(usize, usize)> = (0..=total).map(|k| (k, total - k)).collect();
    let block = mixing_block(&levels);
    CMatrix::from_fn(total + 1, total + 1, |r, c| {
        phase_factor(phi, levels[c].1) * block[(r, c)]
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeMapResidual {
    pub c_residual: f64,
    pub d_residual: f64,
    pub unitarity: f64,
}

impl ModeMapResidual {
    pub fn max(&self) -> f64 {
        self.c_residual.max(self.d_residual)
    }
}

/// `max |U†aU - (a + b e^{-iφ})/√2|` and the `d` analogue over basis states
/// with `n_a + n_b <= min(cutoff) - 1 - guard`, plus `max |U†U - I|`.
pub fn mode_map_residual(space: FockSpace, phi: f64, guard: usize) -> Result<ModeMapResidual> {
    space.check_guard(guard)?;
    let u = beamsplitter_unitary(space, phi);
    let u_m = u.matrix();
    let u_dag = u_m.adjoint();
    let a = annihilation(space, Mode::A).into_matrix();
    let b = annihilation(space, Mode::B).into_matrix();
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let be = &b * C64::from_polar(1.0, -phi);
    let c_expected = (&a + &be) * s;
    let d_expected = (&be - &a) * s;
    let c_out = matmul(&matmul(&u_dag, &a), u_m);
    let d_out = matmul(&matmul(&u_dag, &b), u_m);

    let limit = space.min_cutoff() - 1 - guard;
    let guarded: Vec<usize> = space
        .basis()
        .enumerate()
        .filter(|&(_, (na, nb))| na + nb <= limit)
        .map(|(i, _)| i)
        .collect();
    let unitarity = crate::fock::max_abs_entry(&(matmul(&u_dag, u_m) - CMatrix::identity(space.dim(), space.dim())));
    Ok(ModeMapResidual {
        c_residual: crate::algebra::restricted_max(&(c_out - c_expected), &guarded),
        d_residual: crate::algebra::restricted_max(&(d_out - d_expected), &guarded),
        unitarity,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceScan {
    pub phases: Vec<f64>,
    pub w14: Vec<f64>,
    pub w9: Vec<f64>,
    pub reference_w14: f64,
    pub reference_w9: f64,
    pub max_delta_w14: f64,
    pub max_delta_w9: f64,
}

/// Evaluates w14 and w9 on the phase-shifted state for each phase.
pub fn invariance_scan(state: &QuantumState, set: &OperatorSet, phases: &[f64]) -> Result<InvarianceScan> {
    use rayon::prelude::*;
    let reference = covariance_record(state, set)?;
    let records: Vec<CovarianceRecord> = phases
        .par_iter()
        .map(|&phi| covariance_record(&phase_shift(state, phi), set))
        .collect::<Result<_>>()?;
    let w14: Vec<f64> = records.iter().map(witness_w14).collect();
    let w9: Vec<f64> = records.iter().map(witness_w9).collect();
    let (ref14, ref9) = (witness_w14(&reference), witness_w9(&reference));
    let max_dev = |v: &[f64], r: f64| v.iter().fold(0.0f64, |m, x| m.max((x - r).abs()));
    Ok(InvarianceScan {
        phases: phases.to_vec(),
        max_delta_w14: max_dev(&w14, ref14),
        max_delta_w9: max_dev(&w9, ref9),
        w14,
        w9,
        reference_w14: ref14,
        reference_w9: ref9,
    })
}

/// Largest componentwise gap between the record of the shifted state and the
/// rotated record, over the given phases.
pub fn rotation_consistency(state: &QuantumState, set: &OperatorSet, phases: &[f64]) -> Result<f64> {
    let base = covariance_record(state, set)?;
    let mut worst = 0.0f64;
    for &phi in phases {
        let direct = covariance_record(&phase_shift(state, phi), set)?;
        let rotated = rotate_record(&base, phi)?;
        for (a, b) in direct.fields().iter().zip(rotated.fields()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}
