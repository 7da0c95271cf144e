//! Simulation of the phase-shifter + 50:50 beamsplitter + photon-counting
//! scheme: exact joint outcome distributions, seeded finite-shot sampling,
//! and reconstruction of every Jx/Jy statistic from four phase settings.
//!
//! The output photon-number difference at setting `φ` is
//! `N_{-,φ} = a†b e^{-iφ} + ab† e^{iφ}`, i.e. `2Jx` at `φ = 0` and `2Jy` at
//! `φ = π/2`; the settings `±π/4` give the anticommutator
//! `JxJy + JyJx = (N²_{-,π/4} - N²_{-,-π/4}) / 4`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64 as C64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::{CovarianceRecord, CriterionReport, Provenance, RecordErrors};
use crate::error::{Error, Result};
use crate::fock::{
    monomial, CMatrix, CVector, FockSpace, GuardStatus, QuantumState, Representation, DEFAULT_GUARD_TOL,
};
use crate::transforms::{sector_unitary, PhaseShift};

/// The four settings needed for reconstruction, in protocol order.
pub const PHASE_SETTINGS: [(&str, f64); 4] = [
    ("0", 0.0),
    ("pi/2", FRAC_PI_2),
    ("pi/4", FRAC_PI_4),
    ("-pi/4", -FRAC_PI_4),
];

/// Tolerance used to match a record's phase to a protocol setting.
pub const PHASE_MATCH_TOL: f64 = 1e-12;

/// Joint `(n_c, n_d)` photon-count distribution at one phase setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub phi: f64,
    pub space: FockSpace,
    /// Outcomes in order of total photon number, then `n_c`.
    pub pmf: Vec<((usize, usize), f64)>,
    pub mean_n_minus: f64,
    pub mean_n_minus_sq: f64,
    pub mean_n_plus: f64,
    pub guard: GuardStatus,
}

impl OutcomeDistribution {
    pub fn total_probability(&self) -> f64 {
        self.pmf.iter().map(|(_, p)| p).sum()
    }

    pub fn probability(&self, outcome: (usize, usize)) -> f64 {
        self.pmf.iter().find(|(o, _)| *o == outcome).map_or(0.0, |(_, p)| *p)
    }
}

/// Amplitudes of `state` restricted to the `total`-photon sector, laid out on
/// the complete sector basis `|k, total-k>`; absent basis states are zero.
fn sector_indices(space: FockSpace, total: usize) -> Vec<Option<usize>> {
    (0..=total)
        .map(|k| {
            let (na, nb) = (k, total - k);
            (na < space.cutoff_a() && nb < space.cutoff_b()).then(|| space.index(na, nb))
        })
        .collect()
}

/// Joint output distribution for phase setting `phi`.
///
/// Passive optics conserves `N+`, and only the diagonal of the output state
/// is read, so each total-number sector is propagated on its own with the
/// exact (untruncated) sector unitary. Outputs can therefore exceed the input
/// cutoffs without loss.
pub fn outcome_distribution(state: &QuantumState, phi: f64) -> OutcomeDistribution {
    outcome_distribution_with_guard(state, phi, DEFAULT_GUARD_TOL)
}

pub fn outcome_distribution_with_guard(state: &QuantumState, phi: f64, guard_tol: f64) -> OutcomeDistribution {
    crate::transforms::ensure_convention();
    let space = state.space();
    let mut pmf = Vec::new();
    for total in 0..=(space.cutoff_a() + space.cutoff_b() - 2) {
        let idx = sector_indices(space, total);
        let probs: Vec<f64> = match state.representation() {
            Representation::Pure(psi) => {
                let v = CVector::from_fn(total + 1, |k, _| idx[k].map_or(C64::new(0.0, 0.0), |i| psi[i]));
                if v.norm_squared() == 0.0 {
                    continue;
                }
                (sector_unitary(total, phi) * v).iter().map(|z| z.norm_sqr()).collect()
            }
            Representation::Density(rho) => {
                let block = CMatrix::from_fn(total + 1, total + 1, |r, c| match (idx[r], idx[c]) {
                    (Some(i), Some(j)) => rho[(i, j)],
                    _ => C64::new(0.0, 0.0),
                });
                if block.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                    continue;
                }
                let u = sector_unitary(total, phi);
                let out = &u * block * u.adjoint();
                (0..=total).map(|k| out[(k, k)].re).collect()
            }
        };
        for (k, p) in probs.into_iter().enumerate() {
            pmf.push(((k, total - k), p));
        }
    }
    let moment = |f: &dyn Fn(usize, usize) -> f64| pmf.iter().map(|&((c, d), p)| p * f(c, d)).sum::<f64>();
    OutcomeDistribution {
        phi,
        space,
        mean_n_minus: moment(&|c, d| c as f64 - d as f64),
        mean_n_minus_sq: moment(&|c, d| (c as f64 - d as f64).powi(2)),
        mean_n_plus: moment(&|c, d| (c + d) as f64),
        guard: state.guard_status(guard_tol),
        pmf,
    }
}

/// `max(|<N->_pmf - <N_{-,φ}>_ρ|, |<N-²>_pmf - <N_{-,φ}²>_ρ|)`, where the
/// right-hand sides come from the operator `a†b e^{-iφ} + ab† e^{iφ}`
/// evaluated directly on the input state.
pub fn exact_moment_check(state: &QuantumState, phi: f64) -> Result<f64> {
    let dist = outcome_distribution(state, phi);
    let (mean, mean_sq) = direct_difference_moments(state, phi)?;
    Ok((dist.mean_n_minus - mean)
        .abs()
        .max((dist.mean_n_minus_sq - mean_sq).abs()))
}

/// `<N_{-,φ}>` and `<N_{-,φ}²>` from operator matrices on the input space.
pub fn direct_difference_moments(state: &QuantumState, phi: f64) -> Result<(f64, f64)> {
    let space = state.space();
    let ad_b = monomial(space, [1, 0, 0, 1]).into_matrix();
    let n_minus = &ad_b * C64::from_polar(1.0, -phi) + ad_b.adjoint() * C64::from_polar(1.0, phi);
    let op = crate::fock::Operator::hermitian(space, n_minus, format!("N-({phi})"))?;
    let mean = state.expectation(&op)?.re;
    let mean_sq = state.expectation_of_product(&op, &op)?.re;
    Ok((mean, mean_sq))
}

/// Counts and sample moments at one phase setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub phi: f64,
    pub space: FockSpace,
    /// `None` for the infinite-shot limit built from pmf moments.
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    /// Nonzero counts in pmf order.
    pub counts: Vec<((usize, usize), u64)>,
    pub mean_n_minus: f64,
    pub mean_n_minus_sq: f64,
    pub mean_n_plus: f64,
    pub stderr_n_minus: f64,
    pub stderr_n_minus_sq: f64,
    pub stderr_n_plus: f64,
    /// Covariance of the three sample means `(N-, N-², N+)`.
    pub moment_covariance: [[f64; 3]; 3],
}

impl ShotRecord {
    /// Record carrying the exact pmf moments and zero sampling error.
    pub fn exact_limit(dist: &OutcomeDistribution) -> Self {
        Self {
            phi: dist.phi,
            space: dist.space,
            shots: None,
            seed: None,
            counts: Vec::new(),
            mean_n_minus: dist.mean_n_minus,
            mean_n_minus_sq: dist.mean_n_minus_sq,
            mean_n_plus: dist.mean_n_plus,
            stderr_n_minus: 0.0,
            stderr_n_minus_sq: 0.0,
            stderr_n_plus: 0.0,
            moment_covariance: [[0.0; 3]; 3],
        }
    }

    fn means(&self) -> [f64; 3] {
        [self.mean_n_minus, self.mean_n_minus_sq, self.mean_n_plus]
    }
}

/// Generator used for every sampling call: ChaCha8 seeded through
/// `seed_from_u64`.
pub fn rng_for_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for protocol setting `index` derived from a run seed, so that the four
/// settings never share a generator stream.
pub fn setting_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Draws `n_shots` independent outcomes from the pmf.
pub fn sample_shots(dist: &OutcomeDistribution, n_shots: u64, seed: u64) -> Result<ShotRecord> {
    if n_shots == 0 {
        return Err(Error::ZeroShots);
    }
    let weights: Vec<f64> = dist.pmf.iter().map(|(_, p)| p.max(0.0)).collect();
    let sampler =
        WeightedIndex::new(&weights).map_err(|e| Error::InvalidState(format!("unusable outcome distribution: {e}")))?;
    let mut rng = rng_for_seed(seed);
    let mut tally = vec![0u64; weights.len()];
    for _ in 0..n_shots {
        tally[sampler.sample(&mut rng)] += 1;
    }
    let counts: Vec<((usize, usize), u64)> = dist
        .pmf
        .iter()
        .zip(&tally)
        .filter(|(_, &n)| n > 0)
        .map(|((o, _), &n)| (*o, n))
        .collect();

    // Sample means and the covariance of the means of (N-, N-², N+).
    let n = n_shots as f64;
    let values = |(c, d): (usize, usize)| {
        let minus = c as f64 - d as f64;
        [minus, minus * minus, (c + d) as f64]
    };
    let mut mean = [0.0; 3];
    for &(o, k) in &counts {
        let v = values(o);
        for i in 0..3 {
            mean[i] += k as f64 * v[i];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut cov = [[0.0; 3]; 3];
    if n_shots > 1 {
        for &(o, k) in &counts {
            let v = values(o);
            for i in 0..3 {
                for j in 0..3 {
                    cov[i][j] += k as f64 * (v[i] - mean[i]) * (v[j] - mean[j]);
                }
            }
        }
        for row in &mut cov {
            for x in row.iter_mut() {
                // unbiased sample covariance, divided by N for the mean
                *x /= (n - 1.0) * n;
            }
        }
    }
    Ok(ShotRecord {
        phi: dist.phi,
        space: dist.space,
        shots: Some(n_shots),
        seed: Some(seed),
        counts,
        mean_n_minus: mean[0],
        mean_n_minus_sq: mean[1],
        mean_n_plus: mean[2],
        stderr_n_minus: cov[0][0].sqrt(),
        stderr_n_minus_sq: cov[1][1].sqrt(),
        stderr_n_plus: cov[2][2].sqrt(),
        moment_covariance: cov,
    })
}

/// Exact distributions for the four protocol settings.
pub fn protocol_distributions(state: &QuantumState) -> Vec<OutcomeDistribution> {
    PHASE_SETTINGS
        .iter()
        .map(|&(_, phi)| outcome_distribution(state, phi))
        .collect()
}

/// Samples every protocol setting with `shots` shots, seeding setting `i`
/// with [`setting_seed`]`(seed, i)`.
pub fn simulate_protocol(state: &QuantumState, shots: u64, seed: u64) -> Result<Vec<ShotRecord>> {
    use rayon::prelude::*;
    let dists = protocol_distributions(state);
    dists
        .par_iter()
        .enumerate()
        .map(|(i, d)| sample_shots(d, shots, setting_seed(seed, i)))
        .collect()
}

fn find_setting<'a>(records: &'a [ShotRecord], name: &'static str, phi: f64) -> Result<&'a ShotRecord> {
    records
        .iter()
        .find(|r| PhaseShift::new(r.phi).approx_eq(phi, PHASE_MATCH_TOL))
        .ok_or(Error::MissingPhaseSetting(name))
}

/// Estimated covariance record from the four phase settings.
///
/// `<N+>` is read from the `φ = 0` record. Standard errors come from a
/// first-order propagation of the per-setting moment covariances; the
/// settings are independent.
pub fn reconstruct(records: &[ShotRecord]) -> Result<CovarianceRecord> {
    let first = records.first().ok_or(Error::MissingPhaseSetting("0"))?;
    if let Some(bad) = records.iter().find(|r| r.space != first.space) {
        return Err(Error::InconsistentSpace(format!(
            "cutoffs ({}, {}) vs ({}, {})",
            first.space.cutoff_a(),
            first.space.cutoff_b(),
            bad.space.cutoff_a(),
            bad.space.cutoff_b()
        )));
    }
    let [r0, rh, rp, rm] = [0, 1, 2, 3].map(|i| find_setting(records, PHASE_SETTINGS[i].0, PHASE_SETTINGS[i].1));
    let (r0, rh, rp, rm) = (r0?, rh?, rp?, rm?);

    // raw = (m1_0, m2_0, n_0, m1_h, m2_h, m2_p, m2_m)
    let raw = [
        r0.mean_n_minus,
        r0.mean_n_minus_sq,
        r0.mean_n_plus,
        rh.mean_n_minus,
        rh.mean_n_minus_sq,
        rp.mean_n_minus_sq,
        rm.mean_n_minus_sq,
    ];
    let mut raw_cov = [[0.0; 7]; 7];
    let c0 = r0.moment_covariance;
    for i in 0..3 {
        for j in 0..3 {
            raw_cov[i][j] = c0[i][j];
        }
    }
    let ch = rh.moment_covariance;
    for i in 0..2 {
        for j in 0..2 {
            raw_cov[3 + i][3 + j] = ch[i][j];
        }
    }
    raw_cov[5][5] = rp.moment_covariance[1][1];
    raw_cov[6][6] = rm.moment_covariance[1][1];

    let [m1_0, m2_0, n_0, m1_h, m2_h, m2_p, m2_m] = raw;
    let mean_jx = 0.5 * m1_0;
    let mean_jy = 0.5 * m1_h;
    let fields = [
        mean_jx,
        mean_jy,
        0.25 * m2_0 - mean_jx * mean_jx,
        0.25 * m2_h - mean_jy * mean_jy,
        (m2_p - m2_m) / 8.0 - mean_jx * mean_jy,
        n_0,
    ];
    let mut jac = [[0.0; 7]; 6];
    jac[0][0] = 0.5;
    jac[1][3] = 0.5;
    jac[2][1] = 0.25;
    jac[2][0] = -0.5 * m1_0;
    jac[3][4] = 0.25;
    jac[3][3] = -0.5 * m1_h;
    jac[4][5] = 0.125;
    jac[4][6] = -0.125;
    jac[4][0] = -0.25 * m1_h;
    jac[4][3] = -0.25 * m1_0;
    jac[5][2] = 1.0;

    let mut covariance = [[0.0; 6]; 6];
    for a in 0..6 {
        for b in 0..6 {
            let mut acc = 0.0;
            for i in 0..7 {
                for j in 0..7 {
                    acc += jac[a][i] * raw_cov[i][j] * jac[b][j];
                }
            }
            covariance[a][b] = acc;
        }
    }
    let se = |i: usize| covariance[i][i].max(0.0).sqrt();
    Ok(CovarianceRecord {
        mean_jx: fields[0],
        mean_jy: fields[1],
        var_jx: fields[2],
        var_jy: fields[3],
        cov_xy: fields[4],
        mean_n: fields[5],
        provenance: Provenance::Estimated {
            stderr: RecordErrors {
                mean_jx: se(0),
                mean_jy: se(1),
                var_jx: se(2),
                var_jy: se(3),
                cov_xy: se(4),
                mean_n: se(5),
            },
            covariance,
        },
    })
}

/// Witness report for a reconstructed record.
pub fn estimated_report(recon: CovarianceRecord, tol: f64, z_threshold: f64) -> Result<CriterionReport> {
    CriterionReport::from_estimated(recon, tol, z_threshold)
}

/// Mean of each sample moment, for convergence studies.
pub fn sample_means(record: &ShotRecord) -> [f64; 3] {
    record.means()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::OperatorSet;
    use crate::catalog::{random_state_suite, realize, StateSpec};
    use crate::criteria::{covariance_record, Verdict};
    use approx::assert_abs_diff_eq;

    const ONE: C64 = C64::new(1.0, 0.0);

    #[test]
    fn vacuum_distribution() {
        let s = FockSpace::new(6, 6).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        for phi in [0.0, 0.4, -2.0] {
            let d = outcome_distribution(&vac, phi);
            assert_eq!(d.pmf, vec![((0, 0), 1.0)]);
        }
    }

    #[test]
    fn single_photon_splits_evenly() {
        let s = FockSpace::new(6, 6).unwrap();
        let one = QuantumState::pure_state(s, [((1, 0), ONE)]).unwrap();
        let d = outcome_distribution(&one, 0.0);
        assert_abs_diff_eq!(d.probability((1, 0)), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.probability((0, 1)), 0.5, epsilon = 1e-15);
        let dd = outcome_distribution(&one.to_density(), 0.0);
        assert_abs_diff_eq!(dd.probability((1, 0)), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn two_photon_family_moments() {
        let s = FockSpace::new(8, 8).unwrap();
        let st = realize(&StateSpec::TwoPhotonTheta { theta: FRAC_PI_4 }, s).unwrap();
        let d = outcome_distribution(&st, 0.0);
        assert_abs_diff_eq!(d.mean_n_minus, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.mean_n_minus_sq, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.mean_n_plus, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.total_probability(), 1.0, epsilon = 1e-14);

        let p = outcome_distribution(&st, FRAC_PI_4).mean_n_minus_sq;
        let m = outcome_distribution(&st, -FRAC_PI_4).mean_n_minus_sq;
        assert_abs_diff_eq!((p - m) / 4.0, 1.0, epsilon = 1e-13);
        assert!(exact_moment_check(&st, FRAC_PI_4).unwrap() <= 1e-12);
    }

    #[test]
    fn moment_check_on_random_states() {
        let s = FockSpace::new(8, 8).unwrap();
        let set = OperatorSet::new(s).unwrap();
        for st in random_state_suite(s, 6, 5).unwrap() {
            assert!(exact_moment_check(&st, 0.0).unwrap() <= 1e-10);
            let d = outcome_distribution(&st, FRAC_PI_2);
            let jy = st.expectation(&set.jy).unwrap().re;
            assert_abs_diff_eq!(d.mean_n_minus, 2.0 * jy, epsilon = 1e-12);
            let n = st.expectation(&set.n_plus).unwrap().re;
            assert_abs_diff_eq!(d.mean_n_plus, n, epsilon = 1e-12);
            assert!(d.pmf.iter().all(|(_, p)| *p >= -1e-12));
        }
    }

    #[test]
    fn outputs_may_exceed_input_cutoff() {
        // |3,3> at cutoff 4 puts weight on |6,0>, outside the input space
        let s = FockSpace::new(4, 4).unwrap();
        let st = QuantumState::pure_state(s, [((3, 3), ONE)]).unwrap();
        let d = outcome_distribution(&st, 0.0);
        assert_abs_diff_eq!(d.total_probability(), 1.0, epsilon = 1e-13);
        assert!(d.probability((6, 0)) > 0.0);
        // Hong-Ou-Mandel-type parity: odd n_c never occurs for |n,n> input
        assert!(d.probability((3, 3)) < 1e-13);
    }

    #[test]
    fn sampling_is_deterministic_and_validated() {
        let s = FockSpace::new(6, 6).unwrap();
        let one = QuantumState::pure_state(s, [((1, 0), ONE)]).unwrap();
        let d = outcome_distribution(&one, 0.0);
        assert_eq!(sample_shots(&d, 0, 1).unwrap_err(), Error::ZeroShots);
        let a = sample_shots(&d, 1000, 42).unwrap();
        let b = sample_shots(&d, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().map(|(_, n)| n).sum::<u64>(), 1000);
        assert_ne!(a, sample_shots(&d, 1000, 43).unwrap());
    }

    #[test]
    fn vacuum_sampling_has_zero_error() {
        let s = FockSpace::new(6, 6).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        let r = sample_shots(&outcome_distribution(&vac, 0.3), 500, 9).unwrap();
        assert_eq!(r.counts, vec![((0, 0), 500)]);
        assert_eq!([r.stderr_n_minus, r.stderr_n_minus_sq, r.stderr_n_plus], [0.0; 3]);
        let recs = simulate_protocol(&vac, 100, 3).unwrap();
        let rec = reconstruct(&recs).unwrap();
        assert_eq!(rec.fields(), [0.0; 6]);
    }

    #[test]
    fn single_photon_mean_concentrates() {
        let s = FockSpace::new(6, 6).unwrap();
        let one = QuantumState::pure_state(s, [((1, 0), ONE)]).unwrap();
        let n = 100_000u64;
        let r = sample_shots(&outcome_distribution(&one, 0.0), n, 7).unwrap();
        // σ(N-) = 1
        assert!(r.mean_n_minus.abs() <= 5.0 / (n as f64).sqrt());
        assert_abs_diff_eq!(r.stderr_n_minus, 1.0 / (n as f64).sqrt(), epsilon = 1e-4);
    }

    #[test]
    fn exact_limit_reconstruction_matches_record() {
        let s = FockSpace::new(8, 8).unwrap();
        let set = OperatorSet::new(s).unwrap();
        for st in random_state_suite(s, 4, 21).unwrap() {
            let recs: Vec<_> = protocol_distributions(&st)
                .iter()
                .map(ShotRecord::exact_limit)
                .collect();
            let rec = reconstruct(&recs).unwrap();
            let direct = covariance_record(&st, &set).unwrap();
            for (a, b) in rec.fields().iter().zip(direct.fields()) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-10);
            }
            assert_eq!(rec.stderr().unwrap().cov_xy, 0.0);
        }
    }

    #[test]
    fn exact_limit_report_detects_two_photon_state() {
        let s = FockSpace::new(8, 8).unwrap();
        let st = realize(&StateSpec::TwoPhotonTheta { theta: FRAC_PI_4 }, s).unwrap();
        let recs: Vec<_> = protocol_distributions(&st)
            .iter()
            .map(ShotRecord::exact_limit)
            .collect();
        let rep = estimated_report(reconstruct(&recs).unwrap(), 1e-9, 3.0).unwrap();
        assert_abs_diff_eq!(rep.w12.value, -0.25, epsilon = 1e-12);
        assert_eq!(rep.w12.verdict, Verdict::Detected);
        assert_eq!(rep.w9.verdict, Verdict::Boundary);
    }

    #[test]
    fn low_shot_reconstruction_is_inconclusive() {
        let s = FockSpace::new(8, 8).unwrap();
        let st = realize(&StateSpec::TwoPhotonTheta { theta: FRAC_PI_4 }, s).unwrap();
        let recs = simulate_protocol(&st, 100, 5).unwrap();
        let rep = estimated_report(reconstruct(&recs).unwrap(), 1e-9, 3.0).unwrap();
        let se = rep.w12.stderr.unwrap();
        assert!(se > 0.05, "stderr {se}");
    }

    #[test]
    fn reconstruction_errors() {
        let s = FockSpace::new(6, 6).unwrap();
        let vac = QuantumState::pure_state(s, [((0, 0), ONE)]).unwrap();
        let mut recs: Vec<_> = protocol_distributions(&vac)
            .iter()
            .map(ShotRecord::exact_limit)
            .collect();
        recs.pop();
        assert_eq!(reconstruct(&recs).unwrap_err(), Error::MissingPhaseSetting("-pi/4"));
        let other = FockSpace::new(5, 6).unwrap();
        let v2 = QuantumState::pure_state(other, [((0, 0), ONE)]).unwrap();
        recs.push(ShotRecord::exact_limit(&outcome_distribution(&v2, -FRAC_PI_4)));
        assert!(matches!(reconstruct(&recs), Err(Error::InconsistentSpace(_))));
        assert!(reconstruct(&[]).is_err());
        // 7π/4 is accepted as -π/4
        recs.pop();
        recs.push(ShotRecord::exact_limit(&outcome_distribution(&vac, 7.0 * FRAC_PI_4)));
        assert!(reconstruct(&recs).is_ok());
    }
}
