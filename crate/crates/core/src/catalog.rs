//! Parameterized state families and seeded random test corpora.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CVector, FockSpace, QuantumState, DEFAULT_GUARD_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub n_a: usize,
    pub n_b: usize,
    pub weight: f64,
}

/// A named family with its parameters. Family names are the `family` tags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum StateSpec {
    /// `cos θ |2,0> + i sin θ |0,2>`
    TwoPhotonTheta {
        theta: f64,
    },
    /// `cos θ |1,0> + sin θ |0,1>`
    SinglePhotonTheta {
        theta: f64,
    },
    /// `(|n,0> + e^{iθ} |0,n>) / √2`
    Noon {
        n: usize,
        #[serde(default)]
        theta: f64,
    },
    /// `Σ tanh^n r |n,n> / cosh r`
    Tmsv {
        r: f64,
    },
    FockProduct {
        n_a: usize,
        n_b: usize,
    },
    CoherentProduct {
        alpha: f64,
        beta: f64,
    },
    /// Incoherent mixture of Fock products.
    MixedProduct {
        components: Vec<MixtureComponent>,
    },
}

pub const FAMILY_NAMES: [&str; 7] = [
    "two-photon-theta",
    "single-photon-theta",
    "noon",
    "tmsv",
    "fock-product",
    "coherent-product",
    "mixed-product",
];

impl StateSpec {
    pub fn family(&self) -> &'static str {
        match self {
            StateSpec::TwoPhotonTheta { .. } => FAMILY_NAMES[0],
            StateSpec::SinglePhotonTheta { .. } => FAMILY_NAMES[1],
            StateSpec::Noon { .. } => FAMILY_NAMES[2],
            StateSpec::Tmsv { .. } => FAMILY_NAMES[3],
            StateSpec::FockProduct { .. } => FAMILY_NAMES[4],
            StateSpec::CoherentProduct { .. } => FAMILY_NAMES[5],
            StateSpec::MixedProduct { .. } => FAMILY_NAMES[6],
        }
    }

    /// Whether the family is separable by construction.
    pub fn is_product(&self) -> bool {
        matches!(
            self,
            StateSpec::FockProduct { .. } | StateSpec::CoherentProduct { .. } | StateSpec::MixedProduct { .. }
        )
    }

    pub fn validate(&self, space: FockSpace) -> Result<()> {
        let out_of_range = |name, value: f64, reason: &str| {
            Err(Error::ParameterOutOfRange {
                name,
                value,
                reason: reason.to_string(),
            })
        };
        let level_cap = space.min_cutoff().saturating_sub(3);
        match *self {
            StateSpec::TwoPhotonTheta { theta } | StateSpec::SinglePhotonTheta { theta } => {
                if !(0.0..TAU).contains(&theta) {
                    return out_of_range("theta", theta, "expected [0, 2π)");
                }
            }
            StateSpec::Noon { n, theta } => {
                if n == 0 || n > level_cap {
                    return out_of_range("n", n as f64, &format!("expected 1..={level_cap}"));
                }
                if !theta.is_finite() {
                    return out_of_range("theta", theta, "must be finite");
                }
            }
            StateSpec::Tmsv { r } => {
                if !(0.0..=0.8).contains(&r) {
                    return out_of_range("r", r, "expected [0, 0.8]");
                }
            }
            StateSpec::FockProduct { n_a, n_b } => {
                if n_a + 3 > space.cutoff_a() {
                    return out_of_range("n_a", n_a as f64, "expected n_a <= cutoff_a - 3");
                }
                if n_b + 3 > space.cutoff_b() {
                    return out_of_range("n_b", n_b as f64, "expected n_b <= cutoff_b - 3");
                }
            }
            StateSpec::CoherentProduct { alpha, beta } => {
                for (name, v) in [("alpha", alpha), ("beta", beta)] {
                    if !(v.abs() <= 2.0) {
                        return out_of_range(name, v, "expected |value| <= 2");
                    }
                }
                if space.min_cutoff() < 16 {
                    return out_of_range("cutoff", space.min_cutoff() as f64, "coherent states need cutoff >= 16");
                }
            }
            StateSpec::MixedProduct { ref components } => {
                if components.is_empty() {
                    return out_of_range("components", 0.0, "mixture needs at least one component");
                }
                for c in components {
                    if !(c.weight >= 0.0) {
                        return out_of_range("weight", c.weight, "weights must be non-negative");
                    }
                    if c.n_a + 3 > space.cutoff_a() || c.n_b + 3 > space.cutoff_b() {
                        return out_of_range("n_a", c.n_a.max(c.n_b) as f64, "levels must be <= cutoff - 3");
                    }
                }
                if !(components.iter().map(|c| c.weight).sum::<f64>() > 0.0) {
                    return out_of_range("weight", 0.0, "weights must not all vanish");
                }
            }
        }
        Ok(())
    }
}

/// Builds the state with the default guard tolerance.
pub fn realize(spec: &StateSpec, space: FockSpace) -> Result<QuantumState> {
    realize_with_guard(spec, space, DEFAULT_GUARD_TOL)
}

/// Builds the state and rejects it when the population in the guarded top
/// levels exceeds `guard_tol`. Truncated families are renormalized and the
/// dropped mass is recorded on the state.
pub fn realize_with_guard(spec: &StateSpec, space: FockSpace, guard_tol: f64) -> Result<QuantumState> {
    spec.validate(space)?;
    let re = |x: f64| C64::new(x, 0.0);
    let state = match spec {
        StateSpec::TwoPhotonTheta { theta } => {
            QuantumState::pure_state(space, [((2, 0), re(theta.cos())), ((0, 2), C64::new(0.0, theta.sin()))])?
        }
        StateSpec::SinglePhotonTheta { theta } => {
            QuantumState::pure_state(space, [((1, 0), re(theta.cos())), ((0, 1), re(theta.sin()))])?
        }
        StateSpec::Noon { n, theta } => {
            QuantumState::pure_state(space, [((*n, 0), re(1.0)), ((0, *n), C64::from_polar(1.0, *theta))])?
        }
        StateSpec::Tmsv { r } => {
            let (t, c) = (r.tanh(), r.cosh());
            let levels = space.min_cutoff();
            let amps: Vec<_> = (0..levels).map(|n| ((n, n), re(t.powi(n as i32) / c))).collect();
            let kept: f64 = amps.iter().map(|(_, a)| a.norm_sqr()).sum();
            QuantumState::pure_state(space, amps)?.with_discarded_mass((1.0 - kept).max(0.0))
        }
        StateSpec::FockProduct { n_a, n_b } => QuantumState::pure_state(space, [((*n_a, *n_b), re(1.0))])?,
        StateSpec::CoherentProduct { alpha, beta } => {
            let a = coherent_amplitudes(*alpha, space.cutoff_a());
            let b = coherent_amplitudes(*beta, space.cutoff_b());
            let kept = a.iter().map(|x| x * x).sum::<f64>() * b.iter().map(|x| x * x).sum::<f64>();
            let psi = CVector::from_fn(space.dim(), |i, _| {
                let (na, nb) = space.levels(i);
                re(a[na] * b[nb])
            });
            QuantumState::from_amplitudes(space, psi)?.with_discarded_mass((1.0 - kept).max(0.0))
        }
        StateSpec::MixedProduct { components } => {
            let parts = components
                .iter()
                .map(|c| Ok((c.weight, QuantumState::pure_state(space, [((c.n_a, c.n_b), re(1.0))])?)))
                .collect::<Result<Vec<_>>>()?;
            QuantumState::mixture(&parts)?
        }
    };
    let tail = state.tail_mass(state.tail_guard())?;
    if tail > guard_tol {
        return Err(Error::InsufficientCutoff {
            tail,
            tolerance: guard_tol,
        });
    }
    Ok(state)
}

/// `e^{-α²/2} αⁿ / √n!` for `n < levels`.
fn coherent_amplitudes(alpha: f64, levels: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(levels);
    let mut amp = (-alpha * alpha / 2.0).exp();
    for n in 0..levels {
        if n > 0 {
            amp *= alpha / (n as f64).sqrt();
        }
        out.push(amp);
    }
    out
}

fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Highest level used by the random corpora: at most 2, and never inside the
/// guarded top levels.
fn corpus_max_level(space: FockSpace) -> usize {
    2.min(space.min_cutoff() - 1 - space.default_tail_guard())
}

/// Deterministic list of random separable mixtures: 2–5 components, each a
/// product of random single-mode superpositions over levels `0..=2`.
pub fn catalog_separable_suite(space: FockSpace, count: usize, seed: u64) -> Result<Vec<QuantumState>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = corpus_max_level(space);
    (0..count)
        .map(|_| {
            let parts = rng.gen_range(2..=5);
            let components = (0..parts)
                .map(|_| {
                    let a: Vec<C64> = (0..=top).map(|_| random_complex(&mut rng)).collect();
                    let b: Vec<C64> = (0..=top).map(|_| random_complex(&mut rng)).collect();
                    let mut psi = CVector::zeros(space.dim());
                    for (na, za) in a.iter().enumerate() {
                        for (nb, zb) in b.iter().enumerate() {
                            psi[space.index(na, nb)] = za * zb;
                        }
                    }
                    let weight = rng.gen_range(0.05..1.0);
                    Ok((weight, QuantumState::from_amplitudes(space, psi)?))
                })
                .collect::<Result<Vec<_>>>()?;
            QuantumState::mixture(&components)
        })
        .collect()
}

/// Random mixed state of the given rank whose support lies on levels
/// `0..=max_level` in both modes. Generally entangled.
pub fn random_mixed_state<R: Rng>(
    space: FockSpace,
    max_level: usize,
    rank: usize,
    rng: &mut R,
) -> Result<QuantumState> {
    if max_level >= space.min_cutoff() {
        return Err(Error::ParameterOutOfRange {
            name: "max_level",
            value: max_level as f64,
            reason: "must be below both cutoffs".into(),
        });
    }
    let components = (0..rank.max(1))
        .map(|_| {
            let mut psi = CVector::zeros(space.dim());
            for na in 0..=max_level {
                for nb in 0..=max_level {
                    psi[space.index(na, nb)] = random_complex(rng);
                }
            }
            Ok((rng.gen_range(0.05..1.0), QuantumState::from_amplitudes(space, psi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    QuantumState::mixture(&components)
}

/// Seeded corpus of random guard-clean (generally entangled) mixed states.
pub fn random_state_suite(space: FockSpace, count: usize, seed: u64) -> Result<Vec<QuantumState>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = space.min_cutoff() - 1 - space.default_tail_guard();
    (0..count)
        .map(|_| {
            let rank = rng.gen_range(1..=3);
            random_mixed_state(space, top, rank, &mut rng)
        })
        .collect()
}
