//! Schwinger two-boson representations of su(2) and su(1,1).

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fock::{monomial, CMatrix, FockSpace, Operator};

/// `Jx, Jy, Jz`, `Kx, Ky, Kz` and `N+` on one space.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub jx: Operator,
    pub jy: Operator,
    pub jz: Operator,
    pub kx: Operator,
    pub ky: Operator,
    pub kz: Operator,
    pub n_plus: Operator,
    space: FockSpace,
}

impl OperatorSet {
    pub fn new(space: FockSpace) -> Result<Self> {
        let half = C64::new(0.5, 0.0);
        let half_over_i = C64::new(0.0, -0.5);
        let mat = |powers| monomial(space, powers).into_matrix();

        let ad_b = mat([1, 0, 0, 1]);
        let a_bd = mat([0, 1, 1, 0]);
        let ad_bd = mat([1, 0, 1, 0]);
        let a_b = mat([0, 1, 0, 1]);
        let n_a = mat([1, 1, 0, 0]);
        let n_b = mat([0, 0, 1, 1]);
        let identity = CMatrix::identity(space.dim(), space.dim());

        let herm = |m: CMatrix, label: &str| Operator::hermitian(space, m, label);
        Ok(Self {
            jx: herm((&ad_b + &a_bd) * half, "Jx")?,
            jy: herm((&ad_b - &a_bd) * half_over_i, "Jy")?,
            jz: herm((&n_a - &n_b) * half, "Jz")?,
            kx: herm((&ad_bd + &a_b) * half, "Kx")?,
            ky: herm((&ad_bd - &a_b) * half_over_i, "Ky")?,
            kz: herm((&n_a + &n_b + &identity) * half, "Kz")?,
            n_plus: herm(n_a + n_b, "N+")?,
            space,
        })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    /// Max-magnitude element of each commutation-relation residual, restricted
    /// to rows and columns with `n_a <= cutoff_a - 1 - guard` and
    /// `n_b <= cutoff_b - 1 - guard`. Guard 0 inspects the whole space.
    pub fn commutator_residuals(&self, guard: usize) -> Result<BTreeMap<String, f64>> {
        self.space.check_guard(guard)?;
        let i = C64::new(0.0, 1.0);
        let relations: [(&str, &Operator, &Operator, C64, &Operator); 6] = [
            ("[Jx,Jy]-iJz", &self.jx, &self.jy, i, &self.jz),
            ("[Jy,Jz]-iJx", &self.jy, &self.jz, i, &self.jx),
            ("[Jz,Jx]-iJy", &self.jz, &self.jx, i, &self.jy),
            ("[Kx,Ky]+iKz", &self.kx, &self.ky, -i, &self.kz),
            ("[Ky,Kz]-iKx", &self.ky, &self.kz, i, &self.kx),
            ("[Kz,Kx]-iKy", &self.kz, &self.kx, i, &self.ky),
        ];
        let guarded: Vec<usize> = self
            .space
            .basis()
            .enumerate()
            .filter(|&(_, (na, nb))| self.space.is_guarded(na, nb, guard))
            .map(|(idx, _)| idx)
            .collect();
        let mut out = BTreeMap::new();
        for (name, lhs, rhs, coeff, result) in relations {
            let residual = lhs.commutator(rhs)?.into_matrix() - result.matrix() * coeff;
            out.insert(name.to_string(), restricted_max(&residual, &guarded));
        }
        Ok(out)
    }
}

/// Free-function form of [`OperatorSet::new`].
pub fn build_operator_set(space: FockSpace) -> Result<OperatorSet> {
    OperatorSet::new(space)
}

pub fn commutator_residual(set: &OperatorSet, guard: usize) -> Result<BTreeMap<String, f64>> {
    set.commutator_residuals(guard)
}

pub(crate) fn restricted_max(m: &CMatrix, indices: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for &r in indices {
        for &c in indices {
            worst = worst.max(m[(r, c)].norm());
        }
    }
    worst
}
