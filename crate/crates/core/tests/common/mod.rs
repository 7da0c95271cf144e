//! Independent dense-matrix oracle: ladder operators assembled from
//! Kronecker products of single-mode matrices, moments from explicit traces.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type M = DMatrix<C64>;

pub fn lower(levels: usize) -> M {
    DMatrix::from_fn(levels, levels, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub struct Oracle {
    pub a: M,
    pub b: M,
    pub dim: usize,
}

impl Oracle {
    pub fn new(ca: usize, cb: usize) -> Self {
        let a = lower(ca).kronecker(&M::identity(cb, cb));
        let b = M::identity(ca, ca).kronecker(&lower(cb));
        Self { a, b, dim: ca * cb }
    }

    pub fn jx(&self) -> M {
        (self.a.adjoint() * &self.b + &self.a * self.b.adjoint()) * C64::new(0.5, 0.0)
    }

    pub fn jy(&self) -> M {
        (self.a.adjoint() * &self.b - &self.a * self.b.adjoint()) * C64::new(0.0, -0.5)
    }

    pub fn n_plus(&self) -> M {
        self.a.adjoint() * &self.a + self.b.adjoint() * &self.b
    }

    /// `[mean_jx, mean_jy, var_jx, var_jy, cov_xy, mean_n]` from a density matrix.
    pub fn record(&self, rho: &M) -> [f64; 6] {
        let ev = |op: &M| (rho * op).trace().re;
        let (x, y) = (self.jx(), self.jy());
        let (mx, my) = (ev(&x), ev(&y));
        let sym = (&x * &y + &y * &x) * C64::new(0.5, 0.0);
        [
            mx,
            my,
            ev(&(&x * &x)) - mx * mx,
            ev(&(&y * &y)) - my * my,
            ev(&sym) - mx * my,
            ev(&self.n_plus()),
        ]
    }
}

pub fn w9(r: &[f64; 6]) -> f64 {
    (0.25 + r[2]) * (0.25 + r[3]) - (1.0 + r[5]).powi(2) / 16.0
}

pub fn w12(r: &[f64; 6]) -> f64 {
    w9(r) - r[4] * r[4]
}

pub fn pure_density(psi: &[C64]) -> M {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}
