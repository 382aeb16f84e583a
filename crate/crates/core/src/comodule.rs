//! Right comodule *-algebras: an algebra with a coaction `Φ: A → A ⊗ H`.

use std::sync::Arc;

use crate::algebra::{simple_tensor, tensor_algebra_mul, tensor_algebra_star, FiniteAlgebra, Outcome};
use crate::corep::Corep;
use crate::error::{Error, Result};
use crate::hopf::HopfAlgebra;
use crate::linalg::{axpy, unit_vec, vec_is_zero, zero_vec, Matrix, Vector};
use crate::scalar::CycScalar;

#[derive(Clone, Debug)]
pub struct ComoduleAlgebra {
    pub algebra: FiniteAlgebra,
    pub hopf: Arc<HopfAlgebra>,
    /// coaction of each basis element, indexed `b * dim(H) + h`
    coaction: Vec<Vector>,
}

impl ComoduleAlgebra {
    pub fn new(algebra: FiniteAlgebra, hopf: Arc<HopfAlgebra>, coaction: Vec<Vector>) -> Result<Self> {
        let need = algebra.dim() * hopf.dim();
        if coaction.len() != algebra.dim() || coaction.iter().any(|c| c.len() != need) {
            return Err(Error::Dimension("coaction has the wrong shape".into()));
        }
        Ok(ComoduleAlgebra { algebra, hopf, coaction })
    }

    /// The Hopf algebra coacting on itself by its coproduct.
    pub fn regular(hopf: Arc<HopfAlgebra>) -> Self {
        let n = hopf.dim();
        let coaction = (0..n).map(|i| hopf.coproduct(&unit_vec(n, i))).collect();
        ComoduleAlgebra { algebra: hopf.algebra.clone(), hopf, coaction }
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn coact(&self, x: &[CycScalar]) -> Vector {
        let mut out = zero_vec(self.dim() * self.hopf.dim());
        for (a, xa) in x.iter().enumerate() {
            axpy(&mut out, xa, &self.coaction[a]);
        }
        out
    }

    /// The coaction as a corepresentation on the underlying vector space.
    pub fn as_corep(&self) -> Corep {
        let n = self.hopf.dim();
        Corep::from_fn(self.hopf.clone(), "Φ", self.dim(), |b, a| (0..n).map(|h| self.coaction[a][b * n + h].clone()).collect())
    }

    /// Basis of the fixed-point subalgebra `{x : Φ(x) = x ⊗ 1}`.
    pub fn invariants(&self) -> Vec<Vector> {
        let (m, n) = (self.dim(), self.hopf.dim());
        let cols: Vec<Vector> = (0..m)
            .map(|a| {
                let mut c = self.coaction[a].clone();
                let t = simple_tensor(&unit_vec(m, a), self.hopf.unit());
                for (x, y) in c.iter_mut().zip(&t) {
                    *x = &*x - y;
                }
                c
            })
            .collect();
        Matrix::from_cols(m * n, &cols).kernel()
    }

    pub fn check_algebra_map(&self) -> Outcome {
        let m = self.dim();
        let h = &self.hopf.algebra;
        if self.coact(self.algebra.unit()) != simple_tensor(self.algebra.unit(), self.hopf.unit()) {
            return Err("Φ(1) != 1 ⊗ 1".into());
        }
        for a in 0..m {
            for b in 0..m {
                let lhs = self.coact(&self.algebra.mul(&unit_vec(m, a), &unit_vec(m, b)));
                let rhs = tensor_algebra_mul(&self.algebra, h, &self.coaction[a], &self.coaction[b]);
                if lhs != rhs {
                    return Err(format!("Φ({} {}) != Φ({}) Φ({})", self.algebra.labels[a], self.algebra.labels[b], self.algebra.labels[a], self.algebra.labels[b]));
                }
            }
        }
        Ok(())
    }

    pub fn check_star_map(&self) -> Outcome {
        let m = self.dim();
        for a in 0..m {
            let lhs = self.coact(&self.algebra.star(&unit_vec(m, a)));
            let rhs = tensor_algebra_star(&self.algebra, &self.hopf.algebra, &self.coaction[a]);
            if lhs != rhs {
                return Err(format!("Φ({0}*) != Φ({0})*", self.algebra.labels[a]));
            }
        }
        Ok(())
    }

    /// `(Φ ⊗ id)Φ = (id ⊗ Δ)Φ` and `(id ⊗ ε)Φ = id`.
    pub fn check_coaction(&self) -> Outcome {
        let (m, n) = (self.dim(), self.hopf.dim());
        for a in 0..m {
            let phi = &self.coaction[a];
            let mut lhs = zero_vec(m * n * n);
            let mut rhs = zero_vec(m * n * n);
            let mut counit = zero_vec(m);
            for (p, c) in phi.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (b, h) = (p / n, p % n);
                // (Φ ⊗ id): Φ(x_b) ⊗ x_h
                axpy(&mut lhs, c, &simple_tensor(&self.coaction[b], &unit_vec(n, h)));
                axpy(&mut rhs, c, &simple_tensor(&unit_vec(m, b), &self.hopf.coproduct(&unit_vec(n, h))));
                let e = &self.hopf.counit_vector()[h];
                counit[b] = &counit[b] + &(c * e);
            }
            if lhs != rhs {
                return Err(format!("coaction is not coassociative on {}", self.algebra.labels[a]));
            }
            if counit != unit_vec(m, a) {
                return Err(format!("counit law fails on {}", self.algebra.labels[a]));
            }
        }
        Ok(())
    }

    /// All comodule *-algebra axioms, including the underlying algebra.
    pub fn check_all(&self) -> Vec<(&'static str, Outcome)> {
        vec![
            ("total algebra axioms", self.algebra.check_all()),
            ("coaction is a corepresentation", self.check_coaction()),
            ("coaction is an algebra map", self.check_algebra_map()),
            ("coaction is a *-map", self.check_star_map()),
        ]
    }

    pub fn is_invariant(&self, x: &[CycScalar]) -> bool {
        let t = simple_tensor(x, self.hopf.unit());
        let c = self.coact(x);
        vec_is_zero(&crate::linalg::vec_sub(&c, &t))
    }
}

/// Applies `f ⊗ id_H` to an element of `A ⊗ H` where `f: A → B` has the given matrix.
pub fn map_first_leg(f: &Matrix, t: &[CycScalar], n: usize) -> Vector {
    let (rows, cols) = (f.rows(), f.cols());
    let mut out = zero_vec(rows * n);
    for a in 0..cols {
        for h in 0..n {
            let c = &t[a * n + h];
            if c.is_zero() {
                continue;
            }
            for b in 0..rows {
                let fa = &f[(b, a)];
                if !fa.is_zero() {
                    out[b * n + h] = &out[b * n + h] + &(c * fa);
                }
            }
        }
    }
    out
}
