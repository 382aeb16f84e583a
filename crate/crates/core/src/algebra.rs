//! Finite-dimensional (graded) *-algebras given by structure constants.

use crate::expr::ExprContext;
use crate::linalg::{axpy, unit_vec, vec_is_zero, zero_vec, Matrix, Vector};
use crate::scalar::CycScalar;

/// Sparse vector: list of `(index, coefficient)` with nonzero coefficients.
pub type Sparse = Vec<(usize, CycScalar)>;

pub fn to_sparse(v: &[CycScalar]) -> Sparse {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn from_sparse(dim: usize, s: &Sparse) -> Vector {
    let mut v = zero_vec(dim);
    for (i, c) in s {
        v[*i] = &v[*i] + c;
    }
    v
}

/// Outcome of a single structural check: `Err` carries a witness.
pub type Outcome = std::result::Result<(), String>;

/// An associative *-algebra with a basis, optionally graded. Products whose
/// degree exceeds the largest basis degree vanish (truncation).
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    pub labels: Vec<String>,
    pub degrees: Vec<usize>,
    products: Vec<Sparse>,
    unit: Vector,
    stars: Vec<Sparse>,
}

impl FiniteAlgebra {
    /// `product(i, j)` gives the product of basis elements `i` and `j`.
    pub fn new(
        labels: Vec<String>,
        degrees: Vec<usize>,
        product: impl Fn(usize, usize) -> Vector,
        unit: Vector,
        star: impl Fn(usize) -> Vector,
    ) -> Self {
        let n = labels.len();
        assert_eq!(degrees.len(), n);
        let mut products = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let p = product(i, j);
                assert_eq!(p.len(), n, "product vector length");
                products.push(to_sparse(&p));
            }
        }
        let stars = (0..n).map(|i| to_sparse(&star(i))).collect();
        FiniteAlgebra { labels, degrees, products, unit, stars }
    }

    pub fn ungraded(
        labels: Vec<String>,
        product: impl Fn(usize, usize) -> Vector,
        unit: Vector,
        star: impl Fn(usize) -> Vector,
    ) -> Self {
        let n = labels.len();
        Self::new(labels, vec![0; n], product, unit, star)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn basis(&self, i: usize) -> Vector {
        unit_vec(self.dim(), i)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Basis indices of the homogeneous component of degree `k`.
    pub fn component(&self, k: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == k).collect()
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &Sparse {
        &self.products[i * self.dim() + j]
    }

    pub fn mul(&self, a: &[CycScalar], b: &[CycScalar]) -> Vector {
        let n = self.dim();
        let mut out = zero_vec(n);
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let c = ai * bj;
                for (k, s) in &self.products[i * n + j] {
                    out[*k] = &out[*k] + &(&c * s);
                }
            }
        }
        out
    }

    pub fn star(&self, a: &[CycScalar]) -> Vector {
        let mut out = zero_vec(self.dim());
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let c = ai.conj();
            for (k, s) in &self.stars[i] {
                out[*k] = &out[*k] + &(&c * s);
            }
        }
        out
    }

    /// Matrix of left multiplication by `a`.
    pub fn left_mul_matrix(&self, a: &[CycScalar]) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n).map(|j| self.mul(a, &self.basis(j))).collect();
        Matrix::from_cols(n, &cols)
    }

    /// Matrix of right multiplication by `a`.
    pub fn right_mul_matrix(&self, a: &[CycScalar]) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n).map(|j| self.mul(&self.basis(j), a)).collect();
        Matrix::from_cols(n, &cols)
    }

    /// Degree of a homogeneous vector, `None` for zero or mixed vectors.
    pub fn degree_of(&self, v: &[CycScalar]) -> Option<usize> {
        let mut d = None;
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match d {
                None => d = Some(self.degrees[i]),
                Some(e) if e != self.degrees[i] => return None,
                _ => {}
            }
        }
        d
    }

    pub fn check_associative(&self) -> Outcome {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let ij = from_sparse(n, &self.products[i * n + j]);
                for k in 0..n {
                    let lhs = self.mul(&ij, &self.basis(k));
                    let jk = from_sparse(n, &self.products[j * n + k]);
                    let rhs = self.mul(&self.basis(i), &jk);
                    if lhs != rhs {
                        return Err(format!(
                            "({} {}) {} != {} ({} {})",
                            self.labels[i], self.labels[j], self.labels[k], self.labels[i], self.labels[j], self.labels[k]
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_unit(&self) -> Outcome {
        for i in 0..self.dim() {
            let b = self.basis(i);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                return Err(format!("unit fails on {}", self.labels[i]));
            }
        }
        Ok(())
    }

    pub fn check_grading(&self) -> Outcome {
        let top = self.max_degree();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let d = self.degrees[i] + self.degrees[j];
                for (k, _) in &self.products[i * n + j] {
                    if d > top || self.degrees[*k] != d {
                        return Err(format!("{} {} leaves degree {d}", self.labels[i], self.labels[j]));
                    }
                }
            }
            for (k, _) in &self.stars[i] {
                if self.degrees[*k] != self.degrees[i] {
                    return Err(format!("star of {} changes degree", self.labels[i]));
                }
            }
        }
        if self.unit.iter().enumerate().any(|(i, x)| !x.is_zero() && self.degrees[i] != 0) {
            return Err("unit is not of degree 0".into());
        }
        Ok(())
    }

    /// Involutivity and graded anti-multiplicativity of the star.
    pub fn check_star(&self) -> Outcome {
        let n = self.dim();
        for i in 0..n {
            let b = self.basis(i);
            if self.star(&self.star(&b)) != b {
                return Err(format!("star is not involutive on {}", self.labels[i]));
            }
        }
        for i in 0..n {
            let si = self.star(&self.basis(i));
            for j in 0..n {
                let sj = self.star(&self.basis(j));
                let lhs = self.star(&from_sparse(n, &self.products[i * n + j]));
                let mut rhs = self.mul(&sj, &si);
                if (self.degrees[i] * self.degrees[j]) % 2 == 1 {
                    rhs = rhs.iter().map(|x| -x).collect();
                }
                if lhs != rhs {
                    return Err(format!("(x y)* mismatch for x={}, y={}", self.labels[i], self.labels[j]));
                }
            }
        }
        Ok(())
    }

    /// All algebra axioms at once.
    pub fn check_all(&self) -> Outcome {
        self.check_grading()?;
        self.check_associative()?;
        self.check_unit()?;
        self.check_star()
    }

    /// Checks a graded derivation `d` (matrix of degree +1) with `d² = 0`,
    /// graded Leibniz and `d(x*) = d(x)*`.
    pub fn check_differential(&self, d: &Matrix) -> Outcome {
        let n = self.dim();
        let top = self.max_degree();
        for i in 0..n {
            let di = d.col(i);
            if !vec_is_zero(&di) && self.degree_of(&di) != Some(self.degrees[i] + 1) {
                return Err(format!("d({}) is not of degree {}", self.labels[i], self.degrees[i] + 1));
            }
            if !vec_is_zero(&d.mul_vec(&di)) {
                return Err(format!("d² != 0 on {}", self.labels[i]));
            }
            if self.degrees[i] < top && d.mul_vec(&self.star(&self.basis(i))) != self.star(&di) {
                return Err(format!("d does not commute with * on {}", self.labels[i]));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.degrees[i] + self.degrees[j] >= top {
                    continue;
                }
                let lhs = d.mul_vec(&from_sparse(n, &self.products[i * n + j]));
                let mut rhs = self.mul(&d.col(i), &self.basis(j));
                let second = self.mul(&self.basis(i), &d.col(j));
                if self.degrees[i] % 2 == 0 {
                    axpy(&mut rhs, &CycScalar::one(), &second);
                } else {
                    axpy(&mut rhs, &CycScalar::from_int(-1), &second);
                }
                if lhs != rhs {
                    return Err(format!("Leibniz fails on {} {}", self.labels[i], self.labels[j]));
                }
            }
        }
        Ok(())
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }
}

/// Expression context resolving labels of an algebra.
pub struct AlgebraContext<'a> {
    pub algebra: &'a FiniteAlgebra,
    pub conductor: u32,
}

impl ExprContext for AlgebraContext<'_> {
    fn conductor(&self) -> u32 {
        self.conductor
    }
    fn lookup(&self, name: &str) -> Option<Vector> {
        self.algebra.label_index(name).map(|i| self.algebra.basis(i))
    }
    fn multiply(&self, a: &[CycScalar], b: &[CycScalar]) -> Option<Vector> {
        Some(self.algebra.mul(a, b))
    }
    fn unit(&self) -> Option<Vector> {
        Some(self.algebra.unit().clone())
    }
}

/// Elements of `A ⊗ B` are stored as vectors indexed by `i * dim_b + j`.
pub fn tensor_index(i: usize, j: usize, dim_b: usize) -> usize {
    i * dim_b + j
}

pub fn simple_tensor(a: &[CycScalar], b: &[CycScalar]) -> Vector {
    let mut out = zero_vec(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i * b.len() + j] = x * y;
            }
        }
    }
    out
}

/// Product in `A ⊗ B` of two elements stored with [`tensor_index`].
pub fn tensor_algebra_mul(a: &FiniteAlgebra, b: &FiniteAlgebra, x: &[CycScalar], y: &[CycScalar]) -> Vector {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = zero_vec(na * nb);
    for (p, xp) in x.iter().enumerate() {
        if xp.is_zero() {
            continue;
        }
        for (q, yq) in y.iter().enumerate() {
            if yq.is_zero() {
                continue;
            }
            let c = xp * yq;
            let left = a.basis_product(p / nb, q / nb);
            let right = b.basis_product(p % nb, q % nb);
            for (i, u) in left {
                let cu = &c * u;
                for (j, v) in right {
                    out[i * nb + j] = &out[i * nb + j] + &(&cu * v);
                }
            }
        }
    }
    out
}

/// `(* ⊗ *)` on `A ⊗ B` (antilinear).
pub fn tensor_algebra_star(a: &FiniteAlgebra, b: &FiniteAlgebra, x: &[CycScalar]) -> Vector {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = zero_vec(na * nb);
    for (p, xp) in x.iter().enumerate() {
        if xp.is_zero() {
            continue;
        }
        let t = simple_tensor(&a.star(&a.basis(p / nb)), &b.star(&b.basis(p % nb)));
        axpy(&mut out, &xp.conj(), &t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_algebra_2() -> FiniteAlgebra {
        // E_ij with E_ij E_kl = δ_jk E_il, index 2i + j
        let labels = ["E11", "E12", "E21", "E22"].iter().map(|s| s.to_string()).collect();
        FiniteAlgebra::ungraded(
            labels,
            |a, b| {
                let (i, j, k, l) = (a / 2, a % 2, b / 2, b % 2);
                if j == k {
                    unit_vec(4, 2 * i + l)
                } else {
                    zero_vec(4)
                }
            },
            vec![CycScalar::one(), CycScalar::zero(), CycScalar::zero(), CycScalar::one()],
            |a| unit_vec(4, 2 * (a % 2) + a / 2),
        )
    }

    #[test]
    fn matrix_algebra_is_a_star_algebra() {
        let m = matrix_algebra_2();
        assert_eq!(m.check_all(), Ok(()));
    }

    #[test]
    fn broken_star_is_detected() {
        let labels = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let m = FiniteAlgebra::ungraded(
            labels,
            |i, j| if i == j { unit_vec(2, i) } else { zero_vec(2) },
            vec![CycScalar::one(), CycScalar::one()],
            |i| unit_vec(2, 1 - i),
        );
        assert!(m.check_associative().is_ok());
        // swapping the two projections is an involutive automorphism, hence not anti-multiplicative only if noncommutative
        assert!(m.check_star().is_ok());
        let m2 = FiniteAlgebra::ungraded(
            m.labels.clone(),
            |i, j| if i == j { unit_vec(2, i) } else { zero_vec(2) },
            vec![CycScalar::one(), CycScalar::one()],
            |i| vec_scale_int(&unit_vec(2, i), 2),
        );
        assert!(m2.check_star().is_err());
    }

    fn vec_scale_int(v: &[CycScalar], k: i64) -> Vector {
        v.iter().map(|x| x * &CycScalar::from_int(k)).collect()
    }
}
