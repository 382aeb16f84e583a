//! Dense exact linear algebra over cyclotomic fields.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::CycScalar;

pub type Vector = Vec<CycScalar>;

pub fn zero_vec(n: usize) -> Vector {
    vec![CycScalar::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = CycScalar::one();
    v
}

pub fn vec_is_zero(v: &[CycScalar]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn vec_add(a: &[CycScalar], b: &[CycScalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[CycScalar], b: &[CycScalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[CycScalar], s: &CycScalar) -> Vector {
    a.iter().map(|x| x * s).collect()
}

pub fn vec_conj(a: &[CycScalar]) -> Vector {
    a.iter().map(|x| x.conj()).collect()
}

/// `acc += s * v`
pub fn axpy(acc: &mut [CycScalar], s: &CycScalar, v: &[CycScalar]) {
    if s.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a = &*a + &(s * x);
        }
    }
}

/// Whether the map is complex-linear (even) or antilinear (odd).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_degree(d: u8) -> Self {
        if d % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
    pub fn degree(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
    pub fn compose(self, other: Parity) -> Parity {
        Parity::from_degree(self.degree() + other.degree())
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<CycScalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = CycScalar;
    fn index(&self, (i, j): (usize, usize)) -> &CycScalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CycScalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

/// Solution set of an affine system `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum AffineSolution {
    Solved { particular: Vector, kernel: Vec<Vector> },
    Infeasible,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![CycScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = CycScalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Columns given as vectors of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> CycScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| CycScalar::from_int(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[CycScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn cols_vec(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[CycScalar]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = x.clone();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn conj(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: &CycScalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch in add");
        Matrix { rows: self.rows, cols: self.cols, data: vec_add(&self.data, &o.data) }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch in sub");
        Matrix { rows: self.rows, cols: self.cols, data: vec_sub(&self.data, &o.data) }
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "shape mismatch in mul");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[CycScalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        let mut out = zero_vec(self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = CycScalar::zero();
            for (a, x) in self.row(i).iter().zip(v) {
                if !a.is_zero() && !x.is_zero() {
                    acc = acc + a * x;
                }
            }
            *o = acc;
        }
        out
    }

    /// Kronecker product; index `(i, j)` of the factors maps to `i * dim2 + j`.
    pub fn kron(&self, o: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            let a = &self[(i / o.rows, j / o.cols)];
            if a.is_zero() {
                CycScalar::zero()
            } else {
                a * &o[(i % o.rows, j % o.cols)]
            }
        })
    }

    pub fn hstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows, "row mismatch in hstack");
        Matrix::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                o[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.cols, "column mismatch in vstack");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)].clone()
            } else if i >= self.rows && j >= self.cols {
                o[(i - self.rows, j - self.cols)].clone()
            } else {
                CycScalar::zero()
            }
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn trace(&self) -> CycScalar {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    /// Fraction-free (Bareiss) forward elimination. Returns the echelon form,
    /// the pivot columns and the sign of the row permutation.
    pub fn bareiss(&self) -> (Matrix, Vec<usize>, bool) {
        let mut a = self.clone();
        let mut prev = CycScalar::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        let mut odd = false;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                a.swap_rows(p, r);
                odd = !odd;
            }
            let piv = a[(r, c)].clone();
            for i in r + 1..a.rows {
                let f = a[(i, c)].clone();
                for j in c + 1..a.cols {
                    let v = &(&piv * &a[(i, j)]) - &(&f * &a[(r, j)]);
                    a[(i, j)] = if prev.is_one() { v } else { &v / &prev };
                }
                a[(i, c)] = CycScalar::zero();
            }
            prev = piv;
            pivots.push(c);
            r += 1;
        }
        (a, pivots, odd)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.bareiss().1.len()
    }

    pub fn determinant(&self) -> Result<CycScalar> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("determinant of {}x{} matrix", self.rows, self.cols)));
        }
        if self.rows == 0 {
            return Ok(CycScalar::one());
        }
        let (e, pivots, odd) = self.bareiss();
        if pivots.len() < self.rows {
            return Ok(CycScalar::zero());
        }
        let d = e[(self.rows - 1, self.cols - 1)].clone();
        Ok(if odd { -d } else { d })
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Rref {
        let (mut a, pivots, _) = self.bareiss();
        for (r, &c) in pivots.iter().enumerate().rev() {
            let inv = a[(r, c)].inv().expect("pivot is nonzero");
            for j in c..a.cols {
                if !a[(r, j)].is_zero() {
                    a[(r, j)] = &a[(r, j)] * &inv;
                }
            }
            for i in 0..r {
                let f = a[(i, c)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..a.cols {
                    if !a[(r, j)].is_zero() {
                        a[(i, j)] = &a[(i, j)] - &(&f * &a[(r, j)]);
                    }
                }
            }
        }
        a.data.truncate(pivots.len() * a.cols);
        a.rows = pivots.len();
        Rref { matrix: a, pivots }
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let Rref { matrix: r, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = zero_vec(self.cols);
            v[f] = CycScalar::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(row, f)];
            }
            basis.push(v);
        }
        basis
    }

    pub fn solve_affine(&self, b: &[CycScalar]) -> AffineSolution {
        assert_eq!(b.len(), self.rows, "rhs length");
        let aug = self.hstack(&Matrix::from_cols(self.rows, &[b.to_vec()]));
        let Rref { matrix: r, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return AffineSolution::Infeasible;
        }
        let mut particular = zero_vec(self.cols);
        for (row, &p) in pivots.iter().enumerate() {
            particular[p] = r[(row, self.cols)].clone();
        }
        AffineSolution::Solved { particular, kernel: self.kernel() }
    }

    /// Unique solution of `A x = b`, if any.
    pub fn solve_unique(&self, b: &[CycScalar]) -> Option<Vector> {
        match self.solve_affine(b) {
            AffineSolution::Solved { particular, kernel } if kernel.is_empty() => Some(particular),
            _ => None,
        }
    }

    /// Some solution of `A x = b`, if any.
    pub fn solve_any(&self, b: &[CycScalar]) -> Option<Vector> {
        match self.solve_affine(b) {
            AffineSolution::Solved { particular, .. } => Some(particular),
            AffineSolution::Infeasible => None,
        }
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(n));
        let Rref { matrix: r, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Row-space basis in reduced form.
    pub fn row_space(&self) -> Vec<Vector> {
        let r = self.rref().matrix;
        (0..r.rows).map(|i| r.row(i).to_vec()).collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.adjoint()
    }

    /// Strict positivity of a Hermitian matrix, decided exactly by the signs
    /// of the leading principal minors.
    pub fn is_strictly_positive(&self) -> Result<bool> {
        if !self.is_hermitian() {
            return Ok(false);
        }
        for k in 1..=self.rows {
            let idx: Vec<usize> = (0..k).collect();
            let minor = self.submatrix(&idx, &idx).determinant()?;
            if minor.real_sign()? <= 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A linear (even) or antilinear (odd) map `v ↦ M·v` resp. `v ↦ M·conj(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub matrix: Matrix,
    pub parity: Parity,
}

impl LinearMap {
    pub fn new(matrix: Matrix, parity: Parity) -> Self {
        LinearMap { matrix, parity }
    }

    pub fn even(matrix: Matrix) -> Self {
        LinearMap { matrix, parity: Parity::Even }
    }

    pub fn odd(matrix: Matrix) -> Self {
        LinearMap { matrix, parity: Parity::Odd }
    }

    pub fn identity(n: usize) -> Self {
        Self::even(Matrix::identity(n))
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[CycScalar]) -> Vector {
        match self.parity {
            Parity::Even => self.matrix.mul_vec(v),
            Parity::Odd => self.matrix.mul_vec(&vec_conj(v)),
        }
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &LinearMap) -> LinearMap {
        let inner = match self.parity {
            Parity::Even => other.matrix.clone(),
            Parity::Odd => other.matrix.conj(),
        };
        LinearMap { matrix: self.matrix.mul(&inner), parity: self.parity.compose(other.parity) }
    }

    pub fn inverse(&self) -> Option<LinearMap> {
        let inv = self.matrix.inverse()?;
        Some(match self.parity {
            Parity::Even => LinearMap::even(inv),
            // v = M conj(w)  =>  w = conj(M^{-1}) conj(v)
            Parity::Odd => LinearMap::odd(inv.conj()),
        })
    }

    pub fn add(&self, o: &LinearMap) -> Result<LinearMap> {
        if self.parity != o.parity {
            return Err(Error::Dimension("adding maps of different parity".into()));
        }
        Ok(LinearMap { matrix: self.matrix.add(&o.matrix), parity: self.parity })
    }
}

/// Quotient `ℂ^n / span(relations)`, with the non-pivot coordinates of the
/// reduced relation matrix as the quotient basis.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub ambient: usize,
    /// `dim × ambient`
    pub projection: Matrix,
    /// `ambient × dim`, a right inverse of the projection
    pub section: Matrix,
    /// basis of the relation subspace
    pub relations: Vec<Vector>,
}

impl Quotient {
    pub fn new(ambient: usize, relations: &[Vector]) -> Self {
        let rel = if relations.is_empty() {
            Rref { matrix: Matrix::zeros(0, ambient), pivots: vec![] }
        } else {
            Matrix::from_rows(relations.to_vec()).rref()
        };
        let mut is_pivot = vec![false; ambient];
        for &p in &rel.pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..ambient).filter(|&j| !is_pivot[j]).collect();
        let mut projection = Matrix::zeros(free.len(), ambient);
        let mut section = Matrix::zeros(ambient, free.len());
        for (q, &f) in free.iter().enumerate() {
            projection[(q, f)] = CycScalar::one();
            section[(f, q)] = CycScalar::one();
            for (row, &p) in rel.pivots.iter().enumerate() {
                let c = &rel.matrix[(row, f)];
                if !c.is_zero() {
                    projection[(q, p)] = -c;
                }
            }
        }
        let relations = (0..rel.matrix.rows()).map(|i| rel.matrix.row(i).to_vec()).collect();
        Quotient { ambient, projection, section, relations }
    }

    pub fn dim(&self) -> usize {
        self.projection.rows()
    }

    pub fn project(&self, v: &[CycScalar]) -> Vector {
        self.projection.mul_vec(v)
    }

    pub fn lift(&self, v: &[CycScalar]) -> Vector {
        self.section.mul_vec(v)
    }
}

/// Incrementally maintained echelon basis of a subspace.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Vector)>,
    originals: Vec<Vector>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    fn reduce(&self, v: &[CycScalar]) -> Vector {
        let mut w = v.to_vec();
        for (p, r) in &self.rows {
            if !w[*p].is_zero() {
                let f = w[*p].clone();
                axpy(&mut w, &-f, r);
            }
        }
        w
    }

    pub fn contains(&self, v: &[CycScalar]) -> bool {
        vec_is_zero(&self.reduce(v))
    }

    /// Adds `v` if it is independent of the current span; returns whether it was added.
    pub fn insert(&mut self, v: &[CycScalar]) -> bool {
        let w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].inv().expect("nonzero pivot");
        let w = vec_scale(&w, &inv);
        for (_, r) in self.rows.iter_mut() {
            if !r[p].is_zero() {
                let f = r[p].clone();
                axpy(r, &-f, &w);
            }
        }
        self.rows.push((p, w));
        self.originals.push(v.to_vec());
        true
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The inserted (independent) vectors, in insertion order.
    pub fn vectors(&self) -> &[Vector] {
        &self.originals
    }
}

/// Basis of a subspace spanned by the given vectors (reduced echelon rows).
pub fn span_basis(dim: usize, vectors: &[Vector]) -> Vec<Vector> {
    if vectors.is_empty() {
        return vec![];
    }
    let _ = dim;
    Matrix::from_rows(vectors.to_vec()).row_space()
}

pub fn span_dim(vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec()).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_rank() {
        let m = Matrix::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(vec_is_zero(&m.mul_vec(&k[0])));
    }

    #[test]
    fn determinant_and_inverse() {
        let m = Matrix::from_ints(&[&[0, 2, 1], &[1, 1, 0], &[3, 0, 1]]);
        assert_eq!(m.determinant().unwrap(), CycScalar::from_int(-5));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        let s = Matrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(s.inverse().is_none());
        assert!(s.determinant().unwrap().is_zero());
    }

    #[test]
    fn affine_infeasible_is_a_value() {
        let m = Matrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert_eq!(m.solve_affine(&[CycScalar::one(), CycScalar::zero()]), AffineSolution::Infeasible);
        match m.solve_affine(&[CycScalar::one(), CycScalar::one()]) {
            AffineSolution::Solved { particular, kernel } => {
                assert_eq!(m.mul_vec(&particular), vec![CycScalar::one(), CycScalar::one()]);
                assert_eq!(kernel.len(), 1);
            }
            AffineSolution::Infeasible => panic!("should be solvable"),
        }
    }

    #[test]
    fn kron_index_convention() {
        let a = Matrix::from_ints(&[&[1, 2], &[3, 4]]);
        let b = Matrix::from_ints(&[&[0, 5], &[6, 7]]);
        let k = a.kron(&b);
        // entry ((i1,i2),(j1,j2)) at (i1*2+i2, j1*2+j2)
        assert_eq!(k[(1 * 2 + 0, 0 * 2 + 1)], CycScalar::from_int(3 * 5));
        assert_eq!(k[(0 * 2 + 1, 1 * 2 + 1)], CycScalar::from_int(2 * 7));
    }

    #[test]
    fn antilinear_composition() {
        let i = CycScalar::root_of_unity(4);
        let a = LinearMap::odd(Matrix::from_rows(vec![vec![i.clone()]]));
        let b = LinearMap::odd(Matrix::from_rows(vec![vec![CycScalar::from_int(2)]]));
        let ab = a.after(&b);
        assert_eq!(ab.parity, Parity::Even);
        let v = vec![i.clone()];
        assert_eq!(ab.apply(&v), a.apply(&b.apply(&v)));
        let inv = a.inverse().unwrap();
        assert_eq!(inv.apply(&a.apply(&v)), v);
    }

    #[test]
    fn positivity() {
        let m = Matrix::from_ints(&[&[2, 1], &[1, 2]]);
        assert!(m.is_strictly_positive().unwrap());
        let n = Matrix::from_ints(&[&[1, 2], &[2, 1]]);
        assert!(!n.is_strictly_positive().unwrap());
        let i = CycScalar::root_of_unity(4);
        let h = Matrix::from_rows(vec![vec![CycScalar::from_int(2), i.clone()], vec![i.conj(), CycScalar::from_int(2)]]);
        assert!(h.is_strictly_positive().unwrap());
        let w = CycScalar::root_of_unity(5);
        let h2 = Matrix::from_rows(vec![vec![CycScalar::one(), w.clone()], vec![w.conj(), CycScalar::one()]]);
        assert!(!h2.is_strictly_positive().unwrap());
    }

    #[test]
    fn quotient_projection() {
        let q = Quotient::new(3, &[vec![CycScalar::one(), CycScalar::from_int(-1), CycScalar::zero()]]);
        assert_eq!(q.dim(), 2);
        let p = q.projection.mul(&q.section);
        assert_eq!(p, Matrix::identity(2));
        for r in &q.relations {
            assert!(vec_is_zero(&q.project(r)));
        }
    }
}
