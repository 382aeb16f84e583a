//! Finite-dimensional corepresentations, graded intertwiner spaces and the
//! conjugation / direct-sum / tensor functors, including the twisted versions
//! for antilinear morphisms.

use std::sync::Arc;

use crate::algebra::{simple_tensor, Outcome};
use crate::error::{Error, Result};
use crate::hopf::HopfAlgebra;
use crate::linalg::{axpy, unit_vec, vec_is_zero, zero_vec, LinearMap, Matrix, Parity, Vector};
use crate::scalar::CycScalar;

/// A corepresentation `e_j ↦ Σ_i e_i ⊗ u_ij` on `ℂ^dim`.
#[derive(Clone, Debug)]
pub struct Corep {
    pub hopf: Arc<HopfAlgebra>,
    pub name: String,
    dim: usize,
    /// `entries[i * dim + j] = u_ij`
    entries: Vec<Vector>,
}

impl PartialEq for Corep {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl Corep {
    pub fn new(hopf: Arc<HopfAlgebra>, name: impl Into<String>, dim: usize, entries: Vec<Vector>) -> Result<Self> {
        if entries.len() != dim * dim || entries.iter().any(|e| e.len() != hopf.dim()) {
            return Err(Error::Dimension(format!("corep matrix must be {dim}x{dim} with entries in a {}-dimensional algebra", hopf.dim())));
        }
        Ok(Corep { hopf, name: name.into(), dim, entries })
    }

    pub fn from_fn(hopf: Arc<HopfAlgebra>, name: impl Into<String>, dim: usize, f: impl Fn(usize, usize) -> Vector) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Corep { hopf, name: name.into(), dim, entries }
    }

    /// Builds a corep from its coefficient matrices: `u_ij = Σ_k ops[k]_ij x_k`.
    pub fn from_ops(hopf: Arc<HopfAlgebra>, name: impl Into<String>, ops: &[Matrix]) -> Self {
        let dim = ops.first().map_or(0, |m| m.rows());
        Self::from_fn(hopf, name, dim, |i, j| ops.iter().map(|m| m[(i, j)].clone()).collect())
    }

    pub fn trivial(hopf: Arc<HopfAlgebra>) -> Self {
        let u = hopf.unit().clone();
        Corep { hopf, name: "triv".into(), dim: 1, entries: vec![u] }
    }

    /// The comodule `H` under its own coproduct.
    pub fn regular(hopf: Arc<HopfAlgebra>) -> Self {
        let n = hopf.dim();
        let mut entries = vec![zero_vec(n); n * n];
        for j in 0..n {
            for (p, c) in hopf.basis_coproduct(j) {
                let (i, k) = (p / n, p % n);
                entries[i * n + j][k] = &entries[i * n + j][k] + c;
            }
        }
        Corep { hopf, name: "regular".into(), dim: n, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &Vector {
        &self.entries[i * self.dim + j]
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Coefficient matrices `(u_ij)[k]`, i.e. the action of the dual basis.
    pub fn ops(&self) -> Vec<Matrix> {
        (0..self.hopf.dim())
            .map(|k| Matrix::from_fn(self.dim, self.dim, |i, j| self.entry(i, j)[k].clone()))
            .collect()
    }

    /// `Δ(u_ij) = Σ_k u_ik ⊗ u_kj` and `ε(u_ij) = δ_ij`.
    pub fn check_corep(&self) -> Outcome {
        let h = &self.hopf;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let lhs = h.coproduct(self.entry(i, j));
                let mut rhs = zero_vec(h.dim() * h.dim());
                for k in 0..self.dim {
                    let t = simple_tensor(self.entry(i, k), self.entry(k, j));
                    axpy(&mut rhs, &CycScalar::one(), &t);
                }
                if lhs != rhs {
                    return Err(format!("Δ(u_{}{}) != Σ u_ik ⊗ u_kj", i + 1, j + 1));
                }
                let e = h.counit(self.entry(i, j));
                if e != if i == j { CycScalar::one() } else { CycScalar::zero() } {
                    return Err(format!("ε(u_{}{}) = {e}", i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// `u* u = 1` and `u u* = 1` entrywise.
    pub fn check_unitary(&self) -> Outcome {
        let h = &self.hopf;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut a = zero_vec(h.dim());
                let mut b = zero_vec(h.dim());
                for k in 0..self.dim {
                    axpy(&mut a, &CycScalar::one(), &h.mul(&h.star(self.entry(k, i)), self.entry(k, j)));
                    axpy(&mut b, &CycScalar::one(), &h.mul(self.entry(i, k), &h.star(self.entry(j, k))));
                }
                let expect: Vector = if i == j { h.unit().clone() } else { zero_vec(h.dim()) };
                if a != expect || b != expect {
                    return Err(format!("unitarity fails at ({}, {})", i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// Conjugate corep: entries `u_ij*` in the conjugate basis.
    pub fn conjugate(&self) -> Corep {
        Corep::from_fn(self.hopf.clone(), format!("conj({})", self.name), self.dim, |i, j| self.hopf.star(self.entry(i, j)))
    }

    pub fn direct_sum(&self, o: &Corep) -> Corep {
        let (a, b) = (self.dim, o.dim);
        let n = self.hopf.dim();
        Corep::from_fn(self.hopf.clone(), format!("{}+{}", self.name, o.name), a + b, |i, j| {
            if i < a && j < a {
                self.entry(i, j).clone()
            } else if i >= a && j >= a {
                o.entry(i - a, j - a).clone()
            } else {
                zero_vec(n)
            }
        })
    }

    /// Tensor product with basis `e_i ⊗ f_k ↦ i * dim2 + k`.
    pub fn tensor(&self, o: &Corep) -> Corep {
        let b = o.dim;
        Corep::from_fn(self.hopf.clone(), format!("{}*{}", self.name, o.name), self.dim * b, |p, q| {
            self.hopf.mul(self.entry(p / b, q / b), o.entry(p % b, q % b))
        })
    }

    /// Second contragredient: entries `κ²(u_ij)`.
    pub fn double_contragredient(&self) -> Corep {
        let h = &self.hopf;
        Corep::from_fn(h.clone(), format!("{}**", self.name), self.dim, |i, j| h.antipode(&h.antipode(self.entry(i, j))))
    }

    /// Invariant Hermitian form `G_ij = Σ_k h(u_ki* u_kj)`.
    pub fn invariant_form(&self, haar: &[CycScalar]) -> Matrix {
        let h = &self.hopf;
        Matrix::from_fn(self.dim, self.dim, |i, j| {
            (0..self.dim).map(|k| h.haar_value(haar, &h.mul(&h.star(self.entry(k, i)), self.entry(k, j)))).sum()
        })
    }

    /// `Σ_kl u_ki* G_kl u_lj = G_ij 1`.
    pub fn check_invariant_form(&self, g: &Matrix) -> Outcome {
        let h = &self.hopf;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = zero_vec(h.dim());
                for k in 0..self.dim {
                    let left = h.star(self.entry(k, i));
                    for l in 0..self.dim {
                        if g[(k, l)].is_zero() {
                            continue;
                        }
                        axpy(&mut acc, &g[(k, l)], &h.mul(&left, self.entry(l, j)));
                    }
                }
                let expect: Vector = h.unit().iter().map(|x| x * &g[(i, j)]).collect();
                if acc != expect {
                    return Err(format!("form not invariant at ({}, {})", i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// Restriction to an invariant subspace with basis the columns of `basis`.
    pub fn restrict(&self, basis: &Matrix) -> Result<Corep> {
        let left = left_inverse(basis)?;
        let ops: Vec<Matrix> = self.ops().iter().map(|a| left.mul(&a.mul(basis))).collect();
        for (a, r) in self.ops().iter().zip(&ops) {
            if a.mul(basis) != basis.mul(r) {
                return Err(Error::Invalid("subspace is not invariant".into()));
            }
        }
        Ok(Corep::from_ops(self.hopf.clone(), format!("{}|sub", self.name), &ops))
    }

    /// Change of basis: `u' = P^{-1} u P`.
    pub fn transform(&self, p: &Matrix) -> Result<Corep> {
        let inv = p.inverse().ok_or_else(|| Error::Invalid("singular change of basis".into()))?;
        let ops: Vec<Matrix> = self.ops().iter().map(|a| inv.mul(&a.mul(p))).collect();
        Ok(Corep::from_ops(self.hopf.clone(), self.name.clone(), &ops))
    }
}

/// Left inverse of a full-column-rank matrix, built from a set of pivot rows.
pub fn left_inverse(b: &Matrix) -> Result<Matrix> {
    let rows = b.transpose().rref().pivots;
    if rows.len() < b.cols() {
        return Err(Error::Invalid("columns are linearly dependent".into()));
    }
    let cols: Vec<usize> = (0..b.cols()).collect();
    let sq = b.submatrix(&rows, &cols).inverse().ok_or_else(|| Error::Internal("pivot block singular".into()))?;
    let mut out = Matrix::zeros(b.cols(), b.rows());
    for (c, &r) in rows.iter().enumerate() {
        for i in 0..b.cols() {
            out[(i, r)] = sq[(i, c)].clone();
        }
    }
    Ok(out)
}

/// A graded morphism of corepresentations: degree 0 maps are linear
/// intertwiners, degree 1 maps are antilinear with `(f ⊗ *)α₁ = α₂ f`.
#[derive(Clone, Debug)]
pub struct GradedMorphism {
    pub source: Corep,
    pub target: Corep,
    pub map: LinearMap,
}

impl GradedMorphism {
    pub fn new(source: Corep, target: Corep, map: LinearMap) -> Result<Self> {
        if map.source_dim() != source.dim() || map.target_dim() != target.dim() {
            return Err(Error::Dimension("morphism shape does not match coreps".into()));
        }
        Ok(GradedMorphism { source, target, map })
    }

    pub fn identity(c: &Corep) -> Self {
        GradedMorphism { source: c.clone(), target: c.clone(), map: LinearMap::identity(c.dim()) }
    }

    pub fn degree(&self) -> u8 {
        self.map.parity.degree()
    }

    pub fn check(&self) -> Outcome {
        check_intertwiner(&self.source, &self.target, &self.map.matrix, self.map.parity)
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &GradedMorphism) -> Result<GradedMorphism> {
        if other.target != self.source {
            return Err(Error::Dimension("composing morphisms with mismatched coreps".into()));
        }
        Ok(GradedMorphism { source: other.source.clone(), target: self.target.clone(), map: self.map.after(&other.map) })
    }

    pub fn inverse(&self) -> Result<GradedMorphism> {
        let m = self.map.inverse().ok_or_else(|| Error::Invalid("morphism is not invertible".into()))?;
        Ok(GradedMorphism { source: self.target.clone(), target: self.source.clone(), map: m })
    }

    /// Image under the conjugation functor: the matrix is conjugated, the degree kept.
    pub fn conjugate(&self) -> GradedMorphism {
        GradedMorphism {
            source: self.source.conjugate(),
            target: self.target.conjugate(),
            map: LinearMap::new(self.map.matrix.conj(), self.map.parity),
        }
    }
}

/// Row index of the intertwining equations; unknowns `F_kl` at `k * src + l`.
fn intertwiner_system(a: &Corep, b: &Corep, parity: Parity) -> Matrix {
    let h = &a.hopf;
    let n = h.dim();
    let (p, q) = (a.dim(), b.dim());
    let src: Vec<Vector> = match parity {
        Parity::Even => (0..p * p).map(|x| a.entry(x / p, x % p).clone()).collect(),
        Parity::Odd => (0..p * p).map(|x| h.star(a.entry(x / p, x % p))).collect(),
    };
    let mut rows = Vec::new();
    for k in 0..q {
        for j in 0..p {
            for t in 0..n {
                let mut row = zero_vec(q * p);
                for i in 0..p {
                    let c = &src[i * p + j][t];
                    if !c.is_zero() {
                        row[k * p + i] = &row[k * p + i] + c;
                    }
                }
                for l in 0..q {
                    let c = &b.entry(k, l)[t];
                    if !c.is_zero() {
                        row[l * p + j] = &row[l * p + j] - c;
                    }
                }
                if !vec_is_zero(&row) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        Matrix::zeros(0, q * p)
    } else {
        Matrix::from_rows(rows)
    }
}

fn matrix_from_flat(rows: usize, cols: usize, v: &[CycScalar]) -> Matrix {
    Matrix::from_fn(rows, cols, |i, j| v[i * cols + j].clone())
}

/// Basis of `Mor^d(a, b)` as matrices (`b.dim × a.dim`).
pub fn mor_space(a: &Corep, b: &Corep, parity: Parity) -> Vec<Matrix> {
    let sys = intertwiner_system(a, b, parity);
    sys.kernel().iter().map(|v| matrix_from_flat(b.dim(), a.dim(), v)).collect()
}

pub fn mor_morphisms(a: &Corep, b: &Corep, parity: Parity) -> Vec<GradedMorphism> {
    mor_space(a, b, parity)
        .into_iter()
        .map(|m| GradedMorphism { source: a.clone(), target: b.clone(), map: LinearMap::new(m, parity) })
        .collect()
}

pub fn check_intertwiner(a: &Corep, b: &Corep, f: &Matrix, parity: Parity) -> Outcome {
    let sys = intertwiner_system(a, b, parity);
    let flat: Vector = (0..f.rows()).flat_map(|i| f.row(i).to_vec()).collect();
    if vec_is_zero(&sys.mul_vec(&flat)) {
        Ok(())
    } else {
        Err(format!("map is not a degree-{} morphism {} -> {}", parity.degree(), a.name, b.name))
    }
}

/// Direct sum of morphisms: `f₁ ⊕ f₂` for degree 0, and the twisted
/// `(v₁, v₂) ↦ (f₂ v₂, f₁ v₁)` for degree 1 (with `f₁: V₁ → W₂`, `f₂: V₂ → W₁`).
pub fn direct_sum_morphisms(f1: &GradedMorphism, f2: &GradedMorphism) -> Result<GradedMorphism> {
    if f1.map.parity != f2.map.parity {
        return Err(Error::Invalid("direct sum of morphisms of different degree".into()));
    }
    match f1.map.parity {
        Parity::Even => Ok(GradedMorphism {
            source: f1.source.direct_sum(&f2.source),
            target: f1.target.direct_sum(&f2.target),
            map: LinearMap::even(f1.map.matrix.direct_sum(&f2.map.matrix)),
        }),
        Parity::Odd => {
            let (v1, v2) = (f1.source.dim(), f2.source.dim());
            let (w1, w2) = (f2.target.dim(), f1.target.dim());
            let mut m = Matrix::zeros(w1 + w2, v1 + v2);
            for i in 0..w1 {
                for j in 0..v2 {
                    m[(i, v1 + j)] = f2.map.matrix[(i, j)].clone();
                }
            }
            for i in 0..w2 {
                for j in 0..v1 {
                    m[(w1 + i, j)] = f1.map.matrix[(i, j)].clone();
                }
            }
            Ok(GradedMorphism {
                source: f1.source.direct_sum(&f2.source),
                target: f2.target.direct_sum(&f1.target),
                map: LinearMap::odd(m),
            })
        }
    }
}

/// Permutation matrix of `V₁ ⊗ V₂ → V₂ ⊗ V₁`.
pub fn swap_matrix(d1: usize, d2: usize) -> Matrix {
    let mut m = Matrix::zeros(d1 * d2, d1 * d2);
    for i in 0..d1 {
        for j in 0..d2 {
            m[(j * d1 + i, i * d2 + j)] = CycScalar::one();
        }
    }
    m
}

/// Tensor product of morphisms: `f₁ ⊗ f₂` for degree 0, and the twisted
/// `v₁ ⊗ v₂ ↦ f₂(v₂) ⊗ f₁(v₁)` for degree 1.
pub fn tensor_morphisms(f1: &GradedMorphism, f2: &GradedMorphism) -> Result<GradedMorphism> {
    if f1.map.parity != f2.map.parity {
        return Err(Error::Invalid("tensor product of morphisms of different degree".into()));
    }
    match f1.map.parity {
        Parity::Even => Ok(GradedMorphism {
            source: f1.source.tensor(&f2.source),
            target: f1.target.tensor(&f2.target),
            map: LinearMap::even(f1.map.matrix.kron(&f2.map.matrix)),
        }),
        Parity::Odd => {
            let sw = swap_matrix(f1.source.dim(), f2.source.dim());
            Ok(GradedMorphism {
                source: f1.source.tensor(&f2.source),
                target: f2.target.tensor(&f1.target),
                map: LinearMap::odd(f2.map.matrix.kron(&f1.map.matrix).mul(&sw)),
            })
        }
    }
}

/// A morphism in the cross category on pairs: degree 0 pairs act
/// componentwise, degree 1 pairs cross the components.
#[derive(Clone, Debug)]
pub struct PairMorphism {
    pub first: GradedMorphism,
    pub second: GradedMorphism,
}

impl PairMorphism {
    pub fn degree(&self) -> u8 {
        self.first.degree()
    }

    /// `self ∘ other`: `(h₁ f₁, h₂ f₂)` after an even pair, `(h₂ f₁, h₁ f₂)` after an odd one.
    pub fn after(&self, other: &PairMorphism) -> Result<PairMorphism> {
        match other.first.map.parity {
            Parity::Even => Ok(PairMorphism { first: self.first.after(&other.first)?, second: self.second.after(&other.second)? }),
            Parity::Odd => Ok(PairMorphism { first: self.second.after(&other.first)?, second: self.first.after(&other.second)? }),
        }
    }

    pub fn direct_sum(&self) -> Result<GradedMorphism> {
        direct_sum_morphisms(&self.first, &self.second)
    }

    pub fn tensor(&self) -> Result<GradedMorphism> {
        tensor_morphisms(&self.first, &self.second)
    }
}

/// Dimension of the commutant of a family of matrices.
pub fn commutant_dim(ops: &[Matrix]) -> usize {
    let d = ops.first().map_or(0, |m| m.rows());
    let mut rows = Vec::new();
    for a in ops {
        // X A - A X = 0, unknown X_ij at i*d + j
        for i in 0..d {
            for j in 0..d {
                let mut row = zero_vec(d * d);
                for k in 0..d {
                    if !a[(k, j)].is_zero() {
                        row[i * d + k] = &row[i * d + k] + &a[(k, j)];
                    }
                    if !a[(i, k)].is_zero() {
                        row[k * d + j] = &row[k * d + j] - &a[(i, k)];
                    }
                }
                if !vec_is_zero(&row) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return d * d;
    }
    d * d - Matrix::from_rows(rows).rank()
}

/// Smallest invariant subspace containing `v`, as a list of basis vectors.
fn spin(v: &[CycScalar], ops: &[Matrix], limit: usize) -> Vec<Vector> {
    let mut basis = crate::linalg::EchelonBasis::new();
    basis.insert(v);
    let mut i = 0;
    while i < basis.len() && basis.len() < limit {
        let w = basis.vectors()[i].clone();
        for a in ops {
            basis.insert(&a.mul_vec(&w));
        }
        i += 1;
    }
    basis.vectors().to_vec()
}

fn eigen_candidates(conductor: u32) -> Vec<CycScalar> {
    let mut out = vec![CycScalar::zero(), CycScalar::one(), CycScalar::from_int(-1)];
    for j in 1..conductor {
        let z = CycScalar::cyc(1, 1, j as i64, conductor);
        if !out.contains(&z) {
            out.push(z);
        }
    }
    out
}

/// Eigenvectors of the operators for the candidate eigenvalues.
fn eigenvectors(ops: &[Matrix], conductor: u32) -> Vec<Vector> {
    let d = ops.first().map_or(0, |m| m.rows());
    let mut out = Vec::new();
    for a in ops {
        for lam in eigen_candidates(conductor) {
            let shifted = a.sub(&Matrix::identity(d).scale(&lam));
            let k = shifted.kernel();
            if k.len() < d {
                out.extend(k);
            }
        }
    }
    out
}

/// Finds a proper nonzero invariant subspace of a reducible module.
fn proper_submodule(ops: &[Matrix], conductor: u32) -> Option<Vec<Vector>> {
    let d = ops.first().map_or(0, |m| m.rows());
    let mut cands = eigenvectors(ops, conductor);
    cands.extend((0..d).map(|i| unit_vec(d, i)));
    let base = cands.clone();
    for i in 0..base.len().min(12) {
        for j in i + 1..base.len().min(12) {
            cands.push(crate::linalg::vec_add(&base[i], &base[j]));
            cands.push(crate::linalg::vec_sub(&base[i], &base[j]));
        }
    }
    for v in cands {
        if vec_is_zero(&v) {
            continue;
        }
        let s = spin(&v, ops, d);
        if s.len() < d {
            return Some(s);
        }
    }
    None
}

/// Splits a corep into irreducible invariant subspaces (column bases in the
/// coordinates of `c`), using an invariant form for complements.
pub fn split_irreducible(c: &Corep, haar: &[CycScalar], conductor: u32) -> Result<Vec<Matrix>> {
    let form = c.invariant_form(haar);
    c.check_invariant_form(&form).map_err(Error::Internal)?;
    let mut out = Vec::new();
    split_rec(c, &Matrix::identity(c.dim()), &form, conductor, &mut out)?;
    Ok(out)
}

fn split_rec(c: &Corep, basis: &Matrix, form: &Matrix, conductor: u32, out: &mut Vec<Matrix>) -> Result<()> {
    let sub = c.restrict(basis)?;
    let ops = sub.ops();
    if commutant_dim(&ops) == 1 {
        out.push(basis.clone());
        return Ok(());
    }
    let d = basis.cols();
    let u = proper_submodule(&ops, conductor)
        .ok_or_else(|| Error::Unsupported(format!("could not split a reducible {d}-dimensional corep over conductor {conductor}")))?;
    let u_mat = Matrix::from_cols(d, &u);
    let local_form = basis.adjoint().mul(&form.mul(basis));
    let comp = u_mat.adjoint().mul(&local_form).kernel();
    let comp_mat = Matrix::from_cols(d, &comp);
    split_rec(c, &basis.mul(&u_mat), form, conductor, out)?;
    split_rec(c, &basis.mul(&comp_mat), form, conductor, out)
}

/// Whether two coreps are isomorphic (a nonzero intertwiner exists; both are
/// assumed irreducible).
pub fn equivalent(a: &Corep, b: &Corep) -> bool {
    a.dim() == b.dim() && !mor_space(a, b, Parity::Even).is_empty()
}

/// Rational `q` with `q² = x`, if any.
fn rational_sqrt(x: &CycScalar) -> Option<CycScalar> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Signed;
    let q = x.as_rational()?;
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().clone(), q.denom().clone());
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &rn * &rn == n && &rd * &rd == d {
        Some(CycScalar::from_rational(BigRational::new(rn, BigInt::from(1)) / BigRational::new(rd, BigInt::from(1))))
    } else {
        None
    }
}

/// Scalar `t` with `|t|² = r` among simple candidates (rational squares times
/// norms of `1 ± ζ^j`).
fn norm_root(r: &CycScalar, conductor: u32) -> Option<CycScalar> {
    if let Some(q) = rational_sqrt(r) {
        return Some(q);
    }
    for j in 1..conductor.max(1) {
        let z = CycScalar::cyc(1, 1, j as i64, conductor);
        for s in [CycScalar::one(), CycScalar::from_int(-1)] {
            let t = &CycScalar::one() + &(&s * &z);
            let nt = &t * &t.conj();
            if nt.is_zero() {
                continue;
            }
            for (base, scale) in [(&nt, true), (&nt, false)] {
                let ratio = if scale { r / base } else { &r.clone() * base };
                if let Some(q) = rational_sqrt(&ratio) {
                    return Some(if scale { &q * &t } else { &q / &t });
                }
            }
        }
    }
    None
}

fn form_product(form: &Matrix, a: &[CycScalar], b: &[CycScalar]) -> CycScalar {
    let fb = form.mul_vec(b);
    a.iter().zip(&fb).map(|(x, y)| x.conj() * y).sum()
}

/// Finds a basis that is orthogonal with equal norms for the invariant form,
/// so that the corep becomes unitary in it. Returns the change of basis.
pub fn unitarizing_basis(c: &Corep, form: &Matrix, conductor: u32) -> Result<Matrix> {
    let d = c.dim();
    let ops = c.ops();
    let mut starts = eigenvectors(&ops, conductor);
    starts.extend((0..d).map(|i| unit_vec(d, i)));
    for v0 in starts {
        let n0 = form_product(form, &v0, &v0);
        if n0.is_zero() {
            continue;
        }
        let mut list = vec![v0.clone()];
        let mut i = 0;
        while i < list.len() && list.len() < d {
            let v = list[i].clone();
            let mut pool: Vec<Vector> = ops.iter().map(|a| a.mul_vec(&v)).collect();
            // differences of images help when the group elements are not orthogonal
            let imgs = pool.clone();
            for a in 0..imgs.len() {
                for b in a + 1..imgs.len() {
                    pool.push(crate::linalg::vec_sub(&imgs[a], &imgs[b]));
                }
            }
            for w in pool {
                if list.len() == d {
                    break;
                }
                if vec_is_zero(&w) || list.iter().any(|x| !form_product(form, x, &w).is_zero()) {
                    continue;
                }
                let nw = form_product(form, &w, &w);
                if nw.is_zero() {
                    continue;
                }
                if let Some(t) = norm_root(&(&n0 / &nw), conductor) {
                    list.push(w.iter().map(|x| x * &t).collect());
                }
            }
            i += 1;
        }
        if list.len() == d {
            return Ok(Matrix::from_cols(d, &list));
        }
    }
    Err(Error::Unsupported(format!("no unitarizing basis found for a {d}-dimensional corep over conductor {conductor}")))
}

/// A complete set of pairwise inequivalent irreducible unitary coreps,
/// trivial first, then by dimension.
pub fn irreducible_set(hopf: &Arc<HopfAlgebra>, conductor: u32) -> Result<Vec<Corep>> {
    let haar = hopf.haar()?;
    let conductor = num_integer::Integer::lcm(&conductor, &hopf.splitting_conductor);
    let reg = Corep::regular(hopf.clone());
    let pieces = split_irreducible(&reg, &haar, conductor)?;
    let mut reps: Vec<Corep> = vec![Corep::trivial(hopf.clone())];
    for b in &pieces {
        let sub = reg.restrict(b)?;
        if reps.iter().any(|r| equivalent(r, &sub)) {
            continue;
        }
        let form = sub.invariant_form(&haar);
        let p = unitarizing_basis(&sub, &form, conductor)?;
        let u = sub.transform(&p)?;
        u.check_unitary().map_err(|w| Error::Internal(format!("unitarization failed: {w}")))?;
        reps.push(u);
    }
    reps[1..].sort_by_key(|r| r.dim());
    let total: usize = reps.iter().map(|r| r.dim() * r.dim()).sum();
    if total != hopf.dim() {
        return Err(Error::Internal(format!("sum of squared dimensions {total} != {}", hopf.dim())));
    }
    let mut counts = std::collections::BTreeMap::new();
    let named: Vec<Corep> = reps
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            if i == 0 {
                return r.with_name("triv");
            }
            let k = counts.entry(r.dim()).or_insert(0usize);
            *k += 1;
            let d = r.dim();
            r.with_name(format!("irr{d}_{k}"))
        })
        .collect();
    Ok(named)
}

/// Multiplicities of the given irreducibles in `c` and a degree-0
/// isomorphism from the isotypic direct sum onto `c`.
pub fn decompose(c: &Corep, irreps: &[Corep]) -> Result<(Vec<usize>, GradedMorphism)> {
    let mut mult = Vec::new();
    let mut cols: Vec<Vector> = Vec::new();
    let mut sum: Option<Corep> = None;
    for a in irreps {
        let maps = mor_space(a, c, Parity::Even);
        mult.push(maps.len());
        for m in maps {
            cols.extend(m.cols_vec());
            sum = Some(match sum {
                None => a.clone(),
                Some(s) => s.direct_sum(a),
            });
        }
    }
    let source = sum.ok_or_else(|| Error::Invalid("empty decomposition".into()))?;
    if cols.len() != c.dim() {
        return Err(Error::Invalid(format!("irreducibles account for {} of {} dimensions", cols.len(), c.dim())));
    }
    let m = Matrix::from_cols(c.dim(), &cols);
    if m.inverse().is_none() {
        return Err(Error::Internal("isotypic map is not invertible".into()));
    }
    let f = GradedMorphism::new(source, c.clone(), LinearMap::even(m))?;
    f.check().map_err(Error::Internal)?;
    Ok((mult, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::FiniteGroup;

    fn c_of(g: &FiniteGroup) -> Arc<HopfAlgebra> {
        Arc::new(HopfAlgebra::function_algebra(g))
    }

    #[test]
    fn regular_corep_is_a_corep() {
        let h = c_of(&FiniteGroup::symmetric3());
        let r = Corep::regular(h);
        assert_eq!(r.check_corep(), Ok(()));
    }

    #[test]
    fn irreducibles_of_s3() {
        let h = c_of(&FiniteGroup::symmetric3());
        let irr = irreducible_set(&h, 1).unwrap();
        let dims: Vec<usize> = irr.iter().map(|r| r.dim()).collect();
        assert_eq!(dims, vec![1, 1, 2]);
        for (i, a) in irr.iter().enumerate() {
            assert_eq!(a.check_corep(), Ok(()));
            assert_eq!(a.check_unitary(), Ok(()));
            for (j, b) in irr.iter().enumerate() {
                let d = mor_space(a, b, Parity::Even).len();
                assert_eq!(d, usize::from(i == j));
            }
        }
    }

    #[test]
    fn irreducibles_of_group_algebra() {
        let h = Arc::new(HopfAlgebra::group_algebra(&FiniteGroup::symmetric3()));
        let irr = irreducible_set(&h, 1).unwrap();
        assert_eq!(irr.len(), 6);
        assert!(irr.iter().all(|r| r.dim() == 1));
    }

    #[test]
    fn twisted_tensor_is_a_degree_one_morphism() {
        let h = c_of(&FiniteGroup::cyclic(3));
        let irr = irreducible_set(&h, 1).unwrap();
        let a = &irr[1];
        let abar = a.conjugate();
        let f = mor_morphisms(a, &abar, Parity::Odd);
        assert_eq!(f.len(), 1);
        let g = mor_morphisms(&abar, a, Parity::Odd);
        let t = tensor_morphisms(&f[0], &g[0]).unwrap();
        assert_eq!(t.check(), Ok(()));
        let s = direct_sum_morphisms(&f[0], &g[0]).unwrap();
        assert_eq!(s.check(), Ok(()));
    }

    #[test]
    fn decomposition_of_regular() {
        let h = c_of(&FiniteGroup::symmetric3());
        let irr = irreducible_set(&h, 1).unwrap();
        let (m, iso) = decompose(&Corep::regular(h), &irr).unwrap();
        assert_eq!(m, vec![1, 1, 2]);
        assert_eq!(iso.degree(), 0);
    }
}
