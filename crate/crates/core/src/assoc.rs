//! Associated quantum vector bundles: the section modules `Γ_α = Mor(α, Φ)`,
//! their normalized frames, the flip `σ: Ω ⊗_M Γ → Γ ⊗_M Ω`, the induced
//! connections, the functor on graded morphisms and its natural
//! isomorphisms (conjugation, tensor products, associativity).
//!
//! Elements of `Ω ⊗_M Γ_α` are tuples `(μ_k)` standing for `Σ_k μ_k ⊗ T^L_k`
//! over the left frame; elements of `Γ_α ⊗_M Ω` are tuples `(μ̂_k)` standing
//! for `Σ_k T^R_k ⊗ μ̂_k` over the right frame. Both are kept in canonical
//! form (multiplied by the frame idempotent), so equality is equality of
//! tuples.

use rayon::prelude::*;

use crate::algebra::{FiniteAlgebra, Outcome};
use crate::bundle::{format_element, CovariantDerivative, HorizontalModel};
use crate::check::{ensure, first_failure, Check};
use crate::corep::{left_inverse, mor_space, Corep, GradedMorphism};
use crate::error::{Error, Result};
use crate::linalg::{axpy, span_dim, unit_vec, vec_add, vec_is_zero, vec_scale, zero_vec, LinearMap, Matrix, Parity, Vector};
use crate::scalar::CycScalar;

/// An element of `Ω ⊗_M Γ` or `Γ ⊗_M Ω` over a frame: one base form per frame index.
pub type Tuple = Vec<Vector>;

/// A linear map `V_α → Hor` given by its values on the basis.
pub type HorMap = Vec<Vector>;

fn sign(odd: bool) -> CycScalar {
    if odd {
        CycScalar::from_int(-1)
    } else {
        CycScalar::one()
    }
}

fn flatten(t: &Matrix) -> Vector {
    (0..t.rows()).flat_map(|i| t.row(i).to_vec()).collect()
}

/// Reduced-echelon basis of the span of equally shaped matrices.
pub fn canonical_basis(mats: &[Matrix]) -> Vec<Matrix> {
    let Some(first) = mats.first() else { return Vec::new() };
    let (r, c) = (first.rows(), first.cols());
    Matrix::from_rows(mats.iter().map(flatten).collect())
        .row_space()
        .into_iter()
        .map(|v| Matrix::from_fn(r, c, |i, j| v[i * c + j].clone()))
        .collect()
}

/// Coordinates of `t` in the span of `basis`, if it lies there.
pub fn coords(basis: &[Matrix], t: &Matrix) -> Option<Vector> {
    if basis.is_empty() {
        return t.is_zero().then(Vec::new);
    }
    let cols: Vec<Vector> = basis.iter().map(flatten).collect();
    let flat = flatten(t);
    Matrix::from_cols(flat.len(), &cols).solve_unique(&flat)
}

fn hor_map_matrix(tau: &[Vector], rows: usize) -> Matrix {
    Matrix::from_cols(rows, tau)
}

/// A normalized frame of `Γ_α`: left generators with `Σ_k x_ki* x_kj = δ_ij`,
/// a positive matrix `Z` with `Σ_kl z_kl x_li x_kj* = δ_ij`, and the right
/// generators `T^R_k(e_j) = Σ_l z_kl x_lj`.
#[derive(Clone, Debug)]
pub struct SectionFrame {
    pub alpha: Corep,
    /// canonical basis of `Γ_α`, as `dim GM × dim α` matrices
    pub sections: Vec<Matrix>,
    pub left: Vec<Matrix>,
    pub right: Vec<Matrix>,
    pub z: Matrix,
    pub y: Matrix,
    /// idempotent `e_kl = Σ_i x_ki x_li*` of `Ω ⊗_M Γ`, as degree-0 base forms
    pub e: Vec<Vec<Vector>>,
    /// idempotent `ê_kl = p̂_k(T^R_l)` of `Γ ⊗_M Ω`
    pub e_hat: Vec<Vec<Vector>>,
    /// `∇(T^L_k)`
    pub nabla_left: Vec<Tuple>,
    /// `σ∇(T^R_k)`
    pub flip_nabla_right: Vec<Tuple>,
    x: Vec<Vec<Vector>>,
    x_star: Vec<Vec<Vector>>,
    w: Vec<Vec<Vector>>,
    w_star: Vec<Vec<Vector>>,
}

impl SectionFrame {
    /// Number of frame elements.
    pub fn rank(&self) -> usize {
        self.left.len()
    }

    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    pub fn section_dim(&self) -> usize {
        self.sections.len()
    }

    /// Coordinates of a section in the canonical basis.
    pub fn coords(&self, t: &Matrix) -> Option<Vector> {
        coords(&self.sections, t)
    }
}

/// Everything needed to evaluate the associated-bundle functor of one
/// bundle with a fixed covariant derivative.
#[derive(Clone, Debug)]
pub struct AssocContext {
    pub hm: HorizontalModel,
    pub dm: CovariantDerivative,
    pub irreps: Vec<Corep>,
    gm_corep: Corep,
    hor_corep: Corep,
    points: Matrix,
    points_inv: Matrix,
    base_emb: Matrix,
    base_inv: Matrix,
}

impl AssocContext {
    pub fn new(hm: HorizontalModel, dm: CovariantDerivative) -> Result<Self> {
        let m = hm.bundle.dim();
        let points = Matrix::from_cols(m, &hm.bundle.points);
        let points_inv = left_inverse(&points)?;
        let base_emb = hm.base_embedding();
        let base_inv = left_inverse(&base_emb)?;
        let gm_corep = hm.bundle.total.as_corep();
        let hor_corep = hm.forms.as_corep();
        let irreps = hm.blocks.iter().map(|(c, _)| c.clone()).collect();
        Ok(AssocContext { hm, dm, irreps, gm_corep, hor_corep, points, points_inv, base_emb, base_inv })
    }

    pub fn gm(&self) -> &FiniteAlgebra {
        self.hm.bundle.algebra()
    }

    pub fn om(&self) -> &FiniteAlgebra {
        &self.hm.base.algebra
    }

    fn gm_dim(&self) -> usize {
        self.gm().dim()
    }

    fn base_dim(&self) -> usize {
        self.hm.base.dim()
    }

    fn point_count(&self) -> usize {
        self.hm.base.points
    }

    /// Degree-0 base form of an element of the base algebra `M ⊂ GM`.
    pub fn to_base(&self, x: &[CycScalar]) -> Vector {
        let c = self.points_inv.mul_vec(x);
        let mut out = zero_vec(self.base_dim());
        for (a, ca) in c.into_iter().enumerate() {
            out[a] = ca;
        }
        out
    }

    pub fn is_base(&self, x: &[CycScalar]) -> bool {
        self.points.mul_vec(&self.points_inv.mul_vec(x)) == x
    }

    /// The degree-0 part of a base form, as an element of `GM`.
    pub fn base_to_gm(&self, mu: &[CycScalar]) -> Vector {
        let mut out = zero_vec(self.gm_dim());
        for a in 0..self.point_count() {
            if !mu[a].is_zero() {
                axpy(&mut out, &mu[a], &self.hm.bundle.points[a]);
            }
        }
        out
    }

    pub fn hor_to_base(&self, x: &[CycScalar]) -> Vector {
        self.base_inv.mul_vec(x)
    }

    pub fn hor_is_base(&self, x: &[CycScalar]) -> bool {
        self.base_emb.mul_vec(&self.base_inv.mul_vec(x)) == x
    }

    fn om_mul(&self, a: &[CycScalar], b: &[CycScalar]) -> Vector {
        self.om().mul(a, b)
    }

    fn om_star(&self, a: &[CycScalar]) -> Vector {
        self.om().star(a)
    }

    fn om_d(&self, a: &[CycScalar]) -> Vector {
        self.hm.base.differential(a)
    }

    pub fn format_form(&self, v: &[CycScalar]) -> String {
        format_element(self.om(), v)
    }

    pub fn format_tuple(&self, t: &[Vector]) -> String {
        let parts: Vec<String> = t.iter().map(|v| self.format_form(v)).collect();
        format!("({})", parts.join(", "))
    }

    pub fn format_section(&self, t: &Matrix) -> String {
        let parts: Vec<String> = t.cols_vec().iter().map(|v| format_element(self.gm(), v)).collect();
        format!("[{}]", parts.join(", "))
    }

    /// Canonical basis of `Γ_α = Mor(α, Φ)`.
    pub fn sections(&self, alpha: &Corep) -> Vec<Matrix> {
        canonical_basis(&mor_space(alpha, &self.gm_corep, Parity::Even))
    }

    /// Canonical basis of `Mor(α, Hor)`.
    pub fn hor_maps(&self, alpha: &Corep) -> Vec<HorMap> {
        canonical_basis(&mor_space(alpha, &self.hor_corep, Parity::Even)).iter().map(|t| t.cols_vec()).collect()
    }

    fn hor_map_coords(&self, basis: &[HorMap], tau: &[Vector]) -> Option<Vector> {
        let rows = self.hm.dim();
        let mats: Vec<Matrix> = basis.iter().map(|b| hor_map_matrix(b, rows)).collect();
        coords(&mats, &hor_map_matrix(tau, rows))
    }

    pub fn star_section(&self, t: &Matrix) -> Matrix {
        let cols: Vec<Vector> = t.cols_vec().iter().map(|c| self.gm().star(c)).collect();
        Matrix::from_cols(t.rows(), &cols)
    }

    /// `p · T` for `p` in the total algebra.
    pub fn point_times(&self, p: &[CycScalar], t: &Matrix) -> Matrix {
        let cols: Vec<Vector> = t.cols_vec().iter().map(|c| self.gm().mul(p, c)).collect();
        Matrix::from_cols(t.rows(), &cols)
    }

    /// `T · p` for `p` in the total algebra.
    pub fn times_point(&self, t: &Matrix, p: &[CycScalar]) -> Matrix {
        let cols: Vec<Vector> = t.cols_vec().iter().map(|c| self.gm().mul(c, p)).collect();
        Matrix::from_cols(t.rows(), &cols)
    }

    fn is_trivial(alpha: &Corep) -> bool {
        let h = &alpha.hopf;
        let n = alpha.dim();
        (0..n).all(|i| (0..n).all(|j| if i == j { alpha.entry(i, j) == h.unit() } else { vec_is_zero(alpha.entry(i, j)) }))
    }

    fn left_normalized(&self, set: &[&Matrix], n: usize) -> bool {
        let gm = self.gm();
        let m = gm.dim();
        for i in 0..n {
            for j in 0..n {
                let mut acc = zero_vec(m);
                for t in set {
                    axpy(&mut acc, &CycScalar::one(), &gm.mul(&gm.star(&t.col(i)), &t.col(j)));
                }
                let expect = if i == j { gm.unit().clone() } else { zero_vec(m) };
                if acc != expect {
                    return false;
                }
            }
        }
        true
    }

    /// Left generators: the dual-basis sections for a trivial corep,
    /// otherwise the shortest normalized prefix of the canonical basis, then
    /// any normalized subset.
    fn left_generators(&self, alpha: &Corep, sections: &[Matrix]) -> Result<Vec<Matrix>> {
        let (m, n) = (self.gm_dim(), alpha.dim());
        if Self::is_trivial(alpha) {
            let unit = self.gm().unit();
            return Ok((0..n).map(|i| Matrix::from_fn(m, n, |a, j| if i == j { unit[a].clone() } else { CycScalar::zero() })).collect());
        }
        let s = sections.len();
        for len in 1..=s {
            let set: Vec<&Matrix> = sections[..len].iter().collect();
            if self.left_normalized(&set, n) {
                return Ok(set.into_iter().cloned().collect());
            }
        }
        if s <= 16 {
            let mut masks: Vec<u32> = (1u32..(1 << s)).collect();
            masks.sort_by_key(|k| (k.count_ones(), *k));
            for mask in masks {
                let set: Vec<&Matrix> = (0..s).filter(|b| mask >> b & 1 == 1).map(|b| &sections[b]).collect();
                if self.left_normalized(&set, n) {
                    return Ok(set.into_iter().cloned().collect());
                }
            }
        }
        Err(Error::Unsupported(format!("no normalized frame among the sections of {}", alpha.name)))
    }

    /// Builds the normalized frame of `Γ_α`.
    pub fn frame(&self, alpha: &Corep) -> Result<SectionFrame> {
        let gm = self.gm();
        let (m, n) = (gm.dim(), alpha.dim());
        let sections = self.sections(alpha);
        let left = self.left_generators(alpha, &sections)?;
        let d = left.len();
        let x: Vec<Vec<Vector>> = left.iter().map(|t| t.cols_vec()).collect();
        let x_star: Vec<Vec<Vector>> = x.iter().map(|r| r.iter().map(|v| gm.star(v)).collect()).collect();
        // Σ_kl z_kl x_li x_kj* = δ_ij 1, unknown z_kl at k * d + l
        let cols: Vec<Vector> = (0..d * d)
            .map(|p| {
                let (k, l) = (p / d, p % d);
                (0..n * n).flat_map(|q| gm.mul(&x[l][q / n], &x_star[k][q % n])).collect()
            })
            .collect();
        let rhs: Vector = (0..n * n).flat_map(|q| if q / n == q % n { gm.unit().clone() } else { zero_vec(m) }).collect();
        let sys = Matrix::from_cols(n * n * m, &cols);
        let sol = sys.solve_any(&rhs).ok_or_else(|| Error::Invalid(format!("the frame of {} admits no right normalization", alpha.name)))?;
        let z0 = Matrix::from_fn(d, d, |k, l| sol[k * d + l].clone());
        let zh = z0.add(&z0.adjoint()).scale(&CycScalar::frac(1, 2));
        let z = if sys.mul_vec(&flatten(&zh)) == rhs { zh } else { z0 };
        if !z.is_strictly_positive()? {
            return Err(Error::Invalid(format!("the right normalization of {} is not positive", alpha.name)));
        }
        let y = z.inverse().ok_or_else(|| Error::Internal("positive matrix is singular".into()))?;
        let w: Vec<Vec<Vector>> = (0..d)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let mut acc = zero_vec(m);
                        for l in 0..d {
                            axpy(&mut acc, &z[(k, l)], &x[l][j]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let w_star = w.iter().map(|r| r.iter().map(|v| gm.star(v)).collect()).collect();
        let right = w.iter().map(|r| Matrix::from_cols(m, r)).collect();
        let mut f = SectionFrame {
            alpha: alpha.clone(),
            sections,
            left,
            right,
            z,
            y,
            e: Vec::new(),
            e_hat: Vec::new(),
            nabla_left: Vec::new(),
            flip_nabla_right: Vec::new(),
            x,
            x_star,
            w,
            w_star,
        };
        f.e = (0..d)
            .map(|k| {
                (0..d)
                    .map(|l| {
                        let mut acc = zero_vec(m);
                        for i in 0..n {
                            axpy(&mut acc, &CycScalar::one(), &gm.mul(&f.x[k][i], &f.x_star[l][i]));
                        }
                        self.to_base(&acc)
                    })
                    .collect()
            })
            .collect();
        let e_hat_t: Vec<Tuple> = f.right.iter().map(|t| self.p_hat(&f, t)).collect();
        f.e_hat = (0..d).map(|k| (0..d).map(|l| e_hat_t[l][k].clone()).collect()).collect();
        f.nabla_left = f.left.iter().map(|t| self.nabla(&f, t)).collect();
        f.flip_nabla_right = f.right.iter().map(|t| self.sigma(&f, &self.nabla(&f, t))).collect();
        Ok(f)
    }

    /// Left coefficients `p_k(T) = Σ_i T(e_i) x_ki*`.
    pub fn p(&self, f: &SectionFrame, t: &Matrix) -> Tuple {
        let gm = self.gm();
        (0..f.rank())
            .map(|k| {
                let mut acc = zero_vec(gm.dim());
                for i in 0..f.dim() {
                    axpy(&mut acc, &CycScalar::one(), &gm.mul(&t.col(i), &f.x_star[k][i]));
                }
                self.to_base(&acc)
            })
            .collect()
    }

    /// Right coefficients `p̂_k(T) = Σ_ij y_ik w_ij* T(e_j)`.
    pub fn p_hat(&self, f: &SectionFrame, t: &Matrix) -> Tuple {
        let gm = self.gm();
        let v: Vec<Vector> = (0..f.rank())
            .map(|i| {
                let mut acc = zero_vec(gm.dim());
                for j in 0..f.dim() {
                    axpy(&mut acc, &CycScalar::one(), &gm.mul(&f.w_star[i][j], &t.col(j)));
                }
                acc
            })
            .collect();
        (0..f.rank())
            .map(|k| {
                let mut acc = zero_vec(gm.dim());
                for (i, vi) in v.iter().enumerate() {
                    axpy(&mut acc, &f.y[(i, k)], vi);
                }
                self.to_base(&acc)
            })
            .collect()
    }

    /// `(Σ_k μ_k e_kl)_l`.
    pub fn canon(&self, f: &SectionFrame, mu: &[Vector]) -> Tuple {
        (0..f.rank())
            .map(|l| {
                let mut acc = zero_vec(self.base_dim());
                for (k, mk) in mu.iter().enumerate() {
                    axpy(&mut acc, &CycScalar::one(), &self.om_mul(mk, &f.e[k][l]));
                }
                acc
            })
            .collect()
    }

    /// `(Σ_l ê_kl μ̂_l)_k`.
    pub fn canon_hat(&self, f: &SectionFrame, mu: &[Vector]) -> Tuple {
        (0..f.rank())
            .map(|k| {
                let mut acc = zero_vec(self.base_dim());
                for (l, ml) in mu.iter().enumerate() {
                    axpy(&mut acc, &CycScalar::one(), &self.om_mul(&f.e_hat[k][l], ml));
                }
                acc
            })
            .collect()
    }

    /// `Υ: Mor(α, Hor) → Ω ⊗_M Γ_α`.
    pub fn upsilon(&self, f: &SectionFrame, tau: &[Vector]) -> Tuple {
        (0..f.rank())
            .map(|k| {
                let mut acc = zero_vec(self.hm.dim());
                for (i, ti) in tau.iter().enumerate() {
                    axpy(&mut acc, &CycScalar::one(), &self.hm.mul(ti, &self.hm.embed_total(&f.x_star[k][i])));
                }
                self.hor_to_base(&acc)
            })
            .collect()
    }

    /// `Υ⁻¹(μ)(e_i) = Σ_k μ_k x_ki`.
    pub fn upsilon_inv(&self, f: &SectionFrame, mu: &[Vector]) -> HorMap {
        (0..f.dim())
            .map(|i| {
                let mut acc = zero_vec(self.hm.dim());
                for (k, mk) in mu.iter().enumerate() {
                    axpy(&mut acc, &CycScalar::one(), &self.hm.form_times(mk, &f.x[k][i]));
                }
                acc
            })
            .collect()
    }

    /// `Υ̂: Mor(α, Hor) → Γ_α ⊗_M Ω`.
    pub fn upsilon_hat(&self, f: &SectionFrame, tau: &[Vector]) -> Tuple {
        let v: Vec<Vector> = (0..f.rank())
            .map(|i| {
                let mut acc = zero_vec(self.hm.dim());
                for (j, tj) in tau.iter().enumerate() {
                    axpy(&mut acc, &CycScalar::one(), &self.hm.mul(&self.hm.embed_total(&f.w_star[i][j]), tj));
                }
                acc
            })
            .collect();
        (0..f.rank())
            .map(|k| {
                let mut acc = zero_vec(self.hm.dim());
                for (i, vi) in v.iter().enumerate() {
                    axpy(&mut acc, &f.y[(i, k)], vi);
                }
                self.hor_to_base(&acc)
            })
            .collect()
    }

    /// `Υ̂⁻¹(μ̂)(e_j) = Σ_k w_kj μ̂_k`.
    pub fn upsilon_hat_inv(&self, f: &SectionFrame, mu: &[Vector]) -> HorMap {
        (0..f.dim())
            .map(|j| {
                let mut acc = zero_vec(self.hm.dim());
                for (k, mk) in mu.iter().enumerate() {
                    let t = self.hm.mul(&self.hm.embed_total(&f.w[k][j]), &self.hm.embed_base(mk));
                    axpy(&mut acc, &CycScalar::one(), &t);
                }
                acc
            })
            .collect()
    }

    /// The flip `σ = Υ̂ ∘ Υ⁻¹`.
    pub fn sigma(&self, f: &SectionFrame, mu: &[Vector]) -> Tuple {
        self.upsilon_hat(f, &self.upsilon_inv(f, mu))
    }

    pub fn sigma_inv(&self, f: &SectionFrame, mu: &[Vector]) -> Tuple {
        self.upsilon(f, &self.upsilon_hat_inv(f, mu))
    }

    /// `D ∘ T` for a section `T`.
    pub fn d_section(&self, t: &Matrix) -> HorMap {
        t.cols_vec().iter().map(|c| self.dm.apply(&self.hm.embed_total(c))).collect()
    }

    /// The induced connection `∇ = Υ ∘ (D ∘ −)`.
    pub fn nabla(&self, f: &SectionFrame, t: &Matrix) -> Tuple {
        self.upsilon(f, &self.d_section(t))
    }

    /// `1 ⊗ T` in `Ω ⊗_M Γ`.
    pub fn unit_tensor(&self, f: &SectionFrame, t: &Matrix) -> Tuple {
        self.p(f, t)
    }

    /// `T ⊗ 1` in `Γ ⊗_M Ω`.
    pub fn tensor_unit(&self, f: &SectionFrame, t: &Matrix) -> Tuple {
        self.p_hat(f, t)
    }

    /// `ν · (Σ μ_k ⊗ T^L_k)`.
    pub fn form_left(&self, nu: &[CycScalar], mu: &[Vector]) -> Tuple {
        mu.iter().map(|m| self.om_mul(nu, m)).collect()
    }

    /// `(Σ T^R_k ⊗ μ̂_k) · ν`.
    pub fn form_right(&self, mu: &[Vector], nu: &[CycScalar]) -> Tuple {
        mu.iter().map(|m| self.om_mul(m, nu)).collect()
    }

    /// `(Σ μ_k ⊗ T^L_k) · p` for `p` in the base algebra (given in `GM`).
    pub fn tuple_times_point(&self, f: &SectionFrame, mu: &[Vector], p: &[CycScalar]) -> Tuple {
        let mut out = vec![zero_vec(self.base_dim()); f.rank()];
        for (k, mk) in mu.iter().enumerate() {
            let c = self.p(f, &self.times_point(&f.left[k], p));
            for (l, cl) in c.iter().enumerate() {
                axpy(&mut out[l], &CycScalar::one(), &self.om_mul(mk, cl));
            }
        }
        out
    }

    /// `p · (Σ T^R_k ⊗ μ̂_k)`.
    pub fn point_times_tuple(&self, f: &SectionFrame, p: &[CycScalar], mu: &[Vector]) -> Tuple {
        let mut out = vec![zero_vec(self.base_dim()); f.rank()];
        for (l, ml) in mu.iter().enumerate() {
            let c = self.p_hat(f, &self.point_times(p, &f.right[l]));
            for (k, ck) in c.iter().enumerate() {
                axpy(&mut out[k], &CycScalar::one(), &self.om_mul(ck, ml));
            }
        }
        out
    }

    /// Extension of `∇` to `Ω^k ⊗_M Γ`:
    /// `μ ⊗ T ↦ dμ ⊗ T + (−1)^k μ ∇T`.
    pub fn d_left(&self, f: &SectionFrame, mu: &[Vector], k: usize) -> Tuple {
        let mut out: Tuple = mu.iter().map(|m| self.om_d(m)).collect();
        let s = sign(k % 2 == 1);
        for (j, mj) in mu.iter().enumerate() {
            for (l, nl) in f.nabla_left[j].iter().enumerate() {
                axpy(&mut out[l], &s, &self.om_mul(mj, nl));
            }
        }
        self.canon(f, &out)
    }

    /// Extension to `Γ ⊗_M Ω^k`: `T ⊗ μ̂ ↦ σ∇(T) μ̂ + T ⊗ dμ̂`.
    pub fn d_right(&self, f: &SectionFrame, mu: &[Vector]) -> Tuple {
        let mut out: Tuple = mu.iter().map(|m| self.om_d(m)).collect();
        for (k, mk) in mu.iter().enumerate() {
            for (l, nl) in f.flip_nabla_right[k].iter().enumerate() {
                axpy(&mut out[l], &CycScalar::one(), &self.om_mul(nl, mk));
            }
        }
        self.canon_hat(f, &out)
    }

    /// Canonical tuples spanning `Ω^k ⊗_M Γ` (all degrees if `None`).
    pub fn basis_tuples(&self, f: &SectionFrame, degree: Option<usize>, hat: bool) -> Vec<Tuple> {
        let bd = self.base_dim();
        let idx: Vec<usize> = match degree {
            Some(k) => self.om().component(k),
            None => (0..bd).collect(),
        };
        let mut out = Vec::new();
        for k in 0..f.rank() {
            for &b in &idx {
                let mut t = vec![zero_vec(bd); f.rank()];
                t[k] = unit_vec(bd, b);
                let c = if hat { self.canon_hat(f, &t) } else { self.canon(f, &t) };
                if c.iter().any(|v| !vec_is_zero(v)) {
                    out.push(c);
                }
            }
        }
        out
    }

    fn tuple_rank(tuples: &[Tuple]) -> usize {
        let flat: Vec<Vector> = tuples.iter().map(|t| t.concat()).collect();
        span_dim(&flat)
    }

    fn tuple_degree(&self, t: &[Vector]) -> Option<usize> {
        let mut deg = None;
        for v in t.iter().filter(|v| !vec_is_zero(v)) {
            let k = self.om().degree_of(v)?;
            if deg.is_some_and(|d| d != k) {
                return None;
            }
            deg = Some(k);
        }
        deg
    }

    // ---- frame and flip checks ----

    /// Normalization, expansion and idempotent checks for one frame.
    pub fn frame_checks(&self, f: &SectionFrame) -> Vec<Check> {
        let name = &f.alpha.name;
        let gm = self.gm();
        let (m, n, d) = (gm.dim(), f.dim(), f.rank());
        let left_norm = ensure(self.left_normalized(&f.left.iter().collect::<Vec<_>>(), n), || format!("Σ_k x_ki* x_kj != δ_ij for {name}"));
        let right_norm = (|| {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = zero_vec(m);
                    for k in 0..d {
                        axpy(&mut acc, &CycScalar::one(), &gm.mul(&f.w[k][i], &f.x_star[k][j]));
                    }
                    let expect = if i == j { gm.unit().clone() } else { zero_vec(m) };
                    if acc != expect {
                        return Err(format!("Σ_kl z_kl x_l{i} x_k{j}* != δ for {name}"));
                    }
                }
            }
            match f.z.is_strictly_positive() {
                Ok(true) => Ok(()),
                _ => Err(format!("Z is not positive for {name}")),
            }
        })();
        let expansion = (|| {
            for (s, t) in f.sections.iter().enumerate() {
                let p = self.p(f, t);
                let ph = self.p_hat(f, t);
                let mut lt = Matrix::zeros(m, n);
                let mut rt = Matrix::zeros(m, n);
                for k in 0..d {
                    lt = lt.add(&self.point_times(&self.base_to_gm(&p[k]), &f.left[k]));
                    rt = rt.add(&self.times_point(&f.right[k], &self.base_to_gm(&ph[k])));
                }
                if lt != *t {
                    return Err(format!("section {s} of {name} is not Σ_k p_k(T) T^L_k"));
                }
                if rt != *t {
                    return Err(format!("section {s} of {name} is not Σ_k T^R_k p̂_k(T)"));
                }
                for k in 0..d {
                    let mut acc = zero_vec(m);
                    for i in 0..n {
                        axpy(&mut acc, &CycScalar::one(), &gm.mul(&t.col(i), &f.x_star[k][i]));
                    }
                    if !self.is_base(&acc) || !self.hm.bundle.total.is_invariant(&acc) {
                        return Err(format!("p_{k} of section {s} of {name} lies outside the base"));
                    }
                }
            }
            Ok(())
        })();
        let idempotent = (|| {
            for k in 0..d {
                for l in 0..d {
                    let mut sq = zero_vec(self.base_dim());
                    let mut sqh = zero_vec(self.base_dim());
                    for j in 0..d {
                        axpy(&mut sq, &CycScalar::one(), &self.om_mul(&f.e[k][j], &f.e[j][l]));
                        axpy(&mut sqh, &CycScalar::one(), &self.om_mul(&f.e_hat[k][j], &f.e_hat[j][l]));
                    }
                    if sq != f.e[k][l] || sqh != f.e_hat[k][l] {
                        return Err(format!("frame idempotent of {name} is not idempotent at ({k}, {l})"));
                    }
                    if self.om_star(&f.e[l][k]) != f.e[k][l] {
                        return Err(format!("frame idempotent of {name} is not self-adjoint at ({k}, {l})"));
                    }
                }
            }
            let rank = Self::tuple_rank(&self.basis_tuples(f, Some(0), false));
            ensure(rank == f.section_dim(), || format!("M^{d} e has dimension {rank}, Γ_{name} has {}", f.section_dim()))
        })();
        let e_str: Vec<String> = f.e.iter().map(|r| self.format_tuple(r)).collect();
        vec![
            Check::new(format!("{name}: left frame is normalized"), "frame/left-normalization", left_norm)
                .with("frame_size", d.to_string())
                .with("left_generators", f.left.iter().map(|t| self.format_section(t)).collect::<Vec<_>>().join("; ")),
            Check::new(format!("{name}: right frame is normalized by a positive matrix"), "frame/right-normalization", right_norm)
                .with("z", format_matrix(&f.z)),
            Check::new(format!("{name}: every section expands in both frames with base coefficients"), "frame/section-expansion", expansion)
                .with("section_dim", f.section_dim().to_string()),
            Check::new(format!("{name}: frame idempotent is a self-adjoint projection of the right rank"), "frame/idempotent", idempotent)
                .with("e", format!("[{}]", e_str.join("; "))),
        ]
    }

    /// `Υ`, `Υ̂` and `σ`: bijectivity, the unit-section law and the bimodule property.
    pub fn flip_checks(&self, f: &SectionFrame) -> Vec<Check> {
        let name = &f.alpha.name;
        let hor = self.hor_maps(&f.alpha);
        let tuples = self.basis_tuples(f, None, false);
        let hats = self.basis_tuples(f, None, true);
        let upsilon = (|| {
            for (s, tau) in hor.iter().enumerate() {
                if self.upsilon_inv(f, &self.upsilon(f, tau)) != *tau {
                    return Err(format!("Υ⁻¹Υ differs from the identity on horizontal map {s} of {name}"));
                }
                if self.upsilon_hat_inv(f, &self.upsilon_hat(f, tau)) != *tau {
                    return Err(format!("Υ̂⁻¹Υ̂ differs from the identity on horizontal map {s} of {name}"));
                }
            }
            for (s, t) in tuples.iter().enumerate() {
                let tau = self.upsilon_inv(f, t);
                if self.hor_map_coords(&hor, &tau).is_none() {
                    return Err(format!("Υ⁻¹ of tuple {s} of {name} is not an intertwiner"));
                }
                if self.upsilon(f, &tau) != *t {
                    return Err(format!("ΥΥ⁻¹ differs from the identity on tuple {s} of {name}"));
                }
            }
            for (s, t) in hats.iter().enumerate() {
                if self.upsilon_hat(f, &self.upsilon_hat_inv(f, t)) != *t {
                    return Err(format!("Υ̂Υ̂⁻¹ differs from the identity on tuple {s} of {name}"));
                }
            }
            let (a, b, c) = (Self::tuple_rank(&tuples), Self::tuple_rank(&hats), hor.len());
            ensure(a == c && b == c, || format!("dimensions Ω⊗Γ = {a}, Γ⊗Ω = {b}, Mor(α, Hor) = {c} for {name}"))
        })();
        let unit = first_failure(f.sections.iter().enumerate().map(|(s, t)| {
            ensure(self.sigma(f, &self.unit_tensor(f, t)) == self.tensor_unit(f, t), || format!("σ(1 ⊗ T) != T ⊗ 1 for section {s} of {name}"))
        }));
        let inverse = first_failure(tuples.iter().enumerate().map(|(s, t)| {
            ensure(self.sigma_inv(f, &self.sigma(f, t)) == *t, || format!("σ⁻¹σ differs from the identity on tuple {s} of {name}"))
        }));
        let bimodule = (|| {
            for a in 0..self.point_count() {
                let pg = &self.hm.bundle.points[a];
                let pb = self.hm.base.point(a);
                for (s, t) in tuples.iter().enumerate() {
                    let st = self.sigma(f, t);
                    let left = self.sigma(f, &self.canon(f, &self.form_left(&pb, t)));
                    if left != self.point_times_tuple(f, pg, &st) {
                        return Err(format!("σ(p_{a} ψ) != p_{a} σ(ψ) for tuple {s} of {name}"));
                    }
                    let right = self.sigma(f, &self.tuple_times_point(f, t, pg));
                    if right != self.canon_hat(f, &self.form_right(&st, &pb)) {
                        return Err(format!("σ(ψ p_{a}) != σ(ψ) p_{a} for tuple {s} of {name}"));
                    }
                }
            }
            Ok(())
        })();
        vec![
            Check::new(format!("{name}: Υ and Υ̂ are bijective"), "flip/upsilon-bijective", upsilon).with("hor_dim", hor.len().to_string()),
            Check::new(format!("{name}: σ(1 ⊗ T) = T ⊗ 1"), "flip/unit-section", unit),
            Check::new(format!("{name}: σ is invertible"), "flip/invertible", inverse),
            Check::new(format!("{name}: σ is an M-bimodule map"), "flip/bimodule", bimodule),
        ]
    }

    /// Leibniz rules, both extensions of `∇`, and curvature two ways.
    pub fn connection_checks(&self, f: &SectionFrame) -> Vec<Check> {
        let name = &f.alpha.name;
        let cap = self.hm.cap();
        let left = (|| {
            for a in 0..self.point_count() {
                let pg = &self.hm.bundle.points[a];
                let pb = self.hm.base.point(a);
                let dp = self.om_d(&pb);
                for (s, t) in f.sections.iter().enumerate() {
                    let lhs = self.nabla(f, &self.point_times(pg, t));
                    let mut rhs = self.form_left(&pb, &self.nabla(f, t));
                    for (r, c) in rhs.iter_mut().zip(self.p(f, t)) {
                        axpy(r, &CycScalar::one(), &self.om_mul(&dp, &c));
                    }
                    if lhs != self.canon(f, &rhs) {
                        return Err(format!("∇(p_{a} T) != p_{a} ∇T + dp_{a} ⊗ T for section {s} of {name}"));
                    }
                    let lhs = self.nabla(f, &self.times_point(t, pg));
                    let mut rhs = self.tuple_times_point(f, &self.nabla(f, t), pg);
                    let extra = self.sigma_inv(f, &self.canon_hat(f, &self.form_right(&self.p_hat(f, t), &dp)));
                    for (r, e) in rhs.iter_mut().zip(&extra) {
                        axpy(r, &CycScalar::one(), e);
                    }
                    if lhs != rhs {
                        return Err(format!("∇(T p_{a}) != ∇(T) p_{a} + σ⁻¹(T ⊗ dp_{a}) for section {s} of {name}"));
                    }
                }
            }
            Ok(())
        })();
        let tuples = self.basis_tuples(f, None, false);
        let extension = first_failure(tuples.par_iter().enumerate().map(|(s, t)| {
            let k = self.tuple_degree(t).unwrap_or(0);
            let via_d: Tuple = self.upsilon(f, &self.upsilon_inv(f, t).iter().map(|v| self.dm.apply(v)).collect::<Vec<_>>());
            let dl = self.d_left(f, t, k);
            if dl != via_d {
                return Err(format!("d_L differs from Υ D Υ⁻¹ on tuple {s} of {name}"));
            }
            let st = self.sigma(f, t);
            ensure(self.d_right(f, &st) == self.sigma(f, &dl), || format!("d_R σ != σ d_L on tuple {s} of {name}"))
        }).collect::<Vec<_>>());
        let mut flat = true;
        let curvature = (|| {
            if cap < 2 {
                return Ok(());
            }
            for (s, t) in f.sections.iter().enumerate() {
                let r1 = self.d_left(f, &self.nabla(f, t), 1);
                let dd: HorMap = self.d_section(t).iter().map(|v| self.dm.apply(v)).collect();
                let r2 = self.upsilon(f, &dd);
                if r1 != r2 {
                    return Err(format!("d_L ∇ differs from Υ(D² ∘ T) on section {s} of {name}"));
                }
                flat &= r1.iter().all(|v| vec_is_zero(v));
            }
            Ok(())
        })();
        let nabla: Vec<String> = f.sections.iter().map(|t| self.format_tuple(&self.nabla(f, t))).collect();
        vec![
            Check::new(format!("{name}: ∇ satisfies the left and right Leibniz rules"), "connection/leibniz", left)
                .with("nabla", format!("[{}]", nabla.join("; "))),
            Check::new(format!("{name}: ∇ extends to d_L = Υ D Υ⁻¹ and d_R = σ d_L σ⁻¹"), "connection/extensions", extension),
            Check::new(format!("{name}: curvature agrees computed via d_L∇ and via D²"), "connection/curvature", curvature)
                .with("flat", flat.to_string()),
        ]
    }

    // ---- the functor on morphisms ----

    /// Image of a section under `f`: `T ∘ f` for degree 0, `T* ∘ f` for degree 1.
    pub fn image(&self, f: &GradedMorphism, t: &Matrix) -> Matrix {
        match f.map.parity {
            Parity::Even => t.mul(&f.map.matrix),
            Parity::Odd => self.star_section(t).mul(&f.map.matrix.conj()),
        }
    }

    /// The (anti)linear map `Γ_target → Γ_source` in canonical coordinates.
    pub fn image_map(&self, f: &GradedMorphism, source: &[Matrix], target: &[Matrix]) -> Result<LinearMap> {
        let cols = target
            .iter()
            .enumerate()
            .map(|(s, t)| coords(source, &self.image(f, t)).ok_or_else(|| Error::Internal(format!("image of section {s} is not a section"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearMap::new(Matrix::from_cols(source.len(), &cols), f.map.parity))
    }

    /// `A_id = id` and `A_{g∘f} = A_f ∘ A_g` on composable pairs `(f, g)`.
    pub fn functoriality(&self, pairs: &[(GradedMorphism, GradedMorphism)]) -> Check {
        let outcome = (|| {
            for (p, (f, g)) in pairs.iter().enumerate() {
                let (sa, sb, sc) = (self.sections(&f.source), self.sections(&f.target), self.sections(&g.target));
                let run = || -> Result<Outcome> {
                    let idm = self.image_map(&GradedMorphism::identity(&f.source), &sa, &sa)?;
                    if idm != LinearMap::identity(sa.len()) {
                        return Ok(Err(format!("A_id is not the identity on {}", f.source.name)));
                    }
                    let gf = g.after(f)?;
                    let lhs = self.image_map(&gf, &sa, &sc)?;
                    let rhs = self.image_map(f, &sa, &sb)?.after(&self.image_map(g, &sb, &sc)?);
                    Ok(ensure(lhs == rhs, || format!("A_(g∘f) != A_f ∘ A_g on pair {p} ({} → {} → {})", f.source.name, f.target.name, g.target.name)))
                };
                match run() {
                    Ok(Ok(())) => {}
                    Ok(Err(w)) => return Err(w),
                    Err(e) => return Err(e.to_string()),
                }
            }
            Ok(())
        })();
        let odd = pairs.iter().filter(|(f, g)| f.degree() == 1 || g.degree() == 1).count();
        Check::new("the section functor respects identities and composition", "functor/composition", outcome)
            .with("pairs", pairs.len().to_string())
            .with("pairs_with_degree_one", odd.to_string())
    }

    /// Connection and flip compatibility of `A_f` for `f: a → b` with frames `fa`, `fb`.
    pub fn morphism_checks(&self, f: &GradedMorphism, fa: &SectionFrame, fb: &SectionFrame) -> Vec<Check> {
        let label = format!("{} → {} (degree {})", f.source.name, f.target.name, f.degree());
        let a_left: Vec<Tuple> = fb.left.iter().map(|t| self.p(fa, &self.image(f, t))).collect();
        let a_right_l: Vec<Tuple> = fb.left.iter().map(|t| self.p_hat(fa, &self.image(f, t))).collect();
        let a_right_r: Vec<Tuple> = fb.right.iter().map(|t| self.p_hat(fa, &self.image(f, t))).collect();
        let a_left_r: Vec<Tuple> = fb.right.iter().map(|t| self.p(fa, &self.image(f, t))).collect();
        let bd = self.base_dim();
        // Σ_k μ_k ⊗ A(T_k) on the left of the source frame
        let into_left = |mu: &[Vector], coeff: &[Tuple], conj: bool| -> Tuple {
            let mut out = vec![zero_vec(bd); fa.rank()];
            for (k, mk) in mu.iter().enumerate() {
                let mk = if conj { self.om_star(mk) } else { mk.clone() };
                for (l, c) in coeff[k].iter().enumerate() {
                    axpy(&mut out[l], &CycScalar::one(), &self.om_mul(&mk, c));
                }
            }
            self.canon(fa, &out)
        };
        // Σ_k A(T_k) ⊗ μ_k on the right of the source frame
        let into_right = |mu: &[Vector], coeff: &[Tuple], conj: bool| -> Tuple {
            let mut out = vec![zero_vec(bd); fa.rank()];
            for (k, mk) in mu.iter().enumerate() {
                let mk = if conj { self.om_star(mk) } else { mk.clone() };
                for (l, c) in coeff[k].iter().enumerate() {
                    axpy(&mut out[l], &CycScalar::one(), &self.om_mul(c, &mk));
                }
            }
            self.canon_hat(fa, &out)
        };
        let tuples = self.basis_tuples(fb, None, false);
        match f.map.parity {
            Parity::Even => {
                let conn = first_failure(fb.sections.iter().enumerate().map(|(s, t)| {
                    let lhs = self.nabla(fa, &self.image(f, t));
                    let rhs = into_left(&self.nabla(fb, t), &a_left, false);
                    ensure(lhs == rhs, || format!("∇(A T) != (id ⊗ A)∇T for section {s} along {label}"))
                }));
                let flip = first_failure(tuples.iter().enumerate().map(|(s, psi)| {
                    let lhs = self.sigma(fa, &into_left(psi, &a_left, false));
                    let rhs = into_right(&self.sigma(fb, psi), &a_right_r, false);
                    ensure(lhs == rhs, || format!("σ (id ⊗ A) != (A ⊗ id) σ on tuple {s} along {label}"))
                }));
                vec![
                    Check::new(format!("A_f intertwines the connections along {label}"), "functor/connection-even", conn),
                    Check::new(format!("A_f intertwines the flips along {label}"), "functor/flip-even", flip),
                ]
            }
            Parity::Odd => {
                let conn = first_failure(fb.sections.iter().enumerate().map(|(s, t)| {
                    let lhs = self.sigma(fa, &self.nabla(fa, &self.image(f, t)));
                    let rhs = into_right(&self.nabla(fb, t), &a_right_l, true);
                    ensure(lhs == rhs, || format!("σ∇(A T) != Σ_k A(T^L_k) ⊗ μ_k* for section {s} along {label}"))
                }));
                let flip = first_failure(tuples.iter().enumerate().map(|(s, psi)| {
                    let lhs = self.sigma(fa, &into_left(&self.sigma(fb, psi), &a_left_r, true));
                    let rhs = into_right(psi, &a_right_l, true);
                    ensure(lhs == rhs, || format!("σ (A ⊗ *) σ != * ⊗ A on tuple {s} along {label}"))
                }));
                vec![
                    Check::new(format!("A_f twists the connections along {label}"), "functor/connection-odd", conn),
                    Check::new(format!("A_f twists the flips along {label}"), "functor/flip-odd", flip),
                ]
            }
        }
    }

    /// Exactness of the image of `0 → triv → triv ⊕ β → β → 0`, with the
    /// extension `T ↦ T ∘ ρ` through a left inverse `ρ` of the inclusion,
    /// in degree 0 and degree 1.
    pub fn exactness(&self, triv: &Corep, beta: &Corep) -> Check {
        let sum = triv.direct_sum(beta);
        let (n1, n2) = (triv.dim(), beta.dim());
        let incl = Matrix::from_fn(n1 + n2, n1, |i, j| if i == j { CycScalar::one() } else { CycScalar::zero() });
        let proj = Matrix::from_fn(n2, n1 + n2, |i, j| if j == n1 + i { CycScalar::one() } else { CycScalar::zero() });
        let rho = Matrix::from_fn(n1, n1 + n2, |i, j| if i == j { CycScalar::one() } else { CycScalar::zero() });
        let (st, ss, sb) = (self.sections(triv), self.sections(&sum), self.sections(beta));
        let outcome = (|| -> Result<Outcome> {
            for parity in [Parity::Even, Parity::Odd] {
                let iota = GradedMorphism::new(triv.clone(), sum.clone(), LinearMap::new(incl.clone(), parity))?;
                let pi = GradedMorphism::new(sum.clone(), beta.clone(), LinearMap::new(proj.clone(), Parity::Even))?;
                let r = GradedMorphism::new(sum.clone(), triv.clone(), LinearMap::new(rho.clone(), parity))?;
                for g in [&iota, &pi, &r] {
                    if let Err(w) = g.check() {
                        return Ok(Err(format!("{w} for {} → {}", g.source.name, g.target.name)));
                    }
                }
                let ai = self.image_map(&iota, &st, &ss)?;
                let ap = self.image_map(&pi, &ss, &sb)?;
                let (ri, rp) = (ai.matrix.rank(), ap.matrix.rank());
                if ri != st.len() {
                    return Ok(Err(format!("restriction to the trivial summand has rank {ri}, not {} (degree {})", st.len(), parity.degree())));
                }
                if rp != sb.len() {
                    return Ok(Err(format!("pull-back from the quotient has rank {rp}, not {}", sb.len())));
                }
                if !ai.after(&ap).matrix.is_zero() {
                    return Ok(Err("the composite of the two images is not zero".into()));
                }
                if ss.len() - ri != rp {
                    return Ok(Err(format!("kernel of dimension {} differs from the image of dimension {rp}", ss.len() - ri)));
                }
                for (s, t) in st.iter().enumerate() {
                    let ext = self.image(&r, t);
                    if coords(&ss, &ext).is_none() {
                        return Ok(Err(format!("extension of section {s} is not a section")));
                    }
                    if self.image(&iota, &ext) != *t {
                        return Ok(Err(format!("extension of section {s} does not restrict back (degree {})", parity.degree())));
                    }
                }
            }
            Ok(Ok(()))
        })();
        let outcome = outcome.unwrap_or_else(|e| Err(e.to_string()));
        Check::new(format!("sections of 0 → {} → {} → {} → 0 form an exact sequence", triv.name, sum.name, beta.name), "functor/exactness", outcome)
            .with("dims", format!("{} → {} → {}", st.len(), ss.len(), sb.len()))
    }

    // ---- natural isomorphisms ----

    /// `T ∈ Γ_ᾱ ↦ conj(T*)` against connections, flips and morphisms.
    pub fn conjugate_checks(&self, f: &SectionFrame, fc: &SectionFrame) -> Vec<Check> {
        let name = &f.alpha.name;
        let hm = &self.hm;
        let bij = (|| {
            let imgs: Vec<Matrix> = fc.sections.iter().map(|t| self.star_section(t)).collect();
            for (s, t) in imgs.iter().enumerate() {
                if f.coords(t).is_none() {
                    return Err(format!("the adjoint of section {s} of conj({name}) is not a section of {name}"));
                }
            }
            let flat: Vec<Vector> = imgs.iter().map(flatten).collect();
            ensure(span_dim(&flat) == f.section_dim() && imgs.len() == f.section_dim(), || format!("T ↦ T* is not bijective onto Γ_{name}"))
        })();
        let conn = first_failure(fc.sections.iter().enumerate().map(|(s, t)| {
            let lhs = self.upsilon_inv(fc, &self.nabla(fc, t));
            let sadj = self.star_section(t);
            let mu = self.sigma(f, &self.nabla(f, &sadj));
            let rhs: HorMap = (0..f.dim())
                .map(|i| {
                    let mut acc = zero_vec(hm.dim());
                    for (k, mk) in mu.iter().enumerate() {
                        let t = hm.mul(&hm.embed_base(&self.om_star(mk)), &hm.embed_total(&f.w_star[k][i]));
                        axpy(&mut acc, &CycScalar::one(), &t);
                    }
                    acc
                })
                .collect();
            ensure(lhs == rhs, || format!("∇ of conj({name}) differs from the conjugate connection on section {s}"))
        }));
        let flip = first_failure(fc.sections.iter().enumerate().flat_map(|(s, t)| {
            (0..self.base_dim()).map(move |b| (s, t, b))
        }).map(|(s, t, b)| {
            let mu = unit_vec(self.base_dim(), b);
            let psi = self.canon(fc, &self.form_left(&mu, &self.p(fc, t)));
            let lhs = self.upsilon_hat_inv(fc, &self.sigma(fc, &psi));
            let sadj = self.star_section(t);
            let hat = self.canon_hat(f, &self.form_right(&self.p_hat(f, &sadj), &self.om_star(&mu)));
            let nu = self.sigma_inv(f, &hat);
            let rhs: HorMap = (0..f.dim())
                .map(|i| {
                    let mut acc = zero_vec(hm.dim());
                    for (k, nk) in nu.iter().enumerate() {
                        let t = hm.mul(&hm.embed_total(&f.x_star[k][i]), &hm.embed_base(&self.om_star(nk)));
                        axpy(&mut acc, &CycScalar::one(), &t);
                    }
                    acc
                })
                .collect();
            ensure(lhs == rhs, || format!("σ of conj({name}) differs from the conjugate flip on section {s}, form {}", self.om().labels[b]))
        }));
        vec![
            Check::new(format!("{name}: T ↦ conj(T*) identifies Γ of the conjugate with the conjugate module"), "conjugation/bijective", bij),
            Check::new(format!("{name}: conjugation intertwines the connections"), "conjugation/connection", conn),
            Check::new(format!("{name}: conjugation intertwines the flips"), "conjugation/flip", flip),
        ]
    }

    /// Naturality of the conjugation isomorphism along degree-0 morphisms.
    pub fn conjugate_naturality(&self, morphisms: &[GradedMorphism]) -> Check {
        let outcome = first_failure(morphisms.iter().filter(|g| g.degree() == 0).flat_map(|g| {
            let gc = g.conjugate();
            self.sections(&gc.target).into_iter().map(move |t| (g.clone(), gc.clone(), t))
        }).map(|(g, gc, t)| {
            let lhs = self.star_section(&self.image(&gc, &t));
            let rhs = self.image(&g, &self.star_section(&t));
            ensure(lhs == rhs, || format!("conjugation is not natural along {} → {}", g.source.name, g.target.name))
        }));
        Check::new("the conjugation isomorphism is natural", "conjugation/naturality", outcome).with("morphisms", morphisms.len().to_string())
    }

    /// `T₁ ⊗ T₂ ↦ (p̂_k(T₁) T₂)_k` in the right-frame model of `Γ₁ ⊗_M Γ₂`.
    pub fn tensor_tuple(&self, f1: &SectionFrame, t1: &Matrix, t2: &Matrix) -> Vec<Matrix> {
        self.p_hat(f1, t1).iter().map(|c| self.point_times(&self.base_to_gm(c), t2)).collect()
    }

    /// Canonical form `(Σ_l ê_kl S_l)_k`.
    pub fn tensor_project(&self, f1: &SectionFrame, s: &[Matrix]) -> Vec<Matrix> {
        let (m, n2) = (self.gm_dim(), s.first().map_or(0, |t| t.cols()));
        (0..f1.rank())
            .map(|k| {
                let mut acc = Matrix::zeros(m, n2);
                for (l, sl) in s.iter().enumerate() {
                    acc = acc.add(&self.point_times(&self.base_to_gm(&f1.e_hat[k][l]), sl));
                }
                acc
            })
            .collect()
    }

    /// `A⁻¹(Σ_k T^R_k ⊗ S_k)`: the section `e_i ⊗ e_j ↦ Σ_k w_ki S_k(e_j)` of `α₁ ⊗ α₂`.
    pub fn tensor_inverse(&self, f1: &SectionFrame, s: &[Matrix]) -> Matrix {
        let gm = self.gm();
        let (m, n1) = (gm.dim(), f1.dim());
        let n2 = s.first().map_or(0, |t| t.cols());
        let mut out = Matrix::zeros(m, n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let mut acc = zero_vec(m);
                for (k, sk) in s.iter().enumerate() {
                    axpy(&mut acc, &CycScalar::one(), &gm.mul(&f1.w[k][i], &sk.col(j)));
                }
                out.set_col(i * n2 + j, &acc);
            }
        }
        out
    }

    pub fn section_product(&self, f1: &SectionFrame, t1: &Matrix, t2: &Matrix) -> Matrix {
        self.tensor_inverse(f1, &self.tensor_tuple(f1, t1, t2))
    }

    /// The tensor isomorphism `Γ₁ ⊗_M Γ₂ → Γ_{α₁⊗α₂}`: bijectivity and
    /// compatibility with connections and flips.
    pub fn tensor_checks(&self, f1: &SectionFrame, f2: &SectionFrame, f12: &SectionFrame) -> Vec<Check> {
        let label = format!("{} ⊗ {}", f1.alpha.name, f2.alpha.name);
        let hm = &self.hm;
        let (n1, n2) = (f1.dim(), f2.dim());
        let spanning: Vec<Vec<Matrix>> = (0..f1.rank())
            .flat_map(|k| {
                f2.sections.iter().map(move |t| {
                    let mut s = vec![Matrix::zeros(self.gm_dim(), n2); f1.rank()];
                    s[k] = t.clone();
                    s
                })
            })
            .map(|s| self.tensor_project(f1, &s))
            .collect();
        let flat: Vec<Vector> = spanning.iter().map(|s| s.iter().flat_map(flatten).collect()).collect();
        let tensor_dim = span_dim(&flat);
        let bijective = (|| {
            let images: Vec<Matrix> = spanning.iter().map(|s| self.tensor_inverse(f1, s)).collect();
            for (s, p) in images.iter().enumerate() {
                if f12.coords(p).is_none() {
                    return Err(format!("A⁻¹ of generator {s} of {label} is not a section"));
                }
            }
            let rank = span_dim(&images.iter().map(flatten).collect::<Vec<_>>());
            ensure(rank == tensor_dim && rank == f12.section_dim(), || {
                format!("Γ₁ ⊗ Γ₂ has dimension {tensor_dim}, its image {rank}, Γ of {label} {}", f12.section_dim())
            })
        })();
        let pairs: Vec<(&Matrix, &Matrix)> = f1.sections.iter().flat_map(|a| f2.sections.iter().map(move |b| (a, b))).collect();
        let conn = first_failure(pairs.par_iter().enumerate().map(|(s, (t1, t2))| {
            let p = self.section_product(f1, t1, t2);
            let lhs = self.upsilon_inv(f12, &self.nabla(f12, &p));
            let mut rhs = vec![zero_vec(hm.dim()); n1 * n2];
            let mu = self.nabla(f1, t1);
            for i in 0..n1 {
                for j in 0..n2 {
                    for (k, mk) in mu.iter().enumerate() {
                        let x = self.gm().mul(&f1.x[k][i], &t2.col(j));
                        axpy(&mut rhs[i * n2 + j], &CycScalar::one(), &hm.form_times(mk, &x));
                    }
                }
            }
            let nu = self.nabla(f2, t2);
            let ph = self.p_hat(f1, t1);
            for (k, nk) in nu.iter().enumerate() {
                let rho = self.sigma_inv(f1, &self.canon_hat(f1, &self.form_right(&ph, nk)));
                for i in 0..n1 {
                    for j in 0..n2 {
                        for (l, rl) in rho.iter().enumerate() {
                            let x = self.gm().mul(&f1.x[l][i], &f2.x[k][j]);
                            axpy(&mut rhs[i * n2 + j], &CycScalar::one(), &hm.form_times(rl, &x));
                        }
                    }
                }
            }
            ensure(lhs == rhs, || format!("∇ of {label} differs from ∇₁ ⊗ 1 + (σ₁⁻¹ ⊗ 1)(1 ⊗ ∇₂) on pair {s}"))
        }).collect::<Vec<_>>());
        let flip = first_failure(pairs.par_iter().enumerate().flat_map(|(s, (t1, t2))| {
            (0..self.base_dim()).into_par_iter().map(move |b| (s, *t1, *t2, b))
        }).map(|(s, t1, t2, b)| {
            let mu = unit_vec(self.base_dim(), b);
            let p = self.section_product(f1, t1, t2);
            let psi = self.canon(f12, &self.form_left(&mu, &self.p(f12, &p)));
            let lhs = self.upsilon_hat_inv(f12, &self.sigma(f12, &psi));
            let h1 = self.sigma(f1, &self.canon(f1, &self.form_left(&mu, &self.p(f1, t1))));
            let mut rhs = vec![zero_vec(hm.dim()); n1 * n2];
            for (k, hk) in h1.iter().enumerate() {
                let h2 = self.sigma(f2, &self.canon(f2, &self.form_left(hk, &self.p(f2, t2))));
                for i in 0..n1 {
                    for j in 0..n2 {
                        for (l, nl) in h2.iter().enumerate() {
                            let x = self.gm().mul(&f1.w[k][i], &f2.w[l][j]);
                            let t = hm.mul(&hm.embed_total(&x), &hm.embed_base(nl));
                            axpy(&mut rhs[i * n2 + j], &CycScalar::one(), &t);
                        }
                    }
                }
            }
            ensure(lhs == rhs, || format!("σ of {label} differs from (1 ⊗ σ₂)(σ₁ ⊗ 1) on pair {s}, form {}", self.om().labels[b]))
        }).collect::<Vec<_>>());
        vec![
            Check::new(format!("{label}: the tensor isomorphism is bijective of degree 0"), "tensor/bijective", bijective)
                .with("dim", tensor_dim.to_string()),
            Check::new(format!("{label}: the tensor isomorphism intertwines the connections"), "tensor/connection", conn),
            Check::new(format!("{label}: the tensor isomorphism intertwines the flips"), "tensor/flip", flip),
        ]
    }

    /// Both bracketings of `T₁ T₂ T₃` agree.
    pub fn associativity(&self, f1: &SectionFrame, f2: &SectionFrame, f12: &SectionFrame, s3: &[Matrix]) -> Outcome {
        for t1 in &f1.sections {
            for t2 in &f2.sections {
                let p12 = self.section_product(f1, t1, t2);
                for t3 in s3 {
                    let left = self.section_product(f12, &p12, t3);
                    let right = self.section_product(f1, t1, &self.section_product(f2, t2, t3));
                    if left != right {
                        return Err(format!("(T₁T₂)T₃ != T₁(T₂T₃) for {} ⊗ {} ⊗ ·", f1.alpha.name, f2.alpha.name));
                    }
                }
            }
        }
        Ok(())
    }

    /// Naturality of the tensor isomorphism along pairs of degree-0 morphisms.
    pub fn tensor_naturality(&self, pairs: &[(GradedMorphism, GradedMorphism)], frames: &dyn Fn(&Corep) -> Result<SectionFrame>) -> Check {
        let outcome = (|| -> Result<Outcome> {
            for (p, (f, g)) in pairs.iter().enumerate().filter(|(_, (f, g))| f.degree() == 0 && g.degree() == 0) {
                let (fa, fb) = (frames(&f.source)?, frames(&f.target)?);
                let fg = f.map.matrix.kron(&g.map.matrix);
                for t in &fb.sections {
                    for s in &self.sections(&g.target) {
                        let lhs = self.section_product(&fa, &self.image(f, t), &self.image(g, s));
                        let rhs = self.section_product(&fb, t, s).mul(&fg);
                        if lhs != rhs {
                            return Ok(Err(format!("tensor isomorphism is not natural along pair {p}")));
                        }
                    }
                }
            }
            Ok(Ok(()))
        })();
        Check::new("the tensor isomorphism is natural in both arguments", "tensor/naturality", outcome.unwrap_or_else(|e| Err(e.to_string())))
            .with("pairs", pairs.len().to_string())
    }
}

pub fn format_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows()).map(|i| {
        let r: Vec<String> = m.row(i).iter().map(|x| x.to_string()).collect();
        format!("[{}]", r.join(", "))
    }).collect();
    format!("[{}]", rows.join(", "))
}

/// Sum of two tuples.
pub fn tuple_add(a: &[Vector], b: &[Vector]) -> Tuple {
    a.iter().zip(b).map(|(x, y)| vec_add(x, y)).collect()
}

pub fn tuple_scale(a: &[Vector], s: &CycScalar) -> Tuple {
    a.iter().map(|x| vec_scale(x, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{derivative_space, BaseCalculus, QPBundle};
    use crate::hopf::{FiniteGroup, HopfAlgebra};
    use std::sync::Arc;

    fn context(bundle: QPBundle, points: usize, cap: usize) -> AssocContext {
        let hm = HorizontalModel::new(&bundle, BaseCalculus::universal(points, cap).unwrap(), 2).unwrap();
        let dm = derivative_space(&hm).unwrap().particular;
        AssocContext::new(hm, dm).unwrap()
    }

    fn all_pass(v: &[Check]) {
        for c in v {
            assert!(c.passed(), "{} [{}]: {:?}", c.name, c.anchor, c.outcome);
        }
    }

    #[test]
    fn checkerboard_sign_frame() {
        let h = Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::cyclic(2)));
        let ctx = context(QPBundle::checkerboard(h).unwrap(), 2, 2);
        let sign = ctx.irreps[1].clone();
        let f = ctx.frame(&sign).unwrap();
        assert_eq!(f.rank(), 2);
        assert_eq!(f.z, Matrix::identity(2));
        let p0 = ctx.hm.base.point(0);
        let p1 = ctx.hm.base.point(1);
        let zero = zero_vec(ctx.hm.base.dim());
        assert_eq!(f.e, vec![vec![p0, zero.clone()], vec![zero, p1]]);
        all_pass(&ctx.frame_checks(&f));
        all_pass(&ctx.flip_checks(&f));
        all_pass(&ctx.connection_checks(&f));
    }
}

#[cfg(test)]
mod corpus_tests {
    use super::*;
    use crate::bundle::{derivative_space, BaseCalculus, QPBundle};
    use crate::corep::mor_morphisms;
    use crate::hopf::{FiniteGroup, HopfAlgebra};
    use std::sync::Arc;

    fn report(v: &[Check]) -> usize {
        let mut bad = 0;
        for c in v {
            if !c.passed() {
                bad += 1;
                eprintln!("FAIL {} [{}]: {:?}", c.name, c.anchor, c.outcome);
            }
        }
        bad
    }

    #[test]
    fn whole_corpus() {
        let h = Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::cyclic(2)));
        let mut bad = 0;
        for (bundle, n) in [(QPBundle::checkerboard(h.clone()).unwrap(), 2), (QPBundle::trivial(2, h.clone()), 2), (QPBundle::point(h.clone()), 1)] {
            let hm = HorizontalModel::new(&bundle, BaseCalculus::universal(n, 3).unwrap(), 2).unwrap();
            let dm = derivative_space(&hm).unwrap().particular;
            let ctx = AssocContext::new(hm, dm).unwrap();
            let (t, s) = (ctx.irreps[0].clone(), ctx.irreps[1].clone());
            let coreps = vec![t.clone(), s.clone(), t.direct_sum(&s), s.tensor(&s), s.conjugate()];
            for c in &coreps {
                let f = ctx.frame(c).unwrap();
                bad += report(&ctx.frame_checks(&f));
                bad += report(&ctx.flip_checks(&f));
                bad += report(&ctx.connection_checks(&f));
            }
            let mut morphisms = Vec::new();
            for a in &coreps {
                for b in &coreps {
                    for par in [Parity::Even, Parity::Odd] {
                        morphisms.extend(mor_morphisms(a, b, par));
                    }
                }
            }
            for g in &morphisms {
                let (fa, fb) = (ctx.frame(&g.source).unwrap(), ctx.frame(&g.target).unwrap());
                bad += report(&ctx.morphism_checks(g, &fa, &fb));
            }
            let mut pairs = Vec::new();
            for f in &morphisms {
                for g in &morphisms {
                    if f.target == g.source && pairs.len() < 40 {
                        pairs.push((f.clone(), g.clone()));
                    }
                }
            }
            bad += report(&[ctx.functoriality(&pairs), ctx.exactness(&t, &s), ctx.conjugate_naturality(&morphisms)]);
            for c in [&t, &s] {
                let (f, fc) = (ctx.frame(c).unwrap(), ctx.frame(&c.conjugate()).unwrap());
                bad += report(&ctx.conjugate_checks(&f, &fc));
            }
            for a in [&t, &s] {
                for b in [&t, &s] {
                    let (fa, fb, fab) = (ctx.frame(a).unwrap(), ctx.frame(b).unwrap(), ctx.frame(&a.tensor(b)).unwrap());
                    bad += report(&ctx.tensor_checks(&fa, &fb, &fab));
                    for c in [&t, &s] {
                        if let Err(w) = ctx.associativity(&fa, &fb, &fab, &ctx.sections(c)) {
                            eprintln!("FAIL assoc {w}");
                            bad += 1;
                        }
                    }
                }
            }
            let tn = ctx.tensor_naturality(&pairs, &|c| ctx.frame(c));
            bad += report(&[tn]);
        }
        assert_eq!(bad, 0);
    }
}

