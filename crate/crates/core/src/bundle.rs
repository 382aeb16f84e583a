//! Quantum principal bundles over finite point sets: the bundle gate, the
//! universal base calculus, the horizontal-form model and the affine space of
//! covariant derivatives.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{FiniteAlgebra, Outcome};
use crate::comodule::{map_first_leg, ComoduleAlgebra};
use crate::corep::{irreducible_set, mor_space, Corep};
use crate::error::{Error, Result};
use crate::hopf::HopfAlgebra;
use crate::linalg::{axpy, span_dim, unit_vec, vec_add, vec_is_zero, vec_scale, vec_sub, zero_vec, AffineSolution, Matrix, Parity, Vector};
use crate::scalar::CycScalar;

fn sign(odd: bool) -> CycScalar {
    if odd {
        CycScalar::from_int(-1)
    } else {
        CycScalar::one()
    }
}

fn path_label(p: &[usize]) -> String {
    if p.len() == 1 {
        format!("p{}", p[0])
    } else {
        let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        format!("e{}", parts.join("-"))
    }
}

/// The universal differential calculus on the algebra of functions on a
/// finite set, truncated at a degree cap. Degree-`k` basis elements are
/// paths `p_{i0} dp_{i1} ⋯ dp_{ik}` with consecutive vertices distinct.
#[derive(Clone, Debug)]
pub struct BaseCalculus {
    pub points: usize,
    pub cap: usize,
    pub paths: Vec<Vec<usize>>,
    pub algebra: FiniteAlgebra,
    pub d: Matrix,
    index: HashMap<Vec<usize>, usize>,
}

impl BaseCalculus {
    pub fn universal(points: usize, cap: usize) -> Result<Self> {
        if cap > 3 {
            return Err(Error::Unsupported(format!("degree cap {cap} exceeds 3")));
        }
        if points == 0 {
            return Err(Error::Invalid("a base needs at least one point".into()));
        }
        let mut paths: Vec<Vec<usize>> = Vec::new();
        let mut frontier: Vec<Vec<usize>> = (0..points).map(|a| vec![a]).collect();
        for k in 0..=cap {
            if k > 0 {
                frontier = frontier
                    .iter()
                    .flat_map(|p| {
                        let last = *p.last().expect("nonempty path");
                        (0..points).filter(move |&v| v != last).map(move |v| {
                            let mut q = p.clone();
                            q.push(v);
                            q
                        })
                    })
                    .collect();
            }
            paths.extend(frontier.iter().cloned());
        }
        let index: HashMap<Vec<usize>, usize> = paths.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let dim = paths.len();
        let labels = paths.iter().map(|p| path_label(p)).collect();
        let degrees = paths.iter().map(|p| p.len() - 1).collect();
        let product = |i: usize, j: usize| {
            let (a, b) = (&paths[i], &paths[j]);
            let mut out = zero_vec(dim);
            if a.last() == b.first() && a.len() + b.len() - 2 <= cap {
                let mut c = a.clone();
                c.extend_from_slice(&b[1..]);
                out[index[&c]] = CycScalar::one();
            }
            out
        };
        let mut unit = zero_vec(dim);
        for x in unit.iter_mut().take(points) {
            *x = CycScalar::one();
        }
        let star = |i: usize| {
            let k = paths[i].len() - 1;
            let mut rev = paths[i].clone();
            rev.reverse();
            let mut out = zero_vec(dim);
            out[index[&rev]] = sign((k * (k + 1) / 2) % 2 == 1);
            out
        };
        let algebra = FiniteAlgebra::new(labels, degrees, product, unit, star);

        let mut d = Matrix::zeros(dim, dim);
        if cap >= 1 {
            for a in 0..points {
                for j in (0..points).filter(|&j| j != a) {
                    d[(index[&vec![j, a]], a)] = CycScalar::one();
                    d[(index[&vec![a, j]], a)] = CycScalar::from_int(-1);
                }
            }
        }
        for (i, p) in paths.iter().enumerate() {
            let value = match p.len() {
                1 => continue,
                2 => algebra.mul(&d.col(p[0]), &d.col(p[1])),
                _ => {
                    let first = index[&p[..2].to_vec()];
                    let rest = index[&p[1..].to_vec()];
                    let a = algebra.mul(&d.col(first), &algebra.basis(rest));
                    let b = algebra.mul(&algebra.basis(first), &d.col(rest));
                    vec_sub(&a, &b)
                }
            };
            d.set_col(i, &value);
        }
        Ok(BaseCalculus { points, cap, paths, algebra, d, index })
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn component_dim(&self, k: usize) -> usize {
        self.algebra.component(k).len()
    }

    pub fn path_index(&self, path: &[usize]) -> Option<usize> {
        self.index.get(path).copied()
    }

    /// The point function `p_a` (degree 0).
    pub fn point(&self, a: usize) -> Vector {
        unit_vec(self.dim(), a)
    }

    pub fn differential(&self, mu: &[CycScalar]) -> Vector {
        self.d.mul_vec(mu)
    }

    /// The automorphism induced by a permutation of the points.
    pub fn permutation_matrix(&self, perm: &[usize]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, p) in self.paths.iter().enumerate() {
            let q: Vec<usize> = p.iter().map(|&v| perm[v]).collect();
            m[(self.index[&q], i)] = CycScalar::one();
        }
        m
    }

    /// Graded *-algebra axioms, differential axioms, and generation of
    /// degree one by functions and their differentials.
    pub fn check_all(&self) -> Vec<(&'static str, Outcome)> {
        vec![
            ("base forms form a graded *-algebra", self.algebra.check_all()),
            ("base differential is a graded *-derivation with d² = 0", self.algebra.check_differential(&self.d)),
            ("functions generate the base one-forms", self.check_generation()),
        ]
    }

    fn check_generation(&self) -> Outcome {
        if self.cap == 0 {
            return Ok(());
        }
        let mut gens = Vec::new();
        for a in 0..self.points {
            for b in 0..self.points {
                gens.push(self.algebra.mul(&self.point(a), &self.d.col(b)));
            }
        }
        let got = span_dim(&gens);
        let want = self.component_dim(1);
        if got == want {
            Ok(())
        } else {
            Err(format!("p·dq span a {got}-dimensional space, Ω¹ has dimension {want}"))
        }
    }
}

/// A comodule *-algebra together with the point idempotents of its declared
/// invariant subalgebra and (optionally) transport generators.
#[derive(Clone, Debug)]
pub struct QPBundle {
    pub name: String,
    pub total: ComoduleAlgebra,
    /// minimal projections of the base algebra, as elements of the total algebra
    pub points: Vec<Vector>,
    /// elements `u_j` with `u_j p = s_j(p) u_j` and `GM = ⊕_j M u_j`
    pub transport: Vec<Vector>,
}

impl QPBundle {
    pub fn new(name: impl Into<String>, total: ComoduleAlgebra, points: Vec<Vector>, transport: Vec<Vector>) -> Self {
        QPBundle { name: name.into(), total, points, transport }
    }

    pub fn hopf(&self) -> &Arc<HopfAlgebra> {
        &self.total.hopf
    }

    pub fn dim(&self) -> usize {
        self.total.dim()
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.total.algebra
    }

    /// `M ⊗ 𝒢` over `points` points with coaction `id ⊗ Δ`.
    pub fn trivial(points: usize, hopf: Arc<HopfAlgebra>) -> Self {
        let n = hopf.dim();
        let m = points * n;
        let h = &hopf.algebra;
        let labels = (0..m).map(|i| format!("p{}⊗{}", i / n, h.labels[i % n])).collect();
        let product = |i: usize, j: usize| {
            let mut out = zero_vec(m);
            if i / n == j / n {
                let hk = h.mul(&h.basis(i % n), &h.basis(j % n));
                for (k, c) in hk.iter().enumerate() {
                    out[(i / n) * n + k] = c.clone();
                }
            }
            out
        };
        let mut unit = zero_vec(m);
        for a in 0..points {
            for (k, c) in h.unit().iter().enumerate() {
                unit[a * n + k] = c.clone();
            }
        }
        let star = |i: usize| {
            let mut out = zero_vec(m);
            for (k, c) in h.star(&h.basis(i % n)).iter().enumerate() {
                out[(i / n) * n + k] = c.clone();
            }
            out
        };
        let algebra = FiniteAlgebra::ungraded(labels, product, unit, star);
        let coaction = (0..m)
            .map(|i| {
                let mut out = zero_vec(m * n);
                for (p, c) in hopf.basis_coproduct(i % n) {
                    let (k, l) = (p / n, p % n);
                    out[((i / n) * n + k) * n + l] = c.clone();
                }
                out
            })
            .collect();
        let pts = (0..points)
            .map(|a| {
                let mut v = zero_vec(m);
                for (k, c) in h.unit().iter().enumerate() {
                    v[a * n + k] = c.clone();
                }
                v
            })
            .collect();
        let transport = (0..n)
            .map(|k| {
                let mut v = zero_vec(m);
                for a in 0..points {
                    v[a * n + k] = CycScalar::one();
                }
                v
            })
            .collect();
        let total = ComoduleAlgebra::new(algebra, hopf, coaction).expect("trivial bundle coaction shape");
        QPBundle::new(format!("trivial bundle over {points} points"), total, pts, transport)
    }

    /// The quantum group coacting on itself, over a single point.
    pub fn point(hopf: Arc<HopfAlgebra>) -> Self {
        let n = hopf.dim();
        let total = ComoduleAlgebra::regular(hopf.clone());
        let pts = vec![hopf.unit().clone()];
        let transport = (0..n).map(|k| unit_vec(n, k)).collect();
        QPBundle::new("point bundle", total, pts, transport)
    }

    /// `M₂(ℂ)` graded by `ℤ₂` (diagonal even, off-diagonal odd) under `C(ℤ₂)`.
    pub fn checkerboard(hopf: Arc<HopfAlgebra>) -> Result<Self> {
        if hopf.dim() != 2 {
            return Err(Error::Invalid("the checkerboard bundle needs a two-dimensional Hopf algebra".into()));
        }
        let labels: Vec<String> = ["E11", "E12", "E21", "E22"].iter().map(|s| s.to_string()).collect();
        let product = |i: usize, j: usize| {
            let (a, b, c, e) = (i / 2, i % 2, j / 2, j % 2);
            let mut out = zero_vec(4);
            if b == c {
                out[a * 2 + e] = CycScalar::one();
            }
            out
        };
        let star = |i: usize| unit_vec(4, (i % 2) * 2 + i / 2);
        let algebra = FiniteAlgebra::ungraded(labels, product, vec![1.into(), 0.into(), 0.into(), 1.into()], star);
        let h = &hopf.algebra;
        // function algebra of ℤ₂: the odd character is δ_e − δ_g
        let e = h.label_index("d_r0").ok_or_else(|| Error::Invalid("expected the function algebra of ℤ₂".into()))?;
        let mut odd = h.unit().clone();
        odd[1 - e] = CycScalar::from_int(-1);
        odd[e] = CycScalar::one();
        let coaction = (0..4)
            .map(|i| {
                let g = if i == 0 || i == 3 { h.unit().clone() } else { odd.clone() };
                crate::algebra::simple_tensor(&unit_vec(4, i), &g)
            })
            .collect();
        let total = ComoduleAlgebra::new(algebra, hopf, coaction)?;
        let points = vec![unit_vec(4, 0), unit_vec(4, 3)];
        let transport = vec![vec![1.into(), 0.into(), 0.into(), 1.into()], vec![0.into(), 1.into(), 1.into(), 0.into()]];
        Ok(QPBundle::new("checkerboard M2", total, points, transport))
    }

    /// Basis of the invariant subalgebra `{x : Φ(x) = x ⊗ 1}`.
    pub fn invariants(&self) -> Vec<Vector> {
        self.total.invariants()
    }

    /// Rank of the canonical map `x ⊗ y ↦ (x ⊗ 1)Φ(y)`.
    pub fn canonical_map_rank(&self) -> usize {
        let (m, n) = (self.dim(), self.hopf().dim());
        let a = self.algebra();
        let cols: Vec<Vector> = (0..m * m)
            .into_par_iter()
            .map(|p| {
                let (x, y) = (p / m, p % m);
                let lhs = crate::algebra::simple_tensor(&a.basis(x), self.hopf().unit());
                crate::algebra::tensor_algebra_mul(a, &self.hopf().algebra, &lhs, &self.total.coact(&a.basis(y)))
            })
            .collect();
        Matrix::from_cols(m * n, &cols).rank()
    }

    pub fn check_base(&self) -> Outcome {
        let a = self.algebra();
        let inv = self.invariants();
        for x in &inv {
            for y in &inv {
                if !self.total.is_invariant(&a.mul(x, y)) {
                    return Err("invariants are not closed under the product".into());
                }
            }
            if !self.total.is_invariant(&a.star(x)) {
                return Err("invariants are not closed under the star".into());
            }
        }
        let mut sum = zero_vec(self.dim());
        for (i, p) in self.points.iter().enumerate() {
            if a.star(p) != *p {
                return Err(format!("base point {i} is not self-adjoint"));
            }
            for (j, q) in self.points.iter().enumerate() {
                let pq = a.mul(p, q);
                let want = if i == j { p.clone() } else { zero_vec(self.dim()) };
                if pq != want || vec_is_zero(p) {
                    return Err(format!("base points {i} and {j} are not orthogonal projections"));
                }
            }
            if !self.total.is_invariant(p) {
                return Err(format!("base point {i} is not invariant"));
            }
            sum = vec_add(&sum, p);
        }
        if sum != *a.unit() {
            return Err("base points do not sum to the unit".into());
        }
        if inv.len() != self.points.len() {
            let pts = Matrix::from_cols(self.dim(), &self.points);
            let outside = inv.iter().find(|x| pts.solve_any(x).is_none()).cloned().unwrap_or_default();
            return Err(format!(
                "invariant subalgebra has dimension {}, the declared base {}; invariant element {} lies outside the base",
                inv.len(),
                self.points.len(),
                format_element(a, &outside)
            ));
        }
        Ok(())
    }

    pub fn check_canonical_map(&self) -> Outcome {
        let want = self.dim() * self.hopf().dim();
        let rank = self.canonical_map_rank();
        if rank == want {
            Ok(())
        } else {
            Err(format!("canonical map has rank {rank}, expected {want}"))
        }
    }

    /// The three bundle conditions, in order.
    pub fn check_all(&self) -> Vec<(&'static str, Outcome)> {
        let first = self.total.check_all().into_iter().map(|(_, o)| o).find(|o| o.is_err()).unwrap_or(Ok(()));
        vec![
            ("coaction is a unital *-homomorphism and a corepresentation", first),
            ("invariant elements form the base algebra", self.check_base()),
            ("canonical map is surjective", self.check_canonical_map()),
        ]
    }
}

/// Human-readable linear combination of basis labels.
pub fn format_element(a: &FiniteAlgebra, v: &[CycScalar]) -> String {
    let terms: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| if c.is_one() { a.labels[i].clone() } else { format!("({c})*{}", a.labels[i]) })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Horizontal forms `Ω(M) ⊗_M GM ≅ ⊕_j Ω(M) u_j`, with basis `(ω, j)` for a
/// path `ω` of the base calculus, stored at index `ω * r + j`.
#[derive(Clone, Debug)]
pub struct HorizontalModel {
    pub bundle: QPBundle,
    pub base: BaseCalculus,
    /// point permutations `u_j p_b = p_{s_j(b)} u_j`
    pub perms: Vec<Vec<usize>>,
    /// horizontal forms as a graded comodule *-algebra
    pub forms: ComoduleAlgebra,
    /// Peter–Weyl blocks: each irreducible with its section basis
    pub blocks: Vec<(Corep, Vec<Matrix>)>,
    /// GM → coordinates in the basis `p_a u_j` (index `a * r + j`)
    gm_coords: Matrix,
}

impl HorizontalModel {
    pub fn new(bundle: &QPBundle, base: BaseCalculus, conductor: u32) -> Result<Self> {
        let a = bundle.algebra();
        let (m, n, r) = (bundle.dim(), base.points, bundle.transport.len());
        if bundle.points.len() != n {
            return Err(Error::Invalid(format!("base calculus has {n} points, the bundle base {}", bundle.points.len())));
        }
        let mut perms = Vec::with_capacity(r);
        for (j, u) in bundle.transport.iter().enumerate() {
            let mut perm = vec![usize::MAX; n];
            for b in 0..n {
                let lhs = a.mul(u, &bundle.points[b]);
                perm[b] = (0..n)
                    .find(|&c| !vec_is_zero(&lhs) && a.mul(&bundle.points[c], u) == lhs)
                    .ok_or_else(|| Error::Invalid(format!("transport generator {j} does not permute the base points")))?;
            }
            let mut seen = perm.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != n {
                return Err(Error::Invalid(format!("transport generator {j} does not induce a bijection of points")));
            }
            perms.push(perm);
        }
        let cols: Vec<Vector> = (0..n * r).map(|p| a.mul(&bundle.points[p / r], &bundle.transport[p % r])).collect();
        if n * r != m {
            return Err(Error::Invalid(format!("{n} points × {r} transport generators do not match dim GM = {m}")));
        }
        let gm_coords = Matrix::from_cols(m, &cols)
            .inverse()
            .ok_or_else(|| Error::Invalid("the elements p_a u_j do not form a basis of the total algebra".into()))?;
        let perm_mats: Vec<Matrix> = perms.iter().map(|p| base.permutation_matrix(p)).collect();

        let om = &base.algebra;
        let bd = base.dim();
        let hd = bd * r;
        // ω · x for a base form ω and x ∈ GM
        let form_times = |w: &[CycScalar], x: &[CycScalar]| -> Vector {
            let c = gm_coords.mul_vec(x);
            let mut out = zero_vec(hd);
            for (p, cp) in c.iter().enumerate() {
                if cp.is_zero() {
                    continue;
                }
                let wa = om.mul(w, &base.point(p / r));
                for (b, x) in wa.iter().enumerate() {
                    if !x.is_zero() {
                        let k = b * r + p % r;
                        out[k] = &out[k] + &(cp * x);
                    }
                }
            }
            out
        };
        let uu: Vec<Vector> = (0..r * r).map(|p| a.mul(&bundle.transport[p / r], &bundle.transport[p % r])).collect();
        let product = |i: usize, j: usize| {
            let (w, ui) = (om.basis(i / r), i % r);
            let (v, uj) = (om.basis(j / r), j % r);
            let wv = om.mul(&w, &perm_mats[ui].mul_vec(&v));
            form_times(&wv, &uu[ui * r + uj])
        };
        let star = |i: usize| {
            let (w, ui) = (om.basis(i / r), i % r);
            let ws = om.star(&w);
            let c = gm_coords.mul_vec(&a.star(&bundle.transport[ui]));
            let mut out = zero_vec(hd);
            for (p, cp) in c.iter().enumerate() {
                if cp.is_zero() {
                    continue;
                }
                let (pa, l) = (p / r, p % r);
                let term = om.mul(&base.point(pa), &perm_mats[l].mul_vec(&ws));
                for (b, x) in term.iter().enumerate() {
                    if !x.is_zero() {
                        out[b * r + l] = &out[b * r + l] + &(cp * x);
                    }
                }
            }
            out
        };
        let labels = (0..hd).map(|i| format!("{}·u{}", om.labels[i / r], i % r)).collect();
        let degrees = (0..hd).map(|i| om.degrees[i / r]).collect();
        let unit = form_times(&om.unit().clone(), a.unit());
        let algebra = FiniteAlgebra::new(labels, degrees, product, unit, star);
        let nh = bundle.hopf().dim();
        let coaction = (0..hd)
            .map(|i| {
                let w = om.basis(i / r);
                let phi = bundle.total.coact(&bundle.transport[i % r]);
                let mut out = zero_vec(hd * nh);
                for (p, c) in phi.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let wx = form_times(&w, &a.basis(p / nh));
                    for (k, y) in wx.iter().enumerate() {
                        if !y.is_zero() {
                            out[k * nh + p % nh] = &out[k * nh + p % nh] + &(c * y);
                        }
                    }
                }
                out
            })
            .collect();
        let forms = ComoduleAlgebra::new(algebra, bundle.hopf().clone(), coaction)?;

        let phi = bundle.total.as_corep();
        let irreps = irreducible_set(bundle.hopf(), conductor)?;
        let blocks: Vec<(Corep, Vec<Matrix>)> = irreps
            .into_iter()
            .map(|alpha| {
                let secs = mor_space(&alpha, &phi, Parity::Even);
                (alpha, secs)
            })
            .collect();
        let total: usize = blocks.iter().map(|(c, s)| c.dim() * s.len()).sum();
        if total != m {
            return Err(Error::Invalid(format!("Peter–Weyl blocks have total dimension {total}, the total algebra {m}")));
        }
        Ok(HorizontalModel { bundle: bundle.clone(), base, perms, forms, blocks, gm_coords })
    }

    pub fn transport_count(&self) -> usize {
        self.bundle.transport.len()
    }

    pub fn dim(&self) -> usize {
        self.forms.dim()
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.forms.algebra
    }

    pub fn degree(&self, i: usize) -> usize {
        self.forms.algebra.degrees[i]
    }

    pub fn cap(&self) -> usize {
        self.base.cap
    }

    /// `ω · x` for a base form `ω` and `x` in the total algebra.
    pub fn form_times(&self, w: &[CycScalar], x: &[CycScalar]) -> Vector {
        let r = self.transport_count();
        let c = self.gm_coords.mul_vec(x);
        let mut out = zero_vec(self.dim());
        for (p, cp) in c.iter().enumerate() {
            if cp.is_zero() {
                continue;
            }
            let wa = self.base.algebra.mul(w, &self.base.point(p / r));
            for (b, y) in wa.iter().enumerate() {
                if !y.is_zero() {
                    let k = b * r + p % r;
                    out[k] = &out[k] + &(cp * y);
                }
            }
        }
        out
    }

    pub fn embed_base(&self, w: &[CycScalar]) -> Vector {
        self.form_times(w, self.bundle.algebra().unit())
    }

    pub fn embed_total(&self, x: &[CycScalar]) -> Vector {
        self.form_times(self.base.algebra.unit(), x)
    }

    /// Matrix of the embedding of base forms (`dim Hor × dim Ω`).
    pub fn base_embedding(&self) -> Matrix {
        let cols: Vec<Vector> = (0..self.base.dim()).map(|b| self.embed_base(&self.base.algebra.basis(b))).collect();
        Matrix::from_cols(self.dim(), &cols)
    }

    /// Matrix of the embedding of the total algebra (`dim Hor × dim GM`).
    pub fn total_embedding(&self) -> Matrix {
        let a = self.bundle.algebra();
        let cols: Vec<Vector> = (0..a.dim()).map(|i| self.embed_total(&a.basis(i))).collect();
        Matrix::from_cols(self.dim(), &cols)
    }

    pub fn mul(&self, x: &[CycScalar], y: &[CycScalar]) -> Vector {
        self.forms.algebra.mul(x, y)
    }

    pub fn star(&self, x: &[CycScalar]) -> Vector {
        self.forms.algebra.star(x)
    }

    /// Matrix `S` with `x* = S·conj(x)`.
    pub fn star_matrix(&self) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim()).map(|i| self.star(&unit_vec(self.dim(), i))).collect();
        Matrix::from_cols(self.dim(), &cols)
    }

    /// Basis indices of the given degree.
    pub fn component(&self, k: usize) -> Vec<usize> {
        self.forms.algebra.component(k)
    }

    pub fn check_all(&self) -> Vec<(&'static str, Outcome)> {
        let mut out = vec![("horizontal forms form a graded *-algebra", self.forms.algebra.check_all())];
        let co = self.forms.check_all().into_iter().skip(1).map(|(_, o)| o).find(|o| o.is_err()).unwrap_or(Ok(()));
        out.push(("horizontal coaction is a graded *-homomorphism", co));
        out.push(("horizontal coaction extends the bundle coaction", self.check_extends()));
        out.push(("invariant horizontal forms are the base forms", self.check_invariants()));
        out
    }

    fn check_extends(&self) -> Outcome {
        let a = self.bundle.algebra();
        let nh = self.bundle.hopf().dim();
        let emb = self.total_embedding();
        for i in 0..a.dim() {
            let x = a.basis(i);
            let lhs = self.forms.coact(&self.embed_total(&x));
            let rhs = map_first_leg(&emb, &self.bundle.total.coact(&x), nh);
            if lhs != rhs {
                return Err(format!("coaction differs on {}", a.labels[i]));
            }
        }
        Ok(())
    }

    fn check_invariants(&self) -> Outcome {
        let inv = self.forms.invariants();
        let emb = self.base_embedding();
        if inv.len() != self.base.dim() || emb.rank() != self.base.dim() {
            return Err(format!("{} invariant horizontal forms, {} base forms", inv.len(), self.base.dim()));
        }
        for v in &inv {
            if emb.solve_any(v).is_none() {
                return Err("an invariant horizontal form is not a base form".into());
            }
        }
        Ok(())
    }
}

/// A degree +1 map on horizontal forms, stored as its full matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariantDerivative {
    pub matrix: Matrix,
}

impl CovariantDerivative {
    pub fn apply(&self, x: &[CycScalar]) -> Vector {
        self.matrix.mul_vec(x)
    }

    /// The map `* ∘ D ∘ *`.
    pub fn conjugated(&self, star: &Matrix) -> CovariantDerivative {
        CovariantDerivative { matrix: star.mul(&self.matrix.conj()).mul(&star.conj()) }
    }

    /// The connection coefficients `D(u_j)`.
    pub fn on_transport(&self, hm: &HorizontalModel) -> Vec<Vector> {
        hm.bundle.transport.iter().map(|u| self.apply(&hm.embed_total(u))).collect()
    }
}

/// The derivation `ω u_j ↦ dω u_j + (−1)^k ω g_j` for prescribed values `g_j = D(u_j)`.
pub fn derivative_from_transport(hm: &HorizontalModel, values: &[Vector]) -> CovariantDerivative {
    let r = hm.transport_count();
    let bd = hm.base.dim();
    let cols: Vec<Vector> = (0..bd * r)
        .map(|i| {
            let (w, j) = (hm.base.algebra.basis(i / r), i % r);
            let k = hm.base.algebra.degrees[i / r];
            let mut out = hm.form_times(&hm.base.differential(&w), &hm.bundle.transport[j]);
            if !vec_is_zero(&values[j]) {
                let t = hm.mul(&hm.embed_base(&w), &values[j]);
                axpy(&mut out, &sign(k % 2 == 1), &t);
            }
            out
        })
        .collect();
    CovariantDerivative { matrix: Matrix::from_cols(hm.dim(), &cols) }
}

/// Residual vectors of all defining conditions except the star condition.
fn linear_residuals(hm: &HorizontalModel, dm: &CovariantDerivative, leibniz_left: &[usize], covariant: bool) -> Vec<Vector> {
    let dim = hm.dim();
    let cap = hm.cap();
    let nh = hm.bundle.hopf().dim();
    let mut res = Vec::new();
    for b in 0..hm.base.dim() {
        let w = hm.base.algebra.basis(b);
        res.push(vec_sub(&dm.apply(&hm.embed_base(&w)), &hm.embed_base(&hm.base.differential(&w))));
    }
    for x in leibniz_left {
        for y in 0..dim {
            let (kx, ky) = (hm.degree(*x), hm.degree(y));
            if kx + ky + 1 > cap {
                continue;
            }
            res.push(leibniz_defect(hm, dm, &unit_vec(dim, *x), kx, &unit_vec(dim, y)));
        }
    }
    for i in (0..dim).filter(|_| covariant) {
        let x = unit_vec(dim, i);
        let lhs = hm.forms.coact(&dm.apply(&x));
        let rhs = map_first_leg(&dm.matrix, &hm.forms.coact(&x), nh);
        res.push(vec_sub(&lhs, &rhs));
    }
    res
}

fn leibniz_defect(hm: &HorizontalModel, dm: &CovariantDerivative, x: &[CycScalar], kx: usize, y: &[CycScalar]) -> Vector {
    let lhs = dm.apply(&hm.mul(x, y));
    let mut rhs = hm.mul(&dm.apply(x), y);
    axpy(&mut rhs, &sign(kx % 2 == 1), &hm.mul(x, &dm.apply(y)));
    vec_sub(&lhs, &rhs)
}

/// Solution set of the covariant-derivative conditions: a *-invariant
/// particular solution plus a basis of displacements (complex span).
#[derive(Clone, Debug)]
pub struct DerivativeSpace {
    pub particular: CovariantDerivative,
    pub displacements: Vec<Matrix>,
}

impl DerivativeSpace {
    /// Star-invariant members spanning the solution set over the reals:
    /// the particular solution shifted by `K + K†` and `λK + conj(λ)K†`.
    pub fn sample_members(&self, hm: &HorizontalModel) -> Vec<CovariantDerivative> {
        let s = hm.star_matrix();
        let lambda = CycScalar::root_of_unity(hm.bundle.hopf().splitting_conductor.max(3));
        let mut out = vec![self.particular.clone()];
        for k in &self.displacements {
            let kd = CovariantDerivative { matrix: k.clone() }.conjugated(&s).matrix;
            out.push(CovariantDerivative { matrix: self.particular.matrix.add(k).add(&kd) });
            let tw = k.scale(&lambda).add(&kd.scale(&lambda.conj()));
            out.push(CovariantDerivative { matrix: self.particular.matrix.add(&tw) });
        }
        out
    }

    /// Whether `dm` differs from the particular solution by a displacement.
    pub fn contains(&self, dm: &CovariantDerivative) -> bool {
        let diff = dm.matrix.sub(&self.particular.matrix);
        let flat = |m: &Matrix| -> Vector { (0..m.rows()).flat_map(|i| m.row(i).to_vec()).collect() };
        if self.displacements.is_empty() {
            return diff.is_zero();
        }
        let cols: Vec<Vector> = self.displacements.iter().map(flat).collect();
        Matrix::from_cols(diff.rows() * diff.cols(), &cols).solve_any(&flat(&diff)).is_some()
    }
}

/// Solves the covariant-derivative conditions with the values `D(u_j)` as unknowns.
pub fn derivative_space(hm: &HorizontalModel) -> Result<DerivativeSpace> {
    solve_derivatives(hm, true)
}

/// Degree +1 derivations restricting to `d`, without the covariance condition
/// (the raw solution set, not symmetrized under the star).
pub fn derivation_space(hm: &HorizontalModel) -> Result<DerivativeSpace> {
    solve_derivatives(hm, false)
}

fn solve_derivatives(hm: &HorizontalModel, covariant: bool) -> Result<DerivativeSpace> {
    let r = hm.transport_count();
    let one_forms = hm.component(1);
    let zero = vec![zero_vec(hm.dim()); r];
    let base_d = derivative_from_transport(hm, &zero);
    let mut left: Vec<usize> = hm.component(0);
    left.extend(one_forms.iter().filter(|&&i| i % r == 0));
    let unknowns: Vec<(usize, usize)> = (0..r).flat_map(|j| one_forms.iter().map(move |&i| (j, i))).collect();
    let r0: Vector = linear_residuals(hm, &base_d, &left, covariant).concat();
    let cols: Vec<Vector> = unknowns
        .par_iter()
        .map(|&(j, i)| {
            let mut vals = zero.clone();
            vals[j] = unit_vec(hm.dim(), i);
            let dm = derivative_from_transport(hm, &vals);
            let full: Vector = linear_residuals(hm, &dm, &left, covariant).concat();
            vec_sub(&full, &r0)
        })
        .collect();
    let (rows, rhs) = if cols.is_empty() {
        (Matrix::zeros(r0.len(), 0), r0.iter().map(|x| -x).collect::<Vector>())
    } else {
        (Matrix::from_cols(r0.len(), &cols), r0.iter().map(|x| -x).collect())
    };
    // drop identically zero equations before elimination
    let keep: Vec<usize> = (0..rows.rows()).filter(|&i| !vec_is_zero(rows.row(i)) || !rhs[i].is_zero()).collect();
    let sys = Matrix::from_fn(keep.len(), rows.cols(), |i, j| rows[(keep[i], j)].clone());
    let b: Vector = keep.iter().map(|&i| rhs[i].clone()).collect();
    let (particular, kernel) = match sys.solve_affine(&b) {
        AffineSolution::Solved { particular, kernel } => (particular, kernel),
        AffineSolution::Infeasible => return Err(Error::Invalid("no covariant derivative exists on this horizontal model".into())),
    };
    let to_values = |c: &[CycScalar]| -> Vec<Vector> {
        let mut vals = zero.clone();
        for (t, &(j, i)) in unknowns.iter().enumerate() {
            vals[j][i] = &vals[j][i] + &c[t];
        }
        vals
    };
    let mut p = derivative_from_transport(hm, &to_values(&particular));
    if covariant {
        let pd = p.conjugated(&hm.star_matrix());
        p = CovariantDerivative { matrix: p.matrix.add(&pd.matrix).scale(&CycScalar::frac(1, 2)) };
    }
    let particular = p;
    let displacements = kernel
        .iter()
        .map(|k| derivative_from_transport(hm, &to_values(k)).matrix.sub(&base_d.matrix))
        .collect();
    Ok(DerivativeSpace { particular, displacements })
}

/// The defining conditions of a covariant derivative, each with a witness.
pub fn check_derivative(hm: &HorizontalModel, dm: &CovariantDerivative) -> Vec<(&'static str, Outcome)> {
    let dim = hm.dim();
    let cap = hm.cap();
    let nh = hm.bundle.hopf().dim();
    let labels = &hm.algebra().labels;
    let degree_ok = (|| {
        for i in 0..dim {
            let v = dm.apply(&unit_vec(dim, i));
            if !vec_is_zero(&v) && hm.algebra().degree_of(&v) != Some(hm.degree(i) + 1) {
                return Err(format!("D({}) is not of degree {}", labels[i], hm.degree(i) + 1));
            }
        }
        Ok(())
    })();
    let covariant = (0..dim)
        .into_par_iter()
        .find_map_first(|i| {
            let x = unit_vec(dim, i);
            let lhs = hm.forms.coact(&dm.apply(&x));
            let rhs = map_first_leg(&dm.matrix, &hm.forms.coact(&x), nh);
            (lhs != rhs).then(|| format!("coaction does not intertwine D on {}", labels[i]))
        })
        .map_or(Ok(()), Err);
    let leibniz = (0..dim * dim)
        .into_par_iter()
        .find_map_first(|p| {
            let (x, y) = (p / dim, p % dim);
            let kx = hm.degree(x);
            if kx + hm.degree(y) + 1 > cap {
                return None;
            }
            let defect = leibniz_defect(hm, dm, &unit_vec(dim, x), kx, &unit_vec(dim, y));
            (!vec_is_zero(&defect)).then(|| format!("graded Leibniz rule fails on ({}, {})", labels[x], labels[y]))
        })
        .map_or(Ok(()), Err);
    let s = hm.star_matrix();
    let star = (|| {
        let dd = dm.conjugated(&s);
        for i in 0..dim {
            if dd.matrix.col(i) != dm.matrix.col(i) {
                return Err(format!("D(x*) != D(x)* for x = {}", labels[i]));
            }
        }
        Ok(())
    })();
    let restricts = (|| {
        for b in 0..hm.base.dim() {
            let w = hm.base.algebra.basis(b);
            if dm.apply(&hm.embed_base(&w)) != hm.embed_base(&hm.base.differential(&w)) {
                return Err(format!("D differs from d on the base form {}", hm.base.algebra.labels[b]));
            }
        }
        Ok(())
    })();
    vec![
        ("D raises degree by one", degree_ok),
        ("D intertwines the horizontal coaction", covariant),
        ("D satisfies the graded Leibniz rule", leibniz),
        ("D commutes with the star", star),
        ("D restricts to d on base forms", restricts),
    ]
}

/// `D²` as a matrix, for curvature.
pub fn derivative_squared(dm: &CovariantDerivative) -> Matrix {
    dm.matrix.mul(&dm.matrix)
}

pub fn scaled(v: &[CycScalar], s: i64) -> Vector {
    vec_scale(v, &CycScalar::from_int(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::FiniteGroup;

    fn cz2() -> Arc<HopfAlgebra> {
        Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::cyclic(2)))
    }

    fn all_pass(v: &[(&str, Outcome)]) {
        for (name, o) in v {
            assert!(o.is_ok(), "{name}: {o:?}");
        }
    }

    #[test]
    fn universal_calculus_dimensions() {
        let one = BaseCalculus::universal(1, 2).unwrap();
        assert_eq!(one.component_dim(1), 0);
        assert!(one.d.is_zero());
        let two = BaseCalculus::universal(2, 3).unwrap();
        assert_eq!((two.component_dim(1), two.component_dim(2)), (2, 2));
        all_pass(&two.check_all());
        let three = BaseCalculus::universal(3, 3).unwrap();
        all_pass(&three.check_all());
        assert!(BaseCalculus::universal(2, 4).is_err());
    }

    #[test]
    fn bundle_gate() {
        let h = cz2();
        let m2 = QPBundle::checkerboard(h.clone()).unwrap();
        all_pass(&m2.check_all());
        assert_eq!(m2.canonical_map_rank(), 8);
        assert_eq!(m2.invariants().len(), 2);
        all_pass(&QPBundle::trivial(2, h.clone()).check_all());
        all_pass(&QPBundle::point(h).check_all());
    }

    #[test]
    fn horizontal_models_and_derivatives() {
        let h = cz2();
        for (bundle, n) in [(QPBundle::checkerboard(h.clone()).unwrap(), 2), (QPBundle::trivial(2, h.clone()), 2), (QPBundle::point(h.clone()), 1)] {
            let hm = HorizontalModel::new(&bundle, BaseCalculus::universal(n, 2).unwrap(), 2).unwrap();
            all_pass(&hm.check_all());
            let space = derivative_space(&hm).unwrap();
            for dm in space.sample_members(&hm) {
                all_pass(&check_derivative(&hm, &dm));
            }
        }
    }

    #[test]
    fn broken_derivatives_fail_the_right_check() {
        let h = cz2();
        let hm = HorizontalModel::new(&QPBundle::checkerboard(h).unwrap(), BaseCalculus::universal(2, 2).unwrap(), 2).unwrap();
        let zero = CovariantDerivative { matrix: Matrix::zeros(hm.dim(), hm.dim()) };
        let res = check_derivative(&hm, &zero);
        assert!(res.iter().find(|(n, _)| *n == "D restricts to d on base forms").unwrap().1.is_err());
        // a Leibniz derivation restricting to d, twisted off the star-invariant locus
        let raw = derivation_space(&hm).unwrap();
        let s = hm.star_matrix();
        let i = CycScalar::root_of_unity(4);
        let broken = raw
            .displacements
            .iter()
            .flat_map(|k| [k.clone(), k.scale(&i)])
            .map(|k| CovariantDerivative { matrix: raw.particular.matrix.add(&k) })
            .find(|dm| dm.conjugated(&s) != *dm)
            .expect("a derivation that is not star-compatible");
        let res = check_derivative(&hm, &broken);
        let status = |name: &str| res.iter().find(|(n, _)| *n == name).unwrap().1.is_ok();
        assert!(status("D satisfies the graded Leibniz rule"));
        assert!(status("D restricts to d on base forms"));
        assert!(status("D raises degree by one"));
        assert!(!status("D commutes with the star"));
    }
}
