//! Bicovariant first-order calculi over a finite quantum group, the algebra
//! of left-invariant forms up to a degree cap, vertical forms on a comodule
//! algebra, and the curvature of the canonical connection on the point bundle.

use std::sync::Arc;

use crate::algebra::{simple_tensor, FiniteAlgebra, Outcome};
use crate::comodule::ComoduleAlgebra;
use crate::corep::Corep;
use crate::error::{Error, Result};
use crate::hopf::HopfAlgebra;
use crate::linalg::{axpy, unit_vec, vec_is_zero, zero_vec, EchelonBasis, Matrix, Quotient, Vector};
use crate::scalar::CycScalar;

/// A bicovariant first-order calculus given by its right ideal `R ⊆ ker ε`.
#[derive(Clone, Debug)]
pub struct Fodc {
    pub hopf: Arc<HopfAlgebra>,
    /// basis of the right ideal
    pub ideal: Vec<Vector>,
    /// `H → invΓ = H / (ℂ1 + R)`; on `ker ε` this is the germs map
    germs: Quotient,
}

impl Fodc {
    /// Closes the generators to a right ideal and validates it.
    pub fn new(hopf: Arc<HopfAlgebra>, generators: &[Vector]) -> Result<Self> {
        let n = hopf.dim();
        for (i, g) in generators.iter().enumerate() {
            if !hopf.counit(g).is_zero() {
                return Err(Error::Invalid(format!("ideal generator {} is not in the kernel of the counit", i + 1)));
            }
        }
        let mut basis = EchelonBasis::new();
        for g in generators {
            basis.insert(g);
        }
        let mut i = 0;
        while i < basis.len() {
            let r = basis.vectors()[i].clone();
            for x in 0..n {
                basis.insert(&hopf.mul(&r, &unit_vec(n, x)));
            }
            i += 1;
        }
        let ideal = basis.vectors().to_vec();
        let mut rels = ideal.clone();
        rels.push(hopf.unit().clone());
        let germs = Quotient::new(n, &rels);
        let f = Fodc { hopf, ideal, germs };
        f.check_ad_invariant().map_err(Error::Invalid)?;
        Ok(f)
    }

    pub fn universal(hopf: Arc<HopfAlgebra>) -> Self {
        Self::new(hopf, &[]).expect("the zero ideal is always valid")
    }

    /// Dimension of the space of left-invariant 1-forms.
    pub fn dim(&self) -> usize {
        self.germs.dim()
    }

    /// The germs map `π(g) = [g - ε(g)1]`.
    pub fn pi(&self, g: &[CycScalar]) -> Vector {
        self.germs.project(g)
    }

    /// A preimage of `θ` under `π`.
    pub fn lift(&self, theta: &[CycScalar]) -> Vector {
        self.germs.lift(theta)
    }

    fn ideal_quotient(&self) -> Quotient {
        Quotient::new(self.hopf.dim(), &self.ideal)
    }

    /// `ad(g) = g⁽²⁾ ⊗ κ(g⁽¹⁾) g⁽³⁾` in `H ⊗ H`.
    pub fn ad_raw(&self, g: &[CycScalar]) -> Vector {
        let h = &self.hopf;
        let n = h.dim();
        let mut out = zero_vec(n * n);
        let d = h.coproduct(g);
        for (p, c) in d.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (a, bc) = (p / n, p % n);
            let ka = h.antipode(&unit_vec(n, a));
            let d2 = h.coproduct(&unit_vec(n, bc));
            for (q, e) in d2.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let (b, cc) = (q / n, q % n);
                let right = h.mul(&ka, &unit_vec(n, cc));
                axpy(&mut out, &(c * e), &simple_tensor(&unit_vec(n, b), &right));
            }
        }
        out
    }

    pub fn check_ad_invariant(&self) -> Outcome {
        let q = self.ideal_quotient();
        let n = self.hopf.dim();
        for (i, r) in self.ideal.iter().enumerate() {
            let img = crate::comodule::map_first_leg(&q.projection, &self.ad_raw(r), n);
            if !vec_is_zero(&img) {
                return Err(format!("ad(r_{}) is not in R ⊗ H", i + 1));
            }
        }
        Ok(())
    }

    pub fn check_right_ideal(&self) -> Outcome {
        let q = self.ideal_quotient();
        let n = self.hopf.dim();
        for (i, r) in self.ideal.iter().enumerate() {
            if !self.hopf.counit(r).is_zero() {
                return Err(format!("r_{} is not in ker ε", i + 1));
            }
            for x in 0..n {
                if !vec_is_zero(&q.project(&self.hopf.mul(r, &unit_vec(n, x)))) {
                    return Err(format!("r_{} {} is not in R", i + 1, self.hopf.algebra.labels[x]));
                }
            }
        }
        Ok(())
    }

    /// The right action `θ ∘ h = π(g h - ε(g) h)` for a lift `g` of `θ`.
    pub fn act(&self, theta: &[CycScalar], h: &[CycScalar]) -> Vector {
        let g = self.lift(theta);
        let gh = self.hopf.mul(&g, h);
        let e = self.hopf.counit(&g);
        let mut v = gh;
        axpy(&mut v, &-e, h);
        self.pi(&v)
    }

    /// Matrix of `θ ↦ θ ∘ x_k` for each basis element `x_k`.
    pub fn action_matrices(&self) -> Vec<Matrix> {
        let n = self.hopf.dim();
        let m = self.dim();
        (0..n)
            .map(|k| {
                let cols: Vec<Vector> = (0..m).map(|q| self.act(&unit_vec(m, q), &unit_vec(n, k))).collect();
                Matrix::from_cols(m, &cols)
            })
            .collect()
    }

    /// `π(g) ∘ g' = π(g g' - ε(g) g')` on all basis pairs.
    pub fn check_germs_identity(&self) -> Outcome {
        let n = self.hopf.dim();
        for a in 0..n {
            let g = unit_vec(n, a);
            let pg = self.pi(&g);
            for b in 0..n {
                let h = unit_vec(n, b);
                let lhs = self.act(&pg, &h);
                let mut v = self.hopf.mul(&g, &h);
                axpy(&mut v, &-self.hopf.counit(&g), &h);
                if lhs != self.pi(&v) {
                    let l = &self.hopf.algebra.labels;
                    return Err(format!("π({}) ∘ {} != π({} {} - ε({}) {})", l[a], l[b], l[a], l[b], l[a], l[b]));
                }
            }
        }
        Ok(())
    }

    /// Right adjoint coaction on `invΓ`.
    pub fn adjoint_coaction(&self) -> Result<Corep> {
        self.check_ad_invariant().map_err(Error::Invalid)?;
        let n = self.hopf.dim();
        let m = self.dim();
        let images: Vec<Vector> = (0..m)
            .map(|q| crate::comodule::map_first_leg(&self.germs.projection, &self.ad_raw(&self.lift(&unit_vec(m, q))), n))
            .collect();
        Ok(Corep::from_fn(self.hopf.clone(), "ad", m, |i, j| (0..n).map(|h| images[j][i * n + h].clone()).collect()))
    }

    /// `π(g)* = -π(κ(g)*)`, antilinear.
    pub fn star(&self, theta: &[CycScalar]) -> Vector {
        let g = self.lift(theta);
        let s = self.hopf.star(&self.hopf.antipode(&g));
        self.pi(&s).iter().map(|x| -x).collect()
    }

    /// The star descends to `invΓ` iff `κ(R)* ⊆ R`.
    pub fn check_star_compatible(&self) -> Outcome {
        let q = self.ideal_quotient();
        for (i, r) in self.ideal.iter().enumerate() {
            let s = self.hopf.star(&self.hopf.antipode(r));
            if !vec_is_zero(&q.project(&s)) {
                return Err(format!("κ(r_{})* is not in R", i + 1));
            }
        }
        Ok(())
    }

    /// `(π ⊗ π)Δ(g)` in `invΓ ⊗ invΓ`.
    pub fn pi_pi_coproduct(&self, g: &[CycScalar]) -> Vector {
        let n = self.hopf.dim();
        let m = self.dim();
        let d = self.hopf.coproduct(g);
        let mut out = zero_vec(m * m);
        for (p, c) in d.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = simple_tensor(&self.pi(&unit_vec(n, p / n)), &self.pi(&unit_vec(n, p % n)));
            axpy(&mut out, c, &t);
        }
        out
    }

    /// Spanning set of the quadratic relations `π(r⁽¹⁾) ⊗ π(r⁽²⁾)`.
    pub fn quadratic_relations(&self) -> Vec<Vector> {
        self.ideal.iter().map(|r| self.pi_pi_coproduct(r)).filter(|v| !vec_is_zero(v)).collect()
    }
}

/// One homogeneous component `invΓ^{⊗k} / relations`.
#[derive(Clone, Debug)]
struct Level {
    quotient: Quotient,
}

/// Left-invariant forms `invΓ^∧` up to a degree cap, as a graded
/// differential *-algebra with the right action of the Hopf algebra.
#[derive(Clone, Debug)]
pub struct InvariantForms {
    pub fodc: Fodc,
    pub cap: usize,
    levels: Vec<Level>,
    /// offsets of each level in the total basis
    offsets: Vec<usize>,
    pub algebra: FiniteAlgebra,
    /// differential on the total space
    pub d: Matrix,
    /// `action[k]`: matrix of `w ↦ w ∘ x_k` on the total space
    pub action: Vec<Matrix>,
}

fn pow(m: usize, k: usize) -> usize {
    m.pow(k as u32)
}

impl InvariantForms {
    pub fn new(fodc: &Fodc, cap: usize) -> Result<Self> {
        if cap > 3 {
            return Err(Error::Unsupported("degree cap above 3".into()));
        }
        let m = fodc.dim();
        let s = fodc.quadratic_relations();
        let mut levels = Vec::new();
        for k in 0..=cap {
            let ambient = pow(m, k);
            let mut rels = Vec::new();
            if k >= 2 {
                for i in 0..=k - 2 {
                    let (pre, post) = (pow(m, i), pow(m, k - 2 - i));
                    for a in 0..pre {
                        for r in &s {
                            for b in 0..post {
                                let left = simple_tensor(&unit_vec(pre, a), r);
                                rels.push(simple_tensor(&left, &unit_vec(post, b)));
                            }
                        }
                    }
                }
            }
            levels.push(Level { quotient: Quotient::new(ambient, &rels) });
        }
        let mut offsets = vec![0];
        for l in &levels {
            offsets.push(offsets.last().unwrap() + l.quotient.dim());
        }
        let total = *offsets.last().unwrap();
        let mut labels = Vec::with_capacity(total);
        let mut degrees = Vec::with_capacity(total);
        for (k, l) in levels.iter().enumerate() {
            for i in 0..l.quotient.dim() {
                labels.push(if k == 0 { "1".to_string() } else { format!("w{k}_{}", i + 1) });
                degrees.push(k);
            }
        }
        let mut forms = InvariantForms {
            fodc: fodc.clone(),
            cap,
            levels,
            offsets,
            algebra: FiniteAlgebra::ungraded(vec![], |_, _| vec![], vec![], |_| vec![]),
            d: Matrix::zeros(0, 0),
            action: vec![],
        };
        forms.build(labels, degrees)?;
        Ok(forms)
    }

    fn degree_of_index(&self, i: usize) -> usize {
        (0..self.levels.len()).find(|&k| i < self.offsets[k + 1]).unwrap()
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn component_dim(&self, k: usize) -> usize {
        self.levels[k].quotient.dim()
    }

    /// Lift of a total-basis element to a flat tensor of its degree.
    fn lift_basis(&self, i: usize) -> (usize, Vector) {
        let k = self.degree_of_index(i);
        let local = i - self.offsets[k];
        let q = &self.levels[k].quotient;
        (k, q.lift(&unit_vec(q.dim(), local)))
    }

    /// Embeds a flat tensor of degree `k` into the total space.
    pub fn from_flat(&self, k: usize, t: &[CycScalar]) -> Vector {
        let mut out = zero_vec(self.dim());
        if k > self.cap {
            return out;
        }
        let local = self.levels[k].quotient.project(t);
        for (j, x) in local.into_iter().enumerate() {
            out[self.offsets[k] + j] = x;
        }
        out
    }

    /// Embeds an element of `invΓ` (degree 1).
    pub fn from_one_form(&self, theta: &[CycScalar]) -> Vector {
        self.from_flat(1, theta)
    }

    /// Projection of `invΓ ⊗ invΓ` onto degree 2.
    pub fn wedge2(&self, t: &[CycScalar]) -> Vector {
        self.from_flat(2, t)
    }

    fn flat_mul(&self, k: usize, a: &[CycScalar], l: usize, b: &[CycScalar]) -> Vector {
        if k + l > self.cap {
            return zero_vec(self.dim());
        }
        self.from_flat(k + l, &simple_tensor(a, b))
    }

    /// `t ∘ h` on a flat tensor of degree `k`, via the iterated coproduct.
    fn act_flat(&self, k: usize, t: &[CycScalar], h: &[CycScalar]) -> Vector {
        let hopf = &self.fodc.hopf;
        if k == 0 {
            let e = hopf.counit(h);
            return t.iter().map(|x| x * &e).collect();
        }
        if k == 1 {
            return self.fodc.act(t, h);
        }
        let m = self.fodc.dim();
        let n = hopf.dim();
        let rest = pow(m, k - 1);
        let d = hopf.coproduct(h);
        let mut out = zero_vec(pow(m, k));
        for i in 0..m {
            let part: Vector = t[i * rest..(i + 1) * rest].to_vec();
            if vec_is_zero(&part) {
                continue;
            }
            let head = unit_vec(m, i);
            for (p, c) in d.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let a = self.fodc.act(&head, &unit_vec(n, p / n));
                if vec_is_zero(&a) {
                    continue;
                }
                let b = self.act_flat(k - 1, &part, &unit_vec(n, p % n));
                axpy(&mut out, c, &simple_tensor(&a, &b));
            }
        }
        out
    }

    /// Flat differential from degree `k` to `k + 1`.
    fn d_flat(&self, k: usize, t: &[CycScalar]) -> Vector {
        let m = self.fodc.dim();
        let mut out = zero_vec(pow(m, k + 1));
        if k == 0 {
            return out;
        }
        // dθ = -π(g⁽¹⁾) ⊗ π(g⁽²⁾)
        let d1: Vec<Vector> = (0..m)
            .map(|q| {
                let g = self.fodc.lift(&unit_vec(m, q));
                self.fodc.pi_pi_coproduct(&g).iter().map(|x| -x).collect()
            })
            .collect();
        for (idx, c) in t.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // digits of idx in base m
            let mut digits = vec![0usize; k];
            let mut r = idx;
            for j in (0..k).rev() {
                digits[j] = r % m;
                r /= m;
            }
            for j in 0..k {
                let sign = if j % 2 == 0 { CycScalar::one() } else { CycScalar::from_int(-1) };
                let pre = digits[..j].iter().fold(vec![CycScalar::one()], |acc, &x| simple_tensor(&acc, &unit_vec(m, x)));
                let post = digits[j + 1..].iter().fold(vec![CycScalar::one()], |acc, &x| simple_tensor(&acc, &unit_vec(m, x)));
                let term = simple_tensor(&simple_tensor(&pre, &d1[digits[j]]), &post);
                axpy(&mut out, &(c * &sign), &term);
            }
        }
        out
    }

    /// Flat star: `(θ₁⋯θ_k)* = (-1)^{k(k-1)/2} θ_k*⋯θ₁*`.
    fn star_flat(&self, k: usize, t: &[CycScalar]) -> Vector {
        let m = self.fodc.dim();
        let mut out = zero_vec(pow(m, k));
        let stars: Vec<Vector> = (0..m).map(|q| self.fodc.star(&unit_vec(m, q))).collect();
        let sign = if (k * k.saturating_sub(1) / 2) % 2 == 0 { CycScalar::one() } else { CycScalar::from_int(-1) };
        for (idx, c) in t.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut digits = vec![0usize; k];
            let mut r = idx;
            for j in (0..k).rev() {
                digits[j] = r % m;
                r /= m;
            }
            let term = digits.iter().rev().fold(vec![CycScalar::one()], |acc, &x| simple_tensor(&acc, &stars[x]));
            axpy(&mut out, &(&c.conj() * &sign), &term);
        }
        out
    }

    /// Checks that a flat map of degree `k → k + shift` sends relations to relations.
    fn check_descends(&self, name: &str, k: usize, shift: usize, f: impl Fn(&[CycScalar]) -> Vector) -> Result<()> {
        if k + shift > self.cap {
            return Ok(());
        }
        for r in &self.levels[k].quotient.relations {
            if !vec_is_zero(&self.from_flat(k + shift, &f(r))) {
                return Err(Error::Invalid(format!("{name} does not descend to the quotient in degree {k}")));
            }
        }
        Ok(())
    }

    fn build(&mut self, labels: Vec<String>, degrees: Vec<usize>) -> Result<()> {
        let total = labels.len();
        let n = self.fodc.hopf.dim();
        let lifts: Vec<(usize, Vector)> = (0..total).map(|i| self.lift_basis(i)).collect();
        for k in 0..=self.cap {
            self.check_descends("the differential", k, 1, |t| self.d_flat(k, t))?;
            self.check_descends("the star", k, 0, |t| self.star_flat(k, t))?;
            for h in 0..n {
                self.check_descends("the right action", k, 0, |t| self.act_flat(k, t, &unit_vec(n, h)))?;
            }
        }
        let prods: Vec<Vector> = (0..total * total)
            .map(|p| {
                let (a, b) = (&lifts[p / total], &lifts[p % total]);
                self.flat_mul(a.0, &a.1, b.0, &b.1)
            })
            .collect();
        let stars: Vec<Vector> = lifts.iter().map(|(k, t)| self.from_flat(*k, &self.star_flat(*k, t))).collect();
        let mut unit = zero_vec(total);
        unit[0] = CycScalar::one();
        self.algebra = FiniteAlgebra::new(labels, degrees, |i, j| prods[i * total + j].clone(), unit, |i| stars[i].clone());
        let dcols: Vec<Vector> = lifts.iter().map(|(k, t)| self.from_flat(k + 1, &self.d_flat(*k, t))).collect();
        self.d = Matrix::from_cols(total, &dcols);
        self.action = (0..n)
            .map(|h| {
                let cols: Vec<Vector> = lifts.iter().map(|(k, t)| self.from_flat(*k, &self.act_flat(*k, t, &unit_vec(n, h)))).collect();
                Matrix::from_cols(total, &cols)
            })
            .collect();
        Ok(())
    }

    /// `w ∘ h` on the total space.
    pub fn act(&self, w: &[CycScalar], h: &[CycScalar]) -> Vector {
        let mut out = zero_vec(self.dim());
        for (k, c) in h.iter().enumerate() {
            if !c.is_zero() {
                axpy(&mut out, c, &self.action[k].mul_vec(w));
            }
        }
        out
    }

    /// Curvature of the canonical connection on the point bundle:
    /// `θ ↦ dθ - m(δθ)` in degree 2.
    pub fn point_bundle_curvature(&self, delta: &EmbeddedDifferential) -> Result<Matrix> {
        if self.cap < 2 {
            return Err(Error::Invalid("curvature needs degree cap ≥ 2".into()));
        }
        let m = self.fodc.dim();
        let off = self.offsets[2];
        let d2 = self.component_dim(2);
        let cols: Vec<Vector> = (0..m)
            .map(|q| {
                let theta = self.from_one_form(&unit_vec(m, q));
                let dtheta = self.d.mul_vec(&theta);
                let md = self.wedge2(&delta.matrix.col(q));
                let r = crate::linalg::vec_sub(&dtheta, &md);
                r[off..off + d2].to_vec()
            })
            .collect();
        Ok(Matrix::from_cols(d2, &cols))
    }

    /// The inclusion connection is multiplicative: `ω(π(r⁽¹⁾)) ω(π(r⁽²⁾)) = 0`.
    pub fn check_multiplicative_connection(&self) -> Outcome {
        if self.cap < 2 {
            return Ok(());
        }
        for (i, r) in self.fodc.ideal.iter().enumerate() {
            if !vec_is_zero(&self.wedge2(&self.fodc.pi_pi_coproduct(r))) {
                return Err(format!("relation from r_{} does not vanish in degree 2", i + 1));
            }
        }
        Ok(())
    }
}

/// A linear map `invΓ → invΓ ⊗ invΓ` used to define `⟨ω, ω⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedDifferential {
    /// `m² × m`
    pub matrix: Matrix,
}

impl EmbeddedDifferential {
    fn from_sign(fodc: &Fodc, sign: i64) -> Self {
        let m = fodc.dim();
        let s = CycScalar::from_int(sign);
        let cols: Vec<Vector> = (0..m)
            .map(|q| fodc.pi_pi_coproduct(&fodc.lift(&unit_vec(m, q))).iter().map(|x| x * &s).collect())
            .collect();
        EmbeddedDifferential { matrix: Matrix::from_cols(m * m, &cols) }
    }

    /// Default choice `π(g) ↦ π(g⁽¹⁾) ⊗ π(g⁽²⁾)` on a fixed lift.
    pub fn standard(fodc: &Fodc) -> Self {
        Self::from_sign(fodc, 1)
    }

    /// The lift of the differential, `π(g) ↦ -π(g⁽¹⁾) ⊗ π(g⁽²⁾)`.
    pub fn lift_of_d(fodc: &Fodc) -> Self {
        Self::from_sign(fodc, -1)
    }

    /// `δ + s` where each column is shifted by a multiple of a degree-2 relation.
    pub fn shifted(&self, fodc: &Fodc) -> Option<Self> {
        let rel = fodc.quadratic_relations().into_iter().next()?;
        let mut m = self.matrix.clone();
        for q in 0..m.cols() {
            let mut col = m.col(q);
            axpy(&mut col, &CycScalar::from_int(q as i64 + 1), &rel);
            m.set_col(q, &col);
        }
        Some(EmbeddedDifferential { matrix: m })
    }

    /// Two choices are interchangeable when they agree modulo the relations.
    pub fn is_admissible_against(&self, other: &EmbeddedDifferential, forms: &InvariantForms) -> bool {
        (0..self.matrix.cols()).all(|q| forms.wedge2(&self.matrix.col(q)) == forms.wedge2(&other.matrix.col(q)))
    }
}

/// `GM ⊗ invΓ^∧` with the crossed product, star and vertical differential.
#[derive(Clone, Debug)]
pub struct VerticalForms {
    pub algebra: FiniteAlgebra,
    pub d: Matrix,
    pub forms_dim: usize,
}

impl VerticalForms {
    pub fn new(gm: &ComoduleAlgebra, forms: &InvariantForms) -> Self {
        let (g, w) = (gm.dim(), forms.dim());
        let n = gm.hopf.dim();
        let total = g * w;
        let idx = |a: usize, b: usize| a * w + b;
        let mut labels = Vec::with_capacity(total);
        let mut degrees = Vec::with_capacity(total);
        for a in 0..g {
            for b in 0..w {
                labels.push(format!("{}⊗{}", gm.algebra.labels[a], forms.algebra.labels[b]));
                degrees.push(forms.algebra.degrees[b]);
            }
        }
        let coact: Vec<Vector> = (0..g).map(|a| gm.coact(&unit_vec(g, a))).collect();
        let product = |i: usize, j: usize| -> Vector {
            let (a, th) = (i / w, i % w);
            let (b, th2) = (j / w, j % w);
            let mut out = zero_vec(total);
            // x_a y⁽⁰⁾ ⊗ (θ ∘ y⁽¹⁾) θ'
            for (p, c) in coact[b].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (b0, h) = (p / n, p % n);
                let x = gm.algebra.mul(&unit_vec(g, a), &unit_vec(g, b0));
                if vec_is_zero(&x) {
                    continue;
                }
                let acted = forms.action[h].mul_vec(&unit_vec(w, th));
                let f = forms.algebra.mul(&acted, &unit_vec(w, th2));
                if vec_is_zero(&f) {
                    continue;
                }
                axpy(&mut out, c, &simple_tensor(&x, &f));
            }
            out
        };
        let star = |i: usize| -> Vector {
            let (a, th) = (i / w, i % w);
            let mut out = zero_vec(total);
            let ts = forms.algebra.star(&unit_vec(w, th));
            // x⁽⁰⁾* ⊗ (θ* ∘ x⁽¹⁾*)
            for (p, c) in coact[a].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (a0, h) = (p / n, p % n);
                let xs = gm.algebra.star(&unit_vec(g, a0));
                let hs = gm.hopf.star(&unit_vec(n, h));
                let f = forms.act(&ts, &hs);
                axpy(&mut out, &c.conj(), &simple_tensor(&xs, &f));
            }
            out
        };
        let unit = simple_tensor(gm.algebra.unit(), forms.algebra.unit());
        let algebra = FiniteAlgebra::new(labels, degrees, product, unit, star);
        let fodc = &forms.fodc;
        let mut d = Matrix::zeros(total, total);
        for a in 0..g {
            for th in 0..w {
                // x ⊗ dθ + x⁽⁰⁾ ⊗ π(x⁽¹⁾) θ
                let mut col = simple_tensor(&unit_vec(g, a), &forms.d.col(th));
                for (p, c) in coact[a].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let (a0, h) = (p / n, p % n);
                    let ph = forms.from_one_form(&fodc.pi(&unit_vec(n, h)));
                    let f = forms.algebra.mul(&ph, &unit_vec(w, th));
                    axpy(&mut col, c, &simple_tensor(&unit_vec(g, a0), &f));
                }
                d.set_col(idx(a, th), &col);
            }
        }
        VerticalForms { algebra, d, forms_dim: w }
    }

    pub fn check_d_squared(&self) -> Outcome {
        let dd = self.d.mul(&self.d);
        for i in 0..self.algebra.dim() {
            if self.algebra.degrees[i] + 2 <= self.algebra.max_degree() && !vec_is_zero(&dd.col(i)) {
                return Err(format!("d_v² != 0 on {}", self.algebra.labels[i]));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::FiniteGroup;

    fn c_of(n: usize) -> Arc<HopfAlgebra> {
        Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::cyclic(n)))
    }

    #[test]
    fn universal_calculus_dimensions() {
        assert_eq!(Fodc::universal(c_of(2)).dim(), 1);
        assert_eq!(Fodc::universal(c_of(4)).dim(), 3);
    }

    #[test]
    fn germs_identity_and_ad() {
        let h = c_of(4);
        let f = Fodc::new(h.clone(), &[unit_vec(4, 2)]).unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.check_germs_identity(), Ok(()));
        assert_eq!(f.check_right_ideal(), Ok(()));
        let ad = f.adjoint_coaction().unwrap();
        assert_eq!(ad.check_corep(), Ok(()));
    }

    #[test]
    fn forms_are_a_differential_star_algebra() {
        let h = c_of(4);
        let f = Fodc::new(h, &[unit_vec(4, 2)]).unwrap();
        let forms = InvariantForms::new(&f, 3).unwrap();
        assert_eq!(forms.algebra.check_all(), Ok(()));
        assert_eq!(forms.algebra.check_differential(&forms.d), Ok(()));
    }

    #[test]
    fn vertical_forms_of_point_bundle() {
        let h = c_of(2);
        let f = Fodc::universal(h.clone());
        let forms = InvariantForms::new(&f, 2).unwrap();
        let gm = ComoduleAlgebra::regular(h);
        let v = VerticalForms::new(&gm, &forms);
        assert_eq!(v.algebra.component(0).len(), 2);
        assert_eq!(v.algebra.component(1).len(), 2);
        assert_eq!(v.algebra.check_all(), Ok(()));
        assert_eq!(v.check_d_squared(), Ok(()));
        assert_eq!(v.algebra.check_differential(&v.d), Ok(()));
    }

    #[test]
    fn curvature_is_independent_of_admissible_delta() {
        let h = c_of(4);
        let f = Fodc::new(h, &[unit_vec(4, 2)]).unwrap();
        let forms = InvariantForms::new(&f, 2).unwrap();
        let d0 = EmbeddedDifferential::standard(&f);
        let d1 = d0.shifted(&f).unwrap();
        assert_ne!(d0, d1);
        assert!(d1.is_admissible_against(&d0, &forms));
        assert_eq!(forms.point_bundle_curvature(&d0).unwrap(), forms.point_bundle_curvature(&d1).unwrap());
        assert!(forms.point_bundle_curvature(&EmbeddedDifferential::lift_of_d(&f)).unwrap().is_zero());
    }
}
