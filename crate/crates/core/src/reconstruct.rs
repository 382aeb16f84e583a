//! Reconstruction of a bundle from its associated-bundle data: the
//! hypotheses on the section functor, the algebra `⊕_α Γ_α ⊗ V_α` with
//! product, star and coaction assembled from the tensor and conjugation
//! isomorphisms, the covariant derivative glued from the block
//! connections, and the certificate identifying everything with the
//! original bundle.

use rayon::prelude::*;

use crate::algebra::FiniteAlgebra;
use crate::assoc::{format_matrix, AssocContext, SectionFrame};
use crate::bundle::QPBundle;
use crate::check::{ensure, first_failure, Check};
use crate::comodule::{map_first_leg, ComoduleAlgebra};
use crate::corep::{decompose, mor_space, Corep, GradedMorphism};
use crate::error::{Error, Result};
use crate::linalg::{axpy, unit_vec, vec_add, zero_vec, LinearMap, Matrix, Parity, Vector};
use crate::scalar::CycScalar;

/// Frames of all irreducible blocks, trivial first.
pub fn block_frames(ctx: &AssocContext) -> Result<Vec<SectionFrame>> {
    ctx.irreps.iter().map(|a| ctx.frame(a)).collect()
}

/// `C ∈ Mor⁰(α, α^cc)`, normalized so that its trace equals `dim α`.
pub fn contragredient_twist(alpha: &Corep) -> Result<Matrix> {
    let cc = alpha.double_contragredient();
    let c = mor_space(alpha, &cc, Parity::Even)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Invalid(format!("{} is not equivalent to its second contragredient", alpha.name)))?;
    let tr = c.trace();
    if tr.is_zero() {
        return Err(Error::Unsupported(format!("the twist of {} has zero trace", alpha.name)));
    }
    Ok(c.scale(&(&CycScalar::from_int(alpha.dim() as i64) / &tr)))
}

/// The degree-1 identification `ᾱ → α`, `ē_i ↦ e_i`.
fn conjugation_morphism(alpha: &Corep) -> Result<GradedMorphism> {
    GradedMorphism::new(alpha.conjugate(), alpha.clone(), LinearMap::odd(Matrix::identity(alpha.dim())))
}

/// The input conditions of the reconstruction, checked on the section functor.
pub fn hypotheses(ctx: &AssocContext, frames: &[SectionFrame]) -> Vec<Check> {
    let hm = &ctx.hm;
    let triv = &frames[0];
    let h1 = (|| {
        let unit = Matrix::from_cols(ctx.gm().dim(), &[ctx.gm().unit().clone()]);
        let n = hm.base.points;
        ensure(triv.section_dim() == n, || format!("Γ_triv has dimension {}, the base {n}", triv.section_dim()))?;
        let imgs: Vec<Matrix> = hm.bundle.points.iter().map(|p| ctx.point_times(p, &unit)).collect();
        let flat: Vec<Vector> = imgs.iter().map(|t| t.col(0)).collect();
        ensure(crate::linalg::span_dim(&flat) == n, || "p ↦ p · 1 is not injective".into())?;
        for (a, t) in imgs.iter().enumerate() {
            let want = ctx.canon(triv, &[hm.base.differential(&hm.base.point(a))]);
            ensure(ctx.nabla(triv, t) == want, || format!("∇ on the trivial block differs from d at p_{a}"))?;
        }
        Ok(())
    })();
    let mut tensor = Vec::new();
    let mut assoc = Vec::new();
    for a in frames {
        for b in frames {
            let fab = match ctx.frame(&a.alpha.tensor(&b.alpha)) {
                Ok(f) => f,
                Err(e) => {
                    tensor.push(Err(e.to_string()));
                    continue;
                }
            };
            tensor.extend(ctx.tensor_checks(a, b, &fab).into_iter().map(|c| c.outcome));
            for c in frames {
                assoc.push(ctx.associativity(a, b, &fab, &c.sections));
            }
        }
    }
    let displays = first_failure(frames.iter().map(|f| frame_displays(ctx, f)));
    let flips = first_failure(frames.iter().flat_map(|f| {
        let mut v: Vec<_> = ctx.flip_checks(f).into_iter().filter(|c| c.anchor == "flip/unit-section").map(|c| c.outcome).collect();
        v.extend(ctx.connection_checks(f).into_iter().filter(|c| c.anchor == "connection/extensions").map(|c| c.outcome));
        v
    }));
    vec![
        Check::new("reconstruction input: the trivial block is the base with ∇ = d", "hypothesis/trivial-block", h1),
        Check::new("reconstruction input: tensor isomorphisms are bijective of degree 0 and compatible", "hypothesis/tensor-isomorphisms", first_failure(tensor)),
        Check::new("reconstruction input: tensor isomorphisms are associative", "hypothesis/associativity", first_failure(assoc)),
        Check::new("reconstruction input: frames satisfy both normalization displays", "hypothesis/frame-displays", displays),
        Check::new("reconstruction input: σ(1 ⊗ T) = T ⊗ 1 and d_R = σ d_L σ⁻¹", "hypothesis/flip-compatibility", flips),
    ]
}

/// Both normalization displays of a frame, computed through the tensor
/// isomorphism and the degree-1 image of `ᾱ → α`.
fn frame_displays(ctx: &AssocContext, f: &SectionFrame) -> crate::algebra::Outcome {
    let run = || -> Result<crate::algebra::Outcome> {
        let name = &f.alpha.name;
        let gm = ctx.gm();
        let (m, n) = (gm.dim(), f.dim());
        let star = conjugation_morphism(&f.alpha)?;
        if let Err(w) = star.check() {
            return Ok(Err(format!("ē_i ↦ e_i is not a degree-1 morphism for {name}: {w}")));
        }
        let fc = ctx.frame(&star.source)?;
        let c = contragredient_twist(&f.alpha)?;
        let adj: Vec<Matrix> = f.left.iter().map(|t| ctx.image(&star, t)).collect();
        let expect = |i: usize, j: usize| if i == j { gm.unit().clone() } else { zero_vec(m) };
        let mut first = Matrix::zeros(m, n * n);
        for (k, xk) in f.left.iter().enumerate() {
            first = first.add(&ctx.section_product(&fc, &adj[k], xk));
        }
        for i in 0..n {
            for j in 0..n {
                if first.col(i * n + j) != expect(i, j) {
                    return Ok(Err(format!("first display fails for {name} at ({i}, {j})")));
                }
            }
        }
        let mut second = Matrix::zeros(m, n * n);
        for k in 0..f.rank() {
            for l in 0..f.rank() {
                if f.z[(k, l)].is_zero() {
                    continue;
                }
                second = second.add(&ctx.section_product(f, &f.left[l], &adj[k]).scale(&f.z[(k, l)]));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let mut acc = zero_vec(m);
                for t in 0..n {
                    axpy(&mut acc, &c[(t, i)], &second.col(t * n + j));
                }
                if acc != expect(i, j) {
                    return Ok(Err(format!("second display fails for {name} at ({i}, {j})")));
                }
            }
        }
        Ok(Ok(()))
    };
    run().unwrap_or_else(|e| Err(e.to_string()))
}

/// The reconstructed bundle `GM' = ⊕_α Γ_α ⊗ V_α` with its identification
/// `Ψ(T ⊗ e_i) = T(e_i)` with the original total algebra.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub frames: Vec<SectionFrame>,
    pub offsets: Vec<usize>,
    pub total: ComoduleAlgebra,
    /// `Ψ` as a `dim GM × dim GM'` matrix
    pub psi: Matrix,
    /// the glued derivative `GM' → Hor`
    pub derivative: Matrix,
}

impl Reconstruction {
    pub fn dim(&self) -> usize {
        self.total.dim()
    }

    fn index(&self, b: usize, s: usize, i: usize) -> usize {
        self.offsets[b] + s * self.frames[b].dim() + i
    }
}

struct Decomposition {
    /// `G: ⊕ β_c → α₁ ⊗ α₂`
    g: Matrix,
    g_inv: Matrix,
    /// block index and offset of each component
    parts: Vec<(usize, usize)>,
}

fn decomposition(ctx: &AssocContext, a: &Corep, b: &Corep) -> Result<Decomposition> {
    let (mult, iso) = decompose(&a.tensor(b), &ctx.irreps)?;
    let mut parts = Vec::new();
    let mut off = 0;
    for (bi, &k) in mult.iter().enumerate() {
        for _ in 0..k {
            parts.push((bi, off));
            off += ctx.irreps[bi].dim();
        }
    }
    let g = iso.map.matrix;
    let g_inv = g.inverse().ok_or_else(|| Error::Internal("decomposition is not invertible".into()))?;
    Ok(Decomposition { g, g_inv, parts })
}

/// Assembles `GM'` from the block frames.
pub fn reconstruct(ctx: &AssocContext, frames: Vec<SectionFrame>) -> Result<Reconstruction> {
    let gm = ctx.gm();
    let nh = ctx.hm.bundle.hopf().dim();
    let mut offsets = Vec::with_capacity(frames.len());
    let mut dim = 0;
    for f in &frames {
        offsets.push(dim);
        dim += f.section_dim() * f.dim();
    }
    if dim != gm.dim() {
        return Err(Error::Invalid(format!("blocks have total dimension {dim}, the total algebra {}", gm.dim())));
    }
    let basis: Vec<(usize, usize, usize)> =
        frames.iter().enumerate().flat_map(|(b, f)| (0..f.section_dim()).flat_map(move |s| (0..f.dim()).map(move |i| (b, s, i)))).collect();
    let idx = |b: usize, s: usize, i: usize| offsets[b] + s * frames[b].dim() + i;
    let psi = Matrix::from_cols(gm.dim(), &basis.iter().map(|&(b, s, i)| frames[b].sections[s].col(i)).collect::<Vec<_>>());

    // products through the tensor isomorphism and the decomposition of α₁ ⊗ α₂
    let nb = frames.len();
    let decomps = (0..nb * nb)
        .map(|p| decomposition(ctx, &frames[p / nb].alpha, &frames[p % nb].alpha))
        .collect::<Result<Vec<_>>>()?;
    let products: Vec<Vector> = (0..dim * dim)
        .into_par_iter()
        .map(|p| -> Result<Vector> {
            let ((b1, s, i), (b2, t, j)) = (basis[p / dim], basis[p % dim]);
            let (f1, f2) = (&frames[b1], &frames[b2]);
            let dec = &decomps[b1 * nb + b2];
            let sec = ctx.section_product(f1, &f1.sections[s], &f2.sections[t]).mul(&dec.g);
            let v = dec.g_inv.mul_vec(&unit_vec(f1.dim() * f2.dim(), i * f2.dim() + j));
            let mut out = zero_vec(dim);
            for &(beta, off) in &dec.parts {
                let fb = &frames[beta];
                let cols: Vec<usize> = (off..off + fb.dim()).collect();
                let rows: Vec<usize> = (0..gm.dim()).collect();
                let q = sec.submatrix(&rows, &cols);
                let c = fb.coords(&q).ok_or_else(|| Error::Internal(format!("a product component is not a section of {}", fb.alpha.name)))?;
                for (u, cu) in c.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    for ip in 0..fb.dim() {
                        let k = idx(beta, u, ip);
                        out[k] = &out[k] + &(cu * &v[off + ip]);
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    // star through degree-1 images: (T ⊗ e_i)* = A*_f(T) ⊗ f⁻¹(e_i)
    let mut stars = vec![Vec::new(); dim];
    for (b, f) in frames.iter().enumerate() {
        let (bp, g) = frames
            .iter()
            .enumerate()
            .find_map(|(bp, fp)| mor_space(&fp.alpha, &f.alpha, Parity::Odd).into_iter().next().map(|m| (bp, m)))
            .ok_or_else(|| Error::Invalid(format!("no irreducible is conjugate to {}", f.alpha.name)))?;
        let g = GradedMorphism::new(frames[bp].alpha.clone(), f.alpha.clone(), LinearMap::odd(g))?;
        let ginv = g.map.inverse().ok_or_else(|| Error::Internal("degree-1 isomorphism is singular".into()))?;
        let fp = &frames[bp];
        for s in 0..f.section_dim() {
            let c = fp.coords(&ctx.image(&g, &f.sections[s])).ok_or_else(|| Error::Internal("degree-1 image is not a section".into()))?;
            for i in 0..f.dim() {
                let w = ginv.apply(&unit_vec(f.dim(), i));
                let mut out = zero_vec(dim);
                for (u, cu) in c.iter().enumerate() {
                    for (ip, wi) in w.iter().enumerate() {
                        let k = idx(bp, u, ip);
                        out[k] = &out[k] + &(cu * wi);
                    }
                }
                stars[idx(b, s, i)] = out;
            }
        }
    }

    let unit_sec = Matrix::from_cols(gm.dim(), &[gm.unit().clone()]);
    let uc = frames[0].coords(&unit_sec).ok_or_else(|| Error::Invalid("the unit is not a section of the trivial block".into()))?;
    let mut unit = zero_vec(dim);
    for (u, cu) in uc.into_iter().enumerate() {
        unit[idx(0, u, 0)] = cu;
    }

    let coaction: Vec<Vector> = basis
        .iter()
        .map(|&(b, s, j)| {
            let alpha = &frames[b].alpha;
            let mut out = zero_vec(dim * nh);
            for i in 0..alpha.dim() {
                let k = idx(b, s, i);
                for (h, x) in alpha.entry(i, j).iter().enumerate() {
                    out[k * nh + h] = x.clone();
                }
            }
            out
        })
        .collect();
    let labels = basis.iter().map(|&(b, s, i)| format!("{}:{}⊗e{}", frames[b].alpha.name, s, i)).collect();
    let algebra = FiniteAlgebra::ungraded(labels, |i, j| products[i * dim + j].clone(), unit, |i| stars[i].clone());
    let total = ComoduleAlgebra::new(algebra, ctx.hm.bundle.hopf().clone(), coaction)?;

    // D'(T ⊗ e_i) = Υ⁻¹(∇T)(e_i), glued blockwise
    let dcols: Vec<Vector> = basis
        .par_iter()
        .map(|&(b, s, i)| {
            let f = &frames[b];
            ctx.upsilon_inv(f, &ctx.nabla(f, &f.sections[s])).swap_remove(i)
        })
        .collect();
    let derivative = Matrix::from_cols(ctx.hm.dim(), &dcols);
    Ok(Reconstruction { frames, offsets, total, psi, derivative })
}

/// Certificate that `Ψ` identifies the reconstruction with the original
/// bundle and that the glued derivative is the original one.
pub fn certificate(ctx: &AssocContext, rec: &Reconstruction) -> Vec<Check> {
    let gm = ctx.gm();
    let alg = &rec.total.algebra;
    let dim = rec.dim();
    let nh = ctx.hm.bundle.hopf().dim();
    let psi = &rec.psi;
    let inv = psi.inverse();
    let rebuilt = first_failure(rec.total.check_all().into_iter().map(|(n, o)| o.map_err(|w| format!("{n}: {w}"))));
    let bundle_gate = match &inv {
        Some(pi) => {
            let points = ctx.hm.bundle.points.iter().map(|p| pi.mul_vec(p)).collect();
            let transport = ctx.hm.bundle.transport.iter().map(|u| pi.mul_vec(u)).collect();
            let b = QPBundle::new("reconstructed", rec.total.clone(), points, transport);
            first_failure(b.check_all().into_iter().map(|(n, o)| o.map_err(|w| format!("{n}: {w}"))))
        }
        None => Err("Ψ is not invertible".into()),
    };
    let mult = first_failure((0..dim * dim).into_par_iter().map(|p| {
        let (i, j) = (p / dim, p % dim);
        let (x, y) = (unit_vec(dim, i), unit_vec(dim, j));
        let lhs = psi.mul_vec(&alg.mul(&x, &y));
        ensure(lhs == gm.mul(&psi.col(i), &psi.col(j)), || format!("Ψ({0} {1}) != Ψ({0}) Ψ({1})", alg.labels[i], alg.labels[j]))
    }).collect::<Vec<_>>());
    let star = first_failure((0..dim).map(|i| {
        let lhs = psi.mul_vec(&alg.star(&unit_vec(dim, i)));
        ensure(lhs == gm.star(&psi.col(i)), || format!("Ψ({0}*) != Ψ({0})*", alg.labels[i]))
    }));
    let unital = ensure(psi.mul_vec(alg.unit()) == *gm.unit(), || "Ψ(1) != 1".into());
    let coaction = first_failure((0..dim).map(|i| {
        let lhs = map_first_leg(psi, &rec.total.coact(&unit_vec(dim, i)), nh);
        ensure(lhs == ctx.hm.bundle.total.coact(&psi.col(i)), || format!("Ψ does not intertwine the coactions on {}", alg.labels[i]))
    }));
    let emb = ctx.hm.total_embedding();
    let original = ctx.dm.matrix.mul(&emb).mul(psi);
    let derivative = first_failure((0..dim).map(|i| {
        ensure(rec.derivative.col(i) == original.col(i), || format!("glued D differs from D on {}", alg.labels[i]))
    }));
    let hm = &ctx.hm;
    let gluing = first_failure((0..dim * dim).into_par_iter().map(|p| {
        let (i, j) = (p / dim, p % dim);
        let lhs = rec.derivative.mul_vec(&alg.mul(&unit_vec(dim, i), &unit_vec(dim, j)));
        let xi = emb.mul_vec(&psi.col(i));
        let xj = emb.mul_vec(&psi.col(j));
        let rhs = vec_add(&hm.mul(&rec.derivative.col(i), &xj), &hm.mul(&xi, &rec.derivative.col(j)));
        ensure(lhs == rhs, || format!("glued D violates Leibniz on ({}, {})", alg.labels[i], alg.labels[j]))
    }).collect::<Vec<_>>());
    let block_dims: Vec<String> = rec.frames.iter().map(|f| format!("{}:{}×{}", f.alpha.name, f.section_dim(), f.dim())).collect();
    vec![
        Check::new("reconstructed total algebra is a comodule *-algebra", "reconstruction/algebra", rebuilt)
            .with("blocks", block_dims.join(", ")),
        Check::new("reconstructed bundle passes the bundle gate", "reconstruction/bundle", bundle_gate),
        Check::new("Ψ is bijective", "reconstruction/iso-bijective", ensure(inv.is_some(), || "Ψ is singular".into()))
            .with("psi", format_matrix(psi)),
        Check::new("Ψ is multiplicative", "reconstruction/iso-multiplicative", mult),
        Check::new("Ψ preserves the star", "reconstruction/iso-star", star),
        Check::new("Ψ is unital", "reconstruction/iso-unital", unital),
        Check::new("Ψ intertwines the coactions", "reconstruction/iso-coaction", coaction),
        Check::new("the glued derivative is the original D", "reconstruction/derivative", derivative),
        Check::new("the glued derivative satisfies Leibniz across blocks", "reconstruction/leibniz-gluing", gluing),
    ]
}

impl Reconstruction {
    /// Coordinates in `GM'` of `T ⊗ e_i` for section `s` of block `b`.
    pub fn basis_index(&self, b: usize, s: usize, i: usize) -> usize {
        self.index(b, s, i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{derivative_space, BaseCalculus, HorizontalModel};
    use crate::hopf::{FiniteGroup, HopfAlgebra};
    use std::sync::Arc;

    #[test]
    fn corpus_reconstructs() {
        let h = Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::cyclic(2)));
        for (bundle, n) in [(QPBundle::checkerboard(h.clone()).unwrap(), 2), (QPBundle::trivial(2, h.clone()), 2), (QPBundle::point(h.clone()), 1)] {
            let hm = HorizontalModel::new(&bundle, BaseCalculus::universal(n, 2).unwrap(), 2).unwrap();
            let dm = derivative_space(&hm).unwrap().particular;
            let ctx = AssocContext::new(hm, dm).unwrap();
            let frames = block_frames(&ctx).unwrap();
            for c in hypotheses(&ctx, &frames) {
                assert!(c.passed(), "{}: {:?}", c.name, c.outcome);
            }
            let rec = reconstruct(&ctx, frames).unwrap();
            for c in certificate(&ctx, &rec) {
                assert!(c.passed(), "{} ({}): {:?}", c.name, bundle.name, c.outcome);
            }
        }
    }
}
