//! Acceptance criteria, one pass/fail line each. Library results are checked
//! against test-side oracles; the CLI criteria run the built binary.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qpbkit::assoc::{AssocContext, SectionFrame};
use qpbkit::bundle::{check_derivative, derivation_space, derivative_space, CovariantDerivative};
use qpbkit::calculus::{EmbeddedDifferential, Fodc, InvariantForms, VerticalForms};
use qpbkit::check::Check;
use qpbkit::comodule::ComoduleAlgebra;
use qpbkit::corep::{decompose, irreducible_set, mor_morphisms, mor_space, Corep, GradedMorphism};
use qpbkit::hopf::{FiniteGroup, HopfAlgebra};
use qpbkit::input::Scenario;
use qpbkit::linalg::{unit_vec, vec_is_zero, zero_vec, Vector};
use qpbkit::reconstruct::{block_frames, hypotheses, reconstruct};
use qpbkit::report::Report;
use qpbkit::runner::{assoc_checks, bundle_stage, reconstruct_checks};
use qpbkit::{CycScalar, LinearMap, Matrix, Parity};

type Verdict = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn scenario(name: &str) -> Scenario {
    Scenario::from_toml(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_pass(checks: &[Check]) -> Result<(), String> {
    match checks.iter().find(|c| !c.passed()) {
        Some(c) => Err(format!("{} ({}): {:?}", c.name, c.anchor, c.outcome)),
        None => Ok(()),
    }
}

const CORPUS: [&str; 3] = ["m2_checkerboard.toml", "point_bundle.toml", "trivial_bundle.toml"];

fn corpus() -> Vec<(String, AssocContext)> {
    CORPUS
        .iter()
        .map(|f| {
            let scn = scenario(f);
            let stage = bundle_stage(&scn).unwrap();
            assert!(!stage.contexts.is_empty(), "{f}: bundle stage failed");
            (scn.name.clone(), stage.contexts.into_iter().next().unwrap())
        })
        .collect()
}

/// `triv, β, triv ⊕ β, β ⊗ β, conj β` for the first nontrivial irreducible β.
fn corpus_coreps(ctx: &AssocContext) -> Vec<Corep> {
    let (t, s) = (ctx.irreps[0].clone(), ctx.irreps[1].clone());
    vec![t.clone(), s.clone(), t.direct_sum(&s), s.tensor(&s), s.conjugate()]
}

fn cz(n: usize) -> Arc<HopfAlgebra> {
    Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::cyclic(n)))
}

fn cs3() -> Arc<HopfAlgebra> {
    Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::symmetric3()))
}

// ---------------------------------------------------------------- criterion 1

fn hopf_axioms_and_haar() -> Verdict {
    let start = Instant::now();
    let cases: Vec<(&str, HopfAlgebra, Vector)> = {
        let uniform = |n: i64| vec![CycScalar::frac(1, n); n as usize];
        vec![
            ("C(Z2)", HopfAlgebra::function_algebra(&FiniteGroup::cyclic(2)), uniform(2)),
            ("C(Z4)", HopfAlgebra::function_algebra(&FiniteGroup::cyclic(4)), uniform(4)),
            ("C(S3)", HopfAlgebra::function_algebra(&FiniteGroup::symmetric3()), uniform(6)),
            ("C[Z3]", HopfAlgebra::group_algebra(&FiniteGroup::cyclic(3)), unit_vec(3, 0)),
            ("C[S3]", HopfAlgebra::group_algebra(&FiniteGroup::symmetric3()), unit_vec(6, 0)),
        ]
    };
    for (name, h, oracle) in &cases {
        for (axiom, o) in h.check_hopf() {
            require(o.is_ok(), || format!("{name}: {axiom}: {o:?}"))?;
        }
        let haar = h.haar().map_err(|e| format!("{name}: {e}"))?;
        require(haar == *oracle, || format!("{name}: Haar functional differs from the oracle"))?;
        require(h.check_right_invariant(&haar).is_ok(), || format!("{name}: Haar not right invariant"))?;
    }
    // counit tampered to (1, 1): the counit law must fail with a witness
    let h = HopfAlgebra::function_algebra(&FiniteGroup::cyclic(2));
    let tampered = HopfAlgebra::new(
        "tampered",
        h.algebra.clone(),
        |i| h.coproduct(&unit_vec(2, i)),
        vec![CycScalar::one(), CycScalar::one()],
        |i| h.antipode(&unit_vec(2, i)),
        2,
    );
    let counit = tampered.check_counit();
    require(counit.is_err(), || "tampered counit passes the counit law".into())?;
    let elapsed = start.elapsed();
    require(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("5 Hopf algebras, Haar = oracle, tampered counit rejected ({}), {elapsed:.2?}", counit.unwrap_err()))
}

// ---------------------------------------------------------------- criterion 2

fn schur(irreps: &[Corep]) -> Result<(), String> {
    for (i, a) in irreps.iter().enumerate() {
        for (j, b) in irreps.iter().enumerate() {
            let n = mor_space(a, b, Parity::Even).len();
            require(n == usize::from(i == j), || format!("dim Mor({}, {}) = {n}", a.name, b.name))?;
        }
    }
    Ok(())
}

fn irreducible_sets() -> Verdict {
    let z2 = cz(2);
    let i2 = irreducible_set(&z2, z2.splitting_conductor).map_err(|e| e.to_string())?;
    require(i2.len() == 2, || format!("C(Z2) has {} irreducibles", i2.len()))?;
    schur(&i2)?;
    let s3 = cs3();
    let i3 = irreducible_set(&s3, s3.splitting_conductor).map_err(|e| e.to_string())?;
    let mut dims: Vec<usize> = i3.iter().map(Corep::dim).collect();
    dims.sort_unstable();
    require(dims == [1, 1, 2], || format!("C(S3) dims {dims:?}"))?;
    require(dims.iter().map(|d| d * d).sum::<usize>() == 6, || "Σ dim² != 6".into())?;
    schur(&i3)?;
    Ok("C(Z2): 2 characters; C(S3): dims {1,1,2}, Σ dim² = 6; Schur on all pairs".into())
}

// ---------------------------------------------------------------- criterion 3

/// Permutations of S3 in the library's element order (lexicographic one-line notation).
const S3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Classical character table, one row per irreducible, indexed by group element.
fn oracle_characters(group: &str, n: usize) -> Vec<Vec<CycScalar>> {
    match group {
        "cyclic" => {
            let z = CycScalar::root_of_unity(n as u32);
            let pow = |k: usize| (0..k).fold(CycScalar::one(), |acc, _| &acc * &z);
            (0..n).map(|k| (0..n).map(|g| pow(k * g % n)).collect()).collect()
        }
        _ => {
            let fixed = |p: &[usize; 3]| (0..3).filter(|&i| p[i] == i).count() as i64;
            let sign = |p: &[usize; 3]| {
                let inv = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                if inv % 2 == 0 { 1 } else { -1 }
            };
            vec![
                S3.iter().map(|_| CycScalar::one()).collect(),
                S3.iter().map(|p| CycScalar::from_int(sign(p))).collect(),
                S3.iter().map(|p| CycScalar::from_int(fixed(p) - 1)).collect(),
            ]
        }
    }
}

/// Character of a corepresentation of `C(G)` at each group element.
fn character(c: &Corep, order: usize) -> Vec<CycScalar> {
    (0..order).map(|g| (0..c.dim()).map(|i| c.entry(i, i)[g].clone()).sum()).collect()
}

fn inner(a: &[CycScalar], b: &[CycScalar], c: &[CycScalar]) -> usize {
    let n = a.len() as i64;
    let s: CycScalar = (0..a.len()).map(|g| &(&a[g] * &b[g]) * &c[g].conj()).sum();
    let m = &s * &CycScalar::frac(1, n);
    (0..100).find(|&k| m == CycScalar::from_int(k as i64)).expect("multiplicity is a small integer")
}

fn fusion_oracle() -> Verdict {
    let mut pairs = 0;
    for (label, h, group, n) in [("C(Z2)", cz(2), "cyclic", 2), ("C(Z3)", cz(3), "cyclic", 3), ("C(S3)", cs3(), "s3", 6)] {
        let irreps = irreducible_set(&h, h.splitting_conductor).map_err(|e| e.to_string())?;
        let table = oracle_characters(group, n);
        let chars: Vec<Vec<CycScalar>> = irreps.iter().map(|c| character(c, n)).collect();
        let conj = |v: &[CycScalar]| -> Vec<CycScalar> { v.iter().map(CycScalar::conj).collect() };
        // one global convention: either every character matches directly or every one after conjugation
        let matching = |f: &dyn Fn(&[CycScalar]) -> Vec<CycScalar>| -> Option<Vec<usize>> {
            chars.iter().map(|c| table.iter().position(|t| *t == f(c))).collect()
        };
        let idx = matching(&|c| c.to_vec()).or_else(|| matching(&conj)).ok_or_else(|| format!("{label}: characters do not match the table"))?;
        for i in 0..irreps.len() {
            for j in 0..irreps.len() {
                let (mult, _) = decompose(&irreps[i].tensor(&irreps[j]), &irreps).map_err(|e| e.to_string())?;
                for (k, &m) in mult.iter().enumerate() {
                    let want = inner(&table[idx[i]], &table[idx[j]], &table[idx[k]]);
                    require(m == want, || format!("{label}: N({},{};{}) = {m}, oracle {want}", irreps[i].name, irreps[j].name, irreps[k].name))?;
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} tensor products match the character-inner-product oracle"))
}

// ---------------------------------------------------------------- criterion 4

fn bundle_gate() -> Verdict {
    let scn = scenario("m2_checkerboard.toml");
    let b = scn.bundle.as_ref().unwrap();
    for (n, o) in b.check_all() {
        require(o.is_ok(), || format!("M2: {n}: {o:?}"))?;
    }
    require(b.canonical_map_rank() == 8, || format!("β-rank {}", b.canonical_map_rank()))?;

    let broken = scenario("broken_trivial_coaction.toml");
    let gate = broken.bundle.as_ref().unwrap().check_all();
    let invariant_base = gate[1].1.clone().err().ok_or("trivial coaction passes the invariant-base check")?;
    require(invariant_base.contains("invariant subalgebra has dimension 2"), || format!("unexpected witness: {invariant_base}"))?;
    require(gate[2].1.is_err(), || "trivial coaction has a surjective canonical map".into())?;

    // derivatives: D = 0 misses d on the base; a Leibniz derivation off the star locus fails the star check
    let ctx = &corpus()[0].1;
    let hm = &ctx.hm;
    let status = |dm: &CovariantDerivative, name: &str| {
        check_derivative(hm, dm).into_iter().find(|(n, _)| *n == name).map(|(_, o)| o.is_ok()).unwrap()
    };
    let zero = CovariantDerivative { matrix: Matrix::zeros(hm.dim(), hm.dim()) };
    require(!status(&zero, "D restricts to d on base forms"), || "D = 0 restricts to d".into())?;
    let raw = derivation_space(hm).map_err(|e| e.to_string())?;
    let s = hm.star_matrix();
    let i = CycScalar::root_of_unity(4);
    let twisted = raw
        .displacements
        .iter()
        .map(|k| CovariantDerivative { matrix: raw.particular.matrix.add(&k.scale(&i)) })
        .find(|dm| dm.conjugated(&s) != *dm)
        .ok_or("no derivation off the star locus")?;
    require(!status(&twisted, "D commutes with the star"), || "twisted D passes the star check".into())?;
    require(status(&twisted, "D satisfies the graded Leibniz rule"), || "twisted D fails Leibniz".into())?;
    require(status(&twisted, "D restricts to d on base forms"), || "twisted D fails restriction".into())?;
    Ok(format!("M2/C(Z2) passes with β-rank 8; trivial coaction fails the invariant-base check ({invariant_base}); broken derivatives caught"))
}

// ---------------------------------------------------------------- criterion 5

fn idempotent_oracle(ctx: &AssocContext, f: &SectionFrame) -> Result<(), String> {
    let om = ctx.om();
    let r = f.rank();
    for k in 0..r {
        for l in 0..r {
            let mut sq = zero_vec(om.dim());
            for m in 0..r {
                sq = qpbkit::linalg::vec_add(&sq, &om.mul(&f.e[k][m], &f.e[m][l]));
            }
            require(sq == f.e[k][l], || format!("{}: e² != e at ({k}, {l})", f.alpha.name))?;
            require(om.star(&f.e[l][k]) == f.e[k][l], || format!("{}: e* != e at ({k}, {l})", f.alpha.name))?;
        }
    }
    Ok(())
}

fn frame_identities() -> Verdict {
    let mut count = 0;
    for (name, ctx) in corpus() {
        for c in corpus_coreps(&ctx) {
            let f = ctx.frame(&c).map_err(|e| format!("{name}/{}: {e}", c.name))?;
            all_pass(&ctx.frame_checks(&f)).map_err(|e| format!("{name}: {e}"))?;
            require(f.z.is_strictly_positive().unwrap_or(false), || format!("{name}/{}: Z not positive", c.name))?;
            idempotent_oracle(&ctx, &f).map_err(|e| format!("{name}: {e}"))?;
            count += 1;
        }
    }
    // golden values for the sign block of M2
    let (_, ctx) = corpus().into_iter().next().unwrap();
    let f = ctx.frame(&ctx.irreps[1]).map_err(|e| e.to_string())?;
    require(f.rank() == 2, || format!("frame size {}", f.rank()))?;
    require(f.z == Matrix::identity(2), || "Z != Id₂".into())?;
    let gm = ctx.gm();
    let corner = |label: &str| ctx.to_base(&unit_vec(gm.dim(), gm.label_index(label).unwrap()));
    let zero = zero_vec(ctx.om().dim());
    let want = [[corner("E11"), zero.clone()], [zero.clone(), corner("E22")]];
    for k in 0..2 {
        for l in 0..2 {
            require(f.e[k][l] == want[k][l], || format!("e[{k}][{l}] differs from diag(E11, E22)"))?;
        }
    }
    Ok(format!("{count} (bundle, α) frames: displays, Z > 0, e² = e = e*; M2/sign: d = 2, Z = Id₂, e = diag(E11, E22)"))
}

// ---------------------------------------------------------------- criterion 6

fn connections() -> Verdict {
    let mut members = 0;
    for f in CORPUS {
        let scn = scenario(f);
        let stage = bundle_stage(&scn).map_err(|e| e.to_string())?;
        let ctx = stage.contexts.first().ok_or(format!("{f}: no context"))?;
        let space = derivative_space(&ctx.hm).map_err(|e| e.to_string())?;
        for dm in space.sample_members(&ctx.hm) {
            for (n, o) in check_derivative(&ctx.hm, &dm) {
                require(o.is_ok(), || format!("{f}: {n}: {o:?}"))?;
            }
            members += 1;
        }
        for c in corpus_coreps(ctx) {
            let fr = ctx.frame(&c).map_err(|e| e.to_string())?;
            all_pass(&ctx.connection_checks(&fr)).map_err(|e| format!("{f}: {e}"))?;
            all_pass(&ctx.flip_checks(&fr)).map_err(|e| format!("{f}: {e}"))?;
            // the corpus connections are flat: R = d_L ∇ vanishes on every section
            for t in &fr.sections {
                let r = ctx.d_left(&fr, &ctx.nabla(&fr, t), 1);
                require(r.iter().all(|v| vec_is_zero(v)), || format!("{f}/{}: R != 0", c.name))?;
            }
        }
        // σ is the identity on the trivial block
        let ft = ctx.frame(&ctx.irreps[0]).map_err(|e| e.to_string())?;
        for mu in ctx.basis_tuples(&ft, None, false) {
            require(ctx.sigma(&ft, &mu) == mu, || format!("{f}: σ_triv != id"))?;
        }
    }
    Ok(format!("{members} derivative members pass; Leibniz, d_R = σ d_L σ⁻¹, dual-path curvature, σ_triv = id, flat ⇒ R = 0"))
}

// ---------------------------------------------------------------- criterion 7

fn morphisms(coreps: &[Corep]) -> Vec<GradedMorphism> {
    let mut out = Vec::new();
    for a in coreps {
        for b in coreps {
            for p in [Parity::Even, Parity::Odd] {
                out.extend(mor_morphisms(a, b, p));
            }
        }
    }
    out
}

fn functoriality() -> Verdict {
    let mut total = (0, 0);
    for (name, ctx) in corpus() {
        let ms = morphisms(&corpus_coreps(&ctx));
        let mut pairs = Vec::new();
        for f in &ms {
            for g in &ms {
                if f.target == g.source && pairs.len() < 40 {
                    pairs.push((f.clone(), g.clone()));
                }
            }
        }
        let odd = pairs.iter().filter(|(f, g)| f.degree() == 1 || g.degree() == 1).count();
        require(pairs.len() >= 10 && odd > 0, || format!("{name}: {} pairs, {odd} with degree one", pairs.len()))?;
        let c = ctx.functoriality(&pairs);
        require(c.passed(), || format!("{name}: {:?}", c.outcome))?;
        // parity of A_f equals parity of f
        for f in &ms {
            let m = ctx.image_map(f, &ctx.sections(&f.source), &ctx.sections(&f.target)).map_err(|e| e.to_string())?;
            require(m.parity == f.map.parity, || format!("{name}: parity of A_f differs"))?;
        }
        // mono ↔ epi on 0 → triv → triv ⊕ β → β → 0
        let (t, s) = (ctx.irreps[0].clone(), ctx.irreps[1].clone());
        let sum = t.direct_sum(&s);
        let n1 = t.dim();
        let incl = Matrix::from_fn(sum.dim(), n1, |i, j| if i == j { CycScalar::one() } else { CycScalar::zero() });
        let proj = Matrix::from_fn(s.dim(), sum.dim(), |i, j| if j == n1 + i { CycScalar::one() } else { CycScalar::zero() });
        let (st, ss, sb) = (ctx.sections(&t), ctx.sections(&sum), ctx.sections(&s));
        let iota = GradedMorphism::new(t.clone(), sum.clone(), LinearMap::even(incl)).map_err(|e| e.to_string())?;
        let pi = GradedMorphism::new(sum.clone(), s.clone(), LinearMap::even(proj)).map_err(|e| e.to_string())?;
        let ai = ctx.image_map(&iota, &st, &ss).map_err(|e| e.to_string())?;
        let ap = ctx.image_map(&pi, &ss, &sb).map_err(|e| e.to_string())?;
        require(ai.matrix.rank() == st.len(), || format!("{name}: A_mono is not onto"))?;
        require(ap.matrix.rank() == sb.len(), || format!("{name}: A_epi is not injective"))?;
        require(ss.len() == st.len() + sb.len(), || format!("{name}: dimensions {} != {} + {}", ss.len(), st.len(), sb.len()))?;
        require(ctx.exactness(&t, &s).passed(), || format!("{name}: exactness check fails"))?;
        total = (total.0 + pairs.len(), total.1 + odd);
    }
    Ok(format!("{} composable pairs ({} with degree one), A_id = id, mono ↔ epi with exact dimensions", total.0, total.1))
}

// ---------------------------------------------------------------- criterion 8

const SQUARES: [&str; 8] = [
    "conjugation/bijective",
    "conjugation/connection",
    "conjugation/flip",
    "conjugation/naturality",
    "tensor/bijective",
    "tensor/connection",
    "tensor/flip",
    "tensor/naturality",
];

fn natural_isomorphisms() -> Verdict {
    let mut checked = 0;
    for (name, ctx) in corpus() {
        let checks = assoc_checks(&ctx, &[], 0).map_err(|e| e.to_string())?;
        for anchor in SQUARES.iter().chain(["tensor/associativity"].iter()) {
            let mine: Vec<Check> = checks.iter().filter(|c| c.anchor == *anchor).cloned().collect();
            require(!mine.is_empty(), || format!("{name}: no {anchor} check"))?;
            all_pass(&mine).map_err(|e| format!("{name}: {e}"))?;
            checked += mine.len();
        }
        // degree 0: the section product is complex linear in each argument
        let s = ctx.irreps[1].clone();
        let f = ctx.frame(&s).map_err(|e| e.to_string())?;
        let i = CycScalar::root_of_unity(4);
        for t1 in &f.sections {
            for t2 in &f.sections {
                let lhs = ctx.section_product(&f, &t1.scale(&i), t2);
                require(lhs == ctx.section_product(&f, t1, t2).scale(&i), || format!("{name}: tensor iso is not linear"))?;
            }
        }
    }
    Ok(format!("{checked} square/associativity checks commute; isomorphisms are linear of degree 0"))
}

// ---------------------------------------------------------------- criterion 9

fn reconstruction() -> Verdict {
    let start = Instant::now();
    for (name, ctx) in corpus() {
        let frames = block_frames(&ctx).map_err(|e| e.to_string())?;
        let hyp = hypotheses(&ctx, &frames);
        for anchor in ["hypothesis/trivial-block", "hypothesis/tensor-isomorphisms", "hypothesis/associativity", "hypothesis/frame-displays", "hypothesis/flip-compatibility"] {
            let h = hyp.iter().find(|c| c.anchor == anchor).ok_or(format!("{name}: {anchor} missing"))?;
            require(h.passed(), || format!("{name}: {anchor}: {:?}", h.outcome))?;
        }
        let rec = reconstruct(&ctx, frames).map_err(|e| e.to_string())?;
        // oracle: Ψ(T ⊗ e_i) = T(e_i) is a unital *-algebra and comodule isomorphism
        let gm = ctx.gm();
        let alg = &rec.total.algebra;
        let n = rec.dim();
        require(n == gm.dim() && rec.psi.inverse().is_some(), || format!("{name}: Ψ is not invertible"))?;
        for (b, f) in rec.frames.iter().enumerate() {
            for (s, t) in f.sections.iter().enumerate() {
                for i in 0..f.dim() {
                    require(rec.psi.col(rec.basis_index(b, s, i)) == t.col(i), || format!("{name}: Ψ(T ⊗ e_i) != T(e_i)"))?;
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let lhs = rec.psi.mul_vec(&alg.mul(&unit_vec(n, x), &unit_vec(n, y)));
                require(lhs == gm.mul(&rec.psi.col(x), &rec.psi.col(y)), || format!("{name}: Ψ not multiplicative"))?;
            }
            require(rec.psi.mul_vec(&alg.star(&unit_vec(n, x))) == gm.star(&rec.psi.col(x)), || format!("{name}: Ψ not *-preserving"))?;
        }
        require(rec.psi.mul_vec(alg.unit()) == *gm.unit(), || format!("{name}: Ψ not unital"))?;
        let emb = ctx.hm.total_embedding();
        require(rec.derivative == ctx.dm.matrix.mul(&emb).mul(&rec.psi), || format!("{name}: rebuilt D differs"))?;
        all_pass(&reconstruct_checks(&ctx).map_err(|e| e.to_string())?).map_err(|e| format!("{name}: {e}"))?;
    }
    let elapsed = start.elapsed();
    require(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("M2, point and trivial bundles rebuilt via T ⊗ v ↦ T(v); D' = D; all reconstruction inputs pass; {elapsed:.2?}"))
}

// ---------------------------------------------------------------- criterion 10

fn calculus() -> Verdict {
    let z2 = cz(2);
    let z4 = cz(4);
    let fz2 = Fodc::universal(z2.clone());
    let fz4 = Fodc::new(z4.clone(), &[unit_vec(4, 2)]).map_err(|e| e.to_string())?;
    // germs identity on all basis pairs, computed directly
    for (h, f) in [(&z2, &fz2), (&z4, &fz4)] {
        let n = h.dim();
        for g in 0..n {
            for k in 0..n {
                let (gv, kv) = (unit_vec(n, g), unit_vec(n, k));
                let mut rhs = h.mul(&gv, &kv);
                let e = h.counit(&gv);
                qpbkit::linalg::axpy(&mut rhs, &-e, &kv);
                require(f.act(&f.pi(&gv), &kv) == f.pi(&rhs), || format!("germs identity fails at ({g}, {k})"))?;
            }
        }
    }
    // d_v² = 0 on vertical forms up to the cap
    for cap in 1..=3 {
        let forms = InvariantForms::new(&fz2, cap).map_err(|e| e.to_string())?;
        for gm in [ComoduleAlgebra::regular(z2.clone()), scenario("m2_checkerboard.toml").bundle.unwrap().total] {
            let v = VerticalForms::new(&gm, &forms);
            require(v.d.mul(&v.d).is_zero(), || format!("d_v² != 0 at cap {cap}"))?;
        }
    }
    // point-bundle curvature for the default and an alternative admissible δ
    let forms = InvariantForms::new(&fz4, 2).map_err(|e| e.to_string())?;
    let d0 = EmbeddedDifferential::standard(&fz4);
    let d1 = d0.shifted(&fz4).ok_or("no alternative δ")?;
    require(d0 != d1 && d1.is_admissible_against(&d0, &forms), || "alternative δ is not a distinct admissible choice".into())?;
    let (r0, r1) = (forms.point_bundle_curvature(&d0).map_err(|e| e.to_string())?, forms.point_bundle_curvature(&d1).map_err(|e| e.to_string())?);
    require(r0 == r1, || "curvature depends on δ".into())?;
    Ok("d_v² = 0 to cap 3; germs identity on all basis pairs; point-bundle curvature equal for both δ".into())
}

// ---------------------------------------------------------------- criterion 11

fn qpbkit(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_qpbkit")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_contract() -> Verdict {
    let input = fixture("m2_checkerboard.toml");
    let input = input.to_str().unwrap();
    let run = ["run", "--suite", "all", "--input", input, "--format", "json"];
    let (c1, a) = qpbkit(&run);
    let (c2, b) = qpbkit(&run);
    require(c1 == 0 && c2 == 0, || format!("corpus exit statuses {c1}, {c2}"))?;
    require(a == b, || "two runs differ".into())?;
    Report::from_json(std::str::from_utf8(&a).unwrap()).map_err(|e| e.to_string())?;
    let broken = fixture("broken_trivial_coaction.toml");
    let (cb, _) = qpbkit(&["run", "--suite", "bundle", "--input", broken.to_str().unwrap()]);
    require(cb == 1, || format!("broken fixture exits {cb}"))?;
    let nongroup = fixture("non_group_cayley.toml");
    let (cn, _) = qpbkit(&["run", "--suite", "hopf", "--input", nongroup.to_str().unwrap()]);
    require(cn == 2, || format!("non-group fixture exits {cn}"))?;
    Ok(format!("byte-identical JSON ({} bytes); exit statuses 0 / 1 / 2", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("Hopf axioms and Haar functional", hopf_axioms_and_haar),
        ("irreducible sets and Schur orthogonality", irreducible_sets),
        ("fusion multiplicities against the character oracle", fusion_oracle),
        ("bundle gate and broken fixtures", bundle_gate),
        ("frame identities", frame_identities),
        ("connections", connections),
        ("functoriality and exactness", functoriality),
        ("natural isomorphisms", natural_isomorphisms),
        ("reconstruction round-trip", reconstruction),
        ("calculus", calculus),
        ("CLI determinism and exit statuses", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
