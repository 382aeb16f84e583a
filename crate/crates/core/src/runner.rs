//! Verification suites over a parsed scenario. Each suite produces an
//! ordered list of checks; construction failures become failed checks,
//! internal inconsistencies abort the run.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::algebra::Outcome;
use crate::assoc::{format_matrix, AssocContext, SectionFrame};
use crate::bundle::{check_derivative, derivative_space, format_element, BaseCalculus, HorizontalModel};
use crate::calculus::{EmbeddedDifferential, Fodc, InvariantForms, VerticalForms};
use crate::check::{ensure, first_failure, Check};
use crate::comodule::ComoduleAlgebra;
use crate::corep::{decompose, irreducible_set, mor_morphisms, mor_space, Corep, GradedMorphism};
use crate::error::{Error, Result};
use crate::input::Scenario;
use crate::linalg::Parity;
use crate::reconstruct::{block_frames, certificate, hypotheses, reconstruct};
use crate::report::{CheckRecord, Report};
use crate::scalar::set_display_conductor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Hopf,
    Corep,
    Calculus,
    Bundle,
    Assoc,
    Reconstruct,
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Hopf, Suite::Corep, Suite::Calculus, Suite::Bundle, Suite::Assoc, Suite::Reconstruct, Suite::All];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Hopf => "hopf",
            Suite::Corep => "corep",
            Suite::Calculus => "calculus",
            Suite::Bundle => "bundle",
            Suite::Assoc => "assoc",
            Suite::Reconstruct => "reconstruct",
            Suite::All => "all",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::Hopf => "Hopf *-algebra axioms and the Haar functional",
            Suite::Corep => "irreducible corepresentations, Schur orthogonality, unitarity and fusion",
            Suite::Calculus => "first-order calculus, invariant forms, vertical forms and point-bundle curvature",
            Suite::Bundle => "bundle gate, base calculus, horizontal forms and covariant derivatives",
            Suite::Assoc => "associated bundles: frames, connections, functoriality and natural isomorphisms",
            Suite::Reconstruct => "reconstruction of the bundle from its associated bundles",
            Suite::All => "every suite above, in order",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite '{s}'")))
    }
}

/// Turns a construction error into a failed check; internal errors propagate.
fn guarded(name: &str, anchor: &str, r: Result<Vec<Check>>) -> Result<Vec<Check>> {
    match r {
        Ok(v) => Ok(v),
        Err(e @ Error::Internal(_)) => Err(e),
        Err(e) => Ok(vec![Check::new(name, anchor, Err(e.to_string()))]),
    }
}

fn named(items: Vec<(&'static str, Outcome)>, anchors: &[&str]) -> Vec<Check> {
    items.into_iter().zip(anchors).map(|((n, o), a)| Check::new(n, *a, o)).collect()
}

fn format_vector(v: &[crate::scalar::CycScalar]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn format_counts(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

pub fn hopf_suite(scn: &Scenario) -> Result<Vec<Check>> {
    let h = &scn.hopf;
    let anchors = [
        "hopf/associativity",
        "hopf/unit",
        "hopf/star-involution",
        "hopf/coassociativity",
        "hopf/counit",
        "hopf/antipode",
        "hopf/coproduct-multiplicative",
        "hopf/counit-multiplicative",
        "hopf/star-compatibility",
    ];
    let mut out = named(h.check_hopf(), &anchors);
    let haar = guarded("Haar functional exists and is unique", "hopf/haar-unique", (|| {
        let v = h.haar()?;
        let positive = h.check_haar_positive(&v)?;
        Ok(vec![
            Check::new("Haar functional exists and is unique", "hopf/haar-unique", Ok(())).with("haar", format_vector(&v)),
            Check::new("Haar functional is right invariant", "hopf/haar-right-invariant", h.check_right_invariant(&v)),
            Check::new("Haar functional is faithful and positive", "hopf/haar-positive", positive),
        ])
    })())?;
    out.extend(haar);
    Ok(out)
}

pub fn corep_suite(scn: &Scenario) -> Result<Vec<Check>> {
    guarded("irreducible corepresentations are computed", "corep/irreducible-set", (|| {
        let irreps = irreducible_set(&scn.hopf, scn.conductor)?;
        let dims: Vec<usize> = irreps.iter().map(Corep::dim).collect();
        let sq: usize = dims.iter().map(|d| d * d).sum();
        let mut out = vec![Check::new(
            "irreducible set exhausts the regular corepresentation",
            "corep/irreducible-set",
            ensure(sq == scn.hopf.dim(), || format!("Σ dim² = {sq}, dim H = {}", scn.hopf.dim())),
        )
        .with("count", irreps.len().to_string())
        .with("dims", format_counts(&dims))];
        let schur = first_failure((0..irreps.len() * irreps.len()).into_par_iter().map(|p| {
            let (i, j) = (p / irreps.len(), p % irreps.len());
            let n = mor_space(&irreps[i], &irreps[j], Parity::Even).len();
            let want = usize::from(i == j);
            ensure(n == want, || format!("dim Mor({}, {}) = {n}, expected {want}", irreps[i].name, irreps[j].name))
        }).collect::<Vec<_>>());
        out.push(Check::new("Schur orthogonality of the irreducibles", "corep/schur", schur));
        let unitary = first_failure(irreps.iter().map(|c| c.check_unitary().map_err(|w| format!("{}: {w}", c.name))));
        out.push(Check::new("irreducibles are unitary", "corep/unitary", unitary));
        for c in &scn.coreps {
            let valid = c.check_corep();
            let mut chk = Check::new(format!("named corepresentation {}", c.name), "corep/named", valid.clone());
            if valid.is_ok() {
                match decompose(c, &irreps) {
                    Ok((mult, _)) => chk = chk.with("multiplicities", format_counts(&mult)),
                    Err(e @ Error::Internal(_)) => return Err(e),
                    Err(e) => chk.outcome = Err(e.to_string()),
                }
            }
            out.push(chk);
        }
        let pairs: Vec<(usize, usize)> =
            (0..irreps.len()).flat_map(|i| (i..irreps.len()).map(move |j| (i, j))).collect();
        let fusion: Vec<Result<(String, Vec<usize>)>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let t = irreps[i].tensor(&irreps[j]);
                let (mult, _) = decompose(&t, &irreps)?;
                let total: usize = mult.iter().zip(&dims).map(|(m, d)| m * d).sum();
                if total != t.dim() {
                    return Err(Error::Internal(format!("decomposition of {} loses dimensions", t.name)));
                }
                Ok((format!("{}⊗{}", irreps[i].name, irreps[j].name), mult))
            })
            .collect();
        let mut chk = Check::new("tensor products decompose into irreducibles", "corep/fusion", Ok(()));
        for r in fusion {
            let (k, m) = r?;
            chk = chk.with(k, format_counts(&m));
        }
        out.push(chk);
        Ok(out)
    })())
}

pub fn calculus_suite(scn: &Scenario) -> Result<Vec<Check>> {
    guarded("first-order calculus is well defined", "calculus/ideal", (|| {
        let fodc = Fodc::new(scn.hopf.clone(), &scn.calculus.generators)?;
        let mut out = vec![
            Check::new("ideal is a right ideal", "calculus/right-ideal", fodc.check_right_ideal())
                .with("invariant_one_forms", fodc.dim().to_string()),
            Check::new("ideal is ad-invariant", "calculus/ad-invariant", fodc.check_ad_invariant()),
            Check::new("germs map identity holds on all basis pairs", "calculus/germs-identity", fodc.check_germs_identity()),
            Check::new("calculus is star compatible", "calculus/star-compatible", fodc.check_star_compatible()),
        ];
        let forms = InvariantForms::new(&fodc, scn.calculus.degree_cap)?;
        out.push(Check::new("invariant forms are a graded *-algebra", "calculus/forms-algebra", forms.algebra.check_all())
            .with("dim", forms.dim().to_string()));
        out.push(Check::new(
            "invariant forms carry a graded *-differential with d² = 0",
            "calculus/forms-differential",
            forms.algebra.check_differential(&forms.d),
        ));
        out.push(Check::new(
            "inclusion connection is multiplicative",
            "calculus/multiplicative-connection",
            forms.check_multiplicative_connection(),
        ));
        if scn.calculus.degree_cap >= 2 {
            let d0 = EmbeddedDifferential::standard(&fodc);
            let r0 = forms.point_bundle_curvature(&d0)?;
            let mut chk = Check::new("point-bundle curvature is independent of the admissible δ", "calculus/curvature-delta", Ok(()))
                .with("curvature", format_matrix(&r0));
            if scn.calculus.delta_alt {
                match d0.shifted(&fodc) {
                    Some(d1) => {
                        let admissible = d1.is_admissible_against(&d0, &forms);
                        let r1 = forms.point_bundle_curvature(&d1)?;
                        chk.outcome = if !admissible {
                            Err("alternative δ is not admissible".into())
                        } else {
                            ensure(r0 == r1, || format!("curvature {} != {}", format_matrix(&r0), format_matrix(&r1)))
                        };
                        chk = chk.with("alternative", "shifted by a quadratic relation");
                    }
                    None => chk = chk.with("alternative", "none: no quadratic relations"),
                }
            }
            out.push(chk);
        }
        let gm = match &scn.bundle {
            Some(b) => b.total.clone(),
            None => ComoduleAlgebra::regular(scn.hopf.clone()),
        };
        let vf = VerticalForms::new(&gm, &forms);
        out.push(Check::new("vertical forms are a graded *-algebra", "calculus/vertical-algebra", vf.algebra.check_all())
            .with("dim", vf.algebra.dim().to_string()));
        out.push(Check::new("vertical differential squares to zero", "calculus/vertical-d-squared", vf.check_d_squared()));
        Ok(out)
    })())
}

/// The bundle suite's checks and, when the gate and the derivative solve
/// succeed, the context the downstream suites work in.
pub struct BundleStage {
    pub checks: Vec<Check>,
    pub contexts: Vec<AssocContext>,
}

pub fn bundle_stage(scn: &Scenario) -> Result<BundleStage> {
    let Some(bundle) = &scn.bundle else {
        return Ok(BundleStage {
            checks: vec![Check::new("a bundle is declared", "bundle/declared", Err("the scenario has no [bundle] section".into()))],
            contexts: Vec::new(),
        });
    };
    let gate = bundle.check_all();
    let mut checks = named(gate, &["bundle/coaction", "bundle/invariant-base", "bundle/canonical-map-surjective"]);
    checks[1] = checks[1].clone().with("base_points", bundle.points.len().to_string());
    checks[2] = checks[2].clone().with("canonical_map_rank", bundle.canonical_map_rank().to_string());
    if checks.iter().any(|c| !c.passed()) {
        return Ok(BundleStage { checks, contexts: Vec::new() });
    }
    let mut contexts = Vec::new();
    let rest = guarded("horizontal model is built", "bundle/horizontal-model", (|| {
        let mut out = Vec::new();
        let base = BaseCalculus::universal(bundle.points.len(), scn.base_cap)?;
        out.extend(named(base.check_all(), &["base/algebra", "base/differential", "base/generation"]));
        let hm = HorizontalModel::new(bundle, base, scn.conductor)?;
        let mut hchecks = named(
            hm.check_all(),
            &["horizontal/algebra", "horizontal/coaction", "horizontal/extends-coaction", "horizontal/invariants"],
        );
        let blocks: Vec<String> = hm.blocks.iter().map(|(c, secs)| format!("{}:{}", c.name, secs.len())).collect();
        hchecks[0] = hchecks[0].clone().with("dim", hm.dim().to_string()).with("blocks", blocks.join(", "));
        out.extend(hchecks);
        let space = derivative_space(&hm)?;
        let members = if scn.all_members { space.sample_members(&hm) } else { vec![space.particular.clone()] };
        let anchors = ["derivative/degree", "derivative/covariant", "derivative/leibniz", "derivative/star", "derivative/restricts-to-d"];
        for (m, dm) in members.iter().enumerate() {
            for (c, a) in check_derivative(&hm, dm).into_iter().zip(anchors) {
                let mut chk = Check::new(format!("member {m}: {}", c.0), a, c.1);
                if m == 0 && a == anchors[0] {
                    chk = chk
                        .with("displacement_dim", space.displacements.len().to_string())
                        .with("members", members.len().to_string());
                }
                out.push(chk);
            }
        }
        let coeffs: Vec<String> = space
            .particular
            .on_transport(&hm)
            .iter()
            .map(|v| format_element(hm.algebra(), v))
            .collect();
        if let Some(first) = out.iter_mut().find(|c| c.anchor == "derivative/degree") {
            first.values.push(("transport_coefficients".into(), format!("[{}]", coeffs.join(", "))));
        }
        if out.iter().all(Check::passed) {
            for dm in members {
                contexts.push(AssocContext::new(hm.clone(), dm)?);
            }
        }
        Ok(out)
    })())?;
    checks.extend(rest);
    Ok(BundleStage { checks, contexts })
}

/// Frames computed once per corepresentation of a fixed list.
struct Frames<'a> {
    ctx: &'a AssocContext,
    coreps: Vec<Corep>,
    frames: Vec<SectionFrame>,
}

impl<'a> Frames<'a> {
    fn new(ctx: &'a AssocContext, coreps: Vec<Corep>) -> Result<Self> {
        let frames = coreps.par_iter().map(|c| ctx.frame(c)).collect::<Result<Vec<_>>>()?;
        Ok(Frames { ctx, coreps, frames })
    }

    fn get(&self, c: &Corep) -> Result<SectionFrame> {
        match self.coreps.iter().position(|x| x == c) {
            Some(i) => Ok(self.frames[i].clone()),
            None => self.ctx.frame(c),
        }
    }
}

/// Aggregates checks sharing an anchor: the first failure wins, and the
/// number of instances is recorded.
fn aggregate(name: &str, anchor: &str, checks: &[Check]) -> Option<Check> {
    let mine: Vec<&Check> = checks.iter().filter(|c| c.anchor == anchor).collect();
    if mine.is_empty() {
        return None;
    }
    let outcome = first_failure(mine.iter().map(|c| c.outcome.clone().map_err(|w| format!("{}: {w}", c.name))));
    Some(Check::new(name, anchor, outcome).with("instances", mine.len().to_string()))
}

fn assoc_coreps(ctx: &AssocContext, named: &[Corep]) -> Vec<Corep> {
    let triv = ctx.irreps[0].clone();
    let beta = ctx.irreps.get(1).cloned().unwrap_or_else(|| triv.clone());
    let mut out = ctx.irreps.clone();
    let mut push = |c: Corep| {
        if !out.iter().any(|x| x.name == c.name) {
            out.push(c);
        }
    };
    push(triv.direct_sum(&beta));
    push(beta.tensor(&beta));
    push(beta.conjugate());
    for c in named {
        push(c.clone());
    }
    out
}

const MAX_PAIRS: usize = 40;

/// Composable pairs `(f, g)`, those involving a degree-1 morphism first.
fn composable_pairs(morphisms: &[GradedMorphism]) -> Vec<(GradedMorphism, GradedMorphism)> {
    let mut odd = Vec::new();
    let mut even = Vec::new();
    for f in morphisms {
        for g in morphisms {
            if f.target == g.source {
                let bucket = if f.degree() == 1 || g.degree() == 1 { &mut odd } else { &mut even };
                bucket.push((f.clone(), g.clone()));
            }
        }
    }
    odd.truncate(MAX_PAIRS / 2);
    let room = MAX_PAIRS - odd.len();
    odd.extend(even.into_iter().take(room));
    odd
}

pub fn assoc_checks(ctx: &AssocContext, named: &[Corep], member: usize) -> Result<Vec<Check>> {
    let coreps = assoc_coreps(ctx, named);
    let frames = Frames::new(ctx, coreps.clone())?;
    let tag = |c: Check| if member == 0 { c } else { Check { name: format!("member {member}: {}", c.name), ..c } };
    let mut out = Vec::new();
    let per_frame: Vec<Vec<Check>> = frames
        .frames
        .par_iter()
        .map(|f| {
            let mut v = ctx.frame_checks(f);
            v.extend(ctx.flip_checks(f));
            v.extend(ctx.connection_checks(f));
            v
        })
        .collect();
    out.extend(per_frame.into_iter().flatten());

    let mut morphisms = Vec::new();
    for a in &coreps {
        for b in &coreps {
            for parity in [Parity::Even, Parity::Odd] {
                morphisms.extend(mor_morphisms(a, b, parity));
            }
        }
    }
    let mchecks: Vec<Check> = morphisms
        .par_iter()
        .map(|g| -> Result<Vec<Check>> { Ok(ctx.morphism_checks(g, &frames.get(&g.source)?, &frames.get(&g.target)?)) })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    for (name, anchor) in [
        ("degree-0 images intertwine the connections", "functor/connection-even"),
        ("degree-0 images intertwine the flips", "functor/flip-even"),
        ("degree-1 images twist the connections", "functor/connection-odd"),
        ("degree-1 images twist the flips", "functor/flip-odd"),
    ] {
        out.extend(aggregate(name, anchor, &mchecks));
    }
    let pairs = composable_pairs(&morphisms);
    let triv = ctx.irreps[0].clone();
    let beta = ctx.irreps.get(1).cloned().unwrap_or_else(|| triv.clone());
    out.push(ctx.functoriality(&pairs));
    out.push(ctx.exactness(&triv, &beta));

    for c in &ctx.irreps {
        let (f, fc) = (frames.get(c)?, frames.get(&c.conjugate())?);
        out.extend(ctx.conjugate_checks(&f, &fc));
    }
    out.push(ctx.conjugate_naturality(&morphisms));

    let irr = &ctx.irreps;
    let triples: Vec<(usize, usize)> = (0..irr.len()).flat_map(|i| (0..irr.len()).map(move |j| (i, j))).collect();
    let tchecks: Vec<Vec<Check>> = triples
        .par_iter()
        .map(|&(i, j)| -> Result<Vec<Check>> {
            let (fa, fb, fab) = (frames.get(&irr[i])?, frames.get(&irr[j])?, frames.get(&irr[i].tensor(&irr[j]))?);
            let label = format!("{} ⊗ {}", irr[i].name, irr[j].name);
            let mut v = ctx.tensor_checks(&fa, &fb, &fab);
            let assoc = first_failure(irr.iter().map(|c| ctx.associativity(&fa, &fb, &fab, &ctx.sections(c))));
            v.push(Check::new(format!("{label} ⊗ ·: section products are associative"), "tensor/associativity", assoc));
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    out.extend(tchecks.into_iter().flatten());
    let even_pairs: Vec<(GradedMorphism, GradedMorphism)> = morphisms
        .iter()
        .filter(|f| f.degree() == 0)
        .flat_map(|f| morphisms.iter().filter(|g| g.degree() == 0).map(move |g| (f.clone(), g.clone())))
        .take(MAX_PAIRS / 2)
        .collect();
    out.push(ctx.tensor_naturality(&even_pairs, &|c| frames.get(c)));
    Ok(out.into_iter().map(tag).collect())
}

pub fn reconstruct_checks(ctx: &AssocContext) -> Result<Vec<Check>> {
    guarded("block frames are built", "reconstruction/frames", (|| {
        let frames = block_frames(ctx)?;
        let mut out = hypotheses(ctx, &frames);
        if out.iter().all(Check::passed) {
            let rec = reconstruct(ctx, frames)?;
            out.extend(certificate(ctx, &rec));
        }
        Ok(out)
    })())
}

fn downstream(stage: &BundleStage, suite: &str) -> Option<Check> {
    if stage.contexts.is_empty() {
        Some(Check::new(
            format!("{suite} prerequisites"),
            "bundle/prerequisites",
            Err("the bundle suite did not pass; downstream checks were not run".into()),
        ))
    } else {
        None
    }
}

/// Runs `suite` and returns the checks tagged with the suite they belong to.
pub fn run_checks(scn: &Scenario, suite: Suite) -> Result<Vec<CheckRecord>> {
    set_display_conductor(scn.conductor);
    let tagged = |s: Suite, v: Vec<Check>| v.into_iter().map(move |c| CheckRecord::from_check(s.as_str(), c)).collect::<Vec<_>>();
    let mut out = Vec::new();
    let wants = |s: Suite| suite == s || suite == Suite::All;
    if wants(Suite::Hopf) {
        out.extend(tagged(Suite::Hopf, hopf_suite(scn)?));
    }
    if wants(Suite::Corep) {
        out.extend(tagged(Suite::Corep, corep_suite(scn)?));
    }
    if wants(Suite::Calculus) {
        out.extend(tagged(Suite::Calculus, calculus_suite(scn)?));
    }
    let needs_bundle = [Suite::Bundle, Suite::Assoc, Suite::Reconstruct].into_iter().any(|s| suite == s)
        || (suite == Suite::All && scn.bundle.is_some());
    if !needs_bundle {
        return Ok(out);
    }
    let stage = bundle_stage(scn)?;
    if wants(Suite::Bundle) {
        out.extend(tagged(Suite::Bundle, stage.checks.clone()));
    }
    if wants(Suite::Assoc) {
        match downstream(&stage, "assoc") {
            Some(c) => out.extend(tagged(Suite::Assoc, vec![c])),
            None => {
                for (m, ctx) in stage.contexts.iter().enumerate() {
                    let v = guarded("associated bundles are built", "assoc/frames", assoc_checks(ctx, &scn.coreps, m))?;
                    out.extend(tagged(Suite::Assoc, v));
                }
            }
        }
    }
    if wants(Suite::Reconstruct) {
        match downstream(&stage, "reconstruct") {
            Some(c) => out.extend(tagged(Suite::Reconstruct, vec![c])),
            None => out.extend(tagged(Suite::Reconstruct, reconstruct_checks(&stage.contexts[0])?)),
        }
    }
    Ok(out)
}

pub fn run(scn: &Scenario, suite: Suite) -> Result<Report> {
    let checks = run_checks(scn, suite)?;
    Ok(Report::new(&scn.name, scn.conductor, &scn.digest, suite.as_str(), checks))
}
