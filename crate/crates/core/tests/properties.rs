//! Property tests for the structural invariants: cyclotomic field laws,
//! exact linear algebra, Hopf and corepresentation identities on random
//! elements, linearity of the section functor, and report comparison.

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use qpbkit::assoc::AssocContext;
use qpbkit::bundle::{derivative_space, BaseCalculus, HorizontalModel, QPBundle};
use qpbkit::check::Check;
use qpbkit::corep::{check_intertwiner, decompose, irreducible_set, mor_morphisms, mor_space, Corep};
use qpbkit::hopf::{FiniteGroup, HopfAlgebra};
use qpbkit::linalg::{vec_add, vec_scale, zero_vec, Vector};
use qpbkit::report::{diff_golden, values_equal, CheckRecord, Report};
use qpbkit::{CycScalar, Matrix, Parity};

const N: u32 = 12;

fn scalar() -> impl Strategy<Value = CycScalar> {
    prop::collection::vec((-4i64..=4, 1i64..=3), N as usize).prop_map(|terms| {
        terms
            .into_iter()
            .enumerate()
            .map(|(k, (num, den))| if num == 0 { CycScalar::zero() } else { CycScalar::cyc(num, den, k as i64, N) })
            .sum()
    })
}

fn small_scalar() -> impl Strategy<Value = CycScalar> {
    (-3i64..=3, 0i64..4).prop_map(|(a, k)| CycScalar::cyc(a, 1, k, 4))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(small_scalar(), rows * cols).prop_map(move |v| Matrix::from_fn(rows, cols, |i, j| v[i * cols + j].clone()))
}

fn element(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(small_scalar(), n)
}

fn hopf_algebras() -> &'static [Arc<HopfAlgebra>] {
    static H: OnceLock<Vec<Arc<HopfAlgebra>>> = OnceLock::new();
    H.get_or_init(|| {
        vec![
            Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::symmetric3())),
            Arc::new(HopfAlgebra::group_algebra(&FiniteGroup::symmetric3())),
            Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::cyclic(4))),
        ]
    })
}

fn irreps_s3() -> &'static [Corep] {
    static I: OnceLock<Vec<Corep>> = OnceLock::new();
    I.get_or_init(|| {
        let h = hopf_algebras()[0].clone();
        irreducible_set(&h, h.splitting_conductor).unwrap()
    })
}

fn m2_context() -> &'static AssocContext {
    static C: OnceLock<AssocContext> = OnceLock::new();
    C.get_or_init(|| {
        let h = Arc::new(HopfAlgebra::function_algebra(&FiniteGroup::cyclic(2)));
        let hm = HorizontalModel::new(&QPBundle::checkerboard(h).unwrap(), BaseCalculus::universal(2, 2).unwrap(), 2).unwrap();
        let dm = derivative_space(&hm).unwrap().particular;
        AssocContext::new(hm, dm).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), CycScalar::one());
        }
    }

    #[test]
    fn conjugation_is_an_involutive_automorphism(a in scalar(), b in scalar()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
    }

    #[test]
    fn printing_round_trips(a in scalar()) {
        let text = a.format_in(N);
        prop_assert_eq!(CycScalar::parse(&text, N).unwrap(), a.clone());
        prop_assert!(values_equal(&text, &a.format_in(N), N));
    }

    #[test]
    fn inverse_and_kernel(a in matrix(3, 3), b in matrix(3, 4)) {
        if let Some(inv) = a.inverse() {
            prop_assert_eq!(a.mul(&inv), Matrix::identity(3));
            prop_assert_eq!(inv.mul(&a), Matrix::identity(3));
        } else {
            prop_assert!(a.rank() < 3);
        }
        let ker = b.kernel();
        prop_assert_eq!(b.rank() + ker.len(), 4);
        for v in &ker {
            prop_assert!(b.mul_vec(v).iter().all(CycScalar::is_zero));
        }
    }

    #[test]
    fn solve_any_solves_consistent_systems(a in matrix(3, 4), x in element(4)) {
        let rhs = a.mul_vec(&x);
        let y = a.solve_any(&rhs).expect("consistent system");
        prop_assert_eq!(a.mul_vec(&y), rhs);
    }

    #[test]
    fn hopf_identities_on_random_elements(which in 0usize..3, seed in element(24)) {
        let h = &hopf_algebras()[which];
        let n = h.dim();
        let (a, b) = (seed[..n].to_vec(), seed[n..2 * n].to_vec());
        let ab = h.mul(&a, &b);
        prop_assert_eq!(h.coproduct(&ab), h.tensor_mul(&h.coproduct(&a), &h.coproduct(&b)));
        prop_assert_eq!(h.counit(&ab), &h.counit(&a) * &h.counit(&b));
        // m(S ⊗ id)Δ(a) = ε(a)1
        let delta = h.coproduct(&a);
        let mut acc = zero_vec(n);
        for p in 0..n {
            for q in 0..n {
                let c = &delta[p * n + q];
                if !c.is_zero() {
                    let sp = h.antipode(&qpbkit::linalg::unit_vec(n, p));
                    acc = vec_add(&acc, &vec_scale(&h.mul(&sp, &qpbkit::linalg::unit_vec(n, q)), c));
                }
            }
        }
        prop_assert_eq!(acc, vec_scale(h.unit(), &h.counit(&a)));
        // Haar invariance
        let haar = h.haar().unwrap();
        let mut lhs = zero_vec(n);
        for p in 0..n {
            for q in 0..n {
                lhs[q] = &lhs[q] + &(&delta[p * n + q] * &haar[p]);
            }
        }
        let hv = h.haar_value(&haar, &a);
        prop_assert_eq!(lhs, vec_scale(h.unit(), &hv));
    }

    #[test]
    fn intertwiner_spaces_are_closed_under_combination(i in 0usize..3, j in 0usize..3, cs in prop::collection::vec(small_scalar(), 8)) {
        let irr = irreps_s3();
        let (a, b) = (irr[i].tensor(&irr[j]), irr[(i + j) % 3].clone());
        let basis = mor_space(&a, &b, Parity::Even);
        let (mult, _) = decompose(&a, irr).unwrap();
        prop_assert_eq!(basis.len(), mult[(i + j) % 3]);
        let mut f = Matrix::zeros(b.dim(), a.dim());
        for (m, c) in basis.iter().zip(&cs) {
            f = f.add(&m.scale(c));
        }
        prop_assert!(check_intertwiner(&a, &b, &f, Parity::Even).is_ok());
        prop_assert!(a.check_corep().is_ok());
    }

    #[test]
    fn degree_zero_images_are_linear(c in small_scalar(), k in 0usize..4, l in 0usize..4) {
        let ctx = m2_context();
        let (t, s) = (ctx.irreps[0].clone(), ctx.irreps[1].clone());
        let sum = t.direct_sum(&s);
        let f = mor_morphisms(&sum, &sum, Parity::Even).into_iter().next().unwrap();
        let secs = ctx.sections(&sum);
        let (t1, t2) = (&secs[k % secs.len()], &secs[l % secs.len()]);
        let combo = t1.add(&t2.scale(&c));
        prop_assert_eq!(ctx.image(&f, &combo), ctx.image(&f, t1).add(&ctx.image(&f, t2).scale(&c)));
    }

    #[test]
    fn golden_comparison_ignores_order_and_representation(
        perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle(),
        a in small_scalar(),
    ) {
        let checks: Vec<CheckRecord> = (0..5)
            .map(|i| CheckRecord::from_check("s", Check::new(format!("c{i}"), format!("a/{i}"), Ok(())).with("v", format!("[[{}, 0]]", a.format_in(4)))))
            .collect();
        let r = Report::new("x", 4, "d", "all", checks.clone());
        let shuffled = Report::new("x", 4, "d", "all", perm.iter().map(|&i| checks[i].clone()).collect());
        prop_assert!(diff_golden(&r, &shuffled).is_empty());
        let mut scaled = r.clone();
        let doubled = &a * &CycScalar::from_int(2);
        scaled.checks[0].values.insert("v".into(), format!("[[{}, 0]]", doubled.format_in(4)));
        prop_assert_eq!(diff_golden(&scaled, &r).len(), usize::from(!a.is_zero()));
    }
}
