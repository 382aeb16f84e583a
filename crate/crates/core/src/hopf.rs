//! Finite-dimensional Hopf *-algebras by structure constants, with axiom
//! checks, the Haar functional and builders for function algebras and group
//! algebras of finite groups.

use num_integer::Integer;

use crate::algebra::{from_sparse, simple_tensor, to_sparse, FiniteAlgebra, Outcome, Sparse};
use crate::error::{Error, Result};
use crate::linalg::{unit_vec, vec_is_zero, zero_vec, Matrix, Vector};
use crate::scalar::CycScalar;

#[derive(Clone, Debug)]
pub struct HopfAlgebra {
    pub name: String,
    pub algebra: FiniteAlgebra,
    /// coproduct of each basis element, as a sparse vector in `H ⊗ H`
    coproducts: Vec<Sparse>,
    counit: Vector,
    /// column `i` is the antipode of basis element `i`
    antipode: Matrix,
    /// conductor over which all irreducible corepresentations are defined
    pub splitting_conductor: u32,
}

/// A finite group given by a 0-based multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub names: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl FiniteGroup {
    /// Validates a 1-based Cayley table.
    pub fn from_cayley(table: &[Vec<i64>], names: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::parse("cayley", "empty table"));
        }
        let mut t = vec![vec![0usize; n]; n];
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::parse(format!("cayley[{}]", i + 1), format!("row has {} entries, expected {n}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 1 || v as usize > n {
                    return Err(Error::parse(format!("cayley[{}][{}]", i + 1, j + 1), format!("entry {v} outside 1..={n}")));
                }
                t[i][j] = v as usize - 1;
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if t[t[a][b]][c] != t[a][t[b][c]] {
                        return Err(Error::parse(
                            format!("cayley[{}][{}]", a + 1, b + 1),
                            format!("not associative: ({} {}) {} != {} ({} {})", a + 1, b + 1, c + 1, a + 1, b + 1, c + 1),
                        ));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| t[e][a] == a && t[a][e] == a))
            .ok_or_else(|| Error::parse("cayley", "no identity element"))?;
        for a in 0..n {
            if !(0..n).any(|b| t[a][b] == identity && t[b][a] == identity) {
                return Err(Error::parse(format!("cayley[{}]", a + 1), format!("element {} has no inverse", a + 1)));
            }
        }
        let names = match names {
            Some(v) => {
                if v.len() != n {
                    return Err(Error::parse("elements", format!("expected {n} element names")));
                }
                v
            }
            None => (1..=n).map(|i| format!("g{i}")).collect(),
        };
        Ok(FiniteGroup { names, table: t, identity })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup { names: (0..n).map(|i| format!("r{i}")).collect(), table, identity: 0 }
    }

    /// Symmetric group on three letters; elements are permutations in
    /// lexicographic order of their one-line notation.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        let names = ["e", "s23", "s12", "c123", "c132", "s13"].iter().map(|s| s.to_string()).collect();
        FiniteGroup { names, table, identity: 0 }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == self.identity).unwrap()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u32 {
        (0..self.order()).map(|a| self.element_order(a) as u32).fold(1, |acc, o| acc.lcm(&o))
    }

    /// 1-based Cayley table.
    pub fn cayley(&self) -> Vec<Vec<i64>> {
        self.table.iter().map(|r| r.iter().map(|&x| x as i64 + 1).collect()).collect()
    }
}

impl HopfAlgebra {
    pub fn new(
        name: impl Into<String>,
        algebra: FiniteAlgebra,
        coproduct: impl Fn(usize) -> Vector,
        counit: Vector,
        antipode: impl Fn(usize) -> Vector,
        splitting_conductor: u32,
    ) -> Self {
        let n = algebra.dim();
        let coproducts = (0..n).map(|i| to_sparse(&coproduct(i))).collect();
        let cols: Vec<Vector> = (0..n).map(antipode).collect();
        HopfAlgebra {
            name: name.into(),
            algebra,
            coproducts,
            counit,
            antipode: Matrix::from_cols(n, &cols),
            splitting_conductor,
        }
    }

    /// Algebra of functions on a finite group, basis of point indicators `d_g`.
    pub fn function_algebra(group: &FiniteGroup) -> Self {
        let n = group.order();
        let labels = group.names.iter().map(|g| format!("d_{g}")).collect();
        let algebra = FiniteAlgebra::ungraded(
            labels,
            |i, j| if i == j { unit_vec(n, i) } else { zero_vec(n) },
            vec![CycScalar::one(); n],
            |i| unit_vec(n, i),
        );
        HopfAlgebra::new(
            format!("C(G), |G| = {n}"),
            algebra,
            |g| {
                let mut v = zero_vec(n * n);
                for a in 0..n {
                    let b = group.mul(group.inverse(a), g);
                    v[a * n + b] = CycScalar::one();
                }
                v
            },
            (0..n).map(|g| if g == group.identity { CycScalar::one() } else { CycScalar::zero() }).collect(),
            |g| unit_vec(n, group.inverse(g)),
            group.exponent(),
        )
    }

    /// Group algebra, basis of group-like elements `u_g`.
    pub fn group_algebra(group: &FiniteGroup) -> Self {
        let n = group.order();
        let labels = group.names.iter().map(|g| format!("u_{g}")).collect();
        let algebra = FiniteAlgebra::ungraded(
            labels,
            |i, j| unit_vec(n, group.mul(i, j)),
            unit_vec(n, group.identity),
            |i| unit_vec(n, group.inverse(i)),
        );
        HopfAlgebra::new(
            format!("C[G], |G| = {n}"),
            algebra,
            |g| simple_tensor(&unit_vec(n, g), &unit_vec(n, g)),
            vec![CycScalar::one(); n],
            |g| unit_vec(n, group.inverse(g)),
            group.exponent(),
        )
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn unit(&self) -> &Vector {
        self.algebra.unit()
    }

    pub fn mul(&self, a: &[CycScalar], b: &[CycScalar]) -> Vector {
        self.algebra.mul(a, b)
    }

    pub fn star(&self, a: &[CycScalar]) -> Vector {
        self.algebra.star(a)
    }

    pub fn coproduct(&self, a: &[CycScalar]) -> Vector {
        let n = self.dim();
        let mut out = zero_vec(n * n);
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (k, c) in &self.coproducts[i] {
                out[*k] = &out[*k] + &(ai * c);
            }
        }
        out
    }

    pub fn basis_coproduct(&self, i: usize) -> &Sparse {
        &self.coproducts[i]
    }

    pub fn counit(&self, a: &[CycScalar]) -> CycScalar {
        a.iter().zip(&self.counit).map(|(x, e)| x * e).sum()
    }

    pub fn counit_vector(&self) -> &Vector {
        &self.counit
    }

    pub fn antipode(&self, a: &[CycScalar]) -> Vector {
        self.antipode.mul_vec(a)
    }

    pub fn antipode_matrix(&self) -> &Matrix {
        &self.antipode
    }

    /// Product in `H ⊗ H`.
    pub fn tensor_mul(&self, a: &[CycScalar], b: &[CycScalar]) -> Vector {
        let n = self.dim();
        let mut out = zero_vec(n * n);
        for (p, ap) in a.iter().enumerate() {
            if ap.is_zero() {
                continue;
            }
            for (q, bq) in b.iter().enumerate() {
                if bq.is_zero() {
                    continue;
                }
                let c = ap * bq;
                let left = self.algebra.basis_product(p / n, q / n);
                let right = self.algebra.basis_product(p % n, q % n);
                for (i, x) in left {
                    for (j, y) in right {
                        out[i * n + j] = &out[i * n + j] + &(&c * &(x * y));
                    }
                }
            }
        }
        out
    }

    /// Applies `f ⊗ g` to an element of `H ⊗ H` where `f`, `g` are linear maps given by closures on basis indices.
    fn apply_legs(&self, t: &[CycScalar], f: impl Fn(usize) -> Vector, g: impl Fn(usize) -> Vector, out_a: usize, out_b: usize) -> Vector {
        let n = self.dim();
        let mut out = zero_vec(out_a * out_b);
        for (p, c) in t.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let fa = f(p / n);
            let gb = g(p % n);
            for (i, x) in fa.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in gb.iter().enumerate() {
                    if !y.is_zero() {
                        out[i * out_b + j] = &out[i * out_b + j] + &(c * &(x * y));
                    }
                }
            }
        }
        out
    }

    pub fn check_coassociative(&self) -> Outcome {
        let n = self.dim();
        for i in 0..n {
            let d = from_sparse(n * n, &self.coproducts[i]);
            // (Δ ⊗ id)Δ and (id ⊗ Δ)Δ, both as vectors indexed by (a n + b) n + c
            let lhs = self.apply_legs(&d, |a| self.coproduct(&unit_vec(n, a)), |b| unit_vec(n, b), n * n, n);
            let rhs = self.apply_legs(&d, |a| unit_vec(n, a), |b| self.coproduct(&unit_vec(n, b)), n, n * n);
            if lhs != rhs {
                return Err(format!("coassociativity fails on {}", self.algebra.labels[i]));
            }
        }
        Ok(())
    }

    pub fn check_counit(&self) -> Outcome {
        let n = self.dim();
        for i in 0..n {
            let d = from_sparse(n * n, &self.coproducts[i]);
            let e = |a: usize| vec![self.counit[a].clone()];
            let left = self.apply_legs(&d, e, |b| unit_vec(n, b), 1, n);
            let right = self.apply_legs(&d, |a| unit_vec(n, a), e, n, 1);
            let b = unit_vec(n, i);
            if left != b || right != b {
                return Err(format!("counit law fails on {}", self.algebra.labels[i]));
            }
        }
        Ok(())
    }

    pub fn check_antipode(&self) -> Outcome {
        let n = self.dim();
        for i in 0..n {
            let d = &self.coproducts[i];
            let mut left = zero_vec(n);
            let mut right = zero_vec(n);
            for (p, c) in d {
                let (a, b) = (p / n, p % n);
                let l = self.mul(&self.antipode.col(a), &unit_vec(n, b));
                let r = self.mul(&unit_vec(n, a), &self.antipode.col(b));
                crate::linalg::axpy(&mut left, c, &l);
                crate::linalg::axpy(&mut right, c, &r);
            }
            let expected: Vector = self.unit().iter().map(|u| u * &self.counit[i]).collect();
            if left != expected || right != expected {
                return Err(format!("antipode law fails on {}", self.algebra.labels[i]));
            }
        }
        Ok(())
    }

    pub fn check_coproduct_multiplicative(&self) -> Outcome {
        let n = self.dim();
        let unit_t = simple_tensor(self.unit(), self.unit());
        if self.coproduct(self.unit()) != unit_t {
            return Err("coproduct of the unit is not 1 ⊗ 1".into());
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = self.coproduct(&self.mul(&unit_vec(n, i), &unit_vec(n, j)));
                let rhs = self.tensor_mul(&from_sparse(n * n, &self.coproducts[i]), &from_sparse(n * n, &self.coproducts[j]));
                if lhs != rhs {
                    return Err(format!("coproduct not multiplicative on {} {}", self.algebra.labels[i], self.algebra.labels[j]));
                }
            }
        }
        Ok(())
    }

    pub fn check_counit_multiplicative(&self) -> Outcome {
        let n = self.dim();
        if !self.counit(self.unit()).is_one() {
            return Err("counit of the unit is not 1".into());
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = self.counit(&self.mul(&unit_vec(n, i), &unit_vec(n, j)));
                if lhs != &self.counit[i] * &self.counit[j] {
                    return Err(format!("counit not multiplicative on {} {}", self.algebra.labels[i], self.algebra.labels[j]));
                }
            }
        }
        Ok(())
    }

    pub fn check_star_compatibility(&self) -> Outcome {
        let n = self.dim();
        for i in 0..n {
            let b = unit_vec(n, i);
            let s = self.star(&b);
            // Δ(x*) = (* ⊗ *)Δ(x)
            let lhs = self.coproduct(&s);
            let d = from_sparse(n * n, &self.coproducts[i]);
            let mut rhs = zero_vec(n * n);
            for (p, c) in d.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let t = simple_tensor(&self.star(&unit_vec(n, p / n)), &self.star(&unit_vec(n, p % n)));
                crate::linalg::axpy(&mut rhs, &c.conj(), &t);
            }
            if lhs != rhs {
                return Err(format!("coproduct is not a *-map on {}", self.algebra.labels[i]));
            }
            if self.counit(&s) != self.counit[i].conj() {
                return Err(format!("counit is not a *-map on {}", self.algebra.labels[i]));
            }
            // κ(κ(x*)*) = x
            let k = self.antipode(&self.star(&self.antipode(&s)));
            if k != b {
                return Err(format!("κ(κ(x*)*) != x for x = {}", self.algebra.labels[i]));
            }
        }
        Ok(())
    }

    /// Named outcomes of every Hopf *-algebra axiom.
    pub fn check_hopf(&self) -> Vec<(&'static str, Outcome)> {
        vec![
            ("associativity", self.algebra.check_associative()),
            ("unit", self.algebra.check_unit()),
            ("star involution", self.algebra.check_star()),
            ("coassociativity", self.check_coassociative()),
            ("counit", self.check_counit()),
            ("antipode", self.check_antipode()),
            ("coproduct is an algebra map", self.check_coproduct_multiplicative()),
            ("counit is an algebra map", self.check_counit_multiplicative()),
            ("star compatibility", self.check_star_compatibility()),
        ]
    }

    /// The unique normalised left-invariant functional: `(id ⊗ h)Δ = h(·)1`, `h(1) = 1`.
    pub fn haar(&self) -> Result<Vector> {
        let n = self.dim();
        // unknown h_k; equations for each (i, j): Σ_k Δ_i[j,k] h_k - h_i 1_j = 0
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..n {
            let mut eq = vec![zero_vec(n); n];
            for (p, c) in &self.coproducts[i] {
                let (j, k) = (p / n, p % n);
                eq[j][k] = &eq[j][k] + c;
            }
            for (j, row) in eq.iter_mut().enumerate() {
                if !self.unit()[j].is_zero() {
                    row[i] = &row[i] - &self.unit()[j];
                }
            }
            for row in eq {
                if !vec_is_zero(&row) {
                    rows.push(row);
                    rhs.push(CycScalar::zero());
                }
            }
        }
        rows.push(self.unit().clone());
        rhs.push(CycScalar::one());
        let m = Matrix::from_rows(rows);
        match m.solve_affine(&rhs) {
            crate::linalg::AffineSolution::Infeasible => Err(Error::Invalid("no invariant functional".into())),
            crate::linalg::AffineSolution::Solved { particular, kernel } => {
                if !kernel.is_empty() {
                    return Err(Error::Invalid(format!("invariant functional not unique ({} free parameters)", kernel.len())));
                }
                Ok(particular)
            }
        }
    }

    pub fn haar_value(&self, h: &[CycScalar], a: &[CycScalar]) -> CycScalar {
        h.iter().zip(a).map(|(x, y)| x * y).sum()
    }

    /// Right invariance `(h ⊗ id)Δ = h(·)1` of a functional.
    pub fn check_right_invariant(&self, h: &[CycScalar]) -> Outcome {
        let n = self.dim();
        for i in 0..n {
            let mut lhs = zero_vec(n);
            for (p, c) in &self.coproducts[i] {
                let (a, b) = (p / n, p % n);
                lhs[b] = &lhs[b] + &(c * &h[a]);
            }
            let rhs: Vector = self.unit().iter().map(|u| u * &h[i]).collect();
            if lhs != rhs {
                return Err(format!("right invariance fails on {}", self.algebra.labels[i]));
            }
        }
        Ok(())
    }

    /// Positivity `h(x* x) > 0` on basis elements and faithfulness of the
    /// Gram form `(x, y) ↦ h(x* y)`.
    pub fn check_haar_positive(&self, h: &[CycScalar]) -> Result<Outcome> {
        let n = self.dim();
        let gram = Matrix::from_fn(n, n, |i, j| self.haar_value(h, &self.mul(&self.star(&unit_vec(n, i)), &unit_vec(n, j))));
        if gram.is_strictly_positive()? {
            Ok(Ok(()))
        } else {
            Ok(Err("the form h(x* y) is not positive definite".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cayley_validation() {
        let g = FiniteGroup::from_cayley(&[vec![1, 2], vec![2, 1]], None).unwrap();
        assert_eq!(g.order(), 2);
        let bad = FiniteGroup::from_cayley(&[vec![1, 2], vec![2, 2]], None);
        assert!(matches!(bad, Err(Error::Parse { .. })));
        let out_of_range = FiniteGroup::from_cayley(&[vec![1, 3], vec![2, 1]], None).unwrap_err();
        assert_eq!(out_of_range, Error::parse("cayley[1][2]", "entry 3 outside 1..=2"));
    }

    #[test]
    fn s3_is_a_group_of_exponent_6() {
        let g = FiniteGroup::symmetric3();
        let again = FiniteGroup::from_cayley(&g.cayley(), Some(g.names.clone())).unwrap();
        assert_eq!(again, g);
        assert_eq!(g.exponent(), 6);
    }

    #[test]
    fn builders_satisfy_axioms() {
        for g in [FiniteGroup::cyclic(2), FiniteGroup::cyclic(4), FiniteGroup::symmetric3()] {
            for h in [HopfAlgebra::function_algebra(&g), HopfAlgebra::group_algebra(&g)] {
                for (name, o) in h.check_hopf() {
                    assert_eq!(o, Ok(()), "{name} on {}", h.name);
                }
            }
        }
    }

    #[test]
    fn haar_of_function_algebra_is_uniform() {
        let g = FiniteGroup::symmetric3();
        let h = HopfAlgebra::function_algebra(&g);
        let haar = h.haar().unwrap();
        assert!(haar.iter().all(|x| *x == CycScalar::frac(1, 6)));
        let ga = HopfAlgebra::group_algebra(&g);
        let hg = ga.haar().unwrap();
        assert_eq!(hg, unit_vec(6, 0));
    }

    #[test]
    fn broken_antipode_is_witnessed() {
        let g = FiniteGroup::cyclic(3);
        let good = HopfAlgebra::function_algebra(&g);
        let n = good.dim();
        let bad = HopfAlgebra::new(
            "broken",
            good.algebra.clone(),
            |i| good.coproduct(&unit_vec(n, i)),
            good.counit_vector().clone(),
            |i| unit_vec(n, i),
            3,
        );
        let res = bad.check_antipode();
        assert!(res.unwrap_err().contains("antipode"));
    }
}
