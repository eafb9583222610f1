//! Rank-one symplectic matrices, the action of `H'_n(m)` on `sp_n`-modules,
//! jet modules `W (x) A_n(m)` for `H_n(m) x| A_n(m)`, and evaluation maps of
//! multiloop algebras.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::lattice::{pair, Degree, GradingLattice};
use crate::linalg::Mat;
use crate::scalar::{CycScalar, CyclotomicField};
use crate::simple_lie::{GElem, SimpleLieAlgebra};
use crate::tau::{TauAlgebra, TauElement};

/// `J = (0, I; -I, 0)`, so that `J r = r-bar`.
pub fn symplectic_form(field: CyclotomicField, n: usize) -> Mat {
    let k = n / 2;
    Mat::from_fn(n, n, |i, j| {
        if j == i + k {
            field.one()
        } else if i == j + k {
            -field.one()
        } else {
            field.zero()
        }
    })
}

/// Which outer product stands for `r^t r-bar`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum RankOneConvention {
    /// Column `r` times row `r-bar`: entries `r_i r-bar_j`.
    #[default]
    ColumnRow,
    /// Column `r-bar` times row `r` (the transpose).
    RowColumn,
}

/// An element of `sp_n`: `M^T J + J M = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpMatrix(Mat);

impl SpMatrix {
    pub fn new(m: Mat, field: CyclotomicField) -> Result<Self> {
        if Self::is_symplectic(&m, field) {
            Ok(Self(m))
        } else {
            Err(Error::Precondition("matrix is not in sp_n".into()))
        }
    }

    pub fn is_symplectic(m: &Mat, field: CyclotomicField) -> bool {
        if m.rows() != m.cols() || !m.rows().is_multiple_of(2) {
            return false;
        }
        let j = symplectic_form(field, m.rows());
        let lhs = m.transpose().mul(&j).expect("square");
        let rhs = j.mul(m).expect("square");
        lhs.add(&rhs).expect("same shape").is_zero()
    }

    pub fn rank_one(r: &Degree, field: CyclotomicField) -> SpMatrix {
        Self::rank_one_with(r, field, RankOneConvention::ColumnRow)
    }

    pub fn rank_one_with(r: &Degree, field: CyclotomicField, convention: RankOneConvention) -> SpMatrix {
        let (col, row) = match convention {
            RankOneConvention::ColumnRow => (r.clone(), r.bar()),
            RankOneConvention::RowColumn => (r.bar(), r.clone()),
        };
        SpMatrix(Mat::from_fn(r.len(), r.len(), |i, j| field.int(col.0[i] * row.0[j])))
    }

    pub fn matrix(&self) -> &Mat {
        &self.0
    }
}

/// The shipped `sp_n`-modules.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpModule {
    Trivial { n: usize },
    Natural { n: usize },
}

impl SpModule {
    pub fn dim(&self) -> usize {
        match *self {
            SpModule::Trivial { .. } => 1,
            SpModule::Natural { n } => n,
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            SpModule::Trivial { n } | SpModule::Natural { n } => n,
        }
    }

    /// `rho(M)` as a matrix on `W`.
    pub fn rho(&self, m: &Mat, field: CyclotomicField) -> Mat {
        match self {
            SpModule::Trivial { .. } => Mat::zeros(field, 1, 1),
            SpModule::Natural { .. } => m.clone(),
        }
    }
}

/// The action of `I(r-bar, r)` on `W`: `rho(r^t r-bar) + (r-bar, zeta) Id`.
#[derive(Clone, Debug)]
pub struct HPrimeAction {
    pub module: SpModule,
    pub zeta: Vec<CycScalar>,
    pub lattice: GradingLattice,
    pub convention: RankOneConvention,
    field: CyclotomicField,
}

impl HPrimeAction {
    pub fn new(
        module: SpModule,
        zeta: Vec<CycScalar>,
        lattice: GradingLattice,
        field: CyclotomicField,
    ) -> Result<Self> {
        if module.rank() != lattice.n() || zeta.len() != lattice.n() {
            return Err(Error::Dimension("module rank, zeta and lattice must agree on n".into()));
        }
        Ok(Self {
            module,
            zeta,
            lattice,
            convention: RankOneConvention::ColumnRow,
            field,
        })
    }

    pub fn with_convention(mut self, convention: RankOneConvention) -> Self {
        self.convention = convention;
        self
    }

    /// The operator of `I_r` (zero for `r = 0`).
    pub fn operator(&self, r: &Degree) -> Result<Mat> {
        if !self.lattice.in_gamma_bar(r) {
            return Err(Error::NotInLattice {
                degree: r.to_string(),
                lattice: "Gamma-bar",
            });
        }
        let m = SpMatrix::rank_one_with(r, self.field, self.convention);
        let rho = self.module.rho(m.matrix(), self.field);
        let c = pair(&self.zeta, &r.bar(), self.field);
        rho.add(&Mat::identity(self.field, self.module.dim()).scale(&c))
    }

    pub fn act(&self, r: &Degree, w: &[CycScalar]) -> Result<Vec<CycScalar>> {
        self.operator(r)?.apply(w)
    }

    /// `(r-bar, s)(I_{r+s} - I_r - I_s)`, the action of `[I_r, I_s]`.
    pub fn closed_bracket(&self, r: &Degree, s: &Degree) -> Result<Mat> {
        let c = self.field.int(r.sympl(s)?);
        let sum = self.operator(&(r + s))?;
        let diff = sum.sub(&self.operator(r)?)?.sub(&self.operator(s)?)?;
        Ok(diff.scale(&c))
    }

    /// `rho([I_r, I_s]) - [rho(I_r), rho(I_s)]`.
    pub fn axiom_residual(&self, r: &Degree, s: &Degree) -> Result<Mat> {
        let lhs = self.closed_bracket(r, s)?;
        let rhs = self.operator(r)?.commutator(&self.operator(s)?)?;
        lhs.sub(&rhs)
    }
}

/// Generators of `H_n(m) x| A_n(m)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum JetGenerator {
    /// `h_r = D(r-bar, r)`, `r != 0`.
    Hamiltonian(Degree),
    /// `D(u, 0)`.
    Derivation(Vec<CycScalar>),
    /// `t^r`.
    Monomial(Degree),
}

/// A finite sum `sum_k w_k (x) t^k`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct JetVector {
    comps: BTreeMap<Degree, Vec<CycScalar>>,
}

impl JetVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(k: Degree, w: Vec<CycScalar>) -> Self {
        let mut v = Self::zero();
        v.add_component(&k, &w);
        v
    }

    pub fn components(&self) -> &BTreeMap<Degree, Vec<CycScalar>> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add_component(&mut self, k: &Degree, w: &[CycScalar]) {
        let entry = self
            .comps
            .entry(k.clone())
            .or_insert_with(|| w.iter().map(|c| c.field().zero()).collect());
        for (a, b) in entry.iter_mut().zip(w) {
            *a += b;
        }
        if entry.iter().all(CycScalar::is_zero) {
            self.comps.remove(k);
        }
    }

    pub fn add(&self, o: &JetVector) -> JetVector {
        let mut out = self.clone();
        for (k, w) in &o.comps {
            out.add_component(k, w);
        }
        out
    }

    pub fn scale(&self, s: &CycScalar) -> JetVector {
        let mut out = JetVector::zero();
        for (k, w) in &self.comps {
            out.add_component(k, &w.iter().map(|c| c * s).collect::<Vec<_>>());
        }
        out
    }

    pub fn sub(&self, o: &JetVector) -> JetVector {
        let mut out = self.clone();
        for (k, w) in &o.comps {
            out.add_component(k, &w.iter().map(|c| -c).collect::<Vec<_>>());
        }
        out
    }
}

/// The module `L(W) = W (x) A_n(m)` with shift parameters `alpha`, `beta`.
#[derive(Clone, Debug)]
pub struct JetModule {
    pub module: SpModule,
    pub alpha: Vec<CycScalar>,
    pub beta: Vec<CycScalar>,
    pub lattice: GradingLattice,
    pub convention: RankOneConvention,
    field: CyclotomicField,
}

impl JetModule {
    pub fn new(
        module: SpModule,
        alpha: Vec<CycScalar>,
        beta: Vec<CycScalar>,
        lattice: GradingLattice,
        field: CyclotomicField,
    ) -> Result<Self> {
        let n = lattice.n();
        if module.rank() != n || alpha.len() != n || beta.len() != n {
            return Err(Error::Dimension(
                "module rank, alpha, beta and lattice must agree on n".into(),
            ));
        }
        Ok(Self {
            module,
            alpha,
            beta,
            lattice,
            convention: RankOneConvention::ColumnRow,
            field,
        })
    }

    fn check_degree(&self, r: &Degree) -> Result<()> {
        if self.lattice.in_gamma_bar(r) {
            Ok(())
        } else {
            Err(Error::NotInLattice {
                degree: r.to_string(),
                lattice: "Gamma-bar",
            })
        }
    }

    fn check_generator(&self, g: &JetGenerator) -> Result<()> {
        match g {
            JetGenerator::Hamiltonian(r) if r.is_zero() => Err(Error::Precondition("h_0 vanishes; use D(u, 0)".into())),
            JetGenerator::Hamiltonian(r) | JetGenerator::Monomial(r) => self.check_degree(r),
            JetGenerator::Derivation(u) if u.len() != self.lattice.n() => {
                Err(Error::Dimension("derivation vector length".into()))
            }
            JetGenerator::Derivation(_) => Ok(()),
        }
    }

    /// `D(r-bar, r)(w t^k) = ((r-bar, k + beta) w + rho(r^t r-bar) w) t^{k+r}`,
    /// `D(u, 0)(w t^k) = (u, alpha + k) w t^k`, `t^r (w t^k) = w t^{k+r}`.
    pub fn act(&self, g: &JetGenerator, v: &JetVector) -> Result<JetVector> {
        self.check_generator(g)?;
        let f = self.field;
        let mut out = JetVector::zero();
        for (k, w) in v.components() {
            self.check_degree(k)?;
            match g {
                JetGenerator::Hamiltonian(r) => {
                    let rb = r.bar().to_scalars(f);
                    let shift: Vec<CycScalar> = k.to_scalars(f).iter().zip(&self.beta).map(|(a, b)| a + b).collect();
                    let c = crate::lattice::pair_vec(&rb, &shift, f);
                    let m = SpMatrix::rank_one_with(r, f, self.convention);
                    let mw = self.module.rho(m.matrix(), f).apply(w)?;
                    let img: Vec<CycScalar> = w.iter().zip(&mw).map(|(a, b)| &(a * &c) + b).collect();
                    out.add_component(&(k + r), &img);
                }
                JetGenerator::Derivation(u) => {
                    let shift: Vec<CycScalar> = k.to_scalars(f).iter().zip(&self.alpha).map(|(a, b)| a + b).collect();
                    let c = crate::lattice::pair_vec(u, &shift, f);
                    out.add_component(k, &w.iter().map(|a| a * &c).collect::<Vec<_>>());
                }
                JetGenerator::Monomial(r) => out.add_component(&(k + r), w),
            }
        }
        Ok(out)
    }

    /// The bracket of generators in `H_n(m) x| A_n(m)`.
    pub fn generator_bracket(&self, a: &JetGenerator, b: &JetGenerator) -> Result<Vec<(CycScalar, JetGenerator)>> {
        use JetGenerator::*;
        self.check_generator(a)?;
        self.check_generator(b)?;
        let f = self.field;
        let out = match (a, b) {
            (Hamiltonian(r), Hamiltonian(s)) => {
                let rs = r + s;
                if rs.is_zero() {
                    Vec::new()
                } else {
                    vec![(f.int(r.sympl(s)?), Hamiltonian(rs))]
                }
            }
            (Derivation(u), Hamiltonian(r)) => vec![(pair(u, r, f), Hamiltonian(r.clone()))],
            (Derivation(u), Monomial(s)) => vec![(pair(u, s, f), Monomial(s.clone()))],
            (Hamiltonian(r), Monomial(s)) => vec![(f.int(r.sympl(s)?), Monomial(r + s))],
            (Hamiltonian(_), Derivation(_)) | (Monomial(_), Derivation(_)) | (Monomial(_), Hamiltonian(_)) => self
                .generator_bracket(b, a)?
                .into_iter()
                .map(|(c, g)| (-c, g))
                .collect(),
            (Derivation(_), Derivation(_)) | (Monomial(_), Monomial(_)) => Vec::new(),
        };
        Ok(out.into_iter().filter(|(c, _)| !c.is_zero()).collect())
    }

    /// `[a, b].v - (a.(b.v) - b.(a.v))`.
    pub fn axiom_residual(&self, a: &JetGenerator, b: &JetGenerator, v: &JetVector) -> Result<JetVector> {
        let mut lhs = JetVector::zero();
        for (c, g) in self.generator_bracket(a, b)? {
            lhs = lhs.add(&self.act(&g, v)?.scale(&c));
        }
        let ab = self.act(a, &self.act(b, v)?)?;
        let ba = self.act(b, &self.act(a, v)?)?;
        Ok(lhs.sub(&ab.sub(&ba)))
    }
}

/// `phi(X (x) t^r) = (a_S^r X)_{S in I}`, `I = [l]^n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct EvaluationMap {
    points: Vec<Vec<CycScalar>>,
    index: Vec<Vec<usize>>,
}

impl EvaluationMap {
    /// `points[i]` holds `a_{i,1}, ..., a_{i,l}`.
    pub fn new(lattice: &GradingLattice, points: Vec<Vec<CycScalar>>) -> Result<Self> {
        let n = lattice.n();
        if points.len() != n {
            return Err(Error::Dimension(format!("{} point tuples for n = {n}", points.len())));
        }
        let l = points[0].len();
        if l == 0 || points.iter().any(|p| p.len() != l) {
            return Err(Error::Dimension(
                "every slot needs the same positive number of points".into(),
            ));
        }
        for (i, slot) in points.iter().enumerate() {
            let m = lattice.orders()[i] as i64;
            if slot.iter().any(CycScalar::is_zero) {
                return Err(Error::Precondition(format!(
                    "evaluation point in slot {} is zero",
                    i + 1
                )));
            }
            let powers: Vec<CycScalar> = slot.iter().map(|a| a.pow(m)).collect::<Result<_>>()?;
            for (j, t) in (0..l).tuple_combinations() {
                if powers[j] == powers[t] {
                    return Err(Error::Precondition(format!(
                        "points {} and {} of slot {} have equal {m}-th powers",
                        j + 1,
                        t + 1,
                        i + 1
                    )));
                }
            }
        }
        let index = (0..n).map(|_| 0..l).multi_cartesian_product().collect();
        Ok(Self { points, index })
    }

    pub fn index_set(&self) -> &[Vec<usize>] {
        &self.index
    }

    /// `a_S^r = prod_i a_{i,S_i}^{r_i}`.
    pub fn monomial(&self, s: &[usize], r: &Degree) -> Result<CycScalar> {
        let mut acc = self.points[0][0].field().one();
        for (i, (&j, &ri)) in s.iter().zip(&r.0).enumerate() {
            acc = &acc * &self.points[i][j].pow(ri)?;
        }
        Ok(acc)
    }

    pub fn apply_loop(&self, x: &GElem, r: &Degree) -> Result<Vec<GElem>> {
        self.index.iter().map(|s| Ok(x.scale(&self.monomial(s, r)?))).collect()
    }

    /// Image of the loop part of `x`; central terms are dropped and
    /// derivation terms are rejected.
    pub fn apply(&self, x: &TauElement) -> Result<Vec<GElem>> {
        if !x.hamiltonians().is_empty() || x.deriv0().iter().any(|c| !c.is_zero()) {
            return Err(Error::Precondition(
                "the evaluation map is defined on the multiloop part".into(),
            ));
        }
        let mut out = vec![GElem::zero(); self.index.len()];
        for (r, g) in x.loops() {
            for (acc, img) in out.iter_mut().zip(self.apply_loop(g, r)?) {
                *acc = acc.add(&img);
            }
        }
        Ok(out)
    }

    /// Componentwise bracket in `g^I`.
    pub fn bracket(lie: &SimpleLieAlgebra, a: &[GElem], b: &[GElem]) -> Vec<GElem> {
        a.iter().zip(b).map(|(x, y)| lie.bracket(x, y)).collect()
    }

    /// `phi([x, y]) - [phi(x), phi(y)]` for multiloop elements `x`, `y`.
    pub fn homomorphism_residual(&self, alg: &TauAlgebra, x: &TauElement, y: &TauElement) -> Result<Vec<GElem>> {
        let lhs = self.apply(&alg.bracket(x, y))?;
        let rhs = Self::bracket(alg.lie(), &self.apply(x)?, &self.apply(y)?);
        Ok(lhs.iter().zip(&rhs).map(|(a, b)| a.sub(b)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> CyclotomicField {
        CyclotomicField::new(1).unwrap()
    }

    #[test]
    fn rank_one_examples() {
        let f = q();
        let m = SpMatrix::rank_one(&Degree(vec![1, 0]), f);
        assert_eq!(
            m.matrix(),
            &Mat::from_rows(vec![vec![f.zero(), f.int(-1)], vec![f.zero(), f.zero()]]).unwrap()
        );
        assert!(SpMatrix::is_symplectic(m.matrix(), f));
        let m2 = SpMatrix::rank_one(&Degree(vec![0, 1]), f);
        assert_eq!(
            m2.matrix(),
            &Mat::from_rows(vec![vec![f.zero(), f.zero()], vec![f.one(), f.zero()]]).unwrap()
        );
        assert!(SpMatrix::rank_one(&Degree(vec![0, 0]), f).matrix().is_zero());
    }

    #[test]
    fn hprime_examples() {
        let f = q();
        let l = GradingLattice::new(vec![1, 1]).unwrap();
        let nat = HPrimeAction::new(SpModule::Natural { n: 2 }, vec![f.zero(); 2], l.clone(), f).unwrap();
        assert_eq!(
            nat.act(&Degree(vec![1, 0]), &[f.zero(), f.one()]).unwrap(),
            vec![f.int(-1), f.zero()]
        );
        let triv = HPrimeAction::new(SpModule::Trivial { n: 2 }, vec![f.int(2), f.int(5)], l, f).unwrap();
        // (r-bar, zeta) = ((0,-1), (2,5)) = -5.
        assert_eq!(triv.act(&Degree(vec![1, 0]), &[f.one()]).unwrap(), vec![f.int(-5)]);
        assert!(nat
            .axiom_residual(&Degree(vec![1, 2]), &Degree(vec![-3, 1]))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn transposed_convention_breaks_the_bracket() {
        let f = q();
        let l = GradingLattice::new(vec![1, 1]).unwrap();
        let nat = HPrimeAction::new(SpModule::Natural { n: 2 }, vec![f.zero(); 2], l, f)
            .unwrap()
            .with_convention(RankOneConvention::RowColumn);
        assert!(!nat
            .axiom_residual(&Degree(vec![1, 0]), &Degree(vec![0, 1]))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn jet_trivial_examples() {
        let f = q();
        let l = GradingLattice::new(vec![1, 1]).unwrap();
        let jm = JetModule::new(SpModule::Trivial { n: 2 }, vec![f.zero(); 2], vec![f.zero(); 2], l, f).unwrap();
        let v = JetVector::single(Degree(vec![2, 1]), vec![f.one()]);
        assert_eq!(jm.act(&JetGenerator::Monomial(Degree(vec![0, 0])), &v).unwrap(), v);
        let r = Degree(vec![1, 0]);
        // (r-bar, k) = ((0,-1), (2,1)) = -1.
        let got = jm.act(&JetGenerator::Hamiltonian(r), &v).unwrap();
        assert_eq!(got, JetVector::single(Degree(vec![3, 1]), vec![f.int(-1)]));
    }

    #[test]
    fn evaluation_constraint() {
        let f = CyclotomicField::new(2).unwrap();
        let l = GradingLattice::new(vec![2, 1]).unwrap();
        let bad = vec![vec![f.one(), f.int(-1)], vec![f.one(), f.int(2)]];
        assert!(EvaluationMap::new(&l, bad).is_err());
        let good = vec![vec![f.one(), f.int(2)], vec![f.one(), f.int(3)]];
        let ev = EvaluationMap::new(&l, good).unwrap();
        assert_eq!(ev.index_set().len(), 4);
        assert_eq!(ev.index_set()[1], vec![0, 1]);
        assert_eq!(ev.monomial(&[1, 1], &Degree(vec![2, -1])).unwrap(), f.ratio(4, 3));
    }
}
