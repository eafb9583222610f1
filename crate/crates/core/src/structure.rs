//! Weights of the Cartan `H = h(0) + sum C K_i + sum C d_i`, root data,
//! coroots, reflections and translations, the five-part triangular
//! decomposition, and the `GL(n, Z)` twist matrices.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Degree, GradingLattice};
use crate::linalg::{in_integer_span, IntMatrix};
use crate::scalar::{CycScalar, CyclotomicField, Rational};
use crate::simple_lie::{GElem, RootVec};
use crate::tau::{TauAlgebra, TauElement};

/// A linear functional on `H`, stored as its values on the ordered basis
/// (Cartan basis of `h(0)`, then `K_1..K_n`, then `d_1..d_n`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Weight {
    pub h: Vec<CycScalar>,
    pub k: Vec<CycScalar>,
    pub d: Vec<CycScalar>,
}

impl Weight {
    pub fn zero(field: CyclotomicField, cartan_dim: usize, n: usize) -> Self {
        Self {
            h: vec![field.zero(); cartan_dim],
            k: vec![field.zero(); n],
            d: vec![field.zero(); n],
        }
    }

    /// `delta_i` (0-based `i`): `delta_i(d_j) = delta_ij`, zero elsewhere.
    pub fn delta(field: CyclotomicField, cartan_dim: usize, n: usize, i: usize) -> Self {
        let mut w = Self::zero(field, cartan_dim, n);
        w.d[i] = field.one();
        w
    }

    /// `w_i`: `w_i(K_j) = delta_ij`, zero elsewhere.
    pub fn fundamental_central(field: CyclotomicField, cartan_dim: usize, n: usize, i: usize) -> Self {
        let mut w = Self::zero(field, cartan_dim, n);
        w.k[i] = field.one();
        w
    }

    pub fn values(&self) -> impl Iterator<Item = &CycScalar> {
        self.h.iter().chain(&self.k).chain(&self.d)
    }

    fn field(&self) -> CyclotomicField {
        self.k.first().expect("n >= 2").field()
    }

    pub fn eval(&self, c: &CartanElement) -> CycScalar {
        let mut acc = self.field().zero();
        for (a, b) in self.values().zip(c.values()) {
            acc += &(a * b);
        }
        acc
    }

    pub fn add(&self, o: &Weight) -> Weight {
        let z = |a: &[CycScalar], b: &[CycScalar]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Weight {
            h: z(&self.h, &o.h),
            k: z(&self.k, &o.k),
            d: z(&self.d, &o.d),
        }
    }

    pub fn scale(&self, s: &CycScalar) -> Weight {
        let z = |a: &[CycScalar]| a.iter().map(|x| x * s).collect();
        Weight {
            h: z(&self.h),
            k: z(&self.k),
            d: z(&self.d),
        }
    }

    pub fn sub(&self, o: &Weight) -> Weight {
        self.add(&o.scale(&-self.field().one()))
    }
}

/// An element of `H` in coordinates (Cartan basis, `K_i`, `d_i`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CartanElement {
    pub h: Vec<CycScalar>,
    pub k: Vec<CycScalar>,
    pub d: Vec<CycScalar>,
}

impl CartanElement {
    pub fn values(&self) -> impl Iterator<Item = &CycScalar> {
        self.h.iter().chain(&self.k).chain(&self.d)
    }

    pub fn to_tau(&self, alg: &TauAlgebra) -> TauElement {
        let mut g = GElem::zero();
        for (c, h) in self.h.iter().zip(alg.lie().cartan()) {
            g.add_scaled(h, c);
        }
        let mut out = alg.zero();
        out.add_loop(&Degree::zero(alg.n()), &g);
        out.add_central0(&self.k);
        out.add_deriv0(&self.d);
        out
    }
}

/// The pair `(alpha, r)` indexing the root space `tau_{alpha + delta_r}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RootDatum {
    pub alpha: RootVec,
    pub degree: Degree,
}

impl RootDatum {
    pub fn is_real(&self) -> bool {
        !self.alpha.is_zero()
    }

    /// `alpha + delta_r` as a weight (zero on every `K_i`).
    pub fn to_weight(&self, field: CyclotomicField) -> Weight {
        Weight {
            h: self.alpha.0.iter().map(|q| field.from_rational(q.clone())).collect(),
            k: vec![field.zero(); self.degree.len()],
            d: self.degree.to_scalars(field),
        }
    }
}

impl fmt::Display for RootDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + delta{}", self.alpha, self.degree)
    }
}

/// The root space containing a homogeneous nonzero element.
pub fn root_of(alg: &TauAlgebra, x: &TauElement) -> Result<RootDatum> {
    let degree = x
        .degree()
        .ok_or_else(|| Error::NotHomogeneous(format!("{} has several degrees", alg.pretty(x))))?;
    let zero = RootVec::zero(alg.lie().cartan().len());
    let alpha = match x.loops().get(&degree) {
        None => zero,
        Some(g) => {
            let parts = alg.lie().weight_components(g);
            let mut keys = parts.into_keys();
            let a = keys.next().expect("nonzero loop part");
            if keys.next().is_some() {
                return Err(Error::NotHomogeneous(format!(
                    "loop part of {} has several h(0)-weights",
                    alg.pretty(x)
                )));
            }
            let others = x.central().contains_key(&degree)
                || x.hamiltonians().contains_key(&degree)
                || x.central0().iter().any(|c| !c.is_zero())
                || x.deriv0().iter().any(|c| !c.is_zero());
            if !a.is_zero() && others {
                return Err(Error::NotHomogeneous(format!(
                    "{} mixes a real root vector with Cartan-type terms",
                    alg.pretty(x)
                )));
            }
            a
        }
    };
    Ok(RootDatum { alpha, degree })
}

/// Splits an element into root-space components.
pub fn homogeneous_components(alg: &TauAlgebra, x: &TauElement) -> Vec<(RootDatum, TauElement)> {
    let cartan_dim = alg.lie().cartan().len();
    let mut out = Vec::new();
    for r in x.degrees() {
        let comp = x.component(&r);
        let mut rest = comp.clone();
        if let Some(g) = comp.loops().get(&r) {
            for (alpha, part) in alg.lie().weight_components(g) {
                if alpha.is_zero() {
                    continue;
                }
                let mut e = alg.zero();
                e.add_loop(&r, &part);
                rest = rest.sub(&e);
                out.push((
                    RootDatum {
                        alpha,
                        degree: r.clone(),
                    },
                    e,
                ));
            }
        }
        if !rest.is_zero() {
            out.push((
                RootDatum {
                    alpha: RootVec::zero(cartan_dim),
                    degree: r,
                },
                rest,
            ));
        }
    }
    out
}

/// `beta^vee = alpha^vee + (2/(alpha|alpha)) sum r_i K_i`.
pub fn coroot(alg: &TauAlgebra, beta: &RootDatum) -> Result<CartanElement> {
    if !beta.is_real() {
        return Err(Error::Precondition(format!("{beta} is isotropic and has no coroot")));
    }
    let rs = alg.lie().root_system();
    let field = alg.field();
    let len = rs
        .inner(&beta.alpha, &beta.alpha)
        .ok_or_else(|| Error::Precondition("form on h(0) is unavailable".into()))?;
    if len.is_zero() {
        return Err(Error::Precondition(format!("{} has zero length", beta.alpha)));
    }
    let h = rs.coroot(&beta.alpha).expect("nonzero length");
    let scale = Rational::from_integer(2.into()) / len;
    Ok(CartanElement {
        h: h.into_iter().map(|q| field.from_rational(q)).collect(),
        k: beta
            .degree
            .0
            .iter()
            .map(|&r| field.from_rational(&scale * Rational::from_integer(r.into())))
            .collect(),
        d: vec![field.zero(); alg.n()],
    })
}

/// `r_gamma(lambda) = lambda - lambda(gamma^vee) gamma`.
pub fn reflect(alg: &TauAlgebra, gamma: &RootDatum, lambda: &Weight) -> Result<Weight> {
    let cv = coroot(alg, gamma)?;
    let c = lambda.eval(&cv);
    Ok(lambda.sub(&gamma.to_weight(alg.field()).scale(&c)))
}

/// Long coroots of the fixed-point root system, in Cartan coordinates.
pub fn long_coroots(alg: &TauAlgebra) -> Vec<Vec<Rational>> {
    let rs = alg.lie().root_system();
    let fixed = alg.eigen().fixed_roots();
    let max = fixed.iter().filter_map(|a| rs.inner(a, a)).max();
    fixed
        .iter()
        .filter(|a| rs.inner(a, a) == max)
        .filter_map(|a| rs.coroot(a))
        .collect()
}

/// `t_{i,h}(lambda) = lambda - lambda(h) delta_i` (0-based `i`), for `h` in
/// the integral span of the long coroots of `g(0)`.
pub fn translate(alg: &TauAlgebra, i: usize, h: &[Rational], lambda: &Weight) -> Result<Weight> {
    let n = alg.n();
    let (a, b) = alg.lattice().special_slots();
    if i >= n {
        return Err(Error::Dimension(format!("slot {} out of range", i + 1)));
    }
    if i == a || i == b {
        return Err(Error::Precondition(format!(
            "translations are not defined in the distinguished slot {}",
            i + 1
        )));
    }
    let cartan_dim = alg.lie().cartan().len();
    if h.len() != cartan_dim {
        return Err(Error::Dimension("Cartan coordinate length".into()));
    }
    if !in_integer_span(&long_coroots(alg), h) {
        return Err(Error::Precondition(
            "h is not in the integral span of the long coroots of g(0)".into(),
        ));
    }
    let field = alg.field();
    let hc = CartanElement {
        h: h.iter().map(|q| field.from_rational(q.clone())).collect(),
        k: vec![field.zero(); n],
        d: vec![field.zero(); n],
    };
    let c = lambda.eval(&hc);
    Ok(lambda.sub(&Weight::delta(field, cartan_dim, n, i).scale(&c)))
}

/// The five parts of the triangular decomposition.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum TriangularClass {
    #[serde(rename = "++")]
    PlusPlus,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "--")]
    MinusMinus,
}

impl fmt::Display for TriangularClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriangularClass::PlusPlus => "++",
            TriangularClass::Plus => "+",
            TriangularClass::Zero => "0",
            TriangularClass::Minus => "-",
            TriangularClass::MinusMinus => "--",
        })
    }
}

/// Classifies a root datum by the sign of `r_k - r_2k`, then of `r_k`, then
/// of `alpha` against the simple system.
pub fn classify_root(alg: &TauAlgebra, root: &RootDatum) -> Result<TriangularClass> {
    let (a, b) = alg.lattice().special_slots();
    let (rk, r2k) = (root.degree.0[a], root.degree.0[b]);
    Ok(match rk.cmp(&r2k) {
        Ordering::Greater => TriangularClass::PlusPlus,
        Ordering::Less => TriangularClass::MinusMinus,
        Ordering::Equal => match rk.cmp(&0) {
            Ordering::Greater => TriangularClass::Plus,
            Ordering::Less => TriangularClass::Minus,
            Ordering::Equal => match alg.lie().root_system().compare_to_zero(&root.alpha) {
                Some(Ordering::Greater) => TriangularClass::Plus,
                Some(Ordering::Less) => TriangularClass::Minus,
                Some(Ordering::Equal) => TriangularClass::Zero,
                None => {
                    return Err(Error::Precondition(format!(
                        "{} is not comparable to zero in the root lattice",
                        root.alpha
                    )))
                }
            },
        },
    })
}

pub fn triangular_class(alg: &TauAlgebra, x: &TauElement) -> Result<TriangularClass> {
    classify_root(alg, &root_of(alg, x)?)
}

/// Whether every root-space component of `x` lies in `class`.
pub fn lies_in_class(alg: &TauAlgebra, x: &TauElement, class: TriangularClass) -> Result<bool> {
    for (root, _) in homogeneous_components(alg, x) {
        if classify_root(alg, &root)? != class {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `B in GL(n, Z)` together with `F = (B^T)^-1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwistMatrix {
    b: IntMatrix,
    f: IntMatrix,
}

impl TwistMatrix {
    pub fn new(b: IntMatrix) -> Result<Self> {
        let f = b.unimodular_inverse()?.transpose();
        Ok(Self { b, f })
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            b: IntMatrix::identity(n),
            f: IntMatrix::identity(n),
        }
    }

    /// `B_{n,n}(a)`: the identity except for the block `(a, 1; a-1, 1)` in
    /// slots `k, 2k`; requires `2a - 1 > 0`.
    pub fn b_nn(n: usize, a: i64) -> Result<Self> {
        if 2 * a - 1 <= 0 {
            return Err(Error::Precondition(format!("B_(n,n) needs 2a - 1 > 0, got a = {a}")));
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::Dimension("n must be even and positive".into()));
        }
        let (k, k2) = (n / 2 - 1, n - 1);
        let mut b = IntMatrix::identity(n);
        b.set(k, k, a);
        b.set(k, k2, 1);
        b.set(k2, k, a - 1);
        b.set(k2, k2, 1);
        Self::new(b)
    }

    /// A random product of elementary matrices `I + c m_i E_ij`; every row
    /// `i` stays congruent to `e_i` modulo `m_i`, so eigenspaces are preserved.
    pub fn random_compatible<R: Rng>(rng: &mut R, lattice: &GradingLattice, steps: usize) -> Self {
        let n = lattice.n();
        let mut b = IntMatrix::identity(n);
        for _ in 0..steps {
            let i = rng.gen_range(0..n);
            let j = loop {
                let j = rng.gen_range(0..n);
                if j != i {
                    break j;
                }
            };
            let c = [-1i64, 1, 2][rng.gen_range(0..3)] * lattice.orders()[i] as i64;
            let mut e = IntMatrix::identity(n);
            e.set(i, j, c);
            b = e.mul(&b);
        }
        Self::new(b).expect("elementary products are unimodular")
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.b
    }

    pub fn contragredient(&self) -> &IntMatrix {
        &self.f
    }

    pub fn compose(&self, inner: &TwistMatrix) -> TwistMatrix {
        Self::new(self.b.mul(&inner.b)).expect("products of unimodular matrices are unimodular")
    }

    /// Whether `B` maps every eigenspace class to itself: row `i` is `e_i` mod `m_i`.
    pub fn preserves_classes(&self, lattice: &GradingLattice) -> bool {
        let n = self.b.size();
        (0..n).all(|i| {
            let m = lattice.orders()[i] as i64;
            (0..n).all(|j| (self.b.get(i, j) - i64::from(i == j)).rem_euclid(m) == 0)
        })
    }

    /// Applies the automorphism; the image lives in `alg.twisted(B)`.
    pub fn apply(&self, alg: &TauAlgebra, x: &TauElement) -> Result<(TauAlgebra, TauElement)> {
        Ok((alg.twisted(&self.b)?, alg.twist(&self.b, x)?))
    }
}

impl fmt::Display for TwistMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simple_lie::builtin::sl2;
    use crate::simple_lie::AutomorphismSet;

    fn untwisted() -> TauAlgebra {
        let f = CyclotomicField::new(1).unwrap();
        let g = sl2(f).unwrap();
        let auts = AutomorphismSet::identity(&g, 2);
        TauAlgebra::new(g, auts, GradingLattice::new(vec![1, 1]).unwrap()).unwrap()
    }

    fn q(x: i64) -> Rational {
        Rational::from_integer(x.into())
    }

    #[test]
    fn root_of_examples() {
        let t = untwisted();
        let r = Degree(vec![1, 2]);
        let e = t.loop_elem(&t.lie().basis(0), &r).unwrap();
        assert_eq!(
            root_of(&t, &e).unwrap(),
            RootDatum {
                alpha: RootVec(vec![q(2)]),
                degree: r.clone()
            }
        );
        let h = t.hamiltonian(&r).unwrap();
        assert_eq!(root_of(&t, &h).unwrap().alpha, RootVec(vec![q(0)]));
        let d1 = t.d(0).unwrap();
        assert_eq!(root_of(&t, &d1).unwrap().degree, Degree(vec![0, 0]));
        assert!(root_of(&t, &e.add(&h)).is_err());
    }

    #[test]
    fn coroot_and_reflection() {
        let t = untwisted();
        let f = t.field();
        let beta = RootDatum {
            alpha: RootVec(vec![q(2)]),
            degree: Degree(vec![1, -2]),
        };
        let cv = coroot(&t, &beta).unwrap();
        assert_eq!(cv.h, vec![f.one()]);
        assert_eq!(cv.k, vec![f.int(1), f.int(-2)]);
        let lambda = Weight {
            h: vec![f.int(3)],
            k: vec![f.int(1), f.int(1)],
            d: vec![f.int(5), f.int(-1)],
        };
        let once = reflect(&t, &beta, &lambda).unwrap();
        assert_ne!(once, lambda);
        assert_eq!(reflect(&t, &beta, &once).unwrap(), lambda);
        // lambda(beta^vee) = 3 + 1 - 4 = 0 fixes lambda.
        let fixed = Weight {
            h: vec![f.int(3)],
            k: vec![f.int(1), f.int(2)],
            d: vec![f.zero(), f.zero()],
        };
        assert_eq!(reflect(&t, &beta, &fixed).unwrap(), fixed);
    }

    #[test]
    fn triangular_examples() {
        let t = untwisted();
        let e0 = t.loop_elem(&t.lie().basis(0), &Degree(vec![0, 0])).unwrap();
        assert_eq!(triangular_class(&t, &e0).unwrap(), TriangularClass::Plus);
        let x = t.loop_elem(&t.lie().basis(1), &Degree(vec![1, 0])).unwrap();
        assert_eq!(triangular_class(&t, &x).unwrap(), TriangularClass::PlusPlus);
        let h = t.hamiltonian(&Degree(vec![1, 1])).unwrap();
        assert_eq!(triangular_class(&t, &h).unwrap(), TriangularClass::Plus);
        assert_eq!(triangular_class(&t, &t.d(1).unwrap()).unwrap(), TriangularClass::Zero);
    }

    #[test]
    fn b_nn_block() {
        let b = TwistMatrix::b_nn(2, 1).unwrap();
        assert_eq!(b.matrix().to_rows(), vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(b.matrix().apply(&[1, 0]), vec![1, 0]);
        assert!(TwistMatrix::b_nn(2, 0).is_err());
        let b2 = TwistMatrix::b_nn(4, 2).unwrap();
        assert_eq!(b2.matrix().determinant(), 1.into());
        assert_eq!(
            b2.matrix().mul(&b2.contragredient().transpose()),
            IntMatrix::identity(4)
        );
    }

    #[test]
    fn translation_iterates() {
        // n = 4 so that slot 1 is an ordinary slot.
        let f = CyclotomicField::new(1).unwrap();
        let g = sl2(f).unwrap();
        let auts = AutomorphismSet::identity(&g, 4);
        let t = TauAlgebra::new(g, auts, GradingLattice::new(vec![1; 4]).unwrap()).unwrap();
        let h0 = vec![q(1)];
        let mu = Weight {
            h: vec![f.int(3)],
            k: vec![f.zero(); 4],
            d: vec![f.zero(); 4],
        };
        let (s_bar, p) = (2, 4);
        let r_mu = 3;
        let mut lam = mu.add(&Weight::delta(f, 1, 4, 0).scale(&f.int(s_bar + p * r_mu)));
        for _ in 0..p {
            lam = translate(&t, 0, &h0, &lam).unwrap();
        }
        assert_eq!(lam, mu.add(&Weight::delta(f, 1, 4, 0).scale(&f.int(s_bar))));
        assert!(translate(&t, 1, &h0, &mu).is_err());
        assert!(translate(&t, 0, &[Rational::new(1.into(), 2.into())], &mu).is_err());
    }
}
