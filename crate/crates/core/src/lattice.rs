//! The degree lattice `Z^n` (`n = 2k`) and its sublattices.
//!
//! Slots are 1-based in the mathematical description and 0-based here: the
//! distinguished slots `k` and `2k` live at indices `k - 1` and `2k - 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CycScalar, CyclotomicField};

/// A degree vector `r = (r_1, ..., r_n)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Degree(pub Vec<i64>);

impl Degree {
    pub fn zero(n: usize) -> Self {
        Degree(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Degree(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// `(s_{k+1}, ..., s_{2k}, -s_1, ..., -s_k)`.
    pub fn bar(&self) -> Degree {
        let k = self.0.len() / 2;
        let mut out = Vec::with_capacity(self.0.len());
        out.extend_from_slice(&self.0[k..]);
        out.extend(self.0[..k].iter().map(|x| -x));
        Degree(out)
    }

    pub fn scaled(&self, c: i64) -> Degree {
        Degree(self.0.iter().map(|x| x * c).collect())
    }

    pub fn dot(&self, other: &Degree) -> Result<i64> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "pairing vectors of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    /// The symplectic form `(r bar, s)`.
    pub fn sympl(&self, other: &Degree) -> Result<i64> {
        self.bar().dot(other)
    }

    pub fn to_scalars(&self, field: CyclotomicField) -> Vec<CycScalar> {
        self.0.iter().map(|&x| field.int(x)).collect()
    }
}

impl std::ops::Add for &Degree {
    type Output = Degree;
    fn add(self, rhs: &Degree) -> Degree {
        assert_eq!(self.len(), rhs.len(), "degree length mismatch");
        Degree(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Sub for &Degree {
    type Output = Degree;
    fn sub(self, rhs: &Degree) -> Degree {
        assert_eq!(self.len(), rhs.len(), "degree length mismatch");
        Degree(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl std::ops::Neg for &Degree {
    type Output = Degree;
    fn neg(self) -> Degree {
        Degree(self.0.iter().map(|x| -x).collect())
    }
}

impl From<Vec<i64>> for Degree {
    fn from(v: Vec<i64>) -> Self {
        Degree(v)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Bilinear pairing of a field vector with an integer vector.
pub fn pair(u: &[CycScalar], r: &Degree, field: CyclotomicField) -> CycScalar {
    let mut acc = field.zero();
    for (x, &y) in u.iter().zip(&r.0) {
        if y != 0 && !x.is_zero() {
            acc += &(x * &field.int(y));
        }
    }
    acc
}

/// Bilinear pairing of two field vectors.
pub fn pair_vec(u: &[CycScalar], v: &[CycScalar], field: CyclotomicField) -> CycScalar {
    let mut acc = field.zero();
    for (x, y) in u.iter().zip(v) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

/// Which sublattice a membership test refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sublattice {
    /// `m_1 Z + ... + m_n Z`, vectors of length `n`.
    GammaBar,
    /// The `n - 2` slots other than `k, 2k`, vectors of length `n - 2`.
    Gamma,
    /// `m_k Z + m_{2k} Z`, vectors of length 2.
    Gamma0,
}

/// `Z^n` with automorphism orders `m`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradingLattice {
    m: Vec<u32>,
}

impl GradingLattice {
    pub fn new(m: Vec<u32>) -> Result<Self> {
        if m.is_empty() || !m.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "the number of variables must be a positive even integer, got {}",
                m.len()
            )));
        }
        if m.contains(&0) {
            return Err(Error::Config("automorphism orders must be >= 1".into()));
        }
        Ok(Self { m })
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn k(&self) -> usize {
        self.m.len() / 2
    }

    pub fn orders(&self) -> &[u32] {
        &self.m
    }

    /// 0-based indices of the distinguished slots `k` and `2k`.
    pub fn special_slots(&self) -> (usize, usize) {
        (self.k() - 1, self.n() - 1)
    }

    /// The orders `m'` on the `n - 2` ordinary slots.
    pub fn reduced_orders(&self) -> Vec<u32> {
        let (a, b) = self.special_slots();
        self.m
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != a && i != b)
            .map(|(_, &x)| x)
            .collect()
    }

    fn check_len(&self, r: &Degree, len: usize) -> Result<()> {
        if r.len() == len {
            Ok(())
        } else {
            Err(Error::Dimension(format!("expected length {len}, got {}", r.len())))
        }
    }

    pub fn contains(&self, r: &Degree, which: Sublattice) -> Result<bool> {
        let orders: Vec<u32> = match which {
            Sublattice::GammaBar => self.m.clone(),
            Sublattice::Gamma => self.reduced_orders(),
            Sublattice::Gamma0 => {
                let (a, b) = self.special_slots();
                vec![self.m[a], self.m[b]]
            }
        };
        self.check_len(r, orders.len())?;
        Ok(r.0.iter().zip(&orders).all(|(&x, &m)| x.rem_euclid(m as i64) == 0))
    }

    pub fn in_gamma_bar(&self, r: &Degree) -> bool {
        r.len() == self.n() && r.0.iter().zip(&self.m).all(|(&x, &m)| x.rem_euclid(m as i64) == 0)
    }

    /// Least non-negative representative of `r` in `Z^(n-2) / Gamma`.
    pub fn coset(&self, r: &Degree) -> Result<Degree> {
        let orders = self.reduced_orders();
        self.check_len(r, orders.len())?;
        Ok(Degree(
            r.0.iter().zip(&orders).map(|(&x, &m)| x.rem_euclid(m as i64)).collect(),
        ))
    }

    /// Residue class of `r` in `Z^n / Gamma-bar`, componentwise in `[0, m_i)`.
    pub fn residue(&self, r: &Degree) -> Degree {
        Degree(r.0.iter().zip(&self.m).map(|(&x, &m)| x.rem_euclid(m as i64)).collect())
    }

    /// Every residue class, in lexicographic order.
    pub fn residues(&self) -> Vec<Degree> {
        let mut out = vec![Vec::new()];
        for &m in &self.m {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<i64>| {
                    (0..m as i64).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(Degree).collect()
    }

    /// The eigenvalue `zeta_i^{r_i}` of the `i`-th automorphism (0-based `i`).
    pub fn zeta_power(&self, field: CyclotomicField, i: usize, r_i: i64) -> Result<CycScalar> {
        let m = *self
            .m
            .get(i)
            .ok_or_else(|| Error::Dimension(format!("automorphism index {i} out of range")))?;
        field.root_of_unity_power(m, r_i)
    }

    /// Drops the distinguished slots: `Z^n -> Z^(n-2)`.
    pub fn project_reduced(&self, r: &Degree) -> Degree {
        let (a, b) = self.special_slots();
        Degree(
            r.0.iter()
                .enumerate()
                .filter(|&(i, _)| i != a && i != b)
                .map(|(_, &x)| x)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bar_examples() {
        assert_eq!(Degree(vec![1, 0]).bar(), Degree(vec![0, -1]));
        assert_eq!(Degree(vec![0, 1]).bar(), Degree(vec![1, 0]));
        assert_eq!(Degree(vec![1, 2, 3, 4]).bar(), Degree(vec![3, 4, -1, -2]));
    }

    #[test]
    fn sympl_example() {
        assert_eq!(Degree(vec![1, 0]).sympl(&Degree(vec![0, 1])).unwrap(), -1);
        assert!(Degree(vec![1, 0]).dot(&Degree(vec![1])).is_err());
    }

    #[test]
    fn membership_and_cosets() {
        let l = GradingLattice::new(vec![2, 1, 3, 1]).unwrap();
        assert!(l.contains(&Degree(vec![2, 5, 3, 7]), Sublattice::GammaBar).unwrap());
        assert!(!l.contains(&Degree(vec![1, 5, 3, 7]), Sublattice::GammaBar).unwrap());
        // k = 2: ordinary slots are 1 and 3 with orders (2, 3).
        assert_eq!(l.reduced_orders(), vec![2, 3]);
        assert!(l.contains(&Degree(vec![4, 6]), Sublattice::Gamma).unwrap());
        assert!(l.contains(&Degree(vec![5, 9]), Sublattice::Gamma0).unwrap());
        assert_eq!(l.coset(&Degree(vec![0, 0])).unwrap(), Degree(vec![0, 0]));
        assert_eq!(l.coset(&Degree(vec![5, 7])).unwrap(), Degree(vec![1, 1]));
        assert_eq!(l.coset(&Degree(vec![-1, -1])).unwrap(), Degree(vec![1, 2]));
        assert!(GradingLattice::new(vec![1, 1, 1]).is_err());
    }

    #[test]
    fn zeta_powers() {
        let l = GradingLattice::new(vec![1, 2, 4, 1]).unwrap();
        let f = CyclotomicField::for_orders(l.orders()).unwrap();
        assert!(l.zeta_power(f, 0, 5).unwrap().is_one());
        assert_eq!(l.zeta_power(f, 1, 1).unwrap(), f.int(-1));
        assert_eq!(l.zeta_power(f, 2, 2).unwrap(), f.int(-1));
        for (i, &m) in l.orders().iter().enumerate() {
            assert!(l.zeta_power(f, i, m as i64).unwrap().is_one());
            for r in 1..m as i64 {
                assert!(!l.zeta_power(f, i, r).unwrap().is_one());
            }
        }
    }

    fn degree(n: usize) -> impl Strategy<Value = Degree> {
        prop::collection::vec(-20i64..20, n).prop_map(Degree)
    }

    proptest! {
        #[test]
        fn bar_is_linear_and_squares_to_minus_one(r in degree(4), s in degree(4)) {
            prop_assert_eq!((&r + &s).bar(), &r.bar() + &s.bar());
            prop_assert_eq!(r.bar().bar(), -&r);
        }

        #[test]
        fn sympl_is_alternating(r in degree(6), s in degree(6)) {
            prop_assert_eq!(r.sympl(&r).unwrap(), 0);
            prop_assert_eq!(r.dot(&r.bar()).unwrap(), 0);
            prop_assert_eq!(r.sympl(&s).unwrap() + s.sympl(&r).unwrap(), 0);
        }

        #[test]
        fn sympl_is_nondegenerate(r in degree(4)) {
            prop_assume!(!r.is_zero());
            let witness = (0..4).any(|j| r.sympl(&Degree::unit(4, j)).unwrap() != 0);
            prop_assert!(witness);
        }
    }
}
