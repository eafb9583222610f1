//! Exact arithmetic in the cyclotomic field `Q(z_N)`.
//!
//! An element is stored as a polynomial in `z = z_N` of degree below `phi(N)`,
//! reduced modulo the `N`-th cyclotomic polynomial, with arbitrary-precision
//! rational coefficients. Zero coefficients are never stored, so structural
//! equality coincides with field equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

fn phi_cache() -> &'static RwLock<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (lowest degree first) of the `n`-th cyclotomic polynomial,
/// from `x^n - 1 = prod_{d | n} Phi_d`. Results are cached process-wide.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = phi_cache().read().expect("phi cache poisoned").get(&n) {
        return p.clone();
    }
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let divisor = cyclotomic_polynomial(d);
            num = exact_monic_division(&num, &divisor);
        }
    }
    let phi = Arc::new(num);
    phi_cache().write().expect("phi cache poisoned").insert(n, phi.clone());
    phi
}

fn exact_monic_division(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "cyclotomic division not exact");
    quot
}

/// Euler's totient, used as the degree of `Q(z_N)` over `Q`.
pub fn totient(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Handle for `Q(z_N)`. Cheap to copy; the defining polynomial lives in a
/// shared cache.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicField {
    order: u32,
}

impl CyclotomicField {
    pub fn new(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("cyclotomic order must be positive".into()));
        }
        cyclotomic_polynomial(order);
        Ok(Self { order })
    }

    /// The field `Q(z_N)` with `N = lcm(orders)`.
    pub fn for_orders(orders: &[u32]) -> Result<Self> {
        let mut n: u32 = 1;
        for &m in orders {
            if m == 0 {
                return Err(Error::Config("automorphism orders must be positive".into()));
            }
            n = num_integer::lcm(n, m);
        }
        Self::new(n)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn degree(&self) -> u32 {
        totient(self.order)
    }

    pub fn zero(&self) -> CycScalar {
        CycScalar {
            order: self.order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> CycScalar {
        self.int(1)
    }

    pub fn int(&self, v: i64) -> CycScalar {
        self.from_rational(Rational::from_integer(BigInt::from(v)))
    }

    pub fn big(&self, v: BigInt) -> CycScalar {
        self.from_rational(Rational::from_integer(v))
    }

    pub fn ratio(&self, p: i64, q: i64) -> CycScalar {
        assert!(q != 0, "zero denominator");
        self.from_rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(&self, r: Rational) -> CycScalar {
        let mut coeffs = BTreeMap::new();
        if !r.is_zero() {
            coeffs.insert(0, r);
        }
        CycScalar {
            order: self.order,
            coeffs,
        }
    }

    /// `z_N^e`, reduced.
    pub fn zeta_pow(&self, e: i64) -> CycScalar {
        let n = self.order as i64;
        let e = e.rem_euclid(n) as usize;
        let mut dense = vec![Rational::zero(); self.order as usize];
        dense[e] = Rational::one();
        CycScalar::from_dense(self.order, dense)
    }

    /// `zeta_m^r` where `zeta_m = z_N^(N/m)` is the primitive `m`-th root of
    /// unity inside this field. Requires `m | N`.
    pub fn root_of_unity_power(&self, m: u32, r: i64) -> Result<CycScalar> {
        if m == 0 || !self.order.is_multiple_of(m) {
            return Err(Error::Config(format!(
                "order {m} does not divide the field order {}",
                self.order
            )));
        }
        let step = (self.order / m) as i64;
        Ok(self.zeta_pow((step * r.rem_euclid(m as i64)) % self.order as i64))
    }

    /// Builds `sum c_e z^e` from arbitrary (possibly unreduced) exponents.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(&self, terms: I) -> CycScalar {
        let n = self.order as i64;
        let mut dense = vec![Rational::zero(); self.order as usize];
        for (e, c) in terms {
            dense[e.rem_euclid(n) as usize] += c;
        }
        CycScalar::from_dense(self.order, dense)
    }
}

/// An element of `Q(z_N)` in canonical sparse form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycScalar {
    order: u32,
    coeffs: BTreeMap<u32, Rational>,
}

impl CycScalar {
    pub fn field(&self) -> CyclotomicField {
        CyclotomicField { order: self.order }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients on `z^e`, `0 <= e < phi(N)`, zero entries omitted.
    pub fn coeffs(&self) -> &BTreeMap<u32, Rational> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(One::is_one)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.keys().all(|&e| e == 0)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.coeffs.get(&0).cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.order,
                right: other.order,
            })
        }
    }

    /// Reduces a dense coefficient vector of length at most `N` (or longer;
    /// exponents are folded modulo `N` first) modulo `Phi_N`.
    fn from_dense(order: u32, mut dense: Vec<Rational>) -> Self {
        let n = order as usize;
        if dense.len() > n {
            let tail = dense.split_off(n);
            for (i, c) in tail.into_iter().enumerate() {
                dense[i % n] += c;
            }
        }
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        if dense.len() > deg {
            for i in (deg..dense.len()).rev() {
                if dense[i].is_zero() {
                    continue;
                }
                let c = std::mem::replace(&mut dense[i], Rational::zero());
                for (j, pj) in phi.iter().enumerate().take(deg) {
                    if !pj.is_zero() {
                        dense[i - deg + j] -= &c * Rational::from_integer(pj.clone());
                    }
                }
            }
            dense.truncate(deg);
        }
        let coeffs = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e as u32, c))
            .collect();
        CycScalar { order, coeffs }
    }

    fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return self.field().zero();
        }
        CycScalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, c * r)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut coeffs = self.coeffs.clone();
        for (&e, c) in &other.coeffs {
            let entry = coeffs.entry(e).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(&e);
            }
        }
        Ok(CycScalar {
            order: self.order,
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(self.field().zero());
        }
        if let Some(r) = self.as_rational() {
            return Ok(other.scale(&r));
        }
        if let Some(r) = other.as_rational() {
            return Ok(self.scale(&r));
        }
        let n = self.order as usize;
        let mut dense = vec![Rational::zero(); n];
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                dense[(i as usize + j as usize) % n] += a * b;
            }
        }
        Ok(Self::from_dense(self.order, dense))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Phi_N`.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(self.field().from_rational(r.recip()));
        }
        let phi: Vec<Rational> = cyclotomic_polynomial(self.order)
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let a = self.to_dense_poly();
        let (g, s) = poly::inverse_mod(&a, &phi);
        // Phi_N is irreducible, so a nonzero residue is coprime to it.
        debug_assert_eq!(g.len(), 1);
        let inv: Vec<Rational> = s.iter().map(|c| c / &g[0]).collect();
        Ok(Self::from_dense(self.order, inv))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.try_mul(&other.invert()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.field().one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }

    fn to_dense_poly(&self) -> Vec<Rational> {
        let len = self.coeffs.keys().next_back().map_or(0, |&e| e as usize + 1);
        let mut v = vec![Rational::zero(); len];
        for (&e, c) in &self.coeffs {
            v[e as usize] = c.clone();
        }
        v
    }
}

/// Which field operation [`arith`] performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked field operation; fails when the operands live in different fields.
pub fn arith(a: &CycScalar, b: &CycScalar, op: ArithOp) -> Result<CycScalar> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

mod poly {
    //! Dense univariate polynomials over Q, lowest degree first.
    use super::Rational;
    use num_traits::Zero;

    pub fn trim(p: &mut Vec<Rational>) {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
    }

    pub fn divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = &b[db];
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![Rational::zero(); r.len() - db];
        for i in (0..q.len()).rev() {
            let c = &r[i + db] / lead;
            if c.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
            q[i] = c;
        }
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(&mut out);
        out
    }

    pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i] -= y;
        }
        trim(&mut out);
        out
    }

    /// Returns `(g, s)` with `s * a = g (mod m)`, `g = gcd(a, m)`.
    pub fn inverse_mod(a: &[Rational], m: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        trim(&mut r0);
        trim(&mut r1);
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (Vec::new(), vec![num_traits::One::one()]);
        while !r1.is_empty() {
            let (q, r) = divmod(&r0, &r1);
            let s2 = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        (r0, s0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&CycScalar> for &CycScalar {
            type Output = CycScalar;
            fn $method(self, rhs: &CycScalar) -> CycScalar {
                self.$checked(rhs).expect("cyclotomic field mismatch")
            }
        }
        impl $tr<CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $method(self, rhs: CycScalar) -> CycScalar {
                (&self).$checked(&rhs).expect("cyclotomic field mismatch")
            }
        }
        impl $tr<&CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $method(self, rhs: &CycScalar) -> CycScalar {
                (&self).$checked(rhs).expect("cyclotomic field mismatch")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl AddAssign<&CycScalar> for CycScalar {
    fn add_assign(&mut self, rhs: &CycScalar) {
        *self = self.try_add(rhs).expect("cyclotomic field mismatch");
    }
}

impl SubAssign<&CycScalar> for CycScalar {
    fn sub_assign(&mut self, rhs: &CycScalar) {
        *self = self.try_sub(rhs).expect("cyclotomic field mismatch");
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        CycScalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        -&self
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (&e, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            match e {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    if e == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials_match_known_values() {
        let as_i64 = |n| -> Vec<i64> { cyclotomic_polynomial(n).iter().map(|c| c.try_into().unwrap()).collect() };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(12), 4);
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let f = CyclotomicField::new(4).unwrap();
        let z = f.zeta_pow(1);
        assert_eq!(&z * &z, f.int(-1));
    }

    #[test]
    fn zeta3_plus_square_is_minus_one() {
        let f = CyclotomicField::new(3).unwrap();
        assert_eq!(f.zeta_pow(1) + f.zeta_pow(2), f.int(-1));
    }

    #[test]
    fn rational_subfield_addition() {
        let f = CyclotomicField::new(5).unwrap();
        assert_eq!(f.ratio(1, 2) + f.ratio(1, 3), f.ratio(5, 6));
    }

    #[test]
    fn inverses() {
        let f = CyclotomicField::new(4).unwrap();
        assert_eq!(f.int(2).invert().unwrap(), f.ratio(1, 2));
        assert_eq!(f.zeta_pow(1).invert().unwrap(), -f.zeta_pow(1));
        assert_eq!(f.zero().invert(), Err(Error::DivisionByZero));
    }

    #[test]
    fn inverse_of_one_plus_zeta3_matches_extended_gcd() {
        // (1 + x) * (-x) = -x - x^2 = 1 (mod x^2 + x + 1), so the inverse is -z.
        let f = CyclotomicField::new(3).unwrap();
        let a = f.one() + f.zeta_pow(1);
        let inv = a.invert().unwrap();
        assert_eq!(inv, -f.zeta_pow(1));
        assert!((&a * &inv).is_one());
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let a = CyclotomicField::new(3).unwrap().one();
        let b = CyclotomicField::new(4).unwrap().one();
        assert_eq!(
            arith(&a, &b, ArithOp::Add),
            Err(Error::FieldMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn canonical_form_has_no_zero_entries() {
        let f = CyclotomicField::new(6).unwrap();
        let x = f.from_terms([(0, q(1, 1)), (3, q(1, 1))]);
        // z^3 = -1 for a primitive sixth root.
        assert!(x.is_zero());
        assert!(x.coeffs().is_empty());
    }

    #[test]
    fn powers_and_display() {
        let f = CyclotomicField::new(8).unwrap();
        let z = f.zeta_pow(1);
        assert!(z.pow(8).unwrap().is_one());
        assert_eq!(z.pow(-1).unwrap(), z.pow(7).unwrap());
        assert_eq!(z.pow(4).unwrap(), f.int(-1));
        let s = f.from_terms([(0, q(-3, 2)), (1, q(1, 1)), (2, q(-2, 1))]);
        assert_eq!(s.to_string(), "-3/2 + z - 2*z^2");
    }
}
