//! Finite-dimensional simple Lie algebras given by structure constants,
//! their invariant forms, root data relative to a Cartan of the fixed-point
//! subalgebra, and eigenspace decompositions under commuting automorphisms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Degree, GradingLattice};
use crate::linalg::Mat;
use crate::scalar::{CycScalar, CyclotomicField, Rational};

/// Sparse element of `g` in coordinates on the structure-table basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GElem(BTreeMap<usize, CycScalar>);

impl GElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: usize, field: CyclotomicField) -> Self {
        GElem(BTreeMap::from([(i, field.one())]))
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, CycScalar)>>(terms: I) -> Self {
        let mut out = GElem::zero();
        for (i, c) in terms {
            out.add_term(i, &c);
        }
        out
    }

    pub fn from_dense(v: &[CycScalar]) -> Self {
        GElem(
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        )
    }

    pub fn to_dense(&self, field: CyclotomicField, dim: usize) -> Vec<CycScalar> {
        let mut v = vec![field.zero(); dim];
        for (&i, c) in &self.0 {
            v[i] = c.clone();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Option<&CycScalar> {
        self.0.get(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &CycScalar)> {
        self.0.iter().map(|(&i, c)| (i, c))
    }

    pub fn add_term(&mut self, i: usize, c: &CycScalar) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&i) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.0.remove(&i);
                }
            }
            None => {
                self.0.insert(i, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &GElem, s: &CycScalar) {
        if s.is_zero() {
            return;
        }
        for (&i, c) in &other.0 {
            self.add_term(i, &(c * s));
        }
    }

    pub fn scale(&self, s: &CycScalar) -> GElem {
        if s.is_zero() {
            return GElem::zero();
        }
        GElem(self.0.iter().map(|(&i, c)| (i, c * s)).collect())
    }

    pub fn add(&self, other: &GElem) -> GElem {
        let mut out = self.clone();
        for (&i, c) in &other.0 {
            out.add_term(i, c);
        }
        out
    }

    pub fn sub(&self, other: &GElem) -> GElem {
        let mut out = self.clone();
        for (&i, c) in &other.0 {
            out.add_term(i, &-c);
        }
        out
    }
}

/// A weight of `h(0)` given by its values on the chosen Cartan basis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RootVec(pub Vec<Rational>);

impl RootVec {
    pub fn zero(dim: usize) -> Self {
        RootVec(vec![Rational::zero(); dim])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &RootVec) -> RootVec {
        RootVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RootVec) -> RootVec {
        RootVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> RootVec {
        RootVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Rational) -> RootVec {
        RootVec(self.0.iter().map(|a| a * c).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for RootVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "<{}>", parts.join(","))
    }
}

fn rational_field() -> CyclotomicField {
    CyclotomicField::new(1).expect("Q is a valid field")
}

/// Root data of `g` relative to the Cartan `h(0)`: the nonzero weights,
/// a positive system and simple roots, and the form on `h(0)`.
#[derive(Clone, Debug)]
pub struct RootSystem {
    roots: Vec<RootVec>,
    positive_functional: Vec<Rational>,
    simple: Vec<RootVec>,
    /// Inverse Gram matrix of the form on the Cartan basis.
    gram_inv: Option<Vec<Vec<Rational>>>,
}

impl RootSystem {
    fn build(roots: Vec<RootVec>, gram: Option<Vec<Vec<Rational>>>, cartan_dim: usize) -> Result<Self> {
        let gram_inv = match gram {
            Some(g) if cartan_dim > 0 => {
                let q = rational_field();
                let m = Mat::from_fn(cartan_dim, cartan_dim, |i, j| q.from_rational(g[i][j].clone()));
                match m.inverse(q) {
                    Ok(inv) => Some(
                        (0..cartan_dim)
                            .map(|i| {
                                (0..cartan_dim)
                                    .map(|j| inv[(i, j)].as_rational().expect("rational"))
                                    .collect()
                            })
                            .collect(),
                    ),
                    Err(_) if roots.is_empty() => None,
                    Err(_) => {
                        return Err(Error::Validation(
                            "invariant form is degenerate on the Cartan subalgebra".into(),
                        ))
                    }
                }
            }
            _ => None,
        };
        let positive_functional = Self::regular_functional(&roots, cartan_dim);
        let eval = |a: &RootVec| -> Rational { a.0.iter().zip(&positive_functional).map(|(x, w)| x * w).sum() };
        let positives: Vec<&RootVec> = roots.iter().filter(|a| eval(a).is_positive()).collect();
        let simple: Vec<RootVec> = positives
            .iter()
            .filter(|a| !positives.iter().any(|b| positives.iter().any(|c| &b.add(c) == **a)))
            .map(|a| (*a).clone())
            .collect();
        if !simple.is_empty() {
            let q = rational_field();
            let m = Mat::from_fn(cartan_dim, simple.len(), |i, j| q.from_rational(simple[j].0[i].clone()));
            if m.rank() != simple.len() {
                return Err(Error::Validation(
                    "indecomposable positive weights are linearly dependent".into(),
                ));
            }
        }
        Ok(Self {
            roots,
            positive_functional,
            simple,
            gram_inv,
        })
    }

    /// A functional that is nonzero on every root; the all-ones vector when
    /// it works (this makes Chevalley generators `e_i` positive).
    fn regular_functional(roots: &[RootVec], dim: usize) -> Vec<Rational> {
        let mut attempt = 0i64;
        loop {
            let w: Vec<Rational> = (0..dim)
                .map(|j| {
                    let base = Rational::one();
                    if attempt == 0 {
                        base
                    } else {
                        base + Rational::new((j as i64 + 1).into(), (attempt * 7 + 3).into())
                            * Rational::from_integer(attempt.into())
                    }
                })
                .collect();
            let ok = roots
                .iter()
                .all(|a| !a.0.iter().zip(&w).map(|(x, y)| x * y).sum::<Rational>().is_zero());
            if ok {
                return w;
            }
            attempt += 1;
        }
    }

    pub fn roots(&self) -> &[RootVec] {
        &self.roots
    }

    /// The functional whose sign selects the positive roots.
    pub fn positive_functional(&self) -> &[Rational] {
        &self.positive_functional
    }

    pub fn simple_roots(&self) -> &[RootVec] {
        &self.simple
    }

    pub fn is_root(&self, a: &RootVec) -> bool {
        self.roots.contains(a)
    }

    /// Coordinates of `a` in the simple roots, if `a` lies in their span.
    pub fn simple_coordinates(&self, a: &RootVec) -> Option<Vec<Rational>> {
        if self.simple.is_empty() {
            return if a.is_zero() { Some(Vec::new()) } else { None };
        }
        let q = rational_field();
        let dim = a.dim();
        let m = Mat::from_fn(dim, self.simple.len(), |i, j| {
            q.from_rational(self.simple[j].0[i].clone())
        });
        let b: Vec<CycScalar> = a.0.iter().map(|x| q.from_rational(x.clone())).collect();
        let x = m.solve(&b, q)?;
        Some(x.iter().map(|c| c.as_rational().expect("rational")).collect())
    }

    /// `Greater` iff `a` is a nonzero non-negative combination of simple
    /// roots, `Less` iff `-a` is, `Equal` for zero; `None` otherwise.
    pub fn compare_to_zero(&self, a: &RootVec) -> Option<Ordering> {
        if a.is_zero() {
            return Some(Ordering::Equal);
        }
        let c = self.simple_coordinates(a)?;
        if c.iter().all(|x| !x.is_negative()) {
            Some(Ordering::Greater)
        } else if c.iter().all(|x| !x.is_positive()) {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// `(a|b)` transported to `h(0)^*` through the form.
    pub fn inner(&self, a: &RootVec, b: &RootVec) -> Option<Rational> {
        let g = self.gram_inv.as_ref()?;
        let mut acc = Rational::zero();
        for (i, x) in a.0.iter().enumerate() {
            for (j, y) in b.0.iter().enumerate() {
                acc += x * &g[i][j] * y;
            }
        }
        Some(acc)
    }

    /// `a^vee` in coordinates on the Cartan basis: `2 t_a / (a|a)`.
    pub fn coroot(&self, a: &RootVec) -> Option<Vec<Rational>> {
        let g = self.gram_inv.as_ref()?;
        let len = self.inner(a, a)?;
        if len.is_zero() {
            return None;
        }
        let two = Rational::from_integer(2.into());
        Some(
            (0..a.dim())
                .map(|i| {
                    let t: Rational = (0..a.dim()).map(|j| &g[i][j] * &a.0[j]).sum();
                    t * &two / &len
                })
                .collect(),
        )
    }

    pub fn max_root_length(&self) -> Option<Rational> {
        self.roots.iter().filter_map(|a| self.inner(a, a)).max()
    }
}

/// A finite-dimensional Lie algebra presented by structure constants, with a
/// validated invariant form and Cartan `h(0)` acting diagonally on the basis.
#[derive(Clone, Debug)]
pub struct SimpleLieAlgebra {
    field: CyclotomicField,
    labels: Vec<String>,
    table: Vec<GElem>,
    form: Mat,
    cartan: Vec<GElem>,
    weights: Vec<RootVec>,
    roots: RootSystem,
}

/// Inputs for [`SimpleLieAlgebra::new`].
#[derive(Clone, Debug)]
pub struct LieTable {
    pub labels: Vec<String>,
    /// `(i, j, [b_i, b_j])` for the entries that are nonzero; the rest are zero.
    pub brackets: Vec<(usize, usize, GElem)>,
    /// Invariant form; the normalized Killing form is used when absent.
    pub form: Option<Mat>,
    pub cartan: Vec<GElem>,
}

impl SimpleLieAlgebra {
    pub fn new(field: CyclotomicField, src: LieTable) -> Result<Self> {
        Self::build(field, src, true)
    }

    /// Skips the antisymmetry, Jacobi and invariance checks. Only intended for
    /// negative controls that exercise the downstream verification suites.
    pub fn new_unchecked(field: CyclotomicField, src: LieTable) -> Result<Self> {
        Self::build(field, src, false)
    }

    fn build(field: CyclotomicField, src: LieTable, validate: bool) -> Result<Self> {
        let dim = src.labels.len();
        if dim == 0 {
            return Err(Error::Config("empty basis".into()));
        }
        let mut seen = HashSet::new();
        for l in &src.labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Config(format!("duplicate basis label {l}")));
            }
        }
        let mut table = vec![GElem::zero(); dim * dim];
        for (i, j, v) in src.brackets {
            if i >= dim || j >= dim || v.iter().any(|(k, _)| k >= dim) {
                return Err(Error::Config("structure constant index out of range".into()));
            }
            table[i * dim + j] = v;
        }
        let mut alg = Self {
            field,
            labels: src.labels,
            table,
            form: Mat::zeros(field, dim, dim),
            cartan: src.cartan,
            weights: Vec::new(),
            roots: RootSystem {
                roots: Vec::new(),
                positive_functional: Vec::new(),
                simple: Vec::new(),
                gram_inv: None,
            },
        };
        if validate {
            alg.validate_table()?;
        }
        let (form, normalize) = match src.form {
            Some(f) => (f, false),
            None => (alg.killing_form()?, true),
        };
        if form.rows() != dim || form.cols() != dim {
            return Err(Error::Config("form table has the wrong shape".into()));
        }
        alg.form = form;
        if validate {
            alg.validate_form()?;
        }
        alg.compute_weights()?;
        let gram = alg.cartan_gram()?;
        alg.roots = RootSystem::build(alg.root_set(), gram, alg.cartan.len())?;
        if normalize {
            if let Some(max) = alg.roots.max_root_length() {
                let scale = max / Rational::from_integer(2.into());
                let s = field.from_rational(scale);
                alg.form = alg.form.scale(&s);
                let gram = alg.cartan_gram()?;
                alg.roots = RootSystem::build(alg.root_set(), gram, alg.cartan.len())?;
            }
        }
        Ok(alg)
    }

    fn root_set(&self) -> Vec<RootVec> {
        let mut roots: Vec<RootVec> = self.weights.iter().filter(|w| !w.is_zero()).cloned().collect();
        roots.sort();
        roots.dedup();
        roots
    }

    fn validate_table(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let a = &self.table[i * d + j];
                let b = &self.table[j * d + i];
                if !a.add(b).is_zero() {
                    return Err(Error::Validation(format!(
                        "antisymmetry fails for [{}, {}]",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let (x, y, z) = (self.basis(i), self.basis(j), self.basis(k));
                    let r = self
                        .bracket(&self.bracket(&x, &y), &z)
                        .add(&self.bracket(&self.bracket(&y, &z), &x))
                        .add(&self.bracket(&self.bracket(&z, &x), &y));
                    if !r.is_zero() {
                        return Err(Error::Validation(format!(
                            "Jacobi identity fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn validate_form(&self) -> Result<()> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if self.form[(i, j)] != self.form[(j, i)] {
                    return Err(Error::Validation("invariant form is not symmetric".into()));
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                let xy = self.bracket(&self.basis(i), &self.basis(j));
                for k in 0..d {
                    let lhs = self.form_eval(&xy, &self.basis(k));
                    let rhs = self.form_eval(&self.basis(i), &self.bracket(&self.basis(j), &self.basis(k)));
                    if lhs != rhs {
                        return Err(Error::Validation(format!(
                            "form is not invariant on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn killing_form(&self) -> Result<Mat> {
        let d = self.dim();
        let ads: Vec<Mat> = (0..d).map(|i| self.ad(&self.basis(i))).collect();
        let mut k = Mat::zeros(self.field, d, d);
        for i in 0..d {
            for j in 0..d {
                let p = ads[i].mul(&ads[j])?;
                let mut tr = self.field.zero();
                for t in 0..d {
                    tr += &p[(t, t)];
                }
                k[(i, j)] = tr;
            }
        }
        Ok(k)
    }

    fn compute_weights(&mut self) -> Result<()> {
        let d = self.dim();
        for (a, h) in self.cartan.iter().enumerate() {
            for (b, h2) in self.cartan.iter().enumerate() {
                if !self.bracket(h, h2).is_zero() {
                    return Err(Error::Validation(format!("Cartan elements {a} and {b} do not commute")));
                }
            }
        }
        let mut weights = Vec::with_capacity(d);
        for i in 0..d {
            let mut w = Vec::with_capacity(self.cartan.len());
            for h in &self.cartan {
                let img = self.bracket(h, &self.basis(i));
                let eig = match img.iter().collect::<Vec<_>>().as_slice() {
                    [] => Rational::zero(),
                    [(j, c)] if *j == i => c
                        .as_rational()
                        .ok_or_else(|| Error::NonAdaptedBasis(format!("irrational weight on {}", self.labels[i])))?,
                    _ => {
                        return Err(Error::NonAdaptedBasis(format!(
                            "basis vector {} is not an ad-eigenvector of the Cartan",
                            self.labels[i]
                        )))
                    }
                };
                w.push(eig);
            }
            weights.push(RootVec(w));
        }
        self.weights = weights;
        Ok(())
    }

    fn cartan_gram(&self) -> Result<Option<Vec<Vec<Rational>>>> {
        let mut g = Vec::new();
        for a in &self.cartan {
            let mut row = Vec::new();
            for b in &self.cartan {
                let v = self.form_eval(a, b);
                match v.as_rational() {
                    Some(q) => row.push(q),
                    None => return Ok(None),
                }
            }
            g.push(row);
        }
        Ok(Some(g))
    }

    pub fn field(&self) -> CyclotomicField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn basis(&self, i: usize) -> GElem {
        GElem::basis(i, self.field)
    }

    pub fn cartan(&self) -> &[GElem] {
        &self.cartan
    }

    pub fn form_table(&self) -> &Mat {
        &self.form
    }

    pub fn structure_constant(&self, i: usize, j: usize) -> &GElem {
        &self.table[i * self.dim() + j]
    }

    /// `h(0)`-weight of the `i`-th basis vector.
    pub fn basis_weight(&self, i: usize) -> &RootVec {
        &self.weights[i]
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.roots
    }

    /// Bilinear extension of the structure table.
    pub fn bracket(&self, x: &GElem, y: &GElem) -> GElem {
        let d = self.dim();
        let mut out = GElem::zero();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let c = &self.table[i * d + j];
                if c.is_zero() {
                    continue;
                }
                out.add_scaled(c, &(a * b));
            }
        }
        out
    }

    pub fn form_eval(&self, x: &GElem, y: &GElem) -> CycScalar {
        let mut acc = self.field.zero();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let f = &self.form[(i, j)];
                if !f.is_zero() {
                    acc += &(&(a * b) * f);
                }
            }
        }
        acc
    }

    /// Matrix of `ad x` (column `j` holds `[x, b_j]`).
    pub fn ad(&self, x: &GElem) -> Mat {
        let d = self.dim();
        let mut m = Mat::zeros(self.field, d, d);
        for j in 0..d {
            for (i, c) in self.bracket(x, &self.basis(j)).iter() {
                m[(i, j)] = c.clone();
            }
        }
        m
    }

    /// Splits `x` into `h(0)`-weight components.
    pub fn weight_components(&self, x: &GElem) -> BTreeMap<RootVec, GElem> {
        let mut out: BTreeMap<RootVec, GElem> = BTreeMap::new();
        for (i, c) in x.iter() {
            out.entry(self.weights[i].clone()).or_default().add_term(i, c);
        }
        out
    }

    /// Human-readable form of an element, e.g. `2*e + h`.
    pub fn format(&self, x: &GElem) -> String {
        if x.is_zero() {
            return "0".into();
        }
        x.iter()
            .map(|(i, c)| {
                if c.is_one() {
                    self.labels[i].clone()
                } else {
                    format!("({c})*{}", self.labels[i])
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Commuting finite-order automorphisms `sigma_1, ..., sigma_n` of `g`.
#[derive(Clone, Debug)]
pub struct AutomorphismSet {
    mats: Vec<Mat>,
    orders: Vec<u32>,
}

impl AutomorphismSet {
    /// Each matrix acts on coordinates: column `j` is the image of `b_j`.
    pub fn new(lie: &SimpleLieAlgebra, mats: Vec<Mat>, orders: Vec<u32>) -> Result<Self> {
        let d = lie.dim();
        let field = lie.field();
        if mats.len() != orders.len() {
            return Err(Error::Config(format!(
                "{} automorphisms for {} orders",
                mats.len(),
                orders.len()
            )));
        }
        let id = Mat::identity(field, d);
        for (idx, (s, &m)) in mats.iter().zip(&orders).enumerate() {
            if s.rows() != d || s.cols() != d {
                return Err(Error::Config(format!("automorphism {} has the wrong shape", idx + 1)));
            }
            let images: Vec<GElem> = (0..d).map(|j| GElem::from_dense(&s.column(j))).collect();
            for i in 0..d {
                for j in 0..d {
                    let lhs = apply_mat(s, &lie.bracket(&lie.basis(i), &lie.basis(j)), field);
                    let rhs = lie.bracket(&images[i], &images[j]);
                    if lhs != rhs {
                        return Err(Error::Validation(format!(
                            "sigma_{} is not a homomorphism on ({}, {})",
                            idx + 1,
                            lie.labels()[i],
                            lie.labels()[j]
                        )));
                    }
                    if lie.form_eval(&images[i], &images[j]) != lie.form[(i, j)] {
                        return Err(Error::Validation(format!(
                            "sigma_{} does not preserve the invariant form",
                            idx + 1
                        )));
                    }
                }
            }
            let mut p = s.clone();
            for j in 1..=m {
                let is_id = p == id;
                if j < m && is_id {
                    return Err(Error::Validation(format!(
                        "sigma_{} has order {j}, smaller than the declared {m}",
                        idx + 1
                    )));
                }
                if j == m && !is_id {
                    return Err(Error::Validation(format!("sigma_{}^{m} is not the identity", idx + 1)));
                }
                p = p.mul(s)?;
            }
            for h in lie.cartan() {
                if apply_mat(s, h, field) != *h {
                    return Err(Error::Validation(format!(
                        "sigma_{} does not fix the Cartan subalgebra",
                        idx + 1
                    )));
                }
            }
        }
        for a in 0..mats.len() {
            for b in a + 1..mats.len() {
                if mats[a].mul(&mats[b])? != mats[b].mul(&mats[a])? {
                    return Err(Error::Validation(format!(
                        "sigma_{} and sigma_{} do not commute",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(Self { mats, orders })
    }

    pub fn identity(lie: &SimpleLieAlgebra, n: usize) -> Self {
        Self {
            mats: vec![Mat::identity(lie.field(), lie.dim()); n],
            orders: vec![1; n],
        }
    }

    pub fn matrices(&self) -> &[Mat] {
        &self.mats
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn apply(&self, i: usize, x: &GElem) -> GElem {
        let f = self.mats[i][(0, 0)].field();
        apply_mat(&self.mats[i], x, f)
    }
}

fn apply_mat(m: &Mat, x: &GElem, field: CyclotomicField) -> GElem {
    let mut out = GElem::zero();
    for (j, c) in x.iter() {
        for i in 0..m.rows() {
            let e = &m[(i, j)];
            if !e.is_zero() {
                out.add_term(i, &(e * c));
            }
        }
    }
    let _ = field;
    out
}

/// Default enumeration bound for [`lie_torus_condition3`].
pub const GROUP_ENUMERATION_BOUND: u64 = 10_000;

/// Whether `|<sigma_1, ..., sigma_n>| = prod m_i`, by closure enumeration.
pub fn lie_torus_condition3(auts: &AutomorphismSet, bound: u64) -> Result<bool> {
    let product: u64 = auts.orders().iter().map(|&m| m as u64).product();
    if product > bound {
        return Err(Error::BoundExceeded(format!(
            "product of orders {product} exceeds the enumeration bound {bound}"
        )));
    }
    let Some(first) = auts.matrices().first() else {
        return Ok(true);
    };
    let field = first[(0, 0)].field();
    let id = Mat::identity(field, first.rows());
    let mut seen: HashSet<Mat> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in auts.matrices() {
            let h = g.mul(s)?;
            if seen.insert(h.clone()) {
                if seen.len() as u64 > product {
                    return Ok(false);
                }
                queue.push_back(h);
            }
        }
    }
    Ok(seen.len() as u64 == product)
}

/// The simultaneous eigenspaces `g(r)` for every residue class `r`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    spaces: BTreeMap<Degree, Vec<GElem>>,
    fixed_roots: Vec<RootVec>,
}

impl EigenDecomposition {
    /// Eigenspaces are computed inside each `h(0)`-weight space (the
    /// automorphisms fix `h(0)` and so preserve weight spaces), which makes
    /// every basis vector a weight vector.
    pub fn new(lie: &SimpleLieAlgebra, auts: &AutomorphismSet, lattice: &GradingLattice) -> Result<Self> {
        if auts.orders() != lattice.orders() {
            return Err(Error::Config("automorphism orders do not match the lattice".into()));
        }
        let field = lie.field();
        let mut groups: BTreeMap<RootVec, Vec<usize>> = BTreeMap::new();
        for i in 0..lie.dim() {
            groups.entry(lie.basis_weight(i).clone()).or_default().push(i);
        }
        let mut spaces = BTreeMap::new();
        let mut total = 0;
        for class in lattice.residues() {
            let eigenvalues: Vec<CycScalar> = (0..lattice.n())
                .map(|i| lattice.zeta_power(field, i, class.0[i]))
                .collect::<Result<_>>()?;
            let mut basis = Vec::new();
            for idx in groups.values() {
                let w = idx.len();
                let mut stacked = Mat::zeros(field, w * lattice.n(), w);
                for (a, s) in auts.matrices().iter().enumerate() {
                    for (ri, &i) in idx.iter().enumerate() {
                        for (ci, &j) in idx.iter().enumerate() {
                            let mut v = s[(i, j)].clone();
                            if i == j {
                                v -= &eigenvalues[a];
                            }
                            stacked[(a * w + ri, ci)] = v;
                        }
                    }
                    for &j in idx {
                        for i in 0..lie.dim() {
                            if !idx.contains(&i) && !s[(i, j)].is_zero() {
                                return Err(Error::Validation(
                                    "automorphism does not preserve an h(0)-weight space".into(),
                                ));
                            }
                        }
                    }
                }
                for v in stacked.kernel(field) {
                    basis.push(GElem::from_terms(idx.iter().zip(v).map(|(&i, c)| (i, c))));
                }
            }
            total += basis.len();
            spaces.insert(class, basis);
        }
        if total != lie.dim() {
            return Err(Error::Validation(format!(
                "eigenspaces have total dimension {total}, expected {}",
                lie.dim()
            )));
        }
        let zero = Degree::zero(lattice.n());
        let mut fixed_roots: Vec<RootVec> = spaces[&zero]
            .iter()
            .flat_map(|x| lie.weight_components(x).into_keys())
            .filter(|w| !w.is_zero())
            .collect();
        fixed_roots.sort();
        fixed_roots.dedup();
        Ok(Self { spaces, fixed_roots })
    }

    /// Basis of `g(r)` for the class of `r` modulo `Gamma-bar`.
    pub fn eigenspace(&self, class: &Degree) -> &[GElem] {
        self.spaces.get(class).map_or(&[], Vec::as_slice)
    }

    pub fn classes(&self) -> impl Iterator<Item = (&Degree, &Vec<GElem>)> {
        self.spaces.iter()
    }

    /// Roots of the fixed-point subalgebra `g(0)` relative to `h(0)`.
    pub fn fixed_roots(&self) -> &[RootVec] {
        &self.fixed_roots
    }

    /// Whether `g(class, alpha)` is nonzero.
    pub fn has_weight(&self, lie: &SimpleLieAlgebra, class: &Degree, alpha: &RootVec) -> bool {
        self.eigenspace(class)
            .iter()
            .any(|x| lie.weight_components(x).contains_key(alpha))
    }
}

/// Membership `x in g(r)`: `sigma_i x = zeta_i^{r_i} x` for all `i`.
pub fn in_eigenspace(
    auts: &AutomorphismSet,
    lattice: &GradingLattice,
    x: &GElem,
    r: &Degree,
    field: CyclotomicField,
) -> Result<bool> {
    for i in 0..lattice.n() {
        let ev = lattice.zeta_power(field, i, r.0[i])?;
        if auts.apply(i, x) != x.scale(&ev) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decomposes `x in g(r)` into `h(0)`-weight components `g(r, alpha)`.
pub fn weight_decompose(
    lie: &SimpleLieAlgebra,
    auts: &AutomorphismSet,
    lattice: &GradingLattice,
    x: &GElem,
    class: &Degree,
) -> Result<BTreeMap<RootVec, GElem>> {
    if !in_eigenspace(auts, lattice, x, class, lie.field())? {
        return Err(Error::Precondition(format!(
            "{} does not lie in g{}",
            lie.format(x),
            class
        )));
    }
    Ok(lie.weight_components(x))
}

pub mod builtin {
    //! Built-in Chevalley tables for `sl_2` and `sl_3`, realized by matrix
    //! units with the trace form (`(alpha|alpha) = 2`).
    use super::*;

    fn unit(n: usize, i: usize, j: usize) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; n]; n];
        m[i][j] = 1;
        m
    }

    fn diag_h(n: usize, i: usize) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; n]; n];
        m[i][i] = 1;
        m[i + 1][i + 1] = -1;
        m
    }

    fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    fn table_for(
        n: usize,
        labels: Vec<String>,
        mats: Vec<Vec<Vec<i64>>>,
        field: CyclotomicField,
    ) -> Result<SimpleLieAlgebra> {
        let d = mats.len();
        let h_start = d - (n - 1);
        // Coordinates of a traceless matrix in the basis.
        let coords = |m: &[Vec<i64>]| -> GElem {
            let mut out = GElem::zero();
            for (idx, b) in mats.iter().enumerate().take(h_start) {
                let (i, j) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .find(|&(i, j)| b[i][j] != 0)
                    .expect("matrix unit");
                out.add_term(idx, &field.int(m[i][j]));
            }
            let mut running = 0;
            for i in 0..n - 1 {
                running += m[i][i];
                out.add_term(h_start + i, &field.int(running));
            }
            out
        };
        let mut brackets = Vec::new();
        let mut form = Mat::zeros(field, d, d);
        for i in 0..d {
            for j in 0..d {
                let ab = matmul(&mats[i], &mats[j]);
                let ba = matmul(&mats[j], &mats[i]);
                let comm: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| ab[r][c] - ba[r][c]).collect()).collect();
                let v = coords(&comm);
                if !v.is_zero() {
                    brackets.push((i, j, v));
                }
                form[(i, j)] = field.int((0..n).map(|t| ab[t][t]).sum());
            }
        }
        let cartan = (h_start..d).map(|i| GElem::basis(i, field)).collect();
        SimpleLieAlgebra::new(
            field,
            LieTable {
                labels,
                brackets,
                form: Some(form),
                cartan,
            },
        )
    }

    /// `sl_2` with basis `e, f, h`.
    pub fn sl2(field: CyclotomicField) -> Result<SimpleLieAlgebra> {
        table_for(
            2,
            vec!["e".into(), "f".into(), "h".into()],
            vec![unit(2, 0, 1), unit(2, 1, 0), diag_h(2, 0)],
            field,
        )
    }

    /// `sl_3` with basis `e1, e2, e3, f1, f2, f3, h1, h2`, where
    /// `e3 = [e1, e2]` spans the highest root space.
    pub fn sl3(field: CyclotomicField) -> Result<SimpleLieAlgebra> {
        let labels = ["e1", "e2", "e3", "f1", "f2", "f3", "h1", "h2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        table_for(
            3,
            labels,
            vec![
                unit(3, 0, 1),
                unit(3, 1, 2),
                unit(3, 0, 2),
                unit(3, 1, 0),
                unit(3, 2, 1),
                unit(3, 2, 0),
                diag_h(3, 0),
                diag_h(3, 1),
            ],
            field,
        )
    }

    /// Structure table of a built-in algebra as a [`LieTable`] (for
    /// deliberately corrupting entries in negative controls).
    pub fn table_of(alg: &SimpleLieAlgebra) -> LieTable {
        let d = alg.dim();
        let mut brackets = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let v = alg.structure_constant(i, j);
                if !v.is_zero() {
                    brackets.push((i, j, v.clone()));
                }
            }
        }
        LieTable {
            labels: alg.labels().to_vec(),
            brackets,
            form: Some(alg.form_table().clone()),
            cartan: alg.cartan().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::builtin::{sl2, sl3, table_of};
    use super::*;

    fn q(x: i64) -> Rational {
        Rational::from_integer(x.into())
    }

    fn field(n: u32) -> CyclotomicField {
        CyclotomicField::new(n).unwrap()
    }

    #[test]
    fn sl2_relations() {
        let f = field(1);
        let g = sl2(f).unwrap();
        let (e, fv, h) = (g.basis(0), g.basis(1), g.basis(2));
        assert_eq!(g.bracket(&e, &fv), h);
        assert_eq!(g.bracket(&h, &e), e.scale(&f.int(2)));
        assert!(g.bracket(&e, &e).is_zero());
        assert_eq!(g.form_eval(&e, &fv), f.one());
        assert!(g.form_eval(&e, &e).is_zero());
    }

    #[test]
    fn builtin_root_systems() {
        let g = sl2(field(1)).unwrap();
        let rs = g.root_system();
        assert_eq!(rs.roots().len(), 2);
        assert_eq!(rs.simple_roots(), &[RootVec(vec![q(2)])]);
        assert_eq!(rs.inner(&rs.simple_roots()[0], &rs.simple_roots()[0]), Some(q(2)));
        assert_eq!(rs.coroot(&RootVec(vec![q(2)])), Some(vec![q(1)]));

        let g3 = sl3(field(1)).unwrap();
        let rs3 = g3.root_system();
        assert_eq!(rs3.roots().len(), 6);
        assert_eq!(rs3.simple_roots().len(), 2);
        // e1, e2 are the simple root vectors; e3 is positive, f's negative.
        for i in 0..3 {
            assert_eq!(rs3.compare_to_zero(g3.basis_weight(i)), Some(Ordering::Greater));
            assert_eq!(rs3.compare_to_zero(g3.basis_weight(i + 3)), Some(Ordering::Less));
        }
        assert_eq!(rs3.max_root_length(), Some(q(2)));
        for a in rs3.roots() {
            assert_eq!(rs3.inner(a, a), Some(q(2)));
        }
    }

    #[test]
    fn killing_form_is_normalized_when_absent() {
        let f = field(1);
        let mut t = table_of(&sl3(f).unwrap());
        t.form = None;
        let g = SimpleLieAlgebra::new(f, t).unwrap();
        let g0 = sl3(f).unwrap();
        assert_eq!(g.form_table(), g0.form_table());
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let f = field(1);
        let mut t = table_of(&sl2(f).unwrap());
        // [e, f] = h becomes [e, f] = 2h in one entry only.
        for (i, j, v) in t.brackets.iter_mut() {
            if (*i, *j) == (0, 1) {
                v.add_term(2, &f.one());
            }
        }
        assert!(matches!(SimpleLieAlgebra::new(f, t.clone()), Err(Error::Validation(_))));
        assert!(SimpleLieAlgebra::new_unchecked(f, t).is_ok());
    }

    #[test]
    fn non_adapted_cartan_is_rejected() {
        let f = field(1);
        let mut t = table_of(&sl2(f).unwrap());
        t.cartan = vec![GElem::from_terms([(0, f.one()), (2, f.one())])];
        assert!(matches!(
            SimpleLieAlgebra::new(f, t),
            Err(Error::NonAdaptedBasis(_)) | Err(Error::Validation(_))
        ));
    }

    fn twisted_sl2(f: CyclotomicField) -> (SimpleLieAlgebra, AutomorphismSet, GradingLattice) {
        let g = sl2(f).unwrap();
        let mut s = Mat::identity(f, 3);
        s[(0, 0)] = f.int(-1);
        s[(1, 1)] = f.int(-1);
        let auts = AutomorphismSet::new(&g, vec![s, Mat::identity(f, 3)], vec![2, 1]).unwrap();
        (g, auts, GradingLattice::new(vec![2, 1]).unwrap())
    }

    #[test]
    fn untwisted_eigenspace_is_everything() {
        let f = field(1);
        let g = sl2(f).unwrap();
        let auts = AutomorphismSet::identity(&g, 2);
        let l = GradingLattice::new(vec![1, 1]).unwrap();
        let eig = EigenDecomposition::new(&g, &auts, &l).unwrap();
        assert_eq!(eig.eigenspace(&Degree(vec![0, 0])).len(), 3);
        assert!(lie_torus_condition3(&auts, GROUP_ENUMERATION_BOUND).unwrap());
    }

    #[test]
    fn twisted_sl2_eigenspaces() {
        let f = field(2);
        let (g, auts, l) = twisted_sl2(f);
        let eig = EigenDecomposition::new(&g, &auts, &l).unwrap();
        let even = eig.eigenspace(&Degree(vec![0, 0]));
        let odd = eig.eigenspace(&Degree(vec![1, 0]));
        assert_eq!(even, &[g.basis(2)]);
        assert_eq!(odd.len(), 2);
        assert!(odd.contains(&g.basis(0)) && odd.contains(&g.basis(1)));
        assert_eq!(even.len() + odd.len(), 3);
        assert!(lie_torus_condition3(&auts, GROUP_ENUMERATION_BOUND).unwrap());

        let x = g.basis(0).add(&g.basis(1));
        let parts = weight_decompose(&g, &auts, &l, &x, &Degree(vec![1, 0])).unwrap();
        assert_eq!(parts[&RootVec(vec![q(2)])], g.basis(0));
        assert_eq!(parts[&RootVec(vec![q(-2)])], g.basis(1));
        assert!(weight_decompose(&g, &auts, &l, &x, &Degree(vec![0, 0])).is_err());
        let h = weight_decompose(&g, &auts, &l, &g.basis(2), &Degree(vec![0, 0])).unwrap();
        assert_eq!(h[&RootVec(vec![q(0)])], g.basis(2));
    }

    #[test]
    fn equal_automorphisms_fail_condition3() {
        let f = field(2);
        let g = sl2(f).unwrap();
        let mut s = Mat::identity(f, 3);
        s[(0, 0)] = f.int(-1);
        s[(1, 1)] = f.int(-1);
        let auts = AutomorphismSet::new(&g, vec![s.clone(), s], vec![2, 2]).unwrap();
        assert!(!lie_torus_condition3(&auts, GROUP_ENUMERATION_BOUND).unwrap());
        assert!(matches!(lie_torus_condition3(&auts, 3), Err(Error::BoundExceeded(_))));
    }

    #[test]
    fn wrong_order_is_rejected() {
        let f = field(2);
        let g = sl2(f).unwrap();
        let mut s = Mat::identity(f, 3);
        s[(0, 0)] = f.int(-1);
        s[(1, 1)] = f.int(-1);
        assert!(AutomorphismSet::new(&g, vec![s.clone(), Mat::identity(f, 3)], vec![4, 1]).is_err());
        let mut bad = Mat::identity(f, 3);
        bad[(0, 0)] = f.int(-1);
        assert!(AutomorphismSet::new(&g, vec![bad, Mat::identity(f, 3)], vec![2, 1]).is_err());
    }

    #[test]
    fn eigenspaces_are_graded_subalgebras() {
        let f = field(3);
        let g = sl3(f).unwrap();
        let w = f.zeta_pow(1);
        let w2 = f.zeta_pow(2);
        // Ad diag(1, 1, w) on (e1, e2, e3, f1, f2, f3, h1, h2).
        let diag = [f.one(), w2.clone(), w2, f.one(), w.clone(), w, f.one(), f.one()];
        let mut s = Mat::identity(f, 8);
        for (i, d) in diag.iter().enumerate() {
            s[(i, i)] = d.clone();
        }
        let id = Mat::identity(f, 8);
        let auts = AutomorphismSet::new(&g, vec![s, id.clone(), id.clone(), id], vec![3, 1, 1, 1]).unwrap();
        let l = GradingLattice::new(vec![3, 1, 1, 1]).unwrap();
        let eig = EigenDecomposition::new(&g, &auts, &l).unwrap();
        let classes: Vec<(Degree, Vec<GElem>)> = eig.classes().map(|(c, b)| (c.clone(), b.clone())).collect();
        for (a, ba) in &classes {
            for (b, bb) in &classes {
                let sum = l.residue(&(a + b));
                for x in ba {
                    for y in bb {
                        let z = g.bracket(x, y);
                        assert!(in_eigenspace(&auts, &l, &z, &sum, f).unwrap());
                    }
                }
            }
        }
        assert_eq!(eig.fixed_roots().len(), 2);
        assert!(lie_torus_condition3(&auts, GROUP_ENUMERATION_BOUND).unwrap());
    }
}
