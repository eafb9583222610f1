//! The algebra `tau = LT + Z/K(m) + H_n(m)`: elements, the bracket built
//! from the multiloop cocycle and the derivation action, canonical forms in
//! the central quotient, and the invariant bilinear form.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{pair, pair_vec, Degree, GradingLattice};
use crate::linalg::IntMatrix;
use crate::scalar::{CycScalar, CyclotomicField};
use crate::simple_lie::{in_eigenspace, AutomorphismSet, EigenDecomposition, GElem, SimpleLieAlgebra};

/// A homogeneous element of `tau` written as a sum over the three summands.
///
/// Degree-zero central and derivation parts are full vectors `K(u,0)`,
/// `D(u,0)`; every nonzero degree carries a single coefficient on the
/// frame's basis element of `(Z/K(m))_r` and on `h_r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TauElement {
    n: usize,
    field: CyclotomicField,
    loops: BTreeMap<Degree, GElem>,
    central0: Vec<CycScalar>,
    central: BTreeMap<Degree, CycScalar>,
    deriv0: Vec<CycScalar>,
    ham: BTreeMap<Degree, CycScalar>,
}

fn add_coeff(map: &mut BTreeMap<Degree, CycScalar>, r: &Degree, c: &CycScalar) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(r) {
        Some(x) => {
            *x += c;
            if x.is_zero() {
                map.remove(r);
            }
        }
        None => {
            map.insert(r.clone(), c.clone());
        }
    }
}

impl TauElement {
    pub fn zero(n: usize, field: CyclotomicField) -> Self {
        Self {
            n,
            field,
            loops: BTreeMap::new(),
            central0: vec![field.zero(); n],
            central: BTreeMap::new(),
            deriv0: vec![field.zero(); n],
            ham: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> CyclotomicField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.loops.is_empty()
            && self.central.is_empty()
            && self.ham.is_empty()
            && self.central0.iter().all(CycScalar::is_zero)
            && self.deriv0.iter().all(CycScalar::is_zero)
    }

    pub fn loops(&self) -> &BTreeMap<Degree, GElem> {
        &self.loops
    }

    pub fn central0(&self) -> &[CycScalar] {
        &self.central0
    }

    pub fn central(&self) -> &BTreeMap<Degree, CycScalar> {
        &self.central
    }

    pub fn deriv0(&self) -> &[CycScalar] {
        &self.deriv0
    }

    pub fn hamiltonians(&self) -> &BTreeMap<Degree, CycScalar> {
        &self.ham
    }

    pub fn add_loop(&mut self, r: &Degree, x: &GElem) {
        if x.is_zero() {
            return;
        }
        let entry = self.loops.entry(r.clone()).or_default();
        *entry = entry.add(x);
        if entry.is_zero() {
            self.loops.remove(r);
        }
    }

    /// Adds `c` times the canonical central basis element of degree `r != 0`.
    pub fn add_central_coeff(&mut self, r: &Degree, c: &CycScalar) {
        add_coeff(&mut self.central, r, c);
    }

    pub fn add_ham_coeff(&mut self, r: &Degree, c: &CycScalar) {
        add_coeff(&mut self.ham, r, c);
    }

    pub fn add_central0(&mut self, u: &[CycScalar]) {
        for (a, b) in self.central0.iter_mut().zip(u) {
            *a += b;
        }
    }

    pub fn add_deriv0(&mut self, u: &[CycScalar]) {
        for (a, b) in self.deriv0.iter_mut().zip(u) {
            *a += b;
        }
    }

    pub fn add(&self, other: &TauElement) -> TauElement {
        let mut out = self.clone();
        for (r, x) in &other.loops {
            out.add_loop(r, x);
        }
        for (r, c) in &other.central {
            out.add_central_coeff(r, c);
        }
        for (r, c) in &other.ham {
            out.add_ham_coeff(r, c);
        }
        out.add_central0(&other.central0);
        out.add_deriv0(&other.deriv0);
        out
    }

    pub fn scale(&self, s: &CycScalar) -> TauElement {
        if s.is_zero() {
            return TauElement::zero(self.n, self.field);
        }
        TauElement {
            n: self.n,
            field: self.field,
            loops: self.loops.iter().map(|(r, x)| (r.clone(), x.scale(s))).collect(),
            central0: self.central0.iter().map(|c| c * s).collect(),
            central: self.central.iter().map(|(r, c)| (r.clone(), c * s)).collect(),
            deriv0: self.deriv0.iter().map(|c| c * s).collect(),
            ham: self.ham.iter().map(|(r, c)| (r.clone(), c * s)).collect(),
        }
    }

    pub fn neg(&self) -> TauElement {
        self.scale(&-self.field.one())
    }

    pub fn sub(&self, other: &TauElement) -> TauElement {
        self.add(&other.neg())
    }

    /// Degrees carrying a nonzero component.
    pub fn degrees(&self) -> Vec<Degree> {
        let zero = Degree::zero(self.n);
        let mut out: Vec<Degree> = self
            .loops
            .keys()
            .chain(self.central.keys())
            .chain(self.ham.keys())
            .cloned()
            .collect();
        if self.central0.iter().any(|c| !c.is_zero()) || self.deriv0.iter().any(|c| !c.is_zero()) {
            out.push(zero);
        }
        out.sort();
        out.dedup();
        out
    }

    /// The common degree of a nonzero homogeneous element.
    pub fn degree(&self) -> Option<Degree> {
        match self.degrees().as_slice() {
            [r] => Some(r.clone()),
            _ => None,
        }
    }

    /// The component of degree `r`.
    pub fn component(&self, r: &Degree) -> TauElement {
        let mut out = TauElement::zero(self.n, self.field);
        if let Some(x) = self.loops.get(r) {
            out.add_loop(r, x);
        }
        if let Some(c) = self.central.get(r) {
            out.add_central_coeff(r, c);
        }
        if let Some(c) = self.ham.get(r) {
            out.add_ham_coeff(r, c);
        }
        if r.is_zero() {
            out.central0 = self.central0.clone();
            out.deriv0 = self.deriv0.clone();
        }
        out
    }
}

/// Writes elements with basis labels, e.g. `e(1,0) - 1/2*K[(1,-1),(1,1)]`.
pub struct Pretty<'a> {
    pub alg: &'a TauAlgebra,
    pub x: &'a TauElement,
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.x;
        let mut terms: Vec<(bool, String)> = Vec::new();
        // Negative rational coefficients print as subtraction.
        let coef = |c: &CycScalar| -> (bool, String) {
            let negative = c.as_rational().is_some_and(|q| num_traits::Signed::is_negative(&q));
            let c = if negative { -c } else { c.clone() };
            let text = if c.is_one() {
                String::new()
            } else if c.is_rational() {
                format!("{c}*")
            } else {
                format!("({c})*")
            };
            (negative, text)
        };
        let tuple = |r: &Degree| r.0.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        for (r, g) in &x.loops {
            for (i, c) in g.iter() {
                let (neg, c) = coef(c);
                terms.push((neg, format!("{c}{}({})", self.alg.lie().labels()[i], tuple(r))));
            }
        }
        for (i, c) in x.central0.iter().enumerate() {
            if !c.is_zero() {
                let (neg, c) = coef(c);
                terms.push((neg, format!("{c}K{}", i + 1)));
            }
        }
        for (r, c) in &x.central {
            let e = self.alg.frame().central_vector(r);
            let (neg, c) = coef(c);
            terms.push((neg, format!("{c}K[({}),({})]", tuple(&e), tuple(r))));
        }
        for (i, c) in x.deriv0.iter().enumerate() {
            if !c.is_zero() {
                let (neg, c) = coef(c);
                terms.push((neg, format!("{c}d{}", i + 1)));
            }
        }
        for (r, c) in &x.ham {
            let (neg, c) = coef(c);
            terms.push((neg, format!("{c}h[{}]", tuple(r))));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, t)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, false) => write!(f, "{t}")?,
                (0, true) => write!(f, "-{t}")?,
                (_, false) => write!(f, " + {t}")?,
                (_, true) => write!(f, " - {t}")?,
            }
        }
        Ok(())
    }
}

/// Degree-zero central vector, or one coefficient on the basis of `(Z/K(m))_r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CentralTerm {
    DegreeZero(Vec<CycScalar>),
    Basis { degree: Degree, coeff: CycScalar },
}

/// A coordinate frame `B in GL(n, Z)` for the isomorphic copy `tau_B`.
///
/// In frame `B` the Hamiltonian of degree `R` is `D(F J B^-1 R, R)` and the
/// central basis element is `K(B J B^-1 R, R)`, with `F = (B^T)^-1`. The
/// identity frame gives `h_r = D(r-bar, r)` and `K(r-bar, r)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Frame {
    b: IntMatrix,
    b_inv: IntMatrix,
    f: IntMatrix,
}

impl Frame {
    pub fn identity(n: usize) -> Self {
        let id = IntMatrix::identity(n);
        Self {
            b: id.clone(),
            b_inv: id.clone(),
            f: id,
        }
    }

    pub fn new(b: IntMatrix) -> Result<Self> {
        let b_inv = b.unimodular_inverse()?;
        let f = b_inv.transpose();
        Ok(Self { b, b_inv, f })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.b
    }

    /// `F = (B^T)^-1`.
    pub fn contragredient(&self) -> &IntMatrix {
        &self.f
    }

    pub fn is_identity(&self) -> bool {
        self.b == IntMatrix::identity(self.b.size())
    }

    /// Frame of `outer . B`.
    pub fn then(&self, outer: &IntMatrix) -> Result<Frame> {
        Frame::new(outer.mul(&self.b))
    }

    /// `B^-1 R`.
    pub fn pull(&self, r: &Degree) -> Degree {
        Degree(self.b_inv.apply(&r.0))
    }

    /// The vector of the Hamiltonian of degree `R`.
    pub fn hamiltonian_vector(&self, r: &Degree) -> Degree {
        Degree(self.f.apply(&self.pull(r).bar().0))
    }

    /// The vector of the central basis element of degree `R`.
    pub fn central_vector(&self, r: &Degree) -> Degree {
        Degree(self.b.apply(&self.pull(r).bar().0))
    }
}

/// Deliberate faults for negative controls.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Fault {
    #[default]
    None,
    /// Omits `(u,s)(v,r) K(r, r+s)` from the derivation bracket.
    DropDerivationCocycle,
}

/// One generator-level summand: `X(r)`, `K(v, s)` or `D(u, r)`.
#[derive(Clone, Debug)]
enum Piece {
    Loop(Degree, GElem),
    Central(Vec<CycScalar>, Degree),
    Deriv(Vec<CycScalar>, Degree),
}

/// The configured algebra `tau` (or its image `tau_B` in a non-identity frame).
#[derive(Clone, Debug)]
pub struct TauAlgebra {
    lie: Arc<SimpleLieAlgebra>,
    auts: Arc<AutomorphismSet>,
    lattice: GradingLattice,
    eigen: Arc<EigenDecomposition>,
    frame: Frame,
    fault: Fault,
}

impl TauAlgebra {
    pub fn new(lie: SimpleLieAlgebra, auts: AutomorphismSet, lattice: GradingLattice) -> Result<Self> {
        let order = lie.field().order();
        if let Some(&m) = lattice.orders().iter().find(|&&m| !order.is_multiple_of(m)) {
            return Err(Error::Config(format!(
                "scalar field Q(z_{order}) does not contain primitive {m}-th roots of unity"
            )));
        }
        let eigen = EigenDecomposition::new(&lie, &auts, &lattice)?;
        let n = lattice.n();
        Ok(Self {
            lie: Arc::new(lie),
            auts: Arc::new(auts),
            lattice,
            eigen: Arc::new(eigen),
            frame: Frame::identity(n),
            fault: Fault::None,
        })
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = fault;
        self
    }

    pub fn fault(&self) -> Fault {
        self.fault
    }

    pub fn lie(&self) -> &SimpleLieAlgebra {
        &self.lie
    }

    pub fn automorphisms(&self) -> &AutomorphismSet {
        &self.auts
    }

    pub fn lattice(&self) -> &GradingLattice {
        &self.lattice
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }

    pub fn field(&self) -> CyclotomicField {
        self.lie.field()
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// The same algebra transported by `B`: its frame becomes `B . frame`.
    pub fn twisted(&self, b: &IntMatrix) -> Result<TauAlgebra> {
        let mut out = self.clone();
        out.frame = self.frame.then(b)?;
        Ok(out)
    }

    pub fn zero(&self) -> TauElement {
        TauElement::zero(self.n(), self.field())
    }

    fn check_len(&self, r: &Degree) -> Result<()> {
        if r.len() == self.n() {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "degree {r} has length {}, expected {}",
                r.len(),
                self.n()
            )))
        }
    }

    /// Whether `R` is a degree of the frame's central and Hamiltonian parts.
    pub fn in_frame_lattice(&self, r: &Degree) -> bool {
        self.lattice.in_gamma_bar(&self.frame.pull(r))
    }

    fn check_frame_lattice(&self, r: &Degree) -> Result<()> {
        self.check_len(r)?;
        if self.in_frame_lattice(r) {
            Ok(())
        } else {
            Err(Error::NotInLattice {
                degree: r.to_string(),
                lattice: "Gamma-bar",
            })
        }
    }

    /// `x (x) t^r`, after checking `x in g(r mod m)`.
    pub fn loop_elem(&self, x: &GElem, r: &Degree) -> Result<TauElement> {
        self.check_len(r)?;
        if !in_eigenspace(&self.auts, &self.lattice, x, &self.lattice.residue(r), self.field())? {
            return Err(Error::Precondition(format!(
                "{} is not in the eigenspace g{}",
                self.lie.format(x),
                self.lattice.residue(r)
            )));
        }
        let mut out = self.zero();
        out.add_loop(r, x);
        Ok(out)
    }

    /// `h_r` for `r in Gamma-bar`, `r != 0`.
    pub fn hamiltonian(&self, r: &Degree) -> Result<TauElement> {
        self.check_frame_lattice(r)?;
        if r.is_zero() {
            return Err(Error::Precondition("h_0 = D(0, 0) vanishes; use d_i".into()));
        }
        let mut out = self.zero();
        out.add_ham_coeff(r, &self.field().one());
        Ok(out)
    }

    /// `K_i` (0-based `i`).
    pub fn k(&self, i: usize) -> Result<TauElement> {
        self.unit_vector(i).map(|u| {
            let mut out = self.zero();
            out.add_central0(&u);
            out
        })
    }

    /// `d_i` (0-based `i`).
    pub fn d(&self, i: usize) -> Result<TauElement> {
        self.unit_vector(i).map(|u| {
            let mut out = self.zero();
            out.add_deriv0(&u);
            out
        })
    }

    pub fn deriv0(&self, u: &[CycScalar]) -> Result<TauElement> {
        if u.len() != self.n() {
            return Err(Error::Dimension("derivation vector length".into()));
        }
        let mut out = self.zero();
        out.add_deriv0(u);
        Ok(out)
    }

    fn unit_vector(&self, i: usize) -> Result<Vec<CycScalar>> {
        if i >= self.n() {
            return Err(Error::Dimension(format!(
                "index {} out of range 1..={}",
                i + 1,
                self.n()
            )));
        }
        let mut u = vec![self.field().zero(); self.n()];
        u[i] = self.field().one();
        Ok(u)
    }

    /// Canonical form of `K(u, r)` in `Z/K(m)`: `u` itself at `r = 0`, and
    /// `c K(r-bar, r)` with `c = (u, r-bar)/(r-bar, r-bar)` otherwise.
    pub fn central_canonicalize(&self, u: &[CycScalar], r: &Degree) -> Result<CentralTerm> {
        if u.len() != self.n() {
            return Err(Error::Dimension("central vector length".into()));
        }
        self.check_frame_lattice(r)?;
        if r.is_zero() {
            return Ok(CentralTerm::DegreeZero(u.to_vec()));
        }
        Ok(CentralTerm::Basis {
            degree: r.clone(),
            coeff: self.central_coeff(u, r),
        })
    }

    fn central_coeff(&self, u: &[CycScalar], r: &Degree) -> CycScalar {
        let rho = self.frame.hamiltonian_vector(r);
        let e = self.frame.central_vector(r);
        let denom = e.dot(&rho).expect("equal lengths");
        pair(u, &rho, self.field()) * self.field().ratio(1, denom)
    }

    /// `K(u, r)` as an element.
    pub fn central(&self, u: &[CycScalar], r: &Degree) -> Result<TauElement> {
        let mut out = self.zero();
        match self.central_canonicalize(u, r)? {
            CentralTerm::DegreeZero(v) => out.add_central0(&v),
            CentralTerm::Basis { degree, coeff } => out.add_central_coeff(&degree, &coeff),
        }
        Ok(out)
    }

    /// A basis of `(Z/K(m))_r`.
    pub fn central_basis(&self, r: &Degree) -> Result<Vec<TauElement>> {
        self.check_frame_lattice(r)?;
        if r.is_zero() {
            return (0..self.n()).map(|i| self.k(i)).collect();
        }
        let mut out = self.zero();
        out.add_central_coeff(r, &self.field().one());
        Ok(vec![out])
    }

    fn pieces(&self, x: &TauElement) -> Vec<Piece> {
        let field = self.field();
        let zero = Degree::zero(self.n());
        let mut out = Vec::new();
        for (r, g) in &x.loops {
            out.push(Piece::Loop(r.clone(), g.clone()));
        }
        if x.central0.iter().any(|c| !c.is_zero()) {
            out.push(Piece::Central(x.central0.clone(), zero.clone()));
        }
        for (r, c) in &x.central {
            let v = self.frame.central_vector(r).to_scalars(field);
            out.push(Piece::Central(v.iter().map(|a| a * c).collect(), r.clone()));
        }
        if x.deriv0.iter().any(|c| !c.is_zero()) {
            out.push(Piece::Deriv(x.deriv0.clone(), zero));
        }
        for (r, c) in &x.ham {
            let v = self.frame.hamiltonian_vector(r).to_scalars(field);
            out.push(Piece::Deriv(v.iter().map(|a| a * c).collect(), r.clone()));
        }
        out
    }

    fn emit_central(&self, out: &mut TauElement, v: &[CycScalar], r: &Degree) {
        if r.is_zero() {
            out.add_central0(v);
        } else {
            out.add_central_coeff(r, &self.central_coeff(v, r));
        }
    }

    /// Adds `D(w, r)`; for `r != 0` the vector is read off along the frame's
    /// Hamiltonian direction.
    fn emit_deriv(&self, out: &mut TauElement, w: &[CycScalar], r: &Degree) {
        if r.is_zero() {
            out.add_deriv0(w);
            return;
        }
        let rho = self.frame.hamiltonian_vector(r);
        let denom = rho.dot(&rho).expect("equal lengths");
        let c = pair(w, &rho, self.field()) * self.field().ratio(1, denom);
        out.add_ham_coeff(r, &c);
    }

    fn bracket_pieces(&self, out: &mut TauElement, a: &Piece, b: &Piece) {
        let field = self.field();
        match (a, b) {
            (Piece::Loop(p, x), Piece::Loop(q, y)) => {
                let pq = p + q;
                out.add_loop(&pq, &self.lie.bracket(x, y));
                let c = self.lie.form_eval(x, y);
                if !c.is_zero() {
                    let v: Vec<CycScalar> = p.to_scalars(field).iter().map(|a| a * &c).collect();
                    self.emit_central(out, &v, &pq);
                }
            }
            (Piece::Deriv(u, r), Piece::Loop(s, y)) => {
                let c = pair(u, s, field);
                out.add_loop(&(r + s), &y.scale(&c));
            }
            (Piece::Loop(..), Piece::Deriv(..)) | (Piece::Central(..), Piece::Deriv(..)) => {
                let mut tmp = TauElement::zero(self.n(), field);
                self.bracket_pieces(&mut tmp, b, a);
                *out = out.sub(&tmp);
            }
            (Piece::Deriv(u, r), Piece::Central(v, s)) => {
                let rs = r + s;
                let us = pair(u, s, field);
                let uv = pair_vec(u, v, field);
                let mut w: Vec<CycScalar> = v.iter().map(|a| a * &us).collect();
                for (wi, ri) in w.iter_mut().zip(r.to_scalars(field)) {
                    *wi += &(&ri * &uv);
                }
                self.emit_central(out, &w, &rs);
            }
            (Piece::Deriv(u, r), Piece::Deriv(v, s)) => {
                let rs = r + s;
                let us = pair(u, s, field);
                let vr = pair(v, r, field);
                let w: Vec<CycScalar> = v.iter().zip(u).map(|(vi, ui)| &(vi * &us) - &(ui * &vr)).collect();
                self.emit_deriv(out, &w, &rs);
                if self.fault != Fault::DropDerivationCocycle {
                    let c = &us * &vr;
                    if !c.is_zero() {
                        let k: Vec<CycScalar> = r.to_scalars(field).iter().map(|a| a * &c).collect();
                        self.emit_central(out, &k, &rs);
                    }
                }
            }
            (Piece::Loop(..), Piece::Central(..))
            | (Piece::Central(..), Piece::Loop(..))
            | (Piece::Central(..), Piece::Central(..)) => {}
        }
    }

    /// The Lie bracket of `tau` (in the current frame).
    pub fn bracket(&self, a: &TauElement, b: &TauElement) -> TauElement {
        let mut out = self.zero();
        let pb = self.pieces(b);
        for x in self.pieces(a) {
            for y in &pb {
                self.bracket_pieces(&mut out, &x, y);
            }
        }
        out
    }

    /// `[x, K(u, r)]` evaluated on the raw pair `(u, r)` before any reduction
    /// of `K(u, r)`; only the output is canonicalized.
    pub fn bracket_with_raw_central(&self, x: &TauElement, u: &[CycScalar], r: &Degree) -> Result<TauElement> {
        self.check_frame_lattice(r)?;
        if u.len() != self.n() {
            return Err(Error::Dimension("central vector length".into()));
        }
        let k = Piece::Central(u.to_vec(), r.clone());
        let mut out = self.zero();
        for p in self.pieces(x) {
            self.bracket_pieces(&mut out, &p, &k);
        }
        Ok(out)
    }

    /// `[[a,b],c] + [[b,c],a] + [[c,a],b]`.
    pub fn jacobi_residual(&self, a: &TauElement, b: &TauElement, c: &TauElement) -> TauElement {
        self.bracket(&self.bracket(a, b), c)
            .add(&self.bracket(&self.bracket(b, c), a))
            .add(&self.bracket(&self.bracket(c, a), b))
    }

    /// The invariant form: `(x(r)|y(-r)) = (x|y)`, `(D(u,0)|K(v,0)) = (u,v)`,
    /// `(h_r | K(s-bar, s)) = delta_{r,-s} (r-bar, s-bar)`, all else zero.
    pub fn bilinear_form(&self, a: &TauElement, b: &TauElement) -> CycScalar {
        let field = self.field();
        let mut acc = field.zero();
        for (r, x) in &a.loops {
            if let Some(y) = b.loops.get(&-r) {
                acc += &self.lie.form_eval(x, y);
            }
        }
        acc += &pair_vec(&a.deriv0, &b.central0, field);
        acc += &pair_vec(&a.central0, &b.deriv0, field);
        let ham_central = |h: &BTreeMap<Degree, CycScalar>, k: &BTreeMap<Degree, CycScalar>| {
            let mut s = field.zero();
            for (r, c) in h {
                let minus = -r;
                if let Some(d) = k.get(&minus) {
                    let rb = self.frame.pull(r).bar();
                    let sb = self.frame.pull(&minus).bar();
                    s += &(&(c * d) * &field.int(rb.dot(&sb).expect("equal lengths")));
                }
            }
            s
        };
        acc += &ham_central(&a.ham, &b.central);
        acc += &ham_central(&b.ham, &a.central);
        acc
    }

    /// The image of `x` under the automorphism `B`: the result lives in
    /// `self.twisted(B)`. Loop parts must land in the eigenspace of their
    /// new degree.
    pub fn twist(&self, b: &IntMatrix, x: &TauElement) -> Result<TauElement> {
        if b.size() != self.n() {
            return Err(Error::Dimension("twist matrix size".into()));
        }
        let frame = Frame::new(b.clone())?;
        let image = |r: &Degree| Degree(b.apply(&r.0));
        let mut out = self.zero();
        for (r, g) in &x.loops {
            let br = image(r);
            if !in_eigenspace(&self.auts, &self.lattice, g, &self.lattice.residue(&br), self.field())? {
                return Err(Error::Precondition(format!(
                    "twist moves {} from degree {r} to {br}, outside its eigenspace",
                    self.lie.format(g)
                )));
            }
            out.add_loop(&br, g);
        }
        for (r, c) in &x.central {
            out.add_central_coeff(&image(r), c);
        }
        for (r, c) in &x.ham {
            out.add_ham_coeff(&image(r), c);
        }
        let apply_vec = |m: &IntMatrix, u: &[CycScalar]| -> Vec<CycScalar> {
            (0..self.n())
                .map(|i| {
                    let mut s = self.field().zero();
                    for (j, uj) in u.iter().enumerate() {
                        let e = m.get(i, j);
                        if e != 0 {
                            s += &(uj * &self.field().int(e));
                        }
                    }
                    s
                })
                .collect()
        };
        out.add_central0(&apply_vec(b, &x.central0));
        out.add_deriv0(&apply_vec(frame.contragredient(), &x.deriv0));
        Ok(out)
    }

    pub fn pretty<'a>(&'a self, x: &'a TauElement) -> Pretty<'a> {
        Pretty { alg: self, x }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simple_lie::builtin::sl2;

    fn untwisted() -> TauAlgebra {
        let f = CyclotomicField::new(1).unwrap();
        let g = sl2(f).unwrap();
        let auts = AutomorphismSet::identity(&g, 2);
        TauAlgebra::new(g, auts, GradingLattice::new(vec![1, 1]).unwrap()).unwrap()
    }

    fn d(v: &[i64]) -> Degree {
        Degree(v.to_vec())
    }

    #[test]
    fn hamiltonian_bracket_example() {
        let t = untwisted();
        let f = t.field();
        let lhs = t.bracket(
            &t.hamiltonian(&d(&[1, 0])).unwrap(),
            &t.hamiltonian(&d(&[0, 1])).unwrap(),
        );
        let mut expected = t.zero();
        expected.add_ham_coeff(&d(&[1, 1]), &f.int(-1));
        expected.add_central_coeff(&d(&[1, 1]), &f.ratio(-1, 2));
        assert_eq!(lhs, expected);
    }

    #[test]
    fn canonicalization_examples() {
        let t = untwisted();
        let f = t.field();
        let r = d(&[1, 1]);
        assert!(t.central(&r.to_scalars(f), &r).unwrap().is_zero());
        let got = t.central_canonicalize(&[f.one(), f.zero()], &r).unwrap();
        assert_eq!(
            got,
            CentralTerm::Basis {
                degree: r.clone(),
                coeff: f.ratio(1, 2)
            }
        );
        let rb = r.bar().to_scalars(f);
        assert_eq!(
            t.central_canonicalize(&rb, &r).unwrap(),
            CentralTerm::Basis {
                degree: r,
                coeff: f.one()
            }
        );
    }

    #[test]
    fn loop_bracket_produces_central_term() {
        let t = untwisted();
        let f = t.field();
        let e = t.loop_elem(&t.lie().basis(0), &d(&[1, 0])).unwrap();
        let fm = t.loop_elem(&t.lie().basis(1), &d(&[-1, 0])).unwrap();
        let mut expected = t.loop_elem(&t.lie().basis(2), &d(&[0, 0])).unwrap();
        expected.add_central0(&[f.one(), f.zero()]);
        assert_eq!(t.bracket(&e, &fm), expected);
        assert!(t.bracket(&t.k(0).unwrap(), &e).is_zero());
    }

    #[test]
    fn form_examples() {
        let t = untwisted();
        let f = t.field();
        let h = t.hamiltonian(&d(&[1, 0])).unwrap();
        let k = t.central(&d(&[0, 1]).to_scalars(f), &d(&[-1, 0])).unwrap();
        assert_eq!(t.bilinear_form(&h, &k), f.int(-1));
        assert_eq!(t.bilinear_form(&t.d(0).unwrap(), &t.k(0).unwrap()), f.one());
        assert!(t.bilinear_form(&t.d(0).unwrap(), &t.k(1).unwrap()).is_zero());
    }

    #[test]
    fn twist_by_identity_is_identity() {
        let t = untwisted();
        let x = t
            .hamiltonian(&d(&[2, -1]))
            .unwrap()
            .add(&t.loop_elem(&t.lie().basis(0), &d(&[1, 3])).unwrap())
            .add(&t.d(1).unwrap());
        assert_eq!(t.twist(&IntMatrix::identity(2), &x).unwrap(), x);
    }
}
