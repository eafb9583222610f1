//! Seeded property suites over a configured algebra. Each sample draws from
//! its own generator derived from the master seed, so reports do not depend
//! on scheduling.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{Degree, GradingLattice};
use crate::repr::{EvaluationMap, HPrimeAction, JetGenerator, JetModule, JetVector, RankOneConvention, SpModule};
use crate::sample::{sample_rng, Sampler};
use crate::scalar::{CycScalar, CyclotomicField};
use crate::serial::{element_to_json, scalars_to_json};
use crate::structure::{classify_root, homogeneous_components, triangular_class, TriangularClass, TwistMatrix};
use crate::tau::{TauAlgebra, TauElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Jacobi,
    Form,
    Ideal,
    Triangular,
    Twist,
    Modules,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Jacobi,
        Suite::Form,
        Suite::Ideal,
        Suite::Triangular,
        Suite::Twist,
        Suite::Modules,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Jacobi => "jacobi",
            Suite::Form => "form",
            Suite::Ideal => "ideal",
            Suite::Triangular => "triangular",
            Suite::Twist => "twist",
            Suite::Modules => "modules",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn default_samples(self) -> usize {
        match self {
            Suite::Jacobi => 1000,
            Suite::Form => 500,
            Suite::Ideal => 200,
            Suite::Triangular => 300,
            Suite::Twist => 300,
            Suite::Modules => 200,
        }
    }

    fn salt(self) -> u64 {
        (Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64 + 1) << 40
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub samples: Option<usize>,
    pub seed: u64,
    pub convention: RankOneConvention,
    /// Failures kept verbatim in the report.
    pub max_failures: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            samples: None,
            seed: 0,
            convention: RankOneConvention::ColumnRow,
            max_failures: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub sample: u64,
    pub property: String,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub samples: usize,
    pub passed: usize,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.passed == self.samples
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {}/{}",
            if self.ok() { "PASS" } else { "FAIL" },
            self.passed,
            self.samples
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "status": if self.ok() { "PASS" } else { "FAIL" },
            "samples": self.samples,
            "passed": self.passed,
            "failures": self.failures.iter().map(|f| json!({
                "sample": f.sample,
                "property": f.property,
                "detail": f.detail,
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

type SampleResult = Vec<(String, Value)>;

fn fail(out: &mut SampleResult, property: &str, detail: Value) {
    out.push((property.to_string(), detail));
}

fn rational_vector<R: Rng>(rng: &mut R, field: CyclotomicField, n: usize) -> Vec<CycScalar> {
    (0..n)
        .map(|_| field.ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4)))
        .collect()
}

/// Runs one suite and collects the report.
pub fn run_suite(alg: &TauAlgebra, suite: Suite, opts: &CheckOptions) -> Result<SuiteReport> {
    let samples = opts.samples.unwrap_or_else(|| suite.default_samples());
    let mut notes = Vec::new();
    let twists = if suite == Suite::Twist {
        let (list, skipped) = twist_matrices(alg, opts.seed);
        notes.extend(skipped);
        list
    } else {
        Vec::new()
    };
    let results: Vec<SampleResult> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(opts.seed, suite.salt() | i);
            let run = match suite {
                Suite::Jacobi => jacobi_sample(alg, &mut rng),
                Suite::Form => form_sample(alg, &mut rng),
                Suite::Ideal => ideal_sample(alg, &mut rng),
                Suite::Triangular => triangular_sample(alg, &mut rng),
                Suite::Twist => twist_sample(alg, &twists, &mut rng),
                Suite::Modules => modules_sample(alg, opts.convention, &mut rng),
            };
            run.unwrap_or_else(|e| vec![("error".to_string(), json!(e.to_string()))])
        })
        .collect();
    let mut failures = Vec::new();
    let mut passed = 0;
    for (i, r) in results.into_iter().enumerate() {
        if r.is_empty() {
            passed += 1;
        }
        for (property, detail) in r {
            if failures.len() < opts.max_failures {
                failures.push(Failure {
                    sample: i as u64,
                    property,
                    detail,
                });
            }
        }
    }
    Ok(SuiteReport {
        suite,
        samples,
        passed,
        failures,
        notes,
    })
}

fn jacobi_sample<R: Rng>(alg: &TauAlgebra, rng: &mut R) -> Result<SampleResult> {
    let s = Sampler::new(alg);
    let (a, b, c) = (s.basis_element(rng), s.basis_element(rng), s.basis_element(rng));
    let mut out = SampleResult::new();
    let res = alg.jacobi_residual(&a, &b, &c);
    let triple = |extra: Value| {
        json!({
            "a": element_to_json(alg, &a),
            "b": element_to_json(alg, &b),
            "c": element_to_json(alg, &c),
            "residual": extra,
        })
    };
    if !res.is_zero() {
        fail(&mut out, "jacobi", triple(element_to_json(alg, &res)));
    }
    let ab = alg.bracket(&a, &b);
    let anti = ab.add(&alg.bracket(&b, &a));
    if !anti.is_zero() {
        fail(&mut out, "antisymmetry", triple(element_to_json(alg, &anti)));
    }
    if !ab.is_zero() {
        let expected = &a.degree().expect("basis") + &b.degree().expect("basis");
        if ab.degree() != Some(expected.clone()) {
            fail(
                &mut out,
                "grading",
                triple(json!({ "expected": expected, "got": ab.degrees() })),
            );
        }
    }
    Ok(out)
}

fn form_sample<R: Rng>(alg: &TauAlgebra, rng: &mut R) -> Result<SampleResult> {
    let s = Sampler::new(alg);
    let (a, b, c) = (s.basis_element(rng), s.basis_element(rng), s.basis_element(rng));
    let mut out = SampleResult::new();
    let detail = |l: &CycScalar, r: &CycScalar| {
        json!({
            "a": element_to_json(alg, &a),
            "b": element_to_json(alg, &b),
            "c": element_to_json(alg, &c),
            "lhs": l.to_string(),
            "rhs": r.to_string(),
        })
    };
    let (ab, ba) = (alg.bilinear_form(&a, &b), alg.bilinear_form(&b, &a));
    if ab != ba {
        fail(&mut out, "symmetry", detail(&ab, &ba));
    }
    let lhs = alg.bilinear_form(&alg.bracket(&a, &b), &c);
    let rhs = alg.bilinear_form(&a, &alg.bracket(&b, &c));
    if lhs != rhs {
        fail(&mut out, "invariance", detail(&lhs, &rhs));
    }
    let r = s.gamma_bar_nonzero(rng);
    let h = alg.hamiltonian(&r)?;
    let k = alg.central_basis(&-&r)?.remove(0);
    if alg.bilinear_form(&h, &k).is_zero() {
        fail(&mut out, "nondegenerate-pairing", json!({ "degree": r }));
    }
    Ok(out)
}

fn ideal_sample<R: Rng>(alg: &TauAlgebra, rng: &mut R) -> Result<SampleResult> {
    let s = Sampler::new(alg);
    let field = alg.field();
    let n = alg.n();
    let x = s.basis_element(rng);
    let r = s.gamma_bar_nonzero(rng);
    let rb = r.bar();
    let u = Degree((0..n).map(|_| rng.gen_range(-3..=3)).collect());
    // u' = |r|^2 u - (u, r-bar) r-bar satisfies (u', r-bar) = 0.
    let norm = rb.dot(&rb)?;
    let ur = u.dot(&rb)?;
    let member = Degree(u.0.iter().zip(&rb.0).map(|(a, b)| norm * a - ur * b).collect());
    let mv = member.to_scalars(field);
    let mut out = SampleResult::new();
    if !alg.central(&mv, &r)?.is_zero() {
        fail(&mut out, "membership", json!({ "u": member, "degree": r }));
    }
    let res = alg.bracket_with_raw_central(&x, &mv, &r)?;
    if !res.is_zero() {
        fail(
            &mut out,
            "ideal",
            json!({
                "x": element_to_json(alg, &x),
                "u": member,
                "degree": r,
                "bracket": element_to_json(alg, &res),
            }),
        );
    }
    let dim = alg.central_basis(&r)?.len();
    let dim0 = alg.central_basis(&Degree::zero(n))?.len();
    if dim != 1 || dim0 != n {
        fail(
            &mut out,
            "central-dimension",
            json!({ "degree": r, "dim": dim, "dim0": dim0 }),
        );
    }
    Ok(out)
}

/// Draws basis elements until one lands in one of `classes`.
fn draw_in<R: Rng>(alg: &TauAlgebra, rng: &mut R, classes: &[TriangularClass]) -> Result<Option<TauElement>> {
    let s = Sampler::new(alg);
    for _ in 0..1000 {
        let x = s.basis_element(rng);
        if classes.contains(&triangular_class(alg, &x)?) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn classes_of(alg: &TauAlgebra, x: &TauElement) -> Result<Vec<TriangularClass>> {
    homogeneous_components(alg, x)
        .iter()
        .map(|(root, _)| classify_root(alg, root))
        .collect()
}

/// `[left, right]` must lie in the sum of `target`.
type InclusionRule = (
    &'static [TriangularClass],
    &'static [TriangularClass],
    &'static [TriangularClass],
    &'static str,
);

fn triangular_sample<R: Rng>(alg: &TauAlgebra, rng: &mut R) -> Result<SampleResult> {
    use TriangularClass::*;
    let mut out = SampleResult::new();
    // Partition: every basis element gets exactly one class.
    let s = Sampler::new(alg);
    let b = s.basis_element(rng);
    if let Err(e) = triangular_class(alg, &b) {
        fail(
            &mut out,
            "partition",
            json!({ "x": element_to_json(alg, &b), "error": e.to_string() }),
        );
    }
    let rules: [InclusionRule; 4] = [
        (&[PlusPlus], &[Minus, Plus], &[PlusPlus], "[++, - + +] in ++"),
        (&[MinusMinus], &[Minus, Plus], &[MinusMinus], "[--, - + +] in --"),
        (&[Plus], &[Plus], &[PlusPlus, Plus], "[+, +] in ++ + +"),
        (&[Zero], &[Zero], &[Zero], "[0, 0] in 0"),
    ];
    for (left, right, target, name) in rules {
        let (Some(x), Some(y)) = (draw_in(alg, rng, left)?, draw_in(alg, rng, right)?) else {
            continue;
        };
        let z = alg.bracket(&x, &y);
        let got = classes_of(alg, &z)?;
        if got.iter().any(|c| !target.contains(c)) {
            fail(
                &mut out,
                name,
                json!({
                    "x": element_to_json(alg, &x),
                    "y": element_to_json(alg, &y),
                    "bracket": element_to_json(alg, &z),
                    "classes": got.iter().map(ToString::to_string).collect::<Vec<_>>(),
                }),
            );
        }
    }
    Ok(out)
}

/// `I`, `B_(n,n)(1)`, `B_(n,n)(2)` and one random class-preserving matrix;
/// matrices that would move eigenspace classes are reported and skipped.
pub fn twist_matrices(alg: &TauAlgebra, seed: u64) -> (Vec<TwistMatrix>, Vec<String>) {
    let n = alg.n();
    let mut rng = sample_rng(seed, Suite::Twist.salt() - 1);
    let candidates = vec![
        TwistMatrix::identity(n),
        TwistMatrix::b_nn(n, 1).expect("a = 1"),
        TwistMatrix::b_nn(n, 2).expect("a = 2"),
        TwistMatrix::random_compatible(&mut rng, alg.lattice(), 4),
    ];
    let mut keep = Vec::new();
    let mut skipped = Vec::new();
    for b in candidates {
        if b.preserves_classes(alg.lattice()) {
            keep.push(b);
        } else {
            skipped.push(format!(
                "B = {b} skipped: it moves eigenspace classes of this configuration"
            ));
        }
    }
    (keep, skipped)
}

fn twist_sample<R: Rng>(alg: &TauAlgebra, twists: &[TwistMatrix], rng: &mut R) -> Result<SampleResult> {
    let s = Sampler::new(alg);
    let mut out = SampleResult::new();
    for b in twists {
        let (x, y) = (s.basis_element(rng), s.basis_element(rng));
        let target = alg.twisted(b.matrix())?;
        let lhs = alg.twist(b.matrix(), &alg.bracket(&x, &y))?;
        let rhs = target.bracket(&alg.twist(b.matrix(), &x)?, &alg.twist(b.matrix(), &y)?);
        if lhs != rhs {
            fail(
                &mut out,
                "bracket-preservation",
                json!({
                    "B": b.to_string(),
                    "x": element_to_json(alg, &x),
                    "y": element_to_json(alg, &y),
                    "lhs": element_to_json(&target, &lhs),
                    "rhs": element_to_json(&target, &rhs),
                }),
            );
        }
        let b2 = &twists[rng.gen_range(0..twists.len())];
        let inner = alg.twist(b2.matrix(), &x)?;
        let stepwise = alg.twisted(b2.matrix())?.twist(b.matrix(), &inner)?;
        let direct = alg.twist(b.compose(b2).matrix(), &x)?;
        if stepwise != direct {
            fail(
                &mut out,
                "composition",
                json!({ "B1": b.to_string(), "B2": b2.to_string(), "x": element_to_json(alg, &x) }),
            );
        }
    }
    Ok(out)
}

fn modules_sample<R: Rng>(alg: &TauAlgebra, convention: RankOneConvention, rng: &mut R) -> Result<SampleResult> {
    let mut out = SampleResult::new();
    let field = alg.field();
    let n = alg.n();
    let lattice = alg.lattice().clone();
    let s = Sampler::new(alg);
    let zero_zeta = rng.gen_bool(0.5);
    let zeta = if zero_zeta {
        vec![field.zero(); n]
    } else {
        rational_vector(rng, field, n)
    };
    let (r, q) = (s.gamma_bar(rng), s.gamma_bar(rng));
    for module in [SpModule::Trivial { n }, SpModule::Natural { n }] {
        let act = HPrimeAction::new(module, zeta.clone(), lattice.clone(), field)?.with_convention(convention);
        if !act.axiom_residual(&r, &q)?.is_zero() {
            fail(
                &mut out,
                "hprime-module",
                json!({ "module": format!("{module:?}"), "r": r, "s": q, "zeta": scalars_to_json(&zeta) }),
            );
        }
    }
    for module in [SpModule::Trivial { n }, SpModule::Natural { n }] {
        let mut jm = JetModule::new(
            module,
            rational_vector(rng, field, n),
            rational_vector(rng, field, n),
            lattice.clone(),
            field,
        )?;
        jm.convention = convention;
        let (a, b) = (jet_generator(&s, rng, field), jet_generator(&s, rng, field));
        let k = s.gamma_bar(rng);
        let mut w = vec![field.zero(); module.dim()];
        w[rng.gen_range(0..module.dim())] = field.one();
        let v = JetVector::single(k.clone(), w);
        let res = jm.axiom_residual(&a, &b, &v)?;
        if !res.is_zero() {
            fail(
                &mut out,
                "jet-module",
                json!({ "module": format!("{module:?}"), "a": format!("{a:?}"), "b": format!("{b:?}"), "k": k }),
            );
        }
    }
    for l in [1usize, 2] {
        let ev = EvaluationMap::new(&lattice, default_points(&lattice, field, l))?;
        let (x, y) = (s.loop_basis(rng), s.loop_basis(rng));
        let res = ev.homomorphism_residual(alg, &x, &y)?;
        if res.iter().any(|g| !g.is_zero()) {
            fail(
                &mut out,
                "evaluation-map",
                json!({ "l": l, "x": element_to_json(alg, &x), "y": element_to_json(alg, &y) }),
            );
        }
    }
    Ok(out)
}

/// `l` points per slot, `a_{i,j} = j + 1`, which satisfy the separation condition.
pub fn default_points(lattice: &GradingLattice, field: CyclotomicField, l: usize) -> Vec<Vec<CycScalar>> {
    (0..lattice.n())
        .map(|_| (0..l).map(|j| field.int(j as i64 + 1)).collect())
        .collect()
}

fn jet_generator<R: Rng>(s: &Sampler<'_>, rng: &mut R, field: CyclotomicField) -> JetGenerator {
    match rng.gen_range(0..3) {
        0 => JetGenerator::Hamiltonian(s.gamma_bar_nonzero(rng)),
        1 => {
            let n = s.gamma_bar(rng).len();
            JetGenerator::Derivation(rational_vector(rng, field, n))
        }
        _ => JetGenerator::Monomial(s.gamma_bar(rng)),
    }
}

/// Runs `suite`, or every suite for `None`.
pub fn run_suites(alg: &TauAlgebra, suite: Option<Suite>, opts: &CheckOptions) -> Result<Vec<SuiteReport>> {
    match suite {
        Some(s) => Ok(vec![run_suite(alg, s, opts)?]),
        None => Suite::ALL.iter().map(|&s| run_suite(alg, s, opts)).collect(),
    }
}

pub fn parse_suite(s: &str) -> Result<Option<Suite>> {
    if s == "all" {
        return Ok(None);
    }
    Suite::parse(s).map(Some).ok_or_else(|| {
        Error::Config(format!(
            "unknown suite {s:?}; expected one of jacobi, form, ideal, triangular, twist, modules, all"
        ))
    })
}
