//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use healie::checks::{default_points, run_suite, twist_matrices, CheckOptions, Suite};
use healie::config::{AlgebraConfig, LoadedConfig};
use healie::lattice::{Degree, GradingLattice};
use healie::linalg::Mat;
use healie::repr::{EvaluationMap, HPrimeAction, JetGenerator, JetModule, JetVector, RankOneConvention, SpModule};
use healie::sample::{sample_rng, Sampler};
use healie::scalar::{CycScalar, CyclotomicField};
use healie::structure::triangular_class;
use healie::tau::{CentralTerm, Fault};

const SEED: u64 = 20_261_016;
const BUDGET: Duration = Duration::from_secs(60);
const CONFIGS: [&str; 3] = ["sl2_untwisted", "sl2_twisted", "sl3_twisted"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn load(name: &str) -> LoadedConfig {
    AlgebraConfig::load(name)
        .and_then(|c| c.build())
        .expect("preset builds")
}

fn opts(samples: usize) -> CheckOptions {
    CheckOptions {
        samples: Some(samples),
        seed: SEED,
        ..CheckOptions::default()
    }
}

fn suite_on(names: &[&str], suite: Suite, samples: usize, fault: Fault) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        let alg = load(name).algebra.with_fault(fault);
        let r = run_suite(&alg, suite, &opts(samples)).expect("suite runs");
        ok &= r.ok();
        parts.push(format!("{name} {}", r.summary()));
    }
    (ok, parts)
}

fn c1_jacobi() -> Outcome {
    let t = Instant::now();
    let (ok, parts) = suite_on(&CONFIGS, Suite::Jacobi, 1000, Fault::None);
    let el = t.elapsed();
    outcome(
        ok && el < BUDGET,
        format!("{}; {:.1}s", parts.join(", "), el.as_secs_f64()),
    )
}

fn c2_central_dims() -> Outcome {
    let mut ok = true;
    let mut checked = 0;
    for name in CONFIGS {
        let alg = load(name).algebra;
        let field = alg.field();
        let n = alg.n();
        let s = Sampler::new(&alg);
        let mut rng = sample_rng(SEED, 2);
        ok &= alg
            .central_basis(&Degree::zero(n))
            .map(|b| b.len() == n)
            .unwrap_or(false);
        for _ in 0..50 {
            let r = s.gamma_bar_nonzero(&mut rng);
            let basis = alg.central_basis(&r).expect("Gamma-bar degree");
            // K(r-bar, r) spans, and every u orthogonal to r-bar lies in K(m).
            let rb = r.bar();
            let spans = basis.len() == 1
                && matches!(
                    alg.central_canonicalize(&rb.to_scalars(field), &r),
                    Ok(CentralTerm::Basis { ref coeff, .. }) if !coeff.is_zero()
                );
            let killed = (0..n).all(|i| {
                let e = Degree::unit(n, i);
                let (ei, ri) = (e.dot(&rb).unwrap(), rb.dot(&rb).unwrap());
                let u: Vec<i64> = (0..n).map(|j| ri * e.0[j] - ei * rb.0[j]).collect();
                alg.central(&Degree(u).to_scalars(field), &r)
                    .map(|x| x.is_zero())
                    .unwrap_or(false)
            });
            ok &= spans && killed;
            checked += 1;
        }
    }
    outcome(
        ok,
        format!(
            "{checked} nonzero degrees, degree 0 dim = n on {} configs",
            CONFIGS.len()
        ),
    )
}

fn c3_ideal() -> Outcome {
    let (ok, parts) = suite_on(&CONFIGS, Suite::Ideal, 200, Fault::None);
    outcome(ok, parts.join(", "))
}

fn c4_form() -> Outcome {
    let (ok, parts) = suite_on(&CONFIGS, Suite::Form, 500, Fault::None);
    outcome(ok, parts.join(", "))
}

fn c5_triangular() -> Outcome {
    // Every homogeneous basis vector over a box of degrees gets a class, and
    // all five classes occur.
    let mut ok = true;
    let mut classified = 0;
    for name in CONFIGS {
        let alg = load(name).algebra;
        let n = alg.n();
        let radius: i64 = if n == 2 { 3 } else { 1 };
        let mut seen = BTreeSet::new();
        let mut basis = Vec::new();
        for i in 0..n {
            basis.push(alg.d(i).unwrap());
            basis.push(alg.k(i).unwrap());
        }
        for r in degree_box(n, radius) {
            let class = alg.lattice().residue(&r);
            for x in alg.eigen().eigenspace(&class) {
                basis.push(alg.loop_elem(x, &r).unwrap());
            }
            if !r.is_zero() && alg.lattice().in_gamma_bar(&r) {
                basis.push(alg.hamiltonian(&r).unwrap());
                basis.extend(alg.central_basis(&r).unwrap());
            }
        }
        for x in &basis {
            match triangular_class(&alg, x) {
                Ok(c) => {
                    seen.insert(c);
                }
                Err(_) => ok = false,
            }
            classified += 1;
        }
        ok &= seen.len() == 5;
    }
    let (inc, parts) = suite_on(&CONFIGS, Suite::Triangular, 300, Fault::None);
    outcome(
        ok && inc,
        format!("partition over {classified} basis vectors; {}", parts.join(", ")),
    )
}

fn degree_box(n: usize, radius: i64) -> Vec<Degree> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (-radius..=radius).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(Degree).collect()
}

fn c6_twist() -> Outcome {
    let names = ["sl2_untwisted", "sl3_twisted"];
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        let alg = load(name).algebra;
        let (mats, skipped) = twist_matrices(&alg, SEED);
        ok &= skipped.is_empty() && mats.len() == 4;
        let r = run_suite(&alg, Suite::Twist, &opts(300)).unwrap();
        ok &= r.ok();
        parts.push(format!("{name} {} with {} matrices", r.summary(), mats.len()));
    }
    outcome(ok, parts.join(", "))
}

/// `r-bar = (r_{k+1..n}, -r_{1..k})`, computed without the engine.
fn bar(r: &[i64]) -> Vec<i64> {
    let k = r.len() / 2;
    r[k..].iter().copied().chain(r[..k].iter().map(|x| -x)).collect()
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn as_q(c: &CycScalar) -> BigRational {
    c.as_rational().expect("rational entry")
}

/// `rho(I_r)` from the closed formula: `r r-bar^t` on the natural module plus
/// `(r-bar, zeta)` on the diagonal.
fn oracle_operator(natural: bool, r: &[i64], zeta: &[BigRational]) -> Vec<Vec<BigRational>> {
    let rb = bar(r);
    let shift: BigRational = rb.iter().zip(zeta).map(|(a, z)| q(*a) * z).sum();
    let d = if natural { r.len() } else { 1 };
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let rank_one = if natural { q(r[i] * rb[j]) } else { q(0) };
                    if i == j {
                        rank_one + &shift
                    } else {
                        rank_one
                    }
                })
                .collect()
        })
        .collect()
}

fn mat_q(m: &Mat) -> Vec<Vec<BigRational>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(as_q).collect()).collect()
}

fn mul_q(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

fn gamma_bar_sample<R: Rng>(rng: &mut R, lattice: &GradingLattice) -> Degree {
    Degree(
        lattice
            .orders()
            .iter()
            .map(|&m| m as i64 * rng.gen_range(-3..=3))
            .collect(),
    )
}

fn module_lattices() -> Vec<GradingLattice> {
    vec![
        GradingLattice::new(vec![2, 1]).unwrap(),
        GradingLattice::new(vec![3, 1, 1, 1]).unwrap(),
    ]
}

/// Runs the module axiom on trivial, natural sp_2 and natural sp_4 and returns
/// (samples, failures); `oracle` also compares operators to the closed formula.
fn hprime_axiom(convention: RankOneConvention, oracle: bool) -> (usize, usize) {
    let mut samples = 0;
    let mut failures = 0;
    for lattice in module_lattices() {
        let n = lattice.n();
        let field = CyclotomicField::for_orders(lattice.orders()).unwrap();
        let mut modules = vec![SpModule::Natural { n }];
        if n == 2 {
            modules.push(SpModule::Trivial { n });
        }
        for module in modules {
            for i in 0..200u64 {
                let mut rng = sample_rng(SEED, 7_000 + i);
                let zeta_q: Vec<BigRational> = if i % 2 == 0 {
                    vec![q(0); n]
                } else {
                    (0..n)
                        .map(|_| {
                            BigRational::new(BigInt::from(rng.gen_range(-5..=5)), BigInt::from(rng.gen_range(1..=3)))
                        })
                        .collect()
                };
                let zeta: Vec<CycScalar> = zeta_q.iter().map(|z| field.from_rational(z.clone())).collect();
                let act = HPrimeAction::new(module, zeta, lattice.clone(), field)
                    .unwrap()
                    .with_convention(convention);
                let (r, s) = (
                    gamma_bar_sample(&mut rng, &lattice),
                    gamma_bar_sample(&mut rng, &lattice),
                );
                samples += 1;
                let mut bad = !act.axiom_residual(&r, &s).unwrap().is_zero();
                if oracle {
                    let natural = matches!(module, SpModule::Natural { .. });
                    let (or, os) = (
                        oracle_operator(natural, &r.0, &zeta_q),
                        oracle_operator(natural, &s.0, &zeta_q),
                    );
                    let rs: Vec<i64> = r.0.iter().zip(&s.0).map(|(a, b)| a + b).collect();
                    let ors = oracle_operator(natural, &rs, &zeta_q);
                    let c = q(bar(&r.0).iter().zip(&s.0).map(|(a, b)| a * b).sum());
                    let (ab, ba) = (mul_q(&or, &os), mul_q(&os, &or));
                    let d = or.len();
                    for a in 0..d {
                        for b in 0..d {
                            let lhs = &c * (&ors[a][b] - &or[a][b] - &os[a][b]);
                            bad |= lhs != &ab[a][b] - &ba[a][b];
                        }
                    }
                    bad |= mat_q(&act.operator(&r).unwrap()) != or;
                }
                failures += bad as usize;
            }
        }
    }
    (samples, failures)
}

fn c7_hprime() -> Outcome {
    let (samples, failures) = hprime_axiom(RankOneConvention::ColumnRow, true);
    outcome(
        failures == 0,
        format!("{}/{samples} zero residuals", samples - failures),
    )
}

fn c8_jet() -> Outcome {
    let mut samples = 0;
    let mut failures = 0;
    for lattice in module_lattices() {
        let n = lattice.n();
        let field = CyclotomicField::for_orders(lattice.orders()).unwrap();
        for module in [SpModule::Trivial { n }, SpModule::Natural { n }] {
            for i in 0..200u64 {
                let mut rng = sample_rng(SEED, 8_000 + i);
                let rv = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<CycScalar> {
                    (0..n)
                        .map(|_| field.ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
                        .collect()
                };
                let (alpha, beta) = (rv(&mut rng), rv(&mut rng));
                let jm = JetModule::new(module, alpha, beta, lattice.clone(), field).unwrap();
                let gen = |rng: &mut rand_chacha::ChaCha8Rng| match rng.gen_range(0..3) {
                    0 => loop {
                        let r = gamma_bar_sample(rng, &lattice);
                        if !r.is_zero() {
                            break JetGenerator::Hamiltonian(r);
                        }
                    },
                    1 => JetGenerator::Derivation(rv(rng)),
                    _ => JetGenerator::Monomial(gamma_bar_sample(rng, &lattice)),
                };
                let (a, b) = (gen(&mut rng), gen(&mut rng));
                let k = gamma_bar_sample(&mut rng, &lattice);
                let mut w = vec![field.zero(); module.dim()];
                w[rng.gen_range(0..module.dim())] = field.one();
                samples += 1;
                failures += !jm.axiom_residual(&a, &b, &JetVector::single(k, w)).unwrap().is_zero() as usize;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{}/{samples} zero residuals", samples - failures),
    )
}

fn c9_evaluation() -> Outcome {
    let mut ok = true;
    let mut samples = 0;
    for name in CONFIGS {
        let alg = load(name).algebra;
        let field = alg.field();
        let s = Sampler::new(&alg);
        for l in [1, 2] {
            let ev = EvaluationMap::new(alg.lattice(), default_points(alg.lattice(), field, l)).unwrap();
            for i in 0..100u64 {
                let mut rng = sample_rng(SEED, 9_000 + i);
                let (x, y) = (s.loop_basis(&mut rng), s.loop_basis(&mut rng));
                let res = ev.homomorphism_residual(&alg, &x, &y).unwrap();
                ok &= res.iter().all(|g| g.is_zero());
                samples += 1;
            }
        }
    }
    // a and -a have equal squares in a slot of order 2.
    let twisted = load("sl2_twisted").algebra;
    let f = twisted.field();
    let bad = vec![vec![f.int(1), f.int(-1)], vec![f.int(1), f.int(2)]];
    let rejected = EvaluationMap::new(twisted.lattice(), bad).is_err();
    outcome(
        ok && rejected,
        format!("{samples} pairs for l = 1, 2; separation violation rejected: {rejected}"),
    )
}

fn c10_negative_controls() -> Outcome {
    let t = Instant::now();
    // (a) one structure constant off by one.
    let cfg = AlgebraConfig::from_json(include_str!("../../../configs/sl2_corrupted.json")).unwrap();
    let rejected = cfg.build().is_err();
    let corrupted = cfg.build_unchecked().unwrap().algebra;
    let a = run_suite(&corrupted, Suite::Jacobi, &opts(1000)).unwrap();
    let a_fails = rejected && !a.ok();
    // (b) the derivation cocycle removed.
    let (b_ok, b_parts) = suite_on(&CONFIGS, Suite::Jacobi, 1000, Fault::DropDerivationCocycle);
    let b_fails = !b_ok;
    // (c) the transposed rank-one convention.
    let (samples, failures) = hprime_axiom(RankOneConvention::RowColumn, false);
    let c_fails = failures > 0;
    let el = t.elapsed();
    outcome(
        a_fails && b_fails && c_fails && el < BUDGET,
        format!(
            "(a) load rejected: {rejected}, unchecked suite {} -> {}; (b) cocycle dropped: {} -> {}; (c) transposed rank-one: {failures}/{samples} failing -> {}; {:.1}s",
            a.summary(),
            if a_fails { "fails as required" } else { "did not fail" },
            b_parts.join(", "),
            if b_fails { "fails as required" } else { "did not fail" },
            if c_fails { "fails as required" } else { "did not fail" },
            el.as_secs_f64()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 Lie-algebra validity (Jacobi)", c1_jacobi),
        ("2 central dimensions", c2_central_dims),
        ("3 ideal property", c3_ideal),
        ("4 bilinear form", c4_form),
        ("5 triangular decomposition", c5_triangular),
        ("6 twist", c6_twist),
        ("7 H' module axiom", c7_hprime),
        ("8 jet-module axiom", c8_jet),
        ("9 evaluation map", c9_evaluation),
        ("10 negative controls", c10_negative_controls),
    ];
    let mut all = true;
    for (name, run) in criteria {
        let o = run();
        all &= o.pass;
        println!(
            "criterion {name}: {} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
