//! Seeded random sampling of degrees and homogeneous basis elements of `tau`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::Degree;
use crate::tau::{TauAlgebra, TauElement};

/// Independent generator for sample `index` under a master seed.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The five kinds of homogeneous basis elements.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisKind {
    Loop,
    Hamiltonian,
    Central,
    Derivation0,
    Central0,
}

impl BasisKind {
    pub const ALL: [BasisKind; 5] = [
        BasisKind::Loop,
        BasisKind::Hamiltonian,
        BasisKind::Central,
        BasisKind::Derivation0,
        BasisKind::Central0,
    ];
}

/// Draws degrees from `[-radius, radius]^n` and `Gamma-bar` degrees as
/// `m_i * [-gamma_radius, gamma_radius]`.
pub struct Sampler<'a> {
    alg: &'a TauAlgebra,
    pub radius: i64,
    pub gamma_radius: i64,
}

impl<'a> Sampler<'a> {
    pub fn new(alg: &'a TauAlgebra) -> Self {
        Self {
            alg,
            radius: 3,
            gamma_radius: 2,
        }
    }

    pub fn degree<R: Rng>(&self, rng: &mut R) -> Degree {
        Degree(
            (0..self.alg.n())
                .map(|_| rng.gen_range(-self.radius..=self.radius))
                .collect(),
        )
    }

    pub fn gamma_bar<R: Rng>(&self, rng: &mut R) -> Degree {
        Degree(
            self.alg
                .lattice()
                .orders()
                .iter()
                .map(|&m| m as i64 * rng.gen_range(-self.gamma_radius..=self.gamma_radius))
                .collect(),
        )
    }

    pub fn gamma_bar_nonzero<R: Rng>(&self, rng: &mut R) -> Degree {
        loop {
            let r = self.gamma_bar(rng);
            if !r.is_zero() {
                return r;
            }
        }
    }

    /// Loop degree with a nonempty eigenspace, and a basis vector of it.
    pub fn loop_basis<R: Rng>(&self, rng: &mut R) -> TauElement {
        loop {
            let r = self.degree(rng);
            let class = self.alg.lattice().residue(&r);
            if let Some(x) = self.alg.eigen().eigenspace(&class).choose(rng) {
                return self.alg.loop_elem(x, &r).expect("eigenspace basis vector");
            }
        }
    }

    pub fn basis_of_kind<R: Rng>(&self, rng: &mut R, kind: BasisKind) -> TauElement {
        let n = self.alg.n();
        match kind {
            BasisKind::Loop => self.loop_basis(rng),
            BasisKind::Hamiltonian => self
                .alg
                .hamiltonian(&self.gamma_bar_nonzero(rng))
                .expect("Gamma-bar degree"),
            BasisKind::Central => {
                let r = self.gamma_bar_nonzero(rng);
                self.alg.central_basis(&r).expect("Gamma-bar degree").remove(0)
            }
            BasisKind::Derivation0 => self.alg.d(rng.gen_range(0..n)).expect("index"),
            BasisKind::Central0 => self.alg.k(rng.gen_range(0..n)).expect("index"),
        }
    }

    /// A random basis element: loop 40%, Hamiltonian 25%, central 15%,
    /// `d_i` 10%, `K_i` 10%.
    pub fn basis_element<R: Rng>(&self, rng: &mut R) -> TauElement {
        let kind = match rng.gen_range(0..100) {
            0..=39 => BasisKind::Loop,
            40..=64 => BasisKind::Hamiltonian,
            65..=79 => BasisKind::Central,
            80..=89 => BasisKind::Derivation0,
            _ => BasisKind::Central0,
        };
        self.basis_of_kind(rng, kind)
    }

    /// A short combination of basis elements with small integer coefficients.
    pub fn element<R: Rng>(&self, rng: &mut R, terms: usize) -> TauElement {
        let f = self.alg.field();
        let mut out = self.alg.zero();
        for _ in 0..terms {
            let c = loop {
                let c = rng.gen_range(-3i64..=3);
                if c != 0 {
                    break c;
                }
            };
            out = out.add(&self.basis_element(rng).scale(&f.int(c)));
        }
        out
    }
}
