//! Seeded generators of random test instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fock::{FockVector, ModeIndex, ModeMap, MultiIndex, Truncation};
use crate::scalar::{ratio, Rational};

/// A generator for instance `stream` of a suite seeded with `seed`.
pub fn instance_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Nonzero rational `p/q` with `|p| ≤ max_num`, `1 ≤ q ≤ max_den`.
pub fn random_rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Rational {
    loop {
        let p = rng.random_range(-max_num..=max_num);
        if p != 0 {
            return ratio(p, rng.random_range(1..=max_den));
        }
    }
}

/// Shape of random Fock vectors.
#[derive(Clone, Copy, Debug)]
pub struct FockShape {
    pub trunc: Truncation,
    pub max_degree: u32,
    pub n_terms: usize,
    /// Draw from `H ⊕ H*` instead of `H` only.
    pub doubled: bool,
    pub max_num: i64,
    pub max_den: i64,
}

impl FockShape {
    pub fn new(trunc: Truncation, max_degree: u32, n_terms: usize) -> Self {
        FockShape { trunc, max_degree, n_terms, doubled: true, max_num: 9, max_den: 5 }
    }

    fn modes(&self) -> Vec<ModeIndex> {
        if self.doubled {
            self.trunc.doubled_modes()
        } else {
            self.trunc.primal_modes()
        }
    }
}

pub fn random_monomial(rng: &mut impl Rng, modes: &[ModeIndex], degree: u32) -> MultiIndex {
    MultiIndex::from_modes((0..degree).map(|_| modes[rng.random_range(0..modes.len())]))
}

/// Up to `n_terms` monomials with degrees uniform in `0..=max_degree` and
/// the top degree always present.
pub fn random_fock(rng: &mut impl Rng, shape: &FockShape) -> FockVector {
    random_fock_on(rng, &shape.modes(), shape)
}

/// As [`random_fock`] with modes drawn from `modes`.
pub fn random_fock_on(rng: &mut impl Rng, modes: &[ModeIndex], shape: &FockShape) -> FockVector {
    let mut f = FockVector::zero();
    for t in 0..shape.n_terms.max(1) {
        let degree = if t == 0 { shape.max_degree } else { rng.random_range(0..=shape.max_degree) };
        let mu = random_monomial(rng, modes, degree);
        f.add_term(mu, random_rational(rng, shape.max_num, shape.max_den));
    }
    f
}

/// Random rational coefficients on a fixed list of modes.
pub fn random_mode_map(rng: &mut impl Rng, modes: &[ModeIndex], max_num: i64, max_den: i64) -> ModeMap {
    modes.iter().map(|m| (*m, random_rational(rng, max_num, max_den))).collect()
}
