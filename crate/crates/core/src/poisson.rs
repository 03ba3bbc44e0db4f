//! Weighted symplectic Poisson bracket on `H ⊕ H*`, its contraction powers
//! and the truncated Moyal star-product.
//!
//! Everything is driven by a constant bivector `Λ = Σ w_{mn} ∂_m ⊗ ∂_n`
//! with annihilation in place of `∂`. The r-th power is
//! `Pʳ(F,G) = :Λʳ(F ⊗ G):` over ordered r-tuples of contractions, and the
//! star-product is `Σ ħʳ/r!·Pʳ`, associative for any constant `Λ`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exec::Exec;
use crate::fock::{merge_partials, FockError, FockVector, HbarSeries, ModeIndex, MultiIndex, PRODUCT_CHUNK};
use crate::scalar::{factorial, Rational};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormError {
    #[error("dimension d must be at least 1")]
    Dimension,
    #[error("weight constant must be positive, got {0}")]
    Weight(String),
    #[error("symplectic matrix is singular")]
    Singular,
}

/// A constant bivector on the doubled mode space.
pub trait Bivector: Sync {
    /// Partners `n` with `w_{mn} ≠ 0` for a left-hand mode `m`.
    fn partners(&self, left: ModeIndex) -> Vec<(ModeIndex, Rational)>;
}

/// How the Poisson tensor is read off the symplectic matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketConvention {
    /// Tensor `ω^{-1}` with weight `c·k² + 1`.
    InverseWeighted,
    /// Tensor `−ω^{-1}` with unit weight, the H-normalized doubled form.
    Doubled,
}

/// `ω` on `H ⊕ H*` with `ω_{ii*} = 1`, its inverse, and the bracket weight.
///
/// Doubled indices `0..d` are primal coordinates, `d..2d` dual ones.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm {
    pub d: u16,
    pub omega_lower: Vec<Vec<Rational>>,
    pub omega_upper: Vec<Vec<Rational>>,
    pub weight_c: Rational,
    pub convention: BracketConvention,
}

impl SymplecticForm {
    /// Weighted bracket `Σ (c·k²+1) ω^{ij} a_i F · a_j G`.
    pub fn new(d: u16, weight_c: Rational) -> Result<Self, FormError> {
        if weight_c <= Rational::zero() {
            return Err(FormError::Weight(weight_c.to_string()));
        }
        Self::build(d, weight_c, BracketConvention::InverseWeighted)
    }

    /// Unit-weight bracket with `{x, x*} = +1`.
    pub fn doubled(d: u16) -> Result<Self, FormError> {
        Self::build(d, Rational::zero(), BracketConvention::Doubled)
    }

    fn build(d: u16, weight_c: Rational, convention: BracketConvention) -> Result<Self, FormError> {
        if d == 0 {
            return Err(FormError::Dimension);
        }
        let n = 2 * d as usize;
        let mut lower = vec![vec![Rational::zero(); n]; n];
        for i in 0..d as usize {
            lower[i][i + d as usize] = Rational::one();
            lower[i + d as usize][i] = -Rational::one();
        }
        let upper = invert(&lower).ok_or(FormError::Singular)?;
        Ok(SymplecticForm { d, omega_lower: lower, omega_upper: upper, weight_c, convention })
    }

    pub fn doubled_index(&self, mode: ModeIndex) -> usize {
        mode.coord as usize - 1 + if mode.dual { self.d as usize } else { 0 }
    }

    /// `(c·k² + 1)` or 1.
    pub fn weight(&self, freq: i32) -> Rational {
        match self.convention {
            BracketConvention::InverseWeighted => {
                let k = Rational::from_integer(i64::from(freq).into());
                &self.weight_c * &k * &k + Rational::one()
            }
            BracketConvention::Doubled => Rational::one(),
        }
    }

    /// Poisson tensor entry between two modes of equal frequency.
    pub fn tensor(&self, a: ModeIndex, b: ModeIndex) -> Rational {
        let v = &self.omega_upper[self.doubled_index(a)][self.doubled_index(b)];
        match self.convention {
            BracketConvention::InverseWeighted => v.clone(),
            BracketConvention::Doubled => -v,
        }
    }
}

impl Bivector for SymplecticForm {
    fn partners(&self, left: ModeIndex) -> Vec<(ModeIndex, Rational)> {
        let right = left.twin();
        let w = self.tensor(left, right) * self.weight(left.freq);
        if w.is_zero() {
            Vec::new()
        } else {
            vec![(right, w)]
        }
    }
}

/// Gauss–Jordan inverse over the rationals.
pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let sub = &f * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..b[0].len())
                .map(|j| (0..b.len()).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// `:Λʳ(F ⊗ G):`, keeping output degrees `≤ cap`.
pub fn contract(
    f: &FockVector,
    g: &FockVector,
    bivector: &dyn Bivector,
    r: u32,
    cap: Option<u32>,
    exec: Exec,
) -> FockVector {
    if r == 0 {
        return f.wick_product_with(g, cap, exec);
    }
    let mut partner_cache: HashMap<ModeIndex, Vec<(ModeIndex, Rational)>> = HashMap::new();
    for m in f.support() {
        partner_cache.insert(m, bivector.partners(m));
    }
    let left: Vec<(&MultiIndex, &Rational)> = f.iter().filter(|(mu, _)| mu.degree() >= r).collect();
    let right: Vec<(&MultiIndex, &Rational)> = g.iter().filter(|(nu, _)| nu.degree() >= r).collect();
    let partials = exec.map_chunks(&left, PRODUCT_CHUNK, |chunk| {
        let mut acc: HashMap<MultiIndex, Rational> = HashMap::new();
        for &(mu, c) in chunk {
            for &(nu, d) in &right {
                let out_degree = mu.degree() + nu.degree() - 2 * r;
                if cap.is_some_and(|cap| out_degree > cap) {
                    // right terms are sorted by degree
                    break;
                }
                for (out, w) in contract_pair(mu, nu, r, &partner_cache) {
                    let coeff = c * d * w;
                    acc.entry(out).and_modify(|x| *x += &coeff).or_insert(coeff);
                }
            }
        }
        acc
    });
    merge_partials(partials)
}

/// All ways to contract `r` slots of `μ` against `r` slots of `ν`.
///
/// A contraction pattern assigns a count `c_l` to each linked pair of
/// modes; it is reached by `r!/Π c_l!` ordered tuples and lowers each
/// multiplicity by a falling factorial.
fn contract_pair(
    mu: &MultiIndex,
    nu: &MultiIndex,
    r: u32,
    partners: &HashMap<ModeIndex, Vec<(ModeIndex, Rational)>>,
) -> Vec<(MultiIndex, Rational)> {
    let (left, right) = (mu.entries(), nu.entries());
    let mut links: Vec<Link<'_>> = Vec::new();
    for (i, (m, _)) in left.iter().enumerate() {
        for (n, w) in &partners[m] {
            if let Ok(j) = right.binary_search_by(|e| e.0.cmp(n)) {
                links.push(Link { i, j, w });
            }
        }
    }
    let mut walk = PatternWalk {
        left,
        right,
        links: &links,
        r,
        used_left: vec![0; left.len()],
        used_right: vec![0; right.len()],
        counts: vec![0; links.len()],
        out: Vec::new(),
    };
    if !links.is_empty() {
        walk.descend(0, r);
    }
    walk.out
}

struct Link<'a> {
    i: usize,
    j: usize,
    w: &'a Rational,
}

struct PatternWalk<'a> {
    left: &'a [(ModeIndex, u32)],
    right: &'a [(ModeIndex, u32)],
    links: &'a [Link<'a>],
    r: u32,
    used_left: Vec<u32>,
    used_right: Vec<u32>,
    counts: Vec<u32>,
    out: Vec<(MultiIndex, Rational)>,
}

impl PatternWalk<'_> {
    fn descend(&mut self, p: usize, remaining: u32) {
        if remaining == 0 {
            self.emit();
            return;
        }
        if p == self.links.len() {
            return;
        }
        let Link { i, j, .. } = self.links[p];
        let room = (self.left[i].1 - self.used_left[i]).min(self.right[j].1 - self.used_right[j]);
        for c in 0..=room.min(remaining) {
            self.counts[p] = c;
            self.used_left[i] += c;
            self.used_right[j] += c;
            self.descend(p + 1, remaining - c);
            self.used_left[i] -= c;
            self.used_right[j] -= c;
        }
        self.counts[p] = 0;
    }

    fn emit(&mut self) {
        let mut int = BigInt::from(factorial(u64::from(self.r)));
        let mut weight = Rational::one();
        for (link, &c) in self.links.iter().zip(&self.counts) {
            if c > 0 {
                int /= factorial(u64::from(c));
                for _ in 0..c {
                    weight *= link.w;
                }
            }
        }
        for (side, used) in [(self.left, &self.used_left), (self.right, &self.used_right)] {
            for (&(_, mult), &k) in side.iter().zip(used) {
                for f in mult - k + 1..=mult {
                    int *= f;
                }
            }
        }
        let monomial = MultiIndex::from_pairs(
            self.left
                .iter()
                .zip(&self.used_left)
                .chain(self.right.iter().zip(&self.used_right))
                .map(|(&(m, mult), &k)| (m, mult - k)),
        );
        self.out.push((monomial, weight * Rational::from_integer(int)));
    }
}

/// `{F, G}`.
pub fn poisson_bracket(f: &FockVector, g: &FockVector, form: &SymplecticForm) -> FockVector {
    contract(f, g, form, 1, None, Exec::Sequential)
}

/// `Pʳ(F, G)`; `P⁰` is the Wick product.
pub fn poisson_power(r: u32, f: &FockVector, g: &FockVector, form: &SymplecticForm) -> FockVector {
    contract(f, g, form, r, None, Exec::Sequential)
}

/// Series with `Pʳ(F,G)/r!` at order `r` for any constant bivector.
pub fn star_with(
    f: &FockVector,
    g: &FockVector,
    bivector: &dyn Bivector,
    order: usize,
    cap: Option<u32>,
    exec: Exec,
) -> HbarSeries {
    let coeffs = (0..=order)
        .map(|r| {
            let p = contract(f, g, bivector, r as u32, cap, exec);
            p.scale(&inv_factorial(r))
        })
        .collect();
    HbarSeries::from_coeffs(coeffs)
}

/// `F ⋆ G = :F·G: + Σ_{r=1}^{R} ħʳ/r!·Pʳ(F,G)`.
pub fn moyal_star(f: &FockVector, g: &FockVector, form: &SymplecticForm, order: usize) -> HbarSeries {
    star_with(f, g, form, order, None, Exec::default())
}

/// `(FS ⋆ GS)_r = Σ_{a+b+c=r} P^c(FS_a, GS_b)/c!` for any constant bivector.
pub fn star_series_with(
    fs: &HbarSeries,
    gs: &HbarSeries,
    bivector: &dyn Bivector,
    cap: Option<u32>,
    exec: Exec,
) -> Result<HbarSeries, FockError> {
    if fs.order() != gs.order() {
        return Err(FockError::OrderMismatch { left: fs.order(), right: gs.order() });
    }
    let order = fs.order();
    let mut out = HbarSeries::zero(order);
    for a in 0..=order {
        if fs.coeff(a).is_zero() {
            continue;
        }
        for b in 0..=order - a {
            if gs.coeff(b).is_zero() {
                continue;
            }
            for c in 0..=order - a - b {
                let p = contract(fs.coeff(a), gs.coeff(b), bivector, c as u32, cap, exec);
                out.coeff_mut(a + b + c).add_scaled(&p, &inv_factorial(c));
            }
        }
    }
    Ok(out)
}

pub fn star_series(fs: &HbarSeries, gs: &HbarSeries, form: &SymplecticForm) -> Result<HbarSeries, FockError> {
    star_series_with(fs, gs, form, None, Exec::default())
}

pub(crate) fn inv_factorial(r: usize) -> Rational {
    crate::scalar::Scalar::div_u64(&Rational::one(), factorial(r as u64))
}
