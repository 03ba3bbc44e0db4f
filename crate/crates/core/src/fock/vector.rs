use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Neg, Sub};

use super::mode::{ModeIndex, MultiIndex};
use crate::exec::Exec;
use crate::scalar::{Rational, Scalar};

/// Coefficients of a vector of `H ⊕ H*` in the mode basis.
pub type ModeMap<S = Rational> = BTreeMap<ModeIndex, S>;

/// Left-operand terms handled per parallel task in products.
pub(crate) const PRODUCT_CHUNK: usize = 8;

/// A finite element `F = Σ_μ c_μ ê_μ` of the truncated symmetric Fock space.
///
/// Stored sparsely with no zero coefficients, so `==` is exact equality of
/// vectors in rational mode.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S = Rational> {
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Default for FockVector<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> FockVector<S> {
    pub fn zero() -> Self {
        FockVector { terms: BTreeMap::new() }
    }

    /// The vacuum `ê_∅`, unit of the Wick product.
    pub fn vacuum() -> Self {
        Self::monomial(MultiIndex::vacuum(), S::one())
    }

    pub fn monomial(index: MultiIndex, coeff: S) -> Self {
        let mut v = Self::zero();
        v.add_term(index, coeff);
        v
    }

    /// `coeff · ê_{mode}` (degree one).
    pub fn mode(mode: ModeIndex, coeff: S) -> Self {
        Self::monomial(MultiIndex::single(mode), coeff)
    }

    /// Sum terms, merging repeated multi-indices.
    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, S)>>(terms: I) -> Self {
        let mut v = Self::zero();
        for (mi, c) in terms {
            v.add_term(mi, c);
        }
        v
    }

    pub fn add_term(&mut self, index: MultiIndex, coeff: S) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(index) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&coeff);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, S> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest degree carried by a term (0 for the zero vector).
    pub fn degree(&self) -> u32 {
        // graded order: the last key has the top degree
        self.terms.keys().next_back().map_or(0, MultiIndex::degree)
    }

    pub fn coefficient(&self, index: &MultiIndex) -> S {
        self.terms.get(index).cloned().unwrap_or_else(S::zero)
    }

    /// Every mode occurring in some term.
    pub fn support(&self) -> BTreeSet<ModeIndex> {
        self.terms
            .keys()
            .flat_map(|mi| mi.entries().iter().map(|e| e.0))
            .collect()
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FockVector {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.mul(c))).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &S) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.mul(c));
        }
    }

    /// Drop every term of degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Self {
        FockVector {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() <= max_degree)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// The homogeneous part `Fⁿ`.
    pub fn degree_part(&self, n: u32) -> Self {
        FockVector {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() == n)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Wick product `:F·G:`, the bilinear extension of `ê_μ · ê_ν = ê_{μ⊎ν}`.
    pub fn wick_product(&self, other: &Self) -> Self {
        self.wick_product_with(other, None, Exec::Sequential)
    }

    /// Wick product keeping only output degrees `≤ cap`.
    pub fn wick_product_with(&self, other: &Self, cap: Option<u32>, exec: Exec) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let left: Vec<(&MultiIndex, &S)> = self.terms.iter().collect();
        // graded key order: right terms are sorted by degree
        let right: Vec<(&MultiIndex, &S)> = other.terms.iter().collect();
        let partials = exec.map_chunks(&left, PRODUCT_CHUNK, |chunk| {
            let mut acc: HashMap<MultiIndex, S> = HashMap::new();
            for &(mu, c) in chunk {
                for &(nu, d) in &right {
                    if let Some(cap) = cap {
                        if mu.degree() + nu.degree() > cap {
                            break;
                        }
                    }
                    let coeff = c.mul(d);
                    acc.entry(mu.union(nu))
                        .and_modify(|x| x.add_assign(&coeff))
                        .or_insert(coeff);
                }
            }
            acc
        });
        merge_partials(partials)
    }

    /// Annihilation `a_{e_mode}`: `ê_μ ↦ μ(mode) · ê_{μ − mode}`.
    pub fn annihilate(&self, mode: ModeIndex) -> Self {
        let mut out = Self::zero();
        for (mu, c) in &self.terms {
            if let Some((mult, lowered)) = mu.remove_one(mode) {
                out.add_term(lowered, c.mul_u64(u64::from(mult)));
            }
        }
        out
    }

    /// `a_h F = Σ_mode h(mode) · a_{e_mode} F`.
    pub fn annihilate_general(&self, h: &ModeMap<S>) -> Self {
        let mut out = Self::zero();
        for (mu, c) in &self.terms {
            for &(mode, mult) in mu.entries() {
                let Some(w) = h.get(&mode) else { continue };
                if w.is_zero() {
                    continue;
                }
                let (_, lowered) = mu.remove_one(mode).expect("mode present");
                out.add_term(lowered, c.mul(w).mul_u64(u64::from(mult)));
            }
        }
        out
    }

    /// Evaluate `Σ c_μ Π x_m^{μ(m)}` with coordinates from `lookup`.
    pub fn eval_with(&self, mut lookup: impl FnMut(ModeIndex) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(mu, c)| c.to_f64() * mu.eval_with(&mut lookup))
            .sum()
    }

    pub fn to_f64(&self) -> FockVector<f64> {
        FockVector::from_terms(self.terms.iter().map(|(k, v)| (k.clone(), v.to_f64())))
    }

    /// Largest absolute coefficient (as a float).
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn merge_partials<S: Scalar>(partials: Vec<HashMap<MultiIndex, S>>) -> FockVector<S> {
    let mut out = FockVector::zero();
    for part in partials {
        for (k, v) in part {
            out.add_term(k, v);
        }
    }
    out
}

impl<S: Scalar> Add for &FockVector<S> {
    type Output = FockVector<S>;
    fn add(self, rhs: Self) -> FockVector<S> {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl<S: Scalar> Sub for &FockVector<S> {
    type Output = FockVector<S>;
    fn sub(self, rhs: Self) -> FockVector<S> {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(k.clone(), v.neg());
        }
        out
    }
}

impl<S: Scalar> Neg for &FockVector<S> {
    type Output = FockVector<S>;
    fn neg(self) -> FockVector<S> {
        FockVector {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.neg())).collect(),
        }
    }
}
