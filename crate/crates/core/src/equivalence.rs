//! Deformed products `⋆^A` built from a diagonal operator `A`, and the
//! transform `T = exp(ħT₁)` carrying them to the Moyal product.
//!
//! With `Λ` the Poisson tensor of a form, `⋆^A` is the exponential product
//! of `Λ_A = Λ + E`, `E = Σ α_k (∂_x ⊗ ∂_y + ∂_y ⊗ ∂_x)`, and
//! `T₁ = −Σ α_k ∂_x ∂_y`. Because `m∘E` is the defect of `T₁` from being a
//! derivation, `T(F ⋆^A G) = T(F) ⋆ T(G)` holds exactly on polynomials.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::fock::{wick_exponential, FockVector, HbarSeries, ModeIndex, ModeMap};
use crate::poisson::{contract, inv_factorial, poisson_bracket, star_series_with, Bivector, SymplecticForm};
use crate::scalar::{format_rational, Rational};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OperatorError {
    #[error("|alpha_{freq}| = {value} exceeds the growth bound {bound}·max(1,|k|)^{mu}")]
    Growth { freq: i32, value: String, bound: String, mu: u32 },
    #[error("unknown alpha family {0:?}; expected zero, one or ksq")]
    Family(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaFamily {
    Zero,
    One,
    Ksq,
}

impl AlphaFamily {
    pub const ALL: [AlphaFamily; 3] = [AlphaFamily::Zero, AlphaFamily::One, AlphaFamily::Ksq];

    pub fn name(self) -> &'static str {
        match self {
            AlphaFamily::Zero => "zero",
            AlphaFamily::One => "one",
            AlphaFamily::Ksq => "ksq",
        }
    }

    pub fn parse(name: &str) -> Result<Self, OperatorError> {
        match name {
            "zero" => Ok(AlphaFamily::Zero),
            "one" => Ok(AlphaFamily::One),
            "ksq" => Ok(AlphaFamily::Ksq),
            other => Err(OperatorError::Family(other.to_string())),
        }
    }
}

/// `A e_{i,k} = α_k e_{i,k}`, the same `α_k` for every coordinate.
///
/// Frequencies absent from `alpha` have `α_k = 0`. The witness records
/// `|α_k| ≤ k_bound · max(1,|k|)^mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperatorA {
    alpha: BTreeMap<i32, Rational>,
    pub k_bound: Rational,
    pub mu: u32,
}

impl DiagonalOperatorA {
    pub fn new(alpha: BTreeMap<i32, Rational>, k_bound: Rational, mu: u32) -> Result<Self, OperatorError> {
        for (&k, v) in &alpha {
            let scale = Rational::from_integer(i64::from(k.unsigned_abs().max(1)).into());
            let bound = &k_bound * num_traits::pow(scale, mu as usize);
            if v.abs() > bound {
                return Err(OperatorError::Growth {
                    freq: k,
                    value: format_rational(v),
                    bound: format_rational(&k_bound),
                    mu,
                });
            }
        }
        let alpha = alpha.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(DiagonalOperatorA { alpha, k_bound, mu })
    }

    /// Named family on `|k| ≤ k_max`.
    pub fn family(family: AlphaFamily, k_max: i32) -> Self {
        let ks = -k_max..=k_max;
        let (alpha, mu): (BTreeMap<i32, Rational>, u32) = match family {
            AlphaFamily::Zero => (BTreeMap::new(), 0),
            AlphaFamily::One => (ks.map(|k| (k, Rational::one())).collect(), 0),
            AlphaFamily::Ksq => (ks.map(|k| (k, Rational::from_integer(i64::from(k * k).into()))).collect(), 2),
        };
        Self::new(alpha, Rational::one(), mu).expect("families satisfy their witness")
    }

    /// Constant `α_k = c` for `|k| ≤ k_max`.
    pub fn constant(c: Rational, k_max: i32) -> Self {
        let bound = c.abs().max(Rational::one());
        Self::new((-k_max..=k_max).map(|k| (k, c.clone())).collect(), bound, 0).expect("within bound")
    }

    pub fn alpha(&self, freq: i32) -> Rational {
        self.alpha.get(&freq).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `−A`, which generates `T⁻¹`.
    pub fn negated(&self) -> Self {
        DiagonalOperatorA {
            alpha: self.alpha.iter().map(|(k, v)| (*k, -v)).collect(),
            k_bound: self.k_bound.clone(),
            mu: self.mu,
        }
    }

    pub fn table(&self) -> &BTreeMap<i32, Rational> {
        &self.alpha
    }
}

/// Symmetric part `E = Σ α_k (∂_x ⊗ ∂_y + ∂_y ⊗ ∂_x)`.
struct SymmetricPart<'a>(&'a DiagonalOperatorA);

impl Bivector for SymmetricPart<'_> {
    fn partners(&self, left: ModeIndex) -> Vec<(ModeIndex, Rational)> {
        let a = self.0.alpha(left.freq);
        if a.is_zero() {
            Vec::new()
        } else {
            vec![(left.twin(), a)]
        }
    }
}

/// `Λ_A = Λ + E`.
pub struct DeformedBivector<'a> {
    pub form: &'a SymplecticForm,
    pub a: &'a DiagonalOperatorA,
}

impl Bivector for DeformedBivector<'_> {
    fn partners(&self, left: ModeIndex) -> Vec<(ModeIndex, Rational)> {
        let right = left.twin();
        let w = self.form.tensor(left, right) * self.form.weight(left.freq) + self.a.alpha(left.freq);
        if w.is_zero() {
            Vec::new()
        } else {
            vec![(right, w)]
        }
    }
}

/// `E_A(F, G)`.
pub fn apply_ea(f: &FockVector, g: &FockVector, a: &DiagonalOperatorA) -> FockVector {
    contract(f, g, &SymmetricPart(a), 1, None, Exec::Sequential)
}

/// `C^A_1 = {F,G} + E_A(F,G)`.
pub fn c_a1(f: &FockVector, g: &FockVector, a: &DiagonalOperatorA, form: &SymplecticForm) -> FockVector {
    &poisson_bracket(f, g, form) + &apply_ea(f, g, a)
}

/// `C^A_r(F,G) = :Λ_Aʳ(F ⊗ G):`.
pub fn c_ar(r: u32, f: &FockVector, g: &FockVector, a: &DiagonalOperatorA, form: &SymplecticForm) -> FockVector {
    contract(f, g, &DeformedBivector { form, a }, r, None, Exec::Sequential)
}

/// `F ⋆^A G = :F·G: + Σ_{r=1}^{R} ħʳ/r!·C^A_r(F,G)`.
pub fn star_a(f: &FockVector, g: &FockVector, a: &DiagonalOperatorA, form: &SymplecticForm, order: usize) -> HbarSeries {
    star_a_capped(f, g, a, form, order, |_| None, Exec::default())
}

/// As [`star_a`], keeping degrees `≤ cap(r)` at order `r`.
pub fn star_a_capped(
    f: &FockVector,
    g: &FockVector,
    a: &DiagonalOperatorA,
    form: &SymplecticForm,
    order: usize,
    cap: impl Fn(usize) -> Option<u32>,
    exec: Exec,
) -> HbarSeries {
    let lambda = DeformedBivector { form, a };
    HbarSeries::from_coeffs(
        (0..=order)
            .map(|r| contract(f, g, &lambda, r as u32, cap(r), exec).scale(&inv_factorial(r)))
            .collect(),
    )
}

/// `T₁F = −Σ_{i,k} α_k a_{x_{i,k}} a_{y_{i,k}} F`.
pub fn apply_t1(f: &FockVector, a: &DiagonalOperatorA) -> FockVector {
    let mut out = FockVector::zero();
    if a.is_zero() {
        return out;
    }
    for (mu, c) in f.iter() {
        for &(m, mult) in mu.entries() {
            if m.dual {
                continue;
            }
            let alpha = a.alpha(m.freq);
            if alpha.is_zero() {
                continue;
            }
            let (_, lowered) = mu.remove_one(m).expect("mode present");
            let Some((twin_mult, lowered)) = lowered.remove_one(m.twin()) else { continue };
            let w = Rational::from_integer(i64::from(mult * twin_mult).into());
            out.add_term(lowered, -(c * &alpha * w));
        }
    }
    out
}

/// `(T·FS)_r = Σ_{a+b=r} T₁ᵇ(FS_a)/b!`.
pub fn apply_t(fs: &HbarSeries, a: &DiagonalOperatorA) -> HbarSeries {
    let order = fs.order();
    let mut out = HbarSeries::zero(order);
    for i in 0..=order {
        let mut power = fs.coeff(i).clone();
        for b in 0..=order - i {
            if power.is_zero() {
                break;
            }
            out.coeff_mut(i + b).add_scaled(&power, &inv_factorial(b));
            power = apply_t1(&power, a);
        }
    }
    out
}

/// `⟨γ, γ'⟩` through `Λ_A`: `Σ_m Σ_n w_{mn} γ(m) γ'(n)` over doubled maps.
fn lambda_pairing(left: &ModeMap, right: &ModeMap, lambda: &DeformedBivector<'_>) -> Rational {
    let mut acc = Rational::zero();
    for (m, c) in left {
        for (n, w) in lambda.partners(*m) {
            if let Some(d) = right.get(&n) {
                acc += c * d * w;
            }
        }
    }
    acc
}

/// Merge a primal and a dual coefficient map into one doubled map.
pub fn doubled_map(gamma: &ModeMap, gamma_star: &ModeMap) -> ModeMap {
    let mut out: ModeMap = gamma.iter().map(|(m, c)| (m.as_primal(), c.clone())).collect();
    for (m, c) in gamma_star {
        out.insert(m.as_primal().twin(), c.clone());
    }
    out
}

fn sum_maps(a: &ModeMap, b: &ModeMap) -> ModeMap {
    let mut out = a.clone();
    for (m, c) in b {
        *out.entry(*m).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Closed form of `Φ₁ ⋆^A Φ₂`: `Σ_r ħʳ cʳ/r! · Φ_{γ₁+γ₂, γ₁*+γ₂*}` with
/// `c = ⟨(A+I)γ₁, γ₂*⟩ + ⟨(A−I)γ₂, γ₁*⟩` for the doubled form (in general,
/// `c` pairs the two arguments through `Λ_A`).
#[allow(clippy::too_many_arguments)]
pub fn exp_product_formula_rhs(
    gamma1: &ModeMap,
    gamma1_star: &ModeMap,
    gamma2: &ModeMap,
    gamma2_star: &ModeMap,
    a: &DiagonalOperatorA,
    form: &SymplecticForm,
    order: usize,
    max_degree: u32,
) -> HbarSeries {
    let lambda = DeformedBivector { form, a };
    let c = lambda_pairing(&doubled_map(gamma1, gamma1_star), &doubled_map(gamma2, gamma2_star), &lambda);
    let phi = wick_exponential(&sum_maps(gamma1, gamma2), &sum_maps(gamma1_star, gamma2_star), max_degree);
    let mut power = Rational::one();
    let coeffs = (0..=order)
        .map(|r| {
            let out = phi.scale(&(&power * inv_factorial(r)));
            power *= &c;
            out
        })
        .collect();
    HbarSeries::from_coeffs(coeffs)
}

/// Outcome of a coefficientwise comparison of two series inside a window.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowComparison {
    pub window: u32,
    pub order: usize,
    /// Monomials (over all orders) whose coefficients differ.
    pub mismatches: usize,
    /// Largest absolute coefficient difference, as a float.
    pub max_abs_diff: f64,
    /// Monomials compared (nonzero on either side).
    pub compared: usize,
}

impl WindowComparison {
    pub fn exact(&self) -> bool {
        self.mismatches == 0
    }
}

pub fn compare_in_window(lhs: &HbarSeries, rhs: &HbarSeries, window: u32) -> WindowComparison {
    let mut mismatches = 0;
    let mut compared = 0;
    let mut max_abs_diff: f64 = 0.0;
    for r in 0..=lhs.order().min(rhs.order()) {
        let l = lhs.coeff(r).truncate(window);
        let rr = rhs.coeff(r).truncate(window);
        compared += l.len().max(rr.len());
        let diff = &l - &rr;
        mismatches += diff.len();
        max_abs_diff = max_abs_diff.max(diff.max_abs_coefficient());
    }
    WindowComparison { window, order: lhs.order(), mismatches, max_abs_diff, compared }
}

/// `T(F ⋆^A G)` against `T(F) ⋆ T(G)` at output degrees `≤ window`.
pub fn check_intertwining(
    f: &FockVector,
    g: &FockVector,
    a: &DiagonalOperatorA,
    form: &SymplecticForm,
    order: usize,
    window: u32,
    exec: Exec,
) -> WindowComparison {
    let lift = |r: usize| window + 2 * (order - r) as u32;
    let deformed = star_a_capped(f, g, a, form, order, |r| Some(lift(r)), exec);
    let lhs = apply_t(&deformed, a);
    let tf = transform_capped(f, a, order, &lift);
    let tg = transform_capped(g, a, order, &lift);
    let rhs = star_series_with(&tf, &tg, form, Some(window), exec).expect("equal orders");
    compare_in_window(&lhs, &rhs, window)
}

fn transform_capped(f: &FockVector, a: &DiagonalOperatorA, order: usize, cap: &impl Fn(usize) -> u32) -> HbarSeries {
    let t = apply_t(&HbarSeries::concentrated(f.truncate(cap(0)), order), a);
    HbarSeries::from_coeffs(t.into_coeffs().into_iter().enumerate().map(|(r, c)| c.truncate(cap(r))).collect())
}

/// `Φ₁ ⋆^A Φ₂` against the closed form at output degrees `≤ N − 2R`.
#[allow(clippy::too_many_arguments)]
pub fn check_exp_formula(
    gamma1: &ModeMap,
    gamma1_star: &ModeMap,
    gamma2: &ModeMap,
    gamma2_star: &ModeMap,
    a: &DiagonalOperatorA,
    form: &SymplecticForm,
    order: usize,
    max_degree: u32,
    exec: Exec,
) -> WindowComparison {
    let window = max_degree - 2 * order as u32;
    let phi1 = wick_exponential(gamma1, gamma1_star, max_degree);
    let phi2 = wick_exponential(gamma2, gamma2_star, max_degree);
    let lhs = star_a_capped(&phi1, &phi2, a, form, order, |_| Some(window), exec);
    let rhs = exp_product_formula_rhs(gamma1, gamma1_star, gamma2, gamma2_star, a, form, order, max_degree);
    compare_in_window(&lhs, &rhs, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::MultiIndex;
    use crate::poisson::moyal_star;
    use crate::scalar::ratio;

    fn x(k: i32) -> ModeIndex {
        ModeIndex::primal(1, k)
    }

    fn sample_pair() -> (FockVector, FockVector) {
        let f = FockVector::from_terms([
            (MultiIndex::from_modes([x(1), x(1), x(1).twin()]), ratio(2, 3)),
            (MultiIndex::from_modes([x(0), x(-1).twin()]), ratio(-1, 1)),
            (MultiIndex::single(x(1).twin()), ratio(5, 2)),
        ]);
        let g = FockVector::from_terms([
            (MultiIndex::from_modes([x(1).twin(), x(1).twin(), x(0).twin()]), ratio(1, 4)),
            (MultiIndex::from_modes([x(-1), x(1)]), ratio(3, 1)),
            (MultiIndex::vacuum(), ratio(1, 1)),
        ]);
        (f, g)
    }

    #[test]
    fn growth_witness_is_enforced() {
        let table: BTreeMap<i32, Rational> = [(2, ratio(5, 1))].into();
        assert!(DiagonalOperatorA::new(table.clone(), ratio(1, 1), 2).is_err());
        assert!(DiagonalOperatorA::new(table, ratio(2, 1), 2).is_ok());
        assert!(AlphaFamily::parse("ksq").is_ok());
        assert!(AlphaFamily::parse("cubic").is_err());
    }

    #[test]
    fn zero_alpha_is_bracket_and_identity() {
        let form = SymplecticForm::doubled(1).unwrap();
        let a = DiagonalOperatorA::family(AlphaFamily::Zero, 2);
        let (f, g) = sample_pair();
        assert!(apply_ea(&f, &g, &a).is_zero());
        assert_eq!(c_a1(&f, &g, &a, &form), poisson_bracket(&f, &g, &form));
        let s = moyal_star(&f, &g, &form, 3);
        assert_eq!(apply_t(&s, &a), s);
        assert_eq!(star_a(&f, &g, &a, &form, 3), s);
    }

    #[test]
    fn c_a1_is_first_power() {
        let form = SymplecticForm::doubled(1).unwrap();
        let a = DiagonalOperatorA::family(AlphaFamily::Ksq, 2);
        let (f, g) = sample_pair();
        assert_eq!(c_a1(&f, &g, &a, &form), c_ar(1, &f, &g, &a, &form));
        assert_eq!(apply_ea(&f, &g, &a), apply_ea(&g, &f, &a));
    }

    #[test]
    fn t1_needs_two_contractions() {
        let a = DiagonalOperatorA::family(AlphaFamily::One, 2);
        let f = FockVector::from_terms([
            (MultiIndex::single(x(1)), ratio(1, 1)),
            (MultiIndex::single(x(1).twin()), ratio(1, 1)),
            (MultiIndex::vacuum(), ratio(1, 1)),
        ]);
        assert!(apply_t1(&f, &a).is_zero());
        let xy = FockVector::monomial(MultiIndex::from_modes([x(2), x(2), x(2).twin()]), ratio(1, 1));
        assert_eq!(apply_t1(&xy, &a), FockVector::mode(x(2), ratio(-2, 1)));
    }

    #[test]
    fn transform_inverts() {
        let a = DiagonalOperatorA::family(AlphaFamily::Ksq, 2);
        let (f, g) = sample_pair();
        let mut s = HbarSeries::concentrated(f.wick_product(&g), 3);
        *s.coeff_mut(2) = g.clone();
        assert_eq!(apply_t(&apply_t(&s, &a), &a.negated()), s);
    }

    #[test]
    fn intertwines_small_case() {
        let form = SymplecticForm::doubled(1).unwrap();
        for fam in AlphaFamily::ALL {
            let a = DiagonalOperatorA::family(fam, 2);
            let (f, g) = sample_pair();
            let cmp = check_intertwining(&f, &g, &a, &form, 3, 8, Exec::Sequential);
            assert!(cmp.exact(), "{fam:?}: {cmp:?}");
        }
    }

    #[test]
    fn exp_formula_zero_second_argument() {
        let form = SymplecticForm::doubled(1).unwrap();
        let a = DiagonalOperatorA::family(AlphaFamily::Ksq, 2);
        let g1: ModeMap = [(x(1), ratio(1, 2))].into();
        let g1s: ModeMap = [(x(1), ratio(-1, 3))].into();
        let e = ModeMap::new();
        let rhs = exp_product_formula_rhs(&g1, &g1s, &e, &e, &a, &form, 2, 4);
        let phi = wick_exponential(&g1, &g1s, 4);
        assert_eq!(rhs.coeff(0), &phi);
        assert!(rhs.coeff(1).is_zero() && rhs.coeff(2).is_zero());
    }

    #[test]
    fn exp_formula_minus_one_keeps_only_minus_two() {
        let form = SymplecticForm::doubled(1).unwrap();
        let a = DiagonalOperatorA::constant(ratio(-1, 1), 2);
        let g1: ModeMap = [(x(1), ratio(2, 1))].into();
        let g1s: ModeMap = [(x(1), ratio(3, 1))].into();
        let g2: ModeMap = [(x(1), ratio(5, 1))].into();
        let g2s: ModeMap = [(x(1), ratio(7, 1))].into();
        let rhs = exp_product_formula_rhs(&g1, &g1s, &g2, &g2s, &a, &form, 1, 2);
        // c = −2·γ₂·γ₁* = −30
        let phi = rhs.coeff(0).clone();
        assert_eq!(rhs.coeff(1), &phi.scale(&ratio(-30, 1)));
    }

    #[test]
    fn exp_formula_holds_in_window() {
        let form = SymplecticForm::doubled(1).unwrap();
        let a = DiagonalOperatorA::family(AlphaFamily::Ksq, 2);
        let g1: ModeMap = [(x(1), ratio(1, 2)), (x(-2), ratio(2, 3))].into();
        let g1s: ModeMap = [(x(1), ratio(-1, 3))].into();
        let g2: ModeMap = [(x(1), ratio(3, 1))].into();
        let g2s: ModeMap = [(x(1), ratio(1, 5)), (x(-2), ratio(-1, 1))].into();
        let cmp = check_exp_formula(&g1, &g1s, &g2, &g2s, &a, &form, 3, 6, Exec::Sequential);
        assert_eq!(cmp.window, 0);
        assert!(cmp.exact(), "{cmp:?}");
        let cmp = check_exp_formula(&g1, &g1s, &g2, &g2s, &a, &form, 2, 8, Exec::Sequential);
        assert!(cmp.exact() && cmp.compared > 0, "{cmp:?}");
    }
}
