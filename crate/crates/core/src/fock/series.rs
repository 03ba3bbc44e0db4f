use super::vector::FockVector;
use super::FockError;
use crate::scalar::{Rational, Scalar};

/// A formal series `Σ_{r=0}^{R} ħʳ S_r` with Fock-vector coefficients,
/// truncated at order `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct HbarSeries<S = Rational> {
    coeffs: Vec<FockVector<S>>,
}

impl<S: Scalar> HbarSeries<S> {
    pub fn zero(order: usize) -> Self {
        HbarSeries { coeffs: vec![FockVector::zero(); order + 1] }
    }

    /// `ê_∅` at order 0.
    pub fn unit(order: usize) -> Self {
        Self::concentrated(FockVector::vacuum(), order)
    }

    /// `F` placed at order 0.
    pub fn concentrated(f: FockVector<S>, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = f;
        s
    }

    /// From explicit coefficients; the truncation order is `len - 1`.
    pub fn from_coeffs(coeffs: Vec<FockVector<S>>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the order-0 coefficient");
        HbarSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, r: usize) -> &FockVector<S> {
        &self.coeffs[r]
    }

    pub fn coeff_mut(&mut self, r: usize) -> &mut FockVector<S> {
        &mut self.coeffs[r]
    }

    pub fn coeffs(&self) -> &[FockVector<S>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FockVector<S>> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FockVector::is_zero)
    }

    fn check_order(&self, other: &Self) -> Result<(), FockError> {
        if self.order() != other.order() {
            return Err(FockError::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FockError> {
        self.check_order(other)?;
        Ok(HbarSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FockError> {
        self.check_order(other)?;
        Ok(HbarSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        HbarSeries { coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }

    /// Apply a map to every coefficient.
    pub fn map(&self, f: impl Fn(&FockVector<S>) -> FockVector<S>) -> Self {
        HbarSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn truncate_degree(&self, max_degree: u32) -> Self {
        self.map(|c| c.truncate(max_degree))
    }

    /// Cauchy product `(S·T)_r = Σ_{a+b=r} product(S_a, T_b)`, truncated at `R`.
    pub fn convolve(
        &self,
        other: &Self,
        product: impl Fn(&FockVector<S>, &FockVector<S>) -> FockVector<S>,
    ) -> Result<Self, FockError> {
        self.check_order(other)?;
        let order = self.order();
        let mut out = Self::zero(order);
        for a in 0..=order {
            if self.coeffs[a].is_zero() {
                continue;
            }
            for b in 0..=order - a {
                if other.coeffs[b].is_zero() {
                    continue;
                }
                let p = product(&self.coeffs[a], &other.coeffs[b]);
                out.coeffs[a + b].add_assign(&p);
            }
        }
        Ok(out)
    }

    /// Series ring product over the Wick product.
    pub fn wick_mul(&self, other: &Self) -> Result<Self, FockError> {
        self.convolve(other, FockVector::wick_product)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mode::{ModeIndex, MultiIndex};
    use crate::scalar::ratio;

    #[test]
    fn unit_is_neutral() {
        let x = FockVector::<Rational>::mode(ModeIndex::primal(1, 1), ratio(2, 1));
        let mut s = HbarSeries::concentrated(x.clone(), 2);
        *s.coeff_mut(2) = x.wick_product(&x);
        let u = HbarSeries::unit(2);
        assert_eq!(u.wick_mul(&s).unwrap(), s);
    }

    #[test]
    fn truncates_at_order() {
        let x = FockVector::<Rational>::monomial(MultiIndex::single(ModeIndex::primal(1, 0)), ratio(1, 1));
        let mut s = HbarSeries::zero(1);
        *s.coeff_mut(1) = x;
        let sq = s.wick_mul(&s).unwrap();
        assert!(sq.is_zero(), "ħ·ħ vanishes mod ħ²");
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = HbarSeries::<Rational>::unit(2);
        let b = HbarSeries::<Rational>::unit(3);
        assert!(matches!(a.wick_mul(&b), Err(FockError::OrderMismatch { left: 2, right: 3 })));
    }
}
