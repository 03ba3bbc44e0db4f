use super::mode::MultiIndex;
use super::vector::{FockVector, ModeMap};
use crate::exec::Exec;
use crate::scalar::Scalar;

/// Truncated Wick exponential `Φ_{γ,γ*} = Σ_{n≤N} (γ⊕γ*)^{:n:}/n!`.
///
/// `gamma` carries primal coefficients and `gamma_star` dual ones; keys of
/// `gamma_star` are taken as dual modes whatever their flag.
pub fn wick_exponential<S: Scalar>(gamma: &ModeMap<S>, gamma_star: &ModeMap<S>, max_degree: u32) -> FockVector<S> {
    let linear = FockVector::from_terms(
        gamma
            .iter()
            .map(|(m, c)| (MultiIndex::single(m.as_primal()), c.clone()))
            .chain(gamma_star.iter().map(|(m, c)| (MultiIndex::single(m.as_primal().twin()), c.clone()))),
    );
    let mut out = FockVector::vacuum();
    let mut power = FockVector::vacuum();
    for n in 1..=u64::from(max_degree) {
        if linear.is_zero() {
            break;
        }
        power = power.wick_product_with(&linear, Some(max_degree), Exec::Sequential).scale(&S::one().div_u64(n));
        out.add_assign(&power);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mode::ModeIndex;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn zero_argument_gives_vacuum() {
        let e = ModeMap::<Rational>::new();
        assert_eq!(wick_exponential(&e, &e, 5), FockVector::vacuum());
    }

    #[test]
    fn first_order() {
        let m = ModeIndex::primal(1, 1);
        let mut g = ModeMap::new();
        g.insert(m, ratio(3, 7));
        let phi = wick_exponential(&g, &ModeMap::new(), 1);
        let expect = FockVector::from_terms([
            (MultiIndex::vacuum(), ratio(1, 1)),
            (MultiIndex::single(m), ratio(3, 7)),
        ]);
        assert_eq!(phi, expect);
    }

    #[test]
    fn single_mode_coefficients_are_taylor() {
        let m = ModeIndex::primal(1, 0);
        let mut g = ModeMap::new();
        g.insert(m, ratio(2, 1));
        let phi = wick_exponential(&g, &ModeMap::new(), 4);
        // c^n / n!
        for (n, expect) in [(0, ratio(1, 1)), (1, ratio(2, 1)), (2, ratio(2, 1)), (3, ratio(4, 3)), (4, ratio(2, 3))] {
            assert_eq!(phi.coefficient(&MultiIndex::power(m, n)), expect);
        }
    }
}
