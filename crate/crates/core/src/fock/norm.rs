//! Upper bounds for the weighted sup-derivative norms `‖F‖_{k,C}`.
//!
//! The norm sums, over degrees `n`, `Cⁿ` times the sup of all mixed
//! derivatives obtained by splitting the `n` variables into blocks and
//! differentiating each block up to order `k`. For a symmetrized monomial
//! every such derivative is bounded by the product of per-factor bounds, so
//!
//! ```text
//! ‖ê_μ‖_k ≤ P_k(n) · Π_j max_{m ≤ k} sup|e_j^{(m)}|
//! ```
//!
//! where `P_k(n) = Σ_l l!·S(n,l)·(k+1)^l` counts ordered block partitions with
//! an order in `0..=k` per block. Counting ordered partitions dominates the
//! unordered count as well.

use super::mode::MultiIndex;
use super::vector::FockVector;
use crate::scalar::Scalar;

/// Number of (ordered block partition, per-block order) combinations.
pub fn partition_order_count(n: u32, k: u32) -> f64 {
    // Stirling numbers of the second kind, row by row.
    let n = n as usize;
    let mut stirling = vec![vec![0.0f64; n + 1]; n + 1];
    stirling[0][0] = 1.0;
    for i in 1..=n {
        for l in 1..=i {
            stirling[i][l] = l as f64 * stirling[i - 1][l] + stirling[i - 1][l - 1];
        }
    }
    let mut total = 0.0;
    let mut lfact = 1.0;
    for l in 0..=n {
        if l > 0 {
            lfact *= l as f64;
        }
        total += lfact * stirling[n][l] * ((k + 1) as f64).powi(l as i32);
    }
    total
}

/// Bound on `‖ê_μ‖_k` for one symmetrized monomial.
pub fn monomial_norm_bound(mu: &MultiIndex, k: u32) -> f64 {
    let factors: f64 = mu
        .entries()
        .iter()
        .map(|&(m, mult)| {
            let b = (0..=k).map(|o| m.derivative_sup(o)).fold(0.0, f64::max);
            b.powi(mult as i32)
        })
        .product();
    partition_order_count(mu.degree(), k) * factors
}

/// Sound upper bound on `‖F‖_{k,C}` by the triangle inequality over monomials.
pub fn weighted_norm_upper<S: Scalar>(f: &FockVector<S>, k: u32, c: f64) -> f64 {
    f.iter()
        .map(|(mu, coeff)| coeff.to_f64().abs() * c.powi(mu.degree() as i32) * monomial_norm_bound(mu, k))
        .sum()
}

/// Smallest `(k0, C0)` on a grid such that `lhs(i) ≤ K · rhs(i, k0, C0)` for
/// every instance `i`. Grids are scanned in increasing `(k0, C0)` order.
pub fn search_continuity_constants(
    n_instances: usize,
    lhs: impl Fn(usize) -> f64,
    rhs: impl Fn(usize, u32, f64) -> f64,
    k_grid: &[u32],
    c_grid: &[f64],
    constant: f64,
) -> Option<(u32, f64, f64)> {
    let lhs_vals: Vec<f64> = (0..n_instances).map(&lhs).collect();
    for &k0 in k_grid {
        for &c0 in c_grid {
            let worst = (0..n_instances)
                .map(|i| {
                    let r = rhs(i, k0, c0);
                    if lhs_vals[i] == 0.0 {
                        0.0
                    } else {
                        lhs_vals[i] / r
                    }
                })
                .fold(0.0, f64::max);
            if worst <= constant {
                return Some((k0, c0, worst));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mode::ModeIndex;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn vacuum_has_unit_norm() {
        let v = FockVector::<Rational>::vacuum();
        for k in 0..4 {
            for c in [0.5, 1.0, 7.0] {
                assert_eq!(weighted_norm_upper(&v, k, c), 1.0);
            }
        }
    }

    #[test]
    fn partition_counts() {
        // k = 0: ordered Bell (Fubini) numbers 1, 1, 3, 13, 75
        let fubini: Vec<f64> = (0..5).map(|n| partition_order_count(n, 0)).collect();
        assert_eq!(fubini, vec![1.0, 1.0, 3.0, 13.0, 75.0]);
        // n = 1: one block with k+1 orders
        assert_eq!(partition_order_count(1, 3), 4.0);
    }

    #[test]
    fn monotone_in_c() {
        let f = FockVector::from_terms([
            (MultiIndex::from_modes([ModeIndex::primal(1, 2), ModeIndex::dual(1, -1)]), ratio(3, 2)),
            (MultiIndex::single(ModeIndex::primal(2, 0)), ratio(-1, 5)),
        ]);
        let mut last = 0.0;
        for c in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let v = weighted_norm_upper(&f, 2, c);
            assert!(v >= last);
            last = v;
        }
    }
}
