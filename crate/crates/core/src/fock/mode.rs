//! Fourier modes of the loop Hilbert space and symmetrized multi-indices.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

/// One basis direction `e_{i,k}` of `H` (or of its dual copy `H*`).
///
/// Ordering is lexicographic on `(coord, freq, dual)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    /// Coordinate of `R^d`, 1-based.
    pub coord: u16,
    pub freq: i32,
    pub dual: bool,
}

impl ModeIndex {
    pub const fn primal(coord: u16, freq: i32) -> Self {
        ModeIndex { coord, freq, dual: false }
    }

    pub const fn dual(coord: u16, freq: i32) -> Self {
        ModeIndex { coord, freq, dual: true }
    }

    /// The same `(coord, freq)` on the other side of `H ⊕ H*`.
    pub const fn twin(self) -> Self {
        ModeIndex { dual: !self.dual, ..self }
    }

    pub const fn as_primal(self) -> Self {
        ModeIndex { dual: false, ..self }
    }

    /// `λk² + 1` with `λ = 4π²`: the inverse squared L² norm of the mode.
    pub fn sobolev_weight(self) -> f64 {
        1.0 + 4.0 * PI * PI * (self.freq as f64).powi(2)
    }

    /// Scalar profile of the normalized basis function at `s`.
    ///
    /// `√2 cos(2πks)/√(1+4π²k²)` for `k > 0`, `√2 sin(2πks)/√(1+4π²k²)` for
    /// `k < 0`, and the constant 1 for `k = 0`. Dual modes share the profile
    /// of their primal twin.
    pub fn profile(self, s: f64) -> f64 {
        basis_derivative(self.freq, 0, s)
    }

    /// `sup_s |e^{(m)}(s)|` in closed form.
    pub fn derivative_sup(self, order: u32) -> f64 {
        if self.freq == 0 {
            return if order == 0 { 1.0 } else { 0.0 };
        }
        let omega = 2.0 * PI * self.freq.unsigned_abs() as f64;
        normalization(self.freq) * omega.powi(order as i32)
    }

    /// Vector-valued evaluation `e_mode(s) ∈ R^d`.
    pub fn eval(self, s: f64, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        let c = self.coord as usize;
        assert!(c >= 1 && c <= d, "coordinate {c} outside 1..={d}");
        v[c - 1] = self.profile(s);
        v
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.coord, self.freq, u8::from(self.dual))
    }
}

/// Normalization constant making the Fourier modes H-orthonormal.
pub fn normalization(freq: i32) -> f64 {
    if freq == 0 {
        1.0
    } else {
        (2.0 / (1.0 + 4.0 * PI * PI * (freq as f64).powi(2))).sqrt()
    }
}

/// `d^m/ds^m` of the scalar profile of frequency `freq`, at `s`.
pub fn basis_derivative(freq: i32, order: u32, s: f64) -> f64 {
    if freq == 0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    let omega = 2.0 * PI * freq as f64;
    let phase = omega * s;
    // derivative of cos cycles cos, -sin, -cos, sin; of sin cycles sin, cos, -sin, -cos
    let base = if freq > 0 {
        match order % 4 {
            0 => phase.cos(),
            1 => -phase.sin(),
            2 => -phase.cos(),
            _ => phase.sin(),
        }
    } else {
        match order % 4 {
            0 => phase.sin(),
            1 => phase.cos(),
            2 => -phase.sin(),
            _ => -phase.cos(),
        }
    };
    normalization(freq) * omega.powi(order as i32) * base
}

/// Global truncation of the mode set: coordinates `1..=d`, `|freq| ≤ k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub d: u16,
    pub k_max: i32,
}

impl Truncation {
    pub const fn new(d: u16, k_max: i32) -> Self {
        Truncation { d, k_max }
    }

    pub fn contains(&self, mode: ModeIndex) -> bool {
        mode.coord >= 1 && mode.coord <= self.d && mode.freq.abs() <= self.k_max
    }

    /// All primal modes in canonical order.
    pub fn primal_modes(&self) -> Vec<ModeIndex> {
        let mut out = Vec::new();
        for coord in 1..=self.d {
            for freq in -self.k_max..=self.k_max {
                out.push(ModeIndex::primal(coord, freq));
            }
        }
        out
    }

    /// Primal and dual modes in canonical order.
    pub fn doubled_modes(&self) -> Vec<ModeIndex> {
        let mut out: Vec<_> = self
            .primal_modes()
            .into_iter()
            .flat_map(|m| [m, m.twin()])
            .collect();
        out.sort();
        out
    }
}

/// A finite multiset of modes: one symmetrized monomial `ê_μ`.
///
/// Entries are strictly sorted with positive multiplicities. The empty
/// multi-index is the vacuum. Ordering is graded: by degree first, then
/// lexicographically by entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    entries: Vec<(ModeIndex, u32)>,
    degree: u32,
}

impl MultiIndex {
    pub fn vacuum() -> Self {
        MultiIndex::default()
    }

    pub fn single(mode: ModeIndex) -> Self {
        MultiIndex { entries: vec![(mode, 1)], degree: 1 }
    }

    pub fn power(mode: ModeIndex, mult: u32) -> Self {
        if mult == 0 {
            return Self::vacuum();
        }
        MultiIndex { entries: vec![(mode, mult)], degree: mult }
    }

    /// Build from an arbitrary list of modes (repetitions allowed).
    pub fn from_modes<I: IntoIterator<Item = ModeIndex>>(modes: I) -> Self {
        let mut v: Vec<ModeIndex> = modes.into_iter().collect();
        v.sort();
        let mut entries: Vec<(ModeIndex, u32)> = Vec::new();
        for m in v {
            match entries.last_mut() {
                Some((last, mult)) if *last == m => *mult += 1,
                _ => entries.push((m, 1)),
            }
        }
        let degree = entries.iter().map(|e| e.1).sum();
        MultiIndex { entries, degree }
    }

    /// Build from `(mode, multiplicity)` pairs; zero multiplicities are dropped
    /// and repeated modes merged.
    pub fn from_pairs<I: IntoIterator<Item = (ModeIndex, u32)>>(pairs: I) -> Self {
        let mut v: Vec<(ModeIndex, u32)> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        v.sort();
        let mut entries: Vec<(ModeIndex, u32)> = Vec::with_capacity(v.len());
        for (m, k) in v {
            match entries.last_mut() {
                Some((last, mult)) if *last == m => *mult += k,
                _ => entries.push((m, k)),
            }
        }
        let degree = entries.iter().map(|e| e.1).sum();
        MultiIndex { entries, degree }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_vacuum(&self) -> bool {
        self.degree == 0
    }

    pub fn entries(&self) -> &[(ModeIndex, u32)] {
        &self.entries
    }

    pub fn multiplicity(&self, mode: ModeIndex) -> u32 {
        self.entries
            .binary_search_by(|e| e.0.cmp(&mode))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Modes with repetition, in canonical order.
    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        self.entries
            .iter()
            .flat_map(|&(m, k)| std::iter::repeat_n(m, k as usize))
    }

    /// Multiset union `μ ⊎ ν`.
    pub fn union(&self, other: &MultiIndex) -> MultiIndex {
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    entries.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    entries.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    entries.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        entries.extend_from_slice(&a[i..]);
        entries.extend_from_slice(&b[j..]);
        MultiIndex { entries, degree: self.degree + other.degree }
    }

    /// Remove one copy of `mode`; returns its former multiplicity and the
    /// lowered multi-index, or `None` if the mode is absent.
    pub fn remove_one(&self, mode: ModeIndex) -> Option<(u32, MultiIndex)> {
        let pos = self.entries.binary_search_by(|e| e.0.cmp(&mode)).ok()?;
        let mult = self.entries[pos].1;
        let mut entries = self.entries.clone();
        if mult == 1 {
            entries.remove(pos);
        } else {
            entries[pos].1 -= 1;
        }
        Some((mult, MultiIndex { entries, degree: self.degree - 1 }))
    }

    /// Evaluate the monomial `Π x_m^{μ(m)}` with the given coordinate lookup.
    pub fn eval_with(&self, mut lookup: impl FnMut(ModeIndex) -> f64) -> f64 {
        self.entries
            .iter()
            .map(|&(m, k)| lookup(m).powi(k as i32))
            .product()
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, k) in &self.entries {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{m}^{k}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// H inner product `∫fg + ∫f'g'` by the periodic trapezoid rule.
    fn h_inner(a: i32, b: i32, n: usize) -> f64 {
        let h = 1.0 / n as f64;
        (0..n)
            .map(|j| {
                let s = j as f64 * h;
                basis_derivative(a, 0, s) * basis_derivative(b, 0, s)
                    + basis_derivative(a, 1, s) * basis_derivative(b, 1, s)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn constant_mode_is_one() {
        for s in [0.0, 0.13, 0.5, 0.99] {
            assert_eq!(ModeIndex::primal(1, 0).eval(s, 2), vec![1.0, 0.0]);
        }
    }

    #[test]
    fn gram_matrix_is_identity() {
        for a in -3..=3 {
            for b in -3..=3 {
                let g = h_inner(a, b, 4096);
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-10, "G[{a},{b}] = {g}");
            }
        }
    }

    #[test]
    fn sup_bound_holds() {
        for k in -3..=3 {
            let bound = 2f64.sqrt() / (1.0 + 4.0 * PI * PI * (k as f64).powi(2)).sqrt();
            let bound = if k == 0 { 1.0 } else { bound };
            let m = ModeIndex::primal(1, k);
            let sup = (0..1000).map(|j| m.profile(j as f64 / 1000.0).abs()).fold(0.0, f64::max);
            assert!(sup <= bound + 1e-15);
            assert!((m.derivative_sup(0) - bound).abs() < 1e-15);
        }
    }

    #[test]
    fn second_derivative_is_eigen() {
        for k in [-2, 1, 3] {
            let s = 0.317;
            let lhs = basis_derivative(k, 2, s);
            let rhs = -4.0 * PI * PI * (k * k) as f64 * basis_derivative(k, 0, s);
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn dual_profile_matches_primal() {
        let p = ModeIndex::primal(2, -3);
        assert_eq!(p.profile(0.3), p.twin().profile(0.3));
    }

    #[test]
    fn multiset_ops() {
        let a = ModeIndex::primal(1, 1);
        let b = ModeIndex::dual(2, -1);
        let mu = MultiIndex::from_modes([b, a, a]);
        assert_eq!(mu.degree(), 3);
        assert_eq!(mu.multiplicity(a), 2);
        let nu = MultiIndex::single(a);
        let u = mu.union(&nu);
        assert_eq!(u.multiplicity(a), 3);
        assert_eq!(u, MultiIndex::from_pairs([(a, 3), (b, 1)]));
        let (m, low) = u.remove_one(b).unwrap();
        assert_eq!(m, 1);
        assert_eq!(low, MultiIndex::power(a, 3));
        assert!(low.remove_one(b).is_none());
    }

    #[test]
    fn graded_order() {
        let a = ModeIndex::primal(2, 3);
        let b = ModeIndex::primal(1, 0);
        assert!(MultiIndex::single(a) < MultiIndex::power(b, 2));
        assert!(MultiIndex::vacuum() < MultiIndex::single(b));
    }
}
