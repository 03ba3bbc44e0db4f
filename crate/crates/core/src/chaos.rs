//! Stratonovich chaos of basis-span Fock vectors, evaluated two ways.
//!
//! The spectral evaluator substitutes the Gaussian coefficients `ξ` into
//! each monomial. The quadrature evaluator integrates the kernel against
//! the sampled loop on a uniform grid with the signed subset sum over
//! second-derivative slots, with `D²` taken by a fourth-order periodic
//! finite-difference stencil.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::fock::{FockVector, ModeIndex, ModeMap, MultiIndex};
use crate::gaussian::{loop_eval, LoopSample};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ChaosError {
    #[error("n_grid must be at least 64, got {0}")]
    Grid(usize),
    #[error("fd_epsilon must lie in (0, 0.1], got {0}")]
    Epsilon(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EvalMethod {
    #[default]
    Spectral,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChaosEvalConfig {
    pub n_grid: usize,
    pub method: EvalMethod,
    pub fd_epsilon: f64,
}

impl Default for ChaosEvalConfig {
    fn default() -> Self {
        ChaosEvalConfig { n_grid: 4096, method: EvalMethod::Spectral, fd_epsilon: 1e-3 }
    }
}

impl ChaosEvalConfig {
    pub fn new(n_grid: usize, method: EvalMethod, fd_epsilon: f64) -> Result<Self, ChaosError> {
        if n_grid < 64 {
            return Err(ChaosError::Grid(n_grid));
        }
        if !(fd_epsilon > 0.0 && fd_epsilon <= 0.1) {
            return Err(ChaosError::Epsilon(fd_epsilon));
        }
        Ok(ChaosEvalConfig { n_grid, method, fd_epsilon })
    }
}

/// `Σ_μ c_μ Π ξ(mode)^{μ(mode)}`. Modes absent from `xi` count as 0.
pub fn chaos_eval_spectral<S: Scalar>(f: &FockVector<S>, xi: &ModeMap<f64>) -> f64 {
    f.eval_with(|m| xi.get(&m).copied().unwrap_or(0.0))
}

/// Dispatch on the configured method.
pub fn chaos_eval<S: Scalar>(f: &FockVector<S>, sample: &LoopSample, cfg: &ChaosEvalConfig) -> f64 {
    match cfg.method {
        EvalMethod::Spectral => chaos_eval_spectral(f, &spectral_coordinates(sample)),
        EvalMethod::Quadrature => chaos_eval_quadrature(f, sample, cfg),
    }
}

/// `ξ` of a sample extended to dual modes, which pair with the same loop.
pub fn spectral_coordinates(sample: &LoopSample) -> ModeMap<f64> {
    let mut xi = sample.xi.clone();
    for (m, v) in &sample.xi {
        xi.insert(m.twin(), *v);
    }
    xi
}

/// `B` at the quadrature nodes `j / n`.
pub struct QuadratureGrid {
    n: usize,
    values: Vec<Vec<f64>>,
}

impl QuadratureGrid {
    pub fn new(sample: &LoopSample, n: usize) -> Self {
        let values = (0..n).map(|j| loop_eval(sample, j as f64 / n as f64)).collect();
        QuadratureGrid { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `max_j |B_coord(s_j)|` over all coordinates.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
    }

    fn trapezoid(&self, coord: u16, f: &[f64]) -> f64 {
        let c = coord as usize - 1;
        f.iter().zip(&self.values).map(|(a, b)| a * b[c]).sum::<f64>() / self.n as f64
    }

    /// `(∫ e·B, ∫ D²e·B)` for one mode.
    pub fn mode_integrals(&self, mode: ModeIndex) -> (f64, f64) {
        let n = self.n;
        let e: Vec<f64> = (0..n).map(|j| mode.profile(j as f64 / n as f64)).collect();
        let h2 = (1.0 / n as f64).powi(2);
        let d2: Vec<f64> = (0..n)
            .map(|j| {
                let at = |o: isize| e[(j as isize + o).rem_euclid(n as isize) as usize];
                (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * h2)
            })
            .collect();
        (self.trapezoid(mode.coord, &e), self.trapezoid(mode.coord, &d2))
    }
}

/// Degree-one chaos `(1 + 4π²k²)·∫ e_mode·B_coord` by trapezoid quadrature.
pub fn stratonovich_pairing(mode: ModeIndex, sample: &LoopSample, cfg: &ChaosEvalConfig) -> f64 {
    let grid = QuadratureGrid::new(sample, cfg.n_grid);
    stratonovich_pairing_on(mode, &grid)
}

pub fn stratonovich_pairing_on(mode: ModeIndex, grid: &QuadratureGrid) -> f64 {
    let n = grid.len();
    let e: Vec<f64> = (0..n).map(|j| mode.profile(j as f64 / n as f64)).collect();
    mode.sobolev_weight() * grid.trapezoid(mode.coord, &e)
}

/// Chaos by quadrature: each monomial is the signed sum over subsets `J`
/// of its tensor slots, slots outside `J` carrying `D²`.
pub fn chaos_eval_quadrature<S: Scalar>(f: &FockVector<S>, sample: &LoopSample, cfg: &ChaosEvalConfig) -> f64 {
    let grid = QuadratureGrid::new(sample, cfg.n_grid);
    chaos_eval_quadrature_on(f, &grid)
}

pub fn chaos_eval_quadrature_on<S: Scalar>(f: &FockVector<S>, grid: &QuadratureGrid) -> f64 {
    let integrals: BTreeMap<ModeIndex, (f64, f64)> = f
        .support()
        .into_iter()
        .map(|m| (m, grid.mode_integrals(m.as_primal())))
        .collect();
    f.iter()
        .map(|(mu, c)| c.to_f64() * subset_sum(mu, &integrals))
        .sum()
}

fn subset_sum(mu: &MultiIndex, integrals: &BTreeMap<ModeIndex, (f64, f64)>) -> f64 {
    let slots: Vec<(f64, f64)> = mu.modes().map(|m| integrals[&m]).collect();
    let n = slots.len();
    let mut total = 0.0;
    for mask in 0u64..(1u64 << n) {
        let outside = n - mask.count_ones() as usize;
        let mut term = if outside % 2 == 0 { 1.0 } else { -1.0 };
        for (j, (plain, second)) in slots.iter().enumerate() {
            term *= if mask >> j & 1 == 1 { plain } else { second };
        }
        total += term;
    }
    total
}

/// Central difference of the spectral chaos along `h`:
/// `[I(ξ + εh) − I(ξ − εh)] / 2ε`.
pub fn gateaux_derivative_fd<S: Scalar>(f: &FockVector<S>, xi: &ModeMap<f64>, h: &ModeMap<f64>, eps: f64) -> f64 {
    let shifted = |sign: f64| {
        let mut x = xi.clone();
        for (m, v) in h {
            *x.entry(*m).or_insert(0.0) += sign * eps * v;
        }
        chaos_eval_spectral(f, &x)
    };
    (shifted(1.0) - shifted(-1.0)) / (2.0 * eps)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Tail of a geometric chaos series against its majorant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalConvergence {
    /// `Σ_{n>n₀} |I(Fⁿ)|` by quadrature.
    pub tail: f64,
    /// `Σ_{n>n₀} (2μ𝐌)ⁿ`.
    pub majorant: f64,
    /// `2μ𝐌`, which must be below 1.
    pub rate: f64,
}

/// Builds `F = Σ_{n≤n_max} (μ/β)ⁿ ê_{mode^n}`, with `β` bounding both
/// `|e|` and `|e''|`, and compares its chaos tail past `n0` with the
/// geometric majorant. `mu_fraction ∈ (0,1)` sets `μ = mu_fraction/(2𝐌)`.
pub fn normal_convergence_check(
    mode: ModeIndex,
    grid: &QuadratureGrid,
    mu_fraction: f64,
    n0: u32,
    n_max: u32,
) -> NormalConvergence {
    let big_m = grid.sup_abs();
    let mu = mu_fraction / (2.0 * big_m);
    let beta = mode.derivative_sup(0).max(mode.derivative_sup(2));
    let rate = 2.0 * mu * big_m;
    let mut tail = 0.0;
    let mut majorant = 0.0;
    for n in (n0 + 1)..=n_max {
        let term = FockVector::monomial(MultiIndex::power(mode, n), (mu / beta).powi(n as i32));
        tail += chaos_eval_quadrature_on(&term, grid).abs();
        majorant += rate.powi(n as i32);
    }
    NormalConvergence { tail, majorant, rate }
}

/// Evaluates `F` at `5·#monomials` Gaussian points and returns how many
/// evaluations were nonzero. A nonzero `F` that scores 0 is a false
/// positive of the identity test.
pub fn injectivity_probe<S: Scalar>(f: &FockVector<S>, seed: u64) -> usize {
    let draws = 5 * f.len().max(1);
    let support: Vec<ModeIndex> = f.support().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..draws)
        .filter(|_| {
            let xi: ModeMap<f64> = support.iter().map(|m| (*m, StandardNormal.sample(&mut rng))).collect();
            chaos_eval_spectral(f, &xi) != 0.0
        })
        .count()
}
