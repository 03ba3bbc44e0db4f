//! The Gaussian loop `B` on the circle: covariance kernel, spectral sampler,
//! and Monte-Carlo diagnostics.
//!
//! `B = Σ ξ_{i,k} e_{i,k}` with iid standard normal `ξ`, so the covariance of
//! the sampler truncated at `|k| ≤ K` is the spectral partial sum
//! `G_K(s,t) = 1 + Σ_{k=1}^{K} 2cos(2πk(s−t))/(1+4π²k²)`, which tends to the
//! Green kernel of `−d²/ds² + 1` on the circle.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::fock::{ModeIndex, ModeMap};

/// Samples per reduction chunk. Fixed so sums do not depend on threads.
const MC_CHUNK: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum SampleError {
    #[error("K_mc must be at least 1, got {0}")]
    Cutoff(i32),
    #[error("grid size M must be at least 8, got {0}")]
    Grid(usize),
    #[error("dimension d must be at least 1")]
    Dimension,
}

/// Closed form `G(x) = α'e^{−x} + β'e^{x}` on `x ∈ [0,1)`, `x = (s − t) mod 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenKernel {
    /// Coefficient of `e^{−x}` in the positive branch.
    pub alpha_pos: f64,
    /// Coefficient of `e^{x}` in the positive branch.
    pub beta_pos: f64,
}

impl Default for GreenKernel {
    fn default() -> Self {
        GreenKernel {
            alpha_pos: 1.0 / (2.0 * (1.0 - (-1.0f64).exp())),
            beta_pos: 1.0 / (2.0 * (1.0f64.exp() - 1.0)),
        }
    }
}

impl GreenKernel {
    /// Coefficients `(α, β)` of the negative-sign convention, whose jump
    /// condition has the opposite orientation. Their kernel is `−G`.
    pub fn negative_branch(&self) -> (f64, f64) {
        (-self.alpha_pos, -self.beta_pos)
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let x = (s - t).rem_euclid(1.0);
        self.alpha_pos * (-x).exp() + self.beta_pos * x.exp()
    }

    /// Hyperbolic form `cosh(x − 1/2) / (2 sinh(1/2))`.
    pub fn eval_hyperbolic(&self, s: f64, t: f64) -> f64 {
        let x = (s - t).rem_euclid(1.0);
        (x - 0.5).cosh() / (2.0 * 0.5f64.sinh())
    }
}

pub fn green_kernel(s: f64, t: f64) -> f64 {
    GreenKernel::default().eval_hyperbolic(s, t)
}

/// Spectral partial sum `G_K(s,t)`, the exact covariance of the sampler.
pub fn spectral_kernel(s: f64, t: f64, k_max: i32) -> f64 {
    let x = s - t;
    let mut acc = 0.0;
    // smallest terms first
    for k in (1..=k_max).rev() {
        let kf = k as f64;
        acc += 2.0 * (2.0 * PI * kf * x).cos() / (1.0 + 4.0 * PI * PI * kf * kf);
    }
    1.0 + acc
}

/// One realization of the loop: spectral coefficients and grid values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSample {
    pub d: u16,
    pub k_mc: i32,
    pub seed: u64,
    pub index: u64,
    /// `ξ` on primal modes, `|freq| ≤ k_mc`.
    pub xi: ModeMap<f64>,
    /// `values[m][i] = B_{i+1}(m / M)`.
    pub values: Vec<Vec<f64>>,
}

impl LoopSample {
    pub fn grid_len(&self) -> usize {
        self.values.len()
    }

    pub fn grid_point(&self, m: usize) -> f64 {
        m as f64 / self.values.len() as f64
    }

    /// CSV rows `s,B_1(s),…,B_d(s)` on the grid.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s");
        for i in 1..=self.d {
            out.push_str(&format!(",B_{i}"));
        }
        out.push('\n');
        for (m, row) in self.values.iter().enumerate() {
            out.push_str(&format!("{:e}", self.grid_point(m)));
            for v in row {
                out.push_str(&format!(",{v:e}"));
            }
            out.push('\n');
        }
        out
    }

    /// Header needed to regenerate the sample.
    pub fn header_json(&self) -> String {
        let header = serde_json::json!({
            "d": self.d,
            "seed": self.seed,
            "sample_index": self.index,
            "K_mc": self.k_mc,
            "M": self.values.len(),
        });
        serde_json::to_string_pretty(&header).expect("header is plain JSON")
    }
}

/// Counter-based sampler: the normal attached to `(coord, freq)` in sample
/// `index` is a pure function of `(seed, index, coord, freq)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoopSampler {
    pub seed: u64,
    pub d: u16,
    pub k_mc: i32,
    pub m: usize,
}

impl LoopSampler {
    pub fn new(seed: u64, d: u16, k_mc: i32, m: usize) -> Result<Self, SampleError> {
        if d == 0 {
            return Err(SampleError::Dimension);
        }
        if k_mc < 1 {
            return Err(SampleError::Cutoff(k_mc));
        }
        if m < 8 {
            return Err(SampleError::Grid(m));
        }
        Ok(LoopSampler { seed, d, k_mc, m })
    }

    /// The normal keyed by `(index, coord, freq)`.
    pub fn normal(&self, index: u64, coord: u16, freq: i32) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let zigzag = ((freq << 1) ^ (freq >> 31)) as u32 as u128;
        let key = (zigzag << 16) | u128::from(coord - 1);
        // 256 words per key is far more than one normal ever consumes
        rng.set_word_pos(key * 256);
        StandardNormal.sample(&mut rng)
    }

    /// `ξ` of sample `index` on all primal modes.
    pub fn coefficients(&self, index: u64) -> ModeMap<f64> {
        let mut xi = ModeMap::new();
        for coord in 1..=self.d {
            for freq in -self.k_mc..=self.k_mc {
                xi.insert(ModeIndex::primal(coord, freq), self.normal(index, coord, freq));
            }
        }
        xi
    }

    /// `ξ` of sample `index` laid out as `[(coord − 1)·(2K_mc + 1) + freq + K_mc]`.
    fn dense_coefficients(&self, index: u64, out: &mut Vec<f64>) {
        out.clear();
        for coord in 1..=self.d {
            out.extend((-self.k_mc..=self.k_mc).map(|freq| self.normal(index, coord, freq)));
        }
    }

    pub fn sample(&self, index: u64) -> LoopSample {
        let xi = self.coefficients(index);
        let values = (0..self.m)
            .map(|m| spectral_sum(&xi, self.d, m as f64 / self.m as f64))
            .collect();
        LoopSample { d: self.d, k_mc: self.k_mc, seed: self.seed, index, xi, values }
    }
}

/// Sample number 0 of `(seed, K_mc, M)`.
pub fn sample_loop(seed: u64, d: u16, k_mc: i32, m: usize) -> Result<LoopSample, SampleError> {
    Ok(LoopSampler::new(seed, d, k_mc, m)?.sample(0))
}

fn spectral_sum(xi: &ModeMap<f64>, d: u16, s: f64) -> Vec<f64> {
    let mut out = vec![0.0; d as usize];
    for (mode, x) in xi {
        out[mode.coord as usize - 1] += x * mode.profile(s);
    }
    out
}

/// `B(s)` at an arbitrary point; reproduces the grid values exactly.
pub fn loop_eval(sample: &LoopSample, s: f64) -> Vec<f64> {
    spectral_sum(&sample.xi, sample.d, s)
}

/// A point of the loop seen through one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub coord: u16,
    pub s: f64,
}

/// MC estimate of one covariance with its standard error and the exact
/// sampler covariance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
}

impl CovarianceEstimate {
    /// `|estimate − target| / stderr`.
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.target).abs() / self.stderr
    }
}

/// Precomputed basis profiles at a list of points.
struct ProfileTable {
    k_mc: i32,
    rows: Vec<Vec<f64>>,
}

impl ProfileTable {
    fn new(points: impl IntoIterator<Item = f64>, k_mc: i32) -> Self {
        let rows = points
            .into_iter()
            .map(|s| (-k_mc..=k_mc).map(|k| ModeIndex::primal(1, k).profile(s)).collect())
            .collect();
        ProfileTable { k_mc, rows }
    }

    fn value(&self, xi: &[f64], coord: u16, point: usize) -> f64 {
        let width = 2 * self.k_mc as usize + 1;
        let start = (coord as usize - 1) * width;
        xi[start..start + width].iter().zip(&self.rows[point]).map(|(x, p)| x * p).sum()
    }
}

/// Run `stat(xi)` over `n` samples and return per-component sums, reduced
/// in fixed chunks.
fn mc_sums(
    sampler: &LoopSampler,
    n: usize,
    width: usize,
    exec: Exec,
    stat: impl Fn(&[f64], &mut [f64]) + Sync + Send,
) -> Vec<f64> {
    let n_chunks = n.div_ceil(MC_CHUNK);
    let partials = exec.map(n_chunks, |c| {
        let mut acc = vec![0.0; width];
        let mut row = vec![0.0; width];
        let mut xi = Vec::new();
        for i in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(n) {
            sampler.dense_coefficients(i as u64, &mut xi);
            stat(&xi, &mut row);
            for (a, r) in acc.iter_mut().zip(&row) {
                *a += r;
            }
        }
        acc
    });
    let mut total = vec![0.0; width];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// Empirical covariances `Cov(B_a(s), B_b(t))` for each probe pair.
pub fn estimate_covariances(
    sampler: &LoopSampler,
    n_samples: usize,
    pairs: &[(Probe, Probe)],
    exec: Exec,
) -> Vec<CovarianceEstimate> {
    let table = ProfileTable::new(pairs.iter().flat_map(|(a, b)| [a.s, b.s]), sampler.k_mc);
    // per pair: Σx, Σy, Σxy, Σ(xy)²
    let sums = mc_sums(sampler, n_samples, 4 * pairs.len(), exec, |xi, row| {
        for (p, (a, b)) in pairs.iter().enumerate() {
            let x = table.value(xi, a.coord, 2 * p);
            let y = table.value(xi, b.coord, 2 * p + 1);
            row[4 * p] = x;
            row[4 * p + 1] = y;
            row[4 * p + 2] = x * y;
            row[4 * p + 3] = (x * y) * (x * y);
        }
    });
    let n = n_samples as f64;
    pairs
        .iter()
        .enumerate()
        .map(|(p, (a, b))| {
            let (mx, my) = (sums[4 * p] / n, sums[4 * p + 1] / n);
            let mxy = sums[4 * p + 2] / n;
            let var_xy = (sums[4 * p + 3] / n - mxy * mxy).max(0.0);
            let target = if a.coord == b.coord { spectral_kernel(a.s, b.s, sampler.k_mc) } else { 0.0 };
            CovarianceEstimate {
                estimate: mxy - mx * my,
                stderr: (var_xy / (n - 1.0)).sqrt(),
                target,
            }
        })
        .collect()
}

/// Per-point empirical means of `B_1` with standard errors.
pub fn estimate_means(sampler: &LoopSampler, n_samples: usize, points: &[f64], exec: Exec) -> Vec<(f64, f64)> {
    let table = ProfileTable::new(points.iter().copied(), sampler.k_mc);
    let sums = mc_sums(sampler, n_samples, 2 * points.len(), exec, |xi, row| {
        for p in 0..points.len() {
            let x = table.value(xi, 1, p);
            row[2 * p] = x;
            row[2 * p + 1] = x * x;
        }
    });
    let n = n_samples as f64;
    (0..points.len())
        .map(|p| {
            let m = sums[2 * p] / n;
            let var = (sums[2 * p + 1] / n - m * m).max(0.0);
            (m, (var / (n - 1.0)).sqrt())
        })
        .collect()
}

/// `E|B(t) − B(s)|^{2p}` for a Gaussian vector with `d` iid coordinates of
/// variance `σ² = 2(G_K(0) − G_K(t − s))`.
pub fn gaussian_increment_moment(d: u16, sigma2: f64, p: u32) -> f64 {
    let prod: f64 = (0..p).map(|j| f64::from(d) + 2.0 * f64::from(j)).product();
    sigma2.powi(p as i32) * prod
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderRow {
    pub s: f64,
    pub t: f64,
    /// MC estimate of `E|B(t)−B(s)|^{2p} / |t−s|^p`.
    pub ratio: f64,
    pub stderr: f64,
    /// Gaussian closed form of the same ratio for the sampler.
    pub closed_form: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderTable {
    pub p: u32,
    pub rows: Vec<HolderRow>,
}

impl HolderTable {
    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// Standard error of the row attaining the max ratio.
    pub fn max_ratio_stderr(&self) -> f64 {
        self.rows
            .iter()
            .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .map_or(0.0, |r| r.stderr)
    }

    pub fn max_z_score(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.stderr > 0.0)
            .map(|r| (r.ratio - r.closed_form).abs() / r.stderr)
            .fold(0.0, f64::max)
    }
}

/// Monte-Carlo Hölder-moment ratios `E|B(t)−B(s)|^{2p} / |t−s|^p`.
///
/// Coincident points give ratio 0.
pub fn holder_moment_check(
    sampler: &LoopSampler,
    n_samples: usize,
    p: u32,
    pairs: &[(f64, f64)],
    exec: Exec,
) -> HolderTable {
    let table = ProfileTable::new(pairs.iter().flat_map(|&(s, t)| [s, t]), sampler.k_mc);
    let d = sampler.d;
    let sums = mc_sums(sampler, n_samples, 2 * pairs.len(), exec, |xi, row| {
        for q in 0..pairs.len() {
            let sq: f64 = (1..=d)
                .map(|c| {
                    let inc = table.value(xi, c, 2 * q + 1) - table.value(xi, c, 2 * q);
                    inc * inc
                })
                .sum();
            let v = sq.powi(p as i32);
            row[2 * q] = v;
            row[2 * q + 1] = v * v;
        }
    });
    let n = n_samples as f64;
    let rows = pairs
        .iter()
        .enumerate()
        .map(|(q, &(s, t))| {
            let gap = (t - s).abs();
            if gap == 0.0 {
                return HolderRow { s, t, ratio: 0.0, stderr: 0.0, closed_form: 0.0 };
            }
            let scale = gap.powi(p as i32);
            let mean = sums[2 * q] / n;
            let var = (sums[2 * q + 1] / n - mean * mean).max(0.0);
            let sigma2 = 2.0 * (spectral_kernel(0.0, 0.0, sampler.k_mc) - spectral_kernel(s, t, sampler.k_mc));
            HolderRow {
                s,
                t,
                ratio: mean / scale,
                stderr: (var / (n - 1.0)).sqrt() / scale,
                closed_form: gaussian_increment_moment(d, sigma2, p) / scale,
            }
        })
        .collect();
    HolderTable { p, rows }
}

/// Smallest eigenvalue of the sampler's covariance matrix on the `M`-point
/// grid. The matrix is circulant, so its eigenvalues are the cosine
/// transforms of its first row.
pub fn grid_covariance_min_eigenvalue(k_mc: i32, m: usize) -> f64 {
    let row: Vec<f64> = (0..m).map(|n| spectral_kernel(0.0, n as f64 / m as f64, k_mc)).collect();
    (0..m)
        .map(|j| {
            row.iter()
                .enumerate()
                .map(|(n, c)| c * (2.0 * PI * ((j * n) % m) as f64 / m as f64).cos())
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}
