use std::f64::consts::E;

use super::{Ctx, Relation};
use crate::gaussian::{
    estimate_covariances, estimate_means, grid_covariance_min_eigenvalue, holder_moment_check, loop_eval,
    spectral_kernel, GreenKernel, LoopSampler, Probe,
};

const SPECTRAL_CUTOFF: i32 = 200;

pub(super) fn run(ctx: &mut Ctx<'_>) {
    kernel(ctx);
    sampler_checks(ctx);
}

fn kernel(ctx: &mut Ctx<'_>) {
    let g = GreenKernel::default();
    let alpha_mag = (-1.0 / (2.0 * (1.0 - (-1.0f64).exp()))).abs();
    let beta_mag = (1.0 / (2.0 * (1.0 - E))).abs();
    let coeff = (g.alpha_pos.abs() - alpha_mag).abs().max((g.beta_pos.abs() - beta_mag).abs());
    ctx.record("green-coefficients", "green-kernel", coeff, Relation::AtMost, 1e-15, 2);

    let pts: Vec<f64> = (0..64).map(|i| f64::from(i) / 64.0).collect();
    let forms = pts
        .iter()
        .flat_map(|&s| pts.iter().map(move |&t| (s, t)))
        .map(|(s, t)| (g.eval(s, t) - g.eval_hyperbolic(s, t)).abs())
        .fold(0.0, f64::max);
    ctx.record("green-closed-forms", "green-kernel", forms, Relation::AtMost, 1e-14, pts.len() * pts.len());

    // periodicity and unit jump of the derivative, for both sign conventions
    let (a_neg, b_neg) = g.negative_branch();
    let jump = |a: f64, b: f64| {
        let value_gap = (a + b) - (a / E + b * E);
        let deriv_gap = (-a / E + b * E) - (-a + b);
        (value_gap, deriv_gap)
    };
    let (v_pos, d_pos) = jump(g.alpha_pos, g.beta_pos);
    let (v_neg, d_neg) = jump(a_neg, b_neg);
    ctx.record("green-jump-positive", "green-kernel", v_pos.abs().max((d_pos - 1.0).abs()), Relation::AtMost, 1e-14, 1);
    ctx.record("green-jump-negative", "green-kernel", v_neg.abs().max((d_neg + 1.0).abs()), Relation::AtMost, 1e-14, 1);

    let n_pairs = 25;
    let mut rng = ctx.rng("spectral-kernel", 0);
    let spectral = (0..n_pairs)
        .map(|_| {
            let (s, t): (f64, f64) = (rand::Rng::random(&mut rng), rand::Rng::random(&mut rng));
            (spectral_kernel(s, t, SPECTRAL_CUTOFF) - g.eval_hyperbolic(s, t)).abs()
        })
        .fold(0.0, f64::max);
    ctx.record("spectral-kernel", "green-kernel", spectral, Relation::AtMost, 1e-4, n_pairs);

    // tail of the spectral sum at the sampler cutoff
    let k_mc = ctx.cfg.mc.k_mc;
    let tail = pts
        .iter()
        .map(|&t| (spectral_kernel(0.0, t, k_mc) - g.eval_hyperbolic(0.0, t)).abs())
        .fold(0.0, f64::max);
    let bound = 1.0 / (2.0 * std::f64::consts::PI.powi(2) * f64::from(k_mc));
    ctx.record("truncation-factor", "green-kernel", tail / bound, Relation::AtMost, 1.0, pts.len());

    let psd = grid_covariance_min_eigenvalue(k_mc, ctx.cfg.mc.m);
    ctx.record("grid-psd", "green-kernel", psd, Relation::AtLeast, -1e-10, 1);
}

fn sampler_checks(ctx: &mut Ctx<'_>) {
    let mc = ctx.cfg.mc.clone();
    let d = ctx.cfg.d;
    let exec = ctx.exec;
    let sampler = LoopSampler::new(mc.seed, d, mc.k_mc, mc.m).expect("validated config");
    let n = mc.n_samples;

    let n_det = 4;
    let mismatches: usize = (0..n_det)
        .map(|i| {
            let a = sampler.sample(i);
            let b = sampler.sample(i);
            let mut bad = usize::from(a != b);
            for m in 0..a.grid_len() {
                bad += usize::from(loop_eval(&a, a.grid_point(m)) != a.values[m]);
            }
            bad
        })
        .sum();
    ctx.exact("sampler-determinism", "gaussian-sampler", mismatches as f64, n_det as usize);

    let points: Vec<f64> = (0..16).map(|i| f64::from(i) / 16.0).collect();
    let means = estimate_means(&sampler, n, &points, exec);
    let worst_mean = means.iter().map(|(m, _)| m.abs()).fold(0.0, f64::max);
    ctx.record("mean-zero", "gaussian-sampler", worst_mean, Relation::AtMost, 4.0 / (n as f64).sqrt(), n);

    let probe = |coord, s| Probe { coord, s };
    let base = [(0.1, 0.1), (0.1, 0.35), (0.2, 0.7), (0.5, 0.9), (0.0, 0.5), (0.3, 0.31)];
    let pairs: Vec<(Probe, Probe)> = base.iter().map(|&(s, t)| (probe(1, s), probe(1, t))).collect();
    let cov = estimate_covariances(&sampler, n, &pairs, exec);
    let z = cov.iter().map(|c| c.z_score()).fold(0.0, f64::max);
    ctx.record("covariance", "gaussian-sampler", z, Relation::AtMost, 3.0, n);

    // translated copies of the same pairs, compared with each other
    let shift = 0.437;
    let moved: Vec<(Probe, Probe)> =
        base.iter().map(|&(s, t)| (probe(1, (s + shift) % 1.0), probe(1, (t + shift) % 1.0))).collect();
    let cov_moved = estimate_covariances(&sampler, n, &moved, exec);
    let stationarity = cov
        .iter()
        .zip(&cov_moved)
        .map(|(a, b)| (a.estimate - b.estimate).abs() / (a.stderr.hypot(b.stderr)).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    ctx.record("stationarity", "gaussian-sampler", stationarity, Relation::AtMost, 3.0, n);

    if d >= 2 {
        let cross: Vec<(Probe, Probe)> = base.iter().map(|&(s, t)| (probe(1, s), probe(2, t))).collect();
        let z_cross = estimate_covariances(&sampler, n, &cross, exec).iter().map(|c| c.z_score()).fold(0.0, f64::max);
        ctx.record("coordinate-independence", "gaussian-sampler", z_cross, Relation::AtMost, 3.0, n);
    }

    let holder_pairs = [(0.0, 0.5), (0.1, 0.35), (0.2, 0.3), (0.4, 0.42), (0.7, 0.705)];
    let table = holder_moment_check(&sampler, n, 1, &holder_pairs, exec);
    ctx.record("holder-p1", "holder-moments", table.max_z_score(), Relation::AtMost, 3.0, n);

    // dyadic gaps down to the grid spacing; the Gaussian moment constant bounds every ratio
    let mut gaps = Vec::new();
    let mut gap = 0.5;
    while gap >= 1.0 / mc.m as f64 {
        gaps.push((0.25, 0.25 + gap));
        gap /= 2.0;
    }
    for p in 1..=3u32 {
        let table = holder_moment_check(&sampler, n, p, &gaps, exec);
        let constant: f64 = (0..p).map(|j| f64::from(d) + 2.0 * f64::from(j)).product();
        let worst = table.rows.iter().map(|r| (r.ratio - 3.0 * r.stderr) / constant).fold(0.0, f64::max);
        ctx.record(&format!("holder-bounded-p{p}"), "holder-moments", worst, Relation::AtMost, 1.0, n);
    }
}
