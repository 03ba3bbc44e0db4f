use super::{abs_scale, Ctx, Relation};
use crate::chaos::{
    chaos_eval_quadrature_on, chaos_eval_spectral, gateaux_derivative_fd, injectivity_probe, loglog_slope,
    normal_convergence_check, spectral_coordinates, stratonovich_pairing_on, QuadratureGrid,
};
use crate::fock::{wick_exponential, FockVector, ModeIndex, ModeMap};
use crate::gaussian::LoopSampler;
use crate::random::{random_fock, random_mode_map, FockShape};
use crate::scalar::Scalar;

const CONVERGENCE_GRIDS: [usize; 4] = [256, 512, 1024, 2048];

/// `ξ` on primal modes from sample `i` and on dual modes from an
/// independent sample.
fn independent_xi(sampler: &LoopSampler, i: u64) -> ModeMap<f64> {
    let mut xi = sampler.coefficients(i);
    for (m, v) in sampler.coefficients(i + (1 << 40)) {
        xi.insert(m.twin(), v);
    }
    xi
}

pub(super) fn run(ctx: &mut Ctx<'_>) {
    let mc = &ctx.cfg.mc;
    let sampler = LoopSampler::new(mc.seed, ctx.cfg.d, mc.k_mc.max(ctx.cfg.k), mc.m).expect("validated config");
    let shape = FockShape::new(ctx.trunc(), 4, 3);
    let exec = ctx.exec;

    // degree-one pairing recovers the coefficients
    let n_pair = 5;
    let modes = ctx.trunc().primal_modes();
    let pairing = exec
        .map(n_pair, |i| {
            let sample = sampler.sample(i as u64);
            let grid = QuadratureGrid::new(&sample, mc.n_grid);
            modes
                .iter()
                .map(|m| (stratonovich_pairing_on(*m, &grid) - sample.xi[m]).abs())
                .fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.record("pairing-coefficients", "chaos-factorization", pairing, Relation::AtMost, 1e-8, n_pair * modes.len());

    // spectral factorization with independent dual coordinates
    let n_fact = 100;
    let spectral = exec
        .map(n_fact, |i| {
            let mut rng = ctx.rng("spectral-factorization", i);
            let f = random_fock(&mut rng, &shape);
            let g = random_fock(&mut rng, &shape);
            let xi = independent_xi(&sampler, i as u64);
            let lhs = chaos_eval_spectral(&f.wick_product(&g), &xi);
            let rhs = chaos_eval_spectral(&f, &xi) * chaos_eval_spectral(&g, &xi);
            (lhs - rhs).abs() / (abs_scale(&f, &xi) * abs_scale(&g, &xi)).max(f64::MIN_POSITIVE)
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.record("spectral-factorization", "chaos-factorization", spectral, Relation::AtMost, 1e-12, n_fact);

    // quadrature against spectral, and quadrature factorization
    let n_quad = 20;
    let quad = exec.map(n_quad, |i| {
        let mut rng = ctx.rng("quadrature-agreement", i);
        let f = random_fock(&mut rng, &shape);
        let g = random_fock(&mut rng, &shape);
        let sample = sampler.sample(i as u64);
        let xi = spectral_coordinates(&sample);
        let grid = QuadratureGrid::new(&sample, mc.n_grid);
        let qf = chaos_eval_quadrature_on(&f, &grid);
        let qg = chaos_eval_quadrature_on(&g, &grid);
        let qfg = chaos_eval_quadrature_on(&f.wick_product(&g), &grid);
        let agree = (qf - chaos_eval_spectral(&f, &xi)).abs() / abs_scale(&f, &xi).max(1.0);
        let fact = (qfg - qf * qg).abs() / (abs_scale(&f, &xi) * abs_scale(&g, &xi)).max(1.0);
        (agree, fact)
    });
    let agree = quad.iter().map(|q| q.0).fold(0.0, f64::max);
    let fact = quad.iter().map(|q| q.1).fold(0.0, f64::max);
    ctx.record("quadrature-agreement", "chaos-factorization", agree, Relation::AtMost, 1e-6, n_quad);
    ctx.record("quadrature-factorization", "chaos-factorization", fact, Relation::AtMost, 1e-6, n_quad);

    // convergence order of the quadrature evaluator in n_grid
    let n_conv = 5;
    let errors: Vec<Vec<f64>> = exec.map(n_conv, |i| {
        let mut rng = ctx.rng("quadrature-order", i);
        let f = random_fock(&mut rng, &shape);
        let sample = sampler.sample(1000 + i as u64);
        let exact = chaos_eval_spectral(&f, &spectral_coordinates(&sample));
        CONVERGENCE_GRIDS
            .iter()
            .map(|&n| (chaos_eval_quadrature_on(&f, &QuadratureGrid::new(&sample, n)) - exact).abs())
            .collect()
    });
    let per_grid: Vec<f64> = (0..CONVERGENCE_GRIDS.len())
        .map(|j| errors.iter().map(|e| e[j]).fold(0.0, f64::max))
        .collect();
    let grids: Vec<f64> = CONVERGENCE_GRIDS.iter().map(|&n| n as f64).collect();
    let order = -loglog_slope(&grids, &per_grid);
    ctx.record("quadrature-order", "chaos-factorization", order, Relation::AtLeast, 2.0, n_conv);

    gateaux(ctx, &sampler, &shape);

    // geometric series dominated by its majorant
    let n_norm = 5;
    let ratio = exec
        .map(n_norm, |i| {
            let sample = sampler.sample(2000 + i as u64);
            let grid = QuadratureGrid::new(&sample, 512);
            let r = normal_convergence_check(ModeIndex::primal(1, 1), &grid, 0.9, 2, 12);
            if r.rate < 1.0 {
                r.tail / r.majorant
            } else {
                f64::INFINITY
            }
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.record("normal-convergence", "normal-convergence", ratio, Relation::AtMost, 1.0, n_norm);

    // no nonzero vector vanishes at all probe points
    let n_inj = 50;
    let false_positive = exec
        .map(n_inj, |i| {
            let mut rng = ctx.rng("injectivity", i);
            let f = random_fock(&mut rng, &shape);
            usize::from(!f.is_zero() && injectivity_probe(&f, ctx.seed() ^ i as u64) == 0)
        })
        .into_iter()
        .sum::<usize>();
    ctx.exact("injectivity-probe", "injectivity", false_positive as f64, n_inj);

    // exponential evaluates to the Taylor partial sum
    let n_exp = 20;
    let support: Vec<ModeIndex> = ctx.trunc().primal_modes().into_iter().take(3).collect();
    let taylor = exec
        .map(n_exp, |i| {
            let mut rng = ctx.rng("exponential-taylor", i);
            let gamma = random_mode_map(&mut rng, &support, 3, 4);
            let xi = independent_xi(&sampler, 3000 + i as u64);
            let phi = wick_exponential(&gamma, &ModeMap::new(), ctx.cfg.n);
            let s: f64 = gamma.iter().map(|(m, c)| c.to_f64() * xi[m]).sum();
            let mut term = 1.0;
            let mut partial = 1.0;
            let mut scale = 1.0;
            for n in 1..=ctx.cfg.n {
                term *= s / f64::from(n);
                partial += term;
                scale += term.abs();
            }
            (chaos_eval_spectral(&phi, &xi) - partial).abs() / scale
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.record("exponential-taylor", "wick-exponential", taylor, Relation::AtMost, 1e-12, n_exp);
}

fn gateaux(ctx: &mut Ctx<'_>, sampler: &LoopSampler, shape: &FockShape) {
    let n = 50;
    let eps = [1e-2, 1e-3, 1e-4];
    let slopes = ctx.exec.map(n, |i| {
        // resample until the third derivative along h is visible above rounding
        for attempt in 0..64 {
            let mut rng = ctx.rng("gateaux-slope", i * 64 + attempt);
            let f = random_fock(&mut rng, shape);
            let support: Vec<ModeIndex> = f.support().into_iter().collect();
            if support.is_empty() {
                continue;
            }
            let h = random_mode_map(&mut rng, &support, 5, 3);
            let xi = independent_xi(sampler, 4000 + i as u64);
            let third = f.annihilate_general(&h).annihilate_general(&h).annihilate_general(&h);
            let c3 = chaos_eval_spectral(&third, &xi) / 6.0;
            if c3.abs() < 1e-3 * abs_scale(&f, &xi).max(1.0) {
                continue;
            }
            let h_f: ModeMap<f64> = h.iter().map(|(m, c)| (*m, c.to_f64())).collect();
            let exact = chaos_eval_spectral(&f.annihilate_general(&h), &xi);
            let errs: Vec<f64> = eps.iter().map(|&e| (gateaux_derivative_fd(&f, &xi, &h_f, e) - exact).abs()).collect();
            return loglog_slope(&eps, &errs);
        }
        f64::NAN
    });
    let worst = slopes.iter().map(|s| (s - 2.0).abs()).fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
    ctx.record("gateaux-slope", "gateaux-annihilation", worst, Relation::AtMost, 0.1, n);
    let _: Option<FockVector> = None;
}
