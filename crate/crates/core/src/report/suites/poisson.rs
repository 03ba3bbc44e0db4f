use std::collections::BTreeSet;

use super::{discrepancy, Ctx, Relation};
use crate::fock::{weighted_norm_upper, FockVector, HbarSeries, ModeIndex, ModeMap, MultiIndex};
use crate::fock::norm::search_continuity_constants;
use crate::poisson::{moyal_star, poisson_bracket, poisson_power, star_series, SymplecticForm};
use crate::random::{random_fock, FockShape};
use crate::scalar::{ratio, Rational, Scalar};

const TRIPLES: usize = 100;

fn form(ctx: &Ctx<'_>) -> SymplecticForm {
    SymplecticForm::new(ctx.cfg.d, ctx.cfg.weight_c.clone()).expect("validated config")
}

fn triples(ctx: &Ctx<'_>, id: &str, n: usize, max_degree: u32) -> Vec<[FockVector; 3]> {
    let shape = FockShape::new(ctx.trunc(), max_degree, 3);
    (0..n)
        .map(|i| {
            let mut rng = ctx.rng(id, i);
            [0, 1, 2].map(|_| random_fock(&mut rng, &shape))
        })
        .collect()
}

pub(super) fn run_poisson(ctx: &mut Ctx<'_>) {
    let form = form(ctx);
    let ts = triples(ctx, "bracket-triples", TRIPLES, 3);
    let exec = ctx.exec;

    let anti = exec
        .map_slice(&ts, |[f, g, _]| {
            let fg = poisson_bracket(f, g, &form);
            discrepancy(&fg, &-&poisson_bracket(g, f, &form)).max(poisson_bracket(f, f, &form).max_abs_coefficient())
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("bracket-antisymmetry", "poisson-axioms", anti, TRIPLES);

    let leibniz = exec
        .map_slice(&ts, |[f, g, h]| {
            let lhs = poisson_bracket(f, &g.wick_product(h), &form);
            let rhs = &poisson_bracket(f, g, &form).wick_product(h) + &g.wick_product(&poisson_bracket(f, h, &form));
            discrepancy(&lhs, &rhs)
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("bracket-leibniz", "poisson-axioms", leibniz, TRIPLES);

    let jacobi = exec
        .map_slice(&ts, |[f, g, h]| {
            let b = |x: &FockVector, y: &FockVector| poisson_bracket(x, y, &form);
            let sum = &(&b(f, &b(g, h)) + &b(g, &b(h, f))) + &b(h, &b(f, g));
            sum.max_abs_coefficient()
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("bracket-jacobi", "poisson-axioms", jacobi, TRIPLES);

    // {x, x*} = −(c·k²+1) on every retained mode
    let modes = ctx.trunc().primal_modes();
    let sign = modes
        .iter()
        .map(|&m| {
            let x = FockVector::monomial(MultiIndex::from_modes([m]), Rational::one());
            let xs = FockVector::monomial(MultiIndex::from_modes([m.twin()]), Rational::one());
            let k = ratio(i64::from(m.freq), 1);
            let expect = -(&ctx.cfg.weight_c * &k * &k + Rational::one());
            discrepancy(&poisson_bracket(&x, &xs, &form), &FockVector::vacuum().scale(&expect))
        })
        .fold(0.0, f64::max);
    ctx.exact("degree-one-sign", "poisson-axioms", sign, modes.len());

    let bookkeeping = exec
        .map_slice(&ts, |[f, g, _]| {
            let mut bad = 0usize;
            for n in 0..=f.degree() {
                for m in 0..=g.degree() {
                    let (fp, gp) = (f.degree_part(n), g.degree_part(m));
                    for r in 0..=4u32 {
                        let p = poisson_power(r, &fp, &gp, &form);
                        if r > n.min(m) {
                            bad += p.len();
                        } else {
                            bad += p.iter().filter(|(mu, _)| mu.degree() + 2 * r != n + m).count();
                        }
                    }
                }
            }
            bad as f64
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("power-degrees", "poisson-powers", bookkeeping, TRIPLES);

    chaos_compatibility(ctx, &form, &ts);
    boundedness(ctx, &form, &ts);
}

/// First-order jet `v + ε·dv` for forward-mode differentiation.
#[derive(Clone, Copy)]
struct Jet {
    v: f64,
    dv: f64,
}

impl Jet {
    fn mul(self, o: Jet) -> Jet {
        Jet { v: self.v * o.v, dv: self.v * o.dv + self.dv * o.v }
    }
}

/// `∂f/∂ξ_m` at `xi` by evaluating with a jet seeded on `m`.
fn partial(f: &FockVector, xi: &ModeMap<f64>, m: ModeIndex) -> f64 {
    let mut acc = 0.0;
    for (mu, c) in f.iter() {
        let mut term = Jet { v: 1.0, dv: 0.0 };
        for &(mode, mult) in mu.entries() {
            let x = Jet { v: xi.get(&mode).copied().unwrap_or(0.0), dv: if mode == m { 1.0 } else { 0.0 } };
            for _ in 0..mult {
                term = term.mul(x);
            }
        }
        acc += c.to_f64() * term.dv;
    }
    acc
}

fn polynomial_eval(f: &FockVector, xi: &ModeMap<f64>) -> (f64, f64) {
    let mut value = 0.0;
    let mut scale = 0.0;
    for (mu, c) in f.iter() {
        let mut term = 1.0;
        let mut mag = 1.0;
        for &(mode, mult) in mu.entries() {
            let x = xi.get(&mode).copied().unwrap_or(0.0);
            term *= x.powi(mult as i32);
            mag *= x.abs().powi(mult as i32);
        }
        value += c.to_f64() * term;
        scale += c.to_f64().abs() * mag;
    }
    (value, scale)
}

fn chaos_compatibility(ctx: &mut Ctx<'_>, form: &SymplecticForm, ts: &[[FockVector; 3]]) {
    let n = 50;
    let c = ctx.cfg.weight_c.to_f64();
    let worst = (0..n)
        .map(|i| {
            let [f, g, _] = &ts[i];
            let mut rng = ctx.rng("chaos-compatibility", i);
            let modes: BTreeSet<ModeIndex> = f.support().into_iter().chain(g.support()).collect();
            let mut xi = ModeMap::<f64>::new();
            for m in modes.iter().flat_map(|m| [m.as_primal(), m.as_primal().twin()]) {
                xi.insert(m, rand::Rng::random_range(&mut rng, -1.5..1.5));
            }
            // classical bracket with weights (c·k²+1)·ω^{ij}, ω^{x x*} = −1
            let mut classical = 0.0;
            let mut scale = 0.0;
            for m in xi.keys().filter(|m| !m.dual) {
                let k = f64::from(m.freq);
                let w = c * k * k + 1.0;
                let (fx, fy) = (partial(f, &xi, *m), partial(f, &xi, m.twin()));
                let (gx, gy) = (partial(g, &xi, *m), partial(g, &xi, m.twin()));
                classical += w * (-fx * gy + fy * gx);
                scale += w * (fx * gy).abs().max((fy * gx).abs());
            }
            let (value, mag) = polynomial_eval(&poisson_bracket(f, g, form), &xi);
            (value - classical).abs() / scale.max(mag).max(1.0)
        })
        .fold(0.0, f64::max);
    ctx.record("chaos-compatibility", "poisson-chaos", worst, Relation::AtMost, 1e-12, n);
}

fn boundedness(ctx: &mut Ctx<'_>, form: &SymplecticForm, ts: &[[FockVector; 3]]) {
    let n = 50;
    let pairs: Vec<(FockVector<f64>, FockVector<f64>, FockVector<f64>)> = ts
        .iter()
        .take(n)
        .map(|[f, g, _]| (f.to_f64(), g.to_f64(), poisson_bracket(f, g, form).to_f64()))
        .collect();
    let found = search_continuity_constants(
        n,
        |i| weighted_norm_upper(&pairs[i].2, 1, 1.0),
        |i, k0, c0| weighted_norm_upper(&pairs[i].0, k0, c0) * weighted_norm_upper(&pairs[i].1, k0, c0),
        &[1, 2, 3, 4],
        &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
        1.0,
    );
    let worst = found.map_or(f64::INFINITY, |(_, _, w)| w);
    ctx.record("bracket-boundedness", "poisson-continuity", worst, Relation::AtMost, 1.0, n);
}

pub(super) fn run_moyal(ctx: &mut Ctx<'_>) {
    let form = form(ctx);
    let order = ctx.cfg.r as usize;
    let ts = triples(ctx, "star-triples", 50, 3);
    let exec = ctx.exec;

    let p0 = ts
        .iter()
        .map(|[f, g, _]| discrepancy(&poisson_power(0, f, g, &form), &f.wick_product(g)))
        .fold(0.0, f64::max);
    ctx.exact("p0-wick", "star-axioms", p0, ts.len());

    let p1 = ts
        .iter()
        .map(|[f, g, _]| {
            let anti = &poisson_power(1, f, g, &form) - &poisson_power(1, g, f, &form);
            let two = poisson_bracket(f, g, &form).scale(&ratio(2, 1));
            let star = &moyal_star(f, g, &form, 1).coeff(1).clone() - moyal_star(g, f, &form, 1).coeff(1);
            discrepancy(&anti, &two).max(discrepancy(&star, &two))
        })
        .fold(0.0, f64::max);
    ctx.exact("p1-antisymmetrized", "star-axioms", p1, ts.len());

    let assoc = exec
        .map_slice(&ts, |[f, g, h]| {
            let fg = moyal_star(f, g, &form, order);
            let gh = moyal_star(g, h, &form, order);
            let left = star_series(&fg, &HbarSeries::concentrated(h.clone(), order), &form).expect("same order");
            let right = star_series(&HbarSeries::concentrated(f.clone(), order), &gh, &form).expect("same order");
            series_discrepancy(&left, &right)
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("star-associativity", "star-axioms", assoc, ts.len());

    let unit = HbarSeries::unit(order);
    let unit_res = series_discrepancy(&star_series(&unit, &unit, &form).expect("same order"), &unit);
    ctx.exact("series-unit", "star-axioms", unit_res, 1);

    let concentrated = ts
        .iter()
        .take(20)
        .map(|[f, g, _]| {
            let s = star_series(
                &HbarSeries::concentrated(f.clone(), order),
                &HbarSeries::concentrated(g.clone(), order),
                &form,
            )
            .expect("same order");
            series_discrepancy(&s, &moyal_star(f, g, &form, order))
        })
        .fold(0.0, f64::max);
    ctx.exact("series-concentrated", "star-axioms", concentrated, 20);

    let n_series = 10;
    let series_order = order.min(2);
    let shape = FockShape::new(ctx.trunc(), 2, 2);
    let series_assoc = exec
        .map(n_series, |i| {
            let mut rng = ctx.rng("series-associativity", i);
            let mut series =
                || HbarSeries::from_coeffs((0..=series_order).map(|_| random_fock(&mut rng, &shape)).collect());
            let (a, b, c) = (series(), series(), series());
            let left = star_series(&star_series(&a, &b, &form).expect("same order"), &c, &form).expect("same order");
            let right = star_series(&a, &star_series(&b, &c, &form).expect("same order"), &form).expect("same order");
            series_discrepancy(&left, &right)
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("series-associativity", "star-axioms", series_assoc, n_series);
}

pub(super) fn series_discrepancy(a: &HbarSeries, b: &HbarSeries) -> f64 {
    (0..=a.order().min(b.order()))
        .map(|r| discrepancy(a.coeff(r), b.coeff(r)))
        .fold(if a.order() == b.order() { 0.0 } else { f64::INFINITY }, f64::max)
}
