use rand::seq::IndexedRandom;
use rand::Rng;

use crate::report::config::AlphaSpec;
use super::poisson::series_discrepancy;
use super::{discrepancy, Ctx, Relation};
use crate::equivalence::{
    apply_ea, apply_t, apply_t1, c_a1, c_ar, check_exp_formula, check_intertwining, star_a, AlphaFamily,
    DiagonalOperatorA, WindowComparison,
};
use crate::fock::norm::search_continuity_constants;
use crate::fock::{weighted_norm_upper, wick_exponential, FockVector, HbarSeries, ModeIndex, ModeMap};
use crate::poisson::{star_series_with, SymplecticForm};
use crate::random::{random_fock, random_rational, FockShape};
use crate::scalar::{ratio, Rational};

/// Instances per family for the intertwining checks.
pub const INTERTWINING_INSTANCES: usize = 30;
/// Instances per family for the exponential product formula.
pub const EXP_FORMULA_INSTANCES: usize = 20;

fn operators(ctx: &Ctx<'_>) -> Vec<(String, DiagonalOperatorA)> {
    let k = ctx.cfg.k;
    let mut ops: Vec<(String, DiagonalOperatorA)> =
        AlphaFamily::ALL.iter().map(|f| (f.name().to_string(), DiagonalOperatorA::family(*f, k))).collect();
    if let AlphaSpec::Table(_) = &ctx.cfg.alpha {
        ops.push(("table".to_string(), ctx.cfg.alpha.operator(k)));
    }
    ops
}

/// Exponential arguments `[γ₁, γ₁*, γ₂, γ₂*]` on two primal modes and their
/// duals; each exponential omits one of the four doubled modes, so the two
/// factors always share contractible pairs.
fn random_exponent(ctx: &Ctx<'_>, id: &str, i: usize) -> [ModeMap; 4] {
    let modes = ctx.trunc().primal_modes();
    let mut rng = ctx.rng(id, i);
    let pool: Vec<ModeIndex> = modes.choose_multiple(&mut rng, 2).copied().collect();
    let mut maps: [ModeMap; 4] = Default::default();
    for factor in 0..2 {
        let dropped = rng.random_range(0..2 * pool.len());
        for (slot, &m) in pool.iter().chain(pool.iter()).enumerate() {
            if slot == dropped {
                continue;
            }
            let side = 2 * factor + usize::from(slot >= pool.len());
            maps[side].insert(m, random_rational(&mut rng, 3, 3));
        }
    }
    maps
}

fn record_window(ctx: &mut Ctx<'_>, id: &str, anchor: &str, results: &[WindowComparison]) {
    let mismatches: usize = results.iter().map(|c| c.mismatches).sum();
    ctx.exact(id, anchor, mismatches as f64, results.len());
}

pub(super) fn run(ctx: &mut Ctx<'_>) {
    let form = SymplecticForm::doubled(ctx.cfg.d).expect("validated config");
    let order = ctx.cfg.r as usize;
    let n_max = ctx.cfg.n;
    let window = ctx.cfg.window().expect("validated config");
    let exec = ctx.exec;
    ctx.record("comparison-window", "equivalence-window", f64::from(window), Relation::AtLeast, 0.0, 1);

    for (label, a) in operators(ctx) {
        let exps: Vec<WindowComparison> = (0..INTERTWINING_INSTANCES)
            .map(|i| {
                let [g1, g1s, g2, g2s] = random_exponent(ctx, "intertwining-exponentials", i);
                let f = wick_exponential(&g1, &g1s, n_max);
                let g = wick_exponential(&g2, &g2s, n_max);
                check_intertwining(&f, &g, &a, &form, order, window, exec)
            })
            .collect();
        record_window(ctx, &format!("intertwining-exponentials-{label}"), "equivalence-transform", &exps);

        let shape = FockShape::new(ctx.trunc(), window.max(1), 4);
        let polys: Vec<WindowComparison> = (0..INTERTWINING_INSTANCES)
            .map(|i| {
                let mut rng = ctx.rng("intertwining-polynomials", i);
                let f = random_fock(&mut rng, &shape);
                let g = random_fock(&mut rng, &shape);
                check_intertwining(&f, &g, &a, &form, order, window, exec)
            })
            .collect();
        record_window(ctx, &format!("intertwining-polynomials-{label}"), "equivalence-transform", &polys);

        let formula: Vec<WindowComparison> = (0..EXP_FORMULA_INSTANCES)
            .map(|i| {
                let [g1, g1s, g2, g2s] = random_exponent(ctx, "exp-formula", i);
                check_exp_formula(&g1, &g1s, &g2, &g2s, &a, &form, order, n_max, exec)
            })
            .collect();
        record_window(ctx, &format!("exp-formula-{label}"), "exponential-product", &formula);

        algebraic(ctx, &label, &a, &form);
    }

    normal_product(ctx, &form);
    boundedness(ctx);
}

fn algebraic(ctx: &mut Ctx<'_>, label: &str, a: &DiagonalOperatorA, form: &SymplecticForm) {
    let order = ctx.cfg.r as usize;
    let n = 10;
    let shape = FockShape::new(ctx.trunc(), 3, 3);
    let exec = ctx.exec;
    let triples: Vec<[FockVector; 3]> = (0..n)
        .map(|i| {
            let mut rng = ctx.rng("deformed-triples", i);
            [0, 1, 2].map(|_| random_fock(&mut rng, &shape))
        })
        .collect();
    let bivector = crate::equivalence::DeformedBivector { form, a };

    let assoc = exec
        .map_slice(&triples, |[f, g, h]| {
            let fg = star_a(f, g, a, form, order);
            let gh = star_a(g, h, a, form, order);
            let left = star_series_with(&fg, &HbarSeries::concentrated(h.clone(), order), &bivector, None, exec);
            let right = star_series_with(&HbarSeries::concentrated(f.clone(), order), &gh, &bivector, None, exec);
            series_discrepancy(&left.expect("same order"), &right.expect("same order"))
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact(&format!("deformed-associativity-{label}"), "deformed-star", assoc, n);

    let inverse = triples
        .iter()
        .map(|[f, g, h]| {
            let mut s = HbarSeries::concentrated(f.clone(), order);
            *s.coeff_mut(1.min(order)) = g.clone();
            *s.coeff_mut(order) = h.clone();
            series_discrepancy(&apply_t(&apply_t(&s, a), &a.negated()), &s)
        })
        .fold(0.0, f64::max);
    ctx.exact(&format!("transform-inverse-{label}"), "equivalence-transform", inverse, n);

    let expansion = triples
        .iter()
        .map(|[f, g, _]| discrepancy(&c_a1(f, g, a, form), &c_a1_expanded(f, g, a, ctx.trunc().primal_modes())))
        .fold(0.0, f64::max);
    ctx.exact(&format!("first-cochain-expansion-{label}"), "deformed-star", expansion, n);

    let symmetric = triples
        .iter()
        .map(|[f, g, _]| discrepancy(&apply_ea(f, g, a), &apply_ea(g, f, a)))
        .fold(0.0, f64::max);
    ctx.exact(&format!("symmetric-part-{label}"), "deformed-star", symmetric, n);
}

/// `Σ [(α_k+1)·a_x F·a_{x*} G + (α_k−1)·a_x G·a_{x*} F]` over primal `x`.
fn c_a1_expanded(f: &FockVector, g: &FockVector, a: &DiagonalOperatorA, modes: Vec<ModeIndex>) -> FockVector {
    let one = Rational::from_integer(1.into());
    let mut out = FockVector::zero();
    for x in modes {
        let alpha = a.alpha(x.freq);
        let plus = f.annihilate(x).wick_product(&g.annihilate(x.twin())).scale(&(&alpha + &one));
        let minus = g.annihilate(x).wick_product(&f.annihilate(x.twin())).scale(&(&alpha - &one));
        out = &(&out + &plus) + &minus;
    }
    out
}

/// Only contractions from primal slots of the left factor survive at `α ≡ 1`.
fn normal_product(ctx: &mut Ctx<'_>, form: &SymplecticForm) {
    let a = DiagonalOperatorA::family(AlphaFamily::One, ctx.cfg.k);
    let modes = ctx.trunc().primal_modes();
    let shape = FockShape::new(ctx.trunc(), 3, 3);
    let order = ctx.cfg.r.min(3);
    let n = 10;
    let worst = (0..n)
        .map(|i| {
            let mut rng = ctx.rng("normal-product", i);
            let f = random_fock(&mut rng, &shape);
            let g = random_fock(&mut rng, &shape);
            (0..=order)
                .map(|r| discrepancy(&c_ar(r, &f, &g, &a, form), &one_sided(r, &f, &g, &modes)))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    ctx.exact("normal-product", "deformed-star", worst, n);
}

/// `Σ_{x₁..x_r} 2ʳ·:a_{x₁}⋯a_{x_r}F · a_{x₁*}⋯a_{x_r*}G:` by recursion on `r`.
fn one_sided(r: u32, f: &FockVector, g: &FockVector, modes: &[ModeIndex]) -> FockVector {
    if r == 0 {
        return f.wick_product(g);
    }
    let two = ratio(2, 1);
    let mut out = FockVector::zero();
    for &x in modes {
        let (fx, gx) = (f.annihilate(x), g.annihilate(x.twin()));
        if fx.is_zero() || gx.is_zero() {
            continue;
        }
        out = &out + &one_sided(r - 1, &fx, &gx, modes).scale(&two);
    }
    out
}

fn boundedness(ctx: &mut Ctx<'_>) {
    let a = DiagonalOperatorA::family(AlphaFamily::Ksq, ctx.cfg.k);
    let shape = FockShape::new(ctx.trunc(), 4, 3);
    let n = 30;
    let data: Vec<[FockVector<f64>; 4]> = (0..n)
        .map(|i| {
            let mut rng = ctx.rng("deformation-boundedness", i);
            let f = random_fock(&mut rng, &shape);
            let g = random_fock(&mut rng, &shape);
            [f.to_f64(), g.to_f64(), apply_ea(&f, &g, &a).to_f64(), apply_t1(&f, &a).to_f64()]
        })
        .collect();
    let k_grid = [1, 2, 3, 4, 5, 6];
    let c_grid = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let ea = search_continuity_constants(
        n,
        |i| weighted_norm_upper(&data[i][2], 1, 1.0),
        |i, k0, c0| weighted_norm_upper(&data[i][0], k0, c0) * weighted_norm_upper(&data[i][1], k0, c0),
        &k_grid,
        &c_grid,
        1.0,
    );
    ctx.record("symmetric-part-boundedness", "deformation-continuity", ea.map_or(f64::INFINITY, |w| w.2), Relation::AtMost, 1.0, n);
    let t1 = search_continuity_constants(
        n,
        |i| weighted_norm_upper(&data[i][3], 1, 1.0),
        |i, k0, c0| weighted_norm_upper(&data[i][0], k0, c0),
        &k_grid,
        &c_grid,
        1.0,
    );
    ctx.record("transform-boundedness", "deformation-continuity", t1.map_or(f64::INFINITY, |w| w.2), Relation::AtMost, 1.0, n);
}
