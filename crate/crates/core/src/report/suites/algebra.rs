use rand::Rng;

use super::{discrepancy, Ctx};
use crate::fock::norm::search_continuity_constants;
use crate::fock::{weighted_norm_upper, deserialize_fock, serialize_fock, FockVector, HbarSeries, ModeIndex, ModeMap};
use crate::random::{random_fock, random_mode_map, FockShape};

const TRIPLES: usize = 200;

pub(super) fn run(ctx: &mut Ctx<'_>) {
    let shape = FockShape::new(ctx.trunc(), 5, 4);
    let triples: Vec<[FockVector; 3]> = (0..TRIPLES)
        .map(|i| {
            let mut rng = ctx.rng("wick-triples", i);
            [0, 1, 2].map(|_| random_fock(&mut rng, &shape))
        })
        .collect();

    basis(ctx);

    let comm = ctx
        .exec
        .map_slice(&triples, |[f, g, _]| discrepancy(&f.wick_product(g), &g.wick_product(f)))
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("wick-commutativity", "wick-algebra", comm, TRIPLES);

    let assoc = ctx
        .exec
        .map_slice(&triples, |[f, g, h]| {
            discrepancy(&f.wick_product(g).wick_product(h), &f.wick_product(&g.wick_product(h)))
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("wick-associativity", "wick-algebra", assoc, TRIPLES);

    let unit = triples
        .iter()
        .map(|[f, _, _]| discrepancy(&FockVector::vacuum().wick_product(f), f))
        .fold(0.0, f64::max);
    ctx.exact("wick-unit", "wick-algebra", unit, TRIPLES);

    let grading = triples
        .iter()
        .map(|[f, g, _]| {
            let mut bad = 0usize;
            for n in 0..=f.degree() {
                for m in 0..=g.degree() {
                    let p = f.degree_part(n).wick_product(&g.degree_part(m));
                    bad += p.iter().filter(|(mu, _)| mu.degree() != n + m).count();
                }
            }
            let modes: Vec<ModeIndex> = f.support().into_iter().collect();
            for mode in modes {
                for n in 1..=f.degree() {
                    let a = f.degree_part(n).annihilate(mode);
                    bad += a.iter().filter(|(mu, _)| mu.degree() + 1 != n).count();
                }
            }
            bad as f64
        })
        .fold(0.0, f64::max);
    ctx.exact("degree-grading", "wick-algebra", grading, TRIPLES);

    let modes = ctx.trunc().doubled_modes();
    let commute = (0..TRIPLES)
        .map(|i| {
            let mut rng = ctx.rng("annihilation-commute", i);
            let m1 = modes[rng.random_range(0..modes.len())];
            let m2 = modes[rng.random_range(0..modes.len())];
            let f = &triples[i][0];
            discrepancy(&f.annihilate(m2).annihilate(m1), &f.annihilate(m1).annihilate(m2))
        })
        .fold(0.0, f64::max);
    ctx.exact("annihilation-commute", "derivation-law", commute, TRIPLES);

    let derivation = ctx
        .exec
        .map(TRIPLES, |i| {
            let mut rng = ctx.rng("derivation-law", i);
            let k = rng.random_range(1..=4);
            let support: Vec<ModeIndex> = (0..k).map(|_| modes[rng.random_range(0..modes.len())]).collect();
            let h: ModeMap = random_mode_map(&mut rng, &support, 5, 4);
            let [f, g, _] = &triples[i];
            let lhs = f.wick_product(g).annihilate_general(&h);
            let rhs = &f.annihilate_general(&h).wick_product(g) + &f.wick_product(&g.annihilate_general(&h));
            discrepancy(&lhs, &rhs)
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("derivation-law", "derivation-law", derivation, TRIPLES);

    series_ring(ctx);
    serialization(ctx, &triples);
    continuity(ctx, &triples);
}

fn basis(ctx: &mut Ctx<'_>) {
    let k = ctx.cfg.k;
    let n = 4096;
    let mut worst: f64 = 0.0;
    for a in -k..=k {
        for b in -k..=k {
            let (ma, mb) = (ModeIndex::primal(1, a), ModeIndex::primal(1, b));
            let inner: f64 = (0..n)
                .map(|j| {
                    let s = j as f64 / n as f64;
                    ma.profile(s) * mb.profile(s)
                        + crate::fock::basis_derivative(a, 1, s) * crate::fock::basis_derivative(b, 1, s)
                })
                .sum::<f64>()
                / n as f64;
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((inner - expect).abs());
        }
    }
    let count = (2 * k + 1) as usize;
    ctx.record("basis-gram", "basis-orthonormality", worst, super::Relation::AtMost, 1e-10, count * count);
}

fn series_ring(ctx: &mut Ctx<'_>) {
    let order = ctx.cfg.r as usize;
    let n = 50;
    let shape = FockShape::new(ctx.trunc(), 3, 2);
    let worst = ctx
        .exec
        .map(n, |i| {
            let mut rng = ctx.rng("series-ring", i);
            let mut series = || {
                HbarSeries::from_coeffs((0..=order).map(|_| random_fock(&mut rng, &shape)).collect())
            };
            let (a, b, c) = (series(), series(), series());
            let ab_c = a.wick_mul(&b).and_then(|ab| ab.wick_mul(&c)).expect("same order");
            let a_bc = b.wick_mul(&c).and_then(|bc| a.wick_mul(&bc)).expect("same order");
            let dist_l = a.wick_mul(&b.add(&c).expect("same order")).expect("same order");
            let dist_r = a.wick_mul(&b).expect("same order").add(&a.wick_mul(&c).expect("same order")).expect("same order");
            (0..=order)
                .map(|r| discrepancy(ab_c.coeff(r), a_bc.coeff(r)).max(discrepancy(dist_l.coeff(r), dist_r.coeff(r))))
                .fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max);
    ctx.exact("series-ring", "wick-algebra", worst, n);
}

fn serialization(ctx: &mut Ctx<'_>, triples: &[[FockVector; 3]]) {
    let n = 50;
    let mut failures = 0usize;
    for (i, [f, g, _]) in triples.iter().take(n).enumerate() {
        let text = serialize_fock(f);
        if deserialize_fock(&text).ok().as_ref() != Some(f) {
            failures += 1;
        }
        // the same vector assembled from shuffled terms
        let mut terms: Vec<_> = g.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        let mut rng = ctx.rng("serialization-canonical", i);
        for j in (1..terms.len()).rev() {
            terms.swap(j, rng.random_range(0..=j));
        }
        let mut rebuilt = FockVector::zero();
        for (m, c) in terms {
            let half = c.clone() / crate::scalar::ratio(2, 1);
            rebuilt.add_term(m.clone(), half.clone());
            rebuilt.add_term(m, half);
        }
        if serialize_fock(&rebuilt) != serialize_fock(g) {
            failures += 1;
        }
    }
    if !deserialize_fock("").is_ok_and(|z| z.is_zero()) {
        failures += 1;
    }
    ctx.exact("serialization-roundtrip", "serialization", failures as f64, n);
}

fn continuity(ctx: &mut Ctx<'_>, triples: &[[FockVector; 3]]) {
    let n = 50;
    let (k, c) = (1, 1.0);
    let pairs: Vec<(FockVector<f64>, FockVector<f64>)> =
        triples.iter().take(n).map(|[f, g, _]| (f.to_f64(), g.to_f64())).collect();
    let products: Vec<FockVector<f64>> = pairs.iter().map(|(f, g)| f.wick_product(g)).collect();
    let found = search_continuity_constants(
        n,
        |i| weighted_norm_upper(&products[i], k, c),
        |i, k0, c0| weighted_norm_upper(&pairs[i].0, k0, c0) * weighted_norm_upper(&pairs[i].1, k0, c0),
        &[1, 2, 3, 4],
        &[1.0, 2.0, 4.0, 8.0, 16.0],
        1.0,
    );
    let worst = found.map_or(f64::INFINITY, |(_, _, w)| w);
    ctx.record("norm-continuity", "norm-continuity", worst, super::Relation::AtMost, 1.0, n);
}
