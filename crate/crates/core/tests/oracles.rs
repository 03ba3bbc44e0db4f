//! Independent reference computations for the numerical and exact layers.

use std::f64::consts::{E, PI};

use strato_moyal::chaos::chaos_eval_spectral;
use strato_moyal::fock::{basis_derivative, wick_exponential};
use strato_moyal::gaussian::{green_kernel, spectral_kernel, GreenKernel};
use strato_moyal::poisson::{invert, mat_mul, poisson_bracket, SymplecticForm};
use strato_moyal::random::{instance_rng, random_fock, FockShape};
use strato_moyal::scalar::ratio;
use strato_moyal::{FockVector, ModeIndex, ModeMap, MultiIndex, Rational, Scalar, Truncation};

fn basis(k: i32, s: f64) -> f64 {
    let w = (2.0 * PI * f64::from(k) * s).abs();
    let norm = (1.0 + 4.0 * PI * PI * f64::from(k * k)).sqrt();
    match k {
        0 => 1.0,
        k if k > 0 => 2f64.sqrt() * w.cos() / norm,
        _ => 2f64.sqrt() * (2.0 * PI * f64::from(k) * s).sin() / norm,
    }
}

fn basis_prime(k: i32, s: f64) -> f64 {
    let kf = f64::from(k);
    let norm = (1.0 + 4.0 * PI * PI * kf * kf).sqrt();
    match k {
        0 => 0.0,
        k if k > 0 => -2f64.sqrt() * 2.0 * PI * kf * (2.0 * PI * kf * s).sin() / norm,
        _ => 2f64.sqrt() * 2.0 * PI * kf * (2.0 * PI * kf * s).cos() / norm,
    }
}

#[test]
fn basis_matches_closed_form_and_is_orthonormal() {
    let n = 4096;
    for a in -3..=3 {
        for j in 0..64 {
            let s = j as f64 / 64.0;
            assert!((ModeIndex::primal(1, a).profile(s) - basis(a, s)).abs() < 1e-14);
            assert!((basis_derivative(a, 1, s) - basis_prime(a, s)).abs() < 1e-12);
        }
        for b in -3..=3 {
            let inner: f64 = (0..n)
                .map(|j| {
                    let s = j as f64 / n as f64;
                    basis(a, s) * basis(b, s) + basis_prime(a, s) * basis_prime(b, s)
                })
                .sum::<f64>()
                / n as f64;
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((inner - expect).abs() < 1e-10, "({a},{b}): {inner}");
        }
    }
}

#[test]
fn green_coefficient_magnitudes() {
    // signed coefficients of the exp(−s) and exp(s) terms on the negative branch
    let alpha = -1.0 / (2.0 * (1.0 - 1.0 / E));
    let beta = 1.0 / (2.0 * (1.0 - E));
    let g = GreenKernel::default();
    assert_eq!(g.alpha_pos, alpha.abs());
    assert_eq!(g.beta_pos, beta.abs());
    let (a_neg, b_neg) = g.negative_branch();
    assert!((a_neg - alpha).abs() < 1e-15 && (b_neg - beta).abs() < 1e-15);
    // taken on the positive branch these signs give a negative variance
    assert!(alpha * (-1.0f64).exp() + beta * 1.0f64.exp() < 0.0);
    let variance = 0.5f64.cosh() / (2.0 * 0.5f64.sinh());
    for j in 0..10 {
        let s = j as f64 / 10.0;
        assert!((green_kernel(s, s) - variance).abs() < 1e-14);
    }
}

#[test]
fn eigenfunction_sum_reproduces_kernel() {
    let mut rng = instance_rng(11, 0);
    let mut checked = 0;
    while checked < 25 {
        let (s, t): (f64, f64) = (rand::Rng::random(&mut rng), rand::Rng::random(&mut rng));
        let direct: f64 = (-200..=200).map(|k| basis(k, s) * basis(k, t)).sum();
        assert!((direct - spectral_kernel(s, t, 200)).abs() < 1e-12);
        let dist = (s - t).rem_euclid(1.0).min((t - s).rem_euclid(1.0));
        if dist > 0.01 {
            assert!((direct - green_kernel(s, t)).abs() < 1e-4, "({s},{t})");
            checked += 1;
        }
    }
}

#[test]
fn symplectic_inverse_by_hand() {
    for d in 1..=3u16 {
        let form = SymplecticForm::new(d, ratio(1, 1)).unwrap();
        let n = 2 * d as usize;
        let zero = Rational::zero();
        let one = Rational::one();
        let mut expect = vec![vec![zero.clone(); n]; n];
        for i in 0..d as usize {
            expect[i][i + d as usize] = -one.clone();
            expect[i + d as usize][i] = one.clone();
        }
        assert_eq!(form.omega_upper, expect);
        let id = mat_mul(&form.omega_upper, &form.omega_lower);
        for (i, row) in id.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { one.clone() } else { zero.clone() });
            }
        }
        assert_eq!(invert(&form.omega_upper).unwrap(), form.omega_lower);
    }
}

#[test]
fn degree_one_bracket_signs() {
    let c = ratio(5, 2);
    let form = SymplecticForm::new(2, c.clone()).unwrap();
    for k in -3..=3 {
        let x = ModeIndex::primal(2, k);
        let fx = FockVector::mode(x, Rational::one());
        let fy = FockVector::mode(x.twin(), Rational::one());
        let kk = ratio(i64::from(k * k), 1);
        let expect = -(&c * &kk + Rational::one());
        assert_eq!(poisson_bracket(&fx, &fy, &form), FockVector::vacuum().scale(&expect));
        assert_eq!(poisson_bracket(&fy, &fx, &form), FockVector::vacuum().scale(&-expect));
    }
    let doubled = SymplecticForm::doubled(1).unwrap();
    let x = ModeIndex::primal(1, 2);
    let b = poisson_bracket(&FockVector::mode(x, Rational::one()), &FockVector::mode(x.twin(), Rational::one()), &doubled);
    assert_eq!(b, FockVector::vacuum());
}

#[test]
fn exponential_matches_taylor_polynomial() {
    let x = ModeIndex::primal(1, 1);
    let y = ModeIndex::primal(2, -1);
    let gamma: ModeMap = [(x, ratio(1, 2)), (y, ratio(-3, 4))].into();
    let gamma_star: ModeMap = [(x, ratio(2, 3))].into();
    let n = 9;
    let phi = wick_exponential(&gamma, &gamma_star, n);
    let xi: ModeMap<f64> = [(x, 0.7), (y, -1.3), (x.twin(), 0.4)].into();
    let s: f64 = 0.5 * 0.7 + (-0.75) * (-1.3) + (2.0 / 3.0) * 0.4;
    let taylor: f64 = (0..=n).map(|j| s.powi(j as i32) / (1..=j).map(f64::from).product::<f64>()).sum();
    assert!((chaos_eval_spectral(&phi, &xi) - taylor).abs() < 1e-13);
}

/// Value and derivative of a polynomial along one coordinate, by forward-mode jets.
fn jet_eval(f: &FockVector, xi: &ModeMap<f64>, wrt: ModeIndex) -> (f64, f64) {
    let mut v = 0.0;
    let mut dv = 0.0;
    for (mu, c) in f.iter() {
        let (mut a, mut da) = (1.0, 0.0);
        for m in mu.modes() {
            let x = xi[&m];
            let dx = if m == wrt { 1.0 } else { 0.0 };
            (a, da) = (a * x, a * dx + da * x);
        }
        v += c.to_f64() * a;
        dv += c.to_f64() * da;
    }
    (v, dv)
}

#[test]
fn bracket_matches_classical_bracket_of_evaluations() {
    let c = 2.0;
    let form = SymplecticForm::new(2, ratio(2, 1)).unwrap();
    let trunc = Truncation::new(2, 2);
    let shape = FockShape::new(trunc, 3, 4);
    for i in 0..40 {
        let mut rng = instance_rng(5, i);
        let f = random_fock(&mut rng, &shape);
        let g = random_fock(&mut rng, &shape);
        let mut xi = ModeMap::<f64>::new();
        for m in trunc.doubled_modes() {
            xi.insert(m, rand::Rng::random_range(&mut rng, -1.0..1.0));
        }
        let mut classical = 0.0;
        for x in trunc.primal_modes() {
            let k = f64::from(x.freq);
            let fx = jet_eval(&f, &xi, x).1;
            let fy = jet_eval(&f, &xi, x.twin()).1;
            let gx = jet_eval(&g, &xi, x).1;
            let gy = jet_eval(&g, &xi, x.twin()).1;
            classical += (c * k * k + 1.0) * (fy * gx - fx * gy);
        }
        let value = jet_eval(&poisson_bracket(&f, &g, &form), &xi, ModeIndex::primal(1, 0)).0;
        assert!((value - classical).abs() < 1e-9 * (1.0 + classical.abs()), "{value} vs {classical}");
    }
}

#[test]
fn contraction_counts_match_falling_factorials() {
    // {x^3, y^2} at frequency 0 with unit weight: -6 x^2 y
    let form = SymplecticForm::new(1, ratio(1, 1)).unwrap();
    let x = ModeIndex::primal(1, 0);
    let f = FockVector::monomial(MultiIndex::power(x, 3), Rational::one());
    let g = FockVector::monomial(MultiIndex::power(x.twin(), 2), Rational::one());
    let expect = FockVector::monomial(MultiIndex::from_pairs([(x, 2), (x.twin(), 1)]), ratio(-6, 1));
    assert_eq!(poisson_bracket(&f, &g, &form), expect);
}
