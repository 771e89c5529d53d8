mod common;

use common::{kinetics_c, taylor_coeff};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use thopf::model::{derivative_tensor, equilibrium, equilibrium_residual, linear_coeffs, Var};
use thopf::{presets, ModelParams};

fn point(p: &ModelParams) -> [f64; 4] {
    let u0 = equilibrium(p).u0;
    [u0, u0, u0, u0]
}

/// Second and third partials of one kinetic component from Cauchy integrals.
fn partial(p: &ModelParams, comp: usize, vars: &[Var]) -> f64 {
    let x0 = point(p);
    let rho = 0.2 * x0[0];
    let eval = |shift: [C; 4]| {
        let mut x = [C::new(0.0, 0.0); 4];
        for i in 0..4 {
            x[i] = C::from(x0[i]) + shift[i];
        }
        kinetics_c(p, x)[comp]
    };
    // collect multiplicities
    let mut mult = [0usize; 4];
    for v in vars {
        mult[*v as usize] += 1;
    }
    let distinct: Vec<usize> = (0..4).filter(|&i| mult[i] > 0).collect();
    let fact: f64 = mult.iter().map(|&m| (1..=m).product::<usize>() as f64).product();
    let c = match distinct.len() {
        1 => taylor_coeff(
            |z: [C; 1]| {
                let mut s = [C::new(0.0, 0.0); 4];
                s[distinct[0]] = z[0];
                eval(s)
            },
            [mult[distinct[0]]],
            rho,
            16,
        ),
        2 => taylor_coeff(
            |z: [C; 2]| {
                let mut s = [C::new(0.0, 0.0); 4];
                s[distinct[0]] = z[0];
                s[distinct[1]] = z[1];
                eval(s)
            },
            [mult[distinct[0]], mult[distinct[1]]],
            rho,
            16,
        ),
        _ => taylor_coeff(
            |z: [C; 3]| {
                let mut s = [C::new(0.0, 0.0); 4];
                s[distinct[0]] = z[0];
                s[distinct[1]] = z[1];
                s[distinct[2]] = z[2];
                eval(s)
            },
            [mult[distinct[0]], mult[distinct[1]], mult[distinct[2]]],
            rho,
            16,
        ),
    };
    c.re * fact
}

fn check_tensor(p: &ModelParams) {
    let t = derivative_tensor(p, &equilibrium(p), None);
    for &i in &Var::ALL {
        for &j in &Var::ALL {
            for comp in 0..2 {
                let want = partial(p, comp, &[i, j]);
                let got = t.second(i, j)[comp];
                assert!(
                    (got - want).abs() <= 1e-9 * (1.0 + want.abs()),
                    "d2 f{} / d{i:?} d{j:?}: {got} vs {want}",
                    comp + 1
                );
            }
            for &k in &Var::ALL {
                for comp in 0..2 {
                    let want = partial(p, comp, &[i, j, k]);
                    let got = t.third(i, j, k)[comp];
                    assert!(
                        (got - want).abs() <= 1e-8 * (1.0 + want.abs()),
                        "d3 f{} / d{i:?} d{j:?} d{k:?}: {got} vs {want}",
                        comp + 1
                    );
                }
            }
        }
    }
}

#[test]
fn tensor_matches_cauchy_oracle() {
    for p in [presets::baseline(), presets::mode_two(), presets::mixed_modes()] {
        check_tensor(&p.with_r(1.3));
    }
}

#[test]
fn tensor_is_symmetric() {
    let p = presets::mode_two();
    let t = derivative_tensor(&p, &equilibrium(&p), None);
    for &i in &Var::ALL {
        for &j in &Var::ALL {
            assert_eq!(t.second(i, j), t.second(j, i));
            for &k in &Var::ALL {
                let x = t.third(i, j, k);
                assert_eq!(x, t.third(j, i, k));
                assert_eq!(x, t.third(k, j, i));
                assert_eq!(x, t.third(i, k, j));
            }
        }
    }
}

#[test]
fn scaled_tensor_is_tau_times_unscaled() {
    let p = presets::mode_two().with_r(1.26);
    let eq = equilibrium(&p);
    let tau = 0.79;
    let (t0, t1) = (derivative_tensor(&p, &eq, None), derivative_tensor(&p, &eq, Some(tau)));
    for &i in &Var::ALL {
        for &j in &Var::ALL {
            for c in 0..2 {
                assert!((t1.second(i, j)[c] - tau * t0.second(i, j)[c]).abs() < 1e-14 * (1.0 + t0.second(i, j)[c].abs()));
            }
        }
    }
}

#[test]
fn kinetics_vanish_at_equilibrium() {
    for p in [presets::baseline(), presets::mode_two(), presets::mixed_modes()] {
        let u0 = equilibrium(&p).u0;
        let f = p.kinetics(u0, u0, u0, u0);
        assert!(f[0].abs() < 1e-15 && f[1].abs() < 1e-15, "{f:?}");
    }
}

#[test]
fn baseline_linear_coefficients() {
    let p = presets::baseline();
    let lc = linear_coeffs(&p, &equilibrium(&p));
    assert!((lc.a0 - 0.2625).abs() < 5e-5, "{}", lc.a0);
    assert!(lc.b0 < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equilibrium_is_positive_root(a in 0.05f64..3.0, b in 1e-4f64..0.99) {
        let p = ModelParams::new(1.0, 2.0, a, b, 3.0, 1.0, 0.0);
        let eq = equilibrium(&p);
        prop_assert!(eq.u0 > 0.0 && eq.u0 < 1.0);
        prop_assert!(equilibrium_residual(&p, &eq).abs() < 1e-12);
        let lc = linear_coeffs(&p, &eq);
        prop_assert!((lc.b0 - (eq.u0 - 1.0)).abs() < 1e-15);
        // A0 > 0 exactly when u0 < (1 - b)/2
        if (eq.u0 - (1.0 - b) / 2.0).abs() > 1e-12 {
            prop_assert_eq!(lc.a0 > 0.0, eq.u0 < (1.0 - b) / 2.0);
        }
    }

    #[test]
    fn first_derivatives_match_linear_coeffs(a in 0.1f64..2.0, b in 1e-3f64..0.9) {
        let p = ModelParams::new(1.0, 2.0, a, b, 3.0, 1.0, 0.0);
        let u0 = equilibrium(&p).u0;
        let lc = linear_coeffs(&p, &equilibrium(&p));
        let h = 1e-6 * u0;
        let du = (p.kinetics(u0 + h, u0, u0, u0)[0] - p.kinetics(u0 - h, u0, u0, u0)[0]) / (2.0 * h);
        let dv = (p.kinetics(u0, u0 + h, u0, u0)[0] - p.kinetics(u0, u0 - h, u0, u0)[0]) / (2.0 * h);
        prop_assert!((du - lc.a0).abs() < 1e-6 * (1.0 + lc.a0.abs()), "{} {}", du, lc.a0);
        prop_assert!((dv - lc.b0).abs() < 1e-6, "{} {}", dv, lc.b0);
    }

    #[test]
    fn tensor_oracle_random_params(a in 0.2f64..1.5, b in 0.01f64..0.5, r in 0.2f64..2.0) {
        check_tensor(&ModelParams::new(1.0, 5.0, a, b, 3.0, r, 0.5));
    }
}
