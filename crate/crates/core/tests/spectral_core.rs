mod common;

use common::{convolution_oracle, max_abs, max_diff, naive_forward, random_field, random_vec};
use movewin::grid::signed_index;
use movewin::{forward, inverse, multiply_collocated, multiply_dealiased, Field, Grid, ScalarFn};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn transform_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (dim, n) in [(1, 4), (1, 9), (1, 16), (2, 4), (2, 6)] {
        let g = Grid::new(dim, 3.0, n).unwrap();
        let s = random_vec(&mut rng, g.len());
        let fast = forward(&g, &s).unwrap();
        assert!(max_diff(&fast, &naive_forward(&g, &s)) < 1e-13, "d={dim} N={n}");
    }
}

#[test]
fn round_trip_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..100 {
        let dim = 1 + i % 2;
        let n = rng.gen_range(4..=64);
        let g = Grid::new(dim, rng.gen_range(0.5..50.0), n).unwrap();
        let s = random_vec(&mut rng, g.len());
        let back = inverse(&g, &forward(&g, &s).unwrap()).unwrap();
        assert!(max_diff(&back, &s) <= 1e-12 * max_abs(&s), "samples d={dim} N={n}");
        let c = random_vec(&mut rng, g.len());
        let again = forward(&g, &inverse(&g, &c).unwrap()).unwrap();
        assert!(max_diff(&again, &c) <= 1e-12 * max_abs(&c), "coeffs d={dim} N={n}");
    }
}

#[test]
fn parseval_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..100 {
        let dim = 1 + i % 2;
        let n = rng.gen_range(4..=64);
        let g = Grid::new(dim, rng.gen_range(0.5..50.0), n).unwrap();
        let s = random_vec(&mut rng, g.len());
        let quad = s.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.cell_volume();
        let f = Field::from_samples(g, &s).unwrap();
        let rel = (f.l2_norm().powi(2) - quad).abs() / quad;
        assert!(rel <= 1e-12, "d={dim} N={n} rel={rel:e}");
    }
}

#[test]
fn unit_mode_norm_is_window_volume() {
    for (dim, l) in [(1, 2.5), (2, 7.0)] {
        let g = Grid::new(dim, l, 8).unwrap();
        let k: &[i64] = if dim == 1 { &[3] } else { &[-2, 5] };
        let f = Field::mode(g, k).unwrap();
        assert!((f.l2_norm() - (2.0 * l).powf(dim as f64 / 2.0)).abs() < 1e-12);
    }
}

#[test]
fn norm_matches_padded_quadrature() {
    // |f|² has degree 2N, so the trapezoid rule on a grid with cutoff ≥ 2N
    // integrates it exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for dim in [1, 2] {
        let g = Grid::new(dim, 4.0, 12).unwrap();
        let f = random_field(&mut rng, g);
        let fine = g.with(4.0, 2 * g.modes() + 1).unwrap();
        let s = f.zero_extended_samples(&fine).unwrap();
        let quad = s.iter().map(|v| v.norm_sqr()).sum::<f64>() * fine.cell_volume();
        assert!((f.l2_norm() - quad.sqrt()).abs() <= 1e-10 * quad.sqrt());
    }
}

#[test]
fn projection_idempotent_and_contractive() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let dim = 1 + i % 2;
        let n = rng.gen_range(4..=40);
        let g = Grid::new(dim, 5.0, n).unwrap();
        let f = random_field(&mut rng, g);
        let m = rng.gen_range(1..=n);
        let p = f.project(m).unwrap();
        let pp = p.project(m).unwrap();
        assert!(max_diff(p.coeffs(), pp.coeffs()) <= 1e-12);
        assert!(p.l2_norm() <= f.l2_norm() * (1.0 + 1e-12));
        // Retained modes are untouched, the rest vanish after re-embedding.
        let back = p.pad_to(n).unwrap();
        for (j, c) in back.coeffs().iter().enumerate() {
            let k = if dim == 1 {
                vec![signed_index(j, n)]
            } else {
                let len = g.axis_len();
                vec![signed_index(j / len, n), signed_index(j % len, n)]
            };
            let inside = k.iter().all(|v| v.unsigned_abs() as usize <= m);
            let expected = if inside { f.coeff(&k) } else { Complex64::new(0.0, 0.0) };
            assert!((c - expected).norm() <= 1e-12);
        }
    }
}

#[test]
fn projection_rejects_cutoff_above_degree() {
    let g = Grid::new(1, 1.0, 8).unwrap();
    assert!(Field::zeros(g).project(9).is_err());
    assert!(Field::zeros(g).project(0).is_err());
}

#[test]
fn dealiased_product_equals_truncated_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for dim in [1, 2] {
        for n in 1..=8 {
            let g = Grid::new(dim, 2.0 + n as f64, n).unwrap();
            let (a, b) = (random_field(&mut rng, g), random_field(&mut rng, g));
            let fast = multiply_dealiased(&a, &b).unwrap();
            let oracle = convolution_oracle(&a, &b);
            assert!(max_diff(fast.coeffs(), &oracle) <= 1e-12 * max_abs(&oracle).max(1.0), "d={dim} N={n}");
        }
    }
}

#[test]
fn collocated_product_aliases_high_modes() {
    let g = Grid::new(1, 1.0, 4).unwrap();
    let e = Field::mode(g, &[3]).unwrap();
    // 3 + 3 = 6 folds onto 6 - 9 = -3 on a 9-point grid.
    let c = multiply_collocated(&e, &e).unwrap();
    assert!((c.coeff(&[-3]) - 1.0).norm() < 1e-12);
    let d = multiply_dealiased(&e, &e).unwrap();
    assert!(d.l2_norm() < 1e-12);
}

#[test]
fn real_samples_have_conjugate_symmetric_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for dim in [1, 2] {
        let g = Grid::new(dim, 3.0, 10).unwrap();
        let s: Vec<Complex64> = (0..g.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let f = Field::from_samples(g, &s).unwrap();
        for k0 in -10i64..=10 {
            if dim == 1 {
                assert!((f.coeff(&[k0]) - f.coeff(&[-k0]).conj()).norm() < 1e-14);
            } else {
                for k1 in -10i64..=10 {
                    assert!((f.coeff(&[k0, k1]) - f.coeff(&[-k0, -k1]).conj()).norm() < 1e-14);
                }
            }
        }
    }
}

fn torus_projection_error(f: &ScalarFn, l: f64, n: usize) -> f64 {
    let fine = Grid::new(1, l, 32 * n).unwrap();
    let approx = Field::interpolate(f, fine)
        .unwrap()
        .project(n)
        .unwrap()
        .pad_to(fine.modes())
        .unwrap()
        .samples();
    let sum: f64 = approx
        .iter()
        .enumerate()
        .map(|(i, v)| (f.eval(&[fine.point(i)[0]]).unwrap() - v).norm_sqr())
        .sum();
    (sum * fine.cell_volume()).sqrt()
}

#[test]
fn finite_regularity_projection_rate() {
    let l = 3.0;
    let f = ScalarFn::real(1, move |x| (PI * x[0] / l).sin().abs().powf(2.5));
    let ns = [16usize, 32, 64, 128, 256];
    let errors: Vec<f64> = ns.iter().map(|&n| torus_projection_error(&f, l, n)).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 5.0, ys.iter().sum::<f64>() / 5.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!(slope <= -2.0, "slope {slope}, errors {errors:?}");
}

#[test]
fn analytic_projection_decays_superalgebraically() {
    let f = ScalarFn::real(1, |x| (-x[0] * x[0]).exp());
    let errors: Vec<f64> = [6usize, 10, 14, 18, 22]
        .iter()
        .map(|&n| torus_projection_error(&f, 8.0, n))
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    for r in ratios.windows(2) {
        assert!(r[1] < r[0], "errors {errors:?}");
    }
}

#[test]
fn gaussian_interpolant_is_accurate_off_grid() {
    let g = Grid::new(1, 10.0, 64).unwrap();
    let f = ScalarFn::real(1, |x| (-x[0] * x[0]).exp());
    let field = Field::interpolate(&f, g).unwrap();
    for x in [-3.3, -0.77, 0.0, 0.123, 2.9] {
        assert!((field.eval(&[x]) - (-x * x).exp()).norm() < 1e-13, "x={x}");
    }
}

#[test]
fn resampling_identity_and_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for dim in [1, 2] {
        let g = Grid::new(dim, 4.0, 10).unwrap();
        let f = random_field(&mut rng, g);
        let same = f.resample_zero_extend(4.0, 10).unwrap();
        assert!(max_diff(same.coeffs(), f.coeffs()) <= 1e-12);
        let z = Field::zeros(g).resample_zero_extend(8.0, 20).unwrap();
        assert_eq!(z.l2_norm(), 0.0);
        assert!(f.resample_zero_extend(3.0, 10).is_err());
    }
}

#[test]
fn resampling_preserves_norm_of_interior_gaussian() {
    for dim in [1, 2] {
        let f = ScalarFn::real(dim, |x| x.iter().map(|v| (-(v - 0.5).powi(2)).exp()).product());
        // ∫ e^{-2(x-c)²} dx = √(π/2) per axis.
        let exact = (PI / 2.0).sqrt().powi(dim as i32).sqrt();
        let n = if dim == 1 { 96 } else { 40 };
        let g = Grid::new(dim, 8.0, n).unwrap();
        let field = Field::interpolate(&f, g).unwrap();
        for (l, m) in [(16.0, 2 * n), (24.0, 3 * n), (20.0, 2 * n + 7)] {
            let r = field.resample_zero_extend(l, m).unwrap();
            assert!((r.l2_norm() - exact).abs() < 1e-8, "d={dim} L={l} N={m}");
            let x = [0.3, -0.2];
            assert!((r.eval(&x[..dim]) - field.eval(&x[..dim])).norm() < 1e-8);
        }
    }
}
