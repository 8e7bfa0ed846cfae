//! Cross-checks against second, deliberately naive implementations.

use std::collections::HashMap;

use ffkr::kakeya::{
    besicovitch_2d, heisenberg_example, incidence_chain_counts, incidence_count, kakeya_maximal,
    LineSpec, DEFAULT_COUNT_BUDGET,
};
use ffkr::restriction::{
    consistency_check, prop127_incidence_count, rstar_lower_power, rstar_upper_even, PowerConfig,
};
use ffkr::varieties::{
    extension, extension_direct, surface_sum_table, SurfaceFunction, SurfaceMeasure,
};
use ffkr::{Exponent, FieldElement, FieldSpec, Grid, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_grid(field: &FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> Grid {
    let vals = (0..field.space_size(n))
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Grid::from_values(field, n, Side::Space, vals).unwrap()
}

/// `sum_x f(x) exp(-2 pi i tr(x . xi)/p)` with the trace computed by repeated Frobenius.
fn naive_dft(f: &Grid) -> Vec<Complex64> {
    let field = f.field();
    let n = f.n();
    let p = field.characteristic() as f64;
    let tr = |x: FieldElement| {
        let mut acc = FieldElement::ZERO;
        let mut y = x;
        for _ in 0..field.degree() {
            acc = field.add(acc, y);
            y = field.pow(y, field.characteristic() as u64);
        }
        field.prime_lift(acc).unwrap() as f64
    };
    (0..f.len())
        .map(|k| {
            let xi = field.point_coords(k, n);
            (0..f.len())
                .map(|j| {
                    let x = field.point_coords(j, n);
                    let phase = -std::f64::consts::TAU * tr(field.dot(&x, &xi)) / p;
                    f.values()[j] * Complex64::from_polar(1.0, phase)
                })
                .sum()
        })
        .collect()
}

#[test]
fn transform_matches_naive_dft() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, k, n) in [(3, 1, 3), (5, 1, 2), (3, 2, 2), (7, 1, 1)] {
        let field = FieldSpec::new(p, k).unwrap();
        let f = random_grid(&field, n, &mut rng);
        let fast = f.fourier_forward().unwrap();
        for (a, b) in fast.values().iter().zip(naive_dft(&f)) {
            assert!((a - b).norm() < 1e-9, "F_{p}^{k} n={n}");
        }
    }
}

#[test]
fn extension_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let field = FieldSpec::prime(7).unwrap();
    for s in [
        SurfaceMeasure::paraboloid(&field, 3).unwrap(),
        SurfaceMeasure::cone(&field).unwrap(),
        SurfaceMeasure::moment_curve(&field, 3).unwrap(),
    ] {
        let vals = (0..s.len())
            .map(|_| Complex64::new(rng.gen(), rng.gen()))
            .collect();
        let g = SurfaceFunction::new(&s, vals).unwrap();
        let a = extension(&g).unwrap();
        let b = extension_direct(&g);
        let dev = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10, "{}", s.label());
    }
}

#[test]
fn sum_table_matches_counter() {
    let field = FieldSpec::prime(5).unwrap();
    let s = SurfaceMeasure::paraboloid(&field, 2).unwrap();
    for k in [2, 3] {
        let table = surface_sum_table(&s, k, u128::MAX).unwrap();
        let mut counter: HashMap<Vec<FieldElement>, u64> = HashMap::new();
        let pts: Vec<Vec<FieldElement>> = s.points().map(|p| p.to_vec()).collect();
        let mut idx = vec![0usize; k];
        loop {
            let mut sum = vec![FieldElement::ZERO; 2];
            for &i in &idx {
                sum = field.add_vec(&sum, &pts[i]);
            }
            *counter.entry(sum).or_default() += 1;
            let mut j = 0;
            while j < k {
                idx[j] += 1;
                if idx[j] < pts.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == k {
                break;
            }
        }
        for (eta, c) in counter {
            assert_eq!(table[field.point_index(&eta)], c);
        }
    }
}

#[test]
fn power_lowers_stay_below_counting_uppers() {
    let field = FieldSpec::prime(5).unwrap();
    let s = SurfaceMeasure::paraboloid(&field, 2).unwrap();
    let cfg = PowerConfig {
        restarts: 8,
        max_iters: 300,
        tol: 1e-12,
        seed: 42,
    };
    let lower = rstar_lower_power(Exponent::int(2), Exponent::int(4), &s, &cfg).unwrap();
    let upper = rstar_upper_even(&s, 2, u128::MAX).unwrap();
    assert!(lower.verify().unwrap());
    consistency_check(&[lower.clone(), upper.clone()]).unwrap();
    let mut broken = lower;
    broken.value = upper.value + 1.0;
    assert!(consistency_check(&[broken, upper]).is_err());
}

#[test]
fn power_iteration_is_deterministic() {
    let field = FieldSpec::prime(7).unwrap();
    let s = SurfaceMeasure::moment_curve(&field, 3).unwrap();
    let cfg = PowerConfig {
        restarts: 6,
        seed: 9,
        ..PowerConfig::default()
    };
    let a = rstar_lower_power(Exponent::int(2), Exponent::int(6), &s, &cfg).unwrap();
    let b = rstar_lower_power(Exponent::int(2), Exponent::int(6), &s, &cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn maximal_function_matches_line_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let field = FieldSpec::prime(5).unwrap();
    let f = random_grid(&field, 3, &mut rng);
    let star = kakeya_maximal(&f).unwrap();
    for (d, &got) in star.iter().enumerate() {
        let v = field.point_coords(d, 2);
        let mut best = 0.0f64;
        for b in 0..25 {
            let x0 = field.point_coords(b, 2);
            let mut s = 0.0;
            for t in field.elements() {
                let pt = vec![
                    field.add(x0[0], field.mul(v[0], t)),
                    field.add(x0[1], field.mul(v[1], t)),
                    t,
                ];
                s += f.at(&pt).norm();
            }
            best = best.max(s);
        }
        assert!((best - got).abs() < 1e-12);
    }
}

fn random_config(
    field: &FieldSpec,
    rng: &mut ChaCha8Rng,
    np: usize,
    nl: usize,
) -> (Vec<usize>, Vec<LineSpec>) {
    let q = field.order() as usize;
    let mut points: Vec<usize> = (0..q * q).collect();
    for i in (1..points.len()).rev() {
        points.swap(i, rng.gen_range(0..=i));
    }
    points.truncate(np);
    let mut all: Vec<LineSpec> = (0..q * q)
        .map(|i| {
            LineSpec::new(
                vec![field.point_coords(i, 2)[0]],
                vec![field.point_coords(i, 2)[1]],
            )
            .unwrap()
        })
        .collect();
    for i in (1..all.len()).rev() {
        all.swap(i, rng.gen_range(0..=i));
    }
    all.truncate(nl);
    (points, all)
}

fn on(field: &FieldSpec, p: usize, l: &LineSpec) -> bool {
    let c = field.point_coords(p, 2);
    c[0] == field.add(l.x0[0], field.mul(l.v[0], c[1]))
}

#[test]
fn incidences_match_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let field = FieldSpec::prime(7).unwrap();
    for _ in 0..50 {
        let np = rng.gen_range(1..30);
        let nl = rng.gen_range(1..30);
        let (pts, lines) = random_config(&field, &mut rng, np, nl);
        let oracle = pts
            .iter()
            .flat_map(|&p| lines.iter().map(move |l| (p, l)))
            .filter(|(p, l)| on(&field, *p, l))
            .count() as u64;
        assert_eq!(incidence_count(&field, 2, &pts, &lines).unwrap(), oracle);
    }
}

#[test]
fn chain_counts_match_tuple_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let field = FieldSpec::prime(7).unwrap();
    for _ in 0..5 {
        let (pts, lines) = random_config(&field, &mut rng, 14, 8);
        let c =
            incidence_chain_counts(&field, 2, &pts, &lines, true, DEFAULT_COUNT_BUDGET).unwrap();
        let inc = |p: usize, l: usize| on(&field, pts[p], &lines[l]);
        let (np, nl) = (pts.len(), lines.len());
        let mut v = 0u64;
        let mut w_list = Vec::new();
        for p in 0..np {
            for l in 0..nl {
                for l2 in 0..nl {
                    if l != l2 && inc(p, l) && inc(p, l2) {
                        v += 1;
                        for p2 in 0..np {
                            if p2 != p && inc(p2, l2) {
                                w_list.push((p, l, l2, p2));
                            }
                        }
                    }
                }
            }
        }
        let mut t = 0u64;
        for a in &w_list {
            for b in &w_list {
                if a.1 == b.1 && a.3 == b.3 && a.0 != b.0 {
                    t += 1;
                }
            }
        }
        // A = (p, p1, p2, l1, l2); Q' pairs A elements with equal (p1, p2) and distinct p.
        let mut a_list = Vec::new();
        for p in 0..np {
            for l1 in 0..nl {
                for l2 in 0..nl {
                    if l1 == l2 || !inc(p, l1) || !inc(p, l2) {
                        continue;
                    }
                    for p1 in 0..np {
                        for p2 in 0..np {
                            if p1 != p && p2 != p && inc(p1, l1) && inc(p2, l2) {
                                a_list.push((p, p1, p2));
                            }
                        }
                    }
                }
            }
        }
        let mut q = 0u64;
        for a in &a_list {
            for b in &a_list {
                if a.1 == b.1 && a.2 == b.2 && a.0 != b.0 {
                    q += 1;
                }
            }
        }
        let i = incidence_count(&field, 2, &pts, &lines).unwrap();
        assert_eq!(
            (c.i, c.v_prime, c.w as usize, c.t_prime, c.q_prime),
            (i, v, w_list.len(), t, Some(q))
        );
        assert!(c.angle_chain && c.triangle_chain && c.quadrilateral_chain == Some(true));
    }
}

#[test]
fn besicovitch_chain_at_f5() {
    let field = FieldSpec::prime(5).unwrap();
    let w = besicovitch_2d(&field).unwrap();
    let c = incidence_chain_counts(
        &field,
        2,
        &w.set,
        &w.lines(&field),
        true,
        DEFAULT_COUNT_BUDGET,
    )
    .unwrap();
    assert_eq!(c.points, 15);
    assert_eq!(c.i, 25);
    assert!((c.v_prime + c.i) * 15 >= 25 * 25);
}

#[test]
fn prop127_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for p in [7u32, 11] {
        let field = FieldSpec::prime(p).unwrap();
        for _ in 0..30 {
            let mut pts: Vec<[FieldElement; 2]> = (1..field.space_size(2))
                .map(|i| {
                    let c = field.point_coords(i, 2);
                    [c[0], c[1]]
                })
                .collect();
            for i in (1..pts.len()).rev() {
                pts.swap(i, rng.gen_range(0..=i));
            }
            pts.truncate(rng.gen_range(1..40));
            let mut oracle = 0u64;
            for xi in &pts {
                for eta in &pts {
                    if field.dot(xi, eta) == field.dot(xi, xi) {
                        oracle += 1;
                    }
                }
            }
            let r = prop127_incidence_count(&field, &pts).unwrap();
            assert_eq!(r.count, oracle);
            assert!(r.within_bound);
        }
    }
}

#[test]
fn heisenberg_over_f9() {
    let field = FieldSpec::new(3, 2).unwrap();
    let h = heisenberg_example(&field).unwrap();
    // Im(z1 conj z2) = Im(z3): for each (z1, z2) the imaginary part of z3 is fixed, leaving 3 choices.
    assert_eq!(h.points.len(), 81 * 3);
    assert!(h.lines_in_p);
    assert!(h.repeated_direction.is_some());
    assert!(h.distinct_directions < h.lines.len());
}
