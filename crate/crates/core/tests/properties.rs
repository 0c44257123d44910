use std::f64::consts::{PI, TAU};

use beurling::analytic::{self, PrimePowers};
use beurling::counting::{self, ClassCountQuery, Mode};
use beurling::measures::{self, DiscreteMeasure};
use beurling::prime_systems::{classical_primes, modify_system, PrimeSystem};
use beurling::rational::{int, rat};
use beurling::semigroup::enumerate;
use beurling::Rational;
use num_complex::Complex64;
use proptest::prelude::*;

const POOL: [(u128, u128); 10] = [
    (3, 2),
    (2, 1),
    (5, 2),
    (3, 1),
    (7, 3),
    (5, 1),
    (7, 1),
    (11, 2),
    (13, 3),
    (4, 1),
];

fn system_strategy() -> impl Strategy<Value = PrimeSystem> {
    prop::collection::vec(0..POOL.len(), 0..6).prop_map(|idx| {
        let primes = idx.iter().map(|&i| rat(POOL[i].0, POOL[i].1)).collect();
        PrimeSystem::explicit(primes, None).unwrap()
    })
}

fn mode_strategy() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Total), Just(Mode::Distinct)]
}

/// Positions from the part of a small rational pool below `x_max`, weights
/// in the unit box.
fn measure_strategy(x_max: u128) -> impl Strategy<Value = DiscreteMeasure> {
    let pool: Vec<Rational> = POOL
        .iter()
        .map(|&(n, d)| rat(n, d))
        .filter(|p| *p <= int(x_max))
        .collect();
    let n = pool.len();
    prop::collection::vec((0..n, -1.0..1.0f64, -1.0..1.0f64), 0..5).prop_map(move |atoms| {
        DiscreteMeasure::new(
            atoms
                .into_iter()
                .map(|(i, re, im)| (pool[i], Complex64::new(re, im))),
            int(x_max),
        )
        .unwrap()
    })
}

fn close(a: &DiscreteMeasure, b: &DiscreteMeasure, tol: f64) -> bool {
    a.max_discrepancy(b) <= tol
}

/// Integer polynomials in `z`, lowest degree first.
fn poly_add(a: &[i128], b: &[i128]) -> Vec<i128> {
    (0..a.len().max(b.len()))
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect()
}

fn poly_one_minus_z_pow(k: u32) -> Vec<i128> {
    let mut out = vec![1i128];
    for _ in 0..k {
        let mut next = vec![0i128; out.len() + 1];
        for (i, c) in out.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c;
        }
        out = next;
    }
    out
}

fn poly_trim(mut p: Vec<i128>) -> Vec<i128> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_eval(p: &[i128], z: Complex64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::default(), |acc, &c| acc * z + c as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pi_count_is_monotone(a in 2u128..500, b in 2u128..500) {
        let system = classical_primes(&int(500)).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(system.pi_count(&int(lo)).unwrap() <= system.pi_count(&int(hi)).unwrap());
    }

    #[test]
    fn empty_modification_is_identity(limit in 2u128..2000) {
        let base = classical_primes(&int(limit)).unwrap();
        let same = modify_system(&base, &[], &[]).unwrap();
        prop_assert_eq!(same.primes(), base.primes());
        prop_assert_eq!(same.known_density(), Some(1.0));
    }

    #[test]
    fn big_omega_is_additive(a in 1u128..300, b in 1u128..300) {
        let x = int(90_000);
        let table = enumerate(&classical_primes(&x).unwrap(), &x).unwrap();
        let at = |n: u128| table.elements()[(n - 1) as usize];
        prop_assert_eq!(at(a * b).omega_total, at(a).omega_total + at(b).omega_total);
    }

    #[test]
    fn table_counts_and_determinism(system in system_strategy(), x in 1u128..300) {
        let x_max = int(x);
        let t1 = enumerate(&system, &x_max).unwrap();
        let t2 = enumerate(&system, &x_max).unwrap();
        prop_assert_eq!(t1.elements(), t2.elements());
        prop_assert!(t1.elements().windows(2).all(|w| w[0].value <= w[1].value));
        prop_assert_eq!(t1.n_count(&x_max).unwrap(), t1.len() as u64);
        for y in [1, x / 3 + 1, x / 2 + 1, x] {
            let y = int(y);
            let direct = t1.elements().iter().filter(|e| e.value <= y).count() as u64;
            prop_assert_eq!(t1.n_count(&y).unwrap(), direct);
        }
    }

    #[test]
    fn class_identities(system in system_strategy(), x in 1u128..400, k in 2u32..=12, mode in mode_strategy()) {
        let x_max = int(400);
        let table = enumerate(&system, &x_max).unwrap();
        let xr = int(x);
        let n = table.n_count(&xr).unwrap();

        let mut total = 0;
        for c in 0..k {
            let q = ClassCountQuery::new(k, c, mode).unwrap();
            let s = counting::s_count(&table, &q, &xr).unwrap();
            total += s;
            let r = counting::orthogonality_reconstruct(&table, &q, &xr).unwrap();
            prop_assert!((r - Complex64::new(s as f64, 0.0)).norm() <= 1e-9 * n as f64);
            // monotone in x
            prop_assert!(s <= counting::s_count(&table, &q, &x_max).unwrap());
        }
        prop_assert_eq!(total, n);

        let f0 = counting::f_q_sum(&table, 0, k, mode, &xr).unwrap();
        prop_assert_eq!(f0, Complex64::new(n as f64, 0.0));
        for q in 1..k {
            let a = counting::f_q_sum(&table, q, k, mode, &xr).unwrap();
            let b = counting::f_q_sum(&table, k - q, k, mode, &xr).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-9 * n as f64);
        }
    }

    #[test]
    fn convolution_commutes_and_associates(
        a in measure_strategy(60),
        b in measure_strategy(60),
        c in measure_strategy(60),
    ) {
        let x = int(60);
        let ab = measures::convolve(&a, &b, &x).unwrap();
        let ba = measures::convolve(&b, &a, &x).unwrap();
        prop_assert!(close(&ab, &ba, 1e-12));
        for ((p, _), (q, _)) in ab.atoms().iter().zip(ba.atoms()) {
            prop_assert_eq!(p, q);
        }
        let left = measures::convolve(&ab, &c, &x).unwrap();
        let right = measures::convolve(&a, &measures::convolve(&b, &c, &x).unwrap(), &x).unwrap();
        prop_assert!(close(&left, &right, 1e-12));

        let one = DiscreteMeasure::dirac(int(1), Complex64::new(1.0, 0.0), x).unwrap();
        prop_assert!(close(&measures::convolve(&one, &a, &x).unwrap(), &a, 0.0));
    }

    #[test]
    fn exp_star_turns_sums_into_convolutions(
        left in prop::collection::vec((0..5usize, -1.0..1.0f64, -1.0..1.0f64), 0..4),
        right in prop::collection::vec((5..POOL.len(), -1.0..1.0f64, -1.0..1.0f64), 0..4),
    ) {
        let x = int(200);
        let build = |atoms: &[(usize, f64, f64)]| {
            DiscreteMeasure::new(
                atoms.iter().map(|&(i, re, im)| (rat(POOL[i].0, POOL[i].1), Complex64::new(re, im))),
                x,
            )
            .unwrap()
        };
        let (mu, nu) = (build(&left), build(&right));
        let lhs = measures::exp_star(&mu.add(&nu), &x).unwrap();
        let rhs = measures::convolve(
            &measures::exp_star(&mu, &x).unwrap(),
            &measures::exp_star(&nu, &x).unwrap(),
            &x,
        )
        .unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-10), "{}", lhs.max_discrepancy(&rhs));
    }

    #[test]
    fn mellin_is_multiplicative(
        a in measure_strategy(6),
        b in measure_strategy(6),
        sigma in 0.5..3.0f64,
        t in -20.0..20.0f64,
    ) {
        // every product of pool positions <= 6 stays below 36
        let big = int(36);
        let wide = |m: &DiscreteMeasure| DiscreteMeasure::new(m.atoms().iter().copied(), big).unwrap();
        let s = Complex64::new(sigma, t);
        let prod = measures::convolve(&wide(&a), &wide(&b), &big).unwrap();
        let lhs = measures::mellin(&prod, s);
        let rhs = measures::mellin(&a, s) * measures::mellin(&b, s);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));

        // truncated: the defect is exactly the mass of the dropped products
        let x = int(6);
        let cut = measures::convolve(&a, &b, &x).unwrap();
        let defect: Complex64 = prod
            .atoms()
            .iter()
            .filter(|(p, _)| *p > x)
            .map(|(p, w)| w * (-s * beurling::rational::ln(p)).exp())
            .sum();
        prop_assert!((measures::mellin(&cut, s) + defect - lhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn distinct_weight_splits_into_three_pieces(
        k in 2u32..=12,
        q_seed in 0u32..12,
        power in 1u32..=40,
        p in prop::sample::select(vec![rat(3, 2), rat(2, 1), rat(5, 2), rat(3, 1), rat(97, 1)]),
    ) {
        let q = q_seed % k;
        let z = counting::root_of_unity(q as u64, k as u64);
        let small = p <= int(2);

        // exact form: integer polynomials in z
        let distinct = poly_trim(poly_add(&[1], &poly_one_minus_z_pow(power).iter().map(|c| -c).collect::<Vec<_>>()));
        let g1 = vec![0, 1];
        let (g2, g3) = if small {
            (vec![0, -1], distinct.clone())
        } else {
            (poly_add(&[1, -1], &poly_one_minus_z_pow(power).iter().map(|c| -c).collect::<Vec<_>>()), vec![])
        };
        prop_assert_eq!(poly_trim(poly_add(&poly_add(&g1, &g2), &g3)), distinct.clone());

        // floating form
        let w = |f: measures::PrimePowerWeight| f.eval(&p, power);
        let d = w(measures::weight_distinct(q, k).unwrap());
        let sum = w(measures::weight_g1(q, k).unwrap()) + w(measures::weight_g2(q, k).unwrap()) + w(measures::weight_g3(q, k).unwrap());
        prop_assert!((sum - d).norm() <= 1e-12 * d.norm().max(1.0));
        // Horner on alternating binomials cancels; scale by the coefficient mass
        let mass: f64 = distinct.iter().map(|c| c.abs() as f64).sum();
        prop_assert!((d - poly_eval(&distinct, z)).norm() <= 1e-13 * mass.max(1.0));

        // envelope
        let g2w = w(measures::weight_g2(q, k).unwrap()).norm();
        let bound = if small { 1.0 } else { 2f64.powi(power as i32) };
        prop_assert!(g2w <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn trig_inequality_holds(x in -PI..=PI, k in 2u32..=10, extra in 0.0..50.0f64) {
        let m = (k * k) as f64 + extra;
        prop_assert!(analytic::trig_lhs(x, k, m) >= -1e-12);
    }

    #[test]
    fn atom_weight_is_nonnegative(
        ln_u in 0.0..40.0f64,
        t in -1e3..1e3f64,
        k in 2u32..=10,
        q_seed in 0u32..10,
    ) {
        let q = q_seed % k;
        prop_assert!(analytic::atom_trig_weight(ln_u, t, q, k, (k * k) as f64) >= -1e-12);
        // same value as the unreduced formula when the angle is small
        if (t * ln_u).abs() < 100.0 {
            let a = t * ln_u - TAU * q as f64 / k as f64;
            let direct = (k * k) as f64 - 1.0 - (k * k) as f64 * a.cos() + (k as f64 * t * ln_u).cos();
            prop_assert!((analytic::atom_trig_weight(ln_u, t, q, k, (k * k) as f64) - direct).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dini_is_monotone_in_sigma(
        s1 in 1.001..3.0f64,
        gap in 0.0..1.0f64,
        t in -30.0..30.0f64,
        k in 2u32..=6,
        q_seed in 0u32..6,
    ) {
        let x = int(20_000);
        let pp = PrimePowers::new(&classical_primes(&x).unwrap(), &x).unwrap();
        let q = q_seed % k;
        let a = analytic::dini_integral(&pp, q, k, t, s1, &x).unwrap();
        let b = analytic::dini_integral(&pp, q, k, t, s1 + gap, &x).unwrap();
        prop_assert!(a >= b);
        prop_assert!(b >= 0.0);
    }

    #[test]
    fn euler_product_matches_log_sum(
        sigma in 1.2..3.0f64,
        t in -10.0..10.0f64,
        k in 2u32..=12,
        q_seed in 0u32..12,
        mode in mode_strategy(),
    ) {
        let x = int(5000);
        let pp = PrimePowers::new(&classical_primes(&x).unwrap(), &x).unwrap();
        let s = Complex64::new(sigma, t);
        let q = q_seed % k;
        let e = analytic::euler_product_fq(&pp, s, q, k, mode, &x).unwrap().value;
        let l = analytic::log_fq_hat_prime_cutoff(&pp, s, q, k, mode, &x).unwrap();
        prop_assert!((l.exp() - e).norm() <= 1e-9 * e.norm());
    }

    #[test]
    fn pointwise_sum_is_nonnegative(
        sigma in 1.01..3.0f64,
        t in -20.0..20.0f64,
        k in 2u32..=8,
        q_seed in 0u32..8,
    ) {
        let x = int(5000);
        let pp = PrimePowers::new(&classical_primes(&x).unwrap(), &x).unwrap();
        let q = q_seed % k;
        let m = (k * k) as f64;
        prop_assert!(analytic::pointwise_inequality_check(&pp, sigma, t, q, k, m, &x).unwrap() >= -1e-12);
        let e = analytic::exponentiated_inequality(&pp, sigma, t, q, k, m, &x).unwrap();
        prop_assert!(e >= 1.0 - 1e-9, "{e}");
    }

    #[test]
    fn reconstruction_on_random_systems(system in system_strategy(), k in 2u32..=5, q_seed in 0u32..5, mode in mode_strategy()) {
        let q = q_seed % k;
        let x: Rational = int(150);
        let r = measures::verify_fq_reconstruction(&system, q, k, mode, &x).unwrap();
        prop_assert!(r.passed, "{:?}", r);
        let split = measures::verify_split_reconstruction(&system, q, k, &x).unwrap();
        prop_assert!(split.passed, "{:?}", split);
    }
}
