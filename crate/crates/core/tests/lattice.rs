use latic::lattice::{build_codebook, construction_a, make_linear_code, mean_power, Lattice, LinearCode};
use proptest::prelude::*;

fn lattice(n: usize, k: usize, p: u64, seed: u64, gamma: f64) -> Lattice {
    construction_a(make_linear_code(n, k, p, seed).unwrap(), gamma).unwrap()
}

/// Exhaustive search over integer vectors within ∞-distance `p` of the
/// rounded target; ties go to the lexicographically smallest vector.
fn box_search(lat: &Lattice, y: &[f64]) -> Vec<i64> {
    let n = lat.dim();
    let p = lat.code().p() as i64;
    let u: Vec<f64> = y.iter().map(|v| v / lat.gamma()).collect();
    let center: Vec<i64> = u.iter().map(|v| v.round() as i64).collect();
    let side = 2 * p + 1;
    let total = side.pow(n as u32);
    let mut best: Option<(f64, Vec<i64>)> = None;
    for idx in 0..total {
        let mut rest = idx;
        let v: Vec<i64> = (0..n)
            .map(|d| {
                let off = rest % side - p;
                rest /= side;
                center[d] + off
            })
            .collect();
        if !lat.contains_integer(&v) {
            continue;
        }
        let dist: f64 = u.iter().zip(&v).map(|(a, &b)| (a - b as f64) * (a - b as f64)).sum();
        let better = match &best {
            None => true,
            Some((bd, bv)) => dist < *bd || (dist == *bd && v < *bv),
        };
        if better {
            best = Some((dist, v));
        }
    }
    best.unwrap().1
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn small_lattice() -> impl Strategy<Value = Lattice> {
    (1usize..=3, prop::sample::select(vec![3u64, 5, 7]), any::<u64>(), 0.2f64..3.0)
        .prop_flat_map(|(n, p, seed, gamma)| (0..=n).prop_map(move |k| lattice(n, k, p, seed, gamma)))
}

fn with_point(range: f64) -> impl Strategy<Value = (Lattice, Vec<f64>)> {
    small_lattice().prop_flat_map(move |lat| {
        let n = lat.dim();
        (Just(lat), prop::collection::vec(-range..range, n))
    })
}

fn with_integer(range: i64) -> impl Strategy<Value = (Lattice, Vec<i64>, Vec<i64>)> {
    small_lattice().prop_flat_map(move |lat| {
        let n = lat.dim();
        let v = prop::collection::vec(-range..range, n);
        (Just(lat), v.clone(), v)
    })
}

/// Nearest lattice point's integer coordinates to an arbitrary integer
/// vector, which is a lattice vector itself.
fn snap(lat: &Lattice, v: &[i64]) -> Vec<i64> {
    let y: Vec<f64> = lat.point(v);
    lat.nearest_integer(&y).unwrap()
}

proptest! {
    #[test]
    fn quantizer_matches_box_search((lat, y) in with_point(6.0)) {
        prop_assert_eq!(lat.nearest_integer(&y).unwrap(), box_search(&lat, &y));
    }

    #[test]
    fn quantizer_is_idempotent((lat, y) in with_point(50.0)) {
        let q = lat.nearest_point(&y).unwrap();
        prop_assert_eq!(lat.nearest_point(&q).unwrap(), q.clone());
        prop_assert!(lat.is_lattice_point(&q, 1e-9).unwrap());
    }

    #[test]
    fn lattice_points_are_fixed((lat, a, _) in with_integer(30)) {
        let v = snap(&lat, &a);
        let pt = lat.point(&v);
        prop_assert_eq!(lat.nearest_point(&pt).unwrap(), pt);
    }

    #[test]
    fn closed_under_sum_and_negation((lat, a, b) in with_integer(30)) {
        let (x, y) = (snap(&lat, &a), snap(&lat, &b));
        let sum: Vec<f64> = lat.point(&x).iter().zip(lat.point(&y)).map(|(s, t)| s + t).collect();
        let neg: Vec<f64> = lat.point(&x).iter().map(|s| -s).collect();
        prop_assert!(lat.is_lattice_point(&sum, 1e-9).unwrap());
        prop_assert!(lat.is_lattice_point(&neg, 1e-9).unwrap());
        let p = lat.code().p() as i64;
        let coarse: Vec<i64> = a.iter().map(|c| c * p).collect();
        prop_assert!(lat.contains_integer(&coarse));
    }

    #[test]
    fn scaling_composes((lat, y) in with_point(20.0), a in 0.1f64..4.0, b in -4.0f64..-0.1) {
        let twice = lat.scale(a).unwrap().scale(b).unwrap();
        let once = lat.scale(a * b).unwrap();
        prop_assert!((twice.gamma() - once.gamma()).abs() <= 1e-12 * once.gamma());
        let probe = once.nearest_point(&y).unwrap();
        prop_assert!(twice.is_lattice_point(&probe, 1e-9).unwrap());
        prop_assert_eq!(
            twice.is_lattice_point(&y, 1e-9).unwrap(),
            once.is_lattice_point(&y, 1e-9).unwrap()
        );
    }

    #[test]
    fn quantizer_beats_every_other_point((lat, y, other) in with_point(10.0).prop_flat_map(|(l, y)| {
        let n = l.dim();
        (Just(l), Just(y), prop::collection::vec(-15i64..15, n))
    })) {
        let q = lat.nearest_point(&y).unwrap();
        let cand = lat.point(&snap(&lat, &other));
        prop_assert!(dist2(&y, &q) <= dist2(&y, &cand) + 1e-12);
    }
}

/// Points per unit volume in boxes at random offsets, sides a multiple of
/// `p` and growing.
#[test]
fn volume_density_within_five_percent() {
    use rand::Rng;
    let mut rng = latic::rng::stream(&[77]);
    let mut checked = 0;
    for (i, p) in [3u64, 5, 7].iter().cycle().take(10).enumerate() {
        let n = 1 + i % 3;
        let k = (i / 3) % (n + 1);
        let lat = lattice(n, k, *p, 100 + i as u64, 1.0);
        for target in [40i64, 80, 160] {
            let side = *p as i64 * ((target + *p as i64 - 1) / *p as i64);
            let start: Vec<i64> = (0..n).map(|_| rng.random_range(-1000..1000)).collect();
            let mut count = 0u64;
            for idx in 0..side.pow(n as u32) {
                let mut rest = idx;
                let v: Vec<i64> = (0..n)
                    .map(|d| {
                        let c = start[d] + rest % side;
                        rest /= side;
                        c
                    })
                    .collect();
                count += u64::from(lat.contains_integer(&v));
            }
            let density = count as f64 * lat.fundamental_volume() / (side as f64).powi(n as i32);
            assert!((density - 1.0).abs() < 0.05, "n={n} k={k} p={p} side={side}: {density}");
        }
        checked += 1;
    }
    assert_eq!(checked, 10);
}

#[test]
fn spec_examples() {
    let gen12 = construction_a(LinearCode::new(2, 5, vec![vec![1, 2]]).unwrap(), 1.0).unwrap();
    assert!(gen12.contains_integer(&[6, 12]));
    assert!(gen12.is_lattice_point(&[6.0, 12.0], 1e-9).unwrap());
    assert_eq!(gen12.nearest_point(&[1.1, 2.2]).unwrap(), vec![1.0, 2.0]);

    let five = construction_a(LinearCode::new(2, 5, vec![]).unwrap(), 1.0).unwrap();
    assert_eq!(five.nearest_point(&[2.5, 0.0]).unwrap(), vec![0.0, 0.0]);
    assert!(five.is_lattice_point(&[5.0, 0.0], 1e-9).unwrap());
    assert!(!five.is_lattice_point(&[1.0, 0.0], 1e-9).unwrap());
    assert_eq!(five.fundamental_volume(), 25.0);

    let z2 = make_linear_code(2, 2, 5, 1).unwrap();
    assert_eq!(z2.size(), 25);
    let z2 = construction_a(z2, 1.0).unwrap();
    assert_eq!(z2.fundamental_volume(), 1.0);
    assert_eq!(z2.nearest_point(&[0.4, -0.7]).unwrap(), vec![0.0, -1.0]);

    let half = construction_a(make_linear_code(2, 1, 5, 3).unwrap(), 0.5).unwrap();
    assert!((half.fundamental_volume() - 1.25).abs() < 1e-15);

    let code = make_linear_code(4, 2, 7, 11).unwrap();
    let mut words = code.codewords();
    words.sort();
    words.dedup();
    assert_eq!(words.len(), 49);
}

#[test]
fn negative_scale_keeps_membership() {
    let lat = lattice(3, 1, 5, 8, 0.7);
    let neg = lat.scale(-3.0).unwrap();
    let mut rng = latic::rng::stream(&[4]);
    use rand::Rng;
    for _ in 0..50 {
        let v: Vec<i64> = (0..3).map(|_| rng.random_range(-20..20)).collect();
        let pt = lat.point(&snap(&lat, &v));
        let image: Vec<f64> = pt.iter().map(|x| -3.0 * x).collect();
        assert!(neg.is_lattice_point(&image, 1e-9).unwrap());
    }
}

#[test]
fn codebook_respects_power_and_counts() {
    let z1 = construction_a(LinearCode::new(1, 3, vec![vec![1]]).unwrap(), 1.0).unwrap();
    let cb = latic::Codebook::with_shift(&z1, 4.0, vec![0.0]).unwrap();
    let mut w: Vec<f64> = cb.words().iter().map(|w| w[0]).collect();
    w.sort_by(f64::total_cmp);
    assert_eq!(w, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);

    let five = construction_a(LinearCode::new(2, 5, vec![]).unwrap(), 1.0).unwrap();
    assert!(build_codebook(&five, 10.0, 1.0, 4, 1).is_err());

    let lat = lattice(2, 1, 5, 3, 0.5);
    let cb = build_codebook(&lat, 8.0, 2.0, 16, 7).unwrap();
    assert!(cb.len() >= 16);
    assert!(cb.words().iter().all(|w| mean_power(w) <= 8.0));
    let expected = std::f64::consts::PI * 16.0 / 1.25;
    assert!((cb.len() as f64 - expected).abs() < 0.25 * expected, "{}", cb.len());
}
