use amgan_core::lab::{
    intra_mode_dispersion, mode_coverage, oracle_posterior, sample_mixture, MixtureSpec, Mlp,
};
use amgan_core::rng::{stream, Purpose};
use ndarray::Array2;
use rand::Rng;

#[test]
fn mixture_class_counts_stay_within_four_standard_deviations() {
    let spec = MixtureSpec::default();
    let n = 40_000;
    let batch = sample_mixture(&spec, n, 11).unwrap();
    let mut counts = vec![0usize; spec.classes()];
    batch.labels.iter().for_each(|&y| counts[y] += 1);
    for (c, w) in counts.iter().zip(spec.weights()) {
        let mean = n as f64 * w;
        let sd = (n as f64 * w * (1.0 - w)).sqrt();
        assert!((*c as f64 - mean).abs() < 4.0 * sd, "count {c} vs {mean}");
    }
}

#[test]
fn mixture_points_sit_near_their_own_center() {
    let spec = MixtureSpec::default();
    let batch = sample_mixture(&spec, 5_000, 3).unwrap();
    let sigma = spec.sigma();
    let mut sq = 0.0;
    for (p, &y) in batch.points.iter().zip(&batch.labels) {
        let c = spec.centers()[y];
        sq += (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
    }
    // E‖x - c‖² = 2σ² for an isotropic 2D Gaussian.
    let ratio = sq / batch.len() as f64 / (2.0 * sigma * sigma);
    assert!((ratio - 1.0).abs() < 0.06, "ratio {ratio}");
}

#[test]
fn true_samples_cover_every_mode_with_healthy_spread() {
    let spec = MixtureSpec::default();
    let batch = sample_mixture(&spec, 10_000, 5).unwrap();
    assert_eq!(
        mode_coverage(&batch.points, &spec).unwrap().covered,
        spec.classes()
    );
    let d = intra_mode_dispersion(&batch.points, &spec).unwrap();
    assert!((0.85..=1.1).contains(&d), "dispersion {d}");
}

#[test]
fn posterior_is_confident_at_centers_and_finite_far_away() {
    let spec = MixtureSpec::default();
    for (k, c) in spec.centers().iter().enumerate() {
        let p = oracle_posterior(&spec, c);
        assert!(p.as_slice()[k] > 0.999);
    }
    let far = [1e6 * spec.sigma(), -3e5 * spec.sigma()];
    let p = oracle_posterior(&spec, &far);
    assert!(p.as_slice().iter().all(|x| x.is_finite()));
    assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn posterior_matches_direct_bayes_rule_near_the_ring() {
    let spec = MixtureSpec::ring(4, 1.0, 0.2).unwrap();
    let x = [0.4, 0.3];
    let s2 = spec.sigma() * spec.sigma();
    let lik: Vec<f64> = spec
        .centers()
        .iter()
        .zip(spec.weights())
        .map(|(c, w)| w * (-((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)) / (2.0 * s2)).exp())
        .collect();
    let z: f64 = lik.iter().sum();
    let p = oracle_posterior(&spec, &x);
    for (a, b) in p.as_slice().iter().zip(&lik) {
        assert!((a - b / z).abs() < 1e-12);
    }
}

fn objective(net: &Mlp, x: &Array2<f64>, r: &Array2<f64>) -> f64 {
    (net.predict(x).unwrap() * r).sum()
}

fn central(f: impl Fn(f64) -> f64, x0: f64, h: f64) -> f64 {
    (f(x0 + h) - f(x0 - h)) / (2.0 * h)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

#[test]
fn three_layer_backprop_matches_finite_differences() {
    let mut rng = stream(21, Purpose::Verify, 0);
    let net = Mlp::new(&[3, 7, 5, 2], &mut rng).unwrap();
    let x = Array2::from_shape_simple_fn((6, 3), || rng.random_range(-1.0..1.0));
    let r = Array2::from_shape_simple_fn((6, 2), || rng.random_range(-1.0..1.0));
    let (_, cache) = net.forward(&x).unwrap();
    let (grads, input_grad) = net.backward(&cache, &r).unwrap();

    let mut checked = 0;
    for _ in 0..50 {
        let i = rng.random_range(0..net.param_count());
        let at = |v: f64| {
            let mut n = net.clone();
            *n.param_mut(i).unwrap() = v;
            objective(&n, &x, &r)
        };
        let p0 = *net.clone().param_mut(i).unwrap();
        let coarse = central(at, p0, 1e-5);
        let fine = central(at, p0, 5e-6);
        if rel(coarse, fine) > 1e-6 {
            continue; // straddles a rectifier kink
        }
        checked += 1;
        let g = grads.get(i).unwrap();
        assert!(rel(g, fine) < 1e-6, "param {i}: {g} vs {fine}");
    }
    assert!(checked >= 40, "only {checked} smooth probes");

    for (row, col) in [(0, 0), (2, 1), (5, 2)] {
        let at = |v: f64| {
            let mut xp = x.clone();
            xp[[row, col]] = v;
            objective(&net, &xp, &r)
        };
        let fd = central(at, x[[row, col]], 1e-5);
        assert!(rel(input_grad[[row, col]], fd) < 1e-6);
    }
}

#[test]
fn same_seed_same_initial_weights() {
    let a = Mlp::new(&[4, 8, 3], &mut stream(1, Purpose::Init, 0)).unwrap();
    let b = Mlp::new(&[4, 8, 3], &mut stream(1, Purpose::Init, 0)).unwrap();
    let c = Mlp::new(&[4, 8, 3], &mut stream(1, Purpose::Init, 1)).unwrap();
    let x = Array2::from_elem((1, 4), 0.5);
    assert_eq!(a.predict(&x).unwrap(), b.predict(&x).unwrap());
    assert_ne!(a.predict(&x).unwrap(), c.predict(&x).unwrap());
}
