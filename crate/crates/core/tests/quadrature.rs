use pickmoments::quadrature::{gap_kernel, integrate_1d, QuadratureSettings};

/// `Li2(x)` by its power series, accelerated with the reflection formula.
fn dilog(x: f64) -> f64 {
    if x > 0.5 {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        return pi2_6 - x.ln() * (1.0 - x).ln() - dilog(1.0 - x);
    }
    let mut term = x;
    let mut s = 0.0;
    for n in 1..200 {
        s += term / (n * n) as f64;
        term *= x;
    }
    s
}

fn kernel_closed_form(x: f64) -> f64 {
    let l = (1.0 - x).ln();
    (1.0 - x) * l * l / x - 2.0 * dilog(x) + std::f64::consts::PI.powi(2) / 3.0
}

#[test]
fn kernel_matches_closed_form() {
    let s = QuadratureSettings::default();
    for i in 1..100 {
        let x = i as f64 / 100.0;
        let g = gap_kernel(x, &s).unwrap();
        assert!((g - kernel_closed_form(x)).abs() < 1e-8, "x={x}");
    }
    for x in [1e-6, 1e-3, 0.999, 1.0] {
        let g = gap_kernel(x, &s).unwrap();
        // Li2(1) = pi^2/6, so g(1) = 0.
        let c = if x == 1.0 { 0.0 } else { kernel_closed_form(x) };
        assert!((g - c).abs() < 1e-8, "x={x}: {g} vs {c}");
    }
}

#[test]
fn kernel_is_decreasing_and_bounded() {
    let s = QuadratureSettings::default();
    let g: Vec<f64> = (1..=100).map(|i| gap_kernel(i as f64 / 100.0, &s).unwrap()).collect();
    assert!(g.windows(2).all(|w| w[1] <= w[0]));
    let lim = std::f64::consts::PI.powi(2) / 3.0;
    for x in [1e-4, 1e-6, 1e-10] {
        let v = gap_kernel(x, &s).unwrap();
        assert!(v <= lim + 1e-9 && v > 0.0);
        assert!((x * v).abs() <= lim * x + 1e-12);
    }
    assert!(gap_kernel(0.0, &s).is_err());
    assert!(gap_kernel(-0.5, &s).is_err());
    assert!(gap_kernel(1.5, &s).is_err());
}

#[test]
fn tighter_tolerance_moves_less_than_the_error_estimate() {
    let loose = QuadratureSettings::new(1e-6, 1e-6, 2000).unwrap();
    let tight = QuadratureSettings::new(5e-7, 5e-7, 2000).unwrap();
    let fs: [fn(f64) -> f64; 3] = [
        |x| (1.0 - x).ln().powi(2),
        |x| x.sqrt() * (-x).ln_1p(),
        |x| (10.0 * x).sin() / (1.0 + x * x),
    ];
    for f in fs {
        let (a, ea) = integrate_1d(f, 0.0, 1.0, &loose).unwrap();
        let (b, _) = integrate_1d(f, 0.0, 1.0, &tight).unwrap();
        assert!((a - b).abs() <= ea.max(1e-15));
    }
}
