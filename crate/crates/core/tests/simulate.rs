use pickmoments::simulate::{
    paired_midpoint_largest_gap, replication_rng, route_time, run_replications_all, sample_order,
    sample_pick_times,
};
use pickmoments::{run_replications, AisleModel, Heuristic, OrderSizeDistribution, PickTimeModel, WarehouseConfig};

#[test]
fn largest_gap_never_exceeds_midpoint() {
    let cfg = WarehouseConfig::new(5, 20.0, 2.5, 5.0 / 6.0).unwrap();
    let dist = OrderSizeDistribution::geometric_with_mean(16.0).unwrap();
    let pick = PickTimeModel::from_scv(5.0, 0.5).unwrap();
    let pairs = paired_midpoint_largest_gap(&cfg, &dist, &pick, 100_000, 7).unwrap();
    assert_eq!(pairs.len(), 100_000);
    assert!(pairs.iter().all(|&(mid, lg)| lg <= mid));
    assert!(pairs.iter().any(|&(mid, lg)| lg < mid));
}

#[test]
fn identical_across_thread_counts() {
    let cfg = WarehouseConfig::new(4, 10.0, 2.5, 1.0).unwrap();
    let dist: OrderSizeDistribution = "spois:6".parse().unwrap();
    let pick = PickTimeModel::from_scv(3.0, 1.0).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_replications_all(&cfg, &dist, &pick, 50_000, 123).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    let other_seed = run_replications_all(&cfg, &dist, &pick, 50_000, 124).unwrap();
    assert_ne!(one, other_seed);
    let single = run_replications(&cfg, &dist, &pick, Heuristic::SShaped, 50_000, 123).unwrap();
    assert_eq!(single, one[3]);
}

#[test]
fn estimates_are_coherent() {
    let cfg = WarehouseConfig::new(3, 10.0, 2.5, 1.0).unwrap();
    let dist: OrderSizeDistribution = "geom:8".parse().unwrap();
    let pick = PickTimeModel::from_scv(3.0, 0.5).unwrap();
    for est in run_replications_all(&cfg, &dist, &pick, 20_000, 1).unwrap() {
        assert_eq!(est.n, 20_000);
        let se = (est.se_t2.powi(2) + (2.0 * est.mean_t * est.se_mean).powi(2)).sqrt();
        assert!(est.mean_t2 >= est.mean_t.powi(2) - 4.0 * se);
        assert!(est.se_mean > 0.0 && est.se_t2 > 0.0);
    }
}

#[test]
fn route_equations_on_sampled_orders() {
    let cfg = WarehouseConfig::new(6, 12.0, 2.0, 1.5).unwrap();
    let dist: OrderSizeDistribution = "geom:6".parse().unwrap();
    let model = AisleModel::new(6, dist).unwrap();
    let pick = PickTimeModel::from_scv(2.0, 0.0).unwrap();
    for rep in 0..2000 {
        let mut rng = replication_rng(99, rep);
        let order = sample_order(&model, &mut rng);
        assert_eq!(order.items.len(), order.m as usize);
        let picks = sample_pick_times(&pick, order.m, &mut rng);
        assert!(picks.iter().all(|&p| p == 2.0));
        let zero = vec![0.0; picks.len()];
        let t = |h| route_time(&cfg, h, &order, &zero).unwrap();
        let kplus = order.items.iter().map(|&(a, _)| a).max().unwrap();
        let cross = 2.0 * cfg.w_a * (kplus - 1) as f64 / cfg.v;

        // Return: twice the furthest item of every aisle.
        let mut far = [0.0f64; 6];
        for &(a, x) in &order.items {
            far[a as usize - 1] = far[a as usize - 1].max(x);
        }
        let ret: f64 = far.iter().map(|a| 2.0 * cfg.l * a).sum::<f64>() / cfg.v + cross;
        assert!((t(Heuristic::Return) - ret).abs() < 1e-9);
        for a in far {
            assert!(t(Heuristic::Return) - cross >= 2.0 * cfg.l * a / cfg.v - 1e-9);
        }
        // Every route pays the same cross-aisle walk, and the two full end
        // aisles bound midpoint and largest gap from below.
        assert!(t(Heuristic::Midpoint) - cross >= 2.0 * cfg.l / cfg.v - 1e-9);
        assert!(t(Heuristic::LargestGap) <= t(Heuristic::Midpoint));
        let with_picks = route_time(&cfg, Heuristic::SShaped, &order, &picks).unwrap();
        assert!((with_picks - t(Heuristic::SShaped) - 2.0 * order.m as f64).abs() < 1e-9);
    }
}

#[test]
fn gamma_pick_times_have_the_model_moments() {
    let pick = PickTimeModel::from_scv(4.0, 0.6).unwrap();
    let mut rng = replication_rng(8, 0);
    let xs = sample_pick_times(&pick, 400_000, &mut rng);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((mean - 4.0).abs() < 4.0 * (pick.variance() / n).sqrt());
    assert!((var / pick.variance() - 1.0).abs() < 0.02);
}
