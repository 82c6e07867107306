use pickmoments::{erlang_c_wait_prob, lead_time_estimate, MomentReport, QueueScenario};
use proptest::prelude::*;

fn report(e_t: f64, scv: f64) -> MomentReport {
    let var_t = scv * e_t * e_t;
    MomentReport { e_t, e_t2: var_t + e_t * e_t, var_t, sd_t: var_t.sqrt(), e_tw: 0.0, e_ttr: 0.0 }
}

/// Exact mean sojourn time of an M/G/1 queue.
fn pollaczek_khinchine(lambda: f64, e_t: f64, e_t2: f64) -> f64 {
    let rho = lambda * e_t;
    lambda * e_t2 / (2.0 * (1.0 - rho)) + e_t
}

#[test]
fn single_picker_is_exact() {
    let mut rng = 0x2545_f491_4f6c_dd1du64;
    let mut uniform = || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..20 {
        let rho = 0.01 + 0.98 * uniform();
        let scv = 3.0 * uniform();
        let e_t = 50.0 + 300.0 * uniform();
        let r = report(e_t, scv);
        let s = QueueScenario::new(1, rho / e_t).unwrap();
        let got = lead_time_estimate(&r, &s).unwrap().e_r.unwrap();
        let want = pollaczek_khinchine(s.lambda, e_t, r.e_t2);
        assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
    }
}

#[test]
fn erlang_c_examples() {
    assert!((erlang_c_wait_prob(2, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!((erlang_c_wait_prob(1, 0.3).unwrap() - 0.3).abs() < 1e-12);
    assert!(erlang_c_wait_prob(2, 1e-9).unwrap() < 1e-8);
    assert!(erlang_c_wait_prob(4, 1.0).is_err());
}

#[test]
fn overloaded_queue_is_na() {
    let s = QueueScenario::new(10, 1.02 * 10.0 / 250.0).unwrap();
    let lt = lead_time_estimate(&report(250.0, 0.3), &s).unwrap();
    assert!(lt.e_r.is_none() && lt.q_wait.is_none());
    assert!(lt.rho >= 1.0);
}

proptest! {
    #[test]
    fn wait_probability_monotone(c in 1u32..60, rho in 0.01f64..0.97, step in 0.001f64..0.02) {
        let a = erlang_c_wait_prob(c, rho).unwrap();
        let b = erlang_c_wait_prob(c, (rho + step).min(0.999)).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a);
        // Same offered load a = c rho spread over one more server.
        let load = c as f64 * rho;
        let more = erlang_c_wait_prob(c + 1, load / (c + 1) as f64).unwrap();
        prop_assert!(more <= a + 1e-15);
    }

    #[test]
    fn lead_time_monotone(c in 1u32..20, e_t in 10.0f64..400.0, scv in 0.0f64..2.0, u in 0.01f64..0.95) {
        let r = report(e_t, scv);
        let lam = u * c as f64 / e_t;
        let at = |lam: f64, r: &MomentReport| {
            lead_time_estimate(r, &QueueScenario::new(c, lam).unwrap()).unwrap().e_r.unwrap()
        };
        let base = at(lam, &r);
        prop_assert!(base >= e_t);
        // At very light load the wait falls below one ulp of E[T].
        let visible = base - e_t > 1e-13 * e_t;
        let busier = at(lam * 1.02, &r);
        let noisier = at(lam, &report(e_t, scv + 0.1));
        prop_assert!(busier > base || (!visible && busier == base));
        prop_assert!(noisier > base || (!visible && noisier == base));
        let tiny = at(1e-12, &r);
        prop_assert!((tiny - e_t).abs() < 1e-6 * e_t);
    }
}
