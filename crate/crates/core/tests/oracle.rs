use std::time::Instant;

use dbpareto_core::oracle::{
    engine_agrees, naive_nondominated, random_subset, simulate_hk_distance,
    simulate_hk_distance_equal_registers, simulate_hk_mafia, simulate_random_answer, OracleError,
    DEFAULT_NAIVE_CAP,
};
use dbpareto_core::{generate_all, nondominated, Catalog, Tolerances};

#[test]
fn naive_matches_engine_on_random_subsets() {
    let all = generate_all(&Catalog::builtin()).unwrap();
    let tol = Tolerances::default();
    for seed in 0..20u64 {
        let subset = random_subset(&all, 500, seed);
        assert_eq!(subset.len(), 500);
        assert!(engine_agrees(&subset, &tol).unwrap(), "seed {seed}");
    }
}

#[test]
fn naive_matches_engine_on_filtered_blocks() {
    let all = generate_all(&Catalog::builtin()).unwrap();
    let tol = Tolerances::default();
    // large-bound blocks are small enough for the quadratic oracle
    for k in [128, 96] {
        let bound = dbpareto_core::MafiaBound::pow2(-k).unwrap();
        let filtered = dbpareto_core::filter_mafia_bound(&all, &bound);
        let naive = naive_nondominated(&filtered, &tol, 30_000).unwrap();
        assert_eq!(naive.ids(), nondominated(&filtered, &tol).ids(), "2^-{k}");
    }
}

#[test]
fn naive_cap_and_trivia() {
    let all = generate_all(&Catalog::builtin()).unwrap();
    let tol = Tolerances::default();
    let err = naive_nondominated(&all, &tol, DEFAULT_NAIVE_CAP).unwrap_err();
    assert_eq!(
        err,
        OracleError::CapExceeded {
            size: 29184,
            cap: 5000
        }
    );
    assert!(err.to_string().contains("sample a subset"));
    let one = &all[..1];
    assert_eq!(
        naive_nondominated(one, &tol, 10).unwrap().ids(),
        vec![all[0].id.as_str()]
    );
    let pair: Vec<_> = all
        .iter()
        .filter(|i| i.id == "BC-{16}" || i.id == "MAD-{16}")
        .cloned()
        .collect();
    assert_eq!(
        naive_nondominated(&pair, &tol, 10).unwrap().ids(),
        vec!["BC-{16}"]
    );
}

#[test]
fn monte_carlo_matches_closed_forms() {
    const TRIALS: u64 = 1_000_000;
    let start = Instant::now();
    for n in 1..=8u32 {
        let hk = 0.75f64.powi(n as i32);
        let half = 0.5f64.powi(n as i32);
        let m = simulate_hk_mafia(n, TRIALS, 1000 + n as u64).unwrap();
        let d = simulate_hk_distance(n, TRIALS, 2000 + n as u64).unwrap();
        let r = simulate_random_answer(n, TRIALS, 3000 + n as u64).unwrap();
        assert!(m.within(hk, 3.0), "hk mafia n={n}: {m:?} vs {hk}");
        assert!(d.within(hk, 3.0), "hk distance n={n}: {d:?} vs {hk}");
        assert!(r.within(half, 3.0), "random n={n}: {r:?} vs {half}");
        assert_eq!(m.trials, TRIALS);
        assert!((m.stderr - (m.mean * (1.0 - m.mean) / TRIALS as f64).sqrt()).abs() < 1e-15);
    }
    assert!(
        start.elapsed().as_secs_f64() < 30.0,
        "took {:?}",
        start.elapsed()
    );
}

#[test]
fn degenerate_inputs() {
    assert_eq!(simulate_random_answer(0, 10, 1).unwrap().mean, 1.0);
    assert_eq!(
        simulate_hk_distance_equal_registers(20, 10_000, 5)
            .unwrap()
            .mean,
        1.0
    );
    assert!(simulate_random_answer(21, 10, 1).is_err());
}
