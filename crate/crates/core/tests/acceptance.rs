//! End-to-end acceptance suite: each criterion is one test that prints a
//! single PASS line on success (failures panic with context).

use nswlb::bounds::{f_greedy, f_weighted, sup_nonatomic, sup_unweighted};
use nswlb::equilibria::{empirical_npoa, enumerate_pne, is_pne};
use nswlb::generators::{
    identical_resources_lb, linear_cg, non_atomic, online_greedy_lb, online_universal,
    unweighted_lb, weighted_lb, Designated, GeneratedGame, WeightedVariant,
};
use nswlb::model::log_nsw;
use nswlb::nonatomic::{nonatomic_ratio, potential_minimize, wardrop_gap};
use nswlb::num::xlny;
use nswlb::online::{competitive_ratio, greedy_step_cost, ratio_vs};
use nswlb::optima::{brute_force_opt, unweighted_opt_matching, OptMethod};
use nswlb::sampling::{
    game_max_degree, random_online_instance, random_unweighted_game, random_weighted_game,
};
use nswlb::{AtomicGame, LatencyFunction, Profile};

fn x_pow(p: u32) -> LatencyFunction {
    LatencyFunction::monomial(p)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn designated_profile(d: &Designated) -> &Profile {
    match d {
        Designated::Atomic(p) => p,
        Designated::Flow(_) => panic!("atomic profile expected"),
    }
}

#[test]
fn criterion_01_weighted_npoa_trajectory() {
    for p in [1u32, 2] {
        for m in [3usize, 5, 10, 20] {
            let inst = weighted_lb(
                m,
                1,
                1.0,
                0.0,
                &x_pow(p),
                &x_pow(p),
                WeightedVariant::RestrictedStrategies,
            )
            .unwrap();
            let expected =
                2f64.powf(p as f64 * (m as f64 - 2.0) / (m as f64 - 1.0));
            let measured = inst.measured_ratio().unwrap();
            assert!(
                rel_err(measured, expected) < 1e-9,
                "m={m} p={p}: measured {measured} expected {expected}"
            );
            let game = inst.atomic_game().unwrap();
            let sigma = designated_profile(&inst.equilibrium);
            assert!(is_pne(game, sigma, 1e-9).unwrap(), "m={m} p={p}: sigma not a PNE");
            if m == 20 && p == 1 {
                assert!(measured >= 1.92, "m=20 p=1 ratio {measured} < 1.92");
            }
        }
    }
    println!("criterion 01 (weighted NPoA tightness trajectory): PASS");
}

#[test]
fn criterion_02_identical_resources() {
    for m in [3usize, 8] {
        let inst = identical_resources_lb(m, 1).unwrap();
        let expected = 2f64.powf((m as f64 - 2.0) / (m as f64 - 1.0));
        let measured = inst.measured_ratio().unwrap();
        assert!(
            rel_err(measured, expected) < 1e-9,
            "m={m}: measured {measured} expected {expected}"
        );
        if m == 8 {
            assert!(measured >= 1.8, "m=8 ratio {measured} < 1.8");
        }
    }
    println!("criterion 02 (identical-resources family): PASS");
}

#[test]
fn criterion_03_unweighted_tightness() {
    for p in [1u32, 2] {
        let inst = unweighted_lb(40, 1, 1, &x_pow(p)).unwrap();
        let expected = 2f64.powf(p as f64 * 39.0 / 40.0);
        let measured = inst.measured_ratio().unwrap();
        assert!(
            rel_err(measured, expected) < 1e-9,
            "p={p}: measured {measured} expected {expected}"
        );
        let game = inst.atomic_game().unwrap();
        assert!(is_pne(game, designated_profile(&inst.equilibrium), 1e-9).unwrap());
    }

    // At m = 2 the worst equilibrium found by full enumeration matches sigma.
    let inst = unweighted_lb(2, 1, 1, &x_pow(1)).unwrap();
    let game = inst.atomic_game().unwrap();
    let sigma = designated_profile(&inst.equilibrium);
    let all = enumerate_pne(game, 2_000_000).unwrap();
    assert!(!all.is_empty());
    let worst = all
        .iter()
        .max_by(|a, b| {
            log_nsw(game, a)
                .unwrap()
                .value
                .partial_cmp(&log_nsw(game, b).unwrap().value)
                .unwrap()
        })
        .unwrap();
    assert!(
        rel_err(
            log_nsw(game, worst).unwrap().value,
            log_nsw(game, sigma).unwrap().value,
        ) < 1e-12,
        "worst enumerated PNE differs from sigma"
    );
    println!("criterion 03 (unweighted tightness): PASS");
}

#[test]
fn criterion_04_npoa_ceilings() {
    for seed in 0..500u64 {
        for game in [random_unweighted_game(seed), random_weighted_game(seed)] {
            let p = game_max_degree(&game);
            let bound = 2f64.powi(p as i32);
            let npoa = empirical_npoa(&game).unwrap();
            assert!(
                npoa <= bound + 1e-9,
                "seed {seed}: empirical NPoA {npoa} exceeds 2^{p}"
            );
        }
    }
    println!("criterion 04 (weighted/unweighted NPoA ceilings, 500+500 games): PASS");
}

#[test]
fn criterion_05_greedy_competitive_ratio() {
    // (a) the adversarial online family matches its closed form.
    for m in 3usize..=10 {
        let inst = online_greedy_lb(m, 1.0, 0.0, &x_pow(1), &x_pow(1)).unwrap();
        let oi = match &inst.game {
            GeneratedGame::Online(oi) => oi,
            _ => panic!("online expected"),
        };
        let measured = ratio_vs(oi, designated_profile(&inst.opt_candidate)).unwrap();
        assert!(
            rel_err(measured, inst.predicted_ratio) < 1e-9,
            "m={m}: measured {measured} predicted {}",
            inst.predicted_ratio
        );
        if m == 10 {
            assert!(measured >= 3.2, "m=10 ratio {measured} < 3.2");
        }
    }

    // (b) the universal construction vs the true optimum.
    let inst = online_universal(2, 1).unwrap();
    let oi = match &inst.game {
        GeneratedGame::Online(oi) => oi,
        _ => panic!("online expected"),
    };
    let measured = competitive_ratio(oi).unwrap();
    let expected = 3f64.powf(0.6) / 2f64.powf(0.4);
    assert!(
        rel_err(measured, expected) < 1e-9,
        "universal m=2: measured {measured} expected {expected}"
    );

    // (c) 500 seeded instances stay under 4^p.
    for seed in 0..500u64 {
        let oi = random_online_instance(seed);
        let p = game_max_degree(oi.game());
        let bound = 4f64.powi(p as i32);
        let ratio = competitive_ratio(&oi).unwrap();
        assert!(
            ratio <= bound + 1e-9,
            "seed {seed}: greedy ratio {ratio} exceeds 4^{p}"
        );
    }
    println!("criterion 05 (greedy competitive ratio): PASS");
}

#[test]
fn criterion_06_nonatomic_tightness() {
    let e = std::f64::consts::E;
    for p in [1u32, 2] {
        let inst = non_atomic(e, 1.0, &x_pow(p)).unwrap();
        let game = match &inst.game {
            GeneratedGame::NonAtomic(g) => g,
            _ => panic!("non-atomic expected"),
        };
        let eq = potential_minimize(game, 100_000, 1e-6).unwrap();
        assert!(wardrop_gap(game, &eq, 1e-6).unwrap() <= 1e-6);
        // The equilibrium routes everything onto resource 1.
        assert!((eq.0[0][0] - e).abs() < 1e-6, "p={p}: flow {:?}", eq.0);
        let opt = match &inst.opt_candidate {
            Designated::Flow(f) => f,
            _ => panic!("flow expected"),
        };
        let ratio = nonatomic_ratio(game, &eq, opt).unwrap();
        let expected = (p as f64 / e).exp();
        assert!(
            (ratio - expected).abs() < 1e-6,
            "p={p}: ratio {ratio} expected {expected}"
        );
    }
    println!("criterion 06 (non-atomic tightness): PASS");
}

#[test]
fn criterion_07_opt_solver_equivalence() {
    for seed in 0..300u64 {
        let game = random_unweighted_game(seed);
        let fast = unweighted_opt_matching(&game).unwrap();
        assert!(
            matches!(fast.method, OptMethod::Matching),
            "seed {seed}: matching solver refused a polynomial instance"
        );
        let (_, brute) = brute_force_opt(&game).unwrap();
        assert!(
            rel_err(fast.log_nsw.value, brute.value) < 1e-9,
            "seed {seed}: matching {} vs brute force {}",
            fast.log_nsw.value,
            brute.value
        );
    }
    println!("criterion 07 (optimal-solver oracle equivalence, 300 games): PASS");
}

/// Argmin set of a slice under relative tolerance 1e-9.
fn argmin_set(values: &[f64]) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v - best).abs() <= 1e-9 * v.abs().max(best.abs()).max(1.0))
        .map(|(s, _)| s)
        .collect()
}

fn revealed_objective(game: &AtomicGame, loads: &[f64]) -> f64 {
    loads
        .iter()
        .zip(game.resources())
        .map(|(&k, r)| xlny(k, r.latency.eval(k)))
        .sum()
}

#[test]
fn criterion_08_greedy_step_rule_equivalence() {
    for seed in 0..500u64 {
        let oi = random_online_instance(seed);
        let game = oi.game();
        let mut loads = vec![0.0; game.resources().len()];
        for &i in oi.arrival_order() {
            let strategies = &game.players()[i].strategies;
            let mut by_increment = Vec::with_capacity(strategies.len());
            let mut by_total = Vec::with_capacity(strategies.len());
            for s in 0..strategies.len() {
                by_increment.push(greedy_step_cost(game, &loads, i, strategies[s][0]).unwrap());
                let mut next = loads.clone();
                for &j in &strategies[s] {
                    next[j] += game.players()[i].weight;
                }
                by_total.push(revealed_objective(game, &next));
            }
            assert_eq!(
                argmin_set(&by_increment),
                argmin_set(&by_total),
                "seed {seed}, player {i}: step-rule argmin sets differ"
            );
            let pick = argmin_set(&by_increment)[0];
            for &j in &strategies[pick] {
                loads[j] += game.players()[i].weight;
            }
        }
    }
    println!("criterion 08 (greedy step-rule equivalence, 500 instances): PASS");
}

#[test]
fn criterion_09_bound_evaluators() {
    // 100 x 100 grid over k in [1, 1e3] (log-spaced) and h in [0, 1).
    let ks: Vec<f64> = (0..100)
        .map(|i| (1e3f64.ln() * i as f64 / 99.0).exp())
        .collect();
    let hs: Vec<f64> = (0..100).map(|j| j as f64 / 100.0).collect();
    let (mut max_w, mut arg_w) = (f64::NEG_INFINITY, (0.0, 0.0));
    let (mut max_g, mut arg_g) = (f64::NEG_INFINITY, (0.0, 0.0));
    for &k in &ks {
        for &h in &hs {
            let w = f_weighted(k, h);
            let g = f_greedy(k, h);
            assert!(w <= 2.0 + 1e-12, "fWeighted({k},{h}) = {w} exceeds 2");
            assert!(g <= 4.0 + 1e-12, "fGreedy({k},{h}) = {g} exceeds 4");
            if w > max_w {
                (max_w, arg_w) = (w, (k, h));
            }
            if g > max_g {
                (max_g, arg_g) = (g, (k, h));
            }
        }
    }
    assert!((max_w - 2.0).abs() < 1e-9 && arg_w == (1.0, 0.0), "fWeighted max {max_w} at {arg_w:?}");
    assert!((max_g - 4.0).abs() < 1e-9 && arg_g == (1.0, 0.0), "fGreedy max {max_g} at {arg_g:?}");

    for p in [1u32, 2, 3] {
        let fam = [x_pow(p)];
        let na = sup_nonatomic(&fam);
        let expected = (p as f64 / std::f64::consts::E).exp();
        assert!((na.value - expected).abs() < 1e-6, "p={p}: supNonatomic {}", na.value);

        let uw = sup_unweighted(&fam, 50);
        assert_eq!(uw.value, 2f64.powi(p as i32), "p={p}");
        assert_eq!(uw.arg, (1.0, 1.0), "p={p}");
    }
    println!("criterion 09 (bound evaluators): PASS");
}

#[test]
fn criterion_10_congestion_game_growth() {
    for (n, eps) in [(4usize, 0.4f64), (10, 0.3), (100, 0.2)] {
        let inst = linear_cg(n, eps).unwrap();
        let game = inst.atomic_game().unwrap();
        let sigma = designated_profile(&inst.equilibrium);
        assert!(is_pne(game, sigma, 1e-9).unwrap(), "n={n} eps={eps}: sigma not a PNE");
        let m = (n as f64 * eps).ceil();
        let expected = (m + 1.0).powf((n as f64 - m) / n as f64);
        let measured = inst.measured_ratio().unwrap();
        assert!(
            rel_err(measured, expected) < 1e-9,
            "n={n} eps={eps}: measured {measured} expected {expected}"
        );
    }
    println!("criterion 10 (congestion-game growth): PASS");
}
