//! Property tests: evaluator invariants, bound admissibility, solver oracle
//! equivalence and big-M soundness/completeness on random small instances.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use underlords::ilp::{greedy_assignment, hero_var, indicator_var, team_from_assignment, VariableAssignment};
use underlords::instance::Hero;
use underlords::random::random_instance;
use underlords::solver::DEFAULT_SUBSET_GUARD;
use underlords::*;

fn instance_from(seed: u64, n: usize, m: usize) -> Instance {
    random_instance(&mut StdRng::seed_from_u64(seed), n, m)
}

fn random_team(rng: &mut StdRng, n: usize, max: usize) -> Team {
    let size = rng.random_range(0..=max.min(n));
    rand::seq::index::sample(rng, n, size).into_iter().collect()
}

/// Alliance counts recomputed from the membership matrix, row by row.
fn naive_counts(inst: &Instance, team: &Team) -> Vec<usize> {
    (0..inst.alliance_count())
        .map(|j| team.iter().filter(|&i| inst.is_member(i, j)).count())
        .collect()
}

fn scaled(inst: &Instance, lambda: f64) -> Instance {
    let heroes: Vec<Hero> = inst
        .heroes()
        .iter()
        .map(|h| Hero { power: h.power * lambda, ..h.clone() })
        .collect();
    let bonuses: BTreeMap<BonusKey, f64> =
        inst.bonuses().iter().map(|(k, v)| (*k, v * lambda)).collect();
    Instance::new(heroes, inst.alliances().to_vec(), bonuses, inst.team_cap(), inst.max_alliance_size())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn additivity_and_activation_soundness(seed in any::<u64>(), n in 1usize..=9, m in 1usize..=5) {
        let inst = instance_from(seed, n, m);
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        let team = random_team(&mut rng, n, m);
        let eval = evaluate_team(&inst, &team).unwrap();
        let mut recomposed = 0.0;
        for i in team.iter() {
            recomposed += inst.heroes()[i].power;
        }
        prop_assert_eq!(recomposed, eval.base_power);
        let mut bonus = 0.0;
        for b in eval.per_hero.values().flatten() {
            bonus += b.value;
        }
        prop_assert_eq!(eval.total, eval.base_power + bonus);

        let counts = naive_counts(&inst, &team);
        prop_assert_eq!(&counts, &eval.active_counts);
        for (&i, list) in &eval.per_hero {
            prop_assert!(team.contains(i));
            for b in list {
                prop_assert!(counts[b.alliance] >= b.threshold);
                let key = BonusKey { hero: i, alliance: b.alliance, threshold: b.threshold };
                prop_assert_eq!(inst.bonuses().get(&key), Some(&b.value));
            }
        }
        // every admissible entry is listed
        let listed: usize = eval.per_hero.values().map(Vec::len).sum();
        let admissible = inst
            .entries()
            .filter(|e| team.contains(e.hero) && counts[e.alliance] >= e.threshold)
            .count();
        prop_assert_eq!(listed, admissible);
    }

    #[test]
    fn adding_a_hero_never_hurts(seed in any::<u64>(), n in 2usize..=9, m in 2usize..=5) {
        let inst = instance_from(seed, n, m);
        let mut rng = StdRng::seed_from_u64(seed ^ 0xadd);
        let team = random_team(&mut rng, n, m - 1);
        let before = evaluate_team(&inst, &team).unwrap().total;
        for h in (0..n).filter(|&h| !team.contains(h)) {
            let mut bigger = team.clone();
            bigger.insert(h);
            prop_assert!(evaluate_team(&inst, &bigger).unwrap().total >= before);
        }
    }

    #[test]
    fn scaling_powers_scales_totals(seed in any::<u64>(), n in 2usize..=8, m in 1usize..=4, lambda_tenths in 1u32..=40) {
        let lambda = lambda_tenths as f64 / 10.0;
        let inst = instance_from(seed, n, m);
        let big = scaled(&inst, lambda);
        let mut rng = StdRng::seed_from_u64(seed);
        let team = random_team(&mut rng, n, m);
        let a = evaluate_team(&inst, &team).unwrap().total;
        let b = evaluate_team(&big, &team).unwrap().total;
        prop_assert!((b - lambda * a).abs() < 1e-9 * (1.0 + b.abs()));
        let opt = brute_force(&inst, DEFAULT_SUBSET_GUARD).unwrap();
        let opt_big = brute_force(&big, DEFAULT_SUBSET_GUARD).unwrap();
        prop_assert!((opt_big.objective - lambda * opt.objective).abs() < 1e-9 * (1.0 + opt_big.objective));
    }

    #[test]
    fn compiled_rules_scale(seed in any::<u64>(), lambda_tenths in 1u32..=50) {
        let lambda = lambda_tenths as f64 / 10.0;
        let inst = instance_from(seed, 6, 3);
        let rules = vec![
            BonusRule { alliance: inst.alliances()[0].clone(), threshold: 1, member_percent: 0.2, global_percent: 0.1 },
        ];
        let heroes: Vec<Hero> = inst.heroes().to_vec();
        let up: Vec<Hero> = heroes.iter().map(|h| Hero { power: h.power * lambda, ..h.clone() }).collect();
        let a = compile_bonus_rules(&heroes, inst.alliances(), &rules).unwrap();
        let b = compile_bonus_rules(&up, inst.alliances(), &rules).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.key(), y.key());
            prop_assert!((y.value - lambda * x.value).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_is_admissible(seed in any::<u64>(), n in 2usize..=9, m in 1usize..=4) {
        let inst = instance_from(seed, n, m);
        let mut rng = StdRng::seed_from_u64(seed ^ 0xb0);
        let mut fixed_in = Team::new();
        let mut fixed_out = BTreeSet::new();
        for i in 0..n {
            match rng.random_range(0..4) {
                0 if fixed_in.len() < m => { fixed_in.insert(i); }
                1 => { fixed_out.insert(i); }
                _ => {}
            }
        }
        let bound = optimistic_bound(&inst, &fixed_in, &fixed_out).unwrap();
        // brute force over the restricted subproblem
        let free: Vec<usize> = (0..n).filter(|i| !fixed_in.contains(*i) && !fixed_out.contains(i)).collect();
        let slots = m - fixed_in.len();
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << free.len()) {
            if mask.count_ones() as usize > slots { continue; }
            let mut team = fixed_in.clone();
            for (b, &h) in free.iter().enumerate() {
                if mask & (1 << b) != 0 { team.insert(h); }
            }
            best = best.max(evaluate_team(&inst, &team).unwrap().total);
        }
        prop_assert!(bound >= best - 1e-12, "bound {} < optimum {}", bound, best);
    }

    #[test]
    fn branch_and_bound_matches_brute_force(seed in any::<u64>(), n in 1usize..=10, m in 0usize..=5) {
        let inst = instance_from(seed, n, m.max(1)).with_team_cap(m);
        let oracle = brute_force(&inst, DEFAULT_SUBSET_GUARD).unwrap();
        for workers in [1, 3] {
            let s = branch_and_bound(&inst, &SearchOptions { parallel_workers: workers, ..Default::default() });
            prop_assert!(s.proven_optimal);
            prop_assert_eq!(s.objective, oracle.objective);
            prop_assert_eq!(&s.team, &oracle.team);
            prop_assert!(s.team.len() <= m);
        }
    }

    #[test]
    fn big_m_sound_and_complete(seed in any::<u64>(), n in 2usize..=8, m in 1usize..=4) {
        let inst = instance_from(seed, n, m);
        let model = build_model(&inst).unwrap();
        let mut rng = StdRng::seed_from_u64(seed ^ 0xb16);
        for _ in 0..60 {
            let team = random_team(&mut rng, n, m + 1);
            let mut a = VariableAssignment::zeros(&model);
            for i in team.iter() { a.set(hero_var(i), true); }
            for key in inst.bonuses().keys() {
                if rng.random_bool(0.5) { a.set(indicator_var(key), true); }
            }
            let violated = check_feasible(&model, &a).unwrap();
            if violated.is_empty() {
                let team = team_from_assignment(&inst, &a);
                let counts = naive_counts(&inst, &team);
                for key in inst.bonuses().keys() {
                    if a.values[&indicator_var(key)] {
                        prop_assert!(counts[key.alliance] >= key.threshold);
                        prop_assert!(team.contains(key.hero));
                    }
                }
            }
            if team.len() <= m {
                let g = greedy_assignment(&inst, &model, &team).unwrap();
                prop_assert!(check_feasible(&model, &g).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn greedy_activation_is_the_best_activation(seed in any::<u64>(), n in 2usize..=7, m in 1usize..=4) {
        let inst = instance_from(seed, n, m);
        let model = build_model(&inst).unwrap();
        let mut rng = StdRng::seed_from_u64(seed ^ 0x0c);
        let team = random_team(&mut rng, n, m);
        let keys: Vec<BonusKey> = inst.bonuses().keys().copied().filter(|k| team.contains(k.hero)).collect();
        prop_assume!(keys.len() <= 12);
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << keys.len()) {
            let mut a = VariableAssignment::zeros(&model);
            for i in team.iter() { a.set(hero_var(i), true); }
            for (b, k) in keys.iter().enumerate() {
                if mask & (1 << b) != 0 { a.set(indicator_var(k), true); }
            }
            if check_feasible(&model, &a).unwrap().is_empty() {
                best = best.max(objective_value(&model, &a).unwrap());
            }
        }
        let total = evaluate_team(&inst, &team).unwrap().total;
        prop_assert!((best - total).abs() < 1e-9);
        let greedy = greedy_assignment(&inst, &model, &team).unwrap();
        prop_assert!((objective_value(&model, &greedy).unwrap() - total).abs() < 1e-9);
    }

    #[test]
    fn instance_json_round_trip(seed in any::<u64>(), n in 1usize..=10, m in 1usize..=5) {
        let inst = instance_from(seed, n, m);
        prop_assert_eq!(parse_instance(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn lp_round_trip(seed in any::<u64>(), n in 1usize..=10, m in 1usize..=5) {
        let model = build_model(&instance_from(seed, n, m)).unwrap();
        prop_assert_eq!(import_lp(&export_lp(&model)).unwrap(), model);
    }
}

#[test]
fn empty_tensor_brute_force_agrees_with_greedy() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=4);
        let inst = underlords::random::random_plain_instance(&mut rng, n, m);
        let greedy = solve_no_alliance(&inst).unwrap();
        let oracle = brute_force(&inst, DEFAULT_SUBSET_GUARD).unwrap();
        assert_eq!(greedy.objective, oracle.objective);
        assert_eq!(greedy.team, oracle.team);
        let bound = optimistic_bound(&inst, &Team::new(), &BTreeSet::new()).unwrap();
        assert_eq!(bound, oracle.objective);
    }
}

#[test]
fn full_team_bound_covers_its_value() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..40 {
        let inst = random_instance(&mut rng, 7, 3);
        let team = random_team(&mut rng, 7, 3);
        let out: BTreeSet<usize> = (0..7).filter(|&i| !team.contains(i)).collect();
        let bound = optimistic_bound(&inst, &team, &out).unwrap();
        assert!(bound >= evaluate_team(&inst, &team).unwrap().total - 1e-12);
    }
}

#[test]
fn solver_output_is_feasible_in_the_model() {
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..30 {
        let inst = random_instance(&mut rng, 9, 4);
        let s = branch_and_bound(&inst, &SearchOptions::default());
        let model = build_model(&inst).unwrap();
        let a = greedy_assignment(&inst, &model, &s.team).unwrap();
        assert!(check_feasible(&model, &a).unwrap().is_empty());
        assert!((objective_value(&model, &a).unwrap() - s.objective).abs() < 1e-9);
    }
}
