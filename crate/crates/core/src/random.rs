//! Seeded generators for small instances used by the cross-checking suites.
//!
//! Powers are small integers (zero included) and bonuses are multiples of
//! ten percent, so equal-objective ties are common and tie-breaking gets
//! exercised.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;

use crate::instance::{compile_bonus_rules, BonusKey, BonusRule, Hero, Instance};
use crate::reductions::SimpleGraph;

const PERCENTS: [f64; 4] = [0.0, 0.1, 0.2, 0.3];

fn heroes<R: Rng>(rng: &mut R, n: usize, allow_zero: bool) -> Vec<Hero> {
    let low = if allow_zero { 0 } else { 1 };
    (0..n)
        .map(|id| Hero {
            id,
            name: format!("h{id}"),
            power: rng.random_range(low..=5) as f64,
            alliances: BTreeSet::new(),
        })
        .collect()
}

fn finish(
    mut heroes: Vec<Hero>,
    alliances: Vec<String>,
    groups: Vec<Vec<usize>>,
    bonuses: BTreeMap<BonusKey, f64>,
    team_cap: usize,
) -> Instance {
    for (j, members) in groups.iter().enumerate() {
        for &i in members {
            heroes[i].alliances.insert(alliances[j].clone());
        }
    }
    let q = groups.iter().map(Vec::len).max().unwrap_or(0).max(1);
    Instance::new(heroes, alliances, bonuses, team_cap, q).expect("generated instance is valid")
}

/// General instance: `n` heroes, cap `m`, 1–4 alliances of random
/// membership, one or two percentage rules per alliance and the odd
/// explicit tensor entry.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> Instance {
    let mut hs = heroes(rng, n, true);
    let t = rng.random_range(1..=4);
    let alliances: Vec<String> = (0..t).map(|j| format!("a{j}")).collect();
    let mut groups = vec![Vec::new(); t];
    for i in 0..n {
        let picks = rng.random_range(1..=2.min(t));
        for j in sample(rng, t, picks).into_iter() {
            groups[j].push(i);
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    for (j, members) in groups.iter().enumerate() {
        for &i in members {
            hs[i].alliances.insert(alliances[j].clone());
        }
    }
    let mut rules = Vec::new();
    for (j, members) in groups.iter().enumerate() {
        let size = members.len().max(1);
        for _ in 0..rng.random_range(1..=2) {
            rules.push(BonusRule {
                alliance: alliances[j].clone(),
                threshold: rng.random_range(1..=size),
                member_percent: PERCENTS[rng.random_range(0..PERCENTS.len())],
                global_percent: if rng.random_bool(0.3) {
                    PERCENTS[rng.random_range(0..PERCENTS.len())]
                } else {
                    0.0
                },
            });
        }
    }
    let mut bonuses = BTreeMap::new();
    for e in compile_bonus_rules(&hs, &alliances, &rules).expect("rules reference known alliances") {
        *bonuses.entry(e.key()).or_insert(0.0) += e.value;
    }
    if rng.random_bool(0.3) {
        let j = rng.random_range(0..t);
        let size = groups[j].len().max(1);
        let key = BonusKey {
            hero: rng.random_range(0..n),
            alliance: j,
            threshold: rng.random_range(1..=size),
        };
        *bonuses.entry(key).or_insert(0.0) += rng.random_range(1..=10) as f64 / 10.0;
    }
    finish(hs, alliances, groups, bonuses, m)
}

/// Instance without any bonuses.
pub fn random_plain_instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> Instance {
    let hs = heroes(rng, n, false);
    finish(hs, Vec::new(), Vec::new(), BTreeMap::new(), m)
}

/// Instance whose alliances all have exactly `q` members and whose bonuses
/// fire only at full strength, mixing member-scope and global-scope rules.
pub fn random_uniform_instance<R: Rng>(rng: &mut R, n: usize, m: usize, q: usize) -> Instance {
    let hs = heroes(rng, n, false);
    let t = rng.random_range(1..=3);
    let mut seen = BTreeSet::new();
    let mut groups = Vec::new();
    for _ in 0..t {
        let mut g: Vec<usize> = sample(rng, n, q).into_vec();
        g.sort_unstable();
        if seen.insert(g.clone()) {
            groups.push(g);
        }
    }
    let alliances: Vec<String> = (0..groups.len()).map(|j| format!("a{j}")).collect();
    let mut bonuses = BTreeMap::new();
    for (j, members) in groups.iter().enumerate() {
        let member = PERCENTS[rng.random_range(1..PERCENTS.len())];
        let global = if rng.random_bool(0.3) { 0.1 } else { 0.0 };
        for h in &hs {
            let pct = if members.contains(&h.id) { member } else { global };
            let value = pct * h.power;
            if value > 0.0 {
                bonuses.insert(
                    BonusKey {
                        hero: h.id,
                        alliance: j,
                        threshold: q,
                    },
                    value,
                );
            }
        }
    }
    finish(hs, alliances, groups, bonuses, m)
}

/// G(n, p) random graph.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> SimpleGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    SimpleGraph::new(n, edges).expect("generated edges are in range")
}
