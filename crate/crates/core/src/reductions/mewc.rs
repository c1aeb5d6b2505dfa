use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::{HeroId, Instance};

use super::graph::{VertexLabel, WeightedGraph};

/// Largest `C(m,q)·C(n,q)` accepted by [`du_to_mewc_general`].
pub const DEFAULT_REDUCTION_GUARD: usize = 100_000;

/// `1 + Σ s_i + Σ e_ijk`: exceeds any clique weight that avoids heavy edges.
pub fn choose_big_n(instance: &Instance) -> f64 {
    1.0 + instance.total_power() + instance.total_bonus()
}

fn check_sizes(instance: &Instance) -> Result<(usize, usize)> {
    let (n, m) = (instance.hero_count(), instance.team_cap());
    if m < 2 {
        return Err(Error::DegenerateCap(m));
    }
    if n < m {
        return Err(Error::NotEnoughHeroes { heroes: n, cap: m });
    }
    Ok((n, m))
}

/// Slot vertices `v_a^i` (vertex id `slot·n + hero`) with edges between
/// different heroes in different slots, weighted `s_a/(m−1) + s_b/(m−1)`.
fn slot_layer(instance: &Instance, n: usize, m: usize, heavy_n: f64) -> WeightedGraph {
    let mut labels = Vec::with_capacity(n * m);
    for slot in 0..m {
        for hero in 0..n {
            labels.push(VertexLabel::Slot { hero, slot });
        }
    }
    let mut g = WeightedGraph::new(labels, heavy_n);
    let share = (m - 1) as f64;
    for u in 0..n * m {
        for v in u + 1..n * m {
            let (a, i) = (u % n, u / n);
            let (b, k) = (v % n, v / n);
            if a != b && i != k {
                let w = instance.heroes()[a].power / share + instance.heroes()[b].power / share;
                g.set_edge(u, v, w, false);
            }
        }
    }
    g
}

/// Clique graph for instances without bonuses: a maximum-weight clique picks
/// one hero per slot and weighs exactly the team's total power.
pub fn du_to_mewc_basic(instance: &Instance) -> Result<WeightedGraph> {
    if !instance.bonuses().is_empty() {
        return Err(Error::NotApplicable(
            "the basic clique reduction needs an instance without bonuses".into(),
        ));
    }
    let (n, m) = check_sizes(instance)?;
    Ok(slot_layer(instance, n, m, 0.0))
}

/// Clique graph for instances whose alliances all have two members and
/// whose bonuses fire only when both are fielded.
pub fn du_to_mewc_pairs(instance: &Instance) -> Result<WeightedGraph> {
    du_to_mewc_general(instance, 2).map_err(|e| match e {
        Error::NotUniformForm { reason, .. } => Error::NotPairForm(reason),
        other => other,
    })
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut comb: Vec<usize> = (0..r).collect();
    loop {
        out.push(comb.clone());
        let mut i = r;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if comb[i] < n - r + i {
                comb[i] += 1;
                for k in i + 1..r {
                    comb[k] = comb[k - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return out;
        }
    }
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Clique graph for alliances of exactly `q` members activating at full
/// size. Adds `C(m,q)` groups of `C(n,q)` vertices `w_S^K` (hero set `S` on
/// slot set `K`). Heavy edges of weight N join `v_x^k` to `w_S^K` when
/// `x ∈ S` and `k ∈ K`; the bonus alliance `S` grants hero `c` is added to
/// every `(v_c^k, w_S^K)` edge. A consistent clique for team `T` weighs
/// `q·C(m,q)·N` plus the team's objective.
pub fn du_to_mewc_general(instance: &Instance, q: usize) -> Result<WeightedGraph> {
    let not_uniform = |reason: String| Error::NotUniformForm { q, reason };
    if q < 2 {
        return Err(not_uniform("alliance size must be at least 2".into()));
    }
    let (n, m) = check_sizes(instance)?;
    if m < q {
        return Err(not_uniform(format!("team cap {m} is below the alliance size")));
    }
    for (j, name) in instance.alliances().iter().enumerate() {
        let size = instance.members(j).len();
        if size != q {
            return Err(not_uniform(format!("alliance `{name}` has {size} members")));
        }
    }
    if let Some(k) = instance.bonuses().keys().find(|k| k.threshold != q) {
        return Err(not_uniform(format!(
            "alliance `{}` has a bonus at threshold {}",
            instance.alliances()[k.alliance],
            k.threshold
        )));
    }
    let groups = binomial(m, q).saturating_mul(binomial(n, q));
    if groups > DEFAULT_REDUCTION_GUARD {
        return Err(Error::TooLarge(format!(
            "{groups} group vertices exceed the guard of {DEFAULT_REDUCTION_GUARD}"
        )));
    }

    let heavy_n = choose_big_n(instance);
    let mut g = slot_layer(instance, n, m, heavy_n);

    // bonus[(c, S)]: total that the alliances with member set S grant hero c
    let mut bonus: HashMap<(HeroId, Vec<HeroId>), f64> = HashMap::new();
    for (key, &value) in instance.bonuses() {
        let set = instance.members(key.alliance).to_vec();
        *bonus.entry((key.hero, set)).or_insert(0.0) += value;
    }

    let slot_sets = combinations(m, q);
    let hero_sets = combinations(n, q);
    let first_w = g.vertex_count();
    for slots in &slot_sets {
        for heroes in &hero_sets {
            g.labels.push(VertexLabel::Group {
                heroes: heroes.clone(),
                slots: slots.clone(),
            });
        }
    }
    let h = hero_sets.len();
    let w_id = |ks: usize, hs: usize| first_w + ks * h + hs;

    for ks in 0..slot_sets.len() {
        for hs in 0..h {
            for ks2 in ks + 1..slot_sets.len() {
                for hs2 in 0..h {
                    if hs2 != hs {
                        g.set_edge(w_id(ks, hs), w_id(ks2, hs2), 0.0, false);
                    }
                }
            }
        }
    }

    for slot in 0..m {
        for hero in 0..n {
            let v = slot * n + hero;
            for (ks, slots) in slot_sets.iter().enumerate() {
                for (hs, heroes) in hero_sets.iter().enumerate() {
                    let heavy = heroes.contains(&hero) && slots.contains(&slot);
                    let extra = bonus.get(&(hero, heroes.clone())).copied().unwrap_or(0.0);
                    let base = if heavy { heavy_n } else { 0.0 };
                    g.set_edge(v, w_id(ks, hs), base + extra, heavy);
                }
            }
        }
    }
    Ok(g)
}
