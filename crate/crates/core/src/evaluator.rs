//! Objective evaluation for a fixed team.
//!
//! Every admissible bonus fires: an entry `(i, j, k)` is active when hero `i`
//! is on the team and alliance `j` has at least `k` members on it. With
//! non-negative bonuses this is the best activation for the given team, so
//! the evaluator doubles as the objective oracle for the integer model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{AllianceId, HeroId, Instance};

/// A set of hero ids. Ordered lexicographically on the sorted id list.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Team(BTreeSet<HeroId>);

impl Team {
    pub fn new() -> Team {
        Team::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: HeroId) -> bool {
        self.0.contains(&id)
    }

    pub fn insert(&mut self, id: HeroId) -> bool {
        self.0.insert(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = HeroId> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<HeroId> {
        self.0.iter().copied().collect()
    }

    /// Resolves hero names; unknown names are returned as the error payload.
    pub fn from_names<S: AsRef<str>>(
        instance: &Instance,
        names: &[S],
    ) -> std::result::Result<Team, Vec<String>> {
        let mut team = Team::new();
        let mut unknown = Vec::new();
        for n in names {
            match instance.hero_by_name(n.as_ref()) {
                Some(h) => {
                    team.insert(h.id);
                }
                None => unknown.push(n.as_ref().to_string()),
            }
        }
        if unknown.is_empty() {
            Ok(team)
        } else {
            Err(unknown)
        }
    }
}

impl FromIterator<HeroId> for Team {
    fn from_iter<I: IntoIterator<Item = HeroId>>(iter: I) -> Self {
        Team(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveBonus {
    pub alliance: AllianceId,
    pub threshold: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub total: f64,
    pub base_power: f64,
    /// Active bonuses per team member, ordered by `(alliance, threshold)`.
    /// Every member has an entry, possibly empty.
    pub per_hero: BTreeMap<HeroId, Vec<ActiveBonus>>,
    /// Team members per alliance, indexed by alliance id.
    pub active_counts: Vec<usize>,
}

impl Evaluation {
    pub fn hero_bonus(&self, hero: HeroId) -> f64 {
        self.per_hero
            .get(&hero)
            .map(|b| b.iter().map(|x| x.value).sum())
            .unwrap_or(0.0)
    }
}

fn check_ids(instance: &Instance, team: &Team) -> Result<()> {
    match team.iter().find(|&i| i >= instance.hero_count()) {
        Some(bad) => Err(Error::UnknownHero(format!("#{bad}"))),
        None => Ok(()),
    }
}

/// Members of each alliance within the team, O(n·t).
pub fn alliance_counts(instance: &Instance, team: &Team) -> Result<Vec<usize>> {
    check_ids(instance, team)?;
    let mut counts = vec![0usize; instance.alliance_count()];
    for i in team.iter() {
        for &j in instance.hero_alliances(i) {
            counts[j] += 1;
        }
    }
    Ok(counts)
}

/// Objective of a sorted member list given its alliance counts.
///
/// This fixes the summation order (powers by id, then bonuses by
/// `(hero, alliance, threshold)`), so every caller gets bit-identical totals
/// for the same team.
pub(crate) fn score_sorted(instance: &Instance, members: &[HeroId], counts: &[usize]) -> f64 {
    let mut base = 0.0;
    for &i in members {
        base += instance.heroes()[i].power;
    }
    let mut bonus = 0.0;
    for &i in members {
        for b in instance.hero_bonuses(i) {
            if counts[b.alliance] >= b.threshold {
                bonus += b.value;
            }
        }
    }
    base + bonus
}

pub fn evaluate_team(instance: &Instance, team: &Team) -> Result<Evaluation> {
    if team.len() > instance.team_cap() {
        return Err(Error::TeamTooLarge {
            size: team.len(),
            cap: instance.team_cap(),
        });
    }
    let counts = alliance_counts(instance, team)?;
    let mut base_power = 0.0;
    for i in team.iter() {
        base_power += instance.heroes()[i].power;
    }
    let mut per_hero = BTreeMap::new();
    let mut bonus = 0.0;
    for i in team.iter() {
        let mut active = Vec::new();
        for b in instance.hero_bonuses(i) {
            if counts[b.alliance] >= b.threshold {
                bonus += b.value;
                active.push(ActiveBonus {
                    alliance: b.alliance,
                    threshold: b.threshold,
                    value: b.value,
                });
            }
        }
        per_hero.insert(i, active);
    }
    Ok(Evaluation {
        total: base_power + bonus,
        base_power,
        per_hero,
        active_counts: counts,
    })
}

/// Decision version: does the team's total strictly exceed `bound`?
pub fn check_decision(instance: &Instance, team: &Team, bound: f64) -> Result<bool> {
    Ok(evaluate_team(instance, team)?.total > bound)
}

/// Formats a value with one decimal when that is exact, otherwise in full.
pub fn format_value(v: f64) -> String {
    let one = format!("{v:.1}");
    if (one.parse::<f64>().unwrap_or(f64::NAN) - v).abs() < 1e-9 {
        one
    } else {
        format!("{v}")
    }
}

/// Per-hero breakdown table: one row per member ordered by name, bonus cells
/// `alliance k +value` ordered by alliance name then threshold, followed by
/// the contribution, power and sum columns.
pub fn render_breakdown(instance: &Instance, eval: &Evaluation) -> String {
    struct Row {
        name: String,
        cells: Vec<String>,
        contribution: String,
        power: String,
        sum: String,
    }
    let mut rows: Vec<Row> = eval
        .per_hero
        .iter()
        .map(|(&i, bonuses)| {
            let hero = &instance.heroes()[i];
            let mut sorted: Vec<_> = bonuses.iter().collect();
            sorted.sort_by(|a, b| {
                instance.alliances()[a.alliance]
                    .cmp(&instance.alliances()[b.alliance])
                    .then(a.threshold.cmp(&b.threshold))
            });
            let contribution: f64 = bonuses.iter().map(|b| b.value).sum();
            Row {
                name: hero.name.clone(),
                cells: sorted
                    .iter()
                    .map(|b| {
                        format!(
                            "{} {} +{}",
                            instance.alliances()[b.alliance],
                            b.threshold,
                            format_value(b.value)
                        )
                    })
                    .collect(),
                contribution: format_value(contribution),
                power: format_value(hero.power),
                sum: format_value(hero.power + contribution),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.name.cmp(&b.name));

    let width = rows.iter().map(|r| r.cells.len()).max().unwrap_or(0);
    let mut table: Vec<Vec<String>> = Vec::with_capacity(rows.len() + 2);
    let mut header = vec!["Hero".to_string()];
    header.extend(std::iter::repeat_n(String::new(), width));
    header.extend(["Alliance contribution", "Hero power", "Sum"].map(String::from));
    table.push(header);
    for r in rows {
        let mut line = vec![r.name];
        let pad = width - r.cells.len();
        line.extend(r.cells);
        line.extend(std::iter::repeat_n(String::new(), pad));
        line.extend([r.contribution, r.power, r.sum]);
        table.push(line);
    }
    let mut total = vec!["Total".to_string()];
    total.extend(std::iter::repeat_n(String::new(), width));
    total.extend([
        format_value(eval.total - eval.base_power),
        format_value(eval.base_power),
        format_value(eval.total),
    ]);
    table.push(total);

    let cols = table[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (n, r) in table.iter().enumerate() {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
        if n == 0 || n + 2 == table.len() {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            let _ = writeln!(out, "{}", rule.join("-+-"));
        }
    }
    out
}
