//! Exact maximization of team strength.
//!
//! Three routes share one ordering of candidate solutions: higher objective
//! first, then the lexicographically smaller sorted id list. Objectives are
//! always computed by the evaluator's canonical summation, so two routes that
//! find the same team report bit-identical values.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::evaluator::{score_sorted, Team};
use crate::instance::{HeroId, Instance};

/// Absolute slack when comparing a bound against the incumbent.
pub const PRUNE_TOLERANCE: f64 = 1e-12;

/// Default cap on subsets enumerated by [`brute_force`].
pub const DEFAULT_SUBSET_GUARD: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub team: Team,
    pub objective: f64,
    pub proven_optimal: bool,
    pub nodes_explored: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub parallel_workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            time_limit: None,
            node_limit: None,
            parallel_workers: 1,
        }
    }
}

/// Allowed team sizes for enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeamSize {
    AtMost(usize),
    Exactly(usize),
}

/// `true` when `(obj_a, team_a)` ranks strictly ahead of `(obj_b, team_b)`.
pub fn is_better(obj_a: f64, team_a: &[HeroId], obj_b: f64, team_b: &[HeroId]) -> bool {
    match obj_a.partial_cmp(&obj_b) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Equal) => team_a < team_b,
        _ => false,
    }
}

fn counts_for(instance: &Instance, members: &[HeroId]) -> Vec<usize> {
    let mut counts = vec![0; instance.alliance_count()];
    for &i in members {
        for &j in instance.hero_alliances(i) {
            counts[j] += 1;
        }
    }
    counts
}

fn score(instance: &Instance, members: &[HeroId]) -> f64 {
    score_sorted(instance, members, &counts_for(instance, members))
}

/// Top-m by power when there are no bonuses; ties go to the smaller id.
pub fn solve_no_alliance(instance: &Instance) -> Result<Solution> {
    let start = Instant::now();
    if !instance.bonuses().is_empty() {
        return Err(Error::NotApplicable(
            "instance has alliance bonuses; greedy selection is only exact without them".into(),
        ));
    }
    let mut order: Vec<HeroId> = (0..instance.hero_count()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (instance.heroes()[a].power, instance.heroes()[b].power);
        pb.total_cmp(&pa).then(a.cmp(&b))
    });
    let mut members: Vec<HeroId> = order.into_iter().take(instance.team_cap()).collect();
    members.sort_unstable();
    let objective = score(instance, &members);
    Ok(Solution {
        team: members.into_iter().collect(),
        objective,
        proven_optimal: true,
        nodes_explored: 0,
        wall_time: start.elapsed(),
    })
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Advances to the next r-combination of `0..n` in lexicographic order.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let r = comb.len();
    for i in (0..r).rev() {
        if comb[i] < n - r + i {
            comb[i] += 1;
            for k in i + 1..r {
                comb[k] = comb[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Number of subsets [`brute_force_sized`] would visit.
pub fn subset_count(n: usize, size: TeamSize) -> u128 {
    match size {
        TeamSize::AtMost(m) => (0..=m.min(n)).fold(0u128, |a, r| a.saturating_add(binomial(n, r))),
        TeamSize::Exactly(m) => binomial(n, m),
    }
}

/// Exhaustive search over all teams of size ≤ `team_cap`.
pub fn brute_force(instance: &Instance, max_subsets: u128) -> Result<Solution> {
    brute_force_sized(instance, TeamSize::AtMost(instance.team_cap()), max_subsets)
}

pub fn brute_force_sized(instance: &Instance, size: TeamSize, max_subsets: u128) -> Result<Solution> {
    let start = Instant::now();
    let n = instance.hero_count();
    let total = subset_count(n, size);
    if total > max_subsets {
        return Err(Error::TooLarge(format!(
            "{total} subsets exceed the guard of {max_subsets}"
        )));
    }
    let sizes: Vec<usize> = match size {
        TeamSize::AtMost(m) => (0..=m.min(n)).collect(),
        TeamSize::Exactly(m) if m <= n => vec![m],
        TeamSize::Exactly(_) => Vec::new(),
    };

    let mut best: Option<(f64, Vec<HeroId>)> = None;
    let mut visited = 0u64;
    for r in sizes {
        let mut comb: Vec<HeroId> = (0..r).collect();
        loop {
            visited += 1;
            let obj = score(instance, &comb);
            let better = match &best {
                None => true,
                Some((b, t)) => is_better(obj, &comb, *b, t),
            };
            if better {
                best = Some((obj, comb.clone()));
            }
            if !next_combination(&mut comb, n) {
                break;
            }
        }
    }
    let (objective, members) = best.ok_or_else(|| {
        Error::NotApplicable("no team of the requested size exists".into())
    })?;
    Ok(Solution {
        team: members.into_iter().collect(),
        objective,
        proven_optimal: true,
        nodes_explored: visited,
        wall_time: start.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// Optimistic bound

/// Per-hero optimistic value `s_i + Σ e_ijk` over the entries whose alliance
/// can still reach threshold `k`. `in_counts[j]` counts fixed members of
/// alliance `j`, `free_counts[j]` undecided ones, and `slots` the remaining
/// capacity.
fn optimistic_value(
    instance: &Instance,
    hero: HeroId,
    in_counts: &[usize],
    free_counts: &[usize],
    slots: usize,
) -> f64 {
    let mut v = instance.heroes()[hero].power;
    for b in instance.hero_bonuses(hero) {
        if in_counts[b.alliance] + free_counts[b.alliance].min(slots) >= b.threshold {
            v += b.value;
        }
    }
    v
}

fn sum_of_largest(values: &mut [f64], k: usize) -> f64 {
    if k == 0 || values.is_empty() {
        return 0.0;
    }
    if k < values.len() {
        values.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        values[..k].iter().sum()
    } else {
        values.iter().sum()
    }
}

/// Upper bound on any team that contains `fixed_in`, avoids `fixed_out` and
/// has at most `team_cap` heroes.
pub fn optimistic_bound(
    instance: &Instance,
    fixed_in: &Team,
    fixed_out: &BTreeSet<HeroId>,
) -> Result<f64> {
    let n = instance.hero_count();
    let m = instance.team_cap();
    if let Some(i) = fixed_in.iter().find(|i| fixed_out.contains(i)) {
        return Err(Error::InvalidBranch(format!("hero {i} is both fixed in and fixed out")));
    }
    if fixed_in.len() > m {
        return Err(Error::InvalidBranch(format!(
            "{} heroes fixed in exceed the cap of {m}",
            fixed_in.len()
        )));
    }
    if let Some(i) = fixed_in.iter().chain(fixed_out.iter().copied()).find(|&i| i >= n) {
        return Err(Error::UnknownHero(format!("#{i}")));
    }
    let mut in_counts = vec![0usize; instance.alliance_count()];
    let mut free_counts = vec![0usize; instance.alliance_count()];
    for i in 0..n {
        let counts = if fixed_in.contains(i) {
            &mut in_counts
        } else if fixed_out.contains(&i) {
            continue;
        } else {
            &mut free_counts
        };
        for &j in instance.hero_alliances(i) {
            counts[j] += 1;
        }
    }
    let slots = m - fixed_in.len();
    let fixed: f64 = fixed_in
        .iter()
        .map(|i| optimistic_value(instance, i, &in_counts, &free_counts, slots))
        .sum();
    let mut free: Vec<f64> = (0..n)
        .filter(|&i| !fixed_in.contains(i) && !fixed_out.contains(&i))
        .map(|i| optimistic_value(instance, i, &in_counts, &free_counts, slots))
        .collect();
    Ok(fixed + sum_of_largest(&mut free, slots))
}

// ---------------------------------------------------------------------------
// Branch and bound

struct Incumbent {
    objective: f64,
    team: Vec<HeroId>,
}

struct Shared<'a> {
    instance: &'a Instance,
    /// Heroes in branching order (descending root optimistic value).
    order: Vec<HeroId>,
    /// `suffix[d][j]`: members of alliance `j` among `order[d..]`.
    suffix: Vec<Vec<usize>>,
    incumbent: Mutex<Incumbent>,
    incumbent_bits: AtomicU64,
    nodes: AtomicU64,
    stop: AtomicBool,
    deadline: Option<Instant>,
    node_limit: Option<u64>,
}

impl Shared<'_> {
    fn incumbent_objective(&self) -> f64 {
        f64::from_bits(self.incumbent_bits.load(AtomicOrdering::Acquire))
    }

    fn offer(&self, objective: f64, team: &[HeroId]) {
        if objective < self.incumbent_objective() {
            return;
        }
        let mut inc = self.incumbent.lock().expect("incumbent lock");
        if is_better(objective, team, inc.objective, &inc.team) {
            inc.objective = objective;
            inc.team = team.to_vec();
            self.incumbent_bits
                .store(objective.to_bits(), AtomicOrdering::Release);
        }
    }

    /// Counts a node expansion; `false` once a limit has been hit.
    fn tick(&self) -> bool {
        if self.stop.load(AtomicOrdering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        let over_nodes = self.node_limit.is_some_and(|l| n > l);
        let over_time = self.deadline.is_some_and(|d| Instant::now() >= d);
        if over_nodes || over_time {
            self.stop.store(true, AtomicOrdering::Relaxed);
            return false;
        }
        true
    }
}

#[derive(Clone)]
struct Node {
    depth: usize,
    members: Vec<HeroId>,
    counts: Vec<usize>,
}

impl Node {
    fn add(&mut self, instance: &Instance, hero: HeroId) {
        let pos = self.members.binary_search(&hero).unwrap_err();
        self.members.insert(pos, hero);
        for &j in instance.hero_alliances(hero) {
            self.counts[j] += 1;
        }
    }

    fn remove(&mut self, instance: &Instance, hero: HeroId) {
        let pos = self.members.binary_search(&hero).expect("member present");
        self.members.remove(pos);
        for &j in instance.hero_alliances(hero) {
            self.counts[j] -= 1;
        }
    }
}

fn node_bound(sh: &Shared<'_>, node: &Node, scratch: &mut Vec<f64>) -> f64 {
    let inst = sh.instance;
    let slots = inst.team_cap() - node.members.len();
    let free_counts = &sh.suffix[node.depth];
    let fixed: f64 = node
        .members
        .iter()
        .map(|&i| optimistic_value(inst, i, &node.counts, free_counts, slots))
        .sum();
    if slots == 0 {
        return fixed;
    }
    scratch.clear();
    scratch.extend(
        sh.order[node.depth..]
            .iter()
            .map(|&i| optimistic_value(inst, i, &node.counts, free_counts, slots)),
    );
    fixed + sum_of_largest(scratch, slots)
}

/// Either prunes the node or reports whether it has children.
fn should_expand(sh: &Shared<'_>, node: &Node, scratch: &mut Vec<f64>) -> bool {
    if node.members.len() == sh.instance.team_cap() || node.depth == sh.order.len() {
        return false;
    }
    node_bound(sh, node, scratch) >= sh.incumbent_objective() - PRUNE_TOLERANCE
}

fn dfs(sh: &Shared<'_>, node: &mut Node, scratch: &mut Vec<f64>) {
    if !sh.tick() || !should_expand(sh, node, scratch) {
        return;
    }
    let hero = sh.order[node.depth];
    node.depth += 1;

    node.add(sh.instance, hero);
    sh.offer(score_sorted(sh.instance, &node.members, &node.counts), &node.members);
    dfs(sh, node, scratch);
    node.remove(sh.instance, hero);

    dfs(sh, node, scratch);
    node.depth -= 1;
}

/// Splits the root into subtrees for the workers, pruning on the way.
fn frontier(sh: &Shared<'_>, root: Node, target: usize) -> VecDeque<Node> {
    let mut queue = VecDeque::from([root]);
    let mut scratch = Vec::new();
    let mut leaves = VecDeque::new();
    while let Some(mut node) = queue.pop_front() {
        if queue.len() + leaves.len() >= target {
            leaves.push_back(node);
            continue;
        }
        if !sh.tick() || !should_expand(sh, &node, &mut scratch) {
            continue;
        }
        let hero = sh.order[node.depth];
        node.depth += 1;
        let mut with = node.clone();
        with.add(sh.instance, hero);
        sh.offer(score_sorted(sh.instance, &with.members, &with.counts), &with.members);
        queue.push_back(with);
        queue.push_back(node);
    }
    leaves.extend(queue);
    leaves
}

/// Depth-first include/exclude search over heroes ordered by optimistic
/// value, pruned by [`optimistic_bound`]-style bounds. The result does not
/// depend on the worker count unless a limit stops the search early.
pub fn branch_and_bound(instance: &Instance, options: &SearchOptions) -> Solution {
    let start = Instant::now();
    let n = instance.hero_count();
    let m = instance.team_cap();
    let t = instance.alliance_count();

    let all_free = instance.alliance_sizes();
    let root_value: Vec<f64> = (0..n)
        .map(|i| optimistic_value(instance, i, &vec![0; t], &all_free, m))
        .collect();
    let mut order: Vec<HeroId> = (0..n).collect();
    order.sort_by(|&a, &b| root_value[b].total_cmp(&root_value[a]).then(a.cmp(&b)));

    let mut suffix = vec![vec![0usize; t]; n + 1];
    for d in (0..n).rev() {
        suffix[d] = suffix[d + 1].clone();
        for &j in instance.hero_alliances(order[d]) {
            suffix[d][j] += 1;
        }
    }

    let sh = Shared {
        instance,
        order,
        suffix,
        incumbent: Mutex::new(Incumbent {
            objective: 0.0,
            team: Vec::new(),
        }),
        incumbent_bits: AtomicU64::new(0.0f64.to_bits()),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        deadline: options.time_limit.map(|d| start + d),
        node_limit: options.node_limit,
    };
    // Seed with the best-looking m heroes, evaluated exactly.
    let mut seed: Vec<HeroId> = sh.order.iter().copied().take(m).collect();
    seed.sort_unstable();
    sh.offer(score(instance, &seed), &seed);

    let root = Node {
        depth: 0,
        members: Vec::new(),
        counts: vec![0; t],
    };
    let workers = options.parallel_workers.max(1);
    if workers == 1 {
        let mut root = root;
        dfs(&sh, &mut root, &mut Vec::new());
    } else {
        let queue = Mutex::new(frontier(&sh, root, workers * 16));
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| {
                    let mut scratch = Vec::new();
                    loop {
                        let next = queue.lock().expect("work queue lock").pop_front();
                        match next {
                            Some(mut node) => dfs(&sh, &mut node, &mut scratch),
                            None => break,
                        }
                    }
                });
            }
        });
    }

    let stopped = sh.stop.load(AtomicOrdering::Relaxed);
    let nodes = sh.nodes.load(AtomicOrdering::Relaxed);
    let inc = sh.incumbent.into_inner().expect("incumbent lock");
    Solution {
        team: inc.team.into_iter().collect(),
        objective: inc.objective,
        proven_optimal: !stopped,
        nodes_explored: nodes,
        wall_time: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::evaluate_team;
    use crate::instance::parse_instance;

    fn plain(powers: &[f64], cap: usize) -> Instance {
        let heroes: Vec<String> = powers
            .iter()
            .enumerate()
            .map(|(i, p)| format!(r#"{{"name": "h{i}", "power": {p}, "alliances": ["a{i}"]}}"#))
            .collect();
        parse_instance(&format!(r#"{{"team_cap": {cap}, "heroes": [{}]}}"#, heroes.join(","))).unwrap()
    }

    fn two_hero() -> Instance {
        parse_instance(
            r#"{"team_cap": 2,
                "heroes": [{"name": "h1", "power": 1, "alliances": ["a"]},
                           {"name": "h2", "power": 1, "alliances": ["a"]}],
                "bonus_entries": [{"hero": "h1", "alliance": "a", "threshold": 2, "value": 0.5}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn greedy_top_m() {
        let s = solve_no_alliance(&plain(&[5.0, 3.0, 2.0, 1.0], 2)).unwrap();
        assert_eq!(s.team.to_vec(), vec![0, 1]);
        assert_eq!(s.objective, 8.0);
        assert!(s.proven_optimal);
    }

    #[test]
    fn greedy_ties_and_full_set() {
        let s = solve_no_alliance(&plain(&[2.0, 2.0, 2.0], 2)).unwrap();
        assert_eq!(s.team.to_vec(), vec![0, 1]);
        assert_eq!(s.objective, 4.0);
        let all = solve_no_alliance(&plain(&[1.0, 2.0, 3.0], 5)).unwrap();
        assert_eq!(all.team.len(), 3);
        assert_eq!(all.objective, 6.0);
    }

    #[test]
    fn greedy_not_applicable_with_bonuses() {
        assert!(matches!(solve_no_alliance(&two_hero()), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn brute_force_counts_subsets() {
        let s = brute_force(&plain(&[1.0, 2.0, 3.0, 4.0, 5.0], 2), DEFAULT_SUBSET_GUARD).unwrap();
        assert_eq!(s.nodes_explored, 16);
        assert_eq!(subset_count(5, TeamSize::AtMost(2)), 16);
        assert_eq!(s.team.to_vec(), vec![3, 4]);
    }

    #[test]
    fn brute_force_guard() {
        let inst = plain(&[1.0; 6], 3);
        assert!(matches!(brute_force(&inst, 10), Err(Error::TooLarge(_))));
    }

    #[test]
    fn brute_force_two_hero() {
        let s = brute_force(&two_hero(), DEFAULT_SUBSET_GUARD).unwrap();
        assert_eq!(s.team.to_vec(), vec![0, 1]);
        assert_eq!(s.objective, 2.5);
    }

    #[test]
    fn bound_two_hero_unfixed() {
        // v_0 = 1 + 0.5, v_1 = 1, two slots.
        let b = optimistic_bound(&two_hero(), &Team::new(), &BTreeSet::new()).unwrap();
        assert_eq!(b, 2.5);
    }

    #[test]
    fn bound_drops_unreachable_bonus() {
        let out = BTreeSet::from([1]);
        let b = optimistic_bound(&two_hero(), &Team::new(), &out).unwrap();
        assert_eq!(b, 1.0);
    }

    #[test]
    fn bound_rejects_contradiction() {
        let t: Team = [0].into_iter().collect();
        assert!(matches!(
            optimistic_bound(&two_hero(), &t, &BTreeSet::from([0])),
            Err(Error::InvalidBranch(_))
        ));
        let big: Team = [0, 1].into_iter().collect();
        assert!(matches!(
            optimistic_bound(&two_hero().with_team_cap(1), &big, &BTreeSet::new()),
            Err(Error::InvalidBranch(_))
        ));
    }

    #[test]
    fn bnb_zero_cap() {
        let s = branch_and_bound(&two_hero().with_team_cap(0), &SearchOptions::default());
        assert!(s.team.is_empty());
        assert_eq!(s.objective, 0.0);
        assert!(s.proven_optimal);
    }

    #[test]
    fn bnb_matches_two_hero() {
        for workers in [1, 3] {
            let opts = SearchOptions { parallel_workers: workers, ..Default::default() };
            let s = branch_and_bound(&two_hero(), &opts);
            assert_eq!(s.team.to_vec(), vec![0, 1]);
            assert_eq!(s.objective, evaluate_team(&two_hero(), &s.team).unwrap().total);
        }
    }

    #[test]
    fn bnb_node_limit_reports_unproven() {
        let inst = plain(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0], 4);
        let opts = SearchOptions { node_limit: Some(1), ..Default::default() };
        let s = branch_and_bound(&inst, &opts);
        assert!(!s.proven_optimal);
        assert_eq!(s.objective, 26.0, "greedy seed is already optimal here");
    }
}
