//! Problem data: heroes, alliances, the sparse bonus tensor and the team cap.
//!
//! Heroes carry dense 0-based ids in file order and every downstream module
//! refers to heroes and alliances by id. Bonus values are stored sparsely,
//! keyed by `(hero, alliance, threshold)`; zero entries are never kept.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type HeroId = usize;
pub type AllianceId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Hero {
    pub id: HeroId,
    pub name: String,
    pub power: f64,
    pub alliances: BTreeSet<String>,
}

/// Percentage bonus rule. Once `threshold` members of `alliance` are on the
/// team, members receive `member_percent` of their own power and everybody
/// else receives `global_percent` of theirs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BonusRule {
    pub alliance: String,
    pub threshold: usize,
    pub member_percent: f64,
    #[serde(default)]
    pub global_percent: f64,
}

/// Index of one tensor cell, ordered `(hero, alliance, threshold)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BonusKey {
    pub hero: HeroId,
    pub alliance: AllianceId,
    pub threshold: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BonusTensorEntry {
    pub hero: HeroId,
    pub alliance: AllianceId,
    pub threshold: usize,
    pub value: f64,
}

impl BonusTensorEntry {
    pub fn key(&self) -> BonusKey {
        BonusKey {
            hero: self.hero,
            alliance: self.alliance,
            threshold: self.threshold,
        }
    }
}

/// A bonus as seen from its receiving hero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeroBonus {
    pub alliance: AllianceId,
    pub threshold: usize,
    pub value: f64,
}

/// The full problem datum. Immutable once built.
#[derive(Debug, Clone)]
pub struct Instance {
    heroes: Vec<Hero>,
    alliances: Vec<String>,
    members: Vec<Vec<HeroId>>,
    hero_alliances: Vec<Vec<AllianceId>>,
    bonuses: BTreeMap<BonusKey, f64>,
    hero_bonuses: Vec<Vec<HeroBonus>>,
    team_cap: usize,
    max_alliance_size: usize,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.heroes == other.heroes
            && self.alliances == other.alliances
            && self.bonuses == other.bonuses
            && self.team_cap == other.team_cap
            && self.max_alliance_size == other.max_alliance_size
    }
}

impl Instance {
    /// Assembles an instance without validating it. Membership is derived
    /// from the heroes' alliance names; names missing from `alliances` are
    /// reported by [`validate_instance`].
    pub fn from_parts(
        heroes: Vec<Hero>,
        alliances: Vec<String>,
        bonuses: BTreeMap<BonusKey, f64>,
        team_cap: usize,
        max_alliance_size: usize,
    ) -> Instance {
        let index: HashMap<&str, AllianceId> = alliances
            .iter()
            .enumerate()
            .map(|(j, a)| (a.as_str(), j))
            .collect();
        let mut members = vec![Vec::new(); alliances.len()];
        let mut hero_alliances = vec![Vec::new(); heroes.len()];
        for (i, hero) in heroes.iter().enumerate() {
            for name in &hero.alliances {
                if let Some(&j) = index.get(name.as_str()) {
                    members[j].push(i);
                    hero_alliances[i].push(j);
                }
            }
            hero_alliances[i].sort_unstable();
        }
        let mut hero_bonuses = vec![Vec::new(); heroes.len()];
        for (key, &value) in &bonuses {
            if let Some(list) = hero_bonuses.get_mut(key.hero) {
                list.push(HeroBonus {
                    alliance: key.alliance,
                    threshold: key.threshold,
                    value,
                });
            }
        }
        Instance {
            heroes,
            alliances,
            members,
            hero_alliances,
            bonuses,
            hero_bonuses,
            team_cap,
            max_alliance_size,
        }
    }

    /// Like [`Instance::from_parts`] but rejects instances with violations.
    pub fn new(
        heroes: Vec<Hero>,
        alliances: Vec<String>,
        bonuses: BTreeMap<BonusKey, f64>,
        team_cap: usize,
        max_alliance_size: usize,
    ) -> Result<Instance> {
        if heroes.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let inst = Self::from_parts(heroes, alliances, bonuses, team_cap, max_alliance_size);
        let violations = validate_instance(&inst);
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(Error::InvalidInstance(violations))
        }
    }

    /// Copy of this instance with a different team cap (0 allowed).
    pub fn with_team_cap(&self, team_cap: usize) -> Instance {
        let mut inst = self.clone();
        inst.team_cap = team_cap;
        inst
    }

    pub fn hero_count(&self) -> usize {
        self.heroes.len()
    }

    pub fn alliance_count(&self) -> usize {
        self.alliances.len()
    }

    pub fn heroes(&self) -> &[Hero] {
        &self.heroes
    }

    pub fn hero(&self, id: HeroId) -> Option<&Hero> {
        self.heroes.get(id)
    }

    pub fn hero_by_name(&self, name: &str) -> Option<&Hero> {
        self.heroes.iter().find(|h| h.name == name)
    }

    pub fn alliances(&self) -> &[String] {
        &self.alliances
    }

    pub fn alliance_id(&self, name: &str) -> Option<AllianceId> {
        self.alliances.iter().position(|a| a == name)
    }

    /// Members of alliance `j`, ascending by hero id.
    pub fn members(&self, j: AllianceId) -> &[HeroId] {
        &self.members[j]
    }

    /// Alliance ids of hero `i`, ascending.
    pub fn hero_alliances(&self, i: HeroId) -> &[AllianceId] {
        &self.hero_alliances[i]
    }

    /// a_ij of the membership matrix.
    pub fn is_member(&self, i: HeroId, j: AllianceId) -> bool {
        self.hero_alliances[i].binary_search(&j).is_ok()
    }

    pub fn bonuses(&self) -> &BTreeMap<BonusKey, f64> {
        &self.bonuses
    }

    pub fn entries(&self) -> impl Iterator<Item = BonusTensorEntry> + '_ {
        self.bonuses.iter().map(|(k, &value)| BonusTensorEntry {
            hero: k.hero,
            alliance: k.alliance,
            threshold: k.threshold,
            value,
        })
    }

    /// Tensor entries received by hero `i`, ordered by `(alliance, threshold)`.
    pub fn hero_bonuses(&self, i: HeroId) -> &[HeroBonus] {
        &self.hero_bonuses[i]
    }

    pub fn team_cap(&self) -> usize {
        self.team_cap
    }

    pub fn max_alliance_size(&self) -> usize {
        self.max_alliance_size
    }

    /// Column sums of the membership matrix.
    pub fn alliance_sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn total_power(&self) -> f64 {
        self.heroes.iter().map(|h| h.power).sum()
    }

    pub fn total_bonus(&self) -> f64 {
        self.bonuses.values().sum()
    }

    /// Serializes to the dataset JSON format. Bonuses are written as explicit
    /// entries, so reloading reproduces the same tensor.
    pub fn to_dataset(&self) -> DatasetFile {
        DatasetFile {
            team_cap: self.team_cap,
            max_alliance_size: Some(self.max_alliance_size),
            alliances: Some(self.alliances.clone()),
            heroes: self
                .heroes
                .iter()
                .map(|h| HeroRecord {
                    name: h.name.clone(),
                    power: h.power,
                    alliances: h.alliances.iter().cloned().collect(),
                })
                .collect(),
            bonus_rules: Vec::new(),
            bonus_entries: self
                .bonuses
                .iter()
                .map(|(k, &value)| EntryRecord {
                    hero: self.heroes[k.hero].name.clone(),
                    alliance: self.alliances[k.alliance].clone(),
                    threshold: k.threshold,
                    value,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_dataset()).expect("dataset serializes")
    }
}

// ---------------------------------------------------------------------------
// Dataset file

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub team_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_alliance_size: Option<usize>,
    /// Explicit alliance order. When absent, alliances are numbered by first
    /// appearance in the hero list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alliances: Option<Vec<String>>,
    pub heroes: Vec<HeroRecord>,
    #[serde(default)]
    pub bonus_rules: Vec<BonusRule>,
    #[serde(default)]
    pub bonus_entries: Vec<EntryRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeroRecord {
    pub name: String,
    pub power: f64,
    pub alliances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub hero: String,
    pub alliance: String,
    pub threshold: usize,
    pub value: f64,
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: DatasetFile = serde_json::from_str(text)?;
    instance_from_dataset(&file)
}

pub fn instance_from_dataset(file: &DatasetFile) -> Result<Instance> {
    if file.heroes.is_empty() {
        return Err(Error::EmptyInstance);
    }

    let mut seen = BTreeSet::new();
    for h in &file.heroes {
        if !seen.insert(h.name.as_str()) {
            return Err(Error::DuplicateHero(h.name.clone()));
        }
    }

    let alliances: Vec<String> = match &file.alliances {
        Some(list) => {
            let mut uniq = BTreeSet::new();
            for a in list {
                if !uniq.insert(a.as_str()) {
                    return Err(Error::format(format!("alliance `{a}` listed twice")));
                }
            }
            for h in &file.heroes {
                if let Some(a) = h.alliances.iter().find(|a| !uniq.contains(a.as_str())) {
                    return Err(Error::UnknownAlliance(a.clone()));
                }
            }
            list.clone()
        }
        None => {
            let mut order = Vec::new();
            let mut known = BTreeSet::new();
            for h in &file.heroes {
                for a in &h.alliances {
                    if known.insert(a.as_str()) {
                        order.push(a.clone());
                    }
                }
            }
            order
        }
    };

    let heroes: Vec<Hero> = file
        .heroes
        .iter()
        .enumerate()
        .map(|(id, h)| Hero {
            id,
            name: h.name.clone(),
            power: h.power,
            alliances: h.alliances.iter().cloned().collect(),
        })
        .collect();

    let mut observed = vec![0usize; alliances.len()];
    {
        let index: HashMap<&str, usize> = alliances
            .iter()
            .enumerate()
            .map(|(j, a)| (a.as_str(), j))
            .collect();
        for h in &heroes {
            for a in &h.alliances {
                observed[index[a.as_str()]] += 1;
            }
        }
    }
    let q = file
        .max_alliance_size
        .unwrap_or(0)
        .max(observed.iter().copied().max().unwrap_or(0))
        .max(1);

    let mut bonuses: BTreeMap<BonusKey, f64> = BTreeMap::new();
    for entry in compile_bonus_rules(&heroes, &alliances, &file.bonus_rules)? {
        *bonuses.entry(entry.key()).or_insert(0.0) += entry.value;
    }
    for rec in &file.bonus_entries {
        let hero = heroes
            .iter()
            .position(|h| h.name == rec.hero)
            .ok_or_else(|| Error::UnknownHero(rec.hero.clone()))?;
        let alliance = alliances
            .iter()
            .position(|a| *a == rec.alliance)
            .ok_or_else(|| Error::UnknownAlliance(rec.alliance.clone()))?;
        if rec.value < 0.0 || rec.value.is_nan() {
            return Err(Error::NegativeBonus {
                alliance: rec.alliance.clone(),
                value: rec.value,
            });
        }
        if rec.threshold == 0 {
            return Err(Error::format(format!(
                "bonus entry for `{}`/`{}` has threshold 0",
                rec.hero, rec.alliance
            )));
        }
        if rec.value == 0.0 {
            continue;
        }
        let key = BonusKey {
            hero,
            alliance,
            threshold: rec.threshold,
        };
        *bonuses.entry(key).or_insert(0.0) += rec.value;
    }

    Instance::new(heroes, alliances, bonuses, file.team_cap, q)
}

/// Expands percentage rules into tensor entries (`percent × power`).
/// Members get `member_percent`, non-members `global_percent`; zero values
/// are dropped. Output is sorted by `(hero, alliance, threshold)`.
pub fn compile_bonus_rules(
    heroes: &[Hero],
    alliances: &[String],
    rules: &[BonusRule],
) -> Result<Vec<BonusTensorEntry>> {
    let mut out = Vec::new();
    for rule in rules {
        let j = alliances
            .iter()
            .position(|a| *a == rule.alliance)
            .ok_or_else(|| Error::UnknownAlliance(rule.alliance.clone()))?;
        for pct in [rule.member_percent, rule.global_percent] {
            if pct < 0.0 || pct.is_nan() {
                return Err(Error::NegativeBonus {
                    alliance: rule.alliance.clone(),
                    value: pct,
                });
            }
        }
        if rule.threshold == 0 {
            return Err(Error::format(format!(
                "rule for `{}` has threshold 0",
                rule.alliance
            )));
        }
        for h in heroes {
            let pct = if h.alliances.contains(&rule.alliance) {
                rule.member_percent
            } else {
                rule.global_percent
            };
            let value = pct * h.power;
            if value > 0.0 {
                out.push(BonusTensorEntry {
                    hero: h.id,
                    alliance: j,
                    threshold: rule.threshold,
                    value,
                });
            }
        }
    }
    out.sort_by_key(|e| e.key());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NegativePower { hero: HeroId, power: f64 },
    NonContiguousId { index: usize, id: HeroId },
    DuplicateName { hero: HeroId, name: String },
    UnknownHeroAlliance { hero: HeroId, alliance: String },
    DuplicateAlliance { alliance: AllianceId },
    AllianceTooLarge { alliance: AllianceId, size: usize, q: usize },
    EntryOutOfRange { key: BonusKey },
    ZeroThreshold { key: BonusKey },
    ThresholdExceedsQ { key: BonusKey, q: usize },
    NonPositiveEntry { key: BonusKey, value: f64 },
    ZeroTeamCap,
    ZeroMaxAllianceSize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativePower { hero, power } => {
                write!(f, "hero {hero}: negative power {power}")
            }
            Violation::NonContiguousId { index, id } => {
                write!(f, "hero at position {index} has id {id}")
            }
            Violation::DuplicateName { hero, name } => {
                write!(f, "hero {hero}: duplicate name `{name}`")
            }
            Violation::UnknownHeroAlliance { hero, alliance } => {
                write!(f, "hero {hero}: alliance `{alliance}` is not declared")
            }
            Violation::DuplicateAlliance { alliance } => {
                write!(f, "alliance {alliance}: declared twice")
            }
            Violation::AllianceTooLarge { alliance, size, q } => {
                write!(f, "alliance {alliance}: {size} members exceed q={q}")
            }
            Violation::EntryOutOfRange { key } => {
                write!(f, "bonus ({}, {}, {}): index out of range", key.hero, key.alliance, key.threshold)
            }
            Violation::ZeroThreshold { key } => {
                write!(f, "bonus ({}, {}, 0): threshold must be positive", key.hero, key.alliance)
            }
            Violation::ThresholdExceedsQ { key, q } => write!(
                f,
                "bonus ({}, {}, {}): threshold exceeds q={q}",
                key.hero, key.alliance, key.threshold
            ),
            Violation::NonPositiveEntry { key, value } => write!(
                f,
                "bonus ({}, {}, {}): stored value {value} is not positive",
                key.hero, key.alliance, key.threshold
            ),
            Violation::ZeroTeamCap => write!(f, "team cap must be at least 1"),
            Violation::ZeroMaxAllianceSize => write!(f, "max alliance size must be at least 1"),
        }
    }
}

/// Checks every data invariant. An empty list means the instance is valid.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut names = HashMap::new();
    for (index, h) in inst.heroes.iter().enumerate() {
        if h.id != index {
            out.push(Violation::NonContiguousId { index, id: h.id });
        }
        if !h.power.is_finite() || h.power < 0.0 {
            out.push(Violation::NegativePower {
                hero: index,
                power: h.power,
            });
        }
        if names.insert(h.name.as_str(), index).is_some() {
            out.push(Violation::DuplicateName {
                hero: index,
                name: h.name.clone(),
            });
        }
        for a in &h.alliances {
            if !inst.alliances.contains(a) {
                out.push(Violation::UnknownHeroAlliance {
                    hero: index,
                    alliance: a.clone(),
                });
            }
        }
    }
    let mut seen = BTreeSet::new();
    for (j, a) in inst.alliances.iter().enumerate() {
        if !seen.insert(a) {
            out.push(Violation::DuplicateAlliance { alliance: j });
        }
    }
    let q = inst.max_alliance_size;
    if q == 0 {
        out.push(Violation::ZeroMaxAllianceSize);
    }
    for (j, m) in inst.members.iter().enumerate() {
        if m.len() > q {
            out.push(Violation::AllianceTooLarge {
                alliance: j,
                size: m.len(),
                q,
            });
        }
    }
    for (&key, &value) in &inst.bonuses {
        if key.hero >= inst.heroes.len() || key.alliance >= inst.alliances.len() {
            out.push(Violation::EntryOutOfRange { key });
        }
        if key.threshold == 0 {
            out.push(Violation::ZeroThreshold { key });
        } else if key.threshold > q {
            out.push(Violation::ThresholdExceedsQ { key, q });
        }
        if !value.is_finite() || value <= 0.0 {
            out.push(Violation::NonPositiveEntry { key, value });
        }
    }
    if inst.team_cap == 0 {
        out.push(Violation::ZeroTeamCap);
    }
    out
}
