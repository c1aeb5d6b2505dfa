//! Solver-agnostic binary program for team selection.
//!
//! Variables are `x_<hero>` (hero picked) and `I_<hero>_<alliance>_<k>`
//! (bonus active), one indicator per stored tensor entry. Rows:
//!
//! * `cap`: Σ x ≤ m
//! * `link_i_j_k`: Σ_{i' ∈ j} x_{i'} − M·I_ijk ≥ k − M
//! * `act_i_j_k`: I_ijk − x_i ≤ 0
//!
//! with M = q + 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::evaluator::{evaluate_team, Team};
use crate::instance::{BonusKey, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
        })
    }
}

/// `Σ coeff·var ⋈ rhs`; terms keyed by variable index.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: BTreeMap<usize, f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Maximization model over binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub variables: Vec<Variable>,
    pub objective: BTreeMap<usize, f64>,
    pub constraints: Vec<Constraint>,
    pub big_m: f64,
}

impl LinearModel {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn name_index(&self) -> HashMap<&str, usize> {
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect()
    }

    /// Number of rows that reference variable `idx`.
    pub fn occurrences(&self, idx: usize) -> usize {
        self.constraints
            .iter()
            .filter(|c| c.terms.contains_key(&idx))
            .count()
    }
}

pub fn hero_var(i: usize) -> String {
    format!("x_{i}")
}

pub fn indicator_var(key: &BonusKey) -> String {
    format!("I_{}_{}_{}", key.hero, key.alliance, key.threshold)
}

/// Values for every variable of a model, by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariableAssignment {
    pub values: BTreeMap<String, bool>,
}

impl VariableAssignment {
    pub fn zeros(model: &LinearModel) -> Self {
        VariableAssignment {
            values: model
                .variables
                .iter()
                .map(|v| (v.name.clone(), false))
                .collect(),
        }
    }

    pub fn set(&mut self, name: impl Into<String>, value: bool) {
        self.values.insert(name.into(), value);
    }

    fn dense(&self, model: &LinearModel) -> Result<Vec<f64>> {
        model
            .variables
            .iter()
            .map(|v| match self.values.get(&v.name) {
                Some(&b) => Ok(if b { 1.0 } else { 0.0 }),
                None => Err(Error::IncompleteAssignment(v.name.clone())),
            })
            .collect()
    }
}

pub fn build_model(instance: &Instance) -> Result<LinearModel> {
    let n = instance.hero_count();
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    let big_m = (instance.max_alliance_size() + 1) as f64;

    let mut variables: Vec<Variable> = (0..n)
        .map(|i| Variable {
            name: hero_var(i),
            kind: VarKind::Binary,
        })
        .collect();
    let mut objective: BTreeMap<usize, f64> =
        (0..n).map(|i| (i, instance.heroes()[i].power)).collect();

    let mut constraints = vec![Constraint {
        name: "cap".into(),
        terms: (0..n).map(|i| (i, 1.0)).collect(),
        relation: Relation::Le,
        rhs: instance.team_cap() as f64,
    }];

    for (key, &value) in instance.bonuses() {
        let idx = variables.len();
        variables.push(Variable {
            name: indicator_var(key),
            kind: VarKind::Binary,
        });
        objective.insert(idx, value);
        let tag = format!("{}_{}_{}", key.hero, key.alliance, key.threshold);

        let mut link: BTreeMap<usize, f64> = instance
            .members(key.alliance)
            .iter()
            .map(|&i| (i, 1.0))
            .collect();
        link.insert(idx, -big_m);
        constraints.push(Constraint {
            name: format!("link_{tag}"),
            terms: link,
            relation: Relation::Ge,
            rhs: key.threshold as f64 - big_m,
        });
        constraints.push(Constraint {
            name: format!("act_{tag}"),
            terms: BTreeMap::from([(key.hero, -1.0), (idx, 1.0)]),
            relation: Relation::Le,
            rhs: 0.0,
        });
    }

    Ok(LinearModel {
        variables,
        objective,
        constraints,
        big_m,
    })
}

/// Names of the rows violated by `assignment`.
pub fn check_feasible(model: &LinearModel, assignment: &VariableAssignment) -> Result<Vec<String>> {
    let x = assignment.dense(model)?;
    let mut violated = Vec::new();
    for c in &model.constraints {
        let lhs: f64 = c.terms.iter().map(|(&v, &a)| a * x[v]).sum();
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs + 1e-9,
            Relation::Ge => lhs >= c.rhs - 1e-9,
        };
        if !ok {
            violated.push(c.name.clone());
        }
    }
    Ok(violated)
}

pub fn objective_value(model: &LinearModel, assignment: &VariableAssignment) -> Result<f64> {
    let x = assignment.dense(model)?;
    Ok(model.objective.iter().map(|(&v, &c)| c * x[v]).sum())
}

/// `x = team` with every admissible indicator switched on.
pub fn greedy_assignment(
    instance: &Instance,
    model: &LinearModel,
    team: &Team,
) -> Result<VariableAssignment> {
    let eval = evaluate_team(instance, team)?;
    let mut a = VariableAssignment::zeros(model);
    for i in team.iter() {
        a.set(hero_var(i), true);
    }
    for (&i, bonuses) in &eval.per_hero {
        for b in bonuses {
            a.set(
                indicator_var(&BonusKey {
                    hero: i,
                    alliance: b.alliance,
                    threshold: b.threshold,
                }),
                true,
            );
        }
    }
    Ok(a)
}

/// Heroes with `x_i = 1`.
pub fn team_from_assignment(instance: &Instance, assignment: &VariableAssignment) -> Team {
    (0..instance.hero_count())
        .filter(|&i| assignment.values.get(&hero_var(i)).copied().unwrap_or(false))
        .collect()
}

// ---------------------------------------------------------------------------
// LP text format

fn write_terms(out: &mut String, model: &LinearModel, terms: &BTreeMap<usize, f64>) {
    for (n, (&v, &c)) in terms.iter().enumerate() {
        let name = &model.variables[v].name;
        if n == 0 {
            if c < 0.0 {
                let _ = write!(out, "- {} {name}", -c);
            } else {
                let _ = write!(out, "{c} {name}");
            }
        } else if c < 0.0 {
            let _ = write!(out, " - {} {name}", -c);
        } else {
            let _ = write!(out, " + {c} {name}");
        }
    }
    if terms.is_empty() {
        out.push('0');
    }
}

/// Writes the model in LP format. Variable order is the model order
/// (heroes by id, then indicators by `(hero, alliance, k)`).
pub fn export_lp(model: &LinearModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ big_M: {}", model.big_m);
    out.push_str("Maximize\n obj: ");
    write_terms(&mut out, model, &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}: ", c.name);
        write_terms(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.relation, c.rhs);
    }
    out.push_str("Binary\n");
    for v in &model.variables {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("End\n");
    out
}

fn lp_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        column: 0,
        message: message.into(),
    }
}

fn parse_terms(
    line_no: usize,
    text: &str,
    index: &HashMap<String, usize>,
) -> Result<BTreeMap<usize, f64>> {
    let mut terms = BTreeMap::new();
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens == ["0"] {
        return Ok(terms);
    }
    let mut i = 0;
    while i < tokens.len() {
        let mut sign = 1.0;
        if tokens[i] == "+" || tokens[i] == "-" {
            if tokens[i] == "-" {
                sign = -1.0;
            }
            i += 1;
        }
        let (coeff, name) = match (tokens.get(i), tokens.get(i + 1)) {
            (Some(c), Some(name)) if c.parse::<f64>().is_ok() => {
                i += 2;
                (c.parse::<f64>().unwrap(), *name)
            }
            (Some(name), _) => {
                i += 1;
                (1.0, *name)
            }
            _ => return Err(lp_err(line_no, "dangling sign in expression")),
        };
        let v = *index
            .get(name)
            .ok_or_else(|| lp_err(line_no, format!("undeclared variable `{name}`")))?;
        if terms.insert(v, sign * coeff).is_some() {
            return Err(lp_err(line_no, format!("variable `{name}` repeated")));
        }
    }
    Ok(terms)
}

/// Reads a model written by [`export_lp`].
pub fn import_lp(text: &str) -> Result<LinearModel> {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Rows,
        Binary,
        Done,
    }
    let mut section = Section::Preamble;
    let mut big_m = None;
    let mut objective_line: Option<(usize, String)> = None;
    let mut rows: Vec<(usize, String)> = Vec::new();
    let mut names: Vec<String> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('\\') {
            if let Some(v) = comment.trim().strip_prefix("big_M:") {
                big_m = Some(
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| lp_err(line_no, format!("bad big_M: {e}")))?,
                );
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        match line {
            "Maximize" if section == Section::Preamble => {
                section = Section::Objective;
                continue;
            }
            "Subject To" if section == Section::Objective => {
                section = Section::Rows;
                continue;
            }
            "Binary" if section == Section::Rows => {
                section = Section::Binary;
                continue;
            }
            "End" if section == Section::Binary => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => {
                if objective_line.is_some() {
                    return Err(lp_err(line_no, "objective spans several lines"));
                }
                objective_line = Some((line_no, line.to_string()));
            }
            Section::Rows => rows.push((line_no, line.to_string())),
            Section::Binary => names.push(line.to_string()),
            Section::Preamble => {
                return Err(lp_err(line_no, format!("expected `Maximize`, found `{line}`")))
            }
            Section::Done => return Err(lp_err(line_no, "content after `End`")),
        }
    }
    if section != Section::Done {
        return Err(lp_err(text.lines().count(), "missing section or `End`"));
    }
    let big_m = big_m.ok_or_else(|| lp_err(1, "missing `\\ big_M:` header"))?;

    let index: HashMap<String, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect();
    if index.len() != names.len() {
        return Err(lp_err(0, "duplicate variable in Binary section"));
    }

    let (obj_no, obj_text) = objective_line.ok_or_else(|| lp_err(0, "empty objective"))?;
    let obj_body = obj_text
        .split_once(':')
        .map(|(_, b)| b)
        .ok_or_else(|| lp_err(obj_no, "objective needs a label"))?;
    let objective = parse_terms(obj_no, obj_body, &index)?;

    let mut constraints = Vec::with_capacity(rows.len());
    for (line_no, row) in rows {
        let (name, body) = row
            .split_once(':')
            .ok_or_else(|| lp_err(line_no, "constraint needs a label"))?;
        let (expr, relation, rhs) = if let Some((e, r)) = body.split_once("<=") {
            (e, Relation::Le, r)
        } else if let Some((e, r)) = body.split_once(">=") {
            (e, Relation::Ge, r)
        } else {
            return Err(lp_err(line_no, "constraint has no relation"));
        };
        let rhs = rhs
            .trim()
            .parse::<f64>()
            .map_err(|e| lp_err(line_no, format!("bad right-hand side: {e}")))?;
        constraints.push(Constraint {
            name: name.trim().to_string(),
            terms: parse_terms(line_no, expr, &index)?,
            relation,
            rhs,
        });
    }

    Ok(LinearModel {
        variables: names
            .into_iter()
            .map(|name| Variable {
                name,
                kind: VarKind::Binary,
            })
            .collect(),
        objective,
        constraints,
        big_m,
    })
}
