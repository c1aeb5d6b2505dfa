//! Command implementations behind the `underlords` binary.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 bad input data,
//! 3 a guard or search limit stopped the run.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use underlords::evaluator::format_value;
use underlords::random::random_instance;
use underlords::reductions::{
    du_to_mewc_basic, du_to_mewc_general, du_to_mewc_pairs, dks_to_du, parse_edge_list, DksInstance,
};
use underlords::solver::DEFAULT_SUBSET_GUARD;
use underlords::{
    branch_and_bound, brute_force, build_model, check_decision, evaluate_team, export_lp,
    load_instance, render_breakdown, Evaluation, Instance, SearchOptions, Solution, Team,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_LIMIT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "underlords", version, about = "Team selection for auto-chess drafts")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Seed for commands that generate random cases.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for branch-and-bound.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// Wall-clock limit for a search, in seconds.
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,
    /// Node limit for a search.
    #[arg(long, global = true)]
    pub node_limit: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    Lp,
    DotBasic,
    DotPairs,
    DotGeneral,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find the best team for a dataset.
    Solve {
        data: PathBuf,
        /// Override the dataset's team cap.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Score a team given by hero names.
    Evaluate {
        data: PathBuf,
        #[arg(required = true)]
        heroes: Vec<String>,
        /// Also answer whether the team strictly beats this value.
        #[arg(long)]
        bound: Option<f64>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Write the integer program or a clique reduction graph.
    Export {
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = ExportKind::Lp)]
        kind: ExportKind,
        /// Alliance size for `dot-general`.
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long)]
        cap: Option<usize>,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-check branch-and-bound against brute force on random cases.
    Verify {
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Turn a densest-k-subgraph instance into a team-selection dataset.
    ReduceDks {
        /// Edge list, one `u v` pair per line.
        edges: PathBuf,
        #[arg(long)]
        k: usize,
        /// Vertex count when isolated vertices are not listed.
        #[arg(long)]
        vertices: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        base_power: f64,
        #[arg(long, default_value_t = 1.0)]
        edge_bonus: f64,
    },
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<StoppedEarly>() {
            return EXIT_LIMIT;
        }
        if let Some(e) = cause.downcast_ref::<underlords::Error>() {
            return match e {
                underlords::Error::TooLarge(_) => EXIT_LIMIT,
                _ => EXIT_DATA,
            };
        }
    }
    EXIT_DATA
}

/// Returned when a limit interrupts the search; the incumbent is still printed.
#[derive(Debug)]
pub struct StoppedEarly {
    pub nodes: u64,
}

impl std::fmt::Display for StoppedEarly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "search stopped by a limit after {} nodes; the team shown is not proven optimal", self.nodes)
    }
}

impl std::error::Error for StoppedEarly {}

pub fn search_options(cli: &Cli) -> SearchOptions {
    SearchOptions {
        time_limit: cli.time_limit.map(Duration::from_secs_f64),
        node_limit: cli.node_limit,
        parallel_workers: cli.workers.max(1),
    }
}

fn load(path: &Path, cap: Option<usize>) -> anyhow::Result<Instance> {
    let inst = load_instance(path)?;
    Ok(match cap {
        Some(m) => inst.with_team_cap(m),
        None => inst,
    })
}

#[derive(Debug, Serialize)]
pub struct BonusJson {
    pub alliance: String,
    pub threshold: usize,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct HeroJson {
    pub hero: String,
    pub power: f64,
    pub bonuses: Vec<BonusJson>,
    pub contribution: f64,
    pub sum: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveJson {
    pub team: Vec<String>,
    pub objective: f64,
    pub proven_optimal: bool,
    pub breakdown: Vec<HeroJson>,
    pub nodes: u64,
    pub wall_time: f64,
}

pub fn breakdown_json(inst: &Instance, eval: &Evaluation) -> Vec<HeroJson> {
    let mut rows: Vec<HeroJson> = eval
        .per_hero
        .iter()
        .map(|(&i, bonuses)| {
            let hero = &inst.heroes()[i];
            let contribution = eval.hero_bonus(i);
            HeroJson {
                hero: hero.name.clone(),
                power: hero.power,
                bonuses: bonuses
                    .iter()
                    .map(|b| BonusJson {
                        alliance: inst.alliances()[b.alliance].clone(),
                        threshold: b.threshold,
                        value: b.value,
                    })
                    .collect(),
                contribution,
                sum: hero.power + contribution,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.hero.cmp(&b.hero));
    rows
}

fn team_names(inst: &Instance, team: &Team) -> Vec<String> {
    let mut names: Vec<String> = team.iter().map(|i| inst.heroes()[i].name.clone()).collect();
    names.sort();
    names
}

pub fn solve_report(inst: &Instance, s: &Solution, format: Format) -> anyhow::Result<String> {
    let eval = evaluate_team(inst, &s.team)?;
    Ok(match format {
        Format::Json => {
            let out = SolveJson {
                team: team_names(inst, &s.team),
                objective: s.objective,
                proven_optimal: s.proven_optimal,
                breakdown: breakdown_json(inst, &eval),
                nodes: s.nodes_explored,
                wall_time: s.wall_time.as_secs_f64(),
            };
            serde_json::to_string_pretty(&out)? + "\n"
        }
        Format::Table => {
            let mut text = render_breakdown(inst, &eval);
            let _ = writeln!(
                text,
                "\nobjective {} ({}), {} nodes in {:.3}s",
                format_value(s.objective),
                if s.proven_optimal { "proven optimal" } else { "not proven optimal" },
                s.nodes_explored,
                s.wall_time.as_secs_f64()
            );
            text
        }
    })
}

fn solve(cli: &Cli, data: &Path, cap: Option<usize>, out: &mut dyn Write) -> anyhow::Result<u8> {
    let inst = load(data, cap)?;
    let s = branch_and_bound(&inst, &search_options(cli));
    out.write_all(solve_report(&inst, &s, cli.format)?.as_bytes())?;
    if !s.proven_optimal {
        return Err(StoppedEarly { nodes: s.nodes_explored }.into());
    }
    Ok(EXIT_OK)
}

fn evaluate(
    cli: &Cli,
    data: &Path,
    heroes: &[String],
    bound: Option<f64>,
    cap: Option<usize>,
    out: &mut dyn Write,
) -> anyhow::Result<u8> {
    let inst = load(data, cap)?;
    let team = match Team::from_names(&inst, heroes) {
        Ok(t) => t,
        Err(unknown) => bail!(underlords::Error::UnknownHero(unknown.join(", "))),
    };
    let eval = evaluate_team(&inst, &team)?;
    let beats = bound.map(|b| check_decision(&inst, &team, b)).transpose()?;
    match cli.format {
        Format::Json => {
            #[derive(Serialize)]
            struct EvalJson {
                team: Vec<String>,
                objective: f64,
                breakdown: Vec<HeroJson>,
                #[serde(skip_serializing_if = "Option::is_none")]
                exceeds_bound: Option<bool>,
            }
            let j = EvalJson {
                team: team_names(&inst, &team),
                objective: eval.total,
                breakdown: breakdown_json(&inst, &eval),
                exceeds_bound: beats,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&j)?)?;
        }
        Format::Table => {
            out.write_all(render_breakdown(&inst, &eval).as_bytes())?;
            if let (Some(b), Some(yes)) = (bound, beats) {
                writeln!(out, "\nexceeds {}: {}", format_value(b), if yes { "yes" } else { "no" })?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Text of an export, as written to disk or stdout.
pub fn export_text(inst: &Instance, kind: ExportKind, q: usize) -> anyhow::Result<String> {
    Ok(match kind {
        ExportKind::Lp => export_lp(&build_model(inst)?),
        ExportKind::DotBasic => du_to_mewc_basic(inst)?.to_dot(),
        ExportKind::DotPairs => du_to_mewc_pairs(inst)?.to_dot(),
        ExportKind::DotGeneral => du_to_mewc_general(inst, q)?.to_dot(),
    })
}

fn export(data: &Path, kind: ExportKind, q: usize, cap: Option<usize>, output: Option<&Path>, out: &mut dyn Write) -> anyhow::Result<u8> {
    let text = export_text(&load(data, cap)?, kind, q)?;
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

/// A case where the solver under test disagreed with brute force.
#[derive(Debug, Clone)]
pub struct Mismatch {
    pub seed: u64,
    pub case: usize,
    pub instance: Instance,
    pub expected: (Vec<usize>, f64),
    pub got: (Vec<usize>, f64),
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub cases: usize,
    pub mismatches: Vec<Mismatch>,
    pub elapsed: Duration,
}

/// The random instance used for case `case` of a run seeded with `seed`.
pub fn verify_case(seed: u64, case: usize) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ case as u64);
    let n = rng.random_range(1..=12);
    let m = rng.random_range(1..=5);
    random_instance(&mut rng, n, m)
}

/// Runs `solver` on `cases` seeded instances (n ≤ 12, m ≤ 5) and compares
/// objective and team with exhaustive enumeration.
pub fn run_verify<F>(seed: u64, cases: usize, options: &SearchOptions, solver: F) -> anyhow::Result<VerifyReport>
where
    F: Fn(&Instance, &SearchOptions) -> Solution,
{
    let start = Instant::now();
    let mut report = VerifyReport { cases, ..Default::default() };
    for case in 0..cases {
        let inst = verify_case(seed, case);
        let oracle = brute_force(&inst, DEFAULT_SUBSET_GUARD)?;
        let got = solver(&inst, options);
        if got.objective != oracle.objective || got.team != oracle.team || !got.proven_optimal {
            report.mismatches.push(Mismatch {
                seed,
                case,
                instance: inst,
                expected: (oracle.team.to_vec(), oracle.objective),
                got: (got.team.to_vec(), got.objective),
            });
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

fn verify(cli: &Cli, cases: usize, out: &mut dyn Write) -> anyhow::Result<u8> {
    let report = run_verify(cli.seed, cases, &search_options(cli), branch_and_bound)?;
    write_verify(&report, cli.format, out)?;
    Ok(if report.mismatches.is_empty() { EXIT_OK } else { EXIT_MISMATCH })
}

pub fn write_verify(report: &VerifyReport, format: Format, out: &mut dyn Write) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            let mism: Vec<serde_json::Value> = report
                .mismatches
                .iter()
                .map(|m| {
                    serde_json::json!({
                        "seed": m.seed,
                        "case": m.case,
                        "expected": {"team": m.expected.0, "objective": m.expected.1},
                        "got": {"team": m.got.0, "objective": m.got.1},
                        "instance": m.instance.to_dataset(),
                    })
                })
                .collect();
            let j = serde_json::json!({
                "cases": report.cases,
                "passed": report.cases - report.mismatches.len(),
                "mismatches": mism,
                "wall_time": report.elapsed.as_secs_f64(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&j)?)?;
        }
        Format::Table => {
            for m in &report.mismatches {
                writeln!(
                    out,
                    "MISMATCH seed {} case {}: expected {:?} = {}, got {:?} = {}",
                    m.seed, m.case, m.expected.0, m.expected.1, m.got.0, m.got.1
                )?;
                writeln!(out, "reproducer:\n{}", m.instance.to_json())?;
            }
            writeln!(
                out,
                "{}/{} cases agree with brute force in {:.3}s",
                report.cases - report.mismatches.len(),
                report.cases,
                report.elapsed.as_secs_f64()
            )?;
        }
    }
    Ok(())
}

fn reduce_dks(
    edges: &Path,
    k: usize,
    vertices: Option<usize>,
    base_power: f64,
    edge_bonus: f64,
    out: &mut dyn Write,
) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(edges).map_err(|source| underlords::Error::Io {
        path: edges.display().to_string(),
        source,
    })?;
    let graph = parse_edge_list(&text, vertices)?;
    let inst = dks_to_du(&DksInstance { graph, k }, base_power, edge_bonus)?;
    out.write_all(inst.to_json().as_bytes())?;
    writeln!(out)?;
    Ok(EXIT_OK)
}

/// Runs a parsed command line, writing results to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Solve { data, cap } => solve(cli, data, *cap, out),
        Command::Evaluate { data, heroes, bound, cap } => evaluate(cli, data, heroes, *bound, *cap, out),
        Command::Export { data, kind, q, cap, output } => export(data, *kind, *q, *cap, output.as_deref(), out),
        Command::Verify { cases } => verify(cli, *cases, out),
        Command::ReduceDks { edges, k, vertices, base_power, edge_bonus } => {
            reduce_dks(edges, *k, *vertices, *base_power, *edge_bonus, out)
        }
    }
}
