//! Command-line front end: load and validate algebras and graphs, rebuild
//! algebras from atom graphs, enumerate states, emit built-in scenarios and
//! compute witness reports.
//!
//! Exit codes: 0 on success, 1 on domain-negative results (validation
//! failures, unrealizable graphs, missing states), 2 on errors.

use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use pba::json::{
    to_string_pretty, AlgebraJson, GraphJson, ProjectorSetJson, StateJson, ValidationReportJson,
    WeightsJson, WitnessReportJson,
};
use pba::quantum::{scenario_chsh, scenario_fig2, scenario_kcbs, QuantumSystem};
use pba::scenarios::{algebra_b1, algebra_b2};
use pba::state::{
    extend_state, has_ks_property, restrict_state, state_feasible, zero_one_states, AlgebraState,
    GraphState,
};
use pba::witness::{nc_inequality_report, WeightFunction};
use pba::{AtomGraph, PartialBooleanAlgebra, ReconstructionResult};

#[derive(Parser)]
#[command(
    name = "pba",
    version,
    about = "Partial Boolean algebras, atom graphs and contextuality witnesses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
    Projectors,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioName {
    Kcbs,
    Chsh,
    Fig2,
    B1,
    B2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Restrict,
    Extend,
}

#[derive(Subcommand)]
enum Command {
    /// Check an algebra against every axiom, including Boolean closure of
    /// all maximal compatible sets
    Validate {
        /// Algebra JSON (defaults to stdin)
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Element cap
        #[arg(long, default_value_t = pba::algebra::DEFAULT_ELEMENT_CAP)]
        cap: usize,
    },
    /// List the atoms of an algebra
    Atoms {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(short, long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Compute the atom graph of an algebra
    AtomGraph {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(short, long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Rebuild the unique exclusive algebra with the given atom graph, or
    /// report why none exists
    Reconstruct {
        /// Graph JSON (defaults to stdin)
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Candidate (clique, subset) pair cap
        #[arg(long, default_value_t = pba::reconstruct::RECONSTRUCT_PAIR_CAP)]
        cap: usize,
    },
    /// Enumerate 0-1 states, find a feasible state, or sample states
    States {
        /// Graph JSON (defaults to stdin)
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(short, long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Only enumerate 0-1 states
        #[arg(long)]
        zero_one: bool,
        /// Only solve for a feasible state
        #[arg(long)]
        feasible: bool,
        /// Emit N random states of the polytope
        #[arg(long)]
        sample: Option<usize>,
        /// Seed for --sample
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether a graph admits no 0-1 state (exit 0 yes, 1 no)
    KsCheck {
        #[arg(short, long)]
        input: Option<PathBuf>,
    },
    /// Independence number, Lovász number and fractional packing number
    Witness {
        /// Graph JSON (defaults to stdin)
        #[arg(long)]
        graph: Option<PathBuf>,
        /// `ones` or a weights JSON path
        #[arg(long, default_value = "ones")]
        weights: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(short, long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Emit a built-in scenario as algebra JSON (or projector JSON)
    Scenario {
        #[arg(value_enum)]
        name: ScenarioName,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(short, long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Move a state between an algebra and its atom graph
    StateTransfer {
        /// Algebra JSON
        #[arg(long)]
        algebra: PathBuf,
        /// State JSON (element values for restrict, atom values for extend)
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// State-identity tolerance
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
        }
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .context("reading stdin")?;
            Ok(buf)
        }
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_algebra(path: &Option<PathBuf>) -> Result<PartialBooleanAlgebra> {
    let text = read_input(path)?;
    let json: AlgebraJson = serde_json::from_str(&text).context("parsing algebra JSON")?;
    json.into_algebra().context("assembling algebra tables")
}

fn load_graph(path: &Option<PathBuf>) -> Result<AtomGraph> {
    let text = read_input(path)?;
    let json: GraphJson = serde_json::from_str(&text).context("parsing graph JSON")?;
    json.into_graph().context("assembling graph")
}

fn load_weights(spec: &str, graph: &AtomGraph) -> Result<WeightFunction> {
    if spec == "ones" {
        return Ok(WeightFunction::ones(graph.len()));
    }
    let text = std::fs::read_to_string(Path::new(spec))
        .with_context(|| format!("reading weights {spec}"))?;
    let json: WeightsJson = serde_json::from_str(&text).context("parsing weights JSON")?;
    let mut weights = vec![f64::NAN; graph.len()];
    for (name, w) in &json.weights {
        let v = graph
            .vertex(name)
            .with_context(|| format!("weights mention unknown vertex `{name}`"))?;
        weights[v] = *w;
    }
    if let Some(v) = weights.iter().position(|w| w.is_nan()) {
        bail!("weights missing vertex `{}`", graph.label(v));
    }
    WeightFunction::new(weights).context("weights must be nonnegative")
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Validate { input, output, cap } => {
            let algebra = load_algebra(&input)?;
            let report = algebra.validate(cap)?;
            let json = ValidationReportJson::from(&report);
            write_output(&output, &to_string_pretty(&json))?;
            Ok(if report.ok() { 0 } else { 1 })
        }
        Command::Atoms {
            input,
            output,
            format,
        } => {
            let algebra = load_algebra(&input)?;
            let atoms = algebra.atoms();
            let names: Vec<&str> = atoms.iter().map(|&a| algebra.label(a)).collect();
            let text = match format {
                Format::Json => to_string_pretty(&serde_json::json!({
                    "atoms": names,
                    "count": names.len(),
                })),
                Format::Table => {
                    let mut t = names.join("\n");
                    if !t.is_empty() {
                        t.push('\n');
                    }
                    t.push_str(&format!("{}\n", names.len()));
                    t
                }
                _ => bail!("atoms supports json or table output"),
            };
            write_output(&output, &text)?;
            Ok(0)
        }
        Command::AtomGraph {
            input,
            output,
            format,
        } => {
            let algebra = load_algebra(&input)?;
            let graph = algebra.atom_graph();
            let text = match format {
                Format::Json => to_string_pretty(&GraphJson::from(&graph)),
                Format::Dot => {
                    let cover = graph.maximal_cliques().ok();
                    graph.to_dot(cover.as_ref())
                }
                _ => bail!("atom-graph supports json or dot output"),
            };
            write_output(&output, &text)?;
            Ok(0)
        }
        Command::Reconstruct { input, output, cap } => {
            let graph = load_graph(&input)?;
            match pba::reconstruct::reconstruct_capped(&graph, cap)? {
                ReconstructionResult::Realizable { algebra, .. } => {
                    write_output(&output, &to_string_pretty(&AlgebraJson::from(&algebra)))?;
                    Ok(0)
                }
                ReconstructionResult::NotRealizable(reason) => {
                    eprintln!("not realizable: {reason}");
                    Ok(1)
                }
            }
        }
        Command::States {
            input,
            output,
            format,
            zero_one,
            feasible,
            sample,
            seed,
        } => {
            let graph = load_graph(&input)?;
            let want_zero_one = zero_one || (!feasible && sample.is_none());
            let want_feasible = feasible || (!zero_one && sample.is_none());

            let state_json = |s: &GraphState| {
                StateJson::from_values(
                    s.values
                        .iter()
                        .enumerate()
                        .map(|(v, &p)| (graph.label(v), p)),
                )
            };
            let mut body = serde_json::Map::new();
            let mut feasibility_negative = false;
            if want_zero_one {
                let states = zero_one_states(&graph)?;
                let list: Vec<StateJson> = states.iter().map(&state_json).collect();
                body.insert("zero_one_states".into(), serde_json::to_value(&list)?);
                body.insert("zero_one_count".into(), serde_json::json!(list.len()));
            }
            if want_feasible {
                let found = state_feasible(&graph)?;
                feasibility_negative = found.is_none();
                body.insert(
                    "feasible".into(),
                    match &found {
                        Some(s) => serde_json::to_value(state_json(s))?,
                        None => serde_json::Value::Null,
                    },
                );
            }
            if let Some(count) = sample {
                let mut rng = pba::sample::rng_from_seed(seed);
                let mut samples = Vec::with_capacity(count);
                for _ in 0..count {
                    match pba::sample::random_graph_state(&graph, &mut rng) {
                        Some(s) => samples.push(state_json(&s)),
                        None => {
                            feasibility_negative = true;
                            break;
                        }
                    }
                }
                body.insert("samples".into(), serde_json::to_value(&samples)?);
            }
            let text = match format {
                Format::Json => to_string_pretty(&serde_json::Value::Object(body)),
                Format::Table => states_table(&graph, &body),
                _ => bail!("states supports json or table output"),
            };
            write_output(&output, &text)?;
            Ok(if feasibility_negative { 1 } else { 0 })
        }
        Command::KsCheck { input } => {
            let graph = load_graph(&input)?;
            let ks = has_ks_property(&graph)?;
            println!("{ks}");
            Ok(if ks { 0 } else { 1 })
        }
        Command::Witness {
            graph,
            weights,
            output,
            format,
        } => {
            let graph = load_graph(&graph)?;
            let w = load_weights(&weights, &graph)?;
            let report = nc_inequality_report(&graph, &w)?;
            let json = WitnessReportJson::new(&graph, &report);
            let text = match format {
                Format::Json => to_string_pretty(&json),
                Format::Table => witness_table(&json),
                _ => bail!("witness supports json or table output"),
            };
            write_output(&output, &text)?;
            Ok(0)
        }
        Command::Scenario {
            name,
            output,
            format,
        } => {
            let system: Option<QuantumSystem> = match name {
                ScenarioName::Kcbs => Some(scenario_kcbs()),
                ScenarioName::Chsh => Some(scenario_chsh()),
                ScenarioName::Fig2 => Some(scenario_fig2()),
                ScenarioName::B1 | ScenarioName::B2 => None,
            };
            let text = match (&system, format) {
                (Some(sys), Format::Json) => {
                    for (a, b, d) in &sys.near_duplicates {
                        eprintln!("warning: generators `{a}` and `{b}` are {d:.3e} apart");
                    }
                    to_string_pretty(&AlgebraJson::from(&sys.algebra))
                }
                (Some(sys), Format::Projectors) => to_string_pretty(&ProjectorSetJson::from(sys)),
                (None, Format::Json) => {
                    let algebra = match name {
                        ScenarioName::B1 => algebra_b1(),
                        _ => algebra_b2(),
                    };
                    to_string_pretty(&AlgebraJson::from(&algebra))
                }
                (None, Format::Projectors) => bail!("table-level scenarios have no projectors"),
                _ => bail!("scenario supports json or projectors output"),
            };
            write_output(&output, &text)?;
            Ok(0)
        }
        Command::StateTransfer {
            algebra,
            state,
            direction,
            output,
            tolerance,
        } => {
            let alg = load_algebra(&Some(algebra))?;
            let text = std::fs::read_to_string(&state)
                .with_context(|| format!("reading {}", state.display()))?;
            let json: StateJson = serde_json::from_str(&text).context("parsing state JSON")?;
            let out = match direction {
                Direction::Restrict => {
                    let values = AlgebraState::from_labeled(&alg, &json.to_pairs())?;
                    let (ok, violations) = pba::state::is_state_with_tol(&alg, &values, tolerance);
                    if !ok {
                        bail!(
                            "input is not a state: {} on {}",
                            violations[0].condition,
                            violations[0].elements.join(",")
                        );
                    }
                    let graph_state = restrict_state(&alg, &AlgebraState { values })?;
                    let g = alg.atom_graph();
                    StateJson::from_values(
                        graph_state
                            .values
                            .iter()
                            .enumerate()
                            .map(|(v, &p)| (g.label(v), p)),
                    )
                }
                Direction::Extend => {
                    let g = alg.atom_graph();
                    let mut values = vec![f64::NAN; g.len()];
                    for (name, v) in &json.values {
                        let vertex = g
                            .vertex(name)
                            .with_context(|| format!("unknown atom `{name}`"))?;
                        values[vertex] = *v;
                    }
                    if let Some(v) = values.iter().position(|v| v.is_nan()) {
                        bail!("state missing atom `{}`", g.label(v));
                    }
                    let graph_state = GraphState::checked_with_tol(&g, values, tolerance)?;
                    let algebra_state = extend_state(&alg, &graph_state)?;
                    StateJson::from_values(
                        algebra_state
                            .values
                            .iter()
                            .enumerate()
                            .map(|(e, &p)| (alg.label(e), p)),
                    )
                }
            };
            write_output(&output, &to_string_pretty(&out))?;
            Ok(0)
        }
    }
}

fn states_table(graph: &AtomGraph, body: &serde_json::Map<String, serde_json::Value>) -> String {
    let mut out = String::new();
    let names: Vec<&str> = (0..graph.len()).map(|v| graph.label(v)).collect();
    out.push_str(&format!("vertices: {}\n", names.join(" ")));
    if let Some(serde_json::Value::Array(states)) = body.get("zero_one_states") {
        out.push_str(&format!("0-1 states: {}\n", states.len()));
        for s in states {
            if let Some(values) = s.get("values").and_then(|v| v.as_object()) {
                let row: Vec<String> = names
                    .iter()
                    .map(|n| format!("{}", values.get(*n).and_then(|v| v.as_f64()).unwrap_or(0.0)))
                    .collect();
                out.push_str(&format!("  {}\n", row.join(" ")));
            }
        }
    }
    if let Some(feasible) = body.get("feasible") {
        match feasible.as_object() {
            Some(obj) => {
                let values = obj.get("values").and_then(|v| v.as_object());
                let row: Vec<String> = names
                    .iter()
                    .map(|n| {
                        format!(
                            "{:.6}",
                            values
                                .and_then(|m| m.get(*n))
                                .and_then(|v| v.as_f64())
                                .unwrap_or(f64::NAN)
                        )
                    })
                    .collect();
                out.push_str(&format!("feasible: {}\n", row.join(" ")));
            }
            None => out.push_str("feasible: none\n"),
        }
    }
    out
}

fn witness_table(report: &WitnessReportJson) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "alpha      = {}  (set: {})\n",
        report.alpha,
        report.alpha_set.join(" ")
    ));
    out.push_str(&format!(
        "theta      = {}  (bracket [{}, {}], gap {:.3e})\n",
        report.theta, report.theta_lower, report.theta_upper, report.theta_gap
    ));
    out.push_str(&format!("alpha_star = {}\n", report.alpha_star));
    out.push_str(&format!(
        "gap_found  = {}  (alpha < theta - {})\n",
        report.gap_found, report.gap_tolerance
    ));
    out
}
