//! Command-line front end: list and inspect the built-in models, solve
//! equilibria, run the evaluation pipeline, export reachability graphs,
//! stationary distributions, sweeps, and seeded simulations.
//!
//! Exit codes: 0 success, 2 parse/lookup, 3 validation, 4 solver,
//! 5 numerical.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sgpn::analysis::{
    analyze, sweep, AnalysisInput, AnalysisOptions, AnalysisReport, PipelineError, SweepParameter,
};
use sgpn::catalog::{self, CatalogKey};
use sgpn::chain::{build_tpm, stationary_distribution, ChainError};
use sgpn::game::{solve_ne, EquilibriumError, StrategyPair};
use sgpn::model::{export_model, parse_model, ModelError};
use sgpn::net::NetDefinition;
use sgpn::reachability::{
    build_reachability, reduce_to_attack_defend, with_stage_rewards, ReachabilityGraph,
};
use sgpn::sim::{convergence_report, simulate, SimConfig, SimError};

const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_SOLVER: u8 = 4;
const EXIT_NUMERICAL: u8 = 5;

#[derive(Parser)]
#[command(
    name = "sgpn",
    version,
    about = "Stochastic game Petri net analysis for Mobile IP attack/defense models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct ModelArgs {
    /// Built-in model key (see `sgpn list`) or path to a model file.
    #[arg(long)]
    model: String,
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the strategy as `P_A,P_D` instead of solving the
    /// equilibrium.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<StrategyPair>,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in models.
    List {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Show one built-in model in full.
    Show {
        key: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Solve the mixed-strategy equilibrium of the model's reward table.
    Ne {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Run the full pipeline: equilibrium, reduction, reachability,
    /// stationary distribution, outcome report.
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
        /// Reachability node budget.
        #[arg(long, default_value_t = 4096)]
        max_nodes: usize,
    },
    /// Build the reachability graph and export it as a node/edge list.
    Reach {
        #[command(flatten)]
        model: ModelArgs,
        /// Reduce to the attack-defend skeleton first.
        #[arg(long)]
        reduced: bool,
        #[arg(long, default_value_t = 4096)]
        max_nodes: usize,
    },
    /// Compute the stationary distribution of the induced chain.
    Steady {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        reduced: bool,
        #[arg(long, default_value_t = 4096)]
        max_nodes: usize,
        /// Emit the transition probability matrix instead of the
        /// distribution.
        #[arg(long)]
        matrix: bool,
    },
    /// Sweep one strategy component over a grid and report outcomes.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Which component to sweep: p_attack or p_defend.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
    },
    /// Run seeded Monte Carlo and report outcome frequencies.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        reduced: bool,
        #[arg(long, default_value_t = 10_000)]
        runs: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_steps: u32,
        /// Sample exponential firing delays and report mean time to
        /// outcome.
        #[arg(long)]
        event_clock: bool,
        /// Comma-separated run counts; emits a convergence table instead
        /// of a single summary.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<u64>>,
    },
    /// Write a model in the canonical document form.
    Export {
        #[command(flatten)]
        model: ModelArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::Validation(_) => EXIT_VALIDATION,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<EquilibriumError> for Failure {
    fn from(e: EquilibriumError) -> Self {
        Failure::new(EXIT_SOLVER, e.to_string())
    }
}

impl From<ChainError> for Failure {
    fn from(e: ChainError) -> Self {
        Failure::new(EXIT_NUMERICAL, e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match &e {
            PipelineError::Equilibrium(_) => EXIT_SOLVER,
            PipelineError::Reduction(_) => EXIT_VALIDATION,
            PipelineError::Config(_) => EXIT_PARSE,
            PipelineError::Reachability(_)
            | PipelineError::Truncated { .. }
            | PipelineError::Chain(_) => EXIT_NUMERICAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let code = match &e {
            SimError::InvalidNet(_) | SimError::NoOutcomeTags => EXIT_VALIDATION,
            SimError::NoRuns => EXIT_PARSE,
            _ => EXIT_NUMERICAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<sgpn::reachability::ReachabilityError> for Failure {
    fn from(e: sgpn::reachability::ReachabilityError) -> Self {
        Failure::new(EXIT_NUMERICAL, e.to_string())
    }
}

impl From<sgpn::reachability::ReduceError> for Failure {
    fn from(e: sgpn::reachability::ReduceError) -> Self {
        Failure::new(EXIT_VALIDATION, e.to_string())
    }
}

fn parse_strategy(s: &str) -> Result<StrategyPair, String> {
    let (a, d) = s
        .split_once(',')
        .ok_or_else(|| "expected `P_A,P_D`".to_string())?;
    let p_attack: f64 = a.trim().parse().map_err(|e| format!("P_A: {e}"))?;
    let p_defend: f64 = d.trim().parse().map_err(|e| format!("P_D: {e}"))?;
    for p in [p_attack, p_defend] {
        if !(0.0..=1.0).contains(&p) {
            return Err(format!("probability {p} outside [0,1]"));
        }
    }
    Ok(StrategyPair::new(p_attack, p_defend))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::List { format } => cmd_list(format),
        Command::Show { key, format } => cmd_show(&key, format),
        Command::Ne { model } => cmd_ne(model),
        Command::Analyze { model, max_nodes } => cmd_analyze(model, max_nodes),
        Command::Reach {
            model,
            reduced,
            max_nodes,
        } => cmd_reach(model, reduced, max_nodes),
        Command::Steady {
            model,
            reduced,
            max_nodes,
            matrix,
        } => cmd_steady(model, reduced, max_nodes, matrix),
        Command::Sweep {
            model,
            param,
            from,
            to,
            step,
        } => cmd_sweep(model, &param, from, to, step),
        Command::Simulate {
            model,
            reduced,
            runs,
            seed,
            max_steps,
            event_clock,
            checkpoints,
        } => cmd_simulate(
            model,
            reduced,
            runs,
            seed,
            max_steps,
            event_clock,
            checkpoints,
        ),
        Command::Export { model } => cmd_export(model),
    }
}

/// Resolves `--model` as a catalog key first, then as a file path.
fn load_input(selector: &str) -> Result<AnalysisInput, Failure> {
    if let Ok(key) = CatalogKey::from_str(selector) {
        return Ok(catalog::load(key).into());
    }
    let path = PathBuf::from(selector);
    if !path.exists() {
        return Err(Failure::new(
            EXIT_PARSE,
            format!(
                "`{selector}` is neither a catalog key nor an existing file; valid keys: {}",
                CatalogKey::ALL.map(|k| k.as_str()).join(", ")
            ),
        ));
    }
    let text = fs::read_to_string(&path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    let parsed = parse_model(&text)?;
    Ok(AnalysisInput::from_parsed(selector, parsed))
}

/// Strategy for graph-level commands: the override, then the equilibrium,
/// then a neutral 0.5/0.5 mix (noted on stderr) for models without
/// rewards.
fn resolve_strategy(
    input: &AnalysisInput,
    requested: Option<StrategyPair>,
) -> Result<StrategyPair, Failure> {
    if let Some(s) = requested {
        return Ok(s);
    }
    match &input.rewards {
        Some(table) => Ok(solve_ne(table)?),
        None => {
            eprintln!(
                "note: model has no reward table; using neutral strategy 0.5,0.5 \
                 (pass --strategy to override)"
            );
            Ok(StrategyPair::new(0.5, 0.5))
        }
    }
}

fn emit(out: Option<PathBuf>, content: String) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(&path, content)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization");
    text.push('\n');
    text
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn cmd_list(format: Format) -> Result<(), Failure> {
    let entries = catalog::list();
    let content = match format {
        Format::Json => to_json(&entries),
        _ => {
            let mut text = String::new();
            for e in &entries {
                let _ = writeln!(text, "{:<22} {}", e.key.to_string(), e.title);
                let _ = writeln!(text, "{:<22} {}", "", e.summary);
            }
            text
        }
    };
    emit(None, content)
}

fn cmd_show(key: &str, format: Format) -> Result<(), Failure> {
    let entry = catalog::load_key(key).map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    let content = match format {
        Format::Json => to_json(&entry),
        _ => {
            let net = &entry.net;
            let mut text = String::new();
            let _ = writeln!(text, "{} — {}", entry.key, entry.title);
            let _ = writeln!(text, "{}", entry.summary);
            let _ = writeln!(text, "\nPlaces:");
            for p in net.places() {
                let tag = if p.tag == sgpn::net::StateTag::Plain {
                    String::new()
                } else {
                    format!(" [{}]", p.tag.name())
                };
                let _ = writeln!(text, "  {:<10}{tag:<18} {}", p.label, p.description);
            }
            let _ = writeln!(text, "\nTransitions:");
            for t in net.transitions() {
                let _ = writeln!(
                    text,
                    "  {:<34} owner={:<12} routing={:<5} {}",
                    t.label,
                    t.owner.to_string(),
                    t.routing_prob,
                    t.description
                );
            }
            let _ = writeln!(text, "\nArcs:");
            for a in net.arcs() {
                let name = |n: sgpn::net::Node| match n {
                    sgpn::net::Node::Place(p) => net.place(p).label.clone(),
                    sgpn::net::Node::Transition(t) => net.transition(t).label.clone(),
                };
                let _ = writeln!(text, "  {} -> {}", name(a.from), name(a.to));
            }
            let marked: Vec<String> = net
                .place_ids()
                .filter(|&p| net.initial_marking().count(p) > 0)
                .map(|p| format!("{} x{}", net.place(p).label, net.initial_marking().count(p)))
                .collect();
            let _ = writeln!(text, "\nInitial marking: {}", marked.join(", "));
            if let Some(table) = &entry.rewards {
                let _ = writeln!(text, "\nReward table (attacker / defender):");
                let _ = writeln!(
                    text,
                    "  attack+defend: {} / {}    attack+idle: {} / {}",
                    table.attacker[0][0],
                    table.defender[0][0],
                    table.attacker[0][1],
                    table.defender[0][1]
                );
                let _ = writeln!(
                    text,
                    "  hold+defend:   {} / {}    hold+idle:   {} / {}",
                    table.attacker[1][0],
                    table.defender[1][0],
                    table.attacker[1][1],
                    table.defender[1][1]
                );
            }
            let _ = writeln!(text, "\nProvenance:");
            for n in &entry.provenance {
                let _ = writeln!(text, "  [{:?}] {}", n.provenance, n.subject);
            }
            text
        }
    };
    emit(None, content)
}

fn cmd_ne(model: ModelArgs) -> Result<(), Failure> {
    let input = load_input(&model.model)?;
    let table = input.rewards.ok_or_else(|| {
        Failure::new(
            EXIT_PARSE,
            format!("model `{}` has no reward table; `ne` needs one", input.name),
        )
    })?;
    let ne = solve_ne(&table)?;
    let content = match model.format {
        Format::Json => to_json(&ne),
        _ => format!("P_A = {:.6}\nP_D = {:.6}\n", ne.p_attack, ne.p_defend),
    };
    emit(model.out, content)
}

fn render_analysis_text(report: &AnalysisReport) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "Model: {}", report.model);
    let source = if report.strategy_from_equilibrium {
        "equilibrium"
    } else {
        "supplied"
    };
    let _ = writeln!(
        text,
        "Strategy ({source}): P_A = {:.6}, P_D = {:.6}",
        report.strategy.p_attack, report.strategy.p_defend
    );
    if let Some((ra, rd)) = report.indifference_residuals {
        let _ = writeln!(text, "Indifference residuals: ({ra:.3e}, {rd:.3e})");
    }
    let _ = writeln!(
        text,
        "Reachability: {} nodes, {} edges",
        report.reach_nodes, report.reach_edges
    );
    let stationary: Vec<String> = report
        .stationary
        .iter()
        .map(|v| format!("{v:.6}"))
        .collect();
    let _ = writeln!(text, "Stationary distribution: [{}]", stationary.join(", "));
    let _ = writeln!(text, "Outcome distribution:");
    let _ = writeln!(text, "  no attack        {:.6}", report.outcome.no_attack);
    let _ = writeln!(
        text,
        "  attack succeeded {:.6}",
        report.outcome.attack_success
    );
    let _ = writeln!(
        text,
        "  attack defended  {:.6}",
        report.outcome.attack_defended
    );
    let _ = writeln!(
        text,
        "If the defender defends {:.2}% of the time, the probability of a successful attack is {:.2}%.",
        report.strategy.p_defend * 100.0,
        report.outcome.attack_success * 100.0
    );
    for w in &report.warnings {
        let _ = writeln!(text, "warning: {w}");
    }
    text
}

fn cmd_analyze(model: ModelArgs, max_nodes: usize) -> Result<(), Failure> {
    let input = load_input(&model.model)?;
    let options = AnalysisOptions {
        strategy: model.strategy,
        max_nodes,
    };
    let report = analyze(&input, &options)?;
    let content = match model.format {
        Format::Json => to_json(&report),
        _ => render_analysis_text(&report),
    };
    emit(model.out, content)
}

fn graph_for(
    input: &AnalysisInput,
    reduced: bool,
    strategy: &StrategyPair,
    max_nodes: usize,
) -> Result<(NetDefinition, ReachabilityGraph), Failure> {
    let net = if reduced {
        reduce_to_attack_defend(&input.net)?
    } else {
        input.net.clone()
    };
    let graph = build_reachability(&net, strategy, max_nodes)?;
    if graph.truncated {
        return Err(Failure::new(
            EXIT_NUMERICAL,
            format!("reachability graph truncated at {max_nodes} nodes; raise --max-nodes"),
        ));
    }
    Ok((net, graph))
}

fn marking_label(net: &NetDefinition, marking: &sgpn::net::Marking) -> String {
    let parts: Vec<String> = net
        .place_ids()
        .filter(|&p| marking.count(p) > 0)
        .map(|p| {
            let count = marking.count(p);
            if count == 1 {
                net.place(p).label.clone()
            } else {
                format!("{} x{count}", net.place(p).label)
            }
        })
        .collect();
    if parts.is_empty() {
        "(empty)".to_string()
    } else {
        parts.join(" + ")
    }
}

fn cmd_reach(model: ModelArgs, reduced: bool, max_nodes: usize) -> Result<(), Failure> {
    let input = load_input(&model.model)?;
    let strategy = resolve_strategy(&input, model.strategy)?;
    let (net, graph) = graph_for(&input, reduced, &strategy, max_nodes)?;

    let content = match model.format {
        Format::Json => {
            #[derive(serde::Serialize)]
            struct NodeDoc {
                index: usize,
                marking: String,
                terminal: bool,
            }
            #[derive(serde::Serialize)]
            struct EdgeDoc {
                src: usize,
                dst: usize,
                transition: String,
                probability: f64,
            }
            #[derive(serde::Serialize)]
            struct GraphDoc {
                model: String,
                strategy: StrategyPair,
                nodes: Vec<NodeDoc>,
                edges: Vec<EdgeDoc>,
            }
            to_json(&GraphDoc {
                model: input.name.clone(),
                strategy,
                nodes: graph
                    .nodes
                    .iter()
                    .enumerate()
                    .map(|(index, m)| NodeDoc {
                        index,
                        marking: marking_label(&net, m),
                        terminal: graph.terminal_nodes.contains(&index),
                    })
                    .collect(),
                edges: graph
                    .edges
                    .iter()
                    .map(|e| EdgeDoc {
                        src: e.src,
                        dst: e.dst,
                        transition: net.transition(e.transition).label.clone(),
                        probability: e.probability,
                    })
                    .collect(),
            })
        }
        Format::Csv => {
            let mut text = String::from("src,dst,transition,probability\n");
            for e in &graph.edges {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    e.src,
                    e.dst,
                    csv_escape(&net.transition(e.transition).label),
                    e.probability
                );
            }
            text
        }
        Format::Text => {
            let mut text = String::new();
            let _ = writeln!(
                text,
                "{} nodes, {} edges (P_A = {:.6}, P_D = {:.6})",
                graph.node_count(),
                graph.edge_count(),
                strategy.p_attack,
                strategy.p_defend
            );
            for (i, m) in graph.nodes.iter().enumerate() {
                let terminal = if graph.terminal_nodes.contains(&i) {
                    " (terminal)"
                } else {
                    ""
                };
                let _ = writeln!(text, "node {i}: {}{terminal}", marking_label(&net, m));
                for e in graph.outgoing(i) {
                    let _ = writeln!(
                        text,
                        "  --[{} @ {:.6}]--> node {}",
                        net.transition(e.transition).label,
                        e.probability,
                        e.dst
                    );
                }
            }
            text
        }
    };
    emit(model.out, content)
}

fn cmd_steady(
    model: ModelArgs,
    reduced: bool,
    max_nodes: usize,
    matrix: bool,
) -> Result<(), Failure> {
    let input = load_input(&model.model)?;
    let strategy = resolve_strategy(&input, model.strategy)?;
    let (net, graph) = graph_for(&input, reduced, &strategy, max_nodes)?;
    let tpm = build_tpm(&graph);

    if matrix {
        let content = match model.format {
            Format::Json => to_json(&tpm),
            _ => {
                let mut text = String::new();
                let header: Vec<String> = (0..tpm.dim()).map(|j| format!("to_{j}")).collect();
                let _ = writeln!(text, "from,{}", header.join(","));
                for i in 0..tpm.dim() {
                    let row: Vec<String> = tpm.row(i).iter().map(|p| format!("{p}")).collect();
                    let _ = writeln!(text, "{i},{}", row.join(","));
                }
                text
            }
        };
        return emit(model.out, content);
    }

    let stationary = stationary_distribution(&tpm)?;
    let content = match model.format {
        Format::Json => {
            #[derive(serde::Serialize)]
            struct SteadyDoc {
                model: String,
                strategy: StrategyPair,
                nodes: Vec<String>,
                stationary: Vec<f64>,
            }
            to_json(&SteadyDoc {
                model: input.name.clone(),
                strategy,
                nodes: graph.nodes.iter().map(|m| marking_label(&net, m)).collect(),
                stationary: stationary.as_slice().to_vec(),
            })
        }
        Format::Csv => {
            let mut text = String::from("node,probability\n");
            for (i, p) in stationary.as_slice().iter().enumerate() {
                let _ = writeln!(text, "{},{}", i, p);
            }
            text
        }
        Format::Text => {
            let mut text = String::new();
            for (i, m) in graph.nodes.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "{:.6}  node {i}: {}",
                    stationary[i],
                    marking_label(&net, m)
                );
            }
            text
        }
    };
    emit(model.out, content)
}

fn cmd_sweep(model: ModelArgs, param: &str, from: f64, to: f64, step: f64) -> Result<(), Failure> {
    let input = load_input(&model.model)?;
    let parameter = SweepParameter::from_str(param).map_err(|e| Failure::new(EXIT_PARSE, e))?;
    let options = AnalysisOptions {
        strategy: model.strategy,
        ..Default::default()
    };
    let rows = sweep(&input, parameter, from, to, step, &options)?;
    let content = match model.format {
        Format::Json => to_json(&rows),
        _ => {
            let mut text = String::from("param,value,no_attack,success,defended\n");
            for r in &rows {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{}",
                    r.param, r.value, r.no_attack, r.success, r.defended
                );
            }
            text
        }
    };
    emit(model.out, content)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    model: ModelArgs,
    reduced: bool,
    runs: u64,
    seed: u64,
    max_steps: u32,
    event_clock: bool,
    checkpoints: Option<Vec<u64>>,
) -> Result<(), Failure> {
    let input = load_input(&model.model)?;
    let strategy = resolve_strategy(&input, model.strategy)?;
    let net = if reduced {
        let skeleton = reduce_to_attack_defend(&input.net)?;
        match &input.rewards {
            Some(table) => with_stage_rewards(&skeleton, table),
            None => skeleton,
        }
    } else {
        input.net.clone()
    };

    if let Some(checkpoints) = checkpoints {
        let rows = convergence_report(&net, &strategy, &checkpoints, seed)?;
        let content = match model.format {
            Format::Json => to_json(&rows),
            _ => {
                let mut text = String::from("runs,empirical_success,analytic_success,abs_error\n");
                for r in &rows {
                    let _ = writeln!(
                        text,
                        "{},{},{},{}",
                        r.runs, r.empirical_success, r.analytic_success, r.abs_error
                    );
                }
                text
            }
        };
        return emit(model.out, content);
    }

    let mut cfg = SimConfig::new(runs, seed, strategy);
    cfg.max_steps = max_steps;
    cfg.event_clock = event_clock;
    let result = simulate(&net, &cfg)?;
    let content = match model.format {
        Format::Json => to_json(&result),
        _ => {
            let mut text = String::new();
            let _ = writeln!(
                text,
                "{} runs (seed {seed}, P_A = {:.6}, P_D = {:.6})",
                result.runs, strategy.p_attack, strategy.p_defend
            );
            let _ = writeln!(
                text,
                "  no attack        {:>10}  ({:.6})",
                result.no_attack_count, result.no_attack_frequency
            );
            let _ = writeln!(
                text,
                "  attack succeeded {:>10}  ({:.6})",
                result.attack_success_count, result.attack_success_frequency
            );
            let _ = writeln!(
                text,
                "  attack defended  {:>10}  ({:.6})",
                result.attack_defended_count, result.attack_defended_frequency
            );
            let _ = writeln!(text, "  truncated        {:>10}", result.truncated_runs);
            let rewards: Vec<String> = result
                .mean_rewards
                .iter()
                .map(|r| format!("{r:.6}"))
                .collect();
            let _ = writeln!(text, "Mean rewards per run: [{}]", rewards.join(", "));
            let _ = writeln!(text, "Mean steps per run: {:.3}", result.mean_steps);
            if let Some(t) = result.mean_time_to_outcome {
                let _ = writeln!(text, "Mean time to outcome: {t:.6}");
            }
            text
        }
    };
    emit(model.out, content)
}

fn cmd_export(model: ModelArgs) -> Result<(), Failure> {
    let input = load_input(&model.model)?;
    let content = export_model(&input.net, input.rewards.as_ref(), input.discount);
    emit(model.out, content)
}
