//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 exploration or synthesis
//! failure, 3 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use petri_control::classify::{forbidden_closure, Classification, ForbiddenSpec};
use petri_control::io::condition::{format_condition, parse_conditions};
use petri_control::io::dot::to_dot;
use petri_control::io::netfile::parse_net;
use petri_control::io::report::{build_report, classification_summary, graph_summary, to_json};
use petri_control::net::PetriNet;
use petri_control::reach::{build_reach_graph, ExplorationLimits, ReachGraph};
use petri_control::synth::{synthesize_all, Method, SynthesisOptions};
use petri_control::verify::{check_maximal_permissive, Controller, VerificationReport};

#[derive(Parser)]
#[command(name = "petri-control", version, about = "Forbidden-state controller synthesis for Petri nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the reachability graph and list its states.
    Reach(Common),
    /// Label admissible, forbidden and border states.
    Classify(Common),
    /// Synthesize and verify a controller.
    Synth(SynthArgs),
    /// Check a controller for maximal permissiveness.
    Verify(VerifyArgs),
    /// Write the classified reachability graph in DOT format.
    ExportDot(DotArgs),
}

#[derive(Args)]
struct Common {
    /// Net description file.
    #[arg(long)]
    net: PathBuf,
    /// Abort exploration beyond this many states.
    #[arg(long, default_value_t = ExplorationLimits::default().max_states)]
    max_states: usize,
    /// Abort exploration when a place exceeds this many tokens.
    #[arg(long)]
    max_tokens: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Disable,
    Enable,
    Both,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    /// Use exact minimum cover where the table is small enough.
    #[arg(long)]
    exact_cover: bool,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the classified graph in DOT format here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Condition file; the synthesized controller is used when omitted.
    #[arg(long)]
    controller: Option<PathBuf>,
}

#[derive(Args)]
struct DotArgs {
    #[command(flatten)]
    common: Common,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| failed(format!("{}: {e}", path.display())))
}

impl Common {
    fn limits(&self) -> ExplorationLimits {
        ExplorationLimits { max_states: self.max_states, max_tokens_per_place: self.max_tokens }
    }

    fn load(&self) -> Result<(PetriNet, ForbiddenSpec), Failure> {
        let text = read(&self.net)?;
        parse_net(&text).map_err(|e| usage(format!("{}: {e}", self.net.display())))
    }

    fn graph(&self, net: &PetriNet) -> Result<ReachGraph, Failure> {
        build_reach_graph(net, self.limits()).map_err(|e| failed(e.to_string()))
    }
}

fn classify(net: &PetriNet, g: &ReachGraph, spec: &ForbiddenSpec) -> Result<Classification, Failure> {
    forbidden_closure(g, net, spec).map_err(|e| failed(e.to_string()))
}

fn print_verification(v: &VerificationReport, net: &PetriNet) {
    println!(
        "verification: {} ({} controlled states, {} expected)",
        if v.pass { "PASS" } else { "FAIL" },
        v.controlled_states,
        v.expected_states
    );
    for m in &v.unexpected {
        println!("  unexpected state {}", net.format_marking(m));
    }
    for m in &v.missing {
        println!("  missing state {}", net.format_marking(m));
    }
    for d in &v.divergences {
        println!(
            "  divergence at {} on {}: controller {:?}, oracle {:?}",
            net.format_marking(&d.state),
            net.transition_name(d.transition),
            d.controller,
            d.oracle
        );
    }
    if let Some(e) = &v.exploration_error {
        println!("  exploration error: {e}");
    }
    for m in &v.induced_blocking {
        eprintln!("warning: controller deadlocks at admissible state {}", net.format_marking(m));
    }
}

fn reach(args: Common) -> Result<(), Failure> {
    let (net, _) = args.load()?;
    let g = args.graph(&net)?;
    println!("{} states, {} edges", g.len(), g.edges().len());
    for (n, m) in g.nodes().iter().enumerate() {
        let mark = if n == g.initial() { " (initial)" } else { "" };
        println!("  {}{mark}", net.format_marking(m));
    }
    Ok(())
}

fn classify_cmd(args: Common) -> Result<(), Failure> {
    let (net, spec) = args.load()?;
    let g = args.graph(&net)?;
    let cls = classify(&net, &g, &spec)?;
    let summary = classification_summary(&net, &g, &cls);
    println!("{} states", graph_summary(&net, &g).states);
    for (title, list) in [
        ("admissible", &summary.admissible),
        ("forbidden", &summary.forbidden),
        ("border", &summary.border),
    ] {
        println!("{title} ({}): {}", list.len(), list.join(" "));
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), Failure> {
    let (net, spec) = args.common.load()?;
    let g = args.common.graph(&net)?;
    let cls = classify(&net, &g, &spec)?;
    let options = SynthesisOptions {
        method: match args.method {
            MethodArg::Disable => Method::Disable,
            MethodArg::Enable => Method::Enable,
            MethodArg::Both => Method::Both,
        },
        exact_cover: args.exact_cover,
        ..SynthesisOptions::default()
    };
    let result = synthesize_all(&net, &g, &cls, &options).map_err(|e| failed(e.to_string()))?;
    for ts in &result.transitions {
        let Some(chosen) = ts.condition() else { continue };
        println!("{}", format_condition(&net, chosen));
        for alt in [&ts.primal, &ts.dual].into_iter().flatten() {
            if alt.condition.polarity != chosen.polarity {
                println!("  alternative: {}", format_condition(&net, &alt.condition));
            }
        }
    }
    let controller = result.controller(&net).map_err(|e| failed(e.to_string()))?;
    let verification = check_maximal_permissive(&net, &controller, &g, &cls, args.common.limits());
    print_verification(&verification, &net);
    if let Some(path) = &args.report {
        write(path, &to_json(&build_report(&net, &g, &cls, &options, &result, &verification)))?;
    }
    if let Some(path) = &args.dot {
        write(path, &to_dot(&net, &g, Some(&cls)))?;
    }
    if verification.pass {
        Ok(())
    } else {
        Err(Failure { code: 3, message: "controller is not maximally permissive".into() })
    }
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let (net, spec) = args.common.load()?;
    let g = args.common.graph(&net)?;
    let cls = classify(&net, &g, &spec)?;
    let controller = match &args.controller {
        Some(path) => {
            let text = read(path)?;
            let conds =
                parse_conditions(&net, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Controller::new(&net, conds).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => synthesize_all(&net, &g, &cls, &SynthesisOptions::default())
            .and_then(|r| r.controller(&net))
            .map_err(|e| failed(e.to_string()))?,
    };
    let verification = check_maximal_permissive(&net, &controller, &g, &cls, args.common.limits());
    print_verification(&verification, &net);
    if verification.pass {
        Ok(())
    } else {
        Err(Failure { code: 3, message: "controller is not maximally permissive".into() })
    }
}

fn export_dot(args: DotArgs) -> Result<(), Failure> {
    let (net, spec) = args.common.load()?;
    let g = args.common.graph(&net)?;
    let cls = classify(&net, &g, &spec)?;
    let dot = to_dot(&net, &g, Some(&cls));
    match &args.out {
        Some(path) => write(path, &dot),
        None => {
            print!("{dot}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Reach(a) => reach(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Synth(a) => synth(a),
        Command::Verify(a) => verify(a),
        Command::ExportDot(a) => export_dot(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
