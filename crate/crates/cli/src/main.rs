use std::collections::BTreeSet;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ord2factor::lattice::{default_concept_cap, enumerate_concepts_capped};
use ord2factor::oracle::brute_force_min_removal_counted;
use ord2factor::{
    build_incompatibility_graph, parse_cxt, render, two_dimension_extension, two_factorize, Biplot, BiplotError,
    ContextError, FactorError, FactorizationResult, FormalContext, IncidencePair, MaximalError, Mode, Poset,
    ReductionError, SolverOptions,
};

#[derive(Parser)]
#[command(name = "ord2factor", version, about = "Ordinal two-factorizations of formal contexts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether the incompatibility graph is bipartite
    Check(Input),
    /// Exact two-factorization; fails when none exists
    Factorize(Input),
    /// Maximal two-factorization of any context
    Maximal {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        solver: Solver,
    },
    /// Render the biplot of a maximal factorization
    Biplot {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        solver: Solver,
        #[arg(long, default_value = "svg")]
        format: String,
        /// Write the drawing here instead of into the report
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extend a poset (JSON) to dimension at most two
    Dim2ext {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        solver: Solver,
    },
    /// Minimum removal by exhaustive search
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
    },
    /// Concept counts of a context and its complement
    Stats(Input),
}

#[derive(Args)]
struct Input {
    /// `.cxt` or JSON file; standard input when absent or `-`
    input: Option<PathBuf>,
}

#[derive(Args)]
struct Solver {
    #[arg(long, default_value = "exact")]
    mode: Mode,
    /// Wall-clock limit in seconds
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Solver {
    fn options(&self) -> Result<SolverOptions, Failure> {
        let budget = match self.budget {
            Some(b) => Some(
                Duration::try_from_secs_f64(b).map_err(|e| Failure::usage(format!("invalid --budget: {e}")))?,
            ),
            None => None,
        };
        Ok(SolverOptions { mode: self.mode, budget, seed: self.seed })
    }
}

struct Failure {
    code: &'static str,
    message: String,
    exit: u8,
}

impl Failure {
    fn usage(message: String) -> Self {
        Self { code: "Usage", message, exit: 2 }
    }
}

impl From<ContextError> for Failure {
    fn from(e: ContextError) -> Self {
        Self { code: "ParseError", message: e.to_string(), exit: 2 }
    }
}

impl From<FactorError> for Failure {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::NotTwoFactorizable(_) => Self { code: "NotTwoFactorizable", message: e.to_string(), exit: 1 },
            FactorError::InvalidFactorization(_) => Self { code: "Internal", message: e.to_string(), exit: 1 },
            FactorError::Context(c) => c.into(),
        }
    }
}

impl From<MaximalError> for Failure {
    fn from(e: MaximalError) -> Self {
        match e {
            MaximalError::BudgetExceeded => Self { code: "BudgetExceeded", message: e.to_string(), exit: 3 },
            MaximalError::Factor(f) => f.into(),
            MaximalError::Internal(_) => Self { code: "Internal", message: e.to_string(), exit: 1 },
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::NotAPartialOrder(_) | ReductionError::Json(_) => {
                Self { code: "ParseError", message: e.to_string(), exit: 2 }
            }
            ReductionError::Maximal(m) => m.into(),
            ReductionError::Context(c) => c.into(),
            ReductionError::Internal(_) => Self { code: "Internal", message: e.to_string(), exit: 1 },
        }
    }
}

impl From<BiplotError> for Failure {
    fn from(e: BiplotError) -> Self {
        match e {
            BiplotError::UnsupportedFormat(_) => Self::usage(e.to_string()),
            _ => Self { code: "Internal", message: e.to_string(), exit: 1 },
        }
    }
}

fn read_input(input: &Input) -> Result<String, Failure> {
    let mut text = String::new();
    match &input.input {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Failure { code: "NotFound", message: format!("{}: {e}", p.display()), exit: 1 })?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure { code: "NotFound", message: format!("stdin: {e}"), exit: 1 })?;
        }
    }
    Ok(text)
}

fn load_context(text: &str) -> Result<FormalContext, Failure> {
    if text.trim_start().starts_with('{') {
        Ok(FormalContext::from_json(text)?)
    } else {
        Ok(parse_cxt(text)?)
    }
}

fn pair_json(ctx: &FormalContext, p: &IncidencePair) -> Value {
    let (g, m) = ctx.pair_names(*p);
    json!([g, m])
}

fn pairs_json<'a>(ctx: &FormalContext, pairs: impl IntoIterator<Item = &'a IncidencePair>) -> Value {
    Value::Array(pairs.into_iter().map(|p| pair_json(ctx, p)).collect())
}

fn factorization_json(ctx: &FormalContext, r: &FactorizationResult) -> Value {
    json!({
        "factor1": pairs_json(ctx, r.f1.pairs()),
        "factor2": pairs_json(ctx, r.f2.pairs()),
        "shared": pairs_json(ctx, &r.shared),
        "removed": pairs_json(ctx, &r.removed),
    })
}

fn run(command: &Command, text: &str) -> Result<Value, Failure> {
    match command {
        Command::Check(_) => {
            let ctx = load_context(text)?;
            let graph = build_incompatibility_graph(&ctx);
            let witness = graph.bipartition();
            Ok(json!({
                "bipartite": witness.is_bipartite(),
                "components": graph.components().len(),
                "isolated": pairs_json(&ctx, &graph.isolated_pairs()),
                "odd_cycle": witness.odd_cycle().map(|c| pairs_json(&ctx, c)),
            }))
        }
        Command::Factorize(_) => {
            let ctx = load_context(text)?;
            let r = ord2factor::canonical_partition(&ctx, &two_factorize(&ctx)?)?;
            Ok(factorization_json(&ctx, &r))
        }
        Command::Maximal { solver, .. } => {
            let ctx = load_context(text)?;
            let options = solver.options()?;
            let r = ord2factor::ord2factor(&ctx, &options)?;
            let mut payload = factorization_json(&ctx, &r);
            payload["certificate"] = json!(r.certificate);
            payload["rounds"] = json!(r.rounds);
            payload["mode"] = json!(options.mode.to_string());
            Ok(payload)
        }
        Command::Biplot { solver, format, out, .. } => {
            let format = format.parse::<ord2factor::Format>()?;
            let ctx = load_context(text)?;
            let r = ord2factor::ord2factor(&ctx, &solver.options()?)?;
            let plot = Biplot::new(&ctx, &r)?;
            let drawing = render(&plot, format);
            let points: Vec<Value> = (0..ctx.n_objects())
                .map(|g| {
                    let (x, y) = plot.coordinates(g);
                    json!([ctx.objects()[g], x, y])
                })
                .collect();
            let mut payload = json!({
                "axis1": plot.horizontal.labels,
                "axis2": plot.vertical.labels,
                "points": points,
                "removed": pairs_json(&ctx, &r.removed),
            });
            match out {
                Some(path) => {
                    std::fs::write(path, &drawing).map_err(|e| Failure {
                        code: "NotFound",
                        message: format!("{}: {e}", path.display()),
                        exit: 1,
                    })?;
                    payload["out"] = json!(path.display().to_string());
                }
                None => payload["drawing"] = json!(drawing),
            }
            Ok(payload)
        }
        Command::Dim2ext { solver, .. } => {
            let p = Poset::from_json(text)?;
            let ext = two_dimension_extension(&p, &solver.options()?)?;
            let names = |seq: &[usize]| seq.iter().map(|&a| p.elements()[a].clone()).collect::<Vec<_>>();
            let added: BTreeSet<(usize, usize)> = ext
                .extension
                .strict_pairs()
                .into_iter()
                .filter(|&(a, b)| !p.leq(a, b))
                .collect();
            let added: Vec<Value> =
                added.iter().map(|&(a, b)| json!([p.elements()[a], p.elements()[b]])).collect();
            Ok(json!({
                "added": ext.added,
                "added_pairs": added,
                "realizer": [names(&ext.realizer[0]), names(&ext.realizer[1])],
                "removed": ext.removed,
                "certificate": ext.certificate,
            }))
        }
        Command::Oracle { kmax, .. } => {
            let ctx = load_context(text)?;
            let (k, tests) = brute_force_min_removal_counted(&ctx, *kmax);
            Ok(json!({ "kmax": kmax, "min_removal": k, "tests": tests }))
        }
        Command::Stats(_) => {
            let ctx = load_context(text)?;
            let concepts = enumerate_concepts_capped(&ctx, None).map_err(FactorError::from)?.len();
            let complement = enumerate_concepts_capped(&ctx.complement(), None).map_err(FactorError::from)?.len();
            let cap = default_concept_cap(&ctx);
            Ok(json!({
                "objects": ctx.n_objects(),
                "attributes": ctx.n_attributes(),
                "incidences": ctx.incidence_count(),
                "concepts": concepts,
                "complement_concepts": complement,
                "complement_cap": cap,
                "complement_within_cap": complement <= cap,
            }))
        }
    }
}

fn name(command: &Command) -> &'static str {
    match command {
        Command::Check(_) => "check",
        Command::Factorize(_) => "factorize",
        Command::Maximal { .. } => "maximal",
        Command::Biplot { .. } => "biplot",
        Command::Dim2ext { .. } => "dim2ext",
        Command::Oracle { .. } => "oracle",
        Command::Stats(_) => "stats",
    }
}

fn input_of(command: &Command) -> &Input {
    match command {
        Command::Check(i) | Command::Factorize(i) | Command::Stats(i) => i,
        Command::Maximal { input, .. }
        | Command::Biplot { input, .. }
        | Command::Dim2ext { input, .. }
        | Command::Oracle { input, .. } => input,
    }
}

fn report(command: &str, digest: Option<String>, start: Instant, outcome: Result<Value, Failure>) -> (Value, u8) {
    let mut r = json!({
        "command": command,
        "input_digest": digest,
        "elapsed_ms": start.elapsed().as_millis() as u64,
    });
    let exit = match outcome {
        Ok(payload) => {
            r["payload"] = payload;
            r["status"] = json!("ok");
            0
        }
        Err(f) => {
            r["payload"] = Value::Null;
            r["status"] = json!("error");
            r["error"] = json!({ "code": f.code, "message": f.message });
            f.exit
        }
    };
    (r, exit)
}

fn emit(r: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(r).expect("report serializes");
    // a closed pipe is not worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("{e}");
            let (r, exit) = report("", None, start, Err(Failure::usage(e.kind().to_string())));
            emit(&r);
            return ExitCode::from(exit);
        }
    };
    let command = name(&cli.command);
    let (r, exit) = match read_input(input_of(&cli.command)) {
        Ok(text) => {
            let digest = hex::encode(Sha256::digest(text.as_bytes()));
            report(command, Some(digest), start, run(&cli.command, &text))
        }
        Err(f) => report(command, None, start, Err(f)),
    };
    emit(&r);
    ExitCode::from(exit)
}
