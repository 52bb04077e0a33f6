//! Command-line front end: every subcommand prints one JSON document.
//!
//! Exit codes: 0 success or "yes", 1 "no", 2 usage or input error,
//! 3 size guard exceeded or no exact algorithm under `--exact-only`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use seqalloc::oracle::{self, OracleConfig, DEFAULT_GUARD};
use seqalloc::reductions::{self, Certificate, GadgetInstance, Sidecar, TopKMode, Witness};
use seqalloc::solvers::{self, SolveOptions};
use seqalloc::{
    simulate, Allocation, DecisionAnswer, DecisionProblem, Direction, Error, Instance, Mode, Objective, Policy,
    PolicyClass, PreferenceProfile, WelfareReport,
};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser)]
#[command(name = "seqalloc", version, about = "Welfare questions for sequential allocation of indivisible goods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OracleArgs {
    /// Refuse to enumerate policies when no polynomial algorithm applies
    #[arg(long)]
    exact_only: bool,
    /// Maximum number of policies the oracle may enumerate
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: u64,
    /// Oracle worker threads
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
}

impl OracleArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            oracle: OracleConfig {
                guard: self.guard,
                jobs: self.jobs as usize,
            },
            exact_only: self.exact_only,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run sincere picking under a policy
    Simulate {
        #[arg(short, long)]
        instance: PathBuf,
        /// Comma-separated 1-based agents, or compact digits such as 1221
        #[arg(short, long)]
        policy: String,
    },
    /// Optimal welfare over a policy class
    Solve {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long)]
        class: PolicyClass,
        #[arg(long)]
        objective: Objective,
        #[arg(long)]
        direction: Direction,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Possible or necessary welfare threshold query
    Decide {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long)]
        class: PolicyClass,
        #[arg(long)]
        objective: Objective,
        #[arg(long)]
        mode: Mode,
        #[arg(short, long, allow_negative_numbers = true)]
        threshold: i64,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// List the policies of a class with their outcomes
    Enumerate {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long)]
        class: PolicyClass,
        /// Print at most this many policies
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u64,
    },
    /// Exact welfare distribution of the balanced alternating lottery
    Distribution {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long)]
        objective: Objective,
        #[arg(short, long, allow_negative_numbers = true)]
        threshold: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u64,
    },
    /// Monte Carlo estimate of P(welfare >= t) under the balanced alternating lottery
    Sample {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(long)]
        objective: Objective,
        #[arg(short, long, allow_negative_numbers = true)]
        threshold: i64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Build a hardness gadget
    Generate {
        #[command(subcommand)]
        gadget: GadgetCommand,
        /// Write PREFIX.json (instance) and PREFIX.gadget.json (query and certificate)
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Check a policy or certificate against a gadget
    Verify {
        /// Gadget document (PREFIX.gadget.json or the output of `generate`)
        #[arg(short, long)]
        gadget: PathBuf,
        /// Policy, JSON certificate, or @FILE holding either
        #[arg(short, long)]
        witness: String,
    },
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Numerical 3-dimensional matching
    #[command(name = "3dm")]
    ThreeDm {
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<u64>,
        #[arg(short, long)]
        t: u64,
        /// Number of items (default 2n)
        #[arg(long)]
        items: Option<usize>,
    },
    /// Partition over recursively balanced policies
    Partition {
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<u64>,
    },
    /// Equal-size partition over balanced policies
    Equipartition {
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<u64>,
    },
    /// Top-k possible/necessary set problem
    Topk {
        /// 1-based rankings separated by ';', e.g. "1,2,3,4;2,1,4,3"
        #[arg(long)]
        profile: String,
        #[arg(short, long)]
        k: usize,
        #[arg(long)]
        mode: TopKMode,
        #[arg(long)]
        class: PolicyClass,
    },
}

/// Failure of a command, with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GuardExceeded { .. } | Error::NoExactAlgorithm(_) => EXIT_GUARD,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type Outcome = std::result::Result<(i32, Value), Failure>;

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandResult {
                    exit_code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandResult {
                    exit_code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(cli.command) {
        Ok((exit_code, doc)) => CommandResult {
            exit_code,
            stdout: serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n",
            stderr: String::new(),
        },
        Err(f) => CommandResult {
            exit_code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> std::result::Result<Instance, Failure> {
    Instance::from_json(&read_text(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// Restricted classes run on the instance padded with dummy items.
fn for_class(inst: Instance, class: PolicyClass) -> Instance {
    if class.is_restricted() {
        inst.pad_to_multiple()
    } else {
        inst
    }
}

fn welfare_json(w: &WelfareReport) -> Value {
    json!({
        "per_agent": w.per_agent,
        "utilitarian": w.utilitarian,
        "egalitarian": w.egalitarian,
    })
}

/// Re-simulates a policy that is about to be reported.
fn audit(inst: &Instance, policy: &Policy) -> std::result::Result<(Allocation, WelfareReport), Failure> {
    let alloc = simulate(inst, policy)?;
    let w = inst.welfare(&alloc);
    Ok((alloc, w))
}

fn verification_failure(message: String) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("internal verification failed: {message}"),
    }
}

fn execute(command: Command) -> Outcome {
    match command {
        Command::Simulate { instance, policy } => cmd_simulate(&instance, &policy),
        Command::Solve {
            instance,
            class,
            objective,
            direction,
            oracle,
        } => cmd_solve(&instance, class, objective, direction, &oracle),
        Command::Decide {
            instance,
            class,
            objective,
            mode,
            threshold,
            oracle,
        } => {
            let q = DecisionProblem {
                objective,
                mode,
                threshold,
                class,
            };
            cmd_decide(&instance, &q, &oracle)
        }
        Command::Enumerate {
            instance,
            class,
            limit,
            guard,
        } => cmd_enumerate(&instance, class, limit, guard),
        Command::Distribution {
            instance,
            objective,
            threshold,
            guard,
        } => cmd_distribution(&instance, objective, threshold, guard),
        Command::Sample {
            instance,
            objective,
            threshold,
            samples,
            seed,
        } => {
            let inst = load_instance(&instance)?;
            let est = oracle::monte_carlo_ba(&inst, objective, threshold, samples, seed)?;
            Ok((
                EXIT_YES,
                json!({
                    "objective": objective,
                    "threshold": threshold,
                    "class": PolicyClass::BalancedAlternating.to_string(),
                    "estimate": est.estimate,
                    "successes": est.successes,
                    "samples": est.samples,
                    "ci_lower": est.ci_lower,
                    "ci_upper": est.ci_upper,
                    "seed": est.seed,
                }),
            ))
        }
        Command::Generate { gadget, output } => cmd_generate(gadget, output.as_deref()),
        Command::Verify { gadget, witness } => cmd_verify(&gadget, &witness),
    }
}

fn cmd_simulate(path: &Path, text: &str) -> Outcome {
    let inst = load_instance(path)?;
    let policy = Policy::parse(text, inst.n_agents())?;
    // policies printed for restricted classes cover the padded instance
    let inst = if policy.len() != inst.n_items() && policy.len() == inst.pad_to_multiple().n_items() {
        inst.pad_to_multiple()
    } else {
        inst
    };
    let (alloc, w) = audit(&inst, &policy)?;
    Ok((
        EXIT_YES,
        json!({
            "policy": policy.to_string(),
            "classes": policy.classes(inst.n_agents()).iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "allocation": alloc.to_json(&inst),
            "welfare": welfare_json(&w),
        }),
    ))
}

fn cmd_solve(path: &Path, class: PolicyClass, objective: Objective, direction: Direction, args: &OracleArgs) -> Outcome {
    let inst = for_class(load_instance(path)?, class);
    let r = solvers::solve(&inst, class, objective, direction, &args.options())?;
    let (alloc, w) = audit(&inst, &r.witness)?;
    if w.get(objective) != r.value || !r.witness.belongs_to(class, inst.n_agents()) {
        return Err(verification_failure(format!("policy {} does not attain {}", r.witness, r.value)));
    }
    Ok((
        EXIT_YES,
        json!({
            "value": r.value,
            "policy": r.witness.to_string(),
            "method": r.method,
            "class": class.to_string(),
            "objective": objective,
            "direction": direction,
            "allocation": alloc.to_json(&inst),
            "welfare": welfare_json(&w),
        }),
    ))
}

fn cmd_decide(path: &Path, q: &DecisionProblem, args: &OracleArgs) -> Outcome {
    let inst = load_instance(path)?;
    let DecisionAnswer { answer, witness, method } = solvers::decide(&inst, q, &args.options())?;
    let inst = for_class(inst, q.class);
    let mut doc = json!({
        "answer": answer,
        "witness": witness.as_ref().map(|p| p.to_string()),
        "method": method,
        "query": q,
    });
    if let Some(p) = &witness {
        let (alloc, w) = audit(&inst, p)?;
        let reaches = w.get(q.objective) as i128 >= q.threshold as i128;
        // a Possible witness must reach the threshold, a Necessary one must miss it
        if reaches != (q.mode == Mode::Possible) || !p.belongs_to(q.class, inst.n_agents()) {
            return Err(verification_failure(format!("witness {p} does not support the answer")));
        }
        doc["allocation"] = alloc.to_json(&inst);
        doc["welfare"] = welfare_json(&w);
    }
    Ok((if answer { EXIT_YES } else { EXIT_NO }, doc))
}

fn cmd_enumerate(path: &Path, class: PolicyClass, limit: Option<usize>, guard: u64) -> Outcome {
    let inst = for_class(load_instance(path)?, class);
    let (n, m) = (inst.n_agents(), inst.n_items());
    let policies = oracle::enumerate_policies(class, n, m, guard)?;
    let listed: Vec<Value> = policies
        .take(limit.unwrap_or(usize::MAX))
        .map(|p| {
            let (alloc, w) = audit(&inst, &p)?;
            Ok(json!({
                "policy": p.to_string(),
                "allocation": alloc.to_json(&inst),
                "welfare": welfare_json(&w),
            }))
        })
        .collect::<std::result::Result<_, Failure>>()?;
    Ok((
        EXIT_YES,
        json!({
            "class": class.to_string(),
            "total": oracle::class_size(class, n, m).map(|s| s.to_string()),
            "listed": listed.len(),
            "policies": listed,
        }),
    ))
}

fn cmd_distribution(path: &Path, objective: Objective, threshold: Option<i64>, guard: u64) -> Outcome {
    let inst = load_instance(path)?;
    let d = oracle::ba_welfare_distribution(&inst, objective, guard)?;
    let entries: serde_json::Map<String, Value> = d.entries.iter().map(|(v, c)| (v.to_string(), json!(c))).collect();
    let mut doc = json!({
        "objective": objective,
        "class": d.class.to_string(),
        "total": d.total,
        "entries": entries,
        "min": d.min(),
        "max": d.max(),
        "mean": d.mean(),
    });
    if let Some(t) = threshold {
        doc["threshold"] = json!(t);
        doc["prob_at_least"] = json!(d.prob_at_least(t));
    }
    Ok((EXIT_YES, doc))
}

fn build_gadget(cmd: GadgetCommand) -> std::result::Result<GadgetInstance, Failure> {
    Ok(match cmd {
        GadgetCommand::ThreeDm { x, y, z, t, items } => {
            reductions::gen_numerical_3dm(&x, &y, &z, t, items.unwrap_or(2 * x.len()))?
        }
        GadgetCommand::Partition { a } => reductions::gen_partition_rb(&a)?,
        GadgetCommand::Equipartition { a } => reductions::gen_equipartition_balanced(&a)?,
        GadgetCommand::Topk { profile, k, mode, class } => {
            let rankings = profile
                .split(';')
                .map(|r| {
                    r.split(',')
                        .map(|j| match j.trim().parse::<usize>() {
                            Ok(j) if j >= 1 => Ok(j - 1),
                            _ => Err(input_error(format!("profile: bad item index {j:?}"))),
                        })
                        .collect()
                })
                .collect::<std::result::Result<Vec<Vec<usize>>, Failure>>()?;
            reductions::topk_welfare_transform(&PreferenceProfile::from_rankings(rankings)?, k, mode, class)?
        }
    })
}

fn cmd_generate(cmd: GadgetCommand, output: Option<&Path>) -> Outcome {
    let g = build_gadget(cmd)?;
    let instance_doc = serde_json::to_value(g.instance.to_file()).expect("instance files serialize");
    let sidecar = serde_json::to_value(g.sidecar()).expect("sidecars serialize");
    let Some(prefix) = output else {
        return Ok((EXIT_YES, json!({ "instance": instance_doc, "gadget": sidecar })));
    };
    let instance_file = prefix.with_extension("json");
    let gadget_file = prefix.with_extension("gadget.json");
    for (file, doc) in [(&instance_file, &instance_doc), (&gadget_file, &sidecar)] {
        let text = serde_json::to_string_pretty(doc).expect("JSON values serialize") + "\n";
        fs::write(file, text).map_err(|e| input_error(format!("{}: {e}", file.display())))?;
    }
    Ok((
        EXIT_YES,
        json!({
            "instance_file": instance_file.display().to_string(),
            "gadget_file": gadget_file.display().to_string(),
            "query": g.query,
            "certificate": g.certificate,
        }),
    ))
}

fn cmd_verify(path: &Path, witness: &str) -> Outcome {
    let doc: Value = serde_json::from_str(&read_text(path)?)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let doc = doc.get("gadget").cloned().unwrap_or(doc);
    let sidecar: Sidecar =
        serde_json::from_value(doc).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let g = GadgetInstance::from_spec(&sidecar.spec)?;
    let text = match witness.strip_prefix('@') {
        Some(file) => read_text(Path::new(file))?,
        None => witness.to_string(),
    };
    let text = text.trim();
    let witness = if text.starts_with('{') {
        let cert: Certificate =
            serde_json::from_str(text).map_err(|e| input_error(format!("witness: {e}")))?;
        Witness::Certificate(cert)
    } else {
        Witness::Policy(Policy::parse(text, g.instance.n_agents())?)
    };
    let valid = reductions::verify_witness(&g, &witness)?;
    let shown = match &witness {
        Witness::Policy(p) => json!(p.to_string()),
        Witness::Certificate(c) => json!(c),
    };
    Ok((
        if valid { EXIT_YES } else { EXIT_NO },
        json!({ "valid": valid, "witness": shown, "query": g.query }),
    ))
}
