mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ledobata::classify::{classify_go, classify_natred, go_family_system, phi_roots, GoResult, NatRedVerdict};
use ledobata::io::{self, LoadedMetric, MetricFile};
use ledobata::lie::StructureConstants;
use ledobata::metric::MetricT;
use ledobata::oracle::{
    brackets_property_check, go_oracle, go_oracle_explicit, natred_certificate_check, OracleReport, OracleStatus,
};
use ledobata::reduce::{decompose, enumerate_partition_pairs, factor_natred};
use ledobata::Tolerances;

const DEFAULT_MAX_M: usize = 8;

#[derive(Parser)]
#[command(name = "lot", version, about = "Classify invariant metrics on F^m/diag(F)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Natural reductivity and geodesic orbit verdicts
    Classify,
    /// Irreducible product decomposition and isometry group
    Decompose,
    /// Cross-check the classifiers against the numeric oracle
    Verify,
    /// Write a metric of the z, rho, lambda family
    Generate,
    /// List the partition pairs of 1..m
    Trees,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Opts {
    /// Metric JSON file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the report (or the generated metric) here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Comma-separated strictly increasing positive values
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    z: Option<Vec<f64>>,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    cluster_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    split_tol: f64,
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads for enumeration and sampling
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest m for partition-pair enumeration
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_M)]
    max_m: usize,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Input(anyhow::Error),
    Disagreement(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<ledobata::Error> for Failure {
    fn from(e: ledobata::Error) -> Self {
        Failure::Input(e.into())
    }
}

struct Ctx {
    opts: Opts,
    tols: Tolerances,
}

impl Ctx {
    fn metric(&self) -> Result<LoadedMetric> {
        let path = self.opts.input.as_ref().context("--input is required")?;
        io::load_metric(path).with_context(|| format!("reading {}", path.display()))
    }

    fn structure_constants(&self) -> Result<StructureConstants> {
        io::structure_constants_from_env().context("loading structure constants")
    }

    fn check_cap(&self, m: usize) -> Result<()> {
        if m > self.opts.max_m {
            bail!("m = {m} exceeds the enumeration cap {}; raise it with --max-m", self.opts.max_m);
        }
        Ok(())
    }

    fn emit(&self, value: &Value, text: String) -> Result<()> {
        let out = match self.opts.format {
            Format::Json => io::to_json_string(value)?,
            Format::Text => text,
        };
        match &self.opts.output {
            Some(p) => std::fs::write(p, out).with_context(|| format!("writing {}", p.display()))?,
            None => print!("{out}"),
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for failed verification
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Disagreement(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let opts = cli.opts;
    let tols = Tolerances {
        tol: opts.tol,
        cluster_tol: opts.cluster_tol,
        split_tol: opts.split_tol,
    };
    tols.validate()?;
    if opts.samples == 0 {
        return Err(anyhow::anyhow!("--samples must be at least 1").into());
    }
    if opts.max_m > DEFAULT_MAX_M {
        eprintln!(
            "warning: --max-m {} above {DEFAULT_MAX_M}; enumerating (m+1)^(m-1) labelled trees may take long",
            opts.max_m
        );
    }
    if let Some(j) = opts.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| anyhow::anyhow!("--jobs: {e}"))?;
    }
    let ctx = Ctx { opts, tols };
    match cli.command {
        Command::Classify => classify(&ctx),
        Command::Decompose => decompose_cmd(&ctx),
        Command::Verify => verify(&ctx),
        Command::Generate => generate(&ctx),
        Command::Trees => trees(&ctx),
    }
}

#[derive(Serialize)]
struct GoJson {
    verdict: &'static str,
    is_go: bool,
    reason: Option<String>,
    certificate: Option<Value>,
    oracle: Option<OracleReport>,
}

fn go_json(ctx: &Ctx, t: &MetricT, r: &GoResult, sc: &StructureConstants) -> GoJson {
    let oracle = matches!(r, GoResult::IndeterminateSymbolic(_))
        .then(|| go_oracle(t, sc, ctx.opts.samples, ctx.opts.seed, ctx.tols.tol));
    let is_go = match r {
        GoResult::Yes(_) => true,
        GoResult::No(_) => false,
        GoResult::IndeterminateSymbolic(_) => oracle.as_ref().is_some_and(|o| o.verdict),
    };
    GoJson {
        verdict: r.label(),
        is_go,
        reason: r.reason().map(str::to_owned),
        certificate: r.certificate().map(|c| c.to_json()),
        oracle,
    }
}

fn classify(ctx: &Ctx) -> std::result::Result<(), Failure> {
    let loaded = ctx.metric()?;
    let t = &loaded.t;
    let sc = ctx.structure_constants()?;
    let nr = classify_natred(&t.to_form(), ctx.tols.tol);
    let go = go_json(ctx, t, &classify_go(t, &ctx.tols), &sc);
    let report = json!({
        "m": t.m(),
        "natred": nr.verdict,
        "normal": nr.normal,
        "go": go,
        "agreement": nr.is_nr() == go.is_go,
    });
    ctx.emit(&report, render::classify(&report))?;
    Ok(())
}

fn decompose_cmd(ctx: &Ctx) -> std::result::Result<(), Failure> {
    let loaded = ctx.metric()?;
    let t = &loaded.t;
    ctx.check_cap(t.m())?;
    let dec = decompose(t, ctx.tols.split_tol)?;
    let natred = factor_natred(&dec, ctx.tols.tol);
    let factors: Vec<Value> = dec
        .factors
        .iter()
        .zip(&natred)
        .map(|(f, n)| {
            json!({
                "m": f.m(),
                "labels": f.labels,
                "T": io::rows_of(f.t.t()),
                "natred": n,
            })
        })
        .collect();
    let splits: Vec<Value> = dec
        .splits
        .iter()
        .map(|s| json!({"labels": s.labels, "p1": s.pair.p1, "p2": s.pair.p2, "tree": s.tree}))
        .collect();
    let report = json!({
        "m": t.m(),
        "factors": factors,
        "isometry_group_k": dec.isometry_group_k(),
        "go_manifold": natred.iter().all(|n| n.is_nr()),
        "splits": splits,
    });
    ctx.emit(&report, render::decompose(&report))?;
    Ok(())
}

fn verify(ctx: &Ctx) -> std::result::Result<(), Failure> {
    let loaded = ctx.metric()?;
    let t = &loaded.t;
    let sc = ctx.structure_constants()?;
    let (samples, seed, tol) = (ctx.opts.samples, ctx.opts.seed, ctx.tols.tol);
    let form = t.to_form();
    let nr = classify_natred(&form, tol);
    let go = classify_go(t, &ctx.tols);
    let oracle = go_oracle(t, &sc, samples, seed, tol);
    let mut problems = Vec::new();
    if oracle.status == OracleStatus::Marginal {
        problems.push(format!("oracle is marginal (max residual {:.3e})", oracle.max_residual));
    }
    match &go {
        GoResult::Yes(_) if !oracle.verdict => problems.push("classifier says GO, oracle refutes".into()),
        GoResult::No(_) if oracle.verdict => problems.push("classifier says not GO, oracle confirms".into()),
        _ => {}
    }
    if nr.is_nr() != oracle.verdict {
        problems.push(format!(
            "natural reductivity ({}) disagrees with the oracle ({})",
            nr.is_nr(),
            oracle.verdict
        ));
    }

    let explicit = go.certificate().map(|c| go_oracle_explicit(t, c, &sc, samples, seed, tol));
    if let Some(e) = explicit.as_ref().filter(|e| !e.verdict) {
        problems.push(format!("explicit Z_0 fails (max residual {:.3e})", e.max_residual));
    }

    let (source, claimed) = match &loaded.certificate {
        Some(c) => ("file", c.clone()),
        None => ("computed", nr.verdict.clone()),
    };
    let certificate = if claimed == NatRedVerdict::NotNR {
        if source == "file" && oracle.verdict {
            problems.push("certificate claims not naturally reductive, oracle confirms GO".into());
        }
        None
    } else {
        let mut r = nr.clone();
        r.verdict = claimed.clone();
        let rep = natred_certificate_check(&form, &r, &sc, samples, seed, tol)?;
        if !rep.verdict {
            problems.push(format!(
                "{source} certificate fails (max residual {:.3e}, seeds {:?})",
                rep.max_residual,
                &rep.failures[..rep.failures.len().min(5)]
            ));
        }
        Some(rep)
    };

    let brackets = go
        .is_yes()
        .then(|| brackets_property_check(t, &sc, samples, seed, tol, ctx.tols.cluster_tol));
    if let Some(b) = brackets.as_ref().filter(|b| !b.verdict()) {
        problems.push(format!(
            "bracket identities fail on a GO metric ({:?})",
            b.alpha_beta.as_ref().map(|r| r.max_residual)
        ));
    }

    let report = json!({
        "m": t.m(),
        "classifier": {"natred": nr.verdict, "go": go.label()},
        "go_oracle": oracle,
        "explicit": explicit,
        "certificate": certificate.map(|r| json!({"source": source, "claimed": claimed, "report": r})),
        "brackets": brackets,
        "agree": problems.is_empty(),
        "problems": problems,
    });
    ctx.emit(&report, render::verify(&report))?;
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Disagreement(problems.join("; ")))
    }
}

fn generate(ctx: &Ctx) -> std::result::Result<(), Failure> {
    let z = ctx.opts.z.as_ref().context("--z is required")?;
    let roots = phi_roots(z)?;
    let sys = go_family_system(z, ctx.opts.rho, ctx.opts.lambda)?;
    let t = MetricT::from_system(&sys)?;
    let cert = classify_go(&t, &ctx.tols);
    let file = MetricFile::from_t(&t);
    let report = json!({
        "z": z,
        "rho": ctx.opts.rho,
        "lambda": ctx.opts.lambda,
        "roots": roots,
        "gammas": sys.gammas,
        "c": cert.certificate().map(|c| c.c.clone()),
    });
    let text = render::generate(&report);
    match &ctx.opts.output {
        Some(p) => {
            io::save_metric(p, &file).with_context(|| format!("writing {}", p.display()))?;
            match ctx.opts.format {
                Format::Json => print!("{}", io::to_json_string(&report)?),
                Format::Text => print!("{text}"),
            }
        }
        None => {
            print!("{}", io::to_json_string(&file)?);
            eprint!("{text}");
        }
    }
    Ok(())
}

fn trees(ctx: &Ctx) -> std::result::Result<(), Failure> {
    let m = ctx.opts.m.context("--m is required")?;
    if m < 2 {
        return Err(anyhow::anyhow!("m must be at least 2, got {m}").into());
    }
    ctx.check_cap(m)?;
    let pairs = enumerate_partition_pairs(m)?;
    let report = json!({
        "m": m,
        "count": pairs.len(),
        "pairs": pairs.iter().map(|p| json!({"p1": p.p1, "p2": p.p2})).collect::<Vec<_>>(),
    });
    ctx.emit(&report, render::trees(&report))?;
    Ok(())
}
