//! Command-line front end. Every subcommand is a pure function of its flags
//! and `--seed`, writes one artifact (stdout or `--out`), and embeds the
//! resolved configuration in the output for provenance.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.
//! `SPLITREC_SEED` and `SPLITREC_THREADS` override the built-in defaults;
//! explicit flags beat both, and `--config <file>` (JSON) supplies values
//! for anything not given as a flag.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::constants;
use crate::error::{Error, Result};
use crate::model::{CustomModel, SplitVectorModel};
use crate::records;
use crate::renewal::{self, RenewalMethod};
use crate::rng::{stream, tags};
use crate::stable::LimitDistribution;
use crate::stats::{self, ExperimentConfig, Target};
use crate::tree::{generate_tree, SplitParams};

const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser, Debug)]
#[command(
    name = "splitrec",
    version,
    about = "Random split trees, records/cuttings, and their 1-stable limit law"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Master seed (env SPLITREC_SEED, then a fixed default).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for replicated runs (env SPLITREC_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Payload format where both make sense.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// JSON config file supplying defaults for unset flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Model: bst | mary:<m> | trie:<p1,p2,...> | symmetric:<b>
    /// (custom mixtures via --config).
    #[arg(long, global = true)]
    model: Option<String>,
    /// Vertex capacity override.
    #[arg(long, global = true)]
    s: Option<u32>,
    /// Overflow retention override.
    #[arg(long, global = true)]
    s0: Option<u32>,
    /// Per-child overflow block override.
    #[arg(long, global = true)]
    s1: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    Vertex,
    Edge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Analytic,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Dist,
    Cdf,
    Pdf,
    Samples,
    Cf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate one split tree and write the text serialization.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Replicate record counts on freshly generated trees.
    Records {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        reps: Option<u32>,
        #[arg(long, value_enum, default_value_t = Variant::Vertex)]
        variant: Variant,
    },
    /// Replicate cutting counts; --trace dumps a single run cut by cut.
    Cuts {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        reps: Option<u32>,
        #[arg(long, value_enum, default_value_t = Variant::Vertex)]
        variant: Variant,
        #[arg(long)]
        trace: bool,
    },
    /// Compute or estimate the limit constants and export them as JSON.
    Constants {
        #[command(flatten)]
        common: Common,
        /// Ball-count grid for the estimated constants, e.g. 1024,4096,16384.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        reps: Option<u32>,
    },
    /// Tabulate the renewal function U(t) and W(x).
    Renewal {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Relative tolerance on U(t) (absolute for W).
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
        #[arg(long, value_enum, default_value_t = Method::Analytic)]
        method: Method,
        #[arg(long, default_value_t = 400_000)]
        paths: u64,
    },
    /// The limit distribution: parameters, CDF/PDF tables, samples, CF.
    Limit {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Emit::Dist)]
        emit: Emit,
        /// Table range lo:hi.
        #[arg(long, default_value = "-20:60")]
        range: String,
        #[arg(long, default_value_t = 161)]
        points: usize,
        /// Sample count for --emit samples.
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Full replicated experiment with the normalized-limit comparison.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        reps: Option<u32>,
        /// Comma-separated targets
        /// (records_v,records_e,cuts_v,cuts_e,depths,summaries).
        #[arg(long)]
        targets: Option<String>,
        /// Also dump raw samples as CSV to this path.
        #[arg(long)]
        csv_samples: Option<PathBuf>,
    },
    /// Depth-law diagnostics for the last inserted ball.
    Depths {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        reps: Option<u32>,
    },
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<String>,
    custom_model: Option<CustomSpec>,
    n: Option<u64>,
    grid: Option<Vec<u64>>,
    reps: Option<u32>,
    seed: Option<u64>,
    threads: Option<usize>,
    s: Option<u32>,
    s0: Option<u32>,
    s1: Option<u32>,
    targets: Option<Vec<String>>,
}

/// Custom split-vector law for config files: a finite mixture of fixed
/// probability vectors, optionally under a uniform random permutation (kept
/// on by default so the components stay identically distributed).
#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
struct CustomSpec {
    vectors: Vec<Vec<f64>>,
    weights: Option<Vec<f64>>,
    #[serde(default = "default_true")]
    permute: bool,
    #[serde(default)]
    lattice: bool,
}

fn default_true() -> bool {
    true
}

struct Resolved {
    params: SplitParams,
    model_spec: String,
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
    file: FileConfig,
}

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

fn parse_model_spec(spec: &str) -> Result<(SplitVectorModel, (u32, u32, u32))> {
    if spec == "bst" {
        return Ok((SplitVectorModel::bst(), (1, 1, 0)));
    }
    if let Some(m) = spec.strip_prefix("mary:") {
        let m: u32 = m
            .parse()
            .map_err(|_| Error::invalid(format!("bad mary branch factor in `{spec}`")))?;
        if m < 2 {
            return Err(Error::invalid("mary:<m> needs m >= 2"));
        }
        return Ok((SplitVectorModel::uniform_spacings(m)?, (m - 1, m - 1, 0)));
    }
    if let Some(ps) = spec.strip_prefix("trie:") {
        let probs: Vec<f64> = ps
            .split(',')
            .map(|p| {
                p.parse()
                    .map_err(|_| Error::invalid(format!("bad probability `{p}`")))
            })
            .collect::<Result<_>>()?;
        return Ok((SplitVectorModel::permuted_fixed(probs)?, (1, 0, 0)));
    }
    if let Some(b) = spec.strip_prefix("symmetric:") {
        let b: u32 = b
            .parse()
            .map_err(|_| Error::invalid(format!("bad branch factor in `{spec}`")))?;
        return Ok((SplitVectorModel::symmetric(b)?, (1, 0, 0)));
    }
    Err(Error::invalid(format!(
        "unknown model `{spec}` (expected bst | mary:<m> | trie:<p1,...> | symmetric:<b>)"
    )))
}

fn build_custom(spec: &CustomSpec) -> Result<(SplitVectorModel, (u32, u32, u32))> {
    if spec.vectors.is_empty() {
        return Err(Error::invalid("custom_model.vectors must be nonempty"));
    }
    let b = spec.vectors[0].len();
    if spec.vectors.iter().any(|v| v.len() != b) {
        return Err(Error::invalid("custom_model vectors must share one length"));
    }
    let weights = match &spec.weights {
        Some(w) => {
            if w.len() != spec.vectors.len() || w.iter().any(|&x| x < 0.0) {
                return Err(Error::invalid("custom_model.weights malformed"));
            }
            let total: f64 = w.iter().sum();
            w.iter().map(|x| x / total).collect::<Vec<f64>>()
        }
        None => vec![1.0 / spec.vectors.len() as f64; spec.vectors.len()],
    };
    // moments of the mixture: mu = Σ_i w_i Σ_j -p_ij ln p_ij (permutation
    // invariant), likewise the second log-moment
    let mut mu = 0.0;
    let mut m2 = 0.0;
    for (vec, w) in spec.vectors.iter().zip(&weights) {
        for &p in vec {
            if p > 0.0 {
                mu += w * (-p * p.ln());
                m2 += w * (p * p.ln() * p.ln());
            }
        }
    }
    let vectors = spec.vectors.clone();
    let cum: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let permute = spec.permute;
    let sampler = move |rng: &mut dyn rand::RngCore| -> Vec<f64> {
        let u: f64 = rand::Rng::random(&mut *rng);
        let mut idx = 0;
        while idx + 1 < cum.len() && u >= cum[idx] {
            idx += 1;
        }
        let mut v = vectors[idx].clone();
        if permute {
            for i in (1..v.len()).rev() {
                let j = rand::Rng::random_range(&mut *rng, 0..=i);
                v.swap(i, j);
            }
        }
        v
    };
    let custom = CustomModel {
        b: b as u32,
        sampler: Arc::new(sampler),
        moments: Some((mu, m2 - mu * mu)),
        component_density: None,
        lattice: spec.lattice,
    };
    Ok((SplitVectorModel::custom(custom)?, (1, 0, 0)))
}

fn resolve(common: &Common) -> Result<Resolved> {
    let file: FileConfig = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::invalid(format!("bad config file: {e}")))?
        }
        None => FileConfig::default(),
    };
    let seed = common
        .seed
        .or(file.seed)
        .or_else(|| env_u64("SPLITREC_SEED"))
        .unwrap_or(DEFAULT_SEED);
    let threads = common
        .threads
        .or(file.threads)
        .or_else(|| env_u64("SPLITREC_THREADS").map(|v| v as usize));
    if let Some(k) = threads {
        // results are independent of the worker count; this only caps it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let file_has_custom = file.custom_model.is_some() && file.model.is_none();
    let model_spec = common
        .model
        .clone()
        .or_else(|| file.model.clone())
        .unwrap_or_else(|| if file_has_custom { "custom".into() } else { "bst".into() });
    let (model, defaults) = if model_spec == "custom" {
        let spec = file
            .custom_model
            .as_ref()
            .ok_or_else(|| Error::invalid("custom models need custom_model in --config"))?;
        build_custom(spec)?
    } else {
        parse_model_spec(&model_spec)?
    };
    let s = common.s.or(file.s).unwrap_or(defaults.0);
    let s0 = common.s0.or(file.s0).unwrap_or(defaults.1);
    let s1 = common.s1.or(file.s1).unwrap_or(defaults.2);
    let params = SplitParams::new(model, s, s0, s1)?;
    Ok(Resolved {
        params,
        model_spec,
        seed,
        format: common.format,
        out: common.out.clone(),
        file,
    })
}

fn config_echo(r: &Resolved, command: &str, extra: serde_json::Value) -> serde_json::Value {
    let mut echo = serde_json::json!({
        "command": command,
        "model": r.params.model().description(),
        "model_spec": r.model_spec,
        "b": r.params.b(),
        "s": r.params.s(),
        "s0": r.params.s0(),
        "s1": r.params.s1(),
        "seed": r.seed,
    });
    if let (Some(obj), Some(ex)) = (echo.as_object_mut(), extra.as_object()) {
        for (k, v) in ex {
            obj.insert(k.clone(), v.clone());
        }
    }
    echo
}

fn emit(r: &Resolved, content: String) -> Result<()> {
    match &r.out {
        Some(path) => {
            fs::write(path, content)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                writeln!(stdout)?;
            }
        }
    }
    Ok(())
}

fn csv_comment(echo: &serde_json::Value) -> String {
    let obj = echo.as_object().expect("echo is an object");
    let fields: Vec<String> = obj
        .iter()
        .map(|(k, v)| format!("{k}={}", v.to_string().trim_matches('"')))
        .collect();
    format!("# splitrec {}\n", fields.join(" "))
}

fn parse_grid(text: Option<&str>, file: &FileConfig, default: &[u64]) -> Result<Vec<u64>> {
    if let Some(t) = text {
        return t
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::invalid(format!("bad grid entry `{x}`")))
            })
            .collect();
    }
    if let Some(g) = &file.grid {
        return Ok(g.clone());
    }
    Ok(default.to_vec())
}

/// Parse argv, execute, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn sample_counts(
    r: &Resolved,
    n: u64,
    reps: u32,
    target: Target,
) -> Result<Vec<f64>> {
    let config = ExperimentConfig {
        params: r.params.clone(),
        n_grid: vec![n],
        reps,
        master_seed: r.seed,
        targets: vec![target],
        constants: None,
    };
    let report = stats::run_experiment(&config)?;
    if let Some(f) = report.failures.first() {
        return Err(Error::Convergence(format!(
            "replicate {} failed: {}",
            f.replicate, f.message
        )));
    }
    Ok(report.results[0].samples[target.name()].clone())
}

fn dump_samples(
    r: &Resolved,
    command: &str,
    n: u64,
    reps: u32,
    target: Target,
    samples: &[f64],
) -> Result<()> {
    let echo = config_echo(
        r,
        command,
        serde_json::json!({"n": n, "reps": reps, "target": target.name()}),
    );
    match r.format {
        Format::Json => {
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            let payload = serde_json::json!({
                "config": echo,
                "samples": samples,
                "mean": mean,
            });
            emit(r, serde_json::to_string_pretty(&payload).expect("json"))
        }
        Format::Csv => {
            let mut out = csv_comment(&echo);
            out.push_str("n,replicate,target,value\n");
            for (rep, v) in samples.iter().enumerate() {
                out.push_str(&format!("{n},{rep},{},{v}\n", target.name()));
            }
            emit(r, out)
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate { common, n } => {
            let r = resolve(&common)?;
            let n = n.or(r.file.n).unwrap_or(1000);
            let mut rng = stream(r.seed, &[tags::TREE]);
            let tree = generate_tree(&r.params, n, &mut rng)?;
            let mut buf = Vec::new();
            tree.write_text(&mut buf, r.seed)?;
            emit(&r, String::from_utf8(buf).expect("tree text is utf8"))
        }
        Command::Records {
            common,
            n,
            reps,
            variant,
        } => {
            let r = resolve(&common)?;
            let n = n.or(r.file.n).unwrap_or(1000);
            let reps = reps.or(r.file.reps).unwrap_or(100);
            let target = match variant {
                Variant::Vertex => Target::RecordsV,
                Variant::Edge => Target::RecordsE,
            };
            let samples = sample_counts(&r, n, reps, target)?;
            dump_samples(&r, "records", n, reps, target, &samples)
        }
        Command::Cuts {
            common,
            n,
            reps,
            variant,
            trace,
        } => {
            let r = resolve(&common)?;
            let n = n.or(r.file.n).unwrap_or(1000);
            let reps = reps.or(r.file.reps).unwrap_or(100);
            let target = match variant {
                Variant::Vertex => Target::CutsV,
                Variant::Edge => Target::CutsE,
            };
            if trace {
                let mut tree_rng = stream(r.seed, &[tags::TREE, n, 0]);
                let tree = generate_tree(&r.params, n, &mut tree_rng)?;
                let tag = if target == Target::CutsV {
                    tags::CUTS_V
                } else {
                    tags::CUTS_E
                };
                let mut cut_rng = stream(r.seed, &[tag, n, 0]);
                let trace = match variant {
                    Variant::Vertex => records::simulate_cuts_vertices(&tree, &mut cut_rng),
                    Variant::Edge => records::simulate_cuts_edges(&tree, &mut cut_rng),
                };
                let echo = config_echo(
                    &r,
                    "cuts",
                    serde_json::json!({"n": n, "trace": true, "variant": target.name()}),
                );
                let mut buf = Vec::new();
                trace.write_csv(&mut buf)?;
                let mut out = csv_comment(&echo);
                out.push_str(&String::from_utf8(buf).expect("csv is utf8"));
                return emit(&r, out);
            }
            let samples = sample_counts(&r, n, reps, target)?;
            dump_samples(&r, "cuts", n, reps, target, &samples)
        }
        Command::Constants { common, grid, reps } => {
            let r = resolve(&common)?;
            let grid = parse_grid(grid.as_deref(), &r.file, &[1024, 4096, 16384])?;
            let reps = reps.or(r.file.reps).unwrap_or(200);
            let constants = constants::derive_constants(&r.params, &grid, reps, r.seed)?;
            let mut payload = constants.export_json(&r.params);
            let echo = config_echo(
                &r,
                "constants",
                serde_json::json!({"grid": grid, "reps": reps}),
            );
            payload
                .as_object_mut()
                .expect("export is an object")
                .insert("config".into(), echo);
            emit(&r, serde_json::to_string_pretty(&payload).expect("json"))
        }
        Command::Renewal {
            common,
            t_max,
            points,
            tolerance,
            method,
            paths,
        } => {
            let r = resolve(&common)?;
            if !(t_max > 0.0) || points < 1 {
                return Err(Error::invalid("need t_max > 0 and points >= 1"));
            }
            let mu_inv = 1.0 / constants::mu_sigma_best(r.params.model())?.mu;
            let echo = config_echo(
                &r,
                "renewal",
                serde_json::json!({
                    "t_max": t_max, "points": points, "tolerance": tolerance,
                    "method": if method == Method::Analytic { "analytic" } else { "mc" },
                }),
            );
            let mut rows = Vec::with_capacity(points);
            for i in 1..=points {
                let t = t_max * i as f64 / points as f64;
                let abs_tol = (tolerance * mu_inv * t.exp()).max(1e-12);
                let m = match method {
                    Method::Analytic => RenewalMethod::SeriesAnalytic,
                    Method::Mc => RenewalMethod::SeriesMonteCarlo { paths },
                };
                let eval = renewal::renewal_u(r.params.model(), t, abs_tol, m, r.seed)?;
                let w = renewal::renewal_w(r.params.model(), t, tolerance.max(1e-6), m, r.seed)?;
                rows.push((t, eval, w));
            }
            match r.format {
                Format::Json => {
                    let table: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(t, e, w)| {
                            serde_json::json!({
                                "t": t, "u": e.u, "scaled": (-t).exp() * e.u, "w": w,
                                "truncation_depth": e.truncation_depth,
                                "tail_bound": e.tail_bound,
                                "std_error": e.std_error,
                            })
                        })
                        .collect();
                    let payload = serde_json::json!({"config": echo, "mu_inv": mu_inv, "table": table});
                    emit(&r, serde_json::to_string_pretty(&payload).expect("json"))
                }
                Format::Csv => {
                    let mut out = csv_comment(&echo);
                    out.push_str("t,u,scaled,w,truncation_depth,tail_bound\n");
                    for (t, e, w) in &rows {
                        out.push_str(&format!(
                            "{t},{},{},{w},{},{}\n",
                            e.u,
                            (-t).exp() * e.u,
                            e.truncation_depth,
                            e.tail_bound
                        ));
                    }
                    emit(&r, out)
                }
            }
        }
        Command::Limit {
            common,
            emit: what,
            range,
            points,
            count,
            tolerance,
        } => {
            let r = resolve(&common)?;
            let ms = constants::mu_sigma_best(r.params.model())?;
            let dist = LimitDistribution::for_model(r.params.model(), ms.mu, ms.sigma2)?;
            let echo = config_echo(
                &r,
                "limit",
                serde_json::json!({
                    "emit": format!("{what:?}").to_lowercase(),
                    "range": range, "points": points, "count": count,
                    "tolerance": tolerance,
                }),
            );
            match what {
                Emit::Dist => {
                    let mut payload = dist.export_json();
                    payload
                        .as_object_mut()
                        .expect("object")
                        .insert("config".into(), echo);
                    emit(&r, serde_json::to_string_pretty(&payload).expect("json"))
                }
                Emit::Cdf | Emit::Pdf => {
                    let (lo, hi) = parse_range(&range)?;
                    let mut buf = Vec::new();
                    dist.write_table(&mut buf, lo, hi, points, tolerance)?;
                    let mut out = csv_comment(&echo);
                    out.push_str(&String::from_utf8(buf).expect("utf8"));
                    emit(&r, out)
                }
                Emit::Samples => {
                    let mut rng = stream(r.seed, &[tags::SAMPLER]);
                    let samples = dist.sample_n(count, &mut rng);
                    match r.format {
                        Format::Json => {
                            let payload = serde_json::json!({"config": echo, "samples": samples});
                            emit(&r, serde_json::to_string_pretty(&payload).expect("json"))
                        }
                        Format::Csv => {
                            let mut out = csv_comment(&echo);
                            out.push_str("index,value\n");
                            for (i, x) in samples.iter().enumerate() {
                                out.push_str(&format!("{i},{x}\n"));
                            }
                            emit(&r, out)
                        }
                    }
                }
                Emit::Cf => {
                    let (lo, hi) = parse_range(&range)?;
                    let mut out = csv_comment(&echo);
                    out.push_str("t,re,im,modulus\n");
                    for i in 0..points {
                        let t = lo + (hi - lo) * i as f64 / (points - 1).max(1) as f64;
                        let v = dist.cf(t);
                        out.push_str(&format!("{t},{},{},{}\n", v.re, v.im, v.norm()));
                    }
                    emit(&r, out)
                }
            }
        }
        Command::Compare {
            common,
            grid,
            reps,
            targets,
            csv_samples,
        } => {
            let r = resolve(&common)?;
            let grid = parse_grid(grid.as_deref(), &r.file, &[1024, 4096, 16384])?;
            let reps = reps.or(r.file.reps).unwrap_or(500);
            let target_list: Vec<Target> = match targets {
                Some(t) => t
                    .split(',')
                    .map(|x| x.trim().parse())
                    .collect::<Result<_>>()?,
                None => match &r.file.targets {
                    Some(list) => list
                        .iter()
                        .map(|x| x.parse())
                        .collect::<Result<_>>()?,
                    None => vec![Target::RecordsV],
                },
            };
            let constants = if r.params.model().is_lattice() {
                None
            } else {
                Some(constants::derive_constants(
                    &r.params,
                    &grid,
                    reps.min(400).max(2),
                    r.seed ^ 0xc0,
                )?)
            };
            let config = ExperimentConfig {
                params: r.params.clone(),
                n_grid: grid,
                reps,
                master_seed: r.seed,
                targets: target_list,
                constants,
            };
            let report = stats::run_experiment(&config)?;
            if let Some(path) = csv_samples {
                let mut buf = Vec::new();
                report.write_csv_samples(&mut buf)?;
                fs::write(path, buf)?;
            }
            let echo = config_echo(
                &r,
                "compare",
                serde_json::json!({"grid": report.n_grid, "reps": reps}),
            );
            let payload = serde_json::json!({"config": echo, "report": report.to_json()});
            emit(&r, serde_json::to_string_pretty(&payload).expect("json"))
        }
        Command::Depths { common, n, reps } => {
            let r = resolve(&common)?;
            let n = n.or(r.file.n).unwrap_or(100_000);
            let reps = reps.or(r.file.reps).unwrap_or(2_000);
            let ms = constants::mu_sigma_best(r.params.model())?;
            let diag = stats::depth_clt_check(&r.params, n, reps, ms.mu, ms.sigma2, r.seed)?;
            let mu_inv = 1.0 / ms.mu;
            let ln_n = (n as f64).ln();
            let echo = config_echo(&r, "depths", serde_json::json!({"n": n, "reps": reps}));
            let payload = serde_json::json!({
                "config": echo,
                "diagnostics": diag,
                "expected_mean": mu_inv * ln_n,
                "expected_var_over_ln_n": ms.sigma2 * mu_inv.powi(3),
                "var_over_ln_n": diag.var_depth / ln_n,
            });
            emit(&r, serde_json::to_string_pretty(&payload).expect("json"))
        }
    }
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("bad range `{text}`, expected lo:hi")))?;
    let lo: f64 = lo
        .parse()
        .map_err(|_| Error::invalid(format!("bad range bound `{lo}`")))?;
    let hi: f64 = hi
        .parse()
        .map_err(|_| Error::invalid(format!("bad range bound `{hi}`")))?;
    if !(hi > lo) {
        return Err(Error::invalid("range needs hi > lo"));
    }
    Ok((lo, hi))
}
