use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use mvcoreset::bench::{
    adversarial_collection, random_centers, run_lloyd_speedup, run_size_error_sweep, write_speedup_csv,
    write_sweep_csv, CenterSource, DatasetSource, ErrorReference, ExperimentConfig, SyntheticSpec,
};
use mvcoreset::coreset::{default_registry, CoresetOptions};
use mvcoreset::distance::cost;
use mvcoreset::family::{build_family_capped, verify_family, CoordinateFamily, VerifyMode, DEFAULT_SIZE_CAP};
use mvcoreset::io::{self as csvio, CsvOptions};
use mvcoreset::lloyd::{lloyd, lloyd_weighted, LloydConfig, LloydInit};
use mvcoreset::sensitivity::SensitivityConfig;
use mvcoreset::{ClusteringParams, Dataset, WeightedCoreset};
use serde::Serialize;
use serde_json::{json, Value};

use crate::settings::{write_comments, Context, FileConfig};
use crate::{
    Cli, Command, CoresetArgs, CoresetCommand, EvaluateArgs, FamilyBuildArgs, FamilyCommand, FamilyVerifyArgs,
    GenCommand, InputArgs, LloydArgs, LowerBoundArgs, SensitivityArgs, SweepArgs, SyntheticArgs,
};

const DEFAULT_K: usize = 3;
const DEFAULT_Z: f64 = 2.0;
const DEFAULT_EPSILON: f64 = 0.2;
const DEFAULT_N_CENTERS: usize = 100;
const DEFAULT_ITERS: usize = 500;
const DEFAULT_TOL: f64 = 1e-7;

pub fn run(cli: Cli) -> Result<ExitCode> {
    let file = match &cli.config {
        Some(p) => FileConfig::read(p)?,
        None => FileConfig::default(),
    };
    if let Some(t) = cli.threads.or(file.threads) {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let ctx = Context::new(file, cli.seed, cli.out_dir);
    match cli.command {
        Command::Coreset(c) => {
            let (method, args) = match c {
                CoresetCommand::Build(a) => ("ours", a),
                CoresetCommand::Uniform(a) => ("uniform", a),
                CoresetCommand::Impute(a) => ("imputation", a),
            };
            coreset(&ctx, method, &args)?;
        }
        Command::Evaluate(a) => evaluate(&ctx, &a)?,
        Command::Lloyd(a) => run_lloyd(&ctx, &a)?,
        Command::Gen(GenCommand::Synthetic(a)) => gen_synthetic(&ctx, &a)?,
        Command::Gen(GenCommand::Lowerbound(a)) => gen_lower_bound(&ctx, &a)?,
        Command::Sweep(a) => sweep(&ctx, &a)?,
        Command::Family(FamilyCommand::Build(a)) => family_build(&ctx, &a)?,
        Command::Family(FamilyCommand::Verify(a)) => return family_verify(&ctx, &a),
    }
    Ok(ExitCode::SUCCESS)
}

/// A file under the output directory, or stdout.
fn sink(ctx: &Context, path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(ctx.create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(ctx: &Context, input: &InputArgs) -> Result<(Dataset, CsvOptions)> {
    let opts = ctx.csv_options(input.delimiter, input.header.map(Into::into))?;
    let data = csvio::read_dataset_file(&input.input, &opts)
        .with_context(|| format!("reading {}", input.input.display()))?;
    log::info!("read {} points in {} dimensions", data.n(), data.d());
    Ok((data, opts))
}

fn load_coreset(path: &Path, data: &Dataset) -> Result<WeightedCoreset> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    csvio::read_coreset(f, data).with_context(|| format!("reading {}", path.display()))
}

fn sensitivity_config(file: &FileConfig, a: &SensitivityArgs) -> SensitivityConfig {
    let mut s = file.sensitivity.clone().unwrap_or_default();
    if a.family_size.is_some() {
        s.family_size = a.family_size;
    }
    if let Some(v) = a.family_cap {
        s.family_cap = v;
    }
    if let Some(v) = a.c_alpha {
        s.c_alpha = v;
    }
    if let Some(v) = a.c_sigma {
        s.c_sigma = v;
    }
    if let Some(v) = a.c_l {
        s.c_l = v;
    }
    if let Some(v) = &a.backend {
        s.backend = v.clone();
    }
    s
}

fn coreset(ctx: &Context, method: &str, a: &CoresetArgs) -> Result<()> {
    let f = &ctx.file;
    let params = ClusteringParams::new(
        a.k.or(f.k).unwrap_or(DEFAULT_K),
        a.z.or(f.z).unwrap_or(DEFAULT_Z),
        a.epsilon.or(f.epsilon).unwrap_or(DEFAULT_EPSILON),
    )?;
    let Some(n_samples) = a.n_samples.or(f.n_samples) else {
        bail!("--n-samples is required");
    };
    if n_samples == 0 {
        bail!("invalid input: --n-samples must be at least 1");
    }
    let options = CoresetOptions {
        sensitivity: sensitivity_config(f, &a.sensitivity),
        merge_duplicates: !a.no_merge && f.merge_duplicates.unwrap_or(true),
    };
    let (data, opts) = load(ctx, &a.input)?;

    let prov = ctx.provenance(
        &format!("coreset {method}"),
        &json!({
            "input": a.input.input,
            "csv": opts,
            "params": params,
            "n_samples": n_samples,
            "options": options,
        }),
    )?;
    let m = default_registry(&options).get(method)?;
    let sampler = m.prepare(&data, &params, ctx.seed)?;
    let cs = sampler.sample(n_samples, ctx.seed)?;
    log::info!(
        "{method}: {} entries, total weight {}",
        cs.len(),
        cs.total_weight()
    );
    csvio::write_coreset(sink(ctx, a.output.as_deref())?, &data, &cs, &prov.comments())?;

    if let Some(path) = &a.scores_out {
        let Some(scores) = sampler.scores() else {
            bail!("method '{method}' has no per-point scores");
        };
        csvio::write_scores(ctx.create(path)?, &scores.sigma, &prov.comments())?;
    }
    Ok(())
}

fn evaluate(ctx: &Context, a: &EvaluateArgs) -> Result<()> {
    let f = &ctx.file;
    let (data, opts) = load(ctx, &a.input)?;
    let cs = load_coreset(&a.coreset, &data)?;
    let z = a.z.or(f.z).unwrap_or(DEFAULT_Z);
    let k = a.k.or(f.k).unwrap_or(DEFAULT_K);

    let (source, centers) = if let Some(path) = &a.centers {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let c = csvio::read_centers(file, &opts).with_context(|| format!("reading {}", path.display()))?;
        (json!({"file": path}), vec![c])
    } else if a.adversarial {
        (json!("adversarial"), adversarial_collection(&data)?)
    } else {
        let count = a.n_centers.or(f.n_centers).unwrap_or(DEFAULT_N_CENTERS);
        (
            json!({"random": count, "k": k}),
            random_centers(&data, k, count, ctx.seed)?,
        )
    };
    let reference = ErrorReference::new(&data, centers, z)?;
    let deviations = reference.deviations(&data, &cs)?;
    let error = deviations.iter().copied().fold(0.0, f64::max);

    if let Some(path) = &a.output {
        let prov = ctx.provenance(
            "evaluate",
            &json!({"input": a.input.input, "coreset": a.coreset, "centers": source, "z": z}),
        )?;
        let mut w = ctx.create(path)?;
        write_comments(&mut w, &prov.comments())?;
        writeln!(w, "set,full_cost,deviation")?;
        for (i, (full, dev)) in reference.full_costs().iter().zip(&deviations).enumerate() {
            writeln!(w, "{i},{full},{dev}")?;
        }
        w.flush()?;
    }
    let report = json!({
        "error": error,
        "center_sets": deviations.len(),
        "skipped": reference.skipped(),
        "coreset_entries": cs.len(),
    });
    println!("{report}");
    Ok(())
}

fn run_lloyd(ctx: &Context, a: &LloydArgs) -> Result<()> {
    let f = &ctx.file;
    let (data, opts) = load(ctx, &a.input)?;
    let (init, restarts) = match &a.init_ids {
        Some(ids) => (LloydInit::Ids(ids.clone()), 1),
        None => (
            LloydInit::Seed(ctx.seed),
            a.restarts.or(f.restarts).unwrap_or(1),
        ),
    };
    let cfg = LloydConfig {
        k: a.k.or(f.k).unwrap_or(DEFAULT_K),
        iters: a.iters.or(f.iters).unwrap_or(DEFAULT_ITERS),
        tol: a.tol.or(f.tol).unwrap_or(DEFAULT_TOL),
        init,
        restarts,
    };
    let (result, ids) = match &a.coreset {
        Some(path) => {
            let cs = load_coreset(path, &data)?;
            let ids: Vec<usize> = cs.entries().iter().map(|e| e.id).collect();
            (lloyd_weighted(&data, &cs, &cfg)?, ids)
        }
        None => (lloyd(&data, &cfg)?, (0..data.n()).collect()),
    };
    let full_cost = cost(&data, &result.centers, 2.0)?;

    let prov = ctx.provenance(
        "lloyd",
        &json!({
            "input": a.input.input,
            "csv": opts,
            "coreset": a.coreset,
            "k": cfg.k,
            "iters": cfg.iters,
            "tol": cfg.tol,
            "init": cfg.init,
            "restarts": cfg.restarts,
        }),
    )?;
    if let Some(path) = &a.centers_out {
        csvio::write_centers(ctx.create(path)?, &result.centers, &prov.comments())?;
    }
    if let Some(path) = &a.assignment_out {
        csvio::write_assignment(ctx.create(path)?, &ids, &result.assignment, &prov.comments())?;
    }
    let report = json!({
        "cost": result.cost,
        "full_cost": full_cost,
        "iterations": result.iterations,
        "centers": result.centers.centers(),
    });
    println!("{report}");
    Ok(())
}

fn gen_synthetic(ctx: &Context, a: &SyntheticArgs) -> Result<()> {
    let mut spec = match &ctx.file.experiment {
        Some(ExperimentConfig {
            dataset: DatasetSource::Synthetic(s),
            ..
        }) => s.clone(),
        _ => SyntheticSpec::default(),
    };
    if let Some(v) = a.n {
        spec.n = v;
    }
    if let Some(v) = a.d {
        spec.d = v;
    }
    if let Some(v) = a.frac_far {
        spec.frac_far = v;
    }
    if let Some(v) = a.delete_frac {
        spec.delete_frac = v;
    }
    if let Some(v) = a.far_offset {
        spec.far_offset = v;
    }
    if let Some(v) = a.layout {
        spec.far_layout = v.into();
    }
    let data = mvcoreset::bench::gen_synthetic(&spec, ctx.seed)?;
    let prov = ctx.provenance("gen synthetic", &spec)?;
    csvio::write_dataset(sink(ctx, a.output.as_deref())?, &data, &prov.comments())?;
    Ok(())
}

fn gen_lower_bound(ctx: &Context, a: &LowerBoundArgs) -> Result<()> {
    let data = mvcoreset::bench::gen_lower_bound(a.j)?;
    let prov = ctx.provenance("gen lowerbound", &json!({"j": a.j}))?;
    csvio::write_dataset(sink(ctx, a.output.as_deref())?, &data, &prov.comments())?;
    Ok(())
}

fn experiment_config(ctx: &Context, a: &SweepArgs) -> Result<ExperimentConfig> {
    let f = &ctx.file;
    let mut cfg = f.experiment.clone().unwrap_or_default();
    if let Some(path) = &a.input {
        cfg.dataset = DatasetSource::File {
            path: path.clone(),
            csv: ctx.csv_options(a.delimiter, a.header.map(Into::into))?,
        };
    } else if let Some(n) = a.synthetic_n {
        let mut spec = match &cfg.dataset {
            DatasetSource::Synthetic(s) => s.clone(),
            _ => SyntheticSpec::default(),
        };
        spec.n = n;
        cfg.dataset = DatasetSource::Synthetic(spec);
    } else if let Some(j) = a.lowerbound_j {
        cfg.dataset = DatasetSource::LowerBound { j };
    }
    if let Some(v) = a.k.or(f.k) {
        cfg.k = v;
    }
    if let Some(v) = a.z.or(f.z) {
        cfg.z = v;
    }
    if let Some(v) = f.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = &a.sizes {
        cfg.sizes = v.clone();
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = &a.methods {
        cfg.methods = v.clone();
    }
    if let Some(v) = a.n_centers.or(f.n_centers) {
        cfg.n_centers = v;
    }
    if a.adversarial {
        cfg.centers = CenterSource::Adversarial;
    }
    if let Some(s) = &f.sensitivity {
        cfg.coreset.sensitivity = s.clone();
    }
    if a.family_size.is_some() {
        cfg.coreset.sensitivity.family_size = a.family_size;
    }
    if let Some(v) = f.merge_duplicates {
        cfg.coreset.merge_duplicates = v;
    }
    if let Some(v) = a.lloyd_iters.or(f.iters) {
        cfg.lloyd_iters = v;
    }
    if let Some(v) = f.tol {
        cfg.lloyd_tol = v;
    }
    if let Some(v) = a.lloyd_restarts.or(f.restarts) {
        cfg.lloyd_restarts = v;
    }
    if a.output.is_some() {
        cfg.output = a.output.clone();
    }
    cfg.seed = ctx.seed;
    cfg.validate()?;
    Ok(cfg)
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write_json(ctx: &Context, path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = ctx.create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn sweep(ctx: &Context, a: &SweepArgs) -> Result<()> {
    let cfg = experiment_config(ctx, a)?;
    let data = cfg.dataset.load(cfg.seed)?;
    log::info!("dataset: {} points, d = {}, j = {}", data.n(), data.d(), data.j());
    let prefix = cfg.output.clone().unwrap_or_else(|| PathBuf::from("sweep"));
    let csv_path = with_extension(&prefix, "csv");
    let json_path = with_extension(&prefix, "json");

    if a.lloyd_speedup {
        let prov = ctx.provenance("sweep lloyd-speedup", &cfg)?;
        let res = run_lloyd_speedup(&data, &cfg)?;
        let mut w = ctx.create(&csv_path)?;
        write_comments(&mut w, &prov.comments())?;
        write_speedup_csv(&mut w, &res.rows, false)?;
        w.flush()?;
        if let Some(path) = &a.timings_out {
            let mut w = ctx.create(path)?;
            write_comments(&mut w, &prov.comments())?;
            write_comments(&mut w, &[format!("reference-secs: {}", res.reference_secs)])?;
            write_speedup_csv(&mut w, &res.rows, true)?;
            w.flush()?;
        }
        let mut per_method = Vec::new();
        for m in &cfg.methods {
            let rows: Vec<_> = res.rows.iter().filter(|r| &r.method == m).collect();
            let mean = |f: &dyn Fn(&&mvcoreset::bench::SpeedupRow) -> f64| {
                rows.iter().map(f).sum::<f64>() / rows.len().max(1) as f64
            };
            let mean_err = mean(&|r| r.rel_error);
            let max_err = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
            eprintln!(
                "{m}: mean relative error {mean_err:.4}, mean speedup {:.2}x (reference {:.3}s)",
                mean(&|r| r.speedup),
                res.reference_secs
            );
            per_method.push(json!({"method": m, "mean_rel_error": mean_err, "max_rel_error": max_err}));
        }
        let summary = json!({
            "provenance": prov.json(),
            "config": cfg,
            "reference_cost": res.reference_cost,
            "reference_iterations": res.reference_iterations,
            "summary": per_method,
        });
        write_json(ctx, &json_path, &summary)?;
    } else {
        if a.timings_out.is_some() {
            log::warn!("--timings-out only applies with --lloyd-speedup");
        }
        let prov = ctx.provenance("sweep", &cfg)?;
        let res = run_size_error_sweep(&data, &cfg)?;
        let mut w = ctx.create(&csv_path)?;
        write_comments(&mut w, &prov.comments())?;
        write_sweep_csv(&mut w, &res.rows)?;
        w.flush()?;
        let summary = json!({
            "provenance": prov.json(),
            "config": cfg,
            "skipped_center_sets": res.skipped_center_sets,
            "summary": res.summary,
        });
        write_json(ctx, &json_path, &summary)?;
        for s in &res.summary {
            println!("{:<12} size {:>6}  mean {:.6}  std {:.6}", s.method, s.size, s.mean, s.std);
        }
    }
    Ok(())
}

fn family_build(ctx: &Context, a: &FamilyBuildArgs) -> Result<()> {
    let mut fam = build_family_capped(a.d, a.j, a.k, a.size, ctx.seed, a.cap.unwrap_or(DEFAULT_SIZE_CAP))?;
    let verification = if a.verify {
        let v = fam.verify(VerifyMode::exhaustive())?;
        if !v.valid {
            log::warn!("family misses the pair {:?}", v.counterexample);
        }
        Some(v)
    } else {
        None
    };
    let prov = ctx.provenance(
        "family build",
        &json!({"d": a.d, "j": a.j, "k": a.k, "size": a.size, "cap": a.cap}),
    )?;
    let mut value: Value = serde_json::from_str(&fam.to_json()?)?;
    value["provenance"] = prov.json();
    if let Some(v) = &verification {
        value["verification"] = verification_json(v);
    }
    let mut w = sink(ctx, a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &value)?;
    writeln!(w)?;
    w.flush()?;
    log::info!("family of {} subsets", fam.len());
    Ok(())
}

fn verification_json(v: &mvcoreset::family::Verification) -> Value {
    json!({
        "valid": v.valid,
        "pairs_checked": v.pairs_checked.to_string(),
        "counterexample": v.counterexample,
    })
}

fn family_verify(ctx: &Context, a: &FamilyVerifyArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let fam = CoordinateFamily::from_json(&text).with_context(|| format!("parsing {}", a.input.display()))?;
    let mode = match a.sampled {
        Some(trials) => VerifyMode::Sampled { trials, seed: ctx.seed },
        None => match a.budget {
            Some(budget) => VerifyMode::Exhaustive { budget },
            None => VerifyMode::exhaustive(),
        },
    };
    let v = verify_family(&fam, mode)?;
    println!("{}", verification_json(&v));
    Ok(if v.valid { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
