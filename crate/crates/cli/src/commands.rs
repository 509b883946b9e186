use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use curvereg::landmarks::{self, MatchScale};
use curvereg::metrics::mean_squared_distance;
use curvereg::simulate::{self, EstimatorConfig, PreparedScenario, Scenario, ScenarioSpec, WarpChoice};
use curvereg::{
    optimizer, AlignmentConfig, AlignmentProblem, Bandwidths, DedupePolicy, Init, LinearSplineWarp, OptimizerConfig,
    SlopeBounds, TimeSeries,
};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::manifest::{FileDigest, OutputSet, RunManifest};
use crate::{
    Cli, Command, Dedupe, DistanceArgs, InitKind, KernelArgs, LandmarksArgs, MeasureArgs, RegisterArgs, SearchArgs,
    SimulateArgs, TrueWarpArg,
};

/// Overrides the directory relative input paths are looked up in.
pub const DATA_DIR_ENV: &str = "CURVEREG_DATA_DIR";
/// Base curve file looked for in the data directory by `simulate`.
pub const DEFAULT_BASE_FILE: &str = "vostok_co2.csv";

pub struct Report {
    pub json: Value,
    pub text: String,
}

pub fn dispatch(cli: &Cli, argv: &[String]) -> CliResult<Report> {
    let ctx = Context { cli, argv };
    match &cli.command {
        Command::Register(a) => register(&ctx, a),
        Command::Measure(a) => measure(&ctx, a),
        Command::Landmarks(a) => detect_landmarks(&ctx, a),
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Distance(a) => distance(&ctx, a),
    }
}

struct Context<'a> {
    cli: &'a Cli,
    argv: &'a [String],
}

impl Context<'_> {
    fn dedupe(&self) -> DedupePolicy {
        match self.cli.dedupe {
            Dedupe::Average => DedupePolicy::Average,
            Dedupe::Error => DedupePolicy::Error,
        }
    }

    fn manifest(&self, command: &str, config: Value, inputs: Vec<FileDigest>) -> RunManifest {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv: self.argv.to_vec(),
            seed: self.cli.seed,
            threads: rayon::current_num_threads(),
            config,
            inputs,
            outputs: Vec::new(),
        }
    }

    fn read_series(&self, path: &Path) -> CliResult<(TimeSeries, FileDigest)> {
        let path = resolve_input(path);
        let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::io(&path, e))?;
        let ts = TimeSeries::parse_csv(&text, self.dedupe()).map_err(|e| match e {
            curvereg::Error::Parse { line, message } => CliError::Core(curvereg::Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            }),
            other => other.into(),
        })?;
        Ok((ts, FileDigest::of_bytes(&path, &bytes)))
    }
}

/// Relative paths missing from the working directory are looked up in the
/// data directory, when one is configured.
fn resolve_input(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) => {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                candidate
            } else {
                path.to_path_buf()
            }
        }
        None => path.to_path_buf(),
    }
}

/// Reads a warp file, or the `warp` member of a `register` result.
fn read_warp(path: &Path) -> CliResult<(LinearSplineWarp, FileDigest)> {
    let path = resolve_input(path);
    let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
    let bad = |e: serde_json::Error| CliError::BadJson {
        path: path.clone(),
        message: e.to_string(),
    };
    let mut value: Value = serde_json::from_slice(&bytes).map_err(bad)?;
    if let Some(inner) = value.get_mut("warp") {
        value = inner.take();
    }
    let warp = serde_json::from_value(value).map_err(bad)?;
    Ok((warp, FileDigest::of_bytes(&path, &bytes)))
}

fn alignment_config(k: &KernelArgs, d1: &TimeSeries, d2: &TimeSeries) -> CliResult<AlignmentConfig> {
    let bandwidths = match (k.h1, k.h2) {
        (Some(h1), Some(h2)) => Bandwidths::new(h1, h2)?,
        (h1, h2) => {
            let def = Bandwidths::default_for(d1, d2)?;
            Bandwidths::new(h1.unwrap_or(def.h1()), h2.unwrap_or(def.h2()))?
        }
    };
    if k.partitions == 0 {
        return Err(CliError::Usage("--partitions must be positive".into()));
    }
    Ok(AlignmentConfig {
        kernel1: k.kernel,
        kernel2: k.kernel2,
        bandwidths,
        prune_radius: k.prune,
        partitions: k.partitions,
    })
}

fn optimizer_config(s: &SearchArgs, inputs: &mut Vec<FileDigest>) -> CliResult<OptimizerConfig> {
    let init = match (&s.init_warp, s.init) {
        (Some(path), _) => {
            let (warp, digest) = read_warp(path)?;
            inputs.push(digest);
            Init::Provided(warp)
        }
        (None, InitKind::Landmarks) => Init::Landmarks {
            prominence_frac: s.prominence,
        },
        (None, InitKind::Identity) => Init::Identity,
    };
    let cfg = OptimizerConfig {
        max_iterations: s.max_iter,
        rel_tolerance: s.tol,
        slope_bounds: (!s.free).then(|| SlopeBounds::new(s.slope_min, s.slope_max)),
        contain: !s.free && !s.no_contain,
        init,
        ..OptimizerConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn to_value(x: &impl serde::Serialize) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn pretty(x: &impl serde::Serialize) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn manifest_path_for(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn register(ctx: &Context, a: &RegisterArgs) -> CliResult<Report> {
    let (d1, f1) = ctx.read_series(&a.pair.data1)?;
    let (d2, f2) = ctx.read_series(&a.pair.data2)?;
    let mut inputs = vec![f1, f2];
    let cfg = alignment_config(&a.kernel, &d1, &d2)?;
    let opt = optimizer_config(&a.search, &mut inputs)?;
    let res = optimizer::register(&d1, &d2, a.knots, &cfg, &opt)?;
    let registered = res.registered(&d2)?;

    let mut out = to_value(&res);
    out["knots"] = json!(a.knots);
    out["alignment"] = to_value(&cfg);
    out["registered"] = json!({ "times": registered.times(), "values": registered.values() });

    let config = json!({ "args": to_value(a), "alignment": to_value(&cfg), "optimizer": to_value(&opt) });
    if let Some(manifest_at) = a.out.as_deref().or(a.aligned.as_deref()).map(manifest_path_for) {
        let mut set = OutputSet::new(ctx.manifest("register", config, inputs), manifest_at);
        if let Some(path) = &a.out {
            set.write(path, &pretty(&out))?;
        }
        if let Some(path) = &a.aligned {
            set.write(path, registered.to_csv().as_bytes())?;
        }
        set.finish()?;
    }

    let mut text = String::new();
    let start = res.objective_trace.first().copied().unwrap_or(f64::NAN);
    let _ = writeln!(
        text,
        "L_n {start:.6} -> {:.6} after {} iterations ({:?})",
        res.final_value.l_n, res.iterations, res.stop_reason
    );
    let _ = writeln!(text, "h1 = {}, h2 = {}", cfg.bandwidths.h1(), cfg.bandwidths.h2());
    for (k, v) in res.warp.knots().iter().zip(res.warp.values()) {
        let _ = writeln!(text, "{k:.4}\t{v:.4}");
    }
    for w in &res.warnings {
        let _ = writeln!(text, "warning: {w}");
    }
    Ok(Report { json: out, text })
}

fn measure(ctx: &Context, a: &MeasureArgs) -> CliResult<Report> {
    let (d1, _) = ctx.read_series(&a.pair.data1)?;
    let (d2, _) = ctx.read_series(&a.pair.data2)?;
    let warp = match &a.warp {
        Some(p) => read_warp(p)?.0,
        None => LinearSplineWarp::identity(d2.time_range(), 2)?,
    };
    let cfg = alignment_config(&a.kernel, &d1, &d2)?;
    let v = AlignmentProblem::new(&d1, &d2, cfg)?.measure(&warp)?;
    Ok(Report {
        json: to_value(&v),
        text: format!("L_n = {:?}\nN_n = {:?}\nD_n = {:?}\n", v.l_n, v.numerator, v.denominator),
    })
}

fn landmark_csv(list: &[curvereg::Landmark]) -> String {
    let mut s = String::from("time,value,kind,prominence\n");
    for l in list {
        let _ = writeln!(s, "{:?},{:?},{},{:?}", l.time, l.value, l.kind, l.prominence);
    }
    s
}

fn detect_landmarks(ctx: &Context, a: &LandmarksArgs) -> CliResult<Report> {
    if !(a.prominence > 0.0 && a.prominence <= 1.0) {
        return Err(CliError::Usage("--prominence must lie in (0, 1]".into()));
    }
    let (d1, f1) = ctx.read_series(&a.data1)?;
    let mut inputs = vec![f1];
    let l1 = landmarks::detect(&d1, a.prominence);
    let mut json = json!({ "landmarks1": l1 });
    let mut text = format!("data set 1: {} landmarks\n", l1.len());
    let mut second = None;
    if let Some(p) = &a.data2 {
        let (d2, f2) = ctx.read_series(p)?;
        inputs.push(f2);
        let l2 = landmarks::detect(&d2, a.prominence);
        let m = landmarks::match_landmarks(&l2, &l1, &MatchScale::from_series(&d2, &d1));
        let _ = writeln!(text, "data set 2: {} landmarks\n{} matched pairs (s -> t):", l2.len(), m.pairs.len());
        for (s, t) in &m.pairs {
            let _ = writeln!(text, "{s:.4}\t{t:.4}");
        }
        json["landmarks2"] = to_value(&l2);
        json["match"] = to_value(&m);
        second = Some((l2, m));
    }
    if let Some(dir) = &a.out {
        let config = json!({ "args": to_value(a) });
        let mut set = OutputSet::new(ctx.manifest("landmarks", config, inputs), dir.join("manifest.json"));
        set.write(&dir.join("landmarks1.csv"), landmark_csv(&l1).as_bytes())?;
        if let Some((l2, m)) = &second {
            set.write(&dir.join("landmarks2.csv"), landmark_csv(l2).as_bytes())?;
            let mut pairs = String::from("s,t\n");
            for (s, t) in &m.pairs {
                let _ = writeln!(pairs, "{s:?},{t:?}");
            }
            set.write(&dir.join("matches.csv"), pairs.as_bytes())?;
        }
        set.finish()?;
    }
    Ok(Report { json, text })
}

fn simulate(ctx: &Context, a: &SimulateArgs) -> CliResult<Report> {
    let scenario = Scenario::from_number(a.scenario)?;
    let mut inputs = Vec::new();
    let (base, base_source) = match &a.base {
        Some(p) => {
            let (ts, digest) = ctx.read_series(p)?;
            let src = digest.path.clone();
            inputs.push(digest);
            (ts, src)
        }
        None => {
            let candidate = std::env::var_os(DATA_DIR_ENV).map(|d| Path::new(&d).join(DEFAULT_BASE_FILE));
            match candidate.filter(|p| p.exists()) {
                Some(p) => {
                    let (ts, digest) = ctx.read_series(&p)?;
                    let src = digest.path.clone();
                    inputs.push(digest);
                    (ts, src)
                }
                None => (simulate::synthetic_base_curve(), "synthetic".to_string()),
            }
        }
    };
    let mut spec = ScenarioSpec::standard(scenario, base, a.runs, ctx.cli.seed);
    if !(a.noise_frac >= 0.0 && a.noise_frac.is_finite()) {
        return Err(CliError::Usage("--noise-frac must be non-negative".into()));
    }
    spec.noise_sd = a.noise_frac * spec.base.value_sd();
    if let Some(n) = a.n1 {
        spec.n1 = n;
    }
    if let Some(n) = a.n2 {
        spec.n2 = n;
    }
    if let Some(w) = a.true_warp {
        spec.true_warp = match w {
            TrueWarpArg::Spline => WarpChoice::Spline,
            TrueWarpArg::Periodic => WarpChoice::Periodic,
        };
    }
    let mut est = EstimatorConfig::for_scenario(scenario);
    if let Some(k) = a.knots {
        est.knots = k;
    }
    if let (Some(h1), Some(h2)) = (a.h1, a.h2) {
        est.bandwidths = Some(Bandwidths::new(h1, h2)?);
    }
    est.optimizer = optimizer_config(&a.search, &mut inputs)?;

    let prepared = PreparedScenario::new(spec.clone())?;
    let study = simulate::run_study(&spec, &est)?;
    let sup = study.sup_errors();
    let failed: Vec<Value> = study
        .runs
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| json!({ "run_index": r.run_index, "error": e })))
        .collect();
    let report = json!({
        "scenario": a.scenario,
        "runs": a.runs,
        "failures": study.failures,
        "failed_runs": failed,
        "normalized_imse": study.summary.normalized_imse,
        "sup_errors": sup,
        "noise_sd": spec.noise_sd,
        "knots": est.knots,
        "warp_domain": prepared.warp_domain(),
        "evaluation_domain": prepared.evaluation_domain(),
        "dropped_fixed_times": prepared.dropped_fixed_times(),
        "base": base_source,
    });

    if let Some(dir) = &a.out {
        let config = json!({
            "args": to_value(a),
            "base": base_source,
            "spec": {
                "scenario": a.scenario,
                "n1": spec.n1,
                "n2": spec.n2,
                "noise_sd": spec.noise_sd,
                "true_warp": to_value(prepared.true_warp()),
                "runs": spec.runs,
                "seed": spec.seed,
            },
            "estimator": to_value(&est),
        });
        let mut set = OutputSet::new(ctx.manifest("simulate", config, inputs), dir.join("manifest.json"));
        for r in &study.runs {
            let body = match &r.result {
                Some(res) => pretty(&res.warp),
                None => pretty(&json!({ "error": r.error })),
            };
            set.write(&dir.join("runs").join(format!("run_{:04}.json", r.run_index)), &body)?;
        }
        set.write(&dir.join("summary.csv"), study.summary.to_csv().as_bytes())?;
        set.write(&dir.join("imse.txt"), format!("{:?}\n", study.summary.normalized_imse).as_bytes())?;
        set.write(&dir.join("study.json"), &pretty(&report))?;
        set.finish()?;
    }

    let mut sorted = sup.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(f64::NAN);
    let text = format!(
        "scenario {} ({} runs, {} failed)\nnormalized IMSE {:e}\nmedian sup error {median:.4}\n",
        a.scenario, a.runs, study.failures, study.summary.normalized_imse
    );
    Ok(Report { json: report, text })
}

fn distance(ctx: &Context, a: &DistanceArgs) -> CliResult<Report> {
    let (d1, _) = ctx.read_series(&a.pair.data1)?;
    let (d2, _) = ctx.read_series(&a.pair.data2)?;
    let pre = mean_squared_distance(&d1, &d2, a.grid)?;
    let mut json = json!({ "pre": pre, "grid": a.grid });
    let mut text = format!("pre-alignment  {pre:?}\n");
    if let Some(p) = &a.warp {
        let (warp, _) = read_warp(p)?;
        let aligned = d2.map_times(|s| warp.evaluate(s))?;
        let post = mean_squared_distance(&d1, &aligned, a.grid)?;
        json["post"] = json!(post);
        let _ = writeln!(text, "post-alignment {post:?}");
    }
    Ok(Report { json, text })
}
