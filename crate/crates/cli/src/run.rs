use std::io::Read;
use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use indset::algorithms::expander::{
    count_expander, expander_sampler, ExpanderOptions, PolymerSample, SamplerMode, SamplerOptions, Strategy,
};
use indset::algorithms::general::{count_general, GeneralMode, GeneralOptions};
use indset::algorithms::hardcore::{count_hardcore_expander, hardcore_sampler, HardCoreParams};
use indset::algorithms::{ApproxCount, Method};
use indset::containers::{count_below, count_via_certificates};
use indset::expansion::{choose_ell, ln_bigint, ln_rational, verify_kp, KpFunctions};
use indset::oracle::{exact_count_bipartite, exact_count_general, exact_distribution, exact_hardcore, IndependentSet};
use indset::polymer::{for_each_cluster, ClusterOptions, Fugacity, PolymerFamily, PolymerUniverse, WeightModel};
use indset::simple::SimpleGraph;
use indset::{generate, BipartiteGraph, BitSet, Error, ExpanderCheck, ExpanderVerdict, ExpansionParams, InstanceSpec, Side};

use crate::config::*;
use crate::render::{exact_decimal, exact_string, scientific_from_ln};

pub const SCHEMA: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Capacity(_)) => 3,
            CliError::Core(_) | CliError::Input(_) => 2,
            CliError::Internal(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "invalid_input",
            3 => "capacity",
            _ => "internal",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut e = json!({ "kind": self.kind(), "message": self.to_string() });
        if let CliError::Core(Error::Parse { line, .. }) = self {
            e["line"] = json!(line);
        }
        json!({ "schema": SCHEMA, "error": e })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

impl Command {
    pub fn common_mut(&mut self) -> Option<&mut Common> {
        match self {
            Command::Gen(a) => Some(&mut a.common),
            Command::Count(a) => Some(&mut a.common),
            Command::Sample(a) => Some(&mut a.common),
            Command::VerifyKp(a) => Some(&mut a.common),
            Command::Certify(a) => Some(&mut a.common),
            Command::CheckExpander(a) => Some(&mut a.common),
            Command::Bench(a) => Some(&mut a.common),
            Command::Replay(_) => None,
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Gen(a) => Some(a.seed),
            Command::Count(a) => Some(a.seed),
            Command::Sample(a) => Some(a.seed),
            Command::CheckExpander(a) => Some(a.seed),
            Command::Bench(a) => Some(a.seed),
            _ => None,
        }
    }
}

/// Reads the configuration stored in a JSON result (or a bare configuration object).
pub fn load_replay(args: &ReplayArgs) -> CliResult<Command> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| input(format!("cannot read {}: {e}", args.config.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", args.config.display())))?;
    let cfg = v.get("config").cloned().unwrap_or(v);
    let mut cmd: Command = serde_json::from_value(cfg).map_err(|e| input(format!("bad stored configuration: {e}")))?;
    if let Some(out) = &args.output {
        if let Some(c) = cmd.common_mut() {
            c.output = Some(out.clone());
        }
    }
    Ok(cmd)
}

/// Runs a fully resolved command and returns the text to emit.
pub fn run(cmd: &Command) -> CliResult<String> {
    let start = Instant::now();
    let result = match cmd {
        Command::Gen(a) => return gen(a, cmd),
        Command::Bench(a) => return bench(a),
        Command::Count(a) => count(a)?,
        Command::Sample(a) => sample(a)?,
        Command::VerifyKp(a) => verify(a)?,
        Command::Certify(a) => certify(a)?,
        Command::CheckExpander(a) => check_expander(a)?,
        Command::Replay(_) => return Err(CliError::Internal("replay must be resolved before running".into())),
    };
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    out.insert("config".into(), serde_json::to_value(cmd).map_err(|e| CliError::Internal(e.to_string()))?);
    if let Some(seed) = cmd.seed() {
        out.insert("seed".into(), json!(seed));
    }
    out.insert("result".into(), result);
    out.insert("elapsed_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    let mut text = serde_json::to_string_pretty(&Value::Object(out)).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn load_graph(gi: &GraphInput) -> CliResult<BipartiteGraph> {
    let text = if gi.graph.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&gi.graph).map_err(|e| input(format!("cannot read {}: {e}", gi.graph.display())))?
    };
    BipartiteGraph::parse(&text).map_err(|e| match e {
        Error::Parse { line, message } => input(format!("{}:{line}: {message}", gi.graph.display())),
        other => other.into(),
    })
}

fn params(c: &Constants) -> CliResult<ExpansionParams> {
    Ok(ExpansionParams::new(c.c1, c.alpha)?)
}

fn cluster_opts(c: &Constants) -> ClusterOptions {
    ClusterOptions { max_polymers: c.max_cluster_polymers }
}

fn parse_lambda(l: &LambdaArgs) -> CliResult<Option<Fugacity>> {
    let Some(text) = &l.lambda else { return Ok(None) };
    if l.float_lambda {
        let x: f64 = text.trim().parse().map_err(|_| input(format!("cannot read fugacity {text:?}")))?;
        return Ok(Some(Fugacity::float(x)?));
    }
    Fugacity::parse(text)
        .map(Some)
        .map_err(|e| input(format!("{e}; pass a fraction p/q, or add --float-lambda for floating point")))
}

fn hardcore_params(l: Fugacity, c: &Constants) -> CliResult<HardCoreParams> {
    let mut hp = HardCoreParams::new(l, c.alpha)?;
    hp.c4 = c.c4;
    hp.c5 = c.c5;
    Ok(hp)
}

fn set_json(s: &IndependentSet) -> Value {
    json!({ "x": s.x.to_vec(), "y": s.y.to_vec() })
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::X => "x",
        Side::Y => "y",
    }
}

fn exact_fields(obj: &mut Value, r: &BigRational) {
    obj["value"] = json!(exact_string(r));
    obj["decimal"] = json!(exact_decimal(r));
}

fn count_json(c: &ApproxCount) -> CliResult<Value> {
    let mut v = serde_json::to_value(c).map_err(|e| CliError::Internal(e.to_string()))?;
    match &c.exact {
        Some(r) => exact_fields(&mut v, r),
        None => {
            v["value"] = Value::Null;
            v["decimal"] = json!(scientific_from_ln(c.log_value));
        }
    }
    Ok(v)
}

fn oracle_count(g: &BipartiteGraph, lambda: Option<&Fugacity>) -> CliResult<ApproxCount> {
    let value = match lambda {
        None => BigRational::from_integer(BigInt::from(exact_count_bipartite(g)?.value)),
        Some(l) => {
            let l = l.as_exact().ok_or_else(|| input("the oracle needs an exact fugacity"))?;
            exact_hardcore(g, l)?.value
        }
    };
    Ok(ApproxCount {
        log_value: ln_rational(&value),
        rel_error_bound: 0.0,
        method: Method::Oracle,
        side_breakdown: None,
        certified: true,
        kp_status: None,
        exact: Some(value),
        notes: Vec::new(),
    })
}

fn count(a: &CountArgs) -> CliResult<Value> {
    let g = load_graph(&a.input)?;
    let p = params(&a.constants)?;
    let lambda = parse_lambda(&a.lambda)?;
    let cluster = cluster_opts(&a.constants);
    let mut extra = Map::new();
    let c = match a.mode {
        CountMode::Oracle => {
            let c = oracle_count(&g, lambda.as_ref())?;
            if a.dump_dist {
                extra.insert("distribution".into(), dump_distribution(&g, lambda.as_ref(), a.dump_limit)?);
            }
            c
        }
        CountMode::Expander => {
            let opts = ExpanderOptions {
                strategy: match a.strategy {
                    StrategyArg::Auto => Strategy::Auto,
                    StrategyArg::Brute => Strategy::Brute,
                    StrategyArg::Expansion => Strategy::Expansion,
                },
                check_kp: a.check_kp,
                cluster,
            };
            let (fam, model) = match &lambda {
                None => (PolymerFamily::expanding(Side::X, p), WeightModel::Unweighted),
                Some(l) => {
                    let hp = hardcore_params(l.clone(), &a.constants)?;
                    extra.insert("beta".into(), json!(indset::algorithms::hardcore::beta_display(&hp, g.degree())));
                    extra.insert("conditions".into(), json!(hp.conditions(g.degree())));
                    (PolymerFamily::small(Side::X), hp.model())
                }
            };
            let c = match &lambda {
                None => count_expander(&g, a.eps, &p, &opts)?,
                Some(l) => count_hardcore_expander(&g, &hardcore_params(l.clone(), &a.constants)?, a.eps, &opts)?,
            };
            if a.dump_clusters {
                extra.insert("clusters".into(), dump_clusters(&g, &fam, &model, a.eps, cluster, a.dump_limit)?);
            }
            c
        }
        CountMode::General => {
            if lambda.is_some() {
                return Err(input("the general algorithm counts unweighted independent sets only"));
            }
            let opts = GeneralOptions {
                mode: if a.exact { GeneralMode::Exact } else { GeneralMode::MonteCarlo },
                cluster,
            };
            let r = count_general(&g, a.eps, a.delta, a.seed, &p, &opts)?;
            extra.insert(
                "census".into(),
                json!({
                    "families": r.families,
                    "distinct_sets": r.distinct_sets,
                    "largest_family": r.largest_family,
                    "truncation": r.truncation,
                    "skipped_expanding": r.skipped_expanding,
                    "d_samples": r.d_samples,
                    "d_epsilon": r.d_epsilon,
                    "d_delta": r.d_delta,
                    "restricted_polymers_checked": r.restricted_polymers_checked,
                }),
            );
            r.count
        }
    };
    let mut v = count_json(&c)?;
    v["graph"] = json!({ "n": g.n_x(), "d": g.degree(), "fingerprint": indset::oracle::fingerprint(&g) });
    for (k, x) in extra {
        v[k] = x;
    }
    Ok(v)
}

fn dump_distribution(g: &BipartiteGraph, lambda: Option<&Fugacity>, limit: usize) -> CliResult<Value> {
    let one = BigRational::from_integer(1.into());
    let l = match lambda {
        None => one,
        Some(f) => f.as_exact().cloned().ok_or_else(|| input("the oracle needs an exact fugacity"))?,
    };
    let dist = exact_distribution(g, &l)?;
    let entries: Vec<Value> = dist
        .entries
        .iter()
        .take(limit)
        .map(|(s, p)| json!({ "set": set_json(s), "probability": exact_string(p) }))
        .collect();
    Ok(json!({ "total": dist.entries.len(), "truncated": dist.entries.len() > limit, "entries": entries }))
}

fn dump_clusters(
    g: &BipartiteGraph,
    fam: &PolymerFamily,
    model: &WeightModel,
    eps: f64,
    opts: ClusterOptions,
    limit: usize,
) -> CliResult<Value> {
    let ell = choose_ell(g.n_x(), g.degree(), eps / 4.0, model.is_weighted())?;
    let u = PolymerUniverse::build(g, fam, ell)?;
    let ln_w = u.ln_weights(model);
    let mut entries = Vec::new();
    let stats = for_each_cluster(&u, ell, opts, &mut |t| {
        if entries.len() < limit {
            let polymers: Vec<Vec<usize>> = t.support.iter().map(|&i| u.polymer(i).vertices.to_vec()).collect();
            entries.push(json!({
                "polymers": polymers,
                "multiplicity": t.multiplicity,
                "size": t.size,
                "ursell": t.ursell,
                "term": t.value_f64(&ln_w),
            }));
        }
        Ok(())
    })?;
    Ok(json!({
        "side": "x",
        "ell": ell,
        "polymers": u.len(),
        "total": stats.clusters,
        "truncated": stats.clusters > limit,
        "entries": entries,
    }))
}

fn sample(a: &SampleArgs) -> CliResult<Value> {
    let g = load_graph(&a.input)?;
    let lambda = parse_lambda(&a.lambda)?;
    match a.mode {
        SampleMode::Oracle => {
            let l = match &lambda {
                None => BigRational::from_integer(1.into()),
                Some(f) => f.as_exact().cloned().ok_or_else(|| input("the oracle needs an exact fugacity"))?,
            };
            let dist = exact_distribution(&g, &l)?;
            let sets: Vec<Value> = (0..a.samples)
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                    rng.set_stream(i as u64);
                    set_json(&dist.sample(&mut rng))
                })
                .collect();
            Ok(json!({ "method": Method::Oracle, "exact": true, "samples": sets }))
        }
        SampleMode::Expander => {
            let p = params(&a.constants)?;
            let opts = SamplerOptions {
                mode: match a.sampler {
                    SamplerArg::Auto => SamplerMode::Auto,
                    SamplerArg::Exact => SamplerMode::Exact,
                    SamplerArg::SelfReducible => SamplerMode::SelfReducible,
                },
                cluster: cluster_opts(&a.constants),
                config_cap: a.config_cap,
            };
            let sampler = match &lambda {
                None => expander_sampler(&g, a.eps, &p, &opts)?,
                Some(l) => hardcore_sampler(&g, &hardcore_params(l.clone(), &a.constants)?, a.eps, &opts)?,
            };
            let draws = sampler.sample_many(a.seed, a.samples)?;
            let sets: Vec<Value> = draws.iter().map(sample_json).collect();
            Ok(json!({
                "method": Method::ExpanderCe,
                "exact_tables": sampler.is_exact(),
                "ell": sampler.ell,
                "ln_xi": { "x": sampler.ln_xi[0], "y": sampler.ln_xi[1] },
                "p_x": sampler.side_probability(Side::X),
                "samples": sets,
            }))
        }
    }
}

fn sample_json(s: &PolymerSample) -> Value {
    let polymers: Vec<Vec<usize>> = s.polymers.iter().map(BitSet::to_vec).collect();
    let mut v = set_json(&s.set);
    v["side"] = json!(side_name(s.side));
    v["polymers"] = json!(polymers);
    v
}

fn verify(a: &KpArgs) -> CliResult<Value> {
    let g = load_graph(&a.input)?;
    let d = g.degree();
    if d < 2 {
        return Err(input("the Kotecký–Preiss functions need degree at least 2"));
    }
    let p = params(&a.constants)?;
    let side = match a.side {
        SideArg::X => Side::X,
        SideArg::Y => Side::Y,
    };
    let fam = match a.family {
        FamilyArg::Expanding => PolymerFamily::expanding(side, p),
        FamilyArg::Small => PolymerFamily::small(side),
    };
    let (model, kp) = match parse_lambda(&a.lambda)? {
        None => (WeightModel::Unweighted, KpFunctions::unweighted(d)),
        Some(l) => {
            let hp = hardcore_params(l, &a.constants)?;
            (hp.model(), KpFunctions::weighted(hp.c5, hp.alpha, hp.beta(d)))
        }
    };
    let report = verify_kp(&g, &fam, &model, &kp, a.cap)?;
    Ok(serde_json::to_value(report).map_err(|e| CliError::Internal(e.to_string()))?)
}

fn certify(a: &CertifyArgs) -> CliResult<Value> {
    let g = load_graph(&a.input)?;
    let sg = SimpleGraph::from_bipartite(&g);
    let ordering: Vec<usize> = (0..sg.n()).collect();
    let below = count_below(&sg, a.t)?;
    let census = count_via_certificates(&sg, a.t, &ordering, |h| Ok(exact_count_general(h)?.value))?;
    let total = &below + &census.at_least_t;
    let truth = exact_count_bipartite(&g)?.value;
    let n = sg.n() as f64;
    let d = g.degree() as f64;
    let bound = if d > 1.0 { n / 2.0 + 4.0 * n * d.ln() / d } else { n };
    Ok(json!({
        "t": a.t,
        "certificates": census.certificates,
        "below_t": below.to_string(),
        "at_least_t": census.at_least_t.to_string(),
        "total": total.to_string(),
        "oracle": truth.to_string(),
        "identity_holds": total == truth,
        "log_value": ln_bigint(&BigInt::from(total.clone())),
        "largest_region": census.largest_region,
        "region_bound": bound,
        "region_bound_holds": census.largest_region as f64 <= bound,
    }))
}

fn check_expander(a: &CheckExpanderArgs) -> CliResult<Value> {
    let g = load_graph(&a.input)?;
    let mode = match a.method {
        CheckMethod::Exhaustive => ExpanderCheck::Exhaustive { cap: a.cap },
        CheckMethod::Heuristic => ExpanderCheck::Heuristic {
            samples: a.samples,
            linked_size_cap: a.linked_cap,
            seed: a.seed,
        },
    };
    Ok(match g.check_alpha_expander(a.alpha, mode)? {
        ExpanderVerdict::Verified => json!({ "verdict": "verified" }),
        ExpanderVerdict::Unknown => json!({ "verdict": "unknown" }),
        ExpanderVerdict::Falsified { witness } => json!({
            "verdict": "falsified",
            "witness": { "side": side_name(witness.side), "vertices": witness.to_vec() },
        }),
    })
}

fn gen_spec(a: &GenArgs) -> CliResult<InstanceSpec> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| input(format!("--kind {:?} needs --{name}", a.kind)));
    Ok(match a.kind {
        Kind::Cycle => InstanceSpec::EvenCycle { m: need(a.m, "m")? },
        Kind::Hypercube => InstanceSpec::Hypercube { d: need(a.d, "d")? },
        Kind::Complete => InstanceSpec::CompleteBipartite { d: need(a.d, "d")? },
        Kind::Random => InstanceSpec::RandomRegular {
            n: need(a.n, "n")?,
            d: need(a.d, "d")?,
            seed: a.seed,
        },
        Kind::Torus => {
            if a.dims.is_empty() {
                return Err(input("--kind torus needs --dims"));
            }
            InstanceSpec::EvenTorus { dims: a.dims.clone() }
        }
    })
}

fn gen(a: &GenArgs, cmd: &Command) -> CliResult<String> {
    let g = generate(&gen_spec(a)?)?;
    let cfg = json!({ "schema": SCHEMA, "config": cmd });
    Ok(format!("c {cfg}\n{}", g.to_text()))
}

/// Parses `cycle:8`, `hypercube:4`, `complete:3`, `random:n:d:seed` or `torus:4x6`.
pub fn parse_instance(text: &str) -> CliResult<InstanceSpec> {
    let bad = || input(format!("cannot read instance {text:?}"));
    let parts: Vec<&str> = text.trim().split(':').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    Ok(match parts.as_slice() {
        ["cycle", m] => InstanceSpec::EvenCycle { m: num(m)? },
        ["hypercube", d] => InstanceSpec::Hypercube { d: num(d)? },
        ["complete", d] => InstanceSpec::CompleteBipartite { d: num(d)? },
        ["random", n, d, seed] => InstanceSpec::RandomRegular {
            n: num(n)?,
            d: num(d)?,
            seed: seed.parse().map_err(|_| bad())?,
        },
        ["torus", dims] => InstanceSpec::EvenTorus {
            dims: dims.split('x').map(num).collect::<CliResult<_>>()?,
        },
        _ => return Err(bad()),
    })
}

fn bench(a: &BenchArgs) -> CliResult<String> {
    let p = params(&a.constants)?;
    let cluster = cluster_opts(&a.constants);
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["instance", "n", "d", "mode", "log_value", "rel_error_bound", "certified", "seconds", "status"];
    w.write_record(header).map_err(|e| CliError::Internal(e.to_string()))?;
    for name in &a.instances {
        let g = generate(&parse_instance(name)?)?;
        for &mode in &a.modes {
            let start = Instant::now();
            let r = match mode {
                CountMode::Oracle => oracle_count(&g, None),
                CountMode::Expander => {
                    let opts = ExpanderOptions { cluster, ..Default::default() };
                    count_expander(&g, a.eps, &p, &opts).map_err(CliError::from)
                }
                CountMode::General => {
                    let opts = GeneralOptions { cluster, ..Default::default() };
                    count_general(&g, a.eps, a.delta, a.seed, &p, &opts)
                        .map(|r| r.count)
                        .map_err(CliError::from)
                }
            };
            let secs = start.elapsed().as_secs_f64();
            let mode_name = serde_json::to_value(mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let row = match r {
                Ok(c) => vec![
                    name.clone(),
                    g.n_x().to_string(),
                    g.degree().to_string(),
                    mode_name,
                    format!("{:.12}", c.log_value),
                    format!("{:e}", c.rel_error_bound),
                    c.certified.to_string(),
                    format!("{secs:.6}"),
                    "ok".to_string(),
                ],
                Err(e) => vec![
                    name.clone(),
                    g.n_x().to_string(),
                    g.degree().to_string(),
                    mode_name,
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("{secs:.6}"),
                    e.kind().to_string(),
                ],
            };
            w.write_record(&row).map_err(|e| CliError::Internal(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

/// Writes `text` to the configured output, or standard output.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
