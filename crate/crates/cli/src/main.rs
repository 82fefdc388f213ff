use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levyarma::asymptotics::{limit_integral, verify_table1, GFunction};
use levyarma::coeffs::{asym_descriptor, coefficients, ModelSpec};
use levyarma::dependence::{codifference, dependence, DependenceOptions, DependenceValue};
use levyarma::findist::{joint_cf_from_spectral, rac_joint, stable_spectral};
use levyarma::innovations::{InnovationSpec, PowerRadial, RacSpec, RadialDensity, TemperedRadial};
use levyarma::levy::Side;
use levyarma::simulate::{simulate_paths, SimMode, SimOptions};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "levyarma", version, about = "Dependence structure of ARMA/FARIMA processes with stable and ID noise")]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "LEVYARMA_THREADS")]
    threads: Option<usize>,
    /// Run the RunConfig stored in this JSON file instead of a subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the RunConfig for this command line and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// MA(∞) coefficients c_0..c_N.
    Coeffs {
        #[arg(long)]
        model: String,
        #[arg(long = "N", default_value_t = 100)]
        n_terms: usize,
        #[command(flatten)]
        out: Output,
    },
    /// I_n(z₁, z₂) over lags and argument grids.
    Depend {
        #[command(flatten)]
        common: DependArgs,
        /// Repeatable.
        #[arg(long, required = true, allow_negative_numbers = true)]
        z1: Vec<f64>,
        /// Repeatable.
        #[arg(long, required = true, allow_negative_numbers = true)]
        z2: Vec<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Codifference -I_n(1, -1).
    Codiff {
        #[command(flatten)]
        common: DependArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Joint law of (X₀, X_n): stable spectral atoms or the RAC Lévy measure.
    Findist {
        #[arg(long)]
        model: String,
        /// Stable innovation, or {"kind":"rac",...}.
        #[arg(long)]
        innov: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        truncation: Option<usize>,
        /// Evaluate the joint log-CF at these points (paired with --z2).
        #[arg(long, allow_negative_numbers = true)]
        z1: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        z2: Vec<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Seeded sample paths.
    Simulate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        innov: String,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// MA truncation M.
        #[arg(long)]
        truncation: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Normalized I_n against the predicted asymptotic rate.
    VerifyRates {
        #[arg(long)]
        model: String,
        #[arg(long)]
        innov: String,
        #[arg(long, default_value = "10:40")]
        n_grid: String,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        z1: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        z2: f64,
        #[arg(long)]
        truncation: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Long-memory limit integrals ∫ g.
    Limits {
        #[arg(long, value_enum)]
        which: WhichArg,
        #[arg(long, allow_negative_numbers = true)]
        z1: f64,
        #[arg(long, allow_negative_numbers = true)]
        z2: f64,
        /// Ignored for g3.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug, Clone)]
struct DependArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    innov: String,
    /// "a..b" or "a:b" inclusive, or a comma list.
    #[arg(long = "n")]
    lags: String,
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Recursion,
    TruncatedMa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum WhichArg {
    G1,
    G2,
    G3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Sub {
    Coeffs,
    Depend,
    Codiff,
    Findist,
    Simulate,
    VerifyRates,
    Limits,
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    subcommand: Sub,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    innov: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lags: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    z1: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    z2: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    replicates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<ModeArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    which: Option<WhichArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
    #[serde(default)]
    format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl RunConfig {
    fn new(subcommand: Sub, out: &Output) -> Self {
        RunConfig {
            subcommand,
            model: None,
            innov: None,
            lags: None,
            z1: Vec::new(),
            z2: Vec::new(),
            truncation: None,
            rel_tol: None,
            n_terms: None,
            replicates: None,
            len: None,
            mode: None,
            which: None,
            alpha: None,
            d: None,
            format: out.format,
            output: out.output.clone(),
            seed: None,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<levyarma::Error> for Failure {
    fn from(e: levyarma::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Validation(format!("json: {e}"))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(format!("i/o: {e}"))
    }
}

type Res<T> = Result<T, Failure>;

fn bad(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn parse_json(what: &str, s: &str) -> Res<Value> {
    serde_json::from_str(s).map_err(|e| bad(format!("--{what}: {e}")))
}

fn to_config(cmd: Command) -> Res<RunConfig> {
    Ok(match cmd {
        Command::Coeffs { model, n_terms, out } => RunConfig {
            model: Some(serde_json::from_value(parse_json("model", &model)?)?),
            n_terms: Some(n_terms),
            ..RunConfig::new(Sub::Coeffs, &out)
        },
        Command::Depend { common, z1, z2, out } => RunConfig { z1, z2, ..depend_config(Sub::Depend, common, &out)? },
        Command::Codiff { common, out } => depend_config(Sub::Codiff, common, &out)?,
        Command::Findist { model, innov, n, truncation, z1, z2, out } => RunConfig {
            model: Some(serde_json::from_value(parse_json("model", &model)?)?),
            innov: Some(parse_json("innov", &innov)?),
            lags: Some(n.to_string()),
            truncation,
            z1,
            z2,
            ..RunConfig::new(Sub::Findist, &out)
        },
        Command::Simulate { model, innov, replicates, len, seed, mode, truncation, out } => RunConfig {
            model: Some(serde_json::from_value(parse_json("model", &model)?)?),
            innov: Some(parse_json("innov", &innov)?),
            replicates: Some(replicates),
            len: Some(len),
            seed: Some(seed),
            mode,
            truncation,
            ..RunConfig::new(Sub::Simulate, &out)
        },
        Command::VerifyRates { model, innov, n_grid, z1, z2, truncation, out } => RunConfig {
            model: Some(serde_json::from_value(parse_json("model", &model)?)?),
            innov: Some(parse_json("innov", &innov)?),
            lags: Some(n_grid),
            z1: vec![z1],
            z2: vec![z2],
            truncation,
            ..RunConfig::new(Sub::VerifyRates, &out)
        },
        Command::Limits { which, z1, z2, alpha, d, out } => RunConfig {
            which: Some(which),
            z1: vec![z1],
            z2: vec![z2],
            alpha: Some(alpha),
            d: Some(d),
            ..RunConfig::new(Sub::Limits, &out)
        },
    })
}

fn depend_config(sub: Sub, a: DependArgs, out: &Output) -> Res<RunConfig> {
    Ok(RunConfig {
        model: Some(serde_json::from_value(parse_json("model", &a.model)?)?),
        innov: Some(parse_json("innov", &a.innov)?),
        lags: Some(a.lags),
        truncation: a.truncation,
        rel_tol: a.rel_tol,
        ..RunConfig::new(sub, out)
    })
}

/// Lags as "a..b" or "a:b" (inclusive), a single lag, or a comma list.
fn parse_lags(s: &str) -> Res<Vec<usize>> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad(format!("bad lag '{t}' in '{s}'")));
    let range = s.split_once("..").or_else(|| s.split_once(':'));
    let lags = if let Some((a, b)) = range {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad(format!("empty lag range '{s}'")));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Res<Vec<_>>>()?
    };
    if lags.is_empty() {
        return Err(bad("no lags given"));
    }
    Ok(lags)
}

fn need<T: Clone>(v: &Option<T>, what: &str) -> Res<T> {
    v.clone().ok_or_else(|| bad(format!("missing {what}")))
}

fn innovation(cfg: &RunConfig, model: &ModelSpec) -> Res<InnovationSpec> {
    let spec: InnovationSpec = serde_json::from_value(need(&cfg.innov, "innov")?)?;
    // E ε = 0 is needed for FARIMA with d > 0 and η > 1
    if let InnovationSpec::Id(s) = &spec {
        if model.d > 0.0 && s.eta > 1.0 {
            let c = s.centered()?;
            if c.gamma != s.gamma {
                eprintln!("warning: drift recentred from {} to {} so that the innovations have mean zero", s.gamma, c.gamma);
            }
            return Ok(InnovationSpec::Id(c));
        }
    }
    Ok(spec)
}

fn dep_options(cfg: &RunConfig) -> DependenceOptions {
    let mut o = DependenceOptions { truncation: cfg.truncation, ..Default::default() };
    if let Some(t) = cfg.rel_tol {
        o.rel_tol = t;
    }
    o
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RacJson {
    #[allow(dead_code)]
    kind: String,
    lambda_plus: f64,
    lambda_minus: f64,
    /// "power(α)" or "tempered(α,λ)".
    radial: String,
    eta: f64,
}

fn parse_radial(s: &str) -> Res<Arc<dyn RadialDensity>> {
    let s = s.trim();
    let (name, rest) = s.split_once('(').ok_or_else(|| bad(format!("bad radial density '{s}'")))?;
    let args: Vec<f64> = rest
        .strip_suffix(')')
        .ok_or_else(|| bad(format!("bad radial density '{s}'")))?
        .split(',')
        .map(|a| a.trim().parse::<f64>().map_err(|_| bad(format!("bad radial density '{s}'"))))
        .collect::<Res<_>>()?;
    match (name.trim(), args.as_slice()) {
        ("power", &[alpha]) if alpha > 0.0 && alpha < 2.0 => Ok(Arc::new(PowerRadial { alpha })),
        ("tempered", &[alpha, lambda]) if alpha > 0.0 && alpha < 2.0 && lambda > 0.0 => Ok(Arc::new(TemperedRadial { alpha, lambda })),
        _ => Err(bad(format!("bad radial density '{s}'; expected power(α) or tempered(α,λ) with 0<α<2"))),
    }
}

#[derive(Serialize)]
struct DependRow {
    z1: f64,
    z2: f64,
    #[serde(flatten)]
    value: DependenceValue,
}

enum Artifact {
    Json(Value),
    Text(String),
}

fn execute(cfg: &RunConfig) -> Res<Artifact> {
    let csv = cfg.format == Format::Csv;
    match cfg.subcommand {
        Sub::Coeffs => {
            let model = need(&cfg.model, "model")?;
            let n = need(&cfg.n_terms, "N")?;
            let st = coefficients(&model, n)?;
            if csv {
                return Ok(Artifact::Text(st.to_csv()));
            }
            let desc = if model.p() > 0 || model.is_farima() { Some(asym_descriptor(&model)?) } else { None };
            Ok(Artifact::Json(json!({ "model": model, "c": st.values, "descriptor": desc })))
        }
        Sub::Depend | Sub::Codiff => {
            let model = need(&cfg.model, "model")?;
            let innov = innovation(cfg, &model)?;
            let lags = parse_lags(&need(&cfg.lags, "lags")?)?;
            let o = dep_options(cfg);
            let mut rows = Vec::new();
            if cfg.subcommand == Sub::Codiff {
                for &n in &lags {
                    rows.push(DependRow { z1: 1.0, z2: -1.0, value: codifference(&model, &innov, n, &o)? });
                }
            } else {
                if cfg.z1.is_empty() || cfg.z2.is_empty() {
                    return Err(bad("depend needs at least one --z1 and one --z2"));
                }
                for &z1 in &cfg.z1 {
                    for &z2 in &cfg.z2 {
                        for &n in &lags {
                            rows.push(DependRow { z1, z2, value: dependence(&model, &innov, n, z1, z2, &o)? });
                        }
                    }
                }
            }
            if csv {
                let mut s = String::from("n,z1,z2,re,im,err\n");
                for r in &rows {
                    let v = &r.value;
                    s.push_str(&format!("{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n", v.n, r.z1, r.z2, v.value.re, v.value.im, v.err));
                }
                return Ok(Artifact::Text(s));
            }
            Ok(Artifact::Json(serde_json::to_value(rows)?))
        }
        Sub::Findist => findist(cfg),
        Sub::Simulate => {
            let model = need(&cfg.model, "model")?;
            let s = match innovation(cfg, &model)? {
                InnovationSpec::Stable(s) => s,
                InnovationSpec::Id(_) => return Err(bad("simulate supports stable innovations only")),
            };
            let opts = SimOptions {
                mode: cfg.mode.map(|m| match m {
                    ModeArg::Recursion => SimMode::Recursion,
                    ModeArg::TruncatedMa => SimMode::TruncatedMa,
                }),
                trunc_m: cfg.truncation,
                ..Default::default()
            };
            let b = simulate_paths(&model, &s, need(&cfg.replicates, "replicates")?, need(&cfg.len, "len")?, cfg.seed.unwrap_or(0), &opts)?;
            if csv {
                return Ok(Artifact::Text(b.to_csv()));
            }
            let paths: Vec<&[f64]> = (0..b.replicates).map(|k| b.path(k)).collect();
            Ok(Artifact::Json(json!({
                "model": b.model, "stable": b.stable, "mode": b.mode, "burn_in": b.burn_in,
                "seed": b.seed, "len": b.len, "replicates": b.replicates, "paths": paths,
            })))
        }
        Sub::VerifyRates => {
            let model = need(&cfg.model, "model")?;
            let innov = innovation(cfg, &model)?;
            let grid = parse_lags(&need(&cfg.lags, "n-grid")?)?;
            let (z1, z2) = (cfg.z1.first().copied().unwrap_or(1.0), cfg.z2.first().copied().unwrap_or(1.0));
            let r = verify_table1(&model, &innov, z1, z2, &grid, &dep_options(cfg))?;
            let art = if csv { Artifact::Text(r.to_csv()) } else { Artifact::Json(serde_json::to_value(&r)?) };
            if !r.pass {
                emit(cfg, &art)?;
                return Err(Failure::Numerical(format!(
                    "normalized I_n does not match the {} prediction (deviation {:e} at n={})",
                    r.prediction.regime,
                    r.deviation_last,
                    grid.iter().max().unwrap()
                )));
            }
            Ok(art)
        }
        Sub::Limits => {
            let which = match need(&cfg.which, "which")? {
                WhichArg::G1 => GFunction::G1,
                WhichArg::G2 => GFunction::G2,
                WhichArg::G3 => GFunction::G3,
            };
            let (z1, z2) = (need(&cfg.z1.first().copied(), "z1")?, need(&cfg.z2.first().copied(), "z2")?);
            let alpha = cfg.alpha.unwrap_or(1.0);
            let d = need(&cfg.d, "d")?;
            let l = limit_integral(which, z1, z2, alpha, d)?;
            if csv {
                return Ok(Artifact::Text(format!("which,z1,z2,alpha,d,value,err\n{},{z1:.16e},{z2:.16e},{alpha:.16e},{d:.16e},{:.16e},{:.16e}\n", serde_json::to_value(which)?.as_str().unwrap_or(""), l.value, l.err)));
            }
            Ok(Artifact::Json(json!({ "which": which, "z1": z1, "z2": z2, "alpha": alpha, "d": d, "value": l.value, "err": l.err })))
        }
    }
}

fn findist(cfg: &RunConfig) -> Res<Artifact> {
    let model = need(&cfg.model, "model")?;
    let innov = need(&cfg.innov, "innov")?;
    let n = parse_lags(&need(&cfg.lags, "n")?)?;
    let [n] = n.as_slice() else {
        return Err(bad("findist takes a single lag"));
    };
    let n = *n;
    if cfg.z1.len() != cfg.z2.len() {
        return Err(bad("--z1 and --z2 must be given in pairs"));
    }
    let points: Vec<[f64; 2]> = cfg.z1.iter().zip(&cfg.z2).map(|(&a, &b)| [a, b]).collect();
    if innov.get("kind").and_then(Value::as_str) == Some("rac") {
        let r: RacJson = serde_json::from_value(innov)?;
        let rac = RacSpec { lambda_plus: r.lambda_plus, lambda_minus: r.lambda_minus, radial: parse_radial(&r.radial)?, eta: r.eta };
        let j = rac_joint(&model, &rac, n, cfg.truncation)?;
        if cfg.format == Format::Csv {
            let mut s = String::from("sx,sy,side,lambda_weight,scale\n");
            for a in &j.atoms {
                let side = if a.side == Side::Pos { "+" } else { "-" };
                s.push_str(&format!("{:.16e},{:.16e},{side},{:.16e},{:.16e}\n", a.direction.0, a.direction.1, a.lambda_weight, a.scale));
            }
            return Ok(Artifact::Text(s));
        }
        let atoms: Vec<Value> = j
            .atoms
            .iter()
            .map(|a| json!({ "sx": a.direction.0, "sy": a.direction.1, "side": if a.side == Side::Pos { "+" } else { "-" }, "lambda_weight": a.lambda_weight, "scale": a.scale }))
            .collect();
        let mut ex = Vec::new();
        for z in &points {
            let e = j.exponent(*z)?;
            ex.push(json!({ "z1": z[0], "z2": z[1], "re": e.value.re, "im": e.value.im, "err": e.err }));
        }
        return Ok(Artifact::Json(json!({
            "kind": "rac", "n": n, "eta": j.eta, "gamma": j.gamma2, "total_mass": j.total_mass()?, "atoms": atoms, "exponent": ex,
        })));
    }
    let s = match serde_json::from_value::<InnovationSpec>(innov)? {
        InnovationSpec::Stable(s) => s,
        InnovationSpec::Id(_) => return Err(bad("findist needs a stable or RAC innovation")),
    };
    let a = stable_spectral(&model, &s, n, cfg.truncation)?.merged();
    if cfg.format == Format::Csv {
        return Ok(Artifact::Text(a.to_csv()));
    }
    let ex: Vec<Value> = points
        .iter()
        .map(|z| {
            let v = joint_cf_from_spectral(&a, *z);
            json!({ "z1": z[0], "z2": z[1], "re": v.re, "im": v.im, "err": 0.0 })
        })
        .collect();
    let mut v = serde_json::to_value(&a)?;
    v["kind"] = json!("stable");
    v["n"] = json!(n);
    v["exponent"] = json!(ex);
    Ok(Artifact::Json(v))
}

// Writes every f64 with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        write!(w, "{v:.16e}")
    }
}

fn to_json_string(v: &impl Serialize) -> Res<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    v.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("json is utf-8"))
}

fn emit(cfg: &RunConfig, art: &Artifact) -> Res<()> {
    let text = match art {
        Artifact::Json(v) => to_json_string(v)?,
        Artifact::Text(s) => s.clone(),
    };
    match &cfg.output {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Res<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(bad("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| bad(e.to_string()))?;
    }
    let cfg = match (&cli.config, cli.command) {
        (Some(p), None) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        (None, Some(cmd)) => to_config(cmd)?,
        (Some(_), Some(_)) => return Err(bad("give either --config or a subcommand, not both")),
        (None, None) => return Err(bad("no subcommand given; see --help")),
    };
    if cli.dump_config {
        let text = to_json_string(&cfg)?;
        std::io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    }
    let art = execute(&cfg)?;
    emit(&cfg, &art)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
