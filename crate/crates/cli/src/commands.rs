use serde_json::{json, Value};
use tailsum::combinatorics::{Exact, Family, NumberTable};
use tailsum::domains::{sample_iid, TestDistribution};
use tailsum::estimators::{gamma_from_statistic, hill, log_transform, t_ladder, TailWindow};
use tailsum::limit::{c1, lil_envelope, CovarianceModel, DomainKind};
use tailsum::montecarlo::{
    evaluate_oracle, run_experiment, run_experiment_with_threads, Centering, ExperimentConfig,
    QuadratureOracleConfig, ADJUDICATION_TOL,
};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::input::read_observations;
use crate::output::{csv_report, fmt_f64, json_report, to_value, RunManifest};

/// What one command produced: the file body plus diagnostic lines for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub text: String,
    pub notes: Vec<String>,
}

impl Rendered {
    fn quiet(text: String) -> Self {
        Self { text, notes: Vec::new() }
    }
}

/// Fills defaults that depend on the subcommand so the manifest records the
/// fully resolved parameter set.
pub fn resolve(mut cmd: Command) -> Command {
    let default = match &cmd {
        Command::Tables(_) => Format::Csv,
        _ => Format::Json,
    };
    let out = match &mut cmd {
        Command::Estimate(a) => Some(&mut a.out),
        Command::Tables(a) => Some(&mut a.out),
        Command::Covariance(a) => Some(&mut a.out),
        Command::Mc(a) => Some(&mut a.out),
        Command::Oracle(a) => Some(&mut a.out),
        Command::Sample(_) | Command::Replay(_) => None,
    };
    if let Some(out) = out {
        out.format.get_or_insert(default);
    }
    cmd
}

pub fn manifest(cmd: &Command, timestamp: &str) -> CliResult<RunManifest> {
    let tagged = to_value(cmd)?;
    let seed = match cmd {
        Command::Mc(a) => Some(a.seed),
        Command::Sample(a) => Some(a.seed),
        _ => None,
    };
    Ok(RunManifest {
        command: cmd.name().to_string(),
        params: tagged.get("params").cloned().unwrap_or(Value::Null),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: timestamp.to_string(),
    })
}

/// Rebuilds a command from a manifest.
pub fn from_manifest(m: &RunManifest) -> CliResult<Command> {
    serde_json::from_value(json!({ "command": m.command, "params": m.params }))
        .map_err(|e| CliError::Parse(format!("manifest parameters: {e}")))
}

pub fn domain_kind(domain: DomainArg, gamma: Option<f64>) -> CliResult<DomainKind> {
    let kind = match domain {
        // the Fréchet constants do not depend on gamma
        DomainArg::Frechet => DomainKind::Frechet { gamma: gamma.unwrap_or(1.0) },
        DomainArg::Weibull => DomainKind::Weibull {
            gamma: gamma.ok_or_else(|| CliError::Invalid("--gamma is required for weibull".into()))?,
        },
        DomainArg::Gumbel => {
            if gamma.is_some() {
                return Err(CliError::Invalid("gumbel takes no --gamma".into()));
            }
            DomainKind::Gumbel
        }
    };
    kind.validate()?;
    Ok(kind)
}

pub fn distribution(dist: DistArg, gamma: Option<f64>, x0: Option<f64>) -> CliResult<TestDistribution> {
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| CliError::Invalid(format!("--{name} is required for this distribution")))
    };
    let d = match dist {
        DistArg::Pareto => TestDistribution::Pareto { gamma: need("gamma", gamma)? },
        DistArg::PowerEndpoint => TestDistribution::PowerEndpoint {
            gamma: need("gamma", gamma)?,
            x0: need("x0", x0)?,
        },
        DistArg::StretchedTail => {
            if gamma.is_some() || x0.is_some() {
                return Err(CliError::Invalid("stretched-tail takes no --gamma or --x0".into()));
            }
            TestDistribution::StretchedTail
        }
    };
    d.validate()?;
    Ok(d)
}

fn format_of(out: &OutputArgs) -> Format {
    out.format.unwrap_or(Format::Json)
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json!(v))
}

fn opt_cell(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map_or(String::new(), fmt_f64)
}

fn exact_value(x: Exact) -> Value {
    i64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

/// Runs a resolved, non-replay command.
pub fn execute(cmd: &Command, timestamp: &str) -> CliResult<Rendered> {
    let m = manifest(cmd, timestamp)?;
    match cmd {
        Command::Estimate(a) => estimate(a, &m),
        Command::Tables(a) => tables(a, &m),
        Command::Covariance(a) => covariance(a, &m),
        Command::Mc(a) => mc(a, &m),
        Command::Oracle(a) => oracle(a, &m),
        Command::Sample(a) => sample(a, &m),
        Command::Replay(_) => Err(CliError::Invalid("replay cannot be nested".into())),
    }
}

fn estimate(a: &EstimateArgs, m: &RunManifest) -> CliResult<Rendered> {
    let obs = read_observations(&a.input)?;
    let sample = log_transform(&obs.values)?;
    let n = sample.n();
    let w = TailWindow::new(n, a.k, a.l)?;
    let dom = domain_kind(a.domain, a.gamma)?;
    let ts = t_ladder(&sample, &w, a.pmax)?;
    let hill_value = hill(&sample, &w)?;
    let rows: Vec<(usize, f64, Option<f64>, Option<f64>)> = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let p = i + 1;
            (
                p,
                t,
                gamma_from_statistic(t, p).ok(),
                lil_envelope(p, &dom, a.k, n).ok(),
            )
        })
        .collect();
    let text = match format_of(&a.out) {
        Format::Json => {
            let orders: Vec<Value> = rows
                .iter()
                .map(|&(p, t, g, env)| {
                    json!({
                        "p": p,
                        "statistic": t,
                        "gamma_hat": opt_num(g),
                        "lil_envelope": opt_num(env),
                    })
                })
                .collect();
            json_report(
                m,
                json!({
                    "n": n,
                    "header": obs.header,
                    "k": a.k,
                    "l": a.l,
                    "below_support": sample.below_support(),
                    "hill": hill_value,
                    "envelope_domain": to_value(&dom)?,
                    "orders": orders,
                }),
            )?
        }
        Format::Csv => {
            let header = ["p", "statistic", "gamma_hat", "lil_envelope"].map(String::from);
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|&(p, t, g, env)| vec![p.to_string(), fmt_f64(t), opt_cell(g), opt_cell(env)])
                .collect();
            csv_report(m, &header, &body)?
        }
    };
    let mut notes = Vec::new();
    if sample.below_support() {
        notes.push("warning: some observations are below 1 (negative logs)".to_string());
    }
    Ok(Rendered { text, notes })
}

fn tables(a: &TablesArgs, m: &RunManifest) -> CliResult<Rendered> {
    let need_tau = || {
        a.tau
            .ok_or_else(|| CliError::Invalid("--tau is required for mu0 and mu1".into()))
    };
    let family = match a.family {
        FamilyArg::Beta => Family::TypeI,
        FamilyArg::Mu0 => Family::TypeII { tau: need_tau()? },
        FamilyArg::Mu1 => Family::TypeIII { tau: need_tau()? },
    };
    let table = NumberTable::generate(family, a.vmax, a.dmax)?;
    let col_name = if a.family == FamilyArg::Beta { "r" } else { "delta" };
    let cols: Vec<usize> = (1..=table.dmax()).collect();
    let text = match format_of(&a.out) {
        Format::Json => {
            let rows: Vec<Value> = table
                .rows()
                .iter()
                .map(|r| Value::Array(r.iter().map(|&x| exact_value(x)).collect()))
                .collect();
            json_report(
                m,
                json!({
                    "family": family.name(),
                    "tau": a.tau,
                    "row_index": "v",
                    "column_index": col_name,
                    "columns": cols,
                    "rows": rows,
                }),
            )?
        }
        Format::Csv => {
            let mut header = vec![format!("v\\{col_name}")];
            header.extend(cols.iter().map(|c| c.to_string()));
            let body: Vec<Vec<String>> = table
                .rows()
                .iter()
                .enumerate()
                .map(|(v, r)| {
                    std::iter::once(v.to_string())
                        .chain(r.iter().map(|x| x.to_string()))
                        .collect()
                })
                .collect();
            csv_report(m, &header, &body)?
        }
    };
    Ok(Rendered::quiet(text))
}

fn covariance(a: &CovarianceArgs, m: &RunManifest) -> CliResult<Rendered> {
    if !(1..=8).contains(&a.pmax) {
        return Err(CliError::Invalid(format!("pmax must be in 1..=8, got {}", a.pmax)));
    }
    let dom = domain_kind(a.domain, a.gamma)?;
    let model = CovarianceModel::build(dom, a.pmax)?;
    let matrix = if a.reduced { model.reduced() } else { model.sigma.clone() };
    let c1s = (1..=a.pmax).map(|r| c1(r, &dom)).collect::<Result<Vec<_>, _>>()?;
    let text = match format_of(&a.out) {
        Format::Json => json_report(
            m,
            json!({
                "domain": to_value(&dom)?,
                "pmax": a.pmax,
                "reduced": a.reduced,
                "c1": c1s,
                "e": model.e,
                "matrix": matrix,
            }),
        )?,
        Format::Csv => {
            let mut header = vec!["r\\rho".to_string()];
            header.extend((1..=a.pmax).map(|c| c.to_string()));
            let body: Vec<Vec<String>> = matrix
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    std::iter::once((i + 1).to_string())
                        .chain(row.iter().map(|&x| fmt_f64(x)))
                        .collect()
                })
                .collect();
            csv_report(m, &header, &body)?
        }
    };
    Ok(Rendered::quiet(text))
}

fn mc(a: &McArgs, m: &RunManifest) -> CliResult<Rendered> {
    let cfg = ExperimentConfig {
        dist: distribution(a.dist, a.gamma, a.x0)?,
        n: a.n,
        k: a.k,
        l: a.l,
        pmax: a.pmax,
        reps: a.reps,
        seed: a.seed,
        centering: match a.centering {
            CenteringArg::Random => Centering::RandomThreshold,
            CenteringArg::Fixed => Centering::FixedThreshold,
        },
    };
    cfg.validate()?;
    let report = match a.threads {
        0 => run_experiment(&cfg),
        t => run_experiment_with_threads(&cfg, t),
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    let notes = report
        .comparisons
        .iter()
        .map(|c| {
            format!(
                "{} {}: empirical {:.6} predicted {:.6} (tolerance {}{})",
                if c.pass { "PASS" } else { "FAIL" },
                c.quantity,
                c.empirical,
                c.predicted,
                c.tolerance,
                if c.relative { " relative" } else { " absolute" },
            )
        })
        .collect();
    let text = match format_of(&a.out) {
        Format::Json => json_report(m, to_value(&report)?)?,
        Format::Csv => {
            let header = [
                "quantity",
                "empirical",
                "predicted",
                "standard_error",
                "tolerance",
                "relative",
                "pass",
            ]
            .map(String::from);
            let body: Vec<Vec<String>> = report
                .comparisons
                .iter()
                .map(|c| {
                    vec![
                        c.quantity.clone(),
                        fmt_f64(c.empirical),
                        fmt_f64(c.predicted),
                        fmt_f64(c.standard_error),
                        fmt_f64(c.tolerance),
                        c.relative.to_string(),
                        c.pass.to_string(),
                    ]
                })
                .collect();
            csv_report(m, &header, &body)?
        }
    };
    Ok(Rendered { text, notes })
}

fn oracle(a: &OracleArgs, m: &RunManifest) -> CliResult<Rendered> {
    let cfg = QuadratureOracleConfig {
        grid: a.grid,
        truncation: a.truncation,
    };
    cfg.validate()?;
    let ev = evaluate_oracle(a.r, a.rho, &cfg).map_err(|e| match e {
        tailsum::Error::Domain(_) => CliError::from(e),
        other => CliError::Runtime(other.to_string()),
    })?;
    let closed = ev.closed_form as f64;
    let refinement = (ev.value - ev.coarse_value).abs();
    let deviation = (ev.value - closed).abs() / closed;
    let ok = deviation <= ADJUDICATION_TOL;
    let text = match format_of(&a.out) {
        Format::Json => json_report(
            m,
            json!({
                "r": ev.r,
                "rho": ev.rho,
                "value": ev.value,
                "coarse_grid": ev.coarse_grid,
                "coarse_value": ev.coarse_value,
                "refinement_change": refinement,
                "closed_form": exact_value(ev.closed_form),
                "relative_deviation": deviation,
                "tolerance": ADJUDICATION_TOL,
                "agrees": ok,
            }),
        )?,
        Format::Csv => {
            let header = [
                "r",
                "rho",
                "value",
                "coarse_value",
                "refinement_change",
                "closed_form",
                "relative_deviation",
                "agrees",
            ]
            .map(String::from);
            let row = vec![
                ev.r.to_string(),
                ev.rho.to_string(),
                fmt_f64(ev.value),
                fmt_f64(ev.coarse_value),
                fmt_f64(refinement),
                ev.closed_form.to_string(),
                fmt_f64(deviation),
                ok.to_string(),
            ];
            csv_report(m, &header, &[row])?
        }
    };
    Ok(Rendered::quiet(text))
}

fn sample(a: &SampleArgs, m: &RunManifest) -> CliResult<Rendered> {
    let dist = distribution(a.dist, a.gamma, a.x0)?;
    if a.n == 0 {
        return Err(CliError::Invalid("--n must be positive".into()));
    }
    let s = sample_iid(&dist, a.seed, a.n)?;
    let mut text = String::new();
    text.push_str(crate::output::MANIFEST_PREFIX);
    text.push_str(&serde_json::to_string(m).map_err(|e| CliError::Runtime(e.to_string()))?);
    text.push_str("\nx\n");
    for &y in s.values() {
        let x = y.exp();
        if !x.is_finite() {
            return Err(CliError::Runtime(format!("draw exp({y}) is not representable")));
        }
        text.push_str(&fmt_f64(x));
        text.push('\n');
    }
    Ok(Rendered::quiet(text))
}
