//! Subcommand drivers: build the law from flags, map the statistic name to
//! library calls, and hand the results to the report writers.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use kendall::{
    conv_cdf, conv_power_cdf, conv_williamson_g, default_horizon, estimate_grid, integral_i,
    integral_ii, joint_ladder_cdf, ladder_epoch_pmf, ladder_height_cdf, max_cdf, min_cdf_mode,
    psi_integral, transition_cdf, truncated_moment, weak_desc_epoch_pmf, Alpha, Mode,
    SimStatistic, StepLaw,
};

use crate::args::{
    Cli, Command, CompareArgs, ConvStat, ConvolveArgs, EvalArgs, FormatArg, GridSpec, LawArgs,
    LawKind, ModeArg, SimulateArgs, StatName,
};
use crate::error::{CliError, Result};
use crate::report::{self, XValue};

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval(args) => run_eval(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Compare(args) => run_compare(args),
        Command::Convolve(args) => run_convolve(args),
    }
}

fn usage(e: kendall::KendallError) -> CliError {
    CliError::Usage(e.to_string())
}

fn build_alpha(v: f64) -> Result<Alpha> {
    Alpha::new(v).map_err(|e| CliError::Usage(format!("--alpha: {e}")))
}

fn build_law(args: &LawArgs) -> Result<StepLaw> {
    let alpha = build_alpha(args.alpha)?;
    build_family(args.law, alpha, args.scale, args.m_alpha, args.table.as_deref(), "--table")
}

fn build_family(
    kind: LawKind,
    alpha: Alpha,
    scale: f64,
    m_alpha: f64,
    table: Option<&Path>,
    table_flag: &str,
) -> Result<StepLaw> {
    match kind {
        LawKind::Point => StepLaw::symmetric_point(alpha, scale).map_err(usage),
        LawKind::Pareto => Ok(StepLaw::symmetric_pareto(alpha)),
        LawKind::Stable => StepLaw::kendall_stable(alpha, m_alpha).map_err(usage),
        LawKind::Table => {
            let path = table.ok_or_else(|| {
                CliError::Usage(format!("--law table requires {table_flag} FILE"))
            })?;
            let rows = read_table(path)?;
            StepLaw::tabulated(alpha, &rows).map_err(usage)
        }
    }
}

/// Reads a two-column CSV of `t,F` rows. Blank lines and `#` comments are
/// skipped, and the first non-comment line may be a header.
fn read_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Usage(format!("cannot read table file {}: {e}", path.display()))
    })?;
    let mut rows = Vec::new();
    let mut may_be_header = true;
    for (idx, line) in text.lines().enumerate() {
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = s.split(',').map(str::trim).collect();
        let parsed = if fields.len() == 2 {
            match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
                (Ok(t), Ok(f)) => Some((t, f)),
                _ => None,
            }
        } else {
            None
        };
        match parsed {
            Some(row) => {
                rows.push(row);
                may_be_header = false;
            }
            None if may_be_header => {
                may_be_header = false;
            }
            None => {
                return Err(CliError::Usage(format!(
                    "malformed table row at line {} of {}: {s:?}",
                    idx + 1,
                    path.display()
                )));
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage(format!("table file {} has no data rows", path.display())));
    }
    Ok(rows)
}

fn need_a(stat: StatName, a: Option<f64>) -> Result<f64> {
    a.ok_or_else(|| CliError::Usage(format!("--stat {} requires --a", stat.name())))
}

fn need_n(stat: StatName, n: Option<u32>) -> Result<u32> {
    match n {
        Some(n) if n >= 1 => Ok(n),
        Some(_) => Err(CliError::Usage(format!("--stat {} requires --n >= 1", stat.name()))),
        None => Err(CliError::Usage(format!("--stat {} requires --n", stat.name()))),
    }
}

fn need_x(stat: StatName, x: Option<f64>) -> Result<f64> {
    x.ok_or_else(|| CliError::Usage(format!("--stat {} requires --x", stat.name())))
}

fn need_grid(stat: StatName, grid: Option<GridSpec>) -> Result<Vec<f64>> {
    grid.map(|g| g.points())
        .ok_or_else(|| CliError::Usage(format!("--stat {} requires --t-grid", stat.name())))
}

fn points(ts: &[f64]) -> Vec<XValue> {
    ts.iter().map(|&t| XValue::Point(t)).collect()
}

fn indices(n: u32) -> Vec<XValue> {
    (1..=n).map(XValue::Index).collect()
}

fn stat_uses_mode(stat: StatName) -> bool {
    matches!(
        stat,
        StatName::IntI
            | StatName::IntIi
            | StatName::TauPmf
            | StatName::JointLadder
            | StatName::MaxCdf
            | StatName::MinCdf
    )
}

fn mode_name(mode: ModeArg) -> &'static str {
    match mode {
        ModeArg::Closed => "closed",
        ModeArg::Recurrence => "recurrence",
    }
}

/// Fixed parameters of the run, for the JSON artifacts. Alphabetical key
/// order (BTreeMap) keeps the output stable.
fn law_params(args: &LawArgs, map: &mut BTreeMap<String, Value>) {
    match args.law {
        LawKind::Point => {
            map.insert("scale".into(), args.scale.into());
        }
        LawKind::Stable => {
            map.insert("m-alpha".into(), args.m_alpha.into());
        }
        LawKind::Table => {
            if let Some(path) = &args.table {
                map.insert("table".into(), path.display().to_string().into());
            }
        }
        LawKind::Pareto => {}
    }
}

/// Evaluates one analytic statistic over its grid. Returns the row keys,
/// the values, and whether any closed form fell back to the recurrence.
fn analytic_curve(
    law: &StepLaw,
    stat: StatName,
    a: Option<f64>,
    n: Option<u32>,
    x: Option<f64>,
    t_grid: Option<GridSpec>,
    mode: Mode,
) -> Result<(Vec<XValue>, Vec<f64>, bool)> {
    let mut fell_back = false;
    match stat {
        StatName::Cdf => {
            let ts = need_grid(stat, t_grid)?;
            let vals = ts.iter().map(|&t| law.cdf(t)).collect();
            Ok((points(&ts), vals, false))
        }
        StatName::G => {
            let ts = need_grid(stat, t_grid)?;
            let vals: Vec<f64> =
                ts.iter().map(|&t| law.williamson_g(t)).collect::<kendall::Result<_>>()?;
            Ok((points(&ts), vals, false))
        }
        StatName::H => {
            let ts = need_grid(stat, t_grid)?;
            let vals: Vec<f64> = ts.iter().map(|&t| law.h_fn(t)).collect::<kendall::Result<_>>()?;
            Ok((points(&ts), vals, false))
        }
        StatName::FnCdf => {
            let n = need_n(stat, n)?;
            let ts = need_grid(stat, t_grid)?;
            let vals: Vec<f64> =
                ts.iter().map(|&t| conv_power_cdf(law, n, t)).collect::<kendall::Result<_>>()?;
            Ok((points(&ts), vals, false))
        }
        StatName::TransitionCdf => {
            let x = need_x(stat, x)?;
            let n = need_n(stat, n)?;
            let ts = need_grid(stat, t_grid)?;
            let vals: Vec<f64> = ts
                .iter()
                .map(|&t| transition_cdf(law, x, n, t))
                .collect::<kendall::Result<_>>()?;
            Ok((points(&ts), vals, false))
        }
        StatName::TruncMoment => {
            let a = need_a(stat, a)?;
            let ys = need_grid(stat, t_grid)?;
            let vals: Vec<f64> =
                ys.iter().map(|&y| truncated_moment(law, y, a)).collect::<kendall::Result<_>>()?;
            Ok((points(&ys), vals, false))
        }
        StatName::PsiIntegral => {
            let y = need_x(stat, x)?;
            let a = need_a(stat, a)?;
            let ts = need_grid(stat, t_grid)?;
            let vals: Vec<f64> = ts
                .iter()
                .map(|&t| psi_integral(law, y, a, t))
                .collect::<kendall::Result<_>>()?;
            Ok((points(&ts), vals, false))
        }
        StatName::IntI | StatName::IntIi => {
            let n = need_n(stat, n)?;
            let a = need_a(stat, a)?;
            let ts = need_grid(stat, t_grid)?;
            let mut vals = Vec::with_capacity(ts.len());
            for &t in &ts {
                let ev = if stat == StatName::IntI {
                    integral_i(law, n, a, t, mode)?
                } else {
                    integral_ii(law, n, a, t, mode)?
                };
                fell_back |= ev.fell_back;
                vals.push(ev.value);
            }
            Ok((points(&ts), vals, fell_back))
        }
        StatName::TauPmf => {
            let a = need_a(stat, a)?;
            let n = need_n(stat, n)?;
            let mut vals = Vec::with_capacity(n as usize);
            for k in 1..=n {
                let ev = ladder_epoch_pmf(law, a, k, mode)?;
                fell_back |= ev.fell_back;
                vals.push(ev.value);
            }
            Ok((indices(n), vals, fell_back))
        }
        StatName::TauWeakDescPmf => {
            let a = need_a(stat, a)?;
            let n = need_n(stat, n)?;
            let vals: Vec<f64> =
                (1..=n).map(|k| weak_desc_epoch_pmf(law, a, k)).collect::<kendall::Result<_>>()?;
            Ok((indices(n), vals, false))
        }
        StatName::JointLadder => {
            let a = need_a(stat, a)?;
            let n = need_n(stat, n)?;
            let ts = need_grid(stat, t_grid)?;
            let mut vals = Vec::with_capacity(ts.len());
            for &t in &ts {
                let ev = joint_ladder_cdf(law, a, n, t, mode)?;
                fell_back |= ev.fell_back;
                vals.push(ev.value);
            }
            Ok((points(&ts), vals, fell_back))
        }
        StatName::LadderHeightCdf => {
            let a = need_a(stat, a)?;
            let ts = need_grid(stat, t_grid)?;
            let mut vals = Vec::with_capacity(ts.len());
            for &t in &ts {
                let ev = ladder_height_cdf(law, a, t)?;
                fell_back |= ev.fell_back;
                vals.push(ev.value);
            }
            Ok((points(&ts), vals, fell_back))
        }
        StatName::MaxCdf => {
            let n = need_n(stat, n)?;
            let ts = need_grid(stat, t_grid)?;
            let mut vals = Vec::with_capacity(ts.len());
            for &t in &ts {
                let ev = max_cdf(law, n, t, mode)?;
                fell_back |= ev.fell_back;
                vals.push(ev.value);
            }
            Ok((points(&ts), vals, fell_back))
        }
        StatName::MinCdf => {
            let n = need_n(stat, n)?;
            let ts = need_grid(stat, t_grid)?;
            let mut vals = Vec::with_capacity(ts.len());
            for &t in &ts {
                let ev = min_cdf_mode(law, n, t, mode)?;
                fell_back |= ev.fell_back;
                vals.push(ev.value);
            }
            Ok((points(&ts), vals, fell_back))
        }
        StatName::TauStrictDescPmf | StatName::TauWeakAscPmf => Err(CliError::Usage(format!(
            "--stat {} has no analytic form; use the simulate subcommand",
            stat.name()
        ))),
        StatName::ConvCdf => Err(CliError::Usage(
            "--stat conv-cdf needs two laws; use the convolve subcommand".into(),
        )),
    }
}

/// Maps a statistic to the per-row simulator statistics.
fn sim_statistics(
    stat: StatName,
    a: Option<f64>,
    n: Option<u32>,
    t_grid: Option<GridSpec>,
) -> Result<(Vec<XValue>, Vec<SimStatistic>)> {
    match stat {
        StatName::TauPmf
        | StatName::TauWeakDescPmf
        | StatName::TauStrictDescPmf
        | StatName::TauWeakAscPmf => {
            let a = need_a(stat, a)?;
            let n = need_n(stat, n)?;
            let stats = (1..=n)
                .map(|k| match stat {
                    StatName::TauPmf => SimStatistic::TauPmf { a, n: k },
                    StatName::TauWeakDescPmf => SimStatistic::TauWeakDescPmf { a, n: k },
                    StatName::TauStrictDescPmf => SimStatistic::TauStrictDescPmf { a, n: k },
                    _ => SimStatistic::TauWeakAscPmf { a, n: k },
                })
                .collect();
            Ok((indices(n), stats))
        }
        StatName::JointLadder => {
            let a = need_a(stat, a)?;
            let n = need_n(stat, n)?;
            let ts = need_grid(stat, t_grid)?;
            let stats = ts.iter().map(|&t| SimStatistic::JointLadder { a, n, t }).collect();
            Ok((points(&ts), stats))
        }
        StatName::LadderHeightCdf => {
            let a = need_a(stat, a)?;
            let ts = need_grid(stat, t_grid)?;
            let stats = ts.iter().map(|&t| SimStatistic::LadderHeightCdf { a, t }).collect();
            Ok((points(&ts), stats))
        }
        StatName::MaxCdf => {
            let n = need_n(stat, n)?;
            let ts = need_grid(stat, t_grid)?;
            let stats = ts.iter().map(|&t| SimStatistic::MaxCdf { n, t }).collect();
            Ok((points(&ts), stats))
        }
        StatName::MinCdf => {
            let n = need_n(stat, n)?;
            let ts = need_grid(stat, t_grid)?;
            let stats = ts.iter().map(|&t| SimStatistic::MinCdf { n, t }).collect();
            Ok((points(&ts), stats))
        }
        _ => Err(CliError::Usage(format!(
            "--stat {} has no Monte Carlo estimator; use the eval subcommand",
            stat.name()
        ))),
    }
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let law = build_law(&args.law)?;
    let (xs, values, fell_back) = analytic_curve(
        &law,
        args.stat,
        args.a,
        args.n,
        args.x,
        args.t_grid,
        args.mode.into(),
    )?;
    let content = match args.format {
        FormatArg::Csv => report::render_csv(&xs, &values, None),
        FormatArg::Json => {
            let mut params = BTreeMap::new();
            law_params(&args.law, &mut params);
            if let Some(a) = args.a {
                params.insert("a".into(), a.into());
            }
            if let Some(n) = args.n {
                params.insert("n".into(), n.into());
            }
            if let Some(x) = args.x {
                params.insert("x".into(), x.into());
            }
            if stat_uses_mode(args.stat) {
                params.insert("mode".into(), mode_name(args.mode).into());
            }
            report::render_json(&report::EvalReport {
                statistic: args.stat.name().into(),
                law: args.law.law.name().into(),
                alpha: args.law.alpha,
                params,
                grid: report::grid_json(&xs),
                analytic: values,
                fallback: fell_back,
            })
        }
    };
    report::write_output(&args.out, &content)
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    if args.paths == 0 {
        return Err(CliError::Usage("--paths must be at least 1".into()));
    }
    let law = build_law(&args.law)?;
    let (xs, stats) = sim_statistics(args.stat, args.a, args.n, args.t_grid)?;
    let horizon = match args.horizon {
        Some(h) => h,
        None => default_horizon(&law, &stats)?,
    };
    let estimates = estimate_grid(&law, &stats, args.paths, horizon, args.seed)?;
    let values: Vec<f64> = estimates.iter().map(|e| e.point).collect();
    let std_errors: Vec<f64> = estimates.iter().map(|e| e.std_error).collect();
    let content = match args.format {
        FormatArg::Csv => report::render_csv(&xs, &values, Some(&std_errors)),
        FormatArg::Json => {
            let mut params = BTreeMap::new();
            law_params(&args.law, &mut params);
            if let Some(a) = args.a {
                params.insert("a".into(), a.into());
            }
            if let Some(n) = args.n {
                params.insert("n".into(), n.into());
            }
            params.insert("paths".into(), args.paths.into());
            params.insert("seed".into(), args.seed.into());
            params.insert("horizon".into(), horizon.into());
            report::render_json(&report::SimulateReport {
                statistic: args.stat.name().into(),
                law: args.law.law.name().into(),
                alpha: args.law.alpha,
                params,
                grid: report::grid_json(&xs),
                empirical: values,
                std_error: std_errors,
            })
        }
    };
    report::write_output(&args.out, &content)
}

/// Largest absolute error and largest z-score between an analytic curve and
/// its Monte Carlo estimates. The z denominator is floored by the binomial
/// standard error implied by the analytic value, and by an absolute 1e-12,
/// so that a vanishing empirical variance cannot produce a spurious failure.
fn z_gate(analytic: &[f64], empirical: &[f64], std_errors: &[f64], paths: u64) -> (f64, f64) {
    let mut max_abs_err = 0.0f64;
    let mut max_z = 0.0f64;
    for (i, want) in analytic.iter().enumerate() {
        let err = (want - empirical[i]).abs();
        max_abs_err = max_abs_err.max(err);
        let p = want.clamp(0.0, 1.0);
        let binom_se = (p * (1.0 - p) / paths as f64).sqrt();
        let se = std_errors[i].max(binom_se).max(1e-12);
        max_z = max_z.max(err / se);
    }
    (max_abs_err, max_z)
}

fn run_compare(args: CompareArgs) -> Result<()> {
    if args.format == FormatArg::Csv {
        return Err(CliError::Usage("compare writes JSON reports; drop --format csv".into()));
    }
    if args.paths == 0 {
        return Err(CliError::Usage("--paths must be at least 1".into()));
    }
    match args.stat {
        StatName::TauPmf
        | StatName::TauWeakDescPmf
        | StatName::JointLadder
        | StatName::LadderHeightCdf
        | StatName::MaxCdf
        | StatName::MinCdf => {}
        StatName::TauStrictDescPmf | StatName::TauWeakAscPmf => {
            return Err(CliError::Usage(format!(
                "--stat {} has no analytic reference to compare against (simulate only)",
                args.stat.name()
            )));
        }
        _ => {
            return Err(CliError::Usage(format!(
                "--stat {} has no Monte Carlo estimator; use the eval subcommand",
                args.stat.name()
            )));
        }
    }
    let law = build_law(&args.law)?;
    let (xs, analytic, fell_back) = analytic_curve(
        &law,
        args.stat,
        args.a,
        args.n,
        None,
        args.t_grid,
        args.mode.into(),
    )?;
    let (_, stats) = sim_statistics(args.stat, args.a, args.n, args.t_grid)?;
    let horizon = match args.horizon {
        Some(h) => h,
        None => default_horizon(&law, &stats)?,
    };
    let estimates = estimate_grid(&law, &stats, args.paths, horizon, args.seed)?;
    let empirical: Vec<f64> = estimates.iter().map(|e| e.point).collect();
    let std_errors: Vec<f64> = estimates.iter().map(|e| e.std_error).collect();

    let (max_abs_err, max_z) = z_gate(&analytic, &empirical, &std_errors, args.paths);
    let ks = match args.stat {
        StatName::LadderHeightCdf | StatName::MaxCdf | StatName::MinCdf => Some(max_abs_err),
        _ => None,
    };
    let pass = max_z <= 4.0;

    let mut params = BTreeMap::new();
    law_params(&args.law, &mut params);
    if let Some(a) = args.a {
        params.insert("a".into(), a.into());
    }
    if let Some(n) = args.n {
        params.insert("n".into(), n.into());
    }
    if stat_uses_mode(args.stat) {
        params.insert("mode".into(), mode_name(args.mode).into());
    }
    params.insert("paths".into(), args.paths.into());
    params.insert("seed".into(), args.seed.into());
    params.insert("horizon".into(), horizon.into());
    let content = report::render_json(&report::ComparisonReport {
        statistic: args.stat.name().into(),
        law: args.law.law.name().into(),
        alpha: args.law.alpha,
        params,
        grid: report::grid_json(&xs),
        analytic,
        empirical,
        std_error: std_errors,
        max_abs_err,
        max_z,
        ks,
        pass,
        fallback: fell_back,
    });
    report::write_output(&args.out, &content)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::StatisticalFail { max_z })
    }
}

fn run_convolve(args: ConvolveArgs) -> Result<()> {
    let alpha = build_alpha(args.law.alpha)?;
    let law1 = build_law(&args.law)?;
    let law2 = build_family(
        args.law2.law2,
        alpha,
        args.law2.scale2,
        args.law2.m_alpha2,
        args.law2.table2.as_deref(),
        "--table2",
    )?;
    let ts = args
        .t_grid
        .map(|g| g.points())
        .ok_or_else(|| CliError::Usage("convolve requires --t-grid".into()))?;
    let mut values = Vec::with_capacity(ts.len());
    for &t in &ts {
        let v = match args.stat {
            ConvStat::ConvCdf => conv_cdf(&law1, &law2, t)?,
            ConvStat::ConvG => conv_williamson_g(&law1, &law2, t)?,
        };
        values.push(v);
    }
    let xs = points(&ts);
    let content = match args.format {
        FormatArg::Csv => report::render_csv(&xs, &values, None),
        FormatArg::Json => {
            let mut params = BTreeMap::new();
            law_params(&args.law, &mut params);
            params.insert("law2".into(), args.law2.law2.name().into());
            match args.law2.law2 {
                LawKind::Point => {
                    params.insert("scale2".into(), args.law2.scale2.into());
                }
                LawKind::Stable => {
                    params.insert("m-alpha2".into(), args.law2.m_alpha2.into());
                }
                LawKind::Table => {
                    if let Some(path) = &args.law2.table2 {
                        params.insert("table2".into(), path.display().to_string().into());
                    }
                }
                LawKind::Pareto => {}
            }
            report::render_json(&report::EvalReport {
                statistic: args.stat.name().into(),
                law: args.law.law.name().into(),
                alpha: args.law.alpha,
                params,
                grid: report::grid_json(&xs),
                analytic: values,
                fallback: false,
            })
        }
    };
    report::write_output(&args.out, &content)
}
