use std::fmt::Display;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use selectorkit::inclusion::json::problem_from_str;
use selectorkit::inclusion::filippov_iterate;
use selectorkit::robot::{export_svf, simulate, Controller, ExportConfig, SimConfig, SimRecord};
use selectorkit::selector::json::{chain_from_wire, ChainWire};
use selectorkit::selector::{
    cauchy_report, extract, section, weak_continuity_pass, EvalResult, SelectorChain, Undefined,
};
use selectorkit::setalg::json::{sequence_from_wire, sequence_to_wire, SequenceWire};
use selectorkit::setalg::{countable_reduction, reduction_report, BasicSet};
use selectorkit::svf::json::{svf_from_wire, SvfWire};
use selectorkit::svf::RepresentableSvf;
use selectorkit::{Dyadic, Scalar};

use crate::manifest::Run;
use crate::{Cli, CliError, Command, ControllerKind, EvalArgs, ExportArgs, ExtractArgs, RobotCommand, SimArgs};

pub fn dispatch(cli: &Cli, threads: Option<usize>) -> Result<(), CliError> {
    match &cli.command {
        Command::Reduce(a) => {
            let mut run = Run::new(&cli.out, "reduce", cli.seed, threads)?;
            run.arg("sets", a.sets.display().to_string());
            reduce(&mut run, &a.sets)?;
            run.finish()
        }
        Command::Extract(a) => {
            let mut run = Run::new(&cli.out, "extract", cli.seed, threads)?;
            run_extract(&mut run, a, cli.seed)?;
            run.finish()
        }
        Command::Eval(a) => {
            let mut run = Run::new(&cli.out, "eval", cli.seed, threads)?;
            run_eval(&mut run, a)?;
            run.finish()
        }
        Command::SolveDi(a) => {
            let mut run = Run::new(&cli.out, "solve-di", cli.seed, threads)?;
            run.arg("problem", a.problem.display().to_string());
            solve_di(&mut run, &a.problem)?;
            run.finish()
        }
        Command::Robot(RobotCommand::Sim(a)) => {
            let mut run = Run::new(&cli.out, "robot sim", cli.seed, threads)?;
            robot_sim(&mut run, a)?;
            run.finish()
        }
        Command::Robot(RobotCommand::ExportSvf(a)) => {
            let mut run = Run::new(&cli.out, "robot export-svf", cli.seed, threads)?;
            robot_export(&mut run, a)?;
            run.finish()
        }
    }
}

fn parse_json<W: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<W, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A dyadic literal (`1/8`, `3*2^-5`, `0.375`) or any finite decimal, read
/// as the exact value of the nearest double.
fn parse_scalar<T: Scalar>(s: &str) -> Result<T, CliError> {
    if let Ok(d) = s.parse::<Dyadic>() {
        return Ok(T::from_dyadic(&d));
    }
    s.trim()
        .parse::<f64>()
        .ok()
        .and_then(T::from_f64_exact)
        .ok_or_else(|| CliError::Input(format!("not a number: {s:?}")))
}

fn parse_point<T: Scalar>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',').map(parse_scalar).collect()
}

fn fmt_values<T: Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_part<T: Scalar + Display>(b: &BasicSet<T>) -> String {
    match b.axes() {
        None => "∅".into(),
        Some(axes) => axes
            .iter()
            .map(|a| {
                if a.lo == a.hi {
                    format!("{{{}}}", a.lo)
                } else {
                    let l = if a.closed_lo { '[' } else { '(' };
                    let r = if a.closed_hi { ']' } else { ')' };
                    format!("{l}{}, {}{r}", a.lo, a.hi)
                }
            })
            .collect::<Vec<_>>()
            .join(" × "),
    }
}

fn reduce(run: &mut Run, path: &Path) -> Result<(), CliError> {
    let text = run.read_input(path)?;
    let wire: SequenceWire = parse_json(&text, path)?;
    let seq = sequence_from_wire::<Dyadic>(&wire)?;
    let out = countable_reduction(&seq);
    let report = reduction_report(&seq, &out);
    for (i, k) in out.items().iter().enumerate() {
        let parts: Vec<String> = k.parts().iter().map(fmt_part).collect();
        println!("K{i} = {}", if parts.is_empty() { "∅".into() } else { parts.join(" ∪ ") });
    }
    println!(
        "measure: input union {} output {} ({})",
        report.input_union_measure,
        report.output_measure,
        if report.measures_agree { "agree" } else { "DIFFER" }
    );
    run.write_json(
        "reduction.json",
        &json!({ "sequence": sequence_to_wire(&out), "report": report }),
    )?;
    Ok(())
}

fn run_extract(run: &mut Run, a: &ExtractArgs, seed: u64) -> Result<(), CliError> {
    run.arg("svf", a.svf.display().to_string());
    run.arg("n", a.n);
    run.arg("dom_budget", &a.dom_budget);
    run.arg("section_res", a.section_res);
    run.arg("fix", &a.fix);
    run.arg("probes", a.probes);
    run.arg("check_res", a.check_res);
    let text = run.read_input(&a.svf)?;
    let wire: SvfWire = parse_json(&text, &a.svf)?;
    match wire {
        SvfWire::Sampled(_) => extract_typed(run, svf_from_wire::<f64>(&wire)?, a, seed),
        SvfWire::Cellwise(_) => extract_typed(run, svf_from_wire::<Dyadic>(&wire)?, a, seed),
    }
}

fn section_fix(svf_dim: usize, centre: &[f64], fix: &Option<String>) -> Result<Vec<Option<f64>>, CliError> {
    match fix {
        None => Ok((0..svf_dim).map(|k| if k < 2 { None } else { Some(centre[k]) }).collect()),
        Some(s) => {
            let v: Vec<Option<f64>> = s
                .split(',')
                .map(|t| match t.trim() {
                    "_" => Ok(None),
                    t => parse_scalar::<f64>(t).map(Some),
                })
                .collect::<Result<_, _>>()?;
            if v.len() != svf_dim {
                return Err(CliError::Input(format!("--fix needs {svf_dim} entries, got {}", v.len())));
            }
            Ok(v)
        }
    }
}

fn extract_typed<T: Scalar + Display>(
    run: &mut Run,
    svf: RepresentableSvf<T>,
    a: &ExtractArgs,
    seed: u64,
) -> Result<(), CliError> {
    let eps: T = parse_scalar(&a.dom_budget)?;
    let chain = extract(&svf, a.n, &eps)?;
    for s in chain.steps() {
        let c = s.certificate();
        println!(
            "level {}: certified error {} observed {} pieces {}",
            c.level, c.certified_error, c.observed_max_error, c.pieces
        );
    }
    run.write_json("chain.json", &chain)?;

    let axes = svf.domain().axes().expect("domain boxes are nonempty");
    let lo: Vec<f64> = axes.iter().map(|i| i.lo.as_f64()).collect();
    let hi: Vec<f64> = axes.iter().map(|i| i.hi.as_f64()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<Vec<T>> = (0..a.probes)
        .map(|_| {
            (0..svf.dim())
                .map(|k| {
                    let v = if hi[k] > lo[k] { rng.gen_range(lo[k]..hi[k]) } else { lo[k] };
                    T::from_f64_exact(v).expect("probe coordinates are finite")
                })
                .collect()
        })
        .collect();
    let check_res = a.check_res.unwrap_or([64, 32, 16][svf.dim().clamp(1, 3) - 1]);
    let report = json!({
        "certificates": chain.steps().iter().map(|s| s.certificate()).collect::<Vec<_>>(),
        "cauchy": cauchy_report(&chain),
        "weak_continuity": weak_continuity_pass(&chain, &probes, check_res),
    });
    run.write_json("report.json", &report)?;

    let centre: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| (l + h) / 2.0).collect();
    let fixed = section_fix(svf.dim(), &centre, &a.fix)?;
    write_section(run, &chain, &fixed, a.section_res)
}

fn write_section<T: Scalar>(
    run: &mut Run,
    chain: &SelectorChain<T>,
    fixed: &[Option<f64>],
    res: usize,
) -> Result<(), CliError> {
    let rows = section(chain, fixed, res);
    let beta = chain.svf().range_dim();
    let mut header: Vec<String> = (0..chain.svf().dim()).map(|k| format!("x{k}")).collect();
    header.extend((0..beta).map(|k| format!("f{k}")));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut line: Vec<String> = r.x.iter().map(f64::to_string).collect();
            match &r.value {
                Some(v) => line.extend(v.iter().map(f64::to_string)),
                None => line.extend(std::iter::repeat_n(String::new(), beta)),
            }
            line
        })
        .collect();
    run.write_csv("section.csv", &header, &body)?;
    Ok(())
}

fn run_eval(run: &mut Run, a: &EvalArgs) -> Result<(), CliError> {
    run.arg("chain", a.chain.display().to_string());
    run.arg("at", &a.at);
    run.arg("dom_budget", &a.dom_budget);
    let text = run.read_input(&a.chain)?;
    let wire: ChainWire = parse_json(&text, &a.chain)?;
    match wire.svf {
        SvfWire::Sampled(_) => eval_typed(run, chain_from_wire::<f64>(&wire)?, a),
        SvfWire::Cellwise(_) => eval_typed(run, chain_from_wire::<Dyadic>(&wire)?, a),
    }
}

fn eval_typed<T: Scalar + Display>(run: &mut Run, chain: SelectorChain<T>, a: &EvalArgs) -> Result<(), CliError> {
    let x: Vec<T> = parse_point(&a.at)?;
    if x.len() != chain.svf().dim() {
        return Err(CliError::Input(format!(
            "--at has {} coordinates, the chain lives in dimension {}",
            x.len(),
            chain.svf().dim()
        )));
    }
    let eps: T = parse_scalar(&a.dom_budget)?;
    let result = chain.eval(&x, &eps)?;
    let record = match &result {
        EvalResult::Value(v) => {
            println!("{}", fmt_values(v));
            json!({ "at": fmt_values(&x), "value": v.iter().map(|c| c.to_string()).collect::<Vec<_>>() })
        }
        EvalResult::Undefined(why) => {
            let reason = match why {
                Undefined::OutsideDomain => "outside-domain",
                Undefined::InsideWitness => "inside-witness",
            };
            println!("undefined ({reason})");
            json!({ "at": fmt_values(&x), "undefined": reason })
        }
    };
    run.write_json("eval.json", &record)?;
    Ok(())
}

fn solve_di(run: &mut Run, path: &Path) -> Result<(), CliError> {
    let text = run.read_input(path)?;
    let (prob, cfg) = problem_from_str(&text, path.parent())
        .map_err(|e| CliError::from(e).with_context(&path.display().to_string()))?;
    let traj = filippov_iterate(&prob, &cfg)?;
    let d = prob.x0.len();
    let mut header = vec!["t".to_string()];
    header.extend((0..d).map(|k| format!("x{k}")));
    header.extend((0..d).map(|k| format!("v{k}")));
    header.push("xi".into());
    let rows: Vec<Vec<String>> = traj
        .rows()
        .iter()
        .map(|r| r.iter().map(f64::to_string).collect())
        .collect();
    run.write_csv("trajectory.csv", &header, &rows)?;
    let max_slack = traj.slack.iter().copied().fold(0.0, f64::max);
    let cert = json!({
        "delta": prob.delta(),
        "iterations": traj.residuals.len(),
        "residual": traj.residual(),
        "residuals": traj.residuals,
        "converged": traj.converged,
        "max_violation": traj.max_violation,
        "max_slack": max_slack,
        "tube_ok": traj.tube_ok,
        "certified": traj.certified,
    });
    run.write_json("certificate.json", &cert)?;
    println!(
        "iterations {} residual {:e} max violation {:e} certified {}",
        traj.residuals.len(),
        traj.residual(),
        traj.max_violation,
        traj.certified
    );
    Ok(())
}

#[derive(Serialize)]
struct SimSummary<'a> {
    controller: &'a str,
    final_state: [f64; 3],
    final_norm: f64,
    total_variation: f64,
    max_v_increase_above_half: f64,
    truncated: bool,
    held_steps: usize,
}

fn write_sim(run: &mut Run, controller: &str, rec: &SimRecord) -> Result<(), CliError> {
    let header: Vec<String> = ["t", "x1", "x2", "x3", "u1", "u2", "V", "held"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = rec
        .samples
        .iter()
        .map(|s| {
            let mut r = vec![s.t.to_string()];
            r.extend(s.x.iter().map(f64::to_string));
            r.extend(s.u.iter().map(f64::to_string));
            r.push(s.v.to_string());
            r.push((s.held as u8).to_string());
            r
        })
        .collect();
    run.write_csv("sim.csv", &header, &rows)?;
    let summary = SimSummary {
        controller,
        final_state: rec.final_state(),
        final_norm: rec.final_norm(),
        total_variation: rec.total_variation,
        max_v_increase_above_half: rec.max_v_increase(0.5),
        truncated: rec.truncated,
        held_steps: rec.held_steps,
    };
    println!(
        "{controller}: final |x| {} total variation {} truncated {}",
        summary.final_norm, summary.total_variation, summary.truncated
    );
    run.write_json("summary.json", &summary)?;
    Ok(())
}

fn robot_sim(run: &mut Run, a: &SimArgs) -> Result<(), CliError> {
    let kind = match a.controller {
        ControllerKind::Analytic => "analytic",
        ControllerKind::Selector => "selector",
    };
    run.arg("controller", kind);
    run.arg("x0", &a.x0);
    run.arg("horizon", a.horizon);
    run.arg("dt", a.dt);
    run.arg("substeps", a.substeps);
    let x0: Vec<f64> = parse_point(&a.x0)?;
    let x0: [f64; 3] = x0
        .try_into()
        .map_err(|_| CliError::Input("--x0 needs three coordinates".into()))?;
    if !(a.horizon > 0.0 && a.dt > 0.0 && a.substeps > 0) {
        return Err(CliError::Input("horizon, dt and substeps must be positive".into()));
    }
    let cfg = SimConfig {
        x0,
        horizon: a.horizon,
        dt_control: a.dt,
        substeps: a.substeps,
        ..SimConfig::default()
    };
    if a.controller == ControllerKind::Analytic {
        let rec = simulate(&Controller::Analytic, &cfg);
        return write_sim(run, kind, &rec);
    }
    run.arg("dom_budget", &a.dom_budget);
    let eps: f64 = parse_scalar(&a.dom_budget)?;
    let chain = match &a.chain {
        Some(p) => {
            run.arg("chain", p.display().to_string());
            let text = run.read_input(p)?;
            let wire: ChainWire = parse_json(&text, p)?;
            chain_from_wire::<f64>(&wire)?
        }
        None => {
            run.arg("res", a.res);
            run.arg("n", a.n);
            let export = ExportConfig {
                step: a.res,
                ..ExportConfig::default()
            };
            let (svf, _) = export_svf(&export)?;
            extract(&svf, a.n, &eps)?
        }
    };
    if chain.svf().dim() != 3 || chain.svf().range_dim() != 3 {
        return Err(CliError::Input("the robot chain must map R³ to R³".into()));
    }
    let ev = chain.evaluator(&eps)?;
    let rec = simulate(&Controller::Selector(&ev), &cfg);
    write_sim(run, kind, &rec)
}

fn robot_export(run: &mut Run, a: &ExportArgs) -> Result<(), CliError> {
    run.arg("res", a.res);
    run.arg("half_width", a.half_width);
    let cells = 2.0 * a.half_width / a.res;
    if !(a.res > 0.0 && a.half_width > 0.0) || (cells - cells.round()).abs() > 1e-9 {
        return Err(CliError::Input("--res must divide the box side 2·half-width".into()));
    }
    let cfg = ExportConfig {
        half_width: a.half_width,
        step: a.res,
        ..ExportConfig::default()
    };
    let (svf, report) = export_svf(&cfg)?;
    println!(
        "cells {} net radius τ = {} (n ≤ {} admissible)",
        report.cells,
        report.tau,
        (-report.tau.log2()).floor() as i64 - 1
    );
    run.write_json("robot_svf.json", &svf)?;
    run.write_json("export_report.json", &report)?;
    Ok(())
}
