use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use statexfer::chain::FORMAT_VERSION;
use statexfer::disorder::DistributionKind;
use statexfer::encoding::{
    best_excitation_count, fidelity_multi, fidelity_single, optimal_encoding, transfer_matrix,
};
use statexfer::fermion::oracle_report;
use statexfer::models::{
    apollaro_chain, pst_chain, quadratic_chain, quadratic_time_bound, uniform_chain,
};
use statexfer::montecarlo::{best_time, sweep};
use statexfer::robust::{landscape_csv, objective_landscape, optimize_apollaro};
use statexfer::{
    eigendecompose, Chain, CouplingMode, DisorderSpec, Distribution, FieldMode, Objective,
    SweepAxis, SweepDescriptor, TimePolicy, TransferWindow, WindowPolicy,
};

use crate::args::*;

fn load_chain(args: &ChainArgs) -> Result<Chain> {
    let chain = match args.model {
        Model::Uniform => uniform_chain(args.n)?,
        Model::Pst => pst_chain(args.n)?,
        Model::Quadratic => quadratic_chain(args.n)?,
        Model::Apollaro => {
            let (Some(x), Some(y)) = (args.x, args.y) else {
                bail!(statexfer::Error::InvalidInput(
                    "apollaro needs --x and --y".into()
                ));
            };
            apollaro_chain(args.n, x, y)?
        }
        Model::File => {
            let Some(path) = &args.chain else {
                bail!(statexfer::Error::InvalidInput(
                    "--model file needs --chain PATH".into()
                ));
            };
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Chain::from_json(&text)?
        }
    };
    Ok(chain)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<()> {
    emit(out, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    if let Some(t) = threads {
        if t == 0 {
            bail!(statexfer::Error::InvalidInput(
                "--threads must be at least 1".into()
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()?;
    }
    Ok(())
}

pub fn build(args: &BuildArgs) -> Result<()> {
    let mut chain = load_chain(&args.chain)?;
    let mut report =
        json!({ "format_version": FORMAT_VERSION, "model": chain.label(), "n": chain.len() });
    if args.rescale {
        let (scaled, alpha) = chain.rescale_to_unit_max()?;
        chain = scaled;
        report["alpha"] = json!(alpha);
        if args.chain.model == Model::Quadratic {
            report["time_bound"] = json!(quadratic_time_bound(chain.len())?);
        }
    }
    match &args.out {
        Some(path) => {
            fs::write(path, chain.to_json()? + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
            report["out"] = json!(path);
        }
        None => report["chain"] = serde_json::from_str(&chain.to_json()?)?,
    }
    emit_json(None, &report)
}

pub fn fidelity(args: &FidelityArgs) -> Result<()> {
    let chain = load_chain(&args.chain)?;
    let n = chain.len();
    let time = match args.time {
        TimeArg::At(t) => t,
        TimeArg::Auto => best_time(&chain, args.window_in, args.window_out)?.0,
    };
    let window = TransferWindow::ends(n, args.window_in, args.window_out, time)?;
    let eig = eigendecompose(&chain.single_excitation_matrix())?;
    let solution = optimal_encoding(&transfer_matrix(&eig, &window)?);
    let lambdas: Vec<f64> = solution
        .singular_values
        .iter()
        .map(|l| l.min(1.0))
        .collect();
    let multi = (1..=lambdas.len())
        .map(|k| fidelity_multi(&lambdas[..k]))
        .collect::<statexfer::Result<Vec<f64>>>()?;
    let (best_count, best_fidelity) = best_excitation_count(&lambdas)?;
    let report = json!({
        "format_version": FORMAT_VERSION,
        "chain": chain.label(),
        "n": n,
        "time": time,
        "singular_values": solution.singular_values,
        "fidelity_single": fidelity_single(lambdas[0])?,
        "fidelity_multi": multi,
        "best_excitation_count": best_count,
        "best_fidelity": best_fidelity,
        "encoding": solution.to_json_value(),
    });
    emit_json(args.out.as_deref(), &report)
}

fn sweep_descriptor(args: &SweepArgs) -> Result<SweepDescriptor> {
    if let Some(path) = &args.descriptor {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(serde_json::from_str(&text).map_err(statexfer::Error::from)?);
    }
    let chain = load_chain(&args.chain)?;
    let kind = match args.dist {
        DistArg::Normal => DistributionKind::Normal,
        DistArg::Uniform => DistributionKind::Uniform,
    };
    let disorder = DisorderSpec {
        coupling_mode: match args.coupling_mode {
            CouplingModeArg::Additive => CouplingMode::Additive,
            CouplingModeArg::Multiplicative => CouplingMode::Multiplicative,
            CouplingModeArg::None => CouplingMode::None,
        },
        field_mode: match args.field_mode {
            FieldModeArg::Additive => FieldMode::Additive,
            FieldModeArg::None => FieldMode::None,
        },
        coupling_dist: Distribution { kind, param: 0.0 },
        field_dist: Distribution { kind, param: 0.0 },
        seed: args.seed,
    };
    let time = match args.time {
        SweepTime::Ideal => TimePolicy::Ideal,
        SweepTime::PerSample => TimePolicy::PerSample,
        SweepTime::At(t) => TimePolicy::Fixed(t),
    };
    let axis = |name: &str, r: Range| SweepAxis::new(name, r.min, r.max, r.step);
    Ok(SweepDescriptor {
        format_version: FORMAT_VERSION,
        chain,
        disorder,
        sigma_j: axis("sigma_J", args.sigma_j)?,
        sigma_b: axis("sigma_B", args.sigma_b)?,
        window: WindowPolicy {
            input_size: args.window,
            output_size: args.window_out.unwrap_or(args.window),
            time,
        },
        samples: args.samples,
        quantile: args.quantile,
    })
}

pub fn sweep_cmd(args: &SweepArgs) -> Result<()> {
    set_threads(args.threads)?;
    let descriptor = sweep_descriptor(args)?;
    let grid = sweep(&descriptor)?;
    emit(args.out.as_deref(), &grid.to_csv())
}

pub fn optimize(args: &OptimizeArgs) -> Result<()> {
    set_threads(args.threads)?;
    if !(args.delta >= 0.0 && args.delta.is_finite()) {
        bail!(statexfer::Error::InvalidInput(format!(
            "--delta must be >= 0, got {}",
            args.delta
        )));
    }
    let objective = if args.delta == 0.0 {
        Objective::deterministic(args.n, args.window)
    } else {
        let mut o = Objective::upper_quartile(
            args.n,
            args.window,
            DisorderSpec::uniform_couplings(CouplingMode::Additive, args.delta, args.seed),
        );
        o.metric = statexfer::Metric::Quantile {
            samples: args.samples,
            level: args.quantile,
        };
        o.final_samples = Some(args.final_samples);
        o
    };
    if let (Some(rx), Some(ry)) = (args.landscape_x, args.landscape_y) {
        let xs = SweepAxis::new("x", rx.min, rx.max, rx.step)?.values();
        let ys = SweepAxis::new("y", ry.min, ry.max, ry.step)?.values();
        let grid = objective_landscape(&objective, &xs, &ys)?;
        return emit(args.out.as_deref(), &landscape_csv(&xs, &ys, &grid));
    }
    let result = optimize_apollaro(&objective, args.x0, args.y0)?;
    emit_json(
        args.out.as_deref(),
        &result.report_json(&objective, args.x0, args.y0),
    )
}

pub fn oracle(args: &OracleArgs) -> Result<()> {
    let chain = load_chain(&args.chain)?;
    if !(args.t.is_finite()) {
        bail!(statexfer::Error::InvalidInput("--t must be finite".into()));
    }
    let report = oracle_report(&chain, args.k, args.t, args.tolerance)?;
    emit_json(args.out.as_deref(), &serde_json::to_value(report)?)
}
