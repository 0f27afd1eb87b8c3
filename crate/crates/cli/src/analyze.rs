use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use swegsa::campaign::{
    load_map_stack, read_records, run_campaign, OutputValue, RunOptions, Study, RECORDS_FILE,
};
use swegsa::gsa::{
    analyze as sobol, sobol_convergence, default_checkpoints, histogram, sample as draw, sobol_map,
    BootstrapOptions, PickFreezeOutputs, SampleDesign,
};
use swegsa::io::{fmt_f64, read_csv, write_ascii_grid, write_csv, Table};
use swegsa::Execution;

use crate::error::{self, CliError};
use crate::IndexOrder;

fn load_design(dir: &Path) -> Result<SampleDesign, CliError> {
    SampleDesign::load(dir).map_err(|e| CliError::config(format!("design {}: {e}", dir.display())))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Other(format!("{}: {e}", dir.display())))
}

pub fn sample(config: &Path, out: &Path) -> Result<(), CliError> {
    let study = Study::load(config)?;
    let c = &study.config;
    let design = draw(&c.input_parameters(), c.campaign.n, c.campaign.seed).map_err(CliError::config)?;
    design.save(out).map_err(error::output)?;
    println!("{} runs ({} parameters, n = {})", design.run_count(), design.p(), design.n);
    Ok(())
}

pub fn run(config: &Path, design: &Path, out: &Path, workers: Option<usize>, resume: bool) -> Result<(), CliError> {
    let study = Study::load(config)?;
    let design = load_design(design)?;
    let opts = RunOptions { max_workers: workers, resume, stop_after: None };
    let report = run_campaign(&study, &design, out, &opts)?;
    println!(
        "executed {} run(s), skipped {}, retried {}, peak concurrency {}",
        report.executed, report.skipped, report.retried, report.high_water
    );
    Ok(())
}

/// Results table with rows checked against the design's run order.
fn load_results(results: &Path, design: &SampleDesign) -> Result<Table, CliError> {
    let t = read_csv(results).map_err(|e| CliError::config(format!("results {}: {e}", results.display())))?;
    let ids = t.f64_column("run_id").map_err(|e| CliError::config(format!("results: {e}")))?;
    if ids.len() != design.run_count() || ids.iter().enumerate().any(|(k, &id)| id != k as f64) {
        return Err(CliError::config(format!(
            "results: expected run ids 0..{} in order, found {} row(s)",
            design.run_count(),
            ids.len()
        )));
    }
    Ok(t)
}

fn output_columns(t: &Table, design: &SampleDesign) -> Vec<String> {
    let names = design.names();
    t.columns.iter().filter(|c| *c != "run_id" && !names.contains(c)).cloned().collect()
}

fn store_dir(results: &Path) -> PathBuf {
    results.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

/// Names of map outputs recorded next to `results`.
fn map_outputs(results: &Path) -> Result<BTreeSet<String>, CliError> {
    let dir = store_dir(results);
    if !dir.join(RECORDS_FILE).exists() {
        return Ok(BTreeSet::new());
    }
    let records = read_records(&dir)?;
    Ok(records
        .iter()
        .flat_map(|r| r.outputs.iter())
        .filter(|(_, v)| matches!(v, OutputValue::Map(_)))
        .map(|(k, _)| k.clone())
        .collect())
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

pub fn analyze(
    results: &Path,
    design: &Path,
    out: &Path,
    resamples: usize,
    seed: u64,
    bins: usize,
    wet_threshold: f64,
) -> Result<(), CliError> {
    let design = load_design(design)?;
    let table = load_results(results, &design)?;
    let names = design.names();
    let opts = BootstrapOptions { resamples, seed, ..BootstrapOptions::default() };
    create_dir(out)?;
    for name in output_columns(&table, &design) {
        let y = table.f64_column(&name).map_err(|e| CliError::config(format!("results: {e}")))?;
        let outputs = PickFreezeOutputs::new(design.n, design.p(), &y).map_err(CliError::config)?;
        let res = sobol(&names, &outputs, &opts, Execution::Parallel).map_err(CliError::config)?;
        let stem = file_stem(&name);
        write_csv(&res.to_table(), out.join(format!("sobol_{stem}.csv"))).map_err(error::output)?;
        let conv = sobol_convergence(&outputs, &default_checkpoints(design.n));
        write_csv(&conv.to_table(&names), out.join(format!("convergence_{stem}.csv"))).map_err(error::output)?;
        let base = &y[..2 * design.n];
        write_csv(&histogram(base, bins, None).to_table(), out.join(format!("histogram_{stem}.csv")))
            .map_err(error::output)?;
        let mut cols = names.clone();
        cols.push(name.clone());
        let mut sc = Table::new(cols);
        for (r, &yr) in base.iter().enumerate() {
            let mut row: Vec<String> =
                design.parameters.iter().zip(design.run_row(r)).map(|(p, v)| p.distribution.display(v)).collect();
            row.push(fmt_f64(yr));
            sc.push(row);
        }
        write_csv(&sc, out.join(format!("scatter_{stem}.csv"))).map_err(error::output)?;
        println!("{name}: var = {:.6e}{}", res.var_y, if res.degenerate { " (degenerate)" } else { "" });
    }
    for probe in map_outputs(results)? {
        let (stack, wet) = load_map_stack(&design, store_dir(results), &probe, wet_threshold)?;
        let map = sobol_map(&stack, design.n, &names, Some(&wet), Execution::Parallel).map_err(CliError::config)?;
        let dir = out.join("maps").join(file_stem(&probe));
        map.write(&dir).map_err(error::output)?;
        println!("{probe}: index maps in {}", dir.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn map(
    results: &Path,
    design: &Path,
    param: &str,
    order: IndexOrder,
    out: &Path,
    probe: Option<&str>,
    wet_threshold: f64,
) -> Result<(), CliError> {
    let design = load_design(design)?;
    let names = design.names();
    let Some(i) = names.iter().position(|n| n == param) else {
        return Err(CliError::config(format!("unknown parameter `{param}`; known: {}", names.join(", "))));
    };
    let available = map_outputs(results)?;
    let probe = match probe {
        Some(p) if available.contains(p) => p.to_string(),
        Some(p) => {
            let known: Vec<&str> = available.iter().map(String::as_str).collect();
            return Err(CliError::config(format!("unknown map output `{p}`; known: {}", known.join(", "))));
        }
        None if available.len() == 1 => available.iter().next().cloned().unwrap_or_default(),
        None if available.is_empty() => {
            return Err(CliError::config(format!("no map outputs recorded in {}", store_dir(results).display())))
        }
        None => {
            let known: Vec<&str> = available.iter().map(String::as_str).collect();
            return Err(CliError::config(format!("several map outputs; choose one with --probe: {}", known.join(", "))));
        }
    };
    let (stack, wet) = load_map_stack(&design, store_dir(results), &probe, wet_threshold)?;
    let map = sobol_map(&stack, design.n, &names, Some(&wet), Execution::Parallel).map_err(CliError::config)?;
    let (prefix, raster) = match order {
        IndexOrder::First => ("S1", &map.first[i]),
        IndexOrder::Total => ("ST", &map.total[i]),
    };
    create_dir(out)?;
    let path = out.join(format!("{prefix}_{}.asc", file_stem(param)));
    write_ascii_grid(raster, &path).map_err(error::output)?;
    println!("wrote {}", path.display());
    Ok(())
}
