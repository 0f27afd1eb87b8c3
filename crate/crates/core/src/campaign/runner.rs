use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Instant;

use crossbeam_channel::unbounded;

use super::config::Study;
use super::probe::{extract_output, validate_probe, ProbeValue};
use super::scenario::{common_grid, realize_scenario, Scenario};
use super::store::{latest_records, read_records, OutputValue, RecordStore, RunRecord, Status, RESULTS_FILE};
use crate::error::{CampaignError, SolverError};
use crate::grid::Grid;
use crate::gsa::SampleDesign;
use crate::io::{fmt_f64, write_csv, Raster, Table};
use crate::swe::{run_simulation, FlowState, SimulationOutput, Topography};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `campaign.max_workers`.
    pub max_workers: Option<usize>,
    /// Continue from existing records instead of requiring an empty store.
    pub resume: bool,
    /// Stop dispatching after this many runs complete in this session,
    /// leaving in-flight runs unrecorded as after a kill.
    pub stop_after: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub executed: usize,
    pub skipped: usize,
    pub retried: usize,
    /// Most simulations observed running at once.
    pub high_water: usize,
    pub table: Table,
}

/// Runs one scenario through the solver.
pub fn simulate(s: &Scenario) -> Result<SimulationOutput, SolverError> {
    let topo = Topography::from_raster(&s.dem)?;
    let init = match s.initial_wse {
        Some(eta) => FlowState::lake_at_rest(&topo, eta),
        None => FlowState::dry(topo.grid),
    };
    run_simulation(&topo, &init, &s.friction, &s.solver, s.t_end, s.inflow.as_ref())
}

type Outputs = Vec<(String, ProbeValue)>;

enum Event {
    Started { run_id: usize, attempt: usize, checksum: String },
    Finished { run_id: usize, attempt: usize, checksum: String, wall: f64, result: Result<Outputs, (String, bool)> },
}

fn run_scenario(study: &Study, scenario: &Scenario, common: Grid) -> Result<Outputs, (String, bool)> {
    let sim = match catch_unwind(AssertUnwindSafe(|| simulate(scenario))) {
        Ok(Ok(sim)) => sim,
        Ok(Err(e)) => {
            let retry = !matches!(e, SolverError::NonFinite { .. });
            return Err((e.to_string(), retry));
        }
        Err(_) => return Err(("simulation panicked".into(), true)),
    };
    study
        .config
        .probes
        .iter()
        .map(|p| extract_output(&sim, p, common).map(|v| (p.name.clone(), v)).map_err(|e| (e.to_string(), false)))
        .collect()
}

fn check_design(study: &Study, design: &SampleDesign) -> Result<(), CampaignError> {
    if design.parameters != study.config.input_parameters() {
        return Err(CampaignError::Config("design parameters do not match the study configuration".into()));
    }
    Ok(())
}

/// Executes every run of `design` not already completed in `store_dir`.
///
/// One coordinator thread owns the record log; workers realize scenarios,
/// simulate and return outputs. Results are keyed by run id, so the final
/// table does not depend on worker count or completion order.
pub fn run_campaign(
    study: &Study,
    design: &SampleDesign,
    store_dir: impl AsRef<Path>,
    opts: &RunOptions,
) -> Result<CampaignReport, CampaignError> {
    check_design(study, design)?;
    let common = common_grid(study)?;
    for p in &study.config.probes {
        validate_probe(p, study.source_grid())?;
        validate_probe(p, common)?;
    }
    let workers = opts.max_workers.unwrap_or(study.config.campaign.max_workers);
    if workers == 0 {
        return Err(CampaignError::Config("workers must be >= 1".into()));
    }
    let store_dir = store_dir.as_ref();
    let existing = read_records(store_dir)?;
    if !opts.resume && !existing.is_empty() {
        return Err(CampaignError::Store(format!("{} already holds run records; resume or use an empty directory", store_dir.display())));
    }
    let mut store = RecordStore::open(store_dir)?;

    let latest = latest_records(&existing);
    let mut pending = Vec::new();
    let mut skipped = 0;
    for run_id in 0..design.run_count() {
        let done = match latest.get(&run_id) {
            Some(r) if r.status == Status::Done => {
                let s = realize_scenario(study, run_id, &design.run_row(run_id))?;
                r.checksum == s.checksum()
                    && r.outputs.values().all(|v| match v {
                        OutputValue::Map(stem) => store.has_map(stem),
                        OutputValue::Scalar(_) => true,
                    })
                    && study.config.probes.iter().all(|p| r.outputs.contains_key(&p.name))
            }
            _ => false,
        };
        if done {
            skipped += 1;
        } else {
            pending.push(run_id);
        }
    }

    let retries = study.config.campaign.retries;
    let active = AtomicUsize::new(0);
    let high_water = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let (job_tx, job_rx) = unbounded::<(usize, usize)>();
    let (ev_tx, ev_rx) = unbounded::<Event>();
    for &id in &pending {
        job_tx.send((id, 1)).expect("receiver alive");
    }

    let mut outstanding = pending.len();
    let mut executed = 0;
    let mut retried = 0;
    let mut failed = Vec::new();
    let mut interrupted = false;

    std::thread::scope(|scope| -> Result<(), CampaignError> {
        for _ in 0..workers.min(pending.len()) {
            let (job_rx, ev_tx) = (job_rx.clone(), ev_tx.clone());
            let (active, high_water, stop) = (&active, &high_water, &stop);
            scope.spawn(move || {
                while let Ok((run_id, attempt)) = job_rx.recv() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let t0 = Instant::now();
                    let event = match realize_scenario(study, run_id, &design.run_row(run_id)) {
                        Err(e) => Event::Finished { run_id, attempt, checksum: String::new(), wall: 0.0, result: Err((e.to_string(), false)) },
                        Ok(scenario) => {
                            let checksum = scenario.checksum();
                            let _ = ev_tx.send(Event::Started { run_id, attempt, checksum: checksum.clone() });
                            let now = active.fetch_add(1, Ordering::SeqCst) + 1;
                            high_water.fetch_max(now, Ordering::SeqCst);
                            let result = run_scenario(study, &scenario, common);
                            active.fetch_sub(1, Ordering::SeqCst);
                            Event::Finished { run_id, attempt, checksum, wall: t0.elapsed().as_secs_f64(), result }
                        }
                    };
                    if ev_tx.send(event).is_err() {
                        break;
                    }
                }
            });
        }
        drop(ev_tx);

        let mut job_tx = Some(job_tx);
        while outstanding > 0 {
            let Ok(ev) = ev_rx.recv() else { break };
            match ev {
                Event::Started { run_id, attempt, checksum } => {
                    store.append(&RunRecord {
                        run_id,
                        status: Status::Running,
                        checksum,
                        attempt,
                        outputs: BTreeMap::new(),
                        wall_time_s: 0.0,
                        error: None,
                    })?;
                }
                Event::Finished { run_id, attempt, checksum, wall, result } => match result {
                    Ok(values) => {
                        let mut outputs = BTreeMap::new();
                        for (name, v) in values {
                            let o = match v {
                                ProbeValue::Scalar(x) => OutputValue::Scalar(x),
                                ProbeValue::Map { wse_max, hmax } => {
                                    let stem = RecordStore::map_stem(&name, run_id);
                                    store.write_map(&stem, &wse_max, &hmax)?;
                                    OutputValue::Map(stem)
                                }
                            };
                            outputs.insert(name, o);
                        }
                        store.append(&RunRecord { run_id, status: Status::Done, checksum, attempt, outputs, wall_time_s: wall, error: None })?;
                        executed += 1;
                        outstanding -= 1;
                        if opts.stop_after.is_some_and(|k| executed >= k) && outstanding > 0 {
                            stop.store(true, Ordering::SeqCst);
                            interrupted = true;
                            break;
                        }
                    }
                    Err((msg, retryable)) => {
                        store.append(&RunRecord {
                            run_id,
                            status: Status::Failed,
                            checksum,
                            attempt,
                            outputs: BTreeMap::new(),
                            wall_time_s: wall,
                            error: Some(msg),
                        })?;
                        if retryable && attempt <= retries {
                            retried += 1;
                            job_tx.as_ref().expect("open while runs outstanding").send((run_id, attempt + 1)).expect("workers alive");
                        } else {
                            failed.push(run_id);
                            outstanding -= 1;
                        }
                    }
                },
            }
            if outstanding == 0 {
                job_tx = None;
            }
        }
        drop(job_tx);
        // drain so blocked workers can finish; late results are discarded
        stop.store(true, Ordering::SeqCst);
        while job_rx.try_recv().is_ok() {}
        drop(ev_rx);
        Ok(())
    })?;

    if interrupted {
        return Err(CampaignError::Interrupted { completed: executed });
    }
    if !failed.is_empty() {
        failed.sort_unstable();
        return Err(CampaignError::Incomplete { failed });
    }
    let table = results_table(study, design, store_dir)?;
    write_csv(&table, store_dir.join(RESULTS_FILE))?;
    Ok(CampaignReport { executed, skipped, retried, high_water: high_water.load(Ordering::SeqCst), table })
}

/// One row per run: run id, realized parameter values, scalar probe outputs.
pub fn results_table(study: &Study, design: &SampleDesign, store_dir: impl AsRef<Path>) -> Result<Table, CampaignError> {
    let records = read_records(store_dir)?;
    let latest = latest_records(&records);
    let scalar: Vec<&str> = study.config.probes.iter().filter(|p| !p.is_map()).map(|p| p.name.as_str()).collect();
    let mut cols = vec!["run_id".to_string()];
    cols.extend(design.names());
    cols.extend(scalar.iter().map(|s| s.to_string()));
    let mut t = Table::new(cols);
    for run_id in 0..design.run_count() {
        let rec = latest.get(&run_id).filter(|r| r.status == Status::Done).ok_or_else(|| CampaignError::Incomplete { failed: vec![run_id] })?;
        let mut row = vec![run_id.to_string()];
        row.extend(design.parameters.iter().zip(design.run_row(run_id)).map(|(p, v)| p.distribution.display(v)));
        for name in &scalar {
            match rec.outputs.get(*name) {
                Some(OutputValue::Scalar(x)) => row.push(fmt_f64(*x)),
                _ => return Err(CampaignError::Store(format!("run {run_id} lacks output `{name}`"))),
            }
        }
        t.push(row);
    }
    Ok(t)
}

/// Map outputs of probe `name` for every run in design order, as
/// `(wse_max stack, wet mask)`; a cell is wet if some run's `hmax` exceeds `wet_threshold`.
pub fn load_map_stack(
    design: &SampleDesign,
    store_dir: impl AsRef<Path>,
    name: &str,
    wet_threshold: f64,
) -> Result<(Vec<Raster>, Vec<bool>), CampaignError> {
    let store_dir = store_dir.as_ref();
    let records = read_records(store_dir)?;
    let latest = latest_records(&records);
    let mut stack = Vec::with_capacity(design.run_count());
    let mut wet: Vec<bool> = Vec::new();
    for run_id in 0..design.run_count() {
        let stem = match latest.get(&run_id).filter(|r| r.status == Status::Done).and_then(|r| r.outputs.get(name)) {
            Some(OutputValue::Map(stem)) => stem.clone(),
            _ => return Err(CampaignError::Store(format!("run {run_id} has no map output `{name}`"))),
        };
        let (w, h) = super::store::read_map(store_dir, &stem)?;
        if wet.is_empty() {
            wet = vec![false; h.values.len()];
        }
        if h.values.len() != wet.len() {
            return Err(CampaignError::GridMismatch);
        }
        for (k, &d) in h.values.iter().enumerate() {
            if !h.is_nodata(k) && d > wet_threshold {
                wet[k] = true;
            }
        }
        stack.push(w);
    }
    Ok((stack, wet))
}
