//! Drives a scenario to completion and post-processes finished runs from their artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::artifacts::{
    list_snapshots, read_diagnostics, read_snapshot, snapshot_path, snapshot_step, write_json,
    write_snapshot, FittedRate, NdjsonSink, ProbeOutcome, RunSummary, DIAGNOSTICS_FILE,
    SCENARIO_FILE, SNAPSHOT_DIR, SUMMARY_FILE,
};
use super::scenario::{parse_scenario, Scenario};
use crate::diagnostics::{record, squirt_monitor, DiagnosticsRecord, SquirtProbe};
use crate::error::{MuskatError, Result};
use crate::evolution::{HaltReason, Simulation};
use crate::linear::{fit_growth_rate, mode_coefficient, ModeSample};
use crate::state::{ContourPair, SurfaceField};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the scenario's record cadence.
    pub cadence: Option<u64>,
    /// Snapshot to continue from; its run directory must hold the matching diagnostics.
    pub resume: Option<PathBuf>,
}

/// Summary plus the error that halted the run, if any.
#[derive(Debug)]
pub struct RunReport {
    pub summary: RunSummary,
    pub error: Option<MuskatError>,
}

fn pair_from_heights(template: &ContourPair, f: Vec<f64>, g: Vec<f64>) -> Result<ContourPair> {
    let f = SurfaceField::new(*template.grid(), f, template.f().far_constant())?;
    let g = SurfaceField::new(*template.grid(), g, template.g().far_constant())?;
    ContourPair::new(f, g, template.densities())
}

/// Time of the record with `step` in a diagnostics stream.
fn time_of_step(records: &[DiagnosticsRecord], step: u64, path: &Path) -> Result<f64> {
    records
        .iter()
        .find(|r| r.step == step)
        .map(|r| r.t)
        .ok_or_else(|| MuskatError::Artifact {
            path: path.display().to_string(),
            message: format!("no diagnostics record for step {step}"),
        })
}

fn tracked_modes(s: &Scenario) -> Vec<(&'static str, [i64; 2])> {
    let mut out = Vec::new();
    for (name, spec) in [("upper", &s.upper), ("lower", &s.lower)] {
        for m in &spec.modes {
            if m.k != [0, 0] && !out.contains(&(name, m.k)) {
                out.push((name, m.k));
            }
        }
    }
    out
}

/// Executes `scenario`, writing every artifact under `out`.
pub fn run_scenario(scenario: &Scenario, out: &Path, opts: &RunOptions) -> Result<RunReport> {
    let initial = scenario.build_pair()?;
    let control = scenario.control()?;
    let op = scenario.operator(&initial)?;
    let rule = scenario.rule()?;
    let config = scenario.diagnostics_config();
    let cadence = opts.cadence.unwrap_or(scenario.stepping.record_every);
    if cadence == 0 {
        return Err(MuskatError::validation("cadence", "must be positive"));
    }

    let snap_dir = out.join(SNAPSHOT_DIR);
    std::fs::create_dir_all(&snap_dir)?;
    std::fs::write(out.join(SCENARIO_FILE), scenario.to_json() + "\n")?;
    let diag_path = out.join(DIAGNOSTICS_FILE);

    let (mut sim, mut sink, mut history) = match &opts.resume {
        None => (
            Simulation::new(initial.clone(), control, op)?,
            NdjsonSink::create(&diag_path)?,
            Vec::new(),
        ),
        Some(snap) => {
            let step = snapshot_step(snap)?;
            let (f, g) = read_snapshot(snap, initial.grid())?;
            let pair = pair_from_heights(&initial, f, g)?;
            let old = read_diagnostics(&diag_path)?;
            let t = time_of_step(&old, step, &diag_path)?;
            // Keep the prefix up to the snapshot; the resumed run re-emits its first record.
            let kept: Vec<DiagnosticsRecord> = old.into_iter().filter(|r| r.step < step).collect();
            let mut sink = NdjsonSink::create(&diag_path)?;
            for r in &kept {
                sink.write(r)?;
            }
            (
                Simulation::new(pair, control, op)?.resume(t, step),
                sink,
                kept,
            )
        }
    };

    let keep_pairs = !scenario.diagnostics.squirt_probes.is_empty();
    let modes = tracked_modes(scenario);
    let mut mode_series: Vec<Vec<ModeSample>> = vec![Vec::new(); modes.len()];
    let history_pairs: Vec<ContourPair> = if keep_pairs || !modes.is_empty() {
        history
            .iter()
            .map(|r| {
                let (f, g) = read_snapshot(&snapshot_path(&snap_dir, r.step), initial.grid())?;
                pair_from_heights(&initial, f, g)
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    for (p, r) in history_pairs.iter().zip(&history) {
        for (series, (surf, k)) in mode_series.iter_mut().zip(&modes) {
            let h = if *surf == "upper" { p.f() } else { p.g() };
            series.push(ModeSample {
                t: r.t,
                amplitude: mode_coefficient(h, *k).norm(),
            });
        }
    }
    let mut pairs: BTreeMap<u64, ContourPair> = BTreeMap::new();
    if keep_pairs {
        pairs.extend(history.iter().map(|r| r.step).zip(history_pairs));
    }

    let outcome = sim.run(cadence, |state| {
        let rec = record(state, &rule, &config, None)?;
        write_snapshot(&snap_dir, state.step_count, &state.pair)?;
        sink.write(&rec)?;
        for (series, (surf, k)) in mode_series.iter_mut().zip(&modes) {
            let h = if *surf == "upper" {
                state.pair.f()
            } else {
                state.pair.g()
            };
            series.push(ModeSample {
                t: state.t,
                amplitude: mode_coefficient(h, *k).norm(),
            });
        }
        if keep_pairs {
            pairs.insert(state.step_count, state.pair.clone());
        }
        history.push(rec);
        Ok(())
    });
    let (halt, error) = match outcome {
        Ok(o) => (o.halt, o.error),
        Err(e) if e.is_numerical_halt() => {
            let halt = match e {
                MuskatError::ContourCollision { .. } => HaltReason::Collision,
                _ => HaltReason::NumericalFailure,
            };
            (halt, Some(e))
        }
        Err(e) => return Err(e),
    };

    let squirt = if keep_pairs {
        let times: Vec<f64> = history.iter().map(|r| r.t).collect();
        let u: Vec<f64> = history.iter().map(|r| r.u_sup).collect();
        let refs: Vec<&ContourPair> = history.iter().map(|r| &pairs[&r.step]).collect();
        probe_outcomes(&scenario.probes(), &times, &u, &refs)?
    } else {
        Vec::new()
    };

    let gap0 = initial.mean_gap();
    let fitted_rates = modes
        .iter()
        .zip(&mode_series)
        .map(|((surf, k), series)| match fit_growth_rate(series, gap0) {
            Ok(fit) => FittedRate {
                surface: surf.to_string(),
                k: *k,
                rate: Some(fit.rate),
                note: fit.warning,
            },
            Err(e) => FittedRate {
                surface: surf.to_string(),
                k: *k,
                rate: None,
                note: Some(e.to_string()),
            },
        })
        .collect();

    let state = sim.state();
    let trusted = sim.control().trusted_floor;
    let summary = RunSummary {
        halt,
        final_t: state.t,
        steps: state.step_count,
        records: history.len(),
        message: error.as_ref().map(|e| e.to_string()),
        under_resolved: history.iter().any(|r| r.min_gap < trusted),
        squirt,
        fitted_rates,
    };
    write_json(&out.join(SUMMARY_FILE), &summary)?;
    Ok(RunReport { summary, error })
}

fn probe_outcomes(
    probes: &[SquirtProbe],
    times: &[f64],
    u: &[f64],
    pairs: &[&ContourPair],
) -> Result<Vec<ProbeOutcome>> {
    probes
        .iter()
        .map(|p| {
            let rep = squirt_monitor(p, times, u, pairs)?;
            Ok(ProbeOutcome {
                probe: *p,
                verdict: rep.verdict,
                t0: rep.t0,
                worst_relative_drop: rep.worst_relative_drop,
            })
        })
        .collect()
}

/// A finished run read back from disk: scenario, diagnostics and the snapshot for each record.
pub struct RunArtifacts {
    pub scenario: Scenario,
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<(u64, PathBuf)>,
    initial: ContourPair,
}

impl RunArtifacts {
    pub fn open(dir: &Path) -> Result<Self> {
        let scenario = parse_scenario(&dir.join(SCENARIO_FILE))?;
        let records = read_diagnostics(&dir.join(DIAGNOSTICS_FILE))?;
        let snapshots = list_snapshots(&dir.join(SNAPSHOT_DIR))?;
        let initial = scenario.build_pair()?;
        Ok(RunArtifacts {
            scenario,
            records,
            snapshots,
            initial,
        })
    }

    pub fn pair_at(&self, path: &Path) -> Result<ContourPair> {
        let (f, g) = read_snapshot(path, self.initial.grid())?;
        pair_from_heights(&self.initial, f, g)
    }

    fn time_of(&self, step: u64) -> Option<f64> {
        self.records.iter().find(|r| r.step == step).map(|r| r.t)
    }
}

/// Recomputes the diagnostics of every snapshot, including a fresh velocity sample.
pub fn rediagnose(dir: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let art = RunArtifacts::open(dir)?;
    let rule = art.scenario.rule()?;
    let config = art.scenario.diagnostics_config();
    let mut out = Vec::with_capacity(art.snapshots.len());
    for (step, path) in &art.snapshots {
        let t = art.time_of(*step).ok_or_else(|| MuskatError::Artifact {
            path: path.display().to_string(),
            message: format!("no diagnostics record for step {step}"),
        })?;
        let state = crate::evolution::TimeState {
            t,
            pair: art.pair_at(path)?,
            step_count: *step,
            dt_current: 0.0,
        };
        out.push(record(&state, &rule, &config, None)?);
    }
    Ok(out)
}

/// Applies the squirt monitor to a finished run; `probes` defaults to the scenario's.
pub fn squirt_check(dir: &Path, probes: Option<Vec<SquirtProbe>>) -> Result<Vec<ProbeOutcome>> {
    let art = RunArtifacts::open(dir)?;
    let probes = probes.unwrap_or_else(|| art.scenario.probes());
    if probes.is_empty() {
        return Err(MuskatError::validation("squirt_probes", "no probe given"));
    }
    let by_step: BTreeMap<u64, &PathBuf> = art.snapshots.iter().map(|(s, p)| (*s, p)).collect();
    let mut pairs = Vec::with_capacity(art.records.len());
    for r in &art.records {
        let path = by_step.get(&r.step).ok_or_else(|| MuskatError::Artifact {
            path: dir.join(SNAPSHOT_DIR).display().to_string(),
            message: format!("missing snapshot for step {}", r.step),
        })?;
        pairs.push(art.pair_at(path)?);
    }
    let times: Vec<f64> = art.records.iter().map(|r| r.t).collect();
    let u: Vec<f64> = art.records.iter().map(|r| r.u_sup).collect();
    let refs: Vec<&ContourPair> = pairs.iter().collect();
    probe_outcomes(&probes, &times, &u, &refs)
}
