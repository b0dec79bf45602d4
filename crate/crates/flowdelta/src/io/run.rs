//! Solver runs for scenarios, their summaries and output files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::catalog::CatalogEntry;
use super::config::{OutputKind, Scenario};
use super::svg;
use super::table::{self, ProfileRow};
use super::IoError;
use crate::classify::{self, WavePattern};
use crate::delta::{self, DeltaTrajectory};
use crate::model::State;
use crate::par::{self, Execution};
use crate::solver::{self, ExtractOptions, RunOutput, WaveStructure};
use crate::waves::{self, WaveKind};

/// Rows in a written delta trajectory, at most.
const TRAJECTORY_ROWS: f64 = 2000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotReport {
    pub t: f64,
    pub step: usize,
    /// Case of the left state at `t`, if it is off the degenerate line.
    pub case_id: Option<String>,
    /// Frozen-time region label at `t`.
    pub region: Option<String>,
    pub extracted: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub case_id: Option<String>,
    pub region: Option<String>,
    /// Waves of the analytic pattern at `t = 0`.
    pub analytic_sequence: Option<String>,
    /// The analytic pattern as a numerical profile should show it.
    pub expected_sequence: Option<String>,
    /// Waves read off the final snapshot.
    pub extracted_sequence: String,
    pub sequences_agree: Option<bool>,
    pub analytic_middle_states: Vec<State>,
    pub extracted_middle_states: Vec<State>,
    pub snapshots: Vec<SnapshotReport>,
    pub steps: usize,
    pub t_final: f64,
    pub max_courant: f64,
    /// Relative change of `Σρ dx` and `Σm dx` over the run.
    pub mass_drift: f64,
    pub momentum_drift: f64,
    pub delta_trajectory: Option<String>,
    /// Files written, relative to the output directory.
    pub manifest: Vec<String>,
}

/// Everything a solve produced, before any file is written.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub summary: RunSummary,
    pub output: RunOutput,
    pub structures: Vec<WaveStructure>,
    pub pattern: Option<WavePattern>,
}

fn drift(before: f64, after: f64) -> f64 {
    (after - before).abs() / before.abs().max(f64::MIN_POSITIVE)
}

/// Runs the solver and reads the wave structure off every snapshot.
pub fn solve(name: &str, scenario: &Scenario, exec: Execution) -> Result<SolveOutcome, IoError> {
    scenario.validate()?;
    let p = &scenario.params;
    let (l, r) = (scenario.left, scenario.right);
    let opts = ExtractOptions::default();
    let output = solver::run(&scenario.run_config(), exec)?;
    let structures: Vec<WaveStructure> = output.snapshots[1..]
        .iter()
        .map(|s| solver::extract_wave_structure(p, &output.grid, s, &opts))
        .collect();
    let pattern = classify::classify_region(p, l, r, 0.0).ok();
    let frozen = p.source.is_zero();
    let snapshots = output.snapshots[1..]
        .iter()
        .zip(&structures)
        .map(|(s, ws)| SnapshotReport {
            t: s.t,
            step: s.step,
            case_id: classify::case_id(p, l, s.t).ok().map(|c| c.to_string()),
            region: if frozen {
                pattern.as_ref().map(|w| w.label())
            } else {
                classify::classify_region(p, l, r, s.t).ok().map(|w| w.label())
            },
            extracted: ws.sequence(),
        })
        .collect();
    let expected = pattern.as_ref().map(|w| waves::sequence_string(&w.numerical_signature(l, r, &opts)));
    let extracted = structures.last().map(|w| w.sequence()).unwrap_or_default();
    let [(m0, q0), (m1, q1)] = output.totals;
    let summary = RunSummary {
        name: name.into(),
        case_id: classify::case_id(p, l, 0.0).ok().map(|c| c.to_string()),
        region: pattern.as_ref().map(|w| w.label()),
        analytic_sequence: pattern.as_ref().map(|w| w.sequence()),
        sequences_agree: expected.as_ref().map(|e| *e == extracted),
        expected_sequence: expected,
        extracted_sequence: extracted,
        analytic_middle_states: pattern.as_ref().map(|w| w.middle_states.clone()).unwrap_or_default(),
        extracted_middle_states: structures.last().map(|w| w.middle_states()).unwrap_or_default(),
        snapshots,
        steps: output.steps,
        t_final: output.t_final,
        max_courant: output.max_courant,
        mass_drift: drift(m0, m1),
        momentum_drift: drift(q0, q1),
        delta_trajectory: None,
        manifest: Vec::new(),
    };
    Ok(SolveOutcome { summary, output, structures, pattern })
}

/// Trajectory of the direct delta from `left` to `right`, if the pattern is one.
pub fn delta_trajectory(scenario: &Scenario, pattern: Option<&WavePattern>) -> Option<DeltaTrajectory> {
    let p = pattern?;
    if p.kinds() != [WaveKind::Delta] {
        return None;
    }
    let dt = (scenario.t_end / TRAJECTORY_ROWS).max(delta::DEFAULT_DT);
    delta::integrate_delta(&scenario.params, scenario.left, scenario.right, scenario.t_end, dt).ok()
}

/// Writes profile CSV/SVG, the delta trajectory when there is one, and
/// `summary.json`; returns the summary with its manifest filled in.
pub fn write_solve(dir: &Path, scenario: &Scenario, outcome: &SolveOutcome) -> Result<RunSummary, IoError> {
    fs::create_dir_all(dir)?;
    let mut summary = outcome.summary.clone();
    let mut manifest = Vec::new();
    let rows: Vec<ProfileRow> = table::profile_rows(&scenario.params, &outcome.output.grid, &outcome.output.snapshots);
    table::write_csv_file(&dir.join("profiles.csv"), &rows)?;
    manifest.push("profiles.csv".to_string());
    fs::write(dir.join("profiles.svg"), svg::profile_svg(&rows, &profile_title(&summary)))?;
    manifest.push("profiles.svg".to_string());
    if scenario.wants(OutputKind::Delta) || outcome.pattern.as_ref().is_some_and(|p| p.kinds() == [WaveKind::Delta]) {
        if let Some(traj) = delta_trajectory(scenario, outcome.pattern.as_ref()) {
            table::write_csv_file(&dir.join("delta.csv"), &table::trajectory_rows(&traj))?;
            manifest.push("delta.csv".to_string());
            summary.delta_trajectory = Some("delta.csv".into());
        }
    }
    manifest.push("summary.json".to_string());
    summary.manifest = manifest;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}

pub fn profile_title(s: &RunSummary) -> String {
    let case = s.case_id.as_deref().unwrap_or("degenerate");
    let region = s.region.as_deref().unwrap_or("unclassified");
    format!("{}: {case}, {region}, t = {}", s.name, s.t_final)
}

/// Solves several catalog entries side by side; each run is sequential inside.
pub fn run_catalog(entries: &[CatalogEntry], exec: Execution) -> Vec<Result<SolveOutcome, IoError>> {
    par::map_slice(exec, entries, |e| solve(&e.name, &e.scenario, Execution::Sequential))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;

    #[test]
    fn constant_data_gives_flat_profiles() {
        let s = State::new(3.0, -3.0);
        let sc = Scenario::new(SystemParams::frozen(-1.5, 5.0).unwrap(), s, s, 4.0).unwrap();
        let out = solve("flat", &sc, Execution::Sequential).unwrap();
        assert_eq!(out.summary.extracted_sequence, "");
        assert_eq!(out.summary.expected_sequence.as_deref(), Some(""));
        assert_eq!(out.summary.sequences_agree, Some(true));
        let last = out.output.snapshots.last().unwrap();
        assert!(last.rho.iter().all(|r| (r - 3.0).abs() < 1e-13));
        assert_eq!(out.summary.snapshots.last().unwrap().t, 4.0);
    }
}
