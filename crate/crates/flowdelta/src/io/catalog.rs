//! Named scenarios for every figure panel, transition study, overcompressive
//! scan and state-space map.

use serde::{Deserialize, Serialize};

use super::config::{OutputKind, Scenario};
use crate::model::{SourceTerm, State, SystemParams};
use crate::solver;
use crate::waves::{self, WaveKind};

/// Distance in cells the fastest initial wave of a panel travels by `t_end`.
pub const PANEL_TRAVEL: f64 = 1200.0;

/// Step budget of the transition studies, in blocks of 1000 steps.
pub const TRANSITION_BLOCKS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EntryKind {
    /// Zero-source Riemann problem with a captioned region and wave sequence.
    Panel { case: u8, region: String, caption: Vec<WaveKind> },
    /// Time-dependent source driving the left state across the degenerate line.
    Transition { cases: Vec<u8>, stages: Vec<String> },
    /// Overcompressive region at a list of times.
    Scan { case: u8, times: Vec<f64> },
    /// State-space region map around the left state.
    Map { case: u8 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub title: String,
    pub scenario: Scenario,
    pub kind: EntryKind,
}

impl CatalogEntry {
    pub fn is_panel(&self) -> bool {
        matches!(self.kind, EntryKind::Panel { .. })
    }
}

// (case, a, left_u, right_rho, right_u, region, caption)
const PANELS: [(u8, f64, f64, f64, f64, &str, &str); 31] = [
    (1, -1.5, -3.0, 2.0, -5.0, "I_a", "S_a + C_0"),
    (1, -1.5, -3.0, 7.0, -2.0, "II_a", "R_a + C_0"),
    (1, -1.5, -3.0, 9.0, -9.0, "IV", "R_a + S_delta"),
    (1, -1.5, -3.0, 4.0, 5.0, "VI", "R_a + C_0 + R_a"),
    (4, -1.5, 3.0, 7.0, 5.0, "I_0", "C_0 + S_a"),
    (4, -1.5, 3.0, 2.0, 5.0, "II_0", "C_0 + R_a"),
    (4, -1.5, 3.0, 9.0, -8.0, "IV", "S_delta"),
    (4, -1.5, 3.0, 4.0, -5.0, "V", "C_0 + V + C_0"),
    (13, -0.5, -3.0, 7.0, -2.0, "I_a", "S_a + C_0"),
    (13, -0.5, -3.0, 2.0, -5.0, "II_a", "R_a + C_0"),
    (13, -0.5, -3.0, 9.0, -9.0, "IV", "S_delta"),
    (13, -0.5, -3.0, 7.0, 5.0, "VI", "S_a + C_0 + R_a"),
    (16, -0.5, 3.0, 2.0, 5.0, "I_0", "C_0 + S_a"),
    (16, -0.5, 3.0, 7.0, 5.0, "II_0", "C_0 + R_a"),
    (16, -0.5, 3.0, 9.0, -9.0, "IV", "S_delta"),
    (16, -0.5, 3.0, 7.0, -2.0, "V", "C_0 + V + S_a + C_0"),
    (7, -1.0, -3.0, 9.0, -9.0, "IV", "S_delta"),
    (7, -1.0, -3.0, 6.0, 4.0, "VI", "C_a + C_0 + C_a"),
    (7, -1.0, -3.0, 2.0, -5.0, "III_a", "C_a + C_0"),
    (7, -1.0, -3.0, 6.0, -4.0, "III_a", "C_a + C_0"),
    (10, -1.0, 3.0, 7.0, 5.0, "III_0", "C_0 + C_a"),
    (10, -1.0, 3.0, 7.0, -2.0, "V", "C_0 + V + C_a + C_0"),
    (10, -1.0, 3.0, 9.0, -9.0, "IV", "S_delta"),
    (19, 0.5, -3.0, 2.0, -5.0, "I_0", "C_0 + S_a"),
    (19, 0.5, -3.0, 7.0, -5.0, "II_0", "C_0 + R_a"),
    (19, 0.5, -3.0, 9.0, 9.0, "IV", "S_delta"),
    (19, 0.5, -3.0, 7.0, 2.0, "V", "C_0 + V + S_a + C_0"),
    (22, 0.5, 3.0, 7.0, 5.0, "I_a", "S_a + C_0"),
    (22, 0.5, 3.0, 2.0, 4.0, "II_a", "R_a + C_0"),
    (22, 0.5, 3.0, 1.0, 5.0, "V", "R_a + V + C_0"),
    (22, 0.5, 3.0, 4.0, -4.0, "VI", "S_a + C_0 + S_a"),
];

/// The eight cases with state-space figures, as `(case, a, left_u)`.
pub const MAP_CASES: [(u8, f64, f64); 8] =
    [(1, -1.5, -3.0), (4, -1.5, 3.0), (13, -0.5, -3.0), (16, -0.5, 3.0), (7, -1.0, -3.0), (10, -1.0, 3.0), (19, 0.5, -3.0), (22, 0.5, 3.0)];

pub const RHO_BAR: f64 = 5.0;
pub const LEFT_RHO: f64 = 3.0;

fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

fn frozen(a: f64, rho_bar: f64) -> SystemParams {
    SystemParams::frozen(a, rho_bar).expect("catalog parameters are valid")
}

fn scenario(params: SystemParams, left: State, right: State, t_end: f64) -> Scenario {
    Scenario::new(params, left, right, t_end).expect("catalog scenarios are valid")
}

fn panel_name(case: u8, region: &str, taken: &[CatalogEntry]) -> String {
    let base = format!("case{case:02}_region_{}", region.replace('_', ""));
    let n = taken.iter().filter(|e| e.name == base || e.name.starts_with(&format!("{base}_"))).count();
    if n == 0 {
        base
    } else {
        format!("{base}_{}", n + 1)
    }
}

fn panels(out: &mut Vec<CatalogEntry>) {
    for (case, a, ul, rr, ur, region, caption) in PANELS {
        let params = frozen(a, RHO_BAR);
        let (left, right) = (State::new(LEFT_RHO, ul), State::new(rr, ur));
        let t_end = round_sig(PANEL_TRAVEL / solver::speed_bound(&params, left, right, 0.0), 3);
        let name = panel_name(case, region, out);
        out.push(CatalogEntry {
            title: format!("Case {case}: right state ({rr}, {ur}), Region {region}, {caption}"),
            name,
            scenario: scenario(params, left, right, t_end),
            kind: EntryKind::Panel {
                case,
                region: region.into(),
                caption: waves::parse_sequence(caption).expect("caption symbols are known"),
            },
        });
    }
}

fn transitions(out: &mut Vec<CatalogEntry>) {
    // (name, cases, stages, a, left_u, right, a(t), t_end, snapshots)
    let studies: [(&str, &[u8], &[&str], f64, f64, (f64, f64), f64, f64, usize); 5] = [
        ("case01_to_case04", &[1, 4], &["I_a", "II_0"], -1.5, -3.0, (2.0, -5.0), 0.1, 100.0, 20),
        ("case13_to_case16", &[13, 16], &["IV", "II_0"], -0.5, -3.0, (9.0, -9.0), 0.1, 210.0, 21),
        ("case07_to_case10", &[7, 10, 10], &["III_a", "V_C0VC0", "III_0"], -1.0, -3.0, (2.0, -5.0), 0.1, 100.0, 20),
        ("case19_to_case22", &[19, 22], &["V_C0VC0", "II_a"], 0.5, -3.0, (2.0, 4.0), 0.05, 200.0, 20),
        ("case22_to_case19", &[22, 19, 19], &["I_a", "IV", "V_C0VSaC0"], 0.5, 3.0, (7.0, 5.0), -0.01, 600.0, 20),
    ];
    for (name, cases, stages, a, ul, (rr, ur), src, t_end, snaps) in studies {
        let params = SystemParams::new(a, RHO_BAR, SourceTerm::constant(src)).expect("valid");
        let mut s = scenario(params, State::new(LEFT_RHO, ul), State::new(rr, ur), t_end);
        s.times = (1..=snaps).map(|k| t_end * k as f64 / snaps as f64).collect();
        s.blocks = TRANSITION_BLOCKS;
        let path: Vec<String> = cases.iter().zip(stages).map(|(c, r)| format!("Case {c}: {r}")).collect();
        out.push(CatalogEntry {
            name: name.into(),
            title: format!("a(t) = {src}: {}", path.join(" -> ")),
            scenario: s,
            kind: EntryKind::Transition { cases: cases.to_vec(), stages: stages.iter().map(|s| s.to_string()).collect() },
        });
    }
}

fn scans(out: &mut Vec<CatalogEntry>) {
    // (case, a, rho_bar, left, times)
    let figs: [(u8, f64, f64, (f64, f64), [f64; 4]); 3] = [
        (18, -0.5, 3.0, (5.0, 4.0), [0.0, 3.0, 6.0, 9.0]),
        (13, -0.5, 5.0, (3.0, -4.0), [0.0, 20.0, 40.0, 50.0]),
        (19, 0.5, 5.0, (3.0, -4.0), [0.0, 15.0, 30.0, 45.0]),
    ];
    for (case, a, rb, (rl, ul), times) in figs {
        let params = SystemParams::new(a, rb, SourceTerm::constant(0.1)).expect("valid");
        let left = State::new(rl, ul);
        let mut s = scenario(params, left, left, times[3]);
        s.times = times.to_vec();
        s.outputs = vec![OutputKind::Scan];
        out.push(CatalogEntry {
            name: format!("case{case:02}_scan"),
            title: format!("Case {case}: overcompressive region, a = {a}, a(t) = 0.1, left ({rl}, {ul}), rho_bar = {rb}"),
            scenario: s,
            kind: EntryKind::Scan { case, times: times.to_vec() },
        });
    }
}

fn maps(out: &mut Vec<CatalogEntry>) {
    for (case, a, ul) in MAP_CASES {
        let left = State::new(LEFT_RHO, ul);
        let mut s = scenario(frozen(a, RHO_BAR), left, left, 0.0);
        s.outputs = vec![OutputKind::Regions, OutputKind::Curves];
        out.push(CatalogEntry {
            name: format!("case{case:02}_regions"),
            title: format!("Case {case}: state space of regions, a = {a}, left ({LEFT_RHO}, {ul})"),
            scenario: s,
            kind: EntryKind::Map { case },
        });
    }
}

/// Every named scenario: panels first, then transitions, scans and maps.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    panels(&mut out);
    transitions(&mut out);
    scans(&mut out);
    maps(&mut out);
    out
}

pub fn find(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_entries() {
        let c = catalog();
        assert!(c.len() >= 30);
        let e = find("case01_region_Ia").unwrap();
        assert_eq!(e.scenario.params.a_exp, -1.5);
        assert_eq!(e.scenario.params.rho_bar, 5.0);
        assert!(e.scenario.params.source.is_zero());
        assert_eq!((e.scenario.left, e.scenario.right), (State::new(3.0, -3.0), State::new(2.0, -5.0)));
        assert_eq!(find("case04_region_IV").unwrap().scenario.right, State::new(9.0, -8.0));
        assert_eq!(find("case22_region_VI").unwrap().scenario.right, State::new(4.0, -4.0));
        assert!(find("case07_region_IIIa_2").is_some());
        let mut names: Vec<&str> = c.iter().map(|e| e.name.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), c.len());
    }

    #[test]
    fn round_sig_keeps_three_digits() {
        assert_eq!(round_sig(123.456, 3), 123.0);
        assert_eq!(round_sig(0.0123456, 3), 0.0123);
    }
}
