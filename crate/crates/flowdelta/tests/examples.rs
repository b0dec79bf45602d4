//! Worked examples, checked against closed forms evaluated here.

use flowdelta::classify::{self, Region, WaveOrder, Window};
use flowdelta::delta::{self, SpeedRoots};
use flowdelta::io::{self, catalog, IoError};
use flowdelta::solver::{self, ExtractOptions, Grid, RunConfig};
use flowdelta::waves::{self, AWaveKind, WaveKind};
use flowdelta::{Error, Execution, SourceTerm, State, SystemParams};

const RHO_BAR: f64 = 5.0;

/// Direct evaluations of the model formulas, independent of the library.
mod oracle {
    use super::RHO_BAR;

    pub fn p(a: f64, rho: f64) -> f64 {
        (rho / RHO_BAR).powf(a)
    }
    pub fn mobility(a: f64, rho: f64) -> f64 {
        1.0 - p(a, rho)
    }
    pub fn f1(a: f64, rho: f64, u: f64) -> f64 {
        rho * u * mobility(a, rho)
    }
    pub fn lambda_a(a: f64, rho: f64, u: f64) -> f64 {
        u * (1.0 - (a + 1.0) * p(a, rho))
    }
    pub fn lambda_0(a: f64, rho: f64, u: f64) -> f64 {
        u * mobility(a, rho)
    }
    pub fn shock_speed(a: f64, l: (f64, f64), rho_r: f64) -> f64 {
        l.1 * (1.0 - (l.0 * p(a, l.0) - rho_r * p(a, rho_r)) / (l.0 - rho_r))
    }
    /// `ρ` with `λ_0(ρ, u) = level`.
    pub fn contact_rho(a: f64, u: f64, level: f64) -> f64 {
        RHO_BAR * (1.0 - level / u).powf(1.0 / a)
    }
    /// Coefficients of the delta speed quadratic `qa s² + qb s + qc`.
    pub fn delta_quadratic(a: f64, l: (f64, f64), r: (f64, f64)) -> [f64; 3] {
        let jump = |g: &dyn Fn(f64, f64) -> f64| g(l.0, l.1) - g(r.0, r.1);
        [
            jump(&|r, _| r),
            -(jump(&|r, u| r * u) + jump(&|r, u| f1(a, r, u))),
            jump(&|r, u| u * f1(a, r, u)),
        ]
    }
}

fn params(a: f64) -> SystemParams {
    SystemParams::frozen(a, RHO_BAR).unwrap()
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + y.abs())
}

#[test]
fn source_integral() {
    assert!(close(SourceTerm::constant(0.1).integral(3.0), 0.3, 1e-15));
    assert_eq!(SourceTerm::constant(0.7).integral(0.0), 0.0);
    let s = SourceTerm::new(vec![(0.0, 0.1), (10.0, -0.2)]).unwrap();
    assert!(s.integral(15.0).abs() < 1e-14);
}

#[test]
fn mobility_values() {
    let p = params(-1.5);
    assert_eq!(p.mobility(RHO_BAR).unwrap(), 0.0);
    assert!(close(p.mobility(3.0).unwrap(), oracle::mobility(-1.5, 3.0), 1e-14));
    assert!(close(p.mobility(3.0).unwrap(), -1.151657, 1e-6));
    assert!(close(params(0.5).mobility(3.0).unwrap(), 0.225403, 1e-6));
}

#[test]
fn flux_values() {
    let p = params(-1.5);
    let f = p.flux(State::new(3.0, -3.0), 0.0).unwrap();
    assert!(close(f[0], oracle::f1(-1.5, 3.0, -3.0), 1e-14));
    assert!(close(f[0], 10.364913, 1e-6));
    assert!(close(f[1], -31.094739, 1e-6));
    assert_eq!(p.flux(State::new(RHO_BAR, 2.0), 0.0).unwrap(), [0.0, 0.0]);
    let moving = SystemParams::new(-1.5, RHO_BAR, SourceTerm::constant(0.1)).unwrap();
    assert_eq!(moving.flux(State::new(3.0, -3.0), 30.0).unwrap(), [0.0, 0.0]);
}

#[test]
fn eigenvalues_and_vectors() {
    let e = params(-1.5).eigenvalues(State::new(3.0, -3.0), 0.0);
    assert!(close(e.lambda_a, oracle::lambda_a(-1.5, 3.0, -3.0), 1e-14));
    assert!(close(e.lambda_a, -6.227486, 1e-6) && close(e.lambda_0, 3.454971, 1e-6));
    assert!(e.lambda_a < 0.0 && 0.0 < e.lambda_0);
    assert_eq!(params(-1.5).eigenvalues(State::new(RHO_BAR, 7.0), 0.0).lambda_0, 0.0);
    let e = params(0.5).eigenvalues(State::new(3.0, -3.0), 0.0);
    assert!(close(e.lambda_a, 0.485686, 1e-6) && close(e.lambda_0, -0.676209, 1e-6));
    assert!(e.lambda_a > e.lambda_0 && e.lambda_0 < 0.0);

    let v = params(-1.5).eigenvectors(State::new(3.0, -3.0), 0.0).unwrap();
    assert_eq!(v.r_a, [1.0, 0.0]);
    assert!(close(v.r_0[0], -3.454971, 1e-6) && close(v.r_0[1], 9.682457, 1e-6));
    let v = params(-1.5).eigenvectors(State::new(RHO_BAR, -3.0), 0.0).unwrap();
    assert_eq!(v.r_0, [0.0, -1.5 * -3.0]);
}

#[test]
fn conserved_round_trip_and_velocity() {
    let s = State::new(3.0, -3.0);
    let c = s.to_conserved();
    assert_eq!((c.rho, c.m), (3.0, -9.0));
    assert_eq!(c.to_state(), s);
    assert_eq!(State::new(0.0, 4.0).to_conserved().to_state(), State::new(0.0, 0.0));
    assert_eq!(State::new(5.0, 0.2).to_conserved().m, 1.0);
    let p = SystemParams::new(-1.5, RHO_BAR, SourceTerm::constant(0.1)).unwrap();
    assert_eq!(p.physical_velocity(s, 0.0), -3.0);
    assert!(p.physical_velocity(s, 30.0).abs() < 1e-14);
}

#[test]
fn a_family_shocks() {
    let p = params(-1.5);
    let l = State::new(3.0, -3.0);
    assert_eq!(waves::shock_speed_a(&params(-1.0), l, 7.0, 0.0).unwrap(), -3.0);
    let s = waves::shock_speed_a(&p, l, 2.0, 0.0).unwrap();
    assert!(close(s, oracle::shock_speed(-1.5, (3.0, -3.0), 2.0), 1e-13));
    assert!(close(s, -7.352166, 1e-6));
    assert_eq!(waves::shock_speed_a(&p, State::new(3.0, 0.0), 2.0, 0.0).unwrap(), 0.0);

    assert!(close(p.eigenvalues(State::new(2.0, -3.0), 0.0).lambda_a, -8.929271, 1e-6));
    assert!(waves::lax_admissible_a(&p, l, State::new(2.0, -3.0), s, 0.0));
    let s4 = waves::shock_speed_a(&p, l, 4.0, 0.0).unwrap();
    assert!(!waves::lax_admissible_a(&p, l, State::new(4.0, -3.0), s4, 0.0));
    assert!(!waves::lax_admissible_a(&params(-1.0), l, State::new(7.0, -3.0), -3.0, 0.0));
}

#[test]
fn a_wave_types() {
    let l = State::new(3.0, -3.0);
    assert_eq!(waves::a_wave(&params(-1.5), l, 2.0, 0.0).unwrap().kind, AWaveKind::Shock);
    assert_eq!(waves::a_wave(&params(-1.5), l, 4.0, 0.0).unwrap().kind, AWaveKind::Rarefaction);
    let c = waves::a_wave(&params(-1.0), l, 7.0, 0.0).unwrap();
    assert_eq!(c.kind, AWaveKind::ContactA);
    assert_eq!((c.speed_lo, c.speed_hi), (-3.0, -3.0));
}

#[test]
fn contact_curves() {
    let p = params(-1.5);
    let l = State::new(3.0, -3.0);
    assert_eq!(waves::contact_curve_u(&p, l, 3.0, 0.0).unwrap(), -3.0);
    let u = waves::contact_curve_u(&p, l, 4.0, 0.0).unwrap();
    assert!(close(u, -8.691, 1e-4));
    let level = oracle::lambda_0(-1.5, 3.0, -3.0);
    assert!(close(oracle::lambda_0(-1.5, 4.0, u), level, 1e-12));
    assert!(close(level, 3.4550, 1e-4));

    let (_, far) = waves::contact_asymptotes(&p, l, 0.0);
    assert!(close(far, 3.454971, 1e-6));
    let pos = SystemParams::new(0.5, RHO_BAR, SourceTerm::constant(0.1)).unwrap();
    let (_, far) = waves::contact_asymptotes(&pos, l, 2.0);
    assert!(close(far, -0.2, 1e-12));
    let big = waves::contact_curve_u(&pos, l, 1e9, 2.0).unwrap();
    assert!((big + 0.2).abs() < 1e-3);

    let branches = waves::contact_branches(&p, l, 0.0, &[1.0, 2.0, 4.0, 6.0, 8.0, 12.0]).unwrap();
    let mirror = branches.iter().find(|b| b.kind == waves::BranchKind::Mirror).unwrap();
    for s in &mirror.samples {
        assert!(close(p.eigenvalues(*s, 0.0).lambda_0, level, 1e-9));
    }
}

#[test]
fn vertical_contact() {
    let p = params(-1.5);
    let seg = waves::contact_vertical(&p, State::new(RHO_BAR, -3.0), 4.0).unwrap();
    assert!(!seg.samples.is_empty());
    for s in &seg.samples {
        assert_eq!(s.rho, RHO_BAR);
        assert_eq!(p.eigenvalues(*s, 0.0).lambda_0, 0.0);
    }
    let same = waves::contact_vertical(&p, State::new(RHO_BAR, -3.0), -3.0).unwrap();
    assert_eq!(same.samples, [State::new(RHO_BAR, -3.0)]);
}

#[test]
fn rankine_hugoniot_residuals() {
    let p = params(-1.5);
    let l = State::new(3.0, -3.0);
    let r = waves::rh_residual(&p, l, State::new(2.0, -3.0), -7.352165720225756, 0.0);
    assert!(r[0].abs() < 1e-9 && r[1].abs() < 1e-9);
    let r = waves::rh_residual(&p, l, State::new(4.0, -8.691), 3.454971, 0.0);
    assert!(r[0].abs() < 1e-3 && r[1].abs() < 1e-2, "{r:?}");
    let u = waves::contact_curve_u(&p, l, 4.0, 0.0).unwrap();
    let r = waves::rh_residual(&p, l, State::new(4.0, u), oracle::lambda_0(-1.5, 3.0, -3.0), 0.0);
    assert!(r[0].abs() < 1e-6 && r[1].abs() < 1e-6);
    assert_eq!(waves::rh_residual(&p, l, l, 12.0, 0.0), [0.0, 0.0]);
}

#[test]
fn delta_speed_roots() {
    let p = params(-1.5);
    let (l, r) = (State::new(3.0, 3.0), State::new(9.0, -8.0));
    let [qa, qb, qc] = oracle::delta_quadratic(-1.5, (3.0, 3.0), (9.0, -8.0));
    assert!(close(-qa, 6.0, 1e-12) && close(-qb, 112.8208, 1e-6) && close(-qc, 368.581, 1e-6));
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    let mut want = [(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)];
    want.sort_by(|x, y| y.total_cmp(x));
    let SpeedRoots::Pair(hi, lo) = delta::initial_speed_roots(&p, l, r).unwrap() else { panic!("two roots") };
    assert!(close(hi, want[0], 1e-12) && close(lo, want[1], 1e-12));
    assert!(close(hi, -4.2092, 1e-4) && close(lo, -14.594, 1e-4));
    assert!(matches!(delta::initial_speed_roots(&p, l, l), Err(Error::NoJump)));
    assert!(matches!(
        delta::initial_speed_roots(&p, State::new(3.0, 3.0), State::new(3.0, -1.0)).unwrap(),
        SpeedRoots::Single(_)
    ));
}

#[test]
fn overcompressive_bounds() {
    let p = params(-1.5);
    let (l, r) = (State::new(3.0, 3.0), State::new(9.0, -8.0));
    let er = p.eigenvalues(r, 0.0);
    let el = p.eigenvalues(l, 0.0);
    assert!(close(er.lambda_a.max(er.lambda_0), -4.6873, 1e-4));
    assert!(close(el.lambda_a.min(el.lambda_0), -3.4550, 1e-4));
    assert!(delta::overcompressive_at(&p, l, r, -4.2092, 0.0));
    assert!(!delta::overcompressive_at(&p, l, r, -14.594, 0.0));
    assert!(!delta::overcompressive_at(&p, l, l, p.eigenvalues(l, 0.0).lambda_0, 0.0));
}

#[test]
fn delta_closed_forms() {
    let p = params(-1.5);
    let (l, r) = (State::new(3.0, 3.0), State::new(9.0, -8.0));
    let traj = delta::integrate_delta_neg(&p, l, r, 2.0, 1e-3).unwrap();
    let s = traj.speed[0];
    let zeta_rate = traj.zeta[1] / traj.times[1];
    assert!(close(zeta_rate, 6.5656, 1e-4));
    let k = traj.times.len() - 1;
    assert!(close(traj.x[k], s * traj.times[k], 1e-10));
    assert!(close(traj.zeta[k], zeta_rate * traj.times[k], 1e-10));

    let single = delta::integrate_delta_neg(&p, l, r, 0.0, 1e-3).unwrap();
    assert_eq!((single.times.as_slice(), single.x.as_slice(), single.zeta.as_slice()), (&[0.0][..], &[0.0][..], &[0.0][..]));
    assert!(close(single.eta[0], -4.2092, 1e-4));

    // a > 0: x' = [f2]/[ρũ] and ζ' = [f1] − [ρ][f2]/[ρũ], both constant.
    let q = params(0.5);
    let (l, r) = (State::new(3.0, -3.0), State::new(9.0, 9.0));
    let traj = delta::integrate_delta_pos(&q, l, r, 1.0, 1e-3).unwrap();
    let f2 = |s: State| s.u_tilde * oracle::f1(0.5, s.rho, s.u_tilde);
    let speed = (f2(l) - f2(r)) / (l.rho * l.u_tilde - r.rho * r.u_tilde);
    let zeta = (oracle::f1(0.5, l.rho, l.u_tilde) - oracle::f1(0.5, r.rho, r.u_tilde)) - (l.rho - r.rho) * speed;
    let k = traj.times.len() - 1;
    assert!(close(traj.x[k], speed, 1e-10));
    assert!(close(traj.zeta[k], zeta, 1e-10));
    assert!(traj.internal_amplitude(&q, k).is_finite());
    let single = delta::integrate_delta_pos(&q, l, r, 0.0, 1e-3).unwrap();
    assert_eq!((single.x[0], single.zeta[0]), (0.0, 0.0));
}

#[test]
fn delta_admissibility_of_equal_states() {
    let p = SystemParams::new(-0.5, RHO_BAR, SourceTerm::constant(0.1)).unwrap();
    let l = State::new(3.0, -4.0);
    assert!(!delta::delta_admissible(&p, l, l, 0.0, 1e-3));
}

#[test]
fn case_ids() {
    let l = State::new(3.0, -3.0);
    assert_eq!(classify::case_id(&params(-1.5), l, 0.0).unwrap().index, 1);
    assert_eq!(classify::case_id(&params(0.5), l, 0.0).unwrap().index, 19);
    let p = SystemParams::new(-1.5, RHO_BAR, SourceTerm::constant(0.1)).unwrap();
    let tr = classify::case_transitions(&p, l, 100.0).unwrap();
    assert_eq!(tr.len(), 1);
    assert_eq!((tr[0].from.index, tr[0].to.index), (1, 4));
    assert!((tr[0].t - 30.0).abs() < 1e-9);
}

#[test]
fn case1_middle_state() {
    let p = params(-1.5);
    let (l, r) = (State::new(3.0, -3.0), State::new(2.0, -5.0));
    let m = classify::classical_middle_state(&p, l, r, WaveOrder::AFirst, 0.0).unwrap();
    let level = oracle::lambda_0(-1.5, 2.0, -5.0);
    assert!(close(level, 14.764, 1e-4));
    assert!(close(m.rho, oracle::contact_rho(-1.5, -3.0, level), 1e-10));
    assert!(close(m.rho, 1.5276, 1e-4));
    assert_eq!(m.u_tilde, -3.0);
    let s = oracle::shock_speed(-1.5, (3.0, -3.0), m.rho);
    assert!(close(s, -8.2789, 1e-4));
    assert!(oracle::lambda_a(-1.5, m.rho, -3.0) < s && s < oracle::lambda_a(-1.5, 3.0, -3.0));

    let on_line = State::new(2.0, -3.0);
    assert_eq!(classify::classical_middle_state(&p, l, on_line, WaveOrder::AFirst, 0.0).unwrap(), on_line);
    // The 0-contact through (1, 4) stays above its asymptote 4(1 − 5^1.5) < −3.
    let far = State::new(1.0, 4.0);
    assert!(matches!(
        classify::classical_middle_state(&p, l, far, WaveOrder::AFirst, 0.0),
        Err(Error::NoIntersection)
    ));
}

#[test]
fn captioned_patterns() {
    let w = classify::classify_region(&params(-1.5), State::new(3.0, -3.0), State::new(2.0, -5.0), 0.0).unwrap();
    assert_eq!(w.label(), "I_a");
    assert_eq!(w.kinds(), [WaveKind::ShockA, WaveKind::Contact0]);
    let w = classify::classify_region(&params(-1.5), State::new(3.0, 3.0), State::new(9.0, -8.0), 0.0).unwrap();
    assert_eq!((w.region, w.kinds()), (Region::IV, vec![WaveKind::Delta]));
    let w = classify::classify_region(&params(0.5), State::new(3.0, 3.0), State::new(4.0, -4.0), 0.0).unwrap();
    assert_eq!(w.region, Region::VI);
    assert_eq!(w.kinds(), [WaveKind::ShockA, WaveKind::Contact0, WaveKind::ShockA]);
    assert!(w.waves[1].vertical);
}

#[test]
fn case_maps() {
    let exec = Execution::Parallel;
    let w = Window::default();
    let m = classify::region_map(&params(-1.5), State::new(3.0, -3.0), 0.0, w, 60, exec).unwrap();
    let mut got = m.distinct();
    got.sort();
    assert_eq!(got, ["II_a", "IV_a", "I_a", "VI"]);
    let m = classify::region_map(&params(-1.0), State::new(3.0, 3.0), 0.0, w, 60, exec).unwrap();
    let mut got = m.distinct();
    got.sort();
    assert_eq!(got, ["III_0", "IV", "V_C0VC0", "V_C0VCaC0"]);

    let l = State::new(3.0, -3.0);
    let tiny = Window::new(6.0, -3.5, -2.5).unwrap();
    let m = classify::region_map(&params(-1.5), l, 0.0, tiny, 1, exec).unwrap();
    assert_eq!(m.rho, [3.0]);
    let w = classify::classify_region(&params(-1.5), l, State::new(m.rho[0], m.u_tilde[0]), 0.0).unwrap();
    assert!(w.waves.iter().all(|x| x.left == x.right));
}

#[test]
fn constant_data_is_preserved() {
    let s = State::new(3.0, -3.0);
    let grid = Grid::centered(50, 1.0);
    let cfg = RunConfig::new(params(-1.5), s, s, grid, 20.0);
    let out = solver::run(&cfg, Execution::Sequential).unwrap();
    let last = out.snapshots.last().unwrap();
    assert!(last.rho.iter().all(|&r| r == 3.0));
    assert!(last.u_tilde.iter().all(|&u| u == -3.0));
    let ws = solver::extract_wave_structure(&params(-1.5), &out.grid, last, &ExtractOptions::default());
    assert!(ws.waves.is_empty());

    let zero = RunConfig::new(params(-1.5), State::new(3.0, -3.0), State::new(2.0, -5.0), grid, 0.0);
    let out = solver::run(&zero, Execution::Sequential).unwrap();
    assert_eq!(out.snapshots.len(), 1);
    assert_eq!(out.snapshots[0].rho[0], 3.0);
    assert_eq!(out.snapshots[0].rho[49], 2.0);
}

#[test]
fn region_one_profile_shape() {
    let p = params(-1.5);
    let (l, r) = (State::new(3.0, -3.0), State::new(2.0, -5.0));
    let cfg = RunConfig::new(p.clone(), l, r, Grid::centered(solver::required_cells(&p, l, r, 40.0, 1.0), 1.0), 40.0);
    let out = solver::run(&cfg, Execution::Parallel).unwrap();
    let ws = solver::extract_wave_structure(&p, &out.grid, out.snapshots.last().unwrap(), &ExtractOptions::default());
    assert_eq!(ws.sequence(), "S_a + C_0");
    let shock = &ws.waves[0];
    assert!((shock.left.u_tilde - shock.right.u_tilde).abs() < 0.02 * 3.0);
    assert!((shock.left.rho - shock.right.rho).abs() > 1.0);
    let contact = &ws.waves[1];
    assert!((contact.left.u_tilde - contact.right.u_tilde).abs() > 1.0);
}

#[test]
fn refinement_studies() {
    let p = params(-1.5);
    let (l, r) = (State::new(3.0, 3.0), State::new(9.0, -8.0));
    let cfg = RunConfig::new(p.clone(), l, r, Grid::centered(solver::required_cells(&p, l, r, 3.0, 0.25), 0.25), 3.0);
    let levels = solver::refine_study(&cfg, 2, Execution::Sequential).unwrap();
    assert!(levels[1].peak_rho > levels[0].peak_rho);
    assert!(matches!(solver::refine_study(&cfg, 1, Execution::Sequential), Err(Error::InvalidParameter(_))));

    let (l, r) = (State::new(3.0, -3.0), State::new(2.0, -5.0));
    let cfg = RunConfig::new(p.clone(), l, r, Grid::centered(solver::required_cells(&p, l, r, 10.0, 0.5), 0.5), 10.0);
    let levels = solver::refine_study(&cfg, 2, Execution::Sequential).unwrap();
    assert!((levels[1].peak_rho - levels[0].peak_rho).abs() < 0.01 * levels[0].peak_rho);
    assert!(levels[1].peak_rho <= 3.0 * (1.0 + 1e-9));
}

#[test]
fn catalog_examples() {
    let e = catalog::find("case01_region_Ia").unwrap();
    let s = &e.scenario;
    assert_eq!((s.params.a_exp, s.params.rho_bar), (-1.5, 5.0));
    assert_eq!((s.left, s.right), (State::new(3.0, -3.0), State::new(2.0, -5.0)));
    assert!(s.params.source.is_zero());
    assert_eq!(catalog::find("case04_region_IV").unwrap().scenario.right, State::new(9.0, -8.0));
    assert_eq!(catalog::find("case22_region_VI").unwrap().scenario.right, State::new(4.0, -4.0));
    assert!(catalog::catalog().len() >= 30);

    assert!(matches!(io::parse_config(""), Err(IoError::Parse { .. })));
    let mut text = io::render_config(s);
    text.push_str("");
    let bad = text.replace("run.cfl = 0.45", "run.cfl = 0.9");
    assert!(matches!(io::parse_config(&bad), Err(IoError::Validation(_))));
}
